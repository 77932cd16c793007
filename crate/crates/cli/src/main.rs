//! Batch front-end: builds and caches coefficient tables, evaluates
//! `L_f^(m)`, runs zero searches, counting, density, mean-square and
//! Littlewood campaigns, and emits CSV/JSON reports.

mod config;
mod report;
mod verify;

use std::path::PathBuf;
use std::process::ExitCode;
use std::sync::Arc;

use anyhow::{Context, Result};
use clap::{Parser, Subcommand};

use cusplf::coefficients::{cache, deligne_check, EigenformSpec};
use cusplf::lfunction::{EvalOptions, LFunctionEvaluator};
use cusplf::zeros;
use cusplf::Complex64;

use config::{Precision, RunConfig};
use report::{csv_row, fmt_f64, write_atomic};

#[derive(Parser)]
#[command(name = "cusplf", about = "L-functions of level-1 eigenforms: evaluation, zeros, counts")]
struct Cli {
    /// key=value config file; flags override it
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// eigenform weight (12, 16, 18, 20, 22, 26)
    #[arg(long, global = true)]
    weight: Option<u32>,
    /// derivative orders, comma separated
    #[arg(long, global = true)]
    m: Option<String>,
    /// height grid, comma separated
    #[arg(long = "T", global = true)]
    t_grid: Option<String>,
    /// abscissa grid, comma separated
    #[arg(long, global = true)]
    sigma: Option<String>,
    /// grid shorthand key=value overrides (repeatable), e.g. --grid T=20,40
    #[arg(long, global = true)]
    grid: Vec<String>,
    /// double | extended
    #[arg(long, global = true)]
    precision: Option<String>,
    /// worker threads (0 = all cores)
    #[arg(long, global = true)]
    jobs: Option<usize>,
    /// output directory
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// coefficient cache directory
    #[arg(long, global = true)]
    cache: Option<PathBuf>,
    /// coefficient table length
    #[arg(long, global = true)]
    length: Option<usize>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Evaluate L^(m)(s) at one point
    Eval {
        /// point as "re,im"
        #[arg(long, allow_hyphen_values = true)]
        s: String,
        /// derivative order
        #[arg(long, default_value_t = 0)]
        order: usize,
    },
    /// Build (or load) the coefficient cache and print table facts
    Coeffs,
    /// Isolate zeros up to max T and export the records
    Zeros,
    /// Counting report N_{f,m}(T) over the T grid
    Count,
    /// Zero-density confrontation over the (sigma, T) grids
    Density,
    /// Mean-square reports over the (sigma, T) grids
    Meansquare,
    /// Littlewood two-sided identity over the sigma grid at max T
    Littlewood,
    /// Run the verification battery
    Verify,
}

fn build_config(cli: &Cli) -> Result<RunConfig> {
    let mut cfg = match &cli.config {
        Some(p) => RunConfig::from_file(p)?,
        None => RunConfig::default(),
    };
    if let Some(w) = cli.weight {
        cfg.apply("weight", &w.to_string())?;
    }
    if let Some(m) = &cli.m {
        cfg.apply("m", m)?;
    }
    if let Some(t) = &cli.t_grid {
        cfg.apply("T", t)?;
    }
    if let Some(s) = &cli.sigma {
        cfg.apply("sigma", s)?;
    }
    for g in &cli.grid {
        let (k, v) = g.split_once('=').context("--grid expects key=value")?;
        cfg.apply(k, v)?;
    }
    if let Some(p) = &cli.precision {
        cfg.apply("precision", p)?;
    }
    if let Some(j) = cli.jobs {
        cfg.apply("jobs", &j.to_string())?;
    }
    if let Some(o) = &cli.out {
        cfg.out_dir = o.clone();
    }
    if let Some(c) = &cli.cache {
        cfg.cache_dir = c.clone();
    }
    if let Some(n) = cli.length {
        cfg.apply("length", &n.to_string())?;
    }
    cfg.validate()?;
    Ok(cfg)
}

pub(crate) fn load_evaluator(cfg: &RunConfig) -> Result<Arc<LFunctionEvaluator>> {
    let spec = EigenformSpec::new(cfg.weight)?;
    let (table, from_cache) = cache::load_or_build(spec, cfg.table_len, &cfg.cache_file())?;
    if !from_cache {
        eprintln!(
            "cache: rebuilt coefficients for weight {} (length {})",
            cfg.weight, cfg.table_len
        );
    }
    let opts = EvalOptions {
        compensated: cfg.precision == Precision::Extended,
        ..EvalOptions::default()
    };
    Ok(Arc::new(LFunctionEvaluator::new(table, opts)?))
}

fn parse_point(s: &str) -> Result<Complex64> {
    let (re, im) = s.split_once(',').context("point must be re,im")?;
    Ok(Complex64::new(re.trim().parse()?, im.trim().parse()?))
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e:#}");
            // Usage-style errors (bad config/arguments) exit 2.
            ExitCode::from(2)
        }
    }
}

fn run(cli: &Cli) -> Result<ExitCode> {
    let cfg = build_config(cli)?;
    if cfg.jobs > 0 {
        rayon::ThreadPoolBuilder::new()
            .num_threads(cfg.jobs)
            .build_global()
            .ok();
    }
    match &cli.command {
        Command::Eval { s, order } => {
            let ev = load_evaluator(&cfg)?;
            let s = parse_point(s)?;
            let r = ev.eval(s, *order).map_err(anyhow::Error::from)?;
            let regime = match r.regime {
                cusplf::lfunction::Regime::Series => "series",
                cusplf::lfunction::Regime::Completed => "completed",
                cusplf::lfunction::Regime::Reflected => "reflected",
            };
            println!(
                "L^({})({}) = {} + {}i   error_estimate={:.3e}   regime={}",
                order, s, r.value.re, r.value.im, r.error_estimate, regime
            );
            Ok(ExitCode::SUCCESS)
        }
        Command::Coeffs => {
            let ev = load_evaluator(&cfg)?;
            let table = ev.table();
            let rep = deligne_check(table).map_err(anyhow::Error::from)?;
            let fit = cusplf::asymptotics::rankin_fit(table);
            println!(
                "weight={} label={} length={} n_f={} C_hat={:.6} deligne_max_ratio={:.6} (at n={})",
                table.spec().weight(),
                table.spec().label(),
                table.len(),
                table.n_f(),
                fit.c_hat,
                rep.max_ratio,
                rep.argmax
            );
            Ok(ExitCode::SUCCESS)
        }
        Command::Zeros => {
            let ev = load_evaluator(&cfg)?;
            let t_max = cfg.t_grid.iter().cloned().fold(0.0, f64::max);
            let mut lines = Vec::new();
            let mut json = Vec::new();
            for &m in &cfg.orders {
                let zs = zeros::isolate_in_strip(&ev, t_max, m).map_err(anyhow::Error::from)?;
                for z in &zs {
                    lines.push(format!(
                        "{} {} {} {:.3e} {:?}",
                        z.m, z.re, z.im, z.residual, z.method
                    ));
                }
                json.extend(zs);
            }
            let path = cfg.out_dir.join(format!("zeros_w{}.txt", cfg.weight));
            write_atomic(&path, &(lines.join("\n") + "\n"))?;
            let jpath = cfg.out_dir.join(format!("zeros_w{}.json", cfg.weight));
            write_atomic(&jpath, &(serde_json::to_string_pretty(&json)? + "\n"))?;
            println!("wrote {} and {}", path.display(), jpath.display());
            Ok(ExitCode::SUCCESS)
        }
        Command::Count => {
            let ev = load_evaluator(&cfg)?;
            let mut rows = vec![csv_row(&[
                "m".into(),
                "T".into(),
                "count".into(),
                "main_term".into(),
                "deviation".into(),
                "deviation_over_logT".into(),
            ])];
            for &m in &cfg.orders {
                for &t in &cfg.t_grid {
                    let r = zeros::count_to_height(&ev, t, m).map_err(anyhow::Error::from)?;
                    rows.push(csv_row(&[
                        m.to_string(),
                        fmt_f64(t),
                        r.computed_count.to_string(),
                        fmt_f64(r.main_term),
                        fmt_f64(r.deviation),
                        fmt_f64(r.deviation_over_log_t),
                    ]));
                }
            }
            let path = cfg.out_dir.join(format!("count_w{}.csv", cfg.weight));
            write_atomic(&path, &(rows.join("\n") + "\n"))?;
            println!("wrote {}", path.display());
            Ok(ExitCode::SUCCESS)
        }
        Command::Density => {
            let ev = load_evaluator(&cfg)?;
            let t_max = cfg.t_grid.iter().cloned().fold(0.0, f64::max);
            let mut reports = Vec::new();
            let mut all_pass = true;
            for &m in &cfg.orders {
                let zs = zeros::isolate_in_strip(&ev, t_max, m).map_err(anyhow::Error::from)?;
                for &t in &cfg.t_grid {
                    for &s in &cfg.sigma_grid {
                        let c = zeros::count_right_of(&ev, &zs, s, t, m)
                            .map_err(anyhow::Error::from)?;
                        let rep = cusplf::asymptotics::density_envelope(
                            ev.table(),
                            s,
                            t,
                            m,
                            ev.sigma_right(m),
                            c.computed_count,
                        )
                        .map_err(anyhow::Error::from)?;
                        all_pass &= rep.pass;
                        reports.push(rep);
                    }
                }
            }
            let path = cfg.out_dir.join(format!("density_w{}.json", cfg.weight));
            write_atomic(&path, &(serde_json::to_string_pretty(&reports)? + "\n"))?;
            println!("wrote {}", path.display());
            Ok(if all_pass {
                ExitCode::SUCCESS
            } else {
                ExitCode::FAILURE
            })
        }
        Command::Meansquare => {
            let ev = load_evaluator(&cfg)?;
            let mut rows = vec![csv_row(&[
                "m".into(),
                "sigma".into(),
                "T".into(),
                "numeric".into(),
                "reference".into(),
                "difference".into(),
                "normalized_difference".into(),
            ])];
            let mut reports = Vec::new();
            for &m in &cfg.orders {
                for &s in &cfg.sigma_grid {
                    for &t in &cfg.t_grid {
                        let r = cusplf::asymptotics::mean_square_numeric(&ev, s, t, m)
                            .map_err(anyhow::Error::from)?;
                        rows.push(csv_row(&[
                            m.to_string(),
                            fmt_f64(s),
                            fmt_f64(t),
                            fmt_f64(r.numeric_integral),
                            fmt_f64(r.reference_main),
                            fmt_f64(r.difference),
                            fmt_f64(r.normalized_difference),
                        ]));
                        reports.push(r);
                    }
                }
            }
            let path = cfg.out_dir.join(format!("meansquare_w{}.csv", cfg.weight));
            write_atomic(&path, &(rows.join("\n") + "\n"))?;
            let jpath = cfg.out_dir.join(format!("meansquare_w{}.json", cfg.weight));
            write_atomic(&jpath, &(serde_json::to_string_pretty(&reports)? + "\n"))?;
            println!("wrote {} and {}", path.display(), jpath.display());
            Ok(ExitCode::SUCCESS)
        }
        Command::Littlewood => {
            let ev = load_evaluator(&cfg)?;
            let t_max = cfg.t_grid.iter().cloned().fold(0.0, f64::max);
            let mut reports = Vec::new();
            for &m in &cfg.orders {
                for &s in &cfg.sigma_grid {
                    if s >= ev.sigma_right(m) {
                        continue;
                    }
                    let r =
                        zeros::littlewood_check(&ev, s, t_max, m).map_err(anyhow::Error::from)?;
                    reports.push(r);
                }
            }
            let path = cfg.out_dir.join(format!("littlewood_w{}.json", cfg.weight));
            write_atomic(&path, &(serde_json::to_string_pretty(&reports)? + "\n"))?;
            println!("wrote {}", path.display());
            Ok(ExitCode::SUCCESS)
        }
        Command::Verify => verify::run(&cfg),
    }
}
