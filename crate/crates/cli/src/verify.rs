//! The `verify` subcommand: a deterministic battery of identity, oracle and
//! bounded-deviation checks sized by the configured grids.

use std::process::ExitCode;

use anyhow::Result;
use serde::Serialize;

use cusplf::asymptotics::{density_envelope, main_term_raw, mean_square_numeric};
use cusplf::coefficients::{deligne_check, eigenform_series_direct};
use cusplf::lfunction::Regime;
use cusplf::zeros::{
    count_right_of, count_to_height, isolate_in_strip, littlewood_check, real_zero_scan,
    zero_free_certify,
};
use cusplf::Complex64;

use crate::config::RunConfig;
use crate::report::write_atomic;

#[derive(Debug, Serialize)]
struct Check {
    name: &'static str,
    pass: bool,
    observed: String,
    threshold: String,
}

fn check(name: &'static str, pass: bool, observed: String, threshold: String) -> Check {
    println!("{}  {name}: {observed} (require {threshold})", if pass { "PASS" } else { "FAIL" });
    Check {
        name,
        pass,
        observed,
        threshold,
    }
}

pub fn run(cfg: &RunConfig) -> Result<ExitCode> {
    let ev = crate::load_evaluator(cfg)?;
    let table = ev.table();
    let t_max = cfg.t_grid.iter().cloned().fold(0.0, f64::max);
    let max_m = cfg.orders.iter().cloned().max().unwrap_or(1).min(3);
    let mut checks: Vec<Check> = Vec::new();

    // 1. Coefficient exactness on an initial segment.
    {
        let n = table.len().min(2000);
        let direct = eigenform_series_direct(table.spec(), n)?;
        let mut exact = true;
        for i in 1..=n {
            if table.a(i) != direct.coeff(i) {
                exact = false;
                break;
            }
        }
        checks.push(check(
            "coefficient-exactness",
            exact,
            format!("multiplicative build == direct convolution to n = {n}"),
            "exact equality".into(),
        ));
    }

    // 2. Deligne bound and Rankin stability.
    {
        let rep = deligne_check(table)?;
        checks.push(check(
            "deligne-bound",
            rep.max_ratio <= 1.0,
            format!("max |lambda(n)|/d(n) = {:.6} at n = {}", rep.max_ratio, rep.argmax),
            "<= 1".into(),
        ));
        let fit = cusplf::asymptotics::rankin_fit(table);
        let drift_ok = fit.drift_exponent.map(|e| e <= 0.7).unwrap_or(true);
        checks.push(check(
            "rankin-drift",
            drift_ok,
            format!(
                "C_hat = {:.6}, drift exponent = {:?}",
                fit.c_hat, fit.drift_exponent
            ),
            "exponent <= 3/5 + 0.1".into(),
        ));
    }

    // 3. Functional-equation residual on a fixed grid.
    {
        let mut worst = 0.0f64;
        let mut state = 0x9e3779b97f4a7c15u64;
        let mut rnd = move || {
            state ^= state << 13;
            state ^= state >> 7;
            state ^= state << 17;
            (state >> 11) as f64 / (1u64 << 53) as f64
        };
        for m in 0..=max_m {
            for _ in 0..6 {
                let s = Complex64::new(rnd() * 5.0 - 2.0, rnd() * t_max.min(50.0));
                let lhs = match ev.eval_in_regime(s, m, Regime::Completed) {
                    Ok(v) => v,
                    Err(_) => continue,
                };
                let chi = ev.chi_jet(s, m)?;
                let mut rhs = Complex64::new(0.0, 0.0);
                for r in 0..=m {
                    let mut b = 1.0f64;
                    for i in 0..r {
                        b = b * (m - i) as f64 / (i + 1) as f64;
                    }
                    if r % 2 == 1 {
                        b = -b;
                    }
                    rhs += b * chi.value(m - r) * ev.eval(Complex64::new(1.0, 0.0) - s, r)?.value;
                }
                let scale = lhs.value.norm().max(rhs.norm()).max(1e-10);
                worst = worst.max((lhs.value - rhs).norm() / scale);
            }
        }
        checks.push(check(
            "functional-equation",
            worst <= 1e-7,
            format!("max relative residual {worst:.3e}"),
            "<= 1e-7".into(),
        ));
    }

    // 4. Regime overlaps and the chi reflection identity.
    {
        let mut worst_pair = 0.0f64;
        for &(re, t) in &[(1.3, 4.0), (1.45, 12.0), (-0.3, 6.0), (-0.1, 16.0)] {
            let s = Complex64::new(re, t);
            let (a, b) = if re > 0.5 {
                (
                    ev.eval_in_regime(s, 0, Regime::Series)?,
                    ev.eval_in_regime(s, 0, Regime::Completed)?,
                )
            } else {
                (
                    ev.eval_in_regime(s, 0, Regime::Completed)?,
                    ev.eval_in_regime(s, 0, Regime::Reflected)?,
                )
            };
            let gap = (a.value - b.value).norm();
            let budget = (a.error_estimate + b.error_estimate).max(1e-9 * a.value.norm());
            worst_pair = worst_pair.max(gap / budget);
        }
        let mut worst_chi = 0.0f64;
        for i in 0..10 {
            let s = Complex64::new(-1.0 + 0.35 * i as f64, 1.0 + 2.3 * i as f64);
            let p = ev.chi_jet(s, 0)?.value(0) * ev.chi_jet(Complex64::new(1.0, 0.0) - s, 0)?.value(0);
            worst_chi = worst_chi.max((p - Complex64::new(1.0, 0.0)).norm());
        }
        checks.push(check(
            "regime-overlap",
            worst_pair <= 1.0,
            format!("max gap / summed estimates = {worst_pair:.3}"),
            "<= 1".into(),
        ));
        checks.push(check(
            "chi-reflection",
            worst_chi <= 1e-9,
            format!("max |chi(s) chi(1-s) - 1| = {worst_chi:.3e}"),
            "<= 1e-9".into(),
        ));
    }

    // 5. Zero-free certification and trivial-zero scan.
    {
        let rep = zero_free_certify(&ev, max_m.min(2), t_max)?;
        checks.push(check(
            "zero-free-regions",
            rep.majorant_at_sigma <= 0.5 && rep.left_band_count == 0 && rep.grid_min_f >= 0.5 - 1e-6,
            format!(
                "sigma_right = {:.2}, majorant {:.4}, left band count {}, min |F| on grid {:.4}",
                rep.sigma_right, rep.majorant_at_sigma, rep.left_band_count, rep.grid_min_f
            ),
            "majorant <= 1/2, empty left band, |F| >= 1/2 - 1e-6".into(),
        ));
        let mut per_interval_ok = true;
        let zs = real_zero_scan(&ev, -15.0, -10.0, max_m.min(2))?;
        for n in -14..=-10i64 {
            let cnt = zs
                .iter()
                .filter(|&&z| z > (n - 1) as f64 && z < n as f64)
                .count();
            per_interval_ok &= cnt == 1;
        }
        checks.push(check(
            "real-zeros",
            per_interval_ok,
            format!("{} real zeros in [-15, -10], one per unit interval", zs.len()),
            "exactly one per (n-1, n)".into(),
        ));
    }

    // 6. Counting against the main term over the T grid.
    {
        let mut worst = 0.0f64;
        let mut rows = Vec::new();
        for &m in &cfg.orders {
            for &t in &cfg.t_grid {
                if t < 18.0 {
                    continue;
                }
                let r = count_to_height(&ev, t, m)?;
                worst = worst.max(r.deviation_over_log_t.abs());
                rows.push(format!("m={m} T={t}: N={} dev/logT={:.3}", r.computed_count, r.deviation_over_log_t));
            }
        }
        checks.push(check(
            "counting-main-term",
            worst <= 3.0,
            format!("max |deviation|/log T = {worst:.3} over {} points", rows.len()),
            "<= 3".into(),
        ));
    }

    // 7. Littlewood identity at the smallest admissible sigma.
    {
        let m = cfg.orders.iter().cloned().find(|&m| m >= 1).unwrap_or(1);
        let sigma = cfg
            .sigma_grid
            .iter()
            .cloned()
            .find(|&s| s > 0.5)
            .unwrap_or(0.55);
        let t = t_max.min(20.0).max(6.0);
        let r = littlewood_check(&ev, sigma, t, m)?;
        let tol = 1e-5 * r.rhs_integral_side.abs().max(1.0);
        checks.push(check(
            "littlewood-identity",
            r.discrepancy <= tol,
            format!(
                "m={m} sigma={sigma} T={t}: |LHS - RHS| = {:.3e} (LHS {:.6}, RHS {:.6})",
                r.discrepancy, r.lhs_sum_side, r.rhs_integral_side
            ),
            "<= 1e-5 max(1, |RHS|)".into(),
        ));
    }

    // 8. Mean squares at sigma = 2 and inside the strip.
    {
        let t = t_max.min(20.0).max(8.0);
        let a = mean_square_numeric(&ev, 2.0, t, 0)?;
        let b = mean_square_numeric(&ev, 0.75, t, 1)?;
        checks.push(check(
            "mean-squares",
            a.converged && b.converged && a.difference.abs() < 2.0 && b.normalized_difference.abs() < 10.0,
            format!(
                "sigma=2: diff {:.4}; sigma=0.75 m=1: normalized diff {:.4}",
                a.difference, b.normalized_difference
            ),
            "O(1) at sigma 2; bounded normalized diff".into(),
        ));
    }

    // 9. Density envelope over the configured grids.
    {
        let mut all = true;
        let mut rows = 0;
        for &m in &cfg.orders {
            let zs = isolate_in_strip(&ev, t_max, m)?;
            for &t in &cfg.t_grid {
                for &s in &cfg.sigma_grid {
                    if s <= 0.5 {
                        continue;
                    }
                    let c = count_right_of(&ev, &zs, s, t, m)?;
                    let rep = density_envelope(table, s, t, m, ev.sigma_right(m), c.computed_count)?;
                    all &= rep.pass;
                    rows += 1;
                }
            }
        }
        checks.push(check(
            "density-envelope",
            all,
            format!("{rows} grid points dominated"),
            "empirical count <= explicit bound".into(),
        ));
    }

    // 10. Counting difference N_f - N_{f,m} ~ (T/2pi) log n_f.
    if cfg.orders.iter().any(|&m| m >= 1) && t_max >= 18.0 {
        let m = cfg.orders.iter().cloned().find(|&m| m >= 1).unwrap();
        let mut worst = 0.0f64;
        for &t in cfg.t_grid.iter().filter(|&&t| t >= 18.0) {
            let a = count_to_height(&ev, t, 0)?;
            let b = count_to_height(&ev, t, m)?;
            let expect = main_term_raw(t, 0, table.n_f()) - main_term_raw(t, m, table.n_f());
            let dev = ((a.computed_count - b.computed_count) as f64 - expect).abs() / t.ln();
            worst = worst.max(dev);
        }
        checks.push(check(
            "counting-difference",
            worst <= 3.0,
            format!("max |(N_f - N_f,m) - (T/2pi) ln n_f| / ln T = {worst:.3}"),
            "<= 3".into(),
        ));
    }

    let all_pass = checks.iter().all(|c| c.pass);
    let summary = serde_json::json!({
        "weight": cfg.weight,
        "orders": cfg.orders,
        "t_grid": cfg.t_grid,
        "sigma_grid": cfg.sigma_grid,
        "table_len": cfg.table_len,
        "all_pass": all_pass,
        "checks": checks,
    });
    let path = cfg.out_dir.join(format!("verify_w{}.json", cfg.weight));
    write_atomic(&path, &(serde_json::to_string_pretty(&summary)? + "\n"))?;
    println!(
        "{}  ({} checks, report {})",
        if all_pass { "ALL PASS" } else { "FAILURES PRESENT" },
        checks.len(),
        path.display()
    );
    Ok(if all_pass {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    })
}
