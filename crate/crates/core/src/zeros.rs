//! Zero location and counting for `L_f^(m)`: winding-number counts on
//! rectangles, quadrisection isolation with Newton refinement, zero-free
//! certification, real-axis scans, and the two-sided Littlewood identity.
//!
//! All contour work runs on the normalized `F` (for m >= 1), which strips
//! the `n_f^{-s}` prefactor; its zero set equals that of `L^(m)`.

use std::f64::consts::PI;

use rayon::prelude::*;
use serde::Serialize;

use crate::asymptotics::main_term_raw;
use crate::error::{Error, Result};
use crate::lfunction::LFunctionEvaluator;
use crate::special::quad::integrate_adaptive;
use crate::Complex64;

/// Axis-aligned counting region.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Rectangle {
    pub sigma_min: f64,
    pub sigma_max: f64,
    pub t_min: f64,
    pub t_max: f64,
}

impl Rectangle {
    pub fn new(sigma_min: f64, sigma_max: f64, t_min: f64, t_max: f64) -> Result<Self> {
        if !(sigma_min < sigma_max && t_min < t_max) {
            return Err(Error::Contract(format!(
                "degenerate rectangle [{sigma_min}, {sigma_max}] x [{t_min}, {t_max}]"
            )));
        }
        Ok(Rectangle {
            sigma_min,
            sigma_max,
            t_min,
            t_max,
        })
    }

    pub fn width(&self) -> f64 {
        self.sigma_max - self.sigma_min
    }

    pub fn height(&self) -> f64 {
        self.t_max - self.t_min
    }

    fn corners(&self) -> [Complex64; 4] {
        [
            Complex64::new(self.sigma_min, self.t_min),
            Complex64::new(self.sigma_max, self.t_min),
            Complex64::new(self.sigma_max, self.t_max),
            Complex64::new(self.sigma_min, self.t_max),
        ]
    }

    fn contains(&self, z: Complex64, slack: f64) -> bool {
        z.re >= self.sigma_min - slack
            && z.re <= self.sigma_max + slack
            && z.im >= self.t_min - slack
            && z.im <= self.t_max + slack
    }
}

/// How a zero was pinned down.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum ZeroMethod {
    NewtonFromWinding,
    SubdivisionFallback,
    MultipleCluster,
}

/// A located zero (upper half-plane only; conjugates implied).
#[derive(Debug, Clone, Copy, Serialize)]
pub struct ZeroRecord {
    pub re: f64,
    pub im: f64,
    pub m: usize,
    pub residual: f64,
    pub isolation_radius: f64,
    pub method: ZeroMethod,
    pub multiplicity: i64,
}

impl ZeroRecord {
    pub fn location(&self) -> Complex64 {
        Complex64::new(self.re, self.im)
    }
}

/// Computed count versus the counting main term.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct CountReport {
    pub m: usize,
    pub t: f64,
    pub sigma: Option<f64>,
    pub computed_count: i64,
    pub main_term: f64,
    pub deviation: f64,
    pub deviation_over_log_t: f64,
    /// Actual top edge after boundary perturbation, when it moved.
    pub t_used: f64,
}

/// Zero-free certification evidence for one derivative order.
#[derive(Debug, Clone, Serialize)]
pub struct ZeroFreeReport {
    pub m: usize,
    /// Certified by the |F - 1| <= 1/2 majorant on a 0.05 grid.
    pub sigma_right: f64,
    /// Majorant value at the certificate.
    pub majorant_at_sigma: f64,
    /// Left abscissa adopted for counting strips.
    pub alpha_left: f64,
    /// Winding verified zero on this band left of alpha (empirical evidence).
    pub left_band: Rectangle,
    pub left_band_count: i64,
    /// min |F| on the vertical grid at sigma_right.
    pub grid_min_f: f64,
    pub grid_points: usize,
}

/// Two-sided Littlewood identity check on `[sigma, sigma_right] x [1, T]`.
#[derive(Debug, Clone, Serialize)]
pub struct LittlewoodReport {
    pub m: usize,
    pub sigma: f64,
    pub t: f64,
    pub zero_count: usize,
    pub lhs_sum_side: f64,
    pub rhs_integral_side: f64,
    pub edge_integrals: [f64; 4],
    pub discrepancy: f64,
}

const PHASE_STEP_LIMIT: f64 = PI / 2.0;
const MAX_BISECT_DEPTH: usize = 46;

/// Normalized-F evaluation used by every contour routine.
fn f_eval(ev: &LFunctionEvaluator, s: Complex64, m: usize) -> Result<Complex64> {
    Ok(ev.normalized_f(s, m)?.value)
}

struct EdgeAccumulator {
    phase: f64,
    min_abs: f64,
    max_abs: f64,
    evals: usize,
}

/// Phase change along the segment, adaptive bisection until each increment
/// is below `PHASE_STEP_LIMIT`. Errors on boundary-zero suspicion.
fn walk_segment(
    ev: &LFunctionEvaluator,
    m: usize,
    a: Complex64,
    b: Complex64,
    fa: Complex64,
    fb: Complex64,
    depth: usize,
    acc: &mut EdgeAccumulator,
) -> Result<()> {
    let dphi = (fb / fa).arg();
    let len = (b - a).norm();
    if dphi.abs() < PHASE_STEP_LIMIT && (len < 0.35 || depth > 0) {
        acc.phase += dphi;
        return Ok(());
    }
    if depth >= MAX_BISECT_DEPTH {
        return Err(Error::Contract(format!(
            "phase step not resolving near {} (suspected boundary zero)",
            0.5 * (a + b)
        )));
    }
    let mid = 0.5 * (a + b);
    let fm = f_eval(ev, mid, m)?;
    acc.evals += 1;
    acc.max_abs = acc.max_abs.max(fm.norm());
    acc.min_abs = acc.min_abs.min(fm.norm());
    // Local scale: |F| legitimately spans many orders of magnitude along a
    // long edge, so suspicion is judged against the segment endpoints only.
    if fm.norm() < 1e-9 * fa.norm().max(fb.norm()) {
        return Err(Error::Contract(format!(
            "|F| ~ {} at {} on contour (suspected boundary zero)",
            fm.norm(),
            mid
        )));
    }
    walk_segment(ev, m, a, mid, fa, fm, depth + 1, acc)?;
    walk_segment(ev, m, mid, b, fm, fb, depth + 1, acc)
}

fn winding_once(ev: &LFunctionEvaluator, rect: Rectangle, m: usize) -> Result<i64> {
    let corners = rect.corners();
    let mut acc = EdgeAccumulator {
        phase: 0.0,
        min_abs: f64::INFINITY,
        max_abs: 0.0,
        evals: 4,
    };
    let fs: Vec<Complex64> = corners
        .iter()
        .map(|&z| f_eval(ev, z, m))
        .collect::<Result<_>>()?;
    for f in &fs {
        acc.max_abs = acc.max_abs.max(f.norm());
        acc.min_abs = acc.min_abs.min(f.norm());
    }
    for i in 0..4 {
        let j = (i + 1) % 4;
        // Pre-split long edges so the first bisections cannot alias a full
        // turn.
        let steps = ((corners[j] - corners[i]).norm() / 0.35).ceil().max(1.0) as usize;
        let mut prev_pt = corners[i];
        let mut prev_f = fs[i];
        for k in 1..=steps {
            let pt = corners[i] + (corners[j] - corners[i]) * (k as f64 / steps as f64);
            let fpt = if k == steps {
                fs[j]
            } else {
                let v = f_eval(ev, pt, m)?;
                acc.evals += 1;
                acc.max_abs = acc.max_abs.max(v.norm());
                v
            };
            walk_segment(ev, m, prev_pt, pt, prev_f, fpt, 0, &mut acc)?;
            prev_pt = pt;
            prev_f = fpt;
        }
    }
    let winding = acc.phase / (2.0 * PI);
    let rounded = winding.round();
    if (winding - rounded).abs() > 0.01 {
        return Err(Error::Contract(format!(
            "winding {winding} not within 0.01 of an integer on {rect:?}"
        )));
    }
    Ok(rounded as i64)
}

/// Argument-principle count of zeros strictly inside the rectangle, with the
/// deterministic boundary perturbation ladder (t edges moved outward by
/// 1e-3, 2e-3, 3e-3 on suspicion).
pub fn winding_count(ev: &LFunctionEvaluator, rect: Rectangle, m: usize) -> Result<i64> {
    let mut last_err = None;
    for k in 0..4 {
        let delta = k as f64 * 1e-3;
        let r = Rectangle {
            sigma_min: rect.sigma_min,
            sigma_max: rect.sigma_max,
            t_min: (rect.t_min - delta).max(rect.t_min.min(1e-4)),
            t_max: rect.t_max + delta,
        };
        match winding_once(ev, r, m) {
            Ok(c) => return Ok(c),
            Err(e) => last_err = Some(e),
        }
    }
    Err(last_err.unwrap())
}

fn quadrisect(rect: Rectangle, nudge: f64) -> [Rectangle; 4] {
    let ms = 0.5 * (rect.sigma_min + rect.sigma_max) + nudge;
    let mt = 0.5 * (rect.t_min + rect.t_max) + nudge;
    [
        Rectangle {
            sigma_min: rect.sigma_min,
            sigma_max: ms,
            t_min: rect.t_min,
            t_max: mt,
        },
        Rectangle {
            sigma_min: ms,
            sigma_max: rect.sigma_max,
            t_min: rect.t_min,
            t_max: mt,
        },
        Rectangle {
            sigma_min: rect.sigma_min,
            sigma_max: ms,
            t_min: mt,
            t_max: rect.t_max,
        },
        Rectangle {
            sigma_min: ms,
            sigma_max: rect.sigma_max,
            t_min: mt,
            t_max: rect.t_max,
        },
    ]
}

fn newton_refine(
    ev: &LFunctionEvaluator,
    rect: Rectangle,
    m: usize,
) -> Result<Option<ZeroRecord>> {
    let mut z = Complex64::new(
        0.5 * (rect.sigma_min + rect.sigma_max),
        0.5 * (rect.t_min + rect.t_max),
    );
    #[allow(unused_assignments)]
    let mut last_step = f64::INFINITY;
    for _ in 0..50 {
        let (vals, _, _) = ev.eval_jet(z, m + 1)?;
        let f = vals[m];
        let df = vals[m + 1];
        if df.norm() == 0.0 {
            return Ok(None);
        }
        let step = f / df;
        z -= step;
        last_step = step.norm();
        if !rect.contains(z, 0.8 * (rect.width() + rect.height())) || !z.re.is_finite() {
            return Ok(None);
        }
        if last_step < 1e-12 * (1.0 + z.norm()) {
            let (vals, _, _) = ev.eval_jet(z, m + 1)?;
            let residual = vals[m].norm();
            let scale = vals[m + 1].norm().max(1e-8);
            if residual > 1e-9 * scale.max(1.0) {
                return Ok(None);
            }
            if !rect.contains(z, 1e-9) {
                return Ok(None);
            }
            return Ok(Some(ZeroRecord {
                re: z.re,
                im: z.im,
                m,
                residual,
                isolation_radius: 0.0, // set after verification
                method: ZeroMethod::NewtonFromWinding,
                multiplicity: 1,
            }));
        }
    }
    Ok(None)
}

/// Verify a candidate by winding on a small square around it.
fn verify_isolated(
    ev: &LFunctionEvaluator,
    rec: &mut ZeroRecord,
    want: i64,
) -> Result<bool> {
    let h = 0.004f64.max(4.0 * rec.residual);
    let rect = Rectangle {
        sigma_min: rec.re - h,
        sigma_max: rec.re + h,
        t_min: rec.im - h,
        t_max: rec.im + h,
    };
    let count = winding_count(ev, rect, rec.m)?;
    if count == want {
        rec.isolation_radius = h;
        Ok(true)
    } else {
        Ok(false)
    }
}

fn isolate_rec(
    ev: &LFunctionEvaluator,
    rect: Rectangle,
    m: usize,
    count: i64,
    out: &mut Vec<ZeroRecord>,
) -> Result<()> {
    if count == 0 {
        return Ok(());
    }
    let tiny = rect.width() <= 0.02 && rect.height() <= 0.02;
    if count == 1 {
        if let Some(mut rec) = newton_refine(ev, rect, m)? {
            if verify_isolated(ev, &mut rec, 1)? {
                out.push(rec);
                return Ok(());
            }
        }
        if tiny {
            // Honest fallback: the phase-certified cell itself.
            let z = Complex64::new(
                0.5 * (rect.sigma_min + rect.sigma_max),
                0.5 * (rect.t_min + rect.t_max),
            );
            let resid = ev.normalized_f(z, m)?.value.norm();
            out.push(ZeroRecord {
                re: z.re,
                im: z.im,
                m,
                residual: resid,
                isolation_radius: 0.5 * (rect.width() + rect.height()),
                method: ZeroMethod::SubdivisionFallback,
                multiplicity: 1,
            });
            return Ok(());
        }
    } else if tiny {
        let z = Complex64::new(
            0.5 * (rect.sigma_min + rect.sigma_max),
            0.5 * (rect.t_min + rect.t_max),
        );
        let resid = ev.normalized_f(z, m)?.value.norm();
        out.push(ZeroRecord {
            re: z.re,
            im: z.im,
            m,
            residual: resid,
            isolation_radius: 0.5 * (rect.width() + rect.height()),
            method: ZeroMethod::MultipleCluster,
            multiplicity: count,
        });
        return Ok(());
    }
    // Quadrisect, nudging split lines off zeros when a child contour fails.
    let mut nudge = 0.0;
    for attempt in 0..4 {
        let children = quadrisect(rect, nudge);
        let counts: Result<Vec<i64>> = children
            .iter()
            .map(|&r| winding_count(ev, r, m))
            .collect();
        match counts {
            Ok(cs) => {
                let total: i64 = cs.iter().sum();
                if total != count {
                    return Err(Error::Contract(format!(
                        "subdivision count mismatch: {total} vs {count} on {rect:?}"
                    )));
                }
                for (r, c) in children.into_iter().zip(cs) {
                    isolate_rec(ev, r, m, c, out)?;
                }
                return Ok(());
            }
            Err(_) if attempt < 3 => {
                nudge += 1.7e-3;
            }
            Err(e) => return Err(e),
        }
    }
    unreachable!()
}

/// Locate all zeros inside the rectangle: winding counts drive recursive
/// quadrisection, Newton polishes each simple cell. Records sorted by
/// (Im, Re).
pub fn isolate_zeros(
    ev: &LFunctionEvaluator,
    rect: Rectangle,
    m: usize,
) -> Result<Vec<ZeroRecord>> {
    let count = winding_count(ev, rect, m)?;
    let mut out = Vec::new();
    isolate_rec(ev, rect, m, count, &mut out)?;
    let total: i64 = out.iter().map(|r| r.multiplicity).sum();
    if total != count {
        return Err(Error::Contract(format!(
            "isolation lost zeros: {total} records vs winding {count}"
        )));
    }
    out.sort_by(|a, b| (a.im, a.re).partial_cmp(&(b.im, b.re)).unwrap());
    Ok(out)
}

/// Strip bounds used by the counting campaigns for one derivative order.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct StripBounds {
    pub alpha_left: f64,
    pub sigma_right: f64,
    /// Bottom edge above the real axis excluding only real zeros.
    pub t_floor: f64,
}

/// Default strip for order m: right edge at the certified abscissa, left
/// edge comfortably beyond the gamma-factor zeros, floor just off the axis.
pub fn default_strip(ev: &LFunctionEvaluator, m: usize) -> StripBounds {
    let c = ev.table().spec().shift();
    StripBounds {
        alpha_left: (1.0 - ev.sigma_right(m)).min(-c - 3.0 - m as f64),
        sigma_right: ev.sigma_right(m),
        t_floor: 0.05,
    }
}

/// `N_{f,m}(T)`: zeros with `0 < Im s <= T`, counted by winding on the
/// standard strip.
pub fn count_to_height(ev: &LFunctionEvaluator, t: f64, m: usize) -> Result<CountReport> {
    let strip = default_strip(ev, m);
    count_to_height_in(ev, t, m, strip)
}

pub fn count_to_height_in(
    ev: &LFunctionEvaluator,
    t: f64,
    m: usize,
    strip: StripBounds,
) -> Result<CountReport> {
    if t <= strip.t_floor {
        return Err(Error::domain("count_to_height", format!("T = {t} too small")));
    }
    let rect = Rectangle::new(strip.alpha_left, strip.sigma_right, strip.t_floor, t)?;
    let count = winding_count(ev, rect, m)?;
    let n_f = ev.table().n_f();
    let main = main_term_raw(t, m, n_f);
    let dev = count as f64 - main;
    Ok(CountReport {
        m,
        t,
        sigma: None,
        computed_count: count,
        main_term: main,
        deviation: dev,
        deviation_over_log_t: dev / t.ln(),
        t_used: t,
    })
}

/// `N_{f,m}(sigma, T)` from an isolated zero list.
pub fn count_right_of(
    ev: &LFunctionEvaluator,
    zeros: &[ZeroRecord],
    sigma: f64,
    t: f64,
    m: usize,
) -> Result<CountReport> {
    if sigma <= 0.5 {
        return Err(Error::domain("count_right_of", "need sigma > 1/2"));
    }
    let count: i64 = zeros
        .iter()
        .filter(|z| z.m == m && z.re >= sigma && z.im > 0.0 && z.im <= t)
        .map(|z| z.multiplicity)
        .sum();
    let main = main_term_raw(t, m, ev.table().n_f());
    Ok(CountReport {
        m,
        t,
        sigma: Some(sigma),
        computed_count: count,
        main_term: main,
        deviation: count as f64 - main,
        deviation_over_log_t: (count as f64 - main) / t.ln(),
        t_used: t,
    })
}

/// Isolate all zeros of `L^(m)` in the standard strip up to height T,
/// banding the strip and working bands in parallel.
pub fn isolate_in_strip(
    ev: &LFunctionEvaluator,
    t_max: f64,
    m: usize,
) -> Result<Vec<ZeroRecord>> {
    let strip = default_strip(ev, m);
    let mut cuts = vec![strip.t_floor];
    let band = 4.0;
    let mut t = strip.t_floor + band;
    while t < t_max {
        cuts.push(t);
        t += band;
    }
    cuts.push(t_max);
    let bands: Vec<(f64, f64)> = cuts.windows(2).map(|w| (w[0], w[1])).collect();
    let results: Result<Vec<Vec<ZeroRecord>>> = bands
        .par_iter()
        .map(|&(lo, hi)| {
            let rect = Rectangle::new(strip.alpha_left, strip.sigma_right, lo, hi)?;
            isolate_zeros(ev, rect, m)
        })
        .collect();
    let mut all: Vec<ZeroRecord> = results?.into_iter().flatten().collect();
    all.sort_by(|a, b| (a.im, a.re).partial_cmp(&(b.im, b.re)).unwrap());
    Ok(all)
}

/// Certify the zero-free regions for order m: the majorant certificate on
/// the right, winding evidence on a band left of the adopted alpha.
pub fn zero_free_certify(ev: &LFunctionEvaluator, m: usize, t_max: f64) -> Result<ZeroFreeReport> {
    let strip = default_strip(ev, m);
    let sigma_right = strip.sigma_right;
    let majorant = ev.fmz_majorant(sigma_right, m);
    let left_band = Rectangle::new(
        strip.alpha_left - 6.0,
        strip.alpha_left,
        strip.t_floor,
        t_max,
    )?;
    let left_count = winding_count(ev, left_band, m)?;
    // Grid evidence along the certificate line.
    let mut grid_min = f64::INFINITY;
    let mut pts = 0;
    let mut t = 0.0;
    while t <= t_max {
        let f = ev.normalized_f(Complex64::new(sigma_right, t), m)?.value;
        grid_min = grid_min.min(f.norm());
        pts += 1;
        t += 0.7;
    }
    Ok(ZeroFreeReport {
        m,
        sigma_right,
        majorant_at_sigma: majorant,
        alpha_left: strip.alpha_left,
        left_band,
        left_band_count: left_count,
        grid_min_f: grid_min,
        grid_points: pts,
    })
}

/// Real zeros of the (real-valued) restriction of `L^(m)` to `[a, b]`,
/// b < 0: sign changes on a step-0.01 grid refined by bisection to 1e-10.
pub fn real_zero_scan(ev: &LFunctionEvaluator, a: f64, b: f64, m: usize) -> Result<Vec<f64>> {
    if b >= 0.0 || a >= b {
        return Err(Error::domain(
            "real_zero_scan",
            format!("need a < b < 0, got [{a}, {b}]"),
        ));
    }
    let h = |x: f64| -> Result<f64> {
        let v = ev.eval(Complex64::new(x, 0.0), m)?.value;
        if v.im.abs() > 1e-6 * v.norm().max(1e-300) {
            return Err(Error::Contract(format!(
                "imaginary part {} on the real axis at {x}",
                v.im
            )));
        }
        Ok(v.re)
    };
    let step = 0.01;
    let n_steps = ((b - a) / step).ceil() as usize;
    let mut zeros = Vec::new();
    let mut x_prev = a;
    let mut v_prev = h(a)?;
    for i in 1..=n_steps {
        let mut x = (a + i as f64 * step).min(b);
        let mut v = h(x)?;
        // Grid value essentially zero: nudge locally.
        if v.abs() < 1e-12 {
            x += step * 0.37;
            v = h(x)?;
        }
        if v_prev == 0.0 {
            v_prev = v;
            x_prev = x;
            continue;
        }
        if v_prev.signum() != v.signum() {
            let (mut lo, mut hi) = (x_prev, x);
            let (mut vlo, _) = (v_prev, v);
            while hi - lo > 1e-10 {
                let mid = 0.5 * (lo + hi);
                let vm = h(mid)?;
                if vm == 0.0 {
                    lo = mid;
                    break;
                }
                if vm.signum() == vlo.signum() {
                    lo = mid;
                    vlo = vm;
                } else {
                    hi = mid;
                }
            }
            zeros.push(0.5 * (lo + hi));
        }
        x_prev = x;
        v_prev = v;
    }
    Ok(zeros)
}

/// Continuous-argument profile of F along a horizontal segment, anchored at
/// the principal argument of the right endpoint. Returns samples
/// `(u, theta(u))` from sigma_hi down to sigma_lo.
fn arg_profile(
    ev: &LFunctionEvaluator,
    m: usize,
    t: f64,
    sigma_hi: f64,
    sigma_lo: f64,
) -> Result<Vec<(f64, f64)>> {
    let mut samples = vec![(sigma_hi, {
        let f = f_eval(ev, Complex64::new(sigma_hi, t), m)?;
        f.arg()
    })];
    let mut stack = vec![(
        sigma_hi,
        sigma_lo,
        f_eval(ev, Complex64::new(sigma_hi, t), m)?,
        f_eval(ev, Complex64::new(sigma_lo, t), m)?,
        0usize,
    )];
    let mut raw = Vec::new();
    while let Some((u1, u2, f1, f2, depth)) = stack.pop() {
        let dphi = (f2 / f1).arg();
        if (dphi.abs() < 0.35 && (u1 - u2).abs() < 0.25) || depth >= MAX_BISECT_DEPTH {
            if depth >= MAX_BISECT_DEPTH {
                return Err(Error::Contract(format!(
                    "argument not resolving at t = {t} near sigma = {}",
                    0.5 * (u1 + u2)
                )));
            }
            raw.push((u1, u2, dphi));
            continue;
        }
        let mid = 0.5 * (u1 + u2);
        let fm = f_eval(ev, Complex64::new(mid, t), m)?;
        if fm.norm() < 1e-11 {
            return Err(Error::Contract(format!(
                "contour zero near {mid}+{t}i"
            )));
        }
        // LIFO: push the far half first so the near half is processed first.
        stack.push((mid, u2, fm, f2, depth + 1));
        stack.push((u1, mid, f1, fm, depth + 1));
    }
    // raw is ordered from sigma_hi toward sigma_lo by construction.
    let mut theta = samples[0].1;
    for (u1, u2, dphi) in raw {
        debug_assert!((samples.last().unwrap().0 - u1).abs() < 1e-12);
        theta += dphi;
        samples.push((u2, theta));
        let _ = u1;
    }
    Ok(samples)
}

/// `int_{sigma_lo}^{sigma_hi} theta(u) du` for the tracked argument along a
/// horizontal edge, anchored at the principal branch on the right end.
///
/// The tracked argument is `principal(u) + 2 pi k(u)` with `k` a step
/// function; the profile walk brackets each branch wrap (per-step phase
/// change < 0.35 allows at most one), bisection pins the wrap abscissa, and
/// the smooth principal part integrates by adaptive quadrature piecewise.
fn arg_integral(
    ev: &LFunctionEvaluator,
    m: usize,
    t: f64,
    sigma_hi: f64,
    sigma_lo: f64,
) -> Result<f64> {
    let samples = arg_profile(ev, m, t, sigma_hi, sigma_lo)?;
    let wrap_k = |theta: f64| -> i64 {
        // theta = principal + 2 pi k with principal in (-pi, pi]
        ((theta + PI) / (2.0 * PI)).floor() as i64
    };
    // Breakpoints where k changes, refined by bisection on the sign of the
    // principal argument (the wrap is a crossing of the negative real axis).
    let mut pieces: Vec<(f64, f64, i64)> = Vec::new(); // (u_right, u_left, k)
    let mut right = samples[0].0;
    let mut k_cur = wrap_k(samples[0].1);
    for w in samples.windows(2) {
        let (u1, th1) = w[0];
        let (u2, th2) = w[1];
        let k2 = wrap_k(th2);
        if k2 != k_cur {
            // locate the crossing in (u2, u1)
            let mut hi = u1;
            let mut lo = u2;
            let sign_hi = f_eval(ev, Complex64::new(u1, t), m)?.im >= 0.0;
            let _ = th1;
            for _ in 0..48 {
                let mid = 0.5 * (hi + lo);
                let f = f_eval(ev, Complex64::new(mid, t), m)?;
                if (f.im >= 0.0) == sign_hi {
                    hi = mid;
                } else {
                    lo = mid;
                }
                if (hi - lo).abs() < 1e-11 {
                    break;
                }
            }
            let cross = 0.5 * (hi + lo);
            pieces.push((right, cross, k_cur));
            right = cross;
            k_cur = k2;
        }
    }
    pieces.push((right, sigma_lo, k_cur));

    let mut total = 0.0;
    for (r, l, k) in pieces {
        if r - l < 1e-12 {
            continue;
        }
        let q = integrate_adaptive(
            |u| {
                let f = ev
                    .normalized_f(Complex64::new(u, t), m)
                    .map(|v| v.value)
                    .unwrap_or(Complex64::new(f64::NAN, 0.0));
                Complex64::new(f.arg(), 0.0)
            },
            l,
            r,
            1e-9,
            1e-10,
            200_000,
        );
        if !q.converged {
            return Err(Error::Budget(format!(
                "argument integral on t = {t} not converged (err {})",
                q.error_estimate
            )));
        }
        total += q.value.re + 2.0 * PI * k as f64 * (r - l);
    }
    Ok(total)
}


/// Two-sided Littlewood identity on `[sigma, sigma_right(m)] x [1, T]`:
/// `2 pi sum (Re rho - sigma) = int_1^T ln|F(sigma+it)| dt
///   - int_1^T ln|F(b+it)| dt + int_sigma^b arg F(u+iT) du
///   - int_sigma^b arg F(u+i) du`.
pub fn littlewood_check(
    ev: &LFunctionEvaluator,
    sigma: f64,
    t_max: f64,
    m: usize,
) -> Result<LittlewoodReport> {
    littlewood_check_range(ev, sigma, 1.0, t_max, m)
}

/// As [`littlewood_check`] on the sub-rectangle `[t_min, t_max]` in height
/// (both sides are additive in the height range).
pub fn littlewood_check_range(
    ev: &LFunctionEvaluator,
    sigma: f64,
    t_min: f64,
    t_max: f64,
    m: usize,
) -> Result<LittlewoodReport> {
    if sigma <= 0.5 {
        return Err(Error::domain("littlewood_check", "need sigma > 1/2"));
    }
    let b = ev.sigma_right(m);
    if sigma >= b {
        return Err(Error::domain(
            "littlewood_check",
            format!("sigma = {sigma} at or beyond the zero-free abscissa {b}"),
        ));
    }
    let rect = Rectangle::new(sigma, b, t_min, t_max)?;
    let zeros = isolate_zeros(ev, rect, m)?;
    let lhs: f64 = 2.0
        * PI
        * zeros
            .iter()
            .map(|z| (z.re - sigma) * z.multiplicity as f64)
            .sum::<f64>();

    // Vertical edges: adaptive quadrature of ln|F|, pre-split at ordinates
    // of zeros close to the line.
    let log_abs_edge = |abscissa: f64, close: &[f64]| -> Result<f64> {
        let mut cuts = vec![t_min, t_max];
        for &tz in close {
            if tz > t_min + 1e-9 && tz < t_max - 1e-9 {
                cuts.push(tz);
            }
        }
        cuts.sort_by(|a, b| a.partial_cmp(b).unwrap());
        cuts.dedup_by(|a, b| (*a - *b).abs() < 1e-9);
        let mut total = 0.0;
        for w in cuts.windows(2) {
            let r = integrate_adaptive(
                |t| {
                    let f = ev
                        .normalized_f(Complex64::new(abscissa, t), m)
                        .map(|v| v.value.norm())
                        .unwrap_or(f64::NAN);
                    Complex64::new(f.ln(), 0.0)
                },
                w[0],
                w[1],
                1e-8,
                1e-9,
                300_000,
            );
            if !r.converged {
                return Err(Error::Budget(format!(
                    "log|F| integral on Re = {abscissa} not converged (err {})",
                    r.error_estimate
                )));
            }
            total += r.value.re;
        }
        Ok(total)
    };
    let near_left: Vec<f64> = zeros
        .iter()
        .filter(|z| (z.re - sigma).abs() < 0.25)
        .map(|z| z.im)
        .collect();
    let i1 = log_abs_edge(sigma, &near_left)?;
    let i2 = -log_abs_edge(b, &[])?;

    // Horizontal edges: integrals of the tracked argument.
    let i3 = arg_integral(ev, m, t_max, b, sigma)?;
    let i4 = -arg_integral(ev, m, t_min, b, sigma)?;

    let rhs = i1 + i2 + i3 + i4;
    Ok(LittlewoodReport {
        m,
        sigma,
        t: t_max,
        zero_count: zeros.len(),
        lhs_sum_side: lhs,
        rhs_integral_side: rhs,
        edge_integrals: [i1, i2, i3, i4],
        discrepancy: (lhs - rhs).abs(),
    })
}
