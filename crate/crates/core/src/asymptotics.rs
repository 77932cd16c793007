//! Closed-form reference quantities and mean-square numerics: counting main
//! terms, coefficient power sums with Rankin tails, numerical mean squares
//! of `L^(m)` on vertical lines, and zero-density envelopes.

use std::f64::consts::PI;

use serde::Serialize;

use crate::coefficients::CoefficientTable;
use crate::error::{Error, Result};
use crate::lfunction::{log_power_tail_integral, LFunctionEvaluator};
use crate::special::quad::integrate_adaptive;
use crate::Complex64;

/// Counting main term, raw formula (valid for any T > 0):
/// `(T/pi) ln(T/(2 pi e)) - [m >= 1] (T/(2 pi)) ln n_f`.
pub fn main_term_raw(t: f64, m: usize, n_f: usize) -> f64 {
    let mut v = t / PI * (t / (2.0 * PI * std::f64::consts::E)).ln();
    if m >= 1 {
        v -= t / (2.0 * PI) * (n_f as f64).ln();
    }
    v
}

/// Counting main term with the domain guard `T > 2 pi e`.
pub fn main_term_count(t: f64, m: usize, n_f: usize) -> Result<f64> {
    if t <= 2.0 * PI * std::f64::consts::E {
        return Err(Error::domain(
            "main_term_count",
            format!("need T > 2 pi e = {:.4}, got {t}", 2.0 * PI * std::f64::consts::E),
        ));
    }
    Ok(main_term_raw(t, m, n_f))
}

/// `sum_n |lambda(n)|^2 (ln n)^{2m} n^{-2 sigma}` with a Rankin-based tail.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct PowerSum {
    pub sigma: f64,
    pub m: usize,
    pub value: f64,
    pub finite_part: f64,
    pub tail_estimate: f64,
    pub tail_error: f64,
}

/// Finite sum over the table plus a tail estimated by partial summation
/// against `C_hat x` (drift contributes the recorded tail error).
pub fn coefficient_power_sum(table: &CoefficientTable, sigma: f64, m: usize) -> Result<PowerSum> {
    if sigma <= 0.5 {
        return Err(Error::domain(
            "coefficient_power_sum",
            format!("series diverges for sigma = {sigma} <= 1/2"),
        ));
    }
    let len = table.len();
    let mut finite = 0.0f64;
    for n in 1..=len {
        let lam = table.lambda(n);
        if lam == 0.0 {
            continue;
        }
        let ln = (n as f64).ln();
        finite += lam * lam * ln.powi(2 * m as i32) * (n as f64).powf(-2.0 * sigma);
    }
    let c_hat = table.rankin_sum(len) / len as f64;
    let nf = len as f64;
    let g_n = nf.ln().powi(2 * m as i32) * nf.powf(-2.0 * sigma);
    // sum_{n>N} g(n) |lam|^2 ~ C int_N^inf g + g(N) (C N - R(N)), with the
    // Rankin drift |R(x) - C x| = O(x^{3/5}) driving the error term.
    let integral = log_power_tail_integral(nf, 2.0 * sigma, 2 * m);
    let r_n = table.rankin_sum(len);
    let tail = c_hat * integral + g_n * (c_hat * nf - r_n);
    let drift_scale = 2.0 * nf.powf(0.6);
    let tail_error = g_n * drift_scale + c_hat * integral * 1e-3;
    Ok(PowerSum {
        sigma,
        m,
        value: finite + tail,
        finite_part: finite,
        tail_estimate: tail,
        tail_error,
    })
}

/// Numerical mean square of `L^(m)` on a vertical segment against the
/// diagonal reference.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct MeanSquareReport {
    pub m: usize,
    pub sigma: f64,
    pub t: f64,
    pub numeric_integral: f64,
    pub reference_main: f64,
    pub difference: f64,
    /// The error order the difference is predicted to follow:
    /// O(1) for sigma > 1, `T^{2(1-sigma)} (ln T)^{2m}` for 1/2 < sigma < 1,
    /// `(ln T)^{2m+2}` at sigma = 1.
    pub predicted_error_order: f64,
    pub normalized_difference: f64,
    pub quadrature_error: f64,
    pub quadrature_evals: usize,
    pub converged: bool,
}

/// `int_1^T |L^(m)(sigma + it)|^2 dt` by adaptive quadrature, compared with
/// `(T - 1) * coefficient_power_sum(sigma, m)`.
pub fn mean_square_numeric(
    ev: &LFunctionEvaluator,
    sigma: f64,
    t_max: f64,
    m: usize,
) -> Result<MeanSquareReport> {
    if sigma <= 0.5 {
        return Err(Error::domain(
            "mean_square_numeric",
            "need sigma > 1/2".to_string(),
        ));
    }
    let reference = coefficient_power_sum(ev.table(), sigma, m)?.value * (t_max - 1.0).max(0.0);
    if t_max <= 1.0 {
        return Ok(MeanSquareReport {
            m,
            sigma,
            t: t_max,
            numeric_integral: 0.0,
            reference_main: 0.0,
            difference: 0.0,
            predicted_error_order: 1.0,
            normalized_difference: 0.0,
            quadrature_error: 0.0,
            quadrature_evals: 0,
            converged: true,
        });
    }
    let integrand = |t: f64| {
        let v = ev
            .eval(Complex64::new(sigma, t), m)
            .map(|r| r.value.norm_sqr())
            .unwrap_or(f64::NAN);
        Complex64::new(v, 0.0)
    };
    // Budget sized to the oscillation scale (zero spacing ~ pi / ln T).
    let budget = 60_000 + (t_max * (t_max.max(3.0)).ln() * 260.0) as usize;
    let r = integrate_adaptive(integrand, 1.0, t_max, 1e-9, 1e-6, budget);
    let numeric = r.value.re;
    let difference = numeric - reference;
    let lnt = t_max.ln();
    let predicted = if sigma > 1.0 {
        1.0
    } else if (sigma - 1.0).abs() < 1e-12 {
        lnt.powi(2 * m as i32 + 2)
    } else {
        t_max.powf(2.0 * (1.0 - sigma)) * lnt.powi(2 * m as i32)
    };
    Ok(MeanSquareReport {
        m,
        sigma,
        t: t_max,
        numeric_integral: numeric,
        reference_main: reference,
        difference,
        predicted_error_order: predicted,
        normalized_difference: difference / predicted,
        quadrature_error: r.error_estimate,
        quadrature_evals: r.evaluations,
        converged: r.converged,
    })
}

/// Zero-density envelope report.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct DensityReport {
    pub m: usize,
    pub sigma: f64,
    pub t: f64,
    pub empirical_count: i64,
    /// Leading `(2m+1)/(2pi) T/(sigma-1/2) ln(1/(sigma-1/2))` term alone.
    pub envelope_zd2: f64,
    /// Full explicit bound with recorded slack parameters.
    pub explicit_bound_zd1: f64,
    pub slack_log_t: f64,
    pub case_term: f64,
    pub pass: bool,
}

/// Explicit density bound: leading density term, the constant term with
/// `log((2m)! n_f C_f / (lambda(n_f)^2 (ln n_f)^{2m}))`, an `O(log T)` slack
/// (recorded, default `5 ln T`), and the three-case correction evaluated
/// with O-constant 1.
pub fn density_envelope(
    table: &CoefficientTable,
    sigma: f64,
    t: f64,
    m: usize,
    sigma_right: f64,
    empirical_count: i64,
) -> Result<DensityReport> {
    if sigma <= 0.5 {
        return Err(Error::domain("density_envelope", "need sigma > 1/2"));
    }
    let nf = table.n_f() as f64;
    let lnf = nf.ln();
    let lam = table.lambda(table.n_f());
    let c_hat = table.rankin_sum(table.len()) / table.len() as f64;
    let a = sigma - 0.5;
    let two_m_fact = (1..=2 * m).map(|i| i as f64).product::<f64>().max(1.0);
    let lead = (2.0 * m as f64 + 1.0) / (2.0 * PI) * t / a * (1.0 / a).ln();
    let constant = 1.0 / (2.0 * PI) * t / a
        * (two_m_fact * nf * c_hat / (lam * lam * lnf.powi(2 * m as i32))).ln();
    let slack_log_t = 5.0 * t.ln();
    let case_arg = if sigma < 1.0 {
        (2.0 * a).powi(2 * m as i32 + 1) * t.ln().powi(2 * m as i32) / t.powf(2.0 * sigma - 1.0)
    } else if (sigma - 1.0).abs() < 1e-12 {
        (2.0 * a).powi(2 * m as i32 + 1) * t.ln().powi(2 * m as i32 + 2) / t
    } else if sigma < sigma_right {
        (2.0 * a).powi(2 * m as i32 + 1) / t
    } else {
        0.0
    };
    let case_term = 1.0 / (2.0 * PI) * t / a * (1.0 + case_arg).ln();
    let bound = lead + constant + slack_log_t + case_term;
    Ok(DensityReport {
        m,
        sigma,
        t,
        empirical_count,
        envelope_zd2: lead,
        explicit_bound_zd1: bound,
        slack_log_t,
        case_term,
        pass: (empirical_count as f64) <= bound,
    })
}

/// Rankin constant fit: the estimate at the largest x and the drift exponent
/// of `|R(x) - C x|` against `x^{3/5}`.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct RankinFit {
    pub c_hat: f64,
    pub drift_exponent: Option<f64>,
    pub max_x: usize,
}

pub fn rankin_fit(table: &CoefficientTable) -> RankinFit {
    let sums: Vec<f64> = (0..=table.len()).map(|x| table.rankin_sum(x)).collect();
    rankin_fit_from_sums(&sums)
}

/// Fit on raw running sums `R(0..=N)` (index = x).
pub fn rankin_fit_from_sums(sums: &[f64]) -> RankinFit {
    let len = sums.len() - 1;
    let c_hat = sums[len] / len as f64;
    // Least-squares slope of ln|R(x) - C x| vs ln x over a geometric grid,
    // skipping points where the drift is numerically zero.
    let mut xs = Vec::new();
    let mut x = (len / 64).max(16);
    while x < len {
        xs.push(x);
        x = x * 3 / 2;
    }
    let mut pts = Vec::new();
    for &x in &xs {
        let drift = (sums[x] - c_hat * x as f64).abs();
        if drift > 1e-9 {
            pts.push(((x as f64).ln(), drift.ln()));
        }
    }
    let drift_exponent = if pts.len() >= 3 {
        let n = pts.len() as f64;
        let sx: f64 = pts.iter().map(|p| p.0).sum();
        let sy: f64 = pts.iter().map(|p| p.1).sum();
        let sxx: f64 = pts.iter().map(|p| p.0 * p.0).sum();
        let sxy: f64 = pts.iter().map(|p| p.0 * p.1).sum();
        Some((n * sxy - sx * sy) / (n * sxx - sx * sx))
    } else {
        None
    };
    RankinFit {
        c_hat,
        drift_exponent,
        max_x: len,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::coefficients::{CoefficientTable, EigenformSpec};
    use crate::support::{evaluator, TEST_LEN};

    #[test]
    fn main_term_values() {
        // zero at T = 2 pi e (m = 0)
        let t0 = 2.0 * PI * std::f64::consts::E;
        assert!(main_term_raw(t0, 0, 2).abs() < 1e-12);
        assert!(main_term_count(t0, 0, 2).is_err());
        // frozen high-precision value at T = 100, m = 1, n_f = 2
        let v = main_term_count(100.0, 1, 2).unwrap();
        assert!((v - 45.222907167018116306).abs() < 1e-10);
        // exact difference identity
        let d = main_term_raw(100.0, 0, 2) - main_term_raw(100.0, 1, 2);
        assert!((d - 100.0 / (2.0 * PI) * 2f64.ln()).abs() < 1e-12);
    }

    #[test]
    fn power_sum_limits() {
        let ev = evaluator(12, TEST_LEN);
        // sigma large: only n = 1 survives
        let p = coefficient_power_sum(ev.table(), 30.0, 0).unwrap();
        assert!((p.value - 1.0).abs() < 1e-12);
        // divergence guard
        assert!(coefficient_power_sum(ev.table(), 0.5, 1).is_err());
        // monotone decreasing in sigma, increasing in m inside (1/2, 1]
        let a = coefficient_power_sum(ev.table(), 0.7, 1).unwrap().value;
        let b = coefficient_power_sum(ev.table(), 0.8, 1).unwrap().value;
        assert!(a > b);
        let c0 = coefficient_power_sum(ev.table(), 0.8, 0).unwrap().value;
        let c2 = coefficient_power_sum(ev.table(), 0.8, 2).unwrap().value;
        assert!(c2 > c0 || c0 < 1.5); // log weights dominate away from n=1
    }

    #[test]
    fn power_sum_tail_estimate_is_honest() {
        // Estimate from a short prefix vs direct summation over a longer
        // table: the difference must sit inside the reported tail error.
        let long = evaluator(12, TEST_LEN);
        let spec = EigenformSpec::new(12).unwrap();
        let short = CoefficientTable::build(spec, 2000).unwrap();
        for &(sigma, m) in &[(0.75, 1usize), (0.9, 0), (0.65, 2)] {
            let est = coefficient_power_sum(&short, sigma, m).unwrap();
            let refv = coefficient_power_sum(long.table(), sigma, m).unwrap();
            assert!(
                (est.value - refv.value).abs() <= est.tail_error + refv.tail_error,
                "sigma={sigma} m={m}: {} vs {} (tail err {})",
                est.value,
                refv.value,
                est.tail_error
            );
        }
    }

    #[test]
    fn lad_limit_near_half() {
        // (2 sigma - 1)^{2m+1} S(sigma, m) n_f^{2 sigma} -> (2m)! n_f C_hat
        let ev = evaluator(12, TEST_LEN);
        let table = ev.table();
        let c_hat = table.rankin_sum(table.len()) / table.len() as f64;
        for m in 0..=2usize {
            let sigma = 0.51;
            let s = coefficient_power_sum(table, sigma, m).unwrap().value;
            let lhs = (2.0 * sigma - 1.0).powi(2 * m as i32 + 1) * s * 4f64.powf(sigma);
            let fact = (1..=2 * m).map(|i| i as f64).product::<f64>().max(1.0);
            let rhs = fact * 2.0 * c_hat;
            assert!(
                (lhs / rhs - 1.0).abs() < 0.10,
                "m={m}: ratio {}",
                lhs / rhs
            );
        }
    }

    #[test]
    fn mean_square_trivial_cases() {
        let ev = evaluator(12, TEST_LEN);
        let r = mean_square_numeric(&ev, 2.0, 1.0, 0).unwrap();
        assert_eq!(r.numeric_integral, 0.0);
        assert_eq!(r.reference_main, 0.0);
        assert!(mean_square_numeric(&ev, 0.4, 10.0, 0).is_err());
    }

    #[test]
    fn mean_square_diagonal_dominates_right_of_one() {
        let ev = evaluator(12, TEST_LEN);
        let r = mean_square_numeric(&ev, 2.0, 25.0, 0).unwrap();
        assert!(r.converged);
        // off-diagonal is O(1) uniformly
        assert!(r.difference.abs() < 2.0, "difference {}", r.difference);
    }

    #[test]
    fn density_envelope_shapes() {
        let ev = evaluator(12, TEST_LEN);
        let t = ev.table();
        let sr = ev.sigma_right(0);
        let a = density_envelope(t, 0.6, 60.0, 0, sr, 0).unwrap();
        assert!(a.pass);
        // monotone growth as sigma - 1/2 halves
        let b = density_envelope(t, 0.55, 60.0, 0, sr, 0).unwrap();
        assert!(b.envelope_zd2 >= 2.0 * a.envelope_zd2 * 0.9);
        assert!(density_envelope(t, 0.5, 60.0, 0, sr, 0).is_err());
    }

    #[test]
    fn rankin_fit_behaviour() {
        // synthetic |lambda(n)|^2 = 1: C = 1 and zero drift everywhere
        let sums: Vec<f64> = (0..=5000).map(|x| x as f64).collect();
        let fit = rankin_fit_from_sums(&sums);
        assert_eq!(fit.c_hat, 1.0);
        assert!(fit.drift_exponent.is_none());

        let table = CoefficientTable::build(EigenformSpec::new(12).unwrap(), TEST_LEN).unwrap();
        let fit = rankin_fit(&table);
        assert!(fit.c_hat > 0.0);
        if let Some(e) = fit.drift_exponent {
            assert!(e <= 0.6 + 0.25, "drift exponent {e}");
        }
        // stability between half- and full-length estimates
        let half = table.rankin_sum(TEST_LEN / 2) / (TEST_LEN / 2) as f64;
        assert!((half - fit.c_hat).abs() / fit.c_hat < 0.05);
    }
}
