//! Regularized upper incomplete gamma `Q(w, z) = Gamma(w, z)/Gamma(w)` with
//! derivative jets in `w`, and log-weighted incomplete integrals
//! `I_m(w, x) = int_1^inf (log y)^m y^{w-1} e^{-x y} dy`.
//!
//! `Q` is computed by the Kummer series for `gamma(w, z)` below and through
//! the transition `|z| ~ |w|`, and by the Lentz continued fraction beyond it.
//! Both run in jet arithmetic so that `d^j/dw^j Q` come out of the same pass.
//! Arguments are restricted to `Re w >= 0.25` and `|arg z| < pi/2`, which is
//! all the evaluator needs; the alignment `arg z ~ arg w` chosen by the
//! caller keeps the Kummer sum mild through the transition zone.

use crate::error::{Error, Result};
use crate::special::gamma::log_gamma_jet;
use crate::special::jet::DerivativeJet;
use crate::special::quad::{integrate_adaptive, QuadratureResult};
use crate::Complex64;

/// Jet of `1/(w + shift)` in w.
fn inv_shift_jet(w: Complex64, shift: f64, order: usize) -> DerivativeJet {
    let z = w + shift;
    let inv = Complex64::new(1.0, 0.0) / z;
    let mut values = Vec::with_capacity(order + 1);
    let mut cur = inv;
    values.push(cur);
    for j in 1..=order {
        cur = cur * inv * (-(j as f64));
        values.push(cur);
    }
    DerivativeJet::new(w, values)
}

/// Prefactor jet `exp(w Log z - z - log Gamma(w))` from a precomputed
/// `log Gamma(w)` jet.
fn prefactor_jet(w: Complex64, z: Complex64, order: usize, lg: &DerivativeJet) -> DerivativeJet {
    let lin = DerivativeJet::affine(w, z.ln(), -z, order);
    lin.sub(&lg.truncated(order)).exp()
}

fn kummer_p_jet(
    w: Complex64,
    z: Complex64,
    order: usize,
    lg: &DerivativeJet,
) -> Result<DerivativeJet> {
    let pref = prefactor_jet(w, z, order, lg);
    let mut term = inv_shift_jet(w, 0.0, order); // 1/w
    let mut sum = term.clone();
    let mut small_streak = 0;
    let cap = 6000;
    for j in 1..=cap {
        term = term.mul(&inv_shift_jet(w, j as f64, order)).scale(z);
        sum = sum.add(&term);
        if term.value(0).norm() < 1e-18 * sum.value(0).norm().max(1e-280) {
            small_streak += 1;
            if small_streak >= 3 {
                return Ok(pref.mul(&sum));
            }
        } else {
            small_streak = 0;
        }
    }
    Err(Error::Budget(format!(
        "Kummer series for gamma({w}, {z}) did not converge in {cap} terms"
    )))
}

fn lentz_cf_jet(
    w: Complex64,
    z: Complex64,
    order: usize,
    lg: &DerivativeJet,
) -> Result<DerivativeJet> {
    let one = DerivativeJet::constant(w, Complex64::new(1.0, 0.0), order);
    let tiny = Complex64::new(1e-280, 0.0);
    let guard = |j: &DerivativeJet| {
        if j.value(0).norm() < 1e-280 {
            let mut vals = j.values().to_vec();
            vals[0] = tiny;
            DerivativeJet::new(j.center(), vals)
        } else {
            j.clone()
        }
    };
    // b0 = z + 1 - w, a_n = n (w - n), b_n = z + 2n + 1 - w  (so that
    // Gamma(w,z) = e^{-z} z^w / (b0 + a1/(b1 + a2/(b2 + ...))), Legendre form
    // written with a_n = -n(n - w)).
    let b = |n: usize| {
        DerivativeJet::affine(
            w,
            Complex64::new(-1.0, 0.0),
            z + (2 * n + 1) as f64,
            order,
        )
    };
    let a = |n: usize| {
        let nf = n as f64;
        DerivativeJet::affine(w, Complex64::new(nf, 0.0), Complex64::new(-nf * nf, 0.0), order)
    };
    let mut f = guard(&b(0));
    let mut c = f.clone();
    let mut d = DerivativeJet::constant(w, Complex64::new(0.0, 0.0), order);
    let mut settled = 0;
    let cap = 3000;
    for n in 1..=cap {
        let an = a(n);
        let bn = b(n);
        d = guard(&bn.add(&an.mul(&d)));
        d = one.div(&d);
        c = guard(&bn.add(&an.div(&c)));
        let delta = c.mul(&d);
        f = f.mul(&delta);
        if (delta.value(0) - Complex64::new(1.0, 0.0)).norm() < 1e-16 {
            settled += 1;
            if settled >= 3 {
                let pref = prefactor_jet(w, z, order, lg);
                return Ok(pref.div(&f));
            }
        } else {
            settled = 0;
        }
    }
    Err(Error::Budget(format!(
        "continued fraction for Gamma({w}, {z}) did not converge in {cap} steps"
    )))
}

/// Jet in `w` of the regularized upper incomplete gamma `Q(w, z)`.
pub fn regularized_upper_jet(w: Complex64, z: Complex64, order: usize) -> Result<DerivativeJet> {
    let lg = log_gamma_jet(w, order)?;
    regularized_upper_jet_with_lg(w, z, order, &lg)
}

/// As [`regularized_upper_jet`] with `log Gamma(w)` supplied by the caller
/// (the evaluator hits many z for one w).
pub fn regularized_upper_jet_with_lg(
    w: Complex64,
    z: Complex64,
    order: usize,
    lg: &DerivativeJet,
) -> Result<DerivativeJet> {
    if w.re < 0.25 {
        return Err(Error::domain(
            "regularized_upper_jet",
            format!("Re w = {} below supported range", w.re),
        ));
    }
    if z.re <= 0.0 {
        return Err(Error::domain(
            "regularized_upper_jet",
            format!("need Re z > 0, got {z}"),
        ));
    }
    let aw = w.norm();
    let az = z.norm();
    if az > 1.1 * aw + 5.0 {
        match lentz_cf_jet(w, z, order, lg) {
            Ok(j) => Ok(j),
            Err(_) => {
                let p = kummer_p_jet(w, z, order, lg)?;
                Ok(DerivativeJet::constant(w, Complex64::new(1.0, 0.0), order).sub(&p))
            }
        }
    } else {
        let p = kummer_p_jet(w, z, order, lg)?;
        Ok(DerivativeJet::constant(w, Complex64::new(1.0, 0.0), order).sub(&p))
    }
}

/// Upper cutoff for `int_0^inf v^m exp(sigma v - x e^v) dv` so the dropped
/// tail is below `exp(peak - 46)`.
fn log_integrand_cutoff(x: f64, sigma: f64, m: usize) -> f64 {
    let peak = if sigma > x {
        let vstar = (sigma / x).ln();
        sigma * vstar - sigma
    } else {
        -x
    };
    let target = peak - 46.0 - 3.0 * (m as f64);
    let h = |v: f64| sigma * v - x * v.exp() + (m as f64) * (v.max(1e-12)).ln();
    let mut lo = if sigma > x { (sigma / x).ln().max(0.0) } else { 0.0 };
    let mut hi = lo + 1.0;
    while h(hi) > target && hi < 700.0 {
        hi += 1.0;
    }
    while hi - lo > 1e-3 {
        let mid = 0.5 * (lo + hi);
        if h(mid) > target {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    hi
}

/// `I_m(w, x) = int_1^inf (log y)^m y^{w-1} e^{-x y} dy` for `x > 0`, by
/// adaptive quadrature after `y = e^v`. Returns the integral and the
/// quadrature report.
pub fn log_weighted_incomplete(
    w: Complex64,
    x: f64,
    m: usize,
) -> Result<(Complex64, QuadratureResult)> {
    if x <= 0.0 {
        return Err(Error::domain(
            "log_weighted_incomplete",
            format!("integral diverges for x = {x}"),
        ));
    }
    let cutoff = log_integrand_cutoff(x, w.re, m);
    let integrand = |v: f64| -> Complex64 {
        let mag = w.re * v - x * v.exp();
        if mag < -745.0 {
            return Complex64::new(0.0, 0.0);
        }
        let phase = w.im * v;
        let vm = if m == 0 { 1.0 } else { v.powi(m as i32) };
        Complex64::from_polar(mag.exp() * vm, phase)
    };
    // Oscillation-aware budget: a few panels per period of e^{i t v}.
    let periods = (w.im.abs() * cutoff / (2.0 * std::f64::consts::PI)).ceil() as usize;
    let budget = 40_000 + 600 * periods;
    let peak = if w.re > x {
        (w.re * ((w.re / x).ln()) - w.re).exp()
    } else {
        (-x).exp()
    };
    let r = integrate_adaptive(
        integrand,
        0.0,
        cutoff,
        1e-15 * peak.max(1e-300),
        5e-14,
        budget,
    );
    Ok((r.value, r))
}
