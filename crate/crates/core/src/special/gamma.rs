//! Complex log-gamma and polygamma jets via the Stirling series with upward
//! recurrence.
//!
//! `log_gamma` returns the canonical branch: real on the positive axis,
//! holomorphic on the plane cut along the negative reals. Values with
//! `Re s` below the shift threshold are pushed up with
//! `log Gamma(s) = log Gamma(s+n) - sum log(s+j)`, which preserves that
//! branch on the cut plane.

use crate::error::{Error, Result};
use crate::special::jet::DerivativeJet;
use crate::Complex64;

/// Push the argument at least this far right before the asymptotic series.
const SHIFT_THRESHOLD: f64 = 12.0;

/// B_{2n} for n = 1..=10.
const BERNOULLI: [f64; 10] = [
    1.0 / 6.0,
    -1.0 / 30.0,
    1.0 / 42.0,
    -1.0 / 30.0,
    5.0 / 66.0,
    -691.0 / 2730.0,
    7.0 / 6.0,
    -3617.0 / 510.0,
    43867.0 / 798.0,
    -174611.0 / 330.0,
];

const LN_SQRT_2PI: f64 = 0.918938533204672741780329736406;

fn near_pole(s: Complex64) -> bool {
    if s.im.abs() > 1e-9 {
        return false;
    }
    if s.re > 0.5 {
        return false;
    }
    (s.re - s.re.round()).abs() < 1e-9 && s.re.round() <= 0.0
}

/// Principal-branch complex log-gamma, relative error ~1e-13 for |s| <= 1e3.
pub fn log_gamma(s: Complex64) -> Result<Complex64> {
    if near_pole(s) {
        return Err(Error::domain("log_gamma", format!("pole at {s}")));
    }
    let mut z = s;
    let mut shift = Complex64::new(0.0, 0.0);
    while z.re < SHIFT_THRESHOLD {
        shift -= z.ln();
        z += 1.0;
    }
    let ln_z = z.ln();
    let mut acc = (z - 0.5) * ln_z - z + LN_SQRT_2PI;
    let z2 = z * z;
    let mut zp = z;
    for (i, b) in BERNOULLI.iter().enumerate() {
        let n = (i + 1) as f64;
        acc += b / (2.0 * n * (2.0 * n - 1.0)) / zp;
        zp *= z2;
    }
    Ok(acc + shift)
}

/// Gamma itself, through `log_gamma`.
pub fn gamma(s: Complex64) -> Result<Complex64> {
    Ok(log_gamma(s)?.exp())
}

/// Jet (value and derivatives to `order`) of the principal `log` of an affine
/// image `s + a` viewed as a function of `s`: entries
/// `Log(z), 1/z, -1/z^2 * 1!, ...` at `z = s + a`.
fn log_affine_jet(center: Complex64, z: Complex64, order: usize) -> DerivativeJet {
    let mut values = Vec::with_capacity(order + 1);
    values.push(z.ln());
    if order >= 1 {
        let inv = Complex64::new(1.0, 0.0) / z;
        let mut cur = inv; // d^j/dz^j log z = (-1)^{j-1} (j-1)! z^{-j}
        values.push(cur);
        for j in 2..=order {
            cur = cur * inv * (-((j - 1) as f64));
            values.push(cur);
        }
    }
    DerivativeJet::new(center, values)
}

/// Jet of `z^{-p}` (p >= 1) as a function of s at `z = s + a`.
fn inv_power_jet(center: Complex64, z: Complex64, p: usize, order: usize) -> DerivativeJet {
    let inv = Complex64::new(1.0, 0.0) / z;
    let mut values = Vec::with_capacity(order + 1);
    let mut cur = inv.powi(p as i32);
    values.push(cur);
    for j in 1..=order {
        // d/dz z^{-q} = -q z^{-q-1}
        let q = (p + j - 1) as f64;
        cur = cur * inv * (-q);
        values.push(cur);
    }
    DerivativeJet::new(center, values)
}

/// Jet of `log Gamma` at `s`: `[log Gamma(s), psi(s), psi'(s), ...]` up to
/// `order` derivatives. Relative error ~1e-11 in the working range.
pub fn log_gamma_jet(s: Complex64, order: usize) -> Result<DerivativeJet> {
    if near_pole(s) {
        return Err(Error::domain("log_gamma_jet", format!("pole at {s}")));
    }
    let delta_guard = 0.1;
    if s.re < 0.0 {
        let angle = s.im.atan2(s.re).abs();
        if std::f64::consts::PI - angle < delta_guard && s.re < -0.5 {
            return Err(Error::domain(
                "log_gamma_jet",
                format!("argument {s} too close to the negative real axis"),
            ));
        }
    }

    let mut z = s;
    let mut steps = 0usize;
    while z.re < SHIFT_THRESHOLD {
        z += 1.0;
        steps += 1;
    }

    // Stirling jet at the shifted point, as a function of s (unit derivative).
    let ln_jet = log_affine_jet(s, z, order + 1);
    let z_jet = DerivativeJet::affine(s, Complex64::new(1.0, 0.0), z - s, order + 1);
    let mut acc = z_jet
        .sub(&DerivativeJet::constant(s, Complex64::new(0.5, 0.0), order + 1))
        .mul(&ln_jet)
        .sub(&z_jet)
        .add(&DerivativeJet::constant(
            s,
            Complex64::new(LN_SQRT_2PI, 0.0),
            order + 1,
        ));
    for (i, b) in BERNOULLI.iter().enumerate() {
        let n = (i + 1) as f64;
        let coeff = b / (2.0 * n * (2.0 * n - 1.0));
        acc = acc.add(&inv_power_jet(s, z, (2 * i + 1) as usize, order + 1).scale(coeff.into()));
    }

    // Undo the shift: log Gamma(s) = acc - sum_{j=0}^{steps-1} Log(s + j).
    for j in 0..steps {
        let zj = s + j as f64;
        acc = acc.sub(&log_affine_jet(s, zj, order + 1));
    }
    Ok(acc.truncated(order))
}

/// `log Gamma(s)` and its derivatives through order r as a jet (entry 1 is
/// `psi(s)`, entry 2 `psi'(s)`, ...). Requires r >= 1.
pub fn polygamma_jet(s: Complex64, r: usize) -> Result<DerivativeJet> {
    if r < 1 {
        return Err(Error::Contract("polygamma_jet needs r >= 1".into()));
    }
    log_gamma_jet(s, r)
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn classic_values() {
        let half = log_gamma(c(0.5, 0.0)).unwrap();
        assert!((half.re - (PI.sqrt()).ln()).abs() < 1e-14);
        assert!(half.im.abs() < 1e-14);
        let five = log_gamma(c(5.0, 0.0)).unwrap();
        assert!((five.re - 24f64.ln()).abs() < 1e-13);
    }

    #[test]
    fn frozen_high_precision_point() {
        // log Gamma(3 + 37i), reference computed at 30 digits.
        let v = log_gamma(c(3.0, 37.0)).unwrap();
        assert!((v.re - (-48.1714068895893191232241141807)).abs() < 1e-11);
        assert!((v.im - 100.447679328157255651602784085).abs() < 1e-11);
    }

    #[test]
    fn matches_mellin_quadrature_oracle() {
        // Gamma(3 + 37i) as int_0^inf t^{s-1} e^{-t} dt on the rotated ray
        // t = u e^{i theta}; theta > 0 damps the t^{i Im s} oscillation.
        let s = c(3.0, 37.0);
        // Near the saddle direction arg(s - 1) ~ 1.517: the integrand peak
        // then sits at the same scale as |Gamma(s)| ~ 1.4e-21 and the
        // quadrature resolves it relatively.
        let theta = 1.45f64;
        let rot = c(theta.cos(), theta.sin());
        let integrand = |u: f64| -> Complex64 {
            if u <= 0.0 {
                return c(0.0, 0.0);
            }
            let t = u * rot;
            ((s - 1.0) * t.ln() - t).exp() * rot
        };
        let r =
            crate::special::quad::integrate_adaptive(integrand, 0.0, 320.0, 1e-36, 1e-12, 600_000);
        assert!(r.converged);
        let direct = log_gamma(s).unwrap().exp();
        assert!(
            (direct - r.value).norm() / r.value.norm() < 1e-10,
            "stirling {direct} vs mellin {}",
            r.value
        );
    }

    #[test]
    fn recurrence_property() {
        // Gamma(s+1) = s Gamma(s) on a deterministic pseudo-random grid.
        let mut state = 0x9e3779b97f4a7c15u64;
        let mut next = move || {
            state ^= state << 13;
            state ^= state >> 7;
            state ^= state << 17;
            (state >> 11) as f64 / (1u64 << 53) as f64
        };
        for _ in 0..200 {
            let s = c(next() * 20.0 - 5.0, next() * 80.0 - 40.0);
            if near_pole(s) || (s.re < 0.4 && s.im.abs() < 0.2) {
                continue;
            }
            let lhs = log_gamma(s + 1.0).unwrap();
            let rhs = log_gamma(s).unwrap() + s.ln();
            // equal up to a multiple of 2 pi i
            let diff = lhs - rhs;
            let wrapped = (diff.im / (2.0 * PI)).round() * 2.0 * PI;
            assert!(
                (diff.re).abs() < 1e-12 * (1.0 + lhs.re.abs())
                    && (diff.im - wrapped).abs() < 1e-12 * (1.0 + lhs.im.abs()),
                "s = {s}"
            );
        }
    }

    #[test]
    fn reflection_identity() {
        // Gamma(s) Gamma(1-s) = pi / sin(pi s), avoiding poles.
        for &(re, im) in &[
            (0.3, 0.7),
            (0.5, 5.0),
            (-1.3, 2.0),
            (2.7, -3.0),
            (0.1, 22.0),
            (-3.6, 1.0),
        ] {
            let s = c(re, im);
            let lhs = (log_gamma(s).unwrap() + log_gamma(c(1.0, 0.0) - s).unwrap()).exp();
            let rhs = Complex64::new(PI, 0.0) / (Complex64::new(PI, 0.0) * s).sin();
            assert!(
                (lhs - rhs).norm() / rhs.norm() < 1e-11,
                "s = {s}: {lhs} vs {rhs}"
            );
        }
    }

    #[test]
    fn polygamma_classic_values() {
        let jet = polygamma_jet(c(1.0, 0.0), 2).unwrap();
        let euler = 0.577215664901532860606512090082;
        assert!((jet.value(1).re + euler).abs() < 1e-12);
        assert!(jet.value(1).im.abs() < 1e-13);
        assert!((jet.value(2).re - PI * PI / 6.0).abs() < 1e-11);
    }

    #[test]
    fn polygamma_recurrence() {
        // psi(s+1) = psi(s) + 1/s
        for &(re, im) in &[(0.7, 0.0), (2.3, 4.0), (0.5, -11.0), (6.0, 60.0)] {
            let s = c(re, im);
            let a = polygamma_jet(s + 1.0, 1).unwrap().value(1);
            let b = polygamma_jet(s, 1).unwrap().value(1) + 1.0 / s;
            assert!((a - b).norm() < 1e-11 * (1.0 + a.norm()), "s = {s}");
        }
    }

    #[test]
    fn polygamma_matches_finite_differences() {
        // central differences of log_gamma at 10 + 10i, orders 1..3
        let s = c(10.0, 10.0);
        let h = 1e-3;
        let jet = polygamma_jet(s, 3).unwrap();
        let f = |z: Complex64| log_gamma(z).unwrap();
        let d1 = (f(s + h) - f(s - h)) / (2.0 * h);
        let d2 = (f(s + h) - 2.0 * f(s) + f(s - h)) / (h * h);
        assert!((jet.value(1) - d1).norm() < 1e-6);
        assert!((jet.value(2) - d2).norm() < 1e-6);
        // Third derivative by Cauchy disc: the double-precision finite
        // difference is dominated by rounding noise (~2e-6) at this scale.
        let radius = 1.0;
        let nodes = 64;
        let mut acc = c(0.0, 0.0);
        for j in 0..nodes {
            let th = 2.0 * PI * j as f64 / nodes as f64;
            let z = s + radius * c(th.cos(), th.sin());
            acc += f(z) * c((3.0 * th).cos(), -(3.0 * th).sin());
        }
        let d3 = acc / nodes as f64 * 6.0 / radius.powi(3);
        assert!((jet.value(3) - d3).norm() < 1e-8);
    }

    #[test]
    fn domain_errors() {
        assert!(log_gamma(c(0.0, 0.0)).is_err());
        assert!(log_gamma(c(-3.0, 0.0)).is_err());
        assert!(log_gamma_jet(c(-5.0, 1e-6), 2).is_err());
    }
}
