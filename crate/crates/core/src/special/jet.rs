//! Derivative jets and complete Bell polynomials.
//!
//! A [`DerivativeJet`] stores `G(s), G'(s), ..., G^(r)(s)` for some
//! holomorphic `G` at a center. Arithmetic follows the Leibniz rule on
//! derivative values; `exp` and `log` use the complete-Bell-polynomial
//! recurrence, which is also exposed directly as [`bell_ratio`].

use crate::error::{Error, Result};
use crate::Complex64;

const MAX_ORDER: usize = 11;

/// Binomial coefficients C(n, k) for n <= MAX_ORDER.
fn binom(n: usize, k: usize) -> f64 {
    const TABLE: [[f64; MAX_ORDER + 1]; MAX_ORDER + 1] = {
        let mut t = [[0.0; MAX_ORDER + 1]; MAX_ORDER + 1];
        let mut n = 0;
        while n <= MAX_ORDER {
            t[n][0] = 1.0;
            let mut k = 1;
            while k <= n {
                t[n][k] = t[n - 1][k - 1] + if k <= n - 1 { t[n - 1][k] } else { 0.0 };
                k += 1;
            }
            n += 1;
        }
        t
    };
    TABLE[n][k]
}

/// Values of a function and its derivatives at a point.
#[derive(Debug, Clone, PartialEq)]
pub struct DerivativeJet {
    center: Complex64,
    values: Vec<Complex64>,
}

impl DerivativeJet {
    pub fn new(center: Complex64, values: Vec<Complex64>) -> Self {
        assert!(!values.is_empty() && values.len() <= MAX_ORDER + 1);
        DerivativeJet { center, values }
    }

    /// Jet of the constant function.
    pub fn constant(center: Complex64, value: Complex64, order: usize) -> Self {
        let mut values = vec![Complex64::new(0.0, 0.0); order + 1];
        values[0] = value;
        DerivativeJet { center, values }
    }

    /// Jet of `s |-> a*s + b` at the center (derivative `a`, higher zero).
    pub fn affine(center: Complex64, a: Complex64, b: Complex64, order: usize) -> Self {
        let mut values = vec![Complex64::new(0.0, 0.0); order + 1];
        values[0] = a * center + b;
        if order >= 1 {
            values[1] = a;
        }
        DerivativeJet { center, values }
    }

    pub fn center(&self) -> Complex64 {
        self.center
    }

    pub fn order(&self) -> usize {
        self.values.len() - 1
    }

    pub fn value(&self, r: usize) -> Complex64 {
        self.values[r]
    }

    pub fn values(&self) -> &[Complex64] {
        &self.values
    }

    pub fn truncated(&self, order: usize) -> DerivativeJet {
        DerivativeJet {
            center: self.center,
            values: self.values[..=order.min(self.order())].to_vec(),
        }
    }

    pub fn add(&self, rhs: &DerivativeJet) -> DerivativeJet {
        let n = self.order().min(rhs.order());
        DerivativeJet {
            center: self.center,
            values: (0..=n).map(|i| self.values[i] + rhs.values[i]).collect(),
        }
    }

    pub fn sub(&self, rhs: &DerivativeJet) -> DerivativeJet {
        let n = self.order().min(rhs.order());
        DerivativeJet {
            center: self.center,
            values: (0..=n).map(|i| self.values[i] - rhs.values[i]).collect(),
        }
    }

    pub fn scale(&self, k: Complex64) -> DerivativeJet {
        DerivativeJet {
            center: self.center,
            values: self.values.iter().map(|v| v * k).collect(),
        }
    }

    /// Leibniz product.
    pub fn mul(&self, rhs: &DerivativeJet) -> DerivativeJet {
        let n = self.order().min(rhs.order());
        let mut values = Vec::with_capacity(n + 1);
        for r in 0..=n {
            let mut acc = Complex64::new(0.0, 0.0);
            for i in 0..=r {
                acc += binom(r, i) * self.values[i] * rhs.values[r - i];
            }
            values.push(acc);
        }
        DerivativeJet {
            center: self.center,
            values,
        }
    }

    /// Quotient `self / rhs` via triangular solve of the Leibniz rule.
    pub fn div(&self, rhs: &DerivativeJet) -> DerivativeJet {
        let n = self.order().min(rhs.order());
        let mut values: Vec<Complex64> = Vec::with_capacity(n + 1);
        for r in 0..=n {
            let mut acc = self.values[r];
            for i in 0..r {
                acc -= binom(r, i) * values[i] * rhs.values[r - i];
            }
            values.push(acc / rhs.values[0]);
        }
        DerivativeJet {
            center: self.center,
            values,
        }
    }

    /// Jet of `exp(G)` from the jet of `G`: `F^(r) = F * B_r(G', ..., G^(r))`.
    pub fn exp(&self) -> DerivativeJet {
        let f0 = self.values[0].exp();
        let bells = bell_sequence(self);
        DerivativeJet {
            center: self.center,
            values: bells.iter().map(|b| f0 * b).collect(),
        }
    }

    /// Jet of `log(F)` from the jet of a nonvanishing `F` (principal value at
    /// order zero). Inverts `F^(r+1) = sum_i C(r,i) F^(r-i) G^(i+1)`.
    pub fn log(&self) -> DerivativeJet {
        let n = self.order();
        let f0 = self.values[0];
        let mut g = vec![Complex64::new(0.0, 0.0); n + 1];
        g[0] = f0.ln();
        for r in 0..n {
            let mut sum = Complex64::new(0.0, 0.0);
            for i in 0..r {
                sum += binom(r, i) * self.values[r - i] * g[i + 1];
            }
            g[r + 1] = (self.values[r + 1] - sum) / f0;
        }
        DerivativeJet {
            center: self.center,
            values: g,
        }
    }

    /// Sign-flipped composition: jet of `s |-> G(c - s)` given the jet of `G`
    /// at `c - s0`.
    pub fn negate_variable(&self) -> DerivativeJet {
        DerivativeJet {
            center: self.center,
            values: self
                .values
                .iter()
                .enumerate()
                .map(|(i, v)| if i % 2 == 0 { *v } else { -*v })
                .collect(),
        }
    }
}

/// `B_0..B_r` for the jet of `G`: `B_{r+1} = sum_i C(r,i) B_{r-i} G^(i+1)`.
fn bell_sequence(jet: &DerivativeJet) -> Vec<Complex64> {
    let n = jet.order();
    let mut b = vec![Complex64::new(0.0, 0.0); n + 1];
    b[0] = Complex64::new(1.0, 0.0);
    for r in 0..n {
        let mut acc = Complex64::new(0.0, 0.0);
        for i in 0..=r {
            acc += binom(r, i) * b[r - i] * jet.values[i + 1];
        }
        b[r + 1] = acc;
    }
    b
}

/// `F^(r)/F` where `log F = G`, i.e. the complete Bell polynomial
/// `B_r(G', ..., G^(r))`. The leading monomial `(G')^r` has coefficient 1.
pub fn bell_ratio(jet: &DerivativeJet, r: usize) -> Result<Complex64> {
    if jet.order() < r {
        return Err(Error::Contract(format!(
            "bell_ratio needs jet of order >= {r}, got {}",
            jet.order()
        )));
    }
    Ok(bell_sequence(&jet.truncated(r))[r])
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn bell_base_cases() {
        let jet = DerivativeJet::new(c(0.0, 0.0), vec![c(0.0, 0.0); 5]);
        assert_eq!(bell_ratio(&jet, 0).unwrap(), c(1.0, 0.0));
        for r in 1..=4 {
            assert_eq!(bell_ratio(&jet, r).unwrap(), c(0.0, 0.0));
        }
    }

    #[test]
    fn bell_order_two_symbolic() {
        // B_2 = g1^2 + g2
        let a = c(1.3, -0.4);
        let b = c(0.2, 2.0);
        let jet = DerivativeJet::new(c(0.0, 0.0), vec![c(9.0, 9.0), a, b]);
        let b2 = bell_ratio(&jet, 2).unwrap();
        assert!((b2 - (a * a + b)).norm() < 1e-15);
    }

    #[test]
    fn bell_too_short_is_contract_error() {
        let jet = DerivativeJet::new(c(0.0, 0.0), vec![c(1.0, 0.0); 2]);
        assert!(bell_ratio(&jet, 4).is_err());
    }

    #[test]
    fn exp_log_roundtrip() {
        let g = DerivativeJet::new(c(0.3, 0.1), vec![c(0.2, 0.5), c(1.0, -1.0), c(0.3, 0.0), c(0.0, 0.7)]);
        let f = g.exp();
        let back = f.log();
        for r in 0..=3 {
            assert!(
                (back.value(r) - g.value(r)).norm() < 1e-12,
                "order {r}"
            );
        }
    }

    #[test]
    fn mul_div_roundtrip() {
        let a = DerivativeJet::new(c(0.0, 0.0), vec![c(1.0, 2.0), c(-0.3, 0.4), c(0.2, 0.0), c(1.0, 1.0)]);
        let b = DerivativeJet::new(c(0.0, 0.0), vec![c(0.5, -1.0), c(2.0, 0.1), c(0.0, 0.3), c(-1.0, 0.0)]);
        let prod = a.mul(&b);
        let back = prod.div(&b);
        for r in 0..=3 {
            assert!((back.value(r) - a.value(r)).norm() < 1e-12);
        }
    }

    #[test]
    fn bell_matches_cauchy_disc_for_exp_sin() {
        // F(s) = exp(sin s) at s0 = 0.3: B_4 of G = sin should match the
        // Cauchy-disc fourth derivative of F divided by F.
        let s0 = c(0.3, 0.0);
        // G = sin s jets: sin, cos, -sin, -cos, sin
        let (sn, cs) = (s0.re.sin(), s0.re.cos());
        let jet = DerivativeJet::new(
            s0,
            vec![c(sn, 0.0), c(cs, 0.0), c(-sn, 0.0), c(-cs, 0.0), c(sn, 0.0)],
        );
        let b4 = bell_ratio(&jet, 4).unwrap();

        // Cauchy disc: F^(4)(s0) = 4!/(2 pi r^4) * mean of F(s0+re^{it}) e^{-4it}
        let radius = 0.5;
        let nodes = 64;
        let mut acc = c(0.0, 0.0);
        for j in 0..nodes {
            let th = 2.0 * std::f64::consts::PI * j as f64 / nodes as f64;
            let z = s0 + radius * c(th.cos(), th.sin());
            let f = z.sin().exp();
            acc += f * c((4.0 * th).cos(), -(4.0 * th).sin());
        }
        let f4 = acc / nodes as f64 * 24.0 / radius.powi(4);
        let f0 = s0.sin().exp();
        assert!(
            (b4 - f4 / f0).norm() < 1e-6,
            "bell {b4}, cauchy {}",
            f4 / f0
        );
    }
}
