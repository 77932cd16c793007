//! Exact truncated q-expansions with arbitrary-size integer coefficients.
//!
//! A series holds coefficients of `q^0 .. q^(len-1)`; all arithmetic is exact
//! and truncates at the shorter operand. The weight-12 cusp form has a fast
//! machine-integer path (`delta_coefficients`) built from the cube-of-eta
//! theta series; everything else goes through `BigInt`.

use num_bigint::BigInt;
use num_traits::{One, Signed, ToPrimitive, Zero};
use rayon::prelude::*;

use crate::error::{Error, Result};

/// Truncated integer power series in q.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct IntegerSeries {
    coeffs: Vec<BigInt>,
}

impl IntegerSeries {
    /// Zero series truncated after `len` coefficients (orders 0..len-1).
    pub fn zero(len: usize) -> Self {
        IntegerSeries {
            coeffs: vec![BigInt::zero(); len],
        }
    }

    /// Constant series 1.
    pub fn one(len: usize) -> Self {
        let mut s = Self::zero(len.max(1));
        s.coeffs[0] = BigInt::one();
        s
    }

    pub fn from_coeffs(coeffs: Vec<BigInt>) -> Self {
        IntegerSeries { coeffs }
    }

    /// Number of retained coefficients (truncation order).
    pub fn len(&self) -> usize {
        self.coeffs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn coeff(&self, i: usize) -> &BigInt {
        &self.coeffs[i]
    }

    pub fn coeffs(&self) -> &[BigInt] {
        &self.coeffs
    }

    pub fn set_coeff(&mut self, i: usize, v: BigInt) {
        self.coeffs[i] = v;
    }

    /// Truncated product; the result keeps `min(self.len, rhs.len)` terms.
    pub fn mul(&self, rhs: &IntegerSeries) -> IntegerSeries {
        let n = self.len().min(rhs.len());
        let coeffs: Vec<BigInt> = (0..n)
            .into_par_iter()
            .map(|i| {
                let mut acc = BigInt::zero();
                for j in 0..=i {
                    let a = &self.coeffs[j];
                    if !a.is_zero() {
                        let b = &rhs.coeffs[i - j];
                        if !b.is_zero() {
                            acc += a * b;
                        }
                    }
                }
                acc
            })
            .collect();
        IntegerSeries { coeffs }
    }

    pub fn sub(&self, rhs: &IntegerSeries) -> IntegerSeries {
        let n = self.len().min(rhs.len());
        let coeffs = (0..n)
            .map(|i| &self.coeffs[i] - &rhs.coeffs[i])
            .collect();
        IntegerSeries { coeffs }
    }

    pub fn scale(&self, k: i64) -> IntegerSeries {
        let k = BigInt::from(k);
        IntegerSeries {
            coeffs: self.coeffs.iter().map(|c| c * &k).collect(),
        }
    }

    /// Integer power by repeated squaring.
    pub fn pow(&self, mut e: u32) -> IntegerSeries {
        let mut result = IntegerSeries::one(self.len());
        let mut base = self.clone();
        while e > 0 {
            if e & 1 == 1 {
                result = result.mul(&base);
            }
            e >>= 1;
            if e > 0 {
                base = base.mul(&base);
            }
        }
        result
    }

    /// Exact division by a scalar; errors if any coefficient is not divisible.
    pub fn div_exact(&self, k: i64) -> Result<IntegerSeries> {
        let k = BigInt::from(k);
        let mut coeffs = Vec::with_capacity(self.len());
        for (i, c) in self.coeffs.iter().enumerate() {
            if !(c % &k).is_zero() {
                return Err(Error::DataIntegrity(format!(
                    "coefficient of q^{i} not divisible by {k}"
                )));
            }
            coeffs.push(c / &k);
        }
        Ok(IntegerSeries { coeffs })
    }
}

/// Cube-of-eta theta coefficients: sparse entries `(-1)^j (2j+1)` at the
/// triangular indices `j(j+1)/2`.
fn theta_sparse(len: usize) -> Vec<(usize, i64)> {
    let mut out = Vec::new();
    let mut j: usize = 0;
    loop {
        let idx = j * (j + 1) / 2;
        if idx >= len {
            break;
        }
        let sign = if j % 2 == 0 { 1 } else { -1 };
        out.push((idx, sign * (2 * j as i64 + 1)));
        j += 1;
    }
    out
}

/// `tau(1..=n)` as exact `i128`, via two dense squarings of the sparse theta
/// series. Coefficient growth stays below `i128` for `n <= 2*10^5`; checked
/// arithmetic guards the bound.
pub fn delta_coefficients(n: usize) -> Result<Vec<i128>> {
    if n < 1 {
        return Err(Error::domain("build_delta", "need N >= 1"));
    }
    if n > 200_000 {
        return Err(Error::domain(
            "build_delta",
            "machine-integer path certified only to N = 2*10^5",
        ));
    }
    // tau(m) = [q^{m-1}] theta^8, so work with series of length n.
    let len = n;
    let th = theta_sparse(len);

    // theta^2: sparse x sparse.
    let mut t2 = vec![0i128; len];
    for &(i, a) in &th {
        for &(j, b) in &th {
            if i + j >= len {
                break;
            }
            t2[i + j] += (a as i128) * (b as i128);
        }
    }

    let square_dense = |v: &[i128]| -> Result<Vec<i128>> {
        let len = v.len();
        let out: Vec<Result<i128>> = (0..len)
            .into_par_iter()
            .map(|m| {
                let mut acc: i128 = 0;
                let half = m / 2;
                for j in 0..=half {
                    let a = v[j];
                    if a == 0 {
                        continue;
                    }
                    let b = v[m - j];
                    if b == 0 {
                        continue;
                    }
                    let prod = a
                        .checked_mul(b)
                        .ok_or_else(|| Error::DataIntegrity("i128 overflow in series square".into()))?;
                    let prod = if j != m - j {
                        prod.checked_mul(2).ok_or_else(|| {
                            Error::DataIntegrity("i128 overflow in series square".into())
                        })?
                    } else {
                        prod
                    };
                    acc = acc.checked_add(prod).ok_or_else(|| {
                        Error::DataIntegrity("i128 overflow in series square".into())
                    })?;
                }
                Ok(acc)
            })
            .collect();
        out.into_iter().collect()
    };

    let t4 = square_dense(&t2)?;
    let t8 = square_dense(&t4)?;
    // Shift by one: tau(m) = t8[m-1].
    Ok((1..=n).map(|m| t8[m - 1]).collect())
}

/// Exact q-expansion of the discriminant form: `tau(1..=n)` as an
/// `IntegerSeries` indexed so that `coeff(i) = tau(i)` for `i >= 1`
/// (`coeff(0) = 0`).
pub fn build_delta(n: usize) -> Result<IntegerSeries> {
    let tau = delta_coefficients(n)?;
    let mut coeffs = Vec::with_capacity(n + 1);
    coeffs.push(BigInt::zero());
    coeffs.extend(tau.into_iter().map(BigInt::from));
    Ok(IntegerSeries::from_coeffs(coeffs))
}

/// Sigma_r(m) = sum of r-th powers of divisors, exact, for m = 1..=n.
/// Index 0 is unused (zero).
pub fn sigma_table(r: u32, n: usize) -> Vec<BigInt> {
    let mut out = vec![BigInt::zero(); n + 1];
    for d in 1..=n {
        let dp = BigInt::from(d).pow(r);
        let mut m = d;
        while m <= n {
            out[m] += &dp;
            m += d;
        }
    }
    out
}

/// Normalized Eisenstein series of weight 4 or 6, truncated after `q^n`.
pub fn build_eisenstein(weight: u32, n: usize) -> Result<IntegerSeries> {
    let (r, scale) = match weight {
        4 => (3u32, 240i64),
        6 => (5u32, -504i64),
        w => {
            return Err(Error::domain(
                "build_eisenstein",
                format!("weight must be 4 or 6, got {w}"),
            ))
        }
    };
    let sig = sigma_table(r, n);
    let mut coeffs = Vec::with_capacity(n + 1);
    coeffs.push(BigInt::one());
    for m in 1..=n {
        coeffs.push(&sig[m] * BigInt::from(scale));
    }
    Ok(IntegerSeries::from_coeffs(coeffs))
}

/// Normalized Eisenstein series E_w = 1 + c_w sum sigma_{w-1}(n) q^n for the
/// one-dimensional weights w in {4, 6, 8, 10, 14}.
pub fn eisenstein_combination(weight: u32, n: usize) -> Result<IntegerSeries> {
    let (r, scale) = match weight {
        4 => (3u32, 240i64),
        6 => (5, -504),
        8 => (7, 480),
        10 => (9, -264),
        14 => (13, -24),
        w => {
            return Err(Error::domain(
                "eisenstein_combination",
                format!("no one-dimensional Eisenstein space of weight {w}"),
            ))
        }
    };
    let sig = sigma_table(r, n);
    let mut coeffs = Vec::with_capacity(n + 1);
    coeffs.push(BigInt::one());
    for m in 1..=n {
        coeffs.push(&sig[m] * BigInt::from(scale));
    }
    Ok(IntegerSeries::from_coeffs(coeffs))
}

/// Convert a big integer to f64 (saturating; fine for the magnitudes the
/// tables produce).
pub fn bigint_to_f64(v: &BigInt) -> f64 {
    v.to_f64().unwrap_or(if v.is_negative() {
        f64::NEG_INFINITY
    } else {
        f64::INFINITY
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    /// Brute-force oracle: q * prod_{m<=cap}(1-q^m)^24 by naive polynomial
    /// multiplication, exact i128.
    fn delta_brute(n: usize, cap: usize) -> Vec<i128> {
        let len = n;
        let mut acc = vec![0i128; len];
        acc[0] = 1;
        for m in 1..=cap.min(len.saturating_sub(1)) {
            for _ in 0..24 {
                // multiply by (1 - q^m)
                for i in (m..len).rev() {
                    let lower = acc[i - m];
                    acc[i] -= lower;
                }
            }
        }
        (1..=n).map(|k| acc[k - 1]).collect()
    }

    #[test]
    fn delta_matches_naive_product() {
        let tau = delta_coefficients(40).unwrap();
        let brute = delta_brute(40, 50);
        assert_eq!(tau, brute);
        assert_eq!(tau[0], 1);
        assert_eq!(tau[1], -24);
        assert_eq!(tau[2], 252);
    }

    #[test]
    fn delta_single_term() {
        let tau = delta_coefficients(1).unwrap();
        assert_eq!(tau, vec![1]);
    }

    #[test]
    fn delta_multiplicative_at_six() {
        let tau = delta_coefficients(6).unwrap();
        assert_eq!(tau[5], tau[1] * tau[2]); // tau(6) = tau(2) tau(3)
    }

    #[test]
    fn delta_rejects_bad_length() {
        assert!(delta_coefficients(0).is_err());
    }

    #[test]
    fn eisenstein_small_values() {
        let e4 = build_eisenstein(4, 2).unwrap();
        assert_eq!(e4.coeff(0), &BigInt::from(1));
        // 240 * sigma_3(2) = 240 * 9
        assert_eq!(e4.coeff(2), &BigInt::from(2160));
        let e6 = build_eisenstein(6, 1).unwrap();
        assert_eq!(e6.coeff(1), &BigInt::from(-504));
        let e4c = build_eisenstein(4, 0).unwrap();
        assert_eq!(e4c.len(), 1);
        assert_eq!(e4c.coeff(0), &BigInt::from(1));
        assert!(build_eisenstein(5, 3).is_err());
    }

    #[test]
    fn delta_from_eisenstein_cube_route() {
        // (E4^3 - E6^2) / 1728 reproduces the eta-power route exactly.
        let n = 300;
        let e4 = build_eisenstein(4, n).unwrap();
        let e6 = build_eisenstein(6, n).unwrap();
        let alt = e4.pow(3).sub(&e6.pow(2)).div_exact(1728).unwrap();
        let tau = delta_coefficients(n).unwrap();
        assert!(alt.coeff(0).is_zero());
        for m in 1..=n {
            assert_eq!(alt.coeff(m), &BigInt::from(tau[m - 1]), "mismatch at n={m}");
        }
    }

    #[test]
    fn one_dimensional_eisenstein_identities() {
        // E4^2 = E8, E4*E6 = E10, E4^2*E6 = E14 (dim M_w = 1).
        let n = 200;
        let e4 = build_eisenstein(4, n).unwrap();
        let e6 = build_eisenstein(6, n).unwrap();
        assert_eq!(e4.mul(&e4), eisenstein_combination(8, n).unwrap());
        assert_eq!(e4.mul(&e6), eisenstein_combination(10, n).unwrap());
        assert_eq!(
            e4.mul(&e4).mul(&e6),
            eisenstein_combination(14, n).unwrap()
        );
    }
}
