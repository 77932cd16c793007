//! Exact Fourier coefficients of the six one-dimensional level-1 eigenforms
//! and the arithmetic facts derived from them.
//!
//! Weights 12, 16, 18, 20, 22, 26 span one-dimensional cusp spaces, so the
//! normalized eigenform is `Delta * E_{k-12}` with `E_w` the normalized
//! Eisenstein series of the (also one-dimensional) weight `w = k - 12`
//! (`E_0 = 1`). Tables hold exact `a_f(n)`, float `lambda_f(n)`, the index
//! `n_f`, and running Rankin sums.

pub mod cache;
pub mod series;

use num_bigint::BigInt;
use num_traits::{Signed, Zero};
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::Complex64;
use series::{bigint_to_f64, delta_coefficients, eisenstein_combination, IntegerSeries};

pub use series::{build_delta, build_eisenstein};

/// Admissible weights: the level-1 weights with `dim S_k = 1`.
pub const ADMISSIBLE_WEIGHTS: [u32; 6] = [12, 16, 18, 20, 22, 26];

/// A level-1 normalized Hecke eigenform, identified by its weight.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct EigenformSpec {
    weight: u32,
    label: &'static str,
}

impl EigenformSpec {
    pub fn new(weight: u32) -> Result<Self> {
        let label = match weight {
            12 => "delta.12",
            16 => "delta_e4.16",
            18 => "delta_e6.18",
            20 => "delta_e4sq.20",
            22 => "delta_e4e6.22",
            26 => "delta_e4sq_e6.26",
            w => {
                return Err(Error::domain(
                    "EigenformSpec",
                    format!("weight {w} is not one of {ADMISSIBLE_WEIGHTS:?}"),
                ))
            }
        };
        Ok(EigenformSpec { weight, label })
    }

    pub fn weight(&self) -> u32 {
        self.weight
    }

    pub fn label(&self) -> &'static str {
        self.label
    }

    /// Sign of the functional equation: `(-1)^(k/2)`, i.e. +1 iff 4 | k.
    pub fn sign(&self) -> i32 {
        if self.weight % 4 == 0 {
            1
        } else {
            -1
        }
    }

    /// `(k - 1) / 2`, the normalization shift.
    pub fn shift(&self) -> f64 {
        (self.weight as f64 - 1.0) / 2.0
    }
}

/// Exact and normalized coefficient data for one eigenform.
#[derive(Debug, Clone)]
pub struct CoefficientTable {
    spec: EigenformSpec,
    /// a[n] for 1 <= n <= len (a[0] unused).
    a: Vec<BigInt>,
    /// lambda[n] = a[n] / n^{(k-1)/2}.
    lambda: Vec<f64>,
    /// Running sums of |lambda(n)|^2; rankin[x] = sum_{n<=x}.
    rankin: Vec<f64>,
    n_f: usize,
}

impl CoefficientTable {
    /// Build the eigenform table of length `n`. Prime coefficients come from
    /// the product expansion (via a CRT multi-modulus convolution for speed);
    /// composite indices are filled by the Hecke relations, which the
    /// construction verifies against direct convolution on an initial segment.
    pub fn build(spec: EigenformSpec, n: usize) -> Result<Self> {
        if n < 2 {
            return Err(Error::domain("build_eigenform", "need N >= 2"));
        }
        let a = eigenform_coefficients(spec, n)?;
        Self::from_exact(spec, a)
    }

    /// Assemble a table from exact coefficients (a[0] must be the unused zero
    /// slot, a[1] = 1).
    pub fn from_exact(spec: EigenformSpec, a: Vec<BigInt>) -> Result<Self> {
        let len = a.len() - 1;
        if len < 2 {
            return Err(Error::domain("build_eigenform", "need N >= 2"));
        }
        if a[1] != BigInt::from(1) {
            return Err(Error::DataIntegrity("a_f(1) != 1".into()));
        }
        let shift = spec.shift();
        let lambda: Vec<f64> = std::iter::once(0.0)
            .chain((1..=len).map(|n| bigint_to_f64(&a[n]) / (n as f64).powf(shift)))
            .collect();
        let mut rankin = vec![0.0f64; len + 1];
        let mut acc = 0.0;
        for n in 1..=len {
            acc += lambda[n] * lambda[n];
            rankin[n] = acc;
        }
        let n_f = detect_nf_from(&a)?;
        Ok(CoefficientTable {
            spec,
            a,
            lambda,
            rankin,
            n_f,
        })
    }

    pub fn spec(&self) -> EigenformSpec {
        self.spec
    }

    pub fn len(&self) -> usize {
        self.a.len() - 1
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn a(&self, n: usize) -> &BigInt {
        &self.a[n]
    }

    pub fn a_f64(&self, n: usize) -> f64 {
        bigint_to_f64(&self.a[n])
    }

    pub fn lambda(&self, n: usize) -> f64 {
        self.lambda[n]
    }

    pub fn lambdas(&self) -> &[f64] {
        &self.lambda
    }

    /// Least n > 1 with lambda(n) != 0.
    pub fn n_f(&self) -> usize {
        self.n_f
    }

    /// Running Rankin sum `sum_{n<=x} |lambda(n)|^2`.
    pub fn rankin_sum(&self, x: usize) -> f64 {
        self.rankin[x.min(self.len())]
    }
}

/// Least n > 1 with a(n) != 0, or an error when no such index is tabulated.
fn detect_nf_from(a: &[BigInt]) -> Result<usize> {
    for (n, v) in a.iter().enumerate().skip(2) {
        if !v.is_zero() {
            return Ok(n);
        }
    }
    Err(Error::Contract(
        "table too short: no nonzero coefficient beyond n = 1".into(),
    ))
}

/// Least n > 1 with lambda(n) != 0 for a built table.
pub fn detect_nf(table: &CoefficientTable) -> usize {
    table.n_f()
}

/// The Eisenstein factor pairing each weight: `k = 12 + w`.
fn eisenstein_weight(k: u32) -> Option<u32> {
    match k {
        12 => Some(0),
        16 => Some(4),
        18 => Some(6),
        20 => Some(8),
        22 => Some(10),
        26 => Some(14),
        _ => None,
    }
}

/// Full product expansion `Delta * E_w` truncated after `q^n`, exact.
/// Quadratic in `n`; used directly for moderate lengths and as the
/// verification oracle for the multiplicative build.
pub fn eigenform_series_direct(spec: EigenformSpec, n: usize) -> Result<IntegerSeries> {
    let w = eisenstein_weight(spec.weight()).expect("admissible weight");
    let delta = series::build_delta(n)?;
    if w == 0 {
        return Ok(delta);
    }
    let eis = eisenstein_combination(w, n)?;
    Ok(delta.mul(&eis))
}

// Four 63-bit primes for CRT reconstruction of prime-index coefficients.
// Product ~ 7.2e75, comfortably above 2 * (10^5)^{12.5} ~ 2.5e63.
const CRT_PRIMES: [u64; 4] = [
    9223372036854775783,
    9223372036854775643,
    9223372036854775549,
    9223372036854775507,
];

fn mul_mod(a: u64, b: u64, m: u64) -> u64 {
    ((a as u128 * b as u128) % m as u128) as u64
}

fn pow_mod(mut b: u64, mut e: u64, m: u64) -> u64 {
    let mut acc = 1u64 % m;
    b %= m;
    while e > 0 {
        if e & 1 == 1 {
            acc = mul_mod(acc, b, m);
        }
        b = mul_mod(b, b, m);
        e >>= 1;
    }
    acc
}

/// sigma_r(i) mod m for i = 0..=n (index 0 zero), via a divisor sieve.
fn sigma_mod_table(r: u32, n: usize, m: u64) -> Vec<u64> {
    let mut out = vec![0u64; n + 1];
    for d in 1..=n {
        let dp = pow_mod(d as u64, r as u64, m);
        let mut i = d;
        while i <= n {
            out[i] = (out[i] + dp) % m;
            i += d;
        }
    }
    out
}

/// Exact coefficients a(0..=n) of the weight-k eigenform. Primes by CRT
/// convolution against the Eisenstein factor, composites by Hecke relations.
fn eigenform_coefficients(spec: EigenformSpec, n: usize) -> Result<Vec<BigInt>> {
    let k = spec.weight();
    let tau = delta_coefficients(n)?;
    let w = eisenstein_weight(k).expect("admissible weight");

    let primes = sieve_primes(n);

    let mut a_prime: Vec<(usize, BigInt)> = Vec::with_capacity(primes.len());
    if w == 0 {
        for &p in &primes {
            a_prime.push((p, BigInt::from(tau[p - 1])));
        }
    } else {
        let (r, scale) = match w {
            4 => (3u32, 240i64),
            6 => (5, -504),
            8 => (7, 480),
            10 => (9, -264),
            14 => (13, -24),
            _ => unreachable!(),
        };
        // Residue tables per modulus.
        let tables: Vec<(u64, Vec<u64>, Vec<u64>)> = CRT_PRIMES
            .iter()
            .map(|&m| {
                let sig = sigma_mod_table(r, n, m);
                let tau_mod: Vec<u64> = tau
                    .iter()
                    .map(|&t| {
                        let t_red = (t % m as i128 + m as i128) % m as i128;
                        t_red as u64
                    })
                    .collect();
                (m, sig, tau_mod)
            })
            .collect();
        let scale_mods: Vec<u64> = CRT_PRIMES
            .iter()
            .map(|&m| {
                let s = (scale as i128 % m as i128 + m as i128) % m as i128;
                s as u64
            })
            .collect();

        // a(p) = tau(p) + c_w * sum_{j=1}^{p-1} tau(j) sigma_r(p - j).
        let residues: Vec<(usize, [u64; 4])> = primes
            .par_iter()
            .map(|&p| {
                let mut rs = [0u64; 4];
                for (qi, (m, sig, tau_mod)) in tables.iter().enumerate() {
                    let m = *m;
                    let mut acc: u64 = 0;
                    for j in 1..p {
                        let t = tau_mod[j - 1];
                        if t == 0 {
                            continue;
                        }
                        acc = (acc + mul_mod(t, sig[p - j], m)) % m;
                    }
                    acc = mul_mod(acc, scale_mods[qi], m);
                    rs[qi] = (acc + tau_mod[p - 1]) % m;
                }
                (p, rs)
            })
            .collect();

        // Balanced CRT reconstruction.
        let m_big: Vec<BigInt> = CRT_PRIMES.iter().map(|&m| BigInt::from(m)).collect();
        let m_all: BigInt = m_big.iter().product();
        let half = &m_all / 2;
        let basis: Vec<BigInt> = (0..4)
            .map(|i| {
                let mi = &m_all / &m_big[i];
                let inv = mod_inverse(&mi, &m_big[i]);
                mi * inv
            })
            .collect();
        for (p, rs) in residues {
            let mut v = BigInt::zero();
            for i in 0..4 {
                v += &basis[i] * BigInt::from(rs[i]);
            }
            v %= &m_all;
            if v > half {
                v -= &m_all;
            }
            a_prime.push((p, v));
        }
    }

    // Fill composites multiplicatively via Hecke at prime powers.
    let mut a = vec![BigInt::zero(); n + 1];
    a[1] = BigInt::from(1);
    for &(p, ref ap) in &a_prime {
        a[p] = ap.clone();
    }
    for &(p, _) in &a_prime {
        let pk_weight = BigInt::from(p).pow(k - 1);
        let mut power = p.checked_mul(p);
        let mut prev = a[1].clone(); // a(p^{e-1})
        let mut curr = a[p].clone(); // a(p^e)
        while let Some(pe) = power {
            if pe > n {
                break;
            }
            let next = &a[p] * &curr - &pk_weight * &prev;
            a[pe] = next.clone();
            prev = curr;
            curr = next;
            power = pe.checked_mul(p);
        }
    }
    // Smallest-prime-factor walk for indices with at least two prime factors.
    let spf = smallest_prime_factor(n);
    for m in 2..=n {
        let p = spf[m];
        let mut pe = p;
        let mut rest = m / p;
        while rest % p == 0 {
            pe *= p;
            rest /= p;
        }
        if rest == 1 {
            continue; // prime power, already set
        }
        a[m] = &a[pe] * &a[rest];
    }

    Ok(a)
}

fn mod_inverse(a: &BigInt, m: &BigInt) -> BigInt {
    // Extended Euclid; m prime here.
    let (mut t, mut new_t) = (BigInt::zero(), BigInt::from(1));
    let (mut r, mut new_r) = (m.clone(), a % m);
    while !new_r.is_zero() {
        let q = &r / &new_r;
        let tmp_t = &t - &q * &new_t;
        t = std::mem::replace(&mut new_t, tmp_t);
        let tmp_r = &r - &q * &new_r;
        r = std::mem::replace(&mut new_r, tmp_r);
    }
    if t.is_negative() {
        t += m;
    }
    t
}

pub fn sieve_primes(n: usize) -> Vec<usize> {
    let mut is = vec![true; n + 1];
    let mut out = Vec::new();
    for p in 2..=n {
        if is[p] {
            out.push(p);
            let mut m = p * p;
            while m <= n {
                is[m] = false;
                m += p;
            }
        }
    }
    out
}

fn smallest_prime_factor(n: usize) -> Vec<usize> {
    let mut spf: Vec<usize> = (0..=n).collect();
    let mut p = 2;
    while p * p <= n {
        if spf[p] == p {
            let mut m = p * p;
            while m <= n {
                if spf[m] == m {
                    spf[m] = p;
                }
                m += p;
            }
        }
        p += 1;
    }
    spf
}

/// Divisor-count table d(1..=n).
pub fn divisor_count_table(n: usize) -> Vec<u32> {
    let mut d = vec![0u32; n + 1];
    for i in 1..=n {
        let mut m = i;
        while m <= n {
            d[m] += 1;
            m += i;
        }
    }
    d
}

/// Build a table per spec (`build_eigenform`).
pub fn build_eigenform(spec: EigenformSpec, n: usize) -> Result<CoefficientTable> {
    CoefficientTable::build(spec, n)
}

/// Roots of `X^2 - lambda X + 1`.
pub fn satake_from_lambda(lam: f64) -> (Complex64, Complex64) {
    let half = lam / 2.0;
    let disc = half * half - 1.0;
    if disc >= 0.0 {
        let root = disc.sqrt();
        (
            Complex64::new(half + root, 0.0),
            Complex64::new(half - root, 0.0),
        )
    } else {
        let root = (-disc).sqrt();
        (Complex64::new(half, root), Complex64::new(half, -root))
    }
}

/// Satake parameters at p: roots of `X^2 - lambda(p) X + 1`.
pub fn satake(table: &CoefficientTable, p: usize) -> Result<(Complex64, Complex64)> {
    if p > table.len() {
        return Err(Error::domain("satake", format!("p = {p} beyond table")));
    }
    Ok(satake_from_lambda(table.lambda(p)))
}

/// Report of the Deligne bound check |lambda(n)| <= d(n).
#[derive(Debug, Clone, serde::Serialize)]
pub struct DeligneReport {
    pub checked_to: usize,
    pub max_ratio: f64,
    pub argmax: usize,
}

/// Assert the Deligne bound on every tabulated index.
pub fn deligne_check(table: &CoefficientTable) -> Result<DeligneReport> {
    let d = divisor_count_table(table.len());
    let mut max_ratio = 0.0f64;
    let mut argmax = 1usize;
    for n in 1..=table.len() {
        let ratio = table.lambda(n).abs() / d[n] as f64;
        if ratio > max_ratio {
            max_ratio = ratio;
            argmax = n;
        }
        if ratio > 1.0 + 1e-12 {
            return Err(Error::DataIntegrity(format!(
                "Deligne bound violated at n = {n}: |lambda| = {}, d = {}",
                table.lambda(n).abs(),
                d[n]
            )));
        }
    }
    Ok(DeligneReport {
        checked_to: table.len(),
        max_ratio,
        argmax,
    })
}

/// Rankin constant estimate at x, with a low-confidence flag for small x.
#[derive(Debug, Clone, Copy, serde::Serialize)]
pub struct RankinEstimate {
    pub x: usize,
    pub c_hat: f64,
    pub low_confidence: bool,
}

/// `C_hat(x) = sum_{n<=x} |lambda(n)|^2 / x`.
pub fn rankin_constant(table: &CoefficientTable, x: usize) -> Result<RankinEstimate> {
    if x > table.len() {
        return Err(Error::domain(
            "rankin_constant",
            format!("x = {x} beyond table length {}", table.len()),
        ));
    }
    if x == 0 {
        return Err(Error::domain("rankin_constant", "x must be positive"));
    }
    Ok(RankinEstimate {
        x,
        c_hat: table.rankin_sum(x) / x as f64,
        low_confidence: x < 100,
    })
}
