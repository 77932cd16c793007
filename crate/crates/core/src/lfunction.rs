//! Regime-dispatched evaluation of `L_f^(m)(s)`, the gamma factor
//! `chi_f(s)` with derivatives, the completed function, and the normalized
//! `F(s)`.
//!
//! Three regimes cover the plane:
//!
//! - **series**: the Dirichlet series with a rigorous divisor-majorant tail
//!   bound, far enough right that the table length reaches the target.
//! - **completed**: the entire-function representation obtained by splitting
//!   the theta integral on a rotated ray. Written in regularized form it is
//!   `L(s) = sum_n lambda(n) n^{-s} Q(s+c, 2 pi n e^{i phi})
//!         + chi(s) sum_n lambda(n) n^{s-1} Q(c+1-s, 2 pi n e^{-i phi})`
//!   with `c = (k-1)/2` and any `|phi| < pi/2`; aligning `phi` with
//!   `arg(s+c)` keeps every term O(1) at large heights, where the naive
//!   split-at-one representation loses `e^{pi |t|/2}` of precision to
//!   cancellation. Derivatives ride along as jets.
//! - **reflected**: the differentiated functional equation, mapping to
//!   series/completed evaluations at `1 - s`.
//!
//! Evaluations at `Im s < 0` reflect through conjugation symmetry.

use std::f64::consts::PI;

use serde::Serialize;

use crate::coefficients::CoefficientTable;
use crate::error::{Error, Result};
use crate::special::gamma::log_gamma_jet;
use crate::special::incgamma::{log_weighted_incomplete, regularized_upper_jet_with_lg};
use crate::special::jet::DerivativeJet;
use crate::Complex64;

const LN_2PI: f64 = 1.837877066409345483560659472811;

/// Dispatch band below the certified right abscissa still served by the
/// series regime (the certificate sits slightly above 3.5 at weight 12, and
/// Re s = 3 dispatches to the series there).
const DISPATCH_MARGIN: f64 = 0.6;

/// Which representation produced a value.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Regime {
    Series,
    Completed,
    Reflected,
}

/// A value with an error estimate and provenance.
#[derive(Debug, Clone, Copy)]
pub struct EvalResult {
    pub value: Complex64,
    pub error_estimate: f64,
    pub regime: Regime,
}

/// Evaluator configuration.
#[derive(Debug, Clone, Copy)]
pub struct EvalOptions {
    /// Highest derivative order served.
    pub max_order: usize,
    /// Series dispatch margin below the certified right abscissa.
    pub series_margin: f64,
    /// Left dispatch boundary: at or below this the reflection formula runs.
    pub sigma_left: f64,
    /// Absolute tolerance aimed at by truncation choices.
    pub target_tol: f64,
    /// Compensated (Neumaier) accumulation in the long sums.
    pub compensated: bool,
}

impl Default for EvalOptions {
    fn default() -> Self {
        EvalOptions {
            max_order: 4,
            series_margin: 0.25,
            sigma_left: 0.0,
            target_tol: 1e-12,
            compensated: false,
        }
    }
}

/// Closed form `int_N^inf (ln x)^p x^{-sigma} dx
///   = Gamma(p+1, (sigma-1) ln N) / (sigma-1)^{p+1}`.
pub fn log_power_tail_integral(n: f64, sigma: f64, p: usize) -> f64 {
    let a = (sigma - 1.0) * n.ln();
    // Gamma(p+1, a) = p! e^{-a} sum_{j<=p} a^j / j!
    let mut sum = 1.0;
    let mut term = 1.0;
    for j in 1..=p {
        term *= a / j as f64;
        sum += term;
    }
    let mut pfac = 1.0;
    for j in 2..=p {
        pfac *= j as f64;
    }
    pfac * (-a).exp() * sum / (sigma - 1.0).powi(p as i32 + 1)
}

/// Rigorous bound on `sum_{n>N} d(n) (ln n)^m n^{-sigma}` for sigma > 1,
/// using `sum_{n<=x} d(n) <= x (ln x + 1)` and partial summation.
pub fn dirichlet_tail_bound(n: usize, sigma: f64, m: usize) -> f64 {
    if sigma <= 1.0 {
        return f64::INFINITY;
    }
    let nf = n as f64;
    sigma * (1.0 + 1.0 / nf.ln()) * log_power_tail_integral(nf, sigma, m + 1)
}

/// Neumaier-compensated complex accumulator.
#[derive(Debug, Clone, Copy)]
struct Accum {
    sum: Complex64,
    comp: Complex64,
    enabled: bool,
}

impl Accum {
    fn new(enabled: bool) -> Self {
        Accum {
            sum: Complex64::new(0.0, 0.0),
            comp: Complex64::new(0.0, 0.0),
            enabled,
        }
    }

    #[inline]
    fn add(&mut self, v: Complex64) {
        if !self.enabled {
            self.sum += v;
            return;
        }
        let add_part = |s: &mut f64, c: &mut f64, x: f64| {
            let t = *s + x;
            if s.abs() >= x.abs() {
                *c += (*s - t) + x;
            } else {
                *c += (x - t) + *s;
            }
            *s = t;
        };
        add_part(&mut self.sum.re, &mut self.comp.re, v.re);
        add_part(&mut self.sum.im, &mut self.comp.im, v.im);
    }

    fn value(&self) -> Complex64 {
        self.sum + self.comp
    }
}

/// Regime-dispatched evaluator for one eigenform. Immutable after
/// construction; evaluations are pure.
pub struct LFunctionEvaluator {
    table: CoefficientTable,
    opts: EvalOptions,
    /// Certified right zero-free abscissa per derivative order.
    sigma_right: Vec<f64>,
    /// Abscissa from which the series regime is dispatched.
    series_sigma: Vec<f64>,
    ln_n: Vec<f64>,
}

impl LFunctionEvaluator {
    pub fn new(table: CoefficientTable, opts: EvalOptions) -> Result<Self> {
        if table.len() < 64 {
            return Err(Error::Contract("table too short for evaluation".into()));
        }
        let mut ln_n = vec![0.0f64; table.len() + 1];
        for n in 1..=table.len() {
            ln_n[n] = (n as f64).ln();
        }
        let mut sigma_right = Vec::new();
        let mut series_sigma = Vec::new();
        for m in 0..=opts.max_order {
            let sr = certify_sigma_right(&table, m)?;
            // Accuracy floor: smallest grid abscissa where the tabulated
            // series keeps the tail majorant below 1e-6 (the estimate stays
            // honest either way; the completed regime covers everything
            // tighter).
            let mut sa = 1.0 + opts.series_margin + 0.05;
            while dirichlet_tail_bound(table.len(), sa, m) > 1e-6 {
                sa += 0.05;
                if sa > 40.0 {
                    return Err(Error::Contract(
                        "table too short to reach tolerance anywhere".into(),
                    ));
                }
            }
            series_sigma.push((sr - DISPATCH_MARGIN).max(sa));
            sigma_right.push(sr);
        }
        Ok(LFunctionEvaluator {
            table,
            opts,
            sigma_right,
            series_sigma,
            ln_n,
        })
    }

    pub fn table(&self) -> &CoefficientTable {
        &self.table
    }

    pub fn options(&self) -> &EvalOptions {
        &self.opts
    }

    /// Certified right zero-free abscissa for derivative order m.
    pub fn sigma_right(&self, m: usize) -> f64 {
        self.sigma_right[m]
    }

    /// Dispatch boundary between completed and series regimes.
    pub fn series_sigma(&self, m: usize) -> f64 {
        self.series_sigma[m]
    }

    fn shift(&self) -> f64 {
        self.table.spec().shift()
    }

    fn sign(&self) -> f64 {
        self.table.spec().sign() as f64
    }

    /// `L^(m)(s)` with automatic regime dispatch.
    pub fn eval(&self, s: Complex64, m: usize) -> Result<EvalResult> {
        if m > self.opts.max_order {
            return Err(Error::Contract(format!(
                "order {m} above configured max {}",
                self.opts.max_order
            )));
        }
        let (v, e, regime) = self.eval_jet(s, m)?;
        Ok(EvalResult {
            value: v[m],
            error_estimate: e[m],
            regime,
        })
    }

    /// All of `L(s), L'(s), ..., L^(max_m)(s)` in one pass.
    pub fn eval_jet(
        &self,
        s: Complex64,
        max_m: usize,
    ) -> Result<(Vec<Complex64>, Vec<f64>, Regime)> {
        if max_m > self.opts.max_order {
            return Err(Error::Contract(format!(
                "order {max_m} above configured max {}",
                self.opts.max_order
            )));
        }
        if s.im < 0.0 {
            let (mut v, e, r) = self.eval_jet(s.conj(), max_m)?;
            for x in &mut v {
                *x = x.conj();
            }
            return Ok((v, e, r));
        }
        let sigma = s.re;
        if sigma >= self.series_sigma[max_m] {
            let (v, e) = self.series_jet(s, max_m)?;
            Ok((v, e, Regime::Series))
        } else if sigma <= self.opts.sigma_left {
            let (v, e) = self.reflected_jet(s, max_m)?;
            Ok((v, e, Regime::Reflected))
        } else {
            let (v, e) = self.completed_regime_jet(s, max_m)?;
            Ok((v, e, Regime::Completed))
        }
    }

    /// Evaluate in a caller-chosen regime (cross-validation hook).
    pub fn eval_in_regime(&self, s: Complex64, m: usize, regime: Regime) -> Result<EvalResult> {
        if s.im < 0.0 {
            let r = self.eval_in_regime(s.conj(), m, regime)?;
            return Ok(EvalResult {
                value: r.value.conj(),
                ..r
            });
        }
        match regime {
            Regime::Series => self.dirichlet_eval(s, m),
            Regime::Completed => {
                let (v, e) = self.completed_regime_jet(s, m)?;
                Ok(EvalResult {
                    value: v[m],
                    error_estimate: e[m],
                    regime: Regime::Completed,
                })
            }
            Regime::Reflected => {
                let (v, e) = self.reflected_jet(s, m)?;
                Ok(EvalResult {
                    value: v[m],
                    error_estimate: e[m],
                    regime: Regime::Reflected,
                })
            }
        }
    }

    /// Dirichlet-series evaluation; requires `Re s >= 1 + margin`.
    pub fn dirichlet_eval(&self, s: Complex64, m: usize) -> Result<EvalResult> {
        if s.im < 0.0 {
            let r = self.dirichlet_eval(s.conj(), m)?;
            return Ok(EvalResult {
                value: r.value.conj(),
                ..r
            });
        }
        if s.re < 1.0 + self.opts.series_margin {
            return Err(Error::Regime(format!(
                "dirichlet_eval needs Re s >= {}, got {}",
                1.0 + self.opts.series_margin,
                s.re
            )));
        }
        let (v, e) = self.series_jet(s, m)?;
        Ok(EvalResult {
            value: v[m],
            error_estimate: e[m],
            regime: Regime::Series,
        })
    }

    fn series_jet(&self, s: Complex64, max_m: usize) -> Result<(Vec<Complex64>, Vec<f64>)> {
        let len = self.table.len();
        let sigma = s.re;
        // Shortest truncation meeting the target for the heaviest log power.
        let mut n_cut = len;
        let mut lo = 64usize;
        while lo < len {
            if dirichlet_tail_bound(lo, sigma, max_m) <= self.opts.target_tol {
                n_cut = lo;
                break;
            }
            lo *= 2;
        }
        let mut sums = vec![Accum::new(self.opts.compensated); max_m + 1];
        let mut mag = 0.0f64;
        for n in 1..=n_cut {
            let lam = self.table.lambda(n);
            if lam == 0.0 {
                continue;
            }
            let ln = self.ln_n[n];
            let base = (-s * ln).exp() * lam;
            let mut cur = base;
            sums[0].add(cur);
            mag += cur.norm();
            for j in 1..=max_m {
                cur *= -ln;
                sums[j].add(cur);
            }
        }
        let values: Vec<Complex64> = sums.iter().map(|a| a.value()).collect();
        let errors: Vec<f64> = (0..=max_m)
            .map(|j| {
                dirichlet_tail_bound(n_cut, sigma, j)
                    + 1e-16 * mag * self.ln_n[n_cut].powi(j as i32)
            })
            .collect();
        Ok((values, errors))
    }

    /// Euler product over primes up to `p_limit`; diagnostic oracle for the
    /// series regime (m = 0 only).
    pub fn euler_product_eval(&self, s: Complex64, p_limit: usize) -> Result<EvalResult> {
        if s.re < 1.5 {
            return Err(Error::Regime(format!(
                "euler_product_eval needs Re s >= 1.5, got {}",
                s.re
            )));
        }
        let plim = p_limit.min(self.table.len());
        let mut log_acc = Complex64::new(0.0, 0.0);
        for p in crate::coefficients::sieve_primes(plim) {
            let lam = self.table.lambda(p);
            let ps = (-s * self.ln_n[p]).exp();
            let factor = Complex64::new(1.0, 0.0) - lam * ps + ps * ps;
            log_acc -= factor.ln();
        }
        let sigma = s.re;
        // Tail of the log-product: 2 sum_{p>P} p^{-sigma} + O(p^{-2 sigma}),
        // bounded by integrals.
        let pl = plim as f64;
        let tail = 2.0 * pl.powf(1.0 - sigma) / ((sigma - 1.0) * pl.ln())
            + pl.powf(1.0 - 2.0 * sigma) / (2.0 * sigma - 1.0);
        let value = log_acc.exp();
        Ok(EvalResult {
            value,
            error_estimate: value.norm() * (tail + 1e-14),
            regime: Regime::Series,
        })
    }

    /// Jet of `chi_f` at s: quotient-of-gammas form away from the left
    /// half-plane, reflected product form (smooth across the trivial zeros)
    /// when `Re(s + c)` is small.
    pub fn chi_jet(&self, s: Complex64, r: usize) -> Result<DerivativeJet> {
        let c = self.shift();
        let eps = self.sign();
        let two_pi_pow = DerivativeJet::affine(
            s,
            Complex64::new(2.0 * LN_2PI, 0.0),
            Complex64::new(-LN_2PI, 0.0),
            r,
        )
        .exp();
        let a = Complex64::new(c + 1.0, 0.0) - s; // numerator gamma argument
        if (s + c).re >= 0.75 {
            let near_pole =
                |z: Complex64| z.im.abs() < 1e-6 && (z.re - z.re.round()).abs() < 1e-6 && z.re < 0.5;
            if near_pole(a) {
                return Err(Error::domain("chi_jet", format!("gamma pole at {a}")));
            }
            let num = log_gamma_jet(a, r)?.negate_variable();
            let den = log_gamma_jet(s + c, r)?;
            Ok(two_pi_pow
                .mul(&num.sub(&den).exp())
                .scale(Complex64::new(eps, 0.0)))
        } else {
            // chi = eps (2pi)^{2s-1} sin(pi(s+c)) Gamma(c+1-s) Gamma(1-c-s) / pi
            let num = log_gamma_jet(a, r)?.negate_variable().exp();
            let refl = log_gamma_jet(Complex64::new(1.0 - c, 0.0) - s, r)?
                .negate_variable()
                .exp();
            let sin_jet = sin_pi_shift_jet(s, c, r);
            Ok(two_pi_pow
                .mul(&sin_jet)
                .mul(&num)
                .mul(&refl)
                .scale(Complex64::new(eps / PI, 0.0)))
        }
    }

    /// Rotation angle for the completed representation at height t >= 0.
    fn rotation_angle(&self, w1: Complex64, w2: Complex64, t: f64) -> f64 {
        if t <= 4.0 {
            return 0.0;
        }
        let a1 = t.atan2(w1.re);
        let a2 = t.atan2(w2.re);
        a1.min(a2).min(PI / 2.0 - 0.08)
    }

    /// Completed-representation jet: valid for `Re(s+c) > 0.3` and
    /// `Re(c+1-s) > 0.3`; accurate throughout the critical strip.
    fn completed_regime_jet(
        &self,
        s: Complex64,
        max_m: usize,
    ) -> Result<(Vec<Complex64>, Vec<f64>)> {
        let c = self.shift();
        let w1 = s + c;
        let w2 = Complex64::new(c + 1.0, 0.0) - s;
        if w1.re < 0.3 || w2.re < 0.3 {
            return Err(Error::Regime(format!(
                "completed regime needs {} < Re s < {}, got {}",
                0.3 - c,
                c + 0.7,
                s.re
            )));
        }
        let t = s.im;
        let phi = self.rotation_angle(w1, w2, t);
        let rot1 = Complex64::from_polar(1.0, phi);
        let rot2 = rot1.conj();

        let lg1 = log_gamma_jet(w1, max_m)?;
        let lg2 = log_gamma_jet(w2, max_m)?;

        let mut s1 = vec![Accum::new(self.opts.compensated); max_m + 1];
        let mut s2 = vec![Accum::new(self.opts.compensated); max_m + 1];
        let mut mag1 = 0.0f64;
        let mut mag2 = 0.0f64;
        let transition = (1.15 * w1.norm() + 18.0) / (2.0 * PI);
        let mut small_streak = 0;
        let mut tail_skip = 0.0f64;
        let mut n = 0usize;
        loop {
            n += 1;
            if n > self.table.len() {
                tail_skip += 10.0 * self.opts.target_tol;
                break;
            }
            let lam = self.table.lambda(n);
            let x = 2.0 * PI * n as f64;
            let ln = self.ln_n[n];
            let mut t1max = 0.0f64;
            let mut t2max = 0.0f64;
            if lam != 0.0 {
                let q1 = regularized_upper_jet_with_lg(w1, x * rot1, max_m, &lg1)?;
                let q2 =
                    regularized_upper_jet_with_lg(w2, x * rot2, max_m, &lg2)?.negate_variable();
                let e1 = DerivativeJet::affine(
                    s,
                    Complex64::new(-ln, 0.0),
                    Complex64::new(0.0, 0.0),
                    max_m,
                )
                .exp()
                .scale(Complex64::new(lam, 0.0));
                let e2 = DerivativeJet::affine(
                    s,
                    Complex64::new(ln, 0.0),
                    Complex64::new(-ln, 0.0),
                    max_m,
                )
                .exp()
                .scale(Complex64::new(lam, 0.0));
                let term1 = e1.mul(&q1);
                let term2 = e2.mul(&q2);
                for j in 0..=max_m {
                    s1[j].add(term1.value(j));
                    s2[j].add(term2.value(j));
                }
                t1max = term1.value(0).norm();
                t2max = term2.value(0).norm();
                mag1 += t1max;
                mag2 += t2max;
            }
            if n as f64 > transition {
                let scale = (s1[0].value().norm() + s2[0].value().norm()).max(1e-3);
                if t1max + t2max < 0.02 * self.opts.target_tol * scale {
                    small_streak += 1;
                    if small_streak >= 3 {
                        tail_skip += (t1max + t2max) * 3.0;
                        break;
                    }
                } else {
                    small_streak = 0;
                }
            }
        }

        let chi = self.chi_jet(s, max_m)?;
        let s2jet = DerivativeJet::new(s, (0..=max_m).map(|j| s2[j].value()).collect());
        let cross = chi.mul(&s2jet);
        let mut values = Vec::with_capacity(max_m + 1);
        let mut errors = Vec::with_capacity(max_m + 1);
        let chi_scale = chi.value(0).norm();
        for j in 0..=max_m {
            values.push(s1[j].value() + cross.value(j));
            // Noise scales with the accumulated magnitudes; fold in the
            // log-power growth of higher orders crudely.
            let order_growth = (1.0 + (n as f64).ln()).powi(j as i32);
            errors.push(
                (3e-16 * (mag1 + chi_scale * mag2) + tail_skip) * order_growth
                    + 1e-12 * cross.value(j).norm(),
            );
        }
        Ok((values, errors))
    }

    fn reflected_jet(&self, s: Complex64, max_m: usize) -> Result<(Vec<Complex64>, Vec<f64>)> {
        let chi = self.chi_jet(s, max_m)?;
        let one_minus = Complex64::new(1.0, 0.0) - s;
        // Legs at 1 - s (Im <= 0 there when Im s >= 0; conjugate through).
        let conj_pt = if one_minus.im < 0.0 {
            one_minus.conj()
        } else {
            one_minus
        };
        let (mut legs, leg_errs) = if conj_pt.re >= self.series_sigma[max_m] {
            self.series_jet(conj_pt, max_m)?
        } else {
            self.completed_regime_jet(conj_pt, max_m)?
        };
        if one_minus.im < 0.0 {
            for x in &mut legs {
                *x = x.conj();
            }
        }
        let mut values = Vec::with_capacity(max_m + 1);
        let mut errors = Vec::with_capacity(max_m + 1);
        for m in 0..=max_m {
            let mut acc = Complex64::new(0.0, 0.0);
            let mut err = 0.0f64;
            for r in 0..=m {
                let b = binom_f64(m, r) * if r % 2 == 0 { 1.0 } else { -1.0 };
                let chi_d = chi.value(m - r);
                acc += b * chi_d * legs[r];
                err += b.abs()
                    * (chi_d.norm() * leg_errs[r] + 1e-11 * chi_d.norm() * legs[r].norm());
            }
            values.push(acc);
            errors.push(err);
        }
        Ok((values, errors))
    }

    /// `Lambda^(m)(s)` for `Lambda(s) = (2 pi)^{-(s+c)} Gamma(s+c) L(s)`.
    ///
    /// At moderate heights this is the direct sum
    /// `sum_n a(n) [I_m(s+c, 2 pi n) + (-1)^m eps I_m(c+1-s, 2 pi n)]`;
    /// higher up, where that split loses `e^{pi t/2}` digits to
    /// cancellation, it is reassembled from the L-jet and the gamma-factor
    /// jet, each factor carrying full relative accuracy.
    pub fn completed_derivative(&self, s: Complex64, m: usize) -> Result<EvalResult> {
        if s.im < 0.0 {
            let r = self.completed_derivative(s.conj(), m)?;
            return Ok(EvalResult {
                value: r.value.conj(),
                ..r
            });
        }
        if s.im <= 22.0 && s.re.abs() < 40.0 {
            self.completed_direct(s, m)
        } else {
            let (lam, err) = self.completed_from_ljet(s, m)?;
            Ok(EvalResult {
                value: lam,
                error_estimate: err,
                regime: Regime::Completed,
            })
        }
    }

    fn completed_direct(&self, s: Complex64, m: usize) -> Result<EvalResult> {
        let c = self.shift();
        let eps = self.sign();
        let w1 = s + c;
        let w2 = Complex64::new(c + 1.0, 0.0) - s;
        let parity = if m % 2 == 0 { 1.0 } else { -1.0 };
        let mut acc = Complex64::new(0.0, 0.0);
        let mut err = 0.0f64;
        let mut scale = 0.0f64;
        let mut small = 0usize;
        let mut n = 0usize;
        #[allow(unused_assignments)]
        let mut last_term = 0.0f64;
        loop {
            n += 1;
            if n > self.table.len() {
                return Err(Error::Contract(
                    "table too short for the completed sum".into(),
                ));
            }
            let a = self.table.a_f64(n);
            let x = 2.0 * PI * n as f64;
            let (i1, r1) = log_weighted_incomplete(w1, x, m)?;
            let (i2, r2) = log_weighted_incomplete(w2, x, m)?;
            let term = a * (i1 + parity * eps * i2);
            acc += term;
            scale = scale.max(acc.norm());
            err += (r1.error_estimate + r2.error_estimate) * a.abs();
            last_term = term.norm();
            // Beyond small n the term ratio is ~ 2^c e^{-2 pi}, far below 1;
            // two consecutive negligible terms end the sum.
            if n >= 4 && last_term < 1e-17 * scale.max(1e-12) {
                small += 1;
                if small >= 2 {
                    break;
                }
            } else {
                small = 0;
            }
        }
        Ok(EvalResult {
            value: acc,
            error_estimate: (err + last_term).max(3e-16 * scale),
            regime: Regime::Completed,
        })
    }

    fn completed_from_ljet(&self, s: Complex64, m: usize) -> Result<(Complex64, f64)> {
        let c = self.shift();
        let (lvals, lerrs, _) = self.eval_jet(s, m)?;
        // G(s) = (2 pi)^{-(s+c)} Gamma(s+c) as a jet.
        let g = DerivativeJet::affine(
            s,
            Complex64::new(-LN_2PI, 0.0),
            Complex64::new(-c * LN_2PI, 0.0),
            m,
        )
        .add(&log_gamma_jet(s + c, m)?)
        .exp();
        let ljet = DerivativeJet::new(s, lvals.clone());
        let lam = g.mul(&ljet);
        let gmag = g.value(0).norm();
        let err = gmag * (lerrs[m] + 1e-13 * lvals[m].norm());
        Ok((lam.value(m), err))
    }

    /// Values of `Lambda, Lambda', ..., Lambda^(max_m)` at s.
    pub fn completed_jet(&self, s: Complex64, max_m: usize) -> Result<Vec<Complex64>> {
        let mut out = Vec::with_capacity(max_m + 1);
        for m in 0..=max_m {
            out.push(self.completed_derivative(s, m)?.value);
        }
        Ok(out)
    }

    /// Normalized function: `F(s) = L^(m)(s) n_f^s / (lambda(n_f) (-ln n_f)^m)`
    /// for m >= 1; for m = 0, `F = L` itself.
    pub fn normalized_f(&self, s: Complex64, m: usize) -> Result<EvalResult> {
        let base = self.eval(s, m)?;
        if m == 0 {
            return Ok(base);
        }
        let pref = self.normalizer(s, m);
        Ok(EvalResult {
            value: base.value * pref,
            error_estimate: base.error_estimate * pref.norm(),
            regime: base.regime,
        })
    }

    /// The multiplier `n_f^s / (lambda(n_f) (-ln n_f)^m)` (1 for m = 0).
    pub fn normalizer(&self, s: Complex64, m: usize) -> Complex64 {
        if m == 0 {
            return Complex64::new(1.0, 0.0);
        }
        let nf = self.table.n_f();
        let lnf = self.ln_n[nf];
        let denom = self.table.lambda(nf) * (-lnf).powi(m as i32);
        (s * lnf).exp() / denom
    }

    /// Upper bound for |F(sigma + it) - 1|; the right zero-free certificate.
    pub fn fmz_majorant(&self, sigma: f64, m: usize) -> f64 {
        fmz_majorant(&self.table, sigma, m)
    }
}

/// Jet of `sin(pi (s + c))`.
fn sin_pi_shift_jet(s: Complex64, c: f64, order: usize) -> DerivativeJet {
    let z = (s + c) * PI;
    let (sn, cs) = (z.sin(), z.cos());
    let cycle = [sn, cs, -sn, -cs];
    let mut values = Vec::with_capacity(order + 1);
    let mut scale = 1.0;
    for j in 0..=order {
        values.push(cycle[j % 4] * scale);
        scale *= PI;
    }
    DerivativeJet::new(s, values)
}

fn binom_f64(n: usize, k: usize) -> f64 {
    let mut acc = 1.0f64;
    for i in 0..k {
        acc = acc * (n - i) as f64 / (i + 1) as f64;
    }
    acc
}

/// `|F - 1|` majorant at `Re s = sigma`: exact |lambda| for tabulated
/// indices, divisor-count majorant for the tail.
pub fn fmz_majorant(table: &CoefficientTable, sigma: f64, m: usize) -> f64 {
    let nf = table.n_f() as f64;
    let lnf = nf.ln();
    let lam_nf = table.lambda(table.n_f()).abs();
    let len = table.len();
    let mut sum = 0.0f64;
    for n in (table.n_f() + 1)..=len {
        let lam = table.lambda(n).abs();
        if lam == 0.0 {
            continue;
        }
        let ln = (n as f64).ln();
        sum += lam / lam_nf * (ln / lnf).powi(m as i32) * (nf / n as f64).powf(sigma);
    }
    let tail =
        dirichlet_tail_bound(len, sigma, m) * nf.powf(sigma) / (lam_nf * lnf.powi(m as i32));
    sum + tail
}

/// Smallest abscissa on a 0.05 grid where the |F - 1| majorant drops to 1/2;
/// right of it `L^(m)` cannot vanish.
pub fn certify_sigma_right(table: &CoefficientTable, m: usize) -> Result<f64> {
    let mut sigma = 1.05;
    while sigma <= 40.0 {
        if fmz_majorant(table, sigma, m) <= 0.5 {
            return Ok(sigma);
        }
        sigma += 0.05;
    }
    Err(Error::Contract(format!(
        "no certifiable zero-free abscissa below 40 for m = {m}"
    )))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::support::{evaluator, TEST_LEN};

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    /// High-precision reference values (weight, s, m, value); 20+ digits.
    const REFERENCE: [(u32, f64, f64, usize, f64, f64); 20] = [
        (12, 0.5, 14.0, 0, 0.01585292743603739642, 0.17194141626209782686),
        (12, 0.5, 40.0, 0, 0.11310510416343263861, -1.0437245717974070015),
        (12, 0.75, 75.0, 1, -3.515723864467578893, 0.31430369452915767929),
        (12, 1.2, 100.0, 0, 0.49503333608112400215, 0.053659579632007541521),
        (12, -0.5, 33.0, 0, -30.109732616646106121, 6.4953743197783960509),
        (12, 0.5, 30.0, 2, 11.896541898781872763, 1.5771584381977950477),
        (12, 2.0, 10.0, 1, 0.14515423603543874628, -0.18049445264144224306),
        (12, 0.3, 55.0, 3, -70.935360324097358723, 130.52920164083723815),
        (16, 0.5, 20.0, 0, 1.6273522829706155021, -2.5261982255738947282),
        (18, 0.5, 25.0, 1, -0.21206175538004259231, 3.7547261151482916727),
        (20, 0.6, 35.0, 0, 1.5314798327939124584, -2.0253401971371647064),
        (22, 0.5, 15.0, 2, 5.4471975222370263652, -0.76541545585519594072),
        (26, 0.5, 45.0, 0, 2.5306404949003961487, -0.66144334544903384494),
        (26, -1.0, 12.0, 1, 37.7570576742307638, -19.439296649535410436),
        (12, 3.0, 0.0, 0, 0.94858740746804404739, 0.0),
        (12, 3.0, 0.0, 1, 0.031075385756303665554, 0.0),
        (12, 0.5, 9.0, 0, 0.061366391709159113446, -0.21106045282347610471),
        (12, -3.5, 0.0, 0, 0.14637454209126598941, 0.0),
        (12, 0.5, 0.0, 0, 0.79212283864603056936, 0.0),
        (18, 0.5, 0.0, 0, 0.0, 0.0),
    ];

    #[test]
    fn matches_high_precision_references() {
        for &(k, re, im, m, vre, vim) in REFERENCE.iter() {
            let ev = evaluator(k, TEST_LEN);
            let got = ev.eval(c(re, im), m).unwrap();
            let want = c(vre, vim);
            let scale = want.norm().max(1.0);
            let err = (got.value - want).norm() / scale;
            assert!(
                err < 3e-8,
                "k={k} s={re}+{im}i m={m}: got {}, want {want}, rel {err:.2e}, regime {:?}",
                got.value,
                got.regime
            );
        }
    }

    #[test]
    fn series_limit_is_one() {
        let ev = evaluator(12, TEST_LEN);
        let v = ev.eval(c(30.0, 0.0), 0).unwrap();
        assert!((v.value - c(1.0, 0.0)).norm() < 1e-8);
        assert_eq!(v.regime, Regime::Series);
    }

    #[test]
    fn series_matches_brute_partial_sum() {
        // m = 1, k = 12, s = 3: direct summation over the full table.
        let ev = evaluator(12, TEST_LEN);
        let s = c(3.0, 0.0);
        let got = ev.dirichlet_eval(s, 1).unwrap();
        let mut brute = c(0.0, 0.0);
        for n in 1..=ev.table().len() {
            let lam = ev.table().lambda(n);
            let ln = (n as f64).ln();
            brute += lam * (-ln) * (-s * ln).exp();
        }
        assert!((got.value - brute).norm() <= got.error_estimate + 1e-12);
    }

    #[test]
    fn euler_product_agrees_with_series() {
        let ev = evaluator(12, TEST_LEN);
        for &(re, im) in &[(3.0, 0.0), (2.5, 7.0)] {
            let s = c(re, im);
            let a = ev.dirichlet_eval(s, 0).unwrap();
            let b = ev.euler_product_eval(s, TEST_LEN).unwrap();
            assert!(
                (a.value - b.value).norm() < 1e-7 * a.value.norm(),
                "s={s}: {} vs {}",
                a.value,
                b.value
            );
        }
        // single-factor truncation identity at P = 2
        let s = c(2.2, 1.0);
        let b = ev.euler_product_eval(s, 2).unwrap();
        let lam2 = ev.table().lambda(2);
        let p2 = (-s * 2f64.ln()).exp();
        let expect = (Complex64::new(1.0, 0.0) - lam2 * p2 + p2 * p2).finv();
        assert!((b.value - expect).norm() < 1e-13);
        // far right the product tends to 1
        let far = ev.euler_product_eval(c(40.0, 0.0), 1000).unwrap();
        assert!((far.value - c(1.0, 0.0)).norm() < 1e-11);
    }

    #[test]
    fn chi_functional_identities() {
        let ev = evaluator(12, TEST_LEN);
        // chi(s) chi(1-s) = 1
        for &(re, im) in &[(0.3, 2.0), (-1.2, 17.0), (0.9, 44.0), (2.5, 5.5)] {
            let s = c(re, im);
            let a = ev.chi_jet(s, 0).unwrap().value(0);
            let b = ev.chi_jet(c(1.0, 0.0) - s, 0).unwrap().value(0);
            assert!((a * b - c(1.0, 0.0)).norm() < 1e-9, "s={s}");
        }
        // |chi(1/2 + it)| = 1
        for &t in &[0.7, 5.0, 21.0, 63.0] {
            let v = ev.chi_jet(c(0.5, t), 0).unwrap().value(0);
            assert!((v.norm() - 1.0).abs() < 1e-10, "t={t}");
        }
    }

    #[test]
    fn chi_derivative_matches_finite_differences() {
        let ev = evaluator(12, TEST_LEN);
        let s = c(2.0, 3.0);
        let jet = ev.chi_jet(s, 1).unwrap();
        let h = 1e-4;
        let fd = (ev.chi_jet(s + h, 0).unwrap().value(0)
            - ev.chi_jet(s - h, 0).unwrap().value(0))
            / (2.0 * h);
        let ratio_jet = jet.value(1) / jet.value(0);
        let ratio_fd = fd / jet.value(0);
        assert!((ratio_jet - ratio_fd).norm() < 1e-7);
    }

    #[test]
    fn completed_exact_zero_for_odd_sign() {
        // Lambda(1/2) = 0 when eps = -1 (weights 18, 22, 26).
        for k in [18u32, 22, 26] {
            let ev = evaluator(k, TEST_LEN);
            let v = ev.completed_derivative(c(0.5, 0.0), 0).unwrap();
            assert!(v.value.norm() < 1e-10, "k={k}: {}", v.value);
        }
    }

    #[test]
    fn completed_matches_series_via_gamma_factor() {
        // Lambda(3) = (2 pi)^{-(3+c)} Gamma(3+c) L(3) for k = 12.
        let ev = evaluator(12, TEST_LEN);
        let s = c(3.0, 0.0);
        let lam = ev.completed_derivative(s, 0).unwrap();
        let l = ev.dirichlet_eval(s, 0).unwrap();
        let cshift = 5.5;
        let factor = ((-(s.re + cshift)) * LN_2PI
            + crate::special::log_gamma(s + cshift).unwrap().re)
            .exp();
        let expect = l.value * factor;
        assert!(
            (lam.value - expect).norm() < 1e-9 * expect.norm().max(1e-6),
            "{} vs {expect}",
            lam.value
        );
    }

    #[test]
    fn completed_functional_equation_symmetry() {
        // Lambda^(m)(s) = (-1)^m eps Lambda^(m)(1-s)
        for k in [12u32, 18] {
            let ev = evaluator(k, TEST_LEN);
            let eps = ev.table().spec().sign() as f64;
            for m in 0..=2usize {
                for &(re, im) in &[(0.3, 1.0), (0.8, 7.5), (1.5, 14.0)] {
                    let s = c(re, im);
                    let a = ev.completed_derivative(s, m).unwrap();
                    let b = ev.completed_derivative(c(1.0, 0.0) - s, m).unwrap();
                    let parity = if m % 2 == 0 { 1.0 } else { -1.0 };
                    let rhs = parity * eps * b.value;
                    let scale = a.value.norm().max(b.value.norm()).max(1e-12);
                    assert!(
                        (a.value - rhs).norm() / scale < 1e-10,
                        "k={k} m={m} s={s}: {} vs {rhs}",
                        a.value
                    );
                }
            }
        }
    }

    #[test]
    fn completed_large_t_consistent_with_direct() {
        // The jet-reassembled route and the direct split agree where both work.
        let ev = evaluator(12, TEST_LEN);
        for &t in &[12.0, 20.0] {
            let s = c(0.6, t);
            let direct = ev.completed_direct(s, 1).unwrap();
            let (viajet, _) = ev.completed_from_ljet(s, 1).unwrap();
            let scale = direct.value.norm().max(1e-14);
            assert!(
                (direct.value - viajet).norm() / scale < 1e-6,
                "t={t}: {} vs {viajet}",
                direct.value
            );
        }
    }

    #[test]
    fn dual_regime_agreement_at_test_point() {
        let ev = evaluator(12, TEST_LEN);
        let s = c(0.5, 14.0);
        let a = ev.eval_in_regime(s, 0, Regime::Completed).unwrap();
        let b = ev.eval_in_regime(s, 0, Regime::Reflected).unwrap();
        assert!((a.value - b.value).norm() < 1e-8);
    }

    #[test]
    fn functional_equation_residual() {
        // Both sides of the differentiated functional equation, computed
        // independently, across a deterministic grid.
        let ev = evaluator(12, TEST_LEN);
        let mut state = 0x2545f4914f6cdd1du64;
        let mut rnd = move || {
            state ^= state << 13;
            state ^= state >> 7;
            state ^= state << 17;
            (state >> 11) as f64 / (1u64 << 53) as f64
        };
        for m in 0..=2usize {
            for _ in 0..8 {
                let s = c(rnd() * 5.0 - 2.0, rnd() * 40.0 + 0.5);
                let lhs = ev.eval_in_regime(s, m, Regime::Completed);
                let lhs = match lhs {
                    Ok(v) => v,
                    Err(_) => continue,
                };
                let chi = ev.chi_jet(s, m).unwrap();
                let mut rhs = c(0.0, 0.0);
                for r in 0..=m {
                    let b = binom_f64(m, r) * if r % 2 == 0 { 1.0 } else { -1.0 };
                    let leg = ev.eval(c(1.0, 0.0) - s, r).unwrap();
                    rhs += b * chi.value(m - r) * leg.value;
                }
                let scale = lhs.value.norm().max(rhs.norm()).max(1e-10);
                assert!(
                    (lhs.value - rhs).norm() / scale < 1e-7,
                    "m={m} s={s}: {} vs {rhs}",
                    lhs.value
                );
            }
        }
    }

    #[test]
    fn conjugate_symmetry_and_real_axis() {
        let ev = evaluator(12, TEST_LEN);
        for m in 0..=2usize {
            let s = c(0.7, 13.0);
            let a = ev.eval(s, m).unwrap().value;
            let b = ev.eval(s.conj(), m).unwrap().value;
            assert!((a.conj() - b).norm() < 1e-14);
        }
        let v = ev.eval(c(-3.5, 0.0), 0).unwrap();
        assert!(v.value.im.abs() < 1e-10);
        assert!((v.value.re - 0.14637454209126598941).abs() < 1e-9);
    }

    #[test]
    fn regime_overlap_bands() {
        let ev = evaluator(12, TEST_LEN);
        // series vs completed on 1.25 <= Re s <= 1.5
        for &(re, t) in &[(1.25, 3.0), (1.4, 11.0), (1.5, 27.0)] {
            let s = c(re, t);
            let a = ev.eval_in_regime(s, 0, Regime::Series).unwrap();
            let b = ev.eval_in_regime(s, 0, Regime::Completed).unwrap();
            assert!(
                (a.value - b.value).norm() <= a.error_estimate + b.error_estimate,
                "s={s}"
            );
        }
        // completed vs reflected on -0.5 <= Re s <= 0
        for &(re, t) in &[(-0.5, 5.0), (-0.25, 18.0), (0.0, 33.0)] {
            let s = c(re, t);
            let a = ev.eval_in_regime(s, 1, Regime::Completed).unwrap();
            let b = ev.eval_in_regime(s, 1, Regime::Reflected).unwrap();
            let scale = a.value.norm().max(1.0);
            assert!(
                (a.value - b.value).norm() < 1e-8 * scale,
                "s={s}: {} vs {}",
                a.value,
                b.value
            );
        }
    }

    #[test]
    fn derivatives_match_cauchy_disc() {
        let ev = evaluator(12, TEST_LEN);
        let s = c(0.8, 16.0);
        let (jets, _, _) = ev.eval_jet(s, 3).unwrap();
        let radius = 0.25;
        let nodes = 64;
        for m in 1..=3usize {
            let mut acc = c(0.0, 0.0);
            for j in 0..nodes {
                let th = 2.0 * PI * j as f64 / nodes as f64;
                let z = s + radius * c(th.cos(), th.sin());
                let f = ev.eval(z, 0).unwrap().value;
                acc += f * c((m as f64 * th).cos(), -(m as f64 * th).sin());
            }
            let mut fact = 1.0;
            for i in 2..=m {
                fact *= i as f64;
            }
            let deriv = acc / nodes as f64 * fact / radius.powi(m as i32);
            let scale = jets[m].norm().max(1.0);
            assert!(
                (jets[m] - deriv).norm() / scale < 1e-7,
                "m={m}: jet {} vs disc {deriv}",
                jets[m]
            );
        }
    }

    #[test]
    fn normalized_f_behaviour() {
        let ev = evaluator(12, TEST_LEN);
        // far right: |F - 1| inside the majorant bound, and -> 1 further out
        // (the n = 3 term alone is ~5e-4 at Re s = 20, so 1e-6 needs Re s = 36)
        let f = ev.normalized_f(c(20.0, 0.0), 1).unwrap();
        assert!((f.value - c(1.0, 0.0)).norm() <= ev.fmz_majorant(20.0, 1));
        let f = ev.normalized_f(c(36.0, 0.0), 1).unwrap();
        assert!((f.value - c(1.0, 0.0)).norm() < 1e-6);
        // at the certified abscissa: |F - 1| <= 1/2 on a t-grid
        let sr = ev.sigma_right(1);
        for i in 0..10 {
            let t = i as f64 * 3.7;
            let f = ev.normalized_f(c(sr, t), 1).unwrap();
            assert!(
                (f.value - c(1.0, 0.0)).norm() <= 0.5 + 1e-6,
                "t={t}: {}",
                f.value
            );
        }
    }

    #[test]
    fn certified_abscissa_values() {
        let ev = evaluator(12, TEST_LEN);
        // The exact-coefficient majorant sits at 0.5032 at sigma = 3.50, so
        // the 0.05 grid certifies 3.55.
        let s0 = ev.sigma_right(0);
        assert!(s0 <= 3.6, "sigma_f,0 = {s0}");
        // monotone nondecreasing in m
        assert!(ev.sigma_right(1) >= s0);
        assert!(ev.sigma_right(2) >= ev.sigma_right(1));
    }

    #[test]
    fn dirichlet_eval_regime_guard() {
        let ev = evaluator(12, TEST_LEN);
        assert!(ev.dirichlet_eval(c(1.0, 3.0), 0).is_err());
        assert!(ev.euler_product_eval(c(1.2, 0.0), 100).is_err());
    }

    #[test]
    fn tail_bound_is_honest() {
        // The divisor-majorant tail bound dominates the observed tail.
        let ev = evaluator(12, TEST_LEN);
        let len = ev.table().len();
        for &(sigma, m) in &[(2.0, 0usize), (2.5, 1), (3.0, 2)] {
            let mut actual = 0.0f64;
            for n in 2000..=len {
                actual +=
                    ev.table().lambda(n).abs() * (n as f64).ln().powi(m as i32) * (n as f64).powf(-sigma);
            }
            let bound = dirichlet_tail_bound(2000, sigma, m);
            assert!(actual <= bound, "sigma={sigma} m={m}: {actual} vs {bound}");
        }
    }
}
