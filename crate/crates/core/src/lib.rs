//! Numerical engine for L-functions attached to level-1 holomorphic Hecke
//! eigenforms and their derivatives.
//!
//! The crate is organized in five layers:
//!
//! - [`coefficients`]: exact Fourier coefficients of the six one-dimensional
//!   level-1 eigenforms (weights 12, 16, 18, 20, 22, 26), normalization,
//!   Hecke/Satake arithmetic, Rankin partial sums and a text cache format.
//! - [`special`]: complex log-gamma and polygamma, derivative jets and
//!   complete Bell polynomials, regularized incomplete gamma with
//!   jet-valued parameters, log-weighted incomplete integrals and adaptive
//!   quadrature.
//! - [`lfunction`]: regime-dispatched evaluation of `L_f^(m)(s)` anywhere in
//!   the plane (Dirichlet series, smoothed completed representation,
//!   reflection through the functional equation), the gamma factor
//!   `chi_f(s)` with derivatives, and the normalized function `F(s)`.
//! - [`zeros`]: winding-number zero counts on rectangles, subdivision
//!   isolation with Newton refinement, zero-free-region certification,
//!   real-axis scans, and the two-sided Littlewood identity check.
//! - [`asymptotics`]: counting main terms, coefficient power sums with
//!   Rankin tails, numerical mean squares, and zero-density envelopes.

pub mod asymptotics;
pub mod coefficients;
pub mod error;
pub mod lfunction;
pub mod special;
pub mod zeros;

pub use error::{Error, Result};

/// Complex double used throughout.
pub type Complex64 = num_complex::Complex<f64>;

/// Shared lazily-built evaluators for tests and the verification suite.
pub mod support {
    use std::collections::HashMap;
    use std::sync::{Arc, Mutex, OnceLock};

    use crate::coefficients::{CoefficientTable, EigenformSpec};
    use crate::lfunction::{EvalOptions, LFunctionEvaluator};

    type Slot = Arc<OnceLock<Arc<LFunctionEvaluator>>>;

    fn registry() -> &'static Mutex<HashMap<(u32, usize), Slot>> {
        static REG: OnceLock<Mutex<HashMap<(u32, usize), Slot>>> = OnceLock::new();
        REG.get_or_init(|| Mutex::new(HashMap::new()))
    }

    /// Evaluator for `weight` over a table of length `n`, built once per
    /// process and shared. Builds run outside the registry lock so distinct
    /// keys construct concurrently.
    pub fn evaluator(weight: u32, n: usize) -> Arc<LFunctionEvaluator> {
        let slot = {
            let mut reg = registry().lock().unwrap();
            Arc::clone(reg.entry((weight, n)).or_default())
        };
        Arc::clone(slot.get_or_init(|| {
            let spec = EigenformSpec::new(weight).expect("admissible weight");
            let table = CoefficientTable::build(spec, n).expect("table build");
            Arc::new(
                LFunctionEvaluator::new(table, EvalOptions::default()).expect("evaluator build"),
            )
        }))
    }

    /// Default desk-scale table length for tests.
    pub const TEST_LEN: usize = 20_000;
}
