//! Complex special functions and derivative calculus.
//!
//! - [`jet`]: derivative jets, Leibniz arithmetic, complete Bell polynomials
//! - [`gamma`]: log-gamma and polygamma via Stirling with upward recurrence
//! - [`incgamma`]: regularized incomplete gamma with jets, log-weighted
//!   incomplete integrals
//! - [`quad`]: adaptive Gauss-Kronrod rules and the decaying-tail integrator

pub mod gamma;
pub mod incgamma;
pub mod jet;
pub mod quad;

pub use gamma::{gamma, log_gamma, log_gamma_jet, polygamma_jet};
pub use incgamma::{log_weighted_incomplete, regularized_upper_jet, regularized_upper_jet_with_lg};
pub use jet::{bell_ratio, DerivativeJet};
pub use quad::{integrate_adaptive, integrate_decaying, QuadratureResult};
