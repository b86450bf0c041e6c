//! Fučík eigencurves of the one-dimensional weighted p-Laplacian and checks of
//! their homogenization rates.
//!
//! * [`weights`]: 1-periodic cell weights `r(y)` and their rescalings `r(x/ε)`.
//! * [`plap`]: first eigenvalues by shooting, the discrete Rayleigh oracle, `π_p`.
//! * [`fucik1d`]: curve points `(α(s), β(s))` from the optimal-partition minimax.
//! * [`rates`]: ε-sweeps against the explicit rate constants.
//! * [`cli`] and [`report`]: the experiment files behind the `fucik` binary.

pub mod cli;
pub mod error;
pub mod fucik1d;
pub mod plap;
mod quad;
pub mod rates;
pub mod report;
mod roots;
pub mod weights;

pub use error::{Error, Result};
pub use fucik1d::{closed_form_constant, gamma, CurvePoint, FucikProblem, Partition, Role, Sign};
pub use plap::{
    lambda1_rayleigh, lambda1_shoot, lambda_k_constant, lambda_k_shoot, mu_k, pi_p, EigenEstimate,
    Method, PExponent,
};
pub use rates::{
    constant_c_1d, constant_c_nd, constant_cr, sweep_eigen, sweep_fucik, FucikSweep, RateConstant,
    RateRecord, SweepReport,
};
pub use weights::{Interval, PeriodicWeight, Scale, WeightKind};
