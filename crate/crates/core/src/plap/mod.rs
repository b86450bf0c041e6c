//! First eigenvalues of the weighted Dirichlet p-Laplacian on an interval,
//!
//! ```text
//! -(|u'|^{p-2} u')' = λ r(x) |u|^{p-2} u  on (a, b),   u(a) = u(b) = 0,
//! ```
//!
//! computed by shooting, with a discrete Rayleigh-quotient minimizer as an
//! independent check and the explicit constant-weight eigenvalues.

mod rayleigh;
mod shoot;

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::quad;
use crate::weights::Interval;

pub use rayleigh::lambda1_rayleigh;
pub(crate) use shoot::Shooter;
pub use shoot::{lambda1_shoot, lambda_k_shoot, DEFAULT_TOL, STEPS_PER_INTERVAL};

/// An exponent `1 < p < ∞` with its cached half-period `π_p` and conjugate `p' = p/(p-1)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PExponent {
    p: f64,
    pi_p: f64,
    conjugate: f64,
}

impl PExponent {
    pub fn new(p: f64) -> Result<Self> {
        Ok(PExponent {
            p,
            pi_p: pi_p(p)?,
            conjugate: p / (p - 1.0),
        })
    }

    pub fn p(&self) -> f64 {
        self.p
    }

    pub fn pi_p(&self) -> f64 {
        self.pi_p
    }

    pub fn conjugate(&self) -> f64 {
        self.conjugate
    }

    /// `μ_k(I) = π_p^p k^p |I|^{-p}` without re-validating `p`.
    pub fn mu(&self, len: f64, k: u32) -> f64 {
        (self.pi_p * f64::from(k) / len).powf(self.p)
    }
}

impl<'de> Deserialize<'de> for PExponent {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let p = f64::deserialize(d)?;
        PExponent::new(p).map_err(serde::de::Error::custom)
    }
}

fn check_p(p: f64) -> Result<()> {
    if !(p > 1.0 && p.is_finite()) {
        return Err(Error::invalid("p", format!("need 1 < p < inf, got {p}")));
    }
    Ok(())
}

/// `2 ∫_0^1 (1 - s^p)^{-1/p} ds`, the half-period of the solution of
/// `|w'|^p + |w|^p = 1`, `w(0) = 0`.
///
/// The endpoint singularity at `s = 1` is removed by `s = 1 - v^{p'}`.
pub fn sin_p_half_period(p: f64) -> Result<f64> {
    check_p(p)?;
    let pc = p / (p - 1.0);
    let integrand = |v: f64| {
        let w = v.powf(pc);
        // 1 - (1 - w)^p without cancellation
        let gap = -(p * (-w).ln_1p()).exp_m1();
        pc * v.powf(pc - 1.0) * gap.powf(-1.0 / p)
    };
    Ok(2.0 * quad::integrate(integrand, 0.0, 1.0, 1e-15))
}

/// `π_p = 2 (p-1)^{1/p} ∫_0^1 (1 - s^p)^{-1/p} ds`; `π_2 = π`.
pub fn pi_p(p: f64) -> Result<f64> {
    Ok((p - 1.0).powf(1.0 / p) * sin_p_half_period(p)?)
}

/// Beta-function closed form of [`pi_p`], `2 (p-1)^{1/p} π / (p sin(π/p))`.
pub fn pi_p_closed_form(p: f64) -> Result<f64> {
    check_p(p)?;
    Ok((p - 1.0).powf(1.0 / p) * 2.0 * PI / (p * (PI / p).sin()))
}

/// `μ_k(I) = π_p^p k^p |I|^{-p}`, the k-th Dirichlet eigenvalue with unit weight.
pub fn mu_k(interval: &Interval, k: u32, p: f64) -> Result<f64> {
    if k < 1 {
        return Err(Error::invalid("k", "must be >= 1"));
    }
    Ok(PExponent::new(p)?.mu(interval.len(), k))
}

/// The k-th eigenvalue for the constant weight `c`: `μ_k(I) / c`.
pub fn lambda_k_constant(c: f64, interval: &Interval, k: u32, p: f64) -> Result<f64> {
    if !(c > 0.0 && c.is_finite()) {
        return Err(Error::invalid("c", "constant weight must be > 0"));
    }
    Ok(mu_k(interval, k, p)? / c)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Method {
    Shooting,
    Rayleigh,
    ClosedForm,
}

/// A computed eigenvalue with diagnostics.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EigenEstimate {
    pub lambda: f64,
    pub method: Method,
    /// Endpoint miss `|u(b)|` (shooting, with `|u'(a)| = 1`) or the last
    /// relative change of the quotient (Rayleigh).
    pub residual: f64,
    /// ODE steps (shooting) or outer iterations (Rayleigh).
    pub evaluations: usize,
}

impl EigenEstimate {
    /// Whether `μ_k(I)/θ_+ - slack <= λ <= μ_k(I)/θ_- + slack` with `slack = rel * λ`.
    pub fn within_sandwich(&self, mu: f64, theta_minus: f64, theta_plus: f64, rel: f64) -> bool {
        let slack = rel * self.lambda.abs();
        self.lambda >= mu / theta_plus - slack && self.lambda <= mu / theta_minus + slack
    }
}
