//! Shooting for the first-order system
//!
//! ```text
//! u' = |φ|^{p'-2} φ,   φ' = -λ r(x) |u|^{p-2} u,   u(a) = 0, φ(a) = 1,
//! ```
//!
//! where `φ = |u'|^{p-2} u'` is the flux. The polar angle `θ = atan2(u, φ)`
//! is strictly increasing in `x` (its derivative is `(|φ|^{p'} + λ r |u|^p) / (u² + φ²)`),
//! so the j-th zero of `u` is the point where `θ = jπ`. Eigenvalues solve
//! `θ(b; λ) = kπ`, which is strictly increasing in `λ`.

use std::f64::consts::PI;

use crate::error::{Error, Result};
use crate::plap::{EigenEstimate, Method, PExponent};
use crate::roots::illinois;
use crate::weights::{Coefficient, Interval, PeriodicWeight, Scale, WeightKind};

/// Fixed RK4 steps across the integration span, before splitting at weight jumps.
pub const STEPS_PER_INTERVAL: usize = 4096;

/// Default relative tolerance on eigenvalues.
pub const DEFAULT_TOL: f64 = 1e-8;

const PHI_FLOOR: f64 = 1e-14;
/// Relative widening of the sandwich bracket to absorb integrator error.
const BRACKET_SLACK: f64 = 1e-6;
/// Event location accuracy relative to the integration span.
const EVENT_TOL: f64 = 1e-12;
const MAX_ROOT_ITER: usize = 200;

pub(crate) struct Shooter<'a> {
    coef: Coefficient<'a>,
    p: f64,
    pc: f64,
    /// Coefficient is constant between consecutive jumps.
    piecewise: bool,
}

#[derive(Debug, Clone, Copy)]
struct State {
    u: f64,
    phi: f64,
    /// Unwrapped polar angle of `(φ, u)`.
    theta: f64,
}

impl State {
    fn start() -> Self {
        State {
            u: 0.0,
            phi: 1.0,
            theta: 0.0,
        }
    }

    fn advance_angle(&self, u: f64, phi: f64) -> f64 {
        let mut d = u.atan2(phi) - self.u.atan2(self.phi);
        if d <= -PI {
            d += 2.0 * PI;
        } else if d > PI {
            d -= 2.0 * PI;
        }
        self.theta + d
    }
}

pub(crate) enum Run {
    /// Reached the end of the span.
    Reached { theta: f64, u: f64, steps: usize },
    /// The angle reached the stop value at `x`.
    Stopped { x: f64 },
}

impl<'a> Shooter<'a> {
    pub(crate) fn new(coef: Coefficient<'a>, exponent: &PExponent) -> Self {
        let piecewise = coef.is_constant()
            || matches!(coef.weight().kind(), WeightKind::PiecewiseConstant { .. });
        Shooter {
            coef,
            p: exponent.p(),
            pc: exponent.conjugate(),
            piecewise,
        }
    }

    #[inline]
    fn rhs(&self, lambda_r: f64, u: f64, phi: f64) -> (f64, f64) {
        let du = phi.abs().max(PHI_FLOOR).powf(self.pc - 1.0).copysign(phi);
        let dphi = -lambda_r * u.abs().powf(self.p - 1.0).copysign(u);
        (du, dphi)
    }

    #[inline]
    fn rk4(&self, lambda: f64, seg_r: Option<f64>, x: f64, h: f64, u: f64, phi: f64) -> (f64, f64) {
        let r = |x: f64| seg_r.unwrap_or_else(|| self.coef.eval(x));
        let r0 = r(x);
        let rm = r(x + 0.5 * h);
        let r1 = r(x + h);
        let (k1u, k1p) = self.rhs(lambda * r0, u, phi);
        let (k2u, k2p) = self.rhs(lambda * rm, u + 0.5 * h * k1u, phi + 0.5 * h * k1p);
        let (k3u, k3p) = self.rhs(lambda * rm, u + 0.5 * h * k2u, phi + 0.5 * h * k2p);
        let (k4u, k4p) = self.rhs(lambda * r1, u + h * k3u, phi + h * k3p);
        (
            u + h / 6.0 * (k1u + 2.0 * k2u + 2.0 * k3u + k4u),
            phi + h / 6.0 * (k1p + 2.0 * k2p + 2.0 * k3p + k4p),
        )
    }

    /// Integrates from `x0` with `u = 0, φ = 1` to `x1` using steps of at most `h`,
    /// split exactly at coefficient jumps. With `stop = Some(T)` it returns the
    /// first point where the angle reaches `T`.
    pub(crate) fn run(
        &self,
        lambda: f64,
        x0: f64,
        x1: f64,
        h: f64,
        stop: Option<f64>,
    ) -> Result<Run> {
        let mut knots = Vec::with_capacity(8);
        knots.push(x0);
        knots.extend(self.coef.jumps_in(x0, x1));
        knots.push(x1);

        let mut state = State::start();
        let mut steps = 0usize;
        for seg in knots.windows(2) {
            let (s0, s1) = (seg[0], seg[1]);
            let len = s1 - s0;
            if len <= 0.0 {
                continue;
            }
            let seg_r = self.piecewise.then(|| self.coef.eval(0.5 * (s0 + s1)));
            let n = (len / h).ceil().max(1.0) as usize;
            let step = len / n as f64;
            for i in 0..n {
                let x = s0 + i as f64 * step;
                let (u, phi) = self.rk4(lambda, seg_r, x, step, state.u, state.phi);
                steps += 1;
                if !(u.is_finite() && phi.is_finite()) {
                    return Err(Error::StepFailure { x });
                }
                let theta = state.advance_angle(u, phi);
                if let Some(target) = stop {
                    if theta >= target {
                        let span = (x1 - x0).abs();
                        let x_hit = self.locate(lambda, seg_r, x, step, state, target, span);
                        return Ok(Run::Stopped { x: x_hit });
                    }
                }
                state = State { u, phi, theta };
            }
        }
        Ok(Run::Reached {
            theta: state.theta,
            u: state.u,
            steps,
        })
    }

    /// Bisection on the length of a single RK4 step from `from` until the angle hits `target`.
    #[allow(clippy::too_many_arguments)]
    fn locate(
        &self,
        lambda: f64,
        seg_r: Option<f64>,
        x: f64,
        step: f64,
        from: State,
        target: f64,
        span: f64,
    ) -> f64 {
        let (mut lo, mut hi) = (0.0, step);
        let tol = EVENT_TOL * span;
        while hi - lo > tol {
            let mid = 0.5 * (lo + hi);
            let (u, phi) = self.rk4(lambda, seg_r, x, mid, from.u, from.phi);
            if from.advance_angle(u, phi) >= target {
                hi = mid;
            } else {
                lo = mid;
            }
        }
        x + 0.5 * (lo + hi)
    }

    /// Position of the first zero of `u` after `start`, searched up to `start + cap`.
    pub(crate) fn first_zero(&self, lambda: f64, start: f64, cap: f64) -> Result<Option<f64>> {
        let h = cap / STEPS_PER_INTERVAL as f64;
        match self.run(lambda, start, start + cap, h, Some(PI))? {
            Run::Stopped { x, .. } => Ok(Some(x)),
            Run::Reached { .. } => Ok(None),
        }
    }
}

/// First eigenvalue of the weighted Dirichlet p-Laplacian on `interval`.
///
/// The root of `θ(b; λ) = π` is bracketed by `[μ_1(I)/θ_+, μ_1(I)/θ_-]` and
/// found by Illinois iteration to relative tolerance `tol`.
pub fn lambda1_shoot(
    weight: &PeriodicWeight,
    scale: Scale,
    interval: &Interval,
    p: f64,
    tol: f64,
) -> Result<EigenEstimate> {
    lambda_k_shoot(weight, scale, interval, p, 1, tol)
}

/// k-th eigenvalue by zero counting: the eigenfunction has `k - 1` interior zeros.
pub fn lambda_k_shoot(
    weight: &PeriodicWeight,
    scale: Scale,
    interval: &Interval,
    p: f64,
    k: u32,
    tol: f64,
) -> Result<EigenEstimate> {
    if !(tol > 0.0 && tol.is_finite()) {
        return Err(Error::invalid("tol", "must be > 0"));
    }
    if k < 1 {
        return Err(Error::invalid("k", "must be >= 1"));
    }
    if let Scale::Eps(eps) = scale {
        Scale::eps(eps)?;
    }
    let exponent = PExponent::new(p)?;
    let coef = Coefficient::new(weight, scale);
    let shooter = Shooter::new(coef, &exponent);
    let mu = exponent.mu(interval.len(), k);
    let (theta_minus, theta_plus) = coef.bounds();
    let lo = mu / theta_plus * (1.0 - BRACKET_SLACK);
    let hi = mu / theta_minus * (1.0 + BRACKET_SLACK);
    let h = interval.len() / STEPS_PER_INTERVAL as f64;
    let target = f64::from(k) * PI;

    let mut steps = 0usize;
    let mut miss = |lambda: f64| -> Result<f64> {
        match shooter.run(lambda, interval.a(), interval.b(), h, None)? {
            Run::Reached {
                theta, steps: s, ..
            } => {
                steps += s;
                Ok(theta - target)
            }
            Run::Stopped { .. } => unreachable!("no stop angle requested"),
        }
    };
    let f_lo = miss(lo)?;
    let f_hi = miss(hi)?;
    let root = illinois(&mut miss, lo, hi, f_lo, f_hi, tol, 1e-15, MAX_ROOT_ITER)?;
    log::debug!(
        "lambda_{k}: {} iterations, angle miss {:e}",
        root.iterations,
        root.fx
    );
    let lambda = root.x;
    let residual = match shooter.run(lambda, interval.a(), interval.b(), h, None)? {
        Run::Reached { u, steps: s, .. } => {
            steps += s;
            u.abs()
        }
        Run::Stopped { .. } => unreachable!("no stop angle requested"),
    };
    Ok(EigenEstimate {
        lambda,
        method: Method::Shooting,
        residual,
        evaluations: steps,
    })
}
