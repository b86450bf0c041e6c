//! Discrete Rayleigh-quotient minimization over continuous piecewise-linear
//! functions vanishing at the endpoints.
//!
//! The minimizer is found by inverse iteration: each step solves the discrete
//! problem `-Δ_p v = r |u|^{p-2} u` exactly (in 1D the flux is an explicit
//! cumulative sum up to one scalar fixed by `v(b) = 0`) and renormalizes.

use std::f64::consts::PI;

use crate::error::{Error, Result};
use crate::plap::{EigenEstimate, Method, PExponent};
use crate::weights::{Coefficient, Interval, PeriodicWeight, Scale, WeightKind};

const STATIONARITY: f64 = 1e-10;
const MAX_ITER: usize = 5000;

// 5-point Gauss–Legendre on [0, 1].
const GL_X: [f64; 5] = [
    0.046_910_077_030_668,
    0.230_765_344_947_158_45,
    0.5,
    0.769_234_655_052_841_6,
    0.953_089_922_969_332,
];
const GL_W: [f64; 5] = [
    0.118_463_442_528_094_54,
    0.239_314_335_249_683_23,
    0.284_444_444_444_444_45,
    0.239_314_335_249_683_23,
    0.118_463_442_528_094_54,
];

/// Quadrature point inside cell `cell` at local coordinate `t`, weight includes `r(x)`.
struct QPoint {
    cell: usize,
    t: f64,
    w: f64,
}

struct Discretization {
    n: usize,
    h: f64,
    p: f64,
    pc: f64,
    points: Vec<QPoint>,
}

impl Discretization {
    fn new(coef: Coefficient<'_>, interval: &Interval, exponent: &PExponent, n: usize) -> Self {
        let h = interval.len() / n as f64;
        let smooth_period = match (coef.scale(), coef.weight().kind()) {
            (Scale::Eps(eps), WeightKind::Trigonometric { frequency, .. }) => {
                Some(eps / f64::from(*frequency))
            }
            _ => None,
        };
        let piecewise = smooth_period.is_none();
        let mut points = Vec::with_capacity(n * GL_X.len());
        for cell in 0..n {
            let x0 = interval.a() + cell as f64 * h;
            let x1 = x0 + h;
            let mut knots = vec![x0];
            knots.extend(coef.jumps_in(x0, x1));
            knots.push(x1);
            for seg in knots.windows(2) {
                let len = seg[1] - seg[0];
                let pieces = match smooth_period {
                    Some(period) => ((8.0 * len / period).ceil() as usize).max(1),
                    None => 1,
                };
                let dl = len / pieces as f64;
                for j in 0..pieces {
                    let s0 = seg[0] + j as f64 * dl;
                    let seg_r = piecewise.then(|| coef.eval(s0 + 0.5 * dl));
                    for (gx, gw) in GL_X.iter().zip(GL_W) {
                        let x = s0 + gx * dl;
                        let r = seg_r.unwrap_or_else(|| coef.eval(x));
                        points.push(QPoint {
                            cell,
                            t: (x - x0) / h,
                            w: gw * dl * r,
                        });
                    }
                }
            }
        }
        Discretization {
            n,
            h,
            p: exponent.p(),
            pc: exponent.conjugate(),
            points,
        }
    }

    #[inline]
    fn value(u: &[f64], q: &QPoint) -> f64 {
        u[q.cell] * (1.0 - q.t) + u[q.cell + 1] * q.t
    }

    /// `∫ r |u_h|^p`.
    fn denominator(&self, u: &[f64]) -> f64 {
        self.points
            .iter()
            .map(|q| q.w * Self::value(u, q).abs().powf(self.p))
            .sum()
    }

    /// `∫ |u_h'|^p`.
    fn numerator(&self, u: &[f64]) -> f64 {
        u.windows(2)
            .map(|w| (w[1] - w[0]).abs().powf(self.p))
            .sum::<f64>()
            * self.h.powf(1.0 - self.p)
    }

    /// `F_i = ∫ r |u_h|^{p-2} u_h ψ_i` at interior nodes (index 0 and n are zero).
    fn load(&self, u: &[f64]) -> Vec<f64> {
        let mut f = vec![0.0; self.n + 1];
        for q in &self.points {
            let v = Self::value(u, q);
            let g = q.w * v.abs().powf(self.p - 1.0).copysign(v);
            f[q.cell] += g * (1.0 - q.t);
            f[q.cell + 1] += g * q.t;
        }
        f[0] = 0.0;
        f[self.n] = 0.0;
        f
    }

    /// Solves the discrete `-Δ_p v = F` with `v_0 = v_n = 0`.
    fn solve(&self, load: &[f64]) -> Vec<f64> {
        let n = self.n;
        // flux on cell j is φ_j = φ_0 - S_j, S_j = Σ_{l=1}^{j} F_l
        let mut partial = vec![0.0; n];
        for j in 1..n {
            partial[j] = partial[j - 1] + load[j];
        }
        let inv = |phi: f64| phi.abs().powf(self.pc - 1.0).copysign(phi);
        let total = |phi0: f64| partial.iter().map(|s| inv(phi0 - s)).sum::<f64>();
        let mut lo = partial.iter().copied().fold(f64::INFINITY, f64::min);
        let mut hi = partial.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        for _ in 0..200 {
            let mid = 0.5 * (lo + hi);
            if mid <= lo || mid >= hi {
                break;
            }
            if total(mid) > 0.0 {
                hi = mid;
            } else {
                lo = mid;
            }
        }
        let phi0 = 0.5 * (lo + hi);
        let mut v = vec![0.0; n + 1];
        for j in 0..n {
            v[j + 1] = v[j] + self.h * inv(phi0 - partial[j]);
        }
        // the closing constraint holds to bisection accuracy; pin the endpoint
        v[n] = 0.0;
        v
    }

    fn normalize(&self, u: &mut [f64]) -> f64 {
        let d = self.denominator(u);
        let s = d.powf(-1.0 / self.p);
        u.iter_mut().for_each(|x| *x *= s);
        self.numerator(u)
    }
}

/// First eigenvalue as the minimum of the discrete Rayleigh quotient
/// `∫|u'|^p / ∫ r|u|^p` over P1 functions on `grid_n` uniform cells.
///
/// Converges to λ_1 from above as `grid_n` grows.
pub fn lambda1_rayleigh(
    weight: &PeriodicWeight,
    scale: Scale,
    interval: &Interval,
    p: f64,
    grid_n: usize,
) -> Result<EigenEstimate> {
    if grid_n < 16 {
        return Err(Error::invalid("grid_n", "must be >= 16"));
    }
    if let Scale::Eps(eps) = scale {
        Scale::eps(eps)?;
    }
    let exponent = PExponent::new(p)?;
    let disc = Discretization::new(Coefficient::new(weight, scale), interval, &exponent, grid_n);

    let mut u: Vec<f64> = (0..=grid_n)
        .map(|i| (PI * i as f64 / grid_n as f64).sin())
        .collect();
    let mut quotient = disc.normalize(&mut u);
    let mut change = f64::INFINITY;
    for it in 1..=MAX_ITER {
        let load = disc.load(&u);
        let mut v = disc.solve(&load);
        let mut next = disc.normalize(&mut v);
        if next > quotient {
            let mut damped: Vec<f64> = u.iter().zip(&v).map(|(a, b)| 0.5 * (a + b)).collect();
            let q = disc.normalize(&mut damped);
            if q < next {
                v = damped;
                next = q;
            }
        }
        change = (quotient - next).abs() / next;
        if next <= quotient {
            u = v;
            quotient = next;
        }
        if change <= STATIONARITY {
            return Ok(EigenEstimate {
                lambda: quotient,
                method: Method::Rayleigh,
                residual: change,
                evaluations: it,
            });
        }
    }
    Err(Error::NonConvergence {
        iterations: MAX_ITER,
        change,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn unit_weight_matches_pi_squared() {
        let w = PeriodicWeight::constant(1.0).unwrap();
        let est = lambda1_rayleigh(&w, Scale::Homogenized, &Interval::unit(), 2.0, 512).unwrap();
        assert!((est.lambda - PI * PI).abs() < 1e-4, "{}", est.lambda);
        assert!(est.lambda >= PI * PI);
        assert_eq!(est.method, Method::Rayleigh);
    }

    #[test]
    fn homogenized_two_phase() {
        let w = PeriodicWeight::piecewise(vec![0.5], vec![1.0, 3.0]).unwrap();
        let est = lambda1_rayleigh(&w, Scale::Homogenized, &Interval::unit(), 2.0, 1024).unwrap();
        assert_relative_eq!(est.lambda, PI * PI / 2.0, max_relative = 1e-3);
    }

    #[test]
    fn decreases_towards_the_limit_under_refinement() {
        let w = PeriodicWeight::trigonometric(2.0, 1.0, 1).unwrap();
        let i = Interval::unit();
        let coarse = lambda1_rayleigh(&w, Scale::Eps(0.5), &i, 3.0, 64).unwrap();
        let fine = lambda1_rayleigh(&w, Scale::Eps(0.5), &i, 3.0, 256).unwrap();
        assert!(fine.lambda < coarse.lambda);
    }

    #[test]
    fn rejects_coarse_grid() {
        let w = PeriodicWeight::constant(1.0).unwrap();
        assert!(lambda1_rayleigh(&w, Scale::Homogenized, &Interval::unit(), 2.0, 8).is_err());
    }
}
