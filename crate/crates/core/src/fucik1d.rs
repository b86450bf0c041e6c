//! Points on the Fučík eigencurves `C_k^±` of
//!
//! ```text
//! -(|u'|^{p-2}u')' = α m (u^+)^{p-1} - β n (u^-)^{p-1}  on (a, b),  u(a) = u(b) = 0
//! ```
//!
//! through the optimal-partition minimax
//!
//! ```text
//! c_{k+1}^±(s) = inf over a = t_0 < … < t_{k+1} = b of max_i { s λ_1(m, I_+), λ_1(n, I_-) },
//! ```
//!
//! where the k+1 subintervals alternate in sign starting with `±`. The point on
//! the ray of slope `s` is `(α, β) = (c/s, c)`.
//!
//! The infimum is computed on the level `c`: for a fixed level the
//! earliest-finish greedy sweep (lay down the shortest admissible interval, then
//! the next one from its end) reaches furthest to the left, because `λ_1` is
//! strictly decreasing under domain inclusion. The greedy end point is
//! continuous and decreasing in `c`, and the optimal level is where it hits `b`.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::plap::{PExponent, Shooter, DEFAULT_TOL};
use crate::roots::illinois;
use crate::weights::{Coefficient, Interval, PeriodicWeight, Scale};

/// Admissible range of ray slopes.
pub const S_MIN: f64 = 1e-3;
pub const S_MAX: f64 = 1e3;

/// Relative widening of the level and length brackets to absorb integrator error.
const BRACKET_SLACK: f64 = 1e-6;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Sign {
    Plus,
    Minus,
}

impl Sign {
    pub fn flip(self) -> Sign {
        match self {
            Sign::Plus => Sign::Minus,
            Sign::Minus => Sign::Plus,
        }
    }

    /// Sign carried by the `i`-th subinterval (0-based) when the first one has sign `self`.
    pub fn at(self, i: usize) -> Sign {
        if i.is_multiple_of(2) {
            self
        } else {
            self.flip()
        }
    }
}

/// Which weight sits on an interval.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Role {
    /// Positive nodal domains: weight `m`, slope factor `s`.
    M,
    /// Negative nodal domains: weight `n`, factor 1.
    N,
}

impl From<Sign> for Role {
    fn from(sign: Sign) -> Self {
        match sign {
            Sign::Plus => Role::M,
            Sign::Minus => Role::N,
        }
    }
}

/// Breakpoints `a = t_0 < t_1 < … < t_{k+1} = b` with alternating signs.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Partition {
    breakpoints: Vec<f64>,
    sign_start: Sign,
}

impl Partition {
    pub fn new(breakpoints: Vec<f64>, sign_start: Sign) -> Result<Self> {
        if breakpoints.len() < 2 {
            return Err(Error::invalid(
                "breakpoints",
                "need at least the two endpoints",
            ));
        }
        if breakpoints.windows(2).any(|w| !(w[0] < w[1])) {
            return Err(Error::invalid("breakpoints", "must be strictly increasing"));
        }
        Ok(Partition {
            breakpoints,
            sign_start,
        })
    }

    pub fn breakpoints(&self) -> &[f64] {
        &self.breakpoints
    }

    pub fn sign_start(&self) -> Sign {
        self.sign_start
    }

    /// Number of interior zeros.
    pub fn k(&self) -> usize {
        self.breakpoints.len() - 2
    }

    /// `(t_{i-1}, t_i, sign)` for every subinterval.
    pub fn intervals(&self) -> impl Iterator<Item = (f64, f64, Sign)> + '_ {
        self.breakpoints
            .windows(2)
            .enumerate()
            .map(move |(i, w)| (w[0], w[1], self.sign_start.at(i)))
    }
}

/// One point of `C_k^±` on the ray of slope `s`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CurvePoint {
    pub k: u32,
    pub sign: Sign,
    pub s: f64,
    pub c: f64,
    pub alpha: f64,
    pub beta: f64,
    pub partition: Partition,
    /// The partition characterization is established for `p >= 2`; smaller `p`
    /// is computed all the same and flagged.
    pub outside_stated_validity: bool,
}

impl CurvePoint {
    fn from_level(k: u32, sign: Sign, s: f64, c: f64, partition: Partition, p: f64) -> Self {
        CurvePoint {
            k,
            sign,
            s,
            c,
            alpha: c / s,
            beta: c,
            partition,
            outside_stated_validity: p < 2.0,
        }
    }
}

/// `γ(s) = 1` for `s >= 1`, `1/s` for `s < 1`.
pub fn gamma(s: f64) -> Result<f64> {
    if !(s > 0.0 && s.is_finite()) {
        return Err(Error::invalid("s", "must be finite and > 0"));
    }
    Ok(if s >= 1.0 { 1.0 } else { 1.0 / s })
}

fn check_slope(s: f64) -> Result<()> {
    if !(S_MIN..=S_MAX).contains(&s) {
        return Err(Error::invalid(
            "s",
            format!("must lie in [{S_MIN}, {S_MAX}], got {s}"),
        ));
    }
    Ok(())
}

/// The data of a one-dimensional Fučík problem at a fixed scale.
#[derive(Debug, Clone)]
pub struct FucikProblem {
    m: PeriodicWeight,
    n: PeriodicWeight,
    scale: Scale,
    interval: Interval,
    exponent: PExponent,
    tol: f64,
}

impl FucikProblem {
    pub fn new(
        m: PeriodicWeight,
        n: PeriodicWeight,
        scale: Scale,
        interval: Interval,
        p: f64,
    ) -> Result<Self> {
        if let Scale::Eps(eps) = scale {
            Scale::eps(eps)?;
        }
        Ok(FucikProblem {
            m,
            n,
            scale,
            interval,
            exponent: PExponent::new(p)?,
            tol: DEFAULT_TOL,
        })
    }

    /// Relative tolerance on the level `c`.
    pub fn with_tol(mut self, tol: f64) -> Result<Self> {
        if !(tol > 0.0 && tol.is_finite()) {
            return Err(Error::invalid("tol", "must be > 0"));
        }
        self.tol = tol;
        Ok(self)
    }

    /// The same problem at the homogenized limit.
    pub fn homogenized(&self) -> Self {
        FucikProblem {
            scale: Scale::Homogenized,
            ..self.clone()
        }
    }

    /// The problem with `m` and `n` exchanged.
    pub fn swapped(&self) -> Self {
        FucikProblem {
            m: self.n.clone(),
            n: self.m.clone(),
            ..self.clone()
        }
    }

    pub fn m(&self) -> &PeriodicWeight {
        &self.m
    }

    pub fn n(&self) -> &PeriodicWeight {
        &self.n
    }

    pub fn scale(&self) -> Scale {
        self.scale
    }

    pub fn interval(&self) -> &Interval {
        &self.interval
    }

    pub fn p(&self) -> f64 {
        self.exponent.p()
    }

    pub fn exponent(&self) -> &PExponent {
        &self.exponent
    }

    pub fn tol(&self) -> f64 {
        self.tol
    }

    /// Joint bounds `(min θ_-, max θ_+)` over both weights.
    pub fn theta_bounds(&self) -> (f64, f64) {
        (
            self.m.theta_minus().min(self.n.theta_minus()),
            self.m.theta_plus().max(self.n.theta_plus()),
        )
    }

    fn weight(&self, role: Role) -> &PeriodicWeight {
        match role {
            Role::M => &self.m,
            Role::N => &self.n,
        }
    }

    /// Length `ℓ` with `λ_1(weight, (start, start + ℓ)) = target / factor`, without
    /// checking the domain end.
    ///
    /// The solution started at `start` with eigenparameter `Λ` has its first zero
    /// exactly where `Λ` becomes the first eigenvalue, so a single shot suffices.
    fn reach(&self, role: Role, factor: f64, start: f64, target: f64) -> Result<f64> {
        let weight = self.weight(role);
        let level = target / factor;
        let cap = self.exponent.pi_p()
            * (weight.theta_minus() * level).powf(-1.0 / self.p())
            * (1.0 + BRACKET_SLACK);
        let shooter = Shooter::new(Coefficient::new(weight, self.scale), &self.exponent);
        match shooter.first_zero(level, start, cap)? {
            Some(x) => Ok(x - start),
            None => {
                let lo = self.exponent.pi_p() * (weight.theta_plus() * level).powf(-1.0 / self.p());
                Err(Error::BracketFailure {
                    lo,
                    hi: cap,
                    f_lo: f64::NAN,
                    f_hi: f64::NAN,
                })
            }
        }
    }

    /// Minimal `ℓ > 0` with `factor · λ_1(weight, (start, start + ℓ)) <= target`.
    pub fn min_length(&self, role: Role, factor: f64, start: f64, target: f64) -> Result<f64> {
        if !(target > 0.0 && target.is_finite()) {
            return Err(Error::invalid("target", "must be > 0"));
        }
        if !(factor > 0.0 && factor.is_finite()) {
            return Err(Error::invalid("factor", "must be > 0"));
        }
        let len = self.reach(role, factor, start, target)?;
        if start + len > self.interval.b() {
            return Err(Error::ExceedsDomain {
                start,
                length: len,
                end: self.interval.b(),
            });
        }
        Ok(len)
    }

    /// Greedy earliest-finish breakpoints `t_1, …, t_{k+1}` at level `c`; the last
    /// one may lie beyond `b`.
    fn greedy(&self, k: u32, sign: Sign, s: f64, c: f64) -> Result<Vec<f64>> {
        let mut t = self.interval.a();
        let mut ends = Vec::with_capacity(k as usize + 1);
        for i in 0..=k as usize {
            let role = Role::from(sign.at(i));
            let factor = if role == Role::M { s } else { 1.0 };
            t += self.reach(role, factor, t, c)?;
            ends.push(t);
        }
        Ok(ends)
    }

    /// `c_{k+1}^±(s)` and an optimal partition.
    pub fn c_value(&self, k: u32, sign: Sign, s: f64) -> Result<CurvePoint> {
        check_slope(s)?;
        let (theta_minus, theta_plus) = self.theta_bounds();
        let mu = self.exponent.mu(self.interval.len(), k + 1);
        let c_hi = mu * s * gamma(s)? / theta_minus * (1.0 + BRACKET_SLACK);
        let c_lo = mu * s.min(1.0) / theta_plus * (1.0 - BRACKET_SLACK);
        let b = self.interval.b();

        let overshoot = |c: f64| -> Result<f64> {
            let ends = self.greedy(k, sign, s, c)?;
            Ok(ends[ends.len() - 1] - b)
        };
        let f_hi = overshoot(c_hi)?;
        if f_hi > 0.0 {
            return Err(Error::InfeasibleBracket { c_lo, c_hi });
        }
        let f_lo = overshoot(c_lo)?;
        let root = illinois(
            overshoot,
            c_lo,
            c_hi,
            f_lo,
            f_hi,
            self.tol,
            1e-14 * self.interval.len(),
            200,
        )?;
        log::debug!(
            "level for k={k}, s={s}: {} iterations, overshoot {:e}",
            root.iterations,
            root.fx
        );
        let c = root.x;

        let mut breakpoints = Vec::with_capacity(k as usize + 2);
        breakpoints.push(self.interval.a());
        let ends = self.greedy(k, sign, s, c)?;
        breakpoints.extend_from_slice(&ends[..ends.len() - 1]);
        breakpoints.push(b);
        let partition = Partition::new(breakpoints, sign)?;
        Ok(CurvePoint::from_level(k, sign, s, c, partition, self.p()))
    }

    /// `c_value` along ascending slopes, checking that the curve is decreasing.
    pub fn trace_curve(&self, k: u32, sign: Sign, slopes: &[f64]) -> Result<Vec<CurvePoint>> {
        if slopes.is_empty() {
            return Err(Error::invalid("s", "slope list is empty"));
        }
        if slopes.windows(2).any(|w| !(w[0] < w[1])) {
            return Err(Error::invalid("s", "slopes must be strictly ascending"));
        }
        let points = slopes
            .par_iter()
            .map(|&s| self.c_value(k, sign, s))
            .collect::<Result<Vec<_>>>()?;
        check_monotone(&points, 2.0 * self.tol)?;
        Ok(points)
    }
}

/// `α` decreasing and `β` increasing along ascending slopes, up to relative slack `rel`.
pub fn check_monotone(points: &[CurvePoint], rel: f64) -> Result<()> {
    for w in points.windows(2) {
        let (a, b) = (&w[0], &w[1]);
        let alpha_ok = a.alpha - b.alpha > -rel * a.alpha;
        let beta_ok = b.beta - a.beta > -rel * b.beta;
        if !(alpha_ok && beta_ok) {
            return Err(Error::MonotonicityViolation { s1: a.s, s2: b.s });
        }
    }
    Ok(())
}

/// Exact `c_{k+1}^±(s)` for constant weights `m0`, `n0` by equalization: every
/// positive interval has length `ℓ_+ = π_p (s/(m0 c))^{1/p}`, every negative one
/// `ℓ_- = π_p (1/(n0 c))^{1/p}`, and the lengths fill the interval.
pub fn closed_form_constant(
    k: u32,
    sign: Sign,
    s: f64,
    m0: f64,
    n0: f64,
    interval: &Interval,
    p: f64,
) -> Result<CurvePoint> {
    gamma(s)?;
    if !(m0 > 0.0 && n0 > 0.0) {
        return Err(Error::invalid("weights", "constant weights must be > 0"));
    }
    let exponent = PExponent::new(p)?;
    let pi_p = exponent.pi_p();
    let total = k as usize + 1;
    let first = total.div_ceil(2);
    let (n_plus, n_minus) = match sign {
        Sign::Plus => (first, total - first),
        Sign::Minus => (total - first, first),
    };
    let sum = n_plus as f64 * (s / m0).powf(1.0 / p) + n_minus as f64 * (1.0 / n0).powf(1.0 / p);
    let c = (pi_p / interval.len() * sum).powf(p);
    let len_plus = pi_p * (s / (m0 * c)).powf(1.0 / p);
    let len_minus = pi_p * (1.0 / (n0 * c)).powf(1.0 / p);

    let mut breakpoints = vec![interval.a()];
    let mut t = interval.a();
    for i in 0..total - 1 {
        t += match sign.at(i) {
            Sign::Plus => len_plus,
            Sign::Minus => len_minus,
        };
        breakpoints.push(t);
    }
    breakpoints.push(interval.b());
    let partition = Partition::new(breakpoints, sign)?;
    Ok(CurvePoint::from_level(k, sign, s, c, partition, p))
}

/// Outcome of the bound lemmas at one curve point.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LemmaReport {
    /// `c(1) <= μ_{k+1}/θ_-`; `None` unless `s = 1`.
    pub c_at_one: Option<bool>,
    /// `α <= μ_{k+1} γ(s)/θ_-` and `β <= μ_{k+1} s γ(s)/θ_-`.
    pub alpha_beta: bool,
    /// `μ_1(I_+) <= (θ_+/θ_-) μ_{k+1} γ(s)` and `μ_1(I_-) <= (θ_+/θ_-) μ_{k+1} s γ(s)` on every subinterval.
    pub nodal_domains: bool,
}

impl LemmaReport {
    pub fn all_hold(&self) -> bool {
        self.c_at_one.unwrap_or(true) && self.alpha_beta && self.nodal_domains
    }
}

/// Evaluates the a-priori bounds at `point`, with relative slack `rel` for solver error.
pub fn check_lemmas(problem: &FucikProblem, point: &CurvePoint, rel: f64) -> Result<LemmaReport> {
    let (theta_minus, theta_plus) = problem.theta_bounds();
    let exponent = problem.exponent();
    let mu = exponent.mu(problem.interval().len(), point.k + 1);
    let g = gamma(point.s)?;
    let within = |value: f64, bound: f64| value <= bound * (1.0 + rel);

    let c_at_one = (point.s == 1.0).then(|| within(point.c, mu / theta_minus));
    let alpha_beta = within(point.alpha, mu * g / theta_minus)
        && within(point.beta, mu * point.s * g / theta_minus);
    let ratio = theta_plus / theta_minus;
    let nodal_domains = point.partition.intervals().all(|(lo, hi, sign)| {
        let mu1 = exponent.mu(hi - lo, 1);
        match sign {
            Sign::Plus => within(mu1, ratio * mu * g),
            Sign::Minus => within(mu1, ratio * mu * point.s * g),
        }
    });
    Ok(LemmaReport {
        c_at_one,
        alpha_beta,
        nodal_domains,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::plap::lambda1_shoot;
    use approx::assert_relative_eq;
    use std::f64::consts::PI;

    const PI2: f64 = PI * PI;

    fn unit_problem(p: f64) -> FucikProblem {
        let one = PeriodicWeight::constant(1.0).unwrap();
        FucikProblem::new(one.clone(), one, Scale::Homogenized, Interval::unit(), p).unwrap()
    }

    fn mixed_problem(eps: f64) -> FucikProblem {
        let m = PeriodicWeight::piecewise(vec![0.5], vec![1.0, 3.0]).unwrap();
        let n = PeriodicWeight::trigonometric(2.0, 1.0, 1).unwrap();
        FucikProblem::new(m, n, Scale::Eps(eps), Interval::unit(), 2.0).unwrap()
    }

    #[test]
    fn gamma_cases() {
        assert_eq!(gamma(2.0).unwrap(), 1.0);
        assert_eq!(gamma(1.0).unwrap(), 1.0);
        assert_eq!(gamma(0.5).unwrap(), 2.0);
        assert!(gamma(0.0).is_err());
        assert!(gamma(-1.0).is_err());
    }

    #[test]
    fn partition_signs_alternate() {
        let part = Partition::new(vec![0.0, 0.3, 0.6, 1.0], Sign::Minus).unwrap();
        let signs: Vec<Sign> = part.intervals().map(|(_, _, s)| s).collect();
        assert_eq!(signs, vec![Sign::Minus, Sign::Plus, Sign::Minus]);
        assert_eq!(part.k(), 2);
        assert!(Partition::new(vec![0.0, 0.5, 0.5, 1.0], Sign::Plus).is_err());
    }

    #[test]
    fn min_length_constant_weight_is_explicit() {
        let prob = unit_problem(2.0);
        for (factor, target) in [(1.0, 40.0), (4.0, 90.0), (0.5, 200.0)] {
            let len = prob.min_length(Role::M, factor, 0.0, target).unwrap();
            let exact = PI * (factor / target).sqrt();
            assert_relative_eq!(len, exact, max_relative = 1e-9);
        }
        // shrinking with the target
        let a = prob.min_length(Role::N, 1.0, 0.0, 50.0).unwrap();
        let b = prob.min_length(Role::N, 1.0, 0.0, 500.0).unwrap();
        assert!(b < a);
        // domain overrun
        assert!(matches!(
            prob.min_length(Role::M, 1.0, 0.5, 10.0),
            Err(Error::ExceedsDomain { .. })
        ));
    }

    #[test]
    fn min_length_piecewise_reproduces_target() {
        let prob = mixed_problem(0.2);
        let target = 60.0;
        let len = prob.min_length(Role::M, 2.0, 0.13, target).unwrap();
        let i = Interval::new(0.13, 0.13 + len).unwrap();
        let lam = lambda1_shoot(prob.m(), Scale::Eps(0.2), &i, 2.0, 1e-12)
            .unwrap()
            .lambda;
        assert!((2.0 * lam - target).abs() <= 1e-8 * target, "{}", 2.0 * lam);
    }

    #[test]
    fn two_equal_halves() {
        let pt = unit_problem(2.0).c_value(1, Sign::Plus, 1.0).unwrap();
        assert_relative_eq!(pt.c, 4.0 * PI2, max_relative = 1e-8);
        assert_relative_eq!(pt.alpha, 4.0 * PI2, max_relative = 1e-8);
        assert_relative_eq!(pt.partition.breakpoints()[1], 0.5, epsilon = 1e-8);
    }

    #[test]
    fn slope_four_equalization() {
        let pt = unit_problem(2.0).c_value(1, Sign::Plus, 4.0).unwrap();
        assert_relative_eq!(pt.c, 9.0 * PI2, max_relative = 1e-8);
        assert_relative_eq!(pt.alpha, 2.25 * PI2, max_relative = 1e-8);
        let classical = PI / pt.alpha.sqrt() + PI / pt.beta.sqrt();
        assert!((classical - 1.0).abs() < 1e-8);
    }

    #[test]
    fn same_constant_weight_gives_higher_eigenvalue() {
        let two = PeriodicWeight::constant(2.0).unwrap();
        let prob =
            FucikProblem::new(two.clone(), two, Scale::Homogenized, Interval::unit(), 3.0).unwrap();
        for k in 0..4 {
            let pt = prob.c_value(k, Sign::Plus, 1.0).unwrap();
            let exact = prob.exponent().mu(1.0, k + 1) / 2.0;
            assert_relative_eq!(pt.c, exact, max_relative = 1e-8);
        }
    }

    #[test]
    fn closed_form_examples() {
        let unit = Interval::unit();
        let pt = closed_form_constant(0, Sign::Plus, 3.0, 2.0, 5.0, &unit, 2.0).unwrap();
        assert_relative_eq!(pt.alpha, PI2 / 2.0, max_relative = 1e-12);
        assert_relative_eq!(pt.c, 3.0 * PI2 / 2.0, max_relative = 1e-12);
        let pt = closed_form_constant(1, Sign::Plus, 1.0, 1.0, 1.0, &unit, 2.0).unwrap();
        assert_relative_eq!(pt.c, 4.0 * PI2, max_relative = 1e-12);
        let pt = closed_form_constant(2, Sign::Plus, 1.0, 1.0, 1.0, &unit, 2.0).unwrap();
        assert_relative_eq!(pt.c, 9.0 * PI2, max_relative = 1e-12);
        assert_eq!(pt.partition.breakpoints().len(), 4);
    }

    #[test]
    fn trivial_lines_for_k_zero() {
        let prob = mixed_problem(0.25);
        let plus = prob.c_value(0, Sign::Plus, 2.0).unwrap();
        let lam_m = lambda1_shoot(prob.m(), Scale::Eps(0.25), &Interval::unit(), 2.0, 1e-10)
            .unwrap()
            .lambda;
        assert_relative_eq!(plus.alpha, lam_m, max_relative = 1e-7);
        assert_relative_eq!(plus.beta, 2.0 * lam_m, max_relative = 1e-7);
        let minus = prob.c_value(0, Sign::Minus, 2.0).unwrap();
        let lam_n = lambda1_shoot(prob.n(), Scale::Eps(0.25), &Interval::unit(), 2.0, 1e-10)
            .unwrap()
            .lambda;
        assert_relative_eq!(minus.beta, lam_n, max_relative = 1e-7);
    }

    #[test]
    fn trace_rejects_unsorted_and_out_of_range() {
        let prob = unit_problem(2.0);
        assert!(prob.trace_curve(1, Sign::Plus, &[2.0, 1.0]).is_err());
        assert!(prob.trace_curve(1, Sign::Plus, &[]).is_err());
        assert!(prob.c_value(1, Sign::Plus, 1e-4).is_err());
        assert!(prob.c_value(1, Sign::Plus, 2e3).is_err());
    }

    #[test]
    fn trace_is_monotone_and_lemmas_hold() {
        let prob = mixed_problem(0.25);
        let slopes = [0.3, 0.7, 1.0, 1.8, 4.0];
        let pts = prob.trace_curve(1, Sign::Plus, &slopes).unwrap();
        for pt in &pts {
            assert_eq!(pt.beta, pt.c);
            let rep = check_lemmas(&prob, pt, 1e-9).unwrap();
            assert!(rep.all_hold(), "{rep:?} at s={}", pt.s);
        }
        assert!(pts[2].alpha == pts[2].beta);
    }

    #[test]
    fn monotone_check_flags_violation() {
        let mut pts = unit_problem(2.0)
            .trace_curve(1, Sign::Plus, &[1.0, 2.0])
            .unwrap();
        pts[1].alpha = pts[0].alpha * 1.1;
        assert!(matches!(
            check_monotone(&pts, 1e-8),
            Err(Error::MonotonicityViolation { .. })
        ));
    }
}
