//! ε-sweeps comparing oscillating-weight spectra with their homogenized
//! limits against the explicit convergence-rate bounds.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fucik1d::{gamma, FucikProblem, Sign};
use crate::plap::{lambda1_shoot, PExponent};
use crate::weights::{Interval, PeriodicWeight, Scale};

/// Gaps below this multiple of the solver tolerance (relative to the value) are
/// treated as solver noise and left out of the order fit.
pub const NOISE_FACTOR: f64 = 10.0;

/// `C_r = p (√N / 2) ‖r − r̄‖_∞ θ_+ θ_-^{-1/p-2}` with the weight's own bounds.
pub fn constant_cr(w: &PeriodicWeight, p: f64, dim: u32) -> Result<f64> {
    cr_with_bounds(w, p, dim, w.theta_minus(), w.theta_plus())
}

fn cr_with_bounds(
    w: &PeriodicWeight,
    p: f64,
    dim: u32,
    theta_minus: f64,
    theta_plus: f64,
) -> Result<f64> {
    if dim < 1 {
        return Err(Error::invalid("N", "dimension must be >= 1"));
    }
    PExponent::new(p)?;
    Ok(p * f64::from(dim).sqrt() / 2.0
        * w.sup_deviation()
        * theta_plus
        * theta_minus.powf(-1.0 / p - 2.0))
}

/// Rate constants for a pair of weights with the inputs they were computed from.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RateConstant {
    pub c_m: f64,
    pub c_n: f64,
    /// Curve constant multiplying `ε` (and the `k`, `s` factors).
    pub c_curve: f64,
    pub p: f64,
    pub dim: u32,
    pub theta_minus: f64,
    pub theta_plus: f64,
    pub deviation_m: f64,
    pub deviation_n: f64,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub length: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub mu2: Option<f64>,
}

fn pair_constants(
    m: &PeriodicWeight,
    n: &PeriodicWeight,
    p: f64,
    dim: u32,
) -> Result<(f64, f64, f64, f64)> {
    let theta_minus = m.theta_minus().min(n.theta_minus());
    let theta_plus = m.theta_plus().max(n.theta_plus());
    let c_m = cr_with_bounds(m, p, dim, theta_minus, theta_plus)?;
    let c_n = cr_with_bounds(n, p, dim, theta_minus, theta_plus)?;
    Ok((c_m, c_n, theta_minus, theta_plus))
}

/// `C = (θ_+/θ_-)^{1+1/p} (π_p/(b−a))^{1+p} max{C_m, C_n}` for the interval problem.
///
/// `θ_±` are taken jointly over both weights.
pub fn constant_c_1d(
    m: &PeriodicWeight,
    n: &PeriodicWeight,
    p: f64,
    interval: &Interval,
) -> Result<RateConstant> {
    let (c_m, c_n, theta_minus, theta_plus) = pair_constants(m, n, p, 1)?;
    let pi_p = PExponent::new(p)?.pi_p();
    let c_curve = (theta_plus / theta_minus).powf(1.0 + 1.0 / p)
        * (pi_p / interval.len()).powf(1.0 + p)
        * c_m.max(c_n);
    Ok(RateConstant {
        c_m,
        c_n,
        c_curve,
        p,
        dim: 1,
        theta_minus,
        theta_plus,
        deviation_m: m.sup_deviation(),
        deviation_n: n.sup_deviation(),
        length: Some(interval.len()),
        mu2: None,
    })
}

/// `C = (θ_+/θ_-)^{1+1/p} μ_2(Ω)^{1+1/p} max{C_m, C_n}` with a user-supplied `μ_2(Ω)`.
pub fn constant_c_nd(
    m: &PeriodicWeight,
    n: &PeriodicWeight,
    p: f64,
    dim: u32,
    mu2: f64,
) -> Result<RateConstant> {
    if !(mu2 > 0.0 && mu2.is_finite()) {
        return Err(Error::invalid("mu2", "must be > 0"));
    }
    let (c_m, c_n, theta_minus, theta_plus) = pair_constants(m, n, p, dim)?;
    let c_curve =
        (theta_plus / theta_minus).powf(1.0 + 1.0 / p) * mu2.powf(1.0 + 1.0 / p) * c_m.max(c_n);
    Ok(RateConstant {
        c_m,
        c_n,
        c_curve,
        p,
        dim,
        theta_minus,
        theta_plus,
        deviation_m: m.sup_deviation(),
        deviation_n: n.sup_deviation(),
        length: None,
        mu2: Some(mu2),
    })
}

/// Curve bounds `(α-bound, β-bound)` for `C ε K` and slope `s`:
///
/// | | `s >= 1` | `s < 1` |
/// |---|---|---|
/// | α | `s^{1/p}` | `s^{-1-1/p}` |
/// | β | `s^{1+1/p}` | `s^{-1/p}` |
pub fn curve_bounds(c_eps_k: f64, s: f64, p: f64) -> (f64, f64) {
    if s >= 1.0 {
        (c_eps_k * s.powf(1.0 / p), c_eps_k * s.powf(1.0 + 1.0 / p))
    } else {
        (c_eps_k * s.powf(-1.0 - 1.0 / p), c_eps_k * s.powf(-1.0 / p))
    }
}

/// The same bound written as `C ε K γ(s)^{1+1/p} s max{1, s^{1/p}}` for β (α divides by `s`).
pub fn curve_bounds_gamma_form(c_eps_k: f64, s: f64, p: f64) -> Result<(f64, f64)> {
    let g = gamma(s)?;
    let beta = c_eps_k * g.powf(1.0 + 1.0 / p) * s * s.powf(1.0 / p).max(1.0);
    Ok((beta / s, beta))
}

/// Rounds `eps` to the nearest reciprocal integer, returning a note when it moved.
pub fn normalize_eps(eps: f64) -> Result<(f64, Option<String>)> {
    if !(eps > 0.0 && eps.is_finite()) {
        return Err(Error::invalid("eps", "must be finite and > 0"));
    }
    let cells = (1.0 / eps).round().max(1.0);
    let rounded = 1.0 / cells;
    if (rounded - eps).abs() <= 1e-12 * eps {
        Ok((rounded, None))
    } else {
        Ok((rounded, Some(format!("eps {eps} rounded to 1/{cells}"))))
    }
}

/// One ε of a sweep.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RateRecord {
    pub eps: f64,
    pub measured_gap: f64,
    pub bound: f64,
    /// `measured_gap / bound`; zero for a degenerate record, `inf` when only the bound vanishes.
    #[serde(with = "extended_f64")]
    pub ratio: f64,
    /// Both the bound and the gap vanish (constant weights).
    pub degenerate: bool,
    /// Gap above the solver noise floor, used for the order fit.
    pub usable: bool,
    /// Bound with the `k^{p+1}` factor of the theorem statement (curve sweeps only).
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub stated_bound: Option<f64>,
}

/// Gap below which a record counts as solver noise.
pub(crate) fn noise_floor(tol: f64, limit: f64) -> f64 {
    NOISE_FACTOR * tol * limit.abs()
}

impl RateRecord {
    pub(crate) fn new(eps: f64, gap: f64, bound: f64, floor: f64) -> Self {
        let noise = gap <= floor;
        let (ratio, degenerate) = if bound > 0.0 {
            (gap / bound, false)
        } else if noise {
            (0.0, true)
        } else {
            (f64::INFINITY, false)
        };
        RateRecord {
            eps,
            measured_gap: gap,
            bound,
            ratio,
            degenerate,
            usable: !noise,
            stated_bound: None,
        }
    }

    pub fn within_bound(&self) -> bool {
        self.ratio <= 1.0
    }

    pub fn within_stated_bound(&self) -> Option<bool> {
        self.stated_bound
            .map(|b| self.measured_gap <= b || (self.degenerate && b == 0.0))
    }
}

/// JSON has no infinities; write them as strings.
mod extended_f64 {
    use serde::{Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(x: &f64, s: S) -> Result<S::Ok, S::Error> {
        if x.is_finite() {
            s.serialize_f64(*x)
        } else {
            s.serialize_str(&x.to_string())
        }
    }

    #[derive(Deserialize)]
    #[serde(untagged)]
    enum Repr {
        Num(f64),
        Text(String),
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<f64, D::Error> {
        match Repr::deserialize(d)? {
            Repr::Num(x) => Ok(x),
            Repr::Text(t) => t.parse().map_err(serde::de::Error::custom),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepMetadata {
    pub m: PeriodicWeight,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub n: Option<PeriodicWeight>,
    pub p: f64,
    pub interval: Interval,
    pub tol: f64,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub k: Option<u32>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub sign: Option<Sign>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub s: Option<f64>,
    /// Value of the homogenized quantity the gaps are measured against.
    pub limit: f64,
    pub constant: RateConstant,
    pub outside_stated_validity: bool,
    pub notes: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepReport {
    /// `lambda1`, `alpha` or `beta`.
    pub quantity: String,
    pub records: Vec<RateRecord>,
    pub fitted_order: Option<f64>,
    pub metadata: SweepMetadata,
}

impl SweepReport {
    pub(crate) fn assemble(
        quantity: &str,
        mut records: Vec<RateRecord>,
        metadata: SweepMetadata,
    ) -> Self {
        records.sort_by(|a, b| b.eps.total_cmp(&a.eps));
        let (eps, gaps): (Vec<f64>, Vec<f64>) = records
            .iter()
            .filter(|r| r.usable)
            .map(|r| (r.eps, r.measured_gap))
            .unzip();
        SweepReport {
            quantity: quantity.to_string(),
            fitted_order: fit_order(&eps, &gaps),
            records,
            metadata,
        }
    }

    pub fn first_violation(&self) -> Option<&RateRecord> {
        self.records.iter().find(|r| !r.within_bound())
    }

    /// Fails with `BoundViolation` on the first record above its bound.
    pub fn check(&self) -> Result<()> {
        match self.first_violation() {
            Some(record) => Err(Error::BoundViolation {
                quantity: self.quantity.clone(),
                record: record.clone(),
            }),
            None => Ok(()),
        }
    }
}

/// Least-squares slope of `ln gap` against `ln eps`; `None` with fewer than two
/// points or a degenerate abscissa.
pub fn fit_order(eps: &[f64], gaps: &[f64]) -> Option<f64> {
    let pts: Vec<(f64, f64)> = eps
        .iter()
        .zip(gaps)
        .filter(|(e, g)| **e > 0.0 && **g > 0.0)
        .map(|(e, g)| (e.ln(), g.ln()))
        .collect();
    if pts.len() < 2 {
        return None;
    }
    let n = pts.len() as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / n;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / n;
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx).powi(2)).sum();
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    if sxx <= 0.0 {
        return None;
    }
    Some(sxy / sxx)
}

fn normalized(eps_list: &[f64], notes: &mut Vec<String>) -> Result<Vec<f64>> {
    if eps_list.is_empty() {
        return Err(Error::invalid("eps", "sweep needs at least one eps"));
    }
    eps_list
        .iter()
        .map(|&e| {
            let (rounded, note) = normalize_eps(e)?;
            notes.extend(note);
            Ok(rounded)
        })
        .collect()
}

/// Eigenvalue sweep without the bound check; see [`sweep_eigen`].
pub fn run_sweep_eigen(
    w: &PeriodicWeight,
    interval: &Interval,
    p: f64,
    eps_list: &[f64],
    tol: f64,
) -> Result<SweepReport> {
    let exponent = PExponent::new(p)?;
    let mut notes = Vec::new();
    let eps_list = normalized(eps_list, &mut notes)?;
    let mu1 = exponent.mu(interval.len(), 1);
    let limit = mu1 / w.mean();
    let c_r = constant_cr(w, p, 1)?;
    let floor = noise_floor(tol, limit);
    let records = eps_list
        .par_iter()
        .map(|&eps| {
            let est = lambda1_shoot(w, Scale::Eps(eps), interval, p, tol)?;
            let gap = (est.lambda - limit).abs();
            let bound = c_r * mu1.powf(1.0 + 1.0 / p) * eps;
            Ok(RateRecord::new(eps, gap, bound, floor))
        })
        .collect::<Result<Vec<_>>>()?;
    let constant = RateConstant {
        c_m: c_r,
        c_n: c_r,
        c_curve: c_r * mu1.powf(1.0 + 1.0 / p),
        p,
        dim: 1,
        theta_minus: w.theta_minus(),
        theta_plus: w.theta_plus(),
        deviation_m: w.sup_deviation(),
        deviation_n: w.sup_deviation(),
        length: Some(interval.len()),
        mu2: None,
    };
    let metadata = SweepMetadata {
        m: w.clone(),
        n: None,
        p,
        interval: *interval,
        tol,
        k: None,
        sign: None,
        s: None,
        limit,
        constant,
        outside_stated_validity: false,
        notes,
    };
    Ok(SweepReport::assemble("lambda1", records, metadata))
}

/// `|λ_1(r_ε) − λ_1(r̄)|` against `C_r μ_1(I)^{1+1/p} ε` for each ε.
///
/// The homogenized eigenvalue is the exact `μ_1(I)/r̄`.
pub fn sweep_eigen(
    w: &PeriodicWeight,
    interval: &Interval,
    p: f64,
    eps_list: &[f64],
    tol: f64,
) -> Result<SweepReport> {
    let report = run_sweep_eigen(w, interval, p, eps_list, tol)?;
    report.check()?;
    Ok(report)
}

/// Paired α/β sweeps of one curve point.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FucikSweep {
    pub alpha: SweepReport,
    pub beta: SweepReport,
    /// Every gap was also below the bound with the `k^{p+1}` factor.
    pub stated_bound_held: bool,
}

impl FucikSweep {
    pub fn check(&self) -> Result<()> {
        self.alpha.check()?;
        self.beta.check()
    }
}

/// Curve sweep without the bound check; see [`sweep_fucik`].
pub fn run_sweep_fucik(
    k: u32,
    sign: Sign,
    s: f64,
    m: &PeriodicWeight,
    n: &PeriodicWeight,
    interval: &Interval,
    p: f64,
    eps_list: &[f64],
    tol: f64,
) -> Result<FucikSweep> {
    if k < 1 {
        return Err(Error::invalid(
            "k",
            "curve sweeps need k >= 1; use the eigenvalue sweep for k = 0",
        ));
    }
    let mut notes = Vec::new();
    let eps_list = normalized(eps_list, &mut notes)?;
    let base =
        FucikProblem::new(m.clone(), n.clone(), Scale::Homogenized, *interval, p)?.with_tol(tol)?;
    let limit = base.c_value(k, sign, s)?;
    let constant = constant_c_1d(m, n, p, interval)?;
    let conservative = f64::from(k + 1).powf(p + 1.0);
    let stated = f64::from(k).powf(p + 1.0);

    let points = eps_list
        .par_iter()
        .map(|&eps| {
            let prob = FucikProblem::new(m.clone(), n.clone(), Scale::Eps(eps), *interval, p)?
                .with_tol(tol)?;
            Ok((eps, prob.c_value(k, sign, s)?))
        })
        .collect::<Result<Vec<_>>>()?;

    let mut alpha_records = Vec::with_capacity(points.len());
    let mut beta_records = Vec::with_capacity(points.len());
    for (eps, pt) in &points {
        let (ba, bb) = curve_bounds(constant.c_curve * eps * conservative, s, p);
        let (sa, sb) = curve_bounds(constant.c_curve * eps * stated, s, p);
        let c_gap = (pt.c - limit.c).abs();
        let mut ra = RateRecord::new(*eps, c_gap / s, ba, noise_floor(tol, limit.alpha));
        ra.stated_bound = Some(sa);
        let mut rb = RateRecord::new(*eps, c_gap, bb, noise_floor(tol, limit.beta));
        rb.stated_bound = Some(sb);
        alpha_records.push(ra);
        beta_records.push(rb);
    }
    let stated_bound_held = alpha_records
        .iter()
        .chain(&beta_records)
        .all(|r| r.within_stated_bound().unwrap_or(true));

    let metadata = |value: f64| SweepMetadata {
        m: m.clone(),
        n: Some(n.clone()),
        p,
        interval: *interval,
        tol,
        k: Some(k),
        sign: Some(sign),
        s: Some(s),
        limit: value,
        constant: constant.clone(),
        outside_stated_validity: limit.outside_stated_validity,
        notes: notes.clone(),
    };
    Ok(FucikSweep {
        alpha: SweepReport::assemble("alpha", alpha_records, metadata(limit.alpha)),
        beta: SweepReport::assemble("beta", beta_records, metadata(limit.beta)),
        stated_bound_held,
    })
}

/// `|α_ε(s) − α_0(s)|` and `|β_ε(s) − β_0(s)|` on `C_k^±` against the curve
/// bounds. The `(k+1)^{p+1}` bound is enforced; the `k^{p+1}` one is recorded.
#[allow(clippy::too_many_arguments)]
pub fn sweep_fucik(
    k: u32,
    sign: Sign,
    s: f64,
    m: &PeriodicWeight,
    n: &PeriodicWeight,
    interval: &Interval,
    p: f64,
    eps_list: &[f64],
    tol: f64,
) -> Result<FucikSweep> {
    let sweep = run_sweep_fucik(k, sign, s, m, n, interval, p, eps_list, tol)?;
    sweep.check()?;
    Ok(sweep)
}
