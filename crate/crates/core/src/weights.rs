//! Periodic cell weights, their ε-rescalings and the interval type.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Number of cell samples used to validate declared bounds and periodicity.
pub const VALIDATION_SAMPLES: usize = 10_001;

/// Closed-form-integrable families of 1-periodic weights.
#[derive(Debug, Clone, PartialEq)]
pub enum WeightKind {
    /// Value `values[i]` on `[breaks[i-1], breaks[i])` with `breaks[-1] = 0`, `breaks[len] = 1`.
    PiecewiseConstant {
        breaks: Vec<f64>,
        values: Vec<f64>,
    },
    /// `offset + amplitude * sin(2π frequency y)`.
    Trigonometric {
        offset: f64,
        amplitude: f64,
        frequency: u32,
    },
    Constant(f64),
}

/// A 1-periodic weight together with declared bounds `θ_- <= r <= θ_+`.
///
/// The bounds are metadata: they are checked by sampling on construction but
/// need not be tight, so the same profile can be tested against looser bounds.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "WeightSpec", into = "WeightSpec")]
pub struct PeriodicWeight {
    kind: WeightKind,
    theta_minus: f64,
    theta_plus: f64,
}

impl PeriodicWeight {
    pub fn constant(value: f64) -> Result<Self> {
        Self::with_bounds(WeightKind::Constant(value), None, None)
    }

    pub fn piecewise(breaks: Vec<f64>, values: Vec<f64>) -> Result<Self> {
        Self::with_bounds(WeightKind::PiecewiseConstant { breaks, values }, None, None)
    }

    pub fn trigonometric(offset: f64, amplitude: f64, frequency: u32) -> Result<Self> {
        Self::with_bounds(
            WeightKind::Trigonometric {
                offset,
                amplitude,
                frequency,
            },
            None,
            None,
        )
    }

    /// Builds a weight, taking the tight bounds for any bound left as `None`.
    pub fn with_bounds(
        kind: WeightKind,
        theta_minus: Option<f64>,
        theta_plus: Option<f64>,
    ) -> Result<Self> {
        validate_kind(&kind)?;
        let (lo, hi) = tight_bounds(&kind);
        let theta_minus = theta_minus.unwrap_or(lo);
        let theta_plus = theta_plus.unwrap_or(hi);
        if !(theta_minus.is_finite() && theta_minus > 0.0) {
            return Err(Error::invalid("theta_minus", "must be finite and > 0"));
        }
        if !(theta_plus.is_finite() && theta_plus >= theta_minus) {
            return Err(Error::invalid(
                "theta_plus",
                "must be finite and >= theta_minus",
            ));
        }
        let w = PeriodicWeight {
            kind,
            theta_minus,
            theta_plus,
        };
        w.verify_invariants()?;
        Ok(w)
    }

    pub fn kind(&self) -> &WeightKind {
        &self.kind
    }

    pub fn theta_minus(&self) -> f64 {
        self.theta_minus
    }

    pub fn theta_plus(&self) -> f64 {
        self.theta_plus
    }

    pub fn is_constant(&self) -> bool {
        self.sup_deviation() == 0.0
    }

    /// `r(y mod 1)`.
    pub fn eval(&self, y: f64) -> f64 {
        match &self.kind {
            WeightKind::Constant(c) => *c,
            WeightKind::Trigonometric {
                offset,
                amplitude,
                frequency,
            } => offset + amplitude * (2.0 * PI * f64::from(*frequency) * y.rem_euclid(1.0)).sin(),
            WeightKind::PiecewiseConstant { breaks, values } => {
                let y = y.rem_euclid(1.0);
                let idx = breaks.partition_point(|&b| b <= y);
                values[idx]
            }
        }
    }

    /// `r(x / eps)`.
    pub fn eval_scaled(&self, eps: f64, x: f64) -> Result<f64> {
        if !(eps > 0.0 && eps.is_finite()) {
            return Err(Error::invalid("eps", "must be finite and > 0"));
        }
        Ok(self.eval(x / eps))
    }

    /// Cell average, exact for every supported kind.
    pub fn mean(&self) -> f64 {
        match &self.kind {
            WeightKind::Constant(c) => *c,
            WeightKind::Trigonometric { offset, .. } => *offset,
            WeightKind::PiecewiseConstant { breaks, values } => piece_lengths(breaks)
                .zip(values)
                .map(|(len, v)| len * v)
                .sum(),
        }
    }

    /// `‖r − r̄‖_∞` over the cell, exact for every supported kind.
    pub fn sup_deviation(&self) -> f64 {
        match &self.kind {
            WeightKind::Constant(_) => 0.0,
            WeightKind::Trigonometric { amplitude, .. } => amplitude.abs(),
            WeightKind::PiecewiseConstant { breaks, values } => {
                let mean = self.mean();
                piece_lengths(breaks)
                    .zip(values)
                    .filter(|(len, _)| *len > 0.0)
                    .map(|(_, v)| (v - mean).abs())
                    .fold(0.0, f64::max)
            }
        }
    }

    /// Cell-relative discontinuities in `[0, 1)`.
    fn cell_jumps(&self) -> Vec<f64> {
        match &self.kind {
            WeightKind::PiecewiseConstant { breaks, values } => {
                let mut jumps = Vec::with_capacity(breaks.len() + 1);
                if values.first() != values.last() {
                    jumps.push(0.0);
                }
                for (i, &b) in breaks.iter().enumerate() {
                    if values[i] != values[i + 1] {
                        jumps.push(b);
                    }
                }
                jumps
            }
            _ => Vec::new(),
        }
    }

    /// Checks the declared bounds and 1-periodicity on a uniform cell sample.
    pub fn verify_invariants(&self) -> Result<()> {
        let slack = 1e-12 * self.theta_plus;
        let n = VALIDATION_SAMPLES;
        let jumps = self.cell_jumps();
        // (y + 1) mod 1 may round across a jump, so the shift check skips those samples
        let near_jump = |y: f64| {
            jumps.iter().any(|&b| {
                let d = (y - b).rem_euclid(1.0);
                d.min(1.0 - d) < 1e-9
            })
        };
        for i in 0..n {
            let y = i as f64 / (n - 1) as f64;
            let v = self.eval(y);
            if v < self.theta_minus - slack || v > self.theta_plus + slack {
                return Err(Error::invalid(
                    "theta",
                    format!(
                        "r({y}) = {v} outside declared [{}, {}]",
                        self.theta_minus, self.theta_plus
                    ),
                ));
            }
            let shifted = self.eval(y + 1.0);
            if !near_jump(y) && (shifted - v).abs() > 1e-10 * v.abs().max(1.0) {
                return Err(Error::invalid("kind", format!("r({y} + 1) != r({y})")));
            }
        }
        if let WeightKind::PiecewiseConstant { values, .. } = &self.kind {
            for v in values {
                if *v < self.theta_minus || *v > self.theta_plus {
                    return Err(Error::invalid(
                        "theta",
                        format!("piece value {v} outside declared bounds"),
                    ));
                }
            }
        }
        Ok(())
    }
}

fn piece_lengths(breaks: &[f64]) -> impl Iterator<Item = f64> + '_ {
    let n = breaks.len();
    (0..=n).map(move |i| {
        let lo = if i == 0 { 0.0 } else { breaks[i - 1] };
        let hi = if i == n { 1.0 } else { breaks[i] };
        hi - lo
    })
}

fn validate_kind(kind: &WeightKind) -> Result<()> {
    match kind {
        WeightKind::Constant(c) => {
            if !(c.is_finite() && *c > 0.0) {
                return Err(Error::invalid(
                    "value",
                    "constant weight must be finite and > 0",
                ));
            }
        }
        WeightKind::Trigonometric {
            offset,
            amplitude,
            frequency,
        } => {
            if !(offset.is_finite() && amplitude.is_finite()) {
                return Err(Error::invalid("offset", "must be finite"));
            }
            if *frequency == 0 {
                return Err(Error::invalid("frequency", "must be a positive integer"));
            }
            if offset - amplitude.abs() <= 0.0 {
                return Err(Error::invalid(
                    "amplitude",
                    "offset - |amplitude| must be > 0",
                ));
            }
        }
        WeightKind::PiecewiseConstant { breaks, values } => {
            if values.len() != breaks.len() + 1 {
                return Err(Error::invalid(
                    "values",
                    format!(
                        "expected {} values for {} breaks",
                        breaks.len() + 1,
                        breaks.len()
                    ),
                ));
            }
            let mut prev = 0.0;
            for &b in breaks {
                if !(b > prev && b < 1.0) {
                    return Err(Error::invalid(
                        "breaks",
                        "must be strictly increasing inside (0, 1)",
                    ));
                }
                prev = b;
            }
            if values.iter().any(|v| !(v.is_finite() && *v > 0.0)) {
                return Err(Error::invalid("values", "must be finite and > 0"));
            }
        }
    }
    Ok(())
}

fn tight_bounds(kind: &WeightKind) -> (f64, f64) {
    match kind {
        WeightKind::Constant(c) => (*c, *c),
        WeightKind::Trigonometric {
            offset, amplitude, ..
        } => (offset - amplitude.abs(), offset + amplitude.abs()),
        WeightKind::PiecewiseConstant { values, .. } => (
            values.iter().copied().fold(f64::INFINITY, f64::min),
            values.iter().copied().fold(f64::NEG_INFINITY, f64::max),
        ),
    }
}

/// JSON form of a weight, e.g. `{"kind":"piecewise","breaks":[0.5],"values":[1,3]}`.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct WeightSpec {
    pub kind: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub breaks: Option<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub values: Option<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub value: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub offset: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub amplitude: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub frequency: Option<u32>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub theta_minus: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub theta_plus: Option<f64>,
}

fn required<T>(v: Option<T>, field: &str) -> Result<T> {
    v.ok_or_else(|| Error::invalid(field, "missing"))
}

impl TryFrom<WeightSpec> for PeriodicWeight {
    type Error = Error;

    fn try_from(spec: WeightSpec) -> Result<Self> {
        let stray = |present: bool, field: &str| -> Result<()> {
            if present {
                Err(Error::invalid(
                    field,
                    format!("not allowed for kind `{}`", spec.kind),
                ))
            } else {
                Ok(())
            }
        };
        let kind = match spec.kind.as_str() {
            "constant" => {
                stray(spec.breaks.is_some(), "breaks")?;
                stray(spec.values.is_some(), "values")?;
                stray(spec.offset.is_some(), "offset")?;
                stray(spec.amplitude.is_some(), "amplitude")?;
                stray(spec.frequency.is_some(), "frequency")?;
                WeightKind::Constant(required(spec.value, "value")?)
            }
            "piecewise" => {
                stray(spec.value.is_some(), "value")?;
                stray(spec.offset.is_some(), "offset")?;
                stray(spec.amplitude.is_some(), "amplitude")?;
                stray(spec.frequency.is_some(), "frequency")?;
                WeightKind::PiecewiseConstant {
                    breaks: required(spec.breaks.clone(), "breaks")?,
                    values: required(spec.values.clone(), "values")?,
                }
            }
            "trig" | "trigonometric" => {
                stray(spec.value.is_some(), "value")?;
                stray(spec.breaks.is_some(), "breaks")?;
                stray(spec.values.is_some(), "values")?;
                WeightKind::Trigonometric {
                    offset: required(spec.offset, "offset")?,
                    amplitude: required(spec.amplitude, "amplitude")?,
                    frequency: spec.frequency.unwrap_or(1),
                }
            }
            other => {
                return Err(Error::invalid(
                    "kind",
                    format!("unknown weight kind `{other}`"),
                ))
            }
        };
        PeriodicWeight::with_bounds(kind, spec.theta_minus, spec.theta_plus)
    }
}

impl From<PeriodicWeight> for WeightSpec {
    fn from(w: PeriodicWeight) -> Self {
        let mut spec = WeightSpec {
            kind: String::new(),
            breaks: None,
            values: None,
            value: None,
            offset: None,
            amplitude: None,
            frequency: None,
            theta_minus: Some(w.theta_minus),
            theta_plus: Some(w.theta_plus),
        };
        match w.kind {
            WeightKind::Constant(c) => {
                spec.kind = "constant".into();
                spec.value = Some(c);
            }
            WeightKind::PiecewiseConstant { breaks, values } => {
                spec.kind = "piecewise".into();
                spec.breaks = Some(breaks);
                spec.values = Some(values);
            }
            WeightKind::Trigonometric {
                offset,
                amplitude,
                frequency,
            } => {
                spec.kind = "trig".into();
                spec.offset = Some(offset);
                spec.amplitude = Some(amplitude);
                spec.frequency = Some(frequency);
            }
        }
        spec
    }
}

/// A bounded open interval `(a, b)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawInterval", into = "RawInterval")]
pub struct Interval {
    a: f64,
    b: f64,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawInterval {
    a: f64,
    b: f64,
}

impl TryFrom<RawInterval> for Interval {
    type Error = Error;
    fn try_from(raw: RawInterval) -> Result<Self> {
        Interval::new(raw.a, raw.b)
    }
}

impl From<Interval> for RawInterval {
    fn from(i: Interval) -> Self {
        RawInterval { a: i.a, b: i.b }
    }
}

impl Interval {
    pub fn new(a: f64, b: f64) -> Result<Self> {
        if !(a.is_finite() && b.is_finite() && a < b) {
            return Err(Error::invalid(
                "interval",
                format!("need finite a < b, got ({a}, {b})"),
            ));
        }
        Ok(Interval { a, b })
    }

    pub fn unit() -> Self {
        Interval { a: 0.0, b: 1.0 }
    }

    pub fn a(&self) -> f64 {
        self.a
    }

    pub fn b(&self) -> f64 {
        self.b
    }

    pub fn len(&self) -> f64 {
        self.b - self.a
    }

    pub fn contains(&self, other: &Interval) -> bool {
        self.a <= other.a && other.b <= self.b
    }
}

/// How a cell weight is placed on the line.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Scale {
    /// Oscillating coefficient `r(x / eps)`.
    Eps(f64),
    /// The homogenized limit: the constant cell mean `r̄`.
    Homogenized,
}

impl Scale {
    pub fn eps(eps: f64) -> Result<Self> {
        if !(eps > 0.0 && eps.is_finite()) {
            return Err(Error::invalid("eps", "must be finite and > 0"));
        }
        Ok(Scale::Eps(eps))
    }
}

/// A weight placed on the line at a given scale: the coefficient seen by the ODE.
#[derive(Debug, Clone, Copy)]
pub struct Coefficient<'a> {
    weight: &'a PeriodicWeight,
    scale: Scale,
}

impl<'a> Coefficient<'a> {
    pub fn new(weight: &'a PeriodicWeight, scale: Scale) -> Self {
        Coefficient { weight, scale }
    }

    pub fn weight(&self) -> &'a PeriodicWeight {
        self.weight
    }

    pub fn scale(&self) -> Scale {
        self.scale
    }

    #[inline]
    pub fn eval(&self, x: f64) -> f64 {
        match self.scale {
            Scale::Eps(eps) => self.weight.eval(x / eps),
            Scale::Homogenized => self.weight.mean(),
        }
    }

    pub fn is_constant(&self) -> bool {
        matches!(self.scale, Scale::Homogenized) || self.weight.is_constant()
    }

    /// Declared bounds; the homogenized coefficient still carries the cell bounds.
    pub fn bounds(&self) -> (f64, f64) {
        (self.weight.theta_minus, self.weight.theta_plus)
    }

    /// Discontinuities of the coefficient strictly inside `(x0, x1)`, ascending.
    pub fn jumps_in(&self, x0: f64, x1: f64) -> Vec<f64> {
        let eps = match self.scale {
            Scale::Eps(eps) => eps,
            Scale::Homogenized => return Vec::new(),
        };
        let cell = self.weight.cell_jumps();
        if cell.is_empty() || x1 <= x0 {
            return Vec::new();
        }
        let first = (x0 / eps).floor() as i64;
        let last = (x1 / eps).ceil() as i64;
        let mut out = Vec::new();
        for j in first..=last {
            for &c in &cell {
                let x = (j as f64 + c) * eps;
                if x > x0 && x < x1 {
                    out.push(x);
                }
            }
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn two_phase() -> PeriodicWeight {
        PeriodicWeight::piecewise(vec![0.5], vec![1.0, 3.0]).unwrap()
    }

    #[test]
    fn eval_examples() {
        let c = PeriodicWeight::constant(2.0).unwrap();
        assert_eq!(c.eval(17.3), 2.0);
        let w = two_phase();
        assert_eq!(w.eval(0.25), 1.0);
        assert_eq!(w.eval(0.75), 3.0);
        assert_eq!(w.eval(1.25), 1.0);
        assert_eq!(w.eval(-0.25), 3.0);
    }

    #[test]
    fn eval_scaled_examples() {
        let w = two_phase();
        assert_eq!(w.eval_scaled(0.1, 0.07).unwrap(), 3.0);
        for x in [0.0, 0.3, 0.61, 2.2] {
            assert_eq!(w.eval_scaled(1.0, x).unwrap(), w.eval(x));
        }
        let t = PeriodicWeight::trigonometric(2.0, 1.0, 1).unwrap();
        assert_relative_eq!(t.eval_scaled(0.5, 0.125).unwrap(), 3.0, epsilon = 1e-15);
        assert!(w.eval_scaled(0.0, 0.1).is_err());
        assert!(w.eval_scaled(-1.0, 0.1).is_err());
    }

    #[test]
    fn mean_and_deviation() {
        let w = two_phase();
        assert_eq!(w.mean(), 2.0);
        assert_eq!(w.sup_deviation(), 1.0);
        let t = PeriodicWeight::trigonometric(2.0, 1.0, 1).unwrap();
        assert_eq!(t.mean(), 2.0);
        assert_eq!(t.sup_deviation(), 1.0);
        let c = PeriodicWeight::constant(4.5).unwrap();
        assert_eq!(c.mean(), 4.5);
        assert_eq!(c.sup_deviation(), 0.0);
    }

    #[test]
    fn rejects_bad_weights() {
        assert!(PeriodicWeight::trigonometric(1.0, 1.0, 1).is_err());
        assert!(PeriodicWeight::trigonometric(2.0, 1.0, 0).is_err());
        assert!(PeriodicWeight::piecewise(vec![0.5], vec![1.0]).is_err());
        assert!(PeriodicWeight::piecewise(vec![0.6, 0.4], vec![1.0, 2.0, 3.0]).is_err());
        assert!(PeriodicWeight::piecewise(vec![0.5], vec![1.0, -3.0]).is_err());
        assert!(PeriodicWeight::constant(0.0).is_err());
        // declared bounds tighter than the profile
        let kind = WeightKind::Constant(2.0);
        assert!(PeriodicWeight::with_bounds(kind.clone(), Some(2.5), None).is_err());
        assert!(PeriodicWeight::with_bounds(kind, Some(1.0), Some(4.0)).is_ok());
    }

    #[test]
    fn json_spec_roundtrip_and_errors() {
        let w: PeriodicWeight =
            serde_json::from_str(r#"{"kind":"piecewise","breaks":[0.5],"values":[1,3]}"#).unwrap();
        assert_eq!(w, two_phase());
        let back: PeriodicWeight =
            serde_json::from_str(&serde_json::to_string(&w).unwrap()).unwrap();
        assert_eq!(back, w);
        let t: PeriodicWeight =
            serde_json::from_str(r#"{"kind":"trig","offset":2,"amplitude":1}"#).unwrap();
        assert_eq!(t.mean(), 2.0);
        let err = serde_json::from_str::<PeriodicWeight>(r#"{"kind":"piecewise","breaks":[0.5]}"#)
            .unwrap_err()
            .to_string();
        assert!(err.contains("values"), "{err}");
        let err =
            serde_json::from_str::<PeriodicWeight>(r#"{"kind":"constant","value":1,"colour":2}"#)
                .unwrap_err()
                .to_string();
        assert!(err.contains("colour"), "{err}");
    }

    #[test]
    fn jumps_on_scaled_line() {
        let w = two_phase();
        let c = Coefficient::new(&w, Scale::Eps(0.25));
        let j = c.jumps_in(0.0, 1.0);
        let expected: Vec<f64> = (1..8).map(|i| i as f64 * 0.125).collect();
        assert_eq!(j.len(), expected.len());
        for (a, b) in j.iter().zip(&expected) {
            assert_relative_eq!(a, b, epsilon = 1e-15);
        }
        let h = Coefficient::new(&w, Scale::Homogenized);
        assert!(h.jumps_in(0.0, 1.0).is_empty());
        assert_eq!(h.eval(0.3), 2.0);
    }

    #[test]
    fn breaks_on_sample_points_validate() {
        for b in [0.38, 0.01, 0.57, 0.99] {
            assert!(
                PeriodicWeight::piecewise(vec![b], vec![1.0, 2.0]).is_ok(),
                "{b}"
            );
        }
    }

    #[test]
    fn interval_validation() {
        assert!(Interval::new(1.0, 1.0).is_err());
        assert!(Interval::new(2.0, 1.0).is_err());
        let i = Interval::new(-1.0, 2.0).unwrap();
        assert_eq!(i.len(), 3.0);
        assert!(i.contains(&Interval::new(0.0, 1.0).unwrap()));
    }
}
