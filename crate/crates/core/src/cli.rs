//! Experiment configs and the commands behind the `fucik` binary.
//!
//! A config is one JSON object. Every command accepts an optional
//! `"command"` key that must name the command being run; unknown keys are
//! rejected. Flags given on the command line take precedence over the file:
//! `--tol` replaces `"tol"`, and `--jobs` bounds the worker threads.
//!
//! Weights use the schema of [`PeriodicWeight`]:
//!
//! ```json
//! {"kind": "piecewise", "breaks": [0.5], "values": [1, 3]}
//! {"kind": "trig", "offset": 2, "amplitude": 1, "frequency": 1}
//! {"kind": "constant", "value": 1.5, "theta_minus": 1, "theta_plus": 2}
//! ```
//!
//! Intervals are `{"a": 0, "b": 1}` (default `(0, 1)`); scales are
//! `{"eps": 0.25}` or `"homogenized"` (default `{"eps": 1}`).
//!
//! | command | keys |
//! |---|---|
//! | `eig` | `weight`, `p`, `interval`, `scale`, `k` (1), `methods` (`["shooting"]`; also `rayleigh`, `closed_form`), `grid_n` (2048), `tol` |
//! | `curve` | `m`, `n` (= `m`), `p`, `interval`, `scale`, `k`, `sign` (`plus`/`minus`), `s` (ascending list), `tol` |
//! | `sweep-eig` | `weight`, `p`, `interval`, `eps` (list), `tol` |
//! | `sweep-fucik` | `m`, `n` (= `m`), `p`, `interval`, `k`, `sign`, `s`, `eps` (list), `tol` |
//! | `constants` | `m`, `n` (= `m`), `p`, `interval`, `dim` (1), `mu2` |

use std::fmt;
use std::fmt::Write as _;

use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fucik1d::{FucikProblem, Sign};
use crate::plap::{
    lambda1_rayleigh, lambda_k_constant, lambda_k_shoot, mu_k, EigenEstimate, Method, DEFAULT_TOL,
};
use crate::rates::{
    constant_c_1d, constant_c_nd, constant_cr, run_sweep_eigen, run_sweep_fucik, RateConstant,
};
use crate::report;
use crate::weights::{Interval, PeriodicWeight, Scale};

/// File names written under `--out`.
pub const JSON_FILE: &str = "report.json";
pub const CSV_FILE: &str = "report.csv";
pub const PLOT_FILE: &str = "plot.gp";

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Command {
    Eig,
    Curve,
    SweepEig,
    SweepFucik,
    Constants,
}

impl Command {
    pub fn name(self) -> &'static str {
        match self {
            Command::Eig => "eig",
            Command::Curve => "curve",
            Command::SweepEig => "sweep-eig",
            Command::SweepFucik => "sweep-fucik",
            Command::Constants => "constants",
        }
    }
}

impl fmt::Display for Command {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// Command-line values that replace config fields.
#[derive(Debug, Clone, Copy, Default)]
pub struct Overrides {
    pub tol: Option<f64>,
}

/// Rendered outputs of one command.
#[derive(Debug, Clone, PartialEq)]
pub struct Rendered {
    pub json: String,
    pub csv: String,
    pub plot: Option<String>,
}

/// A finished command. `violation` is set when a sweep exceeded its bound; the
/// reports are still complete.
#[derive(Debug)]
pub struct Outcome {
    pub rendered: Rendered,
    pub violation: Option<Error>,
    pub notes: Vec<String>,
}

impl Outcome {
    fn ok(rendered: Rendered) -> Self {
        Outcome {
            rendered,
            violation: None,
            notes: Vec::new(),
        }
    }

    pub fn exit_code(&self) -> i32 {
        self.violation.as_ref().map_or(0, Error::exit_code)
    }
}

fn default_tol() -> f64 {
    DEFAULT_TOL
}

fn default_scale() -> Scale {
    Scale::Eps(1.0)
}

fn one() -> u32 {
    1
}

fn default_methods() -> Vec<Method> {
    vec![Method::Shooting]
}

fn default_grid() -> usize {
    2048
}

fn check_tol(tol: f64) -> Result<()> {
    if !(tol > 0.0 && tol < 1.0) {
        return Err(Error::invalid("tol", "must lie in (0, 1)"));
    }
    Ok(())
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EigConfig {
    #[serde(default)]
    command: Option<String>,
    pub weight: PeriodicWeight,
    pub p: f64,
    #[serde(default = "Interval::unit")]
    pub interval: Interval,
    #[serde(default = "default_scale")]
    pub scale: Scale,
    #[serde(default = "one")]
    pub k: u32,
    #[serde(default = "default_methods")]
    pub methods: Vec<Method>,
    #[serde(default = "default_grid")]
    pub grid_n: usize,
    #[serde(default = "default_tol")]
    pub tol: f64,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CurveConfig {
    #[serde(default)]
    command: Option<String>,
    pub m: PeriodicWeight,
    #[serde(default)]
    pub n: Option<PeriodicWeight>,
    pub p: f64,
    #[serde(default = "Interval::unit")]
    pub interval: Interval,
    #[serde(default = "default_scale")]
    pub scale: Scale,
    pub k: u32,
    pub sign: Sign,
    pub s: Vec<f64>,
    #[serde(default = "default_tol")]
    pub tol: f64,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepEigConfig {
    #[serde(default)]
    command: Option<String>,
    pub weight: PeriodicWeight,
    pub p: f64,
    #[serde(default = "Interval::unit")]
    pub interval: Interval,
    pub eps: Vec<f64>,
    #[serde(default = "default_tol")]
    pub tol: f64,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepFucikConfig {
    #[serde(default)]
    command: Option<String>,
    pub m: PeriodicWeight,
    #[serde(default)]
    pub n: Option<PeriodicWeight>,
    pub p: f64,
    #[serde(default = "Interval::unit")]
    pub interval: Interval,
    pub k: u32,
    pub sign: Sign,
    pub s: f64,
    pub eps: Vec<f64>,
    #[serde(default = "default_tol")]
    pub tol: f64,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ConstantsConfig {
    #[serde(default)]
    command: Option<String>,
    pub m: PeriodicWeight,
    #[serde(default)]
    pub n: Option<PeriodicWeight>,
    pub p: f64,
    #[serde(default = "Interval::unit")]
    pub interval: Interval,
    #[serde(default = "one")]
    pub dim: u32,
    #[serde(default)]
    pub mu2: Option<f64>,
}

/// Parses a config for `command`, rejecting a mismatched `"command"` key.
fn parse<T: DeserializeOwned>(
    command: Command,
    text: &str,
    named: impl Fn(&T) -> Option<&str>,
) -> Result<T> {
    let config: T = serde_json::from_str(text)?;
    if let Some(name) = named(&config) {
        if name != command.name() {
            return Err(Error::invalid(
                "command",
                format!("config is for `{name}` but `{command}` was run"),
            ));
        }
    }
    Ok(config)
}

/// Runs `command` on the JSON config `text`.
pub fn run(command: Command, text: &str, overrides: &Overrides) -> Result<Outcome> {
    match command {
        Command::Eig => {
            let mut c: EigConfig = parse(command, text, |c: &EigConfig| c.command.as_deref())?;
            c.tol = overrides.tol.unwrap_or(c.tol);
            cmd_eig(&c)
        }
        Command::Curve => {
            let mut c: CurveConfig = parse(command, text, |c: &CurveConfig| c.command.as_deref())?;
            c.tol = overrides.tol.unwrap_or(c.tol);
            cmd_curve(&c)
        }
        Command::SweepEig => {
            let mut c: SweepEigConfig =
                parse(command, text, |c: &SweepEigConfig| c.command.as_deref())?;
            c.tol = overrides.tol.unwrap_or(c.tol);
            cmd_sweep_eig(&c)
        }
        Command::SweepFucik => {
            let mut c: SweepFucikConfig =
                parse(command, text, |c: &SweepFucikConfig| c.command.as_deref())?;
            c.tol = overrides.tol.unwrap_or(c.tol);
            cmd_sweep_fucik(&c)
        }
        Command::Constants => {
            let c: ConstantsConfig =
                parse(command, text, |c: &ConstantsConfig| c.command.as_deref())?;
            cmd_constants(&c)
        }
    }
}

#[derive(Debug, Serialize)]
struct EigReport {
    k: u32,
    estimates: Vec<EigenEstimate>,
    /// `|λ_a − λ_b| / λ_b` between the first two methods.
    #[serde(skip_serializing_if = "Option::is_none")]
    relative_difference: Option<f64>,
    /// Bracket `[μ_k/θ_+, μ_k/θ_-]` and whether every estimate lies in it.
    sandwich: [f64; 2],
    within_sandwich: bool,
}

pub fn cmd_eig(c: &EigConfig) -> Result<Outcome> {
    check_tol(c.tol)?;
    if c.methods.is_empty() {
        return Err(Error::invalid("methods", "list is empty"));
    }
    let mut estimates = Vec::with_capacity(c.methods.len());
    for method in &c.methods {
        estimates.push(match method {
            Method::Shooting => lambda_k_shoot(&c.weight, c.scale, &c.interval, c.p, c.k, c.tol)?,
            Method::Rayleigh => {
                if c.k != 1 {
                    return Err(Error::invalid("methods", "rayleigh computes k = 1 only"));
                }
                lambda1_rayleigh(&c.weight, c.scale, &c.interval, c.p, c.grid_n)?
            }
            Method::ClosedForm => {
                let value = match c.scale {
                    Scale::Homogenized => c.weight.mean(),
                    Scale::Eps(_) if c.weight.is_constant() => c.weight.mean(),
                    Scale::Eps(_) => {
                        return Err(Error::invalid(
                            "methods",
                            "closed_form needs a constant weight or the homogenized scale",
                        ))
                    }
                };
                EigenEstimate {
                    lambda: lambda_k_constant(value, &c.interval, c.k, c.p)?,
                    method: Method::ClosedForm,
                    residual: 0.0,
                    evaluations: 0,
                }
            }
        });
    }
    let relative_difference = (estimates.len() >= 2)
        .then(|| (estimates[0].lambda - estimates[1].lambda).abs() / estimates[1].lambda);
    let mu = mu_k(&c.interval, c.k, c.p)?;
    let (tm, tp) = match c.scale {
        Scale::Homogenized => (c.weight.mean(), c.weight.mean()),
        Scale::Eps(_) => (c.weight.theta_minus(), c.weight.theta_plus()),
    };
    let slack = 10.0 * c.tol.max(1e-6);
    let within_sandwich = estimates
        .iter()
        .all(|e| e.within_sandwich(mu, tm, tp, slack));

    let mut csv = String::from("method,lambda,residual,evaluations\n");
    for e in &estimates {
        let method = serde_json::to_string(&e.method)?;
        let _ = writeln!(
            csv,
            "{},{:.16e},{:.16e},{}",
            method.trim_matches('"'),
            e.lambda,
            e.residual,
            e.evaluations
        );
    }
    let json = report::to_json(&EigReport {
        k: c.k,
        estimates,
        relative_difference,
        sandwich: [mu / tp, mu / tm],
        within_sandwich,
    })?;
    Ok(Outcome::ok(Rendered {
        json,
        csv,
        plot: None,
    }))
}

pub fn cmd_curve(c: &CurveConfig) -> Result<Outcome> {
    check_tol(c.tol)?;
    let n = c.n.clone().unwrap_or_else(|| c.m.clone());
    let problem = FucikProblem::new(c.m.clone(), n, c.scale, c.interval, c.p)?.with_tol(c.tol)?;
    let points = problem.trace_curve(c.k, c.sign, &c.s)?;
    let csv = report::curve_csv(&points, c.p)?;
    let plot = report::curve_plot(CSV_FILE, &points);
    Ok(Outcome::ok(Rendered {
        json: report::to_json(&points)?,
        csv,
        plot: Some(plot),
    }))
}

pub fn cmd_sweep_eig(c: &SweepEigConfig) -> Result<Outcome> {
    check_tol(c.tol)?;
    let rep = run_sweep_eigen(&c.weight, &c.interval, c.p, &c.eps, c.tol)?;
    let rendered = Rendered {
        json: report::to_json(&rep)?,
        csv: report::sweep_csv(&rep)?,
        plot: Some(report::sweep_plot(CSV_FILE, &rep)),
    };
    Ok(Outcome {
        rendered,
        violation: rep.check().err(),
        notes: rep.metadata.notes.clone(),
    })
}

pub fn cmd_sweep_fucik(c: &SweepFucikConfig) -> Result<Outcome> {
    check_tol(c.tol)?;
    let n = c.n.clone().unwrap_or_else(|| c.m.clone());
    let sweep = run_sweep_fucik(c.k, c.sign, c.s, &c.m, &n, &c.interval, c.p, &c.eps, c.tol)?;
    let rendered = Rendered {
        json: report::to_json(&sweep)?,
        csv: report::fucik_csv(&sweep)?,
        plot: Some(report::fucik_plot(CSV_FILE, &sweep)),
    };
    Ok(Outcome {
        rendered,
        violation: sweep.check().err(),
        notes: sweep.alpha.metadata.notes.clone(),
    })
}

#[derive(Debug, Serialize)]
struct ConstantsReport {
    c_r_m: f64,
    c_r_n: f64,
    curve: RateConstant,
}

pub fn cmd_constants(c: &ConstantsConfig) -> Result<Outcome> {
    let n = c.n.clone().unwrap_or_else(|| c.m.clone());
    let curve = match c.mu2 {
        Some(mu2) => constant_c_nd(&c.m, &n, c.p, c.dim, mu2)?,
        None if c.dim == 1 => constant_c_1d(&c.m, &n, c.p, &c.interval)?,
        None => return Err(Error::invalid("mu2", "required when dim > 1")),
    };
    let rep = ConstantsReport {
        c_r_m: constant_cr(&c.m, c.p, c.dim)?,
        c_r_n: constant_cr(&n, c.p, c.dim)?,
        curve,
    };
    let csv = format!(
        "quantity,value\nc_r_m,{:.16e}\nc_r_n,{:.16e}\nc_curve,{:.16e}\n",
        rep.c_r_m, rep.c_r_n, rep.curve.c_curve
    );
    Ok(Outcome::ok(Rendered {
        json: report::to_json(&rep)?,
        csv,
        plot: None,
    }))
}

/// Machine-readable error for stderr.
pub fn error_json(err: &Error) -> String {
    let kind = match err {
        Error::InvalidInput { .. } => "invalid_input",
        Error::BracketFailure { .. } => "bracket_failure",
        Error::StepFailure { .. } => "step_failure",
        Error::NonConvergence { .. } => "non_convergence",
        Error::ExceedsDomain { .. } => "exceeds_domain",
        Error::InfeasibleBracket { .. } => "infeasible_bracket",
        Error::MonotonicityViolation { .. } => "monotonicity_violation",
        Error::BoundViolation { .. } => "bound_violation",
        Error::Io(_) => "io",
        Error::Json(_) => "config",
    };
    let mut value = serde_json::json!({
        "error": kind,
        "message": err.to_string(),
        "exit_code": err.exit_code(),
    });
    match err {
        Error::InvalidInput { field, .. } => value["field"] = field.clone().into(),
        Error::BoundViolation { quantity, record } => {
            value["quantity"] = quantity.clone().into();
            value["record"] = serde_json::to_value(record).unwrap_or_default();
        }
        _ => {}
    }
    value.to_string()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn run_text(cmd: Command, text: &str) -> Result<Outcome> {
        run(cmd, text, &Overrides::default())
    }

    #[test]
    fn eig_unit_weight_is_pi_squared() {
        let out = run_text(
            Command::Eig,
            r#"{"weight": {"kind": "constant", "value": 1}, "p": 2, "methods": ["shooting", "closed_form"]}"#,
        )
        .unwrap();
        let v: serde_json::Value = serde_json::from_str(&out.rendered.json).unwrap();
        let lambda = v["estimates"][0]["lambda"].as_f64().unwrap();
        assert!((lambda - 9.8696044).abs() < 1e-6);
        assert!(v["relative_difference"].as_f64().unwrap() < 1e-7);
        assert_eq!(v["within_sandwich"], true);
        assert_eq!(out.exit_code(), 0);
    }

    #[test]
    fn malformed_weight_names_the_field() {
        let err = run_text(
            Command::Eig,
            r#"{"weight": {"kind": "piecewise", "breaks": [0.5]}, "p": 2}"#,
        )
        .unwrap_err();
        assert_eq!(err.exit_code(), 2);
        assert!(err.to_string().contains("values"), "{err}");
    }

    #[test]
    fn unknown_and_mismatched_keys_are_rejected() {
        let err = run_text(
            Command::Eig,
            r#"{"weight": {"kind": "constant", "value": 1}, "p": 2, "colour": 1}"#,
        )
        .unwrap_err();
        assert!(err.to_string().contains("colour"));
        let err = run_text(
            Command::Eig,
            r#"{"command": "curve", "weight": {"kind": "constant", "value": 1}, "p": 2}"#,
        )
        .unwrap_err();
        assert_eq!(err.exit_code(), 2);
    }

    #[test]
    fn tol_flag_overrides_config() {
        let text = r#"{"weight": {"kind": "constant", "value": 1}, "p": 2, "tol": 1e-8}"#;
        let bad = Overrides { tol: Some(-1.0) };
        assert!(run(Command::Eig, text, &bad).is_err());
    }

    #[test]
    fn constants_formula() {
        let out = run_text(
            Command::Constants,
            r#"{"m": {"kind": "piecewise", "breaks": [0.5], "values": [1, 3]}, "p": 2}"#,
        )
        .unwrap();
        assert!(out
            .rendered
            .csv
            .starts_with("quantity,value\nc_r_m,3.0000000000000000e0\n"));
        let err = run_text(
            Command::Constants,
            r#"{"m": {"kind": "constant", "value": 1}, "p": 2, "dim": 2}"#,
        )
        .unwrap_err();
        assert!(err.to_string().contains("mu2"));
    }

    #[test]
    fn error_json_carries_the_field() {
        let err = Error::invalid("p", "need 1 < p");
        let v: serde_json::Value = serde_json::from_str(&error_json(&err)).unwrap();
        assert_eq!(v["field"], "p");
        assert_eq!(v["exit_code"], 2);
    }
}
