use thiserror::Error;

use crate::rates::RateRecord;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    /// A precondition on user-supplied data failed. The string names the field.
    #[error("invalid input `{field}`: {reason}")]
    InvalidInput { field: String, reason: String },

    #[error(
        "eigenvalue bracket [{lo}, {hi}] does not straddle the root (residuals {f_lo:e}, {f_hi:e})"
    )]
    BracketFailure {
        lo: f64,
        hi: f64,
        f_lo: f64,
        f_hi: f64,
    },

    #[error("integrator produced a non-finite state at x = {x}")]
    StepFailure { x: f64 },

    #[error("iteration did not converge after {iterations} iterations (last relative change {change:e})")]
    NonConvergence { iterations: usize, change: f64 },

    #[error("minimal length {length} from {start} overruns the domain end {end}")]
    ExceedsDomain { start: f64, length: f64, end: f64 },

    #[error("level bracket [{c_lo}, {c_hi}] is infeasible at its upper end")]
    InfeasibleBracket { c_lo: f64, c_hi: f64 },

    #[error("curve is not monotone between s = {s1} and s = {s2}")]
    MonotonicityViolation { s1: f64, s2: f64 },

    #[error("{quantity} rate bound violated at eps = {}: gap {:e} > bound {:e}", record.eps, record.measured_gap, record.bound)]
    BoundViolation {
        quantity: String,
        record: RateRecord,
    },

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl Error {
    pub(crate) fn invalid(field: impl Into<String>, reason: impl Into<String>) -> Self {
        Error::InvalidInput {
            field: field.into(),
            reason: reason.into(),
        }
    }

    /// Process exit code used by the command-line front end.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::InvalidInput { .. } | Error::Json(_) | Error::Io(_) => 2,
            Error::BoundViolation { .. } => 4,
            _ => 3,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rates::RateRecord;

    #[test]
    fn exit_codes() {
        assert_eq!(Error::invalid("p", "bad").exit_code(), 2);
        let json = serde_json::from_str::<f64>("x").unwrap_err();
        assert_eq!(Error::from(json).exit_code(), 2);
        assert_eq!(Error::StepFailure { x: 0.5 }.exit_code(), 3);
        assert_eq!(
            Error::NonConvergence {
                iterations: 9,
                change: 1.0
            }
            .exit_code(),
            3
        );
        assert_eq!(
            Error::InfeasibleBracket {
                c_lo: 1.0,
                c_hi: 2.0
            }
            .exit_code(),
            3
        );
        let record = RateRecord {
            eps: 0.25,
            measured_gap: 2.0,
            bound: 1.0,
            ratio: 2.0,
            degenerate: false,
            usable: true,
            stated_bound: None,
        };
        let err = Error::BoundViolation {
            quantity: "alpha".into(),
            record,
        };
        assert_eq!(err.exit_code(), 4);
        assert!(err.to_string().contains("eps = 0.25"));
    }
}
