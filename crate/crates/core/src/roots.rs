//! Bracketed scalar root finding.

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy)]
pub(crate) struct Root {
    pub x: f64,
    pub fx: f64,
    pub iterations: usize,
}

/// Illinois (modified regula falsi) on a sign-changing bracket.
///
/// Stops when two successive iterates differ by at most `xtol * |x|`, when
/// `|f(x)| <= ftol`, or when the bracket itself has shrunk below `xtol * |x|`.
pub(crate) fn illinois<F>(
    mut f: F,
    lo: f64,
    hi: f64,
    f_lo: f64,
    f_hi: f64,
    xtol: f64,
    ftol: f64,
    max_iter: usize,
) -> Result<Root>
where
    F: FnMut(f64) -> Result<f64>,
{
    if f_lo == 0.0 {
        return Ok(Root {
            x: lo,
            fx: 0.0,
            iterations: 0,
        });
    }
    if f_hi == 0.0 {
        return Ok(Root {
            x: hi,
            fx: 0.0,
            iterations: 0,
        });
    }
    if f_lo.signum() == f_hi.signum() {
        return Err(Error::BracketFailure { lo, hi, f_lo, f_hi });
    }
    let (mut a, mut fa, mut b, mut fb) = (lo, f_lo, hi, f_hi);
    // side that was retained last time: -1 for a, +1 for b
    let mut side = 0i8;
    let mut prev = f64::NAN;
    for it in 1..=max_iter {
        let mut x = (a * fb - b * fa) / (fb - fa);
        if !(x > a.min(b) && x < a.max(b)) {
            x = 0.5 * (a + b);
        }
        let fx = f(x)?;
        if fx == 0.0 || fx.abs() <= ftol {
            return Ok(Root {
                x,
                fx,
                iterations: it,
            });
        }
        if fx.signum() == fb.signum() {
            b = x;
            fb = fx;
            if side == -1 {
                fa *= 0.5;
            }
            side = -1;
        } else {
            a = x;
            fa = fx;
            if side == 1 {
                fb *= 0.5;
            }
            side = 1;
        }
        let scale = x.abs().max(f64::MIN_POSITIVE);
        if (x - prev).abs() <= xtol * scale || (b - a).abs() <= xtol * scale {
            return Ok(Root {
                x,
                fx,
                iterations: it,
            });
        }
        prev = x;
    }
    Err(Error::NonConvergence {
        iterations: max_iter,
        change: (b - a).abs(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn finds_cubic_root() {
        let f = |x: f64| Ok(x * x * x - 2.0);
        let r = illinois(f, 0.0, 3.0, -2.0, 25.0, 1e-14, 0.0, 200).unwrap();
        assert!((r.x - 2f64.cbrt()).abs() < 1e-12, "{}", r.x);
        assert!(r.iterations < 40);
    }

    #[test]
    fn rejects_non_bracket() {
        let f = |x: f64| Ok(x * x + 1.0);
        assert!(matches!(
            illinois(f, -1.0, 1.0, 2.0, 2.0, 1e-12, 0.0, 10),
            Err(Error::BracketFailure { .. })
        ));
    }
}
