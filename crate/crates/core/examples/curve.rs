//! Traces C_1^+ for a piecewise m and a sinusoidal n, then checks the
//! constant-weight closed form on the classical case.

use fucik::{closed_form_constant, FucikProblem, Interval, PeriodicWeight, Scale, Sign};

fn main() -> fucik::Result<()> {
    let m = PeriodicWeight::piecewise(vec![0.5], vec![1.0, 3.0])?;
    let n = PeriodicWeight::trigonometric(2.0, 1.0, 1)?;
    let prob = FucikProblem::new(m, n, Scale::Eps(0.25), Interval::unit(), 2.0)?;

    let slopes: Vec<f64> = (0..9).map(|i| 2f64.powi(i - 4)).collect();
    println!("{:>8} {:>14} {:>14}  breakpoints", "s", "alpha", "beta");
    for pt in prob.trace_curve(1, Sign::Plus, &slopes)? {
        println!(
            "{:>8.4} {:>14.6} {:>14.6}  {:?}",
            pt.s,
            pt.alpha,
            pt.beta,
            pt.partition.breakpoints()
        );
    }

    // unit weights: pi/sqrt(alpha) + pi/sqrt(beta) = 1
    let pt = closed_form_constant(1, Sign::Plus, 4.0, 1.0, 1.0, &Interval::unit(), 2.0)?;
    let pi = std::f64::consts::PI;
    println!("\nc = {:.10} (9 pi^2 = {:.10})", pt.c, 9.0 * pi * pi);
    println!(
        "pi/sqrt(a) + pi/sqrt(b) = {:.12}",
        pi / pt.alpha.sqrt() + pi / pt.beta.sqrt()
    );
    Ok(())
}
