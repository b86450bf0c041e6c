//! First eigenvalue of a two-phase weight at a few scales, by shooting and by
//! the discrete Rayleigh quotient.

use fucik::{lambda1_rayleigh, lambda1_shoot, Interval, PeriodicWeight, Scale};

fn main() -> fucik::Result<()> {
    let w = PeriodicWeight::piecewise(vec![0.5], vec![1.0, 3.0])?;
    let unit = Interval::unit();
    let p = 2.0;

    for scale in [
        Scale::Eps(1.0),
        Scale::Eps(0.25),
        Scale::Eps(1.0 / 16.0),
        Scale::Homogenized,
    ] {
        let shot = lambda1_shoot(&w, scale, &unit, p, 1e-10)?;
        let ray = lambda1_rayleigh(&w, scale, &unit, p, 1024)?;
        println!(
            "{:<20} shooting {:.10}  rayleigh {:.10}  (|u(b)| = {:.1e})",
            format!("{scale:?}"),
            shot.lambda,
            ray.lambda,
            shot.residual
        );
    }
    println!("limit pi^2/2 = {:.10}", std::f64::consts::PI.powi(2) / 2.0);
    Ok(())
}
