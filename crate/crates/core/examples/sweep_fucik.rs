use fucik::rates::run_sweep_fucik;
use fucik::{Interval, PeriodicWeight, Sign};

fn main() -> fucik::Result<()> {
    let m = PeriodicWeight::piecewise(vec![0.5], vec![1.0, 3.0])?;
    let n = PeriodicWeight::trigonometric(2.0, 1.0, 1)?;
    let eps: Vec<f64> = (2..=5).map(|j| 0.5f64.powi(j)).collect();

    for k in [1, 2] {
        for s in [0.5, 2.0] {
            let sw = run_sweep_fucik(
                k,
                Sign::Plus,
                s,
                &m,
                &n,
                &Interval::unit(),
                2.0,
                &eps,
                1e-10,
            )?;
            println!(
                "k = {k}, s = {s}  (stated k^(p+1) bound held: {})",
                sw.stated_bound_held
            );
            for (a, b) in sw.alpha.records.iter().zip(&sw.beta.records) {
                println!(
                    "  eps {:<8} alpha gap {:.3e} ratio {:.2e} | beta gap {:.3e} ratio {:.2e}",
                    a.eps, a.measured_gap, a.ratio, b.measured_gap, b.ratio
                );
            }
            sw.check()?;
        }
    }
    Ok(())
}
