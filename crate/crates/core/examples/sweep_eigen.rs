use fucik::rates::run_sweep_eigen;
use fucik::{Interval, PeriodicWeight};

fn main() -> fucik::Result<()> {
    let w = PeriodicWeight::piecewise(vec![0.5], vec![1.0, 3.0])?;
    let eps: Vec<f64> = (2..=6).map(|j| 0.5f64.powi(j)).collect();

    for p in [2.0, 3.0] {
        let rep = run_sweep_eigen(&w, &Interval::unit(), p, &eps, 1e-10)?;
        println!("p = {p}, limit {:.8}", rep.metadata.limit);
        for r in &rep.records {
            println!(
                "  eps {:<9} gap {:.3e}  bound {:.3e}  ratio {:.2e}",
                r.eps, r.measured_gap, r.bound, r.ratio
            );
        }
        println!("  fitted order {:.3}", rep.fitted_order.unwrap_or(f64::NAN));
        rep.check()?;
    }
    Ok(())
}
