use fucik::{constant_c_1d, constant_c_nd, constant_cr, Interval, PeriodicWeight};

fn main() -> fucik::Result<()> {
    let m = PeriodicWeight::piecewise(vec![0.5], vec![1.0, 3.0])?;
    let n = PeriodicWeight::trigonometric(2.0, 1.0, 1)?;
    let p = 2.0;

    println!("C_m = {}", constant_cr(&m, p, 1)?);
    println!("C_n = {}", constant_cr(&n, p, 1)?);

    let c1 = constant_c_1d(&m, &n, p, &Interval::unit())?;
    println!("1d curve constant on (0,1): {:.6}", c1.c_curve);
    println!("{}", serde_json::to_string_pretty(&c1).unwrap());

    // square of side 1: mu_2 = 5 pi^2
    let mu2 = 5.0 * std::f64::consts::PI.powi(2);
    println!(
        "2d curve constant: {:.6}",
        constant_c_nd(&m, &n, p, 2, mu2)?.c_curve
    );
    Ok(())
}
