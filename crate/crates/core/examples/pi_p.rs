use fucik::plap::{pi_p, pi_p_closed_form};

fn main() {
    println!("{:>5} {:>20} {:>20}", "p", "quadrature", "closed form");
    for p in [1.2, 1.5, 2.0, 3.0, 5.0, 10.0] {
        println!(
            "{p:>5} {:>20.15} {:>20.15}",
            pi_p(p).unwrap(),
            pi_p_closed_form(p).unwrap()
        );
    }
}
