use fucik::fucik1d::{gamma, S_MAX, S_MIN};
use fucik::rates::{curve_bounds, fit_order, run_sweep_eigen};
use fucik::report::{curve_csv, parse_curve_csv, parse_sweep_csv, sweep_csv};
use fucik::{closed_form_constant, FucikProblem, Interval, PeriodicWeight, Scale, Sign};
use proptest::prelude::*;

fn piecewise() -> impl Strategy<Value = PeriodicWeight> {
    (1usize..5)
        .prop_flat_map(|n| {
            (
                prop::collection::btree_set(1u32..99, n - 1),
                prop::collection::vec(0.2f64..5.0, n),
            )
        })
        .prop_map(|(breaks, values)| {
            let breaks = breaks.into_iter().map(|b| f64::from(b) / 100.0).collect();
            PeriodicWeight::piecewise(breaks, values).unwrap()
        })
}

fn trig() -> impl Strategy<Value = PeriodicWeight> {
    (0.5f64..4.0, 0.0f64..0.95, 1u32..5).prop_map(|(offset, frac, freq)| {
        PeriodicWeight::trigonometric(offset, frac * offset, freq).unwrap()
    })
}

fn weight() -> impl Strategy<Value = PeriodicWeight> {
    prop_oneof![piecewise(), trig()]
}

proptest! {
    #[test]
    fn weights_respect_their_bounds(w in weight(), y in -5.0f64..5.0) {
        prop_assert!(w.verify_invariants().is_ok());
        let v = w.eval(y);
        prop_assert!(v >= w.theta_minus() && v <= w.theta_plus());
        prop_assert!(w.mean() >= w.theta_minus() && w.mean() <= w.theta_plus());
        prop_assert!(w.sup_deviation() <= w.theta_plus() - w.theta_minus() + 1e-12);
    }

    #[test]
    fn trig_weight_has_period_one(w in trig(), y in -5.0f64..5.0, shift in -3i32..3) {
        prop_assert!((w.eval(y + f64::from(shift)) - w.eval(y)).abs() <= 1e-10);
    }

    #[test]
    fn scaling_is_composition(w in weight(), x in -3.0f64..3.0, cells in 1u32..64) {
        let eps = 1.0 / f64::from(cells);
        prop_assert_eq!(w.eval_scaled(eps, x).unwrap(), w.eval(x / eps));
    }

    #[test]
    fn weight_json_roundtrip(w in weight()) {
        let text = serde_json::to_string(&w).unwrap();
        let back: PeriodicWeight = serde_json::from_str(&text).unwrap();
        prop_assert_eq!(back, w);
    }

    #[test]
    fn fitted_order_ignores_gap_scale(
        gaps in prop::collection::vec(1e-8f64..1.0, 3..8),
        factor in 1e-6f64..1e6,
    ) {
        let eps: Vec<f64> = (0..gaps.len()).map(|j| 0.5f64.powi(j as i32 + 1)).collect();
        let scaled: Vec<f64> = gaps.iter().map(|g| g * factor).collect();
        let a = fit_order(&eps, &gaps).unwrap();
        let b = fit_order(&eps, &scaled).unwrap();
        prop_assert!((a - b).abs() <= 1e-9 * (1.0 + a.abs()));
    }

    #[test]
    fn curve_bounds_are_linear_in_eps(s in S_MIN..S_MAX, p in 1.2f64..6.0, c in 0.1f64..1e3) {
        let (a1, b1) = curve_bounds(c, s, p);
        let (a2, b2) = curve_bounds(c / 2.0, s, p);
        prop_assert!((a1 - 2.0 * a2).abs() <= 1e-12 * a1);
        prop_assert!((b1 - 2.0 * b2).abs() <= 1e-12 * b1);
        // beta/alpha = s
        prop_assert!((b1 - s * a1).abs() <= 1e-12 * b1);
        prop_assert!(gamma(s).unwrap() >= 1.0);
    }

    #[test]
    fn closed_form_fills_the_interval(
        k in 0u32..5, plus in any::<bool>(), s in 0.05f64..20.0,
        m0 in 0.2f64..5.0, n0 in 0.2f64..5.0, p in 1.2f64..5.0,
    ) {
        let sign = if plus { Sign::Plus } else { Sign::Minus };
        let iv = Interval::new(-1.0, 2.0).unwrap();
        let pt = closed_form_constant(k, sign, s, m0, n0, &iv, p).unwrap();
        let bps = pt.partition.breakpoints();
        prop_assert_eq!(bps.len() as u32, k + 2);
        prop_assert!(bps.windows(2).all(|w| w[0] < w[1]));
        prop_assert!((pt.beta - s * pt.alpha).abs() <= 1e-12 * pt.beta);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn sweep_csv_roundtrip(w in weight(), p in 1.5f64..4.0, cells in prop::collection::btree_set(1u32..20, 1..4)) {
        let eps: Vec<f64> = cells.into_iter().map(|c| 1.0 / f64::from(c)).collect();
        let rep = run_sweep_eigen(&w, &Interval::unit(), p, &eps, 1e-8).unwrap();
        let back = parse_sweep_csv(&sweep_csv(&rep).unwrap()).unwrap();
        prop_assert_eq!(back, rep);
    }

    #[test]
    fn curve_csv_roundtrip(
        k in 0u32..4, plus in any::<bool>(), s in prop::collection::btree_set(1u32..400, 1..6),
        m0 in 0.2f64..5.0, n0 in 0.2f64..5.0, p in 1.2f64..5.0,
    ) {
        let sign = if plus { Sign::Plus } else { Sign::Minus };
        let pts: Vec<_> = s
            .into_iter()
            .map(|s| closed_form_constant(k, sign, f64::from(s) / 40.0, m0, n0, &Interval::unit(), p).unwrap())
            .collect();
        let back = parse_curve_csv(&curve_csv(&pts, p).unwrap()).unwrap();
        prop_assert_eq!(back, pts);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(12))]

    /// `C_k^+(m, n)` at slope `s` is `C_k^-(n, m)` at `1/s` with `α`, `β` exchanged.
    #[test]
    fn sign_symmetry(m in weight(), n in weight(), k in 0u32..3, s in 0.2f64..5.0, cells in 1u32..6) {
        let prob = FucikProblem::new(m, n, Scale::Eps(1.0 / f64::from(cells)), Interval::unit(), 2.0)
            .unwrap()
            .with_tol(1e-10)
            .unwrap();
        let plus = prob.c_value(k, Sign::Plus, s).unwrap();
        let minus = prob.swapped().c_value(k, Sign::Minus, 1.0 / s).unwrap();
        prop_assert!((plus.alpha - minus.beta).abs() <= 1e-8 * plus.alpha);
        prop_assert!((plus.beta - minus.alpha).abs() <= 1e-8 * plus.beta);
    }

    #[test]
    fn constant_weights_do_not_oscillate(c in 0.3f64..4.0, k in 1u32..3, s in 0.3f64..3.0, cells in 1u32..9) {
        let w = PeriodicWeight::constant(c).unwrap();
        let prob = FucikProblem::new(w.clone(), w, Scale::Eps(1.0 / f64::from(cells)), Interval::unit(), 3.0)
            .unwrap()
            .with_tol(1e-10)
            .unwrap();
        let at_eps = prob.c_value(k, Sign::Plus, s).unwrap();
        let limit = prob.homogenized().c_value(k, Sign::Plus, s).unwrap();
        prop_assert!((at_eps.c - limit.c).abs() <= 2e-10 * limit.c);
    }
}
