mod common;

use common::*;
use possic::transform::{independent_product, linear_pushforward, pushforward};
use possic::{OptimizerConfig, PossibilityFn};
use proptest::prelude::*;

proptest! {
    #![proptest_config(ProptestConfig::with_cases(100))]

    #[test]
    fn pipelines_stay_normalised(start in unimodal(), steps in prop::collection::vec(step(), 1..=5)) {
        let mut pf = start;
        for s in &steps {
            pf = apply(&pf, s).unwrap();
            let (grid_max, at_mode) = sup_probe(&pf).unwrap();
            prop_assert!(grid_max <= 1.0 + 1e-6, "{s:?}: grid max {grid_max}");
            prop_assert!((at_mode - 1.0).abs() <= 1e-6, "{s:?}: value at mode {at_mode}");
        }
    }

    #[test]
    fn argmax_commutes_with_monotone_maps(
        x in unimodal(),
        k in 0usize..3,
        a in prop_oneof![-3.0..-0.3f64, 0.3..3.0f64],
        b in -2.0..2.0f64,
    ) {
        let (t, f) = monotone_map(k, a, b);
        let mode = x.expected_value().unwrap().unique().unwrap();
        prop_assume!(k != 1 || x.working_domain().unwrap().hi() < 5.0);
        let y = pushforward(&x, &t, None).unwrap();
        let located = y.numeric_mode(None, 401).unwrap().hull().midpoint();
        prop_assert!((located - f(mode)).abs() <= cell(&y, 401).unwrap(),
            "{located} vs {}", f(mode));
    }

    #[test]
    fn expected_value_is_linear(x in unimodal(), y in unimodal(), alpha in prop_oneof![-3.0..-0.3f64, 0.3..3.0f64]) {
        let z = linear_pushforward(&independent_product(&x, &y), alpha, &OptimizerConfig::default()).unwrap();
        let want = alpha * x.expected_value().unwrap().unique().unwrap()
            + y.expected_value().unwrap().unique().unwrap();
        let got = z.numeric_mode(None, 401).unwrap().hull().midpoint();
        prop_assert!((got - want).abs() <= cell(&z, 401).unwrap(), "{got} vs {want}");
    }

    #[test]
    fn tempering_keeps_mode_and_divides_variance(x in unimodal(), b in 0.1..10.0f64) {
        let t = x.temper(b).unwrap();
        let (m0, m1) = (x.expected_value().unwrap().unique().unwrap(), t.expected_value().unwrap().unique().unwrap());
        prop_assert!((m1 - m0).abs() <= 1e-12 * m0.abs().max(1.0), "{m0} {m1}");
        let (v0, v1) = (x.variance().unwrap().value(), t.variance().unwrap().value());
        prop_assert!((v1 * b - v0).abs() <= 1e-9 * v0, "{v0} {v1}");
    }

    #[test]
    fn credibility_is_monotone_and_subadditive(x in unimodal(), a in -5.0..5.0f64, w in 0.0..3.0f64, c in -5.0..5.0f64) {
        use possic::{Interval, IntervalSet};
        let i1 = IntervalSet::from(Interval::new(a, a + w).unwrap());
        let i2 = IntervalSet::from(Interval::new(a - 1.0, a + w + 1.0).unwrap());
        let i3 = IntervalSet::from(Interval::new(c, c + 1.0).unwrap());
        let (p1, p2, p3) = (x.credibility(&i1).unwrap(), x.credibility(&i2).unwrap(), x.credibility(&i3).unwrap());
        prop_assert!(p1 <= p2 + 1e-12);
        let union = IntervalSet::new(vec![
            Interval::new(a, a + w).unwrap(),
            Interval::new(c, c + 1.0).unwrap(),
        ]);
        let pu = x.credibility(&union).unwrap();
        prop_assert!((pu - p1.max(p3)).abs() <= 1e-9);
    }

    #[test]
    fn records_round_trip(x in unimodal()) {
        let back = PossibilityFn::from_json(&x.to_json().unwrap()).unwrap();
        prop_assert_eq!(back.kind(), x.kind());
        // normals are stored by precision, so the variance may move by an ulp
        for (p, q) in back.params().iter().zip(x.params()) {
            prop_assert!((p - q).abs() <= 4.0 * f64::EPSILON * q.abs(), "{p} vs {q}");
        }
    }
}
