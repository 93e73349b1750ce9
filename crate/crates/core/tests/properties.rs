//! Invariants checked over random inputs.

use std::collections::BTreeMap;
use std::sync::Arc;

use proptest::prelude::*;

use hardy_core::capacity::radial_capacity;
use hardy_core::functionals::{
    evaluate_sides, random_test_functions, InequalityCase, InequalityKind,
};
use hardy_core::geometry::ModelManifold;
use hardy_core::grids::{build_grid, CoordinateRange, GridFunction, Spacing};
use hardy_core::suite::to_canonical_json;
use hardy_core::weights::{classify_weight, WeightSpec};

fn hardy_case(dim: u32, p: f64, alpha: f64, n: usize) -> InequalityCase {
    let model = ModelManifold::EuclideanRadial { dim };
    // the p-harmonic radial weight r^{(p-N)/(p-1)}
    let beta = (p - dim as f64) / (p - 1.0);
    let w = WeightSpec::power(model, p, beta).unwrap().with_alpha(alpha);
    InequalityCase::new(
        "prop",
        InequalityKind::WeightedHardy,
        w,
        CoordinateRange::closed(1e-2, 1e2),
        BTreeMap::new(),
    )
    .unwrap()
    .with_grid(n, Spacing::Logarithmic)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn euclidean_density_scales_homogeneously(dim in 2u32..7, t in 1e-2f64..1e2, lambda in 1e-2f64..1e2) {
        let m = ModelManifold::EuclideanRadial { dim };
        let lhs = m.volume_density(lambda * t).unwrap();
        let rhs = lambda.powi(dim as i32 - 1) * m.volume_density(t).unwrap();
        prop_assert!((lhs / rhs - 1.0).abs() < 1e-12);
    }

    #[test]
    fn margin_is_homogeneous_of_degree_p(
        p in 1.5f64..4.0,
        lambda in 0.1f64..10.0,
        seed in any::<u64>(),
    ) {
        let case = hardy_case(3, p, 0.0, 300);
        let grid = case.build_grid().unwrap();
        let u = &random_test_functions(&grid, 1, seed)[0];
        let base = evaluate_sides(&case, u).unwrap();
        let scaled = evaluate_sides(&case, &u.scaled(lambda)).unwrap();
        let factor = lambda.powf(p);
        prop_assert!((scaled.margin - factor * base.margin).abs() <= 1e-9 * factor * base.rhs.abs());
        prop_assert!((scaled.relative_margin() - base.relative_margin()).abs() < 1e-9);
    }

    #[test]
    fn classification_ignores_weight_scale(beta in -3.0f64..3.0, lambda in 1e-3f64..1e3) {
        let model = ModelManifold::EuclideanRadial { dim: 3 };
        let grid = build_grid(CoordinateRange::closed(0.1, 10.0), 400, Spacing::Logarithmic).unwrap();
        let w = WeightSpec::power(model, 2.0, beta).unwrap();
        prop_assert_eq!(classify_weight(&w, &grid, 20), classify_weight(&w.scaled(lambda), &grid, 20));
    }

    #[test]
    fn test_functions_are_seed_deterministic(seed in any::<u64>(), count in 1usize..12) {
        let grid = Arc::new(build_grid(CoordinateRange::closed(0.5, 4.0), 200, Spacing::Linear).unwrap());
        let a = random_test_functions(&grid, count, seed);
        let b = random_test_functions(&grid, count, seed);
        prop_assert_eq!(a.len(), count);
        for (u, v) in a.iter().zip(&b) {
            prop_assert_eq!(u.values(), v.values());
            prop_assert_eq!(u.values()[0], 0.0);
            prop_assert_eq!(*u.values().last().unwrap(), 0.0);
        }
    }

    #[test]
    fn euclidean_capacity_scales_like_power(
        dim in 2u32..6,
        p in 1.5f64..4.0,
        a in 0.1f64..2.0,
        ratio in 1.5f64..50.0,
        lambda in 0.1f64..10.0,
    ) {
        let m = ModelManifold::EuclideanRadial { dim };
        let b = a * ratio;
        let base = radial_capacity(&m, p, a, b).unwrap().value;
        let scaled = radial_capacity(&m, p, lambda * a, lambda * b).unwrap().value;
        let expect = lambda.powf(dim as f64 - p) * base;
        prop_assert!((scaled / expect - 1.0).abs() < 1e-8, "{} vs {}", scaled, expect);
    }

    #[test]
    fn hardy_quotient_respects_constant(
        dim in 3u32..6,
        p in 1.5f64..2.9,
        alpha in -1.0f64..0.4,
        seed in any::<u64>(),
    ) {
        let case = hardy_case(dim, p, alpha, 400);
        let grid = case.build_grid().unwrap();
        for u in random_test_functions(&grid, 8, seed) {
            let sides = evaluate_sides(&case, &u).unwrap();
            prop_assert!(sides.holds(1e-6), "margin {} rhs {}", sides.margin, sides.rhs);
        }
    }

    #[test]
    fn canonical_json_round_trips_floats(values in prop::collection::vec(any::<f64>(), 1..32)) {
        let finite: Vec<f64> = values.into_iter().filter(|v| v.is_finite()).collect();
        let text = to_canonical_json(&finite).unwrap();
        let back: Vec<f64> = serde_json::from_str(&text).unwrap();
        prop_assert_eq!(back, finite);
    }

    #[test]
    fn grid_function_scaling_is_linear(lambda in -5.0f64..5.0, seed in any::<u64>()) {
        let grid = Arc::new(build_grid(CoordinateRange::closed(0.0, 1.0), 100, Spacing::Linear).unwrap());
        let u: &GridFunction = &random_test_functions(&grid, 1, seed)[0];
        let v = u.scaled(lambda);
        for (a, b) in u.values().iter().zip(v.values()) {
            prop_assert_eq!(lambda * a, *b);
        }
    }
}
