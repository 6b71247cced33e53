use proptest::prelude::*;
use sparc_core::theory::{rate_fn_f, rate_fn_f_oracle};
use sparc_core::RateFnArgs;

fn f(x: f64, y: f64, z: f64) -> f64 {
    rate_fn_f(RateFnArgs::new(x, y, z).unwrap()).unwrap()
}

fn oracle(x: f64, y: f64, z: f64) -> f64 {
    rate_fn_f_oracle(RateFnArgs::new(x, y, z).unwrap()).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(2000))]

    #[test]
    fn decreasing_in_z(x in 0.05f64..8.0, y in 0.05f64..8.0, u in 0.0f64..0.98, v in 0.01f64..1.0) {
        let z1 = u * (x + y) + 1e-3;
        let z2 = z1 + v * (x + y - z1);
        prop_assume!(z2 - z1 > 1e-6 * (x + y));
        prop_assert!(f(x, y, z2) < f(x, y, z1));
    }

    #[test]
    fn increasing_in_x(x in 0.05f64..8.0, y in 0.05f64..8.0, u in 0.01f64..0.98, grow in 0.01f64..2.0) {
        let z = u * (x + y);
        prop_assert!(f(x * (1.0 + grow), y, z) > f(x, y, z));
    }

    #[test]
    fn minimized_over_y_at_x_minus_z(x in 0.1f64..8.0, u in 0.01f64..0.99, y in 0.01f64..10.0) {
        let z = u * x;
        let floor = 0.5 * (x / z).ln();
        prop_assert!((f(x, x - z, z) - floor).abs() <= 1e-12 * floor.max(1.0));
        prop_assert!(f(x, y, z) >= floor - 1e-12);
    }

    #[test]
    fn vanishes_beyond_sum(x in 0.01f64..8.0, y in 0.01f64..8.0, excess in 0.0f64..5.0) {
        prop_assert_eq!(f(x, y, x + y + excess), 0.0);
    }

    #[test]
    fn matches_chernoff_oracle(x in 0.05f64..6.0, y in 0.05f64..6.0, u in 0.02f64..1.2) {
        let z = u * (x + y);
        prop_assert!((f(x, y, z) - oracle(x, y, z)).abs() < 1e-8);
    }

    #[test]
    fn nonnegative_and_finite(x in 1e-3f64..1e3, y in 1e-3f64..1e3, z in 1e-3f64..1e3) {
        let v = f(x, y, z);
        prop_assert!(v.is_finite() && v >= 0.0);
    }
}

#[test]
fn oracle_grid_agreement() {
    let grid: Vec<f64> = (0..20).map(|k| 0.05 * 1.35f64.powi(k)).collect();
    for &x in &grid {
        for &y in &grid {
            for &z in &grid {
                let (a, b) = (f(x, y, z), oracle(x, y, z));
                assert!((a - b).abs() < 1e-8, "f({x}, {y}, {z}) = {a}, oracle {b}");
            }
        }
    }
}

#[test]
fn rejects_nonpositive_arguments() {
    for (x, y, z) in [(0.0, 1.0, 1.0), (1.0, -1.0, 1.0), (1.0, 1.0, f64::NAN), (f64::INFINITY, 1.0, 1.0)] {
        assert!(RateFnArgs::new(x, y, z).is_err());
    }
}
