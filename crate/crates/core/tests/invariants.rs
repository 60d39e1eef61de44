use proptest::prelude::*;

use charlab_core::arith::{gcd, kronecker};
use charlab_core::characters::CharacterGroup;
use charlab_core::dickman::dickman_rho;
use charlab_core::experiments::format_real;
use charlab_core::moments::{divisor_counts, moment_character_side, moment_divisor_side_exact};
use charlab_core::polya::bspline_kernel;
use charlab_core::smooth::psi_count;
use charlab_core::weight::WeightFunction;

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn formatted_reals_round_trip(v in any::<f64>().prop_filter("finite", |v| v.is_finite())) {
        let s = format_real(v);
        prop_assert_eq!(s.parse::<f64>().unwrap(), v);
    }

    #[test]
    fn characters_are_completely_multiplicative(q in 1u64..300, a in 1i64..2000, b in 1i64..2000, idx in any::<u64>()) {
        let g = CharacterGroup::new(q).unwrap();
        let chi = g.character(idx % g.order()).unwrap();
        let lhs = chi.evaluate(a * b);
        let rhs = chi.evaluate(a) * chi.evaluate(b);
        prop_assert!((lhs - rhs).norm() < 1e-9);
        if gcd((a * b) as u64, q) != 1 {
            prop_assert_eq!(lhs.norm(), 0.0);
        } else {
            prop_assert!((lhs.norm() - 1.0).abs() < 1e-9);
        }
        prop_assert!((chi.evaluate(a + q as i64) - chi.evaluate(a)).norm() < 1e-9);
    }

    #[test]
    fn divisor_table_has_full_mass(k in 1u32..5, x in 1u64..30) {
        prop_assume!(x.pow(k) <= 200_000);
        let t = divisor_counts(k, x as f64, &WeightFunction::Unit, 1).unwrap();
        let total: i64 = t.exact_counts().unwrap().iter().sum();
        prop_assert_eq!(total, (x as i64).pow(k));
    }

    #[test]
    fn moment_identity_in_range(q in 2u64..120, k in 1u32..4, x in 1u64..12) {
        prop_assume!(x.pow(k) <= q);
        let c = moment_character_side(k, x as f64, q, &WeightFunction::Unit).unwrap();
        let d = moment_divisor_side_exact(k, x as f64, q, &WeightFunction::Unit, false).unwrap();
        prop_assert_eq!(c.exact, Some(d));
    }

    #[test]
    fn kronecker_is_multiplicative_in_n(d in -5000i64..5000, m in 1u64..5000, n in 1u64..5000) {
        prop_assume!(d % 4 == 0 || d.rem_euclid(4) == 1);
        prop_assert_eq!(kronecker(d, m * n), kronecker(d, m) * kronecker(d, n));
    }

    #[test]
    fn rho_is_decreasing_and_bounded(u in 0.0f64..12.0, h in 0.001f64..1.0) {
        let a = dickman_rho(u).unwrap();
        let b = dickman_rho(u + h).unwrap();
        prop_assert!(b <= a);
        prop_assert!(b > 0.0 && a <= 1.0);
    }

    #[test]
    fn smooth_counts_grow_with_y(x in 1u64..50_000, y in 2u64..400) {
        let lo = psi_count(x as f64, y as f64, 0).unwrap();
        let hi = psi_count(x as f64, (y + 1) as f64, 0).unwrap();
        prop_assert!(lo <= hi && hi <= x);
    }

    #[test]
    fn bspline_kernel_is_nonnegative_and_even(r in 1u32..6, t in -4.0f64..4.0) {
        let v = bspline_kernel(r, t).unwrap();
        prop_assert!(v >= 0.0);
        prop_assert!((v - bspline_kernel(r, -t).unwrap()).abs() < 1e-12);
    }
}

#[test]
fn bspline_kernel_mass_is_a_power_of_two() {
    for r in 1..=5u32 {
        let (n, half) = (400_000, f64::from(r));
        let h = 2.0 * half / n as f64;
        let s: f64 = (0..n).map(|i| bspline_kernel(r, -half + (i as f64 + 0.5) * h).unwrap()).sum();
        let mass = f64::from(1u32 << r);
        assert!((s * h - mass).abs() < 1e-6 * mass, "r={r}: {}", s * h);
    }
}

#[test]
fn round_census_respects_the_hardy_ramanujan_bound() {
    use charlab_core::experiments::{run_experiment, Cell, ExperimentConfig};
    let report = run_experiment(&ExperimentConfig::new("round-census").param("x", 1_000_000)).unwrap();
    assert_eq!(report.output.summary_value("hr_bound_holds"), Some(&Cell::Bool(true)));
}
