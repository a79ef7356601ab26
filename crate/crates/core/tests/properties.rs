use proptest::prelude::*;

use qcarnot::cycle::{cycle_report, pressure_adiabatic, CycleSpec};
use qcarnot::maxent::{equilibrium_state, solve_truncated, DEFAULT_TOL};
use qcarnot::oracle::stationary_family;
use qcarnot::series::{moment_sum, partition_sum};
use qcarnot::SpectrumModel;

fn model() -> impl Strategy<Value = SpectrumModel> {
    prop_oneof![Just(SpectrumModel::SquareWell), Just(SpectrumModel::Harmonic)]
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn force_times_width_is_twice_energy(m in model(), n in 1usize..500, v in 1e-2f64..1e2) {
        let e = m.level_energy(n, v).unwrap();
        let f = m.level_force(n, v).unwrap();
        prop_assert!((f * v - 2.0 * e).abs() <= 2.0 * f64::EPSILON * 2.0 * e);
    }

    #[test]
    fn adiabatic_pressure_matches_isoenergetic_at_start(e in 1e-3f64..1e3, v in 1e-2f64..1e2) {
        let p = pressure_adiabatic(e, v, v).unwrap();
        prop_assert!((p * v - 2.0 * e).abs() <= 4.0 * f64::EPSILON * e);
    }

    #[test]
    fn sums_increase_with_alpha(m in model(), a in 0.01f64..0.98, da in 1e-3f64..0.01) {
        let b = a + da;
        prop_assert!(partition_sum(m, b, 1e-12).unwrap().value > partition_sum(m, a, 1e-12).unwrap().value);
        let mean = |x: f64| moment_sum(m, x, 1e-13).unwrap().value / partition_sum(m, x, 1e-13).unwrap().value;
        prop_assert!(mean(b) > mean(a));
    }

    #[test]
    fn looser_tolerance_stays_within_its_tail_bound(m in model(), a in 0.05f64..0.999, tol in 1e-12f64..1e-6) {
        let fine = partition_sum(m, a, tol).unwrap();
        let coarse = partition_sum(m, a, 10.0 * tol).unwrap();
        prop_assert!(coarse.tail_bound <= 10.0 * tol * coarse.value);
        prop_assert!((fine.value - coarse.value).abs() <= coarse.tail_bound + 4.0 * f64::EPSILON * fine.value);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn clausius_holds_for_feasible_cycles(
        v1 in 0.2f64..5.0,
        r12 in 1.001f64..10.0,
        r23 in 1.001f64..10.0,
        k in 1.0f64..50.0,
    ) {
        let spec = CycleSpec::new(v1, v1 * r12, v1 * r12 * r23, k / (v1 * v1));
        spec.validate(SpectrumModel::SquareWell).unwrap();
        let r = cycle_report(&spec).unwrap();
        prop_assert!(r.clausius_residual.abs() <= 1e-12);
        prop_assert!(r.w_net > 0.0);
        prop_assert!(r.eta > 0.0 && r.eta < 1.0);
    }

    #[test]
    fn equilibrium_invariants(m in model(), x in 0.0f64..1.0) {
        // Spread widths geometrically over [1.05·boundary, 60].
        let lo = 1.05 * m.ground_coefficient().sqrt();
        let lambda = lo * (60.0 / lo).powf(x);
        let s = equilibrium_state(m, lambda, DEFAULT_TOL).unwrap();
        prop_assert!(s.alpha > 0.0 && s.alpha < 1.0);
        prop_assert!(s.constraint_residual() <= 1e-10);
        prop_assert!(s.normalization_residual() <= 1e-12);
        prop_assert!(s.entropy > 0.0 && s.temperature > 0.0);
        prop_assert!((s.entropy - s.von_neumann_entropy()).abs() <= 1e-10);
    }

    #[test]
    fn stationary_family_independent_of_reference_pair(levels in 3usize..9, frac in 0.02f64..0.98) {
        let c = SpectrumModel::SquareWell.coefficients(levels);
        let target = c[0] + frac * (c[levels - 1] - c[0]);
        let p = solve_truncated(&c, target, 1e-13).unwrap();
        for k in 0..levels {
            for l in 0..levels {
                if k == l {
                    continue;
                }
                let q = stationary_family(&p, &c, k, l);
                for (a, b) in q.iter().zip(&p) {
                    prop_assert!((a - b).abs() <= 1e-8, "k={} l={}: {} vs {}", k, l, a, b);
                }
            }
        }
    }
}
