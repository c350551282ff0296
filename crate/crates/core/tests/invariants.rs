use proptest::prelude::*;
use warpgeom::monotonic::{admissible_alpha, trace_v2};
use warpgeom::suite::{geodesic_sphere_suite, monotonicity_suite, slice_suite};
use warpgeom::{InequalityReport64, ManifoldSpec64, SubmanifoldFamily, SubmanifoldMesh64, Tolerances, Verdict, WarpProfile64};
use warpgeom::warping::Family;

fn consistent(r: &InequalityReport64, tol: &Tolerances) -> bool {
    // the Minkowski residual is measured against the volume
    let scale = if r.name == "hsiung_minkowski" { r.terms["vol"] } else { r.lhs.abs() };
    match r.verdict {
        Verdict::PreconditionUnmet => r.preconditions.iter().any(|p| !p.pass),
        Verdict::Equality => r.slack.abs() < tol.eq_tol * scale,
        Verdict::Violated => !r.slack.is_finite() || r.slack < -tol.check_tol * scale,
        Verdict::Holds => r.slack >= -tol.check_tol * scale && r.slack.abs() >= tol.eq_tol * scale,
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(12))]

    #[test]
    fn slices_are_equality_cases(seed in any::<u64>()) {
        let tol = Tolerances::default();
        for rec in slice_suite(seed, 1, 256, &tol).unwrap() {
            prop_assert!(!rec.any_violated(), "{:?}", rec.family);
            prop_assert!(rec.worst_equality_gap() < 1e-6, "{:?}: {}", rec.family, rec.worst_equality_gap());
            for r in &rec.reports {
                prop_assert!(consistent(r, &tol), "{r:?}");
                prop_assert_eq!(r.slack, r.rhs - r.lhs);
            }
        }
    }

    #[test]
    fn minkowski_vanishes_on_spheres(seed in any::<u64>()) {
        let tol = Tolerances::default();
        for rec in geodesic_sphere_suite(seed, 1, 256, &tol).unwrap() {
            let mink = rec.reports.iter().find(|r| r.name == "hsiung_minkowski").unwrap();
            prop_assert!(mink.lhs.abs() < 1e-6 * mink.terms["vol"], "{mink:?}");
        }
    }

    #[test]
    fn admissible_traces_are_monotone(seed in any::<u64>()) {
        for rec in monotonicity_suite(seed, 2, 256).unwrap() {
            prop_assert!(rec.is_clean(), "{rec:?}");
            for b in rec.bounds.bounds.values().filter(|b| b.applicable) {
                prop_assert!(b.value <= rec.bounds.measured * (1.0 + 1e-4));
            }
        }
    }

    #[test]
    fn truncated_volume_grows(c in -1.5f64..0.0, cap in 0.2f64..1.5, n in 3usize..6) {
        let spec = ManifoldSpec64::new(n, Family::SpaceForm { c });
        let profile = WarpProfile64::with_default_range(&spec).unwrap();
        let family = SubmanifoldFamily::RadialCone { k: 2, cap_angle: cap, r_lo: 0.0, r_hi: 3.0 };
        let mesh = SubmanifoldMesh64::build(&profile, &family, 256).unwrap();
        let grid: Vec<f64> = (1..=12).map(|i| 0.25 * i as f64).collect();
        let tr = trace_v2(&mesh, &profile, admissible_alpha(&mesh), &grid).unwrap();
        prop_assert!(tr.volumes.windows(2).all(|w| w[1] > w[0]));
        prop_assert!(tr.is_monotone());
    }
}
