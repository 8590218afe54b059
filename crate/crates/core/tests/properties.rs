use proptest::prelude::*;
use tgeo_core::fields::{hopf_field, meridian_field, singular_decomposition};
use tgeo_core::manifold::{Sphere, Vector};
use tgeo_core::rng;
use tgeo_core::sasaki::{lifted_plane_curvature, second_form_direct};
use tgeo_core::variation::{reduced_integrand, stable_s3_field};
use tgeo_core::{CheckResult, VerificationReport};

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn sphere_curvature_is_constant(d in 3usize..8, r in 0.3f64..4.0, seed in any::<u64>()) {
        let s = Sphere::new(d, r).unwrap();
        let mut g = rng::stream(seed, 0);
        let p = s.random_point_with(&mut g);
        prop_assert!((p.coords().norm() - r).abs() < 1e-12 * r.max(1.0));
        let x = s.random_tangent_with(&p, &mut g);
        let y = s.random_tangent_with(&p, &mut g);
        let k = s.sectional_curvature(&x, &y).unwrap();
        prop_assert!((k - 1.0 / (r * r)).abs() < 1e-9 / (r * r));
    }

    #[test]
    fn projection_is_idempotent(d in 3usize..8, seed in any::<u64>()) {
        let s = Sphere::unit(d).unwrap();
        let mut g = rng::stream(seed, 1);
        let p = s.random_point_with(&mut g);
        let w = Vector::from_fn(d, |i, _| (i as f64 + 0.5).sin());
        let once = s.project_to_tangent(&p, &w);
        let twice = s.project_to_tangent(&p, once.vec());
        prop_assert!((once.vec() - twice.vec()).amax() < 1e-13);
        prop_assert!(once.vec().dot(p.coords()).abs() < 1e-13);
    }

    #[test]
    fn hopf_decomposition_at_any_radius(m in 1usize..4, r in 0.5f64..3.0, seed in any::<u64>()) {
        let xi = hopf_field(m, r).unwrap();
        let p = xi.sphere().random_point(seed);
        let sd = singular_decomposition(&xi, &p).unwrap();
        prop_assert!(sd.relation_residual() < 1e-8);
        prop_assert!(sd.orthonormality_residual() < 1e-8);
        prop_assert!(sd.lambdas()[0].abs() < 1e-8);
        for l in &sd.lambdas()[1..] {
            prop_assert!((l - 1.0 / r).abs() < 1e-8);
        }
    }

    #[test]
    fn unit_hopf_is_totally_geodesic(m in 1usize..4, seed in any::<u64>()) {
        let xi = hopf_field(m, 1.0).unwrap();
        let p = xi.sphere().random_point(seed);
        prop_assert!(second_form_direct(&xi, &p, None).unwrap().max_abs() < 1e-6);
    }

    #[test]
    fn lifted_planes_stay_pinched(m in 1usize..3, seed in any::<u64>()) {
        let xi = hopf_field(m, 1.0).unwrap();
        let s = *xi.sphere();
        let mut g = rng::stream(seed, 2);
        let p = s.random_point_with(&mut g);
        let f = s.random_orthonormal_frame_with(&p, &mut g).unwrap();
        let k = lifted_plane_curvature(&xi, &f.vectors()[0], &f.vectors()[1]).unwrap();
        prop_assert!((0.25 - 1e-9..=1.25 + 1e-9).contains(&k), "{k}");
    }

    #[test]
    fn meridian_is_never_totally_geodesic(seed in any::<u64>()) {
        let axis = Vector::from_row_slice(&[0.0, 0.0, 0.0, 1.0]);
        let mer = meridian_field(Sphere::unit(4).unwrap(), axis).unwrap();
        let p = mer.sphere().random_point(seed);
        let theta = mer.polar_angle(&p).unwrap();
        prop_assume!(theta > 0.1 && theta < std::f64::consts::PI - 0.1);
        prop_assert!(second_form_direct(&mer, &p, None).unwrap().max_abs() > 0.1);
    }

    #[test]
    fn s3_integrand_dominates_half_norm(seed in any::<u64>()) {
        let v = stable_s3_field(seed, 3).unwrap();
        let p = v.xi().sphere().random_point(seed ^ 0x5a5a);
        let r = reduced_integrand(&v, &p, None).unwrap();
        prop_assert!(r.value >= 0.5 * r.eta_sq - 1e-9);
    }

    #[test]
    fn report_round_trips(res in proptest::collection::vec(0.0f64..1.0, 1..6), tol in 1e-6f64..1.0) {
        let mut report = VerificationReport::new("codazzi");
        for (i, r) in res.iter().enumerate() {
            report.push(CheckResult::new(format!("check {i}"), i + 1, *r, tol));
        }
        let back = VerificationReport::from_json(&report.to_json()).unwrap();
        prop_assert_eq!(back.passed(), res.iter().all(|r| *r <= tol));
        prop_assert_eq!(back.checks.len(), res.len());
        prop_assert_eq!(back.samples, res.len());
    }
}
