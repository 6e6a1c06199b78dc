use std::f64::consts::{FRAC_PI_2, FRAC_PI_4, PI};

use proptest::prelude::*;
use sl2r::distance::{angle_difference, distance, distance_from_origin};
use sl2r::geodesic::{geodesic_hyperboloid, geodesic_jet, unit_speed_residual, GeodesicParams};
use sl2r::model::{HyperboloidCoords, Isometry, ProjectivePoint};
use sl2r::packing::pack;
use sl2r::quadrature::QuadratureSpec;
use sl2r::tiling::TilingParams;
use sl2r::volume::{ball_volume, jacobian_J, sector_volume, RadialCurve};

fn point() -> impl Strategy<Value = ProjectivePoint> {
    (0.0..1.2f64, -PI..PI, -0.6..0.6f64)
        .prop_map(|(r, theta, phi)| HyperboloidCoords::new(r, theta, phi).to_point().unwrap())
}

fn isometry() -> impl Strategy<Value = Isometry> {
    (point(), -PI..PI, -1.0..1.0f64).prop_map(|(p, omega, phi)| {
        Isometry::translation_to(&p).unwrap()
            * Isometry::rotation_about_origin_fibre(omega)
            * Isometry::fibre_translation(phi)
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(128))]

    #[test]
    fn composition_inverts(g in isometry(), h in isometry()) {
        let gh = g * h;
        prop_assert!((gh * gh.inverse()).projective_residual(&Isometry::identity()) < 1e-9);
        prop_assert!(gh.inverse().projective_residual(&(h.inverse() * g.inverse())) < 1e-9);
    }

    #[test]
    fn isometries_keep_points_interior(g in isometry(), p in point()) {
        prop_assert!(p.transform(&g).is_interior());
    }

    #[test]
    fn translations_move_origin(p in point()) {
        let to = Isometry::translation_to(&p).unwrap();
        let from = Isometry::translation_from(&p).unwrap();
        prop_assert!(ProjectivePoint::ORIGIN.transform(&to).approx_eq(&p, 1e-10));
        prop_assert!(p.transform(&from).approx_eq(&ProjectivePoint::ORIGIN, 1e-10));
    }

    #[test]
    fn chart_round_trip(r in 1e-6..3.0f64, theta in -PI..PI, phi in -1.5..1.5f64) {
        let back = HyperboloidCoords::new(r, theta, phi).to_point().unwrap().to_hyperboloid().unwrap();
        prop_assert!((back.r - r).abs() < 1e-9 * (1.0 + r));
        prop_assert!((back.phi - phi).abs() < 1e-12);
        prop_assert!(angle_difference(back.theta, theta).abs() < 1e-9);
    }

    #[test]
    fn closed_form_has_unit_speed(s in 0.0..3.0f64, alpha in -FRAC_PI_2..FRAC_PI_2) {
        prop_assert!(unit_speed_residual(s, alpha).unwrap().abs() < 1e-9);
    }

    #[test]
    fn distance_recovers_arc_length(s in 0.01..1.5f64, lambda in -PI..PI, alpha in -FRAC_PI_2..FRAC_PI_2) {
        let h = geodesic_hyperboloid(&GeodesicParams::new(s, lambda, alpha)).unwrap();
        let sol = distance_from_origin(&h.to_point().unwrap()).unwrap();
        prop_assert!((sol.distance - s).abs() < 1e-8, "s={} got {}", s, sol.distance);
    }

    #[test]
    fn distance_is_rotation_invariant(p in point(), omega in -PI..PI) {
        let d0 = distance_from_origin(&p).unwrap().distance;
        let d1 = distance_from_origin(&p.transform(&Isometry::rotation_about_origin_fibre(omega))).unwrap().distance;
        prop_assert!((d0 - d1).abs() < 1e-8);
    }

    #[test]
    fn distance_is_isometry_invariant_and_symmetric(p in point(), q in point(), g in isometry()) {
        let d = distance(&p, &q).unwrap();
        prop_assert!((d - distance(&q, &p).unwrap()).abs() < 1e-7);
        prop_assert!((d - distance(&p.transform(&g), &q.transform(&g)).unwrap()).abs() < 1e-7);
    }

    #[test]
    fn jacobian_matches_finite_differences(s in 0.05..1.5f64, alpha in 0.0..1.56f64) {
        prop_assume!((alpha - FRAC_PI_4).abs() > 1e-3);
        let h = 1e-5;
        let f = |s: f64, a: f64| { let g = geodesic_jet(s, a).unwrap(); (g.r, g.phi) };
        let (rsp, psp) = f(s + h, alpha);
        let (rsm, psm) = f(s - h, alpha);
        let (rap, pap) = f(s, alpha + h);
        let (ram, pam) = f(s, alpha - h);
        let fd = ((rsp - rsm) * (pap - pam) - (rap - ram) * (psp - psm)) / (4.0 * h * h);
        let j = jacobian_J(s, alpha).unwrap();
        prop_assert!((j - fd).abs() <= 1e-6 * j.abs(), "J={} fd={}", j, fd);
    }

    #[test]
    fn sector_volume_is_additive(r0 in 0.1..1.5f64, amp in 0.0..0.5f64, cut in 0.05..0.95f64, height in 0.1..2.0f64) {
        let spec = QuadratureSpec::default();
        let curve = RadialCurve::from_fn(0.0, 1.0, move |t| r0 + amp * (3.0 * t).sin()).unwrap();
        let (left, right) = curve.split(cut).unwrap();
        let whole = sector_volume(&curve, height, &spec).unwrap();
        let parts = sector_volume(&left, height, &spec).unwrap() + sector_volume(&right, height, &spec).unwrap();
        prop_assert!((whole - parts).abs() < 1e-9 * whole.max(1.0));
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn ball_volume_grows(a in 0.0..1.5f64, b in 0.0..1.5f64) {
        prop_assume!((a - b).abs() > 1e-3);
        let (lo, hi) = if a < b { (a, b) } else { (b, a) };
        let spec = QuadratureSpec::default();
        prop_assert!(ball_volume(lo, &spec).unwrap() < ball_volume(hi, &spec).unwrap());
    }

    #[test]
    fn packing_density_is_a_fraction(p in 3u32..16, q in 3u32..40) {
        prop_assume!(TilingParams::is_valid(p, q));
        let r = pack(&TilingParams::new(p, q).unwrap(), &QuadratureSpec::default()).unwrap();
        prop_assert!(r.density > 0.0 && r.density < 1.0);
        prop_assert!(r.rho_opt <= r.rho_candidates.half_height);
        prop_assert!(r.vol_ball < r.vol_prism);
    }
}
