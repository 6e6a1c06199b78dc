mod common;

use approx::assert_abs_diff_eq;
use common::{rel_err, PACKING_TABLE};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use sl2r::distance::{distance_from_origin, distance_to_coords, DistanceOptions};
use sl2r::mesh::sphere_mesh;
use sl2r::model::{EuclideanModelPoint, HyperboloidCoords, ProjectivePoint};
use sl2r::packing::{pack, LimitingConstraint};
use sl2r::quadrature::QuadratureSpec;
use sl2r::tiling::{build_generators, prism_volume, verify_presentation, vertex_radius, TilingParams};
use sl2r::volume::{ball_volume, ball_volume_mc_oracle};

#[test]
fn packing_table_rows() {
    let spec = QuadratureSpec::default();
    for &(p, q, rho, vb, vp, delta) in &PACKING_TABLE {
        let r = pack(&TilingParams::new(p, q).unwrap(), &spec).unwrap();
        assert!((r.rho_opt - rho).abs() < 1e-6, "({p},{q}) rho {}", r.rho_opt);
        assert!(rel_err(r.vol_ball, vb) < 1e-5, "({p},{q}) ball {}", r.vol_ball);
        assert!(rel_err(r.vol_prism, vp) < 1e-5, "({p},{q}) prism {}", r.vol_prism);
        assert!((r.density - delta).abs() < 1e-6, "({p},{q}) density {}", r.density);
    }
}

#[test]
fn limiting_constraints() {
    let spec = QuadratureSpec::default();
    let kind = |p, q| pack(&TilingParams::new(p, q).unwrap(), &spec).unwrap().limiting_constraint;
    assert_eq!(kind(3, 11), LimitingConstraint::HalfHeight);
    assert_eq!(kind(8, 10), LimitingConstraint::ScrewImage);
    assert_eq!(kind(20, 2000), LimitingConstraint::ScrewImage);
}

#[test]
fn distance_to_screw_image() {
    let d = build_generators(&TilingParams::new(8, 10).unwrap()).unwrap();
    let target = ProjectivePoint::ORIGIN.transform(&d.half_screw());
    assert_abs_diff_eq!(distance_from_origin(&target).unwrap().distance, 1.720942, epsilon = 2e-6);
}

#[test]
fn distance_examples() {
    let opts = DistanceOptions::default();
    let radial = distance_to_coords(&HyperboloidCoords::new(0.5, 0.0, 0.0), &opts).unwrap();
    assert_abs_diff_eq!(radial.distance, 0.5, epsilon = 1e-10);
    let fibre = distance_to_coords(&HyperboloidCoords::new(0.0, 0.0, 0.3), &opts).unwrap();
    assert_abs_diff_eq!(fibre.distance, 0.3, epsilon = 1e-10);
}

#[test]
fn ball_volume_examples() {
    let spec = QuadratureSpec::default();
    assert_eq!(ball_volume(0.0, &spec).unwrap(), 0.0);
    assert!(rel_err(ball_volume(0.237999, &spec).unwrap(), 0.057543) < 1e-5);
    let mc = ball_volume_mc_oracle(0.237999, 200_000, 7).unwrap();
    assert!((mc.estimate - 0.057543).abs() < 4.0 * mc.std_error);
}

#[test]
fn prism_examples() {
    let spec = QuadratureSpec::default();
    assert_abs_diff_eq!(vertex_radius(&TilingParams::new(3, 8).unwrap()), 0.40561640, epsilon = 1e-8);
    let d = build_generators(&TilingParams::new(3, 12).unwrap()).unwrap();
    assert!(rel_err(prism_volume(&d, &spec).unwrap(), 0.205617) < 1e-5);
}

#[test]
fn relators_for_far_vertices() {
    // Vertex fibres at r = 2.7 amplify rounding of the generators by about
    // e^{4r}, so the relators hold only to ~1e-8 in double precision.
    let d = build_generators(&TilingParams::new(20, 60).unwrap()).unwrap();
    let report = verify_presentation(&d, 1e-7);
    assert!(report.passed, "{:?}", report.checks);
    assert!(report.checks.iter().filter(|c| c.word != "b^q").all(|c| c.residual < 1e-10));
}

#[test]
fn sphere_mesh_vertices_are_at_the_radius() {
    let mesh = sphere_mesh(1.3, 64).unwrap();
    assert_eq!(mesh.triangles.len(), 8192);
    assert!(mesh.is_watertight());
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    for _ in 0..100 {
        let v = mesh.vertices[rng.random_range(0..mesh.vertices.len())];
        let p = EuclideanModelPoint::new(v[0], v[1], v[2]).to_point();
        assert_abs_diff_eq!(distance_from_origin(&p).unwrap().distance, 1.3, epsilon = 1e-6);
    }
}
