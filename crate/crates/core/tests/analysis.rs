mod common;

use common::*;
use ortholog_core::analysis::{conjugate, conjugate_sources, trace_curve, verify_sphere};
use ortholog_core::export::{svg, FaceFigure};
use ortholog_core::orthology::{find_labeling, pair_tolerance, Tetrahedron};
use ortholog_core::pedal::isogonal_conjugate;
use ortholog_core::solver::{solve, trace_family, ConstraintSet, SolverConfig};
use ortholog_core::Tolerance;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn demo_pair() -> (Tetrahedron, Tetrahedron) {
    let a = Tetrahedron::from_coords([[0.0, 0.0, 0.0], [3.0, 0.2, 0.1], [0.7, 2.5, -0.3], [0.9, 0.8, 2.2]]).unwrap();
    let b = solve(&a, &SolverConfig::new(7, 4)).unwrap().solutions[0];
    (a, b)
}

#[test]
fn solver_pair_has_centered_sphere() {
    let (a, b) = demo_pair();
    let tol = pair_tolerance(&a, &b).unwrap();
    let s = verify_sphere(&a, &b, &tol).unwrap();
    assert!(!s.carrier.is_plane());
    assert!(s.max_residual <= 1e-8);
    assert!(s.midpoint_gap.unwrap() <= 1e-8);
}

#[test]
fn solver_output_needs_no_relabeling() {
    let (a, b) = demo_pair();
    let tol = pair_tolerance(&a, &b).unwrap();
    let l = find_labeling(&a, &b, &tol);
    assert_eq!(l.permutation, [0, 1, 2, 3]);
    assert!(l.max_residual < 1e-10);
}

#[test]
fn flat_partner_has_plane_carrier() {
    let a = random_host(&mut ChaCha8Rng::seed_from_u64(21));
    let cfg = SolverConfig {
        constraints: ConstraintSet { drop_intersection: None, flat: true },
        ..SolverConfig::new(21, 16)
    };
    let b = solve(&a, &cfg).unwrap().solutions[0];
    let tol = pair_tolerance(&a, &b).unwrap();
    let s = verify_sphere(&a, &b, &tol).unwrap();
    assert!(s.carrier.is_plane(), "{:?}", s.carrier);
    assert!(s.max_residual <= tol.eps_rel);
}

#[test]
fn conjugate_sources_are_isogonal_images() {
    let (a, b) = demo_pair();
    let tol = pair_tolerance(&a, &b).unwrap();
    let (projected, conjugated) = conjugate_sources(&a, &b, &tol).unwrap();
    for i in 0..4 {
        let face = a.face(i);
        let q = isogonal_conjugate(&projected[i], &face, &tol).unwrap();
        assert!((q - conjugated[i]).norm() < 1e-10 * tol.scene_scale);
        assert!((isogonal_by_barycentrics(&projected[i], &face) - q).norm() < 1e-10 * tol.scene_scale);
    }
    let c = conjugate(&a, &b, &tol).unwrap();
    let s_ab = verify_sphere(&a, &b, &tol).unwrap();
    let s_ac = verify_sphere(&a, &c, &tol).unwrap();
    assert!(s_ab.carrier.mismatch(&s_ac.carrier) <= 1e-8 * tol.scene_scale);
}

#[test]
fn family_trace_at_hundredth_scale() {
    let (a, b) = demo_pair();
    let s = pair_tolerance(&a, &b).unwrap().scene_scale;
    let branch = trace_family(&a, &b, 50, 0.01 * s).unwrap();
    assert_eq!(branch.samples.len(), 51);
    assert!(branch.max_residuals.iter().all(|&r| r <= 1e-9));
    assert!(branch.nullities.iter().all(|&n| n == 1));
    let back = trace_family(&a, &b, 5, -0.01 * s).unwrap();
    assert!(back.samples[1].max_vertex_distance(&branch.samples[1]) > 0.01 * s);
}

#[test]
fn svg_polylines_carry_every_trace_vertex() {
    let (a, _) = demo_pair();
    let tol = Tolerance::for_points(a.vertices()).unwrap();
    let trace = trace_curve(&a, 2, None, 32, &tol).unwrap();
    let (mut fig, _) = FaceFigure::for_face(&trace.host.face(3)).unwrap();
    fig.add_trace(&trace);
    let out = svg(&fig, 600.0);
    let pairs: usize = out
        .lines()
        .filter(|l| l.starts_with("<polyline"))
        .map(|l| l.matches(',').count())
        .sum();
    assert_eq!(pairs, trace.vertex_count());
    assert_eq!(out.matches("<polyline").count(), trace.polylines.len());
}
