mod common;

use common::*;
use nalgebra::{Rotation3, Vector3};
use ortholog_core::analysis::{conjugate, trace_curve, verify_sphere};
use ortholog_core::orthology::{construct_orthologic, impose_five_orthogonal, pair_tolerance, Tetrahedron};
use ortholog_core::pedal::{chain_sphere_residual, isogonal_conjugate};
use ortholog_core::solver::{orthosect_residuals, solve, SolverConfig};
use ortholog_core::Tolerance;
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn host_and_partner(seed: u64) -> Option<(Tetrahedron, Tetrahedron)> {
    let a = random_host(&mut ChaCha8Rng::seed_from_u64(seed));
    let b = *solve(&a, &SolverConfig::new(seed, 6)).ok()?.solutions.first()?;
    Some((a, b))
}

fn moved(t: &Tetrahedron, rot: &Rotation3<f64>, shift: &Vector3<f64>, k: f64) -> Tetrahedron {
    Tetrahedron::new(t.vertices().map(|p| P::from(rot * p.coords * k + shift))).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn similarity_preserves_orthosection(
        seed in 0u64..1000,
        axis in prop::array::uniform3(-1.0f64..1.0),
        angle in 0.0f64..std::f64::consts::TAU,
        shift in prop::array::uniform3(-10.0f64..10.0),
        k in 0.1f64..10.0,
    ) {
        let Some((a, b)) = host_and_partner(seed) else { return Ok(()) };
        let axis = Vector3::from(axis);
        prop_assume!(axis.norm() > 0.1);
        let rot = Rotation3::from_axis_angle(&nalgebra::Unit::new_normalize(axis), angle);
        let shift = Vector3::from(shift);
        let (a2, b2) = (moved(&a, &rot, &shift, k), moved(&b, &rot, &shift, k));
        let tol = pair_tolerance(&a2, &b2).unwrap();
        prop_assert!(orthosect_residuals(&a2, &b2, tol.scene_scale).unwrap().max_abs() < 1e-9);
        let s = verify_sphere(&a2, &b2, &tol).unwrap();
        prop_assert!(s.max_residual < 1e-9);
    }

    #[test]
    fn common_relabeling_preserves_orthosection(seed in 0u64..1000, perm in Just(()).prop_perturb(|_, mut rng| {
        let mut p = [0usize, 1, 2, 3];
        for i in (1..4).rev() {
            p.swap(i, rng.random_range(0..=i));
        }
        p
    })) {
        let Some((a, b)) = host_and_partner(seed) else { return Ok(()) };
        let (a2, b2) = (a.permuted(perm), b.permuted(perm));
        let tol = pair_tolerance(&a2, &b2).unwrap();
        prop_assert!(orthosect_residuals(&a2, &b2, tol.scene_scale).unwrap().max_abs() < 1e-9);
    }

    #[test]
    fn constructed_partners_are_orthologic_for_any_offsets(
        seed in 0u64..1000,
        center in prop::array::uniform3(-2.0f64..2.0),
        offsets in prop::array::uniform4(-2.0f64..2.0),
    ) {
        let a = random_host(&mut ChaCha8Rng::seed_from_u64(seed));
        let o = P::from(Vector3::from(center));
        let Ok(b) = construct_orthologic(&a, &o, Some(offsets)) else { return Ok(()) };
        let s = scale_of(&[&a, &b]);
        prop_assume!(s < 50.0);
        let (oa, spread) = orthology_center(&a, &b);
        prop_assert!(spread < 1e-9 * s);
        prop_assert!((oa - o).norm() < 1e-9 * s);
    }
}

#[test]
fn incenter_is_its_own_isogonal_conjugate() {
    let tri = [P::new(0.0, 0.0, 0.0), P::new(4.0, 0.0, 0.0), P::new(1.0, 3.0, 0.5)];
    let (a, b, c) = ((tri[1] - tri[2]).norm(), (tri[0] - tri[2]).norm(), (tri[0] - tri[1]).norm());
    let incenter = P::from((tri[0].coords * a + tri[1].coords * b + tri[2].coords * c) / (a + b + c));
    let tol = Tolerance::for_points(&tri).unwrap();
    let q = isogonal_conjugate(&incenter, &tri, &tol).unwrap();
    assert!((q - incenter).norm() < 1e-12);
    let centroid = P::from((tri[0].coords + tri[1].coords + tri[2].coords) / 3.0);
    let lemoine = P::from((tri[0].coords * a * a + tri[1].coords * b * b + tri[2].coords * c * c) / (a * a + b * b + c * c));
    assert!((isogonal_conjugate(&centroid, &tri, &tol).unwrap() - lemoine).norm() < 1e-12);
}

#[test]
fn curve_of_symmetric_host_is_symmetric() {
    // Mirror image under x -> -x swaps vertices 1 and 2 and fixes the rest.
    let a = Tetrahedron::from_coords([[-1.0, 0.0, 0.0], [1.0, 0.0, 0.0], [0.0, 1.8, 0.0], [0.0, 0.5, 1.4]]).unwrap();
    let tol = Tolerance::for_points(a.vertices()).unwrap();
    let trace = trace_curve(&a, 3, None, 64, &tol).unwrap();
    let mut worst = 0.0_f64;
    let mut checked = 0;
    for line in &trace.polylines {
        for q in line.points.iter().step_by(7) {
            let p = trace.frame.to_3d(*q);
            let mirror = P::new(-p.x, p.y, p.z);
            let r = chain_sphere_residual(&trace.host, &mirror, &tol).unwrap();
            if let Some(m) = r.iter().map(|x| x.abs()).min_by(f64::total_cmp) {
                worst = worst.max(m);
                checked += 1;
            }
        }
    }
    assert!(checked > 20, "{checked}");
    assert!(worst < 1e-6, "{worst}");
}

#[test]
fn conjugate_partner_orthosects() {
    let (a, b) = host_and_partner(3).unwrap();
    let tol = pair_tolerance(&a, &b).unwrap();
    let c = conjugate(&a, &b, &tol).unwrap();
    assert!(orthosect_residuals(&a, &c, tol.scene_scale).unwrap().max_abs() < 1e-8);
    assert!(c.max_vertex_distance(&b) > 1e-3 * tol.scene_scale);
}

#[test]
fn projected_partners_have_concurrent_perpendiculars() {
    let mut rng = ChaCha8Rng::seed_from_u64(31);
    for skip in 0..6 {
        let a = random_host(&mut rng);
        let guess = random_host(&mut rng);
        let b = impose_five_orthogonal(&a, &guess, skip).unwrap();
        let s = scale_of(&[&a, &b]);
        let (_, sa) = orthology_center(&a, &b);
        let (_, sb) = orthology_center(&b, &a);
        assert!(sa.max(sb) <= 1e-8 * s, "{sa} {sb}");
    }
}
