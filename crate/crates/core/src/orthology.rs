//! Tetrahedra, orthology predicates and orthology centers.
//!
//! Vertices are indexed `0..4` in code; user-facing labels (reports, CLI,
//! `Display`) use `1..=4`. The face "opposite" vertex `i` is the triangle
//! spanned by the other three vertices in ascending order.

use nalgebra::{DMatrix, DVector, Matrix3};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geom::{concurrency_point, diameter, meet_planes, Line, Plane, Point, Tolerance, Vector};

/// A pair of complementary edges: edge `a_edge` of the first tetrahedron
/// and edge `b_edge` of the second, with `{a_edge} ∪ {b_edge} = {0,1,2,3}`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct EdgePairing {
    pub a_edge: (usize, usize),
    pub b_edge: (usize, usize),
}

/// Edges in canonical order: 12, 13, 14, 23, 24, 34.
pub const EDGES: [(usize, usize); 6] = [(0, 1), (0, 2), (0, 3), (1, 2), (1, 3), (2, 3)];

/// Residual arrays throughout the crate follow this order.
pub const PAIRINGS: [EdgePairing; 6] = [
    EdgePairing { a_edge: (0, 1), b_edge: (2, 3) },
    EdgePairing { a_edge: (0, 2), b_edge: (1, 3) },
    EdgePairing { a_edge: (0, 3), b_edge: (1, 2) },
    EdgePairing { a_edge: (1, 2), b_edge: (0, 3) },
    EdgePairing { a_edge: (1, 3), b_edge: (0, 2) },
    EdgePairing { a_edge: (2, 3), b_edge: (0, 1) },
];

/// Position of the unordered edge `{i, j}` in [`EDGES`].
pub fn edge_index(i: usize, j: usize) -> usize {
    let (i, j) = if i < j { (i, j) } else { (j, i) };
    EDGES
        .iter()
        .position(|&e| e == (i, j))
        .unwrap_or_else(|| panic!("no edge {{{i}, {j}}}"))
}

/// One-based label such as `"12"`.
pub fn edge_label(e: (usize, usize)) -> String {
    format!("{}{}", e.0 + 1, e.1 + 1)
}

/// The three vertex indices other than `i`, ascending.
pub fn face_indices(i: usize) -> [usize; 3] {
    match i {
        0 => [1, 2, 3],
        1 => [0, 2, 3],
        2 => [0, 1, 3],
        3 => [0, 1, 2],
        _ => panic!("vertex index {i} out of range"),
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Tetrahedron {
    vertices: [Point; 4],
    signed_volume: f64,
}

fn signed_volume(v: &[Point; 4]) -> f64 {
    Matrix3::from_columns(&[v[1] - v[0], v[2] - v[0], v[3] - v[0]]).determinant() / 6.0
}

impl Tetrahedron {
    pub fn new(vertices: [Point; 4]) -> Result<Self> {
        if vertices.iter().any(|p| p.iter().any(|c| !c.is_finite())) {
            return Err(Error::InvalidArgument("non-finite vertex coordinate".into()));
        }
        Ok(Self {
            vertices,
            signed_volume: signed_volume(&vertices),
        })
    }

    pub fn from_coords(coords: [[f64; 3]; 4]) -> Result<Self> {
        Self::new(coords.map(|c| Point::new(c[0], c[1], c[2])))
    }

    pub fn coords(&self) -> [[f64; 3]; 4] {
        self.vertices.map(|p| [p.x, p.y, p.z])
    }

    pub fn vertices(&self) -> &[Point; 4] {
        &self.vertices
    }

    pub fn vertex(&self, i: usize) -> Point {
        self.vertices[i]
    }

    pub fn signed_volume(&self) -> f64 {
        self.signed_volume
    }

    pub fn is_flat(&self, tol: &Tolerance) -> bool {
        self.signed_volume.abs() < tol.eps_rel * tol.scene_scale.powi(3)
    }

    pub fn diameter(&self) -> f64 {
        diameter(&self.vertices)
    }

    pub fn centroid(&self) -> Point {
        Point::from(self.vertices.iter().map(|p| p.coords).sum::<Vector>() / 4.0)
    }

    pub fn face(&self, i: usize) -> [Point; 3] {
        face_indices(i).map(|k| self.vertices[k])
    }

    pub fn face_plane(&self, i: usize) -> Result<Plane> {
        let [p, q, r] = self.face(i);
        Plane::through(&p, &q, &r)
    }

    pub fn edge_line(&self, i: usize, j: usize) -> Result<Line> {
        Line::through(&self.vertices[i], &self.vertices[j])
    }

    /// Relabeled copy whose vertex `i` is `self.vertex(perm[i])`.
    pub fn permuted(&self, perm: [usize; 4]) -> Tetrahedron {
        Tetrahedron::new(perm.map(|k| self.vertices[k])).expect("finite vertices stay finite")
    }

    pub fn translated(&self, v: &Vector) -> Tetrahedron {
        Tetrahedron::new(self.vertices.map(|p| p + v)).expect("finite translation")
    }

    /// Largest vertex-wise distance to another tetrahedron with the same
    /// labeling.
    pub fn max_vertex_distance(&self, other: &Tetrahedron) -> f64 {
        self.vertices
            .iter()
            .zip(other.vertices.iter())
            .map(|(p, q)| (p - q).norm())
            .fold(0.0, f64::max)
    }

    fn check_edges(&self, tag: char, eps: f64) -> Result<()> {
        for &(i, j) in &EDGES {
            if (self.vertices[i] - self.vertices[j]).norm() <= eps {
                return Err(Error::ZeroLengthEdge { tet: tag, edge: (i, j) });
            }
        }
        Ok(())
    }
}

/// Default tolerance for a pair of tetrahedra: scale is the diameter of all
/// eight vertices.
pub fn pair_tolerance(a: &Tetrahedron, b: &Tetrahedron) -> Result<Tolerance> {
    Tolerance::for_points(a.vertices().iter().chain(b.vertices().iter()))
}

/// `|(A_i - A_j)·(B_k - B_l)| / (|A_i - A_j| |B_k - B_l|)` for each pairing.
pub fn edge_orthogonality_residuals(
    a: &Tetrahedron,
    b: &Tetrahedron,
    tol: &Tolerance,
) -> Result<[f64; 6]> {
    a.check_edges('A', tol.eps_abs)?;
    b.check_edges('B', tol.eps_abs)?;
    Ok(PAIRINGS.map(|p| {
        let ea = a.vertex(p.a_edge.0) - a.vertex(p.a_edge.1);
        let eb = b.vertex(p.b_edge.0) - b.vertex(p.b_edge.1);
        ea.dot(&eb).abs() / (ea.norm() * eb.norm())
    }))
}

#[derive(Debug, Clone, PartialEq)]
pub struct OrthologyReport {
    pub residuals: [f64; 6],
    /// Lines through `A_i` perpendicular to the face of B opposite `B_i`.
    pub perpendiculars_a: [Line; 4],
    /// Lines through `B_i` perpendicular to the face of A opposite `A_i`.
    pub perpendiculars_b: [Line; 4],
    pub center_a: Point,
    pub center_b: Point,
    pub spread_a: f64,
    pub spread_b: f64,
}

fn perpendiculars(from: &Tetrahedron, onto: &Tetrahedron) -> Result<[Line; 4]> {
    let mut out = Vec::with_capacity(4);
    for i in 0..4 {
        let plane = onto.face_plane(i).map_err(|_| Error::FlatPartner)?;
        out.push(Line::new(from.vertex(i), plane.normal)?);
    }
    Ok(out.try_into().expect("four lines"))
}

pub fn orthology_centers(
    a: &Tetrahedron,
    b: &Tetrahedron,
    tol: &Tolerance,
) -> Result<OrthologyReport> {
    let residuals = edge_orthogonality_residuals(a, b, tol)?;
    let max = residuals.iter().copied().fold(0.0, f64::max);
    if max > tol.eps_rel {
        return Err(Error::NotOrthologic {
            residuals,
            max,
            threshold: tol.eps_rel,
        });
    }
    let perpendiculars_a = perpendiculars(a, b)?;
    let perpendiculars_b = perpendiculars(b, a)?;
    let ca = concurrency_point(&perpendiculars_a, tol)?;
    let cb = concurrency_point(&perpendiculars_b, tol)?;
    Ok(OrthologyReport {
        residuals,
        perpendiculars_a,
        perpendiculars_b,
        center_a: ca.point,
        center_b: cb.point,
        spread_a: ca.spread,
        spread_b: cb.spread,
    })
}

/// Canonical offsets: each face plane of the partner passes through the
/// corresponding vertex of `a`.
pub fn default_offsets(a: &Tetrahedron, center: &Point) -> [f64; 4] {
    std::array::from_fn(|i| {
        let n = (a.vertex(i) - center).normalize();
        n.dot(&a.vertex(i).coords)
    })
}

/// Builds a partner of `a` with orthology center `center`.
///
/// Face `i` of the result (opposite its vertex `i`) lies in the plane with
/// unit normal along `A_i - center` at signed offset `offsets[i]`.
pub fn construct_orthologic(
    a: &Tetrahedron,
    center: &Point,
    offsets: Option<[f64; 4]>,
) -> Result<Tetrahedron> {
    let tol = Tolerance::for_points(a.vertices().iter().chain(std::iter::once(center)))?;
    for i in 0..4 {
        if (a.vertex(i) - center).norm() <= tol.eps_abs {
            return Err(Error::InvalidArgument(format!(
                "orthology center coincides with vertex {}",
                i + 1
            )));
        }
    }
    let offsets = offsets.unwrap_or_else(|| default_offsets(a, center));
    let planes: Vec<Plane> = (0..4)
        .map(|i| Plane::new(a.vertex(i) - center, offsets[i] * (a.vertex(i) - center).norm()))
        .collect::<Result<_>>()?;
    let mut verts = [Point::origin(); 4];
    for (m, v) in verts.iter_mut().enumerate() {
        let [i, j, k] = face_indices(m);
        *v = meet_planes(&planes[i], &planes[j], &planes[k])?;
    }
    if diameter(&verts) <= tol.length() {
        return Err(Error::Degenerate(
            "all four face planes pass through a single point".into(),
        ));
    }
    Tetrahedron::new(verts)
}

/// Nearest point to `guess` (in the 12 partner coordinates) satisfying the
/// orthogonality conditions of every pairing except `skip`. The remaining
/// condition is left to hold or fail on its own.
pub fn impose_five_orthogonal(a: &Tetrahedron, guess: &Tetrahedron, skip: usize) -> Result<Tetrahedron> {
    if skip >= 6 {
        return Err(Error::InvalidArgument(format!("pairing index {skip} out of range")));
    }
    let mut m = DMatrix::zeros(5, 12);
    let mut row = 0;
    for (n, p) in PAIRINGS.iter().enumerate() {
        if n == skip {
            continue;
        }
        let ea = (a.vertex(p.a_edge.0) - a.vertex(p.a_edge.1)).normalize();
        for c in 0..3 {
            m[(row, 3 * p.b_edge.0 + c)] = ea[c];
            m[(row, 3 * p.b_edge.1 + c)] = -ea[c];
        }
        row += 1;
    }
    let x = DVector::from_iterator(12, guess.coords().iter().flatten().copied());
    let gram = (&m * m.transpose())
        .cholesky()
        .ok_or_else(|| Error::Degenerate("dependent orthogonality conditions".into()))?;
    let mut y = x;
    // One refinement pass removes the rounding left by the first projection.
    for _ in 0..2 {
        let r = &m * &y;
        y -= m.transpose() * gram.solve(&r);
    }
    Tetrahedron::from_coords(std::array::from_fn(|v| [y[3 * v], y[3 * v + 1], y[3 * v + 2]]))
}

/// All 24 permutations of `0..4` in lexicographic order.
pub fn permutations4() -> Vec<[usize; 4]> {
    let mut out = Vec::with_capacity(24);
    for a in 0..4 {
        for b in 0..4 {
            for c in 0..4 {
                for d in 0..4 {
                    let p = [a, b, c, d];
                    let mut seen = [false; 4];
                    if p.iter().all(|&x| !std::mem::replace(&mut seen[x], true)) {
                        out.push(p);
                    }
                }
            }
        }
    }
    out
}

#[derive(Debug, Clone, PartialEq)]
pub struct Labeling {
    /// `B` relabeled as `b.permuted(permutation)` best satisfies orthology.
    pub permutation: [usize; 4],
    pub max_residual: f64,
    /// Every permutation whose max residual ties the best within `1e-9`.
    pub ties: Vec<[usize; 4]>,
}

const LABELING_TIE: f64 = 1e-9;

pub fn find_labeling(a: &Tetrahedron, b: &Tetrahedron, tol: &Tolerance) -> Labeling {
    let scored: Vec<([usize; 4], f64)> = permutations4()
        .into_iter()
        .map(|p| {
            let r = edge_orthogonality_residuals(a, &b.permuted(p), tol)
                .map(|r| r.iter().copied().fold(0.0, f64::max))
                .unwrap_or(f64::INFINITY);
            (p, r)
        })
        .collect();
    let (permutation, max_residual) = scored
        .iter()
        .copied()
        .min_by(|x, y| x.1.total_cmp(&y.1))
        .expect("24 candidates");
    let ties = scored
        .iter()
        .filter(|(_, r)| (r - max_residual).abs() <= LABELING_TIE)
        .map(|(p, _)| *p)
        .collect();
    Labeling {
        permutation,
        max_residual,
        ties,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    pub(crate) fn t_reg() -> Tetrahedron {
        Tetrahedron::from_coords([[1., 1., 1.], [1., -1., -1.], [-1., 1., -1.], [-1., -1., 1.]])
            .unwrap()
    }

    fn skewed() -> Tetrahedron {
        Tetrahedron::from_coords([[0., 0., 0.], [3., 0.2, 0.1], [0.7, 2.5, -0.3], [0.9, 0.8, 2.2]])
            .unwrap()
    }

    #[test]
    fn regular_is_self_orthologic() {
        let t = t_reg();
        let tol = pair_tolerance(&t, &t).unwrap();
        let r = edge_orthogonality_residuals(&t, &t, &tol).unwrap();
        assert!(r.iter().all(|&x| x == 0.0));
        let rep = orthology_centers(&t, &t, &tol).unwrap();
        assert_relative_eq!(rep.center_a, Point::origin(), epsilon = 1e-14);
        assert_relative_eq!(rep.center_b, Point::origin(), epsilon = 1e-14);
        assert!(rep.spread_a < 1e-15 && rep.spread_b < 1e-15);
    }

    #[test]
    fn five_conditions_force_the_sixth() {
        let a = skewed();
        let guess = Tetrahedron::from_coords([[0.3, -1., 2.], [1., 1., 0.], [-2., 0.5, 1.], [0.2, 0.1, -1.]])
            .unwrap();
        for skip in 0..6 {
            let b = impose_five_orthogonal(&a, &guess, skip).unwrap();
            let tol = pair_tolerance(&a, &b).unwrap();
            let r = edge_orthogonality_residuals(&a, &b, &tol).unwrap();
            assert!(r.iter().all(|&x| x <= 1e-12), "skip {skip}: {r:?}");
        }
    }

    #[test]
    fn zero_length_edge_is_named() {
        let t = t_reg();
        let bad = Tetrahedron::from_coords([[0., 0., 0.], [1., 0., 0.], [1., 0., 0.], [0., 0., 1.]])
            .unwrap();
        let tol = Tolerance::new(2.0).unwrap();
        let err = edge_orthogonality_residuals(&t, &bad, &tol).unwrap_err();
        assert_eq!(err, Error::ZeroLengthEdge { tet: 'B', edge: (1, 2) });
        assert_eq!(err.to_string(), "zero-length edge B2B3");
    }

    #[test]
    fn construct_default_offsets_on_regular() {
        let a = t_reg();
        let b = construct_orthologic(&a, &Point::origin(), None).unwrap();
        let tol = pair_tolerance(&a, &b).unwrap();
        let r = edge_orthogonality_residuals(&a, &b, &tol).unwrap();
        assert!(r.iter().all(|&x| x < 1e-12), "{r:?}");
    }

    #[test]
    fn concurrent_planes_rejected() {
        let a = skewed();
        let o = Point::new(0.5, 0.6, 0.4);
        let err = construct_orthologic(&a, &o, Some([0.0; 4])).unwrap_err();
        assert!(matches!(err, Error::Degenerate(_)), "{err:?}");
    }

    #[test]
    fn round_trip_center_and_broken_orthogonality() {
        let a = skewed();
        let o = Point::new(0.4, 0.9, 0.5);
        let b = construct_orthologic(&a, &o, Some([0.3, -0.2, 1.1, 0.6])).unwrap();
        let tol = pair_tolerance(&a, &b).unwrap();
        let rep = orthology_centers(&a, &b, &tol).unwrap();
        assert!((rep.center_a - o).norm() <= 1e-9 * tol.scene_scale);

        let mut v = *b.vertices();
        v[2] += Vector::new(0.1, -0.05, 0.07).normalize() * 0.1 * tol.scene_scale;
        let broken = Tetrahedron::new(v).unwrap();
        match orthology_centers(&a, &broken, &tol) {
            Err(Error::NotOrthologic { max, .. }) => assert!(max > tol.eps_rel),
            other => panic!("expected NotOrthologic, got {other:?}"),
        }
    }

    #[test]
    fn labeling_identity_and_shuffle() {
        let a = skewed();
        let b = construct_orthologic(&a, &Point::new(0.4, 0.9, 0.5), Some([0.3, -0.2, 1.1, 0.6]))
            .unwrap();
        let tol = pair_tolerance(&a, &b).unwrap();
        let l = find_labeling(&a, &b, &tol);
        assert_eq!(l.permutation, [0, 1, 2, 3]);
        assert!(l.max_residual <= tol.eps_rel);

        // shuffled[i] = b[sigma[i]]
        let sigma = [1, 2, 3, 0];
        let shuffled = b.permuted(sigma);
        let l = find_labeling(&a, &shuffled, &tol);
        let inverse = [3, 0, 1, 2];
        assert_eq!(l.permutation, inverse);
        assert_eq!(shuffled.permuted(l.permutation), b);
    }

    #[test]
    fn regular_labeling_is_unique() {
        // Any non-identity relabeling pairs some edge with one sharing a
        // vertex (60 degrees apart), so only the identity is orthologic.
        let t = t_reg();
        let tol = pair_tolerance(&t, &t).unwrap();
        let l = find_labeling(&t, &t, &tol);
        assert!(l.max_residual < 1e-15);
        assert_eq!(l.ties, vec![[0, 1, 2, 3]]);
    }

    #[test]
    fn translation_invariance() {
        let a = skewed();
        let b = construct_orthologic(&a, &Point::new(0.4, 0.9, 0.5), None).unwrap();
        let v = Vector::new(3.0, -1.0, 2.5);
        let moved = b.translated(&v);
        let tol = pair_tolerance(&a, &b).unwrap();
        let r0 = edge_orthogonality_residuals(&a, &b, &tol).unwrap();
        let r1 = edge_orthogonality_residuals(&a, &moved, &tol).unwrap();
        for (x, y) in r0.iter().zip(r1.iter()) {
            assert!((x - y).abs() < 1e-14);
        }
        let c0 = orthology_centers(&a, &b, &tol).unwrap().center_b;
        let c1 = orthology_centers(&a, &moved, &tol).unwrap().center_b;
        assert_relative_eq!(c1, c0 + v, epsilon = 1e-9);
    }
}
