//! Verification and exploration on top of the solver: the sphere through the
//! six intersection points, conjugate partners, the self-conjugate curve on
//! a face plane and conjugate sequences.

use std::collections::{BTreeMap, HashMap};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::geom::{carrier_through, closest_points, project_to_plane, Point, SphereOrPlane, Tolerance, Vector};
use crate::orthology::{orthology_centers, Tetrahedron, PAIRINGS};
use crate::pedal::{
    chain_sphere_residual, isogonal_conjugate, reconstruct_tetrahedron, PedalChain, SphericalChain,
};
use crate::solver::orthosect_residuals;

#[derive(Debug, Clone, PartialEq)]
pub struct SphereReport {
    /// Host edge `(i, j)` of each intersection point, in [`PAIRINGS`] order
    /// minus the skipped pairing.
    pub edges: Vec<(usize, usize)>,
    pub points: Vec<Point>,
    pub carrier: SphereOrPlane,
    /// Distance of each point from the carrier, relative to the scene scale.
    pub residuals: Vec<f64>,
    pub max_residual: f64,
    pub centers: Option<(Point, Point)>,
    /// Distance from the sphere center to the midpoint of the orthology
    /// centers, relative to the scene scale. `None` for a plane carrier or
    /// when the centers are undefined.
    pub midpoint_gap: Option<f64>,
    pub scene_scale: f64,
}

/// Checks that the six intersection points of an orthosecting pair lie on
/// one sphere (or plane) centered between the orthology centers.
pub fn verify_sphere(a: &Tetrahedron, b: &Tetrahedron, tol: &Tolerance) -> Result<SphereReport> {
    verify_sphere_with(a, b, None, tol)
}

/// Like [`verify_sphere`], but the intersection condition of pairing `skip`
/// is not required and its point is left out of the carrier fit.
pub fn verify_sphere_with(
    a: &Tetrahedron,
    b: &Tetrahedron,
    skip: Option<usize>,
    tol: &Tolerance,
) -> Result<SphereReport> {
    let rv = orthosect_residuals(a, b, tol.scene_scale)?;
    let all = rv.to_array();
    let max = all
        .iter()
        .enumerate()
        .filter(|&(n, _)| skip.is_none_or(|s| n != 6 + s))
        .fold(0.0_f64, |m, (_, r)| m.max(r.abs()));
    if max > tol.eps_rel {
        return Err(Error::NotOrthosecting {
            residuals: all,
            max,
            threshold: tol.eps_rel,
        });
    }
    let mut edges = Vec::new();
    let mut points = Vec::new();
    for (n, p) in PAIRINGS.iter().enumerate() {
        if skip == Some(n) {
            continue;
        }
        let la = a.edge_line(p.a_edge.0, p.a_edge.1)?;
        let lb = b.edge_line(p.b_edge.0, p.b_edge.1)?;
        edges.push(p.a_edge);
        points.push(closest_points(&la, &lb).midpoint());
    }
    let (carrier, dist) = carrier_through(&points, tol)?;
    let residuals: Vec<f64> = dist.iter().map(|d| d / tol.scene_scale).collect();
    let max_residual = residuals.iter().copied().fold(0.0, f64::max);
    let centers = orthology_centers(a, b, tol)
        .ok()
        .map(|r| (r.center_a, r.center_b));
    let midpoint_gap = match (&carrier, centers) {
        (SphereOrPlane::Sphere { center, .. }, Some((oa, ob))) => {
            Some((center - nalgebra::center(&oa, &ob)).norm() / tol.scene_scale)
        }
        _ => None,
    };
    Ok(SphereReport {
        edges,
        points,
        carrier,
        residuals,
        max_residual,
        centers,
        midpoint_gap,
        scene_scale: tol.scene_scale,
    })
}

/// Sources `B*_i` of the chain induced by `b` on the faces of `a`, and their
/// isogonal conjugates.
pub fn conjugate_sources(a: &Tetrahedron, b: &Tetrahedron, tol: &Tolerance) -> Result<([Point; 4], [Point; 4])> {
    let mut projected = [Point::origin(); 4];
    let mut conjugated = [Point::origin(); 4];
    for i in 0..4 {
        projected[i] = project_to_plane(&b.vertex(i), &a.face_plane(i)?);
        conjugated[i] = isogonal_conjugate(&projected[i], &a.face(i), tol)?;
    }
    Ok((projected, conjugated))
}

/// The conjugate partner: the tetrahedron orthosecting `a` whose chain
/// sources are the isogonal conjugates of those of `b`.
pub fn conjugate(a: &Tetrahedron, b: &Tetrahedron, tol: &Tolerance) -> Result<Tetrahedron> {
    let (_, sources) = conjugate_sources(a, b, tol)?;
    let chain = PedalChain::from_sources(a, sources, tol)?;
    if chain.closure_spread > tol.length() {
        return Err(Error::NotSpherical {
            residual: chain.closure_spread,
        });
    }
    let sc = SphericalChain::new(chain, tol)?;
    reconstruct_tetrahedron(&sc, tol)
}

/// Orthonormal frame in a face plane. The origin is the face's first vertex
/// and the first axis points to its second vertex.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FaceFrame {
    pub origin: Point,
    pub e1: Vector,
    pub e2: Vector,
}

impl FaceFrame {
    pub fn new(face: &[Point; 3]) -> Result<Self> {
        let e1 = face[1] - face[0];
        let n1 = e1.norm();
        if !(n1 > 0.0) {
            return Err(Error::Degenerate("face has a zero-length edge".into()));
        }
        let e1 = e1 / n1;
        let w = face[2] - face[0];
        let u = w - e1 * e1.dot(&w);
        let nu = u.norm();
        if !(nu > 1e-12 * n1) {
            return Err(Error::Degenerate("face is collinear".into()));
        }
        Ok(Self {
            origin: face[0],
            e1,
            e2: u / nu,
        })
    }

    pub fn to_3d(&self, p: [f64; 2]) -> Point {
        self.origin + self.e1 * p[0] + self.e2 * p[1]
    }

    pub fn to_2d(&self, p: &Point) -> [f64; 2] {
        let d = p - self.origin;
        [d.dot(&self.e1), d.dot(&self.e2)]
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Polyline {
    /// Index of the sphericity parameter the polyline belongs to.
    pub branch: usize,
    pub points: Vec<[f64; 2]>,
    pub closed: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct CurveTrace {
    /// Face index (the face opposite this vertex of the original host).
    pub face: usize,
    /// The host relabeled so the traced face is opposite vertex 4.
    pub host: Tetrahedron,
    pub permutation: [usize; 4],
    pub frame: FaceFrame,
    /// `[x0, y0, x1, y1]` in frame coordinates.
    pub window: [f64; 4],
    pub grid: usize,
    pub polylines: Vec<Polyline>,
    /// Every polyline vertex satisfies `|residual| <= residual_bound`.
    pub residual_bound: f64,
    pub max_residual: f64,
    pub scene_scale: f64,
}

impl CurveTrace {
    pub fn vertex_count(&self) -> usize {
        self.polylines.iter().map(|p| p.points.len()).sum()
    }

    /// Face triangle in frame coordinates.
    pub fn face_2d(&self) -> [[f64; 2]; 3] {
        let f = self.host.face(3);
        f.map(|p| self.frame.to_2d(&p))
    }
}

/// Permutation moving `face` to position 3, others in ascending order.
pub fn face_permutation(face: usize) -> [usize; 4] {
    let mut perm = [0; 4];
    let mut k = 0;
    for v in 0..4 {
        if v != face {
            perm[k] = v;
            k += 1;
        }
    }
    perm[3] = face;
    perm
}

/// Face bounding box inflated by a factor of three about its center.
pub fn default_window(face_2d: &[[f64; 2]; 3]) -> [f64; 4] {
    let (mut lo, mut hi) = ([f64::INFINITY; 2], [f64::NEG_INFINITY; 2]);
    for p in face_2d {
        for c in 0..2 {
            lo[c] = lo[c].min(p[c]);
            hi[c] = hi[c].max(p[c]);
        }
    }
    let mid = [(lo[0] + hi[0]) / 2.0, (lo[1] + hi[1]) / 2.0];
    let half = [1.5 * (hi[0] - lo[0]), 1.5 * (hi[1] - lo[1])];
    [mid[0] - half[0], mid[1] - half[1], mid[0] + half[0], mid[1] + half[1]]
}

/// Crossings are bisected until their bracket is this short (relative).
pub const CURVE_REFINE_LIMIT: f64 = 1e-12;

/// Bound on `|chain_sphere_residual|` for accepted crossings.
pub const CURVE_RESIDUAL_BOUND: f64 = 1e-7;

struct Sampler<'a> {
    host: &'a Tetrahedron,
    frame: FaceFrame,
    tol: Tolerance,
}

impl Sampler<'_> {
    fn values(&self, p: [f64; 2]) -> Vec<f64> {
        chain_sphere_residual(self.host, &self.frame.to_3d(p), &self.tol).unwrap_or_default()
    }

    fn branch(&self, p: [f64; 2], k: usize) -> Option<f64> {
        self.values(p).get(k).copied().filter(|v| v.is_finite())
    }

    /// Bisects the segment `p`-`q` (values of opposite sign on branch `k`)
    /// down to `limit` and returns the crossing and its residual.
    fn refine(&self, mut p: [f64; 2], mut q: [f64; 2], mut fp: f64, k: usize, limit: f64) -> Option<([f64; 2], f64)> {
        let dist = |p: [f64; 2], q: [f64; 2]| ((p[0] - q[0]).powi(2) + (p[1] - q[1]).powi(2)).sqrt();
        while dist(p, q) > limit {
            let m = [(p[0] + q[0]) / 2.0, (p[1] + q[1]) / 2.0];
            let fm = self.branch(m, k)?;
            if fm == 0.0 {
                return Some((m, 0.0));
            }
            if (fm > 0.0) == (fp > 0.0) {
                p = m;
                fp = fm;
            } else {
                q = m;
            }
        }
        let m = [(p[0] + q[0]) / 2.0, (p[1] + q[1]) / 2.0];
        let fm = self.branch(m, k)?;
        Some((m, fm))
    }
}

/// Traces the self-conjugate curve on the plane of face `face` (the face
/// opposite that vertex) by marching squares over a `grid × grid` lattice,
/// one pass per sphericity branch.
pub fn trace_curve(
    a: &Tetrahedron,
    face: usize,
    window: Option<[f64; 4]>,
    grid: usize,
    tol: &Tolerance,
) -> Result<CurveTrace> {
    if face >= 4 {
        return Err(Error::InvalidArgument(format!("face index {face} out of range")));
    }
    if grid < 16 {
        return Err(Error::InvalidArgument(format!("grid must be at least 16 (got {grid})")));
    }
    let permutation = face_permutation(face);
    let host = a.permuted(permutation);
    let frame = FaceFrame::new(&host.face(3))?;
    let face_2d = host.face(3).map(|p| frame.to_2d(&p));
    let window = window.unwrap_or_else(|| default_window(&face_2d));
    if !(window[2] > window[0] && window[3] > window[1]) {
        return Err(Error::InvalidArgument("window must have positive extent".into()));
    }
    let sampler = Sampler {
        host: &host,
        frame,
        tol: *tol,
    };
    let n = grid + 1;
    let (dx, dy) = ((window[2] - window[0]) / grid as f64, (window[3] - window[1]) / grid as f64);
    let node = |i: usize, j: usize| [window[0] + i as f64 * dx, window[1] + j as f64 * dy];
    let values: Vec<Vec<f64>> = (0..n * n)
        .into_par_iter()
        .map(|idx| sampler.values(node(idx % n, idx / n)))
        .collect();
    let branches = values.iter().map(Vec::len).max().unwrap_or(0);
    let limit = CURVE_REFINE_LIMIT * tol.scene_scale;

    let mut polylines = Vec::new();
    let mut max_residual = 0.0_f64;
    for k in 0..branches {
        let val = |i: usize, j: usize| values[j * n + i].get(k).copied().filter(|v| v.is_finite());
        // Edge ids: horizontal (i, j)-(i+1, j) is 2*(j*n+i), vertical
        // (i, j)-(i, j+1) is 2*(j*n+i)+1.
        let mut crossing_edges = Vec::new();
        for j in 0..n {
            for i in 0..n {
                let Some(f0) = val(i, j) else { continue };
                if i + 1 < n {
                    if let Some(f1) = val(i + 1, j) {
                        if (f0 > 0.0) != (f1 > 0.0) {
                            crossing_edges.push((2 * (j * n + i), (i, j), (i + 1, j), f0));
                        }
                    }
                }
                if j + 1 < n {
                    if let Some(f1) = val(i, j + 1) {
                        if (f0 > 0.0) != (f1 > 0.0) {
                            crossing_edges.push((2 * (j * n + i) + 1, (i, j), (i, j + 1), f0));
                        }
                    }
                }
            }
        }
        let refined: Vec<Option<(usize, [f64; 2], f64)>> = crossing_edges
            .par_iter()
            .map(|&(id, p, q, fp)| {
                let (pt, r) = sampler.refine(node(p.0, p.1), node(q.0, q.1), fp, k, limit)?;
                (r.abs() <= CURVE_RESIDUAL_BOUND).then_some((id, pt, r))
            })
            .collect();
        let mut points: HashMap<usize, [f64; 2]> = HashMap::new();
        for (id, pt, r) in refined.into_iter().flatten() {
            max_residual = max_residual.max(r.abs());
            points.insert(id, pt);
        }

        let mut segments: Vec<(usize, usize)> = Vec::new();
        for j in 0..grid {
            for i in 0..grid {
                let corners = [val(i, j), val(i + 1, j), val(i + 1, j + 1), val(i, j + 1)];
                if corners.iter().any(Option::is_none) {
                    continue;
                }
                // Cell edges counter-clockwise: bottom, right, top, left.
                let ids = [
                    2 * (j * n + i),
                    2 * (j * n + i + 1) + 1,
                    2 * ((j + 1) * n + i),
                    2 * (j * n + i) + 1,
                ];
                let hit: Vec<usize> = ids.iter().copied().filter(|id| points.contains_key(id)).collect();
                match hit.len() {
                    2 => segments.push((hit[0], hit[1])),
                    4 => {
                        let f: Vec<f64> = corners.iter().map(|c| c.unwrap()).collect();
                        let center = f.iter().sum::<f64>() / 4.0;
                        // Join the crossings around corners whose sign
                        // differs from the center value.
                        if (center > 0.0) == (f[0] > 0.0) {
                            segments.push((ids[0], ids[1]));
                            segments.push((ids[2], ids[3]));
                        } else {
                            segments.push((ids[3], ids[0]));
                            segments.push((ids[1], ids[2]));
                        }
                    }
                    _ => {}
                }
            }
        }
        for (ids, closed) in link_segments(&segments) {
            polylines.push(Polyline {
                branch: k,
                points: ids.iter().map(|id| points[id]).collect(),
                closed,
            });
        }
    }
    Ok(CurveTrace {
        face,
        host,
        permutation,
        frame,
        window,
        grid,
        polylines,
        residual_bound: CURVE_RESIDUAL_BOUND,
        max_residual,
        scene_scale: tol.scene_scale,
    })
}

/// Joins segments sharing endpoints into maximal chains. Returns each chain
/// with a flag telling whether it closes on itself.
fn link_segments(segments: &[(usize, usize)]) -> Vec<(Vec<usize>, bool)> {
    let mut adj: BTreeMap<usize, Vec<usize>> = BTreeMap::new();
    for (s, &(p, q)) in segments.iter().enumerate() {
        adj.entry(p).or_default().push(s);
        adj.entry(q).or_default().push(s);
    }
    let mut used = vec![false; segments.len()];
    let other = |s: usize, p: usize| if segments[s].0 == p { segments[s].1 } else { segments[s].0 };
    let walk = |start: usize, used: &mut Vec<bool>| -> Vec<usize> {
        let mut chain = vec![start];
        let mut cur = start;
        while let Some(&s) = adj[&cur].iter().find(|&&s| !used[s]) {
            used[s] = true;
            cur = other(s, cur);
            chain.push(cur);
        }
        chain
    };
    let mut out = Vec::new();
    // Open chains first, starting from endpoints of degree one.
    let ends: Vec<usize> = adj.iter().filter(|(_, v)| v.len() == 1).map(|(&p, _)| p).collect();
    for p in ends {
        if adj[&p].iter().all(|&s| used[s]) {
            continue;
        }
        out.push((walk(p, &mut used), false));
    }
    let starts: Vec<usize> = adj.keys().copied().collect();
    for p in starts {
        if adj[&p].iter().all(|&s| used[s]) {
            continue;
        }
        let chain = walk(p, &mut used);
        let closed = chain.len() > 2 && chain.first() == chain.last();
        out.push((chain, closed));
    }
    out
}

#[derive(Debug, Clone, PartialEq)]
pub struct DegreeEstimate {
    /// Number of lines per intersection count.
    pub histogram: BTreeMap<usize, usize>,
    pub max_count: usize,
    /// Lines with at least one near-tangent crossing or a crossing close to
    /// a polyline vertex.
    pub near_tangent: usize,
    pub trials: usize,
    pub nine_observed: bool,
    pub nine_exceeded: bool,
}

/// Minimum `sin` of the crossing angle below which a hit is flagged.
const TANGENCY_SIN: f64 = 0.05;

/// Number of crossings of the line `{p : p·normal = offset}` with the trace,
/// and whether any crossing is nearly tangent.
pub fn count_crossings(trace: &CurveTrace, normal: [f64; 2], offset: f64) -> (usize, bool) {
    let mut count = 0;
    let mut flagged = false;
    for pl in &trace.polylines {
        let pts = &pl.points;
        let mut segs: Vec<([f64; 2], [f64; 2])> = pts.windows(2).map(|w| (w[0], w[1])).collect();
        if pl.closed && pts.len() > 2 && pts.first() != pts.last() {
            segs.push((*pts.last().unwrap(), pts[0]));
        }
        for (p, q) in segs {
            let dp = p[0] * normal[0] + p[1] * normal[1] - offset;
            let dq = q[0] * normal[0] + q[1] * normal[1] - offset;
            if (dp > 0.0) != (dq > 0.0) {
                count += 1;
                let d = [q[0] - p[0], q[1] - p[1]];
                let len = (d[0] * d[0] + d[1] * d[1]).sqrt();
                let sin = (d[0] * normal[0] + d[1] * normal[1]).abs() / len;
                if sin < TANGENCY_SIN {
                    flagged = true;
                }
            }
        }
    }
    (count, flagged)
}

/// Histogram of crossing counts of random lines with the traced curve.
/// Lines are drawn with uniform direction and uniform offset within 1.5
/// half-diagonals of the window center, so some miss the window.
pub fn estimate_degree(trace: &CurveTrace, trials: usize, seed: u64) -> DegreeEstimate {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let w = trace.window;
    let c = [(w[0] + w[2]) / 2.0, (w[1] + w[3]) / 2.0];
    let half_diag = ((w[2] - w[0]).powi(2) + (w[3] - w[1]).powi(2)).sqrt() / 2.0;
    let mut histogram = BTreeMap::new();
    let mut near_tangent = 0;
    for _ in 0..trials {
        let theta: f64 = rng.random_range(0.0..std::f64::consts::PI);
        let rho: f64 = rng.random_range(-1.5..1.5) * half_diag;
        let normal = [theta.cos(), theta.sin()];
        let offset = normal[0] * c[0] + normal[1] * c[1] + rho;
        let (count, flagged) = count_crossings(trace, normal, offset);
        *histogram.entry(count).or_insert(0) += 1;
        near_tangent += usize::from(flagged);
    }
    let max_count = histogram.keys().next_back().copied().unwrap_or(0);
    DegreeEstimate {
        nine_observed: histogram.contains_key(&9),
        nine_exceeded: max_count > 9,
        histogram,
        max_count,
        near_tangent,
        trials,
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SequenceRun {
    pub tetrahedra: Vec<Tetrahedron>,
    /// Sphere report of each consecutive pair.
    pub spheres: Vec<SphereReport>,
    /// Carrier of the first pair.
    pub carrier: SphereOrPlane,
    /// Largest distance of any intersection point of any pair from the
    /// first carrier, relative to the scene scale.
    pub max_carrier_residual: f64,
    /// Both orthology centers of every consecutive pair.
    pub centers: Vec<Point>,
    /// Representatives of `centers` after clustering at `cluster_radius`.
    pub distinct_centers: Vec<Point>,
    pub cluster_radius: f64,
    /// Step at which the run stopped early, with the reason.
    pub truncated: Option<(usize, String)>,
}

/// Clusters within this distance (relative) count as one orthology center.
pub const CENTER_CLUSTER_RADIUS: f64 = 1e-6;

/// The sequence `B_{m+1} = conjugate(B_m, B_{m-1})` from an orthosecting
/// pair `(b0, b1)`, producing `B_0..B_n`.
pub fn iterate_sequence(b0: &Tetrahedron, b1: &Tetrahedron, n: usize, tol: &Tolerance) -> Result<SequenceRun> {
    if n < 1 {
        return Err(Error::InvalidArgument("sequence length must be at least 1".into()));
    }
    let first = verify_sphere(b0, b1, tol)?;
    let mut tetrahedra = vec![*b0, *b1];
    let mut spheres = vec![first];
    let mut truncated = None;
    for m in 1..n {
        let next = conjugate(&tetrahedra[m], &tetrahedra[m - 1], tol)
            .and_then(|c| verify_sphere(&tetrahedra[m], &c, tol).map(|s| (c, s)));
        match next {
            Ok((c, s)) => {
                tetrahedra.push(c);
                spheres.push(s);
            }
            Err(e) => {
                truncated = Some((m + 1, e.to_string()));
                break;
            }
        }
    }
    let carrier = spheres[0].carrier;
    let max_carrier_residual = spheres
        .iter()
        .flat_map(|s| s.points.iter())
        .map(|p| carrier.distance(p) / tol.scene_scale)
        .fold(0.0, f64::max);
    let centers: Vec<Point> = spheres
        .iter()
        .filter_map(|s| s.centers)
        .flat_map(|(p, q)| [p, q])
        .collect();
    let radius = CENTER_CLUSTER_RADIUS * tol.scene_scale;
    let mut distinct_centers: Vec<Point> = Vec::new();
    for c in &centers {
        if distinct_centers.iter().all(|d| (d - c).norm() > radius) {
            distinct_centers.push(*c);
        }
    }
    Ok(SequenceRun {
        tetrahedra,
        spheres,
        carrier,
        max_carrier_residual,
        centers,
        distinct_centers,
        cluster_radius: CENTER_CLUSTER_RADIUS,
        truncated,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn face_permutation_moves_face_last() {
        assert_eq!(face_permutation(3), [0, 1, 2, 3]);
        assert_eq!(face_permutation(0), [1, 2, 3, 0]);
        assert_eq!(face_permutation(2), [0, 1, 3, 2]);
    }

    #[test]
    fn linking_builds_open_and_closed_chains() {
        let open = link_segments(&[(1, 2), (3, 2), (3, 4)]);
        assert_eq!(open, vec![(vec![1, 2, 3, 4], false)]);
        let closed = link_segments(&[(1, 2), (2, 3), (3, 1)]);
        assert_eq!(closed.len(), 1);
        assert!(closed[0].1);
        assert_eq!(closed[0].0.len(), 4);
    }

    #[test]
    fn frame_round_trip() {
        let face = [Point::new(1., 0., 0.), Point::new(0., 2., 0.), Point::new(0., 0., 3.)];
        let fr = FaceFrame::new(&face).unwrap();
        for p in face {
            let q = fr.to_3d(fr.to_2d(&p));
            assert!((p - q).norm() < 1e-14);
        }
        assert_eq!(fr.to_2d(&face[0]), [0.0, 0.0]);
    }
}
