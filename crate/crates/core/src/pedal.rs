//! Pedal triangles, isogonal conjugation and pedal chains on a tetrahedron.
//!
//! A pedal chain on a host tetrahedron `A` consists of one foot `V_ij` on
//! every edge line `A_i A_j` and one source point `B*_i` in every face plane
//! (the face opposite `A_i`), such that the three feet on each face are the
//! orthogonal feet of that face's source. A chain whose six feet are
//! co-spherical (or co-planar) determines a unique tetrahedron whose
//! non-corresponding edges meet the host's edges orthogonally at the feet.
//!
//! Sources and feet are computed against edge *lines*, so feet outside the
//! edge segments are perfectly valid.

use crate::error::{Error, Result};
use crate::geom::{
    carrier_through, circle_through, closest_points, concurrency_point, foot_on_line,
    intersect_coplanar, meet_planes, project_to_plane, Circle3D, Line, Plane, Point, SphereOrPlane,
    Tolerance, Vector,
};
use crate::orthology::{
    edge_index, edge_orthogonality_residuals, face_indices, Tetrahedron, PAIRINGS,
};
use crate::poly;

/// Edges of a triangle `[p0, p1, p2]` in the order feet are stored.
pub const FACE_EDGES: [(usize, usize); 3] = [(0, 1), (0, 2), (1, 2)];

/// Reconstruction accepts residuals up to this multiple of `eps_rel`.
pub const RECONSTRUCT_SLACK: f64 = 10.0;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PedalTriangle {
    pub source: Point,
    pub face: [Point; 3],
    /// Feet on the edge lines `01`, `02`, `12` of `face`.
    pub feet: [Point; 3],
}

fn check_face(face: &[Point; 3], tol: &Tolerance) -> Result<Plane> {
    // Reuses the circumcircle collinearity test.
    circle_through(&face[0], &face[1], &face[2], tol)?;
    Plane::through(&face[0], &face[1], &face[2])
}

/// Feet of the perpendiculars from `source` onto the three edge lines of
/// `face`. With `strict`, a source farther than `eps_abs` from the face
/// plane is rejected; otherwise it is projected first.
pub fn pedal_triangle(
    source: &Point,
    face: &[Point; 3],
    tol: &Tolerance,
    strict: bool,
) -> Result<PedalTriangle> {
    let plane = check_face(face, tol)?;
    let distance = plane.signed_distance(source).abs();
    if strict && distance > tol.eps_abs {
        return Err(Error::OffPlane { distance });
    }
    let source = project_to_plane(source, &plane);
    let mut feet = [Point::origin(); 3];
    for (foot, (i, j)) in feet.iter_mut().zip(FACE_EDGES) {
        *foot = foot_on_line(&source, &Line::through(&face[i], &face[j])?);
    }
    Ok(PedalTriangle {
        source,
        face: *face,
        feet,
    })
}

/// `|dist(source, circumcenter) - circumradius|`, the distance of the
/// projected source from the face's circumcircle.
pub fn circumcircle_offset(source: &Point, face: &[Point; 3], tol: &Tolerance) -> Result<f64> {
    let cc = circle_through(&face[0], &face[1], &face[2], tol)?;
    let p = project_to_plane(source, &cc.carrier);
    Ok(((p - cc.center).norm() - cc.radius).abs())
}

pub fn pedal_circle(source: &Point, face: &[Point; 3], tol: &Tolerance) -> Result<Circle3D> {
    let offset = circumcircle_offset(source, face, tol)?;
    if offset <= tol.length() {
        return Err(Error::SimsonDegenerate { offset });
    }
    let tri = pedal_triangle(source, face, tol, false)?;
    let c = circle_through(&tri.feet[0], &tri.feet[1], &tri.feet[2], tol)
        .map_err(|_| Error::SimsonDegenerate { offset })?;
    Ok(Circle3D {
        carrier: check_face(face, tol)?,
        ..c
    })
}

/// Reflection of `source` in the center of its pedal circle.
pub fn isogonal_conjugate(source: &Point, face: &[Point; 3], tol: &Tolerance) -> Result<Point> {
    let c = pedal_circle(source, face, tol)?;
    let p = project_to_plane(source, &c.carrier);
    Ok(Point::from(c.center.coords * 2.0 - p.coords))
}

/// Source point whose pedal feet are `feet` (ordered as [`FACE_EDGES`]).
///
/// The returned spread is the RMS distance of the recovered point from the
/// three in-plane perpendiculars, normalized by the scene scale; it is zero
/// exactly when the feet form a pedal triangle.
pub fn recover_source(
    feet: &[Point; 3],
    face: &[Point; 3],
    tol: &Tolerance,
) -> Result<crate::geom::Concurrency> {
    let plane = check_face(face, tol)?;
    let mut lines = Vec::with_capacity(3);
    for (foot, (i, j)) in feet.iter().zip(FACE_EDGES) {
        let dir = plane.normal.cross(&(face[j] - face[i]));
        lines.push(Line::new(project_to_plane(foot, &plane), dir)?);
    }
    concurrency_point(&lines, tol)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PedalChain {
    pub host: Tetrahedron,
    /// `V_ij` in [`EDGES`] order.
    pub feet: [Point; 6],
    /// `B*_i`, lying in the plane of the host face opposite vertex `i`.
    pub sources: [Point; 4],
    /// Largest disagreement between two computations of the same foot.
    pub closure_spread: f64,
}

impl PedalChain {
    pub fn foot(&self, i: usize, j: usize) -> Point {
        self.feet[edge_index(i, j)]
    }

    /// Feet on the face opposite vertex `i`, ordered as [`FACE_EDGES`] over
    /// `face_indices(i)`.
    pub fn face_feet(&self, i: usize) -> [Point; 3] {
        let f = face_indices(i);
        FACE_EDGES.map(|(a, b)| self.foot(f[a], f[b]))
    }

    /// Builds the chain generated by four arbitrary sources. Each foot is
    /// computed from both faces sharing its edge; the stored foot is their
    /// midpoint and `closure_spread` records the worst mismatch.
    pub fn from_sources(host: &Tetrahedron, sources: [Point; 4], tol: &Tolerance) -> Result<Self> {
        let mut per_edge: [Vec<Point>; 6] = Default::default();
        let mut projected = sources;
        for (i, src) in sources.iter().enumerate() {
            let tri = pedal_triangle(src, &host.face(i), tol, false)?;
            projected[i] = tri.source;
            let f = face_indices(i);
            for (foot, (a, b)) in tri.feet.iter().zip(FACE_EDGES) {
                per_edge[edge_index(f[a], f[b])].push(*foot);
            }
        }
        let mut feet = [Point::origin(); 6];
        let mut closure_spread = 0.0_f64;
        for (slot, pair) in feet.iter_mut().zip(per_edge.iter()) {
            closure_spread = closure_spread.max((pair[0] - pair[1]).norm());
            *slot = nalgebra::center(&pair[0], &pair[1]);
        }
        Ok(Self {
            host: *host,
            feet,
            sources: projected,
            closure_spread,
        })
    }

    /// The chain induced by a partner tetrahedron: each source is the
    /// orthographic projection of the partner's vertex onto the
    /// corresponding face plane of the host.
    pub fn from_partner(host: &Tetrahedron, partner: &Tetrahedron, tol: &Tolerance) -> Result<Self> {
        let mut sources = [Point::origin(); 4];
        for (i, s) in sources.iter_mut().enumerate() {
            *s = project_to_plane(&partner.vertex(i), &host.face_plane(i)?);
        }
        Self::from_sources(host, sources, tol)
    }
}

/// Unit vector in the plane of face `A1 A2 A4` perpendicular to `A1 A2`,
/// pointing toward `A4`. The second source of a completed chain moves along
/// this direction.
pub fn chain_direction(host: &Tetrahedron) -> Result<Vector> {
    let e = (host.vertex(1) - host.vertex(0)).normalize();
    let w = host.vertex(3) - host.vertex(0);
    let u = w - e * e.dot(&w);
    let n = u.norm();
    if !(n > 0.0) {
        return Err(Error::Degenerate("host face A1A2A4 is collinear".into()));
    }
    Ok(u / n)
}

/// Pieces of a chain completion that do not depend on `t`.
struct Completion {
    host: Tetrahedron,
    b4: Point,
    v12: Point,
    v13: Point,
    v23: Point,
    u: Vector,
    line14: Line,
    line24: Line,
    pedal4: Circle3D,
}

impl Completion {
    fn new(host: &Tetrahedron, b4: &Point, tol: &Tolerance) -> Result<Self> {
        let face = host.face(3);
        let pedal4 = pedal_circle(b4, &face, tol)?;
        let tri = pedal_triangle(b4, &face, tol, false)?;
        Ok(Self {
            host: *host,
            b4: tri.source,
            v12: tri.feet[0],
            v13: tri.feet[1],
            v23: tri.feet[2],
            u: chain_direction(host)?,
            line14: host.edge_line(0, 3)?,
            line24: host.edge_line(1, 3)?,
            pedal4,
        })
    }

    fn b3(&self, t: f64) -> Point {
        self.v12 + self.u * t
    }

    fn lower_feet(&self, t: f64) -> (Point, Point) {
        let b3 = self.b3(t);
        (foot_on_line(&b3, &self.line14), foot_on_line(&b3, &self.line24))
    }

    /// Power-like functions of the pencil of spheres through the pedal
    /// circle on face 4, in units of the scene scale.
    fn pencil(&self, p: &Point, scale: f64) -> (f64, f64) {
        let d = (p - self.pedal4.center) / scale;
        let r = self.pedal4.radius / scale;
        let g = d.norm_squared() - r * r;
        let h = d.dot(&self.pedal4.carrier.normal);
        (g, h)
    }

    /// Vanishes exactly when `V12, V13, V23, V14(t), V24(t)` lie on one
    /// sphere or plane.
    fn cosphericity(&self, t: f64, scale: f64) -> f64 {
        let (v14, v24) = self.lower_feet(t);
        let (g1, h1) = self.pencil(&v14, scale);
        let (g2, h2) = self.pencil(&v24, scale);
        g1 * h2 - g2 * h1
    }

    /// Signed, normalized distance of `p` from the pencil member through
    /// `through`. Equals the signed distance to that sphere (or plane) to
    /// first order, and varies continuously when the member passes through
    /// the plane of the pedal circle.
    fn member_residual(&self, through: &Point, p: &Point, scale: f64) -> f64 {
        let (beta, alpha) = self.pencil(through, scale);
        let r = self.pedal4.radius / scale;
        let (g, h) = self.pencil(p, scale);
        let norm = (beta * beta + 4.0 * alpha * alpha * r * r).sqrt();
        if norm == 0.0 {
            return f64::NAN;
        }
        (alpha * g - beta * h) / norm
    }

    fn chain(&self, t: f64) -> Result<PedalChain> {
        let h = &self.host;
        let (v14, v24) = self.lower_feet(t);
        let b3 = self.b3(t);

        let perp = |foot: &Point, i: usize, j: usize, face: usize| -> Result<Line> {
            let n = h.face_plane(face)?.normal;
            Line::new(*foot, n.cross(&(h.vertex(j) - h.vertex(i))))
        };
        // Face opposite A2 (vertices 1, 3, 4).
        let b2 = intersect_coplanar(&perp(&self.v13, 0, 2, 1)?, &perp(&v14, 0, 3, 1)?)?;
        let v34 = foot_on_line(&b2, &h.edge_line(2, 3)?);
        // Face opposite A1 (vertices 2, 3, 4).
        let b1 = intersect_coplanar(&perp(&self.v23, 1, 2, 0)?, &perp(&v24, 1, 3, 0)?)?;
        let v34_alt = foot_on_line(&b1, &h.edge_line(2, 3)?);

        let mut feet = [Point::origin(); 6];
        feet[edge_index(0, 1)] = self.v12;
        feet[edge_index(0, 2)] = self.v13;
        feet[edge_index(0, 3)] = v14;
        feet[edge_index(1, 2)] = self.v23;
        feet[edge_index(1, 3)] = v24;
        feet[edge_index(2, 3)] = v34;
        Ok(PedalChain {
            host: *h,
            feet,
            sources: [b1, b2, b3, self.b4],
            closure_spread: (v34 - v34_alt).norm(),
        })
    }
}

/// Completes a pedal chain from the source `b4` on the face `A1 A2 A3` and
/// the position `t` of the source on face `A1 A2 A4` along
/// [`chain_direction`], measured from the foot `V12`.
///
/// `b4` is projected onto its face plane. The last foot `V34` is taken from
/// the source on face `A1 A3 A4`; `closure_spread` is its distance to the
/// foot obtained from the source on face `A2 A3 A4`.
pub fn complete_chain(host: &Tetrahedron, b4: &Point, t: f64, tol: &Tolerance) -> Result<PedalChain> {
    Completion::new(host, b4, tol)?.chain(t)
}

/// Range (in scene units) over which the sphericity polynomial is sampled.
const SAMPLE_HALF_WIDTH: f64 = 4.0;
const SAMPLE_COUNT: usize = 9;

fn validated_parameters(c: &Completion, tol: &Tolerance) -> Vec<f64> {
    let s = tol.scene_scale;
    let xs: Vec<f64> = (0..SAMPLE_COUNT)
        .map(|k| {
            SAMPLE_HALF_WIDTH
                * (std::f64::consts::PI * (k as f64 + 0.5) / SAMPLE_COUNT as f64).cos()
        })
        .collect();
    let ys: Vec<f64> = xs.iter().map(|&x| c.cosphericity(x * s, s)).collect();
    let coeffs = poly::trim(&poly::fit(&xs, &ys, 4), 1e-10);
    let mut out: Vec<f64> = Vec::new();
    for root in poly::real_roots(&coeffs, 1e-7) {
        let x = polish(|x| c.cosphericity(x * s, s), root);
        let t = x * s;
        let (v14, v24) = c.lower_feet(t);
        let residual = c.member_residual(&v14, &v24, s).abs();
        if residual.is_finite()
            && residual <= tol.eps_rel
            && !out.iter().any(|&o| (o - t).abs() <= 1e-9 * s)
        {
            out.push(t);
        }
    }
    out.sort_by(f64::total_cmp);
    out
}

/// A few secant-Newton steps on the exact function.
fn polish(f: impl Fn(f64) -> f64, x0: f64) -> f64 {
    let mut x = x0;
    for _ in 0..8 {
        let fx = f(x);
        if fx == 0.0 {
            break;
        }
        let h = 1e-6 * (1.0 + x.abs());
        let d = (f(x + h) - f(x - h)) / (2.0 * h);
        if d == 0.0 || !d.is_finite() {
            break;
        }
        let step = fx / d;
        let next = x - step;
        if !next.is_finite() || f(next).abs() >= fx.abs() {
            break;
        }
        x = next;
        if step.abs() <= 1e-15 * (1.0 + x.abs()) {
            break;
        }
    }
    x
}

/// Parameters `t` for which the feet `V12, V13, V23, V14, V24` of the
/// completed chain are co-spherical (or co-planar), ascending.
pub fn spherical_parameters(host: &Tetrahedron, b4: &Point, tol: &Tolerance) -> Result<Vec<f64>> {
    let c = Completion::new(host, b4, tol)?;
    Ok(validated_parameters(&c, tol))
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SphericalSample {
    pub t: f64,
    /// Signed normalized distance of `V34` from the sphere through the other
    /// five feet.
    pub residual: f64,
}

/// One sample per sphericity parameter at `b4`.
pub fn chain_sphere_samples(
    host: &Tetrahedron,
    b4: &Point,
    tol: &Tolerance,
) -> Result<Vec<SphericalSample>> {
    let c = Completion::new(host, b4, tol)?;
    let s = tol.scene_scale;
    let mut out = Vec::new();
    for t in validated_parameters(&c, tol) {
        let Ok(chain) = c.chain(t) else { continue };
        let v14 = chain.foot(0, 3);
        let v34 = chain.foot(2, 3);
        out.push(SphericalSample {
            t,
            residual: c.member_residual(&v14, &v34, s),
        });
    }
    Ok(out)
}

/// Zero exactly on the self-conjugate curve of face 4 (one value per
/// sphericity parameter).
pub fn chain_sphere_residual(host: &Tetrahedron, b4: &Point, tol: &Tolerance) -> Result<Vec<f64>> {
    Ok(chain_sphere_samples(host, b4, tol)?
        .into_iter()
        .map(|s| s.residual)
        .collect())
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SphericalChain {
    pub chain: PedalChain,
    pub carrier: SphereOrPlane,
    pub max_residual: f64,
}

impl SphericalChain {
    pub fn new(chain: PedalChain, tol: &Tolerance) -> Result<Self> {
        let (carrier, residuals) = carrier_through(&chain.feet, tol)?;
        let max_residual = residuals.into_iter().fold(0.0, f64::max);
        if max_residual > tol.length() {
            return Err(Error::NotSpherical {
                residual: max_residual,
            });
        }
        Ok(Self {
            chain,
            carrier,
            max_residual,
        })
    }
}

/// Recovers the orthosecting partner from a spherical chain.
pub fn reconstruct_tetrahedron(sc: &SphericalChain, tol: &Tolerance) -> Result<Tetrahedron> {
    let flat_plane = match sc.carrier {
        SphereOrPlane::Plane(p) => Some(p),
        SphereOrPlane::Sphere { .. } => None,
    };
    reconstruct_from_chain(&sc.chain, flat_plane.as_ref(), tol)
}

/// Partner vertices from the planes through the three feet around each
/// host vertex. When `flat` is given, the feet are co-planar and the partner
/// lies in that plane: its edge lines are the in-plane perpendiculars to the
/// host edges through the feet.
///
/// The result is checked to meet every host edge orthogonally at the
/// chain's feet; failures report all gaps and residuals.
pub fn reconstruct_from_chain(
    chain: &PedalChain,
    flat: Option<&Plane>,
    tol: &Tolerance,
) -> Result<Tetrahedron> {
    let host = &chain.host;
    let mut verts = [Point::origin(); 4];
    match flat {
        None => {
            let mut planes = Vec::with_capacity(4);
            for i in 0..4 {
                let f = face_indices(i);
                let feet = [chain.foot(i, f[0]), chain.foot(i, f[1]), chain.foot(i, f[2])];
                circle_through(&feet[0], &feet[1], &feet[2], tol).map_err(|_| {
                    Error::Degenerate(format!(
                        "feet around vertex {} are collinear; partner face contains it",
                        i + 1
                    ))
                })?;
                planes.push(Plane::through(&feet[0], &feet[1], &feet[2])?);
            }
            for (m, v) in verts.iter_mut().enumerate() {
                let [i, j, k] = face_indices(m);
                *v = meet_planes(&planes[i], &planes[j], &planes[k])?;
            }
        }
        Some(plane) => {
            // Partner edge (k, l) passes through V_ij.
            let mut edge_lines = [None; 6];
            for p in PAIRINGS {
                let (i, j) = p.a_edge;
                let dir = plane.normal.cross(&(host.vertex(j) - host.vertex(i)));
                edge_lines[edge_index(p.b_edge.0, p.b_edge.1)] =
                    Some(Line::new(chain.foot(i, j), dir)?);
            }
            for (m, v) in verts.iter_mut().enumerate() {
                let lines: Vec<Line> = (0..4)
                    .filter(|&x| x != m)
                    .map(|x| edge_lines[edge_index(m, x)].expect("all six set"))
                    .collect();
                *v = concurrency_point(&lines, tol)?.point;
            }
        }
    }
    let b = Tetrahedron::new(verts)?;
    check_reconstruction(chain, &b, tol)?;
    Ok(b)
}

fn check_reconstruction(chain: &PedalChain, b: &Tetrahedron, tol: &Tolerance) -> Result<()> {
    let host = &chain.host;
    let orthogonality = edge_orthogonality_residuals(host, b, tol)?;
    let mut gaps = [0.0; 6];
    for (g, p) in gaps.iter_mut().zip(PAIRINGS) {
        let la = host.edge_line(p.a_edge.0, p.a_edge.1)?;
        let lb = b.edge_line(p.b_edge.0, p.b_edge.1)?;
        let cp = closest_points(&la, &lb);
        let foot = chain.foot(p.a_edge.0, p.a_edge.1);
        *g = cp.gap.max((cp.midpoint() - foot).norm()) / tol.scene_scale;
    }
    let max_gap = gaps.iter().copied().fold(0.0, f64::max);
    let max_orthogonality = orthogonality.iter().copied().fold(0.0, f64::max);
    let bound = RECONSTRUCT_SLACK * tol.eps_rel;
    if !(max_gap <= bound && max_orthogonality <= bound) {
        return Err(Error::Postcondition {
            gaps,
            orthogonality,
            max_gap,
            max_orthogonality,
        });
    }
    Ok(())
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CircularNet {
    /// `grid[r][c]` is `P_rc`.
    pub grid: [[Point; 3]; 3],
    /// Concyclicity residuals of the quads with lower-left corners
    /// `P00`, `P01`, `P10`, `P11`.
    pub residuals: [f64; 4],
}

/// Distance of the fourth point from the circle through the other three,
/// using the best-conditioned triple.
pub fn concyclicity_residual(quad: [&Point; 4], tol: &Tolerance) -> f64 {
    let mut best: Option<(f64, usize)> = None;
    for skip in 0..4 {
        let tri: Vec<&Point> = (0..4).filter(|&k| k != skip).map(|k| quad[k]).collect();
        let area = (tri[1] - tri[0]).cross(&(tri[2] - tri[0])).norm();
        if best.is_none_or(|(a, _)| area > a) {
            best = Some((area, skip));
        }
    }
    let (_, skip) = best.expect("four triples");
    let tri: Vec<&Point> = (0..4).filter(|&k| k != skip).map(|k| quad[k]).collect();
    match circle_through(tri[0], tri[1], tri[2], tol) {
        Ok(c) => c.distance_to(quad[skip]),
        Err(_) => f64::INFINITY,
    }
}

/// The 3x3 net around host edge `{i, j}`: with `k < l` the remaining
/// indices, rows are `(V_ik, A_i, V_il)`, `(B*_l, V_ij, B*_k)`,
/// `(V_jk, A_j, V_jl)`. Every elementary quad has right angles at two
/// opposite corners and is therefore concyclic.
pub fn circular_net(chain: &PedalChain, edge: (usize, usize)) -> CircularNet {
    let (i, j) = if edge.0 < edge.1 { edge } else { (edge.1, edge.0) };
    let rest: Vec<usize> = (0..4).filter(|&x| x != i && x != j).collect();
    let (k, l) = (rest[0], rest[1]);
    let a = &chain.host;
    let grid = [
        [chain.foot(i, k), a.vertex(i), chain.foot(i, l)],
        [chain.sources[l], chain.foot(i, j), chain.sources[k]],
        [chain.foot(j, k), a.vertex(j), chain.foot(j, l)],
    ];
    let scale = crate::geom::diameter(grid.iter().flatten()).max(a.diameter());
    let tol = Tolerance::new(scale).expect("positive net scale");
    let quad = |r: usize, c: usize| {
        concyclicity_residual(
            [&grid[r][c], &grid[r][c + 1], &grid[r + 1][c + 1], &grid[r + 1][c]],
            &tol,
        )
    };
    CircularNet {
        grid,
        residuals: [quad(0, 0), quad(0, 1), quad(1, 0), quad(1, 1)],
    }
}
