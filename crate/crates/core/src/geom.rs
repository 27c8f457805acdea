//! Points, lines, planes, circles and spheres with scale-aware tolerances.
//!
//! Every threshold in this module is expressed relative to a [`Tolerance`],
//! whose `scene_scale` is the diameter of the point set under study. That keeps
//! residuals comparable between a desk-sized scene and one a thousand times
//! larger.

use nalgebra::{Matrix3, Point3, SymmetricEigen, Vector3};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub type Point = Point3<f64>;
pub type Vector = Vector3<f64>;

pub const DEFAULT_EPS_ABS: f64 = 1e-9;
pub const DEFAULT_EPS_REL: f64 = 1e-7;

/// Circumspheres larger than this multiple of the scene scale are reported
/// as planes.
pub const MAX_SPHERE_RADIUS_FACTOR: f64 = 1e6;

/// `|det|` of three unit normals below which planes are treated as having no
/// unique common point.
pub const MEET_DET_THRESHOLD: f64 = 1e-10;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Tolerance {
    pub eps_abs: f64,
    pub eps_rel: f64,
    pub scene_scale: f64,
}

impl Tolerance {
    pub fn new(scene_scale: f64) -> Result<Self> {
        Self::with_eps(DEFAULT_EPS_ABS, DEFAULT_EPS_REL, scene_scale)
    }

    pub fn with_eps(eps_abs: f64, eps_rel: f64, scene_scale: f64) -> Result<Self> {
        let valid = |v: f64| v.is_finite() && v > 0.0;
        if !valid(eps_abs) || !valid(eps_rel) || !valid(scene_scale) {
            return Err(Error::InvalidArgument(format!(
                "tolerance fields must be finite and positive \
                 (eps_abs={eps_abs}, eps_rel={eps_rel}, scene_scale={scene_scale})"
            )));
        }
        Ok(Self {
            eps_abs,
            eps_rel,
            scene_scale,
        })
    }

    /// Default tolerances with `scene_scale` set to the diameter of `points`.
    pub fn for_points<'a>(points: impl IntoIterator<Item = &'a Point>) -> Result<Self> {
        Self::new(diameter(points))
    }

    /// Same epsilons, different scale.
    pub fn rescaled(&self, scene_scale: f64) -> Result<Self> {
        Self::with_eps(self.eps_abs, self.eps_rel, scene_scale)
    }

    /// Absolute length corresponding to `eps_rel`.
    pub fn length(&self) -> f64 {
        self.eps_rel * self.scene_scale
    }
}

/// Largest pairwise distance in the set.
pub fn diameter<'a>(points: impl IntoIterator<Item = &'a Point>) -> f64 {
    let pts: Vec<&Point> = points.into_iter().collect();
    let mut best = 0.0_f64;
    for (i, p) in pts.iter().enumerate() {
        for q in &pts[i + 1..] {
            best = best.max((*p - *q).norm());
        }
    }
    best
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Line {
    pub anchor: Point,
    pub direction: Vector,
}

impl Line {
    pub fn new(anchor: Point, direction: Vector) -> Result<Self> {
        let n = direction.norm();
        if !(n > 0.0) || !n.is_finite() {
            return Err(Error::Degenerate("line direction has zero length".into()));
        }
        Ok(Self {
            anchor,
            direction: direction / n,
        })
    }

    /// The line through `p` and `q`, anchored at whichever lies nearer the
    /// origin.
    pub fn through(p: &Point, q: &Point) -> Result<Self> {
        let anchor = if p.coords.norm_squared() <= q.coords.norm_squared() {
            *p
        } else {
            *q
        };
        Self::new(anchor, q - p)
    }

    pub fn at(&self, s: f64) -> Point {
        self.anchor + self.direction * s
    }

    pub fn distance_to(&self, p: &Point) -> f64 {
        (p - foot_on_line(p, self)).norm()
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Plane {
    pub normal: Vector,
    pub offset: f64,
}

impl Plane {
    pub fn new(normal: Vector, offset: f64) -> Result<Self> {
        let n = normal.norm();
        if !(n > 0.0) || !n.is_finite() {
            return Err(Error::Degenerate("plane normal has zero length".into()));
        }
        Ok(Self {
            normal: normal / n,
            offset: offset / n,
        })
    }

    pub fn from_point_normal(point: &Point, normal: Vector) -> Result<Self> {
        let n = normal.norm();
        if !(n > 0.0) || !n.is_finite() {
            return Err(Error::Degenerate("plane normal has zero length".into()));
        }
        let normal = normal / n;
        Ok(Self {
            normal,
            offset: normal.dot(&point.coords),
        })
    }

    /// Plane through three points, oriented by `(p2 - p1) x (p3 - p1)`.
    pub fn through(p1: &Point, p2: &Point, p3: &Point) -> Result<Self> {
        let n = (p2 - p1).cross(&(p3 - p1));
        if n.norm() == 0.0 {
            return Err(Error::Degenerate("plane through collinear points".into()));
        }
        Self::from_point_normal(p1, n)
    }

    pub fn signed_distance(&self, p: &Point) -> f64 {
        self.normal.dot(&p.coords) - self.offset
    }

    /// Some point of the plane.
    pub fn origin(&self) -> Point {
        Point::from(self.normal * self.offset)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Circle3D {
    pub center: Point,
    pub radius: f64,
    pub carrier: Plane,
}

impl Circle3D {
    /// Euclidean distance from `p` to the nearest point of the circle.
    pub fn distance_to(&self, p: &Point) -> f64 {
        let h = self.carrier.signed_distance(p);
        let in_plane = (p - self.center) - self.carrier.normal * h;
        let rho = in_plane.norm();
        (h * h + (rho - self.radius).powi(2)).sqrt()
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum SphereOrPlane {
    Sphere { center: Point, radius: f64 },
    Plane(Plane),
}

impl SphereOrPlane {
    pub fn is_plane(&self) -> bool {
        matches!(self, SphereOrPlane::Plane(_))
    }

    /// Signed distance: positive outside a sphere, along the normal of a plane.
    pub fn signed_distance(&self, p: &Point) -> f64 {
        match self {
            SphereOrPlane::Sphere { center, radius } => (p - center).norm() - radius,
            SphereOrPlane::Plane(pl) => pl.signed_distance(p),
        }
    }

    pub fn distance(&self, p: &Point) -> f64 {
        self.signed_distance(p).abs()
    }

    /// Distance between two carriers of the same kind: center offset plus
    /// radius difference for spheres, normal and offset mismatch for planes.
    /// Mixed kinds are infinitely apart.
    pub fn mismatch(&self, other: &SphereOrPlane) -> f64 {
        match (self, other) {
            (
                SphereOrPlane::Sphere { center: c1, radius: r1 },
                SphereOrPlane::Sphere { center: c2, radius: r2 },
            ) => (c1 - c2).norm().max((r1 - r2).abs()),
            (SphereOrPlane::Plane(a), SphereOrPlane::Plane(b)) => {
                let same = (a.normal - b.normal).norm() + (a.offset - b.offset).abs();
                let flipped = (a.normal + b.normal).norm() + (a.offset + b.offset).abs();
                same.min(flipped)
            }
            _ => f64::INFINITY,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ClosestPoints {
    pub p1: Point,
    pub p2: Point,
    pub gap: f64,
    pub cos_angle: f64,
    pub parallel: bool,
    pub identical: bool,
}

impl ClosestPoints {
    pub fn midpoint(&self) -> Point {
        nalgebra::center(&self.p1, &self.p2)
    }
}

const PARALLEL_SIN: f64 = 1e-12;

pub fn closest_points(l1: &Line, l2: &Line) -> ClosestPoints {
    let d1 = l1.direction;
    let d2 = l2.direction;
    let w = l1.anchor - l2.anchor;
    let b = d1.dot(&d2);
    let denom = 1.0 - b * b;
    if denom <= PARALLEL_SIN {
        let p2 = foot_on_line(&l1.anchor, l2);
        let gap = (p2 - l1.anchor).norm();
        let scale = 1.0 + w.norm();
        let identical = gap <= PARALLEL_SIN * scale;
        return ClosestPoints {
            p1: l1.anchor,
            p2: if identical { l1.anchor } else { p2 },
            gap: if identical { 0.0 } else { gap },
            cos_angle: b,
            parallel: true,
            identical,
        };
    }
    let d = d1.dot(&w);
    let e = d2.dot(&w);
    let s = (b * e - d) / denom;
    let t = (e - b * d) / denom;
    let p1 = l1.at(s);
    let p2 = l2.at(t);
    ClosestPoints {
        p1,
        p2,
        gap: (p1 - p2).norm(),
        cos_angle: b,
        parallel: false,
        identical: false,
    }
}

pub fn project_to_plane(p: &Point, pl: &Plane) -> Point {
    p - pl.normal * pl.signed_distance(p)
}

pub fn foot_on_line(p: &Point, l: &Line) -> Point {
    l.at((p - l.anchor).dot(&l.direction))
}

/// Circumcircle of three points.
pub fn circle_through(p1: &Point, p2: &Point, p3: &Point, tol: &Tolerance) -> Result<Circle3D> {
    let a = p1 - p3;
    let b = p2 - p3;
    let axb = a.cross(&b);
    let longest = a.norm().max(b.norm()).max((p1 - p2).norm());
    let height = if longest > 0.0 { axb.norm() / longest } else { 0.0 };
    let threshold = tol.length();
    if height <= threshold {
        return Err(Error::Collinear { height, threshold });
    }
    let num = (b * a.norm_squared() - a * b.norm_squared()).cross(&axb);
    let center = p3 + num / (2.0 * axb.norm_squared());
    let radius = ((p1 - center).norm() + (p2 - center).norm() + (p3 - center).norm()) / 3.0;
    Ok(Circle3D {
        center,
        radius,
        carrier: Plane::from_point_normal(&center, axb)?,
    })
}

/// Best-fit plane (least squares) through a set of points, or `None` if they
/// are all (nearly) collinear.
pub fn fit_plane(points: &[Point], tol: &Tolerance) -> Option<Plane> {
    let n = points.len() as f64;
    let centroid = points.iter().fold(Vector::zeros(), |acc, p| acc + p.coords) / n;
    let mut cov = Matrix3::zeros();
    for p in points {
        let d = p.coords - centroid;
        cov += d * d.transpose();
    }
    let eig = SymmetricEigen::new(cov);
    let mut order = [0usize, 1, 2];
    order.sort_by(|&i, &j| eig.eigenvalues[i].total_cmp(&eig.eigenvalues[j]));
    // The middle eigenvalue measures spread across the best-fit line.
    let mid = eig.eigenvalues[order[1]].max(0.0);
    if (mid / n).sqrt() <= tol.length() {
        return None;
    }
    let normal: Vector = eig.eigenvectors.column(order[0]).into();
    Plane::from_point_normal(&Point::from(centroid), normal).ok()
}

/// Sphere through four points, or their common plane when they are
/// coplanar within tolerance.
pub fn sphere_through(pts: [&Point; 4], tol: &Tolerance) -> Result<SphereOrPlane> {
    let coincide_at = tol.eps_abs.max(tol.length());
    for (i, p) in pts.iter().enumerate() {
        let coincident = pts
            .iter()
            .filter(|q| (**q - **p).norm() <= coincide_at)
            .count();
        if coincident >= 3 {
            return Err(Error::Degenerate(format!(
                "three or more coincident points at index {}",
                i + 1
            )));
        }
    }
    let [p1, p2, p3, p4] = pts;
    let e = [p2 - p1, p3 - p1, p4 - p1];
    let m = Matrix3::from_rows(&[e[0].transpose(), e[1].transpose(), e[2].transpose()]);
    let det = m.determinant();
    let scale = tol.scene_scale;
    let as_plane = || -> Result<SphereOrPlane> {
        let owned = [*p1, *p2, *p3, *p4];
        fit_plane(&owned, tol)
            .map(SphereOrPlane::Plane)
            .ok_or_else(|| Error::Degenerate("four collinear points span no plane".into()))
    };
    if det.abs() / 6.0 <= tol.eps_rel * scale.powi(3) {
        return as_plane();
    }
    let rhs = Vector::new(
        e[0].norm_squared() / 2.0,
        e[1].norm_squared() / 2.0,
        e[2].norm_squared() / 2.0,
    );
    let Some(rel) = m.lu().solve(&rhs) else {
        return as_plane();
    };
    let center = p1 + rel;
    let radius = pts.iter().map(|p| (*p - center).norm()).sum::<f64>() / 4.0;
    if radius > MAX_SPHERE_RADIUS_FACTOR * scale {
        return as_plane();
    }
    Ok(SphereOrPlane::Sphere { center, radius })
}

/// Common point of three planes.
pub fn meet_planes(pl1: &Plane, pl2: &Plane, pl3: &Plane) -> Result<Point> {
    let m = Matrix3::from_rows(&[
        pl1.normal.transpose(),
        pl2.normal.transpose(),
        pl3.normal.transpose(),
    ]);
    let det = m.determinant();
    if det.abs() < MEET_DET_THRESHOLD {
        return Err(Error::Degenerate(format!(
            "plane normals are nearly coplanar (det {det:.3e})"
        )));
    }
    let rhs = Vector::new(pl1.offset, pl2.offset, pl3.offset);
    m.lu()
        .solve(&rhs)
        .map(Point::from)
        .ok_or_else(|| Error::Degenerate("singular plane system".into()))
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Concurrency {
    pub point: Point,
    /// RMS distance from `point` to the lines, divided by the scene scale.
    pub spread: f64,
}

/// Least-squares common point of a bundle of lines.
pub fn concurrency_point(lines: &[Line], tol: &Tolerance) -> Result<Concurrency> {
    if lines.len() < 2 {
        return Err(Error::InvalidArgument(
            "concurrency needs at least two lines".into(),
        ));
    }
    let mut m = Matrix3::zeros();
    let mut rhs = Vector::zeros();
    for l in lines {
        let proj = Matrix3::identity() - l.direction * l.direction.transpose();
        m += proj;
        rhs += proj * l.anchor.coords;
    }
    let eig = SymmetricEigen::new(m);
    let min_eig = eig.eigenvalues.min();
    // All lines parallel leaves the system rank 2.
    if min_eig <= 1e-12 * lines.len() as f64 {
        return Err(Error::FlatPartner);
    }
    let point = Point::from(
        m.cholesky()
            .map(|c| c.solve(&rhs))
            .ok_or(Error::FlatPartner)?,
    );
    let ms = lines
        .iter()
        .map(|l| l.distance_to(&point).powi(2))
        .sum::<f64>()
        / lines.len() as f64;
    Ok(Concurrency {
        point,
        spread: ms.sqrt() / tol.scene_scale,
    })
}

/// Intersection of two coplanar lines, failing when they are too close to
/// parallel to give a well-conditioned point.
pub fn intersect_coplanar(l1: &Line, l2: &Line) -> Result<Point> {
    let cp = closest_points(l1, l2);
    if cp.parallel || 1.0 - cp.cos_angle.abs() < 1e-12 {
        return Err(Error::Degenerate("intersecting nearly parallel lines".into()));
    }
    Ok(cp.midpoint())
}

/// Fits a sphere (or plane) to a set of at least four points.
///
/// The four points spanning the largest volume fix the carrier; the
/// returned residuals are the distances of every input point to it. When
/// the points are coplanar the carrier is their least-squares plane.
pub fn carrier_through(points: &[Point], tol: &Tolerance) -> Result<(SphereOrPlane, Vec<f64>)> {
    if points.len() < 4 {
        return Err(Error::InvalidArgument(
            "a carrier needs at least four points".into(),
        ));
    }
    let n = points.len();
    let mut best = (0.0_f64, [0usize, 1, 2, 3]);
    for a in 0..n {
        for b in a + 1..n {
            for c in b + 1..n {
                for d in c + 1..n {
                    let vol = Matrix3::from_columns(&[
                        points[b] - points[a],
                        points[c] - points[a],
                        points[d] - points[a],
                    ])
                    .determinant()
                    .abs();
                    if vol > best.0 {
                        best = (vol, [a, b, c, d]);
                    }
                }
            }
        }
    }
    let [a, b, c, d] = best.1;
    // Sphere-or-plane is a property of the point set's shape, so a cluster
    // much smaller than the scene is judged at its own scale.
    let local = tol.rescaled(diameter(points).min(tol.scene_scale))?;
    let mut carrier = sphere_through([&points[a], &points[b], &points[c], &points[d]], &local)?;
    if carrier.is_plane() {
        carrier = SphereOrPlane::Plane(fit_plane(points, &local).ok_or_else(|| {
            Error::Degenerate("points are collinear and span no carrier".into())
        })?);
    }
    let residuals = points.iter().map(|p| carrier.distance(p)).collect();
    Ok((carrier, residuals))
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn tol() -> Tolerance {
        Tolerance::new(1.0).unwrap()
    }

    fn p(x: f64, y: f64, z: f64) -> Point {
        Point::new(x, y, z)
    }

    #[test]
    fn closest_points_on_axes() {
        let x = Line::new(p(0., 0., 0.), Vector::x()).unwrap();
        let y = Line::new(p(0., 0., 0.), Vector::y()).unwrap();
        let cp = closest_points(&x, &y);
        assert_eq!(cp.gap, 0.0);
        assert_eq!(cp.p1, p(0., 0., 0.));
        assert_eq!(cp.p2, p(0., 0., 0.));

        let z = Line::new(p(0., 1., 0.), Vector::z()).unwrap();
        let cp = closest_points(&x, &z);
        assert_relative_eq!(cp.p1, p(0., 0., 0.));
        assert_relative_eq!(cp.p2, p(0., 1., 0.));
        assert_relative_eq!(cp.gap, 1.0);
    }

    #[test]
    fn closest_points_parallel_and_identical() {
        let a = Line::new(p(0., 0., 0.), Vector::x()).unwrap();
        let b = Line::new(p(3., 2., 0.), Vector::x() * -2.0).unwrap();
        let cp = closest_points(&a, &b);
        assert!(cp.parallel && !cp.identical);
        assert_relative_eq!(cp.gap, 2.0);

        let c = Line::new(p(5., 0., 0.), Vector::x()).unwrap();
        let cp = closest_points(&a, &c);
        assert!(cp.identical);
        assert_eq!(cp.gap, 0.0);
        assert_eq!(cp.p1, a.anchor);
        assert_eq!(cp.p2, a.anchor);
    }

    #[test]
    fn line_anchor_is_nearest_origin() {
        let l = Line::through(&p(5., 5., 5.), &p(1., 0., 0.)).unwrap();
        assert_eq!(l.anchor, p(1., 0., 0.));
    }

    #[test]
    fn projection_and_foot() {
        let z0 = Plane::new(Vector::z(), 0.0).unwrap();
        assert_eq!(project_to_plane(&p(1., 2., 3.), &z0), p(1., 2., 0.));
        assert_eq!(project_to_plane(&p(1., 2., 0.), &z0), p(1., 2., 0.));

        let l = Line::through(&p(1., 0., 0.), &p(0., 1., 0.)).unwrap();
        assert_relative_eq!(foot_on_line(&p(0.2, 0.3, 0.), &l), p(0.45, 0.55, 0.), epsilon = 1e-15);
        let on = p(0.3, 0.7, 0.);
        assert_relative_eq!(foot_on_line(&on, &l), on, epsilon = 1e-15);
    }

    #[test]
    fn circles() {
        let c = circle_through(&p(1., 0., 0.), &p(-1., 0., 0.), &p(0., 1., 0.), &tol()).unwrap();
        assert_relative_eq!(c.center, p(0., 0., 0.), epsilon = 1e-15);
        assert_relative_eq!(c.radius, 1.0, epsilon = 1e-15);

        let s3 = 3f64.sqrt() / 2.0;
        let c = circle_through(&p(1., 0., 0.), &p(-0.5, s3, 0.), &p(-0.5, -s3, 0.), &tol()).unwrap();
        assert_relative_eq!(c.center, p(0., 0., 0.), epsilon = 1e-15);
        assert_relative_eq!(c.radius, 1.0, epsilon = 1e-15);

        let err = circle_through(&p(0., 0., 0.), &p(1., 1., 1.), &p(2., 2., 2.), &tol());
        assert!(matches!(err, Err(Error::Collinear { .. })));
    }

    #[test]
    fn spheres() {
        let s = sphere_through(
            [&p(1., 0., 0.), &p(-1., 0., 0.), &p(0., 1., 0.), &p(0., 0., 1.)],
            &tol(),
        )
        .unwrap();
        match s {
            SphereOrPlane::Sphere { center, radius } => {
                assert_relative_eq!(center, p(0., 0., 0.), epsilon = 1e-15);
                assert_relative_eq!(radius, 1.0, epsilon = 1e-15);
            }
            _ => panic!("expected sphere"),
        }

        let s = sphere_through(
            [&p(0., 0., 2.), &p(1., 0., 2.), &p(0., 1., 2.), &p(3., 7., 2.)],
            &tol(),
        )
        .unwrap();
        match s {
            SphereOrPlane::Plane(pl) => {
                assert_relative_eq!(pl.normal.z.abs(), 1.0, epsilon = 1e-12);
                assert_relative_eq!(pl.signed_distance(&p(5., 5., 2.)), 0.0, epsilon = 1e-12);
            }
            _ => panic!("expected plane"),
        }

        let q = p(1., 1., 1.);
        assert!(sphere_through([&q, &q, &q, &p(0., 0., 0.)], &tol()).is_err());
    }

    #[test]
    fn planes_meet() {
        let x = Plane::new(Vector::x(), 1.0).unwrap();
        let y = Plane::new(Vector::y(), 2.0).unwrap();
        let z = Plane::new(Vector::z(), 3.0).unwrap();
        assert_relative_eq!(meet_planes(&x, &y, &z).unwrap(), p(1., 2., 3.));
        let x2 = Plane::new(Vector::x(), 4.0).unwrap();
        assert!(meet_planes(&x, &x2, &z).is_err());
    }

    #[test]
    fn concurrency() {
        let o = p(0., 0., 0.);
        let lines = [
            Line::new(o, Vector::x()).unwrap(),
            Line::new(o, Vector::new(1., 1., 0.)).unwrap(),
            Line::new(o, Vector::new(0., 1., 1.)).unwrap(),
        ];
        let c = concurrency_point(&lines, &tol()).unwrap();
        assert_relative_eq!(c.point, o, epsilon = 1e-15);
        assert!(c.spread < 1e-15);

        // Two skew lines: midpoint of the common perpendicular.
        let a = Line::new(p(0., 0., 0.), Vector::x()).unwrap();
        let b = Line::new(p(0., 0., 2.), Vector::y()).unwrap();
        let c = concurrency_point(&[a, b], &tol()).unwrap();
        assert_relative_eq!(c.point, p(0., 0., 1.), epsilon = 1e-14);

        let par = [
            Line::new(p(0., 0., 0.), Vector::z()).unwrap(),
            Line::new(p(1., 0., 0.), Vector::z()).unwrap(),
        ];
        assert!(matches!(concurrency_point(&par, &tol()), Err(Error::FlatPartner)));
    }
}
