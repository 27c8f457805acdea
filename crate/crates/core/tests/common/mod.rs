#![allow(dead_code)]

use nalgebra::{DMatrix, DVector, Matrix3, Point3, Vector3};
use ortholog_core::orthology::Tetrahedron;
use rand::Rng;
use rand_chacha::ChaCha8Rng;

pub type P = Point3<f64>;

/// A random host with vertices in the unit box, rejecting thin ones.
pub fn random_host(rng: &mut ChaCha8Rng) -> Tetrahedron {
    loop {
        let v: [P; 4] = std::array::from_fn(|_| random_point(rng, 1.0));
        let t = Tetrahedron::new(v).unwrap();
        let d = t.diameter();
        let shortest = (0..4)
            .flat_map(|i| (i + 1..4).map(move |j| (i, j)))
            .map(|(i, j)| (v[i] - v[j]).norm())
            .fold(f64::INFINITY, f64::min);
        if t.signed_volume().abs() > 0.02 * d.powi(3) && shortest > 0.25 * d {
            return t;
        }
    }
}

pub fn random_point(rng: &mut ChaCha8Rng, half: f64) -> P {
    P::new(
        rng.random_range(-half..half),
        rng.random_range(-half..half),
        rng.random_range(-half..half),
    )
}

pub fn scale_of(ts: &[&Tetrahedron]) -> f64 {
    let pts: Vec<P> = ts.iter().flat_map(|t| t.vertices().to_vec()).collect();
    let mut d = 0.0_f64;
    for p in &pts {
        for q in &pts {
            d = d.max((p - q).norm());
        }
    }
    d
}

/// Algebraic sphere fit `|x|^2 + g.x + f = 0`; returns center, radius and
/// the largest distance of a point from the sphere.
pub fn fit_sphere(pts: &[P]) -> (P, f64, f64) {
    let m = DMatrix::from_fn(pts.len(), 4, |r, c| if c < 3 { pts[r][c] } else { 1.0 });
    let rhs = DVector::from_fn(pts.len(), |r, _| -pts[r].coords.norm_squared());
    let sol = m.svd(true, true).solve(&rhs, 1e-14).unwrap();
    let center = P::new(-sol[0] / 2.0, -sol[1] / 2.0, -sol[2] / 2.0);
    let radius = (center.coords.norm_squared() - sol[3]).sqrt();
    let worst = pts
        .iter()
        .map(|p| ((p - center).norm() - radius).abs())
        .fold(0.0, f64::max);
    (center, radius, worst)
}

/// Point closest (in least squares) to a set of lines, and the largest
/// distance from it to any line.
pub fn nearest_to_lines(lines: &[(P, Vector3<f64>)]) -> (P, f64) {
    let mut m = Matrix3::zeros();
    let mut rhs = Vector3::zeros();
    for (p, d) in lines {
        let d = d.normalize();
        let proj = Matrix3::identity() - d * d.transpose();
        m += proj;
        rhs += proj * p.coords;
    }
    let x = P::from(m.try_inverse().unwrap() * rhs);
    let spread = lines
        .iter()
        .map(|(p, d)| {
            let d = d.normalize();
            let w = x - p;
            (w - d * d.dot(&w)).norm()
        })
        .fold(0.0, f64::max);
    (x, spread)
}

pub fn face_normal(t: &Tetrahedron, i: usize) -> Vector3<f64> {
    let f: Vec<P> = (0..4).filter(|&k| k != i).map(|k| t.vertex(k)).collect();
    (f[1] - f[0]).cross(&(f[2] - f[0]))
}

/// Orthology center of `a` with respect to `b`: the lines through `A_i`
/// perpendicular to the face of `b` opposite `B_i`.
pub fn orthology_center(a: &Tetrahedron, b: &Tetrahedron) -> (P, f64) {
    let lines: Vec<(P, Vector3<f64>)> = (0..4).map(|i| (a.vertex(i), face_normal(b, i))).collect();
    nearest_to_lines(&lines)
}

/// Midpoint of the common perpendicular of two lines.
pub fn line_meet(p1: P, d1: Vector3<f64>, p2: P, d2: Vector3<f64>) -> (P, f64) {
    let w = p1 - p2;
    let (a, b, c) = (d1.dot(&d1), d1.dot(&d2), d2.dot(&d2));
    let (d, e) = (d1.dot(&w), d2.dot(&w));
    let den = a * c - b * b;
    let s = (b * e - c * d) / den;
    let t = (a * e - b * d) / den;
    let q1 = p1 + d1 * s;
    let q2 = p2 + d2 * t;
    (nalgebra::center(&q1, &q2), (q1 - q2).norm())
}

/// Isogonal conjugate through barycentrics: `(u:v:w) -> (a^2/u : b^2/v : c^2/w)`.
pub fn isogonal_by_barycentrics(p: &P, tri: &[P; 3]) -> P {
    let [a, b, c] = tri;
    let n = (b - a).cross(&(c - a));
    let area = |x: &P, y: &P, z: &P| (y - x).cross(&(z - x)).dot(&n);
    let (u, v, w) = (area(p, b, c), area(a, p, c), area(a, b, p));
    let la = (b - c).norm_squared();
    let lb = (a - c).norm_squared();
    let lc = (a - b).norm_squared();
    let (x, y, z) = (la / u, lb / v, lc / w);
    let s = x + y + z;
    P::from((a.coords * x + b.coords * y + c.coords * z) / s)
}

pub fn foot(p: &P, a: &P, b: &P) -> P {
    let d = b - a;
    a + d * (d.dot(&(p - a)) / d.norm_squared())
}

/// Center and radius of the circle through three points.
pub fn circumcircle(a: &P, b: &P, c: &P) -> (P, f64) {
    let u = b - a;
    let v = c - a;
    let n = u.cross(&v);
    let center = a + (n.cross(&u) * v.norm_squared() + v.cross(&n) * u.norm_squared()) / (2.0 * n.norm_squared());
    (center, (center - a).norm())
}
