//! Static figures: SVG for content in a face plane, OBJ for 3-D scenes.

use std::fmt::Write as _;

use crate::analysis::{CurveTrace, FaceFrame};
use crate::error::Result;
use crate::geom::{project_to_plane, Plane, Point, SphereOrPlane, Tolerance, Vector};
use crate::orthology::{Tetrahedron, EDGES};
use crate::pedal::{isogonal_conjugate, pedal_circle, pedal_triangle};

/// Everything drawn in one face plane, in frame coordinates.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct FaceFigure {
    pub triangle: Vec<[f64; 2]>,
    pub feet: Vec<[f64; 2]>,
    pub sources: Vec<[f64; 2]>,
    /// Center and radius.
    pub circles: Vec<([f64; 2], f64)>,
    pub polylines: Vec<Vec<[f64; 2]>>,
    /// `[x0, y0, x1, y1]`; derived from the content when `None`.
    pub view: Option<[f64; 4]>,
}

impl FaceFigure {
    /// The face triangle alone, in the frame of `face`.
    pub fn for_face(face: &[Point; 3]) -> Result<(Self, FaceFrame)> {
        let frame = FaceFrame::new(face)?;
        Ok((
            Self {
                triangle: face.iter().map(|p| frame.to_2d(p)).collect(),
                ..Self::default()
            },
            frame,
        ))
    }

    /// Adds the pedal triangle of `source` (projected to the face), its
    /// pedal circle, and the isogonal conjugate with its feet.
    pub fn add_pedal(&mut self, frame: &FaceFrame, face: &[Point; 3], source: &Point, tol: &Tolerance) -> Result<()> {
        let plane = Plane::through(&face[0], &face[1], &face[2])?;
        let src = project_to_plane(source, &plane);
        let circle = pedal_circle(&src, face, tol)?;
        let conj = isogonal_conjugate(&src, face, tol)?;
        for s in [src, conj] {
            let tri = pedal_triangle(&s, face, tol, false)?;
            self.sources.push(frame.to_2d(&s));
            self.feet.extend(tri.feet.iter().map(|p| frame.to_2d(p)));
        }
        self.circles.push((frame.to_2d(&circle.center), circle.radius));
        Ok(())
    }

    pub fn add_trace(&mut self, trace: &CurveTrace) {
        self.polylines.extend(trace.polylines.iter().map(|p| p.points.clone()));
        self.view = Some(trace.window);
    }

    fn bounds(&self) -> [f64; 4] {
        if let Some(v) = self.view {
            return v;
        }
        let mut b = [f64::INFINITY, f64::INFINITY, f64::NEG_INFINITY, f64::NEG_INFINITY];
        let mut grow = |p: [f64; 2], r: f64| {
            b[0] = b[0].min(p[0] - r);
            b[1] = b[1].min(p[1] - r);
            b[2] = b[2].max(p[0] + r);
            b[3] = b[3].max(p[1] + r);
        };
        for p in self.triangle.iter().chain(&self.feet).chain(&self.sources) {
            grow(*p, 0.0);
        }
        for (c, r) in &self.circles {
            grow(*c, *r);
        }
        let pad = 0.1 * (b[2] - b[0]).max(b[3] - b[1]).max(1e-12);
        [b[0] - pad, b[1] - pad, b[2] + pad, b[3] + pad]
    }
}

/// Renders a figure `width` pixels wide. Layers are `<g>` elements with ids
/// `edges`, `feet`, `sources`, `circles` and `curve`; each curve polyline is
/// one `<polyline>` with one coordinate pair per trace vertex.
pub fn svg(fig: &FaceFigure, width: f64) -> String {
    let [x0, y0, x1, y1] = fig.bounds();
    let k = width / (x1 - x0);
    let height = (y1 - y0) * k;
    let tx = |p: [f64; 2]| ((p[0] - x0) * k, (y1 - p[1]) * k);
    let dot = (width / 250.0).max(1.0);
    let mut s = String::new();
    let _ = writeln!(
        s,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{width:.0}" height="{height:.0}" viewBox="0 0 {width:.3} {height:.3}">"#
    );
    s.push_str("<g id=\"edges\" fill=\"none\" stroke=\"black\" stroke-width=\"1.5\">\n");
    if fig.triangle.len() == 3 {
        let pts: Vec<String> = fig.triangle.iter().map(|&p| {
            let (x, y) = tx(p);
            format!("{x:.3},{y:.3}")
        }).collect();
        let _ = writeln!(s, r#"<polygon points="{}"/>"#, pts.join(" "));
    }
    s.push_str("</g>\n<g id=\"circles\" fill=\"none\" stroke=\"#3070b0\" stroke-width=\"1\">\n");
    for (c, r) in &fig.circles {
        let (x, y) = tx(*c);
        let _ = writeln!(s, r#"<circle cx="{x:.3}" cy="{y:.3}" r="{:.3}"/>"#, r * k);
    }
    s.push_str("</g>\n<g id=\"curve\" fill=\"none\" stroke=\"#c03030\" stroke-width=\"1\">\n");
    for pl in &fig.polylines {
        let pts: Vec<String> = pl.iter().map(|&p| {
            let (x, y) = tx(p);
            format!("{x:.3},{y:.3}")
        }).collect();
        let _ = writeln!(s, r#"<polyline points="{}"/>"#, pts.join(" "));
    }
    s.push_str("</g>\n<g id=\"feet\" fill=\"#3070b0\">\n");
    for p in &fig.feet {
        let (x, y) = tx(*p);
        let _ = writeln!(s, r#"<circle cx="{x:.3}" cy="{y:.3}" r="{dot:.3}"/>"#);
    }
    s.push_str("</g>\n<g id=\"sources\" fill=\"black\">\n");
    for p in &fig.sources {
        let (x, y) = tx(*p);
        let _ = writeln!(s, r#"<circle cx="{x:.3}" cy="{y:.3}" r="{:.3}"/>"#, 1.5 * dot);
    }
    s.push_str("</g>\n</svg>\n");
    s
}

/// 3-D content for OBJ export.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct ObjScene {
    pub tetrahedra: Vec<(String, Tetrahedron)>,
    pub points: Vec<(String, Point)>,
    pub carrier: Option<SphereOrPlane>,
    /// Rings of the sphere mesh; segments are twice as many.
    pub sphere_resolution: usize,
}

/// Wavefront OBJ text. Tetrahedra become line elements, labeled points
/// become one-vertex point elements in their own object, the carrier is a
/// UV sphere (or a square patch of its plane around the points).
pub fn obj(scene: &ObjScene) -> String {
    let mut s = String::from("# ortholog scene\n");
    let mut next = 1usize;
    let mut vertex = |s: &mut String, p: &Point| -> usize {
        let _ = writeln!(s, "v {} {} {}", p.x, p.y, p.z);
        next += 1;
        next - 1
    };
    for (name, t) in &scene.tetrahedra {
        let _ = writeln!(s, "o {name}");
        let ids: Vec<usize> = t.vertices().iter().map(|p| vertex(&mut s, p)).collect();
        for &(i, j) in &EDGES {
            let _ = writeln!(s, "l {} {}", ids[i], ids[j]);
        }
    }
    for (label, p) in &scene.points {
        let _ = writeln!(s, "o {label}");
        let id = vertex(&mut s, p);
        let _ = writeln!(s, "p {id}");
    }
    match scene.carrier {
        Some(SphereOrPlane::Sphere { center, radius }) => {
            s.push_str("o carrier\n");
            let rings = scene.sphere_resolution.max(3);
            let segs = 2 * rings;
            let north = vertex(&mut s, &(center + Vector::z() * radius));
            let mut ring_ids = Vec::new();
            for r in 1..rings {
                let theta = std::f64::consts::PI * r as f64 / rings as f64;
                let ids: Vec<usize> = (0..segs)
                    .map(|k| {
                        let phi = 2.0 * std::f64::consts::PI * k as f64 / segs as f64;
                        let d = Vector::new(theta.sin() * phi.cos(), theta.sin() * phi.sin(), theta.cos());
                        vertex(&mut s, &(center + d * radius))
                    })
                    .collect();
                ring_ids.push(ids);
            }
            let south = vertex(&mut s, &(center - Vector::z() * radius));
            for k in 0..segs {
                let k1 = (k + 1) % segs;
                let _ = writeln!(s, "f {} {} {}", north, ring_ids[0][k], ring_ids[0][k1]);
                for r in 0..ring_ids.len() - 1 {
                    let (a, b) = (&ring_ids[r], &ring_ids[r + 1]);
                    let _ = writeln!(s, "f {} {} {} {}", a[k], b[k], b[k1], a[k1]);
                }
                let last = ring_ids.last().expect("at least two rings");
                let _ = writeln!(s, "f {} {} {}", last[k], south, last[k1]);
            }
        }
        Some(SphereOrPlane::Plane(plane)) => {
            s.push_str("o carrier\n");
            let pts: Vec<Point> = scene.points.iter().map(|(_, p)| *p).collect();
            let c = if pts.is_empty() {
                plane.origin()
            } else {
                project_to_plane(&Point::from(pts.iter().map(|p| p.coords).sum::<Vector>() / pts.len() as f64), &plane)
            };
            let half = pts.iter().map(|p| (p - c).norm()).fold(1.0_f64, f64::max);
            let n = plane.normal;
            let u = if n.x.abs() < 0.9 { Vector::x() } else { Vector::y() };
            let u = (u - n * n.dot(&u)).normalize() * half;
            let v = n.cross(&u);
            let ids: Vec<usize> = [u + v, -u + v, -u - v, u - v]
                .iter()
                .map(|d| vertex(&mut s, &(c + d)))
                .collect();
            let _ = writeln!(s, "f {} {} {} {}", ids[0], ids[1], ids[2], ids[3]);
        }
        None => {}
    }
    s
}
