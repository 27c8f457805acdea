//! Command reports. Every verdict carries the number it was decided on and
//! the bound it was compared against, so a report can be re-checked from
//! its own contents.

use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use crate::analysis::{CurveTrace, SphereReport};
use crate::geom::{Point, SphereOrPlane};
use crate::orthology::Tetrahedron;
use crate::solver::ResidualVector;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Bound {
    /// Passes when `value <= bound`.
    AtMost,
    /// Passes when `value >= bound`.
    AtLeast,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Verdict {
    pub name: String,
    pub value: f64,
    pub kind: Bound,
    pub bound: f64,
    pub pass: bool,
}

/// Non-finite values are recorded as `f64::MAX` (always failing), since
/// JSON has no representation for them.
fn recordable(value: f64) -> f64 {
    if value.is_finite() { value } else { f64::MAX }
}

impl Verdict {
    pub fn at_most(name: &str, value: f64, bound: f64) -> Self {
        Self {
            name: name.into(),
            value: recordable(value),
            kind: Bound::AtMost,
            bound,
            pass: value <= bound,
        }
    }

    pub fn at_least(name: &str, value: f64, bound: f64) -> Self {
        Self {
            name: name.into(),
            value: recordable(value),
            kind: Bound::AtLeast,
            bound,
            pass: value >= bound,
        }
    }

    /// Re-derives `pass` from `value`, `kind` and `bound`.
    pub fn recheck(&self) -> bool {
        match self.kind {
            Bound::AtMost => self.value <= self.bound,
            Bound::AtLeast => self.value >= self.bound,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Report {
    pub command: String,
    pub args: Vec<String>,
    pub summary: String,
    pub results: Value,
    pub verdicts: Vec<Verdict>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub wall_time_seconds: Option<f64>,
}

impl Report {
    pub fn new(command: &str, args: Vec<String>) -> Self {
        Self {
            command: command.into(),
            args,
            summary: String::new(),
            results: Value::Null,
            verdicts: Vec::new(),
            wall_time_seconds: None,
        }
    }

    pub fn passed(&self) -> bool {
        self.verdicts.iter().all(|v| v.pass)
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("report serializes");
        s.push('\n');
        s
    }
}

pub fn point(p: &Point) -> Value {
    json!([p.x, p.y, p.z])
}

pub fn tetrahedron(t: &Tetrahedron) -> Value {
    json!(t.coords())
}

pub fn carrier(c: &SphereOrPlane) -> Value {
    match c {
        SphereOrPlane::Sphere { center, radius } => json!({
            "kind": "sphere",
            "center": point(center),
            "radius": radius,
        }),
        SphereOrPlane::Plane(p) => json!({
            "kind": "plane",
            "normal": [p.normal.x, p.normal.y, p.normal.z],
            "offset": p.offset,
        }),
    }
}

pub fn residuals(r: &ResidualVector) -> Value {
    json!({
        "orthogonality": r.orthogonality,
        "intersection": r.intersection,
        "max": r.max_abs(),
    })
}

pub fn sphere(s: &SphereReport) -> Value {
    let labels: Vec<String> = s
        .edges
        .iter()
        .map(|e| format!("V{}{}", e.0 + 1, e.1 + 1))
        .collect();
    json!({
        "points": labels.iter().zip(&s.points).map(|(l, p)| json!({"label": l, "point": point(p)})).collect::<Vec<_>>(),
        "carrier": carrier(&s.carrier),
        "residuals": s.residuals,
        "max_residual": s.max_residual,
        "orthology_centers": s.centers.map(|(a, b)| json!([point(&a), point(&b)])),
        "midpoint_gap": s.midpoint_gap,
        "scene_scale": s.scene_scale,
    })
}

pub fn curve(t: &CurveTrace) -> Value {
    json!({
        "face": t.face + 1,
        "permutation": t.permutation.map(|i| i + 1),
        "frame": {
            "origin": point(&t.frame.origin),
            "e1": [t.frame.e1.x, t.frame.e1.y, t.frame.e1.z],
            "e2": [t.frame.e2.x, t.frame.e2.y, t.frame.e2.z],
        },
        "window": t.window,
        "grid": t.grid,
        "residual_bound": t.residual_bound,
        "max_residual": t.max_residual,
        "vertex_count": t.vertex_count(),
        "polylines": t.polylines.iter().map(|p| json!({
            "branch": p.branch,
            "closed": p.closed,
            "points": p.points,
        })).collect::<Vec<_>>(),
    })
}
