//! Python module `ortholog`: tetrahedra, the orthosecting solver and the
//! analysis routines. Points are 3-element sequences; tetrahedra are
//! `Tetrahedron` objects built from four points. Vertex and face indices are
//! zero-based, as in the Rust library.

use ortholog_core::analysis;
use ortholog_core::geom::{Point, SphereOrPlane, Tolerance};
use ortholog_core::orthology::{self, pair_tolerance};
use ortholog_core::pedal;
use ortholog_core::solver::{self, SolverConfig};
use pyo3::exceptions::PyValueError;
use pyo3::prelude::*;
use pyo3::types::PyDict;

type Coords = [[f64; 3]; 4];

fn err(e: impl std::fmt::Display) -> PyErr {
    PyValueError::new_err(e.to_string())
}

fn pt(p: [f64; 3]) -> Point {
    Point::new(p[0], p[1], p[2])
}

fn arr(p: &Point) -> [f64; 3] {
    [p.x, p.y, p.z]
}

#[pyclass(name = "Tetrahedron", frozen, from_py_object, module = "ortholog")]
#[derive(Clone, Copy)]
pub struct PyTetrahedron {
    inner: orthology::Tetrahedron,
}

impl From<orthology::Tetrahedron> for PyTetrahedron {
    fn from(inner: orthology::Tetrahedron) -> Self {
        Self { inner }
    }
}

#[pymethods]
impl PyTetrahedron {
    #[new]
    fn new(vertices: Coords) -> PyResult<Self> {
        orthology::Tetrahedron::from_coords(vertices).map(Self::from).map_err(err)
    }

    #[getter]
    fn vertices(&self) -> Coords {
        self.inner.coords()
    }

    fn diameter(&self) -> f64 {
        self.inner.diameter()
    }

    fn signed_volume(&self) -> f64 {
        self.inner.signed_volume()
    }

    fn centroid(&self) -> [f64; 3] {
        arr(&self.inner.centroid())
    }

    fn __repr__(&self) -> String {
        format!("Tetrahedron({:?})", self.inner.coords())
    }
}

fn tol_for(tets: &[&PyTetrahedron]) -> PyResult<Tolerance> {
    let pts: Vec<Point> = tets.iter().flat_map(|t| t.inner.vertices().to_vec()).collect();
    Tolerance::for_points(&pts).map_err(err)
}

fn carrier_dict<'py>(py: Python<'py>, c: &SphereOrPlane) -> PyResult<Bound<'py, PyDict>> {
    let d = PyDict::new(py);
    match c {
        SphereOrPlane::Sphere { center, radius } => {
            d.set_item("kind", "sphere")?;
            d.set_item("center", arr(center))?;
            d.set_item("radius", radius)?;
        }
        SphereOrPlane::Plane(p) => {
            d.set_item("kind", "plane")?;
            d.set_item("normal", [p.normal.x, p.normal.y, p.normal.z])?;
            d.set_item("offset", p.offset)?;
        }
    }
    Ok(d)
}

/// Twelve signed residuals: six orthogonality, then six intersection.
#[pyfunction]
fn orthosect_residuals(a: &PyTetrahedron, b: &PyTetrahedron) -> PyResult<[f64; 12]> {
    let tol = tol_for(&[a, b])?;
    solver::orthosect_residuals(&a.inner, &b.inner, tol.scene_scale)
        .map(|r| r.to_array())
        .map_err(err)
}

#[pyfunction]
fn edge_orthogonality_residuals(a: &PyTetrahedron, b: &PyTetrahedron) -> PyResult<[f64; 6]> {
    let tol = tol_for(&[a, b])?;
    orthology::edge_orthogonality_residuals(&a.inner, &b.inner, &tol).map_err(err)
}

/// `(O_A, O_B)` for an orthologic pair.
#[pyfunction]
fn orthology_centers(a: &PyTetrahedron, b: &PyTetrahedron) -> PyResult<([f64; 3], [f64; 3])> {
    let tol = tol_for(&[a, b])?;
    let r = orthology::orthology_centers(&a.inner, &b.inner, &tol).map_err(err)?;
    Ok((arr(&r.center_a), arr(&r.center_b)))
}

#[pyfunction]
#[pyo3(signature = (a, center, offsets=None))]
fn construct_orthologic(a: &PyTetrahedron, center: [f64; 3], offsets: Option<[f64; 4]>) -> PyResult<PyTetrahedron> {
    orthology::construct_orthologic(&a.inner, &pt(center), offsets)
        .map(Into::into)
        .map_err(err)
}

/// Orthosecting partners of `a` from `restarts` seeded random starts.
#[pyfunction]
#[pyo3(signature = (a, seed, restarts=64))]
fn solve(py: Python<'_>, a: &PyTetrahedron, seed: u64, restarts: usize) -> PyResult<Vec<PyTetrahedron>> {
    let a = a.inner;
    let out = py
        .detach(|| solver::solve(&a, &SolverConfig::new(seed, restarts)))
        .map_err(err)?;
    Ok(out.solutions.into_iter().map(Into::into).collect())
}

/// Samples along the solution family through `b0`; a negative `h` walks
/// the other way.
#[pyfunction]
fn trace_family<'py>(
    py: Python<'py>,
    a: &PyTetrahedron,
    b0: &PyTetrahedron,
    steps: usize,
    h: f64,
) -> PyResult<Bound<'py, PyDict>> {
    let branch = solver::trace_family(&a.inner, &b0.inner, steps, h).map_err(err)?;
    let d = PyDict::new(py);
    let samples: Vec<PyTetrahedron> = branch.samples.into_iter().map(Into::into).collect();
    d.set_item("samples", samples)?;
    d.set_item("max_residuals", branch.max_residuals)?;
    d.set_item("nullities", branch.nullities)?;
    d.set_item("stop", branch.stop.map(|s| format!("{s:?}")))?;
    Ok(d)
}

#[pyfunction]
fn verify_sphere<'py>(py: Python<'py>, a: &PyTetrahedron, b: &PyTetrahedron) -> PyResult<Bound<'py, PyDict>> {
    let tol = tol_for(&[a, b])?;
    let s = analysis::verify_sphere(&a.inner, &b.inner, &tol).map_err(err)?;
    let d = PyDict::new(py);
    d.set_item("points", s.points.iter().map(arr).collect::<Vec<_>>())?;
    d.set_item("carrier", carrier_dict(py, &s.carrier)?)?;
    d.set_item("residuals", s.residuals)?;
    d.set_item("max_residual", s.max_residual)?;
    d.set_item("midpoint_gap", s.midpoint_gap)?;
    Ok(d)
}

#[pyfunction]
fn conjugate(a: &PyTetrahedron, b: &PyTetrahedron) -> PyResult<PyTetrahedron> {
    let tol = tol_for(&[a, b])?;
    analysis::conjugate(&a.inner, &b.inner, &tol).map(Into::into).map_err(err)
}

/// One residual per sphericity parameter for the source `b4` on the face
/// opposite vertex 3.
#[pyfunction]
fn chain_sphere_residual(a: &PyTetrahedron, b4: [f64; 3]) -> PyResult<Vec<f64>> {
    let tol = tol_for(&[a])?;
    pedal::chain_sphere_residual(&a.inner, &pt(b4), &tol).map_err(err)
}

#[pyfunction]
#[pyo3(signature = (a, b4, root_index, max_residual=solver::CURVE_POINT_TOLERANCE))]
fn solve_from_curve_point(a: &PyTetrahedron, b4: [f64; 3], root_index: usize, max_residual: f64) -> PyResult<PyTetrahedron> {
    let tol = tol_for(&[a])?;
    solver::solve_from_curve_point(&a.inner, &pt(b4), root_index, max_residual, &tol)
        .map(Into::into)
        .map_err(err)
}

#[pyfunction]
fn isogonal_conjugate(p: [f64; 3], triangle: [[f64; 3]; 3]) -> PyResult<[f64; 3]> {
    let tri = triangle.map(pt);
    let tol = Tolerance::for_points(&tri).map_err(err)?;
    pedal::isogonal_conjugate(&pt(p), &tri, &tol).map(|q| arr(&q)).map_err(err)
}

/// Self-conjugate curve on the plane of face `face`. Polyline vertices are
/// returned both in the 2-D face frame and in space.
#[pyfunction]
#[pyo3(signature = (a, face, grid=128, window=None))]
fn trace_curve<'py>(
    py: Python<'py>,
    a: &PyTetrahedron,
    face: usize,
    grid: usize,
    window: Option<[f64; 4]>,
) -> PyResult<Bound<'py, PyDict>> {
    let tol = tol_for(&[a])?;
    let host = a.inner;
    let trace = py
        .detach(|| analysis::trace_curve(&host, face, window, grid, &tol))
        .map_err(err)?;
    let d = PyDict::new(py);
    let mut lines = Vec::new();
    for p in &trace.polylines {
        let l = PyDict::new(py);
        l.set_item("branch", p.branch)?;
        l.set_item("closed", p.closed)?;
        l.set_item("points", p.points.clone())?;
        l.set_item(
            "points3d",
            p.points.iter().map(|q| arr(&trace.frame.to_3d(*q))).collect::<Vec<_>>(),
        )?;
        lines.push(l);
    }
    d.set_item("polylines", lines)?;
    d.set_item("window", trace.window)?;
    d.set_item("max_residual", trace.max_residual)?;
    d.set_item("host", PyTetrahedron::from(trace.host))?;
    Ok(d)
}

#[pyfunction]
fn iterate_sequence<'py>(py: Python<'py>, b0: &PyTetrahedron, b1: &PyTetrahedron, n: usize) -> PyResult<Bound<'py, PyDict>> {
    let tol = pair_tolerance(&b0.inner, &b1.inner).map_err(err)?;
    let run = analysis::iterate_sequence(&b0.inner, &b1.inner, n, &tol).map_err(err)?;
    let d = PyDict::new(py);
    let tets: Vec<PyTetrahedron> = run.tetrahedra.into_iter().map(Into::into).collect();
    d.set_item("tetrahedra", tets)?;
    d.set_item("carrier", carrier_dict(py, &run.carrier)?)?;
    d.set_item("max_carrier_residual", run.max_carrier_residual)?;
    d.set_item("distinct_centers", run.distinct_centers.iter().map(arr).collect::<Vec<_>>())?;
    d.set_item("truncated", run.truncated)?;
    Ok(d)
}

#[pymodule]
fn ortholog(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<PyTetrahedron>()?;
    m.add_function(wrap_pyfunction!(orthosect_residuals, m)?)?;
    m.add_function(wrap_pyfunction!(edge_orthogonality_residuals, m)?)?;
    m.add_function(wrap_pyfunction!(orthology_centers, m)?)?;
    m.add_function(wrap_pyfunction!(construct_orthologic, m)?)?;
    m.add_function(wrap_pyfunction!(solve, m)?)?;
    m.add_function(wrap_pyfunction!(trace_family, m)?)?;
    m.add_function(wrap_pyfunction!(verify_sphere, m)?)?;
    m.add_function(wrap_pyfunction!(conjugate, m)?)?;
    m.add_function(wrap_pyfunction!(chain_sphere_residual, m)?)?;
    m.add_function(wrap_pyfunction!(solve_from_curve_point, m)?)?;
    m.add_function(wrap_pyfunction!(isogonal_conjugate, m)?)?;
    m.add_function(wrap_pyfunction!(trace_curve, m)?)?;
    m.add_function(wrap_pyfunction!(iterate_sequence, m)?)?;
    Ok(())
}
