//! Numerical solution of the orthosecting system for a given tetrahedron.
//!
//! For a fixed host `A` the unknowns are the twelve coordinates of `B`. Each
//! of the six edge pairings contributes an orthogonality residual (a
//! normalized dot product) and an intersection residual (a normalized
//! triple product, which vanishes when the two edge lines are coplanar).
//! Only five orthogonality rows are independent, so generic solution sets
//! are curves; [`solve`] samples points on them from random starts and
//! [`trace_family`] walks along one.

use nalgebra::{DMatrix, DVector, Matrix3};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geom::{Point, Tolerance, Vector};
use crate::orthology::{Tetrahedron, EDGES, PAIRINGS};
use crate::pedal::{
    chain_sphere_samples, complete_chain, reconstruct_from_chain, SphericalChain,
};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ResidualVector {
    /// Signed `(A_i - A_j)·(B_k - B_l) / (|A_i - A_j| |B_k - B_l|)`.
    pub orthogonality: [f64; 6],
    /// `det[A_i - A_j, B_k - B_l, B_k - A_i] / (|A_i - A_j| |B_k - B_l| scale)`.
    pub intersection: [f64; 6],
}

impl ResidualVector {
    pub fn max_abs(&self) -> f64 {
        self.orthogonality
            .iter()
            .chain(self.intersection.iter())
            .fold(0.0, |m, r| m.max(r.abs()))
    }

    pub fn max_orthogonality(&self) -> f64 {
        self.orthogonality.iter().fold(0.0, |m, r| m.max(r.abs()))
    }

    pub fn max_intersection(&self) -> f64 {
        self.intersection.iter().fold(0.0, |m, r| m.max(r.abs()))
    }

    pub fn to_array(&self) -> [f64; 12] {
        let mut out = [0.0; 12];
        out[..6].copy_from_slice(&self.orthogonality);
        out[6..].copy_from_slice(&self.intersection);
        out
    }
}

fn check_edges(t: &Tetrahedron, tag: char) -> Result<()> {
    for &(i, j) in &EDGES {
        if (t.vertex(i) - t.vertex(j)).norm() == 0.0 {
            return Err(Error::ZeroLengthEdge { tet: tag, edge: (i, j) });
        }
    }
    Ok(())
}

pub fn orthosect_residuals(a: &Tetrahedron, b: &Tetrahedron, scale: f64) -> Result<ResidualVector> {
    check_edges(a, 'A')?;
    check_edges(b, 'B')?;
    let mut orthogonality = [0.0; 6];
    let mut intersection = [0.0; 6];
    for (n, p) in PAIRINGS.iter().enumerate() {
        let (i, j) = p.a_edge;
        let (k, l) = p.b_edge;
        let ea = a.vertex(i) - a.vertex(j);
        let eb = b.vertex(k) - b.vertex(l);
        let w = b.vertex(k) - a.vertex(i);
        let norm = ea.norm() * eb.norm();
        orthogonality[n] = ea.dot(&eb) / norm;
        intersection[n] = w.dot(&ea.cross(&eb)) / (norm * scale);
    }
    Ok(ResidualVector {
        orthogonality,
        intersection,
    })
}

/// Which equations of the system are imposed.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct ConstraintSet {
    /// Pairing (index into [`PAIRINGS`]) whose intersection condition is
    /// left out, giving the five-intersection relaxation.
    pub drop_intersection: Option<usize>,
    /// Also require the partner to be flat (zero volume).
    pub flat: bool,
}

impl ConstraintSet {
    pub fn rows(&self) -> usize {
        12 - usize::from(self.drop_intersection.is_some()) + usize::from(self.flat)
    }
}

/// The system in coordinates normalized by `center` and `scale`.
#[derive(Debug, Clone)]
pub struct System {
    host: [Point; 4],
    center: Point,
    scale: f64,
    constraints: ConstraintSet,
}

impl System {
    pub fn new(host: &Tetrahedron, constraints: ConstraintSet) -> Result<Self> {
        let scale = host.diameter();
        if !(scale > 0.0) {
            return Err(Error::Degenerate("host has zero diameter".into()));
        }
        let center = host.centroid();
        Ok(Self {
            host: host.vertices().map(|p| Point::from((p - center) / scale)),
            center,
            scale,
            constraints,
        })
    }

    pub fn scale(&self) -> f64 {
        self.scale
    }

    pub fn encode(&self, b: &Tetrahedron) -> DVector<f64> {
        DVector::from_iterator(
            12,
            b.vertices()
                .iter()
                .flat_map(|p| ((p - self.center) / self.scale).iter().copied().collect::<Vec<_>>()),
        )
    }

    pub fn decode(&self, x: &DVector<f64>) -> Result<Tetrahedron> {
        let v: [Point; 4] = std::array::from_fn(|m| {
            self.center + Vector::new(x[3 * m], x[3 * m + 1], x[3 * m + 2]) * self.scale
        });
        Tetrahedron::new(v)
    }

    fn vertex(x: &DVector<f64>, m: usize) -> Vector {
        Vector::new(x[3 * m], x[3 * m + 1], x[3 * m + 2])
    }

    /// Residuals and analytic Jacobian at normalized coordinates `x`.
    pub fn evaluate(&self, x: &DVector<f64>) -> (DVector<f64>, DMatrix<f64>) {
        let rows = self.constraints.rows();
        let mut r = DVector::zeros(rows);
        let mut jac = DMatrix::zeros(rows, 12);
        let put = |jac: &mut DMatrix<f64>, row: usize, m: usize, g: &Vector| {
            for c in 0..3 {
                jac[(row, 3 * m + c)] += g[c];
            }
        };
        let mut row = 0;
        for p in PAIRINGS.iter() {
            let (i, j) = p.a_edge;
            let (k, l) = p.b_edge;
            let a = self.host[i] - self.host[j];
            let b = Self::vertex(x, k) - Self::vertex(x, l);
            let (na, nb) = (a.norm(), b.norm());
            let dot = a.dot(&b);
            r[row] = dot / (na * nb);
            let g = a / (na * nb) - b * (dot / (na * nb * nb * nb));
            put(&mut jac, row, k, &g);
            put(&mut jac, row, l, &(-g));
            row += 1;
        }
        for (n, p) in PAIRINGS.iter().enumerate() {
            if self.constraints.drop_intersection == Some(n) {
                continue;
            }
            let (i, j) = p.a_edge;
            let (k, l) = p.b_edge;
            let a = self.host[i] - self.host[j];
            let b = Self::vertex(x, k) - Self::vertex(x, l);
            let w = Self::vertex(x, k) - self.host[i].coords;
            let (na, nb) = (a.norm(), b.norm());
            let det = w.dot(&a.cross(&b));
            r[row] = det / (na * nb);
            let db = w.cross(&a) / (na * nb) - b * (det / (na * nb * nb * nb));
            let dw = a.cross(&b) / (na * nb);
            put(&mut jac, row, k, &(db + dw));
            put(&mut jac, row, l, &(-db));
            row += 1;
        }
        if self.constraints.flat {
            let v: [Vector; 4] = std::array::from_fn(|m| Self::vertex(x, m));
            let (e1, e2, e3) = (v[1] - v[0], v[2] - v[0], v[3] - v[0]);
            r[row] = Matrix3::from_columns(&[e1, e2, e3]).determinant();
            let g1 = e2.cross(&e3);
            let g2 = e3.cross(&e1);
            let g3 = e1.cross(&e2);
            put(&mut jac, row, 1, &g1);
            put(&mut jac, row, 2, &g2);
            put(&mut jac, row, 3, &g3);
            put(&mut jac, row, 0, &(-(g1 + g2 + g3)));
        }
        (r, jac)
    }

    pub fn residuals(&self, x: &DVector<f64>) -> DVector<f64> {
        self.evaluate(x).0
    }

    fn min_edge(x: &DVector<f64>) -> f64 {
        EDGES
            .iter()
            .map(|&(i, j)| (Self::vertex(x, i) - Self::vertex(x, j)).norm())
            .fold(f64::INFINITY, f64::min)
    }

    fn max_coord(x: &DVector<f64>) -> f64 {
        x.amax()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SolverConfig {
    pub seed: u64,
    pub restarts: usize,
    pub max_iterations: usize,
    /// Initial damping relative to the largest diagonal entry of `J^T J`.
    pub damping_init: f64,
    /// Solutions must reach this max residual.
    pub accept_residual: f64,
    /// Shortest admissible partner edge, relative to the host diameter.
    pub min_edge: f64,
    /// Largest admissible partner coordinate, relative to the host diameter,
    /// measured from the host centroid.
    pub max_coordinate: f64,
    /// Solutions closer than this (relative) in every vertex are merged.
    pub distinct: f64,
    pub constraints: ConstraintSet,
}

impl SolverConfig {
    pub fn new(seed: u64, restarts: usize) -> Self {
        Self {
            seed,
            restarts,
            ..Self::default()
        }
    }
}

impl Default for SolverConfig {
    fn default() -> Self {
        Self {
            seed: 0,
            restarts: 64,
            max_iterations: 300,
            damping_init: 1e-3,
            accept_residual: 1e-10,
            min_edge: 1e-3,
            max_coordinate: 50.0,
            distinct: 1e-3,
            constraints: ConstraintSet::default(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RestartStatus {
    Converged,
    Stalled,
    Degenerate,
    Escaped,
    Duplicate,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RestartDiagnostic {
    pub restart: usize,
    pub iterations: usize,
    pub max_residual: f64,
    pub status: RestartStatus,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SolveOutcome {
    pub solutions: Vec<Tetrahedron>,
    pub diagnostics: Vec<RestartDiagnostic>,
}

fn solve_normal(jac: &DMatrix<f64>, r: &DVector<f64>, mu: f64) -> Option<DVector<f64>> {
    let mut a = jac.transpose() * jac;
    for d in 0..a.nrows() {
        a[(d, d)] += mu;
    }
    let g = jac.transpose() * r;
    a.cholesky().map(|c| -c.solve(&g))
}

/// Damped least squares followed by minimum-norm Gauss-Newton polishing.
/// Returns the final point, iteration count and max residual.
pub fn least_squares(
    system: &System,
    mut x: DVector<f64>,
    max_iterations: usize,
    damping_init: f64,
) -> (DVector<f64>, usize, f64) {
    let (mut r, mut jac) = system.evaluate(&x);
    let mut cost = r.norm_squared();
    let diag_max = (jac.transpose() * &jac).diagonal().max();
    let mut mu = damping_init * diag_max.max(1e-12);
    let mut nu = 2.0;
    let mut it = 0;
    while it < max_iterations {
        it += 1;
        if r.amax() < 1e-13 {
            break;
        }
        let Some(h) = solve_normal(&jac, &r, mu) else {
            mu *= nu;
            nu *= 2.0;
            continue;
        };
        if h.norm() <= 1e-15 * (x.norm() + 1e-15) {
            break;
        }
        let x_new = &x + &h;
        let (r_new, jac_new) = system.evaluate(&x_new);
        let cost_new = r_new.norm_squared();
        let g = jac.transpose() * &r;
        let predicted = h.dot(&(&h * mu - &g));
        let rho = (cost - cost_new) / predicted.max(1e-300);
        if cost_new.is_finite() && rho > 0.0 {
            x = x_new;
            r = r_new;
            jac = jac_new;
            cost = cost_new;
            mu *= (1.0_f64 / 3.0).max(1.0 - (2.0 * rho - 1.0).powi(3));
            nu = 2.0;
        } else {
            mu *= nu;
            nu *= 2.0;
            if !mu.is_finite() || mu > 1e30 {
                break;
            }
        }
    }
    // Gauss-Newton with the pseudo-inverse converges quadratically onto the
    // (rank-deficient) solution set.
    for _ in 0..6 {
        if r.amax() < 1e-15 {
            break;
        }
        let svd = jac.clone().svd(true, true);
        let Ok(step) = svd.solve(&r, 1e-10 * svd.singular_values.max()) else { break };
        let x_new = &x - step;
        let (r_new, jac_new) = system.evaluate(&x_new);
        if !(r_new.amax() < r.amax()) {
            break;
        }
        x = x_new;
        r = r_new;
        jac = jac_new;
    }
    let max = r.amax();
    (x, it, max)
}

/// Finds orthosecting partners of `a` from `cfg.restarts` random starts.
///
/// Starts are drawn uniformly from the cube of half-width one host diameter
/// around the host centroid. Each restart has its own deterministic random
/// stream, so results do not depend on how restarts are scheduled.
pub fn solve(a: &Tetrahedron, cfg: &SolverConfig) -> Result<SolveOutcome> {
    if cfg.restarts == 0 {
        return Err(Error::InvalidArgument("restarts must be at least 1".into()));
    }
    let tol = Tolerance::new(a.diameter())?;
    if a.is_flat(&tol) {
        return Err(Error::Degenerate("host tetrahedron is flat".into()));
    }
    let system = System::new(a, cfg.constraints)?;
    let attempts: Vec<(RestartDiagnostic, Option<DVector<f64>>)> = (0..cfg.restarts)
        .into_par_iter()
        .map(|k| {
            let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
            rng.set_stream(k as u64);
            let x0 = DVector::from_fn(12, |_, _| rng.random_range(-1.0..1.0));
            let (x, iterations, max_residual) =
                least_squares(&system, x0, cfg.max_iterations, cfg.damping_init);
            let status = if !(max_residual <= cfg.accept_residual) {
                RestartStatus::Stalled
            } else if System::max_coord(&x) > cfg.max_coordinate {
                RestartStatus::Escaped
            } else if System::min_edge(&x) < cfg.min_edge {
                RestartStatus::Degenerate
            } else {
                RestartStatus::Converged
            };
            let diag = RestartDiagnostic {
                restart: k,
                iterations,
                max_residual,
                status,
            };
            (diag, (status == RestartStatus::Converged).then_some(x))
        })
        .collect();

    let mut solutions: Vec<Tetrahedron> = Vec::new();
    let mut diagnostics = Vec::with_capacity(attempts.len());
    for (mut diag, x) in attempts {
        if let Some(x) = x {
            let b = system.decode(&x)?;
            let duplicate = solutions
                .iter()
                .any(|s| s.max_vertex_distance(&b) < cfg.distinct * system.scale());
            if duplicate {
                diag.status = RestartStatus::Duplicate;
            } else {
                solutions.push(b);
            }
        }
        diagnostics.push(diag);
    }
    Ok(SolveOutcome {
        solutions,
        diagnostics,
    })
}

/// Singular values of the full residual Jacobian at `b`, descending.
pub fn jacobian_singular_values(a: &Tetrahedron, b: &Tetrahedron, constraints: ConstraintSet) -> Result<Vec<f64>> {
    let system = System::new(a, constraints)?;
    let (_, jac) = system.evaluate(&system.encode(b));
    let mut sv: Vec<f64> = jac.singular_values().iter().copied().collect();
    sv.sort_by(|x, y| y.total_cmp(x));
    Ok(sv)
}

/// Singular values at most this fraction of the largest count toward the
/// numerical nullity.
pub const NULLITY_RATIO: f64 = 1e-8;

pub fn numerical_nullity(singular_values: &[f64]) -> usize {
    let smax = singular_values.iter().copied().fold(0.0, f64::max);
    singular_values
        .iter()
        .filter(|&&s| s <= NULLITY_RATIO * smax)
        .count()
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", tag = "reason")]
pub enum StopReason {
    BranchPoint { sample: usize },
    CorrectorFailed { sample: usize },
    Degenerate { sample: usize },
}

#[derive(Debug, Clone, PartialEq)]
pub struct SolutionBranch {
    pub samples: Vec<Tetrahedron>,
    pub step: f64,
    pub max_residuals: Vec<f64>,
    pub nullities: Vec<usize>,
    /// `sigma_12 / sigma_11` of the residual Jacobian per sample.
    pub null_ratios: Vec<f64>,
    pub stop: Option<StopReason>,
}

fn tangent(jac: &DMatrix<f64>) -> (DVector<f64>, Vec<f64>) {
    let svd = jac.clone().svd(false, true);
    let vt = svd.v_t.expect("requested V^T");
    let sv = svd.singular_values;
    let k = sv.imin();
    let t: DVector<f64> = vt.row(k).transpose();
    let mut sorted: Vec<f64> = sv.iter().copied().collect();
    sorted.sort_by(|x, y| y.total_cmp(x));
    (t, sorted)
}

fn canonical_sign(t: DVector<f64>) -> DVector<f64> {
    let lead = t.iter().find(|v| v.abs() > 1e-3).copied().unwrap_or(1.0);
    if lead < 0.0 { -t } else { t }
}

/// Pseudo-arclength corrector: Newton on the residuals augmented with the
/// hyperplane through the predictor orthogonal to the tangent.
fn correct(
    system: &System,
    pred: &DVector<f64>,
    tangent: &DVector<f64>,
) -> Option<(DVector<f64>, f64)> {
    let mut x = pred.clone();
    for _ in 0..12 {
        let (r, jac) = system.evaluate(&x);
        let rows = r.len();
        let mut f = DVector::zeros(rows + 1);
        f.rows_mut(0, rows).copy_from(&r);
        f[rows] = tangent.dot(&(&x - pred));
        let mut j = DMatrix::zeros(rows + 1, 12);
        j.view_mut((0, 0), (rows, 12)).copy_from(&jac);
        j.row_mut(rows).copy_from(&tangent.transpose());
        if r.amax() < 1e-14 && f[rows].abs() < 1e-14 {
            return Some((x, r.amax()));
        }
        let svd = j.svd(true, true);
        let step = svd.solve(&f, 1e-13 * svd.singular_values.max()).ok()?;
        x -= &step;
        if !x.iter().all(|v| v.is_finite()) {
            return None;
        }
        if step.norm() < 1e-15 {
            break;
        }
    }
    let res = system.residuals(&x).amax();
    (res < 1e-12).then_some((x, res))
}

/// Walks `steps` samples along the solution curve through `b0` with step
/// length `h` (scene units). A negative `h` walks the opposite direction.
pub fn trace_family(a: &Tetrahedron, b0: &Tetrahedron, steps: usize, h: f64) -> Result<SolutionBranch> {
    trace_family_with(a, b0, steps, h, &SolverConfig::default())
}

pub fn trace_family_with(
    a: &Tetrahedron,
    b0: &Tetrahedron,
    steps: usize,
    h: f64,
    cfg: &SolverConfig,
) -> Result<SolutionBranch> {
    if !(h != 0.0 && h.is_finite()) {
        return Err(Error::InvalidArgument("step must be finite and non-zero".into()));
    }
    let system = System::new(a, cfg.constraints)?;
    let x0 = system.encode(b0);
    let res0 = system.residuals(&x0).amax();
    if res0 > 1e-9 {
        return Err(Error::InvalidArgument(format!(
            "start is not a solution (max residual {res0:.3e})"
        )));
    }
    let hn = h / system.scale();
    let (t0, sv0) = tangent(&system.evaluate(&x0).1);
    let mut tan = canonical_sign(t0) * hn.signum();
    let mut branch = SolutionBranch {
        samples: vec![*b0],
        step: h.abs(),
        max_residuals: vec![res0],
        nullities: vec![numerical_nullity(&sv0)],
        null_ratios: vec![sv0[11] / sv0[10]],
        stop: None,
    };
    if branch.nullities[0] >= 2 {
        branch.stop = Some(StopReason::BranchPoint { sample: 0 });
        return Ok(branch);
    }
    let mut x = x0;
    for n in 1..=steps {
        let mut len = hn.abs();
        let mut next = None;
        for _ in 0..7 {
            let pred = &x + &tan * len;
            if let Some(found) = correct(&system, &pred, &tan) {
                next = Some(found);
                break;
            }
            len /= 2.0;
        }
        let Some((xn, res)) = next else {
            branch.stop = Some(StopReason::CorrectorFailed { sample: n });
            break;
        };
        if System::min_edge(&xn) < cfg.min_edge || System::max_coord(&xn) > cfg.max_coordinate {
            branch.stop = Some(StopReason::Degenerate { sample: n });
            break;
        }
        let (tn, sv) = tangent(&system.evaluate(&xn).1);
        tan = if tn.dot(&tan) < 0.0 { -tn } else { tn };
        let nullity = numerical_nullity(&sv);
        branch.samples.push(system.decode(&xn)?);
        branch.max_residuals.push(res);
        branch.nullities.push(nullity);
        branch.null_ratios.push(sv[11] / sv[10]);
        x = xn;
        if nullity >= 2 {
            branch.stop = Some(StopReason::BranchPoint { sample: n });
            break;
        }
    }
    Ok(branch)
}

/// Default bound on `|chain_sphere_residual|` for a point to count as lying
/// on the self-conjugate curve.
pub const CURVE_POINT_TOLERANCE: f64 = 1e-6;

/// Orthosecting partner whose vertex `B4` projects to `b4` on the face
/// `A1 A2 A3`, for a point `b4` of the self-conjugate curve.
pub fn solve_from_curve_point(
    a: &Tetrahedron,
    b4: &Point,
    root_index: usize,
    max_curve_residual: f64,
    tol: &Tolerance,
) -> Result<Tetrahedron> {
    let samples = chain_sphere_samples(a, b4, tol)?;
    if samples.is_empty() {
        return Err(Error::NoRealParameter);
    }
    let sample = samples.get(root_index).ok_or(Error::RootIndex {
        index: root_index,
        available: samples.len(),
    })?;
    if !(sample.residual.abs() <= max_curve_residual) {
        return Err(Error::OffCurve {
            residual: sample.residual,
        });
    }
    let chain = complete_chain(a, b4, sample.t, tol)?;
    let relaxed = tol.rescaled(tol.scene_scale)?;
    let relaxed = Tolerance {
        eps_rel: relaxed.eps_rel.max(max_curve_residual),
        ..relaxed
    };
    let sc = SphericalChain::new(chain, &relaxed)?;
    let flat = match sc.carrier {
        crate::geom::SphereOrPlane::Plane(p) => Some(p),
        _ => None,
    };
    reconstruct_from_chain(&sc.chain, flat.as_ref(), &relaxed)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn host() -> Tetrahedron {
        Tetrahedron::from_coords([[0., 0., 0.], [3., 0.2, 0.1], [0.7, 2.5, -0.3], [0.9, 0.8, 2.2]])
            .unwrap()
    }

    #[test]
    fn regular_self_pair_is_skew() {
        let t = Tetrahedron::from_coords([[1., 1., 1.], [1., -1., -1.], [-1., 1., -1.], [-1., -1., 1.]])
            .unwrap();
        let r = orthosect_residuals(&t, &t, t.diameter()).unwrap();
        assert!(r.max_orthogonality() == 0.0);
        assert!(r.intersection.iter().any(|v| v.abs() > 0.1));
    }

    #[test]
    fn analytic_jacobian_matches_central_differences() {
        let a = host();
        for constraints in [
            ConstraintSet::default(),
            ConstraintSet { drop_intersection: Some(2), flat: true },
        ] {
            let system = System::new(&a, constraints).unwrap();
            let x = DVector::from_fn(12, |i, _| ((i * 7 + 3) % 11) as f64 / 11.0 - 0.4);
            let (_, jac) = system.evaluate(&x);
            let h = 1e-6;
            for c in 0..12 {
                let mut xp = x.clone();
                let mut xm = x.clone();
                xp[c] += h;
                xm[c] -= h;
                let fd = (system.residuals(&xp) - system.residuals(&xm)) / (2.0 * h);
                for r in 0..fd.len() {
                    let an = jac[(r, c)];
                    assert!(
                        (an - fd[r]).abs() <= 1e-6 * an.abs().max(1.0),
                        "row {r} col {c}: {an} vs {}",
                        fd[r]
                    );
                }
            }
        }
    }

    #[test]
    fn solve_is_deterministic_and_accurate() {
        let a = host();
        let cfg = SolverConfig::new(7, 16);
        let first = solve(&a, &cfg).unwrap();
        let second = solve(&a, &cfg).unwrap();
        assert_eq!(first, second);
        assert!(!first.solutions.is_empty(), "{:?}", first.diagnostics);
        for b in &first.solutions {
            let r = orthosect_residuals(&a, b, a.diameter()).unwrap();
            assert!(r.max_abs() <= 1e-10);
        }
    }

    #[test]
    fn nullity_counts_trailing_gap() {
        assert_eq!(numerical_nullity(&[3.0, 2.0, 1.0, 1e-15]), 1);
        assert_eq!(numerical_nullity(&[3.0, 2.0, 1e-12, 1e-15]), 2);
        assert_eq!(numerical_nullity(&[3.0, 2.0, 1.0, 0.5]), 0);
    }
}
