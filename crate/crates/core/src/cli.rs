//! Command-line front end. Each subcommand loads a scene, runs the
//! corresponding library operations and produces a [`Report`].
//!
//! Exit codes: 0 when every verdict passes, 1 when some verdict fails, 2 when
//! the input is rejected.

use std::path::{Path, PathBuf};
use std::str::FromStr;
use std::time::Instant;

use clap::{Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

use crate::analysis::{
    conjugate, estimate_degree, iterate_sequence, trace_curve, verify_sphere, verify_sphere_with,
};
use crate::export::{obj, svg, FaceFigure, ObjScene};
use crate::geom::{carrier_through, closest_points, diameter, Point, Tolerance};
use crate::orthology::{
    edge_label, edge_orthogonality_residuals, orthology_centers, Tetrahedron, PAIRINGS,
};
use crate::report::{self, Report, Verdict};
use crate::scene::{load_scene, save_scene, Scene, SceneError};
use crate::solver::{orthosect_residuals, solve, trace_family, ConstraintSet, RestartStatus, SolverConfig};

pub const EPS_ENV: &str = "ORTHOLOG_EPS";

/// Bound on the orthosect residual of a solver output.
pub const SOLUTION_RESIDUAL: f64 = 1e-10;
/// Bound on continuation samples.
pub const TRACE_RESIDUAL: f64 = 1e-9;
/// Two carriers count as the same within this (relative) distance.
pub const CARRIER_MATCH: f64 = 1e-8;
/// Applying the conjugation twice returns within this (relative) distance.
pub const INVOLUTION: f64 = 1e-7;
/// Loose gate for the conjugate sequence hypotheses.
pub const SEQUENCE_CARRIER: f64 = 1e-6;

#[derive(Debug, Parser)]
#[command(name = "ortholog", version, about = "Orthosecting tetrahedra: solve, verify, trace and export")]
pub struct Cli {
    /// Scene file (JSON).
    #[arg(long, global = true)]
    pub scene: Option<PathBuf>,
    /// Write the report here instead of stdout (for `export`, the figure).
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    /// Record wall time in the report (makes reports run-dependent).
    #[arg(long, global = true)]
    pub timing: bool,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Pair(pub String, pub String);

impl FromStr for Pair {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        match s.split_once(',') {
            Some((a, b)) if !a.is_empty() && !b.is_empty() && !b.contains(',') => Ok(Pair(a.into(), b.into())),
            _ => Err(format!("expected NAME,NAME (got {s:?})")),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct FaceRef(pub String, pub usize);

impl FromStr for FaceRef {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        let (name, idx) = s
            .rsplit_once(':')
            .ok_or_else(|| format!("expected TET:IDX (got {s:?})"))?;
        let idx: usize = idx.parse().map_err(|_| format!("bad face index {idx:?}"))?;
        if !(1..=4).contains(&idx) || name.is_empty() {
            return Err(format!("expected TET:IDX with IDX in 1..=4 (got {s:?})"));
        }
        Ok(FaceRef(name.into(), idx))
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Window(pub [f64; 4]);

impl FromStr for Window {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        let v: Vec<f64> = s
            .split(',')
            .map(|x| x.trim().parse::<f64>().map_err(|_| format!("bad number {x:?}")))
            .collect::<Result<_, _>>()?;
        if v.len() != 4 || v.iter().any(|x| !x.is_finite()) {
            return Err("expected x0,y0,x1,y1".into());
        }
        Ok(Window([v[0], v[1], v[2], v[3]]))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Svg,
    Obj,
    Json,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Check orthology, intersections and the sphere of intersection points.
    Verify {
        #[arg(long)]
        pair: Pair,
        /// Leave out the worst intersection and check the other five.
        #[arg(long)]
        corollary4: bool,
    },
    /// Find orthosecting partners of a tetrahedron from random starts.
    Solve {
        #[arg(long)]
        tet: String,
        #[arg(long)]
        seed: u64,
        #[arg(long, default_value_t = 64)]
        restarts: usize,
        /// Host edge (e.g. 14) whose intersection condition is dropped.
        #[arg(long)]
        drop_intersection: Option<String>,
        /// Require a flat partner.
        #[arg(long)]
        flat: bool,
        /// Write the scene with the solutions added.
        #[arg(long)]
        save_scene: Option<PathBuf>,
    },
    /// Continue along the solution family from a known partner.
    TraceFamily {
        #[arg(long)]
        tet: String,
        #[arg(long)]
        start: String,
        #[arg(long, default_value_t = 50)]
        steps: usize,
        /// Step length in scene units.
        #[arg(long)]
        step: f64,
        /// Walk in the opposite direction.
        #[arg(long)]
        reverse: bool,
    },
    /// Construct the conjugate partner.
    Conjugate {
        #[arg(long)]
        pair: Pair,
        /// Name for the result when saving.
        #[arg(long)]
        name: Option<String>,
        #[arg(long)]
        save_scene: Option<PathBuf>,
    },
    /// Trace the self-conjugate curve on a face plane.
    Curve {
        #[arg(long)]
        tet: String,
        #[arg(long, value_parser = clap::value_parser!(u8).range(1..=4))]
        face: u8,
        #[arg(long, default_value_t = 128)]
        grid: usize,
        #[arg(long)]
        window: Option<Window>,
        /// Also render the trace as SVG.
        #[arg(long)]
        svg: Option<PathBuf>,
        /// Random lines for the degree estimate (requires --seed).
        #[arg(long)]
        degree_trials: Option<usize>,
        #[arg(long)]
        seed: Option<u64>,
    },
    /// Iterate conjugation along a sequence of tetrahedra.
    Sequence {
        #[arg(long)]
        pair: Pair,
        #[arg(long)]
        n: usize,
    },
    /// Write a figure or a JSON dump of the scene.
    Export {
        #[arg(long, value_enum)]
        format: Format,
        /// Face for SVG output.
        #[arg(long)]
        face: Option<FaceRef>,
        /// Pair whose chain, intersection points and carrier are drawn.
        #[arg(long)]
        pair: Option<Pair>,
        /// Overlay the self-conjugate curve traced at this grid (SVG).
        #[arg(long)]
        curve_grid: Option<usize>,
        #[arg(long, default_value_t = 24)]
        sphere_resolution: usize,
        #[arg(long, default_value_t = 800.0)]
        width: f64,
    },
}

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error(transparent)]
    Scene(#[from] SceneError),
    #[error(transparent)]
    Core(#[from] crate::Error),
    #[error("{0}")]
    Input(String),
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        2
    }
}

type CliResult<T> = Result<T, CliError>;

fn input(msg: impl Into<String>) -> CliError {
    CliError::Input(msg.into())
}

/// `eps_rel` override from the environment, if set.
pub fn eps_override() -> CliResult<Option<f64>> {
    match std::env::var(EPS_ENV) {
        Ok(v) => {
            let x: f64 = v
                .trim()
                .parse()
                .map_err(|_| input(format!("{EPS_ENV}={v:?} is not a number")))?;
            if !(x.is_finite() && x > 0.0) {
                return Err(input(format!("{EPS_ENV} must be finite and positive")));
            }
            Ok(Some(x))
        }
        Err(_) => Ok(None),
    }
}

struct Ctx {
    scene: Scene,
    scene_path: PathBuf,
    eps: Option<f64>,
}

impl Ctx {
    fn tol(&self, tets: &[&Tetrahedron]) -> CliResult<Tolerance> {
        let pts: Vec<Point> = tets.iter().flat_map(|t| t.vertices().to_vec()).collect();
        Ok(self.scene.tolerance(diameter(&pts), self.eps)?)
    }

    fn tet(&self, name: &str) -> CliResult<Tetrahedron> {
        Ok(self.scene.tetrahedron(name)?)
    }
}

/// What a command produced: the report and where it should go.
pub struct Outcome {
    pub report: Report,
    /// Report destination; `None` means stdout.
    pub report_path: Option<PathBuf>,
}

pub fn run(cli: &Cli, args: Vec<String>) -> CliResult<Outcome> {
    let started = Instant::now();
    let scene_path = cli
        .scene
        .clone()
        .ok_or_else(|| input("--scene is required"))?;
    let ctx = Ctx {
        scene: load_scene(&scene_path)?,
        scene_path,
        eps: eps_override()?,
    };
    let name = match &cli.command {
        Command::Verify { .. } => "verify",
        Command::Solve { .. } => "solve",
        Command::TraceFamily { .. } => "trace-family",
        Command::Conjugate { .. } => "conjugate",
        Command::Curve { .. } => "curve",
        Command::Sequence { .. } => "sequence",
        Command::Export { .. } => "export",
    };
    let mut report = Report::new(name, args);
    let mut report_path = cli.out.clone();
    match &cli.command {
        Command::Verify { pair, corollary4 } => cmd_verify(&ctx, pair, *corollary4, &mut report)?,
        Command::Solve {
            tet,
            seed,
            restarts,
            drop_intersection,
            flat,
            save_scene: save,
        } => cmd_solve(&ctx, tet, *seed, *restarts, drop_intersection.as_deref(), *flat, save.as_deref(), &mut report)?,
        Command::TraceFamily {
            tet,
            start,
            steps,
            step,
            reverse,
        } => cmd_trace_family(&ctx, tet, start, *steps, *step, *reverse, &mut report)?,
        Command::Conjugate {
            pair,
            name,
            save_scene: save,
        } => cmd_conjugate(&ctx, pair, name.as_deref(), save.as_deref(), &mut report)?,
        Command::Curve {
            tet,
            face,
            grid,
            window,
            svg: svg_path,
            degree_trials,
            seed,
        } => cmd_curve(
            &ctx,
            tet,
            usize::from(*face) - 1,
            *grid,
            window.map(|w| w.0),
            svg_path.as_deref(),
            *degree_trials,
            *seed,
            &mut report,
        )?,
        Command::Sequence { pair, n } => cmd_sequence(&ctx, pair, *n, &mut report)?,
        Command::Export {
            format,
            face,
            pair,
            curve_grid,
            sphere_resolution,
            width,
        } => {
            let out = cli
                .out
                .as_deref()
                .ok_or_else(|| input("export requires --out"))?;
            cmd_export(&ctx, *format, face.as_ref(), pair.as_ref(), *curve_grid, *sphere_resolution, *width, out, &mut report)?;
            // The figure goes to --out; the report goes to stdout.
            report_path = None;
        }
    }
    if cli.timing {
        report.wall_time_seconds = Some(started.elapsed().as_secs_f64());
    }
    Ok(Outcome { report, report_path })
}

fn write_file(path: &Path, text: &str) -> CliResult<()> {
    std::fs::write(path, text).map_err(|e| input(format!("{}: {e}", path.display())))
}

fn max_of(v: &[f64]) -> f64 {
    v.iter().fold(0.0_f64, |m, x| m.max(x.abs()))
}

fn pairing_by_label(label: &str) -> CliResult<usize> {
    PAIRINGS
        .iter()
        .position(|p| edge_label(p.a_edge) == label)
        .ok_or_else(|| input(format!("unknown edge {label:?} (expected one of 12, 13, 14, 23, 24, 34)")))
}

fn cmd_verify(ctx: &Ctx, pair: &Pair, corollary4: bool, report: &mut Report) -> CliResult<()> {
    let a = ctx.tet(&pair.0)?;
    let b = ctx.tet(&pair.1)?;
    let tol = ctx.tol(&[&a, &b])?;
    let ortho = edge_orthogonality_residuals(&a, &b, &tol)?;
    let rv = orthosect_residuals(&a, &b, tol.scene_scale)?;
    let mut gaps = [0.0; 6];
    for (g, p) in gaps.iter_mut().zip(PAIRINGS) {
        let la = a.edge_line(p.a_edge.0, p.a_edge.1)?;
        let lb = b.edge_line(p.b_edge.0, p.b_edge.1)?;
        *g = closest_points(&la, &lb).gap / tol.scene_scale;
    }
    let skip = corollary4.then(|| {
        (0..6)
            .max_by(|&i, &j| gaps[i].total_cmp(&gaps[j]))
            .expect("six pairings")
    });
    let kept: Vec<f64> = (0..6).filter(|&n| Some(n) != skip).map(|n| gaps[n]).collect();
    let kept_ix: Vec<f64> = (0..6)
        .filter(|&n| Some(n) != skip)
        .map(|n| rv.intersection[n])
        .collect();
    let orthologic = max_of(&ortho) <= tol.eps_rel;
    let intersecting = max_of(&kept) <= tol.eps_rel && max_of(&kept_ix) <= tol.eps_rel;
    let orthosecting = orthologic && intersecting;

    report.verdicts.push(Verdict::at_most("orthogonality", max_of(&ortho), tol.eps_rel));
    report.verdicts.push(Verdict::at_most("intersection_gap", max_of(&kept), tol.eps_rel));
    let centers = if orthologic {
        orthology_centers(&a, &b, &tol).ok().map(|r| {
            json!({
                "center_a": report::point(&r.center_a),
                "center_b": report::point(&r.center_b),
                "spread_a": r.spread_a,
                "spread_b": r.spread_b,
            })
        })
    } else {
        None
    };
    let mut sphere = Value::Null;
    if orthosecting {
        let s = verify_sphere_with(&a, &b, skip, &tol)?;
        report.verdicts.push(Verdict::at_most("sphere_residual", s.max_residual, tol.eps_rel));
        if let Some(g) = s.midpoint_gap {
            report.verdicts.push(Verdict::at_most("midpoint_gap", g, tol.eps_rel));
        }
        sphere = report::sphere(&s);
    }
    let yn = |b: bool| if b { "yes" } else { "no" };
    report.summary = if corollary4 {
        format!(
            "orthologic: {}, orthosecting (five of six): {}",
            yn(orthologic),
            yn(orthosecting)
        )
    } else {
        format!("orthologic: {}, orthosecting: {}", yn(orthologic), yn(orthosecting))
    };
    report.results = json!({
        "pair": [pair.0, pair.1],
        "scene_scale": tol.scene_scale,
        "eps_rel": tol.eps_rel,
        "orthogonality_residuals": ortho,
        "skew_gaps": gaps,
        "skipped_edge": skip.map(|n| edge_label(PAIRINGS[n].a_edge)),
        "orthosect_residuals": report::residuals(&rv),
        "orthologic": orthologic,
        "orthosecting": orthosecting,
        "orthology_centers": centers,
        "sphere": sphere,
    });
    Ok(())
}

#[allow(clippy::too_many_arguments)]
fn cmd_solve(
    ctx: &Ctx,
    tet: &str,
    seed: u64,
    restarts: usize,
    drop: Option<&str>,
    flat: bool,
    save: Option<&Path>,
    report: &mut Report,
) -> CliResult<()> {
    let a = ctx.tet(tet)?;
    let mut cfg = SolverConfig::new(seed, restarts);
    cfg.constraints = ConstraintSet {
        drop_intersection: drop.map(pairing_by_label).transpose()?,
        flat,
    };
    let outcome = solve(&a, &cfg)?;
    let mut solutions = Vec::new();
    let mut scene = ctx.scene.clone();
    for (k, b) in outcome.solutions.iter().enumerate() {
        let tol = ctx.tol(&[&a, b])?;
        let rv = orthosect_residuals(&a, b, tol.scene_scale)?;
        let kept = {
            let mut all = rv.to_array().to_vec();
            if let Some(s) = cfg.constraints.drop_intersection {
                all.remove(6 + s);
            }
            max_of(&all)
        };
        report
            .verdicts
            .push(Verdict::at_most(&format!("solution_{}_residual", k + 1), kept, SOLUTION_RESIDUAL));
        let sphere = verify_sphere_with(&a, b, cfg.constraints.drop_intersection, &tol);
        let sphere_json = match &sphere {
            Ok(s) => {
                report
                    .verdicts
                    .push(Verdict::at_most(&format!("solution_{}_sphere", k + 1), s.max_residual, tol.eps_rel));
                report::sphere(s)
            }
            Err(e) => json!({ "error": e.to_string() }),
        };
        let name = format!("{tet}_sol{}", k + 1);
        scene.insert(&name, b);
        solutions.push(json!({
            "name": name,
            "vertices": report::tetrahedron(b),
            "residuals": report::residuals(&rv),
            "signed_volume": b.signed_volume(),
            "sphere": sphere_json,
        }));
    }
    report
        .verdicts
        .insert(0, Verdict::at_least("solutions_found", outcome.solutions.len() as f64, 1.0));
    let count = |s: RestartStatus| outcome.diagnostics.iter().filter(|d| d.status == s).count();
    report.summary = format!(
        "{} distinct solution(s) from {} restarts",
        outcome.solutions.len(),
        restarts
    );
    report.results = json!({
        "tet": tet,
        "config": cfg,
        "solutions": solutions,
        "restart_summary": {
            "converged": count(RestartStatus::Converged),
            "duplicate": count(RestartStatus::Duplicate),
            "stalled": count(RestartStatus::Stalled),
            "degenerate": count(RestartStatus::Degenerate),
            "escaped": count(RestartStatus::Escaped),
        },
        "diagnostics": outcome.diagnostics,
    });
    if let Some(path) = save {
        save_scene(&scene, path)?;
    }
    Ok(())
}

#[allow(clippy::too_many_arguments)]
fn cmd_trace_family(
    ctx: &Ctx,
    tet: &str,
    start: &str,
    steps: usize,
    step: f64,
    reverse: bool,
    report: &mut Report,
) -> CliResult<()> {
    let a = ctx.tet(tet)?;
    let b0 = ctx.tet(start)?;
    if !(step > 0.0 && step.is_finite()) {
        return Err(input("--step must be positive; use --reverse for the other direction"));
    }
    let h = if reverse { -step } else { step };
    let branch = trace_family(&a, &b0, steps, h)?;
    let max_res = max_of(&branch.max_residuals);
    let nullity_dev = branch
        .nullities
        .iter()
        .map(|&n| (n as f64 - 1.0).abs())
        .fold(0.0, f64::max);
    report.verdicts.push(Verdict::at_most("max_residual", max_res, TRACE_RESIDUAL));
    report.verdicts.push(Verdict::at_most("nullity_deviation", nullity_dev, 0.0));
    report.summary = format!(
        "{} sample(s){}",
        branch.samples.len(),
        match branch.stop {
            Some(s) => format!(", stopped: {s:?}"),
            None => String::new(),
        }
    );
    report.results = json!({
        "tet": tet,
        "start": start,
        "step": h,
        "samples": branch.samples.iter().map(report::tetrahedron).collect::<Vec<_>>(),
        "max_residuals": branch.max_residuals,
        "nullities": branch.nullities,
        "null_ratios": branch.null_ratios,
        "stop": branch.stop,
    });
    Ok(())
}

fn cmd_conjugate(ctx: &Ctx, pair: &Pair, name: Option<&str>, save: Option<&Path>, report: &mut Report) -> CliResult<()> {
    let a = ctx.tet(&pair.0)?;
    let b = ctx.tet(&pair.1)?;
    let tol = ctx.tol(&[&a, &b])?;
    let c = conjugate(&a, &b, &tol)?;
    let back = conjugate(&a, &c, &tol)?;
    let s_ab = verify_sphere(&a, &b, &tol)?;
    let s_ac = verify_sphere(&a, &c, &tol)?;
    let rv = orthosect_residuals(&a, &c, tol.scene_scale)?;
    let involution = back.max_vertex_distance(&b) / tol.scene_scale;
    let mismatch = s_ab.carrier.mismatch(&s_ac.carrier) / tol.scene_scale;
    let off_carrier = s_ac
        .points
        .iter()
        .map(|p| s_ab.carrier.distance(p))
        .fold(0.0, f64::max)
        / tol.scene_scale;
    report.verdicts.push(Verdict::at_most("conjugate_residual", rv.max_abs(), tol.eps_rel));
    report.verdicts.push(Verdict::at_most("shared_carrier", off_carrier, CARRIER_MATCH));
    report.verdicts.push(Verdict::at_most("involution_error", involution, INVOLUTION));
    let name = name.map(str::to_string).unwrap_or_else(|| format!("{}_conj", pair.1));
    report.summary = format!("conjugate of {} with respect to {} stored as {}", pair.1, pair.0, name);
    report.results = json!({
        "pair": [pair.0, pair.1],
        "name": name,
        "conjugate": report::tetrahedron(&c),
        "residuals": report::residuals(&rv),
        "sphere_original": report::sphere(&s_ab),
        "sphere_conjugate": report::sphere(&s_ac),
        "carrier_mismatch": mismatch,
    });
    if let Some(path) = save {
        let mut scene = ctx.scene.clone();
        scene.insert(&name, &c);
        save_scene(&scene, path)?;
    }
    Ok(())
}

#[allow(clippy::too_many_arguments)]
fn cmd_curve(
    ctx: &Ctx,
    tet: &str,
    face: usize,
    grid: usize,
    window: Option<[f64; 4]>,
    svg_path: Option<&Path>,
    degree_trials: Option<usize>,
    seed: Option<u64>,
    report: &mut Report,
) -> CliResult<()> {
    let a = ctx.tet(tet)?;
    if degree_trials.is_some() && seed.is_none() {
        return Err(input("--degree-trials requires --seed"));
    }
    let tol = ctx.tol(&[&a])?;
    let trace = trace_curve(&a, face, window, grid, &tol)?;
    report
        .verdicts
        .push(Verdict::at_most("max_vertex_residual", trace.max_residual, trace.residual_bound));
    let degree = degree_trials.map(|n| {
        let d = estimate_degree(&trace, n, seed.expect("checked above"));
        json!({
            "trials": d.trials,
            "histogram": d.histogram.iter().map(|(k, v)| json!([k, v])).collect::<Vec<_>>(),
            "max_count": d.max_count,
            "near_tangent": d.near_tangent,
            "nine_observed": d.nine_observed,
            "nine_exceeded": d.nine_exceeded,
        })
    });
    report.summary = format!(
        "{} polyline(s), {} vertices on face {} of {}",
        trace.polylines.len(),
        trace.vertex_count(),
        face + 1,
        tet
    );
    report.results = json!({
        "tet": tet,
        "trace": report::curve(&trace),
        "degree_estimate": degree,
    });
    if let Some(path) = svg_path {
        let (mut fig, _) = FaceFigure::for_face(&trace.host.face(3))?;
        fig.add_trace(&trace);
        write_file(path, &svg(&fig, 800.0))?;
    }
    Ok(())
}

fn cmd_sequence(ctx: &Ctx, pair: &Pair, n: usize, report: &mut Report) -> CliResult<()> {
    let b0 = ctx.tet(&pair.0)?;
    let b1 = ctx.tet(&pair.1)?;
    let tol = ctx.tol(&[&b0, &b1])?;
    let run = iterate_sequence(&b0, &b1, n, &tol)?;
    report
        .verdicts
        .push(Verdict::at_least("terms", run.tetrahedra.len() as f64, (n + 1) as f64));
    report
        .verdicts
        .push(Verdict::at_most("shared_carrier", run.max_carrier_residual, SEQUENCE_CARRIER));
    report.verdicts.push(Verdict::at_most(
        "distinct_centers_minus_two",
        (run.distinct_centers.len() as f64 - 2.0).abs(),
        0.0,
    ));
    report.summary = format!(
        "{} term(s), {} distinct orthology center(s)",
        run.tetrahedra.len(),
        run.distinct_centers.len()
    );
    report.results = json!({
        "pair": [pair.0, pair.1],
        "tetrahedra": run.tetrahedra.iter().map(report::tetrahedron).collect::<Vec<_>>(),
        "carrier": report::carrier(&run.carrier),
        "max_carrier_residual": run.max_carrier_residual,
        "pair_spheres": run.spheres.iter().map(report::sphere).collect::<Vec<_>>(),
        "centers": run.centers.iter().map(report::point).collect::<Vec<_>>(),
        "distinct_centers": run.distinct_centers.iter().map(report::point).collect::<Vec<_>>(),
        "cluster_radius": run.cluster_radius,
        "truncated": run.truncated.map(|(k, why)| json!({"term": k, "reason": why})),
    });
    Ok(())
}

#[allow(clippy::too_many_arguments)]
fn cmd_export(
    ctx: &Ctx,
    format: Format,
    face: Option<&FaceRef>,
    pair: Option<&Pair>,
    curve_grid: Option<usize>,
    sphere_resolution: usize,
    width: f64,
    out: &Path,
    report: &mut Report,
) -> CliResult<()> {
    let pair_tets = pair
        .map(|p| -> CliResult<_> { Ok((ctx.tet(&p.0)?, ctx.tet(&p.1)?)) })
        .transpose()?;
    let text = match format {
        Format::Svg => {
            let face = face.ok_or_else(|| {
                input("SVG export draws a face plane; declare one with --face TET:IDX")
            })?;
            let host = ctx.tet(&face.0)?;
            let idx = face.1 - 1;
            let tri = host.face(idx);
            let (mut fig, frame) = FaceFigure::for_face(&tri)?;
            if let (Some(p), Some((a, b))) = (pair, &pair_tets) {
                if p.0 != face.0 {
                    return Err(input("--pair must start with the tetrahedron named in --face"));
                }
                let tol = ctx.tol(&[a, b])?;
                fig.add_pedal(&frame, &tri, &b.vertex(idx), &tol)?;
            }
            if let Some(grid) = curve_grid {
                let tol = ctx.tol(&[&host])?;
                let trace = trace_curve(&host, idx, None, grid, &tol)?;
                fig.add_trace(&trace);
            }
            svg(&fig, width)
        }
        Format::Obj => {
            let mut scene = ObjScene {
                tetrahedra: Vec::new(),
                points: Vec::new(),
                carrier: None,
                sphere_resolution,
            };
            for name in ctx.scene.tetrahedra.keys() {
                scene.tetrahedra.push((name.clone(), ctx.tet(name)?));
            }
            if let Some((a, b)) = &pair_tets {
                let tol = ctx.tol(&[a, b])?;
                for p in PAIRINGS {
                    let la = a.edge_line(p.a_edge.0, p.a_edge.1)?;
                    let lb = b.edge_line(p.b_edge.0, p.b_edge.1)?;
                    scene
                        .points
                        .push((format!("V{}", edge_label(p.a_edge)), closest_points(&la, &lb).midpoint()));
                }
                let pts: Vec<Point> = scene.points.iter().map(|(_, p)| *p).collect();
                scene.carrier = carrier_through(&pts, &tol).ok().map(|(c, _)| c);
            }
            obj(&scene)
        }
        Format::Json => {
            let mut dump = Report::new("export", report.args.clone());
            let mut results = json!({ "scene": serde_json::to_value(&ctx.scene).expect("scene serializes") });
            if let Some((a, b)) = &pair_tets {
                let tol = ctx.tol(&[a, b])?;
                results["sphere"] = match verify_sphere(a, b, &tol) {
                    Ok(s) => {
                        dump.verdicts.push(Verdict::at_most("sphere_residual", s.max_residual, tol.eps_rel));
                        report::sphere(&s)
                    }
                    Err(e) => json!({ "error": e.to_string() }),
                };
            }
            dump.results = results;
            dump.summary = format!("scene {}", ctx.scene_path.display());
            report.verdicts = dump.verdicts.clone();
            dump.to_json()
        }
    };
    write_file(out, &text)?;
    let kind = match format {
        Format::Svg => "svg",
        Format::Obj => "obj",
        Format::Json => "json",
    };
    report.summary = format!("wrote {kind} to {}", out.display());
    report.results = json!({
        "format": format!("{format:?}").to_lowercase(),
        "out": out.display().to_string(),
        "bytes": text.len(),
    });
    Ok(())
}
