//! Batch experiment driver: parses a JSON configuration, dispatches to the
//! solver and analysis operations, and emits a content-hashed report with
//! CSV traces and image artifacts. Fixed config and seed reproduce every
//! metric and every text artifact byte for byte.

mod artifacts;
mod config;

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};
use std::time::Instant;

use serde::{Deserialize, Serialize};

pub use artifacts::{fb_csv, field_svg, sha256_hex, write_artifact, ArtifactEntry};
pub use config::{DomainConfig, ExperimentConfig, FieldSource, SolverOverrides, TaskConfig};

use crate::cross::{
    fit_phi, matching_conditions, ode_residual, synthesize_cross_field, theta_samples,
    CrossExpansion, Side,
};
use crate::error::{Error, Result};
use crate::extremal::{maximal_solution, minimal_solution, ExtremalParams, SolveReport};
use crate::fb::{
    blowup, default_singular_threshold, extract_free_boundary, monotonicity_trace, rotation_fit,
    singular_points, weiss_phi, FreeBoundary,
};
use crate::field::ScalarField;
use crate::variational::{minimize_energy_traced, DescentParams};

/// Run outcome: the echoed configuration, scalar metrics, non-numeric
/// summary entries, the artifact manifest, and any verification failures
/// (exploratory fits never append to `failures`).
#[derive(Debug, Serialize, Deserialize)]
pub struct RunReport {
    pub config: ExperimentConfig,
    pub summary: BTreeMap<String, String>,
    pub metrics: BTreeMap<String, f64>,
    pub wall_clock_seconds: f64,
    pub artifacts: Vec<ArtifactEntry>,
    pub failures: Vec<String>,
}

impl RunReport {
    pub fn is_success(&self) -> bool {
        self.failures.is_empty()
    }
}

struct RunContext {
    dir: PathBuf,
    metrics: BTreeMap<String, f64>,
    summary: BTreeMap<String, String>,
    artifacts: Vec<ArtifactEntry>,
    failures: Vec<String>,
}

impl RunContext {
    fn emit(&mut self, name: &str, bytes: &[u8]) -> Result<()> {
        self.artifacts.push(write_artifact(&self.dir, name, bytes)?);
        Ok(())
    }

    fn metric(&mut self, name: &str, value: f64) {
        self.metrics.insert(name.to_string(), value);
    }
}

/// Executes the configured task, writing all artifacts plus `report.json`
/// into `out_dir`.
pub fn run(config: &ExperimentConfig, out_dir: &Path) -> Result<RunReport> {
    config.validate()?;
    std::fs::create_dir_all(out_dir)?;
    let started = Instant::now();
    let mut ctx = RunContext {
        dir: out_dir.to_path_buf(),
        metrics: BTreeMap::new(),
        summary: BTreeMap::new(),
        artifacts: Vec::new(),
        failures: Vec::new(),
    };

    let task_outcome = match &config.task {
        TaskConfig::SolveMax { solver } => run_solve(config, solver, true, &mut ctx),
        TaskConfig::SolveMin { solver } => run_solve(config, solver, false, &mut ctx),
        TaskConfig::Minimize {
            gradient_tol,
            max_steps,
            starts,
        } => run_minimize(config, *gradient_tol, *max_steps, starts.clone(), &mut ctx),
        TaskConfig::Monotonicity {
            source,
            centers,
            radii,
        } => run_monotonicity(config, source, centers, radii, &mut ctx),
        TaskConfig::Blowup {
            source,
            center,
            radii,
            normalization,
            fit_phi_radii,
        } => run_blowup(config, source, *center, radii, *normalization, fit_phi_radii, &mut ctx),
        TaskConfig::CrossCheck { order, theta_samples } => {
            run_cross_check(*order, *theta_samples, &mut ctx)
        }
        TaskConfig::InstabilityProbe {
            source,
            center,
            r1,
            deltas,
        } => run_probe(config, source, *center, *r1, deltas, &mut ctx),
    };
    // task failures are carried into the report rather than aborting the run
    if let Err(e) = task_outcome {
        ctx.failures.push(format!("task error: {e}"));
    }

    let report = RunReport {
        config: config.clone(),
        summary: ctx.summary,
        metrics: ctx.metrics,
        wall_clock_seconds: started.elapsed().as_secs_f64(),
        artifacts: ctx.artifacts,
        failures: ctx.failures,
    };
    let json = serde_json::to_string_pretty(&report)?;
    std::fs::write(out_dir.join("report.json"), json)?;
    Ok(report)
}

/// Reads `report.json` from a run directory and re-verifies the manifest:
/// every artifact must exist with a matching hash.
pub fn verify_run_dir(dir: &Path) -> Result<RunReport> {
    let text = std::fs::read_to_string(dir.join("report.json"))?;
    let report: RunReport = serde_json::from_str(&text)?;
    for entry in &report.artifacts {
        let path = dir.join(&entry.path);
        let bytes = std::fs::read(&path)
            .map_err(|_| Error::ArtifactMismatch { path: entry.path.clone() })?;
        if sha256_hex(&bytes) != entry.sha256 {
            return Err(Error::ArtifactMismatch { path: entry.path.clone() });
        }
    }
    Ok(report)
}

fn extremal_params(h: f64, overrides: &SolverOverrides) -> ExtremalParams {
    let mut p = ExtremalParams::for_spacing(h);
    if let Some(t) = overrides.fixed_point_tol {
        p.fixed_point_tol = t;
    }
    if let Some(t) = overrides.outer_tol {
        p.outer_tol = t;
    }
    if let Some(t) = overrides.residual_tol {
        p.inner.residual_tol = t;
    }
    if let Some(m) = overrides.max_iterations {
        p.inner.max_iterations = m;
    }
    p
}

fn emit_field_artifacts(
    ctx: &mut RunContext,
    u: &ScalarField,
    fb: Option<&FreeBoundary>,
) -> Result<()> {
    let mut bin = Vec::new();
    u.write_binary(&mut bin)?;
    ctx.emit("field.uol", &bin)?;
    ctx.emit("field.pgm", &u.to_pgm())?;
    ctx.emit("field.svg", &field_svg(u, fb))?;
    if let Some(fb) = fb {
        if !fb.is_empty() {
            ctx.emit("free_boundary.csv", &fb_csv(fb))?;
        }
    }
    Ok(())
}

fn report_solve_metrics(ctx: &mut RunContext, report: &SolveReport) {
    let spec = report.u.spec();
    let center = report.u.at((spec.nx - 1) / 2, (spec.ny - 1) / 2);
    ctx.metric("u_center", center);
    ctx.metric("u_min", report.u.min());
    ctx.metric("u_max", report.u.max());
    ctx.metric("pde_residual", report.pde_residual);
    ctx.metric("monotone_violation", report.monotone_violation);
    ctx.metric(
        "iterations_total",
        report.iterations.iter().map(|s| s.iterations).sum::<usize>() as f64,
    );
    ctx.metric("stages", report.iterations.len() as f64);
}

fn run_solve(
    config: &ExperimentConfig,
    overrides: &SolverOverrides,
    maximal: bool,
    ctx: &mut RunContext,
) -> Result<()> {
    let spec = config.domain.grid()?;
    let g = config.boundary.materialize(spec)?;
    let params = extremal_params(spec.h, overrides);
    let report = if maximal {
        maximal_solution(&g, &params)?
    } else {
        minimal_solution(&g, &params)?
    };
    let fb = extract_free_boundary(&report.u);
    report_solve_metrics(ctx, &report);
    ctx.metric("free_boundary_length", fb.total_length());
    emit_field_artifacts(ctx, &report.u, Some(&fb))?;
    Ok(())
}

fn run_minimize(
    config: &ExperimentConfig,
    gradient_tol: Option<f64>,
    max_steps: Option<usize>,
    starts: Option<Vec<crate::variational::StartKind>>,
    ctx: &mut RunContext,
) -> Result<()> {
    let spec = config.domain.grid()?;
    let g = config.boundary.materialize(spec)?;
    let mut params = DescentParams {
        seed: config.seed,
        ..DescentParams::default()
    };
    if let Some(t) = gradient_tol {
        params.gradient_tol = t;
    }
    if let Some(m) = max_steps {
        params.max_steps = m;
    }
    if let Some(s) = starts {
        params.starts = s;
    }
    let outcome = minimize_energy_traced(&g, &params)?;
    report_solve_metrics(ctx, &outcome.report);
    ctx.metric("energy_total", outcome.energy.total);
    ctx.metric("energy_dirichlet", outcome.energy.dirichlet);
    ctx.metric("energy_bulk", outcome.energy.bulk);
    ctx.summary
        .insert("best_start".into(), outcome.best_start.clone());
    for run in &outcome.runs {
        ctx.metric(&format!("energy[{}]", run.name), run.energy.total);
        let rows: Vec<Vec<f64>> = run
            .trace
            .iter()
            .map(|r| vec![r.step as f64, r.energy, r.grad_norm, r.step_size])
            .collect();
        let csv = artifacts::csv_table("step,energy,grad_norm,step_size", &rows);
        ctx.emit(&format!("descent_{}.csv", run.name), &csv)?;
    }
    let fb = extract_free_boundary(&outcome.report.u);
    emit_field_artifacts(ctx, &outcome.report.u, Some(&fb))?;
    Ok(())
}

fn obtain_field(config: &ExperimentConfig, source: &FieldSource) -> Result<ScalarField> {
    let spec = config.domain.grid()?;
    match source {
        FieldSource::SolveMax => {
            let g = config.boundary.materialize(spec)?;
            Ok(maximal_solution(&g, &ExtremalParams::for_spacing(spec.h))?.u)
        }
        FieldSource::SolveMin => {
            let g = config.boundary.materialize(spec)?;
            Ok(minimal_solution(&g, &ExtremalParams::for_spacing(spec.h))?.u)
        }
        FieldSource::Minimize => {
            let g = config.boundary.materialize(spec)?;
            let params = DescentParams {
                seed: config.seed,
                ..DescentParams::default()
            };
            Ok(minimize_energy_traced(&g, &params)?.report.u)
        }
        FieldSource::SynthesizedCross { r_max, order } => {
            let e = if *order == 0 {
                CrossExpansion::canonical_order0()
            } else {
                CrossExpansion::canonical()
            };
            synthesize_cross_field(&e, spec, *r_max)
        }
    }
}

fn run_monotonicity(
    config: &ExperimentConfig,
    source: &FieldSource,
    centers: &[[f64; 2]],
    radii: &[f64],
    ctx: &mut RunContext,
) -> Result<()> {
    let u = obtain_field(config, source)?;
    let mut max_violation = 0.0f64;
    let mut max_defect = 0.0f64;
    for (k, center) in centers.iter().enumerate() {
        let trace = monotonicity_trace(&u, *center, radii)?;
        max_violation = max_violation.max(trace.monotonicity_violation());
        max_defect = max_defect.max(trace.identity_defect());
        let mut rows = Vec::new();
        for (i, r) in trace.radii.iter().enumerate() {
            let drift = if i == 0 { 0.0 } else { trace.drift[i - 1] };
            rows.push(vec![*r, trace.phi[i], drift]);
        }
        let csv = artifacts::csv_table("r,phi,drift_from_prev", &rows);
        ctx.emit(&format!("monotonicity_{k}.csv"), &csv)?;
    }
    ctx.metric("max_monotonicity_violation", max_violation);
    ctx.metric("max_identity_defect", max_defect);
    // verification task: the scaled-energy trace of a solution must be
    // non-decreasing with increments matching the shell drift
    let tol = 1e-2;
    if max_violation > tol {
        ctx.failures.push(format!(
            "monotonicity violated: max decrease {max_violation:.3e} > {tol:.1e}"
        ));
    }
    if max_defect > tol {
        ctx.failures.push(format!(
            "drift identity violated: max defect {max_defect:.3e} > {tol:.1e}"
        ));
    }
    emit_field_artifacts(ctx, &u, None)?;
    Ok(())
}

#[allow(clippy::too_many_arguments)]
fn run_blowup(
    config: &ExperimentConfig,
    source: &FieldSource,
    center: [f64; 2],
    radii: &[f64],
    normalization: crate::fb::Normalization,
    fit_phi_radii: &Option<Vec<f64>>,
    ctx: &mut RunContext,
) -> Result<()> {
    let u = obtain_field(config, source)?;
    let spec = u.spec();

    // phi trend at dyadic radii above the smallest requested radius
    let r0 = radii.iter().cloned().fold(f64::INFINITY, f64::min);
    let mut phi_samples = Vec::new();
    for k in 0..4 {
        let r = r0 * (1 << k) as f64;
        if spec.clearance(center) >= r && r >= 8.0 * spec.h {
            phi_samples.push((r, weiss_phi(&u, center, r)?));
        }
    }
    if phi_samples.is_empty() {
        return Err(Error::InvalidParameter(
            "no admissible dyadic radii for the phi trend".into(),
        ));
    }

    let mut rows = Vec::new();
    for &r in radii {
        let fit = blowup(&u, center, r, normalization, &phi_samples)?;
        // s_value/r² is the sampled second-order non-degeneracy quantity;
        // it is reported per radius, with any thresholding left to the
        // experiment consuming the trace
        rows.push(vec![
            r,
            fit.s_value,
            fit.s_value / (r * r),
            fit.coeffs[0],
            fit.coeffs[1],
            fit.coeffs[2],
            fit.fit_residual,
            fit.rotation_angle,
            match fit.regime {
                crate::fb::Regime::Polynomial => 0.0,
                crate::fb::Regime::HomogeneousSolution => 1.0,
                crate::fb::Regime::Trivial => 2.0,
            },
        ]);
        ctx.summary
            .insert(format!("regime[r={r}]"), format!("{:?}", fit.regime));
    }
    ctx.emit(
        "blowup.csv",
        &artifacts::csv_table(
            "r,s_value,s_over_r2,a,b,c,fit_residual,rotation_angle,regime_code",
            &rows,
        ),
    )?;
    if let Some(last) = rows.last() {
        ctx.metric("s_over_r2", last[2]);
        ctx.metric("fit_a", last[3]);
        ctx.metric("fit_b", last[4]);
        ctx.metric("fit_c", last[5]);
        ctx.metric("fit_residual", last[6]);
    }

    match rotation_fit(&u, center, radii) {
        Ok(fits) => {
            let rows: Vec<Vec<f64>> = fits.iter().map(|f| vec![f.r, f.angle, f.distance]).collect();
            ctx.emit("rotation.csv", &artifacts::csv_table("r,theta,distance", &rows))?;
            let mut drift = 0.0f64;
            for w in fits.windows(2) {
                let d = (w[1].angle - w[0].angle).abs();
                let period = std::f64::consts::FRAC_PI_2;
                drift = drift.max(d.min(period - d));
            }
            ctx.metric("rotation_angle_drift", drift);
        }
        Err(Error::TrivialBlowup) => {
            ctx.summary
                .insert("rotation_fit".into(), "trivial blow-up, no angle".into());
        }
        Err(e) => return Err(e),
    }

    // exploratory arc-angle fit: reported, never a failure
    if let Some(fr) = fit_phi_radii {
        let fb = extract_free_boundary(&u);
        match fit_phi(&fb, center, fr) {
            Ok(fit) => {
                ctx.metric("phi_fit_slope", fit.slope);
                ctx.metric("phi_fit_intercept", fit.intercept);
                ctx.metric("phi_fit_residual", fit.residual);
                let rows: Vec<Vec<f64>> = fit
                    .samples
                    .iter()
                    .map(|s| vec![s.r, s.rho, s.phi_hat])
                    .collect();
                ctx.emit("phi_fit.csv", &artifacts::csv_table("r,rho,phi_hat", &rows))?;
            }
            Err(e) => {
                ctx.summary.insert("phi_fit".into(), format!("not fitted: {e}"));
            }
        }
    }
    emit_field_artifacts(ctx, &u, None)?;
    Ok(())
}

fn run_cross_check(order: u8, samples: usize, ctx: &mut RunContext) -> Result<()> {
    let e = if order == 0 {
        CrossExpansion::canonical_order0()
    } else {
        CrossExpansion::canonical()
    };
    let thetas = theta_samples(samples);
    let mut worst_ode = 0.0f64;
    let mut detail = BTreeMap::new();
    for side in [Side::Plus, Side::Minus] {
        for k in 0..=order {
            let r = ode_residual(&e, k, side, &thetas)?;
            worst_ode = worst_ode.max(r);
            detail.insert(format!("ode_residual[{side:?},order{k}]"), r);
        }
    }
    let matching = matching_conditions(&e);
    ctx.metric("ode_residual_max", worst_ode);
    ctx.metric("matching_defect_max", matching.max_defect());

    #[derive(Serialize)]
    struct CrossReport<'a> {
        expansion: &'a CrossExpansion,
        theta_samples: usize,
        ode_residuals: BTreeMap<String, f64>,
        conditions: &'a [crate::cross::ConditionCheck],
    }
    let json = serde_json::to_string_pretty(&CrossReport {
        expansion: &e,
        theta_samples: samples,
        ode_residuals: detail,
        conditions: &matching.conditions,
    })?;
    ctx.emit("cross_report.json", json.as_bytes())?;

    // verification task: exactness at the stated tolerance
    let tol = 1e-12;
    if worst_ode > tol {
        ctx.failures
            .push(format!("ODE residual {worst_ode:.3e} exceeds {tol:.1e}"));
    }
    if matching.max_defect() > tol {
        ctx.failures.push(format!(
            "matching defect {:.3e} exceeds {tol:.1e}",
            matching.max_defect()
        ));
    }
    Ok(())
}

fn run_probe(
    config: &ExperimentConfig,
    source: &FieldSource,
    center: Option<[f64; 2]>,
    r1: f64,
    deltas: &[f64],
    ctx: &mut RunContext,
) -> Result<()> {
    let u = obtain_field(config, source)?;
    let x1 = match center {
        Some(c) => c,
        None => {
            let fb = extract_free_boundary(&u);
            let tau = default_singular_threshold(&u);
            let pts = singular_points(&u, &fb, tau);
            let c = u.spec().center();
            pts.into_iter()
                .min_by(|a, b| {
                    let da = (a[0] - c[0]).powi(2) + (a[1] - c[1]).powi(2);
                    let db = (b[0] - c[0]).powi(2) + (b[1] - c[1]).powi(2);
                    da.partial_cmp(&db).unwrap()
                })
                .ok_or_else(|| {
                    Error::InvalidParameter("no singular point detected for the probe".into())
                })?
        }
    };
    ctx.summary
        .insert("probe_center".into(), format!("[{:.6}, {:.6}]", x1[0], x1[1]));
    let samples = crate::variational::instability_probe(&u, x1, r1, deltas)?;
    let rows: Vec<Vec<f64>> = samples
        .iter()
        .map(|s| vec![s.delta, s.value.dirichlet, s.value.boundary, s.value.total])
        .collect();
    ctx.emit(
        "probe.csv",
        &artifacts::csv_table("delta,dirichlet,boundary,total", &rows),
    )?;
    let min_total = samples
        .iter()
        .map(|s| s.value.total)
        .fold(f64::INFINITY, f64::min);
    ctx.metric("min_total", min_total);
    ctx.metric("final_total", samples.last().unwrap().value.total);
    // regression slope of the boundary term against log(1/delta)
    let n = samples.len() as f64;
    let xs: Vec<f64> = samples.iter().map(|s| (1.0 / s.delta).ln()).collect();
    let ys: Vec<f64> = samples.iter().map(|s| s.value.boundary).collect();
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let sxx: f64 = xs.iter().map(|x| (x - mx).powi(2)).sum();
    let sxy: f64 = xs.iter().zip(&ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    ctx.metric("boundary_slope", if sxx > 0.0 { sxy / sxx } else { 0.0 });
    emit_field_artifacts(ctx, &u, None)?;
    Ok(())
}
