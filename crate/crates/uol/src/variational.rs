//! The energy
//!
//! ```text
//! E(v) = ∫ |∇v|² - 2 max(v, 0)
//! ```
//!
//! whose critical points solve `Δv = -χ_{v>0}`, a projected-descent local
//! minimizer with backtracking, the second variation
//!
//! ```text
//! δ²E(u)(w)(w) = ∫ |∇w|² - ∫_{u=0} w²/|∇u| dH¹,
//! ```
//!
//! and the two-scale probe `w_δ = φ(x/r₁) - φ(x/(δr₁))` that accumulates the
//! second-variation boundary term along the arcs of a cross while its
//! Dirichlet part stays bounded: the mechanism by which a cross fails to be
//! a local energy minimizer.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::boundary::BoundaryValues;
use crate::error::{Error, Result};
use crate::extremal::{
    maximal_solution, minimal_solution, pde_residual, ExtremalParams, SolveKind, SolveReport,
    StageIterations,
};
use crate::fb::FreeBoundary;
use crate::field::{
    gradient, interpolate, interpolate_gradient, poisson_solve, LinearSolveParams, Point,
    ScalarField,
};

/// Energy split into its Dirichlet and bulk parts; `total = dirichlet - bulk`
/// to round-off.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct EnergyValue {
    pub total: f64,
    /// `∫ |∇v|²` by the midpoint rule on cell-centered gradients.
    pub dirichlet: f64,
    /// `2∫ max(v, 0)` by the nodal trapezoid rule.
    pub bulk: f64,
}

/// Energy of the field over the whole grid.
pub fn energy(v: &ScalarField) -> EnergyValue {
    energy_filtered(v, |_| true)
}

/// Energy restricted to the disc `B_r(center)`: cells and nodes weighted by
/// membership of their position. O(h) mask error at the rim.
pub fn energy_in_disc(v: &ScalarField, center: Point, r: f64) -> EnergyValue {
    energy_filtered(v, |p| {
        let dx = p[0] - center[0];
        let dy = p[1] - center[1];
        dx * dx + dy * dy <= r * r
    })
}

fn energy_filtered(v: &ScalarField, keep: impl Fn(Point) -> bool) -> EnergyValue {
    let spec = *v.spec();
    let h = spec.h;
    let h2 = h * h;
    let mut dirichlet = 0.0;
    for j in 0..spec.ny - 1 {
        for i in 0..spec.nx - 1 {
            let p = spec.node(i, j);
            let cc = [p[0] + 0.5 * h, p[1] + 0.5 * h];
            if !keep(cc) {
                continue;
            }
            let a = v.at(i, j);
            let b = v.at(i + 1, j);
            let c = v.at(i, j + 1);
            let d = v.at(i + 1, j + 1);
            let ux = (b - a + d - c) / (2.0 * h);
            let uy = (c - a + d - b) / (2.0 * h);
            dirichlet += (ux * ux + uy * uy) * h2;
        }
    }
    let mut bulk = 0.0;
    for j in 0..spec.ny {
        for i in 0..spec.nx {
            let p = spec.node(i, j);
            if !keep(p) {
                continue;
            }
            let wx = if i == 0 || i == spec.nx - 1 { 0.5 } else { 1.0 };
            let wy = if j == 0 || j == spec.ny - 1 { 0.5 } else { 1.0 };
            bulk += 2.0 * wx * wy * v.at(i, j).max(0.0) * h2;
        }
    }
    EnergyValue {
        total: dirichlet - bulk,
        dirichlet,
        bulk,
    }
}

/// Named descent initializations. The problem is nonconvex with genuinely
/// multiple minimizers, so every run sweeps a registry of starts.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum StartKind {
    Zero,
    Harmonic,
    TorsionLift,
    Maximal,
    Minimal,
    RandomPerturbation { index: u32 },
}

impl StartKind {
    pub fn name(&self) -> String {
        match self {
            StartKind::Zero => "zero".into(),
            StartKind::Harmonic => "harmonic".into(),
            StartKind::TorsionLift => "torsion-lift".into(),
            StartKind::Maximal => "maximal".into(),
            StartKind::Minimal => "minimal".into(),
            StartKind::RandomPerturbation { index } => format!("random-{index}"),
        }
    }
}

/// Backtracking-descent controls.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct DescentParams {
    /// Armijo sufficient-decrease fraction.
    pub armijo: f64,
    /// Step shrink factor of the backtracking line search.
    pub shrink: f64,
    /// Termination threshold on `sup |∂E/∂v| / (2h²)`, the discrete
    /// `|Δv + χ_{v>0}|` scale.
    pub gradient_tol: f64,
    pub max_steps: usize,
    pub starts: Vec<StartKind>,
    pub seed: u64,
    pub inner: LinearSolveParams,
}

impl Default for DescentParams {
    fn default() -> Self {
        DescentParams {
            armijo: 1e-4,
            shrink: 0.5,
            gradient_tol: 1e-3,
            max_steps: 50_000,
            starts: vec![
                StartKind::Zero,
                StartKind::Harmonic,
                StartKind::TorsionLift,
                StartKind::Maximal,
                StartKind::Minimal,
                StartKind::RandomPerturbation { index: 1 },
                StartKind::RandomPerturbation { index: 2 },
            ],
            seed: 7,
            inner: LinearSolveParams::default(),
        }
    }
}

impl DescentParams {
    pub fn validate(&self) -> Result<()> {
        if self.starts.is_empty() {
            return Err(Error::InvalidParameter("need at least one start".into()));
        }
        if !(self.armijo > 0.0 && self.armijo < 1.0) || !(self.shrink > 0.0 && self.shrink < 1.0) {
            return Err(Error::InvalidParameter("bad line-search parameters".into()));
        }
        if !(self.gradient_tol > 0.0) || self.max_steps == 0 {
            return Err(Error::InvalidParameter("bad termination parameters".into()));
        }
        Ok(())
    }
}

/// One accepted descent step, for CSV traces.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct DescentTraceRow {
    pub step: usize,
    pub energy: f64,
    pub grad_norm: f64,
    pub step_size: f64,
}

/// Per-start outcome of a minimization sweep.
#[derive(Debug, Clone)]
pub struct StartRun {
    pub name: String,
    pub energy: EnergyValue,
    pub steps: usize,
    pub trace: Vec<DescentTraceRow>,
}

/// Minimization result with per-start traces attached.
#[derive(Debug, Clone)]
pub struct MinimizeOutcome {
    pub report: SolveReport,
    pub best_start: String,
    pub energy: EnergyValue,
    pub runs: Vec<StartRun>,
}

/// Local minimization of the energy over fields with Dirichlet data `g`:
/// projected descent with Armijo backtracking from every registered start,
/// reduced by lowest energy (ties broken by the lexicographically smallest
/// start name).
pub fn minimize_energy(g: &BoundaryValues, params: &DescentParams) -> Result<SolveReport> {
    Ok(minimize_energy_traced(g, params)?.report)
}

/// Like [`minimize_energy`] but keeps every start's descent trace.
pub fn minimize_energy_traced(
    g: &BoundaryValues,
    params: &DescentParams,
) -> Result<MinimizeOutcome> {
    params.validate()?;
    let mut runs: Vec<StartRun> = Vec::new();
    let mut fields: Vec<ScalarField> = Vec::new();
    for start in &params.starts {
        let v0 = build_start(g, *start, params)?;
        let (v, trace) = descend(v0, params)?;
        let e = energy(&v);
        runs.push(StartRun {
            name: start.name(),
            energy: e,
            steps: trace.len(),
            trace,
        });
        fields.push(v);
    }

    // objective values for selection come from the descended objective, with
    // the start name as the deterministic tie-break
    let best = (0..runs.len())
        .min_by(|a, b| {
            (runs[*a].energy.total, &runs[*a].name)
                .partial_cmp(&(runs[*b].energy.total, &runs[*b].name))
                .unwrap()
        })
        .expect("at least one start");

    let u = fields.swap_remove(best);
    let residual = pde_residual(&u);
    let iterations = runs
        .iter()
        .map(|r| StageIterations {
            stage: r.name.clone(),
            iterations: r.steps,
        })
        .collect();
    // accepted steps never increase the objective; record the worst observed
    // increase across traces as the violation figure
    let monotone_violation = runs
        .iter()
        .flat_map(|r| r.trace.windows(2))
        .fold(0.0f64, |m, w| m.max(w[1].energy - w[0].energy));
    let best_energy = runs[best].energy;
    Ok(MinimizeOutcome {
        report: SolveReport {
            u,
            kind: SolveKind::Minimizer,
            pde_residual: residual,
            iterations,
            monotone_violation,
        },
        best_start: runs[best].name.clone(),
        energy: best_energy,
        runs,
    })
}

fn build_start(g: &BoundaryValues, kind: StartKind, params: &DescentParams) -> Result<ScalarField> {
    let spec = *g.spec();
    match kind {
        StartKind::Zero => {
            let mut v = ScalarField::zeros(spec);
            g.apply(&mut v)?;
            Ok(v)
        }
        StartKind::Harmonic => poisson_solve(&ScalarField::zeros(spec), g, &params.inner),
        StartKind::TorsionLift => {
            poisson_solve(&ScalarField::constant(spec, -1.0)?, g, &params.inner)
        }
        StartKind::Maximal => {
            let mut p = ExtremalParams::for_spacing(spec.h);
            p.inner = params.inner;
            Ok(maximal_solution(g, &p)?.u)
        }
        StartKind::Minimal => {
            let mut p = ExtremalParams::for_spacing(spec.h);
            p.inner = params.inner;
            Ok(minimal_solution(g, &p)?.u)
        }
        StartKind::RandomPerturbation { index } => {
            let base = poisson_solve(&ScalarField::zeros(spec), g, &params.inner)?;
            let mut rng = ChaCha8Rng::seed_from_u64(params.seed ^ ((index as u64) << 32));
            let amp = 0.3 * (1.0 + g.sup_abs());
            let mut noise = vec![0.0; spec.len()];
            for v in noise.iter_mut() {
                *v = rng.gen_range(-1.0..1.0) * amp;
            }
            // a few Jacobi passes so the perturbation is grid-smooth
            let nx = spec.nx;
            for _ in 0..10 {
                let prev = noise.clone();
                for j in 1..spec.ny - 1 {
                    for i in 1..nx - 1 {
                        let k = j * nx + i;
                        noise[k] =
                            0.25 * (prev[k - 1] + prev[k + 1] + prev[k - nx] + prev[k + nx]);
                    }
                }
            }
            let mut v = base;
            for (j, (val, n)) in v.values_mut().iter_mut().zip(&noise).enumerate() {
                let (i, jj) = (j % nx, j / nx);
                if !spec.is_boundary(i, jj) {
                    *val += n;
                }
            }
            Ok(v)
        }
    }
}

/// The descended objective: the edge-based Dirichlet form (whose exact
/// gradient is the 5-point Laplacian) minus the trapezoid bulk. It agrees
/// with [`energy`] to O(h²) and is coercive on the grid, so backtracking
/// stays monotone all the way to the discrete minimizer.
fn objective(v: &ScalarField) -> f64 {
    let spec = *v.spec();
    let mut dir = 0.0;
    for j in 0..spec.ny {
        for i in 0..spec.nx {
            let a = v.at(i, j);
            if i + 1 < spec.nx {
                let d = v.at(i + 1, j) - a;
                dir += d * d;
            }
            if j + 1 < spec.ny {
                let d = v.at(i, j + 1) - a;
                dir += d * d;
            }
        }
    }
    let h2 = spec.h * spec.h;
    let mut bulk = 0.0;
    for j in 0..spec.ny {
        for i in 0..spec.nx {
            let wx = if i == 0 || i == spec.nx - 1 { 0.5 } else { 1.0 };
            let wy = if j == 0 || j == spec.ny - 1 { 0.5 } else { 1.0 };
            bulk += 2.0 * wx * wy * v.at(i, j).max(0.0) * h2;
        }
    }
    dir - bulk
}

/// Exact gradient of [`objective`] at interior nodes (boundary projected
/// out). The subgradient of the bulk at `v = 0` is taken as 0.
fn objective_gradient(v: &ScalarField, out: &mut Vec<f64>) {
    let spec = *v.spec();
    let nx = spec.nx;
    let h2 = spec.h * spec.h;
    out.clear();
    out.resize(spec.len(), 0.0);
    let vals = v.values();
    for j in 1..spec.ny - 1 {
        for i in 1..nx - 1 {
            let k = j * nx + i;
            let lap_like =
                2.0 * (4.0 * vals[k] - vals[k - 1] - vals[k + 1] - vals[k - nx] - vals[k + nx]);
            let chi = if vals[k] > 0.0 { 2.0 * h2 } else { 0.0 };
            out[k] = lap_like - chi;
        }
    }
}

fn descend(
    mut v: ScalarField,
    params: &DescentParams,
) -> Result<(ScalarField, Vec<DescentTraceRow>)> {
    let spec = *v.spec();
    let h2 = spec.h * spec.h;
    let mut grad = Vec::new();
    let mut prev_grad: Vec<f64> = Vec::new();
    let mut prev_step: Vec<f64> = Vec::new();
    let mut trace = Vec::new();
    let mut e = objective(&v);
    let mut t_init = h2 / 8.0;

    for step in 0..params.max_steps {
        objective_gradient(&v, &mut grad);
        let g_sup = grad.iter().fold(0.0f64, |m, g| m.max(g.abs()));
        let grad_norm = g_sup / (2.0 * h2);
        if grad_norm <= params.gradient_tol {
            trace.push(DescentTraceRow {
                step,
                energy: e,
                grad_norm,
                step_size: 0.0,
            });
            break;
        }
        let g2: f64 = grad.iter().map(|g| g * g).sum();

        // Barzilai-Borwein step when history exists, safeguarded by Armijo
        let mut t = if !prev_grad.is_empty() {
            let mut ss = 0.0;
            let mut sy = 0.0;
            for k in 0..grad.len() {
                let y = grad[k] - prev_grad[k];
                ss += prev_step[k] * prev_step[k];
                sy += prev_step[k] * y;
            }
            if sy > 1e-300 {
                (ss / sy).clamp(1e-4 * h2, 1.0)
            } else {
                t_init
            }
        } else {
            t_init
        };

        let mut accepted = false;
        for _ in 0..60 {
            let mut cand = v.clone();
            for (k, val) in cand.values_mut().iter_mut().enumerate() {
                *val -= t * grad[k];
            }
            let ec = objective(&cand);
            if ec <= e - params.armijo * t * g2 {
                prev_step.clear();
                prev_step.extend(grad.iter().map(|g| -t * g));
                prev_grad.clear();
                prev_grad.extend_from_slice(&grad);
                v = cand;
                e = ec;
                accepted = true;
                trace.push(DescentTraceRow {
                    step,
                    energy: e,
                    grad_norm,
                    step_size: t,
                });
                break;
            }
            t *= params.shrink;
            if t < 1e-18 {
                break;
            }
        }
        if !accepted {
            return Err(Error::LineSearchFailed {
                step: t,
                last: Box::new(v),
            });
        }
        t_init = (t * 2.0).min(1.0);
    }
    Ok((v, trace))
}

/// The second-variation quadratic form split into its parts;
/// `total = dirichlet - boundary` to round-off.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct SecondVariationValue {
    pub total: f64,
    /// `∫ |∇w|²`.
    pub dirichlet: f64,
    /// `∫_{u=0} w²/|∇u| dH¹` along the extracted polylines.
    pub boundary: f64,
}

/// Evaluates `δ²E(u)(w)(w)` for a perturbation `w` vanishing on the domain
/// boundary, over the extracted zero set `fb` of `u`.
///
/// The quadratic form is only meaningful where `∇u ≠ 0` on the zero set; the
/// gradient floor `γ = 10h` guards that hypothesis, and any fb vertex below
/// it fails with a degenerate-point error.
pub fn second_variation(
    u: &ScalarField,
    w: &ScalarField,
    fb: &FreeBoundary,
) -> Result<SecondVariationValue> {
    u.check_same_spec(w)?;
    let floor = 10.0 * u.spec().h;
    for v in fb.vertices() {
        if v.grad_norm < floor {
            return Err(Error::DegenerateFreeBoundary {
                point: v.point,
                grad: v.grad_norm,
                floor,
            });
        }
    }
    second_variation_unguarded(u, w, fb)
}

fn check_vanishing_trace(w: &ScalarField) -> Result<()> {
    let spec = w.spec();
    let tol = 1e-12 * (1.0 + w.norm_inf());
    for (i, j) in spec.boundary_indices() {
        if w.at(i, j).abs() > tol {
            return Err(Error::InvalidParameter(format!(
                "perturbation does not vanish on the domain boundary (w = {} at {},{})",
                w.at(i, j),
                i,
                j
            )));
        }
    }
    Ok(())
}

fn second_variation_unguarded(
    u: &ScalarField,
    w: &ScalarField,
    fb: &FreeBoundary,
) -> Result<SecondVariationValue> {
    check_vanishing_trace(w)?;
    let dirichlet = energy(w).dirichlet;
    let grad_u = gradient(u);
    let mut boundary = 0.0;
    for pl in &fb.polylines {
        for (a, b) in pl.segment_pairs() {
            let mid = [0.5 * (a[0] + b[0]), 0.5 * (a[1] + b[1])];
            let len = ((b[0] - a[0]).powi(2) + (b[1] - a[1]).powi(2)).sqrt();
            let wm = interpolate(w, mid)?;
            if wm == 0.0 {
                continue;
            }
            let g = interpolate_gradient(&grad_u, mid)?;
            let gn = (g[0] * g[0] + g[1] * g[1]).sqrt();
            if gn < 1e-14 {
                return Err(Error::DegenerateFreeBoundary {
                    point: mid,
                    grad: gn,
                    floor: 1e-14,
                });
            }
            boundary += wm * wm / gn * len;
        }
    }
    Ok(SecondVariationValue {
        total: dirichlet - boundary,
        dirichlet,
        boundary,
    })
}

/// Radial cutoff: 1 inside radius 1/2, 0 outside radius 1, cubic smoothstep
/// between.
pub fn radial_cutoff(s: f64) -> f64 {
    crate::extremal::smoothstep(2.0 * (1.0 - s))
}

/// One probe scale.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct ProbeSample {
    pub delta: f64,
    pub value: SecondVariationValue,
}

/// Second-variation sweep of the two-scale perturbations
/// `w_δ(x) = φ((x-x¹)/r₁) - φ((x-x¹)/(δr₁))` around a detected singular
/// point `x¹`.
///
/// The strict gradient floor of [`second_variation`] is replaced by the
/// measured `|∇u|`: near `x¹` the gradient legitimately vanishes but `w_δ`
/// vanishes there too, so only points carrying weight can flag degeneracy.
/// The Dirichlet parts are bounded uniformly in δ (each cutoff contributes a
/// scale-invariant amount in the plane); on a cross the boundary term grows
/// like the accumulated `1/(r log(1/r))` mass of the arcs.
pub fn instability_probe(
    u: &ScalarField,
    x1: Point,
    r1: f64,
    deltas: &[f64],
) -> Result<Vec<ProbeSample>> {
    let spec = *u.spec();
    if spec.clearance(x1) < r1 {
        return Err(Error::BallOutsideDomain { center: x1, radius: r1 });
    }
    if deltas.is_empty()
        || !deltas.iter().all(|d| (0.0..1.0).contains(d))
        || !deltas.windows(2).all(|w| w[1] < w[0])
    {
        return Err(Error::InvalidParameter(
            "deltas must be a decreasing sequence in (0, 1)".into(),
        ));
    }
    let fb = crate::fb::extract_free_boundary(u);
    let mut out = Vec::with_capacity(deltas.len());
    for &delta in deltas {
        let w = ScalarField::from_fn(spec, |p| {
            let d = ((p[0] - x1[0]).powi(2) + (p[1] - x1[1]).powi(2)).sqrt();
            radial_cutoff(d / r1) - radial_cutoff(d / (delta * r1))
        })?;
        let value = second_variation_unguarded(u, &w, &fb)?;
        out.push(ProbeSample { delta, value });
    }
    Ok(out)
}
