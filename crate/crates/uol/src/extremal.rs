//! Maximal and minimal solutions of `Δu = -χ_{u>0}` by regularization from
//! above/below.
//!
//! The characteristic function is replaced by a smooth monotone family
//! `β̄_ε ≥ χ_{z>0}` (above) or `β_ε ≤ χ_{z>0}` (below). For each ε the
//! fixed point of `u ↦ poisson_solve(-β(u), g)` is reached by monotone
//! iteration: started from the explicit supersolution `Δu⁰ = -1` (above) or
//! the harmonic extension (below), the maximum principle drives the iterates
//! monotonically onto the extremal ε-solution, and shrinking ε walks the
//! ε-solutions monotonically onto the extremal solution of the original
//! equation. No randomness anywhere: extremal solutions are deterministic.

use serde::{Deserialize, Serialize};

use crate::boundary::BoundaryValues;
use crate::error::{Error, Result};
use crate::field::{laplacian, poisson_solve, poisson_solve_into, LinearSolveParams, ScalarField};

/// Which side the smoothed characteristic approaches `χ_{z>0}` from.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Side {
    /// `β̄_ε ≥ χ_{z>0}`, for the maximal solution.
    Above,
    /// `β_ε ≤ χ_{z>0}`, for the minimal solution.
    Below,
}

/// Cubic smoothstep: 0 below 0, 1 above 1, `3t²-2t³` between. Monotone, C¹.
pub fn smoothstep(t: f64) -> f64 {
    if t <= 0.0 {
        0.0
    } else if t >= 1.0 {
        1.0
    } else {
        t * t * (3.0 - 2.0 * t)
    }
}

/// The smoothed characteristic family. The transition band sits on `(-ε, 0)`
/// for the above-side and `(0, ε)` for the below-side, so the defining
/// inequalities against `χ_{z>0}` hold pointwise, not just approximately.
#[derive(Debug, Clone, Copy)]
pub struct RegularizedNonlinearity {
    pub epsilon: f64,
    pub side: Side,
}

impl RegularizedNonlinearity {
    pub fn new(epsilon: f64, side: Side) -> Result<Self> {
        if !(epsilon > 0.0) || !epsilon.is_finite() {
            return Err(Error::InvalidParameter(format!(
                "epsilon must be positive, got {epsilon}"
            )));
        }
        Ok(RegularizedNonlinearity { epsilon, side })
    }

    #[inline]
    pub fn eval(&self, z: f64) -> f64 {
        match self.side {
            Side::Above => {
                if z >= 0.0 {
                    1.0
                } else {
                    smoothstep((z + self.epsilon) / self.epsilon)
                }
            }
            Side::Below => smoothstep(z / self.epsilon),
        }
    }
}

/// Iteration controls for the extremal solves.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ExtremalParams {
    /// Strictly decreasing positive smoothing widths.
    pub epsilon_schedule: Vec<f64>,
    /// Sup-norm tolerance of the fixed-point iteration per ε.
    pub fixed_point_tol: f64,
    /// Sup-norm tolerance between successive ε-solutions; reaching it ends
    /// the schedule early.
    pub outer_tol: f64,
    /// Cap on fixed-point iterations per ε.
    pub max_fixed_point_iterations: usize,
    pub inner: LinearSolveParams,
}

impl ExtremalParams {
    /// Dyadic schedule `ε_j = ε₀ 2^{-j}` truncated below `h²`, where further
    /// regularization is invisible to the grid.
    pub fn for_spacing(h: f64) -> Self {
        let eps0 = 0.1;
        let mut schedule = Vec::new();
        let mut eps = eps0;
        while eps >= h * h {
            schedule.push(eps);
            eps *= 0.5;
        }
        if schedule.is_empty() {
            schedule.push(eps0);
        }
        ExtremalParams {
            epsilon_schedule: schedule,
            fixed_point_tol: 1e-8,
            outer_tol: 1e-7,
            max_fixed_point_iterations: 300,
            inner: LinearSolveParams::default(),
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.epsilon_schedule.is_empty() {
            return Err(Error::InvalidParameter("empty epsilon schedule".into()));
        }
        if !self
            .epsilon_schedule
            .iter()
            .all(|e| e.is_finite() && *e > 0.0)
        {
            return Err(Error::InvalidParameter("epsilons must be positive".into()));
        }
        if !self.epsilon_schedule.windows(2).all(|w| w[1] < w[0]) {
            return Err(Error::InvalidParameter(
                "epsilon schedule must be strictly decreasing".into(),
            ));
        }
        if !(self.fixed_point_tol > 0.0) || !(self.outer_tol > 0.0) {
            return Err(Error::InvalidParameter("tolerances must be positive".into()));
        }
        self.inner.validate()
    }
}

/// What produced a report.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SolveKind {
    Maximal,
    Minimal,
    Minimizer,
}

/// Per-stage iteration counts for provenance.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct StageIterations {
    pub stage: String,
    pub iterations: usize,
}

/// Converged field with residual and iteration provenance.
#[derive(Debug, Clone)]
pub struct SolveReport {
    pub u: ScalarField,
    pub kind: SolveKind,
    /// Sup of `|Δu + χ_{u>0}|` over interior nodes farther than two cells
    /// from the zero set.
    pub pde_residual: f64,
    pub iterations: Vec<StageIterations>,
    /// Largest step in the forbidden direction across all iterate pairs:
    /// increases for the maximal side, decreases mirrored for the minimal.
    pub monotone_violation: f64,
}

/// The pointwise largest solution for the given Dirichlet data.
pub fn maximal_solution(g: &BoundaryValues, params: &ExtremalParams) -> Result<SolveReport> {
    extremal_solution(g, params, Side::Above)
}

/// The pointwise smallest solution for the given Dirichlet data.
pub fn minimal_solution(g: &BoundaryValues, params: &ExtremalParams) -> Result<SolveReport> {
    extremal_solution(g, params, Side::Below)
}

fn extremal_solution(
    g: &BoundaryValues,
    params: &ExtremalParams,
    side: Side,
) -> Result<SolveReport> {
    params.validate()?;
    let spec = *g.spec();

    // explicit extremal start: supersolution Δu⁰ = -1 from above, harmonic
    // extension from below
    let start_rhs = match side {
        Side::Above => ScalarField::constant(spec, -1.0)?,
        Side::Below => ScalarField::zeros(spec),
    };
    let mut u = poisson_solve(&start_rhs, g, &params.inner)?;

    let mut iterations = Vec::new();
    let mut monotone_violation = 0.0f64;
    let mut prev_eps_solution: Option<ScalarField> = None;
    let mut rhs = ScalarField::zeros(spec);

    for &eps in &params.epsilon_schedule {
        let beta = RegularizedNonlinearity::new(eps, side)?;
        let mut count = 0usize;
        let mut trace = Vec::new();
        loop {
            for (k, v) in rhs.values_mut().iter_mut().zip(u.values()) {
                *k = -beta.eval(*v);
            }
            let mut next = u.clone();
            poisson_solve_into(&mut next, &rhs, &params.inner)?;
            let violation = match side {
                Side::Above => next.sup_diff(&u)?,
                Side::Below => u.sup_diff(&next)?,
            };
            monotone_violation = monotone_violation.max(violation);
            let diff = next.sup_abs_diff(&u)?;
            u = next;
            count += 1;
            trace.push(diff);
            if diff <= params.fixed_point_tol {
                break;
            }
            if count >= params.max_fixed_point_iterations {
                return Err(Error::FixedPointDiverged {
                    epsilon: eps,
                    sup_diff: diff,
                    iterations: count,
                    trace,
                });
            }
        }
        iterations.push(StageIterations {
            stage: format!("eps={eps:.6e}"),
            iterations: count,
        });
        if let Some(prev) = &prev_eps_solution {
            if u.sup_abs_diff(prev)? < params.outer_tol {
                break;
            }
        }
        prev_eps_solution = Some(u.clone());
    }

    let pde_residual = pde_residual(&u);
    Ok(SolveReport {
        u,
        kind: match side {
            Side::Above => SolveKind::Maximal,
            Side::Below => SolveKind::Minimal,
        },
        pde_residual,
        iterations,
        monotone_violation,
    })
}

/// Sup of `|Δu + χ_{u>0}|` over interior nodes farther than two cells from
/// the zero set. Nodes whose 5×5 neighborhood sees a sign change are
/// excluded: the discrete Laplacian is O(1) wrong across the kink of the
/// characteristic function.
pub fn pde_residual(u: &ScalarField) -> f64 {
    let spec = *u.spec();
    let lap = laplacian(u);
    let sign = |v: f64| -> i8 {
        if v > 0.0 {
            1
        } else if v < 0.0 {
            -1
        } else {
            0
        }
    };
    let (nx, ny) = (spec.nx, spec.ny);
    let mut sup = 0.0f64;
    for j in 1..ny - 1 {
        for i in 1..nx - 1 {
            let s0 = sign(u.at(i, j));
            let mut near_kink = false;
            'scan: for dj in -2i64..=2 {
                for di in -2i64..=2 {
                    let ii = i as i64 + di;
                    let jj = j as i64 + dj;
                    if ii < 0 || jj < 0 || ii >= nx as i64 || jj >= ny as i64 {
                        continue;
                    }
                    if sign(u.at(ii as usize, jj as usize)) != s0 {
                        near_kink = true;
                        break 'scan;
                    }
                }
            }
            if near_kink {
                continue;
            }
            let chi = if u.at(i, j) > 0.0 { 1.0 } else { 0.0 };
            sup = sup.max((lap.at(i, j) + chi).abs());
        }
    }
    sup
}
