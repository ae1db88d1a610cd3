use serde::{Deserialize, Serialize};

use crate::boundary::BoundaryValues;
use crate::error::{Error, Result};
use crate::field::{GridSpec, ScalarField};

/// Tolerances for the inner linear solver.
///
/// `residual_tol` bounds the relative interior residual
/// `‖Δu - f‖₂ / (1 + ‖f‖₂)`. One iteration is one multigrid V-cycle (or one
/// red-black sweep when the grid cannot be coarsened).
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct LinearSolveParams {
    pub residual_tol: f64,
    pub max_iterations: usize,
}

impl Default for LinearSolveParams {
    fn default() -> Self {
        LinearSolveParams {
            residual_tol: 1e-9,
            max_iterations: 500,
        }
    }
}

impl LinearSolveParams {
    pub fn validate(&self) -> Result<()> {
        if !(self.residual_tol > 0.0) {
            return Err(Error::InvalidParameter(
                "residual_tol must be positive".into(),
            ));
        }
        if self.max_iterations == 0 {
            return Err(Error::InvalidParameter(
                "max_iterations must be at least 1".into(),
            ));
        }
        Ok(())
    }
}

/// Solves the Dirichlet problem `Δu = f` in the interior, `u = g` on the
/// boundary, with the 5-point stencil.
///
/// Red-black Gauss-Seidel smoothing with geometric multigrid V-cycles when
/// both axes coarsen evenly; the sweep ordering is fixed, so the result is
/// reproducible bit for bit.
pub fn poisson_solve(
    f: &ScalarField,
    g: &BoundaryValues,
    params: &LinearSolveParams,
) -> Result<ScalarField> {
    params.validate()?;
    g.check_spec(f.spec())?;
    let mut u = ScalarField::zeros(*f.spec());
    g.apply(&mut u)?;
    poisson_solve_into(&mut u, f, params)?;
    Ok(u)
}

/// Same as [`poisson_solve`] but warm-starts from (and overwrites) `u`,
/// whose boundary ring is taken as the Dirichlet data.
pub fn poisson_solve_into(
    u: &mut ScalarField,
    f: &ScalarField,
    params: &LinearSolveParams,
) -> Result<ScalarField> {
    u.check_same_spec(f)?;
    let spec = *f.spec();
    let f_norm = 1.0 + interior_l2(spec, f.values());
    let mut residual = residual_norm(spec, u.values(), f.values()) / f_norm;
    let mut iterations = 0usize;
    while residual > params.residual_tol {
        if iterations >= params.max_iterations {
            return Err(Error::SolverDiverged {
                residual,
                tol: params.residual_tol,
                iterations,
            });
        }
        if coarsenable(spec) {
            v_cycle(spec, u.values_mut(), f.values());
        } else {
            rb_sweep(spec, u.values_mut(), f.values());
        }
        residual = residual_norm(spec, u.values(), f.values()) / f_norm;
        iterations += 1;
    }
    // scrub any -0.0 the smoother may have produced so runs hash identically
    for v in u.values_mut() {
        if *v == 0.0 {
            *v = 0.0;
        }
    }
    ScalarField::from_values(spec, u.values().to_vec())
}

fn interior_l2(spec: GridSpec, v: &[f64]) -> f64 {
    let nx = spec.nx;
    let mut s = 0.0;
    for j in 1..spec.ny - 1 {
        for i in 1..nx - 1 {
            let x = v[j * nx + i];
            s += x * x;
        }
    }
    s.sqrt()
}

fn residual_norm(spec: GridSpec, u: &[f64], f: &[f64]) -> f64 {
    let nx = spec.nx;
    let inv_h2 = 1.0 / (spec.h * spec.h);
    let mut s = 0.0;
    for j in 1..spec.ny - 1 {
        for i in 1..nx - 1 {
            let k = j * nx + i;
            let r = f[k] - (u[k - 1] + u[k + 1] + u[k - nx] + u[k + nx] - 4.0 * u[k]) * inv_h2;
            s += r * r;
        }
    }
    s.sqrt()
}

fn coarsenable(spec: GridSpec) -> bool {
    (spec.nx - 1) % 2 == 0 && (spec.ny - 1) % 2 == 0 && spec.nx >= 5 && spec.ny >= 5
}

/// One red-black Gauss-Seidel sweep (red = even i+j first).
fn rb_sweep(spec: GridSpec, u: &mut [f64], f: &[f64]) {
    let nx = spec.nx;
    let h2 = spec.h * spec.h;
    for color in 0..2usize {
        for j in 1..spec.ny - 1 {
            let start = 1 + (j + color) % 2;
            let mut i = start;
            while i < nx - 1 {
                let k = j * nx + i;
                u[k] = 0.25 * (u[k - 1] + u[k + 1] + u[k - nx] + u[k + nx] - h2 * f[k]);
                i += 2;
            }
        }
    }
}

fn v_cycle(spec: GridSpec, u: &mut [f64], f: &[f64]) {
    for _ in 0..2 {
        rb_sweep(spec, u, f);
    }
    if coarsenable(spec) {
        let nx = spec.nx;
        let inv_h2 = 1.0 / (spec.h * spec.h);
        let mut res = vec![0.0; spec.len()];
        for j in 1..spec.ny - 1 {
            for i in 1..nx - 1 {
                let k = j * nx + i;
                res[k] =
                    f[k] - (u[k - 1] + u[k + 1] + u[k - nx] + u[k + nx] - 4.0 * u[k]) * inv_h2;
            }
        }
        let coarse = GridSpec {
            nx: (spec.nx - 1) / 2 + 1,
            ny: (spec.ny - 1) / 2 + 1,
            h: 2.0 * spec.h,
            origin: spec.origin,
        };
        let coarse_f = restrict(spec, coarse, &res);
        let mut coarse_e = vec![0.0; coarse.len()];
        if coarsenable(coarse) {
            v_cycle(coarse, &mut coarse_e, &coarse_f);
        } else {
            for _ in 0..64 {
                rb_sweep(coarse, &mut coarse_e, &coarse_f);
            }
        }
        prolong_add(spec, coarse, u, &coarse_e);
    }
    for _ in 0..2 {
        rb_sweep(spec, u, f);
    }
}

/// Full-weighting restriction of an interior residual (zero on the boundary).
fn restrict(fine: GridSpec, coarse: GridSpec, r: &[f64]) -> Vec<f64> {
    let nxf = fine.nx;
    let mut out = vec![0.0; coarse.len()];
    for jc in 1..coarse.ny - 1 {
        for ic in 1..coarse.nx - 1 {
            let i = 2 * ic;
            let j = 2 * jc;
            let k = j * nxf + i;
            out[jc * coarse.nx + ic] = 0.25 * r[k]
                + 0.125 * (r[k - 1] + r[k + 1] + r[k - nxf] + r[k + nxf])
                + 0.0625 * (r[k - nxf - 1] + r[k - nxf + 1] + r[k + nxf - 1] + r[k + nxf + 1]);
        }
    }
    out
}

/// Bilinear prolongation of the coarse-grid correction, added in place.
fn prolong_add(fine: GridSpec, coarse: GridSpec, u: &mut [f64], e: &[f64]) {
    let nxf = fine.nx;
    let nxc = coarse.nx;
    for j in 1..fine.ny - 1 {
        for i in 1..fine.nx - 1 {
            let ic = i / 2;
            let jc = j / 2;
            let kc = jc * nxc + ic;
            let corr = match (i % 2, j % 2) {
                (0, 0) => e[kc],
                (1, 0) => 0.5 * (e[kc] + e[kc + 1]),
                (0, 1) => 0.5 * (e[kc] + e[kc + nxc]),
                _ => 0.25 * (e[kc] + e[kc + 1] + e[kc + nxc] + e[kc + nxc + 1]),
            };
            u[j * nxf + i] += corr;
        }
    }
}
