//! Shell-infimum non-degeneracy check at zeros of a field: the maximal
//! solution must dip below `-c₂r²` on every admissible shell around a zero,
//! with `c₂ = 1/(4e)` the optimal planar constant.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::fb::pulse::c2;
use crate::field::{interpolate, Point, ScalarField};

/// Per-radius outcome: the shell minimum and the margin
/// `min_{∂B_r} u + c₂ r²`, which stays below the discretization slack for
/// maximal solutions.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct ShellMargin {
    pub r: f64,
    pub shell_min: f64,
    pub margin: f64,
}

/// Evaluates the shell minima of `u` around `x0 ∈ {u = 0}`.
///
/// The precondition `u(x0) ≈ 0` is enforced with tolerance
/// `10h²(1 + ‖u‖_∞)`; calling this at a point where `u` is genuinely nonzero
/// is a usage error and is refused.
pub fn nondegeneracy_check(u: &ScalarField, x0: Point, radii: &[f64]) -> Result<Vec<ShellMargin>> {
    let spec = u.spec();
    let tol = 10.0 * spec.h * spec.h * (1.0 + u.norm_inf());
    let v0 = interpolate(u, x0)?;
    if v0.abs() > tol {
        return Err(Error::InvalidParameter(format!(
            "u(x0) = {v0:.6e} is not approximately zero (tol {tol:.3e})"
        )));
    }
    let mut out = Vec::with_capacity(radii.len());
    for &r in radii {
        if spec.clearance(x0) < r {
            return Err(Error::BallOutsideDomain { center: x0, radius: r });
        }
        let m = ((4.0 * std::f64::consts::PI * r / spec.h).ceil() as usize).max(64);
        let mut shell_min = f64::INFINITY;
        for j in 0..m {
            let t = 2.0 * std::f64::consts::PI * j as f64 / m as f64;
            let p = [x0[0] + r * t.cos(), x0[1] + r * t.sin()];
            shell_min = shell_min.min(interpolate(u, p)?);
        }
        out.push(ShellMargin {
            r,
            shell_min,
            margin: shell_min + c2() * r * r,
        });
    }
    Ok(out)
}

/// The slack allowed for discrete maximal solutions: ten percent of the
/// comparison term plus stencil error.
pub fn nondegeneracy_slack(r: f64, h: f64) -> f64 {
    0.1 * c2() * r * r + 10.0 * h * h
}
