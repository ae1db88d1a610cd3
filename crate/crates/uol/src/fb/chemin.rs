//! Gradient growth check at a critical point: solutions with `∇u(x0) = 0`
//! satisfy `|∇u(x)| ≤ C|x - x0| log(1/|x - x0|)` nearby, so the sampled
//! ratio stays bounded as the radius shrinks. Fields violating the bound
//! show a diverging ratio instead.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::field::{gradient, interpolate_gradient, Point, ScalarField};

#[derive(Debug, Clone, Serialize)]
pub struct CheminReport {
    /// Sup over all samples of `|∇u(x)| / (|x-x0| log(1/|x-x0|))`.
    pub sup_ratio: f64,
    /// Per-radius sup of the ratio, smallest radius first.
    pub per_radius: Vec<(f64, f64)>,
    /// Regression slope of `log(sup ratio)` against `log(1/r)`; near zero
    /// for fields satisfying the bound.
    pub slope: f64,
    /// Set when the ratio blows up as the radius shrinks (slope ≥ 0.2).
    pub diverging: bool,
}

/// Samples the gradient-growth ratio on the given shells around `x0`.
/// Radii are capped at `min(1/2, clearance)` so the logarithm stays positive.
pub fn chemin_bound_check(u: &ScalarField, x0: Point, radii: &[f64]) -> Result<CheminReport> {
    let spec = u.spec();
    if radii.is_empty() {
        return Err(Error::InvalidParameter("need at least one radius".into()));
    }
    let grad = gradient(u);
    let g0 = interpolate_gradient(&grad, x0)?;
    let g0n = (g0[0] * g0[0] + g0[1] * g0[1]).sqrt();
    let gtol = 20.0 * spec.h * (1.0 + u.norm_inf());
    if g0n > gtol {
        return Err(Error::InvalidParameter(format!(
            "|∇u(x0)| = {g0n:.4e} is not approximately zero (tol {gtol:.3e})"
        )));
    }
    let mut per_radius = Vec::with_capacity(radii.len());
    for &r in radii {
        if r > 0.5 || spec.clearance(x0) < r {
            return Err(Error::InvalidParameter(format!(
                "radius {r} exceeds min(1/2, clearance)"
            )));
        }
        if !(r > 0.0) {
            return Err(Error::InvalidParameter("radii must be positive".into()));
        }
        let m = ((4.0 * std::f64::consts::PI * r / spec.h).ceil() as usize).max(64);
        let mut sup = 0.0f64;
        for j in 0..m {
            let t = 2.0 * std::f64::consts::PI * j as f64 / m as f64;
            let p = [x0[0] + r * t.cos(), x0[1] + r * t.sin()];
            let g = interpolate_gradient(&grad, p)?;
            let gn = (g[0] * g[0] + g[1] * g[1]).sqrt();
            sup = sup.max(gn / (r * (1.0 / r).ln()));
        }
        per_radius.push((r, sup));
    }
    per_radius.sort_by(|a, b| a.0.partial_cmp(&b.0).unwrap());
    let sup_ratio = per_radius.iter().fold(0.0f64, |m, (_, s)| m.max(*s));

    // slope of log(sup) against log(1/r)
    let slope = if per_radius.len() >= 2 {
        let xs: Vec<f64> = per_radius.iter().map(|(r, _)| (1.0 / r).ln()).collect();
        let ys: Vec<f64> = per_radius.iter().map(|(_, s)| s.max(1e-300).ln()).collect();
        let n = xs.len() as f64;
        let mx = xs.iter().sum::<f64>() / n;
        let my = ys.iter().sum::<f64>() / n;
        let sxx: f64 = xs.iter().map(|x| (x - mx).powi(2)).sum();
        let sxy: f64 = xs.iter().zip(&ys).map(|(x, y)| (x - mx) * (y - my)).sum();
        if sxx > 0.0 {
            sxy / sxx
        } else {
            0.0
        }
    } else {
        0.0
    };

    Ok(CheminReport {
        sup_ratio,
        per_radius,
        slope,
        diverging: slope >= 0.2,
    })
}
