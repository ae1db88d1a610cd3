//! Blow-up rescaling at a point, the degree-two model fit on the unit
//! circle, the regime classifier, and the rotation fit used to track
//! uniqueness of the blow-up limit.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::field::{interpolate, shell_quadrature, GridSpec, Point, ScalarField};

/// How the rescaled field `u(x0 + r·x)` is normalized.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Normalization {
    /// Divide by `r²`.
    Quadratic,
    /// Divide by the shell norm `S(x0, r) = (r^{-1} ∮ u² dH¹)^{1/2}`.
    Spherical,
}

/// The trichotomy of blow-up limits at a zero of `u` and `∇u`: scaled energy
/// diverging to -∞ leaves a harmonic degree-2 polynomial, a finite negative
/// limit leaves a degree-2 homogeneous solution, and limit 0 leaves nothing.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Regime {
    Polynomial,
    HomogeneousSolution,
    Trivial,
}

/// Result of one blow-up at radius `r`: the rescaled field on a unit
/// reference grid, the shell norm, the classified regime, and the degree-2
/// model `a(x₁²-x₂²) + 2b·x₁x₂ + c(x₁²+x₂²)` fitted on the unit circle.
#[derive(Debug, Clone)]
pub struct BlowupFit {
    pub center: Point,
    pub radius: f64,
    pub normalization: Normalization,
    pub s_value: f64,
    pub regime: Regime,
    /// `(a, b, c)`; `c` is pinned to 0 in the polynomial regime, where the
    /// limit must be harmonic.
    pub coeffs: [f64; 3],
    /// Relative L² error of the fit on the unit circle.
    pub fit_residual: f64,
    /// Best-fit angle of the rotated `(x₁²-x₂²)` model, in `[0, π/2)`.
    pub rotation_angle: f64,
    /// The rescaled field on `[-1,1]²`.
    pub rescaled: ScalarField,
}

/// Classifies the Φ trend at dyadic radii: fitted slope of Φ against
/// `log₂(1/r)` below `-0.1` means Φ is still sinking as the radius shrinks
/// (polynomial regime); otherwise a Φ already at zero means the trivial
/// regime, and anything else a homogeneous solution.
pub fn classify_phi_trend(samples: &[(f64, f64)]) -> Regime {
    assert!(!samples.is_empty(), "need phi samples to classify");
    let tail: Vec<&(f64, f64)> = samples.iter().rev().take(4).collect();
    let slope = if tail.len() >= 2 {
        let n = tail.len() as f64;
        let xs: Vec<f64> = tail.iter().map(|(r, _)| (1.0 / r).log2()).collect();
        let ys: Vec<f64> = tail.iter().map(|(_, p)| *p).collect();
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
    let smallest_phi = samples
        .iter()
        .min_by(|a, b| a.0.partial_cmp(&b.0).unwrap())
        .unwrap()
        .1;
    if slope < -0.1 {
        Regime::Polynomial
    } else if smallest_phi.abs() < 0.05 {
        Regime::Trivial
    } else {
        Regime::HomogeneousSolution
    }
}

/// Shell norm `S(x0, r)` at `n = 2`.
pub fn shell_norm(u: &ScalarField, center: Point, r: f64) -> Result<f64> {
    let spec = u.spec();
    if spec.clearance(center) < r {
        return Err(Error::BallOutsideDomain { center, radius: r });
    }
    let m = ((4.0 * std::f64::consts::PI * r / spec.h).ceil() as usize).max(64);
    let sq = shell_quadrature(center, r, m, |p| {
        let v = interpolate(u, p).expect("checked shell");
        v * v
    });
    Ok((sq / r).sqrt())
}

/// Rescales `u` about `center` at radius `r`, fits the degree-2 model on the
/// unit circle, and labels the regime from the supplied Φ samples
/// (`(radius, Φ(radius))` pairs, e.g. from a monotonicity trace).
///
/// Under spherical normalization a shell norm at round-off level signals the
/// trivial regime instead of dividing by it.
pub fn blowup(
    u: &ScalarField,
    center: Point,
    r: f64,
    normalization: Normalization,
    phi_samples: &[(f64, f64)],
) -> Result<BlowupFit> {
    let spec = u.spec();
    if spec.clearance(center) < 2.0 * r {
        return Err(Error::BallOutsideDomain { center, radius: 2.0 * r });
    }
    let s_value = shell_norm(u, center, r)?;
    let mut regime = classify_phi_trend(phi_samples);

    let tiny = 1e-12 * (1.0 + u.norm_inf());
    let norm = match normalization {
        Normalization::Quadratic => r * r,
        Normalization::Spherical => {
            if s_value <= tiny {
                regime = Regime::Trivial;
                r * r // fall back so the rescaled field is still reportable
            } else {
                s_value
            }
        }
    };

    // circle trace of the normalized rescaled field
    let m = ((4.0 * std::f64::consts::PI * r / spec.h).ceil() as usize).max(256);
    let mut trace = Vec::with_capacity(m);
    for j in 0..m {
        let t = 2.0 * std::f64::consts::PI * j as f64 / m as f64;
        let p = [center[0] + r * t.cos(), center[1] + r * t.sin()];
        trace.push((t, interpolate(u, p)? / norm));
    }
    let proj = |f: &dyn Fn(f64) -> f64| -> f64 {
        trace.iter().map(|(t, v)| v * f(*t)).sum::<f64>() * 2.0 / m as f64
    };
    let a = proj(&|t| (2.0 * t).cos());
    let b = proj(&|t| (2.0 * t).sin());
    let c = match regime {
        Regime::Polynomial => 0.0,
        _ => trace.iter().map(|(_, v)| v).sum::<f64>() / m as f64,
    };
    let coeffs = if regime == Regime::Trivial && s_value <= tiny {
        [0.0, 0.0, 0.0]
    } else {
        [a, b, c]
    };

    let mut err2 = 0.0;
    let mut norm2 = 0.0;
    for (t, v) in &trace {
        let model = coeffs[0] * (2.0 * t).cos() + coeffs[1] * (2.0 * t).sin() + coeffs[2];
        err2 += (v - model).powi(2);
        norm2 += v * v;
    }
    let fit_residual = if norm2 > 0.0 { (err2 / norm2).sqrt() } else { 0.0 };

    let rotation_angle = best_rotation(&trace).map(|(t, _)| t).unwrap_or(0.0);

    // resample onto the unit reference grid
    let nref = (((2.0 * r / spec.h).round() as usize) | 1).clamp(65, 257);
    let ref_spec = GridSpec::new(nref, nref, 2.0 / (nref - 1) as f64, [-1.0, -1.0])?;
    let rescaled = ScalarField::from_fn(ref_spec, |x| {
        let p = [center[0] + r * x[0], center[1] + r * x[1]];
        interpolate(u, p).expect("B_2r clearance checked") / norm
    })?;

    Ok(BlowupFit {
        center,
        radius: r,
        normalization,
        s_value,
        regime,
        coeffs,
        fit_residual,
        rotation_angle,
        rescaled,
    })
}

/// One radius of the rotation fit.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct RotationFit {
    pub r: f64,
    /// Minimizing angle in `[0, π/2)`.
    pub angle: f64,
    /// Attained L²(∂B₁) distance between the normalized trace and the
    /// rotated model.
    pub distance: f64,
}

/// Per radius, the angle θ minimizing the L²(∂B₁) distance between the
/// shell-normalized rescaled trace and the rotated model
/// `(x₁²-x₂²)/‖x₁²-x₂²‖`, found by a coarse scan refined with golden-section
/// search to 1e-4 radians (the model has period π/2).
pub fn rotation_fit(u: &ScalarField, center: Point, radii: &[f64]) -> Result<Vec<RotationFit>> {
    let spec = u.spec();
    let mut out = Vec::with_capacity(radii.len());
    for &r in radii {
        if spec.clearance(center) < r {
            return Err(Error::BallOutsideDomain { center, radius: r });
        }
        let s = shell_norm(u, center, r)?;
        if s <= 1e-12 * (1.0 + u.norm_inf()) {
            return Err(Error::TrivialBlowup);
        }
        let m = ((4.0 * std::f64::consts::PI * r / spec.h).ceil() as usize).max(256);
        let mut trace = Vec::with_capacity(m);
        for j in 0..m {
            let t = 2.0 * std::f64::consts::PI * j as f64 / m as f64;
            let p = [center[0] + r * t.cos(), center[1] + r * t.sin()];
            trace.push((t, interpolate(u, p)? / s));
        }
        let (angle, distance) = best_rotation(&trace).ok_or(Error::TrivialBlowup)?;
        out.push(RotationFit { r, angle, distance });
    }
    Ok(out)
}

/// Minimizes `θ ↦ ‖trace - cos(2(·-θ))/√π‖_{L²(∂B₁)}` over `[0, π/2)`.
fn best_rotation(trace: &[(f64, f64)]) -> Option<(f64, f64)> {
    if trace.is_empty() {
        return None;
    }
    let m = trace.len() as f64;
    let dist2 = |theta: f64| -> f64 {
        let scale = 1.0 / std::f64::consts::PI.sqrt();
        trace
            .iter()
            .map(|(t, v)| (v - scale * (2.0 * (t - theta)).cos()).powi(2))
            .sum::<f64>()
            * 2.0
            * std::f64::consts::PI
            / m
    };
    let half_pi = std::f64::consts::FRAC_PI_2;
    // coarse scan for the global basin, then golden-section refinement; the
    // interval is NOT wrapped (the distance has period pi in theta, so the
    // endpoints of [0, pi/2] are genuinely different models)
    let mut best = (0.0, dist2(0.0));
    let coarse = 64;
    for k in 1..=coarse {
        let t = half_pi * k as f64 / coarse as f64;
        let d = dist2(t);
        if d < best.1 {
            best = (t, d);
        }
    }
    let step = half_pi / coarse as f64;
    let (mut lo, mut hi) = ((best.0 - step).max(0.0), (best.0 + step).min(half_pi));
    let invphi = 0.5 * (5f64.sqrt() - 1.0);
    let mut x1 = hi - invphi * (hi - lo);
    let mut x2 = lo + invphi * (hi - lo);
    let mut f1 = dist2(x1);
    let mut f2 = dist2(x2);
    while hi - lo > 1e-4 {
        if f1 < f2 {
            hi = x2;
            x2 = x1;
            f2 = f1;
            x1 = hi - invphi * (hi - lo);
            f1 = dist2(x1);
        } else {
            lo = x1;
            x1 = x2;
            f1 = f2;
            x2 = lo + invphi * (hi - lo);
            f2 = dist2(x2);
        }
    }
    let theta = (0.5 * (lo + hi)).min(half_pi - 1e-12);
    Some((theta, dist2(theta).sqrt()))
}
