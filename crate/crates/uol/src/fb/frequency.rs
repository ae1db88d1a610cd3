//! The frequency inequality for harmonic fields vanishing to order `α-1`
//! at the origin:
//!
//! ```text
//! ∫_{B₁} |∇w|² - α ∫_{∂B₁} w² dH¹ ≥ 0,
//! ```
//!
//! with equality exactly when `w` is homogeneous of degree `α`.

use crate::error::{Error, Result};
use crate::field::{
    disc_quadrature, gradient, interpolate, interpolate_gradient, laplacian, shell_quadrature,
    ScalarField,
};

/// The defect value with any precondition warnings; violated preconditions
/// are reported, not fatal.
#[derive(Debug, Clone)]
pub struct FrequencyDefect {
    pub value: f64,
    pub alpha: u32,
    pub warnings: Vec<String>,
}

impl FrequencyDefect {
    pub fn is_clean(&self) -> bool {
        self.warnings.is_empty()
    }
}

/// Evaluates the frequency defect of `w` at order `alpha` on the unit ball.
///
/// Preconditions are checked, and their violation recorded as warnings:
/// `w` harmonic inside `B₁` (discrete Laplacian at residual level), and
/// derivatives through order `alpha - 1` vanishing at the origin, probed by
/// a least-squares polynomial fit at scale `8h`.
pub fn frequency_defect(w: &ScalarField, alpha: u32) -> Result<FrequencyDefect> {
    if alpha < 1 {
        return Err(Error::InvalidParameter("alpha must be at least 1".into()));
    }
    let spec = w.spec();
    if spec.clearance([0.0, 0.0]) < 1.0 {
        return Err(Error::BallOutsideDomain {
            center: [0.0, 0.0],
            radius: 1.0,
        });
    }
    let mut warnings = Vec::new();

    // harmonicity inside the ball
    let lap = laplacian(w);
    let mut lap_sup = 0.0f64;
    for (i, j) in spec.interior_indices() {
        let p = spec.node(i, j);
        if p[0] * p[0] + p[1] * p[1] < (1.0 - 2.0 * spec.h).powi(2) {
            lap_sup = lap_sup.max(lap.at(i, j).abs());
        }
    }
    let scale = 1.0 + w.norm_inf();
    if lap_sup > 1e-2 * scale {
        warnings.push(format!(
            "field is not harmonic in the unit ball: sup |Δw| = {lap_sup:.3e}"
        ));
    }

    // low-order Taylor content at the origin, probed at scale 8h
    let probe = 8.0 * spec.h;
    let low = low_order_sup(w, alpha, probe)?;
    let local_sup = local_sup(w, probe)?;
    if low > 0.2 * local_sup.max(1e-14 * scale) {
        warnings.push(format!(
            "derivatives below order {alpha} do not vanish at 0: low-order part {low:.3e} vs local sup {local_sup:.3e}"
        ));
    }

    let grad = gradient(w);
    let h = spec.h;
    let m = ((4.0 * std::f64::consts::PI / h).ceil() as usize).max(64);
    let n = ((2.0 / h).ceil() as usize).max(8);
    let dirichlet = disc_quadrature([0.0, 0.0], 1.0, m, n, |p| {
        let g = interpolate_gradient(&grad, p).expect("unit ball checked");
        g[0] * g[0] + g[1] * g[1]
    });
    let boundary = shell_quadrature([0.0, 0.0], 1.0, m, |p| {
        let v = interpolate(w, p).expect("unit ball checked");
        v * v
    });

    Ok(FrequencyDefect {
        value: dirichlet - alpha as f64 * boundary,
        alpha,
        warnings,
    })
}

/// Sup over the probe disc of the degree `< alpha` least-squares polynomial
/// part of `w`.
fn low_order_sup(w: &ScalarField, alpha: u32, probe: f64) -> Result<f64> {
    let monomials: Vec<(u32, u32)> = (0..alpha)
        .flat_map(|d| (0..=d).map(move |k| (d - k, k)))
        .collect();
    let spec = w.spec();
    let mut pts = Vec::new();
    for (i, j) in spec.interior_indices() {
        let p = spec.node(i, j);
        if p[0] * p[0] + p[1] * p[1] <= probe * probe {
            pts.push((p, w.at(i, j)));
        }
    }
    if pts.len() < monomials.len() {
        return Ok(0.0);
    }
    // normal equations on the scaled coordinates x/probe
    let k = monomials.len();
    let mut ata = vec![0.0; k * k];
    let mut atb = vec![0.0; k];
    for (p, v) in &pts {
        let row: Vec<f64> = monomials
            .iter()
            .map(|(a, b)| (p[0] / probe).powi(*a as i32) * (p[1] / probe).powi(*b as i32))
            .collect();
        for r in 0..k {
            atb[r] += row[r] * v;
            for c in 0..k {
                ata[r * k + c] += row[r] * row[c];
            }
        }
    }
    let coeffs = solve_dense(&mut ata, &mut atb, k)
        .ok_or_else(|| Error::InvalidParameter("degenerate polynomial fit".into()))?;
    let mut sup = 0.0f64;
    for (p, _) in &pts {
        let val: f64 = monomials
            .iter()
            .zip(&coeffs)
            .map(|((a, b), c)| c * (p[0] / probe).powi(*a as i32) * (p[1] / probe).powi(*b as i32))
            .sum();
        sup = sup.max(val.abs());
    }
    Ok(sup)
}

fn local_sup(w: &ScalarField, probe: f64) -> Result<f64> {
    let spec = w.spec();
    let mut sup = 0.0f64;
    for (i, j) in spec.interior_indices() {
        let p = spec.node(i, j);
        if p[0] * p[0] + p[1] * p[1] <= probe * probe {
            sup = sup.max(w.at(i, j).abs());
        }
    }
    Ok(sup)
}

/// Gaussian elimination with partial pivoting; `a` is row-major `n×n`.
fn solve_dense(a: &mut [f64], b: &mut [f64], n: usize) -> Option<Vec<f64>> {
    for col in 0..n {
        let pivot = (col..n).max_by(|r, s| {
            a[r * n + col]
                .abs()
                .partial_cmp(&a[s * n + col].abs())
                .unwrap()
        })?;
        if a[pivot * n + col].abs() < 1e-14 {
            return None;
        }
        if pivot != col {
            for c in 0..n {
                a.swap(col * n + c, pivot * n + c);
            }
            b.swap(col, pivot);
        }
        for row in col + 1..n {
            let f = a[row * n + col] / a[col * n + col];
            for c in col..n {
                a[row * n + c] -= f * a[col * n + c];
            }
            b[row] -= f * b[col];
        }
    }
    let mut x = vec![0.0; n];
    for row in (0..n).rev() {
        let mut s = b[row];
        for c in row + 1..n {
            s -= a[row * n + c] * x[c];
        }
        x[row] = s / a[row * n + row];
    }
    Some(x)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::{GridSpec, Point};
    use std::f64::consts::PI;

    fn field(f: impl Fn(Point) -> f64) -> ScalarField {
        let spec = GridSpec::from_extent(-1.1, 1.1, -1.1, 1.1, 2.2 / 564.0).unwrap();
        ScalarField::from_fn(spec, f).unwrap()
    }

    #[test]
    fn homogeneous_harmonic_is_the_equality_case() {
        let w = field(|p| p[0] * p[0] - p[1] * p[1]);
        let d = frequency_defect(&w, 2).unwrap();
        assert!(d.is_clean(), "{:?}", d.warnings);
        assert!(d.value.abs() < 1e-3, "defect {}", d.value);
    }

    #[test]
    fn cubic_harmonic_at_alpha_two_has_defect_pi() {
        // Re((x₁+ix₂)³) = r³cos3θ: ∫|∇w|² = 3π, ∫_{∂B₁}w² = π, defect = π.
        let w = field(|p| p[0].powi(3) - 3.0 * p[0] * p[1] * p[1]);
        let d = frequency_defect(&w, 2).unwrap();
        assert!(d.is_clean(), "{:?}", d.warnings);
        assert!((d.value - PI).abs() < 2e-2, "defect {}", d.value);
    }

    #[test]
    fn zero_field_has_zero_defect() {
        let w = field(|_| 0.0);
        let d = frequency_defect(&w, 2).unwrap();
        assert_eq!(d.value, 0.0);
    }

    #[test]
    fn precondition_violations_warn_but_still_return() {
        // not harmonic
        let w = field(|p| p[0] * p[0] + p[1] * p[1]);
        let d = frequency_defect(&w, 2).unwrap();
        assert!(d.warnings.iter().any(|w| w.contains("harmonic")));
        // harmonic but with a linear part at the origin
        let w = field(|p| p[0]);
        let d = frequency_defect(&w, 2).unwrap();
        assert!(d.warnings.iter().any(|w| w.contains("order")));
        assert!(d.value.is_finite());
    }
}
