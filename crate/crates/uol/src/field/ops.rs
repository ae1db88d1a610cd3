use crate::error::{Error, Result};
use crate::field::{GridSpec, Point, ScalarField, VectorField};

/// 5-point discrete Laplacian. Interior nodes carry
/// `(u_E + u_W + u_N + u_S - 4 u_C)/h²`; boundary nodes carry 0 and are never
/// meaningful (Dirichlet data lives there). Exact on polynomials of degree
/// ≤ 2 up to round-off.
pub fn laplacian(u: &ScalarField) -> ScalarField {
    let spec = *u.spec();
    let inv_h2 = 1.0 / (spec.h * spec.h);
    let mut out = ScalarField::zeros(spec);
    let v = u.values();
    let nx = spec.nx;
    for j in 1..spec.ny - 1 {
        for i in 1..nx - 1 {
            let k = j * nx + i;
            let lap = (v[k - 1] + v[k + 1] + v[k - nx] + v[k + nx] - 4.0 * v[k]) * inv_h2;
            out.values_mut()[k] = lap;
        }
    }
    out
}

/// Discrete gradient: central differences at interior nodes, second-order
/// one-sided stencils on the boundary. Exact on polynomials of degree ≤ 2.
pub fn gradient(u: &ScalarField) -> VectorField {
    let spec = *u.spec();
    let (nx, ny) = (spec.nx, spec.ny);
    let inv_2h = 1.0 / (2.0 * spec.h);
    let v = u.values();
    let mut xs = vec![0.0; spec.len()];
    let mut ys = vec![0.0; spec.len()];
    for j in 0..ny {
        for i in 0..nx {
            let k = j * nx + i;
            xs[k] = if i == 0 {
                (-3.0 * v[k] + 4.0 * v[k + 1] - v[k + 2]) * inv_2h
            } else if i == nx - 1 {
                (3.0 * v[k] - 4.0 * v[k - 1] + v[k - 2]) * inv_2h
            } else {
                (v[k + 1] - v[k - 1]) * inv_2h
            };
            ys[k] = if j == 0 {
                (-3.0 * v[k] + 4.0 * v[k + nx] - v[k + 2 * nx]) * inv_2h
            } else if j == ny - 1 {
                (3.0 * v[k] - 4.0 * v[k - nx] + v[k - 2 * nx]) * inv_2h
            } else {
                (v[k + nx] - v[k - nx]) * inv_2h
            };
        }
    }
    VectorField::from_components(spec, xs, ys).expect("finite by construction")
}

#[inline]
fn cell_of(spec: &GridSpec, p: Point) -> Result<(usize, usize, f64, f64)> {
    if !spec.contains(p) {
        return Err(Error::OutOfDomain { point: p });
    }
    let fx = (p[0] - spec.origin[0]) / spec.h;
    let fy = (p[1] - spec.origin[1]) / spec.h;
    let i = (fx.floor() as usize).min(spec.nx - 2);
    let j = (fy.floor() as usize).min(spec.ny - 2);
    Ok((i, j, fx - i as f64, fy - j as f64))
}

/// Bilinear interpolation; exact on bilinear functions and continuous in `x`.
pub fn interpolate(u: &ScalarField, p: Point) -> Result<f64> {
    let (i, j, tx, ty) = cell_of(u.spec(), p)?;
    let v = u.values();
    let nx = u.spec().nx;
    let k = j * nx + i;
    Ok(v[k] * (1.0 - tx) * (1.0 - ty)
        + v[k + 1] * tx * (1.0 - ty)
        + v[k + nx] * (1.0 - tx) * ty
        + v[k + nx + 1] * tx * ty)
}

/// Bilinear interpolation of both gradient components.
pub fn interpolate_gradient(g: &VectorField, p: Point) -> Result<[f64; 2]> {
    let (i, j, tx, ty) = cell_of(g.spec(), p)?;
    let nx = g.spec().nx;
    let k = j * nx + i;
    let lerp = |v: &[f64]| {
        v[k] * (1.0 - tx) * (1.0 - ty)
            + v[k + 1] * tx * (1.0 - ty)
            + v[k + nx] * (1.0 - tx) * ty
            + v[k + nx + 1] * tx * ty
    };
    Ok([lerp(g.xs()), lerp(g.ys())])
}
