use crate::error::{Error, Result};
use crate::field::{interpolate, Point, ScalarField};

/// Gauss-Legendre nodes and weights on [-1, 1], by Newton iteration on the
/// Legendre polynomial.
fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    let mut nodes = vec![0.0; n];
    let mut weights = vec![0.0; n];
    for i in 0..n {
        let mut x = (std::f64::consts::PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        for _ in 0..100 {
            // evaluate P_n and P_n' by the recurrence
            let (mut p0, mut p1) = (1.0, x);
            for k in 2..=n {
                let kf = k as f64;
                let p2 = ((2.0 * kf - 1.0) * x * p1 - (kf - 1.0) * p0) / kf;
                p0 = p1;
                p1 = p2;
            }
            let dp = n as f64 * (x * p1 - p0) / (x * x - 1.0);
            let dx = p1 / dp;
            x -= dx;
            if dx.abs() < 1e-15 {
                break;
            }
        }
        let (mut p0, mut p1) = (1.0, x);
        for k in 2..=n {
            let kf = k as f64;
            let p2 = ((2.0 * kf - 1.0) * x * p1 - (kf - 1.0) * p0) / kf;
            p0 = p1;
            p1 = p2;
        }
        let dp = n as f64 * (x * p1 - p0) / (x * x - 1.0);
        nodes[i] = x;
        weights[i] = 2.0 / ((1.0 - x * x) * dp * dp);
    }
    (nodes, weights)
}

fn angular_nodes(r: f64, h: f64) -> usize {
    ((4.0 * std::f64::consts::PI * r / h).ceil() as usize).max(64)
}

fn radial_nodes(r: f64, h: f64) -> usize {
    ((2.0 * r / h).ceil() as usize).max(8)
}

/// `∫_{B_r(x0)} f` by tensor quadrature in polar coordinates:
/// Gauss-Legendre in radius, uniform trapezoid in angle. `m` angular and
/// `n` radial nodes.
pub fn disc_quadrature(center: Point, r: f64, m: usize, n: usize, f: impl Fn(Point) -> f64) -> f64 {
    let (nodes, weights) = gauss_legendre(n);
    let dtheta = 2.0 * std::f64::consts::PI / m as f64;
    let mut total = 0.0;
    for (x, w) in nodes.iter().zip(&weights) {
        let rho = 0.5 * r * (x + 1.0);
        let wr = 0.5 * r * w * rho; // includes the polar Jacobian
        let mut ring = 0.0;
        for j in 0..m {
            let t = dtheta * j as f64;
            ring += f([center[0] + rho * t.cos(), center[1] + rho * t.sin()]);
        }
        total += wr * ring * dtheta;
    }
    total
}

/// `∫_{∂B_r(x0)} f dH¹` by the uniform trapezoid rule in angle.
pub fn shell_quadrature(center: Point, r: f64, m: usize, f: impl Fn(Point) -> f64) -> f64 {
    let dtheta = 2.0 * std::f64::consts::PI / m as f64;
    let mut total = 0.0;
    for j in 0..m {
        let t = dtheta * j as f64;
        total += f([center[0] + r * t.cos(), center[1] + r * t.sin()]);
    }
    total * r * dtheta
}

fn check_ball(u: &ScalarField, center: Point, r: f64) -> Result<()> {
    let spec = u.spec();
    if !(r > 0.0) || !r.is_finite() {
        return Err(Error::InvalidParameter(format!("radius must be positive, got {r}")));
    }
    if r < 4.0 * spec.h {
        return Err(Error::RadiusTooSmall {
            radius: r,
            min: 4.0 * spec.h,
        });
    }
    if spec.clearance(center) < r {
        return Err(Error::BallOutsideDomain { center, radius: r });
    }
    Ok(())
}

/// `∫_{B_r(x0)} u` over interpolated values. O(h²) for smooth `u`; the
/// quadrature resolution tracks `r/h` so its own error stays below the
/// stencil error.
pub fn ball_integral(u: &ScalarField, center: Point, r: f64) -> Result<f64> {
    check_ball(u, center, r)?;
    let h = u.spec().h;
    Ok(disc_quadrature(center, r, angular_nodes(r, h), radial_nodes(r, h), |p| {
        interpolate(u, p).expect("ball inside extent")
    }))
}

/// `∫_{∂B_r(x0)} u dH¹` over interpolated values.
pub fn circle_integral(u: &ScalarField, center: Point, r: f64) -> Result<f64> {
    check_ball(u, center, r)?;
    let h = u.spec().h;
    Ok(shell_quadrature(center, r, angular_nodes(r, h), |p| {
        interpolate(u, p).expect("circle inside extent")
    }))
}
