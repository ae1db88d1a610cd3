//! Scaled-energy traces: monotone on solver outputs, constant on
//! 2-homogeneous fields, and identity-breaking on a non-solution.

use uol::boundary::BoundaryData;
use uol::extremal::{maximal_solution, ExtremalParams};
use uol::fb::monotonicity_trace;
use uol::field::{GridSpec, ScalarField};

fn print_trace(label: &str, u: &ScalarField, center: [f64; 2], radii: &[f64]) -> uol::Result<()> {
    let trace = monotonicity_trace(u, center, radii)?;
    println!("{label} at ({:.2}, {:.2})", center[0], center[1]);
    println!("  {:>8} {:>14} {:>14}", "r", "phi", "drift");
    for (k, r) in trace.radii.iter().enumerate() {
        let drift = if k == 0 { String::from("-") } else { format!("{:+.6e}", trace.drift[k - 1]) };
        println!("  {:>8.4} {:>+14.8} {:>14}", r, trace.phi[k], drift);
    }
    println!(
        "  monotonicity violation {:.2e}, drift identity defect {:.2e}\n",
        trace.monotonicity_violation(),
        trace.identity_defect()
    );
    Ok(())
}

fn main() -> uol::Result<()> {
    let spec = GridSpec::from_extent(-1.0, 1.0, -1.0, 1.0, 1.0 / 128.0)?;
    let h = spec.h;
    let radii: Vec<f64> = (0..4).map(|k| 8.0 * h * (1 << k) as f64).collect();

    let g = BoundaryData::Constant { value: 0.0 }.materialize(spec)?;
    let torsion = maximal_solution(&g, &ExtremalParams::for_spacing(h))?.u;
    print_trace("torsion function (a solution: phi non-decreasing)", &torsion, [0.0, 0.0], &radii)?;

    let cross = ScalarField::from_fn(spec, |p| p[0] * p[0] - p[1] * p[1])?;
    print_trace("harmonic quadratic (2-homogeneous: phi constant, drift 0)", &cross, [0.0, 0.0], &radii)?;

    // x1^3 is not a solution: the drift identity fails by the volume
    // coupling term; closed forms are phi(r) = -pi r^2/8 - 8r/15 and
    // drift = 5 pi (sigma^2 - rho^2)/8
    let cubic = ScalarField::from_fn(spec, |p| p[0].powi(3))?;
    print_trace("x1 cubed (not a solution: identity defect is real)", &cubic, [0.0, 0.0], &radii)?;
    Ok(())
}
