//! The frequency defect on harmonic fields and the gradient-growth check at
//! critical points.

use uol::fb::{chemin_bound_check, frequency_defect};
use uol::field::{GridSpec, ScalarField};

fn main() -> uol::Result<()> {
    let spec = GridSpec::from_extent(-1.1, 1.1, -1.1, 1.1, 2.2 / 564.0)?;

    println!("frequency defect  int |grad w|^2 - alpha int_circle w^2  (>= 0, = 0 iff alpha-homogeneous)");
    let cases: [(&str, u32, fn([f64; 2]) -> f64); 3] = [
        ("x1^2 - x2^2, alpha 2 (equality case)", 2, |p| p[0] * p[0] - p[1] * p[1]),
        ("Re z^3,      alpha 2 (defect pi)", 2, |p| p[0].powi(3) - 3.0 * p[0] * p[1] * p[1]),
        ("Re z^3,      alpha 3 (equality case)", 3, |p| p[0].powi(3) - 3.0 * p[0] * p[1] * p[1]),
    ];
    for (label, alpha, f) in cases {
        let w = ScalarField::from_fn(spec, f)?;
        let d = frequency_defect(&w, alpha)?;
        println!("  {label:<40} defect {:+.6e}  warnings {:?}", d.value, d.warnings);
    }

    println!("\ngradient growth |grad u| / (|x| log(1/|x|)) at a critical point");
    let spec = GridSpec::from_extent(-1.0, 1.0, -1.0, 1.0, 1.0 / 128.0)?;
    let radii = [0.0625, 0.125, 0.25, 0.5];
    let growth_cases: [(&str, fn([f64; 2]) -> f64); 2] = [
        ("harmonic quadratic (bounded ratio)", |p| p[0] * p[0] - p[1] * p[1]),
        ("|x| cone (ratio diverges)", |p| (p[0] * p[0] + p[1] * p[1]).sqrt()),
    ];
    for (label, f) in growth_cases {
        let u = ScalarField::from_fn(spec, f)?;
        let rep = chemin_bound_check(&u, [0.0, 0.0], &radii)?;
        println!("  {label}");
        for (r, s) in &rep.per_radius {
            println!("    r = {r:<7} sup ratio {s:.4}");
        }
        println!("    log-log slope {:+.3} -> diverging: {}", rep.slope, rep.diverging);
    }
    Ok(())
}
