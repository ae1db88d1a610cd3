//! Second-variation probe of the synthesized cross field: sweeps the
//! two-scale perturbations w_delta and tabulates the Dirichlet part, the
//! free-boundary term, and the total against delta.

use uol::cross::{synthesize_cross_field, CrossExpansion};
use uol::fb::{default_singular_threshold, extract_free_boundary, singular_points};
use uol::field::GridSpec;
use uol::variational::instability_probe;

fn main() -> uol::Result<()> {
    let h = 0.5 / 512.0;
    let spec = GridSpec::centered(513, h)?;
    let e = CrossExpansion::canonical();
    let u = synthesize_cross_field(&e, spec, (-1.0f64).exp())?;

    let fb = extract_free_boundary(&u);
    let tau = default_singular_threshold(&u);
    let centers = singular_points(&u, &fb, tau);
    println!("free boundary: {} polylines, {} vertices", fb.polylines.len(), fb.vertex_count());
    println!("singular points: {centers:?}");
    let x1 = centers.first().copied().unwrap_or([0.0, 0.0]);

    let r1 = 0.24;
    let deltas: Vec<f64> = (2..=6).map(|k| 0.5f64.powi(k)).collect();
    let samples = instability_probe(&u, x1, r1, &deltas)?;
    println!("\nprobe at x1 = [{:.4}, {:.4}], r1 = {r1}", x1[0], x1[1]);
    println!("{:>10} {:>12} {:>12} {:>12}", "delta", "dirichlet", "boundary", "total");
    for s in &samples {
        println!(
            "{:>10.6} {:>12.6} {:>12.6} {:>12.6}",
            s.delta, s.value.dirichlet, s.value.boundary, s.value.total
        );
    }
    Ok(())
}
