//! Computes the maximal/minimal solution bracket for several boundary data
//! and prints center values, residuals, and the pointwise ordering.

use uol::boundary::BoundaryData;
use uol::extremal::{maximal_solution, minimal_solution, ExtremalParams};
use uol::field::GridSpec;

fn main() -> uol::Result<()> {
    let spec = GridSpec::from_extent(-1.0, 1.0, -1.0, 1.0, 1.0 / 128.0)?;
    let params = ExtremalParams::for_spacing(spec.h);
    println!("domain [-1,1]^2, h = 1/128, eps schedule of {} stages\n", params.epsilon_schedule.len());

    for data in [
        BoundaryData::Constant { value: 0.0 },
        BoundaryData::Constant { value: -1.0 },
        BoundaryData::Quadratic { a: 0.4, b: 0.1, c: 0.0, d: -0.05 },
        BoundaryData::PulseTrace,
    ] {
        let g = data.materialize(spec)?;
        let hi = maximal_solution(&g, &params)?;
        let lo = minimal_solution(&g, &params)?;
        let gap = hi.u.sup_abs_diff(&lo.u)?;
        let order = lo.u.sup_diff(&hi.u)?; // > 0 would violate the bracket
        let c = (spec.nx - 1) / 2;
        println!("{data:?}");
        println!(
            "  maximal: u(0,0) = {:+.6}, range [{:+.4}, {:+.4}], residual {:.2e}, {} iterations",
            hi.u.at(c, c),
            hi.u.min(),
            hi.u.max(),
            hi.pde_residual,
            hi.iterations.iter().map(|s| s.iterations).sum::<usize>(),
        );
        println!(
            "  minimal: u(0,0) = {:+.6}, range [{:+.4}, {:+.4}], residual {:.2e}",
            lo.u.at(c, c),
            lo.u.min(),
            lo.u.max(),
            lo.pde_residual,
        );
        println!("  bracket width sup|max-min| = {gap:.3e}, ordering defect {order:.1e}\n");
    }
    Ok(())
}
