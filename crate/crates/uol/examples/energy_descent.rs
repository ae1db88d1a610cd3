//! Minimizes the energy from every registered start and compares the
//! descent minimum against the maximal solution.

use uol::boundary::BoundaryData;
use uol::extremal::{maximal_solution, ExtremalParams};
use uol::field::GridSpec;
use uol::variational::{energy, minimize_energy_traced, DescentParams};

fn main() -> uol::Result<()> {
    let spec = GridSpec::from_extent(-1.0, 1.0, -1.0, 1.0, 1.0 / 64.0)?;
    let g = BoundaryData::Constant { value: 0.0 }.materialize(spec)?;

    let outcome = minimize_energy_traced(&g, &DescentParams::default())?;
    println!("start            energy        steps");
    for run in &outcome.runs {
        println!("{:<16} {:+.8}  {:>6}", run.name, run.energy.total, run.steps);
    }
    println!(
        "\nbest start: {} with E = {:+.8} (dirichlet {:.6}, bulk {:.6})",
        outcome.best_start, outcome.energy.total, outcome.energy.dirichlet, outcome.energy.bulk
    );

    let maximal = maximal_solution(&g, &ExtremalParams::for_spacing(spec.h))?;
    let e_max = energy(&maximal.u).total;
    println!("maximal solution energy: {e_max:+.8}");
    println!("difference: {:.2e}", (outcome.energy.total - e_max).abs());
    Ok(())
}
