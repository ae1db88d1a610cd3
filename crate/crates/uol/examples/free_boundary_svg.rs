//! Extracts the free boundary of the maximal solution for pulse-trace data
//! (a circle of radius one) and writes the field views and polyline CSV into
//! ./uol-runs/free-boundary/.

use std::path::Path;

use uol::boundary::BoundaryData;
use uol::extremal::{maximal_solution, ExtremalParams};
use uol::fb::{extract_free_boundary, nondegeneracy_check, nondegeneracy_slack};
use uol::field::GridSpec;
use uol::runner::{fb_csv, field_svg, write_artifact};

fn main() -> uol::Result<()> {
    let spec = GridSpec::from_extent(-1.5, 1.5, -1.5, 1.5, 1.0 / 128.0)?;
    let g = BoundaryData::PulseTrace.materialize(spec)?;
    let report = maximal_solution(&g, &ExtremalParams::for_spacing(spec.h))?;
    let fb = extract_free_boundary(&report.u);
    println!(
        "free boundary: {} polylines, {} vertices, total length {:.5} (circle of radius 1 has 2π = {:.5})",
        fb.polylines.len(),
        fb.vertex_count(),
        fb.total_length(),
        std::f64::consts::TAU,
    );

    // shell margins at a zero of the solution
    if let Some(v) = fb.vertices().next() {
        let radii = [8.0 * spec.h, 16.0 * spec.h, 32.0 * spec.h];
        for m in nondegeneracy_check(&report.u, v.point, &radii)? {
            println!(
                "  shell r = {:.4}: min u = {:+.5}, margin {:+.5} (slack {:+.5})",
                m.r,
                m.shell_min,
                m.margin,
                nondegeneracy_slack(m.r, spec.h)
            );
        }
    }

    let dir = Path::new("uol-runs/free-boundary");
    std::fs::create_dir_all(dir)?;
    write_artifact(dir, "field.svg", &field_svg(&report.u, Some(&fb)))?;
    write_artifact(dir, "free_boundary.csv", &fb_csv(&fb))?;
    report.u.save_pgm(dir.join("field.pgm"))?;
    report.u.save(dir.join("field.uol"))?;
    println!("wrote field.svg, free_boundary.csv, field.pgm, field.uol to {}", dir.display());
    Ok(())
}
