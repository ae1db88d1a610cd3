//! Artifact emission: content-hashed files, CSV traces, the PGM/SVG field
//! views. Everything written here is byte-deterministic for fixed inputs.

use std::fmt::Write as _;
use std::path::Path;

use serde::Serialize;
use sha2::{Digest, Sha256};

use crate::error::Result;
use crate::fb::FreeBoundary;
use crate::field::ScalarField;

#[derive(Debug, Clone, Serialize, serde::Deserialize)]
pub struct ArtifactEntry {
    /// Path relative to the run directory.
    pub path: String,
    pub sha256: String,
}

pub fn sha256_hex(bytes: &[u8]) -> String {
    let mut hasher = Sha256::new();
    hasher.update(bytes);
    let digest = hasher.finalize();
    let mut out = String::with_capacity(64);
    for b in digest {
        write!(out, "{b:02x}").unwrap();
    }
    out
}

pub fn write_artifact(dir: &Path, name: &str, bytes: &[u8]) -> Result<ArtifactEntry> {
    let path = dir.join(name);
    if let Some(parent) = path.parent() {
        std::fs::create_dir_all(parent)?;
    }
    std::fs::write(&path, bytes)?;
    Ok(ArtifactEntry {
        path: name.to_string(),
        sha256: sha256_hex(bytes),
    })
}

/// Fixed-precision float formatting so CSV artifacts hash identically across
/// runs.
pub fn fmt_f64(v: f64) -> String {
    format!("{v:.17e}")
}

pub fn csv_table(header: &str, rows: &[Vec<f64>]) -> Vec<u8> {
    let mut out = String::new();
    out.push_str(header);
    out.push('\n');
    for row in rows {
        let cells: Vec<String> = row.iter().map(|v| fmt_f64(*v)).collect();
        out.push_str(&cells.join(","));
        out.push('\n');
    }
    out.into_bytes()
}

/// CSV of free-boundary polylines: `polyline,vertex,x,y,grad_norm`.
pub fn fb_csv(fb: &FreeBoundary) -> Vec<u8> {
    let mut out = String::from("polyline,vertex,x,y,grad_norm\n");
    for (pi, pl) in fb.polylines.iter().enumerate() {
        for (vi, v) in pl.vertices.iter().enumerate() {
            out.push_str(&format!(
                "{pi},{vi},{},{},{}\n",
                fmt_f64(v.point[0]),
                fmt_f64(v.point[1]),
                fmt_f64(v.grad_norm)
            ));
        }
    }
    out.into_bytes()
}

/// Self-contained SVG: a coarse grayscale rendering of the field with the
/// zero-level contour overlaid when a free boundary is supplied.
pub fn field_svg(u: &ScalarField, fb: Option<&FreeBoundary>) -> Vec<u8> {
    let spec = u.spec();
    let ur = spec.upper_right();
    let (x0, y0) = (spec.origin[0], spec.origin[1]);
    let (w, hgt) = (ur[0] - x0, ur[1] - y0);
    let mut svg = String::new();
    let _ = write!(
        svg,
        "<svg xmlns=\"http://www.w3.org/2000/svg\" viewBox=\"{:.6} {:.6} {:.6} {:.6}\" width=\"640\" height=\"{:.0}\">\n",
        x0, -ur[1], w, hgt, 640.0 * hgt / w,
    );
    // flip y so the math orientation is preserved
    svg.push_str("<g transform=\"scale(1,-1)\">\n");

    let (lo, hi) = (u.min(), u.max());
    let span = if hi > lo { hi - lo } else { 1.0 };
    let blocks = 96usize.min(spec.nx - 1).min(spec.ny - 1);
    let bx = (spec.nx - 1) as f64 / blocks as f64;
    let by = (spec.ny - 1) as f64 / blocks as f64;
    for jb in 0..blocks {
        for ib in 0..blocks {
            let i = ((ib as f64 + 0.5) * bx).round() as usize;
            let j = ((jb as f64 + 0.5) * by).round() as usize;
            let t = (u.at(i.min(spec.nx - 1), j.min(spec.ny - 1)) - lo) / span;
            let shade = (t * 255.0).round().clamp(0.0, 255.0) as u8;
            let _ = write!(
                svg,
                "<rect x=\"{:.6}\" y=\"{:.6}\" width=\"{:.6}\" height=\"{:.6}\" fill=\"rgb({shade},{shade},{shade})\"/>\n",
                x0 + ib as f64 * bx * spec.h,
                y0 + jb as f64 * by * spec.h,
                bx * spec.h * 1.02,
                by * spec.h * 1.02,
            );
        }
    }
    if let Some(fb) = fb {
        for pl in &fb.polylines {
            let mut points = String::new();
            for v in &pl.vertices {
                let _ = write!(points, "{:.6},{:.6} ", v.point[0], v.point[1]);
            }
            let _ = write!(
                svg,
                "<polyline points=\"{}\" fill=\"none\" stroke=\"red\" stroke-width=\"{:.6}\"/>\n",
                points.trim_end(),
                w / 320.0,
            );
        }
    }
    svg.push_str("</g>\n</svg>\n");
    svg.into_bytes()
}
