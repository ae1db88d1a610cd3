//! Free-boundary diagnostics: the stationary pulse and its comparison
//! constants, shell non-degeneracy margins, the scaled-energy monotonicity
//! trace, blow-up rescaling and classification, rotation fits, zero-set
//! extraction with singular-point detection, the frequency defect, and the
//! gradient-growth check at critical points.

mod blowup;
mod chemin;
mod frequency;
mod isoline;
mod nondeg;
pub mod pulse;
mod weiss;

pub use blowup::{
    blowup, classify_phi_trend, rotation_fit, shell_norm, BlowupFit, Normalization, Regime,
    RotationFit,
};
pub use chemin::{chemin_bound_check, CheminReport};
pub use frequency::{frequency_defect, FrequencyDefect};
pub use isoline::{
    arc_tangent_angles, default_singular_threshold, extract_free_boundary, singular_points,
    FbVertex, FreeBoundary, Polyline,
};
pub use nondeg::{nondegeneracy_check, nondegeneracy_slack, ShellMargin};
pub use weiss::{monotonicity_trace, weiss_phi, MonotonicityTrace};
