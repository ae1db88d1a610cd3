//! Numerical laboratory for the unstable obstacle problem
//!
//! ```text
//! Δu = -χ_{u>0}
//! ```
//!
//! on rectangular planar domains. The sign of the right-hand side makes the
//! problem unstable: boundary data can admit several solutions, bracketed by
//! a pointwise maximal and a pointwise minimal one. This crate computes the
//! bracket, minimizes the associated energy
//!
//! ```text
//! E(v) = ∫ |∇v|² - 2 max(v, 0),
//! ```
//!
//! and provides the diagnostics used to study the free boundary ∂{u>0}:
//! scaled-energy (Weiss) traces, blow-up rescaling and classification,
//! non-degeneracy margins, second-variation probes, and the closed-form
//! asymptotic expansion of the conjectured cross singularity.
//!
//! The capability map:
//!
//! * [`field`] — grids, scalar fields, the 5-point Laplacian, a multigrid
//!   Poisson solver, bilinear interpolation, disc/circle quadrature, field I/O.
//! * [`boundary`] — Dirichlet data: a registry of closed forms plus file input.
//! * [`extremal`] — maximal/minimal solutions by monotone regularized iteration.
//! * [`variational`] — the energy, descent minimization, second variation,
//!   and the destabilizing probe around a singular point.
//! * [`fb`] — free-boundary extraction and analysis.
//! * [`cross`] — the cross-singularity expansion in closed form.
//! * [`runner`] — batch experiment driver behind the `uol` binary.
//!
//! Every operation is a pure function of immutable inputs; fixed seeds and
//! fixed sweep orderings make whole runs reproducible bit for bit.

pub mod boundary;
pub mod cross;
pub mod error;
pub mod extremal;
pub mod fb;
pub mod field;
pub mod runner;
pub mod variational;

pub use error::{Error, Result};
pub use field::{GridSpec, Point, ScalarField, VectorField};
