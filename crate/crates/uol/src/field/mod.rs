//! Structured rectangular grids and the primitive operations every other
//! module builds on: scalar/vector fields, the discrete Laplacian and
//! gradient, bilinear interpolation, a Dirichlet Poisson solver, and
//! disc/circle quadrature over interpolated values.

mod grid;
mod io;
mod ops;
mod poisson;
mod quad;

pub use grid::{GridSpec, Point, ScalarField, VectorField};
pub use ops::{gradient, interpolate, interpolate_gradient, laplacian};
pub use poisson::{poisson_solve, poisson_solve_into, LinearSolveParams};
pub use quad::{ball_integral, circle_integral, disc_quadrature, shell_quadrature};
