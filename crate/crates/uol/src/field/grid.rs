use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// A point in the plane.
pub type Point = [f64; 2];

/// Uniform axis-aligned grid: `nx × ny` nodes spaced `h` apart, lower-left
/// node at `origin`. Physical extent is `(nx-1)·h` by `(ny-1)·h`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GridSpec {
    pub nx: usize,
    pub ny: usize,
    pub h: f64,
    pub origin: Point,
}

impl GridSpec {
    pub fn new(nx: usize, ny: usize, h: f64, origin: Point) -> Result<Self> {
        if nx < 3 || ny < 3 {
            return Err(Error::InvalidGrid(format!(
                "need at least 3 nodes per axis, got {nx}×{ny}"
            )));
        }
        if !(h > 0.0) || !h.is_finite() {
            return Err(Error::InvalidGrid(format!("spacing must be positive, got {h}")));
        }
        if !origin[0].is_finite() || !origin[1].is_finite() {
            return Err(Error::InvalidGrid("origin must be finite".into()));
        }
        Ok(GridSpec { nx, ny, h, origin })
    }

    /// Square grid of `n × n` nodes centered at the origin. `n` should be odd
    /// so that the origin is a node and mirrored nodes pair up exactly.
    pub fn centered(n: usize, h: f64) -> Result<Self> {
        let half = (n - 1) as f64 / 2.0 * h;
        GridSpec::new(n, n, h, [-half, -half])
    }

    /// Grid covering `[x0, x1] × [y0, y1]`; the spacing must divide both side
    /// lengths to within round-off.
    pub fn from_extent(x0: f64, x1: f64, y0: f64, y1: f64, h: f64) -> Result<Self> {
        let steps = |a: f64, b: f64| -> Result<usize> {
            let n = (b - a) / h;
            let rounded = n.round();
            if (n - rounded).abs() > 1e-9 * n.abs().max(1.0) || rounded < 2.0 {
                return Err(Error::InvalidGrid(format!(
                    "h = {h} does not divide the extent [{a}, {b}]"
                )));
            }
            Ok(rounded as usize)
        };
        GridSpec::new(steps(x0, x1)? + 1, steps(y0, y1)? + 1, h, [x0, y0])
    }

    #[inline]
    pub fn len(&self) -> usize {
        self.nx * self.ny
    }

    #[inline]
    pub fn is_empty(&self) -> bool {
        false
    }

    #[inline]
    pub fn idx(&self, i: usize, j: usize) -> usize {
        debug_assert!(i < self.nx && j < self.ny);
        j * self.nx + i
    }

    /// Coordinates of node `(i, j)`. Computed as an offset from the grid
    /// center so that mirrored indices produce exactly mirrored coordinates
    /// on symmetric grids.
    #[inline]
    pub fn node(&self, i: usize, j: usize) -> Point {
        let cx = (self.nx - 1) as f64 / 2.0;
        let cy = (self.ny - 1) as f64 / 2.0;
        let center = self.center();
        [
            center[0] + (i as f64 - cx) * self.h,
            center[1] + (j as f64 - cy) * self.h,
        ]
    }

    #[inline]
    pub fn center(&self) -> Point {
        [
            self.origin[0] + (self.nx - 1) as f64 / 2.0 * self.h,
            self.origin[1] + (self.ny - 1) as f64 / 2.0 * self.h,
        ]
    }

    pub fn upper_right(&self) -> Point {
        [
            self.origin[0] + (self.nx - 1) as f64 * self.h,
            self.origin[1] + (self.ny - 1) as f64 * self.h,
        ]
    }

    #[inline]
    pub fn is_boundary(&self, i: usize, j: usize) -> bool {
        i == 0 || j == 0 || i == self.nx - 1 || j == self.ny - 1
    }

    pub fn contains(&self, p: Point) -> bool {
        let ur = self.upper_right();
        p[0] >= self.origin[0] && p[0] <= ur[0] && p[1] >= self.origin[1] && p[1] <= ur[1]
    }

    /// Distance from `p` to the boundary of the extent (negative outside).
    pub fn clearance(&self, p: Point) -> f64 {
        let ur = self.upper_right();
        let dx = (p[0] - self.origin[0]).min(ur[0] - p[0]);
        let dy = (p[1] - self.origin[1]).min(ur[1] - p[1]);
        dx.min(dy)
    }

    pub fn interior_indices(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        let nx = self.nx;
        let ny = self.ny;
        (1..ny - 1).flat_map(move |j| (1..nx - 1).map(move |i| (i, j)))
    }

    pub fn boundary_indices(&self) -> Vec<(usize, usize)> {
        let mut out = Vec::with_capacity(2 * self.nx + 2 * self.ny - 4);
        for i in 0..self.nx {
            out.push((i, 0));
        }
        for j in 1..self.ny - 1 {
            out.push((0, j));
            out.push((self.nx - 1, j));
        }
        for i in 0..self.nx {
            out.push((i, self.ny - 1));
        }
        out
    }
}

/// Grid-sampled real function, row-major node values. The central state
/// object of the crate.
#[derive(Debug, Clone, PartialEq)]
pub struct ScalarField {
    spec: GridSpec,
    values: Vec<f64>,
}

impl ScalarField {
    pub fn zeros(spec: GridSpec) -> Self {
        ScalarField {
            spec,
            values: vec![0.0; spec.len()],
        }
    }

    pub fn constant(spec: GridSpec, c: f64) -> Result<Self> {
        if !c.is_finite() {
            return Err(Error::NonFinite { context: "constant field" });
        }
        Ok(ScalarField {
            spec,
            values: vec![c; spec.len()],
        })
    }

    pub fn from_values(spec: GridSpec, values: Vec<f64>) -> Result<Self> {
        if values.len() != spec.len() {
            return Err(Error::InvalidGrid(format!(
                "value count {} does not match grid {}×{}",
                values.len(),
                spec.nx,
                spec.ny
            )));
        }
        if !values.iter().all(|v| v.is_finite()) {
            return Err(Error::NonFinite { context: "field values" });
        }
        Ok(ScalarField { spec, values })
    }

    pub fn from_fn(spec: GridSpec, f: impl Fn(Point) -> f64) -> Result<Self> {
        let mut values = Vec::with_capacity(spec.len());
        for j in 0..spec.ny {
            for i in 0..spec.nx {
                values.push(f(spec.node(i, j)));
            }
        }
        ScalarField::from_values(spec, values)
    }

    #[inline]
    pub fn spec(&self) -> &GridSpec {
        &self.spec
    }

    #[inline]
    pub fn values(&self) -> &[f64] {
        &self.values
    }

    #[inline]
    pub fn at(&self, i: usize, j: usize) -> f64 {
        self.values[self.spec.idx(i, j)]
    }

    #[inline]
    pub fn set(&mut self, i: usize, j: usize, v: f64) {
        let k = self.spec.idx(i, j);
        self.values[k] = v;
    }

    pub(crate) fn values_mut(&mut self) -> &mut [f64] {
        &mut self.values
    }

    pub fn norm_inf(&self) -> f64 {
        self.values.iter().fold(0.0, |m, v| m.max(v.abs()))
    }

    pub fn min(&self) -> f64 {
        self.values.iter().fold(f64::INFINITY, |m, v| m.min(*v))
    }

    pub fn max(&self) -> f64 {
        self.values.iter().fold(f64::NEG_INFINITY, |m, v| m.max(*v))
    }

    /// Largest pointwise difference `self - other`.
    pub fn sup_diff(&self, other: &ScalarField) -> Result<f64> {
        self.check_same_spec(other)?;
        Ok(self
            .values
            .iter()
            .zip(&other.values)
            .fold(f64::NEG_INFINITY, |m, (a, b)| m.max(a - b)))
    }

    pub fn sup_abs_diff(&self, other: &ScalarField) -> Result<f64> {
        self.check_same_spec(other)?;
        Ok(self
            .values
            .iter()
            .zip(&other.values)
            .fold(0.0, |m, (a, b)| m.max((a - b).abs())))
    }

    pub fn check_same_spec(&self, other: &ScalarField) -> Result<()> {
        if self.spec != other.spec {
            return Err(Error::GridMismatch);
        }
        Ok(())
    }

    pub fn try_add(&self, other: &ScalarField) -> Result<ScalarField> {
        self.check_same_spec(other)?;
        let values = self
            .values
            .iter()
            .zip(&other.values)
            .map(|(a, b)| a + b)
            .collect();
        ScalarField::from_values(self.spec, values)
    }

    pub fn try_sub(&self, other: &ScalarField) -> Result<ScalarField> {
        self.check_same_spec(other)?;
        let values = self
            .values
            .iter()
            .zip(&other.values)
            .map(|(a, b)| a - b)
            .collect();
        ScalarField::from_values(self.spec, values)
    }

    pub fn scaled(&self, c: f64) -> Result<ScalarField> {
        ScalarField::from_values(self.spec, self.values.iter().map(|v| c * v).collect())
    }
}

/// Two real components per node, same composability rules as [`ScalarField`].
/// Holds discrete gradients.
#[derive(Debug, Clone, PartialEq)]
pub struct VectorField {
    spec: GridSpec,
    xs: Vec<f64>,
    ys: Vec<f64>,
}

impl VectorField {
    pub fn from_components(spec: GridSpec, xs: Vec<f64>, ys: Vec<f64>) -> Result<Self> {
        if xs.len() != spec.len() || ys.len() != spec.len() {
            return Err(Error::InvalidGrid("component length mismatch".into()));
        }
        if !xs.iter().chain(ys.iter()).all(|v| v.is_finite()) {
            return Err(Error::NonFinite { context: "vector field components" });
        }
        Ok(VectorField { spec, xs, ys })
    }

    #[inline]
    pub fn spec(&self) -> &GridSpec {
        &self.spec
    }

    #[inline]
    pub fn at(&self, i: usize, j: usize) -> [f64; 2] {
        let k = self.spec.idx(i, j);
        [self.xs[k], self.ys[k]]
    }

    pub fn xs(&self) -> &[f64] {
        &self.xs
    }

    pub fn ys(&self) -> &[f64] {
        &self.ys
    }
}
