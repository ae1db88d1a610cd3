//! Dirichlet boundary data: a dense per-node container plus a registry of
//! closed-form traces (constant, quadratic, stationary pulse, cross
//! expansion) and a plain-text file format of `node_index value` lines.

use std::collections::BTreeMap;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::cross::CrossExpansion;
use crate::error::{Error, Result};
use crate::fb::pulse;
use crate::field::{GridSpec, Point, ScalarField};

/// Dirichlet values on the boundary ring of a grid. Stored dense; interior
/// entries are ignored.
#[derive(Debug, Clone, PartialEq)]
pub struct BoundaryValues {
    spec: GridSpec,
    values: Vec<f64>,
}

impl BoundaryValues {
    pub fn constant(spec: GridSpec, c: f64) -> Self {
        BoundaryValues {
            spec,
            values: vec![c; spec.len()],
        }
    }

    pub fn from_fn(spec: GridSpec, f: impl Fn(Point) -> f64) -> Self {
        let mut values = vec![0.0; spec.len()];
        for (i, j) in spec.boundary_indices() {
            values[spec.idx(i, j)] = f(spec.node(i, j));
        }
        BoundaryValues { spec, values }
    }

    /// Restricts a field to its boundary ring.
    pub fn from_field(u: &ScalarField) -> Self {
        BoundaryValues {
            spec: *u.spec(),
            values: u.values().to_vec(),
        }
    }

    /// Parses `node_index value` pairs, one per line; `#`-lines are comments.
    /// Every boundary node of `spec` must be assigned.
    pub fn from_file(spec: GridSpec, path: impl AsRef<Path>) -> Result<Self> {
        let text = std::fs::read_to_string(&path)?;
        let mut assigned: BTreeMap<usize, f64> = BTreeMap::new();
        for (line_no, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let mut parts = line.split_whitespace();
            let parse = |s: Option<&str>, what: &str| -> Result<String> {
                s.map(str::to_string).ok_or_else(|| {
                    Error::Config(format!("line {}: missing {what}", line_no + 1))
                })
            };
            let idx: usize = parse(parts.next(), "node index")?
                .parse()
                .map_err(|e| Error::Config(format!("line {}: bad node index ({e})", line_no + 1)))?;
            let value: f64 = parse(parts.next(), "value")?
                .parse()
                .map_err(|e| Error::Config(format!("line {}: bad value ({e})", line_no + 1)))?;
            if !value.is_finite() {
                return Err(Error::NonFinite { context: "boundary file value" });
            }
            if idx >= spec.len() {
                return Err(Error::Config(format!(
                    "line {}: node index {idx} outside grid of {} nodes",
                    line_no + 1,
                    spec.len()
                )));
            }
            assigned.insert(idx, value);
        }
        let mut values = vec![0.0; spec.len()];
        for (i, j) in spec.boundary_indices() {
            let k = spec.idx(i, j);
            match assigned.get(&k) {
                Some(v) => values[k] = *v,
                None => {
                    return Err(Error::Config(format!(
                        "boundary node {k} (grid position {i},{j}) not assigned in file"
                    )))
                }
            }
        }
        Ok(BoundaryValues { spec, values })
    }

    pub fn spec(&self) -> &GridSpec {
        &self.spec
    }

    pub fn check_spec(&self, spec: &GridSpec) -> Result<()> {
        if self.spec != *spec {
            return Err(Error::GridMismatch);
        }
        Ok(())
    }

    pub fn at(&self, i: usize, j: usize) -> f64 {
        self.values[self.spec.idx(i, j)]
    }

    /// Writes the ring values into a field.
    pub fn apply(&self, u: &mut ScalarField) -> Result<()> {
        self.check_spec(u.spec())?;
        for (i, j) in self.spec.boundary_indices() {
            u.set(i, j, self.at(i, j));
        }
        Ok(())
    }

    pub fn sup_abs(&self) -> f64 {
        self.spec
            .boundary_indices()
            .iter()
            .fold(0.0, |m, (i, j)| m.max(self.at(*i, *j).abs()))
    }
}

/// Closed-form boundary data registry, plus file input.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case", deny_unknown_fields)]
pub enum BoundaryData {
    Constant {
        value: f64,
    },
    /// `a(x₁²-x₂²) + 2b·x₁x₂ + c(x₁²+x₂²) + d`
    Quadratic {
        a: f64,
        b: f64,
        #[serde(default)]
        c: f64,
        #[serde(default)]
        d: f64,
    },
    /// Trace of the stationary pulse.
    PulseTrace,
    /// Trace of the truncated cross expansion (canonical coefficients).
    CrossTrace {
        #[serde(default = "default_cross_order")]
        order: u8,
    },
    File {
        path: String,
    },
}

fn default_cross_order() -> u8 {
    1
}

impl BoundaryData {
    pub fn materialize(&self, spec: GridSpec) -> Result<BoundaryValues> {
        match self {
            BoundaryData::Constant { value } => {
                if !value.is_finite() {
                    return Err(Error::NonFinite { context: "constant boundary value" });
                }
                Ok(BoundaryValues::constant(spec, *value))
            }
            BoundaryData::Quadratic { a, b, c, d } => Ok(BoundaryValues::from_fn(spec, |p| {
                a * (p[0] * p[0] - p[1] * p[1]) + 2.0 * b * p[0] * p[1]
                    + c * (p[0] * p[0] + p[1] * p[1])
                    + d
            })),
            BoundaryData::PulseTrace => Ok(BoundaryValues::from_fn(spec, pulse::pulse)),
            BoundaryData::CrossTrace { order } => {
                let e = if *order == 0 {
                    CrossExpansion::canonical_order0()
                } else {
                    CrossExpansion::canonical()
                };
                // eval() refuses radii beyond 1/e, so probe the corners first
                // to produce a config-level diagnostic
                let ur = spec.upper_right();
                let corner = ur[0]
                    .abs()
                    .max(spec.origin[0].abs())
                    .hypot(ur[1].abs().max(spec.origin[1].abs()));
                if corner > (-1.0f64).exp() {
                    return Err(Error::Config(format!(
                        "cross-trace boundary needs the grid inside the disc of radius 1/e; corner radius is {corner:.4}"
                    )));
                }
                let mut values = vec![0.0; spec.len()];
                for (i, j) in spec.boundary_indices() {
                    values[spec.idx(i, j)] = e.eval(spec.node(i, j))?;
                }
                Ok(BoundaryValues { spec, values })
            }
            BoundaryData::File { path } => BoundaryValues::from_file(spec, path),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn spec() -> GridSpec {
        GridSpec::from_extent(-1.0, 1.0, -1.0, 1.0, 0.25).unwrap()
    }

    #[test]
    fn constant_and_quadratic_traces() {
        let bv = BoundaryData::Constant { value: 2.5 }.materialize(spec()).unwrap();
        assert_eq!(bv.at(0, 0), 2.5);
        assert_eq!(bv.at(4, 8), 2.5);

        let q = BoundaryData::Quadratic { a: 1.0, b: 0.0, c: 0.0, d: 0.5 }
            .materialize(spec())
            .unwrap();
        // corner (-1,-1): x² - y² = 0, plus d
        assert!((q.at(0, 0) - 0.5).abs() < 1e-15);
        // midpoint of the bottom edge (0,-1): -1 + 0.5
        assert!((q.at(4, 0) + 0.5).abs() < 1e-15);
    }

    #[test]
    fn pulse_trace_matches_closed_form() {
        let bv = BoundaryData::PulseTrace.materialize(spec()).unwrap();
        let corner = spec().node(0, 0);
        assert!((bv.at(0, 0) - pulse::pulse(corner)).abs() < 1e-15);
    }

    #[test]
    fn cross_trace_requires_small_domains() {
        assert!(BoundaryData::CrossTrace { order: 1 }.materialize(spec()).is_err());
        let small = GridSpec::centered(17, 0.03125).unwrap(); // corner 0.354 < 1/e
        let bv = BoundaryData::CrossTrace { order: 1 }.materialize(small).unwrap();
        assert!(bv.sup_abs() > 0.0);
    }

    #[test]
    fn file_round_trip_and_diagnostics() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("bv.txt");
        let g = spec();
        let mut lines = String::from("# boundary data\n");
        for (i, j) in g.boundary_indices() {
            lines.push_str(&format!("{} {}\n", g.idx(i, j), 0.125 * i as f64));
        }
        std::fs::write(&path, &lines).unwrap();
        let bv = BoundaryValues::from_file(g, &path).unwrap();
        assert_eq!(bv.at(4, 0), 0.5);

        // missing node
        let path2 = dir.path().join("missing.txt");
        std::fs::write(&path2, "0 1.0\n").unwrap();
        let err = BoundaryValues::from_file(g, &path2).unwrap_err();
        assert!(err.to_string().contains("not assigned"));

        // malformed value
        let path3 = dir.path().join("bad.txt");
        std::fs::write(&path3, "0 zero\n").unwrap();
        let err = BoundaryValues::from_file(g, &path3).unwrap_err();
        assert!(err.to_string().contains("bad value"));
    }

    #[test]
    fn apply_writes_only_the_ring() {
        let g = spec();
        let bv = BoundaryValues::constant(g, 7.0);
        let mut u = ScalarField::zeros(g);
        bv.apply(&mut u).unwrap();
        assert_eq!(u.at(0, 0), 7.0);
        assert_eq!(u.at(4, 4), 0.0);
    }
}
