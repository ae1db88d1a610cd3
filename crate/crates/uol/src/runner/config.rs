//! Experiment configuration: one JSON document per run, strict fields,
//! defaults applied at parse time so the report echo carries the full
//! effective configuration.

use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::boundary::BoundaryData;
use crate::error::{Error, Result};
use crate::fb::Normalization;
use crate::field::GridSpec;
use crate::variational::StartKind;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DomainConfig {
    pub origin: [f64; 2],
    pub size: [f64; 2],
    pub h: f64,
}

impl DomainConfig {
    pub fn grid(&self) -> Result<GridSpec> {
        GridSpec::from_extent(
            self.origin[0],
            self.origin[0] + self.size[0],
            self.origin[1],
            self.origin[1] + self.size[1],
            self.h,
        )
    }
}

/// Where a task gets its field from.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case", deny_unknown_fields)]
pub enum FieldSource {
    SolveMax,
    SolveMin,
    Minimize,
    SynthesizedCross {
        r_max: f64,
        #[serde(default = "default_order")]
        order: u8,
    },
}

fn default_order() -> u8 {
    1
}

fn default_theta_samples() -> usize {
    1000
}

fn default_solve_max() -> FieldSource {
    FieldSource::SolveMax
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SolverOverrides {
    #[serde(default)]
    pub fixed_point_tol: Option<f64>,
    #[serde(default)]
    pub outer_tol: Option<f64>,
    #[serde(default)]
    pub residual_tol: Option<f64>,
    #[serde(default)]
    pub max_iterations: Option<usize>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case", deny_unknown_fields)]
pub enum TaskConfig {
    SolveMax {
        #[serde(default)]
        solver: SolverOverrides,
    },
    SolveMin {
        #[serde(default)]
        solver: SolverOverrides,
    },
    Minimize {
        #[serde(default)]
        gradient_tol: Option<f64>,
        #[serde(default)]
        max_steps: Option<usize>,
        #[serde(default)]
        starts: Option<Vec<StartKind>>,
    },
    Monotonicity {
        #[serde(default = "default_solve_max")]
        source: FieldSource,
        centers: Vec<[f64; 2]>,
        radii: Vec<f64>,
    },
    Blowup {
        #[serde(default = "default_solve_max")]
        source: FieldSource,
        center: [f64; 2],
        radii: Vec<f64>,
        normalization: Normalization,
        /// Optional exploratory arc-angle fit at the given radii.
        #[serde(default)]
        fit_phi_radii: Option<Vec<f64>>,
    },
    CrossCheck {
        #[serde(default = "default_order")]
        order: u8,
        #[serde(default = "default_theta_samples")]
        theta_samples: usize,
    },
    InstabilityProbe {
        #[serde(default = "default_solve_max")]
        source: FieldSource,
        /// Probe center; when omitted the singular point nearest the domain
        /// center is detected and used.
        #[serde(default)]
        center: Option<[f64; 2]>,
        r1: f64,
        deltas: Vec<f64>,
    },
}

impl TaskConfig {
    pub fn name(&self) -> &'static str {
        match self {
            TaskConfig::SolveMax { .. } => "solve-max",
            TaskConfig::SolveMin { .. } => "solve-min",
            TaskConfig::Minimize { .. } => "minimize",
            TaskConfig::Monotonicity { .. } => "monotonicity",
            TaskConfig::Blowup { .. } => "blowup",
            TaskConfig::CrossCheck { .. } => "cross-check",
            TaskConfig::InstabilityProbe { .. } => "instability-probe",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub domain: DomainConfig,
    pub boundary: BoundaryData,
    pub task: TaskConfig,
    /// Output directory; when omitted, `$UOL_OUTPUT_ROOT/<task name>` is used.
    #[serde(default)]
    pub output_dir: Option<String>,
    #[serde(default)]
    pub seed: u64,
}

impl ExperimentConfig {
    pub fn from_json(text: &str) -> Result<Self> {
        let config: ExperimentConfig =
            serde_json::from_str(text).map_err(|e| Error::Config(e.to_string()))?;
        config.validate()?;
        Ok(config)
    }

    pub fn from_file(path: impl AsRef<Path>) -> Result<Self> {
        Self::from_json(&std::fs::read_to_string(path)?)
    }

    pub fn validate(&self) -> Result<()> {
        let grid = self.domain.grid()?;
        self.boundary.materialize(grid)?;
        match &self.task {
            TaskConfig::Monotonicity { centers, radii, .. } => {
                if centers.is_empty() {
                    return Err(Error::Config("monotonicity task: centers is empty".into()));
                }
                if radii.len() < 2 {
                    return Err(Error::Config(
                        "monotonicity task: radii needs at least two entries".into(),
                    ));
                }
                if !radii.windows(2).all(|w| w[1] > w[0]) {
                    return Err(Error::Config(
                        "monotonicity task: radii must be strictly increasing".into(),
                    ));
                }
            }
            TaskConfig::Blowup { radii, .. } => {
                if radii.is_empty() {
                    return Err(Error::Config("blowup task: radii is empty".into()));
                }
            }
            TaskConfig::InstabilityProbe { r1, deltas, .. } => {
                if !(*r1 > 0.0) {
                    return Err(Error::Config("instability-probe task: r1 must be positive".into()));
                }
                if deltas.is_empty()
                    || !deltas.iter().all(|d| (0.0..1.0).contains(d))
                    || !deltas.windows(2).all(|w| w[1] < w[0])
                {
                    return Err(Error::Config(
                        "instability-probe task: deltas must be a decreasing sequence in (0, 1)"
                            .into(),
                    ));
                }
            }
            TaskConfig::CrossCheck { order, .. } => {
                if *order > 1 {
                    return Err(Error::Config(format!(
                        "cross-check task: order {order} not supported (0 or 1)"
                    )));
                }
            }
            _ => {}
        }
        if let Some(FieldSource::SynthesizedCross { r_max, order }) = self.task_source() {
            if *order > 1 {
                return Err(Error::Config("synthesized-cross source: order must be 0 or 1".into()));
            }
            let c = grid.center();
            if c[0].abs() > 1e-9 || c[1].abs() > 1e-9 {
                return Err(Error::Config(
                    "synthesized-cross source needs an origin-centered domain".into(),
                ));
            }
            if !(*r_max > 0.0 && *r_max <= (-1.0f64).exp() + 1e-12) {
                return Err(Error::Config(
                    "synthesized-cross source: r_max must lie in (0, 1/e]".into(),
                ));
            }
        }
        Ok(())
    }

    pub fn task_source(&self) -> Option<&FieldSource> {
        match &self.task {
            TaskConfig::Monotonicity { source, .. }
            | TaskConfig::Blowup { source, .. }
            | TaskConfig::InstabilityProbe { source, .. } => Some(source),
            _ => None,
        }
    }
}
