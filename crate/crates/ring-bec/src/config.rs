//! File-driven run configuration with command-line overrides.

use crate::coupling::{CouplingError, CouplingParams};
use crate::grid::GridConfig;
use crate::potential::PotentialPair;
use crate::solver::{Geometry, SolveConfig};
use serde::{Deserialize, Serialize};
use std::path::PathBuf;

/// Coupling given either explicitly or through the canonical one-parameter
/// family `alpha = gamma = 1`, `beta = 2/epsilon - 1`.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(untagged)]
pub enum CouplingSpec {
    Explicit { alpha: f64, gamma: f64, beta: f64 },
    Epsilon { epsilon: f64 },
}

impl CouplingSpec {
    pub fn resolve(&self) -> Result<CouplingParams, CouplingError> {
        match *self {
            CouplingSpec::Explicit { alpha, gamma, beta } => {
                CouplingParams::new(alpha, gamma, beta)
            }
            CouplingSpec::Epsilon { epsilon } => CouplingParams::from_epsilon(epsilon),
        }
    }
}

#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct SolverSection {
    pub tol: f64,
    pub max_iter: usize,
    pub rescale: bool,
}

impl Default for SolverSection {
    fn default() -> Self {
        SolverSection {
            tol: 1e-11,
            max_iter: 60,
            rescale: true,
        }
    }
}

impl SolverSection {
    pub fn to_solve_config(self) -> SolveConfig {
        SolveConfig {
            tol: self.tol,
            max_iter: self.max_iter,
            rescale: self.rescale,
            ..SolveConfig::default()
        }
    }
}

/// Pass thresholds for the audited quantities.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct AuditTolerances {
    /// identity residuals on computed solutions
    pub identity: f64,
    /// soliton quadrature-constant identities
    pub profile_identity: f64,
    /// sup distance of the shooting profile from the closed form
    pub profile_sup: f64,
    /// |mass - 1| for normalized output
    pub mass: f64,
}

impl Default for AuditTolerances {
    fn default() -> Self {
        AuditTolerances {
            identity: 1e-3,
            profile_identity: 1e-8,
            profile_sup: 1e-6,
            mass: 1e-8,
        }
    }
}

fn default_theta() -> f64 {
    0.1
}

fn default_rel_window() -> (f64, f64) {
    (0.6, 1.5)
}

fn default_c0() -> f64 {
    1e-3
}

fn default_sweep_lambdas() -> Vec<f64> {
    vec![50.0, 100.0, 200.0, 400.0]
}

fn default_out_dir() -> PathBuf {
    PathBuf::from("out")
}

fn default_coupling() -> CouplingSpec {
    CouplingSpec::Epsilon { epsilon: 1e-4 }
}

fn default_potentials() -> PotentialPair {
    PotentialPair::zero()
}

#[derive(Debug, Clone, Copy, Serialize, Deserialize, PartialEq, Eq)]
#[serde(rename_all = "lowercase")]
pub enum Mode {
    Line,
    Radial,
}

impl Mode {
    pub fn geometry(self) -> Geometry {
        match self {
            Mode::Line => Geometry::Line,
            Mode::Radial => Geometry::Radial,
        }
    }
}

fn default_mode() -> Mode {
    Mode::Radial
}

/// One document configuring every pipeline; unknown fields are rejected.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    #[serde(default = "default_coupling")]
    pub coupling: CouplingSpec,
    #[serde(default = "default_potentials")]
    pub potentials: PotentialPair,
    #[serde(default)]
    pub grid: GridConfig,
    #[serde(default)]
    pub solver: SolverSection,
    #[serde(default = "default_theta")]
    pub theta: f64,
    #[serde(default = "default_mode")]
    pub mode: Mode,
    /// multiplier value for single-solve pipelines
    #[serde(default)]
    pub lambda: Option<f64>,
    /// explicit concentration radius, overriding the landscape pick
    #[serde(default)]
    pub radius: Option<f64>,
    /// absolute radius window override
    #[serde(default)]
    pub radius_window: Option<(f64, f64)>,
    #[serde(default = "default_rel_window")]
    pub rel_window: (f64, f64),
    #[serde(default = "default_c0")]
    pub c0: f64,
    #[serde(default = "default_sweep_lambdas")]
    pub sweep_lambdas: Vec<f64>,
    #[serde(default)]
    pub tolerances: AuditTolerances,
    #[serde(default = "default_out_dir")]
    pub out_dir: PathBuf,
}

impl Default for RunConfig {
    fn default() -> Self {
        serde_json::from_str("{}").expect("default config")
    }
}

impl RunConfig {
    pub fn from_json(text: &str) -> Result<Self, serde_json::Error> {
        serde_json::from_str(text)
    }
}
