//! Multiplier sweeps: solve, audit and run the reduction diagnostics over a
//! sequence of multiplier values, then fit the scaling laws.

use crate::audit::{self, AuditError};
use crate::coupling::CouplingParams;
use crate::grid::{GridConfig, RadialGrid};
use crate::landscape::{Landscape, LandscapeError};
use crate::normalize::count_branches;
use crate::potential::PotentialPair;
use crate::profile::ProfileConstants;
use crate::reduction::{ReductionEngine, ReductionError};
use crate::solver::{Geometry, SolveConfig, SolveError, System};
use serde::Serialize;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum SweepError {
    #[error("landscape: {0}")]
    Landscape(#[from] LandscapeError),
    #[error("solver at lambda = {lambda}: {source}")]
    Solve {
        lambda: f64,
        #[source]
        source: SolveError,
    },
    #[error("reduction at lambda = {lambda}: {source}")]
    Reduction {
        lambda: f64,
        #[source]
        source: ReductionError,
    },
    #[error("audit at lambda = {lambda}: {source}")]
    Audit {
        lambda: f64,
        #[source]
        source: AuditError,
    },
}

#[derive(Debug, Clone, Copy)]
pub struct SweepConfig {
    pub grid: GridConfig,
    pub solve: SolveConfig,
    pub rel_window: (f64, f64),
    pub c0: f64,
    pub contraction_tol: f64,
    /// run the coercivity estimate (inverse iteration) at each point
    pub with_coercivity: bool,
    /// multiplier value at which `grid.points_per_width` applies; larger
    /// multipliers get proportionally more nodes per width (square-root
    /// growth), so the fixed-order quadrature bias of the audited integrals
    /// shrinks along the sweep instead of flooring the measured ratios
    pub resolution_reference: Option<f64>,
}

impl Default for SweepConfig {
    fn default() -> Self {
        SweepConfig {
            grid: GridConfig::default(),
            solve: SolveConfig::default(),
            rel_window: (0.6, 1.5),
            c0: 1e-3,
            contraction_tol: 1e-12,
            with_coercivity: true,
            resolution_reference: Some(50.0),
        }
    }
}

/// Everything measured at one multiplier value.
#[derive(Debug, Clone, Serialize)]
pub struct SweepPoint {
    pub lambda: f64,
    pub y: f64,
    pub r_peak: f64,
    pub peak_offset: f64,
    pub iterations: usize,
    pub energy_residual: f64,
    pub virial_residual: f64,
    pub kinetic_ratio: f64,
    pub quartic_ratio: f64,
    pub quartic_over_kinetic: f64,
    pub potential_moment_ratio: f64,
    pub mass_ratio: f64,
    pub m_prime_abs: f64,
    pub decay_rate: f64,
    pub l_norm: f64,
    pub omega_norm: f64,
    pub coercivity: f64,
    pub coercivity_iterations: usize,
    pub max_contraction_ratio: f64,
    pub b1: f64,
    pub b2: f64,
    pub reduced_value: f64,
    pub cross_method_distance: f64,
    pub branches: usize,
}

/// Fitted log-log slopes against the multiplier.
#[derive(Debug, Clone, Serialize)]
pub struct SweepSlopes {
    pub m_prime_slope: f64,
    pub l_norm_slope: f64,
    pub omega_norm_slope: f64,
    pub peak_offset_slope: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct SweepResult {
    pub points: Vec<SweepPoint>,
    pub slopes: SweepSlopes,
}

/// Least-squares slope of `ln y` against `ln x`; NaN when any sample is
/// not positive.
pub fn log_slope(samples: &[(f64, f64)]) -> f64 {
    if samples.iter().any(|&(x, y)| x <= 0.0 || y <= 0.0) {
        return f64::NAN;
    }
    let n = samples.len() as f64;
    let (mut sx, mut sy, mut sxx, mut sxy) = (0.0, 0.0, 0.0, 0.0);
    for &(x, y) in samples {
        let lx = x.ln();
        let ly = y.ln();
        sx += lx;
        sy += ly;
        sxx += lx * lx;
        sxy += lx * ly;
    }
    (n * sxy - sx * sy) / (n * sxx - sx * sx)
}

/// Run the full pipeline at each multiplier value, ascending order.
pub fn run_sweep(
    coupling: &CouplingParams,
    potentials: &PotentialPair,
    lambdas: &[f64],
    constants: &ProfileConstants,
    config: &SweepConfig,
) -> Result<SweepResult, SweepError> {
    let mut points = Vec::with_capacity(lambdas.len());
    for &lambda in lambdas {
        points.push(sweep_point(coupling, potentials, lambda, constants, config)?);
    }
    let slopes = SweepSlopes {
        m_prime_slope: log_slope(
            &points
                .iter()
                .map(|p| (p.lambda, p.m_prime_abs))
                .collect::<Vec<_>>(),
        ),
        l_norm_slope: log_slope(
            &points
                .iter()
                .map(|p| (p.lambda, p.l_norm))
                .collect::<Vec<_>>(),
        ),
        omega_norm_slope: log_slope(
            &points
                .iter()
                .map(|p| (p.lambda, p.omega_norm))
                .collect::<Vec<_>>(),
        ),
        peak_offset_slope: log_slope(
            &points
                .iter()
                .map(|p| (p.lambda, p.peak_offset))
                .collect::<Vec<_>>(),
        ),
    };
    Ok(SweepResult { points, slopes })
}

fn sweep_point(
    coupling: &CouplingParams,
    potentials: &PotentialPair,
    lambda: f64,
    constants: &ProfileConstants,
    config: &SweepConfig,
) -> Result<SweepPoint, SweepError> {
    let landscape = Landscape::new(potentials.clone(), coupling, lambda);
    let target = landscape.predicted_concentration(config.rel_window, config.c0)?;
    let y = target.y;
    let mut grid_cfg = config.grid;
    if let Some(reference) = config.resolution_reference {
        grid_cfg.points_per_width *= (lambda / reference).max(1.0).sqrt();
    }
    let grid = RadialGrid::build(lambda, y, &grid_cfg)
        .map_err(|e| SweepError::Solve {
            lambda,
            source: e.into(),
        })?;
    let sys = System::new(*coupling, potentials.clone(), lambda, Geometry::Radial);
    let engine = ReductionEngine::new(&sys, &grid, y)
        .map_err(|source| SweepError::Reduction { lambda, source })?;
    let (omega, red) = engine
        .contract(config.contraction_tol, 50)
        .map_err(|source| SweepError::Reduction { lambda, source })?;
    let corrected = engine.corrected_fields(&omega);
    let bundle = sys
        .newton(corrected.clone(), &grid, &config.solve)
        .map_err(|source| SweepError::Solve { lambda, source })?;
    let r_peak = bundle.r_peak.expect("ring solutions have an interior peak");

    let report = audit::audit(&bundle, constants);
    let ratios = audit::asymptotic_ratios(&bundle, constants)
        .map_err(|source| SweepError::Audit { lambda, source })?;

    let (coercivity, coercivity_iterations) = if config.with_coercivity {
        engine
            .coercivity()
            .map_err(|source| SweepError::Reduction { lambda, source })?
    } else {
        (f64::NAN, 0)
    };
    // cross-method check at the aligned radius: the projected solve and the
    // full solve coincide exactly where the correction is orthogonal to the
    // tangent, so align the trial radius to the Newton solution first
    let r_star = crate::reduction::align_translation(&sys, &engine.metric, &bundle.fields, y);
    let aligned_engine = ReductionEngine::new(&sys, &grid, r_star)
        .map_err(|source| SweepError::Reduction { lambda, source })?;
    let (omega_star, _) = aligned_engine
        .contract(config.contraction_tol, 50)
        .map_err(|source| SweepError::Reduction { lambda, source })?;
    let cross = aligned_engine
        .corrected_fields(&omega_star)
        .minus(&bundle.fields)
        .norm2()
        / bundle.fields.norm2();
    let max_ratio = red
        .contraction_ratios
        .iter()
        .fold(0.0f64, |m, &r| m.max(r));

    let branches = count_branches(
        coupling,
        potentials,
        lambda,
        (config.rel_window.0 * lambda, config.rel_window.1 * lambda),
        config.c0,
    );

    Ok(SweepPoint {
        lambda,
        y,
        r_peak,
        peak_offset: (r_peak - y).abs(),
        iterations: bundle.iterations,
        energy_residual: report.energy_residual,
        virial_residual: report.virial_residual,
        kinetic_ratio: ratios.kinetic,
        quartic_ratio: ratios.quartic,
        quartic_over_kinetic: ratios.quartic_over_kinetic,
        potential_moment_ratio: ratios.potential_moment,
        mass_ratio: ratios.mass,
        m_prime_abs: report.landscape_slope_at_peak.abs(),
        decay_rate: report.decay_rate,
        l_norm: red.l_norm,
        omega_norm: red.omega_norm,
        coercivity,
        coercivity_iterations,
        max_contraction_ratio: max_ratio,
        b1: red.b1,
        b2: red.b2,
        reduced_value: red.reduced_value,
        cross_method_distance: cross,
        branches,
    })
}

/// Column layout of the audit sweep CSV.
pub const AUDIT_SWEEP_COLUMNS: &[&str] = &[
    "lambda",
    "y",
    "r_peak",
    "energy_residual",
    "virial_residual",
    "kinetic_ratio",
    "quartic_ratio",
    "quartic_over_kinetic",
    "potential_moment_ratio",
    "mass_ratio",
    "m_prime_abs",
    "decay_rate",
    "branches",
];

pub fn audit_sweep_rows(result: &SweepResult) -> Vec<Vec<f64>> {
    result
        .points
        .iter()
        .map(|p| {
            vec![
                p.lambda,
                p.y,
                p.r_peak,
                p.energy_residual,
                p.virial_residual,
                p.kinetic_ratio,
                p.quartic_ratio,
                p.quartic_over_kinetic,
                p.potential_moment_ratio,
                p.mass_ratio,
                p.m_prime_abs,
                p.decay_rate,
                p.branches as f64,
            ]
        })
        .collect()
}

/// Column layout of the reduction sweep CSV.
pub const REDUCTION_SWEEP_COLUMNS: &[&str] = &[
    "lambda",
    "r0",
    "l_norm",
    "omega_norm",
    "coercivity",
    "b1",
    "b2",
    "reduced_value",
];

pub fn reduction_sweep_rows(result: &SweepResult) -> Vec<Vec<f64>> {
    result
        .points
        .iter()
        .map(|p| {
            vec![
                p.lambda,
                p.y,
                p.l_norm,
                p.omega_norm,
                p.coercivity,
                p.b1,
                p.b2,
                p.reduced_value,
            ]
        })
        .collect()
}
