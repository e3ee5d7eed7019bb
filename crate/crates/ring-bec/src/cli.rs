//! Command-line pipelines: each subcommand wires the configuration into one
//! module chain and emits deterministic reports.
//!
//! Exit codes: 0 success, 2 configuration or validation failure, 3 audit
//! failure, 4 solver failure. Failures also print a JSON error object to
//! standard error.

use crate::audit;
use crate::config::{Mode, RunConfig};
use crate::coupling::CouplingParams;
use crate::grid::RadialGrid;
use crate::landscape::{Landscape, LandscapeError};
use crate::normalize::{self, NormalizeConfig, NormalizeError};
use crate::profile::{self, ProfileConstants, ScalarProfile, VectorProfile};
use crate::reduction::ReductionEngine;
use crate::report;
use crate::solver::System;
use crate::sweep::{self, SweepConfig};
use clap::{Parser, Subcommand, ValueEnum};
use serde::Serialize;
use std::path::PathBuf;

pub const EXIT_OK: i32 = 0;
pub const EXIT_CONFIG: i32 = 2;
pub const EXIT_AUDIT: i32 = 3;
pub const EXIT_SOLVER: i32 = 4;

#[derive(Debug, Parser)]
#[command(
    name = "ring-bec",
    about = "Ring-concentrated synchronized states of two-component condensates",
    version
)]
pub struct Cli {
    /// JSON configuration file; flags override its fields
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    /// multiplier value for single-solve pipelines
    #[arg(long, global = true)]
    pub lambda: Option<f64>,
    /// target mass parameter (canonical family alpha = gamma = 1)
    #[arg(long, global = true)]
    pub epsilon: Option<f64>,
    /// bracket exponent offset
    #[arg(long, global = true)]
    pub theta: Option<f64>,
    /// absolute radius window "a,b"
    #[arg(long = "radius-window", global = true, value_parser = parse_pair)]
    pub radius_window: Option<(f64, f64)>,
    /// grid nodes per soliton width
    #[arg(long = "grid-ppw", global = true)]
    pub grid_ppw: Option<f64>,
    /// output directory
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    /// geometry of the solve
    #[arg(long, global = true, value_enum)]
    pub mode: Option<ModeArg>,
    /// explicit concentration radius
    #[arg(long, global = true)]
    pub radius: Option<f64>,
    #[command(subcommand)]
    pub command: CommandKind,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum ModeArg {
    Line,
    Radial,
}

#[derive(Debug, Clone, Copy, Subcommand)]
pub enum CommandKind {
    /// Soliton profile, quadrature constants and their identities
    Profile,
    /// Concentration landscape and its critical points
    Landscape,
    /// One ring solve at a fixed multiplier
    Solve,
    /// Reduction diagnostics at a fixed multiplier
    Reduce,
    /// Identity audits of one solve
    Audit,
    /// Outer solve for the unit-mass multiplier
    Normalize,
    /// Multiplier sweep with scaling-law fits
    Sweep,
}

fn parse_pair(s: &str) -> Result<(f64, f64), String> {
    let parts: Vec<&str> = s.split(',').collect();
    if parts.len() != 2 {
        return Err("expected two comma-separated numbers".into());
    }
    let a = parts[0].trim().parse::<f64>().map_err(|e| e.to_string())?;
    let b = parts[1].trim().parse::<f64>().map_err(|e| e.to_string())?;
    Ok((a, b))
}

#[derive(Serialize)]
struct ErrorBody<'a> {
    kind: &'a str,
    message: String,
}

#[derive(Serialize)]
struct ErrorObject<'a> {
    error: ErrorBody<'a>,
}

fn fail(kind: &str, message: impl ToString, code: i32) -> i32 {
    let obj = ErrorObject {
        error: ErrorBody {
            kind,
            message: message.to_string(),
        },
    };
    eprintln!("{}", serde_json::to_string(&obj).expect("error object"));
    code
}

/// Entry point for the binary.
pub fn run() -> i32 {
    let cli = Cli::parse();
    let mut config = match &cli.config {
        Some(path) => match std::fs::read_to_string(path) {
            Ok(text) => match RunConfig::from_json(&text) {
                Ok(c) => c,
                Err(e) => return fail("config", format!("{path:?}: {e}"), EXIT_CONFIG),
            },
            Err(e) => return fail("config", format!("{path:?}: {e}"), EXIT_CONFIG),
        },
        None => RunConfig::default(),
    };
    apply_overrides(&mut config, &cli);
    execute(&config, cli.command)
}

fn apply_overrides(config: &mut RunConfig, cli: &Cli) {
    if let Some(lambda) = cli.lambda {
        config.lambda = Some(lambda);
    }
    if let Some(epsilon) = cli.epsilon {
        config.coupling = crate::config::CouplingSpec::Epsilon { epsilon };
    }
    if let Some(theta) = cli.theta {
        config.theta = theta;
    }
    if let Some(w) = cli.radius_window {
        config.radius_window = Some(w);
    }
    if let Some(ppw) = cli.grid_ppw {
        config.grid.points_per_width = ppw;
    }
    if let Some(out) = &cli.out {
        config.out_dir = out.clone();
    }
    if let Some(mode) = cli.mode {
        config.mode = match mode {
            ModeArg::Line => Mode::Line,
            ModeArg::Radial => Mode::Radial,
        };
    }
    if let Some(radius) = cli.radius {
        config.radius = Some(radius);
    }
}

/// Run one command against a resolved configuration.
pub fn execute(config: &RunConfig, command: CommandKind) -> i32 {
    let coupling = match config.coupling.resolve() {
        Ok(c) => c,
        Err(e) => return fail("coupling", e, EXIT_CONFIG),
    };
    if let Err(e) = report::write_json(&config.out_dir.join("manifest.json"), config) {
        return fail("io", e, EXIT_CONFIG);
    }
    match command {
        CommandKind::Profile => cmd_profile(config, &coupling),
        CommandKind::Landscape => cmd_landscape(config, &coupling),
        CommandKind::Solve => cmd_solve(config, &coupling),
        CommandKind::Reduce => cmd_reduce(config, &coupling),
        CommandKind::Audit => cmd_audit(config, &coupling),
        CommandKind::Normalize => cmd_normalize(config, &coupling),
        CommandKind::Sweep => cmd_sweep(config, &coupling),
    }
}

#[derive(Serialize)]
struct ProfileOut {
    w_at_zero: f64,
    w_at_one: f64,
    sup_error_vs_closed_form: f64,
    decay_rate: f64,
    constants: ProfileConstants,
    chain_quartic_residual: f64,
    chain_kinetic_residual: f64,
    vector_balance: profile::VectorBalanceReport,
    limit_pair_residual: f64,
}

fn cmd_profile(config: &RunConfig, coupling: &CouplingParams) -> i32 {
    let profile = match ScalarProfile::solve(config.tolerances.profile_sup) {
        Ok(p) => p,
        Err(e) => return fail("profile", e, EXIT_SOLVER),
    };
    let constants = ProfileConstants::compute(20.0, 1e-3);
    let (res_q, res_k) = constants.identity_residuals();
    let balance = profile::audit_vector_balance(coupling, &constants);
    let limit_residual = VectorProfile::new(*coupling).residual_max(15.0, 2000);
    let out = ProfileOut {
        w_at_zero: profile.eval(0.0),
        w_at_one: profile.eval(1.0),
        sup_error_vs_closed_form: profile.sup_error_vs_exact(),
        decay_rate: profile.decay_rate,
        constants,
        chain_quartic_residual: res_q,
        chain_kinetic_residual: res_k,
        vector_balance: balance,
        limit_pair_residual: limit_residual,
    };
    if let Err(e) = report::write_json(&config.out_dir.join("profile.json"), &out) {
        return fail("io", e, EXIT_CONFIG);
    }
    let table = format!(
        "name,value\ni2,{}\ni4,{}\na,{}\nchain_quartic_residual,{}\nchain_kinetic_residual,{}\n",
        report::fmt_float(constants.i2),
        report::fmt_float(constants.i4),
        report::fmt_float(constants.a),
        report::fmt_float(res_q),
        report::fmt_float(res_k),
    );
    if let Err(e) = std::fs::write(config.out_dir.join("constants.csv"), table) {
        return fail("io", e, EXIT_CONFIG);
    }
    let tol = config.tolerances.profile_identity;
    let pass = res_q <= tol
        && res_k <= tol
        && balance.mass_vs_quartic <= tol
        && balance.mass_vs_kinetic <= tol
        && out.sup_error_vs_closed_form <= config.tolerances.profile_sup;
    println!(
        "profile: i2 = {:.9}, i4 = {:.9}, a = {:.9}, chain residuals ({:.3e}, {:.3e}), sup error {:.3e}",
        constants.i2, constants.i4, constants.a, res_q, res_k, out.sup_error_vs_closed_form
    );
    if pass {
        EXIT_OK
    } else {
        fail("audit", "profile identity residuals exceed tolerance", EXIT_AUDIT)
    }
}

#[derive(Serialize)]
struct LandscapeOut {
    lambda: f64,
    window: (f64, f64),
    critical_points: Vec<crate::landscape::CriticalPoint>,
}

fn cmd_landscape(config: &RunConfig, coupling: &CouplingParams) -> i32 {
    let Some(lambda) = config.lambda else {
        return fail("config", "landscape requires a multiplier (--lambda)", EXIT_CONFIG);
    };
    let landscape = Landscape::new(config.potentials.clone(), coupling, lambda);
    let window = config
        .radius_window
        .unwrap_or((config.rel_window.0 * lambda, config.rel_window.1 * lambda));
    // sampled values for plotting
    let samples = 2000usize;
    let mut rows = Vec::with_capacity(samples);
    for k in 0..=samples {
        let r = window.0 + (window.1 - window.0) * k as f64 / samples as f64;
        match (landscape.value(r), landscape.derivative(r)) {
            (Ok(m), Ok(mp)) => rows.push(vec![r, m, mp]),
            _ => return fail("landscape", "landscape base not positive on the window", EXIT_CONFIG),
        }
    }
    if let Err(e) = report::write_csv(
        &config.out_dir.join("landscape.csv"),
        &["r", "m", "m_prime"],
        &rows,
        None,
    ) {
        return fail("io", e, EXIT_CONFIG);
    }
    let critical_points = landscape.critical_points(window, config.c0).unwrap_or_default();
    let out = LandscapeOut {
        lambda,
        window,
        critical_points,
    };
    if let Err(e) = report::write_json(&config.out_dir.join("critical_points.json"), &out) {
        return fail("io", e, EXIT_CONFIG);
    }
    println!(
        "landscape: {} nondegenerate critical points in [{:.3}, {:.3}] at lambda = {lambda}",
        out.critical_points.len(),
        window.0,
        window.1
    );
    EXIT_OK
}

#[derive(Serialize)]
struct SolveOut {
    lambda: f64,
    coupling: CouplingParams,
    r0: f64,
    r_peak: Option<f64>,
    mass: f64,
    iterations: usize,
    final_residual: f64,
    trivial: bool,
}

fn pick_radius(config: &RunConfig, coupling: &CouplingParams, lambda: f64) -> Result<f64, LandscapeError> {
    if let Some(r) = config.radius {
        return Ok(r);
    }
    let landscape = Landscape::new(config.potentials.clone(), coupling, lambda);
    match config.radius_window {
        Some(window) => {
            let points = landscape.critical_points(window, config.c0)?;
            Ok(points
                .iter()
                .min_by(|a, b| {
                    (a.y - lambda)
                        .abs()
                        .partial_cmp(&(b.y - lambda).abs())
                        .unwrap()
                })
                .expect("nonempty on success")
                .y)
        }
        None => Ok(landscape
            .predicted_concentration(config.rel_window, config.c0)?
            .y),
    }
}

fn solve_bundle(
    config: &RunConfig,
    coupling: &CouplingParams,
) -> Result<(crate::solver::SolutionBundle, f64), i32> {
    let Some(lambda) = config.lambda else {
        return Err(fail("config", "solve requires a multiplier (--lambda)", EXIT_CONFIG));
    };
    let r0 = match pick_radius(config, coupling, lambda) {
        Ok(r) => r,
        Err(e) => {
            return Err(fail(
                "config",
                format!("no concentration target: {e}"),
                EXIT_CONFIG,
            ))
        }
    };
    let grid = match RadialGrid::build(lambda, r0, &config.grid) {
        Ok(g) => g,
        Err(e) => return Err(fail("config", e, EXIT_CONFIG)),
    };
    let sys = System::new(
        *coupling,
        config.potentials.clone(),
        lambda,
        config.mode.geometry(),
    );
    let bundle = crate::reduction::solve_ring(&sys, &grid, r0, &config.solver.to_solve_config())
        .map_err(|e| fail("solver", e, EXIT_SOLVER))?;
    Ok((bundle, r0))
}

fn cmd_solve(config: &RunConfig, coupling: &CouplingParams) -> i32 {
    let (bundle, r0) = match solve_bundle(config, coupling) {
        Ok(x) => x,
        Err(code) => return code,
    };
    let out = SolveOut {
        lambda: bundle.lambda,
        coupling: *coupling,
        r0,
        r_peak: bundle.r_peak,
        mass: bundle.mass,
        iterations: bundle.iterations,
        final_residual: bundle.final_residual,
        trivial: bundle.trivial,
    };
    if let Err(e) = report::write_solution_csv(&config.out_dir.join("solution.csv"), &bundle) {
        return fail("io", e, EXIT_CONFIG);
    }
    if let Err(e) = report::write_json(&config.out_dir.join("solution.json"), &out) {
        return fail("io", e, EXIT_CONFIG);
    }
    println!(
        "solve: lambda = {}, r0 = {r0:.4}, r_peak = {:?}, mass = {:.6e}, {} iterations",
        bundle.lambda, bundle.r_peak, bundle.mass, bundle.iterations
    );
    EXIT_OK
}

fn cmd_reduce(config: &RunConfig, coupling: &CouplingParams) -> i32 {
    let Some(lambda) = config.lambda else {
        return fail("config", "reduce requires a multiplier (--lambda)", EXIT_CONFIG);
    };
    let r0 = match pick_radius(config, coupling, lambda) {
        Ok(r) => r,
        Err(e) => return fail("config", format!("no concentration target: {e}"), EXIT_CONFIG),
    };
    let grid = match RadialGrid::build(lambda, r0, &config.grid) {
        Ok(g) => g,
        Err(e) => return fail("config", e, EXIT_CONFIG),
    };
    let sys = System::new(
        *coupling,
        config.potentials.clone(),
        lambda,
        config.mode.geometry(),
    );
    let engine = match ReductionEngine::new(&sys, &grid, r0) {
        Ok(e) => e,
        Err(e) => return fail("reduction", e, EXIT_SOLVER),
    };
    let (_, mut rep) = match engine.contract(1e-12, 50) {
        Ok(x) => x,
        Err(e) => return fail("reduction", e, EXIT_SOLVER),
    };
    match engine.coercivity() {
        Ok((rho, iters)) => {
            rep.coercivity = Some(rho);
            rep.coercivity_iterations = iters;
        }
        Err(e) => return fail("reduction", e, EXIT_SOLVER),
    }
    if let Err(e) = report::write_json(&config.out_dir.join("reduction.json"), &rep) {
        return fail("io", e, EXIT_CONFIG);
    }
    println!(
        "reduce: lambda = {lambda}, r0 = {r0:.4}, |l| = {:.4e}, |omega| = {:.4e}, rho = {:.4}, b = ({:.2e}, {:.2e})",
        rep.l_norm,
        rep.omega_norm,
        rep.coercivity.unwrap_or(f64::NAN),
        rep.b1,
        rep.b2
    );
    EXIT_OK
}

fn cmd_audit(config: &RunConfig, coupling: &CouplingParams) -> i32 {
    let (bundle, _) = match solve_bundle(config, coupling) {
        Ok(x) => x,
        Err(code) => return code,
    };
    let constants = ProfileConstants::compute(20.0, 1e-3);
    let report_data = audit::audit(&bundle, &constants);
    if let Err(e) = report::write_json(&config.out_dir.join("audit.json"), &report_data) {
        return fail("io", e, EXIT_CONFIG);
    }
    println!(
        "audit: lambda = {}, energy residual {:.3e}, virial residual {:.3e}, mass ratio {:.4}",
        bundle.lambda,
        report_data.energy_residual,
        report_data.virial_residual,
        report_data.mass_ratio
    );
    let tol = config.tolerances.identity;
    if report_data.energy_residual <= tol && report_data.virial_residual <= tol {
        EXIT_OK
    } else {
        fail("audit", "identity residuals exceed tolerance", EXIT_AUDIT)
    }
}

fn cmd_normalize(config: &RunConfig, coupling: &CouplingParams) -> i32 {
    let constants = ProfileConstants::compute(20.0, 1e-3);
    let ncfg = NormalizeConfig {
        grid: config.grid,
        solve: config.solver.to_solve_config(),
        rel_window: config.rel_window,
        c0: config.c0,
        mass_tol: config.tolerances.mass.min(1e-9),
        ..NormalizeConfig::default()
    };
    let solution = match normalize::normalize(
        coupling,
        &config.potentials,
        config.theta,
        constants.a,
        &ncfg,
    ) {
        Ok(s) => s,
        Err(e @ NormalizeError::NoBracket { .. })
        | Err(e @ NormalizeError::NoCriticalPoint(_))
        | Err(e @ NormalizeError::InnerSolve { .. }) => return fail("solver", e, EXIT_SOLVER),
        Err(e) => return fail("config", e, EXIT_CONFIG),
    };
    if let Err(e) =
        report::write_solution_csv(&config.out_dir.join("solution.csv"), &solution.bundle)
    {
        return fail("io", e, EXIT_CONFIG);
    }
    if let Err(e) = report::write_json(&config.out_dir.join("normalized.json"), &solution) {
        return fail("io", e, EXIT_CONFIG);
    }
    println!(
        "normalize: lambda = {:.6} in bracket ({:.3}, {:.3}) = {}, |mass - 1| = {:.2e}, y = {:.4}, r_peak = {:.4}, |omega| = {:.4e}",
        solution.lambda,
        solution.bracket.0,
        solution.bracket.1,
        solution.lambda_in_bracket,
        solution.mass_error,
        solution.y,
        solution.r_peak,
        solution.omega_norm
    );
    if solution.mass_error <= config.tolerances.mass {
        EXIT_OK
    } else {
        fail("solver", "mass constraint not met to tolerance", EXIT_SOLVER)
    }
}

fn cmd_sweep(config: &RunConfig, coupling: &CouplingParams) -> i32 {
    let constants = ProfileConstants::compute(20.0, 1e-3);
    let scfg = SweepConfig {
        grid: config.grid,
        solve: config.solver.to_solve_config(),
        rel_window: config.rel_window,
        c0: config.c0,
        ..SweepConfig::default()
    };
    let result = match sweep::run_sweep(
        coupling,
        &config.potentials,
        &config.sweep_lambdas,
        &constants,
        &scfg,
    ) {
        Ok(r) => r,
        Err(e) => return fail("solver", e, EXIT_SOLVER),
    };
    // audit table: slope footer fits each positive column against lambda
    let audit_rows = sweep::audit_sweep_rows(&result);
    let audit_slopes = column_slopes(&audit_rows);
    if let Err(e) = report::write_csv(
        &config.out_dir.join("audit_sweep.csv"),
        sweep::AUDIT_SWEEP_COLUMNS,
        &audit_rows,
        Some(("slope", &audit_slopes[1..])),
    ) {
        return fail("io", e, EXIT_CONFIG);
    }
    let red_rows = sweep::reduction_sweep_rows(&result);
    let red_slopes = column_slopes(&red_rows);
    if let Err(e) = report::write_csv(
        &config.out_dir.join("reduction_sweep.csv"),
        sweep::REDUCTION_SWEEP_COLUMNS,
        &red_rows,
        Some(("slope", &red_slopes[1..])),
    ) {
        return fail("io", e, EXIT_CONFIG);
    }
    if let Err(e) = report::write_json(&config.out_dir.join("sweep.json"), &result) {
        return fail("io", e, EXIT_CONFIG);
    }
    println!(
        "sweep: {} points, slopes: |M'| {:.3}, |l| {:.3}, offset {:.3}",
        result.points.len(),
        result.slopes.m_prime_slope,
        result.slopes.l_norm_slope,
        result.slopes.peak_offset_slope
    );
    EXIT_OK
}

/// Log-log slope of every column against the first (lambda) column.
fn column_slopes(rows: &[Vec<f64>]) -> Vec<f64> {
    if rows.is_empty() {
        return Vec::new();
    }
    let cols = rows[0].len();
    let mut slopes = Vec::with_capacity(cols);
    for j in 0..cols {
        let samples: Vec<(f64, f64)> = rows.iter().map(|r| (r[0], r[j])).collect();
        slopes.push(sweep::log_slope(&samples));
    }
    slopes
}
