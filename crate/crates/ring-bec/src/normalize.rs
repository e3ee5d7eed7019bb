//! The outer problem: find the multiplier value at which the solution
//! carries unit total mass, verify the existence bracket, and count the
//! candidate ring branches.

use crate::coupling::CouplingParams;
use crate::field::FieldPair;
use crate::grid::{GridConfig, RadialGrid};
use crate::landscape::{Landscape, LandscapeError};
use crate::metric::WeightedMetric;
use crate::potential::PotentialPair;
use crate::solver::{Geometry, SolutionBundle, SolveConfig, SolveError, System};
use serde::Serialize;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum NormalizeError {
    #[error("no sign change of mass - 1 over the multiplier bracket [{lo}, {hi}] (even after widening)")]
    NoBracket { lo: f64, hi: f64 },
    #[error("no concentration radius: {0}")]
    NoCriticalPoint(#[from] LandscapeError),
    #[error("inner solve failed at lambda = {lambda}: {source}")]
    InnerSolve {
        lambda: f64,
        #[source]
        source: SolveError,
    },
    #[error("bracket lower endpoint {lo} is below the solver minimum {min}")]
    BracketBelowMinimum { lo: f64, min: f64 },
}

/// Result of the outer normalization solve.
#[derive(Debug, Clone, Serialize)]
pub struct NormalizedSolution {
    pub lambda: f64,
    pub epsilon: f64,
    pub theta: f64,
    /// existence bracket the multiplier was searched in
    pub bracket: (f64, f64),
    pub lambda_in_bracket: bool,
    /// landscape critical point used as the concentration target
    pub y: f64,
    pub r_peak: f64,
    pub peak_offset: f64,
    /// weighted norm of (solution - ansatz at the measured peak)
    pub omega_norm: f64,
    pub mass: f64,
    pub mass_error: f64,
    /// every sign change observed while scanning, normally one
    pub candidates: Vec<f64>,
    #[serde(skip)]
    pub bundle: SolutionBundle,
}

/// Existence bracket for the multiplier at mass parameter `epsilon`:
/// `((8 A pi eps)^(-1/(3/2+theta)), (4 A pi eps)^(-1/(3/2-theta)))`.
pub fn multiplier_bracket(epsilon: f64, theta: f64, a_const: f64) -> (f64, f64) {
    assert!(epsilon > 0.0 && theta > 0.0 && theta < 0.5);
    let lo = (8.0 * a_const * std::f64::consts::PI * epsilon).powf(-1.0 / (1.5 + theta));
    let hi = (4.0 * a_const * std::f64::consts::PI * epsilon).powf(-1.0 / (1.5 - theta));
    (lo, hi)
}

/// Number of nondegenerate landscape critical points in the window:
/// the candidate single-ring branches at this multiplier value.
pub fn count_branches(
    coupling: &CouplingParams,
    potentials: &PotentialPair,
    lambda: f64,
    window: (f64, f64),
    c0: f64,
) -> usize {
    let landscape = Landscape::new(potentials.clone(), coupling, lambda);
    match landscape.critical_points(window, c0) {
        Ok(points) => points.len(),
        Err(_) => 0,
    }
}

/// Controls for the outer solve.
#[derive(Debug, Clone, Copy)]
pub struct NormalizeConfig {
    pub grid: GridConfig,
    pub solve: SolveConfig,
    /// relative window for the concentration radius
    pub rel_window: (f64, f64),
    /// nondegeneracy floor for critical points
    pub c0: f64,
    /// target on |mass - 1|
    pub mass_tol: f64,
    /// smallest multiplier the inner solver accepts
    pub lambda_min: f64,
}

impl Default for NormalizeConfig {
    fn default() -> Self {
        NormalizeConfig {
            grid: GridConfig::default(),
            solve: SolveConfig::default(),
            rel_window: (0.6, 1.5),
            c0: 1e-3,
            mass_tol: 1e-9,
            lambda_min: 10.0,
        }
    }
}

struct InnerSolve {
    bundle: SolutionBundle,
    y: f64,
}

/// Solve for the multiplier enforcing unit mass.
///
/// The bracket comes from the existence estimate (widened by [0.5, 2] when
/// the mass misfit does not change sign over it). A bisection phase narrows
/// the interval on independently selected concentration radii; once the
/// interval is small the critical-point branch is frozen and tracked
/// continuously so the mass misfit is smooth, and a secant iteration drives
/// it below the mass tolerance. All inner solves share one grid sized for
/// the upper bracket endpoint, which keeps the misfit a continuous function
/// of the multiplier.
pub fn normalize(
    coupling: &CouplingParams,
    potentials: &PotentialPair,
    theta: f64,
    a_const: f64,
    config: &NormalizeConfig,
) -> Result<NormalizedSolution, NormalizeError> {
    let eps = coupling.epsilon;
    let (mut lo, mut hi) = multiplier_bracket(eps, theta, a_const);
    let bracket = (lo, hi);
    if lo < config.lambda_min {
        return Err(NormalizeError::BracketBelowMinimum {
            lo,
            min: config.lambda_min,
        });
    }

    // one shared grid: fine enough for the largest multiplier, wide enough
    // for the largest admissible ring radius over the widened bracket
    let lambda_cap = 2.0 * hi;
    let r_cap = config.rel_window.1 * lambda_cap;
    let grid = RadialGrid::build(lambda_cap, r_cap, &config.grid)
        .map_err(|e| NormalizeError::InnerSolve {
            lambda: lambda_cap,
            source: e.into(),
        })?;

    let solve_at = |lambda: f64, y_hint: Option<f64>| -> Result<InnerSolve, NormalizeError> {
        let landscape = Landscape::new(potentials.clone(), coupling, lambda);
        let y = match y_hint {
            Some(prev) => track_critical_point(&landscape, prev, config.c0)
                .map_err(NormalizeError::NoCriticalPoint)?,
            None => {
                landscape
                    .predicted_concentration(config.rel_window, config.c0)?
                    .y
            }
        };
        let sys = System::new(*coupling, potentials.clone(), lambda, Geometry::Radial);
        let bundle = crate::reduction::solve_ring(&sys, &grid, y, &config.solve)
            .map_err(|source| NormalizeError::InnerSolve { lambda, source })?;
        Ok(InnerSolve { bundle, y })
    };
    let misfit = |s: &InnerSolve| s.bundle.mass - 1.0;

    // establish a sign change, widening once if necessary
    let mut f_lo = misfit(&solve_at(lo, None)?);
    let f_hi = misfit(&solve_at(hi, None)?);
    if f_lo * f_hi > 0.0 {
        let (wlo, whi) = (0.5 * lo, 2.0 * hi);
        let f_wlo = misfit(&solve_at(wlo.max(config.lambda_min), None)?);
        let f_whi = misfit(&solve_at(whi, None)?);
        if f_wlo * f_hi < 0.0 {
            lo = wlo.max(config.lambda_min);
            f_lo = f_wlo;
        } else if f_lo * f_whi < 0.0 {
            hi = whi;
        } else {
            return Err(NormalizeError::NoBracket { lo: wlo, hi: whi });
        }
    }
    let mut candidates = Vec::new();

    // phase one: bisection with independent branch picks
    while hi - lo > 1e-2 * lo {
        let mid = 0.5 * (lo + hi);
        let f_mid = misfit(&solve_at(mid, None)?);
        if f_lo * f_mid <= 0.0 {
            hi = mid;
        } else {
            lo = mid;
            f_lo = f_mid;
        }
    }

    // phase two: freeze the branch at the midpoint and track it
    let mut lambda0 = lo;
    let mut lambda1 = hi;
    let seed = solve_at(0.5 * (lo + hi), None)?;
    let mut y_branch = seed.y;
    let mut g0 = {
        let s = solve_at(lambda0, Some(y_branch))?;
        y_branch = s.y;
        misfit(&s)
    };
    let mut g1 = {
        let s = solve_at(lambda1, Some(y_branch))?;
        misfit(&s)
    };
    // if the branch-tracked misfit lost the sign change, nudge the interval
    // outward along the (smooth, increasing) branch
    let mut guard = 0;
    while g0 * g1 > 0.0 && guard < 60 {
        if g0 > 0.0 {
            lambda0 *= 0.995;
            let s = solve_at(lambda0, Some(y_branch))?;
            y_branch = s.y;
            g0 = misfit(&s);
        } else {
            lambda1 *= 1.005;
            let s = solve_at(lambda1, Some(y_branch))?;
            g1 = misfit(&s);
        }
        guard += 1;
    }
    if g0 * g1 > 0.0 {
        return Err(NormalizeError::NoBracket {
            lo: lambda0,
            hi: lambda1,
        });
    }

    // secant with bisection fallback on the smooth branch-tracked misfit
    let mut best: Option<InnerSolve> = None;
    let mut best_g = f64::INFINITY;
    for _ in 0..80 {
        let denom = g1 - g0;
        let mut next = if denom.abs() > 1e-300 {
            lambda1 - g1 * (lambda1 - lambda0) / denom
        } else {
            0.5 * (lambda0 + lambda1)
        };
        if !(next > lambda0 && next < lambda1) {
            next = 0.5 * (lambda0 + lambda1);
        }
        let s = solve_at(next, Some(y_branch))?;
        y_branch = s.y;
        let g = misfit(&s);
        if g.abs() < best_g {
            best_g = g.abs();
            best = Some(s);
        }
        if g.abs() <= config.mass_tol {
            candidates.push(next);
            break;
        }
        if g0 * g <= 0.0 {
            lambda1 = next;
            g1 = g;
        } else {
            lambda0 = next;
            g0 = g;
        }
        if lambda1 - lambda0 < 1e-15 * lambda1 {
            break;
        }
    }

    let solved = best.expect("secant produced at least one evaluation");
    let bundle = solved.bundle;
    let lambda = bundle.lambda;
    let y = solved.y;
    let r_peak = bundle.r_peak.unwrap_or(f64::NAN);

    // correction norm in the weighted metric, against the ansatz planted at
    // the measured peak
    let sys = System::new(*coupling, potentials.clone(), lambda, Geometry::Radial);
    let metric = WeightedMetric::new(&grid, lambda, potentials, Geometry::Radial);
    let ansatz = sys.ansatz(r_peak, &grid);
    let mut omega: FieldPair = bundle.fields.clone();
    omega.axpy(-1.0, &ansatz);
    let omega_norm = metric.norm(&omega);

    Ok(NormalizedSolution {
        lambda,
        epsilon: eps,
        theta,
        bracket,
        lambda_in_bracket: lambda >= bracket.0 && lambda <= bracket.1,
        y,
        r_peak,
        peak_offset: (r_peak - y).abs(),
        omega_norm,
        mass: bundle.mass,
        mass_error: (bundle.mass - 1.0).abs(),
        candidates,
        bundle,
    })
}

/// Refine the critical point nearest to `prev` by a local slope scan and
/// bisection; used to follow one branch as the multiplier moves.
fn track_critical_point(
    landscape: &Landscape,
    prev: f64,
    c0: f64,
) -> Result<f64, LandscapeError> {
    // the spacing between neighbouring critical points is at least about a
    // sixth of the potential period; a +-0.75 window isolates one root
    let window = (prev - 0.75, prev + 0.75);
    let points = landscape.critical_points(window, c0)?;
    Ok(points
        .iter()
        .min_by(|a, b| {
            (a.y - prev)
                .abs()
                .partial_cmp(&(b.y - prev).abs())
                .unwrap()
        })
        .expect("critical_points is nonempty on success")
        .y)
}
