//! Discretization of the radial system and the damped Newton solver.
//!
//! Second-order centered differences on the cell-centered grid; the
//! curvature term `-u'/r` is kept in radial geometry and dropped on the
//! line. The two components are interleaved per node, which makes the
//! Jacobian block-banded with two sub- and two super-diagonals and keeps
//! the direct factorization linear in the grid size.

use crate::banded::BandedMatrix;
use crate::coupling::{CouplingParams, CubicCoeffs};
use crate::field::FieldPair;
use crate::grid::{GridError, RadialGrid};
use crate::potential::PotentialPair;
use crate::profile::{w_exact, w_prime_exact};
use serde::Serialize;
use thiserror::Error;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Geometry {
    Line,
    Radial,
}

/// The continuous problem at a fixed multiplier value.
#[derive(Debug, Clone)]
pub struct System {
    pub coupling: CouplingParams,
    pub potentials: PotentialPair,
    pub lambda: f64,
    pub geometry: Geometry,
}

/// Newton iteration controls. Backtracking follows the Armijo rule on the
/// squared residual norm, in a non-monotone form: the acceptance reference
/// is the largest of the last few merit values, and the full Newton step is
/// additionally accepted under a growth cap. The ring translation is a
/// nearly-neutral direction, so the full step regularly overshoots once and
/// then converges quadratically; a strictly monotone line search would
/// creep along that valley instead.
#[derive(Debug, Clone, Copy)]
pub struct SolveConfig {
    pub tol: f64,
    pub max_iter: usize,
    pub armijo_slope: f64,
    pub backtrack: f64,
    pub min_step: f64,
    /// merit memory of the non-monotone acceptance rule
    pub merit_memory: usize,
    /// full steps may grow the residual norm by up to this factor
    pub growth_cap: f64,
    /// solve in the rescaled variables `(u/amp_u, v/amp_v)`
    pub rescale: bool,
}

impl Default for SolveConfig {
    fn default() -> Self {
        SolveConfig {
            tol: 1e-11,
            max_iter: 60,
            armijo_slope: 1e-4,
            backtrack: 0.5,
            min_step: (2.0f64).powi(-30),
            merit_memory: 5,
            growth_cap: 1e4,
            rescale: true,
        }
    }
}

#[derive(Debug, Clone, Error)]
pub enum SolveError {
    #[error("Newton did not converge after {iterations} iterations (relative residual {residual})")]
    NewtonDiverged { iterations: usize, residual: f64 },
    #[error("singular Jacobian: pivot breakdown in column {column}")]
    SingularJacobian { column: usize },
    #[error("field maximum sits on the boundary node {index}")]
    BoundaryPeak { index: usize },
    #[error("component peaks differ by more than one cell: |{peak_u} - {peak_v}| > {h}")]
    PeakMismatch { peak_u: f64, peak_v: f64, h: f64 },
    #[error(transparent)]
    Grid(#[from] GridError),
}

/// A converged discrete solution with its diagnostics.
#[derive(Debug, Clone)]
pub struct SolutionBundle {
    pub fields: FieldPair,
    pub lambda: f64,
    pub coupling: CouplingParams,
    pub potentials: PotentialPair,
    pub geometry: Geometry,
    pub grid: RadialGrid,
    /// interpolated common maximum radius; `None` for the zero solution
    pub r_peak: Option<f64>,
    pub iterations: usize,
    pub final_residual: f64,
    /// `2 pi int r (u^2 + v^2) dr`
    pub mass: f64,
    /// converged to the zero solution
    pub trivial: bool,
}

impl SolutionBundle {
    /// Strict positivity of both components on the interior, up to a
    /// relative rounding floor from the far tail of the banded solves.
    pub fn is_positive(&self) -> bool {
        let floor = -1e-12 * self.fields.max_abs();
        self.fields
            .u
            .iter()
            .chain(self.fields.v.iter())
            .all(|&x| x >= floor)
    }
}

impl System {
    pub fn new(
        coupling: CouplingParams,
        potentials: PotentialPair,
        lambda: f64,
        geometry: Geometry,
    ) -> Self {
        assert!(lambda > 0.0);
        System {
            coupling,
            potentials,
            lambda,
            geometry,
        }
    }

    fn sampled(&self, grid: &RadialGrid, rescaled: bool) -> Discretization {
        Discretization {
            n: grid.n,
            h: grid.h,
            lambda: self.lambda,
            radial: self.geometry == Geometry::Radial,
            p: grid.nodes().map(|r| self.potentials.p.value(r)).collect(),
            q: grid.nodes().map(|r| self.potentials.q.value(r)).collect(),
            coeffs: self.coupling.cubic_coeffs(rescaled),
        }
    }

    /// Residual of the discretized system at the given (physical) fields.
    pub fn residual(&self, fields: &FieldPair, grid: &RadialGrid) -> FieldPair {
        self.sampled(grid, false).residual(fields)
    }

    /// Jacobian of the residual at the given (physical) fields, as a
    /// block-banded matrix over interleaved unknowns.
    pub fn jacobian(&self, fields: &FieldPair, grid: &RadialGrid) -> BandedMatrix {
        self.sampled(grid, false).jacobian(fields)
    }

    /// The concentrated approximate solution built from the limit pair:
    /// each component is the soliton rescaled by `sqrt(lambda + pot(r0))`
    /// in height and inverse width and translated to `r0`.
    pub fn ansatz(&self, r0: f64, grid: &RadialGrid) -> FieldPair {
        let sp = (self.lambda + self.potentials.p.value(r0)).sqrt();
        let sq = (self.lambda + self.potentials.q.value(r0)).sqrt();
        assert!(sp > 0.0 && sq > 0.0, "lambda + potential at r0 must be positive");
        let cu = self.coupling.amp_u;
        let cv = self.coupling.amp_v;
        let u = grid.nodes().map(|r| sp * cu * w_exact(sp * (r - r0))).collect();
        let v = grid.nodes().map(|r| sq * cv * w_exact(sq * (r - r0))).collect();
        FieldPair { u, v }
    }

    /// Radial derivative of the ansatz, the near-kernel direction of the
    /// linearized operator.
    pub fn ansatz_tangent(&self, r0: f64, grid: &RadialGrid) -> FieldPair {
        let sp = (self.lambda + self.potentials.p.value(r0)).sqrt();
        let sq = (self.lambda + self.potentials.q.value(r0)).sqrt();
        let cu = self.coupling.amp_u;
        let cv = self.coupling.amp_v;
        let u = grid
            .nodes()
            .map(|r| sp * sp * cu * w_prime_exact(sp * (r - r0)))
            .collect();
        let v = grid
            .nodes()
            .map(|r| sq * sq * cv * w_prime_exact(sq * (r - r0)))
            .collect();
        FieldPair { u, v }
    }

    /// Damped Newton iteration from the given initial fields.
    pub fn newton(
        &self,
        initial: FieldPair,
        grid: &RadialGrid,
        config: &SolveConfig,
    ) -> Result<SolutionBundle, SolveError> {
        assert!(initial.all_finite(), "initial fields must be finite");
        assert_eq!(initial.len(), grid.n);
        let disc = self.sampled(grid, config.rescale);
        let mut x = initial;
        if config.rescale {
            x.scale_components(1.0 / self.coupling.amp_u, 1.0 / self.coupling.amp_v);
        }

        let mut iterations = 0;
        let mut rel = relative_residual(&disc, &x);
        let mut merit_window: Vec<f64> = Vec::new();
        while rel > config.tol {
            if iterations >= config.max_iter {
                return Err(SolveError::NewtonDiverged {
                    iterations,
                    residual: rel,
                });
            }
            let f = disc.residual(&x);
            let fnorm2 = f.norm2().powi(2);
            merit_window.push(fnorm2);
            if merit_window.len() > config.merit_memory.max(1) {
                merit_window.remove(0);
            }
            let reference = merit_window.iter().cloned().fold(fnorm2, f64::max);
            let jac = disc.jacobian(&x);
            let lu = jac
                .factor(1e-14 * disc.lambda)
                .map_err(|e| SolveError::SingularJacobian { column: e.column })?;
            let mut delta = f.interleaved();
            for d in delta.iter_mut() {
                *d = -*d;
            }
            lu.solve(&mut delta);
            let direction = FieldPair::from_interleaved(&delta);

            // non-monotone Armijo on 1/2 ||F||^2; the Newton direction has
            // slope -||F||^2 at the current point. The full step is also
            // accepted under the growth cap: the overshoot along the soft
            // translation direction is quadratic in a displacement the
            // next iteration removes.
            let mut step = 1.0;
            loop {
                let mut trial = x.clone();
                trial.axpy(step, &direction);
                let trial_norm2 = disc.residual(&trial).norm2().powi(2);
                let armijo = trial_norm2 <= reference * (1.0 - 2.0 * config.armijo_slope * step);
                let capped_full = step == 1.0
                    && trial_norm2 <= config.growth_cap * config.growth_cap * reference;
                if trial_norm2.is_finite() && (armijo || capped_full || trial_norm2 == 0.0) {
                    x = trial;
                    break;
                }
                step *= config.backtrack;
                if step < config.min_step {
                    return Err(SolveError::NewtonDiverged {
                        iterations,
                        residual: rel,
                    });
                }
            }
            iterations += 1;
            rel = relative_residual(&disc, &x);
        }

        if config.rescale {
            x.scale_components(self.coupling.amp_u, self.coupling.amp_v);
        }
        self.package(x, grid, iterations, rel)
    }

    fn package(
        &self,
        fields: FieldPair,
        grid: &RadialGrid,
        iterations: usize,
        final_residual: f64,
    ) -> Result<SolutionBundle, SolveError> {
        let trivial = fields.max_abs() < 1e-8 * self.lambda.sqrt();
        let r_peak = if trivial {
            None
        } else {
            let pu = peak_location(&fields.u, grid)?;
            let pv = peak_location(&fields.v, grid)?;
            if (pu - pv).abs() > grid.h {
                return Err(SolveError::PeakMismatch {
                    peak_u: pu,
                    peak_v: pv,
                    h: grid.h,
                });
            }
            Some(pu)
        };
        let mass = mass_of(&fields, grid);
        Ok(SolutionBundle {
            fields,
            lambda: self.lambda,
            coupling: self.coupling,
            potentials: self.potentials.clone(),
            geometry: self.geometry,
            grid: grid.clone(),
            r_peak,
            iterations,
            final_residual,
            mass,
            trivial,
        })
    }
}

/// `2 pi int r (u^2 + v^2) dr` by the midpoint rule on the cell-centered grid.
pub fn mass_of(fields: &FieldPair, grid: &RadialGrid) -> f64 {
    let mut acc = 0.0;
    for i in 0..grid.n {
        let r = grid.r(i);
        acc += r * (fields.u[i] * fields.u[i] + fields.v[i] * fields.v[i]);
    }
    2.0 * std::f64::consts::PI * acc * grid.h
}

fn relative_residual(disc: &Discretization, x: &FieldPair) -> f64 {
    let res = disc.residual(x).norm2();
    let scale = disc.lambda * x.norm2();
    if scale == 0.0 {
        if res == 0.0 {
            0.0
        } else {
            f64::INFINITY
        }
    } else {
        res / scale
    }
}

/// Quadratic interpolation of the interior maximum through the maximal node
/// and its neighbors.
pub fn peak_location(values: &[f64], grid: &RadialGrid) -> Result<f64, SolveError> {
    let mut m = 0;
    for (i, v) in values.iter().enumerate() {
        if *v > values[m] {
            m = i;
        }
    }
    if m == 0 || m == values.len() - 1 {
        return Err(SolveError::BoundaryPeak { index: m });
    }
    let (a, b, c) = (values[m - 1], values[m], values[m + 1]);
    let denom = a - 2.0 * b + c;
    if denom == 0.0 {
        return Ok(grid.r(m));
    }
    Ok(grid.r(m) + 0.5 * grid.h * (a - c) / denom)
}

/// Assembled finite-difference operator data for one (system, grid) pair.
struct Discretization {
    n: usize,
    h: f64,
    lambda: f64,
    radial: bool,
    p: Vec<f64>,
    q: Vec<f64>,
    coeffs: CubicCoeffs,
}

impl Discretization {
    fn residual(&self, x: &FieldPair) -> FieldPair {
        let n = self.n;
        let h2 = self.h * self.h;
        let k = &self.coeffs;
        let mut out = FieldPair::zeros(n);
        for i in 0..n {
            let (um, up) = neighbor_values(&x.u, i, n);
            let (vm, vp) = neighbor_values(&x.v, i, n);
            let u = x.u[i];
            let v = x.v[i];
            let mut fu = -(um - 2.0 * u + up) / h2 + (self.lambda + self.p[i]) * u
                - k.uu * u * u * u
                - k.uv * u * v * v;
            let mut fv = -(vm - 2.0 * v + vp) / h2 + (self.lambda + self.q[i]) * v
                - k.vv * v * v * v
                - k.vu * u * u * v;
            if self.radial {
                let r = (i as f64 + 0.5) * self.h;
                fu -= (up - um) / (2.0 * self.h * r);
                fv -= (vp - vm) / (2.0 * self.h * r);
            }
            out.u[i] = fu;
            out.v[i] = fv;
        }
        out
    }

    fn jacobian(&self, x: &FieldPair) -> BandedMatrix {
        let n = self.n;
        let h2 = self.h * self.h;
        let k = &self.coeffs;
        let mut jac = BandedMatrix::new(2 * n, 2, 2);
        for i in 0..n {
            let r = (i as f64 + 0.5) * self.h;
            let conv = if self.radial {
                1.0 / (2.0 * self.h * r)
            } else {
                0.0
            };
            let left = -1.0 / h2 + conv;
            let right = -1.0 / h2 - conv;
            let u = x.u[i];
            let v = x.v[i];

            let mut diag_u = 2.0 / h2 + (self.lambda + self.p[i])
                - 3.0 * k.uu * u * u
                - k.uv * v * v;
            let mut diag_v = 2.0 / h2 + (self.lambda + self.q[i])
                - 3.0 * k.vv * v * v
                - k.vu * u * u;
            if i == 0 {
                // reflecting ghost folds the left coefficient into the diagonal
                diag_u += left;
                diag_v += left;
            }
            if i == n - 1 {
                // Dirichlet ghost u_n = -u_{n-1}
                diag_u -= right;
                diag_v -= right;
            }
            jac.set(2 * i, 2 * i, diag_u);
            jac.set(2 * i + 1, 2 * i + 1, diag_v);
            jac.set(2 * i, 2 * i + 1, -2.0 * k.uv * u * v);
            jac.set(2 * i + 1, 2 * i, -2.0 * k.vu * u * v);
            if i > 0 {
                jac.set(2 * i, 2 * i - 2, left);
                jac.set(2 * i + 1, 2 * i - 1, left);
            }
            if i < n - 1 {
                jac.set(2 * i, 2 * i + 2, right);
                jac.set(2 * i + 1, 2 * i + 3, right);
            }
        }
        jac
    }
}

#[inline]
fn neighbor_values(values: &[f64], i: usize, n: usize) -> (f64, f64) {
    let left = if i == 0 { values[0] } else { values[i - 1] };
    let right = if i == n - 1 { -values[n - 1] } else { values[i + 1] };
    (left, right)
}
