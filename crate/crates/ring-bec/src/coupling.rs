//! Coupling constants of the two-component system and the derived
//! amplitudes of the synchronized limit pair.

use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Validated interaction constants `(alpha, gamma, beta)` together with the
/// derived quantities that every other module consumes:
///
/// * `amp_u`, `amp_v` — amplitudes of the limit pair `(U, V) = (amp_u w, amp_v w)`,
/// * `epsilon` — the mass parameter `(alpha + gamma - 2 beta) / (alpha gamma - beta^2)`;
///   ring concentration requires it to be small.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct CouplingParams {
    pub alpha: f64,
    pub gamma: f64,
    pub beta: f64,
    pub amp_u: f64,
    pub amp_v: f64,
    pub epsilon: f64,
}

#[derive(Debug, Clone, Error, PartialEq)]
pub enum CouplingError {
    #[error("intraspecies strengths must be positive: alpha = {alpha}, gamma = {gamma}")]
    NonPositive { alpha: f64, gamma: f64 },
    #[error(
        "beta = {beta} is outside the admissible set \
         (-sqrt(alpha*gamma), 0) u {{0}} u (0, min(alpha,gamma)) u (max(alpha,gamma), inf)"
    )]
    InadmissibleBeta { beta: f64 },
}

impl CouplingParams {
    /// Validate `(alpha, gamma, beta)` and compute the derived amplitudes and
    /// mass parameter.
    ///
    /// `beta` must lie in `(-sqrt(alpha*gamma), 0) u (0, min(alpha,gamma)) u
    /// (max(alpha,gamma), +inf)`; interval endpoints are rejected. `beta = 0`
    /// is accepted as the decoupled case, where the system splits into two
    /// independent scalar equations with the same limit soliton.
    pub fn new(alpha: f64, gamma: f64, beta: f64) -> Result<Self, CouplingError> {
        if !(alpha > 0.0) || !(gamma > 0.0) || !alpha.is_finite() || !gamma.is_finite() {
            return Err(CouplingError::NonPositive { alpha, gamma });
        }
        if !beta.is_finite() {
            return Err(CouplingError::InadmissibleBeta { beta });
        }
        let low = -(alpha * gamma).sqrt();
        let min_ag = alpha.min(gamma);
        let max_ag = alpha.max(gamma);
        let admissible = beta == 0.0
            || (beta > low && beta < 0.0)
            || (beta > 0.0 && beta < min_ag)
            || beta > max_ag;
        if !admissible {
            return Err(CouplingError::InadmissibleBeta { beta });
        }

        let det = alpha * gamma - beta * beta;
        let cu2 = (gamma - beta) / det;
        let cv2 = (alpha - beta) / det;
        let epsilon = (alpha + gamma - 2.0 * beta) / det;
        debug_assert!(cu2 > 0.0 && cv2 > 0.0 && epsilon > 0.0);

        Ok(CouplingParams {
            alpha,
            gamma,
            beta,
            amp_u: cu2.sqrt(),
            amp_v: cv2.sqrt(),
            epsilon,
        })
    }

    /// Canonical one-parameter family reaching the small-mass regime:
    /// `alpha = gamma = 1`, `beta = 2/epsilon - 1` on the repulsive branch.
    pub fn from_epsilon(epsilon: f64) -> Result<Self, CouplingError> {
        if !(epsilon > 0.0) || !(epsilon < 1.0) {
            return Err(CouplingError::InadmissibleBeta {
                beta: 2.0 / epsilon - 1.0,
            });
        }
        Self::new(1.0, 1.0, 2.0 / epsilon - 1.0)
    }

    /// Exchange the two components: `alpha <-> gamma` (and `P <-> Q` on the
    /// caller's side). Swaps the amplitudes and fixes `epsilon`.
    pub fn swapped(&self) -> Self {
        CouplingParams {
            alpha: self.gamma,
            gamma: self.alpha,
            beta: self.beta,
            amp_u: self.amp_v,
            amp_v: self.amp_u,
            epsilon: self.epsilon,
        }
    }

    /// Cubic coefficients of the system in the given variables.
    ///
    /// Rescaled variables `(u/amp_u, v/amp_v)` keep every cubic coefficient
    /// in [0, 1] with rows summing to one, so the Newton systems stay well
    /// conditioned even for large `beta`.
    pub fn cubic_coeffs(&self, rescaled: bool) -> CubicCoeffs {
        if rescaled {
            CubicCoeffs {
                uu: self.alpha * self.amp_u * self.amp_u,
                uv: self.beta * self.amp_v * self.amp_v,
                vv: self.gamma * self.amp_v * self.amp_v,
                vu: self.beta * self.amp_u * self.amp_u,
            }
        } else {
            CubicCoeffs {
                uu: self.alpha,
                uv: self.beta,
                vv: self.gamma,
                vu: self.beta,
            }
        }
    }
}

/// Coefficients of the cubic right-hand side
/// `(uu u^3 + uv u v^2, vv v^3 + vu u^2 v)`.
#[derive(Debug, Clone, Copy)]
pub struct CubicCoeffs {
    pub uu: f64,
    pub uv: f64,
    pub vv: f64,
    pub vu: f64,
}
