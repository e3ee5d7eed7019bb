//! Numerical laboratory for ring-concentrated synchronized states of a
//! two-component Bose-Einstein condensate.
//!
//! The crate builds, at finite values of the chemical potential, the radial
//! bound states of the coupled cubic system
//!
//! ```text
//!   -u'' - u'/r + (lambda + P(r)) u = alpha u^3 + beta u v^2
//!   -v'' - v'/r + (lambda + Q(r)) v = gamma v^3 + beta u^2 v
//! ```
//!
//! whose two components peak together on a ring, and cross-checks every
//! integral identity, scaling law and reduction step that governs them:
//!
//! * [`coupling`] / [`profile`] — admissible coupling constants, the line
//!   soliton `w = sqrt(2) sech r`, the synchronized limit pair and the
//!   universal quadrature constants.
//! * [`potential`] / [`landscape`] — radial trap potentials and the
//!   effective landscape whose nondegenerate critical points select the
//!   admissible ring radii.
//! * [`grid`] / [`solver`] — cell-centered discretization and a damped
//!   Newton solver with block-banded LU factorization.
//! * [`metric`] / [`reduction`] — the weighted energy metric, the
//!   linearized operator, projection onto the complement of the
//!   translation mode, the contraction iteration and the reduced
//!   equation for the ring radius.
//! * [`audit`] / [`sweep`] — integral identity residuals, asymptotic
//!   ratios, decay fits and refinement studies across parameter sweeps.
//! * [`normalize`] — the outer solve for the multiplier enforcing unit
//!   total mass, with the existence bracket and branch counting.
//! * [`config`] / [`cli`] — file-driven configuration and the command
//!   line pipelines.

pub mod audit;
pub mod banded;
pub mod cli;
pub mod config;
pub mod coupling;
pub mod field;
pub mod grid;
pub mod landscape;
pub mod metric;
pub mod normalize;
pub mod potential;
pub mod profile;
pub mod reduction;
pub mod report;
pub mod solver;
pub mod sweep;

pub use coupling::{CouplingError, CouplingParams};
pub use field::FieldPair;
pub use grid::{GridConfig, GridError, RadialGrid};
pub use landscape::{CriticalPoint, Landscape, LandscapeError, LandscapeWeights};
pub use metric::WeightedMetric;
pub use normalize::{NormalizeError, NormalizedSolution};
pub use potential::{Potential, PotentialPair};
pub use profile::{ProfileConstants, ProfileError, ScalarProfile, VectorProfile};
pub use reduction::{ReductionEngine, ReductionError, ReductionReport};
pub use solver::{Geometry, SolutionBundle, SolveConfig, SolveError, System};

// Values are immutable after construction and operations are pure, so
// everything can be shared across threads; engines own their
// factorizations and independent solves may run concurrently.
#[cfg(test)]
mod concurrency_contract {
    fn assert_send_sync<T: Send + Sync>() {}

    #[test]
    fn public_types_are_shareable() {
        assert_send_sync::<crate::CouplingParams>();
        assert_send_sync::<crate::ScalarProfile>();
        assert_send_sync::<crate::PotentialPair>();
        assert_send_sync::<crate::Landscape>();
        assert_send_sync::<crate::RadialGrid>();
        assert_send_sync::<crate::FieldPair>();
        assert_send_sync::<crate::System>();
        assert_send_sync::<crate::SolutionBundle>();
        assert_send_sync::<crate::WeightedMetric>();
        assert_send_sync::<crate::ReductionEngine>();
        assert_send_sync::<crate::NormalizedSolution>();
    }
}
