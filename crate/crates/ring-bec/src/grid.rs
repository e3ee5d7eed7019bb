//! Cell-centered radial grids.
//!
//! Nodes sit at `r_i = (i + 1/2) h`, so `1/r` is never evaluated at the
//! origin; the domain is `[0, n h]` with a reflecting ghost across `r = 0`
//! and a homogeneous Dirichlet ghost at `r_max`.

use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct GridConfig {
    /// nodes per soliton width `1/sqrt(lambda)`
    pub points_per_width: f64,
    /// right padding beyond the peak, in widths
    pub pad: f64,
    /// hard cap on the node count
    pub cap: usize,
}

impl Default for GridConfig {
    fn default() -> Self {
        GridConfig {
            points_per_width: 10.0,
            pad: 15.0,
            cap: 2_000_000,
        }
    }
}

#[derive(Debug, Clone, Error)]
pub enum GridError {
    #[error("grid of {n} nodes exceeds the configured cap {cap}")]
    GridTooLarge { n: usize, cap: usize },
}

/// Uniform cell-centered grid on `[0, r_max]`.
#[derive(Debug, Clone, Serialize)]
pub struct RadialGrid {
    pub n: usize,
    pub h: f64,
    pub r_max: f64,
}

impl RadialGrid {
    /// Grid sized for a peak of width `1/sqrt(lambda)` near `r_center`:
    /// spacing at most `1/(points_per_width sqrt(lambda))` and
    /// `r_max = max(1.3 r_center, r_center + pad/sqrt(lambda))`.
    pub fn build(lambda: f64, r_center: f64, config: &GridConfig) -> Result<Self, GridError> {
        assert!(lambda > 0.0 && r_center > 0.0);
        let width = 1.0 / lambda.sqrt();
        let h_max = width / config.points_per_width;
        let r_max = (1.3 * r_center).max(r_center + config.pad * width);
        let n = (r_max / h_max).ceil() as usize;
        if n > config.cap {
            return Err(GridError::GridTooLarge { n, cap: config.cap });
        }
        let h = r_max / n as f64;
        Ok(RadialGrid { n, h, r_max })
    }

    /// Explicit construction used by tests and refinement studies.
    pub fn with_extent(r_max: f64, n: usize) -> Self {
        RadialGrid {
            n,
            h: r_max / n as f64,
            r_max,
        }
    }

    #[inline]
    pub fn r(&self, i: usize) -> f64 {
        (i as f64 + 0.5) * self.h
    }

    pub fn nodes(&self) -> impl Iterator<Item = f64> + '_ {
        (0..self.n).map(|i| self.r(i))
    }

    /// Node index closest to the radius `r`.
    pub fn nearest(&self, r: f64) -> usize {
        ((r / self.h - 0.5).round() as isize).clamp(0, self.n as isize - 1) as usize
    }
}
