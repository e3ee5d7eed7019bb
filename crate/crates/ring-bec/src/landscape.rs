//! The effective concentration landscape and its critical points.
//!
//! Ring radii admissible for concentration are the nondegenerate critical
//! points of
//!
//! ```text
//!   M(r) = r [1 + (wP P(r) + wQ Q(r)) / lambda]^(3/2)
//! ```
//!
//! where the weights depend only on the coupling and sum to one, so the
//! landscape is coupling-independent whenever `P = Q`.

use crate::coupling::CouplingParams;
use crate::potential::PotentialPair;
use serde::Serialize;
use thiserror::Error;

/// Convex weights `(wP, wQ)` mixing the two potentials.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct LandscapeWeights {
    pub wp: f64,
    pub wq: f64,
}

impl LandscapeWeights {
    pub fn new(coupling: &CouplingParams) -> Self {
        let denom = coupling.alpha + coupling.gamma - 2.0 * coupling.beta;
        LandscapeWeights {
            wp: (coupling.gamma - coupling.beta) / denom,
            wq: (coupling.alpha - coupling.beta) / denom,
        }
    }
}

/// A refined critical point of the landscape.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct CriticalPoint {
    /// radius of the critical point
    pub y: f64,
    /// second derivative there (centered difference of the slope)
    pub m_second: f64,
    /// sign-change interval the bisection started from
    pub bracket: (f64, f64),
    /// multiplier value the landscape was evaluated at
    pub lambda: f64,
}

#[derive(Debug, Clone, Error)]
pub enum LandscapeError {
    #[error("landscape base 1 + (wP P + wQ Q)/lambda is not positive at r = {r} (lambda = {lambda})")]
    NegativeBase { r: f64, lambda: f64 },
    #[error("no critical point of the landscape in [{lo}, {hi}] at lambda = {lambda}")]
    NoCriticalPoint { lo: f64, hi: f64, lambda: f64 },
}

/// The landscape at a fixed multiplier value.
#[derive(Debug, Clone)]
pub struct Landscape {
    pub potentials: PotentialPair,
    pub weights: LandscapeWeights,
    pub lambda: f64,
}

impl Landscape {
    pub fn new(potentials: PotentialPair, coupling: &CouplingParams, lambda: f64) -> Self {
        assert!(lambda > 0.0);
        Landscape {
            potentials,
            weights: LandscapeWeights::new(coupling),
            lambda,
        }
    }

    #[inline]
    fn base(&self, r: f64) -> f64 {
        1.0 + (self.weights.wp * self.potentials.p.value(r)
            + self.weights.wq * self.potentials.q.value(r))
            / self.lambda
    }

    #[inline]
    fn base_slope(&self, r: f64) -> f64 {
        (self.weights.wp * self.potentials.p.derivative(r)
            + self.weights.wq * self.potentials.q.derivative(r))
            / self.lambda
    }

    /// `M(r)`.
    pub fn value(&self, r: f64) -> Result<f64, LandscapeError> {
        let b = self.base(r);
        if b <= 0.0 {
            return Err(LandscapeError::NegativeBase {
                r,
                lambda: self.lambda,
            });
        }
        Ok(r * b.powf(1.5))
    }

    /// `M'(r)` by the chain rule: `sqrt(base) (base + 1.5 r base')`.
    pub fn derivative(&self, r: f64) -> Result<f64, LandscapeError> {
        let b = self.base(r);
        if b <= 0.0 {
            return Err(LandscapeError::NegativeBase {
                r,
                lambda: self.lambda,
            });
        }
        Ok(b.sqrt() * (b + 1.5 * r * self.base_slope(r)))
    }

    /// `M''(r)` by a centered difference of the analytic slope with
    /// `h = 1e-4 max(1, r)`.
    pub fn second_derivative(&self, r: f64) -> Result<f64, LandscapeError> {
        let h = 1e-4 * r.abs().max(1.0);
        Ok((self.derivative(r + h)? - self.derivative(r - h)?) / (2.0 * h))
    }

    /// Scan step resolving the potentials' oscillation: a sixteenth of the
    /// shortest variation scale, capped by the window itself.
    fn scan_step(&self, window: (f64, f64)) -> f64 {
        let width = window.1 - window.0;
        let mut step = width / 64.0;
        for scale in [
            self.potentials.p.variation_scale(),
            self.potentials.q.variation_scale(),
        ]
        .into_iter()
        .flatten()
        {
            step = step.min(scale / 16.0);
        }
        step.max(width / 4_000_000.0)
    }

    /// All sign changes of `M'` in the window, bisection-refined to
    /// `1e-10 lambda` and filtered by `|M''| >= c0`; sorted ascending.
    pub fn critical_points(
        &self,
        window: (f64, f64),
        c0: f64,
    ) -> Result<Vec<CriticalPoint>, LandscapeError> {
        let (lo, hi) = window;
        assert!(lo > 0.0 && hi > lo, "window must satisfy 0 < lo < hi");
        let step = self.scan_step(window);
        let mut out = Vec::new();
        let mut r_prev = lo;
        let mut f_prev = self.derivative(r_prev)?;
        let n = ((hi - lo) / step).ceil() as usize;
        for k in 1..=n {
            let r = lo + (hi - lo) * k as f64 / n as f64;
            let f = self.derivative(r)?;
            if f_prev == 0.0 {
                // exact hit on the previous node
                r_prev = r;
                f_prev = f;
                continue;
            }
            if f_prev * f < 0.0 {
                let root = self.bisect(r_prev, r)?;
                let m2 = self.second_derivative(root)?;
                if m2.abs() >= c0 {
                    out.push(CriticalPoint {
                        y: root,
                        m_second: m2,
                        bracket: (r_prev, r),
                        lambda: self.lambda,
                    });
                }
            }
            r_prev = r;
            f_prev = f;
        }
        if out.is_empty() {
            return Err(LandscapeError::NoCriticalPoint {
                lo,
                hi,
                lambda: self.lambda,
            });
        }
        Ok(out)
    }

    fn bisect(&self, mut lo: f64, mut hi: f64) -> Result<f64, LandscapeError> {
        let tol = 1e-10 * self.lambda;
        let mut f_lo = self.derivative(lo)?;
        while hi - lo > tol {
            let mid = 0.5 * (lo + hi);
            let f_mid = self.derivative(mid)?;
            if f_lo * f_mid <= 0.0 {
                hi = mid;
            } else {
                lo = mid;
                f_lo = f_mid;
            }
        }
        Ok(0.5 * (lo + hi))
    }

    /// The critical point inside the relative window `[c1 lambda, c2 lambda]`
    /// closest to `lambda`, ties broken toward the smaller radius.
    pub fn predicted_concentration(
        &self,
        rel_window: (f64, f64),
        c0: f64,
    ) -> Result<CriticalPoint, LandscapeError> {
        let window = (rel_window.0 * self.lambda, rel_window.1 * self.lambda);
        let points = self.critical_points(window, c0)?;
        let mut best = points[0];
        for p in &points[1..] {
            let d = (p.y - self.lambda).abs();
            let bd = (best.y - self.lambda).abs();
            if d < bd - 1e-12 * self.lambda {
                best = *p;
            }
            // at an exact tie the earlier (smaller) radius is kept
        }
        Ok(best)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn coupling() -> CouplingParams {
        CouplingParams::new(1.0, 1.0, 3.0).unwrap()
    }

    /// Independent oracle: bisection on `1 + sin(r)/l + 1.5 r cos(r)/l`,
    /// the zero-equation of the sin-sin landscape slope.
    fn sin_slope_roots(lambda: f64, lo: f64, hi: f64) -> Vec<f64> {
        let g = |r: f64| 1.0 + r.sin() / lambda + 1.5 * r * r.cos() / lambda;
        let n = 200_000;
        let mut roots = Vec::new();
        let mut rp = lo;
        let mut fp = g(lo);
        for k in 1..=n {
            let r = lo + (hi - lo) * k as f64 / n as f64;
            let f = g(r);
            if fp * f < 0.0 {
                let (mut a, mut b) = (rp, r);
                for _ in 0..80 {
                    let m = 0.5 * (a + b);
                    if g(a) * g(m) <= 0.0 {
                        b = m;
                    } else {
                        a = m;
                    }
                }
                roots.push(0.5 * (a + b));
            }
            rp = r;
            fp = f;
        }
        roots
    }

    #[test]
    fn zero_potential_is_the_identity_map() {
        let l = Landscape::new(PotentialPair::zero(), &coupling(), 7.0);
        for r in [0.1, 1.0, 10.0, 123.0] {
            assert_eq!(l.value(r).unwrap(), r);
            assert!((l.derivative(r).unwrap() - 1.0).abs() < 1e-15);
        }
        assert!(matches!(
            l.critical_points((1.0, 50.0), 1e-3),
            Err(LandscapeError::NoCriticalPoint { .. })
        ));
        assert!(l.predicted_concentration((0.6, 1.5), 1e-3).is_err());
    }

    #[test]
    fn sin_landscape_point_value() {
        let l = Landscape::new(PotentialPair::sin_sin(), &coupling(), 100.0);
        let r = std::f64::consts::FRAC_PI_2;
        let expected = r * 1.01f64.powf(1.5);
        assert!((l.value(r).unwrap() - expected).abs() < 1e-12);
        assert!((l.value(r).unwrap() - 1.5944170787506295).abs() < 1e-10);
    }

    #[test]
    fn weights_collapse_makes_landscape_coupling_independent() {
        let pair = PotentialPair::sin_sin();
        let c1 = CouplingParams::new(1.0, 1.0, 3.0).unwrap();
        let c2 = CouplingParams::new(2.0, 5.0, 1.5).unwrap();
        let l1 = Landscape::new(pair.clone(), &c1, 80.0);
        let l2 = Landscape::new(pair, &c2, 80.0);
        let w1 = LandscapeWeights::new(&c1);
        let w2 = LandscapeWeights::new(&c2);
        assert!((w1.wp + w1.wq - 1.0).abs() < 4.0 * f64::EPSILON);
        assert!((w2.wp + w2.wq - 1.0).abs() < 4.0 * f64::EPSILON);
        for k in 1..40 {
            let r = 2.0 * k as f64;
            assert!((l1.value(r).unwrap() - l2.value(r).unwrap()).abs() < 1e-12);
        }
    }

    #[test]
    fn derivative_matches_finite_difference_at_second_order() {
        let l = Landscape::new(PotentialPair::sin_sin(), &coupling(), 100.0);
        let r = 37.3;
        let fd = |h: f64| (l.value(r + h).unwrap() - l.value(r - h).unwrap()) / (2.0 * h);
        let d = l.derivative(r).unwrap();
        let e1 = (fd(1e-3) - d).abs();
        let e2 = (fd(5e-4) - d).abs();
        assert!(e1 / e2 > 3.0 && e1 / e2 < 5.0, "ratio {}", e1 / e2);
    }

    #[test]
    fn critical_points_match_bisection_oracle() {
        let l = Landscape::new(PotentialPair::sin_sin(), &coupling(), 100.0);
        let points = l.critical_points((67.0, 75.0), 1e-3).unwrap();
        let oracle = sin_slope_roots(100.0, 67.0, 75.0);
        assert_eq!(points.len(), oracle.len());
        for (p, o) in points.iter().zip(oracle.iter()) {
            assert!((p.y - o).abs() < 1e-7, "{} vs {o}", p.y);
            assert!(l.derivative(p.y).unwrap().abs() < 1e-6);
            assert!(p.m_second.abs() >= 1e-3);
        }
        // the landscape maximum near 71.9 sits on the M'' < 0 side
        assert!((points[0].y - 71.88).abs() < 0.01);
        assert!(points[0].m_second < 0.0);
    }

    #[test]
    fn no_critical_point_below_the_onset_radius() {
        // |1.5 r cos r / lambda| < 1 - |sin r|/lambda for r well below 2 lambda / 3
        let l = Landscape::new(PotentialPair::sin_sin(), &coupling(), 100.0);
        assert!(matches!(
            l.critical_points((1.0, 60.0), 1e-3),
            Err(LandscapeError::NoCriticalPoint { .. })
        ));
    }

    #[test]
    fn predicted_concentration_picks_the_root_closest_to_lambda() {
        let l = Landscape::new(PotentialPair::sin_sin(), &coupling(), 100.0);
        let p = l.predicted_concentration((0.6, 1.5), 1e-3).unwrap();
        let oracle = sin_slope_roots(100.0, 60.0, 150.0);
        let best = oracle
            .iter()
            .cloned()
            .min_by(|a, b| {
                (a - 100.0f64)
                    .abs()
                    .partial_cmp(&(b - 100.0).abs())
                    .unwrap()
            })
            .unwrap();
        assert!((p.y - best).abs() < 1e-7, "{} vs {best}", p.y);

        let l200 = Landscape::new(PotentialPair::sin_sin(), &coupling(), 200.0);
        let p200 = l200.predicted_concentration((0.6, 1.5), 1e-3).unwrap();
        let oracle200 = sin_slope_roots(200.0, 120.0, 300.0);
        let best200 = oracle200
            .iter()
            .cloned()
            .min_by(|a, b| {
                (a - 200.0f64)
                    .abs()
                    .partial_cmp(&(b - 200.0).abs())
                    .unwrap()
            })
            .unwrap();
        assert!((p200.y - best200).abs() < 1e-6);
    }

    #[test]
    fn negative_base_reported_for_small_lambda() {
        let l = Landscape::new(PotentialPair::sin_sin(), &coupling(), 0.5);
        // base = 1 + sin(r)/0.5 dips below zero near sin r = -1
        assert!(matches!(
            l.value(4.7),
            Err(LandscapeError::NegativeBase { .. })
        ));
    }
}
