//! Radial trap potentials with analytic first derivatives and declared
//! bounds, loadable from JSON documents of the form
//! `{"P": {"kind": "sinusoid", "amplitude": 1.0, ...}, "Q": {...}}`.

use serde::{Deserialize, Serialize};

/// A bounded radial potential evaluated together with its derivative.
#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Potential {
    Zero,
    Sinusoid {
        amplitude: f64,
        frequency: f64,
        phase: f64,
    },
    GaussianBump {
        center: f64,
        width: f64,
        height: f64,
    },
    /// Values on an increasing radius grid, natural cubic spline between.
    Tabulated { radii: Vec<f64>, values: Vec<f64> },
}

impl Potential {
    pub fn sin() -> Self {
        Potential::Sinusoid {
            amplitude: 1.0,
            frequency: 1.0,
            phase: 0.0,
        }
    }

    pub fn value(&self, r: f64) -> f64 {
        match self {
            Potential::Zero => 0.0,
            Potential::Sinusoid {
                amplitude,
                frequency,
                phase,
            } => amplitude * (frequency * r + phase).sin(),
            Potential::GaussianBump {
                center,
                width,
                height,
            } => {
                let s = (r - center) / width;
                height * (-0.5 * s * s).exp()
            }
            Potential::Tabulated { radii, values } => spline_eval(radii, values, r).0,
        }
    }

    pub fn derivative(&self, r: f64) -> f64 {
        match self {
            Potential::Zero => 0.0,
            Potential::Sinusoid {
                amplitude,
                frequency,
                phase,
            } => amplitude * frequency * (frequency * r + phase).cos(),
            Potential::GaussianBump {
                center,
                width,
                height,
            } => {
                let s = (r - center) / width;
                -height * s / width * (-0.5 * s * s).exp()
            }
            Potential::Tabulated { radii, values } => spline_eval(radii, values, r).1,
        }
    }

    /// Declared bound on `sup |P|`.
    pub fn bound(&self) -> f64 {
        match self {
            Potential::Zero => 0.0,
            Potential::Sinusoid { amplitude, .. } => amplitude.abs(),
            Potential::GaussianBump { height, .. } => height.abs(),
            Potential::Tabulated { values, .. } => {
                // spline overshoot between knots stays within ~1.2x the data range
                1.2 * values.iter().fold(0.0f64, |a, v| a.max(v.abs()))
            }
        }
    }

    /// Declared bound on `sup |P'|`.
    pub fn derivative_bound(&self) -> f64 {
        match self {
            Potential::Zero => 0.0,
            Potential::Sinusoid {
                amplitude,
                frequency,
                ..
            } => (amplitude * frequency).abs(),
            Potential::GaussianBump { width, height, .. } => {
                // max of |s| e^{-s^2/2} is e^{-1/2} at s = 1
                (height / width).abs() * (-0.5f64).exp() * 1.01
            }
            Potential::Tabulated { radii, values } => {
                let mut worst: f64 = 0.0;
                for k in 1..radii.len() {
                    worst = worst.max(((values[k] - values[k - 1]) / (radii[k] - radii[k - 1])).abs());
                }
                2.0 * worst
            }
        }
    }

    /// Shortest length scale over which the potential varies, used to pick
    /// scan steps for root bracketing. `None` for flat potentials.
    pub fn variation_scale(&self) -> Option<f64> {
        match self {
            Potential::Zero => None,
            Potential::Sinusoid { frequency, .. } => {
                Some(2.0 * std::f64::consts::PI / frequency.abs())
            }
            Potential::GaussianBump { width, .. } => Some(width.abs() * 2.0),
            Potential::Tabulated { radii, .. } => {
                let mut min = f64::INFINITY;
                for k in 1..radii.len() {
                    min = min.min(radii[k] - radii[k - 1]);
                }
                Some(8.0 * min)
            }
        }
    }
}

/// The potential pair `(P, Q)` acting on the two components.
#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
pub struct PotentialPair {
    #[serde(rename = "P")]
    pub p: Potential,
    #[serde(rename = "Q")]
    pub q: Potential,
}

impl PotentialPair {
    pub fn zero() -> Self {
        PotentialPair {
            p: Potential::Zero,
            q: Potential::Zero,
        }
    }

    pub fn sin_sin() -> Self {
        PotentialPair {
            p: Potential::sin(),
            q: Potential::sin(),
        }
    }

    pub fn swapped(&self) -> Self {
        PotentialPair {
            p: self.q.clone(),
            q: self.p.clone(),
        }
    }

    pub fn from_json(text: &str) -> Result<Self, serde_json::Error> {
        serde_json::from_str(text)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("potential serialization")
    }
}

/// Natural cubic spline evaluation returning `(value, derivative)`.
/// Clamped to the end values outside the knot range.
fn spline_eval(radii: &[f64], values: &[f64], r: f64) -> (f64, f64) {
    let n = radii.len();
    assert!(n >= 2 && values.len() == n, "tabulated potential needs >= 2 knots");
    if r <= radii[0] {
        return (values[0], 0.0);
    }
    if r >= radii[n - 1] {
        return (values[n - 1], 0.0);
    }
    // second derivatives by the classic tridiagonal sweep (natural ends)
    let mut m = vec![0.0; n];
    let mut diag = vec![0.0; n];
    let mut rhs = vec![0.0; n];
    let mut sup = vec![0.0; n];
    for k in 1..n - 1 {
        let hm = radii[k] - radii[k - 1];
        let hp = radii[k + 1] - radii[k];
        diag[k] = 2.0 * (hm + hp);
        sup[k] = hp;
        rhs[k] = 6.0 * ((values[k + 1] - values[k]) / hp - (values[k] - values[k - 1]) / hm);
    }
    for k in 2..n - 1 {
        let hm = radii[k] - radii[k - 1];
        let f = hm / diag[k - 1];
        diag[k] -= f * sup[k - 1];
        rhs[k] -= f * rhs[k - 1];
    }
    for k in (1..n - 1).rev() {
        let hp = radii[k + 1] - radii[k];
        m[k] = (rhs[k] - if k + 1 < n - 1 { hp * m[k + 1] } else { 0.0 }) / diag[k];
    }
    let i = match radii.partition_point(|&x| x <= r) {
        0 => 0,
        j => j - 1,
    };
    let i = i.min(n - 2);
    let h = radii[i + 1] - radii[i];
    let a = (radii[i + 1] - r) / h;
    let b = (r - radii[i]) / h;
    let value = a * values[i]
        + b * values[i + 1]
        + ((a * a * a - a) * m[i] + (b * b * b - b) * m[i + 1]) * h * h / 6.0;
    let deriv = (values[i + 1] - values[i]) / h
        + ((3.0 * b * b - 1.0) * m[i + 1] - (3.0 * a * a - 1.0) * m[i]) * h / 6.0;
    (value, deriv)
}
