//! Integral identity audits and asymptotic ratio checks on computed
//! solutions.
//!
//! The audits use their own node quadrature and centered gradients,
//! independent of the solver's algebra, so their residuals measure genuine
//! discretization consistency and shrink at second order under refinement.

use crate::landscape::Landscape;
use crate::profile::ProfileConstants;
use crate::solver::{Geometry, SolutionBundle};
use serde::Serialize;
use thiserror::Error;

/// Anchor strings naming each audited relation; every emitted number in a
/// report carries one of these.
pub mod anchors {
    /// weak-form energy balance: weighted gradient + mass terms against
    /// the quartic interaction terms
    pub const ENERGY_BALANCE: &str = "energy-balance";
    /// radial virial balance: twice the kinetic term minus the potential
    /// moment against the quartic terms
    pub const VIRIAL_BALANCE: &str = "virial-balance";
    /// same balance with the cross term carrying an extra radius weight
    pub const VIRIAL_BALANCE_ALT_WEIGHT: &str = "virial-balance-alt-weight";
    /// kinetic term against its concentration leading order
    pub const KINETIC_LEADING: &str = "kinetic-leading";
    /// quartic term against its concentration leading order
    pub const QUARTIC_LEADING: &str = "quartic-leading";
    /// quartic-to-kinetic ratio, tending to four
    pub const QUARTIC_OVER_KINETIC: &str = "quartic-over-kinetic";
    /// potential-derivative moment against its leading order
    pub const POTENTIAL_MOMENT: &str = "potential-moment";
    /// total mass against its concentration leading order
    pub const MASS_LEADING: &str = "mass-leading";
    /// landscape slope at the measured peak
    pub const CONCENTRATION_SLOPE: &str = "concentration-slope";
    /// fitted exponential decay rate of the profile tails
    pub const DECAY_RATE: &str = "decay-rate";
}

#[derive(Debug, Clone, Error)]
pub enum AuditError {
    #[error("fewer than the required 10 tail samples in the fit range (found {found})")]
    InsufficientTail { found: usize },
    #[error("solution has no interior peak to audit against")]
    NoPeak,
}

/// One audited number with its anchor.
#[derive(Debug, Clone, Serialize)]
pub struct AuditEntry {
    pub anchor: &'static str,
    pub value: f64,
}

/// Full audit of a converged solution.
#[derive(Debug, Clone, Serialize)]
pub struct AuditReport {
    pub lambda: f64,
    pub r_peak: Option<f64>,
    /// zero solution: residuals are reported as zero by convention
    pub degenerate: bool,
    pub energy_residual: f64,
    pub virial_residual: f64,
    pub virial_residual_alt_weight: f64,
    pub kinetic_ratio: f64,
    pub quartic_ratio: f64,
    pub quartic_over_kinetic: f64,
    pub potential_moment_ratio: f64,
    pub mass_ratio: f64,
    pub landscape_slope_at_peak: f64,
    pub weighted_potential_derivative: f64,
    pub decay_rate: f64,
    pub entries: Vec<AuditEntry>,
}

/// Discrete integrals of a bundle, via midpoint quadrature and centered
/// gradients with the grid's ghost closures.
struct Integrals {
    kinetic: f64,
    weighted_mass: f64,
    quartic: f64,
    cross_quartic_plain: f64,
    cross_quartic_extra_r: f64,
    potential_moment: f64,
}

fn integrals(bundle: &SolutionBundle) -> Integrals {
    let grid = &bundle.grid;
    let n = grid.n;
    let h = grid.h;
    let c = &bundle.coupling;
    let u = &bundle.fields.u;
    let v = &bundle.fields.v;
    let mut kinetic = 0.0;
    let mut weighted_mass = 0.0;
    let mut quartic = 0.0;
    let mut cross_plain = 0.0;
    let mut cross_extra = 0.0;
    let mut moment = 0.0;
    for i in 0..n {
        let r = grid.r(i);
        let w = match bundle.geometry {
            Geometry::Radial => r * h,
            Geometry::Line => h,
        };
        let um = if i == 0 { u[0] } else { u[i - 1] };
        let up = if i == n - 1 { -u[n - 1] } else { u[i + 1] };
        let vm = if i == 0 { v[0] } else { v[i - 1] };
        let vp = if i == n - 1 { -v[n - 1] } else { v[i + 1] };
        let du = (up - um) / (2.0 * h);
        let dv = (vp - vm) / (2.0 * h);
        let pu = bundle.potentials.p.value(r);
        let qv = bundle.potentials.q.value(r);
        kinetic += w * (du * du + dv * dv);
        weighted_mass +=
            w * ((bundle.lambda + pu) * u[i] * u[i] + (bundle.lambda + qv) * v[i] * v[i]);
        let uu = u[i] * u[i];
        let vv = v[i] * v[i];
        quartic += w * (c.alpha * uu * uu + c.gamma * vv * vv);
        cross_plain += w * 2.0 * c.beta * uu * vv;
        cross_extra += w * r * 2.0 * c.beta * uu * vv;
        moment += w * r
            * (bundle.potentials.p.derivative(r) * uu + bundle.potentials.q.derivative(r) * vv);
    }
    Integrals {
        kinetic,
        weighted_mass,
        quartic,
        cross_quartic_plain: cross_plain,
        cross_quartic_extra_r: cross_extra,
        potential_moment: moment,
    }
}

/// Relative residual of the weak-form energy balance.
pub fn energy_balance_residual(bundle: &SolutionBundle) -> f64 {
    if bundle.trivial {
        return 0.0;
    }
    let ints = integrals(bundle);
    let lhs = ints.kinetic + ints.weighted_mass;
    let rhs = ints.quartic + ints.cross_quartic_plain;
    (lhs - rhs).abs() / rhs.abs().max(f64::MIN_POSITIVE)
}

/// Residuals of the dilation (virial) balance.
///
/// Radial geometry: twice the kinetic term minus the potential moment
/// against the quartic terms, in the derivation-consistent form and in the
/// variant carrying an extra radius weight on the cross term (the
/// consistent form drives pass/fail; both are reported). Line geometry:
/// the dilation balance centered at the peak, which reduces to the
/// limit-pair integral combination for constant potentials.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct VirialResiduals {
    pub consistent: f64,
    pub alt_weight: f64,
}

pub fn virial_residuals(bundle: &SolutionBundle) -> VirialResiduals {
    if bundle.trivial {
        return VirialResiduals {
            consistent: 0.0,
            alt_weight: 0.0,
        };
    }
    let ints = integrals(bundle);
    match bundle.geometry {
        Geometry::Radial => {
            let lhs = 2.0 * ints.kinetic - ints.potential_moment;
            let rhs = ints.quartic + ints.cross_quartic_plain;
            let rhs_alt = ints.quartic + ints.cross_quartic_extra_r;
            VirialResiduals {
                consistent: (lhs - rhs).abs() / rhs.abs().max(f64::MIN_POSITIVE),
                alt_weight: (lhs - rhs_alt).abs() / rhs_alt.abs().max(f64::MIN_POSITIVE),
            }
        }
        Geometry::Line => {
            // -K + int (lambda+P) u^2 + (lambda+Q) v^2
            //    + int (r - r_peak)(P' u^2 + Q' v^2)
            //  = 1/2 int (alpha u^4 + gamma v^4 + 2 beta u^2 v^2)
            let center = bundle.r_peak.unwrap_or(0.0);
            let grid = &bundle.grid;
            let mut moment = 0.0;
            for i in 0..grid.n {
                let r = grid.r(i);
                let u = bundle.fields.u[i];
                let v = bundle.fields.v[i];
                moment += grid.h
                    * (r - center)
                    * (bundle.potentials.p.derivative(r) * u * u
                        + bundle.potentials.q.derivative(r) * v * v);
            }
            let lhs = -ints.kinetic + ints.weighted_mass + moment;
            let rhs = 0.5 * (ints.quartic + ints.cross_quartic_plain);
            let residual = (lhs - rhs).abs() / rhs.abs().max(f64::MIN_POSITIVE);
            VirialResiduals {
                consistent: residual,
                alt_weight: residual,
            }
        }
    }
}

/// Measured-to-predicted ratios of the concentration asymptotics.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct AsymptoticRatios {
    pub kinetic: f64,
    pub quartic: f64,
    pub quartic_over_kinetic: f64,
    pub potential_moment: f64,
    pub mass: f64,
}

pub fn asymptotic_ratios(
    bundle: &SolutionBundle,
    constants: &ProfileConstants,
) -> Result<AsymptoticRatios, AuditError> {
    let r_peak = bundle.r_peak.ok_or(AuditError::NoPeak)?;
    let ints = integrals(bundle);
    let c = &bundle.coupling;
    let eps = c.epsilon;
    let lam = bundle.lambda;
    let kin_pred = eps * constants.a * lam.powf(1.5) * r_peak;
    let quart_pred = 4.0 * kin_pred;
    let det = c.alpha * c.gamma - c.beta * c.beta;
    let dp = bundle.potentials.p.derivative(r_peak);
    let dq = bundle.potentials.q.derivative(r_peak);
    let moment_pred = 3.0 * constants.a * ((c.gamma - c.beta) * dp + (c.alpha - c.beta) * dq)
        / det
        * lam.sqrt()
        * r_peak
        * r_peak;
    let mass_pred = 2.0 * std::f64::consts::PI * eps * constants.i2 * lam.sqrt() * r_peak;
    let quartic = ints.quartic + ints.cross_quartic_plain;
    Ok(AsymptoticRatios {
        kinetic: ints.kinetic / kin_pred,
        quartic: quartic / quart_pred,
        quartic_over_kinetic: quartic / ints.kinetic,
        potential_moment: ints.potential_moment / moment_pred,
        mass: bundle.mass / mass_pred,
    })
}

/// `(M'(r_peak), (gamma-beta) P'(r_peak) + (alpha-beta) Q'(r_peak))`:
/// both quantities the concentration condition drives to zero.
pub fn concentration_condition(bundle: &SolutionBundle) -> Result<(f64, f64), AuditError> {
    let r_peak = bundle.r_peak.ok_or(AuditError::NoPeak)?;
    let landscape = Landscape::new(bundle.potentials.clone(), &bundle.coupling, bundle.lambda);
    let slope = landscape.derivative(r_peak).unwrap_or(f64::NAN);
    let c = &bundle.coupling;
    let combo = (c.gamma - c.beta) * bundle.potentials.p.derivative(r_peak)
        + (c.alpha - c.beta) * bundle.potentials.q.derivative(r_peak);
    Ok((slope, combo))
}

/// Least-squares exponential decay rate of the tails: the slope of
/// `log u` against `sqrt(lambda) |r - r_peak|` over the window where the
/// field lies in `[1e-8, 1e-2]` of its peak. Returns the smaller of the
/// two component rates.
pub fn decay_rate_estimate(bundle: &SolutionBundle) -> Result<f64, AuditError> {
    let r_peak = bundle.r_peak.ok_or(AuditError::NoPeak)?;
    let rate_u = component_decay_rate(&bundle.fields.u, bundle, r_peak)?;
    let rate_v = component_decay_rate(&bundle.fields.v, bundle, r_peak)?;
    Ok(rate_u.min(rate_v))
}

fn component_decay_rate(
    values: &[f64],
    bundle: &SolutionBundle,
    r_peak: f64,
) -> Result<f64, AuditError> {
    let peak = values.iter().fold(0.0f64, |m, &x| m.max(x));
    let sqrt_l = bundle.lambda.sqrt();
    let mut sx = 0.0;
    let mut sy = 0.0;
    let mut sxx = 0.0;
    let mut sxy = 0.0;
    let mut count = 0usize;
    for (i, &x) in values.iter().enumerate() {
        if x >= 1e-8 * peak && x <= 1e-2 * peak {
            let d = sqrt_l * (bundle.grid.r(i) - r_peak).abs();
            let y = x.ln();
            sx += d;
            sy += y;
            sxx += d * d;
            sxy += d * y;
            count += 1;
        }
    }
    if count < 10 {
        return Err(AuditError::InsufficientTail { found: count });
    }
    let n = count as f64;
    let slope = (n * sxy - sx * sy) / (n * sxx - sx * sx);
    Ok(-slope)
}

/// Run every audit on a bundle.
pub fn audit(bundle: &SolutionBundle, constants: &ProfileConstants) -> AuditReport {
    let degenerate = bundle.trivial;
    let energy = energy_balance_residual(bundle);
    let virial = virial_residuals(bundle);
    let (ratios, slope, combo, decay) = if degenerate {
        (
            AsymptoticRatios {
                kinetic: 0.0,
                quartic: 0.0,
                quartic_over_kinetic: 0.0,
                potential_moment: 0.0,
                mass: 0.0,
            },
            f64::NAN,
            f64::NAN,
            f64::NAN,
        )
    } else {
        let ratios = asymptotic_ratios(bundle, constants).unwrap_or(AsymptoticRatios {
            kinetic: f64::NAN,
            quartic: f64::NAN,
            quartic_over_kinetic: f64::NAN,
            potential_moment: f64::NAN,
            mass: f64::NAN,
        });
        let (slope, combo) = concentration_condition(bundle).unwrap_or((f64::NAN, f64::NAN));
        let decay = decay_rate_estimate(bundle).unwrap_or(f64::NAN);
        (ratios, slope, combo, decay)
    };
    let entries = vec![
        AuditEntry {
            anchor: anchors::ENERGY_BALANCE,
            value: energy,
        },
        AuditEntry {
            anchor: anchors::VIRIAL_BALANCE,
            value: virial.consistent,
        },
        AuditEntry {
            anchor: anchors::VIRIAL_BALANCE_ALT_WEIGHT,
            value: virial.alt_weight,
        },
        AuditEntry {
            anchor: anchors::KINETIC_LEADING,
            value: ratios.kinetic,
        },
        AuditEntry {
            anchor: anchors::QUARTIC_LEADING,
            value: ratios.quartic,
        },
        AuditEntry {
            anchor: anchors::QUARTIC_OVER_KINETIC,
            value: ratios.quartic_over_kinetic,
        },
        AuditEntry {
            anchor: anchors::POTENTIAL_MOMENT,
            value: ratios.potential_moment,
        },
        AuditEntry {
            anchor: anchors::MASS_LEADING,
            value: ratios.mass,
        },
        AuditEntry {
            anchor: anchors::CONCENTRATION_SLOPE,
            value: slope,
        },
        AuditEntry {
            anchor: anchors::DECAY_RATE,
            value: decay,
        },
    ];
    AuditReport {
        lambda: bundle.lambda,
        r_peak: bundle.r_peak,
        degenerate,
        energy_residual: energy,
        virial_residual: virial.consistent,
        virial_residual_alt_weight: virial.alt_weight,
        kinetic_ratio: ratios.kinetic,
        quartic_ratio: ratios.quartic,
        quartic_over_kinetic: ratios.quartic_over_kinetic,
        potential_moment_ratio: ratios.potential_moment,
        mass_ratio: ratios.mass,
        landscape_slope_at_peak: slope,
        weighted_potential_derivative: combo,
        decay_rate: decay,
        entries,
    }
}

/// Observed convergence orders from a refinement sequence `(h, value)`.
///
/// Values converging to a known zero target use adjacent-pair log ratios;
/// general values use Richardson triples of successive differences.
pub fn refinement_orders(samples: &[(f64, f64)], zero_target: bool) -> Vec<f64> {
    let mut orders = Vec::new();
    if zero_target {
        for k in 1..samples.len() {
            let (h0, v0) = samples[k - 1];
            let (h1, v1) = samples[k];
            orders.push((v0.abs() / v1.abs()).ln() / (h0 / h1).ln());
        }
    } else {
        for k in 2..samples.len() {
            let (h0, v0) = samples[k - 2];
            let (h1, v1) = samples[k - 1];
            let (_, v2) = samples[k];
            let ratio = ((v0 - v1) / (v1 - v2)).abs();
            orders.push(ratio.ln() / (h0 / h1).ln());
        }
    }
    orders
}
