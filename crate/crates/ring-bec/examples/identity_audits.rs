//! Integral identity audits of a computed ring and their refinement study.
//!
//! The energy balance and the radial virial balance hold exactly in the
//! continuum; on the grid their residuals measure discretization error and
//! shrink at second order. The concentration asymptotics are checked as
//! measured-to-predicted ratios.
//!
//! Run with: `cargo run --example identity_audits`

use ring_bec::audit::{audit, refinement_orders};
use ring_bec::coupling::CouplingParams;
use ring_bec::grid::{GridConfig, RadialGrid};
use ring_bec::landscape::Landscape;
use ring_bec::potential::PotentialPair;
use ring_bec::profile::ProfileConstants;
use ring_bec::reduction::solve_ring;
use ring_bec::solver::{Geometry, SolveConfig, System};

fn main() {
    let lambda = 100.0;
    let coupling = CouplingParams::from_epsilon(1e-4).unwrap();
    let pots = PotentialPair::sin_sin();
    let constants = ProfileConstants::compute(20.0, 1e-3);
    let landscape = Landscape::new(pots.clone(), &coupling, lambda);
    let y = landscape.predicted_concentration((0.6, 1.5), 1e-3).unwrap().y;
    let sys = System::new(coupling, pots, lambda, Geometry::Radial);

    let mut energy = Vec::new();
    let mut virial = Vec::new();
    println!("audits at multiplier {lambda} under grid refinement:");
    for ppw in [12.0, 24.0, 48.0] {
        let grid_cfg = GridConfig { points_per_width: ppw, ..GridConfig::default() };
        let grid = RadialGrid::build(lambda, y, &grid_cfg).unwrap();
        let bundle = solve_ring(&sys, &grid, y, &SolveConfig::default()).unwrap();
        let report = audit(&bundle, &constants);
        println!(
            "  h = {:.6}: energy balance {:.3e}, virial balance {:.3e} (alt weight {:.3e})",
            grid.h, report.energy_residual, report.virial_residual, report.virial_residual_alt_weight
        );
        if ppw == 12.0 {
            println!("    kinetic ratio {:.4}, quartic/kinetic {:.4}, mass ratio {:.4}, potential moment {:.4}",
                report.kinetic_ratio, report.quartic_over_kinetic, report.mass_ratio, report.potential_moment_ratio);
            println!("    landscape slope at peak {:+.3e}, decay rate {:.3}",
                report.landscape_slope_at_peak, report.decay_rate);
        }
        energy.push((grid.h, report.energy_residual));
        virial.push((grid.h, report.virial_residual));
    }
    println!("observed orders: energy {:?}, virial {:?}",
        refinement_orders(&energy, true).iter().map(|o| format!("{o:.3}")).collect::<Vec<_>>(),
        refinement_orders(&virial, true).iter().map(|o| format!("{o:.3}")).collect::<Vec<_>>());
}
