//! The reduction machinery around one ring: defect norm, contraction
//! iteration, coercivity of the projected operator, multipliers and the
//! reduced scalar equation for the ring radius.
//!
//! Run with: `cargo run --example reduction_diagnostics`

use ring_bec::coupling::CouplingParams;
use ring_bec::grid::{GridConfig, RadialGrid};
use ring_bec::landscape::Landscape;
use ring_bec::potential::PotentialPair;
use ring_bec::reduction::{solve_reduced_for_radius, ReductionEngine};
use ring_bec::solver::{Geometry, SolveConfig, System};

fn main() {
    let lambda = 50.0;
    let coupling = CouplingParams::from_epsilon(1e-4).unwrap();
    let pots = PotentialPair::sin_sin();
    let landscape = Landscape::new(pots.clone(), &coupling, lambda);
    let y = landscape.predicted_concentration((0.6, 1.5), 1e-3).unwrap().y;
    let grid = RadialGrid::build(lambda, y, &GridConfig::default()).unwrap();
    let sys = System::new(coupling, pots, lambda, Geometry::Radial);

    let engine = ReductionEngine::new(&sys, &grid, y).unwrap();
    let (_, report) = engine.contract(1e-12, 50).unwrap();
    let (rho, iters) = engine.coercivity().unwrap();
    println!("reduction at multiplier {lambda}, trial radius {y:.4}:");
    println!("  defect norm            |l|     = {:.4e}", report.l_norm);
    println!("  correction norm        |omega| = {:.4e}", report.omega_norm);
    println!("  contraction ratios              {:?}", report.contraction_ratios.iter().map(|r| format!("{r:.1e}")).collect::<Vec<_>>());
    println!("  coercivity             rho     = {rho:.4} ({iters} inverse iterations)");
    println!("  multipliers            (b1,b2) = ({:+.3e}, {:+.3e})", report.b1, report.b2);
    println!("  reduced equation value         = {:+.4e} (bare ansatz {:+.4e})", report.reduced_value, report.reduced_value_bare);

    // the reduced-equation root agrees with the landscape critical point
    let (root, _, at_root) = solve_reduced_for_radius(&sys, &grid, (y - 0.3, y + 0.3), 1e-12, 1e-10).unwrap();
    println!("\nreduced-equation root r* = {root:.6} (landscape pick {y:.6}, gap {:.2e})", (root - y).abs());
    println!("  multipliers there vanish: ({:+.1e}, {:+.1e})", at_root.b1, at_root.b2);

    // and the corrected fields at the root match an independent Newton solve
    let engine_root = ReductionEngine::new(&sys, &grid, root).unwrap();
    let (omega, _) = engine_root.contract(1e-12, 50).unwrap();
    let corrected = engine_root.corrected_fields(&omega);
    let newton = sys.newton(corrected.clone(), &grid, &SolveConfig::default()).unwrap();
    let gap = corrected.minus(&newton.fields).norm2() / newton.fields.norm2();
    println!("  corrected fields vs independent Newton solve: relative distance {gap:.2e}");
}
