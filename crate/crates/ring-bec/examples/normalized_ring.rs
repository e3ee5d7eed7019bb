//! The outer problem: tune the multiplier until the state carries unit
//! total mass, and verify the existence bracket.
//!
//! Run with: `cargo run --example normalized_ring`

use ring_bec::coupling::CouplingParams;
use ring_bec::normalize::{multiplier_bracket, normalize, NormalizeConfig};
use ring_bec::potential::PotentialPair;
use ring_bec::profile::ProfileConstants;

fn main() {
    let epsilon = 3e-4;
    let theta = 0.1;
    let coupling = CouplingParams::from_epsilon(epsilon).unwrap();
    let constants = ProfileConstants::compute(20.0, 1e-3);
    let (lo, hi) = multiplier_bracket(epsilon, theta, constants.a);
    println!("mass parameter {epsilon}: existence bracket ({lo:.4}, {hi:.4})");

    let solution = normalize(
        &coupling,
        &PotentialPair::sin_sin(),
        theta,
        constants.a,
        &NormalizeConfig::default(),
    )
    .expect("normalized ring");
    println!("  multiplier      = {:.8} (inside bracket: {})", solution.lambda, solution.lambda_in_bracket);
    println!("  |mass - 1|      = {:.2e}", solution.mass_error);
    println!("  ring radius     = {:.6} (landscape critical point {:.6})", solution.r_peak, solution.y);
    println!("  peak offset     = {:.2e}", solution.peak_offset);
    println!("  correction norm = {:.4e}", solution.omega_norm);
    println!("  solver iterations at the root: {}", solution.bundle.iterations);
}
