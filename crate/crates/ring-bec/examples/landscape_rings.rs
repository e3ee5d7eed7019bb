//! The concentration landscape and its critical points.
//!
//! With sinusoidal traps the landscape develops pairs of nondegenerate
//! critical points once the radius exceeds about two thirds of the
//! multiplier; each is a candidate ring. The count grows with the
//! multiplier.
//!
//! Run with: `cargo run --example landscape_rings`

use ring_bec::coupling::CouplingParams;
use ring_bec::landscape::Landscape;
use ring_bec::potential::PotentialPair;

fn main() {
    let coupling = CouplingParams::new(1.0, 1.0, 3.0).unwrap();
    let pots = PotentialPair::sin_sin();

    let landscape = Landscape::new(pots.clone(), &coupling, 100.0);
    println!("critical points of the landscape in [67, 75] at multiplier 100:");
    for p in landscape.critical_points((67.0, 75.0), 1e-3).unwrap() {
        let kind = if p.m_second < 0.0 { "max" } else { "min" };
        println!("  y = {:.6} ({kind}, M'' = {:+.4})", p.y, p.m_second);
    }

    println!("\nring radius predicted for each multiplier (closest admissible critical point):");
    for lambda in [50.0, 100.0, 200.0, 400.0] {
        let landscape = Landscape::new(pots.clone(), &coupling, lambda);
        let pick = landscape.predicted_concentration((0.6, 1.5), 1e-3).unwrap();
        let window = (0.6 * lambda, 1.5 * lambda);
        let count = landscape.critical_points(window, 1e-3).unwrap().len();
        println!(
            "  lambda = {lambda:5}: y = {:9.4}, |M'(y)| = {:.1e}, branches in window = {count}",
            pick.y,
            landscape.derivative(pick.y).unwrap().abs()
        );
    }

    println!("\nflat potentials leave the landscape slope at one everywhere:");
    let flat = Landscape::new(PotentialPair::zero(), &coupling, 100.0);
    println!("  critical points in [60, 150]: {:?}", flat.critical_points((60.0, 150.0), 1e-3).err().map(|e| e.to_string()));
}
