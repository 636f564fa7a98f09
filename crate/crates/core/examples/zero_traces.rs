//! A ring on one branch of the parabola: short periods have no orbits.
//!
//! `cargo run --example zero_traces`

use orbitsum::scenario::fraction_zero_traces;
use orbitsum::semiclassical::sc_trace;
use orbitsum::RingConfig;

fn main() -> orbitsum::Result<()> {
    let (e_minus, e_plus) = (0.265678, 1250.0);
    let cfg = RingConfig::from_energies(1.0, -1.03489573, e_minus, e_plus, Some(48), None)?;
    let zeros: Vec<usize> = (1..=48).filter(|&l| sc_trace(&cfg, l).norm() == 0.0).collect();
    println!("vanishing traces: l = {}..={}", zeros[0], zeros[zeros.len() - 1]);
    let f = fraction_zero_traces(&cfg, e_minus, e_plus)?;
    println!("f = {:.5}, f N = {:.2}, counted {}, onset {:.3}", f.formula, f.formula * f.n as f64, f.count, f.onset);
    Ok(())
}
