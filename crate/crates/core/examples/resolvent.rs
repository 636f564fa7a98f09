//! Peaks of the exact resolvent sit at the eigenphases; the poles of the
//! resummed semiclassical resolvent sit at the quantized actions.
//!
//! `cargo run --release --example resolvent`

use orbitsum::model::quantize_window;
use orbitsum::resolvent::{divergence_locus, exact_scan, resolvent_peaks, sc_scan, NoiseFloor, ScResolventOptions};
use orbitsum::RingConfig;

fn main() -> orbitsum::Result<()> {
    let cfg = RingConfig::from_energies(0.35, 20.3489573, 0.0, 30.4571694, Some(48), None)?;
    let spec = quantize_window(&cfg)?;
    let scan = exact_scan(&spec, 1 << 14, 1e-3)?;
    let peaks = resolvent_peaks(&scan, NoiseFloor::default(), Some(spec.len()));
    println!("{} exact peaks for {} levels, grid step {:.2e}", peaks.len(), spec.len(), scan.step());

    let opts = ScResolventOptions::for_config(&cfg, 0.01);
    let locus = divergence_locus(&cfg, &sc_scan(&cfg, 1 << 14, &opts), &opts, NoiseFloor::default());
    for p in locus.iter().take(6) {
        let n = p.action / cfg.hbar() - 0.5;
        println!("theta {:.5} branch {:>2}: I = {:.5} = hbar ({n:.3} + 1/2)", p.theta, p.k, p.action);
    }
    Ok(())
}
