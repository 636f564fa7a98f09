//! Cosine weighting suppresses the edge error of the l = 1 trace across the
//! time range up to t_H.
//!
//! `cargo run --release --example weighted_trace`

use orbitsum::exact::{exact_trace, exact_weighted_trace};
use orbitsum::model::{heisenberg_time, quantize_window};
use orbitsum::semiclassical::{sc_trace, sc_weighted_trace};
use orbitsum::RingConfig;

fn main() -> orbitsum::Result<()> {
    let base = RingConfig::from_energies(0.01, 20.3489573, 0.0, 30.4571694, Some(1521), None)?;
    let (emin, emax) = base.energy_window();
    let t_h = heisenberg_time(&base, emin, emax)?;
    for x in [0.1, 0.25, 0.5, 0.75, 1.0] {
        let cfg = base.with_tau(x * t_h)?;
        let spec = quantize_window(&cfg)?;
        let plain = (sc_trace(&cfg, 1) - exact_trace(&spec, &cfg, 1)).norm();
        let weighted = (sc_weighted_trace(&cfg, 1, emax) - exact_weighted_trace(&spec, &cfg, 1, emax)).norm();
        println!("t/t_H = {x:<4}: plain {plain:.4}, weighted {weighted:.5}");
    }
    Ok(())
}
