//! Exact traces against the periodic-orbit sum, with and without the edge
//! terms, and the damping effect of a complex period.
//!
//! `cargo run --example traces`

use orbitsum::exact::exact_traces;
use orbitsum::model::quantize_window;
use orbitsum::semiclassical::{complex_time_trace, edge_corrected_traces, periodic_orbits, sc_traces};
use orbitsum::RingConfig;

fn main() -> orbitsum::Result<()> {
    let cfg = RingConfig::from_energies(0.35, 20.3489573, 0.0, 30.4571694, Some(48), None)?;
    let spec = quantize_window(&cfg)?;
    let n = cfg.dimension();
    let ex = exact_traces(&spec, &cfg, n);
    let sc = sc_traces(&cfg, n);
    let ec = edge_corrected_traces(&cfg, n);

    println!("{:>3} {:>7} {:>10} {:>10} {:>12}", "l", "orbits", "|exact|", "|sc-ex|", "|edge-ex|");
    for l in (1..=n).step_by(5) {
        println!(
            "{l:>3} {:>7} {:>10.4} {:>10.4} {:>12.4}",
            periodic_orbits(&cfg, l).len(),
            ex.values[l].norm(),
            (sc.values[l] - ex.values[l]).norm(),
            (ec.values[l] - ex.values[l]).norm(),
        );
    }

    let l = 10;
    for f in [0.0, 0.01, 0.02, 0.05] {
        let (e, s) = complex_time_trace(&spec, &cfg, l, f)?;
        println!("tau (1 - {f} i): l = {l} relative error {:.4}", (s - e).norm() / e.norm());
    }
    Ok(())
}
