//! Bohr-Sommerfeld levels of a ring around the band centre.
//!
//! `cargo run --example spectrum`

use orbitsum::model::{heisenberg_time, quantize_window};
use orbitsum::RingConfig;

fn main() -> orbitsum::Result<()> {
    let cfg = RingConfig::from_energies(0.35, 20.3489573, 0.0, 30.4571694, Some(48), None)?;
    let spec = quantize_window(&cfg)?;
    let (lo, hi) = cfg.window();
    let (emin, emax) = cfg.energy_window();
    println!("ring ({lo:.4}, {hi:.4}), N = {}, tau = {:.6}", cfg.dimension(), cfg.tau());
    println!("energy span [{emin:.4}, {emax:.4}], t_H = {:.6}", heisenberg_time(&cfg, emin, emax)?);
    println!("phase span {:.6} (at most 2 pi)", cfg.phase_span());
    println!("{:>4} {:>10} {:>10} {:>9}", "n", "I_n", "E_n", "phase");
    for lv in spec.levels.iter().step_by(6) {
        println!("{:>4} {:>10.5} {:>10.5} {:>9.5}", lv.n, lv.action, lv.energy, lv.phase);
    }
    Ok(())
}
