//! The Poisson-summed phase-space integral reproduces the exact trace.
//!
//! `cargo run --release --example quadrature`

use orbitsum::exact::{default_m_cutoff, exact_trace, quadrature_trace};
use orbitsum::model::quantize_window;
use orbitsum::RingConfig;

fn main() -> orbitsum::Result<()> {
    let cfg = RingConfig::from_energies(0.01, 20.3489573, 0.0, 30.4571694, Some(1521), None)?;
    let spec = quantize_window(&cfg)?;
    for l in [1, 5, 20] {
        let q = quadrature_trace(&cfg, l, default_m_cutoff(&cfg, l), 1e-7)?;
        let e = exact_trace(&spec, &cfg, l as i64);
        println!(
            "l = {l:>2}: |q - exact| = {:.2e} (estimate {:.1e}, |m| <= {}, tail {:.2e})",
            (q.value - e).norm(),
            q.residual,
            q.m_cutoff,
            q.tail.norm()
        );
    }
    Ok(())
}
