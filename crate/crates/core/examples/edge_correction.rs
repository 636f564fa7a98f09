//! The endpoint contribution of a single trace, term by term.
//!
//! `cargo run --example edge_correction`

use orbitsum::exact::{default_m_cutoff, quadrature_trace};
use orbitsum::semiclassical::{edge_correction, edge_correction_with, sc_trace, EdgeTerms, Z_MIN};
use orbitsum::RingConfig;

fn main() -> orbitsum::Result<()> {
    for hbar in [0.04, 0.02, 0.01] {
        let cfg = RingConfig::new(hbar, 1.3, 10.2, 8.713, 12.137, None)?;
        let l = 2;
        let q = quadrature_trace(&cfg, l, default_m_cutoff(&cfg, l), 1e-8)?.value;
        let sc = sc_trace(&cfg, l);
        let all = edge_correction(&cfg, l);
        let near = edge_correction_with(&cfg, l, EdgeTerms::Neighbors(1), Z_MIN);
        println!(
            "hbar {hbar}: |sc - q| = {:.3e}, all m {:.3e}, neighbours {:.3e}, flagged {}",
            (sc - q).norm(),
            (sc + all.value - q).norm(),
            (sc + near.value - q).norm(),
            all.flagged.len(),
        );
    }
    Ok(())
}
