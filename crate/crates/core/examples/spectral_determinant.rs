//! Characteristic polynomial from semiclassical traces, and its two
//! self-inversive completions.
//!
//! `cargo run --example spectral_determinant`

use orbitsum::exact::{det_u, exact_char_poly};
use orbitsum::model::quantize_window;
use orbitsum::semiclassical::sc_traces;
use orbitsum::specdet::{
    newton_coeffs, relative_coeff_error, self_inversive_residual, symmetrize_bottom_up, symmetrize_top_down,
    truncated_specdet,
};
use orbitsum::RingConfig;

fn main() -> orbitsum::Result<()> {
    let cfg = RingConfig::from_energies(1.0, 41.2345, 0.0, 100.1234, None, None)?;
    let spec = quantize_window(&cfg)?;
    let n = spec.len();
    let exact = exact_char_poly(&spec, &cfg);
    let det = det_u(&spec, &cfg);
    let raw = newton_coeffs(&sc_traces(&cfg, n), n)?;
    println!("N = {n}, det U = {det:.6}");
    for k in [1, 2, 4, 8, 14] {
        let (r, e) = (raw.coeffs[k], exact.coeffs[k]);
        println!("c_{k:<2} exact {:>10.4}  raw {:>10.4}  rel err {:.3}", e.norm(), r.norm(), (r - e).norm() / e.norm());
    }
    for p in [&raw, &symmetrize_bottom_up(&raw, det)?, &symmetrize_top_down(&raw, det)?] {
        println!(
            "{:<9} residual {:.2e}, relative error {:.3e}",
            p.mode.as_str(),
            self_inversive_residual(p, det),
            relative_coeff_error(p, &exact)
        );
    }

    // A case (ii) ring: half of the traces vanish and only the end terms survive.
    let cfg = RingConfig::from_energies(1.0, -1.03489573, 0.265678, 1250.0, Some(48), None)?;
    let spec = quantize_window(&cfg)?;
    let det = det_u(&spec, &cfg);
    let bottom = symmetrize_bottom_up(&newton_coeffs(&sc_traces(&cfg, 48), 48)?, det)?;
    println!("case (ii): bottom-up equals 1 + det z^48: {}", bottom.coeffs == truncated_specdet(det, 48)?.coeffs);
    Ok(())
}
