//! Roots of the exact and symmetrized polynomials, their matching, and
//! energies read back from the phases.
//!
//! `cargo run --release --example roots`

use orbitsum::exact::{det_u, exact_char_poly};
use orbitsum::model::quantize_window;
use orbitsum::roots::{
    find_roots, infer_energies_unwrapped, match_roots, reciprocal_closure, unit_circle_stats, RootSet,
    TARGET_RESIDUAL, TOL_CIRCLE,
};
use orbitsum::semiclassical::sc_traces;
use orbitsum::specdet::{newton_coeffs, symmetrize_bottom_up};
use orbitsum::RingConfig;

fn main() -> orbitsum::Result<()> {
    let cfg = RingConfig::from_energies(0.35, 20.3489573, 0.0, 30.4571694, Some(48), None)?;
    let spec = quantize_window(&cfg)?;
    let n = spec.len();
    let reference = RootSet::from_exact(spec.char_roots());

    let exact = find_roots(&exact_char_poly(&spec, &cfg), TARGET_RESIDUAL)?;
    let energies = infer_energies_unwrapped(&exact, &cfg)?;
    let worst = energies
        .iter()
        .map(|e| spec.energies().iter().map(|x| (x - e).abs()).fold(f64::INFINITY, f64::min))
        .fold(0.0, f64::max);
    println!("exact: pairing max {:.1e}, energies recovered to {worst:.1e}", match_roots(&exact, &reference).max_distance());

    let sym = symmetrize_bottom_up(&newton_coeffs(&sc_traces(&cfg, n), n)?, det_u(&spec, &cfg))?;
    let rs = find_roots(&sym, TARGET_RESIDUAL)?;
    let (frac, dev) = unit_circle_stats(&rs, TOL_CIRCLE);
    let pairing = match_roots(&rs, &reference);
    println!(
        "bottom-up: {:.0}% on the circle (max deviation {dev:.2e}), reciprocal closure {:.1e}, mean pairing {:.3}",
        100.0 * frac,
        reciprocal_closure(&rs),
        pairing.mean_distance()
    );
    Ok(())
}
