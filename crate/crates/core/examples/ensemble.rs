//! Fraction of unit-circle roots for random self-inversive polynomials.
//!
//! `cargo run --release --example ensemble`

use orbitsum::roots::{ensemble_circle_fraction, TOL_CIRCLE, TOL_CIRCLE_COARSE};

fn main() -> orbitsum::Result<()> {
    for n in [8, 24, 48, 96] {
        let fine = ensemble_circle_fraction(n, 200, 1, TOL_CIRCLE)?;
        let coarse = ensemble_circle_fraction(n, 200, 1, TOL_CIRCLE_COARSE)?;
        println!("N = {n:>2}: {fine:.4} within 1e-6, {coarse:.4} within 1e-3");
    }
    Ok(())
}
