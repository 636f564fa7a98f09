//! Periodic-orbit resummation for an integrable stroboscopic quantum map.
//!
//! The model is the map generated every period `tau` by the quadratic
//! Hamiltonian `H(I) = (I - script_i)^2 / 2` restricted to an action ring
//! `i_minus < I < i_plus`. Because the spectrum is known exactly, each stage of
//! the semiclassical pipeline can be checked against ground truth:
//!
//! * [`model`]: ring configuration, Bohr-Sommerfeld levels and derived scales.
//! * [`exact`]: exact traces, the exact characteristic polynomial and a
//!   quadrature evaluation of the Poisson-transformed trace integral.
//! * [`semiclassical`]: stationary-phase traces, leading-order edge
//!   corrections, cosine-weighted and complex-time variants.
//! * [`resolvent`]: exact, truncated-Fourier and semiclassical resolvents and
//!   their peaks.
//! * [`specdet`]: characteristic polynomials from traces via Newton's
//!   identities, and self-inversive symmetrization.
//! * [`roots`]: root finding, unit-circle statistics, root pairing and energy
//!   inference.
//! * [`scenario`]: the figure pipelines, writing CSV/JSON artifacts.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod accum;
pub mod config;
pub mod error;
pub mod exact;
pub mod io;
pub mod model;
pub mod resolvent;
pub mod roots;
pub mod scenario;
pub mod semiclassical;
pub mod specdet;

mod assignment;
mod dd;

pub use error::{Error, Result};
pub use model::{QuantizedSpectrum, RingConfig};
pub use num_complex::Complex64;
