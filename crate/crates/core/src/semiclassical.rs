//! Stationary-phase traces over periodic orbits, their leading endpoint
//! corrections, and the cosine-weighted and complex-time variants.
//!
//! For the quadratic model the orbits of period `l` sit at
//! `I_ml = script_i + 2 pi m / (l tau)` and
//!
//! ```text
//! Tr_sc(U^l) = sqrt(2 pi / (hbar l tau)) e^{-i pi/4} sum_m (-1)^m exp(i S_ml / hbar)
//! ```
//!
//! with `S_ml = 2 pi m I_ml - l tau H(I_ml)`.

use std::f64::consts::{FRAC_PI_4, PI, TAU};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::accum::ComplexAcc;
use crate::exact::{lattice_pole_sum, lattice_pole_sum_except, TraceKind, TraceSeries};
use crate::{Error, QuantizedSpectrum, Result, RingConfig};

const I: Complex64 = Complex64 { re: 0.0, im: 1.0 };

/// Below this rescaled edge distance the endpoint series is not asymptotic.
pub const Z_MIN: f64 = 1.5;

/// Largest decay or growth exponent accepted for complex times.
pub const EXPONENT_BOUND: f64 = 700.0;

/// Inclusive interval of repetition numbers `m`; empty when `lo > hi`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct OrbitRange {
    pub lo: i64,
    pub hi: i64,
}

impl OrbitRange {
    pub fn is_empty(&self) -> bool {
        self.lo > self.hi
    }

    pub fn len(&self) -> usize {
        if self.is_empty() { 0 } else { (self.hi - self.lo + 1) as usize }
    }

    pub fn iter(&self) -> impl Iterator<Item = i64> {
        self.lo..=self.hi
    }

    pub fn contains(&self, m: i64) -> bool {
        (self.lo..=self.hi).contains(&m)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct PeriodicOrbit {
    pub m: i64,
    pub l: usize,
    /// `I_ml`
    pub action: f64,
    /// `S_ml`
    pub full_action: f64,
    pub amplitude: f64,
    /// `S_ml / hbar + pi m - pi/4`, reduced to `[0, 2 pi)`.
    pub phase: f64,
}

impl PeriodicOrbit {
    pub fn contribution(&self) -> Complex64 {
        Complex64::from_polar(self.amplitude, self.phase)
    }
}

/// Rescaled positions `(edge - script_i) l tau / (2 pi)` of both edges.
fn edge_coordinates(cfg: &RingConfig, l: usize) -> (f64, f64) {
    let (lo, hi) = cfg.window();
    let s = l as f64 * cfg.tau() / TAU;
    ((lo - cfg.script_i()) * s, (hi - cfg.script_i()) * s)
}

/// Repetitions whose orbit lies strictly inside the ring.
pub fn orbit_range(cfg: &RingConfig, l: usize) -> OrbitRange {
    assert!(l >= 1, "orbit_range needs l >= 1");
    let (x_lo, x_hi) = edge_coordinates(cfg, l);
    OrbitRange { lo: x_lo.floor() as i64 + 1, hi: x_hi.ceil() as i64 - 1 }
}

pub fn orbit_center(cfg: &RingConfig, l: usize, m: i64) -> f64 {
    cfg.script_i() + TAU * m as f64 / (l as f64 * cfg.tau())
}

/// `S_ml / hbar` reduced to `[0, 2 pi)`, from the closed quadratic form
/// `2 pi m script_i + 2 pi^2 m^2 / (l tau)`.
fn reduced_action_phase(cfg: &RingConfig, l: usize, m: i64) -> f64 {
    let hbar = cfg.hbar();
    let mf = m as f64;
    let a = (TAU * mf * cfg.script_i() / hbar).rem_euclid(TAU);
    let b = (2.0 * PI * PI * mf * mf / (l as f64 * cfg.tau() * hbar)).rem_euclid(TAU);
    a + b
}

fn amplitude(cfg: &RingConfig, l: usize) -> f64 {
    (TAU / (cfg.hbar() * l as f64 * cfg.tau() * cfg.curvature().abs())).sqrt()
}

pub fn periodic_orbits(cfg: &RingConfig, l: usize) -> Vec<PeriodicOrbit> {
    let amp = amplitude(cfg, l);
    orbit_range(cfg, l)
        .iter()
        .map(|m| {
            let action = orbit_center(cfg, l, m);
            let full_action = TAU * m as f64 * action - l as f64 * cfg.tau() * cfg.energy(action);
            let phase = (reduced_action_phase(cfg, l, m) + PI * m as f64 - FRAC_PI_4).rem_euclid(TAU);
            PeriodicOrbit { m, l, action, full_action, amplitude: amp, phase }
        })
        .collect()
}

/// `S_ml = 2 pi m I_ml - l tau H(I_ml)` from the orbit's action.
pub fn orbit_action(cfg: &RingConfig, orbit: &PeriodicOrbit) -> f64 {
    TAU * orbit.m as f64 * orbit.action - orbit.l as f64 * cfg.tau() * cfg.energy(orbit.action)
}

pub fn sc_trace(cfg: &RingConfig, l: usize) -> Complex64 {
    let mut acc = ComplexAcc::default();
    for orbit in periodic_orbits(cfg, l) {
        acc.add(orbit.contribution());
    }
    acc.value()
}

/// Each orbit weighted by `cos(pi H(I_ml) / (2 E_ref))`.
pub fn sc_weighted_trace(cfg: &RingConfig, l: usize, e_ref: f64) -> Complex64 {
    let mut acc = ComplexAcc::default();
    for orbit in periodic_orbits(cfg, l) {
        let w = (PI * cfg.energy(orbit.action) / (2.0 * e_ref)).cos();
        acc.add(orbit.contribution() * w);
    }
    acc.value()
}

fn series(cfg: &RingConfig, l_max: usize, kind: TraceKind, f: impl Fn(usize) -> Complex64) -> TraceSeries {
    let mut values = vec![Complex64::new(cfg.dimension() as f64, 0.0)];
    values.extend((1..=l_max).map(f));
    TraceSeries::new(values, kind, cfg.id())
}

/// Semiclassical traces for `l = 1 ..= l_max`; the `l = 0` entry is `N`.
pub fn sc_traces(cfg: &RingConfig, l_max: usize) -> TraceSeries {
    series(cfg, l_max, TraceKind::Semiclassical, |l| sc_trace(cfg, l))
}

pub fn sc_weighted_traces(cfg: &RingConfig, l_max: usize, e_ref: f64) -> TraceSeries {
    series(cfg, l_max, TraceKind::Weighted, |l| sc_weighted_trace(cfg, l, e_ref))
}

/// Which repetitions contribute endpoint terms.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
#[derive(Default)]
pub enum EdgeTerms {
    /// The orbit range widened by this many repetitions on each side.
    Neighbors(usize),
    /// Every `m`, summed in closed form.
    #[default]
    All,
}


#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Edge {
    Lower,
    Upper,
}

#[derive(Clone, Debug, PartialEq)]
pub struct EdgeCorrection {
    pub value: Complex64,
    /// Lower-edge and upper-edge parts.
    pub per_edge: (Complex64, Complex64),
    /// Terms left out because `|z| < z_min`.
    pub flagged: Vec<(i64, Edge)>,
}

impl EdgeCorrection {
    pub fn diverges(&self) -> bool {
        !self.flagged.is_empty()
    }
}

/// Rescaled distance `(edge - I_ml) / sqrt(pi hbar / (l tau))`.
pub fn edge_distance(cfg: &RingConfig, l: usize, m: i64, edge: f64) -> f64 {
    (edge - orbit_center(cfg, l, m)) / (PI * cfg.hbar() / (l as f64 * cfg.tau())).sqrt()
}

/// Leading endpoint term of orbit `m` at one edge, without the edge sign:
/// `(-1)^m e^{i S_ml/hbar} e^{-i l tau d^2 / (2 hbar)} i / (l tau d)`.
fn endpoint_term(cfg: &RingConfig, l: usize, m: i64, edge: f64) -> Complex64 {
    let lt = l as f64 * cfg.tau();
    let d = edge - orbit_center(cfg, l, m);
    let phase = reduced_action_phase(cfg, l, m) + PI * m as f64 - lt * d * d / (2.0 * cfg.hbar());
    I * Complex64::from_polar(1.0, phase) / (lt * d)
}

/// Sum of [`endpoint_term`] over all `m` at one edge, optionally without `m = skip`.
fn endpoint_sum_all(cfg: &RingConfig, l: usize, edge: f64, skip: Option<i64>) -> Complex64 {
    let hbar = cfg.hbar();
    let lt = l as f64 * cfg.tau();
    let beta = lt * cfg.frequency(edge) / TAU;
    let alpha = PI + TAU * edge / hbar;
    let lattice = match skip {
        Some(m) => lattice_pole_sum_except(alpha, beta, m),
        None => lattice_pole_sum(alpha, beta),
    };
    -I * Complex64::from_polar(1.0, -lt * cfg.energy(edge) / hbar) * lattice / TAU
}

pub fn edge_correction(cfg: &RingConfig, l: usize) -> EdgeCorrection {
    edge_correction_with(cfg, l, EdgeTerms::default(), Z_MIN)
}

pub fn edge_correction_with(cfg: &RingConfig, l: usize, terms: EdgeTerms, z_min: f64) -> EdgeCorrection {
    let range = orbit_range(cfg, l);
    let (lo, hi) = cfg.window();
    let mut flagged = Vec::new();
    let mut side = |edge: f64, tag: Edge| -> Complex64 {
        let mut acc = ComplexAcc::default();
        let mut skip = |m: i64| {
            let small = edge_distance(cfg, l, m, edge).abs() < z_min;
            if small {
                flagged.push((m, tag));
            }
            small
        };
        match terms {
            EdgeTerms::Neighbors(k) => {
                let k = k as i64;
                for m in range.lo - k..=range.hi + k {
                    if !skip(m) {
                        acc.add(endpoint_term(cfg, l, m, edge));
                    }
                }
            }
            EdgeTerms::All => {
                // Only the orbits nearest the edge can fall below z_min.
                let (x_lo, x_hi) = edge_coordinates(cfg, l);
                let centre = if tag == Edge::Lower { x_lo } else { x_hi }.round() as i64;
                let reach = (z_min * (cfg.hbar() * l as f64 * cfg.tau() / (4.0 * PI)).sqrt()).ceil() as i64 + 1;
                let near: Vec<i64> = (centre - reach..=centre + reach).filter(|&m| skip(m)).collect();
                // The term nearest the pole is removed analytically.
                let pole = near.contains(&centre).then_some(centre);
                acc.add(endpoint_sum_all(cfg, l, edge, pole));
                for m in near.into_iter().filter(|&m| Some(m) != pole) {
                    acc.add(-endpoint_term(cfg, l, m, edge));
                }
            }
        }
        acc.value()
    };
    let lower = -side(lo, Edge::Lower);
    let upper = side(hi, Edge::Upper);
    flagged.sort_by_key(|&(m, e)| (m, e == Edge::Upper));
    EdgeCorrection { value: lower + upper, per_edge: (lower, upper), flagged }
}

/// The printed endpoint formula taken literally: each edge enters through
/// `exp(-i l tau edge^2 / (2 hbar))` instead of the squared distance to the
/// orbit. Kept for comparison only; see [`edge_correction`].
pub fn edge_correction_literal(cfg: &RingConfig, l: usize) -> Complex64 {
    let range = orbit_range(cfg, l);
    let (lo, hi) = cfg.window();
    let lt = l as f64 * cfg.tau();
    let hbar = cfg.hbar();
    let mut acc = ComplexAcc::default();
    for m in range.lo - 1..=range.hi + 1 {
        let base = Complex64::from_polar(1.0, reduced_action_phase(cfg, l, m) + PI * m as f64);
        let centre = orbit_center(cfg, l, m);
        for (edge, sign) in [(lo, -1.0), (hi, 1.0)] {
            let d = edge - centre;
            let q = Complex64::from_polar(1.0, -lt * edge * edge / (2.0 * hbar));
            acc.add(sign * I * base * q / (lt * d));
        }
    }
    acc.value()
}

pub fn edge_corrected_traces(cfg: &RingConfig, l_max: usize) -> TraceSeries {
    series(cfg, l_max, TraceKind::EdgeCorrected, |l| sc_trace(cfg, l) + edge_correction(cfg, l).value)
}

/// Exact and semiclassical traces at the complex period `tau (1 - i f)`.
/// The orbit set is that of the real period.
pub fn complex_time_trace(
    spec: &QuantizedSpectrum,
    cfg: &RingConfig,
    l: usize,
    im_fraction: f64,
) -> Result<(Complex64, Complex64)> {
    if !(im_fraction >= 0.0) || !im_fraction.is_finite() {
        return Err(Error::Domain(format!("imaginary time fraction must be >= 0, got {im_fraction}")));
    }
    let hbar = cfg.hbar();
    let lt = l as f64 * cfg.tau();
    let (_, e_max) = cfg.energy_window();
    let decay = lt * im_fraction * e_max / hbar;
    if decay > EXPONENT_BOUND {
        return Err(Error::Overflow { exponent: decay, bound: EXPONENT_BOUND });
    }
    let ltc = Complex64::new(lt, -lt * im_fraction);

    let mut exact = ComplexAcc::default();
    for lvl in &spec.levels {
        exact.add((-I * ltc * lvl.energy / hbar).exp());
    }

    let amp = (Complex64::new(TAU / (hbar * cfg.curvature().abs()), 0.0) / ltc).sqrt();
    let mut sc = ComplexAcc::default();
    for m in orbit_range(cfg, l).iter() {
        let mf = m as f64;
        let linear = (TAU * mf * cfg.script_i() / hbar + PI * mf).rem_euclid(TAU);
        let quad = I * 2.0 * PI * PI * mf * mf / (ltc * hbar);
        sc.add(amp * Complex64::from_polar(1.0, linear - FRAC_PI_4) * quad.exp());
    }
    Ok((exact.value(), sc.value()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact::{default_m_cutoff, exact_trace, quadrature_trace};
    use crate::model::quantize_window;

    const SCRIPT_I: f64 = 20.3489573;
    const ENERGY: f64 = 30.4571694;

    fn fig2() -> RingConfig {
        RingConfig::from_energies(0.35, SCRIPT_I, 0.0, ENERGY, Some(48), None).unwrap()
    }

    fn case_ii() -> RingConfig {
        RingConfig::from_energies(1.0, -1.03489573, 0.265678, 1250.0, Some(48), None).unwrap()
    }

    #[test]
    fn range_contains_zero_when_centre_inside() {
        let cfg = fig2();
        for l in 1..10 {
            assert!(orbit_range(&cfg, l).contains(0));
        }
    }

    #[test]
    fn case_ii_has_no_short_orbits() {
        let cfg = case_ii();
        for l in 1..=24 {
            assert!(orbit_range(&cfg, l).is_empty(), "l = {l}");
            assert_eq!(sc_trace(&cfg, l), Complex64::new(0.0, 0.0));
        }
        assert!(!orbit_range(&cfg, 25).is_empty());
    }

    #[test]
    fn orbit_count_grows_linearly() {
        let cfg = fig2();
        let ratio = orbit_range(&cfg, 4000).len() as f64 / orbit_range(&cfg, 2000).len() as f64;
        assert!((ratio - 2.0).abs() < 0.01);
    }

    #[test]
    fn orbits_inside_and_distinct() {
        let cfg = fig2();
        let (lo, hi) = cfg.window();
        for l in [1, 7, 48] {
            let orbits = periodic_orbits(&cfg, l);
            assert!(orbits.windows(2).all(|w| w[0].action < w[1].action));
            assert!(orbits.iter().all(|o| lo < o.action && o.action < hi));
        }
    }

    #[test]
    fn single_orbit_trace() {
        let cfg = RingConfig::new(0.1, 0.5, 5.0, 4.0, 6.0, None).unwrap();
        assert_eq!(orbit_range(&cfg, 1), OrbitRange { lo: 0, hi: 0 });
        let want = Complex64::from_polar((TAU / (0.1 * 0.5)).sqrt(), -FRAC_PI_4);
        assert!((sc_trace(&cfg, 1) - want).norm() < 1e-13);
    }

    #[test]
    fn action_formulas_agree() {
        let cfg = fig2();
        for l in [1, 3, 40] {
            for o in periodic_orbits(&cfg, l) {
                let closed = TAU * o.m as f64 * cfg.script_i()
                    + 2.0 * PI * PI * (o.m * o.m) as f64 / (l as f64 * cfg.tau());
                assert!((orbit_action(&cfg, &o) - closed).abs() <= 1e-12 * closed.abs().max(1.0));
                let ph = (o.full_action / cfg.hbar() + PI * o.m as f64 - FRAC_PI_4).rem_euclid(TAU);
                let d = (ph - o.phase).rem_euclid(TAU);
                assert!(d.min(TAU - d) < 1e-8);
            }
        }
    }

    #[test]
    fn hbar_scaling_of_amplitude() {
        let cfg = fig2();
        let a = amplitude(&cfg, 3);
        let b = amplitude(&cfg.with_hbar(0.035).unwrap(), 3);
        assert!((b / a - 10f64.sqrt()).abs() < 1e-12);
    }

    #[test]
    fn weights_vanish_at_reference_energy() {
        let cfg = RingConfig::new(0.1, 0.5, 5.0, 4.0, 6.0, None).unwrap();
        assert_eq!(sc_weighted_trace(&cfg, 1, 3.0), sc_trace(&cfg, 1));
        let cfg = fig2();
        // Weight zero at m = +-1 and one at m = 0, +-2.
        let orbits = periodic_orbits(&cfg, 30);
        let pair: Complex64 = orbits.iter().filter(|o| o.m.abs() == 1).map(|o| o.contribution()).sum();
        let e = cfg.energy(orbits.iter().find(|o| o.m == 1).unwrap().action);
        let dropped = sc_weighted_trace(&cfg, 30, e) - sc_weighted_trace(&cfg, 30, 1e300);
        assert!((dropped + pair).norm() < 1e-9 * orbits[0].amplitude);
    }

    #[test]
    fn sc_matches_quadrature_at_small_l() {
        // Fixes the Maslov sign: the stationary-phase term must track the oracle.
        let cfg = RingConfig::new(0.02, 1.0, 10.0, 7.137, 12.713, None).unwrap();
        for l in [1, 2] {
            let q = quadrature_trace(&cfg, l, default_m_cutoff(&cfg, l), 1e-8).unwrap().value;
            let sc = sc_trace(&cfg, l);
            let ec = sc + edge_correction(&cfg, l).value;
            assert!((ec - q).norm() < (sc - q).norm());
            let flipped: Complex64 = sc * Complex64::from_polar(1.0, FRAC_PI_2);
            assert!((flipped - q).norm() > (sc - q).norm());
        }
    }

    use std::f64::consts::FRAC_PI_2;

    #[test]
    fn all_terms_include_neighbours() {
        let cfg = RingConfig::new(0.02, 1.0, 10.0, 7.137, 12.713, None).unwrap();
        for l in [1, 3] {
            let q = quadrature_trace(&cfg, l, default_m_cutoff(&cfg, l), 1e-8).unwrap().value;
            let sc = sc_trace(&cfg, l);
            let all = edge_correction_with(&cfg, l, EdgeTerms::All, Z_MIN);
            let wide = edge_correction_with(&cfg, l, EdgeTerms::Neighbors(4000), Z_MIN);
            assert!((all.value - wide.value).norm() < 1e-3 * all.value.norm());
            assert!((sc + all.value - q).norm() < (sc - q).norm());
        }
    }

    #[test]
    fn symmetric_ring_has_equal_edge_magnitudes() {
        let cfg = RingConfig::new(0.05, 0.3, 10.0, 8.013, 11.987, None).unwrap();
        let e = edge_correction_with(&cfg, 1, EdgeTerms::Neighbors(0), Z_MIN);
        assert_eq!(orbit_range(&cfg, 1), OrbitRange { lo: 0, hi: 0 });
        assert!((e.per_edge.0.norm() - e.per_edge.1.norm()).abs() < 1e-12);
        assert!((e.value - e.per_edge.0 - e.per_edge.1).norm() < 1e-15);
    }

    #[test]
    fn near_edge_orbits_are_flagged() {
        let cfg = fig2();
        let mut seen = false;
        for l in 1..200 {
            let e = edge_correction(&cfg, l);
            for &(m, edge) in &e.flagged {
                let (lo, hi) = cfg.window();
                let x = if edge == Edge::Lower { lo } else { hi };
                assert!(edge_distance(&cfg, l, m, x).abs() < Z_MIN);
                seen = true;
            }
        }
        assert!(seen);
    }

    #[test]
    fn complex_time_limits() {
        let cfg = fig2();
        let spec = quantize_window(&cfg).unwrap();
        let (e, s) = complex_time_trace(&spec, &cfg, 5, 0.0).unwrap();
        assert!((e - exact_trace(&spec, &cfg, 5)).norm() < 1e-12);
        assert!((s - sc_trace(&cfg, 5)).norm() < 1e-9);
        assert!(complex_time_trace(&spec, &cfg, 5, -0.1).is_err());
        assert!(matches!(complex_time_trace(&spec, &cfg, 5, 1e6), Err(Error::Overflow { .. })));

        let one = RingConfig::new(1.0, 0.7, 0.0, 0.4, 1.4, None).unwrap();
        let s1 = quantize_window(&one).unwrap();
        let (e, _) = complex_time_trace(&s1, &one, 3, 0.2).unwrap();
        assert!((e.norm() - (-3.0 * 0.7 * 0.2 * s1.levels[0].energy).exp()).abs() < 1e-15);
    }
}
