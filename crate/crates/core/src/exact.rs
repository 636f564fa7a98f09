//! Ground truth for the ring map: exact traces, the exact characteristic
//! polynomial, `det U_N`, and a quadrature evaluation of the
//! Poisson-transformed trace
//!
//! ```text
//! Tr(U^l) = (1/hbar) sum_m (-1)^m  int_{I-}^{I+} dI exp{(i/hbar)[2 pi m I - l tau H(I)]}
//! ```
//!
//! which is identical to the discrete sum over levels and serves as the
//! independent reference for the semiclassical traces.

use std::f64::consts::{PI, TAU};

use gauss_quad::GaussLegendre;
use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::accum::{Acc, ComplexAcc};
use crate::dd::{self, Cdd};
use crate::specdet::{CharPolynomial, PolyMode};
use crate::{Error, QuantizedSpectrum, Result, RingConfig};

const I: Complex64 = Complex64 { re: 0.0, im: 1.0 };

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum TraceKind {
    Exact,
    Semiclassical,
    EdgeCorrected,
    Weighted,
    Quadrature,
}

impl TraceKind {
    pub fn as_str(&self) -> &'static str {
        match self {
            TraceKind::Exact => "exact",
            TraceKind::Semiclassical => "semiclassical",
            TraceKind::EdgeCorrected => "edge-corrected",
            TraceKind::Weighted => "weighted",
            TraceKind::Quadrature => "quadrature",
        }
    }
}

impl std::str::FromStr for TraceKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        [
            TraceKind::Exact,
            TraceKind::Semiclassical,
            TraceKind::EdgeCorrected,
            TraceKind::Weighted,
            TraceKind::Quadrature,
        ]
        .into_iter()
        .find(|k| k.as_str() == s)
        .ok_or_else(|| Error::Config(format!("unknown trace kind `{s}`")))
    }
}

/// `Tr(U^l)` for `l = 0 ..= L`, with the low words of double-double values
/// when they were computed in extended precision.
#[derive(Clone, Debug, PartialEq)]
pub struct TraceSeries {
    pub values: Vec<Complex64>,
    pub tails: Option<Vec<Complex64>>,
    pub kind: TraceKind,
    pub config_id: String,
}

impl TraceSeries {
    pub fn new(values: Vec<Complex64>, kind: TraceKind, config_id: impl Into<String>) -> Self {
        TraceSeries { values, tails: None, kind, config_id: config_id.into() }
    }

    pub fn max_l(&self) -> usize {
        self.values.len().saturating_sub(1)
    }

    pub(crate) fn precise(&self) -> Vec<Cdd> {
        match &self.tails {
            Some(t) => self.values.iter().zip(t).map(|(&h, &l)| dd::join(h, l)).collect(),
            None => self.values.iter().map(|&h| dd::lift(h)).collect(),
        }
    }
}

/// `sum_n exp(-i l tau E_n / hbar)`. Negative `l` gives the conjugate.
pub fn exact_trace(spec: &QuantizedSpectrum, cfg: &RingConfig, l: i64) -> Complex64 {
    let scale = l as f64 * cfg.tau() / cfg.hbar();
    let mut acc = ComplexAcc::default();
    for lvl in &spec.levels {
        acc.add(Complex64::from_polar(1.0, -scale * lvl.energy));
    }
    acc.value()
}

/// `sum_n exp(-i l tau E_n / hbar) cos(pi E_n / (2 E_ref))`.
pub fn exact_weighted_trace(spec: &QuantizedSpectrum, cfg: &RingConfig, l: i64, e_ref: f64) -> Complex64 {
    let scale = l as f64 * cfg.tau() / cfg.hbar();
    let mut acc = ComplexAcc::default();
    for lvl in &spec.levels {
        let w = (PI * lvl.energy / (2.0 * e_ref)).cos();
        acc.add(Complex64::from_polar(w, -scale * lvl.energy));
    }
    acc.value()
}

/// Exact traces `sum_n exp(-i l phi_n)` for `l = 0 ..= l_max` in
/// double-double arithmetic.
pub fn exact_traces(spec: &QuantizedSpectrum, cfg: &RingConfig, l_max: usize) -> TraceSeries {
    let mut sums = vec![dd::zero(); l_max + 1];
    for lvl in &spec.levels {
        let w = dd::unit_phasor(-lvl.phase);
        let mut p = dd::one();
        for s in sums.iter_mut() {
            *s += p;
            p *= w;
        }
    }
    let (values, tails) = sums.into_iter().map(dd::split).unzip();
    TraceSeries { values, tails: Some(tails), kind: TraceKind::Exact, config_id: cfg.id() }
}

/// `prod_n (1 - z exp(-i phi_n))` in double-double arithmetic.
pub fn exact_char_poly(spec: &QuantizedSpectrum, cfg: &RingConfig) -> CharPolynomial {
    let mut c = vec![dd::one()];
    for lvl in &spec.levels {
        let neg = -dd::unit_phasor(-lvl.phase);
        c.push(dd::zero());
        for k in (1..c.len()).rev() {
            c[k] = c[k] + neg * c[k - 1];
        }
    }
    CharPolynomial::from_precise(&c, Some(det_u(spec, cfg)), PolyMode::Exact)
}

/// `det U_N = exp(-i sum_n phi_n)`.
pub fn det_u(spec: &QuantizedSpectrum, _cfg: &RingConfig) -> Complex64 {
    let mut total = Acc::default();
    for lvl in &spec.levels {
        total.add(lvl.phase);
    }
    Complex64::from_polar(1.0, -total.value().rem_euclid(TAU))
}

/// Result of [`quadrature_trace`].
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct QuadratureTrace {
    pub value: Complex64,
    /// Estimated absolute error: panel refinement differences plus the size of
    /// the last tail term kept.
    pub residual: f64,
    pub m_cutoff: usize,
    /// Contribution of `|m| > m_cutoff`, from the endpoint expansion.
    pub tail: Complex64,
}

/// Upper bound on `|m|` for stationary points inside the ring, plus five.
pub fn default_m_cutoff(cfg: &RingConfig, l: usize) -> usize {
    let (lo, hi) = cfg.window();
    let lt = l as f64 * cfg.tau();
    let x = ((lo - cfg.script_i()).abs().max((hi - cfg.script_i()).abs())) * lt / TAU;
    x.ceil() as usize + 5
}

struct Panels {
    nodes: Vec<f64>,
    weights: Vec<f64>,
}

impl Panels {
    const ORDER: usize = 8;
    const PER_TURN: f64 = 8.0;

    fn new() -> Self {
        let gl = GaussLegendre::new(Self::ORDER.try_into().expect("nonzero order"));
        Panels { nodes: gl.nodes().copied().collect(), weights: gl.weights().copied().collect() }
    }

    /// `int_lo^hi exp(i phase(x)) dx` on `count` equal panels.
    fn integrate(&self, lo: f64, hi: f64, count: usize, phase: &dyn Fn(f64) -> f64) -> Complex64 {
        let h = (hi - lo) / count as f64;
        let mut acc = ComplexAcc::default();
        for p in 0..count {
            let mid = lo + (p as f64 + 0.5) * h;
            for (x, w) in self.nodes.iter().zip(&self.weights) {
                let t = mid + 0.5 * h * x;
                acc.add(Complex64::from_polar(0.5 * h * w, phase(t)));
            }
        }
        acc.value()
    }

    /// Refines until two successive panel counts agree to `tol`; returns the
    /// finer value and the last difference.
    fn adaptive(&self, lo: f64, hi: f64, max_rate: f64, phase: &dyn Fn(f64) -> f64, tol: f64) -> (Complex64, f64) {
        let turns = max_rate * (hi - lo) / TAU;
        let mut count = ((turns * Self::PER_TURN).ceil() as usize).max(16);
        let mut coarse = self.integrate(lo, hi, count, phase);
        let mut diff = f64::INFINITY;
        for _ in 0..5 {
            count *= 2;
            let fine = self.integrate(lo, hi, count, phase);
            diff = (fine - coarse).norm();
            coarse = fine;
            if diff <= tol {
                break;
            }
        }
        (coarse, diff)
    }
}

/// `(1/hbar) (-1)^m int exp(i phase(I)/hbar) dI` for a phase whose derivative
/// is bounded by `max_rate * hbar`.
#[allow(clippy::too_many_arguments)]
fn poisson_term(
    panels: &Panels,
    lo: f64,
    hi: f64,
    hbar: f64,
    m: i64,
    max_rate: f64,
    phase: &dyn Fn(f64) -> f64,
    tol: f64,
) -> (Complex64, f64) {
    let (v, d) = panels.adaptive(lo, hi, max_rate, &|x| phase(x) / hbar + PI * m as f64, tol * hbar);
    (v / hbar, d / hbar)
}

/// `sum_{m in Z} exp(i m alpha) / (m - beta)`, symmetric partial sums.
pub(crate) fn lattice_pole_sum(alpha: f64, beta: f64) -> Complex64 {
    lattice_pole_sum_c(alpha, Complex64::new(beta, 0.0))
}

fn lattice_pole_sum_c(alpha: f64, beta: Complex64) -> Complex64 {
    let a = alpha.rem_euclid(TAU);
    let s = (beta * PI).sin();
    if a < 1e-14 || TAU - a < 1e-14 {
        -PI * (beta * PI).cos() / s
    } else {
        -PI * (-I * beta * (PI - a)).exp() / s
    }
}

/// [`lattice_pole_sum`] without the `m = skip` term. Near that pole the
/// remainder is taken from a Cauchy integral on `|w - skip| = 1/2`, avoiding
/// cancellation against the pole.
pub(crate) fn lattice_pole_sum_except(alpha: f64, beta: f64, skip: i64) -> Complex64 {
    let m0 = skip as f64;
    let pole = |w: Complex64| Complex64::from_polar(1.0, m0 * alpha) / (m0 - w);
    if (beta - m0).abs() >= 0.1 {
        return lattice_pole_sum(alpha, beta) - pole(Complex64::new(beta, 0.0));
    }
    const K: usize = 64;
    let r = 0.5;
    let mut acc = ComplexAcc::default();
    for k in 0..K {
        let e = Complex64::from_polar(r, TAU * k as f64 / K as f64);
        let w = m0 + e;
        acc.add((lattice_pole_sum_c(alpha, w) - pole(w)) * e / (w - beta));
    }
    acc.value() / K as f64
}

/// Endpoint expansion of the `|m| > m_cutoff` terms at one edge.
///
/// Each such integral has no stationary point, so it equals
/// `(1/hbar)(-1)^m [exp(i phi/hbar) A]` at the edges with
/// `A = sum_k C_k p^-(2k+1)`, `p = phi'`, `C_0 = -i hbar`,
/// `C_{k+1} = -i hbar phi'' (2k+1) C_k`. The leading order is summed over all
/// `m` in closed form; higher orders decay like `m^-3` and are summed directly.
fn edge_tail(cfg: &RingConfig, l: usize, edge: f64, m_cutoff: usize) -> (Complex64, f64) {
    let hbar = cfg.hbar();
    let lt = l as f64 * cfg.tau();
    let w = lt * cfg.frequency(edge);
    let g = -lt * cfg.curvature();
    let alpha = (PI + TAU * edge / hbar).rem_euclid(TAU);
    let base = Complex64::from_polar(1.0, -lt * cfg.energy(edge) / hbar);
    let mc = m_cutoff as i64;

    let mut inner = ComplexAcc::new(lattice_pole_sum(alpha, w / TAU) / TAU);
    for m in -mc..=mc {
        inner.add(-Complex64::from_polar(1.0, m as f64 * alpha) / (TAU * m as f64 - w));
    }
    let leading = -I * base * inner.value();

    const EXTRA: i64 = 2000;
    let mut higher = ComplexAcc::default();
    let mut last = 0.0;
    for m in (mc + 1..=mc + EXTRA).flat_map(|m| [m, -m]) {
        let p = TAU * m as f64 - w;
        let mut ck = -I * hbar;
        let mut sum = Complex64::new(0.0, 0.0);
        for k in 0..8 {
            let next = -I * hbar * g * (2 * k + 1) as f64 * ck;
            let term = next / p.powi(2 * k + 3);
            if term.norm() < 1e-18 * hbar || term.norm() > sum.norm().max(1e-300) && k > 0 {
                break;
            }
            sum += term;
            ck = next;
        }
        let v = base * Complex64::from_polar(1.0, m as f64 * alpha) * sum / hbar;
        last = v.norm();
        higher.add(v);
    }
    (leading + higher.value(), last * EXTRA as f64)
}

/// Poisson-transformed trace by panel quadrature for `|m| <= m_cutoff`, with
/// the remaining `m` taken from their endpoint expansion.
pub fn quadrature_trace(cfg: &RingConfig, l: usize, m_cutoff: usize, tol: f64) -> Result<QuadratureTrace> {
    if l == 0 || m_cutoff == 0 {
        return Err(Error::Domain(format!("quadrature needs l >= 1 and m_cutoff >= 1, got ({l}, {m_cutoff})")));
    }
    let (lo, hi) = cfg.window();
    let hbar = cfg.hbar();
    let lt = l as f64 * cfg.tau();
    let panels = Panels::new();
    let mc = m_cutoff as i64;
    let per_term_tol = 0.1 * tol / (2 * mc + 1) as f64;

    let terms: Vec<(Complex64, f64)> = (-mc..=mc)
        .into_par_iter()
        .map(|m| {
            let phase = |x: f64| TAU * m as f64 * x - lt * cfg.energy(x);
            let rate = |x: f64| (TAU * m as f64 - lt * cfg.frequency(x)).abs() / hbar;
            poisson_term(&panels, lo, hi, hbar, m, rate(lo).max(rate(hi)), &phase, per_term_tol)
        })
        .collect();

    let mut acc = ComplexAcc::default();
    let mut residual = 0.0;
    for (v, d) in &terms {
        acc.add(*v);
        residual += d;
    }
    let (upper, up_err) = edge_tail(cfg, l, hi, m_cutoff);
    let (lower, lo_err) = edge_tail(cfg, l, lo, m_cutoff);
    let tail = upper - lower;
    acc.add(tail);
    residual += up_err + lo_err;
    if !(residual <= tol) {
        return Err(Error::Quadrature { residual, tol });
    }
    Ok(QuadratureTrace { value: acc.value(), residual, m_cutoff, tail })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::quantize_window;

    const SCRIPT_I: f64 = 20.3489573;
    const ENERGY: f64 = 30.4571694;

    fn single_level() -> (QuantizedSpectrum, RingConfig) {
        let cfg = RingConfig::new(1.0, 0.7, 0.0, 0.4, 1.4, None).unwrap();
        (quantize_window(&cfg).unwrap(), cfg)
    }

    #[test]
    fn trace_of_identity_is_dimension() {
        let cfg = RingConfig::from_energies(0.35, SCRIPT_I, 0.0, ENERGY, Some(48), None).unwrap();
        let spec = quantize_window(&cfg).unwrap();
        assert_eq!(exact_trace(&spec, &cfg, 0), Complex64::new(48.0, 0.0));
        for l in 1..60 {
            let t = exact_trace(&spec, &cfg, l);
            assert!(t.norm() <= 48.0 + 1e-12);
            assert!((exact_trace(&spec, &cfg, -l) - t.conj()).norm() < 1e-12);
        }
    }

    #[test]
    fn single_level_trace() {
        let (spec, cfg) = single_level();
        let e0 = spec.levels[0].energy;
        for l in [1, 2, 7] {
            let want = Complex64::from_polar(1.0, -(l as f64) * cfg.tau() * e0 / cfg.hbar());
            assert!((exact_trace(&spec, &cfg, l) - want).norm() < 1e-15);
        }
        assert!((det_u(&spec, &cfg) - Complex64::from_polar(1.0, -cfg.tau() * e0)).norm() < 1e-15);
    }

    #[test]
    fn weighted_trace_limits() {
        let (spec, cfg) = single_level();
        let e0 = spec.levels[0].energy;
        assert!(exact_weighted_trace(&spec, &cfg, 3, e0).norm() < 1e-15);
        // A vanishing energy makes the weight one.
        let flat = RingConfig::new(1.0, 0.7, 0.5, 0.1, 0.9, None).unwrap();
        let s = quantize_window(&flat).unwrap();
        assert_eq!(s.levels[0].energy, 0.0);
        assert_eq!(exact_weighted_trace(&s, &flat, 2, 5.0), exact_trace(&s, &flat, 2));
    }

    #[test]
    fn char_poly_small_cases() {
        let (spec, cfg) = single_level();
        let p = exact_char_poly(&spec, &cfg);
        assert_eq!(p.coeffs.len(), 2);
        assert!((p.coeffs[1] + spec.levels[0].eigenvalue()).norm() < 1e-16);
        // Phases 0 and pi: (1 - z)(1 + z).
        let cfg = RingConfig::new(1.0, 1.0, 0.5, 0.1, 1.9, None).unwrap();
        let mut spec = quantize_window(&cfg).unwrap();
        spec.levels[0].phase = 0.0;
        spec.levels[1].phase = PI;
        let p = exact_char_poly(&spec, &cfg);
        let want = [1.0, 0.0, -1.0];
        for (c, w) in p.coeffs.iter().zip(want) {
            assert!((c - w).norm() < 1e-15);
        }
    }

    #[test]
    fn det_is_unimodular_with_additive_phase() {
        for (h, n) in [(0.35, Some(48)), (1.0, None), (0.01, Some(1521))] {
            let cfg = RingConfig::from_energies(h, SCRIPT_I, 0.0, ENERGY, n, None).unwrap();
            let spec = quantize_window(&cfg).unwrap();
            let det = det_u(&spec, &cfg);
            assert!((det.norm() - 1.0).abs() < 1e-12);
            let direct: Complex64 = spec.eigenvalues().iter().product();
            assert!((det - direct).norm() < 1e-10);
            let total: f64 = spec.energies().iter().sum::<f64>() * cfg.tau() / cfg.hbar();
            let d = (det.arg() + total).rem_euclid(TAU);
            assert!(d.min(TAU - d) < 1e-8);
        }
    }

    #[test]
    fn pole_sum_matches_brute_force() {
        for (alpha, beta) in [(1.0, 0.3), (5.5, -2.7), (PI, 0.5), (0.0, 0.25), (6.0, 3.9)] {
            let want = lattice_pole_sum(alpha, beta);
            let m_max = 400_000i64;
            let mut acc = ComplexAcc::default();
            for m in -m_max..=m_max {
                acc.add(Complex64::from_polar(1.0, m as f64 * alpha) / (m as f64 - beta));
            }
            // Symmetric partial sums converge like 1/m_max.
            assert!((acc.value() - want).norm() < 2e-5, "alpha {alpha} beta {beta}");
        }
    }

    #[test]
    fn pole_removal_is_smooth_across_the_pole() {
        for alpha in [0.0, 1.0, 4.0] {
            // The remainder sum_{m != 3} at beta = 3 exactly, by brute force.
            let m_max = 400_000i64;
            let mut acc = ComplexAcc::default();
            for m in (-m_max..=m_max).filter(|&m| m != 3) {
                acc.add(Complex64::from_polar(1.0, m as f64 * alpha) / (m as f64 - 3.0));
            }
            let at = lattice_pole_sum_except(alpha, 3.0, 3);
            assert!((at - acc.value()).norm() < 2e-5, "alpha {alpha}");
            for eps in [1e-13, 1e-6, 0.05, -0.0999] {
                let near = lattice_pole_sum_except(alpha, 3.0 + eps, 3);
                assert!((near - at).norm() < 10.0 * eps.abs() + 1e-12, "alpha {alpha} eps {eps}");
            }
            // Both branches agree where they meet.
            let (a, b) = (lattice_pole_sum_except(alpha, 3.0999999, 3), lattice_pole_sum_except(alpha, 3.1, 3));
            assert!((a - b).norm() < 1e-5);
        }
    }

    #[test]
    fn constant_phase_integral() {
        let panels = Panels::new();
        let hbar = 0.05;
        let (lo, hi) = (1.0, 1.0 + TAU * hbar * 3.0);
        let h0 = 0.37;
        let (v, _) = poisson_term(&panels, lo, hi, hbar, 0, 0.0, &|_| -2.0 * h0, 1e-14);
        let want = Complex64::from_polar((hi - lo) / hbar, -2.0 * h0 / hbar);
        assert!((v - want).norm() < 1e-12);
    }

    #[test]
    fn quadrature_reproduces_discrete_sum_on_small_rings() {
        let cfg = RingConfig::new(0.05, 0.9, 3.0, 2.13, 4.21, None).unwrap();
        let spec = quantize_window(&cfg).unwrap();
        for l in [1, 2, 5] {
            let q = quadrature_trace(&cfg, l, default_m_cutoff(&cfg, l), 1e-8).unwrap();
            let e = exact_trace(&spec, &cfg, l as i64);
            assert!((q.value - e).norm() < 1e-8, "l = {l}: {} vs {}", q.value, e);
        }
    }

    #[test]
    fn quadrature_rejects_degenerate_arguments() {
        let cfg = RingConfig::new(0.05, 0.9, 3.0, 2.13, 4.21, None).unwrap();
        assert!(quadrature_trace(&cfg, 0, 3, 1e-6).is_err());
        assert!(quadrature_trace(&cfg, 1, 0, 1e-6).is_err());
        assert!(matches!(quadrature_trace(&cfg, 1, 3, 0.0), Err(Error::Quadrature { .. })));
    }
}
