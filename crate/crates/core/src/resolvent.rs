//! Resolvents of the map on the unit circle and their poles.
//!
//! The exact resolvent `sum_n 1/(1 - e^{i(theta - phi_n) - eta})` peaks at the
//! eigenphases. Its Fourier form is the trace series. The semiclassical
//! version sums stationary times over energy branches and repetitions `m`; the
//! repetition sum diverges exactly on the Bohr-Sommerfeld actions.

use std::f64::consts::{PI, TAU};

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::accum::ComplexAcc;
use crate::exact::TraceSeries;
use crate::{Error, QuantizedSpectrum, Result, RingConfig};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ResolventKind {
    Exact,
    TruncatedFourier,
    Semiclassical,
}

impl ResolventKind {
    pub fn as_str(&self) -> &'static str {
        match self {
            ResolventKind::Exact => "exact",
            ResolventKind::TruncatedFourier => "truncated-fourier",
            ResolventKind::Semiclassical => "semiclassical",
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct ResolventScan {
    pub theta: Vec<f64>,
    pub values: Vec<Complex64>,
    pub eta: f64,
    pub kind: ResolventKind,
}

impl ResolventScan {
    pub fn step(&self) -> f64 {
        TAU / self.theta.len() as f64
    }
}

/// `n` equally spaced angles `2 pi j / n`, `j = 0 .. n`.
pub fn theta_grid(n: usize) -> Vec<f64> {
    (0..n).map(|j| TAU * j as f64 / n as f64).collect()
}

fn positive_eta(eta: f64) -> Result<()> {
    if eta > 0.0 && eta.is_finite() {
        Ok(())
    } else {
        Err(Error::Domain(format!("regularization must be positive, got {eta}")))
    }
}

pub fn exact_resolvent(spec: &QuantizedSpectrum, theta: f64, eta: f64) -> Result<Complex64> {
    positive_eta(eta)?;
    let mut acc = ComplexAcc::default();
    for lvl in &spec.levels {
        let q = Complex64::from_polar((-eta).exp(), theta - lvl.phase);
        acc.add(1.0 / (1.0 - q));
    }
    Ok(acc.value())
}

/// `sum_{l=0}^{L} e^{i l (theta + i eta)} Tr(U^l)`.
pub fn truncated_resolvent(traces: &TraceSeries, theta: f64, l_max: usize, eta: f64) -> Result<Complex64> {
    if !(eta >= 0.0) {
        return Err(Error::Domain(format!("regularization must be >= 0, got {eta}")));
    }
    if traces.values.len() <= l_max {
        return Err(Error::MissingTrace(l_max));
    }
    let w = Complex64::from_polar((-eta).exp(), theta);
    let mut acc = Complex64::new(0.0, 0.0);
    for t in traces.values[..=l_max].iter().rev() {
        acc = acc * w + t;
    }
    Ok(acc)
}

/// One energy branch crossing the quasi-energy `theta` in sheet `k`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct StationaryTerm {
    pub k: i64,
    pub energy: f64,
    pub action: f64,
    /// `s_{1,k} = 2 pi / (tau |H'(I)|)`
    pub time: f64,
}

/// Sheets `k` spanning the ring's energy window.
pub fn default_k_range(cfg: &RingConfig) -> (i64, i64) {
    let (emin, emax) = cfg.energy_window();
    let s = cfg.tau() / (TAU * cfg.hbar());
    ((emin * s).floor() as i64, (emax * s).ceil() as i64)
}

/// Branch points `I(hbar (theta + 2 pi k) / tau)` inside the ring. The
/// zero-frequency point `E = 0` is left out since its stationary time is
/// infinite.
pub fn stationary_terms(cfg: &RingConfig, theta: f64, k_range: (i64, i64)) -> Vec<StationaryTerm> {
    let (lo, hi) = cfg.window();
    (k_range.0..=k_range.1)
        .flat_map(|k| {
            let energy = cfg.hbar() * (theta + TAU * k as f64) / cfg.tau();
            let branches = if energy > 0.0 { cfg.actions_at_energy(energy) } else { Vec::new() };
            branches.into_iter().filter(move |&a| lo < a && a < hi).map(move |action| StationaryTerm {
                k,
                energy,
                action,
                time: TAU / (cfg.tau() * cfg.frequency(action).abs()),
            })
        })
        .collect()
}

/// `sum_{|m| <= M} e^{-eta |m|} e^{i m alpha}` with `alpha = 2 pi I / hbar + pi`.
pub fn repetition_sum(action: f64, hbar: f64, m_max: usize, eta_m: f64) -> f64 {
    let alpha = (TAU * action / hbar + PI).rem_euclid(TAU);
    let q = Complex64::from_polar((-eta_m).exp(), alpha);
    if (1.0 - q).norm() < 1e-300 {
        return (2 * m_max + 1) as f64;
    }
    let partial = q * (1.0 - q.powu(m_max as u32)) / (1.0 - q);
    1.0 + 2.0 * partial.re
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ScResolventOptions {
    pub k_range: (i64, i64),
    pub m_max: usize,
    /// Damping `e^{-eta_m |m|}` of the repetition sum.
    pub eta_m: f64,
}

impl ScResolventOptions {
    /// Damping `eta_m` with enough repetitions that the cut-off is negligible.
    pub fn for_config(cfg: &RingConfig, eta_m: f64) -> Self {
        ScResolventOptions { k_range: default_k_range(cfg), m_max: (40.0 / eta_m).ceil() as usize, eta_m }
    }
}

pub fn sc_resolvent(cfg: &RingConfig, theta: f64, opts: &ScResolventOptions) -> Complex64 {
    let mut acc = ComplexAcc::default();
    for t in stationary_terms(cfg, theta, opts.k_range) {
        let s = repetition_sum(t.action, cfg.hbar(), opts.m_max, opts.eta_m);
        acc.add(Complex64::new(t.time * s, 0.0));
    }
    acc.value()
}

pub fn exact_scan(spec: &QuantizedSpectrum, grid: usize, eta: f64) -> Result<ResolventScan> {
    positive_eta(eta)?;
    let theta = theta_grid(grid);
    let values = theta.par_iter().map(|&t| exact_resolvent(spec, t, eta)).collect::<Result<_>>()?;
    Ok(ResolventScan { theta, values, eta, kind: ResolventKind::Exact })
}

pub fn truncated_scan(traces: &TraceSeries, grid: usize, l_max: usize, eta: f64) -> Result<ResolventScan> {
    let theta = theta_grid(grid);
    let values = theta.par_iter().map(|&t| truncated_resolvent(traces, t, l_max, eta)).collect::<Result<_>>()?;
    Ok(ResolventScan { theta, values, eta, kind: ResolventKind::TruncatedFourier })
}

pub fn sc_scan(cfg: &RingConfig, grid: usize, opts: &ScResolventOptions) -> ResolventScan {
    let theta = theta_grid(grid);
    let values = theta.par_iter().map(|&t| sc_resolvent(cfg, t, opts)).collect();
    ResolventScan { theta, values, eta: opts.eta_m, kind: ResolventKind::Semiclassical }
}

/// Threshold a local maximum must exceed to count as a peak.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum NoiseFloor {
    /// Multiple of the median modulus.
    Relative(f64),
    Absolute(f64),
}

impl Default for NoiseFloor {
    fn default() -> Self {
        NoiseFloor::Relative(5.0)
    }
}

fn median(mut v: Vec<f64>) -> f64 {
    if v.is_empty() {
        return 0.0;
    }
    v.sort_by(f64::total_cmp);
    v[v.len() / 2]
}

/// Indices of circular local maxima of `|value|` above the floor.
fn peak_indices(scan: &ResolventScan, floor: NoiseFloor) -> Vec<usize> {
    let mods: Vec<f64> = scan.values.iter().map(|v| v.norm()).collect();
    let n = mods.len();
    if n < 3 {
        return Vec::new();
    }
    let threshold = match floor {
        NoiseFloor::Relative(f) => f * median(mods.clone()),
        NoiseFloor::Absolute(a) => a,
    };
    (0..n)
        .filter(|&j| {
            let (prev, next) = (mods[(j + n - 1) % n], mods[(j + 1) % n]);
            mods[j] > threshold && mods[j] > prev && mods[j] >= next
        })
        .collect()
}

/// Sorted angles of the peaks of `|value|`. Warns when `expected` is given and
/// more or fewer peaks are found (merged or lost peaks).
pub fn resolvent_peaks(scan: &ResolventScan, floor: NoiseFloor, expected: Option<usize>) -> Vec<f64> {
    let peaks: Vec<f64> = peak_indices(scan, floor).into_iter().map(|j| scan.theta[j]).collect();
    if let Some(n) = expected.filter(|&n| n != peaks.len()) {
        log::warn!("found {} resolvent peaks, expected {n}", peaks.len());
    }
    peaks
}

/// A resonance of the semiclassical resolvent, mapped to the action of the
/// branch dominating it.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct LocusPoint {
    pub theta: f64,
    pub k: i64,
    pub action: f64,
    /// Change of that action across one grid step.
    pub resolution: f64,
}

pub fn divergence_locus(cfg: &RingConfig, scan: &ResolventScan, opts: &ScResolventOptions, floor: NoiseFloor) -> Vec<LocusPoint> {
    let step = scan.step();
    peak_indices(scan, floor)
        .into_iter()
        .filter_map(|j| {
            let theta = scan.theta[j];
            stationary_terms(cfg, theta, opts.k_range)
                .into_iter()
                .map(|t| (t.time * repetition_sum(t.action, cfg.hbar(), opts.m_max, opts.eta_m).abs(), t))
                .max_by(|a, b| a.0.total_cmp(&b.0))
                .map(|(_, t)| LocusPoint {
                    theta,
                    k: t.k,
                    action: t.action,
                    resolution: cfg.hbar() * t.time * step / TAU,
                })
        })
        .collect()
}
