//! Figure pipelines and diagnostics, each writing plot-ready artifacts to
//! `out_dir/<scenario>/` together with `summary.json`, `timing.json` and a
//! `manifest.txt` recording the generating configuration.
//!
//! `summary.json` contains only deterministic values; wall-clock times go to
//! `timing.json` so that repeated runs produce byte-identical summaries.

use std::collections::BTreeMap;
use std::f64::consts::TAU;
use std::path::{Path, PathBuf};
use std::time::Instant;

use num_complex::Complex64;
use rand::{RngExt, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use crate::config::{parse_config, to_config_string};
use crate::exact::{det_u, exact_char_poly, exact_trace, exact_traces, exact_weighted_trace};
use crate::io;
use crate::model::{heisenberg_time, quantize_window};
use crate::resolvent::{
    divergence_locus, exact_scan, resolvent_peaks, sc_scan, truncated_scan, NoiseFloor, ScResolventOptions,
};
use crate::roots::{
    ensemble_circle_fraction, find_roots, infer_energies_unwrapped, match_roots, poly_from_roots,
    random_self_inversive, reciprocal_closure, unit_circle_stats, RootSet, TARGET_RESIDUAL, TOL_CIRCLE,
    TOL_CIRCLE_COARSE,
};
use crate::semiclassical::{
    complex_time_trace, edge_correction, edge_corrected_traces, orbit_range, sc_trace, sc_traces, sc_weighted_trace,
};
use crate::specdet::{
    newton_coeffs, relative_coeff_error, self_inversive_residual, symmetrize_bottom_up, symmetrize_top_down,
    truncated_specdet, CharPolynomial, PolyMode,
};
use crate::{Error, QuantizedSpectrum, Result, RingConfig};

/// Damping of the repetition sum in the semiclassical resolvent scan.
pub const SC_ETA_M: f64 = 0.01;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum ScenarioName {
    Fig1TraceVsTime,
    Fig2Traces,
    Fig3Coefficients,
    Fig4Roots,
    Fig5RootsCaseii,
    ResolventScan,
    FractionScan,
    SolverSelftest,
}

impl ScenarioName {
    pub const ALL: [ScenarioName; 8] = [
        ScenarioName::Fig1TraceVsTime,
        ScenarioName::Fig2Traces,
        ScenarioName::Fig3Coefficients,
        ScenarioName::Fig4Roots,
        ScenarioName::Fig5RootsCaseii,
        ScenarioName::ResolventScan,
        ScenarioName::FractionScan,
        ScenarioName::SolverSelftest,
    ];

    pub fn as_str(&self) -> &'static str {
        match self {
            ScenarioName::Fig1TraceVsTime => "fig1-trace-vs-time",
            ScenarioName::Fig2Traces => "fig2-traces",
            ScenarioName::Fig3Coefficients => "fig3-coefficients",
            ScenarioName::Fig4Roots => "fig4-roots",
            ScenarioName::Fig5RootsCaseii => "fig5-roots-caseii",
            ScenarioName::ResolventScan => "resolvent-scan",
            ScenarioName::FractionScan => "fraction-scan",
            ScenarioName::SolverSelftest => "solver-selftest",
        }
    }

    /// Option keys the scenario accepts.
    pub fn option_keys(&self) -> &'static [&'static str] {
        match self {
            ScenarioName::Fig1TraceVsTime => &["grid", "e_ref"],
            ScenarioName::Fig2Traces => &["im_fraction"],
            ScenarioName::Fig3Coefficients => &["mode", "det_phase"],
            ScenarioName::Fig4Roots | ScenarioName::Fig5RootsCaseii => &["mode", "det_phase"],
            ScenarioName::ResolventScan => &["eta", "grid"],
            ScenarioName::FractionScan => &["grid"],
            ScenarioName::SolverSelftest => &["seed"],
        }
    }

    pub fn needs_config(&self) -> bool {
        *self != ScenarioName::SolverSelftest
    }
}

impl std::fmt::Display for ScenarioName {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.as_str())
    }
}

impl std::str::FromStr for ScenarioName {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        ScenarioName::ALL
            .into_iter()
            .find(|n| n.as_str() == s)
            .ok_or_else(|| Error::Config(format!("unknown scenario `{s}`")))
    }
}

/// Scenario options; `None` means the scenario default.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct ScenarioOptions {
    pub seed: Option<u64>,
    pub mode: Option<PolyMode>,
    pub eta: Option<f64>,
    pub im_fraction: Option<f64>,
    pub grid: Option<usize>,
    pub e_ref: Option<f64>,
    /// Free-parameter determinant `e^{i det_phase}` in place of the exact one.
    pub det_phase: Option<f64>,
}

impl ScenarioOptions {
    fn given(&self) -> Vec<&'static str> {
        let mut keys = Vec::new();
        let flags = [
            ("seed", self.seed.is_some()),
            ("mode", self.mode.is_some()),
            ("eta", self.eta.is_some()),
            ("im_fraction", self.im_fraction.is_some()),
            ("grid", self.grid.is_some()),
            ("e_ref", self.e_ref.is_some()),
            ("det_phase", self.det_phase.is_some()),
        ];
        for (k, set) in flags {
            if set {
                keys.push(k);
            }
        }
        keys
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Scenario {
    pub name: ScenarioName,
    pub config: Option<RingConfig>,
    pub options: ScenarioOptions,
}

impl Scenario {
    /// Rejects a missing configuration and options the scenario does not use.
    pub fn new(name: ScenarioName, config: Option<RingConfig>, options: ScenarioOptions) -> Result<Self> {
        if name.needs_config() && config.is_none() {
            return Err(Error::Config(format!("scenario {name} needs a configuration")));
        }
        if let Some(bad) = options.given().into_iter().find(|k| !name.option_keys().contains(k)) {
            return Err(Error::Config(format!("scenario {name} does not take option `{bad}`")));
        }
        let positive = [("eta", options.eta), ("e_ref", options.e_ref)];
        if let Some((k, v)) = positive.into_iter().find(|(_, v)| v.is_some_and(|x| !(x > 0.0 && x.is_finite()))) {
            return Err(Error::Config(format!("option `{k}` must be positive, got {}", v.unwrap())));
        }
        if options.im_fraction.is_some_and(|f| !(f >= 0.0 && f.is_finite())) {
            return Err(Error::Config("option `im_fraction` must be non-negative".into()));
        }
        if options.grid.is_some_and(|g| g < 2) {
            return Err(Error::Config("option `grid` must be at least 2".into()));
        }
        if options.mode == Some(PolyMode::Exact) {
            return Err(Error::Config("mode must be raw, bottom-up, top-down or truncated".into()));
        }
        if name == ScenarioName::Fig3Coefficients && options.mode == Some(PolyMode::Truncated) {
            return Err(Error::Config("fig3-coefficients compares raw against a symmetrized mode".into()));
        }
        Ok(Scenario { name, config, options })
    }

    fn cfg(&self) -> &RingConfig {
        self.config.as_ref().expect("checked in Scenario::new")
    }
}

/// Machine-readable outcome of a scenario run.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct SummaryReport {
    pub scenario: String,
    pub config_id: Option<String>,
    pub dimension: Option<usize>,
    /// Effective option values, defaults filled in.
    pub options: BTreeMap<String, Value>,
    pub metrics: BTreeMap<String, Value>,
    /// Qualitative claims checked on the emitted data.
    pub checks: BTreeMap<String, bool>,
    pub files: Vec<String>,
    #[serde(skip)]
    pub seconds: f64,
}

impl SummaryReport {
    pub fn passed(&self) -> bool {
        self.checks.values().all(|&c| c)
    }

    pub fn metric(&self, key: &str) -> Option<f64> {
        self.metrics.get(key).and_then(Value::as_f64)
    }

    fn put(&mut self, key: impl Into<String>, v: impl Into<Value>) {
        self.metrics.insert(key.into(), v.into());
    }

    fn check(&mut self, key: &str, ok: bool) {
        self.checks.insert(key.to_string(), ok);
    }

    fn opt(&mut self, key: &str, v: impl Into<Value>) {
        self.options.insert(key.to_string(), v.into());
    }
}

struct Out {
    dir: PathBuf,
    files: Vec<String>,
}

impl Out {
    fn path(&mut self, name: &str) -> PathBuf {
        self.files.push(name.to_string());
        self.dir.join(name)
    }

    fn csv<T: Serialize>(&mut self, name: &str, rows: impl IntoIterator<Item = T>) -> Result<()> {
        let mut w = csv::Writer::from_writer(io::create(&self.path(name))?);
        for r in rows {
            w.serialize(r)?;
        }
        w.flush()?;
        Ok(())
    }
}

/// Built-in configurations, identical to the files under `configs/`.
pub fn preset(name: &str) -> Option<RingConfig> {
    let text = match name {
        "fig1" => include_str!("../configs/fig1.conf"),
        "case-i-n48" => include_str!("../configs/case_i_n48.conf"),
        "fig3-n28" => include_str!("../configs/fig3_n28.conf"),
        "case-ii-n48" => include_str!("../configs/case_ii_n48.conf"),
        _ => return None,
    };
    Some(parse_config(text).expect("built-in configuration parses"))
}

pub const PRESETS: [&str; 4] = ["fig1", "case-i-n48", "fig3-n28", "case-ii-n48"];

pub fn run_scenario(sc: &Scenario, out_dir: &Path) -> Result<SummaryReport> {
    let start = Instant::now();
    let dir = out_dir.join(sc.name.as_str());
    std::fs::create_dir_all(&dir).map_err(|e| Error::from(e).context(format!("create {}", dir.display())))?;
    let mut out = Out { dir, files: Vec::new() };
    let mut rep = SummaryReport { scenario: sc.name.to_string(), ..Default::default() };
    if let Some(cfg) = &sc.config {
        rep.config_id = Some(cfg.id());
        rep.dimension = Some(cfg.dimension());
    }
    let run = match sc.name {
        ScenarioName::Fig1TraceVsTime => fig1(sc, &mut out, &mut rep),
        ScenarioName::Fig2Traces => fig2(sc, &mut out, &mut rep),
        ScenarioName::Fig3Coefficients => fig3(sc, &mut out, &mut rep),
        ScenarioName::Fig4Roots => root_figure(sc, &[PolyMode::Raw, PolyMode::BottomUp, PolyMode::TopDown], &mut out, &mut rep),
        ScenarioName::Fig5RootsCaseii => root_figure(
            sc,
            &[PolyMode::Raw, PolyMode::BottomUp, PolyMode::TopDown, PolyMode::Truncated],
            &mut out,
            &mut rep,
        ),
        ScenarioName::ResolventScan => resolvent(sc, &mut out, &mut rep),
        ScenarioName::FractionScan => fraction_scan(sc, &mut out, &mut rep),
        ScenarioName::SolverSelftest => selftest(sc, &mut rep),
    };
    run.map_err(|e| e.context(format!("scenario {}", sc.name)))?;

    write_manifest(sc, &rep, &mut out)?;
    rep.seconds = start.elapsed().as_secs_f64();
    rep.files.extend(out.files.iter().cloned());
    rep.files.push("summary.json".into());
    let mut w = io::create(&out.dir.join("summary.json"))?;
    serde_json::to_writer_pretty(&mut w, &rep)?;
    std::io::Write::write_all(&mut w, b"\n")?;
    let timing = json!({ "scenario": rep.scenario, "seconds": rep.seconds });
    std::fs::write(out.dir.join("timing.json"), format!("{timing:#}\n"))?;
    if sc.name == ScenarioName::SolverSelftest && !rep.passed() {
        let failed: Vec<&str> = rep.checks.iter().filter(|(_, &ok)| !ok).map(|(k, _)| k.as_str()).collect();
        return Err(Error::Invariant(failed.join(", ")));
    }
    Ok(rep)
}

fn write_manifest(sc: &Scenario, rep: &SummaryReport, out: &mut Out) -> Result<()> {
    let mut text = format!("# scenario {}\n", sc.name);
    for (k, v) in &rep.options {
        text.push_str(&format!("# option {k} = {v}\n"));
    }
    if sc.name == ScenarioName::Fig1TraceVsTime {
        text.push_str("# time axis: l = 1, tau_j = (j / grid) t_H for j = 1 ..= grid\n");
    }
    if let Some(cfg) = &sc.config {
        text.push_str(&to_config_string(cfg));
    }
    std::fs::write(out.path("manifest.txt"), text)?;
    Ok(())
}

fn mean(v: impl IntoIterator<Item = f64>) -> f64 {
    let (s, n) = v.into_iter().fold((0.0, 0usize), |(s, n), x| (s + x, n + 1));
    if n == 0 { 0.0 } else { s / n as f64 }
}

#[derive(Serialize, Deserialize)]
pub struct TimeRow {
    pub t_over_th: f64,
    pub re: f64,
    pub im: f64,
    pub kind: String,
}

/// `l = 1`, `tau` swept so that `t / t_H` runs over `(0, 1]`.
fn fig1(sc: &Scenario, out: &mut Out, rep: &mut SummaryReport) -> Result<()> {
    let cfg = sc.cfg();
    let grid = sc.options.grid.unwrap_or(512);
    let (emin, emax) = cfg.energy_window();
    let e_ref = sc.options.e_ref.unwrap_or(emax);
    let t_h = heisenberg_time(cfg, emin, emax)?;
    rep.opt("grid", grid);
    rep.opt("e_ref", e_ref);
    rep.put("t_heisenberg", t_h);

    const KINDS: [&str; 5] = ["exact", "semiclassical", "edge-corrected", "exact-weighted", "semiclassical-weighted"];
    let rows: Vec<(f64, [Complex64; 5])> = (1..=grid)
        .into_par_iter()
        .map(|j| {
            let x = j as f64 / grid as f64;
            let c = cfg.with_tau(x * t_h)?;
            let spec = quantize_window(&c)?;
            let sc1 = sc_trace(&c, 1);
            Ok((
                x,
                [
                    exact_trace(&spec, &c, 1),
                    sc1,
                    sc1 + edge_correction(&c, 1).value,
                    exact_weighted_trace(&spec, &c, 1, e_ref),
                    sc_weighted_trace(&c, 1, e_ref),
                ],
            ))
        })
        .collect::<Result<_>>()?;

    out.csv(
        "fig1.csv",
        KINDS.iter().enumerate().flat_map(|(i, kind)| {
            rows.iter().map(move |(x, v)| TimeRow { t_over_th: *x, re: v[i].re, im: v[i].im, kind: kind.to_string() })
        }),
    )?;
    let err = |a: usize, b: usize| mean(rows.iter().map(|(_, v)| (v[a] - v[b]).norm()));
    let (plain, edge, weighted) = (err(1, 0), err(2, 0), err(4, 3));
    rep.put("mean_abs_error_unweighted", plain);
    rep.put("mean_abs_error_edge_corrected", edge);
    rep.put("mean_abs_error_weighted", weighted);
    rep.put("weighting_gain", plain / weighted);
    rep.check("weighting_improves_tenfold", plain >= 10.0 * weighted);
    Ok(())
}

#[derive(Serialize, Deserialize)]
pub struct ComplexTimeRow {
    pub l: usize,
    pub exact_re: f64,
    pub exact_im: f64,
    pub sc_re: f64,
    pub sc_im: f64,
}

fn fig2(sc: &Scenario, out: &mut Out, rep: &mut SummaryReport) -> Result<()> {
    let cfg = sc.cfg();
    let n = cfg.dimension();
    let f = sc.options.im_fraction.unwrap_or(0.02);
    rep.opt("im_fraction", f);
    let spec = quantize_window(cfg)?;
    let ex = exact_traces(&spec, cfg, n);
    let sct = sc_traces(cfg, n);
    let edge = edge_corrected_traces(cfg, n);
    io::write_traces(io::create(&out.path("traces.csv"))?, &[&ex, &sct, &edge])?;

    let ct: Vec<(Complex64, Complex64)> =
        (1..=n).map(|l| complex_time_trace(&spec, cfg, l, f)).collect::<Result<_>>()?;
    out.csv(
        "complex_time.csv",
        ct.iter().enumerate().map(|(i, (e, s))| ComplexTimeRow {
            l: i + 1,
            exact_re: e.re,
            exact_im: e.im,
            sc_re: s.re,
            sc_im: s.im,
        }),
    )?;

    let errs = |s: &[Complex64]| -> Vec<f64> { (1..=n).map(|l| (s[l] - ex.values[l]).norm()).collect() };
    let (e_sc, e_edge) = (errs(&sct.values), errs(&edge.values));
    let half = n / 2;
    let (lo, hi) = (mean(e_sc[..half].iter().copied()), mean(e_sc[half..].iter().copied()));
    rep.put("sc_error_by_l", e_sc.clone());
    rep.put("edge_corrected_error_by_l", e_edge.clone());
    rep.put("sc_mean_error_lower_half", lo);
    rep.put("sc_mean_error_upper_half", hi);
    rep.put("edge_corrected_mean_error", mean(e_edge.iter().copied()));
    let rel = |pairs: &mut dyn Iterator<Item = (Complex64, Complex64)>| mean(pairs.map(|(e, s)| (s - e).norm() / e.norm()));
    rep.put("complex_time_mean_relative_error", rel(&mut ct.iter().copied()));
    rep.put(
        "real_time_mean_relative_error",
        rel(&mut (1..=n).map(|l| (ex.values[l], sct.values[l]))),
    );
    rep.check("sc_error_grows_with_l", hi > lo);
    Ok(())
}

fn det_for(sc: &Scenario, spec: &QuantizedSpectrum, cfg: &RingConfig, rep: &mut SummaryReport) -> Complex64 {
    match sc.options.det_phase {
        Some(psi) => {
            rep.opt("det", "free-phase");
            rep.opt("det_phase", psi);
            Complex64::from_polar(1.0, psi)
        }
        None => {
            rep.opt("det", "exact");
            det_u(spec, cfg)
        }
    }
}

fn symmetrized(mode: PolyMode, raw: &CharPolynomial, det: Complex64) -> Result<CharPolynomial> {
    match mode {
        PolyMode::Raw => Ok(raw.clone()),
        PolyMode::BottomUp => symmetrize_bottom_up(raw, det),
        PolyMode::TopDown => symmetrize_top_down(raw, det),
        PolyMode::Truncated => truncated_specdet(det, raw.degree()),
        PolyMode::Exact => Err(Error::Config("exact is not an approximation mode".into())),
    }
}

#[derive(Serialize, Deserialize)]
pub struct CoeffRow {
    pub k: usize,
    pub re: f64,
    pub im: f64,
    pub abs: f64,
    pub mode: String,
}

fn coeff_rows(p: &CharPolynomial) -> impl Iterator<Item = CoeffRow> + '_ {
    p.coeffs.iter().enumerate().map(|(k, c)| CoeffRow {
        k,
        re: c.re,
        im: c.im,
        abs: c.norm(),
        mode: p.mode.as_str().to_string(),
    })
}

fn fig3(sc: &Scenario, out: &mut Out, rep: &mut SummaryReport) -> Result<()> {
    let cfg = sc.cfg();
    let n = cfg.dimension();
    let mode = sc.options.mode.unwrap_or(PolyMode::BottomUp);
    rep.opt("mode", mode.as_str());
    let spec = quantize_window(cfg)?;
    let det = det_for(sc, &spec, cfg, rep);
    let exact = exact_char_poly(&spec, cfg);
    let raw = newton_coeffs(&sc_traces(cfg, n), n)?;
    let sym = symmetrized(mode, &raw, det)?;
    let mut polys = vec![&exact, &raw];
    if mode != PolyMode::Raw {
        polys.push(&sym);
    }
    out.csv("coefficients.csv", polys.iter().flat_map(|p| coeff_rows(p)))?;
    for p in &polys {
        io::write_poly(io::create(&out.path(&format!("poly_{}.json", p.mode.as_str())))?, p)?;
    }
    let err_by_k = |p: &CharPolynomial| -> Vec<f64> {
        p.coeffs.iter().zip(&exact.coeffs).map(|(a, b)| (a - b).norm()).collect()
    };
    let rel = |err: &[f64], k: usize| err[k] / exact.coeffs[k].norm();
    let raw_err = err_by_k(&raw);
    let sym_err = err_by_k(&sym);
    let low = 1..5.min(n + 1);
    let rel_low = low.clone().map(|k| rel(&raw_err, k)).fold(0.0, f64::max);
    let rel_high = (5..=n).map(|k| rel(&raw_err, k)).fold(f64::INFINITY, f64::min);
    // Mirrored onto the top coefficients by the symmetrization.
    let mirrored = low.clone().map(|k| rel(&sym_err, n - k)).fold(0.0, f64::max);
    rep.put("raw_relative_error_by_k", (0..=n).map(|k| rel(&raw_err, k)).collect::<Vec<_>>());
    rep.put("raw_error_by_k", raw_err);
    rep.put(format!("{}.error_by_k", mode.as_str()), sym_err);
    rep.put("exact_abs_by_k", exact.coeffs.iter().map(|c| c.norm()).collect::<Vec<_>>());
    rep.put("raw_max_relative_error_k_lt_5", rel_low);
    rep.put("raw_min_relative_error_k_ge_5", rel_high);
    rep.put(format!("{}.max_relative_error_mirrored_k_lt_5", mode.as_str()), mirrored);
    rep.put("raw_relative_coeff_error", relative_coeff_error(&raw, &exact));
    rep.put(format!("{}.relative_coeff_error", mode.as_str()), relative_coeff_error(&sym, &exact));
    rep.put(format!("{}.self_inversive_residual", mode.as_str()), self_inversive_residual(&sym, det));
    rep.put("raw.self_inversive_residual", self_inversive_residual(&raw, det));
    rep.check("raw_error_smallest_for_k_lt_5", rel_low < rel_high);
    if mode == PolyMode::BottomUp {
        rep.check("bottom_up_mirrors_low_k_accuracy", mirrored <= rel_low * (1.0 + 1e-9));
    }
    Ok(())
}

fn root_figure(sc: &Scenario, default_modes: &[PolyMode], out: &mut Out, rep: &mut SummaryReport) -> Result<()> {
    let cfg = sc.cfg();
    let n = cfg.dimension();
    let spec = quantize_window(cfg)?;
    let det = det_for(sc, &spec, cfg, rep);
    let modes: Vec<PolyMode> = match sc.options.mode {
        Some(m) => vec![m],
        None => default_modes.to_vec(),
    };
    rep.opt("modes", modes.iter().map(|m| m.as_str()).collect::<Vec<_>>());

    let reference = RootSet::from_exact(spec.char_roots());
    let exact = exact_char_poly(&spec, cfg);
    let exact_roots = find_roots(&exact, TARGET_RESIDUAL)?;
    io::write_poly(io::create(&out.path("poly_exact.json"))?, &exact)?;
    io::write_roots(io::create(&out.path("roots_exact.csv"))?, &exact_roots)?;
    let p = match_roots(&exact_roots, &reference);
    rep.put("exact.max_pairing_distance", p.max_distance());
    rep.put("exact.circle_fraction", unit_circle_stats(&exact_roots, TOL_CIRCLE).0);

    let raw = newton_coeffs(&sc_traces(cfg, n), n)?;
    let mut recip_ok = true;
    for mode in modes {
        let poly = symmetrized(mode, &raw, det)?;
        let rs = find_roots(&poly, TARGET_RESIDUAL)?;
        let pairing = match_roots(&rs, &reference);
        let name = mode.as_str();
        io::write_poly(io::create(&out.path(&format!("poly_{name}.json")))?, &poly)?;
        io::write_roots(io::create(&out.path(&format!("roots_{name}.csv")))?, &rs)?;
        io::write_pairing(io::create(&out.path(&format!("pairing_{name}.csv")))?, &pairing)?;
        let (fine, dev) = unit_circle_stats(&rs, TOL_CIRCLE);
        rep.put(format!("{name}.circle_fraction"), fine);
        rep.put(format!("{name}.circle_fraction_coarse"), unit_circle_stats(&rs, TOL_CIRCLE_COARSE).0);
        rep.put(format!("{name}.max_circle_deviation"), dev);
        rep.put(format!("{name}.mean_pairing_distance"), pairing.mean_distance());
        rep.put(format!("{name}.max_pairing_distance"), pairing.max_distance());
        rep.put(format!("{name}.self_inversive_residual"), self_inversive_residual(&poly, det));
        let closure = reciprocal_closure(&rs);
        rep.put(format!("{name}.reciprocal_closure"), closure);
        if mode != PolyMode::Raw {
            recip_ok &= closure < 1e-8;
        }
    }
    rep.check("symmetrized_roots_reciprocal", recip_ok);
    Ok(())
}

#[derive(Serialize, Deserialize)]
pub struct PeakRow {
    pub kind: String,
    pub theta: f64,
    pub action: Option<f64>,
}

fn resolvent(sc: &Scenario, out: &mut Out, rep: &mut SummaryReport) -> Result<()> {
    let cfg = sc.cfg();
    let n = cfg.dimension();
    let grid = sc.options.grid.unwrap_or(1 << 14);
    let eta = sc.options.eta.unwrap_or(1e-3);
    rep.opt("grid", grid);
    rep.opt("eta", eta);
    rep.opt("eta_m", SC_ETA_M);
    let spec = quantize_window(cfg)?;
    let ex = exact_scan(&spec, grid, eta)?;
    let tr = truncated_scan(&exact_traces(&spec, cfg, n), grid, n, eta)?;
    let opts = ScResolventOptions::for_config(cfg, SC_ETA_M);
    let scs = sc_scan(cfg, grid, &opts);
    io::write_resolvent(io::create(&out.path("resolvent.csv"))?, &[&ex, &tr, &scs])?;

    let floor = NoiseFloor::default();
    let peaks = resolvent_peaks(&ex, floor, Some(n));
    let locus = divergence_locus(cfg, &scs, &opts, floor);
    out.csv(
        "peaks.csv",
        peaks
            .iter()
            .map(|&theta| PeakRow { kind: "exact".into(), theta, action: None })
            .chain(locus.iter().map(|p| PeakRow { kind: "semiclassical".into(), theta: p.theta, action: Some(p.action) })),
    )?;

    let step = ex.step();
    let circ = |a: f64, b: f64| {
        let d = (a - b).rem_euclid(TAU);
        d.min(TAU - d)
    };
    let worst = spec
        .phases()
        .iter()
        .map(|&phi| peaks.iter().map(|&t| circ(t, phi)).fold(f64::INFINITY, f64::min))
        .fold(0.0, f64::max);
    let h = cfg.hbar();
    let locus_dev = locus
        .iter()
        .map(|p| (p.action - h * ((p.action / h - 0.5).round() + 0.5)).abs() / p.resolution)
        .fold(0.0, f64::max);
    let levels_found = spec
        .levels
        .iter()
        .filter(|lvl| locus.iter().any(|p| (p.action - lvl.action).abs() <= p.resolution))
        .count();
    rep.put("exact_peak_count", peaks.len());
    rep.put("exact_peak_max_offset_steps", worst / step);
    rep.put("locus_points", locus.len());
    rep.put("locus_max_offset_resolutions", locus_dev);
    rep.put("locus_levels_found", levels_found);
    rep.check("exact_peaks_within_one_step", peaks.len() == n && worst <= step);
    rep.check("locus_on_bohr_sommerfeld_actions", locus_dev <= 1.0 && levels_found == n);
    Ok(())
}

/// Fraction of vanishing semiclassical traces, from the closed form and by
/// counting.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ZeroTraceFraction {
    /// `(sqrt E+ + sqrt E-) / (2 (sqrt E+ - sqrt E-))`
    pub formula: f64,
    /// Number of `l` in `1 ..= N` with no periodic orbit in the ring.
    pub count: usize,
    pub n: usize,
    /// `2 pi / (tau (I+ - script_i))`: below this period the first repetition
    /// lies outside the ring.
    pub onset: f64,
}

impl ZeroTraceFraction {
    /// `|f N - count| <= 1`
    pub fn consistent(&self) -> bool {
        (self.formula * self.n as f64 - self.count as f64).abs() <= 1.0
    }
}

fn zero_trace_fraction(cfg: &RingConfig, e_minus: f64, e_plus: f64) -> Result<ZeroTraceFraction> {
    if cfg.is_case_i() {
        return Err(Error::Config("zero-trace fraction needs a case (ii) ring (one branch of H = E)".into()));
    }
    if !(0.0 <= e_minus && e_minus < e_plus) {
        return Err(Error::Domain(format!("need 0 <= E- < E+, got {e_minus}, {e_plus}")));
    }
    let (a, b) = (e_minus.sqrt(), e_plus.sqrt());
    let n = cfg.dimension();
    let count = (1..=n).filter(|&l| orbit_range(cfg, l).is_empty()).count();
    let onset = TAU / (cfg.tau() * (cfg.window().1 - cfg.script_i()));
    Ok(ZeroTraceFraction { formula: 0.5 * (b + a) / (b - a), count, n, onset })
}

/// The closed-form fraction, cross-checked against direct counting; a
/// disagreement is logged.
pub fn fraction_zero_traces(cfg: &RingConfig, e_minus: f64, e_plus: f64) -> Result<ZeroTraceFraction> {
    let out = zero_trace_fraction(cfg, e_minus, e_plus)?;
    if !out.consistent() {
        log::warn!("zero-trace fraction {} disagrees with the count {} of {}", out.formula, out.count, out.n);
    }
    Ok(out)
}

/// Energies of the nominal ring edges.
pub fn nominal_energies(cfg: &RingConfig) -> (f64, f64) {
    let (lo, hi) = cfg.nominal_window();
    let (a, b) = (cfg.energy(lo), cfg.energy(hi));
    (a.min(b), a.max(b))
}

#[derive(Serialize, Deserialize)]
pub struct FractionRow {
    pub e_minus: f64,
    pub n: usize,
    pub formula: f64,
    pub formula_times_n: f64,
    pub onset: f64,
    pub count: usize,
}

/// The configured ring, then a scan of `E-` at fixed `hbar`, shift and `E+`
/// with the natural level count.
fn fraction_scan(sc: &Scenario, out: &mut Out, rep: &mut SummaryReport) -> Result<()> {
    let cfg = sc.cfg();
    let grid = sc.options.grid.unwrap_or(16);
    rep.opt("grid", grid);
    let (e_lo, e_hi) = nominal_energies(cfg);
    let base = fraction_zero_traces(cfg, e_lo, e_hi)?;
    rep.put("formula", base.formula);
    rep.put("count", base.count);
    rep.put("formula_times_n", base.formula * base.n as f64);
    rep.put("onset", base.onset);
    rep.check("formula_consistent_with_count", base.consistent());

    // Lowest E- keeps the lower edge above -hbar / 2.
    let h = cfg.hbar();
    let min_root = (-cfg.script_i() - 0.5 * h).max(0.0);
    let e_floor = 0.5 * min_root * min_root + 1e-6 * h;
    let e_top = e_hi / 4.0;
    let mut rows = Vec::new();
    for j in 0..grid {
        let e = e_floor + (e_top - e_floor) * j as f64 / (grid - 1) as f64;
        let c = RingConfig::from_energies(h, cfg.script_i(), e, e_hi, None, None)?;
        if c.is_case_i() {
            continue;
        }
        let f = zero_trace_fraction(&c, e, e_hi)?;
        rows.push(FractionRow {
            e_minus: e,
            n: f.n,
            formula: f.formula,
            formula_times_n: f.formula * f.n as f64,
            onset: f.onset,
            count: f.count,
        });
    }
    rep.put("scan_points", rows.len());
    out.csv("fraction.csv", rows)?;
    Ok(())
}

fn selftest(sc: &Scenario, rep: &mut SummaryReport) -> Result<()> {
    let seed = sc.options.seed.unwrap_or(1);
    rep.opt("seed", seed);

    for name in ["fig3-n28", "case-i-n48", "case-ii-n48"] {
        let cfg = preset(name).expect("known preset");
        let n = cfg.dimension();
        let spec = quantize_window(&cfg)?;
        let exact = exact_char_poly(&spec, &cfg);
        let newton = newton_coeffs(&exact_traces(&spec, &cfg, n), n)?;
        let coeff_err = relative_coeff_error(&newton, &exact);
        let rs = find_roots(&exact, TARGET_RESIDUAL)?;
        let root_err = match_roots(&rs, &RootSet::from_exact(spec.char_roots())).max_distance();
        let (_, dev) = unit_circle_stats(&rs, TOL_CIRCLE);
        let mut energies = infer_energies_unwrapped(&rs, &cfg)?;
        energies.sort_by(f64::total_cmp);
        let mut want = spec.energies();
        want.sort_by(f64::total_cmp);
        let (emin, emax) = cfg.energy_window();
        let e_err = if energies.len() == want.len() {
            energies.iter().zip(&want).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max) / (emax - emin)
        } else {
            f64::INFINITY
        };
        rep.put(format!("{name}.newton_relative_error"), coeff_err);
        rep.put(format!("{name}.root_error"), root_err);
        rep.put(format!("{name}.circle_deviation"), dev);
        rep.put(format!("{name}.energy_error"), e_err);
        rep.check(&format!("{name}.oracle_closure"), coeff_err < 1e-8 && root_err < 1e-8 && dev < 1e-10);
        rep.check(&format!("{name}.energy_round_trip"), e_err < 1e-9);
    }

    // Known random roots in an annulus around the unit circle.
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let cases: Vec<Vec<Complex64>> = (0..200)
        .map(|_| {
            let deg = rng.random_range(1..=50usize);
            (0..deg)
                .map(|_| Complex64::from_polar(rng.random_range(0.6..1.4), rng.random_range(0.0..TAU)))
                .collect()
        })
        .collect();
    let worst = cases
        .par_iter()
        .map(|roots| {
            let rs = find_roots(&poly_from_roots(roots), TARGET_RESIDUAL)?;
            Ok(match_roots(&rs, &RootSet::from_exact(roots.clone())).max_distance())
        })
        .collect::<Result<Vec<f64>>>()?
        .into_iter()
        .fold(0.0, f64::max);
    rep.put("random_roots.max_error", worst);
    rep.check("random_roots.recovered", worst < 1e-8);

    let closure = (0..50)
        .into_par_iter()
        .map(|i| {
            let p = random_self_inversive(48, seed.wrapping_add(1000 + i))?;
            let rs = find_roots(&p, TARGET_RESIDUAL)?;
            Ok(reciprocal_closure(&rs).max(self_inversive_residual(&p, Complex64::new(1.0, 0.0))))
        })
        .collect::<Result<Vec<f64>>>()?
        .into_iter()
        .fold(0.0, f64::max);
    rep.put("self_inversive.max_closure", closure);
    rep.check("self_inversive.closed", closure < 1e-8);
    let frac = ensemble_circle_fraction(48, 200, seed, TOL_CIRCLE)?;
    rep.put("self_inversive.circle_fraction", frac);
    rep.check("self_inversive.circle_fraction_near_57_percent", (frac - 0.57).abs() <= 0.05);
    Ok(())
}
