mod common;

use std::collections::BTreeMap;
use std::path::Path;

use num_complex::Complex64;
use orbitsum::io::{read_pairing, read_roots, read_traces};
use orbitsum::roots::TOL_CIRCLE;
use orbitsum::scenario::{ScenarioName, SummaryReport, TimeRow};

fn close(a: f64, b: f64) -> bool {
    (a - b).abs() <= 1e-12 * a.abs().max(b.abs()).max(1.0)
}

fn mean(v: impl Iterator<Item = f64>) -> f64 {
    let v: Vec<f64> = v.collect();
    v.iter().sum::<f64>() / v.len() as f64
}

fn metric_array(rep: &SummaryReport, key: &str) -> Vec<f64> {
    serde_json::from_value(rep.metrics[key].clone()).unwrap()
}

#[test]
fn figure_files_match_golden() {
    let dir = tempfile::tempdir().unwrap();
    let mut bad = Vec::new();
    for (name, preset, files) in common::GOLDEN {
        common::run_preset(name, preset, dir.path());
        bad.extend(common::compare_golden(name, files, dir.path()));
    }
    assert!(bad.is_empty(), "regenerate with ORBITSUM_BLESS=1 if intended: {bad:?}");
}

#[test]
fn fig1_summary_recomputed_from_csv() {
    let dir = tempfile::tempdir().unwrap();
    let rep = common::run_preset(ScenarioName::Fig1TraceVsTime, "fig1", dir.path());
    let rows: Vec<TimeRow> = common::read_csv(&dir.path().join("fig1-trace-vs-time/fig1.csv"));
    let mut by_kind: BTreeMap<&str, Vec<Complex64>> = BTreeMap::new();
    for r in &rows {
        by_kind.entry(r.kind.as_str()).or_default().push(Complex64::new(r.re, r.im));
    }
    let err = |a: &str, b: &str| mean(by_kind[a].iter().zip(&by_kind[b]).map(|(x, y)| (x - y).norm()));
    let plain = err("semiclassical", "exact");
    let weighted = err("semiclassical-weighted", "exact-weighted");
    assert!(close(plain, rep.metric("mean_abs_error_unweighted").unwrap()));
    assert!(close(err("edge-corrected", "exact"), rep.metric("mean_abs_error_edge_corrected").unwrap()));
    assert!(close(weighted, rep.metric("mean_abs_error_weighted").unwrap()));
    assert!(close(plain / weighted, rep.metric("weighting_gain").unwrap()));
    assert!(rows.windows(2).filter(|w| w[0].kind == w[1].kind).all(|w| w[0].t_over_th < w[1].t_over_th));
}

#[test]
fn fig2_summary_recomputed_from_csv() {
    let dir = tempfile::tempdir().unwrap();
    let rep = common::run_preset(ScenarioName::Fig2Traces, "case-i-n48", dir.path());
    let series = read_traces(std::fs::File::open(dir.path().join("fig2-traces/traces.csv")).unwrap()).unwrap();
    let (ex, sc) = (&series[0].values, &series[1].values);
    let want = metric_array(&rep, "sc_error_by_l");
    assert_eq!(want.len(), ex.len() - 1);
    for (l, w) in (1..ex.len()).zip(&want) {
        assert!(close((sc[l] - ex[l]).norm(), *w), "l = {l}");
    }
}

fn check_root_metrics(rep: &SummaryReport, dir: &Path, modes: &[&str]) {
    for mode in modes {
        let roots = read_roots(std::fs::File::open(dir.join(format!("roots_{mode}.csv"))).unwrap()).unwrap();
        let devs: Vec<f64> = roots.iter().map(|r| (Complex64::new(r.re, r.im).norm() - 1.0).abs()).collect();
        let frac = devs.iter().filter(|&&d| d <= TOL_CIRCLE).count() as f64 / devs.len() as f64;
        assert!(close(frac, rep.metric(&format!("{mode}.circle_fraction")).unwrap()), "{mode}");
        assert!(roots.iter().all(|r| r.on_circle == ((r.abs - 1.0).abs() <= TOL_CIRCLE)), "{mode}");

        let pairs = read_pairing(std::fs::File::open(dir.join(format!("pairing_{mode}.csv"))).unwrap()).unwrap();
        let d = mean(pairs.iter().map(|p| p.distance));
        assert!(close(d, rep.metric(&format!("{mode}.mean_pairing_distance")).unwrap()), "{mode}");
    }
}

#[test]
fn root_summaries_recomputed_from_csv() {
    let dir = tempfile::tempdir().unwrap();
    let rep = common::run_preset(ScenarioName::Fig4Roots, "case-i-n48", dir.path());
    check_root_metrics(&rep, &dir.path().join("fig4-roots"), &["raw", "bottom-up", "top-down"]);
    let rep = common::run_preset(ScenarioName::Fig5RootsCaseii, "case-ii-n48", dir.path());
    check_root_metrics(&rep, &dir.path().join("fig5-roots-caseii"), &["raw", "bottom-up", "truncated"]);
}

#[test]
fn repeated_runs_are_byte_identical() {
    let (a, b) = (tempfile::tempdir().unwrap(), tempfile::tempdir().unwrap());
    for name in [ScenarioName::Fig4Roots, ScenarioName::ResolventScan] {
        common::run_preset(name, "case-i-n48", a.path());
        common::run_preset(name, "case-i-n48", b.path());
        let sub = name.as_str();
        for entry in std::fs::read_dir(a.path().join(sub)).unwrap() {
            let file = entry.unwrap().file_name();
            if file == "timing.json" {
                continue;
            }
            let x = std::fs::read(a.path().join(sub).join(&file)).unwrap();
            let y = std::fs::read(b.path().join(sub).join(&file)).unwrap();
            assert!(x == y, "{sub}/{} differs between runs", file.to_string_lossy());
        }
    }
}
