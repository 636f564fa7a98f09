#![allow(dead_code)]

use std::path::{Path, PathBuf};

use orbitsum::scenario::{preset, run_scenario, Scenario, ScenarioName, ScenarioOptions, SummaryReport};

/// Scenario, preset and the CSV files frozen under `tests/golden/<scenario>/`.
pub const GOLDEN: [(ScenarioName, &str, &[&str]); 5] = [
    (ScenarioName::Fig1TraceVsTime, "fig1", &["fig1.csv"]),
    (ScenarioName::Fig2Traces, "case-i-n48", &["traces.csv", "complex_time.csv"]),
    (ScenarioName::Fig3Coefficients, "fig3-n28", &["coefficients.csv"]),
    (
        ScenarioName::Fig4Roots,
        "case-i-n48",
        &[
            "roots_exact.csv",
            "roots_raw.csv",
            "roots_bottom-up.csv",
            "roots_top-down.csv",
            "pairing_raw.csv",
            "pairing_bottom-up.csv",
            "pairing_top-down.csv",
        ],
    ),
    (
        ScenarioName::Fig5RootsCaseii,
        "case-ii-n48",
        &[
            "roots_exact.csv",
            "roots_raw.csv",
            "roots_bottom-up.csv",
            "roots_top-down.csv",
            "roots_truncated.csv",
            "pairing_raw.csv",
            "pairing_bottom-up.csv",
        ],
    ),
];

pub fn golden_dir() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/golden")
}

/// Set `ORBITSUM_BLESS=1` to rewrite the golden files from the current build.
pub fn blessing() -> bool {
    std::env::var_os("ORBITSUM_BLESS").is_some_and(|v| v == "1")
}

pub fn run_preset(name: ScenarioName, preset_name: &str, out: &Path) -> SummaryReport {
    let sc = Scenario::new(name, preset(preset_name), ScenarioOptions::default()).expect("valid scenario");
    run_scenario(&sc, out).expect("scenario runs")
}

/// Compares (or with blessing, overwrites) the golden files of one scenario.
/// Returns the names of files that differ.
pub fn compare_golden(name: ScenarioName, files: &[&str], out: &Path) -> Vec<String> {
    let got_dir = out.join(name.as_str());
    let want_dir = golden_dir().join(name.as_str());
    let mut bad = Vec::new();
    for f in files {
        let got = std::fs::read(got_dir.join(f)).unwrap_or_else(|e| panic!("{f}: {e}"));
        if blessing() {
            std::fs::create_dir_all(&want_dir).unwrap();
            std::fs::write(want_dir.join(f), &got).unwrap();
            continue;
        }
        match std::fs::read(want_dir.join(f)) {
            Ok(want) if want == got => {}
            _ => bad.push(format!("{}/{f}", name.as_str())),
        }
    }
    bad
}

pub fn read_csv<T: for<'de> serde::Deserialize<'de>>(path: &Path) -> Vec<T> {
    csv::Reader::from_path(path)
        .unwrap_or_else(|e| panic!("{}: {e}", path.display()))
        .deserialize()
        .map(|r| r.unwrap())
        .collect()
}
