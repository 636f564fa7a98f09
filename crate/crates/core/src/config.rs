//! Flat `key = value` configuration files for [`RingConfig`].
//!
//! ```text
//! # case (i), N = 48
//! hbar = 0.35
//! script_i = 20.3489573
//! e_minus = 0
//! e_plus = 30.4571694
//! n_override = 48
//! ```
//!
//! The ring is given either by `i_minus`/`i_plus` or by `e_plus` (and
//! optionally `e_minus`), see [`RingConfig::from_energies`]. A missing `tau`
//! saturates the uniqueness constraint on the ring's energy span.

use std::collections::BTreeMap;
use std::path::Path;

use crate::{Error, RingConfig, Result};

const KEYS: [&str; 8] = ["hbar", "tau", "script_i", "i_minus", "i_plus", "e_minus", "e_plus", "n_override"];

pub fn parse_pairs(text: &str) -> Result<BTreeMap<String, String>> {
    let mut out = BTreeMap::new();
    for (lineno, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let (key, value) = line
            .split_once('=')
            .ok_or_else(|| Error::Config(format!("line {}: expected `key = value`", lineno + 1)))?;
        let key = key.trim().to_ascii_lowercase();
        if out.insert(key.clone(), value.trim().to_string()).is_some() {
            return Err(Error::Config(format!("line {}: duplicate key `{key}`", lineno + 1)));
        }
    }
    Ok(out)
}

fn number(pairs: &BTreeMap<String, String>, key: &str) -> Result<Option<f64>> {
    pairs
        .get(key)
        .map(|v| {
            v.parse::<f64>()
                .ok()
                .filter(|x| x.is_finite())
                .ok_or_else(|| Error::Config(format!("`{key}`: not a decimal number: `{v}`")))
        })
        .transpose()
}

pub fn parse_config(text: &str) -> Result<RingConfig> {
    let pairs = parse_pairs(text)?;
    if let Some(bad) = pairs.keys().find(|k| !KEYS.contains(&k.as_str())) {
        return Err(Error::Config(format!("unknown key `{bad}`")));
    }
    let require = |key: &str| -> Result<f64> {
        number(&pairs, key)?.ok_or_else(|| Error::Config(format!("missing key `{key}`")))
    };
    let hbar = require("hbar")?;
    let script_i = require("script_i")?;
    let tau = number(&pairs, "tau")?;
    let n_override = pairs
        .get("n_override")
        .map(|v| {
            v.parse::<usize>()
                .map_err(|_| Error::Config(format!("`n_override`: not a non-negative integer: `{v}`")))
        })
        .transpose()?;
    let edges = (number(&pairs, "i_minus")?, number(&pairs, "i_plus")?);
    let energies = (number(&pairs, "e_minus")?, number(&pairs, "e_plus")?);
    match (edges, energies) {
        ((Some(lo), Some(hi)), (None, None)) => {
            let mut cfg = RingConfig::new(hbar, tau.unwrap_or(1.0), script_i, lo, hi, n_override)?;
            if tau.is_none() {
                let (emin, emax) = cfg.energy_window();
                cfg = cfg.with_tau(crate::model::tau_from_constraint(&cfg, emin, emax)?)?;
            }
            Ok(cfg)
        }
        ((None, None), (e_minus, Some(e_plus))) => {
            RingConfig::from_energies(hbar, script_i, e_minus.unwrap_or(0.0), e_plus, n_override, tau)
        }
        _ => Err(Error::Config(
            "give the ring either as `i_minus` and `i_plus` or as `e_plus` with optional `e_minus`".into(),
        )),
    }
}

pub fn load_config(path: &Path) -> Result<RingConfig> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| Error::Config(format!("cannot read {}: {e}", path.display())))?;
    parse_config(&text).map_err(|e| e.context(format!("config {}", path.display())))
}

/// Serializes with explicit edges and period, round-tripping through [`parse_config`].
pub fn to_config_string(cfg: &RingConfig) -> String {
    let (lo, hi) = cfg.nominal_window();
    let mut s = format!(
        "hbar = {}\ntau = {}\nscript_i = {}\ni_minus = {}\ni_plus = {}\n",
        cfg.hbar(),
        cfg.tau(),
        cfg.script_i(),
        lo,
        hi
    );
    if let Some(n) = cfg.n_override() {
        s.push_str(&format!("n_override = {n}\n"));
    }
    s
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_energy_form_with_comments() {
        let text = "# case (ii)\nhbar = 1.0\nscript_i = -1.03489573  # shift\ne_minus = 0.265678\ne_plus = 1250.0\nn_override = 48\n";
        let cfg = parse_config(text).unwrap();
        assert_eq!(cfg.dimension(), 48);
        let (emin, emax) = cfg.energy_window();
        assert!((cfg.tau() - std::f64::consts::TAU / (emax - emin)).abs() < 1e-15);
    }

    #[test]
    fn parses_edge_form() {
        let cfg = parse_config("hbar=1\ntau=0.5\nscript_i=0\ni_minus=0.4\ni_plus=2.6").unwrap();
        assert_eq!(cfg.dimension(), 3);
        assert_eq!(cfg.tau(), 0.5);
    }

    #[test]
    fn rejects_malformed_files() {
        assert!(parse_config("hbar = 1\nscript_i = 0\n").is_err());
        assert!(parse_config("hbar = 1\nhbar = 2\nscript_i = 0\ne_plus = 3").is_err());
        assert!(parse_config("hbar = x\nscript_i = 0\ne_plus = 3").is_err());
        assert!(parse_config("hbar = 1\nscript_i = 0\ne_plus = 3\ncolour = red").is_err());
        assert!(parse_config("hbar = 1\nscript_i = 0\ni_minus = 1\ne_plus = 3").is_err());
        assert!(parse_config("just words").is_err());
    }

    #[test]
    fn round_trips() {
        let cfg = parse_config("hbar=0.35\nscript_i=20.3489573\ne_plus=30.4571694\nn_override=48").unwrap();
        let again = parse_config(&to_config_string(&cfg)).unwrap();
        assert_eq!(cfg, again);
    }
}
