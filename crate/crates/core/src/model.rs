//! The action ring, its Hamiltonian and the Bohr-Sommerfeld spectrum.

use std::f64::consts::TAU;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::{Error, Result};

/// Parameters of one experiment: `H(I) = (I - script_i)^2 / 2` on the ring
/// `i_minus < I < i_plus`, sampled stroboscopically every `tau`.
///
/// With `n_override` set, the ring is re-centred on the midpoint of
/// `(i_minus, i_plus)` with width `n_override * hbar`, so that it holds exactly
/// that many quantized actions. [`RingConfig::window`] always returns the ring
/// actually used.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RingConfig {
    hbar: f64,
    tau: f64,
    script_i: f64,
    i_minus: f64,
    i_plus: f64,
    n_override: Option<usize>,
}

impl RingConfig {
    pub fn new(
        hbar: f64,
        tau: f64,
        script_i: f64,
        i_minus: f64,
        i_plus: f64,
        n_override: Option<usize>,
    ) -> Result<Self> {
        let cfg = RingConfig { hbar, tau, script_i, i_minus, i_plus, n_override };
        cfg.validate()?;
        Ok(cfg)
    }

    /// Builds the ring from energies on the quadratic.
    ///
    /// `e_minus <= 0` selects case (i): a ring `script_i +- sqrt(2 e_plus)`
    /// straddling the minimum. Otherwise both edges sit on the right branch,
    /// `script_i + sqrt(2 e_minus)` and `script_i + sqrt(2 e_plus)` (case (ii)).
    /// Without an explicit `tau` the uniqueness constraint is saturated on the
    /// energy span of the resulting ring.
    pub fn from_energies(
        hbar: f64,
        script_i: f64,
        e_minus: f64,
        e_plus: f64,
        n_override: Option<usize>,
        tau: Option<f64>,
    ) -> Result<Self> {
        if !(e_plus > e_minus) || e_plus <= 0.0 {
            return Err(Error::Config(format!("need e_plus > max(e_minus, 0), got ({e_minus}, {e_plus})")));
        }
        let (lo, hi) = if e_minus <= 0.0 {
            let w = (2.0 * e_plus).sqrt();
            (script_i - w, script_i + w)
        } else {
            (script_i + (2.0 * e_minus).sqrt(), script_i + (2.0 * e_plus).sqrt())
        };
        let mut cfg = RingConfig { hbar, tau: tau.unwrap_or(1.0), script_i, i_minus: lo, i_plus: hi, n_override };
        if tau.is_none() {
            let (emin, emax) = cfg.energy_window();
            cfg.tau = tau_from_energies(hbar, emin, emax)?;
        }
        cfg.validate()?;
        Ok(cfg)
    }

    fn validate(&self) -> Result<()> {
        let finite = [self.hbar, self.tau, self.script_i, self.i_minus, self.i_plus]
            .iter()
            .all(|x| x.is_finite());
        if !finite {
            return Err(Error::Config("non-finite parameter".into()));
        }
        if self.hbar <= 0.0 {
            return Err(Error::Config(format!("hbar must be positive, got {}", self.hbar)));
        }
        if self.tau <= 0.0 {
            return Err(Error::Config(format!("tau must be positive, got {}", self.tau)));
        }
        if !(self.i_minus < self.i_plus) {
            return Err(Error::Config(format!(
                "ring edges must satisfy i_minus < i_plus, got ({}, {})",
                self.i_minus, self.i_plus
            )));
        }
        if self.n_override == Some(0) {
            return Err(Error::Config("n_override must be at least 1".into()));
        }
        let (lo, hi) = self.window();
        // Below -hbar/2 the ring would contain lattice points with n < 0.
        if lo <= -0.5 * self.hbar {
            return Err(Error::Config(format!("ring lower edge {lo} reaches negative quantum numbers")));
        }
        if self.is_case_i() && lo <= 0.0 {
            return Err(Error::Config(format!("a ring around the minimum needs i_minus > 0, got {lo}")));
        }
        for edge in [lo, hi] {
            let x = edge / self.hbar - 0.5;
            if (x - x.round()).abs() < 1e-9 {
                return Err(Error::Config(format!("ring edge {edge} coincides with a quantized action")));
            }
        }
        Ok(())
    }

    pub fn hbar(&self) -> f64 {
        self.hbar
    }

    pub fn tau(&self) -> f64 {
        self.tau
    }

    pub fn script_i(&self) -> f64 {
        self.script_i
    }

    pub fn n_override(&self) -> Option<usize> {
        self.n_override
    }

    /// The configured edges, before any re-centring.
    pub fn nominal_window(&self) -> (f64, f64) {
        (self.i_minus, self.i_plus)
    }

    /// Edges of the ring in use.
    pub fn window(&self) -> (f64, f64) {
        match self.n_override {
            None => (self.i_minus, self.i_plus),
            Some(n) => {
                let c = 0.5 * (self.i_minus + self.i_plus);
                let half = 0.5 * n as f64 * self.hbar;
                (c - half, c + half)
            }
        }
    }

    pub fn with_tau(&self, tau: f64) -> Result<Self> {
        RingConfig::new(self.hbar, tau, self.script_i, self.i_minus, self.i_plus, self.n_override)
    }

    pub fn with_hbar(&self, hbar: f64) -> Result<Self> {
        RingConfig::new(hbar, self.tau, self.script_i, self.i_minus, self.i_plus, self.n_override)
    }

    /// `floor((i_plus - i_minus) / hbar)` of the configured edges.
    pub fn nominal_dimension(&self) -> usize {
        ((self.i_plus - self.i_minus) / self.hbar).floor() as usize
    }

    /// Number of quantized actions inside the ring.
    pub fn dimension(&self) -> usize {
        let (nm, np) = self.level_range();
        (np - nm + 1).max(0) as usize
    }

    /// The quadratic Hamiltonian, without the domain check.
    pub fn energy(&self, action: f64) -> f64 {
        let d = action - self.script_i;
        0.5 * d * d
    }

    /// `dH/dI`.
    pub fn frequency(&self, action: f64) -> f64 {
        action - self.script_i
    }

    /// `d2H/dI2`, identically one for the quadratic.
    pub fn curvature(&self) -> f64 {
        1.0
    }

    /// Whether the ring contains the minimum of `H` (both branches sampled).
    pub fn is_case_i(&self) -> bool {
        let (lo, hi) = self.window();
        lo < self.script_i && self.script_i < hi
    }

    /// Minimum and maximum of `H` over the ring.
    pub fn energy_window(&self) -> (f64, f64) {
        let (lo, hi) = self.window();
        let (a, b) = (self.energy(lo), self.energy(hi));
        let emin = if self.is_case_i() { 0.0 } else { a.min(b) };
        (emin, a.max(b))
    }

    /// `tau (E+ - E-) / hbar` for the ring's energy span; unique energy
    /// inference needs this at most `2 pi`.
    pub fn phase_span(&self) -> f64 {
        let (emin, emax) = self.energy_window();
        self.tau * (emax - emin) / self.hbar
    }

    /// Branch inverses of `H`: actions with energy `e` inside the ring,
    /// right branch first.
    pub fn actions_at_energy(&self, e: f64) -> Vec<f64> {
        if e < 0.0 {
            return Vec::new();
        }
        let (lo, hi) = self.window();
        let w = (2.0 * e).sqrt();
        let mut out = Vec::with_capacity(2);
        for a in [self.script_i + w, self.script_i - w] {
            if lo < a && a < hi && !out.contains(&a) {
                out.push(a);
            }
        }
        out
    }

    fn level_range(&self) -> (i64, i64) {
        let (lo, hi) = self.window();
        let h = self.hbar;
        let mut nm = ((lo / h - 0.5).floor() as i64 + 1).max(0);
        while h * (nm as f64 + 0.5) <= lo {
            nm += 1;
        }
        let mut np = (hi / h - 0.5).ceil() as i64 - 1;
        while h * (np as f64 + 0.5) >= hi {
            np -= 1;
        }
        (nm, np)
    }

    /// Short stable identifier of the parameter set.
    pub fn id(&self) -> String {
        let text = format!(
            "hbar={:?};tau={:?};script_i={:?};i_minus={:?};i_plus={:?};n={:?}",
            self.hbar, self.tau, self.script_i, self.i_minus, self.i_plus, self.n_override
        );
        let digest = Sha256::digest(text.as_bytes());
        digest[..8].iter().map(|b| format!("{b:02x}")).collect()
    }
}

/// One Bohr-Sommerfeld level of the ring.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Level {
    pub n: i64,
    pub action: f64,
    pub energy: f64,
    /// `tau E_n / hbar` reduced to `[0, 2 pi)`.
    pub phase: f64,
}

impl Level {
    /// Eigenvalue `exp(-i phase)` of the evolution operator.
    pub fn eigenvalue(&self) -> Complex64 {
        Complex64::from_polar(1.0, -self.phase)
    }

    /// Root `exp(+i phase)` of `det(1 - z U)`, the reciprocal eigenvalue.
    pub fn char_root(&self) -> Complex64 {
        Complex64::from_polar(1.0, self.phase)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct QuantizedSpectrum {
    pub levels: Vec<Level>,
    pub n_minus: i64,
    pub n_plus: i64,
}

impl QuantizedSpectrum {
    pub fn len(&self) -> usize {
        self.levels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.levels.is_empty()
    }

    pub fn energies(&self) -> Vec<f64> {
        self.levels.iter().map(|l| l.energy).collect()
    }

    pub fn phases(&self) -> Vec<f64> {
        self.levels.iter().map(|l| l.phase).collect()
    }

    pub fn eigenvalues(&self) -> Vec<Complex64> {
        self.levels.iter().map(Level::eigenvalue).collect()
    }

    pub fn char_roots(&self) -> Vec<Complex64> {
        self.levels.iter().map(Level::char_root).collect()
    }
}

/// `H(I)`, rejecting negative actions.
pub fn hamiltonian_eval(action: f64, cfg: &RingConfig) -> Result<f64> {
    if !(action >= 0.0) {
        return Err(Error::Domain(format!("action must be non-negative, got {action}")));
    }
    Ok(cfg.energy(action))
}

/// All levels `hbar (n + 1/2)` strictly inside the ring.
pub fn quantize_window(cfg: &RingConfig) -> Result<QuantizedSpectrum> {
    let (nm, np) = cfg.level_range();
    if np < nm {
        let (lo, hi) = cfg.window();
        return Err(Error::EmptyWindow { lo, hi, hbar: cfg.hbar });
    }
    let levels = (nm..=np)
        .map(|n| {
            let action = cfg.hbar * (n as f64 + 0.5);
            let energy = cfg.energy(action);
            let phase = (cfg.tau * energy / cfg.hbar).rem_euclid(TAU);
            Level { n, action, energy, phase }
        })
        .collect();
    Ok(QuantizedSpectrum { levels, n_minus: nm, n_plus: np })
}

fn tau_from_energies(hbar: f64, e_minus: f64, e_plus: f64) -> Result<f64> {
    if !(e_plus > e_minus) {
        return Err(Error::Domain(format!("need E+ > E-, got ({e_minus}, {e_plus})")));
    }
    Ok(TAU * hbar / (e_plus - e_minus))
}

/// Period saturating `(E+ - E-) tau / hbar <= 2 pi`.
pub fn tau_from_constraint(cfg: &RingConfig, e_minus: f64, e_plus: f64) -> Result<f64> {
    tau_from_energies(cfg.hbar, e_minus, e_plus)
}

/// `t_H = 2 pi hbar N / (E+ - E-)`, which equals `N tau` at constraint equality.
pub fn heisenberg_time(cfg: &RingConfig, e_minus: f64, e_plus: f64) -> Result<f64> {
    Ok(cfg.dimension() as f64 * tau_from_energies(cfg.hbar, e_minus, e_plus)?)
}
