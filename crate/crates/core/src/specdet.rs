//! Spectral determinants `P_N(z) = det(1 - z U_N)` built from traces.
//!
//! The coefficients follow from the power sums `Tr(U^l)` by Newton's
//! identities. A unitary `U_N` makes `P_N` self-inversive,
//! `c_k = (-1)^N det(U) conj(c_{N-k})`, so half of the coefficients determine
//! the rest; [`symmetrize_bottom_up`] keeps the short-orbit half and
//! [`symmetrize_top_down`] the long-orbit half.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use twofloat::TwoFloat;

use crate::dd::{self, Cdd};
use crate::exact::{TraceKind, TraceSeries};
use crate::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum PolyMode {
    Raw,
    BottomUp,
    TopDown,
    Exact,
    Truncated,
}

impl PolyMode {
    pub fn as_str(&self) -> &'static str {
        match self {
            PolyMode::Raw => "raw",
            PolyMode::BottomUp => "bottom-up",
            PolyMode::TopDown => "top-down",
            PolyMode::Exact => "exact",
            PolyMode::Truncated => "truncated",
        }
    }
}

impl std::str::FromStr for PolyMode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "raw" => Ok(PolyMode::Raw),
            "bottom-up" => Ok(PolyMode::BottomUp),
            "top-down" => Ok(PolyMode::TopDown),
            "exact" => Ok(PolyMode::Exact),
            "truncated" => Ok(PolyMode::Truncated),
            _ => Err(Error::Config(format!("unknown polynomial mode `{s}`"))),
        }
    }
}

/// `1 + c_1 z + ... + c_N z^N`, coefficients in increasing degree.
///
/// `tails` holds the low words of double-double coefficients when they were
/// computed in extended precision.
#[derive(Clone, Debug, PartialEq)]
pub struct CharPolynomial {
    pub coeffs: Vec<Complex64>,
    pub tails: Option<Vec<Complex64>>,
    pub det_used: Option<Complex64>,
    pub mode: PolyMode,
}

impl CharPolynomial {
    pub fn new(coeffs: Vec<Complex64>, mode: PolyMode) -> Self {
        CharPolynomial { coeffs, tails: None, det_used: None, mode }
    }

    pub(crate) fn from_precise(c: &[Cdd], det_used: Option<Complex64>, mode: PolyMode) -> Self {
        let (coeffs, tails) = c.iter().map(|&z| dd::split(z)).unzip();
        CharPolynomial { coeffs, tails: Some(tails), det_used, mode }
    }

    pub(crate) fn precise(&self) -> Vec<Cdd> {
        match &self.tails {
            Some(t) => self.coeffs.iter().zip(t).map(|(&h, &l)| dd::join(h, l)).collect(),
            None => self.coeffs.iter().map(|&h| dd::lift(h)).collect(),
        }
    }

    pub fn degree(&self) -> usize {
        self.coeffs.len().saturating_sub(1)
    }

    pub fn eval(&self, z: Complex64) -> Complex64 {
        self.coeffs.iter().rev().fold(Complex64::new(0.0, 0.0), |acc, c| acc * z + c)
    }

    pub fn max_abs_coeff(&self) -> f64 {
        self.coeffs.iter().map(|c| c.norm()).fold(0.0, f64::max)
    }
}

fn sign_n(n: usize) -> f64 {
    if n.is_multiple_of(2) {
        1.0
    } else {
        -1.0
    }
}

/// `(-1)^N det`, the factor in the self-inversive relation, unimodular to
/// full precision.
fn reflection_factor(n: usize, det: Complex64) -> Cdd {
    dd::scale(dd::normalize(dd::lift(det)), sign_n(n))
}

/// Newton's identities `c_k = -(1/k) sum_{l=1}^k c_{k-l} Tr(U^l)`.
pub fn newton_coeffs(traces: &TraceSeries, n: usize) -> Result<CharPolynomial> {
    if traces.values.len() <= n {
        return Err(Error::MissingTrace(traces.values.len()));
    }
    let t = traces.precise();
    let mut c: Vec<Cdd> = Vec::with_capacity(n + 1);
    c.push(dd::one());
    for k in 1..=n {
        let s = (1..=k).fold(dd::zero(), |acc, l| acc + c[k - l] * t[l]);
        c.push(-Cdd::new(s.re / k as f64, s.im / k as f64));
    }
    let mode = if traces.kind == TraceKind::Exact { PolyMode::Exact } else { PolyMode::Raw };
    Ok(CharPolynomial::from_precise(&c, None, mode))
}

fn unit_det(det: Complex64) -> Result<Complex64> {
    let r = det.norm();
    if !((r - 1.0).abs() <= 1e-6) {
        return Err(Error::NonUnimodular(r));
    }
    Ok(det / r)
}

/// Nearest value of the same modulus satisfying `c = s conj(c)`, i.e.
/// `+-|c| e^{i arg(s)/2}`.
fn project_midpoint(c: Cdd, s: Cdd) -> Cdd {
    let r = (c.re * c.re + c.im * c.im).sqrt();
    if r.hi() == 0.0 {
        return c;
    }
    // Half-angle direction; away from s = -1 use 1 + s, otherwise i (1 - s).
    let d = if (dd::one() + s).re.hi() > 0.0 {
        dd::normalize(dd::one() + s)
    } else {
        dd::normalize(Cdd::new(s.im, TwoFloat::from(1.0) - s.re))
    };
    let sign = if (c * dd::conj(d)).re.hi() >= 0.0 { 1.0 } else { -1.0 };
    Cdd::new(d.re * r * sign, d.im * r * sign)
}

/// Keeps `c_k` for `k <= floor(N/2)` and rebuilds the upper half from the
/// self-inversive relation. For even `N` the middle coefficient is rotated to
/// the nearest phase allowed by the relation.
pub fn symmetrize_bottom_up(poly: &CharPolynomial, det: Complex64) -> Result<CharPolynomial> {
    let det = unit_det(det)?;
    let n = poly.degree();
    let s = reflection_factor(n, det);
    let mut c = poly.precise();
    for k in 0..n.div_ceil(2) {
        c[n - k] = s * dd::conj(c[k]);
    }
    if n.is_multiple_of(2) && n > 0 {
        c[n / 2] = project_midpoint(c[n / 2], s);
    }
    Ok(CharPolynomial::from_precise(&c, Some(det), PolyMode::BottomUp))
}

/// Keeps `c_k` for `ceil(N/2) <= k < N` and rebuilds `c_1 .. c_{ceil(N/2)-1}`.
/// `c_0 = 1` is kept, so `c_N` becomes `(-1)^N det`.
pub fn symmetrize_top_down(poly: &CharPolynomial, det: Complex64) -> Result<CharPolynomial> {
    let det = unit_det(det)?;
    let n = poly.degree();
    let s = reflection_factor(n, det);
    let mut c = poly.precise();
    if n > 0 {
        c[n] = s * dd::conj(c[0]);
    }
    for k in 1..n.div_ceil(2) {
        c[k] = s * dd::conj(c[n - k]);
    }
    if n.is_multiple_of(2) && n > 0 {
        c[n / 2] = project_midpoint(c[n / 2], s);
    }
    Ok(CharPolynomial::from_precise(&c, Some(det), PolyMode::TopDown))
}

/// `1 + (-1)^N det z^N`: what bottom-up symmetrization leaves when every
/// trace up to `N/2` vanishes.
pub fn truncated_specdet(det: Complex64, n: usize) -> Result<CharPolynomial> {
    let det = unit_det(det)?;
    let mut c = vec![dd::zero(); n + 1];
    c[0] = dd::one();
    if n > 0 {
        c[n] += reflection_factor(n, det);
    }
    Ok(CharPolynomial::from_precise(&c, Some(det), PolyMode::Truncated))
}

/// `max_k |c_k - (-1)^N det conj(c_{N-k})| / max_k |c_k|`.
pub fn self_inversive_residual(poly: &CharPolynomial, det: Complex64) -> f64 {
    let n = poly.degree();
    let s = reflection_factor(n, det);
    let c = poly.precise();
    let worst = (0..=n).map(|k| dd::abs(c[k] - s * dd::conj(c[n - k]))).fold(0.0, f64::max);
    let scale = poly.max_abs_coeff();
    if scale == 0.0 {
        0.0
    } else {
        worst / scale
    }
}

/// Largest coefficient difference relative to the largest coefficient of `reference`.
pub fn relative_coeff_error(poly: &CharPolynomial, reference: &CharPolynomial) -> f64 {
    let worst = poly
        .precise()
        .iter()
        .zip(reference.precise())
        .map(|(&a, b)| dd::abs(a - b))
        .fold(0.0, f64::max);
    worst / reference.max_abs_coeff()
}
