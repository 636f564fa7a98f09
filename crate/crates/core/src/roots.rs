//! Polynomial roots, unit-circle diagnostics, pairing against exact roots,
//! energies from root phases, and random self-inversive polynomials.

use std::f64::consts::TAU;

use nalgebra::DMatrix;
use num_complex::Complex64;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::assignment;
use crate::dd::{self, Cdd};
use crate::specdet::{symmetrize_bottom_up, CharPolynomial, PolyMode};
use crate::{Error, Result, RingConfig};

/// Default backward-error target of [`find_roots`].
pub const TARGET_RESIDUAL: f64 = 1e-12;
/// Circle tolerance for exact and ensemble polynomials.
pub const TOL_CIRCLE: f64 = 1e-6;
/// Circle tolerance for classifying semiclassical roots.
pub const TOL_CIRCLE_COARSE: f64 = 1e-3;

const MAX_SWEEPS: usize = 400;

#[derive(Clone, Debug, PartialEq)]
pub struct RootSet {
    pub roots: Vec<Complex64>,
    /// `|P(z)| / sum_k |c_k| |z|^k`
    pub residuals: Vec<f64>,
    pub on_circle: Vec<bool>,
    pub tol_circle: f64,
    pub source_mode: PolyMode,
}

impl RootSet {
    pub fn new(roots: Vec<Complex64>, residuals: Vec<f64>, source_mode: PolyMode, tol_circle: f64) -> Self {
        let on_circle = roots.iter().map(|z| (z.norm() - 1.0).abs() <= tol_circle).collect();
        RootSet { roots, residuals, on_circle, tol_circle, source_mode }
    }

    /// Roots with known positions and zero residual, e.g. exact `e^{i phi_n}`.
    pub fn from_exact(roots: Vec<Complex64>) -> Self {
        let n = roots.len();
        RootSet::new(roots, vec![0.0; n], PolyMode::Exact, TOL_CIRCLE)
    }

    pub fn with_tolerance(&self, tol_circle: f64) -> Self {
        RootSet::new(self.roots.clone(), self.residuals.clone(), self.source_mode, tol_circle)
    }

    pub fn len(&self) -> usize {
        self.roots.len()
    }

    pub fn is_empty(&self) -> bool {
        self.roots.is_empty()
    }

    /// Phases `arg z` in `[0, 2 pi)`.
    pub fn phases(&self) -> Vec<f64> {
        self.roots.iter().map(|z| z.arg().rem_euclid(TAU)).collect()
    }
}

/// `(P(z), P'(z) / P(z))` with the reversed polynomial outside the unit disk.
fn eval_ratio(c: &[Complex64], z: Complex64) -> (Complex64, Complex64) {
    let n = c.len() - 1;
    if z.norm() <= 1.0 {
        let (mut p, mut dp) = (c[n], Complex64::new(0.0, 0.0));
        for k in (0..n).rev() {
            dp = dp * z + p;
            p = p * z + c[k];
        }
        (p, dp / p)
    } else {
        let w = 1.0 / z;
        let (mut q, mut dq) = (c[0], Complex64::new(0.0, 0.0));
        for &ck in &c[1..=n] {
            dq = dq * w + q;
            q = q * w + ck;
        }
        // P(z) = z^n Q(1/z)
        let p = q * z.powu(n as u32);
        (p, w * (n as f64 - w * dq / q))
    }
}

/// `|P(z)| / sum_k |c_k| |z|^k`, computed on the reversed polynomial for
/// `|z| > 1` so that it stays finite.
pub fn backward_error(c: &[Complex64], z: Complex64) -> f64 {
    let (x, coeffs): (Complex64, Box<dyn Iterator<Item = &Complex64>>) =
        if z.norm() <= 1.0 { (z, Box::new(c.iter().rev())) } else { (1.0 / z, Box::new(c.iter())) };
    let r = x.norm();
    let (mut p, mut s) = (Complex64::new(0.0, 0.0), 0.0);
    for ck in coeffs {
        p = p * x + ck;
        s = s * r + ck.norm();
    }
    if s == 0.0 { 0.0 } else { p.norm() / s }
}

fn initial_guesses(c: &[Complex64]) -> Vec<Complex64> {
    let n = c.len() - 1;
    let ratio = -c[0] / c[n];
    let r = ratio.norm().powf(1.0 / n as f64);
    let base = ratio.arg() / n as f64;
    (0..n)
        .map(|j| {
            // Deterministic jitter breaks the exact symmetry of the guesses.
            let jitter = ((j as f64 * 0.618_033_988_75).fract() - 0.5) * 1e-2;
            Complex64::from_polar(r * (1.0 + jitter), base + TAU * j as f64 / n as f64 + 0.1 / n as f64)
        })
        .collect()
}

/// Gauss-Seidel Aberth sweeps until no root moves by more than a few ulps,
/// then reports whether all backward errors meet `target`.
fn aberth(c: &[Complex64], target: f64) -> (Vec<Complex64>, bool) {
    let n = c.len() - 1;
    let mut z = initial_guesses(c);
    let mut settled = 0;
    for _ in 0..MAX_SWEEPS {
        let mut moved = 0.0f64;
        for j in 0..n {
            let (p, ratio) = eval_ratio(c, z[j]);
            if p == Complex64::new(0.0, 0.0) {
                continue;
            }
            let newton = 1.0 / ratio;
            let repulsion: Complex64 = (0..n).filter(|&k| k != j).map(|k| 1.0 / (z[j] - z[k])).sum();
            let step = newton / (1.0 - newton * repulsion);
            if step.is_finite() {
                z[j] -= step;
                moved = moved.max(step.norm() / z[j].norm().max(1e-300));
            }
        }
        settled = if moved < 1e-15 { settled + 1 } else { 0 };
        if settled >= 2 {
            break;
        }
    }
    let ok = z.iter().all(|&x| backward_error(c, x) <= target);
    (z, ok)
}

fn companion_roots(c: &[Complex64]) -> Vec<Complex64> {
    let n = c.len() - 1;
    let lead = c[n];
    let m = DMatrix::from_fn(n, n, |i, j| {
        if i == 0 {
            -c[n - 1 - j] / lead
        } else if i == j + 1 {
            Complex64::new(1.0, 0.0)
        } else {
            Complex64::new(0.0, 0.0)
        }
    });
    // Complex Schur form is upper triangular.
    let (_, t) = m.schur().unpack();
    t.diagonal().iter().copied().collect()
}

fn polish(c: &[Complex64], z: &mut [Complex64]) {
    for zj in z.iter_mut() {
        for _ in 0..5 {
            let (p, ratio) = eval_ratio(c, *zj);
            if p == Complex64::new(0.0, 0.0) {
                break;
            }
            let step = 1.0 / ratio;
            if !step.is_finite() {
                break;
            }
            let trial = *zj - step;
            if backward_error(c, trial) > backward_error(c, *zj) {
                break;
            }
            *zj = trial;
        }
    }
}

/// `(P(z), P(z) / P'(z))` in double-double, reversed outside the unit disk.
fn eval_newton_dd(c: &[Cdd], z: Cdd) -> (Cdd, Cdd) {
    let n = c.len() - 1;
    if dd::abs(z) <= 1.0 {
        let (mut p, mut dp) = (c[n], dd::zero());
        for k in (0..n).rev() {
            dp = dp * z + p;
            p = p * z + c[k];
        }
        (p, dd::div(p, dp))
    } else {
        let w = dd::recip(z);
        let (mut q, mut dq) = (c[0], dd::zero());
        for ck in &c[1..] {
            dq = dq * w + q;
            q = q * w + ck;
        }
        // P / P' = z Q / (n Q - w Q')
        (q, dd::div(z * q, dd::scale(q, n as f64) - w * dq))
    }
}

fn backward_error_dd(c: &[Cdd], z: Complex64) -> f64 {
    let zd = dd::lift(z);
    let inside = z.norm() <= 1.0;
    let x = if inside { zd } else { dd::recip(zd) };
    let r = dd::abs(x);
    let (mut p, mut s) = (dd::zero(), 0.0);
    let iter: Box<dyn Iterator<Item = &Cdd>> = if inside { Box::new(c.iter().rev()) } else { Box::new(c.iter()) };
    for ck in iter {
        p = p * x + ck;
        s = s * r + dd::abs(*ck);
    }
    if s == 0.0 { 0.0 } else { dd::abs(p) / s }
}

fn finite(z: Cdd) -> bool {
    z.re.hi().is_finite() && z.im.hi().is_finite()
}

/// Aberth sweeps in double-double from `f64` approximations.
fn refine_dd(c: &[Cdd], z: &mut [Complex64]) {
    let n = z.len();
    let mut w: Vec<Cdd> = z.iter().map(|&x| dd::lift(x)).collect();
    for _ in 0..100 {
        let mut moved = 0.0f64;
        for j in 0..n {
            let (p, newton) = eval_newton_dd(c, w[j]);
            if dd::abs(p) == 0.0 || !finite(newton) {
                continue;
            }
            let rep = (0..n).filter(|&k| k != j).fold(dd::zero(), |acc, k| acc + dd::recip(w[j] - w[k]));
            let step = dd::div(newton, dd::one() - newton * rep);
            if finite(step) {
                w[j] -= step;
                moved = moved.max(dd::abs(step) / dd::abs(w[j]).max(1e-300));
            }
        }
        if moved < 1e-30 {
            break;
        }
    }
    for (zj, wj) in z.iter_mut().zip(w) {
        *zj = dd::round(wj);
    }
}

/// All roots of `poly`, each with backward error at most `target`.
///
/// Roots are found in `f64` and refined in double-double against the full
/// precision coefficients. Zero leading coefficients lower the degree; zero
/// constant terms give roots at the origin.
pub fn find_roots(poly: &CharPolynomial, target: f64) -> Result<RootSet> {
    let precise = poly.precise();
    let is_zero = |x: &Cdd| dd::abs(*x) == 0.0;
    let mut hi = precise.len();
    while hi > 1 && is_zero(&precise[hi - 1]) {
        hi -= 1;
    }
    let zeros = precise[..hi].iter().take_while(|x| is_zero(x)).count();
    if zeros == hi {
        return Err(Error::Domain("zero polynomial has no well-defined roots".into()));
    }
    let cd = &precise[zeros..hi];
    let c: Vec<Complex64> = cd.iter().map(|&x| dd::round(x)).collect();
    let n = c.len() - 1;
    let mut roots = vec![Complex64::new(0.0, 0.0); zeros];
    let mut residuals = vec![0.0; zeros];
    if n == 0 {
        return Ok(RootSet::new(roots, residuals, poly.mode, TOL_CIRCLE));
    }

    let (mut z, converged) = aberth(&c, target);
    if !converged {
        log::debug!("simultaneous iteration stagnated at degree {n}; using companion eigenvalues");
        let mut alt = companion_roots(&c);
        polish(&c, &mut alt);
        let worst = |v: &[Complex64]| v.iter().map(|&x| backward_error(&c, x)).fold(0.0, f64::max);
        if worst(&alt) < worst(&z) {
            z = alt;
        }
    }
    refine_dd(cd, &mut z);
    let res: Vec<f64> = z.iter().map(|&x| backward_error_dd(cd, x)).collect();
    let worst = res.iter().copied().fold(0.0, f64::max);
    if !(worst <= target) {
        return Err(Error::RootsStagnated { worst, target, roots: z });
    }
    roots.extend(z);
    residuals.extend(res);
    Ok(RootSet::new(roots, residuals, poly.mode, TOL_CIRCLE))
}

/// Fraction of roots with `||z| - 1| <= tol_circle`, and the largest `||z| - 1|`.
pub fn unit_circle_stats(rs: &RootSet, tol_circle: f64) -> (f64, f64) {
    if rs.is_empty() {
        return (0.0, 0.0);
    }
    let devs: Vec<f64> = rs.roots.iter().map(|z| (z.norm() - 1.0).abs()).collect();
    let on = devs.iter().filter(|&&d| d <= tol_circle).count();
    (on as f64 / devs.len() as f64, devs.iter().copied().fold(0.0, f64::max))
}

/// Worst distance from a mirrored root `1 / conj(z)` to the nearest root,
/// relative to `max(1, |1 / conj(z)|)`. Zero for a self-inversive root set.
pub fn reciprocal_closure(rs: &RootSet) -> f64 {
    rs.roots
        .iter()
        .map(|z| {
            let m = 1.0 / z.conj();
            let d = rs.roots.iter().map(|w| (w - m).norm()).fold(f64::INFINITY, f64::min);
            d / m.norm().max(1.0)
        })
        .fold(0.0, f64::max)
}

/// `prod_j (1 - z / r_j)`, expanded in double-double. Roots must be nonzero.
pub fn poly_from_roots(roots: &[Complex64]) -> CharPolynomial {
    let mut c: Vec<Cdd> = vec![dd::one()];
    for &r in roots {
        let f = dd::recip(dd::lift(r));
        c.push(dd::zero());
        for k in (1..c.len()).rev() {
            c[k] = c[k] - c[k - 1] * f;
        }
    }
    CharPolynomial::from_precise(&c, None, PolyMode::Raw)
}

/// Self-inversive polynomial with `det U = 1`: standard complex Gaussian
/// `c_k` for `k <= N/2`, upper half from the self-inversive relation.
pub fn random_self_inversive(n: usize, seed: u64) -> Result<CharPolynomial> {
    if n < 2 {
        return Err(Error::Domain(format!("degree must be >= 2, got {n}")));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let s = std::f64::consts::FRAC_1_SQRT_2;
    let mut coeffs = vec![Complex64::new(0.0, 0.0); n + 1];
    for c in coeffs.iter_mut().take(n / 2 + 1) {
        let re: f64 = StandardNormal.sample(&mut rng);
        let im: f64 = StandardNormal.sample(&mut rng);
        *c = Complex64::new(s * re, s * im);
    }
    let raw = CharPolynomial::new(coeffs, PolyMode::Raw);
    symmetrize_bottom_up(&raw, Complex64::new(1.0, 0.0))
}

/// Mean unit-circle fraction over `samples` random self-inversive polynomials
/// with seeds `seed, seed + 1, ...`.
pub fn ensemble_circle_fraction(n: usize, samples: usize, seed: u64, tol_circle: f64) -> Result<f64> {
    let fractions = (0..samples as u64)
        .into_par_iter()
        .map(|i| {
            let poly = random_self_inversive(n, seed.wrapping_add(i))?;
            Ok(unit_circle_stats(&find_roots(&poly, TARGET_RESIDUAL)?, tol_circle).0)
        })
        .collect::<Result<Vec<f64>>>()?;
    Ok(fractions.iter().sum::<f64>() / samples.max(1) as f64)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RootPairing {
    /// `(computed index, exact index, distance)`
    pub pairs: Vec<(usize, usize, f64)>,
    /// Computed indices left without a partner.
    pub unmatched: Vec<usize>,
    /// Greedy total minus a lower bound on the optimum; `None` when optimal.
    pub optimality_gap: Option<f64>,
}

impl RootPairing {
    pub fn total_distance(&self) -> f64 {
        self.pairs.iter().map(|p| p.2).sum()
    }

    pub fn mean_distance(&self) -> f64 {
        if self.pairs.is_empty() { 0.0 } else { self.total_distance() / self.pairs.len() as f64 }
    }

    pub fn max_distance(&self) -> f64 {
        self.pairs.iter().map(|p| p.2).fold(0.0, f64::max)
    }
}

/// Largest size solved by exact assignment.
pub const OPTIMAL_ASSIGNMENT_MAX: usize = 64;

/// Minimum total distance pairing of computed to exact roots.
pub fn match_roots(computed: &RootSet, exact: &RootSet) -> RootPairing {
    let (a, b) = (&computed.roots, &exact.roots);
    let n = a.len().max(b.len());
    // Padding rows and columns cost nothing.
    let cost: Vec<f64> = (0..n * n)
        .map(|idx| {
            let (r, c) = (idx / n, idx % n);
            if r < a.len() && c < b.len() { (a[r] - b[c]).norm() } else { 0.0 }
        })
        .collect();
    let (assign, gap) = if n <= OPTIMAL_ASSIGNMENT_MAX {
        (assignment::hungarian(&cost, n), None)
    } else {
        let (g, gap) = assignment::greedy(&cost, n);
        (g, Some(gap))
    };
    let mut pairs = Vec::new();
    let mut unmatched = Vec::new();
    for (r, &c) in assign.iter().enumerate().take(a.len()) {
        if c < b.len() {
            pairs.push((r, c, cost[r * n + c]));
        } else {
            unmatched.push(r);
        }
    }
    RootPairing { pairs, unmatched, optimality_gap: gap }
}

fn checked_span(cfg: &RingConfig) -> Result<(f64, f64)> {
    let (e_lo, e_hi) = cfg.energy_window();
    let span = cfg.phase_span();
    if span > TAU * (1.0 + 1e-12) {
        return Err(Error::Ambiguous { span });
    }
    Ok((e_lo, e_hi))
}

/// `E = (hbar / tau)(arg z + 2 pi k_branch)` with `arg z` in `[0, 2 pi)`,
/// keeping energies inside the ring's window.
pub fn infer_energies(rs: &RootSet, cfg: &RingConfig, k_branch: i64) -> Result<Vec<f64>> {
    let (e_lo, e_hi) = checked_span(cfg)?;
    let slack = 1e-9 * (e_hi - e_lo);
    let scale = cfg.hbar() / cfg.tau();
    Ok(rs
        .phases()
        .into_iter()
        .map(|phi| scale * (phi + TAU * k_branch as f64))
        .filter(|e| (e_lo - slack..=e_hi + slack).contains(e))
        .collect())
}

/// Like [`infer_energies`], choosing for each root the branch that lands in
/// the window; roots with no such branch are dropped.
pub fn infer_energies_unwrapped(rs: &RootSet, cfg: &RingConfig) -> Result<Vec<f64>> {
    let (e_lo, e_hi) = checked_span(cfg)?;
    let slack = 1e-9 * (e_hi - e_lo);
    let scale = cfg.hbar() / cfg.tau();
    Ok(rs
        .phases()
        .into_iter()
        .filter_map(|phi| {
            let k = ((e_lo - slack) / scale - phi) / TAU;
            let e = scale * (phi + TAU * k.ceil());
            (e <= e_hi + slack).then_some(e)
        })
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact::{exact_char_poly, exact_traces};
    use crate::model::quantize_window;
    use crate::specdet::{newton_coeffs, self_inversive_residual};
    use std::f64::consts::PI;

    fn poly(coeffs: Vec<Complex64>) -> CharPolynomial {
        CharPolynomial::new(coeffs, PolyMode::Raw)
    }

    fn fig2() -> RingConfig {
        RingConfig::from_energies(0.35, 20.3489573, 0.0, 30.4571694, Some(48), None).unwrap()
    }

    #[test]
    fn roots_of_unity() {
        for n in [1, 2, 7, 48] {
            let mut c = vec![Complex64::new(0.0, 0.0); n + 1];
            c[0] = Complex64::new(-1.0, 0.0);
            c[n] = Complex64::new(1.0, 0.0);
            let rs = find_roots(&poly(c), TARGET_RESIDUAL).unwrap();
            assert_eq!(rs.len(), n);
            let exact = RootSet::from_exact((0..n).map(|j| Complex64::from_polar(1.0, TAU * j as f64 / n as f64)).collect());
            assert!(match_roots(&rs, &exact).max_distance() < 1e-12);
        }
    }

    #[test]
    fn trailing_and_leading_zeros() {
        // z (z - 2) with a padded top coefficient.
        let c = vec![0.0, -2.0, 1.0, 0.0].into_iter().map(|x| Complex64::new(x, 0.0)).collect();
        let rs = find_roots(&poly(c), TARGET_RESIDUAL).unwrap();
        let mut r: Vec<f64> = rs.roots.iter().map(|z| z.re).collect();
        r.sort_by(f64::total_cmp);
        assert!(r[0].abs() < 1e-15 && (r[1] - 2.0).abs() < 1e-12);
        assert!(find_roots(&poly(vec![Complex64::new(0.0, 0.0); 3]), 1e-12).is_err());
    }

    #[test]
    fn exact_polynomial_roots_are_eigenphases() {
        let cfg = fig2();
        let spec = quantize_window(&cfg).unwrap();
        let rs = find_roots(&exact_char_poly(&spec, &cfg), TARGET_RESIDUAL).unwrap();
        let (frac, dev) = unit_circle_stats(&rs, TOL_CIRCLE);
        assert_eq!(frac, 1.0);
        assert!(dev < 1e-10);
        let pairing = match_roots(&rs, &RootSet::from_exact(spec.char_roots()));
        assert!(pairing.max_distance() < 1e-9);
        assert!(pairing.unmatched.is_empty());
    }

    #[test]
    fn pairing_of_rotated_set() {
        let a: Vec<Complex64> = (0..10).map(|j| Complex64::from_polar(1.0, 0.6 * j as f64)).collect();
        let eps = 1e-4;
        let b: Vec<Complex64> = a.iter().map(|z| z * Complex64::from_polar(1.0, eps)).collect();
        let p = match_roots(&RootSet::from_exact(b), &RootSet::from_exact(a.clone()));
        let chord = 2.0 * (eps / 2.0).sin();
        assert!(p.pairs.iter().all(|&(i, j, d)| i == j && (d - chord).abs() < 1e-15));
        let same = match_roots(&RootSet::from_exact(a.clone()), &RootSet::from_exact(a));
        assert_eq!(same.total_distance(), 0.0);
    }

    #[test]
    fn large_sets_use_greedy_with_gap() {
        let a: Vec<Complex64> = (0..80).map(|j| Complex64::from_polar(1.0, TAU * j as f64 / 80.0)).collect();
        let p = match_roots(&RootSet::from_exact(a.clone()), &RootSet::from_exact(a));
        assert_eq!(p.optimality_gap, Some(0.0));
        assert_eq!(p.total_distance(), 0.0);
    }

    #[test]
    fn random_polynomials_are_self_inversive_and_reproducible() {
        let a = random_self_inversive(48, 11).unwrap();
        assert_eq!(a, random_self_inversive(48, 11).unwrap());
        assert_ne!(a, random_self_inversive(48, 12).unwrap());
        assert!(self_inversive_residual(&a, Complex64::new(1.0, 0.0)) < 1e-10);
        assert!(random_self_inversive(1, 0).is_err());
        let rs = find_roots(&a, TARGET_RESIDUAL).unwrap();
        // Off-circle roots come in pairs z, 1/conj(z).
        for z in rs.roots.iter().filter(|z| (z.norm() - 1.0).abs() > TOL_CIRCLE) {
            let mirror = 1.0 / z.conj();
            assert!(rs.roots.iter().any(|w| (w - mirror).norm() < 1e-8));
        }
    }

    #[test]
    fn energies_from_roots() {
        let cfg = fig2();
        let spec = quantize_window(&cfg).unwrap();
        let rs = find_roots(&newton_coeffs(&exact_traces(&spec, &cfg, 48), 48).unwrap(), TARGET_RESIDUAL).unwrap();
        let mut e = infer_energies(&rs, &cfg, 0).unwrap();
        e.sort_by(f64::total_cmp);
        let mut want = spec.energies();
        want.sort_by(f64::total_cmp);
        assert_eq!(e.len(), want.len());
        let (lo, hi) = cfg.energy_window();
        for (a, b) in e.iter().zip(&want) {
            assert!((a - b).abs() < 1e-9 * (hi - lo));
        }
        let one = RootSet::from_exact(vec![Complex64::new(1.0, 0.0)]);
        let wide = RingConfig::new(1.0, 0.01, 0.0, 20.4, 40.4, None).unwrap();
        let e = infer_energies(&one, &wide, 1).unwrap();
        assert!((e[0] - TAU / 0.01).abs() < 1e-9);
        let ambiguous = cfg.with_tau(2.0 * cfg.tau()).unwrap();
        assert!(matches!(infer_energies(&rs, &ambiguous, 0), Err(Error::Ambiguous { .. })));
        let unwrapped = infer_energies_unwrapped(&RootSet::from_exact(vec![Complex64::from_polar(1.0, PI)]), &wide).unwrap();
        assert!((unwrapped[0] - PI / 0.01).abs() < 1e-9);
    }
}
