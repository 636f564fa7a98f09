//! Double-double complex helpers.
//!
//! Eigenphases of the ring cluster near `z = 1` (energies grow quadratically
//! away from the band centre), so roots of a degree-50 determinant are
//! sensitive to coefficient rounding by roughly fourteen orders of magnitude.
//! The exact pipeline therefore carries a second word per value.

use num_complex::{Complex, Complex64};
use twofloat::TwoFloat;

pub type Cdd = Complex<TwoFloat>;

pub fn lift(z: Complex64) -> Cdd {
    Cdd::new(TwoFloat::from(z.re), TwoFloat::from(z.im))
}

pub fn join(hi: Complex64, lo: Complex64) -> Cdd {
    Cdd::new(TwoFloat::new_add(hi.re, lo.re), TwoFloat::new_add(hi.im, lo.im))
}

pub fn split(z: Cdd) -> (Complex64, Complex64) {
    (Complex64::new(z.re.hi(), z.im.hi()), Complex64::new(z.re.lo(), z.im.lo()))
}

pub fn round(z: Cdd) -> Complex64 {
    Complex64::new(z.re.hi() + z.re.lo(), z.im.hi() + z.im.lo())
}

pub fn zero() -> Cdd {
    Cdd::new(TwoFloat::from(0.0), TwoFloat::from(0.0))
}

pub fn one() -> Cdd {
    Cdd::new(TwoFloat::from(1.0), TwoFloat::from(0.0))
}

pub fn conj(z: Cdd) -> Cdd {
    Cdd::new(z.re, -z.im)
}

pub fn scale(z: Cdd, x: f64) -> Cdd {
    Cdd::new(z.re * x, z.im * x)
}

/// `|z|` rounded to `f64`.
pub fn abs(z: Cdd) -> f64 {
    let n = z.re * z.re + z.im * z.im;
    (n.hi() + n.lo()).sqrt()
}

/// `a / b` to full double-double precision. The division operator of
/// `TwoFloat` drops the correction term and is only `f64` accurate.
pub fn div_real(a: TwoFloat, b: TwoFloat) -> TwoFloat {
    let q1 = a.hi() / b.hi();
    let r = a - b * q1;
    let q2 = r.hi() / b.hi();
    let r = r - b * q2;
    let q3 = r.hi() / b.hi();
    TwoFloat::new_add(q1, q2) + q3
}

pub fn div(a: Cdd, b: Cdd) -> Cdd {
    let d = b.re * b.re + b.im * b.im;
    let n = a * conj(b);
    Cdd::new(div_real(n.re, d), div_real(n.im, d))
}

pub fn recip(b: Cdd) -> Cdd {
    div(one(), b)
}

/// `z / |z|` in full precision.
pub fn normalize(z: Cdd) -> Cdd {
    let r = (z.re * z.re + z.im * z.im).sqrt();
    Cdd::new(div_real(z.re, r), div_real(z.im, r))
}

/// `e^{i phi}` for a moderate `f64` angle: Taylor series at `phi / 2^k`, then
/// `k` squarings.
pub fn unit_phasor(phi: f64) -> Cdd {
    let k = (phi.abs().max(1.0).log2().ceil() as i32 + 8).max(0);
    let x = TwoFloat::from(phi) * 0.5f64.powi(k);
    let mut term = one();
    let mut sum = one();
    let ix = Cdd::new(TwoFloat::from(0.0), x);
    for j in 1..=14 {
        term *= ix;
        term = Cdd::new(term.re / j as f64, term.im / j as f64);
        sum += term;
    }
    for _ in 0..k {
        sum = sum * sum;
    }
    sum
}
