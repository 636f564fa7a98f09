//! Compensated summation for complex values.
//!
//! Sums are carried as an unevaluated pair `hi + lo`; products are split with
//! an FMA so that their rounding error also lands in `lo`. This gives roughly
//! twice the working precision for the short recurrences used when expanding
//! characteristic polynomials.

use num_complex::Complex64;

#[derive(Clone, Copy, Debug, Default)]
pub struct Acc {
    hi: f64,
    lo: f64,
}

impl Acc {
    pub fn new(x: f64) -> Self {
        Acc { hi: x, lo: 0.0 }
    }

    pub fn add(&mut self, x: f64) {
        let s = self.hi + x;
        let bp = s - self.hi;
        let err = (self.hi - (s - bp)) + (x - bp);
        self.hi = s;
        self.lo += err;
    }

    pub fn add_prod(&mut self, a: f64, b: f64) {
        let p = a * b;
        let e = a.mul_add(b, -p);
        self.add(p);
        self.lo += e;
    }

    pub fn value(&self) -> f64 {
        self.hi + self.lo
    }
}

#[derive(Clone, Copy, Debug, Default)]
pub struct ComplexAcc {
    re: Acc,
    im: Acc,
}

impl ComplexAcc {
    pub fn new(z: Complex64) -> Self {
        ComplexAcc { re: Acc::new(z.re), im: Acc::new(z.im) }
    }

    pub fn add(&mut self, z: Complex64) {
        self.re.add(z.re);
        self.im.add(z.im);
    }

    pub fn add_prod(&mut self, a: Complex64, b: Complex64) {
        self.re.add_prod(a.re, b.re);
        self.re.add_prod(-a.im, b.im);
        self.im.add_prod(a.re, b.im);
        self.im.add_prod(a.im, b.re);
    }

    /// The pair as two complex numbers, leading part first.
    pub fn parts(&self) -> (Complex64, Complex64) {
        (Complex64::new(self.re.hi, self.im.hi), Complex64::new(self.re.lo, self.im.lo))
    }

    pub fn value(&self) -> Complex64 {
        Complex64::new(self.re.value(), self.im.value())
    }
}

/// Compensated complex dot product.
pub fn dot(a: &[Complex64], b: &[Complex64]) -> Complex64 {
    let mut acc = ComplexAcc::default();
    for (x, y) in a.iter().zip(b) {
        acc.add_prod(*x, *y);
    }
    acc.value()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn recovers_cancelled_low_bits() {
        let mut acc = Acc::default();
        acc.add(1e16);
        acc.add(1.0);
        acc.add(-1e16);
        assert_eq!(acc.value(), 1.0);
    }

    #[test]
    fn product_error_is_kept() {
        // (1 + 2^-30)^2 has a 2^-60 term lost by plain multiplication.
        let x = 1.0 + 2f64.powi(-30);
        let mut acc = Acc::default();
        acc.add_prod(x, x);
        acc.add(-1.0);
        acc.add(-2f64.powi(-29));
        assert_eq!(acc.value(), 2f64.powi(-60));
    }

    #[test]
    fn complex_dot_matches_naive_on_benign_input() {
        let a = [Complex64::new(1.0, 2.0), Complex64::new(-0.5, 0.25)];
        let b = [Complex64::new(0.5, -1.0), Complex64::new(3.0, 1.0)];
        let naive: Complex64 = a.iter().zip(&b).map(|(x, y)| x * y).sum();
        assert!((dot(&a, &b) - naive).norm() < 1e-15);
    }
}
