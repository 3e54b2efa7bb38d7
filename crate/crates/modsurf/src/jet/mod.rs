//! Complex jets: a value together with its first k derivatives at a point,
//! propagated through expression trees by truncated-Taylor arithmetic.

mod eval;
mod oracle;
mod profile;

pub use eval::{eval_jet, eval_value, BranchPolicy};
pub use oracle::{cauchy_derivative, fd_oracle};
pub use profile::{zero_profile, ZeroProfile, DEFAULT_ZERO_TOL};

use crate::error::EvalError;
use num_complex::Complex64;

/// Largest supported jet order (number of derivatives).
pub const MAX_ORDER: usize = 12;

const FACTORIALS: [f64; 21] = [
    1.0,
    1.0,
    2.0,
    6.0,
    24.0,
    120.0,
    720.0,
    5040.0,
    40320.0,
    362880.0,
    3628800.0,
    39916800.0,
    479001600.0,
    6227020800.0,
    87178291200.0,
    1307674368000.0,
    20922789888000.0,
    355687428096000.0,
    6402373705728000.0,
    121645100408832000.0,
    2432902008176640000.0,
];

/// Taylor coefficients `c_j = F^(j)(z0) / j!` of an analytic function at a
/// center point. `coeffs` always holds `order + 1` entries.
#[derive(Debug, Clone, PartialEq)]
pub struct ComplexJet {
    center: Complex64,
    coeffs: Vec<Complex64>,
}

impl ComplexJet {
    pub fn from_coeffs(center: Complex64, coeffs: Vec<Complex64>) -> Self {
        assert!(!coeffs.is_empty(), "a jet holds at least the value");
        ComplexJet { center, coeffs }
    }

    /// Jet of the constant function `c`.
    pub fn constant(center: Complex64, c: Complex64, order: usize) -> Self {
        let mut coeffs = vec![Complex64::new(0.0, 0.0); order + 1];
        coeffs[0] = c;
        ComplexJet { center, coeffs }
    }

    /// Jet of the identity `z` at `center`.
    pub fn variable(center: Complex64, order: usize) -> Self {
        let mut coeffs = vec![Complex64::new(0.0, 0.0); order + 1];
        coeffs[0] = center;
        if order >= 1 {
            coeffs[1] = Complex64::new(1.0, 0.0);
        }
        ComplexJet { center, coeffs }
    }

    pub fn center(&self) -> Complex64 {
        self.center
    }

    pub fn order(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn coeffs(&self) -> &[Complex64] {
        &self.coeffs
    }

    /// The function value `F(z0)`.
    pub fn value(&self) -> Complex64 {
        self.coeffs[0]
    }

    /// Derivative extraction `F^(j)(z0) = j! * c_j`.
    pub fn derivative(&self, j: usize) -> Complex64 {
        self.coeffs[j] * FACTORIALS[j]
    }

    pub fn is_finite(&self) -> bool {
        self.coeffs
            .iter()
            .all(|c| c.re.is_finite() && c.im.is_finite())
    }

    pub fn add(&self, other: &ComplexJet) -> ComplexJet {
        self.zip(other, |a, b| a + b)
    }

    pub fn sub(&self, other: &ComplexJet) -> ComplexJet {
        self.zip(other, |a, b| a - b)
    }

    pub fn scale(&self, s: Complex64) -> ComplexJet {
        ComplexJet {
            center: self.center,
            coeffs: self.coeffs.iter().map(|c| c * s).collect(),
        }
    }

    pub fn neg(&self) -> ComplexJet {
        self.scale(Complex64::new(-1.0, 0.0))
    }

    /// Cauchy product, truncated to the common order.
    pub fn mul(&self, other: &ComplexJet) -> ComplexJet {
        debug_assert_eq!(self.center, other.center);
        debug_assert_eq!(self.order(), other.order());
        let n = self.coeffs.len();
        let mut out = vec![Complex64::new(0.0, 0.0); n];
        for (i, a) in self.coeffs.iter().enumerate() {
            for (j, b) in other.coeffs.iter().enumerate() {
                if i + j < n {
                    out[i + j] += a * b;
                }
            }
        }
        ComplexJet {
            center: self.center,
            coeffs: out,
        }
    }

    /// Quotient jet. The divisor's constant term must be nonzero; the
    /// removable 0/0 case is an error here by design, callers handle
    /// removability through explicit limit formulas.
    pub fn div(&self, other: &ComplexJet) -> Result<ComplexJet, EvalError> {
        debug_assert_eq!(self.order(), other.order());
        let b0 = other.coeffs[0];
        if b0 == Complex64::new(0.0, 0.0) {
            return Err(EvalError::DivisionByZero);
        }
        let n = self.coeffs.len();
        let mut q = vec![Complex64::new(0.0, 0.0); n];
        for k in 0..n {
            let mut acc = self.coeffs[k];
            for j in 1..=k {
                acc -= other.coeffs[j] * q[k - j];
            }
            q[k] = acc / b0;
        }
        Ok(ComplexJet {
            center: self.center,
            coeffs: q,
        })
    }

    /// exp of a jet: `E' = A' E`.
    pub fn exp(&self) -> ComplexJet {
        let n = self.coeffs.len();
        let mut e = vec![Complex64::new(0.0, 0.0); n];
        e[0] = self.coeffs[0].exp();
        for k in 1..n {
            let mut acc = Complex64::new(0.0, 0.0);
            for j in 1..=k {
                acc += self.coeffs[j] * e[k - j] * (j as f64);
            }
            e[k] = acc / (k as f64);
        }
        ComplexJet {
            center: self.center,
            coeffs: e,
        }
    }

    /// log of a jet on the branch whose value at the center is `log0`
    /// (so `exp(log0) == self.value()` up to rounding).
    pub fn log_with(&self, log0: Complex64) -> Result<ComplexJet, EvalError> {
        let a0 = self.coeffs[0];
        if a0 == Complex64::new(0.0, 0.0) {
            return Err(EvalError::BranchPoint { what: "log" });
        }
        let n = self.coeffs.len();
        let mut l = vec![Complex64::new(0.0, 0.0); n];
        l[0] = log0;
        for k in 1..n {
            let mut acc = self.coeffs[k] * (k as f64);
            for (j, lj) in l.iter().enumerate().take(k).skip(1) {
                acc -= lj * self.coeffs[k - j] * (j as f64);
            }
            l[k] = acc / (a0 * k as f64);
        }
        Ok(ComplexJet {
            center: self.center,
            coeffs: l,
        })
    }

    /// Integer power by repeated squaring; negative powers go through `div`.
    pub fn powi(&self, n: i32) -> Result<ComplexJet, EvalError> {
        let one = ComplexJet::constant(self.center, Complex64::new(1.0, 0.0), self.order());
        if n == 0 {
            return Ok(one);
        }
        if n < 0 {
            let recip = one.div(self)?;
            return recip.powi(-n);
        }
        let mut acc = one;
        let mut base = self.clone();
        let mut k = n as u32;
        loop {
            if k & 1 == 1 {
                acc = acc.mul(&base);
            }
            k >>= 1;
            if k == 0 {
                break;
            }
            base = base.mul(&base);
        }
        Ok(acc)
    }

    /// sin and cos jets, computed as a coupled pair.
    pub fn sin_cos(&self) -> (ComplexJet, ComplexJet) {
        let n = self.coeffs.len();
        let mut s = vec![Complex64::new(0.0, 0.0); n];
        let mut c = vec![Complex64::new(0.0, 0.0); n];
        s[0] = self.coeffs[0].sin();
        c[0] = self.coeffs[0].cos();
        for k in 1..n {
            let mut ds = Complex64::new(0.0, 0.0);
            let mut dc = Complex64::new(0.0, 0.0);
            for j in 1..=k {
                let ja = self.coeffs[j] * (j as f64);
                ds += ja * c[k - j];
                dc -= ja * s[k - j];
            }
            s[k] = ds / (k as f64);
            c[k] = dc / (k as f64);
        }
        (
            ComplexJet {
                center: self.center,
                coeffs: s,
            },
            ComplexJet {
                center: self.center,
                coeffs: c,
            },
        )
    }

    /// sinh and cosh jets, computed as a coupled pair.
    pub fn sinh_cosh(&self) -> (ComplexJet, ComplexJet) {
        let n = self.coeffs.len();
        let mut s = vec![Complex64::new(0.0, 0.0); n];
        let mut c = vec![Complex64::new(0.0, 0.0); n];
        s[0] = self.coeffs[0].sinh();
        c[0] = self.coeffs[0].cosh();
        for k in 1..n {
            let mut ds = Complex64::new(0.0, 0.0);
            let mut dc = Complex64::new(0.0, 0.0);
            for j in 1..=k {
                let ja = self.coeffs[j] * (j as f64);
                ds += ja * c[k - j];
                dc += ja * s[k - j];
            }
            s[k] = ds / (k as f64);
            c[k] = dc / (k as f64);
        }
        (
            ComplexJet {
                center: self.center,
                coeffs: s,
            },
            ComplexJet {
                center: self.center,
                coeffs: c,
            },
        )
    }

    fn zip(&self, other: &ComplexJet, f: impl Fn(Complex64, Complex64) -> Complex64) -> ComplexJet {
        debug_assert_eq!(self.center, other.center);
        debug_assert_eq!(self.order(), other.order());
        ComplexJet {
            center: self.center,
            coeffs: self
                .coeffs
                .iter()
                .zip(&other.coeffs)
                .map(|(&a, &b)| f(a, b))
                .collect(),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn derivative_extraction_is_exact() {
        let j = ComplexJet::from_coeffs(c(0.0, 0.0), vec![c(1.0, 0.0), c(2.0, 0.0), c(3.0, 0.0)]);
        assert_eq!(j.derivative(0), c(1.0, 0.0));
        assert_eq!(j.derivative(1), c(2.0, 0.0));
        assert_eq!(j.derivative(2), c(6.0, 0.0));
    }

    #[test]
    fn division_by_vanishing_constant_term_is_an_error() {
        let num = ComplexJet::variable(c(0.0, 0.0), 3);
        let den = ComplexJet::variable(c(0.0, 0.0), 3); // value 0 at center
        assert_eq!(num.div(&den), Err(EvalError::DivisionByZero));
    }

    #[test]
    fn exp_log_round_trip() {
        let a = ComplexJet::from_coeffs(
            c(0.3, -0.2),
            vec![c(1.2, 0.4), c(-0.3, 0.9), c(0.1, 0.0), c(0.0, -0.5)],
        );
        let e = a.exp();
        let back = e.log_with(a.value()).unwrap();
        for (x, y) in a.coeffs().iter().zip(back.coeffs()) {
            assert!((x - y).norm() < 1e-12);
        }
    }
}
