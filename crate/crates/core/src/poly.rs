//! Small dense univariate polynomials with ascending coefficients.

use serde::{Deserialize, Serialize};
use std::ops::{Add, Mul, Neg, Sub};

/// Coefficients below this fraction of the largest one are treated as zero
/// when deciding the degree.
pub const DEGREE_TOL: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq)]
pub struct Poly {
    coeffs: Vec<f64>,
}

impl Poly {
    pub fn new(coeffs: Vec<f64>) -> Self {
        let mut p = Poly { coeffs };
        p.trim();
        p
    }

    pub fn zero() -> Self {
        Poly { coeffs: vec![] }
    }

    pub fn constant(c: f64) -> Self {
        Poly::new(vec![c])
    }

    pub fn linear(a: f64, b: f64) -> Self {
        Poly::new(vec![a, b])
    }

    fn trim(&mut self) {
        while matches!(self.coeffs.last(), Some(&c) if c == 0.0) {
            self.coeffs.pop();
        }
    }

    pub fn coeffs(&self) -> &[f64] {
        &self.coeffs
    }

    /// Coefficient of `v^i`, zero past the stored length.
    pub fn coeff(&self, i: usize) -> f64 {
        self.coeffs.get(i).copied().unwrap_or(0.0)
    }

    pub fn max_abs_coeff(&self) -> f64 {
        self.coeffs.iter().fold(0.0, |m, c| m.max(c.abs()))
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// Numerical degree, ignoring coefficients that are negligible relative
    /// to the largest one. The zero polynomial reports `None`.
    pub fn degree(&self) -> Option<usize> {
        let scale = self.max_abs_coeff();
        if scale == 0.0 {
            return None;
        }
        self.coeffs
            .iter()
            .rposition(|c| c.abs() > DEGREE_TOL * scale)
    }

    pub fn eval(&self, x: f64) -> f64 {
        self.coeffs.iter().rev().fold(0.0, |acc, &c| acc * x + c)
    }

    pub fn derivative(&self) -> Poly {
        if self.coeffs.len() <= 1 {
            return Poly::zero();
        }
        Poly::new(
            self.coeffs
                .iter()
                .enumerate()
                .skip(1)
                .map(|(i, &c)| i as f64 * c)
                .collect(),
        )
    }

    pub fn scale(&self, s: f64) -> Poly {
        Poly::new(self.coeffs.iter().map(|c| c * s).collect())
    }

    /// Divides by the monic linear factor `v - root`, returning quotient and
    /// remainder.
    pub fn div_linear(&self, root: f64) -> (Poly, f64) {
        if self.coeffs.is_empty() {
            return (Poly::zero(), 0.0);
        }
        let n = self.coeffs.len();
        let mut q = vec![0.0; n.saturating_sub(1)];
        let mut carry = 0.0;
        for i in (0..n).rev() {
            let c = self.coeffs[i] + carry * root;
            if i == 0 {
                return (Poly::new(q), c);
            }
            q[i - 1] = c;
            carry = c;
        }
        unreachable!()
    }
}

impl Add for &Poly {
    type Output = Poly;
    fn add(self, rhs: &Poly) -> Poly {
        let n = self.coeffs.len().max(rhs.coeffs.len());
        Poly::new((0..n).map(|i| self.coeff(i) + rhs.coeff(i)).collect())
    }
}

impl Sub for &Poly {
    type Output = Poly;
    fn sub(self, rhs: &Poly) -> Poly {
        let n = self.coeffs.len().max(rhs.coeffs.len());
        Poly::new((0..n).map(|i| self.coeff(i) - rhs.coeff(i)).collect())
    }
}

impl Mul for &Poly {
    type Output = Poly;
    fn mul(self, rhs: &Poly) -> Poly {
        if self.is_zero() || rhs.is_zero() {
            return Poly::zero();
        }
        let mut out = vec![0.0; self.coeffs.len() + rhs.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            for (j, b) in rhs.coeffs.iter().enumerate() {
                out[i + j] += a * b;
            }
        }
        Poly::new(out)
    }
}

impl Neg for &Poly {
    type Output = Poly;
    fn neg(self) -> Poly {
        self.scale(-1.0)
    }
}

/// `a + b v` on [0,1]. The serialized form is the pair `[a, b]`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(from = "[f64; 2]", into = "[f64; 2]")]
pub struct LinearPoly {
    pub a: f64,
    pub b: f64,
}

impl LinearPoly {
    pub fn new(a: f64, b: f64) -> Self {
        LinearPoly { a, b }
    }

    pub fn eval(&self, v: f64) -> f64 {
        self.a + self.b * v
    }

    pub fn to_poly(self) -> Poly {
        Poly::linear(self.a, self.b)
    }

    /// Root of the linear polynomial, if it is not numerically constant.
    pub fn root(&self) -> Option<f64> {
        let scale = self.a.abs().max(self.b.abs());
        if scale == 0.0 || self.b.abs() <= DEGREE_TOL * scale {
            None
        } else {
            Some(-self.a / self.b)
        }
    }
}

impl From<[f64; 2]> for LinearPoly {
    fn from(c: [f64; 2]) -> Self {
        LinearPoly::new(c[0], c[1])
    }
}

impl From<LinearPoly> for [f64; 2] {
    fn from(l: LinearPoly) -> Self {
        [l.a, l.b]
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn eval_and_derivative() {
        let p = Poly::new(vec![1.0, -2.0, 3.0]);
        assert_eq!(p.eval(2.0), 9.0);
        assert_eq!(p.derivative().coeffs(), &[-2.0, 6.0]);
        assert_eq!(p.degree(), Some(2));
        assert_eq!(Poly::zero().degree(), None);
    }

    #[test]
    fn product_and_division() {
        let a = Poly::linear(-2.0, 1.0);
        let b = Poly::linear(3.0, 5.0);
        let ab = &a * &b;
        let (q, rem) = ab.div_linear(2.0);
        assert!(rem.abs() < 1e-14);
        assert_eq!(q, b);
    }

    #[test]
    fn negligible_leading_coefficient() {
        let p = Poly::new(vec![1.0, 1e-15]);
        assert_eq!(p.degree(), Some(0));
        assert_eq!(LinearPoly::new(1.0, 1e-15).root(), None);
        assert_eq!(LinearPoly::new(-1.0, 2.0).root(), Some(0.5));
    }
}
