use super::knots::KnotVector;
use crate::error::{Error, Result};

/// Tensor-product space `S(T) x S(T)` on [0,1]^2. Coefficients are stored
/// row-major with `i` along `u`: entry `(i, j)` at `i * n_v + j`.
#[derive(Debug, Clone, PartialEq)]
pub struct TensorSplineSpace {
    pub u: KnotVector,
    pub v: KnotVector,
}

impl TensorSplineSpace {
    pub fn new(u: KnotVector, v: KnotVector) -> Self {
        TensorSplineSpace { u, v }
    }

    pub fn square(kv: KnotVector) -> Self {
        TensorSplineSpace { u: kv.clone(), v: kv }
    }

    pub fn dim(&self) -> usize {
        self.u.dim() * self.v.dim()
    }

    /// `d^du/du d^dv/dv` of the tensor spline at `(u, v)`.
    pub fn eval(&self, coeffs: &[f64], u: f64, v: f64, du: usize, dv: usize) -> Result<f64> {
        if coeffs.len() != self.dim() {
            return Err(Error::OutOfRange(format!(
                "expected {} coefficients, got {}",
                self.dim(),
                coeffs.len()
            )));
        }
        if du > self.u.degree() || dv > self.v.degree() {
            return Ok(0.0);
        }
        let bu = self.u.eval_basis(u, du)?;
        let bv = self.v.eval_basis(v, dv)?;
        let nv = self.v.dim();
        let mut s = 0.0;
        for (a, wu) in bu.ders[du].iter().enumerate() {
            let row = (bu.first + a) * nv + bv.first;
            let inner: f64 = bv.ders[dv]
                .iter()
                .enumerate()
                .map(|(b, wv)| wv * coeffs[row + b])
                .sum();
            s += wu * inner;
        }
        Ok(s)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn separable_and_linear_precision() {
        let kv = KnotVector::uniform(3, 1, 2).unwrap();
        let sp = TensorSplineSpace::square(kv.clone());
        let n = kv.dim();
        let ones = vec![1.0; n * n];
        assert!((sp.eval(&ones, 0.3, 0.8, 0, 0).unwrap() - 1.0).abs() < 1e-14);
        let g = kv.greville();
        let cu: Vec<f64> = (0..n * n).map(|k| g[k / n]).collect();
        assert!((sp.eval(&cu, 0.37, 0.5, 1, 0).unwrap() - 1.0).abs() < 1e-12);
        assert!(sp.eval(&cu, 0.37, 0.5, 0, 1).unwrap().abs() < 1e-12);
        assert!(sp.eval(&ones, 1.2, 0.0, 0, 0).is_err());
    }
}
