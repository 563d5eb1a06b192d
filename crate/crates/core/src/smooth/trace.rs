use crate::bspline::SplineFunction1D;
use crate::error::{Error, Result};
use crate::poly::Poly;
use std::sync::Arc;

/// One summand `coef(v) * s^(deriv)(v)`.
#[derive(Debug, Clone)]
pub struct Term {
    pub coef: Poly,
    pub spline: Arc<SplineFunction1D>,
    pub deriv: usize,
}

/// A function along the interface written as a sum of polynomial multiples
/// of spline derivatives.
#[derive(Debug, Clone, Default)]
pub struct TraceFn {
    pub terms: Vec<Term>,
}

impl TraceFn {
    pub fn zero() -> Self {
        TraceFn { terms: vec![] }
    }

    pub fn spline(s: Arc<SplineFunction1D>) -> Self {
        TraceFn::term(Poly::constant(1.0), s, 0)
    }

    pub fn term(coef: Poly, spline: Arc<SplineFunction1D>, deriv: usize) -> Self {
        let mut t = TraceFn::zero();
        if !coef.is_zero() {
            t.terms.push(Term { coef, spline, deriv });
        }
        t
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn eval(&self, v: f64) -> f64 {
        self.terms
            .iter()
            .map(|t| t.coef.eval(v) * t.spline.eval(v, t.deriv))
            .sum()
    }

    pub fn derivative(&self) -> TraceFn {
        let mut out = TraceFn::zero();
        for t in &self.terms {
            let dc = t.coef.derivative();
            if !dc.is_zero() {
                out.terms.push(Term { coef: dc, spline: t.spline.clone(), deriv: t.deriv });
            }
            out.terms.push(Term { coef: t.coef.clone(), spline: t.spline.clone(), deriv: t.deriv + 1 });
        }
        out
    }

    pub fn mul_poly(&self, p: &Poly) -> TraceFn {
        let mut out = TraceFn::zero();
        if p.is_zero() {
            return out;
        }
        for t in &self.terms {
            let c = &t.coef * p;
            if !c.is_zero() {
                out.terms.push(Term { coef: c, spline: t.spline.clone(), deriv: t.deriv });
            }
        }
        out
    }

    pub fn scale(&self, s: f64) -> TraceFn {
        self.mul_poly(&Poly::constant(s))
    }

    pub fn add(&self, other: &TraceFn) -> TraceFn {
        let mut out = self.clone();
        out.terms.extend(other.terms.iter().cloned());
        out
    }

    /// Exact division of every coefficient by the monic linear `v - root`.
    pub fn div_linear(&self, root: f64) -> Result<TraceFn> {
        let mut out = TraceFn::zero();
        for t in &self.terms {
            let (quot, rem) = t.coef.div_linear(root);
            if rem.abs() > 1e-10 * t.coef.max_abs_coeff() {
                return Err(Error::NotRepresentable(format!(
                    "coefficient {:?} is not divisible by (v - {root})",
                    t.coef.coeffs()
                )));
            }
            if !quot.is_zero() {
                out.terms.push(Term { coef: quot, spline: t.spline.clone(), deriv: t.deriv });
            }
        }
        Ok(out)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bspline::KnotVector;

    #[test]
    fn product_rule() {
        let kv = KnotVector::uniform(4, 1, 2).unwrap();
        let s = Arc::new(SplineFunction1D::basis(&kv, 3));
        let f = TraceFn::term(Poly::new(vec![1.0, 2.0, -1.0]), s.clone(), 0);
        let df = f.derivative();
        let h = 1e-6;
        for v in [0.1, 0.45, 0.8] {
            let fd = (f.eval(v + h) - f.eval(v - h)) / (2.0 * h);
            assert!((df.eval(v) - fd).abs() < 1e-6);
        }
    }

    #[test]
    fn division() {
        let kv = KnotVector::uniform(3, 1, 0).unwrap();
        let s = Arc::new(SplineFunction1D::basis(&kv, 1));
        let q = Poly::linear(-2.0, 1.0);
        let f = TraceFn::term(&q * &Poly::linear(1.0, 1.0), s.clone(), 0);
        let g = f.div_linear(2.0).unwrap();
        assert!((g.eval(0.3) - 1.3 * s.eval(0.3, 0)).abs() < 1e-14);
        assert!(TraceFn::term(Poly::linear(1.0, 1.0), s, 0).div_linear(2.0).is_err());
    }
}
