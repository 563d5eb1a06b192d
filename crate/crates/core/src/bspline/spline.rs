use super::basis::Side;
use super::knots::KnotVector;
use crate::error::{Error, Result};
use crate::linalg::BandedLu;

/// A univariate spline given by its B-spline coefficients.
#[derive(Debug, Clone, PartialEq)]
pub struct SplineFunction1D {
    pub space: KnotVector,
    pub coeffs: Vec<f64>,
}

impl SplineFunction1D {
    pub fn new(space: KnotVector, coeffs: Vec<f64>) -> Result<Self> {
        if coeffs.len() != space.dim() {
            return Err(Error::OutOfRange(format!(
                "expected {} coefficients, got {}",
                space.dim(),
                coeffs.len()
            )));
        }
        Ok(SplineFunction1D { space, coeffs })
    }

    /// The `i`-th B-spline of `space`.
    pub fn basis(space: &KnotVector, i: usize) -> Self {
        let mut coeffs = vec![0.0; space.dim()];
        coeffs[i] = 1.0;
        SplineFunction1D { space: space.clone(), coeffs }
    }

    pub fn eval(&self, x: f64, d: usize) -> f64 {
        self.eval_side(x, d, Side::Right)
    }

    pub fn eval_side(&self, x: f64, d: usize, side: Side) -> f64 {
        if d > self.space.degree() {
            return 0.0;
        }
        let x = x.clamp(0.0, 1.0);
        let b = self
            .space
            .eval_basis_side(x, d, side)
            .expect("clamped argument is in range");
        b.ders[d]
            .iter()
            .enumerate()
            .map(|(l, v)| v * self.coeffs[b.first + l])
            .sum()
    }

    /// Value and first two derivatives at `x`.
    pub fn eval3(&self, x: f64) -> [f64; 3] {
        let b = self
            .space
            .eval_basis(x.clamp(0.0, 1.0), 2)
            .expect("clamped argument is in range");
        let mut out = [0.0; 3];
        for (d, o) in out.iter_mut().enumerate() {
            *o = b.ders[d]
                .iter()
                .enumerate()
                .map(|(l, v)| v * self.coeffs[b.first + l])
                .sum();
        }
        out
    }

    /// Jump `f^(d)(x+) - f^(d)(x-)` at `x`.
    pub fn jump(&self, x: f64, d: usize) -> f64 {
        self.eval_side(x, d, Side::Right) - self.eval_side(x, d, Side::Left)
    }

    /// Support interval `[t_i, t_{i+p+1}]` hull of the nonzero coefficients.
    pub fn support(&self) -> Option<(f64, f64)> {
        let p = self.space.degree();
        let t = self.space.knots();
        let first = self.coeffs.iter().position(|&c| c != 0.0)?;
        let last = self.coeffs.iter().rposition(|&c| c != 0.0)?;
        Some((t[first], t[last + p + 1]))
    }
}

/// Greville collocation for a fixed space, factored once.
#[derive(Debug, Clone)]
pub struct Interpolator {
    space: KnotVector,
    greville: Vec<f64>,
    lu: BandedLu,
}

impl Interpolator {
    pub fn new(space: &KnotVector) -> Result<Self> {
        let n = space.dim();
        let p = space.degree();
        let greville = space.greville();
        let mut rows = Vec::with_capacity(n);
        for &x in &greville {
            let b = space.eval_basis(x, 0)?;
            rows.push((b.first, b.ders[0].clone()));
        }
        let lu = BandedLu::factor(n, p, p, |i, j| {
            let (first, ref vals) = rows[i];
            if j >= first && j < first + vals.len() {
                vals[j - first]
            } else {
                0.0
            }
        })?;
        Ok(Interpolator { space: space.clone(), greville, lu })
    }

    pub fn points(&self) -> &[f64] {
        &self.greville
    }

    pub fn space(&self) -> &KnotVector {
        &self.space
    }

    /// Coefficients whose spline matches `samples[i]` at the `i`-th Greville point.
    pub fn coefficients(&self, samples: &[f64]) -> Result<Vec<f64>> {
        if samples.len() != self.greville.len() {
            return Err(Error::OutOfRange(format!(
                "expected {} samples, got {}",
                self.greville.len(),
                samples.len()
            )));
        }
        Ok(self.lu.solve(samples))
    }

    pub fn interpolate(&self, samples: &[f64]) -> Result<SplineFunction1D> {
        SplineFunction1D::new(self.space.clone(), self.coefficients(samples)?)
    }

    pub fn interpolate_fn(&self, f: impl Fn(f64) -> f64) -> Result<SplineFunction1D> {
        let samples: Vec<f64> = self.greville.iter().map(|&x| f(x)).collect();
        self.interpolate(&samples)
    }
}

/// Interpolates `samples` at the Greville points of `space`.
pub fn interpolate_at_greville(space: &KnotVector, samples: &[f64]) -> Result<SplineFunction1D> {
    Interpolator::new(space)?.interpolate(samples)
}

/// Matrix `T` (row-major, `new.dim() x old.dim()`) with `c_new = T c_old`,
/// obtained by inserting the knots of `new` missing from `old` one at a time.
pub fn refinement_matrix(old: &KnotVector, new: &KnotVector) -> Result<Vec<Vec<f64>>> {
    let p = old.degree();
    if new.degree() != p {
        return Err(Error::InvalidKnots("refinement cannot change the degree".into()));
    }
    let mut missing = Vec::new();
    let (a, b) = (old.knots(), new.knots());
    let mut i = 0;
    for &t in b {
        if i < a.len() && a[i] == t {
            i += 1;
        } else {
            missing.push(t);
        }
    }
    if i != a.len() || b.len() != a.len() + missing.len() {
        return Err(Error::InvalidKnots("new knot vector does not contain the old one".into()));
    }
    // Columns of the identity, refined together.
    let mut knots = a.to_vec();
    let mut t: Vec<Vec<f64>> = (0..old.dim())
        .map(|r| (0..old.dim()).map(|c| if r == c { 1.0 } else { 0.0 }).collect())
        .collect();
    for x in missing {
        let k = knots.partition_point(|&s| s <= x) - 1;
        let mut next = Vec::with_capacity(t.len() + 1);
        for j in 0..=t.len() {
            if j + p <= k {
                next.push(t[j].clone());
            } else if j > k {
                next.push(t[j - 1].clone());
            } else {
                let alpha = (x - knots[j]) / (knots[j + p] - knots[j]);
                next.push(
                    t[j].iter()
                        .zip(&t[j - 1])
                        .map(|(c, cm)| alpha * c + (1.0 - alpha) * cm)
                        .collect(),
                );
            }
        }
        knots.insert(k + 1, x);
        t = next;
    }
    Ok(t)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn constants_and_linear_precision() {
        let kv = KnotVector::uniform(5, 2, 3).unwrap();
        let it = Interpolator::new(&kv).unwrap();
        let ones = it.interpolate(&vec![1.0; kv.dim()]).unwrap();
        assert!(ones.coeffs.iter().all(|c| (c - 1.0).abs() < 1e-13));
        let g = kv.greville();
        let lin = it.interpolate(&g).unwrap();
        for (c, x) in lin.coeffs.iter().zip(&g) {
            assert!((c - x).abs() < 1e-13);
        }
    }

    #[test]
    fn jump_of_quadratic_bspline() {
        let kv = KnotVector::uniform(2, 1, 1).unwrap();
        let f = SplineFunction1D::basis(&kv, 1);
        assert!(f.jump(0.5, 0).abs() < 1e-14);
        assert!(f.jump(0.5, 1).abs() < 1e-12);
        assert!(f.jump(0.5, 2).abs() > 1.0);
    }

    #[test]
    fn insertion_preserves_function() {
        let old = KnotVector::uniform(3, 1, 1).unwrap();
        let new = KnotVector::regular(3, 1, &[0.25, 0.5, 0.75]).unwrap();
        let t = refinement_matrix(&old, &new).unwrap();
        assert_eq!(t.len(), new.dim());
        let c: Vec<f64> = (0..old.dim()).map(|i| (i as f64 * 0.7).sin()).collect();
        let cn: Vec<f64> = t.iter().map(|row| row.iter().zip(&c).map(|(a, b)| a * b).sum()).collect();
        let f = SplineFunction1D::new(old, c).unwrap();
        let g = SplineFunction1D::new(new, cn).unwrap();
        for i in 0..=40 {
            let x = i as f64 / 40.0;
            assert!((f.eval(x, 0) - g.eval(x, 0)).abs() < 1e-13);
        }
    }

    #[test]
    fn refinement_rejects_non_nested() {
        let a = KnotVector::uniform(3, 1, 1).unwrap();
        let b = KnotVector::uniform(3, 1, 2).unwrap();
        assert!(refinement_matrix(&a, &b).is_err());
    }
}
