use super::knots::KnotVector;
use crate::error::{Error, Result};

/// Which one-sided limit to take at a knot.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Side {
    Left,
    Right,
}

/// Nonzero B-splines at a point and their derivatives.
#[derive(Debug, Clone)]
pub struct BasisValues {
    /// Global index of the first nonzero basis function.
    pub first: usize,
    /// `ders[d][l]` is the `d`-th derivative of basis function `first + l`.
    pub ders: Vec<Vec<f64>>,
}

impl KnotVector {
    /// Basis functions nonzero at `x` with derivatives up to `max_deriv`,
    /// right limits at interior knots.
    pub fn eval_basis(&self, x: f64, max_deriv: usize) -> Result<BasisValues> {
        self.eval_basis_side(x, max_deriv, Side::Right)
    }

    pub fn eval_basis_side(&self, x: f64, max_deriv: usize, side: Side) -> Result<BasisValues> {
        if !(0.0..=1.0).contains(&x) {
            return Err(Error::OutOfRange(format!("x = {x} is outside [0,1]")));
        }
        let span = match side {
            Side::Right => self.span(x),
            Side::Left => self.span_left(x),
        };
        Ok(BasisValues {
            first: span - self.degree(),
            ders: ders_basis(self.knots(), self.degree(), span, x, max_deriv),
        })
    }

    /// Dense evaluation of all basis functions (derivative order `d`) at `x`.
    pub fn eval_all(&self, x: f64, d: usize) -> Result<Vec<f64>> {
        let b = self.eval_basis(x, d)?;
        let mut out = vec![0.0; self.dim()];
        if d <= self.degree() {
            for (l, v) in b.ders[d].iter().enumerate() {
                out[b.first + l] = *v;
            }
        }
        Ok(out)
    }
}

/// Derivatives of the `p + 1` B-splines nonzero on span `span`, by the
/// triangular recurrence. Derivatives above `p` are zero.
pub(crate) fn ders_basis(knots: &[f64], p: usize, span: usize, x: f64, nd: usize) -> Vec<Vec<f64>> {
    let mut ndu = vec![vec![0.0; p + 1]; p + 1];
    let mut left = vec![0.0; p + 1];
    let mut right = vec![0.0; p + 1];
    ndu[0][0] = 1.0;
    for j in 1..=p {
        left[j] = x - knots[span + 1 - j];
        right[j] = knots[span + j] - x;
        let mut saved = 0.0;
        for r in 0..j {
            ndu[j][r] = right[r + 1] + left[j - r];
            let temp = ndu[r][j - 1] / ndu[j][r];
            ndu[r][j] = saved + right[r + 1] * temp;
            saved = left[j - r] * temp;
        }
        ndu[j][j] = saved;
    }

    let mut ders = vec![vec![0.0; p + 1]; nd + 1];
    for j in 0..=p {
        ders[0][j] = ndu[j][p];
    }
    let top = nd.min(p);
    let mut a = [vec![0.0; p + 1], vec![0.0; p + 1]];
    for r in 0..=p {
        let (mut s1, mut s2) = (0usize, 1usize);
        a[0][0] = 1.0;
        for k in 1..=top {
            let mut d = 0.0;
            let rk = r as isize - k as isize;
            let pk = p - k;
            if r >= k {
                a[s2][0] = a[s1][0] / ndu[pk + 1][rk as usize];
                d = a[s2][0] * ndu[rk as usize][pk];
            }
            let j1 = if rk >= -1 { 1 } else { (-rk) as usize };
            let j2 = if r as isize - 1 <= pk as isize { k - 1 } else { p - r };
            for j in j1..=j2 {
                let idx = (rk + j as isize) as usize;
                a[s2][j] = (a[s1][j] - a[s1][j - 1]) / ndu[pk + 1][idx];
                d += a[s2][j] * ndu[idx][pk];
            }
            if r <= pk {
                a[s2][k] = -a[s1][k - 1] / ndu[pk + 1][r];
                d += a[s2][k] * ndu[r][pk];
            }
            ders[k][r] = d;
            std::mem::swap(&mut s1, &mut s2);
        }
    }
    let mut fac = p as f64;
    for k in 1..=top {
        for v in ders[k].iter_mut() {
            *v *= fac;
        }
        fac *= (p - k) as f64;
    }
    ders
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn values_at_zero_match_closed_form() {
        let kv = KnotVector::uniform(5, 2, 3).unwrap();
        let b = kv.eval_basis(0.0, 2).unwrap();
        let (p, t1) = (5.0, 0.25);
        assert_eq!(b.first, 0);
        assert!((b.ders[0][0] - 1.0).abs() < 1e-15);
        assert!((b.ders[1][0] + p / t1).abs() < 1e-12);
        assert!((b.ders[1][1] - p / t1).abs() < 1e-12);
        assert!(b.ders[1][2].abs() < 1e-12);
        let c = p * (p - 1.0) / (t1 * t1);
        assert!((b.ders[2][0] - c).abs() < 1e-9);
        assert!((b.ders[2][1] + 2.0 * c).abs() < 1e-9);
        assert!((b.ders[2][2] - c).abs() < 1e-9);
        assert!(b.ders[2][3].abs() < 1e-9);
    }

    #[test]
    fn bernstein_case() {
        let kv = KnotVector::uniform(3, 1, 0).unwrap();
        let x: f64 = 0.3;
        let b = kv.eval_basis(x, 3).unwrap();
        let bern = [
            (1.0 - x).powi(3),
            3.0 * x * (1.0 - x).powi(2),
            3.0 * x * x * (1.0 - x),
            x.powi(3),
        ];
        for (a, e) in b.ders[0].iter().zip(bern) {
            assert!((a - e).abs() < 1e-15);
        }
        // Third derivatives of cubic Bernstein polynomials are -6, 18, -18, 6.
        for (a, e) in b.ders[3].iter().zip([-6.0, 18.0, -18.0, 6.0]) {
            assert!((a - e).abs() < 1e-12);
        }
    }

    #[test]
    fn endpoint_and_range() {
        let kv = KnotVector::uniform(4, 1, 2).unwrap();
        let b = kv.eval_basis(1.0, 0).unwrap();
        assert_eq!(b.first + 4, kv.dim() - 1);
        assert!((b.ders[0][4] - 1.0).abs() < 1e-15);
        assert!(kv.eval_basis(1.5, 0).is_err());
        assert!(kv.eval_basis(-0.1, 0).is_err());
    }

    #[test]
    fn high_derivative_is_zero() {
        let kv = KnotVector::uniform(2, 1, 1).unwrap();
        let b = kv.eval_basis(0.3, 4).unwrap();
        assert!(b.ders[3].iter().chain(&b.ders[4]).all(|&v| v == 0.0));
    }
}
