use crate::error::{Error, Result};

/// Two knots closer than this are the same knot. Dyadic knots compare
/// exactly anyway; the tolerance only matters for user-supplied values.
pub const KNOT_TOL: f64 = 1e-12;

/// Open knot vector on [0,1] with end multiplicity `degree + 1`.
#[derive(Debug, Clone, PartialEq)]
pub struct KnotVector {
    degree: usize,
    knots: Vec<f64>,
}

impl KnotVector {
    /// Validates a full knot sequence.
    pub fn new(degree: usize, knots: Vec<f64>) -> Result<Self> {
        if degree == 0 {
            return Err(Error::InvalidKnots("degree must be at least 1".into()));
        }
        let p = degree;
        if knots.len() < 2 * (p + 1) {
            return Err(Error::InvalidKnots(format!(
                "need at least {} knots for degree {p}, got {}",
                2 * (p + 1),
                knots.len()
            )));
        }
        if knots.windows(2).any(|w| w[1] < w[0] || w[0].is_nan()) {
            return Err(Error::InvalidKnots("knots must be nondecreasing".into()));
        }
        let m = knots.len();
        if knots[..=p].iter().any(|&t| t != 0.0) || knots[m - p - 1..].iter().any(|&t| t != 1.0) {
            return Err(Error::InvalidKnots(
                "first and last p+1 knots must equal 0 and 1".into(),
            ));
        }
        let kv = KnotVector { degree, knots };
        for (t, mult) in kv.interior() {
            if !(t > 0.0 && t < 1.0) {
                return Err(Error::InvalidKnots(format!(
                    "interior knot {t} is not in (0,1) or end multiplicity exceeds p+1"
                )));
            }
            if mult > p {
                return Err(Error::InvalidKnots(format!(
                    "interior knot {t} has multiplicity {mult} > p = {p}"
                )));
            }
        }
        Ok(kv)
    }

    /// Knot vector with the given distinct interior knots and multiplicities.
    pub fn with_multiplicities(degree: usize, interior: &[(f64, usize)]) -> Result<Self> {
        let mut prev = 0.0;
        for &(t, _) in interior {
            if !(t > prev && t < 1.0) {
                return Err(Error::InvalidKnots(format!(
                    "interior knots must be strictly increasing in (0,1), got {t} after {prev}"
                )));
            }
            prev = t;
        }
        let mut knots = vec![0.0; degree + 1];
        for &(t, mult) in interior {
            if mult == 0 {
                return Err(Error::InvalidKnots(format!("knot {t} has multiplicity 0")));
            }
            knots.extend(std::iter::repeat_n(t, mult));
        }
        knots.extend(std::iter::repeat_n(1.0, degree + 1));
        KnotVector::new(degree, knots)
    }

    /// The knot vector `T_k^{p,r}`: every interior knot has multiplicity `p - r`.
    pub fn regular(p: usize, r: usize, inner: &[f64]) -> Result<Self> {
        if p == 0 || r >= p {
            return Err(Error::InvalidKnots(format!(
                "regularity r = {r} must satisfy 0 <= r <= p - 1 for p = {p}"
            )));
        }
        let interior: Vec<(f64, usize)> = inner.iter().map(|&t| (t, p - r)).collect();
        KnotVector::with_multiplicities(p, &interior)
    }

    /// `T_k^{p,r}` with the uniform interior knots `i / (k + 1)`.
    pub fn uniform(p: usize, r: usize, k: usize) -> Result<Self> {
        KnotVector::regular(p, r, &uniform_knots(k))
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn knots(&self) -> &[f64] {
        &self.knots
    }

    /// Number of B-splines.
    pub fn dim(&self) -> usize {
        self.knots.len() - self.degree - 1
    }

    /// Distinct interior knots with their multiplicities, in increasing order.
    pub fn interior(&self) -> Vec<(f64, usize)> {
        let p = self.degree;
        let inner = &self.knots[p + 1..self.knots.len() - p - 1];
        let mut out: Vec<(f64, usize)> = Vec::new();
        for &t in inner {
            match out.last_mut() {
                Some((s, m)) if (t - *s).abs() <= KNOT_TOL => *m += 1,
                _ => out.push((t, 1)),
            }
        }
        out
    }

    pub fn interior_knots(&self) -> Vec<f64> {
        self.interior().into_iter().map(|(t, _)| t).collect()
    }

    /// First knot strictly after 0, which is 1 when there are no interior knots.
    pub fn first_positive_knot(&self) -> f64 {
        self.knots[self.degree + 1]
    }

    /// Raises the multiplicity of the `which`-th distinct interior knot
    /// (1-based) by `times`.
    pub fn elevate(&self, which: usize, times: usize) -> Result<Self> {
        let mut interior = self.interior();
        if which == 0 || which > interior.len() {
            return Err(Error::OutOfRange(format!(
                "interior knot index {which} outside 1..={}",
                interior.len()
            )));
        }
        let entry = &mut interior[which - 1];
        if entry.1 + times > self.degree {
            return Err(Error::InvalidKnots(format!(
                "raising knot {} to multiplicity {} exceeds degree {}",
                entry.0,
                entry.1 + times,
                self.degree
            )));
        }
        entry.1 += times;
        KnotVector::with_multiplicities(self.degree, &interior)
    }

    /// Same breakpoints, new degree and uniform regularity.
    pub fn with_degree_regularity(&self, p: usize, r: usize) -> Result<Self> {
        KnotVector::regular(p, r, &self.interior_knots())
    }

    /// Index of the knot span used for evaluation at `x`: right limits in the
    /// interior, the last nonempty span at `x = 1`.
    pub fn span(&self, x: f64) -> usize {
        let p = self.degree;
        let n = self.dim();
        if x >= self.knots[n] {
            return n - 1;
        }
        // Largest mu with t_mu <= x.
        let idx = self.knots[..=n].partition_point(|&t| t <= x);
        (idx - 1).max(p)
    }

    /// Span index for left limits: `t_mu < x <= t_{mu+1}`, first span at `x = 0`.
    pub fn span_left(&self, x: f64) -> usize {
        let p = self.degree;
        let n = self.dim();
        if x <= self.knots[p] {
            return p;
        }
        let idx = self.knots[..=n].partition_point(|&t| t < x);
        (idx - 1).clamp(p, n - 1)
    }

    /// Greville abscissae `(t_{i+1} + ... + t_{i+p}) / p`.
    pub fn greville(&self) -> Vec<f64> {
        let p = self.degree;
        (0..self.dim())
            .map(|i| self.knots[i + 1..=i + p].iter().sum::<f64>() / p as f64)
            .collect()
    }

    /// Nonempty knot spans `[a, b]`.
    pub fn cells(&self) -> Vec<(f64, f64)> {
        let mut bps = vec![0.0];
        bps.extend(self.interior_knots());
        bps.push(1.0);
        bps.windows(2).map(|w| (w[0], w[1])).collect()
    }
}

pub fn uniform_knots(k: usize) -> Vec<f64> {
    (1..=k).map(|i| i as f64 / (k + 1) as f64).collect()
}

/// Dimension of `S(T_k^{p,r})`, signed so that degenerate budgets show up as
/// non-positive values instead of underflow.
pub fn regular_dim(p: i64, r: i64, k: i64) -> i64 {
    p + 1 + k * (p - r)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn example_knot_vector() {
        let kv = KnotVector::regular(5, 2, &[0.25, 0.5, 0.75]).unwrap();
        let expected: Vec<f64> = [
            vec![0.0; 6],
            vec![0.25; 3],
            vec![0.5; 3],
            vec![0.75; 3],
            vec![1.0; 6],
        ]
        .concat();
        assert_eq!(kv.knots(), expected.as_slice());
        assert_eq!(kv.knots().len(), 21);
        assert_eq!(kv.dim(), 15);
        assert_eq!(kv, KnotVector::uniform(5, 2, 3).unwrap());
    }

    #[test]
    fn polynomial_and_small_cases() {
        let kv = KnotVector::uniform(5, 2, 0).unwrap();
        assert_eq!(kv.dim(), 6);
        assert_eq!(kv.first_positive_knot(), 1.0);
        let kv = KnotVector::regular(6, 3, &[0.5]).unwrap();
        assert_eq!(kv.interior(), vec![(0.5, 3)]);
        assert_eq!(kv.dim(), 10);
    }

    #[test]
    fn rejects_bad_input() {
        assert!(KnotVector::regular(5, 5, &[]).is_err());
        assert!(KnotVector::regular(5, 2, &[0.5, 0.25]).is_err());
        assert!(KnotVector::regular(5, 2, &[1.0]).is_err());
        assert!(KnotVector::new(2, vec![0.0, 0.0, 0.0, 0.5, 0.5, 0.5, 1.0, 1.0, 1.0]).is_err());
        assert!(KnotVector::new(2, vec![0.0, 0.0, 1.0, 1.0, 1.0, 1.0]).is_err());
    }

    #[test]
    fn elevation() {
        let kv = KnotVector::uniform(5, 2, 3).unwrap();
        let e = kv.elevate(1, 1).unwrap();
        assert_eq!(e.interior()[0], (0.25, 4));
        assert_eq!(e.dim(), kv.dim() + 1);
        let e2 = kv.elevate(2, 2).unwrap();
        assert_eq!(e2.interior()[1], (0.5, 5));
        assert_eq!(e2.dim(), kv.dim() + 2);
        assert!(kv.elevate(2, 3).is_err());
        assert!(kv.elevate(4, 1).is_err());

        let base = KnotVector::uniform(5, 4, 3).unwrap();
        let twice = base.elevate(1, 1).unwrap().elevate(3, 1).unwrap();
        let direct =
            KnotVector::with_multiplicities(5, &[(0.25, 2), (0.5, 1), (0.75, 2)]).unwrap();
        assert_eq!(twice, direct);
    }

    #[test]
    fn greville_values() {
        let g = KnotVector::uniform(5, 2, 0).unwrap().greville();
        for (i, x) in g.iter().enumerate() {
            assert!((x - i as f64 / 5.0).abs() < 1e-15);
        }
        let g = KnotVector::uniform(5, 2, 3).unwrap().greville();
        assert_eq!(g.len(), 15);
        assert_eq!(g[0], 0.0);
        assert!((g[1] - 0.05).abs() < 1e-15);
        assert!((g[2] - 0.1).abs() < 1e-15);
        assert!((g[3] - 0.15).abs() < 1e-15);
        assert_eq!(*g.last().unwrap(), 1.0);
        assert!(g.windows(2).all(|w| w[1] > w[0]));
    }

    #[test]
    fn spans() {
        let kv = KnotVector::uniform(3, 1, 1).unwrap();
        // knots: 0 0 0 0 .5 .5 1 1 1 1
        assert_eq!(kv.span(0.0), 3);
        assert_eq!(kv.span(0.5), 5);
        assert_eq!(kv.span(1.0), 5);
        assert_eq!(kv.span_left(0.5), 3);
        assert_eq!(kv.span_left(0.0), 3);
        assert_eq!(kv.span_left(1.0), 5);
    }
}
