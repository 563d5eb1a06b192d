use crate::error::{Error, Result};

/// Banded LU factorization without pivoting. Suitable for totally positive
/// matrices such as B-spline collocation matrices.
#[derive(Debug, Clone)]
pub struct BandedLu {
    n: usize,
    kl: usize,
    ku: usize,
    // Row-major band storage: entry (i, j) lives at i * w + (j + kl - i).
    band: Vec<f64>,
}

impl BandedLu {
    /// Builds from a closure giving entry `(i, j)` for `|i - j|` within the band.
    pub fn factor(n: usize, kl: usize, ku: usize, entry: impl Fn(usize, usize) -> f64) -> Result<Self> {
        let w = kl + ku + 1;
        let mut band = vec![0.0; n * w];
        for i in 0..n {
            let lo = i.saturating_sub(kl);
            let hi = (i + ku).min(n - 1);
            for j in lo..=hi {
                band[i * w + j + kl - i] = entry(i, j);
            }
        }
        let mut lu = BandedLu { n, kl, ku, band };
        lu.decompose()?;
        Ok(lu)
    }

    fn idx(&self, i: usize, j: usize) -> usize {
        i * (self.kl + self.ku + 1) + j + self.kl - i
    }

    fn decompose(&mut self) -> Result<()> {
        let n = self.n;
        let scale = self.band.iter().fold(0.0f64, |m, v| m.max(v.abs()));
        for k in 0..n {
            let piv = self.band[self.idx(k, k)];
            if piv.abs() <= 1e-14 * scale.max(f64::MIN_POSITIVE) {
                return Err(Error::Singular(format!("zero pivot in row {k}")));
            }
            let imax = (k + self.kl).min(n - 1);
            let jmax = (k + self.ku).min(n - 1);
            for i in k + 1..=imax {
                let ik = self.idx(i, k);
                let l = self.band[ik] / piv;
                self.band[ik] = l;
                if l == 0.0 {
                    continue;
                }
                for j in k + 1..=jmax {
                    let kj = self.band[self.idx(k, j)];
                    let ij = self.idx(i, j);
                    self.band[ij] -= l * kj;
                }
            }
        }
        Ok(())
    }

    pub fn solve(&self, b: &[f64]) -> Vec<f64> {
        let n = self.n;
        let mut x = b.to_vec();
        for i in 0..n {
            let lo = i.saturating_sub(self.kl);
            let mut s = x[i];
            for j in lo..i {
                s -= self.band[self.idx(i, j)] * x[j];
            }
            x[i] = s;
        }
        for i in (0..n).rev() {
            let hi = (i + self.ku).min(n - 1);
            let mut s = x[i];
            for j in i + 1..=hi {
                s -= self.band[self.idx(i, j)] * x[j];
            }
            x[i] = s / self.band[self.idx(i, i)];
        }
        x
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn tridiagonal() {
        let n = 6;
        let lu = BandedLu::factor(n, 1, 1, |i, j| if i == j { 4.0 } else { 1.0 }).unwrap();
        let x_true: Vec<f64> = (0..n).map(|i| i as f64 - 2.0).collect();
        let b: Vec<f64> = (0..n)
            .map(|i| {
                let mut s = 4.0 * x_true[i];
                if i > 0 {
                    s += x_true[i - 1];
                }
                if i + 1 < n {
                    s += x_true[i + 1];
                }
                s
            })
            .collect();
        let x = lu.solve(&b);
        for (a, e) in x.iter().zip(&x_true) {
            assert!((a - e).abs() < 1e-13);
        }
    }

    #[test]
    fn singular() {
        assert!(BandedLu::factor(3, 1, 1, |i, j| if i == j && i == 1 { 0.0 } else if i == j { 1.0 } else { 0.0 }).is_err());
    }
}
