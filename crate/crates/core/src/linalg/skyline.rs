use crate::error::{Error, Result};

/// Symmetric matrix in variable-band (skyline) storage: row `i` keeps the
/// columns `first[i]..=i` of the lower triangle.
#[derive(Debug, Clone)]
pub struct SkylineMatrix {
    first: Vec<usize>,
    start: Vec<usize>,
    vals: Vec<f64>,
}

impl SkylineMatrix {
    /// Builds from sparse rows; only entries with `j <= i` are read.
    pub fn from_rows(rows: &[Vec<(usize, f64)>]) -> Self {
        let n = rows.len();
        let mut first = vec![0; n];
        for (i, row) in rows.iter().enumerate() {
            first[i] = row.iter().map(|&(j, _)| j).filter(|&j| j <= i).min().unwrap_or(i);
        }
        let mut start = vec![0; n + 1];
        for i in 0..n {
            start[i + 1] = start[i] + (i + 1 - first[i]);
        }
        let mut vals = vec![0.0; start[n]];
        for (i, row) in rows.iter().enumerate() {
            for &(j, v) in row {
                if j <= i {
                    vals[start[i] + j - first[i]] += v;
                }
            }
        }
        SkylineMatrix { first, start, vals }
    }

    pub fn n(&self) -> usize {
        self.first.len()
    }

    /// Number of stored entries.
    pub fn stored(&self) -> usize {
        self.vals.len()
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        let (i, j) = if j > i { (j, i) } else { (i, j) };
        if j < self.first[i] {
            0.0
        } else {
            self.vals[self.start[i] + j - self.first[i]]
        }
    }

    pub fn diagonal(&self) -> Vec<f64> {
        (0..self.n()).map(|i| self.vals[self.start[i + 1] - 1]).collect()
    }

    /// `D A D` for the diagonal matrix `D = diag(d)`.
    pub fn scale_symmetric(&mut self, d: &[f64]) {
        for i in 0..self.n() {
            let f = self.first[i];
            for (o, v) in self.vals[self.start[i]..self.start[i + 1]].iter_mut().enumerate() {
                *v *= d[i] * d[f + o];
            }
        }
    }

    pub fn mul_vec(&self, x: &[f64], y: &mut [f64]) {
        y.iter_mut().for_each(|v| *v = 0.0);
        for i in 0..self.n() {
            let f = self.first[i];
            let row = &self.vals[self.start[i]..self.start[i + 1]];
            let last = row.len() - 1;
            let mut s = row[last] * x[i];
            for (o, &a) in row[..last].iter().enumerate() {
                s += a * x[f + o];
                y[f + o] += a * x[i];
            }
            y[i] += s;
        }
    }

    /// In-place `L L^T` factorization; the profile is preserved.
    pub fn cholesky(mut self) -> Result<SkylineCholesky> {
        let n = self.n();
        for i in 0..n {
            let fi = self.first[i];
            let si = self.start[i];
            for j in fi..=i {
                let fj = self.first[j];
                let sj = self.start[j];
                let k0 = fi.max(fj);
                let mut s = self.vals[si + j - fi];
                let a = &self.vals[si + k0 - fi..si + j - fi];
                let b = &self.vals[sj + k0 - fj..sj + j - fj];
                s -= a.iter().zip(b).map(|(x, y)| x * y).sum::<f64>();
                if j < i {
                    s /= self.vals[self.start[j + 1] - 1];
                    self.vals[si + j - fi] = s;
                } else {
                    if !(s > 0.0) {
                        return Err(Error::NotPositiveDefinite(format!("pivot {s:.3e} at row {i}")));
                    }
                    self.vals[si + i - fi] = s.sqrt();
                }
            }
        }
        Ok(SkylineCholesky { l: self })
    }
}

#[derive(Debug, Clone)]
pub struct SkylineCholesky {
    l: SkylineMatrix,
}

impl SkylineCholesky {
    pub fn n(&self) -> usize {
        self.l.n()
    }

    pub fn solve_in_place(&self, x: &mut [f64]) {
        let l = &self.l;
        let n = l.n();
        for i in 0..n {
            let f = l.first[i];
            let row = &l.vals[l.start[i]..l.start[i + 1]];
            let last = row.len() - 1;
            let s: f64 = row[..last].iter().zip(&x[f..i]).map(|(a, b)| a * b).sum();
            x[i] = (x[i] - s) / row[last];
        }
        for i in (0..n).rev() {
            let f = l.first[i];
            let row = &l.vals[l.start[i]..l.start[i + 1]];
            let last = row.len() - 1;
            x[i] /= row[last];
            let xi = x[i];
            for (o, &a) in row[..last].iter().enumerate() {
                x[f + o] -= a * xi;
            }
        }
    }

    pub fn solve(&self, b: &[f64]) -> Vec<f64> {
        let mut x = b.to_vec();
        self.solve_in_place(&mut x);
        x
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use nalgebra::{DMatrix, DVector};

    fn test_matrix(n: usize) -> Vec<Vec<(usize, f64)>> {
        // Variable band: row i couples to i-1 and, for even i, to 0.
        let mut rows = vec![vec![]; n];
        for i in 0..n {
            rows[i].push((i, 4.0 + i as f64 * 0.1));
            if i > 0 {
                rows[i].push((i - 1, -1.0));
                rows[i - 1].push((i, -1.0));
            }
            if i > 1 && i % 2 == 0 {
                rows[i].push((0, 0.5));
                rows[0].push((i, 0.5));
            }
        }
        rows
    }

    fn dense(rows: &[Vec<(usize, f64)>]) -> DMatrix<f64> {
        let n = rows.len();
        let mut a = DMatrix::zeros(n, n);
        for (i, r) in rows.iter().enumerate() {
            for &(j, v) in r {
                a[(i, j)] += v;
            }
        }
        a
    }

    #[test]
    fn matches_dense_solve() {
        let rows = test_matrix(12);
        let a = dense(&rows);
        let sk = SkylineMatrix::from_rows(&rows);
        assert_eq!(sk.get(0, 6), 0.5);
        assert_eq!(sk.get(3, 5), 0.0);
        let b: Vec<f64> = (0..12).map(|i| (i as f64).sin()).collect();
        let mut y = vec![0.0; 12];
        sk.mul_vec(&b, &mut y);
        let yd = &a * DVector::from_vec(b.clone());
        for i in 0..12 {
            assert!((y[i] - yd[i]).abs() < 1e-13);
        }
        let x = sk.cholesky().unwrap().solve(&b);
        let r = &a * DVector::from_vec(x) - DVector::from_vec(b);
        assert!(r.amax() < 1e-13);
    }

    #[test]
    fn rejects_indefinite() {
        let rows = vec![vec![(0, 1.0), (1, 2.0)], vec![(0, 2.0), (1, 1.0)]];
        assert!(SkylineMatrix::from_rows(&rows).cholesky().is_err());
    }

    #[test]
    fn symmetric_scaling() {
        let rows = test_matrix(5);
        let mut sk = SkylineMatrix::from_rows(&rows);
        let d: Vec<f64> = sk.diagonal().iter().map(|x| 1.0 / x.sqrt()).collect();
        sk.scale_symmetric(&d);
        for x in sk.diagonal() {
            assert!((x - 1.0).abs() < 1e-15);
        }
    }
}
