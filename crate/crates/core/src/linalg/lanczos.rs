use nalgebra::{DMatrix, SymmetricEigen};

/// Largest eigenvalue of a symmetric positive semidefinite operator by
/// Lanczos iteration with full reorthogonalization.
///
/// Stops when the residual bound of the largest Ritz value falls below
/// `tol` times the estimate.
pub fn lanczos_max(n: usize, mut op: impl FnMut(&[f64], &mut [f64]), max_iter: usize, tol: f64) -> f64 {
    if n == 0 {
        return 0.0;
    }
    // Fixed start vector keeps results reproducible.
    let mut q: Vec<f64> = (0..n).map(|i| 1.0 + 0.5 * ((i as f64) * 0.7548776662).sin()).collect();
    normalize(&mut q);
    let mut basis: Vec<Vec<f64>> = vec![q];
    let mut alpha = Vec::new();
    let mut beta: Vec<f64> = Vec::new();
    let mut w = vec![0.0; n];
    let mut prev = f64::NAN;
    let m = max_iter.min(n);
    for it in 0..m {
        op(&basis[it], &mut w);
        let a = dot(&w, &basis[it]);
        alpha.push(a);
        // Full reorthogonalization, applied twice for stability.
        for _ in 0..2 {
            for b in &basis {
                let c = dot(&w, b);
                w.iter_mut().zip(b).for_each(|(x, y)| *x -= c * y);
            }
        }
        let bnext = dot(&w, &w).sqrt();
        let breakdown = bnext <= 1e-14 * alpha.iter().fold(0.0f64, |a, b| a.max(b.abs()));
        if it % 4 == 3 || it + 1 == m || breakdown {
            let (theta, resid) = ritz_max(&alpha, &beta, bnext);
            prev = theta;
            if it + 1 == m || breakdown || resid <= tol * theta.abs() {
                return theta;
            }
        }
        beta.push(bnext);
        let next: Vec<f64> = w.iter().map(|x| x / bnext).collect();
        basis.push(next);
    }
    prev
}

/// Largest eigenvalue of the tridiagonal Lanczos matrix and its residual bound.
fn ritz_max(alpha: &[f64], beta: &[f64], bnext: f64) -> (f64, f64) {
    let m = alpha.len();
    let t = DMatrix::from_fn(m, m, |i, j| {
        if i == j {
            alpha[i]
        } else if i + 1 == j {
            beta[i]
        } else if j + 1 == i {
            beta[j]
        } else {
            0.0
        }
    });
    let eig = SymmetricEigen::new(t);
    let (k, &theta) = eig
        .eigenvalues
        .iter()
        .enumerate()
        .max_by(|a, b| a.1.partial_cmp(b.1).unwrap())
        .unwrap();
    let last = eig.eigenvectors[(m - 1, k)];
    (theta, (bnext * last).abs())
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

fn normalize(x: &mut [f64]) {
    let s = dot(x, x).sqrt();
    x.iter_mut().for_each(|v| *v /= s);
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn diagonal_operator() {
        let d: Vec<f64> = (1..=200).map(|i| i as f64).collect();
        let lmax = lanczos_max(200, |x, y| y.iter_mut().zip(x).zip(&d).for_each(|((y, x), d)| *y = d * x), 300, 1e-12);
        assert!((lmax - 200.0).abs() < 1e-8);
    }

    #[test]
    fn laplacian_extremes() {
        // 1D Dirichlet Laplacian: eigenvalues 2 - 2 cos(k pi / (n + 1)).
        let n = 100;
        let op = |x: &[f64], y: &mut [f64]| {
            for i in 0..n {
                let mut s = 2.0 * x[i];
                if i > 0 {
                    s -= x[i - 1];
                }
                if i + 1 < n {
                    s -= x[i + 1];
                }
                y[i] = s;
            }
        };
        let exact = 2.0 - 2.0 * (n as f64 * std::f64::consts::PI / (n as f64 + 1.0)).cos();
        let l = lanczos_max(n, op, 200, 1e-12);
        assert!((l - exact).abs() < 1e-9 * exact);
    }
}
