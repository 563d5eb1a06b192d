use super::quadrature::gauss_legendre;
use super::space::{side_index, GlobalBasis};
use crate::bspline::KnotVector;
use crate::error::{Error, Result};
use crate::geometry::{PatchSide, TensorPatch, TwoPatchGeometry};
use crate::linalg::{lanczos_max, SkylineCholesky, SkylineMatrix};
use nalgebra::{DMatrix, SymmetricEigen};

/// Integration measure on a patch.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Weight {
    /// `|det J|` of the geometry mapping: integrals over the physical domain.
    #[default]
    Jacobian,
    /// Plain parameter-domain integrals.
    Unit,
}

/// Gauss points of one patch with the univariate basis tables and the
/// geometry sampled at every point.
#[derive(Debug, Clone)]
pub struct PatchQuadrature {
    n: usize,
    p: usize,
    q: usize,
    ncell: usize,
    nodes: Vec<f64>,
    first: Vec<usize>,
    vals: Vec<Vec<f64>>,
    /// Per point `(a, b)` at index `a * m + b`: parameters, image and weight.
    pub uv: Vec<(f64, f64)>,
    pub x: Vec<[f64; 2]>,
    pub w: Vec<f64>,
}

impl PatchQuadrature {
    /// `q` points per cell and direction on the cells of `space`. The
    /// geometry breakpoints must be among those of `space`.
    pub fn new(space: &KnotVector, patch: &TensorPatch, q: usize, weight: Weight) -> Result<Self> {
        let cells = space.cells();
        for t in patch.space.u.interior_knots().iter().chain(&patch.space.v.interior_knots()) {
            if !space.interior_knots().contains(t) {
                return Err(Error::InvalidGeometry(format!(
                    "geometry breakpoint {t} is not a breakpoint of the function space"
                )));
            }
        }
        let (gx, gw) = gauss_legendre(q);
        let mut nodes = Vec::new();
        let mut w1 = Vec::new();
        let mut first = Vec::new();
        let mut vals = Vec::new();
        for &(a, b) in &cells {
            for (x, w) in gx.iter().zip(&gw) {
                let t = a + (b - a) * x;
                nodes.push(t);
                w1.push((b - a) * w);
                let bv = space.eval_basis(t, 0)?;
                first.push(bv.first);
                vals.push(bv.ders[0].clone());
            }
        }
        let m = nodes.len();
        let mut uv = Vec::with_capacity(m * m);
        let mut x = Vec::with_capacity(m * m);
        let mut w = Vec::with_capacity(m * m);
        for a in 0..m {
            for b in 0..m {
                let (u, v) = (nodes[a], nodes[b]);
                let jet = patch.jet2(u, v);
                let jac = match weight {
                    Weight::Jacobian => jet.det_j().abs(),
                    Weight::Unit => 1.0,
                };
                uv.push((u, v));
                x.push(jet.value());
                w.push(w1[a] * w1[b] * jac);
            }
        }
        Ok(PatchQuadrature { n: space.dim(), p: space.degree(), q, ncell: cells.len(), nodes, first, vals, uv, x, w })
    }

    fn m(&self) -> usize {
        self.nodes.len()
    }

    /// Weighted Gram matrix of the tensor B-splines, by sum factorization.
    pub fn gram(&self) -> StencilMatrix {
        let (p, q, m) = (self.p, self.q, self.m());
        let mut g = StencilMatrix::new(self.n, p);
        let np = p + 1;
        let mut t = vec![0.0; q * np * np];
        for cu in 0..self.ncell {
            for cv in 0..self.ncell {
                t.iter_mut().for_each(|x| *x = 0.0);
                for qu in 0..q {
                    let a = cu * q + qu;
                    for qv in 0..q {
                        let b = cv * q + qv;
                        let w = self.w[a * m + b];
                        let bv = &self.vals[b];
                        for j in 0..np {
                            let wj = w * bv[j];
                            for jj in 0..np {
                                t[(qu * np + j) * np + jj] += wj * bv[jj];
                            }
                        }
                    }
                }
                let fu = self.first[cu * q];
                let fv = self.first[cv * q];
                for qu in 0..q {
                    let bu = &self.vals[cu * q + qu];
                    for i in 0..np {
                        for ii in 0..np {
                            let s = bu[i] * bu[ii];
                            for j in 0..np {
                                let row = &t[(qu * np + j) * np..(qu * np + j + 1) * np];
                                for jj in 0..np {
                                    g.add(fu + i, fv + j, fu + ii, fv + jj, s * row[jj]);
                                }
                            }
                        }
                    }
                }
            }
        }
        g
    }

    /// `int N_I f` for all tensor B-splines, given `f` at the points.
    pub fn moments(&self, f: &[f64]) -> Vec<f64> {
        let (p, m) = (self.p, self.m());
        let mut out = vec![0.0; self.n * self.n];
        for a in 0..m {
            for b in 0..m {
                let k = a * m + b;
                let s = f[k] * self.w[k];
                if s == 0.0 {
                    continue;
                }
                let (fu, fv) = (self.first[a], self.first[b]);
                for i in 0..=p {
                    let si = s * self.vals[a][i];
                    for j in 0..=p {
                        out[(fu + i) * self.n + fv + j] += si * self.vals[b][j];
                    }
                }
            }
        }
        out
    }

    /// Values of the tensor spline with coefficients `c` at the points.
    pub fn eval_tensor(&self, c: &[f64]) -> Vec<f64> {
        let (p, m) = (self.p, self.m());
        let mut out = vec![0.0; m * m];
        for a in 0..m {
            for b in 0..m {
                let (fu, fv) = (self.first[a], self.first[b]);
                let mut s = 0.0;
                for i in 0..=p {
                    let mut r = 0.0;
                    for j in 0..=p {
                        r += c[(fu + i) * self.n + fv + j] * self.vals[b][j];
                    }
                    s += r * self.vals[a][i];
                }
                out[a * m + b] = s;
            }
        }
        out
    }

    /// Sum of `w * f` over the points.
    pub fn integrate(&self, f: &[f64]) -> f64 {
        f.iter().zip(&self.w).map(|(a, b)| a * b).sum()
    }
}

/// Sparse matrix over tensor B-spline pairs whose supports overlap:
/// entry `((i, j), (i + di, j + dj))` with `|di|, |dj| <= p`.
#[derive(Debug, Clone)]
pub struct StencilMatrix {
    n: usize,
    p: usize,
    vals: Vec<f64>,
}

impl StencilMatrix {
    pub fn new(n: usize, p: usize) -> Self {
        let s = 2 * p + 1;
        StencilMatrix { n, p, vals: vec![0.0; n * n * s * s] }
    }

    fn idx(&self, i: usize, j: usize, ii: usize, jj: usize) -> usize {
        let s = 2 * self.p + 1;
        ((i * self.n + j) * s + (ii + self.p - i)) * s + (jj + self.p - j)
    }

    fn add(&mut self, i: usize, j: usize, ii: usize, jj: usize, v: f64) {
        let k = self.idx(i, j, ii, jj);
        self.vals[k] += v;
    }

    pub fn get(&self, i: usize, j: usize, ii: usize, jj: usize) -> f64 {
        if i.abs_diff(ii) > self.p || j.abs_diff(jj) > self.p {
            return 0.0;
        }
        self.vals[self.idx(i, j, ii, jj)]
    }

    /// Adds `c * G e_I` into `y`, recording newly touched entries.
    fn axpy_column(&self, flat: usize, c: f64, y: &mut [f64], touched: &mut Vec<usize>) {
        let (n, p) = (self.n, self.p);
        let (i, j) = (flat / n, flat % n);
        let s = 2 * p + 1;
        let base = flat * s * s;
        for ii in i.saturating_sub(p)..(i + p + 1).min(n) {
            for jj in j.saturating_sub(p)..(j + p + 1).min(n) {
                let v = self.vals[base + (ii + p - i) * s + (jj + p - j)];
                if v == 0.0 {
                    continue;
                }
                let k = ii * n + jj;
                if y[k] == 0.0 {
                    touched.push(k);
                }
                y[k] += c * v;
            }
        }
    }
}

/// Quadrature points per cell and direction: exact for the mass matrix of a
/// polynomial geometry.
pub fn default_points(space: &KnotVector, geometry: &TwoPatchGeometry) -> usize {
    space.degree() + geometry.degree().max(1)
}

/// Per-patch quadrature for a basis on a geometry.
pub fn patch_quadratures(
    geometry: &TwoPatchGeometry,
    space: &KnotVector,
    q: usize,
    weight: Weight,
) -> Result<[PatchQuadrature; 2]> {
    Ok([
        PatchQuadrature::new(space, &geometry.left, q, weight)?,
        PatchQuadrature::new(space, &geometry.right, q, weight)?,
    ])
}

/// Lower-triangular sparse rows of the mass matrix of a global basis.
pub fn mass_rows(basis: &GlobalBasis, quads: &[PatchQuadrature; 2]) -> Vec<Vec<(usize, f64)>> {
    let n = basis.space.dim();
    let nn = n * n;
    let size = basis.len();
    let grams = [quads[0].gram(), quads[1].gram()];
    let mut incidence: [Vec<Vec<(usize, f64)>>; 2] = [vec![vec![]; nn], vec![vec![]; nn]];
    for (a, f) in basis.functions.iter().enumerate() {
        for s in 0..2 {
            for &(i, c) in &f.parts[s] {
                incidence[s][i].push((a, c));
            }
        }
    }
    let mut rows = vec![Vec::new(); size];
    let mut y = vec![0.0; nn];
    let mut touched = Vec::new();
    let mut acc = vec![0.0; size];
    let mut hit = vec![false; size];
    let mut cols = Vec::new();
    for (a, f) in basis.functions.iter().enumerate() {
        for s in 0..2 {
            for &(i, c) in &f.parts[s] {
                grams[s].axpy_column(i, c, &mut y, &mut touched);
            }
            for &k in &touched {
                let yk = y[k];
                for &(b, c) in &incidence[s][k] {
                    if b <= a {
                        if !hit[b] {
                            hit[b] = true;
                            cols.push(b);
                        }
                        acc[b] += yk * c;
                    }
                }
                y[k] = 0.0;
            }
            touched.clear();
        }
        cols.sort_unstable();
        rows[a] = cols.iter().map(|&b| (b, acc[b])).filter(|&(_, v)| v != 0.0).collect();
        for &b in &cols {
            acc[b] = 0.0;
            hit[b] = false;
        }
        cols.clear();
    }
    rows
}

/// Load vector `int f phi_a` where `f` is given at the quadrature points of each patch.
pub fn load_vector(basis: &GlobalBasis, quads: &[PatchQuadrature; 2], values: &[Vec<f64>; 2]) -> Vec<f64> {
    let moments = [quads[0].moments(&values[0]), quads[1].moments(&values[1])];
    basis
        .functions
        .iter()
        .map(|f| (0..2).map(|s| f.parts[s].iter().map(|&(i, c)| c * moments[s][i]).sum::<f64>()).sum())
        .collect()
}

/// The diagonally scaled matrix `S = D^{-1/2} M D^{-1/2}` with its factorization.
pub struct ScaledSystem {
    pub s: SkylineMatrix,
    pub chol: SkylineCholesky,
    /// `D^{-1/2}`.
    pub dinv: Vec<f64>,
}

/// Largest size for which condition numbers use a dense eigensolver.
pub const DENSE_EIGEN_MAX: usize = 600;

impl ScaledSystem {
    pub fn new(rows: &[Vec<(usize, f64)>]) -> Result<Self> {
        let mut s = SkylineMatrix::from_rows(rows);
        let diag = s.diagonal();
        if let Some(i) = diag.iter().position(|&d| !(d > 0.0)) {
            return Err(Error::NotPositiveDefinite(format!("diagonal entry {i} is {}", diag[i])));
        }
        let dinv: Vec<f64> = diag.iter().map(|d| 1.0 / d.sqrt()).collect();
        s.scale_symmetric(&dinv);
        let chol = s.clone().cholesky()?;
        Ok(ScaledSystem { s, chol, dinv })
    }

    /// Solves `M x = f`.
    pub fn solve(&self, f: &[f64]) -> Vec<f64> {
        let mut y: Vec<f64> = f.iter().zip(&self.dinv).map(|(a, d)| a * d).collect();
        self.chol.solve_in_place(&mut y);
        y.iter().zip(&self.dinv).map(|(a, d)| a * d).collect()
    }

    /// Spectral condition number of `S`.
    pub fn condition_number(&self) -> f64 {
        let n = self.s.n();
        if n <= DENSE_EIGEN_MAX {
            let dense = DMatrix::from_fn(n, n, |i, j| self.s.get(i, j));
            let ev = SymmetricEigen::new(dense).eigenvalues;
            let max = ev.iter().cloned().fold(f64::MIN, f64::max);
            let min = ev.iter().cloned().fold(f64::MAX, f64::min);
            return max / min;
        }
        let lmax = lanczos_max(n, |x, y| self.s.mul_vec(x, y), 400, 1e-10);
        let inv_max = lanczos_max(
            n,
            |x, y| {
                y.copy_from_slice(x);
                self.chol.solve_in_place(y);
            },
            400,
            1e-10,
        );
        lmax * inv_max
    }
}

/// `kappa(D^{-1/2} M D^{-1/2})` of a symmetric positive definite matrix.
pub fn scaled_condition_number(rows: &[Vec<(usize, f64)>]) -> Result<f64> {
    Ok(ScaledSystem::new(rows)?.condition_number())
}

/// Values of `sum_a b[a] phi_a` at the quadrature points of each patch.
pub fn eval_at_points(basis: &GlobalBasis, quads: &[PatchQuadrature; 2], b: &[f64]) -> [Vec<f64>; 2] {
    let l = quads[0].eval_tensor(&basis.patch_coefficients(b, PatchSide::L));
    let r = quads[1].eval_tensor(&basis.patch_coefficients(b, PatchSide::R));
    [l, r]
}

pub(crate) fn quad(quads: &[PatchQuadrature; 2], side: PatchSide) -> &PatchQuadrature {
    &quads[side_index(side)]
}

#[cfg(test)]
mod tests {
    use super::*;

    fn unit_square() -> TensorPatch {
        TensorPatch::bilinear([[[0.0, 0.0], [0.0, 1.0]], [[1.0, 0.0], [1.0, 1.0]]])
    }

    #[test]
    fn identity_gram_is_tensor_of_1d_grams() {
        let kv = KnotVector::uniform(3, 1, 2).unwrap();
        let patch = unit_square();
        let pq = PatchQuadrature::new(&kv, &patch, 4, Weight::Jacobian).unwrap();
        let g = pq.gram();
        let g1 = |i: usize, j: usize| {
            let (x, w) = gauss_legendre(20);
            kv.cells()
                .iter()
                .map(|&(a, b)| {
                    x.iter()
                        .zip(&w)
                        .map(|(t, wt)| {
                            let s = a + (b - a) * t;
                            let e = kv.eval_all(s, 0).unwrap();
                            (b - a) * wt * e[i] * e[j]
                        })
                        .sum::<f64>()
                })
                .sum::<f64>()
        };
        let n = kv.dim();
        for (i, j, ii, jj) in [(0, 0, 0, 0), (2, 3, 4, 1), (5, 5, 2, 6), (1, 0, 1, 0)] {
            let exp = g1(i, ii) * g1(j, jj);
            assert!((g.get(i, j, ii, jj) - exp).abs() < 1e-14, "{i} {j} {ii} {jj}");
        }
        // Row sums integrate the basis functions.
        let ones = vec![1.0; (pq.nodes.len()).pow(2)];
        let mom = pq.moments(&ones);
        for i in 0..n {
            for j in 0..n {
                let mut s = 0.0;
                for ii in 0..n {
                    for jj in 0..n {
                        s += g.get(i, j, ii, jj);
                    }
                }
                assert!((s - mom[i * n + j]).abs() < 1e-14);
            }
        }
    }

    #[test]
    fn condition_number_of_scaled_diagonal() {
        let rows = vec![vec![(0, 1.0)], vec![(1, 1e6)]];
        assert!((scaled_condition_number(&rows).unwrap() - 1.0).abs() < 1e-12);
        let bad = vec![vec![(0, 1.0)], vec![(1, 0.0)]];
        assert!(scaled_condition_number(&bad).is_err());
    }

    #[test]
    fn lanczos_matches_dense() {
        // A tridiagonal SPD matrix larger than the dense threshold.
        let n = DENSE_EIGEN_MAX + 50;
        let rows: Vec<Vec<(usize, f64)>> = (0..n)
            .map(|i| {
                let mut r = vec![(i, 2.0 + (i % 7) as f64)];
                if i > 0 {
                    r.insert(0, (i - 1, -1.0));
                }
                r
            })
            .collect();
        let sys = ScaledSystem::new(&rows).unwrap();
        let k = sys.condition_number();
        let dense = DMatrix::from_fn(n, n, |i, j| sys.s.get(i, j));
        let ev = SymmetricEigen::new(dense).eigenvalues;
        let exact = ev.max() / ev.min();
        assert!((k - exact).abs() < 1e-5 * exact, "{k} vs {exact}");
    }
}
