use crate::bspline::KnotVector;

/// Gauss-Legendre nodes and weights on [0,1], by Newton iteration on the
/// Legendre polynomial.
pub fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    assert!(n >= 1, "need at least one point");
    let mut nodes = vec![0.0; n];
    let mut weights = vec![0.0; n];
    let m = n.div_ceil(2);
    for i in 0..m {
        let mut x = (std::f64::consts::PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (p, d) = legendre(n, x);
            dp = d;
            let dx = p / d;
            x -= dx;
            if dx.abs() < 1e-16 {
                break;
            }
        }
        let (_, d) = legendre(n, x);
        dp = if d != 0.0 { d } else { dp };
        let w = 2.0 / ((1.0 - x * x) * dp * dp);
        // Map from [-1,1] to [0,1]; x decreases with i.
        nodes[i] = 0.5 * (1.0 - x);
        nodes[n - 1 - i] = 0.5 * (1.0 + x);
        weights[i] = 0.5 * w;
        weights[n - 1 - i] = 0.5 * w;
    }
    (nodes, weights)
}

fn legendre(n: usize, x: f64) -> (f64, f64) {
    let (mut p0, mut p1) = (1.0, x);
    if n == 0 {
        return (1.0, 0.0);
    }
    for k in 2..=n {
        let p2 = ((2 * k - 1) as f64 * x * p1 - (k - 1) as f64 * p0) / k as f64;
        p0 = p1;
        p1 = p2;
    }
    let d = n as f64 * (x * p1 - p0) / (x * x - 1.0);
    (p1, d)
}

/// Gauss points mapped to every nonempty knot span.
#[derive(Debug, Clone)]
pub struct QuadratureRule {
    pub points_per_cell: usize,
    pub cells: Vec<(f64, f64)>,
    /// Flattened nodes, cell by cell.
    pub nodes: Vec<f64>,
    pub weights: Vec<f64>,
}

impl QuadratureRule {
    pub fn new(points_per_cell: usize, cells: &[(f64, f64)]) -> Self {
        let (x, w) = gauss_legendre(points_per_cell);
        let mut nodes = Vec::with_capacity(cells.len() * points_per_cell);
        let mut weights = Vec::with_capacity(cells.len() * points_per_cell);
        for &(a, b) in cells {
            for (xi, wi) in x.iter().zip(&w) {
                nodes.push(a + (b - a) * xi);
                weights.push((b - a) * wi);
            }
        }
        QuadratureRule { points_per_cell, cells: cells.to_vec(), nodes, weights }
    }

    pub fn for_knots(kv: &KnotVector, points_per_cell: usize) -> Self {
        Self::new(points_per_cell, &kv.cells())
    }

    pub fn integrate(&self, f: impl Fn(f64) -> f64) -> f64 {
        self.nodes.iter().zip(&self.weights).map(|(&x, &w)| w * f(x)).sum()
    }
}
