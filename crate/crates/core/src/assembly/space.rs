use crate::bspline::KnotVector;
use crate::geometry::PatchSide;
use crate::smooth::{Family, SmoothBasis};

/// Where a global basis function comes from.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Origin {
    /// Tensor B-spline `(i, j)` with `i >= 3` on one patch.
    Interior(PatchSide, usize, usize),
    /// Interface function of the given family.
    Interface(Family, usize),
}

/// A C2 function given by sparse tensor coefficients on each patch.
#[derive(Debug, Clone)]
pub struct GlobalFn {
    pub origin: Origin,
    /// `(i * n + j, coefficient)` on the left and right patch.
    pub parts: [Vec<(usize, f64)>; 2],
}

/// The full smooth space: interior B-splines of both patches plus an
/// interface basis. Ordered left interior (outermost first), interface,
/// right interior, which keeps the mass matrix profile narrow.
#[derive(Debug, Clone)]
pub struct GlobalBasis {
    pub space: KnotVector,
    pub functions: Vec<GlobalFn>,
    pub n_interior: usize,
    pub n_interface: usize,
}

pub(crate) fn side_index(side: PatchSide) -> usize {
    match side {
        PatchSide::L => 0,
        PatchSide::R => 1,
    }
}

impl GlobalBasis {
    pub fn new(interface: &SmoothBasis) -> Self {
        let space = interface.base.clone();
        let n = space.dim();
        let mut functions = Vec::new();
        let interior = |side: PatchSide, i: usize, j: usize| {
            let mut parts = [vec![], vec![]];
            parts[side_index(side)].push((i * n + j, 1.0));
            GlobalFn { origin: Origin::Interior(side, i, j), parts }
        };
        for i in (3..n).rev() {
            for j in 0..n {
                functions.push(interior(PatchSide::L, i, j));
            }
        }
        for f in &interface.functions {
            let mut parts = [vec![], vec![]];
            for side in PatchSide::BOTH {
                let rows = f.rows(side);
                for (i, row) in rows.iter().enumerate() {
                    for (j, &c) in row.iter().enumerate() {
                        if c != 0.0 {
                            parts[side_index(side)].push((i * n + j, c));
                        }
                    }
                }
            }
            functions.push(GlobalFn { origin: Origin::Interface(f.family, f.j), parts });
        }
        for i in 3..n {
            for j in 0..n {
                functions.push(interior(PatchSide::R, i, j));
            }
        }
        GlobalBasis {
            space,
            n_interior: 2 * (n - 3) * n,
            n_interface: interface.len(),
            functions,
        }
    }

    pub fn len(&self) -> usize {
        self.functions.len()
    }

    pub fn is_empty(&self) -> bool {
        self.functions.is_empty()
    }

    /// Patch tensor coefficients of `sum_a b[a] * phi_a`.
    pub fn patch_coefficients(&self, b: &[f64], side: PatchSide) -> Vec<f64> {
        let n = self.space.dim();
        let mut c = vec![0.0; n * n];
        let s = side_index(side);
        for (f, &w) in self.functions.iter().zip(b) {
            for &(i, v) in &f.parts[s] {
                c[i] += w * v;
            }
        }
        c
    }
}
