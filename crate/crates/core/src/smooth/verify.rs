use super::basis::{BasisFunction, Rows};
use crate::bspline::{KnotVector, TensorSplineSpace};
use crate::error::{Error, Result};
use crate::geometry::{PatchSide, TensorPatch, TwoPatchGeometry};
use serde::Serialize;

/// Largest one-sided disagreement of value, gradient and Hessian along the
/// interface, each relative to the largest magnitude of that quantity.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct C2Report {
    pub value: f64,
    pub gradient: f64,
    pub hessian: f64,
    pub worst_v: f64,
    pub pass: bool,
}

/// Physical value, gradient and Hessian of a function given by tensor
/// coefficients on one patch, at `(0, v)`.
fn physical_jet(patch: &TensorPatch, space: &TensorSplineSpace, c: &[f64], v: f64) -> Result<(f64, [f64; 2], [[f64; 2]; 2])> {
    let g = |du, dv| space.eval(c, 0.0, v, du, dv);
    let (g0, gu, gv, guu, guv, gvv) = (g(0, 0)?, g(1, 0)?, g(0, 1)?, g(2, 0)?, g(1, 1)?, g(0, 2)?);
    let j = patch.jet2(0.0, v);
    let (fu, fv) = (j.du(), j.dv());
    let det = fu[0] * fv[1] - fu[1] * fv[0];
    if det.abs() < 1e-14 * (fu[0].hypot(fu[1]) * fv[0].hypot(fv[1])).max(f64::MIN_POSITIVE) {
        return Err(Error::Singular(format!("singular Jacobian at v = {v}")));
    }
    // J = [[x_u, x_v], [y_u, y_v]]; inv(J) = [[y_v, -x_v], [-y_u, x_u]] / det.
    let inv = [[fv[1] / det, -fv[0] / det], [-fu[1] / det, fu[0] / det]];
    // grad phi = J^{-T} (g_u, g_v).
    let grad = [inv[0][0] * gu + inv[1][0] * gv, inv[0][1] * gu + inv[1][1] * gv];
    let (fuu, fuv, fvv) = (j.duu(), j.duv(), j.dvv());
    let mut h = [[guu, guv], [guv, gvv]];
    for k in 0..2 {
        h[0][0] -= grad[k] * fuu[k];
        h[0][1] -= grad[k] * fuv[k];
        h[1][0] -= grad[k] * fuv[k];
        h[1][1] -= grad[k] * fvv[k];
    }
    // H_phi = J^{-T} h J^{-1}.
    let mut out = [[0.0; 2]; 2];
    for a in 0..2 {
        for b in 0..2 {
            let mut s = 0.0;
            for p in 0..2 {
                for q in 0..2 {
                    s += inv[p][a] * h[p][q] * inv[q][b];
                }
            }
            out[a][b] = s;
        }
    }
    Ok((g0, grad, out))
}

/// Compares both one-sided jets of a function given by full tensor
/// coefficients on each patch at `n_samples` points of the interface.
pub fn verify_c2(
    f: &TwoPatchGeometry,
    space: &KnotVector,
    coeffs: [&[f64]; 2],
    n_samples: usize,
    tol: f64,
) -> Result<C2Report> {
    let ts = TensorSplineSpace::square(space.clone());
    let n = n_samples.max(2);
    let mut samples = Vec::with_capacity(n);
    let (mut s0, mut s1, mut s2) = (0.0f64, 0.0f64, 0.0f64);
    for i in 0..n {
        let v = i as f64 / (n - 1) as f64;
        let (a0, a1, a2) = physical_jet(&f.left, &ts, coeffs[0], v)?;
        let (b0, b1, b2) = physical_jet(&f.right, &ts, coeffs[1], v)?;
        let m = |x: [f64; 2]| x[0].abs().max(x[1].abs());
        let mh = |x: [[f64; 2]; 2]| m(x[0]).max(m(x[1]));
        s0 = s0.max(a0.abs()).max(b0.abs());
        s1 = s1.max(m(a1)).max(m(b1));
        s2 = s2.max(mh(a2)).max(mh(b2));
        let d0 = (a0 - b0).abs();
        let d1 = m([a1[0] - b1[0], a1[1] - b1[1]]);
        let d2 = mh([[a2[0][0] - b2[0][0], a2[0][1] - b2[0][1]], [a2[1][0] - b2[1][0], a2[1][1] - b2[1][1]]]);
        samples.push((v, d0, d1, d2));
    }
    let rel = |d: f64, s: f64| if s > 0.0 { d / s } else { d };
    let mut rep = C2Report { value: 0.0, gradient: 0.0, hessian: 0.0, worst_v: 0.0, pass: true };
    let mut worst = -1.0;
    for (v, d0, d1, d2) in samples {
        let (e0, e1, e2) = (rel(d0, s0), rel(d1, s1), rel(d2, s2));
        rep.value = rep.value.max(e0);
        rep.gradient = rep.gradient.max(e1);
        rep.hessian = rep.hessian.max(e2);
        let m = e0.max(e1).max(e2);
        if m > worst {
            worst = m;
            rep.worst_v = v;
        }
    }
    rep.pass = rep.value < tol && rep.gradient < tol && rep.hessian < tol;
    Ok(rep)
}

/// Full tensor coefficients of an interface function on one patch.
pub fn rows_to_tensor(rows: &Rows, n: usize) -> Vec<f64> {
    let mut c = vec![0.0; n * n];
    for (i, row) in rows.iter().enumerate() {
        c[i * n..i * n + n].copy_from_slice(row);
    }
    c
}

/// C2 check of an exported interface basis function.
pub fn verify_c2_at_interface(
    f: &TwoPatchGeometry,
    space: &KnotVector,
    func: &BasisFunction,
    n_samples: usize,
    tol: f64,
) -> Result<C2Report> {
    let n = space.dim();
    let l = rows_to_tensor(func.rows(PatchSide::L), n);
    let r = rows_to_tensor(func.rows(PatchSide::R), n);
    verify_c2(f, space, [&l, &r], n_samples, tol)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gluing::{gluing_from_bilinear, GluingInvariants};
    use crate::smooth::{build_basis_v2, SelectionRule};

    fn kite() -> TwoPatchGeometry {
        let l = TensorPatch::bilinear([[[0.0, 0.0], [0.2, 1.0]], [[-1.0, -0.1], [-0.9, 1.2]]]);
        let r = TensorPatch::bilinear([[[0.0, 0.0], [0.2, 1.0]], [[1.1, 0.1], [1.0, 1.1]]]);
        TwoPatchGeometry::new(l, r)
    }

    #[test]
    fn interface_basis_is_c2() {
        let f = kite();
        let g = gluing_from_bilinear(&f).unwrap();
        let base = KnotVector::uniform(5, 2, 1).unwrap();
        let inv = GluingInvariants::new(&g, &base, 2).unwrap();
        let b = build_basis_v2(&g, &inv, SelectionRule::First).unwrap();
        for func in &b.functions {
            let rep = verify_c2_at_interface(&f, &base, func, 50, 1e-8).unwrap();
            assert!(rep.pass, "{:?} {}: {rep:?}", func.family, func.j);
        }
    }

    #[test]
    fn one_sided_bspline_fails() {
        let f = kite();
        let base = KnotVector::uniform(5, 2, 0).unwrap();
        let n = base.dim();
        let mut l = vec![0.0; n * n];
        l[n + 2] = 1.0;
        let r = vec![0.0; n * n];
        let rep = verify_c2(&f, &base, [&l, &r], 50, 1e-8).unwrap();
        assert!(!rep.pass);
        assert!(rep.gradient > 0.1);
        // An interior function vanishes to second order at the interface.
        let mut l = vec![0.0; n * n];
        l[3 * n + 2] = 1.0;
        let rep = verify_c2(&f, &base, [&l, &r], 50, 1e-8).unwrap();
        assert!(rep.pass && rep.value == 0.0 && rep.hessian == 0.0);
    }
}
