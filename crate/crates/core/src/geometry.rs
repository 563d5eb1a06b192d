//! Two-patch planar geometries and their JSON form.

use crate::bspline::{refinement_matrix, KnotVector, TensorSplineSpace};
use crate::error::{Error, Result};
use crate::gluing::GluingData;
use serde::{Deserialize, Serialize};
use std::path::Path;

/// Derivatives of a planar map at a point, indexed `[du][dv]` for
/// `du + dv <= 2`.
#[derive(Debug, Clone, Copy, Default)]
pub struct Jet2 {
    pub d: [[[f64; 2]; 3]; 3],
}

impl Jet2 {
    pub fn value(&self) -> [f64; 2] {
        self.d[0][0]
    }
    pub fn du(&self) -> [f64; 2] {
        self.d[1][0]
    }
    pub fn dv(&self) -> [f64; 2] {
        self.d[0][1]
    }
    pub fn duu(&self) -> [f64; 2] {
        self.d[2][0]
    }
    pub fn duv(&self) -> [f64; 2] {
        self.d[1][1]
    }
    pub fn dvv(&self) -> [f64; 2] {
        self.d[0][2]
    }
    pub fn det_j(&self) -> f64 {
        let (a, b) = (self.du(), self.dv());
        a[0] * b[1] - a[1] * b[0]
    }
}

/// Tensor-product spline map `[0,1]^2 -> R^2`.
#[derive(Debug, Clone, PartialEq)]
pub struct TensorPatch {
    pub space: TensorSplineSpace,
    /// Control points, entry `(i, j)` at `i * n_v + j`.
    pub ctrl: Vec<[f64; 2]>,
}

impl TensorPatch {
    pub fn new(space: TensorSplineSpace, ctrl: Vec<[f64; 2]>) -> Result<Self> {
        if ctrl.len() != space.dim() {
            return Err(Error::InvalidGeometry(format!(
                "expected {} control points, got {}",
                space.dim(),
                ctrl.len()
            )));
        }
        Ok(TensorPatch { space, ctrl })
    }

    /// Bilinear patch through the corners `c[i][j] = F(i, j)`.
    pub fn bilinear(c: [[[f64; 2]; 2]; 2]) -> Self {
        let kv = KnotVector::uniform(1, 0, 0).expect("valid linear knot vector");
        TensorPatch {
            space: TensorSplineSpace::square(kv),
            ctrl: vec![c[0][0], c[0][1], c[1][0], c[1][1]],
        }
    }

    pub fn eval(&self, u: f64, v: f64) -> [f64; 2] {
        self.jet(u, v, 0)[0][0]
    }

    /// All derivatives `[du][dv]` with `du, dv <= order`.
    pub fn jet(&self, u: f64, v: f64, order: usize) -> Vec<Vec<[f64; 2]>> {
        let bu = self.space.u.eval_basis(u.clamp(0.0, 1.0), order).expect("clamped");
        let bv = self.space.v.eval_basis(v.clamp(0.0, 1.0), order).expect("clamped");
        let nv = self.space.v.dim();
        let mut out = vec![vec![[0.0; 2]; order + 1]; order + 1];
        for (du, row) in out.iter_mut().enumerate() {
            for (dv, cell) in row.iter_mut().enumerate() {
                let mut s = [0.0; 2];
                for (a, wu) in bu.ders[du].iter().enumerate() {
                    let base = (bu.first + a) * nv + bv.first;
                    let mut inner = [0.0; 2];
                    for (b, wv) in bv.ders[dv].iter().enumerate() {
                        let c = self.ctrl[base + b];
                        inner[0] += wv * c[0];
                        inner[1] += wv * c[1];
                    }
                    s[0] += wu * inner[0];
                    s[1] += wu * inner[1];
                }
                *cell = s;
            }
        }
        out
    }

    pub fn jet2(&self, u: f64, v: f64) -> Jet2 {
        let j = self.jet(u, v, 2);
        let mut out = Jet2::default();
        for du in 0..3 {
            for dv in 0..3 - du {
                out.d[du][dv] = j[du][dv];
            }
        }
        out
    }

    /// Exact representation in a refined tensor space by knot insertion.
    pub fn refine(&self, target: &KnotVector) -> Result<TensorPatch> {
        let tu = refinement_matrix(&self.space.u, target)?;
        let tv = refinement_matrix(&self.space.v, target)?;
        let (nu_old, nv_old) = (self.space.u.dim(), self.space.v.dim());
        let n = target.dim();
        // First along v for every old i, then along u.
        let mut tmp = vec![[0.0; 2]; nu_old * n];
        for i in 0..nu_old {
            for (jn, row) in tv.iter().enumerate() {
                let mut s = [0.0; 2];
                for (j, w) in row.iter().enumerate() {
                    if *w != 0.0 {
                        let c = self.ctrl[i * nv_old + j];
                        s[0] += w * c[0];
                        s[1] += w * c[1];
                    }
                }
                tmp[i * n + jn] = s;
            }
        }
        let mut ctrl = vec![[0.0; 2]; n * n];
        for (inew, row) in tu.iter().enumerate() {
            for jn in 0..n {
                let mut s = [0.0; 2];
                for (i, w) in row.iter().enumerate() {
                    if *w != 0.0 {
                        let c = tmp[i * n + jn];
                        s[0] += w * c[0];
                        s[1] += w * c[1];
                    }
                }
                ctrl[inew * n + jn] = s;
            }
        }
        TensorPatch::new(TensorSplineSpace::square(target.clone()), ctrl)
    }
}

/// Two patches sharing the edge `u = 0`, plus optional linear gluing data.
#[derive(Debug, Clone, PartialEq)]
pub struct TwoPatchGeometry {
    pub left: TensorPatch,
    pub right: TensorPatch,
    /// Nominal regularity `r` of the patch space. Only informative when
    /// there are no interior knots.
    pub regularity: usize,
    pub gluing: Option<GluingData>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PatchSide {
    L,
    R,
}

impl PatchSide {
    pub const BOTH: [PatchSide; 2] = [PatchSide::L, PatchSide::R];
}

impl TwoPatchGeometry {
    pub fn new(left: TensorPatch, right: TensorPatch) -> Self {
        let kv = &left.space.u;
        let p = kv.degree();
        let regularity = match kv.interior().first() {
            Some(&(_, m)) => p - m,
            None => p - 1,
        };
        TwoPatchGeometry { left, right, regularity, gluing: None }
    }

    pub fn degree(&self) -> usize {
        self.left.space.u.degree()
    }

    pub fn knot_vector(&self) -> &KnotVector {
        &self.left.space.u
    }

    pub fn patch(&self, side: PatchSide) -> &TensorPatch {
        match side {
            PatchSide::L => &self.left,
            PatchSide::R => &self.right,
        }
    }

    /// Diagonal of the control point bounding box.
    pub fn diameter(&self) -> f64 {
        let mut lo = [f64::INFINITY; 2];
        let mut hi = [f64::NEG_INFINITY; 2];
        for c in self.left.ctrl.iter().chain(&self.right.ctrl) {
            for d in 0..2 {
                lo[d] = lo[d].min(c[d]);
                hi[d] = hi[d].max(c[d]);
            }
        }
        ((hi[0] - lo[0]).powi(2) + (hi[1] - lo[1]).powi(2)).sqrt()
    }

    /// Interface mismatch and regularity checks on a sample grid.
    pub fn validate(&self) -> Result<()> {
        let diam = self.diameter();
        if !(diam > 0.0) || !diam.is_finite() {
            return Err(Error::InvalidGeometry("degenerate control points".into()));
        }
        for i in 0..=64 {
            let v = i as f64 / 64.0;
            let a = self.left.eval(0.0, v);
            let b = self.right.eval(0.0, v);
            let gap = ((a[0] - b[0]).powi(2) + (a[1] - b[1]).powi(2)).sqrt();
            if gap > 1e-10 * diam {
                return Err(Error::InvalidGeometry(format!(
                    "patches disagree on the interface at v = {v}: gap {gap:.3e}"
                )));
            }
        }
        for side in PatchSide::BOTH {
            let patch = self.patch(side);
            let p = patch.space.u.degree().max(patch.space.v.degree());
            let (nodes, _) = crate::assembly::gauss_legendre(p + 1);
            let mut sign = 0.0;
            for &(a0, a1) in &patch.space.u.cells() {
                for &(b0, b1) in &patch.space.v.cells() {
                    for &x in &nodes {
                        for &y in &nodes {
                            let u = a0 + (a1 - a0) * x;
                            let v = b0 + (b1 - b0) * y;
                            let det = patch.jet2(u, v).det_j();
                            if det == 0.0 || (sign != 0.0 && det.signum() != sign) {
                                return Err(Error::InvalidGeometry(format!(
                                    "patch {side:?} is singular or folds near ({u:.4}, {v:.4})"
                                )));
                            }
                            sign = det.signum();
                        }
                    }
                }
            }
        }
        Ok(())
    }

    /// Both patches represented on the refined knot vector.
    pub fn refine(&self, target: &KnotVector) -> Result<TwoPatchGeometry> {
        Ok(TwoPatchGeometry {
            left: self.left.refine(target)?,
            right: self.right.refine(target)?,
            regularity: self.regularity,
            gluing: self.gluing,
        })
    }

    pub fn to_file(&self) -> Result<GeometryFile> {
        let kv = &self.left.space.u;
        if self.left.space.v != *kv || self.right.space.u != *kv || self.right.space.v != *kv {
            return Err(Error::InvalidGeometry(
                "both patches must use one knot vector in u and v".into(),
            ));
        }
        let interior = kv.interior();
        let p = kv.degree();
        let mult = interior.first().map(|&(_, m)| m).unwrap_or(p);
        if interior.iter().any(|&(_, m)| m != mult) {
            return Err(Error::InvalidGeometry(
                "only uniform interior multiplicity is serializable".into(),
            ));
        }
        let regularity = if interior.is_empty() { self.regularity } else { p - mult };
        Ok(GeometryFile {
            degree: p,
            regularity,
            knots_interior: kv.interior_knots(),
            patches: Patches {
                l: PatchFile { control_points: self.left.ctrl.clone() },
                r: PatchFile { control_points: self.right.ctrl.clone() },
            },
            gluing: self.gluing,
        })
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let text = std::fs::read_to_string(path)?;
        Self::from_json(&text)
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let file: GeometryFile = serde_json::from_str(text)?;
        file.into_geometry()
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(&self.to_file()?)?)
    }

    pub fn save(&self, path: impl AsRef<Path>) -> Result<()> {
        std::fs::write(path, self.to_json()?)?;
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PatchFile {
    pub control_points: Vec<[f64; 2]>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Patches {
    #[serde(rename = "L")]
    pub l: PatchFile,
    #[serde(rename = "R")]
    pub r: PatchFile,
}

/// On-disk geometry description.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GeometryFile {
    pub degree: usize,
    pub regularity: usize,
    pub knots_interior: Vec<f64>,
    pub patches: Patches,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub gluing: Option<GluingData>,
}

impl GeometryFile {
    pub fn into_geometry(self) -> Result<TwoPatchGeometry> {
        let kv = KnotVector::regular(self.degree, self.regularity, &self.knots_interior)?;
        let space = TensorSplineSpace::square(kv);
        let left = TensorPatch::new(space.clone(), self.patches.l.control_points)?;
        let right = TensorPatch::new(space, self.patches.r.control_points)?;
        if left.ctrl.iter().chain(&right.ctrl).any(|c| !c[0].is_finite() || !c[1].is_finite()) {
            return Err(Error::InvalidGeometry("non-finite control point".into()));
        }
        Ok(TwoPatchGeometry { left, right, regularity: self.regularity, gluing: self.gluing })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn squares() -> TwoPatchGeometry {
        let l = TensorPatch::bilinear([[[0.0, 0.0], [0.0, 1.0]], [[-1.0, 0.0], [-1.0, 1.0]]]);
        let r = TensorPatch::bilinear([[[0.0, 0.0], [0.0, 1.0]], [[1.0, 0.0], [1.0, 1.0]]]);
        TwoPatchGeometry::new(l, r)
    }

    #[test]
    fn bilinear_evaluation() {
        let g = squares();
        let x = g.left.eval(0.25, 0.5);
        assert!((x[0] + 0.25).abs() < 1e-15 && (x[1] - 0.5).abs() < 1e-15);
        let j = g.right.jet2(0.3, 0.6);
        assert_eq!(j.du(), [1.0, 0.0]);
        assert_eq!(j.dv(), [0.0, 1.0]);
        assert_eq!(j.duv(), [0.0, 0.0]);
        assert!((j.det_j() - 1.0).abs() < 1e-15);
        g.validate().unwrap();
    }

    #[test]
    fn json_round_trip_is_exact() {
        let mut g = squares();
        g.left.ctrl[3] = [-1.0 / 3.0, 0.1 + 0.2];
        let text = g.to_json().unwrap();
        let back = TwoPatchGeometry::from_json(&text).unwrap();
        assert_eq!(back, g);
    }

    #[test]
    fn refinement_keeps_the_map() {
        let g = squares();
        let kv = KnotVector::uniform(1, 0, 3).unwrap();
        let r = g.left.refine(&kv).unwrap();
        for (u, v) in [(0.1, 0.9), (0.5, 0.5), (0.77, 0.12)] {
            let a = g.left.eval(u, v);
            let b = r.eval(u, v);
            assert!((a[0] - b[0]).abs() < 1e-14 && (a[1] - b[1]).abs() < 1e-14);
        }
    }

    #[test]
    fn detects_interface_gap_and_fold() {
        let mut g = squares();
        g.right.ctrl[1] = [0.0, 1.1];
        assert!(g.validate().is_err());
        let mut g = squares();
        g.right.ctrl[3] = [-3.0, 1.0];
        assert!(g.validate().is_err());
    }
}
