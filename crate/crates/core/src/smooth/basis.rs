use super::dims;
use super::trace::TraceFn;
use crate::bspline::{Interpolator, KnotVector, Side, SplineFunction1D};
use crate::error::{Error, Result};
use crate::geometry::PatchSide;
use crate::gluing::{GluingData, GluingInvariants};
use crate::poly::Poly;
use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};
use std::sync::Arc;

/// Tolerance for the check that a trace lies in the patch spline space.
pub const REPRESENT_TOL: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Family {
    Gamma0Regular,
    Gamma0Knot,
    Gamma0Zbeta,
    Gamma1Regular,
    Gamma1Zbeta,
    Gamma2,
    W0,
    W1,
    W2,
}

impl Family {
    /// Which trace (0, 1 or 2) the family is built on.
    pub fn level(self) -> usize {
        match self {
            Family::Gamma0Regular | Family::Gamma0Knot | Family::Gamma0Zbeta | Family::W0 => 0,
            Family::Gamma1Regular | Family::Gamma1Zbeta | Family::W1 => 1,
            Family::Gamma2 | Family::W2 => 2,
        }
    }
}

/// How to pick one B-spline among the admissible ones when a knot
/// multiplicity is raised.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub enum SelectionRule {
    /// Smallest admissible index.
    First,
    /// The admissible B-spline whose local knot vector has the raised knot
    /// closest to its middle; ties go to the smaller index.
    #[default]
    Central,
    /// Largest admissible index.
    Last,
}

/// A function triplet `(g0, g1, g2)` along the interface.
#[derive(Debug, Clone)]
pub struct BasisTriplet {
    pub kind: Family,
    pub j: usize,
    pub g0: TraceFn,
    pub g1: TraceFn,
    pub g2: TraceFn,
}

/// Functions of the transversal direction with unit derivative data at 0.
#[derive(Debug, Clone)]
pub struct EdgeFunctions {
    pub m: [SplineFunction1D; 3],
    pub tau1: f64,
    pub p: usize,
}

impl EdgeFunctions {
    pub fn new(space: &KnotVector) -> Result<Self> {
        let p = space.degree();
        if p < 2 || space.dim() < 3 {
            return Err(Error::OutOfRange("edge functions need p >= 2".into()));
        }
        let tau1 = space.first_positive_knot();
        let pf = p as f64;
        let n = space.dim();
        let mk = |c: [f64; 3]| {
            let mut coeffs = vec![0.0; n];
            coeffs[..3].copy_from_slice(&c);
            SplineFunction1D::new(space.clone(), coeffs)
        };
        let a = tau1 / pf;
        let b = tau1 * tau1 / (pf * (pf - 1.0));
        Ok(EdgeFunctions {
            m: [mk([1.0, 1.0, 1.0])?, mk([0.0, a, 2.0 * a])?, mk([0.0, 0.0, b])?],
            tau1,
            p,
        })
    }

    /// Weights turning `(g, D_u g, D_uu g)` at `u = 0` into the first three
    /// coefficient columns.
    pub fn column_weights(&self) -> [[f64; 3]; 3] {
        let pf = self.p as f64;
        let a = self.tau1 / pf;
        let b = self.tau1 * self.tau1 / (pf * (pf - 1.0));
        [[1.0, 0.0, 0.0], [1.0, a, 0.0], [1.0, 2.0 * a, b]]
    }
}

/// Coefficients of one interface function on one patch: rows `i = 0, 1, 2`
/// of the tensor coefficients (index `i` along `u`).
pub type Rows = [Vec<f64>; 3];

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct BasisFunction {
    pub family: Family,
    pub j: usize,
    #[serde(rename = "rows_L")]
    pub rows_l: Rows,
    #[serde(rename = "rows_R")]
    pub rows_r: Rows,
}

impl BasisFunction {
    pub fn rows(&self, side: PatchSide) -> &Rows {
        match side {
            PatchSide::L => &self.rows_l,
            PatchSide::R => &self.rows_r,
        }
    }
}

/// Gluing quantities entering the trace formulas on each side.
#[derive(Debug, Clone)]
pub struct TraceContext {
    pub atilde: [Poly; 2],
    pub beta: [Poly; 2],
    /// Root of the monic linear common factor of the alphas, if any.
    pub q_root: Option<f64>,
}

impl TraceContext {
    /// Context for the full interface space.
    pub fn v2(g: &GluingData, inv: &GluingInvariants) -> Self {
        TraceContext {
            atilde: [inv.atilde_l.clone(), inv.atilde_r.clone()],
            beta: [g.beta_l.to_poly(), g.beta_r.to_poly()],
            q_root: if inv.q_is_one() { None } else { Some(-inv.q.coeff(0)) },
        }
    }

    /// Context for the uniformly constructed subspace (no common factor).
    pub fn w2(g: &GluingData) -> Self {
        TraceContext {
            atilde: [g.alpha_l.to_poly(), g.alpha_r.to_poly()],
            beta: [g.beta_l.to_poly(), g.beta_r.to_poly()],
            q_root: None,
        }
    }

    fn idx(side: PatchSide) -> usize {
        match side {
            PatchSide::L => 0,
            PatchSide::R => 1,
        }
    }

    /// `(g, D_u g, D_uu g)` at `u = 0` on the given side.
    pub fn traces(&self, t: &BasisTriplet, side: PatchSide) -> Result<[TraceFn; 3]> {
        let s = Self::idx(side);
        let at = &self.atilde[s];
        let bs = &self.beta[s];
        let g0p = t.g0.derivative();
        let c0 = t.g0.clone();
        let c1 = t.g1.mul_poly(at).add(&g0p.mul_poly(bs));
        let two_ab = &(at * bs) * &Poly::constant(2.0);
        let mut c2 = g0p
            .derivative()
            .mul_poly(&(bs * bs))
            .add(&t.g1.derivative().mul_poly(&two_ab))
            .add(&t.g2.mul_poly(&(at * at)));
        if let Some(root) = self.q_root {
            // q' = 1 for the monic linear factor.
            let x = t.g1.mul_poly(&two_ab).div_linear(root)?;
            c2 = c2.add(&x.scale(-1.0));
        }
        Ok([c0, c1, c2])
    }
}

/// Extra sample locations inside every knot span for the representability check.
fn check_points(space: &KnotVector) -> Vec<f64> {
    let mut pts = Vec::new();
    for (a, b) in space.cells() {
        for f in [0.13, 0.37, 0.61, 0.89] {
            pts.push(a + f * (b - a));
        }
    }
    pts
}

/// Shared machinery for turning triplets into coefficient rows.
pub struct RowBuilder {
    pub interp: Interpolator,
    pub edge: EdgeFunctions,
    checks: Vec<f64>,
}

impl RowBuilder {
    pub fn new(base: &KnotVector) -> Result<Self> {
        Ok(RowBuilder {
            interp: Interpolator::new(base)?,
            edge: EdgeFunctions::new(base)?,
            checks: check_points(base),
        })
    }

    pub fn n(&self) -> usize {
        self.interp.points().len()
    }

    /// Interpolates `sum_m w[m] * c[m]` and checks that the result
    /// reproduces the function away from the interpolation points.
    fn row(&self, c: &[TraceFn; 3], w: [f64; 3]) -> Result<Vec<f64>> {
        let f = |v: f64| -> f64 {
            let mut s = 0.0;
            for m in 0..3 {
                if w[m] != 0.0 && !c[m].is_zero() {
                    s += w[m] * c[m].eval(v);
                }
            }
            s
        };
        let samples: Vec<f64> = self.interp.points().iter().map(|&v| f(v)).collect();
        let scale = samples.iter().fold(0.0f64, |m, x| m.max(x.abs()));
        let spline = self.interp.interpolate(&samples)?;
        if scale == 0.0 && c.iter().zip(w).all(|(ci, wi)| ci.is_zero() || wi == 0.0) {
            return Ok(spline.coeffs);
        }
        for &v in &self.checks {
            let e = (spline.eval(v, 0) - f(v)).abs();
            if e > REPRESENT_TOL * scale.max(1e-300) {
                return Err(Error::NotRepresentable(format!(
                    "deviation {e:.3e} at v = {v:.4} (scale {scale:.3e})"
                )));
            }
        }
        Ok(spline.coeffs)
    }

    /// The three coefficient rows of one side of the surface for a triplet.
    pub fn surface_rows(&self, t: &BasisTriplet, ctx: &TraceContext, side: PatchSide) -> Result<Rows> {
        let c = ctx.traces(t, side)?;
        let w = self.edge.column_weights();
        Ok([self.row(&c, w[0])?, self.row(&c, w[1])?, self.row(&c, w[2])?])
    }

    pub fn build(&self, t: &BasisTriplet, ctx: &TraceContext) -> Result<BasisFunction> {
        let rows_l = self.surface_rows(t, ctx, PatchSide::L)?;
        let mut rows_r = self.surface_rows(t, ctx, PatchSide::R)?;
        // The trace is shared; keep the two copies bitwise identical.
        rows_r[0] = rows_l[0].clone();
        Ok(BasisFunction { family: t.kind, j: t.j, rows_l, rows_r })
    }
}

/// Convenience wrapper computing the three rows for one triplet and side.
pub fn surface_from_triplet(
    t: &BasisTriplet,
    ctx: &TraceContext,
    base: &KnotVector,
    side: PatchSide,
) -> Result<Rows> {
    RowBuilder::new(base)?.surface_rows(t, ctx, side)
}

/// A B-spline of `base` with the multiplicity of interior knot `which`
/// (1-based) raised by `extra`, which is nonzero at the knot and does not lie
/// in the unraised space.
pub fn select_refined_bspline(
    base: &KnotVector,
    which: usize,
    extra: usize,
    rule: SelectionRule,
) -> Result<SplineFunction1D> {
    let raised = base.elevate(which, extra)?;
    let (tau, mult) = raised.interior()[which - 1];
    let p = raised.degree();
    let t = raised.knots();
    let order = p - mult + 1;
    let mut candidates = Vec::new();
    for i in 0..raised.dim() {
        if !(t[i] < tau && tau < t[i + p + 1]) {
            continue;
        }
        let count = t[i..=i + p + 1].iter().filter(|&&x| x == tau).count();
        if count != mult {
            continue;
        }
        let f = SplineFunction1D::basis(&raised, i);
        let left = f.eval_side(tau, order, Side::Left);
        let right = f.eval_side(tau, order, Side::Right);
        let size = left.abs().max(right.abs());
        if f.eval(tau, 0) > 0.0 && (right - left).abs() > 1e-6 * size && size > 0.0 {
            candidates.push(i);
        }
    }
    if candidates.is_empty() {
        return Err(Error::Selection(format!(
            "no B-spline of the raised space is nonzero at {tau} with a jump of order {order}"
        )));
    }
    let i = match rule {
        SelectionRule::First => candidates[0],
        SelectionRule::Last => *candidates.last().unwrap(),
        SelectionRule::Central => {
            // Twice the offset between the mean local position of the copies
            // of tau and the middle of the local knot vector.
            let first_copy = t.iter().position(|&x| x == tau).unwrap_or(0);
            let offset = |i: usize| (2 * (first_copy - i) + mult - 1).abs_diff(p + 1);
            *candidates.iter().min_by_key(|&&i| (offset(i), i)).unwrap()
        }
    };
    Ok(SplineFunction1D::basis(&raised, i))
}

/// An ordered basis of an interface space, stored as coefficient rows.
#[derive(Debug, Clone)]
pub struct SmoothBasis {
    pub base: KnotVector,
    pub functions: Vec<BasisFunction>,
}

impl SmoothBasis {
    pub fn len(&self) -> usize {
        self.functions.len()
    }

    pub fn is_empty(&self) -> bool {
        self.functions.is_empty()
    }

    pub fn n(&self) -> usize {
        self.base.dim()
    }

    /// `A^(S)`: one row per basis function, columns `[d_0, d_1, d_2]`.
    pub fn a_matrix(&self, side: PatchSide) -> DMatrix<f64> {
        let n = self.n();
        DMatrix::from_fn(self.len(), 3 * n, |r, c| self.functions[r].rows(side)[c / n][c % n])
    }

    /// Interface coefficients of both patches with the shared trace row
    /// counted once: `[d_0, d_1^L, d_2^L, d_1^R, d_2^R]`.
    pub fn stacked_matrix(&self) -> DMatrix<f64> {
        let n = self.n();
        DMatrix::from_fn(self.len(), 5 * n, |r, c| {
            let f = &self.functions[r];
            let (blk, j) = (c / n, c % n);
            match blk {
                0 => f.rows_l[0][j],
                1 => f.rows_l[1][j],
                2 => f.rows_l[2][j],
                3 => f.rows_r[1][j],
                _ => f.rows_r[2][j],
            }
        })
    }

    pub fn to_json_lines(&self) -> Result<String> {
        let mut out = String::new();
        for f in &self.functions {
            out.push_str(&serde_json::to_string(f)?);
            out.push('\n');
        }
        Ok(out)
    }
}

fn bsplines(space: &KnotVector) -> Vec<Arc<SplineFunction1D>> {
    (0..space.dim()).map(|i| Arc::new(SplineFunction1D::basis(space, i))).collect()
}

/// Triplets of the full interface space in the order
/// Gamma0 (regular, knot, zbeta), Gamma1 (regular, zbeta), Gamma2.
pub fn triplets_v2(
    g: &GluingData,
    inv: &GluingInvariants,
    rule: SelectionRule,
) -> Result<Vec<BasisTriplet>> {
    let base = &inv.base;
    let p = base.degree();
    let r = inv.r;
    let k = base.interior().len();
    let taus = base.interior_knots();
    let p1 = p - inv.d_atilde - inv.d_h;
    if p < 2 * inv.d_atilde + r + 1 || p1 < r + 2 || p < r + 3 {
        return Err(Error::DegreeBudget(format!(
            "p = {p}, r = {r}, d_atilde = {}, d_h = {}",
            inv.d_atilde, inv.d_h
        )));
    }
    let s0 = base.with_degree_regularity(p, r + 2)?;
    let s1 = base.with_degree_regularity(p1, r + 1)?;
    let s2 = base.with_degree_regularity(p - 2 * inv.d_atilde, r)?;
    let (al, ar) = (&inv.atilde_l, &inv.atilde_r);
    let (bl, br) = (g.beta_l, g.beta_r);
    let q = &inv.q;
    let zero = TraceFn::zero;
    let mut out = Vec::new();

    for (j, s) in bsplines(&s0).into_iter().enumerate() {
        out.push(BasisTriplet { kind: Family::Gamma0Regular, j, g0: TraceFn::spline(s), g1: zero(), g2: zero() });
    }
    for j in 0..k {
        let tau = taus[j];
        let n = Arc::new(select_refined_bspline(&s0, j + 1, 1, rule)?);
        let (alt, art, blt, brt, qt) = (al.eval(tau), ar.eval(tau), bl.eval(tau), br.eval(tau), q.eval(tau));
        let c1 = -(art * blt + alt * brt) / (2.0 * art * alt * qt);
        let c2 = blt * brt / (alt * art);
        out.push(BasisTriplet {
            kind: Family::Gamma0Knot,
            j,
            g0: TraceFn::spline(n.clone()),
            g1: TraceFn::term(q.scale(c1), n.clone(), 1),
            g2: TraceFn::term(Poly::constant(c2), n, 2),
        });
    }
    for (j, &i) in inv.z_set.iter().enumerate() {
        let tau = taus[i - 1];
        let n = Arc::new(select_refined_bspline(&s0, i, 2, rule)?);
        let (alt, blt, qt) = (al.eval(tau), bl.eval(tau), q.eval(tau));
        let c1 = -blt / (qt * alt);
        let c2 = (blt / alt).powi(2);
        out.push(BasisTriplet {
            kind: Family::Gamma0Zbeta,
            j,
            g0: TraceFn::spline(n.clone()),
            g1: TraceFn::term(q.scale(c1), n.clone(), 1),
            g2: TraceFn::term(Poly::constant(c2), n, 2),
        });
    }
    for (j, s) in bsplines(&s1).into_iter().enumerate() {
        out.push(BasisTriplet { kind: Family::Gamma1Regular, j, g0: zero(), g1: TraceFn::term(inv.h.clone(), s, 0), g2: zero() });
    }
    for (j, &i) in inv.z_set.iter().enumerate() {
        let tau = taus[i - 1];
        let n = Arc::new(select_refined_bspline(&s1, i, 1, rule)?);
        let c = -2.0 * bl.eval(tau) / al.eval(tau);
        out.push(BasisTriplet {
            kind: Family::Gamma1Zbeta,
            j,
            g0: zero(),
            g1: TraceFn::term(inv.h.clone(), n.clone(), 0),
            g2: TraceFn::term(inv.h.scale(c), n, 1),
        });
    }
    for (j, s) in bsplines(&s2).into_iter().enumerate() {
        out.push(BasisTriplet { kind: Family::Gamma2, j, g0: zero(), g1: zero(), g2: TraceFn::spline(s) });
    }
    Ok(out)
}

/// Basis of the full interface space.
pub fn build_basis_v2(g: &GluingData, inv: &GluingInvariants, rule: SelectionRule) -> Result<SmoothBasis> {
    let triplets = triplets_v2(g, inv, rule)?;
    let k = inv.base.interior().len();
    let expected = dims::dim_v2(inv, inv.base.degree(), inv.r, k)?;
    if triplets.len() != expected {
        return Err(Error::Selection(format!(
            "constructed {} triplets, dimension formula gives {expected}",
            triplets.len()
        )));
    }
    let rb = RowBuilder::new(&inv.base)?;
    let ctx = TraceContext::v2(g, inv);
    let functions = triplets.iter().map(|t| rb.build(t, &ctx)).collect::<Result<Vec<_>>>()?;
    Ok(SmoothBasis { base: inv.base.clone(), functions })
}

/// Triplets of the uniformly constructed subspace.
pub fn triplets_w2(base: &KnotVector, r: usize, d_alpha: usize) -> Result<Vec<BasisTriplet>> {
    let p = base.degree();
    if p < r + 2 * d_alpha + 1 || p < r + 3 {
        return Err(Error::DegreeBudget(format!("p = {p}, r = {r}, d_alpha = {d_alpha}")));
    }
    let spaces = [
        (Family::W0, base.with_degree_regularity(p, r + 2)?),
        (Family::W1, base.with_degree_regularity(p - d_alpha, r + 1)?),
        (Family::W2, base.with_degree_regularity(p - 2 * d_alpha, r)?),
    ];
    let mut out = Vec::new();
    for (kind, space) in spaces {
        for (j, s) in bsplines(&space).into_iter().enumerate() {
            let mut t = BasisTriplet { kind, j, g0: TraceFn::zero(), g1: TraceFn::zero(), g2: TraceFn::zero() };
            match kind.level() {
                0 => t.g0 = TraceFn::spline(s),
                1 => t.g1 = TraceFn::spline(s),
                _ => t.g2 = TraceFn::spline(s),
            }
            out.push(t);
        }
    }
    Ok(out)
}

/// Basis of the uniformly constructed subspace.
pub fn build_basis_w2(g: &GluingData, base: &KnotVector, r: usize) -> Result<SmoothBasis> {
    let d_alpha = g.alpha_l.to_poly().degree().unwrap_or(0).max(g.alpha_r.to_poly().degree().unwrap_or(0));
    let triplets = triplets_w2(base, r, d_alpha)?;
    let expected = dims::dim_w2(base.degree(), r, base.interior().len(), d_alpha)?;
    debug_assert_eq!(triplets.len(), expected);
    let rb = RowBuilder::new(base)?;
    let ctx = TraceContext::w2(g);
    let functions = triplets.iter().map(|t| rb.build(t, &ctx)).collect::<Result<Vec<_>>>()?;
    Ok(SmoothBasis { base: base.clone(), functions })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::poly::LinearPoly;

    fn lp(a: f64, b: f64) -> LinearPoly {
        LinearPoly::new(a, b)
    }

    #[test]
    fn edge_functions_unit_data() {
        for (p, r, k) in [(5, 2, 0), (5, 2, 3), (6, 3, 1)] {
            let kv = KnotVector::uniform(p, r, k).unwrap();
            let ef = EdgeFunctions::new(&kv).unwrap();
            for (j, m) in ef.m.iter().enumerate() {
                for l in 0..3 {
                    let d = m.eval(0.0, l);
                    let e = if j == l { 1.0 } else { 0.0 };
                    assert!((d - e).abs() < 1e-12, "M{j}^({l})(0) = {d}");
                }
                assert!(m.coeffs[3..].iter().all(|&c| c == 0.0));
            }
        }
        let ef = EdgeFunctions::new(&KnotVector::uniform(5, 2, 3).unwrap()).unwrap();
        assert!((ef.m[1].coeffs[1] - 0.05).abs() < 1e-15);
        assert!((ef.m[1].coeffs[2] - 0.1).abs() < 1e-15);
    }

    #[test]
    fn selection_candidates() {
        let base = KnotVector::uniform(5, 4, 3).unwrap();
        let f = select_refined_bspline(&base, 1, 1, SelectionRule::First).unwrap();
        assert!(f.eval(0.25, 0) > 0.0);
        assert!(f.jump(0.25, 4).abs() > 1e-6);
        assert!(select_refined_bspline(&base, 1, 5, SelectionRule::First).is_err());
        // Four candidates, the raised knot at local positions (4,5), (3,4),
        // (2,3), (1,2); the middle is 3, the tie goes to the smaller index.
        let c = select_refined_bspline(&base, 1, 1, SelectionRule::Central).unwrap();
        assert_eq!(c.coeffs, SplineFunction1D::basis(&base.elevate(1, 1).unwrap(), 3).coeffs);
        let l = select_refined_bspline(&base, 1, 1, SelectionRule::Last).unwrap();
        assert_eq!(l.coeffs, SplineFunction1D::basis(&base.elevate(1, 1).unwrap(), 5).coeffs);
        let s0 = KnotVector::uniform(5, 4, 3).unwrap();
        let a = select_refined_bspline(&s0, 2, 2, SelectionRule::First).unwrap();
        let b = select_refined_bspline(&s0, 2, 2, SelectionRule::Last).unwrap();
        assert!(a.jump(0.5, 3).abs() > 1e-6 && b.jump(0.5, 3).abs() > 1e-6);
    }

    #[test]
    fn beta_zero_collapse() {
        // Mirrored squares: beta_S = 0, alpha_L = -1, alpha_R = 1.
        let g = GluingData::new(lp(-1.0, 0.0), lp(1.0, 0.0), lp(0.0, 0.0), lp(0.0, 0.0));
        let base = KnotVector::uniform(5, 2, 1).unwrap();
        let inv = GluingInvariants::new(&g, &base, 2).unwrap();
        let basis = build_basis_v2(&g, &inv, SelectionRule::First).unwrap();
        assert_eq!(basis.len(), dims::dim_v2(&inv, 5, 2, 1).unwrap());
        // Gamma0-regular functions have zero transversal rows up to the trace copy.
        let f = &basis.functions[0];
        assert_eq!(f.rows_l[0], f.rows_l[1]);
        assert_eq!(f.rows_l[0], f.rows_l[2]);
    }
}
