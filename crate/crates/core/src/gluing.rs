//! Linear gluing data of bilinear-like G2 two-patch geometries and the
//! invariants derived from it.

use crate::bspline::KnotVector;
use crate::error::{Error, Result};
use crate::geometry::{Jet2, PatchSide, TensorPatch, TwoPatchGeometry};
use crate::poly::{LinearPoly, Poly};
use serde::{Deserialize, Serialize};

/// Two roots closer than this are the same root.
pub const ROOT_TOL: f64 = 1e-10;
/// `beta(tau) = 0` when below this fraction of the largest coefficient of beta.
pub const ZERO_TOL: f64 = 1e-10;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GluingData {
    #[serde(rename = "alpha_L")]
    pub alpha_l: LinearPoly,
    #[serde(rename = "alpha_R")]
    pub alpha_r: LinearPoly,
    #[serde(rename = "beta_L")]
    pub beta_l: LinearPoly,
    #[serde(rename = "beta_R")]
    pub beta_r: LinearPoly,
}

impl GluingData {
    pub fn new(alpha_l: LinearPoly, alpha_r: LinearPoly, beta_l: LinearPoly, beta_r: LinearPoly) -> Self {
        GluingData { alpha_l, alpha_r, beta_l, beta_r }
    }

    pub fn alpha(&self, side: PatchSide) -> LinearPoly {
        match side {
            PatchSide::L => self.alpha_l,
            PatchSide::R => self.alpha_r,
        }
    }

    pub fn beta_side(&self, side: PatchSide) -> LinearPoly {
        match side {
            PatchSide::L => self.beta_l,
            PatchSide::R => self.beta_r,
        }
    }

    /// `beta = alpha_L beta_R - alpha_R beta_L`, with products that cancel
    /// to rounding level flushed to zero.
    pub fn beta(&self) -> Poly {
        let a = &self.alpha_l.to_poly() * &self.beta_r.to_poly();
        let b = &self.alpha_r.to_poly() * &self.beta_l.to_poly();
        let scale = a.max_abs_coeff().max(b.max_abs_coeff());
        let diff = &a - &b;
        Poly::new(
            diff.coeffs()
                .iter()
                .map(|&c| if c.abs() <= 1e-14 * scale { 0.0 } else { c })
                .collect(),
        )
    }

    /// `alpha_L alpha_R < 0` on all of [0,1]. Both factors are linear, so
    /// checking the end points suffices once neither vanishes inside.
    pub fn sign_condition(&self) -> bool {
        let vanishes_inside = |a: &LinearPoly| matches!(a.root(), Some(t) if (0.0..=1.0).contains(&t));
        if vanishes_inside(&self.alpha_l) || vanishes_inside(&self.alpha_r) {
            return false;
        }
        self.alpha_l.eval(0.0) * self.alpha_r.eval(0.0) < 0.0
            && self.alpha_l.eval(1.0) * self.alpha_r.eval(1.0) < 0.0
    }

    pub fn check_sign_condition(&self) -> Result<()> {
        if self.sign_condition() {
            Ok(())
        } else {
            Err(Error::SignCondition(format!(
                "alpha_L = {:?}, alpha_R = {:?}",
                self.alpha_l, self.alpha_r
            )))
        }
    }
}

fn det(a: [f64; 2], b: [f64; 2]) -> f64 {
    a[0] * b[1] - a[1] * b[0]
}

fn dot(a: [f64; 2], b: [f64; 2]) -> f64 {
    a[0] * b[0] + a[1] * b[1]
}

/// Bilinear geometry through the corners of `initial`.
pub fn bilinear_from_vertices(initial: &TwoPatchGeometry) -> Result<TwoPatchGeometry> {
    let corners = |p: &TensorPatch| {
        [
            [p.eval(0.0, 0.0), p.eval(0.0, 1.0)],
            [p.eval(1.0, 0.0), p.eval(1.0, 1.0)],
        ]
    };
    let cl = corners(&initial.left);
    let cr = corners(&initial.right);
    let tol = 1e-10 * initial.diameter().max(1.0);
    for j in 0..2 {
        let d = ((cl[0][j][0] - cr[0][j][0]).powi(2) + (cl[0][j][1] - cr[0][j][1]).powi(2)).sqrt();
        if d > tol {
            return Err(Error::InvalidGeometry(format!(
                "interface corners v = {j} differ by {d:.3e}"
            )));
        }
    }
    let mut out = TwoPatchGeometry::new(TensorPatch::bilinear(cl), TensorPatch::bilinear(cr));
    // The shared corners must be bitwise identical.
    out.right.ctrl[0] = out.left.ctrl[0];
    out.right.ctrl[1] = out.left.ctrl[1];
    Ok(out)
}

/// Fits `a + b v` through samples at 0 and 1 and checks the midpoints.
fn linear_from(f: impl Fn(f64) -> f64, what: &str) -> Result<LinearPoly> {
    let f0 = f(0.0);
    let f1 = f(1.0);
    let lin = LinearPoly::new(f0, f1 - f0);
    let scale = f0.abs().max(f1.abs()).max(1e-300);
    for v in [0.25, 0.5, 0.8] {
        let e = (f(v) - lin.eval(v)).abs();
        if e > 1e-10 * scale.max(1.0) {
            return Err(Error::NotBilinear(format!(
                "{what} is not linear: deviation {e:.3e} at v = {v}"
            )));
        }
    }
    Ok(lin)
}

/// Gluing data of a bilinear two-patch geometry, with gauge 1.
pub fn gluing_from_bilinear(fhat: &TwoPatchGeometry) -> Result<GluingData> {
    for side in PatchSide::BOTH {
        let sp = &fhat.patch(side).space;
        if sp.u.degree() != 1 || sp.v.degree() != 1 || sp.u.dim() != 2 || sp.v.dim() != 2 {
            return Err(Error::NotBilinear(format!("patch {side:?} is not bilinear")));
        }
    }
    fhat.validate()?;
    let alpha = |p: &TensorPatch, v: f64| {
        let j = p.jet2(0.0, v);
        det(j.du(), j.dv())
    };
    let beta = |p: &TensorPatch, v: f64| {
        let j = p.jet2(0.0, v);
        dot(j.du(), j.dv()) / dot(j.dv(), j.dv())
    };
    let g = GluingData {
        alpha_l: linear_from(|v| alpha(&fhat.left, v), "alpha_L")?,
        alpha_r: linear_from(|v| alpha(&fhat.right, v), "alpha_R")?,
        beta_l: linear_from(|v| beta(&fhat.left, v), "beta_L")?,
        beta_r: linear_from(|v| beta(&fhat.right, v), "beta_R")?,
    };
    g.check_sign_condition()?;
    Ok(g)
}

/// Branches of the knot vector used for the traces.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum TtildeBranch {
    /// `beta` vanishes identically.
    BetaZero,
    /// No interior root of `beta`.
    Raised,
    /// One interior root; that knot keeps multiplicity `p - r`.
    OneRoot,
    /// Two interior roots.
    TwoRoots,
}

#[derive(Debug, Clone)]
pub struct GluingInvariants {
    pub q: Poly,
    pub h: Poly,
    pub atilde_l: Poly,
    pub atilde_r: Poly,
    pub beta: Poly,
    pub d_alpha: usize,
    pub d_atilde: usize,
    pub d_h: usize,
    /// 1-based indices of interior knots where `beta` vanishes.
    pub z_set: Vec<usize>,
    pub z_beta: usize,
    pub beta_zero: bool,
    pub branch: TtildeBranch,
    /// Base knot vector `T_k^{p,r}`.
    pub base: KnotVector,
    pub r: usize,
    pub ttilde: KnotVector,
}

fn deg(p: &Poly) -> usize {
    p.degree().unwrap_or(0)
}

/// Quotient of `a` by the monic linear `v - root`; the remainder is dropped.
fn divide(a: &Poly, root: f64) -> Poly {
    a.div_linear(root).0
}

/// Does the monic linear `v - root` divide `b`? The zero polynomial counts.
fn divides(root: f64, b: &LinearPoly) -> bool {
    if b.a == 0.0 && b.b == 0.0 {
        return true;
    }
    matches!(b.root(), Some(t) if (t - root).abs() <= ROOT_TOL)
}

impl GluingInvariants {
    pub fn new(g: &GluingData, base: &KnotVector, r: usize) -> Result<Self> {
        let p = base.degree();
        let al = g.alpha_l.to_poly();
        let ar = g.alpha_r.to_poly();
        let common_root = match (g.alpha_l.root(), g.alpha_r.root()) {
            (Some(a), Some(b)) if (a - b).abs() <= ROOT_TOL => Some(0.5 * (a + b)),
            _ => None,
        };
        let (q, atilde_l, atilde_r, h) = match common_root {
            Some(t) => {
                let q = Poly::linear(-t, 1.0);
                let h = if divides(t, &g.beta_l) && divides(t, &g.beta_r) {
                    Poly::constant(1.0)
                } else {
                    q.clone()
                };
                (q.clone(), divide(&al, t), divide(&ar, t), h)
            }
            None => (Poly::constant(1.0), al.clone(), ar.clone(), Poly::constant(1.0)),
        };
        let beta = g.beta();
        let d_alpha = deg(&al).max(deg(&ar));
        let d_atilde = deg(&atilde_l).max(deg(&atilde_r));
        let d_h = deg(&h);
        let beta_zero = beta.is_zero();
        let taus = base.interior_knots();
        let (z_set, z_beta) = if beta_zero {
            ((1..=taus.len()).collect::<Vec<_>>(), taus.len())
        } else {
            let tol = ZERO_TOL * beta.max_abs_coeff();
            let z: Vec<usize> = taus
                .iter()
                .enumerate()
                .filter(|(_, &t)| beta.eval(t).abs() < tol)
                .map(|(i, _)| i + 1)
                .collect();
            let n = z.len();
            (z, n)
        };
        let branch = if beta_zero {
            TtildeBranch::BetaZero
        } else {
            match z_beta {
                0 => TtildeBranch::Raised,
                1 => TtildeBranch::OneRoot,
                2 => TtildeBranch::TwoRoots,
                n => {
                    return Err(Error::InvalidGeometry(format!(
                        "a nonzero quadratic beta cannot vanish at {n} interior knots"
                    )))
                }
            }
        };
        let mut inv = GluingInvariants {
            q,
            h,
            atilde_l,
            atilde_r,
            beta,
            d_alpha,
            d_atilde,
            d_h,
            z_set,
            z_beta,
            beta_zero,
            branch,
            base: base.clone(),
            r,
            ttilde: base.clone(),
        };
        inv.ttilde = inv.ttilde_for_degree(p)?;
        Ok(inv)
    }

    /// The trace knot vector for degree `deg` on the base breakpoints.
    pub fn ttilde_for_degree(&self, deg: usize) -> Result<KnotVector> {
        if deg <= self.r + 1 {
            return Err(Error::DegreeBudget(format!(
                "degree {deg} leaves no room for regularity {}",
                self.r + 1
            )));
        }
        let raised = self.base.with_degree_regularity(deg, self.r + 1)?;
        match self.branch {
            TtildeBranch::BetaZero => self.base.with_degree_regularity(deg, self.r),
            TtildeBranch::Raised => Ok(raised),
            TtildeBranch::OneRoot => raised.elevate(self.z_set[0], 1),
            TtildeBranch::TwoRoots => raised.elevate(self.z_set[0], 1)?.elevate(self.z_set[1], 1),
        }
    }

    pub fn atilde(&self, side: PatchSide) -> &Poly {
        match side {
            PatchSide::L => &self.atilde_l,
            PatchSide::R => &self.atilde_r,
        }
    }

    pub fn q_is_one(&self) -> bool {
        self.q.degree() == Some(0)
    }
}

/// Maximum residuals of the three bilinear-like conditions.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct BilinearLikeReport {
    /// Interface mismatch divided by the domain diameter.
    pub interface: f64,
    /// First-order condition, relative to the size of its terms.
    pub first_order: f64,
    /// Second-order condition, relative to the size of its terms.
    pub second_order: f64,
    /// Parameter value of the worst residual of any kind.
    pub worst_v: f64,
    pub pass: bool,
}

fn norm(a: [f64; 2]) -> f64 {
    a[0].hypot(a[1])
}

fn axpy(acc: &mut [f64; 2], s: f64, x: [f64; 2]) {
    acc[0] += s * x[0];
    acc[1] += s * x[1];
}

/// Residuals of the first- and second-order conditions at one parameter value.
/// Returns `(residual16, scale16, residual17, scale17)`.
pub fn bilinear_like_residuals(jl: &Jet2, jr: &Jet2, g: &GluingData, v: f64) -> (f64, f64, f64, f64) {
    let al = g.alpha_l.eval(v);
    let ar = g.alpha_r.eval(v);
    let dal = g.alpha_l.b;
    let bl = g.beta_l.eval(v);
    let dbl = g.beta_l.b;
    let beta = g.beta().eval(v);

    let mut r16 = [0.0; 2];
    axpy(&mut r16, ar, jl.du());
    axpy(&mut r16, -al, jr.du());
    axpy(&mut r16, beta, jl.dv());
    let s16 = (ar * norm(jl.du())).abs() + (al * norm(jr.du())).abs() + (beta * norm(jl.dv())).abs();

    let eta = 2.0 * dal * ar * beta;
    let theta = 2.0 * (al * dbl - dal * bl) * ar * beta;
    let mut z = [0.0; 2];
    axpy(&mut z, al * al, jr.duu());
    axpy(&mut z, -ar * ar, jl.duu());
    axpy(&mut z, -2.0 * ar * beta, jl.duv());
    axpy(&mut z, -beta * beta, jl.dvv());
    let mut r17 = [0.0; 2];
    axpy(&mut r17, al, z);
    axpy(&mut r17, eta, jl.du());
    axpy(&mut r17, theta, jl.dv());
    let s17 = al.abs()
        * (al * al * norm(jr.duu())
            + ar * ar * norm(jl.duu())
            + (2.0 * ar * beta * norm(jl.duv())).abs()
            + beta * beta * norm(jl.dvv()))
        + (eta * norm(jl.du())).abs()
        + (theta * norm(jl.dv())).abs();
    (norm(r16), s16, norm(r17), s17)
}

/// Checks the interface, first- and second-order bilinear-like conditions
/// at `n_samples` uniformly spaced parameter values.
pub fn verify_bilinear_like(
    f: &TwoPatchGeometry,
    g: &GluingData,
    n_samples: usize,
    tol: f64,
) -> BilinearLikeReport {
    let diam = f.diameter();
    let n = n_samples.max(2);
    let mut rep = BilinearLikeReport {
        interface: 0.0,
        first_order: 0.0,
        second_order: 0.0,
        worst_v: 0.0,
        pass: true,
    };
    // Normalize by the largest term size seen over the interface so that
    // points where every term is tiny are not blown up.
    let mut samples = Vec::with_capacity(n);
    let (mut s16max, mut s17max) = (0.0f64, 0.0f64);
    for i in 0..n {
        let v = i as f64 / (n - 1) as f64;
        let jl = f.left.jet2(0.0, v);
        let jr = f.right.jet2(0.0, v);
        let gap = norm([jl.value()[0] - jr.value()[0], jl.value()[1] - jr.value()[1]]);
        let (r16, s16, r17, s17) = bilinear_like_residuals(&jl, &jr, g, v);
        s16max = s16max.max(s16);
        s17max = s17max.max(s17);
        samples.push((v, gap / diam, r16, r17));
    }
    let mut worst = 0.0;
    for (v, gap, r16, r17) in samples {
        let e16 = if s16max > 0.0 { r16 / s16max } else { r16 };
        let e17 = if s17max > 0.0 { r17 / s17max } else { r17 };
        rep.interface = rep.interface.max(gap);
        rep.first_order = rep.first_order.max(e16);
        rep.second_order = rep.second_order.max(e17);
        let m = gap.max(e16).max(e17);
        if m > worst {
            worst = m;
            rep.worst_v = v;
        }
    }
    rep.pass = rep.interface < tol && rep.first_order < tol && rep.second_order < tol;
    rep
}

#[cfg(test)]
mod tests {
    use super::*;

    fn lp(a: f64, b: f64) -> LinearPoly {
        LinearPoly::new(a, b)
    }

    fn mirrored_squares() -> TwoPatchGeometry {
        let l = TensorPatch::bilinear([[[0.0, 0.0], [0.0, 1.0]], [[-1.0, 0.0], [-1.0, 1.0]]]);
        let r = TensorPatch::bilinear([[[0.0, 0.0], [0.0, 1.0]], [[1.0, 0.0], [1.0, 1.0]]]);
        TwoPatchGeometry::new(l, r)
    }

    #[test]
    fn mirrored_squares_gluing() {
        let g = gluing_from_bilinear(&mirrored_squares()).unwrap();
        assert_eq!(g.alpha_l, lp(-1.0, 0.0));
        assert_eq!(g.alpha_r, lp(1.0, 0.0));
        assert_eq!(g.beta_l, lp(0.0, 0.0));
        assert_eq!(g.beta_r, lp(0.0, 0.0));
        assert!(g.beta().is_zero());
        let rep = verify_bilinear_like(&mirrored_squares(), &g, 20, 1e-10);
        assert!(rep.pass, "{rep:?}");
    }

    #[test]
    fn sign_condition_cases() {
        let g = |al: LinearPoly, ar: LinearPoly| GluingData::new(al, ar, lp(0.0, 0.0), lp(0.0, 0.0));
        assert!(g(lp(-1.0, 0.0), lp(1.0, 0.0)).sign_condition());
        assert!(!g(lp(-0.5, 1.0), lp(1.0, 0.0)).sign_condition());
        assert!(g(lp(-9.0, -1.0), lp(10.5, -1.5)).sign_condition());
        assert!(!g(lp(1.0, 0.0), lp(1.0, 0.0)).sign_condition());
    }

    #[test]
    fn invariants_with_common_root() {
        let g = GluingData::new(lp(-18.0, 9.0), lp(18.0, -9.0), lp(1.0, -0.5), lp(1.0, -0.5));
        let base = KnotVector::uniform(5, 2, 3).unwrap();
        let inv = GluingInvariants::new(&g, &base, 2).unwrap();
        assert_eq!(inv.q.coeffs(), &[-2.0, 1.0]);
        assert_eq!(inv.d_atilde, 0);
        assert_eq!(inv.d_h, 0);
        assert_eq!(inv.d_alpha, 1);
        assert_eq!(inv.z_beta, 0);
        assert_eq!(inv.branch, TtildeBranch::Raised);
        let back = &inv.q * &inv.atilde_l;
        for (a, b) in back.coeffs().iter().zip(g.alpha_l.to_poly().coeffs()) {
            assert!((a - b).abs() < 1e-12);
        }
        let b = inv.beta.coeffs();
        for (x, e) in b.iter().zip([-36.0, 36.0, -9.0]) {
            assert!((x - e).abs() < 1e-12);
        }
    }

    #[test]
    fn interior_root_of_beta() {
        // beta = -(v - 1/2) - (v - 1/2) = -2 (v - 1/2).
        let g = GluingData::new(lp(-1.0, 0.0), lp(1.0, 0.0), lp(-0.5, 1.0), lp(-0.5, 1.0));
        let base = KnotVector::uniform(5, 2, 3).unwrap();
        let inv = GluingInvariants::new(&g, &base, 2).unwrap();
        assert_eq!(inv.z_set, vec![2]);
        assert_eq!(inv.branch, TtildeBranch::OneRoot);
        assert_eq!(inv.ttilde.interior(), vec![(0.25, 2), (0.5, 3), (0.75, 2)]);
        assert_eq!(inv.ttilde.dim(), 3 * 2 + 5 + 1 + 1);
    }

    #[test]
    fn beta_zero_branch() {
        let g = GluingData::new(lp(-1.0, 0.0), lp(1.0, 0.0), lp(0.0, 0.0), lp(0.0, 0.0));
        let base = KnotVector::uniform(5, 2, 3).unwrap();
        let inv = GluingInvariants::new(&g, &base, 2).unwrap();
        assert!(inv.beta_zero);
        assert_eq!(inv.z_beta, 3);
        assert_eq!(inv.ttilde, base);
    }
}
