use super::mass::{
    default_points, eval_at_points, load_vector, mass_rows, patch_quadratures, quad, PatchQuadrature,
    ScaledSystem, Weight,
};
use super::space::GlobalBasis;
use crate::bspline::KnotVector;
use crate::error::{Error, Result};
use crate::geometry::{PatchSide, TensorPatch, TwoPatchGeometry};
use crate::gluing::{gluing_from_bilinear, GluingData, GluingInvariants};
use crate::smooth::{build_basis_v2, build_basis_w2, SelectionRule, SmoothBasis};
use serde::{Deserialize, Serialize};
use std::fmt::Write as _;

/// Which interface space completes the interior functions.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum SpaceKind {
    /// The full C2 space.
    V2,
    /// The uniformly constructed subspace.
    W2,
}

impl std::str::FromStr for SpaceKind {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "v2" => Ok(SpaceKind::V2),
            "w2" => Ok(SpaceKind::W2),
            _ => Err(Error::Parse(format!("unknown space '{s}', expected v2 or w2"))),
        }
    }
}

/// Interface basis of the requested kind on the base space.
pub fn interface_basis(
    kind: SpaceKind,
    g: &GluingData,
    base: &KnotVector,
    r: usize,
    rule: SelectionRule,
) -> Result<SmoothBasis> {
    match kind {
        SpaceKind::V2 => {
            let inv = GluingInvariants::new(g, base, r)?;
            build_basis_v2(g, &inv, rule)
        }
        SpaceKind::W2 => build_basis_w2(g, base, r),
    }
}

/// Result of an L2 projection.
#[derive(Debug, Clone)]
pub struct Projection {
    pub coeffs: Vec<f64>,
    pub rel_error: f64,
    pub cond: Option<f64>,
}

/// L2 projection of a field given at the quadrature points.
pub fn l2_project_values(
    basis: &GlobalBasis,
    quads: &[PatchQuadrature; 2],
    values: &[Vec<f64>; 2],
    with_cond: bool,
) -> Result<Projection> {
    let rows = mass_rows(basis, quads);
    let sys = ScaledSystem::new(&rows)?;
    let f = load_vector(basis, quads, values);
    let coeffs = sys.solve(&f);
    let uh = eval_at_points(basis, quads, &coeffs);
    let (mut num, mut den) = (0.0, 0.0);
    for s in 0..2 {
        let diff: Vec<f64> = uh[s].iter().zip(&values[s]).map(|(a, b)| (a - b) * (a - b)).collect();
        let sq: Vec<f64> = values[s].iter().map(|a| a * a).collect();
        num += quads[s].integrate(&diff);
        den += quads[s].integrate(&sq);
    }
    let rel_error = if den > 0.0 { (num / den).sqrt() } else { num.sqrt() };
    let cond = if with_cond { Some(sys.condition_number()) } else { None };
    Ok(Projection { coeffs, rel_error, cond })
}

/// L2 projection of a physical-space field onto the smooth space.
pub fn l2_project(
    geometry: &TwoPatchGeometry,
    basis: &GlobalBasis,
    f: impl Fn([f64; 2]) -> f64,
    with_cond: bool,
) -> Result<Projection> {
    let q = default_points(&basis.space, geometry);
    let quads = patch_quadratures(geometry, &basis.space, q, Weight::Jacobian)?;
    let values = [quads[0].x.iter().map(|&x| f(x)).collect(), quads[1].x.iter().map(|&x| f(x)).collect()];
    l2_project_values(basis, &quads, &values, with_cond)
}

/// One row of a convergence table.
#[derive(Debug, Clone, Serialize)]
pub struct ApproxReport {
    pub level: usize,
    pub dim_v1: usize,
    pub dim_interface: usize,
    pub rel_error: f64,
    pub rate: Option<f64>,
    pub cond: f64,
    pub cond_rate: Option<f64>,
}

/// Level `L` on uniform knots `k = 2^L - 1`: project `f`, record error and conditioning.
pub fn study_level(
    geometry: &TwoPatchGeometry,
    kind: SpaceKind,
    level: usize,
    f: &dyn Fn([f64; 2]) -> f64,
    rule: SelectionRule,
) -> Result<(usize, usize, f64, f64)> {
    let g = geometry
        .gluing
        .ok_or_else(|| Error::InvalidGeometry("geometry carries no gluing data".into()))?;
    let p = geometry.degree();
    let r = geometry.regularity;
    let k = (1usize << level) - 1;
    let base = KnotVector::uniform(p, r, k)?;
    let refined = geometry.refine(&base)?;
    let iface = interface_basis(kind, &g, &base, r, rule)?;
    let basis = GlobalBasis::new(&iface);
    let proj = l2_project(&refined, &basis, f, true)?;
    Ok((basis.n_interior, basis.n_interface, proj.rel_error, proj.cond.unwrap_or(f64::NAN)))
}

/// Dyadic refinement study for levels `0..=levels`. Rows already computed
/// are returned together with the error if a level fails.
pub fn convergence_study(
    geometry: &TwoPatchGeometry,
    kind: SpaceKind,
    levels: usize,
    f: &dyn Fn([f64; 2]) -> f64,
    rule: SelectionRule,
) -> (Vec<ApproxReport>, Option<Error>) {
    let mut out: Vec<ApproxReport> = Vec::new();
    for level in 0..=levels {
        match study_level(geometry, kind, level, f, rule) {
            Ok((dim_v1, dim_interface, rel_error, cond)) => {
                let prev = out.last();
                out.push(ApproxReport {
                    level,
                    dim_v1,
                    dim_interface,
                    rel_error,
                    rate: prev.map(|p| (p.rel_error / rel_error).log2()),
                    cond,
                    cond_rate: prev.map(|p| (p.cond / cond).log2()),
                });
            }
            Err(e) => return (out, Some(e)),
        }
    }
    (out, None)
}

/// CSV with full precision; empty rate cells on the first row.
pub fn reports_to_csv(rows: &[ApproxReport], failure: Option<&Error>) -> String {
    let mut s = String::from("L,dim_V1,dim_V2_or_W2,rel_L2_err,ecr,cond,cond_rate\n");
    let opt = |x: Option<f64>| x.map(|v| format!("{v:e}")).unwrap_or_default();
    for r in rows {
        let _ = writeln!(
            s,
            "{},{},{},{:e},{},{:e},{}",
            r.level,
            r.dim_v1,
            r.dim_interface,
            r.rel_error,
            opt(r.rate),
            r.cond,
            opt(r.cond_rate)
        );
    }
    if let Some(e) = failure {
        let _ = writeln!(s, "error,\"{}\",,,,,", e.to_string().replace('"', "'"));
    }
    s
}

/// A fitted bilinear-like geometry.
#[derive(Debug, Clone)]
pub struct FitResult {
    pub geometry: TwoPatchGeometry,
    pub epsilon: f64,
}

/// L2 fit of each coordinate of `ftilde`, viewed as a function on the
/// parameter squares, in the biquintic C2 space over the bilinear `fhat`.
pub fn fit_bilinear_like(ftilde: &TwoPatchGeometry, fhat: &TwoPatchGeometry, weight: Weight) -> Result<FitResult> {
    let g = gluing_from_bilinear(fhat)?;
    let (p, r) = (5, 2);
    let base = KnotVector::uniform(p, r, 0)?;
    let iface = interface_basis(SpaceKind::V2, &g, &base, r, SelectionRule::default())?;
    let basis = GlobalBasis::new(&iface);
    let q = p + ftilde.degree().max(fhat.degree());
    let quads = patch_quadratures(fhat, &base, q, weight)?;
    let mut coeffs = [vec![], vec![]];
    for (c, out) in coeffs.iter_mut().enumerate() {
        let values = [PatchSide::L, PatchSide::R].map(|side| {
            let patch = ftilde.patch(side);
            quad(&quads, side).uv.iter().map(|&(u, v)| patch.eval(u, v)[c]).collect::<Vec<f64>>()
        });
        *out = l2_project_values(&basis, &quads, &values, false)?.coeffs;
    }
    let n = base.dim();
    let patch = |side: PatchSide| -> Result<TensorPatch> {
        let x = basis.patch_coefficients(&coeffs[0], side);
        let y = basis.patch_coefficients(&coeffs[1], side);
        let ctrl = (0..n * n).map(|i| [x[i], y[i]]).collect();
        TensorPatch::new(crate::bspline::TensorSplineSpace::square(base.clone()), ctrl)
    };
    let mut geometry = TwoPatchGeometry::new(patch(PatchSide::L)?, patch(PatchSide::R)?);
    geometry.regularity = r;
    geometry.gluing = Some(g);
    let epsilon = discrete_relative_error(ftilde, &geometry);
    Ok(FitResult { geometry, epsilon })
}

/// Sum of squared deviations over an 11 x 11 parameter grid on both patches,
/// relative to the sum of squared values of `reference`.
pub fn discrete_relative_error(reference: &TwoPatchGeometry, other: &TwoPatchGeometry) -> f64 {
    let (mut num, mut den) = (0.0, 0.0);
    for side in PatchSide::BOTH {
        for i in 0..=10 {
            for j in 0..=10 {
                let (u, v) = (i as f64 / 10.0, j as f64 / 10.0);
                let a = reference.patch(side).eval(u, v);
                let b = other.patch(side).eval(u, v);
                num += (a[0] - b[0]).powi(2) + (a[1] - b[1]).powi(2);
                den += a[0] * a[0] + a[1] * a[1];
            }
        }
    }
    num / den
}
