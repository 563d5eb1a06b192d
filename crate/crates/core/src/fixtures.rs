//! The two bundled example domains: initial bicubic parameterizations and
//! target coefficients of their bilinear-like approximations.

use crate::bspline::{Interpolator, KnotVector, TensorSplineSpace};
use crate::assembly::{fit_bilinear_like, Weight};
use crate::error::{Error, Result};
use crate::gluing::bilinear_from_vertices;
use crate::expr::Expr;
use crate::geometry::{PatchSide, TensorPatch, TwoPatchGeometry};
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Example {
    A,
    B,
}

impl Example {
    pub const ALL: [Example; 2] = [Example::A, Example::B];

    pub fn name(self) -> &'static str {
        match self {
            Example::A => "a",
            Example::B => "b",
        }
    }
}

/// The y-coordinate of the left patch of example (a), as given, misses a
/// factor in one of its higher u-terms; both repairs keep the patch corners on the
/// bilinear interpolant.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum RepairA {
    /// Multiply the `u^2` term by 4.
    #[default]
    QuadraticTimesFour,
    /// Divide the `u^3` term by 4.
    CubicOverFour,
}

/// Polynomial patch from coordinate expressions in `u`, `v`, represented
/// exactly in the tensor Bernstein basis of the given degree.
pub fn polynomial_patch(degree: usize, x: &str, y: &str) -> Result<TensorPatch> {
    let ex = Expr::parse(x, &["u", "v"])?;
    let ey = Expr::parse(y, &["u", "v"])?;
    let kv = KnotVector::uniform(degree, 0, 0)?;
    let it = Interpolator::new(&kv)?;
    let pts = it.points().to_vec();
    let n = pts.len();
    let mut ctrl = vec![[0.0; 2]; n * n];
    for (c, e) in [&ex, &ey].into_iter().enumerate() {
        // Interpolate along v for every u sample, then along u.
        let mut tmp = vec![vec![0.0; n]; n];
        for (a, &u) in pts.iter().enumerate() {
            let s: Vec<f64> = pts.iter().map(|&v| e.eval(&[u, v])).collect();
            tmp[a] = it.coefficients(&s)?;
        }
        for j in 0..n {
            let s: Vec<f64> = (0..n).map(|a| tmp[a][j]).collect();
            let col = it.coefficients(&s)?;
            for i in 0..n {
                ctrl[i * n + j][c] = col[i];
            }
        }
    }
    TensorPatch::new(TensorSplineSpace::square(kv), ctrl)
}

fn pair(degree: usize, l: (&str, &str), r: (&str, &str)) -> TwoPatchGeometry {
    let left = polynomial_patch(degree, l.0, l.1).expect("bundled expression");
    let right = polynomial_patch(degree, r.0, r.1).expect("bundled expression");
    TwoPatchGeometry::new(left, right)
}

/// The initial bicubic two-patch parameterization.
pub fn initial(ex: Example) -> TwoPatchGeometry {
    initial_with(ex, RepairA::default())
}

pub fn initial_with(ex: Example, repair: RepairA) -> TwoPatchGeometry {
    match ex {
        Example::A => {
            let ly = match repair {
                RepairA::QuadraticTimesFour => {
                    "(450*v - u*(75+72*v-477*v^2+280*v^3) + 4*u^2*(-75+279*v-360*v^2+206*v^3) \
                     + u^3*(300-919*v+963*v^2-544*v^3))/150"
                }
                RepairA::CubicOverFour => {
                    "(450*v - u*(75+72*v-477*v^2+280*v^3) + u^2*(-75+279*v-360*v^2+206*v^3) \
                     + u^3*(300-919*v+963*v^2-544*v^3)/4)/150"
                }
            };
            pair(
                3,
                (
                    "(75*v*(2-v-v^2) + u*(-450-234*v+9*v^2+175*v^3) + u^2*v*(-63+261*v-148*v^2) \
                     + u^3*v*(297-845*v+498*v^2))/150",
                    ly,
                ),
                (
                    "(25*v*(2-v-v^2) + u*(175-90*v-21*v^2+86*v^3) - 6*u^2*v*(5-19*v+14*v^2) \
                     + u^3*v*(-55+182*v-127*v^2))/50",
                    "(600*v + 6*u*(-25+33*v+21*v^2+21*v^3) - 12*u^2*v*(-27+42*v+35*v^2) \
                     + u^3*(100-297*v+228*v^2+369*v^3))/200",
                ),
            )
        }
        Example::B => pair(
            3,
            (
                "(50*(-21+81*v-50*v^2+32*v^3) + u*(-1260+513*v+3342*v^2-3645*v^3) \
                 + 15*u^2*(252-576*v+319*v^2+75*v^3) + u^3*(-2520+7227*v-6257*v^2+1550*v^3))/1050",
                "(-350*v*(-1-5*v+3*v^2) + 6*u*(315+266*v-1022*v^2+566*v^3) \
                 + u^2*(770-4158*v+8001*v^2-4013*v^3) + u^3*(-560+3262*v-6349*v^2+3347*v^3))/350",
            ),
            (
                "(50*(-21+81*v-50*v^2+32*v^3) + u*(6300-6480*v+8256*v^2-4926*v^3) \
                 + 3*u^2*(-350+1887*v-3235*v^2+1698*v^3) + u^3*(1050-4491*v+7099*v^2-3658*v^3))/1050",
                "(100*v*(1+5*v-3*v^2) + 3*u*(-80+392*v-716*v^2+379*v^3) \
                 + u^2*(630-2292*v+3264*v^2-1552*v^3) + u^3*(-390+1316*v-1556*v^2+655*v^3))/100",
            ),
        ),
    }
}

/// The bilinear reference parameterizations, written out.
pub fn bilinear(ex: Example) -> TwoPatchGeometry {
    match ex {
        Example::A => pair(
            1,
            ("-u*(9+v)/3", "3*v + u*(-3+5*v)/6"),
            ("7*u*(1-v)/2 + 3*u*v", "-u*(1-v)/4 + 3*(1-u)*v + 7*u*v/2"),
        ),
        Example::B => pair(1, ("-1+3*v", "-3*u*(v-2)+3*v"), ("-1-3*u*(v-2)+3*v", "3*v")),
    }
}

/// Target coefficient polynomials in `v` of `u^0`, `u^1`, `u^2` for each
/// coordinate of the fitted biquintic patches (higher powers of `u` are
/// not prescribed).
pub fn target_fit(ex: Example, side: PatchSide) -> [[Expr; 3]; 2] {
    let s: [[&str; 3]; 2] = match (ex, side) {
        (Example::A, PatchSide::L) => [
            [
                "810*v*(19-10*v-8*v^2-2*v^3+v^4)/16200",
                "9*(-5469-449*v+760*v^2-372*v^3-761*v^4+71*v^5)/16200",
                "(7308-160224*v-29650*v^2+171723*v^3+31872*v^4+2191*v^5)/16200",
            ],
            [
                "162*(-1+300*v-10*v^2+40*v^3-45*v^4+17*v^5)/16200",
                "9*(-738+1578*v-460*v^2+1140*v^3-1641*v^4+371*v^5)/16200",
                "(-39411-8058*v+114472*v^2-10452*v^3-19209*v^4+1018*v^5)/16200",
            ],
        ],
        (Example::A, PatchSide::R) => [
            [
                "360*v*(19-10*v-8*v^2-2*v^3+v^4)/7200",
                "6*(3937+313*v-1008*v^2-212*v^3+233*v^4+21*v^5)/7200",
                "(3692-94752*v+24918*v^2+100483*v^3-27528*v^4+2007*v^5)/7200",
            ],
            [
                "72*(-1+300*v-10*v^2+40*v^3-45*v^4+17*v^5)/7200",
                "6*(-426+938*v-180*v^2+540*v^3-247*v^4+201*v^5)/7200",
                "(-23819+6894*v+70416*v^2-47516*v^3+10047*v^4-126*v^5)/7200",
            ],
        ],
        (Example::B, PatchSide::L) => [
            [
                "(-200+610*v+540*v^2-2080*v^3+2420*v^4-896*v^5)/200",
                "(-128+1675*v-8220*v^2+14780*v^3-10940*v^4+2780*v^5)/200",
                "(-306-6420*v+21885*v^2-6770*v^3-30880*v^4+21709*v^5)/200",
            ],
            [
                "(-2+260*v+640*v^2+140*v^3-680*v^4+238*v^5)/200",
                "(1034+340*v+680*v^2-4190*v^3+3630*v^4-973*v^5)/200",
                "(703-445*v-11810*v^2+10525*v^3+5240*v^4-4562*v^5)/200",
            ],
        ],
        (Example::B, PatchSide::R) => [
            [
                "(-200+610*v+540*v^2-2080*v^3+2420*v^4-896*v^5)/200",
                "(1348-125*v-5340*v^2+10820*v^3-7700*v^4+1700*v^5)/200",
                "(-1368-660*v+8565*v^2+10150*v^3-41140*v^4+23869*v^5)/200",
            ],
            [
                "(-2+260*v+640*v^2+140*v^3-680*v^4+238*v^5)/200",
                "-(514-1960*v+1120*v^2+1670*v^3-1470*v^4+217*v^5)/200",
                "-(-1549+4045*v+3350*v^2+635*v^3-12260*v^4+6074*v^5)/200",
            ],
        ],
    };
    s.map(|c| c.map(|e| Expr::parse(e, &["v"]).expect("bundled expression")))
}

/// Replaces the first three control rows of biquintic single-cell patches
/// by the target `u^0`, `u^1`, `u^2` data; rows three to five are kept.
pub fn with_target_interface(fit: &TwoPatchGeometry, ex: Example) -> Result<TwoPatchGeometry> {
    let mut out = fit.clone();
    for side in PatchSide::BOTH {
        let data = target_fit(ex, side);
        let patch = match side {
            PatchSide::L => &mut out.left,
            PatchSide::R => &mut out.right,
        };
        let (ku, kv) = (&patch.space.u, &patch.space.v);
        if ku.degree() != 5 || ku.dim() != 6 || kv.dim() != 6 {
            return Err(Error::InvalidGeometry("expected single-cell biquintic patches".into()));
        }
        let n = kv.dim();
        let it = Interpolator::new(kv)?;
        for c in 0..2 {
            let rows = data[c]
                .iter()
                .map(|e| it.coefficients(&it.points().iter().map(|&v| e.eval(&[v])).collect::<Vec<_>>()))
                .collect::<Result<Vec<_>>>()?;
            for j in 0..n {
                // Bernstein rows from F, F_u and F_uu / 2 at u = 0.
                let c0 = rows[0][j];
                let c1 = c0 + rows[1][j] / 5.0;
                let c2 = rows[2][j] / 10.0 + 2.0 * c1 - c0;
                patch.ctrl[j][c] = c0;
                patch.ctrl[n + j][c] = c1;
                patch.ctrl[2 * n + j][c] = c2;
            }
        }
    }
    Ok(out)
}

/// Fitted biquintic geometry whose interface data is replaced by the
/// target coefficients. Used as the domain of the convergence tables.
pub fn reference_geometry(ex: Example) -> Result<TwoPatchGeometry> {
    let ft = initial(ex);
    let fhat = bilinear_from_vertices(&ft)?;
    let fit = fit_bilinear_like(&ft, &fhat, Weight::Jacobian)?;
    with_target_interface(&fit.geometry, ex)
}

/// `u^0`, `u^1`, `u^2` Taylor coefficients at `u = 0` of a patch coordinate:
/// `F(0,v)`, `D_u F(0,v)` and `D_uu F(0,v) / 2`.
pub fn taylor_coefficients(patch: &TensorPatch, v: f64) -> [[f64; 3]; 2] {
    let j = patch.jet(0.0, v, 2);
    let mut out = [[0.0; 3]; 2];
    for c in 0..2 {
        out[c] = [j[0][0][c], j[1][0][c], 0.5 * j[2][0][c]];
    }
    out
}
