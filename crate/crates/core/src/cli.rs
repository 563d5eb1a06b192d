//! Command-line front end. `run` returns the process exit code.

use crate::assembly::{convergence_study, fit_bilinear_like, interface_basis, reports_to_csv, SpaceKind, Weight};
use crate::bspline::KnotVector;
use crate::error::{Error, Result};
use crate::expr::ScalarField;
use crate::geometry::TwoPatchGeometry;
use crate::gluing::{bilinear_from_vertices, gluing_from_bilinear, verify_bilinear_like, GluingData, GluingInvariants};
use crate::poly::Poly;
use crate::smooth::{constraint_nullspace_dim, dim_gamma, dim_v1, dim_v2, dim_w2, verify_c2_at_interface, SelectionRule};
use clap::{Args, Parser, Subcommand, ValueEnum};
use std::io::Write;
use std::path::PathBuf;

// `println!` panics when stdout is closed early (e.g. piped into `head`).
macro_rules! out {
    ($($arg:tt)*) => {
        writeln!(std::io::stdout(), $($arg)*)?
    };
}

pub const EXIT_OK: i32 = 0;
pub const EXIT_FAIL: i32 = 1;
pub const EXIT_INDETERMINATE: i32 = 2;

#[derive(Debug, Parser)]
#[command(name = "c2patch", version, about = "C2-smooth spline spaces on bilinear-like G2 two-patch domains")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Dimensions of the interior, interface and full spaces.
    Dim(SpaceArgs),
    /// Gluing data, sign condition and derived invariants.
    Gluing(GeometryArg),
    /// Export the interface basis as JSON lines.
    Basis {
        #[command(flatten)]
        space: SpaceArgs,
        #[arg(long = "space", value_enum, default_value_t = SpaceOpt::V2)]
        kind: SpaceOpt,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Check the bilinear-like conditions and the C2 property of the basis.
    Verify {
        #[command(flatten)]
        space: SpaceArgs,
        #[arg(long, default_value_t = 1e-8)]
        tol: f64,
        #[arg(long, default_value_t = 50)]
        samples: usize,
        /// Also compare the formula against the constraint nullspace.
        #[arg(long)]
        oracle: bool,
    },
    /// Fit a bilinear-like biquintic geometry to an initial two-patch geometry.
    Fit {
        #[command(flatten)]
        geometry: GeometryArg,
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long, value_enum, default_value_t = WeightOpt::Jacobian)]
        weight: WeightOpt,
    },
    /// Bilinear geometry through the patch corners, with its gluing data.
    Bilinear {
        #[command(flatten)]
        geometry: GeometryArg,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Dyadic refinement study: errors, rates and condition numbers as CSV.
    Table2 {
        #[command(flatten)]
        geometry: GeometryArg,
        #[arg(long, value_enum, default_value_t = SpaceOpt::V2)]
        space: SpaceOpt,
        #[arg(long, default_value_t = 3)]
        levels: usize,
        #[arg(long)]
        out: Option<PathBuf>,
        /// `cossin` or an expression in x1 and x2.
        #[arg(long, default_value = "cossin")]
        function: String,
        #[arg(long, value_enum, default_value_t = SelectionOpt::Central)]
        selection: SelectionOpt,
    },
}

#[derive(Debug, Args)]
pub struct GeometryArg {
    #[arg(long)]
    pub geometry: PathBuf,
}

#[derive(Debug, Args)]
pub struct SpaceArgs {
    #[command(flatten)]
    pub geometry: GeometryArg,
    /// Spline degree; defaults to the geometry degree.
    #[arg(long)]
    pub degree: Option<usize>,
    /// Regularity at interior knots; defaults to the geometry regularity.
    #[arg(long)]
    pub regularity: Option<usize>,
    /// Number of uniform interior knots.
    #[arg(short, long, default_value_t = 0)]
    pub k: usize,
    #[arg(long, value_enum, default_value_t = SelectionOpt::Central)]
    pub selection: SelectionOpt,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum SpaceOpt {
    V2,
    W2,
}

impl From<SpaceOpt> for SpaceKind {
    fn from(s: SpaceOpt) -> Self {
        match s {
            SpaceOpt::V2 => SpaceKind::V2,
            SpaceOpt::W2 => SpaceKind::W2,
        }
    }
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum SelectionOpt {
    First,
    Central,
    Last,
}

impl From<SelectionOpt> for SelectionRule {
    fn from(s: SelectionOpt) -> Self {
        match s {
            SelectionOpt::First => SelectionRule::First,
            SelectionOpt::Central => SelectionRule::Central,
            SelectionOpt::Last => SelectionRule::Last,
        }
    }
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum WeightOpt {
    Jacobian,
    Unit,
}

/// Six significant digits.
pub fn sig6(x: f64) -> String {
    let a = x.abs();
    if x == 0.0 || (1e-3..1e6).contains(&a) {
        let digits = if x == 0.0 { 5 } else { (5 - a.log10().floor() as i32).max(0) as usize };
        format!("{x:.digits$}")
    } else {
        format!("{x:.5e}")
    }
}

fn poly_str(p: &Poly) -> String {
    let c: Vec<String> = p.coeffs().iter().map(|&x| sig6(x)).collect();
    format!("[{}]", c.join(", "))
}

fn load(path: &PathBuf) -> Result<TwoPatchGeometry> {
    let f = TwoPatchGeometry::load(path)?;
    f.validate()?;
    Ok(f)
}

/// Stored gluing data, or that of the corner bilinear geometry.
fn gluing_of(f: &TwoPatchGeometry) -> Result<GluingData> {
    match f.gluing {
        Some(g) => {
            g.check_sign_condition()?;
            Ok(g)
        }
        None => gluing_from_bilinear(&bilinear_from_vertices(f)?),
    }
}

struct Setup {
    f: TwoPatchGeometry,
    g: GluingData,
    p: usize,
    r: usize,
    k: usize,
    base: KnotVector,
    rule: SelectionRule,
}

fn setup(a: &SpaceArgs) -> Result<Setup> {
    let f = load(&a.geometry.geometry)?;
    let g = gluing_of(&f)?;
    let p = a.degree.unwrap_or_else(|| f.degree());
    let r = a.regularity.unwrap_or(f.regularity);
    let base = KnotVector::uniform(p, r, a.k)?;
    Ok(Setup { f, g, p, r, k: a.k, base, rule: a.selection.into() })
}

fn write_or_print(out: &Option<PathBuf>, text: &str) -> Result<()> {
    match out {
        Some(p) => std::fs::write(p, text)?,
        None => write!(std::io::stdout(), "{text}")?,
    }
    Ok(())
}

fn cmd_dim(a: &SpaceArgs) -> Result<i32> {
    let s = setup(a)?;
    let inv = GluingInvariants::new(&s.g, &s.base, s.r)?;
    let v1 = dim_v1(s.p, s.r, s.k)?;
    let (g0, g1, g2) = dim_gamma(&inv, s.p, s.r, s.k)?;
    let v2 = dim_v2(&inv, s.p, s.r, s.k)?;
    let w2 = dim_w2(s.p, s.r, s.k, inv.d_alpha)?;
    out!("p={} r={} k={}", s.p, s.r, s.k);
    out!("dim V1^2={v1} dim Gamma0={g0} dim Gamma1={g1} dim Gamma2={g2}");
    out!("dim V2^2={v2} dim V^2={} dim W2^2={w2} dim W^2={}", v1 + v2, v1 + w2);
    print_invariants(&inv)?;
    Ok(EXIT_OK)
}

fn print_invariants(inv: &GluingInvariants) -> Result<()> {
    out!(
        "q={} h={} d_alpha={} d_atilde={} d_h={} z_beta={} branch={:?}",
        poly_str(&inv.q),
        poly_str(&inv.h),
        inv.d_alpha,
        inv.d_atilde,
        inv.d_h,
        inv.z_beta,
        inv.branch
    );
    Ok(())
}

fn cmd_gluing(a: &GeometryArg) -> Result<i32> {
    let f = load(&a.geometry)?;
    let g = gluing_of(&f)?;
    let lin = |l: crate::poly::LinearPoly| format!("{} + {} v", sig6(l.a), sig6(l.b));
    out!("alpha_L = {}", lin(g.alpha_l));
    out!("alpha_R = {}", lin(g.alpha_r));
    out!("beta_L = {}", lin(g.beta_l));
    out!("beta_R = {}", lin(g.beta_r));
    out!("beta = {}", poly_str(&g.beta()));
    out!("sign condition: {}", if g.sign_condition() { "ok" } else { "violated" });
    // Invariants on a single-cell space where the construction applies.
    let p = f.degree().max(5);
    let r = f.regularity.min(p - 3);
    let base = KnotVector::uniform(p, r, 0)?;
    let inv = GluingInvariants::new(&g, &base, r)?;
    print_invariants(&inv)?;
    Ok(EXIT_OK)
}

fn cmd_basis(a: &SpaceArgs, kind: SpaceOpt, out: &Option<PathBuf>) -> Result<i32> {
    let s = setup(a)?;
    let b = interface_basis(kind.into(), &s.g, &s.base, s.r, s.rule)?;
    write_or_print(out, &b.to_json_lines()?)?;
    if out.is_some() {
        out!("{} basis functions", b.len());
    }
    Ok(EXIT_OK)
}

fn cmd_verify(a: &SpaceArgs, tol: f64, samples: usize, oracle: bool) -> Result<i32> {
    let s = setup(a)?;
    let mut ok = true;
    let sign = s.g.sign_condition();
    out!("sign condition: {}", if sign { "ok" } else { "violated" });
    ok &= sign;
    let rep = verify_bilinear_like(&s.f, &s.g, samples, tol);
    out!(
        "bilinear-like: interface={} first={} second={} worst_v={} {}",
        sig6(rep.interface),
        sig6(rep.first_order),
        sig6(rep.second_order),
        sig6(rep.worst_v),
        if rep.pass { "OK" } else { "FAIL" }
    );
    ok &= rep.pass;
    for kind in [SpaceKind::V2, SpaceKind::W2] {
        let b = interface_basis(kind, &s.g, &s.base, s.r, s.rule)?;
        let (mut worst, mut fails) = (0.0f64, 0);
        for func in &b.functions {
            let c = verify_c2_at_interface(&s.f, &s.base, func, samples, tol)?;
            worst = worst.max(c.value).max(c.gradient).max(c.hessian);
            if !c.pass {
                fails += 1;
                out!(
                    "  {:?} {:?} j={}: value={} gradient={} hessian={} at v={}",
                    kind,
                    func.family,
                    func.j,
                    sig6(c.value),
                    sig6(c.gradient),
                    sig6(c.hessian),
                    sig6(c.worst_v)
                );
            }
        }
        out!(
            "C2 {kind:?}: {} functions, max residual {} {}",
            b.len(),
            sig6(worst),
            if fails == 0 { "OK" } else { "FAIL" }
        );
        ok &= fails == 0;
    }
    if oracle {
        let inv = GluingInvariants::new(&s.g, &s.base, s.r)?;
        let formula = dim_v2(&inv, s.p, s.r, s.k)?;
        let res = constraint_nullspace_dim(&s.g, &s.base)?;
        let agree = res.nullity == formula;
        out!(
            "oracle={} formula={} {} (singular value gap {})",
            res.nullity,
            formula,
            if agree { "OK" } else { "MISMATCH" },
            sig6(res.gap)
        );
        ok &= agree;
    }
    Ok(if ok { EXIT_OK } else { EXIT_FAIL })
}

fn cmd_fit(a: &GeometryArg, out: &Option<PathBuf>, weight: WeightOpt) -> Result<i32> {
    let ftilde = load(&a.geometry)?;
    let fhat = bilinear_from_vertices(&ftilde)?;
    let w = match weight {
        WeightOpt::Jacobian => Weight::Jacobian,
        WeightOpt::Unit => Weight::Unit,
    };
    let fit = fit_bilinear_like(&ftilde, &fhat, w)?;
    if let Some(p) = out {
        fit.geometry.save(p)?;
    }
    out!("epsilon={}", sig6(fit.epsilon));
    Ok(EXIT_OK)
}

fn cmd_bilinear(a: &GeometryArg, out: &Option<PathBuf>) -> Result<i32> {
    let f = load(&a.geometry)?;
    let mut fhat = bilinear_from_vertices(&f)?;
    fhat.gluing = Some(gluing_from_bilinear(&fhat)?);
    let text = fhat.to_json()?;
    match out {
        Some(p) => std::fs::write(p, text)?,
        None => out!("{text}"),
    }
    Ok(EXIT_OK)
}

fn cmd_table2(
    a: &GeometryArg,
    space: SpaceOpt,
    levels: usize,
    out: &Option<PathBuf>,
    function: &str,
    selection: SelectionOpt,
) -> Result<i32> {
    let mut f = load(&a.geometry)?;
    if f.gluing.is_none() {
        f.gluing = Some(gluing_of(&f)?);
    }
    let field = ScalarField::parse(function)?;
    let eval = |x: [f64; 2]| field.eval(x);
    let (rows, failure) = convergence_study(&f, space.into(), levels, &eval, selection.into());
    let csv = reports_to_csv(&rows, failure.as_ref());
    if let Some(p) = out {
        std::fs::write(p, &csv)?;
    }
    let opt = |x: Option<f64>| x.map(|v| format!("{v:.2}")).unwrap_or_else(|| "-".into());
    out!("{:>2} {:>7} {:>5} {:>12} {:>6} {:>12} {:>6}", "L", "dim_V1", "dim_2", "rel_L2_err", "ecr", "cond", "rate");
    for r in &rows {
        out!(
            "{:>2} {:>7} {:>5} {:>12} {:>6} {:>12} {:>6}",
            r.level,
            r.dim_v1,
            r.dim_interface,
            sig6(r.rel_error),
            opt(r.rate),
            sig6(r.cond),
            opt(r.cond_rate)
        );
    }
    match failure {
        Some(e) => Err(e),
        None => Ok(EXIT_OK),
    }
}

pub fn exit_code(e: &Error) -> i32 {
    match e {
        Error::IndeterminateRank(_) => EXIT_INDETERMINATE,
        _ => EXIT_FAIL,
    }
}

pub fn run(cli: Cli) -> i32 {
    let res = match &cli.command {
        Command::Dim(a) => cmd_dim(a),
        Command::Gluing(a) => cmd_gluing(a),
        Command::Basis { space, kind, out } => cmd_basis(space, *kind, out),
        Command::Verify { space, tol, samples, oracle } => cmd_verify(space, *tol, *samples, *oracle),
        Command::Fit { geometry, out, weight } => cmd_fit(geometry, out, *weight),
        Command::Bilinear { geometry, out } => cmd_bilinear(geometry, out),
        Command::Table2 { geometry, space, levels, out, function, selection } => {
            cmd_table2(geometry, *space, *levels, out, function, *selection)
        }
    };
    match res {
        Ok(code) => code,
        Err(Error::Io(e)) if e.kind() == std::io::ErrorKind::BrokenPipe => EXIT_OK,
        Err(e) => {
            eprintln!("error: {e}");
            exit_code(&e)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn six_significant_digits() {
        assert_eq!(sig6(16825.543), "16825.5");
        assert_eq!(sig6(0.116), "0.116000");
        assert_eq!(sig6(4.27e-5), "4.27000e-5");
        assert_eq!(sig6(1.5e7), "1.50000e7");
        assert_eq!(sig6(0.0), "0.00000");
    }

    #[test]
    fn indeterminate_rank_maps_to_two() {
        assert_eq!(exit_code(&Error::IndeterminateRank("gap".into())), EXIT_INDETERMINATE);
        assert_eq!(exit_code(&Error::SignCondition("x".into())), EXIT_FAIL);
    }

    #[test]
    fn parses_flags() {
        let cli = Cli::try_parse_from(["c2patch", "table2", "--geometry", "g.json", "--space", "w2", "--levels", "2"]).unwrap();
        match cli.command {
            Command::Table2 { levels, space: SpaceOpt::W2, .. } => assert_eq!(levels, 2),
            _ => panic!(),
        }
        assert!(Cli::try_parse_from(["c2patch", "dim"]).is_err());
    }
}
