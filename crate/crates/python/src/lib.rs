use c2patch::assembly::{convergence_study as study, fit_bilinear_like, interface_basis, SpaceKind, Weight};
use c2patch::bspline::KnotVector;
use c2patch::expr::ScalarField;
use c2patch::fixtures::{self, Example};
use c2patch::geometry::{PatchSide, TwoPatchGeometry};
use c2patch::gluing::{bilinear_from_vertices as corners, gluing_from_bilinear, GluingData, GluingInvariants};
use c2patch::smooth::{constraint_nullspace_dim, dim_gamma, dim_v1, dim_v2, dim_w2, verify_c2_at_interface, SelectionRule};
use pyo3::exceptions::PyValueError;
use pyo3::prelude::*;
use pyo3::types::PyDict;

fn err(e: c2patch::Error) -> PyErr {
    PyValueError::new_err(e.to_string())
}

fn example(name: &str) -> PyResult<Example> {
    match name {
        "a" => Ok(Example::A),
        "b" => Ok(Example::B),
        _ => Err(PyValueError::new_err(format!("unknown example '{name}', expected 'a' or 'b'"))),
    }
}

fn side(s: &str) -> PyResult<PatchSide> {
    match s {
        "L" => Ok(PatchSide::L),
        "R" => Ok(PatchSide::R),
        _ => Err(PyValueError::new_err("side must be 'L' or 'R'")),
    }
}

/// A two-patch planar geometry with optional gluing data.
#[pyclass(name = "Geometry")]
#[derive(Clone)]
pub struct PyGeometry {
    inner: TwoPatchGeometry,
}

impl PyGeometry {
    fn gluing_data(&self) -> PyResult<GluingData> {
        match self.inner.gluing {
            Some(g) => Ok(g),
            None => gluing_from_bilinear(&corners(&self.inner).map_err(err)?).map_err(err),
        }
    }
}

#[pymethods]
impl PyGeometry {
    #[staticmethod]
    fn load(path: &str) -> PyResult<Self> {
        Ok(PyGeometry { inner: TwoPatchGeometry::load(path).map_err(err)? })
    }

    #[staticmethod]
    fn from_json(text: &str) -> PyResult<Self> {
        Ok(PyGeometry { inner: TwoPatchGeometry::from_json(text).map_err(err)? })
    }

    /// Initial bicubic geometry of a bundled example.
    #[staticmethod]
    fn initial(name: &str) -> PyResult<Self> {
        Ok(PyGeometry { inner: fixtures::initial(example(name)?) })
    }

    /// Bilinear-like biquintic geometry of a bundled example.
    #[staticmethod]
    fn reference(name: &str) -> PyResult<Self> {
        Ok(PyGeometry { inner: fixtures::reference_geometry(example(name)?).map_err(err)? })
    }

    fn to_json(&self) -> PyResult<String> {
        self.inner.to_json().map_err(err)
    }

    fn validate(&self) -> PyResult<()> {
        self.inner.validate().map_err(err)
    }

    #[getter]
    fn degree(&self) -> usize {
        self.inner.degree()
    }

    #[getter]
    fn regularity(&self) -> usize {
        self.inner.regularity
    }

    fn eval(&self, side_name: &str, u: f64, v: f64) -> PyResult<(f64, f64)> {
        let x = self.inner.patch(side(side_name)?).eval(u, v);
        Ok((x[0], x[1]))
    }

    /// Gluing data as `{name: (a, b)}` for `a + b v`; derived from the
    /// corner bilinear geometry when none is stored.
    fn gluing<'py>(&self, py: Python<'py>) -> PyResult<Bound<'py, PyDict>> {
        let g = self.gluing_data()?;
        let d = PyDict::new(py);
        for (k, l) in [("alpha_L", g.alpha_l), ("alpha_R", g.alpha_r), ("beta_L", g.beta_l), ("beta_R", g.beta_r)] {
            d.set_item(k, (l.a, l.b))?;
        }
        Ok(d)
    }
}

/// Bilinear geometry through the patch corners, carrying its gluing data.
#[pyfunction]
fn bilinear_from_vertices(geometry: &PyGeometry) -> PyResult<PyGeometry> {
    let mut f = corners(&geometry.inner).map_err(err)?;
    f.gluing = Some(gluing_from_bilinear(&f).map_err(err)?);
    Ok(PyGeometry { inner: f })
}

/// Bilinear-like fit of an initial geometry; returns `(geometry, epsilon)`.
#[pyfunction]
#[pyo3(signature = (initial, unit_weight = false))]
fn fit(initial: &PyGeometry, unit_weight: bool) -> PyResult<(PyGeometry, f64)> {
    let fhat = corners(&initial.inner).map_err(err)?;
    let w = if unit_weight { Weight::Unit } else { Weight::Jacobian };
    let r = fit_bilinear_like(&initial.inner, &fhat, w).map_err(err)?;
    Ok((PyGeometry { inner: r.geometry }, r.epsilon))
}

fn space_kind(s: &str) -> PyResult<SpaceKind> {
    s.parse().map_err(err)
}

fn base_of(geometry: &PyGeometry, k: usize) -> PyResult<(usize, usize, KnotVector)> {
    let p = geometry.inner.degree();
    let r = geometry.inner.regularity;
    Ok((p, r, KnotVector::uniform(p, r, k).map_err(err)?))
}

/// Space dimensions for `k` uniform interior knots.
#[pyfunction]
#[pyo3(signature = (geometry, k = 0))]
fn dimensions<'py>(py: Python<'py>, geometry: &PyGeometry, k: usize) -> PyResult<Bound<'py, PyDict>> {
    let g = geometry.gluing_data()?;
    let (p, r, base) = base_of(geometry, k)?;
    let inv = GluingInvariants::new(&g, &base, r).map_err(err)?;
    let (g0, g1, g2) = dim_gamma(&inv, p, r, k).map_err(err)?;
    let d = PyDict::new(py);
    d.set_item("V1", dim_v1(p, r, k).map_err(err)?)?;
    d.set_item("Gamma", (g0, g1, g2))?;
    d.set_item("V2", dim_v2(&inv, p, r, k).map_err(err)?)?;
    d.set_item("W2", dim_w2(p, r, k, inv.d_alpha).map_err(err)?)?;
    d.set_item("z_beta", inv.z_beta)?;
    Ok(d)
}

/// Interface basis as JSON lines.
#[pyfunction]
#[pyo3(signature = (geometry, space = "v2", k = 0))]
fn basis_json_lines(geometry: &PyGeometry, space: &str, k: usize) -> PyResult<String> {
    let g = geometry.gluing_data()?;
    let (_, r, base) = base_of(geometry, k)?;
    let b = interface_basis(space_kind(space)?, &g, &base, r, SelectionRule::default()).map_err(err)?;
    b.to_json_lines().map_err(err)
}

/// Largest relative C2 defect over all interface basis functions.
#[pyfunction]
#[pyo3(signature = (geometry, space = "v2", k = 0, samples = 50))]
fn max_c2_defect(geometry: &PyGeometry, space: &str, k: usize, samples: usize) -> PyResult<f64> {
    let g = geometry.gluing_data()?;
    let (_, r, base) = base_of(geometry, k)?;
    let b = interface_basis(space_kind(space)?, &g, &base, r, SelectionRule::default()).map_err(err)?;
    let mut worst = 0.0f64;
    for f in &b.functions {
        let c = verify_c2_at_interface(&geometry.inner, &base, f, samples, 1.0).map_err(err)?;
        worst = worst.max(c.value).max(c.gradient).max(c.hessian);
    }
    Ok(worst)
}

/// Interface dimension from the nullspace of the collocated C2 conditions.
#[pyfunction]
#[pyo3(signature = (geometry, k = 0))]
fn oracle_dimension(geometry: &PyGeometry, k: usize) -> PyResult<usize> {
    let g = geometry.gluing_data()?;
    let (_, _, base) = base_of(geometry, k)?;
    Ok(constraint_nullspace_dim(&g, &base).map_err(err)?.nullity)
}

/// Dyadic refinement study; one dict per level.
#[pyfunction]
#[pyo3(signature = (geometry, space = "v2", levels = 2, function = "cossin"))]
fn convergence_study<'py>(
    py: Python<'py>,
    geometry: &PyGeometry,
    space: &str,
    levels: usize,
    function: &str,
) -> PyResult<Vec<Bound<'py, PyDict>>> {
    let mut f = geometry.inner.clone();
    f.gluing = Some(geometry.gluing_data()?);
    let field = ScalarField::parse(function).map_err(err)?;
    let eval = |x: [f64; 2]| field.eval(x);
    let (rows, failure) = study(&f, space_kind(space)?, levels, &eval, SelectionRule::default());
    if let Some(e) = failure {
        return Err(err(e));
    }
    rows.iter()
        .map(|r| {
            let d = PyDict::new(py);
            d.set_item("level", r.level)?;
            d.set_item("dim_v1", r.dim_v1)?;
            d.set_item("dim_interface", r.dim_interface)?;
            d.set_item("rel_error", r.rel_error)?;
            d.set_item("rate", r.rate)?;
            d.set_item("cond", r.cond)?;
            d.set_item("cond_rate", r.cond_rate)?;
            Ok(d)
        })
        .collect()
}

#[pymodule]
pub fn c2patch_py(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<PyGeometry>()?;
    m.add_function(wrap_pyfunction!(bilinear_from_vertices, m)?)?;
    m.add_function(wrap_pyfunction!(fit, m)?)?;
    m.add_function(wrap_pyfunction!(dimensions, m)?)?;
    m.add_function(wrap_pyfunction!(basis_json_lines, m)?)?;
    m.add_function(wrap_pyfunction!(max_c2_defect, m)?)?;
    m.add_function(wrap_pyfunction!(oracle_dimension, m)?)?;
    m.add_function(wrap_pyfunction!(convergence_study, m)?)?;
    Ok(())
}
