use pyo3::prelude::*;
use pyo3::types::PyDict;
use std::ffi::CString;

#[test]
fn module_works_from_python() {
    pyo3::prepare_freethreaded_python();
    Python::with_gil(|py| {
        let m = pyo3::wrap_pymodule!(c2patch_py::c2patch_py)(py);
        let locals = PyDict::new(py);
        locals.set_item("c2", m).unwrap();
        let code = CString::new(
            r#"
geo = c2.Geometry.reference("b")
dims = c2.dimensions(geo, k=1)
assert dims["V1"] == 108 and dims["V2"] == 25 and dims["W2"] == 18, dims
assert c2.oracle_dimension(geo, k=0) == 18
assert c2.max_c2_defect(geo, "v2", 1) < 1e-8
g = c2.bilinear_from_vertices(c2.Geometry.initial("a")).gluing()
assert g["alpha_L"][0] * g["alpha_R"][0] < 0
try:
    c2.dimensions(c2.Geometry.from_json("{}"))
    raise AssertionError("expected ValueError")
except ValueError:
    pass
"#,
        )
        .unwrap();
        py.run(&code, None, Some(&locals)).unwrap();
    });
}
