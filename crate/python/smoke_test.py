"""Smoke test for the c2patch_py extension module."""
import json

import c2patch_py as c2


def main():
    geo = c2.Geometry.reference("a")
    geo.validate()
    assert geo.degree == 5

    dims = c2.dimensions(geo, k=0)
    assert dims["V1"] == 36 and dims["V2"] == 15 and dims["W2"] == 15, dims
    assert c2.dimensions(c2.Geometry.reference("b"), k=1)["V2"] == 25
    assert c2.oracle_dimension(geo, k=1) == 19

    lines = c2.basis_json_lines(geo, "v2", 0).splitlines()
    assert len(lines) == 15
    rec = json.loads(lines[0])
    assert set(rec) == {"family", "j", "rows_L", "rows_R"}
    assert c2.max_c2_defect(geo, "w2", 1) < 1e-8

    initial = c2.Geometry.initial("b")
    fitted, eps = c2.fit(initial)
    assert 0.0 < eps < 1e-3
    back = c2.Geometry.from_json(fitted.to_json())
    assert back.eval("L", 0.3, 0.4) == fitted.eval("L", 0.3, 0.4)
    assert set(c2.bilinear_from_vertices(initial).gluing()) == {"alpha_L", "alpha_R", "beta_L", "beta_R"}

    rows = c2.convergence_study(geo, "w2", 1)
    assert [r["dim_interface"] for r in rows] == [15, 18]
    assert rows[1]["rel_error"] < rows[0]["rel_error"]
    print("smoke test ok:", [(r["level"], f"{r['rel_error']:.3e}", f"{r['cond']:.1f}") for r in rows])


if __name__ == "__main__":
    main()
