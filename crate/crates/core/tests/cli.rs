use c2patch::geometry::TwoPatchGeometry;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn asset(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../../assets").join(name)
}

fn run(args: &[&str]) -> (i32, String, String) {
    let Output { status, stdout, stderr } =
        Command::new(env!("CARGO_BIN_EXE_c2patch")).args(args).output().expect("binary runs");
    (
        status.code().expect("exit code"),
        String::from_utf8_lossy(&stdout).into_owned(),
        String::from_utf8_lossy(&stderr).into_owned(),
    )
}

fn path_str(p: &Path) -> &str {
    p.to_str().unwrap()
}

#[test]
fn dim_reports_interface_dimensions() {
    let a = asset("a_reference.json");
    let (code, out, _) = run(&["dim", "--geometry", path_str(&a)]);
    assert_eq!(code, 0);
    assert!(out.contains("dim V1^2=36") && out.contains("dim V2^2=15") && out.contains("dim W2^2=15"), "{out}");
    let b = asset("b_reference.json");
    let (code, out, _) = run(&["dim", "--geometry", path_str(&b), "-k", "1"]);
    assert_eq!(code, 0);
    assert!(out.contains("dim V2^2=25"), "{out}");
}

#[test]
fn malformed_json_exits_with_one() {
    let dir = tempfile::tempdir().unwrap();
    let p = dir.path().join("bad.json");
    std::fs::write(&p, "{\"degree\": 5, ").unwrap();
    let (code, _, err) = run(&["dim", "--geometry", path_str(&p)]);
    assert_eq!(code, 1);
    assert!(err.contains("error"), "{err}");
}

#[test]
fn verify_passes_with_oracle() {
    let b = asset("b_reference.json");
    let (code, out, _) = run(&["verify", "--geometry", path_str(&b), "--oracle"]);
    assert_eq!(code, 0, "{out}");
    assert!(out.contains("oracle=18 formula=18 OK"), "{out}");
}

#[test]
fn verify_fails_on_perturbed_geometry() {
    let mut f = TwoPatchGeometry::load(asset("a_reference.json")).unwrap();
    let n = f.left.space.v.dim();
    f.left.ctrl[n + 2][0] += 0.1;
    let dir = tempfile::tempdir().unwrap();
    let p = dir.path().join("perturbed.json");
    f.save(&p).unwrap();
    let (code, out, _) = run(&["verify", "--geometry", path_str(&p)]);
    assert_eq!(code, 1);
    assert!(out.contains("bilinear-like") && out.contains("FAIL"), "{out}");
}

#[test]
fn fit_writes_geometry_and_epsilon() {
    let dir = tempfile::tempdir().unwrap();
    let out_path = dir.path().join("fit.json");
    let (code, out, _) = run(&["fit", "--geometry", path_str(&asset("b_initial.json")), "--out", path_str(&out_path)]);
    assert_eq!(code, 0);
    let eps: f64 = out.trim().strip_prefix("epsilon=").unwrap().parse().unwrap();
    assert!(eps > 0.0 && eps < 1e-4);
    let f = TwoPatchGeometry::load(&out_path).unwrap();
    assert_eq!(f.degree(), 5);
    assert!(f.gluing.is_some());
}

#[test]
fn fit_of_bilinear_input_is_exact() {
    let (code, out, _) = run(&["fit", "--geometry", path_str(&asset("a_bilinear.json"))]);
    assert_eq!(code, 0);
    let eps: f64 = out.trim().strip_prefix("epsilon=").unwrap().parse().unwrap();
    assert!(eps < 1e-12, "{eps}");
}

#[test]
fn fit_rejects_sign_condition_violation() {
    // Both patches on the same side of the interface.
    let mut f = TwoPatchGeometry::load(asset("a_bilinear.json")).unwrap();
    f.right = f.left.clone();
    f.gluing = None;
    let dir = tempfile::tempdir().unwrap();
    let p = dir.path().join("folded.json");
    f.save(&p).unwrap();
    let (code, _, err) = run(&["fit", "--geometry", path_str(&p)]);
    assert_eq!(code, 1);
    assert!(err.contains("sign condition"), "{err}");
}

#[test]
fn bilinear_command_derives_gluing() {
    let (code, out, _) = run(&["bilinear", "--geometry", path_str(&asset("a_initial.json"))]);
    assert_eq!(code, 0);
    let f = TwoPatchGeometry::from_json(&out).unwrap();
    assert_eq!(f.degree(), 1);
    assert!(f.gluing.unwrap().sign_condition());
}

#[test]
fn basis_exports_json_lines() {
    let (code, out, _) = run(&["basis", "--geometry", path_str(&asset("a_reference.json")), "--space", "w2", "-k", "1"]);
    assert_eq!(code, 0);
    let lines: Vec<&str> = out.lines().collect();
    assert_eq!(lines.len(), 18);
    let rec: serde_json::Value = serde_json::from_str(lines[0]).unwrap();
    assert_eq!(rec["rows_L"].as_array().unwrap().len(), 3);
    assert!(rec.get("family").is_some() && rec.get("rows_R").is_some());
}

#[test]
fn table2_level_zero_has_no_rates() {
    let dir = tempfile::tempdir().unwrap();
    let csv = dir.path().join("t.csv");
    let (code, _, _) = run(&[
        "table2",
        "--geometry",
        path_str(&asset("a_reference.json")),
        "--space",
        "v2",
        "--levels",
        "0",
        "--out",
        path_str(&csv),
    ]);
    assert_eq!(code, 0);
    let text = std::fs::read_to_string(&csv).unwrap();
    let rows: Vec<&str> = text.lines().collect();
    assert_eq!(rows[0], "L,dim_V1,dim_V2_or_W2,rel_L2_err,ecr,cond,cond_rate");
    assert_eq!(rows.len(), 2);
    let cells: Vec<&str> = rows[1].split(',').collect();
    assert_eq!(&cells[..3], &["0", "36", "15"]);
    assert!(cells[4].is_empty() && cells[6].is_empty());
}

#[test]
fn table2_accepts_expressions() {
    let (code, out, _) = run(&[
        "table2",
        "--geometry",
        path_str(&asset("b_reference.json")),
        "--space",
        "w2",
        "--levels",
        "1",
        "--function",
        "exp(x1) * sin(x2)",
    ]);
    assert_eq!(code, 0);
    assert_eq!(out.lines().count(), 3);
    let (code, _, err) = run(&["table2", "--geometry", path_str(&asset("b_reference.json")), "--function", "x3 + 1"]);
    assert_eq!(code, 1);
    assert!(err.contains("parse"), "{err}");
}

#[test]
fn bundled_assets_round_trip() {
    for name in ["a", "b"] {
        for kind in ["initial", "bilinear", "fitted", "reference"] {
            let p = asset(&format!("{name}_{kind}.json"));
            let f = TwoPatchGeometry::load(&p).unwrap();
            f.validate().unwrap();
            let back = TwoPatchGeometry::from_json(&f.to_json().unwrap()).unwrap();
            assert_eq!(back, f);
        }
    }
}

#[test]
fn closed_stdout_is_not_an_error() {
    use std::io::{BufRead, BufReader};
    use std::process::Stdio;
    let mut child = Command::new(env!("CARGO_BIN_EXE_c2patch"))
        .args(["basis", "--geometry", path_str(&asset("a_reference.json")), "-k", "31"])
        .stdout(Stdio::piped())
        .stderr(Stdio::piped())
        .spawn()
        .unwrap();
    let mut first = String::new();
    BufReader::new(child.stdout.take().unwrap()).read_line(&mut first).unwrap();
    let out = child.wait_with_output().unwrap();
    assert!(first.starts_with('{'));
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
}
