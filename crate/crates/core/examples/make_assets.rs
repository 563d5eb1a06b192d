//! Writes the bundled geometries to `assets/`.
use c2patch::assembly::{fit_bilinear_like, Weight};
use c2patch::fixtures::{initial, reference_geometry, Example};
use c2patch::gluing::{bilinear_from_vertices, gluing_from_bilinear};
use std::path::PathBuf;

fn main() -> c2patch::Result<()> {
    let dir = PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../assets");
    std::fs::create_dir_all(&dir)?;
    for ex in Example::ALL {
        let name = ex.name();
        let ft = initial(ex);
        ft.save(dir.join(format!("{name}_initial.json")))?;
        let mut fhat = bilinear_from_vertices(&ft)?;
        fhat.gluing = Some(gluing_from_bilinear(&fhat)?);
        fhat.save(dir.join(format!("{name}_bilinear.json")))?;
        let fit = fit_bilinear_like(&ft, &fhat, Weight::Jacobian)?;
        fit.geometry.save(dir.join(format!("{name}_fitted.json")))?;
        reference_geometry(ex)?.save(dir.join(format!("{name}_reference.json")))?;
        println!("{name}: epsilon {:e}", fit.epsilon);
    }
    Ok(())
}
