//! Recomputes the per-class φ constants used by the generators.
//!
//! `cargo run --release --example calibrate_phi -- [seeds] [shapes]`

use hitset::geom::{calibrate_scc_constant, GenParams, ShapeClass, CALIBRATION_MAX_WIDTH};

fn main() -> hitset::Result<()> {
    let mut args = std::env::args().skip(1);
    let seeds: u64 = args.next().and_then(|s| s.parse().ok()).unwrap_or(50);
    let shapes: usize = args.next().and_then(|s| s.parse().ok()).unwrap_or(400);
    let params = GenParams::default();
    for class in ShapeClass::ALL {
        let c =
            calibrate_scc_constant(class, 12, shapes, 0..seeds, &params, CALIBRATION_MAX_WIDTH)?;
        println!("{class:<11} c = {c:.4}");
    }
    Ok(())
}
