// Writes plot data: closed-form indifference beliefs for several k with
// their limits, one row per (wealth, k).
//
// Run with `cargo run --example curves_csv -- /tmp/curves.csv`.

use std::fs::File;
use std::io::BufWriter;

use subjective_calibration::curves::emit_curves;
use subjective_calibration::gamble::{Gamble, WealthSet};
use subjective_calibration::scenario::Scenario;

fn main() -> subjective_calibration::error::Result<()> {
    let path = std::env::args()
        .nth(1)
        .map(std::path::PathBuf::from)
        .unwrap_or_else(|| std::env::temp_dir().join("curves.csv"));
    let scenario = Scenario::new(
        Gamble::new(2.0, 2.0)?,
        Gamble::new(1.0, 1.0)?,
        WealthSet::interval(-4.0, 4.0, 0.5)?,
    )?;
    emit_curves(
        &scenario,
        &[1.0, 4.0, 16.0],
        BufWriter::new(File::create(&path)?),
    )?;
    let rows = std::fs::read_to_string(&path)?.lines().count() - 1;
    println!("wrote {rows} rows to {}", path.display());
    Ok(())
}
