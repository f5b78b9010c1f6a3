// Flipping on a whole interval of wealth: the kinked utility with slope ι
// above w_lo − β̂, and how the r indifference belief grows as ι shrinks.
//
// Run with `cargo run --example interval_witness`.

use subjective_calibration::gamble::Gamble;
use subjective_calibration::scenario::Settings;
use subjective_calibration::witness::{interval_r_belief, interval_witness};

fn main() -> subjective_calibration::error::Result<()> {
    let r = Gamble::new(2.0, 2.0)?;
    let r_hat = Gamble::new(1.0, 1.0)?;
    let (w_lo, w_hi) = (0.0, 0.5);

    println!("iota   r-indifference at w_lo");
    for iota in [1.0, 0.5, 0.1, 0.01] {
        println!(
            "{iota:<6} {:.6}",
            interval_r_belief(iota, w_lo, w_lo, &r, &r_hat)
        );
    }

    let cert = interval_witness(&r, &r_hat, w_lo, w_hi, 0.01, &Settings::default())?;
    println!("\ncertificate: {:?}", cert.kind);
    println!(
        "belief {:.6} works at {} wealths",
        cert.belief.value(),
        cert.flip_wealths.len()
    );
    println!(
        "margins: s over r ≥ {:.4}, r̂ over s ≥ {:.4}",
        cert.min_safe_margin(),
        cert.min_flip_margin()
    );

    match interval_witness(&r, &r_hat, 0.0, 1.0, 0.01, &Settings::default()) {
        Err(e) => println!("\n[0, 1] is too wide: {e}"),
        Ok(_) => unreachable!(),
    }
    Ok(())
}
