// A counterexample for a scaled-down bet: an agent who rejects r = (2, 2)
// at every wealth in [-10, 10] but accepts r̂ = (1, 1) at wealth 0.
//
// Run with `cargo run --example large_k_witness`.

use subjective_calibration::gamble::{Gamble, WealthSet};
use subjective_calibration::scenario::Scenario;
use subjective_calibration::witness::{find_witness, WitnessOutcome};

fn main() -> subjective_calibration::error::Result<()> {
    let scenario = Scenario::new(
        Gamble::new(2.0, 2.0)?,
        Gamble::new(1.0, 1.0)?,
        WealthSet::interval(-10.0, 10.0, 0.05)?,
    )?;
    let WitnessOutcome::Witness(cert) = find_witness(&scenario)? else {
        println!("the safe option must remain optimal");
        return Ok(());
    };
    println!("kind: {:?}", cert.kind);
    println!("belief: {:.6}", cert.belief.value());
    println!("wealths checked: {}", cert.verified_wealths.len());
    println!(
        "smallest s-over-r belief margin: {:.6}",
        cert.min_safe_margin()
    );
    println!("r̂-over-s belief margin at 0: {:.6}", cert.min_flip_margin());
    let worst = cert.reverify(1e-12).expect("certificate re-verifies");
    println!("re-verified, largest relative drift {worst:e}");

    let path = std::env::temp_dir().join("large_k_certificate.toml");
    cert.save(&path)?;
    println!("certificate written to {}", path.display());
    Ok(())
}
