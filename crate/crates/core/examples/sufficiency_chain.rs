// Why a worse bet stays rejected: the chain of beliefs linking the two
// indifference beliefs, under a state-dependent concave utility.
//
// Run with `cargo run --example sufficiency_chain`.

use subjective_calibration::calibration::sufficiency_chain_check;
use subjective_calibration::gamble::Gamble;
use subjective_calibration::utility::{PiecewiseUtility, StateUtility};

fn main() -> subjective_calibration::error::Result<()> {
    let u0 = PiecewiseUtility::interpolate(&[-4.0, -1.0, 0.0, 2.0], &[-9.0, -2.0, 0.0, 1.0])?;
    let u1 = PiecewiseUtility::interpolate(&[-2.0, 0.5, 3.0], &[-3.0, 0.5, 1.5])?;
    let su = StateUtility::new(u0, u1);
    assert!(su.u0.validate(0.01).passed() && su.u1.validate(0.01).passed());

    let r = Gamble::new(2.0, 1.0)?;
    let r_hat = Gamble::new(2.2, 1.2)?;
    for w in [-1.0, 0.0, 0.3, 1.5] {
        let chain = sufficiency_chain_check(&su, &r, &r_hat, w)?;
        let shown: Vec<String> = chain.values.iter().map(|v| format!("{v:.5}")).collect();
        println!("w={w:>4}: {}", shown.join(" ≥ "));
        assert!(chain.is_nonincreasing(1e-12));
    }
    Ok(())
}
