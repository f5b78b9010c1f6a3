// The condition for gambles over more than two states: every loss grows
// and every gain/loss ratio falls.
//
// Run with `cargo run --example general_states`.

use subjective_calibration::calibration::remark_condition;
use subjective_calibration::gamble::{GeneralGamble, StateSign};

fn main() -> subjective_calibration::error::Result<()> {
    let r = GeneralGamble::new(vec![(1.0, 2.0), (2.0, 4.0), (3.0, -2.0), (4.0, 0.0)])?;
    let candidates = [
        vec![(1.0, 1.0), (2.0, 2.0), (3.0, -2.0), (4.0, 0.0)],
        vec![(1.0, 3.0), (2.0, 2.0), (3.0, -2.0), (4.0, 0.0)],
        vec![(1.0, 1.0), (2.0, 2.0), (3.0, -1.0), (4.0, 0.0)],
        vec![(1.0, 1.0), (2.0, 2.0), (3.0, -2.0), (4.0, 1.0)],
    ];
    let partition = |g: &GeneralGamble| {
        g.signs()
            .iter()
            .map(|s| match s {
                StateSign::Gain => '+',
                StateSign::Loss => '-',
                StateSign::Zero => '0',
            })
            .collect::<String>()
    };
    println!("r = {:?}  signs {}", r.payoffs(), partition(&r));
    for c in candidates {
        let r_hat = GeneralGamble::new(c)?;
        let verdict = match remark_condition(&r, &r_hat) {
            Ok(true) => "must keep rejecting".to_string(),
            Ok(false) => "may flip".to_string(),
            Err(e) => format!("not comparable: {e}"),
        };
        println!(
            "r̂ = {:?}  signs {}  → {verdict}",
            r_hat.payoffs(),
            partition(&r_hat)
        );
    }
    Ok(())
}
