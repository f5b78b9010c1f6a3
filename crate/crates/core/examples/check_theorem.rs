// When does turning down one bet force turning down another?
//
// Run with `cargo run --example check_theorem`.

use subjective_calibration::calibration::{actuarial_worsening, becomes_worse};
use subjective_calibration::gamble::Gamble;

fn main() -> subjective_calibration::error::Result<()> {
    let pairs = [
        ("same bet", (1.0, 1.0), (1.0, 1.0)),
        ("bigger loss, same gain", (2.0, 1.0), (1.0, 1.0)),
        ("scaled-down copy", (2.0, 2.0), (1.0, 1.0)),
        ("better odds", (1.0, 1.0), (3.0, 1.0)),
        ("bigger loss, worse odds", (1.0, 1.0), (1.0, 1.5)),
    ];
    println!(
        "{:<26} {:>10} {:>10} {:>10}",
        "pair", "worsening", "loss grows", "verdict"
    );
    for (name, (a, b), (ah, bh)) in pairs {
        let r = Gamble::new(a, b)?;
        let r_hat = Gamble::new(ah, bh)?;
        let verdict = if becomes_worse(&r, &r_hat) {
            "keep safe"
        } else {
            "may flip"
        };
        println!(
            "{name:<26} {:>10} {:>10} {verdict:>10}",
            actuarial_worsening(&r, &r_hat),
            r_hat.beta() >= r.beta(),
        );
    }
    Ok(())
}
