// Deciding "must the safe option remain optimal?" by brute force: scan
// beliefs and solve a small linear program over concave utilities.
//
// Run with `cargo run --release --example lp_oracle`.

use subjective_calibration::calibration::becomes_worse;
use subjective_calibration::gamble::{Gamble, WealthSet};
use subjective_calibration::oracle::must_remain_optimal_oracle;
use subjective_calibration::scenario::Scenario;

fn main() -> subjective_calibration::error::Result<()> {
    let cases = [
        ((2.0, 1.0), (1.0, 1.0), vec![0.0, 1.0]),
        ((2.0, 2.0), (1.0, 1.0), vec![0.0]),
        ((1.0, 1.0), (1.0, 1.5), vec![0.0]),
        ((1.0, 1.0), (3.0, 1.0), vec![-1.0, 2.0]),
    ];
    for ((a, b), (ah, bh), wealth) in cases {
        let scenario = Scenario::new(
            Gamble::new(a, b)?,
            Gamble::new(ah, bh)?,
            WealthSet::list(wealth)?,
        )?;
        let verdict = must_remain_optimal_oracle(&scenario)?;
        println!(
            "r=({a},{b}) r̂=({ah},{bh}) W={:?}: oracle {} / predicate {} ({} LPs)",
            scenario.wealth.points(),
            verdict.must_remain_optimal,
            becomes_worse(&scenario.r, &scenario.r_hat),
            verdict.cells,
        );
        if let Some(ev) = verdict.evidence {
            println!(
                "  flips at belief {} and wealth {} with margin {:.3e}",
                ev.belief, ev.flip_wealth, ev.margin
            );
            for (x, u) in ev.nodes.iter().zip(&ev.utilities) {
                println!("    u({x:>5}) = {u:.6e}");
            }
        }
    }
    Ok(())
}
