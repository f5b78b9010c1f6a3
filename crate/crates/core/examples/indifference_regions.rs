// Indifference beliefs of the kinked witness across wealth: region labels,
// closed forms against direct evaluation, and the k → ∞ limits.
//
// Run with `cargo run --example indifference_regions`.

use subjective_calibration::gamble::Gamble;
use subjective_calibration::preference::{
    classify_region, closed_form_belief, indifference_belief, limit_belief,
};
use subjective_calibration::utility::{PiecewiseUtility, StateUtility};

fn main() -> subjective_calibration::error::Result<()> {
    let r = Gamble::new(2.0, 2.0)?;
    let r_hat = Gamble::new(1.0, 1.0)?;
    let ks = [1.0, 4.0, 16.0, 64.0];
    let witnesses = ks
        .iter()
        .map(|&k| PiecewiseUtility::theorem_witness(k, &r_hat).map(StateUtility::state_independent))
        .collect::<Result<Vec<_>, _>>()?;

    print!("{:>6} {:<12}", "w", "region");
    for k in ks {
        print!(" {:>10}", format!("k={k}"));
    }
    println!(" {:>8}", "limit");
    for i in -12..=12 {
        let w = i as f64 * 0.5;
        let region = classify_region(w, &r, &r_hat);
        print!("{w:>6.1} {region:<12}");
        for (&k, su) in ks.iter().zip(&witnesses) {
            let closed = closed_form_belief(region, w, k, &r, &r_hat)?;
            let direct = indifference_belief(su, w, &r, 0.0)?;
            assert!((closed - direct).abs() <= 1e-9 * direct);
            print!(" {closed:>10.6}");
        }
        println!(" {:>8.4}", limit_belief(region, w, &r, &r_hat)?);
    }
    Ok(())
}
