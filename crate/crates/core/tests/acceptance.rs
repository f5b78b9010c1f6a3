//! End-to-end acceptance run. Prints one PASS/FAIL line per criterion and
//! exits nonzero if any criterion fails.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

use std::process::ExitCode;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use subjective_calibration::calibration::{becomes_worse, remark_condition};
use subjective_calibration::gamble::{Gamble, GeneralGamble};
use subjective_calibration::preference::{
    classify_region, closed_form_belief, indifference_belief, limit_belief, matching_regions,
    RegionLabel,
};
use subjective_calibration::scenario::Settings;
use subjective_calibration::suites::{
    necessity_suite, oracle_suite, random_general_pair, remark_suite, sufficiency_suite,
    SuiteReport, DEFAULT_SEED,
};
use subjective_calibration::utility::{PiecewiseUtility, StateUtility};
use subjective_calibration::witness::{
    interval_certificate, interval_r_belief, interval_witness, WitnessKind,
};

type Outcome = Result<String, String>;

fn g(a: f64, b: f64) -> Gamble {
    Gamble::new(a, b).unwrap()
}

fn ladder() -> Vec<f64> {
    (0..=8).map(|i| f64::powi(2.0, i)).collect()
}

/// `[-6, 6]` at step 0.01, built from integers so that ±1 are exact.
fn grid() -> Vec<f64> {
    (-600..=600).map(|i| i as f64 / 100.0).collect()
}

fn rel(a: f64, b: f64) -> f64 {
    (a - b).abs() / b.abs()
}

/// Every label matching a wealth (several on boundaries) against the
/// indifference belief computed from the utility itself.
fn agreement(
    r: &Gamble,
    r_hat: &Gamble,
    wealths: &[f64],
    seen: &mut Vec<RegionLabel>,
) -> Result<(usize, f64), String> {
    let mut checked = 0;
    let mut worst: f64 = 0.0;
    for k in ladder() {
        let u = PiecewiseUtility::theorem_witness(k, r_hat).map_err(|e| e.to_string())?;
        if !u.validate(0.005).passed() {
            continue;
        }
        let su = StateUtility::state_independent(u);
        for &w in wealths {
            let direct = indifference_belief(&su, w, r, 0.0).map_err(|e| e.to_string())?;
            for label in matching_regions(w, r, r_hat) {
                let closed =
                    closed_form_belief(label, w, k, r, r_hat).map_err(|e| e.to_string())?;
                let d = rel(closed, direct);
                worst = worst.max(d);
                if !(d <= 1e-9) {
                    return Err(format!(
                        "{label} at w={w}, k={k}: closed {closed} vs direct {direct}"
                    ));
                }
                if !seen.contains(&label) {
                    seen.push(label);
                }
                checked += 1;
            }
        }
    }
    Ok((checked, worst))
}

fn criterion_1() -> Outcome {
    let mut seen = Vec::new();
    let (n, worst) = agreement(&g(2.0, 2.0), &g(1.0, 1.0), &grid(), &mut seen)?;
    let main_labels = seen.len();
    // Case 2 needs α > α̂ + β̂ and Case 4 needs β > α̂ + β̂; Cases 5 and 6
    // need the reverse. No single pair has all nine with positive width.
    let extra: Vec<f64> = (-800..=800).map(|i| i as f64 / 100.0).collect();
    let (n2, w2) = agreement(&g(3.0, 3.0), &g(1.0, 1.0), &extra, &mut seen)?;
    let (n3, w3) = agreement(&g(1.5, 1.5), &g(1.0, 1.0), &extra, &mut seen)?;
    let expected = RegionLabel::SCAN_ORDER
        .iter()
        .filter(|l| **l != RegionLabel::Interior);
    let missing: Vec<String> = expected
        .filter(|l| !seen.contains(l))
        .map(|l| l.to_string())
        .collect();
    if !missing.is_empty() {
        return Err(format!("regions never exercised: {missing:?}"));
    }
    Ok(format!(
        "{} comparisons, worst relative gap {:.1e}; r=(2,2) grid covers {main_labels} labels, (3,3) and (1.5,1.5) complete all nine",
        n + n2 + n3,
        worst.max(w2).max(w3)
    ))
}

fn criterion_2() -> Outcome {
    let (r, r_hat) = (g(2.0, 2.0), g(1.0, 1.0));
    let k = 256.0;
    let mut lowest = f64::INFINITY;
    let mut case5 = 0;
    for w in grid() {
        for label in matching_regions(w, &r, &r_hat) {
            let mu = closed_form_belief(label, w, k, &r, &r_hat).map_err(|e| e.to_string())?;
            if label == RegionLabel::Case5 {
                let limit = limit_belief(label, w, &r, &r_hat).map_err(|e| e.to_string())?;
                if !((mu - limit).abs() <= 1e-3) {
                    return Err(format!("case5 at w={w}: {mu} vs limit {limit}"));
                }
                case5 += 1;
            } else if label == classify_region(w, &r, &r_hat) {
                lowest = lowest.min(mu);
                if !(mu >= 0.999) {
                    return Err(format!("{label} at w={w}: belief {mu} < 0.999"));
                }
            }
        }
    }
    let extreme: Vec<f64> = ladder()
        .iter()
        .map(|&k| closed_form_belief(RegionLabel::ExtremeHigh, 10.0, k, &r, &r_hat).unwrap())
        .collect();
    if extreme.windows(2).any(|p| p[1] < p[0]) {
        return Err(format!(
            "extreme-region belief not nondecreasing in k: {extreme:?}"
        ));
    }
    let mut case1 = 0;
    for k in ladder().into_iter().filter(|k| *k >= 8.0) {
        for w in grid() {
            if classify_region(w, &r, &r_hat) == RegionLabel::Case1 {
                let mu = closed_form_belief(RegionLabel::Case1, w, k, &r, &r_hat).unwrap();
                let bound = 1.0 - (-r.beta() * k).exp();
                if !(mu >= bound) {
                    return Err(format!("case1 bound fails at w={w}, k={k}: {mu} < {bound}"));
                }
                case1 += 1;
            }
        }
    }
    Ok(format!(
        "lowest non-case5 belief at k=256 is {lowest:.12}; {case5} case5 points at their limit; extreme belief nondecreasing over the ladder; case1 bound held at {case1} points"
    ))
}

fn suite_outcome(report: &SuiteReport) -> Outcome {
    if report.passed() {
        Ok(report.summary())
    } else {
        Err(format!(
            "{} first: {}",
            report.summary(),
            report.violations[0]
        ))
    }
}

fn criterion_6() -> Outcome {
    let (r, r_hat) = (g(2.0, 2.0), g(1.0, 1.0));
    let settings = Settings::default();
    let at_zero = interval_r_belief(0.1, 0.0, 0.0, &r, &r_hat);
    if !((at_zero - 1.1 / 1.3).abs() <= 1e-12) {
        return Err(format!(
            "r-indifference at 0 is {at_zero}, expected 1.1/1.3"
        ));
    }
    let cert = interval_certificate(&r, &r_hat, 0.1, 0.0, 0.5, 0.01, &settings)
        .map_err(|e| e.to_string())?;
    cert.reverify(1e-12)?;
    let grid_points = cert.flip_wealths.len();
    if grid_points != 51 || cert.verified_wealths != cert.flip_wealths {
        return Err(format!("certificate covers {grid_points} wealths"));
    }
    let found =
        interval_witness(&r, &r_hat, 0.0, 0.5, 0.01, &settings).map_err(|e| e.to_string())?;
    if !matches!(found.kind, WitnessKind::Interval { .. }) {
        return Err(format!("search returned {:?}", found.kind));
    }
    let mut beliefs = Vec::new();
    for iota in [1.0, 0.5, 0.1, 0.01] {
        let su = StateUtility::state_independent(
            PiecewiseUtility::proposition_witness(iota, 0.0, &r_hat).unwrap(),
        );
        let direct = indifference_belief(&su, 0.0, &r, 0.0).unwrap();
        let formula = interval_r_belief(iota, 0.0, 0.0, &r, &r_hat);
        if !((direct - formula).abs() <= 1e-12) {
            return Err(format!(
                "iota={iota}: utility gives {direct}, formula {formula}"
            ));
        }
        beliefs.push(formula);
    }
    if beliefs.windows(2).any(|p| !(p[1] > p[0])) {
        return Err(format!("not strictly decreasing in iota: {beliefs:?}"));
    }
    Ok(format!(
        "1.1/1.3 reproduced; iota=0.1 certificate belief {:.6} holds at {grid_points} wealths; search stops at {:?}; beliefs over iota 1,0.5,0.1,0.01: {beliefs:.6?}",
        cert.belief.value(),
        found.kind
    ))
}

/// The pairwise conditions, written out loop by loop.
fn nested_loop_check(r: &GeneralGamble, r_hat: &GeneralGamble) -> bool {
    let (p, q) = (r.payoffs(), r_hat.payoffs());
    let mut ok = true;
    for s in 0..p.len() {
        if p[s].1 < 0.0 {
            let (beta, beta_hat) = (-p[s].1, -q[s].1);
            ok &= beta_hat >= beta;
            for t in 0..p.len() {
                if p[t].1 > 0.0 {
                    let (alpha, alpha_hat) = (p[t].1, q[t].1);
                    ok &= alpha * beta_hat >= alpha_hat * beta;
                }
            }
        }
    }
    ok
}

fn criterion_7() -> Outcome {
    let report = remark_suite(DEFAULT_SEED, 200, 100).map_err(|e| e.to_string())?;
    if !report.passed() {
        return suite_outcome(&report);
    }
    let mut rng = ChaCha8Rng::seed_from_u64(DEFAULT_SEED ^ 0x5eed);
    let mut agree_binary = 0;
    let mut worse = 0;
    for _ in 0..200 {
        let mut stake = || rng.random_range(2..=50) as f64 / 10.0;
        let (r, r_hat) = (g(stake(), stake()), g(stake(), stake()));
        let remark = remark_condition(
            &GeneralGamble::from_binary(&r),
            &GeneralGamble::from_binary(&r_hat),
        )
        .unwrap();
        if remark != becomes_worse(&r, &r_hat) {
            return Err(format!("binary pair {r:?} {r_hat:?} disagrees"));
        }
        agree_binary += 1;
        worse += remark as usize;
    }
    let mut agree_general = 0;
    let mut holds = 0;
    for _ in 0..100 {
        let states = rng.random_range(2..=6);
        let (r, r_hat) = random_general_pair(&mut rng, states);
        let remark = remark_condition(&r, &r_hat).unwrap();
        if remark != nested_loop_check(&r, &r_hat) {
            return Err(format!(
                "general pair {:?} {:?} disagrees",
                r.payoffs(),
                r_hat.payoffs()
            ));
        }
        agree_general += 1;
        holds += remark as usize;
    }
    Ok(format!(
        "{}; independent rerun: {agree_binary}/200 binary ({worse} worse), {agree_general}/100 general ({holds} satisfied)",
        report.summary()
    ))
}

fn main() -> ExitCode {
    let mut results: Vec<(&str, Outcome)> = Vec::new();
    results.push(("closed-form agreement", criterion_1()));
    results.push(("limit reproduction", criterion_2()));

    let run = |seed| -> Result<[SuiteReport; 3], String> {
        Ok([
            sufficiency_suite(seed, 10_000).map_err(|e| e.to_string())?,
            necessity_suite(seed, 1_000).map_err(|e| e.to_string())?,
            oracle_suite(seed, 500).map_err(|e| e.to_string())?,
        ])
    };
    let first = run(DEFAULT_SEED);
    match &first {
        Ok([suff, nec, ora]) => {
            results.push(("sufficiency property", suite_outcome(suff)));
            results.push(("necessity property", suite_outcome(nec)));
            results.push(("oracle equivalence", suite_outcome(ora)));
        }
        Err(e) => {
            for name in [
                "sufficiency property",
                "necessity property",
                "oracle equivalence",
            ] {
                results.push((name, Err(e.clone())));
            }
        }
    }
    results.push(("proposition reproduction", criterion_6()));
    results.push(("remark specialization", criterion_7()));

    let determinism = match (&first, &run(DEFAULT_SEED)) {
        (Ok(a), Ok(b)) => {
            let same: Vec<bool> = a
                .iter()
                .zip(b)
                .map(|(x, y)| x.render() == y.render())
                .collect();
            if same.iter().all(|s| *s) {
                let bytes: usize = a.iter().map(|x| x.render().len()).sum();
                Ok(format!(
                    "two runs of suites 3-5 produced identical reports ({bytes} bytes)"
                ))
            } else {
                Err(format!("reports differ between runs: {same:?}"))
            }
        }
        (Err(e), _) | (_, Err(e)) => Err(e.clone()),
    };
    results.push(("determinism", determinism));

    let mut failed = 0;
    for (i, (name, outcome)) in results.iter().enumerate() {
        match outcome {
            Ok(detail) => println!("criterion {} {name}: PASS ({detail})", i + 1),
            Err(detail) => {
                failed += 1;
                println!("criterion {} {name}: FAIL ({detail})", i + 1);
            }
        }
    }
    println!(
        "acceptance: {} passed, {failed} failed",
        results.len() - failed
    );
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
