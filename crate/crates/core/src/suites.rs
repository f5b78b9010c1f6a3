//! Seeded property suites behind the `verify` subcommand.
//!
//! Instances are drawn sequentially from one ChaCha stream per suite and
//! then evaluated in parallel, so a report depends only on the seed.

use std::fmt::Write as _;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::calibration::{becomes_worse, remark_condition, sufficiency_chain_check};
use crate::error::Result;
use crate::gamble::{Gamble, GeneralGamble, WealthSet};
use crate::oracle::{must_remain_optimal_oracle, LpInstance};
use crate::scenario::Scenario;
use crate::utility::{PiecewiseUtility, StateUtility};
use crate::witness::{find_witness, WitnessOutcome};

pub const DEFAULT_SEED: u64 = 20_240_501;

/// Chain steps may rise by at most this much.
pub const CHAIN_TOLERANCE: f64 = 1e-10;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SuiteSizes {
    pub sufficiency: usize,
    pub necessity: usize,
    pub oracle: usize,
    pub remark_binary: usize,
    pub remark_general: usize,
}

impl Default for SuiteSizes {
    fn default() -> Self {
        SuiteSizes {
            sufficiency: 10_000,
            necessity: 1_000,
            oracle: 500,
            remark_binary: 200,
            remark_general: 100,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SuiteReport {
    pub suite: &'static str,
    pub seed: u64,
    pub instances: usize,
    /// One line per failing instance.
    pub violations: Vec<String>,
    /// One line per instance, in generation order.
    pub records: Vec<String>,
}

impl SuiteReport {
    fn new(suite: &'static str, seed: u64, outcomes: Vec<(String, Option<String>)>) -> Self {
        let instances = outcomes.len();
        let (records, violations): (Vec<String>, Vec<Option<String>>) =
            outcomes.into_iter().unzip();
        SuiteReport {
            suite,
            seed,
            instances,
            violations: violations.into_iter().flatten().collect(),
            records,
        }
    }

    pub fn passed(&self) -> bool {
        self.violations.is_empty()
    }

    pub fn summary(&self) -> String {
        format!(
            "suite={} seed={} instances={} violations={}",
            self.suite,
            self.seed,
            self.instances,
            self.violations.len()
        )
    }

    /// Summary, every violation and every record.
    pub fn render(&self) -> String {
        let mut out = self.summary();
        out.push('\n');
        for v in &self.violations {
            let _ = writeln!(out, "violation {v}");
        }
        for r in &self.records {
            let _ = writeln!(out, "{r}");
        }
        out
    }
}

fn gamble(alpha: f64, beta: f64) -> Gamble {
    Gamble::new(alpha, beta).expect("generated stakes are positive")
}

fn fmt_g(g: &Gamble) -> String {
    format!("({:e},{:e})", g.alpha(), g.beta())
}

/// A concave increasing piecewise-linear utility with 2 to 8 random nodes
/// in `[-25, 25]`.
pub fn random_concave_utility(rng: &mut impl Rng) -> PiecewiseUtility {
    let n = rng.random_range(2..=8);
    let mut xs: Vec<f64> = (0..n).map(|_| rng.random_range(-25.0..25.0)).collect();
    xs.sort_by(f64::total_cmp);
    xs.dedup();
    if xs.len() < 2 {
        xs = vec![-1.0, 1.0];
    }
    let mut slopes: Vec<f64> = (1..xs.len())
        .map(|_| rng.random_range(-4.0f64..2.0).exp())
        .collect();
    slopes.sort_by(|a, b| b.total_cmp(a));
    let mut ys = vec![rng.random_range(-5.0..5.0)];
    for (i, s) in slopes.iter().enumerate() {
        ys.push(ys[i] + s * (xs[i + 1] - xs[i]));
    }
    PiecewiseUtility::interpolate(&xs, &ys).expect("nodes are distinct")
}

/// A pair satisfying `β̂ ≥ β` and `α/β ≥ α̂/β̂`, with exact ties in either
/// condition about a tenth of the time each.
pub fn random_worse_pair(rng: &mut impl Rng) -> (Gamble, Gamble) {
    let alpha = rng.random_range(0.1..5.0);
    let beta = rng.random_range(0.1..5.0);
    let beta_hat = if rng.random_bool(0.1) {
        beta
    } else {
        beta * rng.random_range(1.0..2.0)
    };
    let ceiling = alpha * beta_hat / beta;
    let alpha_hat = if rng.random_bool(0.1) {
        ceiling
    } else {
        ceiling * rng.random_range(0.1..1.0)
    };
    let (r, r_hat) = (gamble(alpha, beta), gamble(alpha_hat, beta_hat));
    if becomes_worse(&r, &r_hat) {
        (r, r_hat)
    } else {
        // the tie ceiling can round past the ratio; fall back to a strict pair
        (r, gamble(0.5 * ceiling, beta_hat))
    }
}

/// Random state-dependent concave utilities against random pairs that
/// become worse; the three-chord chain must be nonincreasing.
pub fn sufficiency_suite(seed: u64, n: usize) -> Result<SuiteReport> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let cases: Vec<_> = (0..n)
        .map(|_| {
            let su = StateUtility::new(
                random_concave_utility(&mut rng),
                random_concave_utility(&mut rng),
            );
            let (r, r_hat) = random_worse_pair(&mut rng);
            let w = rng.random_range(-10.0..10.0);
            (su, r, r_hat, w)
        })
        .collect();
    let outcomes = cases
        .par_iter()
        .enumerate()
        .map(|(i, (su, r, r_hat, w))| {
            let chain = sufficiency_chain_check(su, r, r_hat, *w)?;
            let values: Vec<String> = chain.values.iter().map(|v| format!("{v:.16e}")).collect();
            let record = format!(
                "{i} r={} r_hat={} w={w:e} chain=[{}]",
                fmt_g(r),
                fmt_g(r_hat),
                values.join(",")
            );
            let violation = chain
                .first_violation(CHAIN_TOLERANCE)
                .map(|step| format!("{record} step={step}"));
            Ok((record, violation))
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(SuiteReport::new("sufficiency", seed, outcomes))
}

/// Stakes in `[0.1, 10]` with the pair not becoming worse.
pub fn random_flip_pair(rng: &mut impl Rng) -> (Gamble, Gamble) {
    loop {
        let mut s = || rng.random_range(0.1..=10.0);
        let (r, r_hat) = (gamble(s(), s()), gamble(s(), s()));
        if !becomes_worse(&r, &r_hat) {
            return (r, r_hat);
        }
    }
}

/// Every pair that does not become worse must get a certificate on
/// `[-20, 20]` at step 0.05 that re-verifies independently.
pub fn necessity_suite(seed: u64, n: usize) -> Result<SuiteReport> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let pairs: Vec<_> = (0..n).map(|_| random_flip_pair(&mut rng)).collect();
    let wealth = WealthSet::interval(-20.0, 20.0, 0.05)?;
    let outcomes = pairs
        .par_iter()
        .enumerate()
        .map(|(i, (r, r_hat))| {
            let head = format!("{i} r={} r_hat={}", fmt_g(r), fmt_g(r_hat));
            let scenario = Scenario::new(*r, *r_hat, wealth.clone())?;
            let outcome = match find_witness(&scenario) {
                Ok(o) => o,
                Err(e) => {
                    return Ok((
                        format!("{head} error={}", e.kind()),
                        Some(format!("{head} {e}")),
                    ))
                }
            };
            let cert = match outcome {
                WitnessOutcome::Witness(c) => c,
                WitnessOutcome::MustRemainOptimal => {
                    return Ok((head.clone(), Some(format!("{head} no certificate"))))
                }
            };
            let record = format!(
                "{head} kind={:?} belief={:.16e} safe_margin={:.16e} flip_margin={:.16e}",
                cert.kind,
                cert.belief.value(),
                cert.min_safe_margin(),
                cert.min_flip_margin()
            );
            let violation = match cert.reverify(1e-12) {
                Err(e) => Some(format!("{head} {e}")),
                Ok(_) if cert.flip_wealths != [0.0] => {
                    Some(format!("{head} flip wealth is not the origin"))
                }
                Ok(_) => None,
            };
            Ok((record, violation))
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(SuiteReport::new("necessity", seed, outcomes))
}

fn grid_stake(rng: &mut impl Rng) -> f64 {
    rng.random_range(2..=50) as f64 / 10.0
}

/// Small instances for the oracle: stakes on the 0.1 grid in `[0.2, 5]`,
/// one to three wealths on the 0.1 grid in `[-3, 3]`. Every fourth
/// instance is drawn until the pair becomes worse, to balance outcomes.
pub fn random_oracle_scenario(rng: &mut impl Rng, force_worse: bool) -> Scenario {
    let (r, r_hat) = loop {
        let (r, r_hat) = (
            gamble(grid_stake(rng), grid_stake(rng)),
            gamble(grid_stake(rng), grid_stake(rng)),
        );
        if !force_worse || becomes_worse(&r, &r_hat) {
            break (r, r_hat);
        }
    };
    let count = rng.random_range(1..=3);
    let wealths = (0..count)
        .map(|_| rng.random_range(-30..=30) as f64 / 10.0)
        .collect();
    Scenario::new(r, r_hat, WealthSet::list(wealths).expect("finite wealths"))
        .expect("generated scenario is valid")
}

/// The oracle must agree with [`becomes_worse`] everywhere, and every
/// certificate must be a feasible point of its own LP cell.
pub fn oracle_suite(seed: u64, n: usize) -> Result<SuiteReport> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let scenarios: Vec<_> = (0..n)
        .map(|i| random_oracle_scenario(&mut rng, i % 4 == 3))
        .collect();
    let outcomes = scenarios
        .iter()
        .enumerate()
        .map(|(i, s)| {
            let predicate = becomes_worse(&s.r, &s.r_hat);
            let verdict = must_remain_optimal_oracle(s)?;
            let head = format!(
                "{i} r={} r_hat={} w={:?} predicate={predicate} oracle={}",
                fmt_g(&s.r),
                fmt_g(&s.r_hat),
                s.wealth.points(),
                verdict.must_remain_optimal
            );
            let mut problems = Vec::new();
            if predicate != verdict.must_remain_optimal {
                problems.push(format!(
                    "disagreement best_margin={:e}",
                    verdict.best_margin
                ));
            }
            let mut record = head.clone();
            if let WitnessOutcome::Witness(cert) = find_witness(s)? {
                let inst = LpInstance::new(
                    &s.wealth.points(),
                    s.r,
                    s.r_hat,
                    cert.belief.value(),
                    cert.wealth_shift,
                )?;
                let check = inst.check_utility(&cert.utility, s.tolerance);
                let _ = write!(
                    record,
                    " witness={:?} lp_feasible={}",
                    cert.kind,
                    check.feasible()
                );
                if !check.feasible() {
                    problems.push(format!("certificate not LP-feasible {check:?}"));
                }
            }
            let violation =
                (!problems.is_empty()).then(|| format!("{head} {}", problems.join("; ")));
            Ok((record, violation))
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(SuiteReport::new("oracle", seed, outcomes))
}

/// The pairwise conditions checked state by state on raw payoffs, without
/// going through the gain/loss partition helpers.
pub fn pairwise_conditions(r: &GeneralGamble, r_hat: &GeneralGamble) -> bool {
    let (p, q) = (r.payoffs(), r_hat.payoffs());
    for i in 0..p.len() {
        if p[i].1 < 0.0 && q[i].1 > p[i].1 {
            return false;
        }
        for j in 0..p.len() {
            if p[i].1 > 0.0 && p[j].1 < 0.0 {
                // α_i / β_j ≥ α̂_i / β̂_j
                if p[i].1 * -q[j].1 < q[i].1 * -p[j].1 {
                    return false;
                }
            }
        }
    }
    true
}

/// A general gamble pair sharing states and sign pattern, with stakes on a
/// coarse grid so that ties occur.
pub fn random_general_pair(rng: &mut impl Rng, states: usize) -> (GeneralGamble, GeneralGamble) {
    let mut signs: Vec<i8> = (0..states).map(|_| rng.random_range(-1..=1)).collect();
    signs[0] = 1;
    if states > 1 {
        signs[1] = -1;
    }
    let mut stake = || rng.random_range(1..=20) as f64 / 4.0;
    let mut r = Vec::new();
    let mut r_hat = Vec::new();
    for (i, &s) in signs.iter().enumerate() {
        let label = i as f64;
        let (a, b) = (stake(), stake());
        r.push((label, s as f64 * a));
        r_hat.push((label, s as f64 * b));
    }
    (
        GeneralGamble::new(r).expect("distinct labels"),
        GeneralGamble::new(r_hat).expect("distinct labels"),
    )
}

/// Binary pairs against [`becomes_worse`], then general pairs against
/// [`pairwise_conditions`].
pub fn remark_suite(seed: u64, binary: usize, general: usize) -> Result<SuiteReport> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut outcomes = Vec::with_capacity(binary + general);
    for i in 0..binary {
        let (r, r_hat) = (
            gamble(grid_stake(&mut rng), grid_stake(&mut rng)),
            gamble(grid_stake(&mut rng), grid_stake(&mut rng)),
        );
        let remark = remark_condition(
            &GeneralGamble::from_binary(&r),
            &GeneralGamble::from_binary(&r_hat),
        )?;
        let expected = becomes_worse(&r, &r_hat);
        let record = format!(
            "binary {i} r={} r_hat={} remark={remark}",
            fmt_g(&r),
            fmt_g(&r_hat)
        );
        let violation = (remark != expected).then(|| format!("{record} expected={expected}"));
        outcomes.push((record, violation));
    }
    for i in 0..general {
        let states = rng.random_range(2..=6);
        let (r, r_hat) = random_general_pair(&mut rng, states);
        let remark = remark_condition(&r, &r_hat)?;
        let expected = pairwise_conditions(&r, &r_hat);
        let record = format!(
            "general {i} r={:?} r_hat={:?} remark={remark}",
            r.payoffs(),
            r_hat.payoffs()
        );
        let violation = (remark != expected).then(|| format!("{record} expected={expected}"));
        outcomes.push((record, violation));
    }
    Ok(SuiteReport::new("remark", seed, outcomes))
}

/// Every suite at the given sizes, each seeded from `seed`.
pub fn run_all(seed: u64, sizes: SuiteSizes) -> Result<Vec<SuiteReport>> {
    Ok(vec![
        sufficiency_suite(seed, sizes.sufficiency)?,
        necessity_suite(seed, sizes.necessity)?,
        oracle_suite(seed, sizes.oracle)?,
        remark_suite(seed, sizes.remark_binary, sizes.remark_general)?,
    ])
}
