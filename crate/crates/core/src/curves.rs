//! Plot data for the indifference-belief families of the theorem witness.
//!
//! Reals are written as `{:.16e}` (17 significant digits), so a file
//! written on one machine parses back to the same doubles on another.

use std::fmt::Write as _;
use std::io::Write;

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::preference::{
    classify_region, closed_form_belief, indifference_belief, limit_belief, RegionLabel,
};
use crate::scenario::Scenario;
use crate::utility::{PiecewiseUtility, StateUtility};

pub const CURVE_HEADER: &str = "wealth,region,k,belief,limit_belief";
pub const INDIFFERENCE_HEADER: &str = "wealth,region,belief,k";

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CurveRow {
    pub wealth: f64,
    pub region: RegionLabel,
    pub k: f64,
    pub belief: f64,
    pub limit_belief: f64,
}

fn check_ks(k_list: &[f64]) -> Result<()> {
    if k_list.is_empty() {
        return Err(Error::InvalidK(f64::NAN));
    }
    match k_list.iter().find(|k| !(**k >= 1.0) || !k.is_finite()) {
        Some(&k) => Err(Error::InvalidK(k)),
        None => Ok(()),
    }
}

/// Closed-form beliefs and their limits, wealth-major and k-minor.
pub fn curve_rows(scenario: &Scenario, k_list: &[f64]) -> Result<Vec<CurveRow>> {
    scenario.validate()?;
    check_ks(k_list)?;
    let (r, r_hat) = (scenario.r, scenario.r_hat);
    let per_wealth = scenario
        .wealth
        .points()
        .into_par_iter()
        .map(|w| {
            let region = classify_region(w, &r, &r_hat);
            let limit = limit_belief(region, w, &r, &r_hat)?;
            k_list
                .iter()
                .map(|&k| {
                    Ok(CurveRow {
                        wealth: w,
                        region,
                        k,
                        belief: closed_form_belief(region, w, k, &r, &r_hat)?,
                        limit_belief: limit,
                    })
                })
                .collect::<Result<Vec<_>>>()
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(per_wealth.into_iter().flatten().collect())
}

pub fn format_curves(rows: &[CurveRow]) -> String {
    let mut out = String::from(CURVE_HEADER);
    out.push('\n');
    for row in rows {
        let _ = writeln!(
            out,
            "{:.16e},{},{},{:.16e},{:.16e}",
            row.wealth, row.region, row.k, row.belief, row.limit_belief
        );
    }
    out
}

/// Writes the curve table for every grid wealth and every `k` in `k_list`.
pub fn emit_curves(scenario: &Scenario, k_list: &[f64], mut out: impl Write) -> Result<()> {
    let rows = curve_rows(scenario, k_list)?;
    out.write_all(format_curves(&rows).as_bytes())?;
    Ok(())
}

/// Indifference beliefs of the theorem witness evaluated from the utility
/// itself: one headed block per `k`, blocks separated by a blank line.
///
/// The exponential tails are strictly increasing but can be flatter than
/// the scenario tolerance, so only exactly flat chords are rejected.
pub fn indifference_table(scenario: &Scenario, k_list: &[f64]) -> Result<String> {
    scenario.validate()?;
    check_ks(k_list)?;
    let (r, r_hat) = (scenario.r, scenario.r_hat);
    let wealths = scenario.wealth.points();
    let mut out = String::new();
    for (i, &k) in k_list.iter().enumerate() {
        if i > 0 {
            out.push('\n');
        }
        let su = StateUtility::state_independent(PiecewiseUtility::theorem_witness(k, &r_hat)?);
        let beliefs = wealths
            .par_iter()
            .map(|&w| indifference_belief(&su, w, &r, 0.0))
            .collect::<Result<Vec<_>>>()?;
        out.push_str(INDIFFERENCE_HEADER);
        out.push('\n');
        for (&w, mu) in wealths.iter().zip(beliefs) {
            let region = classify_region(w, &r, &r_hat);
            let _ = writeln!(out, "{w:.16e},{region},{mu:.16e},{k}");
        }
    }
    Ok(out)
}
