//! Constructive counterexamples: a utility and a belief under which the
//! agent rejects `r` at every wealth in the set yet takes `r̂` at a
//! designated wealth.
//!
//! Margins are stored in two units. The belief margin is the distance from
//! the certificate belief to the relevant indifference belief and is always
//! finite. The SEU margin is the plain difference of expected utilities,
//! which for steep witnesses can exceed the double range and is then
//! reported as infinite with the correct sign.

use std::path::Path;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::calibration::{actuarial_worsening, becomes_worse};
use crate::error::{Error, Result};
use crate::gamble::{interval_points, Belief, Gamble};
use crate::preference::{indifference_belief, safe_advantage};
use crate::scenario::{Scenario, Settings};
use crate::utility::{PiecewiseUtility, StateUtility};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case", deny_unknown_fields)]
pub enum WitnessKind {
    /// Linear utility; works whenever the actuarial ratio improves.
    RiskNeutral,
    /// The kinked constant-absolute-risk-aversion witness.
    LargeK { k: f64 },
    /// Identity below `w_lo − β̂`, slope `iota` above.
    Interval { iota: f64, w_lo: f64, w_hi: f64 },
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct WealthMargin {
    pub wealth: f64,
    pub belief_margin: f64,
    pub seu_margin: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct WitnessCertificate {
    pub r: Gamble,
    pub r_hat: Gamble,
    pub kind: WitnessKind,
    pub belief: Belief,
    /// Wealth moved to the origin before construction; the utility and
    /// all wealths below are in the original coordinates.
    pub wealth_shift: f64,
    pub tolerance: f64,
    pub verified_wealths: Vec<f64>,
    pub flip_wealths: Vec<f64>,
    /// `s` over `r` at every verified wealth: `μ*_r(w) − μ` and `seu(s) − seu(r)`.
    pub margins: Vec<WealthMargin>,
    /// `r̂` over `s` at every flip wealth: `μ − μ*_r̂(w)` and `seu(r̂) − seu(s)`.
    pub flip_margins: Vec<WealthMargin>,
    /// State-independent: the same function in both states.
    pub utility: PiecewiseUtility,
}

#[derive(Debug, Clone, PartialEq)]
pub enum WitnessOutcome {
    MustRemainOptimal,
    Witness(Box<WitnessCertificate>),
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct CertificateDocument {
    witness: WitnessCertificate,
}

// Witness utilities are strictly increasing by construction, but their
// exponential tails can be flatter than any fixed absolute floor; only an
// exactly flat chord counts as degenerate here.
const STRICTLY_INCREASING: f64 = 0.0;

fn safe_over(su: &StateUtility, mu: Belief, w: f64, g: &Gamble) -> Result<WealthMargin> {
    Ok(WealthMargin {
        wealth: w,
        belief_margin: indifference_belief(su, w, g, STRICTLY_INCREASING)? - mu.value(),
        seu_margin: safe_advantage(su, mu, w, g),
    })
}

fn gamble_over_safe(su: &StateUtility, mu: Belief, w: f64, g: &Gamble) -> Result<WealthMargin> {
    Ok(WealthMargin {
        wealth: w,
        belief_margin: mu.value() - indifference_belief(su, w, g, STRICTLY_INCREASING)?,
        seu_margin: -safe_advantage(su, mu, w, g),
    })
}

impl WitnessCertificate {
    #[allow(clippy::too_many_arguments)]
    fn build(
        r: Gamble,
        r_hat: Gamble,
        kind: WitnessKind,
        utility: PiecewiseUtility,
        belief: Belief,
        wealth_shift: f64,
        verified_wealths: Vec<f64>,
        flip_wealths: Vec<f64>,
        tolerance: f64,
    ) -> Result<Self> {
        let su = StateUtility::state_independent(utility.clone());
        let margins = verified_wealths
            .par_iter()
            .map(|&w| safe_over(&su, belief, w, &r))
            .collect::<Result<Vec<_>>>()?;
        let flip_margins = flip_wealths
            .iter()
            .map(|&w| gamble_over_safe(&su, belief, w, &r_hat))
            .collect::<Result<Vec<_>>>()?;
        Ok(WitnessCertificate {
            r,
            r_hat,
            kind,
            belief,
            wealth_shift,
            tolerance,
            verified_wealths,
            flip_wealths,
            margins,
            flip_margins,
            utility,
        })
    }

    pub fn state_utility(&self) -> StateUtility {
        StateUtility::state_independent(self.utility.clone())
    }

    /// Smallest `s`-over-`r` belief margin.
    pub fn min_safe_margin(&self) -> f64 {
        self.margins
            .iter()
            .map(|m| m.belief_margin)
            .fold(f64::INFINITY, f64::min)
    }

    /// Smallest `r̂`-over-`s` belief margin.
    pub fn min_flip_margin(&self) -> f64 {
        self.flip_margins
            .iter()
            .map(|m| m.belief_margin)
            .fold(f64::INFINITY, f64::min)
    }

    /// Checks the stored margins against the certificate's own claims:
    /// `s ≻ r` (both margins positive) at every verified wealth and
    /// `r̂ ≻ s` by more than `10·tolerance` at every flip wealth. The
    /// utility must also pass validation.
    pub fn check_claims(&self) -> std::result::Result<(), String> {
        let gap = 10.0 * self.tolerance;
        if let Some(m) = self
            .margins
            .iter()
            .find(|m| !(m.belief_margin > 0.0 && m.seu_margin > 0.0))
        {
            return Err(format!("s does not beat r at wealth {}: {m:?}", m.wealth));
        }
        if let Some(m) = self
            .flip_margins
            .iter()
            .find(|m| !(m.belief_margin > gap && m.seu_margin > gap))
        {
            return Err(format!(
                "r_hat does not beat s at wealth {}: {m:?}",
                m.wealth
            ));
        }
        if self.margins.len() != self.verified_wealths.len()
            || self.flip_margins.len() != self.flip_wealths.len()
            || self.flip_wealths.is_empty()
        {
            return Err("margin lists do not match wealth lists".into());
        }
        let report = self.utility.validate(validation_step(&self.r, &self.r_hat));
        if !report.passed() {
            return Err(format!("utility fails validation: {report:?}"));
        }
        Ok(())
    }

    /// Recomputes every margin from the utility and belief and compares
    /// with the stored values (relative tolerance `rel`), then checks the
    /// claims. Returns the largest relative discrepancy seen.
    pub fn reverify(&self, rel: f64) -> std::result::Result<f64, String> {
        let fresh = Self::build(
            self.r,
            self.r_hat,
            self.kind,
            self.utility.clone(),
            self.belief,
            self.wealth_shift,
            self.verified_wealths.clone(),
            self.flip_wealths.clone(),
            self.tolerance,
        )
        .map_err(|e| e.to_string())?;
        let mut worst: f64 = 0.0;
        let pairs = self
            .margins
            .iter()
            .zip(&fresh.margins)
            .chain(self.flip_margins.iter().zip(&fresh.flip_margins));
        for (stored, again) in pairs {
            for (x, y) in [
                (stored.belief_margin, again.belief_margin),
                (stored.seu_margin, again.seu_margin),
            ] {
                let d = relative_difference(x, y);
                worst = worst.max(d);
                if !(d <= rel) {
                    return Err(format!(
                        "margin at wealth {} changed from {x} to {y}",
                        stored.wealth
                    ));
                }
            }
        }
        fresh.check_claims()?;
        Ok(worst)
    }

    pub fn to_toml_string(&self) -> Result<String> {
        toml::to_string(&CertificateDocument {
            witness: self.clone(),
        })
        .map_err(|e| Error::Parse(e.to_string()))
    }

    pub fn from_toml_str(text: &str) -> Result<Self> {
        let doc: CertificateDocument =
            toml::from_str(text).map_err(|e| Error::Parse(e.message().to_string()))?;
        Ok(doc.witness)
    }

    pub fn save(&self, path: impl AsRef<Path>) -> Result<()> {
        std::fs::write(path, self.to_toml_string()?)?;
        Ok(())
    }
}

pub(crate) fn relative_difference(x: f64, y: f64) -> f64 {
    if x == y {
        return 0.0;
    }
    (x - y).abs() / x.abs().max(y.abs()).max(1.0)
}

fn validation_step(r: &Gamble, r_hat: &Gamble) -> f64 {
    let span = r.alpha() + r.beta() + r_hat.alpha() + r_hat.beta();
    (span / 2000.0).min(1e-2)
}

/// The wealth closest to zero; subtracting it puts the origin in the set.
pub fn normalizing_shift(wealths: &[f64]) -> f64 {
    wealths
        .iter()
        .copied()
        .min_by(|a, b| a.abs().total_cmp(&b.abs()))
        .unwrap_or(0.0)
}

fn risk_neutral_belief(r: &Gamble, r_hat: &Gamble) -> Result<Belief> {
    Belief::new(0.5 * (r_hat.risk_neutral_indifference() + r.risk_neutral_indifference()))
}

/// Searches for a certificate that `r̂ ≻ s ≽ r` can happen, or reports that
/// the safe option must remain optimal.
///
/// * `β̂ ≥ β` with an actuarial worsening: no certificate exists.
/// * No actuarial worsening: a risk-neutral agent with belief midway
///   between the two risk-neutral indifference beliefs.
/// * Otherwise (`β > β̂`, `α > α̂`): the kinked witness with risk aversion
///   `k` climbing a doubling ladder from 1 until the smallest `r`
///   indifference belief over the wealth grid clears `β̂/(α̂+β̂)`.
pub fn find_witness(scenario: &Scenario) -> Result<WitnessOutcome> {
    scenario.validate()?;
    let settings = scenario.settings();
    let (r, r_hat) = (scenario.r, scenario.r_hat);
    if becomes_worse(&r, &r_hat) {
        return Ok(WitnessOutcome::MustRemainOptimal);
    }
    let wealths = scenario.wealth.points();
    let shift = normalizing_shift(&wealths);

    if !actuarial_worsening(&r, &r_hat) {
        let belief = risk_neutral_belief(&r, &r_hat)?;
        let cert = WitnessCertificate::build(
            r,
            r_hat,
            WitnessKind::RiskNeutral,
            PiecewiseUtility::identity(),
            belief,
            shift,
            wealths,
            vec![shift],
            settings.tolerance,
        )?;
        return Ok(WitnessOutcome::Witness(Box::new(cert)));
    }

    large_k_witness(&r, &r_hat, &wealths, shift, &settings)
        .map(|c| WitnessOutcome::Witness(Box::new(c)))
}

/// The steps of the doubling ladder `1, 2, 4, …` capped at `k_max`.
pub fn k_ladder(k_max: f64) -> Vec<f64> {
    let mut ks = vec![1.0];
    while *ks.last().unwrap() < k_max {
        let next = (ks.last().unwrap() * 2.0).min(k_max);
        ks.push(next);
    }
    ks
}

fn large_k_witness(
    r: &Gamble,
    r_hat: &Gamble,
    wealths: &[f64],
    shift: f64,
    settings: &Settings,
) -> Result<WitnessCertificate> {
    let tol = settings.tolerance;
    let target = r_hat.risk_neutral_indifference();
    let shifted: Vec<f64> = wealths.iter().map(|w| w - shift).collect();
    let step = validation_step(r, r_hat);
    let mut best_margin = f64::NEG_INFINITY;

    for k in k_ladder(settings.k_max) {
        let u = PiecewiseUtility::theorem_witness(k, r_hat)?;
        if !u.validate(step).passed() {
            continue;
        }
        let su = StateUtility::state_independent(u.clone());
        let lowest = min_indifference(&su, &shifted, r)?;
        best_margin = best_margin.max(lowest - target);
        if !(lowest > target + settings.strict_gap()) {
            continue;
        }
        let belief = Belief::new(0.5 * (target + lowest))?;
        let cert = WitnessCertificate::build(
            *r,
            *r_hat,
            WitnessKind::LargeK { k },
            u.translated(shift),
            belief,
            shift,
            wealths.to_vec(),
            vec![shift],
            tol,
        )?;
        if cert.check_claims().is_ok() {
            return Ok(cert);
        }
    }
    Err(Error::SearchExhausted {
        limit: settings.k_max,
        best_margin,
    })
}

fn min_indifference(su: &StateUtility, wealths: &[f64], g: &Gamble) -> Result<f64> {
    let beliefs = wealths
        .par_iter()
        .map(|&w| indifference_belief(su, w, g, STRICTLY_INCREASING))
        .collect::<Result<Vec<f64>>>()?;
    Ok(beliefs.into_iter().fold(f64::INFINITY, f64::min))
}

/// The `r` indifference belief under the interval witness, for a wealth
/// `w ≥ w_lo` with `w − β < w_lo − β̂`:
///
/// ```text
/// (ιw + (1−ι)(w_lo − β̂) − (w − β)) / (ιw + (1−ι)(w_lo − β̂) − (w − β) + ια)
/// ```
pub fn interval_r_belief(iota: f64, w: f64, w_lo: f64, r: &Gamble, r_hat: &Gamble) -> f64 {
    let num = iota * w + (1.0 - iota) * (w_lo - r_hat.beta()) - (w - r.beta());
    num / (num + iota * r.alpha())
}

/// Smallest kink slope tried before giving up.
const IOTA_FLOOR: f64 = 1e-12;

/// A certificate that `r̂ ≻ s ≽ r` at every grid wealth of `[w_lo, w_hi]`.
///
/// Without an actuarial worsening the risk-neutral certificate already
/// works on the whole interval. Otherwise the interval must be narrower
/// than `β − β̂`, and the kink slope `ι` is halved from 1 until the `r`
/// indifference belief clears the `r̂` one at every grid point.
pub fn interval_witness(
    r: &Gamble,
    r_hat: &Gamble,
    w_lo: f64,
    w_hi: f64,
    step: f64,
    settings: &Settings,
) -> Result<WitnessCertificate> {
    settings.validate()?;
    if becomes_worse(r, r_hat) {
        return Err(Error::PreconditionViolated(
            "the safe option must remain optimal for this pair".into(),
        ));
    }
    if !(w_lo < w_hi) || !w_lo.is_finite() || !w_hi.is_finite() {
        return Err(Error::PreconditionViolated(format!(
            "interval [{w_lo}, {w_hi}] is degenerate"
        )));
    }
    if !(step > 0.0) {
        return Err(Error::InvalidWealthSet(format!("step {step} must be > 0")));
    }
    let tol = settings.tolerance;
    let grid = interval_points(w_lo, w_hi, step);

    if !actuarial_worsening(r, r_hat) {
        let belief = risk_neutral_belief(r, r_hat)?;
        return WitnessCertificate::build(
            *r,
            *r_hat,
            WitnessKind::RiskNeutral,
            PiecewiseUtility::identity(),
            belief,
            0.0,
            grid.clone(),
            grid,
            tol,
        );
    }

    let bound = r.beta() - r_hat.beta();
    if w_hi - w_lo >= bound {
        return Err(Error::IntervalTooWide {
            width: w_hi - w_lo,
            bound,
        });
    }

    let mut iota: f64 = 1.0;
    let mut best_margin = f64::NEG_INFINITY;
    while iota >= IOTA_FLOOR {
        match interval_attempt(r, r_hat, iota, w_lo, w_hi, &grid, settings)? {
            Ok(cert) => return Ok(cert),
            Err(margin) => best_margin = best_margin.max(margin),
        }
        iota *= 0.5;
    }
    Err(Error::SearchExhausted {
        limit: IOTA_FLOOR,
        best_margin,
    })
}

/// The interval certificate for one fixed kink slope `iota`, or the
/// belief gap it achieved when that gap is not enough.
fn interval_attempt(
    r: &Gamble,
    r_hat: &Gamble,
    iota: f64,
    w_lo: f64,
    w_hi: f64,
    grid: &[f64],
    settings: &Settings,
) -> Result<std::result::Result<WitnessCertificate, f64>> {
    let u = PiecewiseUtility::proposition_witness(iota, w_lo, r_hat)?;
    let su = StateUtility::state_independent(u.clone());
    let lowest_r = min_indifference(&su, grid, r)?;
    let highest_r_hat = -min_indifference_neg(&su, grid, r_hat)?;
    let gap = lowest_r - highest_r_hat;
    if !(gap > settings.strict_gap()) {
        return Ok(Err(gap));
    }
    let belief = Belief::new(0.5 * (lowest_r + highest_r_hat))?;
    let cert = WitnessCertificate::build(
        *r,
        *r_hat,
        WitnessKind::Interval { iota, w_lo, w_hi },
        u,
        belief,
        0.0,
        grid.to_vec(),
        grid.to_vec(),
        settings.tolerance,
    )?;
    Ok(match cert.check_claims() {
        Ok(()) => Ok(cert),
        Err(_) => Err(gap),
    })
}

/// The interval certificate at a given kink slope `iota`, without search.
/// Fails with `SearchExhausted` (carrying the achieved belief gap) when
/// that slope does not separate the two indifference beliefs.
pub fn interval_certificate(
    r: &Gamble,
    r_hat: &Gamble,
    iota: f64,
    w_lo: f64,
    w_hi: f64,
    step: f64,
    settings: &Settings,
) -> Result<WitnessCertificate> {
    settings.validate()?;
    if !(w_lo < w_hi) || !(step > 0.0) {
        return Err(Error::PreconditionViolated(format!(
            "interval [{w_lo}, {w_hi}] with step {step} is degenerate"
        )));
    }
    let grid = interval_points(w_lo, w_hi, step);
    interval_attempt(r, r_hat, iota, w_lo, w_hi, &grid, settings)?.map_err(|gap| {
        Error::SearchExhausted {
            limit: iota,
            best_margin: gap,
        }
    })
}

fn min_indifference_neg(su: &StateUtility, wealths: &[f64], g: &Gamble) -> Result<f64> {
    let beliefs = wealths
        .par_iter()
        .map(|&w| indifference_belief(su, w, g, STRICTLY_INCREASING).map(|b| -b))
        .collect::<Result<Vec<f64>>>()?;
    Ok(beliefs.into_iter().fold(f64::INFINITY, f64::min))
}
