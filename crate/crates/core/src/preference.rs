//! Subjective expected utility comparisons between the safe action and a
//! binary gamble, plus the region-by-region closed forms of the
//! indifference belief under the theorem witness utility.

use std::fmt;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::gamble::{Belief, Gamble};
use crate::math::{log_sum_exp, logistic_neg};
use crate::utility::StateUtility;

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Action {
    Safe,
    Risky(Gamble),
}

/// `μ·u₁(w + α) + (1 − μ)·u₀(w − β)` for a gamble, `μ·u₁(w) + (1 − μ)·u₀(w)`
/// for the safe action. Uses direct evaluation, so exponents beyond the
/// clamp saturate; comparisons should go through [`safe_advantage`].
pub fn seu_value(su: &StateUtility, mu: Belief, w: f64, action: Action) -> f64 {
    let mu = mu.value();
    match action {
        Action::Safe => mu * su.u1.eval(w) + (1.0 - mu) * su.u0.eval(w),
        Action::Risky(g) => mu * su.u1.eval(w + g.alpha()) + (1.0 - mu) * su.u0.eval(w - g.beta()),
    }
}

/// Log-space utility stakes of `g` at `w`: `(ln(u₀(w) − u₀(w−β)), ln(u₁(w+α) − u₁(w)))`.
fn log_stakes(su: &StateUtility, w: f64, g: &Gamble) -> (f64, f64) {
    (
        su.u0.log_increment(w - g.beta(), w),
        su.u1.log_increment(w, w + g.alpha()),
    )
}

/// `seu(s) − seu(g)` computed from utility increments, so the sign is exact
/// even where the utility values themselves overflow. The magnitude may be
/// infinite in that case.
pub fn safe_advantage(su: &StateUtility, mu: Belief, w: f64, g: &Gamble) -> f64 {
    let mu = mu.value();
    let (ln_loss, ln_gain) = log_stakes(su, w, g);
    let m = ln_loss.max(ln_gain);
    if m == f64::NEG_INFINITY {
        return 0.0;
    }
    let inner = (1.0 - mu) * (ln_loss - m).exp() - mu * (ln_gain - m).exp();
    if m <= 700.0 {
        inner * m.exp()
    } else if inner == 0.0 {
        0.0
    } else {
        inner * f64::INFINITY
    }
}

/// Weak form: `seu(s) ≥ seu(g) − tolerance`. Strict form:
/// `seu(s) > seu(g) + tolerance`.
pub fn prefers_safe(
    su: &StateUtility,
    mu: Belief,
    w: f64,
    g: &Gamble,
    strict: bool,
    tolerance: f64,
) -> bool {
    let adv = safe_advantage(su, mu, w, g);
    if strict {
        adv > tolerance
    } else {
        adv >= -tolerance
    }
}

/// The belief at which the agent is exactly indifferent between the safe
/// action and `g` at wealth `w`:
///
/// ```text
/// (u₀(w) − u₀(w−β)) / (u₀(w) − u₀(w−β) + u₁(w+α) − u₁(w))
/// ```
///
/// The safe action is weakly preferred iff the belief is at most this value.
pub fn indifference_belief(su: &StateUtility, w: f64, g: &Gamble, tolerance: f64) -> Result<f64> {
    let (ln_loss, ln_gain) = log_stakes(su, w, g);
    let ln_den = log_sum_exp(&[ln_loss, ln_gain]);
    if !(ln_den > tolerance.ln()) || ln_den.is_nan() {
        return Err(Error::DegenerateUtility {
            wealth: w,
            denominator: ln_den.exp(),
        });
    }
    if ln_loss == f64::NEG_INFINITY {
        return Ok(0.0);
    }
    Ok(logistic_neg(ln_gain - ln_loss))
}

/// Indifference beliefs along a wealth grid.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IndifferenceCurve {
    /// Free-form description of the generating utility, e.g. `k=4`.
    pub generator: String,
    pub points: Vec<(f64, f64)>,
}

pub fn indifference_curve(
    su: &StateUtility,
    wealths: &[f64],
    g: &Gamble,
    tolerance: f64,
    generator: impl Into<String>,
) -> Result<IndifferenceCurve> {
    let points = wealths
        .par_iter()
        .map(|&w| indifference_belief(su, w, g, tolerance).map(|mu| (w, mu)))
        .collect::<Result<Vec<_>>>()?;
    Ok(IndifferenceCurve {
        generator: generator.into(),
        points,
    })
}

/// Position of the three payoffs `w − β < w < w + α` relative to the kinks
/// `−β̂` and `α̂` of the theorem witness.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum RegionLabel {
    ExtremeLow,
    Case1,
    Case2,
    Case3,
    Case4,
    Case5,
    Case6,
    Case7,
    ExtremeHigh,
    /// All three payoffs inside the linear middle piece. Only reachable
    /// when `α + β < α̂ + β̂` roughly, never under `β > β̂, α > α̂`.
    Interior,
}

impl RegionLabel {
    /// Tie-break scan order.
    pub const SCAN_ORDER: [RegionLabel; 10] = [
        RegionLabel::ExtremeLow,
        RegionLabel::Case1,
        RegionLabel::Case2,
        RegionLabel::Case3,
        RegionLabel::Case4,
        RegionLabel::Case5,
        RegionLabel::Case6,
        RegionLabel::Case7,
        RegionLabel::ExtremeHigh,
        RegionLabel::Interior,
    ];

    pub fn name(self) -> &'static str {
        match self {
            RegionLabel::ExtremeLow => "extreme_low",
            RegionLabel::Case1 => "case1",
            RegionLabel::Case2 => "case2",
            RegionLabel::Case3 => "case3",
            RegionLabel::Case4 => "case4",
            RegionLabel::Case5 => "case5",
            RegionLabel::Case6 => "case6",
            RegionLabel::Case7 => "case7",
            RegionLabel::ExtremeHigh => "extreme_high",
            RegionLabel::Interior => "interior",
        }
    }

    /// Whether `w` satisfies this region's (closed) defining conditions.
    pub fn contains(self, w: f64, r: &Gamble, r_hat: &Gamble) -> bool {
        let (a, b) = (r.alpha(), r.beta());
        let (ah, bh) = (r_hat.alpha(), r_hat.beta());
        let near_low_kink = -bh >= w && w > -bh - a;
        let near_high_kink = ah <= w && w < ah + b;
        match self {
            RegionLabel::ExtremeLow => w <= -bh - a,
            RegionLabel::Case1 => near_low_kink && w + a <= ah,
            RegionLabel::Case2 => near_low_kink && w + a >= ah,
            RegionLabel::Case3 => near_high_kink && w - b >= -bh,
            RegionLabel::Case4 => near_high_kink && w - b < -bh,
            RegionLabel::Case5 => -bh <= w - b && w <= ah && ah < w + a,
            RegionLabel::Case6 => w - b < -bh && -bh <= w && w + a <= ah,
            RegionLabel::Case7 => w - b < -bh && -bh <= w && w <= ah && ah < w + a,
            RegionLabel::ExtremeHigh => w >= ah + b,
            RegionLabel::Interior => w - b >= -bh && w + a <= ah,
        }
    }
}

impl fmt::Display for RegionLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.pad(self.name())
    }
}

/// The first label in scan order whose conditions hold at `w`.
pub fn classify_region(w: f64, r: &Gamble, r_hat: &Gamble) -> RegionLabel {
    RegionLabel::SCAN_ORDER
        .into_iter()
        .find(|l| l.contains(w, r, r_hat))
        // the ten configurations cover the line; NaN wealth falls through
        .unwrap_or(RegionLabel::Interior)
}

/// Every label whose conditions hold at `w`; more than one only on
/// region boundaries.
pub fn matching_regions(w: f64, r: &Gamble, r_hat: &Gamble) -> Vec<RegionLabel> {
    RegionLabel::SCAN_ORDER
        .into_iter()
        .filter(|l| l.contains(w, r, r_hat))
        .collect()
}

fn check_region(label: RegionLabel, w: f64, r: &Gamble, r_hat: &Gamble) -> Result<()> {
    if label.contains(w, r, r_hat) {
        Ok(())
    } else {
        Err(Error::RegionMismatch {
            region: label.name().to_string(),
            wealth: w,
        })
    }
}

/// Indifference belief between `s` and `r` under the theorem witness with
/// risk aversion `k`, from the region's closed form.
///
/// Every expression is arranged so that each exponent is nonpositive inside
/// its region: the dominant exponential is factored out of numerator and
/// denominator before evaluation.
pub fn closed_form_belief(
    label: RegionLabel,
    w: f64,
    k: f64,
    r: &Gamble,
    r_hat: &Gamble,
) -> Result<f64> {
    check_region(label, w, r, r_hat)?;
    let (a, b) = (r.alpha(), r.beta());
    let (ah, bh) = (r_hat.alpha(), r_hat.beta());
    let e = |x: f64| x.exp();
    // 1 − e^{x} for x ≤ 0
    let one_minus_e = |x: f64| -x.exp_m1();

    let value = match label {
        RegionLabel::ExtremeLow | RegionLabel::ExtremeHigh => {
            one_minus_e(-b * k) / one_minus_e(-(a + b) * k)
        }
        RegionLabel::Case1 => {
            let den = one_minus_e(k * (bh + w - b)) + (w + a + bh) * e(k * (w - b));
            one_minus_e(-b * k) / den
        }
        RegionLabel::Case2 => one_minus_e(-b * k) / lower_to_upper_span(w, k, r, r_hat),
        RegionLabel::Case3 => {
            let gap = ah - (w - b);
            let num = gap + e(-k * ah) * one_minus_e(-k * (w - ah));
            let den = gap + e(-k * ah) * one_minus_e(-k * (w + a - ah));
            num / den
        }
        RegionLabel::Case4 => {
            let common =
                (ah + bh) * e(k * (w - b)) + e(k * (w - b - ah)) + one_minus_e(k * (w - b + bh));
            (common - e(-k * b)) / (common - e(-k * (a + b)))
        }
        RegionLabel::Case5 => b / (ah - (w - b) + e(-k * ah) * one_minus_e(-k * (w + a - ah))),
        RegionLabel::Case6 => {
            let base = one_minus_e(k * (bh + w - b));
            let scale = e(k * (w - b));
            (base + (w + bh) * scale) / (base + (w + a + bh) * scale)
        }
        RegionLabel::Case7 => {
            let num = one_minus_e(k * (bh + w - b)) + (w + bh) * e(k * (w - b));
            num / lower_to_upper_span(w, k, r, r_hat)
        }
        RegionLabel::Interior => b / (a + b),
    };
    Ok(value)
}

/// `(u(w+α) − u(w−β)) · e^{k(w−β)}` when `w − β` lies in the lower
/// exponential piece and `w + α` in the upper one.
fn lower_to_upper_span(w: f64, k: f64, r: &Gamble, r_hat: &Gamble) -> f64 {
    let (a, b) = (r.alpha(), r.beta());
    let (ah, bh) = (r_hat.alpha(), r_hat.beta());
    -(k * (bh + w - b)).exp_m1() + (ah + bh) * (k * (w - b)).exp() + (k * (w - b - ah)).exp()
        - (-k * (a + b)).exp()
}

/// Limit of [`closed_form_belief`] as `k → ∞`.
pub fn limit_belief(label: RegionLabel, w: f64, r: &Gamble, r_hat: &Gamble) -> Result<f64> {
    check_region(label, w, r, r_hat)?;
    Ok(match label {
        RegionLabel::Case5 => r.beta() / (r_hat.alpha() - w + r.beta()),
        RegionLabel::Interior => r.risk_neutral_indifference(),
        _ => 1.0,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::utility::PiecewiseUtility;

    fn g(a: f64, b: f64) -> Gamble {
        Gamble::new(a, b).unwrap()
    }

    fn mu(x: f64) -> Belief {
        Belief::new(x).unwrap()
    }

    fn witness(k: f64, r_hat: &Gamble) -> StateUtility {
        StateUtility::state_independent(PiecewiseUtility::theorem_witness(k, r_hat).unwrap())
    }

    #[test]
    fn seu_values_identity() {
        let id = StateUtility::identity();
        assert_eq!(
            seu_value(&id, mu(0.5), 0.0, Action::Risky(g(1.0, 1.0))),
            0.0
        );
        assert_eq!(seu_value(&id, mu(0.5), 0.0, Action::Safe), 0.0);
        assert_eq!(
            seu_value(&id, mu(0.75), 0.0, Action::Risky(g(2.0, 1.0))),
            1.25
        );
    }

    #[test]
    fn prefers_safe_identity() {
        let id = StateUtility::identity();
        let fair = g(1.0, 1.0);
        assert!(prefers_safe(&id, mu(0.5), 0.0, &fair, false, 1e-9));
        assert!(!prefers_safe(&id, mu(0.5), 0.0, &fair, true, 1e-9));
        assert!(prefers_safe(&id, mu(0.4), 0.0, &fair, true, 1e-9));
    }

    #[test]
    fn prefers_safe_under_steep_witness() {
        let r_hat = g(1.0, 1.0);
        let r = g(2.0, 2.0);
        let su = witness(64.0, &r_hat);
        let mu_bar = closed_form_belief(RegionLabel::ExtremeHigh, 5.0, 64.0, &r, &r_hat).unwrap();
        assert!(mu_bar > 0.9);
        assert!(prefers_safe(&su, mu(0.9), 0.0, &r, true, 1e-9));
    }

    #[test]
    fn indifference_examples() {
        let id = StateUtility::identity();
        for w in [-3.0, 0.0, 7.5] {
            let b = indifference_belief(&id, w, &g(3.0, 1.0), 1e-9).unwrap();
            assert!((b - 0.25).abs() < 1e-15);
        }
        let r_hat = g(1.0, 1.0);
        let su = witness(1.0, &r_hat);
        let b = indifference_belief(&su, 0.0, &r_hat, 1e-9).unwrap();
        assert!((b - 0.5).abs() < 1e-15);

        let e = std::f64::consts::E;
        let generic = indifference_belief(&su, 5.0, &g(1.0, 1.0), 1e-9).unwrap();
        let closed =
            closed_form_belief(RegionLabel::ExtremeHigh, 5.0, 1.0, &g(1.0, 1.0), &r_hat).unwrap();
        let exact = e * (e - 1.0) / (e * e - 1.0);
        assert!((generic - exact).abs() < 1e-14);
        assert!((closed - exact).abs() < 1e-14);
        assert!((exact - 0.7310586).abs() < 1e-7);
    }

    #[test]
    fn degenerate_utility_is_rejected() {
        let flat = StateUtility::state_independent(PiecewiseUtility::linear(0.0, 1.0));
        assert!(matches!(
            indifference_belief(&flat, 0.0, &g(1.0, 1.0), 1e-9),
            Err(Error::DegenerateUtility { .. })
        ));
    }

    #[test]
    fn classify_examples() {
        let r = g(1.0, 1.0);
        let r_hat = g(0.5, 0.5);
        assert_eq!(classify_region(5.0, &r, &r_hat), RegionLabel::ExtremeHigh);
        assert_eq!(classify_region(-0.75, &r, &r_hat), RegionLabel::Case1);
        assert_eq!(classify_region(0.25, &r, &r_hat), RegionLabel::Case7);
        assert_eq!(classify_region(-1.5, &r, &r_hat), RegionLabel::ExtremeLow);
    }

    #[test]
    fn boundary_tie_break_takes_scan_order() {
        let r = g(2.0, 2.0);
        let r_hat = g(1.0, 1.0);
        // w = −1: w + α = α̂ and w = −β̂
        assert_eq!(
            matching_regions(-1.0, &r, &r_hat),
            vec![RegionLabel::Case1, RegionLabel::Case2, RegionLabel::Case6]
        );
        assert_eq!(classify_region(-1.0, &r, &r_hat), RegionLabel::Case1);
        assert_eq!(classify_region(1.0, &r, &r_hat), RegionLabel::Case3);
    }

    #[test]
    fn interior_only_for_small_gambles() {
        let r = g(0.5, 0.5);
        let r_hat = g(1.0, 1.0);
        assert_eq!(classify_region(0.0, &r, &r_hat), RegionLabel::Interior);
        let b = closed_form_belief(RegionLabel::Interior, 0.0, 3.0, &r, &r_hat).unwrap();
        assert_eq!(b, 0.5);
    }

    #[test]
    fn extreme_closed_form_at_ln2() {
        let k = 2f64.ln();
        let v = closed_form_belief(
            RegionLabel::ExtremeHigh,
            10.0,
            k,
            &g(1.0, 1.0),
            &g(1.0, 1.0),
        )
        .unwrap();
        assert!((v - 2.0 / 3.0).abs() < 1e-15);
    }

    #[test]
    fn limit_values() {
        let r = g(1.0, 1.0);
        let r_hat = g(0.5, 0.5);
        assert_eq!(
            limit_belief(RegionLabel::Case1, -0.75, &r, &r_hat).unwrap(),
            1.0
        );
        assert_eq!(
            limit_belief(RegionLabel::ExtremeHigh, 5.0, &r, &r_hat).unwrap(),
            1.0
        );
        // w = 0.25 is a Case 7 wealth for this pair
        assert!(matches!(
            limit_belief(RegionLabel::Case5, 0.25, &r, &r_hat),
            Err(Error::RegionMismatch { .. })
        ));
        // a genuine Case 5 wealth: −β̂ ≤ w − β and w ≤ α̂ < w + α
        let r = g(1.0, 0.75);
        assert_eq!(classify_region(0.25, &r, &r_hat), RegionLabel::Case5);
        let lim = limit_belief(RegionLabel::Case5, 0.25, &r, &r_hat).unwrap();
        assert!((lim - 0.75 / (0.5 - 0.25 + 0.75)).abs() < 1e-15);
    }

    #[test]
    fn closed_form_rejects_wrong_region() {
        let r = g(2.0, 2.0);
        let r_hat = g(1.0, 1.0);
        assert!(matches!(
            closed_form_belief(RegionLabel::Case3, -5.0, 2.0, &r, &r_hat),
            Err(Error::RegionMismatch { .. })
        ));
    }

    #[test]
    fn safe_advantage_keeps_sign_past_overflow() {
        let r_hat = g(1.0, 1.0);
        let su = witness(512.0, &r_hat);
        let r = g(2.0, 2.0);
        let adv = safe_advantage(&su, mu(0.9), -10.0, &r);
        assert!(adv > 0.0);
        assert!(prefers_safe(&su, mu(0.9), -10.0, &r, true, 1e-9));
    }
}
