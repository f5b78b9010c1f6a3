//! Decision predicates: when does rejecting `r` at every wealth force
//! rejecting `r̂` as well?

use crate::error::{Error, Result};
use crate::gamble::{Gamble, GeneralGamble};
use crate::math::logistic_neg;
use crate::utility::StateUtility;

/// `α/β ≥ α̂/β̂`, compared cross-multiplied.
pub fn actuarial_worsening(r: &Gamble, r_hat: &Gamble) -> bool {
    r.alpha() * r_hat.beta() >= r_hat.alpha() * r.beta()
}

/// `β̂ ≥ β` together with an actuarial worsening. Exactly the pairs for
/// which every risk-averse agent who rejects `r` at all wealths in a set
/// also rejects `r̂` there.
pub fn becomes_worse(r: &Gamble, r_hat: &Gamble) -> bool {
    r_hat.beta() >= r.beta() && actuarial_worsening(r, r_hat)
}

/// Finite-state version of [`becomes_worse`]: every loss grows weakly and
/// every gain/loss ratio over a (gain state, loss state) pair falls weakly.
pub fn remark_condition(r: &GeneralGamble, r_hat: &GeneralGamble) -> Result<bool> {
    if r.len() != r_hat.len() || !r.states().eq(r_hat.states()) || r.signs() != r_hat.signs() {
        return Err(Error::PartitionMismatch);
    }
    let gains: Vec<(f64, f64)> = r
        .gains()
        .into_iter()
        .zip(r_hat.gains())
        .map(|((_, a), (_, ah))| (a, ah))
        .collect();
    let losses: Vec<(f64, f64)> = r
        .losses()
        .into_iter()
        .zip(r_hat.losses())
        .map(|((_, b), (_, bh))| (b, bh))
        .collect();

    let losses_grow = losses.iter().all(|(b, bh)| bh >= b);
    let ratios_fall = gains
        .iter()
        .all(|(a, ah)| losses.iter().all(|(b, bh)| a * bh >= ah * b));
    Ok(losses_grow && ratios_fall)
}

/// The chain of beliefs linking the `r̂` indifference belief (first) to the
/// `r` indifference belief (last).
#[derive(Debug, Clone, PartialEq)]
pub struct ChainReport {
    pub values: Vec<f64>,
    /// `α ≥ α̂`: `r` dominates `r̂` and only the two endpoints are reported.
    pub dominance: bool,
}

impl ChainReport {
    /// Index `i` of the first step with `values[i] < values[i + 1] − tolerance`.
    pub fn first_violation(&self, tolerance: f64) -> Option<usize> {
        self.values.windows(2).position(|w| w[0] < w[1] - tolerance)
    }

    pub fn is_nonincreasing(&self, tolerance: f64) -> bool {
        self.first_violation(tolerance).is_none()
    }
}

/// Evaluates, at wealth `w`,
///
/// ```text
/// N̂/(N̂ + D̂)  ≥  N/(N + (β/β̂)·D̂)  ≥  N/(N + (α/α̂)·D̂)  ≥  N/(N + D)
/// ```
///
/// with `N̂ = u₀(w) − u₀(w−β̂)`, `N = u₀(w) − u₀(w−β)`,
/// `D̂ = u₁(w+α̂) − u₁(w)`, `D = u₁(w+α) − u₁(w)`. The outer steps are
/// chord-slope comparisons of a concave function, the middle step is the
/// actuarial worsening. All terms are formed from log-increments.
pub fn sufficiency_chain_check(
    su: &StateUtility,
    r: &Gamble,
    r_hat: &Gamble,
    w: f64,
) -> Result<ChainReport> {
    if !becomes_worse(r, r_hat) {
        return Err(Error::PreconditionViolated(
            "sufficiency chain needs beta_hat >= beta and alpha/beta >= alpha_hat/beta_hat".into(),
        ));
    }
    let (a, b) = (r.alpha(), r.beta());
    let (ah, bh) = (r_hat.alpha(), r_hat.beta());
    let ln_n_hat = su.u0.log_increment(w - bh, w);
    let ln_n = su.u0.log_increment(w - b, w);
    let ln_d_hat = su.u1.log_increment(w, w + ah);
    let ln_d = su.u1.log_increment(w, w + a);

    let first = logistic_neg(ln_d_hat - ln_n_hat);
    let last = logistic_neg(ln_d - ln_n);
    if a >= ah {
        return Ok(ChainReport {
            values: vec![first, last],
            dominance: true,
        });
    }
    let second = logistic_neg((b / bh).ln() + ln_d_hat - ln_n);
    let third = logistic_neg((a / ah).ln() + ln_d_hat - ln_n);
    Ok(ChainReport {
        values: vec![first, second, third, last],
        dominance: false,
    })
}
