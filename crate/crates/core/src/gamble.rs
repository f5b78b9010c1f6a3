//! Decision-problem primitives: binary gambles, finite-state gambles,
//! beliefs and wealth sets.
//!
//! The safe action pays zero in every state and has no type of its own.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// A binary-state risky action: pays `alpha` in state 1 and loses `beta`
/// in state 0. Both stakes are strictly positive.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawGamble", into = "RawGamble")]
pub struct Gamble {
    alpha: f64,
    beta: f64,
}

#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawGamble {
    alpha: f64,
    beta: f64,
}

impl TryFrom<RawGamble> for Gamble {
    type Error = Error;

    fn try_from(raw: RawGamble) -> Result<Self> {
        Gamble::new(raw.alpha, raw.beta)
    }
}

impl From<Gamble> for RawGamble {
    fn from(g: Gamble) -> Self {
        RawGamble {
            alpha: g.alpha,
            beta: g.beta,
        }
    }
}

impl Gamble {
    pub fn new(alpha: f64, beta: f64) -> Result<Self> {
        validate_gamble(Gamble { alpha, beta })
    }

    /// Gain in state 1.
    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    /// Loss magnitude in state 0.
    pub fn beta(&self) -> f64 {
        self.beta
    }

    /// Belief at which a risk-neutral agent is indifferent between this
    /// gamble and the safe action.
    pub fn risk_neutral_indifference(&self) -> f64 {
        self.beta / (self.alpha + self.beta)
    }

    /// Both stakes multiplied by `c`.
    pub fn scaled(&self, c: f64) -> Result<Self> {
        Gamble::new(self.alpha * c, self.beta * c)
    }
}

/// Returns `g` unchanged iff both stakes are finite and strictly positive.
pub fn validate_gamble(g: Gamble) -> Result<Gamble> {
    // `!(x > 0)` also rejects NaN.
    if !(g.alpha > 0.0) || !(g.beta > 0.0) || !g.alpha.is_finite() || !g.beta.is_finite() {
        return Err(Error::NonPositiveStake {
            alpha: g.alpha,
            beta: g.beta,
        });
    }
    Ok(g)
}

/// Subjective probability of state 1.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd, Serialize, Deserialize)]
#[serde(try_from = "f64", into = "f64")]
pub struct Belief(f64);

impl Belief {
    pub fn new(mu: f64) -> Result<Self> {
        if (0.0..=1.0).contains(&mu) {
            Ok(Belief(mu))
        } else {
            Err(Error::InvalidBelief(mu))
        }
    }

    pub fn value(self) -> f64 {
        self.0
    }
}

impl TryFrom<f64> for Belief {
    type Error = Error;

    fn try_from(mu: f64) -> Result<Self> {
        Belief::new(mu)
    }
}

impl From<Belief> for f64 {
    fn from(b: Belief) -> f64 {
        b.0
    }
}

/// A nonempty set of initial wealths, either listed or as a closed interval
/// sampled inclusively at both endpoints.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum WealthSet {
    List(Vec<f64>),
    Interval(WealthInterval),
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct WealthInterval {
    pub lo: f64,
    pub hi: f64,
    pub step: f64,
}

impl WealthSet {
    pub fn list(values: Vec<f64>) -> Result<Self> {
        let set = WealthSet::List(values);
        set.validate()?;
        Ok(set)
    }

    pub fn interval(lo: f64, hi: f64, step: f64) -> Result<Self> {
        let set = WealthSet::Interval(WealthInterval { lo, hi, step });
        set.validate()?;
        Ok(set)
    }

    pub fn validate(&self) -> Result<()> {
        match self {
            WealthSet::List(values) => {
                if values.is_empty() {
                    return Err(Error::InvalidWealthSet("empty wealth list".into()));
                }
                if values.iter().any(|w| !w.is_finite()) {
                    return Err(Error::InvalidWealthSet("non-finite wealth".into()));
                }
            }
            WealthSet::Interval(WealthInterval { lo, hi, step }) => {
                if !lo.is_finite() || !hi.is_finite() || lo > hi {
                    return Err(Error::InvalidWealthSet(format!(
                        "interval [{lo}, {hi}] is empty or unbounded"
                    )));
                }
                if !(*step > 0.0) || !step.is_finite() {
                    return Err(Error::InvalidWealthSet(format!("step {step} must be > 0")));
                }
            }
        }
        Ok(())
    }

    /// The sampled wealths in increasing order, duplicates removed.
    /// Interval endpoints are always included.
    pub fn points(&self) -> Vec<f64> {
        match self {
            WealthSet::List(values) => {
                let mut v = values.clone();
                v.sort_by(f64::total_cmp);
                v.dedup();
                v
            }
            WealthSet::Interval(iv) => interval_points(iv.lo, iv.hi, iv.step),
        }
    }

    /// The same set translated by `-shift`.
    pub fn shifted(&self, shift: f64) -> WealthSet {
        match self {
            WealthSet::List(values) => WealthSet::List(values.iter().map(|w| w - shift).collect()),
            WealthSet::Interval(iv) => WealthSet::Interval(WealthInterval {
                lo: iv.lo - shift,
                hi: iv.hi - shift,
                step: iv.step,
            }),
        }
    }
}

pub(crate) fn interval_points(lo: f64, hi: f64, step: f64) -> Vec<f64> {
    let n = ((hi - lo) / step + 1e-9).floor() as usize;
    let mut pts: Vec<f64> = (0..=n).map(|i| lo + i as f64 * step).collect();
    if let Some(last) = pts.last_mut() {
        if (hi - *last).abs() <= 1e-9 * step {
            *last = hi;
        } else if *last < hi {
            pts.push(hi);
        }
    }
    pts
}

/// Sign class of a state under a general gamble.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum StateSign {
    /// Strictly positive payoff.
    Gain,
    /// Strictly negative payoff.
    Loss,
    /// Zero payoff.
    Zero,
}

/// A risky action over a finite set of real-labelled states.
#[derive(Debug, Clone, PartialEq)]
pub struct GeneralGamble {
    // sorted by state label, labels distinct
    payoffs: Vec<(f64, f64)>,
}

impl GeneralGamble {
    pub fn new(mut payoffs: Vec<(f64, f64)>) -> Result<Self> {
        if payoffs.is_empty() {
            return Err(Error::InvalidGamble("no states".into()));
        }
        if payoffs
            .iter()
            .any(|(s, p)| !s.is_finite() || !p.is_finite())
        {
            return Err(Error::InvalidGamble("non-finite state or payoff".into()));
        }
        payoffs.sort_by(|a, b| a.0.total_cmp(&b.0));
        if payoffs.windows(2).any(|w| w[0].0 == w[1].0) {
            return Err(Error::InvalidGamble("duplicate state label".into()));
        }
        Ok(GeneralGamble { payoffs })
    }

    /// The two-state embedding of a binary gamble: state 1 pays alpha,
    /// state 0 pays -beta.
    pub fn from_binary(g: &Gamble) -> Self {
        GeneralGamble {
            payoffs: vec![(0.0, -g.beta()), (1.0, g.alpha())],
        }
    }

    pub fn states(&self) -> impl Iterator<Item = f64> + '_ {
        self.payoffs.iter().map(|(s, _)| *s)
    }

    pub fn payoffs(&self) -> &[(f64, f64)] {
        &self.payoffs
    }

    pub fn len(&self) -> usize {
        self.payoffs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.payoffs.is_empty()
    }

    pub fn sign(&self, index: usize) -> StateSign {
        let p = self.payoffs[index].1;
        if p > 0.0 {
            StateSign::Gain
        } else if p < 0.0 {
            StateSign::Loss
        } else {
            StateSign::Zero
        }
    }

    pub fn signs(&self) -> Vec<StateSign> {
        (0..self.len()).map(|i| self.sign(i)).collect()
    }

    /// States with positive payoff, as (state, gain).
    pub fn gains(&self) -> Vec<(f64, f64)> {
        self.payoffs
            .iter()
            .copied()
            .filter(|(_, p)| *p > 0.0)
            .collect()
    }

    /// States with negative payoff, as (state, loss magnitude).
    pub fn losses(&self) -> Vec<(f64, f64)> {
        self.payoffs
            .iter()
            .filter(|(_, p)| *p < 0.0)
            .map(|(s, p)| (*s, -p))
            .collect()
    }

    /// States with zero payoff.
    pub fn zeros(&self) -> Vec<f64> {
        self.payoffs
            .iter()
            .filter(|(_, p)| *p == 0.0)
            .map(|(s, _)| *s)
            .collect()
    }
}
