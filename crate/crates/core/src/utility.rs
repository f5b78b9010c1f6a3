//! Concave, strictly increasing utilities of money stored as ordered
//! segments with symbolic parameters.
//!
//! Two segment shapes are supported: straight lines and constant absolute
//! risk aversion pieces
//!
//! ```text
//! x ↦ level + e^{log_scale} · (1 − e^{−k (x − anchor)})
//! ```
//!
//! The exponential shape is kept in this "anchored" form so that utility
//! differences can be taken in log space; with `log_scale = −k·anchor` it is
//! the familiar `a + b − e^{−kx}` family.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::gamble::Gamble;
use crate::math::{log1mexp, log_sum_exp};
use crate::scenario::DEFAULT_TOLERANCE;

/// Exponent arguments are clamped to this magnitude in [`PiecewiseUtility::eval`].
pub const EXP_CLAMP: f64 = 700.0;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case", deny_unknown_fields)]
pub enum Segment {
    Linear {
        slope: f64,
        intercept: f64,
    },
    Cara {
        level: f64,
        log_scale: f64,
        anchor: f64,
        k: f64,
    },
}

/// A utility value together with a flag telling whether an exponent had to
/// be clamped to stay finite.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Evaluation {
    pub value: f64,
    pub saturated: bool,
}

impl Segment {
    pub fn eval(&self, x: f64) -> Evaluation {
        match *self {
            Segment::Linear { slope, intercept } => Evaluation {
                value: slope * x + intercept,
                saturated: false,
            },
            Segment::Cara {
                level,
                log_scale,
                anchor,
                k,
            } => {
                let z = -k * (x - anchor);
                let t = log_scale + z;
                if log_scale <= EXP_CLAMP && t <= EXP_CLAMP {
                    Evaluation {
                        value: level - log_scale.exp() * z.exp_m1(),
                        saturated: false,
                    }
                } else {
                    Evaluation {
                        value: level + log_scale.min(EXP_CLAMP).exp() - t.min(EXP_CLAMP).exp(),
                        saturated: true,
                    }
                }
            }
        }
    }

    /// Natural log of the derivative at `x`.
    pub fn log_slope(&self, x: f64) -> f64 {
        match *self {
            Segment::Linear { slope, .. } => slope.ln(),
            Segment::Cara {
                log_scale,
                anchor,
                k,
                ..
            } => k.ln() + log_scale - k * (x - anchor),
        }
    }

    /// `ln(f(q) − f(p))` for `p < q`, evaluated without forming `f`.
    pub fn log_increment(&self, p: f64, q: f64) -> f64 {
        match *self {
            Segment::Linear { slope, .. } => (slope * (q - p)).ln(),
            Segment::Cara {
                log_scale,
                anchor,
                k,
                ..
            } => log_scale - k * (p - anchor) + log1mexp(k * (q - p)),
        }
    }

    fn translated(&self, shift: f64) -> Segment {
        match *self {
            Segment::Linear { slope, intercept } => Segment::Linear {
                slope,
                intercept: intercept - slope * shift,
            },
            Segment::Cara {
                level,
                log_scale,
                anchor,
                k,
            } => Segment::Cara {
                level,
                log_scale,
                anchor: anchor + shift,
                k,
            },
        }
    }

    fn check_shape(&self) -> Option<String> {
        match *self {
            Segment::Linear { slope, intercept } => {
                if !(slope > 0.0) || !slope.is_finite() || !intercept.is_finite() {
                    Some(format!(
                        "linear segment slope {slope} must be positive and finite"
                    ))
                } else {
                    None
                }
            }
            Segment::Cara {
                level,
                log_scale,
                anchor,
                k,
            } => {
                if !(k > 0.0) || !k.is_finite() {
                    Some(format!("exponential segment rate {k} must be positive"))
                } else if !level.is_finite() || !log_scale.is_finite() || !anchor.is_finite() {
                    Some("exponential segment has non-finite parameters".to_string())
                } else {
                    None
                }
            }
        }
    }
}

/// A utility given by `segments[i]` on `(breakpoints[i-1], breakpoints[i]]`,
/// with unbounded first and last pieces.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawUtility", into = "RawUtility")]
pub struct PiecewiseUtility {
    breakpoints: Vec<f64>,
    segments: Vec<Segment>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawUtility {
    breakpoints: Vec<f64>,
    segments: Vec<Segment>,
}

impl TryFrom<RawUtility> for PiecewiseUtility {
    type Error = Error;

    fn try_from(raw: RawUtility) -> Result<Self> {
        PiecewiseUtility::new(raw.breakpoints, raw.segments)
    }
}

impl From<PiecewiseUtility> for RawUtility {
    fn from(u: PiecewiseUtility) -> Self {
        RawUtility {
            breakpoints: u.breakpoints,
            segments: u.segments,
        }
    }
}

impl PiecewiseUtility {
    /// Checks only the layout: one more segment than breakpoints, and
    /// strictly increasing finite breakpoints. Shape checks live in
    /// [`PiecewiseUtility::validate`].
    pub fn new(breakpoints: Vec<f64>, segments: Vec<Segment>) -> Result<Self> {
        if segments.len() != breakpoints.len() + 1 {
            return Err(Error::InvalidUtility(format!(
                "{} breakpoints need {} segments, got {}",
                breakpoints.len(),
                breakpoints.len() + 1,
                segments.len()
            )));
        }
        if breakpoints.iter().any(|b| !b.is_finite()) {
            return Err(Error::InvalidUtility("non-finite breakpoint".into()));
        }
        if breakpoints.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::InvalidUtility(
                "breakpoints must be strictly increasing".into(),
            ));
        }
        Ok(PiecewiseUtility {
            breakpoints,
            segments,
        })
    }

    pub fn identity() -> Self {
        Self::linear(1.0, 0.0)
    }

    pub fn linear(slope: f64, intercept: f64) -> Self {
        PiecewiseUtility {
            breakpoints: vec![],
            segments: vec![Segment::Linear { slope, intercept }],
        }
    }

    /// The piecewise-linear interpolant through `(xs[i], ys[i])`, continued
    /// linearly beyond both ends with the end slopes.
    pub fn interpolate(xs: &[f64], ys: &[f64]) -> Result<Self> {
        if xs.len() != ys.len() || xs.len() < 2 {
            return Err(Error::InvalidUtility(
                "interpolation needs at least two matching nodes".into(),
            ));
        }
        let chords = xs
            .windows(2)
            .zip(ys.windows(2))
            .map(|(x, y)| {
                let slope = (y[1] - y[0]) / (x[1] - x[0]);
                Segment::Linear {
                    slope,
                    intercept: y[0] - slope * x[0],
                }
            })
            .collect();
        // end chords extend beyond the outer nodes
        let breakpoints = xs[1..xs.len() - 1].to_vec();
        Self::new(breakpoints, chords)
    }

    /// The witness family used against "must remain optimal": linear on
    /// `(−β̂, α̂)` and of constant absolute risk aversion `k` outside.
    pub fn theorem_witness(k: f64, r_hat: &Gamble) -> Result<Self> {
        if !(k >= 1.0) || !k.is_finite() {
            return Err(Error::InvalidK(k));
        }
        let (a, b) = (r_hat.alpha(), r_hat.beta());
        Self::new(
            vec![-b, a],
            vec![
                Segment::Cara {
                    level: -b,
                    log_scale: k * b,
                    anchor: -b,
                    k,
                },
                Segment::Linear {
                    slope: 1.0,
                    intercept: 0.0,
                },
                Segment::Cara {
                    level: a,
                    log_scale: -k * a,
                    anchor: a,
                    k,
                },
            ],
        )
    }

    /// Smallest member of the doubling ladder `k, 2k, 4k, …` (capped at
    /// `k_max`) whose theorem witness passes validation.
    pub fn concave_theorem_witness(k: f64, k_max: f64, r_hat: &Gamble) -> Result<(f64, Self)> {
        let mut k = k;
        loop {
            let u = Self::theorem_witness(k, r_hat)?;
            if u.validate(witness_grid_step(r_hat)).passed() {
                return Ok((k, u));
            }
            if k >= k_max {
                return Err(Error::SearchExhausted {
                    limit: k_max,
                    best_margin: f64::NAN,
                });
            }
            k = (2.0 * k).min(k_max);
        }
    }

    /// Identity below `w_lo − β̂`, slope `iota` above it.
    pub fn proposition_witness(iota: f64, w_lo: f64, r_hat: &Gamble) -> Result<Self> {
        if !(iota > 0.0 && iota <= 1.0) {
            return Err(Error::InvalidIota(iota));
        }
        let kink = w_lo - r_hat.beta();
        Self::new(
            vec![kink],
            vec![
                Segment::Linear {
                    slope: 1.0,
                    intercept: 0.0,
                },
                Segment::Linear {
                    slope: iota,
                    intercept: (1.0 - iota) * kink,
                },
            ],
        )
    }

    pub fn breakpoints(&self) -> &[f64] {
        &self.breakpoints
    }

    pub fn segments(&self) -> &[Segment] {
        &self.segments
    }

    /// Index of the segment governing `x`.
    pub fn segment_index(&self, x: f64) -> usize {
        self.breakpoints.partition_point(|b| *b < x)
    }

    pub fn eval(&self, x: f64) -> f64 {
        self.eval_detailed(x).value
    }

    pub fn eval_detailed(&self, x: f64) -> Evaluation {
        self.segments[self.segment_index(x)].eval(x)
    }

    /// `u(b) − u(a)` for `a < b` in log space. Returns `-inf` when the
    /// function is flat on `[a, b]` and `NaN` when `a > b`.
    pub fn log_increment(&self, a: f64, b: f64) -> f64 {
        if a > b {
            return f64::NAN;
        }
        if a == b {
            return f64::NEG_INFINITY;
        }
        let mut terms = Vec::with_capacity(2);
        let mut i = self.segment_index(a);
        loop {
            let lo = if i == 0 {
                a
            } else {
                self.breakpoints[i - 1].max(a)
            };
            let hi = self.breakpoints.get(i).map_or(b, |bp| bp.min(b));
            if hi > lo {
                terms.push(self.segments[i].log_increment(lo, hi));
            }
            if i >= self.breakpoints.len() || self.breakpoints[i] >= b {
                break;
            }
            i += 1;
        }
        log_sum_exp(&terms)
    }

    /// `u(b) − u(a)` computed piece by piece. May overflow to infinity for
    /// steep exponential segments; prefer [`Self::log_increment`] there.
    pub fn increment(&self, a: f64, b: f64) -> f64 {
        if a <= b {
            self.log_increment(a, b).exp()
        } else {
            -self.log_increment(b, a).exp()
        }
    }

    /// The same function moved right by `shift`: `x ↦ u(x − shift)`.
    pub fn translated(&self, shift: f64) -> Self {
        PiecewiseUtility {
            breakpoints: self.breakpoints.iter().map(|b| b + shift).collect(),
            segments: self.segments.iter().map(|s| s.translated(shift)).collect(),
        }
    }

    pub fn validate(&self, grid_step: f64) -> ValidationReport {
        self.validate_with(grid_step, DEFAULT_TOLERANCE)
    }

    /// Checks continuity at every breakpoint, strict monotonicity and weak
    /// concavity. Concavity is checked analytically at breakpoints and on
    /// secant slopes of a grid covering the breakpoints plus one unit on
    /// either side. Slope comparisons are made between log-slopes, so
    /// `tolerance` is relative.
    pub fn validate_with(&self, grid_step: f64, tolerance: f64) -> ValidationReport {
        let mut report = ValidationReport::default();

        for (i, seg) in self.segments.iter().enumerate() {
            if let Some(msg) = seg.check_shape() {
                report.shape_errors.push(format!("segment {i}: {msg}"));
            }
        }
        if !report.shape_errors.is_empty() {
            return report;
        }

        for (i, &b) in self.breakpoints.iter().enumerate() {
            let left = self.segments[i].eval(b).value;
            let right = self.segments[i + 1].eval(b).value;
            let residual = (left - right).abs() / left.abs().max(1.0);
            report.continuity_residuals.push(residual);
            if !(residual <= tolerance) {
                report.continuity_failures.push(b);
            }
            let ls = self.segments[i].log_slope(b);
            let rs = self.segments[i + 1].log_slope(b);
            if rs > ls + tolerance && report.concavity_violation.is_none() {
                report.concavity_violation = Some(ConcavityViolation {
                    at: b,
                    left_slope: ls.exp(),
                    right_slope: rs.exp(),
                });
            }
        }

        let lo = self.breakpoints.first().copied().unwrap_or(0.0) - 1.0;
        let hi = self.breakpoints.last().copied().unwrap_or(0.0) + 1.0;
        let step = grid_step.max((hi - lo) / 1.0e6);
        let mut grid = crate::gamble::interval_points(lo, hi, step);
        grid.extend_from_slice(&self.breakpoints);
        grid.sort_by(f64::total_cmp);
        grid.dedup();

        let mut prev_log_secant: Option<(f64, f64)> = None;
        for w in grid.windows(2) {
            let (x, y) = (w[0], w[1]);
            let li = self.log_increment(x, y);
            if !(li > f64::NEG_INFINITY) {
                report.monotonicity_violation.get_or_insert((x, y));
                continue;
            }
            let secant = li - (y - x).ln();
            if let Some((at, prev)) = prev_log_secant {
                if secant > prev + tolerance && report.concavity_violation.is_none() {
                    report.concavity_violation = Some(ConcavityViolation {
                        at,
                        left_slope: prev.exp(),
                        right_slope: secant.exp(),
                    });
                }
            }
            prev_log_secant = Some((x, secant));
        }
        report
    }
}

fn witness_grid_step(r_hat: &Gamble) -> f64 {
    ((r_hat.alpha() + r_hat.beta()) / 1000.0).min(1e-2)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ConcavityViolation {
    /// Left end of the offending slope pair.
    pub at: f64,
    pub left_slope: f64,
    pub right_slope: f64,
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct ValidationReport {
    pub shape_errors: Vec<String>,
    /// Relative jump at each breakpoint.
    pub continuity_residuals: Vec<f64>,
    pub continuity_failures: Vec<f64>,
    pub monotonicity_violation: Option<(f64, f64)>,
    pub concavity_violation: Option<ConcavityViolation>,
}

impl ValidationReport {
    pub fn passed(&self) -> bool {
        self.shape_errors.is_empty()
            && self.continuity_failures.is_empty()
            && self.monotonicity_violation.is_none()
            && self.concavity_violation.is_none()
    }
}

/// A pair of utilities, one per state.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct StateUtility {
    pub u0: PiecewiseUtility,
    pub u1: PiecewiseUtility,
}

impl StateUtility {
    pub fn new(u0: PiecewiseUtility, u1: PiecewiseUtility) -> Self {
        StateUtility { u0, u1 }
    }

    pub fn state_independent(u: PiecewiseUtility) -> Self {
        StateUtility {
            u0: u.clone(),
            u1: u,
        }
    }

    pub fn identity() -> Self {
        Self::state_independent(PiecewiseUtility::identity())
    }

    pub fn is_state_independent(&self) -> bool {
        self.u0 == self.u1
    }

    pub fn validate(&self, grid_step: f64) -> (ValidationReport, ValidationReport) {
        (self.u0.validate(grid_step), self.u1.validate(grid_step))
    }
}
