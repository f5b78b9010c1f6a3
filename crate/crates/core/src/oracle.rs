//! Brute-force check of "the safe option must remain optimal".
//!
//! Both preference comparisons read the utility only at the payoffs
//! `w, w + α, w − β, w + α̂, w − β̂` for `w ∈ W`. Fixing the belief, the
//! search for a concave increasing utility with `s ≽ r` on all of `W` and
//! `r̂ ≻ s` at one flip wealth is therefore a linear program in the utility
//! values at those nodes. The program is parametrized by chord slopes
//! `s_j = δ + t_j` with `t_j ≥ 0`, which makes monotonicity a variable bound
//! and pins `u` at the first node to zero.
//!
//! The belief is scanned on a grid; the theorem is never consulted.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::gamble::{Belief, Gamble};
use crate::lp::{LinearProgram, LpStatus};
use crate::preference::indifference_belief;
use crate::scenario::{Scenario, Settings};
use crate::utility::{PiecewiseUtility, StateUtility};

/// Lower bound on every chord slope.
pub const SLOPE_FLOOR: f64 = 1e-6;
/// Upper bound on every chord slope.
pub const SLOPE_CAP: f64 = 1e6;
/// Number of ×10 refinement passes around the best belief before a
/// "must remain optimal" verdict.
pub const REFINE_LEVELS: usize = 2;

/// The node set and preference data for one (belief, flip wealth) cell.
#[derive(Debug, Clone)]
pub struct LpInstance {
    pub nodes: Vec<f64>,
    pub wealths: Vec<f64>,
    pub r: Gamble,
    pub r_hat: Gamble,
    pub belief: f64,
    pub flip_wealth: f64,
}

/// An optimal utility assignment for one cell.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LpPoint {
    pub belief: f64,
    pub flip_wealth: f64,
    /// Optimal `seu(r̂) − seu(s)` at the flip wealth.
    pub margin: f64,
    pub nodes: Vec<f64>,
    pub utilities: Vec<f64>,
}

/// Union of all payoff points, sorted and deduplicated.
pub fn node_set(wealths: &[f64], r: &Gamble, r_hat: &Gamble) -> Vec<f64> {
    let mut nodes: Vec<f64> = wealths
        .iter()
        .flat_map(|&w| {
            [
                w,
                w + r.alpha(),
                w - r.beta(),
                w + r_hat.alpha(),
                w - r_hat.beta(),
            ]
        })
        .collect();
    nodes.sort_by(f64::total_cmp);
    nodes.dedup();
    nodes
}

impl LpInstance {
    pub fn new(
        wealths: &[f64],
        r: Gamble,
        r_hat: Gamble,
        belief: f64,
        flip_wealth: f64,
    ) -> Result<Self> {
        if !(belief > 0.0 && belief < 1.0) {
            return Err(Error::InvalidBelief(belief));
        }
        let mut wealths = wealths.to_vec();
        wealths.sort_by(f64::total_cmp);
        wealths.dedup();
        if !wealths.contains(&flip_wealth) {
            return Err(Error::PreconditionViolated(format!(
                "flip wealth {flip_wealth} is not in the wealth set"
            )));
        }
        Ok(LpInstance {
            nodes: node_set(&wealths, &r, &r_hat),
            wealths,
            r,
            r_hat,
            belief,
            flip_wealth,
        })
    }

    fn node(&self, x: f64) -> usize {
        self.nodes
            .binary_search_by(|n| n.total_cmp(&x))
            .expect("payoff point missing from node set")
    }

    /// Monotonicity (as variable bounds), concavity, one weak preference
    /// per wealth and the strict preference (as the objective).
    pub fn constraint_count(&self) -> usize {
        let n = self.nodes.len();
        (n - 1) + n.saturating_sub(2) + self.wealths.len() + 1
    }

    /// Node weights of `μ·u(w + α) + (1 − μ)·u(w − β) − u(w)`.
    fn gamble_functional(&self, w: f64, g: &Gamble) -> Vec<f64> {
        let mut c = vec![0.0; self.nodes.len()];
        c[self.node(w + g.alpha())] += self.belief;
        c[self.node(w - g.beta())] += 1.0 - self.belief;
        c[self.node(w)] -= 1.0;
        c
    }

    /// Rewrites a functional of node values as `constant + coeffs · t`.
    fn in_slack_slopes(&self, c: &[f64]) -> (f64, Vec<f64>) {
        let gaps: Vec<f64> = self.nodes.windows(2).map(|p| p[1] - p[0]).collect();
        // u_i = Σ_{j<i} s_j h_j, so Σ c_i u_i = Σ_j h_j (Σ_{i>j} c_i) s_j
        let mut suffix = 0.0;
        let mut coeffs = vec![0.0; gaps.len()];
        for j in (0..gaps.len()).rev() {
            suffix += c[j + 1];
            coeffs[j] = gaps[j] * suffix;
        }
        let constant = SLOPE_FLOOR * coeffs.iter().sum::<f64>();
        (constant, coeffs)
    }

    fn program(&self) -> (LinearProgram, f64) {
        let m = self.nodes.len() - 1;
        let (obj_const, obj) =
            self.in_slack_slopes(&self.gamble_functional(self.flip_wealth, &self.r_hat));
        let mut lp = LinearProgram::new(obj);
        if m > 0 {
            let mut cap = vec![0.0; m];
            cap[0] = 1.0;
            lp.add_le(cap, SLOPE_CAP - SLOPE_FLOOR);
        }
        for j in 0..m.saturating_sub(1) {
            let mut row = vec![0.0; m];
            row[j + 1] = 1.0;
            row[j] = -1.0;
            lp.add_le(row, 0.0);
        }
        for &w in &self.wealths {
            let (k, row) = self.in_slack_slopes(&self.gamble_functional(w, &self.r));
            lp.add_le(row, -k);
        }
        (lp, obj_const)
    }

    /// Maximal `seu(r̂) − seu(s)` at the flip wealth subject to `s ≽ r` on
    /// every wealth, or `None` when no admissible utility exists.
    pub fn solve(&self) -> Result<Option<LpPoint>> {
        let (lp, constant) = self.program();
        let status = lp
            .solve()
            .map_err(|e| Error::NumericFailure(format!("{e} (cell {self:?})")))?;
        match status {
            LpStatus::Infeasible => Ok(None),
            LpStatus::Unbounded => Err(Error::NumericFailure(format!(
                "bounded program reported unbounded (cell {self:?})"
            ))),
            LpStatus::Optimal { x, objective } => {
                let mut utilities = Vec::with_capacity(self.nodes.len());
                utilities.push(0.0);
                for (j, t) in x.iter().enumerate() {
                    let h = self.nodes[j + 1] - self.nodes[j];
                    let prev = utilities[j];
                    utilities.push(prev + (SLOPE_FLOOR + t) * h);
                }
                Ok(Some(LpPoint {
                    belief: self.belief,
                    flip_wealth: self.flip_wealth,
                    margin: objective + constant,
                    nodes: self.nodes.clone(),
                    utilities,
                }))
            }
        }
    }

    /// Checks whether `u` (restricted to the nodes) satisfies this cell's
    /// constraints, up to a positive rescaling. Slopes are compared in log
    /// space, so steep witnesses are handled without overflow.
    pub fn check_utility(&self, u: &PiecewiseUtility, tolerance: f64) -> PointCheck {
        let log_slopes: Vec<f64> = self
            .nodes
            .windows(2)
            .map(|p| u.log_increment(p[0], p[1]) - (p[1] - p[0]).ln())
            .collect();
        let increasing = log_slopes.iter().all(|s| s.is_finite());
        let concave = log_slopes.windows(2).all(|s| s[1] <= s[0] + tolerance);
        let (lo, hi) = log_slopes
            .iter()
            .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), s| {
                (lo.min(*s), hi.max(*s))
            });
        let slope_box = log_slopes.is_empty() || hi - lo <= (SLOPE_CAP / SLOPE_FLOOR).ln();
        let su = StateUtility::state_independent(u.clone());
        let weak_preferences = self.wealths.iter().all(|&w| {
            indifference_belief(&su, w, &self.r, 0.0)
                .map(|m| self.belief <= m + tolerance)
                .unwrap_or(false)
        });
        let strict_preference = indifference_belief(&su, self.flip_wealth, &self.r_hat, 0.0)
            .map(|m| self.belief > m + 10.0 * tolerance)
            .unwrap_or(false);
        PointCheck {
            increasing,
            concave,
            slope_box,
            weak_preferences,
            strict_preference,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct PointCheck {
    pub increasing: bool,
    pub concave: bool,
    /// Slope ratio fits within `[SLOPE_FLOOR, SLOPE_CAP]` after rescaling.
    pub slope_box: bool,
    pub weak_preferences: bool,
    pub strict_preference: bool,
}

impl PointCheck {
    pub fn feasible(&self) -> bool {
        self.increasing
            && self.concave
            && self.slope_box
            && self.weak_preferences
            && self.strict_preference
    }
}

/// Solves one cell of the scan. `None` means no admissible utility.
pub fn feasible_at_belief(scenario: &Scenario, mu: Belief, flip_w: f64) -> Result<Option<LpPoint>> {
    let wealths = scenario.wealth.points();
    LpInstance::new(&wealths, scenario.r, scenario.r_hat, mu.value(), flip_w)?.solve()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OracleVerdict {
    pub must_remain_optimal: bool,
    /// The violating cell, present iff `must_remain_optimal` is false.
    pub evidence: Option<LpPoint>,
    /// Largest margin seen over all cells.
    pub best_margin: f64,
    pub cells: usize,
}

fn scan(
    wealths: &[f64],
    r: Gamble,
    r_hat: Gamble,
    beliefs: &[f64],
) -> Result<Vec<Option<LpPoint>>> {
    let cells: Vec<(f64, f64)> = beliefs
        .iter()
        .flat_map(|&mu| wealths.iter().map(move |&w| (mu, w)))
        .collect();
    cells
        .par_iter()
        .map(|&(mu, w)| LpInstance::new(wealths, r, r_hat, mu, w)?.solve())
        .collect()
}

fn belief_grid(lo: f64, hi: f64, step: f64) -> Vec<f64> {
    let n = ((hi - lo) / step).round() as i64;
    (1..n)
        .map(|i| lo + i as f64 * step)
        .filter(|m| *m > 0.0 && *m < 1.0)
        .collect()
}

/// Scans beliefs in `(0, 1)` at `belief_grid_step` and every flip wealth,
/// then refines around the best cell. Reports a violation (with the
/// lexicographically first violating cell) iff one clears `10·tolerance`.
pub fn must_remain_optimal_oracle(scenario: &Scenario) -> Result<OracleVerdict> {
    scenario.validate()?;
    let Settings {
        tolerance,
        belief_grid_step,
        ..
    } = scenario.settings();
    let gap = 10.0 * tolerance;
    let wealths = scenario.wealth.points();
    let (r, r_hat) = (scenario.r, scenario.r_hat);

    let mut step = belief_grid_step;
    let mut beliefs = belief_grid(0.0, 1.0, step);
    let mut cells = 0;
    let mut best: Option<LpPoint> = None;

    for level in 0..=REFINE_LEVELS {
        let results = scan(&wealths, r, r_hat, &beliefs)?;
        cells += results.len();
        if let Some(hit) = results.iter().flatten().find(|p| p.margin > gap) {
            return Ok(OracleVerdict {
                must_remain_optimal: false,
                best_margin: hit.margin.max(best.map_or(f64::NEG_INFINITY, |b| b.margin)),
                evidence: Some(hit.clone()),
                cells,
            });
        }
        for p in results.into_iter().flatten() {
            if best.as_ref().is_none_or(|b| p.margin > b.margin) {
                best = Some(p);
            }
        }
        if level == REFINE_LEVELS {
            break;
        }
        let Some(center) = best.as_ref().map(|b| b.belief) else {
            break;
        };
        let fine = step / 10.0;
        beliefs = belief_grid(center - step, center + step, fine);
        step = fine;
    }
    Ok(OracleVerdict {
        must_remain_optimal: true,
        evidence: None,
        best_margin: best.map_or(f64::NEG_INFINITY, |b| b.margin),
        cells,
    })
}
