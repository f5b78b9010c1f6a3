//! Dense two-phase simplex for small problems of the form
//!
//! ```text
//! maximize    c·x
//! subject to  A x ≤ b,  x ≥ 0
//! ```
//!
//! Right-hand sides may be negative; such rows get an artificial variable
//! and are handled in phase one. Pivoting uses Dantzig's rule and falls back
//! to Bland's rule after a run of degenerate pivots.

const EPS: f64 = 1e-11;
const MAX_PIVOTS: usize = 50_000;
const DEGENERATE_RUN: usize = 50;

#[derive(Debug, Clone, PartialEq)]
pub enum LpStatus {
    Optimal { x: Vec<f64>, objective: f64 },
    Infeasible,
    Unbounded,
}

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
#[error("simplex did not converge after {pivots} pivots")]
pub struct PivotLimit {
    pub pivots: usize,
}

/// A linear program in inequality form. Rows are added one at a time.
#[derive(Debug, Clone, Default)]
pub struct LinearProgram {
    num_vars: usize,
    objective: Vec<f64>,
    rows: Vec<Vec<f64>>,
    rhs: Vec<f64>,
}

impl LinearProgram {
    pub fn new(objective: Vec<f64>) -> Self {
        LinearProgram {
            num_vars: objective.len(),
            objective,
            rows: vec![],
            rhs: vec![],
        }
    }

    pub fn num_vars(&self) -> usize {
        self.num_vars
    }

    pub fn num_constraints(&self) -> usize {
        self.rows.len()
    }

    /// Adds `coeffs · x ≤ rhs`.
    pub fn add_le(&mut self, coeffs: Vec<f64>, rhs: f64) {
        assert_eq!(coeffs.len(), self.num_vars, "row length mismatch");
        self.rows.push(coeffs);
        self.rhs.push(rhs);
    }

    pub fn solve(&self) -> Result<LpStatus, PivotLimit> {
        Tableau::new(self).run(self)
    }
}

struct Tableau {
    // constraint rows, last column is the right-hand side
    t: Vec<Vec<f64>>,
    basis: Vec<usize>,
    num_vars: usize,
    num_slack: usize,
    num_art: usize,
    pivots: usize,
}

impl Tableau {
    fn new(lp: &LinearProgram) -> Self {
        let m = lp.rows.len();
        let n = lp.num_vars;
        let num_art = lp.rhs.iter().filter(|b| **b < 0.0).count();
        let width = n + m + num_art + 1;
        let mut t = Vec::with_capacity(m);
        let mut basis = Vec::with_capacity(m);
        let mut art = 0;
        for (i, (row, &b)) in lp.rows.iter().zip(&lp.rhs).enumerate() {
            let mut r = vec![0.0; width];
            if b >= 0.0 {
                r[..n].copy_from_slice(row);
                r[n + i] = 1.0;
                r[width - 1] = b;
                basis.push(n + i);
            } else {
                for (dst, src) in r[..n].iter_mut().zip(row) {
                    *dst = -src;
                }
                r[n + i] = -1.0;
                r[n + m + art] = 1.0;
                r[width - 1] = -b;
                basis.push(n + m + art);
                art += 1;
            }
            t.push(r);
        }
        Tableau {
            t,
            basis,
            num_vars: n,
            num_slack: m,
            num_art,
            pivots: 0,
        }
    }

    fn width(&self) -> usize {
        self.num_vars + self.num_slack + self.num_art + 1
    }

    /// Reduced-cost row for maximizing `cost · x` over the current basis.
    fn reduced_costs(&self, cost: &[f64]) -> Vec<f64> {
        let w = self.width();
        let mut z = vec![0.0; w];
        for (j, zj) in z.iter_mut().enumerate().take(w - 1) {
            *zj = -cost[j];
        }
        for (row, &bj) in self.t.iter().zip(&self.basis) {
            let cb = cost[bj];
            if cb != 0.0 {
                for (zj, a) in z.iter_mut().zip(row) {
                    *zj += cb * a;
                }
            }
        }
        z
    }

    fn pivot(&mut self, z: &mut [f64], row: usize, col: usize) {
        let p = self.t[row][col];
        for a in self.t[row].iter_mut() {
            *a /= p;
        }
        let pivot_row = self.t[row].clone();
        for (i, r) in self.t.iter_mut().enumerate() {
            if i == row {
                continue;
            }
            let f = r[col];
            if f != 0.0 {
                for (a, pr) in r.iter_mut().zip(&pivot_row) {
                    *a -= f * pr;
                }
                r[col] = 0.0;
            }
        }
        let f = z[col];
        if f != 0.0 {
            for (a, pr) in z.iter_mut().zip(&pivot_row) {
                *a -= f * pr;
            }
            z[col] = 0.0;
        }
        self.basis[row] = col;
        self.pivots += 1;
    }

    /// Runs simplex iterations on reduced costs `z`. Columns for which
    /// `allowed` is false never enter. Returns false when unbounded.
    fn optimize(
        &mut self,
        z: &mut [f64],
        allowed: &dyn Fn(usize) -> bool,
    ) -> Result<bool, PivotLimit> {
        let rhs = self.width() - 1;
        let mut degenerate = 0;
        loop {
            if self.pivots > MAX_PIVOTS {
                return Err(PivotLimit {
                    pivots: self.pivots,
                });
            }
            let bland = degenerate >= DEGENERATE_RUN;
            let mut enter = None;
            let mut best = -EPS;
            for (j, &zj) in z.iter().enumerate().take(rhs) {
                if !allowed(j) || zj >= -EPS {
                    continue;
                }
                if bland {
                    enter = Some(j);
                    break;
                }
                if zj < best {
                    best = zj;
                    enter = Some(j);
                }
            }
            let Some(col) = enter else {
                return Ok(true);
            };

            let mut leave: Option<(usize, f64)> = None;
            for (i, row) in self.t.iter().enumerate() {
                let a = row[col];
                if a > EPS {
                    let ratio = row[rhs] / a;
                    let better = match leave {
                        None => true,
                        Some((li, lr)) => {
                            ratio < lr - EPS
                                || (ratio <= lr + EPS && self.basis[i] < self.basis[li])
                        }
                    };
                    if better {
                        leave = Some((i, ratio));
                    }
                }
            }
            let Some((row, ratio)) = leave else {
                return Ok(false);
            };
            if ratio.abs() <= EPS {
                degenerate += 1;
            } else {
                degenerate = 0;
            }
            self.pivot(z, row, col);
        }
    }

    fn run(mut self, lp: &LinearProgram) -> Result<LpStatus, PivotLimit> {
        let w = self.width();
        let rhs = w - 1;
        let first_art = self.num_vars + self.num_slack;

        if self.num_art > 0 {
            let mut cost = vec![0.0; w - 1];
            for c in cost.iter_mut().skip(first_art) {
                *c = -1.0;
            }
            let mut z = self.reduced_costs(&cost);
            self.optimize(&mut z, &|_| true)?;
            let infeasibility: f64 = self
                .t
                .iter()
                .zip(&self.basis)
                .filter(|(_, &b)| b >= first_art)
                .map(|(row, _)| row[rhs])
                .sum();
            let scale = lp.rhs.iter().fold(1.0_f64, |m, b| m.max(b.abs()));
            if infeasibility > 1e-9 * scale {
                return Ok(LpStatus::Infeasible);
            }
            // drive remaining artificials out of the basis
            for i in 0..self.t.len() {
                if self.basis[i] >= first_art {
                    if let Some(col) = (0..first_art).find(|&j| self.t[i][j].abs() > 1e-9) {
                        let mut dummy = vec![0.0; w];
                        self.pivot(&mut dummy, i, col);
                    }
                }
            }
        }

        let mut cost = vec![0.0; w - 1];
        cost[..self.num_vars].copy_from_slice(&lp.objective);
        let mut z = self.reduced_costs(&cost);
        let num_art_start = first_art;
        let bounded = self.optimize(&mut z, &|j| j < num_art_start)?;
        if !bounded {
            return Ok(LpStatus::Unbounded);
        }
        let mut x = vec![0.0; self.num_vars];
        for (row, &b) in self.t.iter().zip(&self.basis) {
            if b < self.num_vars {
                x[b] = row[rhs];
            }
        }
        let objective = lp.objective.iter().zip(&x).map(|(c, v)| c * v).sum();
        Ok(LpStatus::Optimal { x, objective })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn optimal(status: LpStatus) -> (Vec<f64>, f64) {
        match status {
            LpStatus::Optimal { x, objective } => (x, objective),
            other => panic!("expected optimum, got {other:?}"),
        }
    }

    #[test]
    fn textbook_maximum() {
        // max 3x + 5y, x ≤ 4, 2y ≤ 12, 3x + 2y ≤ 18 → (2, 6), 36
        let mut lp = LinearProgram::new(vec![3.0, 5.0]);
        lp.add_le(vec![1.0, 0.0], 4.0);
        lp.add_le(vec![0.0, 2.0], 12.0);
        lp.add_le(vec![3.0, 2.0], 18.0);
        let (x, obj) = optimal(lp.solve().unwrap());
        assert!((obj - 36.0).abs() < 1e-9);
        assert!((x[0] - 2.0).abs() < 1e-9 && (x[1] - 6.0).abs() < 1e-9);
    }

    #[test]
    fn negative_rhs_needs_phase_one() {
        // max -x - y, x + y ≥ 2 (−x − y ≤ −2), x ≤ 3 → objective −2
        let mut lp = LinearProgram::new(vec![-1.0, -1.0]);
        lp.add_le(vec![-1.0, -1.0], -2.0);
        lp.add_le(vec![1.0, 0.0], 3.0);
        let (x, obj) = optimal(lp.solve().unwrap());
        assert!((obj + 2.0).abs() < 1e-9);
        assert!((x[0] + x[1] - 2.0).abs() < 1e-9);
    }

    #[test]
    fn infeasible_and_unbounded() {
        let mut lp = LinearProgram::new(vec![1.0]);
        lp.add_le(vec![1.0], 1.0);
        lp.add_le(vec![-1.0], -2.0);
        assert_eq!(lp.solve().unwrap(), LpStatus::Infeasible);

        let mut lp = LinearProgram::new(vec![1.0, 0.0]);
        lp.add_le(vec![0.0, 1.0], 1.0);
        assert_eq!(lp.solve().unwrap(), LpStatus::Unbounded);
    }

    #[test]
    fn degenerate_problem_terminates() {
        // Beale's cycling example under Dantzig's rule
        let mut lp = LinearProgram::new(vec![0.75, -150.0, 1.0 / 50.0, -6.0]);
        lp.add_le(vec![0.25, -60.0, -1.0 / 25.0, 9.0], 0.0);
        lp.add_le(vec![0.5, -90.0, -1.0 / 50.0, 3.0], 0.0);
        lp.add_le(vec![0.0, 0.0, 1.0, 0.0], 1.0);
        let (_, obj) = optimal(lp.solve().unwrap());
        assert!((obj - 0.05).abs() < 1e-9);
    }

    /// Brute-force vertex enumeration on random 2-variable problems.
    #[test]
    fn agrees_with_vertex_enumeration() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(7);
        for _ in 0..300 {
            let c = vec![rng.random_range(-3.0..3.0), rng.random_range(-3.0..3.0)];
            let mut lp = LinearProgram::new(c.clone());
            let mut rows = vec![];
            for _ in 0..4 {
                let a = vec![rng.random_range(-2.0..2.0), rng.random_range(-2.0..2.0)];
                let b = rng.random_range(-1.0..4.0);
                lp.add_le(a.clone(), b);
                rows.push((a, b));
            }
            // box keeps the problem bounded
            lp.add_le(vec![1.0, 0.0], 10.0);
            lp.add_le(vec![0.0, 1.0], 10.0);
            rows.push((vec![1.0, 0.0], 10.0));
            rows.push((vec![0.0, 1.0], 10.0));
            rows.push((vec![-1.0, 0.0], 0.0));
            rows.push((vec![0.0, -1.0], 0.0));

            let feasible =
                |x: f64, y: f64| rows.iter().all(|(a, b)| a[0] * x + a[1] * y <= b + 1e-9);
            let mut best: Option<f64> = None;
            for i in 0..rows.len() {
                for j in i + 1..rows.len() {
                    let (a1, b1) = &rows[i];
                    let (a2, b2) = &rows[j];
                    let det = a1[0] * a2[1] - a1[1] * a2[0];
                    if det.abs() < 1e-12 {
                        continue;
                    }
                    let x = (b1 * a2[1] - a1[1] * b2) / det;
                    let y = (a1[0] * b2 - b1 * a2[0]) / det;
                    if feasible(x, y) {
                        let v = c[0] * x + c[1] * y;
                        best = Some(best.map_or(v, |bv: f64| bv.max(v)));
                    }
                }
            }
            match (lp.solve().unwrap(), best) {
                (LpStatus::Optimal { objective, .. }, Some(v)) => {
                    assert!((objective - v).abs() < 1e-7, "{objective} vs {v}")
                }
                (LpStatus::Infeasible, None) => {}
                (got, want) => panic!("solver {got:?} vs enumeration {want:?}"),
            }
        }
    }
}
