//! Small dense linear programs in equality form, solved with a two-phase
//! tableau simplex under Bland's rule.
//!
//! Problems have the shape `min c·x  s.t.  A x = b, x >= 0`. Bland's rule
//! (smallest eligible entering index, smallest basic index on ratio ties)
//! rules out cycling and makes the returned optimal vertex a deterministic
//! function of the input.

use std::fmt;

const PIVOT_EPS: f64 = 1e-10;
const COST_EPS: f64 = 1e-11;
const FEAS_EPS: f64 = 1e-9;
const MAX_PIVOTS: usize = 100_000;

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum LpError {
    Infeasible,
    Unbounded,
    PivotLimit,
}

impl fmt::Display for LpError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            LpError::Infeasible => f.write_str("infeasible"),
            LpError::Unbounded => f.write_str("unbounded"),
            LpError::PivotLimit => f.write_str("pivot limit reached"),
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct LpSolution {
    pub value: f64,
    pub x: Vec<f64>,
}

#[derive(Clone, Debug, Default)]
pub struct LinearProgram {
    cost: Vec<f64>,
    rows: Vec<(Vec<(usize, f64)>, f64)>,
}

impl LinearProgram {
    pub fn new(n_vars: usize) -> Self {
        LinearProgram { cost: vec![0.0; n_vars], rows: Vec::new() }
    }

    pub fn n_vars(&self) -> usize {
        self.cost.len()
    }

    pub fn n_rows(&self) -> usize {
        self.rows.len()
    }

    pub fn set_cost(&mut self, var: usize, c: f64) {
        self.cost[var] = c;
    }

    /// Adds the constraint `Σ coeff·x[var] = rhs`.
    pub fn add_eq(&mut self, coeffs: Vec<(usize, f64)>, rhs: f64) {
        debug_assert!(coeffs.iter().all(|&(j, _)| j < self.cost.len()));
        self.rows.push((coeffs, rhs));
    }

    pub fn solve(&self) -> Result<LpSolution, LpError> {
        Tableau::new(self).run(&self.cost)
    }
}

struct Tableau {
    n: usize,
    width: usize,
    t: Vec<Vec<f64>>,
    obj: Vec<f64>,
    basis: Vec<usize>,
}

impl Tableau {
    fn new(lp: &LinearProgram) -> Self {
        let n = lp.cost.len();
        let m = lp.rows.len();
        let width = n + m + 1;
        let mut t = Vec::with_capacity(m);
        for (i, (coeffs, rhs)) in lp.rows.iter().enumerate() {
            let sign = if *rhs < 0.0 { -1.0 } else { 1.0 };
            let mut row = vec![0.0; width];
            for &(j, a) in coeffs {
                row[j] += sign * a;
            }
            row[n + i] = 1.0;
            row[width - 1] = sign * rhs;
            t.push(row);
        }
        let basis = (n..n + m).collect();
        Tableau { n, width, t, obj: vec![0.0; width], basis }
    }

    fn rhs(&self, i: usize) -> f64 {
        self.t[i][self.width - 1]
    }

    fn pivot(&mut self, r: usize, c: usize) {
        let p = self.t[r][c];
        for v in self.t[r].iter_mut() {
            *v /= p;
        }
        let pivot_row = self.t[r].clone();
        for (i, row) in self.t.iter_mut().enumerate() {
            if i != r {
                let f = row[c];
                if f != 0.0 {
                    for (v, pv) in row.iter_mut().zip(&pivot_row) {
                        *v -= f * pv;
                    }
                    row[c] = 0.0;
                }
            }
        }
        let f = self.obj[c];
        if f != 0.0 {
            for (v, pv) in self.obj.iter_mut().zip(&pivot_row) {
                *v -= f * pv;
            }
            self.obj[c] = 0.0;
        }
        self.basis[r] = c;
    }

    /// Loads `cost` (over the first `cost.len()` columns) as the objective
    /// row, priced out against the current basis.
    fn load_objective(&mut self, cost: &[f64]) {
        self.obj = vec![0.0; self.width];
        self.obj[..cost.len()].copy_from_slice(cost);
        for i in 0..self.t.len() {
            let cb = cost.get(self.basis[i]).copied().unwrap_or(0.0);
            if cb != 0.0 {
                for j in 0..self.width {
                    self.obj[j] -= cb * self.t[i][j];
                }
            }
        }
    }

    /// Simplex iterations with entering columns restricted to `< limit`.
    fn iterate(&mut self, limit: usize) -> Result<(), LpError> {
        for _ in 0..MAX_PIVOTS {
            let Some(c) = (0..limit).find(|&j| self.obj[j] < -COST_EPS) else {
                return Ok(());
            };
            let mut best: Option<(f64, usize, usize)> = None;
            for i in 0..self.t.len() {
                let a = self.t[i][c];
                if a > PIVOT_EPS {
                    let ratio = self.rhs(i) / a;
                    let better = match best {
                        None => true,
                        Some((r, _, b)) => ratio < r - 1e-14 || (ratio <= r + 1e-14 && self.basis[i] < b),
                    };
                    if better {
                        best = Some((ratio, i, self.basis[i]));
                    }
                }
            }
            match best {
                None => return Err(LpError::Unbounded),
                Some((_, r, _)) => self.pivot(r, c),
            }
        }
        Err(LpError::PivotLimit)
    }

    fn run(mut self, cost: &[f64]) -> Result<LpSolution, LpError> {
        let n = self.n;
        let m = self.t.len();

        // Phase 1: minimize the sum of artificials.
        let mut phase1 = vec![0.0; n + m];
        phase1[n..].iter_mut().for_each(|c| *c = 1.0);
        self.load_objective(&phase1);
        self.iterate(n + m)?;
        let infeasibility: f64 = (0..m).filter(|&i| self.basis[i] >= n).map(|i| self.rhs(i)).sum();
        if infeasibility > FEAS_EPS {
            return Err(LpError::Infeasible);
        }

        // Drive remaining (zero-level) artificials out of the basis; rows
        // where that is impossible are redundant and dropped.
        let mut i = 0;
        while i < self.t.len() {
            if self.basis[i] >= n {
                if let Some(c) = (0..n).find(|&j| self.t[i][j].abs() > PIVOT_EPS) {
                    self.pivot(i, c);
                    i += 1;
                } else {
                    self.t.remove(i);
                    self.basis.remove(i);
                }
            } else {
                i += 1;
            }
        }

        // Phase 2 over the structural columns only.
        self.load_objective(cost);
        self.iterate(n)?;

        let mut x = vec![0.0; n];
        for (i, &b) in self.basis.iter().enumerate() {
            if b < n {
                x[b] = self.t[i][self.width - 1].max(0.0);
            }
        }
        let value = x.iter().zip(cost).map(|(a, c)| a * c).sum();
        Ok(LpSolution { value, x })
    }
}
