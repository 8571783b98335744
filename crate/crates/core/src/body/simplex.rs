//! Dense two-phase tableau simplex with Bland's anti-cycling rule.
//!
//! Problems are `min cᵀx` subject to `A_eq x = b_eq`, `A_ub x ≤ b_ub`,
//! `x ≥ 0`. Sizes at desk scale are a few hundred columns at most.

use crate::error::{Error, Result};

/// Phase-one residual above which the problem is declared infeasible.
pub const FEASIBILITY_TOLERANCE: f64 = 1e-9;
const REDUCED_COST_TOLERANCE: f64 = 1e-11;
const PIVOT_TOLERANCE: f64 = 1e-11;
const MAX_PIVOTS: usize = 200_000;

#[derive(Debug, Clone, Default)]
pub(crate) struct LinearProgram {
    pub cost: Vec<f64>,
    pub eq_rows: Vec<Vec<f64>>,
    pub eq_rhs: Vec<f64>,
    pub ub_rows: Vec<Vec<f64>>,
    pub ub_rhs: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub(crate) enum LpOutcome {
    Optimal { x: Vec<f64>, objective: f64 },
    Infeasible,
}

struct Tableau {
    rows: Vec<Vec<f64>>,
    /// reduced costs, last entry holds −objective
    obj: Vec<f64>,
    basis: Vec<usize>,
    width: usize,
}

impl Tableau {
    fn rhs(&self, i: usize) -> f64 {
        self.rows[i][self.width]
    }

    fn pivot(&mut self, r: usize, c: usize) {
        let p = self.rows[r][c];
        self.rows[r].iter_mut().for_each(|v| *v /= p);
        let pivot_row = self.rows[r].clone();
        for (i, row) in self.rows.iter_mut().enumerate() {
            if i == r {
                continue;
            }
            let f = row[c];
            if f != 0.0 {
                for (v, pv) in row.iter_mut().zip(&pivot_row) {
                    *v -= f * pv;
                }
                row[c] = 0.0;
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

    fn set_objective(&mut self, cost: &[f64]) {
        self.obj = vec![0.0; self.width + 1];
        self.obj[..cost.len()].copy_from_slice(cost);
        for (i, &b) in self.basis.iter().enumerate() {
            let cb = self.obj[b];
            if cb != 0.0 {
                for (v, rv) in self.obj.iter_mut().zip(&self.rows[i]) {
                    *v -= cb * rv;
                }
            }
        }
    }

    /// Reduced cost of column j counts as negative only beyond rounding
    /// noise relative to the size of the column.
    fn improving(&self, j: usize) -> bool {
        let rc = self.obj[j];
        if rc >= -REDUCED_COST_TOLERANCE {
            return false;
        }
        let size = self.rows.iter().fold(1.0f64, |m, r| m.max(r[j].abs()));
        rc < -REDUCED_COST_TOLERANCE * size
    }

    /// Runs Bland's rule over columns `< allowed`. Returns false on
    /// unboundedness. When `bounded` is set the objective is known to be
    /// bounded below, so a column without a leaving row is rounding noise
    /// and is set aside instead.
    fn optimize(&mut self, allowed: usize, bounded: bool, pivots: &mut usize) -> Result<bool> {
        let mut skipped = vec![false; allowed];
        loop {
            let Some(enter) = (0..allowed).find(|&j| !skipped[j] && self.improving(j)) else {
                return Ok(true);
            };
            let mut leave: Option<(usize, f64)> = None;
            for i in 0..self.rows.len() {
                let a = self.rows[i][enter];
                if a > PIVOT_TOLERANCE {
                    let ratio = self.rhs(i) / a;
                    leave = match leave {
                        None => Some((i, ratio)),
                        Some((li, lr)) => {
                            let tie = (ratio - lr).abs() <= 1e-12 * (1.0 + lr.abs());
                            if ratio < lr && !tie || tie && self.basis[i] < self.basis[li] {
                                Some((i, ratio))
                            } else {
                                Some((li, lr))
                            }
                        }
                    };
                }
            }
            let Some((r, _)) = leave else {
                if bounded {
                    skipped[enter] = true;
                    continue;
                }
                return Ok(false);
            };
            self.pivot(r, enter);
            skipped.iter_mut().for_each(|s| *s = false);
            *pivots += 1;
            if *pivots > MAX_PIVOTS {
                return Err(Error::LpFailure(format!("pivot limit {MAX_PIVOTS} reached")));
            }
        }
    }
}

pub(crate) fn solve(lp: &LinearProgram) -> Result<LpOutcome> {
    let nvars = lp.cost.len();
    let n_eq = lp.eq_rows.len();
    let n_ub = lp.ub_rows.len();
    if lp.eq_rhs.len() != n_eq || lp.ub_rhs.len() != n_ub {
        return Err(Error::LpFailure("row/rhs count mismatch".into()));
    }
    if lp
        .eq_rows
        .iter()
        .chain(&lp.ub_rows)
        .any(|r| r.len() != nvars)
    {
        return Err(Error::LpFailure("constraint row length mismatch".into()));
    }
    let nrows = n_eq + n_ub;
    let n_struct = nvars + n_ub;

    // rows needing an artificial basis column
    let mut needs_art = Vec::new();
    let mut rows = Vec::with_capacity(nrows);
    let mut basis = vec![usize::MAX; nrows];
    for (i, (r, &b)) in lp.eq_rows.iter().zip(&lp.eq_rhs).enumerate() {
        let sign = if b < 0.0 { -1.0 } else { 1.0 };
        let mut row = vec![0.0; n_struct];
        row[..nvars].iter_mut().zip(r).for_each(|(d, s)| *d = sign * s);
        rows.push((row, sign * b));
        needs_art.push(i);
    }
    for (s, (r, &b)) in lp.ub_rows.iter().zip(&lp.ub_rhs).enumerate() {
        let i = n_eq + s;
        let sign = if b < 0.0 { -1.0 } else { 1.0 };
        let mut row = vec![0.0; n_struct];
        row[..nvars].iter_mut().zip(r).for_each(|(d, v)| *d = sign * v);
        row[nvars + s] = sign;
        rows.push((row, sign * b));
        if sign > 0.0 {
            basis[i] = nvars + s;
        } else {
            needs_art.push(i);
        }
    }
    let n_art = needs_art.len();
    let width = n_struct + n_art;
    let mut tab = Tableau {
        rows: rows
            .into_iter()
            .map(|(mut row, b)| {
                row.resize(width, 0.0);
                row.push(b);
                row
            })
            .collect(),
        obj: Vec::new(),
        basis,
        width,
    };
    for (a, &i) in needs_art.iter().enumerate() {
        tab.rows[i][n_struct + a] = 1.0;
        tab.basis[i] = n_struct + a;
    }

    let mut pivots = 0;
    if n_art > 0 {
        let mut phase1 = vec![0.0; width];
        phase1[n_struct..].iter_mut().for_each(|v| *v = 1.0);
        tab.set_objective(&phase1);
        // the phase-one objective is a sum of nonnegative artificials
        tab.optimize(width, true, &mut pivots)?;
        let scale = 1.0 + tab.rows.iter().map(|r| r[width].abs()).fold(0.0, f64::max);
        let residual = -tab.obj[width];
        if residual > FEASIBILITY_TOLERANCE * scale {
            return Ok(LpOutcome::Infeasible);
        }
        // drive remaining artificials out, dropping redundant rows
        let mut i = 0;
        while i < tab.rows.len() {
            if tab.basis[i] >= n_struct {
                let col = (0..n_struct).find(|&j| tab.rows[i][j].abs() > PIVOT_TOLERANCE * 1e3);
                match col {
                    Some(j) => tab.pivot(i, j),
                    None => {
                        tab.rows.remove(i);
                        tab.basis.remove(i);
                        continue;
                    }
                }
            }
            i += 1;
        }
    }

    let mut cost = lp.cost.clone();
    cost.resize(n_struct, 0.0);
    tab.set_objective(&cost);
    if !tab.optimize(n_struct, false, &mut pivots)? {
        return Err(Error::LpFailure("objective unbounded below".into()));
    }
    let mut x = vec![0.0; nvars];
    for (i, &b) in tab.basis.iter().enumerate() {
        if b < nvars {
            x[b] = tab.rhs(i).max(0.0);
        }
    }
    let objective = lp.cost.iter().zip(&x).map(|(c, v)| c * v).sum();
    Ok(LpOutcome::Optimal { x, objective })
}
