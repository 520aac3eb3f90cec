//! Exact-rational linear programming: a dense two-phase simplex with
//! Bland's rule, so every answer is an exact basic (vertex) solution.

use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;

use num_traits::{Signed, Zero};

use crate::budget::Budget;
use crate::error::{Result, StsError};
use crate::rational::{one, zero, Rational};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Sense {
    Le,
    Ge,
    Eq,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Row {
    pub coeffs: Vec<(usize, Rational)>,
    pub sense: Sense,
    pub rhs: Rational,
    pub tag: String,
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct LinearProgram {
    pub lower: Vec<Rational>,
    pub upper: Vec<Option<Rational>>,
    pub names: Vec<String>,
    pub rows: Vec<Row>,
    /// Minimised when present.
    pub objective: Option<Vec<(usize, Rational)>>,
}

impl LinearProgram {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn num_vars(&self) -> usize {
        self.lower.len()
    }

    pub fn add_var(&mut self, name: impl Into<String>, lower: Rational, upper: Option<Rational>) -> usize {
        self.lower.push(lower);
        self.upper.push(upper);
        self.names.push(name.into());
        self.lower.len() - 1
    }

    pub fn add_row(&mut self, tag: impl Into<String>, coeffs: Vec<(usize, Rational)>, sense: Sense, rhs: Rational) {
        self.rows.push(Row { coeffs, sense, rhs, tag: tag.into() });
    }

    /// Checks every row and bound exactly; returns the first failing tag.
    pub fn violated(&self, x: &[Rational]) -> Option<String> {
        for (j, v) in x.iter().enumerate() {
            if v < &self.lower[j] || self.upper[j].as_ref().is_some_and(|u| v > u) {
                return Some(alloc::format!("bounds({})", self.names[j]));
            }
        }
        for r in &self.rows {
            let lhs: Rational = r.coeffs.iter().map(|(j, a)| a * &x[*j]).sum();
            let ok = match r.sense {
                Sense::Le => lhs <= r.rhs,
                Sense::Ge => lhs >= r.rhs,
                Sense::Eq => lhs == r.rhs,
            };
            if !ok {
                return Some(r.tag.clone());
            }
        }
        None
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum LpOutcome {
    Optimal(Vec<Rational>),
    /// Indices of constraint rows with a non-zero Farkas multiplier; indices
    /// `>= rows.len()` refer to upper bounds, `rows.len() + var`.
    Infeasible(Vec<usize>),
    Unbounded,
}

struct Tableau {
    /// rows × (cols + 1); last entry is the right-hand side.
    a: Vec<Vec<Rational>>,
    basis: Vec<usize>,
    cols: usize,
    /// Reduced costs of the current objective; last entry is minus its value.
    obj: Vec<Rational>,
}

/// Degenerate pivots tolerated under largest-coefficient pricing before
/// falling back to Bland's rule.
const DEGENERATE_STREAK: usize = 32;

impl Tableau {
    fn pivot(&mut self, r: usize, c: usize) {
        let p = self.a[r][c].clone();
        if p != one() {
            for v in self.a[r].iter_mut() {
                if !v.is_zero() {
                    *v /= &p;
                }
            }
        }
        let nz: Vec<usize> = (0..=self.cols).filter(|&j| !self.a[r][j].is_zero()).collect();
        let prow: Vec<Rational> = nz.iter().map(|&j| self.a[r][j].clone()).collect();
        let eliminate = |row: &mut Vec<Rational>| {
            if row[c].is_zero() {
                return;
            }
            let f = row[c].clone();
            for (k, &j) in nz.iter().enumerate() {
                let d = &f * &prow[k];
                row[j] -= d;
            }
        };
        for i in 0..self.a.len() {
            if i != r {
                eliminate(&mut self.a[i]);
            }
        }
        eliminate(&mut self.obj);
        self.basis[r] = c;
    }

    /// Reduced costs of `cost` against the current basis.
    fn reduced(&self, cost: &[Rational]) -> Vec<Rational> {
        let mut d: Vec<Rational> = cost.to_vec();
        d.push(zero());
        for (i, &bj) in self.basis.iter().enumerate() {
            let cb = &cost[bj];
            if cb.is_zero() {
                continue;
            }
            for j in 0..=self.cols {
                if !self.a[i][j].is_zero() {
                    let t = cb * &self.a[i][j];
                    d[j] -= t;
                }
            }
        }
        d
    }

    /// Minimises `cost`; `allowed[j]` gates entering columns. `Ok(false)` = unbounded.
    fn optimize(&mut self, cost: &[Rational], allowed: &[bool], budget: &impl Budget) -> Result<bool> {
        self.obj = self.reduced(cost);
        let mut streak = 0;
        loop {
            if budget.exhausted() {
                return Err(StsError::BudgetExceeded);
            }
            let improving = (0..self.cols).filter(|&j| allowed[j] && self.obj[j].is_negative());
            let entering = if streak < DEGENERATE_STREAK {
                improving.fold(None, |best: Option<usize>, j| match best {
                    Some(b) if self.obj[b] <= self.obj[j] => Some(b),
                    _ => Some(j),
                })
            } else {
                // Bland: lowest-index improving column
                improving.into_iter().next()
            };
            let Some(c) = entering else {
                return Ok(true);
            };
            let mut best: Option<(Rational, usize)> = None;
            for i in 0..self.a.len() {
                let v = &self.a[i][c];
                if v.is_positive() {
                    let ratio = &self.a[i][self.cols] / v;
                    let better = match &best {
                        None => true,
                        Some((br, bi)) => &ratio < br || (&ratio == br && self.basis[i] < self.basis[*bi]),
                    };
                    if better {
                        best = Some((ratio, i));
                    }
                }
            }
            match best {
                None => return Ok(false),
                Some((ratio, r)) => {
                    streak = if ratio.is_zero() { streak + 1 } else { 0 };
                    self.pivot(r, c)
                }
            }
        }
    }
}

pub fn solve_lp(lp: &LinearProgram) -> Result<LpOutcome> {
    solve_lp_with_budget(lp, &crate::budget::Unlimited)
}

pub fn solve_lp_with_budget(lp: &LinearProgram, budget: &impl Budget) -> Result<LpOutcome> {
    let n = lp.num_vars();
    // shift x = lower + x', turn upper bounds into rows
    let mut rows: Vec<(Vec<(usize, Rational)>, Sense, Rational, usize)> = Vec::new();
    for (ri, r) in lp.rows.iter().enumerate() {
        let shift: Rational = r.coeffs.iter().map(|(j, a)| a * &lp.lower[*j]).sum();
        rows.push((r.coeffs.clone(), r.sense, &r.rhs - shift, ri));
    }
    for j in 0..n {
        if let Some(u) = &lp.upper[j] {
            rows.push((vec![(j, one())], Sense::Le, u - &lp.lower[j], lp.rows.len() + j));
        }
    }
    for r in rows.iter_mut() {
        if r.2.is_negative() {
            for (_, a) in r.0.iter_mut() {
                *a = -a.clone();
            }
            r.2 = -r.2.clone();
            r.1 = match r.1 {
                Sense::Le => Sense::Ge,
                Sense::Ge => Sense::Le,
                Sense::Eq => Sense::Eq,
            };
        }
    }
    // columns: x' | slack/surplus per inequality | artificial per Ge/Eq row
    let n_slack = rows.iter().filter(|r| r.1 != Sense::Eq).count();
    let n_art = rows.iter().filter(|r| r.1 != Sense::Le).count();
    let cols = n + n_slack + n_art;
    let mut a = vec![vec![zero(); cols + 1]; rows.len()];
    let mut basis = vec![0; rows.len()];
    let mut ident = vec![0; rows.len()];
    let (mut s, mut t) = (n, n + n_slack);
    for (i, (coeffs, sense, rhs, _)) in rows.iter().enumerate() {
        for (j, v) in coeffs {
            a[i][*j] += v;
        }
        a[i][cols] = rhs.clone();
        match sense {
            Sense::Le => {
                a[i][s] = one();
                basis[i] = s;
                ident[i] = s;
                s += 1;
            }
            Sense::Ge => {
                a[i][s] = -one();
                s += 1;
                a[i][t] = one();
                basis[i] = t;
                ident[i] = t;
                t += 1;
            }
            Sense::Eq => {
                a[i][t] = one();
                basis[i] = t;
                ident[i] = t;
                t += 1;
            }
        }
    }
    let mut tab = Tableau { a, basis, cols, obj: Vec::new() };
    let is_art = |j: usize| j >= n + n_slack;

    if n_art > 0 {
        let cost1: Vec<Rational> = (0..cols).map(|j| if is_art(j) { one() } else { zero() }).collect();
        let allowed = vec![true; cols];
        tab.optimize(&cost1, &allowed, budget)?;
        let d = tab.reduced(&cost1);
        if d[cols].is_negative() {
            // d[cols] = -(phase-one optimum); y_i = c(ident_i) - d(ident_i)
            let mut cert: Vec<usize> = (0..rows.len())
                .filter(|&i| !(&cost1[ident[i]] - &d[ident[i]]).is_zero())
                .map(|i| rows[i].3)
                .collect();
            cert.sort_unstable();
            return Ok(LpOutcome::Infeasible(cert));
        }
        // drive zero-valued artificials out of the basis, dropping redundant rows
        let mut i = 0;
        while i < tab.a.len() {
            if is_art(tab.basis[i]) {
                match (0..n + n_slack).find(|&j| !tab.a[i][j].is_zero()) {
                    Some(c) => tab.pivot(i, c),
                    None => {
                        tab.a.remove(i);
                        tab.basis.remove(i);
                        continue;
                    }
                }
            }
            i += 1;
        }
    }
    let mut cost2 = vec![zero(); cols];
    if let Some(obj) = &lp.objective {
        for (j, c) in obj {
            cost2[*j] += c;
        }
    }
    let allowed: Vec<bool> = (0..cols).map(|j| !is_art(j)).collect();
    if !tab.optimize(&cost2, &allowed, budget)? {
        return Ok(LpOutcome::Unbounded);
    }
    let mut x: Vec<Rational> = lp.lower.clone();
    for (i, &bj) in tab.basis.iter().enumerate() {
        if bj < n {
            x[bj] += &tab.a[i][cols];
        }
    }
    Ok(LpOutcome::Optimal(x))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::{int, rat};

    #[test]
    fn single_equality() {
        let mut lp = LinearProgram::new();
        let x = lp.add_var("x", zero(), None);
        lp.add_row("fix", vec![(x, one())], Sense::Eq, one());
        assert_eq!(solve_lp(&lp).unwrap(), LpOutcome::Optimal(vec![one()]));
    }

    #[test]
    fn contradictory_bounds() {
        let mut lp = LinearProgram::new();
        let x = lp.add_var("x", zero(), None);
        lp.add_row("lo", vec![(x, one())], Sense::Ge, one());
        lp.add_row("hi", vec![(x, one())], Sense::Le, zero());
        match solve_lp(&lp).unwrap() {
            LpOutcome::Infeasible(rows) => assert_eq!(rows, vec![0, 1]),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn optimum_and_unbounded() {
        // min -x - y  s.t. x + 2y <= 4, 3x + y <= 6
        let mut lp = LinearProgram::new();
        let x = lp.add_var("x", zero(), None);
        let y = lp.add_var("y", zero(), None);
        lp.add_row("a", vec![(x, one()), (y, int(2))], Sense::Le, int(4));
        lp.add_row("b", vec![(x, int(3)), (y, one())], Sense::Le, int(6));
        lp.objective = Some(vec![(x, -one()), (y, -one())]);
        assert_eq!(solve_lp(&lp).unwrap(), LpOutcome::Optimal(vec![rat(8, 5), rat(6, 5)]));
        lp.rows.clear();
        lp.add_row("c", vec![(x, one()), (y, -one())], Sense::Le, one());
        lp.objective = Some(vec![(x, -one())]);
        assert_eq!(solve_lp(&lp).unwrap(), LpOutcome::Unbounded);
    }

    #[test]
    fn bounds_and_shifted_lower() {
        let mut lp = LinearProgram::new();
        let x = lp.add_var("x", int(2), Some(int(5)));
        let y = lp.add_var("y", -one(), Some(one()));
        lp.add_row("s", vec![(x, one()), (y, one())], Sense::Eq, int(3));
        lp.objective = Some(vec![(x, -one())]);
        let LpOutcome::Optimal(v) = solve_lp(&lp).unwrap() else { panic!() };
        assert_eq!(v, vec![int(4), -one()]);
        assert!(lp.violated(&v).is_none());
        lp.add_row("t", vec![(x, one())], Sense::Ge, int(6));
        let LpOutcome::Infeasible(cert) = solve_lp(&lp).unwrap() else { panic!() };
        assert!(cert.contains(&1));
        assert!(!cert.contains(&(lp.rows.len() + y)));
    }

    #[test]
    fn redundant_equalities() {
        let mut lp = LinearProgram::new();
        let x = lp.add_var("x", zero(), None);
        let y = lp.add_var("y", zero(), None);
        lp.add_row("a", vec![(x, one()), (y, one())], Sense::Eq, int(2));
        lp.add_row("b", vec![(x, int(2)), (y, int(2))], Sense::Eq, int(4));
        let LpOutcome::Optimal(v) = solve_lp(&lp).unwrap() else { panic!() };
        assert!(lp.violated(&v).is_none());
    }
}
