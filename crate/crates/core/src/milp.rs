//! The configuration MILP: build, verify, and solve by depth-first
//! branch-and-bound over exact LP relaxations.

use alloc::collections::BTreeMap;
use alloc::format;
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;
use core::fmt::Write;

use num_traits::{Signed, Zero};

use crate::budget::Budget;
use crate::containers::{container_windows, LoadClass, Pool};
use crate::error::{Result, StsError};
use crate::lp::{solve_lp_with_budget, LinearProgram, LpOutcome, Sense};
use crate::model::{ClassifiedInstance, JobClass};
use crate::rational::{floor_int, format_rational, from_usize, int, is_integral, one, zero, Rational};
use crate::schedule::{Verdict, Violation};

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct MilpSolution {
    pub v: Vec<u64>,
    pub w: Vec<u64>,
    /// `(configuration, container) -> count`.
    pub z: BTreeMap<(usize, usize), u64>,
    /// `(medium job, configuration) -> fraction`.
    pub x: BTreeMap<(usize, usize), Rational>,
    /// `(tiny job, container, block) -> fraction`.
    pub y: BTreeMap<(usize, usize, usize), Rational>,
}

impl MilpSolution {
    pub fn zeros(configurations: usize, containers: usize) -> Self {
        MilpSolution { v: vec![0; configurations], w: vec![0; containers], ..Default::default() }
    }
}

#[derive(Debug, Clone)]
pub struct MilpModel {
    pub lp: LinearProgram,
    pub v: Vec<usize>,
    pub w: Vec<usize>,
    pub z: BTreeMap<(usize, usize), usize>,
    pub x: BTreeMap<(usize, usize), usize>,
    pub y: BTreeMap<(usize, usize, usize), usize>,
}

impl MilpModel {
    pub fn integral_vars(&self) -> Vec<usize> {
        let mut out: Vec<usize> = self.v.iter().chain(&self.w).copied().collect();
        out.extend(self.z.values().copied());
        out
    }

    /// Reads a solution back from an LP vector.
    pub fn decode(&self, x: &[Rational]) -> Result<MilpSolution> {
        let as_u64 = |r: &Rational| -> Result<u64> {
            if !is_integral(r) || r.is_negative() {
                return Err(StsError::Internal(format!("non-integral value {r}")));
            }
            u64::try_from(floor_int(r)).map_err(|_| StsError::Internal("value out of range".into()))
        };
        let mut sol = MilpSolution::zeros(self.v.len(), self.w.len());
        for (i, &j) in self.v.iter().enumerate() {
            sol.v[i] = as_u64(&x[j])?;
        }
        for (i, &j) in self.w.iter().enumerate() {
            sol.w[i] = as_u64(&x[j])?;
        }
        for (&k, &j) in &self.z {
            let val = as_u64(&x[j])?;
            if val > 0 {
                sol.z.insert(k, val);
            }
        }
        for (&k, &j) in &self.x {
            if !x[j].is_zero() {
                sol.x.insert(k, x[j].clone());
            }
        }
        for (&k, &j) in &self.y {
            if !x[j].is_zero() {
                sol.y.insert(k, x[j].clone());
            }
        }
        Ok(sol)
    }

    /// The LP vector of a solution; `Err(tag)` if it uses a variable the
    /// model does not have.
    pub fn encode(&self, sol: &MilpSolution) -> core::result::Result<Vec<Rational>, String> {
        let mut x = vec![zero(); self.lp.num_vars()];
        if sol.v.len() != self.v.len() || sol.w.len() != self.w.len() {
            return Err("support(dimensions)".into());
        }
        for (i, &j) in self.v.iter().enumerate() {
            x[j] = int(sol.v[i] as i64);
        }
        for (i, &j) in self.w.iter().enumerate() {
            x[j] = int(sol.w[i] as i64);
        }
        for (k, &val) in &sol.z {
            match self.z.get(k) {
                Some(&j) => x[j] = int(val as i64),
                None if val == 0 => {}
                None => return Err(format!("support(z[{},{}])", k.0, k.1)),
            }
        }
        for (k, val) in &sol.x {
            match self.x.get(k) {
                Some(&j) => x[j] = val.clone(),
                None if val.is_zero() => {}
                None => return Err(format!("support(x[{},{}])", k.0, k.1)),
            }
        }
        for (k, val) in &sol.y {
            match self.y.get(k) {
                Some(&j) => x[j] = val.clone(),
                None if val.is_zero() => {}
                None => return Err(format!("support(y[{},{},{}])", k.0, k.1, k.2)),
            }
        }
        Ok(x)
    }
}

pub fn build_milp(ci: &ClassifiedInstance, pool: &Pool) -> MilpModel {
    let eps = pool.eps;
    let e2 = eps.sq();
    let unit = &e2 * &pool.c_nice;
    let n = ci.n();
    let m = ci.rounded.base.machines;
    let b = ci.rounded.base.burst_limit;
    let mut lp = LinearProgram::new();
    // at most one container per job, or one per machine when empty ones count
    let cap = n.max(m);
    let nn = Some(from_usize(cap));

    let v: Vec<usize> =
        (0..pool.configurations.len()).map(|c| lp.add_var(format!("v[{c}]"), zero(), Some(from_usize(m)))).collect();
    let w: Vec<usize> = (0..pool.containers.len()).map(|t| lp.add_var(format!("w[{t}]"), zero(), nn.clone())).collect();
    let class_of: Vec<Option<usize>> = (0..pool.containers.len()).map(|t| pool.long_class_of(t)).collect();

    let mut z = BTreeMap::new();
    for (c, cfg) in pool.configurations.iter().enumerate() {
        for t in 0..pool.containers.len() {
            let fits = match class_of[t] {
                Some(l) => cfg.alpha[l] > 0,
                None => cfg.beta_prime,
            };
            if fits {
                z.insert((c, t), lp.add_var(format!("z[{c},{t}]"), zero(), nn.clone()));
            }
        }
    }
    let medium = ci.jobs_of(JobClass::Medium);
    let mut x = BTreeMap::new();
    for &j in &medium {
        for (c, cfg) in pool.configurations.iter().enumerate() {
            if cfg.delta_prime {
                x.insert((j, c), lp.add_var(format!("x[{j},{c}]"), zero(), Some(one())));
            }
        }
    }
    let tiny = ci.jobs_of(JobClass::Tiny);
    let mut y = BTreeMap::new();
    for &j in &tiny {
        for (t, cont) in pool.containers.iter().enumerate() {
            for (k, blk) in cont.blocks.iter().enumerate() {
                if blk.t_prime {
                    y.insert((j, t, k), lp.add_var(format!("y[{j},{t},{k}]"), zero(), Some(one())));
                }
            }
        }
    }

    // tiny jobs
    for &j in &tiny {
        let row: Vec<_> = y.range((j, 0, 0)..(j + 1, 0, 0)).map(|(_, &i)| (i, one())).collect();
        lp.add_row(format!("tiny_assigned[{j}]"), row, Sense::Eq, one());
    }
    if !tiny.is_empty() {
        for (t, cont) in pool.containers.iter().enumerate() {
            for (k, blk) in cont.blocks.iter().enumerate() {
                if !blk.t_prime {
                    continue;
                }
                let mut row: Vec<_> = tiny.iter().map(|&j| (y[&(j, t, k)], ci.size(j).clone())).collect();
                row.push((w[t], -(int(i64::from(blk.t) + 1) * &e2)));
                lp.add_row(format!("tiny_volume[{t},{k}]"), row, Sense::Le, zero());
            }
        }
    }
    // small jobs
    for (l, &count) in ci.small_counts().iter().enumerate() {
        let row: Vec<_> = pool
            .containers
            .iter()
            .enumerate()
            .filter_map(|(t, c)| {
                let s: u32 = c.blocks.iter().map(|b| b.s[l]).sum();
                (s > 0).then(|| (w[t], int(i64::from(s))))
            })
            .collect();
        lp.add_row(format!("small_slots[{l}]"), row, Sense::Eq, from_usize(count));
    }
    // medium jobs
    for &j in &medium {
        let row: Vec<_> = x.range((j, 0)..(j + 1, 0)).map(|(_, &i)| (i, one())).collect();
        lp.add_row(format!("medium_assigned[{j}]"), row, Sense::Eq, one());
    }
    if !medium.is_empty() {
        for (c, cfg) in pool.configurations.iter().enumerate() {
            if !cfg.delta_prime {
                continue;
            }
            let mut row: Vec<_> = medium.iter().map(|&j| (x[&(j, c)], ci.size(j).clone())).collect();
            row.push((v[c], -(int(i64::from(cfg.delta) + 1) * &unit)));
            lp.add_row(format!("medium_volume[{c}]"), row, Sense::Le, zero());
        }
    }
    // large jobs
    for (l, &count) in ci.large_counts().iter().enumerate() {
        let row: Vec<_> = pool
            .configurations
            .iter()
            .enumerate()
            .filter(|(_, c)| c.gamma[l] > 0)
            .map(|(c, cfg)| (v[c], int(i64::from(cfg.gamma[l]))))
            .collect();
        lp.add_row(format!("large_slots[{l}]"), row, Sense::Eq, from_usize(count));
    }
    // containers and configurations
    for t in 0..pool.containers.len() {
        let mut row: Vec<_> = z.iter().filter(|((_, tt), _)| *tt == t).map(|(_, &i)| (i, one())).collect();
        row.push((w[t], -one()));
        lp.add_row(format!("container_count[{t}]"), row, Sense::Eq, zero());
    }
    for (&(c, t), &i) in &z {
        lp.add_row(format!("config_link[{c},{t}]"), vec![(i, one()), (v[c], -from_usize(cap))], Sense::Le, zero());
    }
    for (c, cfg) in pool.configurations.iter().enumerate() {
        if !cfg.beta_prime {
            continue;
        }
        let mut row: Vec<_> = z
            .iter()
            .filter(|((cc, t), _)| *cc == c && pool.loads[*t].class == LoadClass::Short)
            .map(|(&(_, t), &i)| (i, pool.loads[t].load.clone()))
            .collect();
        row.push((v[c], -(int(i64::from(cfg.beta) + 1) * &unit)));
        lp.add_row(format!("short_volume[{c}]"), row, Sense::Le, zero());
    }
    for l in 0..pool.long_classes.len() {
        let mut row: Vec<_> = (0..pool.containers.len()).filter(|&t| class_of[t] == Some(l)).map(|t| (w[t], one())).collect();
        for (c, cfg) in pool.configurations.iter().enumerate() {
            if cfg.alpha[l] > 0 {
                row.push((v[c], -int(i64::from(cfg.alpha[l]))));
            }
        }
        lp.add_row(format!("long_slots[{l}]"), row, Sense::Eq, zero());
    }
    // windows
    for (t, cont) in pool.containers.iter().enumerate() {
        for (lo, hi) in container_windows(cont.blocks.len(), eps) {
            let fixed: i64 = cont.blocks[lo..hi].iter().map(|b| i64::from(b.small_count())).sum::<i64>()
                + i64::from(cont.blocks[lo].p)
                - b as i64;
            let ys: Vec<_> = (lo..hi)
                .filter(|&k| cont.blocks[k].t_prime)
                .flat_map(|k| tiny.iter().map(move |&j| (j, k)))
                .map(|(j, k)| (y[&(j, t, k)], one()))
                .collect();
            if ys.is_empty() && fixed <= 0 {
                continue;
            }
            let mut row = ys;
            row.push((w[t], int(fixed)));
            lp.add_row(format!("window[{t},{lo}]"), row, Sense::Le, zero());
        }
    }
    let row: Vec<_> = v.iter().map(|&i| (i, one())).collect();
    lp.add_row("machines", row, Sense::Eq, from_usize(m));

    MilpModel { lp, v, w, z, x, y }
}

pub fn verify_milp_solution(model: &MilpModel, sol: &MilpSolution) -> Verdict {
    match model.encode(sol) {
        Err(tag) => Verdict::fail(Violation::Row { tag }),
        Ok(x) => match model.lp.violated(&x) {
            Some(tag) => Verdict::fail(Violation::Row { tag }),
            None => Verdict::ok(),
        },
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum MilpOutcome {
    Feasible(MilpSolution),
    Infeasible,
}

/// Depth-first branch-and-bound; the first integral relaxation wins.
pub fn solve_milp(model: &MilpModel, budget: &impl Budget) -> Result<MilpOutcome> {
    let ints = model.integral_vars();
    // upper bounds implied by the equality rows (machines, assignments,
    // container counts) only enlarge the tableau
    let mut upper = model.lp.upper.clone();
    for &j in model.v.iter().chain(model.z.values()).chain(model.x.values()).chain(model.y.values()) {
        upper[j] = None;
    }
    let mut stack = vec![(model.lp.lower.clone(), upper)];
    let mut lp = model.lp.clone();
    while let Some((lower, upper)) = stack.pop() {
        if budget.exhausted() {
            return Err(StsError::BudgetExceeded);
        }
        lp.lower = lower;
        lp.upper = upper;
        let x = match solve_lp_with_budget(&lp, budget)? {
            LpOutcome::Optimal(x) => x,
            LpOutcome::Infeasible(_) => continue,
            LpOutcome::Unbounded => return Err(StsError::Internal("feasibility LP reported unbounded".into())),
        };
        let half = Rational::new(1.into(), 2.into());
        let mut pick: Option<(usize, Rational)> = None;
        for &j in &ints {
            if is_integral(&x[j]) {
                continue;
            }
            let frac = &x[j] - Rational::from_integer(floor_int(&x[j]));
            let dist = (&frac - &half).abs();
            if pick.as_ref().is_none_or(|(_, d)| &dist < d) {
                pick = Some((j, dist));
            }
        }
        let Some((j, _)) = pick else {
            let sol = model.decode(&x)?;
            debug_assert!(verify_milp_solution(model, &sol).ok);
            return Ok(MilpOutcome::Feasible(sol));
        };
        let fl = Rational::from_integer(floor_int(&x[j]));
        let ce = &fl + one();
        let mut down = (lp.lower.clone(), lp.upper.clone());
        down.1[j] = Some(fl.clone());
        let mut up = (lp.lower.clone(), lp.upper.clone());
        up.0[j] = ce;
        // explore the nearer side first
        if &x[j] - &fl < half {
            stack.push(up);
            stack.push(down);
        } else {
            stack.push(down);
            stack.push(up);
        }
    }
    Ok(MilpOutcome::Infeasible)
}

/// LP-format-like text of the model, with row tags.
pub fn dump_milp(model: &MilpModel) -> String {
    let lp = &model.lp;
    let mut out = String::from("minimize\n  0\nsubject to\n");
    let term = |out: &mut String, first: bool, a: &Rational, name: &str| {
        let sign = if a.is_negative() { "-" } else if first { "" } else { "+" };
        let mag = a.abs();
        if mag == one() {
            let _ = write!(out, " {sign} {name}");
        } else {
            let _ = write!(out, " {sign} {} {name}", format_rational(&mag));
        }
    };
    for r in &lp.rows {
        let _ = write!(out, "  {}:", r.tag);
        if r.coeffs.is_empty() {
            out.push_str(" 0");
        }
        for (i, (j, a)) in r.coeffs.iter().enumerate() {
            term(&mut out, i == 0, a, &lp.names[*j]);
        }
        let op = match r.sense {
            Sense::Le => "<=",
            Sense::Ge => ">=",
            Sense::Eq => "=",
        };
        let _ = writeln!(out, " {op} {}", format_rational(&r.rhs));
    }
    out.push_str("bounds\n");
    for j in 0..lp.num_vars() {
        match &lp.upper[j] {
            Some(u) => {
                let _ = writeln!(out, "  {} <= {} <= {}", format_rational(&lp.lower[j]), lp.names[j], format_rational(u));
            }
            None => {
                let _ = writeln!(out, "  {} >= {}", lp.names[j], format_rational(&lp.lower[j]));
            }
        }
    }
    out.push_str("general\n");
    for j in model.integral_vars() {
        let _ = writeln!(out, "  {}", lp.names[j]);
    }
    out.push_str("end\n");
    out
}
