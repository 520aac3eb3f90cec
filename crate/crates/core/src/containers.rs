//! Containers (block-level encodings of tiny/small sub-schedules),
//! configurations (per-machine summaries), their pruned enumeration, and the
//! extraction of a MILP solution from a nice schedule.

use alloc::collections::{BTreeMap, BTreeSet};
use alloc::format;
use alloc::vec;
use alloc::vec::Vec;

use crate::error::{Result, StsError};
use crate::milp::MilpSolution;
use crate::model::{ClassifiedInstance, Eps, JobClass};
use crate::rational::{floor_i64, int, one, zero, Rational};
use crate::schedule::{check_nice, Schedule, ScheduledJob};

/// Sub-vector of one ε-block.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Block {
    /// Small jobs starting here, per entry of the small-size list.
    pub s: Vec<u32>,
    /// Tiny volume rounded down, in units of ε².
    pub t: u32,
    /// Some tiny job starts here.
    pub t_prime: bool,
    /// Idle rounded down, in units of ε².
    pub d: u32,
    /// A job from an earlier block is still running at the block start.
    pub p: bool,
}

impl Block {
    pub fn empty(sizes: usize) -> Self {
        Block { s: vec![0; sizes], t: 0, t_prime: false, d: 0, p: false }
    }

    pub fn small_count(&self) -> u32 {
        self.s.iter().sum()
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Container {
    pub blocks: Vec<Block>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum LoadClass {
    Short,
    Long,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ContainerLoad {
    pub load: Rational,
    /// Load rounded down to a power of `1+ε`.
    pub rounded: Rational,
    pub class: LoadClass,
}

/// `C_nice <= 1/ε`: each machine holds a single long container and nothing else.
pub fn single_container_regime(eps: Eps, c_nice: &Rational) -> bool {
    c_nice <= &int(i64::from(eps.inv()))
}

/// Builds the canonical partial schedule and checks that every job placed
/// for a block starts inside it and that a job running into a block is
/// declared by `P`.
pub fn container_feasible(t: &Container, eps: Eps, small_sizes: &[Rational]) -> bool {
    let e = eps.value();
    let e2 = eps.sq();
    let cap = eps.inv();
    let mut cur = zero();
    for (k, b) in t.blocks.iter().enumerate() {
        if b.s.len() != small_sizes.len() || b.t > cap || b.d > cap || (!b.t_prime && b.t > 0) {
            return false;
        }
        let start = int(k as i64) * &e;
        let end = &start + &e;
        if k == 0 && b.p {
            return false;
        }
        if cur > start && !b.p {
            return false;
        }
        let mut pos = if cur > start { cur.clone() } else { start.clone() };
        pos += int(i64::from(b.d)) * &e2;
        let mut placed = false;
        if b.t_prime {
            if pos >= end {
                return false;
            }
            pos += int(i64::from(b.t)) * &e2;
            placed = true;
        }
        for (l, &c) in small_sizes.iter().zip(&b.s) {
            for _ in 0..c {
                if pos >= end {
                    return false;
                }
                pos += l;
                placed = true;
            }
        }
        if placed {
            cur = pos;
        }
    }
    true
}

pub fn container_load(t: &Container, eps: Eps, small_sizes: &[Rational], c_nice: &Rational) -> ContainerLoad {
    let e2 = eps.sq();
    let mut load = one();
    for b in &t.blocks {
        load += int(i64::from(b.d + b.t)) * &e2;
        for (l, &c) in small_sizes.iter().zip(&b.s) {
            load += l * int(i64::from(c));
        }
    }
    let rounded = eps.floor_power(&load).1;
    let short = !single_container_regime(eps, c_nice) && load <= eps.value() * c_nice;
    ContainerLoad { load, rounded, class: if short { LoadClass::Short } else { LoadClass::Long } }
}

/// Blocks grouped by the `1'`-windows the MILP constrains: every run of
/// `1/ε + 1` consecutive blocks, or the whole container when it is shorter.
pub fn container_windows(blocks: usize, eps: Eps) -> Vec<(usize, usize)> {
    let span = eps.inv_usize() + 1;
    if blocks == 0 {
        Vec::new()
    } else if blocks <= span {
        vec![(0, blocks)]
    } else {
        (0..=blocks - span).map(|i| (i, i + span)).collect()
    }
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Configuration {
    /// Long containers per entry of the pool's long-load classes.
    pub alpha: Vec<u32>,
    pub beta: u32,
    pub beta_prime: bool,
    /// Large jobs per entry of the large-size list.
    pub gamma: Vec<u32>,
    pub delta: u32,
    pub delta_prime: bool,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Pool {
    pub eps: Eps,
    pub c_nice: Rational,
    pub small_sizes: Vec<Rational>,
    pub large_sizes: Vec<Rational>,
    pub containers: Vec<Container>,
    pub loads: Vec<ContainerLoad>,
    /// Distinct rounded loads of long containers, ascending.
    pub long_classes: Vec<Rational>,
    pub configurations: Vec<Configuration>,
}

impl Pool {
    pub fn regime(&self) -> bool {
        single_container_regime(self.eps, &self.c_nice)
    }

    pub fn long_class_of(&self, t: usize) -> Option<usize> {
        let l = &self.loads[t];
        match l.class {
            LoadClass::Long => self.long_classes.binary_search(&l.rounded).ok(),
            LoadClass::Short => None,
        }
    }

    pub fn config_load(&self, c: &Configuration) -> Rational {
        configuration_load(c, &self.long_classes, &self.large_sizes, self.eps, &self.c_nice)
    }

    pub fn config_feasible(&self, c: &Configuration) -> bool {
        configuration_feasible(c, &self.long_classes, &self.large_sizes, self.eps, &self.c_nice)
    }
}

pub fn configuration_load(
    c: &Configuration,
    long_classes: &[Rational],
    large_sizes: &[Rational],
    eps: Eps,
    c_nice: &Rational,
) -> Rational {
    let unit = eps.sq() * c_nice;
    let mut load = int(i64::from(c.beta + c.delta)) * &unit;
    for (l, &a) in long_classes.iter().zip(&c.alpha) {
        load += l * int(i64::from(a));
    }
    for (l, &g) in large_sizes.iter().zip(&c.gamma) {
        load += l * int(i64::from(g));
    }
    load
}

pub fn configuration_load_bound(eps: Eps, c_nice: &Rational) -> Rational {
    let a = eps.growth() * c_nice;
    let b = c_nice + one();
    if a > b {
        a
    } else {
        b
    }
}

pub fn configuration_feasible(
    c: &Configuration,
    long_classes: &[Rational],
    large_sizes: &[Rational],
    eps: Eps,
    c_nice: &Rational,
) -> bool {
    if c.alpha.len() != long_classes.len() || c.gamma.len() != large_sizes.len() {
        return false;
    }
    if (!c.beta_prime && c.beta > 0) || (!c.delta_prime && c.delta > 0) {
        return false;
    }
    if single_container_regime(eps, c_nice) {
        let singles = c.alpha.iter().sum::<u32>() == 1;
        let rest = c.beta == 0 && !c.beta_prime && c.delta == 0 && !c.delta_prime && c.gamma.iter().all(|&g| g == 0);
        if !(singles && rest) {
            return false;
        }
    }
    configuration_load(c, long_classes, large_sizes, eps, c_nice) <= configuration_load_bound(eps, c_nice)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct EnumCaps {
    /// Containers emitted before deduplication.
    pub max_containers: usize,
    pub max_configurations: usize,
    /// Search nodes across one enumeration.
    pub max_nodes: usize,
}

impl Default for EnumCaps {
    fn default() -> Self {
        EnumCaps { max_containers: 20_000, max_configurations: 20_000, max_nodes: 2_000_000 }
    }
}

struct Enumerator<'a> {
    eps: Eps,
    e: Rational,
    e2: Rational,
    sizes: &'a [Rational],
    b: u32,
    /// Mark every block a job can still start in with `T' = 1, T = 0`.
    tiny: bool,
    load_cap: Rational,
    max_blocks: usize,
    regime: bool,
    caps: EnumCaps,
    nodes: usize,
    out: Vec<(Container, Rational)>,
    memo: BTreeMap<MemoKey, Rational>,
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
struct MemoKey {
    k: usize,
    rem: Vec<u32>,
    overflow: Rational,
    recent: Vec<(u32, bool)>,
    empty_run: usize,
}

struct Prefix {
    blocks: Vec<Block>,
    rem: Vec<u32>,
    cur: Rational,
    load: Rational,
    empty_run: usize,
}

impl<'a> Enumerator<'a> {
    /// Small starters plus the crossing bit of the newest complete window.
    fn window_ok(&self, blocks: &[Block]) -> bool {
        let n = blocks.len();
        let span = self.eps.inv_usize() + 1;
        if n <= span {
            return blocks.iter().map(Block::small_count).sum::<u32>() <= self.b;
        }
        let i = n - span;
        blocks[i..].iter().map(Block::small_count).sum::<u32>() + u32::from(blocks[i].p) <= self.b
    }

    fn run(&mut self, pre: &mut Prefix) -> Result<()> {
        self.nodes += 1;
        if self.nodes > self.caps.max_nodes || self.out.len() > self.caps.max_containers {
            return Err(StsError::ContainerExplosion);
        }
        let k = pre.blocks.len();
        if k >= self.max_blocks {
            return Ok(());
        }
        let start = int(k as i64) * &self.e;
        let end = &start + &self.e;
        let p = pre.cur > start;
        let base = if p { pre.cur.clone() } else { start.clone() };
        let tp = self.tiny && base < end;
        let mut s = vec![0u32; self.sizes.len()];
        let ctx = BlockCtx { k, p, tp, start, end };
        self.smalls(pre, &ctx, base, 0, &mut s)
    }

    fn smalls(&mut self, pre: &mut Prefix, ctx: &BlockCtx, pos: Rational, li: usize, s: &mut Vec<u32>) -> Result<()> {
        if li == self.sizes.len() {
            return self.close_block(pre, ctx, pos, s);
        }
        let mut pos = pos;
        let mut added = 0;
        loop {
            self.smalls(pre, ctx, pos.clone(), li + 1, s)?;
            if added >= pre.rem[li] || pos >= ctx.end {
                break;
            }
            pos += &self.sizes[li];
            s[li] += 1;
            added += 1;
        }
        s[li] -= added;
        Ok(())
    }

    fn close_block(&mut self, pre: &mut Prefix, ctx: &BlockCtx, pos: Rational, s: &[u32]) -> Result<()> {
        let smalls = s.iter().sum::<u32>();
        if ctx.k == 0 && smalls == 0 && !ctx.tp {
            return Ok(());
        }
        let starters = smalls + u32::from(ctx.tp);
        let empty_run = if starters == 0 && !ctx.p { pre.empty_run + 1 } else { 0 };
        if !self.regime && empty_run >= self.eps.inv_usize() {
            return Ok(());
        }
        let new_cur = if starters > 0 { pos } else { pre.cur.clone() };
        // idle left in the block, charged as D
        let busy_to = if new_cur > ctx.start { new_cur.clone() } else { ctx.start.clone() };
        let mut d = if busy_to < ctx.end { floor_i64(&((&ctx.end - &busy_to) / &self.e2)) as u32 } else { 0 };
        // the idle goes first in the layout; the tiny slot must stay inside the block
        if ctx.tp && smalls == 0 && d > 0 && busy_to + int(i64::from(d)) * &self.e2 >= ctx.end {
            d -= 1;
        }
        let small_load: Rational = self.sizes.iter().zip(s).map(|(l, &c)| l * int(i64::from(c))).sum();
        let load = &pre.load + int(i64::from(d)) * &self.e2 + small_load;
        if &load + one() > self.load_cap {
            return Ok(());
        }
        for (r, &c) in pre.rem.iter_mut().zip(s) {
            *r -= c;
        }
        pre.blocks.push(Block { s: s.to_vec(), t: 0, t_prime: ctx.tp, d, p: ctx.p });
        let saved_cur = core::mem::replace(&mut pre.cur, new_cur);
        let saved_load = core::mem::replace(&mut pre.load, load);
        let saved_run = core::mem::replace(&mut pre.empty_run, empty_run);

        let result = self.after_block(pre, starters > 0 || ctx.p, &ctx.end);

        pre.blocks.pop();
        for (r, &c) in pre.rem.iter_mut().zip(s) {
            *r += c;
        }
        pre.cur = saved_cur;
        pre.load = saved_load;
        pre.empty_run = saved_run;
        result
    }

    fn after_block(&mut self, pre: &mut Prefix, has_content: bool, end: &Rational) -> Result<()> {
        if !self.window_ok(&pre.blocks) {
            return Ok(());
        }
        if self.regime {
            // prefixes that agree on everything the suffix can see: keep the lightest
            let from = pre.blocks.len().saturating_sub(self.eps.inv_usize());
            let key = MemoKey {
                k: pre.blocks.len(),
                rem: pre.rem.clone(),
                overflow: if &pre.cur > end { &pre.cur - end } else { zero() },
                recent: pre.blocks[from..].iter().map(|b| (b.small_count(), b.p)).collect(),
                empty_run: pre.empty_run,
            };
            match self.memo.get(&key) {
                Some(best) if best <= &pre.load => return Ok(()),
                _ => {
                    self.memo.insert(key, pre.load.clone());
                }
            }
        }
        if has_content && &pre.cur <= end {
            let mut blocks = pre.blocks.clone();
            let mut load = pre.load.clone() + one();
            // the last block's trailing idle belongs to the unit gap
            if let Some(last) = blocks.last_mut() {
                load -= int(i64::from(last.d)) * &self.e2;
                last.d = 0;
            }
            self.out.push((Container { blocks }, load));
        }
        self.run(pre)
    }
}

struct BlockCtx {
    k: usize,
    p: bool,
    tp: bool,
    start: Rational,
    end: Rational,
}

/// Canonical containers for the instance. Small jobs start as early as the
/// block allows; idle left in a block is charged as `D`. Tiny jobs are not
/// placed here: every block a job can start in gets `T' = 1, T = 0` and the
/// MILP distributes them.
pub fn enumerate_containers(ci: &ClassifiedInstance, c_nice: &Rational, caps: EnumCaps) -> Result<Vec<Container>> {
    let eps = ci.eps;
    if caps.max_containers == 0 || caps.max_nodes == 0 {
        return Err(StsError::ContainerExplosion);
    }
    let regime = single_container_regime(eps, c_nice);
    let tiny = !ci.jobs_of(JobClass::Tiny).is_empty();
    let mut load_cap = c_nice + one();
    if !regime {
        let c = int(2 * i64::from(eps.inv())) + one();
        if c < load_cap {
            load_cap = c;
        }
    }
    let q = eps.inv_usize();
    let mut en = Enumerator {
        eps,
        e: eps.value(),
        e2: eps.sq(),
        sizes: &ci.small_sizes,
        b: ci.rounded.base.burst_limit as u32,
        tiny,
        load_cap,
        max_blocks: q * q,
        regime,
        caps,
        nodes: 0,
        out: vec![(Container::default(), one())],
        memo: BTreeMap::new(),
    };
    let mut pre = Prefix {
        blocks: Vec::new(),
        rem: ci.small_counts().iter().map(|&c| c as u32).collect(),
        cur: zero(),
        load: zero(),
        empty_run: 0,
    };
    en.run(&mut pre)?;
    let mut found = en.out;
    if tiny && regime {
        // one container per machine and load only capped: per small-job
        // totals keep the one with the most room for tiny jobs
        let b = ci.rounded.base.burst_limit as u32;
        let mut best: BTreeMap<Vec<u32>, (u32, Rational, Container)> = BTreeMap::new();
        for (c, load) in found {
            let totals = small_totals(&c, ci.small_sizes.len());
            let slots = tiny_slots(&c, eps, b);
            let better = match best.get(&totals) {
                None => true,
                Some((s0, l0, c0)) => slots > *s0 || (slots == *s0 && (load < *l0 || (&load == l0 && &c < c0))),
            };
            if better {
                best.insert(totals, (slots, load, c));
            }
        }
        found = best.into_values().map(|(_, l, c)| (c, l)).collect();
    } else if !tiny {
        // without tiny jobs a container matters only through its small-job
        // totals, its class and its load; keep the lightest per signature
        let mut best: BTreeMap<(Vec<u32>, LoadClass), (Rational, Container)> = BTreeMap::new();
        for (c, load) in found {
            let totals = small_totals(&c, ci.small_sizes.len());
            let class = container_load(&c, eps, &ci.small_sizes, c_nice).class;
            let entry = best.entry((totals, class)).or_insert_with(|| (load.clone(), c.clone()));
            if load < entry.0 || (load == entry.0 && c < entry.1) {
                *entry = (load, c);
            }
        }
        found = best.into_values().map(|(l, c)| (c, l)).collect();
    }
    let mut out: Vec<Container> = found.into_iter().map(|(c, _)| c).collect::<BTreeSet<_>>().into_iter().collect();
    if tiny {
        out = drop_shorter_tails(out);
    }
    if regime {
        out = drop_uncoverable(out, &ci.small_counts(), ci.rounded.base.machines);
    }
    debug_assert!(out.iter().all(|c| container_feasible(c, eps, &ci.small_sizes)));
    Ok(out)
}

/// Most `T'` blocks that can each take one tiny job while every window keeps
/// within `B` (small starters and the crossing bit count against it).
/// Greedy from the left is optimal for equal-length sliding windows.
pub fn tiny_slots(c: &Container, eps: Eps, b: u32) -> u32 {
    let windows = container_windows(c.blocks.len(), eps);
    let mut left: Vec<i64> = windows
        .iter()
        .map(|&(lo, hi)| {
            i64::from(b) - c.blocks[lo..hi].iter().map(|x| i64::from(x.small_count())).sum::<i64>() - i64::from(c.blocks[lo].p)
        })
        .collect();
    let mut taken = 0;
    for (k, blk) in c.blocks.iter().enumerate() {
        if !blk.t_prime {
            continue;
        }
        let inside: Vec<usize> = (0..windows.len()).filter(|&w| windows[w].0 <= k && k < windows[w].1).collect();
        if inside.iter().all(|&w| left[w] > 0) {
            for w in inside {
                left[w] -= 1;
            }
            taken += 1;
        }
    }
    taken
}

/// Drops containers that are a prefix of another one whose extra blocks
/// start no small job: the longer one offers the same small slots and more
/// room for tiny jobs.
fn drop_shorter_tails(all: Vec<Container>) -> Vec<Container> {
    let mut dominated = BTreeSet::new();
    for c in &all {
        let n = c.blocks.len();
        let mut l = n;
        while l > 1 && c.blocks[l - 1].small_count() == 0 {
            l -= 1;
            let mut blocks = c.blocks[..l].to_vec();
            blocks[l - 1].d = 0;
            dominated.insert(Container { blocks });
        }
    }
    all.into_iter().filter(|c| !dominated.contains(c)).collect()
}

/// With one container per machine, keeps only containers whose small-job
/// totals can be completed to the instance's counts by `machines - 1` others.
fn drop_uncoverable(all: Vec<Container>, counts: &[usize], machines: usize) -> Vec<Container> {
    let sizes = counts.len();
    let totals: Vec<Vec<u32>> = all.iter().map(|c| small_totals(c, sizes)).collect();
    let distinct: BTreeSet<Vec<u32>> = totals.iter().cloned().collect();
    let fits = |v: &[u32]| v.iter().zip(counts).all(|(&a, &c)| a as usize <= c);
    // sums of at most r containers, r = machines - 1 (the empty container is in the pool)
    let mut reach: BTreeSet<Vec<u32>> = BTreeSet::new();
    reach.insert(vec![0; sizes]);
    for _ in 1..machines {
        let mut next = reach.clone();
        for r in &reach {
            for t in &distinct {
                let sum: Vec<u32> = r.iter().zip(t).map(|(a, b)| a + b).collect();
                if fits(&sum) {
                    next.insert(sum);
                }
            }
        }
        if next.len() == reach.len() {
            break;
        }
        reach = next;
    }
    all.into_iter()
        .zip(totals)
        .filter(|(_, t)| {
            fits(t) && {
                let rest: Vec<u32> = counts.iter().zip(t).map(|(&c, &a)| c as u32 - a).collect();
                reach.contains(&rest)
            }
        })
        .map(|(c, _)| c)
        .collect()
}

/// All feasible configurations over the long-load classes of `containers`.
pub fn enumerate_configurations(
    ci: &ClassifiedInstance,
    containers: &[Container],
    c_nice: &Rational,
    caps: EnumCaps,
) -> Result<(Vec<Rational>, Vec<Configuration>)> {
    let eps = ci.eps;
    let loads: Vec<ContainerLoad> =
        containers.iter().map(|c| container_load(c, eps, &ci.small_sizes, c_nice)).collect();
    let classes: Vec<Rational> = loads
        .iter()
        .filter(|l| l.class == LoadClass::Long)
        .map(|l| l.rounded.clone())
        .collect::<BTreeSet<_>>()
        .into_iter()
        .collect();
    let bound = configuration_load_bound(eps, c_nice);
    let nl = ci.large_sizes.len();
    let mut out = Vec::new();
    if single_container_regime(eps, c_nice) {
        for i in 0..classes.len() {
            let mut alpha = vec![0; classes.len()];
            alpha[i] = 1;
            let c = Configuration { alpha, beta: 0, beta_prime: false, gamma: vec![0; nl], delta: 0, delta_prime: false };
            if configuration_feasible(&c, &classes, &ci.large_sizes, eps, c_nice) {
                out.push(c);
            }
        }
        return Ok((classes, out));
    }
    let unit = eps.sq() * c_nice;
    let has_short = loads.iter().any(|l| l.class == LoadClass::Short);
    let has_medium = !ci.jobs_of(JobClass::Medium).is_empty();
    let large_counts = ci.large_counts();
    // items: long classes, then large sizes; each with its per-item cap
    let mut items: Vec<(Rational, u32)> = classes.iter().map(|l| (l.clone(), u32::MAX)).collect();
    items.extend(ci.large_sizes.iter().cloned().zip(large_counts.iter().map(|&c| c as u32)));
    let mut counts = vec![0u32; items.len()];
    fn rec(
        i: usize,
        used: Rational,
        items: &[(Rational, u32)],
        counts: &mut Vec<u32>,
        bound: &Rational,
        emit: &mut dyn FnMut(&[u32], &Rational) -> Result<()>,
    ) -> Result<()> {
        if i == items.len() {
            return emit(counts, &used);
        }
        let mut used = used;
        loop {
            rec(i + 1, used.clone(), items, counts, bound, emit)?;
            used += &items[i].0;
            if counts[i] >= items[i].1 || &used > bound {
                break;
            }
            counts[i] += 1;
        }
        counts[i] = 0;
        Ok(())
    }
    let nc = classes.len();
    let mut emit = |counts: &[u32], used: &Rational| -> Result<()> {
        // a larger beta or delta only loosens the volume rows, so only the
        // maximal splits of the remaining room are kept
        let room = floor_i64(&((&bound - used) / &unit)).max(0) as u32;
        let mut splits = vec![(false, 0, false, 0)];
        if has_short {
            splits.push((true, room, false, 0));
        }
        if has_medium {
            splits.push((false, 0, true, room));
        }
        if has_short && has_medium {
            splits.extend((0..=room).map(|b| (true, b, true, room - b)));
        }
        for &(bp, beta, dp, delta) in &splits {
            {
                out.push(Configuration {
                    alpha: counts[..nc].to_vec(),
                    beta,
                    beta_prime: bp,
                    gamma: counts[nc..].to_vec(),
                    delta,
                    delta_prime: dp,
                });
                if out.len() > caps.max_configurations {
                    return Err(StsError::ContainerExplosion);
                }
            }
        }
        Ok(())
    };
    rec(0, zero(), &items, &mut counts, &bound, &mut emit)?;
    debug_assert!(out.iter().all(|c| configuration_feasible(c, &classes, &ci.large_sizes, eps, c_nice)));
    Ok((classes, out))
}

pub fn build_pool(ci: &ClassifiedInstance, c_nice: &Rational, caps: EnumCaps) -> Result<Pool> {
    let containers = enumerate_containers(ci, c_nice, caps)?;
    let (long_classes, configurations) = enumerate_configurations(ci, &containers, c_nice, caps)?;
    let loads = containers.iter().map(|c| container_load(c, ci.eps, &ci.small_sizes, c_nice)).collect();
    Ok(Pool {
        eps: ci.eps,
        c_nice: c_nice.clone(),
        small_sizes: ci.small_sizes.clone(),
        large_sizes: ci.large_sizes.clone(),
        containers,
        loads,
        long_classes,
        configurations,
    })
}

/// One container cut from a schedule: its encoding, the absolute block index
/// of its block 0 and the tiny jobs per block.
struct Cut {
    container: Container,
    tiny_at: Vec<(usize, usize)>,
}

fn cut_container(jobs: &[ScheduledJob], ci: &ClassifiedInstance, eps: Eps) -> Result<Cut> {
    let e = eps.value();
    let e2 = eps.sq();
    let first = floor_i64(&(&jobs[0].start / &e));
    let content_end = jobs.iter().map(ScheduledJob::end).max().unwrap();
    let last = crate::rational::ceil_i64(&(&content_end / &e)) - 1;
    let max_blocks = (eps.inv_usize() * eps.inv_usize()) as i64;
    if jobs.iter().any(|j| floor_i64(&(&j.start / &e)) - first >= max_blocks) {
        return Err(StsError::NotNice(format!("a container spans more than {max_blocks} blocks")));
    }
    let nblocks = (last - first + 1).min(max_blocks) as usize;
    let mut blocks = Vec::with_capacity(nblocks);
    let mut tiny_at = Vec::new();
    for kk in 0..nblocks {
        let k = first + kk as i64;
        let start = int(k) * &e;
        let end = &start + &e;
        let limit = if end < content_end { end.clone() } else { content_end.clone() };
        let mut b = Block::empty(ci.small_sizes.len());
        let mut busy = zero();
        let mut tiny_vol = zero();
        for j in jobs {
            let je = j.end();
            if j.start >= start && j.start < end {
                match ci.class_of[j.job] {
                    JobClass::Tiny => {
                        b.t_prime = true;
                        tiny_vol += &j.size;
                        tiny_at.push((j.job, kk));
                    }
                    JobClass::Small => {
                        let l = ci.small_index(&j.size).expect("small size listed");
                        b.s[l] += 1;
                    }
                    _ => return Err(StsError::NotNice("medium or large job inside a container".into())),
                }
            } else if j.start < start && je > start {
                b.p = true;
            }
            let lo = if j.start > start { j.start.clone() } else { start.clone() };
            let hi = if je < limit { je } else { limit.clone() };
            if hi > lo {
                busy += hi - lo;
            }
        }
        let span = &limit - &start;
        let idle = if span > busy { span - busy } else { zero() };
        b.d = floor_i64(&(idle / &e2)) as u32;
        b.t = floor_i64(&(tiny_vol / &e2)) as u32;
        blocks.push(b);
    }
    Ok(Cut { container: Container { blocks }, tiny_at })
}

/// Encodes a nice schedule with makespan at most `c_nice` as a MILP solution
/// over a pool made of exactly the containers and configurations it uses.
pub fn extract_milp_solution(nice: &Schedule, ci: &ClassifiedInstance, c_nice: &Rational) -> Result<(Pool, MilpSolution)> {
    let eps = ci.eps;
    let b = ci.rounded.base.burst_limit;
    let v = check_nice(nice, ci, eps, b)?;
    if !v.ok {
        return Err(StsError::NotNice(format!("{:?}", v.witness)));
    }
    if &nice.makespan() > c_nice {
        return Err(StsError::Precondition("makespan exceeds the guess".into()));
    }
    let regime = single_container_regime(eps, c_nice);
    let machines = ci.rounded.base.machines;
    let unit = eps.sq() * c_nice;

    // per machine: container cuts, medium jobs, large jobs
    let mut per_machine: Vec<(Vec<Cut>, Vec<usize>, Vec<usize>)> = Vec::new();
    for m in 0..machines {
        let jobs = nice.machine_jobs(m);
        let (short_jobs, big): (Vec<_>, Vec<_>) =
            jobs.into_iter().partition(|j| matches!(ci.class_of[j.job], JobClass::Tiny | JobClass::Small));
        let mut groups: Vec<Vec<ScheduledJob>> = Vec::new();
        for j in short_jobs {
            let split = match groups.last().and_then(|g| g.last()) {
                Some(prev) => !regime && &j.start - prev.end() >= one(),
                None => true,
            };
            if split {
                groups.push(Vec::new());
            }
            groups.last_mut().unwrap().push(j);
        }
        let mut cuts = Vec::new();
        for g in &groups {
            cuts.push(cut_container(g, ci, eps)?);
        }
        if regime && cuts.is_empty() {
            cuts.push(Cut { container: Container::default(), tiny_at: Vec::new() });
        }
        let medium = big.iter().filter(|j| ci.class_of[j.job] == JobClass::Medium).map(|j| j.job).collect();
        let large = big.iter().filter(|j| ci.class_of[j.job] == JobClass::Large).map(|j| j.job).collect();
        per_machine.push((cuts, medium, large));
    }

    let containers: Vec<Container> = per_machine
        .iter()
        .flat_map(|(cuts, _, _)| cuts.iter().map(|c| c.container.clone()))
        .collect::<BTreeSet<_>>()
        .into_iter()
        .collect();
    let loads: Vec<ContainerLoad> =
        containers.iter().map(|c| container_load(c, eps, &ci.small_sizes, c_nice)).collect();
    for (c, l) in containers.iter().zip(&loads) {
        if !container_feasible(c, eps, &ci.small_sizes) {
            return Err(StsError::Internal(format!("extracted container is infeasible: {c:?}")));
        }
        if regime && l.load > c_nice + one() {
            return Err(StsError::Internal("extracted container exceeds C_nice + 1".into()));
        }
    }
    let long_classes: Vec<Rational> = loads
        .iter()
        .filter(|l| l.class == LoadClass::Long)
        .map(|l| l.rounded.clone())
        .collect::<BTreeSet<_>>()
        .into_iter()
        .collect();
    let index_of = |c: &Container| containers.binary_search(c).expect("container listed");

    let mut machine_cfg = Vec::new();
    for (cuts, medium, large) in &per_machine {
        let mut alpha = vec![0u32; long_classes.len()];
        let mut short_load = zero();
        let mut any_short = false;
        for cut in cuts {
            let t = index_of(&cut.container);
            match loads[t].class {
                LoadClass::Long => {
                    let i = long_classes.binary_search(&loads[t].rounded).unwrap();
                    alpha[i] += 1;
                }
                LoadClass::Short => {
                    any_short = true;
                    short_load += &loads[t].load;
                }
            }
        }
        let mut gamma = vec![0u32; ci.large_sizes.len()];
        for &j in large {
            gamma[ci.large_index(ci.size(j)).expect("large size listed")] += 1;
        }
        let medium_load: Rational = medium.iter().map(|&j| ci.size(j).clone()).sum();
        machine_cfg.push(Configuration {
            alpha,
            beta: floor_i64(&(short_load / &unit)) as u32,
            beta_prime: any_short,
            gamma,
            delta: floor_i64(&(medium_load / &unit)) as u32,
            delta_prime: !medium.is_empty(),
        });
    }
    let configurations: Vec<Configuration> =
        machine_cfg.iter().cloned().collect::<BTreeSet<_>>().into_iter().collect();
    for c in &configurations {
        if !configuration_feasible(c, &long_classes, &ci.large_sizes, eps, c_nice) {
            return Err(StsError::Internal(format!("extracted configuration is infeasible: {c:?}")));
        }
    }
    let pool = Pool {
        eps,
        c_nice: c_nice.clone(),
        small_sizes: ci.small_sizes.clone(),
        large_sizes: ci.large_sizes.clone(),
        containers,
        loads,
        long_classes,
        configurations,
    };

    let mut sol = MilpSolution::zeros(pool.configurations.len(), pool.containers.len());
    for (m, (cuts, medium, _)) in per_machine.iter().enumerate() {
        let c = pool.configurations.binary_search(&machine_cfg[m]).unwrap();
        sol.v[c] += 1;
        for cut in cuts {
            let t = pool.containers.binary_search(&cut.container).unwrap();
            sol.w[t] += 1;
            *sol.z.entry((c, t)).or_insert(0) += 1;
            for &(j, k) in &cut.tiny_at {
                *sol.y.entry((j, t, k)).or_insert_with(zero) += one();
            }
        }
        for &j in medium {
            sol.x.insert((j, c), one());
        }
    }
    Ok((pool, sol))
}

/// Small-job slots of a container, per size, summed over blocks.
pub fn small_totals(c: &Container, sizes: usize) -> Vec<u32> {
    let mut out = vec![0; sizes];
    for b in &c.blocks {
        for (o, s) in out.iter_mut().zip(&b.s) {
            *o += s;
        }
    }
    out
}
