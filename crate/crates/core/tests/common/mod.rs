#![allow(dead_code)]

use rand::Rng;
use rand_chacha::ChaCha8Rng;
use sts_core::model::Eps;
use sts_core::rational::{int, rat, Rational};
use sts_core::{Schedule, ScheduledJob};

pub fn eps4() -> Eps {
    Eps::new(4).unwrap()
}

/// A feasible schedule: random machine per job, then per machine the
/// recurrence start plus a random delay (multiple of 1/8, at most 2).
pub fn random_feasible(rng: &mut ChaCha8Rng, sizes: &[Rational], machines: usize, b: usize) -> Schedule {
    let mut per: Vec<Vec<usize>> = vec![Vec::new(); machines];
    for j in 0..sizes.len() {
        per[rng.gen_range(0..machines)].push(j);
    }
    let mut out = Vec::new();
    for (m, jobs) in per.into_iter().enumerate() {
        let mut ends: Vec<Rational> = Vec::new();
        for (i, &j) in jobs.iter().enumerate() {
            let mut s = if i == 0 { int(0) } else { ends[i - 1].clone() };
            if i >= b && ends[i - b].clone() + int(1) > s {
                s = ends[i - b].clone() + int(1);
            }
            if rng.gen_bool(0.5) {
                s += rat(rng.gen_range(0..=16), 8);
            }
            ends.push(&s + &sizes[j]);
            out.push(ScheduledJob::new(j, m, s, sizes[j].clone()));
        }
    }
    Schedule::new(out)
}

/// Sizes that are exact powers of 5/4, mixing all four classes.
pub fn rounded_sizes(rng: &mut ChaCha8Rng, n: usize, lo: i64, hi: i64) -> Vec<Rational> {
    (0..n).map(|_| eps4().power(rng.gen_range(lo..=hi))).collect()
}
