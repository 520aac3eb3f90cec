//! Seeded random instances. Defaults stay within the exact oracle's reach.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use sts_core::model::Eps;
use sts_core::rational::{rat, Rational};
use sts_core::Instance;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SizeDist {
    /// `(1+ε)^e` with `e` uniform in `lo..=hi`.
    Powers { lo: i64, hi: i64 },
    /// `k/den` with `k` uniform in `1..=max_num`.
    Uniform { max_num: i64, den: i64 },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct GenParams {
    pub max_jobs: usize,
    pub max_machines: usize,
    pub b_range: (usize, usize),
    pub dist: SizeDist,
}

impl Default for GenParams {
    fn default() -> Self {
        GenParams { max_jobs: 6, max_machines: 2, b_range: (2, 3), dist: SizeDist::Powers { lo: -16, hi: 3 } }
    }
}

pub fn generate(seed: u64, count: usize, params: &GenParams, eps: Eps) -> Vec<Instance> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..count)
        .map(|_| {
            let n = rng.gen_range(1..=params.max_jobs);
            let m = rng.gen_range(1..=params.max_machines);
            let b = rng.gen_range(params.b_range.0..=params.b_range.1);
            let sizes: Vec<Rational> = (0..n)
                .map(|_| match params.dist {
                    SizeDist::Powers { lo, hi } => eps.power(rng.gen_range(lo..=hi)),
                    SizeDist::Uniform { max_num, den } => rat(rng.gen_range(1..=max_num), den),
                })
                .collect();
            Instance::from_sizes(&sizes, m, b).expect("generated parameters are valid")
        })
        .collect()
}
