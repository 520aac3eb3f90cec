//! Instances, geometric size rounding, the makespan guess grid and job classes.

use alloc::collections::BTreeSet;
use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;

use num_traits::{One, Zero};

use crate::error::{Result, StsError};
use crate::rational::{from_usize, int, max_of, one, Rational};
use crate::schedule::{Schedule, ScheduledJob};

/// Accuracy parameter, always `1/k` for an integer `k >= 4`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Eps {
    inv: u32,
}

impl Eps {
    pub fn new(inv: u32) -> Result<Self> {
        if inv < 4 {
            return Err(StsError::InvalidEpsilon(format!(
                "1/epsilon must be an integer greater than 3, got {inv}"
            )));
        }
        Ok(Eps { inv })
    }

    pub fn from_rational(value: &Rational) -> Result<Self> {
        if value <= &Rational::zero() || !value.numer().is_one() {
            return Err(StsError::InvalidEpsilon(format!("{value} is not 1/k")));
        }
        let k: u32 = u32::try_from(value.denom())
            .map_err(|_| StsError::InvalidEpsilon(format!("{value} is too small")))?;
        Eps::new(k)
    }

    /// `1/ε`.
    pub fn inv(self) -> u32 {
        self.inv
    }

    pub fn inv_usize(self) -> usize {
        self.inv as usize
    }

    pub fn value(self) -> Rational {
        Rational::new(1.into(), self.inv.into())
    }

    /// `ε²`.
    pub fn sq(self) -> Rational {
        let k = u64::from(self.inv);
        Rational::new(1.into(), (k * k).into())
    }

    /// `1 + ε`.
    pub fn growth(self) -> Rational {
        Rational::new((self.inv + 1).into(), self.inv.into())
    }

    /// `(1+ε)^e` for any integer exponent.
    pub fn power(self, e: i64) -> Rational {
        let e32 = i32::try_from(e).expect("exponent out of range");
        self.growth().pow(e32)
    }

    /// Smallest `e` with `(1+ε)^e >= x`, and that power. `x` must be positive.
    pub fn ceil_power(self, x: &Rational) -> (i64, Rational) {
        assert!(x > &Rational::zero(), "ceil_power of a non-positive value");
        let g = self.growth();
        let mut e = 0i64;
        let mut v = one();
        if &v >= x {
            loop {
                let prev = &v / &g;
                if &prev < x {
                    return (e, v);
                }
                v = prev;
                e -= 1;
            }
        }
        while &v < x {
            v *= &g;
            e += 1;
        }
        (e, v)
    }

    /// Largest `e` with `(1+ε)^e <= x`, and that power. `x` must be positive.
    pub fn floor_power(self, x: &Rational) -> (i64, Rational) {
        let (e, v) = self.ceil_power(x);
        if &v == x {
            (e, v)
        } else {
            (e - 1, v / self.growth())
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Job {
    pub id: String,
    pub size: Rational,
}

impl Job {
    pub fn new(id: impl Into<String>, size: Rational) -> Self {
        Job { id: id.into(), size }
    }
}

/// Jobs are referred to by their position in `jobs` everywhere in the crate.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Instance {
    pub jobs: Vec<Job>,
    pub machines: usize,
    pub burst_limit: usize,
}

impl Instance {
    pub fn new(jobs: Vec<Job>, machines: usize, burst_limit: usize) -> Result<Self> {
        if burst_limit < 2 {
            return Err(StsError::InvalidInstance(format!("B must be at least 2, got {burst_limit}")));
        }
        if machines == 0 {
            return Err(StsError::InvalidInstance("at least one machine is required".into()));
        }
        let mut seen = BTreeSet::new();
        for job in &jobs {
            if job.size <= Rational::zero() {
                return Err(StsError::InvalidInstance(format!("job {} has non-positive size", job.id)));
            }
            if !seen.insert(job.id.as_str()) {
                return Err(StsError::InvalidInstance(format!("duplicate job id {}", job.id)));
            }
        }
        Ok(Instance { jobs, machines, burst_limit })
    }

    /// Jobs named `"0"`, `"1"`, ... with the given sizes.
    pub fn from_sizes(sizes: &[Rational], machines: usize, burst_limit: usize) -> Result<Self> {
        let jobs = sizes.iter().enumerate().map(|(i, s)| Job::new(format!("{i}"), s.clone())).collect();
        Instance::new(jobs, machines, burst_limit)
    }

    pub fn len(&self) -> usize {
        self.jobs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.jobs.is_empty()
    }

    pub fn sizes(&self) -> Vec<Rational> {
        self.jobs.iter().map(|j| j.size.clone()).collect()
    }

    pub fn p_max(&self) -> Rational {
        max_of(self.jobs.iter().map(|j| &j.size))
    }

    /// Same jobs with different sizes (ids kept).
    pub fn with_sizes(&self, sizes: &[Rational]) -> Instance {
        let jobs = self
            .jobs
            .iter()
            .zip(sizes)
            .map(|(j, s)| Job::new(j.id.clone(), s.clone()))
            .collect();
        Instance { jobs, machines: self.machines, burst_limit: self.burst_limit }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RoundedInstance {
    pub base: Instance,
    /// `p'_j`, indexed like `base.jobs`.
    pub rounded_sizes: Vec<Rational>,
    pub exponents: Vec<i64>,
}

impl RoundedInstance {
    /// The instance whose job sizes are the rounded sizes.
    pub fn instance(&self) -> Instance {
        self.base.with_sizes(&self.rounded_sizes)
    }

    pub fn p_max(&self) -> Rational {
        max_of(self.rounded_sizes.iter())
    }
}

/// Rounds every size up to the next integer power of `1+ε`.
pub fn round_instance(inst: &Instance, eps: Eps) -> RoundedInstance {
    let (exponents, rounded_sizes) = inst.jobs.iter().map(|j| eps.ceil_power(&j.size)).unzip();
    RoundedInstance { base: inst.clone(), rounded_sizes, exponents }
}

/// Turns a schedule of the original instance into one of the rounded instance
/// by multiplying every start by `1+ε` (machines and order unchanged).
pub fn stretch_to_rounded(s: &Schedule, ri: &RoundedInstance, eps: Eps) -> Schedule {
    let g = eps.growth();
    let assignments = s
        .assignments
        .iter()
        .map(|a| ScheduledJob {
            job: a.job,
            machine: a.machine,
            start: &a.start * &g,
            size: ri.rounded_sizes[a.job].clone(),
        })
        .collect();
    Schedule::new(assignments)
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GuessGrid {
    pub values: Vec<Rational>,
    /// `p_max < 1`: a makespan below one is possible and handled separately.
    pub below_one: bool,
}

/// Powers of `1+ε` in `[max(1, p_max), (1+ε)·n·(1+p_max)]`, ascending.
pub fn makespan_guesses(ri: &RoundedInstance, eps: Eps) -> Result<GuessGrid> {
    if ri.rounded_sizes.is_empty() {
        return Err(StsError::NoJobs);
    }
    let p_max = ri.p_max();
    let lo = if p_max > one() { p_max.clone() } else { one() };
    let hi = eps.growth() * from_usize(ri.rounded_sizes.len()) * (one() + &p_max);
    let (_, mut v) = eps.ceil_power(&lo);
    let mut values = Vec::new();
    while v <= hi {
        values.push(v.clone());
        v *= eps.growth();
    }
    Ok(GuessGrid { values, below_one: p_max < one() })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum JobClass {
    Tiny,
    Small,
    Medium,
    Large,
}

impl JobClass {
    /// Position in the nice-schedule order; tiny and small share a rank.
    pub fn order_rank(self) -> u8 {
        match self {
            JobClass::Tiny | JobClass::Small => 0,
            JobClass::Medium => 1,
            JobClass::Large => 2,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ClassifiedInstance {
    pub rounded: RoundedInstance,
    pub eps: Eps,
    pub cmax_guess: Rational,
    pub theta: Rational,
    pub class_of: Vec<JobClass>,
    /// Distinct small sizes, ascending.
    pub small_sizes: Vec<Rational>,
    /// Distinct large sizes, ascending.
    pub large_sizes: Vec<Rational>,
}

impl ClassifiedInstance {
    pub fn size(&self, job: usize) -> &Rational {
        &self.rounded.rounded_sizes[job]
    }

    pub fn n(&self) -> usize {
        self.class_of.len()
    }

    pub fn jobs_of(&self, class: JobClass) -> Vec<usize> {
        (0..self.n()).filter(|&j| self.class_of[j] == class).collect()
    }

    pub fn small_index(&self, size: &Rational) -> Option<usize> {
        self.small_sizes.binary_search(size).ok()
    }

    pub fn large_index(&self, size: &Rational) -> Option<usize> {
        self.large_sizes.binary_search(size).ok()
    }

    /// `|SJ_l|` for every `l` in `small_sizes`.
    pub fn small_counts(&self) -> Vec<usize> {
        let mut counts = alloc::vec![0; self.small_sizes.len()];
        for j in self.jobs_of(JobClass::Small) {
            counts[self.small_index(self.size(j)).unwrap()] += 1;
        }
        counts
    }

    pub fn large_counts(&self) -> Vec<usize> {
        let mut counts = alloc::vec![0; self.large_sizes.len()];
        for j in self.jobs_of(JobClass::Large) {
            counts[self.large_index(self.size(j)).unwrap()] += 1;
        }
        counts
    }

    pub fn total_size(&self, class: JobClass) -> Rational {
        self.jobs_of(class).iter().fold(Rational::zero(), |acc, &j| acc + self.size(j))
    }
}

pub fn classify_size(p: &Rational, eps: Eps, theta: &Rational) -> JobClass {
    if p <= &eps.sq() {
        JobClass::Tiny
    } else if p <= &int(i64::from(eps.inv())) {
        JobClass::Small
    } else if p <= theta {
        JobClass::Medium
    } else {
        JobClass::Large
    }
}

pub fn classify_jobs(ri: &RoundedInstance, eps: Eps, cmax_guess: &Rational) -> Result<ClassifiedInstance> {
    if let Some(job) = ri.rounded_sizes.iter().position(|p| p > cmax_guess) {
        return Err(StsError::GuessTooSmall { job });
    }
    let eps_c = eps.value() * cmax_guess;
    let inv = int(i64::from(eps.inv()));
    let theta = if eps_c > inv { eps_c } else { inv };
    let class_of: Vec<JobClass> = ri.rounded_sizes.iter().map(|p| classify_size(p, eps, &theta)).collect();
    let mut small = BTreeSet::new();
    let mut large = BTreeSet::new();
    for (p, c) in ri.rounded_sizes.iter().zip(&class_of) {
        match c {
            JobClass::Small => {
                small.insert(p.clone());
            }
            JobClass::Large => {
                large.insert(p.clone());
            }
            _ => {}
        }
    }
    Ok(ClassifiedInstance {
        rounded: ri.clone(),
        eps,
        cmax_guess: cmax_guess.clone(),
        theta,
        class_of,
        small_sizes: small.into_iter().collect(),
        large_sizes: large.into_iter().collect(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::rat;

    fn eps4() -> Eps {
        Eps::new(4).unwrap()
    }

    fn single(p: Rational) -> RoundedInstance {
        round_instance(&Instance::from_sizes(&[p], 1, 2).unwrap(), eps4())
    }

    #[test]
    fn eps_validation() {
        assert!(Eps::new(3).is_err());
        assert!(Eps::from_rational(&rat(1, 4)).is_ok());
        assert!(Eps::from_rational(&rat(2, 9)).is_err());
        assert!(Eps::from_rational(&rat(1, 3)).is_err());
    }

    #[test]
    fn rounding_examples() {
        assert_eq!(single(rat(4, 5)).rounded_sizes[0], rat(4, 5));
        assert_eq!(single(rat(11, 10)).rounded_sizes[0], rat(5, 4));
        // 3 -> (5/4)^5 = 3125/1024; found by exact comparison
        let r = single(int(3));
        assert_eq!(r.rounded_sizes[0], rat(3125, 1024));
        assert_eq!(r.exponents[0], 5);
    }

    #[test]
    fn guess_grid_examples() {
        let g = makespan_guesses(&single(int(1)), eps4()).unwrap();
        assert!(!g.below_one);
        assert_eq!(g.values[0], int(1));
        assert!(g.values.last().unwrap() >= &int(2));
        assert!(g.values[g.values.len() - 2] < int(2));

        let ri = round_instance(&Instance::from_sizes(&alloc::vec![rat(1, 2); 4], 1, 2).unwrap(), eps4());
        let g = makespan_guesses(&ri, eps4()).unwrap();
        assert!(g.below_one);
        assert_eq!(g.values[0], int(1));

        let ri = round_instance(&Instance::from_sizes(&[int(2), int(2)], 1, 2).unwrap(), eps4());
        let g = makespan_guesses(&ri, eps4()).unwrap();
        // (5/4)^4 = 2.44 is the first power >= 2
        assert_eq!(g.values[0], rat(625, 256));

        let empty = round_instance(&Instance::from_sizes(&[], 1, 2).unwrap(), eps4());
        assert_eq!(makespan_guesses(&empty, eps4()), Err(StsError::NoJobs));
    }

    #[test]
    fn classification_examples() {
        let e = eps4();
        let ri = single(int(2));
        let ri = RoundedInstance { rounded_sizes: alloc::vec![int(2)], ..ri };
        let ci = classify_jobs(&ri, e, &int(2)).unwrap();
        assert_eq!(ci.theta, int(4));
        assert_eq!(ci.class_of[0], JobClass::Small);

        let theta = int(25);
        assert_eq!(classify_size(&int(10), e, &theta), JobClass::Medium);
        assert_eq!(classify_size(&int(30), e, &theta), JobClass::Large);
        assert_eq!(classify_size(&rat(1, 16), e, &theta), JobClass::Tiny);
        assert_eq!(classify_size(&int(4), e, &theta), JobClass::Small);
        assert_eq!(classify_size(&theta, e, &theta), JobClass::Medium);

        let ri = RoundedInstance { rounded_sizes: alloc::vec![int(3)], ..single(int(3)) };
        assert_eq!(classify_jobs(&ri, e, &int(2)), Err(StsError::GuessTooSmall { job: 0 }));
    }
}
