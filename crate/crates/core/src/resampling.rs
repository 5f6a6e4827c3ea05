//! Pooled bootstrap and studentized permutation procedures.
//!
//! Both schemes work on the pooled sample with group labels erased. A
//! replicate draws two groups of the original sizes from it (with
//! replacement for the bootstrap, without for the permutation), recomputes
//! the effect and its variance estimate, and returns the studentized
//! statistic centred at the null value `½`. Replicates whose variance
//! estimate degenerates (for example a resampled group with no events) are
//! dropped and counted, never redrawn.
//!
//! Replicate `i` of a plan with seed `s` always uses [`stream_rng`]`(s, i)`
//! and results are merged by index, so output is independent of the number
//! of worker threads.

use std::fmt;
use std::io::{self, Write};
use std::str::FromStr;

use rand::seq::SliceRandom;
use rand::Rng;
use rayon::prelude::*;

use crate::effect::check_horizons;
use crate::error::{Error, Result};
use crate::inference::{
    check_alpha, Alternative, InferenceResult, Method, ResamplingSummary, Target,
    TwoSampleAnalysis,
};
use crate::rng::{stream_rng, StreamRng};
use crate::survival::{KaplanMeierFit, Observation, Sample};

/// Both groups concatenated, group 1 first.
#[derive(Debug, Clone, PartialEq)]
pub struct PooledSample {
    observations: Vec<Observation>,
    n1: usize,
    n2: usize,
    horizon: f64,
}

impl PooledSample {
    pub fn observations(&self) -> &[Observation] {
        &self.observations
    }

    pub fn n1(&self) -> usize {
        self.n1
    }

    pub fn n2(&self) -> usize {
        self.n2
    }

    pub fn len(&self) -> usize {
        self.observations.len()
    }

    pub fn is_empty(&self) -> bool {
        self.observations.is_empty()
    }

    pub fn horizon(&self) -> f64 {
        self.horizon
    }

    /// Splits at `n1` without shuffling.
    pub fn split(&self) -> (Sample, Sample) {
        let (a, b) = self.observations.split_at(self.n1);
        (
            Sample::new(a.to_vec(), self.horizon).expect("pooled from valid samples"),
            Sample::new(b.to_vec(), self.horizon).expect("pooled from valid samples"),
        )
    }
}

pub fn pool(s1: &Sample, s2: &Sample) -> Result<PooledSample> {
    check_horizons(s1, s2)?;
    let mut observations = Vec::with_capacity(s1.len() + s2.len());
    observations.extend_from_slice(s1.observations());
    observations.extend_from_slice(s2.observations());
    Ok(PooledSample {
        observations,
        n1: s1.len(),
        n2: s2.len(),
        horizon: s1.horizon(),
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Scheme {
    Bootstrap,
    Permutation,
}

impl Scheme {
    pub fn method(self) -> Method {
        match self {
            Scheme::Bootstrap => Method::Bootstrap,
            Scheme::Permutation => Method::Permutation,
        }
    }
}

impl fmt::Display for Scheme {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.method().fmt(f)
    }
}

impl FromStr for Scheme {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "bootstrap" => Ok(Scheme::Bootstrap),
            "permutation" => Ok(Scheme::Permutation),
            other => Err(Error::InvalidArgument(format!("unknown scheme: {other}"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ResamplingPlan {
    pub scheme: Scheme,
    /// Number of replicates `B`.
    pub replicates: usize,
    pub seed: u64,
    /// Worker threads; never affects results.
    pub workers: usize,
}

impl ResamplingPlan {
    pub fn new(scheme: Scheme, replicates: usize, seed: u64) -> Self {
        Self {
            scheme,
            replicates,
            seed,
            workers: 1,
        }
    }

    pub fn with_workers(mut self, workers: usize) -> Self {
        self.workers = workers;
        self
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ReplicateSet {
    /// Retained replicate statistics in replicate-index order.
    pub statistics: Vec<f64>,
    pub dropped: usize,
}

impl ReplicateSet {
    pub fn replicates(&self) -> usize {
        self.statistics.len() + self.dropped
    }

    pub fn retained(&self) -> usize {
        self.statistics.len()
    }

    fn sorted(&self) -> Result<Vec<f64>> {
        if self.statistics.is_empty() {
            return Err(Error::NoValidReplicates(self.dropped));
        }
        let mut v = self.statistics.clone();
        v.sort_unstable_by(f64::total_cmp);
        Ok(v)
    }

    /// Upper critical value `c(α)`: see [`replicate_quantile`].
    pub fn upper_quantile(&self, alpha: f64) -> Result<f64> {
        check_alpha(alpha)?;
        let sorted = self.sorted()?;
        Ok(sorted[upper_rank(alpha, sorted.len()) - 1])
    }

    /// Mirror image of [`Self::upper_quantile`]: the `(B_eff + 1 - k)`-th
    /// order statistic, or `-∞` when that rank is below 1.
    pub fn lower_quantile(&self, alpha: f64) -> Result<f64> {
        check_alpha(alpha)?;
        let sorted = self.sorted()?;
        let m = sorted.len();
        let k = (m + 1).saturating_sub(raw_upper_rank(alpha, m));
        Ok(if k == 0 {
            f64::NEG_INFINITY
        } else {
            sorted[k - 1]
        })
    }

    /// Writes the retained statistics as one number per line.
    pub fn write_column<W: Write>(&self, mut out: W) -> io::Result<()> {
        for x in &self.statistics {
            writeln!(out, "{x}")?;
        }
        Ok(())
    }
}

/// `⌈(1 - α)(m + 1)⌉`, capped at `m`. The tiny offset keeps exact products
/// such as `0.95 · 20` from rounding up a rank.
fn upper_rank(alpha: f64, m: usize) -> usize {
    raw_upper_rank(alpha, m).min(m)
}

fn raw_upper_rank(alpha: f64, m: usize) -> usize {
    ((1.0 - alpha) * (m as f64 + 1.0) - 1e-9).ceil().max(1.0) as usize
}

/// Conditional `(1 - α)`-quantile of the replicates: the
/// `⌈(1 - α)(B_eff + 1)⌉`-th order statistic of the retained values,
/// capped at the maximum.
pub fn replicate_quantile(set: &ReplicateSet, alpha: f64) -> Result<f64> {
    set.upper_quantile(alpha)
}

/// Studentized statistic of two resampled groups at the null, or `None`
/// when the replicate is degenerate.
pub fn replicate_statistic(g1: &[Observation], g2: &[Observation], target: Target) -> Option<f64> {
    let f1 = KaplanMeierFit::from_observations(g1);
    let f2 = KaplanMeierFit::from_observations(g2);
    if !(f1.has_events() && f2.has_events()) {
        return None;
    }
    let t = TwoSampleAnalysis::from_fits(f1, f2).null_statistic(target).ok()?;
    t.is_finite().then_some(t)
}

fn bootstrap_groups(z: &PooledSample, rng: &mut StreamRng) -> (Vec<Observation>, Vec<Observation>) {
    let n = z.len();
    let mut drawn: Vec<Observation> = (0..n).map(|_| z.observations[rng.random_range(0..n)]).collect();
    let g2 = drawn.split_off(z.n1);
    (drawn, g2)
}

fn permutation_groups(z: &PooledSample, rng: &mut StreamRng) -> (Vec<Observation>, Vec<Observation>) {
    let mut shuffled = z.observations.clone();
    let (g1, g2) = shuffled.partial_shuffle(rng, z.n1);
    (g1.to_vec(), g2.to_vec())
}

/// One pooled-bootstrap replicate `T*`: `n` draws with replacement, the
/// first `n1` forming group 1.
pub fn bootstrap_replicate(z: &PooledSample, rng: &mut StreamRng, target: Target) -> Option<f64> {
    let (g1, g2) = bootstrap_groups(z, rng);
    replicate_statistic(&g1, &g2, target)
}

/// One permutation replicate `T^π`: a uniformly random split of the pooled
/// sample into groups of sizes `n1` and `n2`.
pub fn permutation_replicate(z: &PooledSample, rng: &mut StreamRng, target: Target) -> Option<f64> {
    let (g1, g2) = permutation_groups(z, rng);
    replicate_statistic(&g1, &g2, target)
}

/// Replicates on the current rayon pool.
pub(crate) fn replicates_in_pool(
    z: &PooledSample,
    scheme: Scheme,
    replicates: usize,
    seed: u64,
    target: Target,
) -> ReplicateSet {
    let draw = |i: usize| {
        let mut rng = stream_rng(seed, i as u64);
        match scheme {
            Scheme::Bootstrap => bootstrap_replicate(z, &mut rng, target),
            Scheme::Permutation => permutation_replicate(z, &mut rng, target),
        }
    };
    let raw: Vec<Option<f64>> = (0..replicates).into_par_iter().map(draw).collect();
    let statistics: Vec<f64> = raw.iter().flatten().copied().collect();
    ReplicateSet {
        dropped: replicates - statistics.len(),
        statistics,
    }
}

pub(crate) fn with_workers<T: Send>(workers: usize, job: impl FnOnce() -> T + Send) -> Result<T> {
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(workers.max(1))
        .build()
        .map_err(|e| Error::InvalidArgument(format!("thread pool: {e}")))?;
    Ok(pool.install(job))
}

pub fn generate_replicates(z: &PooledSample, plan: &ResamplingPlan, target: Target) -> Result<ReplicateSet> {
    if plan.replicates == 0 {
        return Err(Error::InvalidArgument("at least one replicate is required".into()));
    }
    with_workers(plan.workers, || {
        replicates_in_pool(z, plan.scheme, plan.replicates, plan.seed, target)
    })
}

/// Resampling interval and test from an already generated replicate set.
pub fn inference_from_replicates(
    analysis: &TwoSampleAnalysis,
    replicates: &ReplicateSet,
    plan: &ResamplingPlan,
    alpha: f64,
    target: Target,
    alternative: Alternative,
) -> Result<InferenceResult> {
    check_alpha(alpha)?;
    let statistic = analysis.null_statistic(target)?;
    let m = replicates.retained();
    if m == 0 {
        return Err(Error::NoValidReplicates(replicates.dropped));
    }
    let denom = m as f64 + 1.0;
    let p_greater = (1 + replicates.statistics.iter().filter(|&&r| r >= statistic).count()) as f64 / denom;
    let p_less = (1 + replicates.statistics.iter().filter(|&&r| r <= statistic).count()) as f64 / denom;

    let (interval, p_value, reject) = match alternative {
        Alternative::TwoSided => {
            let hi = replicates.upper_quantile(alpha / 2.0)?;
            let lo = replicates.lower_quantile(alpha / 2.0)?;
            (
                analysis.interval(target, alternative, hi, lo)?,
                (2.0 * p_greater.min(p_less)).min(1.0),
                statistic > hi || statistic < lo,
            )
        }
        Alternative::Greater => {
            let hi = replicates.upper_quantile(alpha)?;
            (
                analysis.interval(target, alternative, hi, f64::NEG_INFINITY)?,
                p_greater,
                statistic > hi,
            )
        }
        Alternative::Less => {
            let lo = replicates.lower_quantile(alpha)?;
            (
                analysis.interval(target, alternative, f64::INFINITY, lo)?,
                p_less,
                statistic < lo,
            )
        }
    };

    Ok(InferenceResult {
        method: plan.scheme.method(),
        target,
        alternative,
        alpha,
        effect: analysis.effect,
        sigma: analysis.variance.sigma,
        statistic,
        interval,
        p_value,
        reject,
        resampling: Some(ResamplingSummary {
            replicates: replicates.replicates(),
            retained: m,
            dropped: replicates.dropped,
            seed: plan.seed,
        }),
    })
}

/// Resampling confidence interval and test. The two-sided interval uses the
/// single upper quantile `c(α/2)` symmetrically around the estimate.
pub fn resampling_inference(
    s1: &Sample,
    s2: &Sample,
    plan: &ResamplingPlan,
    alpha: f64,
    target: Target,
    alternative: Alternative,
) -> Result<InferenceResult> {
    let analysis = TwoSampleAnalysis::new(s1, s2)?;
    analysis.null_statistic(target)?;
    let z = pool(s1, s2)?;
    let replicates = generate_replicates(&z, plan, target)?;
    inference_from_replicates(&analysis, &replicates, plan, alpha, target, alternative)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn set(stats: &[f64]) -> ReplicateSet {
        ReplicateSet {
            statistics: stats.to_vec(),
            dropped: 0,
        }
    }

    #[test]
    fn order_statistic_rule() {
        let s = set(&(1..=19).map(f64::from).collect::<Vec<_>>());
        assert_eq!(replicate_quantile(&s, 0.05), Ok(19.0));
        assert_eq!(replicate_quantile(&set(&[-1.0, 0.0, 1.0]), 0.5), Ok(0.0));

        let big = set(&(1..=9999).map(f64::from).collect::<Vec<_>>());
        assert_eq!(replicate_quantile(&big, 0.05), Ok(9500.0));
        assert_eq!(big.lower_quantile(0.05), Ok(500.0));

        // Too few replicates for the tail: capped at the extremes.
        let tiny = set(&[3.0, 1.0, 2.0]);
        assert_eq!(replicate_quantile(&tiny, 0.01), Ok(3.0));
        assert_eq!(tiny.lower_quantile(0.01), Ok(f64::NEG_INFINITY));

        let empty = ReplicateSet {
            statistics: vec![],
            dropped: 4,
        };
        assert_eq!(replicate_quantile(&empty, 0.05), Err(Error::NoValidReplicates(4)));
    }

    #[test]
    fn write_column_one_per_line() {
        let mut buf = Vec::new();
        set(&[1.5, -0.25]).write_column(&mut buf).unwrap();
        assert_eq!(String::from_utf8(buf).unwrap(), "1.5\n-0.25\n");
    }

    #[test]
    fn pool_and_split_round_trip() {
        let a = Sample::truncate(&[Observation::event(1.0), Observation::censored(2.0)], 5.0).unwrap();
        let b = Sample::truncate(&[Observation::event(3.0)], 5.0).unwrap();
        let z = pool(&a, &b).unwrap();
        assert_eq!((z.len(), z.n1(), z.n2()), (3, 2, 1));
        assert_eq!(z.split(), (a, b));
    }

    #[test]
    fn all_censored_pool_has_no_valid_replicates() {
        let s = Sample::truncate(&[Observation::censored(1.0), Observation::censored(2.0)], 5.0).unwrap();
        let z = pool(&s, &s).unwrap();
        for scheme in [Scheme::Bootstrap, Scheme::Permutation] {
            let r = generate_replicates(&z, &ResamplingPlan::new(scheme, 50, 1), Target::P).unwrap();
            assert_eq!((r.retained(), r.dropped), (0, 50));
            assert_eq!(r.upper_quantile(0.05), Err(Error::NoValidReplicates(50)));
        }
    }
}
