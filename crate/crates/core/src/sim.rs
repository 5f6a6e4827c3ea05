//! Monte-Carlo harness for the coverage study.
//!
//! Three data-generating set-ups compare two survival laws whose effect after
//! truncation at the set-up's horizon `K` is (numerically) one half. Each
//! group is censored by an independent exponential variable whose rate is
//! calibrated so that the share of censored records after truncation hits a
//! target band.
//!
//! Random streams are nested: outer replication `r` of a study with seed `s`
//! draws its data from `stream_rng(derive_key(s, r), 0)`; its bootstrap and
//! permutation replicates use keys `derive_key(derive_key(s, r), 1)` and
//! `derive_key(derive_key(s, r), 2)` respectively.

use std::fmt::{self, Write as _};
use std::str::FromStr;

use rand::Rng;
use rand_distr::{Exp1, StandardNormal};
use rayon::prelude::*;
use statrs::distribution::{Continuous, ContinuousCDF, LogNormal};

use crate::error::{Error, Result};
use crate::inference::{asymptotic, Alternative, Target, TwoSampleAnalysis};
use crate::resampling::{inference_from_replicates, pool, replicates_in_pool, with_workers, ResamplingPlan, Scheme};
use crate::rng::{derive_key, stream_rng, StreamRng};
use crate::survival::{Observation, Sample};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Setup {
    /// Exponential with mean ½ against a ⅓ / ⅔ mixture of exponentials with
    /// rates 1.27 and 2.5.
    One,
    /// Weibull (scale 1.65, shape 0.9) against the standard lognormal.
    Two,
    /// Weibull (scale 1, shape 1.5) in both groups.
    Three,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Group {
    First,
    Second,
}

impl Setup {
    pub const ALL: [Setup; 3] = [Setup::One, Setup::Two, Setup::Three];

    pub fn id(self) -> u8 {
        match self {
            Setup::One => 1,
            Setup::Two => 2,
            Setup::Three => 3,
        }
    }

    pub fn from_id(id: u8) -> Result<Self> {
        match id {
            1 => Ok(Setup::One),
            2 => Ok(Setup::Two),
            3 => Ok(Setup::Three),
            _ => Err(Error::InvalidArgument(format!("unknown setup: {id} (expected 1, 2 or 3)"))),
        }
    }

    pub fn horizon(self) -> f64 {
        match self {
            Setup::One => 1.6024,
            Setup::Two => 1.7646,
            Setup::Three => 2.0,
        }
    }
}

impl fmt::Display for Setup {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.id())
    }
}

impl FromStr for Setup {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let id = s
            .trim()
            .parse::<u8>()
            .map_err(|_| Error::InvalidArgument(format!("unknown setup: {s}")))?;
        Setup::from_id(id)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum CensoringLevel {
    Strong,
    Moderate,
    None,
}

impl CensoringLevel {
    pub const ALL: [CensoringLevel; 3] = [CensoringLevel::Strong, CensoringLevel::Moderate, CensoringLevel::None];

    /// Admissible censoring percentages.
    pub fn band(self) -> (f64, f64) {
        match self {
            CensoringLevel::Strong => (40.97, 43.6),
            CensoringLevel::Moderate => (21.19, 26.39),
            CensoringLevel::None => (0.0, 0.0),
        }
    }

    pub fn target(self) -> f64 {
        let (lo, hi) = self.band();
        0.5 * (lo + hi)
    }

    pub fn as_str(self) -> &'static str {
        match self {
            CensoringLevel::Strong => "strong",
            CensoringLevel::Moderate => "moderate",
            CensoringLevel::None => "none",
        }
    }
}

impl fmt::Display for CensoringLevel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for CensoringLevel {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim() {
            "strong" => Ok(CensoringLevel::Strong),
            "moderate" => Ok(CensoringLevel::Moderate),
            "none" => Ok(CensoringLevel::None),
            other => Err(Error::InvalidArgument(format!("unknown censoring level: {other}"))),
        }
    }
}

fn std_lognormal() -> LogNormal {
    LogNormal::new(0.0, 1.0).expect("valid parameters")
}

fn weibull_sf(t: f64, scale: f64, shape: f64) -> f64 {
    (-(t / scale).powf(shape)).exp()
}

fn weibull_pdf(t: f64, scale: f64, shape: f64) -> f64 {
    let z = t / scale;
    shape / scale * z.powf(shape - 1.0) * (-z.powf(shape)).exp()
}

/// Survival function `P(T̃ > t)` of the untruncated law.
pub fn survival_function(setup: Setup, group: Group, t: f64) -> f64 {
    if t <= 0.0 {
        return 1.0;
    }
    match (setup, group) {
        (Setup::One, Group::First) => (-2.0 * t).exp(),
        (Setup::One, Group::Second) => (-1.27 * t).exp() / 3.0 + 2.0 * (-2.5 * t).exp() / 3.0,
        (Setup::Two, Group::First) => weibull_sf(t, 1.65, 0.9),
        (Setup::Two, Group::Second) => std_lognormal().sf(t),
        (Setup::Three, _) => weibull_sf(t, 1.0, 1.5),
    }
}

/// Density of the untruncated law; zero for `t ≤ 0`.
pub fn density(setup: Setup, group: Group, t: f64) -> f64 {
    if t <= 0.0 {
        return 0.0;
    }
    match (setup, group) {
        (Setup::One, Group::First) => 2.0 * (-2.0 * t).exp(),
        (Setup::One, Group::Second) => 1.27 * (-1.27 * t).exp() / 3.0 + 2.0 * 2.5 * (-2.5 * t).exp() / 3.0,
        (Setup::Two, Group::First) => weibull_pdf(t, 1.65, 0.9),
        (Setup::Two, Group::Second) => std_lognormal().pdf(t),
        (Setup::Three, _) => weibull_pdf(t, 1.0, 1.5),
    }
}

/// Draws an untruncated survival time `T̃`.
pub fn draw_survival<R: Rng + ?Sized>(setup: Setup, group: Group, rng: &mut R) -> f64 {
    let e: f64 = rng.sample(Exp1);
    match (setup, group) {
        (Setup::One, Group::First) => 0.5 * e,
        (Setup::One, Group::Second) => {
            if rng.random::<f64>() < 1.0 / 3.0 {
                e / 1.27
            } else {
                e / 2.5
            }
        }
        (Setup::Two, Group::First) => 1.65 * e.powf(1.0 / 0.9),
        (Setup::Two, Group::Second) => {
            let z: f64 = rng.sample(StandardNormal);
            z.exp()
        }
        (Setup::Three, _) => e.powf(1.0 / 1.5),
    }
}

fn simpson(a: f64, b: f64, fa: f64, fm: f64, fb: f64) -> f64 {
    (b - a) / 6.0 * (fa + 4.0 * fm + fb)
}

fn adaptive(f: &impl Fn(f64) -> f64, a: f64, b: f64, fa: f64, fm: f64, fb: f64, whole: f64, tol: f64, depth: u32) -> f64 {
    let m = 0.5 * (a + b);
    let (lm, rm) = (0.5 * (a + m), 0.5 * (m + b));
    let (flm, frm) = (f(lm), f(rm));
    let left = simpson(a, m, fa, flm, fm);
    let right = simpson(m, b, fm, frm, fb);
    let diff = left + right - whole;
    if depth == 0 || diff.abs() <= 15.0 * tol {
        left + right + diff / 15.0
    } else {
        adaptive(f, a, m, fa, flm, fm, left, 0.5 * tol, depth - 1)
            + adaptive(f, m, b, fm, frm, fb, right, 0.5 * tol, depth - 1)
    }
}

/// Adaptive Simpson quadrature of `f` over `[a, b]`.
pub fn integrate(f: impl Fn(f64) -> f64, a: f64, b: f64, tol: f64) -> f64 {
    let (fa, fm, fb) = (f(a), f(0.5 * (a + b)), f(b));
    let whole = simpson(a, b, fa, fm, fb);
    adaptive(&f, a, b, fa, fm, fb, whole, tol, 50)
}

/// Effect `P(T1 > T2) + ½ P(T1 = T2)` of the laws truncated at `K`:
/// `∫₀ᴷ S1 f2 + ½ S1(K) S2(K)`, the second term being the tie at `K`.
pub fn true_effect(setup: Setup) -> f64 {
    let k = setup.horizon();
    let s1 = |t| survival_function(setup, Group::First, t);
    let body = integrate(|t| s1(t) * density(setup, Group::Second, t), 0.0, k, 1e-12);
    body + 0.5 * s1(k) * survival_function(setup, Group::Second, k)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CensoringCalibration {
    /// Exponential censoring rates; zero means no censoring.
    pub rate1: f64,
    pub rate2: f64,
    /// Censored share after truncation, in percent, at the calibrated rates.
    pub achieved1: f64,
    pub achieved2: f64,
}

const CALIBRATION_SUBJECTS: usize = 100_000;
const CALIBRATION_KEY: u64 = 0x5EED_CA1B;

/// Record for one subject: censored by `C` if it falls before `T̃ ∧ K`.
fn subject(t: f64, c: f64, k: f64) -> Observation {
    if c < t.min(k) {
        Observation::censored(c)
    } else {
        Observation::event(t.min(k))
    }
}

fn censored_percent(latent: &[(f64, f64)], rate: f64, k: f64) -> f64 {
    let censored = latent
        .iter()
        .filter(|&&(t, e)| !subject(t, e / rate, k).event)
        .count();
    100.0 * censored as f64 / latent.len() as f64
}

fn calibrate_group(setup: Setup, group: Group, level: CensoringLevel) -> Result<(f64, f64)> {
    if level == CensoringLevel::None {
        return Ok((0.0, 0.0));
    }
    let k = setup.horizon();
    let label = match group {
        Group::First => 1,
        Group::Second => 2,
    };
    let mut rng = stream_rng(derive_key(CALIBRATION_KEY, setup.id().into()), label);
    let latent: Vec<(f64, f64)> = (0..CALIBRATION_SUBJECTS)
        .map(|_| (draw_survival(setup, group, &mut rng), rng.sample(Exp1)))
        .collect();

    let target = level.target();
    let (mut lo, mut hi) = (1e-6_f64.ln(), 1e3_f64.ln());
    if censored_percent(&latent, lo.exp(), k) > target || censored_percent(&latent, hi.exp(), k) < target {
        return Err(Error::NotBracketed(format!("setup {setup}, {level} censoring")));
    }
    for _ in 0..80 {
        let mid = 0.5 * (lo + hi);
        if censored_percent(&latent, mid.exp(), k) < target {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    let rate = (0.5 * (lo + hi)).exp();
    Ok((rate, censored_percent(&latent, rate, k)))
}

/// Bisection on the log censoring rate of each group, targeting the middle
/// of the level's band on a fixed set of simulated subjects.
pub fn calibrate_censoring(setup: Setup, level: CensoringLevel) -> Result<CensoringCalibration> {
    let (rate1, achieved1) = calibrate_group(setup, Group::First, level)?;
    let (rate2, achieved2) = calibrate_group(setup, Group::Second, level)?;
    Ok(CensoringCalibration {
        rate1,
        rate2,
        achieved1,
        achieved2,
    })
}

/// `n` censored records truncated at the set-up's horizon.
pub fn generate_group<R: Rng + ?Sized>(setup: Setup, group: Group, n: usize, rate: f64, rng: &mut R) -> Result<Sample> {
    let k = setup.horizon();
    let raw: Vec<Observation> = (0..n)
        .map(|_| {
            let t = draw_survival(setup, group, rng);
            let c = if rate > 0.0 {
                rng.sample::<f64, _>(Exp1) / rate
            } else {
                f64::INFINITY
            };
            subject(t, c, k)
        })
        .collect();
    Sample::new(raw, k)
}

/// Which times Table-1 style proportions count as exceeding `K`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum ExceedanceBasis {
    /// Observed time `min(T̃, C) > K`.
    #[default]
    Observed,
    /// Latent survival time `T̃ > K`, ignoring censoring.
    Latent,
}

/// Percentage of `subjects` simulated subjects per group whose time exceeds
/// the horizon.
pub fn truncation_proportions(
    setup: Setup,
    level: CensoringLevel,
    subjects: usize,
    basis: ExceedanceBasis,
    seed: u64,
) -> Result<(f64, f64)> {
    if subjects == 0 {
        return Err(Error::InvalidArgument("at least one subject is required".into()));
    }
    let cal = calibrate_censoring(setup, level)?;
    let k = setup.horizon();
    let share = |group: Group, rate: f64, stream: u64| {
        let mut rng = stream_rng(seed, stream);
        let above = (0..subjects)
            .filter(|_| {
                let t = draw_survival(setup, group, &mut rng);
                let c = if rate > 0.0 {
                    rng.sample::<f64, _>(Exp1) / rate
                } else {
                    f64::INFINITY
                };
                match basis {
                    ExceedanceBasis::Observed => t.min(c) > k,
                    ExceedanceBasis::Latent => t > k,
                }
            })
            .count();
        100.0 * above as f64 / subjects as f64
    };
    Ok((share(Group::First, cal.rate1, 1), share(Group::Second, cal.rate2, 2)))
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ScenarioConfig {
    pub setup: Setup,
    pub censoring: CensoringLevel,
    pub n1: usize,
    pub n2: usize,
    pub alpha: f64,
    /// Outer Monte-Carlo replications `N`.
    pub reps: usize,
    /// Inner resampling replicates `B`.
    pub b: usize,
    pub seed: u64,
}

impl Default for ScenarioConfig {
    fn default() -> Self {
        Self {
            setup: Setup::Three,
            censoring: CensoringLevel::None,
            n1: 30,
            n2: 30,
            alpha: 0.05,
            reps: 2000,
            b: 1999,
            seed: 1,
        }
    }
}

impl ScenarioConfig {
    pub fn horizon(&self) -> f64 {
        self.setup.horizon()
    }

    /// Applies one `key = value` setting.
    pub fn set(&mut self, key: &str, value: &str) -> Result<()> {
        let bad = |what: &str| Error::InvalidArgument(format!("invalid value for {what}: {value}"));
        let value = value.trim();
        match key.trim() {
            "setup" => self.setup = value.parse()?,
            "censoring" => self.censoring = value.parse()?,
            "n1" => self.n1 = value.parse().map_err(|_| bad("n1"))?,
            "n2" => self.n2 = value.parse().map_err(|_| bad("n2"))?,
            "alpha" => self.alpha = value.parse().map_err(|_| bad("alpha"))?,
            "reps" => self.reps = value.parse().map_err(|_| bad("reps"))?,
            "b" => self.b = value.parse().map_err(|_| bad("b"))?,
            "seed" => self.seed = value.parse().map_err(|_| bad("seed"))?,
            other => return Err(Error::InvalidArgument(format!("unknown key: {other}"))),
        }
        Ok(())
    }

    pub fn validate(&self) -> Result<()> {
        if self.n1 == 0 || self.n2 == 0 {
            return Err(Error::EmptySample);
        }
        if self.reps == 0 || self.b == 0 {
            return Err(Error::InvalidArgument("reps and b must be positive".into()));
        }
        crate::inference::check_alpha(self.alpha)
    }

    /// Every cell of the published grid: each set-up and censoring level for
    /// `n1 = n2 ∈ {10, …, 30}` and `n2 = 2 n1`, with `N = 10⁴` and `B = 1999`.
    pub fn full_grid(seed: u64) -> Vec<ScenarioConfig> {
        let mut grid = Vec::new();
        for balanced in [true, false] {
            for setup in Setup::ALL {
                for censoring in CensoringLevel::ALL {
                    for n1 in [10, 15, 20, 25, 30] {
                        grid.push(ScenarioConfig {
                            setup,
                            censoring,
                            n1,
                            n2: if balanced { n1 } else { 2 * n1 },
                            alpha: 0.05,
                            reps: 10_000,
                            b: 1999,
                            seed,
                        });
                    }
                }
            }
        }
        grid
    }
}

/// Parses scenario files: `key = value` lines, `#` comments, and blank
/// lines separating scenarios. Keys missing from a block keep the values of
/// `base`.
pub fn parse_scenarios(text: &str, base: ScenarioConfig) -> Result<Vec<ScenarioConfig>> {
    let mut out = Vec::new();
    let mut current: Option<ScenarioConfig> = None;
    for (i, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            if raw.trim().is_empty() {
                out.extend(current.take());
            }
            continue;
        }
        let (key, value) = line
            .split_once('=')
            .ok_or_else(|| Error::InvalidArgument(format!("line {}: expected key = value", i + 1)))?;
        current
            .get_or_insert(base)
            .set(key, value)
            .map_err(|e| Error::InvalidArgument(format!("line {}: {e}", i + 1)))?;
    }
    out.extend(current);
    for c in &out {
        c.validate()?;
    }
    Ok(out)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CoverageRow {
    pub setup: Setup,
    pub censoring: CensoringLevel,
    pub n1: usize,
    pub n2: usize,
    /// Coverage percentages of the asymptotic, bootstrap and permutation intervals.
    pub cov_asymptotic: f64,
    pub cov_bootstrap: f64,
    pub cov_permutation: f64,
    /// Replications entering the coverage denominators.
    pub reps_used: usize,
    /// Replications dropped because an interval could not be formed.
    pub excluded: usize,
    pub true_p: f64,
    pub calibration: CensoringCalibration,
}

fn replication(config: &ScenarioConfig, cal: &CensoringCalibration, truth: f64, r: u64) -> Option<[bool; 3]> {
    let key = derive_key(config.seed, r);
    let mut rng: StreamRng = stream_rng(key, 0);
    let s1 = generate_group(config.setup, Group::First, config.n1, cal.rate1, &mut rng).ok()?;
    let s2 = generate_group(config.setup, Group::Second, config.n2, cal.rate2, &mut rng).ok()?;
    let analysis = TwoSampleAnalysis::new(&s1, &s2).ok()?;
    let alt = Alternative::TwoSided;
    let asy = asymptotic(&analysis, config.alpha, Target::P, alt).ok()?;
    let z = pool(&s1, &s2).ok()?;
    let mut covered = [asy.interval.contains(truth), false, false];
    for (slot, scheme, label) in [(1, Scheme::Bootstrap, 1), (2, Scheme::Permutation, 2)] {
        let plan = ResamplingPlan::new(scheme, config.b, derive_key(key, label));
        let reps = replicates_in_pool(&z, scheme, config.b, plan.seed, Target::P);
        let res = inference_from_replicates(&analysis, &reps, &plan, config.alpha, Target::P, alt).ok()?;
        covered[slot] = res.interval.contains(truth);
    }
    Some(covered)
}

/// Simulated coverage of the three two-sided intervals for the true effect.
pub fn coverage_study(config: &ScenarioConfig, workers: usize) -> Result<CoverageRow> {
    config.validate()?;
    let cal = calibrate_censoring(config.setup, config.censoring)?;
    let truth = true_effect(config.setup);
    let outcomes: Vec<Option<[bool; 3]>> = with_workers(workers, || {
        (0..config.reps as u64)
            .into_par_iter()
            .map(|r| replication(config, &cal, truth, r))
            .collect()
    })?;
    let used: Vec<[bool; 3]> = outcomes.into_iter().flatten().collect();
    if used.is_empty() {
        return Err(Error::NoValidReplicates(config.reps));
    }
    let pct = |j: usize| 100.0 * used.iter().filter(|c| c[j]).count() as f64 / used.len() as f64;
    Ok(CoverageRow {
        setup: config.setup,
        censoring: config.censoring,
        n1: config.n1,
        n2: config.n2,
        cov_asymptotic: pct(0),
        cov_bootstrap: pct(1),
        cov_permutation: pct(2),
        reps_used: used.len(),
        excluded: config.reps - used.len(),
        true_p: truth,
        calibration: cal,
    })
}

/// Median of `σ̂²` and the empirical variance of `V_n = √(n1 n2 / n)(p̂ - p)`
/// over `reps` simulated data sets.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ConsistencyCheck {
    pub median_sigma2: f64,
    pub empirical_variance: f64,
    pub reps_used: usize,
}

pub fn variance_consistency(config: &ScenarioConfig, workers: usize) -> Result<ConsistencyCheck> {
    config.validate()?;
    let cal = calibrate_censoring(config.setup, config.censoring)?;
    let truth = true_effect(config.setup);
    let pairs: Vec<Option<(f64, f64)>> = with_workers(workers, || {
        (0..config.reps as u64)
            .into_par_iter()
            .map(|r| {
                let mut rng = stream_rng(derive_key(config.seed, r), 0);
                let s1 = generate_group(config.setup, Group::First, config.n1, cal.rate1, &mut rng).ok()?;
                let s2 = generate_group(config.setup, Group::Second, config.n2, cal.rate2, &mut rng).ok()?;
                let a = TwoSampleAnalysis::new(&s1, &s2).ok()?;
                Some((a.variance.sigma2, a.root_n() * (a.effect.p_hat - truth)))
            })
            .collect()
    })?;
    let pairs: Vec<(f64, f64)> = pairs.into_iter().flatten().collect();
    if pairs.len() < 2 {
        return Err(Error::NoValidReplicates(config.reps));
    }
    let mut s2: Vec<f64> = pairs.iter().map(|p| p.0).collect();
    s2.sort_unstable_by(f64::total_cmp);
    let m = s2.len();
    let median_sigma2 = if m % 2 == 1 {
        s2[m / 2]
    } else {
        0.5 * (s2[m / 2 - 1] + s2[m / 2])
    };
    let mean = pairs.iter().map(|p| p.1).sum::<f64>() / m as f64;
    let empirical_variance = pairs.iter().map(|p| (p.1 - mean).powi(2)).sum::<f64>() / (m - 1) as f64;
    Ok(ConsistencyCheck {
        median_sigma2,
        empirical_variance,
        reps_used: m,
    })
}

pub const TSV_HEADER: &str =
    "setup\tcensoring\tn1\tn2\tcov_asymptotic\tcov_bootstrap\tcov_permutation\treps_used\texcluded\ttrue_p\trate1\trate2\tachieved1\tachieved2";

impl CoverageRow {
    pub fn tsv_line(&self) -> String {
        let c = &self.calibration;
        format!(
            "{}\t{}\t{}\t{}\t{:.2}\t{:.2}\t{:.2}\t{}\t{}\t{:.6}\t{:.6}\t{:.6}\t{:.2}\t{:.2}",
            self.setup,
            self.censoring,
            self.n1,
            self.n2,
            self.cov_asymptotic,
            self.cov_bootstrap,
            self.cov_permutation,
            self.reps_used,
            self.excluded,
            self.true_p,
            c.rate1,
            c.rate2,
            c.achieved1,
            c.achieved2
        )
    }
}

pub fn coverage_tsv(rows: &[CoverageRow]) -> String {
    let mut out = String::from(TSV_HEADER);
    out.push('\n');
    for r in rows {
        out.push_str(&r.tsv_line());
        out.push('\n');
    }
    out
}

/// Aligned table with one row per scenario in the layout of the published
/// coverage tables.
pub fn coverage_table(rows: &[CoverageRow]) -> String {
    let mut out = String::new();
    let _ = writeln!(
        out,
        "{:>5}  {:>9}  {:>7}  {:>7}  {:>7}  {:>7}  {:>6}  {:>8}",
        "setup", "censoring", "n1, n2", "I_n", "I_n*", "I_n^pi", "used", "excluded"
    );
    for r in rows {
        let _ = writeln!(
            out,
            "{:>5}  {:>9}  {:>7}  {:>7.2}  {:>7.2}  {:>7.2}  {:>6}  {:>8}",
            format!("({})", r.setup),
            r.censoring.as_str(),
            format!("{}, {}", r.n1, r.n2),
            r.cov_asymptotic,
            r.cov_bootstrap,
            r.cov_permutation,
            r.reps_used,
            r.excluded
        );
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn same_law_in_setup_three() {
        let a: Vec<f64> = {
            let mut rng = stream_rng(9, 0);
            (0..5).map(|_| draw_survival(Setup::Three, Group::First, &mut rng)).collect()
        };
        let b: Vec<f64> = {
            let mut rng = stream_rng(9, 0);
            (0..5).map(|_| draw_survival(Setup::Three, Group::Second, &mut rng)).collect()
        };
        assert_eq!(a, b);
    }

    #[test]
    fn mean_and_median_of_draws() {
        let mut rng = stream_rng(11, 0);
        let n = 1_000_000;
        let mean = (0..n).map(|_| draw_survival(Setup::One, Group::First, &mut rng)).sum::<f64>() / n as f64;
        assert!((mean - 0.5).abs() < 0.002, "{mean}");

        let mut v: Vec<f64> = (0..n).map(|_| draw_survival(Setup::Two, Group::Second, &mut rng)).collect();
        v.sort_unstable_by(f64::total_cmp);
        assert!((v[n / 2] - 1.0).abs() < 0.01);
    }

    #[test]
    fn quadrature_sanity() {
        let v = integrate(|t| t * t, 0.0, 3.0, 1e-12);
        assert!((v - 9.0).abs() < 1e-10);
        for setup in Setup::ALL {
            for g in [Group::First, Group::Second] {
                let k = setup.horizon();
                let mass = integrate(|t| density(setup, g, t), 1e-12, k, 1e-12);
                assert!((mass + survival_function(setup, g, k) - 1.0).abs() < 1e-8);
            }
        }
    }

    #[test]
    fn level_bands() {
        assert!((CensoringLevel::Strong.target() - 42.285).abs() < 1e-12);
        assert!((CensoringLevel::Moderate.target() - 23.79).abs() < 1e-12);
        assert_eq!(calibrate_censoring(Setup::One, CensoringLevel::None).unwrap().rate1, 0.0);
    }

    #[test]
    fn scenario_parsing() {
        let text = "setup = 1\ncensoring = strong # comment\nn1 = 10\nn2=10\n\n# second\nsetup=2\nb = 99\n";
        let v = parse_scenarios(text, ScenarioConfig::default()).unwrap();
        assert_eq!(v.len(), 2);
        assert_eq!((v[0].setup, v[0].censoring, v[0].n1), (Setup::One, CensoringLevel::Strong, 10));
        assert_eq!((v[1].setup, v[1].b, v[1].n1), (Setup::Two, 99, 30));
        assert!(parse_scenarios("setup = 4", ScenarioConfig::default()).is_err());
        assert!(parse_scenarios("foo = 1", ScenarioConfig::default()).is_err());
        assert!(parse_scenarios("setup 1", ScenarioConfig::default()).is_err());
    }

    #[test]
    fn grid_size() {
        assert_eq!(ScenarioConfig::full_grid(1).len(), 90);
    }
}
