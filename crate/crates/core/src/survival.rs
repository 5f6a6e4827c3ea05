//! Censored samples, counting processes and product-limit estimators.
//!
//! Times are compared exactly: they are data, never the result of
//! arithmetic. Tied event times aggregate into a single jump. When an event
//! and a censoring share a time, the censored subject is still at risk at
//! that time, so `Y(u) >= dN(u)` always holds.

use std::cmp::Ordering;

use crate::error::{Error, Result};

/// One subject's observed pair `(X, δ)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Observation {
    pub time: f64,
    /// `true` for an observed death, `false` for a censored record.
    pub event: bool,
}

impl Observation {
    pub fn new(time: f64, event: bool) -> Self {
        Self { time, event }
    }

    pub fn event(time: f64) -> Self {
        Self::new(time, true)
    }

    pub fn censored(time: f64) -> Self {
        Self::new(time, false)
    }
}

/// How records strictly beyond the horizon `K` are rewritten.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum BeyondHorizon {
    /// `T = T̃ ∧ K`: a subject known to survive past `K` has an observed
    /// (truncated) event at `K`.
    #[default]
    Event,
    /// Administrative censoring at `K`: the record becomes censored at `K`
    /// and the curves keep their mass at the horizon.
    Censor,
}

/// A single group's observations, all within `(0, K]`.
#[derive(Debug, Clone, PartialEq)]
pub struct Sample {
    observations: Vec<Observation>,
    horizon: f64,
}

fn check_horizon(horizon: f64) -> Result<()> {
    if horizon.is_finite() && horizon > 0.0 {
        Ok(())
    } else {
        Err(Error::InvalidHorizon(horizon))
    }
}

impl Sample {
    /// Validates an already truncated sample.
    pub fn new(observations: Vec<Observation>, horizon: f64) -> Result<Self> {
        check_horizon(horizon)?;
        if observations.is_empty() {
            return Err(Error::EmptySample);
        }
        for o in &observations {
            if !(o.time.is_finite() && o.time > 0.0 && o.time <= horizon) {
                return Err(Error::InvalidTime {
                    time: o.time,
                    horizon,
                });
            }
        }
        Ok(Self {
            observations,
            horizon,
        })
    }

    /// Truncates raw records at `horizon`, turning every record beyond it
    /// into an event at the horizon. Records exactly at the horizon keep
    /// their status.
    pub fn truncate(raw: &[Observation], horizon: f64) -> Result<Self> {
        Self::truncate_with(raw, horizon, BeyondHorizon::Event)
    }

    pub fn truncate_with(raw: &[Observation], horizon: f64, policy: BeyondHorizon) -> Result<Self> {
        check_horizon(horizon)?;
        if raw.is_empty() {
            return Err(Error::EmptySample);
        }
        let observations = raw
            .iter()
            .map(|o| {
                if !(o.time.is_finite() && o.time > 0.0) {
                    return Err(Error::InvalidTime {
                        time: o.time,
                        horizon,
                    });
                }
                Ok(if o.time > horizon {
                    Observation::new(horizon, policy == BeyondHorizon::Event)
                } else {
                    *o
                })
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(Self {
            observations,
            horizon,
        })
    }

    pub fn observations(&self) -> &[Observation] {
        &self.observations
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

    pub fn is_uncensored(&self) -> bool {
        self.observations.iter().all(|o| o.event)
    }
}

/// Free-function form of [`Sample::truncate`].
pub fn truncate(raw: &[Observation], horizon: f64) -> Result<Sample> {
    Sample::truncate(raw, horizon)
}

/// Right-continuous, piecewise-constant function on `[0, K]`.
#[derive(Debug, Clone, PartialEq)]
pub struct StepFunction {
    jump_times: Vec<f64>,
    values: Vec<f64>,
    initial: f64,
}

impl StepFunction {
    /// `values[i]` holds on `[jump_times[i], jump_times[i + 1])`.
    pub fn new(jump_times: Vec<f64>, values: Vec<f64>, initial: f64) -> Result<Self> {
        if jump_times.len() != values.len() {
            return Err(Error::InvalidArgument(
                "jump_times and values differ in length".into(),
            ));
        }
        if jump_times.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::InvalidArgument(
                "jump_times must be strictly increasing".into(),
            ));
        }
        if jump_times.first().is_some_and(|&t| t <= 0.0) {
            return Err(Error::InvalidArgument("jump_times must be positive".into()));
        }
        Ok(Self {
            jump_times,
            values,
            initial,
        })
    }

    pub fn constant(value: f64) -> Self {
        Self {
            jump_times: Vec::new(),
            values: Vec::new(),
            initial: value,
        }
    }

    pub fn jump_times(&self) -> &[f64] {
        &self.jump_times
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn initial_value(&self) -> f64 {
        self.initial
    }

    pub fn final_value(&self) -> f64 {
        self.values.last().copied().unwrap_or(self.initial)
    }

    /// `f(t)`.
    pub fn eval(&self, t: f64) -> f64 {
        let idx = self.jump_times.partition_point(|&x| x <= t);
        self.value_before_index(idx)
    }

    /// `f(t-)`.
    pub fn left_limit(&self, t: f64) -> f64 {
        let idx = self.jump_times.partition_point(|&x| x < t);
        self.value_before_index(idx)
    }

    /// `f±(t) = (f(t) + f(t-)) / 2`.
    pub fn normalized(&self, t: f64) -> f64 {
        0.5 * (self.eval(t) + self.left_limit(t))
    }

    /// Value on the interval ending just before `jump_times[idx]`.
    fn value_before_index(&self, idx: usize) -> f64 {
        if idx == 0 {
            self.initial
        } else {
            self.values[idx - 1]
        }
    }

    /// `(t, f(t-), f(t))` at every jump time, in increasing order.
    pub fn steps(&self) -> impl Iterator<Item = (f64, f64, f64)> + '_ {
        self.jump_times.iter().enumerate().map(move |(i, &t)| {
            let before = self.value_before_index(i);
            (t, before, self.values[i])
        })
    }

    /// `(t, Δf(t))` at every jump time.
    pub fn jumps(&self) -> impl Iterator<Item = (f64, f64)> + '_ {
        self.steps().map(|(t, before, after)| (t, after - before))
    }
}

/// Aggregated counting-process increments at the distinct event times.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct CountingProcesses {
    pub event_times: Vec<f64>,
    /// `ΔN(u)`, number of deaths at each event time.
    pub events: Vec<u32>,
    /// `Y(u) = #{X ≥ u}`.
    pub at_risk: Vec<u32>,
}

impl CountingProcesses {
    pub fn len(&self) -> usize {
        self.event_times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.event_times.is_empty()
    }

    /// `(u, ΔN(u), Y(u))` triples.
    pub fn iter(&self) -> impl Iterator<Item = (f64, u32, u32)> + '_ {
        self.event_times
            .iter()
            .zip(&self.events)
            .zip(&self.at_risk)
            .map(|((&t, &d), &y)| (t, d, y))
    }
}

fn by_time(a: &Observation, b: &Observation) -> Ordering {
    a.time.total_cmp(&b.time)
}

/// Counting-process summary of any collection of observations.
///
/// Used directly by the resampling code, whose replicate groups are not
/// wrapped in [`Sample`].
pub fn counting_from_observations(observations: &[Observation]) -> CountingProcesses {
    let mut sorted = observations.to_vec();
    sorted.sort_unstable_by(by_time);
    let n = sorted.len();
    let mut cp = CountingProcesses::default();
    let mut i = 0;
    while i < n {
        let t = sorted[i].time;
        let mut j = i;
        let mut deaths = 0u32;
        while j < n && sorted[j].time == t {
            deaths += u32::from(sorted[j].event);
            j += 1;
        }
        if deaths > 0 {
            cp.event_times.push(t);
            cp.events.push(deaths);
            cp.at_risk.push((n - i) as u32);
        }
        i = j;
    }
    cp
}

pub fn counting_processes(sample: &Sample) -> CountingProcesses {
    counting_from_observations(sample.observations())
}

/// Kaplan-Meier curve of one group together with the counting processes it
/// was built from.
#[derive(Debug, Clone, PartialEq)]
pub struct KaplanMeierFit {
    pub survival: StepFunction,
    pub counting: CountingProcesses,
    pub n: usize,
}

impl KaplanMeierFit {
    pub fn from_counting(counting: CountingProcesses, n: usize) -> Self {
        let mut s = 1.0;
        let values = counting
            .iter()
            .map(|(_, d, y)| {
                s = if d == y { 0.0 } else { s * (1.0 - f64::from(d) / f64::from(y)) };
                s
            })
            .collect();
        let survival = StepFunction {
            jump_times: counting.event_times.clone(),
            values,
            initial: 1.0,
        };
        Self {
            survival,
            counting,
            n,
        }
    }

    pub fn from_observations(observations: &[Observation]) -> Self {
        Self::from_counting(counting_from_observations(observations), observations.len())
    }

    /// `Ŝ(t)`.
    pub fn eval(&self, t: f64) -> f64 {
        self.survival.eval(t)
    }

    /// `Ŝ±(t) = (Ŝ(t) + Ŝ(t-)) / 2`.
    pub fn normalized(&self, t: f64) -> f64 {
        self.survival.normalized(t)
    }

    pub fn has_events(&self) -> bool {
        !self.counting.is_empty()
    }
}

pub fn kaplan_meier(sample: &Sample) -> KaplanMeierFit {
    KaplanMeierFit::from_observations(sample.observations())
}

/// Nelson-Aalen cumulative hazard `Λ̂(t) = Σ_{u ≤ t} ΔN(u) / Y(u)`.
pub fn nelson_aalen(sample: &Sample) -> StepFunction {
    let cp = counting_processes(sample);
    let mut acc = 0.0;
    let values = cp
        .iter()
        .map(|(_, d, y)| {
            acc += f64::from(d) / f64::from(y);
            acc
        })
        .collect();
    StepFunction {
        jump_times: cp.event_times,
        values,
        initial: 0.0,
    }
}
