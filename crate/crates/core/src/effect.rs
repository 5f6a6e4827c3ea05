//! The Mann-Whitney effect estimate `p̂ = -∫ Ŝ1± dŜ2` and the win ratio.
//!
//! Both factors are step functions, so the integral is an exact finite sum
//! over the jumps of `Ŝ2` (jumps at the horizon included). Mass that `Ŝ2`
//! keeps at the horizon, because its largest observation is censored,
//! contributes nothing; in that case `p̂(1, 2) + p̂(2, 1) < 1`.

use crate::error::{Error, Result};
use crate::survival::{kaplan_meier, KaplanMeierFit, Sample, StepFunction};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EffectEstimate {
    pub p_hat: f64,
    /// `p̂ / (1 - p̂)`; `+∞` under complete separation (`p̂ = 1`).
    pub w_hat: f64,
    pub n1: usize,
    pub n2: usize,
}

impl EffectEstimate {
    pub fn new(p_hat: f64, n1: usize, n2: usize) -> Self {
        Self {
            p_hat,
            w_hat: win_ratio(p_hat),
            n1,
            n2,
        }
    }

    pub fn w_is_infinite(&self) -> bool {
        self.w_hat.is_infinite()
    }
}

pub fn win_ratio(p: f64) -> f64 {
    if p >= 1.0 {
        f64::INFINITY
    } else {
        p / (1.0 - p)
    }
}

/// `-∫ f± dg = Σ_u f±(u) (-Δg(u))` over the jump times `u` of `g`.
pub fn wilcoxon_integral(f: &StepFunction, g: &StepFunction) -> f64 {
    g.jumps().map(|(u, dg)| f.normalized(u) * -dg).sum()
}

pub(crate) fn check_horizons(s1: &Sample, s2: &Sample) -> Result<()> {
    if s1.horizon() == s2.horizon() {
        Ok(())
    } else {
        Err(Error::IncompatibleHorizons(s1.horizon(), s2.horizon()))
    }
}

pub fn effect_from_fits(f1: &KaplanMeierFit, f2: &KaplanMeierFit) -> EffectEstimate {
    EffectEstimate::new(wilcoxon_integral(&f1.survival, &f2.survival), f1.n, f2.n)
}

pub fn mann_whitney_effect(s1: &Sample, s2: &Sample) -> Result<EffectEstimate> {
    check_horizons(s1, s2)?;
    Ok(effect_from_fits(&kaplan_meier(s1), &kaplan_meier(s2)))
}

/// Mid-rank pair count `(1 / n1 n2) Σ_i Σ_l [1{t1 > t2} + ½ 1{t1 = t2}]`.
/// Only meaningful without censoring; serves as a test oracle.
pub fn uncensored_pairwise_oracle(s1: &Sample, s2: &Sample) -> Result<f64> {
    if !(s1.is_uncensored() && s2.is_uncensored()) {
        return Err(Error::CensoredInOracle);
    }
    let mut score = 0.0;
    for a in s1.observations() {
        for b in s2.observations() {
            if a.time > b.time {
                score += 1.0;
            } else if a.time == b.time {
                score += 0.5;
            }
        }
    }
    Ok(score / (s1.len() * s2.len()) as f64)
}

/// `Σ_u f(u) Δg(u)` over the jumps of `g`, i.e. `∫ f dg` with right-continuous `f`.
fn stieltjes(f: &StepFunction, g: &StepFunction) -> f64 {
    g.jumps().map(|(u, dg)| f.eval(u) * dg).sum()
}

/// Integration-by-parts representation of the effect,
///
/// `½ - ½ ∫ Ŝ1 dŜ2 + ½ ∫ Ŝ2 dŜ1 - ½ Ŝ1(K) Ŝ2(K)`,
///
/// built from right-continuous values only. The boundary term vanishes when
/// either curve is exhausted at `K`, and then jumps at `K` cancel between the
/// two integrals, leaving the half-open `[0, K)` form. Equals `p̂` for all data.
pub fn integration_by_parts_value(s1: &Sample, s2: &Sample) -> Result<f64> {
    check_horizons(s1, s2)?;
    let k = s1.horizon();
    let a = kaplan_meier(s1).survival;
    let b = kaplan_meier(s2).survival;
    Ok(0.5 - 0.5 * stieltjes(&a, &b) + 0.5 * stieltjes(&b, &a) - 0.5 * a.eval(k) * b.eval(k))
}
