//! Plug-in variance estimator for `√(n1 n2 / n) (p̂ - p)`.
//!
//! Each group contributes the Greenwood-type covariance kernel
//!
//! `Γ̂(u, v) = Ŝ(u) Ŝ(v) H(u ∧ v)`, `H(t) = Σ_{u ≤ t} ΔN(u) / ((1 - ΔN(u)/Y(u)) Y(u)²)`,
//!
//! in its normalized form `Γ̂±±`, integrated twice against the jumps of the
//! other group's Kaplan-Meier curve. A term with `ΔN = Y` (the curve drops
//! to zero) contributes nothing to `H`.

use crate::effect::check_horizons;
use crate::error::Result;
use crate::survival::{kaplan_meier, KaplanMeierFit, Sample, StepFunction};

/// A time point approached from the right (`t`) or from the left (`t-`).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Point {
    pub time: f64,
    pub left: bool,
}

impl Point {
    pub fn at(time: f64) -> Self {
        Self { time, left: false }
    }

    pub fn before(time: f64) -> Self {
        Self { time, left: true }
    }

    /// `t-` precedes `t` at equal times.
    fn min(self, other: Self) -> Self {
        match self.time.total_cmp(&other.time) {
            std::cmp::Ordering::Less => self,
            std::cmp::Ordering::Greater => other,
            std::cmp::Ordering::Equal => Self {
                time: self.time,
                left: self.left || other.left,
            },
        }
    }
}

fn eval_at(f: &StepFunction, p: Point) -> f64 {
    if p.left {
        f.left_limit(p.time)
    } else {
        f.eval(p.time)
    }
}

#[derive(Debug, Clone)]
pub struct CovKernel<'a> {
    pub fit: &'a KaplanMeierFit,
    /// Cumulative `H` as a step function over the event times.
    pub cumulative: StepFunction,
}

impl CovKernel<'_> {
    /// `Γ̂(u, v)`, left limits applied jointly to `Ŝ` and `H`.
    pub fn gamma(&self, u: Point, v: Point) -> f64 {
        let s = &self.fit.survival;
        eval_at(s, u) * eval_at(s, v) * eval_at(&self.cumulative, u.min(v))
    }

    /// `Γ̂±±(u, v) = ¼ [Γ̂(u, v) + Γ̂(u-, v) + Γ̂(u, v-) + Γ̂(u-, v-)]`.
    pub fn normalized(&self, u: f64, v: f64) -> f64 {
        0.25 * (self.gamma(Point::at(u), Point::at(v))
            + self.gamma(Point::before(u), Point::at(v))
            + self.gamma(Point::at(u), Point::before(v))
            + self.gamma(Point::before(u), Point::before(v)))
    }
}

pub fn cov_kernel(fit: &KaplanMeierFit) -> CovKernel<'_> {
    let mut h = 0.0;
    let values = fit
        .counting
        .iter()
        .map(|(_, d, y)| {
            if d < y {
                let (d, y) = (f64::from(d), f64::from(y));
                h += d / ((1.0 - d / y) * y * y);
            }
            h
        })
        .collect();
    let cumulative = StepFunction::new(fit.counting.event_times.clone(), values, 0.0)
        .expect("event times are strictly increasing");
    CovKernel { fit, cumulative }
}

pub fn normalized_kernel_value(kernel: &CovKernel<'_>, u: f64, v: f64) -> f64 {
    kernel.normalized(u, v)
}

/// `Σ_u Σ_v Γ̂j±±(u, v) ΔŜk(u) ΔŜk(v)` over the jump times of `Ŝk`.
///
/// For `u < v` the kernel factorizes as `½ B(u) Ŝj±(v)` with
/// `B(u) = Ŝj(u) H(u) + Ŝj(u-) H(u-)`, so the off-diagonal part collapses to
/// a suffix sum and the whole double sum costs `O(m)` after the `O(m log m)`
/// evaluation of the factors. Every term is nonnegative.
pub fn sigma2_jk(kernel_j: &CovKernel<'_>, fit_k: &KaplanMeierFit) -> f64 {
    let s = &kernel_j.fit.survival;
    let h = &kernel_j.cumulative;
    let mut suffix = 0.0;
    let mut total = 0.0;
    let jumps: Vec<(f64, f64)> = fit_k.survival.jumps().collect();
    for &(u, a) in jumps.iter().rev() {
        let (s_u, s_l) = (s.eval(u), s.left_limit(u));
        let (h_u, h_l) = (h.eval(u), h.left_limit(u));
        let diag = 0.25 * (s_u * s_u * h_u + 2.0 * s_u * s_l * h_l + s_l * s_l * h_l);
        let b = s_u * h_u + s_l * h_l;
        total += diag * a * a + b * a * suffix;
        suffix += 0.5 * (s_u + s_l) * a;
    }
    total
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct VarianceEstimate {
    /// `σ̂²₁₂`: group 1 kernel against the jumps of `Ŝ2`.
    pub sigma2_12: f64,
    /// `σ̂²₂₁`: group 2 kernel against the jumps of `Ŝ1`.
    pub sigma2_21: f64,
    /// `(n1 n2 / n) (σ̂²₁₂ + σ̂²₂₁)`.
    pub sigma2: f64,
    pub sigma: f64,
}

pub fn variance_from_fits(f1: &KaplanMeierFit, f2: &KaplanMeierFit) -> VarianceEstimate {
    let sigma2_12 = sigma2_jk(&cov_kernel(f1), f2);
    let sigma2_21 = sigma2_jk(&cov_kernel(f2), f1);
    let (n1, n2) = (f1.n as f64, f2.n as f64);
    let sigma2 = n1 * n2 / (n1 + n2) * (sigma2_12 + sigma2_21);
    VarianceEstimate {
        sigma2_12,
        sigma2_21,
        sigma2,
        sigma: sigma2.sqrt(),
    }
}

pub fn variance_estimate(s1: &Sample, s2: &Sample) -> Result<VarianceEstimate> {
    check_horizons(s1, s2)?;
    Ok(variance_from_fits(&kaplan_meier(s1), &kaplan_meier(s2)))
}
