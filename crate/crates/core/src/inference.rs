//! Studentized statistics, normal-quantile confidence intervals and tests
//! for the Mann-Whitney effect `p` and the win ratio `w`.

use std::f64::consts::{PI, SQRT_2};
use std::fmt;
use std::str::FromStr;

use statrs::function::erf::erfc;

use crate::effect::{check_horizons, effect_from_fits, EffectEstimate};
use crate::error::{Error, Result};
use crate::survival::{kaplan_meier, KaplanMeierFit, Sample};
use crate::variance::{variance_from_fits, VarianceEstimate};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default)]
pub enum Alternative {
    #[default]
    TwoSided,
    /// Evidence for `p > ½`: group 1 tends to survive longer.
    Greater,
    Less,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default)]
pub enum Target {
    #[default]
    P,
    W,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Method {
    Asymptotic,
    Bootstrap,
    Permutation,
}

macro_rules! tag_enum {
    ($ty:ty { $($variant:ident => $name:literal),+ $(,)? }) => {
        impl $ty {
            pub fn as_str(&self) -> &'static str {
                match self { $(Self::$variant => $name),+ }
            }
        }

        impl fmt::Display for $ty {
            fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
                f.write_str(self.as_str())
            }
        }

        impl FromStr for $ty {
            type Err = Error;

            fn from_str(s: &str) -> Result<Self> {
                match s {
                    $($name => Ok(Self::$variant),)+
                    other => Err(Error::InvalidArgument(format!(
                        "unknown {}: {other}", stringify!($ty).to_lowercase()
                    ))),
                }
            }
        }
    };
}

tag_enum!(Alternative { TwoSided => "two-sided", Greater => "greater", Less => "less" });
tag_enum!(Target { P => "p", W => "w" });
tag_enum!(Method { Asymptotic => "asymptotic", Bootstrap => "bootstrap", Permutation => "permutation" });

/// Confidence interval, clamped to the parameter domain, with the
/// unclamped construction kept alongside.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Interval {
    pub lower: f64,
    pub upper: f64,
    pub raw_lower: f64,
    pub raw_upper: f64,
}

impl Interval {
    fn clamped(raw_lower: f64, raw_upper: f64, target: Target) -> Self {
        let hi = match target {
            Target::P => 1.0,
            Target::W => f64::INFINITY,
        };
        Self {
            lower: raw_lower.clamp(0.0, hi),
            upper: raw_upper.clamp(0.0, hi),
            raw_lower,
            raw_upper,
        }
    }

    pub fn contains(&self, x: f64) -> bool {
        self.lower <= x && x <= self.upper
    }

    pub fn width(&self) -> f64 {
        self.upper - self.lower
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ResamplingSummary {
    pub replicates: usize,
    pub retained: usize,
    pub dropped: usize,
    pub seed: u64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct InferenceResult {
    pub method: Method,
    pub target: Target,
    pub alternative: Alternative,
    pub alpha: f64,
    pub effect: EffectEstimate,
    pub sigma: f64,
    /// `T_n(½)` for target `p`, `W_n(1)` for target `w`.
    pub statistic: f64,
    pub interval: Interval,
    pub p_value: f64,
    pub reject: bool,
    pub resampling: Option<ResamplingSummary>,
}

/// Kaplan-Meier fits, effect and variance estimates of one two-sample data set.
#[derive(Debug, Clone)]
pub struct TwoSampleAnalysis {
    pub fit1: KaplanMeierFit,
    pub fit2: KaplanMeierFit,
    pub effect: EffectEstimate,
    pub variance: VarianceEstimate,
}

impl TwoSampleAnalysis {
    pub fn new(s1: &Sample, s2: &Sample) -> Result<Self> {
        check_horizons(s1, s2)?;
        Ok(Self::from_fits(kaplan_meier(s1), kaplan_meier(s2)))
    }

    pub fn from_fits(fit1: KaplanMeierFit, fit2: KaplanMeierFit) -> Self {
        let effect = effect_from_fits(&fit1, &fit2);
        let variance = variance_from_fits(&fit1, &fit2);
        Self {
            fit1,
            fit2,
            effect,
            variance,
        }
    }

    /// `√(n1 n2 / n)`.
    pub fn root_n(&self) -> f64 {
        let (n1, n2) = (self.fit1.n as f64, self.fit2.n as f64);
        (n1 * n2 / (n1 + n2)).sqrt()
    }

    fn sigma(&self) -> Result<f64> {
        let s = self.variance.sigma;
        if s > 0.0 && s.is_finite() {
            Ok(s)
        } else {
            Err(Error::DegenerateVariance)
        }
    }

    /// `T_n(p0) = √(n1 n2 / n) (p̂ - p0) / σ̂`.
    pub fn studentized_p(&self, p0: f64) -> Result<f64> {
        Ok(self.root_n() * (self.effect.p_hat - p0) / self.sigma()?)
    }

    /// `W_n(w0) = √(n1 n2 / n) (1 - p̂)² (ŵ - w0) / σ̂`.
    pub fn studentized_w(&self, w0: f64) -> Result<f64> {
        let sigma = self.sigma()?;
        if self.effect.w_is_infinite() {
            return Err(Error::DegenerateWinRatio);
        }
        let q = 1.0 - self.effect.p_hat;
        Ok(self.root_n() * q * q * (self.effect.w_hat - w0) / sigma)
    }

    /// `W_n(w0)` written through the odds, `√(n1 n2 / n) (ŵ - w0) / (σ̂ (1 + ŵ)²)`.
    pub fn studentized_w_odds_form(&self, w0: f64) -> Result<f64> {
        let sigma = self.sigma()?;
        if self.effect.w_is_infinite() {
            return Err(Error::DegenerateWinRatio);
        }
        let w = self.effect.w_hat;
        Ok(self.root_n() * (w - w0) / (sigma * (1.0 + w) * (1.0 + w)))
    }

    /// Statistic at the null `p = ½` (`w = 1`).
    pub fn null_statistic(&self, target: Target) -> Result<f64> {
        match target {
            Target::P => self.studentized_p(0.5),
            Target::W => self.studentized_w(1.0),
        }
    }

    /// Standard error `σ̂ √(n / (n1 n2))` on the scale of the target.
    pub fn standard_error(&self, target: Target) -> Result<f64> {
        let se = self.sigma()? / self.root_n();
        match target {
            Target::P => Ok(se),
            Target::W => {
                if self.effect.w_is_infinite() {
                    return Err(Error::DegenerateWinRatio);
                }
                let q = 1.0 - self.effect.p_hat;
                Ok(se / (q * q))
            }
        }
    }

    pub fn estimate(&self, target: Target) -> f64 {
        match target {
            Target::P => self.effect.p_hat,
            Target::W => self.effect.w_hat,
        }
    }

    /// Interval `estimate ∓ c · se`. Two-sided uses `upper_crit` on both
    /// sides; `greater` gives `[estimate - upper_crit · se, max]`; `less`
    /// gives `[min, estimate - lower_crit · se]` where `lower_crit` is a
    /// lower-tail critical value (negative for symmetric laws).
    pub(crate) fn interval(
        &self,
        target: Target,
        alternative: Alternative,
        upper_crit: f64,
        lower_crit: f64,
    ) -> Result<Interval> {
        let est = self.estimate(target);
        let se = self.standard_error(target)?;
        let (lo, hi) = match alternative {
            Alternative::TwoSided => (est - upper_crit * se, est + upper_crit * se),
            Alternative::Greater => (est - upper_crit * se, f64::INFINITY),
            Alternative::Less => (f64::NEG_INFINITY, est - lower_crit * se),
        };
        Ok(Interval::clamped(lo, hi, target))
    }
}

pub fn studentized_p(s1: &Sample, s2: &Sample, p0: f64) -> Result<f64> {
    TwoSampleAnalysis::new(s1, s2)?.studentized_p(p0)
}

pub fn studentized_w(s1: &Sample, s2: &Sample, w0: f64) -> Result<f64> {
    TwoSampleAnalysis::new(s1, s2)?.studentized_w(w0)
}

/// Standard normal distribution function.
pub fn normal_cdf(x: f64) -> f64 {
    0.5 * erfc(-x / SQRT_2)
}

/// Lower-tail quantile `Φ⁻¹(prob)`: Acklam's rational approximation followed
/// by one Halley step against the erfc-based distribution function.
fn inverse_normal_cdf(prob: f64) -> f64 {
    const A: [f64; 6] = [
        -3.969683028665376e+01,
        2.209460984245205e+02,
        -2.759285104469687e+02,
        1.383577518672690e+02,
        -3.066479806614716e+01,
        2.506628277459239e+00,
    ];
    const B: [f64; 5] = [
        -5.447609879822406e+01,
        1.615858368580409e+02,
        -1.556989798598866e+02,
        6.680131188771972e+01,
        -1.328068155288572e+01,
    ];
    const C: [f64; 6] = [
        -7.784894002430293e-03,
        -3.223964580411365e-01,
        -2.400758277161838e+00,
        -2.549732539343734e+00,
        4.374664141464968e+00,
        2.938163982698783e+00,
    ];
    const D: [f64; 4] = [
        7.784695709041462e-03,
        3.224671290700398e-01,
        2.445134137142996e+00,
        3.754408661907416e+00,
    ];
    const P_LOW: f64 = 0.02425;

    let tail = |q: f64| {
        (((((C[0] * q + C[1]) * q + C[2]) * q + C[3]) * q + C[4]) * q + C[5])
            / ((((D[0] * q + D[1]) * q + D[2]) * q + D[3]) * q + 1.0)
    };
    let x = if prob < P_LOW {
        tail((-2.0 * prob.ln()).sqrt())
    } else if prob <= 1.0 - P_LOW {
        let q = prob - 0.5;
        let r = q * q;
        (((((A[0] * r + A[1]) * r + A[2]) * r + A[3]) * r + A[4]) * r + A[5]) * q
            / (((((B[0] * r + B[1]) * r + B[2]) * r + B[3]) * r + B[4]) * r + 1.0)
    } else {
        -tail((-2.0 * (1.0 - prob).ln()).sqrt())
    };

    let e = normal_cdf(x) - prob;
    let u = e * (2.0 * PI).sqrt() * (0.5 * x * x).exp();
    x - u / (1.0 + 0.5 * x * u)
}

/// Upper-`alpha` quantile `z_α` of the standard normal law.
pub fn normal_quantile(alpha: f64) -> Result<f64> {
    if !(alpha > 0.0 && alpha < 1.0) {
        return Err(Error::InvalidAlpha(alpha));
    }
    if alpha == 0.5 {
        return Ok(0.0);
    }
    Ok(-inverse_normal_cdf(alpha))
}

pub(crate) fn check_alpha(alpha: f64) -> Result<()> {
    if alpha > 0.0 && alpha < 1.0 {
        Ok(())
    } else {
        Err(Error::InvalidAlpha(alpha))
    }
}

/// Normal-quantile confidence interval for the target together with the
/// test of `p = ½` (`w = 1`) against the chosen alternative.
pub fn asymptotic(
    analysis: &TwoSampleAnalysis,
    alpha: f64,
    target: Target,
    alternative: Alternative,
) -> Result<InferenceResult> {
    check_alpha(alpha)?;
    let statistic = analysis.null_statistic(target)?;
    let (interval, p_value, reject) = match alternative {
        Alternative::TwoSided => {
            let z = normal_quantile(alpha / 2.0)?;
            (
                analysis.interval(target, alternative, z, -z)?,
                (2.0 * (1.0 - normal_cdf(statistic.abs()))).min(1.0),
                statistic.abs() > z,
            )
        }
        Alternative::Greater => {
            let z = normal_quantile(alpha)?;
            (
                analysis.interval(target, alternative, z, -z)?,
                1.0 - normal_cdf(statistic),
                statistic > z,
            )
        }
        Alternative::Less => {
            let z = normal_quantile(alpha)?;
            (
                analysis.interval(target, alternative, z, -z)?,
                normal_cdf(statistic),
                statistic < -z,
            )
        }
    };
    Ok(InferenceResult {
        method: Method::Asymptotic,
        target,
        alternative,
        alpha,
        effect: analysis.effect,
        sigma: analysis.variance.sigma,
        statistic,
        interval,
        p_value,
        reject,
        resampling: None,
    })
}
