//! Nonparametric inference for the Mann-Whitney effect
//! `p = P(T1 > T2) + P(T1 = T2) / 2` and the win ratio `w = p / (1 - p)`
//! from two independent, right-censored and possibly tied survival samples.
//!
//! The crate is organised bottom-up:
//!
//! - [`survival`]: samples, counting processes, Kaplan-Meier and
//!   Nelson-Aalen step functions (ties aggregated, truncation at a horizon).
//! - [`effect`]: the point estimate `p̂ = -∫ Ŝ1± dŜ2` and its test oracles.
//! - [`variance`]: the plug-in variance estimator built from the
//!   Greenwood-type covariance kernel of each Kaplan-Meier curve.
//! - [`inference`]: studentized statistics, normal-quantile intervals and tests.
//! - [`resampling`]: pooled bootstrap and studentized permutation procedures.
//! - [`sim`]: the Monte-Carlo coverage study harness.
//!
//! ```
//! use survcmp::survival::{Observation, Sample};
//! use survcmp::effect::mann_whitney_effect;
//!
//! let k = 10.0;
//! let a = Sample::truncate(&[Observation::event(4.0), Observation::censored(6.0)], k).unwrap();
//! let b = Sample::truncate(&[Observation::event(2.0), Observation::event(5.0)], k).unwrap();
//! let est = mann_whitney_effect(&a, &b).unwrap();
//! assert!(est.p_hat > 0.5);
//! ```

pub mod effect;
pub mod error;
pub mod inference;
pub mod resampling;
pub mod rng;
pub mod sim;
pub mod survival;
pub mod variance;

pub use error::{Error, Result};
