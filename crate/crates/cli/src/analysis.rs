//! The `analyze` command: estimation, intervals and tests on one data set,
//! rendered as JSON or as an aligned text table.

use std::fmt::Write as _;

use serde::{Deserialize, Serialize};
use survcmp::inference::{asymptotic, Alternative, InferenceResult, Method, Target, TwoSampleAnalysis};
use survcmp::resampling::{generate_replicates, inference_from_replicates, pool, ReplicateSet, ResamplingPlan, Scheme};

use crate::ingest::Dataset;

#[derive(Debug, Clone, PartialEq)]
pub struct AnalysisRequest {
    pub alpha: f64,
    pub methods: Vec<Method>,
    pub targets: Vec<Target>,
    pub alternative: Alternative,
    pub b: usize,
    pub seed: u64,
    pub workers: usize,
}

impl Default for AnalysisRequest {
    fn default() -> Self {
        Self {
            alpha: 0.05,
            methods: vec![Method::Asymptotic, Method::Bootstrap, Method::Permutation],
            targets: vec![Target::P],
            alternative: Alternative::TwoSided,
            b: 1999,
            seed: 1,
            workers: 1,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MethodReport {
    pub name: String,
    pub target: String,
    /// Interval bounds; `null` stands for an infinite bound.
    pub ci: [Option<f64>; 2],
    pub statistic: f64,
    pub p_value: f64,
    pub reject: bool,
    pub b: Option<usize>,
    pub dropped: Option<usize>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Report {
    pub groups: [String; 2],
    pub n1: usize,
    pub n2: usize,
    pub k: f64,
    pub p_hat: f64,
    /// `null` when the win ratio is infinite (see `w_infinite`).
    pub w_hat: Option<f64>,
    pub w_infinite: bool,
    pub sigma_hat: f64,
    pub alpha: f64,
    pub alternative: String,
    pub methods: Vec<MethodReport>,
    pub seed: u64,
}

fn finite(x: f64) -> Option<f64> {
    x.is_finite().then_some(x)
}

fn method_report(r: &InferenceResult) -> MethodReport {
    MethodReport {
        name: r.method.to_string(),
        target: r.target.to_string(),
        ci: [finite(r.interval.lower), finite(r.interval.upper)],
        statistic: r.statistic,
        p_value: r.p_value,
        reject: r.reject,
        b: r.resampling.map(|s| s.replicates),
        dropped: r.resampling.map(|s| s.dropped),
    }
}

/// Replicate statistics kept for export, labelled `method_target`.
pub type ReplicateDump = Vec<(String, ReplicateSet)>;

pub fn analyze(data: &Dataset, req: &AnalysisRequest) -> anyhow::Result<(Report, ReplicateDump)> {
    let analysis = TwoSampleAnalysis::new(&data.first, &data.second)?;
    let mut methods = Vec::new();
    let mut dump = Vec::new();
    for &target in &req.targets {
        for &method in &req.methods {
            let result = match method {
                Method::Asymptotic => asymptotic(&analysis, req.alpha, target, req.alternative)?,
                Method::Bootstrap | Method::Permutation => {
                    analysis.null_statistic(target)?;
                    let scheme = if method == Method::Bootstrap {
                        Scheme::Bootstrap
                    } else {
                        Scheme::Permutation
                    };
                    let plan = ResamplingPlan::new(scheme, req.b, req.seed).with_workers(req.workers);
                    let z = pool(&data.first, &data.second)?;
                    let reps = generate_replicates(&z, &plan, target)?;
                    let r = inference_from_replicates(&analysis, &reps, &plan, req.alpha, target, req.alternative)?;
                    dump.push((format!("{method}_{target}"), reps));
                    r
                }
            };
            methods.push(method_report(&result));
        }
    }
    let effect = analysis.effect;
    let report = Report {
        groups: data.labels.clone(),
        n1: effect.n1,
        n2: effect.n2,
        k: data.first.horizon(),
        p_hat: effect.p_hat,
        w_hat: finite(effect.w_hat),
        w_infinite: effect.w_is_infinite(),
        sigma_hat: analysis.variance.sigma,
        alpha: req.alpha,
        alternative: req.alternative.to_string(),
        methods,
        seed: req.seed,
    };
    Ok((report, dump))
}

fn bound(x: Option<f64>, lower: bool) -> String {
    match x {
        Some(v) => format!("{v:.4}"),
        None if lower => "-inf".into(),
        None => "inf".into(),
    }
}

pub fn render_text(r: &Report) -> String {
    let mut out = String::new();
    let w = match r.w_hat {
        Some(w) => format!("{w:.4}"),
        None => "inf".into(),
    };
    let _ = writeln!(out, "groups     {} (n1 = {}) vs {} (n2 = {})", r.groups[0], r.n1, r.groups[1], r.n2);
    let _ = writeln!(out, "horizon    K = {}", r.k);
    let _ = writeln!(out, "p_hat      {:.4}", r.p_hat);
    let _ = writeln!(out, "w_hat      {w}");
    let _ = writeln!(out, "sigma_hat  {:.4}", r.sigma_hat);
    let _ = writeln!(out, "level      {}% {}, seed {}", 100.0 * (1.0 - r.alpha), r.alternative, r.seed);
    let _ = writeln!(out);
    let _ = writeln!(
        out,
        "{:<12} {:<6} {:>9} {:>9} {:>10} {:>8} {:>6} {:>7}",
        "method", "target", "lower", "upper", "statistic", "p-value", "B", "dropped"
    );
    for m in &r.methods {
        let opt = |x: Option<usize>| x.map_or("-".to_string(), |v| v.to_string());
        let _ = writeln!(
            out,
            "{:<12} {:<6} {:>9} {:>9} {:>10.4} {:>8.4} {:>6} {:>7}",
            m.name,
            m.target,
            bound(m.ci[0], true),
            bound(m.ci[1], false),
            m.statistic,
            m.p_value,
            opt(m.b),
            opt(m.dropped)
        );
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use survcmp::survival::{Observation, Sample};

    fn data() -> Dataset {
        let a: Vec<_> = [5.0, 6.0, 7.0, 9.0].iter().map(|&t| Observation::event(t)).collect();
        let b = [Observation::event(1.0), Observation::censored(3.0), Observation::event(4.0), Observation::event(6.0)];
        Dataset {
            labels: ["a".into(), "b".into()],
            first: Sample::truncate(&a, 10.0).unwrap(),
            second: Sample::truncate(&b, 10.0).unwrap(),
        }
    }

    #[test]
    fn report_lists_every_method_and_target() {
        let req = AnalysisRequest {
            targets: vec![Target::P, Target::W],
            b: 99,
            ..AnalysisRequest::default()
        };
        let (report, dump) = analyze(&data(), &req).unwrap();
        assert_eq!(report.methods.len(), 6);
        assert_eq!(dump.len(), 4);
        assert_eq!(report.methods[0].b, None);
        assert_eq!(report.methods[1].b, Some(99));
        let text = render_text(&report);
        assert!(text.contains("permutation"));
    }

    #[test]
    fn infinite_win_ratio_is_null() {
        let a = Sample::truncate(&[Observation::event(5.0), Observation::event(6.0)], 10.0).unwrap();
        let b = Sample::truncate(&[Observation::event(1.0), Observation::event(2.0)], 10.0).unwrap();
        let d = Dataset {
            labels: ["1".into(), "2".into()],
            first: a,
            second: b,
        };
        // Complete separation also leaves no variance to studentize with.
        let asy = AnalysisRequest {
            methods: vec![Method::Asymptotic],
            ..AnalysisRequest::default()
        };
        assert!(analyze(&d, &asy).unwrap_err().to_string().contains("degenerate variance"));
        let req = AnalysisRequest {
            methods: vec![],
            ..AnalysisRequest::default()
        };
        let (r, _) = analyze(&d, &req).unwrap();
        assert_eq!((r.w_hat, r.w_infinite), (None, true));
        let json = serde_json::to_string(&r).unwrap();
        assert!(json.contains("\"w_hat\":null"));
    }
}
