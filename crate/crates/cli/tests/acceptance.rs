//! Acceptance checks for the library and the `survcmp` binary.
//!
//! Runs every criterion, prints one PASS/FAIL line each and exits non-zero
//! if any failed. Pass criterion numbers as arguments to run a subset, e.g.
//! `cargo test --test acceptance -- 1 4 10`.

use std::panic;
use std::process::Command;
use std::time::{Duration, Instant};

use rand::Rng;
use survcmp::effect::{integration_by_parts_value, mann_whitney_effect, uncensored_pairwise_oracle, wilcoxon_integral};
use survcmp::inference::{asymptotic, Alternative, Target, TwoSampleAnalysis};
use survcmp::resampling::{inference_from_replicates, pool, generate_replicates, resampling_inference, ResamplingPlan, Scheme};
use survcmp::rng::{derive_key, stream_rng};
use survcmp::sim::{
    coverage_study, truncation_proportions, variance_consistency, CensoringLevel, ExceedanceBasis, ScenarioConfig,
    Setup,
};
use survcmp::survival::{kaplan_meier, BeyondHorizon, Observation, Sample};
use survcmp_cli::{read_csv, ColumnMapping, Dataset};

const TONGUE: &str = include_str!("../data/tongue.csv");

struct Check {
    pass: bool,
    detail: String,
}

fn check(pass: bool, detail: impl Into<String>) -> Check {
    Check {
        pass,
        detail: detail.into(),
    }
}

fn workers() -> usize {
    std::thread::available_parallelism().map_or(1, |n| n.get())
}

fn tongue() -> Dataset {
    read_csv(TONGUE.as_bytes(), &ColumnMapping::default(), 200.0, BeyondHorizon::Censor).expect("bundled data")
}

fn within(x: f64, target: f64, tol: f64) -> bool {
    (x - target).abs() <= tol
}

fn tongue_point_estimate() -> Check {
    let start = Instant::now();
    let d = tongue();
    let a = mann_whitney_effect(&d.first, &d.second).unwrap();
    let elapsed = start.elapsed();
    let again = mann_whitney_effect(&tongue().first, &tongue().second).unwrap();
    let ok = within(a.p_hat, 0.6148, 0.0005)
        && a.p_hat == again.p_hat
        && (a.n1, a.n2) == (52, 28)
        && elapsed < Duration::from_secs(1);
    check(ok, format!("p_hat = {:.6} (n1 = {}, n2 = {}, {:?})", a.p_hat, a.n1, a.n2, elapsed))
}

fn tongue_asymptotic() -> Check {
    let d = tongue();
    let a = TwoSampleAnalysis::new(&d.first, &d.second).unwrap();
    let two = asymptotic(&a, 0.05, Target::P, Alternative::TwoSided).unwrap().interval;
    let one = asymptotic(&a, 0.05, Target::P, Alternative::Greater).unwrap().interval;
    let ok = within(two.lower, 0.475, 0.001) && within(two.upper, 0.755, 0.001) && within(one.lower, 0.497, 0.001);
    check(
        ok,
        format!(
            "two-sided [{:.4}, {:.4}] (want [0.475, 0.755] +/- 0.001), one-sided lower {:.4} (want 0.497 +/- 0.001), sigma^2 = {:.5}",
            two.lower, two.upper, one.lower, a.variance.sigma2
        ),
    )
}

fn tongue_resampling() -> Check {
    let start = Instant::now();
    let d = tongue();
    let mut ok = true;
    let mut parts = Vec::new();
    for (scheme, want) in [(Scheme::Bootstrap, [0.457, 0.772]), (Scheme::Permutation, [0.464, 0.766])] {
        let plan = ResamplingPlan::new(scheme, 9999, 1).with_workers(workers());
        let r = resampling_inference(&d.first, &d.second, &plan, 0.05, Target::P, Alternative::TwoSided).unwrap();
        let (lo, hi) = (r.interval.lower, r.interval.upper);
        ok &= within(lo, want[0], 0.015) && within(hi, want[1], 0.015);
        parts.push(format!("{scheme} [{lo:.4}, {hi:.4}] (want [{}, {}] +/- 0.015)", want[0], want[1]));
    }
    let elapsed = start.elapsed();
    ok &= elapsed < Duration::from_secs(60);
    check(ok, format!("{}, {:?}", parts.join(", "), elapsed))
}

fn sample(obs: Vec<Observation>, k: f64) -> Sample {
    Sample::truncate(&obs, k).unwrap()
}

fn uncensored_oracle() -> Check {
    let mut rng = stream_rng(404, 0);
    let mut worst: f64 = 0.0;
    let cases = 300;
    for _ in 0..cases {
        let draw = |rng: &mut survcmp::rng::StreamRng| {
            let n = rng.random_range(1..=12);
            (0..n).map(|_| Observation::event(f64::from(rng.random_range(1..=5u32)))).collect::<Vec<_>>()
        };
        let (a, b) = (draw(&mut rng), draw(&mut rng));
        let (s1, s2) = (sample(a, 10.0), sample(b, 10.0));
        let p = mann_whitney_effect(&s1, &s2).unwrap().p_hat;
        worst = worst.max((p - uncensored_pairwise_oracle(&s1, &s2).unwrap()).abs());
    }
    check(worst <= 1e-12, format!("{cases} tied sample pairs, max |p_hat - oracle| = {worst:.2e}"))
}

fn integration_by_parts() -> Check {
    let mut rng = stream_rng(505, 0);
    let k = 10.0;
    let mut worst: f64 = 0.0;
    let cases = 300;
    for _ in 0..cases {
        let draw = |rng: &mut survcmp::rng::StreamRng| {
            let n = rng.random_range(1..=15);
            (0..n)
                .map(|_| {
                    let t = if rng.random_bool(0.5) {
                        f64::from(rng.random_range(1..=9u32))
                    } else {
                        rng.random_range(0.01..9.99)
                    };
                    Observation::new(t, rng.random_bool(0.6))
                })
                .collect::<Vec<_>>()
        };
        let (s1, s2) = (sample(draw(&mut rng), k), sample(draw(&mut rng), k));
        let direct = wilcoxon_integral(&kaplan_meier(&s1).survival, &kaplan_meier(&s2).survival);
        worst = worst.max((direct - integration_by_parts_value(&s1, &s2).unwrap()).abs());
    }
    check(worst <= 1e-10, format!("{cases} censored sample pairs below K, max difference = {worst:.2e}"))
}

/// Geometric law on {1, ..., 5} with success probability 0.35, renormalized.
fn discrete_time<R: Rng>(rng: &mut R) -> f64 {
    let q: f64 = 0.35;
    let weights: Vec<f64> = (0..5).map(|i| q * (1.0 - q).powi(i)).collect();
    let total: f64 = weights.iter().sum();
    let mut u = rng.random::<f64>() * total;
    for (i, w) in weights.iter().enumerate() {
        if u < *w {
            return (i + 1) as f64;
        }
        u -= w;
    }
    5.0
}

fn permutation_exactness() -> Check {
    let start = Instant::now();
    let (reps, b, n, alpha, k, rate) = (2000u64, 999, 8, 0.05, 5.0, 0.15);
    let seed = 606;
    let mut rejected = 0;
    let mut used = 0;
    for r in 0..reps {
        let key = derive_key(seed, r);
        let mut rng = stream_rng(key, 0);
        let group = |rng: &mut survcmp::rng::StreamRng| {
            let obs: Vec<Observation> = (0..n)
                .map(|_| {
                    let t = discrete_time(rng);
                    let c = -(1.0 - rng.random::<f64>()).ln() / rate;
                    if c < t {
                        Observation::censored(c)
                    } else {
                        Observation::event(t)
                    }
                })
                .collect();
            sample(obs, k)
        };
        let (s1, s2) = (group(&mut rng), group(&mut rng));
        let Ok(analysis) = TwoSampleAnalysis::new(&s1, &s2) else { continue };
        if analysis.null_statistic(Target::P).is_err() {
            continue;
        }
        let plan = ResamplingPlan::new(Scheme::Permutation, b, derive_key(key, 2));
        let set = generate_replicates(&pool(&s1, &s2).unwrap(), &plan.with_workers(workers()), Target::P).unwrap();
        let Ok(res) = inference_from_replicates(&analysis, &set, &plan, alpha, Target::P, Alternative::TwoSided) else {
            continue;
        };
        used += 1;
        rejected += usize::from(res.reject);
    }
    let rate_pct = 100.0 * rejected as f64 / used as f64;
    let elapsed = start.elapsed();
    let ok = (3.7..=6.3).contains(&rate_pct) && elapsed < Duration::from_secs(300);
    check(
        ok,
        format!(
            "two-sided rejection rate {rate_pct:.2}% over {used} data sets ({} degenerate skipped), want [3.7, 6.3], {elapsed:?}",
            reps as usize - used
        ),
    )
}

fn coverage_reproduction() -> Check {
    let start = Instant::now();
    let small = ScenarioConfig {
        setup: Setup::One,
        censoring: CensoringLevel::Strong,
        n1: 10,
        n2: 10,
        alpha: 0.05,
        reps: 2000,
        b: 999,
        seed: 7,
    };
    let large = ScenarioConfig {
        setup: Setup::Three,
        censoring: CensoringLevel::None,
        n1: 30,
        n2: 30,
        ..small
    };
    let a = coverage_study(&small, workers()).unwrap();
    let b = coverage_study(&large, workers()).unwrap();
    let ok_a = within(a.cov_asymptotic, 90.63, 1.8) && within(a.cov_permutation, 94.95, 1.5);
    let ok_b = within(b.cov_asymptotic, 94.95, 1.5)
        && within(b.cov_bootstrap, 94.05, 1.5)
        && within(b.cov_permutation, 94.64, 1.5);
    let elapsed = start.elapsed();
    check(
        ok_a && ok_b && elapsed < Duration::from_secs(1200),
        format!(
            "setup 1 strong 10/10: I_n {:.2} (want 90.63 +/- 1.8), I_n^pi {:.2} (want 94.95 +/- 1.5), {} excluded; \
             setup 3 none 30/30: {:.2} / {:.2} / {:.2} (want 94.95 / 94.05 / 94.64 +/- 1.5); {:?}",
            a.cov_asymptotic,
            a.cov_permutation,
            a.excluded,
            b.cov_asymptotic,
            b.cov_bootstrap,
            b.cov_permutation,
            elapsed
        ),
    )
}

fn exceedance_table() -> Check {
    let (g1, g2) =
        truncation_proportions(Setup::Two, CensoringLevel::Strong, 10_000, ExceedanceBasis::Observed, 1).unwrap();
    check(
        within(g1, 12.16, 1.0) && within(g2, 10.44, 1.0),
        format!("setup 2 strong: {g1:.2} / {g2:.2} (want 12.16 / 10.44 +/- 1.0)"),
    )
}

fn variance_consistency_check() -> Check {
    let config = ScenarioConfig {
        setup: Setup::Three,
        censoring: CensoringLevel::None,
        n1: 200,
        n2: 200,
        reps: 5000,
        seed: 909,
        ..ScenarioConfig::default()
    };
    let c = variance_consistency(&config, workers()).unwrap();
    let rel = c.median_sigma2 / c.empirical_variance - 1.0;
    check(
        rel.abs() <= 0.15,
        format!(
            "median sigma^2 {:.5} vs empirical Var(V_n) {:.5} ({:+.1}%, want within 15%)",
            c.median_sigma2,
            c.empirical_variance,
            100.0 * rel
        ),
    )
}

fn run_binary(args: &[&str]) -> Vec<u8> {
    let out = Command::new(env!("CARGO_BIN_EXE_survcmp")).args(args).output().expect("binary runs");
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    out.stdout
}

fn determinism() -> Check {
    let analyze = [
        "analyze", "--k", "200", "--method", "all", "--target", "both", "--b", "999", "--seed", "11", "--json",
    ];
    let simulate = [
        "simulate", "--setup", "1", "--censoring", "strong", "--n1", "10", "--n2", "10", "--reps", "40", "--b", "99",
        "--seed", "3", "--json",
    ];
    let mut ok = true;
    for base in [&analyze[..], &simulate[..]] {
        let runs: Vec<Vec<u8>> = ["1", "2", "5"]
            .iter()
            .map(|w| run_binary(&[base, &["--workers", w]].concat()))
            .collect();
        ok &= runs.windows(2).all(|p| p[0] == p[1]) && !runs[0].is_empty();
    }
    check(ok, "analyze and simulate JSON byte-identical for --workers 1, 2, 5")
}

fn main() {
    let criteria: [(u8, &str, fn() -> Check); 10] = [
        (1, "tongue point estimate", tongue_point_estimate),
        (2, "tongue asymptotic intervals", tongue_asymptotic),
        (3, "tongue resampling intervals", tongue_resampling),
        (4, "uncensored mid-rank oracle", uncensored_oracle),
        (5, "integration-by-parts identity", integration_by_parts),
        (6, "permutation test near-exactness", permutation_exactness),
        (7, "coverage reproduction", coverage_reproduction),
        (8, "exceedance proportions", exceedance_table),
        (9, "variance consistency", variance_consistency_check),
        (10, "determinism across workers", determinism),
    ];
    let selected: Vec<u8> = std::env::args().skip(1).filter_map(|a| a.parse().ok()).collect();
    let mut failed = Vec::new();
    for (id, title, run) in criteria {
        if !selected.is_empty() && !selected.contains(&id) {
            continue;
        }
        let outcome = panic::catch_unwind(run).unwrap_or_else(|e| {
            let msg = e
                .downcast_ref::<String>()
                .cloned()
                .or_else(|| e.downcast_ref::<&str>().map(|s| s.to_string()))
                .unwrap_or_default();
            check(false, format!("panicked: {msg}"))
        });
        let status = if outcome.pass { "PASS" } else { "FAIL" };
        println!("criterion {id:>2} {status}  {title}: {}", outcome.detail);
        if !outcome.pass {
            failed.push(id);
        }
    }
    if failed.is_empty() {
        println!("acceptance: all criteria passed");
    } else {
        println!("acceptance: failed criteria {failed:?}");
        std::process::exit(1);
    }
}
