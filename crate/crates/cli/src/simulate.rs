//! The `simulate` command: coverage studies and exceedance tables.

use std::fmt::Write as _;

use serde::{Deserialize, Serialize};
use survcmp::sim::{
    coverage_study, coverage_table, coverage_tsv, truncation_proportions, CensoringLevel, CoverageRow,
    ExceedanceBasis, ScenarioConfig, Setup,
};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Format {
    Text,
    Tsv,
    Json,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CoverageRecord {
    pub setup: u8,
    pub censoring: String,
    pub n1: usize,
    pub n2: usize,
    pub alpha: f64,
    pub reps: usize,
    pub b: usize,
    pub seed: u64,
    pub cov_asymptotic: f64,
    pub cov_bootstrap: f64,
    pub cov_permutation: f64,
    pub reps_used: usize,
    pub excluded: usize,
    pub true_p: f64,
    pub censoring_rates: [f64; 2],
    pub censored_percent: [f64; 2],
}

fn record(config: &ScenarioConfig, row: &CoverageRow) -> CoverageRecord {
    let c = row.calibration;
    CoverageRecord {
        setup: row.setup.id(),
        censoring: row.censoring.to_string(),
        n1: row.n1,
        n2: row.n2,
        alpha: config.alpha,
        reps: config.reps,
        b: config.b,
        seed: config.seed,
        cov_asymptotic: row.cov_asymptotic,
        cov_bootstrap: row.cov_bootstrap,
        cov_permutation: row.cov_permutation,
        reps_used: row.reps_used,
        excluded: row.excluded,
        true_p: row.true_p,
        censoring_rates: [c.rate1, c.rate2],
        censored_percent: [c.achieved1, c.achieved2],
    }
}

pub fn run_coverage(configs: &[ScenarioConfig], workers: usize, format: Format) -> anyhow::Result<String> {
    let mut rows = Vec::with_capacity(configs.len());
    for config in configs {
        rows.push(coverage_study(config, workers)?);
    }
    Ok(match format {
        Format::Text => coverage_table(&rows),
        Format::Tsv => coverage_tsv(&rows),
        Format::Json => {
            let records: Vec<CoverageRecord> = configs.iter().zip(&rows).map(|(c, r)| record(c, r)).collect();
            serde_json::to_string_pretty(&records)? + "\n"
        }
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExceedanceRecord {
    pub setup: u8,
    pub censoring: String,
    pub basis: String,
    pub subjects: usize,
    pub group1: f64,
    pub group2: f64,
}

pub fn run_table1(
    setups: &[Setup],
    levels: &[CensoringLevel],
    subjects: usize,
    basis: ExceedanceBasis,
    seed: u64,
    format: Format,
) -> anyhow::Result<String> {
    let basis_name = match basis {
        ExceedanceBasis::Observed => "observed",
        ExceedanceBasis::Latent => "latent",
    };
    let mut records = Vec::new();
    for &setup in setups {
        for &level in levels {
            let (group1, group2) = truncation_proportions(setup, level, subjects, basis, seed)?;
            records.push(ExceedanceRecord {
                setup: setup.id(),
                censoring: level.to_string(),
                basis: basis_name.into(),
                subjects,
                group1,
                group2,
            });
        }
    }
    let mut out = String::new();
    match format {
        Format::Json => out = serde_json::to_string_pretty(&records)? + "\n",
        Format::Tsv => {
            out.push_str("setup\tcensoring\tbasis\tsubjects\tgroup1\tgroup2\n");
            for r in &records {
                let _ = writeln!(out, "{}\t{}\t{}\t{}\t{:.2}\t{:.2}", r.setup, r.censoring, r.basis, r.subjects, r.group1, r.group2);
            }
        }
        Format::Text => {
            let _ = writeln!(out, "% of times above K ({basis_name} times, {subjects} subjects per group)");
            let _ = writeln!(out, "{:>5}  {:>9}  {:>15}", "setup", "censoring", "group 1 / 2");
            for r in &records {
                let _ = writeln!(
                    out,
                    "{:>5}  {:>9}  {:>15}",
                    format!("({})", r.setup),
                    r.censoring,
                    format!("{:.2} / {:.2}", r.group1, r.group2)
                );
            }
        }
    }
    Ok(out)
}
