//! Trial execution for `run`: a worker pool over trials (honors
//! RAYON_NUM_THREADS), per-trial streams derived from (master seed, n,
//! trial index), and deterministic CSV plus JSON-summary outputs ordered by
//! trial index regardless of completion order.

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use anyhow::{Context, Result};
use rayon::prelude::*;
use serde::Serialize;

use monotest_core::estimators::Estimate;
use monotest_core::random::{derive_seed, trial_rng};
use monotest_core::testers::{Decision, Phase, RunRecord};

use crate::manifest::Manifest;

pub const CSV_HEADER: &str =
    "seed,n,family,phase,decision,queries,terminal_variable,min_weight,max_weight";

/// One CSV row of the run log.
#[derive(Debug, Clone)]
pub struct TrialRow {
    pub seed: u64,
    pub n: u32,
    pub family: String,
    pub phase: Phase,
    pub decision: Decision,
    pub queries: u64,
    pub terminal_variable: Option<u32>,
    pub min_weight: Option<u32>,
    pub max_weight: Option<u32>,
}

impl TrialRow {
    fn from_record(seed: u64, family: &str, record: &RunRecord) -> TrialRow {
        TrialRow {
            seed,
            n: record.n,
            family: family.to_string(),
            phase: record.phase,
            decision: record.verdict.decision,
            queries: record.queries,
            terminal_variable: record.terminal_variable,
            min_weight: record.query_weights.map(|(lo, _)| lo),
            max_weight: record.query_weights.map(|(_, hi)| hi),
        }
    }

    pub fn to_csv_line(&self) -> String {
        fn opt<T: std::fmt::Display>(v: &Option<T>) -> String {
            v.as_ref().map(|x| x.to_string()).unwrap_or_default()
        }
        format!(
            "{},{},{},{},{},{},{},{},{}",
            self.seed,
            self.n,
            self.family,
            self.phase.as_str(),
            match self.decision {
                Decision::Accept => "accept",
                Decision::Reject => "reject",
            },
            self.queries,
            opt(&self.terminal_variable),
            opt(&self.min_weight),
            opt(&self.max_weight),
        )
    }

    pub fn parse_csv_line(line: &str) -> Result<TrialRow> {
        let fields: Vec<&str> = line.split(',').collect();
        anyhow::ensure!(
            fields.len() == 9,
            "expected 9 CSV fields, got {}",
            fields.len()
        );
        fn opt_u32(s: &str) -> Result<Option<u32>> {
            if s.is_empty() {
                Ok(None)
            } else {
                Ok(Some(s.parse()?))
            }
        }
        Ok(TrialRow {
            seed: fields[0].parse().context("seed")?,
            n: fields[1].parse().context("n")?,
            family: fields[2].to_string(),
            phase: fields[3].parse().map_err(|e| anyhow::anyhow!("phase: {e}"))?,
            decision: match fields[4] {
                "accept" => Decision::Accept,
                "reject" => Decision::Reject,
                other => anyhow::bail!("decision: unknown value {other:?}"),
            },
            queries: fields[5].parse().context("queries")?,
            terminal_variable: opt_u32(fields[6]).context("terminal_variable")?,
            min_weight: opt_u32(fields[7]).context("min_weight")?,
            max_weight: opt_u32(fields[8]).context("max_weight")?,
        })
    }
}

#[derive(Debug, Serialize)]
pub struct DimensionSummary {
    pub n: u32,
    pub trials: u64,
    pub rejects: u64,
    pub rejection_rate: f64,
    pub rejection_rate_ci99_half_width: f64,
    pub phase_counts: PhaseCounts,
    pub mean_queries: f64,
    pub max_queries: u64,
}

#[derive(Debug, Default, Serialize)]
pub struct PhaseCounts {
    pub no_pair: u64,
    pub balance_accept: u64,
    pub cap_accept: u64,
    pub edge_check: u64,
}

#[derive(Debug, Serialize)]
pub struct RunSummary {
    pub artifact_version: &'static str,
    pub csv_schema_version: u32,
    pub experiment: String,
    pub manifest_digest: String,
    pub manifest: Manifest,
    pub results: Vec<DimensionSummary>,
}

pub struct RunOutputs {
    pub csv_path: PathBuf,
    pub summary_path: PathBuf,
}

/// Executes the manifest: trials for every n, one CSV of run records, one
/// JSON summary. Identical manifest and seed give byte-identical outputs.
pub fn cmd_run(mut manifest: Manifest, seed_override: Option<u64>) -> Result<RunOutputs> {
    if let Some(seed) = seed_override {
        manifest.seed = seed;
    }
    manifest.materialize()?;
    let digest = manifest.digest();
    let fixed = manifest.function.load_fixed()?;
    let family_label = manifest.function.label();

    let mut rows: Vec<TrialRow> = Vec::new();
    let mut results = Vec::new();
    for &n in &manifest.n {
        let tester = manifest.tester.build(n)?;
        let dimension_seed = derive_seed(manifest.seed, n as u64);
        let dim_rows: Vec<TrialRow> = (0..manifest.trials)
            .into_par_iter()
            .map(|t| -> Result<TrialRow> {
                let mut rng = trial_rng(dimension_seed, t);
                let f = manifest.function.sample(n, fixed.as_ref(), &mut rng)?;
                let record = tester.run(&*f, &mut rng);
                Ok(TrialRow::from_record(t, &family_label, &record))
            })
            .collect::<Result<_>>()?;
        results.push(summarize(n, &dim_rows));
        rows.extend(dim_rows);
    }

    let csv_path = PathBuf::from(format!("{}.csv", manifest.output));
    let summary_path = PathBuf::from(format!("{}.summary.json", manifest.output));
    if let Some(parent) = csv_path.parent() {
        if !parent.as_os_str().is_empty() {
            fs::create_dir_all(parent)
                .with_context(|| format!("creating output directory {}", parent.display()))?;
        }
    }
    write_csv(&csv_path, &rows)?;

    let summary = RunSummary {
        artifact_version: env!("CARGO_PKG_VERSION"),
        csv_schema_version: 1,
        experiment: manifest.experiment.clone(),
        manifest_digest: digest,
        manifest,
        results,
    };
    let mut file = fs::File::create(&summary_path)
        .with_context(|| format!("creating {}", summary_path.display()))?;
    serde_json::to_writer_pretty(&mut file, &summary)?;
    file.write_all(b"\n")?;

    Ok(RunOutputs {
        csv_path,
        summary_path,
    })
}

fn summarize(n: u32, rows: &[TrialRow]) -> DimensionSummary {
    let trials = rows.len() as u64;
    let rejects = rows
        .iter()
        .filter(|r| r.decision == Decision::Reject)
        .count() as u64;
    let mut phases = PhaseCounts::default();
    for row in rows {
        match row.phase {
            Phase::NoPair => phases.no_pair += 1,
            Phase::BalanceAccept => phases.balance_accept += 1,
            Phase::CapAccept => phases.cap_accept += 1,
            Phase::EdgeCheck => phases.edge_check += 1,
        }
    }
    let total_queries: u64 = rows.iter().map(|r| r.queries).sum();
    let (rate, half_width) = if trials > 0 {
        let est = Estimate::proportion(rejects, trials);
        (est.value, est.half_width)
    } else {
        (0.0, 0.0)
    };
    DimensionSummary {
        n,
        trials,
        rejects,
        rejection_rate: rate,
        rejection_rate_ci99_half_width: half_width,
        phase_counts: phases,
        mean_queries: if trials > 0 {
            total_queries as f64 / trials as f64
        } else {
            0.0
        },
        max_queries: rows.iter().map(|r| r.queries).max().unwrap_or(0),
    }
}

fn write_csv(path: &Path, rows: &[TrialRow]) -> Result<()> {
    let mut out = String::with_capacity(rows.len() * 48 + CSV_HEADER.len() + 1);
    out.push_str(CSV_HEADER);
    out.push('\n');
    for row in rows {
        out.push_str(&row.to_csv_line());
        out.push('\n');
    }
    fs::write(path, out).with_context(|| format!("writing {}", path.display()))
}

/// Parses a run log produced by `cmd_run` (header plus rows).
pub fn read_csv(path: &Path) -> Result<Vec<TrialRow>> {
    let body = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    let mut lines = body.lines();
    let header = lines.next().context("empty CSV")?;
    anyhow::ensure!(
        header == CSV_HEADER,
        "unrecognized CSV header (schema mismatch): {header}"
    );
    lines
        .enumerate()
        .map(|(i, line)| TrialRow::parse_csv_line(line).with_context(|| format!("row {}", i + 1)))
        .collect()
}
