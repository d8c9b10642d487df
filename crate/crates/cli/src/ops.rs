//! The non-run subcommands: exact distance, noise sensitivity, kappa
//! calibration, function-file generation, and the balance audit over an
//! existing run log.

use std::path::Path;

use anyhow::{Context, Result};
use serde::Serialize;
use serde_json::json;

use monotest_core::calibration::CalibrationManifest;
use monotest_core::estimators::ns_monte_carlo;
use monotest_core::exact::{distance_to_monotone, noise_sensitivity_exact};
use monotest_core::functions::{FunctionSpec, TruthTable};
use monotest_core::process_sim::calibrate_kappa;
use monotest_core::random::trial_rng;

use crate::manifest::FunctionFamily;
use crate::runner::read_csv;

fn load_spec(path: &Path) -> Result<FunctionSpec> {
    let json = std::fs::read_to_string(path)
        .with_context(|| format!("reading function file {}", path.display()))?;
    FunctionSpec::from_json(&json).with_context(|| format!("parsing {}", path.display()))
}

fn materialize_table(spec: &FunctionSpec) -> Result<TruthTable> {
    let f = spec.build()?;
    Ok(TruthTable::from_oracle(&f)?)
}

#[derive(Debug, Serialize)]
struct DistanceReport {
    n: u32,
    distance: u64,
    fraction: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    inner_distance: Option<u64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    inner_fraction: Option<f64>,
}

/// Exact distance to monotone, with the inner function's distance reported
/// side by side when the document is a wrapper.
pub fn cmd_distance(path: &Path) -> Result<String> {
    let spec = load_spec(path)?;
    let table = materialize_table(&spec)?;
    let distance = distance_to_monotone(&table)?;
    let points = (1u64 << table.n()) as f64;
    let inner = match &spec {
        FunctionSpec::Shifted { inner, .. } | FunctionSpec::Truncated { inner, .. } => {
            let inner_table = materialize_table(inner)?;
            Some(distance_to_monotone(&inner_table)?)
        }
        _ => None,
    };
    let report = DistanceReport {
        n: table.n(),
        distance,
        fraction: distance as f64 / points,
        inner_distance: inner,
        inner_fraction: inner.map(|d| d as f64 / points),
    };
    Ok(serde_json::to_string_pretty(&report)?)
}

/// Noise sensitivity: exact (spectral) by default, Monte-Carlo when a trial
/// count is given.
pub fn cmd_ns(path: &Path, delta: f64, trials: Option<u64>, seed: u64) -> Result<String> {
    let spec = load_spec(path)?;
    let value = match trials {
        None => {
            let table = materialize_table(&spec)?;
            let exact = noise_sensitivity_exact(&table, delta)?;
            json!({ "n": table.n(), "delta": delta, "method": "exact", "value": exact })
        }
        Some(trials) => {
            let f = spec.build()?;
            let mut rng = trial_rng(seed, 0);
            let est = ns_monte_carlo(&f, delta, trials, &mut rng)?;
            json!({
                "n": spec.n(),
                "delta": delta,
                "method": "monte_carlo",
                "value": est.value,
                "ci99_half_width": est.half_width,
                "trials": est.trials,
                "seed": seed,
            })
        }
    };
    Ok(serde_json::to_string_pretty(&value)?)
}

/// Calibrates kappa(delta) and emits the calibration manifest.
pub fn cmd_calibrate(delta: f64, size: u64, trials: u64, seed: u64) -> Result<String> {
    let kappa = calibrate_kappa(delta, size, trials, seed)?;
    let manifest = CalibrationManifest {
        delta,
        size,
        trials,
        kappa,
    };
    Ok(serde_json::to_string_pretty(&manifest)?)
}

/// Samples one function from a family and emits its JSON document.
pub fn cmd_generate(family: &FunctionFamily, n: u32, seed: u64) -> Result<String> {
    let mut family = family.clone();
    family.materialize()?;
    let mut rng = trial_rng(seed, 0);
    let spec = sample_to_spec(&family, n, &mut rng)?;
    Ok(spec.to_json())
}

fn sample_to_spec(
    family: &FunctionFamily,
    n: u32,
    rng: &mut monotest_core::random::TrialRng,
) -> Result<FunctionSpec> {
    use monotest_core::generators as gen;
    let base = match family {
        FunctionFamily::TruthTableRandom { .. } => gen::sample_truth_table(n, rng)?.to_spec(),
        FunctionFamily::MonotoneTable { density, .. } => {
            gen::sample_monotone_table(n, *density, rng)?.to_spec()
        }
        FunctionFamily::Ltf { atoms, theta, .. } => {
            let dist = gen::WeightDistribution::new(atoms.clone())?;
            let sampled = gen::sample_ltf(n, &dist, rng)?;
            FunctionSpec::Ltf {
                weights: sampled.weights().to_vec(),
                theta: *theta,
            }
        }
        FunctionFamily::Talagrand { clause_cap, .. } => {
            gen::sample_talagrand_dnf(n, *clause_cap, rng)?.to_spec()
        }
        FunctionFamily::ShiftedTalagrand { clause_cap, .. } => {
            let f = gen::sample_shifted_talagrand(n, *clause_cap, rng)?;
            FunctionSpec::Shifted {
                shift: f.shift_set().members(),
                inner: Box::new(f.inner().to_spec()),
            }
        }
        FunctionFamily::File { path } => {
            anyhow::bail!("generate: the file family names an existing document ({path})")
        }
    };
    Ok(match truncate_of(family) {
        Some(delta) => FunctionSpec::Truncated {
            delta,
            inner: Box::new(base),
        },
        None => base,
    })
}

fn truncate_of(family: &FunctionFamily) -> Option<f64> {
    match family {
        FunctionFamily::TruthTableRandom { truncate_delta }
        | FunctionFamily::MonotoneTable { truncate_delta, .. }
        | FunctionFamily::Ltf { truncate_delta, .. }
        | FunctionFamily::Talagrand { truncate_delta, .. }
        | FunctionFamily::ShiftedTalagrand { truncate_delta, .. } => *truncate_delta,
        FunctionFamily::File { .. } => None,
    }
}

/// Balance audit over an existing run log: the fraction of runs whose
/// queried weights all stayed within delta_band * sqrt(n) of n/2.
pub fn cmd_audit(csv: &Path, delta_band: f64) -> Result<String> {
    let rows = read_csv(csv)?;
    let mut passes = 0u64;
    let mut no_queries = 0u64;
    for row in &rows {
        match (row.min_weight, row.max_weight) {
            (Some(lo), Some(hi)) => {
                let half = row.n as f64 / 2.0;
                let band = delta_band * (row.n as f64).sqrt();
                if (lo as f64 - half).abs() <= band && (hi as f64 - half).abs() <= band {
                    passes += 1;
                }
            }
            _ => {
                no_queries += 1;
                passes += 1; // vacuously balanced
            }
        }
    }
    let total = rows.len() as u64;
    let report = json!({
        "rows": total,
        "delta_band": delta_band,
        "passes": passes,
        "fraction": if total > 0 { passes as f64 / total as f64 } else { 0.0 },
        "runs_without_queries": no_queries,
    });
    Ok(serde_json::to_string_pretty(&report)?)
}
