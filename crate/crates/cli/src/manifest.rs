//! Experiment manifests: a self-contained JSON description of a function
//! family, a tester, a dimension sweep, and a seed. After loading, every
//! field is explicit (defaults materialized), so the manifest echoed into
//! the summary replays the experiment exactly.

use std::sync::Arc;

use anyhow::{bail, Context, Result};
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use monotest_core::calibration::KAPPA_EIGHTH;
use monotest_core::functions::{
    BooleanFunction, FunctionSpec, Ltf, SharedFn, TruncatedFunction,
};
use monotest_core::generators::{
    sample_ltf, sample_monotone_table, sample_shifted_talagrand, sample_talagrand_dnf,
    sample_truth_table, WeightDistribution, DEFAULT_CLAUSE_CAP,
};
use monotest_core::random::TrialRng;
use monotest_core::testers::{Alg2Params, Tester, DEFAULT_HYBRID_CAP};

fn default_density() -> f64 {
    0.15
}

fn default_clause_cap() -> u64 {
    DEFAULT_CLAUSE_CAP
}

fn default_tau() -> f64 {
    1.0
}

fn default_kappa() -> u32 {
    KAPPA_EIGHTH
}

fn default_hybrid_cap() -> u64 {
    DEFAULT_HYBRID_CAP
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum LtfEnsemble {
    #[default]
    Yes,
    No,
    Custom,
}

/// Function family sampled per trial (except `file`, which names a fixed
/// function document).
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "snake_case", deny_unknown_fields)]
pub enum FunctionFamily {
    TruthTableRandom {
        #[serde(default)]
        truncate_delta: Option<f64>,
    },
    MonotoneTable {
        #[serde(default = "default_density")]
        density: f64,
        #[serde(default)]
        truncate_delta: Option<f64>,
    },
    Ltf {
        #[serde(default)]
        ensemble: LtfEnsemble,
        #[serde(default)]
        atoms: Vec<(f64, f64)>,
        #[serde(default)]
        theta: f64,
        #[serde(default)]
        truncate_delta: Option<f64>,
    },
    Talagrand {
        #[serde(default = "default_clause_cap")]
        clause_cap: u64,
        #[serde(default)]
        truncate_delta: Option<f64>,
    },
    ShiftedTalagrand {
        #[serde(default = "default_clause_cap")]
        clause_cap: u64,
        #[serde(default)]
        truncate_delta: Option<f64>,
    },
    File {
        path: String,
    },
}

impl FunctionFamily {
    pub fn label(&self) -> String {
        match self {
            FunctionFamily::TruthTableRandom { .. } => "truth_table_random".into(),
            FunctionFamily::MonotoneTable { .. } => "monotone_table".into(),
            FunctionFamily::Ltf { ensemble, .. } => match ensemble {
                LtfEnsemble::Yes => "ltf_yes".into(),
                LtfEnsemble::No => "ltf_no".into(),
                LtfEnsemble::Custom => "ltf_custom".into(),
            },
            FunctionFamily::Talagrand { .. } => "talagrand".into(),
            FunctionFamily::ShiftedTalagrand { .. } => "shifted_talagrand".into(),
            FunctionFamily::File { path } => format!("file:{path}"),
        }
    }

    fn truncate_delta(&self) -> Option<f64> {
        match self {
            FunctionFamily::TruthTableRandom { truncate_delta }
            | FunctionFamily::MonotoneTable { truncate_delta, .. }
            | FunctionFamily::Ltf { truncate_delta, .. }
            | FunctionFamily::Talagrand { truncate_delta, .. }
            | FunctionFamily::ShiftedTalagrand { truncate_delta, .. } => *truncate_delta,
            FunctionFamily::File { .. } => None,
        }
    }

    /// Fills defaults and validates parameters, naming the offending field.
    pub fn materialize(&mut self) -> Result<()> {
        match self {
            FunctionFamily::MonotoneTable { density, .. } => {
                if !(0.0..=1.0).contains(density) {
                    bail!("function.density: expected a probability, got {density}");
                }
            }
            FunctionFamily::Ltf {
                ensemble, atoms, ..
            } => {
                match ensemble {
                    LtfEnsemble::Yes => *atoms = WeightDistribution::yes_default().atoms().to_vec(),
                    LtfEnsemble::No => *atoms = WeightDistribution::no_default().atoms().to_vec(),
                    LtfEnsemble::Custom => {
                        if atoms.is_empty() {
                            bail!("function.atoms: custom ensemble requires explicit atoms");
                        }
                    }
                }
                WeightDistribution::new(atoms.clone())
                    .map_err(|e| anyhow::anyhow!("function.atoms: {e}"))?;
            }
            FunctionFamily::Talagrand { clause_cap, .. }
            | FunctionFamily::ShiftedTalagrand { clause_cap, .. } => {
                if *clause_cap == 0 {
                    bail!("function.clause_cap: must be at least 1");
                }
            }
            FunctionFamily::TruthTableRandom { .. } | FunctionFamily::File { .. } => {}
        }
        if let Some(delta) = self.truncate_delta() {
            if !(delta >= 0.0) {
                bail!("function.truncate_delta: must be nonnegative, got {delta}");
            }
        }
        Ok(())
    }

    /// Loads the fixed function for the `file` family; None for sampled
    /// families.
    pub fn load_fixed(&self) -> Result<Option<SharedFn>> {
        match self {
            FunctionFamily::File { path } => {
                let json = std::fs::read_to_string(path)
                    .with_context(|| format!("function.path: cannot read {path}"))?;
                let spec = FunctionSpec::from_json(&json)
                    .with_context(|| format!("function.path: invalid document {path}"))?;
                Ok(Some(spec.build()?))
            }
            _ => Ok(None),
        }
    }

    /// Samples one instance for a trial. `fixed` carries the loaded
    /// function for the `file` family.
    pub fn sample(
        &self,
        n: u32,
        fixed: Option<&SharedFn>,
        rng: &mut TrialRng,
    ) -> Result<SharedFn> {
        let base: SharedFn = match self {
            FunctionFamily::TruthTableRandom { .. } => Arc::new(sample_truth_table(n, rng)?),
            FunctionFamily::MonotoneTable { density, .. } => {
                Arc::new(sample_monotone_table(n, *density, rng)?)
            }
            FunctionFamily::Ltf { atoms, theta, .. } => {
                let dist = WeightDistribution::new(atoms.clone())?;
                let sampled = sample_ltf(n, &dist, rng)?;
                if *theta == 0.0 {
                    Arc::new(sampled)
                } else {
                    Arc::new(Ltf::new(sampled.weights().to_vec(), *theta)?)
                }
            }
            FunctionFamily::Talagrand { clause_cap, .. } => {
                Arc::new(sample_talagrand_dnf(n, *clause_cap, rng)?)
            }
            FunctionFamily::ShiftedTalagrand { clause_cap, .. } => {
                Arc::new(sample_shifted_talagrand(n, *clause_cap, rng)?)
            }
            FunctionFamily::File { path } => {
                let f = fixed.expect("fixed function loaded before trials").clone();
                if f.n() != n {
                    bail!(
                        "function.path: document {path} has n = {}, manifest asks for {n}",
                        f.n()
                    );
                }
                return Ok(f);
            }
        };
        match self.truncate_delta() {
            Some(delta) => Ok(Arc::new(TruncatedFunction::new(base, delta)?)),
            None => Ok(base),
        }
    }
}

/// Scaled-mode constants for the modified bisection tester.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScaledConstants {
    pub c: f64,
    pub zeta: f64,
    pub k: u32,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum TesterConfig {
    Edge {
        epsilon: f64,
    },
    Bisection {
        epsilon: f64,
    },
    ModifiedBisection {
        epsilon: f64,
        #[serde(default = "default_tau")]
        tau: f64,
        #[serde(default = "default_kappa")]
        kappa: u32,
        #[serde(default = "default_hybrid_cap")]
        hybrid_cap: u64,
        #[serde(default)]
        scaled: Option<ScaledConstants>,
    },
}

impl TesterConfig {
    pub fn materialize(&mut self) -> Result<()> {
        let epsilon = match self {
            TesterConfig::Edge { epsilon }
            | TesterConfig::Bisection { epsilon }
            | TesterConfig::ModifiedBisection { epsilon, .. } => *epsilon,
        };
        if !(epsilon > 0.0) {
            bail!("tester.epsilon: must be positive, got {epsilon}");
        }
        if let TesterConfig::ModifiedBisection { tau, hybrid_cap, .. } = self {
            if !(*tau > 0.0) {
                bail!("tester.tau: must be positive, got {tau}");
            }
            if *hybrid_cap == 0 {
                bail!("tester.hybrid_cap: must be at least 1");
            }
        }
        Ok(())
    }

    /// Builds the runnable tester for one dimension. Theory-mode modified
    /// bisection reports not-applicable when the derived k is negative.
    pub fn build(&self, n: u32) -> Result<Tester> {
        Ok(match self {
            TesterConfig::Edge { epsilon } => Tester::Edge { epsilon: *epsilon },
            TesterConfig::Bisection { epsilon } => Tester::Bisection { epsilon: *epsilon },
            TesterConfig::ModifiedBisection {
                epsilon,
                tau,
                kappa,
                hybrid_cap,
                scaled,
            } => {
                let params = match scaled {
                    Some(s) => Alg2Params::scaled(*epsilon, *tau, s.c, s.zeta, s.k, *hybrid_cap)?,
                    None => Alg2Params::from_theory(*epsilon, *tau, *kappa, n as u64, *hybrid_cap)
                        .with_context(|| {
                            format!("tester: not applicable at n = {n} (theory-mode k < 0)")
                        })?,
                };
                Tester::ModifiedBisection { params }
            }
        })
    }
}

/// A complete experiment description.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Manifest {
    pub experiment: String,
    pub function: FunctionFamily,
    pub tester: TesterConfig,
    pub n: Vec<u32>,
    pub trials: u64,
    pub seed: u64,
    pub output: String,
}

impl Manifest {
    pub fn from_json(json: &str) -> Result<Manifest> {
        serde_json::from_str(json).context("manifest")
    }

    pub fn materialize(&mut self) -> Result<()> {
        if self.experiment.is_empty() {
            bail!("experiment: must be nonempty");
        }
        if self.n.is_empty() {
            bail!("n: at least one dimension required");
        }
        for &n in &self.n {
            if n < 1 {
                bail!("n: dimensions must be at least 1");
            }
        }
        if self.output.is_empty() {
            bail!("output: must be nonempty");
        }
        self.function.materialize()?;
        self.tester.materialize()?;
        Ok(())
    }

    /// SHA-256 of the materialized manifest's canonical JSON.
    pub fn digest(&self) -> String {
        let canonical = serde_json::to_string(self).expect("manifest serializes");
        let mut hasher = Sha256::new();
        hasher.update(canonical.as_bytes());
        let out = hasher.finalize();
        out.iter().map(|b| format!("{b:02x}")).collect()
    }
}
