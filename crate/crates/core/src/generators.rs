//! Random samplers for the function and set distributions used throughout:
//! Bernoulli subsets B(n, delta), Talagrand random DNFs, their shifted
//! (negated-variable) variants, and LTF weight ensembles.
//!
//! Samplers are pure given a randomness stream: identical seed, identical
//! sample, bit for bit.

use rand::Rng;

use crate::error::{Error, Result};
use crate::functions::{Ltf, ShiftedFunction, TalagrandDnf, TruthTable};
use crate::hypercube::VarSet;

/// Default cap on the 2^sqrt(n) clause count of a sampled DNF.
pub const DEFAULT_CLAUSE_CAP: u64 = 1 << 16;

/// A finite weight distribution given as (value, probability) atoms.
#[derive(Debug, Clone, PartialEq)]
pub struct WeightDistribution {
    atoms: Vec<(f64, f64)>,
}

impl WeightDistribution {
    pub fn new(atoms: Vec<(f64, f64)>) -> Result<WeightDistribution> {
        if atoms.is_empty() {
            return Err(Error::InvalidDistribution("no atoms".into()));
        }
        let mut total = 0.0;
        for &(value, prob) in &atoms {
            if !value.is_finite() || !prob.is_finite() || prob < 0.0 {
                return Err(Error::InvalidDistribution(format!(
                    "bad atom ({value}, {prob})"
                )));
            }
            total += prob;
        }
        if (total - 1.0).abs() > 1e-12 {
            return Err(Error::InvalidDistribution(format!(
                "probabilities sum to {total}, expected 1"
            )));
        }
        Ok(WeightDistribution { atoms })
    }

    /// Point mass at a single value.
    pub fn point_mass(value: f64) -> WeightDistribution {
        WeightDistribution {
            atoms: vec![(value, 1.0)],
        }
    }

    /// Default Yes ensemble: uniform over {1, 2}. All weights positive, so
    /// every sampled LTF is monotone.
    pub fn yes_default() -> WeightDistribution {
        WeightDistribution {
            atoms: vec![(1.0, 0.5), (2.0, 0.5)],
        }
    }

    /// Default No ensemble: -1 or +3 with probability 1/2 each. Sampled
    /// LTFs carry substantial negative mass and are typically far from
    /// monotone at small n.
    pub fn no_default() -> WeightDistribution {
        WeightDistribution {
            atoms: vec![(-1.0, 0.5), (3.0, 0.5)],
        }
    }

    pub fn atoms(&self) -> &[(f64, f64)] {
        &self.atoms
    }

    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> f64 {
        let u: f64 = rng.random();
        let mut acc = 0.0;
        for &(value, prob) in &self.atoms {
            acc += prob;
            if u < acc {
                return value;
            }
        }
        self.atoms.last().expect("nonempty").0
    }

    /// max |value| over atoms.
    pub fn max_abs(&self) -> f64 {
        self.atoms.iter().fold(0.0f64, |m, (v, _)| m.max(v.abs()))
    }

    /// min |value| over atoms.
    pub fn min_abs(&self) -> f64 {
        self.atoms
            .iter()
            .fold(f64::INFINITY, |m, (v, _)| m.min(v.abs()))
    }
}

/// Subset of [n] including each element independently with probability
/// `delta`.
pub fn sample_bernoulli_subset<R: Rng + ?Sized>(
    n: u32,
    delta: f64,
    rng: &mut R,
) -> Result<VarSet> {
    if !(0.0..=1.0).contains(&delta) {
        return Err(Error::NoiseRateOutOfRange(delta));
    }
    let mut set = VarSet::empty(n);
    for i in 1..=n {
        if rng.random_bool(delta) {
            set.insert(i);
        }
    }
    Ok(set)
}

/// Clause width used by the Talagrand family at dimension n.
pub fn talagrand_width(n: u32) -> u32 {
    ((n as f64).sqrt().round() as u32).max(1)
}

/// Clause count before capping: 2^width, saturating.
fn talagrand_clause_count(width: u32, cap: u64) -> u64 {
    if width >= 63 {
        cap
    } else {
        (1u64 << width).min(cap)
    }
}

/// Talagrand random DNF: m = min(2^w, cap) clauses, each of which is w
/// independent uniform draws from [n] (with replacement), where
/// w = round(sqrt(n)).
pub fn sample_talagrand_dnf<R: Rng + ?Sized>(
    n: u32,
    clause_cap: u64,
    rng: &mut R,
) -> Result<TalagrandDnf> {
    if clause_cap == 0 {
        return Err(Error::InvalidParameter {
            name: "clause_cap",
            reason: "cap must be at least 1".into(),
        });
    }
    let width = talagrand_width(n);
    let m = talagrand_clause_count(width, clause_cap);
    let clauses: Vec<Vec<u32>> = (0..m)
        .map(|_| (0..width).map(|_| rng.random_range(1..=n)).collect())
        .collect();
    TalagrandDnf::new(n, width, clauses)
}

/// A Talagrand random DNF with a B(n, 1/sqrt(n)) random set of variables
/// negated. Both the inner DNF and the shift set stay inspectable on the
/// returned value.
pub fn sample_shifted_talagrand<R: Rng + ?Sized>(
    n: u32,
    clause_cap: u64,
    rng: &mut R,
) -> Result<ShiftedFunction<TalagrandDnf>> {
    let inner = sample_talagrand_dnf(n, clause_cap, rng)?;
    let delta = 1.0 / (n as f64).sqrt();
    let shift = sample_bernoulli_subset(n, delta, rng)?;
    ShiftedFunction::new(inner, shift)
}

/// LTF with i.i.d. weights from `dist` and threshold 0.
pub fn sample_ltf<R: Rng + ?Sized>(
    n: u32,
    dist: &WeightDistribution,
    rng: &mut R,
) -> Result<Ltf> {
    let weights: Vec<f64> = (0..n).map(|_| dist.sample(rng)).collect();
    Ltf::new(weights, 0.0)
}

/// Uniformly random truth table on {0,1}^n.
pub fn sample_truth_table<R: Rng + ?Sized>(n: u32, rng: &mut R) -> Result<TruthTable> {
    TruthTable::from_fn(n, |_| rng.random_bool(0.5))
}

/// Random monotone truth table: Bernoulli(density) seeds, then the upward
/// closure.
pub fn sample_monotone_table<R: Rng + ?Sized>(
    n: u32,
    density: f64,
    rng: &mut R,
) -> Result<TruthTable> {
    if !(0.0..=1.0).contains(&density) {
        return Err(Error::InvalidParameter {
            name: "density",
            reason: format!("expected a probability, got {density}"),
        });
    }
    let seeds = TruthTable::from_fn(n, |_| rng.random_bool(density))?;
    Ok(seeds.monotone_closure())
}
