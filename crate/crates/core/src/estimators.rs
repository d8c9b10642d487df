//! Monte-Carlo estimators for quantities that are exponential to compute
//! exactly, plus the output-distribution machinery of the bisection tester:
//! per-variable termination histograms and the coupled-transcript check of
//! shift invariance.

use rand::Rng;

use crate::error::Result;
use crate::functions::{BooleanFunction, ShiftedFunction};
use crate::generators::sample_bernoulli_subset;
use crate::hypercube::VarSet;
use crate::random::{trial_rng, RngSource, ShiftedSource};
use crate::stats::Z_99;
use crate::testers::bisection_tester;

/// Monte-Carlo estimate with a 99% normal-approximation confidence
/// half-width.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Estimate {
    pub value: f64,
    pub half_width: f64,
    pub trials: u64,
}

impl Estimate {
    pub fn proportion(successes: u64, trials: u64) -> Estimate {
        assert!(trials >= 1, "at least one trial required");
        let p = successes as f64 / trials as f64;
        Estimate {
            value: p,
            half_width: Z_99 * (p * (1.0 - p) / trials as f64).sqrt(),
            trials,
        }
    }

    /// |value - exact| <= multiple * half_width.
    pub fn within(&self, exact: f64, multiple: f64) -> bool {
        (self.value - exact).abs() <= multiple * self.half_width
    }
}

/// Empirical noise sensitivity: frequency of f(x) != f(x^S) over
/// independent uniform x and S ~ B(n, delta).
pub fn ns_monte_carlo<R: Rng + ?Sized>(
    f: &dyn BooleanFunction,
    delta: f64,
    trials: u64,
    rng: &mut R,
) -> Result<Estimate> {
    let n = f.n();
    let mut hits = 0u64;
    for _ in 0..trials {
        let x = crate::hypercube::Point::random(n, rng);
        let s = sample_bernoulli_subset(n, delta, rng)?;
        if f.eval(&x) != f.eval(&x.shift(&s)?) {
            hits += 1;
        }
    }
    Ok(Estimate::proportion(hits, trials))
}

/// Empirical Pr_x[f(x) != f(x^S)] for a fixed shift set. Half this rate
/// lower-bounds the distance-to-monotone fraction of x -> f(x^S) when f is
/// monotone.
pub fn shift_disagreement_rate<R: Rng + ?Sized>(
    f: &dyn BooleanFunction,
    s: &VarSet,
    trials: u64,
    rng: &mut R,
) -> Result<Estimate> {
    let n = f.n();
    let mut hits = 0u64;
    for _ in 0..trials {
        let x = crate::hypercube::Point::random(n, rng);
        if f.eval(&x) != f.eval(&x.shift(s)?) {
            hits += 1;
        }
    }
    Ok(Estimate::proportion(hits, trials))
}

/// Histogram of the bisection tester's terminal variable over repeated
/// runs, with runs that accept before reaching an edge tallied separately.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct OutputHistogram {
    n: u32,
    per_variable: Vec<u64>,
    no_edge: u64,
    trials: u64,
}

impl OutputHistogram {
    pub fn empty(n: u32) -> OutputHistogram {
        OutputHistogram {
            n,
            per_variable: vec![0; n as usize],
            no_edge: 0,
            trials: 0,
        }
    }

    pub fn n(&self) -> u32 {
        self.n
    }

    /// Count of runs terminating in each variable (1-indexed by position).
    pub fn per_variable(&self) -> &[u64] {
        &self.per_variable
    }

    pub fn no_edge(&self) -> u64 {
        self.no_edge
    }

    pub fn trials(&self) -> u64 {
        self.trials
    }

    pub fn no_edge_fraction(&self) -> f64 {
        self.no_edge as f64 / self.trials as f64
    }

    /// p_i conditioned on edge termination. These sum to 1 over the
    /// variables whenever any run reached an edge; runs that accept at the
    /// pair search are excluded and reported via `no_edge_fraction`.
    pub fn edge_conditioned_rates(&self) -> Vec<f64> {
        let edge_runs = (self.trials - self.no_edge) as f64;
        self.per_variable
            .iter()
            .map(|&c| if edge_runs > 0.0 { c as f64 / edge_runs } else { 0.0 })
            .collect()
    }

    fn record(&mut self, terminal: Option<u32>) {
        match terminal {
            Some(v) => self.per_variable[(v - 1) as usize] += 1,
            None => self.no_edge += 1,
        }
        self.trials += 1;
    }

    /// Associative merge of disjoint trial batches.
    pub fn merge(&mut self, other: &OutputHistogram) {
        assert_eq!(self.n, other.n, "histograms must share a dimension");
        for (a, b) in self.per_variable.iter_mut().zip(&other.per_variable) {
            *a += b;
        }
        self.no_edge += other.no_edge;
        self.trials += other.trials;
    }
}

/// Runs the bisection tester `trials` times with per-trial derived streams
/// and tallies terminal variables.
pub fn output_distribution(
    f: &dyn BooleanFunction,
    epsilon: f64,
    trials: u64,
    master_seed: u64,
) -> OutputHistogram {
    let mut hist = OutputHistogram::empty(f.n());
    for t in 0..trials {
        let mut src = RngSource::new(trial_rng(master_seed, t));
        let record = bisection_tester(f, epsilon, &mut src);
        hist.record(record.terminal_variable);
    }
    hist
}

/// Runs the bisection tester on f with the stream derived from `seed`, and
/// on g(x) = f(x^S) with the same stream transformed so that every drawn
/// point is shifted by S. Returns true iff both runs terminate in the same
/// variable (or both accept without reaching an edge).
///
/// The transcript transformation is a bijection, so this is identically
/// true; a false return indicates a randomness-plumbing bug.
pub fn coupled_shift_equivalence(
    f: &dyn BooleanFunction,
    s: &VarSet,
    epsilon: f64,
    seed: u64,
) -> bool {
    let record_f = {
        let mut src = RngSource::new(trial_rng(seed, 0));
        bisection_tester(f, epsilon, &mut src)
    };
    let record_g = {
        let g = ShiftedFunction::new(&f, s.clone()).expect("dimensions match");
        let mut base = RngSource::new(trial_rng(seed, 0));
        let mut src = ShiftedSource::new(&mut base, s);
        bisection_tester(&g, epsilon, &mut src)
    };
    record_f.terminal_variable == record_g.terminal_variable
}
