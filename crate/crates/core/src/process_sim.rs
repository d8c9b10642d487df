//! The randomized bisection process: iterated uniform set-splitting with an
//! adversarial side choice, simulated as a size chain (the process is
//! exchangeable over elements, so sizes are a sufficient statistic), plus a
//! set-level mode for adversaries that depend on element identities.
//!
//! The empirical side: verifying that the trace stays within
//! (1/2, 3/2) * |S|/2^k for all k <= log2|S| - kappa, and calibrating the
//! smallest kappa that achieves a target success probability.

use rand::Rng;
use rand_distr::{Binomial, Distribution};

use crate::error::{Error, Result};
use crate::estimators::Estimate;
use crate::random::{derive_seed, trial_rng};

/// Which part of the partition the external process keeps.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Side {
    A,
    B,
}

/// The external choice process. Min and Max break ties toward A; ties are
/// immaterial to the size chain's law.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Strategy {
    Min,
    Max,
    Random,
    /// A provided choice sequence, consumed one entry per step.
    Scripted(Vec<Side>),
}

impl Strategy {
    fn choose<R: Rng + ?Sized>(&self, step: usize, a: u64, b: u64, rng: &mut R) -> Side {
        match self {
            Strategy::Min => {
                if a <= b {
                    Side::A
                } else {
                    Side::B
                }
            }
            Strategy::Max => {
                if a >= b {
                    Side::A
                } else {
                    Side::B
                }
            }
            Strategy::Random => {
                if rng.random_bool(0.5) {
                    Side::A
                } else {
                    Side::B
                }
            }
            Strategy::Scripted(seq) => {
                assert!(
                    step < seq.len(),
                    "scripted sequence exhausted at step {step}"
                );
                seq[step]
            }
        }
    }
}

/// The sizes |S_0|, |S_1|, ..., |S_K| of one run.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SizeTrace {
    pub sizes: Vec<u64>,
}

impl SizeTrace {
    pub fn initial(&self) -> u64 {
        self.sizes[0]
    }

    pub fn steps(&self) -> usize {
        self.sizes.len() - 1
    }
}

/// One run of the size chain: each step splits the current size with a fair
/// coin per element (a Binomial(|S|, 1/2) draw) and the strategy keeps one
/// part.
pub fn run_process<R: Rng + ?Sized>(
    initial_size: u64,
    strategy: &Strategy,
    steps: u32,
    rng: &mut R,
) -> SizeTrace {
    let mut sizes = Vec::with_capacity(steps as usize + 1);
    sizes.push(initial_size);
    let mut current = initial_size;
    for step in 0..steps as usize {
        let a = if current == 0 {
            0
        } else {
            Binomial::new(current, 0.5).expect("valid binomial").sample(rng)
        };
        let b = current - a;
        current = match strategy.choose(step, a, b, rng) {
            Side::A => a,
            Side::B => b,
        };
        sizes.push(current);
    }
    SizeTrace { sizes }
}

/// Set-level run for adversaries that inspect element identities: the
/// chooser sees both parts and picks a side. Returns the kept sets
/// S_0, ..., S_K.
pub fn run_process_sets<R, F>(
    initial: &[u32],
    mut choose: F,
    steps: u32,
    rng: &mut R,
) -> Vec<Vec<u32>>
where
    R: Rng + ?Sized,
    F: FnMut(&[u32], &[u32]) -> Side,
{
    let mut kept: Vec<Vec<u32>> = vec![initial.to_vec()];
    let mut current = initial.to_vec();
    for _ in 0..steps {
        let mut a = Vec::with_capacity(current.len());
        let mut b = Vec::with_capacity(current.len());
        for &e in &current {
            if rng.random_bool(0.5) {
                a.push(e);
            } else {
                b.push(e);
            }
        }
        debug_assert_eq!(a.len() + b.len(), current.len());
        current = match choose(&a, &b) {
            Side::A => a,
            Side::B => b,
        };
        kept.push(current.clone());
    }
    kept
}

fn floor_log2(x: u64) -> u32 {
    63 - x.leading_zeros()
}

/// Outcome of checking the two-sided bound over many runs.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BoundsReport {
    /// Fraction of runs in which (1/2) |S|/2^k < |S_k| < (3/2) |S|/2^k held
    /// simultaneously for all k <= log2|S| - kappa.
    pub fraction: f64,
    pub delta: f64,
    /// fraction >= 1 - delta.
    pub meets_target: bool,
    pub constrained_steps: u32,
    pub trials: u64,
}

/// Estimates the probability that a run stays inside the two-sided bound
/// for every constrained step.
pub fn verify_bounds(
    initial_size: u64,
    delta: f64,
    kappa: u32,
    trials: u64,
    strategy: &Strategy,
    master_seed: u64,
) -> BoundsReport {
    assert!(initial_size >= 1, "initial size must be positive");
    assert!(trials >= 1, "at least one trial required");
    let log = floor_log2(initial_size);
    let steps = log.saturating_sub(kappa);
    let mut successes = 0u64;
    for t in 0..trials {
        let mut rng = trial_rng(master_seed, t);
        let trace = run_process(initial_size, strategy, steps, &mut rng);
        let ok = (1..=steps as usize).all(|k| {
            let target = initial_size as f64 / 2f64.powi(k as i32);
            let size = trace.sizes[k] as f64;
            0.5 * target < size && size < 1.5 * target
        });
        if ok {
            successes += 1;
        }
    }
    let fraction = successes as f64 / trials as f64;
    BoundsReport {
        fraction,
        delta,
        meets_target: fraction >= 1.0 - delta,
        constrained_steps: steps,
        trials,
    }
}

/// Smallest kappa whose success fraction clears 1 - delta for both the Min
/// and Max strategies, with the 99% confidence interval of the estimate
/// entirely above the target.
pub fn calibrate_kappa(
    delta: f64,
    initial_size: u64,
    trials: u64,
    master_seed: u64,
) -> Result<u32> {
    if !(delta > 0.0 && delta < 1.0) {
        return Err(Error::InvalidParameter {
            name: "delta",
            reason: format!("need 0 < delta < 1, got {delta}"),
        });
    }
    let log = floor_log2(initial_size);
    for kappa in 0..=log {
        let clears = [Strategy::Min, Strategy::Max].iter().enumerate().all(
            |(idx, strategy)| {
                let seed = derive_seed(master_seed, (kappa as u64) << 8 | idx as u64);
                let report = verify_bounds(initial_size, delta, kappa, trials, strategy, seed);
                let successes = (report.fraction * trials as f64).round() as u64;
                let est = Estimate::proportion(successes, trials);
                est.value - est.half_width > 1.0 - delta
            },
        );
        if clears {
            return Ok(kappa);
        }
    }
    // kappa = log2|S| leaves no constrained steps, so every run succeeds
    // and the loop above must have returned by then.
    unreachable!("vacuous kappa always clears the target")
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha12Rng;

    #[test]
    fn min_and_max_traces_bracket_the_halving_curve() {
        for t in 0..50 {
            let mut rng = trial_rng(91, t);
            let min_trace = run_process(1 << 12, &Strategy::Min, 10, &mut rng);
            for (k, &size) in min_trace.sizes.iter().enumerate() {
                assert!(size as f64 <= (1u64 << 12) as f64 / 2f64.powi(k as i32));
            }
            let max_trace = run_process(1 << 12, &Strategy::Max, 10, &mut rng);
            for (k, &size) in max_trace.sizes.iter().enumerate() {
                assert!(size as f64 >= (1u64 << 12) as f64 / 2f64.powi(k as i32));
            }
        }
    }

    #[test]
    fn random_strategy_halves_in_expectation() {
        let mut rng = ChaCha12Rng::seed_from_u64(92);
        let runs = 10_000;
        let total: u64 = (0..runs)
            .map(|_| run_process(1024, &Strategy::Random, 1, &mut rng).sizes[1])
            .sum();
        let mean = total as f64 / runs as f64;
        // |S_1| has variance Var(Binomial(1024, 1/2)) = 256
        let sigma = (256.0 / runs as f64).sqrt();
        assert!((mean - 512.0).abs() <= 3.0 * sigma, "mean = {mean}");
    }

    #[test]
    fn scripted_strategy_follows_the_script() {
        let mut rng = ChaCha12Rng::seed_from_u64(93);
        let script = Strategy::Scripted(vec![Side::A, Side::B, Side::A]);
        let trace = run_process(100, &script, 3, &mut rng);
        assert_eq!(trace.steps(), 3);
    }

    #[test]
    fn set_level_conservation_and_identity_tracking() {
        let mut rng = ChaCha12Rng::seed_from_u64(94);
        let initial: Vec<u32> = (1..=64).collect();
        // adversary protecting element 1: keep whichever side contains it
        let kept = run_process_sets(
            &initial,
            |a, b| {
                if a.contains(&1) {
                    Side::A
                } else {
                    debug_assert!(b.contains(&1));
                    Side::B
                }
            },
            6,
            &mut rng,
        );
        for set in &kept {
            assert!(set.contains(&1));
        }
        assert_eq!(kept.len(), 7);
    }

    #[test]
    fn vacuous_kappa_always_succeeds() {
        let report = verify_bounds(1 << 10, 0.125, 10, 200, &Strategy::Min, 95);
        assert_eq!(report.constrained_steps, 0);
        assert_eq!(report.fraction, 1.0);
        assert!(report.meets_target);
    }

    #[test]
    fn near_one_delta_calibrates_to_zero() {
        // at |S| = 4 both adversaries keep a ~19% chance of tracking the
        // halving curve exactly, which clears any near-zero target
        let kappa = calibrate_kappa(0.999, 4, 2000, 96).unwrap();
        assert_eq!(kappa, 0);
    }

    #[test]
    fn kappa_is_monotone_in_delta() {
        let strict = calibrate_kappa(1.0 / 16.0, 1 << 10, 5000, 97).unwrap();
        let loose = calibrate_kappa(1.0 / 8.0, 1 << 10, 5000, 97).unwrap();
        assert!(strict >= loose, "kappa(1/16) = {strict} < kappa(1/8) = {loose}");
    }

    #[test]
    fn calibrated_kappa_clears_target_for_all_strategies() {
        let delta = 0.125;
        let kappa = calibrate_kappa(delta, 1 << 10, 10_000, 98).unwrap();
        for strategy in [Strategy::Min, Strategy::Max, Strategy::Random] {
            let report = verify_bounds(1 << 10, delta, kappa, 10_000, &strategy, 99);
            assert!(
                report.meets_target,
                "{strategy:?}: fraction = {}",
                report.fraction
            );
        }
    }
}
