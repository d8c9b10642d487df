//! Randomness plumbing: reproducible per-trial stream derivation and the
//! labeled draw-event stream consumed by the bisection testers.
//!
//! The stream abstraction exposes "draw uniform point" and "draw uniform
//! hybrid choice" as separate labeled events so that transcript
//! transformations (shifting every drawn point by a fixed set S) are
//! well-defined regardless of generator internals.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha12Rng;

use crate::hypercube::{hybrid_sample, Point, VarSet};

/// Concrete RNG type behind the per-trial streams.
pub type TrialRng = ChaCha12Rng;

/// Labeled random draws used by the bisection testers.
pub trait DrawSource {
    /// Uniform point of {0,1}^n.
    fn draw_point(&mut self, n: u32) -> Point;

    /// Uniform point of Hybrid(x,y), optionally excluding the endpoints.
    /// Callers guarantee the endpoints differ in >= 2 coordinates whenever
    /// `exclude_endpoints` is set.
    fn draw_hybrid(&mut self, x: &Point, y: &Point, exclude_endpoints: bool) -> Point;
}

/// A draw source backed by any RNG.
pub struct RngSource<R> {
    rng: R,
}

impl<R: Rng> RngSource<R> {
    pub fn new(rng: R) -> Self {
        RngSource { rng }
    }

    pub fn rng_mut(&mut self) -> &mut R {
        &mut self.rng
    }
}

impl<R: Rng> DrawSource for RngSource<R> {
    fn draw_point(&mut self, n: u32) -> Point {
        Point::random(n, &mut self.rng)
    }

    fn draw_hybrid(&mut self, x: &Point, y: &Point, exclude_endpoints: bool) -> Point {
        hybrid_sample(x, y, exclude_endpoints, &mut self.rng)
            .expect("caller guarantees hybrid preconditions")
    }
}

/// Wraps a base source so that every drawn point is shifted by S.
///
/// Running a tester on g(x) = f(x^S) with a shifted source reproduces, step
/// for step, the transcript the tester would produce on f with the base
/// source: a uniform draw p becomes p^S, and a hybrid draw for (x^S, y^S)
/// delegates to the base draw for (x, y) and shifts the result. Shifting is
/// an involution, so both runs consume the base randomness identically.
pub struct ShiftedSource<'a, S> {
    base: &'a mut S,
    shift: &'a VarSet,
}

impl<'a, S: DrawSource> ShiftedSource<'a, S> {
    pub fn new(base: &'a mut S, shift: &'a VarSet) -> Self {
        ShiftedSource { base, shift }
    }
}

impl<S: DrawSource> DrawSource for ShiftedSource<'_, S> {
    fn draw_point(&mut self, n: u32) -> Point {
        self.base
            .draw_point(n)
            .shift(self.shift)
            .expect("shift dimension fixed")
    }

    fn draw_hybrid(&mut self, x: &Point, y: &Point, exclude_endpoints: bool) -> Point {
        let bx = x.shift(self.shift).expect("shift dimension fixed");
        let by = y.shift(self.shift).expect("shift dimension fixed");
        self.base
            .draw_hybrid(&bx, &by, exclude_endpoints)
            .shift(self.shift)
            .expect("shift dimension fixed")
    }
}

/// Counter-based per-trial stream: trial counts can change without
/// perturbing earlier trials' randomness, and independent trials can run in
/// any order.
pub fn trial_rng(master_seed: u64, trial: u64) -> ChaCha12Rng {
    let mut rng = ChaCha12Rng::seed_from_u64(master_seed);
    rng.set_stream(trial);
    rng
}

/// Derives a sub-experiment master seed (e.g. one per dimension in an n
/// sweep) from the top-level master seed, via a splitmix64 step.
pub fn derive_seed(master_seed: u64, label: u64) -> u64 {
    let mut z = master_seed ^ label.wrapping_mul(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn trial_streams_are_stable_and_distinct() {
        let a: Vec<u64> = {
            let mut rng = trial_rng(42, 3);
            (0..4).map(|_| rng.random()).collect()
        };
        let b: Vec<u64> = {
            let mut rng = trial_rng(42, 3);
            (0..4).map(|_| rng.random()).collect()
        };
        assert_eq!(a, b);
        let c: Vec<u64> = {
            let mut rng = trial_rng(42, 4);
            (0..4).map(|_| rng.random()).collect()
        };
        assert_ne!(a, c);
    }

    #[test]
    fn shifted_source_shifts_uniform_draws() {
        let shift = VarSet::from_members(6, &[1, 4]).unwrap();
        let mut base_a = RngSource::new(trial_rng(7, 0));
        let mut base_b = RngSource::new(trial_rng(7, 0));
        let mut shifted = ShiftedSource::new(&mut base_b, &shift);
        for _ in 0..20 {
            let p = base_a.draw_point(6);
            let q = shifted.draw_point(6);
            assert_eq!(p.shift(&shift).unwrap(), q);
        }
    }

    #[test]
    fn shifted_source_commutes_with_hybrid_draws() {
        let shift = VarSet::from_members(8, &[2, 3, 8]).unwrap();
        let mut base_a = RngSource::new(trial_rng(9, 1));
        let mut base_b = RngSource::new(trial_rng(9, 1));
        let x: Point = "00001111".parse().unwrap();
        let y: Point = "01010101".parse().unwrap();
        let xs = x.shift(&shift).unwrap();
        let ys = y.shift(&shift).unwrap();
        let mut shifted = ShiftedSource::new(&mut base_b, &shift);
        for _ in 0..50 {
            let z = base_a.draw_hybrid(&x, &y, true);
            let zs = shifted.draw_hybrid(&xs, &ys, true);
            assert_eq!(z.shift(&shift).unwrap(), zs);
        }
    }
}
