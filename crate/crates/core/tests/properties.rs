//! Property tests for the structural invariants: order/shift algebra,
//! hybrid subcube closure and uniformity, serialization round trips, and
//! query accounting.

use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha12Rng;

use monotest_core::estimators::Estimate;
use monotest_core::functions::{
    BooleanFunction, CountingOracle, FunctionSpec, TalagrandDnf, TruncatedFunction, TruthTable,
};
use monotest_core::hypercube::{hybrid_enumerate, hybrid_sample, Point, VarSet};
use monotest_core::random::RngSource;
use monotest_core::stats::chi_square_gof;
use monotest_core::testers::bisection_tester;

fn point_strategy(n: u32) -> impl Strategy<Value = Point> {
    prop::collection::vec(any::<bool>(), n as usize).prop_map(move |bits| {
        let mut p = Point::zero(n);
        for (i, b) in bits.iter().enumerate() {
            p = p.with(i as u32 + 1, *b);
        }
        p
    })
}

fn varset_strategy(n: u32) -> impl Strategy<Value = VarSet> {
    prop::collection::vec(any::<bool>(), n as usize).prop_map(move |bits| {
        let members: Vec<u32> = bits
            .iter()
            .enumerate()
            .filter_map(|(i, b)| b.then_some(i as u32 + 1))
            .collect();
        VarSet::from_members(n, &members).unwrap()
    })
}

fn dims() -> impl Strategy<Value = u32> {
    prop_oneof![1u32..=16, Just(63), Just(64), Just(65), 66u32..=130]
}

proptest! {
    #[test]
    fn shift_involution((n, seed) in dims().prop_flat_map(|n| (Just(n), any::<u64>()))) {
        let mut rng = ChaCha12Rng::seed_from_u64(seed);
        let x = Point::random(n, &mut rng);
        let s = monotest_core::generators::sample_bernoulli_subset(n, 0.5, &mut rng).unwrap();
        prop_assert_eq!(x.shift(&s).unwrap().shift(&s).unwrap(), x);
    }

    #[test]
    fn precedes_implies_weight_order(x in point_strategy(12), y in point_strategy(12)) {
        if x.precedes(&y).unwrap() {
            prop_assert!(x.weight() <= y.weight());
        }
    }

    #[test]
    fn hybrid_draws_stay_in_the_spanned_subcube(
        x in point_strategy(70),
        y in point_strategy(70),
        seed in any::<u64>(),
    ) {
        let mut rng = ChaCha12Rng::seed_from_u64(seed);
        let z = hybrid_sample(&x, &y, false, &mut rng).unwrap();
        let lo = x.meet(&y).unwrap();
        let hi = x.join(&y).unwrap();
        prop_assert!(lo.precedes(&z).unwrap());
        prop_assert!(z.precedes(&hi).unwrap());
        // z agrees with x (and y) wherever they agree
        for i in 1..=70 {
            if x.get(i) == y.get(i) {
                prop_assert_eq!(z.get(i), x.get(i));
            }
        }
    }

    #[test]
    fn point_bitstring_round_trip(x in point_strategy(90)) {
        let s = x.to_bitstring();
        let back: Point = s.parse().unwrap();
        prop_assert_eq!(back, x);
    }

    #[test]
    fn varset_string_round_trip(s in varset_strategy(40)) {
        let text = s.to_string();
        prop_assert_eq!(VarSet::parse(40, &text).unwrap(), s);
    }

    #[test]
    fn truth_table_hex_round_trip(bits in prop::collection::vec(any::<bool>(), 64)) {
        let t = TruthTable::from_bools(6, &bits).unwrap();
        prop_assert_eq!(TruthTable::from_hex(6, &t.to_hex()).unwrap(), t);
    }

    #[test]
    fn function_documents_round_trip(
        weights in prop::collection::vec(-8i8..=8, 2..10),
        theta in -4.0f64..4.0,
        delta in 0.0f64..2.0,
    ) {
        prop_assume!(weights.iter().any(|w| *w != 0));
        let spec = FunctionSpec::Truncated {
            delta,
            inner: Box::new(FunctionSpec::Ltf {
                weights: weights.iter().map(|w| *w as f64).collect(),
                theta,
            }),
        };
        let json = spec.to_json();
        prop_assert_eq!(FunctionSpec::from_json(&json).unwrap(), spec.clone());
        let built = spec.build().unwrap();
        prop_assert_eq!(built.n() as usize, weights.len());
    }

    #[test]
    fn talagrand_eval_matches_unshortcircuited_reference(
        clauses in prop::collection::vec(prop::collection::vec(1u32..=10, 3), 1..6),
        idx in 0u64..1024,
    ) {
        let f = TalagrandDnf::new(10, 3, clauses.clone()).unwrap();
        let x = Point::from_index(10, idx);
        let clause_vals: Vec<bool> = clauses
            .iter()
            .map(|c| c.iter().map(|&v| x.get(v)).fold(true, |a, b| a & b))
            .collect();
        let reference = clause_vals.iter().fold(false, |a, b| a | b);
        prop_assert_eq!(f.eval(&x), reference);
    }

    #[test]
    fn truncation_matches_the_three_case_definition(
        bits in prop::collection::vec(any::<bool>(), 256),
        delta in 0.0f64..3.0,
        idx in 0u64..256,
    ) {
        let inner = TruthTable::from_bools(8, &bits).unwrap();
        let f = TruncatedFunction::new(inner.clone(), delta).unwrap();
        let x = Point::from_index(8, idx);
        let w = x.weight() as f64;
        let band = delta * 8f64.sqrt();
        let expect = if w < 4.0 - band {
            false
        } else if w > 4.0 + band {
            true
        } else {
            inner.eval(&x)
        };
        prop_assert_eq!(f.eval(&x), expect);
    }

    #[test]
    fn run_queries_equal_external_counter(
        bits in prop::collection::vec(any::<bool>(), 256),
        seed in any::<u64>(),
    ) {
        let f = TruthTable::from_bools(8, &bits).unwrap();
        let counted = CountingOracle::new(&f);
        let mut src = RngSource::new(ChaCha12Rng::seed_from_u64(seed));
        let record = bisection_tester(&counted, 0.5, &mut src);
        prop_assert_eq!(record.queries, counted.count());
        prop_assert_eq!(record.query_weights, counted.weight_range());
    }
}

/// Uniformity of the hybrid draw over its 2^d support at d = 4:
/// chi-square at significance 0.001 with 1e5 draws.
#[test]
fn hybrid_uniformity_chi_square_at_d4() {
    let x: Point = "00001111".parse().unwrap();
    let y: Point = "01011010".parse().unwrap(); // differs in coordinates 2,4,6,8
    assert_eq!(x.hamming(&y).unwrap(), 4);
    let support = hybrid_enumerate(&x, &y, 16).unwrap();
    let mut rng = ChaCha12Rng::seed_from_u64(0xD4);
    let mut counts = vec![0u64; 16];
    for _ in 0..100_000 {
        let z = hybrid_sample(&x, &y, false, &mut rng).unwrap();
        let slot = support.iter().position(|p| *p == z).expect("in support");
        counts[slot] += 1;
    }
    let test = chi_square_gof(&counts, &[1.0 / 16.0; 16]).unwrap();
    assert!(test.p_value > 0.001, "p = {}", test.p_value);

    // excluding endpoints: uniform over the remaining 14
    let mut counts = vec![0u64; 16];
    for _ in 0..100_000 {
        let z = hybrid_sample(&x, &y, true, &mut rng).unwrap();
        let slot = support.iter().position(|p| *p == z).unwrap();
        counts[slot] += 1;
    }
    let probs: Vec<f64> = support
        .iter()
        .map(|p| if *p == x || *p == y { 0.0 } else { 1.0 / 14.0 })
        .collect();
    let test = chi_square_gof(&counts, &probs).unwrap();
    assert!(test.p_value > 0.001, "excl p = {}", test.p_value);
}

/// Nonnegative weights always give a monotone LTF; substantial negative
/// mass (the paper's witness condition) always breaks monotonicity. A lone
/// small negative weight does not by itself decide it, so the biconditional
/// is checked on the two decidable sides.
#[test]
fn ltf_weight_sign_vs_monotonicity() {
    let mut rng = ChaCha12Rng::seed_from_u64(0xD5);
    for n in [4u32, 7, 10] {
        for _ in 0..20 {
            let weights: Vec<f64> = (0..n)
                .map(|_| rand::Rng::random_range(&mut rng, 0.0..4.0))
                .collect();
            if weights.iter().all(|w| *w == 0.0) {
                continue;
            }
            let f = monotest_core::functions::Ltf::new(weights, 0.0).unwrap();
            let table = TruthTable::from_oracle(&f).unwrap();
            assert!(monotest_core::exact::check_monotone(&table).is_none());
        }
        for _ in 0..20 {
            let mut weights: Vec<f64> = (0..n)
                .map(|_| rand::Rng::random_range(&mut rng, 0.5..2.0))
                .collect();
            // negative mass exceeding the max weight forces a violation
            weights[0] = -3.0;
            let f = monotest_core::functions::Ltf::new(weights, 0.0).unwrap();
            let table = TruthTable::from_oracle(&f).unwrap();
            let witness = monotest_core::exact::check_monotone(&table)
                .expect("negative-heavy LTF must be non-monotone");
            assert!(witness.verify(&f));
        }
    }
}

/// Estimate construction invariants.
#[test]
fn estimate_half_width_is_nonnegative() {
    for (succ, trials) in [(0u64, 10u64), (10, 10), (3, 7), (500, 1000)] {
        let est = Estimate::proportion(succ, trials);
        assert!(est.half_width >= 0.0);
        assert!((0.0..=1.0).contains(&est.value));
        assert_eq!(est.trials, trials);
    }
}
