//! The monotonicity testers: the non-adaptive edge tester, the adaptive
//! bisection tester, and the modified bisection tester with its k-capped
//! loop, balance gate, and final subcube enumeration.
//!
//! Every run is instrumented: verdict with a re-verifiable witness on
//! reject, query count, min/max queried Hamming weight, terminal variable,
//! and the phase in which the run ended. A run's query count equals the
//! number of `eval` calls it makes, so rejects carry witnesses built from
//! values observed during the run; callers re-verify witnesses against the
//! oracle where needed.

use rand::Rng;

use crate::error::{Error, Result};
use crate::exact::ViolationEdge;
use crate::functions::{BooleanFunction, CountingOracle};
use crate::hypercube::hybrid_enumerate;
use crate::random::{DrawSource, RngSource};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Decision {
    Accept,
    Reject,
}

/// Tester outcome. Rejections always carry a violated-edge witness.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Verdict {
    pub decision: Decision,
    pub witness: Option<ViolationEdge>,
}

impl Verdict {
    pub fn accept() -> Verdict {
        Verdict {
            decision: Decision::Accept,
            witness: None,
        }
    }

    pub fn reject(witness: ViolationEdge) -> Verdict {
        Verdict {
            decision: Decision::Reject,
            witness: Some(witness),
        }
    }

    pub fn is_reject(&self) -> bool {
        self.decision == Decision::Reject
    }
}

/// Where a run ended.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Phase {
    /// The pair-search budget ran out without an f(x) != f(y) pair.
    NoPair,
    /// The differing set after the loop exceeded the (3/2) n / 2^k gate.
    BalanceAccept,
    /// The final subcube was larger than the enumeration cap.
    CapAccept,
    /// The run reached an edge or enumerated subcube and checked it.
    EdgeCheck,
}

impl Phase {
    pub fn as_str(&self) -> &'static str {
        match self {
            Phase::NoPair => "no-pair",
            Phase::BalanceAccept => "balance-accept",
            Phase::CapAccept => "cap-accept",
            Phase::EdgeCheck => "edge-check",
        }
    }
}

impl std::str::FromStr for Phase {
    type Err = Error;

    fn from_str(s: &str) -> Result<Phase> {
        match s {
            "no-pair" => Ok(Phase::NoPair),
            "balance-accept" => Ok(Phase::BalanceAccept),
            "cap-accept" => Ok(Phase::CapAccept),
            "edge-check" => Ok(Phase::EdgeCheck),
            _ => Err(Error::Parse(format!("unknown phase {s:?}"))),
        }
    }
}

/// One instrumented tester execution.
#[derive(Debug, Clone)]
pub struct RunRecord {
    pub n: u32,
    pub verdict: Verdict,
    pub queries: u64,
    /// (min, max) Hamming weight over all queried points; None when the run
    /// made no queries.
    pub query_weights: Option<(u32, u32)>,
    /// The single differing coordinate of the final edge, when the run
    /// terminated in one.
    pub terminal_variable: Option<u32>,
    pub phase: Phase,
    /// Hybrid-halving loop iterations executed.
    pub iterations: u32,
    /// Whether hybrid draws excluded the endpoints (fixed true here;
    /// recorded per run for the logs).
    pub exclude_endpoints: bool,
    /// Modified bisection only: |x xor y| after the loop.
    pub final_diff_size: Option<u64>,
    /// Modified bisection only: |x and y| after the loop. The balance gate
    /// acts on the differing-set size; both sizes are logged.
    pub final_intersection_size: Option<u64>,
}

impl RunRecord {
    fn new(n: u32, phase: Phase, verdict: Verdict, counted: &CountingOracle<'_>) -> RunRecord {
        RunRecord {
            n,
            verdict,
            queries: counted.count(),
            query_weights: counted.weight_range(),
            terminal_variable: None,
            phase,
            iterations: 0,
            exclude_endpoints: true,
            final_diff_size: None,
            final_intersection_size: None,
        }
    }
}

/// Parameters of the modified bisection tester.
///
/// Theory mode derives c = eps^2 / (512 tau^2 ln(8/eps)),
/// zeta = eps / sqrt(512 ln(8/eps)) and
/// k = floor(log2(c n) - max(log2(8 tau / zeta), kappa)); scaled mode takes
/// the constants directly so experiments can run at desk-scale n without
/// altering the algorithm's structure.
#[derive(Debug, Clone, PartialEq)]
pub struct Alg2Params {
    pub epsilon: f64,
    pub tau: f64,
    pub c: f64,
    pub zeta: f64,
    pub kappa: u32,
    pub k: u32,
    pub hybrid_cap: u64,
}

/// Default cap on the final-cube enumeration.
pub const DEFAULT_HYBRID_CAP: u64 = 1 << 16;

impl Alg2Params {
    pub fn from_theory(
        epsilon: f64,
        tau: f64,
        kappa: u32,
        n: u64,
        hybrid_cap: u64,
    ) -> Result<Alg2Params> {
        if !(epsilon > 0.0 && epsilon < 8.0) {
            return Err(Error::InvalidParameter {
                name: "epsilon",
                reason: format!("need 0 < eps < 8, got {epsilon}"),
            });
        }
        if !(tau > 0.0) {
            return Err(Error::InvalidParameter {
                name: "tau",
                reason: format!("need tau > 0, got {tau}"),
            });
        }
        let log_term = (8.0 / epsilon).ln();
        let c = epsilon * epsilon / (512.0 * tau * tau * log_term);
        let zeta = epsilon / (512.0 * log_term).sqrt();
        let k_real = ((c * n as f64).log2() - (8.0 * tau / zeta).log2().max(kappa as f64)).floor();
        if k_real < 0.0 {
            return Err(Error::BelowMinimumDimension {
                k: k_real as i64,
                n,
            });
        }
        Ok(Alg2Params {
            epsilon,
            tau,
            c,
            zeta,
            kappa,
            k: k_real as u32,
            hybrid_cap,
        })
    }

    /// Scaled mode: constants supplied directly.
    pub fn scaled(
        epsilon: f64,
        tau: f64,
        c: f64,
        zeta: f64,
        k: u32,
        hybrid_cap: u64,
    ) -> Result<Alg2Params> {
        if !(epsilon > 0.0) {
            return Err(Error::InvalidParameter {
                name: "epsilon",
                reason: format!("need eps > 0, got {epsilon}"),
            });
        }
        if !(c > 0.0 && zeta > 0.0) {
            return Err(Error::InvalidParameter {
                name: "c",
                reason: "scaled constants c and zeta must be positive".into(),
            });
        }
        Ok(Alg2Params {
            epsilon,
            tau,
            c,
            zeta,
            kappa: 0,
            k,
            hybrid_cap,
        })
    }

    /// Pair-search budget: ceil(8 / eps) draws.
    pub fn pair_budget(&self) -> u64 {
        pair_budget(self.epsilon)
    }

    /// Upper bound on queries for any single run:
    /// ceil(8/eps) + 1 + k + hybrid_cap.
    pub fn query_budget(&self) -> u64 {
        self.pair_budget() + 1 + self.k as u64 + self.hybrid_cap
    }
}

fn pair_budget(epsilon: f64) -> u64 {
    (8.0 / epsilon).ceil() as u64
}

/// Non-adaptive edge tester: samples ceil(2n / eps) covering edges
/// uniformly and rejects on the first violated one.
pub fn edge_tester<R: Rng + ?Sized>(
    f: &dyn BooleanFunction,
    epsilon: f64,
    rng: &mut R,
) -> RunRecord {
    assert!(epsilon > 0.0, "epsilon must be positive");
    let n = f.n();
    let counted = CountingOracle::new(f);
    let probes = (2.0 * n as f64 / epsilon).ceil() as u64;
    for _ in 0..probes {
        let x = crate::hypercube::Point::random(n, rng);
        let coord = rng.random_range(1..=n);
        let lower = x.with(coord, false);
        let upper = x.with(coord, true);
        let f_lower = counted.eval(&lower);
        let f_upper = counted.eval(&upper);
        if f_lower && !f_upper {
            let witness = ViolationEdge::new(lower, upper).expect("covering pair by construction");
            let mut record = RunRecord::new(n, Phase::EdgeCheck, Verdict::reject(witness), &counted);
            record.terminal_variable = Some(coord);
            return record;
        }
    }
    RunRecord::new(n, Phase::EdgeCheck, Verdict::accept(), &counted)
}

/// The bisection tester: draw pairs until f(x) = 0 and f(y) = 1 (budget
/// ceil(8/eps) pairs), then repeatedly halve the differing set with
/// endpoint-excluding hybrid draws until it reaches a single edge; accept
/// iff that edge is order-consistent.
pub fn bisection_tester<S: DrawSource + ?Sized>(
    f: &dyn BooleanFunction,
    epsilon: f64,
    src: &mut S,
) -> RunRecord {
    assert!(epsilon > 0.0, "epsilon must be positive");
    let n = f.n();
    let counted = CountingOracle::new(f);

    let mut pair = None;
    for _ in 0..pair_budget(epsilon) {
        let x = src.draw_point(n);
        let y = src.draw_point(n);
        let fx = counted.eval(&x);
        let fy = counted.eval(&y);
        if !fx && fy {
            pair = Some((x, y));
            break;
        }
    }
    let Some((mut x, mut y)) = pair else {
        return RunRecord::new(n, Phase::NoPair, Verdict::accept(), &counted);
    };

    // Invariant through the loop: f(x) = 0, f(y) = 1, so the differing set
    // strictly shrinks at every endpoint-excluding hybrid step.
    let mut iterations = 0u32;
    while x.hamming(&y).expect("same dimension") > 1 {
        let z = src.draw_hybrid(&x, &y, true);
        if counted.eval(&z) {
            y = z;
        } else {
            x = z;
        }
        iterations += 1;
    }

    let variable = x.diff(&y).expect("same dimension").members()[0];
    let verdict = if x.precedes(&y).expect("same dimension") {
        Verdict::accept()
    } else {
        // y < x with f(y) = 1 and f(x) = 0 observed this run
        Verdict::reject(ViolationEdge::new(y.clone(), x.clone()).expect("covering pair"))
    };
    let mut record = RunRecord::new(n, Phase::EdgeCheck, verdict, &counted);
    record.terminal_variable = Some(variable);
    record.iterations = iterations;
    record
}

/// The modified bisection tester: one oriented pair search, exactly k
/// hybrid-halving iterations (stopping early only if the differing set
/// reaches a single coordinate), a balance gate on the differing-set size,
/// and an exhaustive check of the final subcube.
pub fn modified_bisection_tester<S: DrawSource + ?Sized>(
    f: &dyn BooleanFunction,
    params: &Alg2Params,
    src: &mut S,
) -> RunRecord {
    let n = f.n();
    let counted = CountingOracle::new(f);

    let x0 = src.draw_point(n);
    let fx0 = counted.eval(&x0);
    let mut other = None;
    for _ in 0..params.pair_budget() {
        let y = src.draw_point(n);
        if counted.eval(&y) != fx0 {
            other = Some(y);
            break;
        }
    }
    let Some(y0) = other else {
        return RunRecord::new(n, Phase::NoPair, Verdict::accept(), &counted);
    };

    // Orient so f(x) = 0 and f(y) = 1.
    let (mut x, mut y) = if fx0 { (y0, x0) } else { (x0, y0) };

    let mut iterations = 0u32;
    for _ in 0..params.k {
        if x.hamming(&y).expect("same dimension") <= 1 {
            break;
        }
        let z = src.draw_hybrid(&x, &y, true);
        if counted.eval(&z) {
            y = z;
        } else {
            x = z;
        }
        iterations += 1;
    }

    let diff = x.diff(&y).expect("same dimension");
    let diff_size = diff.len() as u64;
    let intersection_size = x.meet(&y).expect("same dimension").weight() as u64;
    let finish = |phase: Phase, verdict: Verdict, terminal: Option<u32>| {
        let mut record = RunRecord::new(n, phase, verdict, &counted);
        record.terminal_variable = terminal;
        record.iterations = iterations;
        record.final_diff_size = Some(diff_size);
        record.final_intersection_size = Some(intersection_size);
        record
    };

    let gate = 1.5 * n as f64 / 2f64.powi(params.k as i32);
    if diff_size as f64 > gate {
        return finish(Phase::BalanceAccept, Verdict::accept(), None);
    }

    let points = match hybrid_enumerate(&x, &y, params.hybrid_cap) {
        Ok(points) => points,
        Err(_) => return finish(Phase::CapAccept, Verdict::accept(), None),
    };
    let values: Vec<bool> = points.iter().map(|p| counted.eval(p)).collect();

    // Covering edges of the subcube: index c (bit j = value of the j-th
    // smallest differing coordinate) against c | 1 << j.
    let d = diff_size as u32;
    for c in 0..(1u64 << d) {
        if !values[c as usize] {
            continue;
        }
        for j in 0..d {
            let upper = c | (1u64 << j);
            if upper != c && !values[upper as usize] {
                let witness =
                    ViolationEdge::new(points[c as usize].clone(), points[upper as usize].clone())
                        .expect("covering pair by construction");
                let variable = witness.variable();
                return finish(Phase::EdgeCheck, Verdict::reject(witness), Some(variable));
            }
        }
    }
    finish(Phase::EdgeCheck, Verdict::accept(), None)
}

/// A tester configuration, runnable against any oracle.
#[derive(Debug, Clone, PartialEq)]
pub enum Tester {
    Edge { epsilon: f64 },
    Bisection { epsilon: f64 },
    ModifiedBisection { params: Alg2Params },
}

impl Tester {
    pub fn run<R: Rng + ?Sized>(&self, f: &dyn BooleanFunction, rng: &mut R) -> RunRecord {
        match self {
            Tester::Edge { epsilon } => edge_tester(f, *epsilon, rng),
            Tester::Bisection { epsilon } => {
                bisection_tester(f, *epsilon, &mut RngSource::new(rng))
            }
            Tester::ModifiedBisection { params } => {
                modified_bisection_tester(f, params, &mut RngSource::new(rng))
            }
        }
    }
}

/// Outcome of `repetitions` independent runs, rejecting iff any run
/// rejects. Stops at the first rejection; query counts sum over the runs
/// executed.
#[derive(Debug, Clone)]
pub struct AmplifiedRun {
    pub verdict: Verdict,
    pub queries: u64,
    pub runs_executed: u32,
}

pub fn amplify<R: Rng + ?Sized>(
    tester: &Tester,
    repetitions: u32,
    f: &dyn BooleanFunction,
    rng: &mut R,
) -> AmplifiedRun {
    assert!(repetitions >= 1, "at least one repetition required");
    let mut queries = 0u64;
    for rep in 1..=repetitions {
        let record = tester.run(f, rng);
        queries += record.queries;
        if record.verdict.is_reject() {
            return AmplifiedRun {
                verdict: record.verdict,
                queries,
                runs_executed: rep,
            };
        }
    }
    AmplifiedRun {
        verdict: Verdict::accept(),
        queries,
        runs_executed: repetitions,
    }
}

/// True iff every queried point of the run had Hamming weight within
/// delta_band * sqrt(n) of n/2. Vacuously true for runs with no queries.
pub fn balance_audit(record: &RunRecord, delta_band: f64) -> bool {
    let Some((lo, hi)) = record.query_weights else {
        return true;
    };
    let half = record.n as f64 / 2.0;
    let band = delta_band * (record.n as f64).sqrt();
    (lo as f64 - half).abs() <= band && (hi as f64 - half).abs() <= band
}
