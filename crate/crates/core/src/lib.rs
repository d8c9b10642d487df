//! A monotonicity-testing laboratory for Boolean functions on the
//! hypercube: adaptive bisection testers, the function families they are
//! measured against, exact small-instance oracles that certify the
//! probabilistic claims, and the randomized bisection process behind the
//! testers' analysis.

// Negated float comparisons here are NaN guards: validation must fail on
// NaN parameters, and `!(x > y)` does while `x <= y` does not.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod calibration;
pub mod error;
pub mod estimators;
pub mod exact;
pub mod functions;
pub mod generators;
pub mod hypercube;
pub mod process_sim;
pub mod random;
pub mod stats;
pub mod testers;

pub use error::{Error, Result};
pub use estimators::{Estimate, OutputHistogram};
pub use exact::{ViolationEdge, ViolationPair};
pub use functions::{
    BooleanFunction, CountingOracle, FunctionSpec, Ltf, SharedFn, ShiftedFunction, TalagrandDnf,
    TruncatedFunction, TruthTable,
};
pub use hypercube::{Point, VarSet};
pub use testers::{Alg2Params, Decision, Phase, RunRecord, Tester, Verdict};
