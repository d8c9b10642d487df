//! The query-counted function-oracle abstraction and the concrete function
//! families: explicit truth tables, linear threshold functions, Talagrand
//! random DNFs, and the shift / truncation wrappers.
//!
//! All oracles expose outputs in {0,1} (as `bool`). An LTF computes over the
//! {-1,+1} view internally and maps -1 to 0 and +1 to 1 at the interface.

use std::cell::Cell;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::hypercube::{Point, VarSet};

/// Largest dimension representable as an explicit truth table.
pub const TABLE_MAX: u32 = 24;

/// Oracle access to a Boolean function f: {0,1}^n -> {0,1}.
///
/// Evaluation is deterministic: repeated evaluation at the same point
/// returns the same bit.
pub trait BooleanFunction {
    fn n(&self) -> u32;
    fn eval(&self, x: &Point) -> bool;
}

impl<T: BooleanFunction + ?Sized> BooleanFunction for &T {
    fn n(&self) -> u32 {
        (**self).n()
    }
    fn eval(&self, x: &Point) -> bool {
        (**self).eval(x)
    }
}

/// A shareable type-erased function value.
pub type SharedFn = Arc<dyn BooleanFunction + Send + Sync>;

impl BooleanFunction for SharedFn {
    fn n(&self) -> u32 {
        (**self).n()
    }
    fn eval(&self, x: &Point) -> bool {
        (**self).eval(x)
    }
}

/// Query counter attached per run: observes every `eval` call made through
/// it and records the count and the min/max Hamming weight of the queried
/// points. Run-local; never shared between concurrent trials.
pub struct CountingOracle<'a> {
    inner: &'a dyn BooleanFunction,
    count: Cell<u64>,
    min_weight: Cell<u32>,
    max_weight: Cell<u32>,
}

impl<'a> CountingOracle<'a> {
    pub fn new(inner: &'a dyn BooleanFunction) -> Self {
        CountingOracle {
            inner,
            count: Cell::new(0),
            min_weight: Cell::new(u32::MAX),
            max_weight: Cell::new(0),
        }
    }

    pub fn count(&self) -> u64 {
        self.count.get()
    }

    /// (min, max) Hamming weight over queried points; None before any query.
    pub fn weight_range(&self) -> Option<(u32, u32)> {
        if self.count.get() == 0 {
            None
        } else {
            Some((self.min_weight.get(), self.max_weight.get()))
        }
    }
}

impl BooleanFunction for CountingOracle<'_> {
    fn n(&self) -> u32 {
        self.inner.n()
    }

    fn eval(&self, x: &Point) -> bool {
        self.count.set(self.count.get() + 1);
        let w = x.weight();
        if w < self.min_weight.get() {
            self.min_weight.set(w);
        }
        if w > self.max_weight.get() {
            self.max_weight.set(w);
        }
        self.inner.eval(x)
    }
}

/// Explicit truth table over {0,1}^n for n <= 24.
#[derive(Clone, PartialEq, Eq)]
pub struct TruthTable {
    n: u32,
    words: Box<[u64]>,
}

fn table_words(n: u32) -> usize {
    let bits = 1usize << n;
    bits.div_ceil(64)
}

impl TruthTable {
    pub fn from_fn(n: u32, mut f: impl FnMut(&Point) -> bool) -> Result<TruthTable> {
        if n == 0 || n > TABLE_MAX {
            return Err(Error::TableTooLarge { n, limit: TABLE_MAX });
        }
        let mut words = vec![0u64; table_words(n)];
        for idx in 0..(1u64 << n) {
            if f(&Point::from_index(n, idx)) {
                words[(idx / 64) as usize] |= 1u64 << (idx % 64);
            }
        }
        Ok(TruthTable {
            n,
            words: words.into_boxed_slice(),
        })
    }

    /// Materialize any oracle into an explicit table.
    pub fn from_oracle(f: &dyn BooleanFunction) -> Result<TruthTable> {
        TruthTable::from_fn(f.n(), |x| f.eval(x))
    }

    pub fn from_bools(n: u32, bits: &[bool]) -> Result<TruthTable> {
        if n == 0 || n > TABLE_MAX {
            return Err(Error::TableTooLarge { n, limit: TABLE_MAX });
        }
        if bits.len() != 1usize << n {
            return Err(Error::InvalidParameter {
                name: "bits",
                reason: format!("expected 2^{} = {} entries, got {}", n, 1usize << n, bits.len()),
            });
        }
        TruthTable::from_fn(n, |x| bits[x.index() as usize])
    }

    pub fn n(&self) -> u32 {
        self.n
    }

    pub fn get_index(&self, idx: u64) -> bool {
        debug_assert!(idx < (1u64 << self.n));
        (self.words[(idx / 64) as usize] >> (idx % 64)) & 1 == 1
    }

    /// Number of points mapped to 1.
    pub fn ones_count(&self) -> u64 {
        self.words.iter().map(|w| w.count_ones() as u64).sum()
    }

    /// The pointwise monotone closure: g(x) = OR of f(y) over y below x.
    /// Always monotone; equals f iff f is monotone.
    pub fn monotone_closure(&self) -> TruthTable {
        let size = 1u64 << self.n;
        let mut bits: Vec<bool> = (0..size).map(|i| self.get_index(i)).collect();
        for b in 0..self.n {
            let mask = 1u64 << b;
            for idx in 0..size {
                if idx & mask != 0 && bits[(idx ^ mask) as usize] {
                    bits[idx as usize] = true;
                }
            }
        }
        TruthTable::from_bools(self.n, &bits).expect("dimensions preserved")
    }

    /// Hex encoding of the table: byte k holds indices 8k..8k+8 (index 8k in
    /// the least significant bit), bytes in ascending order.
    pub fn to_hex(&self) -> String {
        let bytes = (1usize << self.n).div_ceil(8);
        let mut out = String::with_capacity(bytes * 2);
        for k in 0..bytes {
            let word = self.words[k / 8];
            let byte = ((word >> ((k % 8) * 8)) & 0xff) as u8;
            out.push_str(&format!("{byte:02x}"));
        }
        out
    }

    pub fn from_hex(n: u32, hex: &str) -> Result<TruthTable> {
        if n == 0 || n > TABLE_MAX {
            return Err(Error::TableTooLarge { n, limit: TABLE_MAX });
        }
        let bytes = (1usize << n).div_ceil(8);
        if hex.len() != bytes * 2 {
            return Err(Error::Parse(format!(
                "hex table for n = {n} must have {} chars, got {}",
                bytes * 2,
                hex.len()
            )));
        }
        let mut words = vec![0u64; table_words(n)];
        for k in 0..bytes {
            let byte = u8::from_str_radix(&hex[2 * k..2 * k + 2], 16)
                .map_err(|e| Error::Parse(format!("invalid hex byte at {k}: {e}")))?;
            words[k / 8] |= (byte as u64) << ((k % 8) * 8);
        }
        // reject stray bits above 2^n for short tables
        if (1usize << n) < 8 {
            let mask = (1u64 << (1u64 << n)) - 1;
            if words[0] & !mask != 0 {
                return Err(Error::Parse("hex table has bits beyond 2^n".into()));
            }
        }
        Ok(TruthTable {
            n,
            words: words.into_boxed_slice(),
        })
    }

    pub fn to_spec(&self) -> FunctionSpec {
        FunctionSpec::TruthTable {
            n: self.n,
            table: self.to_hex(),
        }
    }
}

impl BooleanFunction for TruthTable {
    fn n(&self) -> u32 {
        self.n
    }

    fn eval(&self, x: &Point) -> bool {
        self.get_index(x.index())
    }
}

impl std::fmt::Debug for TruthTable {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "TruthTable(n={}, {})", self.n, self.to_hex())
    }
}

/// Linear threshold function f(x) = sgn(sum w_i x_i - theta) over the
/// {-1,+1} view, with sgn(0) = +1 (many texts use sgn(0) = -1; here the tie
/// maps to output 1).
#[derive(Clone, Debug, PartialEq)]
pub struct Ltf {
    weights: Vec<f64>,
    theta: f64,
    weight_sum: f64,
}

impl Ltf {
    pub fn new(weights: Vec<f64>, theta: f64) -> Result<Ltf> {
        if weights.is_empty() || weights.iter().all(|w| *w == 0.0) {
            return Err(Error::DegenerateWeights);
        }
        let weight_sum = weights.iter().sum();
        Ok(Ltf {
            weights,
            theta,
            weight_sum,
        })
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn theta(&self) -> f64 {
        self.theta
    }

    /// sum_i w_i x~_i - theta, where x~ is the {-1,+1} view of x.
    pub fn margin(&self, x: &Point) -> f64 {
        let selected: f64 = x.iter_ones().map(|i| self.weights[(i - 1) as usize]).sum();
        2.0 * selected - self.weight_sum - self.theta
    }

    pub fn to_spec(&self) -> FunctionSpec {
        FunctionSpec::Ltf {
            weights: self.weights.clone(),
            theta: self.theta,
        }
    }
}

impl BooleanFunction for Ltf {
    fn n(&self) -> u32 {
        self.weights.len() as u32
    }

    fn eval(&self, x: &Point) -> bool {
        self.margin(x) >= 0.0
    }
}

/// max_i |w_i| / ||w||_2. A function is tau-regular iff this is <= tau.
pub fn regularity_parameter(weights: &[f64]) -> Result<f64> {
    let norm_sq: f64 = weights.iter().map(|w| w * w).sum();
    if weights.is_empty() || norm_sq == 0.0 {
        return Err(Error::DegenerateWeights);
    }
    let max_abs = weights.iter().fold(0.0f64, |m, w| m.max(w.abs()));
    Ok(max_abs / norm_sq.sqrt())
}

/// Disjunction of conjunctive clauses; each clause is a width-w multiset map
/// into [n] (repeats allowed), satisfied when every listed variable is 1.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TalagrandDnf {
    n: u32,
    width: u32,
    clauses: Vec<Vec<u32>>,
}

impl TalagrandDnf {
    pub fn new(n: u32, width: u32, clauses: Vec<Vec<u32>>) -> Result<TalagrandDnf> {
        if clauses.is_empty() {
            return Err(Error::InvalidParameter {
                name: "clauses",
                reason: "at least one clause required".into(),
            });
        }
        if width == 0 {
            return Err(Error::InvalidParameter {
                name: "width",
                reason: "clause width must be at least 1".into(),
            });
        }
        for (j, clause) in clauses.iter().enumerate() {
            if clause.len() != width as usize {
                return Err(Error::InvalidParameter {
                    name: "clauses",
                    reason: format!("clause {j} has {} entries, expected {width}", clause.len()),
                });
            }
            for &v in clause {
                if v < 1 || v > n {
                    return Err(Error::CoordinateOutOfRange { coord: v, n });
                }
            }
        }
        Ok(TalagrandDnf { n, width, clauses })
    }

    pub fn width(&self) -> u32 {
        self.width
    }

    pub fn clauses(&self) -> &[Vec<u32>] {
        &self.clauses
    }

    /// The set of variables mentioned by any clause.
    pub fn variables(&self) -> VarSet {
        let mut set = VarSet::empty(self.n);
        for clause in &self.clauses {
            for &v in clause {
                set.insert(v);
            }
        }
        set
    }

    pub fn to_spec(&self) -> FunctionSpec {
        FunctionSpec::TalagrandDnf {
            n: self.n,
            width: self.width,
            clauses: self.clauses.clone(),
        }
    }
}

impl BooleanFunction for TalagrandDnf {
    fn n(&self) -> u32 {
        self.n
    }

    fn eval(&self, x: &Point) -> bool {
        self.clauses
            .iter()
            .any(|clause| clause.iter().all(|&v| x.get(v)))
    }
}

/// g(x) = inner(x^S): the inner function with the variables in S negated.
#[derive(Clone, Debug)]
pub struct ShiftedFunction<F> {
    inner: F,
    shift: VarSet,
}

impl<F: BooleanFunction> ShiftedFunction<F> {
    pub fn new(inner: F, shift: VarSet) -> Result<ShiftedFunction<F>> {
        if inner.n() != shift.n() {
            return Err(Error::DimensionMismatch {
                left: inner.n(),
                right: shift.n(),
            });
        }
        Ok(ShiftedFunction { inner, shift })
    }

    pub fn inner(&self) -> &F {
        &self.inner
    }

    pub fn shift_set(&self) -> &VarSet {
        &self.shift
    }
}

impl<F: BooleanFunction> BooleanFunction for ShiftedFunction<F> {
    fn n(&self) -> u32 {
        self.inner.n()
    }

    fn eval(&self, x: &Point) -> bool {
        self.inner
            .eval(&x.shift(&self.shift).expect("dimensions checked at construction"))
    }
}

/// Forces output 0 below the Hamming band n/2 +- delta*sqrt(n), 1 above it,
/// and delegates to the inner function within the band.
#[derive(Clone, Debug)]
pub struct TruncatedFunction<F> {
    inner: F,
    delta: f64,
    low: f64,
    high: f64,
}

impl<F: BooleanFunction> TruncatedFunction<F> {
    pub fn new(inner: F, delta: f64) -> Result<TruncatedFunction<F>> {
        if !(delta >= 0.0) {
            return Err(Error::InvalidParameter {
                name: "delta",
                reason: format!("truncation radius must be nonnegative, got {delta}"),
            });
        }
        let n = inner.n() as f64;
        let band = delta * n.sqrt();
        Ok(TruncatedFunction {
            inner,
            delta,
            low: n / 2.0 - band,
            high: n / 2.0 + band,
        })
    }

    pub fn inner(&self) -> &F {
        &self.inner
    }

    pub fn delta(&self) -> f64 {
        self.delta
    }
}

impl<F: BooleanFunction> BooleanFunction for TruncatedFunction<F> {
    fn n(&self) -> u32 {
        self.inner.n()
    }

    fn eval(&self, x: &Point) -> bool {
        let w = x.weight() as f64;
        if w < self.low {
            false
        } else if w > self.high {
            true
        } else {
            self.inner.eval(x)
        }
    }
}

/// Serializable function document: kind tag plus parameters; wrappers nest
/// their inner document.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum FunctionSpec {
    TruthTable {
        n: u32,
        table: String,
    },
    Ltf {
        weights: Vec<f64>,
        theta: f64,
    },
    TalagrandDnf {
        n: u32,
        width: u32,
        clauses: Vec<Vec<u32>>,
    },
    Shifted {
        shift: Vec<u32>,
        inner: Box<FunctionSpec>,
    },
    Truncated {
        delta: f64,
        inner: Box<FunctionSpec>,
    },
}

impl FunctionSpec {
    pub fn n(&self) -> u32 {
        match self {
            FunctionSpec::TruthTable { n, .. } => *n,
            FunctionSpec::Ltf { weights, .. } => weights.len() as u32,
            FunctionSpec::TalagrandDnf { n, .. } => *n,
            FunctionSpec::Shifted { inner, .. } => inner.n(),
            FunctionSpec::Truncated { inner, .. } => inner.n(),
        }
    }

    /// Instantiate the documented function.
    pub fn build(&self) -> Result<SharedFn> {
        match self {
            FunctionSpec::TruthTable { n, table } => {
                Ok(Arc::new(TruthTable::from_hex(*n, table)?))
            }
            FunctionSpec::Ltf { weights, theta } => Ok(Arc::new(Ltf::new(weights.clone(), *theta)?)),
            FunctionSpec::TalagrandDnf { n, width, clauses } => {
                Ok(Arc::new(TalagrandDnf::new(*n, *width, clauses.clone())?))
            }
            FunctionSpec::Shifted { shift, inner } => {
                let f = inner.build()?;
                let set = VarSet::from_members(f.n(), shift)?;
                Ok(Arc::new(ShiftedFunction::new(f, set)?))
            }
            FunctionSpec::Truncated { delta, inner } => {
                let f = inner.build()?;
                Ok(Arc::new(TruncatedFunction::new(f, *delta)?))
            }
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("function documents always serialize")
    }

    pub fn from_json(json: &str) -> Result<FunctionSpec> {
        serde_json::from_str(json).map_err(|e| Error::FunctionDocument(e.to_string()))
    }
}
