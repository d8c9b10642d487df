//! Ground-truth computations on explicit truth tables: monotonicity
//! checking, exact distance to monotone, exact noise sensitivity, and
//! violation certificates for LTFs with heavy negative weight.

use crate::error::{Error, Result};
use crate::functions::{BooleanFunction, Ltf, TruthTable};
use crate::hypercube::Point;

/// Largest dimension accepted by the flow-based distance oracle and the
/// spectral noise-sensitivity oracle.
pub const ORACLE_MAX: u32 = 20;

/// A violated covering edge: lower precedes upper, they differ in exactly
/// one coordinate, and f(lower) = 1 > f(upper) = 0.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ViolationEdge {
    pub lower: Point,
    pub upper: Point,
}

impl ViolationEdge {
    /// Checks the order-and-distance invariant; the value invariant is
    /// function-dependent and checked by [`ViolationEdge::verify`].
    pub fn new(lower: Point, upper: Point) -> Result<ViolationEdge> {
        if lower.hamming(&upper)? != 1 || !lower.precedes(&upper)? {
            return Err(Error::InvalidParameter {
                name: "edge",
                reason: "endpoints must form a covering pair".into(),
            });
        }
        Ok(ViolationEdge { lower, upper })
    }

    /// The single coordinate where the endpoints differ.
    pub fn variable(&self) -> u32 {
        self.lower
            .diff(&self.upper)
            .expect("endpoints share a dimension")
            .members()[0]
    }

    /// Re-evaluates f on both endpoints and confirms the violation.
    pub fn verify(&self, f: &dyn BooleanFunction) -> bool {
        f.eval(&self.lower) && !f.eval(&self.upper)
    }
}

/// A violated comparable pair (not necessarily an edge): lower precedes
/// upper and f(lower) = 1 > f(upper) = 0.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ViolationPair {
    pub lower: Point,
    pub upper: Point,
}

impl ViolationPair {
    pub fn verify(&self, f: &dyn BooleanFunction) -> bool {
        self.lower.precedes(&self.upper).unwrap_or(false)
            && f.eval(&self.lower)
            && !f.eval(&self.upper)
    }
}

/// Scans the n * 2^(n-1) covering edges (sufficient by transitivity) and
/// returns a witness for the first violation, or None when f is monotone.
pub fn check_monotone(f: &TruthTable) -> Option<ViolationEdge> {
    let n = f.n();
    let size = 1u64 << n;
    for idx in 0..size {
        if !f.get_index(idx) {
            continue;
        }
        for b in 0..n {
            let mask = 1u64 << b;
            if idx & mask == 0 && !f.get_index(idx | mask) {
                return Some(ViolationEdge {
                    lower: Point::from_index(n, idx),
                    upper: Point::from_index(n, idx | mask),
                });
            }
        }
    }
    None
}

/// The result of the exact distance computation: the minimum number of
/// point flips, together with a closest monotone function realizing it.
#[derive(Debug, Clone)]
pub struct Monotonization {
    pub distance: u64,
    pub table: TruthTable,
}

/// Minimum number of points whose value must change to make f monotone.
///
/// Computed as a minimum s-t cut over the covering-edge order: points with
/// f = 1 hang off the source with unit capacity, points with f = 0 feed the
/// sink with unit capacity, and every covering edge x < y carries infinite
/// capacity upward, so any finite cut's source side is an upward-closed set
/// U and the cut value is |U delta f^-1(1)|.
pub fn distance_to_monotone(f: &TruthTable) -> Result<u64> {
    Ok(monotonize(f)?.distance)
}

/// As [`distance_to_monotone`], also reading the optimal upward-closed set
/// back as a monotone truth table.
pub fn monotonize(f: &TruthTable) -> Result<Monotonization> {
    let n = f.n();
    if n > ORACLE_MAX {
        return Err(Error::TableTooLarge {
            n,
            limit: ORACLE_MAX,
        });
    }
    let size = 1u64 << n;
    let source = size as u32;
    let sink = source + 1;

    let mut net = FlowNetwork::new(size as usize + 2);
    for idx in 0..size {
        if f.get_index(idx) {
            net.add_edge(source, idx as u32, 1);
        } else {
            net.add_edge(idx as u32, sink, 1);
        }
        for b in 0..n {
            let mask = 1u64 << b;
            if idx & mask == 0 {
                net.add_edge(idx as u32, (idx | mask) as u32, INF);
            }
        }
    }
    let flow = net.max_flow(source, sink);

    let reachable = net.residual_reachable(source);
    let table = TruthTable::from_fn(n, |x| reachable[x.index() as usize])?;
    debug_assert!(check_monotone(&table).is_none());
    Ok(Monotonization {
        distance: flow,
        table,
    })
}

const INF: u32 = u32::MAX;

/// Dinic's algorithm on a CSR adjacency built from an edge list.
struct FlowNetwork {
    n_nodes: usize,
    raw: Vec<(u32, u32, u32)>,
    head: Vec<u32>,
    adj: Vec<u32>,
    to: Vec<u32>,
    cap: Vec<u32>,
}

impl FlowNetwork {
    fn new(n_nodes: usize) -> FlowNetwork {
        FlowNetwork {
            n_nodes,
            raw: Vec::new(),
            head: Vec::new(),
            adj: Vec::new(),
            to: Vec::new(),
            cap: Vec::new(),
        }
    }

    fn add_edge(&mut self, from: u32, to: u32, cap: u32) {
        self.raw.push((from, to, cap));
    }

    fn build(&mut self) {
        let m = self.raw.len();
        self.to = vec![0; 2 * m];
        self.cap = vec![0; 2 * m];
        let mut degree = vec![0u32; self.n_nodes];
        for &(from, to, _) in &self.raw {
            degree[from as usize] += 1;
            degree[to as usize] += 1;
        }
        self.head = vec![0u32; self.n_nodes + 1];
        for (v, d) in degree.iter().enumerate() {
            self.head[v + 1] = self.head[v] + d;
        }
        self.adj = vec![0u32; 2 * m];
        let mut cursor = self.head.clone();
        for (i, &(from, to, cap)) in self.raw.iter().enumerate() {
            let fwd = (2 * i) as u32;
            let bwd = (2 * i + 1) as u32;
            self.to[fwd as usize] = to;
            self.cap[fwd as usize] = cap;
            self.to[bwd as usize] = from;
            self.cap[bwd as usize] = 0;
            self.adj[cursor[from as usize] as usize] = fwd;
            cursor[from as usize] += 1;
            self.adj[cursor[to as usize] as usize] = bwd;
            cursor[to as usize] += 1;
        }
        self.raw = Vec::new();
    }

    fn max_flow(&mut self, source: u32, sink: u32) -> u64 {
        self.build();
        let mut total = 0u64;
        let mut level = vec![-1i32; self.n_nodes];
        let mut queue: Vec<u32> = Vec::with_capacity(self.n_nodes);
        loop {
            level.iter_mut().for_each(|l| *l = -1);
            queue.clear();
            queue.push(source);
            level[source as usize] = 0;
            let mut qi = 0;
            while qi < queue.len() {
                let v = queue[qi];
                qi += 1;
                for e in self.head[v as usize]..self.head[v as usize + 1] {
                    let id = self.adj[e as usize] as usize;
                    let u = self.to[id];
                    if self.cap[id] > 0 && level[u as usize] < 0 {
                        level[u as usize] = level[v as usize] + 1;
                        queue.push(u);
                    }
                }
            }
            if level[sink as usize] < 0 {
                break;
            }
            let mut next = self.head.clone();
            loop {
                let pushed = self.dfs(source, sink, u32::MAX, &level, &mut next);
                if pushed == 0 {
                    break;
                }
                total += pushed as u64;
            }
        }
        total
    }

    fn dfs(&mut self, v: u32, sink: u32, limit: u32, level: &[i32], next: &mut [u32]) -> u32 {
        if v == sink {
            return limit;
        }
        while next[v as usize] < self.head[v as usize + 1] {
            let id = self.adj[next[v as usize] as usize] as usize;
            let u = self.to[id];
            if self.cap[id] > 0 && level[u as usize] == level[v as usize] + 1 {
                let pushed = self.dfs(u, sink, limit.min(self.cap[id]), level, next);
                if pushed > 0 {
                    self.cap[id] -= pushed;
                    self.cap[id ^ 1] += pushed;
                    return pushed;
                }
            }
            next[v as usize] += 1;
        }
        0
    }

    /// Nodes reachable from `source` in the residual graph, as a node mask.
    fn residual_reachable(&self, source: u32) -> Vec<bool> {
        let mut seen = vec![false; self.n_nodes];
        let mut stack = vec![source];
        seen[source as usize] = true;
        while let Some(v) = stack.pop() {
            for e in self.head[v as usize]..self.head[v as usize + 1] {
                let id = self.adj[e as usize] as usize;
                let u = self.to[id] as usize;
                if self.cap[id] > 0 && !seen[u] {
                    seen[u] = true;
                    stack.push(u as u32);
                }
            }
        }
        seen
    }
}

/// Exact noise sensitivity NS_delta(f) via the spectral identity
/// NS = 1/2 - 1/2 * sum_T c(T)^2 (1-2 delta)^|T| over the {-1,+1}
/// transform coefficients c, computed with a fast transform in O(n 2^n).
pub fn noise_sensitivity_exact(f: &TruthTable, delta: f64) -> Result<f64> {
    if !(0.0..=1.0).contains(&delta) {
        return Err(Error::NoiseRateOutOfRange(delta));
    }
    let n = f.n();
    if n > ORACLE_MAX {
        return Err(Error::TableTooLarge {
            n,
            limit: ORACLE_MAX,
        });
    }
    let size = 1usize << n;
    let mut values: Vec<f64> = (0..size)
        .map(|i| if f.get_index(i as u64) { -1.0 } else { 1.0 })
        .collect();
    walsh_hadamard(&mut values);
    let scale = 1.0 / size as f64;
    let rho = 1.0 - 2.0 * delta;
    let rho_pow: Vec<f64> = (0..=n).map(|k| rho.powi(k as i32)).collect();
    let mut stability = 0.0;
    for (t, v) in values.iter().enumerate() {
        let coeff = v * scale;
        stability += coeff * coeff * rho_pow[t.count_ones() as usize];
    }
    Ok(0.5 - 0.5 * stability)
}

/// In-place unnormalized Walsh-Hadamard butterfly.
fn walsh_hadamard(values: &mut [f64]) {
    let size = values.len();
    let mut h = 1;
    while h < size {
        for block in (0..size).step_by(2 * h) {
            for i in block..block + h {
                let a = values[i];
                let b = values[i + h];
                values[i] = a + b;
                values[i + h] = a - b;
            }
        }
        h *= 2;
    }
}

/// Constructs a violated comparable pair for a non-constant LTF whose
/// negative weights outweigh the largest single weight: searches the
/// subcube X = {x : x_i = +1 on N} for a point with
/// theta - 2 eta <= sum < theta, then flips N to -1.
pub fn negative_weight_witness(f: &Ltf) -> Result<ViolationPair> {
    let weights = f.weights();
    let n = weights.len() as u32;
    let theta = f.theta();
    let negatives: Vec<u32> = (1..=n)
        .filter(|&i| weights[(i - 1) as usize] < 0.0)
        .collect();
    let eta: f64 = negatives
        .iter()
        .map(|&i| weights[(i - 1) as usize].abs())
        .sum();
    let max_weight = weights.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    if !(eta > max_weight) {
        return Err(Error::NegativeMassTooSmall {
            neg_mass: eta,
            max_weight,
        });
    }

    // Extremes of sum w_i x~_i over X: the maximum sets every free
    // coordinate to +1 (so x_max is the all-ones point); the minimum sets
    // every coordinate outside N to -1.
    let smax: f64 = weights.iter().sum();
    let smin: f64 = weights.iter().map(|w| if *w < 0.0 { *w } else { -*w }).sum();
    if smax < theta - 2.0 * eta || smin >= theta {
        return Err(Error::ConstantFunction);
    }

    let mut x = Point::ones(n);
    let mut sum = smax;
    if sum >= theta {
        // Walk toward the minimum of X, one free coordinate at a time; each
        // step changes the sum by at most 2 eta, so the first point below
        // theta still lies within theta - 2 eta of it.
        for i in 1..=n {
            let w = weights[(i - 1) as usize];
            if w < 0.0 {
                continue;
            }
            x = x.with(i, false);
            sum -= 2.0 * w;
            if sum < theta {
                break;
            }
        }
    }
    debug_assert!(sum < theta && sum >= theta - 2.0 * eta);

    let mut y = x.clone();
    for &i in &negatives {
        y = y.with(i, false);
    }
    let pair = ViolationPair { lower: y, upper: x };
    if pair.verify(f) {
        Ok(pair)
    } else {
        Err(Error::WitnessVerificationFailed)
    }
}
