//! Vertices of {0,1}^n, the bitwise partial order, coordinate shifts, and
//! hybrid subcubes.
//!
//! Coordinates are 1-indexed to match [n]. A point serializes as a 0/1
//! bitstring with coordinate 1 leftmost; a variable set serializes as
//! sorted comma-separated indices. Points with n <= 63 are packed into a
//! single word; larger dimensions use a word array. All operations are
//! width-agnostic at the interface.

use std::fmt;
use std::str::FromStr;

use rand::Rng;

use crate::error::{Error, Result};

/// Largest dimension stored in the packed single-word form.
pub const PACKED_MAX: u32 = 63;

#[derive(Clone, PartialEq, Eq, Hash)]
enum Store {
    Packed(u64),
    Wide(Box<[u64]>),
}

fn word_count(n: u32) -> usize {
    (n as usize).div_ceil(64)
}

fn top_mask(n: u32) -> u64 {
    let rem = n % 64;
    if rem == 0 {
        u64::MAX
    } else {
        (1u64 << rem) - 1
    }
}

impl Store {
    fn zero(n: u32) -> Store {
        if n <= PACKED_MAX {
            Store::Packed(0)
        } else {
            Store::Wide(vec![0u64; word_count(n)].into_boxed_slice())
        }
    }

    fn ones(n: u32) -> Store {
        if n <= PACKED_MAX {
            Store::Packed((1u64 << n) - 1)
        } else {
            let mut words = vec![u64::MAX; word_count(n)];
            *words.last_mut().unwrap() = top_mask(n);
            Store::Wide(words.into_boxed_slice())
        }
    }

    fn random<R: Rng + ?Sized>(n: u32, rng: &mut R) -> Store {
        if n <= PACKED_MAX {
            Store::Packed(rng.random::<u64>() & ((1u64 << n) - 1))
        } else {
            let mut words: Vec<u64> = (0..word_count(n)).map(|_| rng.random()).collect();
            *words.last_mut().unwrap() &= top_mask(n);
            Store::Wide(words.into_boxed_slice())
        }
    }

    fn get(&self, idx: u32) -> bool {
        match self {
            Store::Packed(w) => (w >> idx) & 1 == 1,
            Store::Wide(words) => (words[(idx / 64) as usize] >> (idx % 64)) & 1 == 1,
        }
    }

    fn set(&mut self, idx: u32, value: bool) {
        match self {
            Store::Packed(w) => {
                if value {
                    *w |= 1u64 << idx;
                } else {
                    *w &= !(1u64 << idx);
                }
            }
            Store::Wide(words) => {
                let word = &mut words[(idx / 64) as usize];
                if value {
                    *word |= 1u64 << (idx % 64);
                } else {
                    *word &= !(1u64 << (idx % 64));
                }
            }
        }
    }

    fn count_ones(&self) -> u32 {
        match self {
            Store::Packed(w) => w.count_ones(),
            Store::Wide(words) => words.iter().map(|w| w.count_ones()).sum(),
        }
    }

    fn is_zero(&self) -> bool {
        match self {
            Store::Packed(w) => *w == 0,
            Store::Wide(words) => words.iter().all(|w| *w == 0),
        }
    }

    fn zip(&self, other: &Store, mut op: impl FnMut(u64, u64) -> u64) -> Store {
        match (self, other) {
            (Store::Packed(a), Store::Packed(b)) => Store::Packed(op(*a, *b)),
            (Store::Wide(a), Store::Wide(b)) => Store::Wide(
                a.iter()
                    .zip(b.iter())
                    .map(|(x, y)| op(*x, *y))
                    .collect::<Vec<_>>()
                    .into_boxed_slice(),
            ),
            _ => unreachable!("stores of equal dimension share a representation"),
        }
    }

    fn all(&self, other: &Store, mut pred: impl FnMut(u64, u64) -> bool) -> bool {
        match (self, other) {
            (Store::Packed(a), Store::Packed(b)) => pred(*a, *b),
            (Store::Wide(a), Store::Wide(b)) => a.iter().zip(b.iter()).all(|(x, y)| pred(*x, *y)),
            _ => unreachable!("stores of equal dimension share a representation"),
        }
    }

    fn iter_ones(&self) -> StoreOnes<'_> {
        match self {
            Store::Packed(w) => StoreOnes {
                words: std::slice::from_ref(w),
                word_idx: 0,
                current: *w,
            },
            Store::Wide(words) => StoreOnes {
                words,
                word_idx: 0,
                current: words.first().copied().unwrap_or(0),
            },
        }
    }
}

struct StoreOnes<'a> {
    words: &'a [u64],
    word_idx: usize,
    current: u64,
}

impl Iterator for StoreOnes<'_> {
    /// 0-indexed bit positions.
    type Item = u32;

    fn next(&mut self) -> Option<u32> {
        while self.current == 0 {
            self.word_idx += 1;
            if self.word_idx >= self.words.len() {
                return None;
            }
            self.current = self.words[self.word_idx];
        }
        let bit = self.current.trailing_zeros();
        self.current &= self.current - 1;
        Some(self.word_idx as u32 * 64 + bit)
    }
}

/// An n-bit vertex of the hypercube {0,1}^n.
///
/// The {-1,+1} view maps bit 1 to +1 and bit 0 to -1.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Point {
    n: u32,
    store: Store,
}

impl Point {
    /// The all-zeros point.
    pub fn zero(n: u32) -> Point {
        assert!(n >= 1, "dimension must be at least 1");
        Point {
            n,
            store: Store::zero(n),
        }
    }

    /// The all-ones point.
    pub fn ones(n: u32) -> Point {
        assert!(n >= 1, "dimension must be at least 1");
        Point {
            n,
            store: Store::ones(n),
        }
    }

    /// Point whose characteristic vector is the binary expansion of `index`
    /// (bit b of `index` is coordinate b+1). Packed dimensions only.
    pub fn from_index(n: u32, index: u64) -> Point {
        assert!((1..=PACKED_MAX).contains(&n), "from_index requires 1 <= n <= 63");
        debug_assert!(index < (1u64 << n));
        Point {
            n,
            store: Store::Packed(index),
        }
    }

    /// Inverse of [`Point::from_index`]. Packed dimensions only.
    pub fn index(&self) -> u64 {
        match self.store {
            Store::Packed(w) => w,
            Store::Wide(_) => panic!("index() requires a packed point (n <= 63)"),
        }
    }

    /// Uniformly random point of {0,1}^n.
    pub fn random<R: Rng + ?Sized>(n: u32, rng: &mut R) -> Point {
        assert!(n >= 1, "dimension must be at least 1");
        Point {
            n,
            store: Store::random(n, rng),
        }
    }

    pub fn n(&self) -> u32 {
        self.n
    }

    /// Value of the 1-indexed coordinate.
    pub fn get(&self, coord: u32) -> bool {
        assert!(coord >= 1 && coord <= self.n, "coordinate out of range");
        self.store.get(coord - 1)
    }

    /// The {-1,+1} view of a coordinate: bit 1 maps to +1, bit 0 to -1.
    pub fn sign(&self, coord: u32) -> i32 {
        if self.get(coord) {
            1
        } else {
            -1
        }
    }

    /// Copy with one coordinate replaced.
    pub fn with(&self, coord: u32, value: bool) -> Point {
        assert!(coord >= 1 && coord <= self.n, "coordinate out of range");
        let mut out = self.clone();
        out.store.set(coord - 1, value);
        out
    }

    /// Hamming weight |x|: the number of 1-bits.
    pub fn weight(&self) -> u32 {
        self.store.count_ones()
    }

    /// 1-indexed coordinates with bit 1, ascending.
    pub fn iter_ones(&self) -> impl Iterator<Item = u32> + '_ {
        self.store.iter_ones().map(|b| b + 1)
    }

    fn check_dim(&self, other: &Point) -> Result<()> {
        if self.n == other.n {
            Ok(())
        } else {
            Err(Error::DimensionMismatch {
                left: self.n,
                right: other.n,
            })
        }
    }

    /// Bitwise partial order: true iff x_i <= y_i for all i.
    pub fn precedes(&self, other: &Point) -> Result<bool> {
        self.check_dim(other)?;
        Ok(self.store.all(&other.store, |a, b| a & !b == 0))
    }

    /// x with the coordinates in S flipped (written x^S).
    pub fn shift(&self, s: &VarSet) -> Result<Point> {
        if self.n != s.n {
            return Err(Error::DimensionMismatch {
                left: self.n,
                right: s.n,
            });
        }
        Ok(Point {
            n: self.n,
            store: self.store.zip(&s.store, |a, b| a ^ b),
        })
    }

    /// Coordinatewise minimum (bitwise and).
    pub fn meet(&self, other: &Point) -> Result<Point> {
        self.check_dim(other)?;
        Ok(Point {
            n: self.n,
            store: self.store.zip(&other.store, |a, b| a & b),
        })
    }

    /// Coordinatewise maximum (bitwise or).
    pub fn join(&self, other: &Point) -> Result<Point> {
        self.check_dim(other)?;
        Ok(Point {
            n: self.n,
            store: self.store.zip(&other.store, |a, b| a | b),
        })
    }

    /// Number of coordinates where the points differ.
    pub fn hamming(&self, other: &Point) -> Result<u32> {
        self.check_dim(other)?;
        Ok(self.store.zip(&other.store, |a, b| a ^ b).count_ones())
    }

    /// The set of coordinates where the points differ.
    pub fn diff(&self, other: &Point) -> Result<VarSet> {
        self.check_dim(other)?;
        Ok(VarSet {
            n: self.n,
            store: self.store.zip(&other.store, |a, b| a ^ b),
        })
    }

    /// Serialize to a 0/1 string, coordinate 1 leftmost.
    pub fn to_bitstring(&self) -> String {
        (1..=self.n)
            .map(|i| if self.get(i) { '1' } else { '0' })
            .collect()
    }
}

impl fmt::Display for Point {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.to_bitstring())
    }
}

impl fmt::Debug for Point {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Point({})", self.to_bitstring())
    }
}

impl FromStr for Point {
    type Err = Error;

    fn from_str(s: &str) -> Result<Point> {
        if s.is_empty() {
            return Err(Error::Parse("empty bitstring".into()));
        }
        let n = s.len() as u32;
        let mut p = Point::zero(n);
        for (i, c) in s.chars().enumerate() {
            match c {
                '0' => {}
                '1' => p.store.set(i as u32, true),
                _ => {
                    return Err(Error::Parse(format!(
                        "invalid character {c:?} in bitstring"
                    )))
                }
            }
        }
        Ok(p)
    }
}

/// A subset of the variable indices [n].
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct VarSet {
    n: u32,
    store: Store,
}

impl VarSet {
    pub fn empty(n: u32) -> VarSet {
        assert!(n >= 1, "dimension must be at least 1");
        VarSet {
            n,
            store: Store::zero(n),
        }
    }

    pub fn full(n: u32) -> VarSet {
        assert!(n >= 1, "dimension must be at least 1");
        VarSet {
            n,
            store: Store::ones(n),
        }
    }

    /// Build from 1-indexed members.
    pub fn from_members(n: u32, members: &[u32]) -> Result<VarSet> {
        let mut set = VarSet::empty(n);
        for &coord in members {
            if coord < 1 || coord > n {
                return Err(Error::CoordinateOutOfRange { coord, n });
            }
            set.store.set(coord - 1, true);
        }
        Ok(set)
    }

    pub fn n(&self) -> u32 {
        self.n
    }

    pub fn len(&self) -> u32 {
        self.store.count_ones()
    }

    pub fn is_empty(&self) -> bool {
        self.store.is_zero()
    }

    pub fn contains(&self, coord: u32) -> bool {
        assert!(coord >= 1 && coord <= self.n, "coordinate out of range");
        self.store.get(coord - 1)
    }

    pub fn insert(&mut self, coord: u32) {
        assert!(coord >= 1 && coord <= self.n, "coordinate out of range");
        self.store.set(coord - 1, true);
    }

    /// 1-indexed members, ascending.
    pub fn members(&self) -> Vec<u32> {
        self.iter().collect()
    }

    pub fn iter(&self) -> impl Iterator<Item = u32> + '_ {
        self.store.iter_ones().map(|b| b + 1)
    }

    /// Parse sorted comma-separated 1-indexed members ("" is the empty set).
    pub fn parse(n: u32, s: &str) -> Result<VarSet> {
        if s.trim().is_empty() {
            return Ok(VarSet::empty(n));
        }
        let members = s
            .split(',')
            .map(|tok| {
                tok.trim()
                    .parse::<u32>()
                    .map_err(|e| Error::Parse(format!("invalid index {tok:?}: {e}")))
            })
            .collect::<Result<Vec<_>>>()?;
        VarSet::from_members(n, &members)
    }
}

impl fmt::Display for VarSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut first = true;
        for coord in self.iter() {
            if !first {
                f.write_str(",")?;
            }
            write!(f, "{coord}")?;
            first = false;
        }
        Ok(())
    }
}

impl fmt::Debug for VarSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "VarSet{{{self}}}")
    }
}

/// Uniform draw from Hybrid(x,y): the set of points agreeing with x and y
/// wherever they agree. With `exclude_endpoints`, the draw is uniform over
/// Hybrid(x,y) minus {x,y}, which requires the points to differ in at least
/// two coordinates.
pub fn hybrid_sample<R: Rng + ?Sized>(
    x: &Point,
    y: &Point,
    exclude_endpoints: bool,
    rng: &mut R,
) -> Result<Point> {
    let d = x.hamming(y)?;
    if exclude_endpoints && d < 2 {
        return Err(Error::HybridTooClose { distance: d });
    }
    if d == 0 {
        return Ok(x.clone());
    }
    let diff = x.store.zip(&y.store, |a, b| a ^ b);
    loop {
        let r = Store::random(x.n, rng);
        let store = match (&x.store, &diff, &r) {
            (Store::Packed(xs), Store::Packed(ds), Store::Packed(rs)) => {
                Store::Packed((xs & !ds) | (rs & ds))
            }
            (Store::Wide(xs), Store::Wide(ds), Store::Wide(rs)) => Store::Wide(
                xs.iter()
                    .zip(ds.iter())
                    .zip(rs.iter())
                    .map(|((xw, dw), rw)| (xw & !dw) | (rw & dw))
                    .collect::<Vec<_>>()
                    .into_boxed_slice(),
            ),
            _ => unreachable!("stores of equal dimension share a representation"),
        };
        let z = Point { n: x.n, store };
        if exclude_endpoints && (z == *x || z == *y) {
            continue;
        }
        return Ok(z);
    }
}

/// All 2^d points of Hybrid(x,y), each exactly once, where d is the Hamming
/// distance between x and y. Enumeration order: index c from 0 to 2^d - 1,
/// where bit j of c gives the value of the j-th smallest differing
/// coordinate. Errors when 2^d would exceed `cap`.
pub fn hybrid_enumerate(x: &Point, y: &Point, cap: u64) -> Result<Vec<Point>> {
    let d = x.hamming(y)?;
    if d >= 64 || (1u64 << d) > cap {
        return Err(Error::HybridCapExceeded {
            log_points: d,
            cap,
        });
    }
    let coords = x.diff(y)?.members();
    let count = 1u64 << d;
    let mut out = Vec::with_capacity(count as usize);
    for c in 0..count {
        let mut z = x.clone();
        for (j, &coord) in coords.iter().enumerate() {
            z.store.set(coord - 1, (c >> j) & 1 == 1);
        }
        out.push(z);
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha12Rng;
    use std::collections::HashMap;

    fn p(s: &str) -> Point {
        s.parse().unwrap()
    }

    #[test]
    fn weight_counts_ones() {
        assert_eq!(p("0000").weight(), 0);
        assert_eq!(p("1111").weight(), 4);
        assert_eq!(p("1010").weight(), 2);
    }

    #[test]
    fn precedes_is_the_subset_order() {
        assert!(p("0011").precedes(&p("0111")).unwrap());
        assert!(p("0011").precedes(&p("0011")).unwrap());
        assert!(!p("0110").precedes(&p("0011")).unwrap());
        assert!(matches!(
            p("01").precedes(&p("011")),
            Err(Error::DimensionMismatch { .. })
        ));
    }

    #[test]
    fn shift_flips_exactly_the_set() {
        let x = p("101");
        assert_eq!(
            x.shift(&VarSet::from_members(3, &[1]).unwrap()).unwrap(),
            p("001")
        );
        assert_eq!(x.shift(&VarSet::empty(3)).unwrap(), p("101"));
        assert_eq!(x.shift(&VarSet::full(3)).unwrap(), p("010"));
    }

    #[test]
    fn shift_is_an_involution() {
        let mut rng = ChaCha12Rng::seed_from_u64(7);
        for n in [1u32, 5, 63, 64, 65, 200] {
            for _ in 0..20 {
                let x = Point::random(n, &mut rng);
                let s = VarSet {
                    n,
                    store: Store::random(n, &mut rng),
                };
                assert_eq!(x.shift(&s).unwrap().shift(&s).unwrap(), x);
            }
        }
    }

    #[test]
    fn precedes_implies_weight_order() {
        let mut rng = ChaCha12Rng::seed_from_u64(8);
        for _ in 0..200 {
            let x = Point::random(10, &mut rng);
            let y = Point::random(10, &mut rng);
            if x.precedes(&y).unwrap() {
                assert!(x.weight() <= y.weight());
            }
        }
    }

    #[test]
    fn sign_view_round_trips() {
        let x = p("1010");
        assert_eq!(x.sign(1), 1);
        assert_eq!(x.sign(2), -1);
        let mut y = Point::zero(4);
        for i in 1..=4 {
            y = y.with(i, x.sign(i) == 1);
        }
        assert_eq!(x, y);
    }

    #[test]
    fn bitstring_round_trip_and_coordinate_one_leftmost() {
        let x = p("100");
        assert!(x.get(1));
        assert!(!x.get(2));
        assert_eq!(x.to_bitstring(), "100");
        let wide = "10".repeat(50);
        let w: Point = wide.parse().unwrap();
        assert_eq!(w.n(), 100);
        assert_eq!(w.to_bitstring(), wide);
        assert_eq!(w.weight(), 50);
    }

    #[test]
    fn varset_round_trip() {
        let s = VarSet::from_members(9, &[3, 1, 7]).unwrap();
        assert_eq!(s.to_string(), "1,3,7");
        assert_eq!(VarSet::parse(9, "1,3,7").unwrap(), s);
        assert_eq!(VarSet::parse(9, "").unwrap(), VarSet::empty(9));
        assert!(VarSet::from_members(4, &[5]).is_err());
    }

    #[test]
    fn hybrid_singleton_when_equal() {
        let x = p("0110");
        let mut rng = ChaCha12Rng::seed_from_u64(1);
        for _ in 0..10 {
            assert_eq!(hybrid_sample(&x, &x, false, &mut rng).unwrap(), x);
        }
        assert!(matches!(
            hybrid_sample(&x, &x, true, &mut rng),
            Err(Error::HybridTooClose { distance: 0 })
        ));
    }

    #[test]
    fn hybrid_support_matches_enumeration() {
        let x = p("0011");
        let y = p("0101");
        let pts = hybrid_enumerate(&x, &y, 1 << 16).unwrap();
        let expect: Vec<Point> = ["0011", "0111", "0001", "0101"]
            .iter()
            .map(|s| p(s))
            .collect();
        assert_eq!(pts.len(), 4);
        for e in &expect {
            assert!(pts.contains(e));
        }
        let mut rng = ChaCha12Rng::seed_from_u64(2);
        for _ in 0..200 {
            let z = hybrid_sample(&x, &y, false, &mut rng).unwrap();
            assert!(pts.contains(&z));
        }
    }

    #[test]
    fn hybrid_excluding_endpoints_is_uniform_on_the_rest() {
        // d = 2: support {0001, 0111}, each 1/2 +- 3 sigma over 1e4 draws.
        let x = p("0011");
        let y = p("0101");
        let mut rng = ChaCha12Rng::seed_from_u64(3);
        let mut counts: HashMap<String, u32> = HashMap::new();
        let trials = 10_000;
        for _ in 0..trials {
            let z = hybrid_sample(&x, &y, true, &mut rng).unwrap();
            *counts.entry(z.to_bitstring()).or_default() += 1;
        }
        assert_eq!(counts.len(), 2);
        let sigma = (trials as f64 * 0.25).sqrt();
        for key in ["0001", "0111"] {
            let c = *counts.get(key).expect("missing support point") as f64;
            assert!((c - trials as f64 / 2.0).abs() <= 3.0 * sigma, "{key}: {c}");
        }
    }

    #[test]
    fn hybrid_sample_stays_in_the_spanned_subcube() {
        let mut rng = ChaCha12Rng::seed_from_u64(4);
        for n in [6u32, 70] {
            for _ in 0..100 {
                let x = Point::random(n, &mut rng);
                let y = Point::random(n, &mut rng);
                let z = hybrid_sample(&x, &y, false, &mut rng).unwrap();
                let lo = x.meet(&y).unwrap();
                let hi = x.join(&y).unwrap();
                assert!(lo.precedes(&z).unwrap());
                assert!(z.precedes(&hi).unwrap());
            }
        }
    }

    #[test]
    fn hybrid_enumerate_counts_and_cap() {
        let x = p("000000");
        let y = p("011100");
        let pts = hybrid_enumerate(&x, &y, 64).unwrap();
        assert_eq!(pts.len(), 8);
        let distinct: std::collections::HashSet<String> =
            pts.iter().map(|q| q.to_bitstring()).collect();
        assert_eq!(distinct.len(), 8);
        for q in &pts {
            // agrees with x off the differing set
            assert!(!q.get(1) && !q.get(5) && !q.get(6));
        }
        assert_eq!(hybrid_enumerate(&x, &x, 64).unwrap(), vec![x.clone()]);
        let e = hybrid_enumerate(&x, &y, 4);
        assert!(matches!(
            e,
            Err(Error::HybridCapExceeded {
                log_points: 3,
                cap: 4
            })
        ));
        // d = 1 yields exactly the edge
        let y1 = p("100000");
        let edge = hybrid_enumerate(&x, &y1, 64).unwrap();
        assert_eq!(edge.len(), 2);
        assert!(edge.contains(&x) && edge.contains(&y1));
    }

    #[test]
    fn wide_and_packed_agree_on_shared_ops() {
        let mut rng = ChaCha12Rng::seed_from_u64(5);
        let a = Point::random(63, &mut rng);
        assert_eq!(a.to_bitstring().len(), 63);
        let b = Point::random(64, &mut rng);
        assert_eq!(b.to_bitstring().len(), 64);
        let rt: Point = b.to_bitstring().parse().unwrap();
        assert_eq!(rt, b);
        assert_eq!(b.iter_ones().count() as u32, b.weight());
    }
}
