//! Cut&Count bookkeeping shared by the tree, path and cutwidth engines.
//!
//! The engines count pairs (F, cut) where F is an edge set with n - 1 edges
//! meeting every degree constraint and the cut is a 2-colouring constant on
//! the components of F. Each F contributes 2^{#components}, so modulo 4 the
//! count is twice the number of spanning trees. Isolation weights make the
//! minimum-weight tree unique with probability at least 1/2, which is what
//! turns a parity into a decision.

mod poly;

use std::fmt;
use std::ops::{Add, AddAssign, Mul, Neg, Sub};

use rand::Rng;
use serde::Serialize;

pub use poly::Poly;

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Mod4(u8);

impl Mod4 {
    pub const ZERO: Mod4 = Mod4(0);
    pub const ONE: Mod4 = Mod4(1);
    pub const TWO: Mod4 = Mod4(2);

    pub fn new(x: u64) -> Self {
        Mod4((x % 4) as u8)
    }

    pub fn value(self) -> u8 {
        self.0
    }
}

impl Add for Mod4 {
    type Output = Mod4;
    fn add(self, o: Mod4) -> Mod4 {
        Mod4((self.0 + o.0) & 3)
    }
}

impl AddAssign for Mod4 {
    fn add_assign(&mut self, o: Mod4) {
        *self = *self + o;
    }
}

impl Sub for Mod4 {
    type Output = Mod4;
    fn sub(self, o: Mod4) -> Mod4 {
        Mod4((self.0 + 4 - o.0) & 3)
    }
}

impl Neg for Mod4 {
    type Output = Mod4;
    fn neg(self) -> Mod4 {
        Mod4((4 - self.0) & 3)
    }
}

impl Mul for Mod4 {
    type Output = Mod4;
    fn mul(self, o: Mod4) -> Mod4 {
        Mod4((self.0 * o.0) & 3)
    }
}

impl std::iter::Sum for Mod4 {
    fn sum<I: Iterator<Item = Mod4>>(iter: I) -> Mod4 {
        iter.fold(Mod4::ZERO, Add::add)
    }
}

impl fmt::Display for Mod4 {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

/// Random edge weights w'(e) drawn uniformly from {0, ..., Z} with Z = 2m.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct IsolationWeights {
    pub weights: Vec<u64>,
    pub z: u64,
}

impl IsolationWeights {
    pub fn sample<R: Rng + ?Sized>(m: usize, rng: &mut R) -> Self {
        let z = 2 * m as u64;
        let weights = (0..m).map(|_| rng.gen_range(0..=z)).collect();
        IsolationWeights { weights, z }
    }
}

/// The (a, ω₁, ω₂) axes of a table, flattened into one cell index.
///
/// `a` counts edges and is capped at n - 1, the only value the final check
/// reads; `a` never decreases along the decomposition, so nothing above the
/// cap can come back. ω₁ is the weight and ω₂ the isolation weight. Every
/// reachable cell has ω₁ <= a·W and ω₂ <= a·Z, so with strides
/// (W1·W2, W2, 1) the sum of two cell indices is the index of the summed
/// coordinates whenever the summed `a` stays within the cap.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct WeightDomain {
    pub a_max: usize,
    pub w_max: u64,
    pub z_max: u64,
    w1: usize,
    w2: usize,
}

impl WeightDomain {
    pub fn new(n: usize, w_max: u64, z_max: u64) -> Self {
        let a_max = n.saturating_sub(1);
        WeightDomain {
            a_max,
            w_max,
            z_max,
            w1: a_max * w_max as usize + 1,
            w2: a_max * z_max as usize + 1,
        }
    }

    /// Total number of cells.
    pub fn len(&self) -> usize {
        (self.a_max + 1) * self.w1 * self.w2
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    /// Cells per value of `a`.
    pub fn row(&self) -> usize {
        self.w1 * self.w2
    }

    pub fn omega1_len(&self) -> usize {
        self.w1
    }

    pub fn omega2_len(&self) -> usize {
        self.w2
    }

    pub fn index(&self, a: usize, omega1: u64, omega2: u64) -> usize {
        (a * self.w1 + omega1 as usize) * self.w2 + omega2 as usize
    }

    pub fn coords(&self, index: usize) -> (usize, u64, u64) {
        let omega2 = index % self.w2;
        let rest = index / self.w2;
        (rest / self.w1, (rest % self.w1) as u64, omega2 as u64)
    }

    /// Offset added when one edge of weight `w` and isolation weight `z` is
    /// taken.
    pub fn edge_shift(&self, w: u64, z: u64) -> usize {
        self.w1 * self.w2 + w as usize * self.w2 + z as usize
    }

    /// True when the coordinates satisfy ω₁ <= a·W and ω₂ <= a·Z.
    pub fn in_range(&self, a: usize, omega1: u64, omega2: u64) -> bool {
        a <= self.a_max && omega1 <= a as u64 * self.w_max && omega2 <= a as u64 * self.z_max
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct Witness {
    pub omega1: u64,
    pub omega2: u64,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, thiserror::Error)]
#[error("root cell (a = {a}, ω₁ = {omega1}, ω₂ = {omega2}) is odd")]
pub struct OddRootCell {
    pub a: usize,
    pub omega1: u64,
    pub omega2: u64,
}

/// Reads the root cell vector. Returns the witness with the smallest ω₁ (then
/// ω₂) whose cell at a = n - 1 equals 2, restricted to ω₁ <= `bound`.
///
/// Every cell counts 2^{#components} per relaxed solution and is therefore
/// even; an odd cell means the table is corrupt.
pub fn decide(root: &Poly, domain: &WeightDomain, bound: Option<u64>) -> Result<Option<Witness>, OddRootCell> {
    let mut best: Option<Witness> = None;
    for (i, v) in root.nonzero() {
        let (a, omega1, omega2) = domain.coords(i);
        if v.value() % 2 == 1 {
            return Err(OddRootCell { a, omega1, omega2 });
        }
        if a != domain.a_max || bound.is_some_and(|b| omega1 > b) {
            continue;
        }
        if best.map_or(true, |w| (omega1, omega2) < (w.omega1, w.omega2)) {
            best = Some(Witness { omega1, omega2 });
        }
    }
    Ok(best)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;

    #[test]
    fn mod4_arithmetic() {
        let three = Mod4::new(7);
        assert_eq!(three.value(), 3);
        assert_eq!(three + three, Mod4::TWO);
        assert_eq!(three * three, Mod4::ONE);
        assert_eq!(-three, Mod4::ONE);
        assert_eq!(Mod4::ZERO - Mod4::ONE, three);
    }

    #[test]
    fn domain_roundtrip() {
        let d = WeightDomain::new(5, 3, 8);
        for a in 0..=4 {
            for w in 0..=(a as u64 * 3) {
                for z in (0..=(a as u64 * 8)).step_by(5) {
                    assert_eq!(d.coords(d.index(a, w, z)), (a, w, z));
                }
            }
        }
        assert_eq!(d.index(1, 2, 3), d.index(0, 0, 0) + d.edge_shift(2, 3));
    }

    #[test]
    fn isolation_weights_in_range() {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(1);
        let iso = IsolationWeights::sample(10, &mut rng);
        assert_eq!(iso.z, 20);
        assert!(iso.weights.iter().all(|&w| w <= 20));
    }

    #[test]
    fn decide_picks_smallest_weight() {
        let d = WeightDomain::new(3, 2, 4);
        let mut root = Poly::zero();
        root.set(d.index(2, 3, 1), Mod4::TWO);
        root.set(d.index(2, 1, 7), Mod4::TWO);
        root.set(d.index(1, 0, 0), Mod4::TWO);
        let w = decide(&root, &d, None).unwrap().unwrap();
        assert_eq!((w.omega1, w.omega2), (1, 7));
        assert_eq!(decide(&root, &d, Some(0)).unwrap(), None);
        root.set(d.index(2, 0, 0), Mod4::ONE);
        assert!(decide(&root, &d, None).is_err());
    }
}
