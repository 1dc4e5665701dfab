//! Bit-sliced mod-4 vectors.
//!
//! A value x in Z/4 is stored as two bits, `lo = x & 1` and `hi = x >> 1`,
//! held in separate planes so that one `u64` word carries 64 cells. Only the
//! window of words between the first and last non-zero word is kept.

use super::Mod4;

const W: usize = 64;

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Poly {
    /// Index of the first stored word.
    start: usize,
    lo: Vec<u64>,
    hi: Vec<u64>,
}

#[inline]
fn add_word(l1: &mut u64, h1: &mut u64, l2: u64, h2: u64) {
    let carry = *l1 & l2;
    *l1 ^= l2;
    *h1 ^= h2 ^ carry;
}

impl Poly {
    pub fn zero() -> Self {
        Poly::default()
    }

    pub fn is_zero(&self) -> bool {
        self.lo.is_empty()
    }

    /// A single cell set to `value`.
    pub fn unit(index: usize, value: Mod4) -> Self {
        let mut p = Poly::zero();
        p.set(index, value);
        p
    }

    pub fn from_cells<I: IntoIterator<Item = (usize, Mod4)>>(cells: I) -> Self {
        let mut p = Poly::zero();
        for (i, v) in cells {
            let cur = p.get(i);
            p.set(i, cur + v);
        }
        p
    }

    /// Cell `offset + i` holds `values[i] mod 4`.
    pub fn from_dense<I: IntoIterator<Item = u64>>(offset: usize, values: I) -> Self {
        let mut p = Poly { start: offset / W, lo: Vec::new(), hi: Vec::new() };
        for (i, x) in values.into_iter().enumerate() {
            let at = offset % W + i;
            let (w, b) = (at / W, at % W);
            if w == p.lo.len() {
                p.lo.push(0);
                p.hi.push(0);
            }
            p.lo[w] |= (x & 1) << b;
            p.hi[w] |= ((x >> 1) & 1) << b;
        }
        p.trim();
        p
    }

    /// Number of cells held in the stored window.
    pub fn window_cells(&self) -> usize {
        self.lo.len() * W
    }

    /// Lowest cell index of the stored window (0 when empty).
    pub fn begin(&self) -> usize {
        self.start * W
    }

    /// One past the highest stored cell index (0 when empty).
    pub fn end(&self) -> usize {
        (self.start + self.lo.len()) * W
    }

    pub fn get(&self, index: usize) -> Mod4 {
        let w = index / W;
        if w < self.start || w >= self.start + self.lo.len() {
            return Mod4::ZERO;
        }
        let (b, i) = (index % W, w - self.start);
        Mod4::new(((self.lo[i] >> b) & 1) | (((self.hi[i] >> b) & 1) << 1))
    }

    pub fn set(&mut self, index: usize, value: Mod4) {
        let w = index / W;
        self.cover(w, w + 1);
        let (b, i) = (index % W, w - self.start);
        let v = value.value() as u64;
        self.lo[i] = (self.lo[i] & !(1 << b)) | ((v & 1) << b);
        self.hi[i] = (self.hi[i] & !(1 << b)) | ((v >> 1) << b);
        self.trim();
    }

    /// Non-zero cells in ascending index order.
    pub fn nonzero(&self) -> impl Iterator<Item = (usize, Mod4)> + '_ {
        self.lo.iter().zip(&self.hi).enumerate().flat_map(move |(i, (&l, &h))| {
            let base = (self.start + i) * W;
            let mut bits = l | h;
            std::iter::from_fn(move || {
                if bits == 0 {
                    return None;
                }
                let b = bits.trailing_zeros() as usize;
                bits &= bits - 1;
                Some((base + b, Mod4::new(((l >> b) & 1) | (((h >> b) & 1) << 1))))
            })
        })
    }

    pub fn count_nonzero(&self) -> usize {
        self.lo.iter().zip(&self.hi).map(|(l, h)| (l | h).count_ones() as usize).sum()
    }

    /// Grows the window to include words `from..to`.
    fn cover(&mut self, from: usize, to: usize) {
        if self.lo.is_empty() {
            self.start = from;
            self.lo = vec![0; to - from];
            self.hi = vec![0; to - from];
            return;
        }
        if from < self.start {
            let extra = self.start - from;
            self.lo.splice(0..0, std::iter::repeat(0).take(extra));
            self.hi.splice(0..0, std::iter::repeat(0).take(extra));
            self.start = from;
        }
        let end = self.start + self.lo.len();
        if to > end {
            self.lo.resize(to - self.start, 0);
            self.hi.resize(to - self.start, 0);
        }
    }

    fn trim(&mut self) {
        let nz = |i: usize| self.lo[i] | self.hi[i] != 0;
        let Some(last) = (0..self.lo.len()).rev().find(|&i| nz(i)) else {
            *self = Poly::zero();
            return;
        };
        let first = (0..=last).find(|&i| nz(i)).unwrap();
        self.lo.truncate(last + 1);
        self.hi.truncate(last + 1);
        if first > 0 {
            self.lo.drain(..first);
            self.hi.drain(..first);
            self.start += first;
        }
    }

    /// Zeroes every cell with index `>= limit`.
    pub fn truncate_at(&mut self, limit: usize) {
        let end_word = limit.div_ceil(W);
        if end_word <= self.start {
            *self = Poly::zero();
            return;
        }
        let keep = (end_word - self.start).min(self.lo.len());
        self.lo.truncate(keep);
        self.hi.truncate(keep);
        if limit % W != 0 && self.start + keep == end_word {
            let mask = (1u64 << (limit % W)) - 1;
            self.lo[keep - 1] &= mask;
            self.hi[keep - 1] &= mask;
        }
        self.trim();
    }

    /// Zeroes every cell with index `< limit`.
    pub fn truncate_below(&mut self, limit: usize) {
        let w = limit / W;
        if w >= self.start + self.lo.len() {
            *self = Poly::zero();
            return;
        }
        if w >= self.start {
            let drop = w - self.start;
            self.lo.drain(..drop);
            self.hi.drain(..drop);
            self.start = w;
            let mask = !((1u64 << (limit % W)) - 1);
            self.lo[0] &= mask;
            self.hi[0] &= mask;
        }
        self.trim();
    }

    pub fn add_assign(&mut self, other: &Poly) {
        self.add_shifted_scaled(other, 0, usize::MAX, Mod4::ONE);
    }

    /// `self += other` shifted up by `shift` cells, dropping cells `>= limit`.
    pub fn add_shifted(&mut self, other: &Poly, shift: usize, limit: usize) {
        self.add_shifted_scaled(other, shift, limit, Mod4::ONE);
    }

    /// `self += scale * (other << shift)`, dropping cells `>= limit`.
    pub fn add_shifted_scaled(&mut self, other: &Poly, shift: usize, limit: usize, scale: Mod4) {
        if other.is_zero() || scale == Mod4::ZERO {
            return;
        }
        let (q, b) = (shift / W, shift % W);
        let first = other.start + q;
        let mut last = other.start + other.lo.len() + q + usize::from(b > 0);
        let mut edge_mask = u64::MAX;
        if limit != usize::MAX && last >= limit.div_ceil(W) {
            last = limit.div_ceil(W);
            if limit % W != 0 {
                edge_mask = (1u64 << (limit % W)) - 1;
            }
        }
        if first >= last {
            return;
        }
        self.cover(first, last);
        let len = other.lo.len();
        for t in first..last {
            // word t of the shifted operand draws from words j and j-1 of other
            let j = t - first;
            let pick = |plane: &[u64]| -> u64 {
                let cur = if j < len { plane[j] } else { 0 };
                if b == 0 {
                    cur
                } else {
                    let prev = if j >= 1 && j - 1 < len { plane[j - 1] } else { 0 };
                    (cur << b) | (prev >> (W - b))
                }
            };
            let mask = if t + 1 == last { edge_mask } else { u64::MAX };
            let (l, h) = (pick(&other.lo) & mask, pick(&other.hi) & mask);
            let (l, h) = match scale.value() {
                1 => (l, h),
                2 => (0, l),
                _ => (l, h ^ l),
            };
            let i = t - self.start;
            add_word(&mut self.lo[i], &mut self.hi[i], l, h);
        }
        self.trim();
    }

    /// `self += a * b` as a polynomial product, dropping cells `>= limit`.
    pub fn mul_acc(&mut self, a: &Poly, b: &Poly, limit: usize) {
        let (sparse, dense) = if a.count_nonzero() <= b.count_nonzero() { (a, b) } else { (b, a) };
        let base = dense.start * W;
        for (i, v) in sparse.nonzero() {
            if i + base >= limit {
                break;
            }
            self.add_shifted_scaled(dense, i, limit, v);
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn dense(p: &Poly, len: usize) -> Vec<u8> {
        (0..len).map(|i| p.get(i).value()).collect()
    }

    fn cells() -> impl Strategy<Value = Vec<(usize, u8)>> {
        prop::collection::vec((0usize..300, 0u8..4), 0..20)
    }

    fn build(c: &[(usize, u8)]) -> Poly {
        Poly::from_cells(c.iter().map(|&(i, v)| (i, Mod4::new(v as u64))))
    }

    fn reference(c: &[(usize, u8)], len: usize) -> Vec<u8> {
        let mut out = vec![0u8; len];
        for &(i, v) in c {
            if i < len {
                out[i] = (out[i] + v) % 4;
            }
        }
        out
    }

    #[test]
    fn dense_construction() {
        let p = Poly::from_dense(70, [0, 1, 2, 3, 4, 5]);
        let got: Vec<u8> = (68..78).map(|i| p.get(i).value()).collect();
        assert_eq!(got, vec![0, 0, 0, 1, 2, 3, 0, 1, 0, 0]);
        assert!(Poly::from_dense(5, [0, 4, 8]).is_zero());
    }

    #[test]
    fn set_get_trim() {
        let mut p = Poly::unit(200, Mod4::new(3));
        assert_eq!(p.get(200), Mod4::new(3));
        assert_eq!(p.window_cells(), 64);
        p.set(5, Mod4::TWO);
        assert_eq!(p.window_cells(), 4 * 64);
        p.set(200, Mod4::ZERO);
        assert_eq!(p.window_cells(), 64);
        p.set(5, Mod4::ZERO);
        assert!(p.is_zero());
    }

    proptest! {
        #[test]
        fn shifted_scaled_add_matches_reference(
            a in cells(), b in cells(), shift in 0usize..200, limit in 0usize..600, scale in 0u8..4
        ) {
            let mut p = build(&a);
            p.add_shifted_scaled(&build(&b), shift, limit, Mod4::new(scale as u64));
            let mut want = reference(&a, 600);
            for (i, v) in reference(&b, 600).into_iter().enumerate() {
                let t = i + shift;
                if t < limit && t < 600 {
                    want[t] = (want[t] + v * scale) % 4;
                }
            }
            prop_assert_eq!(dense(&p, 600), want);
        }

        #[test]
        fn product_matches_schoolbook(a in cells(), b in cells(), limit in 0usize..700) {
            let mut p = Poly::zero();
            p.mul_acc(&build(&a), &build(&b), limit);
            let (ra, rb) = (reference(&a, 300), reference(&b, 300));
            let mut want = vec![0u8; 700];
            for i in 0..300 {
                for j in 0..300 {
                    if i + j < limit {
                        want[i + j] = (want[i + j] + ra[i] * rb[j]) % 4;
                    }
                }
            }
            prop_assert_eq!(dense(&p, 700), want);
        }

        #[test]
        fn truncations(a in cells(), lo in 0usize..300, hi in 0usize..300) {
            let mut p = build(&a);
            p.truncate_below(lo);
            p.truncate_at(hi);
            let want: Vec<u8> = reference(&a, 300)
                .into_iter()
                .enumerate()
                .map(|(i, v)| if i >= lo && i < hi { v } else { 0 })
                .collect();
            prop_assert_eq!(dense(&p, 300), want);
        }
    }
}
