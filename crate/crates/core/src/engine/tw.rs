//! Cut&Count over a nice tree decomposition.
//!
//! Every bag vertex carries a state (f, c): f in 0..=d(v) edges of the
//! partial solution so far, and side c of the cut. States of a bag are
//! packed in mixed radix with base 2(d(v) + 1) per vertex, and each packed
//! index owns one [`Poly`] over the (a, ω₁, ω₂) cells.

use crate::cutcount::{Mod4, Poly};
use crate::decomp::{NiceDecomposition, NiceKind};
use crate::instance::Vertex;
use crate::par;

use super::{ntt, unseen_capacity, DpContext, JoinStrategy, RunOutcome, SolveError, SolveOptions};

/// Largest Kronecker-packed operand the fast join will build.
const FAST_JOIN_MAX_LEN: usize = 1 << 22;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TwTable {
    pub bag: Vec<Vertex>,
    pub entries: Vec<Poly>,
}

#[derive(Clone, Debug)]
struct Layout {
    /// d(v) per bag position.
    d: Vec<usize>,
    strides: Vec<usize>,
    len: usize,
}

impl Layout {
    fn new(bag: &[Vertex], ctx: &DpContext) -> Self {
        let d: Vec<usize> = bag.iter().map(|&v| ctx.prep.d[v]).collect();
        let mut strides = Vec::with_capacity(d.len());
        let mut len = 1usize;
        for &dv in &d {
            strides.push(len);
            len *= 2 * (dv + 1);
        }
        Layout { d, strides, len }
    }

    fn base(&self, p: usize) -> usize {
        2 * (self.d[p] + 1)
    }

    /// (f, right) of bag position `p` in packed index `idx`.
    fn state(&self, idx: usize, p: usize) -> (usize, bool) {
        let digit = idx / self.strides[p] % self.base(p);
        (digit % (self.d[p] + 1), digit > self.d[p])
    }

    fn digit(&self, p: usize, f: usize, right: bool) -> usize {
        f + if right { self.d[p] + 1 } else { 0 }
    }

    /// Σ (d(v) - f(v)) over the bag.
    fn spare(&self, idx: usize) -> usize {
        (0..self.d.len()).map(|p| self.d[p] - self.state(idx, p).0).sum()
    }
}

fn position(bag: &[Vertex], v: Vertex) -> usize {
    bag.binary_search(&v).expect("vertex is in the bag")
}

pub fn leaf() -> TwTable {
    TwTable { bag: Vec::new(), entries: vec![Poly::unit(0, Mod4::ONE)] }
}

pub fn introduce_vertex(ctx: &DpContext, child: &TwTable, bag: &[Vertex], v: Vertex) -> TwTable {
    let layout = Layout::new(bag, ctx);
    let p = position(bag, v);
    let (stride, base) = (layout.strides[p], layout.base(p));
    let entries = par::map_range(layout.len, ctx.parallel, |idx| {
        if layout.state(idx, p).0 != 0 {
            return Poly::zero();
        }
        let (lower, upper) = (idx % stride, idx / (stride * base));
        child.entries[lower + upper * stride].clone()
    });
    TwTable { bag: bag.to_vec(), entries }
}

pub fn introduce_edge(ctx: &DpContext, child: &TwTable, u: Vertex, v: Vertex, edge: usize) -> TwTable {
    let layout = Layout::new(&child.bag, ctx);
    let (pu, pv) = (position(&child.bag, u), position(&child.bag, v));
    let shift = ctx.edge_shift(edge);
    let limit = ctx.domain.len();
    let entries = par::map_range(layout.len, ctx.parallel, |idx| {
        let mut out = child.entries[idx].clone();
        let (fu, cu) = layout.state(idx, pu);
        let (fv, cv) = layout.state(idx, pv);
        if cu == cv && fu >= 1 && fv >= 1 {
            let from = idx - layout.strides[pu] - layout.strides[pv];
            out.add_shifted(&child.entries[from], shift, limit);
        }
        out
    });
    TwTable { bag: child.bag.clone(), entries }
}

pub fn forget(ctx: &DpContext, child: &TwTable, v: Vertex) -> TwTable {
    let clayout = Layout::new(&child.bag, ctx);
    let p = position(&child.bag, v);
    let mut bag = child.bag.clone();
    bag.remove(p);
    let layout = Layout::new(&bag, ctx);
    let stride = clayout.strides[p];
    let next = stride * clayout.base(p);
    let allowed = &ctx.prep.allowed[v];
    let entries = par::map_range(layout.len, ctx.parallel, |idx| {
        let (lower, upper) = (idx % stride, idx / stride);
        let mut out = Poly::zero();
        for &o in allowed {
            for right in [false, true] {
                out.add_assign(&child.entries[lower + clayout.digit(p, o, right) * stride + upper * next]);
            }
        }
        out
    });
    TwTable { bag, entries }
}

pub fn join_naive(ctx: &DpContext, left: &TwTable, right: &TwTable) -> TwTable {
    let layout = Layout::new(&left.bag, ctx);
    let b = layout.d.len();
    let limit = ctx.domain.len();
    let entries = par::map_range(layout.len, ctx.parallel, |idx| {
        let states: Vec<(usize, bool)> = (0..b).map(|p| layout.state(idx, p)).collect();
        let mut out = Poly::zero();
        // odometer over f1 <= f componentwise
        let mut f1 = vec![0usize; b];
        loop {
            let (mut li, mut ri) = (0, 0);
            for p in 0..b {
                let (f, c) = states[p];
                li += layout.digit(p, f1[p], c) * layout.strides[p];
                ri += layout.digit(p, f - f1[p], c) * layout.strides[p];
            }
            out.mul_acc(&left.entries[li], &right.entries[ri], limit);
            let Some(p) = (0..b).find(|&p| f1[p] < states[p].0) else { break };
            f1[p] += 1;
            f1[..p].iter_mut().for_each(|x| *x = 0);
        }
        out
    });
    TwTable { bag: left.bag.clone(), entries }
}

/// Join through one exact convolution per cut-side vector. The f axes and
/// the cell axis are packed into one integer sequence (Kronecker
/// substitution) with enough room that no coordinate overflows into the
/// next. Returns `None` when the packed operands would be too long or
/// coefficients could exceed the transform modulus.
pub fn join_fast(ctx: &DpContext, left: &TwTable, right: &TwTable) -> Option<TwTable> {
    let layout = Layout::new(&left.bag, ctx);
    let b = layout.d.len();
    let limit = ctx.domain.len();
    let (mut lo_l, mut lo_r, mut span) = (usize::MAX, usize::MAX, 0usize);
    for (table, lo) in [(left, &mut lo_l), (right, &mut lo_r)] {
        for p in table.entries.iter().filter(|p| !p.is_zero()) {
            *lo = (*lo).min(p.begin());
        }
    }
    if lo_l == usize::MAX || lo_r == usize::MAX {
        return Some(TwTable { bag: left.bag.clone(), entries: vec![Poly::zero(); layout.len] });
    }
    for (table, lo) in [(left, lo_l), (right, lo_r)] {
        for p in table.entries.iter().filter(|p| !p.is_zero()) {
            span = span.max(p.end() - lo);
        }
    }
    let slot = 2 * span - 1;
    // f axis p has radix 2d + 1 so sums of two f values never carry
    let mut fstrides = Vec::with_capacity(b);
    let mut flen = 1usize;
    let mut terms = 1usize;
    for &dv in &layout.d {
        fstrides.push(flen);
        flen = flen.checked_mul(2 * dv + 1)?;
        terms = terms.checked_mul(dv + 1)?;
    }
    let packed = flen.checked_mul(slot)?;
    let bound = terms.checked_mul(span)?.checked_mul(9)?;
    if packed > FAST_JOIN_MAX_LEN || bound as u64 >= ntt::MODULUS {
        return None;
    }
    let mut entries = vec![Poly::zero(); layout.len];
    for sides in 0..1usize << b {
        let pack = |table: &TwTable, lo: usize| {
            let mut seq = vec![0u64; packed];
            let mut f = vec![0usize; b];
            loop {
                let idx: usize =
                    (0..b).map(|p| layout.digit(p, f[p], sides >> p & 1 == 1) * layout.strides[p]).sum();
                let at: usize = (0..b).map(|p| f[p] * fstrides[p]).sum::<usize>() * slot;
                for (i, v) in table.entries[idx].nonzero() {
                    seq[at + i - lo] = v.value() as u64;
                }
                let Some(p) = (0..b).find(|&p| f[p] < layout.d[p]) else { break };
                f[p] += 1;
                f[..p].iter_mut().for_each(|x| *x = 0);
            }
            seq
        };
        let product = ntt::convolve(&pack(left, lo_l), &pack(right, lo_r));
        let offset = lo_l + lo_r;
        let mut f = vec![0usize; b];
        loop {
            let idx: usize = (0..b).map(|p| layout.digit(p, f[p], sides >> p & 1 == 1) * layout.strides[p]).sum();
            let at: usize = (0..b).map(|p| f[p] * fstrides[p]).sum::<usize>() * slot;
            let take = slot.min(limit.saturating_sub(offset));
            let mut poly = Poly::from_dense(offset, product[at..at + take].iter().map(|x| x % 4));
            poly.truncate_at(limit);
            entries[idx] = poly;
            let Some(p) = (0..b).find(|&p| f[p] < layout.d[p]) else { break };
            f[p] += 1;
            f[..p].iter_mut().for_each(|x| *x = 0);
        }
    }
    Some(TwTable { bag: left.bag.clone(), entries })
}

/// Drops cells whose edge count is too low to reach n - 1.
fn prune(ctx: &DpContext, table: &mut TwTable, unseen: usize) {
    let layout = Layout::new(&table.bag, ctx);
    let row = ctx.domain.row();
    for (idx, poly) in table.entries.iter_mut().enumerate() {
        let floor = ctx.a_floor(unseen + layout.spare(idx));
        if floor > 0 {
            poly.truncate_below(floor * row);
        }
    }
}

/// Runs the dynamic program bottom-up and returns the root cell vector.
pub fn run(ctx: &DpContext, nice: &NiceDecomposition, opts: &SolveOptions) -> Result<RunOutcome, SolveError> {
    let unseen = if opts.prune { unseen_capacity(nice, ctx.prep) } else { Vec::new() };
    let mut stack: Vec<TwTable> = Vec::new();
    let mut max_family = 0;
    let mut cells = 0u64;
    let underflow = || SolveError::Invariant("decomposition children out of order".into());
    for (x, node) in nice.nodes().iter().enumerate() {
        let mut table = match node.kind {
            NiceKind::Leaf => leaf(),
            NiceKind::IntroduceVertex(v) => introduce_vertex(ctx, &stack.pop().ok_or_else(underflow)?, &node.bag, v),
            NiceKind::IntroduceEdge { u, v, edge } => {
                introduce_edge(ctx, &stack.pop().ok_or_else(underflow)?, u, v, edge)
            }
            NiceKind::Forget(v) => forget(ctx, &stack.pop().ok_or_else(underflow)?, v),
            NiceKind::Join => {
                let right = stack.pop().ok_or_else(underflow)?;
                let left = stack.pop().ok_or_else(underflow)?;
                match opts.join {
                    JoinStrategy::Naive => join_naive(ctx, &left, &right),
                    JoinStrategy::Fast => {
                        join_fast(ctx, &left, &right).unwrap_or_else(|| join_naive(ctx, &left, &right))
                    }
                }
            }
        };
        if opts.prune {
            prune(ctx, &mut table, unseen[x]);
        }
        max_family = max_family.max(table.entries.len());
        cells += table.entries.iter().map(|p| p.window_cells() as u64).sum::<u64>();
        stack.push(table);
    }
    let root = stack.pop().ok_or_else(underflow)?;
    if !stack.is_empty() || root.entries.len() != 1 {
        return Err(SolveError::Invariant("root bag is not empty".into()));
    }
    Ok(RunOutcome {
        root: root.entries.into_iter().next().unwrap_or_default(),
        domain: ctx.domain,
        max_index_family: max_family,
        table_cells: cells,
    })
}
