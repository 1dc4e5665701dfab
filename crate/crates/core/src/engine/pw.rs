//! Cut&Count over a nice path decomposition with degree-aware state
//! families.
//!
//! A bag vertex v with d = d(v) that has seen q = min(deg_{G_x}(v), d)
//! incident edges so far can only be in one of
//!
//! * (0, Up): no edge yet, side not chosen,
//! * (f, Left) or (f, Right) for 1 <= f <= min(q, d - 1),
//! * (d, Up) when q >= d: saturated, side no longer needed.
//!
//! so the family of a bag has at most Π 2d(v) members. The side of a
//! component is chosen by the edge that first touches it.

use crate::cutcount::{Mod4, Poly};
use crate::decomp::{NiceDecomposition, NiceKind};
use crate::instance::Vertex;
use crate::par;

use super::{unseen_capacity, Color, DpContext, RunOutcome, SolveError, SolveOptions};

/// Per-vertex state (f, c).
pub type State = (usize, Color);

/// The state family of one bag: which states each bag vertex may be in,
/// packed in mixed radix.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PwFamily {
    pub bag: Vec<Vertex>,
    d: Vec<usize>,
    q: Vec<usize>,
    strides: Vec<usize>,
    len: usize,
}

impl PwFamily {
    fn new(bag: Vec<Vertex>, d: Vec<usize>, q: Vec<usize>) -> Self {
        let mut strides = Vec::with_capacity(bag.len());
        let mut len = 1usize;
        for p in 0..bag.len() {
            strides.push(len);
            len *= Self::count(d[p], q[p]);
        }
        PwFamily { bag, d, q, strides, len }
    }

    fn count(d: usize, q: usize) -> usize {
        1 + 2 * q.min(d.saturating_sub(1)) + usize::from(q >= d)
    }

    /// Number of packed indices.
    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    fn interior(&self, p: usize) -> usize {
        self.q[p].min(self.d[p].saturating_sub(1))
    }

    fn decode(&self, idx: usize, p: usize) -> State {
        let digit = idx / self.strides[p] % Self::count(self.d[p], self.q[p]);
        let k = self.interior(p);
        match digit {
            0 => (0, Color::Up),
            x if x <= 2 * k => ((x + 1) / 2, if x % 2 == 1 { Color::Left } else { Color::Right }),
            _ => (self.d[p], Color::Up),
        }
    }

    fn encode(&self, p: usize, (f, c): State) -> Option<usize> {
        let (d, k) = (self.d[p], self.interior(p));
        match c {
            Color::Up if f == 0 => Some(0),
            Color::Up if f == d && self.q[p] >= d => Some(1 + 2 * k),
            Color::Left if f >= 1 && f <= k => Some(2 * f - 1),
            Color::Right if f >= 1 && f <= k => Some(2 * f),
            _ => None,
        }
    }

    fn states(&self, idx: usize) -> Vec<State> {
        (0..self.bag.len()).map(|p| self.decode(idx, p)).collect()
    }

    fn index(&self, states: &[State]) -> Option<usize> {
        let mut idx = 0;
        for (p, &s) in states.iter().enumerate() {
            idx += self.encode(p, s)? * self.strides[p];
        }
        Some(idx)
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PwTable {
    pub family: PwFamily,
    pub entries: Vec<Poly>,
}

/// Bound check for runs driven by a linear arrangement.
pub struct CutwidthCheck<'a> {
    /// Node just before each forget, one per arrangement position.
    pub tagged: &'a [usize],
    pub cutwidth: usize,
}

const BOTH: [Color; 2] = [Color::Left, Color::Right];

fn only(c: Color) -> &'static [Color] {
    match c {
        Color::Left => &[Color::Left],
        Color::Right => &[Color::Right],
        Color::Up => &[Color::Up],
    }
}

fn position(bag: &[Vertex], v: Vertex) -> usize {
    bag.binary_search(&v).expect("vertex is in the bag")
}

pub fn leaf() -> PwTable {
    PwTable { family: PwFamily::new(Vec::new(), Vec::new(), Vec::new()), entries: vec![Poly::unit(0, Mod4::ONE)] }
}

pub fn introduce_vertex(ctx: &DpContext, child: PwTable, v: Vertex) -> PwTable {
    let f = &child.family;
    let p = f.bag.binary_search(&v).expect_err("vertex introduced twice");
    let (mut bag, mut d, mut q) = (f.bag.clone(), f.d.clone(), f.q.clone());
    bag.insert(p, v);
    d.insert(p, ctx.prep.d[v]);
    q.insert(p, 0);
    // the new digit has a single value, so packed indices are unchanged
    PwTable { family: PwFamily::new(bag, d, q), entries: child.entries }
}

pub fn introduce_edge(ctx: &DpContext, child: &PwTable, u: Vertex, v: Vertex, edge: usize) -> PwTable {
    let cf = &child.family;
    let (pu, pv) = (position(&cf.bag, u), position(&cf.bag, v));
    let mut q = cf.q.clone();
    q[pu] = (q[pu] + 1).min(cf.d[pu]);
    q[pv] = (q[pv] + 1).min(cf.d[pv]);
    let family = PwFamily::new(cf.bag.clone(), cf.d.clone(), q);
    let shift = ctx.edge_shift(edge);
    let limit = ctx.domain.len();
    let entries = par::map_range(family.len, ctx.parallel, |idx| {
        let mut states = family.states(idx);
        let mut out = match cf.index(&states) {
            Some(i) => child.entries[i].clone(),
            None => Poly::zero(),
        };
        let ((fu, cu), (fv, cv)) = (states[pu], states[pv]);
        if fu == 0 || fv == 0 {
            return out;
        }
        let sides: &[Color] = match (cu, cv) {
            (Color::Up, Color::Up) => &BOTH,
            (Color::Up, c) | (c, Color::Up) => only(c),
            (a, b) if a == b => only(a),
            _ => &[],
        };
        for &s in sides {
            states[pu] = if fu >= 2 { (fu - 1, s) } else { (0, Color::Up) };
            states[pv] = if fv >= 2 { (fv - 1, s) } else { (0, Color::Up) };
            if let Some(i) = cf.index(&states) {
                out.add_shifted(&child.entries[i], shift, limit);
            }
        }
        out
    });
    PwTable { family, entries }
}

pub fn forget(ctx: &DpContext, child: &PwTable, v: Vertex) -> PwTable {
    let cf = &child.family;
    let p = position(&cf.bag, v);
    let (mut bag, mut d, mut q) = (cf.bag.clone(), cf.d.clone(), cf.q.clone());
    bag.remove(p);
    d.remove(p);
    q.remove(p);
    let family = PwFamily::new(bag, d, q);
    let dv = ctx.prep.d[v];
    let allowed = &ctx.prep.allowed[v];
    let entries = par::map_range(family.len, ctx.parallel, |idx| {
        let mut states = family.states(idx);
        states.insert(p, (0, Color::Up));
        let mut out = Poly::zero();
        for &o in allowed {
            let sides: &[Color] = if o == dv { only(Color::Up) } else { &BOTH };
            for &c in sides {
                states[p] = (o, c);
                if let Some(i) = cf.index(&states) {
                    out.add_assign(&child.entries[i]);
                }
            }
        }
        out
    });
    PwTable { family, entries }
}

fn prune(ctx: &DpContext, table: &mut PwTable, unseen: usize) {
    let row = ctx.domain.row();
    let family = &table.family;
    for (idx, poly) in table.entries.iter_mut().enumerate() {
        let spare: usize = (0..family.bag.len()).map(|p| family.d[p] - family.decode(idx, p).0).sum();
        let floor = ctx.a_floor(unseen + spare);
        if floor > 0 {
            poly.truncate_below(floor * row);
        }
    }
}

/// Π 2d(v) over the bag, saturating.
fn family_bound(ctx: &DpContext, bag: &[Vertex]) -> usize {
    bag.iter().fold(1usize, |acc, &v| acc.saturating_mul(2 * ctx.prep.d[v]))
}

/// 2n · 3^ctw, saturating.
pub fn cutwidth_bound(n: usize, cutwidth: usize) -> usize {
    let pow = u32::try_from(cutwidth).ok().and_then(|c| 3usize.checked_pow(c)).unwrap_or(usize::MAX);
    pow.saturating_mul(2 * n)
}

/// Runs the dynamic program along the path and returns the root cell vector.
pub fn run(
    ctx: &DpContext,
    nice: &NiceDecomposition,
    check: Option<&CutwidthCheck>,
    opts: &SolveOptions,
) -> Result<RunOutcome, SolveError> {
    if !nice.is_path() {
        return Err(SolveError::Invariant("path engine got a join node".into()));
    }
    let unseen = if opts.prune { unseen_capacity(nice, ctx.prep) } else { Vec::new() };
    let mut table: Option<PwTable> = None;
    let mut max_family = 0;
    let mut cells = 0u64;
    let missing = || SolveError::Invariant("decomposition children out of order".into());
    let ctw_cap = check.map(|c| cutwidth_bound(ctx.prep.n, c.cutwidth));
    for (x, node) in nice.nodes().iter().enumerate() {
        let next = match node.kind {
            NiceKind::Leaf => leaf(),
            NiceKind::IntroduceVertex(v) => introduce_vertex(ctx, table.take().ok_or_else(missing)?, v),
            NiceKind::IntroduceEdge { u, v, edge } => {
                introduce_edge(ctx, table.as_ref().ok_or_else(missing)?, u, v, edge)
            }
            NiceKind::Forget(v) => forget(ctx, table.as_ref().ok_or_else(missing)?, v),
            NiceKind::Join => unreachable!("checked above"),
        };
        let mut next = next;
        if opts.prune {
            prune(ctx, &mut next, unseen[x]);
        }
        let size = next.family.len();
        let bound = family_bound(ctx, &node.bag);
        if size > bound {
            return Err(SolveError::Invariant(format!("node {x}: family of {size} exceeds Π 2d(v) = {bound}")));
        }
        if let (Some(c), Some(cap)) = (check, ctw_cap) {
            if c.tagged.binary_search(&x).is_ok() && size > cap {
                return Err(SolveError::Invariant(format!("node {x}: family of {size} exceeds 2n·3^ctw = {cap}")));
            }
        }
        max_family = max_family.max(size);
        cells += next.entries.iter().map(|p| p.window_cells() as u64).sum::<u64>();
        table = Some(next);
    }
    let root = table.ok_or_else(missing)?;
    if root.entries.len() != 1 {
        return Err(SolveError::Invariant("root bag is not empty".into()));
    }
    Ok(RunOutcome {
        root: root.entries.into_iter().next().unwrap_or_default(),
        domain: ctx.domain,
        max_index_family: max_family,
        table_cells: cells,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cutcount::IsolationWeights;
    use crate::decomp::{make_nice_path, TreeDecomposition};
    use crate::engine::Prepared;
    use crate::instance::{Costs, DegreeSpec, Graph, Instance};
    use crate::oracle::count_cuts_and_solutions;

    #[test]
    fn root_matches_exhaustive_cut_count() {
        let g = Graph::new(5, vec![(0, 1), (1, 2), (2, 3), (3, 0), (2, 4), (3, 4), (0, 2)]);
        let td = TreeDecomposition::path(vec![vec![0, 1, 2], vec![0, 2, 3], vec![2, 3, 4]]);
        let costs = Costs { weights: vec![1, 2, 1, 3, 2, 1, 2], bound: 6 };
        let degrees = DegreeSpec::set(vec![vec![1, 2], vec![2], vec![1, 2, 3], vec![1, 3], vec![1, 2]]);
        let inst = Instance::new(g, degrees, Some(costs));
        let iso = IsolationWeights { weights: vec![3, 0, 5, 1, 4, 2, 6], z: 14 };
        let counts = count_cuts_and_solutions(&inst, &iso, 10).unwrap();
        let want: Vec<(u64, u64, u8)> = counts
            .cuts
            .iter()
            .filter(|(_, &c)| c % 4 != 0)
            .map(|(&(w1, w2), &c)| (w1, w2, (c % 4) as u8))
            .collect();
        let prep = Prepared::new(&inst);
        let ctx = DpContext::new(&prep, &iso, false);
        let nice = make_nice_path(&td, &inst.graph).unwrap();
        for prune in [false, true] {
            let opts = SolveOptions { prune, ..SolveOptions::default() };
            let out = run(&ctx, &nice, None, &opts).unwrap();
            let got: Vec<(u64, u64, u8)> = out
                .root
                .nonzero()
                .filter_map(|(i, v)| {
                    let (a, w1, w2) = out.domain.coords(i);
                    (a == prep.n - 1).then_some((w1, w2, v.value()))
                })
                .collect();
            assert_eq!(got, want, "prune {prune}");
        }
    }

    #[test]
    fn family_enumeration_round_trips() {
        let fam = PwFamily::new(vec![1, 2, 3, 4], vec![1, 3, 1, 2], vec![0, 2, 1, 5]);
        assert_eq!(fam.len(), 5 * 2 * 4);
        for i in 0..fam.len() {
            assert_eq!(fam.index(&fam.states(i)), Some(i));
        }
    }
}
