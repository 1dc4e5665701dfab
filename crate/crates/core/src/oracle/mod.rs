//! Exhaustive reference implementations.
//!
//! Everything here is exponential and meant for small instances: the
//! randomized engines and the NLC engine are checked against these results.

mod compat;


use std::collections::BTreeMap;

use thiserror::Error;

use crate::cutcount::IsolationWeights;
use crate::instance::{Graph, Instance, Vertex};

pub use compat::{alpha_compatible, FixedForest, DEFAULT_COMPAT_LIMIT};

/// Default vertex cap for exhaustive enumeration.
pub const DEFAULT_CAP: usize = 10;

#[derive(Clone, Debug, Error, PartialEq, Eq)]
pub enum OracleError {
    #[error("instance has {n} vertices, oracle cap is {cap}")]
    TooLarge { n: usize, cap: usize },
    #[error("{vertices} vertices exceed the compatibility size guard of {limit}")]
    SizeGuard { vertices: usize, limit: usize },
}

/// Union-find over a handful of vertices, copied rather than rolled back.
#[derive(Clone)]
pub struct Dsu(Vec<usize>);

impl Dsu {
    pub fn new(n: usize) -> Self {
        Dsu((0..n).collect())
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn find(&self, mut x: usize) -> usize {
        while self.0[x] != x {
            x = self.0[x];
        }
        x
    }

    pub fn union(&mut self, a: usize, b: usize) -> bool {
        let (ra, rb) = (self.find(a), self.find(b));
        if ra == rb {
            return false;
        }
        self.0[ra] = rb;
        true
    }

    fn components(&self) -> usize {
        (0..self.0.len()).filter(|&x| self.0[x] == x).count()
    }
}

fn connected_with(n: usize, edges: &[(Vertex, Vertex)], keep: impl Fn(usize) -> bool) -> bool {
    let mut d = Dsu::new(n);
    let mut comps = n;
    for (e, &(u, v)) in edges.iter().enumerate() {
        if keep(e) && d.union(u, v) {
            comps -= 1;
        }
    }
    comps <= 1
}

/// Calls `visit` once for every spanning tree, given as ascending edge
/// indices. Edges are decided one at a time: contracted (taken) when they
/// join two components, or deleted when the rest still spans.
pub fn for_each_spanning_tree(graph: &Graph, mut visit: impl FnMut(&[usize])) {
    let n = graph.n();
    if n == 0 {
        return;
    }
    if !graph.is_connected() {
        return;
    }
    struct St<'a> {
        edges: &'a [(Vertex, Vertex)],
        n: usize,
        deleted: Vec<bool>,
        chosen: Vec<usize>,
    }
    fn rec(st: &mut St, i: usize, dsu: &Dsu, visit: &mut dyn FnMut(&[usize])) {
        if st.chosen.len() == st.n - 1 {
            visit(&st.chosen);
            return;
        }
        if i == st.edges.len() {
            return;
        }
        let (u, v) = st.edges[i];
        if dsu.find(u) != dsu.find(v) {
            let mut d2 = dsu.clone();
            d2.union(u, v);
            st.chosen.push(i);
            rec(st, i + 1, &d2, visit);
            st.chosen.pop();
        }
        st.deleted[i] = true;
        let deleted = &st.deleted;
        if connected_with(st.n, st.edges, |e| !deleted[e]) {
            rec(st, i + 1, dsu, visit);
        }
        st.deleted[i] = false;
    }
    let mut st = St { edges: graph.edges(), n, deleted: vec![false; graph.m()], chosen: Vec::new() };
    rec(&mut st, 0, &Dsu::new(n), &mut visit);
}

/// All spanning trees of a graph with at most `cap` vertices.
pub fn spanning_trees(graph: &Graph, cap: usize) -> Result<Vec<Vec<usize>>, OracleError> {
    if graph.n() > cap {
        return Err(OracleError::TooLarge { n: graph.n(), cap });
    }
    let mut out = Vec::new();
    for_each_spanning_tree(graph, |t| out.push(t.to_vec()));
    Ok(out)
}

/// Number of spanning trees by the Matrix-Tree theorem (fraction-free
/// elimination on the reduced Laplacian).
pub fn matrix_tree_count(graph: &Graph) -> u128 {
    let n = graph.n();
    if n <= 1 {
        return 1;
    }
    let k = n - 1;
    let mut m = vec![vec![0i128; k]; k];
    for &(u, v) in graph.edges() {
        for (a, b) in [(u, v), (v, u)] {
            if a < k {
                m[a][a] += 1;
                if b < k {
                    m[a][b] -= 1;
                }
            }
        }
    }
    let mut prev = 1i128;
    let mut sign = 1i128;
    for i in 0..k {
        if m[i][i] == 0 {
            match (i + 1..k).find(|&r| m[r][i] != 0) {
                Some(r) => {
                    m.swap(i, r);
                    sign = -sign;
                }
                None => return 0,
            }
        }
        for r in i + 1..k {
            for c in i + 1..k {
                m[r][c] = (m[r][c] * m[i][i] - m[r][i] * m[i][c]) / prev;
            }
        }
        prev = m[i][i];
    }
    (sign * m[k - 1][k - 1]) as u128
}

/// Exact answer for one instance.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BruteForce {
    pub feasible: bool,
    /// Minimum weight of a tree meeting the degree constraints, ignoring B.
    pub min_cost: Option<u64>,
    /// A cheapest such tree, as edge indices.
    pub tree: Option<Vec<usize>>,
}

/// Searches all degree-feasible spanning trees.
///
/// Works on any variant directly through [`crate::instance::DegreeSpec::allows`].
/// A one-vertex instance counts as feasible with cost 0, matching the
/// engines' convention. For unweighted instances the search stops at the
/// first tree found.
pub fn solve_bruteforce(inst: &Instance, cap: usize) -> Result<BruteForce, OracleError> {
    let n = inst.n();
    if n > cap {
        return Err(OracleError::TooLarge { n, cap });
    }
    if n <= 1 {
        return Ok(BruteForce { feasible: true, min_cost: Some(0), tree: Some(vec![]) });
    }
    let no = BruteForce { feasible: false, min_cost: None, tree: None };
    if !inst.graph.is_connected() {
        return Ok(no);
    }
    let g = &inst.graph;
    let allowed: Vec<Vec<usize>> = (0..n).map(|v| inst.degrees.allowed(v)).collect();
    let cap_of: Vec<usize> = allowed.iter().map(|a| a.last().copied().unwrap_or(0)).collect();
    let mut order: Vec<usize> = (0..g.m()).collect();
    order.sort_by_key(|&e| {
        let (u, v) = g.edge(e);
        (cap_of[u].min(cap_of[v]), e)
    });
    let edges: Vec<(Vertex, Vertex)> = order.iter().map(|&e| g.edge(e)).collect();
    let weights: Vec<u64> = order.iter().map(|&e| inst.weight(e)).collect();
    let mut remaining = vec![0usize; n];
    for &(u, v) in &edges {
        remaining[u] += 1;
        remaining[v] += 1;
    }
    let mut s = Search {
        n,
        edges: &edges,
        weights: &weights,
        allowed: &allowed,
        deg: vec![0; n],
        remaining,
        deleted: vec![false; edges.len()],
        chosen: Vec::new(),
        cost: 0,
        best: None,
        stop_at_first: !inst.is_weighted(),
    };
    s.rec(0, &Dsu::new(n));
    Ok(match s.best {
        None => no,
        Some((cost, tree)) => {
            let mut tree: Vec<usize> = tree.into_iter().map(|i| order[i]).collect();
            tree.sort_unstable();
            let within = inst.costs.as_ref().map_or(true, |c| cost <= c.bound);
            BruteForce { feasible: within, min_cost: Some(cost), tree: Some(tree) }
        }
    })
}

struct Search<'a> {
    n: usize,
    edges: &'a [(Vertex, Vertex)],
    weights: &'a [u64],
    allowed: &'a [Vec<usize>],
    deg: Vec<usize>,
    remaining: Vec<usize>,
    deleted: Vec<bool>,
    chosen: Vec<usize>,
    cost: u64,
    best: Option<(u64, Vec<usize>)>,
    stop_at_first: bool,
}

impl Search<'_> {
    fn reachable(&self, v: Vertex) -> bool {
        let (lo, hi) = (self.deg[v], self.deg[v] + self.remaining[v]);
        self.allowed[v].iter().any(|&o| o >= lo && o <= hi)
    }

    fn done(&self) -> bool {
        self.stop_at_first && self.best.is_some()
    }

    fn rec(&mut self, i: usize, dsu: &Dsu) {
        if self.done() || self.best.as_ref().is_some_and(|(b, _)| self.cost >= *b) {
            return;
        }
        if self.chosen.len() == self.n - 1 {
            if (0..self.n).all(|v| self.allowed[v].contains(&self.deg[v])) {
                self.best = Some((self.cost, self.chosen.clone()));
            }
            return;
        }
        if i == self.edges.len() || self.edges.len() - i < self.n - 1 - self.chosen.len() {
            return;
        }
        let (u, v) = self.edges[i];
        self.remaining[u] -= 1;
        self.remaining[v] -= 1;
        if dsu.find(u) != dsu.find(v) {
            self.deg[u] += 1;
            self.deg[v] += 1;
            if self.reachable(u) && self.reachable(v) {
                let mut d2 = dsu.clone();
                d2.union(u, v);
                self.chosen.push(i);
                self.cost += self.weights[i];
                self.rec(i + 1, &d2);
                self.cost -= self.weights[i];
                self.chosen.pop();
            }
            self.deg[u] -= 1;
            self.deg[v] -= 1;
        }
        if self.reachable(u) && self.reachable(v) {
            self.deleted[i] = true;
            let deleted = &self.deleted;
            if connected_with(self.n, self.edges, |e| !deleted[e]) {
                self.rec(i + 1, dsu);
            }
            self.deleted[i] = false;
        }
        self.remaining[u] += 1;
        self.remaining[v] += 1;
    }
}

/// Exact Cut&Count tallies keyed by (ω₁, ω₂).
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct CutCounts {
    /// Pairs (F, cut) over relaxed solutions F with n - 1 edges.
    pub cuts: BTreeMap<(u64, u64), u128>,
    /// Relaxed solutions that are spanning trees.
    pub solutions: BTreeMap<(u64, u64), u128>,
}

/// Enumerates every edge set with n - 1 edges meeting the degree constraints
/// and tallies 2^{#components} consistent cuts for each.
pub fn count_cuts_and_solutions(
    inst: &Instance,
    iso: &IsolationWeights,
    cap: usize,
) -> Result<CutCounts, OracleError> {
    let n = inst.n();
    if n > cap {
        return Err(OracleError::TooLarge { n, cap });
    }
    let mut out = CutCounts::default();
    let target = n.saturating_sub(1);
    let mut chosen = Vec::new();
    let mut deg = vec![0usize; n];
    fn rec(
        inst: &Instance,
        iso: &IsolationWeights,
        i: usize,
        target: usize,
        chosen: &mut Vec<usize>,
        deg: &mut Vec<usize>,
        out: &mut CutCounts,
    ) {
        let g = &inst.graph;
        if chosen.len() == target {
            if (0..g.n()).all(|v| inst.degrees.allows(v, deg[v])) {
                let comps = components(g.n(), chosen.iter().map(|&e| g.edge(e)));
                let key = (
                    chosen.iter().map(|&e| inst.weight(e)).sum(),
                    chosen.iter().map(|&e| iso.weights[e]).sum(),
                );
                *out.cuts.entry(key).or_default() += 1u128 << comps;
                if comps == 1 {
                    *out.solutions.entry(key).or_default() += 1;
                }
            }
            return;
        }
        if i == g.m() || g.m() - i < target - chosen.len() {
            return;
        }
        let (u, v) = g.edge(i);
        let cap_u = inst.degrees.max_degree(u);
        let cap_v = inst.degrees.max_degree(v);
        if deg[u] < cap_u && deg[v] < cap_v {
            deg[u] += 1;
            deg[v] += 1;
            chosen.push(i);
            rec(inst, iso, i + 1, target, chosen, deg, out);
            chosen.pop();
            deg[u] -= 1;
            deg[v] -= 1;
        }
        rec(inst, iso, i + 1, target, chosen, deg, out);
    }
    if n > 0 {
        rec(inst, iso, 0, target, &mut chosen, &mut deg, &mut out);
    }
    Ok(out)
}

/// Number of connected components of the graph on `0..n` with `edges`.
pub fn components(n: usize, edges: impl IntoIterator<Item = (Vertex, Vertex)>) -> usize {
    let mut d = Dsu::new(n);
    for (u, v) in edges {
        d.union(u, v);
    }
    d.components()
}

/// Counts the 2-colourings of `0..n` that give both endpoints of every edge
/// the same colour, by trying all 2^n colourings.
pub fn consistent_cuts(n: usize, edges: &[(Vertex, Vertex)]) -> u128 {
    (0u64..1 << n)
        .filter(|mask| edges.iter().all(|&(u, v)| (mask >> u) & 1 == (mask >> v) & 1))
        .count() as u128
}
