//! Instance generators with matching structural witnesses.

use std::collections::{BTreeSet, HashMap};

use rand::seq::SliceRandom;
use rand::Rng;

use crate::decomp::{LinearArrangement, NlcExpression, NlcNode, TreeDecomposition};
use crate::instance::{Costs, DegreeSpec, Graph, Instance, Variant, Vertex};
use crate::oracle::Dsu;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Family {
    /// Partial k-tree (or k-path) with its decomposition of width k.
    RandomPkt { n: usize, k: usize, path: bool },
    /// Graph built along an arrangement whose cuts stay at most `cut`.
    RandomArr { n: usize, cut: usize },
    /// Graph evaluated from a random expression with `leaves` leaves.
    RandomNlc { leaves: usize, k: usize },
    Path { n: usize },
    Cycle { n: usize },
    Grid { width: usize, height: usize },
    Star { n: usize },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum DegreePolicy {
    Bounded,
    Set,
    /// Degrees of a planted spanning tree, of maximum degree r when one is
    /// found, sometimes perturbed so the answer may be "no".
    Specified,
    /// One of the three above, chosen per instance.
    Mixed,
}

impl DegreePolicy {
    pub fn parse(s: &str) -> Option<DegreePolicy> {
        Some(match s {
            "bounded" => DegreePolicy::Bounded,
            "set" => DegreePolicy::Set,
            "specified" => DegreePolicy::Specified,
            "mixed" => DegreePolicy::Mixed,
            _ => return None,
        })
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct GenOptions {
    pub family: Family,
    pub degrees: DegreePolicy,
    /// Largest degree a generated constraint allows (planted trees may
    /// exceed it when the graph has no tree within it).
    pub r: usize,
    /// Edge weights in 1..=w when set.
    pub weights: Option<u64>,
    /// Probability of keeping each non-forced edge (partial k-trees).
    pub keep: f64,
}

impl GenOptions {
    pub fn new(family: Family) -> Self {
        GenOptions { family, degrees: DegreePolicy::Bounded, r: 2, weights: None, keep: 0.6 }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Generated {
    pub instance: Instance,
    pub decomposition: Option<TreeDecomposition>,
    pub arrangement: Option<LinearArrangement>,
    pub expression: Option<NlcExpression>,
}

pub fn generate(opts: &GenOptions, rng: &mut impl Rng) -> Generated {
    let (graph, decomposition, arrangement, expression) = match opts.family {
        Family::RandomPkt { n, k, path } => {
            let (g, td, arr) = random_partial_ktree(n, k, path, opts.keep, rng);
            (g, Some(td), Some(arr), None)
        }
        Family::RandomArr { n, cut } => {
            let (g, arr) = random_arrangement_graph(n, cut, rng);
            (g.clone(), Some(arr.path_decomposition(&g)), Some(arr), None)
        }
        Family::RandomNlc { leaves, k } => {
            let (g, e) = random_nlc(leaves, k, rng);
            let arr = LinearArrangement::identity(g.n());
            (g.clone(), Some(arr.path_decomposition(&g)), Some(arr), Some(e))
        }
        Family::Path { n } => with_identity(Graph::new(n, (1..n).map(|v| (v - 1, v)).collect())),
        Family::Cycle { n } => {
            let mut e: Vec<(Vertex, Vertex)> = (1..n).map(|v| (v - 1, v)).collect();
            if n >= 3 {
                e.push((0, n - 1));
            }
            with_identity(Graph::new(n, e))
        }
        Family::Grid { width, height } => {
            let at = |x: usize, y: usize| y * width + x;
            let mut e = Vec::new();
            for y in 0..height {
                for x in 0..width {
                    if x + 1 < width {
                        e.push((at(x, y), at(x + 1, y)));
                    }
                    if y + 1 < height {
                        e.push((at(x, y), at(x, y + 1)));
                    }
                }
            }
            with_identity(Graph::new(width * height, e))
        }
        Family::Star { n } => with_identity(Graph::new(n, (1..n).map(|v| (0, v)).collect())),
    };
    let degrees = random_degrees(&graph, opts.degrees, opts.r, rng);
    let costs = opts.weights.map(|w| random_costs(&graph, w, rng));
    Generated { instance: Instance::new(graph, degrees, costs), decomposition, arrangement, expression }
}

/// [`generate`] driven by a seeded ChaCha8 stream.
pub fn generate_seeded(opts: &GenOptions, seed: u64) -> Generated {
    use rand::SeedableRng;
    generate(opts, &mut rand_chacha::ChaCha8Rng::seed_from_u64(seed))
}

type Witnesses = (Graph, Option<TreeDecomposition>, Option<LinearArrangement>, Option<NlcExpression>);

fn with_identity(g: Graph) -> Witnesses {
    let arr = LinearArrangement::identity(g.n());
    (g.clone(), Some(arr.path_decomposition(&g)), Some(arr), None)
}

/// Random k-tree (k-path when `path`) on n vertices, thinned by keeping
/// each edge with probability `keep` while staying connected. Returns the
/// graph, a decomposition of width min(k, n - 1), and the insertion order.
pub fn random_partial_ktree(
    n: usize,
    k: usize,
    path: bool,
    keep: f64,
    rng: &mut impl Rng,
) -> (Graph, TreeDecomposition, LinearArrangement) {
    let base = (k + 1).min(n);
    let mut label: Vec<Vertex> = (0..n).collect();
    label.shuffle(rng);
    let mut edges = BTreeSet::new();
    let mut add = |a: usize, b: usize, forced: bool, rng: &mut dyn rand::RngCore| {
        if forced || rng.gen_bool(keep) {
            let (x, y) = (label[a].min(label[b]), label[a].max(label[b]));
            edges.insert((x, y));
        }
    };
    for v in 1..base {
        for u in 0..v {
            add(u, v, u + 1 == v, rng);
        }
    }
    let mut bags: Vec<Vec<usize>> = vec![(0..base).collect()];
    let mut tree = Vec::new();
    for v in base..n {
        let parent = if path { bags.len() - 1 } else { rng.gen_range(0..bags.len()) };
        let mut bag = bags[parent].clone();
        bag.remove(rng.gen_range(0..bag.len()));
        let anchor = bag[rng.gen_range(0..bag.len())];
        for &u in &bag {
            add(u, v, u == anchor, rng);
        }
        bag.push(v);
        tree.push((parent, bags.len()));
        bags.push(bag);
    }
    let bags = bags.into_iter().map(|b| b.into_iter().map(|x| label[x]).collect()).collect();
    let graph = Graph::new(n, edges.into_iter().collect());
    (graph, TreeDecomposition::new(bags, tree), LinearArrangement::new(label))
}

/// Connected graph whose identity-order cuts (before relabelling) stay at
/// most `cut`: a spine path plus random chords that fit.
pub fn random_arrangement_graph(n: usize, cut: usize, rng: &mut impl Rng) -> (Graph, LinearArrangement) {
    let cut = cut.max(1);
    let mut load = vec![0usize; n.saturating_sub(1)];
    let mut edges = BTreeSet::new();
    for v in 1..n {
        edges.insert((v - 1, v));
        load[v - 1] += 1;
    }
    for _ in 0..3 * n {
        if n < 3 {
            break;
        }
        let a = rng.gen_range(0..n);
        let b = rng.gen_range(0..n);
        let (a, b) = (a.min(b), a.max(b));
        if b <= a + 1 || edges.contains(&(a, b)) || load[a..b].iter().any(|&l| l >= cut) {
            continue;
        }
        load[a..b].iter_mut().for_each(|l| *l += 1);
        edges.insert((a, b));
    }
    let mut label: Vec<Vertex> = (0..n).collect();
    label.shuffle(rng);
    let edges = edges.into_iter().map(|(a, b)| (label[a].min(label[b]), label[a].max(label[b]))).collect();
    (Graph::new(n, edges), LinearArrangement::new(label))
}

/// Random expression over `leaves` vertices and k labels whose graph is
/// connected. Leaf i is vertex i.
pub fn random_nlc(leaves: usize, k: usize, rng: &mut impl Rng) -> (Graph, NlcExpression) {
    assert!(leaves >= 1 && k >= 1);
    loop {
        let mut nodes: Vec<NlcNode> =
            (0..leaves).map(|v| NlcNode::Leaf { label: rng.gen_range(0..k), vertex: v }).collect();
        let mut roots: Vec<usize> = (0..leaves).collect();
        while roots.len() > 1 {
            let l = roots.swap_remove(rng.gen_range(0..roots.len()));
            let r = roots.swap_remove(rng.gen_range(0..roots.len()));
            let alpha = (0..k).flat_map(|i| (0..k).map(move |j| (i, j))).filter(|_| rng.gen_bool(0.5)).collect();
            let beta = (0..k).map(|_| rng.gen_range(0..k)).collect();
            nodes.push(NlcNode::Join { left: l, right: r, alpha, beta });
            roots.push(nodes.len() - 1);
        }
        let expr = NlcExpression { k, nodes, root: roots[0] };
        let g = expr.graph();
        if g.is_connected() {
            return (g, expr);
        }
    }
}

/// Edge weights uniform in 1..=w and a bound between the cheapest and the
/// dearest possible tree weight.
pub fn random_costs(graph: &Graph, w: u64, rng: &mut impl Rng) -> Costs {
    let w = w.max(1);
    let weights = (0..graph.m()).map(|_| rng.gen_range(1..=w)).collect();
    let t = graph.n().saturating_sub(1) as u64;
    Costs { weights, bound: rng.gen_range(t..=t * w) }
}

pub fn random_degrees(graph: &Graph, policy: DegreePolicy, r: usize, rng: &mut impl Rng) -> DegreeSpec {
    let n = graph.n();
    let r = r.max(1);
    let policy = match policy {
        DegreePolicy::Mixed => *[DegreePolicy::Bounded, DegreePolicy::Set, DegreePolicy::Specified]
            .choose(rng)
            .expect("non-empty"),
        p => p,
    };
    match policy {
        DegreePolicy::Bounded => DegreeSpec::bounded((0..n).map(|_| rng.gen_range(1..=r)).collect()),
        DegreePolicy::Set => DegreeSpec::set(
            (0..n)
                .map(|_| {
                    let mut s: Vec<usize> = (1..=r).filter(|_| rng.gen_bool(0.5)).collect();
                    if s.is_empty() {
                        s.push(rng.gen_range(1..=r));
                    }
                    s
                })
                .collect(),
        ),
        _ => {
            let mut d = planted_degrees(graph, r, rng)
                .or_else(|| planted_degrees(graph, n, rng))
                .unwrap_or_else(|| (0..n).map(|_| rng.gen_range(1..=r)).collect());
            if n >= 2 && rng.gen_bool(0.3) {
                // move one unit of degree between two vertices
                let (a, b) = (rng.gen_range(0..n), rng.gen_range(0..n));
                if a != b && d[a] > 1 && d[b] < r {
                    d[a] -= 1;
                    d[b] += 1;
                }
            }
            DegreeSpec::specified(d)
        }
    }
}

/// Degrees of a random spanning tree with maximum degree at most r, found
/// by randomized greedy search.
pub fn planted_degrees(graph: &Graph, r: usize, rng: &mut impl Rng) -> Option<Vec<usize>> {
    let n = graph.n();
    if n == 1 {
        return Some(vec![1]);
    }
    for _ in 0..32 {
        let mut order: Vec<usize> = (0..graph.m()).collect();
        order.shuffle(rng);
        let mut dsu = Dsu::new(n);
        let mut deg = vec![0usize; n];
        let mut taken = 0;
        for e in order {
            let (u, v) = graph.edge(e);
            if deg[u] < r && deg[v] < r && dsu.find(u) != dsu.find(v) {
                dsu.union(u, v);
                deg[u] += 1;
                deg[v] += 1;
                taken += 1;
            }
        }
        if taken + 1 == n {
            return Some(deg);
        }
    }
    None
}

/// Every connected graph on n vertices, one per isomorphism class
/// (n <= 7).
pub fn connected_graphs(n: usize) -> Vec<Graph> {
    assert!(n <= 7, "exhaustive enumeration is limited to 7 vertices");
    let pairs: Vec<(usize, usize)> = (0..n).flat_map(|u| (u + 1..n).map(move |v| (u, v))).collect();
    let mut perms = Vec::new();
    permutations(&mut (0..n).collect(), 0, &mut perms);
    let pair_index: HashMap<(usize, usize), usize> = pairs.iter().enumerate().map(|(i, &p)| (p, i)).collect();
    let mut seen = BTreeSet::new();
    let mut out = Vec::new();
    for mask in 0u64..1 << pairs.len() {
        let edges: Vec<(usize, usize)> =
            pairs.iter().enumerate().filter(|(i, _)| mask >> i & 1 == 1).map(|(_, &p)| p).collect();
        let g = Graph::new(n, edges.clone());
        if !g.is_connected() {
            continue;
        }
        let canon = perms
            .iter()
            .map(|p| {
                edges.iter().fold(0u64, |acc, &(u, v)| {
                    let (a, b) = (p[u].min(p[v]), p[u].max(p[v]));
                    acc | 1 << pair_index[&(a, b)]
                })
            })
            .min()
            .unwrap_or(0);
        if seen.insert(canon) {
            out.push(g);
        }
    }
    out
}

fn permutations(items: &mut Vec<usize>, at: usize, out: &mut Vec<Vec<usize>>) {
    if at == items.len() {
        out.push(items.clone());
        return;
    }
    for i in at..items.len() {
        items.swap(at, i);
        permutations(items, at + 1, out);
        items.swap(at, i);
    }
}

/// Finds an expression with at most `k` labels that evaluates to `graph`
/// (vertex ids preserved), by dynamic programming over vertex subsets and
/// their labelings. Exponential; meant for n <= 7.
pub fn find_nlc_expression(graph: &Graph, k: usize) -> Option<NlcExpression> {
    let n = graph.n();
    if n == 0 || n > 7 {
        return None;
    }
    let full = (1usize << n) - 1;
    // labelings are packed base k over the members of the subset
    #[derive(Clone)]
    enum Back {
        Leaf(usize),
        Join { s1: usize, l1: Vec<usize>, l2: Vec<usize>, alpha: Vec<(usize, usize)>, beta: Vec<usize> },
    }
    let members = |s: usize| (0..n).filter(move |v| s >> v & 1 == 1);
    let mut table: Vec<HashMap<Vec<usize>, Back>> = vec![HashMap::new(); full + 1];
    let mut betas: Vec<Vec<usize>> = vec![Vec::new()];
    for _ in 0..k {
        betas = betas.into_iter().flat_map(|b| (0..k).map(move |x| [b.clone(), vec![x]].concat())).collect();
    }
    let mut order: Vec<usize> = (1..=full).collect();
    order.sort_by_key(|s| s.count_ones());
    for s in order {
        if s.count_ones() == 1 {
            for lab in 0..k {
                table[s].insert(vec![lab], Back::Leaf(lab));
            }
            continue;
        }
        let low = s & s.wrapping_neg();
        // s1 holds the lowest member; s2 the rest
        let mut s1 = (s - 1) & s;
        while s1 > 0 {
            if s1 & low != 0 && s1 != s {
                let s2 = s & !s1;
                let (v1, v2): (Vec<usize>, Vec<usize>) = (members(s1).collect(), members(s2).collect());
                let (left, right) = (table[s1].clone(), table[s2].clone());
                for l1 in left.keys() {
                    for l2 in right.keys() {
                        let mut rel: HashMap<(usize, usize), bool> = HashMap::new();
                        let mut ok = true;
                        'pairs: for (a, &u) in v1.iter().enumerate() {
                            for (b, &v) in v2.iter().enumerate() {
                                let e = graph.has_edge(u, v);
                                if *rel.entry((l1[a], l2[b])).or_insert(e) != e {
                                    ok = false;
                                    break 'pairs;
                                }
                            }
                        }
                        if !ok {
                            continue;
                        }
                        let mut alpha: Vec<(usize, usize)> = rel.iter().filter(|(_, &e)| e).map(|(&p, _)| p).collect();
                        alpha.sort_unstable();
                        for beta in &betas {
                            let vs: Vec<usize> = members(s).collect();
                            let lab: Vec<usize> = vs
                                .iter()
                                .map(|v| match v1.iter().position(|x| x == v) {
                                    Some(a) => beta[l1[a]],
                                    None => beta[l2[v2.iter().position(|x| x == v).expect("member")]],
                                })
                                .collect();
                            table[s].entry(lab).or_insert_with(|| Back::Join {
                                s1,
                                l1: l1.clone(),
                                l2: l2.clone(),
                                alpha: alpha.clone(),
                                beta: beta.clone(),
                            });
                        }
                    }
                }
            }
            s1 = (s1 - 1) & s;
        }
    }
    let (root_lab, _) = table[full].iter().next()?;
    let mut nodes = Vec::new();
    fn build(
        s: usize,
        lab: &[usize],
        table: &[HashMap<Vec<usize>, Back>],
        n: usize,
        nodes: &mut Vec<NlcNode>,
    ) -> usize {
        match &table[s][lab] {
            Back::Leaf(l) => {
                nodes.push(NlcNode::Leaf { label: *l, vertex: s.trailing_zeros() as usize });
            }
            Back::Join { s1, l1, l2, alpha, beta } => {
                let left = build(*s1, l1, table, n, nodes);
                let right = build(s & !s1, l2, table, n, nodes);
                nodes.push(NlcNode::Join { left, right, alpha: alpha.clone(), beta: beta.clone() });
            }
        }
        nodes.len() - 1
    }
    let root = build(full, &root_lab.clone(), &table, n, &mut nodes);
    Some(NlcExpression { k, nodes, root })
}

/// Smallest k <= `max_k` with an expression for `graph`.
pub fn nlc_width_expression(graph: &Graph, max_k: usize) -> Option<NlcExpression> {
    (1..=max_k).find_map(|k| find_nlc_expression(graph, k))
}

/// Variant of a generated degree spec, for reporting.
pub fn variant_of(inst: &Instance) -> Variant {
    inst.degrees.variant()
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn connected_graph_counts() {
        let counts: Vec<usize> = (1..=5).map(|n| connected_graphs(n).len()).collect();
        assert_eq!(counts, vec![1, 1, 2, 6, 21]);
    }

    #[test]
    fn partial_ktree_witnesses_are_valid() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for path in [false, true] {
            let (g, td, arr) = random_partial_ktree(20, 3, path, 0.5, &mut rng);
            assert!(g.is_connected());
            td.validate(&g).unwrap();
            assert!(td.width() <= 3);
            assert_eq!(td.is_path(), path || td.is_path());
            arr.validate(20).unwrap();
        }
    }

    #[test]
    fn arrangement_graph_respects_cut() {
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        let (g, arr) = random_arrangement_graph(15, 3, &mut rng);
        assert!(g.is_connected());
        assert!(arr.cutwidth(&g) <= 3);
        let pd = arr.path_decomposition(&g);
        pd.validate(&g).unwrap();
        assert!(pd.width() <= 3);
    }

    #[test]
    fn expression_search_reproduces_graph() {
        let c5 = Graph::new(5, vec![(0, 1), (1, 2), (2, 3), (3, 4), (0, 4)]);
        let e = nlc_width_expression(&c5, 3).unwrap();
        e.check_against(&c5).unwrap();
        let k4 = Graph::new(4, vec![(0, 1), (0, 2), (0, 3), (1, 2), (1, 3), (2, 3)]);
        assert_eq!(nlc_width_expression(&k4, 3).unwrap().k, 1);
    }
}
