use std::collections::BTreeSet;

use crate::instance::{Graph, Vertex};

use super::{DecompError, NiceDecomposition, NiceKind, NiceNode, TreeDecomposition};

/// A linear ordering v_1, ..., v_n of the vertices.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LinearArrangement {
    pub order: Vec<Vertex>,
}

impl LinearArrangement {
    pub fn new(order: Vec<Vertex>) -> Self {
        LinearArrangement { order }
    }

    pub fn identity(n: usize) -> Self {
        LinearArrangement { order: (0..n).collect() }
    }

    pub fn validate(&self, n: usize) -> Result<(), DecompError> {
        let mut seen = vec![false; n];
        if self.order.len() != n {
            return Err(DecompError::NotAPermutation);
        }
        for &v in &self.order {
            if v >= n || std::mem::replace(&mut seen[v], true) {
                return Err(DecompError::NotAPermutation);
            }
        }
        Ok(())
    }

    /// position[v] = i when v = v_{i+1}.
    pub fn positions(&self) -> Vec<usize> {
        let mut pos = vec![0; self.order.len()];
        for (i, &v) in self.order.iter().enumerate() {
            pos[v] = i;
        }
        pos
    }

    /// Number of edges crossing each gap between v_i and v_{i+1}.
    pub fn cut_sizes(&self, graph: &Graph) -> Vec<usize> {
        let pos = self.positions();
        let n = self.order.len();
        let mut diff = vec![0isize; n + 1];
        for &(u, v) in graph.edges() {
            let (a, b) = (pos[u].min(pos[v]), pos[u].max(pos[v]));
            diff[a] += 1;
            diff[b] -= 1;
        }
        let mut acc = 0isize;
        (0..n.saturating_sub(1))
            .map(|i| {
                acc += diff[i];
                acc as usize
            })
            .collect()
    }

    /// Path decomposition with bags {v_i} ∪ R_i, where R_i holds the later
    /// endpoints of edges leaving {v_1..v_i}. Its width is at most the
    /// cutwidth.
    pub fn path_decomposition(&self, graph: &Graph) -> TreeDecomposition {
        let pos = self.positions();
        let mut open: BTreeSet<Vertex> = BTreeSet::new();
        let mut bags = Vec::with_capacity(self.order.len());
        for (i, &v) in self.order.iter().enumerate() {
            open.remove(&v);
            for &(a, b) in graph.edges() {
                let (first, second) = if pos[a] < pos[b] { (a, b) } else { (b, a) };
                if first == v && pos[second] > i {
                    open.insert(second);
                }
            }
            bags.push(std::iter::once(v).chain(open.iter().copied()).collect());
        }
        TreeDecomposition::path(bags)
    }

    pub fn cutwidth(&self, graph: &Graph) -> usize {
        self.cut_sizes(graph).into_iter().max().unwrap_or(0)
    }
}

/// Builds the nice path decomposition induced by an arrangement.
///
/// Block i introduces v_i (unless already present) and its not yet present
/// later neighbours, introduces every edge from v_i to a later vertex, and
/// forgets v_i. Returns the decomposition together with, for each i, the
/// node just below the forget of v_i. That node's bag is R_i plus v_i, where
/// R_i holds the later endpoints of edges leaving {v_1..v_i}, and the edges
/// introduced below it are exactly those with an endpoint in {v_1..v_i}.
pub fn arrangement_to_nice_path(
    graph: &Graph,
    arrangement: &LinearArrangement,
) -> Result<(NiceDecomposition, Vec<usize>), DecompError> {
    arrangement.validate(graph.n())?;
    let pos = arrangement.positions();
    let mut later: Vec<Vec<(Vertex, usize)>> = vec![Vec::new(); graph.n()];
    for (e, &(u, v)) in graph.edges().iter().enumerate() {
        let (a, b) = if pos[u] < pos[v] { (u, v) } else { (v, u) };
        later[a].push((b, e));
    }
    for l in &mut later {
        l.sort_by_key(|&(b, _)| pos[b]);
    }
    let mut nodes = vec![NiceNode { kind: NiceKind::Leaf, bag: Vec::new(), children: Vec::new() }];
    let mut bag: Vec<Vertex> = Vec::new();
    let mut tagged = Vec::with_capacity(graph.n());
    let push = |nodes: &mut Vec<NiceNode>, kind: NiceKind, bag: &[Vertex]| {
        let child = nodes.len() - 1;
        nodes.push(NiceNode { kind, bag: bag.to_vec(), children: vec![child] });
    };
    for &v in &arrangement.order {
        for w in std::iter::once(v).chain(later[v].iter().map(|&(b, _)| b)) {
            if let Err(p) = bag.binary_search(&w) {
                bag.insert(p, w);
                push(&mut nodes, NiceKind::IntroduceVertex(w), &bag);
            }
        }
        for &(_, e) in &later[v] {
            let (a, b) = graph.edge(e);
            push(&mut nodes, NiceKind::IntroduceEdge { u: a, v: b, edge: e }, &bag);
        }
        tagged.push(nodes.len() - 1);
        let p = bag.binary_search(&v).expect("v_i is in its own bag");
        bag.remove(p);
        push(&mut nodes, NiceKind::Forget(v), &bag);
    }
    Ok((NiceDecomposition::from_nodes(nodes), tagged))
}
