use crate::instance::{Graph, Vertex};

use super::{DecompError, TreeDecomposition};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum NiceKind {
    Leaf,
    IntroduceVertex(Vertex),
    /// Endpoints are ordered `u < v`; `edge` indexes the graph's edge list.
    IntroduceEdge { u: Vertex, v: Vertex, edge: usize },
    Forget(Vertex),
    Join,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct NiceNode {
    pub kind: NiceKind,
    /// Sorted.
    pub bag: Vec<Vertex>,
    pub children: Vec<usize>,
}

/// A nice tree decomposition with introduce-edge nodes.
///
/// Nodes are stored in depth-first post-order, so the children of a node
/// always precede it and the root is the last node. A join's left subtree is
/// stored entirely before its right subtree.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct NiceDecomposition {
    nodes: Vec<NiceNode>,
}

impl NiceDecomposition {
    /// Wraps a node list. Call [`NiceDecomposition::validate`] before use.
    pub fn from_nodes(nodes: Vec<NiceNode>) -> Self {
        NiceDecomposition { nodes }
    }

    pub fn nodes(&self) -> &[NiceNode] {
        &self.nodes
    }

    pub fn node(&self, x: usize) -> &NiceNode {
        &self.nodes[x]
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn root(&self) -> usize {
        self.nodes.len() - 1
    }

    pub fn width(&self) -> usize {
        self.nodes.iter().map(|x| x.bag.len()).max().unwrap_or(0).saturating_sub(1)
    }

    pub fn is_path(&self) -> bool {
        self.nodes.iter().all(|x| x.kind != NiceKind::Join)
    }

    /// Edge indices introduced in the subtree rooted at `x`, ascending.
    pub fn introduced_edges(&self, x: usize) -> Vec<usize> {
        let mut out = Vec::new();
        let mut stack = vec![x];
        while let Some(y) = stack.pop() {
            if let NiceKind::IntroduceEdge { edge, .. } = self.nodes[y].kind {
                out.push(edge);
            }
            stack.extend(&self.nodes[y].children);
        }
        out.sort_unstable();
        out
    }

    /// For every node, the vertices forgotten somewhere in its subtree.
    pub fn forgotten_below(&self) -> Vec<Vec<Vertex>> {
        let mut out: Vec<Vec<Vertex>> = Vec::with_capacity(self.nodes.len());
        for node in &self.nodes {
            let mut set: Vec<Vertex> = Vec::new();
            for &c in &node.children {
                set.extend(&out[c]);
            }
            if let NiceKind::Forget(v) = node.kind {
                set.push(v);
            }
            set.sort_unstable();
            out.push(set);
        }
        out
    }

    pub fn validate(&self, graph: &Graph) -> Result<(), DecompError> {
        let bad = |node: usize, reason: &str| DecompError::NotNice { node, reason: reason.into() };
        if self.nodes.is_empty() {
            return Err(DecompError::Empty);
        }
        let mut parent = vec![None; self.nodes.len()];
        let mut edge_seen = vec![false; graph.m()];
        let mut forgotten = vec![false; graph.n()];
        for (x, node) in self.nodes.iter().enumerate() {
            if node.bag.windows(2).any(|w| w[0] >= w[1]) {
                return Err(bad(x, "bag is not sorted"));
            }
            if node.bag.iter().any(|&v| v >= graph.n()) {
                return Err(bad(x, "bag vertex out of range"));
            }
            for &c in &node.children {
                if c >= x {
                    return Err(bad(x, "child does not precede parent"));
                }
                if parent[c].replace(x).is_some() {
                    return Err(bad(c, "node has two parents"));
                }
            }
            let child_bag = |i: usize| &self.nodes[node.children[i]].bag;
            let arity = node.children.len();
            match node.kind {
                NiceKind::Leaf => {
                    if arity != 0 || !node.bag.is_empty() {
                        return Err(bad(x, "leaf must be childless with an empty bag"));
                    }
                }
                NiceKind::IntroduceVertex(v) => {
                    if arity != 1 || child_bag(0).contains(&v) || with(child_bag(0), v) != node.bag {
                        return Err(bad(x, "introduce-vertex bag mismatch"));
                    }
                }
                NiceKind::Forget(v) => {
                    if arity != 1 || !child_bag(0).contains(&v) || with(&node.bag, v) != *child_bag(0) {
                        return Err(bad(x, "forget bag mismatch"));
                    }
                    if std::mem::replace(&mut forgotten[v], true) {
                        return Err(bad(x, "vertex forgotten twice"));
                    }
                }
                NiceKind::IntroduceEdge { u, v, edge } => {
                    if arity != 1 || *child_bag(0) != node.bag {
                        return Err(bad(x, "introduce-edge bag mismatch"));
                    }
                    if edge >= graph.m() || graph.edge(edge) != (u, v) {
                        return Err(bad(x, "introduced edge does not match the graph"));
                    }
                    if !node.bag.contains(&u) || !node.bag.contains(&v) {
                        return Err(bad(x, "edge endpoint missing from bag"));
                    }
                    if std::mem::replace(&mut edge_seen[edge], true) {
                        return Err(bad(x, "edge introduced twice"));
                    }
                }
                NiceKind::Join => {
                    if arity != 2 || *child_bag(0) != node.bag || *child_bag(1) != node.bag {
                        return Err(bad(x, "join children must share the bag"));
                    }
                }
            }
        }
        let root = self.root();
        if parent[..root].iter().any(Option::is_none) {
            return Err(bad(root, "more than one root"));
        }
        if !self.nodes[root].bag.is_empty() {
            return Err(bad(root, "root bag must be empty"));
        }
        if let Some(e) = edge_seen.iter().position(|s| !s) {
            return Err(DecompError::EdgeNotCovered(e));
        }
        if let Some(v) = forgotten.iter().position(|s| !s) {
            return Err(DecompError::VertexNotCovered(v));
        }
        Ok(())
    }
}

fn with(bag: &[Vertex], v: Vertex) -> Vec<Vertex> {
    let mut b = bag.to_vec();
    let pos = b.binary_search(&v).unwrap_or_else(|p| p);
    b.insert(pos, v);
    b
}

struct Builder<'g> {
    adj: Vec<Vec<(Vertex, usize)>>,
    graph: &'g Graph,
    introduced: Vec<bool>,
    nodes: Vec<NiceNode>,
}

impl<'g> Builder<'g> {
    fn new(graph: &'g Graph) -> Self {
        let mut adj = graph.adjacency();
        for a in &mut adj {
            a.sort_unstable();
        }
        Builder { adj, graph, introduced: vec![false; graph.m()], nodes: Vec::new() }
    }

    fn push(&mut self, kind: NiceKind, bag: Vec<Vertex>, children: Vec<usize>) -> usize {
        self.nodes.push(NiceNode { kind, bag, children });
        self.nodes.len() - 1
    }

    fn leaf(&mut self) -> usize {
        self.push(NiceKind::Leaf, Vec::new(), Vec::new())
    }

    fn introduce(&mut self, x: usize, v: Vertex) -> usize {
        let bag = with(&self.nodes[x].bag, v);
        self.push(NiceKind::IntroduceVertex(v), bag, vec![x])
    }

    /// Introduces every pending edge between `v` and the bag, then forgets `v`.
    fn forget(&mut self, mut x: usize, v: Vertex) -> usize {
        let bag = self.nodes[x].bag.clone();
        for i in 0..self.adj[v].len() {
            let (u, e) = self.adj[v][i];
            if !self.introduced[e] && bag.binary_search(&u).is_ok() {
                self.introduced[e] = true;
                let (a, b) = self.graph.edge(e);
                x = self.push(NiceKind::IntroduceEdge { u: a, v: b, edge: e }, bag.clone(), vec![x]);
            }
        }
        let smaller: Vec<Vertex> = bag.into_iter().filter(|&w| w != v).collect();
        self.push(NiceKind::Forget(v), smaller, vec![x])
    }

    fn morph(&mut self, mut x: usize, target: &[Vertex]) -> usize {
        let current = self.nodes[x].bag.clone();
        for &v in &current {
            if target.binary_search(&v).is_err() {
                x = self.forget(x, v);
            }
        }
        for &v in target {
            if current.binary_search(&v).is_err() {
                x = self.introduce(x, v);
            }
        }
        x
    }

    fn build(&mut self, td: &TreeDecomposition, adj: &[Vec<usize>], t: usize, parent: Option<usize>) -> usize {
        let target = &td.bags[t];
        let mut acc: Option<usize> = None;
        for &c in &adj[t] {
            if Some(c) == parent {
                continue;
            }
            let sub = self.build(td, adj, c, Some(t));
            let sub = self.morph(sub, target);
            acc = Some(match acc {
                None => sub,
                Some(prev) => self.push(NiceKind::Join, target.clone(), vec![prev, sub]),
            });
        }
        match acc {
            Some(x) => x,
            None => {
                let leaf = self.leaf();
                self.morph(leaf, target)
            }
        }
    }

    fn finish(mut self, mut x: usize) -> NiceDecomposition {
        for v in self.nodes[x].bag.clone() {
            x = self.forget(x, v);
        }
        NiceDecomposition { nodes: self.nodes }
    }
}

fn build_rooted(td: &TreeDecomposition, graph: &Graph, root: usize) -> NiceDecomposition {
    let mut b = Builder::new(graph);
    if td.bags.is_empty() {
        let leaf = b.leaf();
        return b.finish(leaf);
    }
    let adj = td.neighbours();
    let top = b.build(td, &adj, root, None);
    b.finish(top)
}

/// Converts a validated tree decomposition into a nice one of the same width.
///
/// Each edge is introduced directly below the forget node of whichever
/// endpoint is forgotten first, the highest node whose bag holds both.
pub fn make_nice(td: &TreeDecomposition, graph: &Graph) -> Result<NiceDecomposition, DecompError> {
    td.validate(graph)?;
    Ok(build_rooted(td, graph, 0))
}

/// Like [`make_nice`] for path decompositions, rooted at an end of the path
/// so that the result has no join nodes.
pub fn make_nice_path(td: &TreeDecomposition, graph: &Graph) -> Result<NiceDecomposition, DecompError> {
    td.validate(graph)?;
    if !td.is_path() {
        return Err(DecompError::NotAPath);
    }
    let root = td.neighbours().iter().position(|a| a.len() <= 1).unwrap_or(0);
    Ok(build_rooted(td, graph, root))
}
