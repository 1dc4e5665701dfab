use std::collections::BTreeSet;

use crate::instance::{Graph, Vertex};

use super::DecompError;

/// A node of an NLC expression. Labels are `0..k`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum NlcNode {
    Leaf { label: usize, vertex: Vertex },
    /// beta(left ⊕_alpha right): cross edges join u from `left` and v from
    /// `right` whenever (label(u), label(v)) is in `alpha`; afterwards every
    /// label i becomes `beta[i]`.
    Join { left: usize, right: usize, alpha: Vec<(usize, usize)>, beta: Vec<usize> },
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct NlcExpression {
    pub k: usize,
    pub nodes: Vec<NlcNode>,
    pub root: usize,
}

/// The labelled graph an expression node evaluates to.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LabeledGraph {
    /// `(vertex, label)` sorted by vertex.
    pub labels: Vec<(Vertex, usize)>,
    /// Normalised `(u, v)` with `u < v`, sorted.
    pub edges: Vec<(Vertex, Vertex)>,
}

impl NlcExpression {
    /// Node indices with children before parents, ending at the root.
    pub fn postorder(&self) -> Vec<usize> {
        let mut out = Vec::with_capacity(self.nodes.len());
        let mut stack = vec![(self.root, false)];
        while let Some((x, done)) = stack.pop() {
            if done {
                out.push(x);
                continue;
            }
            stack.push((x, true));
            if let NlcNode::Join { left, right, .. } = self.nodes[x] {
                stack.push((right, false));
                stack.push((left, false));
            }
        }
        out
    }

    pub fn leaves(&self) -> usize {
        self.nodes.iter().filter(|x| matches!(x, NlcNode::Leaf { .. })).count()
    }

    /// Structural checks: label ranges, tree shape, and a bijection between
    /// leaves and the vertices `0..n`.
    pub fn validate(&self, n: usize) -> Result<(), DecompError> {
        let bad = |node: usize, reason: &str| DecompError::BadExpression { node, reason: reason.into() };
        if self.k == 0 {
            return Err(bad(0, "k must be at least 1"));
        }
        if self.root >= self.nodes.len() {
            return Err(bad(self.root, "root is not a node"));
        }
        let mut parent = vec![None; self.nodes.len()];
        let mut vertex_seen = vec![false; n];
        for (x, node) in self.nodes.iter().enumerate() {
            match node {
                NlcNode::Leaf { label, vertex } => {
                    if *label >= self.k {
                        return Err(bad(x, "label out of range"));
                    }
                    if *vertex >= n || std::mem::replace(&mut vertex_seen[*vertex], true) {
                        return Err(bad(x, "leaf vertex missing or repeated"));
                    }
                }
                NlcNode::Join { left, right, alpha, beta } => {
                    if alpha.iter().any(|&(i, j)| i >= self.k || j >= self.k) {
                        return Err(bad(x, "alpha label out of range"));
                    }
                    if beta.len() != self.k || beta.iter().any(|&b| b >= self.k) {
                        return Err(bad(x, "beta must map every label into range"));
                    }
                    for &c in [left, right] {
                        if c >= self.nodes.len() || c == x {
                            return Err(bad(x, "child is not a node"));
                        }
                        if parent[c].replace(x).is_some() {
                            return Err(bad(c, "node has two parents"));
                        }
                    }
                }
            }
        }
        if parent[self.root].is_some() {
            return Err(bad(self.root, "root has a parent"));
        }
        let order = self.postorder_checked().ok_or_else(|| bad(self.root, "expression has a cycle"))?;
        if order.len() != self.nodes.len() {
            return Err(bad(self.root, "unreachable nodes"));
        }
        if vertex_seen.iter().any(|s| !s) {
            return Err(bad(self.root, "some vertex has no leaf"));
        }
        Ok(())
    }

    fn postorder_checked(&self) -> Option<Vec<usize>> {
        let mut visits = 0usize;
        let mut out = Vec::new();
        let mut stack = vec![(self.root, false)];
        while let Some((x, done)) = stack.pop() {
            visits += 1;
            if visits > 4 * self.nodes.len() + 4 {
                return None;
            }
            if done {
                out.push(x);
                continue;
            }
            stack.push((x, true));
            if let NlcNode::Join { left, right, .. } = self.nodes[x] {
                stack.push((right, false));
                stack.push((left, false));
            }
        }
        Some(out)
    }

    /// Evaluates every node. Index `x` of the result is the graph of node `x`.
    pub fn eval(&self) -> Vec<LabeledGraph> {
        let mut out: Vec<Option<LabeledGraph>> = vec![None; self.nodes.len()];
        for x in self.postorder() {
            let g = match &self.nodes[x] {
                NlcNode::Leaf { label, vertex } => {
                    LabeledGraph { labels: vec![(*vertex, *label)], edges: Vec::new() }
                }
                NlcNode::Join { left, right, alpha, beta } => {
                    let (a, b) = (out[*left].as_ref().unwrap(), out[*right].as_ref().unwrap());
                    let alpha: BTreeSet<(usize, usize)> = alpha.iter().copied().collect();
                    let mut edges: Vec<(Vertex, Vertex)> = a.edges.iter().chain(&b.edges).copied().collect();
                    for &(u, lu) in &a.labels {
                        for &(v, lv) in &b.labels {
                            if alpha.contains(&(lu, lv)) {
                                edges.push((u.min(v), u.max(v)));
                            }
                        }
                    }
                    edges.sort_unstable();
                    let mut labels: Vec<(Vertex, usize)> =
                        a.labels.iter().chain(&b.labels).map(|&(v, l)| (v, beta[l])).collect();
                    labels.sort_unstable();
                    LabeledGraph { labels, edges }
                }
            };
            out[x] = Some(g);
        }
        out.into_iter().map(|g| g.unwrap_or(LabeledGraph { labels: vec![], edges: vec![] })).collect()
    }

    /// The graph of the root, as a plain graph on `0..n`.
    pub fn graph(&self) -> Graph {
        let root = self.eval().swap_remove(self.root);
        Graph::new(root.labels.len(), root.edges)
    }

    /// Checks that the root graph is exactly `graph` under the leaf
    /// correspondence.
    pub fn check_against(&self, graph: &Graph) -> Result<(), DecompError> {
        self.validate(graph.n())?;
        let mine: BTreeSet<(Vertex, Vertex)> = self.graph().edges().iter().copied().collect();
        let theirs: BTreeSet<(Vertex, Vertex)> =
            graph.edges().iter().map(|&(u, v)| (u.min(v), u.max(v))).collect();
        if mine != theirs || theirs.len() != graph.m() {
            return Err(DecompError::GraphMismatch);
        }
        Ok(())
    }
}
