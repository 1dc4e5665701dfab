use std::collections::{BTreeSet, VecDeque};

use crate::instance::{Graph, Vertex};

use super::DecompError;

/// A tree decomposition: bags plus the tree edges connecting them.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TreeDecomposition {
    pub bags: Vec<Vec<Vertex>>,
    pub edges: Vec<(usize, usize)>,
}

impl TreeDecomposition {
    pub fn new(mut bags: Vec<Vec<Vertex>>, edges: Vec<(usize, usize)>) -> Self {
        for b in &mut bags {
            b.sort_unstable();
            b.dedup();
        }
        TreeDecomposition { bags, edges }
    }

    /// Bags along a path, consecutive bags adjacent.
    pub fn path(bags: Vec<Vec<Vertex>>) -> Self {
        let edges = (1..bags.len()).map(|i| (i - 1, i)).collect();
        TreeDecomposition::new(bags, edges)
    }

    /// One bag holding every vertex. Valid for any graph.
    pub fn trivial(graph: &Graph) -> Self {
        TreeDecomposition::new(vec![(0..graph.n()).collect()], Vec::new())
    }

    pub fn width(&self) -> usize {
        self.bags.iter().map(Vec::len).max().unwrap_or(0).saturating_sub(1)
    }

    pub fn neighbours(&self) -> Vec<Vec<usize>> {
        let mut adj = vec![Vec::new(); self.bags.len()];
        for &(a, b) in &self.edges {
            if a < self.bags.len() && b < self.bags.len() {
                adj[a].push(b);
                adj[b].push(a);
            }
        }
        adj
    }

    /// True when the decomposition tree is a path.
    pub fn is_path(&self) -> bool {
        self.neighbours().iter().all(|a| a.len() <= 2)
    }

    pub fn validate(&self, graph: &Graph) -> Result<(), DecompError> {
        let t = self.bags.len();
        if t == 0 {
            return if graph.n() == 0 { Ok(()) } else { Err(DecompError::Empty) };
        }
        for &(a, b) in &self.edges {
            if a >= t || b >= t || a == b {
                return Err(DecompError::BadTreeEdge { a, b });
            }
        }
        if self.edges.len() != t - 1 {
            return Err(DecompError::NotATree);
        }
        let adj = self.neighbours();
        let mut seen = vec![false; t];
        let mut queue = VecDeque::from([0]);
        seen[0] = true;
        while let Some(x) = queue.pop_front() {
            for &y in &adj[x] {
                if !seen[y] {
                    seen[y] = true;
                    queue.push_back(y);
                }
            }
        }
        if seen.iter().any(|s| !s) {
            return Err(DecompError::NotATree);
        }
        for bag in &self.bags {
            if let Some(&v) = bag.iter().find(|&&v| v >= graph.n()) {
                return Err(DecompError::VertexOutOfRange(v));
            }
        }
        let sets: Vec<BTreeSet<Vertex>> =
            self.bags.iter().map(|b| b.iter().copied().collect()).collect();
        for v in 0..graph.n() {
            let holders: Vec<usize> = (0..t).filter(|&x| sets[x].contains(&v)).collect();
            if holders.is_empty() {
                return Err(DecompError::VertexNotCovered(v));
            }
            let mut reached = vec![false; t];
            let mut queue = VecDeque::from([holders[0]]);
            reached[holders[0]] = true;
            let mut count = 1;
            while let Some(x) = queue.pop_front() {
                for &y in &adj[x] {
                    if !reached[y] && sets[y].contains(&v) {
                        reached[y] = true;
                        count += 1;
                        queue.push_back(y);
                    }
                }
            }
            if count != holders.len() {
                return Err(DecompError::OccurrenceDisconnected(v));
            }
        }
        for (e, &(u, v)) in graph.edges().iter().enumerate() {
            if !sets.iter().any(|s| s.contains(&u) && s.contains(&v)) {
                return Err(DecompError::EdgeNotCovered(e));
            }
        }
        Ok(())
    }
}
