//! Graphs, degree constraints and problem instances.
//!
//! Vertices are `0..n` internally. The text formats in [`crate::io`] are
//! 1-indexed and translate at the boundary.

use std::collections::{BTreeMap, VecDeque};
use std::fmt;

pub type Vertex = usize;

/// A simple undirected graph given as an edge list.
///
/// The edge list is stored as supplied so that [`Instance::validate`] can
/// report problems such as self-loops; engines only accept validated input.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Graph {
    n: usize,
    edges: Vec<(Vertex, Vertex)>,
}

impl Graph {
    pub fn new(n: usize, edges: Vec<(Vertex, Vertex)>) -> Self {
        Graph { n, edges }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn m(&self) -> usize {
        self.edges.len()
    }

    pub fn edges(&self) -> &[(Vertex, Vertex)] {
        &self.edges
    }

    /// Edge `e` with its endpoints ordered.
    pub fn edge(&self, e: usize) -> (Vertex, Vertex) {
        let (u, v) = self.edges[e];
        (u.min(v), u.max(v))
    }

    /// Neighbour lists as `(neighbour, edge index)`.
    pub fn adjacency(&self) -> Vec<Vec<(Vertex, usize)>> {
        let mut adj = vec![Vec::new(); self.n];
        for (e, &(u, v)) in self.edges.iter().enumerate() {
            if u < self.n && v < self.n && u != v {
                adj[u].push((v, e));
                adj[v].push((u, e));
            }
        }
        adj
    }

    pub fn degree(&self, v: Vertex) -> usize {
        self.edges
            .iter()
            .filter(|&&(a, b)| a != b && (a == v || b == v))
            .count()
    }

    pub fn has_edge(&self, u: Vertex, v: Vertex) -> bool {
        self.edges
            .iter()
            .any(|&(a, b)| (a == u && b == v) || (a == v && b == u))
    }

    pub fn is_connected(&self) -> bool {
        if self.n == 0 {
            return true;
        }
        let adj = self.adjacency();
        let mut seen = vec![false; self.n];
        let mut queue = VecDeque::from([0]);
        seen[0] = true;
        let mut count = 1;
        while let Some(u) = queue.pop_front() {
            for &(w, _) in &adj[u] {
                if !seen[w] {
                    seen[w] = true;
                    count += 1;
                    queue.push_back(w);
                }
            }
        }
        count == self.n
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Variant {
    Set,
    Bounded,
    Specified,
}

impl Variant {
    pub fn name(self) -> &'static str {
        match self {
            Variant::Set => "set",
            Variant::Bounded => "bounded",
            Variant::Specified => "specified",
        }
    }

    pub fn parse(s: &str) -> Option<Variant> {
        match s {
            "set" => Some(Variant::Set),
            "bounded" => Some(Variant::Bounded),
            "specified" => Some(Variant::Specified),
            _ => None,
        }
    }
}

impl fmt::Display for Variant {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// Per-vertex degree constraints.
///
/// For `Set` each entry lists the allowed degrees. For `Bounded` and
/// `Specified` each entry holds exactly one number: the upper bound or the
/// exact degree.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DegreeSpec {
    variant: Variant,
    values: Vec<Vec<usize>>,
}

impl DegreeSpec {
    pub fn from_raw(variant: Variant, values: Vec<Vec<usize>>) -> Self {
        DegreeSpec { variant, values }
    }

    pub fn set(mut sets: Vec<Vec<usize>>) -> Self {
        for s in &mut sets {
            s.sort_unstable();
            s.dedup();
        }
        DegreeSpec { variant: Variant::Set, values: sets }
    }

    pub fn bounded(bounds: Vec<usize>) -> Self {
        DegreeSpec {
            variant: Variant::Bounded,
            values: bounds.into_iter().map(|b| vec![b]).collect(),
        }
    }

    pub fn specified(degrees: Vec<usize>) -> Self {
        DegreeSpec {
            variant: Variant::Specified,
            values: degrees.into_iter().map(|d| vec![d]).collect(),
        }
    }

    pub fn variant(&self) -> Variant {
        self.variant
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    /// The numbers listed for `v`, as stored.
    pub fn raw(&self, v: Vertex) -> &[usize] {
        &self.values[v]
    }

    /// The set D(v) of allowed degrees, ascending.
    pub fn allowed(&self, v: Vertex) -> Vec<usize> {
        match self.variant {
            Variant::Set => self.values[v].clone(),
            Variant::Bounded => (1..=self.values[v][0]).collect(),
            Variant::Specified => vec![self.values[v][0]],
        }
    }

    /// d(v) = max D(v), or 0 when D(v) is empty.
    pub fn max_degree(&self, v: Vertex) -> usize {
        self.values[v].iter().copied().max().unwrap_or(0)
    }

    /// r = max over all v of max D(v).
    pub fn max_requirement(&self) -> usize {
        (0..self.values.len()).map(|v| self.max_degree(v)).max().unwrap_or(0)
    }

    pub fn allows(&self, v: Vertex, degree: usize) -> bool {
        match self.variant {
            Variant::Set => self.values[v].binary_search(&degree).is_ok(),
            Variant::Bounded => degree >= 1 && degree <= self.values[v][0],
            Variant::Specified => degree == self.values[v][0],
        }
    }
}

/// Edge weights together with the budget B.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Costs {
    pub weights: Vec<u64>,
    pub bound: u64,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Instance {
    pub graph: Graph,
    pub degrees: DegreeSpec,
    pub costs: Option<Costs>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Violation {
    EndpointOutOfRange { edge: usize, vertex: Vertex },
    SelfLoop { edge: usize },
    DuplicateEdge { edge: usize, first: usize },
    DegreeSpecLength { expected: usize, found: usize },
    MalformedDegreeEntry { vertex: Vertex },
    ZeroDegree { vertex: Vertex },
    EmptyDegreeSet { vertex: Vertex },
    WeightCount { expected: usize, found: usize },
    Disconnected,
}

impl Violation {
    /// Disconnected graphs are well-formed instances whose answer is "no".
    pub fn is_structural(&self) -> bool {
        !matches!(self, Violation::Disconnected)
    }
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Violation::EndpointOutOfRange { edge, vertex } => {
                write!(f, "edge {} has endpoint {} outside 1..n", edge + 1, vertex + 1)
            }
            Violation::SelfLoop { edge } => write!(f, "edge {} is a self-loop", edge + 1),
            Violation::DuplicateEdge { edge, first } => {
                write!(f, "edge {} duplicates edge {}", edge + 1, first + 1)
            }
            Violation::DegreeSpecLength { expected, found } => {
                write!(f, "degree spec covers {} vertices, expected {}", found, expected)
            }
            Violation::MalformedDegreeEntry { vertex } => {
                write!(f, "vertex {} must list exactly one degree", vertex + 1)
            }
            Violation::ZeroDegree { vertex } => {
                write!(f, "vertex {} lists degree 0", vertex + 1)
            }
            Violation::EmptyDegreeSet { vertex } => {
                write!(f, "vertex {} has an empty degree set", vertex + 1)
            }
            Violation::WeightCount { expected, found } => {
                write!(f, "{} weights for {} edges", found, expected)
            }
            Violation::Disconnected => f.write_str("graph is disconnected"),
        }
    }
}

/// Result of the specified-to-bounded reduction when the degree sum already
/// rules out a spanning tree.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct DegreeSumMismatch {
    pub sum: usize,
    pub expected: usize,
}

impl Instance {
    pub fn new(graph: Graph, degrees: DegreeSpec, costs: Option<Costs>) -> Self {
        Instance { graph, degrees, costs }
    }

    pub fn n(&self) -> usize {
        self.graph.n()
    }

    pub fn is_weighted(&self) -> bool {
        self.costs.is_some()
    }

    pub fn weight(&self, e: usize) -> u64 {
        self.costs.as_ref().map_or(0, |c| c.weights[e])
    }

    /// W = max edge weight (0 when unweighted).
    pub fn max_weight(&self) -> u64 {
        self.costs
            .as_ref()
            .and_then(|c| c.weights.iter().copied().max())
            .unwrap_or(0)
    }

    pub fn validate(&self) -> Vec<Violation> {
        let n = self.graph.n();
        let mut out = Vec::new();
        let mut seen: BTreeMap<(Vertex, Vertex), usize> = BTreeMap::new();
        for (e, &(u, v)) in self.graph.edges().iter().enumerate() {
            let mut bad = false;
            for w in [u, v] {
                if w >= n {
                    out.push(Violation::EndpointOutOfRange { edge: e, vertex: w });
                    bad = true;
                }
            }
            if bad {
                continue;
            }
            if u == v {
                out.push(Violation::SelfLoop { edge: e });
                continue;
            }
            let key = (u.min(v), u.max(v));
            if let Some(&first) = seen.get(&key) {
                out.push(Violation::DuplicateEdge { edge: e, first });
            } else {
                seen.insert(key, e);
            }
        }
        if self.degrees.len() != n {
            out.push(Violation::DegreeSpecLength { expected: n, found: self.degrees.len() });
        } else {
            for v in 0..n {
                let raw = self.degrees.raw(v);
                if self.degrees.variant() != Variant::Set && raw.len() != 1 {
                    out.push(Violation::MalformedDegreeEntry { vertex: v });
                    continue;
                }
                if raw.is_empty() {
                    out.push(Violation::EmptyDegreeSet { vertex: v });
                }
                if raw.contains(&0) {
                    out.push(Violation::ZeroDegree { vertex: v });
                }
            }
        }
        if let Some(c) = &self.costs {
            if c.weights.len() != self.graph.m() {
                out.push(Violation::WeightCount {
                    expected: self.graph.m(),
                    found: c.weights.len(),
                });
            }
        }
        if out.is_empty() && !self.graph.is_connected() {
            out.push(Violation::Disconnected);
        }
        out
    }

    /// Replaces exact degrees by upper bounds after checking that they sum
    /// to 2n - 2. Any other variant is returned unchanged.
    pub fn specified_to_bounded(&self) -> Result<Instance, DegreeSumMismatch> {
        if self.degrees.variant() != Variant::Specified {
            return Ok(self.clone());
        }
        let n = self.n();
        let sum: usize = (0..n).map(|v| self.degrees.raw(v)[0]).sum();
        let expected = 2 * n.saturating_sub(1);
        if sum != expected {
            return Err(DegreeSumMismatch { sum, expected });
        }
        let bounds = (0..n).map(|v| self.degrees.raw(v)[0]).collect();
        Ok(Instance { degrees: DegreeSpec::bounded(bounds), ..self.clone() })
    }

    /// Rewrites upper bounds b(v) as the sets {1, ..., b(v)}.
    pub fn bounded_to_set(&self) -> Instance {
        if self.degrees.variant() != Variant::Bounded {
            return self.clone();
        }
        let sets = (0..self.n()).map(|v| self.degrees.allowed(v)).collect();
        Instance { degrees: DegreeSpec::set(sets), ..self.clone() }
    }

    /// Caps every requirement at n - 1, the largest degree a spanning tree
    /// can realise. Bounds are lowered; set members above n - 1 are dropped.
    /// Returns one warning per affected vertex.
    pub fn clamp_degrees(&self) -> (Instance, Vec<String>) {
        let n = self.n();
        let cap = n.saturating_sub(1);
        let mut warnings = Vec::new();
        let mut values = Vec::with_capacity(n);
        for v in 0..n {
            let raw = self.degrees.raw(v);
            if raw.iter().all(|&d| d <= cap) {
                values.push(raw.to_vec());
                continue;
            }
            warnings.push(format!(
                "vertex {}: degree requirement above n-1 = {} clamped",
                v + 1,
                cap
            ));
            match self.degrees.variant() {
                Variant::Bounded => values.push(vec![raw[0].min(cap)]),
                _ => values.push(raw.iter().copied().filter(|&d| d <= cap).collect()),
            }
        }
        let degrees = DegreeSpec::from_raw(self.degrees.variant(), values);
        (Instance { degrees, ..self.clone() }, warnings)
    }
}
