//! Patterns and the rules that bring them to nice form.

use std::collections::BTreeSet;

use crate::oracle::{Dsu, FixedForest};

/// Outstanding degree demand per label of one component.
pub type Vector = Vec<u32>;

pub fn is_zero(v: &[u32]) -> bool {
    v.iter().all(|&x| x == 0)
}

pub fn is_unit(v: &[u32]) -> bool {
    v.iter().sum::<u32>() == 1
}

pub fn unit(k: usize, i: usize) -> Vector {
    let mut v = vec![0; k];
    v[i] = 1;
    v
}

/// A multiset of k-vectors, kept sorted so that equal multisets compare
/// equal.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Pattern {
    k: usize,
    vectors: Vec<Vector>,
}

impl Pattern {
    pub fn new(k: usize, mut vectors: Vec<Vector>) -> Self {
        debug_assert!(vectors.iter().all(|v| v.len() == k));
        vectors.sort_unstable();
        Pattern { k, vectors }
    }

    /// ⟨0⟩: a single finished component.
    pub fn done(k: usize) -> Self {
        Pattern::new(k, vec![vec![0; k]])
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn vectors(&self) -> &[Vector] {
        &self.vectors
    }

    pub fn len(&self) -> usize {
        self.vectors.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vectors.is_empty()
    }

    pub fn zeros(&self) -> usize {
        self.vectors.iter().filter(|v| is_zero(v)).count()
    }

    /// At most one zero vector, and for every label at most one non-unit
    /// vector with positive demand there.
    pub fn is_nice(&self) -> bool {
        self.zeros() <= 1
            && (0..self.k).all(|i| self.vectors.iter().filter(|v| !is_unit(v) && v[i] >= 1).count() <= 1)
    }

    /// Applies a relabelling: label i becomes `beta[i]`.
    pub fn relabel(&self, beta: &[usize]) -> Pattern {
        let vectors = self
            .vectors
            .iter()
            .map(|v| {
                let mut w = vec![0; self.k];
                for (i, &x) in v.iter().enumerate() {
                    w[beta[i]] += x;
                }
                w
            })
            .collect();
        Pattern::new(self.k, vectors)
    }
}

/// One path per vector; the vertex with label i carries demand vᵢ.
pub fn canonical_fixed_forest(pattern: &Pattern) -> FixedForest {
    let k = pattern.k;
    let mut f = FixedForest { labels: Vec::new(), requirements: Vec::new(), edges: Vec::new() };
    for v in &pattern.vectors {
        let first = f.labels.len();
        for (i, &x) in v.iter().enumerate() {
            f.labels.push(i);
            f.requirements.push(x as usize);
            if i > 0 {
                f.edges.push((first + i - 1, first + i));
            }
        }
    }
    debug_assert!(f.labels.len() == k * pattern.len());
    f
}

/// The pattern of a forest: per component, demand summed by label.
/// Returns `None` if the edges contain a cycle.
pub fn pattern_of(forest: &FixedForest, k: usize) -> Option<Pattern> {
    let n = forest.len();
    let mut dsu = Dsu::new(n);
    for &(u, v) in &forest.edges {
        if !dsu.union(u, v) {
            return None;
        }
    }
    let mut sums: Vec<Vector> = vec![vec![0; k]; n];
    for x in 0..n {
        sums[dsu.find(x)][forest.labels[x]] += forest.requirements[x] as u32;
    }
    Some(Pattern::new(k, (0..n).filter(|&x| dsu.find(x) == x).map(|x| sums[x].clone()).collect()))
}

/// π₁(i, v, u) = (v + u - eᵢ, eᵢ).
pub fn pi1(i: usize, v: &[u32], u: &[u32]) -> (Vector, Vector) {
    let mut a: Vector = v.iter().zip(u).map(|(x, y)| x + y).collect();
    a[i] -= 1;
    (a, unit(v.len(), i))
}

/// π₂(i, v, u) = (v + uᵢ·eᵢ, u - uᵢ·eᵢ).
pub fn pi2(i: usize, v: &[u32], u: &[u32]) -> (Vector, Vector) {
    let (mut a, mut b) = (v.to_vec(), u.to_vec());
    a[i] += u[i];
    b[i] = 0;
    (a, b)
}

/// Replaces the vectors at positions `v` and `u` by `rule(i, A[v], A[u])`.
/// Both must be positive at `i`.
pub fn apply_pi(
    pattern: &Pattern,
    rule: fn(usize, &[u32], &[u32]) -> (Vector, Vector),
    v: usize,
    u: usize,
    i: usize,
) -> Pattern {
    assert!(v != u && pattern.vectors[v][i] >= 1 && pattern.vectors[u][i] >= 1);
    let (a, b) = rule(i, &pattern.vectors[v], &pattern.vectors[u]);
    let mut vectors: Vec<Vector> =
        pattern.vectors.iter().enumerate().filter(|&(p, _)| p != v && p != u).map(|(_, x)| x.clone()).collect();
    vectors.push(a);
    vectors.push(b);
    Pattern::new(pattern.k, vectors)
}

/// A pattern with a big-vector mapping. Vectors are identified by position.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Marked {
    pub vectors: Vec<Vector>,
    /// `big[i]` is the position of a vector positive at label i.
    pub big: Vec<Option<usize>>,
}

impl Marked {
    /// Picks, for each label, the lexicographically largest vector
    /// positive there (the first copy when several are equal).
    pub fn new(pattern: &Pattern) -> Self {
        let vs = &pattern.vectors;
        let big = (0..pattern.k)
            .map(|i| {
                let last = (0..vs.len()).rev().find(|&p| vs[p][i] >= 1)?;
                (0..=last).find(|&p| vs[p] == vs[last])
            })
            .collect();
        Marked { vectors: vs.clone(), big }
    }

    fn is_big(&self, p: usize) -> bool {
        self.big.contains(&Some(p))
    }

    fn pattern(&self) -> Pattern {
        Pattern::new(self.big.len(), self.vectors.clone())
    }

    /// Identifies pairs that differ only by the order of vectors.
    fn key(&self) -> Vec<(Vector, Vec<usize>)> {
        let mut key: Vec<(Vector, Vec<usize>)> = self
            .vectors
            .iter()
            .enumerate()
            .map(|(p, v)| (v.clone(), (0..self.big.len()).filter(|&t| self.big[t] == Some(p)).collect()))
            .collect();
        key.sort_unstable();
        key
    }
}

/// Splits vector `u` off as a unit in every admissible way, handing the
/// rest of its demand to the big vectors. Returns one marked pattern per
/// label i with uᵢ >= 1 whose big vector is not `u`.
///
/// When `u` is itself big for some labels, one more pattern follows: the
/// shared labels of `u` go to their big vectors and `u` keeps the rest.
pub fn reduce_vector(m: &Marked, u: usize) -> Vec<Marked> {
    let k = m.big.len();
    let uv = &m.vectors[u];
    let labels: Vec<usize> = (0..k).filter(|&i| uv[i] >= 1 && m.big[i] != Some(u)).collect();
    assert!(!labels.is_empty(), "reduce_vector needs a label whose big vector is another vector");
    let moved = |p: usize| if p > u { p - 1 } else { p };
    let mut out: Vec<Marked> = labels
        .iter()
        .enumerate()
        .map(|(j, &ij)| {
            let target = m.big[ij].expect("positive label has a big vector");
            let mut w = m.vectors.clone();
            for &t in &labels[..j] {
                let b = m.big[t].expect("positive label has a big vector");
                w[b][t] += uv[t];
            }
            for t in 0..k {
                if !labels[..j].contains(&t) {
                    w[target][t] += uv[t];
                }
            }
            w[target][ij] -= 1;
            w.remove(u);
            w.push(unit(k, ij));
            let big = m
                .big
                .iter()
                .map(|b| b.map(|p| if p == u { moved(target) } else { moved(p) }))
                .collect();
            Marked { vectors: w, big }
        })
        .collect();
    if (0..k).any(|t| uv[t] >= 1 && m.big[t] == Some(u)) {
        let mut rest = m.clone();
        for &t in &labels {
            let b = m.big[t].expect("positive label has a big vector");
            rest.vectors[b][t] += uv[t];
            rest.vectors[u][t] = 0;
        }
        out.push(rest);
    }
    out
}

/// Rounds of each stage taken by one [`reduce_to_nice`] call.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct ReduceStats {
    pub stage2_rounds: usize,
    pub stage3_rounds: usize,
}

fn dedup(items: Vec<Marked>) -> Vec<Marked> {
    let mut seen = BTreeSet::new();
    items.into_iter().filter(|m| seen.insert(m.key())).collect()
}

/// Runs rounds of `step` over every pair until none changes. `step`
/// returns `None` for pairs it leaves alone.
fn fixpoint(mut current: Vec<Marked>, step: impl Fn(&Marked) -> Option<Vec<Marked>>) -> (Vec<Marked>, usize) {
    let mut rounds = 0;
    loop {
        let mut changed = false;
        let mut next = Vec::with_capacity(current.len());
        for m in current {
            match step(&m) {
                Some(out) => {
                    changed = true;
                    next.extend(out);
                }
                None => next.push(m),
            }
        }
        current = dedup(next);
        if !changed {
            return (current, rounds);
        }
        rounds += 1;
    }
}

/// An equivalent set of nice patterns. The input may hold at most one zero
/// vector.
pub fn reduce_to_nice(pattern: &Pattern) -> (BTreeSet<Pattern>, ReduceStats) {
    let k = pattern.k;
    let start = vec![Marked::new(pattern)];
    // stage 2: every non-unit non-zero vector becomes big or a unit
    let (stage2, stage2_rounds) = fixpoint(start, |m| {
        let u = (0..m.vectors.len())
            .find(|&p| !m.is_big(p) && !is_unit(&m.vectors[p]) && !is_zero(&m.vectors[p]))?;
        Some(reduce_vector(m, u))
    });
    // stage 3: dissolve big vectors that share a label with another big one
    let (stage3, stage3_rounds) = fixpoint(stage2, |m| {
        if m.pattern().is_nice() {
            return None;
        }
        let (i, _) = (0..k)
            .flat_map(|i| (0..k).map(move |t| (i, t)))
            .find(|&(i, t)| {
                i != t
                    && m.big[i].is_some_and(|bi| m.big[t] != Some(bi) && m.vectors[bi][t] >= 1)
            })
            .expect("a pattern that is not nice after stage 2 has a shared label");
        Some(reduce_vector(m, m.big[i].expect("checked above")))
    });
    let out = stage3.iter().map(Marked::pattern).collect();
    (out, ReduceStats { stage2_rounds, stage3_rounds })
}
