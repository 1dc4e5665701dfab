use super::{Dsu, OracleError};

/// Size guard for [`alpha_compatible`] when callers have no reason to raise it.
pub const DEFAULT_COMPAT_LIMIT: usize = 8;

/// A labelled forest whose vertices carry degree requirements g(v).
///
/// Vertices are `0..labels.len()`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct FixedForest {
    pub labels: Vec<usize>,
    pub requirements: Vec<usize>,
    pub edges: Vec<(usize, usize)>,
}

impl FixedForest {
    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }
}

/// Decides whether `first ⊕_alpha second` has a spanning tree containing
/// both forests in which every vertex gains exactly its requirement in cross
/// edges. A cross edge may join u in `first` and v in `second` when
/// (label(u), label(v)) is in `alpha`.
///
/// Exhaustive over subsets of the candidate cross edges.
pub fn alpha_compatible(
    first: &FixedForest,
    second: &FixedForest,
    alpha: &[(usize, usize)],
    limit: usize,
) -> Result<bool, OracleError> {
    let (n1, n2) = (first.len(), second.len());
    let n = n1 + n2;
    if n > limit {
        return Err(OracleError::SizeGuard { vertices: n, limit });
    }
    if n == 0 {
        return Ok(false);
    }
    let mut dsu = Dsu::new(n);
    let base = first.edges.iter().copied().chain(second.edges.iter().map(|&(u, v)| (u + n1, v + n1)));
    let mut base_edges = 0;
    for (u, v) in base {
        if !dsu.union(u, v) {
            return Ok(false);
        }
        base_edges += 1;
    }
    let need: Vec<usize> = first.requirements.iter().chain(&second.requirements).copied().collect();
    let cross = n - 1 - base_edges;
    let s1: usize = first.requirements.iter().sum();
    let s2: usize = second.requirements.iter().sum();
    if s1 != cross || s2 != cross {
        return Ok(false);
    }
    let mut candidates = Vec::new();
    for u in 0..n1 {
        for v in 0..n2 {
            if need[u] > 0 && need[n1 + v] > 0 && alpha.contains(&(first.labels[u], second.labels[v])) {
                candidates.push((u, n1 + v));
            }
        }
    }
    let mut avail = vec![0usize; n];
    for &(u, v) in &candidates {
        avail[u] += 1;
        avail[v] += 1;
    }
    if (0..n).any(|w| avail[w] < need[w]) {
        return Ok(false);
    }
    let mut need = need;
    Ok(search(&candidates, 0, &mut need, &mut avail, &dsu, cross))
}

fn search(cands: &[(usize, usize)], i: usize, need: &mut [usize], avail: &mut [usize], dsu: &Dsu, left: usize) -> bool {
    if left == 0 {
        return need.iter().all(|&x| x == 0);
    }
    if i == cands.len() {
        return false;
    }
    let (u, v) = cands[i];
    avail[u] -= 1;
    avail[v] -= 1;
    let mut found = false;
    if need[u] > 0 && need[v] > 0 && dsu.find(u) != dsu.find(v) {
        let mut d2 = dsu.clone();
        d2.union(u, v);
        need[u] -= 1;
        need[v] -= 1;
        found = search(cands, i + 1, need, avail, &d2, left - 1);
        need[u] += 1;
        need[v] += 1;
    }
    if !found && avail[u] >= need[u] && avail[v] >= need[v] {
        found = search(cands, i + 1, need, avail, dsu, left);
    }
    avail[u] += 1;
    avail[v] += 1;
    found
}

#[cfg(test)]
mod tests {
    use super::*;

    fn single(label: usize, g: usize) -> FixedForest {
        FixedForest { labels: vec![label], requirements: vec![g], edges: vec![] }
    }

    #[test]
    fn two_points() {
        let a = single(0, 1);
        let b = single(1, 1);
        assert!(alpha_compatible(&a, &b, &[(0, 1)], 8).unwrap());
        assert!(!alpha_compatible(&a, &b, &[(1, 0)], 8).unwrap());
        assert!(!alpha_compatible(&a, &single(1, 2), &[(0, 1)], 8).unwrap());
    }

    #[test]
    fn needs_connection_through_both_sides() {
        // first: two isolated label-0 vertices needing one edge each
        let first = FixedForest { labels: vec![0, 0], requirements: vec![1, 1], edges: vec![] };
        let second = single(0, 2);
        assert!(alpha_compatible(&first, &second, &[(0, 0)], 8).unwrap());
        let path = FixedForest { labels: vec![0, 0], requirements: vec![1, 0], edges: vec![(0, 1)] };
        assert!(alpha_compatible(&path, &single(0, 1), &[(0, 0)], 8).unwrap());
        assert!(!alpha_compatible(&path, &single(0, 2), &[(0, 0)], 8).unwrap());
    }

    #[test]
    fn guard() {
        let big = FixedForest { labels: vec![0; 9], requirements: vec![0; 9], edges: vec![] };
        assert!(alpha_compatible(&big, &single(0, 0), &[], 8).is_err());
    }
}
