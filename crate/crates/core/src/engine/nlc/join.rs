//! Combining two patterns across a join node.
//!
//! Each side's pattern is read as its canonical fixed forest: one component
//! per vector, with a vertex of demand vᵢ for every label i. The cross edges
//! allowed by α may be added as long as the result stays a forest and no
//! vertex exceeds its demand. Every resulting pattern with at most one zero
//! vector is reported.

use std::collections::{BTreeSet, HashSet};

use crate::oracle::Dsu;

use super::pattern::{is_unit, is_zero, unit, Pattern, Vector};

/// Cross edge orientation: `alpha` holds (left label, right label).
fn allowed(alpha: &[(usize, usize)], side: usize, mine: usize, theirs: usize) -> bool {
    if side == 0 {
        alpha.contains(&(mine, theirs))
    } else {
        alpha.contains(&(theirs, mine))
    }
}

struct Side {
    zeros: usize,
    /// Unit vector counts per label.
    units: Vec<u32>,
    bigs: Vec<Vector>,
}

impl Side {
    fn split(p: &Pattern) -> Side {
        let mut s = Side { zeros: 0, units: vec![0; p.k()], bigs: Vec::new() };
        for v in p.vectors() {
            if is_zero(v) {
                s.zeros += 1;
            } else if is_unit(v) {
                s.units[v.iter().position(|&x| x == 1).expect("unit")] += 1;
            } else {
                s.bigs.push(v.clone());
            }
        }
        s
    }
}

/// Big vectors of both sides, left first, with the residual demand left
/// after the big-to-big edges chosen so far.
#[derive(Clone, PartialEq, Eq, Hash)]
struct Forest {
    /// Component id per big vector.
    group: Vec<usize>,
    residual: Vec<Vector>,
}

fn normalise(group: &mut [usize]) {
    let mut map = Vec::new();
    for g in group.iter_mut() {
        let id = match map.iter().position(|&x| x == *g) {
            Some(id) => id,
            None => {
                map.push(*g);
                map.len() - 1
            }
        };
        *g = id;
    }
}

/// All patterns obtainable from `left ⊕_alpha right`, up to at most one
/// zero vector.
pub fn join_patterns(left: &Pattern, right: &Pattern, alpha: &[(usize, usize)]) -> BTreeSet<Pattern> {
    let k = left.k();
    let sides = [Side::split(left), Side::split(right)];
    let mut out = BTreeSet::new();
    let base_zeros = sides[0].zeros + sides[1].zeros;
    if base_zeros >= 2 {
        return out;
    }
    let nl = sides[0].bigs.len();
    let bigs: Vec<(usize, &Vector)> =
        sides[0].bigs.iter().map(|v| (0, v)).chain(sides[1].bigs.iter().map(|v| (1, v))).collect();
    let nb = bigs.len();

    // big-to-big forests: at most one edge per pair of components
    let pairs: Vec<(usize, usize)> = (0..nl).flat_map(|a| (nl..nb).map(move |b| (a, b))).collect();
    let start = Forest { group: (0..nb).collect(), residual: bigs.iter().map(|(_, v)| (*v).clone()).collect() };
    let mut forests = HashSet::new();
    let mut seen = HashSet::new();
    grow(&pairs, 0, start, alpha, k, &mut forests, &mut seen);

    for forest in forests {
        // optionally one unit-to-unit edge, which leaves a zero component
        let mut unit_choices: Vec<(Vec<u32>, Vec<u32>, usize)> =
            vec![(sides[0].units.clone(), sides[1].units.clone(), 0)];
        for &(i, j) in alpha {
            if sides[0].units[i] >= 1 && sides[1].units[j] >= 1 {
                let (mut a, mut b) = (sides[0].units.clone(), sides[1].units.clone());
                a[i] -= 1;
                b[j] -= 1;
                unit_choices.push((a, b, 1));
            }
        }
        for (u0, u1, pair_zeros) in unit_choices {
            if base_zeros + pair_zeros >= 2 {
                continue;
            }
            // sources: (side, label) unit classes; targets: (big, label)
            let sources: Vec<(usize, usize)> = (0..2).flat_map(|s| (0..k).map(move |i| (s, i))).collect();
            let counts: Vec<u32> = sources.iter().map(|&(s, i)| if s == 0 { u0[i] } else { u1[i] }).collect();
            let mut finals = HashSet::new();
            let mut visited = HashSet::new();
            attach(
                &sources,
                &bigs,
                alpha,
                0,
                0,
                counts,
                forest.residual.clone(),
                &mut finals,
                &mut visited,
            );
            for (counts, residual) in finals {
                let mut vectors: Vec<Vector> = Vec::new();
                let groups = forest.group.iter().copied().max().map_or(0, |g| g + 1);
                for g in 0..groups {
                    let mut v = vec![0; k];
                    for b in (0..nb).filter(|&b| forest.group[b] == g) {
                        for t in 0..k {
                            v[t] += residual[b][t];
                        }
                    }
                    vectors.push(v);
                }
                for (c, &(_, i)) in counts.iter().zip(&sources) {
                    vectors.extend((0..*c).map(|_| unit(k, i)));
                }
                vectors.extend((0..base_zeros + pair_zeros).map(|_| vec![0; k]));
                let p = Pattern::new(k, vectors);
                if p.zeros() <= 1 {
                    out.insert(p);
                }
            }
        }
    }
    out
}

fn grow(
    pairs: &[(usize, usize)],
    at: usize,
    forest: Forest,
    alpha: &[(usize, usize)],
    k: usize,
    out: &mut HashSet<Forest>,
    seen: &mut HashSet<(usize, Forest)>,
) {
    if !seen.insert((at, forest.clone())) {
        return;
    }
    if at == pairs.len() {
        out.insert(forest);
        return;
    }
    grow(pairs, at + 1, forest.clone(), alpha, k, out, seen);
    let (a, b) = pairs[at];
    if forest.group[a] == forest.group[b] {
        return;
    }
    for &(i, j) in alpha {
        if forest.residual[a][i] >= 1 && forest.residual[b][j] >= 1 {
            let mut next = forest.clone();
            next.residual[a][i] -= 1;
            next.residual[b][j] -= 1;
            let (from, to) = (next.group[b], next.group[a]);
            next.group.iter_mut().filter(|g| **g == from).for_each(|g| *g = to);
            normalise(&mut next.group);
            grow(pairs, at + 1, next, alpha, k, out, seen);
        }
    }
}

/// Hands units of source class `src` to big vectors. Targets are the slots
/// (big, label) numbered big-major; `target` is the next slot to consider.
#[allow(clippy::too_many_arguments)]
fn attach(
    sources: &[(usize, usize)],
    bigs: &[(usize, &Vector)],
    alpha: &[(usize, usize)],
    src: usize,
    target: usize,
    counts: Vec<u32>,
    residual: Vec<Vector>,
    out: &mut HashSet<(Vec<u32>, Vec<Vector>)>,
    visited: &mut HashSet<(usize, usize, Vec<u32>, Vec<Vector>)>,
) {
    if !visited.insert((src, target, counts.clone(), residual.clone())) {
        return;
    }
    if src == sources.len() {
        out.insert((counts, residual));
        return;
    }
    let k = residual.first().map_or(0, Vec::len);
    let slots = bigs.len() * k;
    if target == slots || counts[src] == 0 {
        attach(sources, bigs, alpha, src + 1, 0, counts, residual, out, visited);
        return;
    }
    let (b, j) = (target / k, target % k);
    let (side, i) = sources[src];
    attach(sources, bigs, alpha, src, target + 1, counts.clone(), residual.clone(), out, visited);
    if bigs[b].0 != side && allowed(alpha, side, i, j) {
        let most = counts[src].min(residual[b][j]);
        for x in 1..=most {
            let (mut c, mut r) = (counts.clone(), residual.clone());
            c[src] -= x;
            r[b][j] -= x;
            attach(sources, bigs, alpha, src, target + 1, c, r, out, visited);
        }
    }
}

/// Reference version of [`join_patterns`]: tries every subset of the
/// candidate cross edges of the two canonical fixed forests.
pub fn join_patterns_naive(left: &Pattern, right: &Pattern, alpha: &[(usize, usize)]) -> BTreeSet<Pattern> {
    let k = left.k();
    // vertices with positive demand: (component, label, demand)
    let nl = left.len();
    let comps: Vec<&Vector> = left.vectors().iter().chain(right.vectors()).collect();
    let vertices: Vec<(usize, usize)> = (0..comps.len())
        .flat_map(|c| (0..k).map(move |i| (c, i)))
        .filter(|&(c, i)| comps[c][i] >= 1)
        .collect();
    let mut cands = Vec::new();
    for (x, &(c1, i)) in vertices.iter().enumerate() {
        for (y, &(c2, j)) in vertices.iter().enumerate() {
            if c1 < nl && c2 >= nl && alpha.contains(&(i, j)) {
                cands.push((x, y));
            }
        }
    }
    let mut out = BTreeSet::new();
    let mut need: Vec<u32> = vertices.iter().map(|&(c, i)| comps[c][i]).collect();
    let dsu = Dsu::new(comps.len());
    naive_rec(&cands, 0, &vertices, &mut need, &dsu, k, &mut out);
    out
}

fn naive_rec(
    cands: &[(usize, usize)],
    at: usize,
    vertices: &[(usize, usize)],
    need: &mut Vec<u32>,
    dsu: &Dsu,
    k: usize,
    out: &mut BTreeSet<Pattern>,
) {
    if at == cands.len() {
        let n = dsu.len();
        let mut by_root: Vec<Vector> = vec![vec![0; k]; n];
        for (x, &(c, i)) in vertices.iter().enumerate() {
            by_root[dsu.find(c)][i] += need[x];
        }
        let vectors = (0..n).filter(|&c| dsu.find(c) == c).map(|c| by_root[c].clone()).collect();
        let p = Pattern::new(k, vectors);
        if p.zeros() <= 1 {
            out.insert(p);
        }
        return;
    }
    naive_rec(cands, at + 1, vertices, need, dsu, k, out);
    let (x, y) = cands[at];
    let (cx, cy) = (vertices[x].0, vertices[y].0);
    if need[x] >= 1 && need[y] >= 1 && dsu.find(cx) != dsu.find(cy) {
        let mut next = dsu.clone();
        next.union(cx, cy);
        need[x] -= 1;
        need[y] -= 1;
        naive_rec(cands, at + 1, vertices, need, &next, k, out);
        need[x] += 1;
        need[y] += 1;
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    use crate::engine::nlc::pattern::reduce_to_nice;

    fn random_nice(rng: &mut impl Rng, k: usize) -> Pattern {
        loop {
            let count = rng.gen_range(1..=4);
            let vectors: Vec<Vector> = (0..count).map(|_| (0..k).map(|_| rng.gen_range(0..=2)).collect()).collect();
            let p = Pattern::new(k, vectors);
            if p.zeros() <= 1 {
                if let Some(q) = reduce_to_nice(&p).0.into_iter().next() {
                    return q;
                }
            }
        }
    }

    #[test]
    fn structured_join_matches_subset_enumeration() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for _ in 0..300 {
            let k = rng.gen_range(1..=3);
            let (a, b) = (random_nice(&mut rng, k), random_nice(&mut rng, k));
            let alpha: Vec<(usize, usize)> =
                (0..k).flat_map(|i| (0..k).map(move |j| (i, j))).filter(|_| rng.gen_bool(0.5)).collect();
            assert_eq!(join_patterns(&a, &b, &alpha), join_patterns_naive(&a, &b, &alpha), "{a:?} {b:?} {alpha:?}");
        }
    }
}
