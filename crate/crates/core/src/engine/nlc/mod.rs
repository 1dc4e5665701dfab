//! Deterministic dynamic program over an NLC expression.
//!
//! The table at a node is a set of nice patterns equivalent to the set of
//! patterns of all partial solutions below it. The instance is a yes
//! instance exactly when the root table holds ⟨0⟩.

pub mod join;
pub mod pattern;

use std::collections::BTreeSet;

use crate::decomp::{NlcExpression, NlcNode};
use crate::par;

use super::Prepared;
pub use pattern::{reduce_to_nice, Pattern, ReduceStats};

pub use join::{join_patterns, join_patterns_naive};
pub use pattern::{
    apply_pi, canonical_fixed_forest, is_unit, is_zero, pattern_of, pi1, pi2, reduce_vector, Marked, Vector,
};

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct NlcOutcome {
    pub accepted: bool,
    /// Largest table over all nodes.
    pub max_records: usize,
    /// Table sizes summed over all nodes.
    pub total_records: usize,
    /// Largest stage round counts seen in any reduction.
    pub reduce: ReduceStats,
}

/// The table of a single join: every pair of child patterns is combined,
/// relabelled, and brought to nice form.
pub fn join_table(
    left: &BTreeSet<Pattern>,
    right: &BTreeSet<Pattern>,
    alpha: &[(usize, usize)],
    beta: &[usize],
    parallel: bool,
) -> (BTreeSet<Pattern>, ReduceStats) {
    let lefts: Vec<&Pattern> = left.iter().collect();
    let rights: Vec<&Pattern> = right.iter().collect();
    let parts = par::map_range(lefts.len() * rights.len(), parallel, |x| {
        let (a, b) = (lefts[x / rights.len()], rights[x % rights.len()]);
        let mut out = BTreeSet::new();
        let mut stats = ReduceStats::default();
        for p in join_patterns(a, b, alpha) {
            let (nice, s) = reduce_to_nice(&p.relabel(beta));
            stats.stage2_rounds = stats.stage2_rounds.max(s.stage2_rounds);
            stats.stage3_rounds = stats.stage3_rounds.max(s.stage3_rounds);
            out.extend(nice);
        }
        (out, stats)
    });
    let mut table = BTreeSet::new();
    let mut stats = ReduceStats::default();
    for (part, s) in parts {
        table.extend(part);
        stats.stage2_rounds = stats.stage2_rounds.max(s.stage2_rounds);
        stats.stage3_rounds = stats.stage3_rounds.max(s.stage3_rounds);
    }
    (table, stats)
}

/// Per-label demand that the rest of the graph can still absorb at a node.
///
/// Vertices sharing a label at a node have the same neighbours outside it,
/// so a label's demand is bounded by the degree caps of those neighbours.
/// Patterns above the bound, and patterns holding a zero vector below the
/// root, have no completion and are dropped.
struct Capacity {
    per_label: Vec<u32>,
}

impl Capacity {
    fn of_nodes(prep: &Prepared, expr: &NlcExpression) -> Vec<Capacity> {
        let mut adj = vec![Vec::new(); prep.n];
        for &(u, v) in &prep.edges {
            adj[u].push(v);
            adj[v].push(u);
        }
        let mut inside = vec![false; prep.n];
        expr.eval()
            .into_iter()
            .map(|g| {
                g.labels.iter().for_each(|&(v, _)| inside[v] = true);
                let mut per_label = vec![0u32; expr.k];
                let mut done = vec![false; expr.k];
                for &(v, l) in &g.labels {
                    if !std::mem::replace(&mut done[l], true) {
                        let outside = adj[v].iter().filter(|&&w| !inside[w]);
                        per_label[l] = outside.map(|&w| prep.d[w] as u32).sum();
                    }
                }
                g.labels.iter().for_each(|&(v, _)| inside[v] = false);
                Capacity { per_label }
            })
            .collect()
    }

    fn admits(&self, p: &Pattern) -> bool {
        p.zeros() == 0
            && (0..self.per_label.len()).all(|i| p.vectors().iter().map(|v| v[i]).sum::<u32>() <= self.per_label[i])
    }
}

/// Whether some pair of patterns joins into a single finished tree.
fn completes(left: &BTreeSet<Pattern>, right: &BTreeSet<Pattern>, alpha: &[(usize, usize)], parallel: bool) -> bool {
    let demand = |p: &Pattern| p.vectors().iter().flatten().map(|&x| x as usize).sum::<usize>();
    let lefts: Vec<(&Pattern, usize)> = left.iter().map(|p| (p, demand(p))).collect();
    let rights: Vec<(&Pattern, usize)> = right.iter().map(|p| (p, demand(p))).collect();
    let done = Pattern::done(left.first().map_or(1, Pattern::k));
    let hits = par::map_range(lefts.len(), parallel, |i| {
        let (a, da) = lefts[i];
        // every cross edge takes one unit from each side and merges two
        // components
        rights.iter().any(|&(b, db)| da == db && da + 1 == a.len() + b.len() && join_patterns(a, b, alpha).contains(&done))
    });
    hits.into_iter().any(|h| h)
}

/// Runs the dynamic program. The expression must already be checked
/// against the instance graph.
pub fn solve_nlc(prep: &Prepared, expr: &NlcExpression, parallel: bool) -> NlcOutcome {
    let k = expr.k;
    if prep.n <= 1 {
        return NlcOutcome { accepted: true, ..NlcOutcome::default() };
    }
    let capacity = Capacity::of_nodes(prep, expr);
    let mut tables: Vec<Option<BTreeSet<Pattern>>> = vec![None; expr.nodes.len()];
    let mut outcome = NlcOutcome::default();
    for x in expr.postorder() {
        let mut table: BTreeSet<Pattern> = match &expr.nodes[x] {
            NlcNode::Leaf { label, vertex } => prep.allowed[*vertex]
                .iter()
                .map(|&t| {
                    let mut v = vec![0; k];
                    v[*label] = t as u32;
                    Pattern::new(k, vec![v])
                })
                .collect(),
            NlcNode::Join { left, right, alpha, .. } if x == expr.root => {
                let l = tables[*left].take().expect("children come first");
                let r = tables[*right].take().expect("children come first");
                outcome.accepted = completes(&l, &r, alpha, parallel);
                let table: BTreeSet<Pattern> = outcome.accepted.then(|| Pattern::done(k)).into_iter().collect();
                outcome.max_records = outcome.max_records.max(table.len());
                outcome.total_records += table.len();
                return outcome;
            }
            NlcNode::Join { left, right, alpha, beta } => {
                let l = tables[*left].take().expect("children come first");
                let r = tables[*right].take().expect("children come first");
                let (t, s) = join_table(&l, &r, alpha, beta, parallel);
                outcome.reduce.stage2_rounds = outcome.reduce.stage2_rounds.max(s.stage2_rounds);
                outcome.reduce.stage3_rounds = outcome.reduce.stage3_rounds.max(s.stage3_rounds);
                t
            }
        };
        table.retain(|p| capacity[x].admits(p));
        outcome.max_records = outcome.max_records.max(table.len());
        outcome.total_records += table.len();
        tables[x] = Some(table);
    }
    // the root is a leaf only when n = 1, handled above
    outcome
}
