//! The solver front door and the plumbing shared by the engines.
//!
//! [`solve`] validates the instance and its structural witness, applies the
//! variant reductions, and dispatches to one engine. The tree, path and
//! cutwidth engines are repeated with fresh isolation weights and answer
//! "yes" if any repetition finds a witness; a "yes" is always correct, a
//! "no" is wrong with probability at most 2^-reps.

pub mod nlc;
mod ntt;
pub mod pw;
pub mod tw;

use std::time::Instant;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::cutcount::{decide, IsolationWeights, Poly, WeightDomain, Witness};
use crate::decomp::{
    arrangement_to_nice_path, make_nice, make_nice_path, DecompError, LinearArrangement, NiceDecomposition,
    NlcExpression, TreeDecomposition,
};
use crate::instance::{Instance, Vertex, Violation};
use crate::oracle::{self, OracleError};
use crate::par;

pub use ntt::convolve;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum EngineKind {
    Oracle,
    Tw,
    Pw,
    Ctw,
    Nlc,
}

impl EngineKind {
    pub const ALL: [EngineKind; 5] =
        [EngineKind::Oracle, EngineKind::Tw, EngineKind::Pw, EngineKind::Ctw, EngineKind::Nlc];

    pub fn name(self) -> &'static str {
        match self {
            EngineKind::Oracle => "oracle",
            EngineKind::Tw => "tw",
            EngineKind::Pw => "pw",
            EngineKind::Ctw => "ctw",
            EngineKind::Nlc => "nlc",
        }
    }

    pub fn parse(s: &str) -> Option<EngineKind> {
        EngineKind::ALL.into_iter().find(|e| e.name() == s)
    }

    /// True for the engines whose answers carry no error probability.
    pub fn is_exact(self) -> bool {
        matches!(self, EngineKind::Oracle | EngineKind::Nlc)
    }
}

/// Colour of a bag vertex's component in a partial solution. `Up` marks a
/// vertex whose colour is not recorded: it has no edges yet or has reached
/// its maximum degree.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Color {
    Up,
    Left,
    Right,
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum JoinStrategy {
    /// Pairwise products over the degree vectors.
    #[default]
    Naive,
    /// One exact integer convolution per colour class.
    Fast,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SolveOptions {
    pub reps: u32,
    pub seed: u64,
    pub parallel: bool,
    pub join: JoinStrategy,
    /// Drop table cells that cannot reach n - 1 edges at the root.
    pub prune: bool,
    pub oracle_cap: usize,
}

impl Default for SolveOptions {
    fn default() -> Self {
        SolveOptions {
            reps: 20,
            seed: 0,
            parallel: true,
            join: JoinStrategy::Naive,
            prune: true,
            oracle_cap: oracle::DEFAULT_CAP,
        }
    }
}

/// The structural witness handed to an engine.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Structure {
    Decomposition(TreeDecomposition),
    Arrangement(LinearArrangement),
    Expression(NlcExpression),
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct Stats {
    pub max_index_family: u64,
    /// Cells materialised over one engine run, summed over all nodes.
    pub table_cells: u64,
    pub ms: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SolveResult {
    pub answer: bool,
    pub min_cost: Option<u64>,
    pub engine: EngineKind,
    pub reps: u32,
    pub seed: u64,
    pub witness: Option<Witness>,
    pub stats: Stats,
    /// False when a "no" may be a false negative.
    pub exact: bool,
    /// Set when the answer was decided before running the engine.
    pub note: Option<String>,
    pub warnings: Vec<String>,
}

#[derive(Clone, Debug, Error, PartialEq)]
pub enum SolveError {
    #[error("invalid instance: {}", join_violations(.0))]
    InvalidInstance(Vec<Violation>),
    #[error("invalid structure: {0}")]
    InvalidStructure(#[from] DecompError),
    #[error("engine {engine} needs {needed}")]
    MissingStructure { engine: &'static str, needed: &'static str },
    #[error("nlc is unweighted-only")]
    WeightedNlc,
    #[error(transparent)]
    Oracle(#[from] OracleError),
    #[error("internal invariant violated: {0}")]
    Invariant(String),
}

impl SolveError {
    /// Internal failures map to a distinct exit status in the CLI.
    pub fn is_internal(&self) -> bool {
        matches!(self, SolveError::Invariant(_))
    }
}

fn join_violations(v: &[Violation]) -> String {
    v.iter().map(ToString::to_string).collect::<Vec<_>>().join("; ")
}

/// A reduced, clamped set-variant instance in the form the engines read.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Prepared {
    pub n: usize,
    /// Normalised `(u, v)` with `u < v`.
    pub edges: Vec<(Vertex, Vertex)>,
    pub weights: Vec<u64>,
    /// D(v), ascending.
    pub allowed: Vec<Vec<usize>>,
    /// d(v) = max D(v).
    pub d: Vec<usize>,
    /// r = max d(v).
    pub r: usize,
    pub bound: Option<u64>,
    pub w_max: u64,
}

impl Prepared {
    /// Reads an instance as is. [`solve`] calls this after the reductions;
    /// tests may call it on any valid instance.
    pub fn new(inst: &Instance) -> Self {
        let n = inst.n();
        let allowed: Vec<Vec<usize>> = (0..n).map(|v| inst.degrees.allowed(v)).collect();
        let d: Vec<usize> = allowed.iter().map(|a| a.last().copied().unwrap_or(0)).collect();
        Prepared {
            n,
            edges: (0..inst.graph.m()).map(|e| inst.graph.edge(e)).collect(),
            weights: (0..inst.graph.m()).map(|e| inst.weight(e)).collect(),
            r: d.iter().copied().max().unwrap_or(0),
            allowed,
            d,
            bound: inst.costs.as_ref().map(|c| c.bound),
            w_max: inst.max_weight(),
        }
    }

    pub fn m(&self) -> usize {
        self.edges.len()
    }
}

/// Everything one dynamic-programming run needs besides the decomposition.
pub struct DpContext<'a> {
    pub prep: &'a Prepared,
    pub iso: &'a IsolationWeights,
    pub domain: WeightDomain,
    pub parallel: bool,
}

impl<'a> DpContext<'a> {
    pub fn new(prep: &'a Prepared, iso: &'a IsolationWeights, parallel: bool) -> Self {
        DpContext { prep, iso, domain: WeightDomain::new(prep.n, prep.w_max, iso.z), parallel }
    }

    /// Cell offset for taking edge `e`.
    pub fn edge_shift(&self, e: usize) -> usize {
        self.domain.edge_shift(self.prep.weights[e], self.iso.weights[e])
    }

    /// Smallest edge count a partial solution can have and still reach
    /// n - 1 edges. Every later edge joins two vertices that are not yet
    /// forgotten and uses one unit of spare degree at each end; `spare` is
    /// the total spare degree of those vertices.
    pub fn a_floor(&self, spare: usize) -> usize {
        self.domain.a_max.saturating_sub(spare / 2)
    }
}

/// Output of one engine run for one draw of isolation weights.
#[derive(Clone, Debug)]
pub struct RunOutcome {
    pub root: Poly,
    pub domain: WeightDomain,
    pub max_index_family: usize,
    pub table_cells: u64,
}

/// For every node, Σ d(v) over vertices not yet seen below it (neither in
/// the bag nor forgotten in the subtree).
pub fn unseen_capacity(nice: &NiceDecomposition, prep: &Prepared) -> Vec<usize> {
    let total: usize = prep.d.iter().sum();
    nice.forgotten_below()
        .iter()
        .zip(nice.nodes())
        .map(|(gone, node)| {
            let seen: usize = gone.iter().chain(&node.bag).map(|&v| prep.d[v]).sum();
            total - seen
        })
        .collect()
}

/// Seeded generator for repetition `rep`.
pub fn rep_rng(seed: u64, rep: u32) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(rep as u64 + 1);
    rng
}

enum Plan {
    Oracle,
    Tw(NiceDecomposition),
    Pw(NiceDecomposition),
    Ctw { nice: NiceDecomposition, tagged: Vec<usize>, cutwidth: usize },
    Nlc(NlcExpression),
}

fn plan(inst: &Instance, engine: EngineKind, structure: Option<&Structure>) -> Result<Plan, SolveError> {
    let g = &inst.graph;
    let missing = |needed| SolveError::MissingStructure { engine: engine.name(), needed };
    Ok(match (engine, structure) {
        (EngineKind::Oracle, _) => Plan::Oracle,
        (EngineKind::Tw, Some(Structure::Decomposition(td))) => Plan::Tw(make_nice(td, g)?),
        (EngineKind::Tw, _) => return Err(missing("a tree decomposition")),
        (EngineKind::Pw, Some(Structure::Decomposition(td))) => Plan::Pw(make_nice_path(td, g)?),
        (EngineKind::Pw, Some(Structure::Arrangement(a))) => Plan::Pw(arrangement_to_nice_path(g, a)?.0),
        (EngineKind::Pw, _) => return Err(missing("a path decomposition or an arrangement")),
        (EngineKind::Ctw, Some(Structure::Arrangement(a))) => {
            let (nice, tagged) = arrangement_to_nice_path(g, a)?;
            Plan::Ctw { nice, tagged, cutwidth: a.cutwidth(g) }
        }
        (EngineKind::Ctw, _) => return Err(missing("a linear arrangement")),
        (EngineKind::Nlc, Some(Structure::Expression(e))) => {
            e.check_against(g)?;
            Plan::Nlc(e.clone())
        }
        (EngineKind::Nlc, _) => return Err(missing("an NLC expression")),
    })
}

/// Solves one instance with one engine.
pub fn solve(
    inst: &Instance,
    engine: EngineKind,
    structure: Option<&Structure>,
    opts: &SolveOptions,
) -> Result<SolveResult, SolveError> {
    let start = Instant::now();
    let violations: Vec<Violation> = inst.validate().into_iter().filter(Violation::is_structural).collect();
    if !violations.is_empty() {
        return Err(SolveError::InvalidInstance(violations));
    }
    let plan = plan(inst, engine, structure)?;
    if engine == EngineKind::Nlc && inst.is_weighted() {
        return Err(SolveError::WeightedNlc);
    }
    let randomized = matches!(plan, Plan::Tw(_) | Plan::Pw(_) | Plan::Ctw { .. });
    let mut result = SolveResult {
        answer: false,
        min_cost: None,
        engine,
        reps: if randomized { opts.reps } else { 0 },
        seed: opts.seed,
        witness: None,
        stats: Stats::default(),
        exact: !randomized,
        note: None,
        warnings: Vec::new(),
    };
    let finish = |mut r: SolveResult| {
        r.stats.ms = start.elapsed().as_secs_f64() * 1e3;
        Ok(r)
    };
    let weighted = inst.is_weighted();
    if inst.n() <= 1 {
        result.answer = true;
        result.exact = true;
        result.min_cost = weighted.then_some(0);
        result.note = Some("single vertex".into());
        return finish(result);
    }
    if !inst.graph.is_connected() {
        result.exact = true;
        result.note = Some("graph is disconnected".into());
        return finish(result);
    }
    if let Plan::Oracle = plan {
        let bf = oracle::solve_bruteforce(inst, opts.oracle_cap)?;
        let bound = inst.costs.as_ref().map(|c| c.bound);
        result.answer = bf.feasible && bound.map_or(true, |b| bf.min_cost.is_some_and(|c| c <= b));
        result.min_cost = if weighted { bf.min_cost } else { None };
        return finish(result);
    }
    let reduced = match inst.specified_to_bounded() {
        Ok(r) => r.bounded_to_set(),
        Err(mismatch) => {
            result.exact = true;
            result.note = Some(format!("degree sum {} differs from 2n - 2 = {}", mismatch.sum, mismatch.expected));
            return finish(result);
        }
    };
    let (reduced, warnings) = reduced.clamp_degrees();
    result.warnings = warnings;
    if let Some(v) = (0..reduced.n()).find(|&v| reduced.degrees.raw(v).is_empty()) {
        result.exact = true;
        result.note = Some(format!("vertex {} has no admissible degree below n", v + 1));
        return finish(result);
    }
    let prep = Prepared::new(&reduced);
    match plan {
        Plan::Oracle => unreachable!("handled above"),
        Plan::Nlc(expr) => {
            let out = nlc::solve_nlc(&prep, &expr, opts.parallel);
            result.answer = out.accepted;
            result.stats.max_index_family = out.max_records as u64;
            result.stats.table_cells = out.total_records as u64;
        }
        Plan::Tw(nice) => {
            let run = |iso: &IsolationWeights| tw::run(&DpContext::new(&prep, iso, opts.parallel), &nice, opts);
            amplify(&prep, run, opts, &mut result)?;
        }
        Plan::Pw(nice) => {
            let run = |iso: &IsolationWeights| pw::run(&DpContext::new(&prep, iso, opts.parallel), &nice, None, opts);
            amplify(&prep, run, opts, &mut result)?;
        }
        Plan::Ctw { nice, tagged, cutwidth } => {
            let check = pw::CutwidthCheck { tagged: &tagged, cutwidth };
            let run = |iso: &IsolationWeights| {
                pw::run(&DpContext::new(&prep, iso, opts.parallel), &nice, Some(&check), opts)
            };
            amplify(&prep, run, opts, &mut result)?;
        }
    }
    finish(result)
}

/// Runs `reps` independent repetitions and folds them into `result`.
fn amplify<F>(prep: &Prepared, run: F, opts: &SolveOptions, result: &mut SolveResult) -> Result<(), SolveError>
where
    F: Fn(&IsolationWeights) -> Result<RunOutcome, SolveError> + Sync + Send,
{
    let outcomes = par::map_tasks(opts.reps as usize, opts.parallel, |rep| {
        let mut rng = rep_rng(opts.seed, rep as u32);
        let iso = IsolationWeights::sample(prep.m(), &mut rng);
        let out = run(&iso)?;
        let best = decide(&out.root, &out.domain, None).map_err(|e| SolveError::Invariant(e.to_string()))?;
        Ok::<_, SolveError>((best, out.max_index_family, out.table_cells))
    });
    let mut best: Option<Witness> = None;
    for outcome in outcomes {
        let (w, family, cells) = outcome?;
        result.stats.max_index_family = result.stats.max_index_family.max(family as u64);
        result.stats.table_cells = result.stats.table_cells.max(cells);
        if let Some(w) = w {
            if best.map_or(true, |b| (w.omega1, w.omega2) < (b.omega1, b.omega2)) {
                best = Some(w);
            }
        }
    }
    let within = |w: &Witness| prep.bound.map_or(true, |b| w.omega1 <= b);
    result.answer = best.as_ref().is_some_and(within);
    if prep.bound.is_some() {
        result.min_cost = best.map(|w| w.omega1);
    }
    result.witness = best.filter(within);
    Ok(())
}
