//! Differential testing against the oracle, and table-growth benchmarks.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::decomp::{LinearArrangement, NlcExpression, TreeDecomposition};
use crate::engine::{solve, EngineKind, SolveError, SolveOptions, Stats, Structure};
use crate::gen::{self, DegreePolicy, Family, GenOptions, Generated};
use crate::instance::{DegreeSpec, Instance};
use crate::io::write_instance;
use crate::par;

/// Expressions are searched for only up to this many vertices.
const EXPRESSION_SEARCH_MAX_N: usize = 6;

/// One test instance with every structure the engines may need.
#[derive(Clone, Debug)]
pub struct Case {
    pub id: String,
    /// Regenerates a random case with [`random_case`].
    pub seed: u64,
    pub instance: Instance,
    pub decomposition: TreeDecomposition,
    pub path_decomposition: TreeDecomposition,
    pub arrangement: LinearArrangement,
    pub expression: Option<NlcExpression>,
}

impl Case {
    fn new(id: String, seed: u64, g: Generated) -> Case {
        let graph = &g.instance.graph;
        let arrangement = g.arrangement.unwrap_or_else(|| LinearArrangement::identity(graph.n()));
        let decomposition = g.decomposition.unwrap_or_else(|| TreeDecomposition::trivial(graph));
        let path_decomposition = if decomposition.is_path() {
            decomposition.clone()
        } else {
            arrangement.path_decomposition(graph)
        };
        let expression = g.expression.or_else(|| {
            (graph.n() <= EXPRESSION_SEARCH_MAX_N).then(|| gen::nlc_width_expression(graph, 3)).flatten()
        });
        Case { id, seed, instance: g.instance, decomposition, path_decomposition, arrangement, expression }
    }

    pub fn structure(&self, engine: EngineKind) -> Option<Structure> {
        match engine {
            EngineKind::Oracle => None,
            EngineKind::Tw => Some(Structure::Decomposition(self.decomposition.clone())),
            EngineKind::Pw => Some(Structure::Decomposition(self.path_decomposition.clone())),
            EngineKind::Ctw => Some(Structure::Arrangement(self.arrangement.clone())),
            EngineKind::Nlc => self.expression.clone().map(Structure::Expression),
        }
    }

    /// The width parameter the engine runs against.
    pub fn width(&self, engine: EngineKind) -> usize {
        match engine {
            EngineKind::Oracle => 0,
            EngineKind::Tw => self.decomposition.width(),
            EngineKind::Pw => self.path_decomposition.width(),
            EngineKind::Ctw => self.arrangement.cutwidth(&self.instance.graph),
            EngineKind::Nlc => self.expression.as_ref().map_or(0, |e| e.k),
        }
    }
}

/// A random small instance: family, size, degree policy and weights are all
/// drawn from `seed`.
pub fn random_case(seed: u64, n_max: usize, weights: bool) -> Case {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let n = rng.gen_range(2..=n_max.max(2));
    let family = match rng.gen_range(0..7) {
        0 | 1 => Family::RandomPkt { n, k: rng.gen_range(1..=3), path: rng.gen_bool(0.5) },
        2 => Family::RandomArr { n, cut: rng.gen_range(1..=3) },
        3 | 4 => Family::RandomNlc { leaves: n, k: rng.gen_range(1..=3) },
        5 => Family::Cycle { n },
        _ => match rng.gen_range(0..3) {
            0 => Family::Path { n },
            1 => Family::Star { n },
            _ => Family::Grid { width: 2, height: (n / 2).max(1) },
        },
    };
    let opts = GenOptions {
        family,
        degrees: DegreePolicy::Mixed,
        r: rng.gen_range(1..=3),
        weights: (weights && rng.gen_bool(0.5)).then_some(3),
        keep: 0.6,
    };
    Case::new(format!("random-{seed:016x}"), seed, gen::generate(&opts, &mut rng))
}

/// Every connected graph on `n` vertices with degrees drawn from `seed`.
pub fn exhaustive_cases(n: usize, seed: u64) -> Vec<Case> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ (n as u64) << 32);
    gen::connected_graphs(n)
        .into_iter()
        .enumerate()
        .map(|(i, graph)| {
            let r = rng.gen_range(1..=3);
            let degrees = gen::random_degrees(&graph, DegreePolicy::Mixed, r, &mut rng);
            let arrangement = LinearArrangement::identity(n);
            let g = Generated {
                decomposition: Some(arrangement.path_decomposition(&graph)),
                arrangement: Some(arrangement),
                expression: None,
                instance: Instance::new(graph, degrees, None),
            };
            Case::new(format!("exhaustive-n{n}-{i}"), seed, g)
        })
        .collect()
}

#[derive(Clone, Debug)]
pub struct DiffConfig {
    pub seed: u64,
    /// Number of random cases.
    pub cases: usize,
    pub n_max: usize,
    /// All connected graphs up to this many vertices are added (0 for none).
    pub exhaustive_n: usize,
    pub engines: Vec<EngineKind>,
    pub reps: u32,
    pub weights: bool,
    pub parallel: bool,
}

impl Default for DiffConfig {
    fn default() -> Self {
        DiffConfig {
            seed: 0,
            cases: 200,
            n_max: 7,
            exhaustive_n: 4,
            engines: vec![EngineKind::Tw, EngineKind::Pw, EngineKind::Ctw, EngineKind::Nlc],
            reps: 20,
            weights: true,
            parallel: true,
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum Verdict {
    Agree,
    /// A randomized engine said no on a yes-instance.
    FalseNegative,
    /// False positive, deterministic mismatch, undercut cost or internal
    /// error.
    HardFail(String),
    Skipped(String),
}

#[derive(Clone, Debug)]
pub struct DiffRecord {
    pub case: usize,
    pub engine: EngineKind,
    pub width: usize,
    pub r: usize,
    pub n: usize,
    pub oracle: bool,
    pub oracle_cost: Option<u64>,
    pub answer: Option<bool>,
    pub min_cost: Option<u64>,
    pub stats: Stats,
    pub verdict: Verdict,
}

#[derive(Clone, Debug)]
pub struct DiffSummary {
    pub cases: Vec<Case>,
    pub records: Vec<DiffRecord>,
}

impl DiffSummary {
    pub fn hard_fails(&self) -> impl Iterator<Item = &DiffRecord> {
        self.records.iter().filter(|r| matches!(r.verdict, Verdict::HardFail(_)))
    }

    pub fn false_negatives(&self) -> impl Iterator<Item = &DiffRecord> {
        self.records.iter().filter(|r| r.verdict == Verdict::FalseNegative)
    }

    pub fn skipped(&self) -> usize {
        self.records.iter().filter(|r| matches!(r.verdict, Verdict::Skipped(_))).count()
    }

    /// Human-readable description of a record, with what is needed to
    /// reproduce it.
    pub fn describe(&self, rec: &DiffRecord) -> String {
        let case = &self.cases[rec.case];
        let what = match &rec.verdict {
            Verdict::HardFail(why) => why.clone(),
            Verdict::FalseNegative => "false negative".to_string(),
            Verdict::Skipped(why) => format!("skipped: {why}"),
            Verdict::Agree => "agree".to_string(),
        };
        format!(
            "{} (seed {}) engine {}: {what}; oracle {} cost {:?}, engine {:?} cost {:?}\n{}",
            case.id,
            case.seed,
            rec.engine.name(),
            if rec.oracle { "yes" } else { "no" },
            rec.oracle_cost,
            rec.answer.map(|a| if a { "yes" } else { "no" }),
            rec.min_cost,
            write_instance(&case.instance)
        )
    }
}

pub fn build_cases(cfg: &DiffConfig) -> Vec<Case> {
    let mut cases: Vec<Case> = (2..=cfg.exhaustive_n).flat_map(|n| exhaustive_cases(n, cfg.seed)).collect();
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    cases.extend((0..cfg.cases).map(|_| random_case(rng.gen(), cfg.n_max, cfg.weights)));
    cases
}

pub fn difftest(cfg: &DiffConfig) -> DiffSummary {
    let cases = build_cases(cfg);
    let per_case = par::map_tasks(cases.len(), cfg.parallel, |i| judge_case(i, &cases[i], cfg));
    DiffSummary { records: per_case.into_iter().flatten().collect(), cases }
}

fn judge_case(index: usize, case: &Case, cfg: &DiffConfig) -> Vec<DiffRecord> {
    let opts = SolveOptions { reps: cfg.reps, seed: case.seed, parallel: false, ..SolveOptions::default() };
    let inst = &case.instance;
    let r = inst.degrees.max_requirement();
    let oracle = solve(inst, EngineKind::Oracle, None, &opts).expect("generated instances are valid");
    cfg.engines
        .iter()
        .filter(|&&e| e != EngineKind::Oracle)
        .map(|&engine| {
            let mut rec = DiffRecord {
                case: index,
                engine,
                width: case.width(engine),
                r,
                n: inst.n(),
                oracle: oracle.answer,
                oracle_cost: oracle.min_cost,
                answer: None,
                min_cost: None,
                stats: Stats::default(),
                verdict: Verdict::Agree,
            };
            if engine == EngineKind::Nlc && inst.is_weighted() {
                rec.verdict = Verdict::Skipped("weighted instance".into());
                return rec;
            }
            let Some(structure) = case.structure(engine) else {
                rec.verdict = Verdict::Skipped("no structure available".into());
                return rec;
            };
            match solve(inst, engine, Some(&structure), &opts) {
                Ok(res) => {
                    rec.answer = Some(res.answer);
                    rec.min_cost = res.min_cost;
                    rec.stats = res.stats;
                    rec.verdict = judge(engine, &oracle, &res);
                }
                Err(e @ SolveError::Invariant(_)) => rec.verdict = Verdict::HardFail(e.to_string()),
                Err(e) => rec.verdict = Verdict::HardFail(format!("engine refused a valid case: {e}")),
            }
            rec
        })
        .collect()
}

fn judge(engine: EngineKind, oracle: &crate::engine::SolveResult, res: &crate::engine::SolveResult) -> Verdict {
    match (oracle.answer, res.answer) {
        (false, true) => Verdict::HardFail("false positive".into()),
        (true, false) if engine.is_exact() => Verdict::HardFail("deterministic engine mismatch".into()),
        (true, false) => Verdict::FalseNegative,
        _ => match (oracle.min_cost, res.min_cost) {
            // a witness cell certifies a tree of exactly that weight
            (Some(best), Some(found)) if res.answer && found < best => {
                Verdict::HardFail(format!("reported cost {found} below optimum {best}"))
            }
            _ => Verdict::Agree,
        },
    }
}

#[derive(Clone, Debug)]
pub struct BenchConfig {
    pub seed: u64,
    pub n: usize,
    pub widths: Vec<usize>,
    pub r: usize,
    pub engines: Vec<EngineKind>,
    pub reps: u32,
    pub parallel: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct BenchRow {
    pub instance: String,
    pub engine: EngineKind,
    pub width: usize,
    pub r: usize,
    pub max_index_family: u64,
    pub cells: u64,
    pub ms: f64,
}

/// One row per (width, engine), every degree bound set to r. tw and pw share
/// a random partial k-path per width, ctw gets a graph whose arrangement
/// cuts stay within the width, and nlc a random expression with that many
/// labels.
pub fn bench(cfg: &BenchConfig) -> Result<Vec<BenchRow>, SolveError> {
    let jobs: Vec<(usize, EngineKind)> =
        cfg.widths.iter().flat_map(|&w| cfg.engines.iter().map(move |&e| (w, e))).collect();
    let rows = par::map_tasks(jobs.len(), cfg.parallel, |j| {
        let (w, engine) = jobs[j];
        let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed ^ (w as u64) << 40);
        let (instance, id, structure, width) = if engine == EngineKind::Nlc {
            let (g, expr) = gen::random_nlc(cfg.n, w.max(1), &mut rng);
            let inst = Instance::new(g, DegreeSpec::bounded(vec![cfg.r; cfg.n]), None);
            (inst, format!("nlc-n{}-k{w}", cfg.n), Some(Structure::Expression(expr)), w.max(1))
        } else if engine == EngineKind::Ctw {
            let (g, arr) = gen::random_arrangement_graph(cfg.n, w.max(1), &mut rng);
            let width = arr.cutwidth(&g);
            let inst = Instance::new(g, DegreeSpec::bounded(vec![cfg.r; cfg.n]), None);
            (inst, format!("arr-n{}-c{w}", cfg.n), Some(Structure::Arrangement(arr)), width)
        } else {
            let (g, td, _) = gen::random_partial_ktree(cfg.n, w, true, 0.8, &mut rng);
            let width = td.width();
            let structure = (engine != EngineKind::Oracle).then_some(Structure::Decomposition(td));
            let inst = Instance::new(g, DegreeSpec::bounded(vec![cfg.r; cfg.n]), None);
            (inst, format!("pkt-n{}-w{w}", cfg.n), structure, width)
        };
        let opts = SolveOptions { reps: cfg.reps, seed: cfg.seed, parallel: false, ..SolveOptions::default() };
        let res = solve(&instance, engine, structure.as_ref(), &opts)?;
        Ok(BenchRow {
            instance: id,
            engine,
            width,
            r: cfg.r,
            max_index_family: res.stats.max_index_family,
            cells: res.stats.table_cells,
            ms: res.stats.ms,
        })
    });
    rows.into_iter().collect()
}
