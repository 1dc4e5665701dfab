//! End-to-end acceptance run. Prints one PASS/FAIL line per criterion and
//! exits non-zero when a criterion outside `KNOWN_FAILURES` fails.
//!
//! Built with `harness = false` so the lines are always visible.

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::io::Write as _;
use std::process::ExitCode;
use std::time::{Duration, Instant};

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use degtree::cutcount::{IsolationWeights, Mod4, Poly};
use degtree::decomp::{arrangement_to_nice_path, make_nice, make_nice_path, LinearArrangement, NlcExpression};
use degtree::engine::nlc::pattern::{apply_pi, canonical_fixed_forest, pi1, pi2};
use degtree::engine::nlc::{reduce_to_nice, solve_nlc, Pattern, ReduceStats};
use degtree::engine::tw::{join_fast, join_naive, TwTable};
use degtree::engine::{solve, DpContext, EngineKind, Prepared, SolveOptions, Structure};
use degtree::gen::{self, DegreePolicy, Family, GenOptions};
use degtree::harness::{self, DiffConfig, Verdict};
use degtree::instance::{DegreeSpec, Graph, Instance};
use degtree::oracle::{alpha_compatible, components, consistent_cuts, count_cuts_and_solutions, FixedForest};

// Budgets and tolerances.
const C1_GRAPH_MAX_N: usize = 6;
const C1_SPECS_PER_GRAPH: usize = 3;
const C1_RANDOM: usize = 500;
const C1_RANDOM_MAX_N: usize = 14;
const C1_MAX_K: usize = 3;
const C1_BUDGET: Duration = Duration::from_secs(10 * 60);

const C2_CASES: usize = 1000;
const C2_MAX_N: usize = 8;
const C2_REPS: u32 = 20;
const C2_MAX_FALSE_NEGATIVES: usize = 1;
const C2_BUDGET: Duration = Duration::from_secs(15 * 60);

const C3_INSTANCES: usize = 200;
const C3_MAX_N: usize = 6;

const C4_PAIRS: usize = 100;
const C4_MAX_BAG: usize = 3;
const C4_MAX_R: usize = 3;

const C6_PATTERNS: usize = 200;
const C6_MAX_K: usize = 2;
const C6_MAX_VECTORS: usize = 3;
const C6_MAX_ENTRY: u32 = 2;
const C6_FOREST_MAX_N: usize = 6;
const C6_MAX_G: usize = 2;
const C6_BUDGET: Duration = Duration::from_secs(10 * 60);

const C8_DECOMPOSITIONS: usize = 200;
const C8_GRAPH_MAX_N: usize = 6;

const C9_N: usize = 60;
const C9_WIDTHS: [usize; 3] = [4, 5, 6];
const C9_R: usize = 3;
const C9_REPS: u32 = 5;
const C9_PER_WIDTH: usize = 4;
const C9_INSTANCE_BUDGET: Duration = Duration::from_secs(5 * 60);
const C9_MAX_SPREAD: f64 = 2.0;

/// Failures analysed elsewhere that do not fail the run.
const KNOWN_FAILURES: &[usize] = &[5];

const SEED: u64 = 0x5eed_acce;

struct Outcome {
    pass: bool,
    detail: String,
}

fn report(id: usize, title: &str, started: Instant, out: &Outcome) {
    let line = format!(
        "criterion {id} [{title}]: {} ({:.1}s) {}\n",
        if out.pass { "PASS" } else { "FAIL" },
        started.elapsed().as_secs_f64(),
        out.detail
    );
    let mut stdout = std::io::stdout().lock();
    let _ = stdout.write_all(line.as_bytes());
    let _ = stdout.flush();
}

fn opts(seed: u64, reps: u32) -> SolveOptions {
    SolveOptions { reps, seed, parallel: true, oracle_cap: C1_RANDOM_MAX_N, ..SolveOptions::default() }
}

/// Degree constraints of a random variant with r in 1..=3.
fn random_spec(g: &Graph, rng: &mut ChaCha8Rng) -> DegreeSpec {
    let r = rng.gen_range(1..=3);
    gen::random_degrees(g, DegreePolicy::Mixed, r, rng)
}

/// Shared by criteria 1 and 7.
#[derive(Default)]
struct NlcRun {
    compared: usize,
    mismatches: Vec<String>,
    unrealised: usize,
    worst_stage2_excess: i64,
    worst_stage3_excess: i64,
}

impl NlcRun {
    fn check(&mut self, inst: &Instance, expr: &NlcExpression, seed: u64) {
        let o = opts(seed, 1);
        let want = solve(inst, EngineKind::Oracle, None, &o).expect("oracle runs");
        let got = solve(inst, EngineKind::Nlc, Some(&Structure::Expression(expr.clone())), &o);
        self.compared += 1;
        match got {
            Ok(res) if res.answer == want.answer => {}
            Ok(res) => self.mismatches.push(format!("n={} oracle {} nlc {}", inst.n(), want.answer, res.answer)),
            Err(e) => self.mismatches.push(format!("n={} error {e}", inst.n())),
        }
        // stage bounds, read off the engine on the raw constraints
        if inst.n() >= 2 && inst.graph.is_connected() {
            let out = solve_nlc(&Prepared::new(inst), expr, false);
            let ReduceStats { stage2_rounds, stage3_rounds } = out.reduce;
            self.worst_stage2_excess = self.worst_stage2_excess.max(stage2_rounds as i64 - inst.n() as i64);
            self.worst_stage3_excess = self.worst_stage3_excess.max(stage3_rounds as i64 - expr.k as i64);
        }
    }
}

fn criterion1(run: &mut NlcRun) -> Outcome {
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(SEED ^ 1);
    for n in 1..=C1_GRAPH_MAX_N {
        for g in gen::connected_graphs(n) {
            let Some(expr) = gen::nlc_width_expression(&g, C1_MAX_K) else {
                run.unrealised += 1;
                continue;
            };
            for _ in 0..C1_SPECS_PER_GRAPH {
                let inst = Instance::new(g.clone(), random_spec(&g, &mut rng), None);
                run.check(&inst, &expr, rng.gen());
            }
        }
    }
    let exhaustive = run.compared;
    for _ in 0..C1_RANDOM {
        let n = rng.gen_range(2..=C1_RANDOM_MAX_N);
        let k = rng.gen_range(1..=C1_MAX_K);
        let (g, expr) = gen::random_nlc(n, k, &mut rng);
        let inst = Instance::new(g.clone(), random_spec(&g, &mut rng), None);
        run.check(&inst, &expr, rng.gen());
    }
    let elapsed = start.elapsed();
    Outcome {
        pass: run.mismatches.is_empty() && elapsed <= C1_BUDGET,
        detail: format!(
            "{exhaustive} exhaustive + {} random comparisons, {} mismatches, {} graphs without a k<={C1_MAX_K} expression{}",
            run.compared - exhaustive,
            run.mismatches.len(),
            run.unrealised,
            run.mismatches.first().map(|m| format!("; first: {m}")).unwrap_or_default()
        ),
    }
}

fn criterion2_and_5() -> (Outcome, Outcome) {
    let start = Instant::now();
    let cfg = DiffConfig {
        seed: SEED ^ 2,
        cases: C2_CASES,
        n_max: C2_MAX_N,
        exhaustive_n: 0,
        engines: vec![EngineKind::Tw, EngineKind::Pw, EngineKind::Ctw],
        reps: C2_REPS,
        weights: true,
        parallel: true,
    };
    let summary = harness::difftest(&cfg);
    let elapsed = start.elapsed();
    let positives = summary.records.iter().filter(|r| r.verdict == Verdict::HardFail("false positive".into())).count();
    let hard = summary.hard_fails().count();
    let negatives = summary.false_negatives().count();
    let first = summary.hard_fails().next().map(|r| format!("; first: {}", summary.describe(r).lines().next().unwrap_or("")));
    let c2 = Outcome {
        pass: hard == 0 && negatives <= C2_MAX_FALSE_NEGATIVES && elapsed <= C2_BUDGET,
        detail: format!(
            "{} runs: {positives} false positives, {} other hard fails, {negatives} false negatives (<= {C2_MAX_FALSE_NEGATIVES}){}",
            summary.records.len(),
            hard - positives,
            first.unwrap_or_default()
        ),
    };

    // index-family bounds over the same runs
    let mut pw_runs = 0;
    let mut literal = 0;
    let mut worst_ratio: f64 = 0.0;
    let mut ctw_runs = 0;
    let mut ctw_over = 0;
    let mut engine_asserts = 0;
    for rec in &summary.records {
        if let Verdict::HardFail(why) = &rec.verdict {
            if why.contains("exceeds") {
                engine_asserts += 1;
            }
        }
        if rec.answer.is_none() || rec.stats.max_index_family == 0 {
            continue;
        }
        let fam = rec.stats.max_index_family as f64;
        match rec.engine {
            EngineKind::Pw => {
                pw_runs += 1;
                let bound = (2.0 * rec.r as f64).powi(rec.width as i32);
                if fam > bound {
                    literal += 1;
                    worst_ratio = worst_ratio.max(fam / bound);
                }
            }
            EngineKind::Ctw => {
                ctw_runs += 1;
                if fam > 2.0 * rec.n as f64 * 3f64.powi(rec.width as i32) {
                    ctw_over += 1;
                }
            }
            _ => {}
        }
    }
    let c5 = Outcome {
        pass: literal == 0 && ctw_over == 0 && engine_asserts == 0,
        detail: format!(
            "pw: {literal}/{pw_runs} runs exceed (2r)^pw (worst x{worst_ratio:.1}); \
             ctw: {ctw_over}/{ctw_runs} exceed 2n*3^ctw; in-engine per-bag bound violations: {engine_asserts}"
        ),
    };
    (c2, c5)
}

/// C[ω₁, ω₂] from first principles: every admissible edge set of size n - 1
/// and every colouring consistent with it.
fn brute_cuts(inst: &Instance, iso: &IsolationWeights) -> (BTreeMap<(u64, u64), u128>, BTreeMap<(u64, u64), u128>) {
    let (n, m) = (inst.n(), inst.graph.m());
    let mut cuts = BTreeMap::new();
    let mut trees = BTreeMap::new();
    for mask in 0u32..1 << m {
        if mask.count_ones() as usize != n - 1 {
            continue;
        }
        let chosen: Vec<usize> = (0..m).filter(|e| mask >> e & 1 == 1).collect();
        let edges: Vec<_> = chosen.iter().map(|&e| inst.graph.edge(e)).collect();
        let mut deg = vec![0; n];
        for &(u, v) in &edges {
            deg[u] += 1;
            deg[v] += 1;
        }
        if !(0..n).all(|v| inst.degrees.allows(v, deg[v])) {
            continue;
        }
        let key = (chosen.iter().map(|&e| inst.weight(e)).sum(), chosen.iter().map(|&e| iso.weights[e]).sum());
        *cuts.entry(key).or_default() += consistent_cuts(n, &edges);
        if components(n, edges.iter().copied()) == 1 {
            *trees.entry(key).or_default() += 1;
        }
    }
    (cuts, trees)
}

fn criterion3() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(SEED ^ 3);
    let graphs: Vec<Graph> = (2..=C3_MAX_N).flat_map(gen::connected_graphs).collect();
    let mut cells = 0;
    let mut bad = Vec::new();
    let mut done = 0;
    while done < C3_INSTANCES {
        let g = graphs.choose(&mut rng).expect("graphs exist").clone();
        let r = rng.gen_range(1..=3);
        let degrees = gen::random_degrees(&g, DegreePolicy::Mixed, r, &mut rng);
        let costs = rng.gen_bool(0.5).then(|| gen::random_costs(&g, 3, &mut rng));
        let inst = &Instance::new(g, degrees, costs);
        let id = format!("instance {done}");
        done += 1;
        let iso = IsolationWeights::sample(inst.graph.m(), &mut rng);
        let (cuts, trees) = brute_cuts(inst, &iso);
        let counted = count_cuts_and_solutions(inst, &iso, C3_MAX_N).expect("small instance");
        if counted.cuts.iter().filter(|(_, &c)| c != 0).ne(cuts.iter().filter(|(_, &c)| c != 0))
            || counted.solutions != trees
        {
            bad.push(format!("{id}: tallies differ from the direct enumeration"));
        }
        for (key, &c) in &cuts {
            cells += 1;
            let s = trees.get(key).copied().unwrap_or(0);
            if c % 4 != (2 * s) % 4 {
                bad.push(format!("{id} at {key:?}: C = {c}, |S| = {s}"));
            }
        }
    }
    Outcome {
        pass: bad.is_empty(),
        detail: format!(
            "{done} instances, {cells} weight pairs, {} violations{}",
            bad.len(),
            bad.first().map(|b| format!("; first: {b}")).unwrap_or_default()
        ),
    }
}

fn random_table(ctx: &DpContext, bag: &[usize], rng: &mut ChaCha8Rng) -> TwTable {
    let states: usize = bag.iter().map(|&v| 2 * (ctx.prep.d[v] + 1)).product();
    let cells = ctx.domain.len();
    let entries = (0..states)
        .map(|_| {
            if rng.gen_bool(0.2) {
                return Poly::zero();
            }
            let count = rng.gen_range(1..=6);
            Poly::from_cells((0..count).map(|_| (rng.gen_range(0..cells), Mod4::new(rng.gen_range(1..4)))))
        })
        .collect();
    TwTable { bag: bag.to_vec(), entries }
}

fn criterion4() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(SEED ^ 4);
    let (mut equal, mut differ, mut declined) = (0, 0, 0);
    for _ in 0..C4_PAIRS {
        let b = rng.gen_range(1..=C4_MAX_BAG);
        let n = b + rng.gen_range(1..=3);
        let g = Graph::new(n, (1..n).map(|v| (v - 1, v)).collect());
        let bounds = (0..n).map(|_| rng.gen_range(1..=C4_MAX_R)).collect();
        let costs = rng.gen_bool(0.5).then(|| gen::random_costs(&g, 3, &mut rng));
        let inst = Instance::new(g.clone(), DegreeSpec::bounded(bounds), costs);
        let prep = Prepared::new(&inst);
        let iso = IsolationWeights::sample(g.m(), &mut rng);
        let ctx = DpContext::new(&prep, &iso, false);
        let mut bag: Vec<usize> = (0..n).collect();
        bag.shuffle(&mut rng);
        bag.truncate(b);
        bag.sort_unstable();
        let left = random_table(&ctx, &bag, &mut rng);
        let right = random_table(&ctx, &bag, &mut rng);
        match join_fast(&ctx, &left, &right) {
            Some(fast) if fast == join_naive(&ctx, &left, &right) => equal += 1,
            Some(_) => differ += 1,
            None => declined += 1,
        }
    }
    Outcome {
        pass: differ == 0 && declined == 0,
        detail: format!("{equal} identical, {differ} different, {declined} not handled by the fast join"),
    }
}

// ---- criterion 6 and 7: patterns against fixed forests ----

type Assignment = Vec<(usize, usize)>;

fn permutations(n: usize) -> Vec<Vec<usize>> {
    if n == 0 {
        return vec![vec![]];
    }
    let mut out = Vec::new();
    for p in permutations(n - 1) {
        for at in 0..n {
            let mut q = p.clone();
            q.insert(at, n - 1);
            out.push(q);
        }
    }
    out
}

fn relabel_edges(edges: &[(usize, usize)], p: &[usize]) -> Vec<(usize, usize)> {
    let mut out: Vec<_> = edges.iter().map(|&(u, v)| (p[u].min(p[v]), p[u].max(p[v]))).collect();
    out.sort_unstable();
    out
}

/// Non-isomorphic trees on `s` vertices with their automorphisms.
fn tree_shapes(s: usize) -> Vec<(Vec<(usize, usize)>, Vec<Vec<usize>>)> {
    let perms = permutations(s);
    let mut trees: Vec<Vec<(usize, usize)>> = Vec::new();
    if s <= 2 {
        trees.push(if s == 2 { vec![(0, 1)] } else { vec![] });
    } else {
        // Prüfer sequences
        let mut seq = vec![0; s - 2];
        loop {
            let mut degree = vec![1; s];
            for &x in &seq {
                degree[x] += 1;
            }
            let mut edges = Vec::new();
            for &x in &seq {
                let leaf = (0..s).find(|&v| degree[v] == 1).expect("a leaf exists");
                edges.push((leaf.min(x), leaf.max(x)));
                degree[leaf] -= 1;
                degree[x] -= 1;
            }
            let rest: Vec<usize> = (0..s).filter(|&v| degree[v] == 1).collect();
            edges.push((rest[0], rest[1]));
            trees.push(edges);
            let Some(p) = (0..s - 2).find(|&p| seq[p] + 1 < s) else { break };
            seq[p] += 1;
            seq[..p].iter_mut().for_each(|x| *x = 0);
        }
    }
    let mut seen = BTreeSet::new();
    let mut out = Vec::new();
    for t in trees {
        let canon = perms.iter().map(|p| relabel_edges(&t, p)).min().expect("non-empty");
        if seen.insert(canon.clone()) {
            let auts = perms.iter().filter(|p| relabel_edges(&canon, p) == canon).cloned().collect();
            out.push((canon, auts));
        }
    }
    out
}

struct Component {
    edges: Vec<(usize, usize)>,
    /// (label, g) per vertex.
    vertices: Assignment,
}

/// Trees with labels in `0..k` and requirements in `0..=C6_MAX_G`, one per
/// isomorphism class.
fn component_types(k: usize) -> Vec<Component> {
    let mut out = Vec::new();
    let choices: Vec<(usize, usize)> = (0..k).flat_map(|l| (0..=C6_MAX_G).map(move |g| (l, g))).collect();
    for s in 1..=C6_FOREST_MAX_N {
        for (edges, auts) in tree_shapes(s) {
            let mut digits = vec![0usize; s];
            loop {
                let a: Assignment = digits.iter().map(|&d| choices[d]).collect();
                // keep the smallest assignment of each orbit
                let least = auts.iter().all(|p| {
                    let mut b = vec![(0, 0); s];
                    for v in 0..s {
                        b[p[v]] = a[v];
                    }
                    a <= b
                });
                if least {
                    out.push(Component { edges: edges.clone(), vertices: a });
                }
                let Some(p) = (0..s).find(|&p| digits[p] + 1 < choices.len()) else { break };
                digits[p] += 1;
                digits[..p].iter_mut().for_each(|x| *x = 0);
            }
        }
    }
    out
}

/// Every fixed forest on at most `C6_FOREST_MAX_N` vertices up to
/// isomorphism, grouped by (Σg, number of components).
struct Forests {
    all: Vec<FixedForest>,
    by_shape: HashMap<(usize, usize), Vec<u32>>,
}

fn forests(k: usize) -> Forests {
    let types = component_types(k);
    let mut f = Forests { all: Vec::new(), by_shape: HashMap::new() };
    fn rec(types: &[Component], from: usize, room: usize, picked: &mut Vec<usize>, f: &mut Forests) {
        let mut forest = FixedForest { labels: vec![], requirements: vec![], edges: vec![] };
        for &t in picked.iter() {
            let base = forest.labels.len();
            forest.edges.extend(types[t].edges.iter().map(|&(u, v)| (u + base, v + base)));
            for &(l, g) in &types[t].vertices {
                forest.labels.push(l);
                forest.requirements.push(g);
            }
        }
        let key = (forest.requirements.iter().sum(), picked.len());
        f.by_shape.entry(key).or_default().push(f.all.len() as u32);
        f.all.push(forest);
        for t in from..types.len() {
            if types[t].vertices.len() <= room {
                picked.push(t);
                rec(types, t, room - types[t].vertices.len(), picked, f);
                picked.pop();
            }
        }
    }
    rec(&types, 0, C6_FOREST_MAX_N, &mut Vec::new(), &mut f);
    f
}

fn alphas(k: usize) -> Vec<Vec<(usize, usize)>> {
    let pairs: Vec<(usize, usize)> = (0..k).flat_map(|i| (0..k).map(move |j| (i, j))).collect();
    (0u32..1 << pairs.len()).map(|mask| pairs.iter().enumerate().filter(|(b, _)| mask >> b & 1 == 1).map(|(_, &p)| p).collect()).collect()
}

struct CompatCache<'a> {
    forests: &'a Forests,
    alphas: Vec<Vec<(usize, usize)>>,
    memo: HashMap<(Pattern, usize), BTreeSet<u32>>,
    calls: u64,
}

impl CompatCache<'_> {
    /// Forests the pattern's canonical forest is α-compatible with. Only
    /// forests with Σg equal to the pattern's demand and with the number of
    /// components a spanning tree needs are handed to the oracle; every
    /// other forest fails its degree count.
    fn compatible(&mut self, p: &Pattern, alpha: usize) -> BTreeSet<u32> {
        if let Some(hit) = self.memo.get(&(p.clone(), alpha)) {
            return hit.clone();
        }
        let first = canonical_fixed_forest(p);
        let demand: usize = first.requirements.iter().sum();
        let mut out = BTreeSet::new();
        if demand + 1 >= p.len() {
            let comps = demand + 1 - p.len();
            for &id in self.forests.by_shape.get(&(demand, comps)).map_or(&[][..], Vec::as_slice) {
                let second = &self.forests.all[id as usize];
                self.calls += 1;
                let limit = first.len() + second.len();
                if alpha_compatible(&first, second, &self.alphas[alpha], limit).expect("within limit") {
                    out.insert(id);
                }
            }
        }
        self.memo.insert((p.clone(), alpha), out.clone());
        out
    }

    /// Whether {a} and `set` are compatible with the same forests under
    /// every α; returns the first α where they differ.
    fn equivalent(&mut self, a: &Pattern, set: &BTreeSet<Pattern>) -> Option<usize> {
        (0..self.alphas.len()).find(|&alpha| {
            let lhs = self.compatible(a, alpha);
            let rhs: BTreeSet<u32> = set.iter().flat_map(|b| self.compatible(b, alpha)).collect();
            lhs != rhs
        })
    }
}

fn random_pattern(rng: &mut ChaCha8Rng) -> Pattern {
    loop {
        let k = rng.gen_range(1..=C6_MAX_K);
        let len = rng.gen_range(1..=C6_MAX_VECTORS);
        let vectors = (0..len).map(|_| (0..k).map(|_| rng.gen_range(0..=C6_MAX_ENTRY)).collect()).collect();
        let p = Pattern::new(k, vectors);
        // ReduceToNice takes patterns with at most one zero vector
        if p.zeros() <= 1 {
            return p;
        }
    }
}

struct ReduceCheck {
    invocations: usize,
    not_nice: usize,
    stage2_over: usize,
    stage3_over: usize,
    idempotence_checked: usize,
    idempotence_broken: usize,
}

fn criterion6_and_7(nlc: &NlcRun) -> (Outcome, Outcome) {
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(SEED ^ 6);
    let patterns: Vec<Pattern> = (0..C6_PATTERNS).map(|_| random_pattern(&mut rng)).collect();
    let forest_sets: Vec<Forests> = (1..=C6_MAX_K).map(forests).collect();
    let mut caches: Vec<CompatCache> = forest_sets
        .iter()
        .enumerate()
        .map(|(i, f)| CompatCache { forests: f, alphas: alphas(i + 1), memo: HashMap::new(), calls: 0 })
        .collect();
    let mut rc = ReduceCheck {
        invocations: 0,
        not_nice: 0,
        stage2_over: 0,
        stage3_over: 0,
        idempotence_checked: 0,
        idempotence_broken: 0,
    };
    let mut counterexamples = Vec::new();
    let mut pi_checks = 0;
    for a in &patterns {
        let cache = &mut caches[a.k() - 1];
        for v in 0..a.len() {
            for u in 0..a.len() {
                for i in 0..a.k() {
                    if v == u || a.vectors()[v][i] == 0 || a.vectors()[u][i] == 0 {
                        continue;
                    }
                    pi_checks += 1;
                    let set: BTreeSet<Pattern> = [apply_pi(a, pi1, v, u, i), apply_pi(a, pi2, v, u, i)].into();
                    if let Some(alpha) = cache.equivalent(a, &set) {
                        counterexamples.push(format!("{a:?} vs pi at ({v},{u},{i}), alpha #{alpha}"));
                    }
                }
            }
        }
        let (reduced, stats) = reduce_to_nice(a);
        rc.invocations += 1;
        rc.not_nice += reduced.iter().filter(|p| !p.is_nice()).count();
        // the rounds are bounded by the number of vectors, itself at most n
        rc.stage2_over += usize::from(stats.stage2_rounds > a.len());
        rc.stage3_over += usize::from(stats.stage3_rounds > a.k());
        if let Some(alpha) = cache.equivalent(a, &reduced) {
            counterexamples.push(format!("{a:?} vs ReduceToNice, alpha #{alpha}"));
        }
        let nice_inputs: Vec<Pattern> = reduced.iter().cloned().chain(a.is_nice().then(|| a.clone())).collect();
        for p in nice_inputs {
            rc.idempotence_checked += 1;
            if reduce_to_nice(&p).0 != BTreeSet::from([p.clone()]) {
                rc.idempotence_broken += 1;
            }
        }
    }
    let elapsed = start.elapsed();
    let forests: usize = forest_sets.iter().map(|f| f.all.len()).sum();
    let calls: u64 = caches.iter().map(|c| c.calls).sum();
    let c6 = Outcome {
        pass: counterexamples.is_empty() && elapsed <= C6_BUDGET,
        detail: format!(
            "{} patterns, {pi_checks} pi-rule checks, {forests} forests, {calls} oracle calls, {} counterexamples{}",
            patterns.len(),
            counterexamples.len(),
            counterexamples.first().map(|c| format!("; first: {c}")).unwrap_or_default()
        ),
    };
    let c7 = Outcome {
        pass: rc.not_nice == 0
            && rc.stage2_over == 0
            && rc.stage3_over == 0
            && rc.idempotence_broken == 0
            && nlc.worst_stage2_excess <= 0
            && nlc.worst_stage3_excess <= 0,
        detail: format!(
            "{} direct calls: {} non-nice outputs, stage-2 over |A| {} times, stage-3 over k {} times; \
             {}/{} idempotence failures; engine runs: worst stage-2 minus n = {}, stage-3 minus k = {}",
            rc.invocations,
            rc.not_nice,
            rc.stage2_over,
            rc.stage3_over,
            rc.idempotence_broken,
            rc.idempotence_checked,
            nlc.worst_stage2_excess,
            nlc.worst_stage3_excess
        ),
    };
    (c6, c7)
}

fn criterion8() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(SEED ^ 8);
    let mut problems = Vec::new();
    for i in 0..C8_DECOMPOSITIONS {
        let n = rng.gen_range(2..=16);
        let k = rng.gen_range(1..=4.min(n - 1));
        let path = rng.gen_bool(0.5);
        let (g, td, _) = gen::random_partial_ktree(n, k, path, 0.6, &mut rng);
        let nice = if path { make_nice_path(&td, &g) } else { make_nice(&td, &g) };
        match nice {
            Ok(nice) if nice.width() == td.width() && nice.validate(&g).is_ok() => {}
            Ok(nice) => problems.push(format!("decomposition {i}: width {} became {}", td.width(), nice.width())),
            Err(e) => problems.push(format!("decomposition {i}: {e}")),
        }
    }
    let mut arrangements = 0;
    for n in 1..=C8_GRAPH_MAX_N {
        for g in gen::connected_graphs(n) {
            let mut orders = vec![LinearArrangement::identity(n)];
            for _ in 0..2 {
                let mut o: Vec<usize> = (0..n).collect();
                o.shuffle(&mut rng);
                orders.push(LinearArrangement::new(o));
            }
            for arr in orders {
                arrangements += 1;
                let (nice, tagged) = match arrangement_to_nice_path(&g, &arr) {
                    Ok(x) => x,
                    Err(e) => {
                        problems.push(format!("arrangement on n={n}: {e}"));
                        continue;
                    }
                };
                if nice.width() > arr.cutwidth(&g) || nice.validate(&g).is_err() || tagged.len() != n {
                    problems.push(format!("arrangement on n={n}: width {} vs cutwidth {}", nice.width(), arr.cutwidth(&g)));
                    continue;
                }
                let pos = arr.positions();
                for (i, &x) in tagged.iter().enumerate() {
                    let want: Vec<usize> =
                        (0..g.m()).filter(|&e| { let (u, v) = g.edge(e); pos[u] <= i || pos[v] <= i }).collect();
                    if nice.introduced_edges(x) != want {
                        problems.push(format!("arrangement on n={n}: edge set differs at position {}", i + 1));
                    }
                }
            }
        }
    }
    Outcome {
        pass: problems.is_empty(),
        detail: format!(
            "{C8_DECOMPOSITIONS} decompositions, {arrangements} arrangements, {} problems{}",
            problems.len(),
            problems.first().map(|p| format!("; first: {p}")).unwrap_or_default()
        ),
    }
}

fn criterion9() -> Outcome {
    let mut normalised = Vec::new();
    let mut rows = Vec::new();
    let mut slow = 0;
    let mut failed = 0;
    let mut longest = Duration::ZERO;
    for &w in &C9_WIDTHS {
        let mut logs = Vec::new();
        let mut seed = SEED ^ 9 ^ (w as u64) << 40;
        while logs.len() < C9_PER_WIDTH {
            seed += 1;
            let opts = GenOptions {
                family: Family::RandomPkt { n: C9_N, k: w, path: true },
                degrees: DegreePolicy::Specified,
                r: C9_R,
                weights: None,
                keep: 0.8,
            };
            let g = gen::generate_seeded(&opts, seed);
            let td = g.decomposition.expect("partial k-paths come with a decomposition");
            if g.instance.degrees.max_requirement() != C9_R || td.width() != w {
                continue;
            }
            let start = Instant::now();
            let res = solve(&g.instance, EngineKind::Pw, Some(&Structure::Decomposition(td)), &opts_seq(seed));
            let took = start.elapsed();
            longest = longest.max(took);
            slow += usize::from(took > C9_INSTANCE_BUDGET);
            match res {
                Ok(res) => {
                    let fam = res.stats.max_index_family as f64;
                    logs.push((fam / (2.0 * C9_R as f64).powi(w as i32)).ln());
                    rows.push(format!("pw{w}:{}", res.stats.max_index_family));
                }
                Err(_) => {
                    failed += 1;
                    logs.push(f64::NAN);
                }
            }
        }
        normalised.push((logs.iter().sum::<f64>() / logs.len() as f64).exp());
    }
    let max = normalised.iter().copied().fold(f64::MIN, f64::max);
    let min = normalised.iter().copied().fold(f64::MAX, f64::min);
    let spread = max / min;
    Outcome {
        pass: failed == 0 && slow == 0 && spread <= C9_MAX_SPREAD,
        detail: format!(
            "family/(2r)^pw geometric means {} (spread {spread:.2} <= {C9_MAX_SPREAD}); slowest instance {:.1}s; families {}",
            normalised.iter().map(|c| format!("{c:.2}")).collect::<Vec<_>>().join(", "),
            longest.as_secs_f64(),
            rows.join(" ")
        ),
    }
}

fn opts_seq(seed: u64) -> SolveOptions {
    SolveOptions { reps: C9_REPS, seed, ..SolveOptions::default() }
}

fn main() -> ExitCode {
    // `cargo test -- --list` and filters are not meaningful here
    if std::env::args().any(|a| a == "--list") {
        return ExitCode::SUCCESS;
    }
    // e.g. ACCEPTANCE_ONLY=6,7 runs a subset
    let only: Option<Vec<usize>> =
        std::env::var("ACCEPTANCE_ONLY").ok().map(|v| v.split(',').filter_map(|x| x.trim().parse().ok()).collect());
    let wanted = |ids: &[usize]| only.as_ref().map_or(true, |o| ids.iter().any(|id| o.contains(id)));
    let mut results = Vec::new();
    let mut record = |id: usize, title: &str, t: Instant, out: &Outcome| {
        report(id, title, t, out);
        results.push((id, out.pass));
    };
    let mut nlc = NlcRun::default();

    if wanted(&[1, 7]) {
        let t = Instant::now();
        let out = criterion1(&mut nlc);
        record(1, "nlc vs oracle", t, &out);
    }
    if wanted(&[2, 5]) {
        let t = Instant::now();
        let (c2, c5) = criterion2_and_5();
        record(2, "randomized engines vs oracle", t, &c2);
        record(5, "index family bounds", Instant::now(), &c5);
    }
    if wanted(&[3]) {
        let t = Instant::now();
        record(3, "cut count identity", t, &criterion3());
    }
    if wanted(&[4]) {
        let t = Instant::now();
        record(4, "fast join", t, &criterion4());
    }
    if wanted(&[6, 7]) {
        let t = Instant::now();
        let (c6, c7) = criterion6_and_7(&nlc);
        record(6, "reduction rules", t, &c6);
        record(7, "ReduceToNice structure", t, &c7);
    }
    if wanted(&[8]) {
        let t = Instant::now();
        record(8, "decomposition plumbing", t, &criterion8());
    }
    if wanted(&[9]) {
        let t = Instant::now();
        record(9, "pw scaling", t, &criterion9());
    }

    results.sort_unstable();
    let unexpected: Vec<usize> = results.iter().filter(|(id, pass)| !pass && !KNOWN_FAILURES.contains(id)).map(|r| r.0).collect();
    let passed = results.iter().filter(|r| r.1).count();
    println!("acceptance: {passed}/{} PASS", results.len());
    if unexpected.is_empty() {
        ExitCode::SUCCESS
    } else {
        println!("unexpected failures: {unexpected:?}");
        ExitCode::FAILURE
    }
}
