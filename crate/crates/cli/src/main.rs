//! `degtree`: solve, validate, convert and generate degree-constrained
//! spanning tree instances, and check the engines against the oracle.
//!
//! JSON goes to stdout, human-readable text to stderr. Exit codes: 0 when
//! the command ran, 1 for usage or parse errors, 2 for an internal
//! invariant violation (including difftest hard fails).

use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::{SystemTime, UNIX_EPOCH};

use clap::{Args, Parser, Subcommand};
use serde_json::json;

use degtree::decomp::{LinearArrangement, NlcExpression, TreeDecomposition};
use degtree::engine::{solve, EngineKind, JoinStrategy, SolveError, SolveOptions, Structure};
use degtree::gen::{self, DegreePolicy, Family, GenOptions};
use degtree::harness::{self, BenchConfig, DiffConfig};
use degtree::instance::Instance;
use degtree::io::{self, Report};
use degtree::oracle::DEFAULT_CAP;

#[derive(Parser)]
#[command(name = "degtree", version, about = "Exact solvers for degree-constrained spanning trees")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Decide an instance and report the cheapest tree weight found.
    Solve(SolveArgs),
    /// Check an instance and any structure files against it.
    Validate(InputArgs),
    /// Normalise a file, or turn an arrangement into a path decomposition.
    Convert(ConvertArgs),
    /// Generate an instance with matching structure files.
    Gen(GenArgs),
    /// Compare engines with the oracle on small instances.
    Difftest(DiffArgs),
    /// Measure table sizes and run times as CSV.
    Bench(BenchArgs),
}

#[derive(Args)]
struct InputArgs {
    /// Instance file (.dmst).
    instance: PathBuf,
    /// Tree or path decomposition (.td).
    #[arg(long)]
    decomp: Option<PathBuf>,
    /// Linear arrangement (.arr).
    #[arg(long)]
    arrangement: Option<PathBuf>,
    /// NLC expression (.nlc).
    #[arg(long)]
    nlc: Option<PathBuf>,
}

#[derive(Args)]
struct SolveArgs {
    #[command(flatten)]
    input: InputArgs,
    #[arg(long, value_parser = parse_engine)]
    engine: EngineKind,
    #[arg(long, default_value_t = 20, value_parser = clap::value_parser!(u32).range(1..))]
    reps: u32,
    /// Defaults to a value derived from the clock; always echoed.
    #[arg(long)]
    seed: Option<u64>,
    /// Use the transform-based join in the tw engine.
    #[arg(long)]
    fast_join: bool,
    /// Keep every table cell instead of dropping unreachable edge counts.
    #[arg(long)]
    no_prune: bool,
    #[arg(long)]
    sequential: bool,
}

#[derive(Args)]
struct ConvertArgs {
    #[command(flatten)]
    input: InputArgs,
    /// `td` writes the path decomposition of the arrangement; otherwise the
    /// given structure (or the instance) is written back in normal form.
    #[arg(long)]
    to: Option<String>,
    #[arg(long, short)]
    output: Option<PathBuf>,
}

#[derive(Args)]
struct GenArgs {
    /// random-pkt, random-arr, random-nlc, path, cycle, grid or star.
    family: String,
    #[arg(long)]
    n: Option<usize>,
    /// Width of a partial k-tree, or labels of an NLC expression.
    #[arg(long)]
    k: Option<usize>,
    /// Build a partial k-path instead of a partial k-tree.
    #[arg(long)]
    path: bool,
    /// Cut bound for random-arr.
    #[arg(long)]
    cut: Option<usize>,
    #[arg(long)]
    width: Option<usize>,
    #[arg(long)]
    height: Option<usize>,
    /// bounded, set, specified or mixed.
    #[arg(long, default_value = "bounded")]
    degrees: String,
    #[arg(long, default_value_t = 2)]
    r: usize,
    /// Edge weights are drawn from 1..=W.
    #[arg(long)]
    weights: Option<u64>,
    #[arg(long, default_value_t = 0.6)]
    keep: f64,
    #[arg(long)]
    seed: Option<u64>,
    /// Files are written as PREFIX.dmst, PREFIX.td, PREFIX.arr, PREFIX.nlc.
    #[arg(long, short)]
    out: PathBuf,
}

#[derive(Args)]
struct DiffArgs {
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long, default_value_t = 200)]
    cases: usize,
    #[arg(long, default_value_t = 7)]
    n_max: usize,
    /// Also test every connected graph up to this size.
    #[arg(long, default_value_t = 4)]
    exhaustive_n: usize,
    #[arg(long, value_delimiter = ',', value_parser = parse_engine, default_value = "tw,pw,ctw,nlc")]
    engines: Vec<EngineKind>,
    #[arg(long, default_value_t = 20, value_parser = clap::value_parser!(u32).range(1..))]
    reps: u32,
    #[arg(long)]
    no_weights: bool,
    #[arg(long)]
    sequential: bool,
}

#[derive(Args)]
struct BenchArgs {
    #[arg(long, default_value_t = 20)]
    n: usize,
    #[arg(long, value_delimiter = ',', default_value = "1,2,3")]
    widths: Vec<usize>,
    #[arg(long, default_value_t = 2)]
    r: usize,
    #[arg(long, value_delimiter = ',', value_parser = parse_engine, default_value = "tw,pw,ctw")]
    engines: Vec<EngineKind>,
    #[arg(long, default_value_t = 1, value_parser = clap::value_parser!(u32).range(1..))]
    reps: u32,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long, short)]
    output: Option<PathBuf>,
    #[arg(long)]
    sequential: bool,
}

enum Failure {
    Usage(String),
    Internal(String),
}

type CliResult = Result<(), Failure>;

fn usage(msg: impl Into<String>) -> Failure {
    Failure::Usage(msg.into())
}

fn parse_engine(s: &str) -> Result<EngineKind, String> {
    EngineKind::parse(s).ok_or_else(|| format!("unknown engine {s:?} (oracle, tw, pw, ctw, nlc)"))
}

fn resolve_seed(seed: Option<u64>) -> u64 {
    let seed = seed.unwrap_or_else(|| {
        let t = SystemTime::now().duration_since(UNIX_EPOCH).unwrap_or_default();
        t.as_secs() ^ u64::from(t.subsec_nanos()) << 20
    });
    eprintln!("seed: {seed}");
    seed
}

fn read(path: &Path) -> Result<String, Failure> {
    fs::read_to_string(path).map_err(|e| usage(format!("{}: {e}", path.display())))
}

fn parse_with<T, E: std::fmt::Display>(path: &Path, f: impl FnOnce(&str) -> Result<T, E>) -> Result<T, Failure> {
    f(&read(path)?).map_err(|e| usage(format!("{}:\n{e}", path.display())))
}

fn write(path: Option<&Path>, text: &str) -> CliResult {
    match path {
        Some(p) => fs::write(p, text).map_err(|e| usage(format!("{}: {e}", p.display()))),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

struct Loaded {
    instance: Instance,
    decomposition: Option<TreeDecomposition>,
    arrangement: Option<LinearArrangement>,
    expression: Option<NlcExpression>,
}

fn load(input: &InputArgs) -> Result<Loaded, Failure> {
    let parsed = parse_with(&input.instance, io::parse_instance)?;
    for w in &parsed.warnings {
        eprintln!("warning: {}: {w}", input.instance.display());
    }
    let n = parsed.instance.n();
    let decomposition = match &input.decomp {
        Some(p) => {
            let td = parse_with(p, io::parse_td)?;
            if td.n != n {
                return Err(usage(format!("{}: declares {} vertices, instance has {n}", p.display(), td.n)));
            }
            Some(td.decomposition)
        }
        None => None,
    };
    let arrangement = input.arrangement.as_deref().map(|p| parse_with(p, io::parse_arr)).transpose()?;
    let expression = input.nlc.as_deref().map(|p| parse_with(p, io::parse_nlc)).transpose()?;
    Ok(Loaded { instance: parsed.instance, decomposition, arrangement, expression })
}

fn cmd_solve(args: SolveArgs) -> CliResult {
    let loaded = load(&args.input)?;
    let structure = match args.engine {
        EngineKind::Oracle => None,
        EngineKind::Tw => loaded.decomposition.map(Structure::Decomposition),
        EngineKind::Pw => loaded
            .decomposition
            .map(Structure::Decomposition)
            .or(loaded.arrangement.map(Structure::Arrangement)),
        EngineKind::Ctw => loaded.arrangement.map(Structure::Arrangement),
        EngineKind::Nlc => loaded.expression.map(Structure::Expression),
    };
    let needed = match args.engine {
        EngineKind::Tw | EngineKind::Pw => "--decomp",
        EngineKind::Ctw => "--arrangement",
        EngineKind::Nlc => "--nlc",
        EngineKind::Oracle => "",
    };
    if args.engine != EngineKind::Oracle && structure.is_none() {
        return Err(usage(format!("engine {} needs {needed}", args.engine.name())));
    }
    let seed = resolve_seed(args.seed);
    let opts = SolveOptions {
        reps: args.reps,
        seed,
        parallel: !args.sequential,
        join: if args.fast_join { JoinStrategy::Fast } else { JoinStrategy::Naive },
        prune: !args.no_prune,
        ..SolveOptions::default()
    };
    let result = solve(&loaded.instance, args.engine, structure.as_ref(), &opts).map_err(|e| match e {
        SolveError::Invariant(_) => Failure::Internal(e.to_string()),
        e => usage(e.to_string()),
    })?;
    let mut report = Report::new(&result);
    let i = &args.input;
    report.files = [Some(&i.instance), i.decomp.as_ref(), i.arrangement.as_ref(), i.nlc.as_ref()]
        .into_iter()
        .flatten()
        .map(|p| p.display().to_string())
        .collect();
    eprintln!(
        "{}: {}{}",
        args.engine.name(),
        report.answer,
        report.min_cost.map(|c| format!(" (min cost {c})")).unwrap_or_default()
    );
    println!("{}", report.to_json());
    Ok(())
}

fn cmd_validate(args: InputArgs) -> CliResult {
    let loaded = load(&args)?;
    let g = &loaded.instance.graph;
    let mut problems: Vec<String> = loaded.instance.validate().iter().map(ToString::to_string).collect();
    let mut out = json!({});
    if let Some(td) = &loaded.decomposition {
        match td.validate(g) {
            Ok(()) => out["width"] = json!(td.width()),
            Err(e) => problems.push(format!("decomposition: {e}")),
        }
    }
    if let Some(arr) = &loaded.arrangement {
        match arr.validate(g.n()) {
            Ok(()) => out["cutwidth"] = json!(arr.cutwidth(g)),
            Err(e) => problems.push(format!("arrangement: {e}")),
        }
    }
    if let Some(expr) = &loaded.expression {
        match expr.check_against(g) {
            Ok(()) => out["k"] = json!(expr.k),
            Err(e) => problems.push(format!("expression: {e}")),
        }
    }
    for p in &problems {
        eprintln!("{p}");
    }
    out["valid"] = json!(problems.is_empty());
    out["violations"] = json!(problems);
    println!("{out}");
    Ok(())
}

fn cmd_convert(args: ConvertArgs) -> CliResult {
    let loaded = load(&args.input)?;
    let n = loaded.instance.n();
    let text = match (args.to.as_deref(), &loaded.arrangement) {
        (Some("td"), Some(arr)) => {
            arr.validate(n).map_err(|e| usage(e.to_string()))?;
            io::write_td(&arr.path_decomposition(&loaded.instance.graph), n)
        }
        (Some("td"), None) => return Err(usage("--to td needs --arrangement")),
        (Some(other), _) => return Err(usage(format!("unknown target {other:?}; only `td` is supported"))),
        (None, _) => {
            if let Some(td) = &loaded.decomposition {
                io::write_td(td, n)
            } else if let Some(arr) = &loaded.arrangement {
                io::write_arr(arr)
            } else if let Some(expr) = &loaded.expression {
                io::write_nlc(expr)
            } else {
                io::write_instance(&loaded.instance)
            }
        }
    };
    write(args.output.as_deref(), &text)
}

fn cmd_gen(args: GenArgs) -> CliResult {
    let need = |x: Option<usize>, flag: &str| x.ok_or_else(|| usage(format!("{} needs --{flag}", args.family)));
    let unused = |flags: &[(&str, bool)]| match flags.iter().find(|(_, set)| *set) {
        Some((flag, _)) => Err(usage(format!("--{flag} does not apply to {}", args.family))),
        None => Ok(()),
    };
    let family = match args.family.as_str() {
        "random-pkt" => {
            unused(&[("cut", args.cut.is_some()), ("width", args.width.is_some()), ("height", args.height.is_some())])?;
            Family::RandomPkt { n: need(args.n, "n")?, k: need(args.k, "k")?, path: args.path }
        }
        "random-arr" => {
            unused(&[("k", args.k.is_some()), ("path", args.path), ("width", args.width.is_some())])?;
            Family::RandomArr { n: need(args.n, "n")?, cut: need(args.cut, "cut")? }
        }
        "random-nlc" => {
            unused(&[("cut", args.cut.is_some()), ("path", args.path), ("width", args.width.is_some())])?;
            if args.weights.is_some() {
                return Err(usage("random-nlc instances are unweighted; drop --weights"));
            }
            Family::RandomNlc { leaves: need(args.n, "n")?, k: need(args.k, "k")? }
        }
        "grid" => {
            unused(&[("n", args.n.is_some()), ("k", args.k.is_some()), ("cut", args.cut.is_some())])?;
            Family::Grid { width: need(args.width, "width")?, height: need(args.height, "height")? }
        }
        simple @ ("path" | "cycle" | "star") => {
            unused(&[("k", args.k.is_some()), ("cut", args.cut.is_some()), ("width", args.width.is_some())])?;
            let n = need(args.n, "n")?;
            match simple {
                "path" => Family::Path { n },
                "cycle" => Family::Cycle { n },
                _ => Family::Star { n },
            }
        }
        other => return Err(usage(format!("unknown family {other:?}"))),
    };
    if matches!(family, Family::RandomPkt { n: 0, .. } | Family::RandomArr { n: 0, .. } | Family::RandomNlc { leaves: 0, .. }) {
        return Err(usage("instances need at least one vertex"));
    }
    let degrees = DegreePolicy::parse(&args.degrees).ok_or_else(|| usage(format!("unknown degree policy {:?}", args.degrees)))?;
    if args.r == 0 {
        return Err(usage("--r must be at least 1"));
    }
    if !(0.0..=1.0).contains(&args.keep) {
        return Err(usage("--keep must lie in [0, 1]"));
    }
    let seed = resolve_seed(args.seed);
    let opts = GenOptions { family, degrees, r: args.r, weights: args.weights, keep: args.keep };
    let g = gen::generate_seeded(&opts, seed);
    let n = g.instance.n();
    let mut files = Vec::new();
    let mut emit = |ext: &str, text: String| -> CliResult {
        let mut p = args.out.clone().into_os_string();
        p.push(format!(".{ext}"));
        let p = PathBuf::from(p);
        write(Some(&p), &text)?;
        files.push(p.display().to_string());
        Ok(())
    };
    emit("dmst", io::write_instance(&g.instance))?;
    if let Some(td) = &g.decomposition {
        emit("td", io::write_td(td, n))?;
    }
    if let Some(arr) = &g.arrangement {
        emit("arr", io::write_arr(arr))?;
    }
    if let Some(expr) = &g.expression {
        emit("nlc", io::write_nlc(expr))?;
    }
    let mut out = json!({ "seed": seed, "files": files, "n": n, "m": g.instance.graph.m() });
    if let Some(td) = &g.decomposition {
        out["width"] = json!(td.width());
    }
    if let Some(arr) = &g.arrangement {
        out["cutwidth"] = json!(arr.cutwidth(&g.instance.graph));
    }
    if let Some(expr) = &g.expression {
        out["k"] = json!(expr.k);
    }
    println!("{out}");
    Ok(())
}

fn cmd_difftest(args: DiffArgs) -> CliResult {
    if args.n_max > DEFAULT_CAP || args.n_max < 2 {
        return Err(usage(format!("--n-max must lie in 2..={DEFAULT_CAP}")));
    }
    if args.exhaustive_n > 6 {
        return Err(usage("--exhaustive-n is limited to 6"));
    }
    let seed = resolve_seed(args.seed);
    let cfg = DiffConfig {
        seed,
        cases: args.cases,
        n_max: args.n_max,
        exhaustive_n: args.exhaustive_n,
        engines: args.engines,
        reps: args.reps,
        weights: !args.no_weights,
        parallel: !args.sequential,
    };
    let summary = harness::difftest(&cfg);
    let hard: Vec<_> = summary.hard_fails().collect();
    let false_negatives = summary.false_negatives().count();
    for rec in hard.iter().copied().chain(summary.false_negatives()) {
        eprintln!("{}", summary.describe(rec));
    }
    let out = json!({
        "seed": seed,
        "cases": summary.cases.len(),
        "runs": summary.records.len(),
        "hard_fails": hard.len(),
        "false_negatives": false_negatives,
        "skipped": summary.skipped(),
        "failures": hard.iter().map(|r| json!({
            "case": summary.cases[r.case].id,
            "case_seed": summary.cases[r.case].seed,
            "engine": r.engine.name(),
            "detail": format!("{:?}", r.verdict),
        })).collect::<Vec<_>>(),
    });
    println!("{out}");
    eprintln!(
        "{} runs over {} cases: {} hard fails, {false_negatives} false negatives, {} skipped",
        summary.records.len(),
        summary.cases.len(),
        hard.len(),
        summary.skipped()
    );
    if hard.is_empty() {
        Ok(())
    } else {
        Err(Failure::Internal(format!("{} hard fails", hard.len())))
    }
}

fn cmd_bench(args: BenchArgs) -> CliResult {
    if args.n < 2 {
        return Err(usage("--n must be at least 2"));
    }
    let seed = resolve_seed(args.seed);
    let cfg = BenchConfig {
        seed,
        n: args.n,
        widths: args.widths,
        r: args.r.max(1),
        engines: args.engines,
        reps: args.reps,
        parallel: !args.sequential,
    };
    let rows = harness::bench(&cfg).map_err(|e| match e {
        SolveError::Invariant(_) => Failure::Internal(e.to_string()),
        e => usage(e.to_string()),
    })?;
    let mut w = csv::Writer::from_writer(Vec::new());
    for row in &rows {
        w.serialize(row).map_err(|e| Failure::Internal(e.to_string()))?;
    }
    let bytes = w.into_inner().map_err(|e| Failure::Internal(e.to_string()))?;
    write(args.output.as_deref(), &String::from_utf8_lossy(&bytes))
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 1 } else { 0 });
        }
    };
    let result = match cli.command {
        Command::Solve(a) => cmd_solve(a),
        Command::Validate(a) => cmd_validate(a),
        Command::Convert(a) => cmd_convert(a),
        Command::Gen(a) => cmd_gen(a),
        Command::Difftest(a) => cmd_difftest(a),
        Command::Bench(a) => cmd_bench(a),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Usage(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(1)
        }
        Err(Failure::Internal(msg)) => {
            eprintln!("internal error: {msg}");
            ExitCode::from(2)
        }
    }
}
