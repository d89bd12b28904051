use std::fs::File;
use std::io::BufWriter;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use irls_core::bench::{
    run_bench, run_instance, threads_from_env, write_records, write_trace, BenchConfig, Mode,
    RunSpec, Suite,
};
use irls_core::instances::{
    incidence_matrix, parse_demand, parse_edges, random_orthogonal_instance, read_instance,
    write_instance, DirectedGraph, RegressionInstance,
};
use irls_core::{Error, Norm, StepMode};

#[derive(Parser)]
#[command(name = "irls", version, about = "Thresholded IRLS for l-infinity and l1 regression")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Solve one instance and print its run record
    Solve(SolveArgs),
    /// Run a benchmark grid and write one record per point
    Bench(BenchArgs),
    /// Write an instance file
    Gen(GenArgs),
}

#[derive(Clone, Copy, ValueEnum)]
enum NormArg {
    Linf,
    L1,
}

impl From<NormArg> for Norm {
    fn from(n: NormArg) -> Self {
        match n {
            NormArg::Linf => Norm::Linf,
            NormArg::L1 => Norm::L1,
        }
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum ModeArg {
    Decide,
    Optimize,
}

#[derive(Clone, Copy, ValueEnum)]
enum StepArg {
    Short,
    Long,
}

impl From<StepArg> for StepMode {
    fn from(s: StepArg) -> Self {
        match s {
            StepArg::Short => StepMode::Short,
            StepArg::Long => StepMode::Long,
        }
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum StepsArg {
    Short,
    Long,
    Both,
}

#[derive(Clone, Copy, ValueEnum)]
enum SuiteArg {
    Eps,
    M,
}

#[derive(Clone, Copy, ValueEnum)]
enum GraphArg {
    /// Directed path 1 -> 2 -> ... -> n
    Path,
    /// Edges read from --edges
    Edges,
}

#[derive(Args)]
struct SolveArgs {
    #[arg(long, value_enum)]
    norm: NormArg,
    #[arg(long, value_enum)]
    mode: ModeArg,
    #[arg(long)]
    eps: f64,
    /// Decision target M (decide mode only)
    #[arg(long)]
    target: Option<f64>,
    #[arg(long, value_enum, default_value = "short")]
    step: StepArg,
    /// Warm-started phase schedule
    #[arg(long)]
    phases: bool,
    #[arg(long)]
    instance: PathBuf,
    /// Per-iteration trace CSV (plain decide mode)
    #[arg(long)]
    trace: Option<PathBuf>,
}

#[derive(Args)]
struct BenchArgs {
    #[arg(long, value_enum)]
    suite: SuiteArg,
    #[arg(long, value_enum)]
    norm: NormArg,
    #[arg(long, value_enum, default_value = "short")]
    step: StepsArg,
    #[arg(long, default_value_t = 150)]
    n: usize,
    #[arg(long, default_value_t = 200)]
    m: usize,
    #[arg(long, default_value_t = 15)]
    sparsity: usize,
    #[arg(long, default_value_t = 1)]
    seed: u64,
    /// Keep only grid points k = 1..=max_k
    #[arg(long)]
    max_k: Option<usize>,
    #[arg(long)]
    phases: bool,
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args)]
struct GenArgs {
    #[arg(long, conflicts_with = "graph", required_unless_present = "graph")]
    n: Option<usize>,
    #[arg(long, conflicts_with = "graph", required_unless_present = "graph")]
    m: Option<usize>,
    #[arg(long, conflicts_with = "graph", required_unless_present = "graph")]
    sparsity: Option<usize>,
    #[arg(long, default_value_t = 1)]
    seed: u64,
    #[arg(long, value_enum)]
    graph: Option<GraphArg>,
    #[arg(long, requires = "graph")]
    n_vertices: Option<usize>,
    /// Edge list, one 1-based `tail head` pair per line
    #[arg(long, requires = "graph")]
    edges: Option<PathBuf>,
    /// Demands, one 1-based `vertex value` pair per line
    #[arg(long, requires = "graph")]
    demand: Option<PathBuf>,
    #[arg(long)]
    out: PathBuf,
}

enum Failure {
    /// Bad flags or unreadable input.
    Usage(String),
    /// The solver or output stage failed.
    Solver(String),
}

impl Failure {
    fn input(what: &str, e: Error) -> Self {
        Failure::Usage(format!("{what}: {e}"))
    }

    fn solver(e: Error) -> Self {
        Failure::Solver(e.to_string())
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() {
                ExitCode::from(2)
            } else {
                ExitCode::SUCCESS
            };
        }
    };
    let res = match cli.command {
        Command::Solve(a) => solve(a),
        Command::Bench(a) => bench(a),
        Command::Gen(a) => gen(a),
    };
    match res {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Usage(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
        Err(Failure::Solver(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(3)
        }
    }
}

fn check_eps(eps: f64) -> Result<(), Failure> {
    if eps > 0.0 && eps <= 0.5 {
        Ok(())
    } else {
        Err(Failure::Usage(format!("--eps must lie in (0, 0.5], got {eps}")))
    }
}

fn create(path: &PathBuf) -> Result<BufWriter<File>, Failure> {
    File::create(path)
        .map(BufWriter::new)
        .map_err(|e| Failure::Solver(format!("{}: {e}", path.display())))
}

fn solve(args: SolveArgs) -> Result<(), Failure> {
    check_eps(args.eps)?;
    let mode = match args.mode {
        ModeArg::Decide => Mode::Decide,
        ModeArg::Optimize => Mode::Optimize,
    };
    match (mode, args.target) {
        (Mode::Decide, None) => {
            return Err(Failure::Usage("--target is required in decide mode".into()))
        }
        (Mode::Decide, Some(t)) if !(t > 0.0 && t.is_finite()) => {
            return Err(Failure::Usage(format!("--target must be positive, got {t}")))
        }
        (Mode::Optimize, Some(_)) => {
            return Err(Failure::Usage("--target only applies to decide mode".into()))
        }
        _ => {}
    }
    if args.trace.is_some() && (mode == Mode::Optimize || args.phases) {
        return Err(Failure::Usage(
            "--trace is only available for plain decide runs".into(),
        ));
    }
    let inst = read_instance(&args.instance)
        .map_err(|e| Failure::input(&args.instance.display().to_string(), e))?;
    let spec = RunSpec {
        norm: args.norm.into(),
        mode,
        step: args.step.into(),
        eps: args.eps,
        target: args.target,
        phases: args.phases,
    };
    let out = run_instance(&inst, &spec).map_err(Failure::solver)?;
    let fields = out.record.csv_fields();
    println!("{}", fields.join(","));
    if let (Some(path), Some(trace)) = (&args.trace, &out.trace) {
        write_trace(create(path)?, trace).map_err(Failure::solver)?;
    }
    Ok(())
}

fn bench(args: BenchArgs) -> Result<(), Failure> {
    let steps = match args.step {
        StepsArg::Short => vec![StepMode::Short],
        StepsArg::Long => vec![StepMode::Long],
        StepsArg::Both => vec![StepMode::Short, StepMode::Long],
    };
    if args.n == 0 || args.n > args.m || args.sparsity == 0 || args.sparsity > args.m {
        return Err(Failure::Usage(
            "need 1 <= n <= m and 1 <= sparsity <= m".into(),
        ));
    }
    if args.max_k == Some(0) {
        return Err(Failure::Usage("--max-k must be positive".into()));
    }
    let cfg = BenchConfig {
        suite: match args.suite {
            SuiteArg::Eps => Suite::Eps,
            SuiteArg::M => Suite::Columns,
        },
        norm: args.norm.into(),
        steps,
        n: args.n,
        m: args.m,
        sparsity: args.sparsity,
        seed: args.seed,
        max_k: args.max_k,
        phases: args.phases,
        threads: threads_from_env(),
    };
    let records = run_bench(&cfg).map_err(Failure::solver)?;
    write_records(create(&args.out)?, &records).map_err(Failure::solver)?;
    Ok(())
}

fn read_text(path: &PathBuf) -> Result<String, Failure> {
    std::fs::read_to_string(path).map_err(|e| Failure::Usage(format!("{}: {e}", path.display())))
}

fn gen(args: GenArgs) -> Result<(), Failure> {
    let inst = match args.graph {
        None => {
            let (n, m, k) = (
                args.n.unwrap_or_default(),
                args.m.unwrap_or_default(),
                args.sparsity.unwrap_or_default(),
            );
            random_orthogonal_instance(n, m, k, args.seed)
                .map_err(|e| Failure::input("generator", e))?
        }
        Some(kind) => graph_instance(kind, &args)?,
    };
    write_instance(&args.out, &inst).map_err(Failure::solver)?;
    Ok(())
}

fn graph_instance(kind: GraphArg, args: &GenArgs) -> Result<RegressionInstance, Failure> {
    let nv = args
        .n_vertices
        .ok_or_else(|| Failure::Usage("--n-vertices is required in graph mode".into()))?;
    if nv < 2 {
        return Err(Failure::Usage("--n-vertices must be at least 2".into()));
    }
    let graph = match kind {
        GraphArg::Path => {
            if args.edges.is_some() {
                return Err(Failure::Usage("--edges only applies to --graph edges".into()));
            }
            DirectedGraph::new(nv, (0..nv - 1).map(|v| (v, v + 1)).collect())
                .map_err(|e| Failure::input("graph", e))?
        }
        GraphArg::Edges => {
            let path = args
                .edges
                .as_ref()
                .ok_or_else(|| Failure::Usage("--graph edges needs --edges".into()))?;
            parse_edges(&read_text(path)?, nv)
                .map_err(|e| Failure::input(&path.display().to_string(), e))?
        }
    };
    let b = match &args.demand {
        Some(path) => parse_demand(&read_text(path)?, nv)
            .map_err(|e| Failure::input(&path.display().to_string(), e))?,
        None if matches!(kind, GraphArg::Path) => {
            let mut b = vec![0.0; nv];
            b[0] = 1.0;
            b[nv - 1] = -1.0;
            b
        }
        None => return Err(Failure::Usage("--graph edges needs --demand".into())),
    };
    let a = incidence_matrix(&graph).map_err(|e| Failure::input("graph", e))?;
    RegressionInstance::new(a, b, None).map_err(|e| Failure::input("demand", e))
}
