use std::fs;
use std::io::{self, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Duration;

use bandcolor::bench::{format_summary, read_suite, run_suite, summarize, BenchConfig};
use bandcolor::cost::parse_ratio;
use bandcolor::driver::{minimize_k, run_experiment, solve_k, ExperimentMode, SolveParams, SolveStatus};
use bandcolor::eval::{evaluate_direct, Coloring};
use bandcolor::gen::{geometric_bcp, random_bcp, random_bmcp, GeometricParams};
use bandcolor::instance::{BmcpInstance, VertexMap, DEFAULT_MAX_SPLIT_VERTICES};
use bandcolor::io::{
    parse_solution, read_instance, write_bmcp_instance, write_instance, write_records_csv, write_records_jsonl,
    write_solution, InstanceKind, ParseOptions, Parsed,
};
use bandcolor::oracle::{exact_feasible, exact_min_k, OracleLimits};
use bandcolor::rng::rng_from_seed;
use bandcolor::{Instance, RelinkStrategy, Ratio, TsParams};
use clap::{Args, Parser, Subcommand};

#[derive(Parser)]
#[command(name = "bandcolor", version, about = "Bandwidth coloring and multicoloring by path relinking")]
struct Cli {
    #[command(flatten)]
    global: Global,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct Global {
    /// Root seed.
    #[arg(long, global = true, default_value_t = 1)]
    seed: u64,
    /// Seconds per color budget.
    #[arg(long, global = true, default_value_t = 60.0)]
    time_limit: f64,
    /// Stop after this many processed pairs.
    #[arg(long, global = true)]
    max_generations: Option<u64>,
    /// Population size.
    #[arg(long, global = true, default_value_t = 20)]
    p: usize,
    /// Local search depth.
    #[arg(long, global = true, default_value_t = 10_000)]
    alpha: u64,
    /// Relinking distance ratio, as a decimal or p/q.
    #[arg(long, global = true, default_value = "0.35", value_parser = parse_ratio)]
    xi: Ratio<u32>,
    /// pr1 (random) or pr2 (greedy).
    #[arg(long, global = true, default_value = "pr1")]
    strategy: RelinkStrategy,
    #[arg(long, global = true, default_value_t = 0)]
    tenure_base: u64,
    /// Tenure factor on the objective, as a decimal or p/q.
    #[arg(long, global = true, default_value = "0.6", value_parser = parse_ratio)]
    tenure_coeff: Ratio<u32>,
    /// Instance format: bcp or bmcp.
    #[arg(long, global = true, default_value = "bcp")]
    kind: InstanceKind,
    /// Reject unknown line types.
    #[arg(long, global = true)]
    strict: bool,
    /// Read demands from a block of bare integers after the header.
    #[arg(long, global = true)]
    demand_block: bool,
}

impl Global {
    fn params(&self) -> Result<SolveParams, Failure> {
        if self.p < 2 {
            return Err(Failure::Usage("--p must be at least 2".into()));
        }
        let time_limit = Duration::try_from_secs_f64(self.time_limit)
            .ok()
            .filter(|d| !d.is_zero())
            .ok_or_else(|| Failure::Usage("--time-limit must be a positive number of seconds".into()))?;
        if *self.xi.numer() * 2 > *self.xi.denom() {
            return Err(Failure::Usage("--xi must lie in [0, 0.5]".into()));
        }
        Ok(SolveParams {
            p: self.p,
            ts: TsParams {
                alpha: self.alpha,
                tenure_base: self.tenure_base,
                tenure_coeff: self.tenure_coeff,
                ..TsParams::default()
            },
            xi: self.xi,
            strategy: self.strategy,
            time_limit: Some(time_limit),
            max_generations: self.max_generations,
            seed: self.seed,
        })
    }

    fn parse_options(&self) -> ParseOptions {
        ParseOptions { strict: self.strict, demand_block: self.demand_block }
    }
}

#[derive(Subcommand)]
enum Command {
    /// Search for a legal coloring with a fixed number of colors.
    Solve {
        file: PathBuf,
        #[arg(long)]
        k: u32,
        /// Solution file (default: input with extension .sol).
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// Lower the number of colors until a budget fails.
    Minimize {
        file: PathBuf,
        /// First budget to try (default: one below a greedy coloring).
        #[arg(long)]
        k_start: Option<u32>,
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// Turn a multicoloring instance into the equivalent single-coloring one.
    Convert {
        file: PathBuf,
        #[arg(short, long)]
        output: PathBuf,
    },
    /// Evaluate a solution file.
    Check {
        file: PathBuf,
        solution: PathBuf,
        #[arg(long)]
        k: u32,
    },
    /// Exact search on tiny instances.
    Oracle {
        file: PathBuf,
        /// Decide this budget instead of finding the minimum.
        #[arg(long)]
        k: Option<u32>,
        #[arg(long, default_value_t = 50_000_000)]
        max_nodes: u64,
    },
    /// Seeded repeated runs over a suite file.
    Bench {
        suite: PathBuf,
        /// Results table (CSV); stdout when absent.
        #[arg(short, long)]
        output: Option<PathBuf>,
        /// Also write the records as JSON lines.
        #[arg(long)]
        jsonl: Option<PathBuf>,
        /// Worker threads (0: one per core).
        #[arg(long, default_value_t = 0)]
        jobs: usize,
        /// Leave run times empty so tables are reproducible.
        #[arg(long)]
        omit_timing: bool,
        /// Print the planned runs without solving.
        #[arg(long)]
        dry_run: bool,
    },
    /// Comparison runs: ts_vs_sd, pr1_vs_pr2 or alpha_sweep.
    Experiment {
        mode: ExperimentMode,
        file: PathBuf,
        #[arg(long)]
        k: u32,
        #[arg(long, default_value_t = 5)]
        reps: u32,
        /// Trace CSV; stdout when absent.
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// Write a random instance.
    Generate {
        #[arg(long)]
        n: usize,
        /// Random geometric graph instead of uniform density.
        #[arg(long)]
        geometric: bool,
        #[arg(long, default_value_t = 0.3)]
        density: f64,
        #[arg(long, default_value_t = 4)]
        max_d: i32,
        /// Largest demand; writes a multicoloring instance when above 1.
        #[arg(long, default_value_t = 1)]
        max_demand: u32,
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
}

enum Failure {
    Usage(String),
    Unsolved(String),
    Internal(String),
}

impl Failure {
    fn io(path: &Path, e: io::Error) -> Self {
        Failure::Internal(format!("{}: {e}", path.display()))
    }
}

/// Instance as the solver sees it.
struct Loaded {
    graph: Instance,
    split: Option<(BmcpInstance<i32>, VertexMap)>,
}

fn load(g: &Global, path: &Path) -> Result<Loaded, Failure> {
    let parsed = read_instance::<i32>(path, g.kind, g.parse_options()).map_err(|e| Failure::Usage(e.to_string()))?;
    for w in &parsed.warnings {
        eprintln!("warning: {}: {w}", path.display());
    }
    match parsed.instance {
        Parsed::Bcp(graph) => Ok(Loaded { graph, split: None }),
        Parsed::Bmcp(m) => {
            let (graph, map) = m.to_bcp(DEFAULT_MAX_SPLIT_VERTICES).map_err(|e| Failure::Usage(e.to_string()))?;
            Ok(Loaded { graph, split: Some((m, map)) })
        }
    }
}

/// Re-verifies a claimed legal coloring before it is reported.
fn verify(inst: &Loaded, c: &Coloring) -> Result<(), Failure> {
    let f = evaluate_direct(&inst.graph, c).map_err(|e| Failure::Internal(e.to_string()))?;
    if f != 0 {
        return Err(Failure::Internal(format!("reported legal coloring has f={f}")));
    }
    if let Some((m, map)) = &inst.split {
        m.check(&map.map_back(c)).map_err(|e| Failure::Internal(e.to_string()))?;
    }
    Ok(())
}

fn write_file(path: &Path, text: &str) -> Result<(), Failure> {
    fs::write(path, text).map_err(|e| Failure::io(path, e))
}

fn run(cli: Cli) -> Result<(), Failure> {
    let g = &cli.global;
    match cli.command {
        Command::Solve { file, k, output } => {
            let inst = load(g, &file)?;
            let out = solve_k(&inst.graph, k, &g.params()?).map_err(|e| Failure::Usage(e.to_string()))?;
            println!(
                "status={} k={k} f={} generations={} ts_calls={} ts_iterations={} elapsed_s={:.3}",
                out.status,
                out.best_f,
                out.generations,
                out.ts_calls,
                out.ts_iterations,
                out.elapsed.as_secs_f64()
            );
            if out.status != SolveStatus::LegalFound {
                return Err(Failure::Unsolved(format!("no legal coloring with k={k} (best f={})", out.best_f)));
            }
            verify(&inst, &out.best_coloring)?;
            let path = output.unwrap_or_else(|| file.with_extension("sol"));
            write_file(&path, &write_solution(&out.best_coloring))?;
            println!("solution written to {}", path.display());
            Ok(())
        }
        Command::Minimize { file, k_start, output } => {
            let inst = load(g, &file)?;
            let out = minimize_k(&inst.graph, &g.params()?, k_start).map_err(|e| Failure::Usage(e.to_string()))?;
            println!("start k={} lower bound={}", out.start_k, out.lower_bound);
            for a in &out.attempts {
                println!(
                    "k={} status={} f={} generations={} elapsed_s={:.3}",
                    a.k,
                    a.outcome.status,
                    a.outcome.best_f,
                    a.outcome.generations,
                    a.outcome.elapsed.as_secs_f64()
                );
            }
            let Some((k, coloring)) = out.best else {
                return Err(Failure::Unsolved("no legal coloring found".into()));
            };
            verify(&inst, &coloring)?;
            println!("best k={k}");
            let path = output.unwrap_or_else(|| file.with_extension("sol"));
            write_file(&path, &write_solution(&coloring))?;
            println!("solution written to {}", path.display());
            Ok(())
        }
        Command::Convert { file, output } => {
            let parsed = read_instance::<i32>(&file, InstanceKind::Bmcp, g.parse_options())
                .map_err(|e| Failure::Usage(e.to_string()))?;
            for w in &parsed.warnings {
                eprintln!("warning: {}: {w}", file.display());
            }
            let Parsed::Bmcp(m) = parsed.instance else { unreachable!("parsed as multicoloring") };
            let (graph, _) = m.to_bcp(DEFAULT_MAX_SPLIT_VERTICES).map_err(|e| Failure::Usage(e.to_string()))?;
            write_file(&output, &write_instance(&graph))?;
            println!("{} vertices, {} edges", graph.n(), graph.num_edges());
            Ok(())
        }
        Command::Check { file, solution, k } => {
            let inst = load(g, &file)?;
            let text = fs::read_to_string(&solution).map_err(|e| Failure::Usage(format!("{}: {e}", solution.display())))?;
            let colors = parse_solution(&text).map_err(|e| Failure::Usage(format!("{}: {e}", solution.display())))?;
            let coloring = Coloring::new(colors, k).map_err(|e| Failure::Usage(e.to_string()))?;
            let f = evaluate_direct(&inst.graph, &coloring).map_err(|e| Failure::Usage(e.to_string()))?;
            println!("f={f}");
            if f > 0 {
                return Err(Failure::Unsolved(format!("{f} units of separation violated")));
            }
            if let Some((m, map)) = &inst.split {
                m.check(&map.map_back(&coloring)).map_err(|e| Failure::Unsolved(e.to_string()))?;
            }
            Ok(())
        }
        Command::Oracle { file, k, max_nodes } => {
            let inst = load(g, &file)?;
            let limits = OracleLimits { max_nodes, ..OracleLimits::default() };
            match k {
                Some(k) => match exact_feasible(&inst.graph, k, &limits) {
                    Ok(Some(c)) => {
                        println!("feasible k={k}");
                        print!("{}", write_solution(&c));
                        Ok(())
                    }
                    Ok(None) => {
                        println!("infeasible k={k}");
                        Err(Failure::Unsolved(format!("no legal coloring with k={k}")))
                    }
                    Err(e) => Err(Failure::Unsolved(e.to_string())),
                },
                None => {
                    let (k, c) = exact_min_k(&inst.graph, &limits).map_err(|e| Failure::Unsolved(e.to_string()))?;
                    println!("min k={k}");
                    print!("{}", write_solution(&c));
                    Ok(())
                }
            }
        }
        Command::Bench { suite, output, jsonl, jobs, omit_timing, dry_run } => {
            let entries = read_suite(&suite).map_err(|e| Failure::Usage(e.to_string()))?;
            let params = g.params()?;
            if dry_run {
                for (i, e) in entries.iter().enumerate() {
                    let limit = e.time_limit.or(params.time_limit).map_or(0.0, |d| d.as_secs_f64());
                    println!(
                        "entry={i} instance={} path={} kind={} k={} reps={} time_limit_s={limit}",
                        e.name(),
                        e.path.display(),
                        e.kind,
                        e.k,
                        e.repetitions
                    );
                }
                return Ok(());
            }
            let config = BenchConfig { params, jobs, parse: g.parse_options(), omit_timing };
            let records = run_suite::<i32>(&entries, &config).map_err(|e| Failure::Usage(e.to_string()))?;
            let mut table = Vec::new();
            write_records_csv(&records, &mut table).map_err(|e| Failure::Internal(e.to_string()))?;
            match &output {
                Some(path) => fs::write(path, &table).map_err(|e| Failure::io(path, e))?,
                None => io::stdout().write_all(&table).map_err(|e| Failure::Internal(e.to_string()))?,
            }
            if let Some(path) = &jsonl {
                let mut buf = Vec::new();
                write_records_jsonl(&records, &mut buf).map_err(|e| Failure::io(path, e))?;
                fs::write(path, buf).map_err(|e| Failure::io(path, e))?;
            }
            eprint!("{}", format_summary(&summarize(&records)));
            Ok(())
        }
        Command::Experiment { mode, file, k, reps, output } => {
            let inst = load(g, &file)?;
            let res = run_experiment(mode, &inst.graph, k, &g.params()?, reps).map_err(|e| Failure::Usage(e.to_string()))?;
            let mut buf = Vec::new();
            res.write_csv(&mut buf).map_err(|e| Failure::Internal(e.to_string()))?;
            match &output {
                Some(path) => fs::write(path, &buf).map_err(|e| Failure::io(path, e))?,
                None => io::stdout().write_all(&buf).map_err(|e| Failure::Internal(e.to_string()))?,
            }
            for s in &res.series {
                eprintln!("{} seed={} status={} best_f={} elapsed_s={:.3}", s.tag, s.seed, s.status, s.best_f, s.elapsed.as_secs_f64());
            }
            Ok(())
        }
        Command::Generate { n, geometric, density, max_d, max_demand, output } => {
            if n == 0 || !(0.0..=1.0).contains(&density) || max_d < 1 || max_demand < 1 {
                return Err(Failure::Usage("need n >= 1, density in [0, 1], max-d >= 1, max-demand >= 1".into()));
            }
            let mut rng = rng_from_seed(g.seed);
            let graph = if geometric {
                geometric_bcp(&GeometricParams { max_separation: max_d, ..GeometricParams::new(n) }, &mut rng)
            } else {
                random_bcp(n, density, max_d, &mut rng)
            };
            let text = if max_demand > 1 {
                write_bmcp_instance(&random_bmcp(&graph, max_demand, max_d, &mut rng))
            } else {
                write_instance(&graph)
            };
            match &output {
                Some(path) => write_file(path, &text),
                None => {
                    print!("{text}");
                    Ok(())
                }
            }
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Usage(m)) => {
            eprintln!("error: {m}");
            ExitCode::from(1)
        }
        Err(Failure::Unsolved(m)) => {
            eprintln!("{m}");
            ExitCode::from(2)
        }
        Err(Failure::Internal(m)) => {
            eprintln!("internal error: {m}");
            ExitCode::from(3)
        }
    }
}
