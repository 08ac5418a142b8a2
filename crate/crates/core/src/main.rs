use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

use pg2ssg::analysis::check_properties;
use pg2ssg::arena::{size_of, SizeReport};
use pg2ssg::battery::{exhaustive_battery, random_battery, Instance};
use pg2ssg::chain::{chain_reduce, ChainSizes};
use pg2ssg::error::{Error, Result};
use pg2ssg::io::bench::{render_table, run_d_sweep, run_small, write_csv, BenchRecord};
use pg2ssg::io::format::{parse_parity, parse_ssg, print_parity, print_ssg, ParityGame};
use pg2ssg::io::generate::generate_random_parity;
use pg2ssg::parity::{solve_parity, solve_parity_bruteforce};
use pg2ssg::rational::Rational;
use pg2ssg::reduction::{check_assumptions, reduce_parity_to_ssg};
use pg2ssg::ssg::{
    denominator_bound_check, solve_ssg_strategy_improvement, to_half_probability_form,
    verify_fixpoint, ValueVector,
};

/// Parity games, simple stochastic games, and exact reductions between them.
#[derive(Parser)]
#[command(name = "pg2ssg", version, about)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Generate a random parity game file.
    Gen(GenArgs),
    /// Reduce a parity game to a simple stochastic game.
    Reduce(ReduceArgs),
    /// Solve a game and print per-vertex winners or values.
    Solve(SolveArgs),
    /// Run an invariant suite; exits nonzero on any violation.
    Verify(VerifyArgs),
    /// Measure reduction sizes and write a CSV report.
    Bench(BenchArgs),
}

#[derive(Args)]
struct GenArgs {
    /// Number of vertices.
    #[arg(long)]
    n: usize,
    /// Probability of each optional edge.
    #[arg(long, default_value_t = 0.25)]
    density: f64,
    /// Priorities are drawn uniformly from 0..=max-priority.
    #[arg(long, default_value_t = 3)]
    max_priority: u32,
    /// Generator seed; defaults to $PG2SSG_SEED or 0.
    #[arg(long)]
    seed: Option<u64>,
    /// Output file; stdout when omitted.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Copy, Clone, ValueEnum)]
enum Method {
    Direct,
    Chain,
}

#[derive(Args)]
struct ReduceArgs {
    #[arg(long, value_enum, default_value = "direct")]
    method: Method,
    /// Parity game input file.
    #[arg(long)]
    input: PathBuf,
    /// Output game file; a JSON sidecar is written next to it.
    #[arg(long)]
    out: PathBuf,
}

#[derive(Copy, Clone, ValueEnum)]
enum GameKind {
    Parity,
    Ssg,
}

#[derive(Args)]
struct SolveArgs {
    #[arg(long, value_enum)]
    game: GameKind,
    #[arg(long)]
    input: PathBuf,
}

#[derive(Copy, Clone, ValueEnum)]
enum Suite {
    /// Solver agreement and the reduction's winner equivalence.
    Oracle,
    /// Probability assumptions and escape-statistics inequalities.
    Properties,
    /// Fixed-point verification and the fair-coin normal form.
    Fixpoint,
}

#[derive(Args)]
struct VerifyArgs {
    #[arg(long, value_enum)]
    suite: Suite,
    /// Largest random-instance size.
    #[arg(long, default_value_t = 5)]
    max_n: usize,
    /// Cap on the exhaustively enumerated battery.
    #[arg(long, default_value_t = 2000)]
    cap: usize,
    /// Number of extra random instances.
    #[arg(long, default_value_t = 200)]
    random: usize,
    #[arg(long)]
    seed: Option<u64>,
}

#[derive(Copy, Clone, ValueEnum)]
enum Family {
    DSweep,
    Small,
}

#[derive(Args)]
struct BenchArgs {
    #[arg(long, value_enum, default_value = "d-sweep")]
    family: Family,
    /// Instance count for the small family.
    #[arg(long, default_value_t = 20)]
    count: usize,
    #[arg(long)]
    seed: Option<u64>,
    /// CSV output file; stdout table always printed.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Include wall-clock columns in the CSV (breaks byte reproducibility).
    #[arg(long)]
    timings: bool,
}

fn default_seed(explicit: Option<u64>) -> u64 {
    explicit.unwrap_or_else(|| {
        std::env::var("PG2SSG_SEED")
            .ok()
            .and_then(|s| s.parse().ok())
            .unwrap_or(0)
    })
}

/// Writes to stdout, reporting failures (such as a closed pipe) as
/// ordinary errors instead of panicking.
fn emit(text: impl std::fmt::Display) -> Result<()> {
    use std::io::Write;
    let mut out = std::io::stdout().lock();
    write!(out, "{text}").map_err(Error::Io)
}

fn emit_line(text: impl std::fmt::Display) -> Result<()> {
    use std::io::Write;
    let mut out = std::io::stdout().lock();
    writeln!(out, "{text}").map_err(Error::Io)
}

fn read_input(path: &Path) -> Result<String> {
    std::fs::read_to_string(path)
        .map_err(|e| Error::Semantic(format!("cannot read {}: {e}", path.display())))
}

fn write_output(path: &Path, content: &str) -> Result<()> {
    std::fs::write(path, content)
        .map_err(|e| Error::Semantic(format!("cannot write {}: {e}", path.display())))
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let outcome = match cli.command {
        Command::Gen(args) => cmd_gen(args),
        Command::Reduce(args) => cmd_reduce(args),
        Command::Solve(args) => cmd_solve(args),
        Command::Verify(args) => cmd_verify(args),
        Command::Bench(args) => cmd_bench(args),
    };
    match outcome {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        // a reader that stopped consuming our output is not an error
        Err(Error::Io(e)) if e.kind() == std::io::ErrorKind::BrokenPipe => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}

fn cmd_gen(args: GenArgs) -> Result<bool> {
    let seed = default_seed(args.seed);
    let (arena, priorities) = generate_random_parity(args.n, args.density, args.max_priority, seed);
    let document = print_parity(&ParityGame::new(arena, priorities));
    match args.out {
        Some(path) => write_output(&path, &document)?,
        None => emit(&document)?,
    }
    Ok(true)
}

#[derive(Serialize)]
struct AssumptionSummary {
    all_hold: bool,
    total_escape_slack: String,
    odd_mass_min_slack: String,
    even_mass_min_slack: String,
}

#[derive(Serialize)]
struct Sidecar {
    method: String,
    vertices: usize,
    edges: usize,
    random_vertices: usize,
    size: SizeReport,
    #[serde(skip_serializing_if = "Option::is_none")]
    max_compact_priority: Option<u32>,
    #[serde(skip_serializing_if = "Option::is_none")]
    assumptions: Option<AssumptionSummary>,
    #[serde(skip_serializing_if = "Option::is_none")]
    stage_sizes: Option<ChainSizes>,
    embedding: Vec<usize>,
}

fn min_slack(lines: &[pg2ssg::reduction::AssumptionLine]) -> String {
    lines
        .iter()
        .map(|l| l.slack.clone())
        .min()
        .map(|s| s.to_string())
        .unwrap_or_else(|| "none".into())
}

fn sidecar_path(out: &Path) -> PathBuf {
    let mut name = out
        .file_name()
        .map(|n| n.to_os_string())
        .unwrap_or_default();
    name.push(".json");
    out.with_file_name(name)
}

fn cmd_reduce(args: ReduceArgs) -> Result<bool> {
    let game = parse_parity(&read_input(&args.input)?)?;
    let (ssg, sidecar) = match args.method {
        Method::Direct => {
            let (ssg, compact, probs) = reduce_parity_to_ssg(&game.arena, &game.priorities)?;
            let assumptions = check_assumptions(compact.as_map(), &probs);
            let sidecar = Sidecar {
                method: "direct".into(),
                vertices: ssg.arena.num_vertices(),
                edges: ssg.arena.num_edges(),
                random_vertices: ssg.arena.num_random(),
                size: size_of(&ssg.arena)?,
                max_compact_priority: Some(compact.max_priority()),
                assumptions: Some(AssumptionSummary {
                    all_hold: assumptions.all_hold(),
                    total_escape_slack: assumptions.total_escape.slack.to_string(),
                    odd_mass_min_slack: min_slack(&assumptions.odd_mass_above),
                    even_mass_min_slack: min_slack(&assumptions.even_mass_above),
                }),
                stage_sizes: None,
                embedding: ssg.embedding.iter().map(|v| v.index()).collect(),
            };
            (ssg, sidecar)
        }
        Method::Chain => {
            let chain = chain_reduce(&game.arena, &game.priorities)?;
            let sidecar = Sidecar {
                method: "chain".into(),
                vertices: chain.ssg.arena.num_vertices(),
                edges: chain.ssg.arena.num_edges(),
                random_vertices: chain.ssg.arena.num_random(),
                size: size_of(&chain.ssg.arena)?,
                max_compact_priority: None,
                assumptions: None,
                stage_sizes: Some(chain.sizes.clone()),
                embedding: chain.ssg.embedding.iter().map(|v| v.index()).collect(),
            };
            (chain.ssg, sidecar)
        }
    };
    write_output(&args.out, &print_ssg(&ssg))?;
    let sidecar_file = sidecar_path(&args.out);
    let json =
        serde_json::to_string_pretty(&sidecar).map_err(|e| Error::Internal(e.to_string()))?;
    write_output(&sidecar_file, &format!("{json}\n"))?;
    emit_line(format!(
        "wrote {} ({} vertices, {} edges) and {}",
        args.out.display(),
        sidecar.vertices,
        sidecar.edges,
        sidecar_file.display()
    ))?;
    Ok(true)
}

fn cmd_solve(args: SolveArgs) -> Result<bool> {
    let text = read_input(&args.input)?;
    match args.game {
        GameKind::Parity => {
            let game = parse_parity(&text)?;
            let regions = solve_parity(&game.arena, &game.priorities)?;
            for v in game.arena.vertices() {
                let winner = if regions.eve_wins_from(v) {
                    "Eve"
                } else {
                    "Adam"
                };
                let choice = regions
                    .eve_strategy
                    .choice(v)
                    .or_else(|| regions.adam_strategy.choice(v))
                    .map(|w| format!(" -> {}", w.index()))
                    .unwrap_or_default();
                emit_line(format!("{} {winner}{choice}", v.index()))?;
            }
        }
        GameKind::Ssg => {
            let ssg = parse_ssg(&text)?;
            let solution = solve_ssg_strategy_improvement(&ssg)?;
            for (v, value) in solution.values.iter() {
                let side = if *value >= pg2ssg::rational::half() {
                    ">=1/2"
                } else {
                    "<1/2"
                };
                emit_line(format!("{} {value} {side}", v.index()))?;
            }
        }
    }
    Ok(true)
}

struct Reporter {
    violations: usize,
}

impl Reporter {
    fn new() -> Reporter {
        Reporter { violations: 0 }
    }

    fn violation(&mut self, instance: &Instance, message: &str) {
        self.violations += 1;
        eprintln!("violation [{}]: {message}", instance.label);
        eprintln!(
            "{}",
            print_parity(&ParityGame::new(
                instance.arena.clone(),
                instance.priorities.clone()
            ))
        );
    }

    fn finish(self, suite: &str, checked: usize) -> bool {
        if self.violations == 0 {
            let _ = emit_line(format!(
                "{suite}: {checked} instances checked, no violations"
            ));
            true
        } else {
            eprintln!(
                "{suite}: {} violations in {checked} instances",
                self.violations
            );
            false
        }
    }
}

fn verify_battery(args: &VerifyArgs) -> Vec<Instance> {
    let mut battery = exhaustive_battery(args.cap);
    battery.extend(random_battery(
        args.random,
        args.max_n,
        default_seed(args.seed),
    ));
    battery
}

fn cmd_verify(args: VerifyArgs) -> Result<bool> {
    let battery = verify_battery(&args);
    let total = battery.len();
    let mut reporter = Reporter::new();
    match args.suite {
        Suite::Oracle => {
            for instance in &battery {
                let regions = solve_parity(&instance.arena, &instance.priorities)?;
                match solve_parity_bruteforce(&instance.arena, &instance.priorities, 1 << 16) {
                    Ok(brute) => {
                        if brute.eve_wins != regions.eve_wins {
                            reporter.violation(instance, "solver and brute force disagree");
                            continue;
                        }
                    }
                    Err(Error::BudgetExceeded { .. }) => {}
                    Err(e) => return Err(e),
                }
                let (ssg, ..) = reduce_parity_to_ssg(&instance.arena, &instance.priorities)?;
                let values = solve_ssg_strategy_improvement(&ssg)?.values;
                for v in instance.arena.vertices() {
                    let eve_wins = regions.eve_wins_from(v);
                    let at_least_half = values.at_least_half(ssg.embedded(v).unwrap());
                    if eve_wins != at_least_half {
                        reporter
                            .violation(instance, &format!("winner/value mismatch at vertex {v}"));
                    }
                }
            }
            Ok(reporter.finish("oracle", total))
        }
        Suite::Properties => {
            for instance in &battery {
                let (ssg, compact, probs) =
                    reduce_parity_to_ssg(&instance.arena, &instance.priorities)?;
                let assumptions = check_assumptions(compact.as_map(), &probs);
                if !assumptions.all_hold() {
                    reporter.violation(instance, "assumption inequalities failed");
                    continue;
                }
                let report =
                    check_properties(&ssg, &instance.arena, compact.as_map(), &probs, 256)?;
                if !report.all_hold() {
                    reporter.violation(instance, &report.violations.join("; "));
                }
            }
            Ok(reporter.finish("properties", total))
        }
        Suite::Fixpoint => {
            for instance in &battery {
                let (ssg, ..) = reduce_parity_to_ssg(&instance.arena, &instance.priorities)?;
                let solution = solve_ssg_strategy_improvement(&ssg)?;
                if !verify_fixpoint(&ssg, &solution.values)?.holds {
                    reporter.violation(instance, "solved vector is not a fixpoint");
                    continue;
                }
                let mut perturbed: Vec<Rational> = solution.values.values().to_vec();
                perturbed[0] += pg2ssg::rational::rat(1, 1000);
                if verify_fixpoint(&ssg, &ValueVector::new(perturbed))?.holds {
                    reporter.violation(instance, "perturbed vector accepted as a fixpoint");
                    continue;
                }
                let normalized = to_half_probability_form(&ssg)?;
                let renormalized = solve_ssg_strategy_improvement(&normalized)?;
                let preserved = ssg
                    .arena
                    .vertices()
                    .all(|v| solution.values.value(v) == renormalized.values.value(v));
                if !preserved {
                    reporter.violation(instance, "normalization changed a value");
                    continue;
                }
                if !denominator_bound_check(&normalized)? {
                    reporter.violation(instance, "denominator bound exceeded");
                }
            }
            Ok(reporter.finish("fixpoint", total))
        }
    }
}

fn cmd_bench(args: BenchArgs) -> Result<bool> {
    let records: Vec<BenchRecord> = match args.family {
        Family::DSweep => run_d_sweep()?,
        Family::Small => run_small(args.count, default_seed(args.seed))?,
    };
    emit(render_table(&records))?;
    if let Some(path) = &args.out {
        write_output(path, &write_csv(&records, args.timings)?)?;
        emit_line(format!("wrote {}", path.display()))?;
    }
    Ok(records.iter().all(|r| r.agreement != "FAIL"))
}
