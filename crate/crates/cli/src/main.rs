use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use exdes_cli::commands::{self, GenTarget, InitKind, SolveOptions, VerifyOptions};

/// Constructs efficient exact experimental designs under resource
/// constraints with a tabu-guided excursion heuristic, and verifies small
/// instances by complete enumeration.
#[derive(Parser)]
#[command(name = "exdes", version, about)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run the excursion search on a problem file and report the best design.
    Solve(SolveArgs),
    /// Enumerate the whole feasible set of a small problem and report the
    /// exact global and local optima.
    Verify(VerifyArgs),
    /// Materialize a built-in benchmark family as an explicit problem file.
    Gen(GenArgs),
}

#[derive(Args)]
struct SolveArgs {
    /// Problem file (TOML).
    problem: PathBuf,
    /// Wall-clock budget per restart, in seconds [default: 120 unless
    /// --stall-limit is given].
    #[arg(long, value_name = "SECONDS")]
    time_limit: Option<f64>,
    /// Stop a restart after this many iterations without improvement.
    #[arg(long, value_name = "ITERS")]
    stall_limit: Option<u64>,
    /// Backward steps allowed before an excursion is abandoned.
    #[arg(long, default_value_t = 16)]
    back_max: u32,
    /// Significant digits kept when fingerprinting criterion values.
    #[arg(long, default_value_t = 9)]
    n_round: u32,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Independent searches to run; the best result wins.
    #[arg(long, default_value_t = 10)]
    restarts: u32,
    /// Initial design of each restart.
    #[arg(long, value_enum, default_value_t = InitArg::Random)]
    init: InitArg,
    /// Append one CSV line per search event to this file.
    #[arg(long, value_name = "FILE")]
    trace: Option<PathBuf>,
    /// Write the report here instead of standard output.
    #[arg(long, value_name = "FILE")]
    out: Option<PathBuf>,
}

#[derive(Clone, Copy, ValueEnum)]
enum InitArg {
    /// Start from the protected base design.
    Base,
    /// Start from a seeded random forward walk.
    Random,
    /// Floor the [approximate] weights in the problem file.
    Floor,
}

#[derive(Args)]
struct VerifyArgs {
    /// Problem file (TOML).
    problem: PathBuf,
    /// Refuse enumerations whose node bound exceeds this many designs
    /// [default: 10^7].
    #[arg(long, value_name = "NODES")]
    cap: Option<u64>,
    /// Also run the heuristic and report its efficiency against the optimum.
    #[arg(long)]
    compare: bool,
    /// Seed for the comparison run.
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Stall limit for the comparison run.
    #[arg(long, default_value_t = 10_000)]
    stall_limit: u64,
    /// Restarts for the comparison run.
    #[arg(long, default_value_t = 5)]
    restarts: u32,
    /// Write the report here instead of standard output.
    #[arg(long, value_name = "FILE")]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct GenArgs {
    #[command(subcommand)]
    family: FamilyArgs,
}

#[derive(Subcommand)]
enum FamilyArgs {
    /// Pairwise treatment comparisons in blocks of size two.
    Block {
        /// Number of treatments (at least 3).
        #[arg(long)]
        v: usize,
        /// Cap on the total number of blocks.
        #[arg(long)]
        blocks: Option<u64>,
        /// Per-treatment usage caps, comma separated, one per treatment.
        #[arg(long, value_delimiter = ',')]
        treatment_limits: Option<Vec<u64>>,
        #[arg(long, value_name = "FILE")]
        out: Option<PathBuf>,
    },
    /// Two-factor quadratic response surface with marginal and cost rows.
    Quadratic {
        /// Cost budget in price units.
        #[arg(long)]
        budget: f64,
        #[arg(long, value_name = "FILE")]
        out: Option<PathBuf>,
    },
    /// Bioaccumulation sampling schedule with wage-dependent hourly costs.
    Fluoranthene {
        /// Hour of the week the exposure starts (0 = Monday 00:00).
        #[arg(long, default_value_t = 0)]
        start_hour: u32,
        /// Price budget for all samples.
        #[arg(long, default_value_t = 13.0)]
        budget: f64,
        /// Nominal uptake rate.
        #[arg(long, default_value_t = 1.0)]
        theta1: f64,
        /// Nominal elimination rate.
        #[arg(long, default_value_t = 0.2381)]
        theta2: f64,
        #[arg(long, value_name = "FILE")]
        out: Option<PathBuf>,
    },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let run = match cli.command {
        Command::Solve(args) => {
            let opts = SolveOptions {
                time_limit: args.time_limit,
                stall_limit: args.stall_limit,
                back_max: args.back_max,
                n_round: args.n_round,
                seed: args.seed,
                restarts: args.restarts,
                init: match args.init {
                    InitArg::Base => InitKind::Base,
                    InitArg::Random => InitKind::Random,
                    InitArg::Floor => InitKind::Floor,
                },
                trace: args.trace,
            };
            commands::solve(&args.problem, &opts)
                .and_then(|text| commands::deliver(&text, args.out.as_deref()))
        }
        Command::Verify(args) => {
            let opts = VerifyOptions {
                cap: args.cap,
                compare: args.compare,
                seed: args.seed,
                stall_limit: args.stall_limit,
                restarts: args.restarts,
            };
            commands::verify(&args.problem, &opts)
                .and_then(|text| commands::deliver(&text, args.out.as_deref()))
        }
        Command::Gen(args) => {
            let (target, out) = match args.family {
                FamilyArgs::Block {
                    v,
                    blocks,
                    treatment_limits,
                    out,
                } => (
                    GenTarget::Block {
                        v,
                        blocks,
                        treatment_limits,
                    },
                    out,
                ),
                FamilyArgs::Quadratic { budget, out } => (GenTarget::Quadratic { budget }, out),
                FamilyArgs::Fluoranthene {
                    start_hour,
                    budget,
                    theta1,
                    theta2,
                    out,
                } => (
                    GenTarget::Fluoranthene {
                        start_hour,
                        budget,
                        theta1,
                        theta2,
                    },
                    out,
                ),
            };
            commands::gen(&target).and_then(|text| commands::deliver(&text, out.as_deref()))
        }
    };
    match run {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
