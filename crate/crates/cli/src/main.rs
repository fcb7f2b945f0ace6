use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Instant;

use anyhow::{bail, Context, Result};
use clap::{Parser, Subcommand, ValueEnum};

use barvinok::arith::Int;
use barvinok::decompose::{EngineOptions, Mode, Substitution};
use barvinok::engine::{brute_force_count, count_genfun, genfun_polytope};
use barvinok::polytope::HRep;
use barvinok_cli::parse_hrep;

#[derive(Parser)]
#[command(name = "barvinok", version, about = "Count lattice points in rational polytopes")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Count through a signed cone decomposition.
    Count(CountArgs),
    /// Count by scanning the integer bounding box.
    Oracle { file: PathBuf },
}

#[derive(clap::Args)]
struct CountArgs {
    #[arg(long, value_enum, default_value_t = ModeArg::PrimalIrrational)]
    mode: ModeArg,
    /// Stop decomposing once a cone's index is at most this value.
    #[arg(long, default_value = "1")]
    max_index: Int,
    #[arg(long, value_enum, default_value_t = SubstitutionArg::Exp)]
    substitution: SubstitutionArg,
    /// Seed for the substitution direction.
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Process vertices sequentially in a fixed order.
    #[arg(long)]
    deterministic: bool,
    /// Print the generating function in its text serialization.
    #[arg(long)]
    print_genfun: bool,
    /// Print decomposition statistics as JSON.
    #[arg(long)]
    stats: bool,
    file: PathBuf,
}

#[derive(Clone, Copy, ValueEnum)]
enum ModeArg {
    DualStopped,
    PrimalIrrational,
    AllPrimal,
    Homogenized,
}

impl From<ModeArg> for Mode {
    fn from(m: ModeArg) -> Self {
        match m {
            ModeArg::DualStopped => Mode::DualStopped,
            ModeArg::PrimalIrrational => Mode::PrimalIrrational,
            ModeArg::AllPrimal => Mode::AllPrimal,
            ModeArg::Homogenized => Mode::Homogenized,
        }
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum SubstitutionArg {
    Poly,
    Exp,
}

fn read_polytope(path: &PathBuf) -> Result<HRep> {
    let text = std::fs::read_to_string(path).with_context(|| format!("cannot read {}", path.display()))?;
    parse_hrep(&text).with_context(|| format!("cannot parse {}", path.display()))
}

fn count(args: CountArgs) -> Result<()> {
    let p = read_polytope(&args.file)?;
    let mode = Mode::from(args.mode);
    if mode == Mode::Homogenized && !args.print_genfun {
        bail!("homogenized mode only produces a generating function; pass --print-genfun");
    }
    let opts = EngineOptions {
        max_index: args.max_index,
        mode,
        substitution: match args.substitution {
            SubstitutionArg::Poly => Substitution::Polynomial,
            SubstitutionArg::Exp => Substitution::Exponential,
        },
        deterministic: args.deterministic,
        rng_seed: args.seed,
    };
    let start = Instant::now();
    let (g, stats) = genfun_polytope(&p, &opts)?;
    let total = if mode == Mode::Homogenized { None } else { Some(count_genfun(&g, &opts)?) };
    let wall_ms = start.elapsed().as_millis() as u64;

    if let Some(total) = total {
        println!("{total}");
    }
    if args.print_genfun {
        print!("{}", g.serialize());
    }
    if args.stats {
        let json = serde_json::json!({
            "cones_emitted": stats.cones_emitted,
            "max_depth": stats.max_depth,
            "vertices": stats.vertices,
            "triangulation_simplices": stats.triangulation_simplices,
            "wall_ms": wall_ms,
        });
        println!("{json}");
    }
    Ok(())
}

fn run(cli: Cli) -> Result<()> {
    match cli.command {
        Command::Count(args) => count(args),
        Command::Oracle { file } => {
            println!("{}", brute_force_count(&read_polytope(&file)?)?);
            Ok(())
        }
    }
}

fn main() -> ExitCode {
    env_logger::init();
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::FAILURE
        }
    }
}
