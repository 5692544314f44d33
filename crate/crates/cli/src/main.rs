use std::fs::File;
use std::io::BufWriter;
use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::Context;
use clap::{Args, Parser, Subcommand};

use symkat::bench::{bench, BenchConfig};
use symkat::check::{check_text, signature, Algo, CheckConfig, Mode, DEFAULT_NAIVE_CAP};
use symkat::construct::Method;

/// Equivalence and inclusion of KAT expressions with symbolic automata.
#[derive(Parser)]
#[command(name = "kat", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Compare two expressions. Exits with 0 when they are equivalent (or
    /// the first is included in the second), 1 when not, 2 on error.
    Check(CheckArgs),
    /// Check random saturated pairs with every construction.
    Bench(BenchArgs),
}

#[derive(Args)]
struct CheckArgs {
    /// Automaton construction: brz, ant or iy.
    #[arg(long, default_value = "ant")]
    method: Method,
    /// Algorithm: naive, symb or dsf.
    #[arg(long, default_value = "dsf")]
    algo: Algo,
    /// equiv or incl.
    #[arg(long, default_value = "equiv")]
    mode: Mode,
    /// Print counters after the verdict.
    #[arg(long)]
    stats: bool,
    /// Primitive tests, comma separated.
    #[arg(long, value_delimiter = ',', default_value = "")]
    tests: Vec<String>,
    /// Letters, comma separated.
    #[arg(long, value_delimiter = ',', default_value = "")]
    letters: Vec<String>,
    /// Largest alphabet the naive algorithm may enumerate.
    #[arg(long, default_value_t = DEFAULT_NAIVE_CAP)]
    naive_cap: u64,
    /// Give up after expanding this many states.
    #[arg(long)]
    state_cap: Option<usize>,
    e1: String,
    e2: String,
}

#[derive(Args)]
struct BenchArgs {
    /// Number of primitive tests.
    #[arg(long, default_value_t = 7)]
    tests: u32,
    /// Number of letters.
    #[arg(long, default_value_t = 7)]
    letters: u32,
    /// Connectives per random expression.
    #[arg(long, default_value_t = 70)]
    connectives: usize,
    #[arg(long, default_value_t = 100)]
    pairs: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Compare the random expressions themselves instead of their
    /// saturations.
    #[arg(long)]
    no_saturate: bool,
    /// Derivative automata stop beyond this multiple of the partial
    /// derivative automaton's size.
    #[arg(long, default_value_t = 10)]
    brz_cap_factor: usize,
    /// Where to write the per-pair CSV report.
    #[arg(long)]
    out: Option<PathBuf>,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Check(args) => run_check(args),
        Command::Bench(args) => run_bench(args).map(|()| true),
    };
    match result {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}

fn names(v: Vec<String>) -> Vec<String> {
    v.into_iter().map(|s| s.trim().to_string()).filter(|s| !s.is_empty()).collect()
}

fn run_check(args: CheckArgs) -> anyhow::Result<bool> {
    let sig = signature(&names(args.tests), &names(args.letters))?;
    let cfg = CheckConfig {
        method: args.method,
        algo: args.algo,
        mode: args.mode,
        naive_cap: args.naive_cap,
        state_cap: args.state_cap,
    };
    let o = check_text(&cfg, &sig, &args.e1, &args.e2)?;
    let verdict = match (cfg.mode, o.holds) {
        (Mode::Equiv, true) => "equivalent",
        (Mode::Equiv, false) => "not equivalent",
        (Mode::Incl, true) => "included",
        (Mode::Incl, false) => "not included",
    };
    println!("{verdict}");
    if let Some(d) = o.describe(&sig) {
        println!("{d}");
    }
    if args.stats {
        println!("output tests: {}", o.stats.output_tests);
        println!("pairs pushed: {}", o.stats.pairs_pushed);
        println!("nodes visited: {}", o.stats.nodes_visited);
        println!("states: {}", o.states);
    }
    Ok(o.holds)
}

fn run_bench(args: BenchArgs) -> anyhow::Result<()> {
    anyhow::ensure!(args.pairs > 0 && args.letters > 0, "--pairs and --letters must be positive");
    let cfg = BenchConfig {
        tests: args.tests,
        letters: args.letters,
        connectives: args.connectives,
        pairs: args.pairs,
        saturate: !args.no_saturate,
        seed: args.seed,
        brz_cap_factor: args.brz_cap_factor,
    };
    let report = bench(&cfg)?;
    println!(
        "{} pairs, {} tests, {} letters, {} connectives, seed {}{}",
        cfg.pairs,
        cfg.tests,
        cfg.letters,
        cfg.connectives,
        cfg.seed,
        if cfg.saturate { ", saturated" } else { "" }
    );
    print!("{}", report.table());
    for d in &report.diagnostics {
        println!("note: {d}");
    }
    if let Some(path) = args.out {
        let f = File::create(&path).with_context(|| format!("cannot create {}", path.display()))?;
        report
            .write_csv(BufWriter::new(f))
            .with_context(|| format!("cannot write {}", path.display()))?;
        println!("wrote {}", path.display());
    }
    Ok(())
}
