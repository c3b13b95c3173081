use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use quasicut_cli::{run, Command, RunConfig, EXIT_INPUT};
use quasicut_core::Limits;

#[derive(Parser)]
#[command(
    name = "quasicut",
    version,
    about = "Random quasipartitions, quasiultrametric embeddings and directed cut rounding"
)]
struct Cli {
    #[command(subcommand)]
    command: Cmd,
    /// Seed for every random draw.
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    /// Partition radius.
    #[arg(long, global = true)]
    r: Option<f64>,
    /// Largest separator size for the exhaustive separator search.
    #[arg(long, global = true)]
    treewidth: Option<usize>,
    /// Tree decomposition file.
    #[arg(long, global = true)]
    decomposition: Option<PathBuf>,
    /// Terminal pairs file.
    #[arg(long, global = true)]
    pairs: Option<PathBuf>,
    /// Monte Carlo trials for verify.
    #[arg(long, global = true)]
    trials: Option<usize>,
    /// Write the JSON report here instead of stdout.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
}

#[derive(Subcommand)]
enum Cmd {
    /// Sample one quasipartition of the graph's shortest-path quasimetric.
    Partition { graph: PathBuf },
    /// Sample a quasiultrametric embedding.
    Embed { graph: PathBuf },
    /// Round the sparsest-cut LP.
    SparsestCut { graph: PathBuf },
    /// Iterated sparsest-cut multicut.
    Multicut { graph: PathBuf },
    /// Run the property checks on a seeded corpus.
    Verify,
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_INPUT } else { 0 };
            let _ = e.print();
            return ExitCode::from(code as u8);
        }
    };
    let (command, input) = match cli.command {
        Cmd::Partition { graph } => (Command::Partition, Some(graph)),
        Cmd::Embed { graph } => (Command::Embed, Some(graph)),
        Cmd::SparsestCut { graph } => (Command::SparsestCut, Some(graph)),
        Cmd::Multicut { graph } => (Command::Multicut, Some(graph)),
        Cmd::Verify => (Command::Verify, None),
    };
    let cfg = RunConfig {
        command,
        input,
        seed: cli.seed,
        r: cli.r,
        treewidth: cli.treewidth,
        decomposition: cli.decomposition,
        pairs: cli.pairs,
        trials: cli.trials,
        out: cli.out.clone(),
        limits: Limits::from_env(),
    };
    let output = run(&cfg);
    eprint!("{}", output.stderr);
    if cli.out.is_none() {
        let mut stdout = std::io::stdout().lock();
        let _ = stdout.write_all(output.stdout.as_bytes());
        let _ = stdout.flush();
    }
    ExitCode::from(output.code as u8)
}
