use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};

use nilterm_cli::{
    load_problem, run_analyze, run_enumerate, run_oracle_collapse, run_twist_trace, run_wprime, CliError, Format,
    Output, RunOptions,
};
use nilterm_core::rootsys::Family;

#[derive(Parser)]
#[command(
    name = "nilterm",
    version,
    about = "Count Q-factorial terminalizations of covers of nilpotent orbit closures"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
    #[arg(long, value_enum, default_value_t = FormatArg::Text, global = true)]
    format: FormatArg,
    /// Chamber enumeration budget.
    #[arg(long, global = true)]
    max_nodes: Option<usize>,
    /// Worker threads for chamber enumeration.
    #[arg(long, global = true)]
    threads: Option<usize>,
}

#[derive(Clone, Copy, ValueEnum)]
enum FormatArg {
    Text,
    Machine,
}

#[derive(Subcommand)]
enum Command {
    /// Full pipeline: chambers, W′, ρ̄, W_X and both counts.
    Analyze { problem: String },
    /// Dump the chamber graph.
    Enumerate { problem: String },
    /// Apply twists in sequence from the base diagram.
    TwistTrace {
        problem: String,
        #[arg(long, value_delimiter = ',', required = true)]
        at: Vec<usize>,
    },
    /// Generators and order of W′.
    Wprime { problem: String },
    /// Reference tables.
    Oracle {
        #[command(subcommand)]
        which: OracleCommand,
    },
}

#[derive(Subcommand)]
enum OracleCommand {
    /// Greedy collapse against the brute-force dominance maximum.
    Collapse {
        #[arg(long)]
        family: Family,
        #[arg(long)]
        n: usize,
    },
}

fn run(cli: Cli) -> Result<Output, CliError> {
    let opts = RunOptions {
        format: match cli.format {
            FormatArg::Text => Format::Text,
            FormatArg::Machine => Format::Machine,
        },
        max_nodes: cli.max_nodes,
        threads: cli.threads,
    };
    match cli.command {
        Command::Analyze { problem } => run_analyze(&load_problem(&problem)?, &opts),
        Command::Enumerate { problem } => run_enumerate(&load_problem(&problem)?, &opts),
        Command::TwistTrace { problem, at } => run_twist_trace(&load_problem(&problem)?, &at, &opts),
        Command::Wprime { problem } => run_wprime(&load_problem(&problem)?, &opts),
        Command::Oracle {
            which: OracleCommand::Collapse { family, n },
        } => run_oracle_collapse(family, n, &opts),
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(out) => {
            print!("{}", out.text);
            if out.ok {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(1)
            }
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}
