mod commands;
mod format;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use format::Format;

#[derive(Debug, Parser)]
#[command(
    name = "sepsys",
    version,
    about = "Construct, verify and search extremal separating set systems"
)]
struct Cli {
    /// Output format for families and reports.
    #[arg(long, value_enum, global = true, default_value = "json")]
    format: Format,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum PropertyArg {
    Separating,
    Completely,
    Hcs,
    Hs,
    Nice,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum KindArg {
    Binary,
    Spencer,
    Hcs,
    Hs2,
    NiceSmall,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ProblemArg {
    G,
    Exists,
    MinM,
    UniqueSubset,
    PairFamily,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum GroupArg {
    Permutations,
    Switching,
}

#[derive(Debug, Clone, Args)]
pub struct InputArgs {
    /// Family document (JSON or 0/1 text); stdin when absent or "-".
    #[arg(long)]
    input: Option<PathBuf>,
}

#[derive(Debug, Clone, Args)]
pub struct SearchArgs {
    /// Wall-clock budget in milliseconds; unlimited when absent.
    #[arg(long, env = "SEPSYS_BUDGET_MS")]
    budget_ms: Option<u64>,
    #[arg(long, default_value_t = 1)]
    threads: usize,
    /// Disable orbit rejection.
    #[arg(long)]
    no_symmetry: bool,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Check a family against a property and print the certificate or counterexample.
    Verify {
        #[arg(long, value_enum)]
        property: PropertyArg,
        #[arg(long, default_value_t = 2)]
        k: usize,
        #[command(flatten)]
        input: InputArgs,
    },
    /// Build a family, verify it, and print it.
    Construct {
        #[arg(long, value_enum)]
        kind: KindArg,
        #[arg(long)]
        n: Option<usize>,
        #[arg(long)]
        m: Option<usize>,
        #[arg(long, default_value_t = 2)]
        k: usize,
    },
    /// Print the lower and upper bound on f(n,k).
    Bounds {
        #[arg(long)]
        n: u64,
        #[arg(long, default_value_t = 2)]
        k: u64,
    },
    /// Run an exhaustive search.
    Search {
        #[arg(long, value_enum)]
        problem: ProblemArg,
        #[arg(long)]
        m: Option<usize>,
        #[arg(long)]
        n: Option<usize>,
        #[arg(long, default_value_t = 2)]
        k: usize,
        #[command(flatten)]
        search: SearchArgs,
    },
    /// Tabulate f(n,2) with its bounds, cross-checked by search for small n.
    Table {
        #[arg(long, default_value_t = 30)]
        n_max: u64,
        #[arg(long, default_value_t = 12)]
        check_up_to: u64,
        #[command(flatten)]
        search: SearchArgs,
    },
    /// Print the dual family.
    Dual {
        #[command(flatten)]
        input: InputArgs,
    },
    /// Complement one ground element in every member.
    Switch {
        #[arg(long)]
        element: usize,
        #[command(flatten)]
        input: InputArgs,
    },
    /// Print the canonical representative of the family's orbit.
    Canon {
        #[arg(long, value_enum, default_value = "permutations")]
        group: GroupArg,
        #[command(flatten)]
        input: InputArgs,
    },
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Verify { property, k, input } => commands::verify(property, k, &input, cli.format),
        Command::Construct { kind, n, m, k } => commands::construct(kind, n, m, k, cli.format),
        Command::Bounds { n, k } => commands::bounds(n, k, cli.format),
        Command::Search {
            problem,
            m,
            n,
            k,
            search,
        } => commands::search(problem, m, n, k, &search, cli.format),
        Command::Table {
            n_max,
            check_up_to,
            search,
        } => commands::table(n_max, check_up_to, &search, cli.format),
        Command::Dual { input } => commands::dual(&input, cli.format),
        Command::Switch { element, input } => commands::switch(element, &input, cli.format),
        Command::Canon { group, input } => commands::canon(group, &input, cli.format),
    };
    match result {
        Ok(report) => {
            if report.text.ends_with('\n') {
                print!("{}", report.text);
            } else {
                println!("{}", report.text);
            }
            ExitCode::from(report.code)
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.code())
        }
    }
}
