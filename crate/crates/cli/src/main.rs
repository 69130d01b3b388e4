//! `unital`: build unitals and planes, export confluence graphs, and check
//! the clique, O'Nan, classification and reconstruction results on them.
//!
//! Exit codes: 0 on success, 1 when a checked property fails, 2 on usage
//! or I/O errors.

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};

mod commands;

#[derive(Parser)]
#[command(name = "unital", version, about)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum BuildKind {
    /// Hermitian unital of order q
    Hermitian,
    /// PG(2,q)
    Pg,
    /// AG(2,q)
    Ag,
    /// PG(2,q), or the structure given by --in, with --delete removed
    Puncture,
}

#[derive(Subcommand)]
enum Command {
    /// Write an incidence-v1 JSON structure
    Build {
        kind: BuildKind,
        #[arg(long)]
        q: Option<u32>,
        /// line | line-swap | conic | comma-separated point indices
        #[arg(long)]
        delete: Option<String>,
        /// Structure to puncture instead of PG(2,q)
        #[arg(long = "in")]
        input: Option<PathBuf>,
        #[arg(short, long)]
        output: PathBuf,
    },
    /// Write the confluence graph of a structure in DIMACS format
    Graph {
        file: PathBuf,
        #[arg(short, long)]
        output: PathBuf,
    },
    /// Strongly regular parameters of a graph (DIMACS) or of a structure's
    /// confluence graph (JSON)
    Srg {
        file: PathBuf,
        /// Fail unless the parameters are those of a unital of this order
        #[arg(long, value_name = "Q")]
        expect_unital: Option<i64>,
    },
    /// Maximal cliques of a confluence graph
    Cliques {
        file: PathBuf,
        /// Tag cliques as pencils or near pencils and check the clique theorems
        #[arg(long)]
        classify: bool,
        /// Only compute the clique number
        #[arg(long)]
        max_only: bool,
        #[arg(long, value_name = "PATH")]
        json: Option<PathBuf>,
    },
    /// Search for O'Nan configurations
    Onan {
        file: PathBuf,
        /// Stop after this many (0 = all)
        #[arg(long, default_value_t = 0)]
        limit: usize,
        /// Fail if any configuration is found
        #[arg(long)]
        expect_none: bool,
    },
    /// Classify a linear space on q² points and embed it in a projective plane
    ClassifyLinspace {
        file: PathBuf,
        #[arg(long)]
        q: usize,
        /// Print the embedding witness
        #[arg(long)]
        embed: bool,
        #[arg(long, value_name = "PATH")]
        json: Option<PathBuf>,
    },
    /// Rebuild a unital from its confluence graph
    Reconstruct {
        graph: PathBuf,
        /// Fail unless the result is isomorphic to this structure
        #[arg(long, value_name = "STRUCT")]
        verify: Option<PathBuf>,
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// Find a point isomorphism between two structures
    Isomorphic { a: PathBuf, b: PathBuf },
}

/// Why a command did not succeed.
pub enum Failure {
    /// A checked property does not hold.
    Check(String),
    /// Bad arguments, unreadable input, or an unwritable output.
    Usage(anyhow::Error),
}

impl From<anyhow::Error> for Failure {
    fn from(e: anyhow::Error) -> Self {
        Failure::Usage(e)
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Build {
            kind,
            q,
            delete,
            input,
            output,
        } => commands::build(kind, q, delete.as_deref(), input.as_deref(), &output),
        Command::Graph { file, output } => commands::graph(&file, &output),
        Command::Srg {
            file,
            expect_unital,
        } => commands::srg(&file, expect_unital),
        Command::Cliques {
            file,
            classify,
            max_only,
            json,
        } => commands::cliques(&file, classify, max_only, json.as_deref()),
        Command::Onan {
            file,
            limit,
            expect_none,
        } => commands::onan(&file, limit, expect_none),
        Command::ClassifyLinspace {
            file,
            q,
            embed,
            json,
        } => commands::classify_linspace(&file, q, embed, json.as_deref()),
        Command::Reconstruct {
            graph,
            verify,
            output,
        } => commands::reconstruct(&graph, verify.as_deref(), output.as_deref()),
        Command::Isomorphic { a, b } => commands::isomorphic(&a, &b),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Check(msg)) => {
            eprintln!("check failed: {msg}");
            ExitCode::from(1)
        }
        Err(Failure::Usage(e)) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}
