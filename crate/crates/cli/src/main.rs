//! `linfty`: exact checks, homotopy transfer, decompositions and deformations
//! from JSON documents.
//!
//! Exit codes: 0 when every requested identity holds, 1 on a mathematical
//! failure, 2 on usage or parse errors.

mod commands;
mod report;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

#[derive(Debug, Parser)]
#[command(name = "linfty", version, about = "Exact L∞-algebra computations over ℚ")]
struct Cli {
    #[command(subcommand)]
    command: Command,
    #[command(flatten)]
    flags: Flags,
}

#[derive(Clone, Debug, Args)]
pub struct Flags {
    /// Arity bound A of every structure.
    #[arg(long, global = true)]
    pub arity: Option<usize>,
    /// Polynomial bound P of tangent vectors.
    #[arg(long = "poly-degree", global = true)]
    pub poly_degree: Option<usize>,
    /// Seed for `random-dgl` documents.
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    /// Directory for emitted documents; defaults to the current directory.
    #[arg(long = "output-dir", global = true)]
    pub output_dir: Option<PathBuf>,
    #[arg(long, global = true, value_enum, default_value_t = Format::Json)]
    pub format: Format,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Text,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Check the identities of a DGL, L∞-algebra, morphism, formal DG manifold or deformation.
    Check { path: PathBuf },
    /// Transfer a DGL to its minimal model on homology.
    Transfer { path: PathBuf },
    /// Split a DGL into its minimal model and a linearly contractible factor.
    Decompose { path: PathBuf },
    /// Build the universal or semiuniversal deformation of a formal DG manifold.
    Deform {
        path: PathBuf,
        #[arg(long, conflicts_with = "semiuniversal", required_unless_present = "semiuniversal")]
        universal: bool,
        #[arg(long)]
        semiuniversal: bool,
    },
    /// List oriented trees with n leaves.
    Trees {
        #[arg(long)]
        leaves: usize,
        /// Add node values v, leaf weights w and the sign e.
        #[arg(long)]
        invariants: bool,
    },
    /// Classify a deformation by a morphism into the tangent window.
    Correspond { path: PathBuf },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match &cli.command {
        Command::Check { path } => commands::check(path, &cli.flags),
        Command::Transfer { path } => commands::transfer(path, &cli.flags),
        Command::Decompose { path } => commands::decompose(path, &cli.flags),
        Command::Deform { path, universal, .. } => commands::deform(path, *universal, &cli.flags),
        Command::Trees { leaves, invariants } => commands::trees(*leaves, *invariants, &cli.flags),
        Command::Correspond { path } => commands::correspond(path, &cli.flags),
    };
    match result {
        Ok(code) => code,
        Err(error) => {
            eprintln!("error: {error:#}");
            ExitCode::from(commands::exit_code(&error))
        }
    }
}
