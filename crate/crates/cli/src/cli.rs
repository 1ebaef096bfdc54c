use std::fmt::Display;
use std::path::PathBuf;
use std::str::FromStr;

use clap::{Args, Parser, Subcommand};
use dessins::pauli::PauliOp;
use dessins::{Mode, Passport, PassportPattern, Signature};
use num_bigint::BigUint;

fn parse<T: FromStr>(s: &str) -> Result<T, String>
where
    T::Err: Display,
{
    s.parse().map_err(|e: T::Err| e.to_string())
}

fn positive(s: &str) -> Result<usize, String> {
    match s.parse::<usize>() {
        Ok(0) => Err("must be at least 1".into()),
        Ok(w) => Ok(w),
        Err(e) => Err(e.to_string()),
    }
}

#[derive(Parser, Debug)]
#[command(name = "dessins", version, about = "Dessins d'enfants, their induced geometries, Belyi maps and Pauli checks")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// All classes of one index up to simultaneous conjugation.
    Enumerate(EnumerateArgs),
    /// Signature, passport, group order and automorphisms of a dessin file.
    Analyze {
        file: PathBuf,
    },
    /// Geometries induced by the pair-stabilizer classes of a dessin.
    Geometry(GeometryArgs),
    /// Catalog matches for every geometry a dessin induces.
    Recognize {
        file: PathBuf,
    },
    /// Aggregate report of which tabulated geometries occur up to an index.
    Catalog(CatalogArgs),
    /// Classes with a given passport, signature or group order.
    Search(SearchArgs),
    #[command(subcommand)]
    Belyi(BelyiCommand),
    #[command(subcommand)]
    Pauli(PauliCommand),
    /// Run an expectation file of `command => JSON fragment` checks.
    Expect {
        file: PathBuf,
    },
}

#[derive(Args, Debug)]
pub struct EnumerateArgs {
    #[arg(long)]
    pub index: usize,
    #[arg(long, default_value = "preclean", value_parser = parse::<Mode>)]
    pub mode: Mode,
    /// `[C_α, C_β, C_γ]`, `*` leaves an entry open.
    #[arg(long, value_parser = parse::<PassportPattern>)]
    pub passport: Option<PassportPattern>,
    #[arg(long, value_parser = parse::<BigUint>)]
    pub group_order: Option<BigUint>,
    /// `jsonl`, `count`, or `files DIR`.
    #[arg(long, num_args = 1..=2, value_names = ["FORMAT", "DIR"], default_value = "jsonl")]
    pub emit: Vec<String>,
    #[arg(long, value_parser = positive)]
    pub workers: Option<usize>,
    /// Largest index allowed to run.
    #[arg(long, env = "DESSIN_MAX_INDEX")]
    pub max_index: Option<usize>,
}

#[derive(Args, Debug)]
pub struct GeometryArgs {
    pub file: PathBuf,
    /// Write one DOT file per class into this directory.
    #[arg(long)]
    pub dot: Option<PathBuf>,
    /// JSON lines instead of a table.
    #[arg(long)]
    pub json: bool,
}

#[derive(Args, Debug)]
pub struct CatalogArgs {
    /// Enumerate every index from 1 up to this one.
    #[arg(long, required_unless_present = "references")]
    pub max_index: Option<usize>,
    #[arg(long, default_value = "preclean", value_parser = parse::<Mode>)]
    pub mode: Mode,
    /// Check the reference constructions against the tabulated rows instead.
    #[arg(long)]
    pub references: bool,
    #[arg(long)]
    pub json: bool,
    #[arg(long, value_parser = positive)]
    pub workers: Option<usize>,
}

#[derive(Args, Debug)]
pub struct SearchArgs {
    #[arg(long)]
    pub index: usize,
    #[arg(long, value_parser = parse::<PassportPattern>)]
    pub passport: Option<PassportPattern>,
    /// `(B,W,F,g)`.
    #[arg(long, value_parser = parse::<Signature>)]
    pub signature: Option<Signature>,
    #[arg(long, value_parser = parse::<BigUint>)]
    pub group_order: Option<BigUint>,
    /// Defaults to hypermap when the passport's β entry has a cycle longer than 2.
    #[arg(long, value_parser = parse::<Mode>)]
    pub mode: Option<Mode>,
    /// Also induce and recognize the geometries of each hit.
    #[arg(long)]
    pub induce: bool,
    #[arg(long, value_parser = positive)]
    pub workers: Option<usize>,
    #[arg(long, env = "DESSIN_MAX_INDEX")]
    pub max_index: Option<usize>,
}

#[derive(Subcommand, Debug)]
pub enum BelyiCommand {
    /// Check a rational map against a passport.
    Verify {
        map: PathBuf,
        /// Overrides the map file's `passport =` line.
        #[arg(long, value_parser = parse::<Passport>)]
        passport: Option<Passport>,
        /// Defaults to 1e-8, or 1e-3 for maps with decimal coefficients.
        #[arg(long)]
        tol: Option<f64>,
    },
}

#[derive(Subcommand, Debug)]
pub enum PauliCommand {
    /// Spectrum of C² and norm of C for four operators.
    Chsh {
        #[arg(num_args = 4, required = true, allow_hyphen_values = true, value_parser = parse::<PauliOp>)]
        operators: Vec<PauliOp>,
    },
    /// Line products and contextuality of a labeled configuration.
    Magic { file: PathBuf },
    /// Chordless 4-cycles of the n-qubit commutation graph.
    CountSquares {
        #[arg(long)]
        qubits: usize,
    },
}
