use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};

#[derive(Debug, Parser)]
#[command(name = "koehler", version, about = "Idempotents, decompositions and cyclicity checks for power-bounded matrices")]
pub struct Cli {
    #[command(flatten)]
    pub global: Global,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Args)]
pub struct Global {
    /// Numerical tolerance for matrix validation and rank decisions.
    #[arg(long, global = true, env = "KOEHLER_TOL", default_value_t = 1e-9)]
    pub tol: f64,

    /// Return / collapse radius.
    #[arg(long, global = true, env = "KOEHLER_EPSILON", default_value_t = 1e-6)]
    pub epsilon: f64,

    /// Number of powers explored by orbit searches.
    #[arg(long, global = true, env = "KOEHLER_HORIZON", default_value_t = 360)]
    pub horizon: usize,

    /// Run everything on the calling thread.
    #[arg(long, global = true)]
    pub sequential: bool,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Minimal idempotent and the reversible/stable splitting of a matrix.
    Decompose {
        #[arg(long)]
        input: PathBuf,
        #[arg(long, value_enum, default_value_t = Method::Both)]
        method: Method,
    },
    /// Peripheral spectrum, its cyclicity and the combinatorial prediction.
    Cyclicity {
        #[arg(long)]
        input: PathBuf,
        #[arg(long)]
        k_max: Option<usize>,
    },
    /// Structure of the semigroup generated by maps or matrices.
    Semigroup {
        #[arg(long)]
        generators: PathBuf,
        #[arg(long, default_value_t = koehler_core::semigroup::DEFAULT_CAP)]
        cap: usize,
    },
    /// Search for a sequence whose finite sums all lie in a set.
    Ipsearch {
        #[arg(long)]
        set: PathBuf,
        #[arg(long, default_value_t = koehler_core::ip::DEFAULT_WITNESS_LEN)]
        length: usize,
    },
    /// List or emit seeded fixture matrices.
    Fixtures {
        #[arg(long, conflicts_with = "emit")]
        list: bool,
        #[arg(long, num_args = 2, value_names = ["NAME", "SEED"])]
        emit: Option<Vec<String>>,
    },
    /// Run the seeded verification battery.
    Battery {
        #[arg(long, default_value_t = 7)]
        seed: u64,
        #[arg(long, default_value_t = 10)]
        count: usize,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Method {
    Spectral,
    Dynamical,
    Both,
}
