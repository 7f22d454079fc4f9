//! `plump`: command-line access to posets, crested and Insect chains,
//! lumpings, spectra and wreath-product groups. Every input path accepts
//! `-` for standard input; all output is JSON.

mod commands;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

#[derive(Parser, Debug)]
#[command(name = "plump", version, about = "Markov chains on poset block structures")]
pub struct Cli {
    /// Write the result here instead of standard output.
    #[arg(short, long, global = true)]
    pub output: Option<PathBuf>,
    /// Use f64 arithmetic (tolerance 1e-9) instead of exact rationals.
    #[arg(long, global = true)]
    pub float: bool,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Poset validation and enumeration.
    #[command(subcommand)]
    Poset(PosetCmd),
    /// Build Markov operators.
    #[command(subcommand)]
    Chain(ChainCmd),
    /// Check and construct lumpings.
    #[command(subcommand)]
    Lump(LumpCmd),
    /// Spectrum of a reversible chain.
    Spectrum(SpectrumArgs),
    /// Generalized wreath product groups.
    #[command(subcommand)]
    Group(GroupCmd),
    /// Exhaustive searches.
    #[command(subcommand)]
    Search(SearchCmd),
}

#[derive(Subcommand, Debug)]
pub enum PosetCmd {
    /// Validate a poset and echo it in normal form.
    Check { poset: String },
    /// List the ancestral (upward-closed) subsets and their covers.
    Ancestrals { poset: String },
    /// List the antichains.
    Antichains { poset: String },
    /// Test whether a set of elements is fibered over the rest.
    Fibered {
        poset: String,
        /// Comma-separated elements to remove, e.g. `2,3,4`.
        #[arg(long, value_delimiter = ',', required = true)]
        remove: Vec<usize>,
    },
}

#[derive(Args, Debug)]
pub struct CrestedInput {
    /// Crested product file; alternatively give --poset and --weights.
    pub spec: Option<String>,
    #[arg(long, conflicts_with = "spec")]
    pub poset: Option<String>,
    /// Comma-separated weights, one per element.
    #[arg(long, value_delimiter = ',', requires = "poset")]
    pub weights: Vec<String>,
    /// Factor matrix files, one per element.
    #[arg(long = "factor", requires = "poset")]
    pub factors: Vec<String>,
    /// Uniform factor sizes, one per element.
    #[arg(long, value_delimiter = ',', requires = "poset", conflicts_with = "factors")]
    pub sizes: Vec<usize>,
}

#[derive(Subcommand, Debug)]
pub enum ChainCmd {
    /// Generalized crested product.
    Crested(CrestedInput),
    /// Insect chain on `X^n` with `|X| = q`.
    Insect {
        poset: String,
        #[arg(short)]
        q: usize,
        /// Emit the α and p coefficients instead of the matrix.
        #[arg(long)]
        coefficients: bool,
    },
}

#[derive(Subcommand, Debug)]
pub enum LumpCmd {
    /// Report whether a partition lumps a chain.
    Verify { chain: String, partition: String },
    /// Lump a chain, failing if the partition is not a lumping.
    Apply { chain: String, partition: String },
    /// Delete coordinates of a crested product.
    Delete {
        #[command(flatten)]
        crested: CrestedInput,
        #[arg(long, value_delimiter = ',', required = true)]
        remove: Vec<usize>,
    },
    /// Direct product of per-factor lumpings.
    Product {
        #[command(flatten)]
        crested: CrestedInput,
        /// One partition file per element, in element order.
        #[arg(long = "part", required = true)]
        parts: Vec<String>,
    },
    /// Generalized product of lumpings from per-element tables.
    Generalized {
        #[command(flatten)]
        crested: CrestedInput,
        #[arg(long, required = true)]
        tables: String,
    },
    /// Lump a chain by the orbits of a group.
    Orbit { chain: String, group: String },
}

#[derive(Args, Debug)]
pub struct SpectrumArgs {
    #[arg(default_value = "-")]
    pub chain: String,
    /// Reversing measure; defaults to uniform, then to the stationary distribution.
    #[arg(long)]
    pub measure: Option<String>,
    /// Compare against the closed form for the tree Insect chain and emit exact values.
    #[arg(long)]
    pub exact_check: bool,
}

#[derive(Subcommand, Debug)]
pub enum GroupCmd {
    /// Orbit partition of a generated group.
    Orbits { group: String },
    /// Generators of a tree automorphism group with the given lumping as orbits.
    Reconstruct {
        partition: String,
        #[arg(short)]
        q: usize,
        #[arg(short)]
        n: usize,
    },
    /// Decide whether a lumping is the orbit partition of a subgroup.
    Induced {
        poset: String,
        partition: String,
        #[arg(short)]
        q: usize,
        /// Chain to lump; defaults to the Insect chain.
        #[arg(long)]
        chain: Option<String>,
        #[arg(long, default_value_t = poset_lumping::search::DEFAULT_GROUP_CAP)]
        cap: u64,
    },
    /// Random generators, or the stabilizer of a state.
    Random {
        poset: String,
        #[arg(short)]
        q: usize,
        #[arg(long, default_value_t = 2)]
        count: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Emit generators of the stabilizer of this state instead.
        #[arg(long)]
        stabilizer: Option<usize>,
    },
}

#[derive(Subcommand, Debug)]
pub enum SearchCmd {
    /// Every lumping of a chain.
    Lumpings {
        chain: String,
        #[arg(long, default_value_t = poset_lumping::search::DEFAULT_SEARCH_CAP)]
        cap: usize,
        /// Poset of the block structure, for the group-induced test.
        #[arg(long, requires = "q")]
        poset: Option<String>,
        #[arg(short, requires = "poset")]
        q: Option<usize>,
        #[arg(long, requires = "q", conflicts_with = "not_group_induced")]
        group_induced_only: bool,
        #[arg(long, requires = "q")]
        not_group_induced: bool,
        #[arg(long, default_value_t = poset_lumping::search::DEFAULT_GROUP_CAP)]
        group_cap: u64,
    },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match commands::run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(failure) => failure.report(),
    }
}
