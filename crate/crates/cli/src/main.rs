use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

mod commands;

/// Exact structure-constant algebras: constructions, simplicity and automorphism groups.
#[derive(Parser, Debug)]
#[command(name = "autalg", version)]
struct Cli {
    /// Print the machine-readable JSON report instead of text.
    #[arg(long, global = true)]
    json: bool,
    /// Worker threads for enumeration and exhaustive search; results do not depend on it.
    #[arg(long, global = true, env = "AUTALG_WORKERS", default_value_t = 1)]
    workers: usize,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Build the simple algebra realizing a permutation group and check its claims.
    Realize(RealizeArgs),
    /// Build a single construction and write its algebra file.
    Construct(ConstructArgs),
    /// Re-run every check recorded in an algebra file.
    Verify(AlgebraArg),
    /// Enumerate the automorphism group.
    Autgroup(AutgroupArgs),
    /// Decide simplicity.
    Simplicity(SimplicityArgs),
    /// Line normalizer in S_n of the invariant form of a group.
    Normalizer(NormalizerArgs),
    /// Gram matrices of the four trace forms.
    TraceForms(AlgebraArg),
    /// The structure tensor as an entry list.
    ExportTensor(AlgebraArg),
}

#[derive(Args, Debug)]
struct AlgebraArg {
    #[arg(long)]
    algebra: PathBuf,
    #[command(flatten)]
    budget: BudgetArgs,
}

#[derive(Args, Debug, Clone)]
struct BudgetArgs {
    /// Largest number of candidate tuples the enumeration may visit.
    #[arg(long)]
    budget: Option<u64>,
    /// Ignore the budget.
    #[arg(long)]
    force: bool,
}

#[derive(Args, Debug)]
struct RealizeArgs {
    /// Group as `n=3; gens=(1 2 3)`.
    #[arg(long)]
    group: String,
    /// Field as `p`, `p,k` or `p,k,c0 c1 … ck` (modulus low to high); `0` for the rationals.
    #[arg(long)]
    field: String,
    /// JSON file of scalar overrides.
    #[arg(long)]
    params: Option<PathBuf>,
    /// Where to write the algebra file.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Skip the automorphism enumeration.
    #[arg(long)]
    no_enumerate: bool,
    #[command(flatten)]
    budget: BudgetArgs,
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
enum Kind {
    Rigid,
    #[value(name = "B")]
    B,
    #[value(name = "A")]
    A,
    #[value(name = "C")]
    C,
    #[value(name = "D")]
    D,
    #[value(name = "E")]
    E,
    Wrap,
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
enum FlavorArg {
    Tensor,
    Symmetric,
}

#[derive(Args, Debug)]
struct ConstructArgs {
    #[arg(long, value_enum, ignore_case = true)]
    kind: Kind,
    #[arg(long)]
    field: String,
    /// Dimension of the rigid algebra L (rigid, C, D, and the default wrapped algebra).
    #[arg(long, default_value_t = 2)]
    s: usize,
    /// Dimension of U (B, A, C, D).
    #[arg(long, default_value_t = 2)]
    n: usize,
    /// Truncation degree (A, D).
    #[arg(long, default_value_t = 2)]
    r: usize,
    #[arg(long, value_enum, default_value = "tensor")]
    flavor: FlavorArg,
    /// Degree-r monomial spanning S, as 1-based variable indices `3,3`; A defaults to S = 0,
    /// D to the r-th power of the first U variable.
    #[arg(long)]
    monomial: Option<String>,
    /// Group for E.
    #[arg(long)]
    group: Option<String>,
    /// Algebra file to wrap (wrap); defaults to the rigid algebra of dimension s.
    #[arg(long)]
    inner: Option<PathBuf>,
    #[arg(long)]
    params: Option<PathBuf>,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct AutgroupArgs {
    #[arg(long)]
    algebra: PathBuf,
    #[command(flatten)]
    budget: BudgetArgs,
    /// Compare against the group predicted by the construction metadata.
    #[arg(long, value_enum, default_value = "auto")]
    expect: ExpectArg,
    /// Walk every invertible matrix instead of the block sweep.
    #[arg(long)]
    brute_force: bool,
    /// Disable the product-kernel pre-filter.
    #[arg(long)]
    no_prefilter: bool,
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
enum ExpectArg {
    Auto,
    None,
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
enum ModeArg {
    Exhaustive,
    Norton,
    Sampled,
}

#[derive(Args, Debug)]
struct SimplicityArgs {
    #[arg(long)]
    algebra: PathBuf,
    #[arg(long, value_enum)]
    mode: ModeArg,
    #[arg(long, default_value_t = 1)]
    seed: u64,
    #[arg(long)]
    rounds: Option<u32>,
}

#[derive(Args, Debug)]
struct NormalizerArgs {
    #[arg(long)]
    group: String,
    /// Comma-separated scalars.
    #[arg(long)]
    lambda: String,
    #[arg(long)]
    field: String,
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    let outcome = commands::dispatch(&cli);
    // a closed pipe downstream is not our failure
    let mut out = std::io::stdout().lock();
    let _ = if cli.json {
        writeln!(out, "{}", serde_json::to_string_pretty(&outcome.json).expect("report serializes"))
    } else if !outcome.text.is_empty() {
        writeln!(out, "{}", outcome.text.trim_end())
    } else {
        Ok(())
    };
    if let Some(msg) = &outcome.error {
        eprintln!("error: {msg}");
    }
    ExitCode::from(outcome.code)
}
