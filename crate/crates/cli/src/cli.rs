use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};

/// Maximum-entropy constituency parser.
///
/// Every default flag value can be overridden by the environment variable
/// shown in its help text.
#[derive(Debug, Parser)]
#[command(name = "mxparse", version, about)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Train the four models on a bracketed treebank and write an archive.
    Train(TrainArgs),
    /// Parse pre-tokenized sentences, one per line.
    Parse(ParseArgs),
    /// Score test trees against gold trees.
    Evaluate(EvaluateArgs),
    /// Best-of-N oracle scores for N = 1..max-n.
    OracleCurve(OracleArgs),
    /// Write a synthetic bracketed corpus.
    GenerateCorpus(GenerateArgs),
}

#[derive(Debug, Args)]
pub struct TrainArgs {
    /// Bracketed training trees.
    pub corpus: PathBuf,
    /// Archive to write.
    #[arg(short, long)]
    pub output: PathBuf,
    /// Minimum (predicate, action) count for a feature.
    #[arg(long, env = "MXPARSE_CUTOFF", default_value_t = 5)]
    pub cutoff: u64,
    /// Maximum GIS iterations per model.
    #[arg(long, env = "MXPARSE_ITERS", default_value_t = 100)]
    pub iters: usize,
    /// Stop when every feature expectation is within this of its empirical value.
    #[arg(long, env = "MXPARSE_TOL", default_value_t = 1e-3)]
    pub tol: f64,
}

#[derive(Debug, Args, Clone, Copy)]
pub struct SearchArgs {
    /// Complete parses to collect (M).
    #[arg(long, env = "MXPARSE_KBEST", default_value_t = 20)]
    pub kbest: usize,
    /// Derivations advanced per length (K).
    #[arg(long, env = "MXPARSE_BEAM", default_value_t = 20)]
    pub beam: usize,
    /// Probability mass kept per step (Q).
    #[arg(long, env = "MXPARSE_MASS", default_value_t = 0.95)]
    pub mass: f64,
    /// Worker threads; output keeps input order.
    #[arg(long, env = "MXPARSE_JOBS", default_value_t = 1)]
    pub jobs: usize,
}

#[derive(Debug, Args)]
pub struct ParseArgs {
    /// Model archive.
    #[arg(short, long, env = "MXPARSE_MODEL")]
    pub model: PathBuf,
    /// Input sentences; `-` or omitted reads standard input.
    pub input: Option<PathBuf>,
    #[command(flatten)]
    pub search: SearchArgs,
}

#[derive(Debug, Args, Clone, Copy, Default)]
pub struct EvalFlags {
    /// Drop `` and '' tokens before scoring.
    #[arg(long)]
    pub ignore_quotes: bool,
    /// Score PRT constituents as ADVP.
    #[arg(long)]
    pub collapse_advp_prt: bool,
    /// Drop all punctuation tokens (`` '' . : ,) before scoring.
    #[arg(long)]
    pub ignore_punct: bool,
    /// Skip sentences whose gold tree has more tokens than this.
    #[arg(long)]
    pub max_length: Option<usize>,
}

#[derive(Debug, Args)]
pub struct EvaluateArgs {
    /// Gold bracketed trees.
    pub gold: PathBuf,
    /// Test trees: bracketed trees or `parse` output (rank 1 is scored).
    pub test: PathBuf,
    #[command(flatten)]
    pub flags: EvalFlags,
    /// Print one tab-separated row per sentence instead of the summary.
    #[arg(long)]
    pub per_sentence: bool,
}

#[derive(Debug, Args)]
pub struct OracleArgs {
    /// Model archive.
    #[arg(short, long, env = "MXPARSE_MODEL")]
    pub model: PathBuf,
    /// Gold bracketed trees; their words are parsed.
    pub gold: PathBuf,
    /// Largest N.
    #[arg(long, env = "MXPARSE_MAX_N", default_value_t = 20)]
    pub max_n: usize,
    /// Derivations advanced per length (K).
    #[arg(long, env = "MXPARSE_BEAM", default_value_t = 20)]
    pub beam: usize,
    /// Probability mass kept per step (Q).
    #[arg(long, env = "MXPARSE_MASS", default_value_t = 0.95)]
    pub mass: f64,
    /// Worker threads.
    #[arg(long, env = "MXPARSE_JOBS", default_value_t = 1)]
    pub jobs: usize,
    #[command(flatten)]
    pub flags: EvalFlags,
}

#[derive(Debug, Args)]
pub struct GenerateArgs {
    /// File to write; standard output if omitted.
    #[arg(short, long)]
    pub output: Option<PathBuf>,
    #[arg(long, default_value_t = mxparse::synth::FIXTURE_SEED)]
    pub seed: u64,
    #[arg(long, default_value_t = mxparse::synth::FIXTURE_SIZE)]
    pub count: usize,
    /// Longest sentence, in tokens.
    #[arg(long, default_value_t = mxparse::synth::FIXTURE_MAX_LEN)]
    pub max_len: usize,
}
