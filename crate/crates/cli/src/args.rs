use std::path::PathBuf;
use std::sync::OnceLock;

use clap::{Args, Parser, Subcommand};

use spanalign::eval::ReportFormat;
use spanalign::optimize::{CPrime, OneSidedPolicy};
use spanalign::predict::NullMode;
use spanalign::snap::BoundaryRule;
use spanalign::symmetrize::MissingDirection;
use spanalign::synth::{NullSampling, SamplingMode, SquadVersion};

use crate::config::{parse_c_prime, parse_named, ScorerKind, SolverKind};

fn long_version() -> &'static str {
    static TEXT: OnceLock<String> = OnceLock::new();
    TEXT.get_or_init(|| {
        format!(
            "{} (library {}, {}-{}, {} build)",
            env!("CARGO_PKG_VERSION"),
            spanalign::VERSION,
            std::env::consts::ARCH,
            std::env::consts::OS,
            if cfg!(debug_assertions) { "debug" } else { "release" }
        )
    })
}

#[derive(Debug, Parser)]
#[command(name = "spanalign", version, long_version = long_version(), about = "Sentence alignment as cross-language span prediction")]
pub struct Cli {
    /// TOML run configuration; defaults to $SPANALIGN_CONFIG when set.
    #[arg(long, global = true, value_name = "FILE")]
    pub config: Option<PathBuf>,
    /// Directory receiving every output file.
    #[arg(long, global = true, value_name = "DIR")]
    pub out_dir: Option<PathBuf>,
    /// Worker threads for per-document work (0 = all cores).
    #[arg(long, global = true)]
    pub threads: Option<usize>,
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    /// error, warn, info, debug or trace.
    #[arg(long, global = true)]
    pub log_level: Option<String>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Build a SQuAD-layout span-prediction dataset from parallel text.
    Synth(SynthArgs),
    /// Score every query sentence against its paired document.
    Score(ScoreArgs),
    /// Align by exact or greedy span-pair selection.
    AlignIlp(AlignIlpArgs),
    /// Align by averaging both directions and thresholding.
    AlignSym(AlignSymArgs),
    /// Align with the dictionary and dynamic-programming baseline.
    Baseline(BaselineArgs),
    /// Evaluate span predictions or sentence alignments against gold.
    Eval(EvalArgs),
    /// Planted scoring, selection and evaluation in one run.
    Pipeline(PipelineArgs),
}

/// Document corpora; the n-th source document pairs with the n-th target.
#[derive(Debug, Args)]
pub struct Corpora {
    #[arg(long, value_name = "FILE")]
    pub src: PathBuf,
    #[arg(long, value_name = "FILE")]
    pub tgt: PathBuf,
}

#[derive(Debug, Args)]
pub struct NullArgs {
    /// na-token or score-threshold; default follows the prediction file.
    #[arg(long, value_parser = parse_named::<NullMode>)]
    pub null_rule: Option<NullMode>,
    #[arg(long, allow_hyphen_values = true)]
    pub tau: Option<f64>,
    /// Spans decoded per record from raw position vectors.
    #[arg(long)]
    pub vector_top_k: Option<usize>,
}

#[derive(Debug, Args)]
pub struct SnapArgs {
    #[arg(long)]
    pub min_score: Option<f64>,
    /// nearest, contain or cover.
    #[arg(long, value_parser = parse_named::<BoundaryRule>)]
    pub boundary: Option<BoundaryRule>,
}

#[derive(Debug, Args)]
pub struct SynthArgs {
    #[command(flatten)]
    pub corpora: Corpora,
    /// Gold alignments; pairs come from aligned groups instead of line order.
    #[arg(long, value_name = "FILE")]
    pub gold: Option<PathBuf>,
    #[arg(long)]
    pub name: Option<String>,
    #[arg(long)]
    pub negatives: Option<usize>,
    /// random or contextual.
    #[arg(long, value_parser = parse_named::<SamplingMode>)]
    pub mode: Option<SamplingMode>,
    #[arg(long)]
    pub max_query_tokens: Option<usize>,
    #[arg(long)]
    pub max_context_tokens: Option<usize>,
    /// v1.1 or v2.0.
    #[arg(long, value_parser = parse_named::<SquadVersion>)]
    pub squad_version: Option<SquadVersion>,
    /// Also emit unanswerable questions (needs --gold).
    #[arg(long)]
    pub null_examples: bool,
    #[arg(long)]
    pub null_cap: Option<f64>,
    /// unaligned or random.
    #[arg(long, value_parser = parse_named::<NullSampling>)]
    pub null_sampling: Option<NullSampling>,
    /// Use target sentences as questions.
    #[arg(long)]
    pub reverse: bool,
    #[arg(long, default_value = "squad.json")]
    pub output: String,
}

#[derive(Debug, Args)]
pub struct ScoreArgs {
    #[command(flatten)]
    pub corpora: Corpora,
    /// lexical or planted.
    #[arg(long, value_parser = parse_named::<ScorerKind>)]
    pub scorer: Option<ScorerKind>,
    /// Bilingual dictionary (lexical scorer).
    #[arg(long, value_name = "FILE")]
    pub dict: Option<PathBuf>,
    /// Gold alignments (planted scorer).
    #[arg(long, value_name = "FILE")]
    pub gold: Option<PathBuf>,
    #[arg(long)]
    pub sharpness: Option<f64>,
    #[arg(long)]
    pub top_k: Option<usize>,
    /// Longest target sentence run the lexical scorer proposes.
    #[arg(long)]
    pub max_sentences: Option<usize>,
    /// fwd, rev or both.
    #[arg(long, default_value = "both", value_parser = ["fwd", "rev", "both"])]
    pub direction: String,
}

#[derive(Debug, Args)]
pub struct AlignIlpArgs {
    #[command(flatten)]
    pub corpora: Corpora,
    /// Source-to-target prediction file.
    #[arg(long, value_name = "FILE")]
    pub fwd: PathBuf,
    /// Target-to-source prediction file.
    #[arg(long, value_name = "FILE")]
    pub rev: Option<PathBuf>,
    #[command(flatten)]
    pub null: NullArgs,
    #[command(flatten)]
    pub snap: SnapArgs,
    #[arg(long)]
    pub c: Option<f64>,
    /// A number or "auto".
    #[arg(long, value_parser = parse_c_prime)]
    pub c_prime: Option<CPrime>,
    /// keep or drop candidates scored in one direction only.
    #[arg(long, value_parser = parse_named::<OneSidedPolicy>)]
    pub one_sided: Option<OneSidedPolicy>,
    /// exact or greedy.
    #[arg(long, value_parser = parse_named::<SolverKind>)]
    pub solver: Option<SolverKind>,
    #[arg(long)]
    pub exact_cap: Option<usize>,
    /// Write unaligned sentences as one-sided groups.
    #[arg(long)]
    pub emit_nulls: bool,
    /// Write per-pair solver statistics.
    #[arg(long)]
    pub report: bool,
    /// Write the snapped and combined candidates.
    #[arg(long)]
    pub dump_candidates: bool,
}

#[derive(Debug, Args)]
pub struct AlignSymArgs {
    #[command(flatten)]
    pub corpora: Corpora,
    #[arg(long, value_name = "FILE")]
    pub fwd: PathBuf,
    #[arg(long, value_name = "FILE")]
    pub rev: PathBuf,
    #[command(flatten)]
    pub null: NullArgs,
    #[arg(long)]
    pub theta: Option<f64>,
    /// half or skip.
    #[arg(long, value_parser = parse_named::<MissingDirection>)]
    pub missing: Option<MissingDirection>,
}

#[derive(Debug, Args)]
pub struct BaselineArgs {
    #[command(flatten)]
    pub corpora: Corpora,
    #[arg(long, value_name = "FILE")]
    pub dict: PathBuf,
    #[arg(long)]
    pub penalty_one_zero: Option<f64>,
    #[arg(long)]
    pub penalty_zero_one: Option<f64>,
    #[arg(long)]
    pub penalty_one_two: Option<f64>,
    #[arg(long)]
    pub penalty_two_one: Option<f64>,
    #[arg(long)]
    pub penalty_two_two: Option<f64>,
}

#[derive(Debug, Args)]
pub struct EvalArgs {
    #[command(flatten)]
    pub corpora: Corpora,
    /// span or pair.
    #[arg(long, value_parser = ["span", "pair"])]
    pub mode: String,
    #[arg(long, value_name = "FILE")]
    pub gold: PathBuf,
    /// Prediction file (span mode) or alignment file (pair mode).
    #[arg(long, value_name = "FILE")]
    pub pred: PathBuf,
    #[command(flatten)]
    pub null: NullArgs,
    #[arg(long, default_value = "model")]
    pub model: String,
    /// Direction label for the report row.
    #[arg(long)]
    pub direction: Option<String>,
    /// text or json, for stdout.
    #[arg(long, default_value = "text", value_parser = parse_named::<ReportFormat>)]
    pub format: ReportFormat,
    /// Also write a JSON report with this name under the output directory.
    #[arg(long)]
    pub report_file: Option<String>,
}

#[derive(Debug, Args)]
pub struct PipelineArgs {
    /// Source corpus; with --tgt and --gold. Omit all three to generate a
    /// planted demo bitext.
    #[arg(long, value_name = "FILE", requires_all = ["tgt", "gold"])]
    pub src: Option<PathBuf>,
    #[arg(long, value_name = "FILE", requires_all = ["src", "gold"])]
    pub tgt: Option<PathBuf>,
    #[arg(long, value_name = "FILE", requires_all = ["src", "tgt"])]
    pub gold: Option<PathBuf>,
    /// Documents in the generated demo bitext.
    #[arg(long, default_value_t = 30)]
    pub docs: usize,
    #[arg(long)]
    pub sharpness: Option<f64>,
    #[arg(long)]
    pub theta: Option<f64>,
    #[arg(long, value_parser = parse_c_prime)]
    pub c_prime: Option<CPrime>,
    #[arg(long, value_parser = parse_named::<SolverKind>)]
    pub solver: Option<SolverKind>,
}
