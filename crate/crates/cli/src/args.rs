use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};

#[derive(Parser, Debug)]
#[command(name = "gmtc", version, about = "Gated multi-scale TCN speech emotion recognition")]
pub struct Cli {
    /// Only log warnings and errors.
    #[arg(long, short, global = true)]
    pub quiet: bool,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Extract padded 39-D MFCC features into a cache file.
    Features(FeaturesArgs),
    /// Train and evaluate on a hold-out or cross-validation split.
    Train(TrainArgs),
    /// Run an ablation sweep and write a comparison table.
    Ablate(AblateArgs),
    /// Feature maps, 2-D entropy and autoencoder projections of a trained model.
    Analyze(AnalyzeArgs),
    /// Generate a synthetic labelled corpus.
    Synth(SynthArgs),
}

#[derive(Args, Debug)]
pub struct FeaturesArgs {
    /// Corpus kind (casia, emodb, ravdess, savee) or a manifest CSV.
    #[arg(long)]
    pub corpus: String,
    /// Directory the audio paths are relative to.
    #[arg(long)]
    pub root: PathBuf,
    #[arg(long)]
    pub out: PathBuf,
    /// Pad or truncate to this many frames instead of the corpus maximum.
    #[arg(long, value_parser = clap::value_parser!(u64).range(1..))]
    pub tmax: Option<u64>,
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
pub enum SplitArg {
    Holdout,
    Cv5,
    Cv10,
}

impl From<SplitArg> for gmtc_core::corpus::SplitScheme {
    fn from(s: SplitArg) -> Self {
        use gmtc_core::corpus::SplitScheme;
        match s {
            SplitArg::Holdout => SplitScheme::Holdout,
            SplitArg::Cv5 => SplitScheme::Cv5,
            SplitArg::Cv10 => SplitScheme::Cv10,
        }
    }
}

#[derive(Args, Debug, Clone)]
pub struct TrainArgs {
    #[arg(long)]
    pub features: PathBuf,
    #[arg(long, value_enum, default_value = "holdout")]
    pub split: SplitArg,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// key=value model and training configuration.
    #[arg(long)]
    pub config: Option<PathBuf>,
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
pub enum Study {
    Gating,
    Gscb,
    Scale,
    Drd,
}

#[derive(Args, Debug)]
pub struct AblateArgs {
    #[arg(long, value_enum)]
    pub study: Study,
    /// Feature cache; required unless --no-train.
    #[arg(long)]
    pub features: Option<PathBuf>,
    #[arg(long, value_enum, default_value = "holdout")]
    pub split: SplitArg,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long)]
    pub config: Option<PathBuf>,
    #[arg(long)]
    pub out: PathBuf,
    /// Only report structure (parameter counts, receptive fields).
    #[arg(long)]
    pub no_train: bool,
    /// Class count for --no-train tables.
    #[arg(long, default_value_t = 6)]
    pub classes: usize,
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
pub enum AnalysisKind {
    Entropy,
    Maps,
    Project,
}

#[derive(Args, Debug)]
pub struct AnalyzeArgs {
    #[arg(value_enum)]
    pub kind: AnalysisKind,
    #[arg(long)]
    pub ckpt: PathBuf,
    #[arg(long)]
    pub features: PathBuf,
    #[arg(long)]
    pub out: PathBuf,
    /// Seed for the autoencoder.
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Export maps for at most this many clips.
    #[arg(long)]
    pub limit: Option<usize>,
}

#[derive(Args, Debug)]
pub struct SynthArgs {
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long)]
    pub out: PathBuf,
    #[arg(long, value_parser = clap::value_parser!(u64).range(1..))]
    pub per_class: u64,
    #[arg(long, default_value_t = 6, value_parser = clap::value_parser!(u64).range(2..))]
    pub classes: u64,
}
