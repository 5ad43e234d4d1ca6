//! `hoss` command-line tool.
//!
//! Exit codes: 0 success, 1 other error, 2 malformed input file or invalid
//! command line, 3 image size violation or size-guard refusal, 4 missing
//! image, 5 single-class training data.

mod commands;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use hoss::features::DescriptorSet;
use hoss::{Error, PhaseScaling, StatKind, StatMode};

#[derive(Parser)]
#[command(name = "hoss", version, about = "Higher-order structure statistics of grayscale images")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Compute a TOSS or FOSS surface of one image.
    Surface(SurfaceArgs),
    /// Reconstruct an image from its phase, a statistic surface or its magnitude.
    Reconstruct(ReconstructArgs),
    /// Radial and normal slices plus the TOSF/FOSF descriptor of one image.
    Slices(SlicesArgs),
    /// Mean statistic surface over the images of one manifest label.
    ClassAverage(ClassAverageArgs),
    /// Tiled feature vectors for every image of a manifest.
    Features(FeaturesArgs),
    /// Train a linear SVM and write the model.
    Train(TrainArgs),
    /// Accuracy of a saved model, or cross-validated accuracy without one.
    Eval(EvalArgs),
    /// Cross-validated accuracy at each tile size.
    Sweep(SweepArgs),
    /// Generate the seeded two-class synthetic corpus.
    Synth(SynthArgs),
}

#[derive(Clone, Copy, ValueEnum)]
enum KindArg {
    Toss,
    Foss,
}

impl From<KindArg> for StatKind {
    fn from(k: KindArg) -> Self {
        match k {
            KindArg::Toss => StatKind::Toss,
            KindArg::Foss => StatKind::Foss,
        }
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum ModeArg {
    Linear,
    Wrapped,
}

impl From<ModeArg> for StatMode {
    fn from(m: ModeArg) -> Self {
        match m {
            ModeArg::Linear => StatMode::PhaseLinear,
            ModeArg::Wrapped => StatMode::WrappedArg,
        }
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum SourceArg {
    Phase,
    Toss,
    Foss,
    Magnitude,
}

#[derive(Clone, Copy, ValueEnum)]
enum ScalingArg {
    None,
    Pi,
}

impl From<ScalingArg> for PhaseScaling {
    fn from(s: ScalingArg) -> Self {
        match s {
            ScalingArg::None => PhaseScaling::None,
            ScalingArg::Pi => PhaseScaling::PiScale,
        }
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum DescriptorArg {
    Tosf,
    #[value(name = "tosf+fosf")]
    TosfFosf,
}

impl From<DescriptorArg> for DescriptorSet {
    fn from(d: DescriptorArg) -> Self {
        match d {
            DescriptorArg::Tosf => DescriptorSet::Tosf,
            DescriptorArg::TosfFosf => DescriptorSet::TosfFosf,
        }
    }
}

#[derive(Args)]
struct SurfaceArgs {
    #[arg(long)]
    input: PathBuf,
    #[arg(long, value_enum, default_value = "toss")]
    kind: KindArg,
    #[arg(long, value_enum, default_value = "linear")]
    mode: ModeArg,
    /// Quadrant values, row-major, 12 significant digits.
    #[arg(long)]
    out_csv: Option<PathBuf>,
    /// Min-max normalized heatmap of the centered surface.
    #[arg(long)]
    out_pgm: Option<PathBuf>,
    /// Lift the size guard on wrapped FOSS.
    #[arg(long)]
    force: bool,
}

#[derive(Args)]
struct ReconstructArgs {
    #[arg(long)]
    input: PathBuf,
    #[arg(long, value_enum, default_value = "phase")]
    source: SourceArg,
    /// Rescaling of statistic surfaces before they are used as phase.
    #[arg(long, value_enum, default_value = "pi")]
    scaling: ScalingArg,
    #[arg(long)]
    out: PathBuf,
    /// Print gradient-map NCC against the input for this reconstruction and
    /// for the magnitude-only baseline.
    #[arg(long)]
    ncc_report: bool,
}

#[derive(Args)]
struct SlicesArgs {
    #[arg(long)]
    input: PathBuf,
    #[arg(long, value_enum, default_value = "toss")]
    kind: KindArg,
    /// Rows `slice,bin,value`.
    #[arg(long)]
    out_csv: PathBuf,
}

#[derive(Args)]
struct ClassAverageArgs {
    #[arg(long)]
    manifest: PathBuf,
    #[arg(long)]
    label: String,
    #[arg(long, value_enum, default_value = "toss")]
    kind: KindArg,
    /// Log-polar resampling and illumination normalization first.
    #[arg(long)]
    preprocess: bool,
    #[arg(long)]
    out_csv: Option<PathBuf>,
    #[arg(long)]
    out_pgm: Option<PathBuf>,
}

#[derive(Args)]
struct FeatureSource {
    /// Output of `hoss features`.
    #[arg(long, conflicts_with = "manifest", required_unless_present = "manifest")]
    features_csv: Option<PathBuf>,
    /// Corpus manifest; features are computed in-process.
    #[arg(long)]
    manifest: Option<PathBuf>,
    #[arg(long, default_value_t = 64)]
    tile_size: usize,
    #[arg(long, value_enum, default_value = "tosf")]
    descriptors: DescriptorArg,
}

#[derive(Args)]
struct SvmArgs {
    #[arg(long, default_value_t = 0.01)]
    lambda: f64,
    #[arg(long, default_value_t = 200)]
    epochs: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
}

impl From<&SvmArgs> for hoss::SvmConfig {
    fn from(a: &SvmArgs) -> Self {
        hoss::SvmConfig {
            lambda: a.lambda,
            epochs: a.epochs,
            seed: a.seed,
        }
    }
}

#[derive(Args)]
struct FeaturesArgs {
    #[arg(long)]
    manifest: PathBuf,
    #[arg(long, default_value_t = 64)]
    tile_size: usize,
    #[arg(long, value_enum, default_value = "tosf")]
    descriptors: DescriptorArg,
    #[arg(long)]
    out_csv: PathBuf,
}

#[derive(Args)]
struct TrainArgs {
    #[command(flatten)]
    source: FeatureSource,
    #[command(flatten)]
    svm: SvmArgs,
    #[arg(long)]
    model: PathBuf,
}

#[derive(Args)]
struct EvalArgs {
    #[command(flatten)]
    source: FeatureSource,
    #[command(flatten)]
    svm: SvmArgs,
    /// Saved model; without it, accuracy is cross-validated.
    #[arg(long)]
    model: Option<PathBuf>,
    #[arg(long, default_value_t = hoss::svm::DEFAULT_FOLDS)]
    folds: usize,
    #[arg(long)]
    out_csv: Option<PathBuf>,
}

#[derive(Args)]
struct SweepArgs {
    #[arg(long)]
    manifest: PathBuf,
    /// Comma-separated tile sizes.
    #[arg(long, value_delimiter = ',', default_values_t = hoss::features::SUPPORTED_TILE_SIZES)]
    scales: Vec<usize>,
    #[arg(long, value_enum, default_value = "tosf")]
    descriptors: DescriptorArg,
    #[command(flatten)]
    svm: SvmArgs,
    #[arg(long, default_value_t = hoss::svm::DEFAULT_FOLDS)]
    folds: usize,
    /// Rows `scale,accuracy`.
    #[arg(long)]
    out_csv: PathBuf,
}

#[derive(Args)]
struct SynthArgs {
    #[arg(long)]
    out_dir: PathBuf,
    #[arg(long, default_value_t = 100)]
    per_class: usize,
    #[arg(long, default_value_t = 256)]
    size: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
}

fn exit_code(err: &Error) -> u8 {
    match err {
        Error::Format(_) => 2,
        Error::Dimension(_) | Error::SizeGuard { .. } => 3,
        Error::MissingImage(_) => 4,
        Error::SingleClass => 5,
        _ => 1,
    }
}

/// Caps the global worker pool at `HOSS_THREADS` when set.
fn configure_threads() {
    let Ok(value) = std::env::var("HOSS_THREADS") else {
        return;
    };
    match value.trim().parse::<usize>() {
        Ok(n) if n > 0 => {
            if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(n).build_global() {
                log::warn!("could not size thread pool: {e}");
            }
        }
        _ => log::warn!("ignoring HOSS_THREADS={value:?}; expected a positive integer"),
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = Cli::parse();
    configure_threads();
    let result = match cli.command {
        Command::Surface(a) => commands::surface(a),
        Command::Reconstruct(a) => commands::reconstruct(a),
        Command::Slices(a) => commands::slices(a),
        Command::ClassAverage(a) => commands::class_average(a),
        Command::Features(a) => commands::features(a),
        Command::Train(a) => commands::train(a),
        Command::Eval(a) => commands::eval(a),
        Command::Sweep(a) => commands::sweep(a),
        Command::Synth(a) => commands::synth(a),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("hoss: {e}");
            ExitCode::from(exit_code(&e))
        }
    }
}
