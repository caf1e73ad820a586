mod commands;
mod table;

use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Instant;

use clap::{Parser, Subcommand};
use serde::de::DeserializeOwned;
use serde::Serialize;

use commands::{
    ClassifyArgs, ClusterArgs, DistanceArgs, FuseArgs, GenerateArgs, InterpolateArgs, MeanArgs, Output, SslArgs,
};

#[derive(Parser)]
#[command(name = "gbary", version, about = "Bures-Wasserstein means, distances and interpolation of weighted graphs")]
struct Cli {
    /// Worker threads for independent trials.
    #[arg(long, env = "GBARY_JOBS", global = true)]
    jobs: Option<usize>,
    /// JSON file with subcommand parameters; its values override flags.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Write the result to this file.
    #[arg(long, short, global = true, conflicts_with = "stdout")]
    output: Option<PathBuf>,
    /// Write the result to stdout (the default when no --output is given).
    #[arg(long, global = true)]
    stdout: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Draw a random graph.
    Generate(GenerateArgs),
    /// Weighted mean of graphs.
    Mean(MeanArgs),
    /// Pairwise distances between graphs.
    Distance(DistanceArgs),
    /// Points on the BW geodesic between two graphs.
    Interpolate(InterpolateArgs),
    /// K-means of graphs (files, or the synthetic community-count protocol).
    Cluster(ClusterArgs),
    /// Nearest-centroid classification on synthetic two-class SBM families.
    Classify(ClassifyArgs),
    /// Semi-supervised node classification on multi-layer graphs.
    Ssl(SslArgs),
    /// Graph fusion experiment: mean of perturbed copies vs. the original.
    FuseExperiment(FuseArgs),
}

#[derive(Debug)]
pub enum CliError {
    Invalid(String),
    Core(gbary::Error),
}

impl From<gbary::Error> for CliError {
    fn from(e: gbary::Error) -> Self {
        CliError::Core(e)
    }
}

impl CliError {
    fn exit_code(&self) -> u8 {
        match self {
            CliError::Core(gbary::Error::NotConverged { .. }) => 3,
            _ => 2,
        }
    }
}

impl std::fmt::Display for CliError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            CliError::Invalid(m) => f.write_str(m),
            CliError::Core(e) => write!(f, "{e}"),
        }
    }
}

/// Overlays the keys of a JSON config file on the flag values.
fn with_config<T: Serialize + DeserializeOwned>(args: T, path: Option<&Path>) -> Result<T, CliError> {
    let Some(path) = path else { return Ok(args) };
    let text = std::fs::read_to_string(path).map_err(|e| CliError::Invalid(format!("{}: {e}", path.display())))?;
    let overrides: serde_json::Value =
        serde_json::from_str(&text).map_err(|e| CliError::Invalid(format!("{}: {e}", path.display())))?;
    let serde_json::Value::Object(overrides) = overrides else {
        return Err(CliError::Invalid(format!("{}: expected a JSON object", path.display())));
    };
    let mut merged = serde_json::to_value(args).expect("arguments serialize");
    let fields = merged.as_object_mut().expect("arguments are a struct");
    for (k, v) in overrides {
        if !fields.contains_key(&k) {
            return Err(CliError::Invalid(format!("{}: unknown parameter `{k}`", path.display())));
        }
        fields.insert(k, v);
    }
    serde_json::from_value(merged).map_err(|e| CliError::Invalid(format!("{}: {e}", path.display())))
}

fn run(cli: Cli) -> Result<(), CliError> {
    if let Some(jobs) = cli.jobs {
        if jobs == 0 {
            return Err(CliError::Invalid("--jobs must be at least 1".into()));
        }
        rayon::ThreadPoolBuilder::new()
            .num_threads(jobs)
            .build_global()
            .map_err(|e| CliError::Invalid(e.to_string()))?;
    }
    let config = cli.config.as_deref();
    let output = match cli.command {
        Command::Generate(a) => commands::generate(&with_config(a, config)?)?,
        Command::Mean(a) => commands::mean(&with_config(a, config)?)?,
        Command::Distance(a) => commands::distance(&with_config(a, config)?)?,
        Command::Interpolate(a) => commands::interpolate_path(&with_config(a, config)?)?,
        Command::Cluster(a) => commands::cluster(&with_config(a, config)?)?,
        Command::Classify(a) => commands::classify(&with_config(a, config)?)?,
        Command::Ssl(a) => commands::ssl(&with_config(a, config)?)?,
        Command::FuseExperiment(a) => commands::fuse(&with_config(a, config)?)?,
    };
    let text = match output {
        Output::Table(t) => t.to_csv(),
        Output::Text(s) => s,
    };
    match &cli.output {
        Some(path) => std::fs::write(path, text).map_err(|e| CliError::Invalid(format!("{}: {e}", path.display()))),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let start = Instant::now();
    let result = run(cli);
    eprintln!("wall time {:.3}s", start.elapsed().as_secs_f64());
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
