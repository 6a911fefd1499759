//! `rescue`: replay scenarios, benchmark policies, work with request text
//! and run the dispatch service.

mod commands;
mod error;

use std::net::SocketAddr;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use rescue_core::{Policy, TimePoint};

#[derive(Parser)]
#[command(name = "rescue", version, about = "Disaster rescue dispatch tools")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Replay a scenario file under one policy and print the schedule.
    Replay(ReplayArgs),
    /// Compare policies and fleet sizes over seeded workloads.
    Bench(BenchArgs),
    /// Write a seeded synthetic scenario.
    Generate(GenerateArgs),
    /// Label request texts with a trained model.
    Classify(ClassifyArgs),
    /// Print cleaned tokens and auxiliary features of request texts.
    Features(TextInput),
    /// Train the text classifier.
    Train(TrainArgs),
    /// Run the dispatch HTTP service.
    Serve(ServeArgs),
}

#[derive(Args)]
pub struct ReplayArgs {
    #[arg(long)]
    pub scenario: PathBuf,
    #[arg(long, default_value = "hybrid")]
    pub policy: Policy,
    /// Replace the scenario's units with N default units.
    #[arg(long, value_parser = clap::value_parser!(u64).range(1..))]
    pub units: Option<u64>,
    /// Write the schedule document as JSON.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Args)]
pub struct BenchArgs {
    /// Bench spec JSON; built-in defaults when omitted.
    #[arg(long)]
    pub spec: Option<PathBuf>,
    #[arg(long, value_delimiter = ',')]
    pub policies: Vec<Policy>,
    #[arg(long, value_delimiter = ',', value_parser = clap::value_parser!(u64).range(1..))]
    pub units: Vec<u64>,
    #[arg(long, value_delimiter = ',')]
    pub seeds: Vec<u64>,
    /// Write the full report as JSON.
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Write every AWT(k) series as long-format CSV.
    #[arg(long)]
    pub csv: Option<PathBuf>,
}

#[derive(Args)]
pub struct GenerateArgs {
    /// Workload spec JSON; built-in defaults when omitted.
    #[arg(long)]
    pub spec: Option<PathBuf>,
    #[arg(long)]
    pub seed: Option<u64>,
    #[arg(long, value_parser = clap::value_parser!(u64).range(1..))]
    pub count: Option<u64>,
    #[arg(long, value_parser = clap::value_parser!(u64).range(1..))]
    pub units: Option<u64>,
    /// Output file; stdout when omitted.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Args)]
pub struct TextInput {
    /// Request text; repeatable.
    #[arg(long)]
    pub text: Vec<String>,
    /// File with one request per line; stdin when neither this nor --text is given.
    #[arg(long)]
    pub input: Option<PathBuf>,
}

#[derive(Args)]
pub struct ClassifyArgs {
    #[arg(long)]
    pub model: PathBuf,
    #[command(flatten)]
    pub input: TextInput,
    /// Score a labelled CSV corpus instead of classifying texts.
    #[arg(long, conflicts_with_all = ["text", "input"])]
    pub eval: Option<PathBuf>,
    /// Write the evaluation report as JSON.
    #[arg(long, requires = "eval")]
    pub out: Option<PathBuf>,
}

#[derive(Args)]
pub struct TrainArgs {
    /// Labelled CSV corpus (`text,rescue_needed,flood,water_needed,dcew,injured,sick`).
    #[arg(long, conflicts_with = "synthetic")]
    pub corpus: Option<PathBuf>,
    /// Train on a seeded synthetic corpus of this size.
    #[arg(long)]
    pub synthetic: Option<usize>,
    #[arg(long, default_value_t = 0.3)]
    pub positive_rate: f64,
    #[arg(long, default_value_t = 7)]
    pub seed: u64,
    #[arg(long)]
    pub epochs: Option<usize>,
    #[arg(long)]
    pub learning_rate: Option<f64>,
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Args)]
pub struct ServeArgs {
    #[arg(long, env = "RESCUE_LISTEN", default_value = "127.0.0.1:8080")]
    pub listen: SocketAddr,
    /// JSONL event log; replayed when it exists. In memory when omitted.
    #[arg(long, env = "RESCUE_LOG")]
    pub log: Option<PathBuf>,
    /// Scenario whose units and tasks seed a fresh log.
    #[arg(long, env = "RESCUE_SCENARIO")]
    pub scenario: Option<PathBuf>,
    #[arg(long, env = "RESCUE_MODEL")]
    pub model: Option<PathBuf>,
    /// Service clock at startup; defaults to the scenario start, else 00:00.
    #[arg(long)]
    pub start: Option<TimePoint>,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Replay(a) => commands::replay(a),
        Command::Bench(a) => commands::bench(a),
        Command::Generate(a) => commands::generate(a),
        Command::Classify(a) => commands::classify(a),
        Command::Features(a) => commands::features(a),
        Command::Train(a) => commands::train(a),
        Command::Serve(a) => commands::serve(a),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
