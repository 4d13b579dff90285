use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use serde_json::Value;
use whitham_cli::config::{ScenarioConfig, ScenarioName};
use whitham_cli::{output, scenarios, validate, CliError};

/// Whitham modulation theory for KdV: modulated waves, dispersive shocks and
/// direct simulations.
#[derive(Parser)]
#[command(name = "whitham", version)]
struct Cli {
    /// Worker threads (default: all cores).
    #[arg(long, global = true)]
    threads: Option<usize>,
    /// Log progress to stderr.
    #[arg(long, short, global = true)]
    verbose: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct RunArgs {
    /// Scenario config (JSON). Without it every field takes its default.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Output directory.
    #[arg(long, default_value = "out")]
    out: PathBuf,
}

#[derive(Subcommand)]
enum Command {
    /// Single-phase wave in its cn² and theta-function forms.
    Cnoidal(RunArgs),
    /// Self-similar modulated wave for step data against a direct run.
    GpStep(RunArgs),
    /// Modulation field and asymptotic profile after breaking.
    Dsw(RunArgs),
    /// Painlevé II layer at the trailing edge.
    Edge(RunArgs),
    /// Direct spectral simulation.
    Kdv(RunArgs),
    /// Direct simulation against the asymptotic profile.
    Compare(RunArgs),
    /// Zone edges over time with their near-breaking expansions.
    Edges(RunArgs),
    /// Check a config and print the resolved values without running it.
    Validate {
        /// Config with a `scenario` field.
        #[arg(long)]
        config: PathBuf,
    },
}

fn load(path: Option<&Path>, name: ScenarioName) -> Result<ScenarioConfig, CliError> {
    match path {
        Some(p) => ScenarioConfig::load(p, Some(name)),
        None => ScenarioConfig::from_value(Value::Object(Default::default()), Some(name)),
    }
}

/// Print to stdout, ignoring a closed pipe.
fn print_json(v: &Value) {
    let text = serde_json::to_string_pretty(v).expect("JSON serializes");
    let _ = writeln!(std::io::stdout(), "{text}");
}

fn run(name: ScenarioName, args: &RunArgs) -> Result<(), CliError> {
    let cfg = load(args.config.as_deref(), name)?;
    let warnings = validate::warnings(&cfg)?;
    for w in &warnings {
        log::warn!("{w}");
    }
    log::info!("running {name} (config {})", cfg.hash());
    let out = scenarios::run(&cfg)?;
    let meta = output::write_run(&args.out, &cfg, &out, &warnings)?;
    print_json(&meta["summary"]);
    log::info!("wrote {} files to {}", out.tables.len() + 1, args.out.display());
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let level = if cli.verbose { "info" } else { "warn" };
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or(level)).init();
    if let Some(n) = cli.threads {
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(n).build_global() {
            eprintln!("error: cannot start {n} threads: {e}");
            return ExitCode::from(2);
        }
    }
    let result = match &cli.command {
        Command::Cnoidal(a) => run(ScenarioName::Cnoidal, a),
        Command::GpStep(a) => run(ScenarioName::GpStep, a),
        Command::Dsw(a) => run(ScenarioName::Dsw, a),
        Command::Edge(a) => run(ScenarioName::Edge, a),
        Command::Kdv(a) => run(ScenarioName::Kdv, a),
        Command::Compare(a) => run(ScenarioName::Compare, a),
        Command::Edges(a) => run(ScenarioName::Edges, a),
        Command::Validate { config } => ScenarioConfig::load(config, None)
            .and_then(|cfg| validate::report(&cfg))
            .map(|r| print_json(&r)),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
