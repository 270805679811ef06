use std::fs;
use std::io::Write as _;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use teamsim::calibration::{calibrated_config, parse_bibliography, profiles_to_params, team_profiles};
use teamsim::config::parse_override;
use teamsim::engine::DEFAULT_WINDOW;
use teamsim::export::load_graph;
use teamsim::fixtures::{generate, Manifest};
use teamsim::metrics::{component_census, giant_component_pct, interdisciplinary_pct};
use teamsim::runner::{self, ExperimentSpec, DEFAULT_BURN_IN};
use teamsim::{calibration, ModelParams};

#[derive(Parser)]
#[command(name = "teamsim", version, about = "Two-culture team assembly simulator")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run one simulation and write its metric series and final network.
    Simulate {
        config: PathBuf,
        #[arg(long, default_value_t = 1500)]
        ticks: u64,
        #[arg(long, default_value = ".")]
        out: PathBuf,
        /// Override a config key, e.g. `--set mixing=0.46`. Repeatable.
        #[arg(long = "set", value_name = "KEY=VALUE")]
        overrides: Vec<String>,
    },
    /// Replicated runs over a list of mixing values.
    Sweep {
        config: PathBuf,
        /// Comma-separated mixing values; defaults to the config's `mixing`.
        #[arg(long, value_delimiter = ',')]
        mixing: Vec<f64>,
        #[arg(long, default_value_t = 100)]
        replicates: u32,
        #[arg(long, default_value_t = 1500)]
        ticks: u64,
        #[arg(long, default_value = ".")]
        out: PathBuf,
        /// Maximum concurrent replicates. Does not affect output.
        #[arg(long)]
        jobs: Option<usize>,
        #[arg(long = "set", value_name = "KEY=VALUE")]
        overrides: Vec<String>,
    },
    /// Estimate assembly parameters from a bibliography CSV.
    Calibrate {
        bibliography: PathBuf,
        defaults: PathBuf,
        #[arg(long)]
        out: PathBuf,
    },
    /// Giant-component, interdisciplinary and census figures of a static graph.
    Metrics { edges: PathBuf, cultures: PathBuf },
    /// Generate a synthetic bibliography from a template manifest.
    Fixtures {
        manifest: PathBuf,
        #[arg(long)]
        out: PathBuf,
        /// Replaces the manifest's seed.
        #[arg(long)]
        seed: Option<u64>,
    },
}

/// Exit 1 for invalid input, exit 2 for I/O failures.
enum Failure {
    Invalid(String),
    Io(String),
}

impl Failure {
    fn code(&self) -> u8 {
        match self {
            Failure::Invalid(_) => 1,
            Failure::Io(_) => 2,
        }
    }
}

type CliResult = Result<(), Failure>;

fn read(path: &Path) -> Result<String, Failure> {
    fs::read_to_string(path).map_err(|e| Failure::Io(format!("{}: {e}", path.display())))
}

fn write(path: &Path, contents: &str) -> CliResult {
    fs::write(path, contents).map_err(|e| Failure::Io(format!("{}: {e}", path.display())))
}

fn load_params(config: &Path, overrides: &[String]) -> Result<ModelParams, Failure> {
    let text = read(config)?;
    let invalid = |e: teamsim::config::ConfigError| Failure::Invalid(format!("{}: {e}", config.display()));
    let mut params = ModelParams::from_config(&text).map_err(invalid)?;
    for arg in overrides {
        let (key, value) = parse_override(arg).map_err(|_| Failure::Invalid(format!("--set {arg}: expected KEY=VALUE")))?;
        params
            .set(&key, &value)
            .map_err(|e| Failure::Invalid(format!("--set {arg}: {e}")))?;
    }
    params.validate().map_err(|e| Failure::Invalid(e.to_string()))?;
    Ok(params)
}

fn simulate(config: &Path, ticks: u64, out: &Path, overrides: &[String]) -> CliResult {
    let params = load_params(config, overrides)?;
    if ticks == 0 {
        return Err(Failure::Invalid("--ticks must be at least 1".into()));
    }
    let run = runner::run_replicate(&params, 0, 0, ticks, DEFAULT_WINDOW);
    fs::create_dir_all(out).map_err(|e| Failure::Io(format!("{}: {e}", out.display())))?;
    runner::write_replicate(out, &run).map_err(|e| Failure::Io(format!("{}: {e}", out.display())))
}

#[allow(clippy::too_many_arguments)]
fn sweep(
    config: &Path,
    mixing: Vec<f64>,
    replicates: u32,
    ticks: u64,
    out: &Path,
    jobs: Option<usize>,
    overrides: &[String],
) -> CliResult {
    let params = load_params(config, overrides)?;
    let mixing_values = if mixing.is_empty() { vec![params.mixing] } else { mixing };
    let spec = ExperimentSpec {
        params,
        ticks,
        replicates,
        mixing_values,
        metrics_window: DEFAULT_WINDOW,
    };
    let result = runner::run_experiment(&spec, jobs).map_err(|e| Failure::Invalid(e.to_string()))?;
    let burn_in = DEFAULT_BURN_IN.min(ticks - 1);
    runner::write_experiment(out, &result, burn_in).map_err(|e| match e {
        runner::WriteError::Io(e) => Failure::Io(format!("{}: {e}", out.display())),
        runner::WriteError::Runner(e) => Failure::Invalid(e.to_string()),
    })
}

fn calibrate(bibliography: &Path, defaults: &Path, out: &Path) -> CliResult {
    let records = parse_bibliography(&read(bibliography)?)
        .map_err(|e| Failure::Invalid(format!("{}: {e}", bibliography.display())))?;
    let defaults_params = load_params(defaults, &[])?;
    let profiles = team_profiles(&records).map_err(|e| Failure::Invalid(e.to_string()))?;

    let mut stdout = std::io::stdout().lock();
    let _ = writeln!(
        stdout,
        "{:<10} {:>6} {:>14} {:>22} {:>19}",
        "culture", "teams", "avg_team_size", "avg_internal_fraction", "pct_2plus_internal"
    );
    for (_, p) in profiles.iter() {
        let _ = writeln!(
            stdout,
            "{:<10} {:>6} {:>14.4} {:>22.4} {:>19.2}",
            p.culture.as_str(),
            p.team_count,
            p.avg_team_size,
            p.avg_internal_fraction,
            p.pct_teams_with_2plus_internal
        );
    }

    let params = profiles_to_params(&profiles, &defaults_params).map_err(|e| Failure::Invalid(e.to_string()))?;
    write(out, &calibrated_config(&params, &bibliography.display().to_string()))
}

fn metrics(edges: &Path, cultures: &Path) -> CliResult {
    let (graph, _) = load_graph(&read(edges)?, &read(cultures)?).map_err(|e| Failure::Invalid(e.to_string()))?;
    let mut stdout = std::io::stdout().lock();
    let _ = writeln!(stdout, "active_agents = {}", graph.len());
    let _ = writeln!(stdout, "pct_giant = {:.2}", giant_component_pct(&graph));
    let _ = writeln!(stdout, "pct_interdisciplinary = {:.2}", interdisciplinary_pct(&graph));
    let _ = writeln!(stdout, "census (size,basic_count,clinical_count):");
    for c in component_census(&graph) {
        let _ = writeln!(stdout, "{},{},{}", c.size, c.basic, c.clinical);
    }
    Ok(())
}

fn fixtures(manifest: &Path, out: &Path, seed: Option<u64>) -> CliResult {
    let mut m = Manifest::parse(&read(manifest)?).map_err(|e| Failure::Invalid(format!("{}: {e}", manifest.display())))?;
    if let Some(seed) = seed {
        m.seed = seed;
    }
    let records = generate(&m);
    write(out, &calibration::write_bibliography(&records))?;
    eprintln!("wrote {} papers to {}", records.len(), out.display());
    Ok(())
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("info"))
        .format_timestamp(None)
        .format_target(false)
        .init();
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Simulate { config, ticks, out, overrides } => simulate(&config, ticks, &out, &overrides),
        Command::Sweep {
            config,
            mixing,
            replicates,
            ticks,
            out,
            jobs,
            overrides,
        } => sweep(&config, mixing, replicates, ticks, &out, jobs, &overrides),
        Command::Calibrate { bibliography, defaults, out } => calibrate(&bibliography, &defaults, &out),
        Command::Metrics { edges, cultures } => metrics(&edges, &cultures),
        Command::Fixtures { manifest, out, seed } => fixtures(&manifest, &out, seed),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            match &f {
                Failure::Invalid(msg) | Failure::Io(msg) => eprintln!("error: {msg}"),
            }
            ExitCode::from(f.code())
        }
    }
}
