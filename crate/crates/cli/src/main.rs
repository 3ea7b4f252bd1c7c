use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use plab::{run_with_threads, Experiment, ExperimentConfig, FileConfig, Params, RunError};

/// Numerical experiments on induced Markov models: tails, pressure,
/// transfer-operator spectra, renewal sequences and last-visit laws.
#[derive(Parser, Debug)]
#[command(name = "plab", version)]
struct Cli {
    /// TOML file with shared keys and per-experiment tables.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Directory for the JSON report and CSV tables.
    #[arg(long, global = true)]
    out_dir: Option<PathBuf>,
    /// Worker threads (results do not depend on this).
    #[arg(long, global = true, env = "PLAB_THREADS")]
    threads: Option<usize>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Dyck-path counts against Catalan numbers.
    CatalanCheck(Params),
    /// Return-time tails of the Stratmann-Vogt model.
    SvTails(Params),
    /// Induced pressure root u0(t) for the Stratmann-Vogt model.
    SvPressure(Params),
    /// Return-time tails of the Fibonacci-clocked walk.
    FibTails(Params),
    /// Pressure of the Fibonacci-clocked walk near t = 1.
    FibPressure(Params),
    /// Pomeau-Manneville induced model.
    PmModel(Params),
    /// Interval map with a flat critical point.
    FlatModel(Params),
    /// Leading eigenvalue asymptotics of the perturbed operator.
    EigenAsym(Params),
    /// Pressure relation between u0(s) and the potential.
    Relation(Params),
    /// Scaling of the derivative of the pressure in s.
    PiScaling(Params),
    /// Renewal sequence asymptotics, with and without drift.
    Renewal(Params),
    /// Decay of correlations for class observables.
    Correlation(Params),
    /// Last-visit law against the generalized arcsine law.
    Arcsine(Params),
    /// Expected return time under the equilibrium state.
    EtauScaling(Params),
    /// Distance between the drifted and undrifted measures.
    MeasureDistance(Params),
}

impl Command {
    fn split(self) -> (Experiment, Params) {
        use Command::*;
        match self {
            CatalanCheck(p) => (Experiment::CatalanCheck, p),
            SvTails(p) => (Experiment::SvTails, p),
            SvPressure(p) => (Experiment::SvPressure, p),
            FibTails(p) => (Experiment::FibTails, p),
            FibPressure(p) => (Experiment::FibPressure, p),
            PmModel(p) => (Experiment::PmModel, p),
            FlatModel(p) => (Experiment::FlatModel, p),
            EigenAsym(p) => (Experiment::EigenAsym, p),
            Relation(p) => (Experiment::Relation, p),
            PiScaling(p) => (Experiment::PiScaling, p),
            Renewal(p) => (Experiment::Renewal, p),
            Correlation(p) => (Experiment::Correlation, p),
            Arcsine(p) => (Experiment::Arcsine, p),
            EtauScaling(p) => (Experiment::EtauScaling, p),
            MeasureDistance(p) => (Experiment::MeasureDistance, p),
        }
    }
}

fn resolve(cli: Cli) -> Result<ExperimentConfig, RunError> {
    let (experiment, params) = cli.command.split();
    let file = match &cli.config {
        Some(path) => FileConfig::load(path)?,
        None => FileConfig::default(),
    };
    let mut config = ExperimentConfig::new(experiment).with(file.params_for(experiment)).with(params);
    config.threads = cli.threads.or(file.threads);
    config.out_dir = cli.out_dir.or(file.out_dir);
    Ok(config)
}

fn execute(config: &ExperimentConfig) -> Result<(), RunError> {
    let report = run_with_threads(config)?;
    println!("{}", report.to_json());
    if let Some(dir) = &config.out_dir {
        for path in report.write_files(dir)? {
            eprintln!("wrote {}", path.display());
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let config = match resolve(cli) {
        Ok(c) => c,
        Err(e) => return fail(&e, None),
    };
    match execute(&config) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => fail(&e, config.out_dir.as_deref()),
    }
}

fn fail(e: &RunError, out_dir: Option<&std::path::Path>) -> ExitCode {
    eprintln!("plab: {e}");
    if let RunError::Numerical { .. } = e {
        let diag = serde_json::to_string_pretty(e).unwrap_or_default();
        println!("{diag}");
        if let Some(dir) = out_dir {
            if std::fs::create_dir_all(dir).is_ok() {
                let _ = std::fs::write(dir.join("diagnostic.json"), &diag);
            }
        }
    }
    ExitCode::from(e.exit_code() as u8)
}
