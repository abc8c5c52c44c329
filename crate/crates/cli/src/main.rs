use clap::{Args, Parser, Subcommand};
use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use satsec::harness::experiment::ExperimentResults;
use satsec::harness::oracle::oracle_check;
use satsec::harness::{
    emit_beampattern, parse_config, run_experiment, solve_scheme, write_beampattern, write_results, ExperimentSpec,
    RowStatus, Scheme, Sweep,
};
use satsec::harness::scenario::build_scenario;
use satsec::objective::EveMode;
use satsec::Error;

const EXIT_FAILURE: u8 = 1;
const EXIT_CONFIG: u8 = 2;
const EXIT_INFEASIBLE: u8 = 3;
const EXIT_NOT_CONVERGED: u8 = 4;

/// Robust secrecy beamforming experiments for multibeam satellite downlinks.
#[derive(Parser)]
#[command(name = "satsec", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Solve the configured scenario once (any sweep in the config is ignored).
    Solve(Common),
    /// Run the sweep from the config.
    Sweep(Common),
    /// Solve once and write beampattern.csv for the first listed scheme.
    Beampattern {
        #[command(flatten)]
        common: Common,
        /// Samples per axis; overrides the config.
        #[arg(long)]
        resolution: Option<usize>,
    },
    /// Print the default configuration as JSON.
    PrintDefaults,
    /// Compare the solver with exhaustive phase search on a 2-antenna reduction.
    OracleCheck(Common),
}

#[derive(Args)]
struct Common {
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long, value_parser = parse_mode)]
    mode: Option<EveMode>,
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long)]
    seed: Option<u64>,
    /// Comma-separated subset of robust,mrt,nonrobust.
    #[arg(long, value_delimiter = ',')]
    schemes: Option<Vec<Scheme>>,
    /// Leave solve_ms empty so repeated runs give identical files.
    #[arg(long)]
    no_timing: bool,
}

fn parse_mode(s: &str) -> Result<EveMode, String> {
    match s.to_ascii_lowercase().as_str() {
        "ue" => Ok(EveMode::Ue),
        "ce" => Ok(EveMode::Ce),
        other => Err(format!("expected ue or ce, got `{other}`")),
    }
}

impl Common {
    fn spec(&self) -> satsec::Result<ExperimentSpec> {
        let mut spec = match &self.config {
            Some(path) => parse_config(path).map_err(|e| match e {
                Error::Io(io) => Error::Config {
                    field: "--config".into(),
                    reason: format!("{}: {io}", path.display()),
                },
                other => other,
            })?,
            None => ExperimentSpec::default(),
        };
        if let Some(mode) = self.mode {
            spec.mode = mode;
        }
        if let Some(out) = &self.out {
            spec.output_dir = out.clone();
        }
        if let Some(seed) = self.seed {
            spec.seed = seed;
        }
        if let Some(schemes) = &self.schemes {
            spec.schemes = schemes.clone();
        }
        if self.no_timing {
            spec.record_timing = false;
        }
        spec.validate()?;
        Ok(spec)
    }
}

fn exit_code(err: &Error) -> u8 {
    match err {
        Error::Config { .. } | Error::Parse { .. } => EXIT_CONFIG,
        Error::Infeasible(_) => EXIT_INFEASIBLE,
        _ => EXIT_FAILURE,
    }
}

fn report(results: &ExperimentResults) -> u8 {
    for r in &results.rows {
        let row = &r.row;
        let fmt = |v: Option<f64>| v.map_or("-".to_string(), |x| format!("{x:.4}"));
        println!(
            "{:>8} {:>9} {} asr={} dense={} slack={} status={:?}",
            row.sweep_var,
            row.scheme.as_str(),
            row.mode,
            fmt(row.asr_worst),
            fmt(row.asr_worst_dense),
            fmt(row.qos_slack),
            row.status,
        );
    }
    if results.any_status(RowStatus::Infeasible) {
        EXIT_INFEASIBLE
    } else if results.any_status(RowStatus::NotConverged) {
        EXIT_NOT_CONVERGED
    } else if results.any_status(RowStatus::Error) {
        EXIT_FAILURE
    } else {
        0
    }
}

fn run_rows(spec: &ExperimentSpec) -> satsec::Result<u8> {
    let results = run_experiment(spec)?;
    write_results(&spec.output_dir, &results)?;
    let code = report(&results);
    println!("wrote {}", spec.output_dir.join("results.csv").display());
    Ok(code)
}

fn run(cli: Cli) -> satsec::Result<u8> {
    match cli.command {
        Command::PrintDefaults => {
            // A closed pipe (e.g. `| head`) is not an error worth reporting.
            let _ = writeln!(std::io::stdout(), "{}", ExperimentSpec::default().to_json());
            Ok(0)
        }
        Command::Solve(common) => {
            let spec = ExperimentSpec {
                sweep: Sweep::None,
                ..common.spec()?
            };
            run_rows(&spec)
        }
        Command::Sweep(common) => run_rows(&common.spec()?),
        Command::Beampattern { common, resolution } => {
            let spec = common.spec()?;
            let resolution = resolution.unwrap_or(spec.beampattern_resolution);
            if resolution == 0 {
                return Err(Error::Config {
                    field: "--resolution".into(),
                    reason: "must be >= 1".into(),
                });
            }
            let scheme = spec.schemes[0];
            let scenario = build_scenario(&spec.scenario, spec.mode, spec.seed)?;
            let out = solve_scheme(scheme, &scenario, &spec.scenario.solver)?;
            let samples = emit_beampattern(&out.beamformer, &scenario, resolution)?;
            let path = spec.output_dir.join("beampattern.csv");
            write_beampattern(&path, &samples)?;
            println!("wrote {} ({} scheme, {} samples)", path.display(), scheme.as_str(), samples.len());
            let converged = out.solution.as_ref().is_none_or(|s| s.converged);
            Ok(if converged { 0 } else { EXIT_NOT_CONVERGED })
        }
        Command::OracleCheck(common) => {
            let spec = common.spec()?;
            let check = oracle_check(&spec.scenario, spec.mode, spec.seed)?;
            println!(
                "oracle {:.6e} solver {:.6e} gap {:+.3}% tolerance {:.3}% -> {}",
                check.oracle_objective,
                check.solver_objective,
                100.0 * check.relative_gap,
                100.0 * check.tolerance,
                if check.passed { "PASS" } else { "FAIL" },
            );
            Ok(if check.passed { 0 } else { EXIT_FAILURE })
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(exit_code(&e))
        }
    }
}
