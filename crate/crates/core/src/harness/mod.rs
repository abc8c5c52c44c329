//! Experiment configs, sweeps, and CSV output.

pub mod beampattern;
pub mod config;
pub mod experiment;
pub mod oracle;
pub mod scenario;

pub use beampattern::{emit_beampattern, received_power_db, BeamSample};
pub use config::{parse_config, ExperimentSpec, ScenarioConfig, Scheme, Sweep};
pub use experiment::{
    run_experiment, solve_scheme, write_beampattern, write_results, ExperimentResults, ResultRow, RowOutcome,
    RowStatus, SchemeOutcome, TraceRow,
};
pub use oracle::{oracle_check, OracleCheck};
pub use scenario::{build_scenario, BuiltScenario};
