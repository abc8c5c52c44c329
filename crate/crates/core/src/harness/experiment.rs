//! Sweeps over scenarios and schemes, and their CSV output.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use std::fs::{self, File};
use std::path::Path;
use std::time::Instant;

use crate::baselines::{mrt_bf, nonrobust_bf};
use crate::error::{Error, Result};
use crate::harness::beampattern::BeamSample;
use crate::harness::config::{ExperimentSpec, ScenarioConfig, Scheme, Sweep};
use crate::harness::scenario::{build_scenario, BuiltScenario};
use crate::objective::{asr, Beamformer, EveMode};
use crate::solver::{dinkelbach_solve, init_w, qos_slack, Solution, SolverParams, SolverTrace};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RowStatus {
    Ok,
    NotConverged,
    Infeasible,
    Error,
}

/// One line of `results.csv`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ResultRow {
    /// Value of the swept variable, or `none`.
    pub sweep_var: String,
    pub scheme: Scheme,
    pub mode: EveMode,
    pub asr_worst: Option<f64>,
    pub asr_worst_dense: Option<f64>,
    pub qos_slack: Option<f64>,
    pub iters_outer: usize,
    pub iters_inner_total: usize,
    pub solve_ms: Option<f64>,
    pub status: RowStatus,
}

/// One line of `trace_<row>.csv`: a single inner ADMM iteration.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TraceRow {
    pub outer: usize,
    pub inner: usize,
    pub eta: f64,
    pub residual: f64,
    pub lagrangian: f64,
    pub qos_slack: f64,
    pub lipschitz: f64,
}

pub fn trace_rows(trace: &SolverTrace) -> Vec<TraceRow> {
    trace
        .inner
        .iter()
        .map(|r| TraceRow {
            outer: r.outer,
            inner: r.iteration,
            eta: trace.outer[r.outer].eta,
            residual: r.residual,
            lagrangian: r.lagrangian,
            qos_slack: r.qos_slack,
            lipschitz: r.lipschitz,
        })
        .collect()
}

/// A scheme's output on one scenario.
#[derive(Debug, Clone, PartialEq)]
pub struct SchemeOutcome {
    pub beamformer: Beamformer,
    /// `None` for MRT.
    pub solution: Option<Solution>,
    pub solve_ms: f64,
}

/// Runs one scheme. Timing covers the solver only.
pub fn solve_scheme(scheme: Scheme, scenario: &BuiltScenario, params: &SolverParams) -> Result<SchemeOutcome> {
    let inst = &scenario.instance;
    let start = Instant::now();
    let (beamformer, solution) = match scheme {
        Scheme::Mrt => {
            init_w(inst)?;
            (mrt_bf(inst)?, None)
        }
        Scheme::Robust => {
            let s = dinkelbach_solve(inst, params)?;
            (s.beamformer.clone(), Some(s))
        }
        Scheme::Nonrobust => {
            let s = nonrobust_bf(inst, params)?;
            (s.beamformer.clone(), Some(s))
        }
    };
    Ok(SchemeOutcome {
        beamformer,
        solution,
        solve_ms: start.elapsed().as_secs_f64() * 1e3,
    })
}

/// A row with its beamformer and iteration trace.
#[derive(Debug, Clone, PartialEq)]
pub struct RowOutcome {
    pub row: ResultRow,
    pub beamformer: Option<Beamformer>,
    pub trace: Vec<TraceRow>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentResults {
    pub rows: Vec<RowOutcome>,
}

impl ExperimentResults {
    pub fn any_status(&self, status: RowStatus) -> bool {
        self.rows.iter().any(|r| r.row.status == status)
    }
}

/// `(sweep_var label, scenario)` per sweep point.
pub fn sweep_points(spec: &ExperimentSpec) -> Vec<(String, ScenarioConfig)> {
    let base = &spec.scenario;
    match &spec.sweep {
        Sweep::None => vec![("none".to_string(), base.clone())],
        Sweep::PowerDbmw(v) => v
            .iter()
            .map(|&x| (x.to_string(), ScenarioConfig { power_dbmw: x, ..base.clone() }))
            .collect(),
        Sweep::RegionEdgeKm(v) => v
            .iter()
            .map(|&x| (x.to_string(), ScenarioConfig { edge_km: x, ..base.clone() }))
            .collect(),
        Sweep::GridDensity(v) => v
            .iter()
            .map(|&m| {
                (
                    m.to_string(),
                    ScenarioConfig {
                        grid_m1: m,
                        grid_m2: m,
                        ..base.clone()
                    },
                )
            })
            .collect(),
    }
}

fn failed_row(label: &str, scheme: Scheme, mode: EveMode, status: RowStatus) -> RowOutcome {
    RowOutcome {
        row: ResultRow {
            sweep_var: label.to_string(),
            scheme,
            mode,
            asr_worst: None,
            asr_worst_dense: None,
            qos_slack: None,
            iters_outer: 0,
            iters_inner_total: 0,
            solve_ms: None,
            status,
        },
        beamformer: None,
        trace: Vec::new(),
    }
}

fn run_point(spec: &ExperimentSpec, label: &str, cfg: &ScenarioConfig, seed: u64) -> Vec<RowOutcome> {
    let scenario = match build_scenario(cfg, spec.mode, seed) {
        Ok(s) => s,
        Err(_) => {
            return spec
                .schemes
                .iter()
                .map(|&s| failed_row(label, s, spec.mode, RowStatus::Error))
                .collect()
        }
    };
    spec.schemes
        .iter()
        .map(|&scheme| match solve_scheme(scheme, &scenario, &cfg.solver) {
            Err(Error::Infeasible(_)) => failed_row(label, scheme, spec.mode, RowStatus::Infeasible),
            Err(_) => failed_row(label, scheme, spec.mode, RowStatus::Error),
            Ok(out) => {
                let w = out.beamformer.weights();
                let (iters_outer, iters_inner_total, converged, trace) = match &out.solution {
                    Some(s) => (
                        s.trace.outer.len(),
                        s.trace.inner_iterations_total(),
                        s.converged,
                        trace_rows(&s.trace),
                    ),
                    None => (0, 0, true, Vec::new()),
                };
                RowOutcome {
                    row: ResultRow {
                        sweep_var: label.to_string(),
                        scheme,
                        mode: spec.mode,
                        asr_worst: Some(asr(w, &scenario.instance)),
                        asr_worst_dense: Some(asr(w, &scenario.dense)),
                        qos_slack: Some(qos_slack(w, &scenario.instance)),
                        iters_outer,
                        iters_inner_total,
                        solve_ms: spec.record_timing.then_some(out.solve_ms),
                        status: if converged { RowStatus::Ok } else { RowStatus::NotConverged },
                    },
                    beamformer: Some(out.beamformer),
                    trace,
                }
            }
        })
        .collect()
}

/// Solves every scheme at every sweep point.
///
/// Sweep point `i` uses seed `spec.seed + i`, shared by all schemes at that
/// point so they face the same channels. Points run concurrently; rows come
/// back in sweep order, schemes in the order listed.
pub fn run_experiment(spec: &ExperimentSpec) -> Result<ExperimentResults> {
    spec.validate()?;
    let points = sweep_points(spec);
    let rows = points
        .par_iter()
        .enumerate()
        .map(|(i, (label, cfg))| run_point(spec, label, cfg, spec.seed.wrapping_add(i as u64)))
        .collect::<Vec<_>>()
        .into_iter()
        .flatten()
        .collect();
    Ok(ExperimentResults { rows })
}

fn write_csv<T: Serialize>(path: &Path, rows: &[T], header: &[&str]) -> Result<()> {
    let mut wtr = csv::WriterBuilder::new().has_headers(false).from_writer(File::create(path)?);
    wtr.write_record(header)?;
    for r in rows {
        wtr.serialize(r)?;
    }
    wtr.flush()?;
    Ok(())
}

pub const RESULTS_HEADER: [&str; 10] = [
    "sweep_var",
    "scheme",
    "mode",
    "asr_worst",
    "asr_worst_dense",
    "qos_slack",
    "iters_outer",
    "iters_inner_total",
    "solve_ms",
    "status",
];
pub const TRACE_HEADER: [&str; 7] = ["outer", "inner", "eta", "residual", "lagrangian", "qos_slack", "lipschitz"];
pub const BEAMPATTERN_HEADER: [&str; 3] = ["x_km", "y_km", "power_db"];

/// Writes `results.csv` and one `trace_<row>.csv` per solver row into `dir`.
pub fn write_results(dir: &Path, results: &ExperimentResults) -> Result<()> {
    fs::create_dir_all(dir)?;
    let rows: Vec<&ResultRow> = results.rows.iter().map(|r| &r.row).collect();
    write_csv(&dir.join("results.csv"), &rows, &RESULTS_HEADER)?;
    for (i, r) in results.rows.iter().enumerate() {
        if !r.trace.is_empty() {
            write_csv(&dir.join(format!("trace_{i}.csv")), &r.trace, &TRACE_HEADER)?;
        }
    }
    Ok(())
}

pub fn write_beampattern(path: &Path, samples: &[BeamSample]) -> Result<()> {
    if let Some(parent) = path.parent() {
        fs::create_dir_all(parent)?;
    }
    write_csv(path, samples, &BEAMPATTERN_HEADER)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn quick_spec() -> ExperimentSpec {
        let mut spec = ExperimentSpec::default();
        spec.scenario.grid_m1 = 3;
        spec.scenario.grid_m2 = 3;
        spec.record_timing = false;
        spec
    }

    #[test]
    fn mrt_only_row_matches_direct_asr() {
        let spec = ExperimentSpec {
            schemes: vec![Scheme::Mrt],
            ..quick_spec()
        };
        let res = run_experiment(&spec).unwrap();
        assert_eq!(res.rows.len(), 1);
        let s = build_scenario(&spec.scenario, spec.mode, spec.seed).unwrap();
        let want = asr(mrt_bf(&s.instance).unwrap().weights(), &s.instance);
        assert_eq!(res.rows[0].row.asr_worst, Some(want));
        assert_eq!(res.rows[0].row.status, RowStatus::Ok);
    }

    #[test]
    fn power_sweep_echoes_values() {
        let spec = ExperimentSpec {
            sweep: Sweep::PowerDbmw(vec![20.0, 25.0, 30.0]),
            schemes: vec![Scheme::Mrt, Scheme::Robust],
            ..quick_spec()
        };
        let res = run_experiment(&spec).unwrap();
        let labels: Vec<&str> = res.rows.iter().map(|r| r.row.sweep_var.as_str()).collect();
        assert_eq!(labels, ["20", "20", "25", "25", "30", "30"]);
    }

    #[test]
    fn infeasible_point_does_not_stop_the_run() {
        let spec = ExperimentSpec {
            sweep: Sweep::PowerDbmw(vec![-20.0, 30.0]),
            schemes: vec![Scheme::Robust, Scheme::Mrt],
            ..quick_spec()
        };
        let res = run_experiment(&spec).unwrap();
        assert_eq!(res.rows[0].row.status, RowStatus::Infeasible);
        assert_eq!(res.rows[1].row.status, RowStatus::Infeasible);
        assert_eq!(res.rows[0].row.asr_worst, None);
        assert_eq!(res.rows[2].row.status, RowStatus::Ok);
        assert!(res.any_status(RowStatus::Infeasible));
    }

    #[test]
    fn csv_layout() {
        let dir = tempfile::tempdir().unwrap();
        let spec = ExperimentSpec {
            schemes: vec![Scheme::Robust, Scheme::Mrt],
            ..quick_spec()
        };
        let res = run_experiment(&spec).unwrap();
        write_results(dir.path(), &res).unwrap();
        let text = fs::read_to_string(dir.path().join("results.csv")).unwrap();
        let mut lines = text.lines();
        assert_eq!(lines.next().unwrap(), RESULTS_HEADER.join(","));
        let robust = lines.next().unwrap();
        assert!(robust.starts_with("none,robust,ue,"));
        assert!(robust.ends_with(",,ok"));
        assert!(dir.path().join("trace_0.csv").exists());
        assert!(!dir.path().join("trace_1.csv").exists());
    }
}
