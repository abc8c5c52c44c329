//! Solver-versus-exhaustive-search comparison on a reduced scenario.

use serde::Serialize;

use crate::baselines::brute_force_oracle;
use crate::error::Result;
use crate::harness::config::ScenarioConfig;
use crate::harness::scenario::build_scenario;
use crate::objective::{worst_case_ratio, EveMode};
use crate::solver::dinkelbach_solve;

pub const ORACLE_ANTENNAS: usize = 2;
pub const ORACLE_GRID: usize = 2;
pub const ORACLE_PHASE_STEPS: usize = 720;
/// Relative gap always tolerated, on top of the smoothing gap `ln(G)/β`.
pub const ORACLE_REL_TOL: f64 = 0.05;

/// Two antennas, the first eavesdropper region on a 2×2 grid. The
/// per-antenna power is raised so the total transmit power stays that of the
/// full array.
pub fn oracle_scenario(cfg: &ScenarioConfig) -> Result<ScenarioConfig> {
    let full = cfg.satellite()?;
    let sat = full.truncated(ORACLE_ANTENNAS.min(full.num_antennas()))?;
    let n_full = full.num_antennas() as f64;
    let n = sat.num_antennas() as f64;
    Ok(ScenarioConfig {
        num_antennas: sat.num_antennas(),
        antenna_offsets_m: Some(sat.antenna_offsets_m().to_vec()),
        beam_centers_km: Some(sat.beam_centers().iter().map(|c| [c.x_km, c.y_km]).collect()),
        eve_centers_km: cfg.eve_centers_km[..1].to_vec(),
        grid_m1: ORACLE_GRID,
        grid_m2: ORACLE_GRID,
        power_dbmw: cfg.power_dbmw + 10.0 * (n_full / n).log10(),
        ..cfg.clone()
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct OracleCheck {
    pub oracle_objective: f64,
    pub solver_objective: f64,
    /// `(solver − oracle)/oracle`.
    pub relative_gap: f64,
    pub tolerance: f64,
    pub solver_converged: bool,
    pub passed: bool,
}

/// Compares the unsmoothed worst-case ratio of the Dinkelbach solution with
/// the exhaustive phase-grid optimum on [`oracle_scenario`].
pub fn oracle_check(cfg: &ScenarioConfig, mode: EveMode, seed: u64) -> Result<OracleCheck> {
    let small = oracle_scenario(cfg)?;
    let scenario = build_scenario(&small, mode, seed)?;
    let inst = &scenario.instance;
    let oracle = brute_force_oracle(inst, ORACLE_PHASE_STEPS)?;
    let sol = dinkelbach_solve(inst, &small.solver)?;
    let solver_objective = worst_case_ratio(sol.beamformer.weights(), inst);
    let relative_gap = (solver_objective - oracle.best_objective) / oracle.best_objective;
    let tolerance = ORACLE_REL_TOL.max((inst.grid_points() as f64).ln() / inst.beta);
    Ok(OracleCheck {
        oracle_objective: oracle.best_objective,
        solver_objective,
        relative_gap,
        tolerance,
        solver_converged: sol.converged,
        passed: relative_gap.abs() <= tolerance,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn reduced_scenario_keeps_total_power() {
        let cfg = ScenarioConfig::default();
        let small = oracle_scenario(&cfg).unwrap();
        assert_eq!(small.satellite().unwrap().num_antennas(), 2);
        assert_eq!(small.eve_centers_km.len(), 1);
        let total = |c: &ScenarioConfig| c.power_w() * c.satellite().unwrap().num_antennas() as f64;
        assert!((total(&small) - total(&cfg)).abs() < 1e-12);
    }
}
