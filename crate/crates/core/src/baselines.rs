//! Comparison beamformers and an exhaustive phase-grid oracle.

use num_complex::Complex64;
use rayon::prelude::*;
use std::f64::consts::PI;

use crate::cvec::{norm_sqr, quad_form};
use crate::error::{Error, Result};
use crate::objective::{worst_case_ratio, Beamformer, ProblemInstance};
use crate::solver::{dinkelbach_solve, Solution, SolverParams};

/// Largest antenna count the oracle will enumerate.
pub const ORACLE_MAX_ANTENNAS: usize = 3;
/// Largest phase grid per antenna the oracle accepts.
pub const ORACLE_MAX_STEPS: usize = 720;

/// Maximum-ratio transmission under per-antenna power: every antenna at
/// `√p` with the phase of the LU channel entry.
pub fn mrt_bf(inst: &ProblemInstance) -> Result<Beamformer> {
    if norm_sqr(&inst.h_tilde_s) == 0.0 {
        return Err(Error::domain("MRT undefined for a zero LU channel"));
    }
    let amp = inst.p.sqrt();
    Beamformer::new(
        inst.h_tilde_s
            .iter()
            .map(|h| Complex64::from_polar(amp, h.arg()))
            .collect(),
        inst.p,
    )
}

/// The instance a non-robust design sees: each uncertainty region shrunk
/// to its center.
pub fn nominal_instance(inst: &ProblemInstance) -> ProblemInstance {
    ProblemInstance {
        eve_grids: inst.eve_grids.iter().map(|g| g.collapsed_to_center()).collect(),
        ..inst.clone()
    }
}

/// Same algorithm as the robust design, but optimized for the region
/// centers only.
pub fn nonrobust_bf(inst: &ProblemInstance, params: &SolverParams) -> Result<Solution> {
    dinkelbach_solve(&nominal_instance(inst), params)
}

#[derive(Debug, Clone, PartialEq)]
pub struct OracleResult {
    pub best_w: Beamformer,
    /// Minimal unsmoothed worst-case ratio found.
    pub best_objective: f64,
    /// Phase steps per free antenna.
    pub grid_resolution: usize,
}

/// Exhaustive search with `[w]_1 = √p`.
pub fn brute_force_oracle(inst: &ProblemInstance, phase_steps: usize) -> Result<OracleResult> {
    brute_force_oracle_with_reference(inst, phase_steps, 0.0)
}

/// Exhaustive search over `phase_steps` uniformly spaced phases for every
/// antenna after the first, whose phase is pinned to `reference_phase`.
/// The other phases are offset by the same reference, so the candidate set
/// is a global rotation of the zero-reference set.
///
/// The objective is the unsmoothed worst-case ratio; candidates violating
/// the QoS constraint are discarded. Ties go to the lowest enumeration index.
pub fn brute_force_oracle_with_reference(
    inst: &ProblemInstance,
    phase_steps: usize,
    reference_phase: f64,
) -> Result<OracleResult> {
    let n = inst.num_antennas();
    if n > ORACLE_MAX_ANTENNAS {
        return Err(Error::domain(format!(
            "oracle supports at most {ORACLE_MAX_ANTENNAS} antennas, got {n}"
        )));
    }
    if phase_steps == 0 || phase_steps > ORACLE_MAX_STEPS {
        return Err(Error::domain(format!(
            "phase_steps must be in 1..={ORACLE_MAX_STEPS}, got {phase_steps}"
        )));
    }
    let free = n - 1;
    let total = phase_steps.pow(free as u32);
    let amp = inst.p.sqrt();
    let step = 2.0 * PI / phase_steps as f64;

    let candidate = |mut idx: usize| -> Vec<Complex64> {
        let mut w = Vec::with_capacity(n);
        w.push(Complex64::from_polar(amp, reference_phase));
        for _ in 0..free {
            let d = idx % phase_steps;
            idx /= phase_steps;
            w.push(Complex64::from_polar(amp, reference_phase + d as f64 * step));
        }
        w
    };

    let best = (0..total)
        .into_par_iter()
        .filter_map(|idx| {
            let w = candidate(idx);
            if quad_form(&inst.h_tilde_s, &w) < inst.gamma_th {
                return None;
            }
            Some((worst_case_ratio(&w, inst), idx))
        })
        .reduce_with(|a, b| if b.0 < a.0 || (b.0 == a.0 && b.1 < a.1) { b } else { a });

    let (best_objective, idx) =
        best.ok_or_else(|| Error::Infeasible("no phase-grid candidate meets the QoS constraint".into()))?;
    Ok(OracleResult {
        best_w: Beamformer::new(candidate(idx), inst.p)?,
        best_objective,
        grid_resolution: phase_steps,
    })
}
