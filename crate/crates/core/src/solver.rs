//! Dinkelbach outer loop around a linearized non-convex ADMM.
//!
//! The Dinkelbach subproblem `min Γ(w)` subject to the LU QoS constraint and
//! the constant-modulus constraint is split with a consensus copy:
//!
//! ```text
//! min Γ(w̃)  s.t.  |h̃_sᴴw̃|² ≥ γ_th,  |x_n| = √p,  x = w̃
//! ```
//!
//! Each inner iteration performs three closed-form steps:
//!
//! 1. `x ← Π_modulus(w̃ + v/ρ)`, an entrywise normalization;
//! 2. `w̃ ← Π_QoS(x − (∇Γ(x) + v)/(ρ + L))`, a single-constraint QCQP;
//! 3. `v ← v + ρ(w̃ − x)`.
//!
//! The outer loop sets `η` to the current smoothed ratio and repeats until
//! `η` stops moving.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::cvec::{distance, inner, modulus_deviation, norm_sqr, project_modulus, quad_form, real_inner, sub};
use crate::error::{Error, Result};
use crate::objective::{
    all_eve_channels, dinkelbach_ratio, gamma_gradient, gamma_objective, worst_case_ratio, Beamformer,
    ProblemInstance, MODULUS_TOL,
};

/// Relative QoS violation tolerated on the final constant-modulus answer.
pub const QOS_REL_TOL: f64 = 1e-6;

/// Cap on Lipschitz doublings within a single w̃-update.
const MAX_DOUBLINGS: usize = 200;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum LipschitzMode {
    /// Global gradient-Lipschitz bound over the constant-modulus ball.
    Analytic,
    /// Starts from the curvature of the quadratic terms and doubles `L`
    /// whenever the descent-lemma check fails.
    #[default]
    Safeguarded,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct SolverParams {
    /// ADMM penalty factor ρ.
    pub rho: f64,
    /// Dinkelbach tolerance on `|Δη|`.
    pub epsilon: f64,
    /// ADMM tolerance on `‖w̃ − x‖`.
    pub delta: f64,
    pub max_outer: usize,
    pub max_inner: usize,
    pub lipschitz_mode: LipschitzMode,
}

impl Default for SolverParams {
    fn default() -> Self {
        Self {
            rho: 100.0,
            epsilon: 1e-4,
            delta: 1e-5,
            max_outer: 50,
            max_inner: 5000,
            lipschitz_mode: LipschitzMode::Safeguarded,
        }
    }
}

impl SolverParams {
    pub fn validate(&self) -> Result<()> {
        let pos = [("rho", self.rho), ("epsilon", self.epsilon), ("delta", self.delta)];
        for (name, v) in pos {
            if !(v.is_finite() && v > 0.0) {
                return Err(Error::config(format!("solver.{name}"), format!("must be > 0, got {v}")));
            }
        }
        if self.max_outer == 0 {
            return Err(Error::config("solver.max_outer", "must be >= 1"));
        }
        if self.max_inner == 0 {
            return Err(Error::config("solver.max_inner", "must be >= 1"));
        }
        Ok(())
    }
}

/// One inner ADMM iteration.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct InnerRecord {
    pub outer: usize,
    pub iteration: usize,
    /// `‖w̃ − x‖` after the iteration.
    pub residual: f64,
    /// Augmented Lagrangian `Γ(w̃) + Re{vᴴ(w̃ − x)} + ρ/2‖w̃ − x‖²`.
    pub lagrangian: f64,
    /// Relative QoS slack of `w̃`.
    pub qos_slack: f64,
    /// `L` in effect for the iteration.
    pub lipschitz: f64,
}

/// One Dinkelbach iteration.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct OuterRecord {
    pub outer: usize,
    pub eta: f64,
    pub inner_iterations: usize,
    pub inner_converged: bool,
    /// Largest `| |w̃_n| − √p |` of the ADMM output before reprojection.
    pub modulus_deviation: f64,
    /// Unsmoothed worst-case ratio at the outer iterate.
    pub worst_case_ratio: f64,
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct SolverTrace {
    pub outer: Vec<OuterRecord>,
    pub inner: Vec<InnerRecord>,
}

impl SolverTrace {
    pub fn inner_iterations_total(&self) -> usize {
        self.outer.iter().map(|o| o.inner_iterations).sum()
    }
}

/// ADMM variables.
#[derive(Debug, Clone, PartialEq)]
pub struct AdmmState {
    pub w_tilde: Vec<Complex64>,
    pub x: Vec<Complex64>,
    pub v: Vec<Complex64>,
}

impl AdmmState {
    /// Feasible start from any point: `x` on the modulus set, `w̃` its QoS
    /// projection, zero multiplier.
    pub fn from_point(w: &[Complex64], inst: &ProblemInstance) -> Result<Self> {
        let x = project_modulus(w, inst.p, &vec![Complex64::new(inst.p.sqrt(), 0.0); w.len()]);
        let w_tilde = update_w(&x, &inst.h_tilde_s, inst.gamma_th)?;
        Ok(Self {
            w_tilde,
            v: vec![Complex64::new(0.0, 0.0); w.len()],
            x,
        })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct AdmmOutcome {
    pub state: AdmmState,
    /// The point handed back to the outer loop: `w̃` when it already has
    /// constant modulus, otherwise its modulus projection.
    pub iterate: Vec<Complex64>,
    pub iterations: usize,
    pub converged: bool,
    pub modulus_deviation: f64,
    pub lipschitz: f64,
    pub records: Vec<InnerRecord>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Solution {
    pub beamformer: Beamformer,
    pub trace: SolverTrace,
    /// `|Δη| ≤ ε` was reached and every inner loop met `δ`.
    pub converged: bool,
    pub eta_converged: bool,
    /// Relative QoS slack of the returned beamformer.
    pub qos_slack: f64,
}

/// `(q_s − γ_th)/γ_th`, or `q_s` when the threshold is zero.
pub fn qos_slack(w: &[Complex64], inst: &ProblemInstance) -> f64 {
    let q = quad_form(&inst.h_tilde_s, w);
    if inst.gamma_th > 0.0 {
        (q - inst.gamma_th) / inst.gamma_th
    } else {
        q
    }
}

/// Phase-aligned constant-modulus start. It maximizes the LU SNR over the
/// constant-modulus set, so failing the QoS here proves infeasibility.
pub fn init_w(inst: &ProblemInstance) -> Result<Beamformer> {
    let amp = inst.p.sqrt();
    let w: Vec<Complex64> = inst
        .h_tilde_s
        .iter()
        .map(|h| Complex64::from_polar(amp, h.arg()))
        .collect();
    let q = quad_form(&inst.h_tilde_s, &w);
    if q < inst.gamma_th {
        return Err(Error::Infeasible(format!(
            "QoS unattainable at power p = {} W: best LU SNR {q:.6e} < threshold {:.6e}",
            inst.p, inst.gamma_th
        )));
    }
    Beamformer::new(w, inst.p)
}

/// `x = Π_modulus(w̃ + v/ρ)`; zero entries keep the previous `x`.
pub fn update_x(state: &AdmmState, rho: f64, p: f64) -> Vec<Complex64> {
    let u: Vec<Complex64> = state
        .w_tilde
        .iter()
        .zip(&state.v)
        .map(|(w, v)| w + v / rho)
        .collect();
    project_modulus(&u, p, &state.x)
}

/// Center of the w̃-subproblem, `x − (∇Γ(x) + v)/(ρ + L)`.
pub fn proximal_center(x: &[Complex64], grad: &[Complex64], v: &[Complex64], rho: f64, lipschitz: f64) -> Vec<Complex64> {
    let step = 1.0 / (rho + lipschitz);
    x.iter()
        .zip(grad)
        .zip(v)
        .map(|((x, g), v)| x - (g + v) * step)
        .collect()
}

/// Closest point to `c` with `|h̃_sᴴw|² ≥ γ_th`.
///
/// Only the component along `h̃_s` changes: `h̃_sᴴw` is moved radially onto
/// the circle of radius `√γ_th`, keeping its phase (phase 0 if it is zero).
pub fn update_w(c: &[Complex64], h_s: &[Complex64], gamma_th: f64) -> Result<Vec<Complex64>> {
    let a = inner(h_s, c);
    if a.norm_sqr() >= gamma_th {
        return Ok(c.to_vec());
    }
    let hh = norm_sqr(h_s);
    if hh == 0.0 {
        return Err(Error::Infeasible(
            "LU channel is zero; QoS constraint cannot be met".into(),
        ));
    }
    let phase = if a.norm() > 0.0 { a / a.norm() } else { Complex64::new(1.0, 0.0) };
    let t = (phase * gamma_th.sqrt() - a) / hh;
    Ok(c.iter().zip(h_s).map(|(cn, hn)| cn + hn * t).collect())
}

/// `v + ρ(w̃ − x)`.
pub fn update_v(v: &[Complex64], w_tilde: &[Complex64], x: &[Complex64], rho: f64) -> Vec<Complex64> {
    v.iter()
        .zip(w_tilde)
        .zip(x)
        .map(|((v, w), x)| v + (w - x) * rho)
        .collect()
}

/// Gradient-Lipschitz bound valid on `‖w‖² ≤ pN`:
/// `2Σ‖h̃‖² + 4β(Σ‖h̃‖²)(max‖h̃‖²)pN + 2|η|‖h̃_s‖²`.
pub fn lipschitz_bound(inst: &ProblemInstance, eta: f64) -> f64 {
    let norms: Vec<f64> = all_eve_channels(inst).iter().map(|h| norm_sqr(h)).collect();
    let sum: f64 = norms.iter().sum();
    let max = norms.iter().copied().fold(0.0, f64::max);
    let ball = inst.p * inst.num_antennas() as f64;
    2.0 * sum + 4.0 * inst.beta * sum * max * ball + 2.0 * eta.abs() * norm_sqr(&inst.h_tilde_s)
}

/// Starting `L` for the safeguarded mode: curvature of the largest single
/// quadratic plus the LU term.
fn initial_lipschitz(inst: &ProblemInstance, eta: f64) -> f64 {
    let max = all_eve_channels(inst)
        .iter()
        .map(|h| norm_sqr(h))
        .fold(0.0, f64::max);
    let k = match inst.mode {
        crate::objective::EveMode::Ue => 1.0,
        crate::objective::EveMode::Ce => inst.eve_grids.len() as f64,
    };
    (2.0 * k * max + 2.0 * eta.abs() * norm_sqr(&inst.h_tilde_s)).max(f64::MIN_POSITIVE)
}

fn lagrangian(inst: &ProblemInstance, eta: f64, state: &AdmmState, rho: f64) -> f64 {
    let diff = sub(&state.w_tilde, &state.x);
    gamma_objective(&state.w_tilde, inst, eta) + real_inner(&state.v, &diff) + 0.5 * rho * norm_sqr(&diff)
}

/// Runs the inner ADMM for a fixed `η` from `warm`.
pub fn admm_solve(inst: &ProblemInstance, eta: f64, params: &SolverParams, warm: AdmmState) -> Result<AdmmOutcome> {
    admm_solve_traced(inst, eta, params, warm, 0)
}

fn admm_solve_traced(
    inst: &ProblemInstance,
    eta: f64,
    params: &SolverParams,
    warm: AdmmState,
    outer: usize,
) -> Result<AdmmOutcome> {
    let rho = params.rho;
    let mut lip = match params.lipschitz_mode {
        LipschitzMode::Analytic => lipschitz_bound(inst, eta),
        LipschitzMode::Safeguarded => initial_lipschitz(inst, eta),
    };
    let mut state = warm;
    let mut records = Vec::new();
    let mut converged = false;
    let mut iterations = 0;

    for l in 0..params.max_inner {
        state.x = update_x(&state, rho, inst.p);

        let grad = gamma_gradient(&state.x, inst, eta);
        let mut w_new = update_w(&proximal_center(&state.x, &grad, &state.v, rho, lip), &inst.h_tilde_s, inst.gamma_th)?;
        if params.lipschitz_mode == LipschitzMode::Safeguarded {
            let base = gamma_objective(&state.x, inst, eta);
            for _ in 0..MAX_DOUBLINGS {
                let d = sub(&w_new, &state.x);
                let model = base + real_inner(&grad, &d) + 0.5 * lip * norm_sqr(&d);
                let actual = gamma_objective(&w_new, inst, eta);
                if actual <= model + 1e-12 * (1.0 + base.abs()) {
                    break;
                }
                lip *= 2.0;
                w_new = update_w(&proximal_center(&state.x, &grad, &state.v, rho, lip), &inst.h_tilde_s, inst.gamma_th)?;
            }
        }
        state.w_tilde = w_new;
        state.v = update_v(&state.v, &state.w_tilde, &state.x, rho);

        iterations = l + 1;
        let residual = distance(&state.w_tilde, &state.x);
        records.push(InnerRecord {
            outer,
            iteration: l,
            residual,
            lagrangian: lagrangian(inst, eta, &state, rho),
            qos_slack: qos_slack(&state.w_tilde, inst),
            lipschitz: lip,
        });
        if residual <= params.delta {
            converged = true;
            break;
        }
    }

    let dev = modulus_deviation(&state.w_tilde, inst.p);
    let iterate = if dev <= MODULUS_TOL {
        state.w_tilde.clone()
    } else {
        project_modulus(&state.w_tilde, inst.p, &state.x)
    };
    Ok(AdmmOutcome {
        state,
        iterate,
        iterations,
        converged,
        modulus_deviation: dev,
        lipschitz: lip,
        records,
    })
}

/// The robust beamformer: Dinkelbach iterations over ADMM inner solves.
///
/// The returned beamformer has exact constant modulus. Among the
/// QoS-feasible outer iterates (including the start) the one with the lowest
/// unsmoothed worst-case ratio is kept.
pub fn dinkelbach_solve(inst: &ProblemInstance, params: &SolverParams) -> Result<Solution> {
    params.validate()?;
    let start = init_w(inst)?;
    let mut w = start.weights().to_vec();
    let mut best_w = w.clone();
    let mut best_ratio = worst_case_ratio(&w, inst);

    let mut trace = SolverTrace::default();
    let mut eta_prev = 0.0;
    let mut eta_converged = false;
    let mut inner_ok = true;

    for t in 0..params.max_outer {
        let eta = dinkelbach_ratio(&w, inst);
        let warm = AdmmState::from_point(&w, inst)?;
        let out = admm_solve_traced(inst, eta, params, warm, t)?;
        inner_ok &= out.converged;
        w = out.iterate;

        let ratio = worst_case_ratio(&w, inst);
        if qos_slack(&w, inst) >= -QOS_REL_TOL && ratio < best_ratio {
            best_ratio = ratio;
            best_w = w.clone();
        }
        trace.inner.extend(out.records);
        trace.outer.push(OuterRecord {
            outer: t,
            eta,
            inner_iterations: out.iterations,
            inner_converged: out.converged,
            modulus_deviation: out.modulus_deviation,
            worst_case_ratio: ratio,
        });

        if (eta - eta_prev).abs() <= params.epsilon {
            eta_converged = true;
            break;
        }
        eta_prev = eta;
    }

    let slack = qos_slack(&best_w, inst);
    let beamformer = Beamformer::new(project_modulus(&best_w, inst.p, &best_w), inst.p)?;
    Ok(Solution {
        beamformer,
        trace,
        converged: eta_converged && inner_ok,
        eta_converged,
        qos_slack: slack,
    })
}
