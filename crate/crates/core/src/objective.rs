//! Secrecy-rate metrics and the smoothed fractional objective.
//!
//! With normalized channels `h̃` the LU's SNR is `q_s(w) = |h̃_sᴴw|²` and each
//! eavesdropper grid point contributes `q(w) = |h̃ᴴw|²`. The worst case over
//! the grid is replaced by a log-sum-exp
//!
//! ```text
//! lse_β(v) = β⁻¹ ln Σ exp(β v_i),   max v ≤ lse_β(v) ≤ max v + ln(n)/β
//! ```
//!
//! and the resulting ratio is minimized with Dinkelbach subproblems
//! `Γ(w) = numerator(w) − η (1 + q_s(w))`, where the numerator is
//!
//! * UE: `lse_β` over every `(k, i, j)` of `1 + q`,
//! * CE: `1 + Σ_k lse_β` over eavesdropper `k`'s grid of `q`.
//!
//! Gradients use the conjugate-coordinate convention
//! `Γ(w + Δ) ≈ Γ(w) + Re{∇Γ(w)ᴴΔ}`, which gives `∇ q(w) = 2 h̃ (h̃ᴴw)`.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::cvec::{inner, modulus_deviation, quad_form};
use crate::error::{Error, Result};
use crate::uncertainty::EveRegionGrid;

/// Tolerance on `|w_n| = √p` for a [`Beamformer`].
pub const MODULUS_TOL: f64 = 1e-9;

/// Whether eavesdroppers decode independently or pool their observations.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum EveMode {
    /// Uncoordinated: the strongest single eavesdropper limits the rate.
    #[default]
    Ue,
    /// Coordinated: eavesdropper SNRs add up.
    Ce,
}

impl std::fmt::Display for EveMode {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            EveMode::Ue => "ue",
            EveMode::Ce => "ce",
        })
    }
}

/// A beamformer under the per-antenna constant-modulus constraint.
#[derive(Debug, Clone, PartialEq)]
pub struct Beamformer {
    w: Vec<Complex64>,
    p: f64,
}

impl Beamformer {
    pub fn new(w: Vec<Complex64>, p: f64) -> Result<Self> {
        if !(p.is_finite() && p > 0.0) {
            return Err(Error::domain(format!("per-antenna power {p} must be > 0")));
        }
        let dev = modulus_deviation(&w, p);
        if dev > MODULUS_TOL {
            return Err(Error::domain(format!(
                "beamformer entries deviate from √p by {dev:e}"
            )));
        }
        Ok(Self { w, p })
    }

    /// `w_n = √p·exp(j·phase_n)`.
    pub fn from_phases(phases: &[f64], p: f64) -> Result<Self> {
        let amp = p.sqrt();
        Self::new(phases.iter().map(|&t| Complex64::from_polar(amp, t)).collect(), p)
    }

    pub fn weights(&self) -> &[Complex64] {
        &self.w
    }

    pub fn power(&self) -> f64 {
        self.p
    }

    pub fn into_weights(self) -> Vec<Complex64> {
        self.w
    }
}

/// One fully specified worst-case secrecy beamforming problem.
#[derive(Debug, Clone, PartialEq)]
pub struct ProblemInstance {
    pub h_tilde_s: Vec<Complex64>,
    pub eve_grids: Vec<EveRegionGrid>,
    /// Minimum LU SNR, linear.
    pub gamma_th: f64,
    /// Per-antenna power, W.
    pub p: f64,
    pub beta: f64,
    pub mode: EveMode,
}

impl ProblemInstance {
    pub fn new(
        h_tilde_s: Vec<Complex64>,
        eve_grids: Vec<EveRegionGrid>,
        gamma_th: f64,
        p: f64,
        beta: f64,
        mode: EveMode,
    ) -> Result<Self> {
        if h_tilde_s.is_empty() {
            return Err(Error::domain("LU channel is empty"));
        }
        if eve_grids.is_empty() {
            return Err(Error::domain("at least one eavesdropper grid is required"));
        }
        if !(beta.is_finite() && beta > 0.0) {
            return Err(Error::config("beta", format!("must be > 0, got {beta}")));
        }
        if !(gamma_th.is_finite() && gamma_th >= 0.0) {
            return Err(Error::config("gamma_th", format!("must be >= 0, got {gamma_th}")));
        }
        if !(p.is_finite() && p > 0.0) {
            return Err(Error::config("p", format!("must be > 0, got {p}")));
        }
        let n = h_tilde_s.len();
        for g in &eve_grids {
            if g.is_empty() {
                return Err(Error::domain("eavesdropper grid has no points"));
            }
            for c in g.channels.iter().chain(std::iter::once(&g.center_channel)) {
                if c.len() != n {
                    return Err(Error::Dimension {
                        expected: n,
                        got: c.len(),
                    });
                }
            }
        }
        Ok(Self {
            h_tilde_s,
            eve_grids,
            gamma_th,
            p,
            beta,
            mode,
        })
    }

    pub fn num_antennas(&self) -> usize {
        self.h_tilde_s.len()
    }

    /// Total number of eavesdropper grid points `Σ_k M1·M2`.
    pub fn grid_points(&self) -> usize {
        self.eve_grids.iter().map(EveRegionGrid::len).sum()
    }

    fn eve_channels(&self) -> impl Iterator<Item = &Vec<Complex64>> {
        self.eve_grids.iter().flat_map(|g| g.channels.iter())
    }

    fn check(&self, w: &[Complex64]) {
        assert_eq!(w.len(), self.num_antennas(), "beamformer length mismatch");
    }
}

/// `|h̃ᴴw|²`.
pub fn snr(w: &[Complex64], h_tilde: &[Complex64]) -> Result<f64> {
    if w.len() != h_tilde.len() {
        return Err(Error::Dimension {
            expected: h_tilde.len(),
            got: w.len(),
        });
    }
    Ok(quad_form(h_tilde, w))
}

/// Max-shifted `β⁻¹ ln Σ exp(β v_i)`.
pub fn lse(values: &[f64], beta: f64) -> Result<f64> {
    if values.is_empty() {
        return Err(Error::domain("log-sum-exp of an empty list"));
    }
    if !(beta.is_finite() && beta > 0.0) {
        return Err(Error::domain(format!("beta {beta} must be > 0")));
    }
    Ok(lse_unchecked(values, beta))
}

fn lse_unchecked(values: &[f64], beta: f64) -> f64 {
    let m = values.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let s: f64 = values.iter().map(|v| (beta * (v - m)).exp()).sum();
    m + s.ln() / beta
}

/// Softmax weights `exp(β v_i) / Σ exp(β v_j)`, computed with the max shift.
fn softmax(values: &[f64], beta: f64) -> Vec<f64> {
    let m = values.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let e: Vec<f64> = values.iter().map(|v| (beta * (v - m)).exp()).collect();
    let s: f64 = e.iter().sum();
    e.into_iter().map(|x| x / s).collect()
}

/// Eavesdropper SNRs, one vector per eavesdropper aligned with its grid.
pub fn eve_snrs(w: &[Complex64], inst: &ProblemInstance) -> Vec<Vec<f64>> {
    inst.check(w);
    inst.eve_grids
        .iter()
        .map(|g| g.channels.iter().map(|h| quad_form(h, w)).collect())
        .collect()
}

fn max_of(v: &[f64]) -> f64 {
    v.iter().copied().fold(f64::NEG_INFINITY, f64::max)
}

/// Effective eavesdropping SNR at the grid worst case: the largest single
/// SNR (UE) or the sum of per-eavesdropper worst SNRs (CE).
pub fn worst_eve_snr(w: &[Complex64], inst: &ProblemInstance) -> f64 {
    let snrs = eve_snrs(w, inst);
    let per_eve = snrs.iter().map(|v| max_of(v));
    match inst.mode {
        EveMode::Ue => per_eve.fold(f64::NEG_INFINITY, f64::max),
        EveMode::Ce => per_eve.sum(),
    }
}

/// Unsmoothed worst-case ratio `(1 + worst eavesdropper SNR) / (1 + q_s)`.
/// The quantity the smoothed problem approximates.
pub fn worst_case_ratio(w: &[Complex64], inst: &ProblemInstance) -> f64 {
    (1.0 + worst_eve_snr(w, inst)) / (1.0 + quad_form(&inst.h_tilde_s, w))
}

/// Worst-case achievable secrecy rate over the grid, bits/s/Hz, clamped at 0.
pub fn asr(w: &[Complex64], inst: &ProblemInstance) -> f64 {
    let gs = quad_form(&inst.h_tilde_s, w);
    let ge = worst_eve_snr(w, inst);
    ((1.0 + gs).log2() - (1.0 + ge).log2()).max(0.0)
}

/// The smoothed numerator of the Dinkelbach ratio.
pub fn smoothed_numerator(w: &[Complex64], inst: &ProblemInstance) -> f64 {
    let snrs = eve_snrs(w, inst);
    match inst.mode {
        EveMode::Ue => {
            let all: Vec<f64> = snrs.iter().flatten().map(|q| 1.0 + q).collect();
            lse_unchecked(&all, inst.beta)
        }
        EveMode::Ce => 1.0 + snrs.iter().map(|v| lse_unchecked(v, inst.beta)).sum::<f64>(),
    }
}

/// `Γ(w) = numerator(w) − η (1 + q_s(w))`.
pub fn gamma_objective(w: &[Complex64], inst: &ProblemInstance, eta: f64) -> f64 {
    smoothed_numerator(w, inst) - eta * (1.0 + quad_form(&inst.h_tilde_s, w))
}

/// Softmax weights of the smoothed numerator, shaped like the grids. They
/// sum to one over everything (UE) or per eavesdropper (CE).
pub fn softmax_weights(w: &[Complex64], inst: &ProblemInstance) -> Vec<Vec<f64>> {
    let snrs = eve_snrs(w, inst);
    match inst.mode {
        EveMode::Ue => {
            // The constant 1 in every exponent cancels in the softmax.
            let flat: Vec<f64> = snrs.iter().flatten().copied().collect();
            let s = softmax(&flat, inst.beta);
            let mut it = s.into_iter();
            snrs.iter()
                .map(|v| it.by_ref().take(v.len()).collect())
                .collect()
        }
        EveMode::Ce => snrs.iter().map(|v| softmax(v, inst.beta)).collect(),
    }
}

/// `∇Γ(w) = 2 Σ s_kij h̃ (h̃ᴴw) − 2η h̃_s (h̃_sᴴw)`.
pub fn gamma_gradient(w: &[Complex64], inst: &ProblemInstance, eta: f64) -> Vec<Complex64> {
    let weights = softmax_weights(w, inst);
    let mut grad = vec![Complex64::new(0.0, 0.0); w.len()];
    for (g, s) in inst.eve_grids.iter().zip(&weights) {
        for (h, &sk) in g.channels.iter().zip(s) {
            if sk == 0.0 {
                continue;
            }
            let coef = 2.0 * sk * inner(h, w);
            for (gn, hn) in grad.iter_mut().zip(h) {
                *gn += hn * coef;
            }
        }
    }
    let coef = -2.0 * eta * inner(&inst.h_tilde_s, w);
    for (gn, hn) in grad.iter_mut().zip(&inst.h_tilde_s) {
        *gn += hn * coef;
    }
    grad
}

/// The Dinkelbach parameter for the current iterate:
/// `numerator(w) / (1 + q_s(w))`.
pub fn dinkelbach_ratio(w: &[Complex64], inst: &ProblemInstance) -> f64 {
    smoothed_numerator(w, inst) / (1.0 + quad_form(&inst.h_tilde_s, w))
}

/// Every eavesdropper channel, flattened in `(k, i, j)` order.
pub fn all_eve_channels(inst: &ProblemInstance) -> Vec<&[Complex64]> {
    inst.eve_channels().map(Vec::as_slice).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::uncertainty::EveRegion;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn zero_grid(n: usize, m1: usize, m2: usize) -> EveRegionGrid {
        let region = EveRegion::new(0.0, 1.0, 0.0, 1.0).unwrap();
        EveRegionGrid::from_channels(
            region,
            m1,
            m2,
            vec![vec![c(0.0, 0.0); n]; m1 * m2],
            vec![c(0.0, 0.0); n],
        )
        .unwrap()
    }

    fn point_grid(h: Vec<Complex64>) -> EveRegionGrid {
        let region = EveRegion::new(0.0, 0.0, 0.0, 0.0).unwrap();
        EveRegionGrid::from_channels(region, 1, 1, vec![h.clone()], h).unwrap()
    }

    #[test]
    fn snr_basis_vector() {
        let w = vec![c(2.0, 0.0); 3];
        let h = vec![c(1.0, 0.0), c(0.0, 0.0), c(0.0, 0.0)];
        assert_eq!(snr(&w, &h).unwrap(), 4.0);
        assert!(snr(&w[..2], &h).is_err());
    }

    #[test]
    fn snr_phase_invariant() {
        let w = vec![c(1.0, 0.5), c(-0.3, 0.9)];
        let h = vec![c(0.2, -1.0), c(0.7, 0.1)];
        let rot = Complex64::from_polar(1.0, 1.234);
        let wr: Vec<_> = w.iter().map(|z| z * rot).collect();
        assert!((snr(&w, &h).unwrap() - snr(&wr, &h).unwrap()).abs() < 1e-14);
    }

    #[test]
    fn asr_ue_substitution() {
        // γ_s = 3 via h_s = √3 e1, γ_e = 1 via h_e = e1, w = e1-aligned.
        let hs = vec![c(3f64.sqrt(), 0.0), c(0.0, 0.0)];
        let he = vec![c(1.0, 0.0), c(0.0, 0.0)];
        let inst = ProblemInstance::new(hs, vec![point_grid(he)], 0.0, 1.0, 100.0, EveMode::Ue).unwrap();
        let w = vec![c(1.0, 0.0), c(1.0, 0.0)];
        assert!((asr(&w, &inst) - 1.0).abs() < 1e-14);
    }

    #[test]
    fn asr_clamps_at_zero() {
        let hs = vec![c(1.0, 0.0)];
        let he = vec![c(2.0, 0.0)];
        let inst = ProblemInstance::new(hs, vec![point_grid(he)], 0.0, 1.0, 100.0, EveMode::Ue).unwrap();
        assert_eq!(asr(&[c(1.0, 0.0)], &inst), 0.0);
    }

    #[test]
    fn asr_ce_substitution() {
        let hs = vec![c(3f64.sqrt(), 0.0)];
        let he = vec![c(0.5f64.sqrt(), 0.0)];
        let inst = ProblemInstance::new(
            hs,
            vec![point_grid(he.clone()), point_grid(he)],
            0.0,
            1.0,
            100.0,
            EveMode::Ce,
        )
        .unwrap();
        assert!((asr(&[c(1.0, 0.0)], &inst) - 1.0).abs() < 1e-14);
    }

    #[test]
    fn lse_examples() {
        assert_eq!(lse(&[3.5], 7.0).unwrap(), 3.5);
        for beta in [0.5, 1.0, 10.0] {
            let v = lse(&[1.0, 1.0], beta).unwrap();
            assert!((v - (1.0 + 2f64.ln() / beta)).abs() < 1e-14);
        }
        let v = lse(&[0.0, 10.0], 100.0).unwrap();
        assert!((10.0..=10.0 + 2f64.ln() / 100.0).contains(&v));
        assert!(lse(&[], 1.0).is_err());
        assert!(lse(&[1.0], 0.0).is_err());
    }

    #[test]
    fn lse_survives_large_exponents() {
        let v = lse(&[900.0, 899.0], 100.0).unwrap();
        assert!(v.is_finite() && (v - 900.0).abs() < 1e-12);
    }

    #[test]
    fn zero_eve_objective_ue() {
        let hs = vec![c(1.0, 0.5), c(-0.2, 0.3)];
        let (k, m1, m2) = (3, 2, 4);
        let grids = (0..k).map(|_| zero_grid(2, m1, m2)).collect();
        let beta = 100.0;
        let inst = ProblemInstance::new(hs.clone(), grids, 0.0, 1.0, beta, EveMode::Ue).unwrap();
        let w = vec![c(1.0, 0.0), c(0.0, 1.0)];
        let eta = 0.7;
        let qs = quad_form(&hs, &w);
        let g = (k * m1 * m2) as f64;
        let want = 1.0 + g.ln() / beta - eta * (1.0 + qs);
        assert!((gamma_objective(&w, &inst, eta) - want).abs() < 1e-13);
        let ratio = dinkelbach_ratio(&w, &inst);
        assert!((ratio - (1.0 + g.ln() / beta) / (1.0 + qs)).abs() < 1e-14);
    }

    #[test]
    fn zero_eve_objective_ce() {
        let hs = vec![c(1.0, 0.0)];
        let (k, m1, m2) = (2, 3, 3);
        let grids = (0..k).map(|_| zero_grid(1, m1, m2)).collect();
        let beta = 10.0;
        let inst = ProblemInstance::new(hs, grids, 0.0, 1.0, beta, EveMode::Ce).unwrap();
        let want = 1.0 + k as f64 * ((m1 * m2) as f64).ln() / beta;
        assert!((gamma_objective(&[c(1.0, 0.0)], &inst, 0.0) - want).abs() < 1e-14);
    }

    #[test]
    fn zero_eve_gradient_is_lu_term() {
        let hs = vec![c(1.0, 0.5), c(-0.2, 0.3)];
        let inst = ProblemInstance::new(hs.clone(), vec![zero_grid(2, 2, 2)], 0.0, 1.0, 100.0, EveMode::Ue).unwrap();
        let w = vec![c(0.6, 0.8), c(-1.0, 0.0)];
        let g = gamma_gradient(&w, &inst, 1.0);
        let a = inner(&hs, &w);
        for (gn, hn) in g.iter().zip(&hs) {
            assert!((gn - (-2.0 * hn * a)).norm() < 1e-14);
        }
    }

    #[test]
    fn ratio_zeroes_subproblem() {
        let hs = vec![c(1.0, 0.5), c(-0.2, 0.3)];
        let he = vec![c(0.3, 0.1), c(0.2, -0.4)];
        for mode in [EveMode::Ue, EveMode::Ce] {
            let inst = ProblemInstance::new(
                hs.clone(),
                vec![point_grid(he.clone()), zero_grid(2, 2, 1)],
                0.0,
                1.0,
                100.0,
                mode,
            )
            .unwrap();
            let w = vec![c(0.6, 0.8), c(-1.0, 0.0)];
            let eta = dinkelbach_ratio(&w, &inst);
            assert!(gamma_objective(&w, &inst, eta).abs() < 1e-10);
        }
    }

    #[test]
    fn beamformer_validates_modulus() {
        assert!(Beamformer::new(vec![c(1.0, 0.0), c(0.0, 1.0)], 1.0).is_ok());
        assert!(Beamformer::new(vec![c(1.0, 0.0), c(0.0, 1.1)], 1.0).is_err());
        assert!(Beamformer::from_phases(&[0.3, 2.0], 4.0).is_ok());
    }
}
