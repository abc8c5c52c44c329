//! Robust secrecy beamforming for multibeam satellite downlinks.
//!
//! The crate synthesizes satellite downlink channels, discretizes
//! rectangular eavesdropper uncertainty regions, and maximizes the
//! worst-case achievable secrecy rate of a legitimate user under a
//! per-antenna constant-modulus constraint and a minimum-SNR requirement.
//! The solver smooths the worst case with log-sum-exp, handles the ratio
//! with Dinkelbach iterations, and solves each subproblem with a non-convex
//! ADMM whose steps are all closed form.
//!
//! Module map:
//!
//! * [`channel`]: geometry, beam and terminal gains, rain, noise, channel vectors.
//! * [`uncertainty`]: eavesdropper regions and their channel grids.
//! * [`objective`]: secrecy-rate metrics, log-sum-exp, Dinkelbach subproblems.
//! * [`solver`]: ADMM updates and the outer Dinkelbach loop.
//! * [`baselines`]: MRT, non-robust design, brute-force oracle.
//! * [`harness`]: experiment configs, sweeps, CSV output.

pub mod baselines;
pub mod channel;
pub mod cvec;
pub mod error;
pub mod harness;
pub mod objective;
pub mod solver;
pub mod uncertainty;

pub use error::{Error, Result};
pub use num_complex::Complex64;

// The book's code blocks run as doctests.
#[cfg(doctest)]
mod book {
    #[doc = include_str!("../../../book/src/introduction.md")]
    mod introduction {}
    #[doc = include_str!("../../../book/src/channels.md")]
    mod channels {}
    #[doc = include_str!("../../../book/src/uncertainty.md")]
    mod uncertainty {}
    #[doc = include_str!("../../../book/src/objective.md")]
    mod objective {}
    #[doc = include_str!("../../../book/src/solver.md")]
    mod solver {}
    #[doc = include_str!("../../../book/src/baselines.md")]
    mod baselines {}
    #[doc = include_str!("../../../book/src/experiments.md")]
    mod experiments {}
}
