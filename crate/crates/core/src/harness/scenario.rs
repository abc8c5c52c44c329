//! Turning a [`ScenarioConfig`] into solver-ready problem instances.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::channel::{
    compose_channel, sample_rain, ChannelVector, GroundPosition, LinkBudgetParams, Rain, SatelliteGeometry,
    TerminalPointing,
};
use crate::error::Result;
use crate::harness::config::ScenarioConfig;
use crate::objective::{EveMode, ProblemInstance};
use crate::uncertainty::{grid_channels, EveRegion, GridSetup, RainPolicy};

/// Per-axis refinement of the validation grid (4× the points).
pub const VALIDATION_REFINEMENT: usize = 2;

/// A scenario with its channels synthesized.
#[derive(Debug, Clone)]
pub struct BuiltScenario {
    pub config: ScenarioConfig,
    pub sat: SatelliteGeometry,
    pub lu_params: LinkBudgetParams,
    pub eve_params: LinkBudgetParams,
    pub pointing: TerminalPointing,
    pub lu_position: GroundPosition,
    pub regions: Vec<EveRegion>,
    pub lu_channel: ChannelVector,
    /// The instance the solvers see (`m1 × m2` per region).
    pub instance: ProblemInstance,
    /// Same channels and fades on a grid refined by [`VALIDATION_REFINEMENT`] per axis.
    pub dense: ProblemInstance,
}

/// Synthesizes all channels for `cfg`.
///
/// Under [`RainPolicy::Sampled`] the LU fade is drawn first, then one fade
/// vector per eavesdropper; the dense grid reuses the same draws.
pub fn build_scenario(cfg: &ScenarioConfig, mode: EveMode, seed: u64) -> Result<BuiltScenario> {
    cfg.validate()?;
    let sat = cfg.satellite()?;
    let lu_params = cfg.link_budget();
    let eve_params = cfg.eve_link_budget();
    let pointing = cfg.pointing();
    let lu_position = cfg.lu_position();
    let regions = cfg.regions()?;

    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let lu_fades = match cfg.rain_policy {
        RainPolicy::Nominal => None,
        RainPolicy::Sampled => Some(sample_rain(&lu_params, &mut rng, sat.num_antennas())),
    };
    let lu_rain = lu_fades.as_deref().map_or(Rain::Nominal, Rain::Sampled);
    let lu_channel = compose_channel(&sat, lu_position, &lu_params, lu_rain, pointing)?;

    let setup = GridSetup {
        sat: &sat,
        params: &eve_params,
        m1: cfg.grid_m1,
        m2: cfg.grid_m2,
        mode: cfg.grid_mode,
        rain_policy: cfg.rain_policy,
        pointing,
    };
    let mut dense_rng = rng.clone();
    let grids = grid_channels(&setup, &regions, &mut rng)?;
    let dense_setup = GridSetup {
        m1: cfg.grid_m1 * VALIDATION_REFINEMENT,
        m2: cfg.grid_m2 * VALIDATION_REFINEMENT,
        ..setup
    };
    let dense_grids = grid_channels(&dense_setup, &regions, &mut dense_rng)?;

    let instance = ProblemInstance::new(
        lu_channel.h_tilde.clone(),
        grids,
        cfg.gamma_th_linear(),
        cfg.power_w(),
        cfg.beta,
        mode,
    )?;
    let dense = ProblemInstance {
        eve_grids: dense_grids,
        ..instance.clone()
    };
    Ok(BuiltScenario {
        config: cfg.clone(),
        sat,
        lu_params,
        eve_params,
        pointing,
        lu_position,
        regions,
        lu_channel,
        instance,
        dense,
    })
}
