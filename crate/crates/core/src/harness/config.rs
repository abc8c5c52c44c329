//! Experiment configuration files.
//!
//! Configs are JSON. Every key is optional and falls back to the shipped
//! default; unknown keys are rejected. Keys carry their unit in the name
//! (`_km`, `_hz`, `_db`, `_dbmw`, ...).

use serde::{Deserialize, Serialize};
use std::path::{Path, PathBuf};

use crate::channel::{
    db_to_linear, GroundPosition, LinkBudgetParams, RainModel, SatelliteGeometry, TerminalPointing,
    GEO_ALTITUDE_KM,
};
use crate::error::{Error, Result};
use crate::objective::EveMode;
use crate::solver::SolverParams;
use crate::uncertainty::{EveRegion, GridMode, RainPolicy};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ScenarioConfig {
    pub altitude_km: f64,
    /// Feeds on a hexagonal lattice; ignored when `antenna_offsets_m` is set.
    pub num_antennas: usize,
    pub antenna_pitch_m: f64,
    /// Spacing of the hexagonal beam-center lattice on the ground.
    pub beam_spacing_km: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub antenna_offsets_m: Option<Vec<[f64; 3]>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub beam_centers_km: Option<Vec<[f64; 2]>>,

    pub carrier_hz: f64,
    pub beam_gain_max_dbi: f64,
    pub beamwidth_3db_deg: f64,
    pub user_gain_max_db: f64,
    /// Location of the rain-fade distribution (see `rain_model`).
    pub rain_mu: f64,
    /// Scale of the rain-fade distribution (see `rain_model`).
    pub rain_sigma: f64,
    pub rain_model: RainModel,
    pub noise_bandwidth_hz: f64,
    pub noise_temperature_k: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub eve_noise_bandwidth_hz: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub eve_noise_temperature_k: Option<f64>,
    pub terminal_mispoint_deg: f64,

    pub lu_position_km: [f64; 2],
    pub eve_centers_km: Vec<[f64; 2]>,
    pub edge_km: f64,

    pub power_dbmw: f64,
    pub gamma_th: f64,
    /// Interpret `gamma_th` in dB instead of as a linear ratio.
    pub gamma_th_in_db: bool,
    pub beta: f64,
    pub grid_m1: usize,
    pub grid_m2: usize,
    pub grid_mode: GridMode,
    pub rain_policy: RainPolicy,
    pub solver: SolverParams,
}

impl Default for ScenarioConfig {
    fn default() -> Self {
        Self {
            altitude_km: GEO_ALTITUDE_KM,
            num_antennas: 7,
            antenna_pitch_m: 1.0,
            beam_spacing_km: 300.0,
            antenna_offsets_m: None,
            beam_centers_km: None,
            carrier_hz: 20e9,
            beam_gain_max_dbi: 52.0,
            beamwidth_3db_deg: 0.4,
            user_gain_max_db: 40.0,
            rain_mu: -2.6,
            rain_sigma: 1.63,
            rain_model: RainModel::LognormalDb,
            noise_bandwidth_hz: 250e6,
            noise_temperature_k: 300.0,
            eve_noise_bandwidth_hz: None,
            eve_noise_temperature_k: None,
            terminal_mispoint_deg: 0.0,
            lu_position_km: [0.0, 0.0],
            eve_centers_km: vec![[350.0, 0.0], [-150.0, 350.0], [-100.0, -380.0]],
            edge_km: 100.0,
            power_dbmw: 30.0,
            gamma_th: 5.0,
            gamma_th_in_db: false,
            beta: 100.0,
            grid_m1: 10,
            grid_m2: 10,
            grid_mode: GridMode::Standard,
            rain_policy: RainPolicy::Nominal,
            solver: SolverParams::default(),
        }
    }
}

fn positive(field: &str, v: f64) -> Result<()> {
    if v.is_finite() && v > 0.0 {
        Ok(())
    } else {
        Err(Error::config(field, format!("must be finite and > 0, got {v}")))
    }
}

impl ScenarioConfig {
    pub fn validate(&self) -> Result<()> {
        positive("altitude_km", self.altitude_km)?;
        positive("antenna_pitch_m", self.antenna_pitch_m)?;
        positive("beam_spacing_km", self.beam_spacing_km)?;
        positive("carrier_hz", self.carrier_hz)?;
        positive("beamwidth_3db_deg", self.beamwidth_3db_deg)?;
        if self.beamwidth_3db_deg >= 90.0 {
            return Err(Error::config("beamwidth_3db_deg", "must be below 90"));
        }
        positive("user_gain_max_db", self.user_gain_max_db)?;
        if !self.beam_gain_max_dbi.is_finite() {
            return Err(Error::config("beam_gain_max_dbi", "must be finite"));
        }
        if !self.rain_mu.is_finite() {
            return Err(Error::config("rain_mu", "must be finite"));
        }
        if !(self.rain_sigma.is_finite() && self.rain_sigma >= 0.0) {
            return Err(Error::config("rain_sigma", "must be finite and >= 0"));
        }
        positive("noise_bandwidth_hz", self.noise_bandwidth_hz)?;
        positive("noise_temperature_k", self.noise_temperature_k)?;
        if let Some(v) = self.eve_noise_bandwidth_hz {
            positive("eve_noise_bandwidth_hz", v)?;
        }
        if let Some(v) = self.eve_noise_temperature_k {
            positive("eve_noise_temperature_k", v)?;
        }
        if !(self.terminal_mispoint_deg.is_finite() && (0.0..=180.0).contains(&self.terminal_mispoint_deg)) {
            return Err(Error::config("terminal_mispoint_deg", "must be in [0, 180]"));
        }
        if self.eve_centers_km.is_empty() {
            return Err(Error::config("eve_centers_km", "at least one eavesdropper is required"));
        }
        if !(self.edge_km.is_finite() && self.edge_km >= 0.0) {
            return Err(Error::config("edge_km", "must be finite and >= 0"));
        }
        if !self.power_dbmw.is_finite() {
            return Err(Error::config("power_dbmw", "must be finite"));
        }
        if !self.gamma_th.is_finite() || (!self.gamma_th_in_db && self.gamma_th < 0.0) {
            return Err(Error::config("gamma_th", format!("must be >= 0, got {}", self.gamma_th)));
        }
        positive("beta", self.beta)?;
        if self.grid_m1 == 0 {
            return Err(Error::config("grid_m1", "must be >= 1"));
        }
        if self.grid_m2 == 0 {
            return Err(Error::config("grid_m2", "must be >= 1"));
        }
        self.solver.validate()?;
        self.satellite()?;
        self.regions()?;
        GroundPosition::new(self.lu_position_km[0], self.lu_position_km[1])
            .map_err(|e| Error::config("lu_position_km", e.to_string()))?;
        Ok(())
    }

    pub fn satellite(&self) -> Result<SatelliteGeometry> {
        match (&self.antenna_offsets_m, &self.beam_centers_km) {
            (None, None) => {
                if self.num_antennas == 0 {
                    return Err(Error::config("num_antennas", "must be >= 1"));
                }
                SatelliteGeometry::hexagonal(
                    self.num_antennas,
                    self.altitude_km,
                    self.antenna_pitch_m,
                    self.beam_spacing_km,
                )
            }
            (Some(offsets), Some(centers)) => {
                let centers = centers
                    .iter()
                    .map(|c| GroundPosition::new(c[0], c[1]))
                    .collect::<Result<Vec<_>>>()
                    .map_err(|e| Error::config("beam_centers_km", e.to_string()))?;
                SatelliteGeometry::new(self.altitude_km, offsets.clone(), centers)
            }
            _ => Err(Error::config(
                "antenna_offsets_m",
                "antenna_offsets_m and beam_centers_km must be given together",
            )),
        }
        .map_err(|e| match e {
            Error::Domain(m) => Error::config("antenna_offsets_m", m),
            other => other,
        })
    }

    pub fn link_budget(&self) -> LinkBudgetParams {
        LinkBudgetParams {
            carrier_hz: self.carrier_hz,
            beam_gain_max: db_to_linear(self.beam_gain_max_dbi),
            beamwidth_3db_rad: self.beamwidth_3db_deg.to_radians(),
            user_gain_max_db: self.user_gain_max_db,
            rain_mu: self.rain_mu,
            rain_sigma: self.rain_sigma,
            rain_model: self.rain_model,
            noise_bandwidth_hz: self.noise_bandwidth_hz,
            noise_temperature_k: self.noise_temperature_k,
        }
    }

    /// The link budget with eavesdropper noise figures; defaults to the LU's.
    pub fn eve_link_budget(&self) -> LinkBudgetParams {
        let lu = self.link_budget();
        LinkBudgetParams {
            noise_bandwidth_hz: self.eve_noise_bandwidth_hz.unwrap_or(lu.noise_bandwidth_hz),
            noise_temperature_k: self.eve_noise_temperature_k.unwrap_or(lu.noise_temperature_k),
            ..lu
        }
    }

    pub fn pointing(&self) -> TerminalPointing {
        if self.terminal_mispoint_deg == 0.0 {
            TerminalPointing::TrackSatellite
        } else {
            TerminalPointing::Mispointed {
                offset_rad: self.terminal_mispoint_deg.to_radians(),
            }
        }
    }

    pub fn lu_position(&self) -> GroundPosition {
        GroundPosition {
            x_km: self.lu_position_km[0],
            y_km: self.lu_position_km[1],
        }
    }

    pub fn regions(&self) -> Result<Vec<EveRegion>> {
        self.eve_centers_km
            .iter()
            .map(|c| {
                let center = GroundPosition::new(c[0], c[1])?;
                EveRegion::square(center, self.edge_km)
            })
            .collect::<Result<Vec<_>>>()
            .map_err(|e| Error::config("eve_centers_km", e.to_string()))
    }

    /// Per-antenna power, W.
    pub fn power_w(&self) -> f64 {
        dbmw_to_w(self.power_dbmw)
    }

    pub fn gamma_th_linear(&self) -> f64 {
        if self.gamma_th_in_db {
            db_to_linear(self.gamma_th)
        } else {
            self.gamma_th
        }
    }
}

pub fn dbmw_to_w(dbmw: f64) -> f64 {
    10f64.powf((dbmw - 30.0) / 10.0)
}

/// Beamforming schemes a run can compare.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Scheme {
    Robust,
    Mrt,
    Nonrobust,
}

impl Scheme {
    pub fn as_str(self) -> &'static str {
        match self {
            Scheme::Robust => "robust",
            Scheme::Mrt => "mrt",
            Scheme::Nonrobust => "nonrobust",
        }
    }
}

impl std::str::FromStr for Scheme {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim() {
            "robust" => Ok(Scheme::Robust),
            "mrt" => Ok(Scheme::Mrt),
            "nonrobust" => Ok(Scheme::Nonrobust),
            other => Err(Error::config("schemes", format!("unknown scheme `{other}`"))),
        }
    }
}

/// The variable swept across rows.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Sweep {
    #[default]
    None,
    PowerDbmw(Vec<f64>),
    RegionEdgeKm(Vec<f64>),
    /// Grid samples per axis, applied to both `m1` and `m2`.
    GridDensity(Vec<usize>),
}

impl Sweep {
    pub fn len(&self) -> usize {
        match self {
            Sweep::None => 1,
            Sweep::PowerDbmw(v) | Sweep::RegionEdgeKm(v) => v.len(),
            Sweep::GridDensity(v) => v.len(),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    fn validate(&self) -> Result<()> {
        fn increasing<T: PartialOrd + Copy>(v: &[T]) -> bool {
            !v.is_empty() && v.windows(2).all(|w| w[0] < w[1])
        }
        let ok = match self {
            Sweep::None => true,
            Sweep::PowerDbmw(v) | Sweep::RegionEdgeKm(v) => increasing(v) && v.iter().all(|x| x.is_finite()),
            Sweep::GridDensity(v) => increasing(v) && v[0] >= 1,
        };
        if !ok {
            return Err(Error::config("sweep", "values must be non-empty, finite and strictly increasing"));
        }
        if let Sweep::RegionEdgeKm(v) = self {
            if v[0] < 0.0 {
                return Err(Error::config("sweep", "region edges must be >= 0"));
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ExperimentSpec {
    pub seed: u64,
    pub mode: EveMode,
    pub schemes: Vec<Scheme>,
    pub sweep: Sweep,
    pub output_dir: PathBuf,
    /// Fill the `solve_ms` column. Wall-clock times differ between runs, so
    /// byte-reproducible outputs need this off.
    pub record_timing: bool,
    pub beampattern_resolution: usize,
    pub scenario: ScenarioConfig,
}

impl Default for ExperimentSpec {
    fn default() -> Self {
        Self {
            seed: 42,
            mode: EveMode::Ue,
            schemes: vec![Scheme::Robust, Scheme::Mrt, Scheme::Nonrobust],
            sweep: Sweep::None,
            output_dir: PathBuf::from("out"),
            record_timing: true,
            beampattern_resolution: 101,
            scenario: ScenarioConfig::default(),
        }
    }
}

impl ExperimentSpec {
    pub fn validate(&self) -> Result<()> {
        if self.schemes.is_empty() {
            return Err(Error::config("schemes", "at least one scheme is required"));
        }
        for (i, s) in self.schemes.iter().enumerate() {
            if self.schemes[..i].contains(s) {
                return Err(Error::config("schemes", format!("`{}` listed twice", s.as_str())));
            }
        }
        if self.beampattern_resolution == 0 {
            return Err(Error::config("beampattern_resolution", "must be >= 1"));
        }
        self.sweep.validate()?;
        self.scenario.validate()
    }

    /// Strict parse followed by validation.
    pub fn from_json(text: &str) -> Result<Self> {
        let spec: Self = serde_json::from_str(text).map_err(|e| Error::Parse {
            line: e.line(),
            column: e.column(),
            message: e.to_string(),
        })?;
        spec.validate()?;
        Ok(spec)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("spec serializes")
    }
}

pub fn parse_config(path: &Path) -> Result<ExperimentSpec> {
    let text = std::fs::read_to_string(path)?;
    ExperimentSpec::from_json(&text)
}
