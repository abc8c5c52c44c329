//! Downlink channel synthesis.
//!
//! A terminal's channel is built per antenna from the user-antenna mask, the
//! rain fade, the feed's beam gain toward the terminal, and the free-space
//! response over the antenna-to-terminal path:
//!
//! ```text
//! h_n = √G_r · r_n^(-1/2) · √b_n · (c / 4π f_c d_n) · exp(-j 2π f_c d_n / c)
//! ```
//!
//! All amplitudes are linear; decibels appear only at the config boundary.

mod bessel;
mod geometry;

pub use bessel::{bessel_j, MAX_ARGUMENT as BESSEL_MAX_ARGUMENT};
pub use geometry::{
    link_geometry, GroundPosition, LinkGeometry, SatelliteGeometry, TerminalPointing,
    GEO_ALTITUDE_KM, MAX_GROUND_KM,
};

use num_complex::Complex64;
use rand::Rng;
use rand_distr::{Distribution, Normal};
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

use crate::error::{Error, Result};

/// Speed of light, m/s.
pub const SPEED_OF_LIGHT: f64 = 2.997_924_58e8;

/// Boltzmann constant, J/K.
pub const BOLTZMANN: f64 = 1.38e-23;

/// Scale between `sin φ / sin φ_3dB` and the Bessel argument of the beam
/// pattern; places the half-power point at `φ = φ_3dB`.
pub const BEAM_PATTERN_SCALE: f64 = 2.07123;

/// Below this Bessel argument the beam gain takes its analytic limit `b_max`.
const BEAM_LIMIT_U: f64 = 1e-8;

pub fn db_to_linear(db: f64) -> f64 {
    10f64.powf(db / 10.0)
}

pub fn linear_to_db(v: f64) -> f64 {
    10.0 * v.log10()
}

/// How the dB-valued rain fade is distributed.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RainModel {
    /// `ln(r_dB) ~ N(μ, σ²)`: the fade in dB is itself lognormal.
    #[default]
    LognormalDb,
    /// `r_dB ~ N(μ, σ²)`: the fade in dB is Gaussian.
    GaussianDb,
}

impl RainModel {
    /// Maps a standard-normal-derived draw `z ~ N(μ, σ²)` to `r_dB`.
    fn fade_db(self, z: f64) -> f64 {
        match self {
            RainModel::LognormalDb => z.exp(),
            RainModel::GaussianDb => z,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LinkBudgetParams {
    pub carrier_hz: f64,
    /// Peak beam gain, linear.
    pub beam_gain_max: f64,
    /// Half-power angle off the beam axis, rad.
    pub beamwidth_3db_rad: f64,
    /// Peak user-terminal gain, dB.
    pub user_gain_max_db: f64,
    pub rain_mu: f64,
    pub rain_sigma: f64,
    pub rain_model: RainModel,
    pub noise_bandwidth_hz: f64,
    pub noise_temperature_k: f64,
}

impl LinkBudgetParams {
    pub fn validate(&self) -> Result<()> {
        let positive = [
            ("carrier_hz", self.carrier_hz),
            ("beam_gain_max", self.beam_gain_max),
            ("beamwidth_3db_rad", self.beamwidth_3db_rad),
            ("user_gain_max_db", self.user_gain_max_db),
            ("noise_bandwidth_hz", self.noise_bandwidth_hz),
            ("noise_temperature_k", self.noise_temperature_k),
        ];
        for (name, v) in positive {
            if !(v.is_finite() && v > 0.0) {
                return Err(Error::config(name, format!("must be finite and > 0, got {v}")));
            }
        }
        if !(self.rain_sigma.is_finite() && self.rain_sigma >= 0.0) {
            return Err(Error::config("rain_sigma", "must be finite and >= 0"));
        }
        if !self.rain_mu.is_finite() {
            return Err(Error::config("rain_mu", "must be finite"));
        }
        if self.beamwidth_3db_rad >= PI / 2.0 {
            return Err(Error::config("beamwidth_3db_rad", "must be below π/2"));
        }
        Ok(())
    }

    /// Deterministic fade used when a terminal's rain cannot be known:
    /// the median of the fade distribution.
    pub fn nominal_rain(&self) -> f64 {
        10f64.powf(self.rain_model.fade_db(self.rain_mu) / 20.0)
    }
}

impl Default for LinkBudgetParams {
    fn default() -> Self {
        Self {
            carrier_hz: 20e9,
            beam_gain_max: db_to_linear(52.0),
            beamwidth_3db_rad: 0.4f64.to_radians(),
            user_gain_max_db: 40.0,
            rain_mu: -2.6,
            rain_sigma: 1.63,
            rain_model: RainModel::LognormalDb,
            noise_bandwidth_hz: 250e6,
            noise_temperature_k: 300.0,
        }
    }
}

/// Linear beam gain at angle `phi` off the beam axis.
pub fn beam_gain(phi: f64, params: &LinkBudgetParams) -> f64 {
    let u = BEAM_PATTERN_SCALE * phi.sin() / params.beamwidth_3db_rad.sin();
    params.beam_gain_max * beam_pattern(u)
}

/// Normalized pattern `(J1(u)/2u + 36 J3(u)/u³)²`, equal to 1 at `u = 0`.
fn beam_pattern(u: f64) -> f64 {
    let u = u.abs();
    if u < BEAM_LIMIT_U {
        return 1.0;
    }
    let j1 = bessel::bessel_j_unchecked(1, u);
    let j3 = bessel::bessel_j_unchecked(3, u);
    let a = j1 / (2.0 * u) + 36.0 * j3 / (u * u * u);
    a * a
}

/// User-terminal gain mask in dB. Boundary angles (1° and 48°) belong to the
/// lower-angle branch.
pub fn receiver_gain_db(theta: f64, user_gain_max_db: f64) -> f64 {
    // Slack absorbs the degree/radian round trip at the boundaries.
    const EDGE: f64 = 1e-9;
    let deg = theta.abs().to_degrees();
    if deg <= 1.0 + EDGE {
        user_gain_max_db
    } else if deg <= 48.0 + EDGE {
        32.0 - 25.0 * deg.log10()
    } else {
        -10.0
    }
}

/// Free-space response `(c / 4π f d) · exp(-j 2π f d / c)` for a path of
/// `d_km` kilometers.
pub fn free_space_response(d_km: f64, carrier_hz: f64) -> Result<Complex64> {
    if !(d_km.is_finite() && d_km > 0.0) {
        return Err(Error::domain(format!("path length {d_km} km must be > 0")));
    }
    let d_m = d_km * 1e3;
    let amplitude = SPEED_OF_LIGHT / (4.0 * PI * carrier_hz * d_m);
    // Path lengths are ~1e9 wavelengths; reduce to the fractional cycle first.
    let cycles = d_m * carrier_hz / SPEED_OF_LIGHT;
    let frac = cycles - cycles.floor();
    Ok(Complex64::from_polar(amplitude, -2.0 * PI * frac))
}

/// `n` rain fades, one per antenna.
pub fn sample_rain<R: Rng + ?Sized>(params: &LinkBudgetParams, rng: &mut R, n: usize) -> Vec<f64> {
    // Normal::new only rejects non-finite or negative spreads, which
    // `validate` already excludes.
    let normal = Normal::new(params.rain_mu, params.rain_sigma).expect("validated rain spread");
    (0..n)
        .map(|_| {
            let z = normal.sample(rng);
            10f64.powf(params.rain_model.fade_db(z) / 20.0)
        })
        .collect()
}

/// Thermal noise power `κBT`, W.
pub fn noise_variance(params: &LinkBudgetParams) -> f64 {
    BOLTZMANN * params.noise_bandwidth_hz * params.noise_temperature_k
}

/// Rain applied when composing a channel.
#[derive(Debug, Clone, Copy)]
pub enum Rain<'a> {
    Nominal,
    Sampled(&'a [f64]),
}

/// A terminal's channel together with its noise normalization.
#[derive(Debug, Clone, PartialEq)]
pub struct ChannelVector {
    pub h: Vec<Complex64>,
    pub sigma2: f64,
    /// `h / σ`.
    pub h_tilde: Vec<Complex64>,
}

impl ChannelVector {
    pub fn new(h: Vec<Complex64>, sigma2: f64) -> Result<Self> {
        if !(sigma2.is_finite() && sigma2 > 0.0) {
            return Err(Error::domain(format!("noise variance {sigma2} must be > 0")));
        }
        let inv = 1.0 / sigma2.sqrt();
        let h_tilde = h.iter().map(|z| z * inv).collect();
        Ok(Self { h, sigma2, h_tilde })
    }
}

pub fn compose_channel(
    sat: &SatelliteGeometry,
    pos: GroundPosition,
    params: &LinkBudgetParams,
    rain: Rain<'_>,
    pointing: TerminalPointing,
) -> Result<ChannelVector> {
    let n = sat.num_antennas();
    if let Rain::Sampled(r) = rain {
        if r.len() != n {
            return Err(Error::Dimension {
                expected: n,
                got: r.len(),
            });
        }
        if r.iter().any(|&v| !(v.is_finite() && v > 0.0)) {
            return Err(Error::domain("rain fades must be positive"));
        }
    }
    let geo = link_geometry(sat, pos, pointing)?;
    let g_r = db_to_linear(receiver_gain_db(geo.off_boresight_rad, params.user_gain_max_db));
    let nominal = params.nominal_rain();

    let h = (0..n)
        .map(|k| {
            let r = match rain {
                Rain::Nominal => nominal,
                Rain::Sampled(r) => r[k],
            };
            let b = beam_gain(geo.beam_angles_rad[k], params);
            let fs = free_space_response(geo.distances_km[k], params.carrier_hz)?;
            Ok(fs * (g_r.sqrt() * b.sqrt() / r.sqrt()))
        })
        .collect::<Result<Vec<_>>>()?;

    ChannelVector::new(h, noise_variance(params))
}
