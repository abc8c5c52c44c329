//! Rectangular eavesdropper regions and their discretization.
//!
//! A region `[x_L, x_U] × [y_L, y_U]` is sampled on an `m1 × m2` lattice
//! `x_L + i·Δx`, `y_L + j·Δy` with `Δx = (x_U − x_L)/m1`, `Δy = (y_U − y_L)/m2`
//! and `i < m1`, `j < m2`. The upper edges are excluded unless the grid is
//! built in [`GridMode::Inclusive`].

use num_complex::Complex64;
use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::channel::{
    compose_channel, sample_rain, GroundPosition, LinkBudgetParams, Rain, SatelliteGeometry,
    TerminalPointing,
};
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EveRegion {
    pub x_lower: f64,
    pub x_upper: f64,
    pub y_lower: f64,
    pub y_upper: f64,
}

impl EveRegion {
    pub fn new(x_lower: f64, x_upper: f64, y_lower: f64, y_upper: f64) -> Result<Self> {
        let all = [x_lower, x_upper, y_lower, y_upper];
        if all.iter().any(|v| !v.is_finite()) {
            return Err(Error::domain("region bounds must be finite"));
        }
        if x_lower > x_upper || y_lower > y_upper {
            return Err(Error::domain(format!(
                "region bounds inverted: x [{x_lower}, {x_upper}], y [{y_lower}, {y_upper}]"
            )));
        }
        Ok(Self {
            x_lower,
            x_upper,
            y_lower,
            y_upper,
        })
    }

    /// Square of side `edge_km` centered on `center`.
    pub fn square(center: GroundPosition, edge_km: f64) -> Result<Self> {
        if !(edge_km.is_finite() && edge_km >= 0.0) {
            return Err(Error::domain(format!("edge {edge_km} km must be >= 0")));
        }
        let h = 0.5 * edge_km;
        Self::new(center.x_km - h, center.x_km + h, center.y_km - h, center.y_km + h)
    }

    pub fn center(&self) -> GroundPosition {
        GroundPosition {
            x_km: 0.5 * (self.x_lower + self.x_upper),
            y_km: 0.5 * (self.y_lower + self.y_upper),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum GridMode {
    /// `i = 0..m1`, `j = 0..m2`; upper edges excluded.
    #[default]
    Standard,
    /// Additionally samples the upper edges, `(m1+1)·(m2+1)` points.
    Inclusive,
}

/// Grid points, x-major: point `(i, j)` is at index `i·m2' + j` where `m2'`
/// is the number of y samples.
pub fn discretize(region: &EveRegion, m1: usize, m2: usize, mode: GridMode) -> Result<Vec<GroundPosition>> {
    if m1 == 0 || m2 == 0 {
        return Err(Error::domain("grid counts m1, m2 must be >= 1"));
    }
    let dx = (region.x_upper - region.x_lower) / m1 as f64;
    let dy = (region.y_upper - region.y_lower) / m2 as f64;
    let (nx, ny) = match mode {
        GridMode::Standard => (m1, m2),
        GridMode::Inclusive => (m1 + 1, m2 + 1),
    };
    let mut points = Vec::with_capacity(nx * ny);
    for i in 0..nx {
        let x = region.x_lower + i as f64 * dx;
        for j in 0..ny {
            points.push(GroundPosition {
                x_km: x,
                y_km: region.y_lower + j as f64 * dy,
            });
        }
    }
    Ok(points)
}

/// How eavesdropper channels pick their rain fade.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RainPolicy {
    /// Median fade on every antenna; the worst case stays deterministic.
    #[default]
    Nominal,
    /// One fade vector drawn per eavesdropper and shared by its grid points.
    Sampled,
}

/// One eavesdropper's uncertainty region with the normalized channel at
/// every grid point.
#[derive(Debug, Clone, PartialEq)]
pub struct EveRegionGrid {
    pub region: EveRegion,
    pub m1: usize,
    pub m2: usize,
    pub points: Vec<GroundPosition>,
    /// `h̃` per grid point, aligned with `points`.
    pub channels: Vec<Vec<Complex64>>,
    /// `h̃` at the region center; used by the non-robust baseline.
    pub center_channel: Vec<Complex64>,
}

impl EveRegionGrid {
    /// Builds a grid from precomputed channels, mainly for synthetic problems.
    pub fn from_channels(
        region: EveRegion,
        m1: usize,
        m2: usize,
        channels: Vec<Vec<Complex64>>,
        center_channel: Vec<Complex64>,
    ) -> Result<Self> {
        let points = discretize(&region, m1, m2, GridMode::Standard)?;
        if channels.len() != points.len() {
            return Err(Error::Dimension {
                expected: points.len(),
                got: channels.len(),
            });
        }
        let n = center_channel.len();
        if let Some(bad) = channels.iter().find(|c| c.len() != n) {
            return Err(Error::Dimension {
                expected: n,
                got: bad.len(),
            });
        }
        Ok(Self {
            region,
            m1,
            m2,
            points,
            channels,
            center_channel,
        })
    }

    /// The same region collapsed to its center point.
    pub fn collapsed_to_center(&self) -> Self {
        Self {
            region: self.region,
            m1: 1,
            m2: 1,
            points: vec![self.region.center()],
            channels: vec![self.center_channel.clone()],
            center_channel: self.center_channel.clone(),
        }
    }

    pub fn len(&self) -> usize {
        self.channels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.channels.is_empty()
    }
}

/// Shared inputs for composing eavesdropper channels.
#[derive(Debug, Clone, Copy)]
pub struct GridSetup<'a> {
    pub sat: &'a SatelliteGeometry,
    /// Link budget with the eavesdroppers' noise figures.
    pub params: &'a LinkBudgetParams,
    pub m1: usize,
    pub m2: usize,
    pub mode: GridMode,
    pub rain_policy: RainPolicy,
    pub pointing: TerminalPointing,
}

pub fn grid_channels<R: Rng + ?Sized>(
    setup: &GridSetup<'_>,
    regions: &[EveRegion],
    rng: &mut R,
) -> Result<Vec<EveRegionGrid>> {
    if regions.is_empty() {
        return Err(Error::domain("at least one eavesdropper region is required"));
    }
    let n = setup.sat.num_antennas();
    regions
        .iter()
        .map(|region| {
            // Drawn sequentially so the stream does not depend on scheduling.
            let fades = match setup.rain_policy {
                RainPolicy::Nominal => None,
                RainPolicy::Sampled => Some(sample_rain(setup.params, rng, n)),
            };
            let rain = match &fades {
                Some(r) => Rain::Sampled(r),
                None => Rain::Nominal,
            };
            let points = discretize(region, setup.m1, setup.m2, setup.mode)?;
            let compose = |pos: GroundPosition| {
                compose_channel(setup.sat, pos, setup.params, rain, setup.pointing).map(|c| c.h_tilde)
            };
            // par_iter().collect() writes results by index, so ordering is fixed.
            let channels = points
                .par_iter()
                .map(|&p| compose(p))
                .collect::<Result<Vec<_>>>()?;
            let center_channel = compose(region.center())?;
            Ok(EveRegionGrid {
                region: *region,
                m1: setup.m1,
                m2: setup.m2,
                points,
                channels,
                center_channel,
            })
        })
        .collect()
}
