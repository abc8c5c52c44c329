//! Flat-Earth downlink geometry.
//!
//! Ground positions live in a local tangent plane (km, x east / y north)
//! anchored at the sub-satellite point. The satellite sits at
//! `(0, 0, altitude)`; each feed element is displaced from that point by a
//! small offset given in meters.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Geostationary altitude above the sub-satellite point, km.
pub const GEO_ALTITUDE_KM: f64 = 35_786.0;

/// Sanity bound on ground coordinates, km.
pub const MAX_GROUND_KM: f64 = 10_000.0;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GroundPosition {
    pub x_km: f64,
    pub y_km: f64,
}

impl GroundPosition {
    pub fn new(x_km: f64, y_km: f64) -> Result<Self> {
        let ok = |v: f64| v.is_finite() && v.abs() <= MAX_GROUND_KM;
        if !ok(x_km) || !ok(y_km) {
            return Err(Error::domain(format!(
                "ground position ({x_km}, {y_km}) km outside ±{MAX_GROUND_KM} km"
            )));
        }
        Ok(Self { x_km, y_km })
    }

    pub const fn origin() -> Self {
        Self { x_km: 0.0, y_km: 0.0 }
    }

    fn to_xyz(self) -> [f64; 3] {
        [self.x_km, self.y_km, 0.0]
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SatelliteGeometry {
    altitude_km: f64,
    antenna_offsets_m: Vec<[f64; 3]>,
    beam_centers: Vec<GroundPosition>,
}

impl SatelliteGeometry {
    pub fn new(
        altitude_km: f64,
        antenna_offsets_m: Vec<[f64; 3]>,
        beam_centers: Vec<GroundPosition>,
    ) -> Result<Self> {
        if !(altitude_km.is_finite() && altitude_km > 0.0) {
            return Err(Error::domain(format!("altitude {altitude_km} km must be > 0")));
        }
        if antenna_offsets_m.is_empty() {
            return Err(Error::domain("satellite needs at least one antenna"));
        }
        if antenna_offsets_m.len() != beam_centers.len() {
            return Err(Error::domain(format!(
                "{} antennas but {} beam centers; one beam per antenna is required",
                antenna_offsets_m.len(),
                beam_centers.len()
            )));
        }
        if antenna_offsets_m.iter().flatten().any(|v| !v.is_finite()) {
            return Err(Error::domain("antenna offsets must be finite"));
        }
        Ok(Self {
            altitude_km,
            antenna_offsets_m,
            beam_centers,
        })
    }

    /// `n` feeds on a hexagonal lattice of `pitch_m` spacing, each steering a
    /// beam to the matching point of a hexagonal ground lattice of
    /// `beam_spacing_km` spacing. The first beam is centered on the origin.
    pub fn hexagonal(n: usize, altitude_km: f64, pitch_m: f64, beam_spacing_km: f64) -> Result<Self> {
        let cells = hex_lattice(n);
        let offsets = cells.iter().map(|&(x, y)| [x * pitch_m, y * pitch_m, 0.0]).collect();
        let centers = cells
            .iter()
            .map(|&(x, y)| GroundPosition::new(x * beam_spacing_km, y * beam_spacing_km))
            .collect::<Result<Vec<_>>>()?;
        Self::new(altitude_km, offsets, centers)
    }

    pub fn altitude_km(&self) -> f64 {
        self.altitude_km
    }

    pub fn num_antennas(&self) -> usize {
        self.antenna_offsets_m.len()
    }

    pub fn antenna_offsets_m(&self) -> &[[f64; 3]] {
        &self.antenna_offsets_m
    }

    pub fn beam_centers(&self) -> &[GroundPosition] {
        &self.beam_centers
    }

    /// Keeps only the first `n` antennas and their beams.
    pub fn truncated(&self, n: usize) -> Result<Self> {
        let n = n.min(self.num_antennas());
        Self::new(
            self.altitude_km,
            self.antenna_offsets_m[..n].to_vec(),
            self.beam_centers[..n].to_vec(),
        )
    }

    fn center_xyz(&self) -> [f64; 3] {
        [0.0, 0.0, self.altitude_km]
    }

    fn antenna_xyz(&self, n: usize) -> [f64; 3] {
        let o = self.antenna_offsets_m[n];
        [o[0] * 1e-3, o[1] * 1e-3, self.altitude_km + o[2] * 1e-3]
    }
}

/// Unit-spaced hexagonal lattice points, ordered ring by ring starting at
/// the origin.
fn hex_lattice(n: usize) -> Vec<(f64, f64)> {
    let s3 = 3f64.sqrt() / 2.0;
    // Axial directions of the six ring sides.
    let dirs = [(1.0, 0.0), (0.5, s3), (-0.5, s3), (-1.0, 0.0), (-0.5, -s3), (0.5, -s3)];
    let mut out = vec![(0.0, 0.0)];
    let mut ring = 1;
    while out.len() < n {
        // Start at ring·dir[4] and walk each side.
        let (mut x, mut y) = (ring as f64 * dirs[4].0, ring as f64 * dirs[4].1);
        for d in dirs.iter() {
            for _ in 0..ring {
                out.push((x, y));
                x += d.0;
                y += d.1;
            }
        }
        ring += 1;
    }
    out.truncate(n);
    out
}

/// How a ground terminal points its antenna.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TerminalPointing {
    /// Boresight tracks the satellite, so the off-boresight angle is zero.
    #[default]
    TrackSatellite,
    /// Boresight is offset from the satellite line of sight by a fixed angle.
    Mispointed { offset_rad: f64 },
}

/// Per-antenna path lengths and beam angles for one ground position.
#[derive(Debug, Clone, PartialEq)]
pub struct LinkGeometry {
    /// Distance from each antenna to the terminal, km.
    pub distances_km: Vec<f64>,
    /// Angle at the satellite between the terminal and each beam center, rad.
    pub beam_angles_rad: Vec<f64>,
    /// Terminal off-boresight angle, rad.
    pub off_boresight_rad: f64,
}

pub fn link_geometry(
    sat: &SatelliteGeometry,
    pos: GroundPosition,
    pointing: TerminalPointing,
) -> Result<LinkGeometry> {
    let user = pos.to_xyz();
    let center = sat.center_xyz();

    let distances_km = (0..sat.num_antennas())
        .map(|n| {
            let d = norm3(sub3(user, sat.antenna_xyz(n)));
            if d > 0.0 {
                Ok(d)
            } else {
                Err(Error::domain("terminal coincides with an antenna"))
            }
        })
        .collect::<Result<Vec<_>>>()?;

    let los = sub3(user, center);
    let beam_angles_rad = sat
        .beam_centers()
        .iter()
        .map(|bc| angle_between(los, sub3(bc.to_xyz(), center)))
        .collect();

    let off_boresight_rad = match pointing {
        TerminalPointing::TrackSatellite => 0.0,
        TerminalPointing::Mispointed { offset_rad } => offset_rad.abs(),
    };

    Ok(LinkGeometry {
        distances_km,
        beam_angles_rad,
        off_boresight_rad,
    })
}

fn sub3(a: [f64; 3], b: [f64; 3]) -> [f64; 3] {
    [a[0] - b[0], a[1] - b[1], a[2] - b[2]]
}

fn dot3(a: [f64; 3], b: [f64; 3]) -> f64 {
    a[0] * b[0] + a[1] * b[1] + a[2] * b[2]
}

fn norm3(a: [f64; 3]) -> f64 {
    dot3(a, a).sqrt()
}

fn cross3(a: [f64; 3], b: [f64; 3]) -> [f64; 3] {
    [
        a[1] * b[2] - a[2] * b[1],
        a[2] * b[0] - a[0] * b[2],
        a[0] * b[1] - a[1] * b[0],
    ]
}

/// atan2 form; stays accurate for the sub-degree angles typical at GEO.
fn angle_between(a: [f64; 3], b: [f64; 3]) -> f64 {
    norm3(cross3(a, b)).atan2(dot3(a, b))
}
