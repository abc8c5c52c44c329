//! Received-power maps over the ground.

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::channel::{compose_channel, GroundPosition, Rain};
use crate::cvec::quad_form;
use crate::error::{Error, Result};
use crate::harness::scenario::BuiltScenario;
use crate::objective::Beamformer;

/// Power values below this are reported at this floor.
pub const POWER_FLOOR_DB: f64 = -300.0;
/// Margin added around the LU and eavesdropper regions, km.
pub const MIN_MARGIN_KM: f64 = 50.0;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BeamSample {
    pub x_km: f64,
    pub y_km: f64,
    pub power_db: f64,
}

/// Normalized received power `|h̃(pos)ᴴw|²` in dB under nominal rain, with
/// the LU's noise figures.
pub fn received_power_db(w: &[Complex64], scenario: &BuiltScenario, pos: GroundPosition) -> Result<f64> {
    let ch = compose_channel(&scenario.sat, pos, &scenario.lu_params, Rain::Nominal, scenario.pointing)?;
    Ok((10.0 * quad_form(&ch.h_tilde, w).log10()).max(POWER_FLOOR_DB))
}

/// The sampled window `[x_min, x_max] × [y_min, y_max]`: every region and
/// the LU, padded by 10% of the span or [`MIN_MARGIN_KM`], whichever is larger.
pub fn beampattern_window(scenario: &BuiltScenario) -> [f64; 4] {
    let lu = scenario.lu_position;
    let (mut x0, mut x1, mut y0, mut y1) = (lu.x_km, lu.x_km, lu.y_km, lu.y_km);
    for r in &scenario.regions {
        x0 = x0.min(r.x_lower);
        x1 = x1.max(r.x_upper);
        y0 = y0.min(r.y_lower);
        y1 = y1.max(r.y_upper);
    }
    let mx = (0.1 * (x1 - x0)).max(MIN_MARGIN_KM);
    let my = (0.1 * (y1 - y0)).max(MIN_MARGIN_KM);
    [x0 - mx, x1 + mx, y0 - my, y1 + my]
}

fn axis(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    if n == 1 {
        return vec![0.5 * (lo + hi)];
    }
    let step = (hi - lo) / (n - 1) as f64;
    (0..n).map(|i| lo + i as f64 * step).collect()
}

/// `resolution²` samples, x-major, endpoints included.
pub fn emit_beampattern(w: &Beamformer, scenario: &BuiltScenario, resolution: usize) -> Result<Vec<BeamSample>> {
    if resolution == 0 {
        return Err(Error::domain("beampattern resolution must be >= 1"));
    }
    if w.weights().len() != scenario.sat.num_antennas() {
        return Err(Error::Dimension {
            expected: scenario.sat.num_antennas(),
            got: w.weights().len(),
        });
    }
    let [x0, x1, y0, y1] = beampattern_window(scenario);
    let xs = axis(x0, x1, resolution);
    let ys = axis(y0, y1, resolution);
    let points: Vec<GroundPosition> = xs
        .iter()
        .flat_map(|&x| ys.iter().map(move |&y| GroundPosition { x_km: x, y_km: y }))
        .collect();
    points
        .par_iter()
        .map(|&pos| {
            Ok(BeamSample {
                x_km: pos.x_km,
                y_km: pos.y_km,
                power_db: received_power_db(w.weights(), scenario, pos)?,
            })
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::baselines::mrt_bf;
    use crate::harness::config::ScenarioConfig;
    use crate::harness::scenario::build_scenario;
    use crate::objective::EveMode;

    fn single_antenna() -> BuiltScenario {
        let cfg = ScenarioConfig {
            num_antennas: 1,
            eve_centers_km: vec![[200.0, 0.0]],
            ..ScenarioConfig::default()
        };
        build_scenario(&cfg, EveMode::Ue, 1).unwrap()
    }

    #[test]
    fn row_count_is_resolution_squared() {
        let s = single_antenna();
        let w = mrt_bf(&s.instance).unwrap();
        assert_eq!(emit_beampattern(&w, &s, 7).unwrap().len(), 49);
        assert_eq!(emit_beampattern(&w, &s, 1).unwrap().len(), 1);
        assert!(emit_beampattern(&w, &s, 0).is_err());
    }

    #[test]
    fn single_antenna_surface_is_p_times_channel_gain() {
        let s = single_antenna();
        let w = mrt_bf(&s.instance).unwrap();
        for sample in emit_beampattern(&w, &s, 5).unwrap() {
            let pos = GroundPosition { x_km: sample.x_km, y_km: sample.y_km };
            let h = compose_channel(&s.sat, pos, &s.lu_params, Rain::Nominal, s.pointing).unwrap();
            let want = 10.0 * (s.instance.p * h.h_tilde[0].norm_sqr()).log10();
            assert!((sample.power_db - want).abs() < 1e-9);
        }
    }

    #[test]
    fn window_covers_everything() {
        let s = build_scenario(&ScenarioConfig::default(), EveMode::Ue, 1).unwrap();
        let [x0, x1, y0, y1] = beampattern_window(&s);
        for r in &s.regions {
            assert!(x0 < r.x_lower && r.x_upper < x1 && y0 < r.y_lower && r.y_upper < y1);
        }
        assert!(x0 < 0.0 && 0.0 < x1 && y0 < 0.0 && 0.0 < y1);
    }
}
