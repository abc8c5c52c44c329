mod common;

use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use satsec::channel::*;
use satsec::uncertainty::{discretize, grid_channels, EveRegion, GridMode, GridSetup, RainPolicy};
use satsec::Complex64;
use std::f64::consts::PI;

// Independent Bessel series, fine for the small arguments used here.
fn jn(n: i32, x: f64) -> f64 {
    let mut sum = 0.0;
    for k in 0..60 {
        let mut term = (x / 2.0).powi(2 * k + n);
        for i in 1..=k {
            term /= i as f64;
        }
        for i in 1..=(k + n) {
            term /= i as f64;
        }
        sum += if k % 2 == 0 { term } else { -term };
    }
    sum
}

fn sub3(a: [f64; 3], b: [f64; 3]) -> [f64; 3] {
    [a[0] - b[0], a[1] - b[1], a[2] - b[2]]
}

fn norm3(a: [f64; 3]) -> f64 {
    (a[0] * a[0] + a[1] * a[1] + a[2] * a[2]).sqrt()
}

#[test]
fn two_antenna_channel_by_hand() {
    let alt = 35786.0;
    let offsets = vec![[0.0, 0.0, 0.0], [0.8, -0.3, 0.0]];
    let centers = vec![GroundPosition { x_km: 0.0, y_km: 0.0 }, GroundPosition { x_km: 120.0, y_km: 40.0 }];
    let sat = SatelliteGeometry::new(alt, offsets.clone(), centers.clone()).unwrap();
    let params = LinkBudgetParams::default();
    let user = GroundPosition { x_km: 60.0, y_km: -25.0 };
    let rain = [1.1, 1.3];
    let got = compose_channel(&sat, user, &params, Rain::Sampled(&rain), TerminalPointing::TrackSatellite).unwrap();

    let sigma2: f64 = 1.38e-23 * 250e6 * 300.0;
    let s = [0.0, 0.0, alt];
    let u = [user.x_km, user.y_km, 0.0];
    let to_user = sub3(u, s);
    for n in 0..2 {
        let ant = [offsets[n][0] / 1000.0, offsets[n][1] / 1000.0, alt];
        let d_m = norm3(sub3(u, ant)) * 1000.0;
        let to_center = sub3([centers[n].x_km, centers[n].y_km, 0.0], s);
        let cos = (to_user[0] * to_center[0] + to_user[1] * to_center[1] + to_user[2] * to_center[2])
            / (norm3(to_user) * norm3(to_center));
        let phi = cos.min(1.0).acos();
        let x = 2.07123 * phi.sin() / (0.4f64.to_radians()).sin();
        let b = if x < 1e-8 {
            10f64.powf(5.2)
        } else {
            10f64.powf(5.2) * (jn(1, x) / (2.0 * x) + 36.0 * jn(3, x) / x.powi(3)).powi(2)
        };
        let gr: f64 = 1e4;
        let lambda = 299792458.0 / 20e9;
        let phase = -2.0 * PI * (d_m / lambda).fract();
        let h = Complex64::from_polar(gr.sqrt() * b.sqrt() / rain[n].sqrt() * lambda / (4.0 * PI * d_m), phase);
        // d/λ is ~2.4e9 cycles, so one ulp of distance moves the phase by ~1e-6 rad.
        let rel = (got.h[n].norm() - h.norm()).abs() / h.norm();
        assert!(rel < 1e-10, "antenna {n}: magnitude rel {rel:e}");
        let dphase = (got.h[n] / h).arg().abs();
        assert!(dphase < 1e-5, "antenna {n}: phase off by {dphase:e}");
        let ht = h / sigma2.sqrt();
        assert!((got.h_tilde[n].norm() - ht.norm()).abs() / ht.norm() < 1e-10);
    }
    assert!((got.sigma2 - sigma2).abs() < 1e-12 * sigma2);
}

#[test]
fn grid_channel_norms_vary_smoothly() {
    let sat = SatelliteGeometry::hexagonal(7, GEO_ALTITUDE_KM, 1.0, 300.0).unwrap();
    let params = LinkBudgetParams::default();
    let regions = [
        EveRegion::square(GroundPosition { x_km: 350.0, y_km: 0.0 }, 100.0).unwrap(),
        EveRegion::square(GroundPosition { x_km: -150.0, y_km: 350.0 }, 100.0).unwrap(),
    ];
    let setup = GridSetup {
        sat: &sat,
        params: &params,
        m1: 10,
        m2: 10,
        mode: GridMode::Standard,
        rain_policy: RainPolicy::Nominal,
        pointing: TerminalPointing::TrackSatellite,
    };
    let grids = grid_channels(&setup, &regions, &mut ChaCha8Rng::seed_from_u64(42)).unwrap();
    let norm = |h: &[Complex64]| h.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
    let mut worst: f64 = 0.0;
    for g in &grids {
        for i in 0..10 {
            for j in 0..10 {
                let a = norm(&g.channels[i * 10 + j]);
                if i + 1 < 10 {
                    worst = worst.max((norm(&g.channels[(i + 1) * 10 + j]) - a).abs() / a);
                }
                if j + 1 < 10 {
                    worst = worst.max((norm(&g.channels[i * 10 + j + 1]) - a).abs() / a);
                }
            }
        }
    }
    assert!(worst <= 0.10, "largest adjacent jump {worst}");
}

#[test]
fn identical_regions_give_identical_grids() {
    let sat = SatelliteGeometry::hexagonal(3, GEO_ALTITUDE_KM, 1.0, 300.0).unwrap();
    let params = LinkBudgetParams::default();
    let r = EveRegion::square(GroundPosition { x_km: 100.0, y_km: 80.0 }, 60.0).unwrap();
    let setup = GridSetup {
        sat: &sat,
        params: &params,
        m1: 4,
        m2: 3,
        mode: GridMode::Standard,
        rain_policy: RainPolicy::Nominal,
        pointing: TerminalPointing::TrackSatellite,
    };
    let grids = grid_channels(&setup, &[r, r], &mut ChaCha8Rng::seed_from_u64(0)).unwrap();
    assert_eq!(grids[0], grids[1]);
}

#[test]
fn sampled_channels_are_bit_reproducible() {
    let sat = SatelliteGeometry::hexagonal(7, GEO_ALTITUDE_KM, 1.0, 300.0).unwrap();
    let params = LinkBudgetParams::default();
    let make = || {
        let mut rng = ChaCha8Rng::seed_from_u64(42);
        let r = sample_rain(&params, &mut rng, 7);
        compose_channel(&sat, GroundPosition { x_km: 30.0, y_km: -70.0 }, &params, Rain::Sampled(&r), TerminalPointing::TrackSatellite)
            .unwrap()
    };
    let (a, b) = (make(), make());
    for (x, y) in a.h.iter().zip(&b.h) {
        assert_eq!(x.re.to_bits(), y.re.to_bits());
        assert_eq!(x.im.to_bits(), y.im.to_bits());
    }
}

proptest! {
    #[test]
    fn free_space_amplitude_times_distance_is_constant(d1 in 1.0f64..1e5, d2 in 1.0f64..1e5) {
        let a = free_space_response(d1, 20e9).unwrap().norm() * d1;
        let b = free_space_response(d2, 20e9).unwrap().norm() * d2;
        prop_assert!((a - b).abs() <= 1e-12 * a);
    }

    #[test]
    fn normalization_holds_everywhere(x in -2000.0f64..2000.0, y in -2000.0f64..2000.0, seed in 0u64..1000) {
        let sat = SatelliteGeometry::hexagonal(7, GEO_ALTITUDE_KM, 1.0, 300.0).unwrap();
        let params = LinkBudgetParams::default();
        let r = sample_rain(&params, &mut ChaCha8Rng::seed_from_u64(seed), 7);
        let c = compose_channel(&sat, GroundPosition { x_km: x, y_km: y }, &params, Rain::Sampled(&r), TerminalPointing::TrackSatellite).unwrap();
        let s = c.sigma2.sqrt();
        for (h, ht) in c.h.iter().zip(&c.h_tilde) {
            prop_assert!((ht * s - h).norm() <= 1e-12 * h.norm());
        }
    }

    #[test]
    fn receiver_mask_is_non_increasing_apart_from_the_floor_step(
        a in 0.0f64..90.0, b in 0.0f64..90.0, gmax in 32.0f64..60.0
    ) {
        let (lo, hi) = if a <= b { (a, b) } else { (b, a) };
        let g_lo = receiver_gain_db(lo.to_radians(), gmax);
        let g_hi = receiver_gain_db(hi.to_radians(), gmax);
        // 32 − 25·log10(48) sits 0.031 dB below the −10 dB floor.
        let allowance = if lo <= 48.0 && hi > 48.0 { 0.032 } else { 1e-12 };
        prop_assert!(g_hi <= g_lo + allowance, "{lo}° {g_lo} -> {hi}° {g_hi}");
    }

    #[test]
    fn grid_points_follow_lower_corner_plus_step(
        xl in -500.0f64..500.0, w in 0.0f64..300.0, yl in -500.0f64..500.0, h in 0.0f64..300.0,
        m1 in 1usize..12, m2 in 1usize..12
    ) {
        let r = EveRegion::new(xl, xl + w, yl, yl + h).unwrap();
        let pts = discretize(&r, m1, m2, GridMode::Standard).unwrap();
        prop_assert_eq!(pts.len(), m1 * m2);
        let dx = (r.x_upper - r.x_lower) / m1 as f64;
        let dy = (r.y_upper - r.y_lower) / m2 as f64;
        for i in 0..m1 {
            for j in 0..m2 {
                let p = pts[i * m2 + j];
                prop_assert_eq!(p.x_km, r.x_lower + i as f64 * dx);
                prop_assert_eq!(p.y_km, r.y_lower + j as f64 * dy);
            }
        }
    }
}
