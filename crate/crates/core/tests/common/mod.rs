#![allow(dead_code)]

use rand::Rng;
use rand_distr::StandardNormal;
use satsec::harness::{build_scenario, BuiltScenario, ScenarioConfig};
use satsec::objective::{EveMode, ProblemInstance};
use satsec::uncertainty::{EveRegion, EveRegionGrid};
use satsec::Complex64;

pub fn cn<R: Rng>(rng: &mut R) -> Complex64 {
    let re: f64 = rng.sample(StandardNormal);
    let im: f64 = rng.sample(StandardNormal);
    Complex64::new(re, im) * std::f64::consts::FRAC_1_SQRT_2
}

pub fn cvec<R: Rng>(rng: &mut R, n: usize) -> Vec<Complex64> {
    (0..n).map(|_| cn(rng)).collect()
}

pub fn unit_modulus<R: Rng>(rng: &mut R, n: usize, p: f64) -> Vec<Complex64> {
    (0..n)
        .map(|_| Complex64::from_polar(p.sqrt(), rng.random_range(0.0..std::f64::consts::TAU)))
        .collect()
}

/// Gaussian channels, `k` regions with `m×m` grids, LU channel twice as strong.
pub fn random_instance<R: Rng>(rng: &mut R, n: usize, k: usize, m: usize, mode: EveMode) -> ProblemInstance {
    let grids = (0..k)
        .map(|_| {
            let region = EveRegion::new(0.0, 10.0, 0.0, 10.0).unwrap();
            let channels = (0..m * m).map(|_| cvec(rng, n)).collect();
            EveRegionGrid::from_channels(region, m, m, channels, cvec(rng, n)).unwrap()
        })
        .collect();
    let hs: Vec<Complex64> = cvec(rng, n).into_iter().map(|h| h * 2.0).collect();
    ProblemInstance::new(hs, grids, 0.5, 1.0, 100.0, mode).unwrap()
}

pub fn default_scenario(mode: EveMode) -> BuiltScenario {
    build_scenario(&ScenarioConfig::default(), mode, 42).unwrap()
}

/// Directional derivative of `Γ` along `d` by Richardson-extrapolated
/// central differences, compared against `Re{∇Γᴴd}`; returns the relative error.
pub fn gradient_fd_error(inst: &ProblemInstance, w: &[Complex64], d: &[Complex64], eta: f64) -> f64 {
    use satsec::objective::{gamma_gradient, gamma_objective};
    let f = |t: f64| {
        let x: Vec<Complex64> = w.iter().zip(d).map(|(a, b)| a + b * t).collect();
        gamma_objective(&x, inst, eta)
    };
    let central = |t: f64| (f(t) - f(-t)) / (2.0 * t);
    let t = 1e-4;
    let fd = (4.0 * central(t / 2.0) - central(t)) / 3.0;
    let g = gamma_gradient(w, inst, eta);
    let an: f64 = g.iter().zip(d).map(|(g, d)| (g.conj() * d).re).sum();
    (fd - an).abs() / an.abs()
}

/// Projection onto `{w : |h_sᴴw|² ≥ γ}` by brute force: only the coefficient
/// `α` of `h_s/‖h_s‖` is free, and `(|α|, arg α)` is searched on a grid that
/// is repeatedly zoomed around its best point.
pub fn sweep_projection(c: &[Complex64], h: &[Complex64], gamma: f64) -> Vec<Complex64> {
    let hn = h.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
    let u: Vec<Complex64> = h.iter().map(|z| z / hn).collect();
    let alpha_c: Complex64 = u.iter().zip(c).map(|(u, c)| u.conj() * c).sum();
    let r_min = gamma.sqrt() / hn;
    let cost = |s: f64, phi: f64| (Complex64::from_polar(s, phi) - alpha_c).norm_sqr();

    let steps = 200;
    let (mut s_lo, mut s_hi) = (r_min, r_min + 2.0 * (r_min + alpha_c.norm()));
    let (mut p_lo, mut p_hi) = (0.0, std::f64::consts::TAU);
    let mut best = (f64::INFINITY, r_min, 0.0);
    for _ in 0..14 {
        for i in 0..=steps {
            let s = s_lo + (s_hi - s_lo) * i as f64 / steps as f64;
            for j in 0..=steps {
                let phi = p_lo + (p_hi - p_lo) * j as f64 / steps as f64;
                let v = cost(s, phi);
                if v < best.0 {
                    best = (v, s, phi);
                }
            }
        }
        let ds = 4.0 * (s_hi - s_lo) / steps as f64;
        let dp = 4.0 * (p_hi - p_lo) / steps as f64;
        s_lo = (best.1 - ds).max(r_min);
        s_hi = best.1 + ds;
        p_lo = best.2 - dp;
        p_hi = best.2 + dp;
    }
    let alpha = Complex64::from_polar(best.1, best.2);
    c.iter().zip(&u).map(|(c, u)| c + u * (alpha - alpha_c)).collect()
}

/// Largest `‖∇Γ(a) − ∇Γ(b)‖ / ‖a − b‖` over `pairs` sampled pairs inside
/// the ball `‖w‖² ≤ pN`, half of them close together.
pub fn max_empirical_lipschitz<R: Rng>(rng: &mut R, inst: &ProblemInstance, eta: f64, pairs: usize) -> f64 {
    use satsec::objective::gamma_gradient;
    let n = inst.num_antennas();
    let radius = (inst.p * n as f64).sqrt();
    let into_ball = |v: Vec<Complex64>| {
        let norm = v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        if norm > radius {
            v.into_iter().map(|z| z * (radius / norm)).collect()
        } else {
            v
        }
    };
    let mut worst: f64 = 0.0;
    for k in 0..pairs {
        let a = into_ball(cvec(rng, n).into_iter().map(|z| z * radius / (n as f64).sqrt()).collect());
        let b = if k % 2 == 0 {
            into_ball(a.iter().zip(cvec(rng, n)).map(|(a, d)| a + d * 1e-3).collect())
        } else {
            into_ball(unit_modulus(rng, n, inst.p))
        };
        let ga = gamma_gradient(&a, inst, eta);
        let gb = gamma_gradient(&b, inst, eta);
        let num = ga.iter().zip(&gb).map(|(x, y)| (x - y).norm_sqr()).sum::<f64>().sqrt();
        let den = a.iter().zip(&b).map(|(x, y)| (x - y).norm_sqr()).sum::<f64>().sqrt();
        if den > 0.0 {
            worst = worst.max(num / den);
        }
    }
    worst
}
