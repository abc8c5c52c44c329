//! Small dense complex-vector helpers.
//!
//! Problem sizes here are a handful of antennas, so plain slices of
//! [`Complex64`] are used throughout rather than a matrix library.

use num_complex::Complex64;

/// `aᴴb = Σ conj(a_n)·b_n`.
pub fn inner(a: &[Complex64], b: &[Complex64]) -> Complex64 {
    debug_assert_eq!(a.len(), b.len());
    a.iter().zip(b).map(|(x, y)| x.conj() * y).sum()
}

pub fn norm_sqr(a: &[Complex64]) -> f64 {
    a.iter().map(|z| z.norm_sqr()).sum()
}

pub fn norm(a: &[Complex64]) -> f64 {
    norm_sqr(a).sqrt()
}

/// `wᴴ(hhᴴ)w = |hᴴw|²`.
pub fn quad_form(h: &[Complex64], w: &[Complex64]) -> f64 {
    inner(h, w).norm_sqr()
}

pub fn sub(a: &[Complex64], b: &[Complex64]) -> Vec<Complex64> {
    a.iter().zip(b).map(|(x, y)| x - y).collect()
}

pub fn distance(a: &[Complex64], b: &[Complex64]) -> f64 {
    a.iter()
        .zip(b)
        .map(|(x, y)| (x - y).norm_sqr())
        .sum::<f64>()
        .sqrt()
}

/// `Re{aᴴb}`.
pub fn real_inner(a: &[Complex64], b: &[Complex64]) -> f64 {
    inner(a, b).re
}

/// Entrywise projection onto `{x : |x_n| = √p}`. Zero entries fall back to
/// the matching entry of `fallback`.
pub fn project_modulus(u: &[Complex64], p: f64, fallback: &[Complex64]) -> Vec<Complex64> {
    let amp = p.sqrt();
    u.iter()
        .zip(fallback)
        .map(|(z, prev)| {
            let m = z.norm();
            if m > 0.0 {
                z * (amp / m)
            } else {
                *prev
            }
        })
        .collect()
}

/// Largest deviation of `|w_n|` from `√p`.
pub fn modulus_deviation(w: &[Complex64], p: f64) -> f64 {
    let amp = p.sqrt();
    w.iter().map(|z| (z.norm() - amp).abs()).fold(0.0, f64::max)
}
