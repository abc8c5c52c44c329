//! Bessel functions of the first kind for the orders used by the beam-gain
//! model.
//!
//! Small arguments use the ascending power series. Past [`SERIES_LIMIT`] the
//! series loses too many digits to cancellation (its terms peak near
//! `I_n(x) ~ e^x`), so Miller's backward recurrence with the
//! `J₀ + 2ΣJ₂ₖ = 1` normalization takes over.

use crate::error::{Error, Result};

/// Largest |x| evaluated with the power series.
pub const SERIES_LIMIT: f64 = 12.0;

/// Largest |x| accepted.
pub const MAX_ARGUMENT: f64 = 50.0;

/// `J_order(x)` for `order ∈ {1, 3}` and `|x| ≤ 50`, to about 1e-12 absolute.
pub fn bessel_j(order: u32, x: f64) -> Result<f64> {
    if order != 1 && order != 3 {
        return Err(Error::domain(format!(
            "Bessel order {order} not supported (expected 1 or 3)"
        )));
    }
    if !x.is_finite() || x.abs() > MAX_ARGUMENT {
        return Err(Error::domain(format!(
            "Bessel argument {x} outside [-{MAX_ARGUMENT}, {MAX_ARGUMENT}]"
        )));
    }
    Ok(bessel_j_unchecked(order, x))
}

pub(crate) fn bessel_j_unchecked(order: u32, x: f64) -> f64 {
    // J_n(-x) = (-1)^n J_n(x); both supported orders are odd.
    let sign = if x < 0.0 { -1.0 } else { 1.0 };
    let ax = x.abs();
    let v = if ax <= SERIES_LIMIT {
        series(order, ax)
    } else {
        miller(order, ax)
    };
    sign * v
}

fn series(order: u32, x: f64) -> f64 {
    let half = 0.5 * x;
    let q = -half * half;
    // (x/2)^n / n!
    let mut term = (1..=order).fold(1.0, |acc, k| acc * half / k as f64);
    let mut sum = term;
    for k in 1..200u32 {
        term *= q / (k as f64 * (k + order) as f64);
        sum += term;
        if term.abs() <= 1e-17 * sum.abs().max(1e-300) && k > 2 {
            break;
        }
    }
    sum
}

fn miller(order: u32, x: f64) -> f64 {
    let n = order as f64;
    let top = n.max(x);
    let mut start = (top + 20.0 + (60.0 * top).sqrt()) as usize;
    start += start % 2;

    let two_over_x = 2.0 / x;
    let mut j_next = 0.0;
    let mut j_cur = 1e-30;
    let mut even_sum = 0.0;
    let mut target = 0.0;
    for k in (1..=start).rev() {
        let j_prev = k as f64 * two_over_x * j_cur - j_next;
        j_next = j_cur;
        j_cur = j_prev;
        // j_cur now holds the unnormalized J_{k-1}.
        if j_cur.abs() > 1e250 {
            j_cur *= 1e-250;
            j_next *= 1e-250;
            even_sum *= 1e-250;
            target *= 1e-250;
        }
        let idx = k - 1;
        if idx == order as usize {
            target = j_cur;
        }
        if idx > 0 && idx % 2 == 0 {
            even_sum += j_cur;
        }
    }
    let norm = j_cur + 2.0 * even_sum;
    target / norm
}
