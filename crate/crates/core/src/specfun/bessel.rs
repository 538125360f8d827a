//! Bessel functions of the first kind, integer order, real argument.
//!
//! Small arguments (relative to the order) use the ascending power series.
//! Everything else goes through Miller's downward recurrence normalized with
//! `J_0 + 2 Σ J_2k = 1`, which is stable for every order and argument we need.

use super::SpecFunError;

/// Largest supported `|n|`.
pub const MAX_ORDER: i32 = 200;

const RESCALE_ABOVE: f64 = 1e250;
const RESCALE_BY: f64 = 1e-250;

/// `J_n(x)`.
pub fn bessel_j(n: i32, x: f64) -> Result<f64, SpecFunError> {
    if n.abs() > MAX_ORDER {
        return Err(SpecFunError::OrderOutOfRange { order: n, max: MAX_ORDER });
    }
    if !x.is_finite() {
        return Err(SpecFunError::NonFiniteArgument(x));
    }
    let order = n.unsigned_abs();
    // J_{-n}(x) = (-1)^n J_n(x) and J_n(-x) = (-1)^n J_n(x).
    let flip = order % 2 == 1 && ((n < 0) != (x < 0.0));
    let value = bessel_j_nonneg(order, x.abs());
    Ok(if flip { -value } else { value })
}

/// `J_n(x)` for every `n` in `0..=max_order` at one argument.
///
/// Returned vector has `max_order + 1` entries, computed by a single Miller
/// sweep so the whole ladder is mutually consistent.
pub fn bessel_j_ladder(max_order: u32, x: f64) -> Result<Vec<f64>, SpecFunError> {
    if max_order > MAX_ORDER as u32 {
        return Err(SpecFunError::OrderOutOfRange { order: max_order as i32, max: MAX_ORDER });
    }
    if !x.is_finite() {
        return Err(SpecFunError::NonFiniteArgument(x));
    }
    let ax = x.abs();
    let mut out: Vec<f64> = (0..=max_order).map(|n| bessel_j_nonneg(n, ax)).collect();
    if x < 0.0 {
        for (n, v) in out.iter_mut().enumerate() {
            if n % 2 == 1 {
                *v = -*v;
            }
        }
    }
    Ok(out)
}

fn bessel_j_nonneg(n: u32, x: f64) -> f64 {
    if x == 0.0 {
        return if n == 0 { 1.0 } else { 0.0 };
    }
    let half = 0.5 * x;
    if half * half <= 0.5 * f64::from(n + 1) {
        power_series(n, x)
    } else {
        miller(n, x)
    }
}

/// `Σ_k (-1)^k (x/2)^{n+2k} / (k! (n+k)!)`; only called where the first term dominates.
fn power_series(n: u32, x: f64) -> f64 {
    let half = 0.5 * x;
    let mut lead = 1.0;
    for k in 1..=n {
        lead *= half / f64::from(k);
        if lead == 0.0 {
            return 0.0;
        }
    }
    let q = -half * half;
    let mut term = 1.0;
    let mut sum = 1.0;
    for k in 1..200u32 {
        term *= q / (f64::from(k) * f64::from(n + k));
        sum += term;
        if term.abs() <= f64::EPSILON * 0.25 * sum.abs() {
            break;
        }
    }
    lead * sum
}

fn miller(n: u32, x: f64) -> f64 {
    let top = f64::from(n).max(x);
    let mut start = (top + 50.0 + (40.0 * top).sqrt()).ceil() as u32;
    start += start % 2;

    let two_over_x = 2.0 / x;
    let mut above = 0.0; // J_{j+1}
    let mut current = 1.0; // J_j, unnormalized
    let mut norm = 0.0;
    let mut target = 0.0;
    if start == n {
        target = current;
    }
    for j in (1..=start).rev() {
        let below = f64::from(j) * two_over_x * current - above;
        above = current;
        current = below;
        if current.abs() > RESCALE_ABOVE {
            current *= RESCALE_BY;
            above *= RESCALE_BY;
            norm *= RESCALE_BY;
            target *= RESCALE_BY;
        }
        let idx = j - 1;
        if idx == n {
            target = current;
        }
        if idx % 2 == 0 {
            norm += if idx == 0 { current } else { 2.0 * current };
        }
    }
    target / norm
}
