//! Hurwitz zeta function by Euler-Maclaurin summation.
//!
//! `zeta(s, q) = sum_{n>=0} (n + q)^(-s)` is split into `N` explicit terms plus
//! the Euler-Maclaurin tail: the integral `(N+q)^(1-s)/(s-1)`, the half end
//! term, and Bernoulli corrections `B_2k/(2k)! * (s)_(2k-1) * (N+q)^(-s-2k+1)`.
//! `N` grows until the last correction falls below 1e-16 of the total.

use crate::error::{Error, Result};

/// B_2k / (2k)! for k = 1..=12.
const BERNOULLI_OVER_FACTORIAL: [f64; 12] = [
    1.0 / 12.0,
    -1.0 / 720.0,
    1.0 / 30240.0,
    -1.0 / 1209600.0,
    1.0 / 47900160.0,
    -691.0 / 1307674368000.0,
    1.0 / 74724249600.0,
    -3617.0 / 10670622842880000.0,
    43867.0 / 5109094217170944000.0,
    -174611.0 / 802857662698291200000.0,
    77683.0 / 14101100039391805440000.0,
    -236364091.0 / 1693824136731743669452800000.0,
];

const MIN_EXPLICIT_TERMS: usize = 9;
const MAX_EXPLICIT_TERMS: usize = 1 << 16;

/// Hurwitz zeta `zeta(a, q)` for `a > 1`, `q > 0`.
pub fn hurwitz_zeta(a: f64, q: f64) -> Result<f64> {
    if !(a > 1.0) || !a.is_finite() {
        return Err(Error::Domain(format!("hurwitz_zeta requires a > 1, got {a}")));
    }
    if !(q > 0.0) || !q.is_finite() {
        return Err(Error::Domain(format!("hurwitz_zeta requires q > 0, got {q}")));
    }
    let mut n = MIN_EXPLICIT_TERMS + a.ceil() as usize;
    loop {
        let (value, last) = euler_maclaurin(a, q, n);
        if last.abs() <= 1e-16 * value.abs() || n >= MAX_EXPLICIT_TERMS {
            return Ok(value);
        }
        n *= 2;
    }
}

/// Returns the zeta estimate with `n` explicit terms and the size of the last
/// Bernoulli correction applied.
fn euler_maclaurin(s: f64, q: f64, n: usize) -> (f64, f64) {
    // Sum small terms first.
    let mut head = 0.0;
    for k in (0..n).rev() {
        head += (k as f64 + q).powf(-s);
    }
    let w = n as f64 + q;
    let w_pow = w.powf(-s);
    let mut total = head + w * w_pow / (s - 1.0) + 0.5 * w_pow;

    // Rising factorial (s)_(2k-1) and power w^(-s-2k+1), updated in place.
    let mut rising = s;
    let mut power = w_pow / w;
    let mut last = f64::INFINITY;
    for (k, coeff) in BERNOULLI_OVER_FACTORIAL.iter().enumerate() {
        let term = coeff * rising * power;
        total += term;
        last = term;
        if term.abs() <= 1e-17 * total.abs() {
            break;
        }
        let j = 2.0 * (k as f64 + 1.0);
        rising *= (s + j - 1.0) * (s + j);
        power /= w * w;
    }
    (total, last)
}

/// `sum_{j>=1} [(j + x)^(-s) - (j - x)^(-s)]` for `s > 0`, `0 <= x < 1`.
///
/// Equals `zeta(s, 1+x) - zeta(s, 1-x)` when `s > 1` but stays finite for
/// `0 < s <= 1`, where each zeta alone diverges.
pub fn shifted_pair_difference(s: f64, x: f64) -> Result<f64> {
    if !(s > 0.0) {
        return Err(Error::Domain(format!("shifted_pair_difference requires s > 0, got {s}")));
    }
    if !(0.0..1.0).contains(&x) {
        return Err(Error::Domain(format!("shifted_pair_difference requires 0 <= x < 1, got {x}")));
    }
    if x == 0.0 {
        return Ok(0.0);
    }
    let n = 16 + s.ceil() as usize;
    let mut head = 0.0;
    for j in (1..n).rev() {
        let j = j as f64;
        head += (j + x).powf(-s) - (j - x).powf(-s);
    }
    let (up, down) = (n as f64 + x, n as f64 - x);
    // integral_N^inf [(t+x)^-s - (t-x)^-s] dt, written to avoid cancellation near s = 1
    let ln_ratio = (down / up).ln();
    let integral = if (s - 1.0).abs() < 1e-12 {
        ln_ratio
    } else {
        up.powf(1.0 - s) * ((1.0 - s) * ln_ratio).exp_m1() / (1.0 - s)
    };
    let mut total = head + integral + 0.5 * (up.powf(-s) - down.powf(-s));
    let mut rising = s;
    let (mut p_up, mut p_down) = (up.powf(-s - 1.0), down.powf(-s - 1.0));
    for (k, coeff) in BERNOULLI_OVER_FACTORIAL.iter().enumerate() {
        let term = coeff * rising * (p_up - p_down);
        total += term;
        if term.abs() <= 1e-17 * total.abs().max(1e-300) {
            break;
        }
        let j = 2.0 * (k as f64 + 1.0);
        rising *= (s + j - 1.0) * (s + j);
        p_up /= up * up;
        p_down /= down * down;
    }
    Ok(total)
}
