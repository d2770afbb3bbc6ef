//! Special functions and generic numerical routines.

mod quadrature;
mod roots;
mod zeta;

pub use quadrature::{
    integrate_1d, integrate_2d, try_integrate_1d, try_integrate_nested, QuadratureSpec, Rect,
};
pub use roots::{find_root_bracketed, try_find_root_bracketed};
pub use zeta::{hurwitz_zeta, shifted_pair_difference};

use crate::error::{Error, Result};

/// Solves `a * x = b` for a 2x2 system by Cramer's rule.
pub fn solve_2x2(a: [[f64; 2]; 2], b: [f64; 2]) -> Result<[f64; 2]> {
    let det = a[0][0] * a[1][1] - a[0][1] * a[1][0];
    let scale = (a[0][0] * a[1][1]).abs().max((a[0][1] * a[1][0]).abs());
    if !(det.abs() > 64.0 * f64::EPSILON * scale) {
        return Err(Error::Singular(det));
    }
    Ok([
        (b[0] * a[1][1] - a[0][1] * b[1]) / det,
        (a[0][0] * b[1] - b[0] * a[1][0]) / det,
    ])
}

/// `n` evenly spaced points from `lo` to `hi` inclusive (`[lo]` when `n == 1`).
pub fn linspace(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    match n {
        0 => Vec::new(),
        1 => vec![lo],
        _ => (0..n).map(|i| lo + (hi - lo) * i as f64 / (n - 1) as f64).collect(),
    }
}

/// `n` logarithmically spaced points from `lo` to `hi` inclusive; both must be positive.
pub fn logspace(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    linspace(lo.ln(), hi.ln(), n).into_iter().map(f64::exp).collect()
}

pub fn to_db(linear: f64) -> f64 {
    10.0 * linear.log10()
}

pub fn from_db(db: f64) -> f64 {
    10f64.powf(db / 10.0)
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    #[test]
    fn solve_examples() {
        assert_eq!(solve_2x2([[1.0, 0.0], [0.0, 1.0]], [3.0, 4.0]).unwrap(), [3.0, 4.0]);
        assert_eq!(solve_2x2([[2.0, 0.0], [0.0, 4.0]], [2.0, 4.0]).unwrap(), [1.0, 1.0]);
        assert_eq!(solve_2x2([[1.0, 1.0], [1.0, -1.0]], [2.0, 0.0]).unwrap(), [1.0, 1.0]);
    }

    #[test]
    fn singular_detected() {
        let err = solve_2x2([[1.0, 2.0], [2.0, 4.0]], [1.0, 1.0]).unwrap_err();
        assert!(matches!(err, Error::Singular(_)));
    }

    #[test]
    fn cotangent_series_identity() {
        // sum_{j>=1} 1/(j^2 - x^2) = (1 - pi x cot(pi x)) / (2 x^2)
        for &x in &[0.005f64, 0.1, 0.4] {
            let n = 1_000_000;
            let mut direct = 0.0;
            for j in (1..=n).rev() {
                let j = j as f64;
                direct += 1.0 / (j * j - x * x);
            }
            direct += 1.0 / (n as f64 + 0.5); // tail of sum j^-2 beyond n
            let closed = (1.0 - PI * x / (PI * x).tan()) / (2.0 * x * x);
            assert!((direct - closed).abs() < 1e-8, "x={x}: {direct} vs {closed}");
        }
    }

    #[test]
    fn grids() {
        assert_eq!(linspace(0.0, 1.0, 3), vec![0.0, 0.5, 1.0]);
        assert_eq!(linspace(2.8, 2.8, 1), vec![2.8]);
        let l = logspace(0.1, 10.0, 3);
        assert!((l[1] - 1.0).abs() < 1e-15);
        assert!((to_db(from_db(-7.967)) + 7.967).abs() < 1e-12);
    }
}
