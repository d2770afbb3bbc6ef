//! Globally adaptive Gauss-Kronrod (7/15) quadrature.
//!
//! Semi-infinite ranges `[lo, +inf)` are mapped onto `[0, 1)` with
//! `x = lo + t / (1 - t)`. Two-dimensional integrals are evaluated as iterated
//! one-dimensional integrals, the inner one at a tolerance ten times tighter.

use std::cmp::Ordering;
use std::collections::BinaryHeap;

use crate::error::{Error, Result};

/// Tolerances for the adaptive integrators.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadratureSpec {
    pub abs_tol: f64,
    pub rel_tol: f64,
    pub max_subdivisions: usize,
}

impl Default for QuadratureSpec {
    fn default() -> Self {
        Self { abs_tol: 1e-9, rel_tol: 1e-9, max_subdivisions: 2000 }
    }
}

impl QuadratureSpec {
    pub fn new(abs_tol: f64, rel_tol: f64, max_subdivisions: usize) -> Result<Self> {
        let spec = Self { abs_tol, rel_tol, max_subdivisions };
        spec.validate()?;
        Ok(spec)
    }

    pub fn with_tol(tol: f64) -> Self {
        Self { abs_tol: tol, rel_tol: tol, ..Self::default() }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.abs_tol > 0.0) || !(self.rel_tol > 0.0) || self.max_subdivisions < 1 {
            return Err(Error::InvalidParams(format!(
                "quadrature tolerances must be positive with at least one subdivision: {self:?}"
            )));
        }
        Ok(())
    }

    /// Tolerance handed to the inner integral of an iterated integral.
    pub fn tightened(&self) -> Self {
        Self { abs_tol: self.abs_tol / 10.0, rel_tol: self.rel_tol / 10.0, ..*self }
    }
}

const XGK: [f64; 8] = [
    0.991455371120812639206854697526329,
    0.949107912342758524526189684047851,
    0.864864423359769072789712788640926,
    0.741531185599394439863864773280788,
    0.586087235467691130294144845693013,
    0.405845151377397166906606412076961,
    0.207784955007898467600689403773245,
    0.000000000000000000000000000000000,
];

const WGK: [f64; 8] = [
    0.022935322010529224963732008058970,
    0.063092092629978553290700663189204,
    0.104790010322250183839876322541518,
    0.140653259715525918745189590510238,
    0.169004726639267902826583426598550,
    0.190350578064785409913256402421014,
    0.204432940075298892414161999234649,
    0.209482141084727828012999174891714,
];

/// Gauss weights for the odd-indexed Kronrod nodes.
const WG: [f64; 4] = [
    0.129484966168869693270611432679082,
    0.279705391489276667901467771423780,
    0.381830050505118944950369775488975,
    0.417959183673469387755102040816327,
];

#[derive(Debug, Clone, Copy)]
struct Segment {
    lo: f64,
    hi: f64,
    value: f64,
    error: f64,
}

impl PartialEq for Segment {
    fn eq(&self, other: &Self) -> bool {
        self.error == other.error
    }
}
impl Eq for Segment {}
impl PartialOrd for Segment {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}
impl Ord for Segment {
    fn cmp(&self, other: &Self) -> Ordering {
        self.error.total_cmp(&other.error)
    }
}

fn gauss_kronrod<F>(f: &mut F, lo: f64, hi: f64) -> Result<Segment>
where
    F: FnMut(f64) -> Result<f64>,
{
    let center = 0.5 * (lo + hi);
    let half = 0.5 * (hi - lo);
    let fc = f(center)?;
    let mut kronrod = fc * WGK[7];
    let mut gauss = fc * WG[3];
    let mut res_abs = kronrod.abs();
    let mut fv1 = [0.0; 7];
    let mut fv2 = [0.0; 7];
    for j in 0..7 {
        let dx = half * XGK[j];
        let f1 = f(center - dx)?;
        let f2 = f(center + dx)?;
        fv1[j] = f1;
        fv2[j] = f2;
        kronrod += WGK[j] * (f1 + f2);
        res_abs += WGK[j] * (f1.abs() + f2.abs());
        if j % 2 == 1 {
            gauss += WG[j / 2] * (f1 + f2);
        }
    }
    let mean = 0.5 * kronrod;
    let mut res_asc = WGK[7] * (fc - mean).abs();
    for j in 0..7 {
        res_asc += WGK[j] * ((fv1[j] - mean).abs() + (fv2[j] - mean).abs());
    }
    let value = kronrod * half;
    res_abs *= half.abs();
    res_asc *= half.abs();
    let mut error = ((kronrod - gauss) * half).abs();
    if res_asc != 0.0 && error != 0.0 {
        error = res_asc * (200.0 * error / res_asc).powf(1.5).min(1.0);
    }
    if res_abs > f64::MIN_POSITIVE / (50.0 * f64::EPSILON) {
        error = error.max(50.0 * f64::EPSILON * res_abs);
    }
    if !value.is_finite() {
        return Err(Error::Domain(format!("non-finite integrand on [{lo}, {hi}]")));
    }
    Ok(Segment { lo, hi, value, error })
}

/// Adaptive integration of a fallible integrand over a finite interval.
fn adaptive<F>(mut f: F, lo: f64, hi: f64, spec: &QuadratureSpec) -> Result<f64>
where
    F: FnMut(f64) -> Result<f64>,
{
    if lo == hi {
        return Ok(0.0);
    }
    let first = gauss_kronrod(&mut f, lo, hi)?;
    let mut heap = BinaryHeap::new();
    let mut value = first.value;
    let mut error = first.error;
    heap.push(first);
    let mut subdivisions = 1;
    loop {
        let tol = spec.abs_tol.max(spec.rel_tol * value.abs());
        if error <= tol {
            return Ok(value);
        }
        if subdivisions >= spec.max_subdivisions {
            return Err(Error::NonConvergence { subdivisions, estimate: value, error });
        }
        let worst = heap.pop().expect("heap holds at least one segment");
        let mid = 0.5 * (worst.lo + worst.hi);
        if mid <= worst.lo || mid >= worst.hi {
            // interval at floating-point resolution; accept what we have
            return Ok(value);
        }
        let left = gauss_kronrod(&mut f, worst.lo, mid)?;
        let right = gauss_kronrod(&mut f, mid, worst.hi)?;
        value += left.value + right.value - worst.value;
        error += left.error + right.error - worst.error;
        heap.push(left);
        heap.push(right);
        subdivisions += 1;
        // resum occasionally to shed accumulated rounding in the running totals
        if subdivisions % 64 == 0 {
            value = heap.iter().map(|s| s.value).sum();
            error = heap.iter().map(|s| s.error).sum();
        }
    }
}

/// Fallible variant of [`integrate_1d`]; an integrand error aborts the integration.
pub fn try_integrate_1d<F>(mut f: F, lo: f64, hi: f64, spec: &QuadratureSpec) -> Result<f64>
where
    F: FnMut(f64) -> Result<f64>,
{
    spec.validate()?;
    if lo.is_nan() || hi.is_nan() || lo == f64::INFINITY || hi == f64::NEG_INFINITY {
        return Err(Error::Domain(format!("bad integration range [{lo}, {hi}]")));
    }
    if hi < lo {
        return try_integrate_1d(f, hi, lo, spec).map(|v| -v);
    }
    if lo == f64::NEG_INFINITY {
        return Err(Error::Domain("lower limit must be finite".into()));
    }
    if hi.is_infinite() {
        return adaptive(
            |t| {
                let one_minus = 1.0 - t;
                let x = lo + t / one_minus;
                Ok(f(x)? / (one_minus * one_minus))
            },
            0.0,
            1.0,
            spec,
        );
    }
    adaptive(f, lo, hi, spec)
}

/// Integrates `f` over `(lo, hi)`; `hi` may be `f64::INFINITY`.
pub fn integrate_1d<F>(mut f: F, lo: f64, hi: f64, spec: &QuadratureSpec) -> Result<f64>
where
    F: FnMut(f64) -> f64,
{
    try_integrate_1d(|x| Ok(f(x)), lo, hi, spec)
}

/// Axis-aligned integration rectangle; either upper limit may be infinite.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Rect {
    pub x: (f64, f64),
    pub y: (f64, f64),
}

impl Rect {
    pub fn new(x: (f64, f64), y: (f64, f64)) -> Self {
        Self { x, y }
    }
}

/// Iterated integral `int_x int_{y_lo(x)}^{y_hi(x)} f(x, y) dy dx`.
pub fn try_integrate_nested<L, F>(
    x_range: (f64, f64),
    mut y_range: L,
    mut f: F,
    spec: &QuadratureSpec,
) -> Result<f64>
where
    L: FnMut(f64) -> (f64, f64),
    F: FnMut(f64, f64) -> Result<f64>,
{
    let inner = spec.tightened();
    try_integrate_1d(
        |x| {
            let (lo, hi) = y_range(x);
            if hi <= lo {
                return Ok(0.0);
            }
            try_integrate_1d(|y| f(x, y), lo, hi, &inner)
        },
        x_range.0,
        x_range.1,
        spec,
    )
}

/// Integrates `f(x, y)` over a rectangle, inner axis `y`.
pub fn integrate_2d<F>(mut f: F, domain: Rect, spec: &QuadratureSpec) -> Result<f64>
where
    F: FnMut(f64, f64) -> f64,
{
    try_integrate_nested(domain.x, |_| domain.y, |x, y| Ok(f(x, y)), spec)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn spec() -> QuadratureSpec {
        QuadratureSpec::default()
    }

    #[test]
    fn one_dimensional_examples() {
        assert!((integrate_1d(|x| x, 0.0, 1.0, &spec()).unwrap() - 0.5).abs() < 1e-12);
        let e = integrate_1d(|x| (-x).exp(), 0.0, f64::INFINITY, &spec()).unwrap();
        assert!((e - 1.0).abs() < 1e-9);
        let p = integrate_1d(|x| 1.0 / (x * x), 1.0, f64::INFINITY, &spec()).unwrap();
        assert!((p - 1.0).abs() < 1e-9);
    }

    #[test]
    fn two_dimensional_examples() {
        let r = integrate_2d(|x, y| x * y, Rect::new((0.0, 1.0), (0.0, 1.0)), &spec()).unwrap();
        assert!((r - 0.25).abs() < 1e-12);
        let inf = f64::INFINITY;
        let r = integrate_2d(|x, y| (-x - y).exp(), Rect::new((0.0, inf), (0.0, inf)), &spec())
            .unwrap();
        assert!((r - 1.0).abs() < 1e-8);
        let r = integrate_2d(|_, _| 1.0, Rect::new((0.0, 2.0), (0.0, 3.0)), &spec()).unwrap();
        assert!((r - 6.0).abs() < 1e-12);
    }

    #[test]
    fn reversed_limits_flip_sign() {
        let r = integrate_1d(|x| x * x, 1.0, 0.0, &spec()).unwrap();
        assert!((r + 1.0 / 3.0).abs() < 1e-12);
    }

    #[test]
    fn nested_triangle() {
        // int_0^1 int_0^x 1 dy dx = 1/2
        let r = try_integrate_nested((0.0, 1.0), |x| (0.0, x), |_, _| Ok(1.0), &spec()).unwrap();
        assert!((r - 0.5).abs() < 1e-12);
    }

    #[test]
    fn non_convergence_is_reported() {
        let tight = QuadratureSpec { abs_tol: 1e-15, rel_tol: 1e-15, max_subdivisions: 2 };
        let err = integrate_1d(|x| (1.0 / x).sin(), 1e-3, 1.0, &tight).unwrap_err();
        assert!(matches!(err, Error::NonConvergence { .. }));
    }

    #[test]
    fn invalid_spec_rejected() {
        assert!(QuadratureSpec::new(0.0, 1e-9, 10).is_err());
        assert!(QuadratureSpec::new(1e-9, -1.0, 10).is_err());
        assert!(QuadratureSpec::new(1e-9, 1e-9, 0).is_err());
    }

    #[test]
    fn integrand_error_propagates() {
        let r = try_integrate_1d(
            |x| if x > 0.5 { Err(Error::Domain("boom".into())) } else { Ok(x) },
            0.0,
            1.0,
            &spec(),
        );
        assert!(matches!(r, Err(Error::Domain(_))));
    }

    #[test]
    fn halving_tolerance_is_stable() {
        let cases: Vec<(Box<dyn Fn(f64) -> f64>, f64, f64)> = vec![
            (Box::new(|x: f64| x.sqrt()), 0.0, 1.0),
            (Box::new(|x: f64| (-x * x).exp()), 0.0, f64::INFINITY),
            (Box::new(|x: f64| (1.0 + x).ln() / (1.0 + x * x)), 0.0, 1.0),
        ];
        let loose = QuadratureSpec::with_tol(1e-7);
        let half = QuadratureSpec::with_tol(5e-8);
        for (f, lo, hi) in &cases {
            let a = integrate_1d(f, *lo, *hi, &loose).unwrap();
            let b = integrate_1d(f, *lo, *hi, &half).unwrap();
            assert!((a - b).abs() < 1e-7 * a.abs().max(1.0));
        }
        let a = integrate_2d(|x, y| (x * y).sin(), Rect::new((0.0, 2.0), (0.0, 3.0)), &loose).unwrap();
        let b = integrate_2d(|x, y| (x * y).sin(), Rect::new((0.0, 2.0), (0.0, 3.0)), &half).unwrap();
        assert!((a - b).abs() < 1e-7 * a.abs().max(1.0));
    }
}
