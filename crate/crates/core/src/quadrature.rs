//! Numerical integration and interpolation on uniform samples.

use num_complex::Complex64;

use crate::error::{Error, Result};

/// Default absolute tolerance for adaptive integration.
pub const DEFAULT_TOLERANCE: f64 = 1e-10;

const MAX_DEPTH: u32 = 48;

/// Adaptive Simpson integration of `f` over `[a, b]` to absolute tolerance `tol`.
///
/// Panels that hit the recursion limit are accepted, and their error estimates
/// are summed; if that sum exceeds `tol` the call fails with the estimate.
pub fn adaptive_simpson<F>(f: F, a: f64, b: f64, tol: f64) -> Result<f64>
where
    F: Fn(f64) -> f64,
{
    if a == b {
        return Ok(0.0);
    }
    let fa = f(a);
    let fb = f(b);
    let m = 0.5 * (a + b);
    let fm = f(m);
    let whole = simpson(a, b, fa, fm, fb);
    let mut unresolved = 0.0;
    let value = refine(&f, a, b, fa, fm, fb, whole, tol, MAX_DEPTH, &mut unresolved);
    if !value.is_finite() {
        return Err(Error::Quadrature {
            estimate: f64::INFINITY,
            tolerance: tol,
        });
    }
    if unresolved > tol {
        return Err(Error::Quadrature {
            estimate: unresolved,
            tolerance: tol,
        });
    }
    Ok(value)
}

fn simpson(a: f64, b: f64, fa: f64, fm: f64, fb: f64) -> f64 {
    (b - a) / 6.0 * (fa + 4.0 * fm + fb)
}

#[allow(clippy::too_many_arguments)]
fn refine<F: Fn(f64) -> f64>(
    f: &F,
    a: f64,
    b: f64,
    fa: f64,
    fm: f64,
    fb: f64,
    whole: f64,
    tol: f64,
    depth: u32,
    unresolved: &mut f64,
) -> f64 {
    let m = 0.5 * (a + b);
    let lm = 0.5 * (a + m);
    let rm = 0.5 * (m + b);
    let flm = f(lm);
    let frm = f(rm);
    let left = simpson(a, m, fa, flm, fm);
    let right = simpson(m, b, fm, frm, fb);
    let delta = left + right - whole;
    if delta.abs() <= 15.0 * tol {
        return left + right + delta / 15.0;
    }
    if depth == 0 || !delta.is_finite() {
        *unresolved += delta.abs() / 15.0;
        return left + right + delta / 15.0;
    }
    refine(f, a, m, fa, flm, fm, left, 0.5 * tol, depth - 1, unresolved)
        + refine(f, m, b, fm, frm, fb, right, 0.5 * tol, depth - 1, unresolved)
}

/// Trapezoidal rule over uniformly spaced samples.
pub fn trapezoid(values: &[f64], step: f64) -> f64 {
    match values.len() {
        0 | 1 => 0.0,
        n => step * (values[1..n - 1].iter().sum::<f64>() + 0.5 * (values[0] + values[n - 1])),
    }
}

/// Trapezoid weight of sample `i` out of `n`, in units of the step.
pub fn trapezoid_weight(i: usize, n: usize) -> f64 {
    if i == 0 || i + 1 == n {
        0.5
    } else {
        1.0
    }
}

const STENCIL: usize = 6;

/// Six-point Lagrange interpolation of complex samples on a uniform grid.
///
/// Returns zero outside `[x0, x0 + (n−1)·step]`.
pub fn lagrange_uniform(values: &[Complex64], x0: f64, step: f64, x: f64) -> Complex64 {
    let n = values.len();
    if n == 0 {
        return Complex64::new(0.0, 0.0);
    }
    let s = (x - x0) / step;
    let last = (n - 1) as f64;
    if !(0.0..=last).contains(&s) {
        return Complex64::new(0.0, 0.0);
    }
    if n < STENCIL {
        // Linear fallback for tiny grids.
        let i = (s.floor() as usize).min(n.saturating_sub(2));
        let frac = s - i as f64;
        return values[i] * (1.0 - frac) + values[(i + 1).min(n - 1)] * frac;
    }
    let nearest = s.round();
    if (s - nearest).abs() < 1e-13 {
        return values[nearest as usize];
    }
    let base = (s.floor() as isize - (STENCIL as isize / 2 - 1)).clamp(0, (n - STENCIL) as isize) as usize;
    let mut acc = Complex64::new(0.0, 0.0);
    for j in 0..STENCIL {
        let mut w = 1.0;
        let sj = (base + j) as f64;
        for k in 0..STENCIL {
            if k != j {
                let sk = (base + k) as f64;
                w *= (s - sk) / (sj - sk);
            }
        }
        acc += values[base + j] * w;
    }
    acc
}
