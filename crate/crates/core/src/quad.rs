//! Adaptive Simpson quadrature with kink pre-splitting.
//!
//! The rate integrands here look like |cos(2Jt+φ)| times an envelope: smooth
//! except at isolated zeros where the absolute value folds. A coarse scan
//! locates the local minima of the integrand (the fold points, where the
//! inner derivative changes sign), brackets each one by golden-section
//! search, and splits the integration interval there before the adaptive
//! recursion runs.

use crate::error::{QresError, Result};

const SCAN_POINTS: usize = 96;
const MAX_DEPTH: usize = 48;

/// ∫_a^b f within absolute tolerance `tol`.
pub fn integrate(f: &dyn Fn(f64) -> f64, a: f64, b: f64, tol: f64) -> Result<f64> {
    if !(a.is_finite() && b.is_finite()) {
        return Err(QresError::Quadrature("non-finite interval".into()));
    }
    if b < a {
        return integrate(f, b, a, tol).map(|v| -v);
    }
    if b == a {
        return Ok(0.0);
    }
    let mut cuts = vec![a];
    cuts.extend(detect_folds(f, a, b));
    cuts.push(b);
    let n_seg = cuts.len() - 1;
    let mut total = 0.0;
    for w in cuts.windows(2) {
        total += simpson_segment(f, w[0], w[1], tol / n_seg as f64)?;
    }
    Ok(total)
}

/// Local minima of f on a uniform scan, refined by golden-section search.
fn detect_folds(f: &dyn Fn(f64) -> f64, a: f64, b: f64) -> Vec<f64> {
    let h = (b - a) / SCAN_POINTS as f64;
    let values: Vec<f64> = (0..=SCAN_POINTS).map(|i| f(a + i as f64 * h)).collect();
    let mut folds = Vec::new();
    for i in 1..SCAN_POINTS {
        if values[i] <= values[i - 1] && values[i] <= values[i + 1] {
            let lo = a + (i - 1) as f64 * h;
            let hi = a + (i + 1) as f64 * h;
            folds.push(golden_min(f, lo, hi));
        }
    }
    folds.sort_by(|x, y| x.partial_cmp(y).unwrap());
    folds.dedup_by(|x, y| (*x - *y).abs() < 1e-12 * (b - a));
    folds
}

fn golden_min(f: &dyn Fn(f64) -> f64, mut lo: f64, mut hi: f64) -> f64 {
    const INV_PHI: f64 = 0.618_033_988_749_894_9;
    let mut x1 = hi - INV_PHI * (hi - lo);
    let mut x2 = lo + INV_PHI * (hi - lo);
    let mut f1 = f(x1);
    let mut f2 = f(x2);
    for _ in 0..60 {
        if f1 < f2 {
            hi = x2;
            x2 = x1;
            f2 = f1;
            x1 = hi - INV_PHI * (hi - lo);
            f1 = f(x1);
        } else {
            lo = x1;
            x1 = x2;
            f1 = f2;
            x2 = lo + INV_PHI * (hi - lo);
            f2 = f(x2);
        }
        if hi - lo < 1e-13 * (1.0 + hi.abs()) {
            break;
        }
    }
    0.5 * (lo + hi)
}

fn simpson_segment(f: &dyn Fn(f64) -> f64, a: f64, b: f64, tol: f64) -> Result<f64> {
    let m = 0.5 * (a + b);
    let fa = f(a);
    let fm = f(m);
    let fb = f(b);
    let whole = (b - a) * (fa + 4.0 * fm + fb) / 6.0;
    adaptive(f, a, b, fa, fm, fb, whole, tol, MAX_DEPTH)
}

#[allow(clippy::too_many_arguments)]
fn adaptive(
    f: &dyn Fn(f64) -> f64,
    a: f64,
    b: f64,
    fa: f64,
    fm: f64,
    fb: f64,
    whole: f64,
    tol: f64,
    depth: usize,
) -> Result<f64> {
    let m = 0.5 * (a + b);
    let lm = 0.5 * (a + m);
    let rm = 0.5 * (m + b);
    let flm = f(lm);
    let frm = f(rm);
    let left = (m - a) * (fa + 4.0 * flm + fm) / 6.0;
    let right = (b - m) * (fm + 4.0 * frm + fb) / 6.0;
    let delta = left + right - whole;
    if delta.abs() <= 15.0 * tol {
        return Ok(left + right + delta / 15.0);
    }
    if depth == 0 {
        return Err(QresError::Quadrature(format!(
            "max recursion depth on [{a}, {b}], residual {:.3e}",
            delta.abs() / 15.0
        )));
    }
    Ok(adaptive(f, a, m, fa, flm, fm, left, 0.5 * tol, depth - 1)?
        + adaptive(f, m, b, fm, frm, fb, right, 0.5 * tol, depth - 1)?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn polynomial_is_exact() {
        let v = integrate(&|x| 3.0 * x * x, 0.0, 2.0, 1e-12).unwrap();
        assert_relative_eq!(v, 8.0, epsilon = 1e-11);
    }

    #[test]
    fn empty_and_reversed_intervals() {
        assert_eq!(integrate(&|x| x, 1.0, 1.0, 1e-9).unwrap(), 0.0);
        let v = integrate(&|x| x, 2.0, 0.0, 1e-10).unwrap();
        assert_relative_eq!(v, -2.0, epsilon = 1e-9);
    }

    #[test]
    fn absolute_cosine_with_folds() {
        // ∫₀^{2π} |cos x| dx = 4; folds at π/2 and 3π/2
        let v = integrate(&|x: f64| x.cos().abs(), 0.0, 2.0 * std::f64::consts::PI, 1e-10).unwrap();
        assert_relative_eq!(v, 4.0, epsilon = 1e-9);
    }

    #[test]
    fn damped_folded_oscillation() {
        // ∫₀^T e^{−γx}|cos(ωx)| dx against a dense trapezoid oracle
        let gamma = 5.0;
        let omega = 200.0;
        let f = |x: f64| (-gamma * x).exp() * (omega * x).cos().abs();
        let v = integrate(&f, 0.0, 0.5, 1e-10).unwrap();
        let n = 4_000_000usize;
        let h = 0.5 / n as f64;
        let mut oracle = 0.5 * (f(0.0) + f(0.5));
        for i in 1..n {
            oracle += f(i as f64 * h);
        }
        oracle *= h;
        assert_relative_eq!(v, oracle, epsilon = 1e-7);
    }
}
