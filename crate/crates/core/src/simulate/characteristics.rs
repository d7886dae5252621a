//! Method of characteristics for `u_t + G(u)(u_{x1} + u_{x2}) = 0` on the periodic unit square.

use crate::error::{Error, Result};

/// Threshold on the characteristic-map Jacobian below which a shock is reported.
pub const SHOCK_THRESHOLD: f64 = 1e-3;

const SCAN: usize = 200;
const FD_STEP: f64 = 1e-6;

/// Earliest time at which characteristics started from the unit square cross,
/// estimated on a `SCAN × SCAN` grid, or `None` if they never do.
pub fn crossing_time(u0: &dyn Fn(f64, f64) -> f64, g: &dyn Fn(f64) -> f64) -> Option<f64> {
    let mut worst: Option<f64> = None;
    for i in 0..SCAN {
        for j in 0..SCAN {
            let (x1, x2) = (i as f64 / SCAN as f64, j as f64 / SCAN as f64);
            let u = u0(x1, x2);
            let dg = (g(u + FD_STEP) - g(u - FD_STEP)) / (2.0 * FD_STEP);
            let du = (u0(x1 + FD_STEP, x2) - u0(x1 - FD_STEP, x2) + u0(x1, x2 + FD_STEP) - u0(x1, x2 - FD_STEP))
                / (2.0 * FD_STEP);
            let s = dg * du;
            if s < 0.0 {
                let t = -1.0 / s;
                worst = Some(worst.map_or(t, |w: f64| w.min(t)));
            }
        }
    }
    worst
}

/// `u(T, x)` solving `u = u0(x − G(u) T (1, 1))` at each point.
///
/// Fails with a numerical error when characteristics cross before `T`
/// (Jacobian of the characteristic map below [`SHOCK_THRESHOLD`]).
pub fn characteristics_solve(
    u0: &dyn Fn(f64, f64) -> f64,
    g: &dyn Fn(f64) -> f64,
    points: &[(f64, f64)],
    t: f64,
) -> Result<Vec<f64>> {
    if let Some(tc) = crossing_time(u0, g) {
        // det = 1 − T/tc along the worst characteristic.
        if 1.0 - t / tc < SHOCK_THRESHOLD {
            return Err(Error::numerical(format!("characteristics cross at t ≈ {tc:.6} before T = {t}")));
        }
    }
    let (mut lo, mut hi) = (f64::INFINITY, f64::NEG_INFINITY);
    for i in 0..SCAN {
        for j in 0..SCAN {
            let v = u0(i as f64 / SCAN as f64, j as f64 / SCAN as f64);
            lo = lo.min(v);
            hi = hi.max(v);
        }
    }
    let margin = 0.05 * (hi - lo) + 1e-9;
    let (lo, hi) = (lo - margin, hi + margin);
    points
        .iter()
        .map(|&(x1, x2)| {
            let f = |u: f64| u - u0(x1 - g(u) * t, x2 - g(u) * t);
            let (mut a, mut b) = (lo, hi);
            if f(a) > 0.0 || f(b) < 0.0 {
                return Err(Error::numerical(format!("no bracketing interval at ({x1}, {x2})")));
            }
            for _ in 0..200 {
                let m = 0.5 * (a + b);
                if f(m) <= 0.0 {
                    a = m;
                } else {
                    b = m;
                }
                if b - a < 1e-16 {
                    break;
                }
            }
            let u = 0.5 * (a + b);
            let res = f(u).abs();
            if res > 1e-10 {
                return Err(Error::numerical(format!("residual {res:e} at ({x1}, {x2})")));
            }
            Ok(u)
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    fn u0(x1: f64, x2: f64) -> f64 {
        0.4 * ((2.0 * PI * x1).sin() + (2.0 * PI * x2).sin())
    }

    fn grid(n: usize) -> Vec<(f64, f64)> {
        (0..n).flat_map(|i| (0..n).map(move |j| (i as f64 / n as f64, j as f64 / n as f64))).collect()
    }

    #[test]
    fn zero_and_constant_speed() {
        let pts = grid(8);
        let still = characteristics_solve(&u0, &|_| 0.0, &pts, 0.7).unwrap();
        for (v, &(a, b)) in still.iter().zip(&pts) {
            assert!((v - u0(a, b)).abs() < 1e-12);
        }
        let moved = characteristics_solve(&u0, &|_| 0.3, &pts, 0.5).unwrap();
        for (v, &(a, b)) in moved.iter().zip(&pts) {
            assert!((v - u0(a - 0.15, b - 0.15)).abs() < 1e-12);
        }
    }

    #[test]
    fn level_set_reference_satisfies_implicit_equation() {
        let g = |u: f64| u.powi(3) * (1.0 - u.powi(4));
        let pts = grid(32);
        let t = 0.25;
        let sol = characteristics_solve(&u0, &g, &pts, t).unwrap();
        for (u, &(a, b)) in sol.iter().zip(&pts) {
            assert!((u - u0(a - g(*u) * t, b - g(*u) * t)).abs() < 1e-10);
        }
    }

    #[test]
    fn burgers_like_shock_is_reported() {
        let g = |u: f64| u;
        let err = characteristics_solve(&u0, &g, &grid(4), 2.0).unwrap_err();
        assert!(err.is_numerical());
    }
}
