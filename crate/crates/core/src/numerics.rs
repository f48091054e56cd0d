//! Scalar quadrature and one-dimensional minimization.

use crate::error::{Error, Result};

/// Settings for [`adaptive_simpson`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadConfig {
    pub abs_tol: f64,
    pub max_depth: u32,
    /// Number of equal panels refined independently; keeps narrow peaks from
    /// being missed by the first coarse estimate.
    pub initial_panels: usize,
}

impl Default for QuadConfig {
    fn default() -> Self {
        Self {
            abs_tol: 1e-10,
            max_depth: 40,
            initial_panels: 16,
        }
    }
}

struct Simpson<'a, F> {
    f: &'a F,
    max_depth: u32,
    failed: bool,
    worst: f64,
}

impl<F: Fn(f64) -> f64> Simpson<'_, F> {
    #[allow(clippy::too_many_arguments)]
    fn refine(&mut self, a: f64, b: f64, fa: f64, fm: f64, fb: f64, whole: f64, tol: f64, depth: u32) -> f64 {
        let m = 0.5 * (a + b);
        let lm = 0.5 * (a + m);
        let rm = 0.5 * (m + b);
        let flm = (self.f)(lm);
        let frm = (self.f)(rm);
        let left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
        let right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
        let delta = left + right - whole;
        if delta.abs() <= 15.0 * tol {
            return left + right + delta / 15.0;
        }
        if depth >= self.max_depth {
            self.failed = true;
            self.worst = self.worst.max(delta.abs() / 15.0);
            return left + right + delta / 15.0;
        }
        self.refine(a, m, fa, flm, fm, left, 0.5 * tol, depth + 1)
            + self.refine(m, b, fm, frm, fb, right, 0.5 * tol, depth + 1)
    }
}

/// Adaptive composite Simpson rule on [a, b] with Richardson correction.
pub fn adaptive_simpson<F: Fn(f64) -> f64>(f: F, a: f64, b: f64, cfg: &QuadConfig) -> Result<f64> {
    let panels = cfg.initial_panels.max(1);
    let width = (b - a) / panels as f64;
    let tol = cfg.abs_tol / panels as f64;
    let mut state = Simpson {
        f: &f,
        max_depth: cfg.max_depth,
        failed: false,
        worst: 0.0,
    };
    let mut total = 0.0;
    for i in 0..panels {
        let lo = a + width * i as f64;
        let hi = if i + 1 == panels { b } else { lo + width };
        let (fa, fm, fb) = (f(lo), f(0.5 * (lo + hi)), f(hi));
        let whole = (hi - lo) / 6.0 * (fa + 4.0 * fm + fb);
        total += state.refine(lo, hi, fa, fm, fb, whole, tol, 0);
    }
    if state.failed {
        return Err(Error::QuadratureNotConverged {
            estimate: state.worst,
            tolerance: cfg.abs_tol,
        });
    }
    Ok(total)
}

/// Golden-section search for a local minimum of `f` on [lo, hi].
pub fn golden_section<F: Fn(f64) -> f64>(f: &F, mut lo: f64, mut hi: f64, tol: f64) -> (f64, f64) {
    let inv_phi = (5f64.sqrt() - 1.0) / 2.0;
    let mut x1 = hi - inv_phi * (hi - lo);
    let mut x2 = lo + inv_phi * (hi - lo);
    let mut f1 = f(x1);
    let mut f2 = f(x2);
    for _ in 0..200 {
        if (hi - lo).abs() <= tol {
            break;
        }
        if f1 <= f2 {
            hi = x2;
            x2 = x1;
            f2 = f1;
            x1 = hi - inv_phi * (hi - lo);
            f1 = f(x1);
        } else {
            lo = x1;
            x1 = x2;
            f1 = f2;
            x2 = lo + inv_phi * (hi - lo);
            f2 = f(x2);
        }
    }
    if f1 <= f2 {
        (x1, f1)
    } else {
        (x2, f2)
    }
}

/// Global minimum of a smooth but possibly multimodal `f` on [lo, hi].
///
/// A uniform scan of `scan_points` values picks the `restarts` lowest local
/// minima; each bracket is refined by golden section and the best result
/// wins (earliest bracket on ties).
pub fn minimize_scalar<F: Fn(f64) -> f64>(
    f: F,
    lo: f64,
    hi: f64,
    scan_points: usize,
    restarts: usize,
    tol: f64,
) -> Result<(f64, f64)> {
    if !(hi > lo) || scan_points < 3 {
        return Err(Error::OptimizationFailed(format!(
            "bad search interval [{lo}, {hi}] with {scan_points} scan points"
        )));
    }
    let step = (hi - lo) / (scan_points - 1) as f64;
    let xs: Vec<f64> = (0..scan_points).map(|i| lo + step * i as f64).collect();
    let ys: Vec<f64> = xs.iter().map(|&x| f(x)).collect();
    if ys.iter().any(|y| y.is_nan()) {
        return Err(Error::OptimizationFailed("objective returned NaN".into()));
    }
    let mut minima: Vec<usize> = (0..scan_points)
        .filter(|&i| {
            let left = i == 0 || ys[i] <= ys[i - 1];
            let right = i + 1 == scan_points || ys[i] <= ys[i + 1];
            left && right
        })
        .collect();
    minima.sort_by(|&a, &b| ys[a].total_cmp(&ys[b]).then(a.cmp(&b)));
    minima.truncate(restarts.max(1));

    let mut best = (xs[minima[0]], ys[minima[0]]);
    for &i in &minima {
        let a = if i == 0 { xs[0] } else { xs[i - 1] };
        let b = if i + 1 == scan_points { xs[i] } else { xs[i + 1] };
        let (x, y) = golden_section(&f, a, b, tol);
        if y < best.1 {
            best = (x, y);
        }
    }
    Ok(best)
}
