use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::{to_ghz, SystemConfig};
use crate::solvers::{g2_zero, steady_state_for};
use crate::sweep::Param;

/// Points of the coarse scan preceding refinement.
pub const SCAN_POINTS: usize = 61;
/// Refinement stops once the bracket is narrower than this multiple of `g_eg`.
pub const RESOLUTION_OVER_G: f64 = 1e-3;
/// Upper bound on golden-section iterations.
pub const MAX_GOLDEN_ITERATIONS: usize = 200;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Optimum {
    /// Minimizing value in the units of the varied parameter.
    pub argmin: f64,
    pub g2_min: f64,
    /// The coarse minimum sat on an end of the bracket.
    pub at_boundary: bool,
    pub evaluations: usize,
}

/// `g²(0)` of `template` with `vary` set to `value`.
pub fn g2_at(template: &SystemConfig, vary: &Param, value: f64) -> Result<f64> {
    let mut config = template.clone();
    vary.apply(&mut config, value)?;
    g2_zero(&steady_state_for(&config)?.rho)
}

fn resolution(template: &SystemConfig, vary: &Param, bracket: [f64; 2]) -> f64 {
    if vary.is_relative() {
        RESOLUTION_OVER_G
    } else if template.g_eg > 0.0 {
        RESOLUTION_OVER_G * to_ghz(template.g_eg)
    } else {
        RESOLUTION_OVER_G * (bracket[1] - bracket[0])
    }
}

/// Minimizes `g²(0)` over one detuning: a uniform scan of the bracket
/// followed by golden-section search around the best scan point.
///
/// Points where the solver fails are treated as `+∞`; the search fails only
/// if every scan point fails.
pub fn optimize_probe_detuning(template: &SystemConfig, vary: &Param, bracket: [f64; 2]) -> Result<Optimum> {
    let [lo, hi] = bracket;
    if !(lo.is_finite() && hi.is_finite() && lo < hi) {
        return Err(Error::InvalidSweep(format!("invalid bracket [{lo}, {hi}]")));
    }
    let objective = |x: f64| g2_at(template, vary, x);
    let step = (hi - lo) / (SCAN_POINTS - 1) as f64;
    let xs: Vec<f64> = (0..SCAN_POINTS)
        .map(|i| if i + 1 == SCAN_POINTS { hi } else { lo + step * i as f64 })
        .collect();
    let mut first_error = None;
    let values: Vec<f64> = xs
        .iter()
        .map(|&x| match objective(x) {
            Ok(v) if v.is_finite() => v,
            Ok(_) => f64::INFINITY,
            Err(e) => {
                first_error.get_or_insert(e);
                f64::INFINITY
            }
        })
        .collect();
    let mut evaluations = SCAN_POINTS;
    let best = (0..SCAN_POINTS)
        .min_by(|&a, &b| values[a].total_cmp(&values[b]))
        .expect("non-empty scan");
    if values[best].is_infinite() {
        return Err(first_error.unwrap_or_else(|| Error::NoConvergence("objective is not finite anywhere".into())));
    }
    let at_boundary = best == 0 || best + 1 == SCAN_POINTS;

    let (mut x_best, mut f_best) = (xs[best], values[best]);
    let mut a = xs[best.saturating_sub(1)];
    let mut b = xs[(best + 1).min(SCAN_POINTS - 1)];
    let tol = resolution(template, vary, bracket);
    let ratio = (5f64.sqrt() - 1.0) / 2.0;
    let eval = |x: f64| objective(x).ok().filter(|v| v.is_finite()).unwrap_or(f64::INFINITY);
    let mut c = b - ratio * (b - a);
    let mut d = a + ratio * (b - a);
    let mut fc = eval(c);
    let mut fd = eval(d);
    evaluations += 2;
    let mut iterations = 0;
    while b - a > tol && iterations < MAX_GOLDEN_ITERATIONS {
        if fc <= fd {
            b = d;
            d = c;
            fd = fc;
            c = b - ratio * (b - a);
            fc = eval(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + ratio * (b - a);
            fd = eval(d);
        }
        evaluations += 1;
        iterations += 1;
    }
    for (x, f) in [(c, fc), (d, fd)] {
        if f < f_best {
            x_best = x;
            f_best = f;
        }
    }
    Ok(Optimum {
        argmin: x_best,
        g2_min: f_best,
        at_boundary,
        evaluations,
    })
}
