//! Weak-probe transmission estimates for the first and second photon.
//!
//! Each estimate solves the stationary amplitudes of one excitation manifold
//! driven from the manifold below, `M c = −b`, where `M` is the manifold
//! matrix and `b` carries the probe only on the bare cavity state. The result
//! is normalized to the transmission of an empty cavity on resonance, so that
//! `t1 = |c₁|² κ² / |ℰ|²` and `t2 = 2 |c₁|² κ² / |ℰ|²`.

use faer::Mat;
use num_complex::Complex64 as C64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::SystemConfig;
use crate::solvers::manifold_matrix;

/// Pivots below this fraction of the largest matrix entry count as singular.
pub const PIVOT_TOL: f64 = 1e-14;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct TransmissionPoint {
    pub axis1: f64,
    pub axis2: f64,
    pub delta_c: f64,
    pub delta_eg: f64,
    pub kappa: f64,
    pub t1: f64,
    pub t2: f64,
}

/// Solves `a x = b` by Gaussian elimination with partial pivoting.
pub fn solve_small(a: &Mat<C64>, b: &[C64]) -> Result<Vec<C64>> {
    let n = a.nrows();
    if a.ncols() != n || b.len() != n {
        return Err(Error::InvalidState(format!(
            "cannot solve a {}x{} system with a right-hand side of length {}",
            a.nrows(),
            a.ncols(),
            b.len()
        )));
    }
    let mut m: Vec<Vec<C64>> = (0..n).map(|i| (0..n).map(|j| a[(i, j)]).collect()).collect();
    let mut x = b.to_vec();
    let scale = m.iter().flatten().map(|z| z.norm()).fold(0.0, f64::max);
    for col in 0..n {
        let pivot = (col..n)
            .max_by(|&i, &j| m[i][col].norm().total_cmp(&m[j][col].norm()))
            .expect("non-empty range");
        if !(m[pivot][col].norm() > PIVOT_TOL * scale) {
            return Err(Error::Singular(format!(
                "manifold matrix is singular (pivot {} in column {col})",
                m[pivot][col].norm()
            )));
        }
        m.swap(col, pivot);
        x.swap(col, pivot);
        for row in col + 1..n {
            let factor = m[row][col] / m[col][col];
            if factor == C64::new(0.0, 0.0) {
                continue;
            }
            for k in col..n {
                let sub = factor * m[col][k];
                m[row][k] -= sub;
            }
            let sub = factor * x[col];
            x[row] -= sub;
        }
    }
    for col in (0..n).rev() {
        let mut acc = x[col];
        for k in col + 1..n {
            acc -= m[col][k] * x[k];
        }
        x[col] = acc / m[col][col];
    }
    Ok(x)
}

fn check(config: &SystemConfig) -> Result<()> {
    config.validate()?;
    if !(config.kappa > 0.0) {
        return Err(Error::NoCavityDecay);
    }
    if !(config.eps.norm() > 0.0) {
        return Err(Error::InvalidConfig(
            "transmission needs a nonzero probe amplitude".into(),
        ));
    }
    Ok(())
}

fn cavity_amplitude(config: &SystemConfig, manifold: usize, drive: C64) -> Result<C64> {
    let m = manifold_matrix(config, manifold)?;
    let mut b = vec![C64::new(0.0, 0.0); m.dim()];
    b[0] = -drive;
    let c = solve_small(&m.matrix, &b)?;
    if !c.iter().all(|z| z.re.is_finite() && z.im.is_finite()) {
        return Err(Error::Singular("non-finite manifold amplitudes".into()));
    }
    Ok(c[0])
}

/// First-photon transmission.
pub fn t1(config: &SystemConfig) -> Result<f64> {
    check(config)?;
    let c1 = cavity_amplitude(config, 1, config.eps)?;
    Ok(c1.norm_sqr() * config.kappa * config.kappa / config.eps.norm_sqr())
}

/// Second-photon transmission given one photon already in the cavity.
pub fn t2(config: &SystemConfig) -> Result<f64> {
    check(config)?;
    let c1 = cavity_amplitude(config, 2, config.eps * std::f64::consts::SQRT_2)?;
    Ok(2.0 * c1.norm_sqr() * config.kappa * config.kappa / config.eps.norm_sqr())
}

/// Grid axis of a transmission map.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum TransmissionAxis {
    /// Probe–cavity detuning, moved with
    /// [`SystemConfig::shift_probe_tracking_drive`] so that `Δsg` is kept.
    DeltaC,
    /// Probe–emitter detuning; `Δfg` moves along so the level structure is kept.
    DeltaEg,
    Kappa,
}

impl TransmissionAxis {
    /// Parses `delta_c`, `delta_eg`, `kappa`, optionally suffixed `_over_g`.
    /// Returns the axis and whether values are in units of `g_eg`.
    pub fn parse(name: &str) -> Result<(Self, bool)> {
        let (base, over_g) = match name.strip_suffix("_over_g") {
            Some(base) => (base, true),
            None => (name, false),
        };
        let axis = match base {
            "delta_c" => Self::DeltaC,
            "delta_eg" => Self::DeltaEg,
            "kappa" => Self::Kappa,
            _ => return Err(Error::UnknownParameter(name.to_string())),
        };
        Ok((axis, over_g))
    }

    fn apply(self, config: &mut SystemConfig, value: f64) {
        match self {
            Self::DeltaC => config.shift_probe_tracking_drive(value - config.delta_c),
            Self::DeltaEg => {
                let shift = value - config.delta_eg;
                config.delta_eg = value;
                if config.scheme == crate::model::Scheme::FourLevel {
                    config.delta_fg += shift;
                }
            }
            Self::Kappa => config.kappa = value,
        }
    }

    /// Application order: `κ`, then the probe, then the emitter.
    fn rank(self) -> u8 {
        match self {
            Self::Kappa => 0,
            Self::DeltaC => 1,
            Self::DeltaEg => 2,
        }
    }
}

fn check_grid(name: &str, grid: &[f64]) -> Result<()> {
    if grid.is_empty() {
        return Err(Error::InvalidSweep(format!("axis `{name}` has an empty grid")));
    }
    if grid.iter().any(|v| !v.is_finite()) {
        return Err(Error::InvalidSweep(format!("axis `{name}` has non-finite values")));
    }
    let increasing = grid.windows(2).all(|w| w[1] > w[0]);
    let decreasing = grid.windows(2).all(|w| w[1] < w[0]);
    if !(increasing || decreasing) {
        return Err(Error::InvalidSweep(format!("axis `{name}` is not monotone")));
    }
    Ok(())
}

/// Places the template at grid point `(v1, v2)`.
///
/// Axis values are absolute targets. Whatever the axis order, `κ` is set
/// first, then the probe is moved to its `Δc`, and `Δeg` is set last so that
/// it is not disturbed by the probe shift.
pub fn place(
    template: &SystemConfig,
    axes: &[(TransmissionAxis, bool)],
    values: &[f64],
) -> SystemConfig {
    let mut config = template.clone();
    let mut order: Vec<usize> = (0..axes.len()).collect();
    order.sort_by_key(|&i| axes[i].0.rank());
    for i in order {
        let (axis, over_g) = axes[i];
        let value = if over_g { values[i] * template.g_eg } else { values[i] };
        axis.apply(&mut config, value);
    }
    config
}

/// `t1` and `t2` over the Cartesian product of two axes, `axis1`-major.
pub fn transmission_map(
    template: &SystemConfig,
    axis1: (&str, &[f64]),
    axis2: (&str, &[f64]),
) -> Result<Vec<TransmissionPoint>> {
    let a1 = TransmissionAxis::parse(axis1.0)?;
    let a2 = TransmissionAxis::parse(axis2.0)?;
    if a1.0 == a2.0 {
        return Err(Error::InvalidSweep(format!(
            "axes `{}` and `{}` move the same parameter",
            axis1.0, axis2.0
        )));
    }
    check_grid(axis1.0, axis1.1)?;
    check_grid(axis2.0, axis2.1)?;
    let mut rows = Vec::with_capacity(axis1.1.len() * axis2.1.len());
    for &v1 in axis1.1 {
        for &v2 in axis2.1 {
            let config = place(template, &[a1, a2], &[v1, v2]);
            rows.push(TransmissionPoint {
                axis1: v1,
                axis2: v2,
                delta_c: config.delta_c,
                delta_eg: config.delta_eg,
                kappa: config.kappa,
                t1: t1(&config)?,
                t2: t2(&config)?,
            });
        }
    }
    Ok(rows)
}
