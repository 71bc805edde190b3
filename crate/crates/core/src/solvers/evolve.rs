use faer::Mat;
use num_complex::Complex64 as C64;

use crate::error::{Error, Result};
use crate::hilbert::DensityMatrix;
use crate::model::{vectorize, Liouvillian};

/// Trace drift beyond which propagation is abandoned.
pub const INSTABILITY_DRIFT: f64 = 1e-4;

/// Suggested step: `0.05 / ‖L‖∞`.
pub fn suggested_step(l: &Liouvillian) -> f64 {
    0.05 / l.norm_inf()
}

#[derive(Clone, Debug)]
pub struct Evolution {
    pub rho: DensityMatrix,
    pub steps: usize,
    /// Largest `|tr ρ(t) − tr ρ(0)|` seen along the way.
    pub max_trace_drift: f64,
}

/// Compressed-row copy of the generator for repeated products.
struct Csr {
    row_start: Vec<usize>,
    cols: Vec<usize>,
    vals: Vec<C64>,
}

impl Csr {
    fn new(l: &Liouvillian) -> Self {
        let n = l.matrix().nrows();
        let mut entries = l.nonzeros().to_vec();
        entries.sort_by_key(|&(r, c, _)| (r, c));
        let mut row_start = vec![0; n + 1];
        for &(r, _, _) in &entries {
            row_start[r + 1] += 1;
        }
        for i in 0..n {
            row_start[i + 1] += row_start[i];
        }
        Self {
            row_start,
            cols: entries.iter().map(|e| e.1).collect(),
            vals: entries.iter().map(|e| e.2).collect(),
        }
    }

    fn apply_into(&self, x: &[C64], out: &mut [C64]) {
        for (row, o) in out.iter_mut().enumerate() {
            let mut acc = C64::new(0.0, 0.0);
            for k in self.row_start[row]..self.row_start[row + 1] {
                acc += self.vals[k] * x[self.cols[k]];
            }
            *o = acc;
        }
    }
}

/// Fixed-step classical Runge–Kutta propagation of `vec(ρ)` up to `t_final`.
///
/// The step actually taken is `t_final / ceil(t_final / dt)`. The result is
/// Hermitized as `(ρ + ρ†)/2`.
pub fn time_evolve(l: &Liouvillian, rho0: &DensityMatrix, t_final: f64, dt: f64) -> Result<Evolution> {
    let space = l.space();
    if rho0.space() != space {
        return Err(Error::SpaceMismatch {
            left: space,
            right: rho0.space(),
        });
    }
    if !(t_final >= 0.0) || !(dt > 0.0) {
        return Err(Error::InvalidConfig(format!(
            "need t_final >= 0 and dt > 0, got {t_final} and {dt}"
        )));
    }
    let d = space.dim();
    let n = d * d;
    let csr = Csr::new(l);
    let steps = (t_final / dt).ceil() as usize;
    let h = if steps == 0 { 0.0 } else { t_final / steps as f64 };

    let trace_of = |v: &[C64]| -> C64 { (0..d).map(|i| v[i * d + i]).sum() };
    let mut v = vectorize(rho0.matrix());
    let trace0 = trace_of(&v);
    let mut k1 = vec![C64::new(0.0, 0.0); n];
    let mut k2 = k1.clone();
    let mut k3 = k1.clone();
    let mut k4 = k1.clone();
    let mut tmp = k1.clone();
    let mut max_drift = 0.0_f64;

    for step in 0..steps {
        csr.apply_into(&v, &mut k1);
        for i in 0..n {
            tmp[i] = v[i] + k1[i] * (0.5 * h);
        }
        csr.apply_into(&tmp, &mut k2);
        for i in 0..n {
            tmp[i] = v[i] + k2[i] * (0.5 * h);
        }
        csr.apply_into(&tmp, &mut k3);
        for i in 0..n {
            tmp[i] = v[i] + k3[i] * h;
        }
        csr.apply_into(&tmp, &mut k4);
        for i in 0..n {
            v[i] += (k1[i] + (k2[i] + k3[i]) * 2.0 + k4[i]) * (h / 6.0);
        }
        let drift = (trace_of(&v) - trace0).norm();
        max_drift = max_drift.max(drift);
        if !(drift <= INSTABILITY_DRIFT) {
            return Err(Error::Unstable {
                drift,
                time: (step + 1) as f64 * h,
            });
        }
    }

    let matrix = Mat::from_fn(d, d, |i, j| (v[j * d + i] + v[i * d + j].conj()) * 0.5);
    let rho = DensityMatrix::new(space, matrix)?;
    Ok(Evolution {
        rho,
        steps,
        max_trace_drift: max_drift,
    })
}
