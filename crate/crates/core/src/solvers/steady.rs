use faer::prelude::*;
use std::cell::RefCell;

use faer::sparse::linalg::solvers::{Lu, SymbolicLu};
use faer::sparse::{SparseColMat, Triplet};
use faer::Mat;
use num_complex::Complex64 as C64;

use crate::error::{Error, Result};
use crate::hilbert::DensityMatrix;
use crate::model::{Liouvillian, SystemConfig};

/// Relative residual accepted for a steady state.
pub const RESIDUAL_TOL: f64 = 1e-8;

/// Factorization used for the steady-state linear system.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum SteadyMethod {
    #[default]
    Sparse,
    Dense,
}

#[derive(Clone, Debug)]
pub struct SteadyState {
    pub rho: DensityMatrix,
    /// `‖L vec(ρ)‖∞ / (‖L‖∞ ‖vec(ρ)‖∞)`.
    pub residual: f64,
}

/// Stationary state of `L` using the sparse factorization.
pub fn steady_state(l: &Liouvillian) -> Result<DensityMatrix> {
    steady_state_with(l, SteadyMethod::Sparse).map(|s| s.rho)
}

/// Stationary state of the system described by `config`.
pub fn steady_state_for(config: &SystemConfig) -> Result<SteadyState> {
    if !(config.kappa > 0.0) {
        return Err(Error::NoCavityDecay);
    }
    let l = Liouvillian::from_config(config)?;
    steady_state_with(&l, SteadyMethod::Sparse)
}

/// Solves `L vec(ρ) = 0` with the `ρ_00` equation replaced by `tr ρ = 1`.
///
/// Trace preservation makes the population equations linearly dependent, so
/// dropping one of them loses no information when the null space is
/// one-dimensional. A single step of iterative refinement follows the solve.
pub fn steady_state_with(l: &Liouvillian, method: SteadyMethod) -> Result<SteadyState> {
    let space = l.space();
    let d = space.dim();
    let n = d * d;

    let mut entries: Vec<(usize, usize, C64)> =
        l.nonzeros().iter().copied().filter(|&(row, _, _)| row != 0).collect();
    for i in 0..d {
        entries.push((0, i * d + i, C64::new(1.0, 0.0)));
    }

    let mut rhs = Mat::<C64>::zeros(n, 1);
    rhs[(0, 0)] = C64::new(1.0, 0.0);

    let mut x = match method {
        SteadyMethod::Sparse => {
            let triplets: Vec<_> = entries.iter().map(|&(r, c, v)| Triplet::new(r, c, v)).collect();
            let a = SparseColMat::<usize, C64>::try_new_from_triplets(n, n, &triplets)
                .map_err(|e| Error::Singular(format!("{e:?}")))?;
            let symbolic = cached_symbolic(&a)?;
            let lu = Lu::try_new_with_symbolic(symbolic, a.as_ref())
                .map_err(|e| Error::Singular(format!("sparse LU failed: {e:?}")))?;
            let mut x = lu.solve(&rhs);
            let r = residual_vector(&entries, &x, &rhs);
            let dx = lu.solve(&r);
            x += dx;
            x
        }
        SteadyMethod::Dense => {
            let mut a = Mat::<C64>::zeros(n, n);
            for &(r, c, v) in &entries {
                a[(r, c)] += v;
            }
            let lu = a.partial_piv_lu();
            let mut x = lu.solve(&rhs);
            let r = residual_vector(&entries, &x, &rhs);
            let dx = lu.solve(&r);
            x += dx;
            x
        }
    };

    if (0..n).any(|i| !x[(i, 0)].re.is_finite() || !x[(i, 0)].im.is_finite()) {
        return Err(Error::Singular(
            "steady-state system has no unique solution".into(),
        ));
    }

    let mut lx = vec![C64::new(0.0, 0.0); n];
    for &(r, c, v) in l.nonzeros() {
        lx[r] += v * x[(c, 0)];
    }
    let lx_norm = lx.iter().map(|z| z.norm()).fold(0.0, f64::max);
    let x_norm = (0..n).map(|i| x[(i, 0)].norm()).fold(0.0, f64::max);
    let residual = lx_norm / (l.norm_inf() * x_norm);
    if !(residual <= RESIDUAL_TOL) {
        return Err(Error::Singular(format!(
            "steady-state residual {residual:e} exceeds {RESIDUAL_TOL:e}"
        )));
    }

    let trace: C64 = (0..d).map(|i| x[(i * d + i, 0)]).sum();
    for i in 0..n {
        x[(i, 0)] /= trace;
    }
    let matrix = Mat::from_fn(d, d, |i, j| (x[(j * d + i, 0)] + x[(i * d + j, 0)].conj()) * 0.5);
    let rho = DensityMatrix::new(space, matrix)?;
    Ok(SteadyState { rho, residual })
}

type Pattern = (Vec<usize>, Vec<usize>);

thread_local! {
    static SYMBOLIC: RefCell<Option<(Pattern, SymbolicLu<usize>)>> = const { RefCell::new(None) };
}

/// Symbolic LU of `a`, reused while successive systems share a sparsity pattern.
fn cached_symbolic(a: &SparseColMat<usize, C64>) -> Result<SymbolicLu<usize>> {
    let s = a.symbolic();
    let pattern = (s.col_ptr().to_vec(), s.row_idx().to_vec());
    SYMBOLIC.with(|cell| {
        let mut cache = cell.borrow_mut();
        if let Some((key, symbolic)) = cache.as_ref() {
            if *key == pattern {
                return Ok(symbolic.clone());
            }
        }
        let symbolic = SymbolicLu::try_new(s)
            .map_err(|e| Error::Singular(format!("sparse LU analysis failed: {e:?}")))?;
        *cache = Some((pattern, symbolic.clone()));
        Ok(symbolic)
    })
}

fn residual_vector(entries: &[(usize, usize, C64)], x: &Mat<C64>, rhs: &Mat<C64>) -> Mat<C64> {
    let mut r = rhs.clone();
    for &(row, col, v) in entries {
        r[(row, 0)] -= v * x[(col, 0)];
    }
    r
}
