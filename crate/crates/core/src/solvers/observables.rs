use crate::error::{Error, Result};
use crate::hilbert::{annihilation, expectation, DensityMatrix};

/// Below this mean photon number `g²(0)` is reported as undefined.
pub const MIN_PHOTONS: f64 = 1e-12;

/// `⟨a†a⟩`.
pub fn mean_photon(rho: &DensityMatrix) -> f64 {
    let a = annihilation(rho.space());
    let n = a.adjoint().product(&a).expect("same space");
    expectation(&n, rho).expect("same space").re
}

/// Zero-delay intensity correlation `⟨a†a†aa⟩ / ⟨a†a⟩²`.
pub fn g2_zero(rho: &DensityMatrix) -> Result<f64> {
    let a = annihilation(rho.space());
    let ad = a.adjoint();
    let n_op = ad.product(&a)?;
    let pair = ad.product(&ad)?.product(&a)?.product(&a)?;
    let n = expectation(&n_op, rho)?.re;
    if !(n > MIN_PHOTONS) {
        return Err(Error::UndefinedG2 { photons: n });
    }
    Ok(expectation(&pair, rho)?.re / (n * n))
}
