//! Dressed states of the lowest excitation manifolds.
//!
//! With the probe switched off the Hamiltonian conserves the number of
//! excitations, so it splits into blocks. Decay enters through complex
//! detunings `Δ → Δ + iγ`, which turns each block into a small non-Hermitian
//! matrix whose eigenvalues give energies (real part) and half-widths
//! (negative imaginary part) of the dressed states.


use faer::Mat;
use num_complex::Complex64 as C64;

use crate::error::{Error, Result};
use crate::hilbert::Level;
use crate::model::{Scheme, SystemConfig, WidthConvention};

/// Largest matrix handled by [`eig_complex`].
pub const MAX_EIG_DIM: usize = 8;

/// Non-Hermitian Hamiltonian restricted to one excitation manifold.
#[derive(Clone, Debug)]
pub struct ManifoldMatrix {
    pub manifold: usize,
    /// Bare states `(level, photons)` in matrix order.
    pub basis: Vec<(Level, usize)>,
    pub matrix: Mat<C64>,
}

impl ManifoldMatrix {
    pub fn dim(&self) -> usize {
        self.basis.len()
    }
}

/// Widths and detunings of the emitter levels as they enter the manifolds.
struct LevelTerms {
    cavity: C64,
    e: C64,
    s: C64,
    f: C64,
}

impl LevelTerms {
    fn new(config: &SystemConfig) -> Self {
        let (gamma_e, gamma_f, delta_f) = match config.widths {
            WidthConvention::Total => (config.gamma_e(), config.gamma_f(), config.delta_fg),
            WidthConvention::Literal => (config.gamma_eg, config.gamma_fs, config.delta_fs()),
        };
        Self {
            cavity: -C64::new(config.delta_c, config.kappa),
            e: -C64::new(config.delta_eg, gamma_e),
            s: -C64::new(config.delta_sg, config.gamma_s()),
            f: -C64::new(delta_f, gamma_f),
        }
    }
}

/// Non-Hermitian block of manifold `n ∈ {1, 2}`; the probe is left out.
///
/// Four-level bases are `(|g,1⟩, |e,0⟩, |s,0⟩)` and
/// `(|g,2⟩, |e,1⟩, |s,1⟩, |f,0⟩)`; the two-level emitter drops `s` and `f`.
pub fn manifold_matrix(config: &SystemConfig, n: usize) -> Result<ManifoldMatrix> {
    let t = LevelTerms::new(config);
    let g = C64::new(config.g_eg, 0.0);
    let g_fs = C64::new(config.g_fs, 0.0);
    let omega = config.omega_rabi;
    let sqrt2 = std::f64::consts::SQRT_2;

    let (basis, matrix) = match (config.scheme, n) {
        (Scheme::FourLevel, 1) => {
            let mut m = Mat::zeros(3, 3);
            m[(0, 0)] = t.cavity;
            m[(1, 1)] = t.e;
            m[(2, 2)] = t.s;
            m[(0, 1)] = g;
            m[(1, 0)] = g;
            // Ω|e⟩⟨s| + Ω*|s⟩⟨e|
            m[(1, 2)] = omega;
            m[(2, 1)] = omega.conj();
            (vec![(Level::G, 1), (Level::E, 0), (Level::S, 0)], m)
        }
        (Scheme::FourLevel, 2) => {
            let mut m = Mat::zeros(4, 4);
            m[(0, 0)] = t.cavity * 2.0;
            m[(1, 1)] = t.e + t.cavity;
            m[(2, 2)] = t.s + t.cavity;
            m[(3, 3)] = t.f;
            m[(0, 1)] = g * sqrt2;
            m[(1, 0)] = g * sqrt2;
            m[(1, 2)] = omega;
            m[(2, 1)] = omega.conj();
            m[(2, 3)] = g_fs;
            m[(3, 2)] = g_fs;
            (
                vec![(Level::G, 2), (Level::E, 1), (Level::S, 1), (Level::F, 0)],
                m,
            )
        }
        (Scheme::TwoLevel, 1) => {
            let mut m = Mat::zeros(2, 2);
            m[(0, 0)] = t.cavity;
            m[(1, 1)] = t.e;
            m[(0, 1)] = g;
            m[(1, 0)] = g;
            (vec![(Level::G, 1), (Level::E, 0)], m)
        }
        (Scheme::TwoLevel, 2) => {
            let mut m = Mat::zeros(2, 2);
            m[(0, 0)] = t.cavity * 2.0;
            m[(1, 1)] = t.e + t.cavity;
            m[(0, 1)] = g * sqrt2;
            m[(1, 0)] = g * sqrt2;
            (vec![(Level::G, 2), (Level::E, 1)], m)
        }
        (_, other) => return Err(Error::InvalidManifold(other)),
    };
    Ok(ManifoldMatrix {
        manifold: n,
        basis,
        matrix,
    })
}

/// Eigenvalues of a small general complex matrix.
///
/// Each eigenpair is checked against `‖m v − λ v‖ ≤ 1e-9 ‖m‖` before being
/// returned.
pub fn eig_complex(m: &Mat<C64>) -> Result<Vec<C64>> {
    let n = m.nrows();
    if n != m.ncols() || n == 0 || n > MAX_EIG_DIM {
        return Err(Error::InvalidConfig(format!(
            "eigenvalue solver takes square matrices up to {MAX_EIG_DIM}x{MAX_EIG_DIM}, got {}x{}",
            m.nrows(),
            m.ncols()
        )));
    }
    let eig = m
        .eigen()
        .map_err(|e| Error::NoConvergence(format!("{e:?}")))?;
    let vectors = eig.U();
    let values = eig.S();
    let scale = crate::hilbert::max_abs(m).max(f64::MIN_POSITIVE) * n as f64;
    let mut out = Vec::with_capacity(n);
    for k in 0..n {
        let lambda = values[k];
        let norm: f64 = (0..n).map(|i| vectors[(i, k)].norm_sqr()).sum::<f64>().sqrt();
        let mut worst = 0.0_f64;
        for i in 0..n {
            let mut mv = C64::new(0.0, 0.0);
            for j in 0..n {
                mv += m[(i, j)] * vectors[(j, k)];
            }
            worst = worst.max(((mv - lambda * vectors[(i, k)]) / norm).norm());
        }
        if !(worst <= 1e-9 * scale) {
            return Err(Error::NoConvergence(format!(
                "eigenpair {k} has residual {worst:e}"
            )));
        }
        out.push(lambda);
    }
    Ok(out)
}

/// Sorted dressed-state eigenvalues of one manifold.
#[derive(Clone, Debug)]
pub struct SpectrumResult {
    pub manifold: usize,
    /// Ascending by real part, ties broken by imaginary part.
    pub eigenvalues: Vec<C64>,
    /// `Re λ / g_eg`.
    pub energies_over_g: Vec<f64>,
    /// `−2 Im λ`, the full width of each dressed state.
    pub widths: Vec<f64>,
}

/// Orders by real part, then by imaginary part within runs whose real
/// parts agree to `1e-9` of the largest modulus.
pub fn sort_eigenvalues(values: &mut [C64]) {
    values.sort_by(|a, b| a.re.total_cmp(&b.re));
    let scale = values.iter().map(|z| z.norm()).fold(1e-300, f64::max);
    let mut start = 0;
    while start < values.len() {
        let mut end = start + 1;
        while end < values.len() && values[end].re - values[end - 1].re <= 1e-9 * scale {
            end += 1;
        }
        values[start..end].sort_by(|a, b| a.im.total_cmp(&b.im));
        start = end;
    }
}

pub fn dressed_energies(config: &SystemConfig, n: usize) -> Result<SpectrumResult> {
    let m = manifold_matrix(config, n)?;
    let mut eigenvalues = eig_complex(&m.matrix)?;
    sort_eigenvalues(&mut eigenvalues);
    Ok(SpectrumResult {
        manifold: n,
        energies_over_g: eigenvalues.iter().map(|l| l.re / config.g_eg).collect(),
        widths: eigenvalues.iter().map(|l| -2.0 * l.im).collect(),
        eigenvalues,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{from_ghz, two_level_resonant};

    fn lossless(g: f64, omega: f64, g_fs: f64) -> SystemConfig {
        let mut c = SystemConfig::resonant(0.0);
        c.g_eg = g;
        c.g_fs = g_fs;
        c.omega_rabi = C64::new(omega, 0.0);
        for rate in ["gamma_sg", "gamma_eg", "gamma_es", "gamma_fg", "gamma_fs"] {
            *c.rate_mut(rate).unwrap() = 0.0;
        }
        c
    }

    fn assert_close(got: &[C64], want: &[f64], tol: f64) {
        assert_eq!(got.len(), want.len());
        for (g, w) in got.iter().zip(want) {
            assert!((g.re - w).abs() <= tol * w.abs().max(1.0), "{got:?} vs {want:?}");
            assert!(g.im.abs() <= tol, "{got:?}");
        }
    }

    #[test]
    fn first_manifold_lossless() {
        let (g, omega) = (1.7, 0.6);
        let spec = dressed_energies(&lossless(g, omega, g), 1).unwrap();
        let r = (g * g + omega * omega).sqrt();
        assert_close(&spec.eigenvalues, &[-r, 0.0, r], 1e-12);
    }

    #[test]
    fn second_manifold_lossless() {
        // λ⁴ − 4g²λ² + 2g⁴ = 0
        let g = 2.3;
        let spec = dressed_energies(&lossless(g, g, g), 2).unwrap();
        let inner = g * (2.0 - 2f64.sqrt()).sqrt();
        let outer = g * (2.0 + 2f64.sqrt()).sqrt();
        assert_close(&spec.eigenvalues, &[-outer, -inner, inner, outer], 1e-12);
    }

    #[test]
    fn decoupled_limit_is_jaynes_cummings() {
        let g = 1.0;
        let spec = dressed_energies(&lossless(g, 0.0, 0.0), 1).unwrap();
        assert_close(&spec.eigenvalues, &[-1.0, 0.0, 1.0], 1e-12);
        let m = manifold_matrix(&lossless(g, 0.0, 0.0), 1).unwrap();
        assert_eq!(m.matrix[(2, 0)], C64::new(0.0, 0.0));
        assert_eq!(m.matrix[(2, 1)], C64::new(0.0, 0.0));
    }

    #[test]
    fn lossless_blocks_are_hermitian() {
        let c = lossless(1.0, 0.4, 0.7);
        for n in [1, 2] {
            let m = manifold_matrix(&c, n).unwrap();
            for i in 0..m.dim() {
                for j in 0..m.dim() {
                    assert_eq!(m.matrix[(i, j)], m.matrix[(j, i)].conj());
                }
            }
        }
    }

    #[test]
    fn manifold_sizes_and_bases() {
        let c = SystemConfig::default();
        let m1 = manifold_matrix(&c, 1).unwrap();
        let m2 = manifold_matrix(&c, 2).unwrap();
        assert_eq!(m1.basis, vec![(Level::G, 1), (Level::E, 0), (Level::S, 0)]);
        assert_eq!(
            m2.basis,
            vec![(Level::G, 2), (Level::E, 1), (Level::S, 1), (Level::F, 0)]
        );
        assert_eq!(dressed_energies(&c, 1).unwrap().eigenvalues.len(), 3);
        assert_eq!(dressed_energies(&c, 2).unwrap().eigenvalues.len(), 4);
        assert!(matches!(manifold_matrix(&c, 3), Err(Error::InvalidManifold(3))));
        assert!(matches!(manifold_matrix(&c, 0), Err(Error::InvalidManifold(0))));
    }

    #[test]
    fn literal_widths_use_single_channels() {
        let mut c = SystemConfig::resonant(1.0);
        c.gamma_eg = 0.1;
        c.gamma_es = 0.2;
        c.gamma_fg = 0.3;
        c.gamma_fs = 0.4;
        c.delta_sg = 0.5;
        c.delta_fg = 0.9;
        let total = manifold_matrix(&c, 2).unwrap();
        c.widths = WidthConvention::Literal;
        let literal = manifold_matrix(&c, 2).unwrap();
        assert!((total.matrix[(3, 3)] - C64::new(-0.9, -0.7)).norm() < 1e-15);
        assert!((literal.matrix[(3, 3)] - C64::new(-0.4, -0.4)).norm() < 1e-15);
        let m1 = manifold_matrix(&c, 1).unwrap();
        assert!((m1.matrix[(1, 1)] - C64::new(0.0, -0.1)).norm() < 1e-15);
    }

    #[test]
    fn eig_basic_cases() {
        let d = Mat::from_fn(4, 4, |i, j| if i == j { C64::new(i as f64 - 1.5, 0.1 * i as f64) } else { C64::new(0.0, 0.0) });
        let mut vals = eig_complex(&d).unwrap();
        sort_eigenvalues(&mut vals);
        for (i, v) in vals.iter().enumerate() {
            assert!((v - d[(i, i)]).norm() < 1e-14);
        }
        let g = 0.8;
        let off = Mat::from_fn(2, 2, |i, j| if i != j { C64::new(g, 0.0) } else { C64::new(0.0, 0.0) });
        let mut vals = eig_complex(&off).unwrap();
        sort_eigenvalues(&mut vals);
        assert!((vals[0] + g).norm() < 1e-14 && (vals[1] - g).norm() < 1e-14);
        assert!(eig_complex(&Mat::<C64>::zeros(9, 9)).is_err());
        assert!(eig_complex(&Mat::<C64>::zeros(2, 3)).is_err());
    }

    #[test]
    fn eig_trace_identity() {
        let m = Mat::from_fn(4, 4, |i, j| {
            let x = ((i * 7 + j * 3) as f64 * 0.37).sin();
            let y = ((i + 5 * j) as f64 * 0.91).cos();
            C64::new(x, y)
        });
        let vals = eig_complex(&m).unwrap();
        let trace: C64 = (0..4).map(|i| m[(i, i)]).sum();
        let sum: C64 = vals.iter().sum();
        assert!((trace - sum).norm() <= 1e-9 * trace.norm().max(1.0));
    }

    #[test]
    fn weak_loss_limit_of_fig_parameters() {
        let g = from_ghz(3.0);
        let mut c = lossless(g, g / 2.0, g);
        c.gamma_eg = 1.5e-3 * g;
        c.gamma_es = 1.5e-3 * g;
        c.gamma_fg = 1.5e-3 * g;
        c.gamma_fs = 1.5e-3 * g;
        c.gamma_sg = 3e-4 * g;
        c.kappa = 1e-6 * g;
        let spec = dressed_energies(&c, 1).unwrap();
        let r = 1.25f64.sqrt();
        for (got, want) in spec.energies_over_g.iter().zip([-r, 0.0, r]) {
            assert!((got - want).abs() < 1e-4, "{:?}", spec.energies_over_g);
        }
        assert!(spec.widths.iter().all(|w| *w > 0.0));
    }

    #[test]
    fn large_kappa_merges_cavity_doublet() {
        // Brute-force scan with the drive off: the cavity–emitter doublet
        // collapses once κ ≫ g.
        let g = 1.0;
        for ratio in [100.0, 300.0, 1000.0] {
            let mut c = lossless(g, 0.0, g);
            c.kappa = ratio * g;
            c.gamma_eg = 0.01;
            let spec = dressed_energies(&c, 1).unwrap();
            let spread = spec.energies_over_g.last().unwrap() - spec.energies_over_g[0];
            assert!(spread < 1e-3, "κ/g = {ratio}: {spread}");
        }
    }

    #[test]
    fn drive_keeps_first_manifold_split_at_large_kappa() {
        // The Ω coupling between |e,0⟩ and |s,0⟩ survives any cavity loss.
        let g = 1.0;
        let mut c = lossless(g, g, g);
        c.kappa = 100.0 * g;
        let spec = dressed_energies(&c, 1).unwrap();
        let spread = spec.energies_over_g.last().unwrap() - spec.energies_over_g[0];
        assert!((spread - 2.0).abs() < 1e-3, "{spread}");
    }

    #[test]
    fn vacuum_rabi_doublet_matches_closed_form() {
        // Two-level first manifold at resonance: λ = −i(κ+γ)/2 ± √(g² − (κ−γ)²/4).
        let base = two_level_resonant(1.0);
        for (g, kappa, gamma) in [(1.0, 0.5, 0.1), (1.0, 2.5, 0.1), (0.3, 1.0, 0.2), (2.0, 4.9, 0.4)] {
            let mut c = base.clone();
            c.g_eg = g;
            c.kappa = kappa;
            c.gamma_eg = gamma;
            let spec = dressed_energies(&c, 1).unwrap();
            let disc = C64::new(g * g - (kappa - gamma).powi(2) / 4.0, 0.0).sqrt();
            let mut want = vec![
                C64::new(0.0, -(kappa + gamma) / 2.0) - disc,
                C64::new(0.0, -(kappa + gamma) / 2.0) + disc,
            ];
            sort_eigenvalues(&mut want);
            for (a, b) in spec.eigenvalues.iter().zip(&want) {
                assert!((a - b).norm() < 1e-9, "{:?} vs {want:?}", spec.eigenvalues);
            }
            let split = spec.eigenvalues[1].re - spec.eigenvalues[0].re;
            if g <= (kappa - gamma).abs() / 2.0 {
                assert!(split.abs() < 1e-9);
            } else {
                assert!(split > 0.0);
            }
        }
    }
}
