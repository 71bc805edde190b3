//! Browser bindings for the blockade demo page.
//!
//! Every export returns a flat `Vec<f64>` (a `Float64Array` on the JS side)
//! laid out row by row; non-finite entries mark points where a solver failed.

use blockade::model::{from_ghz, two_level_resonant, SystemConfig};
use blockade::solvers::{dressed_energies, g2_zero, steady_state_for};
use blockade::sweep::{linspace, logspace, Param};
use blockade::transmission::{t1, t2};
use num_complex::Complex64 as C64;
use wasm_bindgen::prelude::*;

const G_GHZ: f64 = 3.0;
/// Smaller than the library default to keep a full curve interactive.
const DEMO_N_FOCK: usize = 5;

fn resonant(kappa_over_g: f64, omega_over_g: f64, gfs_over_g: f64) -> SystemConfig {
    let g = from_ghz(G_GHZ);
    let mut c = SystemConfig::resonant(kappa_over_g * g);
    c.omega_rabi = C64::new(omega_over_g * g, 0.0);
    c.g_fs = gfs_over_g * g;
    c.n_fock = DEMO_N_FOCK;
    c
}

fn two_level(kappa_over_g: f64) -> SystemConfig {
    let mut c = two_level_resonant(kappa_over_g * from_ghz(G_GHZ));
    c.n_fock = DEMO_N_FOCK;
    c
}

fn clamp_points(points: usize) -> usize {
    points.clamp(2, 400)
}

/// Rows of `[κ/g, E_1/g, .., E_n/g]` for manifold 1 or 2 of the resonant
/// emitter, κ/g log-spaced over `[lo, hi]`.
#[wasm_bindgen]
pub fn dressed_spectrum(lo: f64, hi: f64, points: usize, omega_over_g: f64, manifold: usize) -> Vec<f64> {
    let manifold = manifold.clamp(1, 2);
    let mut out = Vec::new();
    let (lo, hi) = (lo.max(1e-3), hi.max(lo.max(1e-3) * 1.001));
    for k in logspace(lo, hi, clamp_points(points)) {
        let c = resonant(k, omega_over_g, 1.0);
        out.push(k);
        match dressed_energies(&c, manifold) {
            Ok(s) => out.extend(&s.energies_over_g),
            Err(_) => out.extend(std::iter::repeat_n(f64::NAN, manifold + 2)),
        }
    }
    out
}

/// Rows of `[g/κ, g²_four-level, g²_two-level(Δc)]` with g/κ log-spaced on
/// `[lo, hi]`; the two-level emitter is probed at `Δc = delta_c_over_g · g`.
#[wasm_bindgen]
pub fn g2_curve(lo: f64, hi: f64, points: usize, omega_over_g: f64, gfs_over_g: f64, delta_c_over_g: f64) -> Vec<f64> {
    let g2 = |c: &SystemConfig| {
        steady_state_for(c)
            .and_then(|s| g2_zero(&s.rho))
            .unwrap_or(f64::NAN)
    };
    let (lo, hi) = (lo.max(1e-2), hi.max(lo.max(1e-2) * 1.001));
    let mut out = Vec::new();
    for x in logspace(lo, hi, clamp_points(points)) {
        let four = resonant(1.0 / x, omega_over_g, gfs_over_g);
        let mut two = two_level(1.0 / x);
        let shifted = Param::DeltaCOverG.apply(&mut two, delta_c_over_g);
        out.push(x);
        out.push(g2(&four));
        out.push(if shifted.is_ok() { g2(&two) } else { f64::NAN });
    }
    out
}

/// Rows of `[Δc/g, t1_four, t2_four, t1_two, t2_two]` over `Δc/g ∈ [-span, span]`.
#[wasm_bindgen]
pub fn transmission_curve(kappa_over_g: f64, omega_over_g: f64, span: f64, points: usize) -> Vec<f64> {
    let span = span.abs().max(1e-3);
    let mut out = Vec::new();
    for x in linspace(-span, span, clamp_points(points)) {
        out.push(x);
        for mut c in [resonant(kappa_over_g, omega_over_g, 1.0), two_level(kappa_over_g)] {
            if Param::DeltaCOverG.apply(&mut c, x).is_err() {
                out.extend([f64::NAN, f64::NAN]);
                continue;
            }
            out.push(t1(&c).unwrap_or(f64::NAN));
            out.push(t2(&c).unwrap_or(f64::NAN));
        }
    }
    out
}
