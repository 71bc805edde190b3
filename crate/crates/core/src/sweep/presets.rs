//! Parameter sets and grids for each figure of the study.
//!
//! All presets share `g_eg/2π = 3 GHz` and `ℰ/2π = 0.1 GHz` unless noted.
//! One-dimensional axes default to 61 points and maps to 61 × 61.

use num_complex::Complex64 as C64;

use crate::error::{Error, Result};
use crate::model::{cesium_preset, from_ghz, two_level_resonant, SystemConfig};
use crate::sweep::spec::{Axis, Column, Minimize, Observable, Param, Series, SweepSpec};

pub const FIGURE_IDS: [&str; 11] = [
    "fig2a", "fig2b", "fig3a", "fig3b", "fig3c", "fig4a", "fig4b", "fig4c", "fig5", "int1", "int2",
];

pub const GRID_POINTS: usize = 61;
/// Coupling of the nanocavity presets, GHz.
pub const G_GHZ: f64 = 3.0;
/// Coupling of the Fabry–Perot comparison points, GHz.
pub const FABRY_PEROT_G_GHZ: f64 = 0.12;
/// Fabry–Perot cavity decay rates, GHz.
pub const FABRY_PEROT_KAPPA_GHZ: [f64; 2] = [0.04, 0.004];
/// Probe amplitude used for the Fabry–Perot points, GHz; weak against both
/// decay rates.
pub const FABRY_PEROT_EPS_GHZ: f64 = 0.0004;

/// Emitter detuning search for the Fabry–Perot points, units of `g`. At this
/// coupling the hyperfine mismatch is about `75 g`, so the search reaches past it.
pub const FABRY_PEROT_BRACKET: [f64; 2] = [-100.0, 20.0];

/// Two-level probe detuning search, units of `g`.
pub const TWO_LEVEL_BRACKET: [f64; 2] = [0.0, 3.0];
/// Cesium probe–emitter detuning search, units of `g`.
pub const CESIUM_BRACKET: [f64; 2] = [-3.0, 3.0];

pub fn linspace(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    if n == 1 {
        return vec![lo];
    }
    let step = (hi - lo) / (n - 1) as f64;
    (0..n)
        .map(|i| if i + 1 == n { hi } else { lo + step * i as f64 })
        .collect()
}

pub fn logspace(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    linspace(lo.log10(), hi.log10(), n)
        .into_iter()
        .enumerate()
        .map(|(i, e)| match i {
            0 => lo,
            _ if i + 1 == n => hi,
            _ => 10f64.powf(e),
        })
        .collect()
}

/// `(0, 2]` without the undriven end point.
fn omega_grid() -> Vec<f64> {
    (1..=GRID_POINTS).map(|i| 2.0 * i as f64 / GRID_POINTS as f64).collect()
}

/// `κ/g` for `g/κ` log-spaced on `[0.2, 10]`, ascending in `g/κ`.
fn inverse_coupling_grid() -> Vec<f64> {
    logspace(0.2, 10.0, GRID_POINTS).into_iter().map(|x| 1.0 / x).collect()
}

fn g() -> f64 {
    from_ghz(G_GHZ)
}

fn resonant(kappa_over_g: f64) -> SystemConfig {
    SystemConfig::resonant(kappa_over_g * g())
}

fn cesium(kappa_over_g: f64) -> SystemConfig {
    cesium_preset(kappa_over_g * g(), 0.0, crate::model::DEFAULT_N_FOCK).expect("valid cesium preset")
}

fn two_level(kappa_over_g: f64) -> SystemConfig {
    two_level_resonant(kappa_over_g * g())
}

fn series(label: &str, base: SystemConfig, columns: Vec<Column>) -> Series {
    Series {
        label: label.into(),
        base,
        columns,
        minimize: None,
    }
}

fn minimized(label: &str, base: SystemConfig, g2_column: &str, vary: Param, bracket: [f64; 2], argmin: &str) -> Series {
    Series {
        label: label.into(),
        base,
        columns: vec![Column::new(Observable::G2, g2_column)],
        minimize: Some(Minimize {
            vary,
            bracket,
            argmin_column: Some(argmin.into()),
        }),
    }
}

fn two_level_optimized(label: &str, kappa_over_g: f64, g2_column: &str, argmin: &str) -> Series {
    minimized(label, two_level(kappa_over_g), g2_column, Param::DeltaCOverG, TWO_LEVEL_BRACKET, argmin)
}

fn cesium_optimized(label: &str, base: SystemConfig, g2_column: &str, argmin: &str) -> Series {
    minimized(label, base, g2_column, Param::DeltaEgOverG, CESIUM_BRACKET, argmin)
}

fn g2(name: &str) -> Vec<Column> {
    vec![Column::new(Observable::G2, name)]
}

fn kappa_tag(k: f64) -> String {
    format!("kappa{k}")
}

fn spec(id: &str, axes: Vec<Axis>, series: Vec<Series>, notes: &[&str]) -> SweepSpec {
    SweepSpec {
        id: id.into(),
        axes,
        series,
        notes: notes.iter().map(|s| s.to_string()).collect(),
    }
}

fn fig2a() -> SweepSpec {
    let mut base = resonant(1.0);
    let (gamma_e, gamma_s) = (3e-3 * g(), 3e-4 * g());
    base.gamma_eg = gamma_e / 2.0;
    base.gamma_es = gamma_e / 2.0;
    base.gamma_fg = gamma_e / 2.0;
    base.gamma_fs = gamma_e / 2.0;
    base.gamma_sg = gamma_s;
    let with_omega = |omega: f64| {
        let mut c = base.clone();
        c.omega_rabi = C64::new(omega * g(), 0.0);
        c
    };
    let dressed = |tag: &str| {
        vec![
            Column::new(Observable::Dressed1, format!("m1_{tag}")),
            Column::new(Observable::Dressed2, format!("m2_{tag}")),
        ]
    };
    spec(
        "fig2a",
        vec![Axis::new(Param::KappaOverG, logspace(0.1, 10.0, GRID_POINTS))],
        vec![
            series("omega_half", with_omega(0.5), dressed("omega_half")),
            series("omega_full", with_omega(1.0), dressed("omega_full")),
        ],
        &["level widths gamma_e and gamma_f are split equally between their two decay channels"],
    )
}

fn fig2b() -> SweepSpec {
    spec(
        "fig2b",
        vec![Axis::new(Param::KappaOverG, inverse_coupling_grid())],
        vec![
            series("four_level", resonant(1.0), g2("g2_fourlevel")),
            two_level_optimized("two_level", 1.0, "g2_twolevel", "delta_c_opt"),
        ],
        &["rows ascend in g/kappa from 0.2 to 10 (log spaced)"],
    )
}

fn fig3a() -> SweepSpec {
    let mut all = Vec::new();
    for k in [1.0, 2.0, 3.0] {
        for (gfs, tag) in [(1.0, "gfs1"), (0.5, "gfs05")] {
            let mut base = resonant(k);
            base.g_fs = gfs * g();
            let label = format!("{}_{tag}", kappa_tag(k));
            all.push(series(&label, base, g2(&format!("g2_{label}"))));
        }
    }
    spec("fig3a", vec![Axis::new(Param::OmegaOverG, omega_grid())], all, &[])
}

fn fig3b() -> SweepSpec {
    let all = [1.0, 2.0, 3.0]
        .into_iter()
        .map(|k| {
            let mut base = resonant(k);
            base.omega_rabi = C64::new(0.5 * g(), 0.0);
            series(&kappa_tag(k), base, g2(&format!("g2_{}", kappa_tag(k))))
        })
        .collect();
    spec(
        "fig3b",
        vec![Axis::new(Param::GfsOverGeg, linspace(0.0, 2.0, GRID_POINTS))],
        all,
        &["kappa values follow fig3a"],
    )
}

fn eps_axis() -> Axis {
    Axis::new(Param::Eps, logspace(0.01, 3.0, GRID_POINTS))
}

fn fig3c() -> SweepSpec {
    let mut all: Vec<Series> = [1.0, 2.0, 3.0]
        .into_iter()
        .map(|k| series(&kappa_tag(k), resonant(k), g2(&format!("g2_{}", kappa_tag(k)))))
        .collect();
    all.push(two_level_optimized("two_level", 1.0, "g2_twolevel_kappa1", "delta_c_opt_twolevel"));
    spec("fig3c", vec![eps_axis()], all, &["two-level probe detuning optimized at every eps"])
}

fn fig4a() -> SweepSpec {
    spec(
        "fig4a",
        vec![
            Axis::new(Param::Field("kappa".into()), linspace(1.0, 10.0, GRID_POINTS)),
            Axis::new(Param::DeltaEgOverG, linspace(CESIUM_BRACKET[0], CESIUM_BRACKET[1], GRID_POINTS)),
        ],
        vec![series("cesium", cesium(1.0), g2("g2"))],
        &[],
    )
}

fn cesium_family(id: &str, axis: Axis) -> SweepSpec {
    let all = [1.0, 2.0, 3.0]
        .into_iter()
        .map(|k| {
            let tag = kappa_tag(k);
            cesium_optimized(&tag, cesium(k), &format!("g2_{tag}"), &format!("delta_eg_opt_{tag}"))
        })
        .collect();
    spec(id, vec![axis], all, &["delta_eg minimizes g2 at every point"])
}

fn fig5() -> Vec<SweepSpec> {
    let main = spec(
        "fig5",
        vec![Axis::new(Param::KappaOverG, inverse_coupling_grid())],
        vec![
            cesium_optimized("cesium", cesium(1.0), "g2_cesium", "delta_eg_opt"),
            series("four_level", resonant(1.0), g2("g2_fourlevel")),
            two_level_optimized("two_level", 1.0, "g2_twolevel", "delta_c_opt"),
        ],
        &["x axis mirrors fig2b: rows ascend in g/kappa from 0.2 to 10 (log spaced)"],
    );
    let mut fp = cesium(1.0);
    fp.g_eg = from_ghz(FABRY_PEROT_G_GHZ);
    fp.g_fs = 1.5 * fp.g_eg;
    fp.omega_rabi = C64::new(fp.g_eg, 0.0);
    fp.eps = C64::new(from_ghz(FABRY_PEROT_EPS_GHZ), 0.0);
    let points = spec(
        "fig5_fabry_perot",
        vec![Axis::new(Param::Field("kappa".into()), FABRY_PEROT_KAPPA_GHZ.to_vec())],
        vec![minimized("cesium", fp, "g2_cesium", Param::DeltaEgOverG, FABRY_PEROT_BRACKET, "delta_eg_opt")],
        &["cesium emitter in a Fabry-Perot cavity, g/2pi = 0.12 GHz; rows are the upper and lower reference lines"],
    );
    vec![main, points]
}

fn transmission_columns(tag: &str) -> Vec<Column> {
    vec![
        Column::new(Observable::T1, format!("t1_{tag}")),
        Column::new(Observable::T2, format!("t2_{tag}")),
    ]
}

fn int1() -> SweepSpec {
    spec(
        "int1",
        vec![
            Axis::new(Param::KappaOverG, linspace(0.1, 4.0, GRID_POINTS)),
            Axis::new(Param::DeltaCOverG, linspace(-4.0, 4.0, GRID_POINTS)),
        ],
        vec![
            series("four_level", resonant(1.0), transmission_columns("fourlevel")),
            series("two_level", two_level(1.0), transmission_columns("twolevel")),
        ],
        &["strong-coupling boundary at kappa_over_g = 2"],
    )
}

fn int2() -> SweepSpec {
    spec(
        "int2",
        vec![
            Axis::new(Param::DeltaCOverG, linspace(-4.0, 4.0, GRID_POINTS)),
            Axis::new(Param::DeltaEgOverG, linspace(CESIUM_BRACKET[0], CESIUM_BRACKET[1], GRID_POINTS)),
        ],
        vec![
            series("kappa_third", cesium(1.0 / 3.0), transmission_columns("kappa_third")),
            series("kappa2", cesium(2.0), transmission_columns("kappa2")),
        ],
        &[],
    )
}

/// Specifications for one figure id; `fig5` also returns its Fabry–Perot points.
pub fn figure_preset(id: &str) -> Result<Vec<SweepSpec>> {
    let specs = match id {
        "fig2a" => vec![fig2a()],
        "fig2b" => vec![fig2b()],
        "fig3a" => vec![fig3a()],
        "fig3b" => vec![fig3b()],
        "fig3c" => vec![fig3c()],
        "fig4a" => vec![fig4a()],
        "fig4b" => vec![cesium_family("fig4b", Axis::new(Param::OmegaOverG, omega_grid()))],
        "fig4c" => vec![cesium_family("fig4c", eps_axis())],
        "fig5" => fig5(),
        "int1" => vec![int1()],
        "int2" => vec![int2()],
        other => return Err(Error::UnknownFigure(other.to_string())),
    };
    Ok(specs)
}

/// Every preset, in [`FIGURE_IDS`] order.
pub fn all_presets() -> Vec<SweepSpec> {
    FIGURE_IDS
        .iter()
        .flat_map(|id| figure_preset(id).expect("known id"))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{CESIUM_MISMATCH_GHZ, Scheme};

    #[test]
    fn every_preset_validates() {
        for spec in all_presets() {
            spec.validate().unwrap_or_else(|e| panic!("{}: {e}", spec.id));
            for axis in &spec.axes {
                let increasing = axis.values.windows(2).all(|w| w[1] > w[0]);
                let decreasing = axis.values.windows(2).all(|w| w[1] < w[0]);
                assert!(increasing || decreasing, "{} {}", spec.id, axis.param);
            }
        }
        assert!(matches!(figure_preset("fig9"), Err(Error::UnknownFigure(_))));
    }

    #[test]
    fn grids() {
        let l = linspace(-3.0, 3.0, 61);
        assert_eq!((l[0], l[30], l[60]), (-3.0, 0.0, 3.0));
        let g = logspace(0.2, 10.0, 61);
        assert_eq!((g[0], g[60]), (0.2, 10.0));
        assert!((g[30] - (2.0f64).sqrt()).abs() < 1e-12);
        assert_eq!(omega_grid()[60], 2.0);
        assert!(omega_grid()[0] > 0.0);
    }

    #[test]
    fn fig2b_schema() {
        let s = &figure_preset("fig2b").unwrap()[0];
        assert_eq!(s.column_names(), ["kappa_over_g", "g2_fourlevel", "g2_twolevel", "delta_c_opt"]);
        let k = &s.axes[0].values;
        assert_eq!(k.len(), GRID_POINTS);
        assert!((k[0] - 5.0).abs() < 1e-12 && (k[60] - 0.1).abs() < 1e-12);
        assert_eq!(s.series[1].base.scheme, Scheme::TwoLevel);
        let b = &s.series[0].base;
        assert!((b.g_eg - from_ghz(3.0)).abs() < 1e-12);
        assert_eq!(b.omega_rabi, C64::new(b.g_eg, 0.0));
        assert!((b.eps.re - from_ghz(0.1)).abs() < 1e-12);
    }

    #[test]
    fn caption_parameters() {
        let fig3 = &figure_preset("fig3a").unwrap()[0];
        for s in &fig3.series {
            let b = &s.base;
            for rate in [b.gamma_eg, b.gamma_es, b.gamma_fg, b.gamma_fs] {
                assert!((rate - from_ghz(0.01)).abs() < 1e-12);
            }
            assert!((b.gamma_sg - from_ghz(0.001)).abs() < 1e-12);
        }
        let fig4 = &figure_preset("fig4a").unwrap()[0];
        let b = &fig4.series[0].base;
        assert!((b.g_fs - 1.5 * b.g_eg).abs() < 1e-12);
        assert_eq!(b.omega_rabi.re, b.g_eg);
        assert_eq!(b.delta_c, 0.0);
        assert_eq!(b.delta_sg, 0.0);
        assert!((b.delta_fg - b.delta_eg - from_ghz(CESIUM_MISMATCH_GHZ)).abs() < 1e-9);
        let fig2a = &figure_preset("fig2a").unwrap()[0];
        let b = &fig2a.series[0].base;
        assert!((b.gamma_e() / b.g_eg - 3e-3).abs() < 1e-15);
        assert!((b.gamma_f() / b.g_eg - 3e-3).abs() < 1e-15);
        assert!((b.gamma_s() / b.g_eg - 3e-4).abs() < 1e-15);
        assert_eq!(b.omega_rabi.re, 0.5 * b.g_eg);
        let fp = &figure_preset("fig5").unwrap()[1];
        assert_eq!(fp.axes[0].values, vec![0.04, 0.004]);
        assert!((fp.series[0].base.g_eg - from_ghz(0.12)).abs() < 1e-12);
    }
}
