use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::error::Result;
use crate::model::{SystemConfig, WidthConvention};
use crate::solvers::{dressed_energies, g2_zero, mean_photon, steady_state_for, RESIDUAL_TOL};
use crate::sweep::optimize::{optimize_probe_detuning, RESOLUTION_OVER_G, SCAN_POINTS};
use crate::sweep::spec::{series_columns, Observable, Series, SweepSpec};
use crate::transmission::{t1, t2, PIVOT_TOL};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct RunOptions {
    /// Evaluate grid points on the rayon pool when the `parallel` feature is on.
    pub parallel: bool,
    /// Replaces every series' Fock truncation.
    pub n_fock: Option<usize>,
}

impl Default for RunOptions {
    fn default() -> Self {
        Self {
            parallel: true,
            n_fock: None,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Failure {
    pub row: usize,
    pub series: String,
    pub message: String,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BoundaryHit {
    pub row: usize,
    pub series: String,
    pub argmin: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Tolerances {
    pub steady_residual: f64,
    pub optimizer_scan_points: usize,
    pub optimizer_resolution_over_g: f64,
    pub manifold_pivot: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SeriesInfo {
    pub label: String,
    pub n_fock: usize,
    pub widths: WidthConvention,
    /// The base configuration in rad/ns, as used internally.
    pub angular: BTreeMap<String, f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Metadata {
    pub id: String,
    pub version: String,
    pub series: Vec<SeriesInfo>,
    pub tolerances: Tolerances,
    /// Largest relative steady-state residual over all rows.
    pub max_residual: f64,
    pub units: BTreeMap<String, String>,
    pub failures: Vec<Failure>,
    pub boundary_hits: Vec<BoundaryHit>,
    pub notes: Vec<String>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SweepResult {
    pub spec: SweepSpec,
    pub columns: Vec<String>,
    #[serde(with = "crate::sweep::io::nullable_rows")]
    pub rows: Vec<Vec<f64>>,
    pub metadata: Metadata,
}

impl SweepResult {
    pub fn column(&self, name: &str) -> Option<Vec<f64>> {
        let k = self.columns.iter().position(|c| c == name)?;
        Some(self.rows.iter().map(|r| r[k]).collect())
    }
}

struct SeriesOutcome {
    values: Vec<f64>,
    residual: f64,
    failure: Option<String>,
    boundary: Option<f64>,
}

fn evaluate(spec: &SweepSpec, series: &Series, index: usize, width: usize) -> SeriesOutcome {
    let mut residual = 0.0;
    let mut boundary = None;
    let mut run = || -> Result<Vec<f64>> {
        let mut config = spec.configure(series, index)?;
        let mut argmin = None;
        if let Some(m) = &series.minimize {
            let opt = optimize_probe_detuning(&config, &m.vary, m.bracket)?;
            if opt.at_boundary {
                boundary = Some(opt.argmin);
            }
            m.vary.apply(&mut config, opt.argmin)?;
            argmin = Some(opt.argmin);
        }
        let needs_steady = series
            .columns
            .iter()
            .any(|c| matches!(c.observable, Observable::G2 | Observable::NPhoton));
        let steady = if needs_steady {
            let s = steady_state_for(&config)?;
            residual = s.residual;
            Some(s)
        } else {
            None
        };
        let mut values = Vec::with_capacity(width);
        for column in &series.columns {
            match column.observable {
                Observable::G2 => values.push(g2_zero(&steady.as_ref().expect("solved").rho)?),
                Observable::NPhoton => values.push(mean_photon(&steady.as_ref().expect("solved").rho)),
                Observable::T1 => values.push(t1(&config)?),
                Observable::T2 => values.push(t2(&config)?),
                Observable::Dressed1 | Observable::Dressed2 => {
                    let n = if column.observable == Observable::Dressed1 { 1 } else { 2 };
                    let s = dressed_energies(&config, n)?;
                    values.extend(&s.energies_over_g);
                    values.extend(s.widths.iter().map(|w| w / config.g_eg));
                }
            }
        }
        values.extend(argmin);
        Ok(values)
    };
    match run() {
        Ok(values) => SeriesOutcome {
            values,
            residual,
            failure: None,
            boundary,
        },
        Err(e) => SeriesOutcome {
            values: vec![f64::NAN; width],
            residual,
            failure: Some(e.to_string()),
            boundary: None,
        },
    }
}

fn evaluate_row(spec: &SweepSpec, widths: &[usize], index: usize) -> Vec<SeriesOutcome> {
    spec.series
        .iter()
        .zip(widths)
        .map(|(series, &width)| evaluate(spec, series, index, width))
        .collect()
}

fn angular(config: &SystemConfig) -> BTreeMap<String, f64> {
    [
        ("g_eg", config.g_eg),
        ("g_fs", config.g_fs),
        ("omega_rabi_re", config.omega_rabi.re),
        ("omega_rabi_im", config.omega_rabi.im),
        ("eps_re", config.eps.re),
        ("eps_im", config.eps.im),
        ("kappa", config.kappa),
        ("gamma_sg", config.gamma_sg),
        ("gamma_eg", config.gamma_eg),
        ("gamma_es", config.gamma_es),
        ("gamma_fg", config.gamma_fg),
        ("gamma_fs", config.gamma_fs),
        ("delta_c", config.delta_c),
        ("delta_sg", config.delta_sg),
        ("delta_eg", config.delta_eg),
        ("delta_fg", config.delta_fg),
    ]
    .into_iter()
    .map(|(k, v)| (k.to_string(), v))
    .collect()
}

/// Evaluates every grid point of `spec`.
///
/// Rows come out in axis1-major order whatever the execution mode, and each
/// point is computed by the same sequential code, so serial and parallel runs
/// agree bit for bit. A failing point yields `NaN` in that series' columns
/// and an entry in [`Metadata::failures`].
pub fn run_sweep(spec: &SweepSpec, options: RunOptions) -> Result<SweepResult> {
    let mut spec = spec.clone();
    if let Some(n) = options.n_fock {
        for series in &mut spec.series {
            series.base.n_fock = n;
        }
    }
    spec.validate()?;
    let widths: Vec<usize> = spec.series.iter().map(|s| series_columns(s).len()).collect();
    let n = spec.n_points();

    let outcomes: Vec<Vec<SeriesOutcome>> = if options.parallel && cfg!(feature = "parallel") {
        parallel_rows(&spec, &widths, n)
    } else {
        (0..n).map(|i| evaluate_row(&spec, &widths, i)).collect()
    };

    let mut rows = Vec::with_capacity(n);
    let mut failures = Vec::new();
    let mut boundary_hits = Vec::new();
    let mut max_residual: f64 = 0.0;
    for (index, row_outcomes) in outcomes.into_iter().enumerate() {
        let mut row = spec.point(index);
        for (series, outcome) in spec.series.iter().zip(row_outcomes) {
            row.extend(outcome.values);
            max_residual = max_residual.max(outcome.residual);
            if let Some(message) = outcome.failure {
                failures.push(Failure {
                    row: index,
                    series: series.label.clone(),
                    message,
                });
            }
            if let Some(argmin) = outcome.boundary {
                boundary_hits.push(BoundaryHit {
                    row: index,
                    series: series.label.clone(),
                    argmin,
                });
            }
        }
        rows.push(row);
    }

    let mut units = BTreeMap::new();
    for axis in &spec.axes {
        units.insert(axis.param.to_string(), axis.param.unit().to_string());
    }
    for series in &spec.series {
        for column in &series.columns {
            for name in column.observable.column_names(&column.name, series.base.scheme) {
                units.insert(name, column.observable.unit().to_string());
            }
        }
        if let Some(m) = &series.minimize {
            if let Some(name) = &m.argmin_column {
                units.insert(name.clone(), format!("{} ({})", m.vary, m.vary.unit()));
            }
        }
    }

    let metadata = Metadata {
        id: spec.id.clone(),
        version: env!("CARGO_PKG_VERSION").to_string(),
        series: spec
            .series
            .iter()
            .map(|s| SeriesInfo {
                label: s.label.clone(),
                n_fock: s.base.n_fock,
                widths: s.base.widths,
                angular: angular(&s.base),
            })
            .collect(),
        tolerances: Tolerances {
            steady_residual: RESIDUAL_TOL,
            optimizer_scan_points: SCAN_POINTS,
            optimizer_resolution_over_g: RESOLUTION_OVER_G,
            manifold_pivot: PIVOT_TOL,
        },
        max_residual,
        units,
        failures,
        boundary_hits,
        notes: spec.notes.clone(),
    };
    Ok(SweepResult {
        columns: spec.column_names(),
        rows,
        metadata,
        spec,
    })
}

#[cfg(feature = "parallel")]
fn parallel_rows(spec: &SweepSpec, widths: &[usize], n: usize) -> Vec<Vec<SeriesOutcome>> {
    use rayon::prelude::*;
    (0..n).into_par_iter().map(|i| evaluate_row(spec, widths, i)).collect()
}

#[cfg(not(feature = "parallel"))]
fn parallel_rows(spec: &SweepSpec, widths: &[usize], n: usize) -> Vec<Vec<SeriesOutcome>> {
    (0..n).map(|i| evaluate_row(spec, widths, i)).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{from_ghz, two_level_resonant};
    use crate::sweep::spec::{Axis, Column, Minimize, Param};
    use num_complex::Complex64 as C64;

    fn small(base: SystemConfig) -> SweepSpec {
        SweepSpec {
            id: "t".into(),
            axes: vec![Axis::new(Param::KappaOverG, vec![1.0, 2.0])],
            series: vec![Series {
                label: "s".into(),
                base,
                columns: vec![
                    Column::new(Observable::G2, "g2"),
                    Column::new(Observable::NPhoton, "n"),
                    Column::new(Observable::T1, "t1"),
                    Column::new(Observable::Dressed1, "m1"),
                ],
                minimize: None,
            }],
            notes: vec!["demo".into()],
        }
    }

    #[test]
    fn single_point_matches_direct_call() {
        let mut base = SystemConfig::resonant(1.0);
        base.n_fock = 5;
        let mut spec = small(base.clone());
        spec.axes[0].values = vec![2.0];
        let r = run_sweep(&spec, RunOptions::default()).unwrap();
        let mut c = base.clone();
        c.kappa = 2.0 * c.g_eg;
        let ss = steady_state_for(&c).unwrap();
        assert_eq!(r.rows.len(), 1);
        assert_eq!(r.column("g2").unwrap()[0], g2_zero(&ss.rho).unwrap());
        assert_eq!(r.column("n").unwrap()[0], mean_photon(&ss.rho));
        assert_eq!(r.column("t1").unwrap()[0], t1(&c).unwrap());
        let d = dressed_energies(&c, 1).unwrap();
        assert_eq!(r.column("m1_2").unwrap()[0], d.energies_over_g[2]);
        assert_eq!(r.column("m1_width_0").unwrap()[0], d.widths[0] / c.g_eg);
        assert_eq!(r.metadata.notes, vec!["demo".to_string()]);
        assert!(r.metadata.max_residual < RESIDUAL_TOL);
    }

    #[test]
    fn failures_are_recorded_not_fatal() {
        let mut base = SystemConfig::resonant(1.0);
        base.n_fock = 4;
        base.eps = C64::new(0.0, 0.0);
        let r = run_sweep(&small(base), RunOptions::default()).unwrap();
        assert_eq!(r.rows.len(), 2);
        assert!(r.rows.iter().all(|row| row[1].is_nan()));
        assert_eq!(r.metadata.failures.len(), 2);
        assert_eq!(r.rows[0][0], 1.0);
    }

    #[test]
    fn serial_and_parallel_agree() {
        let mut base = two_level_resonant(from_ghz(1.0));
        base.n_fock = 4;
        let mut spec = small(base);
        spec.axes[0].values = vec![0.2, 0.5, 1.0, 2.0];
        spec.series[0].minimize = Some(Minimize {
            vary: Param::DeltaCOverG,
            bracket: [0.0, 3.0],
            argmin_column: Some("dc_opt".into()),
        });
        let a = run_sweep(&spec, RunOptions { parallel: false, n_fock: None }).unwrap();
        let b = run_sweep(&spec, RunOptions { parallel: true, n_fock: None }).unwrap();
        assert_eq!(format!("{:?}", a.rows), format!("{:?}", b.rows));
        assert_eq!(a.columns.last().unwrap(), "dc_opt");
    }

    #[test]
    fn n_fock_override_applies() {
        let mut base = SystemConfig::resonant(1.0);
        base.n_fock = 7;
        let r = run_sweep(&small(base), RunOptions { parallel: false, n_fock: Some(3) }).unwrap();
        assert_eq!(r.metadata.series[0].n_fock, 3);
    }
}
