use std::fmt;
use std::str::FromStr;

use num_complex::Complex64 as C64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::{from_ghz, Scheme, SystemConfig};

/// A swept quantity.
///
/// Raw field names take values in GHz. The `_over_g` forms are in units of
/// the current `g_eg`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "String", into = "String")]
pub enum Param {
    /// One of the rate or detuning fields of [`SystemConfig`], in GHz.
    Field(String),
    OmegaRabi,
    Eps,
    KappaOverG,
    OmegaOverG,
    GfsOverGeg,
    /// Probe–cavity detuning. The probe moves with the drive following it, so
    /// `Δc`, `Δeg` and `Δfg` shift together and `Δsg` is kept.
    DeltaCOverG,
    /// Probe–emitter detuning at fixed `Δc`; `Δfg` follows so that the
    /// emitter's level spacings are kept.
    DeltaEgOverG,
}

const FIELDS: [&str; 12] = [
    "g_eg", "g_fs", "kappa", "gamma_sg", "gamma_eg", "gamma_es", "gamma_fg", "gamma_fs", "delta_c",
    "delta_sg", "delta_eg", "delta_fg",
];

impl Param {
    pub fn name(&self) -> &str {
        match self {
            Param::Field(name) => name,
            Param::OmegaRabi => "omega_rabi",
            Param::Eps => "eps",
            Param::KappaOverG => "kappa_over_g",
            Param::OmegaOverG => "omega_over_g",
            Param::GfsOverGeg => "gfs_over_geg",
            Param::DeltaCOverG => "delta_c_over_g",
            Param::DeltaEgOverG => "delta_eg_over_g",
        }
    }

    /// Unit label written to result metadata.
    pub fn unit(&self) -> &'static str {
        match self {
            Param::Field(_) | Param::OmegaRabi | Param::Eps => "GHz (frequency / 2π)",
            _ => "units of g_eg",
        }
    }

    /// Whether values are multiples of `g_eg`.
    pub fn is_relative(&self) -> bool {
        self.unit() == "units of g_eg"
    }

    /// Couplings and rates come first, then the probe, then the emitter
    /// detuning, so that each axis value is the final value of its quantity.
    pub(crate) fn rank(&self) -> u8 {
        match self {
            Param::DeltaCOverG => 1,
            Param::DeltaEgOverG => 2,
            Param::Field(name) if name.starts_with("delta_") => 3,
            _ => 0,
        }
    }

    pub fn apply(&self, config: &mut SystemConfig, value: f64) -> Result<()> {
        if !value.is_finite() {
            return Err(Error::InvalidSweep(format!("{} = {value} is not finite", self.name())));
        }
        let g = config.g_eg;
        match self {
            Param::Field(name) => *config.rate_mut(name)? = from_ghz(value),
            Param::OmegaRabi => config.omega_rabi = C64::new(from_ghz(value), 0.0),
            Param::Eps => config.eps = C64::new(from_ghz(value), 0.0),
            Param::KappaOverG => config.kappa = value * g,
            Param::OmegaOverG => config.omega_rabi = C64::new(value * g, 0.0),
            Param::GfsOverGeg => config.g_fs = value * g,
            Param::DeltaCOverG => config.shift_probe_tracking_drive(value * g - config.delta_c),
            Param::DeltaEgOverG => {
                let target = value * g;
                if config.scheme == Scheme::FourLevel {
                    config.delta_fg += target - config.delta_eg;
                }
                config.delta_eg = target;
            }
        }
        Ok(())
    }
}

impl FromStr for Param {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Ok(match s {
            "omega_rabi" => Param::OmegaRabi,
            "eps" => Param::Eps,
            "kappa_over_g" => Param::KappaOverG,
            "omega_over_g" => Param::OmegaOverG,
            "gfs_over_geg" => Param::GfsOverGeg,
            "delta_c_over_g" => Param::DeltaCOverG,
            "delta_eg_over_g" => Param::DeltaEgOverG,
            field if FIELDS.contains(&field) => Param::Field(field.to_string()),
            other => return Err(Error::UnknownParameter(other.to_string())),
        })
    }
}

impl TryFrom<String> for Param {
    type Error = Error;

    fn try_from(s: String) -> Result<Self> {
        s.parse()
    }
}

impl From<Param> for String {
    fn from(p: Param) -> String {
        p.name().to_string()
    }
}

impl fmt::Display for Param {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Axis {
    pub param: Param,
    pub values: Vec<f64>,
}

impl Axis {
    pub fn new(param: Param, values: Vec<f64>) -> Self {
        Self { param, values }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Observable {
    G2,
    NPhoton,
    T1,
    T2,
    /// Real parts of the first-manifold eigenvalues and their widths, in
    /// units of `g_eg`.
    #[serde(rename = "dressed_energies_1")]
    Dressed1,
    #[serde(rename = "dressed_energies_2")]
    Dressed2,
}

impl Observable {
    /// Output columns for a column named `name`.
    pub fn column_names(self, name: &str, scheme: Scheme) -> Vec<String> {
        let size = match (self, scheme) {
            (Observable::Dressed1, Scheme::FourLevel) => 3,
            (Observable::Dressed2, Scheme::FourLevel) => 4,
            (Observable::Dressed1 | Observable::Dressed2, Scheme::TwoLevel) => 2,
            _ => return vec![name.to_string()],
        };
        let mut names: Vec<String> = (0..size).map(|k| format!("{name}_{k}")).collect();
        names.extend((0..size).map(|k| format!("{name}_width_{k}")));
        names
    }

    pub fn unit(self) -> &'static str {
        match self {
            Observable::Dressed1 | Observable::Dressed2 => "units of g_eg",
            _ => "dimensionless",
        }
    }
}

/// One output quantity of a series and the CSV column it is written to.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Column {
    pub observable: Observable,
    pub name: String,
}

impl Column {
    pub fn new(observable: Observable, name: impl Into<String>) -> Self {
        Self {
            observable,
            name: name.into(),
        }
    }
}

/// Per-point minimization of `g²(0)` over one detuning.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Minimize {
    pub vary: Param,
    /// Search interval in the units of `vary`.
    pub bracket: [f64; 2],
    /// Column receiving the minimizing value, if any.
    #[serde(default)]
    pub argmin_column: Option<String>,
}

/// A configuration evaluated at every grid point.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Series {
    pub label: String,
    pub base: SystemConfig,
    pub columns: Vec<Column>,
    #[serde(default)]
    pub minimize: Option<Minimize>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SweepSpec {
    pub id: String,
    pub axes: Vec<Axis>,
    pub series: Vec<Series>,
    /// Free-form remarks copied into the result metadata.
    #[serde(default)]
    pub notes: Vec<String>,
}

impl SweepSpec {
    pub fn from_json_str(text: &str) -> Result<Self> {
        let spec: SweepSpec = serde_json::from_str(text).map_err(|source| Error::Json {
            context: "sweep specification".into(),
            source,
        })?;
        spec.validate()?;
        Ok(spec)
    }

    pub fn to_json_string(&self) -> String {
        serde_json::to_string_pretty(self).expect("spec serializes")
    }

    pub fn validate(&self) -> Result<()> {
        if self.axes.is_empty() || self.axes.len() > 2 {
            return Err(Error::InvalidSweep(format!(
                "`{}` needs one or two axes, has {}",
                self.id,
                self.axes.len()
            )));
        }
        for axis in &self.axes {
            if axis.values.is_empty() {
                return Err(Error::InvalidSweep(format!("axis `{}` is empty", axis.param)));
            }
            if axis.values.iter().any(|v| !v.is_finite()) {
                return Err(Error::InvalidSweep(format!("axis `{}` has non-finite values", axis.param)));
            }
        }
        if self.axes.len() == 2 && self.axes[0].param == self.axes[1].param {
            return Err(Error::InvalidSweep(format!("axis `{}` appears twice", self.axes[0].param)));
        }
        if self.series.is_empty() {
            return Err(Error::InvalidSweep(format!("`{}` has no series", self.id)));
        }
        let mut names: Vec<String> = self.axes.iter().map(|a| a.param.to_string()).collect();
        for series in &self.series {
            series.base.validate()?;
            if series.columns.is_empty() && series.minimize.as_ref().and_then(|m| m.argmin_column.as_ref()).is_none() {
                return Err(Error::InvalidSweep(format!("series `{}` writes no columns", series.label)));
            }
            if let Some(m) = &series.minimize {
                let [lo, hi] = m.bracket;
                if !(lo.is_finite() && hi.is_finite() && lo < hi) {
                    return Err(Error::InvalidSweep(format!(
                        "series `{}` has an invalid bracket [{lo}, {hi}]",
                        series.label
                    )));
                }
                if self.axes.iter().any(|a| a.param == m.vary) {
                    return Err(Error::InvalidSweep(format!(
                        "series `{}` minimizes over the swept parameter `{}`",
                        series.label, m.vary
                    )));
                }
                names.extend(m.argmin_column.iter().cloned());
            }
            for column in &series.columns {
                names.extend(column.observable.column_names(&column.name, series.base.scheme));
            }
        }
        let mut sorted = names.clone();
        sorted.sort();
        if let Some(w) = sorted.windows(2).find(|w| w[0] == w[1]) {
            return Err(Error::InvalidSweep(format!("column `{}` is written twice", w[0])));
        }
        Ok(())
    }

    /// Header row: axes first, then each series' columns.
    pub fn column_names(&self) -> Vec<String> {
        let mut names: Vec<String> = self.axes.iter().map(|a| a.param.to_string()).collect();
        for series in &self.series {
            names.extend(series_columns(series));
        }
        names
    }

    pub fn n_points(&self) -> usize {
        self.axes.iter().map(|a| a.values.len()).product()
    }

    /// Axis values of grid point `index` in axis1-major order.
    pub fn point(&self, index: usize) -> Vec<f64> {
        match self.axes.as_slice() {
            [a] => vec![a.values[index]],
            [a, b] => {
                let n = b.values.len();
                vec![a.values[index / n], b.values[index % n]]
            }
            _ => unreachable!("validated axis count"),
        }
    }

    /// The series base placed at grid point `index`.
    pub fn configure(&self, series: &Series, index: usize) -> Result<SystemConfig> {
        let values = self.point(index);
        let mut order: Vec<usize> = (0..self.axes.len()).collect();
        order.sort_by_key(|&i| self.axes[i].param.rank());
        let mut config = series.base.clone();
        for i in order {
            self.axes[i].param.apply(&mut config, values[i])?;
        }
        Ok(config)
    }
}

pub(crate) fn series_columns(series: &Series) -> Vec<String> {
    let mut names = Vec::new();
    for column in &series.columns {
        names.extend(column.observable.column_names(&column.name, series.base.scheme));
    }
    if let Some(name) = series.minimize.as_ref().and_then(|m| m.argmin_column.clone()) {
        names.push(name);
    }
    names
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{cesium_preset, two_level_resonant, CESIUM_MISMATCH_GHZ};

    fn spec() -> SweepSpec {
        SweepSpec {
            id: "demo".into(),
            axes: vec![
                Axis::new(Param::KappaOverG, vec![1.0, 2.0]),
                Axis::new(Param::DeltaCOverG, vec![-1.0, 0.0, 1.0]),
            ],
            series: vec![Series {
                label: "a".into(),
                base: SystemConfig::default(),
                columns: vec![Column::new(Observable::G2, "g2"), Column::new(Observable::Dressed1, "m1")],
                minimize: None,
            }],
            notes: vec![],
        }
    }

    #[test]
    fn names_round_trip() {
        for name in ["kappa", "delta_fg", "eps", "omega_rabi", "kappa_over_g", "omega_over_g", "gfs_over_geg", "delta_c_over_g", "delta_eg_over_g"] {
            assert_eq!(name.parse::<Param>().unwrap().name(), name);
        }
        assert!(matches!("scheme".parse::<Param>(), Err(Error::UnknownParameter(_))));
    }

    #[test]
    fn grid_is_axis1_major() {
        let s = spec();
        assert_eq!(s.n_points(), 6);
        assert_eq!(s.point(0), vec![1.0, -1.0]);
        assert_eq!(s.point(2), vec![1.0, 1.0]);
        assert_eq!(s.point(3), vec![2.0, -1.0]);
        assert_eq!(
            s.column_names(),
            ["kappa_over_g", "delta_c_over_g", "g2", "m1_0", "m1_1", "m1_2", "m1_width_0", "m1_width_1", "m1_width_2"]
        );
    }

    #[test]
    fn emitter_detuning_keeps_level_spacing() {
        let base = cesium_preset(from_ghz(3.0), 0.0, 5).unwrap();
        let series = Series {
            label: "cs".into(),
            base: base.clone(),
            columns: vec![Column::new(Observable::T1, "t1")],
            minimize: None,
        };
        let s = SweepSpec {
            id: "x".into(),
            axes: vec![
                Axis::new(Param::DeltaEgOverG, vec![-1.0]),
                Axis::new(Param::DeltaCOverG, vec![0.5]),
            ],
            series: vec![series.clone()],
            notes: vec![],
        };
        let c = s.configure(&series, 0).unwrap();
        let g = base.g_eg;
        assert!((c.delta_c - 0.5 * g).abs() < 1e-12);
        assert!((c.delta_eg + g).abs() < 1e-12);
        assert!((c.delta_fg - c.delta_eg - from_ghz(CESIUM_MISMATCH_GHZ)).abs() < 1e-9);
        assert_eq!(c.delta_sg, 0.0);
    }

    #[test]
    fn two_level_probe_moves_emitter_detuning() {
        let mut c = two_level_resonant(1.0);
        Param::DeltaCOverG.apply(&mut c, 1.5).unwrap();
        assert_eq!(c.delta_c, 1.5 * c.g_eg);
        assert_eq!(c.delta_eg, c.delta_c);
        c.validate().unwrap();
    }

    #[test]
    fn validation() {
        let mut s = spec();
        s.validate().unwrap();
        s.axes[1].param = Param::KappaOverG;
        assert!(s.validate().is_err());
        let mut s = spec();
        s.axes[0].values.clear();
        assert!(s.validate().is_err());
        let mut s = spec();
        s.series[0].columns.push(Column::new(Observable::T1, "g2"));
        assert!(s.validate().is_err());
        let mut s = spec();
        s.series[0].minimize = Some(Minimize {
            vary: Param::DeltaCOverG,
            bracket: [0.0, 3.0],
            argmin_column: None,
        });
        assert!(s.validate().is_err());
    }

    #[test]
    fn json_round_trip() {
        let s = spec();
        let text = s.to_json_string();
        let back = SweepSpec::from_json_str(&text).unwrap();
        assert_eq!(back.id, s.id);
        assert_eq!(back.axes, s.axes);
        assert_eq!(back.column_names(), s.column_names());
        let c = &back.series[0].base;
        assert!((c.g_eg - s.series[0].base.g_eg).abs() < 1e-12 * c.g_eg);
        assert!(SweepSpec::from_json_str(&text.replace("kappa_over_g", "kappa_per_g")).is_err());
    }
}
