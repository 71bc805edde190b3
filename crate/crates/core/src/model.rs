//! Rotating-frame model of a four-level emitter in a driven single-mode cavity.
//!
//! The laboratory Hamiltonian carries the cavity frequency `ω_c`, the atomic
//! transition frequencies `ω_sg, ω_eg, ω_fg`, a probe at `ω_p` driving the cavity
//! and a classical field at `ω_d` coupling `|s⟩ ↔ |e⟩`. Moving to the frame
//! rotating at `ω_p` for the cavity and `|e⟩`, `ω_p − ω_d` for `|s⟩` and
//! `2ω_p − ω_d` for `|f⟩` removes every explicit time dependence and leaves
//!
//! ```text
//! H = −Δc a†a − Δsg|s⟩⟨s| − Δeg|e⟩⟨e| − Δfg|f⟩⟨f|
//!     + g_eg (a†|g⟩⟨e| + a|e⟩⟨g|) + g_fs (a†|s⟩⟨f| + a|f⟩⟨s|)
//!     + Ω|e⟩⟨s| + Ω*|s⟩⟨e| + ℰa† + ℰ*a
//! ```
//!
//! with `Δc = ω_p − ω_c`, `Δsg = ω_p − ω_sg − ω_d`, `Δeg = ω_p − ω_eg` and
//! `Δfg = 2ω_p − ω_d − ω_fg`. Only this frame is simulated.
//!
//! Dissipation follows `dρ/dt = −i[H, ρ] + 2κ D[a]ρ + 2 Σ γ_ij D[σ_ij]ρ` with
//! `D[X]ρ = XρX† − ½X†Xρ − ½ρX†X` and `σ_ij = |j⟩⟨i|`. Rates are field
//! (amplitude) decay rates, so populations decay at twice the quoted rate.
//!
//! All quantities are stored as angular frequencies in rad/ns, i.e. `2π` times
//! the linear frequency in GHz. Configuration files carry linear frequencies
//! in GHz and are converted on load.
//!
//! # Cesium mismatch
//!
//! For the cesium-based emitter the transition frequencies satisfy
//! `ω_sg − ω_fe = δ_cs` with `ω_fe = ω_fg − ω_eg`. With the probe on the cavity
//! (`Δc = 0`) and the drive tracking the two-photon resonance (`ω_d = ω_p − ω_sg`,
//! hence `Δsg = 0`):
//!
//! ```text
//! Δfg = 2ω_p − ω_d − ω_fg = ω_p + ω_sg − ω_fg = (ω_p − ω_eg) + (ω_sg − ω_fe) = Δeg + δ_cs
//! ```

use std::f64::consts::PI;

use faer::Mat;
use num_complex::Complex64 as C64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::hilbert::{annihilation, atomic_transition, number, projector, HilbertSpace, Level, Operator};

/// Converts a linear frequency in GHz to rad/ns.
pub fn from_ghz(ghz: f64) -> f64 {
    2.0 * PI * ghz
}

/// Converts rad/ns back to GHz.
pub fn to_ghz(angular: f64) -> f64 {
    angular / (2.0 * PI)
}

/// Cesium `ω_sg − ω_fe` in GHz.
pub const CESIUM_MISMATCH_GHZ: f64 = 8.941;

/// Default Fock truncation: photon numbers 0 through 6.
pub const DEFAULT_N_FOCK: usize = 7;

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Scheme {
    #[default]
    FourLevel,
    TwoLevel,
}

impl Scheme {
    pub fn n_atom(self) -> usize {
        match self {
            Scheme::FourLevel => 4,
            Scheme::TwoLevel => 2,
        }
    }
}

/// Which decay widths enter the manifold (non-Hermitian) matrices.
///
/// `Total` uses the summed level widths `γ_e = γ_eg + γ_es`, `γ_f = γ_fg + γ_fs`
/// and the full-frame `Δfg` for `|f⟩`. `Literal` uses the single channels
/// `γ_eg`, `γ_fs` and the detuning `Δfs = Δfg − Δsg`.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum WidthConvention {
    #[default]
    Total,
    Literal,
}

/// Every rate and detuning of the emitter–cavity system, in rad/ns.
#[derive(Clone, Debug, PartialEq)]
pub struct SystemConfig {
    pub scheme: Scheme,
    pub n_fock: usize,
    pub g_eg: f64,
    pub g_fs: f64,
    pub omega_rabi: C64,
    pub eps: C64,
    pub kappa: f64,
    pub gamma_sg: f64,
    pub gamma_eg: f64,
    pub gamma_es: f64,
    pub gamma_fg: f64,
    pub gamma_fs: f64,
    pub delta_c: f64,
    pub delta_sg: f64,
    pub delta_eg: f64,
    pub delta_fg: f64,
    pub widths: WidthConvention,
}

impl Default for SystemConfig {
    /// Resonant four-level system at `κ = 2 g_eg`.
    fn default() -> Self {
        Self::resonant(2.0 * from_ghz(3.0))
    }
}

impl SystemConfig {
    /// Fully resonant four-level emitter with `g_eg/2π = 3 GHz`, `g_fs = Ω = g_eg`,
    /// `ℰ/2π = 0.1 GHz`, excited-state channel decays of `2π × 10 MHz` and
    /// `γ_sg = 2π × 1 MHz`.
    pub fn resonant(kappa: f64) -> Self {
        let g = from_ghz(3.0);
        Self {
            scheme: Scheme::FourLevel,
            n_fock: DEFAULT_N_FOCK,
            g_eg: g,
            g_fs: g,
            omega_rabi: C64::new(g, 0.0),
            eps: C64::new(from_ghz(0.1), 0.0),
            kappa,
            gamma_sg: from_ghz(0.001),
            gamma_eg: from_ghz(0.01),
            gamma_es: from_ghz(0.01),
            gamma_fg: from_ghz(0.01),
            gamma_fs: from_ghz(0.01),
            delta_c: 0.0,
            delta_sg: 0.0,
            delta_eg: 0.0,
            delta_fg: 0.0,
            widths: WidthConvention::Total,
        }
    }

    pub fn gamma_s(&self) -> f64 {
        self.gamma_sg
    }

    pub fn gamma_e(&self) -> f64 {
        self.gamma_eg + self.gamma_es
    }

    pub fn gamma_f(&self) -> f64 {
        self.gamma_fg + self.gamma_fs
    }

    /// `Δfs = Δfg − Δsg`.
    pub fn delta_fs(&self) -> f64 {
        self.delta_fg - self.delta_sg
    }

    pub fn space(&self) -> Result<HilbertSpace> {
        HilbertSpace::new(self.scheme.n_atom(), self.n_fock)
    }

    pub fn validate(&self) -> Result<()> {
        let rates = [
            ("g_eg", self.g_eg),
            ("g_fs", self.g_fs),
            ("kappa", self.kappa),
            ("gamma_sg", self.gamma_sg),
            ("gamma_eg", self.gamma_eg),
            ("gamma_es", self.gamma_es),
            ("gamma_fg", self.gamma_fg),
            ("gamma_fs", self.gamma_fs),
        ];
        for (name, value) in rates {
            if !value.is_finite() || value < 0.0 {
                return Err(Error::InvalidConfig(format!(
                    "{name} must be a finite non-negative rate, got {value}"
                )));
            }
        }
        let others = [
            ("omega_rabi", self.omega_rabi.norm()),
            ("eps", self.eps.norm()),
            ("delta_c", self.delta_c),
            ("delta_sg", self.delta_sg),
            ("delta_eg", self.delta_eg),
            ("delta_fg", self.delta_fg),
        ];
        for (name, value) in others {
            if !value.is_finite() {
                return Err(Error::InvalidConfig(format!("{name} is not finite")));
            }
        }
        if self.n_fock < 2 {
            return Err(Error::InvalidConfig(format!(
                "n_fock must be at least 2, got {}",
                self.n_fock
            )));
        }
        if self.scheme == Scheme::TwoLevel {
            let four_level_only = [
                ("g_fs", self.g_fs),
                ("omega_rabi", self.omega_rabi.norm()),
                ("gamma_sg", self.gamma_sg),
                ("gamma_es", self.gamma_es),
                ("gamma_fg", self.gamma_fg),
                ("gamma_fs", self.gamma_fs),
                ("delta_sg", self.delta_sg),
                ("delta_fg", self.delta_fg),
            ];
            for (name, value) in four_level_only {
                if value != 0.0 {
                    return Err(Error::InvalidConfig(format!(
                        "{name} does not exist for a two-level emitter"
                    )));
                }
            }
        }
        Ok(())
    }

    /// Multiplies every rate and detuning by `factor`.
    pub fn scaled(&self, factor: f64) -> Self {
        Self {
            g_eg: self.g_eg * factor,
            g_fs: self.g_fs * factor,
            omega_rabi: self.omega_rabi * factor,
            eps: self.eps * factor,
            kappa: self.kappa * factor,
            gamma_sg: self.gamma_sg * factor,
            gamma_eg: self.gamma_eg * factor,
            gamma_es: self.gamma_es * factor,
            gamma_fg: self.gamma_fg * factor,
            gamma_fs: self.gamma_fs * factor,
            delta_c: self.delta_c * factor,
            delta_sg: self.delta_sg * factor,
            delta_eg: self.delta_eg * factor,
            delta_fg: self.delta_fg * factor,
            ..self.clone()
        }
    }

    /// Moves the probe by `shift` with the classical drive held fixed.
    ///
    /// From the detuning definitions: `Δc, Δsg, Δeg` move by `shift`, `Δfg` by
    /// `2 shift`. For a two-level emitter `Δc` and `Δeg` move together.
    pub fn shift_probe(&mut self, shift: f64) {
        self.delta_c += shift;
        self.delta_eg += shift;
        if self.scheme == Scheme::FourLevel {
            self.delta_sg += shift;
            self.delta_fg += 2.0 * shift;
        }
    }

    /// Moves the probe by `shift` while the drive follows it (`ω_d − ω_p`
    /// fixed): `Δc, Δeg, Δfg` move by `shift`, `Δsg` is unchanged.
    pub fn shift_probe_tracking_drive(&mut self, shift: f64) {
        self.delta_c += shift;
        self.delta_eg += shift;
        if self.scheme == Scheme::FourLevel {
            self.delta_fg += shift;
        }
    }

    pub fn with_detunings(mut self, d: Detunings) -> Self {
        self.delta_c = d.delta_c;
        self.delta_sg = d.delta_sg;
        self.delta_eg = d.delta_eg;
        self.delta_fg = d.delta_fg;
        self
    }

    /// Sets one field from a textual value. Rates and detunings are in GHz.
    pub fn set_field(&mut self, key: &str, value: &str) -> Result<()> {
        let parse = || -> Result<f64> {
            value.trim().parse::<f64>().map_err(|_| {
                Error::InvalidConfig(format!("`{key}` expects a number, got `{value}`"))
            })
        };
        match key {
            "scheme" => {
                self.scheme = match value {
                    "four_level" => Scheme::FourLevel,
                    "two_level" => Scheme::TwoLevel,
                    _ => {
                        return Err(Error::InvalidConfig(format!(
                            "scheme must be four_level or two_level, got `{value}`"
                        )))
                    }
                }
            }
            "widths" => {
                self.widths = match value {
                    "total" => WidthConvention::Total,
                    "literal" => WidthConvention::Literal,
                    _ => {
                        return Err(Error::InvalidConfig(format!(
                            "widths must be total or literal, got `{value}`"
                        )))
                    }
                }
            }
            "n_fock" => {
                self.n_fock = value.trim().parse().map_err(|_| {
                    Error::InvalidConfig(format!("n_fock expects an integer, got `{value}`"))
                })?
            }
            "omega_rabi" => self.omega_rabi = C64::new(from_ghz(parse()?), 0.0),
            "eps" => self.eps = C64::new(from_ghz(parse()?), 0.0),
            _ => *self.rate_mut(key)? = from_ghz(parse()?),
        }
        Ok(())
    }

    pub(crate) fn rate_mut(&mut self, key: &str) -> Result<&mut f64> {
        Ok(match key {
            "g_eg" => &mut self.g_eg,
            "g_fs" => &mut self.g_fs,
            "kappa" => &mut self.kappa,
            "gamma_sg" => &mut self.gamma_sg,
            "gamma_eg" => &mut self.gamma_eg,
            "gamma_es" => &mut self.gamma_es,
            "gamma_fg" => &mut self.gamma_fg,
            "gamma_fs" => &mut self.gamma_fs,
            "delta_c" => &mut self.delta_c,
            "delta_sg" => &mut self.delta_sg,
            "delta_eg" => &mut self.delta_eg,
            "delta_fg" => &mut self.delta_fg,
            _ => return Err(Error::UnknownParameter(key.to_string())),
        })
    }

    /// Parses a flat JSON configuration with values in GHz.
    pub fn from_json_str(text: &str) -> Result<Self> {
        let file: ConfigFile = serde_json::from_str(text).map_err(|source| Error::Json {
            context: "configuration".into(),
            source,
        })?;
        let config = file.into_config();
        config.validate()?;
        Ok(config)
    }

    /// Layers a JSON document over this configuration: keys present in the
    /// document replace the corresponding fields.
    pub fn merge_json_str(&self, text: &str) -> Result<Self> {
        let mut base = ConfigFile::from_config(self);
        let patch: serde_json::Value = serde_json::from_str(text).map_err(|source| Error::Json {
            context: "configuration".into(),
            source,
        })?;
        let mut merged = serde_json::to_value(&base).expect("config serializes");
        let (Some(target), Some(patch)) = (merged.as_object_mut(), patch.as_object()) else {
            return Err(Error::InvalidConfig("configuration must be a JSON object".into()));
        };
        for (key, value) in patch {
            target.insert(key.clone(), value.clone());
        }
        base = serde_json::from_value(merged).map_err(|source| Error::Json {
            context: "configuration".into(),
            source,
        })?;
        let config = base.into_config();
        config.validate()?;
        Ok(config)
    }

    /// JSON document in GHz, suitable for [`SystemConfig::from_json_str`].
    pub fn to_json_string(&self) -> String {
        serde_json::to_string_pretty(&ConfigFile::from_config(self)).expect("config serializes")
    }
}

/// Serialized as the GHz document accepted by [`SystemConfig::from_json_str`].
impl Serialize for SystemConfig {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        ConfigFile::from_config(self).serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for SystemConfig {
    fn deserialize<D: serde::Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        let config = ConfigFile::deserialize(deserializer)?.into_config();
        config.validate().map_err(serde::de::Error::custom)?;
        Ok(config)
    }
}

/// A drive amplitude in GHz: a plain number or `[re, im]`.
#[derive(Clone, Copy, Debug, Serialize, Deserialize)]
#[serde(untagged)]
enum Amplitude {
    Real(f64),
    Complex([f64; 2]),
}

impl Amplitude {
    fn to_angular(self) -> C64 {
        match self {
            Amplitude::Real(x) => C64::new(from_ghz(x), 0.0),
            Amplitude::Complex([re, im]) => C64::new(from_ghz(re), from_ghz(im)),
        }
    }

    fn from_angular(z: C64) -> Self {
        if z.im == 0.0 {
            Amplitude::Real(to_ghz(z.re))
        } else {
            Amplitude::Complex([to_ghz(z.re), to_ghz(z.im)])
        }
    }
}

/// On-disk configuration; every frequency in GHz.
#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
struct ConfigFile {
    scheme: Scheme,
    n_fock: usize,
    g_eg: f64,
    g_fs: f64,
    omega_rabi: Amplitude,
    eps: Amplitude,
    kappa: f64,
    gamma_sg: f64,
    gamma_eg: f64,
    gamma_es: f64,
    gamma_fg: f64,
    gamma_fs: f64,
    delta_c: f64,
    delta_sg: f64,
    delta_eg: f64,
    delta_fg: f64,
    widths: WidthConvention,
}

impl Default for ConfigFile {
    fn default() -> Self {
        Self::from_config(&SystemConfig::default())
    }
}

impl ConfigFile {
    fn from_config(c: &SystemConfig) -> Self {
        Self {
            scheme: c.scheme,
            n_fock: c.n_fock,
            g_eg: to_ghz(c.g_eg),
            g_fs: to_ghz(c.g_fs),
            omega_rabi: Amplitude::from_angular(c.omega_rabi),
            eps: Amplitude::from_angular(c.eps),
            kappa: to_ghz(c.kappa),
            gamma_sg: to_ghz(c.gamma_sg),
            gamma_eg: to_ghz(c.gamma_eg),
            gamma_es: to_ghz(c.gamma_es),
            gamma_fg: to_ghz(c.gamma_fg),
            gamma_fs: to_ghz(c.gamma_fs),
            delta_c: to_ghz(c.delta_c),
            delta_sg: to_ghz(c.delta_sg),
            delta_eg: to_ghz(c.delta_eg),
            delta_fg: to_ghz(c.delta_fg),
            widths: c.widths,
        }
    }

    fn into_config(self) -> SystemConfig {
        SystemConfig {
            scheme: self.scheme,
            n_fock: self.n_fock,
            g_eg: from_ghz(self.g_eg),
            g_fs: from_ghz(self.g_fs),
            omega_rabi: self.omega_rabi.to_angular(),
            eps: self.eps.to_angular(),
            kappa: from_ghz(self.kappa),
            gamma_sg: from_ghz(self.gamma_sg),
            gamma_eg: from_ghz(self.gamma_eg),
            gamma_es: from_ghz(self.gamma_es),
            gamma_fg: from_ghz(self.gamma_fg),
            gamma_fs: from_ghz(self.gamma_fs),
            delta_c: from_ghz(self.delta_c),
            delta_sg: from_ghz(self.delta_sg),
            delta_eg: from_ghz(self.delta_eg),
            delta_fg: from_ghz(self.delta_fg),
            widths: self.widths,
        }
    }
}

/// Laboratory-frame frequencies, rad/ns.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct FrequencySpec {
    pub omega_c: f64,
    pub omega_sg: f64,
    pub omega_eg: f64,
    pub omega_fg: f64,
    pub omega_p: f64,
    pub omega_d: f64,
}

impl FrequencySpec {
    pub fn validate(&self) -> Result<()> {
        let all = [
            self.omega_c,
            self.omega_sg,
            self.omega_eg,
            self.omega_fg,
            self.omega_p,
            self.omega_d,
        ];
        if all.iter().any(|w| !w.is_finite() || *w < 0.0) {
            return Err(Error::InvalidConfig("frequencies must be non-negative".into()));
        }
        if !(self.omega_fg > self.omega_eg && self.omega_eg > self.omega_sg && self.omega_sg > 0.0) {
            return Err(Error::InvalidConfig(
                "levels must be ordered ω_fg > ω_eg > ω_sg > 0".into(),
            ));
        }
        Ok(())
    }
}

/// Rotating-frame detunings, rad/ns.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Detunings {
    pub delta_c: f64,
    pub delta_sg: f64,
    pub delta_eg: f64,
    pub delta_fg: f64,
}

pub fn detunings_from_frequencies(f: &FrequencySpec) -> Detunings {
    Detunings {
        delta_c: f.omega_p - f.omega_c,
        delta_sg: f.omega_p - f.omega_sg - f.omega_d,
        delta_eg: f.omega_p - f.omega_eg,
        delta_fg: 2.0 * f.omega_p - f.omega_d - f.omega_fg,
    }
}

/// Direction of the cesium `g→e` / `s→f` frequency mismatch.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum MismatchSign {
    /// `Δfg = Δeg + δ_cs`, as derived in the module docs.
    #[default]
    Plus,
    Minus,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct CesiumOptions {
    /// `δ_cs` in rad/ns.
    pub mismatch: f64,
    pub sign: MismatchSign,
}

impl Default for CesiumOptions {
    fn default() -> Self {
        Self {
            mismatch: from_ghz(CESIUM_MISMATCH_GHZ),
            sign: MismatchSign::Plus,
        }
    }
}

impl CesiumOptions {
    pub fn signed_mismatch(&self) -> f64 {
        match self.sign {
            MismatchSign::Plus => self.mismatch,
            MismatchSign::Minus => -self.mismatch,
        }
    }
}

/// Four-level emitter modelled on the cesium D2 line, probe on the cavity and
/// drive on two-photon resonance.
pub fn cesium_preset(kappa: f64, delta_eg: f64, n_fock: usize) -> Result<SystemConfig> {
    cesium_preset_with(kappa, delta_eg, n_fock, CesiumOptions::default())
}

pub fn cesium_preset_with(
    kappa: f64,
    delta_eg: f64,
    n_fock: usize,
    options: CesiumOptions,
) -> Result<SystemConfig> {
    if !(kappa > 0.0) {
        return Err(Error::InvalidConfig(format!(
            "cesium preset needs kappa > 0, got {kappa}"
        )));
    }
    let mut config = SystemConfig::resonant(kappa);
    config.n_fock = n_fock;
    config.g_fs = 1.5 * config.g_eg;
    config.delta_eg = delta_eg;
    config.delta_fg = delta_eg + options.signed_mismatch();
    config.validate()?;
    Ok(config)
}

/// Two-level emitter resonant with the cavity, probed at `delta_c` from both.
pub fn two_level_config(
    g_eg: f64,
    kappa: f64,
    gamma_eg: f64,
    eps: f64,
    delta_c: f64,
    n_fock: usize,
) -> Result<SystemConfig> {
    let config = SystemConfig {
        scheme: Scheme::TwoLevel,
        n_fock,
        g_eg,
        g_fs: 0.0,
        omega_rabi: C64::new(0.0, 0.0),
        eps: C64::new(eps, 0.0),
        kappa,
        gamma_sg: 0.0,
        gamma_eg,
        gamma_es: 0.0,
        gamma_fg: 0.0,
        gamma_fs: 0.0,
        delta_c,
        delta_sg: 0.0,
        delta_eg: delta_c,
        delta_fg: 0.0,
        widths: WidthConvention::Total,
    };
    config.validate()?;
    Ok(config)
}

/// Two-level counterpart of [`SystemConfig::resonant`].
pub fn two_level_resonant(kappa: f64) -> SystemConfig {
    let base = SystemConfig::resonant(kappa);
    two_level_config(base.g_eg, kappa, base.gamma_eg, base.eps.re, 0.0, base.n_fock)
        .expect("valid two-level parameters")
}

fn check_scheme(config: &SystemConfig, space: &HilbertSpace) -> Result<()> {
    if space.n_atom() != config.scheme.n_atom() || space.n_fock() != config.n_fock {
        return Err(Error::InvalidConfig(format!(
            "space {space} does not match a {:?} configuration with n_fock = {}",
            config.scheme, config.n_fock
        )));
    }
    Ok(())
}

/// Rotating-frame Hamiltonian.
pub fn build_hamiltonian(config: &SystemConfig, space: HilbertSpace) -> Result<Operator> {
    config.validate()?;
    check_scheme(config, &space)?;
    let c = |x: f64| C64::new(x, 0.0);
    let a = annihilation(space);
    let ad = a.adjoint();
    let n = number(space);
    let sigma_eg = atomic_transition(space, Level::E, Level::G)?;
    let jc_eg = ad.product(&sigma_eg)?.add(&a.product(&sigma_eg.adjoint())?)?;

    let mut h = n.scale(c(-config.delta_c));
    h = h.add(&projector(space, Level::E)?.scale(c(-config.delta_eg)))?;
    h = h.add(&jc_eg.scale(c(config.g_eg)))?;
    h = h.add(&ad.scale(config.eps))?;
    h = h.add(&a.scale(config.eps.conj()))?;

    if config.scheme == Scheme::FourLevel {
        let sigma_fs = atomic_transition(space, Level::F, Level::S)?;
        let jc_fs = ad.product(&sigma_fs)?.add(&a.product(&sigma_fs.adjoint())?)?;
        // |e⟩⟨s| takes s to e.
        let s_to_e = atomic_transition(space, Level::S, Level::E)?;
        h = h.add(&projector(space, Level::S)?.scale(c(-config.delta_sg)))?;
        h = h.add(&projector(space, Level::F)?.scale(c(-config.delta_fg)))?;
        h = h.add(&jc_fs.scale(c(config.g_fs)))?;
        h = h.add(&s_to_e.scale(config.omega_rabi))?;
        h = h.add(&s_to_e.adjoint().scale(config.omega_rabi.conj()))?;
    }
    Ok(h)
}

/// A jump operator with its (field) decay rate.
#[derive(Clone, Debug)]
pub struct Collapse {
    pub label: &'static str,
    pub rate: f64,
    pub op: Operator,
}

/// Cavity loss and spontaneous emission channels; zero-rate channels dropped.
pub fn build_collapse_ops(config: &SystemConfig, space: HilbertSpace) -> Result<Vec<Collapse>> {
    check_scheme(config, &space)?;
    let mut channels = vec![("kappa", config.kappa, annihilation(space))];
    let atomic: &[(&'static str, f64, Level, Level)] = match config.scheme {
        Scheme::FourLevel => &[
            ("gamma_sg", config.gamma_sg, Level::S, Level::G),
            ("gamma_eg", config.gamma_eg, Level::E, Level::G),
            ("gamma_es", config.gamma_es, Level::E, Level::S),
            ("gamma_fg", config.gamma_fg, Level::F, Level::G),
            ("gamma_fs", config.gamma_fs, Level::F, Level::S),
        ],
        Scheme::TwoLevel => &[("gamma_eg", config.gamma_eg, Level::E, Level::G)],
    };
    for &(label, rate, from, to) in atomic {
        channels.push((label, rate, atomic_transition(space, from, to)?));
    }
    Ok(channels
        .into_iter()
        .filter(|(_, rate, _)| *rate != 0.0)
        .map(|(label, rate, op)| Collapse { label, rate, op })
        .collect())
}

/// Master-equation generator acting on column-stacked density matrices.
///
/// `ρ_ij` sits at index `j·d + i`, so `vec(AρB) = (Bᵀ ⊗ A) vec(ρ)`.
#[derive(Clone, Debug)]
pub struct Liouvillian {
    space: HilbertSpace,
    matrix: Mat<C64>,
    entries: Vec<(usize, usize, C64)>,
}

fn nonzeros(op: &Operator) -> Vec<(usize, usize, C64)> {
    let d = op.space().dim();
    let mut out = Vec::new();
    for j in 0..d {
        for i in 0..d {
            let v = op.get(i, j);
            if v.re != 0.0 || v.im != 0.0 {
                out.push((i, j, v));
            }
        }
    }
    out
}

/// `L vec(ρ) = vec(−i[H, ρ] + Σ 2r (DρD† − ½D†Dρ − ½ρD†D))`.
pub fn build_liouvillian(h: &Operator, collapses: &[Collapse]) -> Result<Liouvillian> {
    let space = h.space();
    let d = space.dim();
    let mut l = Mat::<C64>::zeros(d * d, d * d);
    let minus_i = C64::new(0.0, -1.0);

    for (i, k, v) in nonzeros(h) {
        // −i Hρ: row (i, j), column (k, j)
        for j in 0..d {
            l[(j * d + i, j * d + k)] += minus_i * v;
        }
        // +i ρH: row (r, k), column (r, i)
        for r in 0..d {
            l[(k * d + r, i * d + r)] -= minus_i * v;
        }
    }

    for collapse in collapses {
        if collapse.op.space() != space {
            return Err(Error::SpaceMismatch {
                left: space,
                right: collapse.op.space(),
            });
        }
        let rate = 2.0 * collapse.rate;
        let jump = nonzeros(&collapse.op);
        for &(i, k, v1) in &jump {
            for &(j, m, v2) in &jump {
                l[(j * d + i, m * d + k)] += v1 * v2.conj() * rate;
            }
        }
        let dd = collapse.op.adjoint().product(&collapse.op)?;
        for (i, k, v) in nonzeros(&dd) {
            for j in 0..d {
                l[(j * d + i, j * d + k)] -= v * (0.5 * rate);
            }
            for r in 0..d {
                l[(k * d + r, i * d + r)] -= v * (0.5 * rate);
            }
        }
    }
    let mut entries = Vec::new();
    for j in 0..d * d {
        for i in 0..d * d {
            let v = l[(i, j)];
            if v.re != 0.0 || v.im != 0.0 {
                entries.push((i, j, v));
            }
        }
    }
    Ok(Liouvillian {
        space,
        matrix: l,
        entries,
    })
}

impl Liouvillian {
    /// Builds the generator for `config` directly.
    pub fn from_config(config: &SystemConfig) -> Result<Self> {
        let space = config.space()?;
        let h = build_hamiltonian(config, space)?;
        let collapses = build_collapse_ops(config, space)?;
        build_liouvillian(&h, &collapses)
    }

    pub fn space(&self) -> HilbertSpace {
        self.space
    }

    pub fn matrix(&self) -> &Mat<C64> {
        &self.matrix
    }

    pub fn max_abs(&self) -> f64 {
        crate::hilbert::max_abs(&self.matrix)
    }

    /// Maximum absolute row sum.
    pub fn norm_inf(&self) -> f64 {
        let mut rows = vec![0.0; self.matrix.nrows()];
        for &(i, _, v) in &self.entries {
            rows[i] += v.norm();
        }
        rows.into_iter().fold(0.0, f64::max)
    }

    /// Entries with non-zero value as `(row, col, value)`, column-major.
    pub fn nonzeros(&self) -> &[(usize, usize, C64)] {
        &self.entries
    }

    /// `dρ/dt` for a `d×d` matrix.
    pub fn apply(&self, rho: &Mat<C64>) -> Mat<C64> {
        let d = self.space.dim();
        let v = vectorize(rho);
        let n = d * d;
        let mut out = vec![C64::new(0.0, 0.0); n];
        for (j, &x) in v.iter().enumerate() {
            if x.re == 0.0 && x.im == 0.0 {
                continue;
            }
            for (i, o) in out.iter_mut().enumerate() {
                *o += self.matrix[(i, j)] * x;
            }
        }
        unvectorize(&out, d)
    }
}

/// Column-stacks a square matrix.
pub fn vectorize(m: &Mat<C64>) -> Vec<C64> {
    let d = m.nrows();
    let mut v = Vec::with_capacity(d * d);
    for j in 0..m.ncols() {
        for i in 0..d {
            v.push(m[(i, j)]);
        }
    }
    v
}

pub fn unvectorize(v: &[C64], d: usize) -> Mat<C64> {
    Mat::from_fn(d, d, |i, j| v[j * d + i])
}
