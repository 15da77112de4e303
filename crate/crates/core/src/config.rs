//! JSON run configuration shared by all subcommands.
//!
//! Every field has a default, so `{}` is a valid configuration. Environment variables with the
//! prefix `SCRILAB_` override the top-level scalars after the file is read.

use crate::bondi::RemainderWindows;
use crate::gr_ops::ledger::LedgerSetup;
use crate::scri_solver::energy::Multiplier;
use crate::scri_solver::grid::CharGrid;
use crate::scri_solver::wave::Damping;
use crate::tensors::ModPair;
use serde::{Deserialize, Serialize};
use std::fmt;

/// A rejected configuration, naming the offending field.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ConfigError {
    pub field: String,
    pub message: String,
}

impl ConfigError {
    fn new(field: &str, message: impl Into<String>) -> Self {
        ConfigError { field: field.into(), message: message.into() }
    }
}

impl fmt::Display for ConfigError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}: {}", self.field, self.message)
    }
}

impl std::error::Error for ConfigError {}

/// Characteristic grid: `n_a` columns starting at `a_min = ln ρ₀`, `n_b` slices covering
/// `rho_i_range`. The step is fixed by the slices, `Δ = ln(ρ_max/ρ_min)/(n_b − 1)`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct GridConfig {
    pub a_min: f64,
    pub n_a: usize,
    pub rho_i_range: (f64, f64),
    pub n_b: usize,
}

impl GridConfig {
    fn new(a_min: f64, n_a: usize, rho_i_range: (f64, f64), n_b: usize) -> Self {
        GridConfig { a_min, n_a, rho_i_range, n_b }
    }

    pub fn build(&self, lambda: f64, ell_i: f64, field: &str) -> Result<CharGrid, ConfigError> {
        let (lo, hi) = self.rho_i_range;
        if !(lo > 0.0 && lo < hi && hi < 1.0) {
            return Err(ConfigError::new(&format!("{field}.rho_i_range"), "need 0 < rho_min < rho_max < 1"));
        }
        if self.n_a < 3 || self.n_b < 3 {
            return Err(ConfigError::new(field, "need at least 3 columns and 3 slices"));
        }
        CharGrid::with_columns(self.a_min, self.n_a, (lo.ln(), hi.ln()), self.n_b, lambda, ell_i)
            .map_err(|e| ConfigError::new(field, e.to_string()))
    }
}

impl Default for GridConfig {
    fn default() -> Self {
        GridConfig::new(-38.0, 2048, (1e-16, 0.5), 2048)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DampingKind {
    None,
    Constraint,
    GaugeChange,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct WaveConfig {
    pub grid: GridConfig,
    /// The strength is `gamma_c` for constraint damping and `gamma_u` for gauge change.
    pub damping: DampingKind,
    pub bump_centre: f64,
    pub bump_width: f64,
    pub fit_a: f64,
    pub window: (f64, f64),
}

impl Default for WaveConfig {
    fn default() -> Self {
        WaveConfig {
            grid: GridConfig::default(),
            damping: DampingKind::Constraint,
            bump_centre: -30.0,
            bump_width: 1.0,
            fit_a: -30.0,
            window: (1e-4, 1e-2),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct TransportConfig {
    pub grid: GridConfig,
    pub fit_a: f64,
    pub window: (f64, f64),
    /// Values of `gamma_c` for the monotonicity sweep (with the top-level `gamma_u`).
    pub sweep_gamma_c: Vec<f64>,
    pub sweep_gamma_u: f64,
}

impl Default for TransportConfig {
    fn default() -> Self {
        TransportConfig {
            grid: GridConfig::new(-1.0, 41, (1e-40, 0.5), 1801),
            fit_a: 0.5,
            window: (1e-36, 1e-30),
            sweep_gamma_c: vec![0.2, 0.4, 0.6],
            sweep_gamma_u: -0.1,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct MaxwellConfig {
    pub grid: GridConfig,
    pub fit_a: f64,
    pub window: (f64, f64),
}

impl Default for MaxwellConfig {
    fn default() -> Self {
        MaxwellConfig { grid: GridConfig::new(-1.0, 41, (1e-40, 0.5), 1801), fit_a: 0.5, window: (1e-36, 1e-30) }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct BondiConfig {
    /// Coarse grid; the Richardson partner halves the step over the same domain.
    pub a_range: (f64, f64),
    pub rho_i_range: (f64, f64),
    pub n_b: usize,
    /// Smaller weight at scri used for this run, replacing the top-level `ell_i`.
    pub ell_i: f64,
    pub amplitude: f64,
    pub news_centre: f64,
    pub news_width: f64,
    pub iterations: usize,
    pub tolerance: f64,
    pub fit_a: f64,
    pub windows: RemainderWindows,
}

impl Default for BondiConfig {
    fn default() -> Self {
        BondiConfig {
            a_range: (-3.0, 1.0),
            rho_i_range: (1e-32, 0.5),
            n_b: 1461,
            ell_i: 0.1,
            amplitude: 0.1,
            news_centre: -1.0,
            news_width: 0.3,
            iterations: 12,
            tolerance: 1e-13,
            fit_a: -1.0,
            windows: RemainderWindows::default(),
        }
    }
}

impl BondiConfig {
    pub fn build(&self, lambda: f64, refine: u32) -> Result<CharGrid, ConfigError> {
        let (a0, a1) = self.a_range;
        if !(a1 > a0) {
            return Err(ConfigError::new("bondi.a_range", "need a_min < a_max"));
        }
        let n_b = (self.n_b - 1) * (1 << refine) + 1;
        let g = GridConfig::new(a0, 2, self.rho_i_range, n_b);
        let delta = (self.rho_i_range.1 / self.rho_i_range.0).ln() / (n_b - 1) as f64;
        let n_a = ((a1 - a0) / delta).round() as usize + 1;
        GridConfig { n_a, ..g }.build(lambda, self.ell_i, "bondi")
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct LinearizeConfig {
    pub profile: String,
    pub rho0: f64,
    pub rho_i: f64,
}

impl Default for LinearizeConfig {
    fn default() -> Self {
        LinearizeConfig { profile: "h11_sin".into(), rho0: 0.8, rho_i: 1e-3 }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct LedgerConfig {
    pub profile: String,
    pub rho0: f64,
    pub rho_i_range: (f64, f64),
    pub samples: usize,
    pub slope_slack: f64,
    /// `ρ_I` values at which the curvature leading terms are compared.
    pub curvature_rho_i: Vec<f64>,
}

impl Default for LedgerConfig {
    fn default() -> Self {
        let s = LedgerSetup::default();
        LedgerConfig {
            profile: "conforming".into(),
            rho0: s.rho0,
            rho_i_range: (s.rho_i_min, s.rho_i_max),
            samples: s.samples,
            slope_slack: s.slope_slack,
            curvature_rho_i: vec![1e-3, 1e-4, 1e-5, 1e-6],
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct EnergyConfig {
    pub multiplier: Multiplier,
    /// Coarsest grid of the refinement study.
    pub grid: GridConfig,
    pub doublings: u32,
}

impl Default for EnergyConfig {
    fn default() -> Self {
        EnergyConfig {
            multiplier: Multiplier { alpha0: 0.0, alpha_i: -0.25, c: 1.0 },
            grid: GridConfig::new(-6.0, 33, (1e-16, 0.5), 257),
            doublings: 2,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunConfig {
    pub mass: f64,
    pub gamma_c: f64,
    pub gamma_u: f64,
    pub ell0: f64,
    pub ell_i: f64,
    /// Eigenvalue `λ_ℓ = ℓ(ℓ+1)` of the sphere Laplacian.
    pub lambda: f64,
    pub seed: u64,
    pub deterministic: bool,
    pub wave: WaveConfig,
    pub transport: TransportConfig,
    pub maxwell: MaxwellConfig,
    pub bondi: BondiConfig,
    pub linearize: LinearizeConfig,
    pub ledger: LedgerConfig,
    pub energy: EnergyConfig,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            mass: 0.1,
            gamma_c: 0.5,
            gamma_u: -0.25,
            ell0: 0.5,
            ell_i: 0.2,
            lambda: 0.0,
            seed: 20240611,
            deterministic: false,
            wave: WaveConfig::default(),
            transport: TransportConfig::default(),
            maxwell: MaxwellConfig::default(),
            bondi: BondiConfig::default(),
            linearize: LinearizeConfig::default(),
            ledger: LedgerConfig::default(),
            energy: EnergyConfig::default(),
        }
    }
}

pub const ENV_PREFIX: &str = "SCRILAB_";

impl RunConfig {
    pub fn from_json(text: &str) -> Result<Self, ConfigError> {
        serde_json::from_str(text).map_err(|e| ConfigError::new("config", e.to_string()))
    }

    /// Apply `SCRILAB_*` overrides from `(name, value)` pairs; unrelated names are ignored.
    pub fn apply_env<I: IntoIterator<Item = (String, String)>>(&mut self, vars: I) -> Result<(), ConfigError> {
        for (key, value) in vars {
            let Some(name) = key.strip_prefix(ENV_PREFIX) else { continue };
            let float = |v: &str| v.trim().parse::<f64>().map_err(|e| ConfigError::new(&key, e.to_string()));
            match name {
                "MASS" => self.mass = float(&value)?,
                "GAMMAC" => self.gamma_c = float(&value)?,
                "GAMMAU" => self.gamma_u = float(&value)?,
                "ELL0" => self.ell0 = float(&value)?,
                "ELLI" => self.ell_i = float(&value)?,
                "LAMBDA" => self.lambda = float(&value)?,
                "SEED" => self.seed = value.trim().parse().map_err(|e: std::num::ParseIntError| ConfigError::new(&key, e.to_string()))?,
                "DETERMINISTIC" => {
                    self.deterministic = match value.trim() {
                        "1" | "true" => true,
                        "0" | "false" => false,
                        other => return Err(ConfigError::new(&key, format!("expected 0/1/true/false, got '{other}'"))),
                    }
                }
                _ => {}
            }
        }
        Ok(())
    }

    pub fn pair(&self) -> Result<ModPair, ConfigError> {
        ModPair::new(self.gamma_c, self.gamma_u).map_err(|e| ConfigError::new("gamma_c/gamma_u", e.to_string()))
    }

    pub fn wave_damping(&self) -> Damping {
        match self.wave.damping {
            DampingKind::None => Damping::None,
            DampingKind::Constraint => Damping::Constraint(self.gamma_c),
            DampingKind::GaugeChange => Damping::GaugeChange(self.gamma_u),
        }
    }

    pub fn ledger_setup(&self) -> LedgerSetup {
        LedgerSetup {
            rho0: self.ledger.rho0,
            rho_i_min: self.ledger.rho_i_range.0,
            rho_i_max: self.ledger.rho_i_range.1,
            samples: self.ledger.samples,
            mass: self.mass,
            ell_i: self.ell_i,
            slope_slack: self.ledger.slope_slack,
        }
    }

    /// Check every field that does not need a run. Grids are checked when built.
    pub fn validate(&self) -> Result<(), ConfigError> {
        self.pair()?;
        if !(self.mass >= 0.0 && self.mass.is_finite()) {
            return Err(ConfigError::new("mass", "must be finite and nonnegative"));
        }
        if !(self.ell0 > 0.0) {
            return Err(ConfigError::new("ell0", "must be positive"));
        }
        check_ell_i("ell_i", self.ell_i, self.gamma_u, self.ell0)?;
        check_ell_i("bondi.ell_i", self.bondi.ell_i, self.gamma_u, self.ell0)?;
        if !(self.lambda >= 0.0) {
            return Err(ConfigError::new("lambda", "must be nonnegative"));
        }
        for (field, w) in [
            ("wave.window", self.wave.window),
            ("transport.window", self.transport.window),
            ("maxwell.window", self.maxwell.window),
            ("bondi.windows.h11", self.bondi.windows.h11),
            ("bondi.windows.slashed", self.bondi.windows.slashed),
            ("bondi.windows.cu", self.bondi.windows.cu),
        ] {
            if !(w.0 > 0.0 && w.0 < w.1) {
                return Err(ConfigError::new(field, "need 0 < lower < upper"));
            }
        }
        if !(self.wave.bump_width > 0.0) {
            return Err(ConfigError::new("wave.bump_width", "must be positive"));
        }
        for &gc in &self.transport.sweep_gamma_c {
            ModPair::new(gc, self.transport.sweep_gamma_u)
                .map_err(|e| ConfigError::new("transport.sweep_gamma_c", e.to_string()))?;
        }
        let b = &self.bondi;
        if !(b.amplitude > 0.0 && b.amplitude <= 0.1) {
            return Err(ConfigError::new("bondi.amplitude", "small data need 0 < amplitude <= 0.1"));
        }
        if !(1..=20).contains(&b.iterations) {
            return Err(ConfigError::new("bondi.iterations", "must lie in 1..=20"));
        }
        if !(b.news_width > 0.0) {
            return Err(ConfigError::new("bondi.news_width", "must be positive"));
        }
        if b.n_b < 3 {
            return Err(ConfigError::new("bondi.n_b", "need at least 3 slices"));
        }
        Multiplier::new(self.energy.multiplier.alpha0, self.energy.multiplier.alpha_i, self.energy.multiplier.c)
            .map_err(|e| ConfigError::new("energy.multiplier", e.to_string()))?;
        let (lo, hi) = self.ledger.rho_i_range;
        if !(lo > 0.0 && lo < hi && hi < 1.0) {
            return Err(ConfigError::new("ledger.rho_i_range", "need 0 < lower < upper < 1"));
        }
        if !(self.linearize.rho_i > 0.0 && self.linearize.rho_i < 1.0 && self.linearize.rho0 > 0.0) {
            return Err(ConfigError::new("linearize", "need rho0 > 0 and 0 < rho_i < 1"));
        }
        Ok(())
    }
}

fn check_ell_i(field: &str, ell_i: f64, gamma_u: f64, ell0: f64) -> Result<(), ConfigError> {
    let bound = (-gamma_u).min(ell0).min(0.5);
    if !(ell_i > 0.0 && ell_i < bound) {
        return Err(ConfigError::new(field, format!("need 0 < ell_i < min(-gamma_u, ell0, 1/2) = {bound}, got {ell_i}")));
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn empty_config_is_default_and_valid() {
        let c = RunConfig::from_json("{}").unwrap();
        assert_eq!(c, RunConfig::default());
        c.validate().unwrap();
    }

    #[test]
    fn rejects_weight_above_gauge_bound() {
        let c = RunConfig { ell_i: 0.3, ..RunConfig::default() };
        assert_eq!(c.validate().unwrap_err().field, "ell_i");
        let c = RunConfig { gamma_c: 0.2, gamma_u: -0.3, ..RunConfig::default() };
        assert_eq!(c.validate().unwrap_err().field, "gamma_c/gamma_u");
    }

    #[test]
    fn env_overrides() {
        let mut c = RunConfig::default();
        let vars = [("SCRILAB_GAMMAC", "0.6"), ("SCRILAB_DETERMINISTIC", "1"), ("PATH", "/bin")];
        c.apply_env(vars.iter().map(|(k, v)| (k.to_string(), v.to_string()))).unwrap();
        assert_eq!((c.gamma_c, c.deterministic), (0.6, true));
        let bad = [("SCRILAB_MASS".to_string(), "heavy".to_string())];
        assert_eq!(c.apply_env(bad).unwrap_err().field, "SCRILAB_MASS");
    }

    #[test]
    fn bondi_grid_keeps_unit_ratio() {
        let b = BondiConfig::default();
        let g = b.build(0.0, 0).unwrap();
        let f = b.build(0.0, 1).unwrap();
        assert!((g.delta - 2.0 * f.delta).abs() < 1e-15);
        assert!((g.a_max() - 1.0).abs() < g.delta);
    }
}
