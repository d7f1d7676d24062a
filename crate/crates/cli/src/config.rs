//! Run configuration: a TOML file with `[scenario]`, `[ermakov]`, `[grid]`,
//! `[checks]` and `[output]` sections. Every key is optional except
//! `scenario.preset`; unknown keys are rejected.

use std::collections::BTreeMap;
use std::fmt;
use std::path::PathBuf;

use ermakov_qosc::ermakov::SolveOptions;
use ermakov_qosc::field::SpaceGrid;
use ermakov_qosc::scenario::{
    make_preset, preset_parameters, ErmakovParams, ScenarioSpec, PRESETS,
};
use ermakov_qosc::verify::{Tolerances, VerifyOptions};
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub scenario: ScenarioSection,
    #[serde(default)]
    pub ermakov: ErmakovSection,
    #[serde(default)]
    pub grid: GridSection,
    #[serde(default)]
    pub checks: ChecksSection,
    #[serde(default)]
    pub output: OutputSection,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioSection {
    pub preset: String,
    #[serde(default = "default_t0")]
    pub t0: f64,
    #[serde(default = "default_t_end")]
    pub t_end: f64,
    /// `[γ(t0), γ̇(t0)]`
    #[serde(default)]
    pub gamma_init: [f64; 2],
    /// Free constants of the preset, e.g. `kappa` for `caldirola_kanai`.
    #[serde(default)]
    pub params: BTreeMap<String, f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ErmakovSection {
    #[serde(default = "one")]
    pub w0: f64,
    /// `a`, `b`, `c` default to `1/W0`, `0`, `1/W0`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub a: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub b: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub c: Option<f64>,
    #[serde(default = "default_knot_spacing")]
    pub knot_spacing: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridSection {
    #[serde(rename = "N", default = "default_n")]
    pub n: usize,
    /// Both bounds or neither; when absent the grid is sized from `σ`, `μ`, `γ`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub x_min: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub x_max: Option<f64>,
    /// Sample times; when absent five interior times are used.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub times: Option<Vec<f64>>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ChecksSection {
    #[serde(default = "yes")]
    pub ermakov: bool,
    #[serde(default = "yes")]
    pub orthonormality: bool,
    #[serde(default = "yes")]
    pub eigen: bool,
    #[serde(default = "yes")]
    pub conservation: bool,
    #[serde(default = "yes")]
    pub tdse: bool,
    #[serde(default = "yes")]
    pub tdse_slope: bool,
    #[serde(default = "yes")]
    pub splitstep: bool,
    #[serde(default = "yes")]
    pub splitstep_slope: bool,
    #[serde(default = "default_n_max")]
    pub n_max: usize,
    #[serde(default = "default_tdse_n_max")]
    pub tdse_n_max: usize,
    #[serde(default = "default_states")]
    pub conservation_states: usize,
    #[serde(default = "default_seed")]
    pub seed: u64,
    #[serde(default = "one_usize")]
    pub splitstep_n: usize,
    #[serde(default = "default_dt")]
    pub splitstep_dt: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub splitstep_t_end: Option<f64>,
    #[serde(default)]
    pub tolerances: ToleranceSection,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ToleranceSection {
    #[serde(default = "tol_orthonormality")]
    pub orthonormality: f64,
    #[serde(default = "tol_1e6")]
    pub eigen: f64,
    #[serde(default = "tol_1e6")]
    pub conservation: f64,
    #[serde(default = "tol_1e6")]
    pub tdse: f64,
    #[serde(default = "tol_ermakov")]
    pub ermakov: f64,
    #[serde(default = "tol_1e8")]
    pub wronskian: f64,
    #[serde(default = "tol_1e8")]
    pub tau_arctan: f64,
    #[serde(default = "tol_1e8")]
    pub transport: f64,
    #[serde(default = "tol_splitstep")]
    pub splitstep: f64,
    #[serde(default = "tol_tdse_slope")]
    pub tdse_slope: f64,
    #[serde(default = "tol_splitstep_slope")]
    pub splitstep_slope: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutputSection {
    #[serde(default = "default_dir")]
    pub dir: PathBuf,
    #[serde(default = "yes")]
    pub trajectory: bool,
    #[serde(default = "yes")]
    pub wavefunctions: bool,
    #[serde(default = "yes")]
    pub report: bool,
    /// Quantum numbers dumped by `wavefunctions`.
    #[serde(default = "default_dump_n")]
    pub wavefunction_n: Vec<usize>,
}

fn default_t0() -> f64 {
    0.0
}
fn default_t_end() -> f64 {
    5.0
}
fn one() -> f64 {
    1.0
}
fn one_usize() -> usize {
    1
}
fn yes() -> bool {
    true
}
fn default_knot_spacing() -> f64 {
    1e-3
}
fn default_n() -> usize {
    1024
}
fn default_n_max() -> usize {
    8
}
fn default_tdse_n_max() -> usize {
    4
}
fn default_states() -> usize {
    3
}
fn default_seed() -> u64 {
    VerifyOptions::default().seed
}
fn default_dt() -> f64 {
    5e-4
}
fn default_dir() -> PathBuf {
    PathBuf::from("out")
}
fn default_dump_n() -> Vec<usize> {
    vec![0, 1, 2]
}
fn tol_orthonormality() -> f64 {
    Tolerances::default().orthonormality
}
fn tol_1e6() -> f64 {
    1e-6
}
fn tol_1e8() -> f64 {
    1e-8
}
fn tol_ermakov() -> f64 {
    Tolerances::default().ermakov
}
fn tol_splitstep() -> f64 {
    Tolerances::default().splitstep
}
fn tol_tdse_slope() -> f64 {
    Tolerances::default().tdse_slope
}
fn tol_splitstep_slope() -> f64 {
    Tolerances::default().splitstep_slope
}

macro_rules! default_from_empty {
    ($($ty:ty),*) => {$(
        impl Default for $ty {
            fn default() -> Self {
                toml::from_str("").expect("every field has a default")
            }
        }
    )*};
}

default_from_empty!(
    ErmakovSection,
    GridSection,
    ChecksSection,
    ToleranceSection,
    OutputSection
);

/// A configuration problem, located by line or by field path.
#[derive(Debug, Clone, PartialEq)]
pub enum ConfigError {
    Syntax(String),
    Invalid { path: String, reason: String },
}

impl fmt::Display for ConfigError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::Syntax(msg) => write!(f, "config syntax error: {msg}"),
            Self::Invalid { path, reason } => write!(f, "invalid config value at {path}: {reason}"),
        }
    }
}

impl std::error::Error for ConfigError {}

fn invalid(path: &str, reason: impl Into<String>) -> ConfigError {
    ConfigError::Invalid {
        path: path.into(),
        reason: reason.into(),
    }
}

/// Parses and validates a configuration file.
pub fn parse_config(text: &str) -> Result<RunConfig, ConfigError> {
    let config: RunConfig = toml::from_str(text)
        .map_err(|e| ConfigError::Syntax(e.to_string().trim_end().to_string()))?;
    config.validate()?;
    Ok(config)
}

impl RunConfig {
    /// Defaults for `preset`.
    pub fn for_preset(preset: &str) -> Self {
        Self {
            scenario: ScenarioSection {
                preset: preset.into(),
                t0: default_t0(),
                t_end: default_t_end(),
                gamma_init: [0.0, 0.0],
                params: BTreeMap::new(),
            },
            ermakov: ErmakovSection::default(),
            grid: GridSection::default(),
            checks: ChecksSection::default(),
            output: OutputSection::default(),
        }
    }

    /// The configuration as TOML with every default spelled out.
    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("configuration is always representable")
    }

    pub fn validate(&self) -> Result<(), ConfigError> {
        let s = &self.scenario;
        if !PRESETS.contains(&s.preset.as_str()) {
            return Err(invalid(
                "scenario.preset",
                format!(
                    "unknown preset `{}` (expected one of {})",
                    s.preset,
                    PRESETS.join(", ")
                ),
            ));
        }
        let known =
            preset_parameters(&s.preset).map_err(|e| invalid("scenario.preset", e.to_string()))?;
        for (key, value) in &s.params {
            if !known.iter().any(|(k, _)| k == key) {
                let names: Vec<&str> = known.iter().map(|(k, _)| *k).collect();
                return Err(invalid(
                    &format!("scenario.params.{key}"),
                    format!(
                        "not a parameter of `{}` (accepted: {})",
                        s.preset,
                        if names.is_empty() {
                            "none".into()
                        } else {
                            names.join(", ")
                        }
                    ),
                ));
            }
            finite(&format!("scenario.params.{key}"), *value)?;
        }
        finite("scenario.t0", s.t0)?;
        finite("scenario.t_end", s.t_end)?;
        if s.t_end <= s.t0 {
            return Err(invalid(
                "scenario.t_end",
                format!("must exceed t0 = {}", s.t0),
            ));
        }
        finite("scenario.gamma_init", s.gamma_init[0])?;
        finite("scenario.gamma_init", s.gamma_init[1])?;

        let e = &self.ermakov;
        finite("ermakov.w0", e.w0)?;
        if e.w0 == 0.0 {
            return Err(invalid("ermakov.w0", "W0 must be nonzero"));
        }
        for (name, v) in [("ermakov.a", e.a), ("ermakov.b", e.b), ("ermakov.c", e.c)] {
            if let Some(v) = v {
                finite(name, v)?;
            }
        }
        for (name, v) in [("ermakov.a", e.a), ("ermakov.c", e.c)] {
            if v.is_some_and(|v| v < 0.0) {
                return Err(invalid(name, "must be nonnegative"));
            }
        }
        if !self.ermakov_params().constraint_holds() {
            return Err(invalid("ermakov", "constraint b²−4ac=−4/W0² broken"));
        }
        positive("ermakov.knot_spacing", e.knot_spacing)?;

        let g = &self.grid;
        if g.n < 16 {
            return Err(invalid("grid.N", format!("N ≥ 16 required (got {})", g.n)));
        }
        match (g.x_min, g.x_max) {
            (None, None) => {}
            (Some(lo), Some(hi)) => {
                finite("grid.x_min", lo)?;
                finite("grid.x_max", hi)?;
                if hi <= lo {
                    return Err(invalid("grid.x_max", "must exceed x_min"));
                }
            }
            _ => return Err(invalid("grid", "give both x_min and x_max or neither")),
        }
        if let Some(times) = &g.times {
            if times.is_empty() {
                return Err(invalid("grid.times", "list is empty"));
            }
            for t in times {
                finite("grid.times", *t)?;
                if *t < s.t0 || *t > s.t_end {
                    return Err(invalid(
                        "grid.times",
                        format!("{t} lies outside [{}, {}]", s.t0, s.t_end),
                    ));
                }
            }
        }

        let c = &self.checks;
        if c.n_max > 64 || c.tdse_n_max > 64 || c.splitstep_n > 64 {
            return Err(invalid("checks", "quantum numbers are capped at 64"));
        }
        if c.seed > i64::MAX as u64 {
            return Err(invalid(
                "checks.seed",
                format!(
                    "must not exceed {} (TOML integers are 64-bit signed)",
                    i64::MAX
                ),
            ));
        }
        positive("checks.splitstep_dt", c.splitstep_dt)?;
        if let Some(t) = c.splitstep_t_end {
            finite("checks.splitstep_t_end", t)?;
            if t <= s.t0 || t > s.t_end {
                return Err(invalid(
                    "checks.splitstep_t_end",
                    format!("must lie in ({}, {}]", s.t0, s.t_end),
                ));
            }
        }
        let t = &c.tolerances;
        for (name, v) in [
            ("orthonormality", t.orthonormality),
            ("eigen", t.eigen),
            ("conservation", t.conservation),
            ("tdse", t.tdse),
            ("ermakov", t.ermakov),
            ("wronskian", t.wronskian),
            ("tau_arctan", t.tau_arctan),
            ("transport", t.transport),
            ("splitstep", t.splitstep),
            ("tdse_slope", t.tdse_slope),
            ("splitstep_slope", t.splitstep_slope),
        ] {
            positive(&format!("checks.tolerances.{name}"), v)?;
        }

        if self.output.wavefunction_n.iter().any(|&n| n > 64) {
            return Err(invalid(
                "output.wavefunction_n",
                "quantum numbers are capped at 64",
            ));
        }
        Ok(())
    }

    pub fn ermakov_params(&self) -> ErmakovParams {
        let e = &self.ermakov;
        let d = ErmakovParams::default_for(e.w0);
        ErmakovParams {
            a: e.a.unwrap_or(d.a),
            b: e.b.unwrap_or(d.b),
            c: e.c.unwrap_or(d.c),
            w0: e.w0,
        }
    }

    /// The scenario with every override applied.
    pub fn scenario(&self) -> ermakov_qosc::Result<ScenarioSpec> {
        let s = &self.scenario;
        let mut spec = make_preset(&s.preset, &s.params)?;
        spec.t0 = s.t0;
        spec.t_end = s.t_end;
        spec.gamma_init = (s.gamma_init[0], s.gamma_init[1]);
        spec.ermakov = self.ermakov_params();
        Ok(spec)
    }

    pub fn solve_options(&self, sigma_scale: f64) -> SolveOptions {
        SolveOptions {
            knot_spacing: self.ermakov.knot_spacing,
            sigma_scale,
            ..SolveOptions::default()
        }
    }

    pub fn explicit_grid(&self) -> ermakov_qosc::Result<Option<SpaceGrid>> {
        match (self.grid.x_min, self.grid.x_max) {
            (Some(lo), Some(hi)) => Ok(Some(SpaceGrid::new(lo, hi, self.grid.n)?)),
            _ => Ok(None),
        }
    }

    pub fn verify_options(&self, sigma_scale: f64) -> ermakov_qosc::Result<VerifyOptions> {
        let c = &self.checks;
        let t = &c.tolerances;
        let defaults = VerifyOptions::default();
        Ok(VerifyOptions {
            n_max: c.n_max,
            tdse_n_max: c.tdse_n_max,
            times: self.grid.times.clone(),
            grid_points: self.grid.n,
            grid: self.explicit_grid()?,
            ermakov: c.ermakov,
            orthonormality: c.orthonormality,
            eigen: c.eigen,
            conservation: c.conservation,
            tdse: c.tdse,
            tolerances: Tolerances {
                orthonormality: t.orthonormality,
                eigen: t.eigen,
                conservation: t.conservation,
                tdse: t.tdse,
                ermakov: t.ermakov,
                wronskian: t.wronskian,
                tau_arctan: t.tau_arctan,
                transport: t.transport,
                splitstep: t.splitstep,
                tdse_slope: t.tdse_slope,
                splitstep_slope: t.splitstep_slope,
            },
            solve: self.solve_options(sigma_scale),
            tdse_slope_deltas: if c.tdse_slope {
                defaults.tdse_slope_deltas
            } else {
                Vec::new()
            },
            conservation_states: c.conservation_states,
            seed: c.seed,
            splitstep: c.splitstep,
            splitstep_n: c.splitstep_n,
            splitstep_t_end: c.splitstep_t_end,
            splitstep_dt: c.splitstep_dt,
            splitstep_slope_dts: if c.splitstep_slope {
                [2.0, 1.0, 0.5].iter().map(|f| f * c.splitstep_dt).collect()
            } else {
                Vec::new()
            },
            ..defaults
        })
    }
}

fn finite(path: &str, v: f64) -> Result<(), ConfigError> {
    if v.is_finite() {
        Ok(())
    } else {
        Err(invalid(path, format!("{v} is not finite")))
    }
}

fn positive(path: &str, v: f64) -> Result<(), ConfigError> {
    finite(path, v)?;
    if v > 0.0 {
        Ok(())
    } else {
        Err(invalid(path, format!("must be positive (got {v})")))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn minimal_file_gets_defaults() {
        let c = parse_config("[scenario]\npreset = \"stationary\"\n").unwrap();
        assert_eq!(c, RunConfig::for_preset("stationary"));
        assert_eq!(c.grid.n, 1024);
        assert_eq!(c.checks.tolerances.eigen, 1e-6);
    }

    #[test]
    fn small_grid_rejected() {
        let err = parse_config("[scenario]\npreset = \"stationary\"\n[grid]\nN = 8\n").unwrap_err();
        assert!(err.to_string().contains("N ≥ 16 required"), "{err}");
        assert!(err.to_string().contains("grid.N"));
    }

    #[test]
    fn unknown_keys_rejected() {
        let err = parse_config("[scenario]\npreset = \"stationary\"\ncolour = 1\n").unwrap_err();
        assert!(matches!(err, ConfigError::Syntax(_)));
        assert!(err.to_string().contains("colour"));
        let err = parse_config("[scenario]\npreset = \"stationary\"\n[extra]\n").unwrap_err();
        assert!(err.to_string().contains("extra"));
        let err =
            parse_config("[scenario]\npreset = \"caldirola_kanai\"\nparams = { kapa = 0.1 }\n")
                .unwrap_err();
        assert!(err.to_string().contains("scenario.params.kapa"), "{err}");
    }

    #[test]
    fn syntax_errors_carry_a_line() {
        let err =
            parse_config("[scenario]\npreset = \"stationary\"\n[grid]\nN = = 3\n").unwrap_err();
        assert!(err.to_string().contains("line 4"), "{err}");
    }

    #[test]
    fn value_checks() {
        let base = "[scenario]\npreset = \"stationary\"\n";
        for (extra, path) in [
            (
                "[checks.tolerances]\ntdse = 0.0\n",
                "checks.tolerances.tdse",
            ),
            ("[ermakov]\na = 1.0\nb = 0.0\nc = 0.0\n", "ermakov"),
            ("[grid]\nx_min = -3.0\n", "grid"),
            ("[grid]\ntimes = [7.0]\n", "grid.times"),
            ("[scenario.params]\n", ""),
        ] {
            let r = parse_config(&format!("{base}{extra}"));
            if path.is_empty() {
                assert!(r.is_ok());
            } else {
                let err = r.unwrap_err().to_string();
                assert!(err.contains(path), "{extra}: {err}");
            }
        }
        let err = parse_config("[scenario]\npreset = \"hermite\"\n").unwrap_err();
        assert!(err.to_string().contains("scenario.preset"));
    }

    #[test]
    fn overrides_reach_the_scenario() {
        let c = parse_config(
            "[scenario]\npreset = \"caldirola_kanai\"\nt_end = 3.0\ngamma_init = [0.5, 0.0]\n[scenario.params]\nkappa = 0.2\n[ermakov]\na = 2.0\nc = 0.5\n",
        )
        .unwrap();
        let spec = c.scenario().unwrap();
        assert_eq!(spec.t_end, 3.0);
        assert_eq!(spec.gamma_init, (0.5, 0.0));
        assert_eq!((spec.ermakov.a, spec.ermakov.c), (2.0, 0.5));
        assert!((spec.mass.value(1.0) - 0.4_f64.exp()).abs() < 1e-14);
    }
}
