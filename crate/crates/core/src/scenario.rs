//! The physical model and its preset instances.
//!
//! A scenario fixes the mass `m(t)`, squared frequency `Ω²(t)` and driving
//! force `F(t)` of
//!
//! ```text
//! H(t) = p²/(2m) + m Ω² x²/2 + F x
//! ```
//!
//! together with the Ermakov constants `(a, b, c)`, the Wronskian `W0` of the
//! auxiliary linear pair and the initial data of the classical path `γ`.
//! The zero-point term `V0` is always zero and `ħ = 1`.

use std::collections::BTreeMap;
use std::fmt;
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::sampled::SampledFunction;

/// A real function of time with first and second derivatives.
///
/// Closed-form variants carry analytic derivatives. Tabulated and custom
/// functions fall back to fourth-order central differences with step
/// `1e-4 · timescale`.
#[derive(Clone)]
pub enum TimeFunction {
    Constant(f64),
    /// `scale · exp(rate · t)`
    Exponential {
        scale: f64,
        rate: f64,
    },
    /// `offset + amplitude · cos(frequency · t + phase)`
    Cosine {
        offset: f64,
        amplitude: f64,
        frequency: f64,
        phase: f64,
    },
    Tabulated {
        samples: SampledFunction,
        timescale: f64,
    },
    Custom {
        f: Arc<dyn Fn(f64) -> f64 + Send + Sync>,
        timescale: f64,
    },
}

impl fmt::Debug for TimeFunction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::Constant(c) => write!(f, "Constant({c})"),
            Self::Exponential { scale, rate } => write!(f, "{scale}·exp({rate}·t)"),
            Self::Cosine {
                offset,
                amplitude,
                frequency,
                phase,
            } => write!(f, "{offset} + {amplitude}·cos({frequency}·t + {phase})"),
            Self::Tabulated { samples, .. } => write!(f, "Tabulated({} knots)", samples.len()),
            Self::Custom { timescale, .. } => write!(f, "Custom(timescale = {timescale})"),
        }
    }
}

impl TimeFunction {
    pub fn value(&self, t: f64) -> f64 {
        self.jet(t)[0]
    }

    pub fn first(&self, t: f64) -> f64 {
        self.jet(t)[1]
    }

    pub fn second(&self, t: f64) -> f64 {
        self.jet(t)[2]
    }

    /// `[f, f', f'']` at `t`.
    pub fn jet(&self, t: f64) -> [f64; 3] {
        match self {
            Self::Constant(c) => [*c, 0.0, 0.0],
            Self::Exponential { scale, rate } => {
                let v = scale * (rate * t).exp();
                [v, rate * v, rate * rate * v]
            }
            Self::Cosine {
                offset,
                amplitude,
                frequency,
                phase,
            } => {
                let arg = frequency * t + phase;
                [
                    offset + amplitude * arg.cos(),
                    -amplitude * frequency * arg.sin(),
                    -amplitude * frequency * frequency * arg.cos(),
                ]
            }
            Self::Tabulated { samples, timescale } => {
                let (lo, hi) = samples.range();
                let eval = |s: f64| samples.value(s.clamp(lo, hi)).unwrap_or(f64::NAN);
                finite_difference_jet(eval, t, 1e-4 * timescale, lo, hi)
            }
            Self::Custom { f, timescale } => finite_difference_jet(
                |s| f(s),
                t,
                1e-4 * timescale,
                f64::NEG_INFINITY,
                f64::INFINITY,
            ),
        }
    }
}

/// Fourth-order differences for f' and f''. The five-point stencil is
/// shifted inward when it would leave `[lo, hi]`.
pub fn finite_difference_jet(f: impl Fn(f64) -> f64, t: f64, h: f64, lo: f64, hi: f64) -> [f64; 3] {
    let v = f(t);
    if t - 2.0 * h >= lo && t + 2.0 * h <= hi {
        let (m2, m1, p1, p2) = (f(t - 2.0 * h), f(t - h), f(t + h), f(t + 2.0 * h));
        let d1 = (m2 - 8.0 * m1 + 8.0 * p1 - p2) / (12.0 * h);
        let d2 = (-m2 + 16.0 * m1 - 30.0 * v + 16.0 * p1 - p2) / (12.0 * h * h);
        return [v, d1, d2];
    }
    // one-sided: sample forward from the left edge or backward from the right
    let dir = if t - 2.0 * h < lo { 1.0 } else { -1.0 };
    let s: Vec<f64> = (0..6).map(|k| f(t + dir * k as f64 * h)).collect();
    let d1 =
        dir * (-25.0 * s[0] + 48.0 * s[1] - 36.0 * s[2] + 16.0 * s[3] - 3.0 * s[4]) / (12.0 * h);
    let d2 = (45.0 * s[0] - 154.0 * s[1] + 214.0 * s[2] - 156.0 * s[3] + 61.0 * s[4] - 10.0 * s[5])
        / (12.0 * h * h);
    [v, d1, d2]
}

/// Constants of the Ermakov solution `σ² = a q₁² + b q₁q₂ + c q₂²`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ErmakovParams {
    pub a: f64,
    pub b: f64,
    pub c: f64,
    /// Wronskian `q₁q̇₂ − q̇₁q₂` of the linear pair.
    pub w0: f64,
}

impl ErmakovParams {
    /// `b = 0`, `a = c = 1/W0`.
    pub fn default_for(w0: f64) -> Self {
        Self {
            a: 1.0 / w0,
            b: 0.0,
            c: 1.0 / w0,
            w0,
        }
    }

    /// `b² − 4ac + 4/W0²`, zero for admissible constants.
    pub fn constraint_residual(&self) -> f64 {
        self.b * self.b - 4.0 * self.a * self.c + 4.0 / (self.w0 * self.w0)
    }

    pub fn constraint_holds(&self) -> bool {
        let scale = f64::max(1.0, 4.0 / (self.w0 * self.w0));
        self.constraint_residual().abs() <= 1e-10 * scale
    }
}

impl Default for ErmakovParams {
    fn default() -> Self {
        Self::default_for(1.0)
    }
}

#[derive(Debug, Clone)]
pub struct ScenarioSpec {
    pub name: String,
    pub mass: TimeFunction,
    pub frequency_sq: TimeFunction,
    pub force: TimeFunction,
    pub ermakov: ErmakovParams,
    /// `(γ(t0), γ̇(t0))`
    pub gamma_init: (f64, f64),
    pub t0: f64,
    pub t_end: f64,
    /// Non-fatal remarks raised while building the scenario.
    pub notes: Vec<String>,
}

impl ScenarioSpec {
    /// `(μ, μ̇, μ̈)` with `μ = √m`.
    pub fn mu(&self, t: f64) -> Result<[f64; 3]> {
        let [m, dm, ddm] = self.mass.jet(t);
        if !(m > 0.0) {
            return Err(Error::NonPositiveMass { t, mass: m });
        }
        let mu = m.sqrt();
        let dmu = dm / (2.0 * mu);
        let ddmu = ddm / (2.0 * mu) - dm * dm / (4.0 * m * mu);
        Ok([mu, dmu, ddmu])
    }

    /// `Ω² − μ̈/μ`, the coefficient of the auxiliary linear equation.
    pub fn effective_frequency_sq(&self, t: f64) -> Result<f64> {
        let [m, dm, ddm] = self.mass.jet(t);
        if !(m > 0.0) {
            return Err(Error::NonPositiveMass { t, mass: m });
        }
        Ok(self.frequency_sq.value(t) - (ddm / (2.0 * m) - dm * dm / (4.0 * m * m)))
    }

    pub fn validate(&self) -> Vec<Violation> {
        validate(self, self.ermakov.w0)
    }
}

/// Builds a parameter map from `(key, value)` pairs.
pub fn params(pairs: &[(&str, f64)]) -> BTreeMap<String, f64> {
    pairs.iter().map(|(k, v)| (k.to_string(), *v)).collect()
}

pub const PRESETS: [&str; 4] = [
    "stationary",
    "parametric_const_mass",
    "caldirola_kanai",
    "driven_const_mass",
];

/// Preset parameters and their defaults.
pub fn preset_parameters(name: &str) -> Result<&'static [(&'static str, f64)]> {
    Ok(match name {
        "stationary" => &[],
        "parametric_const_mass" => &[("omega0_sq", 1.0), ("eps", 0.2), ("nu", 1.3)],
        "caldirola_kanai" => &[("kappa", 0.1), ("omega_sq", 1.0)],
        "driven_const_mass" => &[("f0", 0.5), ("omega_d", 2.0)],
        other => return Err(Error::UnknownPreset(other.to_string())),
    })
}

/// Builds one of the shipped scenarios.
///
/// * `stationary`: `m = 1`, `Ω² = 1`, `F = 0`.
/// * `parametric_const_mass`: `m = 1`, `Ω²(t) = omega0_sq·(1 + eps·cos(nu·t))`, `F = 0`.
/// * `caldirola_kanai`: `m = e^{2κt}`, `Ω² = omega_sq`, `F = 0`; the effective
///   frequency is `Ω² − κ²`.
/// * `driven_const_mass`: `m = 1`, `Ω² = 1`, `F = f0·cos(omega_d·t)`.
///
/// All presets use `t0 = 0`, `t_end = 5`, `γ(t0) = γ̇(t0) = 0` and the default
/// Ermakov constants; callers adjust the public fields afterwards.
pub fn make_preset(name: &str, params: &BTreeMap<String, f64>) -> Result<ScenarioSpec> {
    let known = preset_parameters(name)?;
    for (key, value) in params {
        if !known.iter().any(|(k, _)| k == key) {
            return Err(Error::InvalidParameter {
                name: key.clone(),
                reason: format!("not a parameter of preset `{name}`"),
            });
        }
        if !value.is_finite() {
            return Err(Error::InvalidParameter {
                name: key.clone(),
                reason: "must be finite".into(),
            });
        }
    }
    let get = |key: &str| {
        params.get(key).copied().unwrap_or_else(|| {
            known
                .iter()
                .find(|(k, _)| *k == key)
                .map(|(_, v)| *v)
                .expect("preset parameter table")
        })
    };

    let mut notes = Vec::new();
    let unit = TimeFunction::Constant(1.0);
    let zero = TimeFunction::Constant(0.0);
    let (mass, frequency_sq, force) = match name {
        "stationary" => (unit.clone(), unit, zero),
        "parametric_const_mass" => {
            let (w2, eps, nu) = (get("omega0_sq"), get("eps"), get("nu"));
            let omega = TimeFunction::Cosine {
                offset: w2,
                amplitude: w2 * eps,
                frequency: nu,
                phase: 0.0,
            };
            (unit, omega, zero)
        }
        "caldirola_kanai" => {
            let (kappa, w2) = (get("kappa"), get("omega_sq"));
            if kappa * kappa >= w2 {
                notes.push(format!(
                    "effective frequency Ω² − κ² = {} is not positive; solutions are non-oscillatory",
                    w2 - kappa * kappa
                ));
            }
            let mass = TimeFunction::Exponential {
                scale: 1.0,
                rate: 2.0 * kappa,
            };
            (mass, TimeFunction::Constant(w2), zero)
        }
        "driven_const_mass" => {
            let force = TimeFunction::Cosine {
                offset: 0.0,
                amplitude: get("f0"),
                frequency: get("omega_d"),
                phase: 0.0,
            };
            (unit.clone(), unit, force)
        }
        _ => unreachable!("checked by preset_parameters"),
    };

    Ok(ScenarioSpec {
        name: name.to_string(),
        mass,
        frequency_sq,
        force,
        ermakov: ErmakovParams::default(),
        gamma_init: (0.0, 0.0),
        t0: 0.0,
        t_end: 5.0,
        notes,
    })
}

#[derive(Debug, Clone, PartialEq)]
pub enum Violation {
    TimeRange { t0: f64, t_end: f64 },
    NonPositiveMass { t: f64, mass: f64 },
    NegativeCoefficient { name: &'static str, value: f64 },
    ZeroWronskian,
    ConstraintBroken { residual: f64 },
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::TimeRange { t0, t_end } => write!(f, "time range [{t0}, {t_end}] is empty"),
            Self::NonPositiveMass { t, mass } => write!(f, "mass m({t}) = {mass} is not positive"),
            Self::NegativeCoefficient { name, value } => {
                write!(f, "Ermakov coefficient {name} = {value} is negative")
            }
            Self::ZeroWronskian => write!(f, "Wronskian W0 must be nonzero"),
            Self::ConstraintBroken { residual } => {
                write!(f, "constraint b²−4ac=−4/W0² broken (residual {residual:e})")
            }
        }
    }
}

/// Checks the scenario for admissibility against Wronskian `w0`.
///
/// The mass is sampled on 2001 points of `[t0, t_end]`.
pub fn validate(spec: &ScenarioSpec, w0: f64) -> Vec<Violation> {
    let mut out = Vec::new();
    if !(spec.t_end > spec.t0) {
        out.push(Violation::TimeRange {
            t0: spec.t0,
            t_end: spec.t_end,
        });
    } else {
        let samples = 2001;
        for k in 0..samples {
            let t = spec.t0 + (spec.t_end - spec.t0) * k as f64 / (samples - 1) as f64;
            let m = spec.mass.value(t);
            if !(m > 0.0) {
                out.push(Violation::NonPositiveMass { t, mass: m });
                break;
            }
        }
    }
    let e = ErmakovParams { w0, ..spec.ermakov };
    if e.a < 0.0 {
        out.push(Violation::NegativeCoefficient {
            name: "a",
            value: e.a,
        });
    }
    if e.c < 0.0 {
        out.push(Violation::NegativeCoefficient {
            name: "c",
            value: e.c,
        });
    }
    if w0 == 0.0 || !w0.is_finite() {
        out.push(Violation::ZeroWronskian);
    } else if !e.constraint_holds() {
        out.push(Violation::ConstraintBroken {
            residual: e.constraint_residual(),
        });
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};

    #[test]
    fn stationary_preset_is_identity_scenario() {
        let s = make_preset("stationary", &BTreeMap::new()).unwrap();
        for t in [0.0, 1.3, 4.9] {
            assert_eq!(s.mass.jet(t), [1.0, 0.0, 0.0]);
            assert_eq!(s.frequency_sq.value(t), 1.0);
            assert_eq!(s.force.value(t), 0.0);
        }
        assert_eq!((s.ermakov.a, s.ermakov.b, s.ermakov.c), (1.0, 0.0, 1.0));
        assert_eq!(s.gamma_init, (0.0, 0.0));
        assert!(s.validate().is_empty());
    }

    #[test]
    fn caldirola_kanai_effective_frequency() {
        let s = make_preset(
            "caldirola_kanai",
            &params(&[("kappa", 0.1), ("omega_sq", 1.0)]),
        )
        .unwrap();
        let [mu, dmu, ddmu] = s.mu(0.0).unwrap();
        assert_eq!(mu, 1.0);
        assert!((dmu - 0.1).abs() < 1e-15);
        assert!((ddmu / mu - 0.01).abs() < 1e-15);
        assert!((s.effective_frequency_sq(2.7).unwrap() - 0.99).abs() < 1e-14);
        assert!(s.notes.is_empty());

        // central differences of m at t = 0
        let h = 1e-4;
        let m = |t: f64| s.mass.value(t);
        let fd1 = (m(h) - m(-h)) / (2.0 * h);
        let fd2 = (m(h) - 2.0 * m(0.0) + m(-h)) / (h * h);
        assert!((fd1 - s.mass.first(0.0)).abs() < 1e-8);
        assert!((fd2 - s.mass.second(0.0)).abs() < 1e-6);
    }

    #[test]
    fn caldirola_kanai_overdamped_is_flagged_not_rejected() {
        let s = make_preset(
            "caldirola_kanai",
            &params(&[("kappa", 1.5), ("omega_sq", 1.0)]),
        )
        .unwrap();
        assert_eq!(s.notes.len(), 1);
    }

    #[test]
    fn driven_force_values() {
        let s = make_preset(
            "driven_const_mass",
            &params(&[("f0", 0.5), ("omega_d", 2.0)]),
        )
        .unwrap();
        assert_eq!(s.force.value(0.0), 0.5);
        assert!((s.force.value(std::f64::consts::FRAC_PI_2) + 0.5).abs() < 1e-15);
    }

    #[test]
    fn preset_errors() {
        assert!(matches!(
            make_preset("hermite", &BTreeMap::new()),
            Err(Error::UnknownPreset(_))
        ));
        assert!(matches!(
            make_preset("stationary", &params(&[("kappa", 0.1)])),
            Err(Error::InvalidParameter { .. })
        ));
        assert!(matches!(
            make_preset("caldirola_kanai", &params(&[("kappa", f64::NAN)])),
            Err(Error::InvalidParameter { .. })
        ));
    }

    #[test]
    fn validate_examples() {
        let mut s = make_preset("stationary", &BTreeMap::new()).unwrap();
        assert!(validate(&s, 1.0).is_empty());

        s.ermakov = ErmakovParams {
            a: 1.0,
            b: 0.0,
            c: 0.0,
            w0: 1.0,
        };
        let v = validate(&s, 1.0);
        assert_eq!(v.len(), 1);
        assert!(v[0].to_string().contains("constraint b²−4ac=−4/W0² broken"));

        s.ermakov = ErmakovParams {
            a: 2.0,
            b: 0.0,
            c: 0.5,
            w0: 1.0,
        };
        assert!(validate(&s, 1.0).is_empty());

        s.mass = TimeFunction::Cosine {
            offset: 0.5,
            amplitude: 1.0,
            frequency: 1.0,
            phase: 0.0,
        };
        assert!(matches!(
            validate(&s, 1.0)[0],
            Violation::NonPositiveMass { .. }
        ));
    }

    #[test]
    fn presets_validate_with_default_constants() {
        for name in PRESETS {
            let s = make_preset(name, &BTreeMap::new()).unwrap();
            assert!(s.validate().is_empty(), "{name}");
        }
    }

    #[test]
    fn analytic_mass_derivatives_match_finite_differences() {
        let mut rng = rand::rngs::StdRng::seed_from_u64(7);
        for name in PRESETS {
            let s = make_preset(name, &BTreeMap::new()).unwrap();
            for _ in 0..100 {
                let t = rng.gen_range(s.t0..s.t_end);
                let fd = finite_difference_jet(|x| s.mass.value(x), t, 1e-3, f64::MIN, f64::MAX);
                let exact = s.mass.jet(t);
                for k in 1..3 {
                    let scale = exact[k].abs().max(exact[0].abs());
                    assert!(
                        (fd[k] - exact[k]).abs() <= 1e-6 * scale,
                        "{name} t={t} k={k}"
                    );
                }
            }
        }
    }

    #[test]
    fn tabulated_function_uses_finite_difference_fallback() {
        let knots: Vec<f64> = (0..=400).map(|k| k as f64 * 0.01).collect();
        let samples = SampledFunction::with_derivative(
            knots.clone(),
            knots.iter().map(|t| t.sin()).collect(),
            knots.iter().map(|t| t.cos()).collect(),
        )
        .unwrap();
        let f = TimeFunction::Tabulated {
            samples,
            timescale: 10.0,
        };
        for t in [0.0, 0.5, 2.0, 4.0] {
            let [v, d1, _] = f.jet(t);
            assert!((v - t.sin()).abs() < 1e-9);
            assert!((d1 - t.cos()).abs() < 1e-5, "t={t} d1={d1}");
        }
        let c = TimeFunction::Custom {
            f: Arc::new(|t: f64| t.exp()),
            timescale: 1.0,
        };
        let [_, d1, d2] = c.jet(0.3);
        assert!((d1 - 0.3f64.exp()).abs() < 1e-9);
        assert!((d2 - 0.3f64.exp()).abs() < 1e-6);
    }
}
