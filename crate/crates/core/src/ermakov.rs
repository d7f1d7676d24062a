//! Auxiliary equations of the point transformation.
//!
//! Given a scenario, this module solves the linear pair
//! `q̈ + (Ω² − μ̈/μ) q = 0`, assembles the Ermakov solution
//! `σ = (a q₁² + b q₁q₂ + c q₂²)^{1/2}`, the driven classical path `γ`, the
//! deformed time `τ = ∫ dt/σ²` and the real phase
//! `ξ = γ W_γ/(2σ) − ½ ∫ F γ/μ dt`, and exposes them as per-time
//! [`ErmakovFrame`] snapshots.
//!
//! All trajectories live on a uniform knot grid. Knot values come from the
//! adaptive integrator (which lands on every knot) or from Gauss–Legendre
//! running integrals; between knots they are Hermite-interpolated. Both
//! indefinite integrals are anchored at `t0`.

use std::io::{self, Write};

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::format::fmt_f64;
use crate::ode::Dopri5;
use crate::quad;
use crate::sampled::SampledFunction;
use crate::scenario::{ErmakovParams, ScenarioSpec};

/// Gauss–Legendre points per knot interval for running integrals.
const QUAD_ORDER: usize = 8;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SolveOptions {
    /// Upper bound on the knot spacing; the grid is uniform on `[t0, t_end]`.
    pub knot_spacing: f64,
    pub integrator: Dopri5,
    /// Multiplies `σ` after it is built. `1.0` is the physical solution; other
    /// values are used to check that the verification suite notices.
    pub sigma_scale: f64,
}

impl Default for SolveOptions {
    fn default() -> Self {
        Self {
            knot_spacing: 1e-3,
            integrator: Dopri5::default(),
            sigma_scale: 1.0,
        }
    }
}

/// Uniform knots `t0 + k (t_end − t0)/n` with spacing at most `spacing`.
pub fn time_grid(t0: f64, t_end: f64, spacing: f64) -> Result<Vec<f64>> {
    if !(t_end > t0) || !(spacing > 0.0) || !t0.is_finite() || !t_end.is_finite() {
        return Err(Error::InvalidGrid(format!(
            "time range [{t0}, {t_end}] with spacing {spacing}"
        )));
    }
    let n = ((t_end - t0) / spacing - 1e-9).ceil().max(1.0) as usize;
    let span = t_end - t0;
    Ok((0..=n)
        .map(|k| t0 + span * (k as f64) / (n as f64))
        .collect())
}

/// Two independent real solutions of the auxiliary linear equation with
/// `q₁(t0) = 1, q̇₁(t0) = 0, q₂(t0) = 0, q̇₂(t0) = W0`.
#[derive(Debug, Clone)]
pub struct LinearPair {
    pub q1: SampledFunction,
    pub q2: SampledFunction,
    pub w0: f64,
}

impl LinearPair {
    /// `q₁q̇₂ − q̇₁q₂` at every knot.
    pub fn wronskian_at_knots(&self) -> Vec<f64> {
        let (q1, q2) = (self.q1.values(), self.q2.values());
        let d1 = self
            .q1
            .derivative_values()
            .expect("pair stores derivatives");
        let d2 = self
            .q2
            .derivative_values()
            .expect("pair stores derivatives");
        (0..q1.len())
            .map(|i| q1[i] * d2[i] - d1[i] * q2[i])
            .collect()
    }

    /// `max |W(t) − W0| / |W0|` over knots.
    pub fn wronskian_deviation(&self) -> f64 {
        self.wronskian_at_knots()
            .iter()
            .map(|w| (w - self.w0).abs() / self.w0.abs())
            .fold(0.0, f64::max)
    }
}

pub fn solve_linear_pair(
    spec: &ScenarioSpec,
    grid: &[f64],
    w0: f64,
    integrator: &Dopri5,
) -> Result<LinearPair> {
    if grid.len() < 2 {
        return Err(Error::InvalidGrid("time grid needs two knots".into()));
    }
    if w0 == 0.0 || !w0.is_finite() {
        return Err(Error::InvalidParameter {
            name: "w0".into(),
            reason: "Wronskian must be finite and nonzero".into(),
        });
    }
    for &t in grid {
        spec.mu(t)?;
    }
    let t0 = grid[0];
    let states = integrator.integrate(
        |t, y: &[f64; 4]| {
            let w2 = spec.effective_frequency_sq(t)?;
            Ok([y[1], -w2 * y[0], y[3], -w2 * y[2]])
        },
        t0,
        [1.0, 0.0, 0.0, w0],
        grid,
    )?;
    let mut cols = [vec![], vec![], vec![], vec![], vec![], vec![]];
    for (&t, y) in grid.iter().zip(&states) {
        let w2 = spec.effective_frequency_sq(t)?;
        let row = [y[0], y[1], -w2 * y[0], y[2], y[3], -w2 * y[2]];
        for (c, v) in cols.iter_mut().zip(row) {
            c.push(v);
        }
    }
    let [a0, a1, a2, b0, b1, b2] = cols;
    Ok(LinearPair {
        q1: SampledFunction::with_derivatives(grid.to_vec(), a0, a1, a2)?,
        q2: SampledFunction::with_derivatives(grid.to_vec(), b0, b1, b2)?,
        w0,
    })
}

/// `σ = (a q₁² + b q₁q₂ + c q₂²)^{1/2}` with `σ̇, σ̈` assembled from the pair.
pub fn build_sigma(pair: &LinearPair, abc: &ErmakovParams) -> Result<SampledFunction> {
    let e = ErmakovParams {
        w0: pair.w0,
        ..*abc
    };
    if !e.constraint_holds() || e.a < 0.0 || e.c < 0.0 {
        return Err(Error::ConstraintViolated {
            residual: e.constraint_residual(),
        });
    }
    let (a, b, c) = (e.a, e.b, e.c);
    let (q1, q2) = (&pair.q1, &pair.q2);
    let (p1, p2) = (
        q1.derivative_values().unwrap(),
        q2.derivative_values().unwrap(),
    );
    let (s1, s2) = (
        q1.second_derivative_values().unwrap(),
        q2.second_derivative_values().unwrap(),
    );
    let n = q1.len();
    let (mut v, mut d, mut dd) = (
        Vec::with_capacity(n),
        Vec::with_capacity(n),
        Vec::with_capacity(n),
    );
    for i in 0..n {
        let (x1, x2) = (q1.values()[i], q2.values()[i]);
        let r = a * x1 * x1 + b * x1 * x2 + c * x2 * x2;
        if !(r > 0.0) {
            return Err(Error::NonPositiveRadicand {
                t: q1.knots()[i],
                value: r,
            });
        }
        let dr = 2.0 * a * x1 * p1[i] + b * (p1[i] * x2 + x1 * p2[i]) + 2.0 * c * x2 * p2[i];
        let ddr = 2.0 * a * (p1[i] * p1[i] + x1 * s1[i])
            + b * (s1[i] * x2 + 2.0 * p1[i] * p2[i] + x1 * s2[i])
            + 2.0 * c * (p2[i] * p2[i] + x2 * s2[i]);
        let sigma = r.sqrt();
        let ds = dr / (2.0 * sigma);
        v.push(sigma);
        d.push(ds);
        dd.push((ddr - 2.0 * ds * ds) / (2.0 * sigma));
    }
    SampledFunction::with_derivatives(q1.knots().to_vec(), v, d, dd)
}

/// Classical path `γ = γ₁q₁ + γ₂q₂ + γ_p`, where `γ_p` is the
/// variation-of-parameters solution of `γ̈ + (Ω² − μ̈/μ)γ = F/μ` vanishing with
/// its derivative at `t0`.
pub fn solve_gamma(spec: &ScenarioSpec, pair: &LinearPair) -> Result<SampledFunction> {
    let knots = pair.q1.knots();
    let w0 = pair.w0;
    let forcing = |t: f64| -> Result<f64> { Ok(spec.force.value(t) / spec.mu(t)?[0]) };
    let i1 = quad::cumulative(knots, QUAD_ORDER, |t| Ok(pair.q1.value(t)? * forcing(t)?))?;
    let i2 = quad::cumulative(knots, QUAD_ORDER, |t| Ok(pair.q2.value(t)? * forcing(t)?))?;
    let (g1, g2) = (spec.gamma_init.0, spec.gamma_init.1 / w0);

    let (q1, q2) = (pair.q1.values(), pair.q2.values());
    let (p1, p2) = (
        pair.q1.derivative_values().unwrap(),
        pair.q2.derivative_values().unwrap(),
    );
    let n = knots.len();
    let (mut v, mut d, mut dd) = (
        Vec::with_capacity(n),
        Vec::with_capacity(n),
        Vec::with_capacity(n),
    );
    for k in 0..n {
        let t = knots[k];
        let g = g1 * q1[k] + g2 * q2[k] + (q2[k] * i1[k] - q1[k] * i2[k]) / w0;
        let dg = g1 * p1[k] + g2 * p2[k] + (p2[k] * i1[k] - p1[k] * i2[k]) / w0;
        v.push(g);
        d.push(dg);
        dd.push(-spec.effective_frequency_sq(t)? * g + forcing(t)?);
    }
    SampledFunction::with_derivatives(knots.to_vec(), v, d, dd)
}

/// `τ(t) = ∫_{t0}^{t} dt′/σ²(t′)`.
pub fn compute_tau(sigma: &SampledFunction) -> Result<SampledFunction> {
    let knots = sigma.knots();
    let tau = quad::cumulative(knots, QUAD_ORDER, |t| {
        let s = sigma.value(t)?;
        if !(s > 0.0) {
            return Err(Error::NonPositiveRadicand { t, value: s * s });
        }
        Ok(1.0 / (s * s))
    })?;
    if let Some(k) = tau.windows(2).position(|w| !(w[1] > w[0])) {
        return Err(Error::NonMonotoneTau { t: knots[k] });
    }
    let s = sigma.values();
    let ds = sigma.derivative_values().unwrap();
    let d1 = s.iter().map(|s| 1.0 / (s * s)).collect();
    let d2 = s
        .iter()
        .zip(ds)
        .map(|(s, d)| -2.0 * d / (s * s * s))
        .collect();
    SampledFunction::with_derivatives(knots.to_vec(), tau, d1, d2)
}

/// `arctan[(W0/2)(b + 2c q₂/q₁)]` at every knot, unwrapped across the poles
/// of `q₂/q₁` and shifted to vanish at `t0`.
pub fn arctan_tau(pair: &LinearPair, abc: &ErmakovParams) -> Vec<f64> {
    let (b, c, w0) = (abc.b, abc.c, pair.w0);
    let raw: Vec<f64> = pair
        .q1
        .values()
        .iter()
        .zip(pair.q2.values())
        .map(|(q1, q2)| (0.5 * w0 * (b + 2.0 * c * q2 / q1)).atan())
        .collect();
    let mut out = Vec::with_capacity(raw.len());
    let mut offset = 0.0;
    for k in 0..raw.len() {
        if k > 0 {
            let jump = raw[k] - raw[k - 1];
            if jump < -std::f64::consts::FRAC_PI_2 {
                offset += std::f64::consts::PI;
            } else if jump > std::f64::consts::FRAC_PI_2 {
                offset -= std::f64::consts::PI;
            }
        }
        out.push(raw[k] + offset - raw[0]);
    }
    out
}

/// Real phase `ξ` and the complex gauge constant `η` at every knot.
#[derive(Debug, Clone)]
pub struct XiEta {
    pub xi: SampledFunction,
    /// `∫_{t0}^{t} F γ/μ dt′`
    pub force_work: SampledFunction,
    pub eta: Vec<Complex64>,
}

pub fn compute_xi_eta(
    spec: &ScenarioSpec,
    sigma: &SampledFunction,
    gamma: &SampledFunction,
) -> Result<XiEta> {
    let knots = sigma.knots();
    let integrand =
        |t: f64| -> Result<f64> { Ok(spec.force.value(t) * gamma.value(t)? / spec.mu(t)?[0]) };
    let work = quad::cumulative(knots, QUAD_ORDER, integrand)?;
    let n = knots.len();
    let (mut wd, mut wdd) = (Vec::with_capacity(n), Vec::with_capacity(n));
    let (mut xi, mut dxi, mut eta) = (
        Vec::with_capacity(n),
        Vec::with_capacity(n),
        Vec::with_capacity(n),
    );
    for k in 0..n {
        let t = knots[k];
        let [f, df, _] = spec.force.jet(t);
        let [mu, dmu, _] = spec.mu(t)?;
        let s = sigma.eval(t)?;
        let g = gamma.eval(t)?;
        wd.push(f * g.value / mu);
        wdd.push((df * g.value + f * g.d1) / mu - f * g.value * dmu / (mu * mu));

        let w_gamma = s.value * g.d1 - s.d1 * g.value;
        let dw_gamma = s.value * g.d2 - s.d2 * g.value;
        let x = g.value * w_gamma / (2.0 * s.value) - 0.5 * work[k];
        let dx = (g.d1 * w_gamma + g.value * dw_gamma) / (2.0 * s.value)
            - g.value * w_gamma * s.d1 / (2.0 * s.value * s.value)
            - 0.5 * f * g.value / mu;
        xi.push(x);
        dxi.push(dx);
        eta.push(eta_from(x, s.value, mu));
    }
    Ok(XiEta {
        xi: SampledFunction::with_derivative(knots.to_vec(), xi, dxi)?,
        force_work: SampledFunction::with_derivatives(knots.to_vec(), work, wd, wdd)?,
        eta,
    })
}

/// `η` from `(μ/σ)η = ξ − (i/2) ln(σ/μ)`.
pub fn eta_from(xi: f64, sigma: f64, mu: f64) -> Complex64 {
    let r = sigma / mu;
    Complex64::new(r * xi, -0.5 * r * r.ln())
}

/// Every transformation scalar at one time.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ErmakovFrame {
    pub t: f64,
    pub mu: f64,
    pub mu_dot: f64,
    pub sigma: f64,
    pub sigma_dot: f64,
    pub gamma: f64,
    pub gamma_dot: f64,
    pub tau: f64,
    pub xi: f64,
    pub eta_re: f64,
    pub eta_im: f64,
    /// `σμ̇ − σ̇μ`
    pub w_mu: f64,
    /// `σγ̇ − σ̇γ`
    pub w_gamma: f64,
}

impl ErmakovFrame {
    /// Assembles a frame from the primary scalars; `W_μ`, `W_γ` and `η` are
    /// derived.
    #[allow(clippy::too_many_arguments)]
    pub fn from_parts(
        t: f64,
        [mu, mu_dot]: [f64; 2],
        [sigma, sigma_dot]: [f64; 2],
        [gamma, gamma_dot]: [f64; 2],
        tau: f64,
        xi: f64,
    ) -> Self {
        let eta = eta_from(xi, sigma, mu);
        Self {
            t,
            mu,
            mu_dot,
            sigma,
            sigma_dot,
            gamma,
            gamma_dot,
            tau,
            xi,
            eta_re: eta.re,
            eta_im: eta.im,
            w_mu: sigma * mu_dot - sigma_dot * mu,
            w_gamma: sigma * gamma_dot - sigma_dot * gamma,
        }
    }

    pub fn eta(&self) -> Complex64 {
        Complex64::new(self.eta_re, self.eta_im)
    }
}

/// All solved trajectories of one scenario.
#[derive(Debug, Clone)]
pub struct ErmakovSolution {
    pub spec: ScenarioSpec,
    pub pair: LinearPair,
    pub sigma: SampledFunction,
    pub gamma: SampledFunction,
    pub tau: SampledFunction,
    pub xi_eta: XiEta,
    pub sigma_scale: f64,
}

impl ErmakovSolution {
    pub fn solve(spec: &ScenarioSpec, opts: &SolveOptions) -> Result<Self> {
        let grid = time_grid(spec.t0, spec.t_end, opts.knot_spacing)?;
        let pair = solve_linear_pair(spec, &grid, spec.ermakov.w0, &opts.integrator)?;
        let mut sigma = build_sigma(&pair, &spec.ermakov)?;
        if opts.sigma_scale != 1.0 {
            sigma = sigma.scaled(opts.sigma_scale);
        }
        let gamma = solve_gamma(spec, &pair)?;
        let tau = compute_tau(&sigma)?;
        let xi_eta = compute_xi_eta(spec, &sigma, &gamma)?;
        Ok(Self {
            spec: spec.clone(),
            pair,
            sigma,
            gamma,
            tau,
            xi_eta,
            sigma_scale: opts.sigma_scale,
        })
    }

    pub fn knots(&self) -> &[f64] {
        self.sigma.knots()
    }

    pub fn range(&self) -> (f64, f64) {
        self.sigma.range()
    }

    pub fn frame_at(&self, t: f64) -> Result<ErmakovFrame> {
        let s = self.sigma.eval(t)?;
        let g = self.gamma.eval(t)?;
        let [mu, dmu, _] = self.spec.mu(t)?;
        Ok(ErmakovFrame::from_parts(
            t,
            [mu, dmu],
            [s.value, s.d1],
            [g.value, g.d1],
            self.tau.value(t)?,
            self.xi_eta.xi.value(t)?,
        ))
    }

    /// `sup |σ̈ + (Ω² − μ̈/μ)σ − σ⁻³|` over knots and interval midpoints, with
    /// `σ̈` taken from the interpolant.
    pub fn ermakov_residual(&self) -> Result<f64> {
        self.sup_over_knots_and_midpoints(|t| {
            let s = self.sigma.eval(t)?;
            Ok((s.d2 + self.spec.effective_frequency_sq(t)? * s.value - s.value.powi(-3)).abs())
        })
    }

    /// `sup |γ̈ + (Ω² − μ̈/μ)γ − F/μ|`, same sampling as [`Self::ermakov_residual`].
    pub fn gamma_residual(&self) -> Result<f64> {
        self.sup_over_knots_and_midpoints(|t| {
            let g = self.gamma.eval(t)?;
            let rhs = self.spec.force.value(t) / self.spec.mu(t)?[0];
            Ok((g.d2 + self.spec.effective_frequency_sq(t)? * g.value - rhs).abs())
        })
    }

    /// `max |τ(t) − τ_arctan(t)|` after anchoring both at `t0`.
    pub fn tau_arctan_deviation(&self) -> f64 {
        let reference = arctan_tau(&self.pair, &self.spec.ermakov);
        self.tau
            .values()
            .iter()
            .zip(&reference)
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max)
    }

    fn sup_over_knots_and_midpoints(&self, f: impl Fn(f64) -> Result<f64>) -> Result<f64> {
        let knots = self.knots();
        let mut sup: f64 = 0.0;
        for (k, &t) in knots.iter().enumerate() {
            sup = sup.max(f(t)?);
            if k + 1 < knots.len() {
                sup = sup.max(f(0.5 * (t + knots[k + 1]))?);
            }
        }
        Ok(sup)
    }

    /// Writes `t,q1,q2,sigma,gamma,tau,xi`, one row per knot.
    pub fn write_trajectory_csv<W: Write>(&self, mut w: W) -> io::Result<()> {
        writeln!(w, "t,q1,q2,sigma,gamma,tau,xi")?;
        let cols = [
            self.pair.q1.values(),
            self.pair.q2.values(),
            self.sigma.values(),
            self.gamma.values(),
            self.tau.values(),
            self.xi_eta.xi.values(),
        ];
        for (k, t) in self.knots().iter().enumerate() {
            write!(w, "{}", fmt_f64(*t))?;
            for c in &cols {
                write!(w, ",{}", fmt_f64(c[k]))?;
            }
            writeln!(w)?;
        }
        Ok(())
    }
}
