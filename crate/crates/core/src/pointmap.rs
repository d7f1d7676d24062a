//! The point transformation `(x, t, ψ) → (y, τ, Ψ)` and the solution family
//! it produces.
//!
//! With `y = (μx + γ)/σ` and `τ = ∫dt/σ²`, every stationary solution `Ψ(y, τ)`
//! maps to
//!
//! ```text
//! ψ(x, t) = exp[−i(μ/σ)(W_μ x²/2 + W_γ x) − iξ] · √(μ/σ) · Ψ(y(x, t), τ(t))
//! ```
//!
//! which is `A⁻¹Ψ` with the complex constant `η` resolved into the real phase
//! `ξ` and the amplitude `√(μ/σ)`. Taking `Ψ = Ψ_n` gives the orthonormal
//! family `ψ_n = e^{−i(n+1/2)τ} φ_n`.

use std::sync::{Arc, OnceLock};

use num_complex::Complex64;

use crate::ermakov::{ErmakovFrame, ErmakovSolution, SolveOptions};
use crate::error::{Error, Result};
use crate::field::{SpaceGrid, WaveField};
use crate::invariant::InvariantTrack;
use crate::scenario::ScenarioSpec;
use crate::stationary::{phi_n_capped, N_MAX};

/// `(y, τ)` for the point `x` at the frame's time.
pub fn map_coordinates(frame: &ErmakovFrame, x: f64) -> (f64, f64) {
    ((frame.mu * x + frame.gamma) / frame.sigma, frame.tau)
}

/// `A(x, t) = exp[i(μ/σ)(W_μ x²/2 + W_γ x + η)]`.
pub fn gauge_factor(frame: &ErmakovFrame, x: f64) -> Complex64 {
    let r = frame.mu / frame.sigma;
    let arg = Complex64::new(frame.w_mu * x * x / 2.0 + frame.w_gamma * x, 0.0) + frame.eta();
    (Complex64::i() * r * arg).exp()
}

/// `φ_n(x, t)`, the eigenfunction of the invariant without the `τ` phase.
pub fn varphi_at(frame: &ErmakovFrame, n: usize, x: f64) -> Result<Complex64> {
    let r = frame.mu / frame.sigma;
    let (y, _) = map_coordinates(frame, x);
    let phase = -r * (frame.w_mu * x * x / 2.0 + frame.w_gamma * x) - frame.xi;
    Ok(Complex64::from_polar(
        r.sqrt() * phi_n_capped(n, y, N_MAX)?,
        phase,
    ))
}

/// `ψ_n(x, t) = e^{−i(n+1/2)τ} φ_n(x, t)`.
pub fn psi_at(frame: &ErmakovFrame, n: usize, x: f64) -> Result<Complex64> {
    Ok(lr_phase(frame, n) * varphi_at(frame, n, x)?)
}

fn lr_phase(frame: &ErmakovFrame, n: usize) -> Complex64 {
    Complex64::from_polar(1.0, -(n as f64 + 0.5) * frame.tau)
}

/// The orthonormal family `{ψ_n}` of one scenario.
pub struct SolutionFamily {
    solution: Arc<ErmakovSolution>,
    pub n_max: usize,
    track: OnceLock<Result<InvariantTrack>>,
}

impl SolutionFamily {
    pub fn new(solution: Arc<ErmakovSolution>, n_max: usize) -> Self {
        Self {
            solution,
            n_max,
            track: OnceLock::new(),
        }
    }

    /// Solves the auxiliary equations and wraps them with `n_max = 16`.
    pub fn solve(spec: &ScenarioSpec, opts: &SolveOptions) -> Result<Self> {
        Ok(Self::new(Arc::new(ErmakovSolution::solve(spec, opts)?), 16))
    }

    pub fn with_n_max(mut self, n_max: usize) -> Self {
        self.n_max = n_max;
        self
    }

    pub fn solution(&self) -> &ErmakovSolution {
        &self.solution
    }

    pub fn spec(&self) -> &ScenarioSpec {
        &self.solution.spec
    }

    pub fn frame_at(&self, t: f64) -> Result<ErmakovFrame> {
        self.solution.frame_at(t)
    }

    /// The invariant transported from `t0` by its conservation law, built on
    /// first use.
    pub fn invariant_track(&self) -> Result<&InvariantTrack> {
        self.track
            .get_or_init(|| InvariantTrack::build(self))
            .as_ref()
            .map_err(Clone::clone)
    }

    /// `±(12 σ_max/μ_min + max|γ|/μ_min)` with `n` points.
    pub fn default_grid(&self, n: usize) -> Result<SpaceGrid> {
        let sol = &self.solution;
        let mut sigma_max: f64 = 0.0;
        let mut mu_min = f64::INFINITY;
        let mut gamma_max: f64 = 0.0;
        for (k, &t) in sol.knots().iter().enumerate() {
            sigma_max = sigma_max.max(sol.sigma.values()[k]);
            gamma_max = gamma_max.max(sol.gamma.values()[k].abs());
            mu_min = mu_min.min(sol.spec.mu(t)?[0]);
        }
        SpaceGrid::symmetric(12.0 * sigma_max / mu_min + gamma_max / mu_min, n)
    }

    fn check_n(&self, n: usize) -> Result<()> {
        if n > self.n_max {
            return Err(Error::HermiteCap { n, cap: self.n_max });
        }
        Ok(())
    }

    fn field(
        &self,
        t: f64,
        grid: &SpaceGrid,
        f: impl Fn(&ErmakovFrame, f64) -> Result<Complex64>,
    ) -> Result<WaveField> {
        let frame = self.frame_at(t)?;
        let values = grid
            .points()
            .into_iter()
            .map(|x| f(&frame, x))
            .collect::<Result<Vec<_>>>()?;
        let field = WaveField::new(*grid, values, t)?;
        field.check_decay()?;
        Ok(field)
    }

    pub fn eval_psi_n(&self, n: usize, t: f64, grid: &SpaceGrid) -> Result<WaveField> {
        self.check_n(n)?;
        self.field(t, grid, |frame, x| psi_at(frame, n, x))
    }

    pub fn eval_varphi_n(&self, n: usize, t: f64, grid: &SpaceGrid) -> Result<WaveField> {
        self.check_n(n)?;
        self.field(t, grid, |frame, x| varphi_at(frame, n, x))
    }

    /// `Σ c_n ψ_n(x, t)` with `coeffs[n] = c_n`.
    pub fn eval_state(&self, coeffs: &[Complex64], t: f64, grid: &SpaceGrid) -> Result<WaveField> {
        if coeffs.is_empty() {
            return Err(Error::InvalidParameter {
                name: "coeffs".into(),
                reason: "empty superposition".into(),
            });
        }
        self.check_n(coeffs.len() - 1)?;
        self.field(t, grid, |frame, x| {
            let mut acc = Complex64::new(0.0, 0.0);
            for (n, c) in coeffs.iter().enumerate() {
                if *c != Complex64::new(0.0, 0.0) {
                    acc += c * psi_at(frame, n, x)?;
                }
            }
            Ok(acc)
        })
    }
}

/// Pointwise linear combination of fields sharing one grid and time.
pub fn superpose(coeffs: &[Complex64], fields: &[WaveField]) -> Result<WaveField> {
    let first = fields.first().ok_or(Error::GridMismatch)?;
    if coeffs.len() != fields.len() || fields.iter().any(|f| !f.same_support(first)) {
        return Err(Error::GridMismatch);
    }
    let mut out = first.zeros_like();
    for (c, f) in coeffs.iter().zip(fields) {
        for (o, v) in out.values.iter_mut().zip(&f.values) {
            *o += c * v;
        }
    }
    Ok(out)
}
