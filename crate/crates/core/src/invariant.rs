//! The invariant operator
//!
//! ```text
//! Î(t) = c_pp p² + c_xx x² + c_mix (xp + px) + c_p p + c_x x + c_0
//! ```
//!
//! whose eigenfunctions are the `φ_n` of [`crate::pointmap`] with eigenvalues
//! `n + 1/2`.
//!
//! Besides the closed-form coefficients this module carries an
//! [`InvariantTrack`]: the same operator transported from `t0` by the
//! conservation law `∂Î/∂t + i[Ĥ, Î] = 0`, which for a quadratic operator is a
//! linear ODE in the six coefficients. It only depends on `m`, `Ω²` and `F`,
//! so comparing it with the closed form (or applying it to `φ_n`) checks the
//! auxiliary functions independently of how they were built.

use num_complex::Complex64;

use crate::ermakov::ErmakovFrame;
use crate::error::{Error, Result};
use crate::field::{Spectral, WaveField};
use crate::ode::Dopri5;
use crate::pointmap::SolutionFamily;
use crate::sampled::SampledFunction;
use crate::verify::inner_product;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct InvariantCoeffs {
    pub c_pp: f64,
    pub c_xx: f64,
    pub c_mix: f64,
    pub c_p: f64,
    pub c_x: f64,
    pub c_0: f64,
}

impl InvariantCoeffs {
    pub fn to_array(&self) -> [f64; 6] {
        [
            self.c_pp, self.c_mix, self.c_xx, self.c_p, self.c_x, self.c_0,
        ]
    }

    pub fn from_array([c_pp, c_mix, c_xx, c_p, c_x, c_0]: [f64; 6]) -> Self {
        Self {
            c_pp,
            c_xx,
            c_mix,
            c_p,
            c_x,
            c_0,
        }
    }

    /// `c_pp c_xx − c_mix²`, equal to `1/4` for every closed-form frame.
    pub fn determinant(&self) -> f64 {
        self.c_pp * self.c_xx - self.c_mix * self.c_mix
    }
}

pub fn invariant_coeffs(f: &ErmakovFrame) -> InvariantCoeffs {
    let r = f.mu / f.sigma;
    InvariantCoeffs {
        c_pp: 0.5 / (r * r),
        c_xx: 0.5 * (f.w_mu * f.w_mu + r * r),
        c_mix: f.w_mu / (2.0 * r),
        c_p: f.w_gamma / r,
        c_x: f.w_mu * f.w_gamma + r * f.gamma / f.sigma,
        c_0: 0.5 * (f.w_gamma * f.w_gamma + (f.gamma / f.sigma).powi(2)),
    }
}

/// `Îψ` with spectral derivatives. The field must decay at the grid edges.
pub fn apply_invariant(coeffs: &InvariantCoeffs, field: &WaveField) -> Result<WaveField> {
    apply_invariant_with(&Spectral::new(field.grid), coeffs, field)
}

pub fn apply_invariant_with(
    spectral: &Spectral,
    coeffs: &InvariantCoeffs,
    field: &WaveField,
) -> Result<WaveField> {
    if spectral.grid() != &field.grid {
        return Err(Error::GridMismatch);
    }
    field.check_decay()?;
    let (d1, d2) = spectral.derivatives(&field.values);
    let i = Complex64::i();
    let mut out = field.zeros_like();
    for (j, o) in out.values.iter_mut().enumerate() {
        let x = field.grid.x(j);
        let v = field.values[j];
        *o = -coeffs.c_pp * d2[j] + (coeffs.c_xx * x * x + coeffs.c_x * x + coeffs.c_0) * v
            - i * coeffs.c_mix * (2.0 * x * d1[j] + v)
            - i * coeffs.c_p * d1[j];
    }
    Ok(out)
}

/// Right-hand side of the transport law for `[c_pp, c_mix, c_xx, c_p, c_x, c_0]`.
fn transport_rhs(m: f64, omega_sq: f64, force: f64, c: &[f64; 6]) -> [f64; 6] {
    let [a, b, cc, d, e, _] = *c;
    let k = m * omega_sq;
    [
        -2.0 * b / m,
        a * k - cc / m,
        2.0 * b * k,
        2.0 * a * force - e / m,
        2.0 * b * force + d * k,
        d * force,
    ]
}

/// The invariant transported from `t0` on the solution's knots.
#[derive(Debug, Clone)]
pub struct InvariantTrack {
    coeffs: [SampledFunction; 6],
}

impl InvariantTrack {
    /// Starts from the closed-form coefficients at `t0`.
    pub fn build(family: &SolutionFamily) -> Result<Self> {
        let spec = family.spec();
        let knots = family.solution().knots().to_vec();
        let start = invariant_coeffs(&family.frame_at(knots[0])?).to_array();
        let rhs = |t: f64, c: &[f64; 6]| -> Result<[f64; 6]> {
            let m = spec.mass.value(t);
            if m <= 0.0 {
                return Err(Error::NonPositiveMass { t, mass: m });
            }
            Ok(transport_rhs(
                m,
                spec.frequency_sq.value(t),
                spec.force.value(t),
                c,
            ))
        };
        let states = Dopri5::default().integrate(rhs, knots[0], start, &knots)?;
        let mut derivs = Vec::with_capacity(knots.len());
        for (t, s) in knots.iter().zip(&states) {
            derivs.push(rhs(*t, s)?);
        }
        let column = |k: usize| -> Result<SampledFunction> {
            SampledFunction::with_derivative(
                knots.clone(),
                states.iter().map(|s| s[k]).collect(),
                derivs.iter().map(|d| d[k]).collect(),
            )
        };
        Ok(Self {
            coeffs: [
                column(0)?,
                column(1)?,
                column(2)?,
                column(3)?,
                column(4)?,
                column(5)?,
            ],
        })
    }

    pub fn coeffs_at(&self, t: f64) -> Result<InvariantCoeffs> {
        let mut c = [0.0; 6];
        for (slot, f) in c.iter_mut().zip(&self.coeffs) {
            *slot = f.value(t)?;
        }
        Ok(InvariantCoeffs::from_array(c))
    }

    /// Largest deviation from the closed-form coefficients over the knots,
    /// relative to the largest coefficient at each knot.
    pub fn closed_form_deviation(&self, family: &SolutionFamily) -> Result<f64> {
        let mut sup: f64 = 0.0;
        for (k, &t) in self.coeffs[0].knots().iter().enumerate() {
            let closed = invariant_coeffs(&family.frame_at(t)?).to_array();
            let scale = closed.iter().fold(1.0_f64, |m, c| m.max(c.abs()));
            for (j, c) in closed.iter().enumerate() {
                sup = sup.max((self.coeffs[j].values()[k] - c).abs() / scale);
            }
        }
        Ok(sup)
    }
}

/// `‖Î φ_n − (n + 1/2) φ_n‖ / ‖φ_n‖` on `grid`, with `Î` the transported
/// invariant.
pub fn eigen_residual(
    family: &SolutionFamily,
    n: usize,
    t: f64,
    grid: &crate::field::SpaceGrid,
) -> Result<f64> {
    let coeffs = family.invariant_track()?.coeffs_at(t)?;
    let phi = family.eval_varphi_n(n, t, grid)?;
    relative_eigen_residual(&coeffs, &phi, n as f64 + 0.5)
}

/// `‖Îψ − λψ‖ / ‖ψ‖`.
pub fn relative_eigen_residual(
    coeffs: &InvariantCoeffs,
    field: &WaveField,
    lambda: f64,
) -> Result<f64> {
    let mut r = apply_invariant(coeffs, field)?;
    for (o, v) in r.values.iter_mut().zip(&field.values) {
        *o -= lambda * v;
    }
    Ok(r.norm() / field.norm())
}

/// `⟨ψ(t)|Î(t)|ψ(t)⟩` for `ψ = Σ c_n ψ_n` at each time.
pub fn invariant_expectation_series(
    family: &SolutionFamily,
    state: &[Complex64],
    times: &[f64],
    grid: &crate::field::SpaceGrid,
) -> Result<Vec<f64>> {
    let spectral = Spectral::new(*grid);
    times
        .iter()
        .map(|&t| {
            let psi = family.eval_state(state, t, grid)?;
            let coeffs = invariant_coeffs(&family.frame_at(t)?);
            let ipsi = apply_invariant_with(&spectral, &coeffs, &psi)?;
            Ok(inner_product(&psi, &ipsi)?.re)
        })
        .collect()
}

/// `max |s − mean| / |mean|`.
pub fn relative_drift(series: &[f64]) -> f64 {
    if series.is_empty() {
        return 0.0;
    }
    let mean = series.iter().sum::<f64>() / series.len() as f64;
    series.iter().map(|s| (s - mean).abs()).fold(0.0, f64::max) / mean.abs()
}

/// `Σ |c_n|² (n + 1/2)`.
pub fn spectral_expectation(state: &[Complex64]) -> f64 {
    state
        .iter()
        .enumerate()
        .map(|(n, c)| c.norm_sqr() * (n as f64 + 0.5))
        .sum()
}
