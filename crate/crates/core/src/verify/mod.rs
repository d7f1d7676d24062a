//! Numerical oracles for the closed-form solutions and the report that
//! collects them.

mod report;
mod splitstep;

pub use report::{Check, VerificationReport};
pub use splitstep::{splitstep_propagate, NORM_DRIFT_LIMIT};

use num_complex::Complex64;
use rand::rngs::StdRng;
use rand::seq::index::sample;
use rand::{Rng, SeedableRng};
use rayon::prelude::*;

use crate::ermakov::SolveOptions;
use crate::error::{Error, Result};
use crate::field::{SpaceGrid, Spectral, WaveField};
use crate::invariant::{
    eigen_residual, invariant_expectation_series, relative_drift, spectral_expectation,
};
use crate::pointmap::SolutionFamily;
use crate::scenario::ScenarioSpec;

/// `∫ f* g dx` by the trapezoid rule on the shared periodic grid.
pub fn inner_product(f: &WaveField, g: &WaveField) -> Result<Complex64> {
    if !f.same_support(g) {
        return Err(Error::GridMismatch);
    }
    f.check_decay()?;
    g.check_decay()?;
    let sum: Complex64 = f
        .values
        .iter()
        .zip(&g.values)
        .map(|(a, b)| a.conj() * b)
        .sum();
    Ok(sum * f.grid.dx())
}

/// Default half-width of the time stencil.
pub const TDSE_DELTA: f64 = 1e-3;

const STENCIL: [f64; 7] = [
    -1.0 / 60.0,
    3.0 / 20.0,
    -3.0 / 4.0,
    0.0,
    3.0 / 4.0,
    -3.0 / 20.0,
    1.0 / 60.0,
];

/// Relative Schrödinger residual of `ψ_n` at `t` with the default stencil.
pub fn tdse_residual(family: &SolutionFamily, n: usize, t: f64, grid: &SpaceGrid) -> Result<f64> {
    let mut state = vec![Complex64::new(0.0, 0.0); n + 1];
    state[n] = Complex64::new(1.0, 0.0);
    tdse_residual_state(family, &state, t, grid, TDSE_DELTA)
}

/// `‖iψ_t + ψ_xx/2m − mΩ²x²ψ/2 − Fxψ‖ / ‖ψ‖` for `ψ = Σ c_n ψ_n`, with `ψ_t`
/// from a sixth-order central difference of half-width `3δ` and `ψ_xx`
/// spectral.
pub fn tdse_residual_state(
    family: &SolutionFamily,
    state: &[Complex64],
    t: f64,
    grid: &SpaceGrid,
    delta: f64,
) -> Result<f64> {
    let (t0, t_end) = family.solution().range();
    let (lo, hi) = (t - 3.0 * delta, t + 3.0 * delta);
    if lo < t0 || hi > t_end || !(delta > 0.0) {
        return Err(Error::TimeStencil { lo, hi, t0, t_end });
    }
    let psi = family.eval_state(state, t, grid)?;
    let mut dt = psi.zeros_like();
    for (k, w) in STENCIL.iter().enumerate() {
        if *w == 0.0 {
            continue;
        }
        let shifted = family.eval_state(state, t + (k as f64 - 3.0) * delta, grid)?;
        for (d, v) in dt.values.iter_mut().zip(&shifted.values) {
            *d += v * (*w / delta);
        }
    }
    let (_, d2) = Spectral::new(*grid).derivatives(&psi.values);
    let spec = family.spec();
    let (m, w2, f) = (
        spec.mass.value(t),
        spec.frequency_sq.value(t),
        spec.force.value(t),
    );
    let i = Complex64::i();
    let mut r = psi.zeros_like();
    for (j, o) in r.values.iter_mut().enumerate() {
        let x = grid.x(j);
        let v = psi.values[j];
        *o = i * dt.values[j] + d2[j] / (2.0 * m) - (0.5 * m * w2 * x * x + f * x) * v;
    }
    Ok(r.norm() / psi.norm())
}

/// Least-squares slope of `ln y` against `ln x`.
pub fn loglog_slope(xs: &[f64], ys: &[f64]) -> f64 {
    let n = xs.len() as f64;
    let lx: Vec<f64> = xs.iter().map(|x| x.ln()).collect();
    let ly: Vec<f64> = ys.iter().map(|y| y.ln()).collect();
    let (mx, my) = (lx.iter().sum::<f64>() / n, ly.iter().sum::<f64>() / n);
    let cov: f64 = lx.iter().zip(&ly).map(|(a, b)| (a - mx) * (b - my)).sum();
    let var: f64 = lx.iter().map(|a| (a - mx).powi(2)).sum();
    cov / var
}

#[derive(Debug, Clone, PartialEq)]
pub struct Tolerances {
    pub orthonormality: f64,
    pub eigen: f64,
    pub conservation: f64,
    pub tdse: f64,
    pub ermakov: f64,
    pub wronskian: f64,
    pub tau_arctan: f64,
    pub transport: f64,
    pub splitstep: f64,
    pub tdse_slope: f64,
    pub splitstep_slope: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Self {
            orthonormality: 1e-8,
            eigen: 1e-6,
            conservation: 1e-6,
            tdse: 1e-6,
            ermakov: 1e-7,
            wronskian: 1e-8,
            tau_arctan: 1e-8,
            transport: 1e-8,
            splitstep: 1e-4,
            tdse_slope: 0.5,
            splitstep_slope: 0.3,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct VerifyOptions {
    /// Largest quantum number in the orthonormality and eigenvalue checks.
    pub n_max: usize,
    /// Largest quantum number in the Schrödinger residual checks.
    pub tdse_n_max: usize,
    /// Sample times; `None` picks five interior times.
    pub times: Option<Vec<f64>>,
    pub grid_points: usize,
    /// Explicit space grid; `None` uses the family's default with
    /// `grid_points` points.
    pub grid: Option<SpaceGrid>,
    pub ermakov: bool,
    pub orthonormality: bool,
    pub eigen: bool,
    pub conservation: bool,
    pub tdse: bool,
    pub tolerances: Tolerances,
    pub solve: SolveOptions,
    pub tdse_delta: f64,
    /// Stencil half-widths of the convergence study; empty disables it.
    pub tdse_slope_deltas: Vec<f64>,
    pub conservation_states: usize,
    pub conservation_samples: usize,
    pub seed: u64,
    pub splitstep: bool,
    pub splitstep_n: usize,
    /// End of the propagation; `None` means `min(t0 + 2, t_end)`.
    pub splitstep_t_end: Option<f64>,
    pub splitstep_dt: f64,
    /// Steps of the convergence study; empty disables it.
    pub splitstep_slope_dts: Vec<f64>,
    pub parallel: bool,
}

impl Default for VerifyOptions {
    fn default() -> Self {
        Self {
            n_max: 8,
            tdse_n_max: 4,
            times: None,
            grid_points: 1024,
            grid: None,
            ermakov: true,
            orthonormality: true,
            eigen: true,
            conservation: true,
            tdse: true,
            tolerances: Tolerances::default(),
            solve: SolveOptions::default(),
            tdse_delta: TDSE_DELTA,
            tdse_slope_deltas: vec![4e-2, 2e-2, 1e-2],
            conservation_states: 3,
            conservation_samples: 11,
            seed: 20_240_917,
            splitstep: true,
            splitstep_n: 1,
            splitstep_t_end: None,
            splitstep_dt: 5e-4,
            splitstep_slope_dts: vec![1e-3, 5e-4, 2.5e-4],
            parallel: true,
        }
    }
}

/// Five times at the centres of equal slices of `[t0, t_end]`.
pub fn default_times(spec: &ScenarioSpec) -> Vec<f64> {
    let span = spec.t_end - spec.t0;
    (0..5)
        .map(|k| spec.t0 + span * (k as f64 + 0.5) / 5.0)
        .collect()
}

/// Random normalized superpositions of four distinct `ψ_n`, `n ≤ n_max`.
pub fn random_states(count: usize, n_max: usize, seed: u64) -> Vec<Vec<Complex64>> {
    let mut rng = StdRng::seed_from_u64(seed);
    (0..count)
        .map(|_| {
            let mut c = vec![Complex64::new(0.0, 0.0); n_max + 1];
            for n in sample(&mut rng, n_max + 1, 4.min(n_max + 1)) {
                c[n] = Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0));
            }
            let norm = c.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
            c.iter().map(|z| z / norm).collect()
        })
        .collect()
}

fn fmt_state(state: &[Complex64]) -> String {
    let terms: Vec<String> = state
        .iter()
        .enumerate()
        .filter(|(_, c)| c.norm() > 0.0)
        .map(|(n, c)| format!("{:.4}{:+.4}i·ψ{n}", c.re, c.im))
        .collect();
    terms.join(" + ")
}

type Job<'a> = Box<dyn Fn() -> Vec<Check> + Send + Sync + 'a>;

/// Runs every check on one scenario. Failures to evaluate are recorded as
/// failed checks.
pub fn run_full_verification(spec: &ScenarioSpec, opts: &VerifyOptions) -> VerificationReport {
    let scenario = spec.name.clone();
    let n_cap = opts.n_max.max(opts.tdse_n_max).max(opts.splitstep_n).max(3);
    let family = match SolutionFamily::solve(spec, &opts.solve) {
        Ok(f) => f.with_n_max(n_cap),
        Err(e) => {
            let mut report = VerificationReport::new(&scenario);
            report.push(Check::error("solve", &scenario, &e));
            return report;
        }
    };
    let grid = match opts
        .grid
        .map_or_else(|| family.default_grid(opts.grid_points), Ok)
    {
        Ok(g) => g,
        Err(e) => {
            let mut report = VerificationReport::new(&scenario);
            report.push(Check::error("grid", &scenario, &e));
            return report;
        }
    };
    let times = opts.times.clone().unwrap_or_else(|| default_times(spec));
    let tol = &opts.tolerances;
    let family = &family;
    let grid = &grid;
    let ctx = |extra: String| format!("{scenario} {extra}").trim_end().to_string();

    let mut jobs: Vec<Job> = Vec::new();

    if opts.ermakov {
        jobs.push(Box::new(|| {
            let sol = family.solution();
            let c = ctx(String::new());
            vec![
                Check::from_result("ermakov_residual", sol.ermakov_residual(), tol.ermakov, &c),
                Check::at_most(
                    "wronskian_deviation",
                    sol.pair.wronskian_deviation(),
                    tol.wronskian,
                    &c,
                ),
                Check::at_most(
                    "tau_arctan_deviation",
                    sol.tau_arctan_deviation(),
                    tol.tau_arctan,
                    &c,
                ),
                Check::from_result("gamma_residual", sol.gamma_residual(), tol.ermakov, &c),
                Check::from_result(
                    "invariant_transport",
                    family
                        .invariant_track()
                        .and_then(|t| t.closed_form_deviation(family)),
                    tol.transport,
                    &c,
                ),
            ]
        }));
    }

    for &t in &times {
        let ctx = &ctx;
        if opts.orthonormality {
            jobs.push(Box::new(move || {
                let c = ctx(format!("t={t}"));
                vec![Check::from_result(
                    "orthonormality",
                    orthonormality_deviation(family, opts.n_max, t, grid),
                    tol.orthonormality,
                    &c,
                )]
            }));
        }
        for n in (0..=opts.n_max).filter(|_| opts.eigen) {
            jobs.push(Box::new(move || {
                let c = ctx(format!("n={n} t={t}"));
                vec![Check::from_result(
                    "eigen_residual",
                    eigen_residual(family, n, t, grid),
                    tol.eigen,
                    &c,
                )]
            }));
        }
        for n in (0..=opts.tdse_n_max).filter(|_| opts.tdse) {
            jobs.push(Box::new(move || {
                let mut state = vec![Complex64::new(0.0, 0.0); n + 1];
                state[n] = Complex64::new(1.0, 0.0);
                let c = ctx(format!("n={n} t={t}"));
                let r = tdse_residual_state(family, &state, t, grid, opts.tdse_delta);
                vec![Check::from_result("tdse_residual", r, tol.tdse, &c)]
            }));
        }
    }

    if opts.tdse && opts.tdse_slope_deltas.len() >= 2 {
        let ctx = &ctx;
        jobs.push(Box::new(move || {
            let n = opts.tdse_n_max;
            let t = 0.5 * (spec.t0 + spec.t_end);
            let c = ctx(format!("n={n} t={t} target=6"));
            let mut state = vec![Complex64::new(0.0, 0.0); n + 1];
            state[n] = Complex64::new(1.0, 0.0);
            let residuals: Result<Vec<f64>> = opts
                .tdse_slope_deltas
                .iter()
                .map(|&d| tdse_residual_state(family, &state, t, grid, d))
                .collect();
            vec![match residuals {
                Ok(r) => Check::within(
                    "tdse_time_slope",
                    loglog_slope(&opts.tdse_slope_deltas, &r),
                    6.0,
                    tol.tdse_slope,
                    &c,
                ),
                Err(e) => Check::error("tdse_time_slope", &c, &e),
            }]
        }));
    }

    let span = spec.t_end - spec.t0;
    let series_times: Vec<f64> = (0..opts.conservation_samples)
        .map(|k| spec.t0 + span * k as f64 / (opts.conservation_samples.max(2) - 1) as f64)
        .collect();
    let count = if opts.conservation {
        opts.conservation_states
    } else {
        0
    };
    let states = random_states(count, opts.n_max.max(3), opts.seed);
    for state in states {
        let ctx = &ctx;
        let series_times = series_times.clone();
        jobs.push(Box::new(move || {
            let c = ctx(format!("state={}", fmt_state(&state)));
            match invariant_expectation_series(family, &state, &series_times, grid) {
                Ok(series) => {
                    let expected = spectral_expectation(&state);
                    let value_error = series
                        .iter()
                        .map(|s| (s - expected).abs())
                        .fold(0.0, f64::max);
                    vec![
                        Check::at_most(
                            "invariant_drift",
                            relative_drift(&series),
                            tol.conservation,
                            &c,
                        ),
                        Check::at_most("invariant_value", value_error, tol.conservation, &c),
                    ]
                }
                Err(e) => vec![Check::error("invariant_drift", &c, &e)],
            }
        }));
    }

    if opts.splitstep {
        let ctx = &ctx;
        let t_end = opts
            .splitstep_t_end
            .unwrap_or((spec.t0 + 2.0).min(spec.t_end));
        jobs.push(Box::new(move || {
            let n = opts.splitstep_n;
            let c = ctx(format!("n={n} t_end={t_end} dt={}", opts.splitstep_dt));
            vec![Check::from_result(
                "splitstep_error",
                splitstep_error(family, n, t_end, opts.splitstep_dt, grid),
                tol.splitstep,
                &c,
            )]
        }));
        if opts.splitstep_slope_dts.len() >= 2 {
            jobs.push(Box::new(move || {
                let n = opts.splitstep_n;
                let c = ctx(format!("n={n} t_end={t_end} target=2"));
                let errors: Result<Vec<f64>> = opts
                    .splitstep_slope_dts
                    .iter()
                    .map(|&dt| splitstep_error(family, n, t_end, dt, grid))
                    .collect();
                vec![match errors {
                    Ok(e) => Check::within(
                        "splitstep_slope",
                        loglog_slope(&opts.splitstep_slope_dts, &e),
                        2.0,
                        tol.splitstep_slope,
                        &c,
                    ),
                    Err(e) => Check::error("splitstep_slope", &c, &e),
                }]
            }));
        }
    }

    let results: Vec<Vec<Check>> = if opts.parallel {
        jobs.par_iter().map(|job| job()).collect()
    } else {
        jobs.iter().map(|job| job()).collect()
    };
    let mut report = VerificationReport::new(&scenario);
    for check in results.into_iter().flatten() {
        report.push(check);
    }
    report
}

/// `max_{m,n ≤ n_max} |⟨ψ_m(t)|ψ_n(t)⟩ − δ_mn|`.
pub fn orthonormality_deviation(
    family: &SolutionFamily,
    n_max: usize,
    t: f64,
    grid: &SpaceGrid,
) -> Result<f64> {
    let fields = (0..=n_max)
        .map(|n| family.eval_psi_n(n, t, grid))
        .collect::<Result<Vec<_>>>()?;
    let mut sup: f64 = 0.0;
    for (m, f) in fields.iter().enumerate() {
        for (n, g) in fields.iter().enumerate().skip(m) {
            let delta = if m == n { 1.0 } else { 0.0 };
            sup = sup.max((inner_product(f, g)? - delta).norm());
        }
    }
    Ok(sup)
}

/// L² distance between `ψ_n(t_end)` propagated by split-step from `t0` and
/// the closed form.
pub fn splitstep_error(
    family: &SolutionFamily,
    n: usize,
    t_end: f64,
    dt: f64,
    grid: &SpaceGrid,
) -> Result<f64> {
    let t0 = family.spec().t0;
    let initial = family.eval_psi_n(n, t0, grid)?;
    let numeric = splitstep_propagate(&initial, family.spec(), t_end, dt)?;
    let exact = family.eval_psi_n(n, t_end, grid)?;
    let mut diff = exact.zeros_like();
    for (d, (a, b)) in diff
        .values
        .iter_mut()
        .zip(numeric.values.iter().zip(&exact.values))
    {
        *d = a - b;
    }
    Ok(diff.norm())
}
