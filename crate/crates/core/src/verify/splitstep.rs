//! Strang split-step Fourier propagation of `i ψ_t = Ĥ(t) ψ`.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::field::{Spectral, WaveField};
use crate::scenario::ScenarioSpec;

/// Largest tolerated change of the norm before a run is declared unstable.
pub const NORM_DRIFT_LIMIT: f64 = 1e-4;

/// Propagates `initial` from its time stamp to `t_end` with steps of at most
/// `dt`. Each step is `K(dt/2) V(dt) K(dt/2)` with `m`, `Ω²` and `F` taken at
/// the step midpoint.
pub fn splitstep_propagate(
    initial: &WaveField,
    spec: &ScenarioSpec,
    t_end: f64,
    dt: f64,
) -> Result<WaveField> {
    let span = t_end - initial.t;
    if !(dt > 0.0) || !(span >= 0.0) {
        return Err(Error::InvalidParameter {
            name: "dt".into(),
            reason: format!(
                "need dt > 0 and t_end ≥ {} (got dt = {dt}, t_end = {t_end})",
                initial.t
            ),
        });
    }
    let steps = (span / dt).ceil() as usize;
    let h = if steps == 0 { 0.0 } else { span / steps as f64 };
    let grid = initial.grid;
    let spectral = Spectral::new(grid);
    let k2: Vec<f64> = spectral.wavenumbers().iter().map(|k| k * k).collect();
    let xs = grid.points();
    let norm0 = initial.norm();

    let mut psi = initial.values.clone();
    for step in 0..steps {
        let tm = initial.t + (step as f64 + 0.5) * h;
        let m = spec.mass.value(tm);
        if m <= 0.0 {
            return Err(Error::NonPositiveMass { t: tm, mass: m });
        }
        let (w2, f) = (spec.frequency_sq.value(tm), spec.force.value(tm));
        let kinetic = |psi: &mut Vec<Complex64>| {
            spectral.forward(psi);
            for (v, k) in psi.iter_mut().zip(&k2) {
                *v *= Complex64::from_polar(1.0, -h * k / (4.0 * m));
            }
            spectral.inverse(psi);
        };
        kinetic(&mut psi);
        for (v, x) in psi.iter_mut().zip(&xs) {
            *v *= Complex64::from_polar(1.0, -h * (0.5 * m * w2 * x * x + f * x));
        }
        kinetic(&mut psi);
        let t = initial.t + (step + 1) as f64 * h;

        let norm = (psi.iter().map(|v| v.norm_sqr()).sum::<f64>() * grid.dx()).sqrt();
        let drift = (norm - norm0).abs();
        if drift > NORM_DRIFT_LIMIT || !norm.is_finite() {
            return Err(Error::Unstable { t, drift });
        }
    }
    WaveField::new(grid, psi, if steps == 0 { initial.t } else { t_end })
}
