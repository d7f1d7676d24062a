//! Adaptive Dormand–Prince 5(4) integration onto a prescribed set of output
//! times.
//!
//! Steps are clamped so that every output time is hit exactly; between
//! output times the step size is controlled by the embedded fourth-order
//! error estimate.

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Dopri5 {
    pub rtol: f64,
    pub atol: f64,
    /// Smallest admissible step relative to `max(1, |t|)`.
    pub min_step: f64,
    pub max_steps: usize,
}

impl Default for Dopri5 {
    fn default() -> Self {
        Self {
            rtol: 1e-10,
            atol: 1e-10,
            min_step: 1e-13,
            max_steps: 5_000_000,
        }
    }
}

const C2: f64 = 1.0 / 5.0;
const C3: f64 = 3.0 / 10.0;
const C4: f64 = 4.0 / 5.0;
const C5: f64 = 8.0 / 9.0;

const A21: f64 = 1.0 / 5.0;
const A31: f64 = 3.0 / 40.0;
const A32: f64 = 9.0 / 40.0;
const A41: f64 = 44.0 / 45.0;
const A42: f64 = -56.0 / 15.0;
const A43: f64 = 32.0 / 9.0;
const A51: f64 = 19372.0 / 6561.0;
const A52: f64 = -25360.0 / 2187.0;
const A53: f64 = 64448.0 / 6561.0;
const A54: f64 = -212.0 / 729.0;
const A61: f64 = 9017.0 / 3168.0;
const A62: f64 = -355.0 / 33.0;
const A63: f64 = 46732.0 / 5247.0;
const A64: f64 = 49.0 / 176.0;
const A65: f64 = -5103.0 / 18656.0;

const B1: f64 = 35.0 / 384.0;
const B3: f64 = 500.0 / 1113.0;
const B4: f64 = 125.0 / 192.0;
const B5: f64 = -2187.0 / 6784.0;
const B6: f64 = 11.0 / 84.0;

// fifth-order minus fourth-order weights
const E1: f64 = 71.0 / 57600.0;
const E3: f64 = -71.0 / 16695.0;
const E4: f64 = 71.0 / 1920.0;
const E5: f64 = -17253.0 / 339200.0;
const E6: f64 = 22.0 / 525.0;
const E7: f64 = -1.0 / 40.0;

fn axpy<const N: usize>(y: &[f64; N], terms: &[(f64, &[f64; N])]) -> [f64; N] {
    let mut out = *y;
    for (c, k) in terms {
        for i in 0..N {
            out[i] += c * k[i];
        }
    }
    out
}

impl Dopri5 {
    /// Integrates `y' = f(t, y)` from `(t0, y0)` and returns the state at every
    /// entry of `outputs`, which must be non-decreasing and start at or after
    /// `t0`.
    pub fn integrate<const N: usize, F>(
        &self,
        mut f: F,
        t0: f64,
        y0: [f64; N],
        outputs: &[f64],
    ) -> Result<Vec<[f64; N]>>
    where
        F: FnMut(f64, &[f64; N]) -> Result<[f64; N]>,
    {
        let mut out = Vec::with_capacity(outputs.len());
        let mut t = t0;
        let mut y = y0;
        let mut k1 = f(t, &y)?;
        let mut h = self.initial_step(t, &y, &k1, outputs.last().copied().unwrap_or(t0) - t0);
        let mut steps = 0usize;

        for &target in outputs {
            if target < t {
                return Err(Error::Integrator {
                    last_good_t: t,
                    reason: format!("output time {target} precedes current time"),
                });
            }
            while t < target {
                steps += 1;
                if steps > self.max_steps {
                    return Err(Error::Integrator {
                        last_good_t: t,
                        reason: "step budget exhausted".into(),
                    });
                }
                let remaining = target - t;
                let last = h >= remaining;
                let step = if last { remaining } else { h };
                if step < self.min_step * t.abs().max(1.0) && !last {
                    return Err(Error::Integrator {
                        last_good_t: t,
                        reason: format!("step size underflow (h = {step:e})"),
                    });
                }

                let y2 = axpy(&y, &[(step * A21, &k1)]);
                let k2 = f(t + C2 * step, &y2)?;
                let y3 = axpy(&y, &[(step * A31, &k1), (step * A32, &k2)]);
                let k3 = f(t + C3 * step, &y3)?;
                let y4 = axpy(
                    &y,
                    &[(step * A41, &k1), (step * A42, &k2), (step * A43, &k3)],
                );
                let k4 = f(t + C4 * step, &y4)?;
                let y5 = axpy(
                    &y,
                    &[
                        (step * A51, &k1),
                        (step * A52, &k2),
                        (step * A53, &k3),
                        (step * A54, &k4),
                    ],
                );
                let k5 = f(t + C5 * step, &y5)?;
                let y6 = axpy(
                    &y,
                    &[
                        (step * A61, &k1),
                        (step * A62, &k2),
                        (step * A63, &k3),
                        (step * A64, &k4),
                        (step * A65, &k5),
                    ],
                );
                let t_new = if last { target } else { t + step };
                let k6 = f(t + step, &y6)?;
                let y_new = axpy(
                    &y,
                    &[
                        (step * B1, &k1),
                        (step * B3, &k3),
                        (step * B4, &k4),
                        (step * B5, &k5),
                        (step * B6, &k6),
                    ],
                );
                let k7 = f(t_new, &y_new)?;

                let mut err = 0.0;
                for i in 0..N {
                    let e = step
                        * (E1 * k1[i]
                            + E3 * k3[i]
                            + E4 * k4[i]
                            + E5 * k5[i]
                            + E6 * k6[i]
                            + E7 * k7[i]);
                    let sc = self.atol + self.rtol * y[i].abs().max(y_new[i].abs());
                    err += (e / sc).powi(2);
                }
                let err = (err / N as f64).sqrt();
                if !err.is_finite() {
                    return Err(Error::Integrator {
                        last_good_t: t,
                        reason: "non-finite state".into(),
                    });
                }

                let factor = if err == 0.0 {
                    5.0
                } else {
                    (0.9 * err.powf(-0.2)).clamp(0.2, 5.0)
                };
                if err <= 1.0 {
                    t = t_new;
                    y = y_new;
                    k1 = k7;
                    // a clamped final step says nothing about the natural size
                    if !last || factor < 1.0 {
                        h = step * factor;
                    }
                } else {
                    h = step * factor.min(1.0);
                }
            }
            out.push(y);
        }
        Ok(out)
    }

    fn initial_step<const N: usize>(&self, t: f64, y: &[f64; N], dy: &[f64; N], span: f64) -> f64 {
        let scale = |i: usize| self.atol + self.rtol * y[i].abs();
        let d0 = (0..N)
            .map(|i| (y[i] / scale(i)).powi(2))
            .sum::<f64>()
            .sqrt();
        let d1 = (0..N)
            .map(|i| (dy[i] / scale(i)).powi(2))
            .sum::<f64>()
            .sqrt();
        let h = if d0 < 1e-5 || d1 < 1e-5 {
            1e-6
        } else {
            0.01 * d0 / d1
        };
        let cap = if span > 0.0 { span } else { 1.0 };
        h.min(cap).max(self.min_step * t.abs().max(1.0) * 10.0)
    }
}
