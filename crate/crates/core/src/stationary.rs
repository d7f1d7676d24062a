//! Reference solutions of the stationary oscillator `H = p²/2 + y²/2`.

use num_complex::Complex64;

use crate::error::{Error, Result};

/// Default cap on the Hermite order.
pub const N_MAX: usize = 64;

/// Quantum number with its energy `n + 1/2`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StationaryState {
    pub n: usize,
    pub energy: f64,
}

impl StationaryState {
    pub fn new(n: usize) -> Self {
        Self {
            n,
            energy: n as f64 + 0.5,
        }
    }
}

/// Physicists' Hermite polynomial `H_n(z)` by the three-term recurrence.
pub fn hermite_eval(n: usize, z: f64) -> Result<f64> {
    hermite_eval_capped(n, z, N_MAX)
}

pub fn hermite_eval_capped(n: usize, z: f64, cap: usize) -> Result<f64> {
    if n > cap {
        return Err(Error::HermiteCap { n, cap });
    }
    let (mut h0, mut h1) = (1.0, 2.0 * z);
    if n == 0 {
        return Ok(h0);
    }
    for k in 1..n {
        let h2 = 2.0 * z * h1 - 2.0 * k as f64 * h0;
        h0 = h1;
        h1 = h2;
    }
    Ok(h1)
}

/// `ln(2ⁿ n! √π) / 2`, the log of the Hermite-function normalization.
fn log_norm(n: usize) -> f64 {
    let ln_fact: f64 = (2..=n).map(|k| (k as f64).ln()).sum();
    0.5 * (n as f64 * std::f64::consts::LN_2 + ln_fact + 0.5 * std::f64::consts::PI.ln())
}

/// `Φ_n(y) = (2ⁿ n! √π)^{-1/2} e^{-y²/2} H_n(y)`, combined in the log domain.
pub fn phi_n(n: usize, y: f64) -> Result<f64> {
    phi_n_capped(n, y, N_MAX)
}

pub fn phi_n_capped(n: usize, y: f64, cap: usize) -> Result<f64> {
    let h = hermite_eval_capped(n, y, cap)?;
    if h == 0.0 {
        return Ok(0.0);
    }
    Ok(h.signum() * (h.abs().ln() - 0.5 * y * y - log_norm(n)).exp())
}

/// `Ψ_n(y, τ) = e^{-i(n+1/2)τ} Φ_n(y)`.
pub fn psi_stationary(n: usize, y: f64, tau: f64) -> Result<Complex64> {
    let phase = Complex64::from_polar(1.0, -(n as f64 + 0.5) * tau);
    Ok(phase * phi_n(n, y)?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_bigint::BigInt;
    use num_rational::BigRational;
    use num_traits::{One, ToPrimitive, Zero};

    const PI_M14: f64 = 0.7511255444649425;

    /// `H_n(z) = n! Σ_m (−1)^m (2z)^{n−2m} / (m! (n−2m)!)` in exact rationals.
    fn hermite_exact(n: usize, z: &BigRational) -> BigRational {
        let fact = |k: usize| (1..=k).fold(BigInt::one(), |acc, j| acc * BigInt::from(j));
        let two_z = z * BigRational::from_integer(BigInt::from(2));
        let mut sum = BigRational::zero();
        for m in 0..=n / 2 {
            let mut term = BigRational::from_integer(fact(n))
                / BigRational::from_integer(fact(m) * fact(n - 2 * m));
            for _ in 0..n - 2 * m {
                term *= &two_z;
            }
            if m % 2 == 1 {
                term = -term;
            }
            sum += term;
        }
        sum
    }

    fn rational(num: i64, den: i64) -> BigRational {
        BigRational::new(BigInt::from(num), BigInt::from(den))
    }

    #[test]
    fn hermite_examples() {
        assert_eq!(hermite_eval(0, 3.7).unwrap(), 1.0);
        assert_eq!(hermite_eval(2, 1.0).unwrap(), 2.0);
        let exact = hermite_exact(10, &rational(17, 10)).to_f64().unwrap();
        let h = hermite_eval(10, 1.7).unwrap();
        assert!((h - exact).abs() <= 1e-13 * exact.abs(), "{h} vs {exact}");
    }

    #[test]
    fn recurrence_matches_explicit_sum() {
        // relative agreement, measured against the sum of absolute term sizes
        // so that points next to a root do not dominate
        for n in 0..=20 {
            for k in -50..=50 {
                let z = k as f64 / 10.0;
                let exact = hermite_exact(n, &rational(k, 10)).to_f64().unwrap();
                let terms = term_magnitude(n, z);
                let h = hermite_eval(n, z).unwrap();
                assert!(
                    (h - exact).abs() <= 1e-12 * exact.abs().max(1e-2 * terms),
                    "n={n} z={z}"
                );
            }
        }
    }

    fn term_magnitude(n: usize, z: f64) -> f64 {
        let fact = |k: usize| (1..=k).map(|j| j as f64).product::<f64>();
        (0..=n / 2)
            .map(|m| {
                fact(n) / (fact(m) * fact(n - 2 * m)) * (2.0 * z.abs()).powi((n - 2 * m) as i32)
            })
            .sum()
    }

    #[test]
    fn cap_is_enforced() {
        assert!(matches!(
            hermite_eval(65, 0.1),
            Err(Error::HermiteCap { n: 65, cap: 64 })
        ));
        assert!(phi_n_capped(8, 0.1, 4).is_err());
        assert!(phi_n(64, 3.0).unwrap().is_finite());
    }

    #[test]
    fn phi_examples() {
        assert!((phi_n(0, 0.0).unwrap() - PI_M14).abs() < 1e-16);
        assert_eq!(phi_n(1, 0.0).unwrap(), 0.0);
        let dy = 40.0 / 4000.0;
        let norm: f64 = (0..=4000)
            .map(|k| -20.0 + k as f64 * dy)
            .map(|y| phi_n(3, y).unwrap().powi(2) * dy)
            .sum();
        assert!((norm - 1.0).abs() < 1e-10);
    }

    #[test]
    fn psi_examples() {
        assert!((psi_stationary(0, 0.0, 0.0).unwrap() - PI_M14).norm() < 1e-16);
        let z = psi_stationary(0, 0.0, std::f64::consts::PI).unwrap();
        assert!((z - Complex64::new(0.0, -PI_M14)).norm() < 1e-15);
        let z = psi_stationary(2, 1.3, 0.7).unwrap();
        let phi = phi_n(2, 1.3).unwrap();
        assert!((z.norm() - phi.abs()).abs() < 1e-15);
        assert!((z - Complex64::from_polar(phi, -2.5 * 0.7)).norm() < 1e-15);
        assert_eq!(StationaryState::new(4).energy, 4.5);
    }

    #[test]
    fn orthonormal_on_wide_grid() {
        let n_pts = 4001;
        let dy = 40.0 / (n_pts - 1) as f64;
        let ys: Vec<f64> = (0..n_pts).map(|k| -20.0 + k as f64 * dy).collect();
        let table: Vec<Vec<f64>> = (0..=10)
            .map(|n| ys.iter().map(|&y| phi_n(n, y).unwrap()).collect())
            .collect();
        for m in 0..=10 {
            for n in 0..=10 {
                let ip: f64 = table[m]
                    .iter()
                    .zip(&table[n])
                    .map(|(a, b)| a * b * dy)
                    .sum();
                let delta = if m == n { 1.0 } else { 0.0 };
                assert!((ip - delta).abs() < 1e-9, "m={m} n={n} ip={ip}");
            }
        }
    }

    #[test]
    fn eigen_residual_with_high_order_differences() {
        let h = 1e-2;
        for n in 0..=10 {
            let e = n as f64 + 0.5;
            let mut sup: f64 = 0.0;
            for k in 0..=1200 {
                let y = -6.0 + k as f64 * 0.01;
                let f = |s: f64| phi_n(n, s).unwrap();
                // eighth-order central second difference
                let d2 = (-f(y - 4.0 * h) / 560.0 + 8.0 * f(y - 3.0 * h) / 315.0
                    - f(y - 2.0 * h) / 5.0
                    + 8.0 * f(y - h) / 5.0
                    - 205.0 * f(y) / 72.0
                    + 8.0 * f(y + h) / 5.0
                    - f(y + 2.0 * h) / 5.0
                    + 8.0 * f(y + 3.0 * h) / 315.0
                    - f(y + 4.0 * h) / 560.0)
                    / (h * h);
                sup = sup.max((-0.5 * d2 + 0.5 * y * y * f(y) - e * f(y)).abs());
            }
            assert!(sup < 1e-6, "n={n} sup={sup}");
        }
    }
}
