//! Properties of the point transformation that hold for any frame, whatever
//! the dynamics that produced it.

use ermakov_qosc::field::{SpaceGrid, WaveField};
use ermakov_qosc::invariant::relative_eigen_residual;
use ermakov_qosc::pointmap::{gauge_factor, map_coordinates, psi_at, varphi_at};
use ermakov_qosc::prelude::*;
use ermakov_qosc::scenario::finite_difference_jet;
use ermakov_qosc::stationary::phi_n;
use ermakov_qosc::verify::random_states;
use proptest::prelude::*;

fn arb_frame() -> impl Strategy<Value = ErmakovFrame> {
    (
        (0.7..1.5f64, -0.5..0.5f64),
        (0.7..1.5f64, -0.5..0.5f64),
        (-1.0..1.0f64, -0.5..0.5f64),
        -10.0..10.0f64,
        -3.0..3.0f64,
    )
        .prop_map(|(mu, sigma, gamma, tau, xi)| {
            ErmakovFrame::from_parts(1.0, mu.into(), sigma.into(), gamma.into(), tau, xi)
        })
}

fn grid_for(f: &ErmakovFrame) -> SpaceGrid {
    SpaceGrid::symmetric(12.0 * f.sigma / f.mu + f.gamma.abs() / f.mu, 2048).unwrap()
}

fn field(f: &ErmakovFrame, n: usize, g: &SpaceGrid) -> WaveField {
    WaveField::from_fn(*g, f.t, |x| varphi_at(f, n, x).unwrap())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn coordinate_map_inverts(f in arb_frame(), x in -20.0..20.0f64) {
        let (y, tau) = map_coordinates(&f, x);
        prop_assert_eq!(tau, f.tau);
        prop_assert!(((f.sigma * y - f.gamma) / f.mu - x).abs() < 1e-12 * (1.0 + x.abs()));
    }

    #[test]
    fn gauge_modulus_is_the_jacobian(f in arb_frame(), x in -20.0..20.0f64) {
        let a = gauge_factor(&f, x);
        prop_assert!((a.norm() - (f.sigma / f.mu).sqrt()).abs() < 1e-12);
    }

    #[test]
    fn gauge_inverts_the_stationary_state(f in arb_frame(), n in 0usize..6, x in -5.0..5.0f64) {
        let (y, tau) = map_coordinates(&f, x);
        let expected = psi_stationary(n, y, tau).unwrap() / gauge_factor(&f, x);
        let got = psi_at(&f, n, x).unwrap();
        prop_assert!((got - expected).norm() < 1e-12 * (1.0 + expected.norm()));
    }

    #[test]
    fn invariant_determinant_is_a_quarter(f in arb_frame()) {
        let c = invariant_coeffs(&f);
        prop_assert!((c.determinant() - 0.25).abs() < 1e-12);
        prop_assert!(c.c_pp > 0.0 && c.c_xx > 0.0);
    }

    #[test]
    fn mapped_states_are_orthonormal(f in arb_frame(), m in 0usize..5, k in 0usize..5) {
        let g = grid_for(&f);
        let (a, b) = (field(&f, m, &g), field(&f, k, &g));
        let delta = if m == k { 1.0 } else { 0.0 };
        prop_assert!((inner_product(&a, &b).unwrap() - delta).norm() < 1e-10);
    }

    #[test]
    fn mapped_states_are_invariant_eigenfunctions(f in arb_frame(), n in 0usize..5) {
        let g = grid_for(&f);
        let phi = field(&f, n, &g);
        let r = relative_eigen_residual(&invariant_coeffs(&f), &phi, n as f64 + 0.5).unwrap();
        prop_assert!(r < 1e-8, "residual {r:e}");
    }

    #[test]
    fn hermite_functions_satisfy_the_ladder_relation(n in 1usize..60, y in -12.0..12.0f64) {
        let lhs = y * phi_n(n, y).unwrap();
        let rhs = (n as f64 / 2.0).sqrt() * phi_n(n - 1, y).unwrap()
            + ((n + 1) as f64 / 2.0).sqrt() * phi_n(n + 1, y).unwrap();
        prop_assert!((lhs - rhs).abs() < 1e-12);
    }

    #[test]
    fn hermite_functions_have_parity(n in 0usize..64, y in -15.0..15.0f64) {
        let sign = if n % 2 == 0 { 1.0 } else { -1.0 };
        prop_assert_eq!(phi_n(n, -y).unwrap(), sign * phi_n(n, y).unwrap());
    }

    #[test]
    fn analytic_jets_match_finite_differences(
        scale in 0.5..2.0f64,
        rate in -0.5..0.5f64,
        amp in 0.0..1.0f64,
        freq in 0.1..3.0f64,
        t in 0.0..5.0f64,
    ) {
        let functions = [
            TimeFunction::Exponential { scale, rate },
            TimeFunction::Cosine { offset: 1.0, amplitude: amp, frequency: freq, phase: 0.3 },
        ];
        for f in &functions {
            let exact = f.jet(t);
            let approx = finite_difference_jet(|s| f.value(s), t, 1e-3, f64::NEG_INFINITY, f64::INFINITY);
            for (a, b) in exact.iter().zip(&approx) {
                prop_assert!((a - b).abs() < 1e-7 * (1.0 + a.abs()), "{f:?} at {t}: {exact:?} vs {approx:?}");
            }
        }
    }

    #[test]
    fn random_states_are_normalized_and_reproducible(count in 1usize..6, n_max in 0usize..12, seed in any::<u64>()) {
        let states = random_states(count, n_max, seed);
        prop_assert_eq!(&states, &random_states(count, n_max, seed));
        for s in &states {
            prop_assert_eq!(s.len(), n_max + 1);
            prop_assert_eq!(s.iter().filter(|c| c.norm() > 0.0).count(), 4.min(n_max + 1));
            let norm: f64 = s.iter().map(|c| c.norm_sqr()).sum();
            prop_assert!((norm - 1.0).abs() < 1e-14);
        }
    }
}
