//! Exact solutions of the quantum oscillator with time-dependent mass,
//! frequency and driving force, built by deforming the stationary oscillator
//! through a point transformation.
//!
//! The pipeline is:
//!
//! 1. [`scenario`]: the physical model `H(t) = p²/2m + mΩ²x²/2 + F x`.
//! 2. [`ermakov`]: the auxiliary linear pair `q₁, q₂`, the Ermakov solution
//!    `σ`, the classical path `γ`, the deformed time `τ` and the phase `ξ`.
//! 3. [`stationary`]: Hermite functions of the reference oscillator.
//! 4. [`pointmap`]: the transformed solution family `ψₙ(x, t)`.
//! 5. [`invariant`]: the invariant operator `Î(t)` and its eigenproblem.
//! 6. [`verify`]: independent numerical oracles and the verification report.
//!
//! ```
//! use ermakov_qosc::prelude::*;
//!
//! let spec = make_preset("caldirola_kanai", &params(&[("kappa", 0.1)])).unwrap();
//! let family = SolutionFamily::solve(&spec, &SolveOptions::default()).unwrap();
//! let grid = family.default_grid(256).unwrap();
//! let psi = family.eval_psi_n(2, 0.8, &grid).unwrap();
//! assert!((psi.norm() - 1.0).abs() < 1e-10);
//! ```

// `!(x > 0.0)` is used on purpose so that NaN is rejected too.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod ermakov;
pub mod error;
pub mod field;
pub mod format;
pub mod invariant;
pub mod ode;
pub mod pointmap;
pub mod quad;
pub mod sampled;
pub mod scenario;
pub mod stationary;
pub mod verify;

pub use error::{Error, Result};

pub mod prelude {
    pub use crate::ermakov::{ErmakovFrame, ErmakovSolution, LinearPair, SolveOptions};
    pub use crate::error::{Error, Result};
    pub use crate::field::{SpaceGrid, WaveField};
    pub use crate::invariant::{apply_invariant, invariant_coeffs, InvariantCoeffs};
    pub use crate::pointmap::{superpose, SolutionFamily};
    pub use crate::sampled::SampledFunction;
    pub use crate::scenario::{
        make_preset, params, validate, ErmakovParams, ScenarioSpec, TimeFunction,
    };
    pub use crate::stationary::{hermite_eval, phi_n, psi_stationary};
    pub use crate::verify::{
        inner_product, run_full_verification, VerificationReport, VerifyOptions,
    };
    pub use num_complex::Complex64;
}

#[cfg(doctest)]
#[doc = include_str!("../../../README.md")]
pub struct ReadmeDoctests;

#[cfg(doctest)]
pub mod book {
    #[doc = include_str!("../../../book/src/introduction.md")]
    pub mod introduction {}
    #[doc = include_str!("../../../book/src/stationary.md")]
    pub mod stationary {}
    #[doc = include_str!("../../../book/src/ermakov.md")]
    pub mod ermakov {}
    #[doc = include_str!("../../../book/src/point-transformation.md")]
    pub mod point_transformation {}
    #[doc = include_str!("../../../book/src/invariant.md")]
    pub mod invariant {}
    #[doc = include_str!("../../../book/src/verification.md")]
    pub mod verification {}
}
