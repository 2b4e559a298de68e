//! Eigenstates and information-theoretic measures of the one-dimensional
//! space-fractional quantum harmonic oscillator.
//!
//! Momentum-space eigenstates are generated by the Riesz-Feller factorization
//! recurrence ([`genpoly`]), transformed to position space ([`transform`]) and
//! fed to the Fisher/Shannon/LMC functionals ([`measures`]). The closed-form
//! spectrum ([`spectrum`]) and a finite-difference eigensolver ([`refsolver`])
//! act as independent checks. [`sweep`] drives parameter sweeps and the
//! reconciliation against published reference values.

pub mod error;
pub mod genpoly;
pub mod measures;
pub mod quad;
pub mod refsolver;
pub mod spectrum;
pub mod sweep;
pub mod transform;

mod levy;

pub use error::{Error, Result};
pub use genpoly::{
    hermite_tilde, momentum_state, rodrigues_oracle, GeneralizedPolynomial, MomentumState, Term,
};
pub use levy::LevyIndex;
pub use measures::{InfoMeasures, Representation, SampledDensity};
pub use quad::{QuadratureResult, SingularityHint, Tolerance};
pub use spectrum::{energy_level, SpectrumTable, Units};
pub use transform::{inverse_fourier, GridSpec, PositionState};
