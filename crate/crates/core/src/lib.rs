//! Two-photon excitation of a three-level ladder atom by indistinguishable
//! photons: excitation probabilities, input-field families, spectral
//! densities, coherent-pulse dynamics, and pulse-shape optimization.
//!
//! All quantities are computed in internal units Γ_f = 1 and in a rotating
//! frame referenced to half the two-photon transition frequency ω_fg/2;
//! only decay rates, the level splitting δ_a, and carrier detunings enter
//! any formula.

pub mod amplitude;
pub mod atom;
pub mod cerf;
pub mod dynamics;
pub mod error;
pub mod excitation;
pub mod optimize;
pub mod quad;
pub mod spectral;

pub use amplitude::{
    CoherentPulseParams, CorrelatedGaussianParams, CustomAmplitude, FamilyTag,
    GaussianProductParams, OptimalStateParams, TwoPhotonAmplitude, Window,
};
pub use atom::AtomParams;
pub use error::{Error, Result};
