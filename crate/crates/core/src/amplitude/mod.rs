//! Two-photon temporal amplitudes: the input-field families.
//!
//! Every family is exposed through [`TwoPhotonAmplitude`] as an evaluable,
//! swap-symmetric amplitude Φ_sym(t₁,t₂), normalized to
//! 2∫∫|Φ_sym|² dt₁dt₂ = 1. Carrier frequencies are stored as detunings from
//! ω_fg/2 (see [`crate::atom`]), which removes optical-scale oscillation
//! from every downstream integral.

mod coherent;
mod correlated;
mod custom;
mod gaussian;
mod optimal;

pub use coherent::CoherentPulseParams;
pub use correlated::CorrelatedGaussianParams;
pub use custom::CustomAmplitude;
pub use gaussian::GaussianProductParams;
pub use optimal::OptimalStateParams;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

/// A closed interval used for time and frequency support windows.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Window {
    pub lo: f64,
    pub hi: f64,
}

impl Window {
    pub fn new(lo: f64, hi: f64) -> Self {
        Self { lo, hi }
    }

    pub fn width(&self) -> f64 {
        self.hi - self.lo
    }

    pub fn center(&self) -> f64 {
        0.5 * (self.lo + self.hi)
    }

    pub fn contains(&self, x: f64) -> bool {
        x >= self.lo && x <= self.hi
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum FamilyTag {
    Optimal,
    GaussianProduct,
    CorrelatedGaussian,
    Custom,
}

impl std::fmt::Display for FamilyTag {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let s = match self {
            FamilyTag::Optimal => "Optimal",
            FamilyTag::GaussianProduct => "GaussianProduct",
            FamilyTag::CorrelatedGaussian => "CorrelatedGaussian",
            FamilyTag::Custom => "Custom",
        };
        f.write_str(s)
    }
}

/// An evaluable, normalized, swap-symmetric two-photon temporal amplitude.
#[derive(Debug, Clone)]
pub enum TwoPhotonAmplitude {
    Optimal(OptimalStateParams),
    GaussianProduct(GaussianProductParams),
    CorrelatedGaussian(CorrelatedGaussianParams),
    Custom(CustomAmplitude),
}

impl From<OptimalStateParams> for TwoPhotonAmplitude {
    fn from(p: OptimalStateParams) -> Self {
        Self::Optimal(p)
    }
}
impl From<GaussianProductParams> for TwoPhotonAmplitude {
    fn from(p: GaussianProductParams) -> Self {
        Self::GaussianProduct(p)
    }
}
impl From<CorrelatedGaussianParams> for TwoPhotonAmplitude {
    fn from(p: CorrelatedGaussianParams) -> Self {
        Self::CorrelatedGaussian(p)
    }
}
impl From<CustomAmplitude> for TwoPhotonAmplitude {
    fn from(p: CustomAmplitude) -> Self {
        Self::Custom(p)
    }
}

impl TwoPhotonAmplitude {
    pub fn family(&self) -> FamilyTag {
        match self {
            Self::Optimal(_) => FamilyTag::Optimal,
            Self::GaussianProduct(_) => FamilyTag::GaussianProduct,
            Self::CorrelatedGaussian(_) => FamilyTag::CorrelatedGaussian,
            Self::Custom(_) => FamilyTag::Custom,
        }
    }

    /// Φ_sym(t₁,t₂). Total function: swap-symmetric everywhere, zero outside
    /// the family's support.
    pub fn evaluate_symmetric(&self, t1: f64, t2: f64) -> Complex64 {
        match self {
            Self::Optimal(p) => p.evaluate_symmetric(t1, t2),
            Self::GaussianProduct(p) => p.evaluate_symmetric(t1, t2),
            Self::CorrelatedGaussian(p) => p.evaluate_symmetric(t1, t2),
            Self::Custom(p) => p.evaluate_symmetric(t1, t2),
        }
    }

    /// Effective time window outside which |Φ_sym| is negligible
    /// (below ~1e−8 of its maximum for the analytic families).
    pub fn support(&self) -> Window {
        match self {
            Self::Optimal(p) => p.support(),
            Self::GaussianProduct(p) => p.support(),
            Self::CorrelatedGaussian(p) => p.support(),
            Self::Custom(p) => p.support(),
        }
    }

    /// Frequency window (offsets from ω_fg/2) containing the spectral mass,
    /// where a closed form is available.
    pub fn frequency_window(&self) -> Option<Window> {
        match self {
            Self::Optimal(p) => p.frequency_window(),
            Self::GaussianProduct(p) => Some(p.frequency_window()),
            Self::CorrelatedGaussian(p) => Some(p.frequency_window()),
            Self::Custom(_) => None,
        }
    }

    /// Closed-form normalization constant of Eq.-(4) type for the family:
    /// N ∈ (1, 2] for the Gaussian families, N_opt for the optimal state.
    pub fn normalization_constant(&self) -> f64 {
        match self {
            Self::Optimal(p) => p.normalization_constant(),
            Self::GaussianProduct(p) => p.normalization_constant(),
            Self::CorrelatedGaussian(p) => p.normalization_constant(),
            // Custom amplitudes are renormalized on ingestion, so the
            // symmetric-state normalization factor is exactly 2.
            Self::Custom(_) => 2.0,
        }
    }

    /// Symmetrized frequency-domain amplitude Φ̃_sym(ω₁,ω₂), with ω measured
    /// from ω_fg/2. `None` when only a numeric transform is available
    /// (Custom grids, finite-start optimal states).
    pub fn evaluate_symmetric_freq(&self, w1: f64, w2: f64) -> Option<Complex64> {
        match self {
            Self::Optimal(p) => p.evaluate_symmetric_freq(w1, w2),
            Self::GaussianProduct(p) => Some(p.evaluate_symmetric_freq(w1, w2)),
            Self::CorrelatedGaussian(p) => Some(p.evaluate_symmetric_freq(w1, w2)),
            Self::Custom(_) => None,
        }
    }

    /// Closed form of the inner excitation integral
    /// ∫_lo^t2 exp[iω_eg t₁ − (Γe/2)(t₂−t₁)] · 2Φ_sym(t₁,t₂) dt₁
    /// for the driving atom's ω_eg and Γe, when the family has one.
    pub(crate) fn inner_kernel_integral(
        &self,
        omega_eg: f64,
        gamma_e: f64,
        lo: f64,
        t2: f64,
    ) -> Option<Complex64> {
        match self {
            Self::Optimal(p) => Some(p.inner_kernel_integral(omega_eg, gamma_e, lo, t2)),
            Self::GaussianProduct(p) => Some(p.inner_kernel_integral(omega_eg, gamma_e, lo, t2)),
            Self::CorrelatedGaussian(p) => {
                Some(p.inner_kernel_integral(omega_eg, gamma_e, lo, t2))
            }
            Self::Custom(_) => None,
        }
    }

    /// Latest "arrival" feature of the amplitude: the time around which the
    /// final photon is concentrated. Peak scans use this to place a fine
    /// grid; P_f always peaks within a few lifetimes after it.
    pub(crate) fn last_arrival(&self) -> f64 {
        match self {
            Self::Optimal(p) => p.t_star(),
            Self::GaussianProduct(p) => p.mu().max(0.0),
            Self::CorrelatedGaussian(p) => p.mu().max(0.0),
            Self::Custom(p) => p.support().hi,
        }
    }
}
