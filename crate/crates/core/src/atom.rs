//! Three-level ladder atom parameters and the dimensionless working frame.
//!
//! The atom has states |g⟩ → |e⟩ → |f⟩ with transition frequencies ω_eg and
//! ω_fe and decay rates Γ_e, Γ_f (inverse lifetimes of |e⟩ and |f⟩ into the
//! driven mode). All numerics run in a rotating frame referenced to
//! ω_ref = ω_fg/2, half the two-photon transition frequency, so absolute
//! optical frequencies never appear: only the splitting δ_a = ω_fe − ω_eg
//! and carrier detunings from ω_fg/2 enter any formula. Probabilities are
//! invariant under a common shift of all carriers and transition
//! frequencies, so this representation loses nothing.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Decay rates and level splitting of the ladder atom.
///
/// Serializes as a flat record `{gamma_e, gamma_f, delta_a}`. In the working
/// frame ω_eg = −δ_a/2 and ω_fe = +δ_a/2.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "AtomParamsRaw")]
pub struct AtomParams {
    gamma_e: f64,
    gamma_f: f64,
    delta_a: f64,
}

#[derive(Deserialize)]
struct AtomParamsRaw {
    gamma_e: f64,
    gamma_f: f64,
    delta_a: f64,
}

impl TryFrom<AtomParamsRaw> for AtomParams {
    type Error = Error;

    fn try_from(raw: AtomParamsRaw) -> Result<Self> {
        AtomParams::new(raw.gamma_e, raw.gamma_f, raw.delta_a)
    }
}

impl AtomParams {
    pub fn new(gamma_e: f64, gamma_f: f64, delta_a: f64) -> Result<Self> {
        if !(gamma_e > 0.0) || !gamma_e.is_finite() {
            return Err(Error::Domain(format!(
                "gamma_e must be positive and finite, got {gamma_e}"
            )));
        }
        if !(gamma_f > 0.0) || !gamma_f.is_finite() {
            return Err(Error::Domain(format!(
                "gamma_f must be positive and finite, got {gamma_f}"
            )));
        }
        if !delta_a.is_finite() {
            return Err(Error::Domain(format!(
                "delta_a must be finite, got {delta_a}"
            )));
        }
        Ok(Self {
            gamma_e,
            gamma_f,
            delta_a,
        })
    }

    /// Builds an atom in internal units Γ_f = 1 from the two dimensionless
    /// parameters every sweep in this crate is driven by.
    pub fn from_ratios(gamma_e_over_gf: f64, delta_a_over_gf: f64) -> Result<Self> {
        if !(gamma_e_over_gf > 0.0) || !gamma_e_over_gf.is_finite() {
            return Err(Error::Domain(format!(
                "gamma_e/gamma_f ratio must be positive and finite, got {gamma_e_over_gf}"
            )));
        }
        Self::new(gamma_e_over_gf, 1.0, delta_a_over_gf)
    }

    pub fn gamma_e(&self) -> f64 {
        self.gamma_e
    }

    pub fn gamma_f(&self) -> f64 {
        self.gamma_f
    }

    /// Transition-frequency difference δ_a = ω_fe − ω_eg (signed).
    pub fn delta_a(&self) -> f64 {
        self.delta_a
    }

    pub fn ratio(&self) -> f64 {
        self.gamma_e / self.gamma_f
    }

    pub fn delta_a_over_gf(&self) -> f64 {
        self.delta_a / self.gamma_f
    }

    /// ω_eg in the working frame (offset from ω_fg/2).
    pub fn omega_eg(&self) -> f64 {
        -0.5 * self.delta_a
    }

    /// ω_fe in the working frame (offset from ω_fg/2).
    pub fn omega_fe(&self) -> f64 {
        0.5 * self.delta_a
    }
}
