//! Coherent Gaussian pulse driving both ladder transitions.
//!
//! The normalized envelope α₀(t) uses the same Gaussian convention as the
//! two-photon profiles, |α₀(t)|² = √(Ω²/2π)·exp[−Ω²(t−t_c)²/2], and is
//! truncated at ±8/Ω where it has fallen below 1e−14. The carrier lives in
//! the rotating-frame detunings, so the envelope itself is real.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

const TAU: f64 = 2.0 * std::f64::consts::PI;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "CoherentPulseRaw")]
pub struct CoherentPulseParams {
    /// Gaussian envelope bandwidth Ω.
    width: f64,
    /// Mean photon number n̄ = ∫|α|² dt.
    n_bar: f64,
    /// Carrier detuning ω₀ − ω_fg/2.
    detuning: f64,
    /// Envelope center time.
    t_center: f64,
}

#[derive(Deserialize)]
struct CoherentPulseRaw {
    width: f64,
    n_bar: f64,
    #[serde(default)]
    detuning: f64,
    #[serde(default)]
    t_center: f64,
}

impl TryFrom<CoherentPulseRaw> for CoherentPulseParams {
    type Error = Error;
    fn try_from(raw: CoherentPulseRaw) -> Result<Self> {
        Self::new(raw.width, raw.n_bar, raw.detuning, raw.t_center)
    }
}

impl CoherentPulseParams {
    pub fn new(width: f64, n_bar: f64, detuning: f64, t_center: f64) -> Result<Self> {
        if !(width > 0.0) || !width.is_finite() {
            return Err(Error::Domain(format!("width must be positive, got {width}")));
        }
        if !(n_bar >= 0.0) || !n_bar.is_finite() {
            return Err(Error::Domain(format!("n_bar must be >= 0, got {n_bar}")));
        }
        if !detuning.is_finite() || !t_center.is_finite() {
            return Err(Error::Domain("detuning and t_center must be finite".into()));
        }
        Ok(Self {
            width,
            n_bar,
            detuning,
            t_center,
        })
    }

    pub fn width(&self) -> f64 {
        self.width
    }
    pub fn n_bar(&self) -> f64 {
        self.n_bar
    }
    pub fn detuning(&self) -> f64 {
        self.detuning
    }
    pub fn t_center(&self) -> f64 {
        self.t_center
    }

    /// Unit-norm real envelope α₀(t), zero outside ±8/Ω of the center.
    pub fn alpha0(&self, t: f64) -> f64 {
        let x = t - self.t_center;
        if x.abs() > 8.0 / self.width {
            return 0.0;
        }
        (self.width * self.width / TAU).powf(0.25)
            * (-self.width * self.width * x * x / 4.0).exp()
    }

    /// α(t) = √n̄ α₀(t).
    pub fn alpha(&self, t: f64) -> f64 {
        self.n_bar.sqrt() * self.alpha0(t)
    }

    /// Time window containing the pulse.
    pub fn support(&self) -> (f64, f64) {
        let r = 8.0 / self.width;
        (self.t_center - r, self.t_center + r)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn zero_photons_means_zero_amplitude() {
        let p = CoherentPulseParams::new(1.82, 0.0, 0.0, 0.0).unwrap();
        assert_eq!(p.alpha(0.0), 0.0);
        assert_eq!(p.alpha(1.0), 0.0);
        assert!(p.alpha0(0.0) > 0.0);
    }

    #[test]
    fn envelope_norm_and_photon_number() {
        let p = CoherentPulseParams::new(1.82, 2.0, 0.0, 0.7).unwrap();
        let (lo, hi) = p.support();
        let norm = crate::quad::integrate_real(|t| p.alpha0(t).powi(2), lo, hi, 1e-11, 0.0, 40);
        assert_relative_eq!(norm.value.re, 1.0, max_relative = 1e-7);
        let photons =
            crate::quad::integrate_real(|t| p.alpha(t).powi(2), lo, hi, 1e-11, 0.0, 40);
        assert_relative_eq!(photons.value.re, 2.0, max_relative = 1e-7);
    }

    #[test]
    fn peak_envelope_intensity() {
        // |α₀(t_c)|² = Ω/√(2π)
        let p = CoherentPulseParams::new(1.82, 2.0, 0.0, 0.0).unwrap();
        assert_relative_eq!(
            p.alpha0(0.0).powi(2),
            1.82 / TAU.sqrt(),
            max_relative = 1e-12
        );
    }

    #[test]
    fn rejects_bad_parameters() {
        assert!(CoherentPulseParams::new(0.0, 2.0, 0.0, 0.0).is_err());
        assert!(CoherentPulseParams::new(1.0, -0.1, 0.0, 0.0).is_err());
    }
}
