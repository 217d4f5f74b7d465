//! Temporally correlated Gaussian photon pair.
//!
//! The unsymmetrized amplitude is a two-dimensional Gaussian separable in
//! the sum and difference coordinates,
//!
//! Φ(t₁,t₂) = √(Ω₊Ω₋/2π) exp[−Ω₊²(t₁+t₂−μ)²/8 − Ω₋²(t₁−(t₂−μ))²/8
//!                            − iω₀₁t₁ − iω₀₂t₂],
//!
//! with sum-frequency width Ω₊ and difference width Ω₋. The symmetric
//! normalization constant is N = 1 + exp(−Ω₋²μ²/4 − δ_f²/Ω₋²).

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::Window;
use crate::cerf::gaussian_segment;
use crate::error::{Error, Result};

const TAU: f64 = 2.0 * std::f64::consts::PI;
const SQRT_PI: f64 = 1.772_453_850_905_516;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "CorrelatedGaussianRaw")]
pub struct CorrelatedGaussianParams {
    /// Sum-frequency width Ω₊.
    omega_plus: f64,
    /// Difference width Ω₋.
    omega_minus: f64,
    /// Time delay μ between the photons.
    mu: f64,
    /// Carrier splitting δ_f = ω₀₂ − ω₀₁.
    delta_f: f64,
    /// (ω₀₁ + ω₀₂) − ω_fg.
    carrier_sum_detuning: f64,
}

#[derive(Deserialize)]
struct CorrelatedGaussianRaw {
    omega_plus: f64,
    omega_minus: f64,
    #[serde(default)]
    mu: f64,
    #[serde(default)]
    delta_f: f64,
    #[serde(default)]
    carrier_sum_detuning: f64,
}

impl TryFrom<CorrelatedGaussianRaw> for CorrelatedGaussianParams {
    type Error = Error;
    fn try_from(raw: CorrelatedGaussianRaw) -> Result<Self> {
        Self::new(
            raw.omega_plus,
            raw.omega_minus,
            raw.mu,
            raw.delta_f,
            raw.carrier_sum_detuning,
        )
    }
}

impl CorrelatedGaussianParams {
    pub fn new(
        omega_plus: f64,
        omega_minus: f64,
        mu: f64,
        delta_f: f64,
        carrier_sum_detuning: f64,
    ) -> Result<Self> {
        for (name, v) in [("omega_plus", omega_plus), ("omega_minus", omega_minus)] {
            if !(v > 0.0) || !v.is_finite() {
                return Err(Error::Domain(format!("{name} must be positive, got {v}")));
            }
        }
        for (name, v) in [
            ("mu", mu),
            ("delta_f", delta_f),
            ("carrier_sum_detuning", carrier_sum_detuning),
        ] {
            if !v.is_finite() {
                return Err(Error::Domain(format!("{name} must be finite, got {v}")));
            }
        }
        Ok(Self {
            omega_plus,
            omega_minus,
            mu,
            delta_f,
            carrier_sum_detuning,
        })
    }

    pub fn omega_plus(&self) -> f64 {
        self.omega_plus
    }
    pub fn omega_minus(&self) -> f64 {
        self.omega_minus
    }
    pub fn mu(&self) -> f64 {
        self.mu
    }
    pub fn delta_f(&self) -> f64 {
        self.delta_f
    }
    pub fn carrier_sum_detuning(&self) -> f64 {
        self.carrier_sum_detuning
    }

    pub fn nu_1(&self) -> f64 {
        0.5 * (self.carrier_sum_detuning - self.delta_f)
    }
    pub fn nu_2(&self) -> f64 {
        0.5 * (self.carrier_sum_detuning + self.delta_f)
    }

    /// Effective marginal width Ω with Ω² = Ω₊²Ω₋²/(Ω₊²+Ω₋²).
    pub fn omega_eff(&self) -> f64 {
        let (p2, m2) = (self.omega_plus.powi(2), self.omega_minus.powi(2));
        (p2 * m2 / (p2 + m2)).sqrt()
    }

    pub fn normalization_constant(&self) -> f64 {
        let m2 = self.omega_minus.powi(2);
        1.0 + (-m2 * self.mu.powi(2) / 4.0 - self.delta_f.powi(2) / m2).exp()
    }

    /// Unsymmetrized Φ(t₁,t₂); unit L² norm.
    pub fn evaluate_raw(&self, t1: f64, t2: f64) -> Complex64 {
        let pref = (self.omega_plus * self.omega_minus / TAU).sqrt();
        let s = t1 + t2 - self.mu;
        let d = t1 - (t2 - self.mu);
        let log_mag = -self.omega_plus.powi(2) * s * s / 8.0
            - self.omega_minus.powi(2) * d * d / 8.0;
        let phase = -self.nu_1() * t1 - self.nu_2() * t2;
        pref * Complex64::new(log_mag, phase).exp()
    }

    pub fn evaluate_symmetric(&self, t1: f64, t2: f64) -> Complex64 {
        let n = self.normalization_constant();
        (self.evaluate_raw(t1, t2) + self.evaluate_raw(t2, t1)) / (2.0 * n.sqrt())
    }

    /// Unsymmetrized Φ̃(ω₁,ω₂), ω from ω_fg/2.
    pub fn evaluate_raw_freq(&self, w1: f64, w2: f64) -> Complex64 {
        let pref = (2.0 / (std::f64::consts::PI * self.omega_plus * self.omega_minus)).sqrt();
        let s = w1 + w2 - self.carrier_sum_detuning;
        let d = w2 - w1 - self.delta_f;
        let log_mag = -s * s / (2.0 * self.omega_plus.powi(2))
            - d * d / (2.0 * self.omega_minus.powi(2));
        let phase = self.mu * (w2 - self.nu_2());
        pref * Complex64::new(log_mag, phase).exp()
    }

    pub fn evaluate_symmetric_freq(&self, w1: f64, w2: f64) -> Complex64 {
        let n = self.normalization_constant();
        (self.evaluate_raw_freq(w1, w2) + self.evaluate_raw_freq(w2, w1)) / (2.0 * n.sqrt())
    }

    /// Time marginal: two Gaussian humps at t = 0 and t = μ plus an
    /// interference fringe between them.
    pub fn marginal_time(&self, t: f64) -> f64 {
        let n = self.normalization_constant();
        let om = self.omega_eff();
        let om2 = om * om;
        let (p2, m2) = (self.omega_plus.powi(2), self.omega_minus.powi(2));
        let hump_b = (-om2 * (t - self.mu) * (t - self.mu)).exp();
        let hump_a = (-om2 * t * t).exp();
        let tc = t - 0.5 * self.mu;
        let fringe = 2.0
            * (-om2 * tc * tc - m2 * self.mu.powi(2) / 4.0
                - self.delta_f.powi(2) / (p2 + m2))
                .exp()
            * (2.0 * p2 * self.delta_f / (p2 + m2) * tc).cos();
        om / (2.0 * SQRT_PI * n) * (hump_a + hump_b + fringe)
    }

    /// Frequency marginal (ω from ω_fg/2): Gaussian peaks at the two carrier
    /// detunings plus an interference peak at their mean whose fringes are
    /// driven by the delay μ.
    pub fn marginal_frequency(&self, w: f64) -> f64 {
        let n = self.normalization_constant();
        let (p2, m2) = (self.omega_plus.powi(2), self.omega_minus.powi(2));
        let sum2 = p2 + m2;
        let om2 = self.omega_eff().powi(2);
        let w_bar = 0.5 * self.carrier_sum_detuning;
        let peak_1 = (-4.0 * (w - self.nu_1()).powi(2) / sum2).exp();
        let peak_2 = (-4.0 * (w - self.nu_2()).powi(2) / sum2).exp();
        let cross = 2.0
            * (-4.0 * (w - w_bar).powi(2) / sum2
                - om2 * self.mu.powi(2)
                - self.delta_f.powi(2) / m2)
                .exp()
            * (2.0 * m2 * self.mu / sum2 * (w - w_bar)).cos();
        (peak_1 + peak_2 + cross) / ((std::f64::consts::PI * sum2).sqrt() * n)
    }

    /// Frequency-sum density: a Gaussian of width Ω₊ centered on the carrier
    /// sum. `s` is the offset of ω₁+ω₂ from ω_fg.
    pub fn frequency_sum_density(&self, s: f64) -> f64 {
        let x = s - self.carrier_sum_detuning;
        (-(x * x) / self.omega_plus.powi(2)).exp() / (SQRT_PI * self.omega_plus)
    }

    pub fn support(&self) -> Window {
        let r = 8.0 / self.omega_eff();
        Window::new(self.mu.min(0.0) - r, self.mu.max(0.0) + r)
    }

    pub fn frequency_window(&self) -> Window {
        let r = 2.0 * 2.0f64.sqrt() * (self.omega_plus.powi(2) + self.omega_minus.powi(2)).sqrt();
        let (n1, n2) = (self.nu_1(), self.nu_2());
        Window::new(n1.min(n2) - r, n1.max(n2) + r)
    }

    pub(crate) fn inner_kernel_integral(
        &self,
        omega_eg: f64,
        gamma_e: f64,
        lo: f64,
        t2: f64,
    ) -> Complex64 {
        let n = self.normalization_constant();
        let (p2, m2) = (self.omega_plus.powi(2), self.omega_minus.powi(2));
        let sum2 = p2 + m2;
        let a = sum2 / 8.0;
        let om2 = self.omega_eff().powi(2);
        let pref = (self.omega_plus * self.omega_minus / TAU).sqrt();

        // Φ(t₁,t₂) as a Gaussian in t₁ for fixed t₂.
        let m_1 = (self.mu - t2) * (p2 - m2) / sum2;
        let k_1 = Complex64::new(
            -0.5 * gamma_e * t2 - 0.5 * om2 * (t2 - self.mu).powi(2),
            -self.nu_2() * t2,
        );
        let b_1 = Complex64::new(0.5 * gamma_e, omega_eg - self.nu_1());
        // Φ(t₂,t₁) as a Gaussian in t₁ for fixed t₂.
        let m_2 = self.mu + t2 * (m2 - p2) / sum2;
        let k_2 = Complex64::new(
            -0.5 * gamma_e * t2 - 0.5 * om2 * t2 * t2,
            -self.nu_1() * t2,
        );
        let b_2 = Complex64::new(0.5 * gamma_e, omega_eg - self.nu_2());

        let seg_1 = gaussian_segment(a, m_1, b_1, k_1, lo, t2);
        let seg_2 = gaussian_segment(a, m_2, b_2, k_2, lo, t2);
        pref * (seg_1 + seg_2) / n.sqrt()
    }
}
