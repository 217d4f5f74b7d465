//! The two-photon state that maximizes P_f(t*): the time reverse of the
//! cascade's spontaneous-emission wavepacket.
//!
//! On the ordered wedge u = min(t₁,t₂), v = max(t₁,t₂) the symmetrized
//! amplitude is a pure exponential,
//!
//! Φ_sym = √(ΓeΓf)/(2√P_max) · e^{(Γf−Γe)(v−t*)/2 + Γe(u−t*)/2}
//!         · e^{−i ω_fe v − i ω_eg u},   t₀ ≤ u ≤ v ≤ t*,
//!
//! where P_max is the finite-window excitation ceiling (1 when t₀ = −∞).
//! Everything is written relative to t*, so no exponential here ever
//! exceeds one in magnitude on the support.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::Window;
use crate::atom::AtomParams;
use crate::cerf::sinhc;
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "OptimalStateRaw")]
pub struct OptimalStateParams {
    /// Target excitation time t*.
    t_star: f64,
    /// Interaction start; `None` means t₀ = −∞.
    t0: Option<f64>,
    /// The atom the state is matched to.
    atom: AtomParams,
}

#[derive(Deserialize)]
struct OptimalStateRaw {
    t_star: f64,
    #[serde(default)]
    t0: Option<f64>,
    atom: AtomParams,
}

impl TryFrom<OptimalStateRaw> for OptimalStateParams {
    type Error = Error;
    fn try_from(raw: OptimalStateRaw) -> Result<Self> {
        Self::new(raw.t_star, raw.t0, raw.atom)
    }
}

impl OptimalStateParams {
    pub fn new(t_star: f64, t0: Option<f64>, atom: AtomParams) -> Result<Self> {
        if !t_star.is_finite() {
            return Err(Error::Domain(format!("t_star must be finite, got {t_star}")));
        }
        if let Some(t0) = t0 {
            if !t0.is_finite() {
                return Err(Error::Domain(
                    "finite t0 must be a finite number; use None for -infinity".into(),
                ));
            }
            if t0 >= t_star {
                return Err(Error::Domain(format!(
                    "need t0 < t_star, got t0 = {t0}, t_star = {t_star}"
                )));
            }
        }
        Ok(Self { t_star, t0, atom })
    }

    pub fn t_star(&self) -> f64 {
        self.t_star
    }

    pub fn t0(&self) -> Option<f64> {
        self.t0
    }

    pub fn atom(&self) -> AtomParams {
        self.atom
    }

    /// Excitation ceiling P_f^max(t*) for this interaction window:
    /// 1 − [Γf e^{−Γe τ} − Γe e^{−Γf τ}]/(Γf − Γe) with τ = t* − t₀,
    /// evaluated through sinh/cosh so the degenerate Γe = Γf case is the
    /// smooth limit 1 − (1+Γτ)e^{−Γτ} instead of 0/0.
    pub fn p_max(&self) -> f64 {
        let Some(t0) = self.t0 else { return 1.0 };
        let tau = self.t_star - t0;
        let (ge, gf) = (self.atom.gamma_e(), self.atom.gamma_f());
        let g_mean = 0.5 * (ge + gf);
        let eps = 0.5 * (gf - ge);
        1.0 - (-g_mean * tau).exp() * (g_mean * tau * sinhc(eps * tau) + (eps * tau).cosh())
    }

    /// Normalization factor of the unsymmetrized wedge amplitude,
    /// N_opt = e^{Γf t*} P_max / (ΓeΓf).
    pub fn normalization_constant(&self) -> f64 {
        let (ge, gf) = (self.atom.gamma_e(), self.atom.gamma_f());
        (gf * self.t_star).exp() * self.p_max() / (ge * gf)
    }

    pub fn evaluate_symmetric(&self, t1: f64, t2: f64) -> Complex64 {
        let (u, v) = if t1 <= t2 { (t1, t2) } else { (t2, t1) };
        if v > self.t_star {
            return Complex64::new(0.0, 0.0);
        }
        if let Some(t0) = self.t0 {
            if u < t0 {
                return Complex64::new(0.0, 0.0);
            }
        }
        let (ge, gf) = (self.atom.gamma_e(), self.atom.gamma_f());
        let c = (ge * gf).sqrt() / (2.0 * self.p_max().sqrt());
        let log_mag = 0.5 * (gf - ge) * (v - self.t_star) + 0.5 * ge * (u - self.t_star);
        let phase = -(self.atom.omega_fe() * v + self.atom.omega_eg() * u);
        c * Complex64::new(log_mag, phase).exp()
    }

    /// Time marginal; closed form for any t₀.
    pub fn marginal_time(&self, t: f64) -> f64 {
        if t > self.t_star {
            return 0.0;
        }
        if let Some(t0) = self.t0 {
            if t < t0 {
                return 0.0;
            }
        }
        let (ge, gf) = (self.atom.gamma_e(), self.atom.gamma_f());
        let dt = t - self.t_star;
        // ∫|Φ_sym(t,s)|² split at s = t: the wedge below plus the wedge above.
        let below = {
            let tail = match self.t0 {
                None => 0.0,
                Some(t0) => ((gf - ge) * dt + ge * (t0 - self.t_star)).exp(),
            };
            ((gf * dt).exp() - tail) / ge
        };
        let above = -dt * crate::cerf::expm1_over((gf - ge) * dt) * (ge * dt).exp();
        ge * gf / (2.0 * self.p_max()) * (below + above)
    }

    /// Frequency marginal at offset x = ω − ω_eg (closed form, t₀ = −∞).
    ///
    /// The numerator mixes both excitation pathways; interference shifts
    /// its maxima away from the bare resonances x = 0 and x = δ_a.
    pub fn marginal_frequency_from_eg(&self, x: f64) -> f64 {
        let (ge, gf) = (self.atom.gamma_e(), self.atom.gamma_f());
        let da = self.atom.delta_a();
        let num = ge * (ge + gf) * (ge + 0.25 * gf) + ge * da * da + gf * x * x;
        let den = 4.0
            * std::f64::consts::PI
            * (x * x + 0.25 * ge * ge)
            * ((x - da) * (x - da) + 0.25 * (ge + gf) * (ge + gf));
        num / den
    }

    /// Frequency-sum density: Lorentzian of HWHM Γf/2 centered on the
    /// two-photon resonance. `s` is the offset of ω₁+ω₂ from ω_fg.
    pub fn frequency_sum_density(&self, s: f64) -> f64 {
        let gf = self.atom.gamma_f();
        0.5 * gf / (std::f64::consts::PI * (s * s + 0.25 * gf * gf))
    }

    /// Φ̃_sym(ω₁,ω₂) for t₀ = −∞ (None otherwise), ω from ω_fg/2.
    pub fn evaluate_symmetric_freq(&self, w1: f64, w2: f64) -> Option<Complex64> {
        if self.t0.is_some() {
            return None;
        }
        let (ge, gf) = (self.atom.gamma_e(), self.atom.gamma_f());
        let w_eg = self.atom.omega_eg();
        let sum_pole = Complex64::new(0.5 * gf, w1 + w2);
        let pole = |w: f64| Complex64::new(0.5 * ge, w - w_eg);
        let phase = Complex64::new(0.0, (w1 + w2) * self.t_star).exp();
        Some(
            (ge * gf).sqrt() * phase / (4.0 * std::f64::consts::PI * sum_pole)
                * (pole(w1).inv() + pole(w2).inv()),
        )
    }

    pub fn support(&self) -> Window {
        let (ge, gf) = (self.atom.gamma_e(), self.atom.gamma_f());
        let reach = 40.0 / ge.min(gf);
        let lo = match self.t0 {
            Some(t0) => t0.max(self.t_star - reach),
            None => self.t_star - reach,
        };
        Window::new(lo, self.t_star)
    }

    /// Window containing the spectral features (resonances and their
    /// Lorentzian cores); the tails are heavy, so quadratures over this
    /// family's spectrum must extend well beyond it.
    pub fn frequency_window(&self) -> Option<Window> {
        let atom = &self.atom;
        let hw = 0.5 * atom.delta_a().abs() + 4.0 * (atom.gamma_e() + atom.gamma_f());
        Some(Window::new(-hw, hw))
    }

    pub(crate) fn inner_kernel_integral(
        &self,
        omega_eg_drive: f64,
        gamma_e_drive: f64,
        lo: f64,
        t2: f64,
    ) -> Complex64 {
        let zero = Complex64::new(0.0, 0.0);
        if t2 > self.t_star {
            return zero;
        }
        let lo = match self.t0 {
            Some(t0) => lo.max(t0),
            None => lo,
        };
        if lo >= t2 {
            return zero;
        }
        let (ge, gf) = (self.atom.gamma_e(), self.atom.gamma_f());
        let a_r = 0.5 * (gf - ge);
        let c = (ge * gf).sqrt() / self.p_max().sqrt();
        // exponent of t₁ after merging kernel and amplitude
        let q = Complex64::new(
            0.5 * (gamma_e_drive + ge),
            omega_eg_drive - self.atom.omega_eg(),
        );
        let common = Complex64::new(
            a_r * (t2 - self.t_star) - 0.5 * ge * self.t_star - 0.5 * gamma_e_drive * t2,
            -self.atom.omega_fe() * t2,
        );
        let hi_term = (common + q * t2).exp();
        let lo_term = (common + q * lo).exp();
        c * (hi_term - lo_term) / q
    }
}
