//! Symmetrized product of two Gaussian single-photon profiles.
//!
//! Φ(t₁,t₂) = ψ_a(t₁)ψ_b(t₂) with unit-norm Gaussian profiles of bandwidths
//! Ω_a, Ω_b, delay μ = μ_b − μ_a (μ_a pinned to 0) and carrier splitting
//! δ_f = ω_b − ω_a. The symmetric normalization constant is
//! N = 1 + |⟨ψ_a|ψ_b⟩|², which is the closed form
//! N = 1 + (2Ω_aΩ_b/(Ω_a²+Ω_b²)) exp[−(μ²Ω_a²Ω_b² + 4δ_f²)/(2(Ω_a²+Ω_b²))].

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::Window;
use crate::cerf::gaussian_segment;
use crate::error::{Error, Result};

const TAU: f64 = 2.0 * std::f64::consts::PI;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "GaussianProductRaw")]
pub struct GaussianProductParams {
    /// Bandwidth Ω_a of the first profile.
    omega_a_width: f64,
    /// Bandwidth Ω_b of the second profile.
    omega_b_width: f64,
    /// Time delay μ = μ_b − μ_a (μ_a = 0).
    mu: f64,
    /// Carrier splitting δ_f = ω_b − ω_a.
    delta_f: f64,
    /// (ω_a + ω_b) − ω_fg.
    carrier_sum_detuning: f64,
}

#[derive(Deserialize)]
struct GaussianProductRaw {
    omega_a_width: f64,
    omega_b_width: f64,
    #[serde(default)]
    mu: f64,
    #[serde(default)]
    delta_f: f64,
    #[serde(default)]
    carrier_sum_detuning: f64,
}

impl TryFrom<GaussianProductRaw> for GaussianProductParams {
    type Error = Error;
    fn try_from(raw: GaussianProductRaw) -> Result<Self> {
        Self::new(
            raw.omega_a_width,
            raw.omega_b_width,
            raw.mu,
            raw.delta_f,
            raw.carrier_sum_detuning,
        )
    }
}

impl GaussianProductParams {
    pub fn new(
        omega_a_width: f64,
        omega_b_width: f64,
        mu: f64,
        delta_f: f64,
        carrier_sum_detuning: f64,
    ) -> Result<Self> {
        for (name, v) in [("omega_a_width", omega_a_width), ("omega_b_width", omega_b_width)] {
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
            omega_a_width,
            omega_b_width,
            mu,
            delta_f,
            carrier_sum_detuning,
        })
    }

    pub fn omega_a_width(&self) -> f64 {
        self.omega_a_width
    }
    pub fn omega_b_width(&self) -> f64 {
        self.omega_b_width
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

    /// Carrier detuning of ψ_a from ω_fg/2.
    pub fn nu_a(&self) -> f64 {
        0.5 * (self.carrier_sum_detuning - self.delta_f)
    }

    /// Carrier detuning of ψ_b from ω_fg/2.
    pub fn nu_b(&self) -> f64 {
        0.5 * (self.carrier_sum_detuning + self.delta_f)
    }

    fn centers(&self) -> (f64, f64) {
        (0.0, self.mu)
    }

    /// ψ_a(t), unit L² norm.
    pub fn psi_a(&self, t: f64) -> Complex64 {
        profile(t, self.omega_a_width, 0.0, self.nu_a())
    }

    /// ψ_b(t), unit L² norm.
    pub fn psi_b(&self, t: f64) -> Complex64 {
        profile(t, self.omega_b_width, self.mu, self.nu_b())
    }

    /// ψ̃_a(ω), ω measured from ω_fg/2.
    pub fn psi_a_freq(&self, w: f64) -> Complex64 {
        profile_freq(w, self.omega_a_width, 0.0, self.nu_a())
    }

    /// ψ̃_b(ω), ω measured from ω_fg/2.
    pub fn psi_b_freq(&self, w: f64) -> Complex64 {
        profile_freq(w, self.omega_b_width, self.mu, self.nu_b())
    }

    /// ⟨ψ_a|ψ_b⟩ = ∫ ψ_a*(t) ψ_b(t) dt, in closed form.
    pub fn overlap(&self) -> Complex64 {
        let (wa2, wb2) = (self.omega_a_width.powi(2), self.omega_b_width.powi(2));
        let sum = wa2 + wb2;
        let mag = (2.0 * self.omega_a_width * self.omega_b_width / sum).sqrt()
            * (-(wa2 * wb2 * self.mu.powi(2) + 4.0 * self.delta_f.powi(2)) / (4.0 * sum)).exp();
        // Phase −δ_f · t̄ with t̄ the overlap-weighted center.
        let t_bar = wb2 * self.mu / sum;
        mag * Complex64::new(0.0, -self.delta_f * t_bar).exp()
    }

    /// Closed-form two-photon normalization constant N = 1 + |⟨ψ_a|ψ_b⟩|².
    pub fn normalization_constant(&self) -> f64 {
        let (wa2, wb2) = (self.omega_a_width.powi(2), self.omega_b_width.powi(2));
        let sum = wa2 + wb2;
        1.0 + (2.0 * self.omega_a_width * self.omega_b_width / sum)
            * (-(self.mu.powi(2) * wa2 * wb2 + 4.0 * self.delta_f.powi(2)) / (2.0 * sum)).exp()
    }

    pub fn evaluate_symmetric(&self, t1: f64, t2: f64) -> Complex64 {
        let n = self.normalization_constant();
        (self.psi_a(t1) * self.psi_b(t2) + self.psi_b(t1) * self.psi_a(t2)) / (2.0 * n.sqrt())
    }

    pub fn evaluate_symmetric_freq(&self, w1: f64, w2: f64) -> Complex64 {
        let n = self.normalization_constant();
        (self.psi_a_freq(w1) * self.psi_b_freq(w2) + self.psi_b_freq(w1) * self.psi_a_freq(w2))
            / (2.0 * n.sqrt())
    }

    /// Time marginal p(t) = |ψ_a|²/2N + |ψ_b|²/2N + interference term.
    pub fn marginal_time(&self, t: f64) -> f64 {
        let n = self.normalization_constant();
        let a = self.psi_a(t);
        let b = self.psi_b(t);
        let cross = (a * b.conj() * self.overlap()).re;
        (a.norm_sqr() + b.norm_sqr() + 2.0 * cross) / (2.0 * n)
    }

    /// Frequency marginal, ω measured from ω_fg/2.
    pub fn marginal_frequency(&self, w: f64) -> f64 {
        let n = self.normalization_constant();
        let a = self.psi_a_freq(w);
        let b = self.psi_b_freq(w);
        let cross = (a * b.conj() * self.overlap()).re;
        (a.norm_sqr() + b.norm_sqr() + 2.0 * cross) / (2.0 * n)
    }

    pub fn support(&self) -> Window {
        let (ca, cb) = self.centers();
        let (ra, rb) = (8.0 / self.omega_a_width, 8.0 / self.omega_b_width);
        Window::new((ca - ra).min(cb - rb), (ca + ra).max(cb + rb))
    }

    pub fn frequency_window(&self) -> Window {
        let (ra, rb) = (4.0 * self.omega_a_width, 4.0 * self.omega_b_width);
        let (na, nb) = (self.nu_a(), self.nu_b());
        Window::new((na - ra).min(nb - rb), (na + ra).max(nb + rb))
    }

    pub(crate) fn inner_kernel_integral(
        &self,
        omega_eg: f64,
        gamma_e: f64,
        lo: f64,
        t2: f64,
    ) -> Complex64 {
        let n = self.normalization_constant();
        let k = Complex64::new(-0.5 * gamma_e * t2, 0.0);
        let seg = |width: f64, center: f64, nu: f64| {
            (width * width / TAU).powf(0.25)
                * gaussian_segment(
                    width * width / 4.0,
                    center,
                    Complex64::new(0.5 * gamma_e, omega_eg - nu),
                    k,
                    lo,
                    t2,
                )
        };
        let ia = seg(self.omega_a_width, 0.0, self.nu_a());
        let ib = seg(self.omega_b_width, self.mu, self.nu_b());
        (self.psi_b(t2) * ia + self.psi_a(t2) * ib) / n.sqrt()
    }
}

fn profile(t: f64, width: f64, center: f64, nu: f64) -> Complex64 {
    let envelope = (width * width / TAU).powf(0.25)
        * (-width * width * (t - center) * (t - center) / 4.0).exp();
    envelope * Complex64::new(0.0, -nu * t).exp()
}

fn profile_freq(w: f64, width: f64, center: f64, nu: f64) -> Complex64 {
    let envelope = (2.0 / (std::f64::consts::PI * width * width)).powf(0.25)
        * (-(w - nu) * (w - nu) / (width * width)).exp();
    envelope * Complex64::new(0.0, center * (w - nu)).exp()
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::{assert_abs_diff_eq, assert_relative_eq};

    #[test]
    fn identical_profiles_reduce_to_product_over_sqrt2() {
        // Ω_a = Ω_b, μ = 0, δ_f = 0: N = 2 and Φ_sym = ψ(t1)ψ(t2)/√2.
        let p = GaussianProductParams::new(1.3, 1.3, 0.0, 0.0, 0.0).unwrap();
        assert_relative_eq!(p.normalization_constant(), 2.0, max_relative = 1e-14);
        for (t1, t2) in [(0.0, 0.0), (0.4, -1.2), (2.0, 0.3)] {
            let direct = p.psi_a(t1) * p.psi_a(t2) / 2.0f64.sqrt();
            let sym = p.evaluate_symmetric(t1, t2);
            assert_abs_diff_eq!(sym.re, direct.re, epsilon = 1e-14);
            assert_abs_diff_eq!(sym.im, direct.im, epsilon = 1e-14);
        }
    }

    #[test]
    fn normalization_constant_limits() {
        // Huge delay: profiles stop overlapping, N → 1.
        let far = GaussianProductParams::new(1.0, 2.0, 1e4, 0.0, 0.0).unwrap();
        assert_relative_eq!(far.normalization_constant(), 1.0, max_relative = 1e-12);
    }

    #[test]
    fn profiles_are_unit_norm() {
        let p = GaussianProductParams::new(0.4, 2.2, 1.7, 0.9, -0.3).unwrap();
        let norm = |f: &dyn Fn(f64) -> Complex64, lo: f64, hi: f64| {
            crate::quad::integrate_real(|t| f(t).norm_sqr(), lo, hi, 1e-11, 0.0, 40)
                .value
                .re
        };
        assert_relative_eq!(norm(&|t| p.psi_a(t), -30.0, 30.0), 1.0, max_relative = 1e-9);
        assert_relative_eq!(norm(&|t| p.psi_b(t), -20.0, 25.0), 1.0, max_relative = 1e-9);
        assert_relative_eq!(
            norm(&|w| p.psi_a_freq(w), -10.0, 10.0),
            1.0,
            max_relative = 1e-9
        );
    }

    #[test]
    fn overlap_matches_numeric_inner_product() {
        for (wa, wb, mu, df) in [
            (1.0, 1.0, 0.7, 0.0),
            (0.5, 2.0, 1.3, 1.1),
            (1.46e-3, 1.46, 0.0, 0.4),
            (2.0, 3.0, -0.8, -2.5),
        ] {
            let p = GaussianProductParams::new(wa, wb, mu, df, 0.15).unwrap();
            // The product ψa*ψb is a Gaussian concentrated around the
            // width-weighted center; integrate over that window, not the
            // (possibly enormous) union support.
            let center = wb * wb * mu / (wa * wa + wb * wb);
            let sigma = (2.0 / (wa * wa + wb * wb)).sqrt();
            let numeric = crate::quad::integrate_complex(
                |t| p.psi_a(t).conj() * p.psi_b(t),
                center - 14.0 * sigma,
                center + 14.0 * sigma,
                1e-12,
                1e-14,
                48,
            )
            .value;
            let closed = p.overlap();
            assert_abs_diff_eq!(closed.re, numeric.re, epsilon = 1e-8);
            assert_abs_diff_eq!(closed.im, numeric.im, epsilon = 1e-8);
            assert_abs_diff_eq!(
                p.normalization_constant(),
                1.0 + numeric.norm_sqr(),
                epsilon = 1e-8
            );
        }
    }

    #[test]
    fn nearly_independent_transitions_have_tiny_overlap() {
        // Γe/Γf = 0.001 optimized parameters: the two profiles barely
        // overlap, so the excitation is a pair of almost independent
        // single-photon transitions.
        let ge = 1e-3;
        let p = GaussianProductParams::new(1.46 * ge, 1.46 * (ge + 1.0), 1.0 / ge, 0.0, 0.0)
            .unwrap();
        let o2 = p.overlap().norm_sqr();
        assert!(o2 < 0.01, "overlap² = {o2}");
    }

    #[test]
    fn rejects_bad_widths() {
        assert!(GaussianProductParams::new(0.0, 1.0, 0.0, 0.0, 0.0).is_err());
        assert!(GaussianProductParams::new(1.0, -1.0, 0.0, 0.0, 0.0).is_err());
        assert!(GaussianProductParams::new(1.0, 1.0, f64::NAN, 0.0, 0.0).is_err());
    }

    #[test]
    fn serde_field_names() {
        let p = GaussianProductParams::new(0.15, 1.5, 9.99, 2.49, 0.0).unwrap();
        let json = serde_json::to_value(p).unwrap();
        for key in [
            "omega_a_width",
            "omega_b_width",
            "mu",
            "delta_f",
            "carrier_sum_detuning",
        ] {
            assert!(json.get(key).is_some(), "missing {key}");
        }
        let back: GaussianProductParams = serde_json::from_value(json).unwrap();
        assert_eq!(p, back);
    }
}
