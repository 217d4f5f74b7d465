//! Excitation probability P_f(t) of the upper ladder state, its peak, the
//! universal ceiling, and the mean residence time.
//!
//! P_f(t) = ΓeΓf |∫_{t₀}^{t} dt₂ e^{iω_fe t₂ − Γf(t−t₂)/2}
//!                 ∫_{t₀}^{t₂} dt₁ e^{iω_eg t₁ − Γe(t₂−t₁)/2} · 2Φ_sym(t₁,t₂)|²
//!
//! evaluated in the rotating frame, so the kernels are damped exponentials
//! and the phases carry only detunings. The outer integral is adaptive
//! Gauss–Kronrod; the inner integral uses the family's closed form when one
//! exists (validated against pure nested quadrature) and adaptive
//! quadrature otherwise.

use std::cell::Cell;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::amplitude::TwoPhotonAmplitude;
use crate::atom::AtomParams;
use crate::cerf::sinhc;
use crate::error::{Error, Result};
use crate::quad::integrate_complex;

/// Exponential kernels below e^{−40} of their maximum are dropped; the
/// discarded mass is orders of magnitude under every tolerance used here.
const KERNEL_REACH_LOG: f64 = 80.0;

#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct QuadratureConfig {
    /// Relative tolerance of the excitation integrals (in (0, 1e−3]).
    pub rel_tol: f64,
    /// Adaptive bisection depth limit per panel.
    pub max_depth: u32,
    /// Coarse-grid sample count used to bracket the P_f peak.
    pub peak_scan_points: usize,
    /// Force nested adaptive quadrature even when the family has a
    /// closed-form inner integral (used to validate the fast path).
    pub force_generic_inner: bool,
}

impl Default for QuadratureConfig {
    fn default() -> Self {
        Self {
            rel_tol: 1e-7,
            max_depth: 48,
            peak_scan_points: 200,
            force_generic_inner: false,
        }
    }
}

impl QuadratureConfig {
    /// Cheaper settings for optimizer objectives.
    pub fn fast() -> Self {
        Self {
            rel_tol: 1e-6,
            max_depth: 40,
            peak_scan_points: 48,
            force_generic_inner: false,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.rel_tol > 0.0 && self.rel_tol <= 1e-3) {
            return Err(Error::Domain(format!(
                "rel_tol must lie in (0, 1e-3], got {}",
                self.rel_tol
            )));
        }
        if self.max_depth == 0 || self.peak_scan_points < 2 {
            return Err(Error::Domain(
                "max_depth and peak_scan_points must be positive".into(),
            ));
        }
        Ok(())
    }
}

/// A sampled P_f(t) curve with its peak and the Eq.-(17)-type ceiling at
/// the peak time.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ExcitationResult {
    pub t_grid: Vec<f64>,
    pub pf: Vec<f64>,
    pub t_peak: f64,
    pub pf_peak: f64,
    pub bound_at_peak: f64,
}

#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct PfPeak {
    pub t_peak: f64,
    pub pf_peak: f64,
    /// Set when the whole curve is numerically zero (< 1e−12); the reported
    /// location is then just the support center.
    pub degenerate: bool,
}

/// P_f(t) for an arbitrary normalized amplitude.
pub fn pf_at(
    atom: &AtomParams,
    amp: &TwoPhotonAmplitude,
    t: f64,
    cfg: &QuadratureConfig,
) -> Result<f64> {
    cfg.validate()?;
    if !t.is_finite() {
        return Err(Error::Domain(format!("evaluation time must be finite, got {t}")));
    }
    let support = amp.support();
    if t <= support.lo {
        return Ok(0.0);
    }
    let (ge, gf) = (atom.gamma_e(), atom.gamma_f());
    let outer_lo = support.lo.max(t - KERNEL_REACH_LOG / gf);
    let outer_hi = t.min(support.hi);
    if outer_lo >= outer_hi {
        return Ok(0.0);
    }

    let scale = (ge * gf).sqrt();
    let abs_tol = 1e-3 * cfg.rel_tol;
    let inner_abs = abs_tol / (outer_hi - outer_lo).max(1.0);
    let inner_failed = Cell::new(false);
    let w_fe = atom.omega_fe();
    let w_eg = atom.omega_eg();

    let outer = integrate_complex(
        |t2| {
            let inner_lo = support.lo.max(t2 - KERNEL_REACH_LOG / ge);
            if inner_lo >= t2 {
                return Complex64::new(0.0, 0.0);
            }
            let inner = if cfg.force_generic_inner {
                None
            } else {
                amp.inner_kernel_integral(w_eg, ge, inner_lo, t2)
            };
            let inner = inner.unwrap_or_else(|| {
                let out = integrate_complex(
                    |t1| {
                        let kernel = Complex64::new(-0.5 * ge * (t2 - t1), w_eg * t1).exp();
                        kernel * 2.0 * amp.evaluate_symmetric(t1, t2)
                    },
                    inner_lo,
                    t2,
                    cfg.rel_tol / 5.0,
                    inner_abs,
                    cfg.max_depth,
                );
                if !out.converged {
                    inner_failed.set(true);
                }
                out.value
            });
            scale * Complex64::new(-0.5 * gf * (t - t2), w_fe * t2).exp() * inner
        },
        outer_lo,
        outer_hi,
        cfg.rel_tol,
        abs_tol,
        cfg.max_depth,
    );

    let p = outer.value.norm_sqr();
    if !outer.converged || inner_failed.get() {
        let achieved = if outer.value.norm() > 0.0 {
            outer.abs_error / outer.value.norm()
        } else {
            outer.abs_error
        };
        return Err(Error::QuadratureConvergence {
            partial: p,
            achieved,
            requested: cfg.rel_tol,
        });
    }
    Ok(p)
}

/// P_f(t) for the t₀ = −∞ optimal state: e^{−Γf |t*−t|}.
pub fn pf_closed_form_optimal(atom: &AtomParams, t_star: f64, t: f64) -> f64 {
    (-atom.gamma_f() * (t_star - t).abs()).exp()
}

/// Universal excitation ceiling P_f^max(t*) for interaction starting at t₀
/// (`None` for −∞), from the Cauchy–Schwarz bound on the excitation
/// functional. Monotone in t* − t₀ and → 1 as the window grows.
pub fn pf_upper_bound(atom: &AtomParams, t_star: f64, t0: Option<f64>) -> Result<f64> {
    let Some(t0) = t0 else { return Ok(1.0) };
    if t_star < t0 {
        return Err(Error::Domain(format!(
            "need t_star >= t0, got t_star = {t_star}, t0 = {t0}"
        )));
    }
    Ok(excitation_ceiling(atom.gamma_e(), atom.gamma_f(), t_star - t0))
}

/// 1 − [Γf e^{−Γe τ} − Γe e^{−Γf τ}]/(Γf − Γe), written through sinh/cosh so
/// the degenerate-rate limit 1 − (1+Γτ)e^{−Γτ} comes out smoothly.
pub fn excitation_ceiling(gamma_e: f64, gamma_f: f64, tau: f64) -> f64 {
    let g_mean = 0.5 * (gamma_e + gamma_f);
    let eps = 0.5 * (gamma_f - gamma_e);
    1.0 - (-g_mean * tau).exp() * (g_mean * tau * sinhc(eps * tau) + (eps * tau).cosh())
}

/// Interaction start used for ceiling comparisons: the optimal family's own
/// t₀, or the effective support start for everything else.
pub fn effective_t0(amp: &TwoPhotonAmplitude) -> Option<f64> {
    match amp {
        TwoPhotonAmplitude::Optimal(p) => p.t0(),
        _ => Some(amp.support().lo),
    }
}

/// Samples P_f on a grid and attaches the refined peak and the ceiling at
/// the peak time.
pub fn pf_curve(
    atom: &AtomParams,
    amp: &TwoPhotonAmplitude,
    t_grid: &[f64],
    cfg: &QuadratureConfig,
) -> Result<ExcitationResult> {
    let pf = t_grid
        .iter()
        .map(|&t| pf_at(atom, amp, t, cfg))
        .collect::<Result<Vec<_>>>()?;
    let peak = pf_peak(atom, amp, cfg)?;
    let bound = pf_upper_bound(atom, peak.t_peak, effective_t0(amp))?;
    Ok(ExcitationResult {
        t_grid: t_grid.to_vec(),
        pf,
        t_peak: peak.t_peak,
        pf_peak: peak.pf_peak,
        bound_at_peak: bound,
    })
}

/// Global maximum of P_f(t): coarse scan over the support window plus a
/// fine scan around the last photon arrival, then local refinement and
/// golden-section polish to 1e−4/Γf.
pub fn pf_peak(
    atom: &AtomParams,
    amp: &TwoPhotonAmplitude,
    cfg: &QuadratureConfig,
) -> Result<PfPeak> {
    pf_peak_with_hint(atom, amp, cfg, None)
}

/// [`pf_peak`] with a warm-start location (used by the optimizer, where the
/// peak moves smoothly between objective evaluations). The hint is trusted
/// only if it beats a thinned global scan.
pub fn pf_peak_with_hint(
    atom: &AtomParams,
    amp: &TwoPhotonAmplitude,
    cfg: &QuadratureConfig,
    hint: Option<f64>,
) -> Result<PfPeak> {
    cfg.validate()?;
    let gf = atom.gamma_f();
    let support = amp.support();
    let lo = support.lo;
    let hi = support.hi + 2.0 / gf;
    let eval = |t: f64| pf_at(atom, amp, t, cfg);

    let mut best_t = 0.5 * (lo + hi);
    let mut best_p = -1.0;
    let mut spacing = (hi - lo).max(1e-12);
    let consider = |t: f64, p: f64, sp: f64, best_t: &mut f64, best_p: &mut f64, spacing: &mut f64| {
        if p > *best_p {
            *best_p = p;
            *best_t = t;
            *spacing = sp;
        }
    };

    // Coarse scan across the whole window.
    let n_coarse = cfg.peak_scan_points.max(2);
    let h_coarse = (hi - lo) / (n_coarse - 1) as f64;
    for i in 0..n_coarse {
        let t = lo + i as f64 * h_coarse;
        let p = eval(t)?;
        consider(t, p, h_coarse, &mut best_t, &mut best_p, &mut spacing);
    }

    // Fine scan around the last arrival feature: P_f humps are only a few
    // lifetimes wide there and a coarse grid over a long support window
    // can step right over them.
    let a = amp.last_arrival();
    let f_lo = (a - 18.0 / gf).max(lo);
    let f_hi = (a + 18.0 / gf).min(hi);
    if f_hi > f_lo {
        let n_fine = (cfg.peak_scan_points / 2).clamp(32, 96);
        let h_fine = (f_hi - f_lo) / (n_fine - 1) as f64;
        for i in 0..n_fine {
            let t = f_lo + i as f64 * h_fine;
            let p = eval(t)?;
            consider(t, p, h_fine, &mut best_t, &mut best_p, &mut spacing);
        }
    }

    // Warm-start bracket.
    if let Some(hint_t) = hint {
        let h_lo = (hint_t - 4.0 / gf).max(lo);
        let h_hi = (hint_t + 4.0 / gf).min(hi);
        if h_hi > h_lo {
            let n = 17;
            let h = (h_hi - h_lo) / (n - 1) as f64;
            for i in 0..n {
                let t = h_lo + i as f64 * h;
                let p = eval(t)?;
                consider(t, p, h, &mut best_t, &mut best_p, &mut spacing);
            }
        }
    }

    if best_p < 1e-12 {
        return Ok(PfPeak {
            t_peak: support.center(),
            pf_peak: best_p.max(0.0),
            degenerate: true,
        });
    }

    // Local refinement until the bracket is a couple of lifetimes fine.
    while spacing > 0.25 / gf {
        let r_lo = (best_t - 2.0 * spacing).max(lo);
        let r_hi = (best_t + 2.0 * spacing).min(hi);
        let n = 13;
        let h = (r_hi - r_lo) / (n - 1) as f64;
        for i in 0..n {
            let t = r_lo + i as f64 * h;
            let p = eval(t)?;
            consider(t, p, h, &mut best_t, &mut best_p, &mut spacing);
        }
        spacing = spacing.min(h * 2.0);
        if h <= 0.25 / gf {
            break;
        }
    }

    // Golden-section polish.
    let tol = 1e-4 / gf;
    let mut a0 = (best_t - spacing).max(lo);
    let mut b0 = (best_t + spacing).min(hi);
    const INVPHI: f64 = 0.618_033_988_749_894_8;
    let mut x1 = b0 - INVPHI * (b0 - a0);
    let mut x2 = a0 + INVPHI * (b0 - a0);
    let mut f1 = eval(x1)?;
    let mut f2 = eval(x2)?;
    while b0 - a0 > tol {
        if f1 < f2 {
            a0 = x1;
            x1 = x2;
            f1 = f2;
            x2 = a0 + INVPHI * (b0 - a0);
            f2 = eval(x2)?;
        } else {
            b0 = x2;
            x2 = x1;
            f2 = f1;
            x1 = b0 - INVPHI * (b0 - a0);
            f1 = eval(x1)?;
        }
    }
    let t_final = 0.5 * (a0 + b0);
    let p_final = eval(t_final)?;
    let (t_peak, pf_peak) = if p_final >= best_p {
        (t_final, p_final)
    } else {
        (best_t, best_p)
    };
    Ok(PfPeak {
        t_peak,
        pf_peak,
        degenerate: false,
    })
}

/// Mean residence time in |f⟩: ∫ P_f(t) dt over the support window plus a
/// 40/Γf decay tail.
pub fn mean_residence_time(
    atom: &AtomParams,
    amp: &TwoPhotonAmplitude,
    cfg: &QuadratureConfig,
) -> Result<f64> {
    cfg.validate()?;
    let support = amp.support();
    let lo = support.lo;
    let hi = support.hi + 40.0 / atom.gamma_f();
    let failed = Cell::new(None);
    let out = crate::quad::integrate_real(
        |t| match pf_at(atom, amp, t, cfg) {
            Ok(p) => p,
            Err(e) => {
                let prev = failed.take();
                failed.set(prev.or(Some(e.to_string())));
                f64::NAN
            }
        },
        lo,
        hi,
        cfg.rel_tol.max(1e-6),
        1e-10 * (hi - lo),
        cfg.max_depth.min(30),
    );
    if let Some(msg) = failed.take() {
        return Err(Error::Domain(format!("pf_at failed inside residence-time integral: {msg}")));
    }
    if !out.converged {
        return Err(Error::QuadratureConvergence {
            partial: out.value.re,
            achieved: out.abs_error / out.value.re.abs().max(1e-300),
            requested: cfg.rel_tol.max(1e-6),
        });
    }
    Ok(out.value.re)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::amplitude::{
        CorrelatedGaussianParams, GaussianProductParams, OptimalStateParams,
    };
    use approx::{assert_abs_diff_eq, assert_relative_eq};

    fn atom(ratio: f64, da: f64) -> AtomParams {
        AtomParams::from_ratios(ratio, da).unwrap()
    }

    #[test]
    fn optimal_state_reaches_unity_and_matches_closed_form() {
        let at = atom(0.5, 1.5);
        let amp: TwoPhotonAmplitude =
            OptimalStateParams::new(0.0, None, at).unwrap().into();
        let cfg = QuadratureConfig::default();
        for t in [-3.0, -1.0, 0.0, 0.5, 2.0] {
            let engine = pf_at(&at, &amp, t, &cfg).unwrap();
            let exact = pf_closed_form_optimal(&at, 0.0, t);
            assert_abs_diff_eq!(engine, exact, epsilon = 2e-5);
        }
    }

    #[test]
    fn zero_before_interaction_starts() {
        let at = atom(1.0, 0.0);
        let amp: TwoPhotonAmplitude = GaussianProductParams::new(1.0, 1.0, 0.0, 0.0, 0.0)
            .unwrap()
            .into();
        let cfg = QuadratureConfig::default();
        assert_eq!(pf_at(&at, &amp, amp.support().lo, &cfg).unwrap(), 0.0);
        assert_eq!(pf_at(&at, &amp, amp.support().lo - 5.0, &cfg).unwrap(), 0.0);
    }

    #[test]
    fn upper_bound_examples() {
        let at = AtomParams::new(1.0, 2.0, 0.0).unwrap();
        assert_eq!(pf_upper_bound(&at, 0.0, Some(0.0)).unwrap(), 0.0);
        assert_relative_eq!(
            pf_upper_bound(&at, 1000.0, Some(0.0)).unwrap(),
            1.0,
            max_relative = 1e-12
        );
        let expect = 1.0 - (2.0 * (-1.0f64).exp() - (-2.0f64).exp());
        assert_relative_eq!(
            pf_upper_bound(&at, 1.0, Some(0.0)).unwrap(),
            expect,
            max_relative = 1e-12
        );
        assert!(pf_upper_bound(&at, -1.0, Some(0.0)).is_err());
        assert_eq!(pf_upper_bound(&at, 3.0, None).unwrap(), 1.0);
    }

    #[test]
    fn bound_is_monotone_in_window_length() {
        let at = atom(0.3, 0.0);
        let mut prev = 0.0;
        for tau in [0.1, 0.5, 1.0, 2.0, 5.0, 20.0, 100.0] {
            let b = pf_upper_bound(&at, tau, Some(0.0)).unwrap();
            assert!(b >= prev - 1e-14, "bound not monotone at tau={tau}");
            prev = b;
        }
    }

    #[test]
    fn closed_inner_matches_pure_quadrature() {
        // The semi-analytic inner integral must agree with nested adaptive
        // quadrature to 1e−9 relative.
        let at = atom(0.7, 2.5);
        let amps: Vec<TwoPhotonAmplitude> = vec![
            GaussianProductParams::new(1.02, 1.78, 1.05, 2.09, 0.0)
                .unwrap()
                .into(),
            CorrelatedGaussianParams::new(0.89, 1.21, 0.4, 1.81, 0.1)
                .unwrap()
                .into(),
            OptimalStateParams::new(0.0, None, at).unwrap().into(),
            OptimalStateParams::new(0.0, Some(-2.5), at).unwrap().into(),
        ];
        let fast = QuadratureConfig {
            rel_tol: 1e-9,
            ..QuadratureConfig::default()
        };
        let generic = QuadratureConfig {
            rel_tol: 1e-9,
            force_generic_inner: true,
            ..QuadratureConfig::default()
        };
        for amp in &amps {
            for t in [0.3, 1.7] {
                let a = pf_at(&at, amp, t, &fast).unwrap();
                let b = pf_at(&at, amp, t, &generic).unwrap();
                assert_relative_eq!(a, b, max_relative = 1e-9, epsilon = 1e-14);
            }
        }
    }

    #[test]
    fn peak_of_optimal_state_is_at_t_star() {
        let at = atom(2.0, 0.5);
        let amp: TwoPhotonAmplitude =
            OptimalStateParams::new(1.0, None, at).unwrap().into();
        let peak = pf_peak(&at, &amp, &QuadratureConfig::default()).unwrap();
        assert!(!peak.degenerate);
        assert_abs_diff_eq!(peak.t_peak, 1.0, epsilon = 1e-3);
        assert_abs_diff_eq!(peak.pf_peak, 1.0, epsilon = 1e-4);
    }

    #[test]
    fn residence_time_of_optimal_state() {
        let at = atom(1.3, 0.0);
        let amp: TwoPhotonAmplitude =
            OptimalStateParams::new(0.0, None, at).unwrap().into();
        let tbar = mean_residence_time(&at, &amp, &QuadratureConfig::default()).unwrap();
        assert_relative_eq!(tbar, 2.0, max_relative = 0.01);
    }

    #[test]
    fn decays_to_zero_long_after_the_pulse() {
        let at = atom(1.0, 0.0);
        let amp: TwoPhotonAmplitude = GaussianProductParams::new(1.5, 1.5, 0.0, 0.0, 0.0)
            .unwrap()
            .into();
        let cfg = QuadratureConfig::default();
        let peak = pf_peak(&at, &amp, &cfg).unwrap();
        let late = pf_at(&at, &amp, peak.t_peak + 30.0, &cfg).unwrap();
        assert!(late < 1e-6, "late-time pf = {late}");
    }
}
