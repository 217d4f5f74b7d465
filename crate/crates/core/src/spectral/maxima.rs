//! Locations of the maxima of the optimal state's spectral marginal.
//!
//! The critical points of the marginal are the real roots of a quintic in
//! the frequency offset from ω_eg. Two scalings keep the coefficients
//! well-conditioned: x = (ω−ω_eg)/Γf with r = Γe/Γf for Γe ≤ Γf, and
//! y = (ω−ω_eg)/Γe with R = Γf/Γe, D = δ_a/Γe otherwise. Roots come from
//! the companion matrix; candidates are kept only if direct evaluation of
//! the marginal confirms a strict local maximum.

use serde::{Deserialize, Serialize};

use super::poly::real_roots;
use crate::amplitude::OptimalStateParams;
use crate::atom::AtomParams;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum PeakStructure {
    SinglePeak,
    DoublePeak,
}

/// Verified maxima of the optimal-state spectral marginal, as offsets from
/// ω_eg, together with every real critical point the quintic produced.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SpectralMaxima {
    pub atom: AtomParams,
    pub maxima: Vec<f64>,
    pub classification: PeakStructure,
    pub polynomial_roots: Vec<f64>,
    pub warning: Option<String>,
}

/// Quintic coefficients (ascending) for the small-ratio scaling
/// x = (ω−ω_eg)/Γf, r = Γe/Γf, d = δ_a/Γf.
fn quintic_small_ratio(r: f64, d: f64) -> [f64; 6] {
    let c = r * d * d + r * (r + 1.0) * (r + 0.25);
    let a = r * r / 4.0;
    let b = (r + 1.0) * (r + 1.0) / 4.0;
    [
        2.0 * d * a * c,
        2.0 * (a - c) * (d * d + b) - 2.0 * a * c,
        6.0 * d * c - 2.0 * d * a,
        -4.0 * c,
        2.0 * d,
        -2.0,
    ]
}

/// Quintic coefficients (ascending) for the large-ratio scaling
/// y = (ω−ω_eg)/Γe, R = Γf/Γe, D = δ_a/Γe.
fn quintic_large_ratio(big_r: f64, big_d: f64) -> [f64; 6] {
    let c = big_d * big_d + (0.25 * big_r + 1.0) * (big_r + 1.0);
    let b = (big_r + 1.0) * (big_r + 1.0) / 4.0;
    [
        0.5 * big_d * c,
        2.0 * (0.25 * big_r - c) * (big_d * big_d + b) - 0.5 * c,
        6.0 * big_d * c - 0.5 * big_d * big_r,
        -4.0 * c,
        2.0 * big_d * big_r,
        -2.0 * big_r,
    ]
}

pub fn optimal_spectral_maxima(atom: &AtomParams) -> SpectralMaxima {
    let (ge, gf) = (atom.gamma_e(), atom.gamma_f());
    let (coeffs, scale) = if ge <= gf {
        (quintic_small_ratio(ge / gf, atom.delta_a() / gf), gf)
    } else {
        (quintic_large_ratio(gf / ge, atom.delta_a() / ge), ge)
    };
    let (roots_scaled, residual) = real_roots(&coeffs, 1e-9);
    let polynomial_roots: Vec<f64> = roots_scaled.iter().map(|x| x * scale).collect();

    // Verify candidates directly on the marginal: a strict local maximum
    // at probe spacing 1e−3 Γf.
    let marginal = OptimalStateParams::new(0.0, None, *atom).expect("valid atom");
    let h = 1e-3 * gf;
    let mut maxima: Vec<f64> = polynomial_roots
        .iter()
        .copied()
        .filter(|&x| {
            let p = marginal.marginal_frequency_from_eg(x);
            p > marginal.marginal_frequency_from_eg(x - h)
                && p > marginal.marginal_frequency_from_eg(x + h)
        })
        .collect();
    maxima.sort_by(f64::total_cmp);
    maxima.dedup_by(|b, a| (*b - *a).abs() <= 1e-6 * scale);

    let mut warning = None;
    if residual > 1e-8 {
        warning = Some(format!("root residual {residual:.3e} above 1e-8"));
    }
    let classification = match maxima.len() {
        1 => PeakStructure::SinglePeak,
        2 => PeakStructure::DoublePeak,
        n => {
            warning = Some(format!(
                "expected 1 or 2 spectral maxima, found {n}{}",
                warning.map(|w| format!("; {w}")).unwrap_or_default()
            ));
            if n <= 1 {
                PeakStructure::SinglePeak
            } else {
                PeakStructure::DoublePeak
            }
        }
    };
    SpectralMaxima {
        atom: *atom,
        maxima,
        classification,
        polynomial_roots,
        warning,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    fn atom(ratio: f64, da: f64) -> AtomParams {
        AtomParams::from_ratios(ratio, da).unwrap()
    }

    #[test]
    fn tiny_ratio_peaks_sit_on_the_bare_resonances() {
        // Γe/Γf → 0: maxima at ω_eg and ω_fe (x = 0 and x = δa).
        let m = optimal_spectral_maxima(&atom(1e-4, 2.5));
        assert_eq!(m.classification, PeakStructure::DoublePeak);
        assert_eq!(m.maxima.len(), 2);
        assert_abs_diff_eq!(m.maxima[0], 0.0, epsilon = 1e-2);
        assert_abs_diff_eq!(m.maxima[1], 2.5, epsilon = 1e-2);
    }

    #[test]
    fn huge_ratio_single_peak_at_half_splitting() {
        // Γf/Γe → 0 with |δa| < Γe: single maximum at ω_fg/2, i.e. δa/2
        // from ω_eg.
        let ge = 1e4;
        let at = atom(ge, 0.5 * ge);
        let m = optimal_spectral_maxima(&at);
        assert_eq!(m.classification, PeakStructure::SinglePeak);
        assert_eq!(m.maxima.len(), 1);
        assert_abs_diff_eq!(m.maxima[0], 0.25 * ge, epsilon = 1e-2 * ge);
    }

    #[test]
    fn degenerate_splitting_gives_one_peak_at_eg() {
        for ratio in [0.1, 1.0, 10.0] {
            let m = optimal_spectral_maxima(&atom(ratio, 0.0));
            assert_eq!(m.classification, PeakStructure::SinglePeak, "ratio {ratio}");
            assert_abs_diff_eq!(m.maxima[0], 0.0, epsilon = 1e-9);
        }
    }

    #[test]
    fn peak_separation_shrinks_as_ratio_grows() {
        // δa = 2.5 Γf: the interference shift pulls the maxima together.
        let mut prev = f64::INFINITY;
        for ratio in [0.1, 0.3, 1.0, 3.0] {
            let m = optimal_spectral_maxima(&atom(ratio, 2.5));
            let sep = match m.maxima.len() {
                2 => m.maxima[1] - m.maxima[0],
                1 => 0.0,
                n => panic!("unexpected count {n} at ratio {ratio}"),
            };
            assert!(sep < 2.5 + 1e-9, "separation not below bare splitting");
            assert!(
                sep <= prev + 1e-9,
                "separation grew at ratio {ratio}: {sep} > {prev}"
            );
            prev = sep;
        }
    }

    #[test]
    fn roots_match_dense_scan_argmaxima() {
        // Independent route: dense scan of the marginal plus golden
        // refinement, compared at 1e−3 Γf.
        for (ratio, da) in [(0.1, 2.5), (1.0, 2.5), (4.0, 1.0), (0.3, 0.8)] {
            let at = atom(ratio, da);
            let m = optimal_spectral_maxima(&at);
            let scanned = dense_scan_maxima(&at);
            assert_eq!(m.maxima.len(), scanned.len(), "count at ({ratio},{da})");
            for (a, b) in m.maxima.iter().zip(&scanned) {
                assert_abs_diff_eq!(a, b, epsilon = 1e-3);
            }
        }
    }

    /// Scan-based argmax oracle, independent of the polynomial route.
    fn dense_scan_maxima(atom: &AtomParams) -> Vec<f64> {
        let p = OptimalStateParams::new(0.0, None, *atom).unwrap();
        let g_big = atom.gamma_e().max(atom.gamma_f());
        let lo = -10.0 * g_big;
        let hi = atom.delta_a() + 10.0 * g_big;
        let n = 10_000;
        let h = (hi - lo) / (n - 1) as f64;
        let vals: Vec<f64> = (0..n)
            .map(|i| p.marginal_frequency_from_eg(lo + i as f64 * h))
            .collect();
        let mut maxima = Vec::new();
        for i in 1..n - 1 {
            if vals[i] > vals[i - 1] && vals[i] > vals[i + 1] {
                // Golden refinement inside the bracket.
                let mut a = lo + (i - 1) as f64 * h;
                let mut b = lo + (i + 1) as f64 * h;
                const INVPHI: f64 = 0.618_033_988_749_894_8;
                let mut x1 = b - INVPHI * (b - a);
                let mut x2 = a + INVPHI * (b - a);
                let mut f1 = p.marginal_frequency_from_eg(x1);
                let mut f2 = p.marginal_frequency_from_eg(x2);
                while b - a > 1e-6 * atom.gamma_f() {
                    if f1 < f2 {
                        a = x1;
                        x1 = x2;
                        f1 = f2;
                        x2 = a + INVPHI * (b - a);
                        f2 = p.marginal_frequency_from_eg(x2);
                    } else {
                        b = x2;
                        x2 = x1;
                        f2 = f1;
                        x1 = b - INVPHI * (b - a);
                        f1 = p.marginal_frequency_from_eg(x1);
                    }
                }
                maxima.push(0.5 * (a + b));
            }
        }
        maxima
    }
}
