//! Real-coefficient polynomial roots via simultaneous Aberth–Ehrlich
//! iteration, with exact deflation of zero roots and a Newton polish.
//!
//! Degenerate level splittings produce odd quintics whose companion
//! matrices send LAPACK-style QR iterations into livelock; the
//! simultaneous iteration has no such failure mode and still delivers
//! every root at once.

use num_complex::Complex64;

/// Roots of Σ c_k x^k (coefficients in ascending order). Leading
/// coefficients that are negligibly small relative to the largest one are
/// trimmed first. Returns all complex roots plus the worst polished
/// residual, scaled by the coefficient magnitude.
pub fn roots(coeffs: &[f64]) -> (Vec<Complex64>, f64) {
    let max_c = coeffs.iter().fold(0.0f64, |m, c| m.max(c.abs()));
    if max_c == 0.0 {
        return (Vec::new(), 0.0);
    }
    let mut degree = coeffs.len() - 1;
    while degree > 0 && coeffs[degree].abs() < 1e-14 * max_c {
        degree -= 1;
    }
    if degree == 0 {
        return (Vec::new(), 0.0);
    }

    // Deflate exact zero roots: x | p(x) whenever the constant term is an
    // exact structural zero (degenerate-splitting quintics).
    let mut low = 0;
    while low < degree && coeffs[low] == 0.0 {
        low += 1;
    }
    let mut out: Vec<Complex64> = vec![Complex64::new(0.0, 0.0); low];
    let work: Vec<f64> = coeffs[low..=degree].to_vec();
    let n = work.len() - 1;

    if n > 0 {
        let eval = |c: &[f64], z: Complex64| -> (Complex64, Complex64) {
            let mut p = Complex64::new(0.0, 0.0);
            let mut dp = Complex64::new(0.0, 0.0);
            for &ck in c.iter().rev() {
                dp = dp * z + p;
                p = p * z + ck;
            }
            (p, dp)
        };

        // Cauchy bound for the root radius, starting points on a circle.
        let lead = work[n];
        let radius = 1.0
            + work[..n]
                .iter()
                .fold(0.0f64, |m, c| m.max((c / lead).abs()));
        let mut z: Vec<Complex64> = (0..n)
            .map(|k| {
                let angle = 2.0 * std::f64::consts::PI * k as f64 / n as f64 + 0.4;
                radius * Complex64::new(angle.cos(), angle.sin())
            })
            .collect();

        for _ in 0..200 {
            let mut moved = 0.0f64;
            for k in 0..n {
                let (p, dp) = eval(&work, z[k]);
                if p.norm() == 0.0 {
                    continue;
                }
                let newton = if dp.norm() > 0.0 {
                    p / dp
                } else {
                    Complex64::new(1e-8, 1e-8)
                };
                let mut repulsion = Complex64::new(0.0, 0.0);
                for (j, zj) in z.iter().enumerate() {
                    if j != k {
                        let dz = z[k] - zj;
                        if dz.norm() > 0.0 {
                            repulsion += dz.inv();
                        }
                    }
                }
                let denom = Complex64::new(1.0, 0.0) - newton * repulsion;
                let step = if denom.norm() > 1e-300 {
                    newton / denom
                } else {
                    newton
                };
                z[k] -= step;
                moved = moved.max(step.norm() / (1.0 + z[k].norm()));
            }
            if moved < 1e-15 {
                break;
            }
        }
        // Newton polish against the full (undeflated) polynomial.
        for zk in &mut z {
            for _ in 0..2 {
                let (p, dp) = eval(&work, *zk);
                if dp.norm() > 0.0 {
                    let step = p / dp;
                    if step.norm() < 1.0 + zk.norm() {
                        *zk -= step;
                    }
                }
            }
        }
        out.extend(z);
    }

    // Residuals on the original polynomial.
    let eval_full = |z: Complex64| -> Complex64 {
        let mut p = Complex64::new(0.0, 0.0);
        for &ck in coeffs[..=degree].iter().rev() {
            p = p * z + ck;
        }
        p
    };
    let mut worst = 0.0f64;
    for &z in &out {
        let scale = max_c * (1.0 + z.norm()).powi(degree as i32);
        worst = worst.max(eval_full(z).norm() / scale);
    }
    (out, worst)
}

/// Real roots of the polynomial, sorted and deduplicated within `merge_tol`.
pub fn real_roots(coeffs: &[f64], merge_tol: f64) -> (Vec<f64>, f64) {
    let (all, residual) = roots(coeffs);
    let mut reals: Vec<f64> = all
        .iter()
        .filter(|z| z.im.abs() <= 1e-7 * (1.0 + z.re.abs()))
        .map(|z| z.re)
        .collect();
    reals.sort_by(f64::total_cmp);
    reals.dedup_by(|b, a| (*b - *a).abs() <= merge_tol);
    (reals, residual)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    #[test]
    fn quadratic_roots() {
        // (x−2)(x+3) = x² + x − 6
        let (r, res) = real_roots(&[-6.0, 1.0, 1.0], 1e-9);
        assert_eq!(r.len(), 2);
        assert_abs_diff_eq!(r[0], -3.0, epsilon = 1e-10);
        assert_abs_diff_eq!(r[1], 2.0, epsilon = 1e-10);
        assert!(res < 1e-10);
    }

    #[test]
    fn complex_pair_is_filtered() {
        // (x²+1)(x−1) = x³ − x² + x − 1
        let (r, _) = real_roots(&[-1.0, 1.0, -1.0, 1.0], 1e-9);
        assert_eq!(r, vec![1.0]);
    }

    #[test]
    fn trims_negligible_leading_coefficients() {
        // Effectively linear: 1e−20·x³ + 2x − 4
        let (r, _) = real_roots(&[-4.0, 2.0, 0.0, 1e-20], 1e-9);
        assert_eq!(r.len(), 1);
        assert_abs_diff_eq!(r[0], 2.0, epsilon = 1e-10);
    }

    #[test]
    fn quintic_with_known_roots() {
        // (x−1)(x+1)(x−2)(x+2)(x−3) = x⁵ −3x⁴ −5x³ +15x² +4x −12
        let coeffs = [-12.0, 4.0, 15.0, -5.0, -3.0, 1.0];
        let (r, res) = real_roots(&coeffs, 1e-9);
        assert_eq!(r.len(), 5);
        for (got, want) in r.iter().zip([-2.0, -1.0, 1.0, 2.0, 3.0]) {
            assert_abs_diff_eq!(*got, want, epsilon = 1e-9);
        }
        assert!(res < 1e-12);
    }

    #[test]
    fn odd_quintic_with_structural_zero() {
        // x(x²−1)(x²+4) = x⁵ + 3x³ − 4x: the zero root deflates exactly.
        let coeffs = [0.0, -4.0, 0.0, 3.0, 0.0, 1.0];
        let (r, res) = real_roots(&coeffs, 1e-9);
        assert_eq!(r.len(), 3);
        assert_abs_diff_eq!(r[0], -1.0, epsilon = 1e-10);
        assert_abs_diff_eq!(r[1], 0.0, epsilon = 0.0);
        assert_abs_diff_eq!(r[2], 1.0, epsilon = 1e-10);
        assert!(res < 1e-12);
    }

    #[test]
    fn widely_scaled_roots() {
        // (x − 1e-4)(x − 1e3): badly scaled but low degree.
        let coeffs = [1e-1, -(1e-4 + 1e3), 1.0];
        let (r, _) = real_roots(&coeffs, 0.0);
        assert_eq!(r.len(), 2);
        assert_abs_diff_eq!(r[0], 1e-4, epsilon = 1e-10);
        assert_abs_diff_eq!(r[1], 1e3, epsilon = 1e-6);
    }

    #[test]
    fn clustered_simple_roots_still_resolve() {
        // Five simple roots, two pairs only 1e−3 and 5e−4 apart.
        let targets = [-2.0005, -2.0, 1.0, 1.001, 5.0];
        let mut poly = vec![1.0]; // ascending coefficients
        for root in targets {
            let mut next = vec![0.0; poly.len() + 1];
            for (i, &p) in poly.iter().enumerate() {
                next[i + 1] += p;
                next[i] -= root * p;
            }
            poly = next;
        }
        let (r, _) = real_roots(&poly, 1e-9);
        assert_eq!(r.len(), 5, "roots: {r:?}");
        for (got, want) in r.iter().zip(targets) {
            assert_abs_diff_eq!(*got, want, epsilon = 1e-6);
        }
    }
}
