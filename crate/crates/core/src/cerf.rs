//! Complex-Gaussian segment integrals and stable exponential quotients.
//!
//! The workhorse here is [`gaussian_segment`], the closed form of
//! ∫ exp(−a(t−m)² + bt + k) dt over a finite segment with complex b and k.
//! Written naively in terms of erf it overflows long before the value of the
//! integral does, so it is assembled from the scaled complementary error
//! function erfcx with all exponentials evaluated at segment endpoints,
//! where they equal the (bounded) integrand itself.

use errorfunctions::ComplexErrorFunctions;
use num_complex::Complex64;

const SQRT_PI: f64 = 1.772_453_850_905_516;

/// ∫_lo^hi exp(−a (t − m)² + b t + k) dt for real a > 0.
///
/// The magnitude of the result is governed by the integrand on the segment,
/// never by the analytic continuation outside it, so parameter combinations
/// whose erf arguments would overflow are safe as long as the integrand is.
pub fn gaussian_segment(a: f64, m: f64, b: Complex64, k: Complex64, lo: f64, hi: f64) -> Complex64 {
    debug_assert!(a > 0.0, "gaussian_segment needs a > 0, got {a}");
    if lo == hi {
        return Complex64::new(0.0, 0.0);
    }
    if lo > hi {
        return -gaussian_segment(a, m, b, k, hi, lo);
    }
    let sqrt_a = a.sqrt();
    // Completed square: −a(t−c)² + g, with the segment endpoints mapped to
    // z(x) = √a (x − c). Re z is increasing in x.
    let c = Complex64::new(m, 0.0) + b / (2.0 * a);
    let g = b * m + b * b / (4.0 * a) + k;
    let z_lo = sqrt_a * (Complex64::new(lo, 0.0) - c);
    let z_hi = sqrt_a * (Complex64::new(hi, 0.0) - c);
    // log of the integrand at an endpoint; equals g − z(x)² exactly.
    let log_f = |x: f64| b * x - a * (x - m) * (x - m) + k;

    let prefac = SQRT_PI / (2.0 * sqrt_a);
    // The integral is E·(√π/2√a)·[erf(z_hi) − erf(z_lo)] with E = e^g.
    // Rewrite through erfc so that every exponential is an endpoint value.
    match (z_lo.re >= 0.0, z_hi.re >= 0.0) {
        (true, true) => {
            // erf(z_hi) − erf(z_lo) = erfc(z_lo) − erfc(z_hi)
            let lo_term = log_f(lo).exp() * z_lo.erfcx();
            let hi_term = log_f(hi).exp() * z_hi.erfcx();
            prefac * (lo_term - hi_term)
        }
        (false, false) => {
            // Reflect both: erfc(z) = 2 − erfc(−z); the constants cancel.
            let lo_term = log_f(lo).exp() * (-z_lo).erfcx();
            let hi_term = log_f(hi).exp() * (-z_hi).erfcx();
            prefac * (hi_term - lo_term)
        }
        (false, true) => {
            // Segment straddles the saddle: e^g is the envelope maximum on
            // the segment, so it is as bounded as the integral itself.
            let lo_term = log_f(lo).exp() * (-z_lo).erfcx();
            let hi_term = log_f(hi).exp() * z_hi.erfcx();
            prefac * (2.0 * g.exp() - lo_term - hi_term)
        }
        (true, false) => unreachable!("Re z is increasing along the segment"),
    }
}

/// (e^x − 1)/x, accurate through x = 0.
pub fn expm1_over(x: f64) -> f64 {
    if x.abs() < 1e-3 {
        1.0 + x / 2.0 + x * x / 6.0 + x * x * x / 24.0
    } else {
        x.exp_m1() / x
    }
}

/// sinh(x)/x, accurate through x = 0.
pub fn sinhc(x: f64) -> f64 {
    if x.abs() < 1e-3 {
        let x2 = x * x;
        1.0 + x2 / 6.0 + x2 * x2 / 120.0
    } else {
        x.sinh() / x
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    /// Plain midpoint-refined Simpson reference for the segment integral.
    fn simpson_reference(
        a: f64,
        m: f64,
        b: Complex64,
        k: Complex64,
        lo: f64,
        hi: f64,
        n: usize,
    ) -> Complex64 {
        let h = (hi - lo) / n as f64;
        let f = |t: f64| (-a * (t - m) * (t - m) + b * t + k).exp();
        let mut acc = f(lo) + f(hi);
        for i in 1..n {
            let w = if i % 2 == 1 { 4.0 } else { 2.0 };
            acc += w * f(lo + i as f64 * h);
        }
        acc * h / 3.0
    }

    #[test]
    fn matches_simpson_on_assorted_segments() {
        let cases = [
            (1.0, 0.0, Complex64::new(0.3, 1.7), Complex64::new(0.0, 0.0), -2.0, 3.0),
            (0.25, 1.5, Complex64::new(-0.8, 4.0), Complex64::new(0.2, -1.0), 0.0, 6.0),
            (4.0, -2.0, Complex64::new(2.0, -3.0), Complex64::new(-0.5, 0.4), -5.0, -1.0),
            (0.04, 10.0, Complex64::new(0.05, 0.6), Complex64::new(0.0, 0.0), -30.0, 4.0),
        ];
        for (a, m, b, k, lo, hi) in cases {
            let exact = gaussian_segment(a, m, b, k, lo, hi);
            let reference = simpson_reference(a, m, b, k, lo, hi, 20_000);
            assert_relative_eq!(exact.re, reference.re, max_relative = 1e-9, epsilon = 1e-12);
            assert_relative_eq!(exact.im, reference.im, max_relative = 1e-9, epsilon = 1e-12);
        }
    }

    #[test]
    fn full_line_limit_recovers_gaussian_integral() {
        // lo, hi far in the tails: ∫ = √(π/a) e^{b²/4a + bm + k}
        let a = 0.7;
        let m = 0.3;
        let b = Complex64::new(0.4, -1.1);
        let k = Complex64::new(0.1, 0.2);
        let got = gaussian_segment(a, m, b, k, m - 40.0, m + 40.0);
        let expect = (SQRT_PI / a.sqrt()) * (b * b / (4.0 * a) + b * m + k).exp();
        assert_relative_eq!(got.re, expect.re, max_relative = 1e-12);
        assert_relative_eq!(got.im, expect.im, max_relative = 1e-12);
    }

    #[test]
    fn survives_strong_exponential_weights() {
        // A damping weight e^{50 t} over a segment ending at 0: the naive
        // erf form overflows; the integrand stays ≤ 1 on the segment.
        let a = 0.5;
        let m = 0.0;
        let b = Complex64::new(50.0, 2.0);
        let got = gaussian_segment(a, m, b, Complex64::new(0.0, 0.0), -200.0, 0.0);
        assert!(got.is_finite());
        let reference = simpson_reference(a, m, b, Complex64::new(0.0, 0.0), -3.0, 0.0, 60_000);
        assert_relative_eq!(got.re, reference.re, max_relative = 1e-8);
        assert_relative_eq!(got.im, reference.im, max_relative = 1e-8);
    }

    #[test]
    fn orientation_and_degenerate_segment() {
        let a = 1.0;
        let b = Complex64::new(0.0, 1.0);
        let z = Complex64::new(0.0, 0.0);
        assert_eq!(gaussian_segment(a, 0.0, b, z, 1.0, 1.0), z);
        let fwd = gaussian_segment(a, 0.0, b, z, -1.0, 2.0);
        let rev = gaussian_segment(a, 0.0, b, z, 2.0, -1.0);
        assert_eq!(fwd, -rev);
    }

    #[test]
    fn stable_quotients() {
        assert_relative_eq!(expm1_over(1e-12), 1.0, max_relative = 1e-12);
        assert_relative_eq!(expm1_over(0.5), (0.5f64.exp() - 1.0) / 0.5, max_relative = 1e-14);
        assert_relative_eq!(sinhc(0.0), 1.0);
        assert_relative_eq!(sinhc(2.0), 2.0f64.sinh() / 2.0, max_relative = 1e-14);
    }
}
