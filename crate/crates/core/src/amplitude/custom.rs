//! User-supplied tabulated amplitudes on a rectangular grid.
//!
//! The grid is symmetrized and renormalized on ingestion. Evaluation is
//! bilinear, and the renormalization uses the exact integral of the squared
//! bilinear interpolant (not a trapezoid over samples), so the evaluable
//! amplitude satisfies 2∫∫|Φ_sym|² = 1 to rounding.

use std::io::BufRead;
use std::path::Path;

use num_complex::Complex64;

use super::Window;
use crate::error::{Error, Result};

/// Gram matrix of the linear hat functions {1−x, x} on the unit interval.
const GRAM: [[f64; 2]; 2] = [[1.0 / 3.0, 1.0 / 6.0], [1.0 / 6.0, 1.0 / 3.0]];

#[derive(Debug, Clone)]
pub struct CustomAmplitude {
    /// Shared sample coordinates for both photon times, strictly increasing.
    axis: Vec<f64>,
    /// Row-major symmetric values, `values[i * n + j] = Φ_sym(axis[i], axis[j])`.
    values: Vec<Complex64>,
}

impl CustomAmplitude {
    /// Builds an amplitude from raw samples `raw[i * n + j] = Φ(axis[i], axis[j])`.
    /// The data is symmetrized and rescaled so the interpolant is normalized.
    pub fn from_grid(axis: Vec<f64>, raw: Vec<Complex64>) -> Result<Self> {
        let n = axis.len();
        if n < 2 {
            return Err(Error::Domain("custom grid needs at least 2 axis points".into()));
        }
        if raw.len() != n * n {
            return Err(Error::Domain(format!(
                "custom grid needs {} values for {} axis points, got {}",
                n * n,
                n,
                raw.len()
            )));
        }
        if axis.windows(2).any(|w| !(w[1] > w[0])) || axis.iter().any(|x| !x.is_finite()) {
            return Err(Error::Domain("custom grid axis must be strictly increasing".into()));
        }
        if raw.iter().any(|v| !v.re.is_finite() || !v.im.is_finite()) {
            return Err(Error::Domain("custom grid values must be finite".into()));
        }

        let mut values = vec![Complex64::new(0.0, 0.0); n * n];
        for i in 0..n {
            for j in 0..n {
                values[i * n + j] = 0.5 * (raw[i * n + j] + raw[j * n + i]);
            }
        }

        let mut amp = Self { axis, values };
        let norm = 2.0 * amp.squared_interpolant_integral();
        if norm <= 0.0 || !norm.is_finite() {
            return Err(Error::Domain(
                "custom grid has zero or non-finite total weight".into(),
            ));
        }
        let scale = 1.0 / norm.sqrt();
        for v in &mut amp.values {
            *v *= scale;
        }
        Ok(amp)
    }

    /// Loads `t1,t2,re,im` rows (header and `#` comment lines are skipped).
    /// The rows must tile a full rectangular grid with identical t₁ and t₂
    /// coordinate sets.
    pub fn from_csv_reader<R: BufRead>(reader: R) -> Result<Self> {
        let mut rows: Vec<(f64, f64, Complex64)> = Vec::new();
        for (lineno, line) in reader.lines().enumerate() {
            let line = line?;
            let trimmed = line.trim();
            if trimmed.is_empty() || trimmed.starts_with('#') {
                continue;
            }
            let fields: Vec<&str> = trimmed.split(',').map(str::trim).collect();
            if fields.len() != 4 {
                return Err(Error::Parse(format!(
                    "line {}: expected 4 comma-separated fields, got {}",
                    lineno + 1,
                    fields.len()
                )));
            }
            let parse = |s: &str| -> Option<f64> { s.parse().ok() };
            match (
                parse(fields[0]),
                parse(fields[1]),
                parse(fields[2]),
                parse(fields[3]),
            ) {
                (Some(t1), Some(t2), Some(re), Some(im)) => {
                    rows.push((t1, t2, Complex64::new(re, im)));
                }
                _ if rows.is_empty() => continue, // header row
                _ => {
                    return Err(Error::Parse(format!("line {}: non-numeric row", lineno + 1)));
                }
            }
        }
        if rows.is_empty() {
            return Err(Error::Parse("no data rows in amplitude CSV".into()));
        }

        let mut axis: Vec<f64> = rows.iter().map(|r| r.0).collect();
        axis.sort_by(f64::total_cmp);
        axis.dedup();
        let n = axis.len();
        if rows.len() != n * n {
            return Err(Error::Parse(format!(
                "expected a full {n}×{n} grid ({} rows), got {} rows",
                n * n,
                rows.len()
            )));
        }
        let index_of = |x: f64| -> Result<usize> {
            axis.binary_search_by(|a| a.total_cmp(&x))
                .map_err(|_| Error::Parse(format!("coordinate {x} not on the shared grid axis")))
        };
        let mut raw = vec![Complex64::new(0.0, 0.0); n * n];
        let mut seen = vec![false; n * n];
        for (t1, t2, v) in rows {
            let (i, j) = (index_of(t1)?, index_of(t2)?);
            if seen[i * n + j] {
                return Err(Error::Parse(format!("duplicate grid point ({t1}, {t2})")));
            }
            seen[i * n + j] = true;
            raw[i * n + j] = v;
        }
        if !seen.iter().all(|&s| s) {
            return Err(Error::Parse("grid is missing points (t1/t2 axes differ?)".into()));
        }
        Self::from_grid(axis, raw)
    }

    pub fn from_csv_path<P: AsRef<Path>>(path: P) -> Result<Self> {
        let file = std::fs::File::open(path)?;
        Self::from_csv_reader(std::io::BufReader::new(file))
    }

    pub fn axis(&self) -> &[f64] {
        &self.axis
    }

    pub fn values(&self) -> &[Complex64] {
        &self.values
    }

    pub fn support(&self) -> Window {
        Window::new(self.axis[0], *self.axis.last().unwrap())
    }

    pub fn evaluate_symmetric(&self, t1: f64, t2: f64) -> Complex64 {
        let n = self.axis.len();
        let Some((i, x)) = self.locate(t1) else {
            return Complex64::new(0.0, 0.0);
        };
        let Some((j, y)) = self.locate(t2) else {
            return Complex64::new(0.0, 0.0);
        };
        let f00 = self.values[i * n + j];
        let f10 = self.values[(i + 1) * n + j];
        let f01 = self.values[i * n + j + 1];
        let f11 = self.values[(i + 1) * n + j + 1];
        f00 * ((1.0 - x) * (1.0 - y))
            + f10 * (x * (1.0 - y))
            + f01 * ((1.0 - x) * y)
            + f11 * (x * y)
    }

    /// Cell index and fractional coordinate along the axis, `None` outside.
    fn locate(&self, t: f64) -> Option<(usize, f64)> {
        let n = self.axis.len();
        if t < self.axis[0] || t > self.axis[n - 1] {
            return None;
        }
        let i = match self.axis.binary_search_by(|a| a.total_cmp(&t)) {
            Ok(i) => i.min(n - 2),
            Err(i) => i - 1,
        };
        let h = self.axis[i + 1] - self.axis[i];
        Some((i, (t - self.axis[i]) / h))
    }

    /// ∫∫ |Φ̂|² of the bilinear interpolant, cell-exact.
    fn squared_interpolant_integral(&self) -> f64 {
        let n = self.axis.len();
        let mut total = 0.0;
        for i in 0..n - 1 {
            let hx = self.axis[i + 1] - self.axis[i];
            for j in 0..n - 1 {
                let hy = self.axis[j + 1] - self.axis[j];
                let corners = [
                    (self.values[i * n + j], 0usize, 0usize),
                    (self.values[(i + 1) * n + j], 1, 0),
                    (self.values[i * n + j + 1], 0, 1),
                    (self.values[(i + 1) * n + j + 1], 1, 1),
                ];
                let mut cell = 0.0;
                for &(fp, xp, yp) in &corners {
                    for &(fq, xq, yq) in &corners {
                        cell += (fp * fq.conj()).re * GRAM[xp][xq] * GRAM[yp][yq];
                    }
                }
                total += cell * hx * hy;
            }
        }
        total
    }

    /// 2∫|Φ_sym(t, s)|² ds, exact for the interpolant (used for the time
    /// marginal of tabulated amplitudes).
    pub fn marginal_time(&self, t: f64) -> f64 {
        let n = self.axis.len();
        if self.locate(t).is_none() {
            return 0.0;
        }
        let mut acc = 0.0;
        for j in 0..n - 1 {
            let h = self.axis[j + 1] - self.axis[j];
            let a = self.evaluate_symmetric(t, self.axis[j]);
            let b = self.evaluate_symmetric(t, self.axis[j + 1]);
            // ∫₀¹ |a(1−u) + b u|² du
            acc += h * (a.norm_sqr() + b.norm_sqr() + (a * b.conj()).re) / 3.0;
        }
        2.0 * acc
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::{assert_abs_diff_eq, assert_relative_eq};

    fn sample_gaussian_grid(n: usize, reach: f64) -> CustomAmplitude {
        let axis: Vec<f64> = (0..n)
            .map(|i| -reach + 2.0 * reach * i as f64 / (n - 1) as f64)
            .collect();
        let mut raw = Vec::with_capacity(n * n);
        for &t1 in &axis {
            for &t2 in &axis {
                // Deliberately asymmetric input; ingestion symmetrizes.
                let v = (-(t1 * t1) - 0.5 * (t2 - 0.3) * (t2 - 0.3)).exp();
                raw.push(Complex64::new(v, 0.2 * v * t1));
            }
        }
        CustomAmplitude::from_grid(axis, raw).unwrap()
    }

    #[test]
    fn ingestion_symmetrizes_and_normalizes_exactly() {
        let amp = sample_gaussian_grid(41, 5.0);
        let v = amp.evaluate_symmetric(0.7, -1.1);
        let w = amp.evaluate_symmetric(-1.1, 0.7);
        assert_eq!(v, w);
        // The interpolant integral is exact, so 2∫∫|Φ|² is 1 to rounding.
        assert_relative_eq!(
            2.0 * amp.squared_interpolant_integral(),
            1.0,
            max_relative = 1e-12
        );
    }

    #[test]
    fn marginal_matches_quadrature_of_interpolant() {
        let amp = sample_gaussian_grid(61, 5.0);
        let t = 0.4;
        let numeric = crate::quad::integrate_real(
            |s| 2.0 * amp.evaluate_symmetric(t, s).norm_sqr(),
            -5.0,
            5.0,
            1e-10,
            1e-13,
            44,
        );
        assert_relative_eq!(amp.marginal_time(t), numeric.value.re, max_relative = 1e-7);
    }

    #[test]
    fn csv_round_trip() {
        let amp = sample_gaussian_grid(21, 4.0);
        let mut csv = String::from("# test amplitude\nt1,t2,re,im\n");
        for (i, &t1) in amp.axis().iter().enumerate() {
            for (j, &t2) in amp.axis().iter().enumerate() {
                let v = amp.values()[i * amp.axis().len() + j];
                csv.push_str(&format!("{t1},{t2},{},{}\n", v.re, v.im));
            }
        }
        let back = CustomAmplitude::from_csv_reader(csv.as_bytes()).unwrap();
        assert_eq!(back.axis().len(), 21);
        for (t1, t2) in [(0.0, 0.0), (1.3, -2.2), (-0.5, 3.9)] {
            let a = amp.evaluate_symmetric(t1, t2);
            let b = back.evaluate_symmetric(t1, t2);
            assert_abs_diff_eq!(a.re, b.re, epsilon = 1e-12);
            assert_abs_diff_eq!(a.im, b.im, epsilon = 1e-12);
        }
    }

    #[test]
    fn rejects_malformed_grids() {
        assert!(CustomAmplitude::from_grid(vec![0.0], vec![Complex64::new(1.0, 0.0)]).is_err());
        assert!(CustomAmplitude::from_grid(
            vec![0.0, 1.0],
            vec![Complex64::new(1.0, 0.0); 3]
        )
        .is_err());
        assert!(CustomAmplitude::from_grid(
            vec![0.0, 0.0],
            vec![Complex64::new(1.0, 0.0); 4]
        )
        .is_err());
        assert!(CustomAmplitude::from_grid(
            vec![0.0, 1.0],
            vec![Complex64::new(0.0, 0.0); 4]
        )
        .is_err());
        // Incomplete rectangular coverage
        let csv = "0,0,1,0\n0,1,1,0\n1,0,1,0\n";
        assert!(CustomAmplitude::from_csv_reader(csv.as_bytes()).is_err());
    }

    #[test]
    fn zero_outside_grid() {
        let amp = sample_gaussian_grid(21, 3.0);
        assert_eq!(amp.evaluate_symmetric(3.1, 0.0).norm(), 0.0);
        assert_eq!(amp.evaluate_symmetric(0.0, -3.01).norm(), 0.0);
    }
}
