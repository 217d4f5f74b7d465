//! Downhill-simplex minimizer in scaled coordinates.
//!
//! Standard Nelder–Mead with reflection/expansion/contraction/shrink.
//! Convergence is declared when the simplex diameter drops below `tol_x`
//! (the caller works in scaled coordinates, so a single tolerance is
//! meaningful across parameters of very different magnitudes).

#[derive(Debug, Clone)]
pub struct NmResult {
    pub x: Vec<f64>,
    pub f: f64,
    pub evals: usize,
    pub converged: bool,
}

pub fn minimize<F: FnMut(&[f64]) -> f64>(
    mut f: F,
    x0: &[f64],
    step: &[f64],
    tol_x: f64,
    max_evals: usize,
) -> NmResult {
    let dim = x0.len();
    assert!(dim >= 1, "need at least one coordinate");
    assert_eq!(step.len(), dim);

    let mut evals = 0usize;
    let mut eval = |x: &[f64], evals: &mut usize| -> f64 {
        *evals += 1;
        let v = f(x);
        if v.is_nan() {
            f64::INFINITY
        } else {
            v
        }
    };

    // Initial simplex: x0 plus one step along each coordinate.
    let mut points: Vec<(Vec<f64>, f64)> = Vec::with_capacity(dim + 1);
    let f0 = eval(x0, &mut evals);
    points.push((x0.to_vec(), f0));
    for i in 0..dim {
        let mut x = x0.to_vec();
        x[i] += step[i];
        let fx = eval(&x, &mut evals);
        points.push((x, fx));
    }

    let (alpha, gamma, rho, sigma) = (1.0, 2.0, 0.5, 0.5);
    let mut converged = false;

    while evals < max_evals {
        points.sort_by(|a, b| a.1.total_cmp(&b.1));
        let diameter = points
            .iter()
            .skip(1)
            .map(|(x, _)| {
                x.iter()
                    .zip(&points[0].0)
                    .map(|(a, b)| (a - b) * (a - b))
                    .sum::<f64>()
                    .sqrt()
            })
            .fold(0.0f64, f64::max);
        if diameter < tol_x {
            converged = true;
            break;
        }

        // Centroid of all but the worst.
        let mut centroid = vec![0.0; dim];
        for (x, _) in points.iter().take(dim) {
            for (c, xi) in centroid.iter_mut().zip(x) {
                *c += xi / dim as f64;
            }
        }
        let worst = points[dim].clone();
        let lerp = |t: f64| -> Vec<f64> {
            centroid
                .iter()
                .zip(&worst.0)
                .map(|(c, w)| c + t * (c - w))
                .collect()
        };

        let reflected = lerp(alpha);
        let f_r = eval(&reflected, &mut evals);
        if f_r < points[0].1 {
            let expanded = lerp(gamma);
            let f_e = eval(&expanded, &mut evals);
            points[dim] = if f_e < f_r {
                (expanded, f_e)
            } else {
                (reflected, f_r)
            };
        } else if f_r < points[dim - 1].1 {
            points[dim] = (reflected, f_r);
        } else {
            let contracted = if f_r < worst.1 {
                lerp(rho) // outside contraction
            } else {
                lerp(-rho) // inside contraction
            };
            let f_c = eval(&contracted, &mut evals);
            if f_c < worst.1.min(f_r) {
                points[dim] = (contracted, f_c);
            } else {
                // Shrink toward the best point.
                let best = points[0].0.clone();
                for (x, fx) in points.iter_mut().skip(1) {
                    for (xi, bi) in x.iter_mut().zip(&best) {
                        *xi = bi + sigma * (*xi - bi);
                    }
                    *fx = eval(x, &mut evals);
                }
            }
        }
    }

    points.sort_by(|a, b| a.1.total_cmp(&b.1));
    let best = points.remove(0);
    NmResult {
        x: best.0,
        f: best.1,
        evals,
        converged,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    #[test]
    fn quadratic_bowl() {
        let out = minimize(
            |x| (x[0] - 1.5).powi(2) + 4.0 * (x[1] + 0.5).powi(2),
            &[0.0, 0.0],
            &[0.5, 0.5],
            1e-8,
            2000,
        );
        assert!(out.converged);
        assert_abs_diff_eq!(out.x[0], 1.5, epsilon = 1e-5);
        assert_abs_diff_eq!(out.x[1], -0.5, epsilon = 1e-5);
    }

    #[test]
    fn rosenbrock_two_dim() {
        let out = minimize(
            |x| (1.0 - x[0]).powi(2) + 100.0 * (x[1] - x[0] * x[0]).powi(2),
            &[-1.2, 1.0],
            &[0.3, 0.3],
            1e-9,
            8000,
        );
        assert!(out.converged);
        assert_abs_diff_eq!(out.x[0], 1.0, epsilon = 1e-4);
        assert_abs_diff_eq!(out.x[1], 1.0, epsilon = 1e-4);
    }

    #[test]
    fn one_dimensional_works() {
        let out = minimize(|x| (x[0] - 3.0).powi(2), &[0.0], &[1.0], 1e-8, 500);
        assert!(out.converged);
        assert_abs_diff_eq!(out.x[0], 3.0, epsilon = 1e-5);
    }

    #[test]
    fn respects_eval_budget() {
        let out = minimize(|x| x[0].powi(2), &[100.0], &[0.1], 1e-14, 20);
        assert!(out.evals <= 22); // budget plus the final shrink evals
        assert!(!out.converged);
    }

    #[test]
    fn nan_objective_is_rejected_not_propagated() {
        let out = minimize(
            |x| {
                if x[0] < 0.0 {
                    f64::NAN
                } else {
                    (x[0] - 0.5).powi(2)
                }
            },
            &[1.0],
            &[0.4],
            1e-8,
            500,
        );
        assert!(out.f.is_finite());
        assert_abs_diff_eq!(out.x[0], 0.5, epsilon = 1e-4);
    }
}
