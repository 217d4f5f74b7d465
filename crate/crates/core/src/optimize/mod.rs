//! Derivative-free optimization of peak excitation over pulse parameters,
//! and atom-parameter sweeps for heatmap data.
//!
//! Multistart Nelder–Mead in scaled coordinates: widths in log space
//! (positivity for free), delays in units of 1/Γe, detunings in units of
//! max(Γf, |δ_a|). Starts combine physics-informed seeds (widths near Γe,
//! Γf, Γe+Γf, 2Γe+Γf; delays near 0 and 1/Γe; carrier splittings near 0
//! and δ_a) with a Latin-hypercube cloud around them.

mod nelder_mead;

pub use nelder_mead::{minimize, NmResult};

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::amplitude::{
    CoherentPulseParams, CorrelatedGaussianParams, GaussianProductParams, TwoPhotonAmplitude,
};
use crate::atom::AtomParams;
use crate::dynamics::{rho_ff_peak, OdeConfig};
use crate::error::{Error, Result};
use crate::excitation::{pf_peak_with_hint, QuadratureConfig};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum ConstraintTag {
    /// δ_f = 0 and carrier sum on the two-photon resonance.
    DegenerateResonant,
    /// Carrier sum on the two-photon resonance, δ_f free.
    TwoPhotonResonant,
    /// No carrier constraints.
    FullyFree,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct ConstraintMode {
    pub tag: ConstraintTag,
    /// Whether the inter-photon delay μ is optimized (otherwise pinned 0).
    pub mu_free: bool,
}

impl ConstraintMode {
    pub fn degenerate_resonant(mu_free: bool) -> Self {
        Self {
            tag: ConstraintTag::DegenerateResonant,
            mu_free,
        }
    }

    pub fn two_photon_resonant(mu_free: bool) -> Self {
        Self {
            tag: ConstraintTag::TwoPhotonResonant,
            mu_free,
        }
    }

    fn delta_f_free(&self) -> bool {
        !matches!(self.tag, ConstraintTag::DegenerateResonant)
    }

    fn carrier_sum_free(&self) -> bool {
        matches!(self.tag, ConstraintTag::FullyFree)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum OptimizeFamily {
    GaussianProduct,
    CorrelatedGaussian,
    Coherent,
}

impl std::fmt::Display for OptimizeFamily {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{self:?}")
    }
}

#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct OptimizeOptions {
    /// Total objective-evaluation budget across all starts (≥ 200).
    pub budget: usize,
    /// Number of multistart runs (≥ 8 recommended).
    pub starts: usize,
    /// RNG seed for the Latin-hypercube starts.
    pub seed: u64,
    /// Mean photon number for the coherent family.
    pub n_bar: f64,
    pub quad: QuadratureConfig,
    pub ode: OdeConfig,
}

impl Default for OptimizeOptions {
    fn default() -> Self {
        Self {
            budget: 2000,
            starts: 8,
            seed: 0,
            n_bar: 2.0,
            quad: QuadratureConfig::fast(),
            ode: OdeConfig::default(),
        }
    }
}

/// Family parameter record at the optimum.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
#[serde(tag = "family")]
pub enum BestParams {
    GaussianProduct(GaussianProductParams),
    CorrelatedGaussian(CorrelatedGaussianParams),
    Coherent(CoherentPulseParams),
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct OptimizationRecord {
    pub atom: AtomParams,
    pub family: OptimizeFamily,
    pub mode: ConstraintMode,
    pub best_params: BestParams,
    pub pf_max: f64,
    pub t_peak: f64,
    pub starts: usize,
    pub converged: bool,
    pub objective_evals: usize,
}

/// Scaled-coordinate layout for one family/mode combination.
struct CoordMap {
    family: OptimizeFamily,
    mode: ConstraintMode,
    mu_scale: f64,
    detuning_scale: f64,
    /// Admissible log-width range: e^±5 around the atomic rate scales.
    /// Outside it the objective is rejected, which keeps integration
    /// windows bounded.
    ln_width_range: (f64, f64),
}

impl CoordMap {
    fn new(atom: &AtomParams, family: OptimizeFamily, mode: ConstraintMode) -> Self {
        let (ge, gf) = (atom.gamma_e(), atom.gamma_f());
        let ln_lo = ge.min(gf).ln() - 5.0;
        let ln_hi = (2.0 * ge + gf).ln() + 5.0;
        Self {
            family,
            mode,
            mu_scale: 1.0 / atom.gamma_e(),
            detuning_scale: atom.gamma_f().max(atom.delta_a().abs()),
            ln_width_range: (ln_lo, ln_hi),
        }
    }

    fn dim(&self) -> usize {
        match self.family {
            OptimizeFamily::Coherent => {
                1 + usize::from(self.mode.carrier_sum_free())
            }
            _ => {
                2 + usize::from(self.mode.mu_free)
                    + usize::from(self.mode.delta_f_free())
                    + usize::from(self.mode.carrier_sum_free())
            }
        }
    }

    /// (ln w1, ln w2[, μ/μs][, δf/fs][, csd/fs]) → concrete parameters.
    fn params(&self, x: &[f64], n_bar: f64) -> Result<BestParams> {
        let (ln_lo, ln_hi) = self.ln_width_range;
        let w = |ln_w: f64| -> Result<f64> {
            if !(ln_lo..=ln_hi).contains(&ln_w) {
                return Err(Error::Domain("width out of range".into()));
            }
            Ok(ln_w.exp())
        };
        match self.family {
            OptimizeFamily::Coherent => {
                let width = w(x[0])?;
                let detuning = if self.mode.carrier_sum_free() {
                    x[1] * self.detuning_scale
                } else {
                    0.0
                };
                Ok(BestParams::Coherent(CoherentPulseParams::new(
                    width, n_bar, detuning, 0.0,
                )?))
            }
            family => {
                let w1 = w(x[0])?;
                let w2 = w(x[1])?;
                if x[2..].iter().any(|v| v.abs() > 100.0) {
                    return Err(Error::Domain("delay/detuning out of range".into()));
                }
                let mut k = 2;
                let mu = if self.mode.mu_free {
                    k += 1;
                    x[k - 1] * self.mu_scale
                } else {
                    0.0
                };
                let delta_f = if self.mode.delta_f_free() {
                    k += 1;
                    x[k - 1] * self.detuning_scale
                } else {
                    0.0
                };
                let csd = if self.mode.carrier_sum_free() {
                    k += 1;
                    x[k - 1] * self.detuning_scale
                } else {
                    0.0
                };
                match family {
                    OptimizeFamily::GaussianProduct => Ok(BestParams::GaussianProduct(
                        GaussianProductParams::new(w1, w2, mu, delta_f, csd)?,
                    )),
                    OptimizeFamily::CorrelatedGaussian => Ok(BestParams::CorrelatedGaussian(
                        CorrelatedGaussianParams::new(w1, w2, mu, delta_f, csd)?,
                    )),
                    OptimizeFamily::Coherent => unreachable!(),
                }
            }
        }
    }

    /// Physics-informed start points plus a Latin-hypercube cloud.
    fn starts(&self, atom: &AtomParams, n: usize, seed: u64) -> Vec<Vec<f64>> {
        let (ge, gf) = (atom.gamma_e(), atom.gamma_f());
        let da = atom.delta_a();
        let widths = [ge, gf, ge + gf, 2.0 * ge + gf];
        let ln_lo = widths.iter().cloned().fold(f64::INFINITY, f64::min).ln() - 0.7;
        let ln_hi = widths.iter().cloned().fold(0.0f64, f64::max).ln() + 0.7;
        let df_scaled = da / self.detuning_scale;

        fn push(seeds: &mut Vec<Vec<f64>>, v: Vec<f64>) {
            if !seeds.contains(&v) {
                seeds.push(v);
            }
        }
        let mut seeds: Vec<Vec<f64>> = Vec::new();
        let canonical = match self.family {
            OptimizeFamily::Coherent => vec![
                vec![(ge + gf).ln()],
                vec![gf.ln()],
                vec![(2.0 * ge + gf).ln()],
                vec![ge.ln()],
            ],
            _ => vec![
                vec![ge.ln(), (ge + gf).ln(), 1.0, df_scaled],
                vec![gf.ln(), gf.ln(), 0.0, 0.0],
                vec![(ge + gf).ln(), (ge + gf).ln(), 0.0, df_scaled],
                vec![gf.ln(), (2.0 * ge + gf).ln(), 0.0, 0.0],
                vec![ge.ln(), (2.0 * ge + gf).ln(), 1.0, 0.0],
                vec![(ge + gf).ln(), gf.ln(), 0.5, df_scaled],
            ],
        };
        for c in canonical {
            push(&mut seeds, self.project(&c));
        }

        // Latin hypercube over the seed box for the remaining starts.
        let dim = self.dim();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let remaining = n.saturating_sub(seeds.len());
        if remaining > 0 {
            let mut strata: Vec<Vec<usize>> = (0..dim)
                .map(|_| {
                    let mut idx: Vec<usize> = (0..remaining).collect();
                    for i in (1..idx.len()).rev() {
                        let j = rng.random_range(0..=i);
                        idx.swap(i, j);
                    }
                    idx
                })
                .collect();
            for s in 0..remaining {
                let mut x = Vec::with_capacity(dim);
                for (d, strat) in strata.iter_mut().enumerate() {
                    let u: f64 = rng.random();
                    let frac = (strat[s] as f64 + u) / remaining as f64;
                    let v = match self.coord_kind(d) {
                        CoordKind::LogWidth => ln_lo + (ln_hi - ln_lo) * frac,
                        CoordKind::Mu => -0.5 + 2.0 * frac,
                        CoordKind::Detuning => {
                            let lo = df_scaled.min(0.0) - 0.5;
                            let hi = df_scaled.max(0.0) + 0.5;
                            lo + (hi - lo) * frac
                        }
                    };
                    x.push(v);
                }
                push(&mut seeds, x);
            }
        }
        seeds.truncate(n.max(1));
        seeds
    }

    fn coord_kind(&self, d: usize) -> CoordKind {
        match self.family {
            OptimizeFamily::Coherent => {
                if d == 0 {
                    CoordKind::LogWidth
                } else {
                    CoordKind::Detuning
                }
            }
            _ => {
                if d < 2 {
                    return CoordKind::LogWidth;
                }
                let mut k = 2;
                if self.mode.mu_free {
                    if d == k {
                        return CoordKind::Mu;
                    }
                    k += 1;
                }
                if self.mode.delta_f_free() && d == k {
                    return CoordKind::Detuning;
                }
                CoordKind::Detuning
            }
        }
    }

    /// Drops the canonical 4-vector down to the active coordinates.
    fn project(&self, full: &[f64]) -> Vec<f64> {
        match self.family {
            OptimizeFamily::Coherent => {
                let mut v = vec![full[0]];
                if self.mode.carrier_sum_free() {
                    v.push(0.0);
                }
                v
            }
            _ => {
                let mut v = vec![full[0], full[1]];
                if self.mode.mu_free {
                    v.push(full[2]);
                }
                if self.mode.delta_f_free() {
                    v.push(full[3]);
                }
                if self.mode.carrier_sum_free() {
                    v.push(0.0);
                }
                v
            }
        }
    }
}

enum CoordKind {
    LogWidth,
    Mu,
    Detuning,
}

/// Maximizes peak excitation for the family under the given constraint
/// mode. Deterministic for a fixed seed.
pub fn optimize(
    atom: &AtomParams,
    family: OptimizeFamily,
    mode: ConstraintMode,
    opts: &OptimizeOptions,
) -> Result<OptimizationRecord> {
    if opts.budget < 200 {
        return Err(Error::Domain(format!(
            "optimizer budget must be at least 200 evaluations, got {}",
            opts.budget
        )));
    }
    let map = CoordMap::new(atom, family, mode);
    let starts = map.starts(atom, opts.starts.max(8), opts.seed);
    let per_start = (opts.budget / starts.len()).max(60);

    let mut total_evals = 0usize;
    let mut best: Option<(f64, Vec<f64>, bool)> = None; // (pf, coords, converged)

    for start in &starts {
        // Warm-start state for the peak search within this run.
        let mut hint: Option<(f64, f64)> = None; // (last_arrival, t_peak)
        let mut run_evals = 0usize;
        let objective = |x: &[f64]| -> f64 {
            run_evals += 1;
            let Ok(params) = map.params(x, opts.n_bar) else {
                return f64::INFINITY;
            };
            match &params {
                BestParams::Coherent(pulse) => match rho_ff_peak(atom, pulse, &opts.ode) {
                    Ok(peak) => -peak.value,
                    Err(_) => f64::INFINITY,
                },
                BestParams::GaussianProduct(_) | BestParams::CorrelatedGaussian(_) => {
                    let amp = params_to_amplitude(&params);
                    let arrival = amp.last_arrival();
                    let guess = hint.map(|(a0, t0)| t0 + (arrival - a0));
                    match pf_peak_with_hint(atom, &amp, &opts.quad, guess) {
                        Ok(peak) => {
                            hint = Some((arrival, peak.t_peak));
                            -peak.pf_peak
                        }
                        Err(_) => f64::INFINITY,
                    }
                }
            }
        };
        let step: Vec<f64> = (0..map.dim())
            .map(|d| match map.coord_kind(d) {
                CoordKind::LogWidth => 0.4,
                CoordKind::Mu => 0.3,
                CoordKind::Detuning => 0.3,
            })
            .collect();
        let out = minimize(objective, start, &step, 1e-4, per_start);
        total_evals += out.evals;
        let pf = -out.f;
        let candidate = (pf, out.x, out.converged);
        best = Some(match best.take() {
            None => candidate,
            Some(cur) => pick_better(cur, candidate),
        });
    }

    let (_, coords, converged) = best.expect("at least one start");
    let best_params = map.params(&coords, opts.n_bar)?;
    // Final consistent evaluation of the optimum.
    let (pf_max, t_peak) = match &best_params {
        BestParams::Coherent(pulse) => {
            let peak = rho_ff_peak(atom, pulse, &opts.ode)?;
            (peak.value, peak.t_peak)
        }
        _ => {
            let amp = params_to_amplitude(&best_params);
            let peak = pf_peak_with_hint(atom, &amp, &opts.quad, None)?;
            (peak.pf_peak, peak.t_peak)
        }
    };
    Ok(OptimizationRecord {
        atom: *atom,
        family,
        mode,
        best_params,
        pf_max,
        t_peak,
        starts: starts.len(),
        converged,
        objective_evals: total_evals,
    })
}

/// Larger pf wins; ties break toward the smaller scaled-coordinate norm so
/// repeated runs pick the same representative of a flat optimum.
fn pick_better(
    a: (f64, Vec<f64>, bool),
    b: (f64, Vec<f64>, bool),
) -> (f64, Vec<f64>, bool) {
    let norm = |x: &[f64]| x.iter().map(|v| v * v).sum::<f64>().sqrt();
    if (b.0 - a.0).abs() <= 1e-9 {
        if norm(&b.1) < norm(&a.1) {
            b
        } else {
            a
        }
    } else if b.0 > a.0 {
        b
    } else {
        a
    }
}

pub fn params_to_amplitude(params: &BestParams) -> TwoPhotonAmplitude {
    match params {
        BestParams::GaussianProduct(p) => (*p).into(),
        BestParams::CorrelatedGaussian(p) => (*p).into(),
        BestParams::Coherent(_) => {
            unreachable!("coherent pulses are not two-photon amplitudes")
        }
    }
}

/// 13 log-spaced Γe/Γf values spanning [1e−2, 1e2].
pub fn default_ratio_grid() -> Vec<f64> {
    (0..13).map(|i| 10f64.powf(-2.0 + i as f64 / 3.0)).collect()
}

/// 11 linear δ_a/Γf values spanning [0, 20].
pub fn default_delta_a_grid() -> Vec<f64> {
    (0..11).map(|i| 2.0 * i as f64).collect()
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SweepCell {
    pub ratio: f64,
    pub delta_a: f64,
    pub record: Option<OptimizationRecord>,
    pub error: Option<String>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SweepTable {
    pub family: OptimizeFamily,
    pub mode: ConstraintMode,
    pub cells: Vec<SweepCell>,
}

/// One optimization per (ratio, δ_a) cell; cells are independent and run in
/// parallel, failures are recorded in place and do not stop the sweep.
pub fn sweep(
    family: OptimizeFamily,
    mode: ConstraintMode,
    ratio_grid: &[f64],
    delta_a_grid: &[f64],
    opts: &OptimizeOptions,
) -> SweepTable {
    let jobs: Vec<(usize, usize)> = (0..ratio_grid.len())
        .flat_map(|i| (0..delta_a_grid.len()).map(move |j| (i, j)))
        .collect();
    let cells: Vec<SweepCell> = jobs
        .par_iter()
        .map(|&(i, j)| {
            let ratio = ratio_grid[i];
            let delta_a = delta_a_grid[j];
            let mut cell_opts = *opts;
            cell_opts.seed = opts
                .seed
                .wrapping_add((i * delta_a_grid.len() + j) as u64);
            match AtomParams::from_ratios(ratio, delta_a)
                .and_then(|atom| optimize(&atom, family, mode, &cell_opts))
            {
                Ok(record) => SweepCell {
                    ratio,
                    delta_a,
                    record: Some(record),
                    error: None,
                },
                Err(e) => SweepCell {
                    ratio,
                    delta_a,
                    record: None,
                    error: Some(e.to_string()),
                },
            }
        })
        .collect();
    SweepTable {
        family,
        mode,
        cells,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    #[test]
    fn coordinate_map_roundtrip() {
        let atom = AtomParams::from_ratios(0.5, 1.0).unwrap();
        let mode = ConstraintMode::two_photon_resonant(true);
        let map = CoordMap::new(&atom, OptimizeFamily::GaussianProduct, mode);
        assert_eq!(map.dim(), 4);
        let p = map
            .params(&[0.0f64.ln(), 1.5f64.ln(), 0.5, 0.8], 2.0)
            .ok();
        // ln(0) = -inf is rejected
        assert!(p.is_none());
        let p = map.params(&[0.2, 0.4, 0.5, 0.8], 2.0).unwrap();
        match p {
            BestParams::GaussianProduct(g) => {
                assert_abs_diff_eq!(g.omega_a_width(), 0.2f64.exp(), epsilon = 1e-12);
                assert_abs_diff_eq!(g.mu(), 0.5 / atom.gamma_e(), epsilon = 1e-12);
                assert_abs_diff_eq!(g.delta_f(), 0.8 * 1.0, epsilon = 1e-12);
                assert_eq!(g.carrier_sum_detuning(), 0.0);
            }
            _ => panic!("wrong family"),
        }
    }

    #[test]
    fn starts_are_deterministic_and_distinct() {
        let atom = AtomParams::from_ratios(1.0, 0.0).unwrap();
        let mode = ConstraintMode::degenerate_resonant(true);
        let map = CoordMap::new(&atom, OptimizeFamily::GaussianProduct, mode);
        let a = map.starts(&atom, 8, 7);
        let b = map.starts(&atom, 8, 7);
        assert_eq!(a, b);
        assert_eq!(a.len(), 8);
        for (i, x) in a.iter().enumerate() {
            for y in &a[i + 1..] {
                assert_ne!(x, y);
            }
        }
    }

    #[test]
    fn budget_must_be_sane() {
        let atom = AtomParams::from_ratios(1.0, 0.0).unwrap();
        let opts = OptimizeOptions {
            budget: 100,
            ..OptimizeOptions::default()
        };
        assert!(optimize(
            &atom,
            OptimizeFamily::Coherent,
            ConstraintMode::degenerate_resonant(false),
            &opts
        )
        .is_err());
    }

    #[test]
    fn single_cell_sweep_matches_optimize() {
        let atom = AtomParams::from_ratios(1.0, 0.0).unwrap();
        let mode = ConstraintMode::degenerate_resonant(false);
        let opts = OptimizeOptions {
            budget: 400,
            starts: 4,
            ..OptimizeOptions::default()
        };
        let direct = optimize(&atom, OptimizeFamily::Coherent, mode, &opts).unwrap();
        let table = sweep(OptimizeFamily::Coherent, mode, &[1.0], &[0.0], &opts);
        let cell = table.cells[0].record.as_ref().unwrap();
        assert_eq!(cell.pf_max, direct.pf_max);
        assert_eq!(cell.objective_evals, direct.objective_evals);
        match (&cell.best_params, &direct.best_params) {
            (BestParams::Coherent(a), BestParams::Coherent(b)) => {
                assert_eq!(a.width(), b.width())
            }
            _ => panic!("family mismatch"),
        }
    }
}
