//! TOML run configuration and flag overrides.

use std::path::{Path, PathBuf};

use serde::Deserialize;
use tpa_core::{
    AtomParams, CoherentPulseParams, CorrelatedGaussianParams, CustomAmplitude,
    GaussianProductParams, OptimalStateParams, TwoPhotonAmplitude,
};

use crate::AppError;

#[derive(Debug, Clone, Deserialize, Default)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    #[serde(default)]
    pub seed: Option<u64>,
    pub atom: Option<AtomSpec>,
    #[serde(default)]
    pub family: Vec<FamilySpec>,
    #[serde(default)]
    pub pf: PfSection,
    #[serde(default)]
    pub marginals: MarginalsSection,
    #[serde(default)]
    pub maxima: MaximaSection,
    #[serde(default)]
    pub optimize: OptimizeSection,
    #[serde(default)]
    pub sweep: SweepSection,
    #[serde(default)]
    pub coherent: Option<CoherentSection>,
    #[serde(default)]
    pub output: OutputSection,
}

/// Atom given either as absolute rates or as the dimensionless pair
/// (ratio, delta_a) in Γf = 1 units.
#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AtomSpec {
    pub gamma_e: Option<f64>,
    pub gamma_f: Option<f64>,
    pub delta_a: Option<f64>,
    pub ratio: Option<f64>,
}

impl AtomSpec {
    pub fn build(&self) -> Result<AtomParams, AppError> {
        let delta_a = self.delta_a.unwrap_or(0.0);
        match (self.gamma_e, self.gamma_f, self.ratio) {
            (Some(ge), Some(gf), None) => {
                AtomParams::new(ge, gf, delta_a).map_err(config_err("atom"))
            }
            (None, None, Some(r)) => {
                AtomParams::from_ratios(r, delta_a).map_err(config_err("atom"))
            }
            _ => Err(AppError::Config(
                "atom: give either gamma_e+gamma_f or ratio (with optional delta_a)".into(),
            )),
        }
    }
}

fn config_err(field: &'static str) -> impl Fn(tpa_core::Error) -> AppError {
    move |e| AppError::Config(format!("{field}: {e}"))
}

#[derive(Debug, Clone, Deserialize)]
#[serde(tag = "kind")]
pub enum FamilySpec {
    Optimal {
        label: Option<String>,
        t_star: f64,
        t0: Option<f64>,
    },
    GaussianProduct {
        label: Option<String>,
        #[serde(flatten)]
        params: GaussianProductParams,
    },
    CorrelatedGaussian {
        label: Option<String>,
        #[serde(flatten)]
        params: CorrelatedGaussianParams,
    },
    Custom {
        label: Option<String>,
        path: PathBuf,
    },
}

impl FamilySpec {
    pub fn label(&self, index: usize) -> String {
        let explicit = match self {
            FamilySpec::Optimal { label, .. }
            | FamilySpec::GaussianProduct { label, .. }
            | FamilySpec::CorrelatedGaussian { label, .. }
            | FamilySpec::Custom { label, .. } => label.clone(),
        };
        explicit.unwrap_or_else(|| {
            let kind = match self {
                FamilySpec::Optimal { .. } => "optimal",
                FamilySpec::GaussianProduct { .. } => "gaussian_product",
                FamilySpec::CorrelatedGaussian { .. } => "correlated_gaussian",
                FamilySpec::Custom { .. } => "custom",
            };
            format!("{kind}_{index}")
        })
    }

    pub fn build(&self, atom: &AtomParams, config_dir: &Path) -> Result<TwoPhotonAmplitude, AppError> {
        match self {
            FamilySpec::Optimal { t_star, t0, .. } => OptimalStateParams::new(*t_star, *t0, *atom)
                .map(Into::into)
                .map_err(config_err("family.Optimal")),
            FamilySpec::GaussianProduct { params, .. } => Ok((*params).into()),
            FamilySpec::CorrelatedGaussian { params, .. } => Ok((*params).into()),
            FamilySpec::Custom { path, .. } => {
                let full = if path.is_absolute() {
                    path.clone()
                } else {
                    config_dir.join(path)
                };
                CustomAmplitude::from_csv_path(&full)
                    .map(Into::into)
                    .map_err(|e| match e {
                        tpa_core::Error::Io(io) => AppError::Io(io),
                        other => AppError::Config(format!("family.Custom ({}): {other}", full.display())),
                    })
            }
        }
    }
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PfSection {
    pub t_min: Option<f64>,
    pub t_max: Option<f64>,
    #[serde(default = "default_curve_points")]
    pub points: usize,
    /// Also emit the sampled amplitude grid (t1,t2,re,im) per family.
    #[serde(default)]
    pub dump_amplitude: bool,
    #[serde(default = "default_amplitude_points")]
    pub amplitude_points: usize,
    pub rel_tol: Option<f64>,
}

impl Default for PfSection {
    fn default() -> Self {
        Self {
            t_min: None,
            t_max: None,
            points: default_curve_points(),
            dump_amplitude: false,
            amplitude_points: default_amplitude_points(),
            rel_tol: None,
        }
    }
}

fn default_curve_points() -> usize {
    401
}
fn default_amplitude_points() -> usize {
    201
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MarginalsSection {
    pub joint_points: Option<usize>,
    pub marginal_points: Option<usize>,
}

impl Default for MarginalsSection {
    fn default() -> Self {
        Self {
            joint_points: None,
            marginal_points: None,
        }
    }
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MaximaSection {
    #[serde(default)]
    pub ratios: Vec<f64>,
    #[serde(default)]
    pub delta_as: Vec<f64>,
}

impl Default for MaximaSection {
    fn default() -> Self {
        Self {
            ratios: Vec::new(),
            delta_as: Vec::new(),
        }
    }
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OptimizeSection {
    pub family: Option<String>,
    pub mode: Option<String>,
    #[serde(default)]
    pub mu_free: bool,
    pub budget: Option<usize>,
    pub starts: Option<usize>,
    pub n_bar: Option<f64>,
}

impl Default for OptimizeSection {
    fn default() -> Self {
        Self {
            family: None,
            mode: None,
            mu_free: false,
            budget: None,
            starts: None,
            n_bar: None,
        }
    }
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepSection {
    pub family: Option<String>,
    pub mode: Option<String>,
    #[serde(default)]
    pub mu_free: bool,
    #[serde(default)]
    pub ratios: Vec<f64>,
    #[serde(default)]
    pub delta_as: Vec<f64>,
    pub budget: Option<usize>,
    pub starts: Option<usize>,
    pub n_bar: Option<f64>,
}

impl Default for SweepSection {
    fn default() -> Self {
        Self {
            family: None,
            mode: None,
            mu_free: false,
            ratios: Vec::new(),
            delta_as: Vec::new(),
            budget: None,
            starts: None,
            n_bar: None,
        }
    }
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CoherentSection {
    #[serde(flatten)]
    pub pulse: CoherentPulseParams,
    pub points: Option<usize>,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutputSection {
    pub dir: Option<PathBuf>,
}

impl Default for OutputSection {
    fn default() -> Self {
        Self { dir: None }
    }
}

impl RunConfig {
    pub fn load(path: &Path) -> Result<Self, AppError> {
        let text = std::fs::read_to_string(path)?;
        toml::from_str(&text).map_err(|e| AppError::Config(format!("{}: {e}", path.display())))
    }

    pub fn atom(&self) -> Result<AtomParams, AppError> {
        self.atom
            .as_ref()
            .ok_or_else(|| AppError::Config("missing [atom] section".into()))?
            .build()
    }
}
