//! Scalar and vector field models built from component GPs.

use crate::telemetry::{LocalPoint, Vec2};

use super::kernel::{KernelKind, KernelSpec};
use super::model::{fit, Dataset, GpModel, Prediction};
use super::optimize::optimize_hyperparams;
use super::GpError;

/// Zero-mean GP on targets shifted by a constant offset.
///
/// Depth sits far from zero, so it is fit on `y - mean(y)` and the offset is
/// added back at prediction time.
#[derive(Debug, Clone)]
pub struct ScalarFieldModel {
    pub offset: f64,
    pub gp: GpModel,
}

impl ScalarFieldModel {
    pub fn predict(&self, p: &LocalPoint) -> Prediction {
        let raw = self.gp.predict(p);
        Prediction {
            mean: raw.mean + self.offset,
            variance: raw.variance,
        }
    }

    pub fn kernel(&self) -> &KernelSpec {
        self.gp.kernel()
    }

    /// Raw (uncentered) training data.
    pub fn training_data(&self) -> Dataset {
        let off = self.offset;
        self.gp.data().map_targets(|v| v + off)
    }
}

/// Hyperparameter search settings for field fits.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct FitOptions {
    pub budget: usize,
    pub seed: u64,
    /// The search runs on an evenly strided subset of at most this many
    /// points; the final model is conditioned on all of them.
    pub max_opt_points: usize,
}

impl FitOptions {
    pub fn new(budget: usize, seed: u64) -> Self {
        FitOptions {
            budget,
            seed,
            max_opt_points: usize::MAX,
        }
    }
}

fn search_subset(data: &Dataset, max: usize) -> Result<Dataset, GpError> {
    let n = data.len();
    if n <= max {
        return Ok(data.clone());
    }
    let idx: Vec<usize> = (0..max).map(|i| i * n / max).collect();
    data.select(&idx)
}

/// Fits a scalar field with optimized hyperparameters. With `center` the GP
/// sees mean-subtracted targets.
pub fn fit_scalar_field(
    data: &Dataset,
    kind: KernelKind,
    budget: usize,
    seed: u64,
    center: bool,
) -> Result<ScalarFieldModel, GpError> {
    fit_scalar_field_with(data, kind, &FitOptions::new(budget, seed), center)
}

pub fn fit_scalar_field_with(
    data: &Dataset,
    kind: KernelKind,
    opts: &FitOptions,
    center: bool,
) -> Result<ScalarFieldModel, GpError> {
    let offset = if center {
        data.y().iter().sum::<f64>() / data.len() as f64
    } else {
        0.0
    };
    let shifted = data.map_targets(|v| v - offset);
    let subset = search_subset(&shifted, opts.max_opt_points.max(1))?;
    let init = KernelSpec::initial_guess(kind, subset.x(), subset.y());
    let kernel = optimize_hyperparams(&subset, kind, &init, opts.budget, opts.seed)?;
    Ok(ScalarFieldModel {
        offset,
        gp: fit(&shifted, &kernel)?,
    })
}

/// Vector prediction with per-component variances.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct VectorPrediction {
    pub mean: Vec2,
    pub var_e: f64,
    pub var_n: f64,
}

impl VectorPrediction {
    pub fn speed(&self) -> f64 {
        self.mean.norm()
    }

    /// Flow-toward compass bearing of the mean vector.
    pub fn direction(&self) -> f64 {
        self.mean.bearing()
    }
}

/// Independent east and north component GPs sharing a kernel family.
#[derive(Debug, Clone)]
pub struct VectorFieldModel {
    pub east: GpModel,
    pub north: GpModel,
}

impl VectorFieldModel {
    pub fn predict(&self, p: &LocalPoint) -> VectorPrediction {
        let e = self.east.predict(p);
        let n = self.north.predict(p);
        VectorPrediction {
            mean: Vec2::new(e.mean, n.mean),
            var_e: e.variance,
            var_n: n.variance,
        }
    }
}

/// Seed offset so the two components draw different restart points.
const NORTH_SEED_SALT: u64 = 0x9E37_79B9_7F4A_7C15;

/// Fits east and north components independently, each with its own
/// hyperparameter search.
pub fn fit_vector_field(
    samples: &[(LocalPoint, Vec2)],
    kind: KernelKind,
    budget: usize,
    seed: u64,
) -> Result<VectorFieldModel, GpError> {
    fit_vector_field_with(samples, kind, &FitOptions::new(budget, seed))
}

pub fn fit_vector_field_with(
    samples: &[(LocalPoint, Vec2)],
    kind: KernelKind,
    opts: &FitOptions,
) -> Result<VectorFieldModel, GpError> {
    if samples.is_empty() {
        return Err(GpError::EmptyDataset);
    }
    let x: Vec<LocalPoint> = samples.iter().map(|s| s.0).collect();
    let east = Dataset::new(x.clone(), samples.iter().map(|s| s.1.e).collect())?;
    let north = Dataset::new(x, samples.iter().map(|s| s.1.n).collect())?;
    let north_opts = FitOptions {
        seed: opts.seed ^ NORTH_SEED_SALT,
        ..*opts
    };
    Ok(VectorFieldModel {
        east: fit_scalar_field_with(&east, kind, opts, false)?.gp,
        north: fit_scalar_field_with(&north, kind, &north_opts, false)?.gp,
    })
}
