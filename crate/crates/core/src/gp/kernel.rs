use std::fmt;
use std::str::FromStr;

use crate::telemetry::LocalPoint;

use super::GpError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum KernelKind {
    Linear,
    /// Also known as ExpQuad or RBF.
    SquaredExponential,
    /// Matérn 1/2.
    Exponential,
    Matern32,
}

impl KernelKind {
    pub const ALL: [KernelKind; 4] = [
        KernelKind::Linear,
        KernelKind::SquaredExponential,
        KernelKind::Exponential,
        KernelKind::Matern32,
    ];

    pub fn name(self) -> &'static str {
        match self {
            KernelKind::Linear => "linear",
            KernelKind::SquaredExponential => "squared_exponential",
            KernelKind::Exponential => "exponential",
            KernelKind::Matern32 => "matern32",
        }
    }

    pub fn is_stationary(self) -> bool {
        !matches!(self, KernelKind::Linear)
    }
}

impl fmt::Display for KernelKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.pad(self.name())
    }
}

impl FromStr for KernelKind {
    type Err = GpError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let key = s.trim().to_ascii_lowercase().replace(['-', ' '], "_");
        match key.as_str() {
            "linear" => Ok(KernelKind::Linear),
            "squared_exponential" | "se" | "expquad" | "exp_quad" | "rbf" => {
                Ok(KernelKind::SquaredExponential)
            }
            "exponential" | "exp" | "matern12" => Ok(KernelKind::Exponential),
            "matern32" | "matern_32" | "matern3/2" => Ok(KernelKind::Matern32),
            _ => Err(GpError::UnknownKernel(s.to_string())),
        }
    }
}

/// Kernel family and hyperparameters.
///
/// `amplitude` is the output variance σ_f², `lengthscale` σ_l is in meters
/// (ignored by [`KernelKind::Linear`]) and `noise` is the observation noise
/// variance σ_n² added to the training diagonal.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct KernelSpec {
    pub kind: KernelKind,
    pub amplitude: f64,
    pub lengthscale: f64,
    pub noise: f64,
}

impl KernelSpec {
    pub fn new(
        kind: KernelKind,
        amplitude: f64,
        lengthscale: f64,
        noise: f64,
    ) -> Result<Self, GpError> {
        let k = KernelSpec {
            kind,
            amplitude,
            lengthscale,
            noise,
        };
        k.validate()?;
        Ok(k)
    }

    pub fn validate(&self) -> Result<(), GpError> {
        let ok = self.amplitude.is_finite()
            && self.amplitude > 0.0
            && self.lengthscale.is_finite()
            && self.lengthscale > 0.0
            && self.noise.is_finite()
            && self.noise >= 0.0;
        if ok {
            Ok(())
        } else {
            Err(GpError::InvalidKernel(*self))
        }
    }

    /// Data-driven starting point for hyperparameter search.
    ///
    /// The prior mean is zero, so the amplitude starts at the second moment
    /// of the targets rather than their variance.
    pub fn initial_guess(kind: KernelKind, x: &[LocalPoint], y: &[f64]) -> KernelSpec {
        let n = y.len().max(1) as f64;
        let second_moment = (y.iter().map(|v| v * v).sum::<f64>() / n).max(1e-6);
        let (mut xmin, mut xmax, mut ymin, mut ymax) = (
            f64::INFINITY,
            f64::NEG_INFINITY,
            f64::INFINITY,
            f64::NEG_INFINITY,
        );
        for p in x {
            xmin = xmin.min(p.x);
            xmax = xmax.max(p.x);
            ymin = ymin.min(p.y);
            ymax = ymax.max(p.y);
        }
        let diag = if x.is_empty() {
            0.0
        } else {
            (xmax - xmin).hypot(ymax - ymin)
        };
        let lengthscale = (0.25 * diag).max(1.0);
        let amplitude = match kind {
            KernelKind::Linear => {
                let r2 = x.iter().map(|p| p.dot(p)).sum::<f64>() / n;
                second_moment / r2.max(1.0)
            }
            _ => second_moment,
        };
        KernelSpec {
            kind,
            amplitude,
            lengthscale,
            noise: 0.1 * second_moment,
        }
    }

    /// Prior variance k(x, x) at `p`.
    pub fn prior_variance(&self, p: &LocalPoint) -> f64 {
        kernel_eval(self, p, p)
    }
}

/// Covariance between two inputs.
pub fn kernel_eval(k: &KernelSpec, a: &LocalPoint, b: &LocalPoint) -> f64 {
    match k.kind {
        KernelKind::Linear => k.amplitude * a.dot(b),
        KernelKind::SquaredExponential => {
            let r = a.distance(b) / k.lengthscale;
            k.amplitude * (-0.5 * r * r).exp()
        }
        KernelKind::Exponential => k.amplitude * (-a.distance(b) / k.lengthscale).exp(),
        KernelKind::Matern32 => {
            let s = 3f64.sqrt() * a.distance(b) / k.lengthscale;
            k.amplitude * (1.0 + s) * (-s).exp()
        }
    }
}
