//! Closed-form ground-truth fields.

use crate::telemetry::{LocalPoint, Vec2};

/// Analytic planar flow field (m/s, flow-toward).
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum VectorField {
    Uniform(Vec2),
    /// `base + rate * y`: the velocity changes linearly with northing.
    Shear {
        base: Vec2,
        rate: Vec2,
    },
    /// Smooth vortex: tangential speed `2 s (r/R) / (1 + (r/R)^2)`, peaking at
    /// `strength` on radius `R`. Positive strength turns counterclockwise.
    Vortex {
        center: LocalPoint,
        strength: f64,
        radius: f64,
    },
}

impl VectorField {
    pub fn at(&self, p: &LocalPoint) -> Vec2 {
        match *self {
            VectorField::Uniform(v) => v,
            VectorField::Shear { base, rate } => base + rate * p.y,
            VectorField::Vortex {
                center,
                strength,
                radius,
            } => {
                let (dx, dy) = (p.x - center.x, p.y - center.y);
                let r = dx.hypot(dy);
                if r == 0.0 {
                    return Vec2::ZERO;
                }
                let q = r / radius;
                let speed = 2.0 * strength * q / (1.0 + q * q);
                Vec2::new(-dy / r * speed, dx / r * speed)
            }
        }
    }

    pub fn is_valid(&self) -> bool {
        match *self {
            VectorField::Uniform(v) => v.is_finite(),
            VectorField::Shear { base, rate } => base.is_finite() && rate.is_finite(),
            VectorField::Vortex {
                center,
                strength,
                radius,
            } => {
                center.x.is_finite() && center.y.is_finite() && strength.is_finite() && radius > 0.0
            }
        }
    }
}

/// Analytic bathymetry in meters (positive down).
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum DepthField {
    Constant(f64),
    /// Gaussian trough along a straight axis: `depth_max` on the axis,
    /// relaxing to `bank` far from it.
    Channel {
        through: LocalPoint,
        bearing: f64,
        depth_max: f64,
        width: f64,
        bank: f64,
    },
    /// `base + amplitude * exp(-r² / 2σ²)`; a negative amplitude is a shoal.
    Bump {
        center: LocalPoint,
        amplitude: f64,
        sigma: f64,
        base: f64,
    },
}

impl DepthField {
    pub fn at(&self, p: &LocalPoint) -> f64 {
        match *self {
            DepthField::Constant(d) => d,
            DepthField::Channel {
                through,
                bearing,
                depth_max,
                width,
                bank,
            } => {
                let axis = Vec2::from_bearing(1.0, bearing);
                let (dx, dy) = (p.x - through.x, p.y - through.y);
                // perpendicular distance to the axis line
                let d = dx * axis.n - dy * axis.e;
                bank + (depth_max - bank) * (-0.5 * (d / width).powi(2)).exp()
            }
            DepthField::Bump {
                center,
                amplitude,
                sigma,
                base,
            } => {
                let r2 = (p.x - center.x).powi(2) + (p.y - center.y).powi(2);
                base + amplitude * (-0.5 * r2 / (sigma * sigma)).exp()
            }
        }
    }

    /// True when the field is positive everywhere.
    pub fn is_valid(&self) -> bool {
        match *self {
            DepthField::Constant(d) => d > 0.0 && d.is_finite(),
            DepthField::Channel {
                depth_max,
                width,
                bank,
                ..
            } => depth_max > 0.0 && bank > 0.0 && width > 0.0,
            DepthField::Bump {
                amplitude,
                sigma,
                base,
                ..
            } => base > 0.0 && base + amplitude > 0.0 && sigma > 0.0,
        }
    }
}

/// Scales current speed by `(d_ref / depth)^gamma`: shallower water runs
/// faster for positive `gamma`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DepthCoupling {
    pub d_ref: f64,
    pub gamma: f64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FieldSpec {
    pub wind: VectorField,
    pub current: VectorField,
    pub depth: DepthField,
    pub coupling: Option<DepthCoupling>,
}

/// Ground truth at one location.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Truth {
    pub wind: Vec2,
    pub current: Vec2,
    pub depth: f64,
}

impl FieldSpec {
    pub fn is_valid(&self) -> bool {
        let coupling_ok = self
            .coupling
            .is_none_or(|c| c.d_ref > 0.0 && c.gamma.is_finite());
        self.wind.is_valid() && self.current.is_valid() && self.depth.is_valid() && coupling_ok
    }
}

/// Closed-form evaluation of every field at `p`.
pub fn truth_at(f: &FieldSpec, p: &LocalPoint) -> Truth {
    let depth = f.depth.at(p);
    let mut current = f.current.at(p);
    if let Some(c) = f.coupling {
        current = current * (c.d_ref / depth).powf(c.gamma);
    }
    Truth {
        wind: f.wind.at(p),
        current,
        depth,
    }
}
