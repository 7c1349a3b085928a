//! Versioned text format for fitted models.
//!
//! Only the kernel, offset and training data are stored; the factorization is
//! recomputed on load.
//!
//! ```text
//! forcefield-gp v1
//! name,<phenomenon>
//! origin,<lat>,<lon>
//! kernel,<kind>,<amplitude>,<lengthscale>,<noise>
//! offset,<value>
//! point,<x>,<y>,<target>
//! ...
//! ```

use std::fmt::Write as _;

use crate::telemetry::{GeoPoint, LocalPoint};

use super::fields::ScalarFieldModel;
use super::kernel::{KernelKind, KernelSpec};
use super::model::{fit, Dataset};
use super::GpError;

pub const MODEL_MAGIC: &str = "forcefield-gp v1";

/// A named scalar field model with the geodetic origin of its inputs.
#[derive(Debug, Clone)]
pub struct ModelFile {
    pub name: String,
    pub origin: GeoPoint,
    pub model: ScalarFieldModel,
}

impl ModelFile {
    pub fn to_text(&self) -> String {
        let k = self.model.kernel();
        let mut s = String::new();
        let _ = writeln!(s, "{MODEL_MAGIC}");
        let _ = writeln!(s, "name,{}", self.name);
        let _ = writeln!(s, "origin,{},{}", self.origin.lat, self.origin.lon);
        let _ = writeln!(
            s,
            "kernel,{},{},{},{}",
            k.kind, k.amplitude, k.lengthscale, k.noise
        );
        let _ = writeln!(s, "offset,{}", self.model.offset);
        let data = self.model.training_data();
        for (p, y) in data.x().iter().zip(data.y()) {
            let _ = writeln!(s, "point,{},{},{}", p.x, p.y, y);
        }
        s
    }

    /// Parses the text form and refits the model.
    pub fn from_text(text: &str) -> Result<ModelFile, GpError> {
        let bad = |msg: String| GpError::ModelFormat(msg);
        let mut lines = text.lines().map(str::trim).filter(|l| !l.is_empty());
        if lines.next() != Some(MODEL_MAGIC) {
            return Err(bad(format!("missing '{MODEL_MAGIC}' header")));
        }
        let num = |s: &str| -> Result<f64, GpError> {
            s.parse::<f64>()
                .ok()
                .filter(|v| v.is_finite())
                .ok_or_else(|| bad(format!("bad number {s:?}")))
        };
        let mut name = None;
        let mut origin = None;
        let mut kernel = None;
        let mut offset = 0.0;
        let (mut xs, mut ys) = (Vec::new(), Vec::new());
        for line in lines {
            let f: Vec<&str> = line.split(',').collect();
            match (f[0], f.len()) {
                ("name", 2) => name = Some(f[1].to_string()),
                ("origin", 3) => {
                    origin = Some(
                        GeoPoint::new(num(f[1])?, num(f[2])?).map_err(|e| bad(e.to_string()))?,
                    )
                }
                ("kernel", 5) => {
                    let kind: KernelKind = f[1].parse()?;
                    kernel = Some(KernelSpec::new(kind, num(f[2])?, num(f[3])?, num(f[4])?)?);
                }
                ("offset", 2) => offset = num(f[1])?,
                ("point", 4) => {
                    xs.push(LocalPoint::new(num(f[1])?, num(f[2])?));
                    ys.push(num(f[3])? - offset);
                }
                _ => return Err(bad(format!("unrecognized line {line:?}"))),
            }
        }
        let kernel = kernel.ok_or_else(|| bad("missing kernel line".into()))?;
        let data = Dataset::new(xs, ys)?;
        Ok(ModelFile {
            name: name.unwrap_or_default(),
            origin: origin.ok_or_else(|| bad("missing origin line".into()))?,
            model: ScalarFieldModel {
                offset,
                gp: fit(&data, &kernel)?,
            },
        })
    }
}
