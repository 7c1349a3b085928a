//! Gridded force-field maps: grid construction, batch prediction into named
//! layers, point queries and CSV/GeoJSON export.

use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use rayon::prelude::*;
use serde_json::{json, Map, Value};
use thiserror::Error;

use crate::fusion::FusedSample;
use crate::gp::{ScalarFieldModel, VectorFieldModel};
use crate::telemetry::{to_geo, wrap_deg, GeoPoint, LocalPoint, Vec2};

/// Default grid spacing in meters.
pub const DEFAULT_RESOLUTION: f64 = 2.0;

/// Layer names in render and export order.
pub const LAYER_NAMES: [&str; 9] = [
    "depth",
    "wind_e",
    "wind_n",
    "wind_speed",
    "wind_dir",
    "current_e",
    "current_n",
    "current_speed",
    "current_dir",
];

#[derive(Debug, Error)]
pub enum FieldError {
    #[error("no samples to build a grid from")]
    EmptyInput,
    #[error("grid resolution must be positive, got {0}")]
    NonPositiveResolution(f64),
    #[error("grid margin must be finite and non-negative, got {0}")]
    InvalidMargin(f64),
    #[error("I/O error on {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
}

/// Regular grid of prediction nodes over a local bounding box.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FieldGrid {
    pub origin: GeoPoint,
    pub x_min: f64,
    pub x_max: f64,
    pub y_min: f64,
    pub y_max: f64,
    pub resolution: f64,
    pub nx: usize,
    pub ny: usize,
}

impl FieldGrid {
    pub fn new(
        origin: GeoPoint,
        (x_min, x_max): (f64, f64),
        (y_min, y_max): (f64, f64),
        resolution: f64,
    ) -> Result<Self, FieldError> {
        if !(resolution.is_finite() && resolution > 0.0) {
            return Err(FieldError::NonPositiveResolution(resolution));
        }
        // the epsilon keeps exact multiples from losing a node to rounding
        let count = |lo: f64, hi: f64| ((hi - lo) / resolution + 1e-9).floor() as usize + 1;
        Ok(FieldGrid {
            origin,
            x_min,
            x_max,
            y_min,
            y_max,
            resolution,
            nx: count(x_min, x_max),
            ny: count(y_min, y_max),
        })
    }

    pub fn len(&self) -> usize {
        self.nx * self.ny
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Node at column `i` (east), row `j` (north).
    pub fn node(&self, i: usize, j: usize) -> LocalPoint {
        LocalPoint::new(
            self.x_min + i as f64 * self.resolution,
            self.y_min + j as f64 * self.resolution,
        )
    }

    /// Nodes in row-major order: rows (y) outer, columns (x) inner.
    pub fn nodes(&self) -> impl Iterator<Item = LocalPoint> + '_ {
        (0..self.ny).flat_map(move |j| (0..self.nx).map(move |i| self.node(i, j)))
    }
}

/// Grid covering the sample bounding box expanded by `margin` on every side.
pub fn build_grid(
    samples: &[FusedSample],
    origin: GeoPoint,
    resolution: f64,
    margin: f64,
) -> Result<FieldGrid, FieldError> {
    if samples.is_empty() {
        return Err(FieldError::EmptyInput);
    }
    let points: Vec<LocalPoint> = samples.iter().map(|s| s.pos).collect();
    grid_around(&points, origin, resolution, margin)
}

/// Same as [`build_grid`] for bare positions.
pub fn grid_around(
    points: &[LocalPoint],
    origin: GeoPoint,
    resolution: f64,
    margin: f64,
) -> Result<FieldGrid, FieldError> {
    if points.is_empty() {
        return Err(FieldError::EmptyInput);
    }
    if !(margin.is_finite() && margin >= 0.0) {
        return Err(FieldError::InvalidMargin(margin));
    }
    let (mut x0, mut x1, mut y0, mut y1) = (
        f64::INFINITY,
        f64::NEG_INFINITY,
        f64::INFINITY,
        f64::NEG_INFINITY,
    );
    for p in points {
        x0 = x0.min(p.x);
        x1 = x1.max(p.x);
        y0 = y0.min(p.y);
        y1 = y1.max(p.y);
    }
    FieldGrid::new(
        origin,
        (x0 - margin, x1 + margin),
        (y0 - margin, y1 + margin),
        resolution,
    )
}

/// The fitted models for every phenomenon, sharing one origin.
#[derive(Debug, Clone)]
pub struct FieldModels {
    pub origin: GeoPoint,
    pub depth: ScalarFieldModel,
    pub wind: VectorFieldModel,
    pub current: VectorFieldModel,
}

/// Combined wind, current and depth estimate at one point.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ForceSample {
    pub wind: Vec2,
    pub wind_var: (f64, f64),
    pub current: Vec2,
    pub current_var: (f64, f64),
    pub depth: f64,
    pub depth_var: f64,
}

/// Exact GP prediction of every phenomenon at `p`.
pub fn query(models: &FieldModels, p: &LocalPoint) -> ForceSample {
    let d = models.depth.predict(p);
    let w = models.wind.predict(p);
    let c = models.current.predict(p);
    ForceSample {
        wind: w.mean,
        wind_var: (w.var_e, w.var_n),
        current: c.mean,
        current_var: (c.var_e, c.var_n),
        depth: d.mean,
        depth_var: d.variance,
    }
}

/// One named surface: mean and variance per grid node, row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct FieldLayer {
    pub name: String,
    pub mean: Vec<f64>,
    pub variance: Vec<f64>,
}

/// Rendered layers in [`LAYER_NAMES`] order.
#[derive(Debug, Clone, PartialEq)]
pub struct LayerSet {
    pub layers: Vec<FieldLayer>,
}

impl LayerSet {
    pub fn get(&self, name: &str) -> Option<&FieldLayer> {
        self.layers.iter().find(|l| l.name == name)
    }
}

/// Speed and direction (degrees) of a vector plus first-order variances.
fn polar_with_variance(v: Vec2, (ve, vn): (f64, f64)) -> [(f64, f64); 2] {
    let s2 = v.e * v.e + v.n * v.n;
    if s2 == 0.0 {
        let avg = 0.5 * (ve + vn);
        return [(0.0, avg), (0.0, 0.0)];
    }
    let speed_var = (v.e * v.e * ve + v.n * v.n * vn) / s2;
    let dir_var_rad = (v.n * v.n * ve + v.e * v.e * vn) / (s2 * s2);
    let deg = 180.0 / std::f64::consts::PI;
    [
        (s2.sqrt(), speed_var),
        (v.bearing(), dir_var_rad * deg * deg),
    ]
}

/// Values of every layer at one node, in [`LAYER_NAMES`] order.
pub fn layer_values(f: &ForceSample) -> [(f64, f64); 9] {
    let [ws, wd] = polar_with_variance(f.wind, f.wind_var);
    let [cs, cd] = polar_with_variance(f.current, f.current_var);
    [
        (f.depth, f.depth_var),
        (f.wind.e, f.wind_var.0),
        (f.wind.n, f.wind_var.1),
        ws,
        wd,
        (f.current.e, f.current_var.0),
        (f.current.n, f.current_var.1),
        cs,
        cd,
    ]
}

/// Predicts every layer at every grid node. Rows run in parallel; the result
/// does not depend on scheduling.
pub fn render(models: &FieldModels, grid: &FieldGrid) -> LayerSet {
    let rows: Vec<Vec<[(f64, f64); 9]>> = (0..grid.ny)
        .into_par_iter()
        .map(|j| {
            (0..grid.nx)
                .map(|i| layer_values(&query(models, &grid.node(i, j))))
                .collect()
        })
        .collect();
    let mut layers: Vec<FieldLayer> = LAYER_NAMES
        .iter()
        .map(|name| FieldLayer {
            name: name.to_string(),
            mean: Vec::with_capacity(grid.len()),
            variance: Vec::with_capacity(grid.len()),
        })
        .collect();
    for cell in rows.iter().flatten() {
        for (layer, &(m, v)) in layers.iter_mut().zip(cell) {
            layer.mean.push(m);
            layer.variance.push(v);
        }
    }
    LayerSet { layers }
}

/// Turns flow-toward direction layers into meteorological "coming from"
/// bearings.
pub fn apply_met_convention(set: &mut LayerSet) {
    for layer in set.layers.iter_mut().filter(|l| l.name.ends_with("_dir")) {
        for d in layer.mean.iter_mut() {
            *d = wrap_deg(*d + 180.0);
        }
    }
}

pub fn csv_string(grid: &FieldGrid, set: &LayerSet) -> String {
    let mut s = String::from("x,y,lat,lon");
    for l in &set.layers {
        let _ = write!(s, ",{}", l.name);
    }
    for l in &set.layers {
        let _ = write!(s, ",{}_var", l.name);
    }
    s.push('\n');
    for (k, p) in grid.nodes().enumerate() {
        let g = to_geo(grid.origin, p);
        let _ = write!(s, "{},{},{},{}", p.x, p.y, g.lat, g.lon);
        for l in &set.layers {
            let _ = write!(s, ",{}", l.mean[k]);
        }
        for l in &set.layers {
            let _ = write!(s, ",{}", l.variance[k]);
        }
        s.push('\n');
    }
    s
}

/// Writes `x,y,lat,lon,<layers…>,<layer>_var…` rows, y outer and x inner.
pub fn export_csv(
    grid: &FieldGrid,
    set: &LayerSet,
    path: impl AsRef<Path>,
) -> Result<(), FieldError> {
    write_file(path.as_ref(), &csv_string(grid, set))
}

/// RFC 7946 FeatureCollection with one Point per grid node.
pub fn geojson_value(grid: &FieldGrid, set: &LayerSet) -> Value {
    let features: Vec<Value> = grid
        .nodes()
        .enumerate()
        .map(|(k, p)| {
            let g = to_geo(grid.origin, p);
            let mut props = Map::new();
            props.insert("x".into(), json!(p.x));
            props.insert("y".into(), json!(p.y));
            for l in &set.layers {
                props.insert(l.name.clone(), json!(l.mean[k]));
                props.insert(format!("{}_var", l.name), json!(l.variance[k]));
            }
            json!({
                "type": "Feature",
                "geometry": { "type": "Point", "coordinates": [g.lon, g.lat] },
                "properties": props,
            })
        })
        .collect();
    json!({ "type": "FeatureCollection", "features": features })
}

pub fn export_geojson(
    grid: &FieldGrid,
    set: &LayerSet,
    path: impl AsRef<Path>,
) -> Result<(), FieldError> {
    let text = serde_json::to_string_pretty(&geojson_value(grid, set)).expect("finite JSON values");
    write_file(path.as_ref(), &(text + "\n"))
}

fn write_file(path: &Path, text: &str) -> Result<(), FieldError> {
    fs::write(path, text).map_err(|source| FieldError::Io {
        path: path.display().to_string(),
        source,
    })
}
