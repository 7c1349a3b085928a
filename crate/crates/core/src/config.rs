//! INI-style configuration: `[section]` headers and `key = value` lines.
//!
//! A scenario file looks like
//!
//! ```text
//! [scenario]
//! mission = lake-01
//! origin = 34.0, -81.0
//! seed = 7
//! speed = 2.0
//! lawnmower = 0,0, 100,100, 10      # x0,y0, x1,y1, spacing
//! # or: waypoints = 0,0; 0,100; 10,100
//! noise_wind = 0.1
//!
//! [field]
//! wind = uniform 2 0
//! current = polar 2.5 30
//! depth = channel 0 50 90 2.0 15 0.5
//! ```
//!
//! Vector fields: `uniform e n`, `polar speed bearing`,
//! `shear e n rate_e rate_n`, `vortex cx cy strength radius`.
//! Depth fields: `constant d`, `channel x y bearing depth_max width bank`,
//! `bump cx cy amplitude sigma base`. Optional `coupling = d_ref gamma`.

use std::collections::BTreeMap;
use std::path::PathBuf;
use std::str::FromStr;

use thiserror::Error;

use crate::field::DEFAULT_RESOLUTION;
use crate::gp::KernelKind;
use crate::sim::{
    lawnmower, DepthCoupling, DepthField, FieldSpec, NoiseSpec, ScenarioSpec, StreamRates,
    Trajectory, VectorField,
};
use crate::sync::DEFAULT_SLOP;
use crate::telemetry::{GeoPoint, LocalPoint, Vec2};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ConfigError {
    #[error("line {line}: {msg}")]
    Syntax { line: usize, msg: String },
    #[error("missing [{section}] {key}")]
    Missing { section: String, key: String },
    #[error("[{section}] {key} = {value:?}: {msg}")]
    Invalid {
        section: String,
        key: String,
        value: String,
        msg: String,
    },
    #[error("{0}")]
    Conflict(String),
}

/// Parsed sections, each a sorted key → value map.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Ini {
    pub sections: BTreeMap<String, BTreeMap<String, String>>,
}

impl FromStr for Ini {
    type Err = ConfigError;

    fn from_str(text: &str) -> Result<Self, Self::Err> {
        let mut ini = Ini::default();
        let mut current: Option<String> = None;
        for (i, raw) in text.lines().enumerate() {
            let line = strip_comment(raw).trim();
            if line.is_empty() {
                continue;
            }
            let err = |msg: &str| ConfigError::Syntax {
                line: i + 1,
                msg: msg.to_string(),
            };
            if let Some(name) = line.strip_prefix('[') {
                let name = name
                    .strip_suffix(']')
                    .ok_or_else(|| err("unterminated section header"))?;
                let name = name.trim().to_ascii_lowercase();
                ini.sections.entry(name.clone()).or_default();
                current = Some(name);
                continue;
            }
            let (k, v) = line
                .split_once('=')
                .ok_or_else(|| err("expected key = value"))?;
            let section = current
                .as_ref()
                .ok_or_else(|| err("key outside of any section"))?;
            ini.sections
                .get_mut(section)
                .expect("section registered")
                .insert(k.trim().to_ascii_lowercase(), v.trim().to_string());
        }
        Ok(ini)
    }
}

/// `#` starts a comment anywhere; `;` only at the start of a line, since
/// waypoint lists use it as a separator.
fn strip_comment(line: &str) -> &str {
    if line.trim_start().starts_with(';') {
        return "";
    }
    let cut = line.find('#').unwrap_or(line.len());
    &line[..cut]
}

impl Ini {
    pub fn has_section(&self, name: &str) -> bool {
        self.sections.contains_key(name)
    }

    pub fn get(&self, section: &str, key: &str) -> Option<&str> {
        self.sections.get(section)?.get(key).map(String::as_str)
    }

    /// Parses `[section] key` if present.
    pub fn parse<T: FromStr>(&self, section: &str, key: &str) -> Result<Option<T>, ConfigError>
    where
        T::Err: std::fmt::Display,
    {
        match self.get(section, key) {
            None => Ok(None),
            Some(v) => v.parse::<T>().map(Some).map_err(|e| ConfigError::Invalid {
                section: section.into(),
                key: key.into(),
                value: v.into(),
                msg: e.to_string(),
            }),
        }
    }

    pub fn parse_or<T: FromStr>(
        &self,
        section: &str,
        key: &str,
        default: T,
    ) -> Result<T, ConfigError>
    where
        T::Err: std::fmt::Display,
    {
        Ok(self.parse(section, key)?.unwrap_or(default))
    }

    fn numbers(&self, section: &str, key: &str) -> Result<Option<Vec<f64>>, ConfigError> {
        let Some(v) = self.get(section, key) else {
            return Ok(None);
        };
        parse_numbers(v)
            .map(Some)
            .map_err(|msg| ConfigError::Invalid {
                section: section.into(),
                key: key.into(),
                value: v.into(),
                msg,
            })
    }
}

fn parse_numbers(s: &str) -> Result<Vec<f64>, String> {
    s.split([',', ' ', '\t', ';'])
        .filter(|t| !t.is_empty())
        .map(|t| {
            t.parse::<f64>()
                .ok()
                .filter(|v| v.is_finite())
                .ok_or_else(|| format!("bad number {t:?}"))
        })
        .collect()
}

fn invalid(section: &str, key: &str, value: &str, msg: impl Into<String>) -> ConfigError {
    ConfigError::Invalid {
        section: section.into(),
        key: key.into(),
        value: value.into(),
        msg: msg.into(),
    }
}

/// `kind n1 n2 ...` with a fixed arity per kind.
fn parse_shape<'a>(
    section: &str,
    key: &str,
    value: &'a str,
) -> Result<(&'a str, Vec<f64>), ConfigError> {
    let value = value.trim();
    let (kind, rest) = value.split_once([' ', ':', '\t']).unwrap_or((value, ""));
    let nums = parse_numbers(rest).map_err(|m| invalid(section, key, value, m))?;
    Ok((kind, nums))
}

fn expect_arity(
    section: &str,
    key: &str,
    value: &str,
    nums: &[f64],
    n: usize,
) -> Result<(), ConfigError> {
    if nums.len() == n {
        Ok(())
    } else {
        Err(invalid(
            section,
            key,
            value,
            format!("expected {n} numbers, got {}", nums.len()),
        ))
    }
}

pub fn parse_vector_field(key: &str, value: &str) -> Result<VectorField, ConfigError> {
    let (kind, v) = parse_shape("field", key, value)?;
    let arity = |n| expect_arity("field", key, value, &v, n);
    match kind.to_ascii_lowercase().as_str() {
        "uniform" => {
            arity(2)?;
            Ok(VectorField::Uniform(Vec2::new(v[0], v[1])))
        }
        "polar" => {
            arity(2)?;
            Ok(VectorField::Uniform(Vec2::from_bearing(v[0], v[1])))
        }
        "shear" => {
            arity(4)?;
            Ok(VectorField::Shear {
                base: Vec2::new(v[0], v[1]),
                rate: Vec2::new(v[2], v[3]),
            })
        }
        "vortex" => {
            arity(4)?;
            Ok(VectorField::Vortex {
                center: LocalPoint::new(v[0], v[1]),
                strength: v[2],
                radius: v[3],
            })
        }
        other => Err(invalid(
            "field",
            key,
            value,
            format!("unknown vector field {other:?}"),
        )),
    }
}

pub fn parse_depth_field(value: &str) -> Result<DepthField, ConfigError> {
    let (kind, v) = parse_shape("field", "depth", value)?;
    let arity = |n| expect_arity("field", "depth", value, &v, n);
    match kind.to_ascii_lowercase().as_str() {
        "constant" => {
            arity(1)?;
            Ok(DepthField::Constant(v[0]))
        }
        "channel" => {
            arity(6)?;
            Ok(DepthField::Channel {
                through: LocalPoint::new(v[0], v[1]),
                bearing: v[2],
                depth_max: v[3],
                width: v[4],
                bank: v[5],
            })
        }
        "bump" => {
            arity(5)?;
            Ok(DepthField::Bump {
                center: LocalPoint::new(v[0], v[1]),
                amplitude: v[2],
                sigma: v[3],
                base: v[4],
            })
        }
        other => Err(invalid(
            "field",
            "depth",
            value,
            format!("unknown depth field {other:?}"),
        )),
    }
}

/// Builds a scenario from `[scenario]` and `[field]` sections.
pub fn scenario_from_ini(ini: &Ini) -> Result<ScenarioSpec, ConfigError> {
    const S: &str = "scenario";
    if !ini.has_section(S) {
        return Err(ConfigError::Missing {
            section: S.into(),
            key: "(section)".into(),
        });
    }
    let origin = match ini.numbers(S, "origin")? {
        None => GeoPoint {
            lat: 34.0,
            lon: -81.0,
        },
        Some(v) if v.len() == 2 => GeoPoint::new(v[0], v[1]).map_err(|e| {
            invalid(
                S,
                "origin",
                ini.get(S, "origin").unwrap_or_default(),
                e.to_string(),
            )
        })?,
        Some(_) => {
            return Err(invalid(
                S,
                "origin",
                ini.get(S, "origin").unwrap_or_default(),
                "expected lat, lon",
            ))
        }
    };
    let speed: f64 = ini.parse_or(S, "speed", 2.0)?;
    let trajectory = match (ini.numbers(S, "lawnmower")?, ini.get(S, "waypoints")) {
        (Some(_), Some(_)) => {
            return Err(ConfigError::Conflict(
                "[scenario] sets both lawnmower and waypoints".into(),
            ))
        }
        (Some(v), None) => {
            let raw = ini.get(S, "lawnmower").unwrap_or_default();
            if v.len() != 5 {
                return Err(invalid(S, "lawnmower", raw, "expected x0,y0,x1,y1,spacing"));
            }
            if v[4] <= 0.0 {
                return Err(invalid(S, "lawnmower", raw, "spacing must be positive"));
            }
            lawnmower((v[0], v[1]), (v[2], v[3]), v[4], speed)
        }
        (None, Some(raw)) => {
            let mut waypoints = Vec::new();
            for pair in raw.split(';').filter(|p| !p.trim().is_empty()) {
                let v = parse_numbers(pair).map_err(|m| invalid(S, "waypoints", raw, m))?;
                if v.len() != 2 {
                    return Err(invalid(S, "waypoints", raw, "each waypoint is x,y"));
                }
                waypoints.push(LocalPoint::new(v[0], v[1]));
            }
            Trajectory { waypoints, speed }
        }
        (None, None) => {
            return Err(ConfigError::Missing {
                section: S.into(),
                key: "lawnmower or waypoints".into(),
            })
        }
    };
    let defaults = StreamRates::default();
    let rates = StreamRates {
        pose: ini.parse_or(S, "pose_hz", defaults.pose)?,
        wind: ini.parse_or(S, "wind_hz", defaults.wind)?,
        current: ini.parse_or(S, "current_hz", defaults.current)?,
        depth: ini.parse_or(S, "depth_hz", defaults.depth)?,
    };
    let sensor: f64 = ini.parse_or(S, "noise", 0.0)?;
    let noise = NoiseSpec {
        pose_pos: ini.parse_or(S, "noise_pose_pos", 0.0)?,
        pose_vel: ini.parse_or(S, "noise_pose_vel", 0.0)?,
        heading: ini.parse_or(S, "noise_heading", 0.0)?,
        wind: ini.parse_or(S, "noise_wind", sensor)?,
        current: ini.parse_or(S, "noise_current", sensor)?,
        depth: ini.parse_or(S, "noise_depth", sensor)?,
    };

    const F: &str = "field";
    let wind = match ini.get(F, "wind") {
        Some(v) => parse_vector_field("wind", v)?,
        None => VectorField::Uniform(Vec2::ZERO),
    };
    let current = match ini.get(F, "current") {
        Some(v) => parse_vector_field("current", v)?,
        None => VectorField::Uniform(Vec2::ZERO),
    };
    let depth = match ini.get(F, "depth") {
        Some(v) => parse_depth_field(v)?,
        None => DepthField::Constant(2.0),
    };
    let coupling = match ini.numbers(F, "coupling")? {
        None => None,
        Some(v) if v.len() == 2 => Some(DepthCoupling {
            d_ref: v[0],
            gamma: v[1],
        }),
        Some(_) => {
            return Err(invalid(
                F,
                "coupling",
                ini.get(F, "coupling").unwrap_or_default(),
                "expected d_ref gamma",
            ))
        }
    };

    Ok(ScenarioSpec {
        mission_id: ini.get(S, "mission").unwrap_or("simulated").to_string(),
        origin,
        field: FieldSpec {
            wind,
            current,
            depth,
            coupling,
        },
        trajectory,
        rates,
        noise,
        seed: ini.parse_or(S, "seed", 0u64)?,
        start_time: ini.parse_or(S, "start_time", 0.0)?,
    })
}

/// Where the pipeline gets its log from.
#[derive(Debug, Clone, PartialEq)]
pub enum Source {
    Log(PathBuf),
    Scenario(Box<ScenarioSpec>),
}

#[derive(Debug, Clone, PartialEq)]
pub struct PipelineConfig {
    pub source: Source,
    pub slop: f64,
    pub kernel: KernelKind,
    pub budget: usize,
    pub seed: u64,
    /// Hyperparameters are searched on at most this many training points.
    pub max_opt_points: usize,
    pub resolution: f64,
    pub margin: f64,
    pub out_dir: PathBuf,
    pub met_convention: bool,
    pub compare_kernels: bool,
}

impl PipelineConfig {
    pub fn new(source: Source, out_dir: impl Into<PathBuf>) -> Self {
        PipelineConfig {
            source,
            slop: DEFAULT_SLOP,
            kernel: KernelKind::Matern32,
            budget: 120,
            seed: 0,
            max_opt_points: 300,
            resolution: DEFAULT_RESOLUTION,
            margin: 0.0,
            out_dir: out_dir.into(),
            met_convention: false,
            compare_kernels: true,
        }
    }

    /// Reads `[pipeline]`, `[sync]`, `[gp]`, `[grid]` and `[output]`. The
    /// source is `[pipeline] input = <log>` or an embedded `[scenario]`.
    pub fn from_ini(ini: &Ini) -> Result<Self, ConfigError> {
        let source = match (ini.get("pipeline", "input"), ini.has_section("scenario")) {
            (Some(_), true) => {
                return Err(ConfigError::Conflict(
                    "set either [pipeline] input or a [scenario] section, not both".into(),
                ))
            }
            (Some(path), false) => Source::Log(PathBuf::from(path)),
            (None, true) => Source::Scenario(Box::new(scenario_from_ini(ini)?)),
            (None, false) => {
                return Err(ConfigError::Missing {
                    section: "pipeline".into(),
                    key: "input (or a [scenario] section)".into(),
                })
            }
        };
        let out: String = ini.parse_or("output", "dir", "forcefield-out".to_string())?;
        let mut cfg = PipelineConfig::new(source, out);
        cfg.slop = ini.parse_or("sync", "slop", cfg.slop)?;
        if let Some(k) = ini.get("gp", "kernel") {
            cfg.kernel = k
                .parse()
                .map_err(|e: crate::gp::GpError| invalid("gp", "kernel", k, e.to_string()))?;
        }
        cfg.budget = ini.parse_or("gp", "budget", cfg.budget)?;
        cfg.seed = ini.parse_or("gp", "seed", cfg.seed)?;
        cfg.max_opt_points = ini.parse_or("gp", "max_opt_points", cfg.max_opt_points)?;
        cfg.compare_kernels = ini.parse_or("gp", "compare_kernels", cfg.compare_kernels)?;
        cfg.resolution = ini.parse_or("grid", "res", cfg.resolution)?;
        cfg.margin = ini.parse_or("grid", "margin", cfg.margin)?;
        cfg.met_convention = ini.parse_or("output", "met_convention", cfg.met_convention)?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<(), ConfigError> {
        let positive = |name: &str, v: f64| {
            if v.is_finite() && v > 0.0 {
                Ok(())
            } else {
                Err(ConfigError::Conflict(format!(
                    "{name} must be positive, got {v}"
                )))
            }
        };
        positive("slop", self.slop)?;
        positive("resolution", self.resolution)?;
        if !(self.margin.is_finite() && self.margin >= 0.0) {
            return Err(ConfigError::Conflict(format!(
                "margin must be non-negative, got {}",
                self.margin
            )));
        }
        if self.budget == 0 {
            return Err(ConfigError::Conflict("budget must be at least 1".into()));
        }
        if self.max_opt_points < 2 {
            return Err(ConfigError::Conflict(
                "max_opt_points must be at least 2".into(),
            ));
        }
        Ok(())
    }
}
