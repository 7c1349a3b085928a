//! End-to-end driver: log → aligned tuples → fused samples → fitted models →
//! rendered maps, plus the artifact files each stage writes.
//!
//! Output directory layout:
//!
//! ```text
//! <out>/mission.log      input log (written when the source is a scenario)
//! <out>/mission.kml      track for visual inspection
//! <out>/fused.csv        self-motion-corrected samples
//! <out>/models/*.gp      one model per scalar phenomenon
//! <out>/map.csv          gridded layers
//! <out>/map.geojson
//! <out>/kernels.csv      kernel comparison on a held-out split
//! ```

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use log::info;
use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use thiserror::Error;

use crate::config::{ConfigError, PipelineConfig, Source};
use crate::field::{self, FieldError, FieldModels};
use crate::fusion::{fuse, FusedSample};
use crate::gp::{
    fit_scalar_field_with, fit_vector_field_with, Dataset, FitOptions, GpError, KernelKind,
    ModelFile, ScalarFieldModel, VectorFieldModel,
};
use crate::ingest::{self, IngestError, MissionLog};
use crate::sim::{simulate_run, SimError};
use crate::sync::{align, SyncError};
use crate::telemetry::{to_geo, GeoPoint, LocalPoint, TelemetryError, Vec2};

pub const FUSED_MAGIC: &str = "# forcefield-fused v1";
pub const FUSED_HEADER: &str =
    "t,x,y,lat,lon,wind_e,wind_n,current_e,current_n,depth,boat_speed,heading";

/// The scalar phenomena that get a model file and a kernel-comparison row.
pub const PHENOMENA: [&str; 5] = ["depth", "wind_e", "wind_n", "current_e", "current_n"];

/// Errors tagged with the stage that raised them.
#[derive(Debug, Error)]
pub enum PipelineError {
    #[error("config: {0}")]
    Config(#[from] ConfigError),
    #[error("ingest: {0}")]
    Ingest(#[from] IngestError),
    #[error("simulate: {0}")]
    Sim(#[from] SimError),
    #[error("sync: {0}")]
    Sync(#[from] SyncError),
    #[error("sync: no aligned tuples at slop {0} s")]
    NoTuples(f64),
    #[error("fuse: {0}")]
    Fuse(#[from] TelemetryError),
    #[error("fit: {0}")]
    Gp(#[from] GpError),
    #[error("map: {0}")]
    Field(#[from] FieldError),
    #[error("I/O error on {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
    #[error("{0}")]
    Format(String),
}

impl PipelineError {
    fn io(path: &Path, source: std::io::Error) -> Self {
        PipelineError::Io {
            path: path.display().to_string(),
            source,
        }
    }

    /// 2 usage/config, 3 I/O, 4 numeric failure.
    pub fn exit_code(&self) -> i32 {
        match self {
            PipelineError::Io { .. }
            | PipelineError::Ingest(IngestError::Io { .. })
            | PipelineError::Field(FieldError::Io { .. }) => 3,
            PipelineError::Gp(GpError::ModelFormat(_) | GpError::UnknownKernel(_))
            | PipelineError::Gp(GpError::InvalidBudget) => 2,
            PipelineError::Gp(_) | PipelineError::Fuse(_) | PipelineError::NoTuples(_) => 4,
            _ => 2,
        }
    }
}

/// Reads a log, or simulates one from a scenario.
pub fn load_source(source: &Source) -> Result<MissionLog, PipelineError> {
    match source {
        Source::Log(path) => {
            let (log, report) = ingest::parse_log(path)?;
            if report.skipped > 0 || report.duplicates > 0 {
                info!(
                    "{}: skipped {} records, dropped {} duplicates",
                    path.display(),
                    report.skipped,
                    report.duplicates
                );
            }
            Ok(log)
        }
        Source::Scenario(spec) => Ok(simulate_run(spec)?),
    }
}

pub fn fused_csv_string(origin: GeoPoint, samples: &[FusedSample]) -> String {
    let mut s = String::new();
    let _ = writeln!(s, "{FUSED_MAGIC},{},{}", origin.lat, origin.lon);
    let _ = writeln!(s, "{FUSED_HEADER}");
    for f in samples {
        let g = to_geo(origin, f.pos);
        let _ = writeln!(
            s,
            "{},{},{},{},{},{},{},{},{},{},{},{}",
            f.t,
            f.pos.x,
            f.pos.y,
            g.lat,
            g.lon,
            f.wind_world.e,
            f.wind_world.n,
            f.current_world.e,
            f.current_world.n,
            f.depth,
            f.boat_speed,
            f.heading
        );
    }
    s
}

/// Parses [`fused_csv_string`] output. Lat/lon columns are ignored in favour
/// of the local coordinates.
pub fn parse_fused_csv(text: &str) -> Result<(GeoPoint, Vec<FusedSample>), PipelineError> {
    let bad = |m: String| PipelineError::Format(format!("fused csv: {m}"));
    let mut lines = text.lines();
    let first = lines.next().unwrap_or_default();
    let rest = first
        .strip_prefix(FUSED_MAGIC)
        .and_then(|r| r.strip_prefix(','))
        .ok_or_else(|| bad(format!("missing '{FUSED_MAGIC}' header")))?;
    let num = |s: &str| -> Result<f64, PipelineError> {
        s.trim()
            .parse::<f64>()
            .ok()
            .filter(|v| v.is_finite())
            .ok_or_else(|| bad(format!("bad number {s:?}")))
    };
    let (lat, lon) = rest
        .split_once(',')
        .ok_or_else(|| bad("origin needs lat,lon".into()))?;
    let origin = GeoPoint::new(num(lat)?, num(lon)?).map_err(|e| bad(e.to_string()))?;
    if lines.next().map(str::trim) != Some(FUSED_HEADER) {
        return Err(bad("unexpected column header".into()));
    }
    let mut out = Vec::new();
    for (i, line) in lines.enumerate() {
        if line.trim().is_empty() {
            continue;
        }
        let f: Vec<&str> = line.split(',').collect();
        if f.len() != 12 {
            return Err(bad(format!(
                "row {}: expected 12 fields, got {}",
                i + 1,
                f.len()
            )));
        }
        let v = f.iter().map(|s| num(s)).collect::<Result<Vec<_>, _>>()?;
        out.push(FusedSample {
            t: v[0],
            pos: LocalPoint::new(v[1], v[2]),
            wind_world: Vec2::new(v[5], v[6]),
            current_world: Vec2::new(v[7], v[8]),
            depth: v[9],
            boat_speed: v[10],
            heading: v[11],
        });
    }
    Ok((origin, out))
}

/// Scalar target of one phenomenon.
pub fn phenomenon_value(s: &FusedSample, name: &str) -> Option<f64> {
    Some(match name {
        "depth" => s.depth,
        "wind_e" => s.wind_world.e,
        "wind_n" => s.wind_world.n,
        "current_e" => s.current_world.e,
        "current_n" => s.current_world.n,
        _ => return None,
    })
}

pub fn phenomenon_dataset(samples: &[FusedSample], name: &str) -> Result<Dataset, PipelineError> {
    let y = samples
        .iter()
        .map(|s| phenomenon_value(s, name))
        .collect::<Option<Vec<f64>>>()
        .ok_or_else(|| PipelineError::Format(format!("unknown phenomenon {name:?}")))?;
    Ok(Dataset::new(samples.iter().map(|s| s.pos).collect(), y)?)
}

// Distinct search seeds per phenomenon so restarts don't line up.
fn phenomenon_seed(seed: u64, index: usize) -> u64 {
    seed.wrapping_add((index as u64).wrapping_mul(0x2545_F491_4F6C_DD1D))
}

/// Fits depth (mean-centered), wind and current with one kernel family.
pub fn fit_models(
    samples: &[FusedSample],
    origin: GeoPoint,
    kind: KernelKind,
    opts: &FitOptions,
) -> Result<FieldModels, PipelineError> {
    if samples.is_empty() {
        return Err(GpError::EmptyDataset.into());
    }
    let with_seed = |i| FitOptions {
        seed: phenomenon_seed(opts.seed, i),
        ..*opts
    };
    let depth = phenomenon_dataset(samples, "depth")?;
    let wind: Vec<_> = samples.iter().map(|s| (s.pos, s.wind_world)).collect();
    let current: Vec<_> = samples.iter().map(|s| (s.pos, s.current_world)).collect();
    let ((depth, wind), current) = rayon::join(
        || {
            rayon::join(
                || fit_scalar_field_with(&depth, kind, &with_seed(0), true),
                || fit_vector_field_with(&wind, kind, &with_seed(1)),
            )
        },
        || fit_vector_field_with(&current, kind, &with_seed(3)),
    );
    Ok(FieldModels {
        origin,
        depth: depth?,
        wind: wind?,
        current: current?,
    })
}

/// The five scalar models as named model files.
pub fn model_files(models: &FieldModels) -> Vec<ModelFile> {
    let comp = |gp: &crate::gp::GpModel| ScalarFieldModel {
        offset: 0.0,
        gp: gp.clone(),
    };
    let named = [
        ("depth", models.depth.clone()),
        ("wind_e", comp(&models.wind.east)),
        ("wind_n", comp(&models.wind.north)),
        ("current_e", comp(&models.current.east)),
        ("current_n", comp(&models.current.north)),
    ];
    named
        .into_iter()
        .map(|(name, model)| ModelFile {
            name: name.to_string(),
            origin: models.origin,
            model,
        })
        .collect()
}

pub fn save_models(
    models: &FieldModels,
    dir: impl AsRef<Path>,
) -> Result<Vec<PathBuf>, PipelineError> {
    let dir = dir.as_ref();
    fs::create_dir_all(dir).map_err(|e| PipelineError::io(dir, e))?;
    let mut paths = Vec::new();
    for mf in model_files(models) {
        let path = dir.join(format!("{}.gp", mf.name));
        fs::write(&path, mf.to_text()).map_err(|e| PipelineError::io(&path, e))?;
        paths.push(path);
    }
    Ok(paths)
}

/// Reads the five model files written by [`save_models`].
pub fn load_models(dir: impl AsRef<Path>) -> Result<FieldModels, PipelineError> {
    let dir = dir.as_ref();
    let mut files = Vec::new();
    for name in PHENOMENA {
        let path = dir.join(format!("{name}.gp"));
        let text = fs::read_to_string(&path).map_err(|e| PipelineError::io(&path, e))?;
        let mf = ModelFile::from_text(&text)?;
        if mf.name != name {
            return Err(PipelineError::Format(format!(
                "{} holds model {:?}, expected {name:?}",
                path.display(),
                mf.name
            )));
        }
        files.push(mf);
    }
    let origin = files[0].origin;
    if files.iter().any(|f| f.origin != origin) {
        return Err(PipelineError::Format(
            "model files disagree on origin".into(),
        ));
    }
    let mut it = files.into_iter().map(|f| f.model);
    let mut next = || it.next().expect("five models");
    let depth = next();
    let wind = VectorFieldModel {
        east: next().gp,
        north: next().gp,
    };
    let current = VectorFieldModel {
        east: next().gp,
        north: next().gp,
    };
    Ok(FieldModels {
        origin,
        depth,
        wind,
        current,
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct KernelScore {
    pub kernel: KernelKind,
    pub phenomenon: &'static str,
    /// Held-out root mean squared error.
    pub rmse: f64,
    /// Log marginal likelihood on the training split.
    pub lml: f64,
}

/// Seeded 80/20 split of `0..n` into (train, test). Both are non-empty for
/// n ≥ 2.
pub fn split_indices(n: usize, seed: u64) -> (Vec<usize>, Vec<usize>) {
    let mut idx: Vec<usize> = (0..n).collect();
    idx.shuffle(&mut ChaCha8Rng::seed_from_u64(seed));
    let n_test =
        ((n as f64 * 0.2).round() as usize).clamp(usize::from(n >= 2), n.saturating_sub(1));
    let mut test = idx.split_off(n - n_test);
    idx.sort_unstable();
    test.sort_unstable();
    (idx, test)
}

/// Fits every kernel to every phenomenon on a shared split and scores it on
/// the held-out points. Rows are ordered kernel-major.
pub fn compare_kernels(
    samples: &[FusedSample],
    opts: &FitOptions,
) -> Result<Vec<KernelScore>, PipelineError> {
    if samples.len() < 2 {
        return Err(GpError::EmptyDataset.into());
    }
    let (train, test) = split_indices(samples.len(), opts.seed);
    let jobs: Vec<(KernelKind, usize)> = KernelKind::ALL
        .iter()
        .flat_map(|&k| (0..PHENOMENA.len()).map(move |p| (k, p)))
        .collect();
    jobs.par_iter()
        .map(|&(kind, p)| {
            let name = PHENOMENA[p];
            let all = phenomenon_dataset(samples, name)?;
            let tr = all.select(&train)?;
            let te = all.select(&test)?;
            let o = FitOptions {
                seed: phenomenon_seed(opts.seed, p),
                ..*opts
            };
            let m = fit_scalar_field_with(&tr, kind, &o, name == "depth")?;
            let sse: f64 = te
                .x()
                .iter()
                .zip(te.y())
                .map(|(x, y)| (m.predict(x).mean - y).powi(2))
                .sum();
            Ok(KernelScore {
                kernel: kind,
                phenomenon: name,
                rmse: (sse / te.len() as f64).sqrt(),
                lml: m.gp.log_marginal_likelihood(),
            })
        })
        .collect()
}

pub fn kernels_csv_string(scores: &[KernelScore]) -> String {
    let mut s = String::from("kernel,phenomenon,rmse,lml\n");
    for k in scores {
        let _ = writeln!(s, "{},{},{},{}", k.kernel, k.phenomenon, k.rmse, k.lml);
    }
    s
}

/// Paths and counts from one pipeline run.
#[derive(Debug, Clone)]
pub struct PipelineReport {
    pub tuples: usize,
    pub fused: PathBuf,
    pub kml: PathBuf,
    pub models: Vec<PathBuf>,
    pub map_csv: PathBuf,
    pub map_geojson: PathBuf,
    pub kernels: Option<PathBuf>,
    pub scores: Vec<KernelScore>,
}

fn write(path: &Path, text: &str) -> Result<(), PipelineError> {
    fs::write(path, text).map_err(|e| PipelineError::io(path, e))
}

pub fn run_pipeline(cfg: &PipelineConfig) -> Result<PipelineReport, PipelineError> {
    cfg.validate()?;
    let out = &cfg.out_dir;
    fs::create_dir_all(out).map_err(|e| PipelineError::io(out, e))?;

    let log = load_source(&cfg.source)?;
    if matches!(cfg.source, Source::Scenario(_)) {
        write(&out.join("mission.log"), &ingest::write_log_string(&log))?;
    }
    let kml = out.join("mission.kml");
    write(&kml, &ingest::kml_string(&log)?)?;

    let tuples = align(&log, cfg.slop)?;
    info!("aligned {} tuples at slop {} s", tuples.len(), cfg.slop);
    if tuples.is_empty() {
        return Err(PipelineError::NoTuples(cfg.slop));
    }
    let origin = log.origin();
    let samples = fuse(&tuples, origin)?;
    let fused = out.join("fused.csv");
    write(&fused, &fused_csv_string(origin, &samples))?;

    let opts = FitOptions {
        budget: cfg.budget,
        seed: cfg.seed,
        max_opt_points: cfg.max_opt_points,
    };
    let models = fit_models(&samples, origin, cfg.kernel, &opts)?;
    let model_paths = save_models(&models, out.join("models"))?;

    let grid = field::build_grid(&samples, origin, cfg.resolution, cfg.margin)?;
    let mut layers = field::render(&models, &grid);
    if cfg.met_convention {
        field::apply_met_convention(&mut layers);
    }
    let map_csv = out.join("map.csv");
    let map_geojson = out.join("map.geojson");
    field::export_csv(&grid, &layers, &map_csv)?;
    field::export_geojson(&grid, &layers, &map_geojson)?;
    info!("rendered {}x{} grid", grid.nx, grid.ny);

    let (kernels, scores) = if cfg.compare_kernels {
        let scores = compare_kernels(&samples, &opts)?;
        let path = out.join("kernels.csv");
        write(&path, &kernels_csv_string(&scores))?;
        (Some(path), scores)
    } else {
        (None, Vec::new())
    };

    Ok(PipelineReport {
        tuples: tuples.len(),
        fused,
        kml,
        models: model_paths,
        map_csv,
        map_geojson,
        kernels,
        scores,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sample(i: usize) -> FusedSample {
        let f = i as f64;
        FusedSample {
            t: f * 0.2,
            pos: LocalPoint::new(f * 1.5, (f * 0.7).sin() * 20.0),
            wind_world: Vec2::new(2.0 + 0.01 * f, -0.1),
            current_world: Vec2::new(1.25, 2.165),
            depth: 2.0 + 0.001 * f,
            boat_speed: 1.0 / 3.0,
            heading: 12.5,
        }
    }

    fn origin() -> GeoPoint {
        GeoPoint::new(34.0, -81.0).unwrap()
    }

    #[test]
    fn fused_csv_round_trip() {
        let samples: Vec<_> = (0..20).map(sample).collect();
        let text = fused_csv_string(origin(), &samples);
        let (o, back) = parse_fused_csv(&text).unwrap();
        assert_eq!(o, origin());
        assert_eq!(back, samples);
    }

    #[test]
    fn fused_csv_rejects_garbage() {
        assert!(parse_fused_csv("t,x\n1,2\n").is_err());
        let mut text = fused_csv_string(origin(), &[sample(1)]);
        text.push_str("1,2,3\n");
        assert!(parse_fused_csv(&text).is_err());
    }

    #[test]
    fn split_is_deterministic_and_disjoint() {
        let (a, b) = split_indices(101, 9);
        assert_eq!(split_indices(101, 9), (a.clone(), b.clone()));
        assert_eq!(b.len(), 20);
        assert_eq!(a.len() + b.len(), 101);
        assert!(a.iter().all(|i| !b.contains(i)));
        let (_, t2) = split_indices(2, 0);
        assert_eq!(t2.len(), 1);
    }

    #[test]
    fn models_save_and_load() {
        let samples: Vec<_> = (0..30).map(sample).collect();
        let models = fit_models(
            &samples,
            origin(),
            KernelKind::Matern32,
            &FitOptions::new(20, 1),
        )
        .unwrap();
        let dir = tempfile::tempdir().unwrap();
        save_models(&models, dir.path()).unwrap();
        let back = load_models(dir.path()).unwrap();
        let p = LocalPoint::new(7.0, 3.0);
        let (a, b) = (field::query(&models, &p), field::query(&back, &p));
        assert!((a.depth - b.depth).abs() < 1e-9);
        assert!((a.wind - b.wind).norm() < 1e-9);
        assert!((a.current - b.current).norm() < 1e-9);
    }

    #[test]
    fn kernel_table_shape() {
        let samples: Vec<_> = (0..40).map(sample).collect();
        let scores = compare_kernels(&samples, &FitOptions::new(10, 2)).unwrap();
        assert_eq!(scores.len(), 20);
        let csv = kernels_csv_string(&scores);
        assert_eq!(csv.lines().count(), 21);
        assert!(scores
            .iter()
            .all(|s| s.rmse.is_finite() && s.lml.is_finite()));
    }

    #[test]
    fn exit_codes() {
        assert_eq!(PipelineError::NoTuples(0.1).exit_code(), 4);
        assert_eq!(
            PipelineError::Gp(GpError::NotPositiveDefinite).exit_code(),
            4
        );
        assert_eq!(
            PipelineError::Config(ConfigError::Conflict("x".into())).exit_code(),
            2
        );
        let io = PipelineError::io(Path::new("x"), std::io::Error::other("boom"));
        assert_eq!(io.exit_code(), 3);
        assert!(io.to_string().contains('x'));
        assert!(PipelineError::NoTuples(0.1)
            .to_string()
            .starts_with("sync:"));
    }
}
