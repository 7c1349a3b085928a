//! Command-line driver. Every stage is a subcommand; `pipeline` runs them all.
//!
//! Exit codes: 0 ok, 1 quality gate (timestamp gaps), 2 usage/config,
//! 3 I/O, 4 numeric failure. Log level comes from `FORCEFIELD_LOG_LEVEL`.

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use log::{info, warn};

use forcefield::config::{scenario_from_ini, ConfigError, Ini, PipelineConfig, Source};
use forcefield::field;
use forcefield::fusion::fuse;
use forcefield::gp::{FitOptions, KernelKind};
use forcefield::ingest::{self, MissionLog};
use forcefield::pipeline::{self, PipelineError};
use forcefield::sim::simulate_run;
use forcefield::sync::{align, align_indices, DEFAULT_SLOP};
use forcefield::telemetry::LocalPoint;

#[derive(Parser)]
#[command(
    name = "forcefield",
    version,
    about = "ASV telemetry to wind/current/depth field maps"
)]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Simulate a mission log from a scenario config.
    Simulate {
        scenario: PathBuf,
        #[arg(long)]
        out: PathBuf,
        /// Override the scenario seed.
        #[arg(long)]
        seed: Option<u64>,
    },
    /// Report per-stream timestamp gaps and export the track as KML.
    Inspect {
        log: PathBuf,
        /// KML output path.
        #[arg(long)]
        out: Option<PathBuf>,
        /// Fail (exit 1) if any stream has a gap longer than this, in seconds.
        #[arg(long)]
        max_gap: Option<f64>,
    },
    /// Align streams into tuples and write their sample indices as CSV.
    Sync {
        log: PathBuf,
        #[arg(long, default_value_t = DEFAULT_SLOP)]
        slop: f64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Align and correct for self-motion; writes the fused CSV.
    Fuse {
        log: PathBuf,
        #[arg(long, default_value_t = DEFAULT_SLOP)]
        slop: f64,
        #[arg(long)]
        out: PathBuf,
    },
    /// Fit one model per phenomenon from a fused CSV into a directory.
    Fit {
        fused: PathBuf,
        #[command(flatten)]
        gp: GpArgs,
        #[arg(long)]
        out: PathBuf,
    },
    /// Predict from saved models at points or over a grid.
    Predict {
        models: PathBuf,
        /// Query point `x,y` in local metres; repeatable. Without it a grid is rendered.
        #[arg(long, value_parser = parse_point)]
        at: Vec<LocalPoint>,
        #[arg(long, default_value_t = field::DEFAULT_RESOLUTION)]
        res: f64,
        #[arg(long, default_value_t = 0.0)]
        margin: f64,
        #[arg(long)]
        met_convention: bool,
        /// Output directory for map.csv / map.geojson (grid mode).
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Run sync → fuse → fit → render → export from a config file.
    Pipeline {
        config: PathBuf,
        #[arg(long)]
        slop: Option<f64>,
        #[arg(long)]
        kernel: Option<KernelKind>,
        #[arg(long)]
        budget: Option<usize>,
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long)]
        res: Option<f64>,
        #[arg(long)]
        margin: Option<f64>,
        #[arg(long)]
        met_convention: bool,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(Args)]
struct GpArgs {
    #[arg(long, default_value_t = KernelKind::Matern32)]
    kernel: KernelKind,
    /// Likelihood evaluations per hyperparameter search.
    #[arg(long, default_value_t = 120)]
    budget: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
}

fn parse_point(s: &str) -> Result<LocalPoint, String> {
    let (x, y) = s.split_once(',').ok_or("expected x,y")?;
    let f = |v: &str| v.trim().parse::<f64>().map_err(|e| e.to_string());
    Ok(LocalPoint::new(f(x)?, f(y)?))
}

/// An error with its exit code.
struct Failure(u8, String);

impl From<PipelineError> for Failure {
    fn from(e: PipelineError) -> Self {
        Failure(e.exit_code() as u8, e.to_string())
    }
}

fn cfg_err(e: ConfigError) -> Failure {
    PipelineError::from(e).into()
}

fn read_text(path: &Path) -> Result<String, Failure> {
    fs::read_to_string(path)
        .map_err(|e| Failure(3, format!("I/O error on {}: {e}", path.display())))
}

fn write_text(path: &Path, text: &str) -> Result<(), Failure> {
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        fs::create_dir_all(dir)
            .map_err(|e| Failure(3, format!("I/O error on {}: {e}", dir.display())))?;
    }
    fs::write(path, text).map_err(|e| Failure(3, format!("I/O error on {}: {e}", path.display())))
}

fn read_log(path: &Path) -> Result<MissionLog, Failure> {
    pipeline::load_source(&Source::Log(path.to_path_buf())).map_err(Failure::from)
}

fn simulate(scenario: &Path, out: &Path, seed: Option<u64>) -> Result<(), Failure> {
    let ini: Ini = read_text(scenario)?.parse().map_err(cfg_err)?;
    let mut spec = scenario_from_ini(&ini).map_err(cfg_err)?;
    if let Some(s) = seed {
        spec.seed = s;
    }
    let log = simulate_run(&spec).map_err(PipelineError::from)?;
    info!(
        "simulated {} pose, {} wind, {} current, {} depth samples",
        log.pose.len(),
        log.wind.len(),
        log.current.len(),
        log.depth.len()
    );
    write_text(out, &ingest::write_log_string(&log))
}

fn inspect(log_path: &Path, out: Option<&Path>, max_gap: Option<f64>) -> Result<(), Failure> {
    let log = read_log(log_path)?;
    if let Some(out) = out {
        let kml = ingest::kml_string(&log).map_err(PipelineError::from)?;
        write_text(out, &kml)?;
    }
    let mut gap_found = false;
    for (name, gap) in log.max_gaps() {
        let counts = match name {
            "pose" => log.pose.len(),
            "wind" => log.wind.len(),
            "current" => log.current.len(),
            _ => log.depth.len(),
        };
        match gap {
            Some(g) => {
                let over = max_gap.is_some_and(|m| g > m);
                gap_found |= over;
                println!(
                    "{name}: {counts} samples, max gap {g:.3} s{}",
                    if over { "  GAP" } else { "" }
                );
            }
            None => println!("{name}: {counts} samples"),
        }
    }
    if gap_found {
        return Err(Failure(
            1,
            format!("inspect: gap longer than {} s", max_gap.unwrap_or_default()),
        ));
    }
    Ok(())
}

fn sync(log_path: &Path, slop: f64, out: Option<&Path>) -> Result<(), Failure> {
    let log = read_log(log_path)?;
    let idx = align_indices(&log, slop).map_err(PipelineError::from)?;
    let mut s = String::from("t,pose,wind,current,depth,spread\n");
    for [p, w, c, d] in idx {
        let ts = [
            log.pose[p].t,
            log.wind[w].t,
            log.current[c].t,
            log.depth[d].t,
        ];
        let lo = ts.iter().copied().fold(f64::INFINITY, f64::min);
        let hi = ts.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        let _ = writeln!(s, "{},{p},{w},{c},{d},{}", ts[0], hi - lo);
    }
    match out {
        Some(path) => write_text(path, &s),
        None => {
            print!("{s}");
            Ok(())
        }
    }
}

fn fuse_cmd(log_path: &Path, slop: f64, out: &Path) -> Result<(), Failure> {
    let log = read_log(log_path)?;
    let tuples = align(&log, slop).map_err(PipelineError::from)?;
    if tuples.is_empty() {
        return Err(PipelineError::NoTuples(slop).into());
    }
    let samples = fuse(&tuples, log.origin()).map_err(PipelineError::from)?;
    info!("fused {} samples", samples.len());
    write_text(out, &pipeline::fused_csv_string(log.origin(), &samples))
}

fn fit(fused: &Path, gp: &GpArgs, out: &Path) -> Result<(), Failure> {
    let (origin, samples) = pipeline::parse_fused_csv(&read_text(fused)?)?;
    if gp.budget == 0 {
        return Err(Failure(2, "fit: --budget must be at least 1".into()));
    }
    let opts = FitOptions {
        budget: gp.budget,
        seed: gp.seed,
        max_opt_points: 300,
    };
    let models = pipeline::fit_models(&samples, origin, gp.kernel, &opts)?;
    for p in pipeline::save_models(&models, out)? {
        println!("{}", p.display());
    }
    Ok(())
}

fn predict(
    dir: &Path,
    at: &[LocalPoint],
    res: f64,
    margin: f64,
    met: bool,
    out: Option<&Path>,
) -> Result<(), Failure> {
    let models = pipeline::load_models(dir)?;
    if !at.is_empty() {
        println!("x,y,{}", field::LAYER_NAMES.join(","));
        for p in at {
            let mut row = format!("{},{}", p.x, p.y);
            for (i, (mean, _)) in field::layer_values(&field::query(&models, p))
                .iter()
                .enumerate()
            {
                let v = if met && field::LAYER_NAMES[i].ends_with("_dir") {
                    (mean + 180.0).rem_euclid(360.0)
                } else {
                    *mean
                };
                let _ = write!(row, ",{v}");
            }
            println!("{row}");
        }
        return Ok(());
    }
    let out =
        out.ok_or_else(|| Failure(2, "predict: give --at points or --out for a grid".into()))?;
    let grid = field::grid_around(models.depth.gp.data().x(), models.origin, res, margin)
        .map_err(PipelineError::from)?;
    let mut layers = field::render(&models, &grid);
    if met {
        field::apply_met_convention(&mut layers);
    }
    fs::create_dir_all(out)
        .map_err(|e| Failure(3, format!("I/O error on {}: {e}", out.display())))?;
    field::export_csv(&grid, &layers, out.join("map.csv")).map_err(PipelineError::from)?;
    field::export_geojson(&grid, &layers, out.join("map.geojson")).map_err(PipelineError::from)?;
    Ok(())
}

fn run(cli: Cli) -> Result<(), Failure> {
    match cli.cmd {
        Cmd::Simulate {
            scenario,
            out,
            seed,
        } => simulate(&scenario, &out, seed),
        Cmd::Inspect { log, out, max_gap } => inspect(&log, out.as_deref(), max_gap),
        Cmd::Sync { log, slop, out } => sync(&log, slop, out.as_deref()),
        Cmd::Fuse { log, slop, out } => fuse_cmd(&log, slop, &out),
        Cmd::Fit { fused, gp, out } => fit(&fused, &gp, &out),
        Cmd::Predict {
            models,
            at,
            res,
            margin,
            met_convention,
            out,
        } => predict(&models, &at, res, margin, met_convention, out.as_deref()),
        Cmd::Pipeline {
            config,
            slop,
            kernel,
            budget,
            seed,
            res,
            margin,
            met_convention,
            out,
        } => {
            let ini: Ini = read_text(&config)?.parse().map_err(cfg_err)?;
            let mut cfg = PipelineConfig::from_ini(&ini).map_err(cfg_err)?;
            // Relative log paths resolve against the config file.
            if let Source::Log(p) = &mut cfg.source {
                if p.is_relative() {
                    if let Some(dir) = config.parent() {
                        *p = dir.join(&*p);
                    }
                }
            }
            cfg.slop = slop.unwrap_or(cfg.slop);
            cfg.kernel = kernel.unwrap_or(cfg.kernel);
            cfg.budget = budget.unwrap_or(cfg.budget);
            cfg.seed = seed.unwrap_or(cfg.seed);
            cfg.resolution = res.unwrap_or(cfg.resolution);
            cfg.margin = margin.unwrap_or(cfg.margin);
            cfg.met_convention |= met_convention;
            if let Some(o) = out {
                cfg.out_dir = o;
            }
            let report = pipeline::run_pipeline(&cfg)?;
            println!("{} tuples", report.tuples);
            println!("{}", report.fused.display());
            for p in &report.models {
                println!("{}", p.display());
            }
            println!("{}", report.map_csv.display());
            println!("{}", report.map_geojson.display());
            if let Some(k) = &report.kernels {
                println!("{}", k.display());
            }
            Ok(())
        }
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::new().filter_or("FORCEFIELD_LOG_LEVEL", "warn"))
        .init();
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure(code, msg)) => {
            if code == 1 {
                warn!("{msg}");
            }
            eprintln!("forcefield: {msg}");
            ExitCode::from(code)
        }
    }
}
