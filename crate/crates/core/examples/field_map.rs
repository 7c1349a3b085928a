// From fused samples to gridded wind/current/depth layers exported as CSV
// and GeoJSON.

use forcefield::field::{self, apply_met_convention};
use forcefield::fusion::fuse;
use forcefield::gp::{FitOptions, KernelKind};
use forcefield::pipeline::fit_models;
use forcefield::sim::{
    lawnmower, simulate_run, DepthField, FieldSpec, NoiseSpec, ScenarioSpec, StreamRates,
    VectorField,
};
use forcefield::sync::align;
use forcefield::telemetry::{GeoPoint, LocalPoint, Vec2};

pub fn run_example() -> Result<(), Box<dyn std::error::Error>> {
    let spec = ScenarioSpec {
        mission_id: "vortex".into(),
        origin: GeoPoint::new(34.0, -81.0)?,
        field: FieldSpec {
            wind: VectorField::Uniform(Vec2::new(3.0, -1.0)),
            current: VectorField::Vortex {
                center: LocalPoint::new(30.0, 30.0),
                strength: 1.0,
                radius: 15.0,
            },
            depth: DepthField::Bump {
                center: LocalPoint::new(30.0, 30.0),
                amplitude: -1.0,
                sigma: 12.0,
                base: 4.0,
            },
            coupling: None,
        },
        trajectory: lawnmower((0.0, 0.0), (60.0, 60.0), 10.0, 2.0),
        rates: StreamRates::default(),
        noise: NoiseSpec::sensors(0.05),
        seed: 2,
        start_time: 0.0,
    };
    let log = simulate_run(&spec)?;
    let samples = fuse(&align(&log, 0.25)?, log.origin())?;
    let opts = FitOptions {
        budget: 60,
        seed: 0,
        max_opt_points: 200,
    };
    let models = fit_models(&samples, log.origin(), KernelKind::Matern32, &opts)?;

    let grid = field::build_grid(&samples, log.origin(), 5.0, 0.0)?;
    let mut layers = field::render(&models, &grid);
    println!(
        "{} x {} grid, {} layers",
        grid.nx,
        grid.ny,
        layers.layers.len()
    );

    let centre = field::query(&models, &LocalPoint::new(30.0, 30.0));
    println!(
        "at the vortex centre: current {:.2} m/s, depth {:.2} m",
        centre.current.norm(),
        centre.depth
    );
    let edge = field::query(&models, &LocalPoint::new(30.0, 45.0));
    println!(
        "15 m north: current {:.2} m/s toward {:.0}°",
        edge.current.norm(),
        edge.current.bearing()
    );

    // weather-station style "coming from" directions
    apply_met_convention(&mut layers);
    let dir = tempfile::tempdir()?;
    field::export_csv(&grid, &layers, dir.path().join("map.csv"))?;
    field::export_geojson(&grid, &layers, dir.path().join("map.geojson"))?;
    let csv = std::fs::read_to_string(dir.path().join("map.csv"))?;
    println!("{}", csv.lines().next().unwrap_or_default());
    Ok(())
}

#[allow(dead_code)]
fn main() -> Result<(), Box<dyn std::error::Error>> {
    run_example()
}
