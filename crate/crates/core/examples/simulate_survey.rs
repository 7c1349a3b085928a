// Simulate a lawnmower survey over known wind, current and depth fields and
// write the resulting multi-rate log.

use forcefield::ingest;
use forcefield::sim::{
    lawnmower, simulate_run, DepthField, FieldSpec, NoiseSpec, ScenarioSpec, StreamRates,
    VectorField,
};
use forcefield::telemetry::{GeoPoint, LocalPoint, Vec2};

pub fn run_example() -> Result<(), Box<dyn std::error::Error>> {
    let spec = ScenarioSpec {
        mission_id: "lake-survey".into(),
        origin: GeoPoint::new(34.0, -81.0)?,
        field: FieldSpec {
            wind: VectorField::Uniform(Vec2::new(2.0, 0.0)),
            current: VectorField::Uniform(Vec2::from_bearing(2.5, 30.0)),
            depth: DepthField::Channel {
                through: LocalPoint::new(0.0, 50.0),
                bearing: 90.0,
                depth_max: 2.0,
                width: 15.0,
                bank: 0.5,
            },
            coupling: None,
        },
        trajectory: lawnmower((0.0, 0.0), (100.0, 100.0), 10.0, 2.0),
        rates: StreamRates::default(),
        noise: NoiseSpec::sensors(0.1),
        seed: 7,
        start_time: 0.0,
    };
    let log = simulate_run(&spec)?;
    println!(
        "{} pose, {} wind, {} current, {} depth samples over {:.0} s",
        log.pose.len(),
        log.wind.len(),
        log.current.len(),
        log.depth.len(),
        log.end_time().unwrap_or(0.0) - log.start_time().unwrap_or(0.0)
    );

    let dir = tempfile::tempdir()?;
    let path = dir.path().join("lake-survey.log");
    ingest::write_log(&log, &path)?;
    let text = std::fs::read_to_string(&path)?;
    for line in text.lines().take(4) {
        println!("  {line}");
    }
    Ok(())
}

#[allow(dead_code)]
fn main() -> Result<(), Box<dyn std::error::Error>> {
    run_example()
}
