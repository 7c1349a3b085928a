// Align four streams sampled at different rates into tuples, and see how the
// tolerance (slop) trades tuple count against timestamp spread.

use forcefield::sim::{
    lawnmower, simulate_run, DepthField, FieldSpec, NoiseSpec, ScenarioSpec, StreamRates,
    VectorField,
};
use forcefield::sync::align;
use forcefield::telemetry::{GeoPoint, Vec2};

pub fn run_example() -> Result<(), Box<dyn std::error::Error>> {
    let spec = ScenarioSpec {
        mission_id: "sync-demo".into(),
        origin: GeoPoint::new(34.0, -81.0)?,
        field: FieldSpec {
            wind: VectorField::Uniform(Vec2::new(1.0, 0.0)),
            current: VectorField::Uniform(Vec2::ZERO),
            depth: DepthField::Constant(3.0),
            coupling: None,
        },
        trajectory: lawnmower((0.0, 0.0), (40.0, 40.0), 20.0, 2.0),
        rates: StreamRates {
            pose: 5.0,
            wind: 4.0,
            current: 10.0,
            depth: 1.0,
        },
        noise: NoiseSpec::default(),
        seed: 1,
        start_time: 0.0,
    };
    let log = simulate_run(&spec)?;
    println!("{} depth samples limit the tuple count", log.depth.len());

    for slop in [0.02, 0.05, 0.1, 0.25, 0.5] {
        let tuples = align(&log, slop)?;
        let worst = tuples.iter().map(|t| t.spread()).fold(0.0, f64::max);
        println!(
            "slop {slop:>4} s: {:>3} tuples, widest spread {worst:.3} s",
            tuples.len()
        );
    }
    Ok(())
}

#[allow(dead_code)]
fn main() -> Result<(), Box<dyn std::error::Error>> {
    run_example()
}
