// Remove the boat's own motion from anemometer and current-sensor readings.

use forcefield::fusion::rotate_world_to_boat;
use forcefield::fusion::{current_boat_frame, current_world, select_pair, wind_world};
use forcefield::sim::cone_response;
use forcefield::telemetry::{CurrentQuad, GeoPoint, PoseSample, Vec2, WindSample};

pub fn run_example() -> Result<(), Box<dyn std::error::Error>> {
    // heading north-east at 2 m/s
    let vel = Vec2::from_bearing(2.0, 45.0);
    let pose = PoseSample {
        t: 0.0,
        pos: GeoPoint::new(34.0, -81.0)?,
        vel,
        heading: 45.0,
    };

    // true wind blowing toward the east at 5 m/s
    let truth = Vec2::new(5.0, 0.0);
    let apparent = rotate_world_to_boat(truth - vel, pose.heading);
    let reading = WindSample {
        t: 0.0,
        speed: apparent.norm(),
        direction_rel: apparent.relative_bearing(),
    };
    println!(
        "anemometer: {:.2} m/s at {:.1}° off the bow",
        reading.speed, reading.direction_rel
    );
    let w = wind_world(&reading, &pose);
    println!("true wind:  {:.3} m/s toward {:.1}°", w.norm(), w.bearing());

    // 2.5 m/s current toward 30°, seen by four paddle wheels at 45/135/225/315°
    let current = Vec2::from_bearing(2.5, 30.0);
    let rel = rotate_world_to_boat(current - vel, pose.heading);
    let q = CurrentQuad {
        t: 0.0,
        f: cone_response(rel.x, rel.y),
    };
    println!("sensors:    {:.3?}", q.f);
    let pair = select_pair(&q);
    println!("strongest pair: sensors {} and {}", pair.i1, pair.i2);
    let b = current_boat_frame(&pair);
    println!(
        "relative flow {:.3} m/s at {:.1}° off the bow",
        b.norm(),
        b.relative_bearing()
    );
    let c = current_world(&q, &pose);
    println!(
        "true current {:.3} m/s toward {:.1}°",
        c.norm(),
        c.bearing()
    );
    Ok(())
}

#[allow(dead_code)]
fn main() -> Result<(), Box<dyn std::error::Error>> {
    run_example()
}
