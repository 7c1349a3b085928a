// Local east/north coordinates around a survey origin, and back.

use forcefield::telemetry::{to_geo, to_local, GeoPoint, LocalPoint};

pub fn run_example() -> Result<(), Box<dyn std::error::Error>> {
    let origin = GeoPoint::new(34.0, -81.0)?;
    let buoy = GeoPoint::new(34.0009, -80.9989)?;

    let p = to_local(origin, buoy)?;
    println!(
        "buoy is {:.1} m east, {:.1} m north of the origin",
        p.x, p.y
    );

    let back = to_geo(origin, p);
    println!("round trip: {:.7}, {:.7}", back.lat, back.lon);

    // 1° of latitude is out of range for the flat-earth projection
    let far = GeoPoint::new(35.5, -81.0)?;
    println!("far point: {}", to_local(origin, far).unwrap_err());

    let corner = to_geo(origin, LocalPoint::new(100.0, 100.0));
    println!("survey box corner at {:.6}, {:.6}", corner.lat, corner.lon);
    Ok(())
}

#[allow(dead_code)]
fn main() -> Result<(), Box<dyn std::error::Error>> {
    run_example()
}
