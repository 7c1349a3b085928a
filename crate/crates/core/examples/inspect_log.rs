// Parse a log, report per-stream gaps and export the track as KML.

use forcefield::ingest::{self, parse_kml_coordinates};

const LOG: &str = "\
forcefield-log v1,34.0,-81.0
meta,mission,harbour-test
pose,0.0,34.0,-81.0,0,1.5,0
pose,0.2,34.0000027,-81.0,0,1.5,0
pose,0.4,34.0000054,-81.0,0,1.5,0
pose,6.4,34.0000864,-81.0,0,1.5,0
wind,0.05,3.2,10
wind,0.3,3.1,12
current,0.1,1.2,0,0,1.3
depth,0.0,4.1
nmea,0.5,$SDDPT,4.3,0.0*50
this line is not a record
";

pub fn run_example() -> Result<(), Box<dyn std::error::Error>> {
    let (log, report) = ingest::parse_log_str(LOG)?;
    println!(
        "mission {:?}: skipped {} bad records",
        log.meta.mission_id, report.skipped
    );
    for (stream, gap) in log.max_gaps() {
        match gap {
            Some(g) if g > 5.0 => println!("{stream:>8}: max gap {g:.1} s  <-- gap"),
            Some(g) => println!("{stream:>8}: max gap {g:.1} s"),
            None => println!("{stream:>8}: fewer than two samples"),
        }
    }

    let kml = ingest::kml_string(&log)?;
    let coords = parse_kml_coordinates(&kml)?;
    println!(
        "KML track with {} points, first at lon {}, lat {}",
        coords.len(),
        coords[0].0,
        coords[0].1
    );
    Ok(())
}

#[allow(dead_code)]
fn main() -> Result<(), Box<dyn std::error::Error>> {
    run_example()
}
