// Depth from NMEA 0183 sounder sentences.

use forcefield::ingest::{format_sentence, nmea_checksum, parse_nmea_depth};

pub fn run_example() -> Result<(), Box<dyn std::error::Error>> {
    let sentences = [
        "$SDDBT,23.6,f,7.2,M,3.9,F*3E",
        "$SDDPT,7.2,0.0*52",
        "$SDDBT,23.6,f,7.2,M,3.9,F*00", // corrupted checksum
        "$SDDBT,,f,,M,2.0,F*04",        // fathoms only
    ];
    for s in sentences {
        match parse_nmea_depth(s) {
            Ok(d) => println!("{s:<32} -> {d:.2} m"),
            Err(e) => println!("{s:<32} -> rejected: {e}"),
        }
    }

    println!(
        "checksum of SDDPT,4.5,0.0 is {}",
        nmea_checksum("SDDPT,4.5,0.0")?
    );
    println!("{}", format_sentence("SDDPT,4.5,0.0")?);
    Ok(())
}

#[allow(dead_code)]
fn main() -> Result<(), Box<dyn std::error::Error>> {
    run_example()
}
