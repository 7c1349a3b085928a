//! KML 2.2 trajectory export for visual mission inspection.

use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use super::{IngestError, MissionLog};

/// Renders the pose track as a single `LineString` placemark.
pub fn kml_string(log: &MissionLog) -> Result<String, IngestError> {
    if log.pose.is_empty() {
        return Err(IngestError::EmptyLog);
    }
    let name = if log.meta.mission_id.is_empty() {
        "mission"
    } else {
        log.meta.mission_id.as_str()
    };
    let mut s = String::new();
    s.push_str("<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n");
    s.push_str("<kml xmlns=\"http://www.opengis.net/kml/2.2\">\n");
    s.push_str("  <Document>\n");
    let _ = writeln!(s, "    <name>{}</name>", xml_escape(name));
    s.push_str("    <Placemark>\n");
    s.push_str("      <name>track</name>\n");
    s.push_str("      <LineString>\n");
    s.push_str("        <tessellate>1</tessellate>\n");
    s.push_str("        <coordinates>\n");
    for p in &log.pose {
        let _ = writeln!(s, "          {},{}", p.pos.lon, p.pos.lat);
    }
    s.push_str("        </coordinates>\n");
    s.push_str("      </LineString>\n");
    s.push_str("    </Placemark>\n");
    s.push_str("  </Document>\n");
    s.push_str("</kml>\n");
    Ok(s)
}

pub fn export_kml(log: &MissionLog, path: impl AsRef<Path>) -> Result<(), IngestError> {
    let path = path.as_ref();
    let text = kml_string(log)?;
    fs::write(path, text).map_err(|e| IngestError::io(path, e))
}

/// Reads back every `lon,lat[,alt]` tuple inside `<coordinates>` elements,
/// returned as `(lon, lat)` pairs in document order.
pub fn parse_kml_coordinates(text: &str) -> Result<Vec<(f64, f64)>, IngestError> {
    let mut out = Vec::new();
    let mut rest = text;
    while let Some(start) = rest.find("<coordinates>") {
        let after = &rest[start + "<coordinates>".len()..];
        let end = after
            .find("</coordinates>")
            .ok_or_else(|| IngestError::Format("unterminated <coordinates>".into()))?;
        for tuple in after[..end].split_whitespace() {
            let parts: Vec<&str> = tuple.split(',').collect();
            if !(2..=3).contains(&parts.len()) {
                return Err(IngestError::Format(format!(
                    "bad coordinate tuple {tuple:?}"
                )));
            }
            let parse = |s: &str| {
                s.parse::<f64>()
                    .map_err(|_| IngestError::Format(format!("bad coordinate {s:?}")))
            };
            out.push((parse(parts[0])?, parse(parts[1])?));
        }
        rest = &after[end..];
    }
    Ok(out)
}

fn xml_escape(s: &str) -> String {
    s.replace('&', "&amp;")
        .replace('<', "&lt;")
        .replace('>', "&gt;")
        .replace('"', "&quot;")
}
