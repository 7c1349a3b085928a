//! Mission log ingestion: the `forcefield-log v1` text format, NMEA depth
//! sentences and KML trajectory export.
//!
//! A log file starts with a header line
//!
//! ```text
//! forcefield-log v1,<origin_lat>,<origin_lon>
//! ```
//!
//! followed by one record per line:
//!
//! ```text
//! meta,mission,<id>
//! pose,<t>,<lat>,<lon>,<vel_e>,<vel_n>,<heading>
//! wind,<t>,<speed>,<direction_rel>
//! current,<t>,<f0>,<f1>,<f2>,<f3>
//! depth,<t>,<meters>
//! nmea,<t>,<$..DBT or $..DPT sentence>
//! ```
//!
//! Blank lines and lines starting with `#` are ignored.

pub mod kml;
pub mod nmea;

use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use log::warn;
use thiserror::Error;

use crate::telemetry::{
    depth_is_plausible, CurrentQuad, DepthSample, GeoPoint, PoseSample, Vec2, WindSample,
};

pub use kml::{export_kml, kml_string, parse_kml_coordinates};
pub use nmea::{format_sentence, nmea_checksum, parse_nmea_depth, NmeaError};

pub const LOG_MAGIC: &str = "forcefield-log v1";

#[derive(Debug, Error)]
pub enum IngestError {
    #[error("I/O error on {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
    #[error("format error: {0}")]
    Format(String),
    #[error("log contains no pose samples")]
    EmptyLog,
}

impl IngestError {
    pub(crate) fn io(path: &Path, source: std::io::Error) -> Self {
        IngestError::Io {
            path: path.display().to_string(),
            source,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct MissionMeta {
    pub mission_id: String,
    pub origin: GeoPoint,
}

/// Typed per-sensor streams of one mission, each sorted by strictly
/// increasing timestamp.
#[derive(Debug, Clone, PartialEq)]
pub struct MissionLog {
    pub meta: MissionMeta,
    pub pose: Vec<PoseSample>,
    pub wind: Vec<WindSample>,
    pub current: Vec<CurrentQuad>,
    pub depth: Vec<DepthSample>,
}

/// Counts of records dropped while parsing.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct ParseReport {
    pub skipped: usize,
    pub duplicates: usize,
}

impl MissionLog {
    pub fn new(origin: GeoPoint) -> Self {
        MissionLog {
            meta: MissionMeta {
                mission_id: String::new(),
                origin,
            },
            pose: Vec::new(),
            wind: Vec::new(),
            current: Vec::new(),
            depth: Vec::new(),
        }
    }

    pub fn origin(&self) -> GeoPoint {
        self.meta.origin
    }

    /// Earliest timestamp over all streams.
    pub fn start_time(&self) -> Option<f64> {
        self.stream_times()
            .filter_map(|ts| ts.first().copied())
            .reduce(f64::min)
    }

    /// Latest timestamp over all streams.
    pub fn end_time(&self) -> Option<f64> {
        self.stream_times()
            .filter_map(|ts| ts.last().copied())
            .reduce(f64::max)
    }

    fn stream_times(&self) -> impl Iterator<Item = Vec<f64>> + '_ {
        [
            self.pose.iter().map(|s| s.t).collect::<Vec<_>>(),
            self.wind.iter().map(|s| s.t).collect(),
            self.current.iter().map(|s| s.t).collect(),
            self.depth.iter().map(|s| s.t).collect(),
        ]
        .into_iter()
    }

    /// Sorts every stream by time and drops repeated timestamps, keeping the
    /// first occurrence. Returns the number of dropped samples.
    pub fn normalize(&mut self) -> usize {
        sort_dedup(&mut self.pose, |s| s.t)
            + sort_dedup(&mut self.wind, |s| s.t)
            + sort_dedup(&mut self.current, |s| s.t)
            + sort_dedup(&mut self.depth, |s| s.t)
    }

    /// Largest gap between consecutive samples for each stream, in
    /// (pose, wind, current, depth) order. `None` for streams with < 2 samples.
    pub fn max_gaps(&self) -> [(&'static str, Option<f64>); 4] {
        fn gap(ts: &[f64]) -> Option<f64> {
            ts.windows(2).map(|w| w[1] - w[0]).reduce(f64::max)
        }
        let names = ["pose", "wind", "current", "depth"];
        let mut out = [("", None); 4];
        for (i, ts) in self.stream_times().enumerate() {
            out[i] = (names[i], gap(&ts));
        }
        out
    }
}

fn sort_dedup<T>(v: &mut Vec<T>, t: impl Fn(&T) -> f64) -> usize {
    v.sort_by(|a, b| t(a).total_cmp(&t(b)));
    let before = v.len();
    v.dedup_by(|later, earlier| t(later) == t(earlier));
    before - v.len()
}

/// Serializes a log into the canonical `forcefield-log v1` text.
///
/// Numbers are written in shortest round-trip form, so parsing the output
/// reproduces the log exactly.
pub fn write_log_string(log: &MissionLog) -> String {
    let mut s = String::new();
    let o = log.meta.origin;
    let _ = writeln!(s, "{LOG_MAGIC},{},{}", o.lat, o.lon);
    if !log.meta.mission_id.is_empty() {
        let _ = writeln!(s, "meta,mission,{}", log.meta.mission_id);
    }
    for p in &log.pose {
        let _ = writeln!(
            s,
            "pose,{},{},{},{},{},{}",
            p.t, p.pos.lat, p.pos.lon, p.vel.e, p.vel.n, p.heading
        );
    }
    for w in &log.wind {
        let _ = writeln!(s, "wind,{},{},{}", w.t, w.speed, w.direction_rel);
    }
    for c in &log.current {
        let _ = writeln!(
            s,
            "current,{},{},{},{},{}",
            c.t, c.f[0], c.f[1], c.f[2], c.f[3]
        );
    }
    for d in &log.depth {
        let _ = writeln!(s, "depth,{},{}", d.t, d.depth);
    }
    s
}

pub fn write_log(log: &MissionLog, path: impl AsRef<Path>) -> Result<(), IngestError> {
    let path = path.as_ref();
    fs::write(path, write_log_string(log)).map_err(|e| IngestError::io(path, e))
}

/// Reads and parses a log file. See [`parse_log_str`].
pub fn parse_log(path: impl AsRef<Path>) -> Result<(MissionLog, ParseReport), IngestError> {
    let path = path.as_ref();
    let text = fs::read_to_string(path).map_err(|e| IngestError::io(path, e))?;
    parse_log_str(&text)
}

/// Parses `forcefield-log v1` text.
///
/// Records with unparseable or implausible fields are skipped and counted.
/// Streams come back sorted with duplicate timestamps removed (first kept).
pub fn parse_log_str(text: &str) -> Result<(MissionLog, ParseReport), IngestError> {
    let mut lines = text.lines().enumerate();
    let header = lines
        .by_ref()
        .find(|(_, l)| !l.trim().is_empty())
        .map(|(_, l)| l.trim())
        .ok_or_else(|| IngestError::Format("missing header line".into()))?;
    let origin = parse_header(header)?;

    let mut log = MissionLog::new(origin);
    let mut report = ParseReport::default();
    for (lineno, raw) in lines {
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        if let Err(msg) = parse_record(line, &mut log) {
            warn!("line {}: skipped record ({msg})", lineno + 1);
            report.skipped += 1;
        }
    }
    report.duplicates = log.normalize();
    if report.duplicates > 0 {
        warn!(
            "dropped {} samples with duplicate timestamps",
            report.duplicates
        );
    }
    if log.pose.is_empty() {
        return Err(IngestError::EmptyLog);
    }
    Ok((log, report))
}

fn parse_header(header: &str) -> Result<GeoPoint, IngestError> {
    let fields: Vec<&str> = header.split(',').collect();
    if fields.len() != 3 || fields[0] != LOG_MAGIC {
        return Err(IngestError::Format(format!(
            "expected header '{LOG_MAGIC},<lat>,<lon>', got {header:?}"
        )));
    }
    let lat = fields[1].trim().parse::<f64>();
    let lon = fields[2].trim().parse::<f64>();
    match (lat, lon) {
        (Ok(lat), Ok(lon)) => {
            GeoPoint::new(lat, lon).map_err(|e| IngestError::Format(format!("bad origin: {e}")))
        }
        _ => Err(IngestError::Format(format!(
            "bad origin in header {header:?}"
        ))),
    }
}

fn parse_record(line: &str, log: &mut MissionLog) -> Result<(), String> {
    let (kind, rest) = line.split_once(',').ok_or("missing fields")?;
    match kind {
        "meta" => {
            let (key, value) = rest.split_once(',').ok_or("meta needs key,value")?;
            if key == "mission" {
                log.meta.mission_id = value.to_string();
            }
        }
        "pose" => {
            let v = numbers::<6>(rest)?;
            let pos = GeoPoint::new(v[1], v[2]).map_err(|e| e.to_string())?;
            if !(0.0..360.0).contains(&v[5]) {
                return Err(format!("heading {} outside [0, 360)", v[5]));
            }
            log.pose.push(PoseSample {
                t: v[0],
                pos,
                vel: Vec2::new(v[3], v[4]),
                heading: v[5],
            });
        }
        "wind" => {
            let v = numbers::<3>(rest)?;
            if v[1] < 0.0 {
                return Err("negative wind speed".into());
            }
            if !(0.0..360.0).contains(&v[2]) {
                return Err("wind direction outside [0, 360)".into());
            }
            log.wind.push(WindSample {
                t: v[0],
                speed: v[1],
                direction_rel: v[2],
            });
        }
        "current" => {
            let v = numbers::<5>(rest)?;
            let f = [v[1], v[2], v[3], v[4]];
            if f.iter().any(|&x| x < 0.0) {
                return Err("negative current reading".into());
            }
            log.current.push(CurrentQuad { t: v[0], f });
        }
        "depth" => {
            let v = numbers::<2>(rest)?;
            push_depth(log, v[0], v[1])?;
        }
        "nmea" => {
            let (t, sentence) = rest.split_once(',').ok_or("nmea needs t,sentence")?;
            let t = number(t)?;
            let depth = parse_nmea_depth(sentence).map_err(|e| e.to_string())?;
            push_depth(log, t, depth)?;
        }
        other => return Err(format!("unknown stream {other:?}")),
    }
    Ok(())
}

fn push_depth(log: &mut MissionLog, t: f64, depth: f64) -> Result<(), String> {
    if !depth_is_plausible(depth) {
        return Err(format!("implausible depth {depth}"));
    }
    log.depth.push(DepthSample { t, depth });
    Ok(())
}

fn number(s: &str) -> Result<f64, String> {
    let v: f64 = s.trim().parse().map_err(|_| format!("bad number {s:?}"))?;
    if v.is_finite() {
        Ok(v)
    } else {
        Err(format!("non-finite number {s:?}"))
    }
}

fn numbers<const N: usize>(rest: &str) -> Result<[f64; N], String> {
    let mut out = [0.0; N];
    let mut it = rest.split(',');
    for slot in out.iter_mut() {
        *slot = number(it.next().ok_or("too few fields")?)?;
    }
    if it.next().is_some() {
        return Err("too many fields".into());
    }
    Ok(out)
}
