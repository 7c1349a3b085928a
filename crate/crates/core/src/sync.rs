//! Approximate time synchronization of the multi-rate sensor streams.
//!
//! The pose stream is the pivot. For each pose sample, in time order, the
//! closest not-yet-used wind, current and depth samples are chosen (ties go to
//! the earlier sample). The tuple is emitted, and its members marked used, only
//! when the spread of all four timestamps is within `slop`.

use thiserror::Error;

use crate::ingest::MissionLog;
use crate::telemetry::{CurrentQuad, DepthSample, PoseSample, WindSample};

/// Half the 4 Hz anemometer period.
pub const DEFAULT_SLOP: f64 = 0.25;

#[derive(Debug, Error, Clone, Copy, PartialEq)]
pub enum SyncError {
    #[error("slop must be positive and finite, got {0}")]
    InvalidSlop(f64),
}

/// One complete multi-sensor observation. `t` is the pose timestamp.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AlignedTuple {
    pub t: f64,
    pub pose: PoseSample,
    pub wind: WindSample,
    pub current: CurrentQuad,
    pub depth: DepthSample,
}

impl AlignedTuple {
    /// max - min over the four member timestamps.
    pub fn spread(&self) -> f64 {
        let ts = [self.pose.t, self.wind.t, self.current.t, self.depth.t];
        let hi = ts.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        let lo = ts.iter().copied().fold(f64::INFINITY, f64::min);
        hi - lo
    }
}

/// Indices into (pose, wind, current, depth) of each emitted tuple.
pub type TupleIndex = [usize; 4];

pub fn align(log: &MissionLog, slop: f64) -> Result<Vec<AlignedTuple>, SyncError> {
    Ok(align_indices(log, slop)?
        .into_iter()
        .map(|[p, w, c, d]| AlignedTuple {
            t: log.pose[p].t,
            pose: log.pose[p],
            wind: log.wind[w],
            current: log.current[c],
            depth: log.depth[d],
        })
        .collect())
}

/// Same matching as [`align`], reported as stream indices.
pub fn align_indices(log: &MissionLog, slop: f64) -> Result<Vec<TupleIndex>, SyncError> {
    if !(slop.is_finite() && slop > 0.0) {
        return Err(SyncError::InvalidSlop(slop));
    }
    let pose: Vec<f64> = log.pose.iter().map(|s| s.t).collect();
    let mut wind = Stream::new(log.wind.iter().map(|s| s.t).collect());
    let mut current = Stream::new(log.current.iter().map(|s| s.t).collect());
    let mut depth = Stream::new(log.depth.iter().map(|s| s.t).collect());

    let mut out = Vec::new();
    for (pi, &tp) in pose.iter().enumerate() {
        let (Some(w), Some(c), Some(d)) = (
            wind.nearest(tp, slop),
            current.nearest(tp, slop),
            depth.nearest(tp, slop),
        ) else {
            continue;
        };
        let ts = [tp, wind.times[w], current.times[c], depth.times[d]];
        let hi = ts.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        let lo = ts.iter().copied().fold(f64::INFINITY, f64::min);
        if hi - lo <= slop {
            wind.used[w] = true;
            current.used[c] = true;
            depth.used[d] = true;
            out.push([pi, w, c, d]);
        }
    }
    Ok(out)
}

struct Stream {
    times: Vec<f64>,
    used: Vec<bool>,
}

impl Stream {
    fn new(times: Vec<f64>) -> Self {
        let used = vec![false; times.len()];
        Stream { times, used }
    }

    /// Closest unused sample to `t`, considering only samples within `slop`
    /// (anything farther cannot satisfy the spread bound anyway).
    fn nearest(&self, t: f64, slop: f64) -> Option<usize> {
        let split = self.times.partition_point(|&x| x < t);
        let left = self.times[..split]
            .iter()
            .enumerate()
            .rev()
            .take_while(|(_, &x)| t - x <= slop)
            .find(|(i, _)| !self.used[*i])
            .map(|(i, _)| i);
        let right = self.times[split..]
            .iter()
            .enumerate()
            .take_while(|(_, &x)| x - t <= slop)
            .find(|(i, _)| !self.used[split + i])
            .map(|(i, _)| split + i);
        match (left, right) {
            (Some(l), Some(r)) => {
                if self.times[r] - t < t - self.times[l] {
                    Some(r)
                } else {
                    Some(l)
                }
            }
            (l, r) => l.or(r),
        }
    }
}
