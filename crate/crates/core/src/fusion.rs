//! Self-motion removal and boat-to-world rotation for wind and current.
//!
//! Flow sensors on a moving boat see the medium's velocity relative to the
//! hull, i.e. `true - v_boat`. Rotating the reading into the world frame and
//! adding the boat's ground velocity back yields the true field. All vectors
//! are "flow toward" vectors: they point where the air or water is going.
//!
//! Current comes from four paddle wheels at boat-frame bearings 45°, 135°,
//! 225° and 315°, each reading the (clipped) projection of the relative flow
//! on its axis. The strongest sensor (F1) and its stronger ring neighbour (F2)
//! sit 90° apart, so `(f1, f2)` are the flow's coordinates in that pair's
//! axes.

use rayon::prelude::*;

use crate::sync::AlignedTuple;
use crate::telemetry::{
    to_local, BoatVec, CurrentQuad, GeoPoint, LocalPoint, PoseSample, TelemetryError, Vec2,
    WindSample, CURRENT_SENSOR_BEARINGS,
};

/// Motion-corrected, world-frame observation at one instant.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FusedSample {
    pub t: f64,
    pub pos: LocalPoint,
    pub wind_world: Vec2,
    pub current_world: Vec2,
    pub depth: f64,
    pub boat_speed: f64,
    pub heading: f64,
}

/// The F1/F2 sensor pair chosen from a [`CurrentQuad`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PairSelection {
    pub i1: usize,
    pub f1: f64,
    pub i2: usize,
    pub f2: f64,
}

/// Rotates a boat-frame vector (x bow, y starboard) into east/north.
pub fn rotate_boat_to_world(v: BoatVec, heading_deg: f64) -> Vec2 {
    let (s, c) = heading_deg.to_radians().sin_cos();
    Vec2 {
        e: v.x * s + v.y * c,
        n: v.x * c - v.y * s,
    }
}

/// Inverse of [`rotate_boat_to_world`].
pub fn rotate_world_to_boat(v: Vec2, heading_deg: f64) -> BoatVec {
    let (s, c) = heading_deg.to_radians().sin_cos();
    BoatVec {
        x: v.e * s + v.n * c,
        y: v.e * c - v.n * s,
    }
}

/// True wind from an apparent-wind reading and the matching pose.
pub fn wind_world(w: &WindSample, pose: &PoseSample) -> Vec2 {
    rotate_boat_to_world(w.apparent_flow(), pose.heading) + pose.vel
}

pub fn select_pair(q: &CurrentQuad) -> PairSelection {
    let mut i1 = 0;
    for i in 1..4 {
        if q.f[i] > q.f[i1] {
            i1 = i;
        }
    }
    let next = (i1 + 1) % 4;
    let prev = (i1 + 3) % 4;
    let i2 = if q.f[prev] > q.f[next] { prev } else { next };
    PairSelection {
        i1,
        f1: q.f[i1],
        i2,
        f2: q.f[i2],
    }
}

/// Relative water flow in boat axes reconstructed from the F1/F2 pair.
pub fn current_boat_frame(sel: &PairSelection) -> BoatVec {
    let speed = sel.f1.hypot(sel.f2);
    if speed == 0.0 {
        return BoatVec::default();
    }
    let offset = sel.f2.atan2(sel.f1).to_degrees();
    let toward_f2 = if sel.i2 == (sel.i1 + 1) % 4 {
        1.0
    } else {
        -1.0
    };
    let bearing = CURRENT_SENSOR_BEARINGS[sel.i1] + toward_f2 * offset;
    BoatVec::from_relative_bearing(speed, bearing)
}

/// True surface current from a quad reading and the matching pose.
pub fn current_world(q: &CurrentQuad, pose: &PoseSample) -> Vec2 {
    let relative = current_boat_frame(&select_pair(q));
    rotate_boat_to_world(relative, pose.heading) + pose.vel
}

pub fn fuse_tuple(tuple: &AlignedTuple, origin: GeoPoint) -> Result<FusedSample, TelemetryError> {
    let pose = &tuple.pose;
    Ok(FusedSample {
        t: tuple.t,
        pos: to_local(origin, pose.pos)?,
        wind_world: wind_world(&tuple.wind, pose),
        current_world: current_world(&tuple.current, pose),
        depth: tuple.depth.depth,
        boat_speed: pose.vel.norm(),
        heading: pose.heading,
    })
}

/// Fuses every tuple, preserving order.
pub fn fuse(tuples: &[AlignedTuple], origin: GeoPoint) -> Result<Vec<FusedSample>, TelemetryError> {
    tuples.par_iter().map(|t| fuse_tuple(t, origin)).collect()
}
