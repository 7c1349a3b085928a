//! Kinematic survey runs and the forward sensor model.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal, Uniform};
use thiserror::Error;

use crate::fusion::rotate_world_to_boat;
use crate::ingest::{MissionLog, MissionMeta};
use crate::telemetry::{
    to_geo, wrap_deg, CurrentQuad, DepthSample, GeoPoint, LocalPoint, PoseSample, Vec2, WindSample,
    CURRENT_SENSOR_BEARINGS,
};

use super::fields::{truth_at, FieldSpec};

/// Uniform timestamp jitter as a fraction of each stream's period.
pub const TIMESTAMP_JITTER: f64 = 0.1;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum SimError {
    #[error("trajectory needs at least two waypoints")]
    TooFewWaypoints,
    #[error("waypoint {0} repeats the previous one")]
    DegenerateTrajectory(usize),
    #[error("boat speed must be positive, got {0}")]
    InvalidSpeed(f64),
    #[error("stream rate must be positive, got {0}")]
    InvalidRate(f64),
    #[error("noise levels must be finite and non-negative")]
    InvalidNoise,
    #[error("field specification is invalid (non-positive depth or bad parameters)")]
    InvalidField,
}

/// Waypoints visited in order at constant speed.
#[derive(Debug, Clone, PartialEq)]
pub struct Trajectory {
    pub waypoints: Vec<LocalPoint>,
    pub speed: f64,
}

/// Boustrophedon north-south survey of a box, legs `spacing` apart, starting
/// at the south-west corner heading north.
pub fn lawnmower(
    (x_min, y_min): (f64, f64),
    (x_max, y_max): (f64, f64),
    spacing: f64,
    speed: f64,
) -> Trajectory {
    assert!(spacing > 0.0, "lawnmower spacing must be positive");
    let legs = ((x_max - x_min) / spacing + 1e-9).floor() as usize + 1;
    let mut waypoints = Vec::with_capacity(2 * legs);
    for k in 0..legs {
        let x = x_min + k as f64 * spacing;
        let (a, b) = if k % 2 == 0 {
            (y_min, y_max)
        } else {
            (y_max, y_min)
        };
        waypoints.push(LocalPoint::new(x, a));
        waypoints.push(LocalPoint::new(x, b));
    }
    Trajectory { waypoints, speed }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StreamRates {
    pub pose: f64,
    pub wind: f64,
    pub current: f64,
    pub depth: f64,
}

impl Default for StreamRates {
    fn default() -> Self {
        StreamRates {
            pose: 5.0,
            wind: 4.0,
            current: 10.0,
            depth: 1.0,
        }
    }
}

/// Gaussian noise standard deviations per stream.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct NoiseSpec {
    /// meters, per axis
    pub pose_pos: f64,
    /// m/s, per axis
    pub pose_vel: f64,
    /// degrees
    pub heading: f64,
    /// m/s, per boat-frame axis of the apparent wind
    pub wind: f64,
    /// m/s, per current sensor
    pub current: f64,
    /// meters
    pub depth: f64,
}

impl NoiseSpec {
    /// Same level on every flow sensor and on depth, exact navigation.
    pub fn sensors(sigma: f64) -> Self {
        NoiseSpec {
            wind: sigma,
            current: sigma,
            depth: sigma,
            ..Default::default()
        }
    }

    fn is_valid(&self) -> bool {
        [
            self.pose_pos,
            self.pose_vel,
            self.heading,
            self.wind,
            self.current,
            self.depth,
        ]
        .iter()
        .all(|v| v.is_finite() && *v >= 0.0)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ScenarioSpec {
    pub mission_id: String,
    pub origin: GeoPoint,
    pub field: FieldSpec,
    pub trajectory: Trajectory,
    pub rates: StreamRates,
    pub noise: NoiseSpec,
    pub seed: u64,
    pub start_time: f64,
}

/// Kinematic state of the boat.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BoatState {
    pub pos: LocalPoint,
    pub vel: Vec2,
    pub heading: f64,
}

#[derive(Debug, Clone, Copy)]
struct Segment {
    t0: f64,
    duration: f64,
    from: LocalPoint,
    vel: Vec2,
    heading: f64,
}

/// Piecewise-straight, constant-speed motion through the waypoints.
#[derive(Debug, Clone)]
pub struct Track {
    segments: Vec<Segment>,
}

impl Track {
    pub fn new(traj: &Trajectory, start_time: f64) -> Result<Self, SimError> {
        if !(traj.speed.is_finite() && traj.speed > 0.0) {
            return Err(SimError::InvalidSpeed(traj.speed));
        }
        if traj.waypoints.len() < 2 {
            return Err(SimError::TooFewWaypoints);
        }
        let mut segments = Vec::with_capacity(traj.waypoints.len() - 1);
        let mut t = start_time;
        for (i, w) in traj.waypoints.windows(2).enumerate() {
            let (a, b) = (w[0], w[1]);
            let len = a.distance(&b);
            if len == 0.0 {
                return Err(SimError::DegenerateTrajectory(i + 1));
            }
            let dir = Vec2::new((b.x - a.x) / len, (b.y - a.y) / len);
            segments.push(Segment {
                t0: t,
                duration: len / traj.speed,
                from: a,
                vel: dir * traj.speed,
                heading: dir.bearing(),
            });
            t += len / traj.speed;
        }
        Ok(Track { segments })
    }

    pub fn start_time(&self) -> f64 {
        self.segments[0].t0
    }

    pub fn end_time(&self) -> f64 {
        let last = self.segments.last().expect("track has segments");
        last.t0 + last.duration
    }

    /// Times at which the boat reaches an interior waypoint and turns.
    pub fn turn_times(&self) -> Vec<f64> {
        self.segments[1..].iter().map(|s| s.t0).collect()
    }

    /// State at `t`, clamped to the track's time span.
    pub fn state_at(&self, t: f64) -> BoatState {
        let k = self
            .segments
            .partition_point(|s| s.t0 <= t)
            .saturating_sub(1);
        let s = &self.segments[k];
        let dt = (t - s.t0).clamp(0.0, s.duration);
        BoatState {
            pos: LocalPoint::new(s.from.x + s.vel.e * dt, s.from.y + s.vel.n * dt),
            vel: s.vel,
            heading: s.heading,
        }
    }
}

/// Per-stream jittered sample times covering the track.
fn sample_times(track: &Track, rate: f64, rng: &mut ChaCha8Rng) -> Vec<f64> {
    let period = 1.0 / rate;
    let jitter = Uniform::new_inclusive(-TIMESTAMP_JITTER * period, TIMESTAMP_JITTER * period)
        .expect("finite jitter bounds");
    let (t0, t1) = (track.start_time(), track.end_time());
    let count = ((t1 - t0) * rate).floor() as usize + 1;
    (0..count)
        .map(|k| (t0 + k as f64 * period + jitter.sample(rng)).clamp(t0, t1))
        .collect()
}

struct Noise {
    rng: ChaCha8Rng,
}

impl Noise {
    fn new(seed: u64, stream: u64) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        rng.set_stream(stream);
        Noise { rng }
    }

    fn gauss(&mut self, sigma: f64) -> f64 {
        if sigma == 0.0 {
            return 0.0;
        }
        Normal::new(0.0, sigma)
            .expect("valid sigma")
            .sample(&mut self.rng)
    }
}

/// Noiseless clipped-cosine response of the four current sensors to a
/// boat-frame relative flow.
pub fn cone_response(relative_x: f64, relative_y: f64) -> [f64; 4] {
    CURRENT_SENSOR_BEARINGS.map(|b| {
        let (s, c) = b.to_radians().sin_cos();
        (relative_x * c + relative_y * s).max(0.0)
    })
}

/// Generates a multi-rate, noise-injected mission log for the scenario.
pub fn simulate_run(s: &ScenarioSpec) -> Result<MissionLog, SimError> {
    let track = Track::new(&s.trajectory, s.start_time)?;
    for r in [s.rates.pose, s.rates.wind, s.rates.current, s.rates.depth] {
        if !(r.is_finite() && r > 0.0) {
            return Err(SimError::InvalidRate(r));
        }
    }
    if !s.noise.is_valid() {
        return Err(SimError::InvalidNoise);
    }
    if !s.field.is_valid() {
        return Err(SimError::InvalidField);
    }

    let mut timing = ChaCha8Rng::seed_from_u64(s.seed);
    let pose_t = sample_times(&track, s.rates.pose, &mut timing);
    let wind_t = sample_times(&track, s.rates.wind, &mut timing);
    let current_t = sample_times(&track, s.rates.current, &mut timing);
    let depth_t = sample_times(&track, s.rates.depth, &mut timing);

    let mut noise = Noise::new(s.seed, 1);
    let pose = pose_t
        .iter()
        .map(|&t| {
            let b = track.state_at(t);
            let pos = LocalPoint::new(
                b.pos.x + noise.gauss(s.noise.pose_pos),
                b.pos.y + noise.gauss(s.noise.pose_pos),
            );
            PoseSample {
                t,
                pos: to_geo(s.origin, pos),
                vel: Vec2::new(
                    b.vel.e + noise.gauss(s.noise.pose_vel),
                    b.vel.n + noise.gauss(s.noise.pose_vel),
                ),
                heading: wrap_deg(b.heading + noise.gauss(s.noise.heading)),
            }
        })
        .collect();

    let mut noise = Noise::new(s.seed, 2);
    let wind = wind_t
        .iter()
        .map(|&t| {
            let b = track.state_at(t);
            let truth = truth_at(&s.field, &b.pos).wind;
            let mut rel = rotate_world_to_boat(truth - b.vel, b.heading);
            rel.x += noise.gauss(s.noise.wind);
            rel.y += noise.gauss(s.noise.wind);
            WindSample {
                t,
                speed: rel.norm(),
                direction_rel: rel.relative_bearing(),
            }
        })
        .collect();

    let mut noise = Noise::new(s.seed, 3);
    let current = current_t
        .iter()
        .map(|&t| {
            let b = track.state_at(t);
            let truth = truth_at(&s.field, &b.pos).current;
            let rel = rotate_world_to_boat(truth - b.vel, b.heading);
            let f =
                cone_response(rel.x, rel.y).map(|v| (v + noise.gauss(s.noise.current)).max(0.0));
            CurrentQuad { t, f }
        })
        .collect();

    let mut noise = Noise::new(s.seed, 4);
    let depth = depth_t
        .iter()
        .map(|&t| {
            let b = track.state_at(t);
            let d = truth_at(&s.field, &b.pos).depth + noise.gauss(s.noise.depth);
            DepthSample {
                t,
                depth: d.clamp(0.01, 999.0),
            }
        })
        .collect();

    let mut log = MissionLog {
        meta: MissionMeta {
            mission_id: s.mission_id.clone(),
            origin: s.origin,
        },
        pose,
        wind,
        current,
        depth,
    };
    // clamping at the track ends can produce equal timestamps
    log.normalize();
    Ok(log)
}
