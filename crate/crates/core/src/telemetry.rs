//! Domain types shared by every stage of the pipeline, angle helpers and the
//! small-area geodetic projection.
//!
//! The world frame is local East-North (x east, y north, meters). Headings and
//! bearings are compass degrees, clockwise from true north. Boat-frame vectors
//! use x forward (bow) and y starboard.

use std::f64::consts::PI;

use thiserror::Error;

/// Mean Earth radius used by the local projection, in meters.
pub const EARTH_RADIUS_M: f64 = 6_371_000.0;

/// Largest latitude offset from the origin accepted by [`to_local`], in degrees.
pub const MAX_REGION_DEG: f64 = 1.0;

/// Boat-frame bearings of the four current sensors, indexed 0..3:
/// bow-starboard, stern-starboard, stern-port, bow-port.
pub const CURRENT_SENSOR_BEARINGS: [f64; 4] = [45.0, 135.0, 225.0, 315.0];

#[derive(Debug, Error, Clone, PartialEq)]
pub enum TelemetryError {
    #[error(
        "point ({lat}, {lon}) is outside the projection region around ({origin_lat}, {origin_lon})"
    )]
    OutOfRegion {
        lat: f64,
        lon: f64,
        origin_lat: f64,
        origin_lon: f64,
    },
    #[error("invalid coordinate: lat {lat}, lon {lon}")]
    InvalidCoordinate { lat: f64, lon: f64 },
}

/// Geodetic position in degrees.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GeoPoint {
    pub lat: f64,
    pub lon: f64,
}

impl GeoPoint {
    pub fn new(lat: f64, lon: f64) -> Result<Self, TelemetryError> {
        let p = GeoPoint { lat, lon };
        if p.is_valid() {
            Ok(p)
        } else {
            Err(TelemetryError::InvalidCoordinate { lat, lon })
        }
    }

    pub fn is_valid(&self) -> bool {
        self.lat.is_finite()
            && self.lon.is_finite()
            && (-90.0..=90.0).contains(&self.lat)
            && (-180.0..=180.0).contains(&self.lon)
    }
}

/// Planar position in meters relative to a geodetic origin.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct LocalPoint {
    pub x: f64,
    pub y: f64,
}

impl LocalPoint {
    pub const fn new(x: f64, y: f64) -> Self {
        LocalPoint { x, y }
    }

    pub fn distance(&self, other: &LocalPoint) -> f64 {
        (self.x - other.x).hypot(self.y - other.y)
    }

    pub fn dot(&self, other: &LocalPoint) -> f64 {
        self.x * other.x + self.y * other.y
    }
}

/// World-frame vector, east and north components (m/s for velocities).
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct Vec2 {
    pub e: f64,
    pub n: f64,
}

impl Vec2 {
    pub const ZERO: Vec2 = Vec2 { e: 0.0, n: 0.0 };

    pub const fn new(e: f64, n: f64) -> Self {
        Vec2 { e, n }
    }

    /// Vector of magnitude `speed` pointing along compass `bearing`.
    pub fn from_bearing(speed: f64, bearing_deg: f64) -> Self {
        let b = bearing_deg.to_radians();
        Vec2 {
            e: speed * b.sin(),
            n: speed * b.cos(),
        }
    }

    pub fn norm(&self) -> f64 {
        self.e.hypot(self.n)
    }

    /// Compass bearing of the vector in [0, 360). Zero vectors map to 0.
    pub fn bearing(&self) -> f64 {
        wrap_deg(self.e.atan2(self.n).to_degrees())
    }

    pub fn is_finite(&self) -> bool {
        self.e.is_finite() && self.n.is_finite()
    }
}

impl std::ops::Add for Vec2 {
    type Output = Vec2;
    fn add(self, rhs: Vec2) -> Vec2 {
        Vec2::new(self.e + rhs.e, self.n + rhs.n)
    }
}

impl std::ops::Sub for Vec2 {
    type Output = Vec2;
    fn sub(self, rhs: Vec2) -> Vec2 {
        Vec2::new(self.e - rhs.e, self.n - rhs.n)
    }
}

impl std::ops::Neg for Vec2 {
    type Output = Vec2;
    fn neg(self) -> Vec2 {
        Vec2::new(-self.e, -self.n)
    }
}

impl std::ops::Mul<f64> for Vec2 {
    type Output = Vec2;
    fn mul(self, rhs: f64) -> Vec2 {
        Vec2::new(self.e * rhs, self.n * rhs)
    }
}

/// Boat-frame vector: x toward the bow, y toward starboard.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct BoatVec {
    pub x: f64,
    pub y: f64,
}

impl BoatVec {
    pub const fn new(x: f64, y: f64) -> Self {
        BoatVec { x, y }
    }

    /// Vector of magnitude `speed` at `bearing` degrees clockwise from the bow.
    pub fn from_relative_bearing(speed: f64, bearing_deg: f64) -> Self {
        let b = bearing_deg.to_radians();
        BoatVec {
            x: speed * b.cos(),
            y: speed * b.sin(),
        }
    }

    pub fn norm(&self) -> f64 {
        self.x.hypot(self.y)
    }

    /// Bearing clockwise from the bow, in [0, 360).
    pub fn relative_bearing(&self) -> f64 {
        wrap_deg(self.y.atan2(self.x).to_degrees())
    }
}

/// Raw speed and bearing pair as reported by a directional sensor.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PolarReading {
    pub speed: f64,
    pub bearing: f64,
}

impl PolarReading {
    pub fn new(speed: f64, bearing: f64) -> Self {
        PolarReading {
            speed: speed.max(0.0),
            bearing: wrap_deg(bearing),
        }
    }
}

/// Vehicle pose: position, ground velocity (world frame) and compass heading.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PoseSample {
    pub t: f64,
    pub pos: GeoPoint,
    pub vel: Vec2,
    pub heading: f64,
}

/// Anemometer reading. `direction_rel` is the bearing, relative to the bow,
/// toward which the apparent airflow moves.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WindSample {
    pub t: f64,
    pub speed: f64,
    pub direction_rel: f64,
}

impl WindSample {
    pub fn apparent_flow(&self) -> BoatVec {
        BoatVec::from_relative_bearing(self.speed, self.direction_rel)
    }
}

/// Four scalar paddle-wheel readings, indexed per [`CURRENT_SENSOR_BEARINGS`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CurrentQuad {
    pub t: f64,
    pub f: [f64; 4],
}

/// Depth sonar reading in meters.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DepthSample {
    pub t: f64,
    pub depth: f64,
}

/// Plausibility gate for sonar depths, in meters.
pub fn depth_is_plausible(depth: f64) -> bool {
    depth.is_finite() && depth > 0.0 && depth < 1000.0
}

/// Normalizes an angle in degrees into [0, 360).
pub fn wrap_deg(a: f64) -> f64 {
    let r = a.rem_euclid(360.0);
    // rem_euclid of tiny negatives rounds up to exactly 360
    if r >= 360.0 {
        0.0
    } else {
        r
    }
}

/// Projects `p` onto the local tangent plane at `origin` (equirectangular).
pub fn to_local(origin: GeoPoint, p: GeoPoint) -> Result<LocalPoint, TelemetryError> {
    if !p.is_valid() {
        return Err(TelemetryError::InvalidCoordinate {
            lat: p.lat,
            lon: p.lon,
        });
    }
    let dlat = p.lat - origin.lat;
    let mut dlon = p.lon - origin.lon;
    if dlon > 180.0 {
        dlon -= 360.0;
    } else if dlon < -180.0 {
        dlon += 360.0;
    }
    if dlat.abs() >= MAX_REGION_DEG {
        return Err(TelemetryError::OutOfRegion {
            lat: p.lat,
            lon: p.lon,
            origin_lat: origin.lat,
            origin_lon: origin.lon,
        });
    }
    let k = PI / 180.0;
    Ok(LocalPoint {
        x: EARTH_RADIUS_M * dlon * k * (origin.lat * k).cos(),
        y: EARTH_RADIUS_M * dlat * k,
    })
}

/// Inverse of [`to_local`].
pub fn to_geo(origin: GeoPoint, p: LocalPoint) -> GeoPoint {
    let k = PI / 180.0;
    let lat = origin.lat + p.y / (EARTH_RADIUS_M * k);
    let lon = origin.lon + p.x / (EARTH_RADIUS_M * k * (origin.lat * k).cos());
    GeoPoint { lat, lon }
}
