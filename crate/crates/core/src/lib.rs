//! Environmental force-field mapping for autonomous surface vehicles.
//!
//! Raw telemetry (pose, a four-wheel current sensor array, an anemometer and a
//! depth sonar) is parsed, time-aligned, corrected for the vehicle's own
//! motion and regressed with Gaussian Processes into gridded wind, current and
//! depth maps. A seeded simulator produces logs with known ground truth so
//! every stage can be checked end to end.
//!
//! Stages, in pipeline order:
//!
//! - [`ingest`]: log format, NMEA depth sentences, KML export
//! - [`sync`]: multi-rate stream alignment
//! - [`fusion`]: self-motion removal and frame rotation
//! - [`gp`]: Gaussian Process regression
//! - [`field`]: grids, rendered layers, point queries, CSV/GeoJSON export
//! - [`sim`]: analytic fields and the forward sensor simulator
//! - [`pipeline`]: configuration and the batch driver used by the CLI

pub mod config;
pub mod field;
pub mod fusion;
pub mod gp;
pub mod ingest;
pub mod pipeline;
pub mod sim;
pub mod sync;
pub mod telemetry;

pub use telemetry::{GeoPoint, LocalPoint, Vec2};
