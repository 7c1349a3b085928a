//! Ground-truth fields and a forward sensor simulator: the inverse of
//! [`crate::fusion`], producing logs whose true fields are known exactly.

pub mod fields;
pub mod scenario;

pub use fields::{truth_at, DepthCoupling, DepthField, FieldSpec, Truth, VectorField};
pub use scenario::{
    cone_response, lawnmower, simulate_run, BoatState, NoiseSpec, ScenarioSpec, SimError,
    StreamRates, Track, Trajectory,
};
