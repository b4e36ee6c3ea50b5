//! Planar simulator and surge-velocity control stack for a quadrotor towing a
//! floating buoy on a taut tether.
//!
//! The crate is organised bottom-up: [`environment`] answers sea and wind
//! queries, [`buoy`] and [`uav`] hold the single-body models, [`coupled`]
//! joins them through the cable, [`equilibrium`] gives the steady-state and
//! fly-over analysis, [`controller`] holds the supervisory state machine and
//! control laws, and [`harness`] runs scenarios end to end.

pub mod buoy;
pub mod controller;
pub mod coupled;
pub mod environment;
pub mod equilibrium;
pub mod error;
pub mod harness;
pub mod uav;

pub use error::{Error, Result};
