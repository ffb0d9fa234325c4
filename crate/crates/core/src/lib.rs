//! Simulation of distributed pilot assignment for cell-free massive MIMO.
//!
//! The pipeline is: [`topology`] draws a network and its large-scale fading,
//! [`assignment`] and [`baselines`] produce controllers, pilots and service
//! clusters, [`phy`] turns those into uplink/downlink SE, and [`harness`]
//! runs whole experiments.

pub mod assignment;
pub mod baselines;
pub mod channel;
pub mod config;
pub mod correlation;
pub mod error;
pub mod harness;
pub mod io;
pub mod linalg;
pub mod phy;
pub mod rng;
pub mod tensor;
pub mod topology;

pub use config::{GapScale, Preset, Scheme, SchemeSelection, SimConfig};
pub use error::{Error, Result};
