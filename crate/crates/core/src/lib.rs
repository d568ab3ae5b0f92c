//! Max-min rate optimization for a reconfigurable intelligent surface carried
//! by an omnidirectional multirotor UAV.
//!
//! The crate models a line-of-sight link from a multi-antenna base station
//! to ground users via a UAV-mounted RIS, and jointly optimises the RIS
//! phase shifts, the UAV position and its orientation with a parallel
//! successive convex approximation solver.

pub mod channel;
pub mod cli;
pub mod error;
pub mod geometry;
pub mod objective;
pub mod schemes;
pub mod solver;

pub use error::{Error, Result};
