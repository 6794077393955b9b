//! Indoor localization from directed and reflected signals.
//!
//! A receiver at the origin observes, for every sound source, the direction
//! `v` of the direct signal, the direction `w` of a first-order reflection
//! and the path-length difference `Δ` between the two. This crate
//!
//! * simulates such measurements in a room with realistic error models
//!   ([`simulation`]),
//! * groups measurements by reflecting wall ([`clustering`]),
//! * recovers each wall's normal vector from its cluster ([`calibration`]),
//! * localizes the senders with single-wall and multi-wall methods
//!   ([`localization`]),
//! * and benchmarks every algorithm combination over repeated seeded
//!   experiments ([`harness`]).

// `!(x > t)` is used on purpose so that NaN is rejected too.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod calibration;
pub mod clustering;
pub mod error;
pub mod geometry;
pub mod harness;
pub mod localization;
pub mod records;
pub mod simulation;

pub use error::{Error, Result};
pub use geometry::{Line3, Segment2, UnitVec3, Vec3};
pub use simulation::{ErrorConfig, GroundTruth, Measurement, Room, Wall};
