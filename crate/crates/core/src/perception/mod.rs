//! Simulated people sensing and tracking.
//!
//! Ground-truth pedestrian positions stand in for the LiDAR detection
//! pipeline: [`sense`] adds range limits, wall occlusion and Gaussian noise,
//! and [`Tracker`] runs a constant-velocity particle filter per person.

mod closing;
mod sensor;
mod tracker;

pub use closing::relative_closing_speed;
pub use sensor::{sense, Detection, Scan};
pub use tracker::{RangeSample, TrackedPerson, Tracker, TrackerConfig};
