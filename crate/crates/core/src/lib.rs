//! Deterministic 2-D corridor crossing simulator for an omni-directional robot.
//!
//! The robot approaches an oncoming pedestrian in a narrow aisle and performs a
//! step aside, a slide along the wall and a just-in-time body rotation. Slide and
//! rotation can be switched off independently, giving four crossing conditions.
//!
//! Module layout follows the data flow of one simulation tick:
//! [`perception`] turns pedestrian ground truth into tracks, [`planner`] turns
//! tracks into a pose path at 10 Hz, [`navigator`] turns the path into a velocity
//! command and [`kinematics`] moves the base. [`harness`] wires it all together.

pub mod clock;
pub mod error;
pub mod geom;
pub mod harness;
pub mod kinematics;
pub mod navigator;
pub mod oracle;
pub mod path;
pub mod pedestrian;
pub mod perception;
pub mod planner;
pub mod world;

pub use clock::SimClock;
pub use error::{Error, Result};
pub use geom::{normalize_angle, Point, Pose2, Side, Twist2, Vector};
pub use kinematics::{KinematicLimits, RobotState};
pub use path::{Path, PathPoint};
pub use world::{Aisle, CorridorWorld, Segment};
