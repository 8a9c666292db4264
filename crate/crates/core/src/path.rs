//! Pose paths emitted by the planner.

use crate::error::{Error, Result};
use crate::geom::{wrap_angle, Pose2};

const START_TOLERANCE: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PathPoint {
    pub pose: Pose2,
}

impl From<Pose2> for PathPoint {
    fn from(pose: Pose2) -> Self {
        PathPoint { pose }
    }
}

/// Ordered, non-empty list of pose targets. The first point is always the
/// robot pose at planning time.
#[derive(Debug, Clone, PartialEq)]
pub struct Path {
    points: Vec<PathPoint>,
}

impl Path {
    pub fn new(points: Vec<PathPoint>, current: &Pose2) -> Result<Self> {
        let first = points.first().ok_or(Error::EmptyPath)?;
        let offset = (first.pose.position() - current.position()).norm();
        let heading_offset = wrap_angle(first.pose.heading - current.heading).abs();
        if offset > START_TOLERANCE || heading_offset > START_TOLERANCE {
            return Err(Error::PathStart {
                offset: offset.max(heading_offset),
            });
        }
        Ok(Path { points })
    }

    /// Path from `current` to a single target pose.
    pub fn to_target(current: Pose2, target: Pose2) -> Self {
        Path {
            points: vec![current.into(), target.into()],
        }
    }

    pub fn points(&self) -> &[PathPoint] {
        &self.points
    }

    pub fn first(&self) -> &PathPoint {
        &self.points[0]
    }

    pub fn last(&self) -> &PathPoint {
        self.points.last().expect("path is non-empty")
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn path_must_start_at_current_pose() {
        let cur = Pose2::new(1.0, 2.0, 0.5).unwrap();
        let goal = Pose2::new(5.0, 2.0, 0.0).unwrap();
        assert!(Path::new(vec![cur.into(), goal.into()], &cur).is_ok());
        let off = Pose2::new(1.0 + 1e-6, 2.0, 0.5).unwrap();
        assert!(matches!(
            Path::new(vec![off.into(), goal.into()], &cur),
            Err(Error::PathStart { .. })
        ));
        assert!(matches!(Path::new(vec![], &cur), Err(Error::EmptyPath)));
    }
}
