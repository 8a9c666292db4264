//! Path follower: turns the head of the planner's path into a velocity command.
//!
//! Linear motion uses one scalar PID on the distance to the target point and
//! applies it along the unit vector to that point, so x and y stay coupled and
//! the robot tracks straight lines. The integral only runs close to the
//! target. Both linear and angular commands are additionally capped by the
//! speed from which the base can still brake to a stop at the target.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geom::{wrap_angle, Point, Twist2, Vector};
use crate::kinematics::{clamp_command, KinematicLimits, RobotState};
use crate::path::{Path, PathPoint};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct NavigatorGains {
    pub kp_lin: f64,
    pub ki_lin: f64,
    /// Damping on measured speed (dimensionless).
    pub kd_lin: f64,
    pub kp_ang: f64,
    /// Distance below which the integral term accumulates (m).
    pub integral_gate_radius: f64,
    /// Obstacle centre distance that forces a stop (m).
    pub stop_distance: f64,
    pub goal_tolerance: f64,
    pub heading_tolerance: f64,
    /// Cruise speed cap, at most the base's `v_max` (m/s).
    pub max_speed: f64,
}

impl Default for NavigatorGains {
    fn default() -> Self {
        NavigatorGains {
            kp_lin: 3.0,
            ki_lin: 0.3,
            kd_lin: 0.1,
            kp_ang: 6.0,
            integral_gate_radius: 0.5,
            stop_distance: 0.45,
            goal_tolerance: 0.05,
            heading_tolerance: 0.05,
            max_speed: 1.5,
        }
    }
}

impl NavigatorGains {
    pub fn validate(&self, robot_radius: f64) -> Result<()> {
        let gains = [
            ("kp_lin", self.kp_lin),
            ("ki_lin", self.ki_lin),
            ("kd_lin", self.kd_lin),
            ("kp_ang", self.kp_ang),
            ("integral_gate_radius", self.integral_gate_radius),
        ];
        for (name, v) in gains {
            if !(v >= 0.0) {
                return Err(Error::param(name, "gains must be non-negative"));
            }
        }
        if !(self.stop_distance > robot_radius) {
            return Err(Error::param("stop_distance", "must exceed the robot radius"));
        }
        if !(self.goal_tolerance > 0.0) || !(self.heading_tolerance > 0.0) {
            return Err(Error::param("goal_tolerance", "tolerances must be positive"));
        }
        if !(self.max_speed > 0.0) {
            return Err(Error::param("max_speed", "must be positive"));
        }
        Ok(())
    }
}

/// A circular obstacle the navigator must not drive into.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Obstacle {
    pub position: Point,
    pub radius: f64,
}

fn position_error(point: &PathPoint, robot: &RobotState) -> Vector {
    point.pose.position() - robot.pose.position()
}

fn heading_error(point: &PathPoint, robot: &RobotState) -> f64 {
    wrap_angle(point.pose.heading - robot.pose.heading)
}

/// True when the robot sits on the final path point with matching heading.
pub fn goal_reached(path: &Path, robot: &RobotState, gains: &NavigatorGains) -> bool {
    let last = path.last();
    position_error(last, robot).norm() < gains.goal_tolerance
        && heading_error(last, robot).abs() < gains.heading_tolerance
}

/// Stateful path follower. Holds the integral accumulator and the arrival
/// latch; reset it whenever the planner switches phase.
#[derive(Debug, Clone)]
pub struct Navigator {
    gains: NavigatorGains,
    integral: f64,
    arrived: bool,
    target: Option<Point>,
}

impl Navigator {
    pub fn new(gains: NavigatorGains) -> Self {
        Navigator {
            gains,
            integral: 0.0,
            arrived: false,
            target: None,
        }
    }

    pub fn gains(&self) -> &NavigatorGains {
        &self.gains
    }

    pub fn reset(&mut self) {
        self.integral = 0.0;
        self.arrived = false;
        self.target = None;
    }

    /// First point after the start that is not yet reached in position or
    /// heading; the last point when all are.
    fn target<'a>(&self, path: &'a Path, robot: &RobotState) -> &'a PathPoint {
        let g = &self.gains;
        path.points()
            .iter()
            .skip(1)
            .find(|p| {
                position_error(p, robot).norm() >= g.goal_tolerance
                    || heading_error(p, robot).abs() >= g.heading_tolerance
            })
            .unwrap_or_else(|| path.last())
    }

    pub fn command(
        &mut self,
        path: &Path,
        robot: &RobotState,
        obstacles: &[Obstacle],
        limits: &KinematicLimits,
        dt: f64,
    ) -> Result<Twist2> {
        if !(dt > 0.0) {
            return Err(Error::param("dt", "must be positive"));
        }
        let g = self.gains;
        let here = robot.pose.position();
        if obstacles
            .iter()
            .any(|o| (o.position - here).norm() < g.stop_distance)
        {
            self.integral = 0.0;
            return clamp_command(Twist2::ZERO, robot.twist, limits, dt);
        }

        let target = self.target(path, robot);
        let goal = target.pose.position();
        if self.target.is_some_and(|t| (t - goal).norm() > g.goal_tolerance) {
            self.integral = 0.0;
            self.arrived = false;
        }
        self.target = Some(goal);

        let error = goal - here;
        let dist = error.norm();
        // 10% hysteresis so the robot does not chatter at the tolerance edge
        if dist < g.goal_tolerance {
            self.arrived = true;
        } else if dist > 1.1 * g.goal_tolerance {
            self.arrived = false;
        }

        let linear = if self.arrived {
            self.integral = 0.0;
            Vector::zeros()
        } else {
            if dist < g.integral_gate_radius {
                self.integral += dist * dt;
            } else {
                self.integral = 0.0;
            }
            let raw = g.kp_lin * dist + g.ki_lin * self.integral - g.kd_lin * robot.twist.speed();
            let brake = (2.0 * limits.a_max * dist).sqrt();
            let cap = g.max_speed.min(limits.v_max).min(brake);
            error / dist * raw.clamp(0.0, cap)
        };

        let herr = heading_error(target, robot);
        let omega_mag = (g.kp_ang * herr.abs())
            .min((2.0 * limits.alpha_max * herr.abs()).sqrt())
            .min(limits.omega_max);
        let omega = omega_mag.copysign(herr);

        clamp_command(Twist2::from_parts(linear, omega), robot.twist, limits, dt)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geom::Pose2;
    use std::f64::consts::PI;

    fn robot(x: f64, y: f64, h: f64, twist: Twist2) -> RobotState {
        RobotState {
            pose: Pose2::new(x, y, h).unwrap(),
            twist,
            limits: KinematicLimits::default(),
        }
    }

    fn path_to(r: &RobotState, x: f64, y: f64, h: f64) -> Path {
        Path::to_target(r.pose, Pose2::new(x, y, h).unwrap())
    }

    #[test]
    fn converged_robot_gets_zero_twist() {
        let r = robot(2.0, 0.0, 0.0, Twist2::ZERO);
        let p = path_to(&r, 2.01, 0.0, 0.0);
        let mut nav = Navigator::new(NavigatorGains::default());
        let cmd = nav.command(&p, &r, &[], &r.limits, 0.01).unwrap();
        assert_eq!(cmd, Twist2::ZERO);
        assert!(goal_reached(&p, &r, nav.gains()));
    }

    #[test]
    fn far_target_is_speed_capped() {
        let gains = NavigatorGains {
            kp_lin: 1.0,
            ki_lin: 0.0,
            kd_lin: 0.0,
            ..NavigatorGains::default()
        };
        let r = robot(0.0, 0.0, 0.0, Twist2::new(1.5, 0.0, 0.0));
        let p = path_to(&r, 2.0, 0.0, 0.0);
        let mut nav = Navigator::new(gains);
        let cmd = nav.command(&p, &r, &[], &r.limits, 0.01).unwrap();
        assert!((cmd.vx - 1.5).abs() < 1e-12 && cmd.vy == 0.0);
    }

    #[test]
    fn close_obstacle_stops_robot() {
        let r = robot(0.0, 0.0, 0.0, Twist2::ZERO);
        let p = path_to(&r, 3.0, 0.0, 0.5);
        let mut nav = Navigator::new(NavigatorGains::default());
        let obstacle = Obstacle {
            position: Point::new(0.3, 0.0),
            radius: 0.15,
        };
        assert_eq!(nav.command(&p, &r, &[obstacle], &r.limits, 0.01).unwrap(), Twist2::ZERO);
        // a moving robot brakes within its acceleration limit
        let moving = robot(0.0, 0.0, 0.0, Twist2::new(1.0, 0.0, 0.5));
        let cmd = nav.command(&p, &moving, &[obstacle], &moving.limits, 0.01).unwrap();
        assert!((cmd.vx - 0.99).abs() < 1e-12 && (cmd.omega - 0.47).abs() < 1e-12);
    }

    #[test]
    fn goal_reached_cases() {
        let g = NavigatorGains {
            goal_tolerance: 0.1,
            ..NavigatorGains::default()
        };
        let r = robot(1.0, 1.0, 0.0, Twist2::ZERO);
        assert!(goal_reached(&path_to(&r, 1.0, 1.0, 0.0), &r, &g));
        assert!(!goal_reached(&path_to(&r, 1.0, 1.0, PI / 6.0), &r, &g));
        assert!(!goal_reached(&path_to(&r, 1.2, 1.0, 0.0), &r, &g));
    }

    #[test]
    fn straight_line_tracking() {
        let mut r = robot(0.0, 0.0, 0.0, Twist2::ZERO);
        let start = r.pose.position();
        let goal = Point::new(3.0, 2.0);
        let dir = (goal - start).normalize();
        let mut nav = Navigator::new(NavigatorGains::default());
        let mut max_dev: f64 = 0.0;
        for k in 0..1000 {
            if k % 10 == 0 {
                // replan at 10 Hz like the planner does
                nav.reset();
            }
            let p = Path::to_target(r.pose, Pose2::new(goal.x, goal.y, 0.0).unwrap());
            let cmd = nav.command(&p, &r, &[], &r.limits, 0.01).unwrap();
            r = r.step_world(cmd, 0.01).unwrap();
            let rel = r.pose.position() - start;
            max_dev = max_dev.max(dir.perp(&rel).abs());
        }
        assert!(max_dev < 0.02, "{max_dev}");
        assert!((r.pose.position() - goal).norm() < 0.05);
    }

    #[test]
    fn holds_still_at_goal() {
        let mut r = robot(1.0, 0.0, 0.0, Twist2::ZERO);
        let goal = Pose2::new(1.04, 0.0, 0.0).unwrap();
        let mut nav = Navigator::new(NavigatorGains::default());
        for _ in 0..500 {
            let p = Path::to_target(r.pose, goal);
            let cmd = nav.command(&p, &r, &[], &r.limits, 0.01).unwrap();
            r = r.step_world(cmd, 0.01).unwrap();
        }
        assert_eq!(r.pose.x, 1.0);
        assert_eq!(r.twist, Twist2::ZERO);
    }

    #[test]
    fn rotation_reaches_target_without_overshoot() {
        let mut r = robot(0.0, 0.0, 0.0, Twist2::ZERO);
        let target = Pose2::new(0.0, 0.0, PI / 3.0).unwrap();
        let mut nav = Navigator::new(NavigatorGains::default());
        let mut done_at = None;
        for k in 0..300 {
            let p = Path::to_target(r.pose, target);
            let cmd = nav.command(&p, &r, &[], &r.limits, 0.01).unwrap();
            r = r.step_world(cmd, 0.01).unwrap();
            assert!(r.pose.heading <= PI / 3.0 + 0.01);
            if done_at.is_none() && (r.pose.heading - PI / 3.0).abs() <= 2f64.to_radians() {
                done_at = Some(k + 1);
            }
        }
        // 60 degrees at 1 rad/s with 3 rad/s^2 ramps needs about 1.38 s
        let t = done_at.unwrap() as f64 * 0.01;
        assert!(t < 1.6, "{t}");
    }

    #[test]
    fn output_respects_limits() {
        let r = robot(0.0, 0.0, 0.0, Twist2::new(0.3, -0.2, 0.4));
        let p = path_to(&r, -5.0, 4.0, -2.0);
        let mut nav = Navigator::new(NavigatorGains::default());
        let cmd = nav.command(&p, &r, &[], &r.limits, 0.01).unwrap();
        assert!(r.limits.admits(&cmd));
        assert!((cmd.linear() - r.twist.linear()).norm() <= 0.01 + 1e-12);
        assert!((cmd.omega - r.twist.omega).abs() <= 0.03 + 1e-12);
    }
}
