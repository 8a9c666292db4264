//! Omni-directional base model: command limiting and exact constant-twist
//! integration.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geom::{rotate, wrap_angle, Pose2, Twist2, Vector};

/// Slack allowed when checking a command against the limits.
pub const LIMIT_SLACK: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct KinematicLimits {
    /// Maximum planar speed (m/s).
    pub v_max: f64,
    /// Maximum yaw rate (rad/s).
    pub omega_max: f64,
    /// Maximum linear acceleration (m/s^2).
    pub a_max: f64,
    /// Maximum angular acceleration (rad/s^2).
    pub alpha_max: f64,
}

impl Default for KinematicLimits {
    fn default() -> Self {
        KinematicLimits {
            v_max: 1.5,
            omega_max: 1.0,
            a_max: 1.0,
            alpha_max: 3.0,
        }
    }
}

impl KinematicLimits {
    pub fn validate(&self) -> Result<()> {
        let fields = [
            ("v_max", self.v_max),
            ("omega_max", self.omega_max),
            ("a_max", self.a_max),
            ("alpha_max", self.alpha_max),
        ];
        for (name, v) in fields {
            if !(v > 0.0) || !v.is_finite() {
                return Err(Error::param(name, format!("must be positive and finite, got {v}")));
            }
        }
        Ok(())
    }

    /// Whether `twist` respects the velocity limits.
    pub fn admits(&self, twist: &Twist2) -> bool {
        twist.speed() <= self.v_max + LIMIT_SLACK && twist.omega.abs() <= self.omega_max + LIMIT_SLACK
    }
}

/// Robot pose, world-frame twist and the limits of its base.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RobotState {
    pub pose: Pose2,
    /// World-frame velocity over the last integration step.
    pub twist: Twist2,
    pub limits: KinematicLimits,
}

impl RobotState {
    pub fn at_rest(pose: Pose2, limits: KinematicLimits) -> Self {
        RobotState {
            pose,
            twist: Twist2::ZERO,
            limits,
        }
    }

    /// Advances by a world-frame command that was already clamped.
    ///
    /// The command is expressed in the body frame at mid-step heading, so the
    /// chord of the resulting arc points along the requested world direction.
    pub fn step_world(&self, command: Twist2, dt: f64) -> Result<RobotState> {
        let mid = self.pose.heading + 0.5 * command.omega * dt;
        integrate(self, command.rotated(-mid), dt)
    }
}

/// Limits `desired` (world frame) to the velocity bounds and to what the base
/// can reach from `current` within `dt`.
///
/// Linear speed is scaled down without changing direction; the linear change
/// is bounded as a vector so the direction of travel is kept while
/// accelerating along a line.
pub fn clamp_command(
    desired: Twist2,
    current: Twist2,
    limits: &KinematicLimits,
    dt: f64,
) -> Result<Twist2> {
    if !desired.is_finite() {
        return Err(Error::NonFinite("desired twist"));
    }
    if !(dt > 0.0) {
        return Err(Error::param("dt", "must be positive"));
    }

    let mut linear = desired.linear();
    let speed = linear.norm();
    if speed > limits.v_max {
        linear *= limits.v_max / speed;
    }
    let omega = desired.omega.clamp(-limits.omega_max, limits.omega_max);

    let dv = linear - current.linear();
    let max_dv = limits.a_max * dt;
    let dv_norm = dv.norm();
    let linear = if dv_norm > max_dv {
        current.linear() + dv * (max_dv / dv_norm)
    } else {
        linear
    };

    let max_dw = limits.alpha_max * dt;
    let omega = current.omega + (omega - current.omega).clamp(-max_dw, max_dw);

    Ok(Twist2::from_parts(linear, omega))
}

/// Integrates a constant body-frame twist over `dt` exactly (arc motion).
///
/// The returned state carries the command re-expressed in the world frame at
/// mid-step heading, i.e. the direction of the travelled chord.
pub fn integrate(state: &RobotState, command: Twist2, dt: f64) -> Result<RobotState> {
    if !command.is_finite() {
        return Err(Error::NonFinite("command"));
    }
    if !(dt > 0.0) {
        return Err(Error::param("dt", "must be positive"));
    }
    if !state.limits.admits(&command) {
        return Err(Error::LimitExceeded(format!(
            "speed {:.6} m/s, yaw rate {:.6} rad/s",
            command.speed(),
            command.omega
        )));
    }

    let theta0 = state.pose.heading;
    let half = 0.5 * command.omega * dt;
    // chord length factor 2 sin(w dt / 2) / w, which tends to dt as w -> 0
    let chord = if half.abs() < 1e-12 {
        dt
    } else {
        2.0 * half.sin() / command.omega
    };
    let mid = theta0 + half;
    let body = command.linear();
    let displacement: Vector = rotate(body, mid) * chord;

    let pose = Pose2 {
        x: state.pose.x + displacement.x,
        y: state.pose.y + displacement.y,
        heading: wrap_angle(theta0 + command.omega * dt),
    };
    Ok(RobotState {
        pose,
        twist: Twist2::from_parts(rotate(body, mid), command.omega),
        limits: state.limits,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    use proptest::prelude::*;

    fn limits() -> KinematicLimits {
        KinematicLimits::default()
    }

    #[test]
    fn first_step_is_acceleration_limited() {
        let out = clamp_command(Twist2::new(2.0, 0.0, 0.0), Twist2::ZERO, &limits(), 0.01).unwrap();
        assert!((out.vx - 0.01).abs() < 1e-15);
        assert_eq!(out.vy, 0.0);
        assert_eq!(out.omega, 0.0);
    }

    #[test]
    fn max_speed_is_admissible_steady_state() {
        let cur = Twist2::new(1.5, 0.0, 0.0);
        let out = clamp_command(cur, cur, &limits(), 0.01).unwrap();
        assert_eq!(out, cur);
    }

    #[test]
    fn yaw_rate_capped_at_one_rad_per_second() {
        let out = clamp_command(
            Twist2::new(0.0, 0.0, 2.0),
            Twist2::new(0.0, 0.0, 1.0),
            &limits(),
            0.01,
        )
        .unwrap();
        assert_eq!(out, Twist2::new(0.0, 0.0, 1.0));
    }

    #[test]
    fn clamp_rejects_bad_input() {
        assert!(clamp_command(Twist2::new(f64::NAN, 0.0, 0.0), Twist2::ZERO, &limits(), 0.01).is_err());
        assert!(clamp_command(Twist2::ZERO, Twist2::ZERO, &limits(), 0.0).is_err());
    }

    #[test]
    fn magnitude_clamp_keeps_direction() {
        let cur = Twist2::new(0.9, 1.2, 0.0); // already at 1.5 m/s
        let out = clamp_command(Twist2::new(3.0, 4.0, 0.0), cur, &limits(), 0.01).unwrap();
        assert!((out.speed() - 1.5).abs() < 1e-12);
        assert!((out.vy / out.vx - 4.0 / 3.0).abs() < 1e-12);
    }

    #[test]
    fn pure_translation() {
        let s = RobotState::at_rest(Pose2::default(), limits());
        let out = integrate(&s, Twist2::new(1.0, 0.0, 0.0), 1.0).unwrap();
        assert_eq!(out.pose, Pose2::new(1.0, 0.0, 0.0).unwrap());
    }

    #[test]
    fn pure_rotation_lands_on_pi() {
        let mut l = limits();
        l.omega_max = 4.0;
        let s = RobotState::at_rest(Pose2::default(), l);
        let out = integrate(&s, Twist2::new(0.0, 0.0, PI), 1.0).unwrap();
        assert_eq!((out.pose.x, out.pose.y), (0.0, 0.0));
        assert!((out.pose.heading - PI).abs() < 1e-12);
        assert!(out.pose.heading > 0.0);
    }

    #[test]
    fn quarter_arc_matches_closed_form() {
        let mut l = limits();
        l.omega_max = 2.0;
        let s = RobotState::at_rest(Pose2::default(), l);
        let out = integrate(&s, Twist2::new(1.0, 0.0, PI / 2.0), 1.0).unwrap();
        assert!((out.pose.x - 2.0 / PI).abs() < 1e-12);
        assert!((out.pose.y - 2.0 / PI).abs() < 1e-12);
        assert!((out.pose.heading - PI / 2.0).abs() < 1e-12);
    }

    #[test]
    fn unclamped_command_rejected() {
        let s = RobotState::at_rest(Pose2::default(), limits());
        assert!(matches!(
            integrate(&s, Twist2::new(2.0, 0.0, 0.0), 0.01),
            Err(Error::LimitExceeded(_))
        ));
        assert!(integrate(&s, Twist2::new(0.0, 0.0, 1.5), 0.01).is_err());
    }

    #[test]
    fn lateral_translation_holds_heading() {
        let s = RobotState::at_rest(Pose2::new(0.0, 0.0, 0.3).unwrap(), limits());
        let out = s.step_world(Twist2::new(0.0, 0.5, 0.0), 0.1).unwrap();
        assert_eq!(out.pose.heading, 0.3);
        assert!(out.pose.x.abs() < 1e-15 && (out.pose.y - 0.05).abs() < 1e-15);
    }

    #[test]
    fn world_step_follows_commanded_direction_while_rotating() {
        let s = RobotState::at_rest(Pose2::new(0.0, 0.0, 0.2).unwrap(), limits());
        let out = s.step_world(Twist2::new(0.5, 0.0, 1.0), 0.01).unwrap();
        assert!(out.pose.y.abs() < 1e-15);
        assert!((out.twist.vx - 0.5).abs() < 1e-15);
    }

    proptest! {
        #[test]
        fn clamped_streams_respect_limits(
            cmds in proptest::collection::vec((-3.0f64..3.0, -3.0f64..3.0, -3.0f64..3.0), 1..200)
        ) {
            let l = limits();
            let dt = 0.01;
            let mut state = RobotState::at_rest(Pose2::default(), l);
            for (vx, vy, w) in cmds {
                let prev = state.twist;
                let cmd = clamp_command(Twist2::new(vx, vy, w), prev, &l, dt).unwrap();
                state = state.step_world(cmd, dt).unwrap();
                prop_assert!(state.twist.speed() <= l.v_max + LIMIT_SLACK);
                prop_assert!(state.twist.omega.abs() <= l.omega_max + LIMIT_SLACK);
                prop_assert!((state.twist.speed() - prev.speed()).abs() <= l.a_max * dt + 1e-9);
                prop_assert!((state.twist.omega - prev.omega).abs() <= l.alpha_max * dt + 1e-9);
            }
        }

        #[test]
        fn integrate_is_deterministic(
            x in -5.0f64..5.0, y in -5.0f64..5.0, h in -3.0f64..3.0,
            vx in -1.0f64..1.0, vy in -1.0f64..1.0, w in -1.0f64..1.0, dt in 0.001f64..0.5,
        ) {
            let s = RobotState::at_rest(Pose2::new(x, y, h).unwrap(), limits());
            let a = integrate(&s, Twist2::new(vx, vy, w), dt).unwrap();
            let b = integrate(&s, Twist2::new(vx, vy, w), dt).unwrap();
            prop_assert_eq!(a.pose.x.to_bits(), b.pose.x.to_bits());
            prop_assert_eq!(a.pose.y.to_bits(), b.pose.y.to_bits());
            prop_assert_eq!(a.pose.heading.to_bits(), b.pose.heading.to_bits());
        }
    }
}
