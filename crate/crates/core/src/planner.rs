//! 10 Hz crossing planner.
//!
//! Free navigation drives straight to the goal. When a tracked person is on
//! the way and closer than the step trigger the planner enters people
//! avoidance: a diagonal step to one side, then a slide along that wall with
//! an open rotation just before the crossing.

use std::f64::consts::FRAC_PI_3;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geom::{wrap_angle, Point, Pose2, Side};
use crate::kinematics::RobotState;
use crate::path::{Path, PathPoint};
use crate::perception::{relative_closing_speed, TrackedPerson};
use crate::world::{CorridorFrame, CorridorWorld};

/// Closing speeds at or below this predict no crossing (m/s).
pub const CLOSING_EPSILON: f64 = 0.05;
/// Lateral offsets below this count as centred (m).
const CENTRE_BAND: f64 = 0.05;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Mode {
    FreeNavigation,
    Step,
    SlideRotate,
}

impl Mode {
    pub fn as_str(self) -> &'static str {
        match self {
            Mode::FreeNavigation => "free",
            Mode::Step => "step",
            Mode::SlideRotate => "slide_rotate",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct PlannerConfig {
    pub step_trigger_distance: f64,
    pub rotate_time_threshold: f64,
    pub rotate_angle: f64,
    pub slide_lookahead: f64,
    /// Robot centre to wall during step and slide (m).
    pub wall_offset: f64,
    pub rotation_enabled: bool,
    pub slide_enabled: bool,
    pub rotate_back_clearance: f64,
    /// Forward share of the speed along the step diagonal.
    pub step_forward_ratio: f64,
    /// Lateral error at which the step counts as done (m).
    pub step_tolerance: f64,
    /// Same-side person closer than this stops the robot (m).
    pub block_distance: f64,
    /// History span used for the closing speed (s).
    pub closing_window: f64,
}

impl Default for PlannerConfig {
    fn default() -> Self {
        PlannerConfig {
            step_trigger_distance: 4.0,
            rotate_time_threshold: 1.8,
            rotate_angle: FRAC_PI_3,
            slide_lookahead: 0.5,
            wall_offset: 0.28,
            rotation_enabled: true,
            slide_enabled: true,
            rotate_back_clearance: 0.5,
            step_forward_ratio: 0.5,
            step_tolerance: 0.05,
            block_distance: 1.0,
            closing_window: 0.5,
        }
    }
}

impl PlannerConfig {
    pub fn validate(&self, robot_radius: f64, omega_max: f64) -> Result<()> {
        let positive = [
            ("step_trigger_distance", self.step_trigger_distance),
            ("rotate_time_threshold", self.rotate_time_threshold),
            ("slide_lookahead", self.slide_lookahead),
            ("rotate_back_clearance", self.rotate_back_clearance),
            ("step_tolerance", self.step_tolerance),
            ("block_distance", self.block_distance),
            ("closing_window", self.closing_window),
        ];
        for (name, v) in positive {
            if !(v > 0.0) || !v.is_finite() {
                return Err(Error::param(name, "must be positive"));
            }
        }
        if !(self.rotate_angle >= 0.0 && self.rotate_angle < std::f64::consts::PI) {
            return Err(Error::param("rotate_angle", "must lie in [0, pi)"));
        }
        if self.rotate_time_threshold < self.rotate_angle / omega_max {
            return Err(Error::param(
                "rotate_time_threshold",
                "too short to complete the rotation at the yaw-rate limit",
            ));
        }
        if self.wall_offset < robot_radius {
            return Err(Error::param("wall_offset", "must be at least the robot radius"));
        }
        if !(self.step_forward_ratio > 0.0 && self.step_forward_ratio < 1.0) {
            return Err(Error::param("step_forward_ratio", "must lie in (0, 1)"));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PlannerState {
    pub mode: Mode,
    pub committed_side: Option<Side>,
    pub rotating: bool,
    pub target_person_id: Option<u64>,
}

impl Default for PlannerState {
    fn default() -> Self {
        PlannerState {
            mode: Mode::FreeNavigation,
            committed_side: None,
            rotating: false,
            target_person_id: None,
        }
    }
}

impl PlannerState {
    fn end_episode(&mut self) {
        *self = PlannerState::default();
    }
}

/// Values computed during a planning cycle, kept for traces.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct PlanDiagnostics {
    pub t_cross: Option<f64>,
    pub closing_speed: Option<f64>,
    pub blocked: bool,
    pub target_heading: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Plan {
    pub path: Path,
    pub state: PlannerState,
    pub diagnostics: PlanDiagnostics,
}

/// Corridor frame around the robot, oriented toward `goal`.
fn travel_frame(robot: &RobotState, goal: Point, world: &CorridorWorld) -> Option<(usize, CorridorFrame)> {
    let here = robot.pose.position();
    let aisle = world.aisle_of(here)?;
    Some((aisle, world.frame(aisle, goal - here)))
}

fn distance(robot: &RobotState, track: &TrackedPerson) -> f64 {
    (track.position_estimate - robot.pose.position()).norm()
}

/// Whether `track` stands between the robot and its goal.
///
/// The person must project strictly inside the robot-to-goal segment, share
/// the robot's aisle, and either be closing in or already within the step
/// trigger distance.
pub fn person_on_way(
    robot: &RobotState,
    track: &TrackedPerson,
    goal: Point,
    world: &CorridorWorld,
    cfg: &PlannerConfig,
) -> bool {
    let here = robot.pose.position();
    let seg = goal - here;
    let len2 = seg.norm_squared();
    if len2 <= 0.0 {
        return false;
    }
    let u = (track.position_estimate - here).dot(&seg) / len2;
    if !(u > 0.0 && u < 1.0) {
        return false;
    }
    let same_aisle = match (world.aisle_of(here), world.aisle_of(track.position_estimate)) {
        (Some(a), Some(b)) => a == b,
        _ => false,
    };
    if !same_aisle {
        return false;
    }
    let closing = relative_closing_speed(track, cfg.closing_window).is_some_and(|v| v > 0.0);
    closing || distance(robot, track) < cfg.step_trigger_distance
}

/// Side to step to: away from the person's lateral offset, ties broken by the
/// robot's own side and then by `Right`.
pub fn choose_step_side(robot: &RobotState, track: &TrackedPerson, frame: &CorridorFrame) -> Side {
    let (_, person_l) = frame.to_local(track.position_estimate);
    if person_l >= CENTRE_BAND {
        return Side::Right;
    }
    if person_l <= -CENTRE_BAND {
        return Side::Left;
    }
    let (_, robot_l) = frame.to_local(robot.pose.position());
    if robot_l > 1e-6 {
        Side::Left
    } else {
        Side::Right
    }
}

/// Lateral coordinate of the step and slide lane on `side`.
pub fn lane_lateral(side: Side, frame: &CorridorFrame, cfg: &PlannerConfig) -> f64 {
    side.sign() * (frame.half_width - cfg.wall_offset)
}

fn clamp_along(frame: &CorridorFrame, s: f64) -> f64 {
    s.clamp(0.0, frame.length)
}

/// Diagonal step toward the lane on `side`, facing along the corridor.
///
/// The waypoint lies on a line whose forward component is
/// `step_forward_ratio` of the travel speed, so the forward speed drops while
/// the robot moves aside.
pub fn step_phase_path(robot: &RobotState, side: Side, frame: &CorridorFrame, cfg: &PlannerConfig) -> Path {
    let (s, l) = frame.to_local(robot.pose.position());
    let target_l = lane_lateral(side, frame, cfg);
    let r = cfg.step_forward_ratio;
    let advance = ((target_l - l).abs() * r / (1.0 - r * r).sqrt()).max(0.01);
    let p = frame.from_local(clamp_along(frame, s + advance), target_l);
    let target = Pose2 {
        x: p.x,
        y: p.y,
        heading: frame.heading(),
    };
    Path::to_target(robot.pose, target)
}

/// Temporary goal in the lane on `side`, `slide_lookahead` ahead of the robot
/// and clamped to the aisle end. With sliding disabled the robot holds its
/// current position.
pub fn slide_goal(robot: &RobotState, side: Side, frame: &CorridorFrame, cfg: &PlannerConfig) -> Point {
    if !cfg.slide_enabled {
        return robot.pose.position();
    }
    let (s, _) = frame.to_local(robot.pose.position());
    frame.from_local(clamp_along(frame, s + cfg.slide_lookahead), lane_lateral(side, frame, cfg))
}

/// Predicted time to the crossing, `d_p / v_r`. `None` when the person is not
/// closing in faster than [`CLOSING_EPSILON`].
pub fn crossing_time(d_p: f64, v_r: f64) -> Result<Option<f64>> {
    if !d_p.is_finite() || !v_r.is_finite() {
        return Err(Error::NonFinite("crossing_time input"));
    }
    if d_p < 0.0 {
        return Err(Error::NegativeDistance(d_p));
    }
    Ok((v_r > CLOSING_EPSILON).then(|| d_p / v_r))
}

/// Target heading during slide-rotate. Latches `st.rotating` the first time
/// the crossing time drops to the threshold. `toward_sign` is the lateral
/// sign of the rotation (+1 turns left).
pub fn rotate_decision(
    t_cross: Option<f64>,
    toward_sign: f64,
    axis_heading: f64,
    st: &mut PlannerState,
    cfg: &PlannerConfig,
) -> f64 {
    if !cfg.rotation_enabled {
        st.rotating = false;
        return axis_heading;
    }
    if t_cross.is_some_and(|t| t <= cfg.rotate_time_threshold) {
        st.rotating = true;
    }
    if st.rotating {
        wrap_angle(axis_heading + toward_sign.signum() * cfg.rotate_angle)
    } else {
        axis_heading
    }
}

/// True once the person is behind the robot along the corridor by at least
/// the rotate-back clearance.
pub fn rotate_back(robot: &RobotState, track: &TrackedPerson, frame: &CorridorFrame, cfg: &PlannerConfig) -> bool {
    let (s_r, _) = frame.to_local(robot.pose.position());
    let (s_p, _) = frame.to_local(track.position_estimate);
    s_r - s_p >= cfg.rotate_back_clearance
}

/// True when the person stands ahead on the robot's committed side within the
/// block distance.
pub fn blocked_stop(
    robot: &RobotState,
    track: &TrackedPerson,
    side: Side,
    frame: &CorridorFrame,
    cfg: &PlannerConfig,
) -> bool {
    let (s_r, _) = frame.to_local(robot.pose.position());
    let (s_p, l_p) = frame.to_local(track.position_estimate);
    side.sign() * l_p > -CENTRE_BAND && s_p > s_r && distance(robot, track) < cfg.block_distance
}

fn hold_path(robot: &RobotState, heading: f64) -> Path {
    let target = Pose2 {
        heading,
        ..robot.pose
    };
    Path::to_target(robot.pose, target)
}

/// One planning cycle.
pub fn plan(
    robot: &RobotState,
    tracks: &[TrackedPerson],
    goal: Point,
    world: &CorridorWorld,
    cfg: &PlannerConfig,
    st: &PlannerState,
) -> Result<Plan> {
    let mut st = *st;
    let mut diag = PlanDiagnostics::default();
    let here = robot.pose.position();

    let Some((_, frame)) = travel_frame(robot, goal, world) else {
        // outside every aisle: head straight for the goal
        st.end_episode();
        let to_goal = goal - here;
        let heading = if to_goal.norm() > 1e-9 {
            to_goal.y.atan2(to_goal.x)
        } else {
            robot.pose.heading
        };
        diag.target_heading = heading;
        let path = Path::to_target(robot.pose, Pose2 { x: goal.x, y: goal.y, heading });
        return Ok(Plan { path, state: st, diagnostics: diag });
    };
    let axis_heading = frame.heading();
    diag.target_heading = axis_heading;

    if st.mode == Mode::FreeNavigation {
        let nearest = tracks
            .iter()
            .filter(|t| person_on_way(robot, t, goal, world, cfg))
            .min_by(|a, b| distance(robot, a).total_cmp(&distance(robot, b)));
        if let Some(track) = nearest.filter(|t| distance(robot, t) < cfg.step_trigger_distance) {
            st.mode = Mode::Step;
            st.committed_side = Some(choose_step_side(robot, track, &frame));
            st.target_person_id = Some(track.id);
            st.rotating = false;
            log::debug!("step towards {:?} for person {}", st.committed_side, track.id);
        }
    }

    let target = st
        .target_person_id
        .and_then(|id| tracks.iter().find(|t| t.id == id));
    if st.mode != Mode::FreeNavigation {
        match target {
            // a dropped track ends the episode
            None => st.end_episode(),
            Some(track) if rotate_back(robot, track, &frame, cfg) => st.end_episode(),
            Some(_) => {}
        }
    }

    let path = match (st.mode, st.committed_side, target) {
        (Mode::FreeNavigation, ..) | (_, None, _) | (_, _, None) => {
            st.end_episode();
            let goal_pose = Pose2 {
                x: goal.x,
                y: goal.y,
                heading: axis_heading,
            };
            Path::to_target(robot.pose, goal_pose)
        }
        (mode, Some(side), Some(track)) => {
            let mut mode = mode;
            let (_, l) = frame.to_local(here);
            if mode == Mode::Step && (l - lane_lateral(side, &frame, cfg)).abs() < cfg.step_tolerance {
                mode = Mode::SlideRotate;
                st.mode = mode;
            }
            diag.blocked = blocked_stop(robot, track, side, &frame, cfg);
            let closing = relative_closing_speed(track, cfg.closing_window);
            diag.closing_speed = closing;
            diag.t_cross = match closing {
                Some(v) => crossing_time(distance(robot, track), v)?,
                None => None,
            };
            match mode {
                Mode::Step => {
                    if diag.blocked {
                        hold_path(robot, axis_heading)
                    } else {
                        step_phase_path(robot, side, &frame, cfg)
                    }
                }
                _ => {
                    // open rotation: chest toward the corridor centre
                    let heading = rotate_decision(diag.t_cross, -side.sign(), axis_heading, &mut st, cfg);
                    diag.target_heading = heading;
                    if diag.blocked {
                        hold_path(robot, heading)
                    } else {
                        let p = slide_goal(robot, side, &frame, cfg);
                        Path::to_target(robot.pose, Pose2 { x: p.x, y: p.y, heading })
                    }
                }
            }
        }
    };
    Ok(Plan {
        path,
        state: st,
        diagnostics: diag,
    })
}

/// Headings a path point may carry: the corridor axis, or the axis turned by
/// the rotation angle either way.
pub fn heading_is_allowed(point: &PathPoint, axis_heading: f64, cfg: &PlannerConfig) -> bool {
    let d = wrap_angle(point.pose.heading - axis_heading).abs();
    d < 1e-9 || (d - cfg.rotate_angle).abs() < 1e-9
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geom::Vector;
    use crate::kinematics::KinematicLimits;
    use crate::perception::RangeSample;
    use proptest::prelude::*;

    fn world() -> CorridorWorld {
        CorridorWorld::single_aisle(8.0, 0.95, 0.27, 0.15).unwrap()
    }

    fn robot_at(x: f64, y: f64) -> RobotState {
        RobotState::at_rest(Pose2::new(x, y, 0.0).unwrap(), KinematicLimits::default())
    }

    /// Track walking toward -x at `speed`, with a history consistent with a
    /// robot standing at `observer`.
    fn track(id: u64, x: f64, y: f64, speed: f64, observer: Point) -> TrackedPerson {
        let history = (0..6)
            .map(|k| {
                let dt = 0.1 * (5 - k) as f64;
                RangeSample {
                    t: 1.0 - dt,
                    person: Point::new(x + speed * dt, y),
                    observer,
                }
            })
            .collect();
        TrackedPerson {
            id,
            position_estimate: Point::new(x, y),
            velocity_estimate: Vector::new(-speed, 0.0),
            position_spread: 0.0,
            last_seen_tick: 100,
            history,
        }
    }

    fn frame(w: &CorridorWorld) -> CorridorFrame {
        w.frame(0, Vector::new(1.0, 0.0))
    }

    #[test]
    fn default_config_is_valid() {
        PlannerConfig::default().validate(0.27, 1.0).unwrap();
        let bad = PlannerConfig {
            rotate_time_threshold: 0.9,
            ..PlannerConfig::default()
        };
        assert!(bad.validate(0.27, 1.0).is_err());
        let bad = PlannerConfig {
            wall_offset: 0.2,
            ..PlannerConfig::default()
        };
        assert!(bad.validate(0.27, 1.0).is_err());
    }

    #[test]
    fn empty_corridor_gives_two_point_path() {
        let w = world();
        let r = robot_at(1.0, 0.0);
        let goal = Point::new(7.5, 0.0);
        let plan = plan(&r, &[], goal, &w, &PlannerConfig::default(), &PlannerState::default()).unwrap();
        assert_eq!(plan.path.len(), 2);
        assert_eq!(plan.path.first().pose, r.pose);
        assert_eq!(plan.path.last().pose, Pose2::new(7.5, 0.0, 0.0).unwrap());
        assert_eq!(plan.state.mode, Mode::FreeNavigation);
    }

    #[test]
    fn person_at_three_and_a_half_metres_starts_step() {
        let w = world();
        let r = robot_at(1.0, 0.0);
        let t = track(1, 4.5, 0.2, 1.2, r.pose.position());
        let plan = plan(&r, &[t], Point::new(7.5, 0.0), &w, &PlannerConfig::default(), &PlannerState::default()).unwrap();
        assert_eq!(plan.state.mode, Mode::Step);
        assert_eq!(plan.state.committed_side, Some(Side::Right));
        assert_eq!(plan.state.target_person_id, Some(1));
    }

    #[test]
    fn person_at_six_metres_keeps_free_navigation() {
        let w = world();
        let r = robot_at(1.0, 0.0);
        let t = track(1, 7.0, 0.2, 1.2, r.pose.position());
        let plan = plan(&r, &[t], Point::new(7.5, 0.0), &w, &PlannerConfig::default(), &PlannerState::default()).unwrap();
        assert_eq!(plan.state.mode, Mode::FreeNavigation);
        assert_eq!(plan.path.len(), 2);
    }

    #[test]
    fn on_way_cases() {
        let w = CorridorWorld::store(8.0, 0.95, 0.6, 1.2, 0.27, 0.15).unwrap();
        let cfg = PlannerConfig::default();
        let r = robot_at(1.0, 0.0);
        let goal = Point::new(7.5, 0.0);
        let o = r.pose.position();
        assert!(person_on_way(&r, &track(1, 4.0, 0.1, 1.2, o), goal, &w, &cfg));
        // other aisle
        assert!(!person_on_way(&r, &track(1, 4.0, 1.55, 1.2, o), goal, &w, &cfg));
        // behind the robot
        assert!(!person_on_way(&r, &track(1, 0.5, 0.0, -1.2, o), goal, &w, &cfg));
    }

    #[test]
    fn step_side_cases() {
        let w = world();
        let f = frame(&w);
        let o = Point::new(1.0, 0.0);
        assert_eq!(choose_step_side(&robot_at(1.0, 0.0), &track(1, 4.0, 0.2, 1.2, o), &f), Side::Right);
        assert_eq!(choose_step_side(&robot_at(1.0, 0.0), &track(1, 4.0, -0.2, 1.2, o), &f), Side::Left);
        assert_eq!(choose_step_side(&robot_at(1.0, -0.03), &track(1, 4.0, 0.0, 1.2, o), &f), Side::Right);
        assert_eq!(choose_step_side(&robot_at(1.0, 0.03), &track(1, 4.0, 0.0, 1.2, o), &f), Side::Left);
        assert_eq!(choose_step_side(&robot_at(1.0, 0.0), &track(1, 4.0, 0.0, 1.2, o), &f), Side::Right);
    }

    #[test]
    fn step_targets_lane_right_of_centre() {
        let w = world();
        let f = frame(&w);
        let cfg = PlannerConfig::default();
        assert!((lane_lateral(Side::Right, &f, &cfg) + 0.195).abs() < 1e-12);
        let r = robot_at(2.0, 0.0);
        let path = step_phase_path(&r, Side::Right, &f, &cfg);
        let p = path.last().pose;
        assert!((p.y + 0.195).abs() < 1e-12);
        assert!(p.x > 2.0);
        // 60 degree diagonal: forward is half the distance travelled
        let d = p.position() - r.pose.position();
        assert!((d.x / d.norm() - 0.5).abs() < 1e-12);
        assert!(path.points().iter().all(|q| q.pose.heading == 0.0));
    }

    #[test]
    fn robot_in_lane_goes_straight_to_slide_rotate() {
        let w = world();
        let r = robot_at(2.0, -0.195);
        let t = track(1, 4.0, 0.25, 1.2, r.pose.position());
        let st = PlannerState {
            mode: Mode::Step,
            committed_side: Some(Side::Right),
            rotating: false,
            target_person_id: Some(1),
        };
        let plan = plan(&r, &[t], Point::new(7.5, 0.0), &w, &PlannerConfig::default(), &st).unwrap();
        assert_eq!(plan.state.mode, Mode::SlideRotate);
    }

    #[test]
    fn slide_goal_cases() {
        let w = world();
        let f = frame(&w);
        let cfg = PlannerConfig::default();
        let lane = -0.475 + 0.28;
        let r = robot_at(2.0, lane);
        let g = slide_goal(&r, Side::Right, &f, &cfg);
        assert!((g - Point::new(2.5, lane)).norm() < 1e-12);
        let off = PlannerConfig {
            slide_enabled: false,
            ..cfg
        };
        assert_eq!(slide_goal(&r, Side::Right, &f, &off), r.pose.position());
        let g = slide_goal(&robot_at(7.8, lane), Side::Right, &f, &cfg);
        assert!((g.x - 8.0).abs() < 1e-12);
    }

    #[test]
    fn crossing_time_cases() {
        assert_eq!(crossing_time(3.6, 2.0).unwrap(), Some(1.8));
        assert_eq!(crossing_time(0.0, 1.0).unwrap(), Some(0.0));
        assert_eq!(crossing_time(3.0, -0.5).unwrap(), None);
        assert_eq!(crossing_time(3.0, 0.05).unwrap(), None);
        assert!(matches!(crossing_time(-1.0, 1.0), Err(Error::NegativeDistance(_))));
    }

    #[test]
    fn rotate_decision_cases() {
        let cfg = PlannerConfig::default();
        let mut st = PlannerState::default();
        let h = rotate_decision(Some(1.7), 1.0, 0.0, &mut st, &cfg);
        assert!((h - FRAC_PI_3).abs() < 1e-12);
        assert!(st.rotating);
        // latched despite a later estimate above threshold
        let h = rotate_decision(Some(2.5), 1.0, 0.0, &mut st, &cfg);
        assert!((h - FRAC_PI_3).abs() < 1e-12);

        let mut st = PlannerState::default();
        assert_eq!(rotate_decision(Some(2.5), 1.0, 0.0, &mut st, &cfg), 0.0);
        assert!(!st.rotating);

        let off = PlannerConfig {
            rotation_enabled: false,
            ..cfg
        };
        let mut st = PlannerState::default();
        assert_eq!(rotate_decision(Some(0.5), 1.0, 0.0, &mut st, &off), 0.0);
        assert!(!st.rotating);
    }

    #[test]
    fn rotate_back_cases() {
        let w = world();
        let f = frame(&w);
        let cfg = PlannerConfig::default();
        let r = robot_at(4.0, -0.195);
        let o = r.pose.position();
        assert!(rotate_back(&r, &track(1, 3.4, 0.25, 1.2, o), &f, &cfg));
        assert!(!rotate_back(&r, &track(1, 4.0, 0.25, 1.2, o), &f, &cfg));
    }

    #[test]
    fn dropped_track_ends_episode() {
        let w = world();
        let r = robot_at(4.0, -0.195);
        let st = PlannerState {
            mode: Mode::SlideRotate,
            committed_side: Some(Side::Right),
            rotating: true,
            target_person_id: Some(7),
        };
        let plan = plan(&r, &[], Point::new(7.5, 0.0), &w, &PlannerConfig::default(), &st).unwrap();
        assert_eq!(plan.state, PlannerState::default());
    }

    #[test]
    fn blocked_cases() {
        let w = world();
        let f = frame(&w);
        let cfg = PlannerConfig::default();
        let r = robot_at(3.0, -0.195);
        let o = r.pose.position();
        assert!(blocked_stop(&r, &track(1, 3.8, -0.2, 1.2, o), Side::Right, &f, &cfg));
        assert!(!blocked_stop(&r, &track(1, 3.8, 0.2, 1.2, o), Side::Right, &f, &cfg));
        assert!(!blocked_stop(&r, &track(1, 6.0, -0.2, 1.2, o), Side::Right, &f, &cfg));
    }

    #[test]
    fn blocked_slide_holds_position() {
        let w = world();
        let r = robot_at(3.0, -0.195);
        let t = track(1, 3.8, -0.2, 1.2, r.pose.position());
        let st = PlannerState {
            mode: Mode::SlideRotate,
            committed_side: Some(Side::Right),
            rotating: false,
            target_person_id: Some(1),
        };
        let plan = plan(&r, &[t], Point::new(7.5, 0.0), &w, &PlannerConfig::default(), &st).unwrap();
        assert!(plan.diagnostics.blocked);
        assert_eq!(plan.path.last().pose.position(), r.pose.position());
        assert_eq!(plan.state.committed_side, Some(Side::Right));
    }

    #[test]
    fn slide_rotate_rotates_toward_centre() {
        let w = world();
        let r = robot_at(3.0, -0.195);
        // 1.5 m away closing at 1.2 m/s: t_cross 1.25 s
        let t = track(1, 4.5, 0.25, 1.2, r.pose.position());
        let t_copy = t.clone();
        let st = PlannerState {
            mode: Mode::SlideRotate,
            committed_side: Some(Side::Right),
            rotating: false,
            target_person_id: Some(1),
        };
        let plan = plan(&r, &[t], Point::new(7.5, 0.0), &w, &PlannerConfig::default(), &st).unwrap();
        assert!(plan.state.rotating);
        assert!((plan.path.last().pose.heading - FRAC_PI_3).abs() < 1e-12);
        let tc = plan.diagnostics.t_cross.unwrap();
        let d = (Point::new(4.5, 0.25) - r.pose.position()).norm();
        let v = relative_closing_speed(&t_copy, 0.5).unwrap();
        assert!((tc - d / v).abs() < 1e-12, "{tc}");
        assert!(heading_is_allowed(plan.path.last(), 0.0, &PlannerConfig::default()));
    }

    proptest! {
        #[test]
        fn crossing_time_is_scale_invariant(d in 0.0f64..50.0, v in 0.06f64..5.0, k in 0.1f64..10.0) {
            prop_assume!(k * v > CLOSING_EPSILON);
            let a = crossing_time(d, v).unwrap().unwrap();
            let b = crossing_time(k * d, k * v).unwrap().unwrap();
            prop_assert!((a - b).abs() <= 1e-12 * a.max(1.0));
        }

        #[test]
        fn crossing_time_is_monotone(d in 0.0f64..50.0, dd in 1e-3f64..5.0, v in 0.06f64..5.0, dv in 1e-3f64..5.0) {
            let base = crossing_time(d, v).unwrap().unwrap();
            prop_assert!(crossing_time(d + dd, v).unwrap().unwrap() > base);
            if d > 0.0 {
                prop_assert!(crossing_time(d, v + dv).unwrap().unwrap() < base);
            }
        }

        #[test]
        fn side_never_changes_within_episode(ys in proptest::collection::vec(-0.3f64..0.3, 1..30)) {
            let w = world();
            let cfg = PlannerConfig::default();
            let goal = Point::new(7.5, 0.0);
            let mut st = PlannerState::default();
            let mut side = None;
            for (k, y) in ys.iter().enumerate() {
                let r = robot_at(1.0 + 0.02 * k as f64, 0.0);
                let t = track(1, 4.5 - 0.1 * k as f64, *y, 1.2, r.pose.position());
                let plan = plan(&r, &[t], goal, &w, &cfg, &st).unwrap();
                st = plan.state;
                if let Some(s) = st.committed_side {
                    prop_assert!(side.is_none() || side == Some(s));
                    side = Some(s);
                }
                prop_assert!(plan.path.points().iter().skip(1).all(|p| heading_is_allowed(p, 0.0, &cfg)));
            }
        }
    }
}
