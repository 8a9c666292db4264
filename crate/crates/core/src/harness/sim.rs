//! The fixed-timestep simulation loop.

use serde::{Deserialize, Serialize};

use crate::clock::SimClock;
use crate::error::{Error, Result};
use crate::geom::{Point, Pose2, Side, Twist2, Vector};
use crate::kinematics::{KinematicLimits, RobotState};
use crate::navigator::{goal_reached, Navigator, Obstacle};
use crate::path::Path;
use crate::pedestrian::{scripted_step, social_force_step, PedestrianState};
use crate::perception::{sense, TrackedPerson, Tracker};
use crate::planner::{plan, Mode, PlannerState};

use super::metrics::{compute_metrics, CrossingMetrics};
use super::scenario::{Condition, Scenario};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Outcome {
    GoalReached,
    Timeout,
}

impl Outcome {
    pub fn as_str(self) -> &'static str {
        match self {
            Outcome::GoalReached => "goal",
            Outcome::Timeout => "timeout",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PedestrianRow {
    pub position: Point,
    pub velocity: Vector,
    /// Estimate of the track closest to this pedestrian, if any is within
    /// one metre.
    pub estimate: Option<Point>,
}

/// State at the start of one physics tick plus the command applied during it.
#[derive(Debug, Clone, PartialEq)]
pub struct TraceRow {
    pub tick: u64,
    pub time: f64,
    pub robot: Pose2,
    pub twist: Twist2,
    pub mode: Mode,
    pub rotating: bool,
    pub side: Option<Side>,
    pub blocked: bool,
    pub target_heading: f64,
    pub t_cross: Option<f64>,
    pub command: Twist2,
    pub pedestrians: Vec<PedestrianRow>,
    /// Smallest robot-pedestrian surface gap (m), infinite without people.
    pub min_clearance: f64,
    /// Robot surface to nearest wall (m).
    pub wall_gap: f64,
    /// Smallest pedestrian surface to wall gap (m).
    pub pedestrian_wall_gap: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SimTrace {
    pub rows: Vec<TraceRow>,
    pub dt: f64,
    pub pedestrian_count: usize,
    pub robot_radius: f64,
    pub person_radius: f64,
    pub limits: KinematicLimits,
    /// Start of the robot's aisle and its travel direction.
    pub origin: Point,
    pub axis: Vector,
    pub condition: Condition,
    pub outcome: Outcome,
    /// Simulated time at termination (s).
    pub end_time: f64,
    pub projection_fallbacks: u32,
}

impl SimTrace {
    /// Trace with no rows, for exporting or rendering an empty run.
    pub fn empty(sc: &Scenario) -> Self {
        let start = sc.robot_start().position();
        let (origin, axis) = travel_axis(sc, start);
        SimTrace {
            rows: Vec::new(),
            dt: sc.spec.sim.dt_physics,
            pedestrian_count: sc.spec.pedestrians.len(),
            robot_radius: sc.world.robot_radius,
            person_radius: sc.world.person_radius,
            limits: sc.spec.limits,
            origin,
            axis,
            condition: sc.condition(),
            outcome: Outcome::Timeout,
            end_time: 0.0,
            projection_fallbacks: 0,
        }
    }

    pub fn axis_heading(&self) -> f64 {
        self.axis.y.atan2(self.axis.x)
    }

    /// Position along the robot's travel axis.
    pub fn along(&self, p: Point) -> f64 {
        self.axis.dot(&(p - self.origin))
    }
}

fn travel_axis(sc: &Scenario, start: Point) -> (Point, Vector) {
    let goal = sc.robot_goal();
    match sc.world.aisle_of(start) {
        Some(i) => {
            let f = sc.world.frame(i, goal - start);
            (f.origin, f.axis)
        }
        None => (start, (goal - start).normalize()),
    }
}

fn nearest_estimate(p: Point, tracks: &[TrackedPerson]) -> Option<Point> {
    tracks
        .iter()
        .map(|t| t.position_estimate)
        .filter(|e| (e - p).norm() < 1.0)
        .min_by(|a, b| (a - p).norm().total_cmp(&(b - p).norm()))
}

/// Runs `sc` to completion and returns the trace and its metrics.
pub fn run_scenario(sc: &Scenario) -> Result<(SimTrace, CrossingMetrics)> {
    let trace = simulate(sc)?;
    let metrics = compute_metrics(&trace)?;
    Ok((trace, metrics))
}

/// Runs `sc` to completion.
///
/// Perception and planning run every planner period, the navigator and the
/// physics every tick. The run ends when the robot reaches its goal in free
/// navigation or the duration limit expires.
pub fn simulate(sc: &Scenario) -> Result<SimTrace> {
    let spec = &sc.spec;
    let world = &sc.world;
    let seed = spec.seed;
    let mut clock = SimClock::new(spec.sim.dt_physics, spec.sim.planner_period)?;
    let dt = clock.dt_physics;
    let period = clock.planner_period;
    let limits = spec.limits;
    let planner_cfg = sc.planner_config();
    let goal = sc.robot_goal();
    let start = sc.robot_start();

    let mut trace = SimTrace::empty(sc);
    let goal_pose = Pose2::from_point(goal, trace.axis_heading())?;

    let mut robot = RobotState::at_rest(start, limits);
    let mut pedestrians: Vec<PedestrianState> = sc.pedestrians()?;
    let mut tracker = Tracker::new(spec.tracker, seed)?;
    let mut navigator = Navigator::new(spec.navigator);
    let mut state = PlannerState::default();
    let mut tracks: Vec<TrackedPerson> = Vec::new();
    let mut path = Path::to_target(robot.pose, goal_pose);
    let mut diag = Default::default();

    let max_ticks = (spec.duration_limit / dt).round() as u64;
    let outcome = loop {
        let tick = clock.tick_index;
        let time = clock.time();
        if state.mode == Mode::FreeNavigation
            && goal_reached(&Path::to_target(robot.pose, goal_pose), &robot, navigator.gains())
        {
            break Outcome::GoalReached;
        }
        if tick >= max_ticks {
            break Outcome::Timeout;
        }

        if clock.is_planner_tick() {
            let scan = sense(world, &robot, &pedestrians, &spec.tracker, seed, tick);
            tracks = tracker.update(&scan, period)?;
            let p = plan(&robot, &tracks, goal, world, &planner_cfg, &state)?;
            if p.state.mode != state.mode {
                log::debug!("t={time:.2} {} -> {}", state.mode.as_str(), p.state.mode.as_str());
                navigator.reset();
            }
            state = p.state;
            path = p.path;
            diag = p.diagnostics;
        }

        let obstacles: Vec<Obstacle> = tracks
            .iter()
            .map(|t| Obstacle {
                position: t.position_estimate,
                radius: world.person_radius,
            })
            .collect();
        let command = navigator.command(&path, &robot, &obstacles, &limits, dt)?;

        let here = robot.pose.position();
        let min_clearance = pedestrians
            .iter()
            .map(|p| (p.position - here).norm() - world.robot_radius - p.radius)
            .fold(f64::INFINITY, f64::min);
        let pedestrian_wall_gap = pedestrians
            .iter()
            .map(|p| world.wall_distance(p.position).map(|d| d - p.radius))
            .collect::<Result<Vec<_>>>()?
            .into_iter()
            .fold(f64::INFINITY, f64::min);
        trace.rows.push(TraceRow {
            tick,
            time,
            robot: robot.pose,
            twist: robot.twist,
            mode: state.mode,
            rotating: state.rotating,
            side: state.committed_side,
            blocked: diag.blocked,
            target_heading: path.last().pose.heading,
            t_cross: diag.t_cross,
            command,
            pedestrians: pedestrians
                .iter()
                .map(|p| PedestrianRow {
                    position: p.position,
                    velocity: p.velocity,
                    estimate: nearest_estimate(p.position, &tracks),
                })
                .collect(),
            min_clearance,
            wall_gap: world.wall_distance(here)? - world.robot_radius,
            pedestrian_wall_gap,
        });

        let next_robot = robot.step_world(command, dt)?;
        for p in &mut pedestrians {
            *p = if p.behaviour.is_scripted() {
                scripted_step(p, &robot, world, &spec.blocker, time, dt)?
            } else {
                social_force_step(p, &robot, world, &spec.social_force, dt)?
            };
        }
        robot = next_robot;
        if !robot.pose.x.is_finite() || !robot.pose.y.is_finite() {
            return Err(Error::NonFinite("robot pose"));
        }
        clock.advance();
    };

    trace.outcome = outcome;
    trace.end_time = clock.time();
    trace.projection_fallbacks = pedestrians.iter().map(|p| p.projection_count).sum();
    Ok(trace)
}
