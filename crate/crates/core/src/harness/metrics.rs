//! Per-run crossing metrics computed from a trace.

use crate::error::{Error, Result};
use crate::geom::wrap_angle;
use crate::kinematics::LIMIT_SLACK;
use crate::planner::Mode;

use super::sim::{Outcome, SimTrace, TraceRow};

/// Heading error at which the rotation counts as complete (rad).
pub const ROTATION_TOLERANCE: f64 = 2.0 * std::f64::consts::PI / 180.0;
/// Along-axis window ahead of the robot used for the stop contract (m).
pub const CROSSING_WINDOW: f64 = 1.5;
/// Speed below which the robot counts as stopped (m/s).
pub const STOPPED_SPEED: f64 = 0.01;

#[derive(Debug, Clone, PartialEq)]
pub struct CrossingMetrics {
    pub outcome: Outcome,
    pub collision: bool,
    /// Smallest surface gap to any pedestrian (m), infinite without people.
    pub min_clearance: f64,
    /// Tick of the smallest robot-pedestrian distance.
    pub crossing_tick: Option<u64>,
    pub rotation_trigger_tick: Option<u64>,
    pub rotation_complete_tick: Option<u64>,
    /// Crossing time minus rotation completion time (s).
    pub rotation_lead: Option<f64>,
    /// Time to reach the goal, absent on timeout (s).
    pub traversal_time: Option<f64>,
    /// Whether the robot stood still on every tick a pedestrian was within
    /// the crossing window ahead. False when no tick qualifies.
    pub robot_stopped_during_crossing: bool,
    pub limit_violations: u32,
    pub wall_penetrations: u32,
    pub projection_fallbacks: u32,
    /// First tick in step mode and the robot-person distance then.
    pub step_tick: Option<u64>,
    pub step_distance: Option<f64>,
    /// Largest heading offset from the travel axis (rad).
    pub max_heading_deviation: f64,
    /// Planner modes in order of appearance, repeats collapsed.
    pub mode_sequence: Vec<Mode>,
    /// Times the committed side changed without leaving avoidance.
    pub side_switches: u32,
}

fn nearest_distance(row: &TraceRow) -> Option<f64> {
    let here = row.robot.position();
    row.pedestrians
        .iter()
        .map(|p| (p.position - here).norm())
        .min_by(f64::total_cmp)
}

fn row_speed(row: &TraceRow) -> f64 {
    row.twist.speed().max(row.command.speed())
}

fn limit_violations(trace: &SimTrace) -> u32 {
    let l = &trace.limits;
    let dv = l.a_max * trace.dt + 1e-9;
    let dw = l.alpha_max * trace.dt + 1e-9;
    let over = |t: &crate::geom::Twist2| !l.admits(t);
    let mut count = 0;
    let mut prev = None;
    for row in &trace.rows {
        let mut bad = over(&row.twist) || over(&row.command);
        if let Some(p) = prev {
            let p: &crate::geom::Twist2 = p;
            bad |= (row.twist.linear() - p.linear()).norm() > dv;
            bad |= (row.twist.omega - p.omega).abs() > dw;
        }
        bad |= (row.command.linear() - row.twist.linear()).norm() > dv;
        bad |= (row.command.omega - row.twist.omega).abs() > dw;
        if bad {
            count += 1;
        }
        prev = Some(&row.twist);
    }
    count
}

pub fn compute_metrics(trace: &SimTrace) -> Result<CrossingMetrics> {
    if trace.rows.is_empty() {
        return Err(Error::Scenario("cannot compute metrics of an empty trace".into()));
    }
    let contact = trace.robot_radius + trace.person_radius;
    let mut min_distance = f64::INFINITY;
    let mut crossing_tick = None;
    for row in &trace.rows {
        if let Some(d) = nearest_distance(row) {
            if d < min_distance {
                min_distance = d;
                crossing_tick = Some(row.tick);
            }
        }
    }
    let min_clearance = min_distance - contact;

    let trigger = trace.rows.iter().find(|r| r.rotating);
    let rotation_trigger_tick = trigger.map(|r| r.tick);
    let rotation_complete_tick = trigger.and_then(|t| {
        trace
            .rows
            .iter()
            .skip_while(|r| r.tick < t.tick)
            .find(|r| r.rotating && wrap_angle(r.robot.heading - r.target_heading).abs() <= ROTATION_TOLERANCE)
            .map(|r| r.tick)
    });
    let rotation_lead = match (crossing_tick, rotation_complete_tick) {
        (Some(c), Some(r)) => Some((c as f64 - r as f64) * trace.dt),
        _ => None,
    };

    let mut window_ticks = 0;
    let mut all_stopped = true;
    for row in &trace.rows {
        let s_r = trace.along(row.robot.position());
        let in_window = row.pedestrians.iter().any(|p| {
            let ds = trace.along(p.position) - s_r;
            (0.0..=CROSSING_WINDOW).contains(&ds)
        });
        if in_window {
            window_ticks += 1;
            all_stopped &= row_speed(row) < STOPPED_SPEED;
        }
    }

    let step = trace.rows.iter().find(|r| r.mode == Mode::Step);
    let axis = trace.axis_heading();
    let max_heading_deviation = trace
        .rows
        .iter()
        .map(|r| wrap_angle(r.robot.heading - axis).abs())
        .fold(0.0, f64::max);

    let mut mode_sequence: Vec<Mode> = Vec::new();
    let mut side_switches = 0;
    for w in trace.rows.windows(2) {
        if let (Some(a), Some(b)) = (w[0].side, w[1].side) {
            if a != b {
                side_switches += 1;
            }
        }
    }
    for row in &trace.rows {
        if mode_sequence.last() != Some(&row.mode) {
            mode_sequence.push(row.mode);
        }
    }

    let wall_penetrations = trace
        .rows
        .iter()
        .filter(|r| r.wall_gap < -LIMIT_SLACK || r.pedestrian_wall_gap < -1e-6)
        .count() as u32;

    Ok(CrossingMetrics {
        outcome: trace.outcome,
        collision: min_distance < contact,
        min_clearance,
        crossing_tick,
        rotation_trigger_tick,
        rotation_complete_tick,
        rotation_lead,
        traversal_time: (trace.outcome == Outcome::GoalReached).then_some(trace.end_time),
        robot_stopped_during_crossing: window_ticks > 0 && all_stopped,
        limit_violations: limit_violations(trace),
        wall_penetrations,
        projection_fallbacks: trace.projection_fallbacks,
        step_tick: step.map(|r| r.tick),
        step_distance: step.and_then(nearest_distance),
        max_heading_deviation,
        mode_sequence,
        side_switches,
    })
}
