//! Simulated pedestrians: a social-force walker and two scripted behaviours.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geom::{Point, Side, Vector};
use crate::kinematics::RobotState;
use crate::world::CorridorWorld;

/// Parameters of the social-force walker.
///
/// Robot and wall interactions have separate strength/range pairs; walls use a
/// short range so a walker can keep to one side of a narrow aisle.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SocialForceParams {
    /// Relaxation time towards the desired velocity (s).
    pub tau: f64,
    /// Robot repulsion strength (m/s^2).
    pub robot_strength: f64,
    /// Robot repulsion range (m).
    pub robot_range: f64,
    /// Wall repulsion strength (m/s^2).
    pub wall_strength: f64,
    /// Wall repulsion range (m).
    pub wall_range: f64,
    /// Speed cap as a multiple of the desired speed.
    pub max_speed_factor: f64,
    /// Distance to goal below which the walker stops.
    pub arrival_radius: f64,
}

impl Default for SocialForceParams {
    fn default() -> Self {
        SocialForceParams {
            tau: 0.5,
            robot_strength: 2.0,
            robot_range: 0.3,
            wall_strength: 2.0,
            wall_range: 0.01,
            max_speed_factor: 1.3,
            arrival_radius: 0.05,
        }
    }
}

/// Parameters of the scripted same-side blocker.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct BlockerParams {
    /// Distance to the robot at which the blocker gives up and passes.
    pub commit_distance: f64,
    /// Lateral gap kept from the wall in a side lane (m).
    pub wall_margin: f64,
    /// Robot lateral offsets below this count as centred (m).
    pub centre_band: f64,
    /// Gain of the lateral lane tracking (1/s).
    pub lateral_gain: f64,
    /// Robot speed below which the blocker considers it stopped (m/s).
    pub yield_speed: f64,
}

impl Default for BlockerParams {
    fn default() -> Self {
        BlockerParams {
            commit_distance: 1.0,
            wall_margin: 0.03,
            centre_band: 0.05,
            lateral_gain: 4.0,
            yield_speed: 0.01,
        }
    }
}

/// A waypoint of a timed script.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TimedWaypoint {
    pub t: f64,
    pub x: f64,
    pub y: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub enum Behaviour {
    SocialForce,
    ScriptedWaypoints(Vec<TimedWaypoint>),
    /// Mirrors the robot's lateral side; once close it waits for the robot
    /// to stop and then passes on the free side.
    /// `passing` holds the side the blocker committed to.
    SameSideBlocker { passing: Option<Side> },
}

impl Behaviour {
    pub fn is_scripted(&self) -> bool {
        !matches!(self, Behaviour::SocialForce)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct PedestrianState {
    pub position: Point,
    pub velocity: Vector,
    pub goal: Point,
    pub desired_speed: f64,
    pub radius: f64,
    pub behaviour: Behaviour,
    /// Times the hard wall projection had to fire.
    pub projection_count: u32,
}

impl PedestrianState {
    pub fn new(
        position: Point,
        goal: Point,
        desired_speed: f64,
        radius: f64,
        behaviour: Behaviour,
    ) -> Result<Self> {
        if !(desired_speed > 0.0 && desired_speed <= 2.5) {
            return Err(Error::param(
                "desired_speed",
                format!("must lie in (0, 2.5] m/s, got {desired_speed}"),
            ));
        }
        if !(radius > 0.0) {
            return Err(Error::param("radius", "must be positive"));
        }
        if let Behaviour::ScriptedWaypoints(wps) = &behaviour {
            if wps.is_empty() || wps.windows(2).any(|w| !(w[1].t > w[0].t)) {
                return Err(Error::param(
                    "waypoints",
                    "need at least one waypoint with strictly increasing times",
                ));
            }
        }
        Ok(PedestrianState {
            position,
            velocity: Vector::zeros(),
            goal,
            desired_speed,
            radius,
            behaviour,
            projection_count: 0,
        })
    }

    pub fn speed(&self) -> f64 {
        self.velocity.norm()
    }
}

/// Exponential repulsion `strength * exp((contact - d) / range)` pushing
/// `p` away from `from`.
fn repulsion(p: Point, from: Point, contact: f64, strength: f64, range: f64, fallback: Vector) -> Vector {
    let diff = p - from;
    let d = diff.norm();
    let dir = if d > 1e-12 {
        diff / d
    } else {
        log::warn!("coincident centres at ({:.3}, {:.3}); using fallback direction", p.x, p.y);
        fallback
    };
    dir * (strength * ((contact - d) / range).exp())
}

/// Axis of the aisle containing `p`, or +x outside every aisle.
fn axis_at(world: &CorridorWorld, p: Point) -> Vector {
    world
        .aisle_of(p)
        .map(|i| world.aisles[i].axis())
        .unwrap_or_else(|| Vector::new(1.0, 0.0))
}

/// Social-force acceleration on `ped` excluding the goal relaxation term.
pub fn repulsive_acceleration(
    ped: &PedestrianState,
    robot: &RobotState,
    world: &CorridorWorld,
    params: &SocialForceParams,
) -> Vector {
    let fallback = axis_at(world, ped.position);
    let mut acc = repulsion(
        ped.position,
        robot.pose.position(),
        ped.radius + world.robot_radius,
        params.robot_strength,
        params.robot_range,
        fallback,
    );
    for wall in &world.walls {
        let q = wall.closest_point(ped.position);
        acc += repulsion(
            ped.position,
            q,
            ped.radius,
            params.wall_strength,
            params.wall_range,
            fallback,
        );
    }
    acc
}

/// Advances a social-force walker by `dt`.
///
/// The goal relaxation is integrated exactly under constant repulsion over the
/// step, then the speed is capped and the position updated with the new
/// velocity. A walker that would end inside a wall is projected back out and
/// the projection is counted.
pub fn social_force_step(
    ped: &PedestrianState,
    robot: &RobotState,
    world: &CorridorWorld,
    params: &SocialForceParams,
    dt: f64,
) -> Result<PedestrianState> {
    if !(dt > 0.0) {
        return Err(Error::param("dt", "must be positive"));
    }
    let to_goal = ped.goal - ped.position;
    let dist = to_goal.norm();
    let desired = if dist > params.arrival_radius {
        to_goal * (ped.desired_speed / dist)
    } else {
        Vector::zeros()
    };
    let force = repulsive_acceleration(ped, robot, world, params);

    // v' = (v_d - v)/tau + f  =>  v(t) = v_inf + (v0 - v_inf) e^{-t/tau}
    let v_inf = desired + force * params.tau;
    let mut velocity = v_inf + (ped.velocity - v_inf) * (-dt / params.tau).exp();
    let cap = params.max_speed_factor * ped.desired_speed;
    let speed = velocity.norm();
    if speed > cap {
        velocity *= cap / speed;
    }

    let mut next = ped.clone();
    next.position = ped.position + velocity * dt;
    next.velocity = velocity;
    project_out_of_walls(&mut next, world);
    Ok(next)
}

fn project_out_of_walls(ped: &mut PedestrianState, world: &CorridorWorld) {
    for wall in &world.walls {
        let q = wall.closest_point(ped.position);
        let diff = ped.position - q;
        let d = diff.norm();
        if d < ped.radius && d > 1e-12 {
            let n = diff / d;
            ped.position = q + n * ped.radius;
            let vn = ped.velocity.dot(&n);
            if vn < 0.0 {
                ped.velocity -= n * vn;
            }
            ped.projection_count += 1;
        }
    }
}

/// Advances a scripted pedestrian to time `t + dt`.
///
/// Waypoint scripts are followed exactly by linear interpolation. The
/// same-side blocker walks along the aisle towards its goal while mirroring
/// the side the robot is on; once within the commit distance it stops,
/// steps to the free side and then walks past.
pub fn scripted_step(
    ped: &PedestrianState,
    robot: &RobotState,
    world: &CorridorWorld,
    params: &BlockerParams,
    t: f64,
    dt: f64,
) -> Result<PedestrianState> {
    if !(dt > 0.0) {
        return Err(Error::param("dt", "must be positive"));
    }
    let mut next = ped.clone();
    match &ped.behaviour {
        Behaviour::SocialForce => {
            return Err(Error::param("behaviour", "social-force walker is not scripted"));
        }
        Behaviour::ScriptedWaypoints(wps) => {
            let p = interpolate(wps, t + dt);
            next.velocity = (p - ped.position) / dt;
            next.position = p;
        }
        Behaviour::SameSideBlocker { passing } => {
            let Some(aisle) = world.aisle_of(ped.position) else {
                next.velocity = Vector::zeros();
                return Ok(next);
            };
            let frame = world.frame(aisle, ped.goal - ped.position);
            let (s, l) = frame.to_local(ped.position);
            let (s_goal, _) = frame.to_local(ped.goal);
            if s_goal - s < 1e-9 {
                // end of the walk; the blocker stays where it is
                next.velocity = Vector::zeros();
                return Ok(next);
            }
            // lateral offsets are taken in the blocker's own travel frame
            let (_, robot_l) = frame.to_local(robot.pose.position());
            let lane = frame.half_width - ped.radius - params.wall_margin;

            let mut passing = *passing;
            let close = (robot.pose.position() - ped.position).norm() < params.commit_distance;
            if passing.is_none() && close {
                if robot.twist.speed() >= params.yield_speed {
                    next.velocity = Vector::zeros();
                    return Ok(next);
                }
                let robot_side = side_of(robot_l, params.centre_band).unwrap_or(Side::Right);
                passing = Some(robot_side.opposite());
            }
            let target_l = match passing {
                Some(side) => side.sign() * lane,
                None => side_of(robot_l, params.centre_band).map_or(0.0, |s| s.sign() * lane),
            };

            let v = ped.desired_speed;
            let err = target_l - l;
            let (v_s, v_l) = if passing.is_some() {
                let v_l = (params.lateral_gain * err).clamp(-v, v);
                let v_s = if err.abs() > 0.02 { 0.0 } else { (v * v - v_l * v_l).max(0.0).sqrt() };
                (v_s, v_l)
            } else {
                let v_l = (params.lateral_gain * err).clamp(-0.6 * v, 0.6 * v);
                ((v * v - v_l * v_l).sqrt(), v_l)
            };
            let v_s = v_s.min(((s_goal - s).max(0.0)) / dt);
            let velocity = frame.axis * v_s + frame.left() * v_l;
            next.position = ped.position + velocity * dt;
            next.velocity = velocity;
            next.behaviour = Behaviour::SameSideBlocker { passing };
        }
    }
    Ok(next)
}

/// Side of a lateral offset, `None` inside the centre band.
fn side_of(lateral: f64, band: f64) -> Option<Side> {
    if lateral > band {
        Some(Side::Left)
    } else if lateral < -band {
        Some(Side::Right)
    } else {
        None
    }
}

fn interpolate(wps: &[TimedWaypoint], t: f64) -> Point {
    let first = wps[0];
    let last = wps[wps.len() - 1];
    if t <= first.t {
        return Point::new(first.x, first.y);
    }
    if t >= last.t {
        return Point::new(last.x, last.y);
    }
    let i = wps.partition_point(|w| w.t <= t);
    let (a, b) = (wps[i - 1], wps[i]);
    let u = (t - a.t) / (b.t - a.t);
    Point::new(a.x + u * (b.x - a.x), a.y + u * (b.y - a.y))
}
