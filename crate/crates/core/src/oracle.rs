//! Brute-force reference computations used to cross-check the closed forms.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::geom::{heading_vector, rotate, Point, Pose2, Twist2, Vector};
use crate::kinematics::{integrate, KinematicLimits, RobotState};
use crate::perception::{relative_closing_speed, RangeSample, TrackedPerson};
use crate::planner::crossing_time;

/// Forward Euler integration of a constant body-frame twist.
pub fn euler_integrate(start: Pose2, body: Twist2, dt: f64, substeps: usize) -> Pose2 {
    let h = dt / substeps as f64;
    let (mut x, mut y, mut theta) = (start.x, start.y, start.heading);
    let v = body.linear();
    for _ in 0..substeps {
        let w = rotate(v, theta);
        x += w.x * h;
        y += w.y * h;
        theta += body.omega * h;
    }
    Pose2 { x, y, heading: theta }
}

/// Euler integration that evaluates the heading at each substep midpoint.
/// Second order, so it stays accurate for long horizons.
pub fn midpoint_integrate(start: Pose2, body: Twist2, dt: f64, substeps: usize) -> Pose2 {
    let h = dt / substeps as f64;
    let (mut x, mut y, mut theta) = (start.x, start.y, start.heading);
    let v = body.linear();
    for _ in 0..substeps {
        let w = rotate(v, theta + 0.5 * body.omega * h);
        x += w.x * h;
        y += w.y * h;
        theta += body.omega * h;
    }
    Pose2 { x, y, heading: theta }
}

/// Position error of the exact integrator against [`euler_integrate`].
pub fn integration_error(start: Pose2, body: Twist2, dt: f64, substeps: usize) -> f64 {
    let limits = KinematicLimits {
        v_max: f64::INFINITY,
        omega_max: f64::INFINITY,
        ..KinematicLimits::default()
    };
    let exact = integrate(&RobotState::at_rest(start, limits), body, dt)
        .expect("finite twist")
        .pose;
    let euler = euler_integrate(start, body, dt, substeps);
    (exact.position() - euler.position()).norm()
}

/// Time until two agents moving at constant velocity pass each other, found
/// by stepping at `h` until their separation along the robot's velocity
/// changes sign. Linear interpolation inside the last step.
pub fn simulated_crossing_time(robot: Point, robot_vel: Vector, person: Point, person_vel: Vector, h: f64, horizon: f64) -> Option<f64> {
    let axis = if robot_vel.norm() > 0.0 {
        robot_vel.normalize()
    } else {
        (person - robot).normalize()
    };
    let sep = |t: f64| ((person + person_vel * t) - (robot + robot_vel * t)).dot(&axis);
    let mut t = 0.0;
    let mut prev = sep(0.0);
    if prev <= 0.0 {
        return Some(0.0);
    }
    while t < horizon {
        let next_t = t + h;
        let cur = sep(next_t);
        if cur <= 0.0 {
            return Some(t + h * prev / (prev - cur));
        }
        prev = cur;
        t = next_t;
    }
    None
}

/// Crossing time predicted from a sampled track history with the planner's
/// formula, for a head-on constant-velocity encounter.
pub fn predicted_crossing_time(robot: Point, robot_vel: Vector, person: Point, person_vel: Vector, window: f64) -> Option<f64> {
    let rate = 10.0;
    let n = (window * rate).round() as usize;
    let history = (0..=n)
        .map(|k| {
            let t = -((n - k) as f64) / rate;
            RangeSample {
                t,
                person: person + person_vel * t,
                observer: robot + robot_vel * t,
            }
        })
        .collect();
    let track = TrackedPerson {
        id: 0,
        position_estimate: person,
        velocity_estimate: person_vel,
        position_spread: 0.0,
        last_seen_tick: 0,
        history,
    };
    let v_r = relative_closing_speed(&track, window)?;
    crossing_time((person - robot).norm(), v_r).ok().flatten()
}

/// Time to cover `distance` from rest to rest with a trapezoidal speed
/// profile.
pub fn trapezoid_time(distance: f64, v_max: f64, a_max: f64) -> f64 {
    if distance <= v_max * v_max / a_max {
        2.0 * (distance / a_max).sqrt()
    } else {
        distance / v_max + v_max / a_max
    }
}

#[derive(Debug, Clone)]
pub struct OracleCheck {
    pub name: &'static str,
    pub passed: bool,
    pub detail: String,
}

/// Largest exact-vs-Euler position error over `count` random twists.
pub fn random_twist_max_error(count: usize, substeps: usize, seed: u64) -> f64 {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..count)
        .map(|_| {
            let start = Pose2 {
                x: rng.random_range(-5.0..5.0),
                y: rng.random_range(-5.0..5.0),
                heading: rng.random_range(-3.1..3.1),
            };
            let body = Twist2::new(
                rng.random_range(-1.0..1.0),
                rng.random_range(-1.0..1.0),
                rng.random_range(-1.0..1.0),
            );
            let dt = rng.random_range(0.01..0.1);
            integration_error(start, body, dt, substeps)
        })
        .fold(0.0, f64::max)
}

/// Largest gap between predicted and simulated crossing times over `count`
/// random head-on encounters.
pub fn random_crossing_max_error(count: usize, seed: u64) -> f64 {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..count)
        .map(|_| {
            let heading: f64 = rng.random_range(-3.1..3.1);
            let axis = heading_vector(heading);
            let robot = Point::new(rng.random_range(-2.0..2.0), rng.random_range(-2.0..2.0));
            let d = rng.random_range(0.5..8.0);
            let person = robot + axis * d;
            let robot_vel = axis * rng.random_range(0.0..1.5);
            let person_vel = -axis * rng.random_range(0.5..1.6);
            let predicted = predicted_crossing_time(robot, robot_vel, person, person_vel, 0.5).expect("closing");
            let simulated =
                simulated_crossing_time(robot, robot_vel, person, person_vel, 1e-4, 60.0).expect("crossing");
            (predicted - simulated).abs()
        })
        .fold(0.0, f64::max)
}

/// All brute-force checks, as run by the `oracle` command.
pub fn run_all() -> Vec<OracleCheck> {
    let mut out = Vec::new();

    let err = random_twist_max_error(200, 100_000, 7);
    out.push(OracleCheck {
        name: "twist integration vs 1e5-step Euler",
        passed: err < 1e-6,
        detail: format!("max position error {err:.3e} m over 200 twists"),
    });

    let arc = midpoint_integrate(Pose2::default(), Twist2::new(1.0, 0.0, std::f64::consts::FRAC_PI_2), 1.0, 100_000);
    let two_over_pi = 2.0 / std::f64::consts::PI;
    let arc_err = (arc.position() - Point::new(two_over_pi, two_over_pi)).norm();
    out.push(OracleCheck {
        name: "quarter arc vs 1e5-step midpoint",
        passed: arc_err < 1e-6,
        detail: format!("error {arc_err:.3e} m"),
    });

    let cross = random_crossing_max_error(200, 11);
    out.push(OracleCheck {
        name: "t_cross vs fine-step crossing simulation",
        passed: cross < 1e-3,
        detail: format!("max gap {cross:.3e} s over 200 encounters"),
    });

    let exact = crossing_time(3.6, 2.0).ok().flatten();
    out.push(OracleCheck {
        name: "crossing_time(3.6, 2.0)",
        passed: exact == Some(1.8),
        detail: format!("{exact:?}"),
    });

    out
}
