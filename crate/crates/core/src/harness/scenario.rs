//! Scenario files.
//!
//! A scenario is a TOML document with a `schema = 1` guard and sections for
//! the world, the robot, the pedestrians, the experimental condition and
//! optional parameter overrides. Unknown keys are rejected.

use std::path::Path as FsPath;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::clock::SimClock;
use crate::error::{Error, Result};
use crate::geom::{Point, Pose2, Vector};
use crate::kinematics::KinematicLimits;
use crate::navigator::NavigatorGains;
use crate::pedestrian::{Behaviour, BlockerParams, PedestrianState, SocialForceParams, TimedWaypoint};
use crate::perception::TrackerConfig;
use crate::planner::PlannerConfig;
use crate::world::CorridorWorld;

pub const SCHEMA_VERSION: u32 = 1;

/// Stream of the perturbation generator, apart from sensor and tracker noise.
const PERTURB_STREAM: u64 = u64::MAX - 1;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum WorldPreset {
    Store,
    Single,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct WorldSpec {
    pub preset: WorldPreset,
    pub aisle_width: f64,
    pub aisle_length: f64,
    pub shelf_depth: f64,
    pub cross_width: f64,
    pub robot_radius: f64,
    pub person_radius: f64,
}

impl Default for WorldSpec {
    fn default() -> Self {
        WorldSpec {
            preset: WorldPreset::Store,
            aisle_width: 0.95,
            aisle_length: 8.0,
            shelf_depth: 0.6,
            cross_width: 1.2,
            robot_radius: 0.27,
            person_radius: 0.15,
        }
    }
}

impl WorldSpec {
    pub fn build(&self) -> Result<CorridorWorld> {
        match self.preset {
            WorldPreset::Store => CorridorWorld::store(
                self.aisle_length,
                self.aisle_width,
                self.shelf_depth,
                self.cross_width,
                self.robot_radius,
                self.person_radius,
            ),
            WorldPreset::Single => {
                CorridorWorld::single_aisle(self.aisle_length, self.aisle_width, self.robot_radius, self.person_radius)
            }
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RobotSpec {
    /// `[x, y, heading]`
    pub start: [f64; 3],
    pub goal: [f64; 2],
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BehaviourKind {
    SocialForce,
    SameSideBlocker,
    Waypoints,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PedestrianSpec {
    pub start: [f64; 2],
    pub goal: [f64; 2],
    #[serde(default = "default_walking_speed")]
    pub speed: f64,
    #[serde(default = "default_behaviour")]
    pub behaviour: BehaviourKind,
    /// `[t, x, y]` rows for the waypoint behaviour.
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub waypoints: Vec<[f64; 3]>,
}

fn default_walking_speed() -> f64 {
    1.2
}

fn default_behaviour() -> BehaviourKind {
    BehaviourKind::SocialForce
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Condition {
    pub rotation: bool,
    pub slide: bool,
}

impl Default for Condition {
    fn default() -> Self {
        Condition {
            rotation: true,
            slide: true,
        }
    }
}

impl Condition {
    /// The four conditions in suite order.
    pub const ALL: [Condition; 4] = [
        Condition { rotation: true, slide: true },
        Condition { rotation: true, slide: false },
        Condition { rotation: false, slide: true },
        Condition { rotation: false, slide: false },
    ];

    pub fn label(&self) -> String {
        format!(
            "rot_{}_slide_{}",
            if self.rotation { "on" } else { "off" },
            if self.slide { "on" } else { "off" }
        )
    }
}

/// Per-seed randomisation of the pedestrians.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Perturbation {
    /// Walking speed drawn uniformly from `[min, max]` (m/s).
    pub speed: Option<[f64; 2]>,
    /// Offset added to the start and goal, perpendicular to the walking
    /// direction, drawn uniformly from `[min, max]` (m).
    pub lateral: Option<[f64; 2]>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SimSettings {
    pub dt_physics: f64,
    pub planner_period: f64,
}

impl Default for SimSettings {
    fn default() -> Self {
        SimSettings {
            dt_physics: SimClock::DEFAULT_DT,
            planner_period: SimClock::PLANNER_PERIOD,
        }
    }
}

fn default_duration() -> f64 {
    60.0
}

/// On-disk layout of a scenario file.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioFile {
    pub schema: u32,
    #[serde(default)]
    pub seed: u64,
    #[serde(default = "default_duration")]
    pub duration_limit: f64,
    #[serde(default)]
    pub world: WorldSpec,
    pub robot: RobotSpec,
    #[serde(default)]
    pub pedestrians: Vec<PedestrianSpec>,
    #[serde(default)]
    pub condition: Condition,
    #[serde(default)]
    pub perturb: Perturbation,
    #[serde(default)]
    pub planner: PlannerConfig,
    #[serde(default)]
    pub navigator: NavigatorGains,
    #[serde(default)]
    pub limits: KinematicLimits,
    #[serde(default)]
    pub tracker: TrackerConfig,
    #[serde(default)]
    pub social_force: SocialForceParams,
    #[serde(default)]
    pub blocker: BlockerParams,
    #[serde(default)]
    pub sim: SimSettings,
}

/// A validated scenario ready to run.
#[derive(Debug, Clone, PartialEq)]
pub struct Scenario {
    pub spec: ScenarioFile,
    pub world: CorridorWorld,
}

impl Scenario {
    pub fn from_toml_str(text: &str) -> Result<Self> {
        let spec: ScenarioFile = toml::from_str(text)?;
        Self::from_spec(spec)
    }

    pub fn load(path: impl AsRef<FsPath>) -> Result<Self> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Self::from_toml_str(&text)
    }

    pub fn from_spec(spec: ScenarioFile) -> Result<Self> {
        if spec.schema != SCHEMA_VERSION {
            return Err(Error::Scenario(format!(
                "unsupported schema {} (expected {SCHEMA_VERSION})",
                spec.schema
            )));
        }
        if !(spec.duration_limit > 0.0) || !spec.duration_limit.is_finite() {
            return Err(Error::Scenario("duration_limit must be positive".into()));
        }
        let goal = Point::new(spec.robot.goal[0], spec.robot.goal[1]);
        let world = spec
            .world
            .build()?
            .with_goals(vec![goal])
            .map_err(|_| Error::Scenario(format!("robot goal ({}, {}) is outside the world", goal.x, goal.y)))?;
        let start = Point::new(spec.robot.start[0], spec.robot.start[1]);
        if world.aisle_of(start).is_none() {
            return Err(Error::Scenario("robot start is outside every aisle".into()));
        }
        Pose2::new(spec.robot.start[0], spec.robot.start[1], spec.robot.start[2])?;
        spec.limits.validate()?;
        spec.planner.validate(world.robot_radius, spec.limits.omega_max)?;
        spec.navigator.validate(world.robot_radius)?;
        spec.tracker.validate()?;
        SimClock::new(spec.sim.dt_physics, spec.sim.planner_period)?;
        for range in [spec.perturb.speed, spec.perturb.lateral].into_iter().flatten() {
            if !(range[0] <= range[1]) {
                return Err(Error::Scenario(format!("perturbation range {range:?} is empty")));
            }
        }
        let sc = Scenario { spec, world };
        // checks the unperturbed layout; perturbed layouts are checked per run
        sc.pedestrians()?;
        Ok(sc)
    }

    pub fn to_toml_string(&self) -> Result<String> {
        toml::to_string(&self.spec).map_err(|e| Error::Scenario(e.to_string()))
    }

    pub fn seed(&self) -> u64 {
        self.spec.seed
    }

    pub fn condition(&self) -> Condition {
        self.spec.condition
    }

    pub fn with_seed(mut self, seed: u64) -> Self {
        self.spec.seed = seed;
        self
    }

    pub fn with_condition(mut self, condition: Condition) -> Self {
        self.spec.condition = condition;
        self
    }

    pub fn robot_start(&self) -> Pose2 {
        let s = self.spec.robot.start;
        Pose2 {
            x: s[0],
            y: s[1],
            heading: crate::geom::wrap_angle(s[2]),
        }
    }

    pub fn robot_goal(&self) -> Point {
        Point::new(self.spec.robot.goal[0], self.spec.robot.goal[1])
    }

    /// Planner configuration with the scenario's condition applied.
    pub fn planner_config(&self) -> PlannerConfig {
        PlannerConfig {
            rotation_enabled: self.spec.condition.rotation,
            slide_enabled: self.spec.condition.slide,
            ..self.spec.planner
        }
    }

    /// Speed and lateral offset drawn for the current seed. The draw depends
    /// on the seed only, so every condition sees the same perturbation.
    pub fn perturbation(&self) -> (Option<f64>, f64) {
        let mut rng = ChaCha8Rng::seed_from_u64(self.spec.seed);
        rng.set_stream(PERTURB_STREAM);
        let draw = |rng: &mut ChaCha8Rng, r: [f64; 2]| {
            let u: f64 = rng.random();
            r[0] + u * (r[1] - r[0])
        };
        let speed = self.spec.perturb.speed.map(|r| draw(&mut rng, r));
        let lateral = self.spec.perturb.lateral.map_or(0.0, |r| draw(&mut rng, r));
        (speed, lateral)
    }

    /// Initial pedestrian states for the current seed.
    pub fn pedestrians(&self) -> Result<Vec<PedestrianState>> {
        let (speed, lateral) = self.perturbation();
        let robot = self.robot_start().position();
        let radius = self.world.person_radius;
        let mut out = Vec::with_capacity(self.spec.pedestrians.len());
        for (i, p) in self.spec.pedestrians.iter().enumerate() {
            let start = Point::new(p.start[0], p.start[1]);
            let goal = Point::new(p.goal[0], p.goal[1]);
            let dir = goal - start;
            let normal = if dir.norm() > 1e-9 {
                Vector::new(-dir.y, dir.x) / dir.norm()
            } else {
                Vector::zeros()
            };
            let start = start + normal * lateral;
            let goal = goal + normal * lateral;
            let behaviour = match p.behaviour {
                BehaviourKind::SocialForce => Behaviour::SocialForce,
                BehaviourKind::SameSideBlocker => Behaviour::SameSideBlocker { passing: None },
                BehaviourKind::Waypoints => Behaviour::ScriptedWaypoints(
                    p.waypoints
                        .iter()
                        .map(|w| TimedWaypoint { t: w[0], x: w[1], y: w[2] })
                        .collect(),
                ),
            };
            let ped = PedestrianState::new(start, goal, speed.unwrap_or(p.speed), radius, behaviour)?;
            if (start - robot).norm() < self.world.robot_radius + radius {
                return Err(Error::Scenario(format!("pedestrian {i} starts overlapping the robot")));
            }
            for (j, other) in out.iter().enumerate() {
                let other: &PedestrianState = other;
                if (other.position - start).norm() < 2.0 * radius {
                    return Err(Error::Scenario(format!("pedestrians {j} and {i} start overlapping")));
                }
            }
            let gap = self.world.wall_distance(start)?;
            if gap < radius {
                return Err(Error::Scenario(format!("pedestrian {i} starts inside a wall")));
            }
            out.push(ped);
        }
        Ok(out)
    }

    /// Built-in scenario: head-on crossing in the first store aisle.
    pub fn nominal() -> Self {
        Self::from_toml_str(NOMINAL).expect("built-in scenario is valid")
    }

    /// Built-in scenario: the nominal crossing with seeded speed and lateral jitter.
    pub fn perturbed() -> Self {
        Self::from_toml_str(PERTURBED).expect("built-in scenario is valid")
    }

    /// Built-in scenario: no pedestrians.
    pub fn empty_corridor() -> Self {
        Self::from_toml_str(EMPTY).expect("built-in scenario is valid")
    }

    /// Built-in scenario: a walker that keeps to the robot's side.
    pub fn same_side_blocker() -> Self {
        Self::from_toml_str(BLOCKER).expect("built-in scenario is valid")
    }
}

const NOMINAL: &str = include_str!("../../../../scenarios/nominal.toml");
const PERTURBED: &str = include_str!("../../../../scenarios/perturbed.toml");
const EMPTY: &str = include_str!("../../../../scenarios/empty.toml");
const BLOCKER: &str = include_str!("../../../../scenarios/blocker.toml");

#[cfg(test)]
mod tests {
    use super::*;

    const MINIMAL: &str = r#"
schema = 1
[robot]
start = [0.5, 0.0, 0.0]
goal = [7.5, 0.0]
"#;

    #[test]
    fn minimal_file_uses_defaults() {
        let sc = Scenario::from_toml_str(MINIMAL).unwrap();
        assert_eq!(sc.spec.duration_limit, 60.0);
        assert_eq!(sc.condition(), Condition::default());
        assert_eq!(sc.world.aisles.len(), 2);
        assert!(sc.pedestrians().unwrap().is_empty());
    }

    #[test]
    fn wrong_schema_rejected() {
        let text = MINIMAL.replace("schema = 1", "schema = 2");
        assert!(matches!(Scenario::from_toml_str(&text), Err(Error::Scenario(_))));
    }

    #[test]
    fn unknown_key_rejected() {
        let text = format!("{MINIMAL}\n[planner]\nstep_trigger = 3.0\n");
        assert!(matches!(Scenario::from_toml_str(&text), Err(Error::Parse(_))));
    }

    #[test]
    fn goal_outside_world_rejected() {
        let text = MINIMAL.replace("goal = [7.5, 0.0]", "goal = [7.5, 0.9]");
        assert!(Scenario::from_toml_str(&text).is_err());
    }

    #[test]
    fn overlapping_start_rejected() {
        let text = format!("{MINIMAL}\n[[pedestrians]]\nstart = [0.7, 0.0]\ngoal = [7.0, 0.0]\n");
        assert!(Scenario::from_toml_str(&text).is_err());
    }

    #[test]
    fn zero_duration_rejected() {
        let text = MINIMAL.replace("schema = 1", "schema = 1\nduration_limit = 0.0");
        assert!(Scenario::from_toml_str(&text).is_err());
    }

    #[test]
    fn overrides_are_applied() {
        let text = format!("{MINIMAL}\n[planner]\nstep_trigger_distance = 3.0\n[condition]\nslide = false\n");
        let sc = Scenario::from_toml_str(&text).unwrap();
        let cfg = sc.planner_config();
        assert_eq!(cfg.step_trigger_distance, 3.0);
        assert!(!cfg.slide_enabled && cfg.rotation_enabled);
    }

    #[test]
    fn perturbation_depends_on_seed_only() {
        let sc = Scenario::perturbed();
        let a = sc.clone().with_seed(5).with_condition(Condition::ALL[3]).pedestrians().unwrap();
        let b = sc.clone().with_seed(5).pedestrians().unwrap();
        let c = sc.with_seed(6).pedestrians().unwrap();
        assert_eq!(a, b);
        assert_ne!(a, c);
    }

    #[test]
    fn builtins_load() {
        assert_eq!(Scenario::nominal().spec.pedestrians.len(), 1);
        assert!(Scenario::empty_corridor().spec.pedestrians.is_empty());
        assert_eq!(Scenario::same_side_blocker().spec.pedestrians[0].behaviour, BehaviourKind::SameSideBlocker);
    }

    #[test]
    fn round_trip_through_toml() {
        let sc = Scenario::nominal();
        let again = Scenario::from_toml_str(&sc.to_toml_string().unwrap()).unwrap();
        assert_eq!(sc, again);
    }
}
