use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::geom::Point;
use crate::kinematics::RobotState;
use crate::pedestrian::PedestrianState;
use crate::world::CorridorWorld;

use super::TrackerConfig;

/// A position-level person detection.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Detection {
    pub position: Point,
    pub tick: u64,
}

/// One sensor sweep: the detections plus where the sensor was.
#[derive(Debug, Clone, PartialEq)]
pub struct Scan {
    pub tick: u64,
    pub observer: Point,
    pub detections: Vec<Detection>,
}

/// Detects every pedestrian within sensor range and in line of sight.
///
/// Noise is isotropic Gaussian with standard deviation
/// `cfg.measurement_noise`, drawn from a generator keyed on `(seed, tick)` so
/// repeated calls for the same tick are identical. In perfect mode there is
/// neither noise nor occlusion.
pub fn sense(
    world: &CorridorWorld,
    robot: &RobotState,
    pedestrians: &[PedestrianState],
    cfg: &TrackerConfig,
    seed: u64,
    tick: u64,
) -> Scan {
    let observer = robot.pose.position();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(tick);
    let sigma = if cfg.perfect { 0.0 } else { cfg.measurement_noise };

    let detections = pedestrians
        .iter()
        .filter_map(|p| {
            // one draw pair per pedestrian, visible or not, so a miss does not
            // shift the noise of the others
            let nx: f64 = rng.sample(StandardNormal);
            let ny: f64 = rng.sample(StandardNormal);
            let in_range = (p.position - observer).norm() <= cfg.sensor_range;
            let visible = cfg.perfect || world.line_of_sight(observer, p.position);
            (in_range && visible).then(|| Detection {
                position: p.position + Point::new(nx, ny) * sigma,
                tick,
            })
        })
        .collect();

    Scan {
        tick,
        observer,
        detections,
    }
}
