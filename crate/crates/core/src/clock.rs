//! Fixed-timestep simulation clock.

use crate::error::{Error, Result};

/// Physics runs every `dt_physics`; perception and planning run every
/// `planner_period`, which must be an integer multiple of `dt_physics`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SimClock {
    pub tick_index: u64,
    pub dt_physics: f64,
    pub planner_period: f64,
    substeps: u64,
}

impl SimClock {
    pub const DEFAULT_DT: f64 = 0.01;
    pub const PLANNER_PERIOD: f64 = 0.1;

    pub fn new(dt_physics: f64, planner_period: f64) -> Result<Self> {
        if !(dt_physics > 0.0) || !(planner_period > 0.0) {
            return Err(Error::param("dt_physics", "timesteps must be positive"));
        }
        let ratio = planner_period / dt_physics;
        let substeps = ratio.round();
        if substeps < 1.0 || (ratio - substeps).abs() > 1e-9 {
            return Err(Error::param(
                "dt_physics",
                format!("{dt_physics} s does not divide the planner period {planner_period} s"),
            ));
        }
        Ok(SimClock {
            tick_index: 0,
            dt_physics,
            planner_period,
            substeps: substeps as u64,
        })
    }

    /// Physics ticks per planner period.
    pub fn substeps(&self) -> u64 {
        self.substeps
    }

    /// Simulated time of the current tick, derived from the integer index so
    /// no rounding error accumulates.
    pub fn time(&self) -> f64 {
        self.tick_index as f64 * self.dt_physics
    }

    pub fn is_planner_tick(&self) -> bool {
        self.tick_index % self.substeps == 0
    }

    pub fn advance(&mut self) {
        self.tick_index += 1;
    }
}

impl Default for SimClock {
    fn default() -> Self {
        SimClock::new(Self::DEFAULT_DT, Self::PLANNER_PERIOD).expect("default clock is valid")
    }
}
