use std::collections::VecDeque;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geom::{Point, Vector};

use super::Scan;

/// History kept per track, longer than any closing-speed window in use.
const HISTORY_SECONDS: f64 = 2.0;
/// Association gate used in perfect mode.
const PERFECT_GATE: f64 = 1.0;
/// Lower bound on the likelihood width so zero-noise configs stay finite.
const MIN_LIKELIHOOD_SIGMA: f64 = 0.01;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct TrackerConfig {
    pub particle_count: usize,
    /// Position diffusion (m/sqrt(s)).
    pub process_noise_pos: f64,
    /// Velocity diffusion (m/s/sqrt(s)).
    pub process_noise_vel: f64,
    /// Detection noise standard deviation (m).
    pub measurement_noise: f64,
    pub sensor_range: f64,
    pub update_rate: f64,
    /// Coasting time after the last detection before a track is dropped (s).
    pub drop_timeout: f64,
    /// Velocity spread of newly spawned particles (m/s).
    pub birth_velocity_std: f64,
    /// Gate half-width in units of `measurement_noise`, before adding the
    /// track spread.
    pub gate_sigmas: f64,
    /// Exact detections, no occlusion, no filtering.
    pub perfect: bool,
}

impl Default for TrackerConfig {
    fn default() -> Self {
        TrackerConfig {
            particle_count: 300,
            process_noise_pos: 0.08,
            process_noise_vel: 0.6,
            measurement_noise: 0.05,
            sensor_range: 20.0,
            update_rate: 10.0,
            drop_timeout: 1.0,
            birth_velocity_std: 1.0,
            gate_sigmas: 5.0,
            perfect: false,
        }
    }
}

impl TrackerConfig {
    pub fn perfect() -> Self {
        TrackerConfig {
            measurement_noise: 0.0,
            perfect: true,
            ..TrackerConfig::default()
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.particle_count < 100 {
            return Err(Error::param("particle_count", "at least 100 particles are required"));
        }
        let non_negative = [
            ("process_noise_pos", self.process_noise_pos),
            ("process_noise_vel", self.process_noise_vel),
            ("measurement_noise", self.measurement_noise),
            ("birth_velocity_std", self.birth_velocity_std),
        ];
        for (name, v) in non_negative {
            if !(v >= 0.0) {
                return Err(Error::param(name, "must be non-negative"));
            }
        }
        let positive = [
            ("sensor_range", self.sensor_range),
            ("update_rate", self.update_rate),
            ("drop_timeout", self.drop_timeout),
            ("gate_sigmas", self.gate_sigmas),
        ];
        for (name, v) in positive {
            if !(v > 0.0) {
                return Err(Error::param(name, "must be positive"));
            }
        }
        Ok(())
    }
}

/// Person position estimate and observer position at one tracker update.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RangeSample {
    pub t: f64,
    pub person: Point,
    pub observer: Point,
}

/// Snapshot of one track after an update.
#[derive(Debug, Clone, PartialEq)]
pub struct TrackedPerson {
    pub id: u64,
    pub position_estimate: Point,
    pub velocity_estimate: Vector,
    /// RMS particle distance from the mean position (m).
    pub position_spread: f64,
    pub last_seen_tick: u64,
    /// Recent estimates, oldest first.
    pub history: Vec<RangeSample>,
}

#[derive(Debug, Clone, Copy)]
struct Particle {
    pos: Point,
    vel: Vector,
}

#[derive(Debug, Clone)]
struct Track {
    id: u64,
    particles: Vec<Particle>,
    position: Point,
    velocity: Vector,
    spread: f64,
    last_seen_time: f64,
    last_seen_tick: u64,
    history: VecDeque<RangeSample>,
}

impl Track {
    fn refresh_estimate(&mut self) {
        if self.particles.is_empty() {
            return;
        }
        let n = self.particles.len() as f64;
        let (mut pos, mut vel) = (Point::zeros(), Vector::zeros());
        for p in &self.particles {
            pos += p.pos;
            vel += p.vel;
        }
        pos /= n;
        vel /= n;
        let var = self
            .particles
            .iter()
            .map(|p| (p.pos - pos).norm_squared())
            .sum::<f64>()
            / n;
        self.position = pos;
        self.velocity = vel;
        self.spread = var.sqrt();
    }

    fn snapshot(&self) -> TrackedPerson {
        TrackedPerson {
            id: self.id,
            position_estimate: self.position,
            velocity_estimate: self.velocity,
            position_spread: self.spread,
            last_seen_tick: self.last_seen_tick,
            history: self.history.iter().copied().collect(),
        }
    }
}

/// Multi-person tracker: one constant-velocity particle filter per track,
/// greedy nearest-neighbour association with gating.
#[derive(Debug, Clone)]
pub struct Tracker {
    cfg: TrackerConfig,
    tracks: Vec<Track>,
    next_id: u64,
    rng: ChaCha8Rng,
    time: f64,
}

impl Tracker {
    pub fn new(cfg: TrackerConfig, seed: u64) -> Result<Self> {
        cfg.validate()?;
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        // keep the tracker stream apart from the sensor streams
        rng.set_stream(u64::MAX);
        Ok(Tracker {
            cfg,
            tracks: Vec::new(),
            next_id: 0,
            rng,
            time: 0.0,
        })
    }

    pub fn config(&self) -> &TrackerConfig {
        &self.cfg
    }

    /// Current tracks, ordered by id.
    pub fn tracks(&self) -> Vec<TrackedPerson> {
        self.tracks.iter().map(Track::snapshot).collect()
    }

    /// Predicts every track by `dt`, corrects with `scan` and returns the
    /// surviving tracks. An empty scan is a pure coasting step.
    pub fn update(&mut self, scan: &Scan, dt: f64) -> Result<Vec<TrackedPerson>> {
        if !(dt > 0.0) {
            return Err(Error::param("dt", "must be positive"));
        }
        self.time += dt;
        if !self.cfg.perfect {
            for i in 0..self.tracks.len() {
                self.predict(i, dt);
            }
        }

        let assignment = self.associate(scan);
        let mut detection_used = vec![false; scan.detections.len()];
        for (ti, det) in assignment.iter().enumerate() {
            let Some(di) = *det else { continue };
            detection_used[di] = true;
            let z = scan.detections[di].position;
            if self.cfg.perfect {
                let track = &mut self.tracks[ti];
                let elapsed = self.time - track.last_seen_time;
                track.velocity = (z - track.position) / elapsed;
                track.position = z;
            } else {
                self.correct(ti, z);
            }
            let track = &mut self.tracks[ti];
            track.last_seen_time = self.time;
            track.last_seen_tick = scan.tick;
        }

        let timeout = self.cfg.drop_timeout;
        let now = self.time;
        self.tracks.retain(|t| now - t.last_seen_time <= timeout + 1e-9);

        for (di, det) in scan.detections.iter().enumerate() {
            if !detection_used[di] {
                self.spawn(det.position, scan.tick);
            }
        }

        for track in &mut self.tracks {
            track.history.push_back(RangeSample {
                t: now,
                person: track.position,
                observer: scan.observer,
            });
            while track
                .history
                .front()
                .is_some_and(|s| s.t < now - HISTORY_SECONDS)
            {
                track.history.pop_front();
            }
        }
        Ok(self.tracks())
    }

    fn gate(&self, track: &Track) -> f64 {
        if self.cfg.perfect {
            PERFECT_GATE
        } else {
            self.cfg.gate_sigmas * self.cfg.measurement_noise.max(MIN_LIKELIHOOD_SIGMA) + track.spread
        }
    }

    /// Greedy nearest-neighbour assignment, closest pairs first; ties broken
    /// by track then detection index.
    fn associate(&self, scan: &Scan) -> Vec<Option<usize>> {
        let mut pairs = Vec::new();
        for (ti, track) in self.tracks.iter().enumerate() {
            let gate = self.gate(track);
            for (di, det) in scan.detections.iter().enumerate() {
                let d = (det.position - track.position).norm();
                if d <= gate {
                    pairs.push((d, ti, di));
                }
            }
        }
        pairs.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)).then(a.2.cmp(&b.2)));
        let mut out = vec![None; self.tracks.len()];
        let mut used = vec![false; scan.detections.len()];
        for (_, ti, di) in pairs {
            if out[ti].is_none() && !used[di] {
                out[ti] = Some(di);
                used[di] = true;
            }
        }
        out
    }

    fn predict(&mut self, index: usize, dt: f64) {
        let sp = self.cfg.process_noise_pos * dt.sqrt();
        let sv = self.cfg.process_noise_vel * dt.sqrt();
        let rng = &mut self.rng;
        let track = &mut self.tracks[index];
        for p in &mut track.particles {
            let n: [f64; 4] = [
                rng.sample(StandardNormal),
                rng.sample(StandardNormal),
                rng.sample(StandardNormal),
                rng.sample(StandardNormal),
            ];
            p.pos += p.vel * dt + Vector::new(n[0], n[1]) * sp;
            p.vel += Vector::new(n[2], n[3]) * sv;
        }
        track.refresh_estimate();
    }

    /// Gaussian reweighting against `z` followed by systematic resampling.
    fn correct(&mut self, index: usize, z: Point) {
        let sigma = self.cfg.measurement_noise.max(MIN_LIKELIHOOD_SIGMA);
        let inv = 1.0 / (2.0 * sigma * sigma);
        let track = &mut self.tracks[index];
        let log_w: Vec<f64> = track
            .particles
            .iter()
            .map(|p| -(p.pos - z).norm_squared() * inv)
            .collect();
        let max = log_w.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        let w: Vec<f64> = log_w.iter().map(|l| (l - max).exp()).collect();
        let total: f64 = w.iter().sum();

        let n = track.particles.len();
        let step = total / n as f64;
        let mut target = self.rng.random::<f64>() * step;
        let mut resampled = Vec::with_capacity(n);
        let mut cumulative = w[0];
        let mut i = 0;
        for _ in 0..n {
            while target > cumulative && i + 1 < n {
                i += 1;
                cumulative += w[i];
            }
            resampled.push(track.particles[i]);
            target += step;
        }
        track.particles = resampled;
        track.refresh_estimate();
    }

    fn spawn(&mut self, z: Point, tick: u64) {
        let id = self.next_id;
        self.next_id += 1;
        let particles = if self.cfg.perfect {
            Vec::new()
        } else {
            let sp = self.cfg.measurement_noise.max(MIN_LIKELIHOOD_SIGMA);
            let sv = self.cfg.birth_velocity_std;
            (0..self.cfg.particle_count)
                .map(|_| {
                    let n: [f64; 4] = [
                        self.rng.sample(StandardNormal),
                        self.rng.sample(StandardNormal),
                        self.rng.sample(StandardNormal),
                        self.rng.sample(StandardNormal),
                    ];
                    Particle {
                        pos: z + Vector::new(n[0], n[1]) * sp,
                        vel: Vector::new(n[2], n[3]) * sv,
                    }
                })
                .collect()
        };
        let mut track = Track {
            id,
            particles,
            position: z,
            velocity: Vector::zeros(),
            spread: 0.0,
            last_seen_time: self.time,
            last_seen_tick: tick,
            history: VecDeque::new(),
        };
        track.refresh_estimate();
        self.tracks.push(track);
    }
}
