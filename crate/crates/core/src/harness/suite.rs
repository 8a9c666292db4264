//! The 2x2 condition grid over many seeds.

use std::fmt::Write as _;
use std::path::Path as FsPath;

use rayon::prelude::*;

use crate::error::{Error, Result};

use super::export::{export_csv, fmt_sig};
use super::metrics::CrossingMetrics;
use super::scenario::{Condition, Scenario};
use super::sim::{run_scenario, Outcome};

#[derive(Debug, Clone, PartialEq)]
pub struct RunRecord {
    pub condition: Condition,
    pub seed: u64,
    pub metrics: CrossingMetrics,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ConditionSummary {
    pub condition: Condition,
    pub runs: usize,
    pub collisions: usize,
    pub timeouts: usize,
    pub mean_traversal_time: Option<f64>,
    pub min_clearance: f64,
    pub mean_min_clearance: f64,
    pub limit_violations: u32,
    pub wall_penetrations: u32,
    pub mean_rotation_lead: Option<f64>,
    pub min_rotation_lead: Option<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SuiteReport {
    pub runs: Vec<RunRecord>,
    pub summary: Vec<ConditionSummary>,
}

impl SuiteReport {
    /// A suite fails on any collision.
    pub fn failed(&self) -> bool {
        self.runs.iter().any(|r| r.metrics.collision)
    }

    pub fn runs_for(&self, condition: Condition) -> impl Iterator<Item = &RunRecord> {
        self.runs.iter().filter(move |r| r.condition == condition)
    }
}

fn mean(values: impl Iterator<Item = f64>) -> Option<f64> {
    let (sum, n) = values.fold((0.0, 0usize), |(s, n), v| (s + v, n + 1));
    (n > 0).then(|| sum / n as f64)
}

fn summarise(condition: Condition, runs: &[&RunRecord]) -> ConditionSummary {
    let m = |r: &&RunRecord| r.metrics.clone();
    let metrics: Vec<CrossingMetrics> = runs.iter().map(m).collect();
    let finite_clearance = || metrics.iter().map(|m| m.min_clearance).filter(|c| c.is_finite());
    ConditionSummary {
        condition,
        runs: metrics.len(),
        collisions: metrics.iter().filter(|m| m.collision).count(),
        timeouts: metrics.iter().filter(|m| m.outcome == Outcome::Timeout).count(),
        mean_traversal_time: mean(metrics.iter().filter_map(|m| m.traversal_time)),
        min_clearance: finite_clearance().fold(f64::INFINITY, f64::min),
        mean_min_clearance: mean(finite_clearance()).unwrap_or(f64::INFINITY),
        limit_violations: metrics.iter().map(|m| m.limit_violations).sum(),
        wall_penetrations: metrics.iter().map(|m| m.wall_penetrations).sum(),
        mean_rotation_lead: mean(metrics.iter().filter_map(|m| m.rotation_lead)),
        min_rotation_lead: metrics.iter().filter_map(|m| m.rotation_lead).reduce(f64::min),
    }
}

/// Trace file name of one run inside a suite output directory.
pub fn trace_file_name(condition: Condition, seed: u64) -> String {
    format!("trace_{}_seed{seed}.csv", condition.label())
}

/// Runs every condition for every seed. Runs execute in parallel; results are
/// ordered by condition, then by the order of `seeds`. When `trace_dir` is
/// given each run's trace is written there.
pub fn run_condition_suite(base: &Scenario, seeds: &[u64], trace_dir: Option<&FsPath>) -> Result<SuiteReport> {
    let jobs: Vec<(Condition, u64)> = Condition::ALL
        .iter()
        .flat_map(|c| seeds.iter().map(move |s| (*c, *s)))
        .collect();
    let runs = jobs
        .par_iter()
        .map(|&(condition, seed)| {
            let sc = base.clone().with_condition(condition).with_seed(seed);
            let (trace, metrics) = run_scenario(&sc)?;
            if let Some(dir) = trace_dir {
                export_csv(&trace, dir.join(trace_file_name(condition, seed)))?;
            }
            Ok(RunRecord {
                condition,
                seed,
                metrics,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    let summary = Condition::ALL
        .iter()
        .map(|c| {
            let rs: Vec<&RunRecord> = runs.iter().filter(|r| r.condition == *c).collect();
            summarise(*c, &rs)
        })
        .collect();
    Ok(SuiteReport { runs, summary })
}

fn opt(x: Option<f64>) -> String {
    x.map(fmt_sig).unwrap_or_default()
}

pub fn summary_csv(report: &SuiteReport) -> String {
    let mut out = String::from(
        "rotation,slide,runs,collisions,timeouts,mean_traversal_time,min_clearance,mean_min_clearance,\
         limit_violations,wall_penetrations,mean_rotation_lead,min_rotation_lead\n",
    );
    for s in &report.summary {
        writeln!(
            out,
            "{},{},{},{},{},{},{},{},{},{},{},{}",
            s.condition.rotation,
            s.condition.slide,
            s.runs,
            s.collisions,
            s.timeouts,
            opt(s.mean_traversal_time),
            opt(s.min_clearance.is_finite().then_some(s.min_clearance)),
            opt(s.mean_min_clearance.is_finite().then_some(s.mean_min_clearance)),
            s.limit_violations,
            s.wall_penetrations,
            opt(s.mean_rotation_lead),
            opt(s.min_rotation_lead),
        )
        .unwrap();
    }
    out
}

pub fn runs_csv(report: &SuiteReport) -> String {
    let mut out = String::from(
        "rotation,slide,seed,outcome,collision,min_clearance,traversal_time,rotation_lead,\
         stopped_during_crossing,limit_violations,step_distance\n",
    );
    for r in &report.runs {
        let m = &r.metrics;
        writeln!(
            out,
            "{},{},{},{},{},{},{},{},{},{},{}",
            r.condition.rotation,
            r.condition.slide,
            r.seed,
            m.outcome.as_str(),
            m.collision,
            opt(m.min_clearance.is_finite().then_some(m.min_clearance)),
            opt(m.traversal_time),
            opt(m.rotation_lead),
            m.robot_stopped_during_crossing,
            m.limit_violations,
            opt(m.step_distance),
        )
        .unwrap();
    }
    out
}

/// Writes `summary.csv` and `runs.csv` into `dir`.
pub fn write_report(report: &SuiteReport, dir: &FsPath) -> Result<()> {
    for (name, text) in [("summary.csv", summary_csv(report)), ("runs.csv", runs_csv(report))] {
        let path = dir.join(name);
        std::fs::write(&path, text).map_err(|e| Error::io(&path, e))?;
    }
    Ok(())
}
