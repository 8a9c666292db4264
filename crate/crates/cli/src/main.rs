use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{Context, Result};
use clap::{Parser, Subcommand, ValueEnum};

use stepslide_core::harness::{
    export_csv, render_svg, run_condition_suite, run_scenario, suite, CrossingMetrics, Outcome, Scenario,
};
use stepslide_core::oracle;

const EXIT_ERROR: u8 = 1;
const EXIT_COLLISION: u8 = 2;
const EXIT_TIMEOUT: u8 = 3;

#[derive(Parser)]
#[command(name = "stepslide", version, about = "Corridor crossing simulator for an omni-directional robot")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum Switch {
    On,
    Off,
}

impl Switch {
    fn on(self) -> bool {
        matches!(self, Switch::On)
    }
}

#[derive(Subcommand)]
enum Command {
    /// Run one scenario
    Run {
        #[arg(long)]
        scenario: PathBuf,
        #[arg(long, value_enum)]
        rotation: Option<Switch>,
        #[arg(long, value_enum)]
        slide: Option<Switch>,
        #[arg(long)]
        seed: Option<u64>,
        /// Write the per-tick trace as CSV
        #[arg(long)]
        trace: Option<PathBuf>,
        /// Write a top-down SVG of the run
        #[arg(long)]
        svg: Option<PathBuf>,
    },
    /// Run all four conditions for seeds 1..=N
    Suite {
        #[arg(long)]
        scenario: PathBuf,
        #[arg(long)]
        seeds: u64,
        #[arg(long)]
        out: PathBuf,
    },
    /// Run the brute-force reference checks
    Oracle,
}

fn print_metrics(m: &CrossingMetrics) {
    let opt = |x: Option<f64>| x.map_or("-".to_string(), |v| format!("{v:.3}"));
    println!("outcome            {}", m.outcome.as_str());
    println!("collision          {}", m.collision);
    if m.min_clearance.is_finite() {
        println!("min clearance      {:.4} m", m.min_clearance);
    }
    println!("traversal time     {} s", opt(m.traversal_time));
    println!("step distance      {} m", opt(m.step_distance));
    println!("rotation lead      {} s", opt(m.rotation_lead));
    println!("stopped in window  {}", m.robot_stopped_during_crossing);
    println!("limit violations   {}", m.limit_violations);
    println!("wall penetrations  {}", m.wall_penetrations);
    let modes: Vec<&str> = m.mode_sequence.iter().map(|m| m.as_str()).collect();
    println!("modes              {}", modes.join(" > "));
}

fn run(cmd: Command) -> Result<u8> {
    match cmd {
        Command::Run {
            scenario,
            rotation,
            slide,
            seed,
            trace,
            svg,
        } => {
            let mut sc = Scenario::load(&scenario).with_context(|| format!("loading {}", scenario.display()))?;
            let mut condition = sc.condition();
            if let Some(r) = rotation {
                condition.rotation = r.on();
            }
            if let Some(s) = slide {
                condition.slide = s.on();
            }
            sc = sc.with_condition(condition);
            if let Some(seed) = seed {
                sc = sc.with_seed(seed);
            }
            let (tr, metrics) = run_scenario(&sc)?;
            if let Some(path) = trace {
                export_csv(&tr, &path)?;
            }
            if let Some(path) = svg {
                render_svg(&tr, &sc.world, &path)?;
            }
            print_metrics(&metrics);
            Ok(if metrics.collision {
                EXIT_COLLISION
            } else if metrics.outcome == Outcome::Timeout {
                EXIT_TIMEOUT
            } else {
                0
            })
        }
        Command::Suite { scenario, seeds, out } => {
            let sc = Scenario::load(&scenario).with_context(|| format!("loading {}", scenario.display()))?;
            let traces = out.join("traces");
            std::fs::create_dir_all(&traces).with_context(|| format!("creating {}", traces.display()))?;
            let seeds: Vec<u64> = (1..=seeds).collect();
            let report = run_condition_suite(&sc, &seeds, Some(&traces))?;
            suite::write_report(&report, &out)?;
            print!("{}", suite::summary_csv(&report));
            let timeouts = report.runs.iter().any(|r| r.metrics.outcome == Outcome::Timeout);
            Ok(if report.failed() {
                EXIT_COLLISION
            } else if timeouts {
                EXIT_TIMEOUT
            } else {
                0
            })
        }
        Command::Oracle => {
            let checks = oracle::run_all();
            for c in &checks {
                println!("{} {}: {}", if c.passed { "PASS" } else { "FAIL" }, c.name, c.detail);
            }
            Ok(if checks.iter().all(|c| c.passed) { 0 } else { EXIT_ERROR })
        }
    }
}

fn main() -> ExitCode {
    env_logger::init();
    let cli = Cli::parse();
    match run(cli.command) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(EXIT_ERROR)
        }
    }
}

