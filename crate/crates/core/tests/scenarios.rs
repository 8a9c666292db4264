use std::path::PathBuf;

use stepslide_core::harness::{run_scenario, Scenario};
use stepslide_core::oracle::trapezoid_time;
use stepslide_core::planner::Mode;

fn scenario_dir() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../scenarios")
}

#[test]
fn every_shipped_scenario_loads_and_round_trips() {
    let mut n = 0;
    for entry in std::fs::read_dir(scenario_dir()).unwrap() {
        let path = entry.unwrap().path();
        if path.extension().is_none_or(|e| e != "toml") {
            continue;
        }
        let sc = Scenario::load(&path).unwrap_or_else(|e| panic!("{}: {e}", path.display()));
        let again = Scenario::from_toml_str(&sc.to_toml_string().unwrap()).unwrap();
        assert_eq!(sc.spec, again.spec, "{}", path.display());
        n += 1;
    }
    assert!(n >= 4);
}

#[test]
fn empty_corridor_matches_trapezoid_profile() {
    let sc = Scenario::empty_corridor();
    let (trace, m) = run_scenario(&sc).unwrap();
    assert!(trace.rows.iter().all(|r| r.mode == Mode::FreeNavigation));
    assert!(trace.rows.iter().all(|r| r.robot.y.abs() < 1e-9 && r.robot.heading.abs() < 1e-9));

    let limits = sc.spec.limits;
    let v = limits.v_max.min(sc.spec.navigator.max_speed);
    let length = (sc.robot_goal() - sc.robot_start().position()).norm();
    // the run ends once the robot is within goal tolerance, i.e. before the
    // last sqrt(2 tol / a) seconds of braking
    let tail = (2.0 * sc.spec.navigator.goal_tolerance / limits.a_max).sqrt();
    let expected = trapezoid_time(length, v, limits.a_max) - tail;
    let t = m.traversal_time.expect("goal reached");
    assert!((t - expected).abs() <= 0.05 * expected, "traversal {t:.3} s, oracle {expected:.3} s");
}

#[test]
fn overlapping_start_rejected() {
    let text = std::fs::read_to_string(scenario_dir().join("nominal.toml")).unwrap();
    let text = text.replace("start = [7.5, 0.28]", "start = [0.6, 0.0]");
    assert!(Scenario::from_toml_str(&text).is_err());
}

#[test]
fn unknown_keys_rejected() {
    let text = std::fs::read_to_string(scenario_dir().join("empty.toml")).unwrap();
    assert!(Scenario::from_toml_str(&format!("{text}\nbogus = 1\n")).is_err());
}

#[test]
fn timeout_is_reported() {
    let mut sc = Scenario::empty_corridor();
    sc.spec.duration_limit = 1.0;
    let (_, m) = run_scenario(&sc).unwrap();
    assert!(m.traversal_time.is_none());
    assert_eq!(m.outcome.as_str(), "timeout");
}
