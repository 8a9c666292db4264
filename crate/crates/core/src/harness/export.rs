//! CSV export of traces.

use std::fmt::Write as _;
use std::path::Path as FsPath;

use crate::error::{Error, Result};

use super::sim::SimTrace;

/// Formats `x` with 6 significant digits, `%g` style: trailing zeros
/// dropped, scientific notation outside `[1e-5, 1e6)`, `-0` printed as `0`.
pub fn fmt_sig(x: f64) -> String {
    if x == 0.0 {
        return "0".into();
    }
    if !x.is_finite() {
        return if x.is_nan() {
            "nan".into()
        } else if x > 0.0 {
            "inf".into()
        } else {
            "-inf".into()
        };
    }
    let sci = format!("{x:.5e}");
    let (mantissa, exp) = sci.split_once('e').expect("exponent present");
    let exp: i32 = exp.parse().expect("integer exponent");
    if !(-5..6).contains(&exp) {
        let m = trim_zeros(mantissa);
        let sign = if exp < 0 { '-' } else { '+' };
        return format!("{m}e{sign}{:02}", exp.abs());
    }
    let decimals = (5 - exp).max(0) as usize;
    let s = format!("{x:.decimals$}");
    let s = trim_zeros(&s);
    if s == "-0" {
        "0".into()
    } else {
        s.to_string()
    }
}

fn trim_zeros(s: &str) -> &str {
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.')
    } else {
        s
    }
}

fn opt(x: Option<f64>) -> String {
    x.map(fmt_sig).unwrap_or_default()
}

pub fn header(pedestrian_count: usize) -> String {
    let mut h = String::from(
        "tick,time,x,y,heading,vx,vy,omega,mode,rotating,side,blocked,target_heading,t_cross,\
         cmd_vx,cmd_vy,cmd_omega,min_clearance,wall_gap",
    );
    for i in 0..pedestrian_count {
        write!(h, ",p{i}_x,p{i}_y,p{i}_vx,p{i}_vy,p{i}_est_x,p{i}_est_y").unwrap();
    }
    h
}

/// The trace as CSV text: a header row, then one row per tick.
pub fn to_csv(trace: &SimTrace) -> String {
    let mut out = header(trace.pedestrian_count);
    out.push('\n');
    for r in &trace.rows {
        let clearance = r.min_clearance.is_finite().then_some(r.min_clearance);
        let fields = [
            r.tick.to_string(),
            fmt_sig(r.time),
            fmt_sig(r.robot.x),
            fmt_sig(r.robot.y),
            fmt_sig(r.robot.heading),
            fmt_sig(r.twist.vx),
            fmt_sig(r.twist.vy),
            fmt_sig(r.twist.omega),
            r.mode.as_str().to_string(),
            u8::from(r.rotating).to_string(),
            r.side.map(|s| s.as_str().to_string()).unwrap_or_default(),
            u8::from(r.blocked).to_string(),
            fmt_sig(r.target_heading),
            opt(r.t_cross),
            fmt_sig(r.command.vx),
            fmt_sig(r.command.vy),
            fmt_sig(r.command.omega),
            opt(clearance),
            fmt_sig(r.wall_gap),
        ];
        out.push_str(&fields.join(","));
        for p in &r.pedestrians {
            write!(
                out,
                ",{},{},{},{},{},{}",
                fmt_sig(p.position.x),
                fmt_sig(p.position.y),
                fmt_sig(p.velocity.x),
                fmt_sig(p.velocity.y),
                opt(p.estimate.map(|e| e.x)),
                opt(p.estimate.map(|e| e.y)),
            )
            .unwrap();
        }
        out.push('\n');
    }
    out
}

pub fn export_csv(trace: &SimTrace, path: impl AsRef<FsPath>) -> Result<()> {
    let path = path.as_ref();
    std::fs::write(path, to_csv(trace)).map_err(|e| Error::io(path, e))
}
