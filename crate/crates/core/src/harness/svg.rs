//! Static top-down SVG of a run.

use std::fmt::Write as _;
use std::path::Path as FsPath;

use crate::error::{Error, Result};
use crate::geom::Point;
use crate::world::CorridorWorld;

use super::metrics::compute_metrics;
use super::sim::SimTrace;

const PX_PER_M: f64 = 100.0;
const MARGIN: f64 = 0.3;
/// Seconds between heading glyphs.
pub const GLYPH_PERIOD: f64 = 0.5;

struct View {
    min_x: f64,
    max_y: f64,
}

impl View {
    fn x(&self, p: Point) -> f64 {
        (p.x - self.min_x + MARGIN) * PX_PER_M
    }

    fn y(&self, p: Point) -> f64 {
        (self.max_y - p.y + MARGIN) * PX_PER_M
    }
}

fn polyline(out: &mut String, view: &View, points: impl Iterator<Item = Point>, class: &str) {
    let coords: Vec<String> = points
        .map(|p| format!("{:.1},{:.1}", view.x(p), view.y(p)))
        .collect();
    if coords.len() > 1 {
        writeln!(out, r#"<polyline class="{class}" points="{}"/>"#, coords.join(" ")).unwrap();
    }
}

/// Ticks that get a heading glyph: every `GLYPH_PERIOD` seconds from the
/// first row.
pub fn glyph_ticks(trace: &SimTrace) -> Vec<u64> {
    let every = ((GLYPH_PERIOD / trace.dt).round() as u64).max(1);
    trace.rows.iter().map(|r| r.tick).filter(|t| t % every == 0).collect()
}

pub fn to_svg(trace: &SimTrace, world: &CorridorWorld) -> String {
    let wall_points = world.walls.iter().flat_map(|w| [w.a, w.b]);
    let (mut min_x, mut max_x, mut min_y, mut max_y) = (f64::INFINITY, f64::NEG_INFINITY, f64::INFINITY, f64::NEG_INFINITY);
    for p in wall_points {
        min_x = min_x.min(p.x);
        max_x = max_x.max(p.x);
        min_y = min_y.min(p.y);
        max_y = max_y.max(p.y);
    }
    let view = View { min_x, max_y };
    let width = (max_x - min_x + 2.0 * MARGIN) * PX_PER_M;
    let height = (max_y - min_y + 2.0 * MARGIN) * PX_PER_M;

    let mut out = String::new();
    writeln!(
        out,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{width:.0}" height="{height:.0}" viewBox="0 0 {width:.0} {height:.0}">"#
    )
    .unwrap();
    out.push_str(
        "<style>.wall{stroke:#444;stroke-width:4}.robot{fill:none;stroke:#1f77b4;stroke-width:2}\
         .person{fill:none;stroke:#d62728;stroke-width:2}.glyph{stroke:#1f77b4;stroke-width:2}\
         .crossing{fill:none;stroke:#2ca02c;stroke-width:2}</style>\n",
    );
    for w in &world.walls {
        writeln!(
            out,
            r#"<line class="wall" x1="{:.1}" y1="{:.1}" x2="{:.1}" y2="{:.1}"/>"#,
            view.x(w.a),
            view.y(w.a),
            view.x(w.b),
            view.y(w.b)
        )
        .unwrap();
    }

    if !trace.rows.is_empty() {
        polyline(&mut out, &view, trace.rows.iter().map(|r| r.robot.position()), "robot");
        for i in 0..trace.pedestrian_count {
            polyline(&mut out, &view, trace.rows.iter().map(|r| r.pedestrians[i].position), "person");
        }
        let glyphs = glyph_ticks(trace);
        for row in trace.rows.iter().filter(|r| glyphs.binary_search(&r.tick).is_ok()) {
            let p = row.robot.position();
            let tip = p + crate::geom::heading_vector(row.robot.heading) * trace.robot_radius;
            writeln!(
                out,
                r#"<line class="glyph" data-tick="{}" data-heading="{:.4}" x1="{:.1}" y1="{:.1}" x2="{:.1}" y2="{:.1}"/>"#,
                row.tick,
                row.robot.heading,
                view.x(p),
                view.y(p),
                view.x(tip),
                view.y(tip)
            )
            .unwrap();
        }
        if let Some(tick) = compute_metrics(trace).ok().and_then(|m| m.crossing_tick) {
            if let Some(row) = trace.rows.iter().find(|r| r.tick == tick) {
                let p = row.robot.position();
                writeln!(
                    out,
                    r#"<circle class="crossing" data-tick="{tick}" data-heading="{:.4}" cx="{:.1}" cy="{:.1}" r="{:.1}"/>"#,
                    row.robot.heading,
                    view.x(p),
                    view.y(p),
                    trace.robot_radius * PX_PER_M
                )
                .unwrap();
            }
        }
    }
    out.push_str("</svg>\n");
    out
}

pub fn render_svg(trace: &SimTrace, world: &CorridorWorld, path: impl AsRef<FsPath>) -> Result<()> {
    let path = path.as_ref();
    std::fs::write(path, to_svg(trace, world)).map_err(|e| Error::io(path, e))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::harness::scenario::Scenario;
    use crate::harness::sim::simulate;

    #[test]
    fn world_only_render_has_walls_and_no_paths() {
        let sc = Scenario::nominal();
        let svg = to_svg(&SimTrace::empty(&sc), &sc.world);
        assert_eq!(svg.matches(r#"class="wall""#).count(), sc.world.walls.len());
        assert!(!svg.contains("polyline"));
        assert!(!svg.contains("glyph\""));
    }

    #[test]
    fn one_glyph_per_half_second() {
        let mut sc = Scenario::empty_corridor();
        sc.spec.duration_limit = 3.0;
        let trace = simulate(&sc).unwrap();
        let svg = to_svg(&trace, &sc.world);
        // 300 rows at 0.01 s: ticks 0, 50, ..., 250
        assert_eq!(svg.matches(r#"class="glyph""#).count(), 6);
        assert!(svg.contains(r#"class="robot""#));
    }

    #[test]
    fn unwritable_path_reported() {
        let sc = Scenario::nominal();
        assert!(render_svg(&SimTrace::empty(&sc), &sc.world, "/nonexistent-dir/a.svg").is_err());
    }
}
