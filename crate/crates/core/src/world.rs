//! Corridor geometry: aisles, wall segments and the travel frame used by the
//! planner and the pedestrians.

use crate::error::{Error, Result};
use crate::geom::{Point, Vector};

const GEOM_EPS: f64 = 1e-9;

/// A straight wall segment.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Segment {
    pub a: Point,
    pub b: Point,
}

impl Segment {
    pub fn new(a: Point, b: Point) -> Self {
        Segment { a, b }
    }

    pub fn closest_point(&self, p: Point) -> Point {
        let ab = self.b - self.a;
        let len2 = ab.norm_squared();
        if len2 < GEOM_EPS * GEOM_EPS {
            return self.a;
        }
        let t = ((p - self.a).dot(&ab) / len2).clamp(0.0, 1.0);
        self.a + ab * t
    }

    pub fn distance_to(&self, p: Point) -> f64 {
        (p - self.closest_point(p)).norm()
    }

    /// True when the closed segments share at least one point.
    pub fn intersects(&self, other: &Segment) -> bool {
        fn orient(a: Point, b: Point, c: Point) -> f64 {
            (b - a).perp(&(c - a))
        }
        fn on_segment(a: Point, b: Point, p: Point) -> bool {
            p.x >= a.x.min(b.x) - GEOM_EPS
                && p.x <= a.x.max(b.x) + GEOM_EPS
                && p.y >= a.y.min(b.y) - GEOM_EPS
                && p.y <= a.y.max(b.y) + GEOM_EPS
        }
        let (p1, p2, q1, q2) = (self.a, self.b, other.a, other.b);
        let d1 = orient(q1, q2, p1);
        let d2 = orient(q1, q2, p2);
        let d3 = orient(p1, p2, q1);
        let d4 = orient(p1, p2, q2);
        if ((d1 > GEOM_EPS && d2 < -GEOM_EPS) || (d1 < -GEOM_EPS && d2 > GEOM_EPS))
            && ((d3 > GEOM_EPS && d4 < -GEOM_EPS) || (d3 < -GEOM_EPS && d4 > GEOM_EPS))
        {
            return true;
        }
        (d1.abs() <= GEOM_EPS && on_segment(q1, q2, p1))
            || (d2.abs() <= GEOM_EPS && on_segment(q1, q2, p2))
            || (d3.abs() <= GEOM_EPS && on_segment(p1, p2, q1))
            || (d4.abs() <= GEOM_EPS && on_segment(p1, p2, q2))
    }
}

/// An aisle, described by its centerline. Width is shared by the whole world.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Aisle {
    pub start: Point,
    pub end: Point,
}

impl Aisle {
    pub fn new(start: Point, end: Point) -> Self {
        Aisle { start, end }
    }

    pub fn length(&self) -> f64 {
        (self.end - self.start).norm()
    }

    pub fn axis(&self) -> Vector {
        (self.end - self.start) / self.length()
    }
}

/// Aisle-aligned coordinates oriented along a direction of travel.
///
/// `s` runs along the travel direction from the aisle entry, `l` is the
/// lateral offset from the centerline, positive to the left of travel.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CorridorFrame {
    pub origin: Point,
    pub axis: Vector,
    pub length: f64,
    pub half_width: f64,
}

impl CorridorFrame {
    /// Frame for `aisle`, oriented so that `toward` has a non-negative axial
    /// component.
    pub fn new(aisle: &Aisle, half_width: f64, toward: Vector) -> Self {
        let axis = aisle.axis();
        let (origin, axis) = if axis.dot(&toward) >= 0.0 {
            (aisle.start, axis)
        } else {
            (aisle.end, -axis)
        };
        CorridorFrame {
            origin,
            axis,
            length: aisle.length(),
            half_width,
        }
    }

    pub fn left(&self) -> Vector {
        Vector::new(-self.axis.y, self.axis.x)
    }

    /// Heading of the travel direction (rad).
    pub fn heading(&self) -> f64 {
        self.axis.y.atan2(self.axis.x)
    }

    pub fn to_local(&self, p: Point) -> (f64, f64) {
        let d = p - self.origin;
        (self.axis.dot(&d), self.axis.perp(&d))
    }

    pub fn from_local(&self, s: f64, l: f64) -> Point {
        self.origin + self.axis * s + self.left() * l
    }

    /// Lateral position of a wall on `side`.
    pub fn wall_lateral(&self, side_sign: f64) -> f64 {
        side_sign * self.half_width
    }
}

/// Static world: aisles, walls and the agent footprints.
#[derive(Debug, Clone, PartialEq)]
pub struct CorridorWorld {
    pub aisles: Vec<Aisle>,
    pub walls: Vec<Segment>,
    pub aisle_width: f64,
    pub robot_radius: f64,
    pub person_radius: f64,
    pub goals: Vec<Point>,
}

impl CorridorWorld {
    pub fn new(
        aisles: Vec<Aisle>,
        walls: Vec<Segment>,
        aisle_width: f64,
        robot_radius: f64,
        person_radius: f64,
        goals: Vec<Point>,
    ) -> Result<Self> {
        if !(robot_radius > 0.0) || !(person_radius > 0.0) {
            return Err(Error::InvalidWorld("radii must be positive".into()));
        }
        if !(aisle_width > 2.0 * robot_radius) {
            return Err(Error::InvalidWorld(format!(
                "aisle width {aisle_width} m does not fit a robot of radius {robot_radius} m"
            )));
        }
        if aisles.is_empty() {
            return Err(Error::InvalidWorld("at least one aisle is required".into()));
        }
        let world = CorridorWorld {
            aisles,
            walls,
            aisle_width,
            robot_radius,
            person_radius,
            goals,
        };
        for (i, aisle) in world.aisles.iter().enumerate() {
            if !(aisle.length() > GEOM_EPS) {
                return Err(Error::InvalidWorld(format!("aisle {i} has zero length")));
            }
            for sign in [1.0, -1.0] {
                if !world.has_boundary(aisle, sign) {
                    return Err(Error::InvalidWorld(format!(
                        "aisle {i} has no wall along its {} boundary",
                        if sign > 0.0 { "left" } else { "right" }
                    )));
                }
            }
        }
        for g in &world.goals {
            if world.aisle_of(*g).is_none() {
                return Err(Error::InvalidWorld(format!(
                    "goal ({}, {}) lies outside every aisle",
                    g.x, g.y
                )));
            }
        }
        Ok(world)
    }

    /// A single straight aisle from `(0, 0)` along +x, walls on both sides.
    pub fn single_aisle(
        length: f64,
        width: f64,
        robot_radius: f64,
        person_radius: f64,
    ) -> Result<Self> {
        let h = width / 2.0;
        let aisle = Aisle::new(Point::new(0.0, 0.0), Point::new(length, 0.0));
        let walls = vec![
            Segment::new(Point::new(0.0, -h), Point::new(length, -h)),
            Segment::new(Point::new(0.0, h), Point::new(length, h)),
        ];
        Self::new(vec![aisle], walls, width, robot_radius, person_radius, vec![])
    }

    /// Store layout: a shelf block between two long parallel aisles, joined at
    /// both ends by short cross corridors, all enclosed by outer shelving.
    ///
    /// Aisle 0 runs along y = 0, aisle 1 along y = width + `shelf_depth`.
    pub fn store(
        aisle_length: f64,
        aisle_width: f64,
        shelf_depth: f64,
        cross_width: f64,
        robot_radius: f64,
        person_radius: f64,
    ) -> Result<Self> {
        let h = aisle_width / 2.0;
        let y1 = aisle_width + shelf_depth;
        let aisles = vec![
            Aisle::new(Point::new(0.0, 0.0), Point::new(aisle_length, 0.0)),
            Aisle::new(Point::new(0.0, y1), Point::new(aisle_length, y1)),
        ];
        let (x0, x1) = (-cross_width, aisle_length + cross_width);
        let (yb, yt) = (-h, y1 + h);
        let (sb, st) = (h, y1 - h);
        let p = Point::new;
        let walls = vec![
            // outer shelving
            Segment::new(p(x0, yb), p(x1, yb)),
            Segment::new(p(x1, yb), p(x1, yt)),
            Segment::new(p(x1, yt), p(x0, yt)),
            Segment::new(p(x0, yt), p(x0, yb)),
            // middle shelf block
            Segment::new(p(0.0, sb), p(aisle_length, sb)),
            Segment::new(p(aisle_length, sb), p(aisle_length, st)),
            Segment::new(p(aisle_length, st), p(0.0, st)),
            Segment::new(p(0.0, st), p(0.0, sb)),
        ];
        Self::new(aisles, walls, aisle_width, robot_radius, person_radius, vec![])
    }

    pub fn half_width(&self) -> f64 {
        self.aisle_width / 2.0
    }

    pub fn with_goals(mut self, goals: Vec<Point>) -> Result<Self> {
        let goals_ok = goals.iter().all(|g| self.aisle_of(*g).is_some());
        if !goals_ok {
            return Err(Error::InvalidWorld("goal outside every aisle".into()));
        }
        self.goals = goals;
        Ok(self)
    }

    /// Index of the first aisle whose footprint contains `p`.
    pub fn aisle_of(&self, p: Point) -> Option<usize> {
        let h = self.half_width();
        self.aisles.iter().position(|aisle| {
            let frame = CorridorFrame::new(aisle, h, aisle.axis());
            let (s, l) = frame.to_local(p);
            s >= -GEOM_EPS && s <= frame.length + GEOM_EPS && l.abs() <= h + GEOM_EPS
        })
    }

    /// Frame of aisle `index` oriented along `toward`.
    pub fn frame(&self, index: usize, toward: Vector) -> CorridorFrame {
        CorridorFrame::new(&self.aisles[index], self.half_width(), toward)
    }

    /// Distance from `p` to the nearest wall segment.
    pub fn wall_distance(&self, p: Point) -> Result<f64> {
        point_to_wall_distance(p, self)
    }

    /// Nearest wall point to `p`, with its distance.
    pub fn nearest_wall(&self, p: Point) -> Option<(Point, f64)> {
        self.walls
            .iter()
            .map(|w| {
                let q = w.closest_point(p);
                (q, (p - q).norm())
            })
            .min_by(|a, b| a.1.total_cmp(&b.1))
    }

    /// True when no wall segment crosses the sight line from `a` to `b`.
    pub fn line_of_sight(&self, a: Point, b: Point) -> bool {
        let ray = Segment::new(a, b);
        !self.walls.iter().any(|w| w.intersects(&ray))
    }

    fn has_boundary(&self, aisle: &Aisle, sign: f64) -> bool {
        let frame = CorridorFrame::new(aisle, self.half_width(), aisle.axis());
        let target = sign * self.half_width();
        self.walls.iter().any(|w| {
            let (sa, la) = frame.to_local(w.a);
            let (sb, lb) = frame.to_local(w.b);
            (la - target).abs() < 1e-6
                && (lb - target).abs() < 1e-6
                && sa.max(sb) > GEOM_EPS
                && sa.min(sb) < frame.length - GEOM_EPS
        })
    }
}

/// Euclidean distance from `p` to the nearest wall segment of `world`.
pub fn point_to_wall_distance(p: Point, world: &CorridorWorld) -> Result<f64> {
    if !p.x.is_finite() || !p.y.is_finite() {
        return Err(Error::NonFinite("point"));
    }
    world
        .nearest_wall(p)
        .map(|(_, d)| d)
        .ok_or_else(|| Error::InvalidWorld("world has no walls".into()))
}
