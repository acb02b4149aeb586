use serde::{Deserialize, Serialize};

/// A point in millimetres. Serialized as `[x, y, z]`.
#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(from = "[f64; 3]", into = "[f64; 3]")]
pub struct Point3 {
    pub x: f64,
    pub y: f64,
    pub z: f64,
}

impl Point3 {
    pub const fn new(x: f64, y: f64, z: f64) -> Self {
        Point3 { x, y, z }
    }

    pub fn distance(&self, other: &Point3) -> f64 {
        let (dx, dy, dz) = (self.x - other.x, self.y - other.y, self.z - other.z);
        libm::sqrt(dx * dx + dy * dy + dz * dz)
    }

    pub fn with_z(self, z: f64) -> Self {
        Point3 { z, ..self }
    }
}

impl From<[f64; 3]> for Point3 {
    fn from([x, y, z]: [f64; 3]) -> Self {
        Point3 { x, y, z }
    }
}

impl From<Point3> for [f64; 3] {
    fn from(p: Point3) -> Self {
        [p.x, p.y, p.z]
    }
}

/// Brick extents in millimetres: width along x, depth along y, height along z.
/// Serialized as `[width, depth, height]`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(from = "[f64; 3]", into = "[f64; 3]")]
pub struct Size {
    pub width: f64,
    pub depth: f64,
    pub height: f64,
}

impl From<[f64; 3]> for Size {
    fn from([width, depth, height]: [f64; 3]) -> Self {
        Size { width, depth, height }
    }
}

impl From<Size> for [f64; 3] {
    fn from(s: Size) -> Self {
        [s.width, s.depth, s.height]
    }
}

/// Slack for comparisons between computed heights.
pub(crate) const EPS: f64 = 1e-6;

/// Whether two axis-aligned footprints centred at `a` and `b` overlap with
/// positive area.
pub(crate) fn footprints_overlap(a: &Point3, sa: &Size, b: &Point3, sb: &Size) -> bool {
    (a.x - b.x).abs() < (sa.width + sb.width) / 2.0 - EPS && (a.y - b.y).abs() < (sa.depth + sb.depth) / 2.0 - EPS
}

/// Whether the point `(x, y)` lies within the footprint of a brick centred at `c`.
pub(crate) fn footprint_contains(c: &Point3, s: &Size, x: f64, y: f64) -> bool {
    (x - c.x).abs() <= s.width / 2.0 + EPS && (y - c.y).abs() <= s.depth / 2.0 + EPS
}
