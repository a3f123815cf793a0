use serde::{Deserialize, Serialize};

/// A 2-D position in meters.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct Point {
    pub x: f64,
    pub y: f64,
}

impl Point {
    pub const fn new(x: f64, y: f64) -> Self {
        Point { x, y }
    }

    pub fn distance(&self, other: &Point, norm: Norm) -> f64 {
        norm.length(self.x - other.x, self.y - other.y)
    }
}

/// Norm used to measure horizontal distances.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Norm {
    /// Manhattan distance; coverage regions are rhombi.
    #[default]
    L1,
    /// Euclidean distance; coverage regions are discs.
    L2,
}

impl Norm {
    pub fn length(self, dx: f64, dy: f64) -> f64 {
        match self {
            Norm::L1 => dx.abs() + dy.abs(),
            Norm::L2 => dx.hypot(dy),
        }
    }

    /// Closed polygon tracing the ball of `radius` around `center`.
    ///
    /// L1 balls are exact rhombi (5 vertices, first repeated); L2 balls are
    /// approximated by a 32-gon.
    pub fn outline(self, center: Point, radius: f64) -> Vec<Point> {
        let mut pts: Vec<Point> = match self {
            Norm::L1 => vec![
                Point::new(center.x + radius, center.y),
                Point::new(center.x, center.y + radius),
                Point::new(center.x - radius, center.y),
                Point::new(center.x, center.y - radius),
            ],
            Norm::L2 => (0..32)
                .map(|k| {
                    let phi = std::f64::consts::TAU * k as f64 / 32.0;
                    Point::new(center.x + radius * phi.cos(), center.y + radius * phi.sin())
                })
                .collect(),
        };
        pts.push(pts[0]);
        pts
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn l1_is_not_euclidean() {
        let a = Point::new(0.0, 0.0);
        let b = Point::new(30.0, 30.0);
        assert_eq!(a.distance(&b, Norm::L1), 60.0);
        assert!((a.distance(&b, Norm::L2) - 42.426_406_871_192_85).abs() < 1e-12);
    }

    #[test]
    fn rhombus_outline_is_closed() {
        let pts = Norm::L1.outline(Point::new(10.0, 10.0), 5.0);
        assert_eq!(pts.len(), 5);
        assert_eq!(pts[0], pts[4]);
        assert_eq!(pts[1], Point::new(10.0, 15.0));
    }
}
