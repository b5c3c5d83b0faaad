//! The interior of a polynomial curve as a closed polyline.

use crate::curvegeom::PolynomialCurve;
use crate::C64;

/// Default number of polyline nodes.
pub const REGION_NODES: usize = 4096;

#[derive(Debug, Clone, PartialEq)]
pub struct Region {
    pub polyline: Vec<C64>,
}

impl Region {
    pub fn from_curve(curve: &PolynomialCurve, nodes: usize) -> Self {
        Self {
            polyline: curve.boundary(nodes),
        }
    }

    fn edges(&self) -> impl Iterator<Item = (C64, C64)> + '_ {
        let n = self.polyline.len();
        (0..n).map(move |k| (self.polyline[k], self.polyline[(k + 1) % n]))
    }

    /// Winding number of the polyline around `z`.
    pub fn winding(&self, z: C64) -> i32 {
        let mut w = 0;
        for (a, b) in self.edges() {
            if a.im <= z.im {
                if b.im > z.im && cross(b - a, z - a) > 0.0 {
                    w += 1;
                }
            } else if b.im <= z.im && cross(b - a, z - a) < 0.0 {
                w -= 1;
            }
        }
        w
    }

    pub fn contains(&self, z: C64) -> bool {
        self.winding(z) != 0
    }

    /// Distance from `z` to the polyline.
    pub fn distance(&self, z: C64) -> f64 {
        self.edges()
            .map(|(a, b)| {
                let ab = b - a;
                let t = (((z - a) * ab.conj()).re / ab.norm_sqr()).clamp(0.0, 1.0);
                (z - (a + ab * t)).norm()
            })
            .fold(f64::INFINITY, f64::min)
    }

    /// Sorted `x` intervals of the interior on the horizontal line at height `y`.
    pub fn row_intervals(&self, y: f64) -> Vec<(f64, f64)> {
        let mut xs: Vec<f64> = self
            .edges()
            .filter(|(a, b)| (a.im <= y) != (b.im <= y))
            .map(|(a, b)| a.re + (y - a.im) * (b.re - a.re) / (b.im - a.im))
            .collect();
        xs.sort_by(f64::total_cmp);
        xs.chunks_exact(2).map(|p| (p[0], p[1])).collect()
    }

    /// `(x_min, x_max, y_min, y_max)`.
    pub fn bounding_box(&self) -> (f64, f64, f64, f64) {
        self.polyline.iter().fold(
            (f64::INFINITY, f64::NEG_INFINITY, f64::INFINITY, f64::NEG_INFINITY),
            |(a, b, c, d), z| (a.min(z.re), b.max(z.re), c.min(z.im), d.max(z.im)),
        )
    }

    /// Largest distance between two polyline nodes.
    pub fn diameter(&self) -> f64 {
        let step = (self.polyline.len() / 512).max(1);
        let pts: Vec<C64> = self.polyline.iter().step_by(step).copied().collect();
        let mut d: f64 = 0.0;
        for (i, a) in pts.iter().enumerate() {
            for b in &pts[i + 1..] {
                d = d.max((a - b).norm());
            }
        }
        d
    }
}

/// Fast membership test from interpolated scanline intervals, falling back to the winding
/// number where neighbouring rows change topology.
#[derive(Debug, Clone)]
pub struct RowClassifier {
    region: Region,
    y0: f64,
    hy: f64,
    rows: Vec<Vec<(f64, f64)>>,
}

impl RowClassifier {
    pub fn new(region: Region, rows: usize) -> Self {
        let (_, _, y0, y1) = region.bounding_box();
        let hy = (y1 - y0) / rows as f64;
        let table = (0..=rows).map(|k| region.row_intervals(y0 + k as f64 * hy)).collect();
        Self {
            region,
            y0,
            hy,
            rows: table,
        }
    }

    pub fn contains(&self, z: C64) -> bool {
        let u = (z.im - self.y0) / self.hy;
        if !(u >= 0.0 && u < (self.rows.len() - 1) as f64) {
            return false;
        }
        let k = u as usize;
        let (lo, hi) = (&self.rows[k], &self.rows[k + 1]);
        if lo.len() != hi.len() || lo.is_empty() {
            return self.region.contains(z);
        }
        let s = u - k as f64;
        lo.iter()
            .zip(hi)
            .any(|(a, b)| z.re > a.0 + s * (b.0 - a.0) && z.re < a.1 + s * (b.1 - a.1))
    }
}

fn cross(a: C64, b: C64) -> f64 {
    a.re * b.im - a.im * b.re
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn circle_region() {
        let r = Region::from_curve(&PolynomialCurve::circle(0.5), REGION_NODES);
        assert!(r.contains(C64::new(0.1, 0.2)));
        assert!(!r.contains(C64::new(0.6, 0.0)));
        assert!((r.distance(C64::new(0.0, 0.2)) - 0.3).abs() < 1e-6);
        let iv = r.row_intervals(0.3);
        assert_eq!(iv.len(), 1);
        assert!((iv[0].1 - 0.4).abs() < 1e-6 && (iv[0].0 + 0.4).abs() < 1e-6);
        assert!((r.diameter() - 1.0).abs() < 1e-6);
        let fast = RowClassifier::new(r.clone(), 512);
        for k in 0..2000 {
            let z = C64::from_polar(0.6 * (k as f64 / 2000.0).sqrt(), 2.399 * k as f64);
            if (r.distance(z)) > 1e-5 {
                assert_eq!(fast.contains(z), r.contains(z), "{z}");
            }
        }
    }
}
