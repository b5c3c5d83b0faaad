//! Effective field `E(z) = V(z) + (2 / (pi t0)) int_D log |z/zeta - 1|^{-1} d^2 zeta`.

use std::f64::consts::PI;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::region::{Region, REGION_NODES};
use crate::curvegeom::PolynomialCurve;
use crate::schwarz::reflection;
use crate::{Error, PotentialSpec, Result, C64};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FieldOptions {
    /// Cells per axis over the bounding box of the curve.
    pub cells: usize,
    /// Cells within this many cell sizes of a singularity are integrated exactly.
    pub exact_radius: f64,
    /// Central-difference step relative to the curve diameter.
    pub step: f64,
}

impl Default for FieldOptions {
    fn default() -> Self {
        Self {
            cells: 1200,
            exact_radius: 2.5,
            step: 1e-3,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EffectiveField {
    pub z: C64,
    pub inside: bool,
    pub value: f64,
    /// `d E / d zbar = (E_x + i E_y) / 2` by central differences.
    pub gradient: C64,
    /// `0` inside, `(z - conj S(z)) / t0` outside.
    pub expected_gradient: C64,
}

impl EffectiveField {
    pub fn gradient_residual(&self) -> f64 {
        (self.gradient - self.expected_gradient).norm()
    }
}

/// Antiderivative of `ln(x^2 + y^2)` in both variables.
fn rect_antiderivative(x: f64, y: f64) -> f64 {
    let r2 = x * x + y * y;
    let log_term = if r2 == 0.0 { 0.0 } else { x * y * r2.ln() };
    let at = |a: f64, b: f64| if a == 0.0 { 0.0 } else { a * a * (b / a).atan() };
    log_term - 3.0 * x * y + at(x, y) + at(y, x)
}

/// `int int ln |zeta - z|` over `[x0, x1] x [y0, y1]`.
pub fn rect_log_integral(z: C64, x0: f64, x1: f64, y0: f64, y1: f64) -> f64 {
    let g = |x: f64, y: f64| rect_antiderivative(x - z.re, y - z.im);
    0.5 * (g(x1, y1) - g(x0, y1) - g(x1, y0) + g(x0, y0))
}

struct Row {
    y0: f64,
    y1: f64,
    intervals: Vec<(f64, f64)>,
}

struct FieldGrid {
    x_min: f64,
    hx: f64,
    hy: f64,
    rows: Vec<Row>,
}

impl FieldGrid {
    fn new(region: &Region, cells: usize) -> Self {
        let (x0, x1, y0, y1) = region.bounding_box();
        let hx = (x1 - x0) / cells as f64;
        let hy = (y1 - y0) / cells as f64;
        let rows = (0..cells)
            .map(|i| {
                let lo = y0 + i as f64 * hy;
                Row {
                    y0: lo,
                    y1: lo + hy,
                    intervals: region.row_intervals(lo + 0.5 * hy),
                }
            })
            .collect();
        Self { x_min: x0, hx, hy, rows }
    }

    /// `int_D ln |zeta - z| d^2 zeta`.
    fn log_integral(&self, z: C64, exact_radius: f64) -> f64 {
        let near = exact_radius * self.hx.max(self.hy);
        let partial: Vec<f64> = self
            .rows
            .par_iter()
            .map(|row| {
                let yc = 0.5 * (row.y0 + row.y1);
                let near_row = (yc - z.im).abs() <= near + 0.5 * self.hy;
                let mut s = 0.0;
                for &(a, b) in &row.intervals {
                    let first = ((a - self.x_min) / self.hx).floor() as i64;
                    let last = ((b - self.x_min) / self.hx).floor() as i64;
                    for ix in first..=last {
                        let cx0 = self.x_min + ix as f64 * self.hx;
                        let (x0, x1) = (a.max(cx0), b.min(cx0 + self.hx));
                        if x1 <= x0 {
                            continue;
                        }
                        let xc = 0.5 * (x0 + x1);
                        if near_row && (xc - z.re).abs() <= near + 0.5 * self.hx {
                            s += rect_log_integral(z, x0, x1, row.y0, row.y1);
                        } else {
                            s += (x1 - x0) * self.hy * 0.5 * (C64::new(xc, yc) - z).norm_sqr().ln();
                        }
                    }
                }
                s
            })
            .collect();
        partial.iter().sum()
    }
}

/// Evaluates `E`, its `zbar` derivative and the expected derivative at `z`.
pub fn effective_field(curve: &PolynomialCurve, potential: &PotentialSpec, z: C64, opts: &FieldOptions) -> Result<EffectiveField> {
    let t0 = curve.area_t0();
    if ((potential.t0 - t0) / t0).abs() > 1e-8 {
        return Err(Error::InvalidInput(format!(
            "potential t0 {} does not match the curve area {t0}",
            potential.t0
        )));
    }
    if opts.cells < 16 || !(opts.step > 0.0) {
        return Err(Error::InvalidInput("field grid needs at least 16 cells and a positive step".into()));
    }
    let region = Region::from_curve(curve, REGION_NODES);
    let grid = FieldGrid::new(&region, opts.cells);
    let origin = grid.log_integral(C64::new(0.0, 0.0), opts.exact_radius);
    let e = |p: C64| potential.v(p) + 2.0 / (PI * t0) * (origin - grid.log_integral(p, opts.exact_radius));
    let h = opts.step * region.diameter();
    let ex = (e(z + h) - e(z - h)) / (2.0 * h);
    let ey = (e(z + C64::new(0.0, h)) - e(z - C64::new(0.0, h))) / (2.0 * h);
    let inside = region.contains(z);
    let expected_gradient = if inside {
        C64::new(0.0, 0.0)
    } else {
        (z - reflection(curve, z)?) / t0
    };
    Ok(EffectiveField {
        z,
        inside,
        value: e(z),
        gradient: C64::new(ex, ey) * 0.5,
        expected_gradient,
    })
}

/// Closed form for the disc of area `pi t0`.
pub fn circle_field(t0: f64, z: C64) -> f64 {
    let r2 = z.norm_sqr();
    if r2 <= t0 {
        0.0
    } else {
        (r2 - t0 - t0 * (r2 / t0).ln()) / t0
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numeric::quad::gauss_legendre;

    #[test]
    fn rectangle_integral_matches_quadrature() {
        let rule = gauss_legendre(40, 0.0, 1.0);
        for (z, x0, x1, y0, y1) in [
            (C64::new(0.3, -0.2), 0.5, 0.9, 0.1, 0.4),
            (C64::new(1.0, 1.0), -0.5, 0.2, -0.3, 0.6),
        ] {
            let mut q = 0.0;
            for &(u, wu) in &rule {
                for &(v, wv) in &rule {
                    let p = C64::new(x0 + (x1 - x0) * u, y0 + (y1 - y0) * v);
                    q += wu * wv * (p - z).norm().ln();
                }
            }
            q *= (x1 - x0) * (y1 - y0);
            assert!((rect_log_integral(z, x0, x1, y0, y1) - q).abs() < 1e-12);
        }
        // a singular corner: int_0^1 int_0^1 ln r = (ln 2 - 3 + pi/2) / 2
        let exact = 0.5 * (2f64.ln() - 3.0 + PI / 2.0);
        assert!((rect_log_integral(C64::new(0.0, 0.0), 0.0, 1.0, 0.0, 1.0) - exact).abs() < 1e-15);
    }

    #[test]
    fn circle_closed_form() {
        let t0: f64 = 0.2;
        let curve = PolynomialCurve::circle(t0.sqrt());
        let p = PotentialSpec::gaussian_disc(t0, 10).unwrap();
        let opts = FieldOptions {
            cells: 600,
            ..FieldOptions::default()
        };
        for z in [C64::new(0.1, 0.05), C64::new(0.0, 0.0), C64::new(0.6, 0.3), C64::new(-0.2, -0.9)] {
            let f = effective_field(&curve, &p, z, &opts).unwrap();
            assert!((f.value - circle_field(t0, z)).abs() < 2e-4, "{z}: {} vs {}", f.value, circle_field(t0, z));
            assert!(f.gradient_residual() < 1e-3, "{z}: {}", f.gradient_residual());
        }
    }
}
