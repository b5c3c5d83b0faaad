//! Histogram of gas samples and its comparison with the uniform droplet density.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use super::region::{Region, REGION_NODES};
use crate::curvegeom::PolynomialCurve;
use crate::{Error, Result, C64};

/// Normalised histogram on `[-R_c, R_c]^2`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EmpiricalMeasure {
    pub half_width: f64,
    pub bins: usize,
    pub counts: Vec<u64>,
    pub samples: u64,
}

impl EmpiricalMeasure {
    pub fn new(half_width: f64, bins: usize) -> Result<Self> {
        if !(half_width > 0.0) || bins == 0 {
            return Err(Error::InvalidInput(format!(
                "histogram needs a positive width and bins, got {half_width}, {bins}"
            )));
        }
        Ok(Self {
            half_width,
            bins,
            counts: vec![0; bins * bins],
            samples: 0,
        })
    }

    pub fn bin_width(&self) -> f64 {
        2.0 * self.half_width / self.bins as f64
    }

    fn index(&self, x: f64) -> Option<usize> {
        let i = ((x + self.half_width) / self.bin_width()).floor();
        (i >= 0.0 && i < self.bins as f64).then_some(i as usize)
    }

    /// Points outside the box are counted in the normalisation only.
    pub fn add(&mut self, z: C64) {
        self.samples += 1;
        if let (Some(ix), Some(iy)) = (self.index(z.re), self.index(z.im)) {
            self.counts[iy * self.bins + ix] += 1;
        }
    }

    pub fn merge(&mut self, other: &Self) -> Result<()> {
        if self.bins != other.bins || self.half_width != other.half_width {
            return Err(Error::InvalidInput("histograms have different grids".into()));
        }
        for (a, b) in self.counts.iter_mut().zip(&other.counts) {
            *a += b;
        }
        self.samples += other.samples;
        Ok(())
    }

    pub fn center(&self, ix: usize, iy: usize) -> C64 {
        let h = self.bin_width();
        C64::new(-self.half_width + (ix as f64 + 0.5) * h, -self.half_width + (iy as f64 + 0.5) * h)
    }

    pub fn mass(&self, ix: usize, iy: usize) -> f64 {
        if self.samples == 0 {
            0.0
        } else {
            self.counts[iy * self.bins + ix] as f64 / self.samples as f64
        }
    }

    pub fn density(&self, ix: usize, iy: usize) -> f64 {
        self.mass(ix, iy) / self.bin_width().powi(2)
    }

    pub fn total_mass(&self) -> f64 {
        (0..self.bins)
            .flat_map(|iy| (0..self.bins).map(move |ix| (ix, iy)))
            .map(|(ix, iy)| self.mass(ix, iy))
            .sum()
    }

    /// `(ix, iy, center, mass)` for every bin.
    pub fn cells(&self) -> impl Iterator<Item = (usize, usize, C64, f64)> + '_ {
        (0..self.bins).flat_map(move |iy| (0..self.bins).map(move |ix| (ix, iy, self.center(ix, iy), self.mass(ix, iy))))
    }
}

/// Boundary layer `2 sqrt(t0 / N)` excluded from the interior density comparison.
pub fn default_boundary_layer(t0: f64, n: usize) -> f64 {
    2.0 * (t0 / n as f64).sqrt()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DensityReport {
    pub target_density: f64,
    pub boundary_layer: f64,
    /// Mass inside the curve, with straddling bins split by their covered area. Biased when
    /// the density jumps within a bin.
    pub binned_interior_mass: f64,
    /// Interior mass plus the exterior mass within the boundary layer.
    pub mass_within_layer: f64,
    /// Bins inside the curve and farther than the boundary layer from it.
    pub interior_bins: usize,
    pub interior_mean_density: f64,
    pub interior_mean_deviation: f64,
    pub interior_max_deviation: f64,
    /// Mass at distance above half the curve diameter.
    pub exterior_far_mass: f64,
    pub far_distance: f64,
}

/// Fraction of each bin covered by the region, exact in `x` and with `rows` sub-rows in `y`.
fn coverage(measure: &EmpiricalMeasure, region: &Region, rows: usize) -> Vec<f64> {
    let n = measure.bins;
    let h = measure.bin_width();
    let (_, _, y0, y1) = region.bounding_box();
    let mut cov = vec![0.0; n * n];
    for iy in 0..n {
        let lo = -measure.half_width + iy as f64 * h;
        if lo > y1 || lo + h < y0 {
            continue;
        }
        for s in 0..rows {
            let y = lo + (s as f64 + 0.5) * h / rows as f64;
            for (a, b) in region.row_intervals(y) {
                let first = ((a + measure.half_width) / h).floor().max(0.0) as usize;
                let last = (((b + measure.half_width) / h).floor() as usize).min(n - 1);
                for ix in first..=last {
                    let x0 = -measure.half_width + ix as f64 * h;
                    let overlap = (b.min(x0 + h) - a.max(x0)).max(0.0);
                    cov[iy * n + ix] += overlap / (h * rows as f64);
                }
            }
        }
    }
    cov
}

pub fn density_compare(measure: &EmpiricalMeasure, curve: &PolynomialCurve, boundary_layer: f64) -> Result<DensityReport> {
    if !(boundary_layer >= 0.0) {
        return Err(Error::InvalidInput(format!("boundary layer must be non-negative, got {boundary_layer}")));
    }
    let region = Region::from_curve(curve, REGION_NODES);
    let target = 1.0 / (PI * curve.area_t0());
    let cov = coverage(measure, &region, 8);
    let half_diag = measure.bin_width() / std::f64::consts::SQRT_2;
    let far = 0.5 * region.diameter();
    let (mut interior_mass, mut layer_mass, mut far_mass) = (0.0, 0.0, 0.0);
    let mut densities = Vec::new();
    for (ix, iy, c, m) in measure.cells() {
        let f = cov[iy * measure.bins + ix].min(1.0);
        interior_mass += f * m;
        if f >= 1.0 - 1e-12 {
            if region.distance(c) > boundary_layer + half_diag {
                densities.push(measure.density(ix, iy));
            }
        } else if m > 0.0 {
            let d = region.distance(c);
            if d <= boundary_layer {
                layer_mass += (1.0 - f) * m;
            }
            if f == 0.0 && d > far {
                far_mass += m;
            }
        }
    }
    let mean = densities.iter().sum::<f64>() / densities.len().max(1) as f64;
    let max_dev = densities
        .iter()
        .map(|d| (d / target - 1.0).abs())
        .fold(0.0, f64::max);
    Ok(DensityReport {
        target_density: target,
        boundary_layer,
        binned_interior_mass: interior_mass,
        mass_within_layer: interior_mass + layer_mass,
        interior_bins: densities.len(),
        interior_mean_density: mean,
        interior_mean_deviation: (mean / target - 1.0).abs(),
        interior_max_deviation: max_dev,
        exterior_far_mass: far_mass,
        far_distance: far,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn histogram_bookkeeping() {
        let mut m = EmpiricalMeasure::new(1.0, 4).unwrap();
        m.add(C64::new(0.1, 0.1));
        m.add(C64::new(-0.9, 0.6));
        m.add(C64::new(3.0, 0.0));
        assert_eq!(m.counts[2 * 4 + 2], 1);
        assert_eq!(m.counts[3 * 4], 1);
        assert!((m.total_mass() - 2.0 / 3.0).abs() < 1e-15);
        let mut n = m.clone();
        n.merge(&m).unwrap();
        assert_eq!(n.samples, 6);
        assert!(n.merge(&EmpiricalMeasure::new(1.0, 5).unwrap()).is_err());
    }

    #[test]
    fn coverage_of_a_disc_sums_to_its_area() {
        let curve = PolynomialCurve::circle(0.5);
        let region = Region::from_curve(&curve, REGION_NODES);
        let m = EmpiricalMeasure::new(1.0, 50).unwrap();
        let area: f64 = coverage(&m, &region, 16).iter().sum::<f64>() * m.bin_width().powi(2);
        assert!((area - PI * 0.25).abs() < 1e-4, "{area}");
    }

    #[test]
    fn uniform_samples_match_the_target() {
        // Deterministic uniform fill of the disc of radius 0.5.
        let curve = PolynomialCurve::circle(0.5);
        let mut m = EmpiricalMeasure::new(1.0, 200).unwrap();
        let k = 1000;
        for i in 0..k {
            for j in 0..k {
                let z = C64::new(-0.5 + (i as f64 + 0.5) / k as f64, -0.5 + (j as f64 + 0.5) / k as f64);
                if z.norm() < 0.5 {
                    m.add(z);
                }
            }
        }
        let r = density_compare(&m, &curve, 0.05).unwrap();
        assert!((r.binned_interior_mass - 1.0).abs() < 1e-2, "{}", r.binned_interior_mass);
        assert!(r.interior_max_deviation < 2e-2, "{}", r.interior_max_deviation);
        assert_eq!(r.exterior_far_mass, 0.0);
    }
}
