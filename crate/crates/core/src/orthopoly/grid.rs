//! Tensor polar quadrature on the cut-off disc and the weighted inner product.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::curvegeom::curve_from_moments;
use crate::numeric::quad::gauss_legendre;
use crate::{Error, PotentialSpec, Result, C64};

/// Gauss-Legendre in the radius times the trapezoid rule in the angle; `weights` include the
/// Jacobian `r`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct QuadratureGrid {
    pub r_c: f64,
    pub n_r: usize,
    pub n_theta: usize,
    pub nodes: Vec<C64>,
    pub weights: Vec<f64>,
}

pub const MIN_GRID_SIZE: usize = 16;
pub const DEFAULT_N_R: usize = 200;

pub fn build_grid(r_c: f64, n_r: usize, n_theta: usize) -> Result<QuadratureGrid> {
    if !(r_c.is_finite() && r_c > 0.0) {
        return Err(Error::InvalidInput(format!("cut-off radius must be positive, got {r_c}")));
    }
    if n_r < MIN_GRID_SIZE || n_theta < MIN_GRID_SIZE {
        return Err(Error::InvalidInput(format!(
            "grid needs at least {MIN_GRID_SIZE} nodes per axis, got n_r={n_r}, n_theta={n_theta}"
        )));
    }
    let radial = gauss_legendre(n_r, 0.0, r_c);
    let dtheta = std::f64::consts::TAU / n_theta as f64;
    let mut nodes = Vec::with_capacity(n_r * n_theta);
    let mut weights = Vec::with_capacity(n_r * n_theta);
    for &(r, w) in &radial {
        for j in 0..n_theta {
            nodes.push(C64::from_polar(r, j as f64 * dtheta));
            weights.push(w * r * dtheta);
        }
    }
    Ok(QuadratureGrid {
        r_c,
        n_r,
        n_theta,
        nodes,
        weights,
    })
}

impl QuadratureGrid {
    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn area(&self) -> f64 {
        self.weights.iter().sum()
    }

    /// Same cut-off with both node counts doubled.
    pub fn refined(&self) -> Result<Self> {
        build_grid(self.r_c, 2 * self.n_r, 2 * self.n_theta)
    }

    /// `sum_i w_i f(z_i)`; terms are computed in parallel and summed in node order.
    pub fn integrate<F: Fn(C64) -> C64 + Sync>(&self, f: F) -> C64 {
        let terms: Vec<C64> = self.nodes.par_iter().zip(&self.weights).map(|(&z, &w)| f(z) * w).collect();
        terms.into_iter().sum()
    }
}

/// `6 sqrt(t0 n_max / N)` or three times the droplet's outer radius, whichever is larger.
pub fn default_cutoff(potential: &PotentialSpec, n_max: usize) -> f64 {
    let gauss = 6.0 * (potential.t0 * n_max.max(1) as f64 / potential.n as f64).sqrt();
    let outer = if potential.t.is_empty() {
        potential.t0.sqrt()
    } else {
        curve_from_moments(&potential.moments(), 1e-12, 100)
            .map(|c| c.outer_radius())
            .unwrap_or(0.0)
    };
    gauss.max(3.0 * outer)
}

/// At least 256 and at least `4 n_max + 4 (d + 1)` angular nodes.
pub fn default_angular(n_max: usize, d: usize) -> usize {
    256.max(4 * n_max + 4 * (d + 1))
}

pub fn default_grid(potential: &PotentialSpec, n_max: usize) -> Result<QuadratureGrid> {
    build_grid(
        default_cutoff(potential, n_max),
        DEFAULT_N_R,
        default_angular(n_max, potential.degree()),
    )
}

/// `sum_i w_i conj(f(z_i)) g(z_i) exp(-N V(z_i))` for ascending monomial coefficients.
pub fn inner_product(f: &[C64], g: &[C64], potential: &PotentialSpec, grid: &QuadratureGrid) -> C64 {
    let n = potential.n as f64;
    grid.integrate(|z| {
        let fz = crate::numeric::horner(f, z);
        let gz = crate::numeric::horner(g, z);
        fz.conj() * gz * (-n * potential.v(z)).exp()
    })
}

/// As [`inner_product`], failing when doubling both node counts moves the value by more than
/// `1e-9` relative.
pub fn inner_product_checked(f: &[C64], g: &[C64], potential: &PotentialSpec, grid: &QuadratureGrid) -> Result<C64> {
    let coarse = inner_product(f, g, potential, grid);
    let fine = inner_product(f, g, potential, &grid.refined()?);
    if (coarse - fine).norm() > 1e-9 * fine.norm().max(f64::MIN_POSITIVE) {
        return Err(Error::QuadratureNotConverged {
            coarse: coarse.norm(),
            fine: fine.norm(),
        });
    }
    Ok(fine)
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    fn c(re: f64) -> C64 {
        C64::new(re, 0.0)
    }

    #[test]
    fn disc_integrals() {
        let g = build_grid(1.0, 32, 64).unwrap();
        assert!((g.area() - PI).abs() < 1e-12);
        let zz = g.integrate(|z| c(z.norm_sqr()));
        assert!((zz.re - PI / 2.0).abs() < 1e-12);
        assert!(g.integrate(|z| z).norm() < 1e-14);
        assert!(build_grid(1.0, 8, 64).is_err());
    }

    #[test]
    fn gaussian_inner_products() {
        let t0 = 0.3;
        let p = PotentialSpec::gaussian_disc(t0, 5).unwrap();
        let g = build_grid(6.0 * t0.sqrt(), 64, 64).unwrap();
        let one = inner_product(&[c(1.0)], &[c(1.0)], &p, &g);
        assert!((one.re - PI * t0 / 5.0).abs() < 1e-10 * PI * t0);
        let off = inner_product(&[c(0.0), c(0.0), c(1.0)], &[c(0.0), c(0.0), c(0.0), c(1.0)], &p, &g);
        assert!(off.norm() < 1e-15);

        let p1 = PotentialSpec::gaussian_disc(t0, 1).unwrap();
        let g1 = build_grid(6.0 * t0.sqrt(), 64, 64).unwrap();
        let zz = inner_product_checked(&[c(0.0), c(1.0)], &[c(0.0), c(1.0)], &p1, &g1).unwrap();
        assert!((zz.re - PI * t0 * t0).abs() < 1e-10);
    }
}
