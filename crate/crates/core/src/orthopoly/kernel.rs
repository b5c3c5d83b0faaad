//! The reproducing kernel `K_N`, correlation functions and the exact Gaussian density.

use nalgebra::DMatrix;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::family::OrthogonalFamily;
use super::grid::QuadratureGrid;
use crate::numeric::poisson_tails;
use crate::{Error, Result, C64};

fn require_kernel(family: &OrthogonalFamily) -> Result<usize> {
    let n = family.potential.n;
    if n > family.n_max + 1 {
        return Err(Error::InvalidInput(format!(
            "the kernel for N={n} needs degrees 0..{}, family stops at {}",
            n - 1,
            family.n_max
        )));
    }
    Ok(n)
}

/// `K_N(w, z) = exp(-N (V(w) + V(z)) / 2) sum_{n < N} conj(p_n(w)) p_n(z) / h_n`.
pub fn kernel(family: &OrthogonalFamily, w: C64, z: C64) -> Result<C64> {
    let n = require_kernel(family)?;
    let a = family.weighted_orthonormal(w, n);
    let b = family.weighted_orthonormal(z, n);
    Ok(a.iter().zip(&b).map(|(x, y)| x.conj() * y).sum())
}

/// `(1/N) K_N(z, z)`.
pub fn one_point_density(family: &OrthogonalFamily, z: C64) -> Result<f64> {
    let n = require_kernel(family)?;
    let phi = family.weighted_orthonormal(z, n);
    Ok(phi.iter().map(|x| x.norm_sqr()).sum::<f64>() / n as f64)
}

/// `R^(k)(z_1..z_k) = det K_N(z_i, z_j)`.
pub fn correlation(family: &OrthogonalFamily, points: &[C64]) -> Result<f64> {
    let n = require_kernel(family)?;
    let phis: Vec<Vec<C64>> = points.iter().map(|&z| family.weighted_orthonormal(z, n)).collect();
    let k = DMatrix::from_fn(points.len(), points.len(), |i, j| {
        phis[i].iter().zip(&phis[j]).map(|(x, y)| x.conj() * y).sum::<C64>()
    });
    Ok(k.determinant().re)
}

/// Exact one-point density `(1/N) K_N(z, z)` for `V = |z|^2 / t0`:
/// `(1 / (pi t0)) P(Poisson(N |z|^2 / t0) < N)`.
pub fn gaussian_disc_density(t0: f64, n: usize, z: C64) -> f64 {
    poisson_tails(n as f64 * z.norm_sqr() / t0, n).0 / (std::f64::consts::PI * t0)
}

/// `G_{nm} = sum_i w_i phi_n(v_i) conj(phi_m(v_i))` for the weighted orthonormal functions on
/// another grid. On an exact quadrature `G = I`.
pub fn kernel_gram(family: &OrthogonalFamily, grid: &QuadratureGrid) -> Result<DMatrix<C64>> {
    let n = require_kernel(family)?;
    let rows: Vec<DMatrix<C64>> = grid
        .nodes
        .par_chunks(4096)
        .zip(grid.weights.par_chunks(4096))
        .map(|(zs, ws)| {
            let mut g = DMatrix::<C64>::zeros(n, n);
            for (&z, &w) in zs.iter().zip(ws) {
                let phi = family.weighted_orthonormal(z, n);
                for a in 0..n {
                    let pa = phi[a] * w;
                    for b in 0..n {
                        g[(a, b)] += pa * phi[b].conj();
                    }
                }
            }
            g
        })
        .collect();
    let mut g = DMatrix::<C64>::zeros(n, n);
    for part in rows {
        g += part;
    }
    Ok(g)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct KernelReport {
    /// `int K_N(z, z)`.
    pub trace: f64,
    pub trace_relative_error: f64,
    /// Largest `|int K(w,v) K(v,z) dv - K(w,z)| / sqrt(K(w,w) K(z,z))` over the test pairs.
    pub reproducing_error: f64,
    pub pairs: usize,
    pub n_r: usize,
    pub n_theta: usize,
}

/// Trace and reproducing property of `K_N` integrated on `grid`.
pub fn kernel_report(family: &OrthogonalFamily, grid: &QuadratureGrid, pairs: &[(C64, C64)]) -> Result<KernelReport> {
    let n = require_kernel(family)?;
    let g = kernel_gram(family, grid)?;
    let trace = g.trace().re;
    let mut worst: f64 = 0.0;
    for &(w, z) in pairs {
        let a = nalgebra::DVector::from_vec(family.weighted_orthonormal(w, n));
        let b = nalgebra::DVector::from_vec(family.weighted_orthonormal(z, n));
        // K(w, z) = a^H b and the integral is a^H G b.
        let direct = a.dotc(&b);
        let through = a.dotc(&(&g * &b));
        let scale = (a.norm_squared() * b.norm_squared()).sqrt();
        worst = worst.max((through - direct).norm() / scale);
    }
    Ok(KernelReport {
        trace,
        trace_relative_error: (trace - n as f64).abs() / n as f64,
        reproducing_error: worst,
        pairs: pairs.len(),
        n_r: grid.n_r,
        n_theta: grid.n_theta,
    })
}

/// Seeded pairs of points, uniform in the disc of the given radius.
pub fn random_pairs(radius: f64, count: usize, seed: u64) -> Vec<(C64, C64)> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut point = || {
        let r = radius * rng.gen::<f64>().sqrt();
        C64::from_polar(r, rng.gen_range(0.0..std::f64::consts::TAU))
    };
    (0..count).map(|_| (point(), point())).collect()
}
