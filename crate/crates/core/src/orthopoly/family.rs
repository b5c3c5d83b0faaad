//! Monic orthogonal polynomials by Arnoldi iteration on the quadrature grid.
//!
//! With `u = z / s`, `s = sqrt(t0)`, the grid vectors `v_n = q_n(z_i) sqrt(w_i exp(-N V_i + c))`
//! satisfy `u v_n = sum_{m <= n+1} H_{m,n} v_m`. The Hessenberg matrix `H` gives the recurrence
//! for evaluating `p_n` anywhere, and the vectors give `L` and `A` directly on the grid.

use nalgebra::DMatrix;
use rayon::prelude::*;

use super::grid::QuadratureGrid;
use crate::numeric::roots::PolyEval;
use crate::{Error, PotentialSpec, Result, C64};

pub const MAX_DEGREE: usize = 64;

/// Relative size of the Arnoldi residual below which the Gram matrix counts as singular.
const POSITIVITY_TOL: f64 = 1e-13;

/// Rotational symmetry of the weight used to decouple the orthogonalisation.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Symmetry {
    /// `V(e^{i phi} z) = V(z)` for all `phi`: `p_n = z^n`.
    Invariant,
    /// `V(e^{2 pi i / g} z) = V(z)`: polynomials only mix degrees congruent mod `g`.
    Cyclic(usize),
    Generic,
}

impl Symmetry {
    fn couples(self, m: usize, n: usize) -> bool {
        match self {
            Symmetry::Invariant => m == n,
            Symmetry::Cyclic(g) => m % g == n % g,
            Symmetry::Generic => true,
        }
    }

    pub fn order(self) -> Option<usize> {
        match self {
            Symmetry::Cyclic(g) => Some(g),
            _ => None,
        }
    }
}

#[derive(Debug, Clone, Copy)]
pub struct FamilyOptions {
    /// Orthogonalise only within residue classes of the rotation order.
    pub exploit_symmetry: bool,
}

impl Default for FamilyOptions {
    fn default() -> Self {
        Self { exploit_symmetry: true }
    }
}

#[derive(Debug, Clone)]
pub struct OrthogonalFamily {
    pub potential: PotentialSpec,
    pub grid: QuadratureGrid,
    pub n_max: usize,
    /// `s = sqrt(t0)`; coefficients are stored for `p_n(z) = s^n phat_n(z / s)`.
    pub scale: f64,
    pub symmetry: Symmetry,
    /// `min_i N V(z_i)`, factored out of the weight.
    pub log_shift: f64,
    /// Largest relative weight `exp(-N V + c)` on the outermost ring.
    pub rim_weight: f64,
    /// Upper bandwidth `d` imposed on the recurrence for a potential whose only harmonic is
    /// `t_{d+1}`.
    pub band: Option<usize>,
    /// Largest Hessenberg entry dropped by the band, `max_{m < n - d} |H_{m,n}|`.
    pub off_band: f64,
    /// Requested degree when positivity loss forced an earlier stop.
    pub truncated_from: Option<usize>,
    pub warning: Option<String>,
    hess: DMatrix<C64>,
    log_hhat: Vec<f64>,
    coeffs: Vec<Vec<C64>>,
    l: DMatrix<C64>,
    a: DMatrix<C64>,
}

fn dot(a: &[C64], b: &[C64]) -> C64 {
    a.iter().zip(b).map(|(x, y)| x.conj() * y).sum()
}

fn norm(a: &[C64]) -> f64 {
    a.iter().map(|x| x.norm_sqr()).sum::<f64>().sqrt()
}

fn axpy(y: &mut [C64], alpha: C64, x: &[C64]) {
    for (yi, xi) in y.iter_mut().zip(x) {
        *yi += alpha * xi;
    }
}

pub fn build_family(potential: &PotentialSpec, grid: &QuadratureGrid, n_max: usize) -> Result<OrthogonalFamily> {
    build_family_with(potential, grid, n_max, FamilyOptions::default())
}

pub fn build_family_with(
    potential: &PotentialSpec,
    grid: &QuadratureGrid,
    n_max: usize,
    opts: FamilyOptions,
) -> Result<OrthogonalFamily> {
    if n_max > potential.n {
        return Err(Error::InvalidInput(format!("n_max={n_max} exceeds N={}", potential.n)));
    }
    if n_max > MAX_DEGREE {
        return Err(Error::InvalidInput(format!("n_max={n_max} exceeds the cap {MAX_DEGREE}")));
    }
    let symmetry = match (opts.exploit_symmetry, potential.rotation_order()) {
        (false, _) => Symmetry::Generic,
        (true, None) => Symmetry::Invariant,
        (true, Some(1)) => Symmetry::Generic,
        (true, Some(g)) => Symmetry::Cyclic(g),
    };
    let s = potential.t0.sqrt();
    let nn = potential.n as f64;
    let nv: Vec<f64> = grid.nodes.par_iter().map(|&z| nn * potential.v(z)).collect();
    let shift = nv.iter().cloned().fold(f64::INFINITY, f64::min);
    let root_w: Vec<C64> = grid
        .weights
        .iter()
        .zip(&nv)
        .map(|(&w, &e)| C64::new((w * (-(e - shift)).exp()).sqrt(), 0.0))
        .collect();
    let r_rim = grid.nodes.iter().map(|z| z.norm()).fold(0.0, f64::max);
    let rim_weight = grid
        .nodes
        .iter()
        .zip(&nv)
        .filter(|(z, _)| z.norm() >= r_rim * (1.0 - 1e-12))
        .map(|(_, &e)| (-(e - shift)).exp())
        .fold(0.0, f64::max);
    let u: Vec<C64> = grid.nodes.iter().map(|z| z / s).collect();

    let n0 = norm(&root_w);
    if !(n0 > 0.0) {
        return Err(Error::PositivityLoss { n_star: 0 });
    }
    let mut vs: Vec<Vec<C64>> = vec![root_w.iter().map(|x| x / n0).collect()];
    let mut dvs: Vec<Vec<C64>> = vec![vec![C64::new(0.0, 0.0); u.len()]];
    let mut log_hhat = vec![2.0 * n0.ln()];
    let mut hess = DMatrix::<C64>::zeros(n_max + 2, n_max + 1);
    let mut top = n_max;
    let mut truncated_from = None;
    let mut warning = None;

    for n in 0..=n_max {
        let mut x: Vec<C64> = u.iter().zip(&vs[n]).map(|(a, b)| a * b).collect();
        let before = norm(&x);
        let targets: Vec<usize> = (0..=n).filter(|&m| symmetry.couples(m, n + 1)).collect();
        for _pass in 0..2 {
            let h: Vec<C64> = targets.par_iter().map(|&m| dot(&vs[m], &x)).collect();
            for (&m, &hm) in targets.iter().zip(&h) {
                axpy(&mut x, -hm, &vs[m]);
                hess[(m, n)] += hm;
            }
        }
        let beta = norm(&x);
        if !(beta > POSITIVITY_TOL * before) {
            top = n;
            truncated_from = Some(n_max);
            warning = Some(format!(
                "Gram matrix lost positivity at degree {}; family truncated at degree {n}",
                n + 1
            ));
            break;
        }
        hess[(n + 1, n)] = C64::new(beta, 0.0);
        let vnext: Vec<C64> = x.iter().map(|xi| xi / beta).collect();
        let mut dnext: Vec<C64> = vs[n].iter().zip(&u).zip(&dvs[n]).map(|((v, u), d)| v + u * d).collect();
        for m in 0..=n {
            let hm = hess[(m, n)];
            if hm.norm() != 0.0 {
                axpy(&mut dnext, -hm, &dvs[m]);
            }
        }
        dnext.iter_mut().for_each(|d| *d /= beta);
        log_hhat.push(log_hhat[n] + 2.0 * beta.ln());
        vs.push(vnext);
        dvs.push(dnext);
    }

    // For a single harmonic t_{d+1} the recurrence has d + 2 terms; entries above the band are
    // rounding noise that the tiny zeros near the origin cannot tolerate.
    let band = match (symmetry, potential.single_harmonic()) {
        (Symmetry::Cyclic(g), Some(d)) if g == d + 1 => Some(d),
        _ => None,
    };
    let mut off_band: f64 = 0.0;
    if let Some(d) = band {
        for n in 0..=top {
            for m in 0..n.saturating_sub(d) {
                off_band = off_band.max(hess[(m, n)].norm());
                hess[(m, n)] = C64::new(0.0, 0.0);
            }
        }
    }

    let dim = top + 1;
    let mut l = DMatrix::<C64>::zeros(dim, dim);
    let mut a = DMatrix::<C64>::zeros(dim, dim);
    let entries: Vec<(usize, usize, C64, C64)> = (0..dim * dim)
        .into_par_iter()
        .map(|k| {
            let (m, n) = (k / dim, k % dim);
            let lz: C64 = vs[m].iter().zip(&vs[n]).zip(&u).map(|((vm, vn), uu)| vm.conj() * uu * vn).sum();
            let az = dot(&vs[m], &dvs[n]);
            (m, n, lz * s, az / s)
        })
        .collect();
    for (m, n, lz, az) in entries {
        l[(m, n)] = lz;
        a[(m, n)] = az;
    }

    let mut coeffs: Vec<Vec<C64>> = vec![vec![C64::new(1.0, 0.0)]];
    for n in 0..top {
        let mut next = vec![C64::new(0.0, 0.0); n + 2];
        next[1..].copy_from_slice(&coeffs[n]);
        for m in 0..=n {
            let hm = hess[(m, n)];
            if hm.norm() == 0.0 {
                continue;
            }
            let f = hm * ((log_hhat[n] - log_hhat[m]) / 2.0).exp();
            for (k, &c) in coeffs[m].iter().enumerate() {
                next[k] -= f * c;
            }
        }
        coeffs.push(next);
    }

    Ok(OrthogonalFamily {
        potential: potential.clone(),
        grid: grid.clone(),
        n_max: top,
        scale: s,
        symmetry,
        log_shift: shift,
        rim_weight,
        band,
        off_band,
        truncated_from,
        warning,
        hess,
        log_hhat,
        coeffs,
        l,
        a,
    })
}

impl OrthogonalFamily {
    /// `ln h_n` for `n = 0..=n_max`.
    pub fn log_norms(&self) -> Vec<f64> {
        let ls = self.scale.ln();
        (0..=self.n_max)
            .map(|n| self.log_hhat[n] + 2.0 * n as f64 * ls - self.log_shift)
            .collect()
    }

    pub fn norms(&self) -> Vec<f64> {
        self.log_norms().into_iter().map(f64::exp).collect()
    }

    /// `ln Z_N = ln N! + sum_{n < N} ln h_n`, when the family reaches degree `N - 1`.
    pub fn log_partition(&self) -> Option<f64> {
        let n = self.potential.n;
        if n > self.n_max + 1 {
            return None;
        }
        let ln_fact: f64 = (2..=n).map(|k| (k as f64).ln()).sum();
        Some(ln_fact + self.log_norms()[..n].iter().sum::<f64>())
    }

    /// Coefficients `c_m` with `p_n(z) = s^n sum_m c_m (z / s)^m`; `c_n = 1`.
    pub fn scaled_coefficients(&self, n: usize) -> &[C64] {
        &self.coeffs[n]
    }

    /// Ascending monomial coefficients of `p_n` in `z`.
    pub fn coefficients(&self, n: usize) -> Vec<C64> {
        self.coeffs[n]
            .iter()
            .enumerate()
            .map(|(k, &c)| c * self.scale.powi((n - k) as i32))
            .collect()
    }

    /// Hessenberg recurrence matrix in the scaled variable, `(n_max + 2) x (n_max + 1)`.
    pub fn hessenberg(&self) -> &DMatrix<C64> {
        &self.hess
    }

    /// `L_{m,n} = (q_m, z q_n)` on the grid.
    pub fn l_matrix(&self) -> &DMatrix<C64> {
        &self.l
    }

    /// `A_{m,n} = (q_m, q_n')` on the grid.
    pub fn a_matrix(&self) -> &DMatrix<C64> {
        &self.a
    }

    /// `r_{n+1} = (q_{n+1}, z q_n)` including `n = n_max`.
    pub fn subdiagonal(&self, n: usize) -> f64 {
        self.hess[(n + 1, n)].re * self.scale
    }

    /// `phat_0..phat_n` and their derivatives at the scaled point `u`.
    pub fn monic_scaled_values(&self, u: C64, n: usize) -> (Vec<C64>, Vec<C64>) {
        let mut p = vec![C64::new(1.0, 0.0)];
        let mut dp = vec![C64::new(0.0, 0.0)];
        for k in 0..n {
            let mut next = u * p[k];
            let mut dnext = p[k] + u * dp[k];
            for m in 0..=k {
                let hm = self.hess[(m, k)];
                if hm.norm() == 0.0 {
                    continue;
                }
                let f = hm * ((self.log_hhat[k] - self.log_hhat[m]) / 2.0).exp();
                next -= f * p[m];
                dnext -= f * dp[m];
            }
            p.push(next);
            dp.push(dnext);
        }
        (p, dp)
    }

    /// `p_n(z)`.
    pub fn eval_monic(&self, n: usize, z: C64) -> C64 {
        let (p, _) = self.monic_scaled_values(z / self.scale, n);
        p[n] * self.scale.powi(n as i32)
    }

    /// `q_0(z) .. q_{count-1}(z) * exp(-(N V(z) - c) / 2)`, orthonormal against the
    /// shifted weight so that `K_N` needs no further factors.
    pub fn weighted_orthonormal(&self, z: C64, count: usize) -> Vec<C64> {
        let u = z / self.scale;
        let damp = (-(self.potential.n as f64 * self.potential.v(z) - self.log_shift) / 2.0).exp();
        let mut q = Vec::with_capacity(count);
        q.push(C64::new((-self.log_hhat[0] / 2.0).exp(), 0.0));
        for k in 0..count.saturating_sub(1) {
            let mut next = u * q[k];
            for m in 0..=k {
                let hm = self.hess[(m, k)];
                if hm.norm() != 0.0 {
                    next -= hm * q[m];
                }
            }
            q.push(next / self.hess[(k + 1, k)]);
        }
        q.iter_mut().for_each(|x| *x *= damp);
        q
    }

    /// `p_n` as a root-finding target in the scaled variable.
    pub fn scaled_poly(&self, n: usize) -> ScaledMonic<'_> {
        ScaledMonic { family: self, n }
    }
}

/// `phat_n(u)` evaluated through the recurrence.
pub struct ScaledMonic<'a> {
    family: &'a OrthogonalFamily,
    n: usize,
}

impl PolyEval for ScaledMonic<'_> {
    fn degree(&self) -> usize {
        self.n
    }

    fn eval(&self, u: C64) -> (C64, C64) {
        let (p, dp) = self.family.monic_scaled_values(u, self.n);
        (p[self.n], dp[self.n])
    }
}

/// `ln h_n` from a Cholesky factorisation of the moment matrix `(z^m, z^n)`, built on the same
/// grid in the scaled basis. Independent of the Arnoldi route; loses accuracy first as `n`
/// grows because the moment matrix is ill conditioned.
pub fn moment_cholesky_log_norms(potential: &PotentialSpec, grid: &QuadratureGrid, n_max: usize) -> Result<Vec<f64>> {
    let s = potential.t0.sqrt();
    let nn = potential.n as f64;
    let nv: Vec<f64> = grid.nodes.iter().map(|&z| nn * potential.v(z)).collect();
    let shift = nv.iter().cloned().fold(f64::INFINITY, f64::min);
    let dim = n_max + 1;
    let cols: Vec<Vec<C64>> = (0..dim)
        .into_par_iter()
        .map(|m| {
            let mut col = vec![C64::new(0.0, 0.0); dim];
            for ((z, &w), &e) in grid.nodes.iter().zip(&grid.weights).zip(&nv) {
                let om = w * (-(e - shift)).exp();
                if om == 0.0 {
                    continue;
                }
                let u = z / s;
                let um = u.powu(m as u32);
                let mut un = C64::new(om, 0.0);
                for c in col.iter_mut() {
                    *c += um.conj() * un;
                    un *= u;
                }
            }
            col
        })
        .collect();
    let g = DMatrix::from_fn(dim, dim, |m, n| cols[m][n]);
    let mut r = DMatrix::<C64>::zeros(dim, dim);
    let mut out = Vec::with_capacity(dim);
    for j in 0..dim {
        let mut d = g[(j, j)].re;
        for k in 0..j {
            d -= r[(k, j)].norm_sqr();
        }
        if !(d > 0.0 && d.is_finite()) {
            return Err(Error::PositivityLoss { n_star: j });
        }
        let rjj = d.sqrt();
        r[(j, j)] = C64::new(rjj, 0.0);
        for i in j + 1..dim {
            let mut x = g[(j, i)];
            for k in 0..j {
                x -= r[(k, j)].conj() * r[(k, i)];
            }
            r[(j, i)] = x / rjj;
        }
        out.push(d.ln() + 2.0 * j as f64 * s.ln() - shift);
    }
    Ok(out)
}
