//! Operator matrices `L`, `L*`, `A`, the operator identity, the finite-N string equation and
//! the recursion coefficients of single-harmonic potentials.

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use super::family::OrthogonalFamily;
use crate::{Error, Result, C64};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum OperatorRole {
    L,
    LStar,
    A,
    Commutator,
}

/// `O_{m,n} = (q_m, O q_n)` for `m, n <= n_max`.
#[derive(Debug, Clone, PartialEq)]
pub struct OperatorMatrix {
    pub role: OperatorRole,
    pub matrix: DMatrix<C64>,
}

impl OperatorMatrix {
    /// `max_{m >= n + 2} |O_{m,n}|`.
    pub fn below_band(&self) -> f64 {
        let mut worst: f64 = 0.0;
        for n in 0..self.matrix.ncols() {
            for m in n + 2..self.matrix.nrows() {
                worst = worst.max(self.matrix[(m, n)].norm());
            }
        }
        worst
    }

    pub fn max_abs(&self) -> f64 {
        self.matrix.iter().map(|x| x.norm()).fold(0.0, f64::max)
    }
}

pub fn operator_matrices(family: &OrthogonalFamily) -> (OperatorMatrix, OperatorMatrix, OperatorMatrix) {
    let l = family.l_matrix().clone();
    let lstar = l.adjoint();
    (
        OperatorMatrix {
            role: OperatorRole::L,
            matrix: l,
        },
        OperatorMatrix {
            role: OperatorRole::LStar,
            matrix: lstar,
        },
        OperatorMatrix {
            role: OperatorRole::A,
            matrix: family.a_matrix().clone(),
        },
    )
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IdentityReport {
    /// Largest entry of `L* - (t0/N) A - sum k t_k L^{k-1}` on the checked block.
    pub max_residual: f64,
    /// Indices `0..=block` were checked.
    pub block: usize,
    /// Largest entry of the boundary contour term on the same block.
    pub boundary_term: f64,
}

/// Nodes used for the boundary contour term.
pub const BOUNDARY_NODES: usize = 256;

fn matrix_power(l: &DMatrix<C64>, k: usize) -> DMatrix<C64> {
    let mut out = DMatrix::<C64>::identity(l.nrows(), l.ncols());
    for _ in 0..k {
        out = &out * l;
    }
    out
}

/// Checks `L* = (t0/N) A + sum_k k t_k L^{k-1}` on indices `m, n <= n_max - (d+1)`, where
/// the truncated powers of `L` are exact.
pub fn check_operator_identity(family: &OrthogonalFamily) -> Result<IdentityReport> {
    let p = &family.potential;
    let d = p.degree();
    if family.n_max < d + 2 {
        return Err(Error::InvalidInput(format!(
            "operator identity needs n_max >= {}, got {}",
            d + 2,
            family.n_max
        )));
    }
    let (l, lstar, a) = operator_matrices(family);
    let mut rhs = a.matrix.scale(p.t0 / p.n as f64);
    for k in 1..=p.t.len() {
        let tk = p.tk(k);
        if tk.norm() != 0.0 {
            rhs += matrix_power(&l.matrix, k - 1) * (tk * k as f64);
        }
    }
    let res = &lstar.matrix - rhs;
    let block = family.n_max - (d + 1);
    let mut worst: f64 = 0.0;
    for m in 0..=block {
        for n in 0..=block {
            worst = worst.max(res[(m, n)].norm());
        }
    }
    Ok(IdentityReport {
        max_residual: worst,
        block,
        boundary_term: boundary_term(family, block),
    })
}

/// `max_{m,n <= block} |(t0/N) (i/2) \oint conj(q_m) q_n exp(-N V) d conj(z)|` on `|z| = R_c`.
pub fn boundary_term(family: &OrthogonalFamily, block: usize) -> f64 {
    let p = &family.potential;
    let r = family.grid.r_c;
    let count = block + 1;
    let mut acc = DMatrix::<C64>::zeros(count, count);
    let dtheta = std::f64::consts::TAU / BOUNDARY_NODES as f64;
    for j in 0..BOUNDARY_NODES {
        let theta = j as f64 * dtheta;
        let z = C64::from_polar(r, theta);
        // d conj(z) = -i r e^{-i theta} d theta
        let dzbar = C64::new(0.0, -r) * C64::from_polar(1.0, -theta) * dtheta;
        let phi = family.weighted_orthonormal(z, count);
        for m in 0..count {
            for n in 0..count {
                acc[(m, n)] += phi[m].conj() * phi[n] * dzbar;
            }
        }
    }
    let factor = p.t0 / p.n as f64 * 0.5;
    acc.iter().map(|x| x.norm() * factor).fold(0.0, f64::max)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StringReport {
    /// `max |diag - t0/N|`.
    pub diagonal_residual: f64,
    pub off_diagonal: f64,
    /// Indices `0..=block` were checked.
    pub block: usize,
    pub target: f64,
}

/// `Pi_{N-d} [Pi_N L*, Pi_N L] = t0/N`, with `Pi_N` keeping degrees `0..=N`.
pub fn check_string_equation(family: &OrthogonalFamily, d: usize) -> Result<StringReport> {
    let n = family.potential.n;
    if family.n_max < n {
        return Err(Error::InvalidInput(format!(
            "string equation needs degrees 0..={n}, family stops at {}",
            family.n_max
        )));
    }
    let p = family.l_matrix().view((0, 0), (n + 1, n + 1)).into_owned();
    let ph = p.adjoint();
    let comm = &ph * &p - &p * &ph;
    let block = n - d.max(1);
    let target = family.potential.t0 / n as f64;
    let mut diag: f64 = 0.0;
    let mut off: f64 = 0.0;
    for i in 0..=block {
        for j in 0..=block {
            if i == j {
                diag = diag.max((comm[(i, i)] - target).norm());
            } else {
                off = off.max(comm[(i, j)].norm());
            }
        }
    }
    Ok(StringReport {
        diagonal_residual: diag,
        off_diagonal: off,
        block,
        target,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RecursionReport {
    pub d: usize,
    /// `r[n] = L_{n,n-1}` for `1 <= n <= n_max + 1`; `r[0] = 0`.
    pub r: Vec<f64>,
    /// `a[n] = L_{n,n+d}`.
    pub a: Vec<C64>,
    /// `max_n |conj(a_n) - (d+1) t_{d+1} prod_{k=1}^d r_{n+k}|`.
    pub residual_1: f64,
    /// `max_n | |a_n|^2 - r_{n+1}^2 + sum_{k=1}^{d-1} |a_{n-d+k}|^2 + (t0/N)(n+1) |`.
    pub residual_2: f64,
}

pub fn recursion_coefficients(family: &OrthogonalFamily, d: usize) -> Result<RecursionReport> {
    let p = &family.potential;
    let single = p.single_harmonic();
    let gaussian = p.t.is_empty() && d == 0;
    if single != Some(d) && !gaussian {
        return Err(Error::Unsupported(format!(
            "recursion coefficients need a potential with t_{} as the only harmonic moment",
            d + 1
        )));
    }
    let l = family.l_matrix();
    let top = family.n_max;
    let mut r = vec![0.0];
    for n in 1..=top {
        r.push(l[(n, n - 1)].re);
    }
    r.push(family.subdiagonal(top));
    let a: Vec<C64> = (0..=top.saturating_sub(d)).map(|n| l[(n, n + d)]).collect();
    let rr = |k: usize| r.get(k).copied();
    let tk = p.tk(d + 1);
    let coef = tk * (d + 1) as f64;
    let mut res1: f64 = 0.0;
    let mut res2: f64 = 0.0;
    let a_at = |i: isize| if i < 0 { C64::new(0.0, 0.0) } else { a[i as usize] };
    for (n, an) in a.iter().enumerate() {
        let prod: Option<f64> = (1..=d).map(|k| rr(n + k)).product();
        if let Some(prod) = prod {
            res1 = res1.max((an.conj() - coef * prod).norm());
        }
        if let Some(r1) = rr(n + 1) {
            let mut s = an.norm_sqr() - r1 * r1 + p.t0 / p.n as f64 * (n + 1) as f64;
            for k in 1..d {
                s += a_at(n as isize - d as isize + k as isize).norm_sqr();
            }
            res2 = res2.max(s.abs());
        }
    }
    Ok(RecursionReport {
        d,
        r,
        a,
        residual_1: res1,
        residual_2: res2,
    })
}
