//! Zeros of the orthogonal polynomials, their rotational structure and their limiting law.

use serde::{Deserialize, Serialize};

use super::family::OrthogonalFamily;
use crate::numeric::roots::{aberth, polynomial_roots, AberthOptions};
use crate::schwarz::ZeroDensityLaw;
use crate::{Error, Result, C64};

/// The `n` zeros of `p_n`, by Aberth iteration on the recurrence in the scaled variable.
pub fn polynomial_zeros(family: &OrthogonalFamily, n: usize) -> Result<Vec<C64>> {
    if n > family.n_max {
        return Err(Error::InvalidInput(format!("degree {n} exceeds n_max={}", family.n_max)));
    }
    if n == 0 {
        return Ok(Vec::new());
    }
    // The zeros are the eigenvalues of the leading n x n block of H, so their RMS modulus is
    // bounded by its Frobenius norm over sqrt(n).
    let h = family.hessenberg();
    let mut fro = 0.0;
    for i in 0..n {
        for j in 0..n {
            fro += h[(i, j)].norm_sqr();
        }
    }
    let radius = (fro / n as f64).sqrt();
    let roots = aberth(&family.scaled_poly(n), radius, &AberthOptions::default())?;
    Ok(roots.into_iter().map(|u| u * family.scale).collect())
}

/// Largest distance from `e^{2 pi i / g} z` to the nearest zero, over all zeros `z`.
pub fn rotation_orbit_error(zeros: &[C64], g: usize) -> f64 {
    let rot = C64::from_polar(1.0, std::f64::consts::TAU / g as f64);
    zeros
        .iter()
        .map(|&z| zeros.iter().map(|&y| (rot * z - y).norm()).fold(f64::INFINITY, f64::min))
        .fold(0.0, f64::max)
}

/// Zero counts per ray `arg z = 2 pi k / g`, by nearest ray; zeros at the origin are skipped.
pub fn branch_counts(zeros: &[C64], g: usize, tol: f64) -> Vec<usize> {
    let mut counts = vec![0; g];
    for z in zeros {
        if z.norm() <= tol {
            continue;
        }
        let k = (z.arg() * g as f64 / std::f64::consts::TAU).round() as i64;
        counts[k.rem_euclid(g as i64) as usize] += 1;
    }
    counts
}

/// Zeros of the reduced polynomial `qtilde` with `p_{jg+s}(z) = z^s qtilde_j(z^g)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReducedZeros {
    pub order: usize,
    pub residue: usize,
    /// Zeros of `qtilde_j` as values of `z^g`, sorted by real part.
    pub zeros: Vec<C64>,
    /// Largest `|coefficient|` of `p_n` on a monomial outside the residue class.
    pub off_class: f64,
    /// `max |Im v| / |v|`.
    pub max_imag: f64,
    pub all_positive: bool,
    /// Smallest gap between consecutive zeros relative to the largest zero.
    pub min_gap: f64,
    /// Whether these zeros strictly interlace with those of `qtilde_{j-1}`; `None` for `j <= 1`.
    pub interlaces: Option<bool>,
}

impl ReducedZeros {
    pub fn real_positive_distinct(&self, tol: f64) -> bool {
        self.max_imag <= tol && self.all_positive && (self.zeros.len() < 2 || self.min_gap > tol)
    }
}

fn reduced_roots(family: &OrthogonalFamily, n: usize, g: usize) -> Result<(Vec<C64>, f64)> {
    let c = family.scaled_coefficients(n);
    let s = n % g;
    let off = c
        .iter()
        .enumerate()
        .filter(|(k, _)| k % g != s)
        .map(|(_, x)| x.norm())
        .fold(0.0, f64::max);
    let red: Vec<C64> = c.iter().skip(s).step_by(g).copied().collect();
    let sg = family.scale.powi(g as i32);
    let mut v: Vec<C64> = polynomial_roots(&red)?.into_iter().map(|v| v * sg).collect();
    v.sort_by(|a, b| a.re.total_cmp(&b.re));
    Ok((v, off))
}

/// Reduced-polynomial zeros of `p_n` for a potential of rotation order `g >= 2`, checked for
/// reality, positivity, distinctness and interlacing with degree `n - g`.
pub fn reduced_zeros(family: &OrthogonalFamily, n: usize) -> Result<ReducedZeros> {
    let g = match family.potential.rotation_order() {
        Some(g) if g >= 2 => g,
        _ => return Err(Error::Unsupported("reduced polynomials need a rotation order of at least 2".into())),
    };
    if n > family.n_max {
        return Err(Error::InvalidInput(format!("degree {n} exceeds n_max={}", family.n_max)));
    }
    let (v, off) = reduced_roots(family, n, g)?;
    let vmax = v.iter().map(|x| x.norm()).fold(0.0, f64::max).max(f64::MIN_POSITIVE);
    let max_imag = v.iter().map(|x| x.im.abs() / x.norm().max(f64::MIN_POSITIVE)).fold(0.0, f64::max);
    let all_positive = v.iter().all(|x| x.re > 0.0);
    let min_gap = v.windows(2).map(|w| (w[1].re - w[0].re) / vmax).fold(f64::INFINITY, f64::min);
    let interlaces = if v.len() >= 2 && n >= g {
        let (prev, _) = reduced_roots(family, n - g, g)?;
        Some(
            prev.len() + 1 == v.len()
                && prev
                    .iter()
                    .enumerate()
                    .all(|(i, b)| v[i].re < b.re && b.re < v[i + 1].re),
        )
    } else {
        None
    };
    Ok(ReducedZeros {
        order: g,
        residue: n % g,
        zeros: v,
        off_class: off,
        max_imag,
        all_positive,
        min_gap,
        interlaces,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct KsReport {
    /// Kolmogorov-Smirnov distance between the projected zeros and the law.
    pub ks: f64,
    pub count: usize,
    /// Zeros farther than the tolerance from the support.
    pub off_support: usize,
}

fn support_distance(law: &ZeroDensityLaw, z: C64) -> f64 {
    let (lo, hi) = law.support();
    match law {
        ZeroDensityLaw::GaussianEllipse { .. } => {
            let along = (z.re - z.re.clamp(lo, hi)).abs();
            along.hypot(z.im)
        }
        ZeroDensityLaw::CubicHypotrochoid { .. } => {
            (0..3)
                .map(|k| {
                    let dir = C64::from_polar(1.0, std::f64::consts::TAU * k as f64 / 3.0);
                    let t = (z * dir.conj()).re.clamp(0.0, hi);
                    (z - dir * t).norm()
                })
                .fold(f64::INFINITY, f64::min)
        }
    }
}

pub fn zero_statistics(zeros: &[C64], law: &ZeroDensityLaw, tol: f64) -> KsReport {
    let mut s: Vec<f64> = zeros.iter().map(|&z| law.coordinate(z)).collect();
    s.sort_by(f64::total_cmp);
    let n = s.len() as f64;
    let ks = s
        .iter()
        .enumerate()
        .map(|(i, &x)| {
            let f = law.cdf(x);
            (f - i as f64 / n).abs().max((f - (i + 1) as f64 / n).abs())
        })
        .fold(0.0, f64::max);
    KsReport {
        ks,
        count: zeros.len(),
        off_support: zeros.iter().filter(|&&z| support_distance(law, z) > tol).count(),
    }
}
