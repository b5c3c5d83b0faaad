//! Schwarz functions of polynomial curves, closed forms for the ellipse and hypotrochoid,
//! and the line densities carried by their branch cuts.

use std::f64::consts::{PI, TAU};

use serde::{Deserialize, Serialize};

use crate::curvegeom::{critical_radius, curve_from_moments, HarmonicMoments, PolynomialCurve};
use crate::numeric::{cbrt, quad};
use crate::{Error, Result, C64};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SchwarzEvaluation {
    pub value: C64,
    /// `w = h^{-1}(z)`, with `|w|` above the critical radius.
    pub witness: C64,
}

const NEWTON_ITERS: usize = 64;
const RESTARTS: usize = 32;

fn newton_invert(curve: &PolynomialCurve, z: C64, w0: C64) -> Option<C64> {
    let tol = 1e-14 * (1.0 + z.norm());
    let mut w = w0;
    for _ in 0..NEWTON_ITERS {
        if w.norm() < 1e-12 {
            return None;
        }
        let f = curve.h(w) - z;
        if f.norm() <= tol {
            return Some(w);
        }
        let df = curve.dh(w);
        if df.norm() == 0.0 {
            return None;
        }
        w -= f / df;
        if !(w.re.is_finite() && w.im.is_finite()) {
            return None;
        }
    }
    ((curve.h(w) - z).norm() <= 1e-10 * (1.0 + z.norm())).then_some(w)
}

/// `h^{-1}(z)` on the branch `|w| > R`.
pub fn invert_map(curve: &PolynomialCurve, z: C64) -> Result<C64> {
    let crit = critical_radius(curve);
    let accept = |w: &C64| w.norm() > crit;
    if let Some(w) = newton_invert(curve, z, z / curve.r).filter(accept) {
        return Ok(w);
    }
    for k in 0..RESTARTS {
        // deterministic perturbation of the restart ring
        let theta = TAU * (k as f64 + 0.37 * ((k * 7919) % 13) as f64 / 13.0) / RESTARTS as f64;
        if let Some(w) = newton_invert(curve, z, C64::from_polar(1.5, theta)).filter(accept) {
            return Ok(w);
        }
    }
    Err(Error::InsideAnnulus(format!("{z}")))
}

pub fn schwarz_eval(curve: &PolynomialCurve, z: C64) -> Result<SchwarzEvaluation> {
    let w = invert_map(curve, z)?;
    Ok(SchwarzEvaluation {
        value: curve.h_reflected(w),
        witness: w,
    })
}

/// The anti-holomorphic reflection `rho(z) = conj(S(z))`.
pub fn reflection(curve: &PolynomialCurve, z: C64) -> Result<C64> {
    schwarz_eval(curve, z).map(|s| s.value.conj())
}

/// Coefficients read off the Laurent expansion of `S` at infinity.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LaurentTail {
    pub t0: C64,
    /// `t[k-1]` estimates `t_k`, `k = 1..=d+1`.
    pub t: Vec<C64>,
    /// `v[k-1]` estimates `v_k`.
    pub v: Vec<C64>,
    pub radius: f64,
    pub nodes: usize,
}

/// Trapezoid extraction of `c_n = mean S(z_m) z_m^{-n}` on `|z| = radius_factor * max|h|`,
/// identified as `k t_k = c_{k-1}`, `t0 = c_{-1}`, `v_k = c_{-k-1}`.
pub fn laurent_tail(curve: &PolynomialCurve, k_max: usize, radius_factor: f64) -> Result<LaurentTail> {
    if !(radius_factor > 1.0) {
        return Err(Error::InvalidInput(format!("radius factor must exceed 1, got {radius_factor}")));
    }
    let d = curve.degree();
    let radius = radius_factor * curve.outer_radius();
    // powers n = -(k_max+1) ..= d
    let lo = -(k_max as i64) - 1;
    let hi = d as i64;
    let coeffs_at = |m: usize| -> Result<Vec<C64>> {
        let mut sums = vec![C64::new(0.0, 0.0); (hi - lo + 1) as usize];
        for j in 0..m {
            let z = C64::from_polar(radius, TAU * j as f64 / m as f64);
            let s = schwarz_eval(curve, z)?.value;
            let zinv = 1.0 / z;
            let mut p = s * z.powi(-lo as i32);
            for c in sums.iter_mut() {
                *c += p;
                p *= zinv;
            }
        }
        Ok(sums.into_iter().map(|c| c / m as f64).collect())
    };
    let mut m = 256;
    let mut prev = coeffs_at(m)?;
    loop {
        let next = coeffs_at(2 * m)?;
        let change = next
            .iter()
            .zip(&prev)
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max);
        m *= 2;
        prev = next;
        if change <= 1e-14 || m >= 1 << 14 {
            break;
        }
    }
    let at = |n: i64| prev[(n - lo) as usize];
    Ok(LaurentTail {
        t0: at(-1),
        t: (1..=d + 1).map(|k| at(k as i64 - 1) / k as f64).collect(),
        v: (1..=k_max).map(|k| at(-(k as i64) - 1)).collect(),
        radius,
        nodes: m,
    })
}

/// Semi-axes of the ellipse with area `pi t0` and second moment `t2` (real, `0 <= t2 < 1/2`).
pub fn ellipse_axes(t0: f64, t2: f64) -> (f64, f64) {
    let r = (t0 / (1.0 - 4.0 * t2 * t2)).sqrt();
    (r * (1.0 + 2.0 * t2), r * (1.0 - 2.0 * t2))
}

fn check_axes(b1: f64, b2: f64) -> Result<()> {
    if !(b1 > b2 && b2 > 0.0) {
        return Err(Error::InvalidInput(format!("need b1 > b2 > 0, got {b1}, {b2}")));
    }
    Ok(())
}

/// `z sqrt(1 - c^2/z^2)` with the principal root; analytic off `[-c, c]`.
fn focal_root(c2: f64, z: C64) -> C64 {
    z * (1.0 - c2 / (z * z)).sqrt()
}

pub fn ellipse_schwarz(b1: f64, b2: f64, z: C64) -> Result<C64> {
    check_axes(b1, b2)?;
    let c2 = b1 * b1 - b2 * b2;
    if z.im == 0.0 && z.re.abs() <= c2.sqrt() {
        return Err(Error::BranchCut(format!("{z}")));
    }
    Ok(((b1 * b1 + b2 * b2) * z - 2.0 * b1 * b2 * focal_root(c2, z)) / c2)
}

/// Difference between the two sheets of the ellipse Schwarz function at `z`, i.e. the jump a
/// cut through `z` would carry.
pub fn ellipse_sheet_jump(b1: f64, b2: f64, z: C64) -> C64 {
    let c2 = b1 * b1 - b2 * b2;
    4.0 * b1 * b2 * focal_root(c2, z) / c2
}

pub fn ellipse_zero_density(b1: f64, b2: f64, y: f64) -> f64 {
    let c2 = b1 * b1 - b2 * b2;
    if y * y >= c2 {
        return 0.0;
    }
    2.0 * (c2 - y * y).sqrt() / (c2 * PI)
}

fn check_hypotrochoid(r: f64, a: f64) -> Result<()> {
    if !(a > 0.0 && 2.0 * a < r) {
        return Err(Error::InvalidInput(format!("need 0 < 2a < r, got r = {r}, a = {a}")));
    }
    Ok(())
}

/// `|z|` at the tip of each branch: `((27/4) a r^2)^{1/3}`.
pub fn hypotrochoid_support(r: f64, a: f64) -> f64 {
    (6.75 * a * r * r).cbrt()
}

pub fn hypotrochoid_schwarz(r: f64, a: f64, z: C64) -> Result<C64> {
    check_hypotrochoid(r, a)?;
    let z3 = z * z * z;
    if z3.im == 0.0 && z3.re >= 0.0 && z3.re <= 6.75 * a * r * r {
        return Err(Error::BranchCut(format!("{z}")));
    }
    let zeta = z / (3.0 * r);
    let y = 4.0 * r * zeta * zeta * zeta / a;
    let s = (1.0 - y).sqrt();
    // 1 - (2/y)(1 - s) rewritten as -y/(1+s)^2 to avoid cancellation at small y
    let u1 = 1.0 - (2.0 / y) * (1.0 + s);
    let u2 = -y / ((1.0 + s) * (1.0 + s));
    let omega = cbrt(u1) + cbrt(u2);
    Ok(((a * a - r * r) * omega * omega + (2.0 * a * a + r * r) * omega + a * a + 2.0 * r * r) * zeta * zeta / a)
}

/// Line density of zeros along one branch, at distance `s` from the origin.
pub fn hypotrochoid_zero_density(r: f64, a: f64, s: f64) -> f64 {
    let smax = hypotrochoid_support(r, a);
    if !(s > 0.0 && s < smax) {
        return 0.0;
    }
    let zeta = s / (3.0 * r);
    let y = 4.0 * r * zeta.powi(3) / a;
    let root = (1.0 - y).max(0.0).sqrt();
    let wp = ((2.0 / y) * (1.0 + root) - 1.0).cbrt();
    // (2/y)(1 - root) - 1 = (1 - root)/(1 + root)
    let wm = ((1.0 - root) / (1.0 + root)).cbrt();
    let rho = ((wp * wp - wm * wm) * (r * r - a * a) - (wp - wm) * (r * r + 2.0 * a * a)) * 3f64.sqrt()
        / (2.0 * PI * (r * r - 2.0 * a * a));
    (rho * zeta * zeta / a).max(0.0)
}

/// Limiting zero-counting law of orthogonal polynomials at fill fraction `x = n/N`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum ZeroDensityLaw {
    /// Semicircle on the focal segment of the ellipse with semi-axes `b1 > b2`.
    GaussianEllipse { b1: f64, b2: f64, x: f64 },
    /// Three-ray star inside the hypotrochoid `r w + a w^{-2}`.
    CubicHypotrochoid { r: f64, a: f64, x: f64 },
}

impl ZeroDensityLaw {
    /// Law for `V` with moments `(t0, t2)` at fill fraction `x`: the ellipse of area `pi x t0`.
    pub fn gaussian(t0: f64, t2: f64, x: f64) -> Result<Self> {
        if !(x > 0.0 && x <= 1.0) || !(t2 > 0.0 && t2 < 0.5) {
            return Err(Error::InvalidInput(format!("need 0 < x <= 1, 0 < t2 < 1/2; got {x}, {t2}")));
        }
        let (b1, b2) = ellipse_axes(x * t0, t2);
        Ok(Self::GaussianEllipse { b1, b2, x })
    }

    /// Law for `V` with moments `(t0, t3)` at fill fraction `x`, via moment inversion.
    pub fn cubic(t0: f64, t3: f64, x: f64) -> Result<Self> {
        if !(x > 0.0 && x <= 1.0) || !(t3 > 0.0) {
            return Err(Error::InvalidInput(format!("need 0 < x <= 1, t3 > 0; got {x}, {t3}")));
        }
        let m = HarmonicMoments::single(x * t0, 3, C64::new(t3, 0.0))?;
        let curve = curve_from_moments(&m, 1e-14, 100)?;
        let a = curve.coeff(2);
        if a.im.abs() > 1e-12 * a.re.abs() {
            return Err(Error::Unsupported("hypotrochoid with complex a".into()));
        }
        Ok(Self::CubicHypotrochoid { r: curve.r, a: a.re, x })
    }

    /// Projection of a zero to the one-dimensional support coordinate.
    pub fn coordinate(&self, z: C64) -> f64 {
        match self {
            Self::GaussianEllipse { .. } => z.re,
            Self::CubicHypotrochoid { .. } => z.norm(),
        }
    }

    pub fn support(&self) -> (f64, f64) {
        match *self {
            Self::GaussianEllipse { b1, b2, .. } => {
                let c = (b1 * b1 - b2 * b2).sqrt();
                (-c, c)
            }
            Self::CubicHypotrochoid { r, a, .. } => (0.0, hypotrochoid_support(r, a)),
        }
    }

    /// Density of the projected coordinate; for the star all three branches are summed.
    pub fn density(&self, s: f64) -> f64 {
        match *self {
            Self::GaussianEllipse { b1, b2, .. } => ellipse_zero_density(b1, b2, s),
            Self::CubicHypotrochoid { r, a, .. } => 3.0 * hypotrochoid_zero_density(r, a, s),
        }
    }

    /// CDF of the projected coordinate by adaptive quadrature.
    pub fn cdf(&self, s: f64) -> f64 {
        let (lo, hi) = self.support();
        if s <= lo {
            return 0.0;
        }
        if s >= hi {
            return 1.0;
        }
        quad::integrate(|u| self.density(u), lo, s, 1e-13).clamp(0.0, 1.0)
    }
}

/// One sample of a candidate cut: location, unit tangent and the two-sided jump of `S`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CutSample {
    pub z: C64,
    pub tangent: C64,
    /// `S(z + eps n) - S(z - eps n)` with `n = i tangent` the left normal.
    pub jump: C64,
}

impl CutSample {
    /// Zero line density implied by the jump, for a droplet of area `pi * area_t0`.
    pub fn line_density(&self, area_t0: f64) -> f64 {
        -(self.jump * self.tangent).im / (TAU * area_t0)
    }
}

pub const CUT_OFFSET: f64 = 1e-7;

/// Samples the two-sided jump of `s` at the midpoints of the polyline edges.
pub fn sample_cut<F>(polyline: &[C64], s: F, offset: f64) -> Result<Vec<CutSample>>
where
    F: Fn(C64) -> Result<C64>,
{
    let mut out = Vec::with_capacity(polyline.len().saturating_sub(1));
    for pair in polyline.windows(2) {
        let edge = pair[1] - pair[0];
        if edge.norm() == 0.0 {
            continue;
        }
        let tangent = edge / edge.norm();
        let z = 0.5 * (pair[0] + pair[1]);
        let normal = C64::i() * tangent;
        let jump = s(z + offset * normal)? - s(z - offset * normal)?;
        out.push(CutSample { z, tangent, jump });
    }
    Ok(out)
}

/// `max |Re(delta S * alpha')|` over the samples; zero for a genuine cut of a Schwarz function.
pub fn branch_cut_violation(samples: &[CutSample]) -> f64 {
    samples
        .iter()
        .map(|c| (c.jump * c.tangent).re.abs())
        .fold(0.0, f64::max)
}

/// Sampled check of a candidate cut against a two-sided Schwarz evaluator.
pub fn branch_cut_check<F>(polyline: &[C64], s: F) -> Result<f64>
where
    F: Fn(C64) -> Result<C64>,
{
    Ok(branch_cut_violation(&sample_cut(polyline, s, CUT_OFFSET)?))
}

/// Straight polyline from `a` to `b` with `n` edges.
pub fn segment(a: C64, b: C64, n: usize) -> Vec<C64> {
    (0..=n).map(|k| a + (b - a) * (k as f64 / n as f64)).collect()
}

/// Row of a density sampling along cut branches.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DensitySample {
    pub branch: usize,
    pub arclength: f64,
    pub z: C64,
    pub density: f64,
}

/// Ellipse semicircle law on `[-c, c]`, arclength measured from `-c`.
pub fn ellipse_density_samples(b1: f64, b2: f64, n: usize) -> Vec<DensitySample> {
    let c = (b1 * b1 - b2 * b2).sqrt();
    (0..=n)
        .map(|k| {
            let s = 2.0 * c * k as f64 / n as f64;
            let y = s - c;
            DensitySample {
                branch: 0,
                arclength: s,
                z: C64::new(y, 0.0),
                density: ellipse_zero_density(b1, b2, y),
            }
        })
        .collect()
}

/// Line density along the three rays `arg z = 0, 2pi/3, -2pi/3`.
pub fn hypotrochoid_density_samples(r: f64, a: f64, n: usize) -> Vec<DensitySample> {
    let smax = hypotrochoid_support(r, a);
    let mut out = Vec::with_capacity(3 * (n + 1));
    for branch in 0..3 {
        let dir = C64::from_polar(1.0, [0.0, TAU / 3.0, -TAU / 3.0][branch]);
        for k in 0..=n {
            let s = smax * k as f64 / n as f64;
            out.push(DensitySample {
                branch,
                arclength: s,
                z: dir * s,
                density: hypotrochoid_zero_density(r, a, s),
            });
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64) -> C64 {
        C64::new(re, 0.0)
    }

    fn ellipse() -> PolynomialCurve {
        PolynomialCurve::new(0.5, vec![c(0.0), c(0.2)]).unwrap()
    }

    fn hypotrochoid() -> PolynomialCurve {
        PolynomialCurve::new(0.3, vec![c(0.0), c(0.0), c(0.027)]).unwrap()
    }

    #[test]
    fn circle_and_boundary_examples() {
        let s = schwarz_eval(&PolynomialCurve::circle(0.5), c(1.0)).unwrap();
        assert!((s.value - c(0.25)).norm() < 1e-15);
        for curve in [ellipse(), hypotrochoid()] {
            let z = curve.h(c(1.0));
            let s = schwarz_eval(&curve, z).unwrap();
            assert!((s.value - z.conj()).norm() < 1e-12);
            assert!((curve.h(s.witness) - z).norm() <= 1e-10 * (1.0 + z.norm()));
        }
    }

    #[test]
    fn ellipse_closed_form_examples() {
        let (b1, b2): (f64, f64) = (0.7, 0.3);
        assert!((ellipse_schwarz(b1, b2, c(b1)).unwrap() - c(b1)).norm() < 1e-14);
        let ib2 = C64::new(0.0, b2);
        assert!((ellipse_schwarz(b1, b2, ib2).unwrap() + ib2).norm() < 1e-14);
        let generic = schwarz_eval(&ellipse(), c(2.0)).unwrap().value;
        assert!((ellipse_schwarz(b1, b2, c(2.0)).unwrap() - generic).norm() < 1e-10);
        assert!(matches!(ellipse_schwarz(b1, b2, c(0.1)), Err(Error::BranchCut(_))));
        let (e1, e2) = ellipse_axes(0.21, 0.2);
        assert!((e1 - 0.7).abs() < 1e-15 && (e2 - 0.3).abs() < 1e-15);
    }

    #[test]
    fn ellipse_density_examples() {
        let c2: f64 = 0.4;
        assert_eq!(ellipse_zero_density(0.7, 0.3, c2.sqrt()), 0.0);
        let v = ellipse_zero_density(0.7, 0.3, 0.0);
        assert!((v - 2.0 / (PI * c2.sqrt())).abs() < 1e-14);
        assert!((v - 1.00658).abs() < 1e-5);
    }

    #[test]
    fn hypotrochoid_closed_form_examples() {
        let (r, a) = (0.3, 0.027);
        for theta in [0.0, PI / 3.0] {
            let z = hypotrochoid().h(C64::from_polar(1.0, theta));
            let s = hypotrochoid_schwarz(r, a, z).unwrap();
            assert!((s - z.conj()).norm() < 1e-12, "theta {theta}: {s} vs {}", z.conj());
        }
        let generic = schwarz_eval(&hypotrochoid(), c(1.0)).unwrap().value;
        assert!((hypotrochoid_schwarz(r, a, c(1.0)).unwrap() - generic).norm() < 1e-9);
        assert_eq!(hypotrochoid_zero_density(r, a, hypotrochoid_support(r, a)), 0.0);
    }

    #[test]
    fn ellipse_cut_is_a_genuine_cut() {
        let (b1, b2): (f64, f64) = (0.7, 0.3);
        let cc = (b1 * b1 - b2 * b2).sqrt();
        let cut = segment(c(-cc), c(cc), 200);
        let v = branch_cut_check(&cut, |z| ellipse_schwarz(b1, b2, z)).unwrap();
        assert!(v <= 1e-10, "violation {v}");
    }

    #[test]
    fn jump_reproduces_density_formulas() {
        let (b1, b2): (f64, f64) = (0.7, 0.3);
        let cc = (b1 * b1 - b2 * b2).sqrt();
        let samples = sample_cut(&segment(c(-cc), c(cc), 50), |z| ellipse_schwarz(b1, b2, z), CUT_OFFSET).unwrap();
        for s in samples {
            let expected = ellipse_zero_density(b1, b2, s.z.re);
            assert!((s.line_density(b1 * b2) - expected).abs() < 1e-6);
        }
        let (r, a) = (0.3, 0.027);
        let tip = hypotrochoid_support(r, a);
        let ray = segment(c(0.05 * tip), c(0.95 * tip), 40);
        let area = r * r - 2.0 * a * a;
        for s in sample_cut(&ray, |z| hypotrochoid_schwarz(r, a, z), CUT_OFFSET).unwrap() {
            let expected = hypotrochoid_zero_density(r, a, s.z.re);
            assert!((s.line_density(area) - expected).abs() < 1e-6 * (1.0 + expected), "{s:?} {expected}");
        }
    }
}
