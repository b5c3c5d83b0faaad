//! Polynomial curves, harmonic moments and the inversion between them.

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use crate::numeric::contour::{circle_means, circle_means_fixed, ContourOptions};
use crate::numeric::roots::polynomial_roots;
use crate::{Error, Result, C64};

/// Area and exterior harmonic moments. `t[k-1]` holds `t_k`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HarmonicMoments {
    pub t0: f64,
    pub t: Vec<C64>,
}

impl HarmonicMoments {
    pub fn new(t0: f64, t: Vec<C64>) -> Result<Self> {
        if !(t0.is_finite() && t0 > 0.0) {
            return Err(Error::InvalidInput(format!("t0 must be positive, got {t0}")));
        }
        if t.iter().any(|c| !(c.re.is_finite() && c.im.is_finite())) {
            return Err(Error::InvalidInput("non-finite moment".into()));
        }
        if t.len() >= 2 && t[1].norm() >= 0.5 {
            return Err(Error::InvalidInput(format!("|t2| must be below 1/2, got {}", t[1].norm())));
        }
        Ok(Self { t0, t })
    }

    pub fn circle(t0: f64) -> Self {
        Self { t0, t: Vec::new() }
    }

    /// Moments with only `t0` and `t_k` set.
    pub fn single(t0: f64, k: usize, tk: C64) -> Result<Self> {
        let mut t = vec![C64::new(0.0, 0.0); k];
        t[k - 1] = tk;
        Self::new(t0, t)
    }

    pub fn get(&self, k: usize) -> C64 {
        if k == 0 {
            C64::new(self.t0, 0.0)
        } else {
            self.t.get(k - 1).copied().unwrap_or_default()
        }
    }

    /// `d` with `t_{d+1}` the last nonzero exterior moment; 0 if there is none.
    pub fn degree(&self) -> usize {
        self.t.iter().rposition(|c| c.norm() != 0.0).unwrap_or(0)
    }
}

/// `h(w) = r w + sum_{j=0}^{d} a_j w^{-j}`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PolynomialCurve {
    pub r: f64,
    pub a: Vec<C64>,
}

impl PolynomialCurve {
    /// Trailing zero coefficients are dropped, so `a_d != 0` whenever `d >= 1`.
    pub fn new(r: f64, a: Vec<C64>) -> Result<Self> {
        if !(r.is_finite() && r > 0.0) {
            return Err(Error::InvalidInput(format!("r must be positive, got {r}")));
        }
        if a.iter().any(|c| !(c.re.is_finite() && c.im.is_finite())) {
            return Err(Error::InvalidInput("non-finite coefficient".into()));
        }
        let mut a = a;
        while a.last().is_some_and(|c| c.norm() == 0.0) {
            a.pop();
        }
        Ok(Self { r, a })
    }

    pub fn circle(r: f64) -> Self {
        Self { r, a: Vec::new() }
    }

    pub fn degree(&self) -> usize {
        self.a.len().saturating_sub(1)
    }

    pub fn coeff(&self, j: usize) -> C64 {
        self.a.get(j).copied().unwrap_or_default()
    }

    /// `h(w)` without the `w != 0` check.
    pub fn h(&self, w: C64) -> C64 {
        let inv = 1.0 / w;
        let mut s = C64::new(0.0, 0.0);
        for &a in self.a.iter().rev() {
            s = s * inv + a;
        }
        self.r * w + s
    }

    pub fn dh(&self, w: C64) -> C64 {
        let inv = 1.0 / w;
        let mut s = C64::new(0.0, 0.0);
        let mut p = inv * inv;
        for (j, &a) in self.a.iter().enumerate().skip(1) {
            s -= a * p * j as f64;
            p *= inv;
        }
        self.r + s
    }

    /// `conj(h)(1/w) = r/w + sum conj(a_j) w^j`, equal to `conj(h(w))` on `|w| = 1`.
    pub fn h_reflected(&self, w: C64) -> C64 {
        let mut s = C64::new(0.0, 0.0);
        for &a in self.a.iter().rev() {
            s = s * w + a.conj();
        }
        self.r / w + s
    }

    /// Points `h(e^{i theta_m})`, `m = 0..n`.
    pub fn boundary(&self, n: usize) -> Vec<C64> {
        (0..n)
            .map(|m| self.h(C64::from_polar(1.0, std::f64::consts::TAU * m as f64 / n as f64)))
            .collect()
    }

    /// `max |h|` over the unit circle, sampled on 1024 nodes.
    pub fn outer_radius(&self) -> f64 {
        self.boundary(1024).iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    /// Scales the image: `h -> lambda h`.
    pub fn scaled(&self, lambda: f64) -> Self {
        Self {
            r: self.r * lambda,
            a: self.a.iter().map(|a| a * lambda).collect(),
        }
    }

    /// Closed-form area over pi: `r^2 - sum j |a_j|^2`.
    pub fn area_t0(&self) -> f64 {
        self.r * self.r
            - self
                .a
                .iter()
                .enumerate()
                .map(|(j, a)| j as f64 * a.norm_sqr())
                .sum::<f64>()
    }

    /// Zeros of `w^d h(w)`; all inside the unit disc iff the curve winds once around 0.
    pub fn zeros(&self) -> Result<Vec<C64>> {
        let mut c: Vec<C64> = self.a.iter().rev().copied().collect();
        c.push(C64::new(self.r, 0.0));
        if self.a.is_empty() {
            return Ok(vec![C64::new(0.0, 0.0)]);
        }
        polynomial_roots(&c)
    }
}

/// Interior harmonic moments, `v[k-1]` holds `v_k`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct InteriorMoments {
    pub v: Vec<C64>,
}

pub fn eval_map(curve: &PolynomialCurve, w: C64) -> Result<C64> {
    if w.norm() == 0.0 {
        return Err(Error::Domain("h has a pole at w = 0".into()));
    }
    Ok(curve.h(w))
}

/// Largest root modulus of `r w^{d+1} - sum_j j a_j w^{d-j}`, i.e. of the nonzero critical
/// points of `h`.
pub fn critical_radius(curve: &PolynomialCurve) -> f64 {
    let d = curve.degree();
    if d == 0 || curve.a.iter().skip(1).all(|a| a.norm() == 0.0) {
        return 0.0;
    }
    // ascending coefficients: w^{d-j} carries -j a_j
    let mut c = vec![C64::new(0.0, 0.0); d + 2];
    c[d + 1] = C64::new(curve.r, 0.0);
    for j in 1..=d {
        c[d - j] = -curve.a[j] * j as f64;
    }
    match polynomial_roots(&c) {
        Ok(roots) => roots.iter().map(|z| z.norm()).fold(0.0, f64::max),
        Err(_) => f64::INFINITY,
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum ValidationFailure {
    CriticalRadius,
    NotInjective,
    Orientation,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ValidationReport {
    pub critical_radius: f64,
    /// Minimum of `|h(w_i) - h(w_j)| / |w_i - w_j|` over all node pairs.
    pub min_chord_ratio: f64,
    /// Proper crossings between non-adjacent edges of the boundary polyline.
    pub self_intersections: usize,
    pub tangent_winding: i64,
    pub samples: usize,
    pub failures: Vec<ValidationFailure>,
}

impl ValidationReport {
    pub fn is_valid(&self) -> bool {
        self.failures.is_empty()
    }

    pub fn summary(&self) -> String {
        if self.is_valid() {
            return "valid".into();
        }
        format!(
            "{:?} (R = {:.6}, min chord ratio {:.3e}, crossings {}, winding {})",
            self.failures, self.critical_radius, self.min_chord_ratio, self.self_intersections, self.tangent_winding
        )
    }
}

pub fn validate_curve(curve: &PolynomialCurve, samples: usize) -> Result<ValidationReport> {
    let d = curve.degree();
    if samples < 8 * (d + 1) {
        return Err(Error::InvalidInput(format!(
            "validation needs at least {} samples, got {samples}",
            8 * (d + 1)
        )));
    }
    let crit = critical_radius(curve);
    let w: Vec<C64> = (0..samples)
        .map(|m| C64::from_polar(1.0, std::f64::consts::TAU * m as f64 / samples as f64))
        .collect();
    let z: Vec<C64> = w.iter().map(|&w| curve.h(w)).collect();

    let mut min_ratio = f64::INFINITY;
    for i in 0..samples {
        for j in (i + 1)..samples {
            let ratio = (z[i] - z[j]).norm() / (w[i] - w[j]).norm();
            min_ratio = min_ratio.min(ratio);
        }
    }
    let crossings = polyline_self_intersections(&z);

    let mut winding = 0.0;
    let mut degenerate_tangent = false;
    let tangent: Vec<C64> = w.iter().map(|&w| C64::i() * w * curve.dh(w)).collect();
    for m in 0..samples {
        let (a, b) = (tangent[m], tangent[(m + 1) % samples]);
        if a.norm() == 0.0 || b.norm() == 0.0 {
            degenerate_tangent = true;
            break;
        }
        winding += (b / a).arg();
    }
    let winding = (winding / std::f64::consts::TAU).round() as i64;

    let mut failures = Vec::new();
    if crit >= 1.0 {
        failures.push(ValidationFailure::CriticalRadius);
    }
    if crossings > 0 || min_ratio <= 1e-9 * curve.r {
        failures.push(ValidationFailure::NotInjective);
    }
    if degenerate_tangent || winding != 1 {
        failures.push(ValidationFailure::Orientation);
    }
    Ok(ValidationReport {
        critical_radius: crit,
        min_chord_ratio: min_ratio,
        self_intersections: crossings,
        tangent_winding: if degenerate_tangent { 0 } else { winding },
        samples,
        failures,
    })
}

fn polyline_self_intersections(z: &[C64]) -> usize {
    let n = z.len();
    let cross = |o: C64, a: C64, b: C64| (a - o).re * (b - o).im - (a - o).im * (b - o).re;
    let mut count = 0;
    for i in 0..n {
        let (p1, p2) = (z[i], z[(i + 1) % n]);
        for j in (i + 2)..n {
            if i == 0 && j == n - 1 {
                continue;
            }
            let (q1, q2) = (z[j], z[(j + 1) % n]);
            let d1 = cross(p1, p2, q1);
            let d2 = cross(p1, p2, q2);
            let d3 = cross(q1, q2, p1);
            let d4 = cross(q1, q2, p2);
            if d1 * d2 < 0.0 && d3 * d4 < 0.0 {
                count += 1;
            }
        }
    }
    count
}

#[derive(Debug, Clone, Copy)]
pub struct MomentOptions {
    pub contour: ContourOptions,
    /// Accept curves that do not enclose the origin; moments are then the residue-at-infinity
    /// (universal polynomial) values.
    pub shifted: bool,
    pub validation_samples: usize,
}

impl Default for MomentOptions {
    fn default() -> Self {
        Self {
            contour: ContourOptions::default(),
            shifted: false,
            validation_samples: 512,
        }
    }
}

#[derive(Debug, Clone)]
pub struct MomentReport {
    pub moments: HarmonicMoments,
    pub t0_contour: f64,
    /// Node count at which doubling stopped changing the result.
    pub nodes: usize,
    pub origin_enclosed: bool,
}

pub fn moments_of_curve(curve: &PolynomialCurve, k_max: usize) -> Result<HarmonicMoments> {
    moments_of_curve_with(curve, k_max, &MomentOptions::default()).map(|r| r.moments)
}

pub fn moments_of_curve_with(curve: &PolynomialCurve, k_max: usize, opts: &MomentOptions) -> Result<MomentReport> {
    let report = validate_curve(curve, opts.validation_samples.max(8 * (curve.degree() + 1)))?;
    if !report.is_valid() {
        return Err(Error::InvalidCurve(Box::new(report)));
    }
    let zeros = curve.zeros()?;
    let origin_enclosed = zeros.iter().all(|z| z.norm() < 1.0);
    if !origin_enclosed && !opts.shifted {
        return Err(Error::Domain(
            "curve does not enclose the origin; set the shifted-moment flag".into(),
        ));
    }
    let max_zero = zeros.iter().map(|z| z.norm()).fold(0.0, f64::max);
    let rho = 2.0 * max_zero.max(1.0);
    let means = circle_means(rho, opts.contour, |w| moment_integrands(curve, w, k_max))?;
    let t0_contour = means.values[0].re;
    let t0 = curve.area_t0();
    if (t0 - t0_contour).abs() > 1e-10 * t0.abs().max(1.0) {
        return Err(Error::Domain(format!(
            "closed-form area {t0:.16e} disagrees with contour value {t0_contour:.16e}"
        )));
    }
    if t0 <= 0.0 {
        return Err(Error::Domain(format!("non-positive area t0 = {t0}")));
    }
    let t = (1..=k_max).map(|k| means.values[k] / k as f64).collect();
    Ok(MomentReport {
        moments: HarmonicMoments { t0, t },
        t0_contour,
        nodes: means.nodes,
        origin_enclosed,
    })
}

/// Folded integrands `conj(h)(1/w) h'(w) h(w)^{-k} w` for `k = 0..=k_max`.
fn moment_integrands(curve: &PolynomialCurve, w: C64, k_max: usize) -> Vec<C64> {
    let mut f = curve.h_reflected(w) * curve.dh(w) * w;
    let inv = 1.0 / curve.h(w);
    let mut out = Vec::with_capacity(k_max + 1);
    out.push(f);
    for _ in 0..k_max {
        f *= inv;
        out.push(f);
    }
    out
}

/// Residue-at-infinity moments on a fixed 256-node rule, no validity checks. Used inside the
/// Newton iteration where intermediate iterates need not be valid curves.
fn forward_moments(curve: &PolynomialCurve, k_max: usize) -> (f64, Vec<C64>) {
    let lead = curve.r;
    let n = curve.a.len();
    // Fujiwara-type bound on the zeros of w^d h(w).
    let bound = curve
        .a
        .iter()
        .enumerate()
        .map(|(j, a)| (a.norm() / lead).powf(1.0 / (j + 1) as f64))
        .fold(0.0, f64::max);
    let rho = 2.0 * (2.0 * bound).max(1.0);
    let m = 256.max(4 * (n + k_max));
    let v = circle_means_fixed(rho, m, |w| moment_integrands(curve, w, k_max));
    let t = (1..=k_max).map(|k| v[k] / k as f64).collect();
    (curve.area_t0(), t)
}

pub fn interior_moments(curve: &PolynomialCurve, k_max: usize) -> Result<InteriorMoments> {
    interior_moments_with(curve, k_max, ContourOptions::default()).map(|r| r.0)
}

/// Also returns the node count at which the trapezoid sums settled.
pub fn interior_moments_with(
    curve: &PolynomialCurve,
    k_max: usize,
    contour: ContourOptions,
) -> Result<(InteriorMoments, usize)> {
    let report = validate_curve(curve, 512.max(8 * (curve.degree() + 1)))?;
    if !report.is_valid() {
        return Err(Error::InvalidCurve(Box::new(report)));
    }
    let means = circle_means(1.0, contour, |w| {
        let hw = curve.h(w);
        let mut f = curve.h_reflected(w) * curve.dh(w) * w;
        (0..k_max)
            .map(|_| {
                f *= hw;
                f
            })
            .collect()
    })?;
    Ok((InteriorMoments { v: means.values }, means.nodes))
}

#[derive(Debug, Clone)]
pub struct InversionReport {
    pub curve: PolynomialCurve,
    /// Max componentwise moment mismatch at the returned curve.
    pub residual: f64,
    pub iterations: usize,
    /// Number of homotopy steps used when the direct Newton iteration failed (0 otherwise).
    pub continuation_steps: usize,
}

pub fn curve_from_moments(moments: &HarmonicMoments, tol: f64, max_iter: usize) -> Result<PolynomialCurve> {
    curve_from_moments_report(moments, tol, max_iter).map(|r| r.curve)
}

/// Damped Newton in `(rho, alpha_j) = (r^2, r^{-j} a_j)` from the small-area initial guess
/// `rho = t0/(1 - 4|t2|^2)`, `alpha_j = (j+1) conj(t_{j+1})`. If the direct iteration fails,
/// a Newton homotopy from the moments of the initial guess is tracked to the target.
pub fn curve_from_moments_report(moments: &HarmonicMoments, tol: f64, max_iter: usize) -> Result<InversionReport> {
    let moments = HarmonicMoments::new(moments.t0, moments.t.clone())?;
    let d = moments.degree();
    let target = pack_moments(moments.t0, &(1..=d + 1).map(|k| moments.get(k)).collect::<Vec<_>>());
    let t2 = moments.get(2).norm();
    let mut x0 = vec![moments.t0 / (1.0 - 4.0 * t2 * t2)];
    for j in 0..=d {
        let alpha = moments.get(j + 1).conj() * (j + 1) as f64;
        x0.push(alpha.re);
        x0.push(alpha.im);
    }

    let (x, residual, iterations, steps) = match newton(&x0, &target, d, tol, max_iter) {
        Ok((x, res, it)) => (x, res, it, 0),
        Err(direct) => match homotopy(&x0, &target, d, tol, max_iter) {
            Ok((x, res, it, steps)) => (x, res, it, steps),
            Err(_) => return Err(direct),
        },
    };
    let curve = unpack_curve(&x, d)?;
    let report = validate_curve(&curve, 512.max(8 * (d + 1)))?;
    if !report.is_valid() {
        return Err(Error::OutsideMomentSpace(Box::new(report)));
    }
    Ok(InversionReport {
        curve,
        residual,
        iterations,
        continuation_steps: steps,
    })
}

fn pack_moments(t0: f64, t: &[C64]) -> Vec<f64> {
    let mut y = vec![t0];
    for c in t {
        y.push(c.re);
        y.push(c.im);
    }
    y
}

fn unpack_curve(x: &[f64], d: usize) -> Result<PolynomialCurve> {
    if !(x[0] > 0.0) {
        return Err(Error::Domain(format!("non-positive r^2 = {}", x[0])));
    }
    let r = x[0].sqrt();
    let a = (0..=d)
        .map(|j| C64::new(x[1 + 2 * j], x[2 + 2 * j]) * r.powi(j as i32))
        .collect();
    PolynomialCurve::new(r, a)
}

fn forward_packed(x: &[f64], d: usize) -> Option<Vec<f64>> {
    let curve = unpack_curve(x, d).ok()?;
    let (t0, t) = forward_moments(&curve, d + 1);
    let y = pack_moments(t0, &t);
    y.iter().all(|v| v.is_finite()).then_some(y)
}

fn max_abs_diff(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max)
}

fn newton_step(x: &[f64], fx: &[f64], target: &[f64], d: usize) -> Option<Vec<f64>> {
    let n = x.len();
    let mut jac = DMatrix::<f64>::zeros(n, n);
    for c in 0..n {
        let h = 1e-6 * x[c].abs().max(1.0);
        let mut xp = x.to_vec();
        let mut xm = x.to_vec();
        xp[c] += h;
        xm[c] -= h;
        let fp = forward_packed(&xp, d)?;
        let fm = forward_packed(&xm, d)?;
        for r in 0..n {
            jac[(r, c)] = (fp[r] - fm[r]) / (2.0 * h);
        }
    }
    let rhs = DVector::from_iterator(n, fx.iter().zip(target).map(|(f, t)| t - f));
    let delta = jac.lu().solve(&rhs)?;
    Some(delta.iter().copied().collect())
}

fn newton(x0: &[f64], target: &[f64], d: usize, tol: f64, max_iter: usize) -> Result<(Vec<f64>, f64, usize)> {
    let mut x = x0.to_vec();
    let mut fx = forward_packed(&x, d).ok_or_else(|| Error::Domain("initial guess is not a curve".into()))?;
    let mut res = max_abs_diff(&fx, target);
    for it in 0..max_iter {
        if res <= tol {
            return Ok((x, res, it));
        }
        let Some(delta) = newton_step(&x, &fx, target, d) else {
            break;
        };
        let mut lambda = 1.0;
        let mut accepted = false;
        while lambda > 1e-12 {
            let cand: Vec<f64> = x.iter().zip(&delta).map(|(a, b)| a + lambda * b).collect();
            if cand[0] > 0.0 {
                if let Some(fc) = forward_packed(&cand, d) {
                    let rc = max_abs_diff(&fc, target);
                    if rc < res {
                        x = cand;
                        fx = fc;
                        res = rc;
                        accepted = true;
                        break;
                    }
                }
            }
            lambda *= 0.5;
        }
        if !accepted {
            break;
        }
    }
    if res <= tol {
        return Ok((x, res, max_iter));
    }
    Err(Error::NoConvergence {
        what: "moment inversion",
        iterations: max_iter,
        residual: res,
    })
}

/// Tracks `F(x) = (1 - s) F(x0) + s y` from `s = 0` to `s = 1`.
fn homotopy(
    x0: &[f64],
    target: &[f64],
    d: usize,
    tol: f64,
    max_iter: usize,
) -> Result<(Vec<f64>, f64, usize, usize)> {
    let start = forward_packed(x0, d).ok_or_else(|| Error::Domain("initial guess is not a curve".into()))?;
    let mut x = x0.to_vec();
    let mut s: f64 = 0.0;
    let mut ds: f64 = 0.05;
    let mut steps = 0;
    let mut iterations = 0;
    while s < 1.0 {
        let s_next = (s + ds).min(1.0);
        let goal: Vec<f64> = start
            .iter()
            .zip(target)
            .map(|(a, b)| (1.0 - s_next) * a + s_next * b)
            .collect();
        let inner_tol = if s_next < 1.0 { tol.max(1e-10) } else { tol };
        match newton(&x, &goal, d, inner_tol, 30) {
            Ok((xn, _, it)) => {
                x = xn;
                s = s_next;
                steps += 1;
                iterations += it;
                ds = (ds * 1.5).min(0.25);
            }
            Err(_) => {
                ds *= 0.5;
                if ds < 1e-4 {
                    break;
                }
            }
        }
        if iterations > max_iter * 20 {
            break;
        }
    }
    if s < 1.0 {
        return Err(Error::NoConvergence {
            what: "moment inversion homotopy",
            iterations,
            residual: f64::NAN,
        });
    }
    let (x, res, it) = newton(&x, target, d, tol, max_iter)?;
    Ok((x, res, iterations + it, steps))
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
    fn eval_map_examples() {
        assert_eq!(eval_map(&PolynomialCurve::circle(0.5), c(1.0)).unwrap(), c(0.5));
        assert!((eval_map(&ellipse(), c(1.0)).unwrap() - c(0.7)).norm() < 1e-15);
        let v = eval_map(&hypotrochoid(), C64::i()).unwrap();
        assert!((v - C64::new(-0.027, 0.3)).norm() < 1e-15);
        assert!(matches!(eval_map(&ellipse(), c(0.0)), Err(Error::Domain(_))));
    }

    #[test]
    fn critical_radius_examples() {
        assert_eq!(critical_radius(&PolynomialCurve::circle(0.5)), 0.0);
        assert!((critical_radius(&ellipse()) - (0.2f64 / 0.5).sqrt()).abs() < 1e-13);
        let expected = (2.0 * 0.027 / 0.3f64).cbrt();
        assert!((critical_radius(&hypotrochoid()) - expected).abs() < 1e-13);
    }

    #[test]
    fn validation_examples() {
        let rep = validate_curve(&PolynomialCurve::circle(1.0), 64).unwrap();
        assert!(rep.is_valid());
        assert_eq!(rep.tangent_winding, 1);
        assert!(validate_curve(&ellipse(), 256).unwrap().is_valid());
        let bad = PolynomialCurve::new(0.5, vec![c(0.0), c(0.5)]).unwrap();
        let rep = validate_curve(&bad, 256).unwrap();
        assert!(!rep.is_valid());
        assert!(rep.failures.contains(&ValidationFailure::CriticalRadius));
        assert!(validate_curve(&ellipse(), 8).is_err());
    }

    #[test]
    fn polyline_crossings_are_counted() {
        let square: Vec<C64> = [(0.0, 0.0), (1.0, 0.0), (1.0, 1.0), (0.0, 1.0)]
            .iter()
            .map(|&(x, y)| C64::new(x, y))
            .collect();
        assert_eq!(polyline_self_intersections(&square), 0);
        let bowtie: Vec<C64> = [(0.0, 0.0), (1.0, 1.0), (1.0, 0.0), (0.0, 1.0)]
            .iter()
            .map(|&(x, y)| C64::new(x, y))
            .collect();
        assert_eq!(polyline_self_intersections(&bowtie), 1);
    }

    #[test]
    fn moment_examples() {
        let m = moments_of_curve(&PolynomialCurve::circle(0.5), 4).unwrap();
        assert!((m.t0 - 0.25).abs() < 1e-15);
        assert!(m.t.iter().all(|t| t.norm() < 1e-15));

        let m = moments_of_curve(&ellipse(), 4).unwrap();
        assert!((m.t0 - 0.21).abs() < 1e-15);
        assert!((m.get(2) - c(0.2)).norm() < 1e-14);
        assert!(m.get(1).norm() < 1e-15 && m.get(3).norm() < 1e-15);

        let m = moments_of_curve(&hypotrochoid(), 5).unwrap();
        assert!((m.t0 - 0.088542).abs() < 1e-15);
        assert!((m.get(3) - c(0.1)).norm() < 1e-14);
    }

    #[test]
    fn interior_examples() {
        let v = interior_moments(&PolynomialCurve::circle(0.5), 5).unwrap();
        assert!(v.v.iter().all(|x| x.norm() < 1e-15));
        let v = interior_moments(&ellipse(), 3).unwrap();
        assert!(v.v[0].norm() < 1e-15);
    }

    #[test]
    fn origin_outside_needs_flag() {
        let shifted = PolynomialCurve::new(0.1, vec![c(0.5), c(0.02)]).unwrap();
        assert!(moments_of_curve(&shifted, 3).is_err());
        let opts = MomentOptions {
            shifted: true,
            ..Default::default()
        };
        let rep = moments_of_curve_with(&shifted, 3, &opts).unwrap();
        assert!(!rep.origin_enclosed);
    }

    #[test]
    fn inversion_examples() {
        let circle = curve_from_moments(&HarmonicMoments::circle(0.25), 1e-14, 50).unwrap();
        assert!((circle.r - 0.5).abs() < 1e-12 && circle.a.iter().all(|a| a.norm() < 1e-12));

        let m = HarmonicMoments::single(0.21, 2, c(0.2)).unwrap();
        let e = curve_from_moments(&m, 1e-14, 50).unwrap();
        assert!((e.r - 0.5).abs() < 1e-10);
        assert!((e.coeff(1) - c(0.2)).norm() < 1e-10 && e.coeff(0).norm() < 1e-10);

        let m = HarmonicMoments::single(0.088542, 3, c(0.1)).unwrap();
        let h = curve_from_moments(&m, 1e-14, 50).unwrap();
        assert!((h.r - 0.3).abs() < 1e-10);
        assert!((h.coeff(2) - c(0.027)).norm() < 1e-10);
        assert!(h.coeff(0).norm() < 1e-10 && h.coeff(1).norm() < 1e-10);
    }

    #[test]
    fn json_uses_pairs() {
        let s = serde_json::to_string(&ellipse()).unwrap();
        assert_eq!(s, r#"{"r":0.5,"a":[[0.0,0.0],[0.2,0.0]]}"#);
        let back: PolynomialCurve = serde_json::from_str(&s).unwrap();
        assert_eq!(back, ellipse());
    }
}
