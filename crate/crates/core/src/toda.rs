//! Laurent series in `w` and finite-difference checks of the dispersionless string equation
//! `{z, z~} = 1` and the Toda flows `dz/dt_k = {M_k, z}`.

use serde::{Deserialize, Serialize};

use crate::curvegeom::{curve_from_moments_report, HarmonicMoments, PolynomialCurve};
use crate::{Error, Result, C64};

/// `f(w) = sum_{k = lo}^{lo + len - 1} c_k w^k`, with a running bound on the magnitude of
/// coefficients dropped by truncation.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LaurentSeries {
    lo: i64,
    coeffs: Vec<C64>,
    discarded: f64,
}

impl LaurentSeries {
    pub fn zero() -> Self {
        Self {
            lo: 0,
            coeffs: Vec::new(),
            discarded: 0.0,
        }
    }

    pub fn new(lo: i64, coeffs: Vec<C64>) -> Self {
        Self {
            lo,
            coeffs,
            discarded: 0.0,
        }
    }

    pub fn monomial(k: i64, c: C64) -> Self {
        Self::new(k, vec![c])
    }

    pub fn constant(c: C64) -> Self {
        Self::monomial(0, c)
    }

    pub fn lo(&self) -> i64 {
        self.lo
    }

    /// One past the highest stored power.
    pub fn hi(&self) -> i64 {
        self.lo + self.coeffs.len() as i64
    }

    pub fn coeff(&self, k: i64) -> C64 {
        if k < self.lo || k >= self.hi() {
            C64::new(0.0, 0.0)
        } else {
            self.coeffs[(k - self.lo) as usize]
        }
    }

    /// `(power, coefficient)` pairs in ascending order.
    pub fn terms(&self) -> impl Iterator<Item = (i64, C64)> + '_ {
        self.coeffs.iter().enumerate().map(move |(i, &c)| (self.lo + i as i64, c))
    }

    pub fn discarded(&self) -> f64 {
        self.discarded
    }

    pub fn max_abs(&self) -> f64 {
        self.coeffs.iter().map(|c| c.norm()).fold(0.0, f64::max)
    }

    fn l1(&self) -> f64 {
        self.coeffs.iter().map(|c| c.norm()).sum()
    }

    pub fn eval(&self, w: C64) -> C64 {
        self.terms().map(|(k, c)| c * w.powi(k as i32)).sum()
    }

    fn build<F: Fn(i64) -> C64>(lo: i64, hi: i64, f: F, discarded: f64) -> Self {
        if hi <= lo {
            return Self {
                discarded,
                ..Self::zero()
            };
        }
        Self {
            lo,
            coeffs: (lo..hi).map(f).collect(),
            discarded,
        }
    }

    pub fn add(&self, other: &Self) -> Self {
        if self.coeffs.is_empty() {
            return Self {
                discarded: self.discarded + other.discarded,
                ..other.clone()
            };
        }
        if other.coeffs.is_empty() {
            return Self {
                discarded: self.discarded + other.discarded,
                ..self.clone()
            };
        }
        let lo = self.lo.min(other.lo);
        let hi = self.hi().max(other.hi());
        Self::build(lo, hi, |k| self.coeff(k) + other.coeff(k), self.discarded + other.discarded)
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.add(&other.scale(C64::new(-1.0, 0.0)))
    }

    pub fn scale(&self, c: C64) -> Self {
        Self {
            lo: self.lo,
            coeffs: self.coeffs.iter().map(|x| x * c).collect(),
            discarded: self.discarded * c.norm(),
        }
    }

    /// Exact product; the window grows to hold every term.
    pub fn mul(&self, other: &Self) -> Self {
        if self.coeffs.is_empty() || other.coeffs.is_empty() {
            return Self {
                discarded: self.discarded * other.l1() + other.discarded * self.l1(),
                ..Self::zero()
            };
        }
        let mut out = vec![C64::new(0.0, 0.0); self.coeffs.len() + other.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            for (j, b) in other.coeffs.iter().enumerate() {
                out[i + j] += a * b;
            }
        }
        Self {
            lo: self.lo + other.lo,
            coeffs: out,
            discarded: self.discarded * other.l1() + other.discarded * self.l1() + self.discarded * other.discarded,
        }
    }

    pub fn powu(&self, k: u32) -> Self {
        let mut out = Self::constant(C64::new(1.0, 0.0));
        for _ in 0..k {
            out = out.mul(self);
        }
        out
    }

    /// Keeps powers in `[lo, hi]`, adding the dropped magnitude to the discarded mass.
    pub fn truncate(&self, lo: i64, hi: i64) -> Self {
        let dropped: f64 = self
            .terms()
            .filter(|(k, _)| *k < lo || *k > hi)
            .map(|(_, c)| c.norm())
            .sum();
        let a = self.lo.max(lo);
        let b = self.hi().min(hi + 1);
        Self::build(a, b, |k| self.coeff(k), self.discarded + dropped)
    }

    fn filter(&self, keep: impl Fn(i64) -> bool) -> Self {
        Self::build(
            self.lo,
            self.hi(),
            |k| if keep(k) { self.coeff(k) } else { C64::new(0.0, 0.0) },
            self.discarded,
        )
    }

    /// `(f)_+`: strictly positive powers.
    pub fn plus_part(&self) -> Self {
        self.filter(|k| k > 0)
    }

    /// `(f)_0`: the constant term.
    pub fn zero_part(&self) -> Self {
        self.filter(|k| k == 0)
    }

    /// `(f)_-`: strictly negative powers.
    pub fn minus_part(&self) -> Self {
        self.filter(|k| k < 0)
    }

    /// `w d/dw`: `c_k -> k c_k`.
    pub fn w_dw(&self) -> Self {
        Self::build(self.lo, self.hi(), |k| self.coeff(k) * k as f64, self.discarded)
    }

    /// `conj(f(1/conj(w)))`: `c_k -> conj(c_{-k})`.
    pub fn reflect(&self) -> Self {
        Self::build(-self.hi() + 1, -self.lo + 1, |k| self.coeff(-k).conj(), self.discarded)
    }
}

/// `z = h(w)` and `z~ = conj(h)(1/w)` as Laurent series.
pub fn laurent_of_curve(curve: &PolynomialCurve) -> (LaurentSeries, LaurentSeries) {
    let d = curve.a.len() as i64;
    let mut z = LaurentSeries::build(-(d - 1).max(0), 2, |_| C64::new(0.0, 0.0), 0.0);
    for (j, &a) in curve.a.iter().enumerate() {
        z = z.add(&LaurentSeries::monomial(-(j as i64), a));
    }
    z = z.add(&LaurentSeries::monomial(1, C64::new(curve.r, 0.0)));
    let z = z.truncate(z.lo(), 1);
    let zt = z.reflect();
    (z, zt)
}

/// A series sampled at `t0` and `t0 +- eps`.
#[derive(Debug, Clone)]
pub struct T0Stencil {
    pub center: LaurentSeries,
    pub plus: LaurentSeries,
    pub minus: LaurentSeries,
    pub eps: f64,
}

impl T0Stencil {
    pub fn constant(f: LaurentSeries, eps: f64) -> Self {
        Self {
            center: f.clone(),
            plus: f.clone(),
            minus: f,
            eps,
        }
    }

    pub fn d_t0(&self) -> LaurentSeries {
        self.plus.sub(&self.minus).scale(C64::new(0.5 / self.eps, 0.0))
    }

    pub fn map(&self, f: impl Fn(&LaurentSeries) -> LaurentSeries) -> Self {
        Self {
            center: f(&self.center),
            plus: f(&self.plus),
            minus: f(&self.minus),
            eps: self.eps,
        }
    }
}

/// `{f, g} = w f_w g_{t0} - w f_{t0} g_w`, the `t0` derivatives by central differences.
pub fn poisson_bracket(f: &T0Stencil, g: &T0Stencil) -> LaurentSeries {
    let a = f.center.w_dw().mul(&g.d_t0());
    let b = f.d_t0().mul(&g.center.w_dw());
    a.sub(&b)
}

/// Window `[-K, K]` used for Hamiltonians of a degree-`d` family.
pub fn default_window(d: usize) -> i64 {
    4 * (d as i64 + 1)
}

const DISCARD_TOL: f64 = 1e-13;

/// `M_k = (z^k)_+ + (z^k)_0 / 2`, with `z^k` truncated to `[-window, window]`.
pub fn toda_hamiltonian(z: &LaurentSeries, k: u32, window: i64) -> Result<LaurentSeries> {
    let zk = z.powu(k).truncate(-window, window);
    if zk.discarded() > DISCARD_TOL {
        return Err(Error::Domain(format!(
            "Laurent window [-{window}, {window}] drops mass {:.3e}",
            zk.discarded()
        )));
    }
    Ok(zk.plus_part().add(&zk.zero_part().scale(C64::new(0.5, 0.0))))
}

/// `M~_k = (z~^k)_- + (z~^k)_0 / 2`.
pub fn toda_hamiltonian_tilde(zt: &LaurentSeries, k: u32, window: i64) -> Result<LaurentSeries> {
    let zk = zt.powu(k).truncate(-window, window);
    if zk.discarded() > DISCARD_TOL {
        return Err(Error::Domain(format!(
            "Laurent window [-{window}, {window}] drops mass {:.3e}",
            zk.discarded()
        )));
    }
    Ok(zk.minus_part().add(&zk.zero_part().scale(C64::new(0.5, 0.0))))
}

/// Curves at the base point and at `t0 +- eps`, `Re t_k +- eps`, `Im t_k +- eps`.
#[derive(Debug, Clone)]
pub struct FlowStencil {
    pub base: HarmonicMoments,
    pub k: usize,
    pub eps: f64,
    pub center: PolynomialCurve,
    pub t0_plus: PolynomialCurve,
    pub t0_minus: PolynomialCurve,
    pub re_plus: PolynomialCurve,
    pub re_minus: PolynomialCurve,
    pub im_plus: PolynomialCurve,
    pub im_minus: PolynomialCurve,
    /// Largest Newton residual among the seven inversions.
    pub max_residual: f64,
}

pub const STENCIL_NEWTON_TOL: f64 = 1e-13;

impl FlowStencil {
    pub fn build(base: &HarmonicMoments, k: usize, eps: f64) -> Result<Self> {
        if k == 0 {
            return Err(Error::InvalidInput("flow index starts at 1".into()));
        }
        let mut t = base.t.clone();
        if t.len() < k {
            t.resize(k, C64::new(0.0, 0.0));
        }
        let base = HarmonicMoments::new(base.t0, t)?;
        let shifted = |dt0: f64, dtk: C64| -> Result<(PolynomialCurve, f64)> {
            let mut m = base.clone();
            m.t0 += dt0;
            m.t[k - 1] += dtk;
            let rep = curve_from_moments_report(&m, STENCIL_NEWTON_TOL, 100)?;
            Ok((rep.curve, rep.residual))
        };
        let pts = [
            (0.0, C64::new(0.0, 0.0)),
            (eps, C64::new(0.0, 0.0)),
            (-eps, C64::new(0.0, 0.0)),
            (0.0, C64::new(eps, 0.0)),
            (0.0, C64::new(-eps, 0.0)),
            (0.0, C64::new(0.0, eps)),
            (0.0, C64::new(0.0, -eps)),
        ];
        let mut curves = Vec::with_capacity(7);
        let mut max_residual: f64 = 0.0;
        for (dt0, dtk) in pts {
            let (c, res) = shifted(dt0, dtk)?;
            max_residual = max_residual.max(res);
            curves.push(c);
        }
        let mut it = curves.into_iter();
        let mut next = || it.next().expect("seven stencil curves");
        Ok(Self {
            base,
            k,
            eps,
            center: next(),
            t0_plus: next(),
            t0_minus: next(),
            re_plus: next(),
            re_minus: next(),
            im_plus: next(),
            im_minus: next(),
            max_residual,
        })
    }

    fn series(&self, pick: impl Fn(&PolynomialCurve) -> LaurentSeries) -> Series7 {
        Series7 {
            c: pick(&self.center),
            t0p: pick(&self.t0_plus),
            t0m: pick(&self.t0_minus),
            rp: pick(&self.re_plus),
            rm: pick(&self.re_minus),
            ip: pick(&self.im_plus),
            im: pick(&self.im_minus),
            eps: self.eps,
        }
    }
}

struct Series7 {
    c: LaurentSeries,
    t0p: LaurentSeries,
    t0m: LaurentSeries,
    rp: LaurentSeries,
    rm: LaurentSeries,
    ip: LaurentSeries,
    im: LaurentSeries,
    eps: f64,
}

impl Series7 {
    fn try_map(&self, f: impl Fn(&LaurentSeries) -> Result<LaurentSeries>) -> Result<Self> {
        Ok(Self {
            c: f(&self.c)?,
            t0p: f(&self.t0p)?,
            t0m: f(&self.t0m)?,
            rp: f(&self.rp)?,
            rm: f(&self.rm)?,
            ip: f(&self.ip)?,
            im: f(&self.im)?,
            eps: self.eps,
        })
    }

    fn t0(&self) -> T0Stencil {
        T0Stencil {
            center: self.c.clone(),
            plus: self.t0p.clone(),
            minus: self.t0m.clone(),
            eps: self.eps,
        }
    }

    fn partial(&self, conj: bool) -> LaurentSeries {
        let h = C64::new(0.5 / self.eps, 0.0);
        let d_re = self.rp.sub(&self.rm).scale(h);
        let d_im = self.ip.sub(&self.im).scale(h);
        // d/dt_k = (d_re - i d_im)/2, d/d conj(t_k) = (d_re + i d_im)/2
        let sign = if conj { 1.0 } else { -1.0 };
        d_re.add(&d_im.scale(C64::new(0.0, sign))).scale(C64::new(0.5, 0.0))
    }
}

/// Residual series of the string equation and of the four flow equations at one step size.
#[derive(Debug, Clone)]
pub struct FlowResiduals {
    pub z: LaurentSeries,
    pub ztilde: LaurentSeries,
    pub z_conj: LaurentSeries,
    pub ztilde_conj: LaurentSeries,
    pub string: LaurentSeries,
}

impl FlowResiduals {
    fn combine(&self, other: &Self, a: f64, b: f64) -> Self {
        let lin = |x: &LaurentSeries, y: &LaurentSeries| x.scale(C64::new(a, 0.0)).add(&y.scale(C64::new(b, 0.0)));
        Self {
            z: lin(&self.z, &other.z),
            ztilde: lin(&self.ztilde, &other.ztilde),
            z_conj: lin(&self.z_conj, &other.z_conj),
            ztilde_conj: lin(&self.ztilde_conj, &other.ztilde_conj),
            string: lin(&self.string, &other.string),
        }
    }
}

/// Residuals of `dz/dt_k = {M_k, z}`, `dz~/dt_k = {M_k, z~}`, `dz/dt~_k = {z, M~_k}`,
/// `dz~/dt~_k = {z~, M~_k}` and `{z, z~} - 1` on one stencil.
pub fn flow_residuals(stencil: &FlowStencil, window: i64) -> Result<FlowResiduals> {
    let k = stencil.k as u32;
    let z = stencil.series(|c| laurent_of_curve(c).0);
    let zt = stencil.series(|c| laurent_of_curve(c).1);
    let m = z.try_map(|s| toda_hamiltonian(s, k, window))?;
    let mt = zt.try_map(|s| toda_hamiltonian_tilde(s, k, window))?;
    let (zs, zts, ms, mts) = (z.t0(), zt.t0(), m.t0(), mt.t0());

    let res_z = z.partial(false).sub(&poisson_bracket(&ms, &zs));
    let res_zt = zt.partial(false).sub(&poisson_bracket(&ms, &zts));
    let res_zc = z.partial(true).sub(&poisson_bracket(&zs, &mts));
    let res_ztc = zt.partial(true).sub(&poisson_bracket(&zts, &mts));
    let string = poisson_bracket(&zs, &zts).sub(&LaurentSeries::constant(C64::new(1.0, 0.0)));
    Ok(FlowResiduals {
        z: res_z,
        ztilde: res_zt,
        z_conj: res_zc,
        ztilde_conj: res_ztc,
        string,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FlowReport {
    pub flow_k: usize,
    pub epsilon: f64,
    pub residual_z: f64,
    pub residual_ztilde: f64,
    /// Max over the two conjugate-flow equations.
    pub residual_conjugate: f64,
    pub string_residual: f64,
    /// `max |{z, z~} - 1| / eps^2` before extrapolation.
    pub string_constant: f64,
    pub window: i64,
    pub newton_residual: f64,
}

/// Default step `1e-4 max(1, |t_k|)`.
pub fn default_epsilon(moments: &HarmonicMoments, k: usize) -> f64 {
    1e-4 * moments.get(k).norm().max(1.0)
}

/// Flow and string-equation residuals after Richardson extrapolation
/// `(4 f(eps/2) - f(eps)) / 3` of the central differences.
pub fn verify_flow(moments: &HarmonicMoments, k: usize, eps: Option<f64>) -> Result<FlowReport> {
    let eps = eps.unwrap_or_else(|| default_epsilon(moments, k));
    if !(eps > 0.0) {
        return Err(Error::InvalidInput(format!("step must be positive, got {eps}")));
    }
    let d = moments.degree().max(k - 1);
    let coarse = FlowStencil::build(moments, k, eps)?;
    let fine = FlowStencil::build(moments, k, eps / 2.0)?;
    let mut window = default_window(d);
    let (rc, rf) = loop {
        match (flow_residuals(&coarse, window), flow_residuals(&fine, window)) {
            (Ok(a), Ok(b)) => break (a, b),
            _ if window < 64 * default_window(d) => window *= 2,
            (Err(e), _) | (_, Err(e)) => return Err(e),
        }
    };
    let ext = rf.combine(&rc, 4.0 / 3.0, -1.0 / 3.0);
    Ok(FlowReport {
        flow_k: k,
        epsilon: eps,
        residual_z: ext.z.max_abs(),
        residual_ztilde: ext.ztilde.max_abs(),
        residual_conjugate: ext.z_conj.max_abs().max(ext.ztilde_conj.max_abs()),
        string_residual: ext.string.max_abs(),
        string_constant: rc.string.max_abs() / (eps * eps),
        window,
        newton_residual: coarse.max_residual.max(fine.max_residual),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64) -> C64 {
        C64::new(re, 0.0)
    }

    #[test]
    fn curve_series_examples() {
        let (z, zt) = laurent_of_curve(&PolynomialCurve::circle(0.5));
        assert_eq!(z.coeff(1), c(0.5));
        assert_eq!(zt.coeff(-1), c(0.5));
        assert_eq!(z.max_abs(), 0.5);

        let e = PolynomialCurve::new(0.5, vec![c(0.0), c(0.2)]).unwrap();
        let (z, zt) = laurent_of_curve(&e);
        assert_eq!((z.coeff(1), z.coeff(-1)), (c(0.5), c(0.2)));
        assert_eq!((zt.coeff(-1), zt.coeff(1)), (c(0.5), c(0.2)));

        let h = PolynomialCurve::new(0.3, vec![c(0.0), c(0.0), C64::new(0.027, 0.01)]).unwrap();
        let (_, zt) = laurent_of_curve(&h);
        assert_eq!(zt.coeff(2), C64::new(0.027, -0.01));
    }

    #[test]
    fn hamiltonian_examples() {
        let m = toda_hamiltonian(&LaurentSeries::monomial(1, c(0.5)), 1, 4).unwrap();
        assert_eq!(m.coeff(1), c(0.5));
        assert_eq!(m.max_abs(), 0.5);

        let z = LaurentSeries::new(-1, vec![c(0.2), c(0.0), c(0.5)]);
        let m2 = toda_hamiltonian(&z, 2, 8).unwrap();
        assert!((m2.coeff(2) - c(0.25)).norm() < 1e-15);
        assert!((m2.coeff(0) - c(0.1)).norm() < 1e-15);
        assert_eq!(m2.coeff(-2), c(0.0));

        let zt = z.reflect();
        let mt = toda_hamiltonian_tilde(&zt, 2, 8).unwrap();
        assert!(mt.sub(&m2.reflect()).max_abs() < 1e-15);
        assert!(toda_hamiltonian(&z, 3, 1).is_err());
    }

    #[test]
    fn bracket_examples() {
        let f = T0Stencil::constant(LaurentSeries::new(-1, vec![c(0.3), c(0.1), c(0.7)]), 1e-3);
        let f = T0Stencil {
            plus: f.center.scale(c(1.1)),
            ..f
        };
        assert_eq!(poisson_bracket(&f, &f).max_abs(), 0.0);

        let w = T0Stencil::constant(LaurentSeries::monomial(1, c(1.0)), 1e-2);
        let g = T0Stencil {
            center: LaurentSeries::constant(c(0.5)),
            plus: LaurentSeries::constant(c(0.5 + 0.01)),
            minus: LaurentSeries::constant(c(0.5 - 0.01)),
            eps: 1e-2,
        };
        let b = poisson_bracket(&w, &g);
        assert!((b.coeff(1) - c(1.0)).norm() < 1e-12);
    }

    #[test]
    fn circle_flow() {
        let r = verify_flow(&HarmonicMoments::circle(0.25), 1, None).unwrap();
        assert!(r.residual_z <= 1e-7, "{r:?}");
        assert!(r.string_residual <= 1e-7, "{r:?}");
    }

    #[test]
    fn ellipse_and_hypotrochoid_flows() {
        let e = HarmonicMoments::single(0.1, 2, c(0.1)).unwrap();
        let h = HarmonicMoments::single(0.05, 3, c(0.05)).unwrap();
        for (m, ks) in [(&e, vec![1, 2]), (&h, vec![1, 2, 3])] {
            for k in ks {
                let r = verify_flow(m, k, None).unwrap();
                println!("{r:?}");
                assert!(r.residual_z <= 1e-6, "{r:?}");
                assert!(r.residual_ztilde <= 1e-6, "{r:?}");
                assert!(r.residual_conjugate <= 1e-6, "{r:?}");
                assert!(r.string_residual <= 1e-7, "{r:?}");
            }
        }
    }
}
