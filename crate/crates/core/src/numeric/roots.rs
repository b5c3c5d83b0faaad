//! Aberth-Ehrlich simultaneous root iteration.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::{Error, Result, C64};

/// Something that can report `p(z)` and `p'(z)` for a polynomial of known degree.
pub trait PolyEval {
    fn degree(&self) -> usize;
    fn eval(&self, z: C64) -> (C64, C64);
}

/// Polynomial in the monomial basis, ascending coefficients.
pub struct Monomial<'a>(pub &'a [C64]);

impl PolyEval for Monomial<'_> {
    fn degree(&self) -> usize {
        self.0.len().saturating_sub(1)
    }

    fn eval(&self, z: C64) -> (C64, C64) {
        let mut p = C64::new(0.0, 0.0);
        let mut dp = C64::new(0.0, 0.0);
        for &c in self.0.iter().rev() {
            dp = dp * z + p;
            p = p * z + c;
        }
        (p, dp)
    }
}

#[derive(Debug, Clone, Copy)]
pub struct AberthOptions {
    pub tol: f64,
    pub max_sweeps: usize,
    pub polish_steps: usize,
    pub seed: u64,
}

impl Default for AberthOptions {
    fn default() -> Self {
        Self {
            tol: 1e-13,
            max_sweeps: 500,
            polish_steps: 3,
            seed: 0x0abe_2711,
        }
    }
}

/// All roots of `p`, starting from a randomly perturbed ring of the given radius.
pub fn aberth<P: PolyEval>(p: &P, radius: f64, opts: &AberthOptions) -> Result<Vec<C64>> {
    let n = p.degree();
    if n == 0 {
        return Ok(Vec::new());
    }
    let radius = if radius.is_finite() && radius > 0.0 { radius } else { 1.0 };
    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
    let phase: f64 = rng.gen_range(0.0..std::f64::consts::TAU);
    let mut z: Vec<C64> = (0..n)
        .map(|k| {
            let jitter: f64 = rng.gen_range(-0.1..0.1);
            let scale: f64 = rng.gen_range(0.9..1.1);
            let theta = phase + std::f64::consts::TAU * (k as f64 + jitter) / n as f64;
            C64::from_polar(radius * scale, theta)
        })
        .collect();
    let floor = 1e-3 * radius;
    let mut done = vec![false; n];
    let mut last = f64::INFINITY;
    for _ in 0..opts.max_sweeps {
        last = 0.0;
        for k in 0..n {
            if done[k] {
                continue;
            }
            let (pv, dp) = p.eval(z[k]);
            if pv.norm() == 0.0 {
                done[k] = true;
                continue;
            }
            let mut s = C64::new(0.0, 0.0);
            for j in 0..n {
                if j != k {
                    s += 1.0 / (z[k] - z[j]);
                }
            }
            let corr = if dp.norm() == 0.0 {
                C64::new(floor, floor)
            } else {
                let ratio = pv / dp;
                ratio / (1.0 - ratio * s)
            };
            if !corr.re.is_finite() || !corr.im.is_finite() {
                continue;
            }
            z[k] -= corr;
            let size = corr.norm();
            last = last.max(size);
            if size <= opts.tol * z[k].norm().max(floor) {
                done[k] = true;
            }
        }
        if done.iter().all(|&d| d) {
            polish(p, &mut z, opts.polish_steps);
            return Ok(z);
        }
    }
    Err(Error::NoConvergence {
        what: "Aberth-Ehrlich iteration",
        iterations: opts.max_sweeps,
        residual: last,
    })
}

fn polish<P: PolyEval>(p: &P, z: &mut [C64], steps: usize) {
    for zk in z.iter_mut() {
        for _ in 0..steps {
            let (pv, dp) = p.eval(*zk);
            if pv.norm() == 0.0 || dp.norm() == 0.0 {
                break;
            }
            let cand = *zk - pv / dp;
            if p.eval(cand).0.norm() < pv.norm() {
                *zk = cand;
            } else {
                break;
            }
        }
    }
}

/// Roots of a polynomial with ascending coefficients (leading coefficient nonzero).
pub fn polynomial_roots(coeffs: &[C64]) -> Result<Vec<C64>> {
    let n = coeffs.len().saturating_sub(1);
    if n == 0 {
        return Ok(Vec::new());
    }
    let lead = coeffs[n];
    if lead.norm() == 0.0 {
        return Err(Error::InvalidInput("leading coefficient is zero".into()));
    }
    // Fujiwara-type bound on the root moduli; the ring sits at half of it.
    let bound = (0..n)
        .map(|k| (coeffs[k] / lead).norm().powf(1.0 / (n - k) as f64))
        .fold(0.0, f64::max);
    aberth(&Monomial(coeffs), bound, &AberthOptions::default())
}
