//! The polynomial potential `V(z) = (|z|^2 - 2 Re sum_k t_k z^k) / t0`.

use serde::{Deserialize, Serialize};

use crate::curvegeom::HarmonicMoments;
use crate::{Error, Result, C64};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PotentialSpec {
    pub t0: f64,
    /// `t[k-1]` holds `t_k`.
    pub t: Vec<C64>,
    /// Matrix size, also the inverse temperature of the weight `exp(-N V)`.
    pub n: usize,
}

impl PotentialSpec {
    pub fn new(t0: f64, t: Vec<C64>, n: usize) -> Result<Self> {
        if !(t0.is_finite() && t0 > 0.0) {
            return Err(Error::InvalidInput(format!("t0 must be positive, got {t0}")));
        }
        if n == 0 {
            return Err(Error::InvalidInput("N must be positive".into()));
        }
        if t.iter().any(|c| !(c.re.is_finite() && c.im.is_finite())) {
            return Err(Error::InvalidInput("non-finite harmonic moment".into()));
        }
        if t.len() >= 2 && t[1].norm() >= 0.5 {
            return Err(Error::InvalidInput(format!("|t2| must be below 1/2, got {}", t[1].norm())));
        }
        let mut t = t;
        while t.last().is_some_and(|c| c.norm() == 0.0) {
            t.pop();
        }
        Ok(Self { t0, t, n })
    }

    /// `V = |z|^2 / t0`.
    pub fn gaussian_disc(t0: f64, n: usize) -> Result<Self> {
        Self::new(t0, Vec::new(), n)
    }

    /// Only `t_k` (and `t0`) nonzero.
    pub fn single(t0: f64, k: usize, tk: C64, n: usize) -> Result<Self> {
        let mut t = vec![C64::new(0.0, 0.0); k];
        t[k - 1] = tk;
        Self::new(t0, t, n)
    }

    pub fn tk(&self, k: usize) -> C64 {
        if k == 0 || k > self.t.len() {
            C64::new(0.0, 0.0)
        } else {
            self.t[k - 1]
        }
    }

    /// `d` such that `t_{d+1}` is the last nonzero moment (0 when there are none).
    pub fn degree(&self) -> usize {
        self.t.len().saturating_sub(1)
    }

    pub fn v(&self, z: C64) -> f64 {
        let mut harm = C64::new(0.0, 0.0);
        let mut zk = C64::new(1.0, 0.0);
        for &tk in &self.t {
            zk *= z;
            harm += tk * zk;
        }
        (z.norm_sqr() - 2.0 * harm.re) / self.t0
    }

    /// `dV/dz = (conj(z) - sum k t_k z^{k-1}) / t0`.
    pub fn dv_dz(&self, z: C64) -> C64 {
        let mut s = C64::new(0.0, 0.0);
        let mut zk = C64::new(1.0, 0.0);
        for (i, &tk) in self.t.iter().enumerate() {
            s += tk * zk * (i + 1) as f64;
            zk *= z;
        }
        (z.conj() - s) / self.t0
    }

    /// Rotation order `g` of the potential: `V(e^{2 pi i/g} z) = V(z)`. `None` means full
    /// rotation invariance.
    pub fn rotation_order(&self) -> Option<usize> {
        let mut g = 0usize;
        for (i, c) in self.t.iter().enumerate() {
            if c.norm() != 0.0 {
                g = gcd(g, i + 1);
            }
        }
        (g > 0).then_some(g)
    }

    /// `Some(d)` when `t_{d+1}` is the only nonzero exterior moment.
    pub fn single_harmonic(&self) -> Option<usize> {
        let nz: Vec<usize> = (0..self.t.len()).filter(|&i| self.t[i].norm() != 0.0).collect();
        (nz.len() == 1).then(|| nz[0])
    }

    pub fn moments(&self) -> HarmonicMoments {
        HarmonicMoments {
            t0: self.t0,
            t: self.t.clone(),
        }
    }
}

fn gcd(a: usize, b: usize) -> usize {
    if b == 0 {
        a
    } else {
        gcd(b, a % b)
    }
}
