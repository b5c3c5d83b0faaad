//! Exact counting statistics for `V = |z|^2 / t0` in the disc of radius `sqrt(x / N)` at 0.

use crate::numeric::poisson_tails;
use crate::{Error, Result};

/// `A_N(n)` for `n = 0..=N`. Eigenvalue `i` lies outside the disc with probability
/// `Sigma_i = P(Poisson(x / t0) < i)`, independently of the others, so the count is
/// Poisson-binomial; the table is built one eigenvalue at a time as a convex combination.
pub fn gaussian_level_spacing_table(t0: f64, n: usize, x: f64) -> Result<Vec<f64>> {
    if !(t0 > 0.0) || !(x > 0.0) || n == 0 {
        return Err(Error::InvalidInput(format!("need t0 > 0, x > 0, N >= 1; got {t0}, {x}, {n}")));
    }
    let lambda = x / t0;
    let mut p = vec![1.0];
    for i in 1..=n {
        let (outside, inside) = poisson_tails(lambda, i);
        let mut next = vec![0.0; p.len() + 1];
        for (k, &pk) in p.iter().enumerate() {
            next[k] += pk * outside;
            next[k + 1] += pk * inside;
        }
        p = next;
    }
    Ok(p)
}

/// Probability of exactly `k` eigenvalues in the disc of radius `sqrt(x / N)` around 0.
pub fn gaussian_level_spacing(t0: f64, n: usize, x: f64, k: usize) -> Result<f64> {
    if k > n {
        return Err(Error::InvalidInput(format!("count {k} exceeds N={n}")));
    }
    Ok(gaussian_level_spacing_table(t0, n, x)?[k])
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn single_eigenvalue() {
        let a = gaussian_level_spacing(0.7, 1, 0.3, 0).unwrap();
        assert!((a - (-0.3f64 / 0.7).exp()).abs() < 1e-15);
    }

    #[test]
    fn sums_to_one() {
        for x in [0.01, 0.5, 3.0, 40.0] {
            let t = gaussian_level_spacing_table(1.0, 16, x).unwrap();
            assert!((t.iter().sum::<f64>() - 1.0).abs() < 1e-12);
            assert!(t.iter().all(|&p| p >= 0.0));
        }
    }
}
