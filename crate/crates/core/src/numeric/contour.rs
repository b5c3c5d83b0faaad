use std::f64::consts::TAU;

use crate::{Error, Result, C64};

#[derive(Debug, Clone, Copy)]
pub struct ContourOptions {
    pub initial_nodes: usize,
    pub max_nodes: usize,
    pub tol: f64,
}

impl Default for ContourOptions {
    fn default() -> Self {
        Self {
            initial_nodes: 512,
            max_nodes: 1 << 16,
            tol: 1e-12,
        }
    }
}

#[derive(Debug, Clone)]
pub struct ContourMeans {
    pub values: Vec<C64>,
    /// Node count at which successive doublings agreed.
    pub nodes: usize,
    pub last_change: f64,
}

/// Trapezoid means of a vector-valued `f` over `|w| = radius`.
///
/// `mean_m f(w_m)` equals `(1/2 pi i) * contour integral of f(w)/w dw`; callers fold the
/// `dw = i w dtheta` factor into `f`. The node count doubles (reusing previous nodes)
/// until two successive means agree to `tol` in every component.
pub fn circle_means<F>(radius: f64, opts: ContourOptions, f: F) -> Result<ContourMeans>
where
    F: Fn(C64) -> Vec<C64>,
{
    let mut m = opts.initial_nodes.max(4);
    let mut sums = partial_sum(radius, m, 0, 1, &f);
    let mut means: Vec<C64> = sums.iter().map(|s| s / m as f64).collect();
    loop {
        // Nodes of the 2m rule that are not in the m rule sit at odd positions.
        let odd = partial_sum(radius, 2 * m, 1, 2, &f);
        for (s, o) in sums.iter_mut().zip(&odd) {
            *s += o;
        }
        let next: Vec<C64> = sums.iter().map(|s| s / (2 * m) as f64).collect();
        let change = next
            .iter()
            .zip(&means)
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max);
        if change <= opts.tol {
            return Ok(ContourMeans {
                values: next,
                nodes: m,
                last_change: change,
            });
        }
        if 4 * m > opts.max_nodes {
            return Err(Error::NoConvergence {
                what: "contour trapezoid doubling",
                iterations: 2 * m,
                residual: change,
            });
        }
        means = next;
        m *= 2;
    }
}

/// Trapezoid means on exactly `m` nodes, no convergence check.
pub fn circle_means_fixed<F>(radius: f64, m: usize, f: F) -> Vec<C64>
where
    F: Fn(C64) -> Vec<C64>,
{
    partial_sum(radius, m, 0, 1, &f)
        .into_iter()
        .map(|s| s / m as f64)
        .collect()
}

fn partial_sum<F>(radius: f64, m: usize, start: usize, step: usize, f: &F) -> Vec<C64>
where
    F: Fn(C64) -> Vec<C64>,
{
    let mut acc: Vec<C64> = Vec::new();
    let mut j = start;
    while j < m {
        let w = C64::from_polar(radius, TAU * j as f64 / m as f64);
        let v = f(w);
        if acc.is_empty() {
            acc = v;
        } else {
            for (a, b) in acc.iter_mut().zip(v) {
                *a += b;
            }
        }
        j += step;
    }
    acc
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn residue_of_simple_pole() {
        // (1/2 pi i) \oint dw / (w - 0.3) = 1, folded: f(w) = w / (w - 0.3)
        let res = circle_means(1.0, ContourOptions::default(), |w| vec![w / (w - 0.3)]).unwrap();
        assert!((res.values[0] - 1.0).norm() < 1e-13);
        assert_eq!(res.nodes, 512);
    }

    #[test]
    fn laurent_coefficients_are_exact() {
        let c = circle_means_fixed(2.0, 16, |w| vec![w * w + 3.0 + 1.0 / w]);
        assert!((c[0] - 3.0).norm() < 1e-14);
    }
}
