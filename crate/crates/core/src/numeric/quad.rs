use std::num::NonZeroUsize;

use gauss_quad::legendre::GaussLegendre;

/// Gauss-Legendre nodes and weights mapped to `[a, b]`, nodes ascending.
pub fn gauss_legendre(n: usize, a: f64, b: f64) -> Vec<(f64, f64)> {
    let n = NonZeroUsize::new(n).expect("Gauss-Legendre rule needs at least one node");
    let rule = GaussLegendre::new(n);
    let half = 0.5 * (b - a);
    let mid = 0.5 * (a + b);
    let mut pairs: Vec<(f64, f64)> = rule
        .as_node_weight_pairs()
        .iter()
        .map(|&(x, w)| (mid + half * x, half * w))
        .collect();
    pairs.sort_by(|p, q| p.0.total_cmp(&q.0));
    pairs
}

/// Adaptive double-exponential quadrature; robust to endpoint square-root behaviour.
pub fn integrate<F: Fn(f64) -> f64>(f: F, a: f64, b: f64, abs_tol: f64) -> f64 {
    quadrature::double_exponential::integrate(f, a, b, abs_tol).integral
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn gl_integrates_polynomials() {
        let rule = gauss_legendre(10, 0.0, 2.0);
        let s: f64 = rule.iter().map(|&(x, w)| w * x.powi(19)).sum();
        assert!((s - 2f64.powi(20) / 20.0).abs() < 1e-9);
        let total: f64 = rule.iter().map(|p| p.1).sum();
        assert!((total - 2.0).abs() < 1e-14);
    }

    #[test]
    fn adaptive_handles_sqrt_edges() {
        let v = integrate(|y| (1.0 - y * y).max(0.0).sqrt(), -1.0, 1.0, 1e-14);
        assert!((v - std::f64::consts::FRAC_PI_2).abs() < 1e-12);
    }
}
