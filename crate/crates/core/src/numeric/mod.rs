//! Numerical helpers shared by the model modules.

pub mod contour;
pub mod quad;
pub mod roots;

use crate::C64;

/// Principal complex cube root, argument in (-pi/3, pi/3].
pub fn cbrt(z: C64) -> C64 {
    if z.im == 0.0 && z.re >= 0.0 {
        return C64::new(z.re.cbrt(), 0.0);
    }
    let (r, theta) = z.to_polar();
    C64::from_polar(r.cbrt(), theta / 3.0)
}

/// Evaluates `sum c_k z^k` with ascending coefficients.
pub fn horner(coeffs: &[C64], z: C64) -> C64 {
    coeffs.iter().rev().fold(C64::new(0.0, 0.0), |acc, &c| acc * z + c)
}

/// `log(exp(a) + exp(b))` without overflow.
pub fn log_add_exp(a: f64, b: f64) -> f64 {
    if a == f64::NEG_INFINITY {
        return b;
    }
    if b == f64::NEG_INFINITY {
        return a;
    }
    let m = a.max(b);
    m + ((a - m).exp() + (b - m).exp()).ln()
}

/// Lower and upper Poisson tails `(P(X < i), P(X >= i))` for `X ~ Poisson(lambda)`,
/// each accumulated in log space so neither tail loses relative accuracy.
/// Near-zero tails keep full relative precision because they are never formed as `1 - x`.
pub fn poisson_tails(lambda: f64, i: usize) -> (f64, f64) {
    if lambda <= 0.0 {
        return if i == 0 { (0.0, 1.0) } else { (1.0, 0.0) };
    }
    let ln_l = lambda.ln();
    let log_term = |j: usize, lf: f64| j as f64 * ln_l - lambda - lf;
    let mut ln_fact = 0.0;
    let mut lower = f64::NEG_INFINITY;
    for j in 0..i {
        if j > 0 {
            ln_fact += (j as f64).ln();
        }
        lower = log_add_exp(lower, log_term(j, ln_fact));
    }
    // Upper tail: sum from i until the terms are negligible past the mode.
    let mut upper = f64::NEG_INFINITY;
    let mut j = i;
    let mut lf = ln_fact + if i > 0 { (i as f64).ln() } else { 0.0 };
    loop {
        let t = log_term(j, lf);
        upper = log_add_exp(upper, t);
        if (j as f64) > lambda && t < upper - 40.0 {
            break;
        }
        j += 1;
        lf += (j as f64).ln();
    }
    // The two tails share the rounding of the log terms; normalising by their sum removes it.
    let total = log_add_exp(lower, upper);
    ((lower - total).exp(), (upper - total).exp())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn cbrt_principal_branch() {
        let z = C64::new(-8.0, 0.0);
        let c = cbrt(z);
        assert!((c - C64::from_polar(2.0, std::f64::consts::PI / 3.0)).norm() < 1e-14);
        assert!((cbrt(C64::new(27.0, 0.0)) - C64::new(3.0, 0.0)).norm() < 1e-15);
        let w = C64::new(0.3, -1.7);
        assert!((cbrt(w).powu(3) - w).norm() < 1e-14);
    }

    #[test]
    fn poisson_tails_sum_to_one() {
        for &(l, i) in &[(0.5, 0usize), (1.0, 1), (3.0, 2), (30.0, 16), (256.0, 256), (1e-3, 5)] {
            let (lo, hi) = poisson_tails(l, i);
            assert!((lo + hi - 1.0).abs() < 1e-13, "{l} {i}: {lo} {hi}");
        }
        let (lo, _) = poisson_tails(2.0, 2);
        assert!((lo - 3.0 * (-2.0f64).exp()).abs() < 1e-15);
    }
}
