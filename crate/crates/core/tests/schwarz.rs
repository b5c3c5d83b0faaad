use nmm_core::curvegeom::{interior_moments, moments_of_curve, PolynomialCurve};
use nmm_core::schwarz::{
    branch_cut_check, ellipse_axes, ellipse_schwarz, hypotrochoid_schwarz, hypotrochoid_support, laurent_tail,
    reflection, schwarz_eval, segment,
};
use nmm_core::C64;
use proptest::prelude::*;

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
fn circle_schwarz_is_t0_over_z() {
    let t0 = 0.25;
    let curve = PolynomialCurve::circle(0.5);
    for k in 0..64 {
        let z = C64::from_polar(0.55 + 0.05 * (k % 8) as f64, 0.1 + k as f64 * 0.7);
        let s = schwarz_eval(&curve, z).unwrap().value;
        assert!((s - t0 / z).norm() <= 1e-12, "{z}");
    }
}

#[test]
fn laurent_tail_matches_moments() {
    for curve in [ellipse(), hypotrochoid()] {
        let d = curve.degree();
        let tail = laurent_tail(&curve, 5, 1.5).unwrap();
        let m = moments_of_curve(&curve, d + 1).unwrap();
        let v = interior_moments(&curve, 5).unwrap();
        assert!((tail.t0 - c(m.t0)).norm() <= 1e-10);
        for k in 1..=d + 1 {
            assert!((tail.t[k - 1] - m.get(k)).norm() <= 1e-10, "t_{k}");
        }
        for k in 0..5 {
            assert!((tail.v[k] - v.v[k]).norm() <= 1e-10, "v_{}", k + 1);
        }
    }
    assert!((hypotrochoid().area_t0() - 0.088542).abs() < 1e-15);
}

#[test]
fn closed_form_cuts() {
    let (b1, b2) = ellipse_axes(0.21, 0.2);
    let foc = (b1 * b1 - b2 * b2).sqrt();
    let v = branch_cut_check(&segment(c(-foc), c(foc), 400), |z| ellipse_schwarz(b1, b2, z)).unwrap();
    assert!(v <= 1e-8);
    let (r, a) = (0.3, 0.027);
    let tip = hypotrochoid_support(r, a);
    for j in 0..3 {
        let dir = C64::from_polar(1.0, std::f64::consts::TAU * j as f64 / 3.0);
        let ray = segment(dir * (0.02 * tip), dir * (0.98 * tip), 200);
        let v = branch_cut_check(&ray, |z| hypotrochoid_schwarz(r, a, z)).unwrap();
        assert!(v <= 1e-8, "ray {j}: {v}");
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    /// The reflection is an involution that fixes the boundary.
    #[test]
    fn reflection_is_an_involution(theta in 0.0f64..6.28, s in 1.02f64..1.3) {
        for curve in [ellipse(), hypotrochoid()] {
            let z = curve.h(C64::from_polar(s, theta));
            let rho = reflection(&curve, z).unwrap();
            let back = reflection(&curve, rho);
            if let Ok(back) = back {
                prop_assert!((back - z).norm() < 1e-9 * (1.0 + z.norm()));
            }
            let on = curve.h(C64::from_polar(1.0, theta));
            prop_assert!((reflection(&curve, on).unwrap() - on).norm() < 1e-11);
        }
    }
}
