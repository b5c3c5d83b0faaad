use std::time::Instant;

use nmm_core::curvegeom::{
    curve_from_moments, interior_moments, moments_of_curve, validate_curve, HarmonicMoments, PolynomialCurve,
};
use nmm_core::C64;
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn random_curve(rng: &mut ChaCha8Rng) -> PolynomialCurve {
    loop {
        let r = rng.gen_range(0.05..=0.5);
        let d = rng.gen_range(1..=3);
        let mut a = vec![C64::new(0.0, 0.0)];
        for _ in 0..d {
            a.push(C64::from_polar(rng.gen_range(0.0..=0.2 * r), rng.gen_range(0.0..std::f64::consts::TAU)));
        }
        let curve = PolynomialCurve::new(r, a).unwrap();
        if validate_curve(&curve, 512).unwrap().is_valid() {
            return curve;
        }
    }
}

#[test]
fn two_hundred_curves_round_trip() {
    let mut rng = ChaCha8Rng::seed_from_u64(2024);
    let start = Instant::now();
    for _ in 0..200 {
        let curve = random_curve(&mut rng);
        let d = curve.degree();
        let m = moments_of_curve(&curve, d + 1).unwrap();
        let back = curve_from_moments(&m, 1e-14, 100).unwrap();
        assert!((back.r - curve.r).abs() <= 1e-8, "{curve:?} -> {back:?}");
        for j in 0..=d {
            assert!((back.coeff(j) - curve.coeff(j)).norm() <= 1e-8, "{curve:?} -> {back:?}");
        }
    }
    assert!(start.elapsed().as_secs_f64() < 30.0);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    /// Scaling `h -> lambda h` multiplies `t0` by `lambda^2`, `t_k` by `lambda^{2-k}`.
    #[test]
    fn moments_scale_homogeneously(
        r in 0.1f64..0.5,
        a1 in 0.0f64..0.2,
        a2 in 0.0f64..0.1,
        phase in 0.0f64..6.28,
        lambda in 0.5f64..2.0,
    ) {
        let curve = PolynomialCurve::new(r, vec![C64::new(0.0, 0.0), C64::from_polar(a1 * r, phase), C64::new(a2 * r, 0.0)]).unwrap();
        prop_assume!(validate_curve(&curve, 512).unwrap().is_valid());
        let m = moments_of_curve(&curve, 3).unwrap();
        let s = moments_of_curve(&curve.scaled(lambda), 3).unwrap();
        prop_assert!((s.t0 - lambda * lambda * m.t0).abs() < 1e-12);
        for k in 1..=3 {
            let expect = m.get(k) * lambda.powi(2 - k as i32);
            prop_assert!((s.get(k) - expect).norm() < 1e-10 * (1.0 + expect.norm()));
        }
    }

    /// Rotating the droplet `z -> u z` (`a_j -> u^{j+1} a_j`) sends `t_k` to `u^{-k} t_k`.
    #[test]
    fn moments_rotate_covariantly(
        a1 in 0.0f64..0.15,
        a2 in 0.0f64..0.1,
        phase in 0.0f64..6.28,
        phi in 0.0f64..6.28,
    ) {
        let r = 0.4;
        let curve = PolynomialCurve::new(r, vec![C64::new(0.0, 0.0), C64::from_polar(a1 * r, phase), C64::new(a2 * r, 0.0)]).unwrap();
        prop_assume!(validate_curve(&curve, 512).unwrap().is_valid());
        let u = C64::from_polar(1.0, phi);
        let rotated = PolynomialCurve::new(r, curve.a.iter().enumerate().map(|(j, a)| a * u.powi(j as i32 + 1)).collect()).unwrap();
        let m = moments_of_curve(&curve, 3).unwrap();
        let s = moments_of_curve(&rotated, 3).unwrap();
        prop_assert!((s.t0 - m.t0).abs() < 1e-12);
        for k in 1..=3 {
            prop_assert!((s.get(k) - m.get(k) * u.powi(-(k as i32))).norm() < 1e-10);
        }
    }

    #[test]
    fn single_harmonic_inversion_round_trip(t0 in 0.01f64..0.3, t2 in 0.0f64..0.3) {
        let m = HarmonicMoments::single(t0, 2, C64::new(t2, 0.0)).unwrap();
        let curve = curve_from_moments(&m, 1e-14, 100).unwrap();
        prop_assert!((curve.area_t0() - t0).abs() < 1e-12);
        let back = moments_of_curve(&curve, 3).unwrap();
        prop_assert!((back.get(2) - C64::new(t2, 0.0)).norm() < 1e-10);
        prop_assert!(back.get(1).norm() < 1e-10 && back.get(3).norm() < 1e-10);
        // v_2 = 2 t2 t0^2 / (1 - 4 t2^2)
        let v = interior_moments(&curve, 2).unwrap();
        prop_assert!((v.v[1].re - 2.0 * t2 * t0 * t0 / (1.0 - 4.0 * t2 * t2)).abs() < 1e-10);
    }
}
