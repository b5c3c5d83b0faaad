use nmm_core::curvegeom::HarmonicMoments;
use nmm_core::toda::{poisson_bracket, verify_flow, LaurentSeries, T0Stencil};
use nmm_core::C64;
use proptest::prelude::*;

fn series() -> impl Strategy<Value = LaurentSeries> {
    (-2i64..1, prop::collection::vec((-1.0f64..1.0, -1.0f64..1.0), 1..4))
        .prop_map(|(lo, cs)| LaurentSeries::new(lo, cs.into_iter().map(|(a, b)| C64::new(a, b)).collect()))
}

fn stencil() -> impl Strategy<Value = T0Stencil> {
    (series(), series(), series()).prop_map(|(c, p, m)| T0Stencil {
        plus: c.add(&p.scale(C64::new(1e-2, 0.0))),
        minus: c.add(&m.scale(C64::new(1e-2, 0.0))),
        center: c,
        eps: 1e-2,
    })
}

fn product(f: &T0Stencil, g: &T0Stencil) -> T0Stencil {
    T0Stencil {
        center: f.center.mul(&g.center),
        plus: f.plus.mul(&g.plus),
        minus: f.minus.mul(&g.minus),
        eps: f.eps,
    }
}

proptest! {
    #[test]
    fn bracket_is_antisymmetric(f in stencil(), g in stencil()) {
        let s = poisson_bracket(&f, &g).add(&poisson_bracket(&g, &f));
        prop_assert!(s.max_abs() < 1e-12);
    }

    /// `{f, g h} = {f, g} h + g {f, h}` up to the central-difference error of the product.
    #[test]
    fn bracket_is_a_derivation(f in stencil(), g in stencil(), h in stencil()) {
        let lhs = poisson_bracket(&f, &product(&g, &h));
        let rhs = poisson_bracket(&f, &g).mul(&h.center).add(&g.center.mul(&poisson_bracket(&f, &h)));
        // the central difference of a product misses the product rule by O(eps)
        let bound = 1e-2 * 50.0 * (1.0 + f.center.max_abs()).powi(2);
        prop_assert!(lhs.sub(&rhs).max_abs() < bound);
    }

    #[test]
    fn multiplication_is_associative_and_commutative(a in series(), b in series(), c in series()) {
        prop_assert!(a.mul(&b).sub(&b.mul(&a)).max_abs() < 1e-14);
        prop_assert!(a.mul(&b).mul(&c).sub(&a.mul(&b.mul(&c))).max_abs() < 1e-12);
    }

    #[test]
    fn string_equation_along_the_gaussian_family(t0 in 0.03f64..0.15, t2 in 0.02f64..0.15) {
        let m = HarmonicMoments::single(t0, 2, C64::new(t2, 0.0)).unwrap();
        let r = verify_flow(&m, 1, None).unwrap();
        prop_assert!(r.string_residual <= 1e-7, "{:?}", r);
        prop_assert!(r.residual_z <= 1e-6, "{:?}", r);
    }
}
