use nmm_core::curvegeom::{interior_moments, PolynomialCurve};
use nmm_core::gas::{
    droplet, effective_field, energy, level_spacing_mc, mcmc_run, EmpiricalMeasure, FieldOptions, McmcConfig,
    Region, REGION_NODES,
};
use nmm_core::orthopoly::{build_family, default_grid, gaussian_level_spacing_table, one_point_density};
use nmm_core::{PotentialSpec, C64};
use proptest::prelude::*;

fn c(re: f64, im: f64) -> C64 {
    C64::new(re, im)
}

fn ellipse_potential(t0: f64, t2: f64, n: usize) -> PotentialSpec {
    PotentialSpec::new(t0, vec![c(0.0, 0.0), c(t2, 0.0)], n).unwrap()
}

/// Mass of the exact finite-N density inside the droplet, by a midpoint rule on exact
/// scanline intervals.
fn exact_interior_mass(p: &PotentialSpec) -> f64 {
    let grid = default_grid(p, p.n).unwrap();
    let family = build_family(p, &grid, p.n).unwrap();
    let region = Region::from_curve(&droplet(p).unwrap(), REGION_NODES);
    let (_, _, y0, y1) = region.bounding_box();
    let rows = 300;
    let hy = (y1 - y0) / rows as f64;
    let mut mass = 0.0;
    for i in 0..rows {
        let y = y0 + (i as f64 + 0.5) * hy;
        for (a, b) in region.row_intervals(y) {
            let m = 300;
            let hx = (b - a) / m as f64;
            for j in 0..m {
                mass += one_point_density(&family, c(a + (j as f64 + 0.5) * hx, y)).unwrap() * hx * hy;
            }
        }
    }
    mass
}

#[test]
fn circle_interior_mass_oracle() {
    // (1/N) sum_{k<N} P(Pois(N) > k) at N = 32
    let p = PotentialSpec::gaussian_disc(0.1, 32).unwrap();
    assert!((exact_interior_mass(&p) - 0.929_659_712_631_496_6).abs() < 1e-4);
}

#[test]
fn sampled_moments_and_interior_mass() {
    let p = ellipse_potential(0.1, 0.2, 16);
    let run = mcmc_run(&p, &McmcConfig::new(60_000, 5)).unwrap();
    let obs = &run.observables;
    assert_eq!(obs.moments.len(), 4);
    assert!((0.3..=0.5).contains(&obs.acceptance_rate), "{}", obs.acceptance_rate);
    assert!(obs.energy_slope < 0.0);
    assert!(obs.max_weight_drift < 1e-8);

    let v = interior_moments(&droplet(&p).unwrap(), 4).unwrap();
    let m1 = &obs.moments[0];
    assert!(m1.value.re.abs() < 3.0 * m1.stderr.0 && m1.value.im.abs() < 3.0 * m1.stderr.1);
    let m2 = &obs.moments[1];
    assert!((m2.value.re - v.v[1].re).abs() < 3.0 * m2.stderr.0, "{:?} vs {}", m2, v.v[1]);

    let (mass, se) = obs.interior_mass.unwrap();
    let exact = exact_interior_mass(&p);
    assert!((mass - exact).abs() < 4.0 * se + 1e-3, "{mass} +- {se} vs {exact}");
}

#[test]
fn moment_error_halves_with_four_times_the_samples() {
    let p = ellipse_potential(0.1, 0.2, 8);
    let se = |sweeps: usize| {
        let cfg = McmcConfig {
            burn_in: Some(2_000),
            ..McmcConfig::new(sweeps + 2_000, 9)
        };
        mcmc_run(&p, &cfg).unwrap().observables.moments[1].stderr.0
    };
    let ratio = se(160_000) / se(40_000);
    assert!((0.5 / 1.5..=0.5 * 1.5).contains(&ratio), "{ratio}");
}

#[test]
fn level_spacing_sampling() {
    let cfg = McmcConfig::new(40_000, 21);
    let mc = level_spacing_mc(1.0, 8, 1.0, &cfg, 2).unwrap();
    assert_eq!(mc.counts.iter().sum::<u64>() as usize, mc.samples);
    assert!((mc.probabilities.iter().sum::<f64>() - 1.0).abs() < 1e-12);
    let exact = gaussian_level_spacing_table(1.0, 8, 1.0).unwrap();
    for n in 0..=3 {
        assert!((mc.probabilities[n] - exact[n]).abs() < 3.0 * mc.stderr[n], "n={n}");
    }
    let tiny = level_spacing_mc(1.0, 8, 1e-9, &McmcConfig::new(2_000, 1), 1).unwrap();
    assert_eq!(tiny.probabilities[0], 1.0);
    assert!(level_spacing_mc(1.0, 8, 0.0, &cfg, 1).is_err());
}

#[test]
fn ellipse_effective_field() {
    let curve = PolynomialCurve::new(0.5, vec![c(0.0, 0.0), c(0.2, 0.0)]).unwrap();
    let p = ellipse_potential(0.21, 0.2, 32);
    let opts = FieldOptions {
        cells: 600,
        ..FieldOptions::default()
    };
    for k in 0..3 {
        let th = 0.4 + 2.1 * k as f64;
        let inner = effective_field(&curve, &p, curve.h(C64::from_polar(1.0, th)) * 0.5, &opts).unwrap();
        assert!(inner.inside && inner.value.abs() < 5e-3);
        let outer = effective_field(&curve, &p, curve.h(C64::from_polar(1.4, th)), &opts).unwrap();
        assert!(!outer.inside && outer.value > 0.0);
        assert!(outer.gradient_residual() < 1e-3);
    }
    assert!(effective_field(&curve, &ellipse_potential(0.2, 0.2, 32), c(0.0, 0.0), &opts).is_err());
}

#[test]
fn invalid_runs() {
    let p = PotentialSpec::gaussian_disc(1.0, 4).unwrap();
    let cfg = McmcConfig {
        burn_in: Some(10),
        ..McmcConfig::new(10, 0)
    };
    assert!(mcmc_run(&p, &cfg).is_err());
    assert!(mcmc_run(&PotentialSpec::gaussian_disc(1.0, 1).unwrap(), &McmcConfig::new(100, 0)).is_err());
}

proptest! {
    #[test]
    fn energy_is_permutation_and_rotation_invariant(
        pts in prop::collection::vec((-1.0f64..1.0, -1.0f64..1.0), 2..8),
        angle in 0.0f64..6.3,
    ) {
        let zs: Vec<C64> = pts.iter().map(|&(x, y)| c(x, y)).collect();
        let p = PotentialSpec::gaussian_disc(0.5, zs.len()).unwrap();
        let e = energy(&zs, &p);
        prop_assume!(e.is_finite());
        let mut rev = zs.clone();
        rev.reverse();
        prop_assert!((energy(&rev, &p) - e).abs() < 1e-12 * e.abs().max(1.0));
        let rot: Vec<C64> = zs.iter().map(|z| z * C64::from_polar(1.0, angle)).collect();
        prop_assert!((energy(&rot, &p) - e).abs() < 1e-12 * e.abs().max(1.0));
    }

    #[test]
    fn histogram_merge_is_order_independent(
        pts in prop::collection::vec((-1.2f64..1.2, -1.2f64..1.2), 0..60),
        split in 0usize..60,
    ) {
        let split = split.min(pts.len());
        let fill = |s: &[(f64, f64)]| {
            let mut m = EmpiricalMeasure::new(1.0, 7).unwrap();
            for &(x, y) in s {
                m.add(c(x, y));
            }
            m
        };
        let whole = fill(&pts);
        let (a, b) = (fill(&pts[..split]), fill(&pts[split..]));
        let mut ab = a.clone();
        ab.merge(&b).unwrap();
        let mut ba = b.clone();
        ba.merge(&a).unwrap();
        prop_assert_eq!(&ab, &whole);
        prop_assert_eq!(&ba, &whole);
    }
}
