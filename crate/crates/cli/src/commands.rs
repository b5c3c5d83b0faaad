//! One function per subcommand.

use std::f64::consts::TAU;

use nmm_core::curvegeom::{
    critical_radius, curve_from_moments_report, interior_moments, moments_of_curve_with, validate_curve, MomentOptions,
};
use nmm_core::gas::{default_boundary_layer, density_compare, droplet, level_spacing_mc, mcmc_run, McmcConfig};
use nmm_core::orthopoly::grid::{default_angular, default_cutoff};
use nmm_core::orthopoly::{
    build_family_with, build_grid, check_operator_identity, check_string_equation, gaussian_level_spacing_table,
    one_point_density, polynomial_zeros, recursion_coefficients, FamilyOptions,
};
use nmm_core::toda::verify_flow;
use nmm_core::{HarmonicMoments, PolynomialCurve, C64};
use serde_json::{json, Value};

use crate::args::{parse_complex, CurveArgs, GasArgs, LevelSpacingArgs, OrthoArgs, TodaArgs};
use crate::output::{num, CmdResult, Failure, Metadata, OutDir};

/// Splits `key=value` items into `(letter, index, value)`, e.g. `t3=0.1` -> `('t', Some(3), 0.1)`.
fn parse_items(items: &[String]) -> CmdResult<Vec<(String, C64)>> {
    items
        .iter()
        .map(|item| {
            let (k, v) = item
                .split_once('=')
                .ok_or_else(|| Failure::Usage(format!("expected KEY=VALUE, got `{item}`")))?;
            let v = parse_complex(v).map_err(|e| Failure::Usage(format!("{k}: {e}")))?;
            Ok((k.trim().to_string(), v))
        })
        .collect()
}

fn indexed(key: &str, prefix: char) -> Option<usize> {
    key.strip_prefix(prefix)?.parse().ok()
}

fn real(key: &str, v: C64) -> CmdResult<f64> {
    if v.im != 0.0 {
        return Err(Failure::Usage(format!("{key} must be real")));
    }
    Ok(v.re)
}

fn moments_from_items(items: &[(String, C64)]) -> CmdResult<HarmonicMoments> {
    let mut t0 = None;
    let mut t = Vec::new();
    for (k, v) in items {
        match indexed(k, 't') {
            Some(0) => t0 = Some(real(k, *v)?),
            Some(j) => {
                if t.len() < j {
                    t.resize(j, C64::new(0.0, 0.0));
                }
                t[j - 1] = *v;
            }
            None => return Err(Failure::Usage(format!("unknown moment `{k}`, expected t0, t1, ..."))),
        }
    }
    let t0 = t0.ok_or_else(|| Failure::Usage("--from-moments needs t0".into()))?;
    Ok(HarmonicMoments::new(t0, t)?)
}

fn curve_from_items(items: &[(String, C64)]) -> CmdResult<PolynomialCurve> {
    let mut r = None;
    let mut a = Vec::new();
    for (k, v) in items {
        if k == "r" {
            r = Some(real(k, *v)?);
        } else if let Some(j) = indexed(k, 'a') {
            if a.len() <= j {
                a.resize(j + 1, C64::new(0.0, 0.0));
            }
            a[j] = *v;
        } else {
            return Err(Failure::Usage(format!("unknown coefficient `{k}`, expected r, a0, a1, ...")));
        }
    }
    let r = r.ok_or_else(|| Failure::Usage("--from-coeffs needs r".into()))?;
    Ok(PolynomialCurve::new(r, a)?)
}

pub fn curve(args: &CurveArgs) -> CmdResult<Vec<String>> {
    let out = OutDir::create(&args.common.out, Metadata::new("curve", args, None))?;
    let (curve, inversion, k_in) = match (&args.from_moments, &args.from_coeffs) {
        (Some(items), None) => {
            let m = moments_from_items(&parse_items(items)?)?;
            let rep = curve_from_moments_report(&m, args.tol, args.max_iter)?;
            let info = json!({
                "residual": rep.residual,
                "iterations": rep.iterations,
                "continuation_steps": rep.continuation_steps,
            });
            (rep.curve, Some(info), m.t.len())
        }
        (None, Some(items)) => (curve_from_items(&parse_items(items)?)?, None, 0),
        _ => return Err(Failure::Usage("give exactly one of --from-moments, --from-coeffs".into())),
    };
    let d = curve.degree();
    let opts = MomentOptions {
        shifted: args.shifted,
        ..MomentOptions::default()
    };
    let moments = moments_of_curve_with(&curve, (d + 1).max(k_in), &opts)?;
    let interior = interior_moments(&curve, args.interior)?;
    let validation = validate_curve(&curve, 512)?;
    let mut body = json!({
        "source": if inversion.is_some() { "moments" } else { "coefficients" },
        "curve": curve,
        "moments": moments.moments,
        "origin_enclosed": moments.origin_enclosed,
        "interior_moments": interior,
        "critical_radius": critical_radius(&curve),
        "validation": validation,
    });
    if let Some(info) = inversion {
        body["inversion"] = info;
    }
    let mut written = vec![out.json("curve.json", body)?];
    let n = args.nodes.max(3);
    let rows = (0..n).map(|k| {
        let theta = TAU * k as f64 / n as f64;
        let z = curve.h(C64::from_polar(1.0, theta));
        vec![num(theta), num(z.re), num(z.im)]
    });
    written.push(out.csv("boundary.csv", &["theta", "re", "im"], rows)?);
    Ok(written.iter().map(|p| p.display().to_string()).collect())
}

pub fn ortho(args: &OrthoArgs) -> CmdResult<Vec<String>> {
    let p = args.moments.potential(args.n)?;
    if args.n_max == 0 {
        return Err(Failure::Usage("--n-max must be positive".into()));
    }
    let out = OutDir::create(&args.common.out, Metadata::new("ortho", args, None))?;
    let cutoff = args.cutoff.unwrap_or_else(|| default_cutoff(&p, args.n_max));
    let n_theta = args.n_theta.unwrap_or_else(|| default_angular(args.n_max, p.degree()));
    let grid = build_grid(cutoff, args.n_r, n_theta)?;
    let opts = FamilyOptions {
        exploit_symmetry: !args.no_symmetry,
    };
    let family = build_family_with(&p, &grid, args.n_max, opts)?;
    let mut written = Vec::new();

    let norms = family.log_norms().iter().enumerate().map(|(n, lh)| vec![n.to_string(), num(lh.exp()), num(*lh)]).collect::<Vec<_>>();
    written.push(out.csv("norms.csv", &["n", "h_n", "log_h_n"], norms)?);

    let d = if p.t.is_empty() { Some(0) } else { p.single_harmonic() };
    let recursion = d.map(|d| recursion_coefficients(&family, d)).transpose()?;
    if let Some(rec) = &recursion {
        // r_n = sqrt(t0 n / (N (1 - 4 |t2|^2))) when t2 is the only harmonic
        let gaussian = p.t.len() <= 2 && p.t.first().map_or(true, |t1| t1.norm() == 0.0);
        let t2 = p.tk(2).norm();
        let rows = rec.r.iter().enumerate().map(|(n, r)| {
            let a = rec.a.get(n);
            let mut row = vec![
                n.to_string(),
                num(*r),
                a.map_or(String::new(), |a| num(a.norm())),
                a.map_or(String::new(), |a| num(a.re)),
                a.map_or(String::new(), |a| num(a.im)),
            ];
            if gaussian {
                row.push(num((p.t0 * n as f64 / (p.n as f64 * (1.0 - 4.0 * t2 * t2))).sqrt()));
            }
            row
        });
        let header: &[&str] = if gaussian {
            &["n", "r_n", "abs_a_n", "re_a_n", "im_a_n", "r_closed_form"]
        } else {
            &["n", "r_n", "abs_a_n", "re_a_n", "im_a_n"]
        };
        written.push(out.csv("recursion.csv", header, rows)?);
    }

    let degrees = if args.zeros.is_empty() { vec![family.n_max] } else { args.zeros.clone() };
    for n in degrees {
        let zs = polynomial_zeros(&family, n)?;
        let rows = zs.iter().map(|z| vec![n.to_string(), num(z.re), num(z.im)]);
        written.push(out.csv(&format!("zeros_{n}.csv"), &["n", "re", "im"], rows)?);
    }

    let string = if family.n_max >= p.n {
        Some(check_string_equation(&family, p.degree())?)
    } else {
        None
    };
    let body = json!({
        "family": {
            "n_max": family.n_max,
            "symmetry": format!("{:?}", family.symmetry),
            "band": family.band,
            "off_band": family.off_band,
            "rim_weight": family.rim_weight,
            "truncated_from": family.truncated_from,
            "warning": family.warning,
            "grid": {"cutoff": grid.r_c, "n_r": grid.n_r, "n_theta": grid.n_theta},
        },
        "string_equation": string,
        "operator_identity": check_operator_identity(&family)?,
        "recursion": recursion.as_ref().map(|r| json!({"d": r.d, "residual_1": r.residual_1, "residual_2": r.residual_2})),
    });
    written.push(out.json("string_residuals.json", body)?);

    // the one-point density needs q_0..q_{N-1}
    if family.n_max + 1 >= p.n {
        let reach = droplet(&p).map_or(p.t0.sqrt(), |c| c.outer_radius()) * 1.5;
        let m = args.profile_points.max(2);
        let mut rows = Vec::with_capacity(m);
        for k in 0..m {
            let x = -reach + 2.0 * reach * k as f64 / (m - 1) as f64;
            let rho = one_point_density(&family, C64::new(x, 0.0))?;
            rows.push(vec![num(x), num(0.0), num(rho)]);
        }
        written.push(out.csv("density_profile.csv", &["re_z", "im_z", "density"], rows)?);
    } else {
        eprintln!("density_profile.csv skipped: needs --n-max >= N - 1");
    }

    if let Some(requested) = family.truncated_from {
        return Err(Failure::Positivity {
            n_star: family.n_max,
            requested,
        });
    }
    Ok(written.iter().map(|p| p.display().to_string()).collect())
}

pub fn gas(args: &GasArgs) -> CmdResult<Vec<String>> {
    let p = args.moments.potential(args.n)?;
    let out = OutDir::create(&args.common.out, Metadata::new("gas", args, Some(args.seed)))?;
    let config = McmcConfig {
        sweeps: args.steps,
        burn_in: args.burn_in,
        seed: args.seed,
        proposal_scale: args.scale,
        cutoff: args.cutoff,
        bins: args.bins,
        batches: args.batches,
    };
    let run = mcmc_run(&p, &config)?;
    let mut body = json!({ "config": args, "observables": run.observables });
    if let Some(curve) = droplet(&p) {
        body["interior_moments"] = json!(interior_moments(&curve, p.degree() + 3)?);
        body["density"] = json!(density_compare(&run.measure, &curve, default_boundary_layer(p.t0, p.n))?);
    }
    let mut written = vec![out.json("gas.json", body)?];
    let rows = run
        .measure
        .cells()
        .map(|(ix, iy, c, m)| vec![ix.to_string(), iy.to_string(), num(c.re), num(c.im), num(m)]);
    written.push(out.csv("histogram.csv", &["ix", "iy", "center_re", "center_im", "mass"], rows)?);
    Ok(written.iter().map(|p| p.display().to_string()).collect())
}

pub fn toda(args: &TodaArgs) -> CmdResult<Vec<String>> {
    if args.flow == 0 {
        return Err(Failure::Usage("--flow must be at least 1".into()));
    }
    let m = HarmonicMoments::new(args.moments.t0, args.moments.harmonics())?;
    let out = OutDir::create(&args.common.out, Metadata::new("toda", args, None))?;
    let report = verify_flow(&m, args.flow, args.epsilon)?;
    let body = match json!(report) {
        Value::Object(o) => Value::Object(o),
        _ => unreachable!("reports serialise to objects"),
    };
    Ok(vec![out.json("toda.json", body)?.display().to_string()])
}

pub fn levelspacing(args: &LevelSpacingArgs) -> CmdResult<(Vec<String>, f64)> {
    let table = gaussian_level_spacing_table(args.t0, args.n, args.x)?;
    let mc = if args.mc_steps > 0 {
        Some(level_spacing_mc(args.t0, args.n, args.x, &McmcConfig::new(args.mc_steps, args.seed), args.chains)?)
    } else {
        None
    };
    let seed = mc.as_ref().map(|_| args.seed);
    let out = OutDir::create(&args.common.out, Metadata::new("levelspacing", args, seed))?;
    let sum: f64 = table.iter().sum();
    let rows = table.iter().enumerate().map(|(n, pr)| {
        let mut row = vec![n.to_string(), num(*pr)];
        if let Some(mc) = &mc {
            row.push(num(mc.probabilities[n]));
            row.push(num(mc.stderr[n]));
        }
        row
    });
    let header: &[&str] = if mc.is_some() {
        &["n", "probability", "mc_probability", "mc_stderr"]
    } else {
        &["n", "probability"]
    };
    let mut written = vec![out.csv("levelspacing.csv", header, rows)?];
    let body = json!({
        "radius": (args.x / args.n as f64).sqrt(),
        "sum": sum,
        "table": table,
        "monte_carlo": mc,
    });
    written.push(out.json("levelspacing.json", body)?);
    Ok((written.iter().map(|p| p.display().to_string()).collect(), sum))
}
