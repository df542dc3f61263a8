use std::f64::consts::PI;

use anyhow::{Context as _, Result};
use conewedge::asymptotics::{angular_mode_fit, expected_decay_rate, fit_decay, ComparisonOptions, Ray};
use conewedge::chart::{
    cone_exponent_fit, cone_limit, forward_chart, invert_chart, volume_identity_residual, InvertOptions,
};
use conewedge::curvature::{curvature_block, energy_density, nut_curvature_limit, nut_scale};
use conewedge::energy::{energy_flux, energy_quadrature, energy_target, EnergyReport, FluxOptions, QuadratureOptions};
use conewedge::gh_metric::{bogomolony_residual, kahler_form_at, metric_at};
use conewedge::greens::check_identities;
use conewedge::models::{
    eguchi_hanson_potential_check, lebrun_potential_check, quotient_crosscheck, taubnut_chart, taubnut_invert,
    EhPotential,
};
use conewedge::numerics::fit::logspace;
use conewedge::{Angle, Field, Point, PoleLocation, SeriesRoute, Series};
use rayon::prelude::*;
use serde_json::{json, Value};

use crate::output::{emit, num, Check, Report, Table};
use crate::sampling::{complex_pairs, cone_points, cone_points_with_t};
use crate::{ChartOp, Cli, Command, Common, EhForm, EnergyRoute, MethodArg, ModelOp, UsageError};

fn usage(msg: impl Into<String>) -> anyhow::Error {
    UsageError(msg.into()).into()
}

pub fn build_field(c: &Common) -> Result<Field> {
    let angle = Angle::new(c.beta).map_err(|e| usage(e.to_string()))?;
    let n = angle.reciprocal_integer();
    let method = c.method.unwrap_or(if n.is_some() { MethodArg::Reflection } else { MethodArg::Series });
    let field = match method {
        MethodArg::Series => Field::series(c.beta),
        MethodArg::Reflection => match n {
            Some(n) => Field::reflection(n),
            None => return Err(usage(format!("--method reflection needs 1/β to be an integer, got β = {}", c.beta))),
        },
        MethodArg::Flat => Ok(Field::flat_edge_pole(angle)),
        MethodArg::Taubnut => Field::taubnut(angle, c.tn_c),
    };
    field.map_err(|e| usage(e.to_string()))
}

fn provenance(cli: &Cli, field: &Field) -> Value {
    let mut f = json!({
        "method": field.method_name(),
        "beta": field.beta(),
        "evaluation_tolerance": field.tolerance(),
    });
    if let conewedge::Method::TaubNut { c } = field.method() {
        f["tn_c"] = json!(c);
    }
    json!({
        "program": "conewedge",
        "version": env!("CARGO_PKG_VERSION"),
        "git_describe": env!("CONEWEDGE_GIT_DESCRIBE"),
        "argv": std::env::args().collect::<Vec<_>>(),
        "parameters": cli.common,
        "field": f,
        "threads": rayon::current_num_threads(),
    })
}

/// Runs the command; `Ok(false)` means a `--check` breach.
pub fn run(cli: &Cli) -> Result<bool> {
    let c = &cli.common;
    if let Some(dir) = &c.out {
        if !dir.is_dir() {
            return Err(usage(format!("output directory {} does not exist", dir.display())));
        }
    }
    if let Some(t) = c.threads {
        if t == 0 {
            return Err(usage("thread count must be positive"));
        }
        rayon::ThreadPoolBuilder::new()
            .num_threads(t)
            .build_global()
            .context("configuring the worker pool")?;
    }
    if let Some(t) = c.tol {
        if !(t > 0.0) {
            return Err(usage(format!("--tol must be positive, got {t}")));
        }
    }
    let field = build_field(c)?;
    let report = match &cli.command {
        Command::Greens { point } => greens(c, &field, point)?,
        Command::Identities => identities(c, &field)?,
        Command::Metric { point } => metric(c, &field, point)?,
        Command::Bogomolony { point } => bogomolony(c, &field, point)?,
        Command::Chart { op } => chart(c, &field, op)?,
        Command::Curvature { point } => curvature(c, &field, point)?,
        Command::Energy { route } => energy(c, &field, route.unwrap_or(EnergyRoute::Flux))?,
        Command::Decay { rho_min, rho_max, n, polar, theta } => {
            decay(c, &field, (*rho_min, *rho_max), *n, Ray { polar: *polar, theta: *theta })?
        }
        Command::Modes { k, r_min, r_max, s, n } => modes(c, &field, k, (*r_min, *r_max), *s, *n)?,
        Command::Models { model } => models(c, &field, model)?,
    };
    emit(&report, provenance(cli, &field), c.out.as_deref())?;
    Ok(!c.check || report.passed())
}

fn points(c: &Common, field: &Field, given: &[[f64; 3]]) -> Result<Vec<Point>> {
    if given.is_empty() {
        return Ok(cone_points(field, c.samples, c.seed));
    }
    given
        .iter()
        .map(|&[r, th, s]| Point::new(r, th, s).map_err(|e| usage(e.to_string())))
        .collect()
}

fn is_series(field: &Field) -> bool {
    matches!(field.method(), conewedge::Method::Series(_))
}

fn max_of(v: impl IntoIterator<Item = f64>) -> f64 {
    v.into_iter().fold(0.0, f64::max)
}

/// A second evaluation of `f` that shares no code path with `field`.
fn reference_value(field: &Field, x: &Point) -> Result<f64> {
    let beta = field.beta();
    Ok(match field.method() {
        conewedge::Method::Reflection { .. } => Field::series(beta)?.value(x)?,
        conewedge::Method::Series(_) => match field.angle().reciprocal_integer() {
            Some(n) => Field::reflection(n)?.value(x)?,
            None => {
                let p = Series { route: SeriesRoute::Legendre, ..Default::default() };
                Field::series_with(*field.angle(), p)?.value(x)?
            }
        },
        conewedge::Method::FlatEdgePole => 1.0 / (2.0 * beta * x.norm()),
        conewedge::Method::TaubNut { c } => 2.0 * c + 1.0 / (2.0 * beta * x.norm()),
        conewedge::Method::Custom(_) => f64::NAN,
    })
}

fn greens(c: &Common, field: &Field, given: &[[f64; 3]]) -> Result<Report> {
    let pts = points(c, field, given)?;
    let rows = pts
        .par_iter()
        .map(|x| {
            let f = field.value(x)?;
            let smooth = match field.pole_location() {
                Some(PoleLocation::Unit) => Some(field.smooth_part(x)?),
                _ => None,
            };
            let reference = reference_value(field, x)?;
            Ok((f, smooth, reference, (f - reference).abs() / f.abs()))
        })
        .collect::<Result<Vec<_>>>()?;
    let mut table = Table::new(&["r", "theta", "s", "greens", "f", "smooth_part", "reference_f", "rel_dev"]);
    for (x, (f, smooth, reference, dev)) in pts.iter().zip(&rows) {
        table.push(vec![
            num(x.r),
            num(x.theta),
            num(x.s),
            num(f / (2.0 * PI)),
            num(*f),
            smooth.map(num).unwrap_or_default(),
            num(*reference),
            num(*dev),
        ]);
    }
    let max_dev = max_of(rows.iter().map(|r| r.3));
    let mut results = json!({ "points": pts.len(), "max_rel_dev": max_dev });
    if pts.len() == 1 {
        results["value"] = json!(rows[0].0 / (2.0 * PI));
    }
    let tol = c.tol.unwrap_or(1e-6);
    Ok(Report {
        name: "greens".into(),
        table,
        results,
        checks: vec![Check::at_most("max_rel_dev", max_dev, tol)],
    })
}

fn identities(c: &Common, field: &Field) -> Result<Report> {
    if field.pole_location() != Some(PoleLocation::Unit) {
        return Err(usage("identities need a field with pole at (1, 0, 0): series or reflection"));
    }
    let pts = cone_points(field, 2 * c.samples, c.seed);
    let rep = check_identities(field, &pts)?;
    let smooth = pts
        .par_iter()
        .map(|x| field.smooth_part(x))
        .collect::<conewedge::Result<Vec<f64>>>()?;
    let min_f = smooth.iter().copied().fold(f64::INFINITY, f64::min);
    let mut table = Table::new(&["quantity", "value"]);
    for (name, v) in [
        ("translation", rep.translation),
        ("rotation", rep.rotation),
        ("scaling", rep.scaling),
        ("symmetry", rep.symmetry),
        ("min_smooth_part", min_f),
    ] {
        table.push(vec![name.into(), num(v)]);
    }
    let tol = c.tol.unwrap_or(if is_series(field) { 1e-6 } else { 1e-12 });
    Ok(Report {
        name: "identities".into(),
        table,
        results: json!({ "identities": rep, "min_smooth_part": min_f }),
        checks: vec![
            Check::at_most("max_identity_violation", rep.max(), tol),
            // β = 1 has no images and F ≡ 0
            Check::at_least("min_smooth_part", min_f, if field.beta() == 1.0 { 0.0 } else { f64::MIN_POSITIVE }),
        ],
    })
}

fn metric(c: &Common, field: &Field, given: &[[f64; 3]]) -> Result<Report> {
    let pts = points(c, field, given)?;
    let beta = field.beta();
    let rows = pts
        .par_iter()
        .map(|x| {
            let m = metric_at(x, field)?;
            let w = kahler_form_at(x, field)?;
            let det = m.f * m.f * beta * beta * x.r * x.r;
            let det_err = (m.determinant() - det).abs() / det;
            let vol = det.sqrt();
            let w_err = (w.wedge_square() - 2.0 * vol).abs() / (2.0 * vol);
            Ok(vec![
                x.r,
                x.theta,
                x.s,
                m.f,
                m.conn.a1,
                m.conn.a2,
                m.conn.u,
                m.determinant(),
                det_err,
                m.min_eigenvalue(),
                w_err,
            ])
        })
        .collect::<Result<Vec<_>>>()?;
    let mut table = Table::new(&[
        "r", "theta", "s", "f", "a1", "a2", "u", "det", "det_rel_err", "min_eigenvalue", "omega_sq_rel_err",
    ]);
    rows.iter().for_each(|r| table.push_nums(r));
    let worst = max_of(rows.iter().map(|r| r[8].max(r[10])));
    let min_eig = rows.iter().map(|r| r[9]).fold(f64::INFINITY, f64::min);
    Ok(Report {
        name: "metric".into(),
        table,
        results: json!({ "points": pts.len(), "max_identity_rel_err": worst, "min_eigenvalue": min_eig }),
        checks: vec![
            Check::at_most("max_identity_rel_err", worst, c.tol.unwrap_or(1e-9)),
            Check::at_least("min_eigenvalue", min_eig, f64::MIN_POSITIVE),
        ],
    })
}

fn bogomolony(c: &Common, field: &Field, given: &[[f64; 3]]) -> Result<Report> {
    let pts = points(c, field, given)?;
    let res = pts
        .par_iter()
        .map(|x| bogomolony_residual(x, field))
        .collect::<conewedge::Result<Vec<f64>>>()?;
    let mut table = Table::new(&["r", "theta", "s", "residual"]);
    for (x, r) in pts.iter().zip(&res) {
        table.push_nums(&[x.r, x.theta, x.s, *r]);
    }
    let worst = max_of(res.iter().copied());
    let tol = c.tol.unwrap_or(if is_series(field) { 1e-5 } else { 1e-9 });
    Ok(Report {
        name: "bogomolony".into(),
        table,
        results: json!({ "points": pts.len(), "max_residual": worst }),
        checks: vec![Check::at_most("max_residual", worst, tol)],
    })
}

fn wrap(a: f64) -> f64 {
    (a + PI).rem_euclid(2.0 * PI) - PI
}

fn chart(c: &Common, field: &Field, op: &ChartOp) -> Result<Report> {
    match op {
        ChartOp::Forward { point, t } => {
            let pts: Vec<(Point, f64)> = if point.is_empty() {
                cone_points_with_t(field, c.samples, c.seed)
            } else {
                points(c, field, point)?.into_iter().map(|x| (x, *t)).collect()
            };
            let rows = pts
                .par_iter()
                .map(|(x, t)| {
                    let p = forward_chart(x, *t, field)?;
                    let (y, t2) = invert_chart(p.z, p.w, field, &InvertOptions::default())?;
                    let err = (y.r - x.r)
                        .abs()
                        .max(wrap(y.theta - x.theta).abs())
                        .max((y.s - x.s).abs() / (1.0 + x.s.abs()))
                        .max(wrap(t2 - t).abs());
                    Ok(vec![x.r, x.theta, x.s, *t, p.z.re, p.z.im, p.w.re, p.w.im, err])
                })
                .collect::<Result<Vec<_>>>()?;
            let mut table = Table::new(&["r", "theta", "s", "t", "z_re", "z_im", "w_re", "w_im", "roundtrip_err"]);
            rows.iter().for_each(|r| table.push_nums(r));
            let worst = max_of(rows.iter().map(|r| r[8]));
            Ok(Report {
                name: "chart-forward".into(),
                table,
                results: json!({ "points": rows.len(), "max_roundtrip_err": worst }),
                checks: vec![Check::at_most("max_roundtrip_err", worst, c.tol.unwrap_or(1e-10))],
            })
        }
        ChartOp::Invert { z, w } => {
            let (y, t) = invert_chart(*z, *w, field, &InvertOptions::default())?;
            let back = forward_chart(&y, t, field)?;
            let err = (back.z - z).norm().max((back.w - w).norm()) / (1.0 + z.norm().max(w.norm()));
            let mut table = Table::new(&["z_re", "z_im", "w_re", "w_im", "r", "theta", "s", "t", "reforward_err"]);
            table.push_nums(&[z.re, z.im, w.re, w.im, y.r, y.theta, y.s, t, err]);
            Ok(Report {
                name: "chart-invert".into(),
                table,
                results: json!({ "r": y.r, "theta": y.theta, "s": y.s, "t": t, "reforward_err": err }),
                checks: vec![Check::at_most("reforward_err", err, c.tol.unwrap_or(1e-10))],
            })
        }
        ChartOp::Volcheck => {
            let pts = cone_points_with_t(field, c.samples, c.seed);
            let rows = pts
                .par_iter()
                .map(|(x, t)| {
                    let v = volume_identity_residual(x, *t, field)?;
                    Ok(vec![x.r, x.theta, x.s, *t, v.jacobian, v.density])
                })
                .collect::<Result<Vec<_>>>()?;
            let mut table = Table::new(&["r", "theta", "s", "t", "jacobian_rel_err", "density_rel_err"]);
            rows.iter().for_each(|r| table.push_nums(r));
            let worst = max_of(rows.iter().map(|r| r[4].max(r[5])));
            Ok(Report {
                name: "chart-volcheck".into(),
                table,
                results: json!({ "points": rows.len(), "max_rel_err": worst }),
                checks: vec![Check::at_most("max_rel_err", worst, c.tol.unwrap_or(1e-7))],
            })
        }
        ChartOp::Conecoef { theta, s, t, r_min, r_max, n } => {
            if !(*r_min > 0.0 && r_min < r_max) || *n < 2 {
                return Err(usage("conecoef needs 0 < r-min < r-max and n ≥ 2"));
            }
            let radii = logspace(*r_min, *r_max, *n);
            let rows = radii
                .par_iter()
                .map(|&r| {
                    let a = conewedge::chart::cone_coefficients(&Point::new(r, *theta, *s)?, *t, field)?;
                    Ok(vec![r, a.a[0][0].re, a.off_diagonal(), a.a[1][1].re])
                })
                .collect::<Result<Vec<_>>>()?;
            let mut table = Table::new(&["r", "a11", "abs_a12", "a22"]);
            rows.iter().for_each(|r| table.push_nums(r));
            let fit = cone_exponent_fit(*theta, *s, *t, &radii, field)?;
            let limit = cone_limit(*s, *t, field)?;
            let expected = 1.0 / field.beta() - 1.0;
            let pd = limit.is_positive_definite();
            Ok(Report {
                name: "chart-conecoef".into(),
                table,
                results: json!({
                    "slope": fit.slope, "intercept": fit.intercept, "r2": fit.r2,
                    "expected_slope": expected,
                    "limit": [limit.a[0][0].re, limit.a[1][1].re],
                    "limit_positive_definite": pd,
                }),
                checks: vec![
                    Check::at_most("abs(slope - (1/beta - 1))", (fit.slope - expected).abs(), c.tol.unwrap_or(0.1)),
                    Check::at_least("limit_positive_definite", if pd { 1.0 } else { 0.0 }, 1.0),
                ],
            })
        }
    }
}

fn curvature(c: &Common, field: &Field, given: &[[f64; 3]]) -> Result<Report> {
    let pts = points(c, field, given)?;
    let rows = pts
        .par_iter()
        .map(|x| {
            let u = x.unrolled(field.angle());
            let b = curvature_block(u, field)?;
            let d = energy_density(u, field)?;
            // at flat points (|c| ≤ 1e-10) deviations are absolute: there is
            // nothing to be relative to
            let flat = b.max_abs() <= 1e-10;
            let (scale, dscale) = if flat { (1.0, 1.0) } else { (b.max_abs(), b.norm_sq) };
            Ok(vec![
                x.r,
                x.theta,
                x.s,
                b.norm_sq,
                b.trace().abs() / scale,
                b.asymmetry() / scale,
                b.alt_deviation / scale,
                (d - b.norm_sq).abs() / dscale,
                if flat { 1.0 } else { 0.0 },
            ])
        })
        .collect::<Result<Vec<_>>>()?;
    let mut table = Table::new(&[
        "r", "theta", "s", "density", "trace_dev", "asymmetry_dev", "hessian_form_dev", "bilaplacian_dev", "flat",
    ]);
    rows.iter().for_each(|r| table.push_nums(r));
    let worst = max_of(rows.iter().map(|r| r[4].max(r[5]).max(r[6]).max(r[7])));
    let flat = rows.iter().filter(|r| r[8] == 1.0).count();
    let mut results = json!({ "points": rows.len(), "flat_points": flat, "max_dev": worst });
    if let Some(scale) = nut_scale(field) {
        if let Ok(l) = nut_curvature_limit(field) {
            results["nut_curvature"] = json!(l.value);
            results["nut_scale"] = json!(scale);
            results["nut_ratio"] = json!(l.value / scale);
        }
    }
    Ok(Report {
        name: "curvature".into(),
        table,
        results,
        checks: vec![Check::at_most("max_dev", worst, c.tol.unwrap_or(1e-8))],
    })
}

fn energy(c: &Common, field: &Field, route: EnergyRoute) -> Result<Report> {
    let beta = field.beta();
    let target = energy_target(beta);
    let tol = c.tol.unwrap_or(1e-3);
    let mut table = Table::new(&["route", "value", "target", "rel_err"]);
    let mut results = json!({ "beta": beta, "target": target });
    let mut checks = Vec::new();
    if matches!(route, EnergyRoute::Flux | EnergyRoute::Both) {
        let e = energy_flux(field, &FluxOptions::default())?;
        let rel = EnergyReport::new(beta, e.value, None).rel_err_flux;
        table.push(vec!["flux".into(), num(e.value), num(target), num(rel)]);
        results["flux"] = json!({ "options": FluxOptions::<f64>::default(), "result": e, "rel_err": rel });
        checks.push(Check::at_most("flux_rel_err", rel, tol));
    }
    if matches!(route, EnergyRoute::Quad | EnergyRoute::Both) {
        let q = energy_quadrature(field, &QuadratureOptions::default())?;
        let rel = EnergyReport::new(beta, q.value, None).rel_err_flux;
        table.push(vec!["quadrature".into(), num(q.value), num(target), num(rel)]);
        results["quadrature"] =
            json!({ "options": QuadratureOptions::<f64>::default(), "result": q, "rel_err": rel });
        checks.push(Check::at_most("quadrature_rel_err", rel, tol));
    }
    Ok(Report {
        name: "energy".into(),
        table,
        results,
        checks,
    })
}

fn decay(c: &Common, field: &Field, rho: (f64, f64), n: usize, ray: Ray<f64>) -> Result<Report> {
    if !(rho.0 > 0.0 && rho.0 < rho.1) {
        return Err(usage("decay needs 0 < rho-min < rho-max"));
    }
    let opts = ComparisonOptions::default();
    let rep = fit_decay(field, &ray, rho, n, &opts)?;
    let mut table = Table::new(&["rho", "metric_deviation", "kahler_deviation"]);
    for ((r, m), k) in rep.metric.radii.iter().zip(&rep.metric.values).zip(&rep.kahler.values) {
        table.push_nums(&[*r, *m, *k]);
    }
    let expected = expected_decay_rate(field.beta());
    let margin = c.tol.unwrap_or(if expected > -4.0 { 0.25 } else { 0.3 });
    Ok(Report {
        name: "decay".into(),
        table,
        results: json!({
            "ray": rep.ray,
            "comparison": opts,
            "metric_fit": { "slope": rep.metric.slope, "intercept": rep.metric.intercept, "r2": rep.metric.r2 },
            "kahler_fit": { "slope": rep.kahler.slope, "intercept": rep.kahler.intercept, "r2": rep.kahler.r2 },
            "expected_rate": expected,
        }),
        checks: vec![
            Check::at_most("metric_slope", rep.metric.slope, expected + margin),
            Check::at_least("metric_r2", rep.metric.r2, 0.99),
        ],
    })
}

fn modes(c: &Common, field: &Field, ks: &[usize], r: (f64, f64), s: f64, n: usize) -> Result<Report> {
    let tol = c.tol.unwrap_or(0.1);
    let mut table = Table::new(&["k", "slope", "intercept", "r2", "expected_slope"]);
    let mut checks = Vec::new();
    let mut fits = Vec::new();
    for &k in ks {
        let fit = angular_mode_fit(field, k, r, s, n)?;
        let expected = k as f64 / field.beta();
        table.push(vec![k.to_string(), num(fit.slope), num(fit.intercept), num(fit.r2), num(expected)]);
        checks.push(Check::at_most(format!("abs(slope_{k} - k/beta)"), (fit.slope - expected).abs(), tol));
        fits.push(json!({ "k": k, "slope": fit.slope, "r2": fit.r2, "expected_slope": expected }));
    }
    Ok(Report {
        name: "modes".into(),
        table,
        results: json!({ "s": s, "r_range": [r.0, r.1], "fits": fits }),
        checks,
    })
}

fn models(c: &Common, field: &Field, op: &ModelOp) -> Result<Report> {
    match op {
        ModelOp::Taubnut => {
            let tc = c.tn_c;
            if !(tc >= 0.0) {
                return Err(usage(format!("--tn-c must be ≥ 0, got {tc}")));
            }
            let pts = complex_pairs(c.samples, c.seed);
            let rows = pts
                .par_iter()
                .map(|&(z1, z2)| {
                    let (z, w) = taubnut_chart(z1, z2, tc);
                    let (y1, y2) = taubnut_invert(z, w, tc)?;
                    let err = (y1 - z1).norm().max((y2 - z2).norm());
                    let lb = lebrun_potential_check(z, w, tc)?;
                    Ok(vec![z1.re, z1.im, z2.re, z2.im, z.re, z.im, w.re, w.im, err, lb.residual])
                })
                .collect::<Result<Vec<_>>>()?;
            let mut table = Table::new(&[
                "z1_re", "z1_im", "z2_re", "z2_im", "z_re", "z_im", "w_re", "w_im", "roundtrip_err", "lebrun_residual",
            ]);
            rows.iter().for_each(|r| table.push_nums(r));
            let rt = max_of(rows.iter().map(|r| r[8]));
            let lb = max_of(rows.iter().map(|r| r[9]));
            Ok(Report {
                name: "models-taubnut".into(),
                table,
                results: json!({ "tn_c": tc, "points": rows.len(), "max_roundtrip_err": rt, "max_lebrun_residual": lb }),
                checks: vec![
                    Check::at_most("max_roundtrip_err", rt, 1e-12),
                    Check::at_most("max_lebrun_residual", lb, c.tol.unwrap_or(1e-6)),
                ],
            })
        }
        ModelOp::Eh { potential } => {
            let form = match potential {
                EhForm::Consistent => EhPotential::Consistent,
                EhForm::Unweighted => EhPotential::Unweighted,
            };
            if (field.beta() - 0.5).abs() > 1e-14 || field.pole_location() != Some(PoleLocation::Unit) {
                return Err(usage("models eh needs --beta 0.5 with the series or reflection method"));
            }
            let pts: Vec<_> = complex_pairs(4 * c.samples, c.seed)
                .into_iter()
                .filter(|(z, w)| (1.0 - z * w).norm() > 0.05)
                .take(c.samples)
                .collect();
            let rep = eguchi_hanson_potential_check(&pts, field, form)?;
            let mut table = Table::new(&["z_re", "z_im", "w_re", "w_im", "residual", "volume_residual"]);
            for (((z, w), r), v) in pts.iter().zip(&rep.residuals).zip(&rep.volume_residuals) {
                table.push_nums(&[z.re, z.im, w.re, w.im, *r, *v]);
            }
            let vol = max_of(rep.volume_residuals.iter().copied());
            Ok(Report {
                name: "models-eh".into(),
                table,
                results: json!({
                    "potential": format!("{potential:?}").to_lowercase(),
                    "kappa": rep.kappa,
                    "max_residual": rep.max_residual(),
                    "max_volume_residual": vol,
                }),
                checks: vec![
                    Check::at_most("max_residual", rep.max_residual(), c.tol.unwrap_or(1e-6)),
                    Check::at_most("max_volume_residual", vol, 1e-7),
                ],
            })
        }
        ModelOp::Quotient => {
            let n = field
                .angle()
                .reciprocal_integer()
                .ok_or_else(|| usage("models quotient needs 1/β to be an integer"))?;
            let pts = cone_points(field, c.samples, c.seed);
            let rep = quotient_crosscheck(n, &pts)?;
            let mut table = Table::new(&["r", "theta", "s", "deviation"]);
            for (x, d) in pts.iter().zip(&rep.deviations) {
                table.push_nums(&[x.r, x.theta, x.s, *d]);
            }
            Ok(Report {
                name: "models-quotient".into(),
                table,
                results: json!({ "n": n, "points": pts.len(), "max_deviation": rep.max_deviation }),
                checks: vec![Check::at_most("max_deviation", rep.max_deviation, c.tol.unwrap_or(1e-5))],
            })
        }
    }
}
