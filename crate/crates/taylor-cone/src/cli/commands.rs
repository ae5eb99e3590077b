//! Subcommand implementations. Each validates its inputs first (usage
//! errors must not leave artifacts), computes, prints a short summary
//! to stdout, and writes data artifacts plus a run manifest.

use super::output::{csv_table, field_binary, fmt_f64, obj, pgm_p5, Json, RunManifest};
use super::{CliError, Format, Geometry};
use crate::cones::{
    bifurcation_rows, cone_criticality_gamma, critical_angles, critical_threshold, ConeSolution,
    MaterialConfig,
};
use crate::constants::{ConstantsLedger, LogValue};
use crate::minimizer::{
    alternate_minimize, diagnostics as mdiag, BoundaryPreset, InterfaceState, MinimizeProblem,
    Schedule,
};
use crate::pde::{self as pde, AxisymGrid, PhaseLayout, ScalarField};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use std::path::Path;

fn usage(msg: impl ToString) -> CliError {
    CliError::Usage(msg.to_string())
}

fn internal(e: impl ToString) -> CliError {
    CliError::Internal(e.to_string())
}

fn geometric_radii(lo: f64, hi: f64, count: usize) -> Vec<f64> {
    (0..count)
        .map(|k| lo * (hi / lo).powf(k as f64 / (count - 1) as f64))
        .collect()
}

fn log_value_fields(name: &str, v: LogValue) -> Vec<(String, Json)> {
    vec![
        (name.to_string(), Json::Num(v.linear)),
        (format!("log10_{name}"), Json::Num(v.log10)),
    ]
}

// ---------------------------------------------------------------- constants

pub(super) fn constants(
    n: usize,
    ratio: f64,
    cs: f64,
    format: Format,
    out: &Path,
) -> Result<(), CliError> {
    let ledger = ConstantsLedger::compute(n, ratio, cs).map_err(usage)?;
    eprintln!(
        "note: ledger values are conditional on the Sobolev-Poincare constant C_S = {}",
        fmt_f64(cs)
    );
    if ledger.delta1.underflowed() {
        eprintln!(
            "note: delta1 underflows binary64 (log10 = {}); trust the log10 fields",
            fmt_f64(ledger.delta1.log10)
        );
    }

    let mut fields: Vec<(String, Json)> = vec![
        ("n".into(), Json::Int(n as i64)),
        ("ratio".into(), Json::Num(ratio)),
        ("c_s".into(), Json::Num(cs)),
        ("m".into(), Json::Str(ledger.m.to_string())),
        ("m_f64".into(), Json::Num(ledger.m_f64)),
        ("c_cacc".into(), Json::Num(ledger.c_cacc)),
        ("c1_gehring".into(), Json::Num(ledger.c1_gehring)),
        ("p".into(), Json::Num(ledger.p)),
        ("p_minus_1".into(), Json::Num(ledger.p_minus_1)),
        ("c_gehring".into(), Json::Num(ledger.c_gehring)),
        ("log10_c_gehring".into(), Json::Num(ledger.log10_c_gehring)),
        ("theta_i".into(), Json::Str(ledger.theta_i.to_string())),
        ("theta_i_f64".into(), Json::Num(ledger.theta_i_f64)),
        ("theta_iii".into(), Json::Num(ledger.theta_iii)),
        ("lambda0".into(), Json::Str(ledger.lambda0.to_string())),
        ("lambda0_f64".into(), Json::Num(ledger.lambda0_f64)),
        ("omega_n".into(), Json::Num(ledger.omega_n)),
        ("omega_n_minus_1".into(), Json::Num(ledger.omega_n_minus_1)),
    ];
    fields.extend(log_value_fields("chi", ledger.chi));
    fields.extend(log_value_fields("delta1", ledger.delta1));
    fields.extend(log_value_fields("delta0", ledger.delta0));
    fields.extend(log_value_fields("theta_small", ledger.theta_small));
    fields.extend(log_value_fields("flat_margin", ledger.flat_margin));
    for (tau, e) in &ledger.eps0 {
        fields.extend(log_value_fields(&format!("eps0_tau_{tau}"), *e));
    }

    let mut manifest = RunManifest::new("constants");
    manifest.param("n", n);
    manifest.param("ratio", fmt_f64(ratio));
    manifest.param("cs", fmt_f64(cs));
    match format {
        Format::Json => {
            let body = Json::Obj(fields).render() + "\n";
            print!("{body}");
            manifest.write_artifact(&out.join("constants.json"), body.as_bytes())?;
        }
        Format::Csv => {
            let mut s = String::from("name,value\n");
            for (k, v) in &fields {
                let cell = match v {
                    Json::Num(x) => fmt_f64(*x),
                    Json::Int(i) => i.to_string(),
                    Json::Str(t) => t.clone(),
                    _ => continue,
                };
                s.push_str(&format!("{k},{cell}\n"));
            }
            print!("{s}");
            manifest.write_artifact(&out.join("constants.csv"), s.as_bytes())?;
        }
    }
    manifest.finish(out)?;
    Ok(())
}

// --------------------------------------------------------------- cone-angles

pub(super) fn cone_angles(
    ratio: f64,
    tol: f64,
    format: Format,
    out: &Path,
) -> Result<(), CliError> {
    if !(ratio > 1.0) {
        return Err(usage(format!("--ratio {ratio} must exceed 1")));
    }
    if !(tol > 0.0) {
        return Err(usage("--tol must be positive"));
    }
    let roots = critical_angles(ratio, tol).map_err(internal)?;
    println!("ratio = {}", fmt_f64(ratio));
    println!("critical_angles = {}", roots.len());
    for (k, r) in roots.iter().enumerate() {
        println!("theta_{k} = {}", fmt_f64(*r));
    }
    let mut manifest = RunManifest::new("cone-angles");
    manifest.param("ratio", fmt_f64(ratio));
    manifest.param("tol", fmt_f64(tol));
    match format {
        Format::Json => {
            let body = obj(vec![
                ("ratio", Json::Num(ratio)),
                ("count", Json::Int(roots.len() as i64)),
                ("angles", Json::Arr(roots.iter().map(|&r| Json::Num(r)).collect())),
            ])
            .render()
                + "\n";
            manifest.write_artifact(&out.join("cone_angles.json"), body.as_bytes())?;
        }
        Format::Csv => {
            let rows: Vec<Vec<f64>> = roots
                .iter()
                .enumerate()
                .map(|(k, &r)| vec![k as f64, r])
                .collect();
            let body = csv_table(&["index", "theta"], &rows);
            manifest.write_artifact(&out.join("cone_angles.csv"), body.as_bytes())?;
        }
    }
    manifest.finish(out)?;
    Ok(())
}

// ----------------------------------------------------------------- threshold

pub(super) fn threshold(tol: f64, out: &Path) -> Result<(), CliError> {
    if !(tol > 0.0 && tol < 0.1) {
        return Err(usage(format!("--tol {tol} must lie in (0, 0.1)")));
    }
    let bp = critical_threshold(tol).map_err(internal)?;
    println!("lambda1 = {}", fmt_f64(bp.lambda1));
    println!("theta_star = {}", fmt_f64(bp.theta_star));

    // Bifurcation diagram over a ratio sweep spanning the fold.
    let ratios: Vec<f64> = (0..=100).map(|k| 15.0 + 0.25 * k as f64).collect();
    let rows_raw = bifurcation_rows(&ratios, 1e-10).map_err(internal)?;
    let rows: Vec<Vec<f64>> = rows_raw.iter().map(|&(r, t1, t2)| vec![r, t1, t2]).collect();
    let csv = csv_table(&["ratio", "theta_root1", "theta_root2"], &rows);

    let mut manifest = RunManifest::new("threshold");
    manifest.param("tol", fmt_f64(tol));
    manifest.write_artifact(&out.join("bifurcation.csv"), csv.as_bytes())?;
    let body = obj(vec![
        ("lambda1", Json::Num(bp.lambda1)),
        ("theta_star", Json::Num(bp.theta_star)),
        ("tol", Json::Num(tol)),
    ])
    .render()
        + "\n";
    manifest.write_artifact(&out.join("threshold.json"), body.as_bytes())?;
    manifest.finish(out)?;
    Ok(())
}

// ---------------------------------------------------------------- cone-gamma

pub(super) fn cone_gamma(
    ratio: f64,
    root: &str,
    amplitude: f64,
    alpha: f64,
    out: &Path,
) -> Result<(), CliError> {
    if !(ratio > 1.0) {
        return Err(usage(format!("--ratio {ratio} must exceed 1")));
    }
    if !(amplitude > 0.0 && alpha > 0.0) {
        return Err(usage("--amplitude and --alpha must be positive"));
    }
    let pick_larger = match root {
        "larger" => true,
        "smaller" => false,
        other => return Err(usage(format!("--root must be smaller or larger, got '{other}'"))),
    };
    let roots = critical_angles(ratio, 1e-12).map_err(internal)?;
    if roots.is_empty() {
        return Err(usage(format!(
            "ratio {ratio} is below the fold threshold: no critical cone exists"
        )));
    }
    let theta0 = if pick_larger { roots[roots.len() - 1] } else { roots[0] };
    let cfg = MaterialConfig::new(3, alpha, alpha * ratio, 1.0, 0.0).map_err(usage)?;
    let gamma = cone_criticality_gamma(theta0, &cfg, amplitude).map_err(internal)?;
    let sol = ConeSolution::at_critical_angle(theta0, &cfg, amplitude).map_err(internal)?;
    let (nin, nout, tan) = sol.boundary_gradient(1.0).map_err(internal)?;

    println!("theta0 = {}", fmt_f64(theta0));
    println!("gamma = {}", fmt_f64(gamma));

    let mut manifest = RunManifest::new("cone-gamma");
    manifest.param("ratio", fmt_f64(ratio));
    manifest.param("root", root);
    manifest.param("amplitude", fmt_f64(amplitude));
    manifest.param("alpha", fmt_f64(alpha));
    let body = obj(vec![
        ("ratio", Json::Num(ratio)),
        ("theta0", Json::Num(theta0)),
        ("gamma", Json::Num(gamma)),
        ("amplitude", Json::Num(amplitude)),
        ("normal_in_at_rho1", Json::Num(nin)),
        ("normal_out_at_rho1", Json::Num(nout)),
        ("tangential_at_rho1", Json::Num(tan)),
    ])
    .render()
        + "\n";
    manifest.write_artifact(&out.join("cone_gamma.json"), body.as_bytes())?;
    manifest.finish(out)?;
    Ok(())
}

// --------------------------------------------------------------------- solve

/// Planar boundary data by name; `pw-linear` is the exact transmission
/// profile for the horizontal interface.
fn planar_boundary(
    name: &str,
    alpha: f64,
    beta: f64,
) -> Result<Box<dyn Fn(f64, f64) -> f64>, CliError> {
    match name {
        "pw-linear" => Ok(Box::new(move |_x, y| {
            if y >= 0.0 {
                y / alpha
            } else {
                y / beta
            }
        })),
        other => {
            let preset = BoundaryPreset::parse(other).map_err(usage)?;
            Ok(Box::new(move |x, y| preset.eval(x, y, alpha, beta)))
        }
    }
}

fn check_material(alpha: f64, beta: f64) -> Result<(), CliError> {
    if !(0.0 < alpha && alpha < beta) {
        return Err(usage(format!("need 0 < alpha < beta, got {alpha} and {beta}")));
    }
    Ok(())
}

fn write_field(
    manifest: &mut RunManifest,
    out: &Path,
    stem: &str,
    field: &ScalarField,
    extra: Vec<(&str, Json)>,
) -> Result<(), CliError> {
    let (np, ns) = field.grid.node_counts();
    let sp = field.grid.nodes_primary[1] - field.grid.nodes_primary[0];
    let ss = field.grid.nodes_secondary[1] - field.grid.nodes_secondary[0];
    let bin = field_binary(np, ns, sp, ss, &field.values);
    manifest.write_artifact(&out.join(format!("{stem}.bin")), &bin)?;

    let mut fields = vec![
        (
            "shape".to_string(),
            Json::Str(
                match field.grid.shape {
                    pde::GridShape::HalfSpace2d { .. } => "half-space-2d",
                    pde::GridShape::ConeAxisym3d { .. } => "cone-axisym-3d",
                }
                .to_string(),
            ),
        ),
        ("n_eff".to_string(), Json::Int(field.grid.n_eff() as i64)),
        ("nodes_primary".to_string(), Json::Int(np as i64)),
        ("nodes_secondary".to_string(), Json::Int(ns as i64)),
        ("alpha".to_string(), Json::Num(field.alpha)),
        ("beta".to_string(), Json::Num(field.beta)),
        ("solver_residual".to_string(), Json::Num(field.residual)),
        (
            "axis_primary".to_string(),
            Json::Arr(field.grid.nodes_primary.iter().map(|&x| Json::Num(x)).collect()),
        ),
        (
            "axis_secondary".to_string(),
            Json::Arr(field.grid.nodes_secondary.iter().map(|&x| Json::Num(x)).collect()),
        ),
    ];
    for (k, v) in extra {
        fields.push((k.to_string(), v));
    }
    let meta = Json::Obj(fields).render() + "\n";
    manifest.write_artifact(&out.join(format!("{stem}.meta.json")), meta.as_bytes())?;
    Ok(())
}

pub(super) fn solve(
    geometry: Geometry,
    cells: usize,
    alpha: f64,
    beta: f64,
    boundary: &str,
    tol: f64,
    out: &Path,
) -> Result<(), CliError> {
    check_material(alpha, beta)?;
    if !(tol > 0.0) {
        return Err(usage("--tol must be positive"));
    }
    let mut manifest = RunManifest::new("solve");
    manifest.param("geometry", format!("{geometry:?}"));
    manifest.param("cells", cells);
    manifest.param("alpha", fmt_f64(alpha));
    manifest.param("beta", fmt_f64(beta));
    manifest.param("boundary", boundary);
    manifest.param("tol", fmt_f64(tol));

    match geometry {
        Geometry::HalfSpace => {
            let data = planar_boundary(boundary, alpha, beta)?;
            let grid = AxisymGrid::planar(1.0, cells, PhaseLayout::HalfSpaceBelow { offset: 0.0 })
                .map_err(usage)?;
            let cfg = MaterialConfig::new(2, alpha, beta, 1.0, 0.0).map_err(usage)?;
            let field = pde::solve_transmission(&grid, &cfg, &data, tol).map_err(internal)?;
            let jump = pde::flux_jump(&field).map_err(internal)?;
            let residual = pde::interior_residual(&field);
            println!("flux_jump = {}", fmt_f64(jump));
            println!("interior_residual = {}", fmt_f64(residual));
            let mut extra = vec![
                ("flux_jump", Json::Num(jump)),
                ("interior_residual", Json::Num(residual)),
            ];
            if boundary == "pw-linear" {
                // Exactness against the closed form.
                let mut err = 0.0f64;
                let (np, ns) = field.grid.node_counts();
                for i in 0..np {
                    for j in 0..ns {
                        let y = field.grid.nodes_secondary[j];
                        let exact = if y >= 0.0 { y / alpha } else { y / beta };
                        err = err.max((field.value(i, j) - exact).abs());
                    }
                }
                println!("max_error_vs_exact = {}", fmt_f64(err));
                extra.push(("max_error_vs_exact", Json::Num(err)));
            }
            write_field(&mut manifest, out, "field", &field, extra)?;
        }
        Geometry::Cone => {
            let ratio = beta / alpha;
            let roots = critical_angles(ratio, 1e-12).map_err(internal)?;
            if roots.is_empty() {
                return Err(usage(format!(
                    "beta/alpha = {ratio} is below the fold threshold: no critical cone"
                )));
            }
            let theta0 = roots[roots.len() - 1];
            let cfg = MaterialConfig::new(3, alpha, beta, 1.0, 0.0).map_err(usage)?;
            let sol = ConeSolution::at_critical_angle(theta0, &cfg, 1.0).map_err(internal)?;
            let grid =
                AxisymGrid::cone_axisym(1.0, 0.01, cells, cells, PhaseLayout::Cone { theta0 })
                    .map_err(usage)?;
            let field =
                pde::solve_transmission(&grid, &cfg, &|rho, theta| sol.potential(rho, theta), tol)
                    .map_err(internal)?;
            let jump = pde::flux_jump(&field).map_err(internal)?;
            println!("theta0 = {}", fmt_f64(theta0));
            println!("flux_jump = {}", fmt_f64(jump));
            write_field(
                &mut manifest,
                out,
                "field",
                &field,
                vec![("theta0", Json::Num(theta0)), ("flux_jump", Json::Num(jump))],
            )?;
        }
    }
    manifest.finish(out)?;
    Ok(())
}

// --------------------------------------------------------------------- decay

pub(super) fn decay(
    geometry: Geometry,
    cells: usize,
    alpha: f64,
    beta: f64,
    boundary: &str,
    out: &Path,
) -> Result<(), CliError> {
    check_material(alpha, beta)?;
    let mut manifest = RunManifest::new("decay");
    manifest.param("geometry", format!("{geometry:?}"));
    manifest.param("cells", cells);
    manifest.param("alpha", fmt_f64(alpha));
    manifest.param("beta", fmt_f64(beta));
    manifest.param("boundary", boundary);

    let radii = geometric_radii(0.1, 0.8, 8);
    match geometry {
        Geometry::HalfSpace => {
            let data = planar_boundary(boundary, alpha, beta)?;
            let grid = AxisymGrid::planar(1.0, cells, PhaseLayout::HalfSpaceBelow { offset: 0.0 })
                .map_err(usage)?;
            let cfg = MaterialConfig::new(2, alpha, beta, 1.0, 0.0).map_err(usage)?;
            let field = pde::solve_transmission(&grid, &cfg, &data, 1e-10).map_err(internal)?;
            let fit = pde::decay_fit(&field, (0.0, 0.0), &radii).map_err(internal)?;
            let mut rows = Vec::new();
            for (k, &r) in radii.iter().enumerate() {
                let weighted =
                    pde::dirichlet_energy(&field, (0.0, 0.0), r, true).map_err(internal)?;
                rows.push(vec![r, fit.energies[k], weighted]);
            }
            println!("fitted_exponent = {}", fmt_f64(fit.fitted_exponent));
            let csv = csv_table(&["rho", "energy", "weighted_energy"], &rows);
            manifest.write_artifact(&out.join("decay.csv"), csv.as_bytes())?;
            let body = obj(vec![
                ("fitted_exponent", Json::Num(fit.fitted_exponent)),
                ("fit_residual", Json::Num(fit.fit_residual)),
            ])
            .render()
                + "\n";
            manifest.write_artifact(&out.join("decay.json"), body.as_bytes())?;
        }
        Geometry::Cone => {
            let ratio = beta / alpha;
            let roots = critical_angles(ratio, 1e-12).map_err(internal)?;
            if roots.is_empty() {
                return Err(usage(format!(
                    "beta/alpha = {ratio} is below the fold threshold: no critical cone"
                )));
            }
            let theta0 = roots[roots.len() - 1];
            let cfg = MaterialConfig::new(3, alpha, beta, 1.0, 0.0).map_err(usage)?;
            let sol = ConeSolution::at_critical_angle(theta0, &cfg, 1.0).map_err(internal)?;
            let grid =
                AxisymGrid::cone_axisym(1.0, 0.01, cells, cells, PhaseLayout::Cone { theta0 })
                    .map_err(usage)?;
            let field = pde::sample_field(&grid, &cfg, &|rho, theta| sol.potential(rho, theta));
            let fit = pde::decay_fit(&field, (0.0, 0.0), &radii).map_err(internal)?;
            let lower = pde::cone_energy_lowerbound_check(&field, &radii).map_err(internal)?;
            // Flux-jump refinement ladder at cells, cells/2, cells/4.
            let mut ladder = Vec::new();
            for div in [4usize, 2, 1] {
                let n = (cells / div).max(24);
                let g = AxisymGrid::cone_axisym(1.0, 0.01, n, n, PhaseLayout::Cone { theta0 })
                    .map_err(usage)?;
                let f = pde::sample_field(&g, &cfg, &|rho, theta| sol.potential(rho, theta));
                ladder.push((n, pde::flux_jump(&f).map_err(internal)?));
            }
            println!("theta0 = {}", fmt_f64(theta0));
            println!("fitted_exponent = {}", fmt_f64(fit.fitted_exponent));
            println!("inside_c0 = {}", fmt_f64(lower.c0));
            let mut rows = Vec::new();
            for (k, &r) in radii.iter().enumerate() {
                let weighted =
                    pde::dirichlet_energy(&field, (0.0, 0.0), r, true).map_err(internal)?;
                rows.push(vec![r, fit.energies[k], weighted]);
            }
            let csv = csv_table(&["rho", "energy", "weighted_energy"], &rows);
            manifest.write_artifact(&out.join("decay.csv"), csv.as_bytes())?;
            let body = obj(vec![
                ("theta0", Json::Num(theta0)),
                ("fitted_exponent", Json::Num(fit.fitted_exponent)),
                ("fit_residual", Json::Num(fit.fit_residual)),
                ("inside_exponent", Json::Num(lower.fitted_exponent)),
                ("inside_c0", Json::Num(lower.c0)),
                (
                    "flux_jump_ladder",
                    Json::Arr(
                        ladder
                            .iter()
                            .map(|&(n, j)| {
                                obj(vec![("cells", Json::Int(n as i64)), ("jump", Json::Num(j))])
                            })
                            .collect(),
                    ),
                ),
            ])
            .render()
                + "\n";
            manifest.write_artifact(&out.join("decay.json"), body.as_bytes())?;
        }
    }
    manifest.finish(out)?;
    Ok(())
}

// -------------------------------------------------------------- monotonicity

pub(super) fn monotonicity(
    cells: usize,
    alpha: f64,
    beta: f64,
    solves: usize,
    seed: u64,
    out: &Path,
) -> Result<(), CliError> {
    check_material(alpha, beta)?;
    if solves == 0 {
        return Err(usage("--solves must be at least 1"));
    }
    let grid = AxisymGrid::planar(1.0, cells, PhaseLayout::HalfSpaceBelow { offset: 0.0 })
        .map_err(usage)?;
    let cfg = MaterialConfig::new(2, alpha, beta, 1.0, 0.0).map_err(usage)?;
    let radii = geometric_radii(0.1, 0.8, 8);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut rows = Vec::new();
    let mut all_passed = true;
    for s in 0..solves {
        let coef: Vec<f64> = (0..10).map(|_| rng.gen_range(-1.0..1.0)).collect();
        let data = move |x: f64, y: f64| {
            coef[0]
                + coef[1] * x
                + coef[2] * y
                + coef[3] * x * x
                + coef[4] * x * y
                + coef[5] * y * y
                + coef[6] * x * x * x
                + coef[7] * x * x * y
                + coef[8] * x * y * y
                + coef[9] * y * y * y
        };
        let field = pde::solve_transmission(&grid, &cfg, &data, 1e-11).map_err(internal)?;
        let report = pde::check_monotonicity(&field, (0.0, 0.0), &radii).map_err(internal)?;
        let passed = report.passed();
        all_passed &= passed;
        println!(
            "solve {s}: {}",
            if passed { "non-decreasing (ok)" } else { "VIOLATION" }
        );
        for (k, &r) in radii.iter().enumerate() {
            rows.push(vec![s as f64, r, report.averages[k]]);
        }
    }
    println!("monotonicity = {}", if all_passed { "PASS" } else { "FAIL" });

    let mut manifest = RunManifest::new("monotonicity");
    manifest.param("cells", cells);
    manifest.param("alpha", fmt_f64(alpha));
    manifest.param("beta", fmt_f64(beta));
    manifest.param("solves", solves);
    manifest.param("seed", seed);
    let csv = csv_table(&["solve", "rho", "ball_average"], &rows);
    manifest.write_artifact(&out.join("monotonicity.csv"), csv.as_bytes())?;
    let body = obj(vec![
        ("passed", Json::Bool(all_passed)),
        ("solves", Json::Int(solves as i64)),
        ("tolerance", Json::Num(10.0 * grid.h() * grid.h())),
    ])
    .render()
        + "\n";
    manifest.write_artifact(&out.join("monotonicity.json"), body.as_bytes())?;
    manifest.finish(out)?;
    Ok(())
}

// ------------------------------------------------------------ reverse-holder

pub(super) fn reverse_holder(
    cells: usize,
    alpha: f64,
    beta: f64,
    cs: f64,
    boundary: &str,
    out: &Path,
) -> Result<(), CliError> {
    check_material(alpha, beta)?;
    let ledger = ConstantsLedger::compute(2, beta / alpha, cs).map_err(usage)?;
    let data = planar_boundary(boundary, alpha, beta)?;
    let grid = AxisymGrid::planar(1.0, cells, PhaseLayout::HalfSpaceBelow { offset: 0.0 })
        .map_err(usage)?;
    let cfg = MaterialConfig::new(2, alpha, beta, 1.0, 0.0).map_err(usage)?;
    let field = pde::solve_transmission(&grid, &cfg, &data, 1e-10).map_err(internal)?;
    let balls = [
        ((0.0, 0.0), 0.2),
        ((0.2, 0.1), 0.3),
        ((-0.3, -0.2), 0.25),
        ((0.25, -0.25), 0.2),
    ];
    let report = pde::reverse_holder_check(&field, &ledger, &balls).map_err(internal)?;
    println!("p = {}", fmt_f64(report.p));
    println!("c_gehring = {}", fmt_f64(report.c));
    println!("max_ratio = {}", fmt_f64(report.max_ratio));
    println!(
        "smallest_empirical_c = {}",
        fmt_f64(report.smallest_empirical_c)
    );
    println!(
        "reverse_holder = {}",
        if report.max_ratio <= 1.0 { "PASS" } else { "FAIL" }
    );

    let mut manifest = RunManifest::new("reverse-holder");
    manifest.param("cells", cells);
    manifest.param("alpha", fmt_f64(alpha));
    manifest.param("beta", fmt_f64(beta));
    manifest.param("cs", fmt_f64(cs));
    manifest.param("boundary", boundary);
    let rows: Vec<Vec<f64>> = report
        .entries
        .iter()
        .map(|e| vec![e.center.0, e.center.1, e.r, e.lhs, e.rhs_pow, e.ratio])
        .collect();
    let csv = csv_table(&["x", "y", "r", "lhs_avg", "rhs_avg_pow_p", "ratio"], &rows);
    manifest.write_artifact(&out.join("reverse_holder.csv"), csv.as_bytes())?;
    let body = obj(vec![
        ("p", Json::Num(report.p)),
        ("c_gehring", Json::Num(report.c)),
        ("max_ratio", Json::Num(report.max_ratio)),
        ("smallest_empirical_c", Json::Num(report.smallest_empirical_c)),
        ("passed", Json::Bool(report.max_ratio <= 1.0)),
    ])
    .render()
        + "\n";
    manifest.write_artifact(&out.join("reverse_holder.json"), body.as_bytes())?;
    manifest.finish(out)?;
    Ok(())
}

// ------------------------------------------------------------------ minimize

/// Seeded compact bump fields used by the first-variation diagnostic.
fn seeded_bumps(state: &InterfaceState, count: usize, seed: u64) -> Vec<mdiag::VectorField> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let h = state.domain.h;
    let w = 0.12f64;
    let lim = 0.5 - w - 2.0 * h - 1e-6;
    (0..count)
        .map(|_| {
            let cx: f64 = rng.gen_range(-lim..lim);
            let cy: f64 = rng.gen_range(-lim..lim);
            let phi: f64 = rng.gen_range(0.0..std::f64::consts::TAU);
            mdiag::VectorField::bump((cx, cy), w, (phi.cos(), phi.sin()))
        })
        .collect()
}

pub(super) fn minimize(config: &Path, out: &Path) -> Result<(), CliError> {
    let text = std::fs::read_to_string(config)
        .map_err(|e| usage(format!("cannot read config {}: {e}", config.display())))?;
    let problem = MinimizeProblem::from_key_values(&text).map_err(usage)?;
    let schedule = Schedule { max_sweeps: problem.sweeps, ..Schedule::default() };
    let init = InterfaceState::initial(&problem, schedule.solve_tol).map_err(internal)?;
    let outcome = alternate_minimize(init, &schedule).map_err(internal)?;
    let state = &outcome.state;

    println!("energy = {}", fmt_f64(state.energy));
    println!("perimeter = {}", fmt_f64(state.perimeter()));
    println!("volume = {}", fmt_f64(state.volume()));
    println!(
        "converged = {}; budget_exceeded = {}",
        outcome.converged, outcome.budget_exceeded
    );

    let mut manifest = RunManifest::new("minimize");
    manifest.param("config", config.display().to_string());
    manifest.param("grid", problem.grid);
    manifest.param("boundary", problem.boundary.name());
    manifest.param("sweeps", problem.sweeps);

    // Phase bitmap.
    manifest.write_artifact(
        &out.join("phase.pgm"),
        &pgm_p5(problem.grid, &state.phase),
    )?;
    // Potential field.
    write_field(&mut manifest, out, "field", &state.u, vec![])?;
    // Energy trace.
    let rows: Vec<Vec<f64>> = outcome
        .trace
        .iter()
        .map(|t| vec![t.sweep as f64, t.energy, t.perimeter, t.dirichlet, t.volume])
        .collect();
    let csv = csv_table(&["sweep", "energy", "perimeter", "dirichlet", "volume"], &rows);
    manifest.write_artifact(&out.join("trace.csv"), csv.as_bytes())?;

    // Diagnostics: densities, multiplier bracket, first variation.
    let h = state.domain.h;
    let radii = geometric_radii(4.0 * h, 0.2, 6);
    let density = mdiag::density_report(state, &radii).map_err(internal)?;
    let bracket = mdiag::multiplier_bracket(state, schedule.solve_tol).map_err(internal)?;
    let mut fv_checks = Vec::new();
    for (k, field) in seeded_bumps(state, 5, 1234).iter().enumerate() {
        let plus = mdiag::first_variation_check(state, field, 4.0).map_err(internal)?;
        let minus = mdiag::first_variation_check_negated(state, field, 4.0).map_err(internal)?;
        fv_checks.push(obj(vec![
            ("field", Json::Int(k as i64)),
            ("lhs_plus", Json::Num(plus.lhs)),
            ("lhs_minus", Json::Num(minus.lhs)),
            ("rhs", Json::Num(plus.rhs)),
            ("tolerance", Json::Num(plus.tolerance)),
            ("holds", Json::Bool(plus.holds && minus.holds)),
        ]));
    }
    let body = obj(vec![
        ("energy", Json::Num(state.energy)),
        ("perimeter", Json::Num(state.perimeter())),
        ("dirichlet", Json::Num(state.dirichlet())),
        ("volume", Json::Num(state.volume())),
        ("target_volume", Json::Num(state.target_volume)),
        ("converged", Json::Bool(outcome.converged)),
        ("budget_exceeded", Json::Bool(outcome.budget_exceeded)),
        ("accepted_flips", Json::Int(outcome.accepted_flips as i64)),
        ("min_perimeter_density", Json::Num(density.min_perimeter_density)),
        ("max_energy_density", Json::Num(density.max_energy_density)),
        ("median_energy_density", Json::Num(density.median_energy_density)),
        ("multiplier_estimate", Json::Num(bracket.estimate)),
        ("multiplier_lower", Json::Num(bracket.lower)),
        ("multiplier_upper", Json::Num(bracket.upper)),
        ("multiplier_width", Json::Num(bracket.width)),
        ("first_variation", Json::Arr(fv_checks)),
    ])
    .render()
        + "\n";
    manifest.write_artifact(&out.join("diagnostics.json"), body.as_bytes())?;
    manifest.finish(out)?;
    Ok(())
}

// -------------------------------------------------------------------- report

pub(super) fn report(out: &Path) -> Result<(), CliError> {
    let dir = out.join("report");
    println!("# fold threshold");
    threshold(1e-4, &dir)?;
    println!("# critical angles");
    cone_angles(10.0, 1e-10, Format::Json, &dir.join("angles_ratio_10"))?;
    cone_angles(30.0, 1e-10, Format::Json, &dir.join("angles_ratio_30"))?;
    println!("# criticality gamma");
    cone_gamma(30.0, "larger", 1.0, 1.0, &dir)?;
    println!("# constants ledgers (n = 3)");
    for ratio in [2.0, 17.59, 30.0] {
        constants(3, ratio, 1.0, Format::Json, &dir.join(format!("constants_ratio_{ratio}")))?;
    }
    println!("# half-space transmission exactness");
    solve(Geometry::HalfSpace, 128, 1.0, 5.0, "pw-linear", 1e-12, &dir.join("halfspace"))?;
    println!("# cone scaling");
    decay(Geometry::Cone, 192, 1.0, 30.0, "exact", &dir.join("cone"))?;
    println!("# half-space decay");
    decay(Geometry::HalfSpace, 128, 1.0, 5.0, "quadratic", &dir.join("halfspace_decay"))?;
    println!("# monotonicity");
    monotonicity(64, 1.0, 5.0, 5, 0, &dir)?;
    println!("# reverse Holder");
    reverse_holder(64, 1.0, 5.0, 1.0, "quadratic", &dir)?;
    println!("# reference minimization");
    let cfg_text = "\
grid = 64
gamma = 0.1
alpha = 1
beta = 5
Lambda = 10
target_volume = 0.5
boundary = linear-x
seed = vertical-cut
sweeps = 200
";
    let cfg_path = dir.join("reference_scenario.cfg");
    std::fs::create_dir_all(&dir)?;
    std::fs::write(&cfg_path, cfg_text)?;
    minimize(&cfg_path, &dir.join("minimize"))?;

    let mut manifest = RunManifest::new("report");
    manifest.param("scope", "default desk-scale settings");
    manifest.finish(&dir)?;
    println!("report written to {}", dir.display());
    Ok(())
}
