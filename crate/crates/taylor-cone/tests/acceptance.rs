//! Acceptance suite: one test per criterion, each printing a verdict
//! line (run with `--nocapture` to see them). Tolerances are pinned in
//! the assertions.

use num_bigint::BigInt;
use num_rational::BigRational;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use std::time::Instant;
use taylor_cone::cones::{
    cone_criticality_gamma, critical_angles, critical_threshold, ConeSolution, MaterialConfig,
};
use taylor_cone::constants::{gehring_exponent, lambda0, sobolev_exponent_m, ConstantsLedger};
use taylor_cone::minimizer::{
    alternate_minimize, diagnostics as mdiag, stability_scan, BoundaryPreset, InterfaceState,
    MinimizeProblem, MoveSet, Schedule,
};
use taylor_cone::pde::{self, AxisymGrid, PhaseLayout};

fn verdict(criterion: usize, passed: bool, detail: &str) {
    println!(
        "ACCEPTANCE {criterion}: {} -- {detail}",
        if passed { "PASS" } else { "FAIL" }
    );
    assert!(passed, "criterion {criterion}: {detail}");
}

/// Criterion 1: fold threshold near the known value; no roots at ratio
/// 10, exactly two at ratio 30; all inside (0, pi/2); under 10 s.
#[test]
fn acceptance_1_taylor_cone_threshold() {
    let start = Instant::now();
    let bp = critical_threshold(1e-4).expect("threshold");
    let none = critical_angles(10.0, 1e-10).expect("ratio 10");
    let two = critical_angles(30.0, 1e-10).expect("ratio 30");
    let elapsed = start.elapsed().as_secs_f64();

    let in_window = bp.lambda1 >= 17.54 && bp.lambda1 <= 17.64;
    let interior = two
        .iter()
        .all(|&t| t > 0.0 && t < std::f64::consts::FRAC_PI_2);
    let passed =
        in_window && none.is_empty() && two.len() == 2 && interior && elapsed < 10.0;
    verdict(
        1,
        passed,
        &format!(
            "lambda1 = {:.6}, roots(10) = {}, roots(30) = {}, {elapsed:.1} s",
            bp.lambda1,
            none.len(),
            two.len()
        ),
    );
}

/// Criterion 2: exact-rational ledger values and the closed-form
/// integrability exponent; under 1 s.
#[test]
fn acceptance_2_constants_ledger_exactness() {
    let start = Instant::now();
    let l0 = lambda0(3).expect("lambda0");
    let l0_exact = l0 == BigRational::new(BigInt::from(31), BigInt::from(23));

    let ledger = ConstantsLedger::compute(3, 30.0, 1.0).expect("ledger");
    let ti_exact = ledger.theta_i == BigRational::new(BigInt::from(1), BigInt::from(24));

    let geh = gehring_exponent(3, 2.0, 1.0).expect("exponent");
    let c1 = 2f64.powi(11) * 80f64.powi(3);
    let m = 3.0 / 5.0;
    let p_closed = (2.0 * c1 - m) / (2.0 * c1 - 1.0);
    let p_match = (geh.p - p_closed).abs() <= 1e-15 * p_closed;
    let m_exact = sobolev_exponent_m(3) == BigRational::new(BigInt::from(3), BigInt::from(5));

    let elapsed = start.elapsed().as_secs_f64();
    let passed = l0_exact && ti_exact && p_match && m_exact && elapsed < 1.0;
    verdict(
        2,
        passed,
        &format!(
            "lambda0(3) = {l0}, theta_i(3) = {}, p = {:.17}, {elapsed:.3} s",
            ledger.theta_i, geh.p
        ),
    );
}

/// Criterion 3: the piecewise-linear transmission solution is exact on
/// a 128^2 grid and its flux jump vanishes.
#[test]
fn acceptance_3_transmission_exactness() {
    let (alpha, beta) = (1.0, 5.0);
    let cfg = MaterialConfig::new(2, alpha, beta, 1.0, 0.0).unwrap();
    let grid =
        AxisymGrid::planar(1.0, 128, PhaseLayout::HalfSpaceBelow { offset: 0.0 }).unwrap();
    let exact = move |_x: f64, y: f64| if y >= 0.0 { y / alpha } else { y / beta };
    let field = pde::solve_transmission(&grid, &cfg, &exact, 1e-13).expect("solve");
    let (np, ns) = field.grid.node_counts();
    let mut err = 0.0f64;
    for i in 0..np {
        for j in 0..ns {
            let e = exact(field.grid.nodes_primary[i], field.grid.nodes_secondary[j]);
            err = err.max((field.value(i, j) - e).abs());
        }
    }
    let jump = pde::flux_jump(&field).expect("flux jump");
    let passed = err <= 1e-10 && jump <= 1e-10;
    verdict(3, passed, &format!("max error = {err:.2e}, flux jump = {jump:.2e}"));
}

/// Criterion 4: ball-average monotonicity for 5 random cubic boundary
/// data over 8 geometric radii, tolerance 10 h^2; under 60 s.
#[test]
fn acceptance_4_monotonicity() {
    let start = Instant::now();
    let cfg = MaterialConfig::new(2, 1.0, 5.0, 1.0, 0.0).unwrap();
    let grid =
        AxisymGrid::planar(1.0, 128, PhaseLayout::HalfSpaceBelow { offset: 0.0 }).unwrap();
    let radii: Vec<f64> = (0..8).map(|k| 0.1 * 8f64.powf(k as f64 / 7.0)).collect();
    let mut rng = ChaCha8Rng::seed_from_u64(2024);
    let mut all = true;
    for _ in 0..5 {
        let c: Vec<f64> = (0..10).map(|_| rng.gen_range(-1.0..1.0)).collect();
        let data = move |x: f64, y: f64| {
            c[0] + c[1] * x + c[2] * y + c[3] * x * x + c[4] * x * y + c[5] * y * y
                + c[6] * x * x * x + c[7] * x * x * y + c[8] * x * y * y + c[9] * y * y * y
        };
        let field = pde::solve_transmission(&grid, &cfg, &data, 1e-11).expect("solve");
        let report = pde::check_monotonicity(&field, (0.0, 0.0), &radii).expect("report");
        all &= report.passed();
    }
    let elapsed = start.elapsed().as_secs_f64();
    let passed = all && elapsed < 60.0;
    verdict(4, passed, &format!("5 random solves non-decreasing, {elapsed:.1} s"));
}

/// Criterion 5: exact cone scaling -- fitted exponent 2.00 +- 0.05 over
/// [0.1, 0.8], positive inside-phase constant, and flux-jump decay at
/// rate >= O(h) on a 3-level ladder.
#[test]
fn acceptance_5_cone_scaling() {
    let cfg = MaterialConfig::new(3, 1.0, 30.0, 1.0, 0.0).unwrap();
    let roots = critical_angles(30.0, 1e-12).expect("angles");
    let theta0 = roots[1];
    let sol = ConeSolution::at_critical_angle(theta0, &cfg, 1.0).expect("solution");
    let grid =
        AxisymGrid::cone_axisym(1.0, 0.01, 192, 192, PhaseLayout::Cone { theta0 }).unwrap();
    let field = pde::sample_field(&grid, &cfg, &|rho, theta| sol.potential(rho, theta));
    let radii: Vec<f64> = (0..8).map(|k| 0.1 * 8f64.powf(k as f64 / 7.0)).collect();
    let fit = pde::decay_fit(&field, (0.0, 0.0), &radii).expect("fit");
    let lower = pde::cone_energy_lowerbound_check(&field, &radii).expect("lower bound");

    let mut jumps = Vec::new();
    for n in [48usize, 96, 192] {
        let g = AxisymGrid::cone_axisym(1.0, 0.01, n, n, PhaseLayout::Cone { theta0 }).unwrap();
        let f = pde::sample_field(&g, &cfg, &|rho, theta| sol.potential(rho, theta));
        jumps.push(pde::flux_jump(&f).expect("jump"));
    }
    let rate01 = (jumps[0] / jumps[1]).log2();
    let rate12 = (jumps[1] / jumps[2]).log2();

    let passed = (fit.fitted_exponent - 2.0).abs() <= 0.05
        && lower.c0 > 0.0
        && rate01 >= 0.9
        && rate12 >= 0.9;
    verdict(
        5,
        passed,
        &format!(
            "exponent = {:.4}, c0 = {:.3e}, jump rates = {:.2}, {:.2}",
            fit.fitted_exponent, lower.c0, rate01, rate12
        ),
    );
}

/// Criterion 6: decay against the constant-sigma baseline, three
/// boundary presets, tau in {1/2, 1/4}: E(tau rho)/E(rho) <= 4 C0 tau^2.
#[test]
fn acceptance_6_decay_estimate() {
    let (alpha, beta) = (1.0, 5.0);
    let cfg = MaterialConfig::new(2, alpha, beta, 1.0, 0.0).unwrap();
    let grid_trans =
        AxisymGrid::planar(1.0, 128, PhaseLayout::HalfSpaceBelow { offset: 0.0 }).unwrap();
    let grid_base = AxisymGrid::planar(1.0, 128, PhaseLayout::Uniform).unwrap();
    let rho = 0.8;
    let mut passed = true;
    let mut detail = String::new();
    for preset in [BoundaryPreset::LinearX, BoundaryPreset::Quadratic, BoundaryPreset::TwoPole] {
        let data = move |x: f64, y: f64| preset.eval(x, y, alpha, beta);
        let trans = pde::solve_transmission(&grid_trans, &cfg, &data, 1e-11).expect("solve");
        let base = pde::solve_transmission(&grid_base, &cfg, &data, 1e-11).expect("baseline");
        let e_t = |r: f64| pde::dirichlet_energy(&trans, (0.0, 0.0), r, false).unwrap();
        let e_b = |r: f64| pde::dirichlet_energy(&base, (0.0, 0.0), r, false).unwrap();
        for tau in [0.5, 0.25] {
            let measured = e_t(tau * rho) / e_t(rho);
            let c0 = e_b(tau * rho) / e_b(rho) / (tau * tau);
            let bound = 4.0 * c0 * tau * tau;
            passed &= measured <= bound;
            detail.push_str(&format!(
                "{}/tau {tau}: {measured:.3} <= {bound:.3}; ",
                preset.name()
            ));
        }
    }
    verdict(6, passed, &detail);
}

/// Criterion 7: reference-scenario descent and stability, plus the
/// exact block-move brute-force oracle on the 6x6/3x3 instance; under
/// 5 minutes.
#[test]
fn acceptance_7_minimizer_descent_and_stability() {
    let start = Instant::now();

    // 64^2 reference scenario.
    let problem = MinimizeProblem::default();
    assert_eq!(problem.grid, 64);
    let schedule = Schedule::default();
    let init = InterfaceState::initial(&problem, schedule.solve_tol).expect("init");
    let out = alternate_minimize(init, &schedule).expect("descent");
    let strictly_decreasing = out
        .trace
        .windows(2)
        .all(|w| w[1].energy < w[0].energy - 1e-12);
    let stable = stability_scan(&out.state, &schedule).expect("scan").is_none();
    let cell = out.state.domain.h * out.state.domain.h;
    let vol_ok = (out.state.volume() - 0.5).abs() <= cell + 1e-12;

    // Brute-force oracle: 6x6 grid, phases constant on 3x3 blocks.
    let small = MinimizeProblem { grid: 6, ..MinimizeProblem::default() };
    let mut best_energy = f64::INFINITY;
    for mask in 0u32..16 {
        let mut phase = vec![false; 36];
        for by in 0..2 {
            for bx in 0..2 {
                if mask >> (by * 2 + bx) & 1 == 1 {
                    for iy in 0..3 {
                        for ix in 0..3 {
                            phase[(by * 3 + iy) * 6 + (bx * 3 + ix)] = true;
                        }
                    }
                }
            }
        }
        let state = InterfaceState::new(&small, phase, 1e-11).expect("state");
        best_energy = best_energy.min(state.energy);
    }
    let block_schedule = Schedule { moves: MoveSet::Blocks(3), ..Schedule::default() };
    let from_full =
        InterfaceState::new(&small, vec![true; 36], 1e-11).expect("all-E state");
    let from_empty =
        InterfaceState::new(&small, vec![false; 36], 1e-11).expect("all-complement state");
    let r1 = alternate_minimize(from_full, &block_schedule).expect("blocks from all-E");
    let r2 = alternate_minimize(from_empty, &block_schedule).expect("blocks from empty");
    let above = r1.state.energy >= best_energy - 1e-12 && r2.state.energy >= best_energy - 1e-12;
    let oracle_matched =
        (r1.state.energy.min(r2.state.energy) - best_energy).abs() <= 1e-9;

    let elapsed = start.elapsed().as_secs_f64();
    let passed = strictly_decreasing && stable && vol_ok && above && oracle_matched
        && elapsed < 300.0;
    verdict(
        7,
        passed,
        &format!(
            "trace {} rows decreasing, stable = {stable}, |vol - 1/2| = {:.2e}, \
             block oracle min = {best_energy:.9} vs descent {:.9}, {elapsed:.0} s",
            out.trace.len(),
            (out.state.volume() - 0.5).abs(),
            r1.state.energy.min(r2.state.energy)
        ),
    );
}

/// Criterion 8: desk-scale density bounds on the converged reference
/// scenario (regression values, not paper constants).
#[test]
fn acceptance_8_density_bounds() {
    let problem = MinimizeProblem::default();
    let schedule = Schedule::default();
    let init = InterfaceState::initial(&problem, schedule.solve_tol).expect("init");
    let out = alternate_minimize(init, &schedule).expect("descent");
    let h = out.state.domain.h;
    let radii: Vec<f64> = (0..6)
        .map(|k| 4.0 * h * (0.2 / (4.0 * h)).powf(k as f64 / 5.0))
        .collect();
    let report = mdiag::density_report(&out.state, &radii).expect("densities");
    let passed = report.min_perimeter_density >= 0.5
        && report.max_energy_density <= 10.0 * report.median_energy_density;
    verdict(
        8,
        passed,
        &format!(
            "min P-density = {:.3}, energy density max/median = {:.2}",
            report.min_perimeter_density,
            report.max_energy_density / report.median_energy_density
        ),
    );
}

/// Criterion 9: weak first-variation inequality for 5 seeded bump
/// fields at tolerance 4h on the converged reference scenario, and the
/// multiplier bracket of width <= 4h containing the exact multiplier on
/// the flat critical configuration.
#[test]
fn acceptance_9_first_variation() {
    let problem = MinimizeProblem::default();
    let schedule = Schedule::default();
    let init = InterfaceState::initial(&problem, schedule.solve_tol).expect("init");
    let out = alternate_minimize(init, &schedule).expect("descent");
    let state = &out.state;
    let h = state.domain.h;

    let mut rng = ChaCha8Rng::seed_from_u64(99);
    let mut inequalities = true;
    let w = 0.12;
    let lim = 0.5 - w - 2.0 * h - 1e-9;
    for _ in 0..5 {
        let c = (rng.gen_range(-lim..lim), rng.gen_range(-lim..lim));
        let phi: f64 = rng.gen_range(0.0..std::f64::consts::TAU);
        let field = mdiag::VectorField::bump(c, w, (phi.cos(), phi.sin()));
        let plus = mdiag::first_variation_check(state, &field, 4.0).expect("check");
        let minus = mdiag::first_variation_check_negated(state, &field, 4.0).expect("check");
        inequalities &= plus.holds && minus.holds;
    }

    // Exact flat critical configuration: vertical cut with the exact
    // transmission profile as data; multiplier = 1/beta - 1/alpha.
    let n = 64;
    let flat_problem = MinimizeProblem {
        boundary: BoundaryPreset::PwLinearX,
        ..MinimizeProblem::default()
    };
    let mut phase = vec![false; n * n];
    for iy in 0..n {
        for ix in 0..n / 2 {
            phase[iy * n + ix] = true;
        }
    }
    let flat = InterfaceState::new(&flat_problem, phase, 1e-12).expect("flat state");
    let probe = mdiag::VectorField::bump((0.0, 0.0), 0.15, (1.0, 0.0));
    let bracket =
        mdiag::multiplier_bracket_variational(&flat, &probe, 2.0).expect("bracket");
    let lambda_exact = 1.0 / flat_problem.beta - 1.0 / flat_problem.alpha;
    let width_ok = bracket.width <= 4.0 * flat.domain.h + 1e-15;
    let contains = bracket.lower <= lambda_exact && lambda_exact <= bracket.upper;

    let passed = inequalities && width_ok && contains;
    verdict(
        9,
        passed,
        &format!(
            "5 bump fields hold at 4h; bracket [{:.5}, {:.5}] (width {:.4}) contains {lambda_exact}",
            bracket.lower, bracket.upper, bracket.width
        ),
    );
}
