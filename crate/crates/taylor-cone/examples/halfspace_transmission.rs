//! Half-space transmission solve: exact reproduction of the
//! piecewise-linear profile, flux continuity at the interface, and the
//! monotonicity of ball averages for random polynomial data.
//!
//! Run with: cargo run --release --example halfspace_transmission

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use taylor_cone::cones::MaterialConfig;
use taylor_cone::pde::{self, AxisymGrid, PhaseLayout};

fn main() {
    let (alpha, beta) = (1.0, 5.0);
    let cfg = MaterialConfig::new(2, alpha, beta, 1.0, 0.0).unwrap();
    let grid = AxisymGrid::planar(1.0, 128, PhaseLayout::HalfSpaceBelow { offset: 0.0 }).unwrap();

    // The exact solution y/sigma(y) is continuous with continuous flux.
    let exact = move |_x: f64, y: f64| if y >= 0.0 { y / alpha } else { y / beta };
    let field = pde::solve_transmission(&grid, &cfg, &exact, 1e-12).expect("solve");
    let (np, ns) = field.grid.node_counts();
    let mut err = 0.0f64;
    for i in 0..np {
        for j in 0..ns {
            let e = exact(field.grid.nodes_primary[i], field.grid.nodes_secondary[j]);
            err = err.max((field.value(i, j) - e).abs());
        }
    }
    println!("piecewise-linear profile on a 128^2 grid:");
    println!("  max error vs exact = {err:.3e}");
    println!("  flux jump          = {:.3e}", pde::flux_jump(&field).unwrap());
    println!("  weak-form residual = {:.3e}", pde::interior_residual(&field));

    // Ball averages of sigma |Du|^2 are non-decreasing for solutions on
    // the half-space configuration, whatever the boundary data.
    let radii: Vec<f64> = (0..8).map(|k| 0.1 * 8f64.powf(k as f64 / 7.0)).collect();
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    println!();
    println!("ball-average monotonicity on random cubic boundary data:");
    for trial in 0..3 {
        let c: Vec<f64> = (0..10).map(|_| rng.gen_range(-1.0..1.0)).collect();
        let data = move |x: f64, y: f64| {
            c[0] + c[1] * x + c[2] * y + c[3] * x * x + c[4] * x * y + c[5] * y * y
                + c[6] * x * x * x + c[7] * x * x * y + c[8] * x * y * y + c[9] * y * y * y
        };
        let field = pde::solve_transmission(&grid, &cfg, &data, 1e-11).expect("solve");
        let report = pde::check_monotonicity(&field, (0.0, 0.0), &radii).expect("report");
        let seq: Vec<String> = report.averages.iter().map(|a| format!("{a:.5}")).collect();
        println!("  trial {trial}: {} [{}]", if report.passed() { "ok " } else { "VIOLATION" }, seq.join(", "));
    }
}
