//! Energy scaling of the separable cone potential: the Dirichlet
//! integral over B_rho grows exactly like rho^(n-1) = rho^2, the
//! borderline rate that forces the angle window, and the inside-phase
//! energy keeps a positive rho^2 lower-bound constant.
//!
//! Run with: cargo run --release --example cone_scaling

use taylor_cone::cones::{critical_angles, ConeSolution, MaterialConfig};
use taylor_cone::pde::{self, AxisymGrid, PhaseLayout};

fn main() {
    let cfg = MaterialConfig::new(3, 1.0, 30.0, 1.0, 0.0).unwrap();
    let roots = critical_angles(30.0, 1e-12).expect("angles");
    let theta0 = roots[1];
    let sol = ConeSolution::at_critical_angle(theta0, &cfg, 1.0).expect("cone solution");
    println!("cone at theta0 = {theta0:.8} rad, beta/alpha = 30");

    let grid =
        AxisymGrid::cone_axisym(1.0, 0.01, 192, 192, PhaseLayout::Cone { theta0 }).unwrap();
    let field = pde::sample_field(&grid, &cfg, &|rho, theta| sol.potential(rho, theta));

    let radii: Vec<f64> = (0..8).map(|k| 0.1 * 8f64.powf(k as f64 / 7.0)).collect();
    let fit = pde::decay_fit(&field, (0.0, 0.0), &radii).expect("decay fit");
    println!("  fitted exponent of int_B_rho |Du|^2 : {:.4}", fit.fitted_exponent);
    for (r, e) in radii.iter().zip(&fit.energies) {
        println!("    rho = {r:.4}: energy = {e:.6e}, energy/rho^2 = {:.6e}", e / (r * r));
    }

    let lower = pde::cone_energy_lowerbound_check(&field, &radii).expect("lower bound");
    println!("  inside-phase exponent = {:.4}, c0 = {:.6e}", lower.fitted_exponent, lower.c0);

    // Flux continuity is exact in the limit: one-sided stencil jumps
    // decay at second order on the sampled closed form.
    println!("  flux-jump refinement ladder:");
    for n in [48usize, 96, 192] {
        let g = AxisymGrid::cone_axisym(1.0, 0.01, n, n, PhaseLayout::Cone { theta0 }).unwrap();
        let f = pde::sample_field(&g, &cfg, &|rho, theta| sol.potential(rho, theta));
        println!("    {n:>4} cells: jump = {:.4e}", pde::flux_jump(&f).unwrap());
    }
}
