//! Surface tension balancing a critical cone: for each critical angle
//! at beta/alpha = 30, the Euler-Lagrange equation fixes the unique
//! gamma (per unit squared amplitude) at which the cone is stationary.
//!
//! Run with: cargo run --release --example cone_gamma

use taylor_cone::cones::{
    cone_criticality_gamma, critical_angles, transmission_residual, ConeSolution, MaterialConfig,
};

fn main() {
    let ratio = 30.0;
    let cfg = MaterialConfig::new(3, 1.0, ratio, 1.0, 0.0).unwrap();
    let roots = critical_angles(ratio, 1e-12).expect("angles");
    println!("beta/alpha = {ratio}, {} critical angle(s)", roots.len());
    for (k, &theta0) in roots.iter().enumerate() {
        let g = transmission_residual(theta0, ratio).unwrap();
        let gamma = cone_criticality_gamma(theta0, &cfg, 1.0).expect("gamma");
        let sol = ConeSolution::at_critical_angle(theta0, &cfg, 1.0).unwrap();
        let (nin, nout, tan) = sol.boundary_gradient(1.0).unwrap();
        println!();
        println!("root {k}: theta0 = {theta0:.10} rad ({:.4} deg)", theta0.to_degrees());
        println!("  transmission residual  = {g:+.3e}");
        println!("  gamma (amplitude 1)    = {gamma:.10}");
        println!("  normal trace inside    = {nin:+.8}");
        println!("  normal trace outside   = {nout:+.8}");
        println!("  tangential trace       = {tan:+.8}");
        println!(
        "  flux balance alpha*out/(beta*in) = {:.12}",
            cfg.alpha * nout / (cfg.beta * nin)
        );
        // gamma scales quadratically with the free amplitude.
        let gamma2 = cone_criticality_gamma(theta0, &cfg, 2.0).unwrap();
        println!("  gamma (amplitude 2)    = {gamma2:.10} (= 4x)");
    }
}
