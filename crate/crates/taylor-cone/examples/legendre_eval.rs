//! Evaluate the Legendre function P_1/2 across its domain, including
//! the logarithmic endpoint, with the reported error bounds.
//!
//! Run with: cargo run --release --example legendre_eval

use taylor_cone::legendre::p_half;

fn main() {
    println!("{:>12} {:>22} {:>22} {:>10}", "t", "P_1/2(t)", "P'_1/2(t)", "err bound");
    for &t in &[
        1.0, 0.9, 0.5, 0.0, -0.5, -0.652229, -0.9, -0.99, -0.9999, -0.999999,
    ] {
        let e = p_half(t, 1e-12).expect("evaluation");
        println!("{t:>12.6} {:>22.15e} {:>22.15e} {:>10.1e}", e.value, e.derivative, e.est_error);
    }
    println!();
    println!("P_1/2 vanishes near t = -0.65223: the corresponding angle");
    println!("pi - acos(t) = 49.29 deg is the perfect-conductor cone angle,");
    println!("the upper limit of the critical-angle branch.");
}
