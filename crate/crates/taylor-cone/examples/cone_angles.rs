//! Critical cone angles across a sweep of permittivity ratios: the two
//! branches of the bifurcation diagram.
//!
//! Run with: cargo run --release --example cone_angles

use taylor_cone::cones::bifurcation_rows;

fn main() {
    let ratios: Vec<f64> = (0..26).map(|k| 16.0 + k as f64).collect();
    let rows = bifurcation_rows(&ratios, 1e-10).expect("bifurcation sweep");
    println!("{:>8} {:>12} {:>12} {:>10} {:>10}", "ratio", "theta_1", "theta_2", "deg_1", "deg_2");
    for (ratio, t1, t2) in rows {
        if t1.is_nan() {
            println!("{ratio:>8.2} {:>12} {:>12}", "-", "-");
        } else {
            println!(
                "{ratio:>8.2} {t1:>12.8} {t2:>12.8} {:>10.4} {:>10.4}",
                t1.to_degrees(),
                t2.to_degrees()
            );
        }
    }
    println!();
    println!("The upper branch climbs toward the perfect-conductor angle");
    println!("49.29 deg (the zero of P_1/2(-cos theta)) as the ratio grows.");
}
