//! Locate the fold threshold of the cone transmission equation: the
//! permittivity ratio below which no critical circular cone exists.
//!
//! Run with: cargo run --release --example threshold

use taylor_cone::cones::{critical_angles, critical_threshold, threshold_by_count};

fn main() {
    let fold = critical_threshold(1e-8).expect("fold search");
    println!("fold threshold lambda_1 = {:.10}", fold.lambda1);
    println!("double-root angle       = {:.10} rad ({:.4} deg)",
        fold.theta_star,
        fold.theta_star.to_degrees()
    );

    // Independent route: bisection on the root-count transition.
    let count = threshold_by_count(1e-6).expect("count bisection");
    println!("count-transition method = {:.10}", count.lambda1);
    println!("method difference       = {:.2e}", (fold.lambda1 - count.lambda1).abs());

    // Root pattern on both sides of the fold.
    for ratio in [fold.lambda1 - 0.05, fold.lambda1 + 0.05, 20.0, 30.0, 50.0] {
        let roots = critical_angles(ratio, 1e-10).expect("root scan");
        let list: Vec<String> = roots.iter().map(|r| format!("{r:.6}")).collect();
        println!("ratio {ratio:8.4}: {} root(s) {}", roots.len(), list.join(", "));
    }
}
