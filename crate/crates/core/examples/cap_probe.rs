use hardy_core::capacity::{ball_capacity_free, unit_ball_capacity_free};
use std::time::Instant;

fn main() {
    let t0 = Instant::now();
    let cap = unit_ball_capacity_free(3, 2.0).unwrap();
    let exact = 4.0 * std::f64::consts::PI;
    println!(
        "unit ball cap (3, 2.0) = {cap:.5} exact {exact:.5} rel {:+.3}% in {:.1?}",
        (cap / exact - 1.0) * 100.0,
        t0.elapsed()
    );
    let t1 = Instant::now();
    let c2 = ball_capacity_free(3, 2.0, 0.5).unwrap();
    println!(
        "B_0.5 = {c2:.5} (exact {:.5}) cached lookup {:.1?}",
        2.0 * std::f64::consts::PI,
        t1.elapsed()
    );
}
