//! Damped-oscillator Duhamel solver against its closed form.
//!
//! Solves h'' + a1 h' + a2 h = f with homogeneous initial data by
//! trapezoidal convolution of the oscillatory kernel and compares with
//! 1 - cos(ω t) for the constant forcing ω².
//!
//! Run with:
//!   cargo run --release --example duhamel_oscillator

use minnaert::resonance::duhamel_solve;
use minnaert::trace::{TimeGrid, WaveTrace};

fn main() {
    let omega = 1.0_f64;
    let t_end = 2.0 * std::f64::consts::PI / omega;
    for n in [1_000usize, 10_000, 100_000] {
        let dt = t_end / n as f64;
        let grid = TimeGrid::new(0.0, dt, n + 1).unwrap();
        let forcing = WaveTrace::from_fn(&grid, |_| omega * omega);
        let h = duhamel_solve(0.0, omega * omega, &forcing).unwrap();
        let mut max_err = 0.0_f64;
        for (k, v) in h.values.iter().enumerate() {
            max_err = max_err.max((v - (1.0 - (omega * h.time(k)).cos())).abs());
        }
        println!("dt = T/{n:<7} max |h - (1 - cos)| = {max_err:.3e}");
    }

    // A damped case driven by a Gaussian pulse.
    let (a1, a2) = (0.2, 4.0);
    let grid = TimeGrid::covering(0.0, 20.0, 1e-3).unwrap();
    let forcing = WaveTrace::from_fn(&grid, |t| (-((t - 3.0) / 0.6).powi(2)).exp());
    let h = duhamel_solve(a1, a2, &forcing).unwrap();
    println!(
        "\ndamped pulse response: |h|_max = {:.5} at ring frequency {:.4}",
        h.max_abs(),
        (4.0 * a2 - a1 * a1).sqrt() / 2.0
    );

    // The overdamped regime is refused, not silently branch-switched.
    let err = duhamel_solve(5.0, 1.0, &forcing).unwrap_err();
    println!("overdamped request: {err}");
}
