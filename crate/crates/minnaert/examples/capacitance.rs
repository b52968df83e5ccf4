//! Capacitance of a sphere by the boundary-element route.
//!
//! Builds icospheres at several refinement levels, solves S0 φ = 1 and
//! integrates the equilibrium density; compares against the analytic 4πR.
//!
//! Run with:
//!   cargo run --release --example capacitance

use minnaert::geometry::{enclosed_volume, make_sphere_mesh};
use minnaert::layerpot::Equilibrium;

fn main() {
    let radius = 1.0;
    let exact = 4.0 * std::f64::consts::PI * radius;
    println!("unit sphere capacitance (exact {exact:.6})");
    println!("{:>5} {:>8} {:>12} {:>12} {:>10}", "level", "faces", "C_Omega", "rel err", "volume");
    for level in 0..=3 {
        let mesh = make_sphere_mesh(radius, level).unwrap();
        let eq = Equilibrium::solve(&mesh).unwrap();
        println!(
            "{:>5} {:>8} {:>12.6} {:>12.3e} {:>10.5}",
            level,
            mesh.num_faces(),
            eq.capacitance,
            (eq.capacitance - exact).abs() / exact,
            enclosed_volume(&mesh),
        );
    }

    // The same machinery on a non-unit radius: C scales linearly with R.
    let mesh = make_sphere_mesh(2.0, 3).unwrap();
    let eq = Equilibrium::solve(&mesh).unwrap();
    println!(
        "\nradius 2 sphere: C = {:.6} (exact {:.6}), condition estimate {:.1e}",
        eq.capacitance,
        2.0 * exact,
        eq.condition_estimate
    );
}
