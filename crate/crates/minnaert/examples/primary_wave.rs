//! The background (primary) wave of a compactly supported source, evaluated
//! through the retarded volume potential.
//!
//! Shows exact causality at a receiver and the static (plateau) limit
//! against the shell-theorem Newtonian potential.
//!
//! Run with:
//!   cargo run --release --example primary_wave

use nalgebra::Vector3;
use minnaert::resonance::MediumParams;
use minnaert::sources::{
    primary_wave, QuadratureSpec, RetardedPotential, SourceSpec, SpaceProfile, TimeProfile,
};
use minnaert::trace::TimeGrid;

fn main() {
    let medium = MediumParams {
        rho0: 1.0,
        k0: 1.0,
        rho1: 1.0,
        k1: 1.0,
        eps: 0.1,
        y0: [0.0; 3],
    };
    let source = SourceSpec {
        amplitude: 1.0,
        center: [0.0; 3],
        space: SpaceProfile { r_in: 0.6, r_out: 1.0 },
        time: TimeProfile::Bump { t0: 1.0, t1: 2.0 },
    };
    let quad = QuadratureSpec::default();

    // Receiver 2 units past the annulus edge: first arrival at t0 + 2.
    let x = Vector3::new(3.0, 0.0, 0.0);
    let pot = RetardedPotential::new(&source, &medium, x, quad).unwrap();
    println!("receiver at |x| = 3, source annulus [0.6, 1.0], pulse on [1, 2]:");
    for t in [2.0, 2.9, 3.0, 3.3, 3.8, 4.5, 5.5] {
        println!("  v({t:.1}) = {:+.6e}", pot.eval(t, 0).unwrap());
    }

    // Plateau source: deep inside the hold the field is the Newtonian
    // potential of the spatial profile.
    let plateau = SourceSpec {
        time: TimeProfile::Plateau { t0: 0.0, t1: 40.0, ramp: 2.0 },
        ..source
    };
    println!("\nstatic limit at t = 25 (plateau source):");
    for d in [0.2, 1.5, 2.0, 3.0] {
        let p = Vector3::new(d, 0.0, 0.0);
        let v = primary_wave(&plateau, &medium, p, 25.0, 0, quad).unwrap();
        println!("  d = {d}: v = {v:.6}");
    }

    // Second time derivative at the bubble center drives the modulation ODE.
    let grid = TimeGrid::covering(0.0, 5.0, 0.02).unwrap();
    let center = RetardedPotential::new(&source, &medium, Vector3::zeros(), quad).unwrap();
    let d2v = center.trace(&grid, 2).unwrap();
    println!(
        "\n|d2v/dt2(y0, .)| peaks at {:.4} (support begins at t0 + r_in = {:.1})",
        d2v.max_abs(),
        1.0 + 0.6
    );
}
