//! Minnaert frequency, resonance poles and reduced-system roots.
//!
//! Computes everything from the mesh (capacitance, volume, η coefficients),
//! then sweeps ε and checks how fast the reduced roots approach the
//! dominant pole values.
//!
//! Run with:
//!   cargo run --release --example resonance_poles

use minnaert::geometry::{enclosed_volume, make_sphere_mesh};
use minnaert::layerpot::Equilibrium;
use minnaert::resonance::{
    gamma_eps, pole_asymptotics_check, reduced_roots, MediumParams, ResonanceSpec,
};

fn main() {
    let mesh = make_sphere_mesh(1.0, 3).unwrap();
    let eq = Equilibrium::solve(&mesh).unwrap();
    let volume = enclosed_volume(&mesh);
    let medium = MediumParams {
        rho0: 1.0,
        k0: 1.0,
        rho1: 1.0,
        k1: 1.0,
        eps: 0.01,
        y0: [0.0; 3],
    }
    .validated()
    .unwrap();

    let spec = ResonanceSpec::from_geometry(eq.capacitance, volume, &medium).unwrap();
    println!("C_Omega = {:.6}, |Omega| = {:.6}", eq.capacitance, volume);
    println!("omega_M = {:.6} (sqrt(3) = {:.6})", spec.omega_m, 3.0_f64.sqrt());
    println!("z+ = {:.6} {:+.6}i", spec.z_plus.re, spec.z_plus.im);
    println!("z- = {:.6} {:+.6}i", spec.z_minus.re, spec.z_minus.im);
    println!("period = {:.6}, lifetime = {:.3}", spec.period, spec.lifetime);

    let eta = eq.eta_coefficients(medium.c0()).unwrap();
    println!(
        "\neta = (1, {:.4}, {:.4}, {:.4})   [sphere closed forms: -1, 12pi/5, -16pi/15]",
        eta.eta2, eta.eta3, eta.eta4
    );

    println!("\nreduced roots (scaled time) and physical conversions:");
    for j in 1..=3u8 {
        let gamma = gamma_eps(&medium, spec.omega_m).unwrap();
        let roots = reduced_roots(j, gamma, &eta).unwrap();
        let (decay, freq) = roots.to_physical(medium.eps);
        println!(
            "  j = {j}: lambda+ = {:.6e} {:+.6e}i  ->  physical decay {:.5e}, frequency {:.6}",
            roots.lambda_plus.re, roots.lambda_plus.im, decay, freq
        );
    }

    let sweep: Vec<_> = [0.02, 0.01, 0.005, 0.0025]
        .iter()
        .map(|&e| {
            let m = medium.with_eps(e);
            let gamma = gamma_eps(&m, spec.omega_m).unwrap();
            (e, reduced_roots(1, gamma, &eta).unwrap())
        })
        .collect();
    let orders = pole_asymptotics_check(&sweep, spec.omega_m, eq.capacitance, medium.c0()).unwrap();
    println!(
        "\npole residual orders over eps in {{0.02 .. 0.0025}}: Re {:.2} (theory 4), Im {:.2} (theory 3)",
        orders.re_fit.slope, orders.im_fit.slope
    );
}
