//! Scenario orchestration behind the CLI: each scenario computes its results
//! fully, then writes deterministic JSON/CSV artifacts into the output
//! directory. Validation failures never leave partial artifacts behind.

use std::path::{Path, PathBuf};
use std::sync::Arc;

use serde::Serialize;
use serde_json::json;

use crate::config::{GeometryConfig, RunConfig, Scenario};
use crate::error::{Error, Result};
use crate::features::{extract_features, invert_background, KnownBackground};
use crate::geometry::{enclosed_volume, make_sphere_mesh, read_off, SurfaceMesh};
use crate::layerpot::{assemble_np_adjoint, DensityOnSurface, Equilibrium};
use crate::oracle::{remainder_sweep_with_traces, solve_radial, SweepSpec};
use crate::resonance::{gamma_eps, ResonanceSpec};
use crate::trace::{TimeGrid, WaveTrace};
use crate::waves::expansion_eq120;

/// Run the configured scenario; returns the artifact paths written.
pub fn run(config: &RunConfig, config_dir: &Path, out_dir: &Path) -> Result<Vec<PathBuf>> {
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(config.jobs.unwrap_or(0))
        .build()
        .map_err(|e| Error::Config(format!("jobs: {e}")))?;
    pool.install(|| match config.scenario {
        Scenario::Capacitance => run_capacitance(config, config_dir, out_dir),
        Scenario::Resonance => run_resonance(config, config_dir, out_dir),
        Scenario::Simulate => run_simulate(config, config_dir, out_dir),
        Scenario::Oracle => run_oracle(config, out_dir),
        Scenario::Sweep => run_sweep(config, out_dir),
        Scenario::Features => run_features(config, config_dir, out_dir),
        Scenario::Invert => run_invert(config, config_dir, out_dir),
    })
}

fn build_mesh(config: &RunConfig, config_dir: &Path) -> Result<Arc<SurfaceMesh>> {
    match config
        .geometry
        .as_ref()
        .ok_or_else(|| Error::Config("missing geometry block".into()))?
    {
        GeometryConfig::Sphere { radius, level } => make_sphere_mesh(*radius, *level),
        GeometryConfig::Mesh { path } => read_off(&config.resolve(config_dir, path)),
    }
}

fn write_json(out_dir: &Path, name: &str, value: &impl Serialize) -> Result<PathBuf> {
    std::fs::create_dir_all(out_dir)?;
    let path = out_dir.join(name);
    let mut text = serde_json::to_string_pretty(value)?;
    text.push('\n');
    std::fs::write(&path, text)?;
    Ok(path)
}

fn write_trace(out_dir: &Path, name: &str, trace: &WaveTrace) -> Result<PathBuf> {
    std::fs::create_dir_all(out_dir)?;
    let path = out_dir.join(name);
    trace.write_csv(&path)?;
    Ok(path)
}

/// Mesh summary plus equilibrium quantities shared by the boundary-integral
/// scenarios.
#[derive(Serialize)]
struct SurfaceReportJson {
    faces: usize,
    total_area: f64,
    volume: f64,
    c_omega: f64,
    condition_estimate: f64,
    null_identity_residual: f64,
    volume_identity_residual: f64,
    capacitance_identity_residual: f64,
}

fn surface_report(mesh: &Arc<SurfaceMesh>) -> Result<(Equilibrium, SurfaceReportJson)> {
    let eq = Equilibrium::solve(mesh)?;
    let k0 = assemble_np_adjoint(mesh, 0)?;
    let k_phi = k0.apply(&eq.density)?;
    let residual = DensityOnSurface::new(
        mesh.clone(),
        eq.density
            .values
            .iter()
            .zip(&k_phi.values)
            .map(|(p, k)| 0.5 * p - k)
            .collect(),
    )?;
    let null_identity_residual = residual.l2_norm() / eq.density.l2_norm();
    let identities = eq.geometric_identities();
    let report = SurfaceReportJson {
        faces: mesh.num_faces(),
        total_area: mesh.total_area(),
        volume: enclosed_volume(mesh),
        c_omega: eq.capacitance,
        condition_estimate: eq.condition_estimate,
        null_identity_residual,
        volume_identity_residual: identities.volume_identity_residual,
        capacitance_identity_residual: identities.capacitance_identity_residual,
    };
    Ok((eq, report))
}

fn run_capacitance(config: &RunConfig, config_dir: &Path, out_dir: &Path) -> Result<Vec<PathBuf>> {
    let mesh = build_mesh(config, config_dir)?;
    let (_, report) = surface_report(&mesh)?;
    Ok(vec![write_json(out_dir, "capacitance.json", &report)?])
}

fn run_resonance(config: &RunConfig, config_dir: &Path, out_dir: &Path) -> Result<Vec<PathBuf>> {
    let mesh = build_mesh(config, config_dir)?;
    let medium = config.medium.unwrap();
    let (eq, surface) = surface_report(&mesh)?;
    let volume = enclosed_volume(&mesh);
    let resonance = ResonanceSpec::from_geometry(eq.capacitance, volume, &medium)?;
    let gamma = gamma_eps(&medium, resonance.omega_m)?;
    let eta = eq.eta_coefficients(medium.c0())?;
    let report = json!({
        "surface": surface,
        "medium": medium,
        "omega_m": resonance.omega_m,
        "z_plus": [resonance.z_plus.re, resonance.z_plus.im],
        "z_minus": [resonance.z_minus.re, resonance.z_minus.im],
        "delta": resonance.delta,
        "lifetime": resonance.lifetime,
        "period": resonance.period,
        "gamma_eps": gamma,
        "eta": eta,
    });
    Ok(vec![write_json(out_dir, "resonance.json", &report)?])
}

fn run_simulate(config: &RunConfig, config_dir: &Path, out_dir: &Path) -> Result<Vec<PathBuf>> {
    let mesh = build_mesh(config, config_dir)?;
    let medium = config.medium.unwrap();
    let source = config.source.unwrap();
    let grid_cfg = config.time_grid.unwrap();
    let quad = config.quadrature.unwrap_or_default();
    let receivers = config.receivers.clone().unwrap();

    let eq = Equilibrium::solve(&mesh)?;
    let volume = enclosed_volume(&mesh);
    let resonance = ResonanceSpec::from_geometry(eq.capacitance, volume, &medium)?;
    let grid = TimeGrid::covering(0.0, grid_cfg.t_end, grid_cfg.dt)?;

    let mut results = Vec::with_capacity(receivers.len());
    for r in &receivers {
        let x = nalgebra::Vector3::new(r[0], r[1], r[2]);
        results.push(expansion_eq120(&source, &medium, &resonance, volume, x, &grid, quad)?);
    }

    let mut artifacts = Vec::new();
    let mut receiver_reports = Vec::new();
    for (i, result) in results.iter().enumerate() {
        for (tag, trace) in [
            ("primary", &result.primary),
            ("tail", &result.tail),
            ("total", &result.total),
        ] {
            artifacts.push(write_trace(out_dir, &format!("trace_r{i:03}_{tag}.csv"), trace)?);
        }
        let x = nalgebra::Vector3::new(result.receiver[0], result.receiver[1], result.receiver[2]);
        receiver_reports.push(json!({
            "receiver": result.receiver,
            "distance": (x - medium.y0_vec()).norm(),
            "birth_time": (x - medium.y0_vec()).norm() / medium.c0(),
            "tail_imag_residual": result.tail_imag_residual,
            "tail_max": result.tail.max_abs(),
        }));
    }
    let report = json!({
        "c_omega": eq.capacitance,
        "volume": volume,
        "resonance": resonance,
        "receivers": receiver_reports,
    });
    artifacts.push(write_json(out_dir, "simulate.json", &report)?);
    Ok(artifacts)
}

fn run_oracle(config: &RunConfig, out_dir: &Path) -> Result<Vec<PathBuf>> {
    let radial = config.radial_config()?;
    radial.validated()?;
    let solution = solve_radial(&radial)?;
    let mut artifacts = Vec::new();
    for (i, trace) in solution.traces.iter().enumerate() {
        artifacts.push(write_trace(out_dir, &format!("oracle_r{i:03}.csv"), trace)?);
    }
    let report = json!({
        "nr": radial.nr,
        "dr": radial.dr(),
        "dt": radial.dt(),
        "t_end": radial.t_end,
        "receivers": radial.receivers,
        "bubble_enabled": radial.bubble_enabled,
        "max_abs": solution.max_abs,
    });
    artifacts.push(write_json(out_dir, "oracle.json", &report)?);
    Ok(artifacts)
}

fn run_sweep(config: &RunConfig, out_dir: &Path) -> Result<Vec<PathBuf>> {
    let base = config.radial_config()?;
    let sweep_cfg = config.sweep.as_ref().unwrap();
    let spec = SweepSpec {
        base,
        eps_list: sweep_cfg.eps.clone(),
        horizon: sweep_cfg.horizon,
        cells_per_bubble: sweep_cfg.cells_per_bubble.clone(),
        quadrature: config.quadrature,
    };
    let (report, runs) = remainder_sweep_with_traces(&spec)?;
    let mut artifacts = Vec::new();
    for run in &runs {
        for (i, trace) in run.oracle.iter().enumerate() {
            let name = format!("sweep_eps{:.4}_r{i:03}.csv", run.eps);
            artifacts.push(write_trace(out_dir, &name, trace)?);
        }
    }
    artifacts.push(write_json(out_dir, "sweep.json", &report)?);
    Ok(artifacts)
}

fn run_features(config: &RunConfig, config_dir: &Path, out_dir: &Path) -> Result<Vec<PathBuf>> {
    let features = config.features.as_ref().unwrap();
    let trace = WaveTrace::read_csv(&config.resolve(config_dir, &features.trace))?;
    let window = match features.window {
        Some([a, b]) => (a, b),
        None => (trace.t_start, trace.t_end()),
    };
    let report = extract_features(&trace, window, features.threshold)?;
    Ok(vec![write_json(out_dir, "features.json", &report)?])
}

fn run_invert(config: &RunConfig, config_dir: &Path, out_dir: &Path) -> Result<Vec<PathBuf>> {
    let features_cfg = config.features.as_ref().unwrap();
    let invert_cfg = config.invert.as_ref().unwrap();
    let trace = WaveTrace::read_csv(&config.resolve(config_dir, &features_cfg.trace))?;
    let window = match features_cfg.window {
        Some([a, b]) => (a, b),
        None => (trace.t_start, trace.t_end()),
    };
    let mut report = extract_features(&trace, window, features_cfg.threshold)?;
    report.birth_time -= invert_cfg.reference_time;
    let known = KnownBackground {
        c_omega: invert_cfg.c_omega,
        volume: invert_cfg.volume,
        k1: invert_cfg.k1,
        distance: invert_cfg.distance,
    };
    let inverted = invert_background(&report, &known)?;
    let out = json!({
        "features": report,
        "known": known,
        "inverted": inverted,
    });
    Ok(vec![write_json(out_dir, "invert.json", &out)?])
}
