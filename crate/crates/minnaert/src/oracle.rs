//! Independent full-wave reference: a radially symmetric finite-difference
//! solver for the high-contrast bubble (spherical scatterer of radius ε at
//! the origin of the radial coordinate, annular source outside it), used to
//! validate the dominant expansion and the remainder scaling.
//!
//! The scheme is a conservative cell-centered finite-volume leapfrog for
//! `(1/k(r)) ∂_tt u = (1/r²) ∂_r (r² (1/ρ(r)) ∂_r u) + f` with harmonic
//! averaging of `1/ρ` at cell faces, the natural zero-flux face at r = 0,
//! and the outgoing characteristic condition `∂_t(ru) + c0 ∂_r(ru) = 0`
//! discretized at the outer boundary.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fit::{loglog_slope, LineFit};
use crate::resonance::{MediumParams, ResonanceSpec};
use crate::sources::{QuadratureSpec, RetardedPotential, SourceSpec};
use crate::trace::{TimeGrid, WaveTrace};
use crate::waves::resonant_tail_closed;

/// Minimum number of radial cells across the bubble radius.
pub const MIN_CELLS_PER_BUBBLE: f64 = 16.0;

/// Configuration of one radial run.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct RadialConfig {
    pub medium: MediumParams,
    /// Radial source, concentric with the bubble, supported strictly
    /// outside it.
    pub source: SourceSpec,
    /// Outer truncation radius of the grid.
    pub r_max: f64,
    /// Number of radial cells.
    pub nr: usize,
    /// Courant factor, at most 0.9.
    pub cfl: f64,
    pub t_end: f64,
    /// Receiver radii.
    pub receivers: Vec<f64>,
    /// Uniform background when false (contrast switched off).
    #[serde(default = "default_true")]
    pub bubble_enabled: bool,
}

fn default_true() -> bool {
    true
}

impl RadialConfig {
    pub fn dr(&self) -> f64 {
        self.r_max / self.nr as f64
    }

    pub fn dt(&self) -> f64 {
        self.cfl * self.dr() / self.medium.c0().max(self.medium.c1())
    }

    pub fn time_grid(&self) -> Result<TimeGrid> {
        TimeGrid::covering(0.0, self.t_end, self.dt())
    }

    /// Choose `nr` so that the bubble interface falls exactly on a cell face
    /// (`dr = ε / cells`), covering at least `r_max`.
    pub fn with_bubble_cells(mut self, cells: usize) -> Self {
        let dr = self.medium.eps / cells as f64;
        let nr = (self.r_max / dr).ceil() as usize;
        self.nr = nr;
        self.r_max = nr as f64 * dr;
        self
    }

    pub fn validated(&self) -> Result<()> {
        self.medium.validated()?;
        self.source.validated()?;
        if self.source.center != self.medium.y0 {
            return Err(Error::InvalidArgument(
                "oracle: source must be concentric with the bubble".into(),
            ));
        }
        if !(self.cfl > 0.0 && self.cfl <= 0.9) {
            return Err(Error::Stability(format!(
                "oracle: Courant factor must lie in (0, 0.9], got {}",
                self.cfl
            )));
        }
        let eps = self.medium.eps;
        if !(self.source.space.r_out < self.r_max) {
            return Err(Error::InvalidArgument(format!(
                "oracle: source annulus must fit inside the grid, got r_out = {} >= r_max = {}",
                self.source.space.r_out, self.r_max
            )));
        }
        if self.bubble_enabled && !(eps < self.source.space.r_in) {
            return Err(Error::InvalidArgument(format!(
                "oracle: need eps < r_in < r_out < r_max, got eps = {eps}, annulus = [{}, {}], r_max = {}",
                self.source.space.r_in, self.source.space.r_out, self.r_max
            )));
        }
        if self.bubble_enabled && eps / self.dr() < MIN_CELLS_PER_BUBBLE {
            return Err(Error::Resolution(format!(
                "oracle: bubble resolved by {:.1} cells, need at least {MIN_CELLS_PER_BUBBLE}",
                eps / self.dr()
            )));
        }
        if self.receivers.is_empty()
            || self
                .receivers
                .iter()
                .any(|r| !(*r > 0.0 && *r < self.r_max))
        {
            return Err(Error::InvalidArgument(
                "oracle: receivers must lie strictly inside (0, r_max)".into(),
            ));
        }
        if !(self.t_end > 0.0) {
            return Err(Error::InvalidArgument("oracle: t_end must be positive".into()));
        }
        Ok(())
    }

    fn cell_coefficients(&self) -> (Vec<f64>, Vec<f64>) {
        let dr = self.dr();
        let eps = self.medium.eps;
        let eps2 = eps * eps;
        let mut rho = Vec::with_capacity(self.nr);
        let mut k = Vec::with_capacity(self.nr);
        for i in 0..self.nr {
            let r = (i as f64 + 0.5) * dr;
            if self.bubble_enabled && r < eps {
                rho.push(self.medium.rho1 * eps2);
                k.push(self.medium.k1 * eps2);
            } else {
                rho.push(self.medium.rho0);
                k.push(self.medium.k0);
            }
        }
        (rho, k)
    }

    /// Face conductances `r_f² β_f / dr` with `β` the harmonic mean of `1/ρ`
    /// across the face; one value per interior face, shared by both adjacent
    /// cell updates (discrete flux continuity by construction).
    pub fn face_conductances(&self) -> Vec<f64> {
        let (rho, _) = self.cell_coefficients();
        let dr = self.dr();
        (1..self.nr)
            .map(|j| {
                let beta = 2.0 / (rho[j - 1] + rho[j]);
                let rf = j as f64 * dr;
                rf * rf * beta / dr
            })
            .collect()
    }
}

/// Receiver traces plus run diagnostics.
#[derive(Debug, Clone)]
pub struct RadialSolution {
    pub traces: Vec<WaveTrace>,
    /// Largest |u| over the whole grid and run.
    pub max_abs: f64,
}

/// Explicit leapfrog solve; returns the field traces at the receiver radii.
pub fn solve_radial(config: &RadialConfig) -> Result<RadialSolution> {
    config.validated()?;
    let nr = config.nr;
    let dr = config.dr();
    let dt = config.dt();
    let grid = config.time_grid()?;
    let (_, k) = config.cell_coefficients();
    let conductance = config.face_conductances();

    // Cell volumes ((i+1)³ - i³) dr³ / 3.
    let volume: Vec<f64> = (0..nr)
        .map(|i| {
            let a = i as f64;
            let b = a + 1.0;
            (b * b * b - a * a * a) * dr * dr * dr / 3.0
        })
        .collect();

    // Receiver interpolation stencils between adjacent cell centers.
    let stencils: Vec<(usize, f64)> = config
        .receivers
        .iter()
        .map(|r| {
            let pos = (r / dr - 0.5).max(0.0);
            let i = (pos.floor() as usize).min(nr - 2);
            (i, pos - i as f64)
        })
        .collect();

    let c0 = config.medium.c0();
    let mur = (c0 * dt - dr) / (c0 * dt + dr);

    let mut u_old = vec![0.0_f64; nr];
    let mut u = vec![0.0_f64; nr];
    let mut u_new = vec![0.0_f64; nr];
    let mut traces = vec![Vec::with_capacity(grid.steps); config.receivers.len()];
    let mut max_abs = 0.0_f64;

    // The source is separable; the spatial factor is fixed per cell.
    let spatial: Vec<f64> = (0..nr)
        .map(|i| config.source.amplitude * config.source.space.value((i as f64 + 0.5) * dr))
        .collect();

    for step in 0..grid.steps {
        let t = grid.time(step);
        for (trace, &(i, w)) in traces.iter_mut().zip(&stencils) {
            trace.push(u[i] * (1.0 - w) + u[i + 1] * w);
        }
        if step + 1 == grid.steps {
            break;
        }

        let pulse = config.source.time.eval(t, 0)?;
        for i in 0..nr - 1 {
            let flux_hi = conductance[i] * (u[i + 1] - u[i]);
            let flux_lo = if i == 0 {
                0.0
            } else {
                conductance[i - 1] * (u[i] - u[i - 1])
            };
            u_new[i] = 2.0 * u[i] - u_old[i]
                + dt * dt * k[i] * ((flux_hi - flux_lo) / volume[i] + spatial[i] * pulse);
        }
        // Outgoing condition on w = r·u at the outer boundary.
        let r_last = (nr as f64 - 0.5) * dr;
        let r_prev = (nr as f64 - 1.5) * dr;
        let w_prev_new = r_prev * u_new[nr - 2];
        let w_prev_old = r_prev * u[nr - 2];
        let w_last_old = r_last * u[nr - 1];
        u_new[nr - 1] = (w_prev_old + mur * (w_prev_new - w_last_old)) / r_last;

        for v in &u_new {
            let a = v.abs();
            if a > max_abs {
                max_abs = a;
            }
            if !a.is_finite() {
                return Err(Error::Stability(format!(
                    "oracle: field blew up at step {step} (t = {t:.4})"
                )));
            }
        }
        std::mem::swap(&mut u_old, &mut u);
        std::mem::swap(&mut u, &mut u_new);
    }

    let traces = traces
        .into_iter()
        .map(|values| WaveTrace::new(0.0, dt, values))
        .collect::<Result<Vec<_>>>()?;
    Ok(RadialSolution { traces, max_abs })
}

/// One ε entry of the remainder sweep.
#[derive(Debug, Clone, Serialize)]
pub struct SweepEntry {
    pub eps: f64,
    pub nr: usize,
    pub dt: f64,
    pub t_end: f64,
    /// Weighted norm of `u - v - tail`.
    pub remainder_norm: f64,
    /// Weighted norm of the tail alone.
    pub tail_norm: f64,
    /// Weighted norm of `u - v` (tail ablated from the expansion).
    pub ablated_norm: f64,
}

/// Remainder-scaling report over an ε sweep.
#[derive(Debug, Clone, Serialize)]
pub struct SweepReport {
    pub entries: Vec<SweepEntry>,
    pub remainder_fit: LineFit,
    pub tail_fit: LineFit,
    pub ablated_fit: LineFit,
}

/// Sweep specification: the base radial run is re-derived per ε with
/// `t_end = horizon / ε` and the requested cells-per-bubble resolution.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SweepSpec {
    pub base: RadialConfig,
    /// Sweep values, strictly decreasing.
    pub eps_list: Vec<f64>,
    /// Fixed window T of the validity horizon `t ∈ (0, T/ε]`.
    pub horizon: f64,
    /// Cells across the bubble radius, one entry per ε, non-decreasing as
    /// ε shrinks (the remainder is an ε^{3/2} signal; the scheme error must
    /// fall faster).
    pub cells_per_bubble: Vec<usize>,
    #[serde(default)]
    pub quadrature: Option<QuadratureSpec>,
}

/// Discrete weighted norm over receivers and times with weight
/// `(1 + r²)^{-1}`: `sqrt(Σ_j w(r_j) mean_n diff²)`. The time average (not
/// the raw sum) keeps the norm self-similar across the ε-scaled windows
/// `[0, T/ε]`: the tail contributes O(ε) to it for every ε because
/// `δ · T/ε` is constant along the sweep.
fn weighted_norm(diffs: &[WaveTrace], radii: &[f64]) -> f64 {
    let mut acc = 0.0;
    for (d, r) in diffs.iter().zip(radii) {
        let w = 1.0 / (1.0 + r * r);
        acc += w * d.values.iter().map(|v| v * v).sum::<f64>() / d.len() as f64;
    }
    acc.sqrt()
}

/// Oracle traces of one sweep run, kept for CSV emission.
#[derive(Debug, Clone)]
pub struct SweepRunTraces {
    pub eps: f64,
    pub receivers: Vec<f64>,
    pub oracle: Vec<WaveTrace>,
}

/// Run the full-wave oracle across the ε sweep and fit the scaling of the
/// expansion remainder, the tail magnitude, and the tail-ablated gap.
pub fn remainder_sweep(spec: &SweepSpec) -> Result<SweepReport> {
    Ok(remainder_sweep_with_traces(spec)?.0)
}

/// As [`remainder_sweep`], additionally returning the raw oracle traces.
pub fn remainder_sweep_with_traces(spec: &SweepSpec) -> Result<(SweepReport, Vec<SweepRunTraces>)> {
    if spec.eps_list.len() < 3 {
        return Err(Error::InvalidArgument(format!(
            "sweep needs at least 3 eps values, got {}",
            spec.eps_list.len()
        )));
    }
    if spec.cells_per_bubble.len() != spec.eps_list.len() {
        return Err(Error::InvalidArgument(
            "sweep needs one cells-per-bubble entry per eps".into(),
        ));
    }
    if !(spec.horizon > 0.0) {
        return Err(Error::InvalidArgument("sweep horizon must be positive".into()));
    }
    for pair in spec.eps_list.windows(2) {
        if pair[1] >= pair[0] {
            return Err(Error::InvalidArgument(
                "sweep eps values must be strictly decreasing".into(),
            ));
        }
    }
    for pair in spec.cells_per_bubble.windows(2) {
        if pair[1] < pair[0] {
            return Err(Error::InvalidArgument(
                "non-monotone grid resolution across the sweep".into(),
            ));
        }
    }
    let quad = spec.quadrature.unwrap_or_default();

    let outcomes: Vec<(SweepEntry, SweepRunTraces)> = spec
        .eps_list
        .par_iter()
        .zip(&spec.cells_per_bubble)
        .map(|(&eps, &cells)| -> Result<(SweepEntry, SweepRunTraces)> {
            let mut config = spec.base.clone();
            config.medium = config.medium.with_eps(eps).validated()?;
            config.t_end = spec.horizon / eps;
            config = config.with_bubble_cells(cells);
            config.validated()?;

            let solution = solve_radial(&config)?;
            let grid = solution.traces[0].grid();
            let medium = &config.medium;
            let volume = 4.0 * std::f64::consts::PI / 3.0 * 1.0;
            // Reference domain is the unit ball: C = 4π, |Ω| = 4π/3.
            let c_omega = 4.0 * std::f64::consts::PI;
            let resonance = ResonanceSpec::from_geometry(c_omega, volume, medium)?;

            let y0 = medium.y0_vec();
            let d2v = RetardedPotential::new(&config.source, medium, y0, quad)?
                .trace(&grid, 2)?;

            let mut remainder = Vec::with_capacity(config.receivers.len());
            let mut tails = Vec::with_capacity(config.receivers.len());
            let mut ablated = Vec::with_capacity(config.receivers.len());
            for (idx, &r) in config.receivers.iter().enumerate() {
                let x = y0 + nalgebra::Vector3::new(r, 0.0, 0.0);
                let v = RetardedPotential::new(&config.source, medium, x, quad)?
                    .trace(&grid, 0)?;
                let tail = resonant_tail_closed(&d2v, medium, &resonance, volume, x)?;
                let u = &solution.traces[idx];
                let diff_full = u.combine(1.0, &v, -1.0)?.combine(1.0, &tail, -1.0)?;
                let diff_ablated = u.combine(1.0, &v, -1.0)?;
                remainder.push(diff_full);
                tails.push(tail);
                ablated.push(diff_ablated);
            }
            let entry = SweepEntry {
                eps,
                nr: config.nr,
                dt: config.dt(),
                t_end: config.t_end,
                remainder_norm: weighted_norm(&remainder, &config.receivers),
                tail_norm: weighted_norm(&tails, &config.receivers),
                ablated_norm: weighted_norm(&ablated, &config.receivers),
            };
            let run = SweepRunTraces {
                eps,
                receivers: config.receivers.clone(),
                oracle: solution.traces,
            };
            Ok((entry, run))
        })
        .collect::<Result<Vec<_>>>()?;

    let (entries, runs): (Vec<SweepEntry>, Vec<SweepRunTraces>) = outcomes.into_iter().unzip();
    let eps: Vec<f64> = entries.iter().map(|e| e.eps).collect();
    let rem: Vec<f64> = entries.iter().map(|e| e.remainder_norm).collect();
    let tail: Vec<f64> = entries.iter().map(|e| e.tail_norm).collect();
    let abl: Vec<f64> = entries.iter().map(|e| e.ablated_norm).collect();
    let report = SweepReport {
        remainder_fit: loglog_slope(&eps, &rem)?,
        tail_fit: loglog_slope(&eps, &tail)?,
        ablated_fit: loglog_slope(&eps, &abl)?,
        entries,
    };
    Ok((report, runs))
}
