//! Numerical toolkit for acoustic wave propagation past a high-contrast
//! micro-bubble (a Minnaert resonator).
//!
//! The crate is organized around the constructive objects of the problem:
//!
//! * [`geometry`] — triangulated closed surfaces (icospheres, OFF files),
//!   areas, centroids, outward normals and enclosed volumes.
//! * [`layerpot`] — dense boundary operators: the single layer `S0`, the
//!   Neumann–Poincaré adjoints `K*_l`, the equilibrium density `S0^{-1} 1`,
//!   the capacitance, the `S0`-weighted scalar product and its projections.
//! * [`resonance`] — Minnaert frequency, resonance poles and lifetime,
//!   the damped-oscillator Duhamel solver and the reduced-system roots.
//! * [`sources`] — separable compactly supported sources and the background
//!   (primary) wave evaluated through the retarded volume potential.
//! * [`waves`] — the dominant expansion at a receiver: modulation ODE,
//!   resonant tail in closed and complex-exponential form.
//! * [`oracle`] — an independent radially symmetric finite-difference
//!   full-wave solver used to validate the expansion and its remainder.
//! * [`features`] — extraction of birth time, period and decay rate from a
//!   trace, and inversion for background parameters.
//! * [`config`] / [`scenario`] — JSON-driven batch runs behind the CLI.
//!
//! Each major capability has a runnable example under `examples/`.
//!
//! ```
//! use minnaert::geometry::{enclosed_volume, make_sphere_mesh};
//! use minnaert::layerpot::Equilibrium;
//! use minnaert::resonance::{MediumParams, ResonanceSpec};
//!
//! let mesh = make_sphere_mesh(1.0, 2)?;
//! let eq = Equilibrium::solve(&mesh)?;
//! let medium = MediumParams {
//!     rho0: 1.0, k0: 1.0, rho1: 1.0, k1: 1.0, eps: 0.05, y0: [0.0; 3],
//! }.validated()?;
//! let res = ResonanceSpec::from_geometry(eq.capacitance, enclosed_volume(&mesh), &medium)?;
//! // Unit ball: omega_M -> sqrt(3), decay -> 1.5 eps under refinement.
//! assert!((res.omega_m - 3.0_f64.sqrt()).abs() < 0.05);
//! assert!((res.delta - 1.5 * 0.05).abs() < 0.005);
//! # Ok::<(), minnaert::Error>(())
//! ```

// Guards are written as `!(x > 0.0)` on purpose: the negated form rejects
// NaN inputs, which `x <= 0.0` would let through.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod config;
pub mod error;
pub mod features;
pub mod fit;
pub mod geometry;
pub mod layerpot;
pub mod oracle;
pub mod resonance;
pub mod scenario;
pub mod sources;
pub mod trace;
pub mod waves;

pub use error::{Error, Result};
pub use trace::{TimeGrid, WaveTrace};
