//! Dense boundary-integral operators on a triangulated surface.
//!
//! Collocation with piecewise-constant densities at face centroids. The
//! single layer `S0` has kernel `1/(4π|x-y|)`; its singular diagonal is the
//! exact closed-form integral of the kernel over the flat triangle. The
//! Neumann–Poincaré adjoints `K*_l` have kernels
//! `ν(x)·(x-y) / (4π|x-y|^{3-l})` and a zero flat-panel diagonal.

use std::sync::Arc;

use nalgebra::{DMatrix, DVector, Vector3};
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::geometry::{enclosed_volume, SurfaceMesh};

/// Ill-conditioning threshold for the dense direct solve.
pub const CONDITION_LIMIT: f64 = 1e12;

/// Which boundary kernel a dense operator discretizes.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum KernelTag {
    /// Single layer `S0`.
    SingleLayer,
    /// Neumann–Poincaré adjoint `K*_l` of the given order `l` in `{0,1,2,3}`.
    NpAdjoint(u8),
}

/// Piecewise-constant per-face scalar samples bound to their mesh.
#[derive(Debug, Clone)]
pub struct DensityOnSurface {
    pub mesh: Arc<SurfaceMesh>,
    pub values: Vec<f64>,
}

impl DensityOnSurface {
    pub fn new(mesh: Arc<SurfaceMesh>, values: Vec<f64>) -> Result<Self> {
        if values.len() != mesh.num_faces() {
            return Err(Error::InvalidArgument(format!(
                "density has {} values for a mesh with {} faces",
                values.len(),
                mesh.num_faces()
            )));
        }
        if values.iter().any(|v| !v.is_finite()) {
            return Err(Error::InvalidArgument("density contains non-finite values".into()));
        }
        Ok(Self { mesh, values })
    }

    pub fn constant(mesh: &Arc<SurfaceMesh>, value: f64) -> Self {
        Self { mesh: mesh.clone(), values: vec![value; mesh.num_faces()] }
    }

    /// Discrete surface L2 norm, `sqrt(Σ area_i v_i²)`.
    pub fn l2_norm(&self) -> f64 {
        self.values
            .iter()
            .zip(&self.mesh.element_area)
            .map(|(v, a)| a * v * v)
            .sum::<f64>()
            .sqrt()
    }

    fn same_mesh(&self, other: &DensityOnSurface) -> Result<()> {
        if !Arc::ptr_eq(&self.mesh, &other.mesh) {
            return Err(Error::InvalidArgument(
                "densities live on different meshes".into(),
            ));
        }
        Ok(())
    }
}

/// Dense collocation matrix of a boundary kernel; square with one row and
/// column per face, all entries finite.
#[derive(Debug, Clone)]
pub struct DenseBoundaryOperator {
    pub mesh: Arc<SurfaceMesh>,
    pub kernel: KernelTag,
    pub matrix: DMatrix<f64>,
}

impl DenseBoundaryOperator {
    /// Apply the operator to per-face samples; returns the potential values
    /// at the collocation points.
    pub fn apply(&self, density: &DensityOnSurface) -> Result<DensityOnSurface> {
        if !Arc::ptr_eq(&self.mesh, &density.mesh) {
            return Err(Error::InvalidArgument(
                "operator and density live on different meshes".into(),
            ));
        }
        let x = DVector::from_column_slice(&density.values);
        let y = &self.matrix * x;
        DensityOnSurface::new(self.mesh.clone(), y.as_slice().to_vec())
    }
}

/// Exact integral of `1/|x-y|` over a flat triangle, evaluated at an interior
/// point `p`: the triangle splits into three sub-triangles with apex `p`, and
/// each contributes `d · ln((s_b + r_b)/(s_a + r_a))` in edge-local
/// coordinates (`d` the apex–edge distance, `s` the signed abscissa along the
/// edge, `r` the apex–endpoint distance).
fn inv_distance_integral_at(p: Vector3<f64>, tri: [Vector3<f64>; 3]) -> f64 {
    let mut total = 0.0;
    for k in 0..3 {
        let a = tri[k] - p;
        let b = tri[(k + 1) % 3] - p;
        let edge = b - a;
        let len = edge.norm();
        if len == 0.0 {
            continue;
        }
        let t = edge / len;
        let s_a = a.dot(&t);
        let s_b = b.dot(&t);
        let d = (a - s_a * t).norm();
        let r_a = a.norm();
        let r_b = b.norm();
        if d == 0.0 {
            // Apex on the edge line; the wedge is degenerate and contributes nothing.
            continue;
        }
        total += d * ((s_b + r_b) / (s_a + r_a)).ln();
    }
    total
}

fn assemble(
    mesh: &Arc<SurfaceMesh>,
    kernel: KernelTag,
    entry: impl Fn(usize, usize, f64) -> f64 + Sync,
    diagonal: impl Fn(usize) -> f64 + Sync,
) -> Result<DenseBoundaryOperator> {
    let n = mesh.num_faces();
    let c = &mesh.centroid;
    // Coincident distinct collocation points make the kernels meaningless.
    let scale = mesh.total_area().sqrt();
    let mut data = vec![0.0_f64; n * n];
    // Column-major to match DMatrix storage; columns assemble independently.
    data.par_chunks_mut(n).enumerate().try_for_each(|(j, col)| {
        for (i, slot) in col.iter_mut().enumerate() {
            if i == j {
                *slot = diagonal(i);
                continue;
            }
            let r = (c[i] - c[j]).norm();
            if r < 1e-12 * scale {
                return Err(Error::DegenerateMesh(format!(
                    "faces {i} and {j} have coincident centroids"
                )));
            }
            *slot = entry(i, j, r);
        }
        if col.iter().any(|v| !v.is_finite()) {
            return Err(Error::DegenerateMesh(format!(
                "non-finite kernel entries in column {j}"
            )));
        }
        Ok(())
    })?;
    let matrix = DMatrix::from_vec(n, n, data);
    Ok(DenseBoundaryOperator { mesh: mesh.clone(), kernel, matrix })
}

/// Assemble the single-layer operator `S0`.
///
/// Off-diagonal entry `(i,j)` is `area_j / (4π |c_i - c_j|)`; the diagonal is
/// the closed-form self-integral of the kernel over the flat panel.
pub fn assemble_single_layer(mesh: &Arc<SurfaceMesh>) -> Result<DenseBoundaryOperator> {
    let quarter_inv_pi = 1.0 / (4.0 * std::f64::consts::PI);
    assemble(
        mesh,
        KernelTag::SingleLayer,
        |_i, j, r| mesh.element_area[j] * quarter_inv_pi / r,
        |i| {
            let [a, b, c] = mesh.triangles[i];
            let tri = [mesh.vertices[a], mesh.vertices[b], mesh.vertices[c]];
            quarter_inv_pi * inv_distance_integral_at(mesh.centroid[i], tri)
        },
    )
}

/// Assemble the Neumann–Poincaré adjoint `K*_l`, `l ∈ {0,1,2,3}`.
///
/// Off-diagonal entry `(i,j)` is
/// `area_j · ν(c_i)·(c_i - c_j) / (4π |c_i - c_j|^{3-l})`. The diagonal is
/// zero: on a flat panel `ν(x)·(x-y)` vanishes identically, and the curvature
/// correction is deliberately omitted (O(h) error absorbed by tolerances).
pub fn assemble_np_adjoint(mesh: &Arc<SurfaceMesh>, l: u8) -> Result<DenseBoundaryOperator> {
    if l > 3 {
        return Err(Error::InvalidArgument(format!(
            "kernel order l must be in 0..=3, got {l}"
        )));
    }
    let quarter_inv_pi = 1.0 / (4.0 * std::f64::consts::PI);
    let power = 3 - l as i32;
    assemble(
        mesh,
        KernelTag::NpAdjoint(l),
        |i, j, r| {
            let diff = mesh.centroid[i] - mesh.centroid[j];
            mesh.element_area[j] * quarter_inv_pi * mesh.normal[i].dot(&diff) / r.powi(power)
        },
        |_i| 0.0,
    )
}

/// Equilibrium density, capacitance, and the `S0`-weighted calculus built on
/// them. Solving `S0 φ = 1` once gives everything the projections, the inner
/// product and the η coefficients need.
#[derive(Debug)]
pub struct Equilibrium {
    pub s0: DenseBoundaryOperator,
    /// The equilibrium density `S0^{-1} 1`.
    pub density: DensityOnSurface,
    /// Capacitance: surface integral of the equilibrium density.
    pub capacitance: f64,
    /// Two-norm condition estimate of the collocation matrix.
    pub condition_estimate: f64,
}

impl Equilibrium {
    /// Assemble `S0` and solve `S0 φ = 1` by dense LU.
    pub fn solve(mesh: &Arc<SurfaceMesh>) -> Result<Self> {
        let s0 = assemble_single_layer(mesh)?;
        Self::from_operator(s0)
    }

    pub fn from_operator(s0: DenseBoundaryOperator) -> Result<Self> {
        if s0.kernel != KernelTag::SingleLayer {
            return Err(Error::InvalidArgument(
                "equilibrium density requires the single-layer operator".into(),
            ));
        }
        let n = s0.mesh.num_faces();
        let lu = s0.matrix.clone().lu();
        let ones = DVector::from_element(n, 1.0);
        let phi = lu
            .solve(&ones)
            .ok_or_else(|| Error::Numerical("layerpot: singular single-layer system".into()))?;

        let condition_estimate = condition_estimate(&s0.matrix, &lu);
        if condition_estimate > CONDITION_LIMIT {
            return Err(Error::Numerical(format!(
                "layerpot: single-layer system condition estimate {condition_estimate:.3e} exceeds {CONDITION_LIMIT:.0e}"
            )));
        }

        let density = DensityOnSurface::new(s0.mesh.clone(), phi.as_slice().to_vec())?;
        let capacitance = capacitance(&density);
        if !(capacitance > 0.0) {
            return Err(Error::Numerical(format!(
                "layerpot: non-positive capacitance {capacitance:.3e}"
            )));
        }
        Ok(Self { s0, density, capacitance, condition_estimate })
    }

    pub fn mesh(&self) -> &Arc<SurfaceMesh> {
        &self.density.mesh
    }

    /// The scalar product `<φ, ψ> = C^{-1} Σ_i area_i (S0 φ)(c_i) ψ(c_i)`,
    /// normalized so that `<φ_eq, φ_eq> = 1`.
    pub fn s0_inner(&self, phi: &DensityOnSurface, psi: &DensityOnSurface) -> Result<f64> {
        phi.same_mesh(psi)?;
        phi.same_mesh(&self.density)?;
        let s0_phi = self.s0.apply(phi)?;
        let mesh = self.mesh();
        Ok(s0_phi
            .values
            .iter()
            .zip(&psi.values)
            .zip(&mesh.element_area)
            .map(|((sp, p), a)| a * sp * p)
            .sum::<f64>()
            / self.capacitance)
    }

    /// Rank-one projection onto the span of the equilibrium density.
    pub fn project_p(&self, phi: &DensityOnSurface) -> Result<DensityOnSurface> {
        let coeff = self.s0_inner(phi, &self.density)?;
        DensityOnSurface::new(
            phi.mesh.clone(),
            self.density.values.iter().map(|e| coeff * e).collect(),
        )
    }

    /// Complement projection `Q = I - P`.
    pub fn project_q(&self, phi: &DensityOnSurface) -> Result<DensityOnSurface> {
        let p = self.project_p(phi)?;
        DensityOnSurface::new(
            phi.mesh.clone(),
            phi.values.iter().zip(&p.values).map(|(v, pv)| v - pv).collect(),
        )
    }

    /// Coefficients of the reduced modulation systems:
    /// `η1 = 1`, `η2 = -C/(4π c0)`, and `η3, η4` by double-surface quadrature
    /// of `ν(x)·(x-y) |x-y|^{l-2} φ_eq(y)` with prefactor
    /// `-(-1)^l l / (|Ω| c0^{l-1} (l+1)!)`.
    pub fn eta_coefficients(&self, c0: f64) -> Result<EtaCoefficients> {
        if !(c0 > 0.0) {
            return Err(Error::InvalidArgument(format!("wave speed must be > 0, got {c0}")));
        }
        let mesh = self.mesh();
        let volume = enclosed_volume(mesh);
        let eta2 = -self.capacitance / (4.0 * std::f64::consts::PI * c0);

        let mut eta34 = [0.0_f64; 2];
        for (slot, l) in [(0usize, 3i32), (1, 4)] {
            let moment = self.normal_moment(l - 2);
            let factorial = (2..=(l + 1)).product::<i32>() as f64;
            let sign = -(-1.0_f64).powi(l) * l as f64;
            eta34[slot] = sign / (volume * c0.powi(l - 1) * factorial) * moment;
        }
        Ok(EtaCoefficients { eta1: 1.0, eta2, eta3: eta34[0], eta4: eta34[1] })
    }

    /// Double-surface quadrature of `ν(x)·(x-y) |x-y|^p φ_eq(y)` by the
    /// centroid rule, skipping the vanishing x = y pair. Row contributions
    /// are reduced in index order so results do not depend on scheduling.
    fn normal_moment(&self, power: i32) -> f64 {
        let mesh = self.mesh();
        let n = mesh.num_faces();
        let phi = &self.density.values;
        let rows: Vec<f64> = (0..n)
            .into_par_iter()
            .map(|i| {
                let ci = mesh.centroid[i];
                let ni = mesh.normal[i];
                let ai = mesh.element_area[i];
                let mut acc = 0.0;
                for (j, ((cj, aj), pj)) in mesh
                    .centroid
                    .iter()
                    .zip(&mesh.element_area)
                    .zip(phi)
                    .enumerate()
                {
                    if i == j {
                        continue;
                    }
                    let diff = ci - cj;
                    let r = diff.norm();
                    acc += ai * aj * ni.dot(&diff) * r.powi(power) * pj;
                }
                acc
            })
            .collect();
        rows.iter().sum()
    }

    /// Residuals of the two classical double-integral identities used as
    /// quadrature oracles:
    /// (a) `(1/8π) ∬ ν(x)·(x-y)/|x-y| φ_eq(y) = |Ω|`,
    /// (b) `∬ ν(x)·(x-y) φ_eq(y) = 3 C |Ω|`.
    pub fn geometric_identities(&self) -> IdentityReport {
        let mesh = self.mesh();
        let volume = enclosed_volume(mesh);
        let value_a = self.normal_moment(-1) / (8.0 * std::f64::consts::PI);
        let value_b = self.normal_moment(0);
        let target_a = volume;
        let target_b = 3.0 * self.capacitance * volume;
        IdentityReport {
            volume_identity_value: value_a,
            volume_identity_target: target_a,
            volume_identity_residual: (value_a - target_a).abs() / target_a.abs(),
            capacitance_identity_value: value_b,
            capacitance_identity_target: target_b,
            capacitance_identity_residual: (value_b - target_b).abs() / target_b.abs(),
        }
    }
}

/// Surface integral of a density: `Σ_faces area · φ`. For the equilibrium
/// density this is the capacitance of the enclosed domain.
pub fn capacitance(density: &DensityOnSurface) -> f64 {
    density
        .values
        .iter()
        .zip(&density.mesh.element_area)
        .map(|(v, a)| a * v)
        .sum()
}

/// Convenience wrapper returning just the equilibrium density.
pub fn equilibrium_density(mesh: &Arc<SurfaceMesh>) -> Result<DensityOnSurface> {
    Ok(Equilibrium::solve(mesh)?.density)
}

/// Coefficients η1..η4 of the reduced modulation systems.
#[derive(Debug, Clone, Copy, serde::Serialize)]
pub struct EtaCoefficients {
    pub eta1: f64,
    pub eta2: f64,
    pub eta3: f64,
    pub eta4: f64,
}

/// Relative residuals of the geometric double-integral identities.
#[derive(Debug, Clone, Copy, serde::Serialize)]
pub struct IdentityReport {
    pub volume_identity_value: f64,
    pub volume_identity_target: f64,
    pub volume_identity_residual: f64,
    pub capacitance_identity_value: f64,
    pub capacitance_identity_target: f64,
    pub capacitance_identity_residual: f64,
}

/// Two-norm condition estimate from a few rounds of power iteration on the
/// matrix and inverse iteration through its LU factorization.
fn condition_estimate(a: &DMatrix<f64>, lu: &nalgebra::LU<f64, nalgebra::Dyn, nalgebra::Dyn>) -> f64 {
    let n = a.nrows();
    let seed = DVector::from_fn(n, |i, _| 1.0 + (i as f64 * 0.754877666).sin());

    let mut v = seed.clone();
    v /= v.norm();
    let mut large = 0.0;
    for _ in 0..12 {
        let w = a * &v;
        large = w.norm();
        if large == 0.0 {
            return f64::INFINITY;
        }
        v = w / large;
    }

    let mut u = seed;
    u /= u.norm();
    let mut inv_growth = 0.0;
    for _ in 0..12 {
        let w = match lu.solve(&u) {
            Some(w) => w,
            None => return f64::INFINITY,
        };
        inv_growth = w.norm();
        if inv_growth == 0.0 {
            return f64::INFINITY;
        }
        u = w / inv_growth;
    }
    large * inv_growth
}
