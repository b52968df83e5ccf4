//! Separable, compactly supported source models and the background (primary)
//! wave they generate, evaluated through the retarded volume potential
//! `v(x,t) = ρ0 ∫ f(y, t - |x-y|/c0) / (4π|x-y|) dy`.
//!
//! The spatial profile is a radial bump supported on an annulus, the time
//! profile a C³ pulse with closed-form derivatives up to order three; time
//! derivatives of the wave are moved onto the profile analytically, so
//! causality (exact zero before first arrival) holds node by node.

use nalgebra::Vector3;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::resonance::MediumParams;
use crate::trace::{TimeGrid, WaveTrace};

/// Radial bump `(1 - s²)⁴` on the annulus `r ∈ [r_in, r_out]`, with
/// `s = (r - r_mid)/half_width`; identically zero outside.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SpaceProfile {
    pub r_in: f64,
    pub r_out: f64,
}

impl SpaceProfile {
    pub fn validated(self) -> Result<Self> {
        if !(self.r_in >= 0.0) || !(self.r_out > self.r_in) {
            return Err(Error::InvalidArgument(format!(
                "space profile needs r_out > r_in >= 0, got [{}, {}]",
                self.r_in, self.r_out
            )));
        }
        Ok(self)
    }

    pub fn value(&self, r: f64) -> f64 {
        let half = 0.5 * (self.r_out - self.r_in);
        let s = (r - 0.5 * (self.r_in + self.r_out)) / half;
        if s.abs() >= 1.0 {
            return 0.0;
        }
        let u = 1.0 - s * s;
        u * u * u * u
    }
}

/// C³ compactly supported time pulses with closed-form derivatives 0..3.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum TimeProfile {
    /// Polynomial bump `(1 - s²)⁴` on `[t0, t1]`.
    Bump { t0: f64, t1: f64 },
    /// Ramp up over `ramp`, hold 1, ramp down over `ramp`; the ramps use the
    /// septic smoothstep whose first three derivatives vanish at both ends.
    Plateau { t0: f64, t1: f64, ramp: f64 },
}

/// Septic smoothstep and derivatives on [0,1]: S = 35x⁴ - 84x⁵ + 70x⁶ - 20x⁷.
fn smoothstep7(x: f64, order: u8) -> f64 {
    match order {
        0 => (((-20.0 * x + 70.0) * x - 84.0) * x + 35.0) * x * x * x * x,
        1 => 140.0 * x.powi(3) * (1.0 - x).powi(3),
        2 => 420.0 * x * x * (1.0 - x) * (1.0 - x) * (1.0 - 2.0 * x),
        3 => 840.0 * x * (1.0 - x) * ((1.0 - 2.0 * x) * (1.0 - 2.0 * x) - x * (1.0 - x)),
        _ => unreachable!(),
    }
}

impl TimeProfile {
    pub fn validated(self) -> Result<Self> {
        let (t0, t1) = self.support();
        if !(t0 >= 0.0) || !(t1 > t0) {
            return Err(Error::InvalidArgument(format!(
                "time profile needs t1 > t0 >= 0, got [{t0}, {t1}]"
            )));
        }
        if let TimeProfile::Plateau { ramp, .. } = self {
            if !(ramp > 0.0) || 2.0 * ramp > t1 - t0 {
                return Err(Error::InvalidArgument(format!(
                    "plateau ramp must satisfy 0 < 2 ramp <= t1 - t0, got ramp = {ramp}"
                )));
            }
        }
        Ok(self)
    }

    pub fn support(&self) -> (f64, f64) {
        match *self {
            TimeProfile::Bump { t0, t1 } | TimeProfile::Plateau { t0, t1, .. } => (t0, t1),
        }
    }

    /// `(d/dt)^order` of the pulse, `order <= 3`.
    pub fn eval(&self, t: f64, order: u8) -> Result<f64> {
        if order > 3 {
            return Err(Error::InvalidArgument(format!(
                "time derivatives available up to order 3, requested {order}"
            )));
        }
        let (t0, t1) = self.support();
        if t <= t0 || t >= t1 {
            return Ok(0.0);
        }
        Ok(match *self {
            TimeProfile::Bump { t0, t1 } => {
                let c = 2.0 / (t1 - t0);
                let s = c * (t - 0.5 * (t0 + t1));
                let u = 1.0 - s * s;
                match order {
                    0 => u.powi(4),
                    1 => c * (-8.0 * s * u.powi(3)),
                    2 => c * c * (-8.0 * u.powi(3) + 48.0 * s * s * u * u),
                    3 => c.powi(3) * (144.0 * s * u * u - 192.0 * s.powi(3) * u),
                    _ => unreachable!(),
                }
            }
            TimeProfile::Plateau { t0, t1, ramp } => {
                if t < t0 + ramp {
                    let x = (t - t0) / ramp;
                    smoothstep7(x, order) / ramp.powi(order as i32)
                } else if t > t1 - ramp {
                    let x = (t1 - t) / ramp;
                    let sign = if order.is_multiple_of(2) { 1.0 } else { -1.0 };
                    sign * smoothstep7(x, order) / ramp.powi(order as i32)
                } else if order == 0 {
                    1.0
                } else {
                    0.0
                }
            }
        })
    }
}

/// Separable source `f(x,t) = amplitude · g(|x - center|) · p(t)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SourceSpec {
    pub amplitude: f64,
    pub center: [f64; 3],
    pub space: SpaceProfile,
    pub time: TimeProfile,
}

impl SourceSpec {
    pub fn validated(self) -> Result<Self> {
        if !self.amplitude.is_finite() {
            return Err(Error::InvalidArgument("source amplitude must be finite".into()));
        }
        self.space.validated()?;
        self.time.validated()?;
        Ok(self)
    }

    pub fn center_vec(&self) -> Vector3<f64> {
        Vector3::new(self.center[0], self.center[1], self.center[2])
    }

    /// `(∂/∂t)^order f(x, t)`, `order <= 3`; exactly zero outside the
    /// space-time support.
    pub fn eval(&self, x: Vector3<f64>, t: f64, order: u8) -> Result<f64> {
        let r = (x - self.center_vec()).norm();
        Ok(self.amplitude * self.space.value(r) * self.time.eval(t, order)?)
    }
}

/// Node counts of the tensor-product shell quadrature (radius × polar ×
/// azimuth) used for the retarded volume potential.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct QuadratureSpec {
    pub radial: usize,
    pub polar: usize,
    pub azimuthal: usize,
}

impl Default for QuadratureSpec {
    fn default() -> Self {
        Self { radial: 24, polar: 48, azimuthal: 4 }
    }
}

/// Documented floors below which the shell quadrature is refused.
pub const QUADRATURE_FLOOR: QuadratureSpec = QuadratureSpec { radial: 4, polar: 4, azimuthal: 1 };

impl QuadratureSpec {
    pub fn validated(self) -> Result<Self> {
        if self.radial < QUADRATURE_FLOOR.radial
            || self.polar < QUADRATURE_FLOOR.polar
            || self.azimuthal < QUADRATURE_FLOOR.azimuthal
        {
            return Err(Error::Resolution(format!(
                "quadrature below floor ({}, {}, {}): requested ({}, {}, {})",
                QUADRATURE_FLOOR.radial,
                QUADRATURE_FLOOR.polar,
                QUADRATURE_FLOOR.azimuthal,
                self.radial,
                self.polar,
                self.azimuthal
            )));
        }
        Ok(self)
    }
}

/// Gauss–Legendre nodes and weights on [-1, 1] by Newton iteration.
pub(crate) fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    let mut nodes = vec![0.0; n];
    let mut weights = vec![0.0; n];
    let legendre = |x: f64| {
        let (mut p0, mut p1) = (1.0, x);
        for k in 2..=n {
            let p2 = ((2.0 * k as f64 - 1.0) * x * p1 - (k as f64 - 1.0) * p0) / k as f64;
            p0 = p1;
            p1 = p2;
        }
        let dp = n as f64 * (x * p1 - p0) / (x * x - 1.0);
        (p1, dp)
    };
    for i in 0..n.div_ceil(2) {
        let mut x = (std::f64::consts::PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        for _ in 0..100 {
            let (p, dp) = legendre(x);
            let dx = p / dp;
            x -= dx;
            if dx.abs() < 1e-15 {
                break;
            }
        }
        let (_, dp) = legendre(x);
        let w = 2.0 / ((1.0 - x * x) * dp * dp);
        nodes[i] = -x;
        nodes[n - 1 - i] = x;
        weights[i] = w;
        weights[n - 1 - i] = w;
    }
    (nodes, weights)
}

/// Precomputed retarded-potential quadrature for one receiver: per node, the
/// travel time to the receiver and the combined weight
/// `ρ0 · amplitude · g(s) · (shell jacobian) / (4π |x - y|)`.
pub struct RetardedPotential {
    time_profile: TimeProfile,
    delays: Vec<f64>,
    weights: Vec<f64>,
}

impl RetardedPotential {
    pub fn new(
        spec: &SourceSpec,
        medium: &MediumParams,
        x: Vector3<f64>,
        quad: QuadratureSpec,
    ) -> Result<Self> {
        let quad = quad.validated()?;
        spec.validated()?;
        let c0 = medium.c0();
        let center = spec.center_vec();
        let to_receiver = x - center;
        let d = to_receiver.norm();

        // Polar axis along the receiver direction (any axis if coincident);
        // the annular profile is axially symmetric about every axis through
        // the center, so the integrand varies only weakly in azimuth.
        let axis = if d > 1e-300 { to_receiver / d } else { Vector3::z() };
        let helper = if axis.x.abs() < 0.9 { Vector3::x() } else { Vector3::y() };
        let e1 = axis.cross(&helper).normalize();
        let e2 = axis.cross(&e1);

        let (rs, rw) = gauss_legendre(quad.radial);
        let (mus, muw) = gauss_legendre(quad.polar);
        let half = 0.5 * (spec.space.r_out - spec.space.r_in);
        let mid = 0.5 * (spec.space.r_out + spec.space.r_in);
        let dphi = 2.0 * std::f64::consts::PI / quad.azimuthal as f64;
        let quarter_inv_pi = 1.0 / (4.0 * std::f64::consts::PI);

        let n = quad.radial * quad.polar * quad.azimuthal;
        let mut delays = Vec::with_capacity(n);
        let mut weights = Vec::with_capacity(n);
        for (i, &sr) in rs.iter().enumerate() {
            let s = mid + half * sr;
            let radial_w = half * rw[i] * s * s * spec.space.value(s);
            for (j, &mu) in mus.iter().enumerate() {
                let sin_theta = (1.0 - mu * mu).max(0.0).sqrt();
                for k in 0..quad.azimuthal {
                    let phi = dphi * (k as f64 + 0.5);
                    let y =
                        center + s * (sin_theta * (phi.cos() * e1 + phi.sin() * e2) + mu * axis);
                    let dist = (x - y).norm();
                    if dist < 1e-14 {
                        // Node collides with the receiver; the 1/r kernel is
                        // integrable, drop the node (accuracy inside the
                        // support band is reduced, documented).
                        continue;
                    }
                    delays.push(dist / c0);
                    weights.push(
                        medium.rho0 * spec.amplitude * radial_w * muw[j] * dphi * quarter_inv_pi
                            / dist,
                    );
                }
            }
        }
        Ok(Self { time_profile: spec.time, delays, weights })
    }

    /// `(∂/∂t)^order v(x, t)`, `order <= 2`.
    pub fn eval(&self, t: f64, order: u8) -> Result<f64> {
        if order > 2 {
            return Err(Error::InvalidArgument(format!(
                "primary wave derivatives available up to order 2, requested {order}"
            )));
        }
        let mut acc = 0.0;
        for (delay, w) in self.delays.iter().zip(&self.weights) {
            acc += w * self.time_profile.eval(t - delay, order)?;
        }
        Ok(acc)
    }

    /// Sample `(∂/∂t)^order v(x, ·)` on a grid.
    pub fn trace(&self, grid: &TimeGrid, order: u8) -> Result<WaveTrace> {
        if order > 2 {
            return Err(Error::InvalidArgument(format!(
                "primary wave derivatives available up to order 2, requested {order}"
            )));
        }
        let values: Vec<f64> = (0..grid.steps)
            .into_par_iter()
            .map(|k| self.eval(grid.time(k), order))
            .collect::<Result<_>>()?;
        WaveTrace::new(grid.t_start, grid.dt, values)
    }
}

/// One-off evaluation of the primary wave `(∂/∂t)^order v(x, t)`.
///
/// Builds the shell quadrature for the receiver; use [`RetardedPotential`]
/// directly when sampling many times at one point.
pub fn primary_wave(
    spec: &SourceSpec,
    medium: &MediumParams,
    x: Vector3<f64>,
    t: f64,
    order: u8,
    quad: QuadratureSpec,
) -> Result<f64> {
    RetardedPotential::new(spec, medium, x, quad)?.eval(t, order)
}

/// Trace of `∂_tt v(y0, ·)` on the grid — the drive of the modulation ODE.
pub fn primary_second_deriv_trace(
    spec: &SourceSpec,
    medium: &MediumParams,
    y0: Vector3<f64>,
    grid: &TimeGrid,
    quad: QuadratureSpec,
) -> Result<WaveTrace> {
    RetardedPotential::new(spec, medium, y0, quad)?.trace(grid, 2)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn medium() -> MediumParams {
        MediumParams { rho0: 1.0, k0: 1.0, rho1: 1.0, k1: 1.0, eps: 0.1, y0: [0.0; 3] }
            .validated()
            .unwrap()
    }

    fn bump_source() -> SourceSpec {
        SourceSpec {
            amplitude: 1.0,
            center: [0.0; 3],
            space: SpaceProfile { r_in: 0.6, r_out: 1.0 },
            time: TimeProfile::Bump { t0: 1.0, t1: 2.0 },
        }
        .validated()
        .unwrap()
    }

    #[test]
    fn source_vanishes_outside_supports() {
        let s = bump_source();
        // Outside the annulus.
        assert_eq!(s.eval(Vector3::new(0.1, 0.0, 0.0), 1.5, 0).unwrap(), 0.0);
        assert_eq!(s.eval(Vector3::new(3.0, 0.0, 0.0), 1.5, 0).unwrap(), 0.0);
        // Before t0 and after t1.
        assert_eq!(s.eval(Vector3::new(0.8, 0.0, 0.0), 0.5, 0).unwrap(), 0.0);
        assert_eq!(s.eval(Vector3::new(0.8, 0.0, 0.0), 2.5, 0).unwrap(), 0.0);
        // Inside both.
        assert!(s.eval(Vector3::new(0.8, 0.0, 0.0), 1.5, 0).unwrap() > 0.0);
    }

    #[test]
    fn source_rejects_order_above_three() {
        let s = bump_source();
        assert!(matches!(
            s.eval(Vector3::new(0.8, 0.0, 0.0), 1.5, 4),
            Err(Error::InvalidArgument(_))
        ));
    }

    #[test]
    fn time_profile_derivatives_match_finite_differences() {
        let profiles = [
            TimeProfile::Bump { t0: 0.5, t1: 2.0 },
            TimeProfile::Plateau { t0: 0.5, t1: 3.0, ramp: 0.75 },
        ];
        let h = 1e-5;
        for p in profiles {
            let p = p.validated().unwrap();
            for order in 1..=3u8 {
                let mut worst = 0.0_f64;
                let mut scale = 0.0_f64;
                for k in 0..400 {
                    let t = 0.4 + 0.007 * k as f64;
                    let fd = (p.eval(t + h, order - 1).unwrap()
                        - p.eval(t - h, order - 1).unwrap())
                        / (2.0 * h);
                    let an = p.eval(t, order).unwrap();
                    worst = worst.max((fd - an).abs());
                    scale = scale.max(an.abs());
                }
                // Centered difference is O(h²) against the next derivative.
                assert!(
                    worst <= 1e-6 * scale.max(1.0),
                    "{p:?} order {order}: fd gap {worst} (scale {scale})"
                );
            }
        }
    }

    #[test]
    fn plateau_is_one_in_the_flat_region() {
        let p = TimeProfile::Plateau { t0: 0.0, t1: 10.0, ramp: 1.0 }.validated().unwrap();
        assert_eq!(p.eval(5.0, 0).unwrap(), 1.0);
        assert_eq!(p.eval(5.0, 1).unwrap(), 0.0);
        assert_eq!(p.eval(0.5, 0).unwrap(), smoothstep7(0.5, 0));
    }

    #[test]
    fn primary_wave_is_causal_before_first_arrival() {
        let s = bump_source();
        let m = medium();
        // Receiver at distance 3 from the center; the closest source point is
        // at radius 1.0, so first arrival is t0 + (3 - 1.0)/c0 = 3.0.
        let x = Vector3::new(3.0, 0.0, 0.0);
        let pot = RetardedPotential::new(&s, &m, x, QuadratureSpec::default()).unwrap();
        for t in [0.0, 1.0, 2.0, 2.95] {
            assert_eq!(pot.eval(t, 0).unwrap(), 0.0, "t = {t} should be silent");
        }
        assert!(pot.eval(3.4, 0).unwrap() != 0.0);
    }

    #[test]
    fn primary_wave_is_linear_in_amplitude() {
        let s = bump_source();
        let s2 = SourceSpec { amplitude: 2.0, ..s };
        let m = medium();
        let x = Vector3::new(1.5, 0.7, -0.3);
        let q = QuadratureSpec::default();
        let v1 = primary_wave(&s, &m, x, 3.1, 0, q).unwrap();
        let v2 = primary_wave(&s2, &m, x, 3.1, 0, q).unwrap();
        assert!((v2 - 2.0 * v1).abs() <= 1e-12 * v1.abs().max(1e-300));
        assert!(v1 != 0.0);
    }

    #[test]
    fn primary_wave_is_translation_covariant() {
        let m = medium();
        let shift = Vector3::new(0.4, -2.0, 1.1);
        let s = bump_source();
        let mut s_shifted = s;
        s_shifted.center = [shift.x, shift.y, shift.z];
        let x = Vector3::new(2.0, 0.5, 0.0);
        let q = QuadratureSpec::default();
        let a = primary_wave(&s, &m, x, 2.8, 1, q).unwrap();
        let b = primary_wave(&s_shifted, &m, x + shift, 2.8, 1, q).unwrap();
        assert!((a - b).abs() <= 1e-10 * a.abs().max(1e-300));
    }

    /// Shell-theorem Newtonian potential of the radial profile: independent
    /// 1-D oracle for the static limit,
    /// `N(d) = (1/d) ∫_0^d s² g ds + ∫_d^∞ s g ds` (times amplitude).
    fn newtonian_potential_oracle(spec: &SourceSpec, d: f64) -> f64 {
        let n = 20_000;
        let (a, b) = (spec.space.r_in, spec.space.r_out);
        let h = (b - a) / n as f64;
        let mut inner = 0.0;
        let mut outer = 0.0;
        for k in 0..=n {
            let s = a + h * k as f64;
            let w = if k == 0 || k == n { 0.5 } else { 1.0 };
            let g = spec.space.value(s);
            if s <= d {
                inner += w * h * s * s * g;
            } else {
                outer += w * h * s * g;
            }
        }
        spec.amplitude * (inner / d + outer)
    }

    #[test]
    fn plateau_static_limit_matches_newtonian_potential() {
        let m = medium();
        let spec = SourceSpec {
            amplitude: 1.3,
            center: [0.0; 3],
            space: SpaceProfile { r_in: 0.6, r_out: 1.0 },
            time: TimeProfile::Plateau { t0: 0.0, t1: 40.0, ramp: 2.0 },
        }
        .validated()
        .unwrap();
        // Deep inside the plateau every retarded time sits in the flat part.
        let t = 25.0;
        for x in [Vector3::new(2.0, 0.0, 0.0), Vector3::new(0.2, 0.1, 0.0)] {
            let v = primary_wave(&spec, &m, x, t, 0, QuadratureSpec::default()).unwrap();
            let d = x.norm();
            let stat = m.rho0 * newtonian_potential_oracle(&spec, d);
            assert!(
                (v - stat).abs() / stat.abs() < 5e-3,
                "static limit at d = {d}: {v} vs {stat}"
            );
        }
    }

    #[test]
    fn trace_second_derivative_matches_finite_difference_of_samples() {
        let s = bump_source();
        let m = medium();
        let y0 = Vector3::zeros();
        let dt = 2e-3;
        let grid = TimeGrid::covering(0.0, 4.0, dt).unwrap();
        let pot = RetardedPotential::new(&s, &m, y0, QuadratureSpec::default()).unwrap();
        let v0 = pot.trace(&grid, 0).unwrap();
        let v2 = pot.trace(&grid, 2).unwrap();
        let mut worst = 0.0_f64;
        for k in 1..grid.steps - 1 {
            let fd = (v0.values[k + 1] - 2.0 * v0.values[k] + v0.values[k - 1]) / (dt * dt);
            worst = worst.max((fd - v2.values[k]).abs());
        }
        let scale = v2.max_abs();
        assert!(worst <= 1e-3 * scale, "second-difference gap {worst} vs scale {scale}");
    }

    #[test]
    fn second_deriv_trace_integrates_to_zero_past_activity() {
        let s = bump_source();
        let m = medium();
        let grid = TimeGrid::covering(0.0, 6.0, 1e-3).unwrap();
        let y0 = Vector3::zeros();
        let pot = RetardedPotential::new(&s, &m, y0, QuadratureSpec::default()).unwrap();
        let d2 = pot.trace(&grid, 2).unwrap();
        let d1 = pot.trace(&grid, 1).unwrap();
        // Trapezoid of ∂_tt v over [0, T] should equal ∂_t v(T) - 0 ≈ 0 once
        // all activity has passed.
        let mut integral = 0.0;
        for k in 0..d2.len() {
            let w = if k == 0 || k == d2.len() - 1 { 0.5 } else { 1.0 };
            integral += w * d2.dt * d2.values[k];
        }
        assert!(integral.abs() <= 1e-3 * d1.max_abs());
    }

    #[test]
    fn trace_is_zero_before_arrival_time() {
        let s = bump_source();
        let m = medium();
        // y0 at distance d = 3 from the source center, support ends at 1.0.
        let grid = TimeGrid::covering(0.0, 6.0, 1e-2).unwrap();
        let tr = primary_second_deriv_trace(
            &s,
            &m,
            Vector3::new(0.0, 3.0, 0.0),
            &grid,
            QuadratureSpec::default(),
        )
        .unwrap();
        let first_arrival = 1.0 + (3.0 - 1.0);
        for k in 0..tr.len() {
            if tr.time(k) < first_arrival - 1e-9 {
                assert_eq!(tr.values[k], 0.0);
            }
        }
    }

    #[test]
    fn pde_residual_is_small_off_source() {
        // (1/k0) ∂_tt v - (1/ρ0) Δv = 0 away from the source; Laplacian by
        // fourth-order finite differences, ∂_tt analytically.
        let s = bump_source();
        let m = medium();
        let x = Vector3::new(1.8, 0.2, -0.4);
        let t = 3.0;
        let h = 0.04;
        let quad = QuadratureSpec { radial: 32, polar: 64, azimuthal: 8 };
        let v = |p: Vector3<f64>| primary_wave(&s, &m, p, t, 0, quad).unwrap();
        let c = v(x);
        let mut lap = 0.0;
        for axis in [Vector3::x(), Vector3::y(), Vector3::z()] {
            let p1 = v(x + axis * h);
            let m1 = v(x - axis * h);
            let p2 = v(x + axis * (2.0 * h));
            let m2 = v(x - axis * (2.0 * h));
            lap += (-p2 + 16.0 * p1 - 30.0 * c + 16.0 * m1 - m2) / (12.0 * h * h);
        }
        let vtt = primary_wave(&s, &m, x, t, 2, quad).unwrap();
        let residual = vtt / m.k0 - lap / m.rho0;
        // Scale by the maximum of |∂_tt v| over the trace at this point.
        let grid = TimeGrid::covering(0.0, 6.0, 0.01).unwrap();
        let scale = RetardedPotential::new(&s, &m, x, quad)
            .unwrap()
            .trace(&grid, 2)
            .unwrap()
            .max_abs()
            / m.k0;
        assert!(
            residual.abs() <= 1e-2 * scale,
            "PDE residual {residual} vs scale {scale}"
        );
    }

    #[test]
    fn quadrature_floor_is_enforced() {
        let s = bump_source();
        let m = medium();
        let bad = QuadratureSpec { radial: 2, polar: 48, azimuthal: 4 };
        assert!(matches!(
            RetardedPotential::new(&s, &m, Vector3::zeros(), bad),
            Err(Error::Resolution(_))
        ));
    }

    #[test]
    fn gauss_legendre_integrates_polynomials_exactly() {
        let (x, w) = gauss_legendre(5);
        // ∫_{-1}^{1} x^8 dx = 2/9 needs n >= 5.
        let got: f64 = x.iter().zip(&w).map(|(xi, wi)| wi * xi.powi(8)).sum();
        assert!((got - 2.0 / 9.0).abs() < 1e-14);
        let odd: f64 = x.iter().zip(&w).map(|(xi, wi)| wi * xi.powi(3)).sum();
        assert!(odd.abs() < 1e-15);
    }
}
