//! Minnaert frequency, resonance poles and lifetime, the damped-oscillator
//! Duhamel solution, and the reduced-system roots with their small-ε
//! asymptotics.

use num_complex::Complex64;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::fit::{loglog_slope, LineFit};
use crate::layerpot::EtaCoefficients;
use crate::trace::WaveTrace;

const FOUR_PI: f64 = 4.0 * std::f64::consts::PI;
const EIGHT_PI: f64 = 8.0 * std::f64::consts::PI;

/// Background and bubble material constants. The bubble occupies the
/// ε-scaled copy of the reference domain around `y0`, with density
/// `rho1·ε²` and bulk modulus `k1·ε²` (high-contrast scaling).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, serde::Deserialize)]
pub struct MediumParams {
    pub rho0: f64,
    pub k0: f64,
    pub rho1: f64,
    pub k1: f64,
    /// Bubble scale ε.
    pub eps: f64,
    /// Bubble center.
    pub y0: [f64; 3],
}

impl MediumParams {
    pub fn validated(self) -> Result<Self> {
        let all = [self.rho0, self.k0, self.rho1, self.k1, self.eps];
        if all.iter().any(|v| !(*v > 0.0) || !v.is_finite()) {
            return Err(Error::InvalidArgument(format!(
                "material constants and eps must be positive and finite: {self:?}"
            )));
        }
        if self.rho1 * self.eps * self.eps >= self.rho0 {
            return Err(Error::InvalidArgument(format!(
                "contrast assumption violated: rho1*eps^2 = {} must stay below rho0 = {}",
                self.rho1 * self.eps * self.eps,
                self.rho0
            )));
        }
        Ok(self)
    }

    /// Background wave speed `sqrt(k0/rho0)`.
    pub fn c0(&self) -> f64 {
        (self.k0 / self.rho0).sqrt()
    }

    /// Interior wave speed `sqrt(k1/rho1)`; the ε² factors cancel.
    pub fn c1(&self) -> f64 {
        (self.k1 / self.rho1).sqrt()
    }

    pub fn y0_vec(&self) -> nalgebra::Vector3<f64> {
        nalgebra::Vector3::new(self.y0[0], self.y0[1], self.y0[2])
    }

    pub fn with_eps(mut self, eps: f64) -> Self {
        self.eps = eps;
        self
    }
}

/// Minnaert frequency `ω_M = sqrt(C_Ω k1 / (|Ω| rho0))`.
pub fn minnaert_frequency(c_omega: f64, volume: f64, medium: &MediumParams) -> Result<f64> {
    if !(c_omega > 0.0) || !(volume > 0.0) {
        return Err(Error::InvalidArgument(format!(
            "capacitance and volume must be positive, got C = {c_omega}, |Omega| = {volume}"
        )));
    }
    if !(medium.k1 > 0.0) || !(medium.rho0 > 0.0) {
        return Err(Error::InvalidArgument(
            "minnaert frequency needs k1 > 0 and rho0 > 0".into(),
        ));
    }
    Ok((c_omega * medium.k1 / (volume * medium.rho0)).sqrt())
}

/// Dominant resonance poles `z± = ±ω_M - i ε C_Ω ω_M² / (8π c0)`.
pub fn resonance_poles(
    omega_m: f64,
    eps: f64,
    c_omega: f64,
    c0: f64,
) -> Result<(Complex64, Complex64)> {
    if eps < 0.0 || !(omega_m > 0.0) || !(c_omega > 0.0) || !(c0 > 0.0) {
        return Err(Error::InvalidArgument(format!(
            "poles need omega_m, C, c0 > 0 and eps >= 0; got ({omega_m}, {eps}, {c_omega}, {c0})"
        )));
    }
    let delta = eps * c_omega * omega_m * omega_m / (EIGHT_PI * c0);
    Ok((
        Complex64::new(omega_m, -delta),
        Complex64::new(-omega_m, -delta),
    ))
}

/// Everything pole-level about one resonance: frequency, poles, the physical
/// decay rate, the lifetime `t** = 1/δ` and the period `2π/ω_M`.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct ResonanceSpec {
    pub omega_m: f64,
    pub z_plus: Complex64,
    pub z_minus: Complex64,
    /// Physical decay rate `δ = ε C_Ω ω_M² / (8π c0)`.
    pub delta: f64,
    /// Envelope e-folding time `1/δ` (infinite at ε = 0).
    pub lifetime: f64,
    pub period: f64,
}

impl ResonanceSpec {
    pub fn new(omega_m: f64, eps: f64, c_omega: f64, c0: f64) -> Result<Self> {
        let (z_plus, z_minus) = resonance_poles(omega_m, eps, c_omega, c0)?;
        let delta = -z_plus.im;
        Ok(Self {
            omega_m,
            z_plus,
            z_minus,
            delta,
            lifetime: if delta > 0.0 { 1.0 / delta } else { f64::INFINITY },
            period: 2.0 * std::f64::consts::PI / omega_m,
        })
    }

    /// Build from the geometric inputs.
    pub fn from_geometry(c_omega: f64, volume: f64, medium: &MediumParams) -> Result<Self> {
        let omega_m = minnaert_frequency(c_omega, volume, medium)?;
        Self::new(omega_m, medium.eps, c_omega, medium.c0())
    }
}

/// Coefficient `γ_ε = ω_M² ε² / (1 - ρ1 ε²/ρ0)` of the reduced systems.
pub fn gamma_eps(medium: &MediumParams, omega_m: f64) -> Result<f64> {
    let denom = 1.0 - medium.rho1 * medium.eps * medium.eps / medium.rho0;
    if denom <= 0.0 {
        return Err(Error::InvalidArgument(format!(
            "contrast assumption violated: 1 - rho1 eps^2/rho0 = {denom} must be positive"
        )));
    }
    Ok(omega_m * omega_m * medium.eps * medium.eps / denom)
}

/// Solve `h'' + a1 h' + a2 h = f`, `h(0) = h'(0) = 0` in the oscillatory
/// regime `a1² - 4 a2 < 0` by the closed-form kernel
/// `h(t) = (1/ω̃) ∫_0^t e^{-a1 (t-τ)/2} sin(ω̃ (t-τ)) f(τ) dτ`,
/// `ω̃ = sqrt(4 a2 - a1²)/2`, discretized by trapezoidal convolution on the
/// forcing grid.
pub fn duhamel_solve(a1: f64, a2: f64, forcing: &WaveTrace) -> Result<WaveTrace> {
    if a1 < 0.0 || !(a2 > 0.0) {
        return Err(Error::InvalidArgument(format!(
            "duhamel needs a1 >= 0 and a2 > 0, got a1 = {a1}, a2 = {a2}"
        )));
    }
    if a1 * a1 - 4.0 * a2 >= 0.0 {
        return Err(Error::UnsupportedRegime(format!(
            "overdamped oscillator (a1^2 - 4 a2 = {} >= 0) is outside the treated regime",
            a1 * a1 - 4.0 * a2
        )));
    }
    if forcing.t_start < 0.0 {
        return Err(Error::InvalidArgument(
            "forcing must be causal (t_start >= 0)".into(),
        ));
    }
    let omega_tilde = (4.0 * a2 - a1 * a1).sqrt() / 2.0;
    let n = forcing.len();
    let dt = forcing.dt;

    // Kernel samples K(k dt) = e^{-a1 k dt / 2} sin(ω̃ k dt) / ω̃.
    let kernel: Vec<f64> = (0..n)
        .map(|k| {
            let s = k as f64 * dt;
            (-0.5 * a1 * s).exp() * (omega_tilde * s).sin() / omega_tilde
        })
        .collect();

    let f = &forcing.values;
    use rayon::prelude::*;
    let values: Vec<f64> = (0..n)
        .into_par_iter()
        .map(|m| {
            // Trapezoid: half weights at τ = 0 and τ = t_m (the kernel
            // vanishes at τ = t_m, so only the τ = 0 end actually matters).
            let mut acc = 0.5 * kernel[m] * f[0];
            for k in 1..m {
                acc += kernel[m - k] * f[k];
            }
            if m > 0 {
                acc += 0.5 * kernel[0] * f[m];
            }
            acc * dt
        })
        .collect();

    WaveTrace::new(forcing.t_start, dt, values)
}

/// The two roots of one reduced system, in the scaled time of the reduction.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct ReducedRoots {
    pub reduction: u8,
    pub lambda_plus: Complex64,
    pub lambda_minus: Complex64,
}

impl ReducedRoots {
    /// Convert a scaled-time root to physical (decay rate, angular
    /// frequency): a mode `e^{λ t_scaled}` is `e^{(λ/ε) t_physical}` under
    /// `t_scaled = t_physical / ε`.
    pub fn to_physical(&self, eps: f64) -> (f64, f64) {
        (-self.lambda_plus.re / eps, self.lambda_plus.im / eps)
    }
}

/// Roots of the reduced quadratic for reduction level `j ∈ {1,2,3}`:
/// `j = 1` solves `λ² - η2 γ λ + γ = 0`; `j = 2, 3` carry the compound
/// coefficients of the deeper reductions, guarded by their positivity
/// conditions (evaluated literally; out-of-range ε is refused).
pub fn reduced_roots(j: u8, gamma: f64, eta: &EtaCoefficients) -> Result<ReducedRoots> {
    if gamma < 0.0 {
        return Err(Error::InvalidArgument(format!("gamma must be >= 0, got {gamma}")));
    }
    let (e2, e3, e4) = (eta.eta2, eta.eta3, eta.eta4);
    // d2 = 1 - (η3 - η2²) γ, the j = 2 positivity quantity.
    let d2 = 1.0 - e3 * gamma + e2 * e2 * gamma;
    let (a, b, c) = match j {
        1 => (1.0, -e2 * gamma, gamma),
        2 => {
            if d2 <= 0.0 {
                return Err(Error::UnsupportedRegime(format!(
                    "reduction 2 needs 1 - (eta3 - eta2^2) gamma > 0, got {d2}"
                )));
            }
            (d2, -e2 * gamma, gamma)
        }
        3 => {
            if d2 <= 0.0 {
                return Err(Error::UnsupportedRegime(format!(
                    "reduction 3 needs 1 - (eta3 - eta2^2) gamma > 0, got {d2}"
                )));
            }
            let a3 = 1.0 - e3 * gamma
                + gamma * (e2 * e2 - e4 * gamma * e2 + e3 * e2 * e2 * gamma) / d2;
            if a3 <= 0.0 {
                return Err(Error::UnsupportedRegime(format!(
                    "reduction 3 positivity condition failed: {a3}"
                )));
            }
            let b3 = gamma * (-e2 + e4 * gamma - e3 * gamma * e2) / d2;
            (a3, b3, gamma)
        }
        _ => {
            return Err(Error::InvalidArgument(format!(
                "reduction index must be 1, 2 or 3, got {j}"
            )))
        }
    };

    let disc = b * b - 4.0 * a * c;
    let (lambda_plus, lambda_minus) = if disc < 0.0 {
        let re = -b / (2.0 * a);
        let im = (-disc).sqrt() / (2.0 * a);
        (Complex64::new(re, im), Complex64::new(re, -im))
    } else {
        let sq = disc.sqrt();
        (
            Complex64::new((-b + sq) / (2.0 * a), 0.0),
            Complex64::new((-b - sq) / (2.0 * a), 0.0),
        )
    };
    Ok(ReducedRoots { reduction: j, lambda_plus, lambda_minus })
}

/// Fitted log-log orders of the reduced-root residuals against the dominant
/// pole values over an ε sweep.
#[derive(Debug, Clone, Serialize)]
pub struct PoleAsymptotics {
    /// Residuals `|Re λ + C ω² ε²/(8π c0)|` per sweep point.
    pub re_residuals: Vec<f64>,
    /// Residuals `|Im λ - ω ε|` per sweep point (for the `+` root).
    pub im_residuals: Vec<f64>,
    pub re_fit: LineFit,
    pub im_fit: LineFit,
}

/// Fit the orders of the scaled-time root residuals over an ε sweep
/// (expected: ε⁴ for the real part, ε³ for the imaginary part; the bound
/// constants are unspecified, so the check is a slope fit).
pub fn pole_asymptotics_check(
    sweep: &[(f64, ReducedRoots)],
    omega_m: f64,
    c_omega: f64,
    c0: f64,
) -> Result<PoleAsymptotics> {
    if sweep.len() < 4 {
        return Err(Error::InvalidArgument(format!(
            "asymptotics fit needs at least 4 sweep points, got {}",
            sweep.len()
        )));
    }
    let mut eps = Vec::with_capacity(sweep.len());
    let mut re_res = Vec::with_capacity(sweep.len());
    let mut im_res = Vec::with_capacity(sweep.len());
    for (e, roots) in sweep {
        if !(*e > 0.0) {
            return Err(Error::InvalidArgument("sweep eps must be positive".into()));
        }
        eps.push(*e);
        let scaled_decay = c_omega * omega_m * omega_m * e * e / (EIGHT_PI * c0);
        re_res.push((roots.lambda_plus.re + scaled_decay).abs());
        im_res.push((roots.lambda_plus.im - omega_m * e).abs());
    }
    Ok(PoleAsymptotics {
        re_fit: loglog_slope(&eps, &re_res)?,
        im_fit: loglog_slope(&eps, &im_res)?,
        re_residuals: re_res,
        im_residuals: im_res,
    })
}

/// Analytic unit-ball constants `(C, |Ω|) = (4π, 4π/3)` used throughout the
/// tests and examples.
pub fn unit_ball_constants() -> (f64, f64) {
    (FOUR_PI, FOUR_PI / 3.0)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::trace::TimeGrid;
    use std::f64::consts::PI;

    fn sphere_medium(eps: f64) -> MediumParams {
        MediumParams { rho0: 1.0, k0: 1.0, rho1: 1.0, k1: 1.0, eps, y0: [0.0; 3] }
            .validated()
            .unwrap()
    }

    fn sphere_eta() -> EtaCoefficients {
        // Unit-sphere values at c0 = 1 (eta3/eta4 from the chord moments).
        EtaCoefficients {
            eta1: 1.0,
            eta2: -1.0,
            eta3: 12.0 * PI / 5.0,
            eta4: -16.0 * PI / 15.0,
        }
    }

    #[test]
    fn minnaert_frequency_reproduces_arithmetic_values() {
        let (c, v) = unit_ball_constants();
        let medium = sphere_medium(0.1);
        let w = minnaert_frequency(c, v, &medium).unwrap();
        assert!((w - 3.0_f64.sqrt()).abs() < 1e-14);

        let medium_k3 = MediumParams { k1: 3.0, ..medium }.validated().unwrap();
        assert!((minnaert_frequency(c, v, &medium_k3).unwrap() - 3.0).abs() < 1e-14);
    }

    #[test]
    fn quadrupling_k1_doubles_frequency() {
        let (c, v) = unit_ball_constants();
        let m1 = sphere_medium(0.1);
        let m4 = MediumParams { k1: 4.0, ..m1 }.validated().unwrap();
        let w1 = minnaert_frequency(c, v, &m1).unwrap();
        let w4 = minnaert_frequency(c, v, &m4).unwrap();
        assert_eq!(w4, 2.0 * w1);
    }

    #[test]
    fn minnaert_frequency_rejects_nonpositive_inputs() {
        let medium = sphere_medium(0.1);
        assert!(minnaert_frequency(0.0, 1.0, &medium).is_err());
        assert!(minnaert_frequency(1.0, -1.0, &medium).is_err());
    }

    #[test]
    fn poles_match_sphere_constants() {
        let (c, _) = unit_ball_constants();
        let w = 3.0_f64.sqrt();
        let (zp, zm) = resonance_poles(w, 0.01, c, 1.0).unwrap();
        // Imaginary part is -ε 4π 3/(8π) = -1.5 ε.
        assert!((zp.re - w).abs() < 1e-14);
        assert!((zp.im + 0.015).abs() < 1e-15);
        assert!((zm.re + w).abs() < 1e-14);
        assert_eq!(zp.im, zm.im);
    }

    #[test]
    fn poles_degenerate_to_real_at_zero_eps() {
        let (zp, zm) = resonance_poles(2.0, 0.0, 7.0, 1.3).unwrap();
        assert_eq!(zp.im, 0.0);
        assert_eq!(zm.im, 0.0);
        assert_eq!(zp.re, 2.0);
        assert_eq!(zm.re, -2.0);
    }

    #[test]
    fn pole_symmetry_z_minus_is_negated_conjugate() {
        for (w, e, c, c0) in [(1.0, 0.3, 2.0, 1.0), (5.5, 0.01, 12.0, 2.5)] {
            let (zp, zm) = resonance_poles(w, e, c, c0).unwrap();
            let neg_conj = Complex64::new(-zp.re, zp.im);
            assert!((zm - neg_conj).norm() < 1e-15);
        }
    }

    #[test]
    fn resonance_spec_lifetime_and_period() {
        let (c, v) = unit_ball_constants();
        let medium = sphere_medium(0.05);
        let spec = ResonanceSpec::from_geometry(c, v, &medium).unwrap();
        assert!((spec.delta - 1.5 * 0.05).abs() < 1e-14);
        assert!((spec.lifetime - 1.0 / 0.075).abs() < 1e-10);
        assert!((spec.period - 2.0 * PI / 3.0_f64.sqrt()).abs() < 1e-14);
    }

    #[test]
    fn gamma_eps_examples() {
        let medium = sphere_medium(0.1);
        let g = gamma_eps(&medium, 3.0_f64.sqrt()).unwrap();
        assert!((g - 0.03 / 0.99).abs() < 1e-14);

        // γ/ε² → ω² as ε → 0.
        let tiny = sphere_medium(1e-4);
        let g = gamma_eps(&tiny, 3.0_f64.sqrt()).unwrap();
        assert!((g / 1e-8 - 3.0).abs() / 3.0 < 1e-6);
    }

    #[test]
    fn gamma_eps_rejects_violated_contrast() {
        let medium =
            MediumParams { rho0: 1.0, k0: 1.0, rho1: 1.0, k1: 1.0, eps: 1.5, y0: [0.0; 3] };
        assert!(matches!(gamma_eps(&medium, 1.0), Err(Error::InvalidArgument(_))));
        assert!(medium.validated().is_err());
    }

    /// Classic fourth-order Runge–Kutta on the first-order system
    /// (independent oracle for the Duhamel solver).
    fn rk4_oscillator(
        a1: f64,
        a2: f64,
        f: impl Fn(f64) -> f64,
        t_end: f64,
        dt: f64,
    ) -> Vec<(f64, f64)> {
        let mut out = vec![(0.0, 0.0)];
        let (mut h, mut v, mut t) = (0.0_f64, 0.0_f64, 0.0_f64);
        let rhs = |t: f64, h: f64, v: f64| (v, f(t) - a1 * v - a2 * h);
        let steps = (t_end / dt).round() as usize;
        for _ in 0..steps {
            let (k1h, k1v) = rhs(t, h, v);
            let (k2h, k2v) = rhs(t + dt / 2.0, h + dt / 2.0 * k1h, v + dt / 2.0 * k1v);
            let (k3h, k3v) = rhs(t + dt / 2.0, h + dt / 2.0 * k2h, v + dt / 2.0 * k2v);
            let (k4h, k4v) = rhs(t + dt, h + dt * k3h, v + dt * k3v);
            h += dt / 6.0 * (k1h + 2.0 * k2h + 2.0 * k3h + k4h);
            v += dt / 6.0 * (k1v + 2.0 * k2v + 2.0 * k3v + k4v);
            t += dt;
            out.push((t, h));
        }
        out
    }

    #[test]
    fn duhamel_zero_forcing_gives_zero() {
        let grid = TimeGrid::new(0.0, 0.01, 500).unwrap();
        let zero = WaveTrace::zeros(&grid);
        let h = duhamel_solve(0.1, 4.0, &zero).unwrap();
        assert!(h.max_abs() == 0.0);
    }

    #[test]
    fn duhamel_matches_harmonic_closed_form() {
        // a1 = 0, a2 = ω², f ≡ ω² gives h = 1 - cos(ω t).
        let omega = 1.0_f64;
        let t_end = 2.0 * PI / omega;
        let n = 10_000;
        let dt = t_end / n as f64;
        let grid = TimeGrid::new(0.0, dt, n + 1).unwrap();
        let forcing = WaveTrace::from_fn(&grid, |_| omega * omega);
        let h = duhamel_solve(0.0, omega * omega, &forcing).unwrap();
        let mut max_err = 0.0_f64;
        for (k, v) in h.values.iter().enumerate() {
            let exact = 1.0 - (omega * h.time(k)).cos();
            max_err = max_err.max((v - exact).abs());
        }
        assert!(max_err <= 1e-6, "max error {max_err}");
    }

    #[test]
    fn duhamel_matches_rk4_for_damped_gaussian_forcing() {
        let (a1, a2) = (0.2, 4.0);
        let pulse = |t: f64| (-((t - 3.0) / 0.6).powi(2)).exp();
        let t_end = 20.0;
        let n = 20_000_usize;
        let dt = t_end / n as f64;
        let grid = TimeGrid::new(0.0, dt, n + 1).unwrap();
        let forcing = WaveTrace::from_fn(&grid, pulse);
        let h = duhamel_solve(a1, a2, &forcing).unwrap();
        let oracle = rk4_oscillator(a1, a2, pulse, t_end, dt / 4.0);
        let mut max_err = 0.0_f64;
        for (k, v) in h.values.iter().enumerate() {
            let (t_o, h_o) = oracle[4 * k];
            assert!((t_o - h.time(k)).abs() < 1e-9);
            max_err = max_err.max((v - h_o).abs());
        }
        assert!(max_err <= 1e-6, "sup-norm gap to RK4 {max_err}");
    }

    #[test]
    fn duhamel_is_linear() {
        let grid = TimeGrid::new(0.0, 0.002, 4001).unwrap();
        let f = WaveTrace::from_fn(&grid, |t| (t - 2.0).max(0.0).sin());
        let g = WaveTrace::from_fn(&grid, |t| (-(t - 1.0).powi(2)).exp());
        let (a1, a2) = (0.3, 9.0);
        let hf = duhamel_solve(a1, a2, &f).unwrap();
        let hg = duhamel_solve(a1, a2, &g).unwrap();
        let combo = f.combine(2.5, &g, -1.25).unwrap();
        let h_combo = duhamel_solve(a1, a2, &combo).unwrap();
        let recombined = hf.combine(2.5, &hg, -1.25).unwrap();
        let scale = h_combo.max_abs().max(1.0);
        for (a, b) in h_combo.values.iter().zip(&recombined.values) {
            assert!((a - b).abs() <= 1e-12 * scale);
        }
    }

    #[test]
    fn duhamel_respects_causality() {
        let grid = TimeGrid::new(0.0, 0.01, 2001).unwrap();
        let t_on = 8.0;
        let f = WaveTrace::from_fn(&grid, |t| if t >= t_on { 1.0 } else { 0.0 });
        let h = duhamel_solve(0.1, 2.0, &f).unwrap();
        for (k, v) in h.values.iter().enumerate() {
            if h.time(k) < t_on {
                assert!(v.abs() <= 1e-12);
            }
        }
    }

    #[test]
    fn duhamel_rejects_overdamped_regime() {
        let grid = TimeGrid::new(0.0, 0.01, 10).unwrap();
        let f = WaveTrace::zeros(&grid);
        assert!(matches!(
            duhamel_solve(4.0, 1.0, &f),
            Err(Error::UnsupportedRegime(_))
        ));
        // Critically damped boundary also refused.
        assert!(matches!(
            duhamel_solve(2.0, 1.0, &f),
            Err(Error::UnsupportedRegime(_))
        ));
    }

    #[test]
    fn duhamel_ode_residual_is_second_order() {
        // Centered-difference residual of the ODE on the interior should
        // shrink like dt².
        let (a1, a2) = (0.5, 25.0);
        let pulse = |t: f64| (-((t - 1.5) / 0.4).powi(2)).exp();
        let mut sups = Vec::new();
        let mut dts = Vec::new();
        for n in [2000usize, 4000, 8000] {
            let dt = 8.0 / n as f64;
            let grid = TimeGrid::new(0.0, dt, n + 1).unwrap();
            let f = WaveTrace::from_fn(&grid, pulse);
            let h = duhamel_solve(a1, a2, &f).unwrap();
            let mut sup = 0.0_f64;
            for k in 1..n {
                let d2 = (h.values[k + 1] - 2.0 * h.values[k] + h.values[k - 1]) / (dt * dt);
                let d1 = (h.values[k + 1] - h.values[k - 1]) / (2.0 * dt);
                let res = d2 + a1 * d1 + a2 * h.values[k] - f.values[k];
                sup = sup.max(res.abs());
            }
            sups.push(sup);
            dts.push(dt);
        }
        let fit = loglog_slope(&dts, &sups).unwrap();
        assert!(fit.slope > 1.8, "residual order {}", fit.slope);
    }

    #[test]
    fn reduced_roots_match_quadratic_arithmetic_at_j1() {
        let medium = sphere_medium(0.01);
        let gamma = gamma_eps(&medium, 3.0_f64.sqrt()).unwrap();
        let roots = reduced_roots(1, gamma, &sphere_eta()).unwrap();
        // λ = (η2 γ ± i sqrt(4γ - η2²γ²)) / 2 with η2 = -1.
        let re = -gamma / 2.0;
        let im = (4.0 * gamma - gamma * gamma).sqrt() / 2.0;
        assert!((roots.lambda_plus.re - re).abs() < 1e-18);
        assert!((roots.lambda_plus.im - im).abs() < 1e-15);
        // Frozen values from the quadratic-formula oracle at
        // γ = 3e-4/(1 - 1e-4), η2 = -1.
        assert!((roots.lambda_plus.re + 1.50015e-4).abs() < 1e-9);
        assert!((roots.lambda_plus.im - 1.7320725e-2).abs() < 1e-8);
    }

    #[test]
    fn reduced_roots_are_stable_conjugate_pairs_for_all_reductions() {
        let medium = sphere_medium(0.01);
        let gamma = gamma_eps(&medium, 3.0_f64.sqrt()).unwrap();
        let eta = sphere_eta();
        let mut re_parts = Vec::new();
        for j in 1..=3u8 {
            let r = reduced_roots(j, gamma, &eta).unwrap();
            assert!((r.lambda_plus.re - r.lambda_minus.re).abs() < 1e-18);
            assert!((r.lambda_plus.im + r.lambda_minus.im).abs() < 1e-18);
            assert!(r.lambda_plus.re < 0.0, "reduction {j} unstable");
            re_parts.push(r.lambda_plus.re);
        }
        // The three reductions share the damping at leading order; their
        // compound denominators differ at relative O(γ).
        for w in re_parts.windows(2) {
            assert!((w[0] - w[1]).abs() < 1e-2 * w[0].abs());
        }
    }

    #[test]
    fn reduced_roots_vanish_with_gamma() {
        let r = reduced_roots(1, 0.0, &sphere_eta()).unwrap();
        assert_eq!(r.lambda_plus, Complex64::new(0.0, 0.0));
        assert_eq!(r.lambda_minus, Complex64::new(0.0, 0.0));
    }

    #[test]
    fn reduced_roots_reject_bad_index_and_regime() {
        let eta = sphere_eta();
        assert!(matches!(reduced_roots(0, 0.1, &eta), Err(Error::InvalidArgument(_))));
        assert!(matches!(reduced_roots(4, 0.1, &eta), Err(Error::InvalidArgument(_))));
        // Large gamma violates the j = 2 positivity condition when eta3 > eta2².
        let bad = EtaCoefficients { eta1: 1.0, eta2: -1.0, eta3: 30.0, eta4: 0.0 };
        assert!(matches!(
            reduced_roots(2, 1.0, &bad),
            Err(Error::UnsupportedRegime(_))
        ));
    }

    #[test]
    fn physical_conversion_recovers_pole_scales() {
        let eps = 0.01;
        let medium = sphere_medium(eps);
        let omega = 3.0_f64.sqrt();
        let gamma = gamma_eps(&medium, omega).unwrap();
        let roots = reduced_roots(1, gamma, &sphere_eta()).unwrap();
        let (decay, freq) = roots.to_physical(eps);
        assert!((decay - 1.5 * eps).abs() / (1.5 * eps) < 1e-3);
        assert!((freq - omega).abs() / omega < 1e-3);
    }

    #[test]
    fn pole_asymptotics_orders_meet_theory() {
        let omega = 3.0_f64.sqrt();
        let (c, _) = unit_ball_constants();
        let eta = sphere_eta();
        let sweep: Vec<(f64, ReducedRoots)> = [0.02, 0.01, 0.005, 0.0025]
            .iter()
            .map(|&e| {
                let medium = sphere_medium(e);
                let gamma = gamma_eps(&medium, omega).unwrap();
                (e, reduced_roots(1, gamma, &eta).unwrap())
            })
            .collect();
        let report = pole_asymptotics_check(&sweep, omega, c, 1.0).unwrap();
        assert!(report.re_fit.slope >= 3.5, "re slope {}", report.re_fit.slope);
        assert!(report.im_fit.slope >= 2.5, "im slope {}", report.im_fit.slope);
    }

    #[test]
    fn pole_asymptotics_requires_four_points() {
        let eta = sphere_eta();
        let sweep: Vec<(f64, ReducedRoots)> = [0.02, 0.01, 0.005]
            .iter()
            .map(|&e| (e, reduced_roots(1, e * e, &eta).unwrap()))
            .collect();
        assert!(matches!(
            pole_asymptotics_check(&sweep, 1.0, 1.0, 1.0),
            Err(Error::InvalidArgument(_))
        ));
    }
}
