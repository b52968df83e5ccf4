//! Extraction of the three characteristic factors of a resonant tail —
//! birth time, period, decay rate — and inversion of the background
//! parameters from them.
//!
//! Estimators are deliberately transform-free: threshold crossing for the
//! birth, zero-crossing spacing for the period, log-extrema regression for
//! the decay. All are invariant under positive rescaling of the trace.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::fit::line_fit;
use crate::trace::WaveTrace;

/// Characteristic factors extracted from one trace.
#[derive(Debug, Clone, Serialize)]
pub struct FeatureReport {
    pub birth_time: f64,
    pub period: Option<f64>,
    pub decay_rate: Option<f64>,
    /// `1 / decay_rate` when a positive decay was fit.
    pub lifetime: Option<f64>,
    pub ringing_detected: bool,
    /// RMS residual of the log-extrema line fit.
    pub fit_residual: Option<f64>,
}

/// First time `|trace|` exceeds `threshold_fraction · max|trace|`, with
/// sub-sample linear interpolation of the crossing.
pub fn detect_birth_time(trace: &WaveTrace, threshold_fraction: f64) -> Result<f64> {
    if !(threshold_fraction > 0.0 && threshold_fraction < 1.0) {
        return Err(Error::InvalidArgument(format!(
            "threshold fraction must lie in (0, 1), got {threshold_fraction}"
        )));
    }
    let max = trace.max_abs();
    if max == 0.0 {
        return Err(Error::NoSignal("all-zero trace".into()));
    }
    let level = threshold_fraction * max;
    for k in 0..trace.len() {
        let v = trace.values[k].abs();
        if v > level {
            if k == 0 {
                return Ok(trace.t_start);
            }
            let prev = trace.values[k - 1].abs();
            let frac = (level - prev) / (v - prev);
            return Ok(trace.time(k - 1) + frac.clamp(0.0, 1.0) * trace.dt);
        }
    }
    Err(Error::NoSignal("no sample exceeds the detection threshold".into()))
}

/// Zero crossings in the window, sub-sample interpolated.
fn zero_crossings(trace: &WaveTrace, window: (f64, f64)) -> Vec<f64> {
    let range = trace.window_indices(window.0, window.1);
    let mut out = Vec::new();
    for k in range.start..range.end.saturating_sub(1) {
        let (a, b) = (trace.values[k], trace.values[k + 1]);
        if a == 0.0 && b == 0.0 {
            continue;
        }
        if a == 0.0 {
            out.push(trace.time(k));
        } else if a * b < 0.0 {
            out.push(trace.time(k) + trace.dt * a / (a - b));
        }
    }
    out
}

/// Local extrema `(time, |value|)` of the trace in the window.
fn local_extrema(trace: &WaveTrace, window: (f64, f64)) -> Vec<(f64, f64)> {
    let range = trace.window_indices(window.0, window.1);
    let mut out = Vec::new();
    for k in range.start.max(1)..range.end.saturating_sub(1) {
        let d1 = trace.values[k] - trace.values[k - 1];
        let d2 = trace.values[k + 1] - trace.values[k];
        if d1 * d2 < 0.0 && trace.values[k] != 0.0 {
            out.push((trace.time(k), trace.values[k].abs()));
        }
    }
    out
}

/// Period as twice the mean spacing of successive zero crossings.
pub fn estimate_period(trace: &WaveTrace, window: (f64, f64)) -> Result<f64> {
    let crossings = zero_crossings(trace, window);
    if crossings.len() < 4 {
        return Err(Error::InsufficientRinging(format!(
            "need at least 4 zero crossings in the window, found {}",
            crossings.len()
        )));
    }
    let spacings: Vec<f64> = crossings.windows(2).map(|w| w[1] - w[0]).collect();
    Ok(2.0 * spacings.iter().sum::<f64>() / spacings.len() as f64)
}

/// Decay rate as the negated least-squares slope of `ln |extrema|` against
/// the extrema times. A clearly growing envelope is a fit error; a flat one
/// legitimately returns a rate near zero.
pub fn estimate_decay_rate(trace: &WaveTrace, window: (f64, f64)) -> Result<f64> {
    Ok(decay_fit(trace, window)?.0)
}

fn decay_fit(trace: &WaveTrace, window: (f64, f64)) -> Result<(f64, f64)> {
    let extrema = local_extrema(trace, window);
    if extrema.len() < 4 {
        return Err(Error::InsufficientRinging(format!(
            "need at least 4 local extrema in the window, found {}",
            extrema.len()
        )));
    }
    let xs: Vec<f64> = extrema.iter().map(|(t, _)| *t).collect();
    let ys: Vec<f64> = extrema.iter().map(|(_, m)| m.ln()).collect();
    let fit = line_fit(&xs, &ys)?;
    let rate = -fit.slope;
    if rate < 0.0 && rate.abs() > 3.0 * fit.slope_stderr + 1e-12 {
        return Err(Error::Fit(format!(
            "extrema envelope grows at rate {:.3e} (stderr {:.1e}); not a decaying tail",
            -rate, fit.slope_stderr
        )));
    }
    // RMS residual of the log fit, reported as a quality flag.
    let rms = (xs
        .iter()
        .zip(&ys)
        .map(|(x, y)| {
            let r = y - (fit.intercept + fit.slope * x);
            r * r
        })
        .sum::<f64>()
        / xs.len() as f64)
        .sqrt();
    Ok((rate, rms))
}

/// Run all three estimators on one trace.
///
/// The analysis window should contain tail only; downstream callers default
/// it to `[end of source support + one travel time, end of trace]`.
pub fn extract_features(
    trace: &WaveTrace,
    window: (f64, f64),
    threshold_fraction: f64,
) -> Result<FeatureReport> {
    let birth_time = detect_birth_time(trace, threshold_fraction)?;
    let period = estimate_period(trace, window);
    let decay = decay_fit(trace, window);
    match (period, decay) {
        (Ok(period), Ok((rate, rms))) if rate > 0.0 => Ok(FeatureReport {
            birth_time,
            period: Some(period),
            decay_rate: Some(rate),
            lifetime: Some(1.0 / rate),
            ringing_detected: true,
            fit_residual: Some(rms),
        }),
        (period, decay) => Ok(FeatureReport {
            birth_time,
            period: period.ok(),
            decay_rate: decay.as_ref().ok().map(|(r, _)| *r),
            lifetime: None,
            ringing_detected: false,
            fit_residual: decay.ok().map(|(_, rms)| rms),
        }),
    }
}

/// Geometry and material quantities assumed known for the inversion.
#[derive(Debug, Clone, Copy, Serialize, serde::Deserialize)]
pub struct KnownBackground {
    pub c_omega: f64,
    pub volume: f64,
    pub k1: f64,
    /// Distance the birth time corresponds to.
    pub distance: f64,
}

/// Background parameters recovered from the tail signatures.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct InvertedBackground {
    pub c0_hat: f64,
    pub rho0_hat: f64,
    pub omega_hat: f64,
}

/// Invert the signatures: `c0 = distance / birth_time`, `ω = 2π / period`,
/// `ρ0 = C k1 / (|Ω| ω²)`.
pub fn invert_background(
    report: &FeatureReport,
    known: &KnownBackground,
) -> Result<InvertedBackground> {
    if !report.ringing_detected {
        return Err(Error::InsufficientRinging(
            "inversion needs a trace with detected ringing".into(),
        ));
    }
    if !(known.distance > 0.0) {
        return Err(Error::InvalidArgument(format!(
            "distance must be positive, got {}",
            known.distance
        )));
    }
    if !(report.birth_time > 0.0) {
        return Err(Error::InvalidArgument(format!(
            "birth time must be positive to invert a travel time, got {}",
            report.birth_time
        )));
    }
    let period = report
        .period
        .ok_or_else(|| Error::InsufficientRinging("no period available".into()))?;
    let omega_hat = 2.0 * std::f64::consts::PI / period;
    Ok(InvertedBackground {
        c0_hat: known.distance / report.birth_time,
        rho0_hat: known.c_omega * known.k1 / (known.volume * omega_hat * omega_hat),
        omega_hat,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::trace::TimeGrid;
    use proptest::prelude::*;

    /// The synthetic damped tail used across the estimator tests:
    /// `H(t-2) sin(√3 (t-2)) e^{-0.015 (t-2)}`.
    fn synthetic_tail(dt: f64, t_end: f64) -> WaveTrace {
        let grid = TimeGrid::covering(0.0, t_end, dt).unwrap();
        WaveTrace::from_fn(&grid, |t| {
            if t < 2.0 {
                0.0
            } else {
                (3.0_f64.sqrt() * (t - 2.0)).sin() * (-0.015 * (t - 2.0)).exp()
            }
        })
    }

    #[test]
    fn birth_time_detected_within_two_samples() {
        let dt = 5e-3;
        let trace = synthetic_tail(dt, 40.0);
        let birth = detect_birth_time(&trace, 0.01).unwrap();
        assert!((birth - 2.0).abs() <= 2.0 * dt, "birth {birth}");
    }

    #[test]
    fn birth_time_is_monotone_in_the_threshold() {
        let trace = synthetic_tail(5e-3, 40.0);
        let low = detect_birth_time(&trace, 0.01).unwrap();
        let high = detect_birth_time(&trace, 0.5).unwrap();
        assert!(high > low);
    }

    #[test]
    fn birth_time_rejects_silent_trace() {
        let grid = TimeGrid::covering(0.0, 1.0, 0.01).unwrap();
        let zero = WaveTrace::zeros(&grid);
        assert!(matches!(
            detect_birth_time(&zero, 0.1),
            Err(Error::NoSignal(_))
        ));
    }

    #[test]
    fn period_matches_synthetic_frequency() {
        let trace = synthetic_tail(2e-3, 40.0);
        let period = estimate_period(&trace, (2.5, 39.0)).unwrap();
        let exact = 2.0 * std::f64::consts::PI / 3.0_f64.sqrt();
        assert!((period - exact).abs() / exact < 1e-2, "period {period} vs {exact}");
    }

    #[test]
    fn period_requires_enough_crossings() {
        let grid = TimeGrid::covering(0.0, 10.0, 0.01).unwrap();
        let decaying = WaveTrace::from_fn(&grid, |t| (-0.3 * t).exp());
        assert!(matches!(
            estimate_period(&decaying, (0.0, 10.0)),
            Err(Error::InsufficientRinging(_))
        ));
    }

    #[test]
    fn decay_rate_matches_synthetic_envelope() {
        let trace = synthetic_tail(2e-3, 80.0);
        let rate = estimate_decay_rate(&trace, (2.5, 79.0)).unwrap();
        assert!((rate - 0.015).abs() / 0.015 < 5e-2, "rate {rate}");
    }

    #[test]
    fn undamped_sinusoid_yields_tiny_rate() {
        let grid = TimeGrid::covering(0.0, 50.0, 1e-3).unwrap();
        let omega = 2.0;
        let pure = WaveTrace::from_fn(&grid, |t| (omega * t).sin());
        let rate = estimate_decay_rate(&pure, (0.5, 49.5)).unwrap();
        assert!(rate.abs() <= 1e-3 * omega, "rate {rate}");
    }

    #[test]
    fn growing_envelope_is_a_fit_error() {
        let grid = TimeGrid::covering(0.0, 30.0, 1e-3).unwrap();
        let growing = WaveTrace::from_fn(&grid, |t| (2.0 * t).sin() * (0.05 * t).exp());
        assert!(matches!(
            estimate_decay_rate(&growing, (0.5, 29.5)),
            Err(Error::Fit(_))
        ));
    }

    #[test]
    fn report_couples_lifetime_and_decay_exactly() {
        let trace = synthetic_tail(2e-3, 60.0);
        let report = extract_features(&trace, (2.5, 59.0), 0.01).unwrap();
        assert!(report.ringing_detected);
        let (rate, life) = (report.decay_rate.unwrap(), report.lifetime.unwrap());
        // lifetime is defined as 1/decay_rate; x·(1/x) holds to one ulp.
        assert!((life * rate - 1.0).abs() <= f64::EPSILON);
    }

    #[test]
    fn inversion_recovers_sphere_background() {
        // period = 2π/√3, C = 4π, |Ω| = 4π/3, k1 = 1 → ρ0 = 1;
        // birth 2.0 at distance 2.0 → c0 = 1.
        let report = FeatureReport {
            birth_time: 2.0,
            period: Some(2.0 * std::f64::consts::PI / 3.0_f64.sqrt()),
            decay_rate: Some(0.015),
            lifetime: Some(1.0 / 0.015),
            ringing_detected: true,
            fit_residual: Some(0.0),
        };
        let known = KnownBackground {
            c_omega: 4.0 * std::f64::consts::PI,
            volume: 4.0 * std::f64::consts::PI / 3.0,
            k1: 1.0,
            distance: 2.0,
        };
        let inv = invert_background(&report, &known).unwrap();
        assert!((inv.c0_hat - 1.0).abs() < 1e-12);
        assert!((inv.rho0_hat - 1.0).abs() < 1e-12);
    }

    #[test]
    fn inversion_rejects_zero_birth_time() {
        let report = FeatureReport {
            birth_time: 0.0,
            period: Some(1.0),
            decay_rate: Some(0.1),
            lifetime: Some(10.0),
            ringing_detected: true,
            fit_residual: None,
        };
        let known = KnownBackground { c_omega: 1.0, volume: 1.0, k1: 1.0, distance: 1.0 };
        assert!(matches!(
            invert_background(&report, &known),
            Err(Error::InvalidArgument(_))
        ));
    }

    #[test]
    fn end_to_end_tail_roundtrip_recovers_density() {
        // Build a tail from the expansion machinery at ε = 0.05, extract the
        // signatures and invert.
        use crate::resonance::{unit_ball_constants, MediumParams, ResonanceSpec};
        use crate::sources::{
            primary_second_deriv_trace, QuadratureSpec, SourceSpec, SpaceProfile, TimeProfile,
        };
        use crate::waves::resonant_tail_closed;

        let medium =
            MediumParams { rho0: 1.0, k0: 1.0, rho1: 1.0, k1: 1.0, eps: 0.05, y0: [0.0; 3] }
                .validated()
                .unwrap();
        let source = SourceSpec {
            amplitude: 1.0,
            center: [0.0; 3],
            space: SpaceProfile { r_in: 0.6, r_out: 1.0 },
            time: TimeProfile::Bump { t0: 0.2, t1: 1.0 },
        };
        let (c, v) = unit_ball_constants();
        let res = ResonanceSpec::from_geometry(c, v, &medium).unwrap();
        let grid = TimeGrid::covering(0.0, 50.0, 2e-3).unwrap();
        let d2v = primary_second_deriv_trace(
            &source,
            &medium,
            medium.y0_vec(),
            &grid,
            QuadratureSpec::default(),
        )
        .unwrap();
        let x = nalgebra::Vector3::new(2.0, 0.0, 0.0);
        let tail = resonant_tail_closed(&d2v, &medium, &res, v, x).unwrap();

        // Tail-only trace: birth is r/c0 plus the drive onset; remove the
        // drive onset by referencing the drive's own birth.
        let drive_birth = detect_birth_time(&d2v, 0.01).unwrap();
        let window = (1.0 + 2.0 + 1.0, 49.0);
        let report = extract_features(&tail, window, 0.01).unwrap();
        assert!(report.ringing_detected);

        let adjusted = FeatureReport {
            birth_time: report.birth_time - drive_birth,
            ..report.clone()
        };
        let known = KnownBackground { c_omega: c, volume: v, k1: 1.0, distance: 2.0 };
        let inv = invert_background(&adjusted, &known).unwrap();
        assert!((inv.rho0_hat - 1.0).abs() < 5e-2, "rho0 {}", inv.rho0_hat);
        assert!((inv.c0_hat - 1.0).abs() < 5e-2, "c0 {}", inv.c0_hat);

        let rate = report.decay_rate.unwrap();
        assert!((rate - res.delta).abs() / res.delta < 0.1, "decay {rate} vs {}", res.delta);
    }

    proptest! {
        #[test]
        fn estimators_are_scale_invariant(factor in 1e-3_f64..1e3) {
            let trace = synthetic_tail(5e-3, 40.0);
            let scaled = trace.scaled(factor);
            let window = (2.5, 39.0);
            let b0 = detect_birth_time(&trace, 0.05).unwrap();
            let b1 = detect_birth_time(&scaled, 0.05).unwrap();
            prop_assert!((b0 - b1).abs() < 1e-12);
            let p0 = estimate_period(&trace, window).unwrap();
            let p1 = estimate_period(&scaled, window).unwrap();
            prop_assert!((p0 - p1).abs() < 1e-12);
            let d0 = estimate_decay_rate(&trace, window).unwrap();
            let d1 = estimate_decay_rate(&scaled, window).unwrap();
            prop_assert!((d0 - d1).abs() < 1e-10);
        }
    }
}
