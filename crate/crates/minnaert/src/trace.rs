//! Uniformly sampled time series at a fixed receiver.

use std::io::{BufRead, BufReader, BufWriter, Write};
use std::path::Path;

use crate::error::{Error, Result};

/// A uniform time grid `t_k = t_start + k*dt`, `k = 0..steps`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TimeGrid {
    pub t_start: f64,
    pub dt: f64,
    /// Number of samples (grid points), not intervals.
    pub steps: usize,
}

impl TimeGrid {
    pub fn new(t_start: f64, dt: f64, steps: usize) -> Result<Self> {
        if !(dt > 0.0) || !dt.is_finite() || !t_start.is_finite() {
            return Err(Error::InvalidArgument(format!(
                "time grid needs finite t_start and dt > 0, got t_start={t_start}, dt={dt}"
            )));
        }
        Ok(Self { t_start, dt, steps })
    }

    /// Grid covering `[t_start, t_end]` with step `dt` (last sample >= t_end).
    pub fn covering(t_start: f64, t_end: f64, dt: f64) -> Result<Self> {
        if t_end <= t_start {
            return Err(Error::InvalidArgument(format!(
                "time grid needs t_end > t_start, got [{t_start}, {t_end}]"
            )));
        }
        let steps = ((t_end - t_start) / dt).ceil() as usize + 1;
        Self::new(t_start, dt, steps)
    }

    pub fn time(&self, k: usize) -> f64 {
        self.t_start + self.dt * k as f64
    }

    pub fn times(&self) -> impl Iterator<Item = f64> + '_ {
        (0..self.steps).map(|k| self.time(k))
    }
}

/// Scalar field samples on a [`TimeGrid`]. Traces of causal fields are zero
/// before their birth index; nothing is stored for t < t_start.
#[derive(Debug, Clone, PartialEq)]
pub struct WaveTrace {
    pub t_start: f64,
    pub dt: f64,
    pub values: Vec<f64>,
}

impl WaveTrace {
    pub fn new(t_start: f64, dt: f64, values: Vec<f64>) -> Result<Self> {
        if !(dt > 0.0) || !dt.is_finite() {
            return Err(Error::InvalidArgument(format!("trace needs dt > 0, got {dt}")));
        }
        if values.iter().any(|v| !v.is_finite()) {
            return Err(Error::InvalidArgument("trace contains non-finite samples".into()));
        }
        Ok(Self { t_start, dt, values })
    }

    pub fn zeros(grid: &TimeGrid) -> Self {
        Self { t_start: grid.t_start, dt: grid.dt, values: vec![0.0; grid.steps] }
    }

    /// Sample the grid with `f(t)`.
    pub fn from_fn(grid: &TimeGrid, f: impl Fn(f64) -> f64) -> Self {
        Self {
            t_start: grid.t_start,
            dt: grid.dt,
            values: grid.times().map(f).collect(),
        }
    }

    pub fn grid(&self) -> TimeGrid {
        TimeGrid { t_start: self.t_start, dt: self.dt, steps: self.values.len() }
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn time(&self, k: usize) -> f64 {
        self.t_start + self.dt * k as f64
    }

    pub fn t_end(&self) -> f64 {
        match self.values.len() {
            0 => self.t_start,
            n => self.time(n - 1),
        }
    }

    pub fn max_abs(&self) -> f64 {
        self.values.iter().fold(0.0_f64, |m, v| m.max(v.abs()))
    }

    /// Linear interpolation; zero outside the sampled window (causal reading).
    pub fn interpolate(&self, t: f64) -> f64 {
        if self.values.is_empty() {
            return 0.0;
        }
        let s = (t - self.t_start) / self.dt;
        if s <= 0.0 {
            return if s == 0.0 { self.values[0] } else { 0.0 };
        }
        let k = s.floor() as usize;
        if k + 1 >= self.values.len() {
            return if k + 1 == self.values.len() { self.values[k] } else { 0.0 };
        }
        let w = s - k as f64;
        self.values[k] * (1.0 - w) + self.values[k + 1] * w
    }

    /// Samplewise `alpha*self + beta*other`; grids must agree.
    pub fn combine(&self, alpha: f64, other: &WaveTrace, beta: f64) -> Result<WaveTrace> {
        if self.values.len() != other.values.len()
            || (self.dt - other.dt).abs() > 1e-14 * self.dt
            || (self.t_start - other.t_start).abs() > 1e-12 * self.dt.max(1.0)
        {
            return Err(Error::InvalidArgument("trace grids do not match".into()));
        }
        Ok(WaveTrace {
            t_start: self.t_start,
            dt: self.dt,
            values: self
                .values
                .iter()
                .zip(&other.values)
                .map(|(a, b)| alpha * a + beta * b)
                .collect(),
        })
    }

    pub fn scaled(&self, alpha: f64) -> WaveTrace {
        WaveTrace {
            t_start: self.t_start,
            dt: self.dt,
            values: self.values.iter().map(|v| alpha * v).collect(),
        }
    }

    /// Index range of samples with `t` in `[a, b]`.
    pub fn window_indices(&self, a: f64, b: f64) -> std::ops::Range<usize> {
        let n = self.values.len();
        let lo = ((a - self.t_start) / self.dt).ceil().max(0.0) as usize;
        let hi = (((b - self.t_start) / self.dt).floor() as isize + 1).clamp(0, n as isize) as usize;
        lo.min(n)..hi.max(lo.min(n))
    }

    /// CSV with a `t,value` header, full double precision.
    pub fn write_csv(&self, path: &Path) -> Result<()> {
        let mut out = BufWriter::new(std::fs::File::create(path)?);
        writeln!(out, "t,value")?;
        for (k, v) in self.values.iter().enumerate() {
            writeln!(out, "{:.16e},{:.16e}", self.time(k), v)?;
        }
        Ok(())
    }

    /// Read a `t,value` CSV written by [`WaveTrace::write_csv`].
    pub fn read_csv(path: &Path) -> Result<WaveTrace> {
        let reader = BufReader::new(std::fs::File::open(path)?);
        let mut times = Vec::new();
        let mut values = Vec::new();
        for (lineno, line) in reader.lines().enumerate() {
            let line = line?;
            let line = line.trim();
            if line.is_empty() || (lineno == 0 && line.starts_with('t')) {
                continue;
            }
            let mut parts = line.split(',');
            let (t, v) = match (parts.next(), parts.next()) {
                (Some(t), Some(v)) => (t, v),
                _ => {
                    return Err(Error::Config(format!(
                        "{}:{}: expected `t,value`",
                        path.display(),
                        lineno + 1
                    )))
                }
            };
            let parse = |s: &str| -> Result<f64> {
                s.trim().parse::<f64>().map_err(|e| {
                    Error::Config(format!("{}:{}: {e}", path.display(), lineno + 1))
                })
            };
            times.push(parse(t)?);
            values.push(parse(v)?);
        }
        if times.len() < 2 {
            return Err(Error::Config(format!(
                "{}: need at least 2 samples",
                path.display()
            )));
        }
        let dt = times[1] - times[0];
        for (k, pair) in times.windows(2).enumerate() {
            if ((pair[1] - pair[0]) - dt).abs() > 1e-9 * dt.abs().max(1e-12) {
                return Err(Error::Config(format!(
                    "{}:{}: non-uniform time step",
                    path.display(),
                    k + 2
                )));
            }
        }
        WaveTrace::new(times[0], dt, values)
    }
}
