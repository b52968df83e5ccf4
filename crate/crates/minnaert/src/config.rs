//! JSON run configuration: a versioned, self-describing record of one batch
//! scenario. Parsing reports line-anchored messages; semantic validation
//! names the offending field.

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::oracle::RadialConfig;
use crate::resonance::MediumParams;
use crate::sources::{QuadratureSpec, SourceSpec};

pub const SCHEMA_VERSION: u32 = 1;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Scenario {
    Capacitance,
    Resonance,
    Simulate,
    Oracle,
    Sweep,
    Features,
    Invert,
}

impl Scenario {
    pub fn name(&self) -> &'static str {
        match self {
            Scenario::Capacitance => "capacitance",
            Scenario::Resonance => "resonance",
            Scenario::Simulate => "simulate",
            Scenario::Oracle => "oracle",
            Scenario::Sweep => "sweep",
            Scenario::Features => "features",
            Scenario::Invert => "invert",
        }
    }

    pub fn parse(name: &str) -> Result<Self> {
        Ok(match name {
            "capacitance" => Scenario::Capacitance,
            "resonance" => Scenario::Resonance,
            "simulate" => Scenario::Simulate,
            "oracle" => Scenario::Oracle,
            "sweep" => Scenario::Sweep,
            "features" => Scenario::Features,
            "invert" => Scenario::Invert,
            other => {
                return Err(Error::Config(format!(
                    "unknown scenario `{other}` (expected capacitance, resonance, simulate, oracle, sweep, features or invert)"
                )))
            }
        })
    }
}

/// Surface to run the boundary-integral scenarios on.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum GeometryConfig {
    Sphere { radius: f64, level: u32 },
    Mesh { path: PathBuf },
}

#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct TimeGridConfig {
    pub dt: f64,
    pub t_end: f64,
}

/// Grid and run controls of the radial full-wave oracle.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct OracleConfig {
    pub r_max: f64,
    /// Radial cells across the bubble radius (the interface lands on a face).
    pub cells_per_bubble: usize,
    #[serde(default = "default_cfl")]
    pub cfl: f64,
    pub t_end: f64,
    /// Receiver radii.
    pub receivers: Vec<f64>,
    #[serde(default = "default_true")]
    pub bubble_enabled: bool,
}

fn default_cfl() -> f64 {
    0.9
}

fn default_true() -> bool {
    true
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SweepConfig {
    pub eps: Vec<f64>,
    /// Validity-window constant T; each run uses `t_end = T / ε`.
    pub horizon: f64,
    pub cells_per_bubble: Vec<usize>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct FeaturesConfig {
    /// Trace CSV (columns `t,value`) to analyze.
    pub trace: PathBuf,
    /// Analysis window `[start, end]`; defaults to the whole trace.
    #[serde(default)]
    pub window: Option<[f64; 2]>,
    #[serde(default = "default_threshold")]
    pub threshold: f64,
}

fn default_threshold() -> f64 {
    0.01
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct InvertConfig {
    pub c_omega: f64,
    pub volume: f64,
    pub k1: f64,
    /// Source–receiver distance matching the analyzed birth time.
    pub distance: f64,
    /// Time origin of the drive at the bubble center; subtracted from the
    /// detected birth before the travel-time inversion.
    #[serde(default)]
    pub reference_time: f64,
}

/// One batch run: scenario name plus the blocks it needs.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct RunConfig {
    pub schema_version: u32,
    pub scenario: Scenario,
    #[serde(default)]
    pub seed: u64,
    /// Worker-pool size for sweep fan-out; defaults to the rayon global.
    #[serde(default)]
    pub jobs: Option<usize>,
    #[serde(default)]
    pub geometry: Option<GeometryConfig>,
    #[serde(default)]
    pub medium: Option<MediumParams>,
    #[serde(default)]
    pub source: Option<SourceSpec>,
    #[serde(default)]
    pub quadrature: Option<QuadratureSpec>,
    #[serde(default)]
    pub time_grid: Option<TimeGridConfig>,
    /// Receiver positions for `simulate`.
    #[serde(default)]
    pub receivers: Option<Vec<[f64; 3]>>,
    #[serde(default)]
    pub oracle: Option<OracleConfig>,
    #[serde(default)]
    pub sweep: Option<SweepConfig>,
    #[serde(default)]
    pub features: Option<FeaturesConfig>,
    #[serde(default)]
    pub invert: Option<InvertConfig>,
}

impl RunConfig {
    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::Config(format!("{}: {e}", path.display())))?;
        let config: RunConfig = serde_json::from_str(&text).map_err(|e| {
            Error::Config(format!("{}:{}:{}: {e}", path.display(), e.line(), e.column()))
        })?;
        config.validate(path.parent().unwrap_or(Path::new(".")))?;
        Ok(config)
    }

    /// Semantic validation; `base_dir` anchors relative file references.
    pub fn validate(&self, base_dir: &Path) -> Result<()> {
        if self.schema_version != SCHEMA_VERSION {
            return Err(Error::Config(format!(
                "schema_version: expected {SCHEMA_VERSION}, got {}",
                self.schema_version
            )));
        }
        if let Some(GeometryConfig::Sphere { radius, level }) = &self.geometry {
            if !(*radius > 0.0) {
                return Err(Error::Config(format!(
                    "geometry.radius: must be positive, got {radius}"
                )));
            }
            if *level > 6 {
                return Err(Error::Config(format!(
                    "geometry.level: {level} exceeds the supported range 0..=6"
                )));
            }
        }
        if let Some(GeometryConfig::Mesh { path }) = &self.geometry {
            if !self.resolve(base_dir, path).exists() {
                return Err(Error::Config(format!(
                    "geometry.path: {} does not exist",
                    path.display()
                )));
            }
        }
        if let Some(m) = &self.medium {
            m.validated().map_err(|e| Error::Config(format!("medium: {e}")))?;
        }
        if let Some(s) = &self.source {
            s.validated().map_err(|e| Error::Config(format!("source: {e}")))?;
        }
        if let Some(q) = &self.quadrature {
            q.validated().map_err(|e| Error::Config(format!("quadrature: {e}")))?;
        }
        if let Some(t) = &self.time_grid {
            if !(t.dt > 0.0) || !(t.t_end > t.dt) {
                return Err(Error::Config(format!(
                    "time_grid: needs dt > 0 and t_end > dt, got dt = {}, t_end = {}",
                    t.dt, t.t_end
                )));
            }
        }
        if let Some(f) = &self.features {
            if !self.resolve(base_dir, &f.trace).exists() {
                return Err(Error::Config(format!(
                    "features.trace: {} does not exist",
                    f.trace.display()
                )));
            }
            if !(f.threshold > 0.0 && f.threshold < 1.0) {
                return Err(Error::Config(format!(
                    "features.threshold: must lie in (0, 1), got {}",
                    f.threshold
                )));
            }
        }
        if let Some(sw) = &self.sweep {
            if sw.eps.iter().any(|e| !(*e > 0.0)) {
                return Err(Error::Config("sweep.eps: entries must be positive".into()));
            }
            if sw.cells_per_bubble.len() != sw.eps.len() {
                return Err(Error::Config(
                    "sweep.cells_per_bubble: needs one entry per eps".into(),
                ));
            }
        }
        self.required_blocks().map_err(|e| match e {
            Error::Config(msg) => Error::Config(format!("scenario {}: {msg}", self.scenario.name())),
            other => other,
        })
    }

    pub fn resolve(&self, base_dir: &Path, p: &Path) -> PathBuf {
        if p.is_absolute() {
            p.to_path_buf()
        } else {
            base_dir.join(p)
        }
    }

    fn required_blocks(&self) -> Result<()> {
        let need = |ok: bool, what: &str| -> Result<()> {
            if ok {
                Ok(())
            } else {
                Err(Error::Config(format!("missing required block `{what}`")))
            }
        };
        match self.scenario {
            Scenario::Capacitance => need(self.geometry.is_some(), "geometry"),
            Scenario::Resonance => {
                need(self.geometry.is_some(), "geometry")?;
                need(self.medium.is_some(), "medium")
            }
            Scenario::Simulate => {
                need(self.geometry.is_some(), "geometry")?;
                need(self.medium.is_some(), "medium")?;
                need(self.source.is_some(), "source")?;
                need(self.time_grid.is_some(), "time_grid")?;
                need(
                    self.receivers.as_ref().is_some_and(|r| !r.is_empty()),
                    "receivers",
                )
            }
            Scenario::Oracle => {
                need(self.medium.is_some(), "medium")?;
                need(self.source.is_some(), "source")?;
                need(self.oracle.is_some(), "oracle")
            }
            Scenario::Sweep => {
                need(self.medium.is_some(), "medium")?;
                need(self.source.is_some(), "source")?;
                need(self.oracle.is_some(), "oracle")?;
                need(self.sweep.is_some(), "sweep")
            }
            Scenario::Features => need(self.features.is_some(), "features"),
            Scenario::Invert => {
                need(self.features.is_some(), "features")?;
                need(self.invert.is_some(), "invert")
            }
        }
    }

    /// Assemble the radial solver configuration (oracle/sweep scenarios).
    pub fn radial_config(&self) -> Result<RadialConfig> {
        let medium = self.medium.ok_or_else(|| Error::Config("missing medium".into()))?;
        let source = self.source.ok_or_else(|| Error::Config("missing source".into()))?;
        let oracle = self
            .oracle
            .as_ref()
            .ok_or_else(|| Error::Config("missing oracle block".into()))?;
        let config = RadialConfig {
            medium,
            source,
            r_max: oracle.r_max,
            nr: 0,
            cfl: oracle.cfl,
            t_end: oracle.t_end,
            receivers: oracle.receivers.clone(),
            bubble_enabled: oracle.bubble_enabled,
        }
        .with_bubble_cells(oracle.cells_per_bubble);
        Ok(config)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn write_config(json: &str) -> PathBuf {
        let dir = std::env::temp_dir().join(format!("minnaert_cfg_{}", std::process::id()));
        std::fs::create_dir_all(&dir).unwrap();
        let path = dir.join(format!("c{}.json", json.len()));
        std::fs::write(&path, json).unwrap();
        path
    }

    #[test]
    fn loads_a_minimal_capacitance_config() {
        let path = write_config(
            r#"{
                "schema_version": 1,
                "scenario": "capacitance",
                "geometry": {"kind": "sphere", "radius": 1.0, "level": 3}
            }"#,
        );
        let config = RunConfig::load(&path).unwrap();
        assert_eq!(config.scenario, Scenario::Capacitance);
    }

    #[test]
    fn rejects_wrong_schema_version() {
        let path = write_config(
            r#"{"schema_version": 2, "scenario": "capacitance",
                "geometry": {"kind": "sphere", "radius": 1.0, "level": 1}}"#,
        );
        let err = RunConfig::load(&path).unwrap_err();
        assert!(matches!(err, Error::Config(_)));
        assert!(err.to_string().contains("schema_version"));
    }

    #[test]
    fn parse_errors_carry_line_numbers() {
        let path = write_config("{\n  \"schema_version\": 1,\n  oops\n}");
        let err = RunConfig::load(&path).unwrap_err();
        let msg = err.to_string();
        assert!(msg.contains(":3:"), "message should be line-anchored: {msg}");
    }

    #[test]
    fn rejects_negative_eps_with_field_anchor() {
        let path = write_config(
            r#"{
                "schema_version": 1,
                "scenario": "resonance",
                "geometry": {"kind": "sphere", "radius": 1.0, "level": 1},
                "medium": {"rho0": 1.0, "k0": 1.0, "rho1": 1.0, "k1": 1.0,
                           "eps": -0.01, "y0": [0.0, 0.0, 0.0]}
            }"#,
        );
        let err = RunConfig::load(&path).unwrap_err();
        assert!(err.to_string().contains("medium"), "got: {err}");
        assert_eq!(err.exit_code(), 2);
    }

    #[test]
    fn missing_blocks_are_named() {
        let path = write_config(r#"{"schema_version": 1, "scenario": "simulate"}"#);
        let err = RunConfig::load(&path).unwrap_err();
        assert!(err.to_string().contains("geometry"), "got: {err}");
    }

    #[test]
    fn missing_mesh_file_is_a_config_error() {
        let path = write_config(
            r#"{"schema_version": 1, "scenario": "capacitance",
                "geometry": {"kind": "mesh", "path": "nope.off"}}"#,
        );
        assert!(RunConfig::load(&path).is_err());
    }

    #[test]
    fn scenario_names_round_trip() {
        for s in [
            Scenario::Capacitance,
            Scenario::Resonance,
            Scenario::Simulate,
            Scenario::Oracle,
            Scenario::Sweep,
            Scenario::Features,
            Scenario::Invert,
        ] {
            assert_eq!(Scenario::parse(s.name()).unwrap(), s);
        }
        assert!(Scenario::parse("bogus").is_err());
    }
}
