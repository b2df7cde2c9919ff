//! Run configuration: JSON schema, validation, and conversion to domain types.
//!
//! A run is described by one JSON document. Angles and pressures in the
//! document are expressed in the units declared by its `units` block
//! (defaulting to radians and pascals) and converted to SI exactly once,
//! when domain objects are built; everything downstream computes in SI.
//! Lengths, times, masses, and stiffnesses are always SI.
//!
//! Sections are optional at the schema level and demanded per scenario at
//! validation time, so a config never needs to carry unused blocks. Missing
//! values with conventional defaults (solver tolerances 1e−6/1e−6, pressure
//! ceiling 10 psi, thin-ring payload inertia) are filled when the domain
//! objects are constructed — the parsed document itself is left untouched,
//! which keeps the write→parse round trip an identity.

use crate::control::{
    ChainedTrajectory, CubicTrajectory, PidGains, Reference, StepSchedule, Waypoint,
};
use crate::dynamics::{BodyParams, Loads, Plant, State};
use crate::geometry::{ElastomerParams, Geometry};
use crate::linear::SweptGain;
use crate::ode::{Options, Tolerances};
use crate::units;
use serde::{Deserialize, Serialize};
use std::path::Path;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum ConfigError {
    #[error("cannot read {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
    #[error("cannot write {path}: {source}")]
    WriteIo {
        path: String,
        #[source]
        source: std::io::Error,
    },
    #[error("parse error in {path}: {message}")]
    Parse { path: String, message: String },
    #[error("invalid config: {0}")]
    Validation(String),
}

/// Which computation a config drives.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Scenario {
    ConstantPressure,
    PidStep,
    Trajectory,
    RootLocus,
    Identify,
    MaterialUtil,
}

impl Scenario {
    pub fn name(&self) -> &'static str {
        match self {
            Scenario::ConstantPressure => "constant_pressure",
            Scenario::PidStep => "pid_step",
            Scenario::Trajectory => "trajectory",
            Scenario::RootLocus => "root_locus",
            Scenario::Identify => "identify",
            Scenario::MaterialUtil => "material_util",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "lowercase")]
pub enum AngleUnit {
    #[default]
    Rad,
    Deg,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "lowercase")]
pub enum PressureUnit {
    #[default]
    Pa,
    Psi,
}

/// Units the config document's angle and pressure values are written in.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(deny_unknown_fields)]
pub struct Units {
    #[serde(default)]
    pub angle: AngleUnit,
    #[serde(default)]
    pub pressure: PressureUnit,
}

impl Units {
    pub fn angle_to_rad(&self, value: f64) -> f64 {
        match self.angle {
            AngleUnit::Rad => value,
            AngleUnit::Deg => units::deg_to_rad(value),
        }
    }

    pub fn rad_to_angle(&self, value: f64) -> f64 {
        match self.angle {
            AngleUnit::Rad => value,
            AngleUnit::Deg => units::rad_to_deg(value),
        }
    }

    pub fn pressure_to_pa(&self, value: f64) -> f64 {
        match self.pressure {
            PressureUnit::Pa => value,
            PressureUnit::Psi => units::psi_to_pa(value),
        }
    }

    pub fn pa_to_pressure(&self, value: f64) -> f64 {
        match self.pressure {
            PressureUnit::Pa => value,
            PressureUnit::Psi => units::pa_to_psi(value),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GeometryConfig {
    /// Undeformed fiber winding angle, in the document's angle unit.
    pub winding_angle: f64,
    pub length_m: f64,
    pub radius_m: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BodyConfig {
    pub mass_kg: f64,
    /// Defaults to the thin-ring value m·R² when omitted.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub inertia_kg_m2: Option<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ElastomerConfig {
    pub k_e: f64,
    pub k_t: f64,
    #[serde(default)]
    pub c_e: f64,
    #[serde(default)]
    pub c_t: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize, Default)]
#[serde(deny_unknown_fields)]
pub struct LoadsConfig {
    #[serde(default)]
    pub axial_n: f64,
    #[serde(default)]
    pub torque_nm: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ControllerConfig {
    #[serde(default)]
    pub k_p: f64,
    #[serde(default)]
    pub k_i: f64,
    #[serde(default)]
    pub k_d: f64,
    /// Supply ceiling in the document's pressure unit; 10 psi when omitted.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub p_max: Option<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct StepSegmentConfig {
    /// Setpoint in the document's angle unit.
    pub setpoint: f64,
    pub duration_s: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct WaypointConfig {
    /// Target rotation in the document's angle unit.
    pub target: f64,
    pub move_duration_s: f64,
    #[serde(default)]
    pub dwell_s: f64,
}

/// Rotation reference, angles in the document's angle unit.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum ReferenceConfig {
    Constant {
        setpoint: f64,
    },
    Steps {
        segments: Vec<StepSegmentConfig>,
    },
    Cubic {
        start: f64,
        target: f64,
        duration_s: f64,
    },
    Chained {
        #[serde(default)]
        start: f64,
        waypoints: Vec<WaypointConfig>,
    },
}

fn default_rel_tol() -> f64 {
    1e-6
}

fn default_abs_tol() -> f64 {
    1e-6
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SolverConfig {
    #[serde(default = "default_rel_tol")]
    pub rel_tol: f64,
    #[serde(default = "default_abs_tol")]
    pub abs_tol: f64,
}

impl Default for SolverConfig {
    fn default() -> Self {
        Self {
            rel_tol: default_rel_tol(),
            abs_tol: default_abs_tol(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SweptGainConfig {
    Proportional,
    Integral,
    Derivative,
}

impl From<SweptGainConfig> for SweptGain {
    fn from(value: SweptGainConfig) -> Self {
        match value {
            SweptGainConfig::Proportional => SweptGain::Proportional,
            SweptGainConfig::Integral => SweptGain::Integral,
            SweptGainConfig::Derivative => SweptGain::Derivative,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LocusConfig {
    pub swept: SweptGainConfig,
    /// Center of the default two-decades-each-way sweep grid.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub gain_ref: Option<f64>,
    /// Explicit sweep grid; overrides `gain_ref` when present.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub gains: Option<Vec<f64>>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct IdentifyConfig {
    /// CSV of static samples with header `P_pa,s_m,phi_rad,F_N,M_Nm`.
    pub samples_csv: String,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ThinWallConfig {
    /// In the document's pressure unit.
    pub pressure: f64,
    pub radius_m: f64,
    pub thickness_m: f64,
    pub modulus_pa: f64,
    pub poisson: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OgdenConfig {
    pub mu: f64,
    pub alpha: f64,
    /// Stretch triples (λ1, λ2, λ3) to evaluate the energy at.
    pub stretches: Vec<[f64; 3]>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MaterialConfig {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub thin_wall: Option<ThinWallConfig>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub ogden: Option<OgdenConfig>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize, Default)]
#[serde(deny_unknown_fields)]
pub struct InitialStateConfig {
    #[serde(default)]
    pub s_m: f64,
    /// Initial rotation in radians (state values are always SI).
    #[serde(default)]
    pub phi_rad: f64,
    #[serde(default)]
    pub s_dot: f64,
    #[serde(default)]
    pub phi_dot: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutputConfig {
    /// File-name prefix for emitted artifacts.
    pub prefix: String,
}

/// One complete run description.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub scenario: Scenario,
    #[serde(default)]
    pub units: Units,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub geometry: Option<GeometryConfig>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub body: Option<BodyConfig>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub elastomer: Option<ElastomerConfig>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub loads: Option<LoadsConfig>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub controller: Option<ControllerConfig>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub reference: Option<ReferenceConfig>,
    /// Constant supply pressure in the document's pressure unit
    /// (constant-pressure scenario).
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub pressure: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub t_end_s: Option<f64>,
    #[serde(default)]
    pub solver: SolverConfig,
    /// Output rows for resampled time series (default 2001).
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub samples: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub initial: Option<InitialStateConfig>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub locus: Option<LocusConfig>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub identify: Option<IdentifyConfig>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub material: Option<MaterialConfig>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub output: Option<OutputConfig>,
}

/// Parse and validate a config file.
pub fn parse_config(path: &Path) -> Result<RunConfig, ConfigError> {
    let text = std::fs::read_to_string(path).map_err(|source| ConfigError::Io {
        path: path.display().to_string(),
        source,
    })?;
    let config: RunConfig = serde_json::from_str(&text).map_err(|e| ConfigError::Parse {
        path: path.display().to_string(),
        message: format!("line {}, column {}: {e}", e.line(), e.column()),
    })?;
    config.validate()?;
    Ok(config)
}

/// Serialize a config to pretty JSON at `path`.
pub fn write_config(config: &RunConfig, path: &Path) -> Result<(), ConfigError> {
    let text = serde_json::to_string_pretty(config).map_err(|e| ConfigError::Parse {
        path: path.display().to_string(),
        message: e.to_string(),
    })?;
    std::fs::write(path, text + "\n").map_err(|source| ConfigError::WriteIo {
        path: path.display().to_string(),
        source,
    })
}

impl RunConfig {
    /// Check scenario-required sections and value-level invariants.
    pub fn validate(&self) -> Result<(), ConfigError> {
        use Scenario::*;
        let need = |present: bool, section: &str| -> Result<(), ConfigError> {
            if present {
                Ok(())
            } else {
                Err(ConfigError::Validation(format!(
                    "scenario {} requires section '{section}'",
                    self.scenario.name()
                )))
            }
        };
        match self.scenario {
            ConstantPressure => {
                need(self.geometry.is_some(), "geometry")?;
                need(self.elastomer.is_some(), "elastomer")?;
                need(self.body.is_some(), "body")?;
                need(self.pressure.is_some(), "pressure")?;
                need(self.t_end_s.is_some(), "t_end_s")?;
            }
            PidStep | Trajectory => {
                need(self.geometry.is_some(), "geometry")?;
                need(self.elastomer.is_some(), "elastomer")?;
                need(self.body.is_some(), "body")?;
                need(self.controller.is_some(), "controller")?;
                need(self.reference.is_some(), "reference")?;
                need(self.t_end_s.is_some(), "t_end_s")?;
                let kind_ok = match (self.scenario, self.reference.as_ref()) {
                    (PidStep, Some(ReferenceConfig::Constant { .. }))
                    | (PidStep, Some(ReferenceConfig::Steps { .. }))
                    | (Trajectory, Some(ReferenceConfig::Cubic { .. }))
                    | (Trajectory, Some(ReferenceConfig::Chained { .. })) => true,
                    (_, None) => true, // unreachable: demanded above
                    _ => false,
                };
                if !kind_ok {
                    return Err(ConfigError::Validation(format!(
                        "scenario {} needs a {} reference",
                        self.scenario.name(),
                        if self.scenario == PidStep {
                            "constant or steps"
                        } else {
                            "cubic or chained"
                        }
                    )));
                }
            }
            RootLocus => {
                need(self.geometry.is_some(), "geometry")?;
                need(self.elastomer.is_some(), "elastomer")?;
                need(self.body.is_some(), "body")?;
                need(self.controller.is_some(), "controller")?;
                need(self.locus.is_some(), "locus")?;
                let locus = self.locus.as_ref().unwrap();
                if locus.gain_ref.is_none() && locus.gains.is_none() {
                    return Err(ConfigError::Validation(
                        "locus needs either 'gain_ref' or an explicit 'gains' grid".into(),
                    ));
                }
            }
            Identify => {
                need(self.geometry.is_some(), "geometry")?;
                need(self.identify.is_some(), "identify")?;
            }
            MaterialUtil => {
                need(self.material.is_some(), "material")?;
                let material = self.material.as_ref().unwrap();
                if material.thin_wall.is_none() && material.ogden.is_none() {
                    return Err(ConfigError::Validation(
                        "material needs at least one of 'thin_wall' or 'ogden'".into(),
                    ));
                }
            }
        }

        // Value-level checks for whichever sections are present.
        if let Some(g) = &self.geometry {
            self.build_geometry(g)?;
        }
        if let Some(e) = &self.elastomer {
            ElastomerParams::new(e.k_e, e.k_t, e.c_e, e.c_t)
                .map_err(|err| ConfigError::Validation(err.to_string()))?;
        }
        if let (Some(b), Some(_)) = (&self.body, &self.geometry) {
            self.build_body(b)?;
        }
        if let Some(c) = &self.controller {
            self.build_gains(c)?;
        }
        if let Some(r) = &self.reference {
            self.build_reference(r)?;
        }
        if let Some(p) = self.pressure {
            let pa = self.units.pressure_to_pa(p);
            if !(pa.is_finite() && pa >= 0.0) {
                return Err(ConfigError::Validation(format!(
                    "pressure must be non-negative and finite, got {p}"
                )));
            }
        }
        if let Some(t) = self.t_end_s {
            if !(t.is_finite() && t > 0.0) {
                return Err(ConfigError::Validation(format!(
                    "t_end_s must be positive and finite, got {t}"
                )));
            }
        }
        if !(self.solver.rel_tol > 0.0 && self.solver.abs_tol > 0.0) {
            return Err(ConfigError::Validation(format!(
                "solver tolerances must be positive, got rel {} abs {}",
                self.solver.rel_tol, self.solver.abs_tol
            )));
        }
        if let Some(n) = self.samples {
            if n < 2 {
                return Err(ConfigError::Validation(format!(
                    "samples must be at least 2, got {n}"
                )));
            }
        }
        if let Some(locus) = &self.locus {
            if let Some(k) = locus.gain_ref {
                if !(k.is_finite() && k > 0.0) {
                    return Err(ConfigError::Validation(format!(
                        "locus gain_ref must be positive, got {k}"
                    )));
                }
            }
            if let Some(gains) = &locus.gains {
                if gains.is_empty() {
                    return Err(ConfigError::Validation("locus gains grid is empty".into()));
                }
                if gains.iter().any(|k| !(k.is_finite() && *k >= 0.0)) {
                    return Err(ConfigError::Validation(
                        "locus gains must be finite and non-negative".into(),
                    ));
                }
            }
        }
        if let Some(material) = &self.material {
            if let Some(tw) = &material.thin_wall {
                if !(tw.thickness_m > 0.0 && tw.modulus_pa > 0.0) {
                    return Err(ConfigError::Validation(
                        "thin_wall thickness and modulus must be positive".into(),
                    ));
                }
            }
            if let Some(og) = &material.ogden {
                if og.alpha == 0.0 {
                    return Err(ConfigError::Validation(
                        "ogden alpha must be nonzero".into(),
                    ));
                }
            }
        }
        Ok(())
    }

    fn build_geometry(&self, g: &GeometryConfig) -> Result<Geometry, ConfigError> {
        Geometry::new(
            self.units.angle_to_rad(g.winding_angle),
            g.length_m,
            g.radius_m,
        )
        .map_err(|err| ConfigError::Validation(err.to_string()))
    }

    fn build_body(&self, b: &BodyConfig) -> Result<BodyParams, ConfigError> {
        let built = match b.inertia_kg_m2 {
            Some(i) => BodyParams::new(b.mass_kg, i),
            None => {
                let g = self.geometry.as_ref().ok_or_else(|| {
                    ConfigError::Validation(
                        "body inertia defaults to the thin-ring value and needs geometry".into(),
                    )
                })?;
                BodyParams::thin_ring(b.mass_kg, g.radius_m)
            }
        };
        built.map_err(|err| ConfigError::Validation(err.to_string()))
    }

    fn build_gains(&self, c: &ControllerConfig) -> Result<PidGains, ConfigError> {
        let built = match c.p_max {
            Some(p) => PidGains::new(c.k_p, c.k_i, c.k_d, self.units.pressure_to_pa(p)),
            None => PidGains::with_default_ceiling(c.k_p, c.k_i, c.k_d),
        };
        built.map_err(|err| ConfigError::Validation(err.to_string()))
    }

    fn build_reference(&self, r: &ReferenceConfig) -> Result<Reference, ConfigError> {
        let to_rad = |v: f64| self.units.angle_to_rad(v);
        let built = match r {
            ReferenceConfig::Constant { setpoint } => Ok(Reference::Constant(to_rad(*setpoint))),
            ReferenceConfig::Steps { segments } => StepSchedule::new(
                segments
                    .iter()
                    .map(|s| (to_rad(s.setpoint), s.duration_s))
                    .collect(),
            )
            .map(Reference::Steps),
            ReferenceConfig::Cubic {
                start,
                target,
                duration_s,
            } => CubicTrajectory::new(to_rad(*start), to_rad(*target), *duration_s)
                .map(Reference::Cubic),
            ReferenceConfig::Chained { start, waypoints } => {
                let wps: Vec<Waypoint> = waypoints
                    .iter()
                    .map(|w| Waypoint {
                        target_rad: to_rad(w.target),
                        move_duration_s: w.move_duration_s,
                        dwell_s: w.dwell_s,
                    })
                    .collect();
                ChainedTrajectory::new(to_rad(*start), &wps).map(Reference::Chained)
            }
        };
        built.map_err(|err| ConfigError::Validation(err.to_string()))
    }

    /// Geometry in SI (requires the section).
    pub fn geometry(&self) -> Result<Geometry, ConfigError> {
        let g = self
            .geometry
            .as_ref()
            .ok_or_else(|| ConfigError::Validation("missing section 'geometry'".into()))?;
        self.build_geometry(g)
    }

    /// Full plant in SI (requires geometry, elastomer, and body sections).
    pub fn plant(&self) -> Result<Plant, ConfigError> {
        let geometry = self.geometry()?;
        let e = self
            .elastomer
            .as_ref()
            .ok_or_else(|| ConfigError::Validation("missing section 'elastomer'".into()))?;
        let elastomer = ElastomerParams::new(e.k_e, e.k_t, e.c_e, e.c_t)
            .map_err(|err| ConfigError::Validation(err.to_string()))?;
        let b = self
            .body
            .as_ref()
            .ok_or_else(|| ConfigError::Validation("missing section 'body'".into()))?;
        let body = self.build_body(b)?;
        let loads = self
            .loads
            .map(|l| Loads {
                axial_n: l.axial_n,
                torque_nm: l.torque_nm,
            })
            .unwrap_or_default();
        Ok(Plant {
            geometry,
            elastomer,
            body,
            loads,
        })
    }

    /// PID gains in SI (requires the controller section).
    pub fn gains(&self) -> Result<PidGains, ConfigError> {
        let c = self
            .controller
            .as_ref()
            .ok_or_else(|| ConfigError::Validation("missing section 'controller'".into()))?;
        self.build_gains(c)
    }

    /// Rotation reference in SI (requires the reference section).
    pub fn reference(&self) -> Result<Reference, ConfigError> {
        let r = self
            .reference
            .as_ref()
            .ok_or_else(|| ConfigError::Validation("missing section 'reference'".into()))?;
        self.build_reference(r)
    }

    /// Constant supply pressure in Pa (requires the pressure field).
    pub fn pressure_pa(&self) -> Result<f64, ConfigError> {
        self.pressure
            .map(|p| self.units.pressure_to_pa(p))
            .ok_or_else(|| ConfigError::Validation("missing field 'pressure'".into()))
    }

    pub fn solver_options(&self) -> Options {
        Options {
            tol: Tolerances::new(self.solver.rel_tol, self.solver.abs_tol),
            ..Options::default()
        }
    }

    pub fn initial_state(&self) -> State {
        self.initial
            .map(|i| State {
                s_m: i.s_m,
                phi_rad: i.phi_rad,
                s_dot: i.s_dot,
                phi_dot: i.phi_dot,
                err_int: 0.0,
            })
            .unwrap_or_default()
    }

    pub fn sample_count(&self) -> usize {
        self.samples.unwrap_or(2001)
    }

    /// Artifact file-name prefix (defaults to the scenario name).
    pub fn output_prefix(&self) -> &str {
        self.output
            .as_ref()
            .map_or(self.scenario.name(), |o| o.prefix.as_str())
    }
}
