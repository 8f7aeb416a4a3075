//! Declarative run configuration.

use std::fmt;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use mobius_core::{GroupId, QuadratureSpec};
use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};

use crate::error::{CliError, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum ScenarioName {
    #[serde(rename = "finite-length")]
    FiniteLength,
    #[serde(rename = "mass-concentration")]
    MassConcentration,
    #[serde(rename = "totally-geodesic")]
    TotallyGeodesic,
    #[serde(rename = "isometry-KxK")]
    IsometryKxK,
    #[serde(rename = "rigid-geodesic")]
    RigidGeodesic,
    #[serde(rename = "fixed-point-algebra")]
    FixedPointAlgebra,
    #[serde(rename = "lowdim-diagrams")]
    LowdimDiagrams,
    #[serde(rename = "corollary7")]
    Corollary7,
}

impl ScenarioName {
    pub const ALL: [ScenarioName; 8] = [
        ScenarioName::FiniteLength,
        ScenarioName::MassConcentration,
        ScenarioName::TotallyGeodesic,
        ScenarioName::IsometryKxK,
        ScenarioName::RigidGeodesic,
        ScenarioName::FixedPointAlgebra,
        ScenarioName::LowdimDiagrams,
        ScenarioName::Corollary7,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            ScenarioName::FiniteLength => "finite-length",
            ScenarioName::MassConcentration => "mass-concentration",
            ScenarioName::TotallyGeodesic => "totally-geodesic",
            ScenarioName::IsometryKxK => "isometry-KxK",
            ScenarioName::RigidGeodesic => "rigid-geodesic",
            ScenarioName::FixedPointAlgebra => "fixed-point-algebra",
            ScenarioName::LowdimDiagrams => "lowdim-diagrams",
            ScenarioName::Corollary7 => "corollary7",
        }
    }

    /// The statement the scenario exercises.
    pub fn theorem(self) -> &'static str {
        match self {
            ScenarioName::FiniteLength => "the one-parameter curve through the hyperbolic direction has finite length",
            ScenarioName::MassConcentration => "the pushed-forward mass concentrates at the identity",
            ScenarioName::TotallyGeodesic => "the five classical inclusions are totally geodesic",
            ScenarioName::IsometryKxK => "K x K acts by isometries",
            ScenarioName::RigidGeodesic => "exp(t diag(X, 0)) is a geodesic of G",
            ScenarioName::FixedPointAlgebra => "the fixed-point algebra of the swap rotations is spanned by (0 I; I 0)",
            ScenarioName::LowdimDiagrams => "the split-quaternion, conformal and projective diagrams commute",
            ScenarioName::Corollary7 => {
                "Sp1 x Sp1 is totally geodesic in Sp(1,1); a geodesic of SO3 x SO3 is one of O0(3,3) iff it stays in a factor"
            }
        }
    }

    pub fn default_group(self) -> Option<GroupId> {
        let g = |s: &str| s.parse().ok();
        match self {
            ScenarioName::FiniteLength => g("SU(1,1)"),
            ScenarioName::MassConcentration => g("U(2)"),
            ScenarioName::IsometryKxK => g("O0(3,3)"),
            ScenarioName::RigidGeodesic => g("Sp(1,1)"),
            ScenarioName::FixedPointAlgebra => g("O0(3,3)"),
            ScenarioName::TotallyGeodesic
            | ScenarioName::LowdimDiagrams
            | ScenarioName::Corollary7 => None,
        }
    }
}

impl fmt::Display for ScenarioName {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for ScenarioName {
    type Err = CliError;

    fn from_str(s: &str) -> Result<Self> {
        ScenarioName::ALL
            .into_iter()
            .find(|n| n.as_str() == s)
            .ok_or_else(|| CliError::config("scenario", format!("unknown scenario `{s}`")))
    }
}

/// Geodesic integration settings.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct IntegratorSpec {
    pub dt: f64,
    pub t_total: f64,
    /// Central-difference step for the Christoffel symbols.
    pub fd_step: f64,
}

impl Default for IntegratorSpec {
    fn default() -> Self {
        IntegratorSpec {
            dt: 0.05,
            t_total: 1.0,
            fd_step: mobius_core::geodesic::FD_STEP,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Config {
    pub scenario: ScenarioName,
    /// Group name such as `SU(1,1)` or `U(2)`; scenarios fall back to a default.
    #[serde(default)]
    pub group: Option<String>,
    #[serde(default)]
    pub quadrature: Option<QuadratureSpec>,
    #[serde(default)]
    pub integrator: IntegratorSpec,
    /// Output directory; defaults to `out/<scenario>`.
    #[serde(default)]
    pub output: Option<PathBuf>,
    #[serde(default)]
    pub seed: u64,
    /// Scenario-specific parameters.
    #[serde(default)]
    pub params: serde_json::Value,
}

fn path_error<E: fmt::Display>(e: serde_path_to_error::Error<E>) -> CliError {
    let key = e.path().to_string();
    CliError::config(
        if key == "." {
            "<root>".to_string()
        } else {
            key
        },
        e.into_inner().to_string(),
    )
}

impl Config {
    pub fn new(scenario: ScenarioName) -> Self {
        Config {
            scenario,
            group: None,
            quadrature: None,
            integrator: IntegratorSpec::default(),
            output: None,
            seed: 0,
            params: serde_json::Value::Null,
        }
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let de = &mut serde_json::Deserializer::from_str(text);
        let cfg: Config = serde_path_to_error::deserialize(de).map_err(path_error)?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|source| CliError::Read {
            path: path.into(),
            source,
        })?;
        Self::from_json(&text)
    }

    pub fn validate(&self) -> Result<()> {
        self.group_id()?;
        let i = &self.integrator;
        if !(i.dt > 0.0 && i.dt.is_finite()) {
            return Err(CliError::config("integrator.dt", "must be positive"));
        }
        if !(i.t_total > 0.0 && i.t_total.is_finite()) {
            return Err(CliError::config("integrator.t_total", "must be positive"));
        }
        if !(i.fd_step > 0.0 && i.fd_step < 0.1) {
            return Err(CliError::config(
                "integrator.fd_step",
                "must lie in (0, 0.1)",
            ));
        }
        if let Some(q) = &self.quadrature {
            if q.mode == mobius_core::QuadratureMode::MonteCarlo && q.samples == 0 {
                return Err(CliError::config("quadrature.samples", "must be positive"));
            }
        }
        Ok(())
    }

    /// The configured group, or the scenario default.
    pub fn group_id(&self) -> Result<Option<GroupId>> {
        match &self.group {
            Some(s) => s
                .parse()
                .map(Some)
                .map_err(|e: mobius_core::Error| CliError::config("group", e.to_string())),
            None => Ok(self.scenario.default_group()),
        }
    }

    pub fn quadrature_or(&self, default: QuadratureSpec) -> QuadratureSpec {
        self.quadrature.unwrap_or(default)
    }

    /// Scenario parameters, with unknown keys rejected.
    pub fn params<P: DeserializeOwned + Default>(&self) -> Result<P> {
        if self.params.is_null() {
            return Ok(P::default());
        }
        serde_path_to_error::deserialize(&self.params).map_err(|e| {
            let key = e.path().to_string();
            let key = if key == "." {
                "params".to_string()
            } else {
                format!("params.{key}")
            };
            CliError::config(key, e.into_inner().to_string())
        })
    }

    pub fn output_dir(&self) -> PathBuf {
        self.output
            .clone()
            .unwrap_or_else(|| PathBuf::from("out").join(self.scenario.as_str()))
    }
}
