//! Run configuration, read from TOML.
//!
//! ```toml
//! [system]
//! masses = [1.0, 1.0, 1.0]
//! charges = [1.0, 2.0, -3.0]
//!
//! [domain]
//! mu = 0.6
//! nu = 0.9
//!
//! [quadrature]
//! rel_tol = 1e-10
//! sigma_start_order = 200
//! sigma_max_order = 1600
//!
//! [omega]
//! n_grid = [1000, 3000, 10000, 30000, 100000, 300000, 1000000]
//!
//! [resum]
//! m = 200
//! x = 50.0
//! b1 = -0.31
//! b2 = -0.63
//! steps = 8
//! patch = "c2"
//!
//! [scalprod]
//! delta_chi = 0.05
//! ```
//!
//! Every section and key is optional; missing ones take the defaults above.

use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::accsum::Patch;
use crate::error::{Error, Result};
use crate::kinematics::{DomainSpec, SystemConfig};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct QuadratureConfig {
    /// Relative tolerance of the direct Σ_n and the Poisson integrals.
    pub rel_tol: f64,
    pub sigma_start_order: usize,
    pub sigma_max_order: usize,
}

impl Default for QuadratureConfig {
    fn default() -> Self {
        Self {
            rel_tol: 1e-10,
            sigma_start_order: 200,
            sigma_max_order: 1600,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct OmegaConfig {
    pub n_grid: Vec<u64>,
}

impl Default for OmegaConfig {
    fn default() -> Self {
        Self {
            n_grid: vec![1_000, 3_000, 10_000, 30_000, 100_000, 300_000, 1_000_000],
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum PatchName {
    C2,
    Smooth,
}

impl From<PatchName> for Patch {
    fn from(p: PatchName) -> Self {
        match p {
            PatchName::C2 => Patch::C2,
            PatchName::Smooth => Patch::Smooth,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ResumConfig {
    pub m: usize,
    pub x: f64,
    pub b1: f64,
    pub b2: f64,
    /// Number of points in the R-sweep.
    pub steps: usize,
    pub patch: PatchName,
}

impl Default for ResumConfig {
    fn default() -> Self {
        Self {
            m: 200,
            x: 50.0,
            b1: -0.31,
            b2: -0.63,
            steps: 8,
            patch: PatchName::C2,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ScalprodConfig {
    pub delta_chi: f64,
}

impl Default for ScalprodConfig {
    fn default() -> Self {
        Self { delta_chi: 0.05 }
    }
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunConfig {
    pub system: SystemConfig,
    pub domain: DomainSpec,
    pub quadrature: QuadratureConfig,
    pub omega: OmegaConfig,
    pub resum: ResumConfig,
    pub scalprod: ScalprodConfig,
}

impl RunConfig {
    pub fn from_toml_str(text: &str) -> Result<Self> {
        let cfg: Self = toml::from_str(text).map_err(|e| Error::Config(e.to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::Config(format!("{}: {e}", path.display())))?;
        Self::from_toml_str(&text)
    }

    pub fn to_toml_string(&self) -> String {
        toml::to_string(self).expect("RunConfig serializes")
    }

    pub fn validate(&self) -> Result<()> {
        self.system.validate()?;
        DomainSpec::new(self.domain.mu, self.domain.nu)?;
        let q = &self.quadrature;
        if !(q.rel_tol > 0.0 && q.rel_tol < 1.0) {
            return Err(Error::Config(format!("quadrature.rel_tol = {} outside (0, 1)", q.rel_tol)));
        }
        if q.sigma_start_order == 0 || q.sigma_max_order < q.sigma_start_order {
            return Err(Error::Config("quadrature orders must be positive with sigma_max_order ≥ sigma_start_order".into()));
        }
        if self.omega.n_grid.len() < 4 || self.omega.n_grid.contains(&0) {
            return Err(Error::Config("omega.n_grid needs at least 4 positive entries".into()));
        }
        if self.resum.steps < 2 {
            return Err(Error::Config("resum.steps must be ≥ 2".into()));
        }
        if !(self.scalprod.delta_chi > 0.0) {
            return Err(Error::Config(format!("scalprod.delta_chi = {} must be positive", self.scalprod.delta_chi)));
        }
        Ok(())
    }
}
