use std::path::Path;

use anyhow::{bail, Context, Result};
use c60::continuation::ShootingOptions;
use c60::equilibrium::MinimizerOptions;
use c60::forcefield::ForceFieldParams;
use c60::representation::SpectrumOptions;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Tolerances {
    /// Minimizer stop, ‖∇V‖∞ in eV/Å.
    pub min_grad: f64,
    /// Relative eigenvalue gap that splits clusters.
    pub eig_cluster_gap: f64,
    pub newton_tol: f64,
    /// rtol = atol of the integrator.
    pub ode_tol: f64,
    /// Critical numbers closer than this count as resonant.
    pub resonance_gap: f64,
    pub symmetry_tol: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Tolerances { min_grad: 1e-10, eig_cluster_gap: 1e-6, newton_tol: 1e-11, ode_tol: 1e-12, resonance_gap: 1e-5, symmetry_tol: 1e-6 }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ContinuationConfig {
    /// Seed amplitude in Å.
    pub amplitude: f64,
    pub ds: f64,
    pub steps: usize,
    /// Steps for each extra family in reproduce-paper.
    pub family_steps: usize,
    /// Time samples per period in trajectory exports.
    pub samples: usize,
}

impl Default for ContinuationConfig {
    fn default() -> Self {
        ContinuationConfig { amplitude: 0.01, ds: 1e-3, steps: 20, family_steps: 2, samples: 64 }
    }
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunConfig {
    pub forcefield: ForceFieldParams,
    pub tolerances: Tolerances,
    pub continuation: ContinuationConfig,
}

impl RunConfig {
    pub fn load(path: Option<&Path>, vdw: bool) -> Result<RunConfig> {
        let mut cfg = match path {
            Some(p) => {
                let text = std::fs::read_to_string(p).with_context(|| format!("reading {}", p.display()))?;
                toml::from_str(&text).with_context(|| format!("parsing {}", p.display()))?
            }
            None => RunConfig::default(),
        };
        if vdw {
            cfg.forcefield.vdw_enabled = true;
        }
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<()> {
        let t = &self.tolerances;
        for (name, v) in [
            ("min_grad", t.min_grad),
            ("eig_cluster_gap", t.eig_cluster_gap),
            ("newton_tol", t.newton_tol),
            ("ode_tol", t.ode_tol),
            ("resonance_gap", t.resonance_gap),
            ("symmetry_tol", t.symmetry_tol),
            ("amplitude", self.continuation.amplitude),
        ] {
            if !(v > 0.0 && v.is_finite()) {
                bail!("{name} must be positive, got {v}");
            }
        }
        if self.continuation.ds == 0.0 || !self.continuation.ds.is_finite() {
            bail!("ds must be nonzero");
        }
        if self.continuation.samples < 2 {
            bail!("samples must be at least 2");
        }
        self.forcefield.validate()?;
        Ok(())
    }

    /// SHA-256 of the canonical JSON form of the effective configuration.
    pub fn hash(&self) -> String {
        let json = serde_json::to_string(self).expect("config serializes");
        let digest = Sha256::digest(json.as_bytes());
        digest.iter().map(|b| format!("{b:02x}")).collect()
    }

    pub fn minimizer(&self) -> MinimizerOptions {
        MinimizerOptions { grad_tol: self.tolerances.min_grad, ..MinimizerOptions::default() }
    }

    pub fn spectrum(&self) -> SpectrumOptions {
        SpectrumOptions { cluster_gap: self.tolerances.eig_cluster_gap, ..SpectrumOptions::default() }
    }

    pub fn shooting(&self) -> ShootingOptions {
        let t = &self.tolerances;
        ShootingOptions { tol: t.newton_tol, ode_rtol: t.ode_tol, ode_atol: t.ode_tol, ..ShootingOptions::default() }
    }
}
