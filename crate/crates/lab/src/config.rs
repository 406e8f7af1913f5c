//! TOML run configuration.

use std::path::{Path, PathBuf};

use magdirac_core::exponents::{admissible, AdmissiblePair};
use magdirac_core::params::ConstructionParams;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::error::{LabError, Result};
use crate::grid::GridSpec2D;
use crate::landau::SolveOptions;
use crate::scaling::{GridPolicy, LadderOptions};

/// The reference campaign.
pub const REFERENCE: &str = r#"[construction]
delta = 1.5
gamma = 0.8
beta = 0.75
r = 8.0
r_list = [8.0, 12.0, 16.0, 24.0, 32.0, 48.0, 64.0]

[pair]
p = 4.0
q = 4.0

[grid]
half_width = 8.0
n = 96
modes = 6
padding = 2.0
n_rho = 256
n_z = 256

[campaign]
free_control = true
term_diagnostics = true
halving_r = 16.0

[evolve]
n_xy = 128
n_z = 64
checkpoints = 8
write_final = false

[tolerance]
eigen = 1e-8
boundary = 1e-10
"#;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub construction: Construction,
    pub pair: Pair,
    #[serde(default)]
    pub grid: GridBlock,
    #[serde(default)]
    pub campaign: Campaign,
    #[serde(default)]
    pub evolve: EvolveBlock,
    #[serde(default)]
    pub tolerance: Tolerance,
    /// Output directory; `--out` takes precedence. Not part of the hash.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub output: Option<PathBuf>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Construction {
    pub delta: f64,
    pub gamma: f64,
    pub beta: f64,
    /// Radius of single-`R` runs.
    #[serde(default = "default_r")]
    pub r: f64,
    #[serde(default = "default_ladder")]
    pub r_list: Vec<f64>,
    /// Index into the solved modes; smallest positive `λ` when absent.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub mode_index: Option<usize>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Pair {
    pub p: f64,
    pub q: f64,
}

/// Mode grid `[−L, L)²` with `N` nodes, mode count, and the ladder grid policy:
/// the cylinder box is `padding` times the support, with a fixed node count,
/// so resolution follows `R`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct GridBlock {
    pub half_width: f64,
    pub n: usize,
    pub modes: usize,
    pub padding: f64,
    pub n_rho: usize,
    pub n_z: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct Campaign {
    pub free_control: bool,
    pub term_diagnostics: bool,
    /// Radius of the grid-halving check; none when absent.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub halving_r: Option<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct EvolveBlock {
    pub n_xy: usize,
    pub n_z: usize,
    pub checkpoints: usize,
    /// Also write the magnetic flow at `R^β` as a field file.
    pub write_final: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct Tolerance {
    /// Eigenpair residual.
    pub eigen: f64,
    /// Ring/peak ratio of a mode on its grid.
    pub boundary: f64,
}

fn default_r() -> f64 {
    8.0
}

fn default_ladder() -> Vec<f64> {
    vec![8.0, 12.0, 16.0, 24.0, 32.0, 48.0, 64.0]
}

impl Default for GridBlock {
    fn default() -> Self {
        let p = GridPolicy::default();
        Self { half_width: 8.0, n: 96, modes: 6, padding: p.pad, n_rho: p.n_rho, n_z: p.n_z }
    }
}

impl Default for Campaign {
    fn default() -> Self {
        Self { free_control: true, term_diagnostics: false, halving_r: None }
    }
}

impl Default for EvolveBlock {
    fn default() -> Self {
        Self { n_xy: 128, n_z: 64, checkpoints: 8, write_final: false }
    }
}

impl Default for Tolerance {
    fn default() -> Self {
        Self { eigen: 1e-8, boundary: 1e-10 }
    }
}

impl RunConfig {
    pub fn reference() -> Self {
        Self::parse(REFERENCE).expect("reference config is valid")
    }

    pub fn parse(text: &str) -> Result<Self> {
        let cfg: Self = toml::from_str(text).map_err(|e| LabError::Config(e.to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| LabError::Config(format!("{}: {e}", path.display())))?;
        Self::parse(&text).map_err(|e| LabError::Config(format!("{}: {e}", path.display())))
    }

    /// Re-checks every range invariant of the referenced types.
    pub fn validate(&self) -> Result<()> {
        self.params()?;
        for r in &self.construction.r_list {
            self.params()?.with_r(*r)?;
        }
        if self.construction.r_list.is_empty() {
            return Err(LabError::Config("construction.r_list is empty".into()));
        }
        self.pair()?;
        self.mode_grid()?;
        let g = &self.grid;
        if g.modes == 0 || g.modes > 32 {
            return Err(LabError::Config(format!("grid.modes must lie in 1..=32, got {}", g.modes)));
        }
        if let Some(i) = self.construction.mode_index {
            if i >= self.mode_count() {
                return Err(LabError::Config(format!(
                    "construction.mode_index {i} exceeds the {} solved modes",
                    self.mode_count()
                )));
            }
        }
        if !(g.padding >= 1.0) {
            return Err(LabError::Config(format!("grid.padding must be at least 1, got {}", g.padding)));
        }
        if g.n_rho < 16 || g.n_z < 16 {
            return Err(LabError::Config(format!(
                "grid.n_rho and grid.n_z must be at least 16, got {} and {}",
                g.n_rho, g.n_z
            )));
        }
        if let Some(r) = self.campaign.halving_r {
            self.params()?.with_r(r)?;
        }
        let e = &self.evolve;
        if e.n_xy < 8 || !e.n_xy.is_multiple_of(2) || e.n_z < 8 {
            return Err(LabError::Config(format!(
                "evolve grid {}²×{} needs an even transverse count and at least 8 nodes per axis",
                e.n_xy, e.n_z
            )));
        }
        if e.checkpoints == 0 {
            return Err(LabError::Config("evolve.checkpoints must be positive".into()));
        }
        let t = &self.tolerance;
        if !(t.eigen > 0.0) || !(t.boundary > 0.0) {
            return Err(LabError::Config("tolerances must be positive".into()));
        }
        Ok(())
    }

    /// Parameters at `construction.r`.
    pub fn params(&self) -> Result<ConstructionParams> {
        let c = &self.construction;
        Ok(ConstructionParams::new(c.delta, c.gamma, c.beta, c.r)?)
    }

    pub fn pair(&self) -> Result<AdmissiblePair<f64>> {
        Ok(admissible(self.pair.p, self.pair.q)?)
    }

    pub fn mode_grid(&self) -> Result<GridSpec2D> {
        GridSpec2D::new(self.grid.half_width, self.grid.n)
    }

    /// Modes actually solved: the count rounded up to pair `±λ`.
    pub fn mode_count(&self) -> usize {
        2 * self.grid.modes.div_ceil(2)
    }

    pub fn solve_options(&self) -> SolveOptions {
        SolveOptions { boundary_tol: self.tolerance.boundary, ..SolveOptions::with_tol(self.tolerance.eigen) }
    }

    pub fn policy(&self) -> GridPolicy {
        GridPolicy { pad: self.grid.padding, n_rho: self.grid.n_rho, n_z: self.grid.n_z }
    }

    pub fn ladder_options(&self) -> LadderOptions {
        LadderOptions { free_control: self.campaign.free_control, term_diagnostics: self.campaign.term_diagnostics }
    }

    /// SHA-256 of the canonical JSON form, output directory excluded.
    pub fn hash(&self) -> String {
        let canonical = RunConfig { output: None, ..self.clone() };
        let json = serde_json::to_string(&canonical).expect("config serializes");
        hex::encode(Sha256::digest(json.as_bytes()))
    }
}
