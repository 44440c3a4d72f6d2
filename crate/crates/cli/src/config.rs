//! Declarative pipeline configuration, read from TOML.
//!
//! Every field has a default, so an empty file is a valid config. Command-line
//! flags override the corresponding fields.

use std::path::Path;

use plandiv_core::generate::{GenSpec, ImbalanceSpec, LogisticsRanges};
use plandiv_core::select::{ClusterAlgo, NearestSpace, Reduction, SelectionConfig};
use plandiv_core::{DomainKind, SolveLimits};
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::error::CliError;

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct PipelineConfig {
    pub seed: u64,
    /// Worker threads; 0 uses every core. Never affects outputs.
    #[serde(skip_serializing)]
    pub jobs: usize,
    pub generate: GenerateConfig,
    pub solve: SolveLimits,
    pub select: SelectConfig,
    pub imbalance: Option<ImbalanceConfig>,
    pub emit: EmitConfig,
    pub experiment: ExperimentConfig,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct GenerateConfig {
    pub domain: DomainKind,
    pub count: usize,
    pub n_blocks: usize,
    pub logistics: LogisticsRanges,
}

impl Default for GenerateConfig {
    fn default() -> Self {
        GenerateConfig {
            domain: DomainKind::Blocksworld,
            count: 3000,
            n_blocks: 5,
            logistics: LogisticsRanges::default(),
        }
    }
}

impl GenerateConfig {
    pub fn spec(&self, seed: u64) -> GenSpec {
        GenSpec { domain: self.domain, count: self.count, seed, n_blocks: self.n_blocks, logistics: self.logistics }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SelectConfig {
    pub reduction: Reduction,
    pub cluster_algo: ClusterAlgo,
    pub max_iter: usize,
    pub rel_tol: f64,
    pub nearest_in: NearestSpace,
}

impl Default for SelectConfig {
    fn default() -> Self {
        let base = SelectionConfig::new(1, 0);
        SelectConfig {
            reduction: base.reduction,
            cluster_algo: base.cluster_algo,
            max_iter: base.max_iter,
            rel_tol: base.rel_tol,
            nearest_in: base.nearest_in,
        }
    }
}

impl SelectConfig {
    pub fn selection(&self, k: usize, seed: u64) -> SelectionConfig {
        SelectionConfig {
            k,
            reduction: self.reduction,
            cluster_algo: self.cluster_algo,
            seed,
            max_iter: self.max_iter,
            rel_tol: self.rel_tol,
            nearest_in: self.nearest_in,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ImbalanceConfig {
    pub p: f64,
    pub j_min: usize,
    pub j_max: usize,
    pub n_clusters: usize,
}

impl Default for ImbalanceConfig {
    fn default() -> Self {
        let d = ImbalanceSpec::default();
        ImbalanceConfig { p: d.p, j_min: d.j_min, j_max: d.j_max, n_clusters: d.n_clusters }
    }
}

impl ImbalanceConfig {
    pub fn spec(&self, seed: u64) -> ImbalanceSpec {
        ImbalanceSpec { p: self.p, j_min: self.j_min, j_max: self.j_max, n_clusters: self.n_clusters, seed }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "snake_case")]
pub enum PromptMode {
    #[default]
    ZeroShot,
    OneShot,
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct EmitConfig {
    pub prompt: PromptMode,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "kebab-case")]
pub enum Method {
    Random,
    /// CMDS over TF-IDF text embeddings with L2 distance.
    CmdsL,
    /// CMDS over graph encodings with edit distance.
    CmdsG,
}

impl Method {
    pub fn name(self) -> &'static str {
        match self {
            Method::Random => "random",
            Method::CmdsL => "cmds-l",
            Method::CmdsG => "cmds-g",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ExperimentConfig {
    /// Held-out tasks, excluded from selection.
    pub n_test: usize,
    pub k: Vec<usize>,
    pub methods: Vec<Method>,
    /// Independent random draws averaged per subset size.
    pub random_draws: usize,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        ExperimentConfig {
            n_test: 500,
            k: vec![100, 200, 400, 1000],
            methods: vec![Method::Random, Method::CmdsL, Method::CmdsG],
            random_draws: 20,
        }
    }
}

impl PipelineConfig {
    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path).map_err(|e| CliError::usage(format!("{}: {e}", path.display())))?;
        toml::from_str(&text).map_err(|e| CliError::usage(format!("{}: {e}", path.display())))
    }
}

/// Independent seed for a named pipeline stage: the first 8 bytes of
/// SHA-256(seed as little-endian bytes || stage name).
pub fn stage_seed(seed: u64, stage: &str) -> u64 {
    let mut h = Sha256::new();
    h.update(seed.to_le_bytes());
    h.update(stage.as_bytes());
    let digest = h.finalize();
    u64::from_le_bytes(digest[..8].try_into().expect("8 bytes"))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn empty_config_is_default() {
        assert_eq!(toml::from_str::<PipelineConfig>("").unwrap(), PipelineConfig::default());
    }

    #[test]
    fn partial_sections() {
        let c: PipelineConfig = toml::from_str(
            "seed = 7\n[generate]\ncount = 10\n[solve]\nmax_nodes = 5\n[select]\nreduction = { method = \"pca\", dim = 2 }\n[imbalance]\np = 1.0\n[experiment]\nmethods = [\"cmds-g\"]\n",
        )
        .unwrap();
        assert_eq!(c.seed, 7);
        assert_eq!(c.generate.count, 10);
        assert_eq!(c.generate.n_blocks, 5);
        assert_eq!(c.solve.max_nodes, 5);
        assert_eq!(c.solve.max_seconds, 60.0);
        assert_eq!(c.select.reduction, Reduction::Pca(2));
        assert_eq!(c.imbalance.unwrap().n_clusters, 100);
        assert_eq!(c.experiment.methods, vec![Method::CmdsG]);
    }

    #[test]
    fn unknown_keys_rejected() {
        assert!(toml::from_str::<PipelineConfig>("sede = 1").is_err());
    }

    #[test]
    fn stage_seeds_differ() {
        assert_ne!(stage_seed(0, "generate"), stage_seed(0, "select"));
        assert_ne!(stage_seed(0, "generate"), stage_seed(1, "generate"));
        assert_eq!(stage_seed(3, "x"), stage_seed(3, "x"));
    }
}
