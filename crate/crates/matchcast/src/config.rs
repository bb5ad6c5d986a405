//! Declarative run configuration (TOML) with CLI-flag overrides.

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::dixon_coles::FitOptions;
use crate::ensemble::EnsembleConfig;
use crate::error::{Error, Result};
use crate::eval::EvalConfig;
use crate::forest::Hyperparams;
use crate::textfeat;

#[derive(Debug, Clone, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    #[serde(default)]
    pub seed: Option<u64>,
    #[serde(default)]
    pub paths: Paths,
    #[serde(default)]
    pub model: ModelConfig,
    #[serde(default)]
    pub forest: ForestConfig,
}

#[derive(Debug, Clone, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Paths {
    pub matches: Option<PathBuf>,
    pub previews: Option<PathBuf>,
    pub aliases: Option<PathBuf>,
    pub out: Option<PathBuf>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ModelConfig {
    pub mu: f64,
    pub theta: f64,
    pub xi: f64,
    pub rho_min: f64,
    pub rho_max: f64,
    pub min_df: u32,
    pub max_df: f64,
    pub ensemble_folds: usize,
    pub min_history: usize,
    pub test_games_per_season: usize,
}

impl Default for ModelConfig {
    fn default() -> Self {
        let dc = FitOptions::default();
        ModelConfig {
            mu: textfeat::DEFAULT_MU,
            theta: textfeat::DEFAULT_THETA,
            xi: dc.xi,
            rho_min: dc.rho_min,
            rho_max: dc.rho_max,
            min_df: textfeat::DEFAULT_MIN_DF,
            max_df: textfeat::DEFAULT_MAX_DF,
            ensemble_folds: 5,
            min_history: 30,
            test_games_per_season: 300,
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ForestConfig {
    pub n_trees: usize,
    pub max_depth: Option<usize>,
    pub min_leaf: usize,
    pub mtry: Option<usize>,
}

impl Default for ForestConfig {
    fn default() -> Self {
        let h = Hyperparams::default();
        ForestConfig {
            n_trees: h.n_trees,
            max_depth: h.max_depth,
            min_leaf: h.min_leaf,
            mtry: h.mtry,
        }
    }
}

impl RunConfig {
    pub fn load(path: &Path) -> Result<RunConfig> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::Io {
            path: path.display().to_string(),
            source: e,
        })?;
        toml::from_str(&text)
            .map_err(|e| Error::Config(format!("{}: {e}", path.display())))
    }

    pub fn fit_options(&self) -> FitOptions {
        FitOptions {
            xi: self.model.xi,
            rho_min: self.model.rho_min,
            rho_max: self.model.rho_max,
            ..FitOptions::default()
        }
    }

    pub fn hyperparams(&self) -> Hyperparams {
        Hyperparams {
            n_trees: self.forest.n_trees,
            max_depth: self.forest.max_depth,
            min_leaf: self.forest.min_leaf,
            mtry: self.forest.mtry,
            bootstrap: true,
        }
    }

    pub fn ensemble_config(&self, seed: u64, no_text: bool) -> EnsembleConfig {
        EnsembleConfig {
            folds: self.model.ensemble_folds,
            mu: self.model.mu,
            theta: self.model.theta,
            min_df: self.model.min_df,
            max_df: self.model.max_df,
            dc: self.fit_options(),
            text_forest: self.hyperparams(),
            stacker_forest: self.hyperparams(),
            seed,
            min_history: self.model.min_history,
            no_text,
        }
    }

    pub fn eval_config(&self, seed: u64, no_text: bool) -> EvalConfig {
        EvalConfig {
            ensemble: self.ensemble_config(seed, no_text),
            test_games_per_season: self.model.test_games_per_season,
        }
    }
}
