//! Model 4: a random-forest stacker over the 9-dimensional meta-feature
//! vector built from the text model, Dixon-Coles and bookmaker
//! probability triples. Training meta-features are generated
//! out-of-sample: text probabilities come from out-of-fold models and
//! Dixon-Coles parameters from expanding-window refits.

use std::collections::BTreeMap;
use std::fs::File;
use std::io::BufReader;
use std::path::Path;

use chrono::NaiveDate;
use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::corpus::{Corpus, MatchRecord};
use crate::dixon_coles::{self, DcParams, FitOptions};
use crate::error::{Error, Result};
use crate::forest::{self, Forest, Hyperparams};
use crate::odds::{self, OutcomeProbs};
use crate::par;
use crate::textfeat::{self, Vocabulary};

pub const ARTIFACT_TYPE: &str = "ensemble";
pub const ARTIFACT_VERSION: u32 = 1;

#[derive(Debug, Clone)]
pub struct EnsembleConfig {
    pub folds: usize,
    pub mu: f64,
    pub theta: f64,
    pub min_df: u32,
    pub max_df: f64,
    pub dc: FitOptions,
    pub text_forest: Hyperparams,
    pub stacker_forest: Hyperparams,
    pub seed: u64,
    /// Minimum number of prior matches before a training match can get
    /// an expanding-window Dixon-Coles triple.
    pub min_history: usize,
    /// Ablation: drop the three text features from the stacker input.
    pub no_text: bool,
}

impl Default for EnsembleConfig {
    fn default() -> Self {
        EnsembleConfig {
            folds: 5,
            mu: textfeat::DEFAULT_MU,
            theta: textfeat::DEFAULT_THETA,
            min_df: textfeat::DEFAULT_MIN_DF,
            max_df: textfeat::DEFAULT_MAX_DF,
            dc: FitOptions::default(),
            text_forest: Hyperparams::default(),
            stacker_forest: Hyperparams::default(),
            seed: 42,
            min_history: 30,
            no_text: false,
        }
    }
}

/// Where each embedded triple came from, for the no-leak audit.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Provenance {
    /// Fold whose held-out model produced the text triple (training
    /// meta-features only).
    pub text_fold: Option<usize>,
    /// Latest training-match date seen by the Dixon-Coles fit behind the
    /// dc triple.
    pub dc_train_until: Option<NaiveDate>,
}

/// 9-dimensional stacker input in fixed order
/// [text_h, text_d, text_a, dc_h, dc_d, dc_a, book_h, book_d, book_a].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MetaFeatures {
    pub match_id: String,
    pub text_probs: OutcomeProbs,
    pub dc_probs: OutcomeProbs,
    pub book_probs: OutcomeProbs,
    pub x: Vec<f64>,
    pub provenance: Provenance,
}

pub fn assemble_meta(
    match_id: &str,
    text_probs: OutcomeProbs,
    dc_probs: OutcomeProbs,
    book_probs: OutcomeProbs,
    provenance: Provenance,
) -> MetaFeatures {
    let mut x = Vec::with_capacity(9);
    x.extend(text_probs.as_array());
    x.extend(dc_probs.as_array());
    x.extend(book_probs.as_array());
    MetaFeatures {
        match_id: match_id.to_string(),
        text_probs,
        dc_probs,
        book_probs,
        x,
        provenance,
    }
}

fn stacker_input(meta: &MetaFeatures, no_text: bool) -> Vec<f64> {
    if no_text {
        meta.x[3..].to_vec()
    } else {
        meta.x.clone()
    }
}

/// Model 1: count-vectorized text features fed to a random forest.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TextModel {
    pub vocab: Vocabulary,
    pub forest: Forest,
    pub mu: f64,
    pub theta: f64,
}

impl TextModel {
    /// Fits vocabulary and forest on the training matches that have
    /// preview text; flagged no-text rows are excluded from training.
    pub fn fit(
        matches: &[MatchRecord],
        corpus: &Corpus,
        config: &EnsembleConfig,
    ) -> Result<TextModel> {
        let articles: Vec<&crate::corpus::PreviewArticle> = matches
            .iter()
            .flat_map(|m| corpus.previews_for(&m.match_id))
            .collect();
        let vocab = textfeat::fit_vocabulary(&articles, config.min_df, config.max_df)?;
        let features =
            textfeat::build_all_features(matches, corpus, &vocab, config.mu, config.theta);
        let rows: Vec<(Vec<f64>, crate::corpus::Outcome)> = features
            .iter()
            .zip(matches)
            .filter(|(f, _)| !f.no_text)
            .map(|(f, m)| (f.x.clone(), m.outcome()))
            .collect();
        if rows.len() < 2 {
            return Err(Error::Model(
                "too few matches with preview text to fit the text model".into(),
            ));
        }
        let forest = forest::train(&rows, &config.text_forest, config.seed)?;
        Ok(TextModel {
            vocab,
            forest,
            mu: config.mu,
            theta: config.theta,
        })
    }

    pub fn predict(&self, m: &MatchRecord, corpus: &Corpus) -> Result<OutcomeProbs> {
        let features = textfeat::build_features(
            m,
            corpus.previews_for(&m.match_id),
            &self.vocab,
            &corpus.aliases,
            self.mu,
            self.theta,
        );
        forest::predict_proba(&self.forest, &features.x)
    }
}

pub const TEXT_ARTIFACT_TYPE: &str = "text_forest";

#[derive(Serialize, Deserialize)]
struct TextArtifact {
    #[serde(rename = "type")]
    kind: String,
    version: u32,
    model: TextModel,
}

pub fn save_text_artifact(model: &TextModel, path: &Path) -> Result<()> {
    let artifact = TextArtifact {
        kind: TEXT_ARTIFACT_TYPE.to_string(),
        version: ARTIFACT_VERSION,
        model: model.clone(),
    };
    let bytes = serde_json::to_vec(&artifact)
        .map_err(|e| Error::Model(format!("artifact serialization failed: {e}")))?;
    crate::corpus::write_atomic(path, &bytes)
}

pub fn load_text_artifact(path: &Path) -> Result<TextModel> {
    let file = File::open(path).map_err(|e| Error::Io {
        path: path.display().to_string(),
        source: e,
    })?;
    let artifact: TextArtifact = serde_json::from_reader(BufReader::new(file))
        .map_err(|e| Error::Model(format!("{}: invalid artifact: {e}", path.display())))?;
    if artifact.kind != TEXT_ARTIFACT_TYPE || artifact.version != ARTIFACT_VERSION {
        return Err(Error::Model(format!(
            "unsupported artifact {}@{}",
            artifact.kind, artifact.version
        )));
    }
    Ok(artifact.model)
}

/// The three upstream models fitted on one training window.
#[derive(Debug, Clone)]
pub struct Upstream {
    pub text: TextModel,
    pub dc: DcParams,
    pub dc_train_until: Option<NaiveDate>,
}

pub fn fit_upstream(train: &Corpus, config: &EnsembleConfig, as_of: NaiveDate) -> Result<Upstream> {
    let text = TextModel::fit(&train.matches, train, config)?;
    let dc = dixon_coles::fit(&train.matches, &config.dc, as_of)?;
    Ok(Upstream {
        text,
        dc,
        dc_train_until: train.matches.iter().map(|m| m.date).max(),
    })
}

/// Builds one match's meta-features from already-fitted upstream models.
/// Matches without odds are ineligible for Model 4.
pub fn build_meta_features(
    m: &MatchRecord,
    upstream: &Upstream,
    corpus: &Corpus,
) -> Result<MetaFeatures> {
    let odds = m
        .odds
        .as_ref()
        .ok_or_else(|| Error::Data(format!("match {} has no odds", m.match_id)))?;
    let text_probs = upstream.text.predict(m, corpus)?;
    let (dc_probs, _) = dixon_coles::predict_with_fallback(&upstream.dc, &m.home_team, &m.away_team)?;
    let book_probs = odds::implied_probs(odds)?;
    Ok(assemble_meta(
        &m.match_id,
        text_probs,
        dc_probs,
        book_probs,
        Provenance {
            text_fold: None,
            dc_train_until: upstream.dc_train_until,
        },
    ))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EnsembleModel {
    pub stacker: Forest,
    pub no_text: bool,
}

impl EnsembleModel {
    pub fn predict_from_meta(&self, meta: &MetaFeatures) -> Result<OutcomeProbs> {
        forest::predict_proba(&self.stacker, &stacker_input(meta, self.no_text))
    }
}

#[derive(Debug, Clone, Default, Serialize, Deserialize)]
pub struct TrainReport {
    pub excluded: Vec<(String, String)>,
    /// match_id -> fold index for the out-of-fold text triples.
    pub fold_assignments: BTreeMap<String, usize>,
    pub trained_on: usize,
}

/// Trains the stacker on leak-free meta-features. Returns the model,
/// the training meta-features (for auditing) and the exclusion report.
pub fn train_ensemble(
    train: &Corpus,
    config: &EnsembleConfig,
) -> Result<(EnsembleModel, Vec<MetaFeatures>, TrainReport)> {
    let mut report = TrainReport::default();

    // eligibility: odds present and enough prior history for an
    // expanding-window Dixon-Coles fit
    let mut eligible: Vec<&MatchRecord> = Vec::new();
    for (i, m) in train.matches.iter().enumerate() {
        if m.odds.is_none() {
            report
                .excluded
                .push((m.match_id.clone(), "missing odds".into()));
        } else if i < config.min_history {
            report
                .excluded
                .push((m.match_id.clone(), "insufficient history".into()));
        } else {
            eligible.push(m);
        }
    }
    if eligible.len() < 2 * config.folds {
        return Err(Error::Model(format!(
            "only {} eligible matches for {} folds",
            eligible.len(),
            config.folds
        )));
    }

    // deterministic fold assignment: seeded shuffle of sorted ids
    let mut ids: Vec<&str> = eligible.iter().map(|m| m.match_id.as_str()).collect();
    ids.sort_unstable();
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    ids.shuffle(&mut rng);
    for (i, id) in ids.iter().enumerate() {
        report
            .fold_assignments
            .insert(id.to_string(), i % config.folds);
    }

    // out-of-fold text triples: one text model per fold, fitted on the
    // complement (matches with previews only)
    let mut text_probs: BTreeMap<String, (OutcomeProbs, usize)> = BTreeMap::new();
    let fold_results = par::map_indices(config.folds, |fold| -> Result<Vec<(String, OutcomeProbs)>> {
        let in_fold = |m: &MatchRecord| report.fold_assignments.get(&m.match_id) == Some(&fold);
        let fit_matches: Vec<MatchRecord> = train
            .matches
            .iter()
            .filter(|m| report.fold_assignments.contains_key(&m.match_id) && !in_fold(m))
            .cloned()
            .collect();
        let model = TextModel::fit(&fit_matches, train, config)?;
        eligible
            .iter()
            .filter(|m| in_fold(m))
            .map(|m| Ok((m.match_id.clone(), model.predict(m, train)?)))
            .collect()
    });
    for (fold, result) in fold_results.into_iter().enumerate() {
        for (id, p) in result? {
            text_probs.insert(id, (p, fold));
        }
    }

    // expanding-window Dixon-Coles triples, one fit per distinct date
    let mut dates: Vec<NaiveDate> = eligible.iter().map(|m| m.date).collect();
    dates.sort_unstable();
    dates.dedup();
    let dc_fits: BTreeMap<NaiveDate, Result<(DcParams, Option<NaiveDate>)>> = dates
        .iter()
        .copied()
        .zip(par::map_slice(&dates, |&d| {
            let prior: Vec<MatchRecord> = train
                .matches
                .iter()
                .filter(|m| m.date < d)
                .cloned()
                .collect();
            if prior.len() < config.min_history {
                return Err(Error::Model("insufficient history".into()));
            }
            let until = prior.iter().map(|m| m.date).max();
            dixon_coles::fit(&prior, &config.dc, d).map(|p| (p, until))
        }))
        .collect();

    let mut metas: Vec<MetaFeatures> = Vec::new();
    for m in &eligible {
        let (text, fold) = text_probs[&m.match_id];
        let dc = match &dc_fits[&m.date] {
            Ok((params, until)) => {
                match dixon_coles::predict_with_fallback(params, &m.home_team, &m.away_team) {
                    Ok((p, _)) => (p, *until),
                    Err(e) => {
                        report.excluded.push((m.match_id.clone(), e.to_string()));
                        continue;
                    }
                }
            }
            Err(e) => {
                report.excluded.push((m.match_id.clone(), e.to_string()));
                continue;
            }
        };
        let book = odds::implied_probs(m.odds.as_ref().unwrap())?;
        metas.push(assemble_meta(
            &m.match_id,
            text,
            dc.0,
            book,
            Provenance {
                text_fold: Some(fold),
                dc_train_until: dc.1,
            },
        ));
    }

    let outcome_of: BTreeMap<&str, crate::corpus::Outcome> = eligible
        .iter()
        .map(|m| (m.match_id.as_str(), m.outcome()))
        .collect();
    let rows: Vec<(Vec<f64>, crate::corpus::Outcome)> = metas
        .iter()
        .map(|meta| {
            (
                stacker_input(meta, config.no_text),
                outcome_of[meta.match_id.as_str()],
            )
        })
        .collect();
    let stacker = forest::train(&rows, &config.stacker_forest, config.seed)?;
    report.trained_on = rows.len();

    Ok((
        EnsembleModel {
            stacker,
            no_text: config.no_text,
        },
        metas,
        report,
    ))
}

/// Counts no-leak violations over training meta-features: a text triple
/// produced by a model trained on its own fold, or a Dixon-Coles triple
/// that saw the match's own date.
pub fn audit_no_leak(metas: &[MetaFeatures], report: &TrainReport, corpus: &Corpus) -> usize {
    let dates: BTreeMap<&str, NaiveDate> = corpus
        .matches
        .iter()
        .map(|m| (m.match_id.as_str(), m.date))
        .collect();
    let mut violations = 0;
    for meta in metas {
        match (meta.provenance.text_fold, report.fold_assignments.get(&meta.match_id)) {
            (Some(fold), Some(&assigned)) if fold == assigned => {}
            _ => violations += 1,
        }
        let date = dates.get(meta.match_id.as_str());
        match (meta.provenance.dc_train_until, date) {
            (Some(until), Some(&d)) if until < d => {}
            _ => violations += 1,
        }
    }
    violations
}

// ---- artifact ----

#[derive(Serialize, Deserialize)]
struct EnsembleArtifact {
    #[serde(rename = "type")]
    kind: String,
    version: u32,
    no_text: bool,
    stacker: Forest,
    upstream: UpstreamRefs,
}

#[derive(Serialize, Deserialize)]
struct UpstreamRefs {
    text: Option<String>,
    dixon_coles: Option<String>,
}

pub fn save_artifact(
    model: &EnsembleModel,
    text_ref: Option<&str>,
    dc_ref: Option<&str>,
    path: &Path,
) -> Result<()> {
    let artifact = EnsembleArtifact {
        kind: ARTIFACT_TYPE.to_string(),
        version: ARTIFACT_VERSION,
        no_text: model.no_text,
        stacker: model.stacker.clone(),
        upstream: UpstreamRefs {
            text: text_ref.map(String::from),
            dixon_coles: dc_ref.map(String::from),
        },
    };
    let bytes = serde_json::to_vec(&artifact)
        .map_err(|e| Error::Model(format!("artifact serialization failed: {e}")))?;
    crate::corpus::write_atomic(path, &bytes)
}

pub fn load_artifact(path: &Path) -> Result<EnsembleModel> {
    Ok(load_artifact_with_refs(path)?.0)
}

/// Loads the stacker plus the recorded upstream artifact references
/// (paths relative to the artifact's directory).
pub fn load_artifact_with_refs(
    path: &Path,
) -> Result<(EnsembleModel, Option<String>, Option<String>)> {
    let file = File::open(path).map_err(|e| Error::Io {
        path: path.display().to_string(),
        source: e,
    })?;
    let artifact: EnsembleArtifact = serde_json::from_reader(BufReader::new(file))
        .map_err(|e| Error::Model(format!("{}: invalid artifact: {e}", path.display())))?;
    if artifact.kind != ARTIFACT_TYPE || artifact.version != ARTIFACT_VERSION {
        return Err(Error::Model(format!(
            "unsupported artifact {}@{}",
            artifact.kind, artifact.version
        )));
    }
    Ok((
        EnsembleModel {
            stacker: artifact.stacker,
            no_text: artifact.no_text,
        },
        artifact.upstream.text,
        artifact.upstream.dixon_coles,
    ))
}
