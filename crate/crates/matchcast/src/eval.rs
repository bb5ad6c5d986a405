//! Metrics and the three experiment protocols: multi-season accuracy
//! comparison, draw/longshot detection on a random 80/20 split, and
//! week-by-week walk-forward over one season.

use std::collections::BTreeMap;

use chrono::NaiveDate;
use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::corpus::{Corpus, MatchRecord, Outcome};
use crate::dixon_coles;
use crate::ensemble::{self, EnsembleConfig, EnsembleModel, Upstream};
use crate::error::{Error, Result};
use crate::odds::{self, OutcomeProbs};
use crate::par;

pub const MODEL_IDS: [&str; 4] = ["model1_text", "model2_dixon_coles", "model3_bookmaker", "model4_ensemble"];

pub const EPL_GAMEWEEK_SIZE: usize = 10;

#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize, Deserialize)]
pub struct ConfusionMatrix {
    /// counts[actual][predicted] over Outcome order.
    pub counts: [[u32; 3]; 3],
}

impl ConfusionMatrix {
    pub fn add(&mut self, actual: Outcome, predicted: Outcome) {
        self.counts[actual.index()][predicted.index()] += 1;
    }

    pub fn total(&self) -> u32 {
        self.counts.iter().flatten().sum()
    }

    pub fn trace(&self) -> u32 {
        (0..3).map(|i| self.counts[i][i]).sum()
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize, Deserialize)]
pub struct ModelMetrics {
    pub accuracy: f64,
    /// Macro-averaged over the 3 classes; 0/0 per class defined as 0.
    pub precision: f64,
    pub recall: f64,
    /// Harmonic mean of macro precision and macro recall.
    pub f1: f64,
}

pub fn metrics(cm: &ConfusionMatrix) -> Result<ModelMetrics> {
    let total = cm.total();
    if total == 0 {
        return Err(Error::Data("empty confusion matrix".into()));
    }
    let ratio = |num: u32, den: u32| if den == 0 { 0.0 } else { num as f64 / den as f64 };
    let mut precision = 0.0;
    let mut recall = 0.0;
    for k in 0..3 {
        let tp = cm.counts[k][k];
        let predicted: u32 = (0..3).map(|i| cm.counts[i][k]).sum();
        let actual: u32 = cm.counts[k].iter().sum();
        precision += ratio(tp, predicted) / 3.0;
        recall += ratio(tp, actual) / 3.0;
    }
    let f1 = if precision + recall == 0.0 {
        0.0
    } else {
        2.0 * precision * recall / (precision + recall)
    };
    Ok(ModelMetrics {
        accuracy: cm.trace() as f64 / total as f64,
        precision,
        recall,
        f1,
    })
}

#[derive(Debug, Clone, Default, Serialize, Deserialize)]
pub struct ExperimentReport {
    pub experiment: u8,
    pub models: BTreeMap<String, ModelMetrics>,
    #[serde(skip_serializing_if = "BTreeMap::is_empty", default)]
    pub draw_detection: BTreeMap<String, Option<f64>>,
    #[serde(skip_serializing_if = "BTreeMap::is_empty", default)]
    pub longshot_detection: BTreeMap<String, Option<f64>>,
    /// model id -> cumulative correct counts per gameweek (experiment 3).
    #[serde(skip_serializing_if = "BTreeMap::is_empty", default)]
    pub weekly_cumulative: BTreeMap<String, Vec<u32>>,
    pub excluded: Vec<(String, String)>,
    pub notes: Vec<String>,
}

impl ExperimentReport {
    /// Human-readable table.
    pub fn render_table(&self) -> String {
        let mut out = format!("experiment {}\n", self.experiment);
        out.push_str(&format!(
            "{:<22} {:>9} {:>10} {:>8} {:>8}\n",
            "model", "accuracy", "precision", "recall", "f1"
        ));
        for (id, m) in &self.models {
            out.push_str(&format!(
                "{:<22} {:>9.4} {:>10.4} {:>8.4} {:>8.4}\n",
                id, m.accuracy, m.precision, m.recall, m.f1
            ));
        }
        for (label, table) in [
            ("draw detection", &self.draw_detection),
            ("longshot detection", &self.longshot_detection),
        ] {
            for (id, rate) in table {
                match rate {
                    Some(r) => out.push_str(&format!("{label} {id}: {r:.4}\n")),
                    None => out.push_str(&format!("{label} {id}: absent\n")),
                }
            }
        }
        if let Some(weeks) = self.weekly_cumulative.values().next() {
            out.push_str(&format!("weeks: {}\n", weeks.len()));
            for (id, series) in &self.weekly_cumulative {
                out.push_str(&format!(
                    "{id} final cumulative correct: {}\n",
                    series.last().copied().unwrap_or(0)
                ));
            }
        }
        for note in &self.notes {
            out.push_str(&format!("note: {note}\n"));
        }
        out
    }

    /// Week-by-week series as CSV (experiment 3).
    pub fn weekly_csv(&self) -> String {
        let mut out = String::from("week");
        for id in self.weekly_cumulative.keys() {
            out.push(',');
            out.push_str(id);
        }
        out.push('\n');
        let n_weeks = self
            .weekly_cumulative
            .values()
            .map(Vec::len)
            .max()
            .unwrap_or(0);
        for w in 0..n_weeks {
            out.push_str(&(w + 1).to_string());
            for series in self.weekly_cumulative.values() {
                out.push(',');
                out.push_str(&series.get(w).copied().unwrap_or(0).to_string());
            }
            out.push('\n');
        }
        out
    }
}

#[derive(Debug, Clone)]
pub struct EvalConfig {
    pub ensemble: EnsembleConfig,
    pub test_games_per_season: usize,
}

impl Default for EvalConfig {
    fn default() -> Self {
        EvalConfig {
            ensemble: EnsembleConfig::default(),
            test_games_per_season: 300,
        }
    }
}

/// Per-match probability triples from the four models.
#[derive(Debug, Clone)]
pub struct MatchPredictions {
    pub match_id: String,
    pub actual: Outcome,
    pub probs: [OutcomeProbs; 4],
}

impl MatchPredictions {
    pub fn picks(&self) -> [Outcome; 4] {
        [
            self.probs[0].argmax(),
            self.probs[1].argmax(),
            self.probs[2].argmax(),
            self.probs[3].argmax(),
        ]
    }
}

struct FittedModels {
    upstream: Upstream,
    stacker: EnsembleModel,
}

fn fit_all_models(train: &Corpus, config: &EvalConfig, as_of: NaiveDate) -> Result<(FittedModels, Vec<(String, String)>)> {
    let upstream = ensemble::fit_upstream(train, &config.ensemble, as_of)?;
    let (stacker, _metas, report) = ensemble::train_ensemble(train, &config.ensemble)?;
    Ok((FittedModels { upstream, stacker }, report.excluded))
}

/// Predicts one test match with all four models. The match must carry odds.
fn predict_all(models: &FittedModels, m: &MatchRecord, corpus: &Corpus) -> Result<MatchPredictions> {
    let odds = m
        .odds
        .as_ref()
        .ok_or_else(|| Error::Data(format!("match {} has no odds", m.match_id)))?;
    let text = models.upstream.text.predict(m, corpus)?;
    let (dc, _) =
        dixon_coles::predict_with_fallback(&models.upstream.dc, &m.home_team, &m.away_team)?;
    let book = odds::implied_probs(odds)?;
    let meta = ensemble::build_meta_features(m, &models.upstream, corpus)?;
    let ens = models.stacker.predict_from_meta(&meta)?;
    Ok(MatchPredictions {
        match_id: m.match_id.clone(),
        actual: m.outcome(),
        probs: [text, dc, book, ens],
    })
}

fn predict_batch(
    models: &FittedModels,
    matches: &[MatchRecord],
    corpus: &Corpus,
) -> Result<Vec<MatchPredictions>> {
    par::map_slice(matches, |m| predict_all(models, m, corpus))
        .into_iter()
        .collect()
}

fn season_start(corpus: &Corpus, season: &str) -> Result<NaiveDate> {
    corpus
        .matches
        .iter()
        .filter(|m| m.season == season)
        .map(|m| m.date)
        .min()
        .ok_or_else(|| Error::Data(format!("season {season} not present in corpus")))
}

/// Experiment 1: for each listed season, train all four models on every
/// prior match and evaluate on the first `test_games_per_season`
/// test-eligible matches (preview and odds both present), averaging
/// metrics across seasons.
pub fn experiment1(
    corpus: &Corpus,
    seasons: &[String],
    config: &EvalConfig,
) -> Result<ExperimentReport> {
    let mut report = ExperimentReport {
        experiment: 1,
        ..Default::default()
    };
    let mut sums: BTreeMap<&str, ModelMetrics> = BTreeMap::new();

    for season in seasons {
        let cutoff = season_start(corpus, season)?;
        let (train, test, deg) = crate::corpus::temporal_split(corpus, cutoff);
        if deg.is_some() {
            return Err(Error::Data(format!(
                "degenerate temporal split at season {season}"
            )));
        }
        let eligible: Vec<MatchRecord> = test
            .matches
            .iter()
            .filter(|m| {
                m.season == *season
                    && m.odds.is_some()
                    && !corpus.previews_for(&m.match_id).is_empty()
            })
            .take(config.test_games_per_season)
            .cloned()
            .collect();
        if eligible.is_empty() {
            return Err(Error::Data(format!(
                "no test-eligible matches in season {season}"
            )));
        }
        if eligible.len() < config.test_games_per_season {
            report.notes.push(format!(
                "season {season}: only {} eligible matches (wanted {})",
                eligible.len(),
                config.test_games_per_season
            ));
        }
        let (models, excluded) = fit_all_models(&train, config, cutoff)?;
        report.excluded.extend(excluded);
        let predictions = predict_batch(&models, &eligible, corpus)?;

        let mut cms = [ConfusionMatrix::default(); 4];
        for p in &predictions {
            for (cm, pick) in cms.iter_mut().zip(p.picks()) {
                cm.add(p.actual, pick);
            }
        }
        for (id, cm) in MODEL_IDS.iter().zip(&cms) {
            let m = metrics(cm)?;
            let slot = sums.entry(id).or_default();
            slot.accuracy += m.accuracy;
            slot.precision += m.precision;
            slot.recall += m.recall;
            slot.f1 += m.f1;
        }
    }

    let n = seasons.len() as f64;
    for (id, sum) in sums {
        report.models.insert(
            id.to_string(),
            ModelMetrics {
                accuracy: sum.accuracy / n,
                precision: sum.precision / n,
                recall: sum.recall / n,
                f1: sum.f1 / n,
            },
        );
    }
    Ok(report)
}

/// Seeded random 80/20 split by match id; reproducible for a given seed.
pub fn random_split(corpus: &Corpus, seed: u64) -> (Corpus, Corpus) {
    let mut ids: Vec<&str> = corpus.matches.iter().map(|m| m.match_id.as_str()).collect();
    ids.sort_unstable();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    ids.shuffle(&mut rng);
    let n_test = corpus.matches.len() / 5;
    let test_ids: std::collections::BTreeSet<&str> = ids[..n_test].iter().copied().collect();

    let mut train = Corpus {
        matches: Vec::new(),
        previews: BTreeMap::new(),
        aliases: corpus.aliases.clone(),
    };
    let mut test = train.clone();
    for m in &corpus.matches {
        let side = if test_ids.contains(m.match_id.as_str()) { &mut test } else { &mut train };
        if let Some(articles) = corpus.previews.get(&m.match_id) {
            side.previews.insert(m.match_id.clone(), articles.clone());
        }
        side.matches.push(m.clone());
    }
    (train, test)
}

/// Experiment 2: draw and longshot detection on a seeded random 80/20
/// split. Longshots are test matches whose actual outcome carried a
/// normalized bookmaker probability strictly below 0.20.
pub fn experiment2(corpus: &Corpus, seed: u64, config: &EvalConfig) -> Result<ExperimentReport> {
    let mut report = ExperimentReport {
        experiment: 2,
        ..Default::default()
    };
    let (train, test) = random_split(corpus, seed);
    if train.matches.is_empty() || test.matches.is_empty() {
        return Err(Error::Data("corpus too small for an 80/20 split".into()));
    }
    let as_of = train
        .matches
        .iter()
        .map(|m| m.date)
        .max()
        .unwrap()
        .succ_opt()
        .unwrap();
    let (models, excluded) = fit_all_models(&train, config, as_of)?;
    report.excluded.extend(excluded);

    let eligible: Vec<MatchRecord> = test
        .matches
        .iter()
        .filter(|m| m.odds.is_some())
        .cloned()
        .collect();
    let predictions = predict_batch(&models, &eligible, corpus)?;

    let mut cms = [ConfusionMatrix::default(); 4];
    let mut draws = 0u32;
    let mut draw_hits = [0u32; 4];
    let mut longshots = 0u32;
    let mut longshot_hits = [0u32; 4];
    for (p, m) in predictions.iter().zip(&eligible) {
        let picks = p.picks();
        for (cm, pick) in cms.iter_mut().zip(picks) {
            cm.add(p.actual, pick);
        }
        if p.actual == Outcome::Draw {
            draws += 1;
            for (hits, pick) in draw_hits.iter_mut().zip(picks) {
                if pick == Outcome::Draw {
                    *hits += 1;
                }
            }
        }
        if odds::is_longshot(m.odds.as_ref().unwrap(), p.actual)? {
            longshots += 1;
            for (hits, pick) in longshot_hits.iter_mut().zip(picks) {
                if pick == p.actual {
                    *hits += 1;
                }
            }
        }
    }

    for (i, id) in MODEL_IDS.iter().enumerate() {
        report.models.insert(id.to_string(), metrics(&cms[i])?);
        report.draw_detection.insert(
            id.to_string(),
            (draws > 0).then(|| draw_hits[i] as f64 / draws as f64),
        );
        report.longshot_detection.insert(
            id.to_string(),
            (longshots > 0).then(|| longshot_hits[i] as f64 / longshots as f64),
        );
    }
    report
        .notes
        .push(format!("test draws: {draws}, test longshots: {longshots}"));
    Ok(report)
}

/// Assigns gameweeks by date order in fixture blocks when no explicit
/// assignment exists.
pub fn derive_gameweeks(matches: &[MatchRecord], block: usize) -> Vec<(usize, MatchRecord)> {
    let mut sorted = matches.to_vec();
    sorted.sort_by(|a, b| (a.date, &a.match_id).cmp(&(b.date, &b.match_id)));
    sorted
        .into_iter()
        .enumerate()
        .map(|(i, m)| (i / block + 1, m))
        .collect()
}

/// Experiment 3: week-by-week walk-forward over one season with models
/// trained on all pre-season data. Returns cumulative correct counts per
/// model per gameweek for all four models.
pub fn experiment3(corpus: &Corpus, season: &str, config: &EvalConfig) -> Result<ExperimentReport> {
    let mut report = ExperimentReport {
        experiment: 3,
        ..Default::default()
    };
    let cutoff = season_start(corpus, season)?;
    let (train, test, deg) = crate::corpus::temporal_split(corpus, cutoff);
    if matches!(deg, Some(crate::corpus::SplitDegeneracy::EmptyTrain)) {
        return Err(Error::Data(format!("no training data before season {season}")));
    }
    let season_matches: Vec<MatchRecord> = test
        .matches
        .iter()
        .filter(|m| m.season == season && m.odds.is_some())
        .cloned()
        .collect();
    if season_matches.is_empty() {
        return Err(Error::Data(format!("no odds-bearing matches in season {season}")));
    }
    report.notes.push("gameweeks derived from date order in fixture blocks".into());

    let (models, excluded) = fit_all_models(&train, config, cutoff)?;
    report.excluded.extend(excluded);

    // temporal audit: the fitted models must predate every gameweek
    let train_until = models.upstream.dc_train_until;
    let weeks = derive_gameweeks(&season_matches, EPL_GAMEWEEK_SIZE);
    let n_weeks = weeks.iter().map(|(w, _)| *w).max().unwrap_or(0);
    let mut audit_violations = 0;
    for (_, m) in &weeks {
        if train_until.is_some_and(|d| d >= m.date) {
            audit_violations += 1;
        }
    }
    if audit_violations > 0 {
        return Err(Error::Model(format!(
            "temporal audit failed: {audit_violations} matches dated on/before the training window"
        )));
    }

    let week_matches: Vec<MatchRecord> = weeks.iter().map(|(_, m)| m.clone()).collect();
    let predictions = predict_batch(&models, &week_matches, corpus)?;

    let mut series: BTreeMap<String, Vec<u32>> = MODEL_IDS
        .iter()
        .map(|id| (id.to_string(), vec![0u32; n_weeks]))
        .collect();
    let mut cms = [ConfusionMatrix::default(); 4];
    for ((week, _), p) in weeks.iter().zip(&predictions) {
        let picks = p.picks();
        for ((id, pick), cm) in MODEL_IDS.iter().zip(picks).zip(cms.iter_mut()) {
            cm.add(p.actual, pick);
            if pick == p.actual {
                series.get_mut(*id).unwrap()[week - 1] += 1;
            }
        }
    }
    for s in series.values_mut() {
        for w in 1..s.len() {
            s[w] += s[w - 1];
        }
    }
    for (i, id) in MODEL_IDS.iter().enumerate() {
        report.models.insert(id.to_string(), metrics(&cms[i])?);
    }
    report.weekly_cumulative = series;
    Ok(report)
}
