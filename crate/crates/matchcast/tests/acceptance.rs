//! Acceptance suite. Criteria 1-9 are hard gates runnable on synthetic
//! fixtures; criteria 10-13 are report-level checks that only run when the
//! real dataset is available (set MATCHCAST_DATA_DIR or place
//! matches.csv / previews.jsonl / aliases.json under ./data). Each test
//! prints one pass/fail/skip line; run with `--nocapture` to see them.

use std::collections::BTreeMap;
use std::path::PathBuf;

use chrono::NaiveDate;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use matchcast::corpus::{Corpus, MatchRecord, PreviewArticle, TeamAliasTable};
use matchcast::dixon_coles::{self, test_support as dc_sim, FitOptions, ScoreGrid};
use matchcast::ensemble::{self, assemble_meta, EnsembleConfig, EnsembleModel, Provenance};
use matchcast::eval::{self, ConfusionMatrix, EvalConfig};
use matchcast::forest::{self, test_support as forest_sim, Hyperparams};
use matchcast::odds::{self, OddsTriple, OutcomeProbs};
use matchcast::textfeat;
use matchcast::Outcome;

fn date(s: &str) -> NaiveDate {
    NaiveDate::parse_from_str(s, "%Y-%m-%d").unwrap()
}

fn assert_prob_sum(p: &OutcomeProbs, what: &str) {
    assert!(
        (p.sum() - 1.0).abs() <= 1e-9,
        "{what}: probabilities sum to {} not 1",
        p.sum()
    );
    for v in p.as_array() {
        assert!((0.0..=1.0).contains(&v), "{what}: probability {v} out of range");
    }
}

/// Synthetic two-season corpus: every match has odds and a preview, team
/// names are covered by the alias table, dates advance in fixture blocks.
fn synthetic_corpus(seed: u64) -> Corpus {
    let teams = ["ARS", "CHE", "LIV", "MCI", "MUN", "TOT", "EVE", "WHU"];
    let mut raw = BTreeMap::new();
    for t in teams {
        raw.insert(
            t.to_string(),
            vec![format!("{} rovers", t.to_lowercase()), format!("the {}", t.to_lowercase())],
        );
    }
    let aliases = TeamAliasTable::new(raw);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);

    let mut matches = Vec::new();
    let mut previews = Vec::new();
    let seasons = [("2016-17", date("2016-08-13"), 200usize), ("2017-18", date("2017-08-12"), 120)];
    let mut id = 0usize;
    for (season, start, count) in seasons {
        for k in 0..count {
            let h = teams[rng.gen_range(0..teams.len())];
            let mut a = teams[rng.gen_range(0..teams.len())];
            while a == h {
                a = teams[rng.gen_range(0..teams.len())];
            }
            let match_id = format!("m{id:04}");
            let (hg, ag) = (rng.gen_range(0..4u32), rng.gen_range(0..4u32));
            let odds_raw: Vec<f64> = (0..3).map(|_| 1.5 + 4.5 * rng.gen::<f64>()).collect();
            matches.push(MatchRecord {
                match_id: match_id.clone(),
                date: start + chrono::Duration::days((k / 10) as i64 * 7),
                season: season.into(),
                home_team: h.into(),
                away_team: a.into(),
                home_goals: hg,
                away_goals: ag,
                odds: Some(OddsTriple::new(odds_raw[0], odds_raw[1], odds_raw[2]).unwrap()),
            });
            let (hl, al) = (h.to_lowercase(), a.to_lowercase());
            previews.push(PreviewArticle {
                match_id,
                source: "synthetic".into(),
                text: format!(
                    "{hl} rovers host a tricky fixture and must defend set pieces. \
                     The {al} travel in patchy form after injuries hit their midfield. \
                     {hl} rovers scored twice last week and press high. \
                     Supporters expect the {al} to rotate the squad before the cup."
                ),
                sentences: vec![],
            });
            id += 1;
        }
    }
    let mut corpus = Corpus::assemble(matches, previews, aliases).unwrap();
    corpus.segment_all();
    corpus
}

fn small_eval_config() -> EvalConfig {
    let forest = Hyperparams { n_trees: 60, min_leaf: 3, ..Default::default() };
    EvalConfig {
        ensemble: EnsembleConfig {
            min_df: 2,
            text_forest: forest.clone(),
            stacker_forest: forest,
            ..Default::default()
        },
        test_games_per_season: 300,
    }
}

#[test]
fn criterion_01_probability_hygiene() {
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let mut produced = 0usize;

    // bookmaker model on random valid odds
    for _ in 0..3000 {
        let o = OddsTriple::new(
            1.01 + 10.0 * rng.gen::<f64>(),
            1.01 + 10.0 * rng.gen::<f64>(),
            1.01 + 10.0 * rng.gen::<f64>(),
        )
        .unwrap();
        assert_prob_sum(&odds::implied_probs(&o).unwrap(), "implied_probs");
        produced += 1;
    }

    // Dixon-Coles score grids over random rates and rho
    for _ in 0..3000 {
        let lambda = 0.2 + 3.0 * rng.gen::<f64>();
        let kappa = 0.2 + 3.0 * rng.gen::<f64>();
        // keep all four corrected cells strictly positive
        let rho_lo = -0.9 / lambda.max(kappa);
        let rho_hi = 0.9 * (1.0 / (lambda * kappa)).min(1.0);
        let rho = rho_lo + (rho_hi - rho_lo) * rng.gen::<f64>();
        let grid = ScoreGrid::from_rates(lambda, kappa, rho, 10).unwrap();
        assert_prob_sum(&grid.outcome_probs(), "score grid");
        produced += 1;
    }

    // forest on random inputs
    let rows = forest_sim::synthetic_3class(200, 2);
    let params = Hyperparams { n_trees: 40, min_leaf: 2, ..Default::default() };
    let f = forest::train(&rows, &params, 3).unwrap();
    for _ in 0..2000 {
        let x = vec![4.0 * rng.gen::<f64>() - 0.5, 3.5 * rng.gen::<f64>() - 0.5, rng.gen()];
        assert_prob_sum(&forest::predict_proba(&f, &x).unwrap(), "forest");
        produced += 1;
    }

    // ensemble stacker on random meta-features
    let metas: Vec<(Vec<f64>, Outcome)> = (0..300)
        .map(|_| {
            let x: Vec<f64> = (0..9).map(|_| rng.gen()).collect();
            (x, Outcome::from_index(rng.gen_range(0..3)))
        })
        .collect();
    let stacker = EnsembleModel {
        stacker: forest::train(&metas, &params, 4).unwrap(),
        no_text: false,
    };
    for _ in 0..2000 {
        let meta = assemble_meta(
            "m",
            random_probs(&mut rng),
            random_probs(&mut rng),
            random_probs(&mut rng),
            Provenance { text_fold: None, dc_train_until: None },
        );
        assert_prob_sum(&stacker.predict_from_meta(&meta).unwrap(), "ensemble");
        produced += 1;
    }

    assert!(produced >= 10_000, "swept only {produced} cases");
    println!("criterion 1: pass (probability hygiene over {produced} cases)");
}

fn random_probs(rng: &mut ChaCha8Rng) -> OutcomeProbs {
    OutcomeProbs::from_masses(
        0.01 + rng.gen::<f64>(),
        0.01 + rng.gen::<f64>(),
        0.01 + rng.gen::<f64>(),
    )
    .unwrap()
}

#[test]
fn criterion_02_dixon_coles_oracle() {
    let grid = ScoreGrid::from_rates(1.0, 1.0, 0.0, 10).unwrap();
    let p = grid.outcome_probs();

    // direct double-sum oracle over the same truncated, renormalized grid
    let pois = |k: u32| -> f64 {
        let mut fact = 1.0;
        for i in 2..=k {
            fact *= i as f64;
        }
        (-1.0f64).exp() / fact
    };
    let mut raw = vec![vec![0.0; 11]; 11];
    let mut total = 0.0;
    for (x, row) in raw.iter_mut().enumerate() {
        for (y, cell) in row.iter_mut().enumerate() {
            *cell = pois(x as u32) * pois(y as u32);
            total += *cell;
        }
    }
    let mut oracle = [0.0f64; 3];
    for (x, row) in raw.iter().enumerate() {
        for (y, cell) in row.iter().enumerate() {
            let idx = if x > y { 0 } else if x == y { 1 } else { 2 };
            oracle[idx] += cell / total;
        }
    }
    assert!((p.home - 0.3457).abs() <= 1e-4, "home {} vs 0.3457", p.home);
    assert!((p.draw - 0.3085).abs() <= 1e-4, "draw {} vs 0.3085", p.draw);
    assert!((p.away - 0.3457).abs() <= 1e-4, "away {} vs 0.3457", p.away);
    assert!((p.home - oracle[0]).abs() <= 1e-12);
    assert!((p.draw - oracle[1]).abs() <= 1e-12);
    assert!((p.away - oracle[2]).abs() <= 1e-12);
    // identical teams, gamma = 1: symmetry is exact
    assert_eq!(p.home, p.away);
    println!("criterion 2: pass (score-grid oracle and symmetry)");
}

#[test]
fn criterion_03_dixon_coles_recovery() {
    let attacks = [1.2, 0.8, 1.05, 0.95];
    let mean_log: f64 = attacks.iter().map(|a: &f64| a.ln()).sum::<f64>() / 4.0;
    let scale = mean_log.exp();
    let attacks: Vec<f64> = attacks.iter().map(|a| a / scale).collect();
    let defenses: Vec<f64> = [1.3, 1.0, 1.2, 1.1].iter().map(|d| d * scale).collect();

    let seeds = 20u64;
    let mut passed = 0u32;
    for seed in 0..seeds {
        let matches =
            dc_sim::simulate_league_stratified(&attacks, &defenses, 1.4, -0.05, 2000, seed);
        let params = dixon_coles::fit(
            &matches,
            &FitOptions { xi: 0.0, ..Default::default() },
            date("2030-06-01"),
        )
        .unwrap();
        let mut ok = (params.home_adv - 1.4).abs() <= 0.05 && (params.rho + 0.05).abs() <= 0.05;
        for (i, (a, d)) in attacks.iter().zip(&defenses).enumerate() {
            let s = params.teams[&format!("T{i}")];
            ok &= (s.attack - a).abs() <= 0.05 && (s.defense - d).abs() <= 0.05;
        }
        passed += u32::from(ok);
    }
    let rate = passed as f64 / seeds as f64;
    assert!(rate >= 0.95, "recovery rate {rate:.2} below 0.95 ({passed}/{seeds})");
    println!("criterion 3: pass (parameter recovery in {passed}/{seeds} seeded runs)");
}

#[test]
fn criterion_04_forest_determinism_and_oracle() {
    let rows = forest_sim::synthetic_3class(200, 17);
    let params = Hyperparams { n_trees: 120, min_leaf: 2, ..Default::default() };

    let f1 = forest::train(&rows, &params, 99).unwrap();
    let f2 = forest::train(&rows, &params, 99).unwrap();
    assert_eq!(
        serde_json::to_string(&f1).unwrap(),
        serde_json::to_string(&f2).unwrap(),
        "same seed must reproduce a bit-identical forest"
    );

    let correct = rows
        .iter()
        .filter(|(x, y)| forest::predict(&f1, x).unwrap() == *y)
        .count();
    let acc = correct as f64 / rows.len() as f64;
    let oracle = forest_sim::knn_oracle_accuracy(&rows);
    assert!(
        (acc - oracle).abs() <= 0.05,
        "forest accuracy {acc:.3} not within 5pp of k-NN oracle {oracle:.3}"
    );

    for (x, _) in &rows {
        let proba = forest::predict_proba(&f1, x).unwrap();
        assert_eq!(forest::predict(&f1, x).unwrap(), proba.argmax());
    }
    println!(
        "criterion 4: pass (deterministic; accuracy {acc:.3} vs oracle {oracle:.3}; predict = argmax)"
    );
}

#[test]
fn criterion_05_text_partition_and_mu_homogeneity() {
    let corpus = synthetic_corpus(5);
    let articles: Vec<&PreviewArticle> = corpus
        .matches
        .iter()
        .flat_map(|m| corpus.previews_for(&m.match_id))
        .collect();
    let vocab = textfeat::fit_vocabulary(&articles, 2, 0.95).unwrap();
    assert!(!vocab.is_empty());

    for m in &corpus.matches {
        let arts = corpus.previews_for(&m.match_id);
        let feats = textfeat::build_features(m, arts, &vocab, &corpus.aliases, 1.25, 0.6);

        // partition oracle: summing every sentence vector must equal
        // home + away + none element-wise
        let mut total = vec![0.0; vocab.len()];
        for a in arts {
            for s in &a.sentences {
                textfeat::vectorize_sentence(s, &vocab).add_into(&mut total);
            }
        }
        for i in 0..vocab.len() {
            let sum = feats.home_vector[i] + feats.away_vector[i] + feats.none_vector[i];
            assert_eq!(total[i], sum, "partition violated at {} token {i}", m.match_id);
        }

        // mu-homogeneity: x = [mu * home, away] exactly
        let feats2 = textfeat::build_features(m, arts, &vocab, &corpus.aliases, 2.5, 0.6);
        for i in 0..vocab.len() {
            assert_eq!(feats.x[i], 1.25 * feats.home_vector[i]);
            assert_eq!(feats2.x[i], 2.5 * feats.home_vector[i]);
            assert_eq!(feats.x[vocab.len() + i], feats2.x[vocab.len() + i]);
        }
    }
    println!("criterion 5: pass (partition property and mu-homogeneity on every match)");
}

#[test]
fn criterion_06_no_leak_audits() {
    let mut corpus = synthetic_corpus(6);

    // plant a token that only occurs in the evaluation season
    let cutoff = date("2017-08-01");
    for m in corpus.matches.clone() {
        if m.date >= cutoff {
            let mut arts = corpus.previews_for(&m.match_id).to_vec();
            for a in &mut arts {
                a.text.push_str(" zyzzogeton watch continues.");
                a.sentences.clear();
            }
            corpus.previews.insert(m.match_id.clone(), arts);
        }
    }
    corpus.segment_all();
    let (train, _test, deg) = matchcast::corpus::temporal_split(&corpus, cutoff);
    assert!(deg.is_none());

    // vocabulary audit: fit on training articles only
    let train_articles: Vec<&PreviewArticle> = train
        .matches
        .iter()
        .flat_map(|m| train.previews_for(&m.match_id))
        .collect();
    let vocab = textfeat::fit_vocabulary(&train_articles, 2, 0.95).unwrap();
    assert!(!vocab.contains("zyzzogeton"), "test-only token leaked into vocabulary");

    // ensemble out-of-fold audit
    let config = small_eval_config();
    let (_model, metas, report) = ensemble::train_ensemble(&train, &config.ensemble).unwrap();
    let violations = ensemble::audit_no_leak(&metas, &report, &train);
    assert_eq!(violations, 0, "ensemble out-of-fold audit found {violations} violations");

    // experiment 3 runs its own temporal provenance audit and errors on
    // any violation
    let report3 = eval::experiment3(&corpus, "2017-18", &config).unwrap();
    assert!(!report3.weekly_cumulative.is_empty());
    println!("criterion 6: pass (vocabulary, out-of-fold and temporal audits clean)");
}

#[test]
fn criterion_07_odds_arithmetic() {
    let p = odds::implied_probs(&OddsTriple::new(2.5, 3.2, 2.9).unwrap()).unwrap();
    assert!((p.home - 0.3783).abs() <= 1e-4);
    assert!((p.draw - 0.2956).abs() <= 1e-4);
    assert!((p.away - 0.3261).abs() <= 1e-4);

    let mut rng = ChaCha8Rng::seed_from_u64(7);
    for _ in 0..5000 {
        let o = OddsTriple::new(
            1.01 + 8.0 * rng.gen::<f64>(),
            1.01 + 8.0 * rng.gen::<f64>(),
            1.01 + 8.0 * rng.gen::<f64>(),
        )
        .unwrap();
        assert_eq!(odds::favourite_pick(&o), odds::implied_probs(&o).unwrap().argmax());
    }

    // boundary strictness: implied (0.25, 0.25, 0.125) normalizes the away
    // probability to exactly 0.125/0.625 = 0.20, which must NOT count
    let at_boundary = OddsTriple::new(4.0, 4.0, 8.0).unwrap();
    assert!(!odds::is_longshot(&at_boundary, Outcome::AwayWin).unwrap());
    let below = OddsTriple::new(4.0, 4.0, 8.5).unwrap();
    assert!(odds::is_longshot(&below, Outcome::AwayWin).unwrap());
    println!("criterion 7: pass (implied probabilities, favourite sweep, longshot boundary)");
}

#[test]
fn criterion_08_metrics_fixtures() {
    // perfect predictor
    let mut cm = ConfusionMatrix::default();
    for o in Outcome::ALL {
        for _ in 0..4 {
            cm.add(o, o);
        }
    }
    let m = eval::metrics(&cm).unwrap();
    assert_eq!((m.accuracy, m.precision, m.recall, m.f1), (1.0, 1.0, 1.0, 1.0));

    // hand-computed mixed matrix:
    // rows = actual (H, D, A), cols = predicted
    //   H: 3 1 0 ; D: 1 1 0 ; A: 0 1 2
    // accuracy = 6/9; precision = (3/4 + 1/3 + 1)/3 ; recall = (3/4 + 1/2 + 2/3)/3
    let mut cm = ConfusionMatrix::default();
    let fill: [(Outcome, Outcome, u32); 6] = [
        (Outcome::HomeWin, Outcome::HomeWin, 3),
        (Outcome::HomeWin, Outcome::Draw, 1),
        (Outcome::Draw, Outcome::HomeWin, 1),
        (Outcome::Draw, Outcome::Draw, 1),
        (Outcome::AwayWin, Outcome::Draw, 1),
        (Outcome::AwayWin, Outcome::AwayWin, 2),
    ];
    for (a, p, n) in fill {
        for _ in 0..n {
            cm.add(a, p);
        }
    }
    let m = eval::metrics(&cm).unwrap();
    // per-class terms divided by 3 and summed, matching the macro average
    let precision = 3.0 / 4.0 / 3.0 + 1.0 / 3.0 / 3.0 + 1.0 / 3.0;
    let recall = 3.0 / 4.0 / 3.0 + 1.0 / 2.0 / 3.0 + 2.0 / 3.0 / 3.0;
    assert_eq!(m.accuracy, 6.0 / 9.0);
    assert_eq!(m.precision, precision);
    assert_eq!(m.recall, recall);
    assert_eq!(m.f1, 2.0 * precision * recall / (precision + recall));

    // degenerate predictor: a class never predicted contributes 0 precision
    let mut cm = ConfusionMatrix::default();
    for _ in 0..5 {
        cm.add(Outcome::HomeWin, Outcome::HomeWin);
    }
    for _ in 0..5 {
        cm.add(Outcome::Draw, Outcome::HomeWin);
    }
    let m = eval::metrics(&cm).unwrap();
    assert_eq!(m.accuracy, 0.5);
    assert_eq!(m.precision, (0.5 + 0.0 + 0.0) / 3.0);
    assert_eq!(m.recall, (1.0 + 0.0 + 0.0) / 3.0);

    // all-homewin on the published class distribution (46.2/27.52/26.32 %)
    let mut cm = ConfusionMatrix::default();
    for (actual, n) in [
        (Outcome::HomeWin, 4620u32),
        (Outcome::Draw, 2752),
        (Outcome::AwayWin, 2632),
    ] {
        for _ in 0..n {
            cm.add(actual, Outcome::HomeWin);
        }
    }
    let m = eval::metrics(&cm).unwrap();
    assert!((m.accuracy - 0.462).abs() <= 5e-4, "accuracy {}", m.accuracy);
    println!("criterion 8: pass (metrics fixtures exact; all-homewin baseline 0.462)");
}

#[test]
fn criterion_09_complementary_experts() {
    // the stacker sees three experts: text is perfect on even rows, the
    // goal model on odd rows, and the bookmaker is weakly informative;
    // a working ensemble must beat every individual expert
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    let make = |rng: &mut ChaCha8Rng, n: usize, offset: usize| -> Vec<(Vec<Outcome>, Outcome)> {
        (0..n)
            .map(|i| {
                let y = Outcome::from_index(rng.gen_range(0..3));
                let noise = Outcome::from_index(rng.gen_range(0..3));
                let weak = if rng.gen::<f64>() < 0.45 { y } else { noise };
                let (text, dc) = if (i + offset) % 2 == 0 { (y, noise) } else { (noise, y) };
                (vec![text, dc, weak], y)
            })
            .collect()
    };
    let confident = |pick: Outcome| -> OutcomeProbs {
        let mut masses = [0.05; 3];
        masses[pick.index()] = 0.9;
        OutcomeProbs::from_masses(masses[0], masses[1], masses[2]).unwrap()
    };
    let vague = |pick: Outcome| -> OutcomeProbs {
        let mut masses = [0.32; 3];
        masses[pick.index()] = 0.36;
        OutcomeProbs::from_masses(masses[0], masses[1], masses[2]).unwrap()
    };
    let to_meta = |(picks, y): &(Vec<Outcome>, Outcome), i: usize| {
        let confident_text = i % 2 == 0;
        let meta = assemble_meta(
            &format!("m{i}"),
            if confident_text { confident(picks[0]) } else { vague(picks[0]) },
            if confident_text { vague(picks[1]) } else { confident(picks[1]) },
            vague(picks[2]),
            Provenance { text_fold: None, dc_train_until: None },
        );
        (meta, *y)
    };

    let train_rows = make(&mut rng, 600, 0);
    let test_rows = make(&mut rng, 300, 0);
    let train_meta: Vec<(Vec<f64>, Outcome)> = train_rows
        .iter()
        .enumerate()
        .map(|(i, r)| {
            let (meta, y) = to_meta(r, i);
            (meta.x, y)
        })
        .collect();
    let params = Hyperparams { n_trees: 120, min_leaf: 2, ..Default::default() };
    let model = EnsembleModel {
        stacker: forest::train(&train_meta, &params, 11).unwrap(),
        no_text: false,
    };

    let mut correct = [0u32; 4]; // text, dc, book, ensemble
    for (i, r) in test_rows.iter().enumerate() {
        let (meta, y) = to_meta(r, i);
        let picks = [
            meta.text_probs.argmax(),
            meta.dc_probs.argmax(),
            meta.book_probs.argmax(),
            model.predict_from_meta(&meta).unwrap().argmax(),
        ];
        for (c, p) in correct.iter_mut().zip(picks) {
            *c += u32::from(p == y);
        }
    }
    let acc: Vec<f64> = correct.iter().map(|&c| c as f64 / test_rows.len() as f64).collect();
    for (name, &a) in ["text", "goal model", "bookmaker"].iter().zip(&acc[..3]) {
        assert!(
            acc[3] > a,
            "ensemble {:.3} does not strictly beat {name} {a:.3}",
            acc[3]
        );
    }
    println!(
        "criterion 9: pass (ensemble {:.3} > text {:.3}, goal model {:.3}, bookmaker {:.3})",
        acc[3], acc[0], acc[1], acc[2]
    );
}

// ---- criteria 10-13: real-dataset report checks ----

fn real_dataset() -> Option<Corpus> {
    let dir = std::env::var_os("MATCHCAST_DATA_DIR")
        .map(PathBuf::from)
        .unwrap_or_else(|| {
            PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../data")
        });
    let matches_path = dir.join("matches.csv");
    let previews_path = dir.join("previews.jsonl");
    let aliases_path = dir.join("aliases.json");
    if !(matches_path.is_file() && previews_path.is_file() && aliases_path.is_file()) {
        return None;
    }
    let matches = matchcast::corpus::load_matches(&matches_path).ok()?;
    let previews = matchcast::corpus::load_previews(&previews_path).ok()?;
    let aliases = TeamAliasTable::load(&aliases_path).ok()?;
    let mut corpus = Corpus::assemble(matches, previews, aliases).ok()?;
    corpus.segment_all();
    Some(corpus)
}

fn eval_seasons(corpus: &Corpus) -> Vec<String> {
    // every season except the first, which has no training history
    corpus.seasons().into_iter().skip(1).collect()
}

fn report_check(criterion: u8, ok: bool, detail: &str) {
    // report-level: print the outcome but do not gate the build
    let verdict = if ok { "pass" } else { "warn" };
    println!("criterion {criterion}: {verdict} ({detail})");
}

#[test]
fn criterion_10_bookmaker_accuracy() {
    let Some(corpus) = real_dataset() else {
        println!("criterion 10: skipped (dataset not available)");
        return;
    };
    let report = eval::experiment1(&corpus, &eval_seasons(&corpus), &EvalConfig::default()).unwrap();
    let acc = report.models["model3_bookmaker"].accuracy;
    report_check(10, (acc - 0.5243).abs() <= 0.02, &format!("bookmaker accuracy {acc:.4}"));
}

#[test]
fn criterion_11_model_accuracy_bands() {
    let Some(corpus) = real_dataset() else {
        println!("criterion 11: skipped (dataset not available)");
        return;
    };
    let report = eval::experiment1(&corpus, &eval_seasons(&corpus), &EvalConfig::default()).unwrap();
    let dc = report.models["model2_dixon_coles"].accuracy;
    let ens = report.models["model4_ensemble"].accuracy;
    let ok = (0.55..=0.62).contains(&dc) && (0.59..=0.67).contains(&ens) && ens >= dc;
    report_check(11, ok, &format!("goal model {dc:.4}, ensemble {ens:.4}"));
}

#[test]
fn criterion_12_detection_rates() {
    let Some(corpus) = real_dataset() else {
        println!("criterion 12: skipped (dataset not available)");
        return;
    };
    let report = eval::experiment2(&corpus, 42, &EvalConfig::default()).unwrap();
    let rate = |map: &BTreeMap<String, Option<f64>>, id: &str| map[id].unwrap_or(0.0);
    let d4 = rate(&report.draw_detection, "model4_ensemble");
    let d2 = rate(&report.draw_detection, "model2_dixon_coles");
    let d3 = rate(&report.draw_detection, "model3_bookmaker");
    let l1 = rate(&report.longshot_detection, "model1_text");
    let l4 = rate(&report.longshot_detection, "model4_ensemble");
    let ok = d4 > 0.15 && d2 <= 0.02 && d3 <= 0.02 && l1 > l4;
    report_check(
        12,
        ok,
        &format!("draws: ensemble {d4:.3}, goal {d2:.3}, book {d3:.3}; longshots: text {l1:.3} vs ensemble {l4:.3}"),
    );
}

#[test]
fn criterion_13_walk_forward() {
    let Some(corpus) = real_dataset() else {
        println!("criterion 13: skipped (dataset not available)");
        return;
    };
    let season = corpus.seasons().last().cloned().unwrap();
    let report = eval::experiment3(&corpus, &season, &EvalConfig::default()).unwrap();
    let last = |id: &str| *report.weekly_cumulative[id].last().unwrap_or(&0);
    let ens = last("model4_ensemble");
    let book = last("model3_bookmaker");
    let csv = report.weekly_csv();
    let ok = ens >= book && csv.lines().count() > 1;
    report_check(13, ok, &format!("week-final ensemble {ens} vs bookmakers {book}; CSV emitted"));
}
