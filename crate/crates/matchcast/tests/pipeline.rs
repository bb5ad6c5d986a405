//! End-to-end CLI pipeline on synthetic fixture files:
//! ingest -> train (all three models) -> predict -> features -> evaluate,
//! plus exit-code and corpus-cache version checks.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use matchcast::cli;

const TEAMS: [&str; 8] = ["ARS", "CHE", "LIV", "MCI", "MUN", "TOT", "EVE", "WHU"];

fn run(args: &[&str]) -> i32 {
    cli::run(std::iter::once("matchcast").chain(args.iter().copied()))
}

/// Writes matches.csv, previews.jsonl, aliases.json and a small-forest
/// config.toml into `dir`; returns the ingested corpus cache path.
fn write_fixtures(dir: &Path) -> PathBuf {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let mut csv = String::from(
        "match_id,date,season,home_team,away_team,home_goals,away_goals,odds_home,odds_draw,odds_away\n",
    );
    let mut jsonl = String::new();
    let seasons = [("2016-17", "2016-08", 200usize), ("2017-18", "2017-08", 120)];
    let mut id = 0usize;
    for (season, ym, count) in seasons {
        for k in 0..count {
            let h = TEAMS[rng.gen_range(0..TEAMS.len())];
            let mut a = TEAMS[rng.gen_range(0..TEAMS.len())];
            while a == h {
                a = TEAMS[rng.gen_range(0..TEAMS.len())];
            }
            // ten fixtures per week, months that always have 28 days
            let week = k / 10;
            let (year, month): (i32, u32) = {
                let y: i32 = ym[..4].parse().unwrap();
                let m0: u32 = ym[5..].parse().unwrap();
                let m = m0 + (week / 4) as u32;
                (y + ((m - 1) / 12) as i32, (m - 1) % 12 + 1)
            };
            let day = week % 4 * 7 + 1;
            let (hg, ag) = (rng.gen_range(0..4u32), rng.gen_range(0..4u32));
            // one match per season deliberately lacks odds
            let odds = if k == 5 {
                ",,".to_string()
            } else {
                format!(
                    "{:.2},{:.2},{:.2}",
                    1.5 + 4.0 * rng.gen::<f64>(),
                    2.5 + 2.0 * rng.gen::<f64>(),
                    1.5 + 4.0 * rng.gen::<f64>()
                )
            };
            writeln!(
                csv,
                "m{id:04},{year}-{month:02}-{day:02},{season},{h},{a},{hg},{ag},{odds}"
            )
            .unwrap();
            let (hl, al) = (h.to_lowercase(), a.to_lowercase());
            let text = format!(
                "{hl} rovers host a tricky fixture and must defend set pieces. \
                 The {al} travel in patchy form after injuries hit their midfield. \
                 {hl} rovers scored twice last week and press high."
            );
            writeln!(
                jsonl,
                "{}",
                serde_json::json!({"match_id": format!("m{id:04}"), "source": "synthetic", "text": text})
            )
            .unwrap();
            id += 1;
        }
    }
    std::fs::write(dir.join("matches.csv"), csv).unwrap();
    std::fs::write(dir.join("previews.jsonl"), jsonl).unwrap();

    let aliases: serde_json::Value = TEAMS
        .iter()
        .map(|t| {
            (
                t.to_string(),
                serde_json::json!([format!("{} rovers", t.to_lowercase()), format!("the {}", t.to_lowercase())]),
            )
        })
        .collect::<serde_json::Map<String, serde_json::Value>>()
        .into();
    std::fs::write(dir.join("aliases.json"), aliases.to_string()).unwrap();

    std::fs::write(
        dir.join("config.toml"),
        "seed = 42\n[model]\nmin_df = 2\n[forest]\nn_trees = 40\nmin_leaf = 3\n",
    )
    .unwrap();

    let corpus = dir.join("corpus.json");
    assert_eq!(
        run(&[
            "ingest",
            "--matches",
            dir.join("matches.csv").to_str().unwrap(),
            "--previews",
            dir.join("previews.jsonl").to_str().unwrap(),
            "--aliases",
            dir.join("aliases.json").to_str().unwrap(),
            "--out",
            corpus.to_str().unwrap(),
        ]),
        0
    );
    assert!(corpus.is_file());
    corpus
}

#[test]
fn full_pipeline() {
    let dir = tempfile::tempdir().unwrap();
    let dir = dir.path();
    let corpus = write_fixtures(dir);
    let corpus = corpus.to_str().unwrap();
    let config = dir.join("config.toml");
    let config = config.to_str().unwrap();

    // train each model family and predict the same match with it
    let dc = dir.join("dc.json");
    assert_eq!(
        run(&[
            "train", "--model", "dc", "--corpus", corpus, "--out", dc.to_str().unwrap(),
            "--cutoff", "2017-08-01",
        ]),
        0
    );
    assert_eq!(
        run(&["predict", "--model", dc.to_str().unwrap(), "--corpus", corpus, "--match", "m0210"]),
        0
    );

    let text = dir.join("text.json");
    assert_eq!(
        run(&[
            "--config", config, "train", "--model", "text", "--corpus", corpus,
            "--out", text.to_str().unwrap(), "--cutoff", "2017-08-01",
        ]),
        0
    );
    assert_eq!(
        run(&["predict", "--model", text.to_str().unwrap(), "--corpus", corpus, "--match", "m0210"]),
        0
    );

    let ens = dir.join("ens.json");
    assert_eq!(
        run(&[
            "--config", config, "train", "--model", "ensemble", "--corpus", corpus,
            "--out", ens.to_str().unwrap(), "--cutoff", "2017-08-01",
        ]),
        0
    );
    // sibling upstream artifacts must exist next to the stacker
    assert!(dir.join("ens.text.json").is_file());
    assert!(dir.join("ens.dc.json").is_file());
    assert_eq!(
        run(&["predict", "--model", ens.to_str().unwrap(), "--corpus", corpus, "--match", "m0210"]),
        0
    );

    // feature export: header + one row per match, 1 + 2V columns
    let feats = dir.join("features.csv");
    assert_eq!(
        run(&["--config", config, "features", "--corpus", corpus, "--out", feats.to_str().unwrap()]),
        0
    );
    let body = std::fs::read_to_string(&feats).unwrap();
    let mut lines = body.lines();
    let header: Vec<&str> = lines.next().unwrap().split(',').collect();
    assert_eq!(header[0], "match_id");
    assert!(header.len() > 1 && header.len() % 2 == 1, "{} columns", header.len());
    assert_eq!(lines.clone().count(), 320);
    for line in lines {
        assert_eq!(line.split(',').count(), header.len());
    }
}

#[test]
fn evaluate_experiments() {
    let dir = tempfile::tempdir().unwrap();
    let dir = dir.path();
    let corpus = write_fixtures(dir);
    let corpus = corpus.to_str().unwrap();
    let config = dir.join("config.toml");
    let config = config.to_str().unwrap();

    let out2 = dir.join("exp2.json");
    assert_eq!(
        run(&[
            "--config", config, "evaluate", "--experiment", "2", "--corpus", corpus,
            "--out", out2.to_str().unwrap(),
        ]),
        0
    );
    let report: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(&out2).unwrap()).unwrap();
    assert_eq!(report["experiment"], 2);
    assert!(report["models"]["model4_ensemble"]["accuracy"].is_number());
    assert!(report["draw_detection"].is_object());

    let out3 = dir.join("exp3.json");
    let weekly = dir.join("weekly.csv");
    assert_eq!(
        run(&[
            "--config", config, "evaluate", "--experiment", "3", "--corpus", corpus,
            "--season", "2017-18", "--out", out3.to_str().unwrap(),
            "--weekly-csv", weekly.to_str().unwrap(),
        ]),
        0
    );
    let report: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(&out3).unwrap()).unwrap();
    assert_eq!(report["experiment"], 3);
    let series = report["weekly_cumulative"]["model4_ensemble"].as_array().unwrap();
    assert_eq!(series.len(), 12); // 120 odds-bearing matches minus one, blocks of 10
    // cumulative counts never decrease
    let vals: Vec<u64> = series.iter().map(|v| v.as_u64().unwrap()).collect();
    assert!(vals.windows(2).all(|w| w[0] <= w[1]));

    let weekly_body = std::fs::read_to_string(&weekly).unwrap();
    assert!(weekly_body.lines().count() >= 13, "weekly CSV too short:\n{weekly_body}");

    // experiment 1 on the season with training history
    let out1 = dir.join("exp1.json");
    assert_eq!(
        run(&[
            "--config", config, "evaluate", "--experiment", "1", "--corpus", corpus,
            "--seasons", "2017-18", "--out", out1.to_str().unwrap(),
        ]),
        0
    );
    let report: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(&out1).unwrap()).unwrap();
    assert_eq!(report["experiment"], 1);
    for id in ["model1_text", "model2_dixon_coles", "model3_bookmaker", "model4_ensemble"] {
        let acc = report["models"][id]["accuracy"].as_f64().unwrap();
        assert!((0.0..=1.0).contains(&acc), "{id} accuracy {acc}");
    }
}

#[test]
fn exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    let dir = dir.path();

    // help and version succeed; unknown flags are config errors
    assert_eq!(run(&["--help"]), 0);
    assert_eq!(run(&["--version"]), 0);
    assert_eq!(run(&["ingest", "--bogus"]), 1);
    assert_eq!(run(&["evaluate", "--experiment", "9"]), 1);

    // missing input files are data errors
    assert_eq!(
        run(&[
            "ingest",
            "--matches", dir.join("nope.csv").to_str().unwrap(),
            "--previews", dir.join("nope.jsonl").to_str().unwrap(),
            "--aliases", dir.join("nope.json").to_str().unwrap(),
            "--out", dir.join("c.json").to_str().unwrap(),
        ]),
        2
    );

    // malformed CSV header is a data error with the offending line
    std::fs::write(dir.join("bad.csv"), "id,who\n1,x\n").unwrap();
    std::fs::write(dir.join("p.jsonl"), "").unwrap();
    std::fs::write(dir.join("a.json"), "{}").unwrap();
    assert_eq!(
        run(&[
            "ingest",
            "--matches", dir.join("bad.csv").to_str().unwrap(),
            "--previews", dir.join("p.jsonl").to_str().unwrap(),
            "--aliases", dir.join("a.json").to_str().unwrap(),
            "--out", dir.join("c.json").to_str().unwrap(),
        ]),
        2
    );

    // corpus cache version mismatch is a data error
    let corpus = write_fixtures(dir);
    let mut cache: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(&corpus).unwrap()).unwrap();
    cache["version"] = serde_json::json!(99);
    let stale = dir.join("stale.json");
    std::fs::write(&stale, cache.to_string()).unwrap();
    assert_eq!(
        run(&[
            "train", "--model", "dc", "--corpus", stale.to_str().unwrap(),
            "--out", dir.join("dc.json").to_str().unwrap(),
        ]),
        2
    );

    // unknown match id is a data error; unreadable artifact is a model error
    let corpus_s = corpus.to_str().unwrap();
    let dc = dir.join("dc.json");
    assert_eq!(
        run(&["train", "--model", "dc", "--corpus", corpus_s, "--out", dc.to_str().unwrap()]),
        0
    );
    assert_eq!(
        run(&["predict", "--model", dc.to_str().unwrap(), "--corpus", corpus_s, "--match", "zz"]),
        2
    );
    std::fs::write(dir.join("junk.json"), "{\"type\":\"mystery\"}").unwrap();
    assert_eq!(
        run(&[
            "predict", "--model", dir.join("junk.json").to_str().unwrap(),
            "--corpus", corpus_s, "--match", "m0001",
        ]),
        3
    );

    // config file errors are config errors
    std::fs::write(dir.join("bad.toml"), "not toml at all = = =").unwrap();
    assert_eq!(
        run(&[
            "--config", dir.join("bad.toml").to_str().unwrap(),
            "train", "--model", "dc", "--corpus", corpus_s, "--out", dc.to_str().unwrap(),
        ]),
        1
    );
}
