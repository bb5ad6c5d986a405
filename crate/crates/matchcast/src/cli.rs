//! `matchcast` command-line entry point: ingest, train, predict,
//! feature export and evaluation. Exit codes: 0 ok, 1 config error,
//! 2 data error, 3 model error. Outputs are written atomically.

use std::collections::BTreeSet;
use std::path::{Path, PathBuf};

use chrono::NaiveDate;
use clap::{Parser, Subcommand, ValueEnum};

use crate::config::RunConfig;
use crate::corpus::{self, Corpus};
use crate::dixon_coles;
use crate::ensemble::{self, TextModel};
use crate::error::{Error, Result};
use crate::eval;
use crate::textfeat;

#[derive(Parser)]
#[command(name = "matchcast", version, about = "Football match outcome prediction")]
struct Cli {
    /// Seed for stochastic operations (overrides the config file)
    #[arg(long, global = true)]
    seed: Option<u64>,

    /// Config file (TOML); flags win over file values
    #[arg(long, global = true)]
    config: Option<PathBuf>,

    #[arg(long, global = true)]
    verbose: bool,

    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum TrainModel {
    Dc,
    Text,
    Ensemble,
}

#[derive(Subcommand)]
enum Command {
    /// Load matches, previews and aliases into a corpus cache
    Ingest {
        #[arg(long)]
        matches: Option<PathBuf>,
        #[arg(long)]
        previews: Option<PathBuf>,
        #[arg(long)]
        aliases: Option<PathBuf>,
        #[arg(long)]
        out: PathBuf,
    },
    /// Train a model on a corpus and write its artifact
    Train {
        #[arg(long, value_enum)]
        model: TrainModel,
        #[arg(long)]
        corpus: PathBuf,
        #[arg(long)]
        out: PathBuf,
        /// Train only on matches strictly before this date (ISO-8601)
        #[arg(long)]
        cutoff: Option<NaiveDate>,
        /// Drop the text features from the ensemble stacker
        #[arg(long)]
        no_text: bool,
    },
    /// Predict one match with a trained artifact
    Predict {
        /// Model artifact path (type is detected from the file)
        #[arg(long)]
        model: PathBuf,
        #[arg(long)]
        corpus: PathBuf,
        #[arg(long, value_name = "MATCH_ID")]
        r#match: String,
    },
    /// Export per-match text features as a dense CSV matrix
    Features {
        #[arg(long)]
        corpus: PathBuf,
        #[arg(long)]
        mu: Option<f64>,
        #[arg(long)]
        out: PathBuf,
    },
    /// Run one of the three evaluation experiments
    Evaluate {
        #[arg(long, value_parser = clap::value_parser!(u8).range(1..=3))]
        experiment: u8,
        #[arg(long)]
        corpus: PathBuf,
        #[arg(long)]
        out: PathBuf,
        /// Seasons for experiment 1 (comma-separated)
        #[arg(long, value_delimiter = ',')]
        seasons: Vec<String>,
        /// Target season for experiment 3
        #[arg(long)]
        season: Option<String>,
        /// Week-by-week CSV output path (experiment 3)
        #[arg(long)]
        weekly_csv: Option<PathBuf>,
        #[arg(long)]
        no_text: bool,
    },
}

/// Parses argv and runs; returns the process exit code.
pub fn run<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(e) => {
            // help/version are not errors
            use clap::error::ErrorKind::*;
            let _ = e.print();
            return match e.kind() {
                DisplayHelp | DisplayVersion => 0,
                _ => 1,
            };
        }
    };
    match dispatch(cli) {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}

fn dispatch(cli: Cli) -> Result<()> {
    let config = match &cli.config {
        Some(path) => RunConfig::load(path)?,
        None => RunConfig::default(),
    };
    let seed = cli.seed.or(config.seed).unwrap_or(42);

    match cli.command {
        Command::Ingest {
            matches,
            previews,
            aliases,
            out,
        } => {
            let pick = |flag: Option<PathBuf>, from_config: &Option<PathBuf>, name: &str| {
                flag.or_else(|| from_config.clone())
                    .ok_or_else(|| Error::Config(format!("--{name} is required")))
            };
            let matches_path = pick(matches, &config.paths.matches, "matches")?;
            let previews_path = pick(previews, &config.paths.previews, "previews")?;
            let aliases_path = pick(aliases, &config.paths.aliases, "aliases")?;
            cmd_ingest(&matches_path, &previews_path, &aliases_path, &out, cli.verbose)
        }
        Command::Train {
            model,
            corpus,
            out,
            cutoff,
            no_text,
        } => cmd_train(model, &corpus, &out, cutoff, no_text, &config, seed),
        Command::Predict {
            model,
            corpus,
            r#match,
        } => cmd_predict(&model, &corpus, &r#match),
        Command::Features { corpus, mu, out } => {
            cmd_features(&corpus, mu.unwrap_or(config.model.mu), &out, &config)
        }
        Command::Evaluate {
            experiment,
            corpus,
            out,
            seasons,
            season,
            weekly_csv,
            no_text,
        } => cmd_evaluate(
            experiment, &corpus, &out, &seasons, season.as_deref(), weekly_csv.as_deref(),
            no_text, &config, seed,
        ),
    }
}

fn cmd_ingest(
    matches: &Path,
    previews: &Path,
    aliases: &Path,
    out: &Path,
    verbose: bool,
) -> Result<()> {
    let match_records = corpus::load_matches(matches)?;
    let articles = corpus::load_previews(previews)?;
    let alias_table = corpus::TeamAliasTable::load(aliases)?;
    let mut corpus = Corpus::assemble(match_records, articles, alias_table)?;
    corpus.segment_all();
    corpus.save(out)?;
    if verbose {
        eprintln!(
            "ingested {} matches, {} previewed fixtures -> {}",
            corpus.matches.len(),
            corpus.previews.len(),
            out.display()
        );
    }
    println!(
        "corpus: {} matches, {} fixtures with previews",
        corpus.matches.len(),
        corpus.previews.len()
    );
    Ok(())
}

fn training_window(corpus: &Corpus, cutoff: Option<NaiveDate>) -> Result<(Corpus, NaiveDate)> {
    match cutoff {
        Some(date) => {
            let (train, _, deg) = corpus::temporal_split(corpus, date);
            if matches!(deg, Some(corpus::SplitDegeneracy::EmptyTrain)) {
                return Err(Error::Data(format!("no matches before cutoff {date}")));
            }
            Ok((train, date))
        }
        None => {
            let as_of = corpus
                .matches
                .iter()
                .map(|m| m.date)
                .max()
                .ok_or_else(|| Error::Data("corpus has no matches".into()))?
                .succ_opt()
                .unwrap();
            Ok((corpus.clone(), as_of))
        }
    }
}

fn cmd_train(
    model: TrainModel,
    corpus_path: &Path,
    out: &Path,
    cutoff: Option<NaiveDate>,
    no_text: bool,
    config: &RunConfig,
    seed: u64,
) -> Result<()> {
    let corpus = Corpus::load(corpus_path)?;
    let (train, as_of) = training_window(&corpus, cutoff)?;
    let ens_config = config.ensemble_config(seed, no_text);

    match model {
        TrainModel::Dc => {
            let params = dixon_coles::fit(&train.matches, &config.fit_options(), as_of)?;
            dixon_coles::save_artifact(&params, out)?;
            println!("dixon-coles artifact written to {}", out.display());
        }
        TrainModel::Text => {
            let text = TextModel::fit(&train.matches, &train, &ens_config)?;
            ensemble::save_text_artifact(&text, out)?;
            println!("text model artifact written to {}", out.display());
        }
        TrainModel::Ensemble => {
            let (stacker, _metas, report) = ensemble::train_ensemble(&train, &ens_config)?;
            // full-train upstream artifacts alongside the stacker, for predict
            let upstream = ensemble::fit_upstream(&train, &ens_config, as_of)?;
            let text_path = sibling(out, "text");
            let dc_path = sibling(out, "dc");
            ensemble::save_text_artifact(&upstream.text, &text_path)?;
            dixon_coles::save_artifact(&upstream.dc, &dc_path)?;
            ensemble::save_artifact(
                &stacker,
                text_path.file_name().and_then(|s| s.to_str()),
                dc_path.file_name().and_then(|s| s.to_str()),
                out,
            )?;
            println!(
                "ensemble artifact written to {} (trained on {} matches, {} excluded)",
                out.display(),
                report.trained_on,
                report.excluded.len()
            );
        }
    }
    Ok(())
}

fn sibling(out: &Path, tag: &str) -> PathBuf {
    let stem = out.file_stem().and_then(|s| s.to_str()).unwrap_or("model");
    out.with_file_name(format!("{stem}.{tag}.json"))
}

fn artifact_type(path: &Path) -> Result<String> {
    let text = std::fs::read_to_string(path).map_err(|e| Error::Io {
        path: path.display().to_string(),
        source: e,
    })?;
    let value: serde_json::Value = serde_json::from_str(&text)
        .map_err(|e| Error::Model(format!("{}: invalid artifact: {e}", path.display())))?;
    value
        .get("type")
        .and_then(|t| t.as_str())
        .map(String::from)
        .ok_or_else(|| Error::Model(format!("{}: artifact has no type tag", path.display())))
}

fn cmd_predict(model_path: &Path, corpus_path: &Path, match_id: &str) -> Result<()> {
    let corpus = Corpus::load(corpus_path)?;
    let m = corpus
        .find_match(match_id)
        .ok_or_else(|| Error::Data(format!("match {match_id} not in corpus")))?
        .clone();

    let probs = match artifact_type(model_path)?.as_str() {
        dixon_coles::ARTIFACT_TYPE => {
            let params = dixon_coles::load_artifact(model_path)?;
            dixon_coles::predict_with_fallback(&params, &m.home_team, &m.away_team)?.0
        }
        ensemble::TEXT_ARTIFACT_TYPE => {
            let text = ensemble::load_text_artifact(model_path)?;
            text.predict(&m, &corpus)?
        }
        ensemble::ARTIFACT_TYPE => {
            let (stacker, text_ref, dc_ref) = ensemble::load_artifact_with_refs(model_path)?;
            let dir = model_path.parent().unwrap_or_else(|| Path::new("."));
            let text_ref = text_ref
                .ok_or_else(|| Error::Model("ensemble artifact lacks a text model reference".into()))?;
            let dc_ref = dc_ref
                .ok_or_else(|| Error::Model("ensemble artifact lacks a dixon-coles reference".into()))?;
            let text = ensemble::load_text_artifact(&dir.join(text_ref))?;
            let dc = dixon_coles::load_artifact(&dir.join(dc_ref))?;
            let upstream = ensemble::Upstream {
                text,
                dc,
                dc_train_until: None,
            };
            let meta = ensemble::build_meta_features(&m, &upstream, &corpus)?;
            stacker.predict_from_meta(&meta)?
        }
        other => {
            return Err(Error::Model(format!("unsupported artifact type {other}")));
        }
    };
    println!(
        "{match_id} homewin={:.4} draw={:.4} awaywin={:.4}",
        probs.home, probs.draw, probs.away
    );
    Ok(())
}

fn cmd_features(corpus_path: &Path, mu: f64, out: &Path, config: &RunConfig) -> Result<()> {
    let corpus = Corpus::load(corpus_path)?;
    let articles: Vec<&corpus::PreviewArticle> = corpus
        .matches
        .iter()
        .flat_map(|m| corpus.previews_for(&m.match_id))
        .collect();
    let vocab = textfeat::fit_vocabulary(&articles, config.model.min_df, config.model.max_df)?;
    let features =
        textfeat::build_all_features(&corpus.matches, &corpus, &vocab, mu, config.model.theta);

    let mut csv = String::from("match_id");
    for prefix in ["h", "a"] {
        for token in vocab.tokens() {
            csv.push_str(&format!(",{prefix}_{token}"));
        }
    }
    csv.push('\n');
    for f in &features {
        csv.push_str(&f.match_id);
        for v in &f.x {
            csv.push_str(&format!(",{v}"));
        }
        csv.push('\n');
    }
    corpus::write_atomic(out, csv.as_bytes())?;
    println!(
        "wrote {} feature rows ({} columns) to {}",
        features.len(),
        2 * vocab.len(),
        out.display()
    );
    Ok(())
}

#[allow(clippy::too_many_arguments)]
fn cmd_evaluate(
    experiment: u8,
    corpus_path: &Path,
    out: &Path,
    seasons: &[String],
    season: Option<&str>,
    weekly_csv: Option<&Path>,
    no_text: bool,
    config: &RunConfig,
    seed: u64,
) -> Result<()> {
    let corpus = Corpus::load(corpus_path)?;
    let eval_config = config.eval_config(seed, no_text);

    let report = match experiment {
        1 => {
            let seasons: Vec<String> = if seasons.is_empty() {
                // default: the last three seasons present in the corpus
                let all = corpus.seasons();
                let known: BTreeSet<String> = all.into_iter().collect();
                known.into_iter().rev().take(3).rev().collect()
            } else {
                seasons.to_vec()
            };
            eval::experiment1(&corpus, &seasons, &eval_config)?
        }
        2 => eval::experiment2(&corpus, seed, &eval_config)?,
        3 => {
            let season = season
                .map(String::from)
                .or_else(|| corpus.seasons().last().cloned())
                .ok_or_else(|| Error::Data("corpus has no seasons".into()))?;
            eval::experiment3(&corpus, &season, &eval_config)?
        }
        _ => unreachable!("clap range guards 1..=3"),
    };

    let json = serde_json::to_vec_pretty(&report)
        .map_err(|e| Error::Model(format!("report serialization failed: {e}")))?;
    corpus::write_atomic(out, &json)?;
    if let Some(csv_path) = weekly_csv {
        corpus::write_atomic(csv_path, report.weekly_csv().as_bytes())?;
    }
    print!("{}", report.render_table());
    println!("report written to {}", out.display());
    Ok(())
}
