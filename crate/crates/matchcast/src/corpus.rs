//! Corpus ingestion: match results (CSV), preview articles (JSONL),
//! team aliases (JSON), sentence segmentation and temporal splitting.

use std::collections::{BTreeMap, BTreeSet};
use std::fs::File;
use std::io::{BufRead, BufReader, Write};
use std::path::Path;

use chrono::NaiveDate;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::odds::OddsTriple;

pub const CORPUS_FORMAT: &str = "matchcast-corpus";
pub const CORPUS_VERSION: u32 = 1;

const MATCHES_HEADER: &str =
    "match_id,date,season,home_team,away_team,home_goals,away_goals,odds_home,odds_draw,odds_away";

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Outcome {
    HomeWin,
    Draw,
    AwayWin,
}

impl Outcome {
    pub const ALL: [Outcome; 3] = [Outcome::HomeWin, Outcome::Draw, Outcome::AwayWin];

    pub fn index(self) -> usize {
        match self {
            Outcome::HomeWin => 0,
            Outcome::Draw => 1,
            Outcome::AwayWin => 2,
        }
    }

    pub fn from_index(i: usize) -> Outcome {
        Outcome::ALL[i]
    }

    pub fn from_score(home_goals: u32, away_goals: u32) -> Outcome {
        use std::cmp::Ordering::*;
        match home_goals.cmp(&away_goals) {
            Greater => Outcome::HomeWin,
            Equal => Outcome::Draw,
            Less => Outcome::AwayWin,
        }
    }

    pub fn label(self) -> &'static str {
        match self {
            Outcome::HomeWin => "homewin",
            Outcome::Draw => "draw",
            Outcome::AwayWin => "awaywin",
        }
    }
}

/// One fixture with final score and optional closing odds.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MatchRecord {
    pub match_id: String,
    pub date: NaiveDate,
    pub season: String,
    pub home_team: String,
    pub away_team: String,
    pub home_goals: u32,
    pub away_goals: u32,
    pub odds: Option<OddsTriple>,
}

impl MatchRecord {
    pub fn outcome(&self) -> Outcome {
        Outcome::from_score(self.home_goals, self.away_goals)
    }
}

/// Raw preview text bound to a match, segmented into sentences on demand.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PreviewArticle {
    pub match_id: String,
    pub source: String,
    pub text: String,
    #[serde(default)]
    pub sentences: Vec<String>,
}

/// Canonical team id -> surface strings (club names, nicknames, manager
/// and player surnames). Lookup is case-insensitive; aliases are stored
/// lowercased as token sequences.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct TeamAliasTable {
    aliases: BTreeMap<String, BTreeSet<String>>,
}

impl TeamAliasTable {
    pub fn new(raw: BTreeMap<String, Vec<String>>) -> Self {
        let aliases = raw
            .into_iter()
            .map(|(team, names)| {
                let set = names.into_iter().map(|n| n.to_lowercase()).collect();
                (team, set)
            })
            .collect();
        TeamAliasTable { aliases }
    }

    pub fn load(path: &Path) -> Result<Self> {
        let file = File::open(path).map_err(|e| Error::Io {
            path: path.display().to_string(),
            source: e,
        })?;
        let raw: BTreeMap<String, Vec<String>> = serde_json::from_reader(BufReader::new(file))
            .map_err(|e| Error::Data(format!("{}: invalid alias JSON: {e}", path.display())))?;
        Ok(TeamAliasTable::new(raw))
    }

    /// Lowercased alias token sequences for one team, including the
    /// canonical id itself.
    pub fn alias_token_seqs(&self, team: &str) -> Vec<Vec<String>> {
        let mut seqs: Vec<Vec<String>> = vec![vec![team.to_lowercase()]];
        if let Some(set) = self.aliases.get(team) {
            for alias in set {
                let toks: Vec<String> = crate::textfeat::tokenize(alias);
                if !toks.is_empty() {
                    seqs.push(toks);
                }
            }
        }
        seqs.sort();
        seqs.dedup();
        seqs
    }

    pub fn teams(&self) -> impl Iterator<Item = &String> {
        self.aliases.keys()
    }
}

/// Immutable, date-ordered collection of matches, previews and aliases.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct Corpus {
    pub matches: Vec<MatchRecord>,
    pub previews: BTreeMap<String, Vec<PreviewArticle>>,
    pub aliases: TeamAliasTable,
}

impl Corpus {
    pub fn assemble(
        matches: Vec<MatchRecord>,
        previews: Vec<PreviewArticle>,
        aliases: TeamAliasTable,
    ) -> Result<Self> {
        let ids: BTreeSet<&str> = matches.iter().map(|m| m.match_id.as_str()).collect();
        let mut by_match: BTreeMap<String, Vec<PreviewArticle>> = BTreeMap::new();
        for article in previews {
            if !ids.contains(article.match_id.as_str()) {
                return Err(Error::Data(format!(
                    "preview references unknown match_id {}",
                    article.match_id
                )));
            }
            by_match
                .entry(article.match_id.clone())
                .or_default()
                .push(article);
        }
        Ok(Corpus {
            matches,
            previews: by_match,
            aliases,
        })
    }

    pub fn previews_for(&self, match_id: &str) -> &[PreviewArticle] {
        self.previews
            .get(match_id)
            .map(Vec::as_slice)
            .unwrap_or(&[])
    }

    pub fn find_match(&self, match_id: &str) -> Option<&MatchRecord> {
        self.matches.iter().find(|m| m.match_id == match_id)
    }

    pub fn seasons(&self) -> Vec<String> {
        let mut seen = BTreeSet::new();
        let mut out = Vec::new();
        for m in &self.matches {
            if seen.insert(m.season.clone()) {
                out.push(m.season.clone());
            }
        }
        out
    }

    /// Segments every preview article in place.
    pub fn segment_all(&mut self) {
        for articles in self.previews.values_mut() {
            for article in articles.iter_mut() {
                article.sentences = segment_text(&article.text);
            }
        }
    }

    pub fn save(&self, path: &Path) -> Result<()> {
        let container = CorpusContainer {
            format: CORPUS_FORMAT.to_string(),
            version: CORPUS_VERSION,
            corpus: self.clone(),
        };
        let bytes = serde_json::to_vec(&container)
            .map_err(|e| Error::Data(format!("corpus serialization failed: {e}")))?;
        write_atomic(path, &bytes)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let file = File::open(path).map_err(|e| Error::Io {
            path: path.display().to_string(),
            source: e,
        })?;
        let container: CorpusContainer = serde_json::from_reader(BufReader::new(file))
            .map_err(|e| Error::Data(format!("{}: invalid corpus cache: {e}", path.display())))?;
        if container.format != CORPUS_FORMAT {
            return Err(Error::Data(format!(
                "not a corpus cache (format tag {})",
                container.format
            )));
        }
        if container.version != CORPUS_VERSION {
            return Err(Error::Data(format!(
                "corpus cache version {} unsupported (expected {})",
                container.version, CORPUS_VERSION
            )));
        }
        Ok(container.corpus)
    }
}

#[derive(Serialize, Deserialize)]
struct CorpusContainer {
    format: String,
    version: u32,
    corpus: Corpus,
}

/// Writes via a temp file in the target directory plus rename.
pub fn write_atomic(path: &Path, bytes: &[u8]) -> Result<()> {
    let dir = path.parent().unwrap_or_else(|| Path::new("."));
    let io_err = |e: std::io::Error| Error::Io {
        path: path.display().to_string(),
        source: e,
    };
    let mut tmp = tempfile::NamedTempFile::new_in(dir).map_err(io_err)?;
    tmp.write_all(bytes).map_err(io_err)?;
    tmp.persist(path).map_err(|e| io_err(e.error))?;
    Ok(())
}

/// Loads and validates `matches.csv`, sorted by (date, match_id).
pub fn load_matches(path: &Path) -> Result<Vec<MatchRecord>> {
    let file = File::open(path).map_err(|e| Error::Io {
        path: path.display().to_string(),
        source: e,
    })?;
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(true)
        .from_reader(BufReader::new(file));

    let headers = reader
        .headers()
        .map_err(|e| Error::Data(format!("cannot read CSV header: {e}")))?;
    let got = headers.iter().collect::<Vec<_>>().join(",");
    if got != MATCHES_HEADER {
        return Err(Error::Parse {
            line: 1,
            message: format!("unexpected header `{got}` (expected `{MATCHES_HEADER}`)"),
        });
    }

    let mut records = Vec::new();
    let mut seen_ids = BTreeSet::new();
    for (i, row) in reader.records().enumerate() {
        let line = i + 2; // 1-based, after header
        let row = row.map_err(|e| Error::Parse {
            line,
            message: format!("malformed CSV row: {e}"),
        })?;
        let record = parse_match_row(&row, line)?;
        if !seen_ids.insert(record.match_id.clone()) {
            return Err(Error::Parse {
                line,
                message: format!("duplicate match_id {}", record.match_id),
            });
        }
        records.push(record);
    }
    records.sort_by(|a, b| (a.date, &a.match_id).cmp(&(b.date, &b.match_id)));
    Ok(records)
}

fn parse_match_row(row: &csv::StringRecord, line: usize) -> Result<MatchRecord> {
    let err = |message: String| Error::Parse { line, message };
    if row.len() != 10 {
        return Err(err(format!("expected 10 columns, got {}", row.len())));
    }
    let field = |i: usize| row.get(i).unwrap().trim();

    let date = NaiveDate::parse_from_str(field(1), "%Y-%m-%d")
        .map_err(|e| err(format!("unparsable date `{}`: {e}", field(1))))?;
    let goals = |i: usize, label: &str| -> Result<u32> {
        let raw = field(i);
        let signed: i64 = raw
            .parse()
            .map_err(|_| err(format!("unparsable {label} `{raw}`")))?;
        u32::try_from(signed).map_err(|_| err(format!("negative {label} `{raw}`")))
    };
    let home_goals = goals(5, "home_goals")?;
    let away_goals = goals(6, "away_goals")?;

    let home_team = field(3).to_string();
    let away_team = field(4).to_string();
    if home_team == away_team {
        return Err(err(format!("home and away team identical ({home_team})")));
    }

    let odds_fields = [field(7), field(8), field(9)];
    let odds = if odds_fields.iter().all(|f| f.is_empty()) {
        None
    } else {
        let mut vals = [0.0f64; 3];
        for (v, raw) in vals.iter_mut().zip(odds_fields) {
            *v = raw
                .parse()
                .map_err(|_| err(format!("unparsable odds `{raw}`")))?;
        }
        Some(
            OddsTriple::new(vals[0], vals[1], vals[2])
                .map_err(|e| err(format!("invalid odds: {e}")))?,
        )
    };

    Ok(MatchRecord {
        match_id: field(0).to_string(),
        date,
        season: field(2).to_string(),
        home_team,
        away_team,
        home_goals,
        away_goals,
        odds,
    })
}

/// Loads `previews.jsonl`: one JSON object per line with string fields
/// `match_id`, `source`, `text`.
pub fn load_previews(path: &Path) -> Result<Vec<PreviewArticle>> {
    #[derive(Deserialize)]
    struct Line {
        match_id: String,
        source: String,
        text: String,
    }

    let file = File::open(path).map_err(|e| Error::Io {
        path: path.display().to_string(),
        source: e,
    })?;
    let mut articles = Vec::new();
    for (i, line) in BufReader::new(file).lines().enumerate() {
        let line_no = i + 1;
        let line = line.map_err(|e| Error::Parse {
            line: line_no,
            message: format!("unreadable line: {e}"),
        })?;
        if line.trim().is_empty() {
            continue;
        }
        let parsed: Line = serde_json::from_str(&line).map_err(|e| Error::Parse {
            line: line_no,
            message: format!("invalid preview JSON: {e}"),
        })?;
        articles.push(PreviewArticle {
            match_id: parsed.match_id,
            source: parsed.source,
            text: parsed.text,
            sentences: Vec::new(),
        });
    }
    Ok(articles)
}

// Trailing-word abbreviations that never end a sentence.
const ABBREVIATIONS: &[&str] = &[
    "St.", "Mr.", "Mrs.", "Ms.", "Dr.", "Prof.", "vs.", "v.", "No.", "Jr.", "Sr.", "etc.", "approx.",
];

/// Splits text on terminal punctuation (., !, ?) followed by whitespace
/// and a capital letter, or by end-of-text. Deterministic and rule-based.
pub fn segment_text(text: &str) -> Vec<String> {
    let chars: Vec<char> = text.chars().collect();
    let mut sentences = Vec::new();
    let mut start = 0usize;

    for i in 0..chars.len() {
        let c = chars[i];
        if c != '.' && c != '!' && c != '?' {
            continue;
        }
        // last word including the terminator, for the abbreviation check
        if c == '.' {
            let word_start = (0..=i)
                .rev()
                .find(|&j| chars[j].is_whitespace())
                .map(|j| j + 1)
                .unwrap_or(0);
            let word: String = chars[word_start..=i].iter().collect();
            if ABBREVIATIONS.contains(&word.as_str()) {
                continue;
            }
        }
        let at_end = chars[i + 1..].iter().all(|c| c.is_whitespace());
        let splits = at_end || {
            // whitespace then a capital letter starts the next sentence
            let mut j = i + 1;
            let mut saw_ws = false;
            while j < chars.len() && chars[j].is_whitespace() {
                saw_ws = true;
                j += 1;
            }
            saw_ws
                && j < chars.len()
                && (chars[j].is_uppercase() || chars[j] == '"' || chars[j] == '\u{201c}')
        };
        if splits {
            let sentence: String = chars[start..=i].iter().collect();
            let trimmed = sentence.trim();
            if !trimmed.is_empty() {
                sentences.push(trimmed.to_string());
            }
            start = i + 1;
        }
    }
    if start < chars.len() {
        let tail: String = chars[start..].iter().collect();
        let trimmed = tail.trim();
        if !trimmed.is_empty() {
            sentences.push(trimmed.to_string());
        }
    }
    sentences
}

/// Segments one article, returning it with `sentences` populated.
pub fn segment_sentences(mut article: PreviewArticle) -> PreviewArticle {
    article.sentences = segment_text(&article.text);
    article
}

/// Outcome of a temporal split when one side is empty.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SplitDegeneracy {
    EmptyTrain,
    EmptyTest,
}

/// Splits a corpus at `cutoff`: train strictly before, test on/after.
/// An empty side is reported as a distinct condition alongside the split.
pub fn temporal_split(
    corpus: &Corpus,
    cutoff: NaiveDate,
) -> (Corpus, Corpus, Option<SplitDegeneracy>) {
    let mut train = Corpus {
        matches: Vec::new(),
        previews: BTreeMap::new(),
        aliases: corpus.aliases.clone(),
    };
    let mut test = train.clone();

    for m in &corpus.matches {
        let side = if m.date < cutoff { &mut train } else { &mut test };
        if let Some(articles) = corpus.previews.get(&m.match_id) {
            side.previews.insert(m.match_id.clone(), articles.clone());
        }
        side.matches.push(m.clone());
    }

    let degeneracy = if train.matches.is_empty() {
        Some(SplitDegeneracy::EmptyTrain)
    } else if test.matches.is_empty() {
        Some(SplitDegeneracy::EmptyTest)
    } else {
        None
    };
    (train, test, degeneracy)
}
