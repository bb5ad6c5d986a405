//! Text feature pipeline: relation-tuple extraction, sentence-to-team
//! allocation, count vectorization and assembly of the per-match feature
//! vector x = [mu * V(home), V(away)].

use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};

use crate::corpus::{MatchRecord, PreviewArticle, TeamAliasTable};
use crate::error::{Error, Result};
use crate::par;

/// Default allocation confidence threshold: near-ties go to no team.
pub const DEFAULT_THETA: f64 = 0.6;
/// Default home-advantage weight on the home text block.
pub const DEFAULT_MU: f64 = 1.25;
pub const DEFAULT_MIN_DF: u32 = 3;
pub const DEFAULT_MAX_DF: f64 = 0.9;

/// Alias hits inside tuple arguments count double relative to plain
/// token hits: relation arguments are the sentence's topical anchors.
const TUPLE_MENTION_WEIGHT: f64 = 2.0;
const TOKEN_MENTION_WEIGHT: f64 = 1.0;

/// Lowercases and splits into alphanumeric token runs.
pub fn tokenize(text: &str) -> Vec<String> {
    let mut tokens = Vec::new();
    let mut current = String::new();
    for c in text.chars() {
        if c.is_alphanumeric() {
            current.extend(c.to_lowercase());
        } else if !current.is_empty() {
            tokens.push(std::mem::take(&mut current));
        }
    }
    if !current.is_empty() {
        tokens.push(current);
    }
    tokens
}

const STOP_WORDS: &[&str] = &[
    "a", "about", "above", "after", "again", "against", "all", "am", "an", "and", "any", "are",
    "as", "at", "be", "because", "been", "before", "being", "below", "between", "both", "but",
    "by", "can", "cannot", "could", "did", "do", "does", "doing", "down", "during", "each",
    "few", "for", "from", "further", "had", "has", "have", "having", "he", "her", "here",
    "hers", "herself", "him", "himself", "his", "how", "i", "if", "in", "into", "is", "it",
    "its", "itself", "just", "me", "more", "most", "my", "myself", "no", "nor", "not", "now",
    "of", "off", "on", "once", "only", "or", "other", "our", "ours", "ourselves", "out",
    "over", "own", "s", "same", "she", "should", "so", "some", "such", "t", "than", "that",
    "the", "their", "theirs", "them", "themselves", "then", "there", "these", "they", "this",
    "those", "through", "to", "too", "under", "until", "up", "very", "was", "we", "were",
    "what", "when", "where", "which", "while", "who", "whom", "why", "will", "with", "would",
    "you", "your", "yours", "yourself", "yourselves",
];

fn is_stop_word(token: &str) -> bool {
    STOP_WORDS.binary_search(&token).is_ok()
}

// Fixed pivot lexicon: common verbs and copulas, lowercase.
const VERB_LEXICON: &[&str] = &[
    "are", "be", "beat", "beats", "began", "begin", "begins", "can", "come", "comes", "could",
    "did", "do", "does", "draw", "drew", "expect", "expects", "face", "faced", "faces", "feature",
    "features", "had", "has", "have", "hope", "hopes", "host", "hosts", "is", "keep", "keeps",
    "look", "looks", "lose", "loses", "lost", "make", "makes", "may", "might", "miss", "misses",
    "must", "need", "needs", "play", "played", "plays", "remain", "remains", "return", "returns",
    "score", "scores", "should", "sign", "signs", "sit", "sits", "struggle", "struggles", "take",
    "takes", "travel", "travels", "visit", "visits", "was", "welcome", "welcomes", "were", "will",
    "win", "wins", "won", "would",
];

fn in_verb_lexicon(token: &str) -> bool {
    VERB_LEXICON.binary_search(&token).is_ok()
}

// Morphology guess for tokens outside the lexicon: "-ed" past forms and
// "-s" third-person forms of reasonable length.
fn looks_verb_like(token: &str) -> bool {
    (token.len() >= 4 && token.ends_with("ed")) || (token.len() >= 5 && token.ends_with("s"))
}

/// Subject-relation-object triple over token spans of one sentence.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RelationTuple {
    pub subject: Vec<String>,
    pub relation: Vec<String>,
    pub object: Vec<String>,
    pub sentence_index: usize,
}

/// Heuristic triple extraction: pivot on the first verb-lexicon match
/// (falling back to a morphology guess), subject = tokens before the
/// pivot, object = tokens after, both trimmed of leading stop-words.
pub fn extract_relations(tokens: &[String], sentence_index: usize) -> Vec<RelationTuple> {
    let pivot = tokens
        .iter()
        .position(|t| in_verb_lexicon(t))
        .or_else(|| {
            tokens
                .iter()
                .position(|t| !is_stop_word(t) && looks_verb_like(t))
        });
    let Some(pivot) = pivot else {
        return Vec::new();
    };
    if pivot == 0 || pivot + 1 >= tokens.len() {
        return Vec::new();
    }

    let trim_stops = |span: &[String]| -> Vec<String> {
        span.iter()
            .skip_while(|t| is_stop_word(t))
            .cloned()
            .collect()
    };
    let subject = trim_stops(&tokens[..pivot]);
    let object = trim_stops(&tokens[pivot + 1..]);
    if subject.is_empty() || object.is_empty() {
        return Vec::new();
    }
    vec![RelationTuple {
        subject,
        relation: vec![tokens[pivot].clone()],
        object,
        sentence_index,
    }]
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum AllocatedTeam {
    Home,
    Away,
    None,
}

/// One sentence's allocation: vectorized content, side, confidence.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Allocation {
    pub sentence_index: usize,
    pub vector: SentenceVector,
    pub team: AllocatedTeam,
    pub confidence: f64,
}

fn count_alias_mass(
    tokens: &[String],
    tuple_spans: &[&[String]],
    alias_seqs: &[Vec<String>],
) -> f64 {
    let mut mass = 0.0;
    for seq in alias_seqs {
        let n = seq.len();
        if n == 0 || n > tokens.len() {
            continue;
        }
        for start in 0..=(tokens.len() - n) {
            if tokens[start..start + n] == seq[..] {
                let in_tuple = tuple_spans.iter().any(|span| contains_subseq(span, seq));
                mass += if in_tuple {
                    TUPLE_MENTION_WEIGHT
                } else {
                    TOKEN_MENTION_WEIGHT
                };
            }
        }
    }
    mass
}

fn contains_subseq(haystack: &[String], needle: &[String]) -> bool {
    let n = needle.len();
    n <= haystack.len() && (0..=(haystack.len() - n)).any(|i| haystack[i..i + n] == needle[..])
}

/// Allocates one sentence to the home side, away side or neither.
/// Confidence is the winning side's share of total mention mass; below
/// `theta` (or with zero mass) the sentence goes to no team.
pub fn allocate_sentence(
    tokens: &[String],
    tuples: &[RelationTuple],
    vector: SentenceVector,
    sentence_index: usize,
    match_record: &MatchRecord,
    aliases: &TeamAliasTable,
    theta: f64,
) -> Allocation {
    let tuple_spans: Vec<&[String]> = tuples
        .iter()
        .flat_map(|t| [t.subject.as_slice(), t.object.as_slice()])
        .collect();
    let home_seqs = aliases.alias_token_seqs(&match_record.home_team);
    let away_seqs = aliases.alias_token_seqs(&match_record.away_team);
    let home_mass = count_alias_mass(tokens, &tuple_spans, &home_seqs);
    let away_mass = count_alias_mass(tokens, &tuple_spans, &away_seqs);
    let total = home_mass + away_mass;

    if total == 0.0 {
        return Allocation {
            sentence_index,
            vector,
            team: AllocatedTeam::None,
            confidence: 0.0,
        };
    }
    let (side, win_mass) = if home_mass >= away_mass {
        (AllocatedTeam::Home, home_mass)
    } else {
        (AllocatedTeam::Away, away_mass)
    };
    let confidence = win_mass / total;
    let team = if confidence < theta {
        AllocatedTeam::None
    } else {
        side
    };
    Allocation {
        sentence_index,
        vector,
        team,
        confidence,
    }
}

/// Count-vectorizer vocabulary: alphabetically ordered unigrams with
/// document-frequency bounds, fitted on training-period articles only.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Vocabulary {
    tokens: Vec<String>,
    index: BTreeMap<String, usize>,
    pub doc_freq: Vec<u32>,
    pub fitted_on: String,
}

impl Vocabulary {
    pub fn len(&self) -> usize {
        self.tokens.len()
    }

    pub fn is_empty(&self) -> bool {
        self.tokens.is_empty()
    }

    pub fn index_of(&self, token: &str) -> Option<usize> {
        self.index.get(token).copied()
    }

    pub fn tokens(&self) -> &[String] {
        &self.tokens
    }

    pub fn contains(&self, token: &str) -> bool {
        self.index.contains_key(token)
    }
}

// FNV-1a over article identities; pins the training corpus the
// vocabulary was fitted on.
fn fingerprint(articles: &[&PreviewArticle]) -> String {
    let mut hash: u64 = 0xcbf29ce484222325;
    let mut eat = |bytes: &[u8]| {
        for &b in bytes {
            hash ^= b as u64;
            hash = hash.wrapping_mul(0x100000001b3);
        }
    };
    for a in articles {
        eat(a.match_id.as_bytes());
        eat(b"|");
        eat(a.source.as_bytes());
        eat(b"\n");
    }
    format!("{hash:016x}")
}

/// Fits the vocabulary: unigrams with min_df <= df <= max_df * N after
/// stop-word removal, columns in alphabetical order.
pub fn fit_vocabulary(
    train_articles: &[&PreviewArticle],
    min_df: u32,
    max_df: f64,
) -> Result<Vocabulary> {
    if train_articles.is_empty() {
        return Err(Error::Data("cannot fit vocabulary on zero articles".into()));
    }
    let mut df: BTreeMap<String, u32> = BTreeMap::new();
    for article in train_articles {
        let mut seen: BTreeSet<String> = BTreeSet::new();
        for sentence in &article.sentences {
            for token in tokenize(sentence) {
                if !is_stop_word(&token) {
                    seen.insert(token);
                }
            }
        }
        for token in seen {
            *df.entry(token).or_insert(0) += 1;
        }
    }
    let max_count = (max_df * train_articles.len() as f64).floor() as u32;
    let mut tokens: Vec<(String, u32)> = df
        .into_iter()
        .filter(|(_, c)| *c >= min_df && *c <= max_count.max(min_df))
        .collect();
    tokens.sort_by(|a, b| a.0.cmp(&b.0));

    let index = tokens
        .iter()
        .enumerate()
        .map(|(i, (t, _))| (t.clone(), i))
        .collect();
    Ok(Vocabulary {
        index,
        doc_freq: tokens.iter().map(|(_, c)| *c).collect(),
        tokens: tokens.into_iter().map(|(t, _)| t).collect(),
        fitted_on: fingerprint(train_articles),
    })
}

/// Sparse non-negative token counts over vocabulary columns.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct SentenceVector {
    pub counts: BTreeMap<usize, u32>,
}

impl SentenceVector {
    pub fn add_into(&self, dense: &mut [f64]) {
        for (&col, &count) in &self.counts {
            dense[col] += count as f64;
        }
    }

    pub fn is_zero(&self) -> bool {
        self.counts.is_empty()
    }
}

/// Token counts for one sentence; out-of-vocabulary tokens are ignored.
pub fn vectorize_tokens(tokens: &[String], vocab: &Vocabulary) -> SentenceVector {
    let mut counts = BTreeMap::new();
    for token in tokens {
        if let Some(col) = vocab.index_of(token) {
            *counts.entry(col).or_insert(0) += 1;
        }
    }
    SentenceVector { counts }
}

pub fn vectorize_sentence(sentence: &str, vocab: &Vocabulary) -> SentenceVector {
    vectorize_tokens(&tokenize(sentence), vocab)
}

/// Per-match feature vector x = [mu * V(home), V(away)], length 2V.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TextFeatures {
    pub match_id: String,
    pub home_vector: Vec<f64>,
    pub away_vector: Vec<f64>,
    pub none_vector: Vec<f64>,
    pub mu: f64,
    pub x: Vec<f64>,
    /// True when the match had no preview articles; such rows are
    /// excluded from text-model training.
    pub no_text: bool,
}

/// Runs the full per-match pipeline: segment (if needed), tokenize,
/// extract tuples, allocate, vectorize, sum per side, assemble x.
pub fn build_features(
    match_record: &MatchRecord,
    articles: &[PreviewArticle],
    vocab: &Vocabulary,
    aliases: &TeamAliasTable,
    mu: f64,
    theta: f64,
) -> TextFeatures {
    let v = vocab.len();
    let mut home = vec![0.0; v];
    let mut away = vec![0.0; v];
    let mut none = vec![0.0; v];
    let mut saw_text = false;

    for article in articles {
        let sentences = if article.sentences.is_empty() && !article.text.is_empty() {
            crate::corpus::segment_text(&article.text)
        } else {
            article.sentences.clone()
        };
        for (i, sentence) in sentences.iter().enumerate() {
            saw_text = true;
            let tokens = tokenize(sentence);
            let tuples = extract_relations(&tokens, i);
            let vector = vectorize_tokens(&tokens, vocab);
            let allocation =
                allocate_sentence(&tokens, &tuples, vector, i, match_record, aliases, theta);
            let target = match allocation.team {
                AllocatedTeam::Home => &mut home,
                AllocatedTeam::Away => &mut away,
                AllocatedTeam::None => &mut none,
            };
            allocation.vector.add_into(target);
        }
    }

    let mut x = Vec::with_capacity(2 * v);
    x.extend(home.iter().map(|h| mu * h));
    x.extend(away.iter().copied());
    TextFeatures {
        match_id: match_record.match_id.clone(),
        home_vector: home,
        away_vector: away,
        none_vector: none,
        mu,
        x,
        no_text: !saw_text,
    }
}

/// Feature building for a batch of matches; parallel across matches
/// when the `parallel` feature is enabled, deterministic either way.
pub fn build_all_features(
    matches: &[MatchRecord],
    corpus: &crate::corpus::Corpus,
    vocab: &Vocabulary,
    mu: f64,
    theta: f64,
) -> Vec<TextFeatures> {
    par::map_slice(matches, |m| {
        build_features(m, corpus.previews_for(&m.match_id), vocab, &corpus.aliases, mu, theta)
    })
}

/// Sequential twin of [`build_all_features`] for benches and path
/// equivalence tests.
pub fn build_all_features_seq(
    matches: &[MatchRecord],
    corpus: &crate::corpus::Corpus,
    vocab: &Vocabulary,
    mu: f64,
    theta: f64,
) -> Vec<TextFeatures> {
    par::map_slice_seq(matches, |m| {
        build_features(m, corpus.previews_for(&m.match_id), vocab, &corpus.aliases, mu, theta)
    })
}
