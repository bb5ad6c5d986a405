//! Football match outcome prediction combining a Dixon-Coles goal model,
//! bag-of-words features from match-preview articles, bookmaker-odds
//! baselines and a random-forest ensemble stacker.

pub mod cli;
pub mod config;
pub mod corpus;
pub mod dixon_coles;
pub mod ensemble;
pub mod error;
pub mod eval;
pub mod forest;
pub mod odds;
pub mod par;
pub mod textfeat;

pub use corpus::{Corpus, MatchRecord, Outcome, PreviewArticle, TeamAliasTable};
pub use error::{Error, Result};
pub use odds::{OddsTriple, OutcomeProbs};
