//! Explainable sentiment analysis for scraped social-media comments.
//!
//! The pipeline runs end to end: CSV ingestion and deduplication
//! ([`corpus`]), staged text normalization ([`textprep`]), lexicon-and-rule
//! sentiment labeling ([`lexicon`]), a compact permutation-LM transformer
//! classifier ([`xlnet`]) built on a small reverse-mode tape ([`numerics`]),
//! a full evaluation suite ([`metrics`]), Shapley token attributions
//! ([`shapley`]) with a bag-of-words oracle ([`baseline`]), and a
//! command-line driver ([`cli`]).

pub mod baseline;
pub mod cli;
pub mod corpus;
pub mod lexicon;
pub mod metrics;
pub mod numerics;
pub mod shapley;
pub mod textprep;
pub mod xlnet;

pub use corpus::{CleanComment, DatasetSplit, LabeledComment, RawComment, Sentiment};
pub use lexicon::{Lexicon, PolarityScores, ScorerConfig};
