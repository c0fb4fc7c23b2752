//! Staged, order-sensitive text normalization with a pluggable translation
//! client.
//!
//! Every stage is a total, idempotent `text -> text` function. The default
//! order runs the destructive stages last so the lexicon scorer can be fed
//! the post-translate, post-demojize text (see the `cli` module wiring):
//! translate, demojize, strip_entities, strip_special, lowercase, lemmatize,
//! remove_stopwords.

mod emoji;
mod lemma;
mod translate;

pub use emoji::EmojiTable;
pub use lemma::Lemmatizer;
pub use translate::{DictionaryTranslator, IdentityTranslator, SharedTranslator, TranslationClient};

use std::collections::HashSet;
use std::sync::{Arc, OnceLock};

use regex::Regex;
use thiserror::Error;

use crate::corpus::{CleanComment, RawComment};

const BUNDLED_STOPWORDS: &str = include_str!("../../data/stopwords.txt");

#[derive(Debug, Error)]
pub enum TextprepError {
    #[error("stage `{stage}` failed for comment `{comment_id}`: {message}")]
    Stage {
        stage: Stage,
        comment_id: String,
        message: String,
    },
    #[error("invalid pipeline config: {0}")]
    BadConfig(String),
    #[error("malformed data file: {0}")]
    BadData(String),
}

/// The fixed set of pipeline stages.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Stage {
    Translate,
    Demojize,
    StripEntities,
    StripSpecial,
    Lowercase,
    RemoveStopwords,
    Lemmatize,
}

impl std::fmt::Display for Stage {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let name = match self {
            Stage::Translate => "translate",
            Stage::Demojize => "demojize",
            Stage::StripEntities => "strip_entities",
            Stage::StripSpecial => "strip_special",
            Stage::Lowercase => "lowercase",
            Stage::RemoveStopwords => "remove_stopwords",
            Stage::Lemmatize => "lemmatize",
        };
        f.write_str(name)
    }
}

impl Stage {
    /// Default stage order. Stopword removal runs after lemmatization so
    /// that the pipeline output is a fixed point: lemmas are themselves
    /// lemma-stable, and the stopword filter sees only final forms.
    pub const DEFAULT_ORDER: [Stage; 7] = [
        Stage::Translate,
        Stage::Demojize,
        Stage::StripEntities,
        Stage::StripSpecial,
        Stage::Lowercase,
        Stage::Lemmatize,
        Stage::RemoveStopwords,
    ];
}

/// Configuration for [`run_pipeline`].
#[derive(Clone)]
pub struct PipelineConfig {
    pub stages: Vec<Stage>,
    pub stopwords: HashSet<String>,
    pub lemmatizer: Lemmatizer,
    pub emoji: EmojiTable,
    pub translator: SharedTranslator,
}

impl std::fmt::Debug for PipelineConfig {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("PipelineConfig")
            .field("stages", &self.stages)
            .field("stopwords", &self.stopwords.len())
            .field("translator", &self.translator.name())
            .finish()
    }
}

impl Default for PipelineConfig {
    fn default() -> Self {
        PipelineConfig {
            stages: Stage::DEFAULT_ORDER.to_vec(),
            stopwords: bundled_stopwords().clone(),
            lemmatizer: Lemmatizer::bundled().clone(),
            emoji: EmojiTable::bundled().clone(),
            translator: Arc::new(IdentityTranslator),
        }
    }
}

impl PipelineConfig {
    /// A config that applies no stages; `run_pipeline` then only
    /// whitespace-normalizes and tokenizes.
    pub fn empty() -> PipelineConfig {
        PipelineConfig {
            stages: Vec::new(),
            ..PipelineConfig::default()
        }
    }

    pub fn validate(&self) -> Result<(), TextprepError> {
        let mut seen = HashSet::new();
        for stage in &self.stages {
            if !seen.insert(*stage) {
                return Err(TextprepError::BadConfig(format!(
                    "stage `{stage}` appears more than once"
                )));
            }
        }
        Ok(())
    }
}

/// Parses a stopword list: one token per line, `#` comments allowed.
pub fn parse_stopwords(text: &str) -> HashSet<String> {
    text.lines()
        .map(str::trim)
        .filter(|l| !l.is_empty() && !l.starts_with('#'))
        .map(str::to_string)
        .collect()
}

pub fn bundled_stopwords() -> &'static HashSet<String> {
    static WORDS: OnceLock<HashSet<String>> = OnceLock::new();
    WORDS.get_or_init(|| parse_stopwords(BUNDLED_STOPWORDS))
}

/// Translates via the configured client; the identity client makes this a
/// no-op.
pub fn translate(
    text: &str,
    lang_hint: Option<&str>,
    client: &dyn TranslationClient,
) -> Result<String, TextprepError> {
    client.translate(text, lang_hint)
}

/// Replaces every emoji in the bundled table with its `:name:` marker.
pub fn demojize(text: &str) -> String {
    EmojiTable::bundled().demojize(text)
}

fn entity_patterns() -> &'static [Regex; 3] {
    static PATTERNS: OnceLock<[Regex; 3]> = OnceLock::new();
    PATTERNS.get_or_init(|| {
        [
            // scheme:// or www. URLs
            Regex::new(r"(?i)(?:[a-z][a-z0-9+.-]*://|www\.)\S+").unwrap(),
            // emails
            Regex::new(r"[A-Za-z0-9._%+-]+@[A-Za-z0-9.-]+\.[A-Za-z]{2,}").unwrap(),
            // @mentions
            Regex::new(r"@\w+").unwrap(),
        ]
    })
}

/// Removes URLs, email addresses, and @mentions, collapsing the surrounding
/// whitespace to a single space.
pub fn strip_entities(text: &str) -> String {
    let mut out = text.to_string();
    for pattern in entity_patterns() {
        out = pattern.replace_all(&out, " ").into_owned();
    }
    normalize_whitespace(&out)
}

/// Keeps ASCII letters, digits, spaces, apostrophes, colons, underscores,
/// and `!`/`?`; everything else is dropped. Colons and underscores survive
/// so `:emoji_name:` markers stay intact, and `!`/`?` survive because the
/// lexicon scorer amplifies on them.
pub fn strip_special(text: &str) -> String {
    text.chars()
        .map(|c| {
            if c.is_ascii_alphanumeric() || matches!(c, '\'' | ':' | '_' | '!' | '?') {
                c
            } else {
                ' '
            }
        })
        .collect()
}

/// Removes tokens found in the stopword list; order is preserved.
pub fn remove_stopwords(tokens: &[String], stopwords: &HashSet<String>) -> Vec<String> {
    tokens
        .iter()
        .filter(|t| !stopwords.contains(t.as_str()))
        .cloned()
        .collect()
}

/// Exception-table-then-rules lemmatization of a single lowercase token.
pub fn lemmatize(token: &str, lemmatizer: &Lemmatizer) -> String {
    lemmatizer.lemmatize(token)
}

fn normalize_whitespace(text: &str) -> String {
    text.split_whitespace().collect::<Vec<_>>().join(" ")
}

fn apply_stage(
    stage: Stage,
    text: String,
    raw: &RawComment,
    config: &PipelineConfig,
) -> Result<String, TextprepError> {
    Ok(match stage {
        Stage::Translate => config
            .translator
            .translate(&text, raw.lang_hint.as_deref())
            .map_err(|e| TextprepError::Stage {
                stage,
                comment_id: raw.id.clone(),
                message: e.to_string(),
            })?,
        Stage::Demojize => config.emoji.demojize(&text),
        Stage::StripEntities => strip_entities(&text),
        Stage::StripSpecial => strip_special(&text),
        Stage::Lowercase => text.to_lowercase(),
        Stage::RemoveStopwords => {
            let tokens: Vec<String> = text.split_whitespace().map(str::to_string).collect();
            remove_stopwords(&tokens, &config.stopwords).join(" ")
        }
        Stage::Lemmatize => text
            .split_whitespace()
            .map(|t| config.lemmatizer.lemmatize(t))
            .collect::<Vec<_>>()
            .join(" "),
    })
}

/// Runs the configured stages in order and tokenizes on whitespace.
pub fn run_pipeline(
    raw: &RawComment,
    config: &PipelineConfig,
) -> Result<CleanComment, TextprepError> {
    config.validate()?;
    let mut text = raw.text.clone();
    for &stage in &config.stages {
        text = apply_stage(stage, text, raw, config)?;
    }
    let tokens: Vec<String> = text.split_whitespace().map(str::to_string).collect();
    Ok(CleanComment::from_tokens(raw.id.clone(), tokens))
}

/// Text the lexicon scorer consumes: translated and demojized, but with
/// case, punctuation, and stopwords still intact.
pub fn scoring_text(raw: &RawComment, config: &PipelineConfig) -> Result<String, TextprepError> {
    let mut text = raw.text.clone();
    for stage in [Stage::Translate, Stage::Demojize] {
        if config.stages.contains(&stage) {
            text = apply_stage(stage, text, raw, config)?;
        }
    }
    Ok(text)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn raw(text: &str) -> RawComment {
        RawComment {
            id: "t1".to_string(),
            video_id: "v".to_string(),
            author: "a".to_string(),
            published_at: "2025-01-01T00:00:00Z".to_string(),
            like_count: 0,
            lang_hint: None,
            text: text.to_string(),
        }
    }

    #[test]
    fn strip_entities_examples() {
        assert_eq!(strip_entities("see https://x.y/z now"), "see now");
        assert_eq!(strip_entities("mail a@b.com or @bob"), "mail or");
        assert_eq!(strip_entities("no entities here"), "no entities here");
        assert_eq!(strip_entities("visit www.example.org today"), "visit today");
    }

    #[test]
    fn strip_special_examples() {
        assert_eq!(normalize_whitespace(&strip_special("wow#$ %great")), "wow great");
        assert_eq!(strip_special(":thumbs_up: stays"), ":thumbs_up: stays");
        assert_eq!(strip_special("really?!"), "really?!");
        assert_eq!(normalize_whitespace(&strip_special("héllo wörld")), "h llo w rld");
    }

    #[test]
    fn remove_stopwords_examples() {
        let stops: HashSet<String> = ["the", "is"].iter().map(|s| s.to_string()).collect();
        let tokens: Vec<String> = ["the", "virus", "is", "spreading"]
            .iter()
            .map(|s| s.to_string())
            .collect();
        let kept = remove_stopwords(&tokens, &stops);
        assert_eq!(kept, ["virus", "spreading"]);
        assert!(remove_stopwords(&[], &stops).is_empty());
        let none: Vec<String> = vec!["viral".to_string()];
        assert_eq!(remove_stopwords(&none, &stops), ["viral"]);
    }

    #[test]
    fn pipeline_composes_stage_contracts() {
        // composed by hand from the per-stage contracts, with "the" in the
        // bundled stoplist
        let config = PipelineConfig::default();
        let clean = run_pipeline(&raw("Check https://a.b 👍 The flu!!"), &config).unwrap();
        assert_eq!(clean.clean_text, "check :thumbs_up: flu!!");
        assert_eq!(clean.tokens, ["check", ":thumbs_up:", "flu!!"]);
    }

    #[test]
    fn empty_stage_config_normalizes_whitespace_only() {
        let config = PipelineConfig::empty();
        let clean = run_pipeline(&raw("  Mixed   CASE  kept "), &config).unwrap();
        assert_eq!(clean.clean_text, "Mixed CASE kept");
    }

    #[test]
    fn duplicate_stage_is_rejected() {
        let mut config = PipelineConfig::default();
        config.stages.push(Stage::Lowercase);
        assert!(matches!(
            run_pipeline(&raw("x"), &config),
            Err(TextprepError::BadConfig(_))
        ));
    }

    #[test]
    fn dictionary_translation_feeds_pipeline() {
        let mut config = PipelineConfig::default();
        config.translator = Arc::new(DictionaryTranslator::from_pairs([("hola", "hello")]));
        let mut comment = raw("hola virus");
        comment.lang_hint = Some("es".to_string());
        let clean = run_pipeline(&comment, &config).unwrap();
        assert_eq!(clean.clean_text, "hello virus");
    }

    #[test]
    fn scoring_text_is_pre_destructive() {
        let config = PipelineConfig::default();
        let text = scoring_text(&raw("The FLU is bad!! 👍 https://x.y"), &config).unwrap();
        assert_eq!(text, "The FLU is bad!! :thumbs_up: https://x.y");
    }

    #[test]
    fn clean_tokens_use_restricted_charset() {
        let config = PipelineConfig::default();
        let clean = run_pipeline(&raw("Mixed «CASE» café 😀 really?! a_b:c"), &config).unwrap();
        for token in &clean.tokens {
            assert!(
                token
                    .chars()
                    .all(|c| c.is_ascii_lowercase()
                        || c.is_ascii_digit()
                        || matches!(c, '\'' | ':' | '_' | '!' | '?')),
                "unexpected char in {token:?}"
            );
        }
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(128))]

        #[test]
        fn pipeline_is_idempotent_on_fuzzed_unicode(text in "\\PC{0,60}") {
            let config = PipelineConfig::default();
            let once = run_pipeline(&raw(&text), &config).unwrap();
            let again = run_pipeline(&raw(&once.clean_text), &config).unwrap();
            prop_assert_eq!(&again.clean_text, &once.clean_text);
            prop_assert_eq!(&again.tokens, &once.tokens);
        }

        #[test]
        fn stages_are_individually_idempotent(text in "\\PC{0,60}") {
            prop_assert_eq!(demojize(&demojize(&text)), demojize(&text));
            let se = strip_entities(&text);
            prop_assert_eq!(strip_entities(&se), se.clone());
            let ss = strip_special(&text);
            prop_assert_eq!(strip_special(&ss), ss.clone());
        }

        #[test]
        fn pipeline_never_panics_and_stays_utf8(text in "\\PC{0,80}") {
            let config = PipelineConfig::default();
            let clean = run_pipeline(&raw(&text), &config).unwrap();
            prop_assert_eq!(
                clean.tokens.join(" "),
                clean.clean_text
            );
        }
    }
}
