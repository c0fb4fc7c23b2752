//! Lexicon-and-rule sentiment scorer used to generate dataset labels.
//!
//! The scoring rules follow the VADER reference design (Hutto & Gilbert
//! 2014): per-token valences adjusted by degree modifiers, negation,
//! all-caps emphasis, and contrastive "but" clauses, with exclamation and
//! question marks amplifying the signed sum before normalization to
//! `s / sqrt(s^2 + alpha)`. Multiword idiom handling is out of scope. The
//! lexicon, booster, and negator tables are bundled data files; scoring
//! never touches the network.

use std::collections::{HashMap, HashSet};
use std::path::Path;
use std::sync::OnceLock;

use thiserror::Error;

use crate::corpus::Sentiment;

const BUNDLED_LEXICON: &str = include_str!("../data/vader_lexicon.txt");
const BUNDLED_BOOSTERS: &str = include_str!("../data/boosters.tsv");
const BUNDLED_NEGATORS: &str = include_str!("../data/negators.txt");

/// Distance damping for degree modifiers: full effect adjacent, reduced two
/// and three tokens back.
const BOOSTER_DAMPING: [f64; 4] = [0.0, 1.0, 0.95, 0.9];

/// Question-mark amplification: per-mark increment for 2-3 marks, flat cap
/// beyond.
const QMARK_INCREMENT: f64 = 0.18;
const QMARK_CAP: f64 = 0.96;

/// Intensifier applied to valence by "never so|this ..." constructions.
const NEVER_INTENSIFIER: f64 = 1.25;

#[derive(Debug, Error)]
pub enum LexiconError {
    #[error("cannot read {path}: {source}")]
    Io {
        path: String,
        source: std::io::Error,
    },
    #[error("malformed lexicon line {line}: {content:?}")]
    MalformedLine { line: usize, content: String },
    #[error("valence out of range [-4, 4] on line {line}: {token} = {value}")]
    ValenceOutOfRange {
        line: usize,
        token: String,
        value: f64,
    },
}

/// Valence table plus the booster and negator vocabularies.
#[derive(Debug, Clone)]
pub struct Lexicon {
    pub valence: HashMap<String, f64>,
    pub boosters: HashMap<String, f64>,
    pub negators: HashSet<String>,
}

impl Lexicon {
    /// Parses `token<TAB>valence` lines; blank lines and `#` comments are
    /// skipped. Valences outside [-4, 4] are rejected.
    pub fn parse(text: &str) -> Result<Lexicon, LexiconError> {
        let mut valence = HashMap::new();
        for (i, raw_line) in text.lines().enumerate() {
            let line = raw_line.trim_end();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let (token, value) = line.split_once('\t').ok_or(LexiconError::MalformedLine {
                line: i + 1,
                content: line.to_string(),
            })?;
            let value: f64 = value
                .trim()
                .parse()
                .map_err(|_| LexiconError::MalformedLine {
                    line: i + 1,
                    content: line.to_string(),
                })?;
            if !(-4.0..=4.0).contains(&value) {
                return Err(LexiconError::ValenceOutOfRange {
                    line: i + 1,
                    token: token.to_string(),
                    value,
                });
            }
            valence.insert(token.to_string(), value);
        }
        Ok(Lexicon {
            valence,
            boosters: bundled_boosters().clone(),
            negators: bundled_negators().clone(),
        })
    }

    /// The lexicon shipped with the crate.
    pub fn bundled() -> &'static Lexicon {
        static LEX: OnceLock<Lexicon> = OnceLock::new();
        LEX.get_or_init(|| Lexicon::parse(BUNDLED_LEXICON).expect("bundled lexicon parses"))
    }

    pub fn len(&self) -> usize {
        self.valence.len()
    }

    pub fn is_empty(&self) -> bool {
        self.valence.is_empty()
    }

    fn is_negator(&self, token: &str) -> bool {
        self.negators.contains(token) || token.contains("n't")
    }
}

fn bundled_boosters() -> &'static HashMap<String, f64> {
    static BOOSTERS: OnceLock<HashMap<String, f64>> = OnceLock::new();
    BOOSTERS.get_or_init(|| {
        BUNDLED_BOOSTERS
            .lines()
            .map(str::trim)
            .filter(|l| !l.is_empty() && !l.starts_with('#'))
            .map(|l| {
                let (token, incr) = l.split_once('\t').expect("booster line has TAB");
                (token.to_string(), incr.trim().parse().expect("booster increment"))
            })
            .collect()
    })
}

fn bundled_negators() -> &'static HashSet<String> {
    static NEGATORS: OnceLock<HashSet<String>> = OnceLock::new();
    NEGATORS.get_or_init(|| {
        BUNDLED_NEGATORS
            .lines()
            .map(str::trim)
            .filter(|l| !l.is_empty() && !l.starts_with('#'))
            .map(str::to_string)
            .collect()
    })
}

/// Loads a lexicon file from disk; bundled boosters and negators apply.
pub fn load_lexicon(path: impl AsRef<Path>) -> Result<Lexicon, LexiconError> {
    let path = path.as_ref();
    let text = std::fs::read_to_string(path).map_err(|source| LexiconError::Io {
        path: path.display().to_string(),
        source,
    })?;
    Lexicon::parse(&text)
}

/// Normalized sentiment proportions and the compound score in [-1, 1].
#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize)]
pub struct PolarityScores {
    pub pos: f64,
    pub neu: f64,
    pub neg: f64,
    pub compound: f64,
}

impl PolarityScores {
    pub const ZERO: PolarityScores = PolarityScores {
        pos: 0.0,
        neu: 0.0,
        neg: 0.0,
        compound: 0.0,
    };
}

/// All rule constants, pinned so tests can assert them.
#[derive(Debug, Clone, serde::Serialize, serde::Deserialize)]
pub struct ScorerConfig {
    /// Normalization constant in `s / sqrt(s^2 + alpha)`.
    pub alpha: f64,
    /// Added toward the valence sign for ALL-CAPS emphasis.
    pub caps_boost: f64,
    /// Multiplier applied by a preceding negator.
    pub negation_scalar: f64,
    /// Per-mark amplification for `!`, capped at four marks.
    pub exclaim_increment: f64,
    /// Reweighting for tokens before/after a contrastive "but".
    pub but_pre: f64,
    pub but_post: f64,
    /// Label thresholds: compound >= pos is Positive, <= neg is Negative.
    pub pos_threshold: f64,
    pub neg_threshold: f64,
}

impl Default for ScorerConfig {
    fn default() -> Self {
        ScorerConfig {
            alpha: 15.0,
            caps_boost: 0.733,
            negation_scalar: -0.74,
            exclaim_increment: 0.292,
            but_pre: 0.5,
            but_post: 1.5,
            pos_threshold: 0.05,
            neg_threshold: -0.05,
        }
    }
}

impl ScorerConfig {
    pub fn validate(&self) -> Result<(), String> {
        if !(self.pos_threshold > 0.0 && self.neg_threshold < 0.0) {
            return Err("label thresholds must satisfy pos > 0 > neg".to_string());
        }
        if self.alpha <= 0.0 {
            return Err("alpha must be positive".to_string());
        }
        Ok(())
    }
}

/// Whitespace tokens with leading/trailing ASCII punctuation stripped;
/// tokens that would shrink to two or fewer characters (emoticons like
/// `:)`) are kept verbatim.
fn words_and_emoticons(text: &str) -> Vec<&str> {
    text.split_whitespace()
        .map(|token| {
            let stripped = token.trim_matches(|c: char| c.is_ascii_punctuation());
            if stripped.chars().count() <= 2 {
                token
            } else {
                stripped
            }
        })
        .collect()
}

/// True when every cased character is uppercase and at least one exists.
fn is_all_caps(token: &str) -> bool {
    let mut has_cased = false;
    for c in token.chars() {
        if c.is_lowercase() {
            return false;
        }
        if c.is_uppercase() {
            has_cased = true;
        }
    }
    has_cased
}

/// Emphasis only counts when capitalization is mixed: some tokens all-caps,
/// some not.
fn allcap_differential(tokens: &[&str]) -> bool {
    let caps = tokens.iter().filter(|t| is_all_caps(t)).count();
    caps > 0 && caps < tokens.len()
}

fn punctuation_emphasis(text: &str, config: &ScorerConfig) -> f64 {
    let ep_count = text.matches('!').count().min(4);
    let ep = ep_count as f64 * config.exclaim_increment;
    let qm_count = text.matches('?').count();
    let qm = if qm_count > 1 {
        if qm_count <= 3 {
            qm_count as f64 * QMARK_INCREMENT
        } else {
            QMARK_CAP
        }
    } else {
        0.0
    };
    ep + qm
}

/// Scores one text. Empty or hit-free input yields all-zero proportions
/// with compound exactly 0.
pub fn polarity_scores(text: &str, lexicon: &Lexicon, config: &ScorerConfig) -> PolarityScores {
    let tokens = words_and_emoticons(text);
    if tokens.is_empty() {
        return PolarityScores::ZERO;
    }
    let lower: Vec<String> = tokens.iter().map(|t| t.to_lowercase()).collect();
    let cap_diff = allcap_differential(&tokens);

    let mut sentiments = vec![0.0f64; tokens.len()];
    for i in 0..tokens.len() {
        // degree modifiers never score on their own
        if lexicon.boosters.contains_key(lower[i].as_str()) {
            continue;
        }
        // "kind of" is a hedge, not the adjective
        if lower[i] == "kind" && i + 1 < lower.len() && lower[i + 1] == "of" {
            continue;
        }
        let Some(&base) = lexicon.valence.get(lower[i].as_str()) else {
            continue;
        };
        let mut valence = base;
        if is_all_caps(tokens[i]) && cap_diff {
            valence += if base > 0.0 {
                config.caps_boost
            } else {
                -config.caps_boost
            };
        }
        for dist in 1..=3usize {
            if i < dist {
                break;
            }
            let j = i - dist;
            // modifiers that carry their own valence were already scored
            if lexicon.valence.contains_key(lower[j].as_str()) {
                continue;
            }
            if let Some(&incr) = lexicon.boosters.get(lower[j].as_str()) {
                let mut scalar = if valence < 0.0 { -incr } else { incr };
                if is_all_caps(tokens[j]) && cap_diff {
                    scalar += if valence > 0.0 {
                        config.caps_boost
                    } else {
                        -config.caps_boost
                    };
                }
                valence += scalar * BOOSTER_DAMPING[dist];
            }
            valence = negation_adjust(valence, &lower, dist, i, lexicon, config);
        }
        valence = least_adjust(valence, &lower, i, lexicon, config);
        sentiments[i] = valence;
    }

    but_clause_reweight(&lower, &mut sentiments, config);
    score_valence(&sentiments, text, config)
}

fn negation_adjust(
    valence: f64,
    lower: &[String],
    dist: usize,
    i: usize,
    lexicon: &Lexicon,
    config: &ScorerConfig,
) -> f64 {
    let at = |d: usize| lower[i - d].as_str();
    match dist {
        1 => {
            if lexicon.is_negator(at(1)) {
                return valence * config.negation_scalar;
            }
        }
        2 => {
            if at(2) == "never" && matches!(at(1), "so" | "this") {
                return valence * NEVER_INTENSIFIER;
            }
            if at(2) == "without" && at(1) == "must" {
                return valence * NEVER_INTENSIFIER;
            }
            if lexicon.is_negator(at(2)) {
                return valence * config.negation_scalar;
            }
        }
        3 => {
            if at(3) == "never" && (matches!(at(2), "so" | "this") || matches!(at(1), "so" | "this"))
            {
                return valence * NEVER_INTENSIFIER;
            }
            if at(3) == "without" && (at(2) == "must" || at(1) == "must") {
                return valence * NEVER_INTENSIFIER;
            }
            if lexicon.is_negator(at(3)) {
                return valence * config.negation_scalar;
            }
        }
        _ => {}
    }
    valence
}

fn least_adjust(
    valence: f64,
    lower: &[String],
    i: usize,
    lexicon: &Lexicon,
    config: &ScorerConfig,
) -> f64 {
    if i >= 1
        && lower[i - 1] == "least"
        && !lexicon.valence.contains_key(lower[i - 1].as_str())
    {
        if i >= 2 && (lower[i - 2] == "at" || lower[i - 2] == "very") {
            return valence;
        }
        return valence * config.negation_scalar;
    }
    valence
}

fn but_clause_reweight(lower: &[String], sentiments: &mut [f64], config: &ScorerConfig) {
    if let Some(but_index) = lower.iter().position(|t| t == "but") {
        for (i, s) in sentiments.iter_mut().enumerate() {
            if i < but_index {
                *s *= config.but_pre;
            } else if i > but_index {
                *s *= config.but_post;
            }
        }
    }
}

fn score_valence(sentiments: &[f64], text: &str, config: &ScorerConfig) -> PolarityScores {
    if sentiments.is_empty() {
        return PolarityScores::ZERO;
    }
    let punct = punctuation_emphasis(text, config);
    let mut sum: f64 = sentiments.iter().sum();
    if sum > 0.0 {
        sum += punct;
    } else if sum < 0.0 {
        sum -= punct;
    }
    let compound = (sum / (sum * sum + config.alpha).sqrt()).clamp(-1.0, 1.0);

    let mut pos_sum = 0.0;
    let mut neg_sum = 0.0;
    let mut neu_count = 0.0;
    for &s in sentiments {
        if s > 0.0 {
            pos_sum += s + 1.0;
        } else if s < 0.0 {
            neg_sum += s - 1.0;
        } else {
            neu_count += 1.0;
        }
    }
    if pos_sum > neg_sum.abs() {
        pos_sum += punct;
    } else if pos_sum < neg_sum.abs() {
        neg_sum -= punct;
    }
    let total = pos_sum + neg_sum.abs() + neu_count;
    PolarityScores {
        pos: (pos_sum / total).abs(),
        neu: (neu_count / total).abs(),
        neg: (neg_sum / total).abs(),
        compound,
    }
}

/// Threshold rule mapping a compound score onto the three labels; both
/// boundaries are inclusive.
pub fn to_label(scores: &PolarityScores, config: &ScorerConfig) -> Sentiment {
    if scores.compound >= config.pos_threshold {
        Sentiment::Positive
    } else if scores.compound <= config.neg_threshold {
        Sentiment::Negative
    } else {
        Sentiment::Neutral
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn score(text: &str) -> PolarityScores {
        polarity_scores(text, Lexicon::bundled(), &ScorerConfig::default())
    }

    #[test]
    fn empty_text_scores_zero() {
        assert_eq!(score(""), PolarityScores::ZERO);
        assert_eq!(score("   "), PolarityScores::ZERO);
    }

    #[test]
    fn single_positive_word_matches_formula() {
        // valence of "good" read from the bundled lexicon file (1.9)
        let expected = 1.9 / (1.9f64 * 1.9 + 15.0).sqrt();
        let got = score("good");
        assert!((got.compound - expected).abs() < 1e-12);
        assert!((got.compound - 0.4404).abs() < 5e-5);
    }

    #[test]
    fn negated_positive_flips_and_shrinks() {
        let s = -1.9 * 0.74;
        let expected = s / (s * s + 15.0).sqrt();
        let got = score("not good");
        assert!((got.compound - expected).abs() < 1e-12);
        assert!((got.compound - (-0.3412)).abs() < 5e-5);
    }

    #[test]
    fn label_thresholds() {
        let config = ScorerConfig::default();
        let make = |compound| PolarityScores {
            pos: 0.0,
            neu: 1.0,
            neg: 0.0,
            compound,
        };
        assert_eq!(to_label(&make(0.0), &config), Sentiment::Neutral);
        assert_eq!(to_label(&make(0.05), &config), Sentiment::Positive);
        assert_eq!(to_label(&make(-0.05), &config), Sentiment::Negative);
        assert_eq!(to_label(&make(-0.3412), &config), Sentiment::Negative);
        assert_eq!(to_label(&make(0.0499), &config), Sentiment::Neutral);
    }

    #[test]
    fn parse_counts_entries() {
        let lex = Lexicon::parse("good\t1.9\nbad\t-2.5\n").unwrap();
        assert_eq!(lex.len(), 2);
        assert_eq!(lex.valence["good"], 1.9);
    }

    #[test]
    fn bundled_lexicon_pins_good() {
        assert_eq!(Lexicon::bundled().valence["good"], 1.9);
    }

    #[test]
    fn parse_rejects_out_of_range_valence() {
        match Lexicon::parse("odd\t9.0\n") {
            Err(LexiconError::ValenceOutOfRange { line: 1, token, value }) => {
                assert_eq!(token, "odd");
                assert_eq!(value, 9.0);
            }
            other => panic!("expected range error, got {other:?}"),
        }
    }

    #[test]
    fn parse_reports_line_numbers() {
        match Lexicon::parse("good\t1.9\nnotab 0.5\n") {
            Err(LexiconError::MalformedLine { line: 2, .. }) => {}
            other => panic!("expected malformed line 2, got {other:?}"),
        }
    }

    #[test]
    fn booster_amplifies_and_dampens() {
        assert!(score("very good").compound > score("good").compound);
        assert!(score("slightly good").compound < score("good").compound);
        // damped at distance two, but still amplified
        let far = score("very very good");
        assert!(far.compound > score("very good").compound);
    }

    #[test]
    fn but_clause_shifts_weight() {
        let s = score("good but terrible");
        assert!(s.compound < 0.0, "post-but clause dominates: {s:?}");
    }

    #[test]
    fn contraction_negators_are_detected() {
        assert!(score("isn't good").compound < 0.0);
    }

    #[test]
    fn exclamation_amplifies_toward_sign() {
        let base = score("good").compound;
        let one = score("good!").compound;
        let four = score("good!!!!").compound;
        let five = score("good!!!!!").compound;
        assert!(one > base);
        assert!(four > one);
        assert!((five - four).abs() < 1e-12, "capped at four marks");
        let neg = score("bad!!").compound;
        assert!(neg < score("bad").compound);
    }

    #[test]
    fn caps_emphasis_requires_mixed_case() {
        let plain = score("good news today").compound;
        let caps = score("GOOD news today").compound;
        assert!(caps > plain);
        // all-caps text has no differential
        let all_caps = score("GOOD NEWS TODAY").compound;
        assert!((all_caps - plain).abs() < 1e-12);
    }

    #[test]
    fn proportions_sum_to_one_when_tokens_present() {
        for text in ["good bad neutral words here", "just plain words", "bad!!"] {
            let s = score(text);
            assert!((s.pos + s.neu + s.neg - 1.0).abs() < 1e-3, "{text}: {s:?}");
        }
    }

    proptest! {
        #[test]
        fn compound_is_bounded(text in "\\PC{0,80}") {
            let s = score(&text);
            prop_assert!((-1.0..=1.0).contains(&s.compound));
        }

        #[test]
        fn zero_hits_means_zero_compound(text in "[a-c ]{0,40}") {
            // alphabet chosen so no lexicon token can appear
            let s = score(&text);
            prop_assert_eq!(s.compound, 0.0);
        }

        #[test]
        fn exclamation_never_decreases_magnitude(
            text in proptest::sample::select(vec![
                "good", "bad", "very good", "not good", "great news", "terrible week",
            ]),
            marks in 0usize..4,
        ) {
            let base = score(&format!("{text}{}", "!".repeat(marks)));
            let more = score(&format!("{text}{}", "!".repeat(marks + 1)));
            prop_assert!(more.compound.abs() >= base.compound.abs() - 1e-12);
        }

        #[test]
        fn all_caps_single_word_strictly_stronger(
            word in proptest::sample::select(vec!["good", "bad", "great", "terrible", "happy"]),
        ) {
            let plain = score(&format!("{word} stuff today"));
            let caps = score(&format!("{} stuff today", word.to_uppercase()));
            prop_assert!(caps.compound.abs() > plain.compound.abs());
        }

        #[test]
        fn to_label_is_total_step_function(compound in -1.0f64..=1.0) {
            let config = ScorerConfig::default();
            let scores = PolarityScores { pos: 0.0, neu: 1.0, neg: 0.0, compound };
            let label = to_label(&scores, &config);
            let expected = if compound >= 0.05 {
                Sentiment::Positive
            } else if compound <= -0.05 {
                Sentiment::Negative
            } else {
                Sentiment::Neutral
            };
            prop_assert_eq!(label, expected);
        }
    }
}
