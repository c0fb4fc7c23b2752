//! Pluggable translation clients. Real machine-translation backends are out
//! of scope; the trait is the integration point for them.

use std::collections::HashMap;
use std::sync::Arc;

use super::TextprepError;

/// Translates comment text into English. Implementations must be total on
/// valid UTF-8 and safe for concurrent calls. For the preprocessing pipeline
/// to stay idempotent, translating already-translated text must be a no-op.
pub trait TranslationClient: Send + Sync {
    fn translate(&self, text: &str, lang_hint: Option<&str>) -> Result<String, TextprepError>;

    fn name(&self) -> &'static str;
}

/// Returns its input unchanged; the default client.
#[derive(Debug, Default, Clone)]
pub struct IdentityTranslator;

impl TranslationClient for IdentityTranslator {
    fn translate(&self, text: &str, _lang_hint: Option<&str>) -> Result<String, TextprepError> {
        Ok(text.to_string())
    }

    fn name(&self) -> &'static str {
        "identity"
    }
}

/// Per-word lookup table; unknown words pass through unchanged. Intended for
/// tests and small curated glossaries.
#[derive(Debug, Clone, Default)]
pub struct DictionaryTranslator {
    entries: HashMap<String, String>,
}

impl DictionaryTranslator {
    pub fn new(entries: HashMap<String, String>) -> DictionaryTranslator {
        DictionaryTranslator { entries }
    }

    pub fn from_pairs<'a>(pairs: impl IntoIterator<Item = (&'a str, &'a str)>) -> Self {
        DictionaryTranslator {
            entries: pairs
                .into_iter()
                .map(|(k, v)| (k.to_string(), v.to_string()))
                .collect(),
        }
    }

    /// Parses `word<TAB>translation` lines; `#` starts a comment.
    pub fn from_tsv(text: &str) -> Result<Self, TextprepError> {
        let mut entries = HashMap::new();
        for (i, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let (word, translation) = line.split_once('\t').ok_or_else(|| {
                TextprepError::BadData(format!("dictionary line {}: expected TAB", i + 1))
            })?;
            entries.insert(word.to_string(), translation.to_string());
        }
        Ok(DictionaryTranslator { entries })
    }
}

impl TranslationClient for DictionaryTranslator {
    fn translate(&self, text: &str, _lang_hint: Option<&str>) -> Result<String, TextprepError> {
        let translated: Vec<&str> = text
            .split_whitespace()
            .map(|w| self.entries.get(w).map(String::as_str).unwrap_or(w))
            .collect();
        Ok(translated.join(" "))
    }

    fn name(&self) -> &'static str {
        "dictionary"
    }
}

pub type SharedTranslator = Arc<dyn TranslationClient>;

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn identity_returns_input() {
        let c = IdentityTranslator;
        assert_eq!(c.translate("hola", Some("es")).unwrap(), "hola");
    }

    #[test]
    fn dictionary_translates_known_words_only() {
        let c = DictionaryTranslator::from_pairs([("hola", "hello")]);
        assert_eq!(c.translate("hola amigo", None).unwrap(), "hello amigo");
    }

    #[test]
    fn dictionary_handles_empty_text() {
        let c = DictionaryTranslator::from_pairs([("hola", "hello")]);
        assert_eq!(c.translate("", None).unwrap(), "");
    }
}
