//! Rule-based lemmatizer: an exception table consulted first, then ordered
//! suffix rules applied until the token reaches a fixed point. Outputs are
//! therefore fixed points themselves, which keeps the preprocessing pipeline
//! idempotent.

use std::collections::HashMap;
use std::sync::OnceLock;

use super::TextprepError;

const BUNDLED_EXCEPTIONS: &str = include_str!("../../data/lemma_exceptions.tsv");

const VOWELS: &[char] = &['a', 'e', 'i', 'o', 'u', 'y'];

#[derive(Debug, Clone, Default)]
pub struct Lemmatizer {
    exceptions: HashMap<String, String>,
}

impl Lemmatizer {
    pub fn new(exceptions: HashMap<String, String>) -> Lemmatizer {
        Lemmatizer { exceptions }
    }

    /// Parses `word<TAB>lemma` lines; `#` starts a comment.
    pub fn parse_exceptions(text: &str) -> Result<Lemmatizer, TextprepError> {
        let mut exceptions = HashMap::new();
        for (i, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let (word, lemma) = line.split_once('\t').ok_or_else(|| {
                TextprepError::BadData(format!("lemma exceptions line {}: expected TAB", i + 1))
            })?;
            exceptions.insert(word.trim().to_string(), lemma.trim().to_string());
        }
        Ok(Lemmatizer { exceptions })
    }

    pub fn bundled() -> &'static Lemmatizer {
        static LEMMA: OnceLock<Lemmatizer> = OnceLock::new();
        LEMMA.get_or_init(|| {
            Lemmatizer::parse_exceptions(BUNDLED_EXCEPTIONS).expect("bundled exceptions parse")
        })
    }

    pub fn exceptions(&self) -> &HashMap<String, String> {
        &self.exceptions
    }

    /// Maps a lowercase token to its base form. Never returns an empty
    /// string: a rule that would empty the token is skipped.
    pub fn lemmatize(&self, token: &str) -> String {
        let mut current = token.to_string();
        loop {
            if let Some(lemma) = self.exceptions.get(&current) {
                return lemma.clone();
            }
            match apply_first_rule(&current) {
                Some(next) if next != current => current = next,
                _ => return current,
            }
        }
    }
}

fn has_vowel(s: &str) -> bool {
    s.chars().any(|c| VOWELS.contains(&c))
}

fn apply_first_rule(word: &str) -> Option<String> {
    if !word.is_ascii() {
        return None;
    }
    let n = word.len();

    // possessive 's
    if n > 2 && word.ends_with("'s") {
        return Some(word[..n - 2].to_string());
    }
    // plural -ies -> y (stories -> story)
    if n > 3 && word.ends_with("ies") {
        return Some(format!("{}y", &word[..n - 3]));
    }
    // -sses -> -ss (classes -> class)
    if n > 4 && word.ends_with("sses") {
        return Some(word[..n - 2].to_string());
    }
    // -es after a sibilant drops both letters (viruses -> virus,
    // boxes -> box); otherwise only the s goes (notes -> note).
    if n > 2 && word.ends_with("es") {
        let stem = &word[..n - 2];
        if stem.ends_with(['s', 'x', 'z']) || stem.ends_with("ch") || stem.ends_with("sh") {
            return Some(stem.to_string());
        }
        return Some(word[..n - 1].to_string());
    }
    // plain plural -s; -ss/-us/-is endings are not plurals
    if n > 1
        && word.ends_with('s')
        && !word.ends_with("ss")
        && !word.ends_with("us")
        && !word.ends_with("is")
    {
        return Some(word[..n - 1].to_string());
    }
    // -eed -> -ee when the stem has a vowel (agreed -> agree); other -eed
    // words (feed, seed) are not past tenses and stay untouched.
    if word.ends_with("eed") {
        if n > 3 && has_vowel(&word[..n - 3]) {
            return Some(word[..n - 1].to_string());
        }
        return None;
    }
    // -ing and -ed with doubling/e repair
    for (suffix, min_stem) in [("ing", 2), ("ed", 2)] {
        if n > suffix.len() + min_stem - 1 && word.ends_with(suffix) {
            let stem = &word[..n - suffix.len()];
            if has_vowel(stem) {
                return Some(repair_stem(stem));
            }
            return None;
        }
    }
    None
}

/// After stripping -ing/-ed: undouble a trailing consonant pair
/// (running -> run) or restore a silent e on a CVC stem (making -> make).
fn repair_stem(stem: &str) -> String {
    let chars: Vec<char> = stem.chars().collect();
    let k = chars.len();
    let is_vowel = |c: char| VOWELS.contains(&c);
    if k >= 2 {
        let last = chars[k - 1];
        if chars[k - 2] == last && !is_vowel(last) && !['l', 's', 'z'].contains(&last) {
            return stem[..stem.len() - 1].to_string();
        }
    }
    if k >= 3 {
        let (a, b, c) = (chars[k - 3], chars[k - 2], chars[k - 1]);
        if !is_vowel(a) && is_vowel(b) && !is_vowel(c) && !['w', 'x', 'y'].contains(&c) {
            return format!("{stem}e");
        }
    }
    stem.to_string()
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn lemma(token: &str) -> String {
        Lemmatizer::bundled().lemmatize(token)
    }

    #[test]
    fn plural_rules() {
        // verified against the rule table: -es after sibilant drops both
        assert_eq!(lemma("viruses"), "virus");
        assert_eq!(lemma("boxes"), "box");
        assert_eq!(lemma("classes"), "class");
        assert_eq!(lemma("stories"), "story");
        assert_eq!(lemma("notes"), "note");
        assert_eq!(lemma("cats"), "cat");
    }

    #[test]
    fn exception_table_wins() {
        assert_eq!(lemma("was"), "be");
        assert_eq!(lemma("cases"), "case");
        assert_eq!(lemma("news"), "news");
    }

    #[test]
    fn no_rule_applies() {
        assert_eq!(lemma("flu"), "flu");
        assert_eq!(lemma("virus"), "virus");
        assert_eq!(lemma("this"), "this");
    }

    #[test]
    fn ing_and_ed_repairs() {
        assert_eq!(lemma("running"), "run");
        assert_eq!(lemma("stopped"), "stop");
        assert_eq!(lemma("making"), "make");
        assert_eq!(lemma("agreed"), "agree");
        assert_eq!(lemma("helping"), "help");
        assert_eq!(lemma("snowing"), "snow");
        // no vowel in the stem: not a suffix
        assert_eq!(lemma("thing"), "thing");
        assert_eq!(lemma("bring"), "bring");
    }

    #[test]
    fn never_empties_the_token() {
        assert_eq!(lemma("s"), "s");
        assert_eq!(lemma("es"), "e");
        assert_eq!(lemma("ing"), "ing");
    }

    #[test]
    fn chained_suffixes_resolve_in_one_call() {
        assert_eq!(lemma("feelings"), "feel");
    }

    proptest! {
        #[test]
        fn lemmatize_is_idempotent(token in "[a-z']{0,12}") {
            let once = lemma(&token);
            prop_assert_eq!(lemma(&once), once);
        }

        #[test]
        fn lemmatize_never_empty(token in "[a-z]{1,12}") {
            prop_assert!(!lemma(&token).is_empty());
        }
    }
}
