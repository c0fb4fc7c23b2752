//! Emoji-to-name translation backed by the bundled codepoint table.

use std::collections::HashMap;
use std::sync::OnceLock;

use super::TextprepError;

const BUNDLED_TABLE: &str = include_str!("../../data/emoji_table.csv");

/// Maps single emoji codepoints to lowercase underscore names.
#[derive(Debug, Clone)]
pub struct EmojiTable {
    names: HashMap<char, String>,
}

impl EmojiTable {
    /// Parses `codepoint_hex,name` CSV with a header row.
    pub fn parse(text: &str) -> Result<EmojiTable, TextprepError> {
        let mut names = HashMap::new();
        for (i, line) in text.lines().enumerate() {
            if i == 0 || line.trim().is_empty() {
                continue;
            }
            let (hex, name) = line.split_once(',').ok_or_else(|| {
                TextprepError::BadData(format!("emoji table line {}: expected comma", i + 1))
            })?;
            let code = u32::from_str_radix(hex.trim(), 16).map_err(|_| {
                TextprepError::BadData(format!("emoji table line {}: bad codepoint", i + 1))
            })?;
            let ch = char::from_u32(code).ok_or_else(|| {
                TextprepError::BadData(format!("emoji table line {}: invalid scalar", i + 1))
            })?;
            names.insert(ch, name.trim().to_string());
        }
        Ok(EmojiTable { names })
    }

    /// The table shipped with the crate.
    pub fn bundled() -> &'static EmojiTable {
        static TABLE: OnceLock<EmojiTable> = OnceLock::new();
        TABLE.get_or_init(|| EmojiTable::parse(BUNDLED_TABLE).expect("bundled emoji table parses"))
    }

    pub fn len(&self) -> usize {
        self.names.len()
    }

    pub fn is_empty(&self) -> bool {
        self.names.is_empty()
    }

    pub fn name_of(&self, ch: char) -> Option<&str> {
        self.names.get(&ch).map(String::as_str)
    }

    /// Replaces every known emoji with `:name:`, padding with single spaces
    /// so the marker always stands as its own token. Unknown characters are
    /// untouched. Idempotent: output contains no table codepoints.
    pub fn demojize(&self, text: &str) -> String {
        if !text.chars().any(|c| self.names.contains_key(&c)) {
            return text.to_string();
        }
        let mut out = String::with_capacity(text.len() + 16);
        for ch in text.chars() {
            match self.names.get(&ch) {
                Some(name) => {
                    if !out.is_empty() && !out.ends_with(' ') {
                        out.push(' ');
                    }
                    out.push(':');
                    out.push_str(name);
                    out.push(':');
                    out.push(' ');
                }
                None => out.push(ch),
            }
        }
        // trailing pad space from a final emoji
        while out.ends_with(' ') && !text.ends_with(' ') {
            out.pop();
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn thumbs_up_uses_bundled_name() {
        // expected name read from data/emoji_table.csv (1f44d)
        assert_eq!(EmojiTable::bundled().demojize("ok 👍"), "ok :thumbs_up:");
    }

    #[test]
    fn plain_text_is_untouched() {
        assert_eq!(EmojiTable::bundled().demojize("plain text"), "plain text");
    }

    #[test]
    fn adjacent_emoji_are_separated() {
        let out = EmojiTable::bundled().demojize("hi👍👎");
        assert_eq!(out, "hi :thumbs_up: :thumbs_down:");
    }

    proptest! {
        #[test]
        fn demojize_is_idempotent(s in "\\PC{0,40}") {
            let table = EmojiTable::bundled();
            let once = table.demojize(&s);
            prop_assert_eq!(table.demojize(&once), once);
        }
    }
}
