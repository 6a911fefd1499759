//! Message cleaning ahead of tokenization.
//!
//! Rules, applied per whitespace-separated word after lowercasing:
//! URLs (`http://`, `https://`, `www.`) and `@mentions` are dropped; the
//! rest is split on any non-alphanumeric character; stop words are removed.

use serde::{Deserialize, Serialize};

use crate::lexicon::STOP_WORDS;

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Preprocessed {
    pub tokens: Vec<String>,
    /// Tokens joined by single spaces.
    pub cleaned: String,
}

fn is_url(word: &str) -> bool {
    word.starts_with("http://") || word.starts_with("https://") || word.starts_with("www.")
}

pub fn is_stop_word(token: &str) -> bool {
    STOP_WORDS.binary_search(&token).is_ok()
}

pub fn tokenize(raw: &str) -> Vec<String> {
    let mut tokens = Vec::new();
    for word in raw.split_whitespace() {
        let word = word.to_lowercase();
        if is_url(&word) || word.starts_with('@') {
            continue;
        }
        for piece in word.split(|c: char| !c.is_alphanumeric()) {
            if !piece.is_empty() && !is_stop_word(piece) {
                tokens.push(piece.to_string());
            }
        }
    }
    tokens
}

pub fn preprocess(raw: &str) -> Preprocessed {
    let tokens = tokenize(raw);
    let cleaned = tokens.join(" ");
    Preprocessed { tokens, cleaned }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn stop_words_sorted_for_lookup() {
        assert!(STOP_WORDS.windows(2).all(|w| w[0] < w[1]));
    }

    #[test]
    fn strips_urls_mentions_and_stop_words() {
        let p = preprocess("HELP!! Need rescue at 123 Main St http://t.co/x");
        assert_eq!(p.tokens, ["help", "need", "rescue", "123", "main", "st"]);
        assert_eq!(p.cleaned, "help need rescue 123 main st");
        assert_eq!(preprocess("@fema #Harvey water in the attic").tokens, ["harvey", "water", "attic"]);
    }

    #[test]
    fn empty_input() {
        assert!(preprocess("").tokens.is_empty());
        assert!(preprocess("   the at www.x.com").tokens.is_empty());
    }
}
