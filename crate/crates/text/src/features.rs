//! The 18 auxiliary features, computed on the raw message.
//!
//! A *word* is a whitespace-separated chunk of the raw text. Its *normal
//! form* is the lowercased chunk with leading and trailing non-alphanumeric
//! characters trimmed; lexicon lookups and uniqueness use the normal form,
//! and words whose normal form is empty take part only in `words` counts.
//! `chars` is the number of Unicode scalar values. Punctuation means ASCII
//! punctuation. Every ratio is 0 when its denominator is 0.
//!
//! | feature | definition |
//! |---|---|
//! | polarity | mean valence of words found in the valence lexicon, in [-1, 1] |
//! | subjectivity | words found in the valence lexicon / words |
//! | sentiment | (positive - negative) / (positive + negative) over lexicon words |
//! | words_vs_length | words / chars |
//! | exclamation_marks | count of `!` |
//! | question_marks | count of `?` |
//! | digit_vs_length | digit chars / chars |
//! | digit_vs_word | words containing a digit / words |
//! | punctuation_vs_length | punctuation chars / chars |
//! | punctuation_vs_words | words containing punctuation / words |
//! | nouns_vs_words | words in the noun list, or of 6+ chars with a noun suffix / words |
//! | sad_vs_words | words in the sad list / words |
//! | angry_vs_words | words in the angry list / words |
//! | capitals_words | words with a letter and no lowercase letter |
//! | capitals_vs_words | capitals_words / words |
//! | unique_words | distinct non-empty normal forms |
//! | repeated_words | distinct normal forms occurring more than once |
//! | number_of_hashtags | words starting with `#` followed by an alphanumeric char |
//!
//! Noun detection is approximate: a fixed list plus suffixes, no tagger.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::lexicon::{ANGRY_WORDS, NOUNS, NOUN_SUFFIXES, SAD_WORDS, VALENCE};

pub const FEATURE_COUNT: usize = 18;

pub const FEATURE_NAMES: [&str; FEATURE_COUNT] = [
    "polarity",
    "subjectivity",
    "sentiment",
    "wordsVsLength",
    "exclamationMarks",
    "questionMarks",
    "digitVsLength",
    "digitVsWord",
    "punctuationVsLength",
    "punctuationVsWords",
    "nounsVsWords",
    "sadVsWords",
    "angryVsWords",
    "capitalsWords",
    "capitalsVsWords",
    "uniqueWords",
    "repeatedWords",
    "numberOfHashtags",
];

#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct FeatureVector {
    pub polarity: f64,
    pub subjectivity: f64,
    pub sentiment: f64,
    pub words_vs_length: f64,
    pub exclamation_marks: f64,
    pub question_marks: f64,
    pub digit_vs_length: f64,
    pub digit_vs_word: f64,
    pub punctuation_vs_length: f64,
    pub punctuation_vs_words: f64,
    pub nouns_vs_words: f64,
    pub sad_vs_words: f64,
    pub angry_vs_words: f64,
    pub capitals_words: f64,
    pub capitals_vs_words: f64,
    pub unique_words: f64,
    pub repeated_words: f64,
    pub number_of_hashtags: f64,
}

/// Indices of the count-valued features in [`FeatureVector::to_array`].
pub const COUNT_FEATURES: [usize; 6] = [4, 5, 13, 15, 16, 17];

impl FeatureVector {
    pub fn to_array(&self) -> [f64; FEATURE_COUNT] {
        [
            self.polarity,
            self.subjectivity,
            self.sentiment,
            self.words_vs_length,
            self.exclamation_marks,
            self.question_marks,
            self.digit_vs_length,
            self.digit_vs_word,
            self.punctuation_vs_length,
            self.punctuation_vs_words,
            self.nouns_vs_words,
            self.sad_vs_words,
            self.angry_vs_words,
            self.capitals_words,
            self.capitals_vs_words,
            self.unique_words,
            self.repeated_words,
            self.number_of_hashtags,
        ]
    }

    pub fn get(&self, name: &str) -> Option<f64> {
        FEATURE_NAMES.iter().position(|n| *n == name).map(|i| self.to_array()[i])
    }
}

fn ratio(num: usize, den: usize) -> f64 {
    if den == 0 {
        0.0
    } else {
        num as f64 / den as f64
    }
}

pub fn normal_form(word: &str) -> String {
    word.trim_matches(|c: char| !c.is_alphanumeric()).to_lowercase()
}

fn valence(word: &str) -> Option<f64> {
    VALENCE.binary_search_by(|(w, _)| w.cmp(&word)).ok().map(|i| VALENCE[i].1)
}

fn is_noun(word: &str) -> bool {
    NOUNS.binary_search(&word).is_ok()
        || (word.chars().count() >= 6 && NOUN_SUFFIXES.iter().any(|s| word.ends_with(s)))
}

pub fn extract_features(raw: &str) -> FeatureVector {
    let words: Vec<&str> = raw.split_whitespace().collect();
    let n = words.len();
    let chars = raw.chars().count();

    let mut digits = 0;
    let mut punct = 0;
    let mut exclaim = 0;
    let mut question = 0;
    for c in raw.chars() {
        if c.is_ascii_digit() {
            digits += 1;
        }
        if c.is_ascii_punctuation() {
            punct += 1;
        }
        match c {
            '!' => exclaim += 1,
            '?' => question += 1,
            _ => {}
        }
    }

    let (mut lexicon_hits, mut valence_sum, mut pos, mut neg) = (0, 0.0, 0, 0);
    let (mut nouns, mut sad, mut angry, mut capitals, mut hashtags) = (0, 0, 0, 0, 0);
    let (mut digit_words, mut punct_words) = (0, 0);
    let mut counts: BTreeMap<String, usize> = BTreeMap::new();
    for w in &words {
        if w.chars().any(|c| c.is_ascii_digit()) {
            digit_words += 1;
        }
        if w.chars().any(|c| c.is_ascii_punctuation()) {
            punct_words += 1;
        }
        if w.chars().any(char::is_alphabetic) && !w.chars().any(char::is_lowercase) {
            capitals += 1;
        }
        if w.strip_prefix('#').and_then(|r| r.chars().next()).is_some_and(char::is_alphanumeric) {
            hashtags += 1;
        }
        let norm = normal_form(w);
        if norm.is_empty() {
            continue;
        }
        if let Some(v) = valence(&norm) {
            lexicon_hits += 1;
            valence_sum += v;
            if v > 0.0 {
                pos += 1;
            } else if v < 0.0 {
                neg += 1;
            }
        }
        if is_noun(&norm) {
            nouns += 1;
        }
        if SAD_WORDS.binary_search(&norm.as_str()).is_ok() {
            sad += 1;
        }
        if ANGRY_WORDS.binary_search(&norm.as_str()).is_ok() {
            angry += 1;
        }
        *counts.entry(norm).or_default() += 1;
    }

    FeatureVector {
        polarity: if lexicon_hits == 0 { 0.0 } else { valence_sum / lexicon_hits as f64 },
        subjectivity: ratio(lexicon_hits, n),
        sentiment: if pos + neg == 0 { 0.0 } else { (pos as f64 - neg as f64) / (pos + neg) as f64 },
        words_vs_length: ratio(n, chars),
        exclamation_marks: exclaim as f64,
        question_marks: question as f64,
        digit_vs_length: ratio(digits, chars),
        digit_vs_word: ratio(digit_words, n),
        punctuation_vs_length: ratio(punct, chars),
        punctuation_vs_words: ratio(punct_words, n),
        nouns_vs_words: ratio(nouns, n),
        sad_vs_words: ratio(sad, n),
        angry_vs_words: ratio(angry, n),
        capitals_words: capitals as f64,
        capitals_vs_words: ratio(capitals, n),
        unique_words: counts.len() as f64,
        repeated_words: counts.values().filter(|&&c| c > 1).count() as f64,
        number_of_hashtags: hashtags as f64,
    }
}
