use proptest::prelude::*;
use rescue_text::features::{COUNT_FEATURES, FEATURE_COUNT};
use rescue_text::{extract_features, preprocess};

const RATIO_FEATURES: [usize; 10] = [1, 3, 6, 7, 8, 9, 10, 11, 12, 14];

proptest! {
    #[test]
    fn preprocess_is_idempotent(raw in "[a-zA-Z0-9 !?#@.,:/'éÜß-]{0,80}") {
        let once = preprocess(&raw);
        let twice = preprocess(&once.cleaned);
        prop_assert_eq!(once.tokens, twice.tokens);
    }

    #[test]
    fn features_are_bounded(raw in "\\PC{0,120}") {
        let f = extract_features(&raw).to_array();
        prop_assert!(f.iter().all(|v| v.is_finite()));
        for i in RATIO_FEATURES {
            prop_assert!((0.0..=1.0).contains(&f[i]), "feature {} = {}", i, f[i]);
        }
        for i in COUNT_FEATURES {
            prop_assert!(f[i] >= 0.0 && f[i].fract() == 0.0);
        }
        prop_assert!((-1.0..=1.0).contains(&f[0]));
        prop_assert!((-1.0..=1.0).contains(&f[2]));
        prop_assert_eq!(f.len(), FEATURE_COUNT);
        prop_assert_eq!(extract_features(&raw), extract_features(&raw));
    }

    #[test]
    fn repetition_matches_brute_force(words in prop::collection::vec("[a-cA-C]{1,2}[!.]?", 0..12)) {
        let raw = words.join(" ");
        let f = extract_features(&raw);
        let norm: Vec<String> = words
            .iter()
            .map(|w| w.trim_matches(|c: char| !c.is_alphanumeric()).to_lowercase())
            .collect();
        let mut distinct = norm.clone();
        distinct.sort();
        distinct.dedup();
        let repeated = distinct.iter().filter(|d| norm.iter().filter(|n| n == d).count() > 1).count();
        prop_assert_eq!(f.unique_words as usize, distinct.len());
        prop_assert_eq!(f.repeated_words as usize, repeated);
    }
}
