//! Bundled word lists. Small by design; entries are lowercase.

pub const STOP_WORDS: &[&str] = &[
    "a", "about", "above", "after", "again", "all", "am", "an", "and", "any", "are", "as", "at", "be",
    "because", "been", "before", "being", "below", "between", "both", "but", "by", "can", "could", "d",
    "did", "do", "does", "doing", "don", "down", "during", "each", "few", "for", "from", "further", "had",
    "has", "have", "having", "he", "her", "here", "hers", "herself", "him", "himself", "his", "how", "i",
    "if", "in", "into", "is", "it", "its", "itself", "just", "ll", "m", "me", "more", "most", "my",
    "myself", "nor", "now", "of", "off", "on", "once", "only", "or", "other", "our", "ours", "ourselves",
    "out", "over", "own", "re", "rt", "s", "same", "she", "should", "so", "some", "such", "t", "than",
    "that", "the", "their", "theirs", "them", "themselves", "then", "there", "these", "they", "this",
    "those", "through", "to", "too", "under", "until", "up", "ve", "very", "was", "we", "were", "what",
    "when", "where", "which", "while", "who", "whom", "why", "will", "with", "would", "you", "your",
    "yours", "yourself", "yourselves",
];

/// Word valence in [-1, 1].
pub const VALENCE: &[(&str, f64)] = &[
    ("afraid", -0.6),
    ("awful", -0.8),
    ("bad", -0.6),
    ("blessed", 0.7),
    ("calm", 0.4),
    ("critical", -0.5),
    ("dangerous", -0.7),
    ("dead", -1.0),
    ("desperate", -0.8),
    ("devastating", -0.9),
    ("disaster", -0.8),
    ("emergency", -0.5),
    ("fine", 0.4),
    ("good", 0.6),
    ("grateful", 0.8),
    ("great", 0.8),
    ("happy", 0.8),
    ("help", -0.2),
    ("hope", 0.5),
    ("horrible", -0.9),
    ("hurt", -0.6),
    ("love", 0.8),
    ("lucky", 0.6),
    ("ok", 0.3),
    ("okay", 0.3),
    ("please", 0.1),
    ("pray", 0.3),
    ("praying", 0.3),
    ("rescued", 0.6),
    ("safe", 0.7),
    ("scared", -0.7),
    ("stranded", -0.6),
    ("stuck", -0.5),
    ("terrible", -0.9),
    ("terrified", -0.9),
    ("thank", 0.7),
    ("thanks", 0.7),
    ("trapped", -0.7),
    ("urgent", -0.4),
    ("worried", -0.6),
    ("worse", -0.7),
    ("worst", -0.9),
];

pub const SAD_WORDS: &[&str] = &[
    "alone", "cry", "crying", "dead", "died", "grief", "heartbroken", "hopeless", "lost", "miss",
    "missing", "mourn", "sad", "sorrow", "tears", "tragic", "unhappy",
];

pub const ANGRY_WORDS: &[&str] = &[
    "angry", "annoyed", "disgusting", "furious", "hate", "idiots", "mad", "outrage", "outraged",
    "pathetic", "rage", "ridiculous", "shame", "useless",
];

pub const NOUNS: &[&str] = &[
    "apartment", "attic", "baby", "boat", "bridge", "building", "car", "child", "children", "city",
    "dad", "daughter", "dog", "door", "family", "father", "floor", "food", "friend", "grandma",
    "grandmother", "help", "highway", "home", "hospital", "house", "husband", "insulin", "kids", "man",
    "medicine", "mom", "mother", "neighbor", "neighbors", "oxygen", "people", "power", "rain", "rescue",
    "road", "roof", "shelter", "son", "st", "storm", "street", "truck", "water", "wife", "woman",
];

/// Suffixes that mark a word of at least six letters as a noun.
pub const NOUN_SUFFIXES: &[&str] = &["tion", "sion", "ment", "ness", "ity", "ance", "ence", "ship", "hood"];
