//! Text side of the dispatcher: cleaning, auxiliary features and a linear
//! multi-label classifier for the six request labels.

pub mod corpus;
pub mod error;
pub mod eval;
pub mod features;
pub mod hashing;
pub mod lexicon;
pub mod model;
pub mod preprocess;

pub use corpus::{read_corpus, synthetic_corpus, write_corpus, LabeledText};
pub use error::{Result, TextError};
pub use eval::{evaluate, EvalReport};
pub use features::{extract_features, FeatureVector, FEATURE_NAMES};
pub use model::{train, Classification, HeadScore, LinearModel, TrainConfig};
pub use preprocess::{preprocess, Preprocessed};
