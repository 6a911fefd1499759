//! Six independent logistic heads over hashed tokens plus the auxiliary
//! features.
//!
//! Input layout: `2^dim_bits` token buckets (one count per occurrence)
//! followed by the 18 features. Count-valued features enter as `ln(1 + x)`.

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rescue_core::{Label, LabelVector};
use serde::{Deserialize, Serialize};

use crate::corpus::LabeledText;
use crate::error::{Result, TextError};
use crate::features::{extract_features, COUNT_FEATURES, FEATURE_COUNT};
use crate::hashing::bucket;
use crate::preprocess::tokenize;

pub const MODEL_FORMAT: &str = "rescue-text-model/1";

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct TrainConfig {
    pub dim_bits: u32,
    pub learning_rate: f64,
    pub epochs: usize,
    pub l2: f64,
    /// Mini-batch size; 0 means full-batch gradient descent.
    pub batch_size: usize,
    /// Drives the mini-batch shuffle.
    pub seed: u64,
}

impl Default for TrainConfig {
    fn default() -> Self {
        TrainConfig {
            dim_bits: 18,
            learning_rate: 0.5,
            epochs: 200,
            l2: 1e-4,
            batch_size: 0,
            seed: 7,
        }
    }
}

impl TrainConfig {
    pub fn validate(&self) -> Result<()> {
        if !(1..=24).contains(&self.dim_bits) {
            return Err(TextError::InvalidConfig("dim_bits must lie in 1..=24".into()));
        }
        if !(self.learning_rate.is_finite() && self.learning_rate > 0.0) {
            return Err(TextError::InvalidConfig("learning_rate must be positive".into()));
        }
        if !(self.l2.is_finite() && self.l2 >= 0.0) {
            return Err(TextError::InvalidConfig("l2 must be non-negative".into()));
        }
        if self.epochs == 0 {
            return Err(TextError::InvalidConfig("epochs must be positive".into()));
        }
        Ok(())
    }

    pub fn input_dim(&self) -> usize {
        (1usize << self.dim_bits) + FEATURE_COUNT
    }
}

/// Sparse input row: sorted, de-duplicated `(index, value)` pairs.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct SparseRow(pub Vec<(u32, f64)>);

impl SparseRow {
    pub fn dot(&self, weights: &[f64]) -> f64 {
        self.0.iter().map(|&(i, v)| weights[i as usize] * v).sum()
    }
}

pub fn encode(raw: &str, dim_bits: u32) -> SparseRow {
    let mut pairs: Vec<(u32, f64)> = tokenize(raw).iter().map(|t| (bucket(t, dim_bits), 1.0)).collect();
    let offset = 1u32 << dim_bits;
    let mut feats = extract_features(raw).to_array();
    for i in COUNT_FEATURES {
        feats[i] = feats[i].ln_1p();
    }
    pairs.extend(feats.iter().enumerate().filter(|(_, v)| **v != 0.0).map(|(i, v)| (offset + i as u32, *v)));
    pairs.sort_by_key(|p| p.0);
    let mut merged: Vec<(u32, f64)> = Vec::with_capacity(pairs.len());
    for (i, v) in pairs {
        match merged.last_mut() {
            Some(last) if last.0 == i => last.1 += v,
            _ => merged.push((i, v)),
        }
    }
    SparseRow(merged)
}

pub fn sigmoid(z: f64) -> f64 {
    if z >= 0.0 {
        1.0 / (1.0 + (-z).exp())
    } else {
        let e = z.exp();
        e / (1.0 + e)
    }
}

/// `ln(1 + e^z)` without overflow.
fn softplus(z: f64) -> f64 {
    if z > 0.0 {
        z + (-z).exp().ln_1p()
    } else {
        z.exp().ln_1p()
    }
}

/// Mean logistic loss plus `l2/2 * |w|^2` (bias unpenalized).
pub fn loss(weights: &[f64], bias: f64, rows: &[SparseRow], targets: &[bool], l2: f64) -> f64 {
    data_loss(weights, bias, rows, targets) + 0.5 * l2 * weights.iter().map(|w| w * w).sum::<f64>()
}

fn data_loss(weights: &[f64], bias: f64, rows: &[SparseRow], targets: &[bool]) -> f64 {
    let n = rows.len().max(1) as f64;
    let data: f64 = rows
        .iter()
        .zip(targets)
        .map(|(x, &y)| {
            let z = x.dot(weights) + bias;
            // -[y ln s(z) + (1-y) ln(1 - s(z))]
            if y {
                softplus(-z)
            } else {
                softplus(z)
            }
        })
        .sum();
    data / n
}

/// Gradient of [`loss`]: `(dw, db)`.
pub fn gradient(weights: &[f64], bias: f64, rows: &[SparseRow], targets: &[bool], l2: f64) -> (Vec<f64>, f64) {
    let n = rows.len().max(1) as f64;
    let mut dw: Vec<f64> = weights.iter().map(|w| l2 * w).collect();
    let mut db = 0.0;
    for (x, &y) in rows.iter().zip(targets) {
        let r = (sigmoid(x.dot(weights) + bias) - f64::from(u8::from(y))) / n;
        for &(i, v) in &x.0 {
            dw[i as usize] += r * v;
        }
        db += r;
    }
    (dw, db)
}

#[derive(Clone, Debug, PartialEq)]
pub struct Head {
    pub label: Label,
    /// False when the corpus lacked a positive or a negative example.
    pub available: bool,
    pub bias: f64,
    pub weights: Vec<f64>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct LinearModel {
    pub config: TrainConfig,
    pub heads: Vec<Head>,
    /// Per-head training loss after each epoch (empty for skipped heads).
    pub loss_history: Vec<Vec<f64>>,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct HeadScore {
    pub label: Label,
    /// `None` when the head is unavailable.
    pub score: Option<f64>,
    pub flag: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Classification {
    pub labels: LabelVector,
    pub heads: Vec<HeadScore>,
}

impl Classification {
    pub fn scores(&self) -> [f64; 6] {
        let mut out = [0.0; 6];
        for h in &self.heads {
            out[h.label.index()] = h.score.unwrap_or(0.0);
        }
        out
    }
}

/// Active input indices of a data set (others never move from zero).
fn active_indices(rows: &[SparseRow]) -> Vec<usize> {
    let mut idx: Vec<usize> = rows.iter().flat_map(|r| r.0.iter().map(|p| p.0 as usize)).collect();
    idx.sort_unstable();
    idx.dedup();
    idx
}

fn train_head(label: Label, rows: &[SparseRow], y: &[bool], cfg: &TrainConfig, active: &[usize]) -> (Head, Vec<f64>) {
    let dim = cfg.input_dim();
    let mut w = vec![0.0; dim];
    let mut b = 0.0;
    let mut history = Vec::with_capacity(cfg.epochs);
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed ^ label.index() as u64);
    let mut order: Vec<usize> = (0..rows.len()).collect();
    let batch = if cfg.batch_size == 0 { rows.len() } else { cfg.batch_size };
    for _ in 0..cfg.epochs {
        if batch < rows.len() {
            order.shuffle(&mut rng);
        }
        for chunk in order.chunks(batch) {
            let n = chunk.len() as f64;
            let mut dw = vec![0.0; active.len()];
            let mut db = 0.0;
            for &k in chunk {
                let r = (sigmoid(rows[k].dot(&w) + b) - f64::from(u8::from(y[k]))) / n;
                for &(i, v) in &rows[k].0 {
                    let slot = active.binary_search(&(i as usize)).expect("active index");
                    dw[slot] += r * v;
                }
                db += r;
            }
            for (slot, &i) in active.iter().enumerate() {
                w[i] -= cfg.learning_rate * (dw[slot] + cfg.l2 * w[i]);
            }
            b -= cfg.learning_rate * db;
        }
        let penalty: f64 = active.iter().map(|&i| w[i] * w[i]).sum();
        history.push(data_loss(&w, b, rows, y) + 0.5 * cfg.l2 * penalty);
    }
    (Head { label, available: true, bias: b, weights: w }, history)
}

pub fn train(corpus: &[LabeledText], config: &TrainConfig) -> Result<LinearModel> {
    config.validate()?;
    let rows: Vec<SparseRow> = corpus.iter().map(|c| encode(&c.text, config.dim_bits)).collect();
    let active = active_indices(&rows);
    let mut heads = Vec::with_capacity(6);
    let mut loss_history = Vec::with_capacity(6);
    for label in Label::ALL {
        let y: Vec<bool> = corpus.iter().map(|c| c.labels.get(label)).collect();
        if !(y.contains(&true) && y.contains(&false)) {
            heads.push(Head { label, available: false, bias: 0.0, weights: vec![0.0; config.input_dim()] });
            loss_history.push(Vec::new());
            continue;
        }
        let (head, hist) = train_head(label, &rows, &y, config, &active);
        heads.push(head);
        loss_history.push(hist);
    }
    Ok(LinearModel { config: config.clone(), heads, loss_history })
}

impl LinearModel {
    /// Every head present, all weights and biases zero.
    pub fn zeros(config: TrainConfig) -> Self {
        let dim = config.input_dim();
        LinearModel {
            heads: Label::ALL
                .into_iter()
                .map(|label| Head { label, available: true, bias: 0.0, weights: vec![0.0; dim] })
                .collect(),
            loss_history: vec![Vec::new(); 6],
            config,
        }
    }

    pub fn classify(&self, raw: &str) -> Classification {
        let x = encode(raw, self.config.dim_bits);
        let mut labels = LabelVector::default();
        let heads = self
            .heads
            .iter()
            .map(|h| {
                if !h.available {
                    return HeadScore { label: h.label, score: None, flag: false };
                }
                let s = sigmoid(x.dot(&h.weights) + h.bias);
                let flag = s >= 0.5;
                labels.set(h.label, flag);
                HeadScore { label: h.label, score: Some(s), flag }
            })
            .collect();
        Classification { labels, heads }
    }

    pub fn to_file(&self) -> ModelFile {
        ModelFile {
            format: MODEL_FORMAT.to_string(),
            config: self.config.clone(),
            heads: self
                .heads
                .iter()
                .map(|h| HeadFile {
                    label: h.label,
                    available: h.available,
                    bias: h.bias,
                    weights: h
                        .weights
                        .iter()
                        .enumerate()
                        .filter(|(_, w)| **w != 0.0)
                        .map(|(i, w)| (i as u32, *w))
                        .collect(),
                })
                .collect(),
        }
    }

    pub fn from_file(file: ModelFile) -> Result<Self> {
        if file.format != MODEL_FORMAT {
            return Err(TextError::Model(format!("expected format `{MODEL_FORMAT}`, got `{}`", file.format)));
        }
        file.config.validate()?;
        if file.heads.len() != 6 || file.heads.iter().zip(Label::ALL).any(|(h, l)| h.label != l) {
            return Err(TextError::Model("need exactly six heads in label order".into()));
        }
        let dim = file.config.input_dim();
        let mut heads = Vec::with_capacity(6);
        for h in file.heads {
            let mut weights = vec![0.0; dim];
            for (i, w) in h.weights {
                let slot = weights
                    .get_mut(i as usize)
                    .ok_or_else(|| TextError::Model(format!("weight index {i} out of range")))?;
                *slot = w;
            }
            heads.push(Head { label: h.label, available: h.available, bias: h.bias, weights });
        }
        Ok(LinearModel { config: file.config, heads, loss_history: vec![Vec::new(); 6] })
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(&self.to_file()).expect("model serializes")
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let file: ModelFile = serde_json::from_str(text).map_err(|e| TextError::Model(e.to_string()))?;
        Self::from_file(file)
    }
}

/// On-disk model: hyperparameters (seed included) and sparse weights.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ModelFile {
    pub format: String,
    pub config: TrainConfig,
    pub heads: Vec<HeadFile>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct HeadFile {
    pub label: Label,
    pub available: bool,
    pub bias: f64,
    pub weights: Vec<(u32, f64)>,
}

#[cfg(test)]
mod tests {
    use super::*;

    fn small() -> TrainConfig {
        TrainConfig { dim_bits: 8, epochs: 50, ..TrainConfig::default() }
    }

    #[test]
    fn zero_model_scores_half_and_flags() {
        let m = LinearModel::zeros(small());
        let c = m.classify("Need rescue now!!");
        assert!(c.heads.iter().all(|h| h.score == Some(0.5) && h.flag));
        assert_eq!(c.labels, LabelVector::all());
    }

    #[test]
    fn empty_text_uses_bias_only() {
        let mut m = LinearModel::zeros(small());
        m.heads[1].bias = 2.0;
        m.heads[2].bias = -1.0;
        m.heads[2].weights[3] = 50.0;
        let c = m.classify("");
        assert_eq!(c.heads[1].score, Some(sigmoid(2.0)));
        assert_eq!(c.heads[2].score, Some(sigmoid(-1.0)));
        assert!(!c.labels.get(Label::WaterNeeded));
    }

    #[test]
    fn encode_merges_repeats() {
        let r = encode("water water", 8);
        let b = bucket("water", 8);
        assert_eq!(r.0.iter().find(|p| p.0 == b).unwrap().1, 2.0);
        assert!(r.0.windows(2).all(|w| w[0].0 < w[1].0));
        assert!(encode("", 8).0.is_empty());
    }

    #[test]
    fn skipped_head_marked_unavailable() {
        let corpus = vec![
            LabeledText { text: "flood here".into(), labels: LabelVector::default().with(Label::Flood) },
            LabeledText { text: "all fine".into(), labels: LabelVector::default() },
        ];
        let m = train(&corpus, &small()).unwrap();
        assert!(m.heads[Label::Flood.index()].available);
        assert!(!m.heads[Label::Sick.index()].available);
        let c = m.classify("flood");
        let sick = c.heads[Label::Sick.index()];
        assert_eq!(sick.score, None);
        assert!(!sick.flag);
    }

    #[test]
    fn model_file_round_trip() {
        let corpus = vec![
            LabeledText { text: "flood here".into(), labels: LabelVector::default().with(Label::Flood) },
            LabeledText { text: "all fine".into(), labels: LabelVector::default() },
        ];
        let m = train(&corpus, &small()).unwrap();
        let back = LinearModel::from_json(&m.to_json()).unwrap();
        assert_eq!(back.heads, m.heads);
        assert!(LinearModel::from_json(&m.to_json().replace(MODEL_FORMAT, "other/9")).is_err());
    }

    #[test]
    fn bad_config_rejected() {
        assert!(TrainConfig { learning_rate: 0.0, ..small() }.validate().is_err());
        assert!(TrainConfig { dim_bits: 30, ..small() }.validate().is_err());
    }
}
