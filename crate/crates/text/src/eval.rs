//! Per-head precision, recall, F1, accuracy (percentages) and AUC.

use rescue_core::{Label, LabelVector};
use serde::{Deserialize, Serialize};

use crate::error::{Result, TextError};

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Confusion {
    pub tp: usize,
    pub fp: usize,
    pub fn_: usize,
    pub tn: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ClassMetrics {
    pub label: Label,
    pub confusion: Confusion,
    pub support: usize,
    pub precision: f64,
    pub recall: f64,
    pub f1: f64,
    pub accuracy: f64,
    /// Needs scores and both classes present in the gold labels.
    pub auc: Option<f64>,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct Averages {
    pub precision: f64,
    pub recall: f64,
    pub f1: f64,
    pub accuracy: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EvalReport {
    pub examples: usize,
    pub classes: Vec<ClassMetrics>,
    /// Support-weighted over classes.
    pub weighted: Averages,
}

fn pct(num: usize, den: usize) -> f64 {
    if den == 0 {
        0.0
    } else {
        100.0 * num as f64 / den as f64
    }
}

/// Mann-Whitney AUC with tied scores counted as half.
pub fn auc(scores: &[f64], gold: &[bool]) -> Option<f64> {
    let mut idx: Vec<usize> = (0..scores.len()).collect();
    idx.sort_by(|&a, &b| scores[a].total_cmp(&scores[b]));
    let pos = gold.iter().filter(|g| **g).count();
    let neg = gold.len() - pos;
    if pos == 0 || neg == 0 {
        return None;
    }
    // average ranks over ties
    let mut rank_sum = 0.0;
    let mut i = 0;
    while i < idx.len() {
        let mut j = i;
        while j + 1 < idx.len() && scores[idx[j + 1]] == scores[idx[i]] {
            j += 1;
        }
        let avg = (i + j) as f64 / 2.0 + 1.0;
        rank_sum += idx[i..=j].iter().filter(|&&k| gold[k]).count() as f64 * avg;
        i = j + 1;
    }
    let u = rank_sum - (pos * (pos + 1)) as f64 / 2.0;
    Some(u / (pos * neg) as f64)
}

pub fn evaluate(predicted: &[LabelVector], gold: &[LabelVector], scores: Option<&[[f64; 6]]>) -> Result<EvalReport> {
    if predicted.len() != gold.len() {
        return Err(TextError::LengthMismatch { predicted: predicted.len(), gold: gold.len() });
    }
    if let Some(s) = scores {
        if s.len() != gold.len() {
            return Err(TextError::LengthMismatch { predicted: s.len(), gold: gold.len() });
        }
    }
    let n = gold.len();
    let mut classes = Vec::with_capacity(6);
    for label in Label::ALL {
        let mut c = Confusion::default();
        for (p, g) in predicted.iter().zip(gold) {
            match (p.get(label), g.get(label)) {
                (true, true) => c.tp += 1,
                (true, false) => c.fp += 1,
                (false, true) => c.fn_ += 1,
                (false, false) => c.tn += 1,
            }
        }
        let precision = pct(c.tp, c.tp + c.fp);
        let recall = pct(c.tp, c.tp + c.fn_);
        let f1 = if precision + recall == 0.0 { 0.0 } else { 2.0 * precision * recall / (precision + recall) };
        let auc = scores.and_then(|s| {
            let column: Vec<f64> = s.iter().map(|row| row[label.index()]).collect();
            let truth: Vec<bool> = gold.iter().map(|g| g.get(label)).collect();
            auc(&column, &truth)
        });
        classes.push(ClassMetrics {
            label,
            confusion: c,
            support: c.tp + c.fn_,
            precision,
            recall,
            f1,
            accuracy: pct(c.tp + c.tn, n),
            auc,
        });
    }
    let total: usize = classes.iter().map(|c| c.support).sum();
    let weighted = if total == 0 {
        Averages::default()
    } else {
        let w = |f: fn(&ClassMetrics) -> f64| {
            classes.iter().map(|c| c.support as f64 * f(c)).sum::<f64>() / total as f64
        };
        Averages {
            precision: w(|c| c.precision),
            recall: w(|c| c.recall),
            f1: w(|c| c.f1),
            accuracy: w(|c| c.accuracy),
        }
    };
    Ok(EvalReport { examples: n, classes, weighted })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn perfect_predictions_score_100() {
        let gold = vec![LabelVector::all(), LabelVector::default(), LabelVector::default().with(Label::Flood)];
        let r = evaluate(&gold, &gold, None).unwrap();
        for c in &r.classes {
            assert_eq!(c.accuracy, 100.0);
            if c.support > 0 {
                assert_eq!((c.precision, c.recall, c.f1), (100.0, 100.0, 100.0));
            }
        }
        assert_eq!(r.weighted.f1, 100.0);
    }

    #[test]
    fn all_negative_has_zero_recall() {
        let gold = vec![LabelVector::all(), LabelVector::default()];
        let pred = vec![LabelVector::default(); 2];
        let r = evaluate(&pred, &gold, None).unwrap();
        assert!(r.classes.iter().all(|c| c.recall == 0.0 && c.f1 == 0.0 && c.accuracy == 50.0));
    }

    #[test]
    fn length_mismatch() {
        assert!(matches!(
            evaluate(&[LabelVector::default()], &[], None),
            Err(TextError::LengthMismatch { predicted: 1, gold: 0 })
        ));
    }

    #[test]
    fn auc_known_values() {
        assert_eq!(auc(&[0.1, 0.4, 0.35, 0.8], &[false, false, true, true]), Some(0.75));
        assert_eq!(auc(&[0.5, 0.5], &[false, true]), Some(0.5));
        assert_eq!(auc(&[0.2, 0.9], &[true, true]), None);
    }
}
