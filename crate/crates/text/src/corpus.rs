//! Labeled corpora: CSV with header
//! `text,rescue_needed,flood,water_needed,dcew,injured,sick`, labels 0 or 1.

use std::io::{Read, Write};

use rand::seq::{IndexedRandom, SliceRandom};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rescue_core::{Label, LabelVector};

use crate::error::{Result, TextError};

pub const CORPUS_HEADER: [&str; 7] = ["text", "rescue_needed", "flood", "water_needed", "dcew", "injured", "sick"];

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LabeledText {
    pub text: String,
    pub labels: LabelVector,
}

pub fn read_corpus(reader: impl Read) -> Result<Vec<LabeledText>> {
    let mut rdr = csv::ReaderBuilder::new().has_headers(true).flexible(true).from_reader(reader);
    let header = rdr
        .headers()
        .map_err(|e| TextError::Schema { line: 1, message: e.to_string() })?
        .clone();
    if header.iter().map(str::trim).ne(CORPUS_HEADER) {
        return Err(TextError::Schema {
            line: 1,
            message: format!("expected header `{}`", CORPUS_HEADER.join(",")),
        });
    }
    let mut out = Vec::new();
    for (i, record) in rdr.records().enumerate() {
        let line = i + 2;
        let record = record.map_err(|e| TextError::Schema { line, message: e.to_string() })?;
        if record.len() != CORPUS_HEADER.len() {
            return Err(TextError::Schema {
                line,
                message: format!("expected {} fields, found {}", CORPUS_HEADER.len(), record.len()),
            });
        }
        let mut labels = LabelVector::default();
        for (label, field) in Label::ALL.into_iter().zip(record.iter().skip(1)) {
            match field.trim() {
                "0" => {}
                "1" => labels.set(label, true),
                other => {
                    return Err(TextError::Schema {
                        line,
                        message: format!("{}: expected 0 or 1, found `{other}`", label.name()),
                    })
                }
            }
        }
        out.push(LabeledText { text: record[0].to_string(), labels });
    }
    Ok(out)
}

pub fn write_corpus(writer: impl Write, rows: &[LabeledText]) -> Result<()> {
    let mut w = csv::Writer::from_writer(writer);
    let io = |e: csv::Error| TextError::Io(std::io::Error::other(e));
    w.write_record(CORPUS_HEADER).map_err(io)?;
    for row in rows {
        let mut rec = vec![row.text.clone()];
        rec.extend(row.labels.to_array().iter().map(|&b| u8::from(b).to_string()));
        w.write_record(&rec).map_err(io)?;
    }
    w.flush()?;
    Ok(())
}

const KEYWORDS: [&[&str]; 6] = [
    &["trapped", "stranded", "evacuate", "rescue", "sos"],
    &["flooding", "flooded", "underwater", "rising", "floodwater"],
    &["thirsty", "drinking", "bottled", "dehydrated"],
    &["elderly", "disabled", "wheelchair", "pregnant", "infant"],
    &["bleeding", "broken", "wound", "injury", "fracture"],
    &["fever", "insulin", "dialysis", "medication", "oxygen"],
];

const FILLER: &[&str] = &[
    "please", "street", "house", "near", "family", "our", "anyone", "send", "asap", "road", "block",
    "apartment", "corner", "behind", "church", "school", "avenue", "today", "tonight", "kids",
];

/// Seeded corpus where each head fires exactly when one of its keywords
/// appears, so every head is linearly separable on token counts.
pub fn synthetic_corpus(seed: u64, n: usize, positive_rate: f64) -> Vec<LabeledText> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..n)
        .map(|_| {
            let mut labels = LabelVector::default();
            let mut words: Vec<String> = Vec::new();
            for label in Label::ALL {
                if rng.random_bool(positive_rate) {
                    labels.set(label, true);
                    for _ in 0..rng.random_range(1..=2) {
                        words.push(KEYWORDS[label.index()].choose(&mut rng).unwrap().to_string());
                    }
                }
            }
            for _ in 0..rng.random_range(2..=6) {
                words.push(FILLER.choose(&mut rng).unwrap().to_string());
            }
            if rng.random_bool(0.4) {
                words.push(rng.random_range(1..9999).to_string());
            }
            words.shuffle(&mut rng);
            let mut text = words.join(" ");
            if rng.random_bool(0.5) {
                text.push_str(["!!", "?", "!", "..."][rng.random_range(0..4)]);
            }
            LabeledText { text, labels }
        })
        .collect()
}
