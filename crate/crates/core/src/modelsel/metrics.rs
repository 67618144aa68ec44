use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum F1Average {
    /// F1 of the Favored (label 1) class.
    #[default]
    Binary,
    Macro,
    Weighted,
}

fn class_f1(pred: &[u8], truth: &[u8], positive: u8) -> f64 {
    let mut tp = 0usize;
    let mut fp = 0usize;
    let mut fn_ = 0usize;
    for (&p, &t) in pred.iter().zip(truth) {
        match (p == positive, t == positive) {
            (true, true) => tp += 1,
            (true, false) => fp += 1,
            (false, true) => fn_ += 1,
            (false, false) => {}
        }
    }
    if tp == 0 {
        return 0.0;
    }
    let precision = tp as f64 / (tp + fp) as f64;
    let recall = tp as f64 / (tp + fn_) as f64;
    2.0 * precision * recall / (precision + recall)
}

impl std::str::FromStr for F1Average {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "binary" => Ok(F1Average::Binary),
            "macro" => Ok(F1Average::Macro),
            "weighted" => Ok(F1Average::Weighted),
            _ => Err(format!("unknown F1 average {s:?} (binary, macro, weighted)")),
        }
    }
}

pub fn f1_score(pred: &[u8], truth: &[u8], average: F1Average) -> f64 {
    assert_eq!(pred.len(), truth.len());
    assert!(!pred.is_empty(), "f1 of an empty sample");
    match average {
        F1Average::Binary => class_f1(pred, truth, 1),
        F1Average::Macro => 0.5 * (class_f1(pred, truth, 0) + class_f1(pred, truth, 1)),
        F1Average::Weighted => {
            let n1 = truth.iter().filter(|&&t| t == 1).count() as f64;
            let n = truth.len() as f64;
            ((n - n1) * class_f1(pred, truth, 0) + n1 * class_f1(pred, truth, 1)) / n
        }
    }
}

pub fn accuracy(pred: &[u8], truth: &[u8]) -> f64 {
    assert_eq!(pred.len(), truth.len());
    pred.iter().zip(truth).filter(|(p, t)| p == t).count() as f64 / pred.len() as f64
}
