//! Edge-recovery metrics over unordered vertex pairs.

use std::fmt::Write as _;

use crate::error::{invalid, Result};
use crate::synthgen::GroundTruth;

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct ConfusionCounts {
    pub tp: usize,
    pub fp: usize,
    pub tn: usize,
    pub fn_: usize,
}

impl ConfusionCounts {
    pub fn total(&self) -> usize {
        self.tp + self.fp + self.tn + self.fn_
    }

    pub fn positives(&self) -> usize {
        self.tp + self.fn_
    }

    pub fn negatives(&self) -> usize {
        self.tn + self.fp
    }
}

/// Count over pairs `i < j`; the diagonal is ignored.
pub fn confusion(pred: &[Vec<u8>], truth: &GroundTruth) -> Result<ConfusionCounts> {
    let n = truth.n();
    if pred.len() != n || pred.iter().any(|r| r.len() != n) {
        return invalid(format!("prediction is not {n} x {n}"));
    }
    let mut c = ConfusionCounts::default();
    for i in 0..n {
        for j in i + 1..n {
            if pred[i][j] != pred[j][i] {
                return invalid(format!("prediction not symmetric at ({i}, {j})"));
            }
            match (pred[i][j] != 0, truth.has_edge(i, j)) {
                (true, true) => c.tp += 1,
                (true, false) => c.fp += 1,
                (false, false) => c.tn += 1,
                (false, true) => c.fn_ += 1,
            }
        }
    }
    Ok(c)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Metric {
    Tpe,
    Tne,
    Accuracy,
    Precision,
    Recall,
    F1,
}

impl Metric {
    /// Row order of the results table.
    pub const ALL: [Metric; 6] =
        [Metric::Tpe, Metric::Tne, Metric::Accuracy, Metric::Precision, Metric::Recall, Metric::F1];

    /// Key used in metrics documents.
    pub fn key(self) -> &'static str {
        match self {
            Metric::Tpe => "tpe",
            Metric::Tne => "tne",
            Metric::Accuracy => "accuracy",
            Metric::Precision => "precision",
            Metric::Recall => "recall",
            Metric::F1 => "f1",
        }
    }

    /// Row label in the results table.
    pub fn row_label(self) -> &'static str {
        match self {
            Metric::Tpe => "TP",
            Metric::Tne => "TN",
            Metric::Accuracy => "Accuracy",
            Metric::Precision => "Precision",
            Metric::Recall => "Recall",
            Metric::F1 => "F1-score",
        }
    }
}

#[derive(Clone, Debug, Default, PartialEq)]
pub struct MetricsRecord {
    pub tpe: f64,
    pub tne: f64,
    pub accuracy: f64,
    pub precision: f64,
    pub recall: f64,
    pub f1: f64,
    /// Metrics whose denominator was zero (reported as 0).
    pub degenerate: Vec<Metric>,
}

impl MetricsRecord {
    pub fn get(&self, m: Metric) -> f64 {
        match m {
            Metric::Tpe => self.tpe,
            Metric::Tne => self.tne,
            Metric::Accuracy => self.accuracy,
            Metric::Precision => self.precision,
            Metric::Recall => self.recall,
            Metric::F1 => self.f1,
        }
    }

    fn set(&mut self, m: Metric, v: f64) {
        match m {
            Metric::Tpe => self.tpe = v,
            Metric::Tne => self.tne = v,
            Metric::Accuracy => self.accuracy = v,
            Metric::Precision => self.precision = v,
            Metric::Recall => self.recall = v,
            Metric::F1 => self.f1 = v,
        }
    }
}

fn ratio(num: usize, den: usize) -> Option<f64> {
    (den > 0).then(|| num as f64 / den as f64)
}

pub fn metrics(c: &ConfusionCounts) -> MetricsRecord {
    let mut rec = MetricsRecord::default();
    let mut put = |m: Metric, v: Option<f64>| match v {
        Some(v) => rec.set(m, v),
        None => {
            rec.set(m, 0.0);
            rec.degenerate.push(m);
        }
    };
    let tpe = ratio(c.tp, c.tp + c.fn_);
    let precision = ratio(c.tp, c.tp + c.fp);
    let f1 = match (precision, tpe) {
        (Some(p), Some(r)) if p + r > 0.0 => Some(2.0 * p * r / (p + r)),
        _ => None,
    };
    put(Metric::Tpe, tpe);
    put(Metric::Tne, ratio(c.tn, c.tn + c.fp));
    put(Metric::Accuracy, ratio(c.tp + c.tn, c.total()));
    put(Metric::Precision, precision);
    put(Metric::Recall, tpe);
    put(Metric::F1, f1);
    rec
}

/// Componentwise mean; degenerate flags are unioned.
pub fn aggregate(records: &[MetricsRecord]) -> Result<MetricsRecord> {
    if records.is_empty() {
        return invalid("cannot aggregate zero records");
    }
    let k = records.len() as f64;
    let mut out = MetricsRecord::default();
    for m in Metric::ALL {
        out.set(m, records.iter().map(|r| r.get(m)).sum::<f64>() / k);
    }
    let mut flags: Vec<Metric> = records.iter().flat_map(|r| r.degenerate.iter().copied()).collect();
    flags.sort();
    flags.dedup();
    out.degenerate = flags;
    Ok(out)
}

/// Area under the ROC curve of `scores` separating `positive` from the rest
/// (Mann-Whitney statistic, ties count one half).
pub fn auc(scores: &[f64], positive: &[bool]) -> Result<f64> {
    if scores.len() != positive.len() {
        return invalid("scores and labels differ in length");
    }
    let pos: Vec<f64> = scores.iter().zip(positive).filter(|(_, &p)| p).map(|(&s, _)| s).collect();
    let neg: Vec<f64> = scores.iter().zip(positive).filter(|(_, &p)| !p).map(|(&s, _)| s).collect();
    if pos.is_empty() || neg.is_empty() {
        return invalid("AUC needs both positive and negative examples");
    }
    let mut wins = 0.0;
    for &p in &pos {
        for &q in &neg {
            wins += if p > q {
                1.0
            } else if p == q {
                0.5
            } else {
                0.0
            };
        }
    }
    Ok(wins / (pos.len() * neg.len()) as f64)
}

/// Published reference results per vertex count, rows in [`Metric::ALL`] order.
pub const REFERENCE_TABLE: [(usize, [f64; 6]); 4] = [
    (5, [0.72, 0.62, 0.66, 0.56, 0.72, 0.63]),
    (6, [0.75, 0.68, 0.71, 0.54, 0.75, 0.63]),
    (7, [0.67, 0.68, 0.67, 0.45, 0.67, 0.54]),
    (8, [0.68, 0.72, 0.71, 0.45, 0.68, 0.54]),
];

pub fn reference_value(n: usize, m: Metric) -> Option<f64> {
    let row = Metric::ALL.iter().position(|&x| x == m)?;
    REFERENCE_TABLE.iter().find(|(k, _)| *k == n).map(|(_, v)| v[row])
}

/// Plain-text results table: one row per metric, one column per vertex
/// count. With `with_reference`, each cell is followed by the reference value
/// in parentheses when one exists.
pub fn format_table(columns: &[(usize, MetricsRecord)], with_reference: bool) -> String {
    let cell_width = if with_reference { 14 } else { 7 };
    let mut out = String::new();
    let _ = write!(out, "{:<12}", "n");
    for (n, _) in columns {
        let _ = write!(out, " | {:>cell_width$}", format!("n={n}"));
    }
    out.push('\n');
    let _ = write!(out, "{:-<12}", "");
    for _ in columns {
        let _ = write!(out, "-+-{:-<cell_width$}", "");
    }
    out.push('\n');
    for m in Metric::ALL {
        let _ = write!(out, "{:<12}", m.row_label());
        for (n, rec) in columns {
            let cell = match (with_reference, reference_value(*n, m)) {
                (true, Some(r)) => format!("{:.2} ({:.2})", rec.get(m), r),
                _ => format!("{:.2}", rec.get(m)),
            };
            let _ = write!(out, " | {cell:>cell_width$}");
        }
        out.push('\n');
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::synthgen::ground_truth_adjacency;

    fn complement(g: &GroundTruth) -> Vec<Vec<u8>> {
        let n = g.n();
        (0..n).map(|i| (0..n).map(|j| u8::from(i != j && !g.has_edge(i, j))).collect()).collect()
    }

    #[test]
    fn confusion_examples() {
        let truth = ground_truth_adjacency(5).unwrap();
        let perfect = confusion(truth.adjacency(), &truth).unwrap();
        assert_eq!(perfect, ConfusionCounts { tp: 4, fp: 0, tn: 6, fn_: 0 });
        let comp = confusion(&complement(&truth), &truth).unwrap();
        assert_eq!((comp.tp, comp.tn), (0, 0));
        let empty = confusion(&vec![vec![0; 5]; 5], &truth).unwrap();
        assert_eq!((empty.tn, empty.fn_), (6, 4));
        assert_eq!(empty.total(), 10);
    }

    #[test]
    fn confusion_errors() {
        let truth = ground_truth_adjacency(3).unwrap();
        assert!(confusion(&vec![vec![0; 4]; 4], &truth).is_err());
        let asym = vec![vec![0, 1, 0], vec![0, 0, 0], vec![0, 0, 0]];
        assert!(confusion(&asym, &truth).is_err());
    }

    #[test]
    fn perfect_metrics() {
        let m = metrics(&ConfusionCounts { tp: 4, fp: 0, tn: 6, fn_: 0 });
        for k in Metric::ALL {
            assert_eq!(m.get(k), 1.0);
        }
        assert!(m.degenerate.is_empty());
    }

    #[test]
    fn degenerate_precision() {
        let m = metrics(&ConfusionCounts { tp: 0, fp: 0, tn: 6, fn_: 4 });
        assert_eq!(m.precision, 0.0);
        assert!(m.degenerate.contains(&Metric::Precision));
        assert!(m.degenerate.contains(&Metric::F1));
        assert_eq!(m.tne, 1.0);
        assert_eq!(m.tpe, 0.0);
    }

    #[test]
    fn hand_metrics() {
        let m = metrics(&ConfusionCounts { tp: 3, fp: 2, tn: 4, fn_: 1 });
        assert_eq!(m.tpe, 0.75);
        assert_eq!(m.recall, m.tpe);
        assert!((m.tne - 4.0 / 6.0).abs() < 1e-15);
        assert_eq!(m.accuracy, 0.7);
        assert_eq!(m.precision, 0.6);
        assert!((m.f1 - 2.0 * 0.6 * 0.75 / 1.35).abs() < 1e-15);
    }

    #[test]
    fn aggregate_examples() {
        let one = metrics(&ConfusionCounts { tp: 4, fp: 0, tn: 6, fn_: 0 });
        assert_eq!(aggregate(std::slice::from_ref(&one)).unwrap(), one);
        let zero = MetricsRecord::default();
        let half = aggregate(&[zero, one.clone()]).unwrap();
        for k in Metric::ALL {
            assert_eq!(half.get(k), 0.5);
        }
        assert_eq!(aggregate(&vec![one.clone(); 7]).unwrap(), one);
        assert!(aggregate(&[]).is_err());
    }

    #[test]
    fn auc_cases() {
        assert_eq!(auc(&[0.9, 0.8, 0.1, 0.2], &[true, true, false, false]).unwrap(), 1.0);
        assert_eq!(auc(&[0.5, 0.5], &[true, false]).unwrap(), 0.5);
        assert_eq!(auc(&[0.1, 0.9], &[true, false]).unwrap(), 0.0);
        assert!(auc(&[0.1], &[true]).is_err());
    }

    #[test]
    fn table_layout() {
        let rec = metrics(&ConfusionCounts { tp: 4, fp: 0, tn: 6, fn_: 0 });
        let cols: Vec<(usize, MetricsRecord)> = (5..=8).map(|n| (n, rec.clone())).collect();
        let t = format_table(&cols, false);
        let lines: Vec<&str> = t.lines().collect();
        assert_eq!(lines.len(), 8);
        let labels: Vec<&str> = lines[2..].iter().map(|l| l.split('|').next().unwrap().trim()).collect();
        assert_eq!(labels, vec!["TP", "TN", "Accuracy", "Precision", "Recall", "F1-score"]);
        assert!(lines[0].contains("n=5") && lines[0].contains("n=8"));
        let with_ref = format_table(&cols, true);
        assert!(with_ref.lines().nth(4).unwrap().contains("1.00 (0.71)"));
        assert_eq!(reference_value(6, Metric::Accuracy), Some(0.71));
        assert_eq!(reference_value(9, Metric::Accuracy), None);
    }
}
