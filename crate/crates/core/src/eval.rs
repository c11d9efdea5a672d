//! Clustering and classification quality: NMI, purity and micro/macro F1.
//!
//! Only documents are ever scored. Callers pass document labelings; word
//! vertices never enter these functions.

use std::collections::{BTreeMap, HashMap};
use std::hash::Hash;

use serde::Serialize;

use crate::error::{Error, Result};

/// Class-by-cluster overlap counts.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Contingency {
    pub total: usize,
    pub class_counts: Vec<usize>,
    pub cluster_counts: Vec<usize>,
    /// `overlap[class][cluster]`.
    pub overlap: Vec<Vec<usize>>,
}

fn index_labels<L: Eq + Hash + Clone>(labels: &[L]) -> (Vec<usize>, usize) {
    let mut ids: HashMap<&L, usize> = HashMap::new();
    let idx = labels
        .iter()
        .map(|l| {
            let next = ids.len();
            *ids.entry(l).or_insert(next)
        })
        .collect();
    (idx, ids.len())
}

impl Contingency {
    pub fn new<P, G>(pred: &[P], gold: &[G]) -> Result<Self>
    where
        P: Eq + Hash + Clone,
        G: Eq + Hash + Clone,
    {
        if pred.len() != gold.len() {
            return Err(Error::LabelMismatch(format!(
                "{} predicted vs {} gold documents",
                pred.len(),
                gold.len()
            )));
        }
        if pred.is_empty() {
            return Err(Error::LabelMismatch("no documents to score".into()));
        }
        let (pi, k) = index_labels(pred);
        let (gi, c) = index_labels(gold);
        let mut overlap = vec![vec![0; k]; c];
        let mut class_counts = vec![0; c];
        let mut cluster_counts = vec![0; k];
        for (&m, &l) in pi.iter().zip(&gi) {
            overlap[l][m] += 1;
            class_counts[l] += 1;
            cluster_counts[m] += 1;
        }
        Ok(Self {
            total: pred.len(),
            class_counts,
            cluster_counts,
            overlap,
        })
    }

    pub fn n_classes(&self) -> usize {
        self.class_counts.len()
    }

    pub fn n_clusters(&self) -> usize {
        self.cluster_counts.len()
    }

    pub fn nmi(&self) -> f64 {
        if self.n_classes() <= 1 || self.n_clusters() <= 1 {
            return 0.0;
        }
        let n = self.total as f64;
        let mut mutual = 0.0;
        for (l, row) in self.overlap.iter().enumerate() {
            for (m, &nlm) in row.iter().enumerate() {
                if nlm > 0 {
                    let nlm = nlm as f64;
                    let denom = self.class_counts[l] as f64 * self.cluster_counts[m] as f64;
                    mutual += nlm * (n * nlm / denom).ln();
                }
            }
        }
        let entropy = |counts: &[usize]| -> f64 {
            counts
                .iter()
                .filter(|&&c| c > 0)
                .map(|&c| c as f64 * (c as f64 / n).ln())
                .sum()
        };
        mutual / (entropy(&self.cluster_counts) * entropy(&self.class_counts)).sqrt()
    }

    pub fn purity(&self) -> f64 {
        let hits: usize = (0..self.n_clusters())
            .map(|m| self.overlap.iter().map(|row| row[m]).max().unwrap_or(0))
            .sum();
        hits as f64 / self.total as f64
    }
}

/// Normalized mutual information, natural log, `0` when either labeling is
/// a single cluster.
pub fn nmi<P, G>(pred: &[P], gold: &[G]) -> Result<f64>
where
    P: Eq + Hash + Clone,
    G: Eq + Hash + Clone,
{
    Ok(Contingency::new(pred, gold)?.nmi())
}

pub fn purity<P, G>(pred: &[P], gold: &[G]) -> Result<f64>
where
    P: Eq + Hash + Clone,
    G: Eq + Hash + Clone,
{
    Ok(Contingency::new(pred, gold)?.purity())
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ClassScore {
    pub tp: usize,
    /// Test documents whose gold class is this one.
    pub gold: usize,
    /// Test documents predicted as this class.
    pub pred: usize,
    pub recall: f64,
    pub precision: f64,
    pub f1: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ClassScores {
    pub per_class: BTreeMap<String, ClassScore>,
    pub documents: usize,
    /// Percent.
    pub micro_f1: f64,
    /// Percent.
    pub macro_f1: f64,
}

/// Micro and macro F1 (as percentages) over the gold vocabulary.
pub fn f1_scores(pred: &[String], gold: &[String]) -> Result<ClassScores> {
    let mut classes: Vec<String> = gold.to_vec();
    classes.sort();
    classes.dedup();
    f1_scores_with_classes(pred, gold, &classes)
}

/// As [`f1_scores`] with an explicit class vocabulary; classes that never
/// occur score `F = 0` and still count towards the macro average.
pub fn f1_scores_with_classes(
    pred: &[String],
    gold: &[String],
    classes: &[String],
) -> Result<ClassScores> {
    if pred.len() != gold.len() {
        return Err(Error::LabelMismatch(format!(
            "{} predicted vs {} gold documents",
            pred.len(),
            gold.len()
        )));
    }
    if pred.is_empty() || classes.is_empty() {
        return Err(Error::LabelMismatch("no documents to score".into()));
    }
    let mut per_class: BTreeMap<String, ClassScore> = classes
        .iter()
        .map(|c| {
            let blank = ClassScore {
                tp: 0,
                gold: 0,
                pred: 0,
                recall: 0.0,
                precision: 0.0,
                f1: 0.0,
            };
            (c.clone(), blank)
        })
        .collect();
    for (p, g) in pred.iter().zip(gold) {
        let unknown =
            |c: &String| Error::LabelMismatch(format!("class `{c}` is not in the vocabulary"));
        per_class.get_mut(g).ok_or_else(|| unknown(g))?.gold += 1;
        let entry = per_class.get_mut(p).ok_or_else(|| unknown(p))?;
        entry.pred += 1;
        if p == g {
            entry.tp += 1;
        }
    }
    let mut tp_total = 0;
    let mut f_sum = 0.0;
    for s in per_class.values_mut() {
        tp_total += s.tp;
        s.recall = if s.gold > 0 {
            s.tp as f64 / s.gold as f64
        } else {
            0.0
        };
        s.precision = if s.pred > 0 {
            s.tp as f64 / s.pred as f64
        } else {
            0.0
        };
        s.f1 = if s.recall + s.precision > 0.0 {
            2.0 * s.recall * s.precision / (s.recall + s.precision)
        } else {
            0.0
        };
        f_sum += s.f1;
    }
    Ok(ClassScores {
        documents: pred.len(),
        micro_f1: 100.0 * tp_total as f64 / pred.len() as f64,
        macro_f1: 100.0 * f_sum / per_class.len() as f64,
        per_class,
    })
}

/// Serializable evaluation summary.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EvalReport {
    pub nmi: Option<f64>,
    pub purity: Option<f64>,
    pub micro_f1: Option<f64>,
    pub macro_f1: Option<f64>,
    pub n_clusters: usize,
    pub lambda: f64,
    pub per_class: Option<BTreeMap<String, ClassScore>>,
    pub contingency: Option<Contingency>,
}

#[cfg(test)]
mod tests {
    use super::*;

    fn s(v: &[&str]) -> Vec<String> {
        v.iter().map(|x| x.to_string()).collect()
    }

    #[test]
    fn identical_up_to_renaming() {
        let gold = ["a", "a", "b", "c"];
        let pred = [7, 7, 1, 3];
        assert!((nmi(&pred, &gold).unwrap() - 1.0).abs() < 1e-12);
        assert_eq!(purity(&pred, &gold).unwrap(), 1.0);
    }

    #[test]
    fn single_cluster_is_zero() {
        assert_eq!(nmi(&[0, 0, 0, 0], &["a", "a", "b", "b"]).unwrap(), 0.0);
    }

    #[test]
    fn small_fixture() {
        let gold = ["a", "a", "b", "b"];
        let pred = [1, 1, 1, 2];
        assert!((purity(&pred, &gold).unwrap() - 0.75).abs() < 1e-12);
        // direct evaluation: numerator 2 ln(4/3) + ln(2/3) + ln 2 ... see oracle tests
        let v = nmi(&pred, &gold).unwrap();
        assert!(v > 0.0 && v < 1.0);
    }

    #[test]
    fn f1_hand_example() {
        let sc = f1_scores(&s(&["A", "B", "B", "B"]), &s(&["A", "A", "B", "B"])).unwrap();
        assert!((sc.micro_f1 - 75.0).abs() < 1e-9);
        assert!((sc.macro_f1 - 100.0 * (2.0 / 3.0 + 0.8) / 2.0).abs() < 1e-9);
        assert_eq!(sc.per_class["A"].tp, 1);
        assert_eq!(sc.per_class["B"].pred, 3);
    }

    #[test]
    fn perfect_predictions() {
        let g = s(&["x", "y", "z", "x"]);
        let sc = f1_scores(&g, &g).unwrap();
        assert_eq!(sc.micro_f1, 100.0);
        assert_eq!(sc.macro_f1, 100.0);
    }

    #[test]
    fn unknown_predicted_class() {
        assert!(f1_scores(&s(&["Q"]), &s(&["A"])).is_err());
    }

    #[test]
    fn mismatched_lengths() {
        assert!(nmi(&[0, 1], &["a"]).is_err());
        assert!(purity::<u8, u8>(&[], &[]).is_err());
    }
}
