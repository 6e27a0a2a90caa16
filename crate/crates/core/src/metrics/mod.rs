//! Weighted and unweighted average recall and confusion matrices.

use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ClassRecall {
    pub label: String,
    pub support: usize,
    /// `None` when the class has no test samples.
    pub recall: Option<f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EvalReport {
    pub war: f64,
    pub uar: f64,
    pub per_class_recall: Vec<ClassRecall>,
    /// Rows are true classes, columns predicted classes.
    pub confusion: Vec<Vec<usize>>,
    pub n: usize,
    pub label_set: Vec<String>,
}

pub fn compute_report(true_labels: &[usize], predicted: &[usize], label_set: &[String]) -> Result<EvalReport> {
    if true_labels.len() != predicted.len() {
        return Err(Error::InvalidArgument(format!(
            "{} true labels but {} predictions",
            true_labels.len(),
            predicted.len()
        )));
    }
    if true_labels.is_empty() {
        return Err(Error::InvalidArgument("cannot score an empty prediction set".into()));
    }
    let k = label_set.len();
    let mut confusion = vec![vec![0usize; k]; k];
    for (&t, &p) in true_labels.iter().zip(predicted) {
        if t >= k || p >= k {
            return Err(Error::InvalidArgument(format!("label index out of range for {} classes", k)));
        }
        confusion[t][p] += 1;
    }
    let n = true_labels.len();
    let correct: usize = (0..k).map(|c| confusion[c][c]).sum();

    let mut per_class_recall = Vec::with_capacity(k);
    let mut recall_sum = 0.0;
    let mut present = 0usize;
    for (c, label) in label_set.iter().enumerate() {
        let support: usize = confusion[c].iter().sum();
        let recall = if support == 0 {
            log::warn!("class {:?} has no test samples; excluded from UAR", label);
            None
        } else {
            let r = confusion[c][c] as f64 / support as f64;
            recall_sum += r;
            present += 1;
            Some(r)
        };
        per_class_recall.push(ClassRecall {
            label: label.clone(),
            support,
            recall,
        });
    }
    Ok(EvalReport {
        war: correct as f64 / n as f64,
        uar: recall_sum / present as f64,
        per_class_recall,
        confusion,
        n,
        label_set: label_set.to_vec(),
    })
}

impl EvalReport {
    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }

    pub fn confusion_csv(&self) -> String {
        let mut out = self.label_set.join(",");
        out.push('\n');
        for row in &self.confusion {
            let cells: Vec<String> = row.iter().map(|c| c.to_string()).collect();
            out.push_str(&cells.join(","));
            out.push('\n');
        }
        out
    }

    pub fn write_json(&self, path: &Path) -> Result<()> {
        std::fs::write(path, self.to_json()?).map_err(|e| Error::io(path, e))
    }

    pub fn write_confusion_csv(&self, path: &Path) -> Result<()> {
        std::fs::write(path, self.confusion_csv()).map_err(|e| Error::io(path, e))
    }
}
