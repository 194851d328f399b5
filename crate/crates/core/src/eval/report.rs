use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use crate::learners::ClassifierKind;

/// Outcome of one evaluation. `accuracy` and `std` are fractions.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EvalReport {
    pub dataset: String,
    pub kind: ClassifierKind,
    pub accuracy: f64,
    pub std: f64,
    pub n_test: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub per_fold: Option<Vec<f64>>,
    pub features_retained: usize,
    #[serde(skip)]
    pub features_total: usize,
    /// Threshold in bits, for BAN and GBN.
    pub threshold: Option<f64>,
    pub seconds: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum ReportFormat {
    #[default]
    Table,
    Json,
}

impl std::str::FromStr for ReportFormat {
    type Err = crate::Error;

    fn from_str(s: &str) -> crate::Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "table" | "text" => Ok(ReportFormat::Table),
            "json" => Ok(ReportFormat::Json),
            other => Err(crate::Error::Config(format!("unknown report format `{other}`"))),
        }
    }
}

/// Binomial standard error of an accuracy measured on `n` cases.
pub fn binomial_std(accuracy: f64, n: usize) -> f64 {
    if n == 0 {
        return 0.0;
    }
    (accuracy * (1.0 - accuracy) / n as f64).sqrt()
}

/// Mean and sample standard deviation.
pub fn mean_and_sample_std(xs: &[f64]) -> (f64, f64) {
    let n = xs.len() as f64;
    let mean = xs.iter().sum::<f64>() / n;
    if xs.len() < 2 {
        return (mean, 0.0);
    }
    let var = xs.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1.0);
    (mean, var.sqrt())
}

/// Fixed-width table, accuracies as percentages with two decimals.
pub fn render_table(reports: &[EvalReport]) -> String {
    let mut out = format!(
        "{:<16} {:<12} {:>15} {:>7} {:>9} {:>9} {:>8}\n",
        "dataset", "kind", "accuracy (%)", "n_test", "features", "threshold", "seconds"
    );
    for r in reports {
        let features = if r.features_total > 0 {
            format!("{}/{}", r.features_retained, r.features_total)
        } else {
            r.features_retained.to_string()
        };
        let threshold = r.threshold.map_or_else(|| "-".to_string(), |t| format!("{t}"));
        let accuracy = format!("{:.2}±{:.2}", 100.0 * r.accuracy, 100.0 * r.std);
        let _ = writeln!(
            out,
            "{:<16} {:<12} {:>15} {:>7} {:>9} {:>9} {:>8.2}",
            r.dataset, r.kind.as_str(), accuracy, r.n_test, features, threshold, r.seconds
        );
    }
    out
}

pub fn render_json(reports: &[EvalReport]) -> String {
    let mut out = String::new();
    for r in reports {
        out.push_str(&serde_json::to_string(r).expect("reports serialize"));
        out.push('\n');
    }
    out
}

pub fn render(reports: &[EvalReport], format: ReportFormat) -> String {
    match format {
        ReportFormat::Table => render_table(reports),
        ReportFormat::Json => render_json(reports),
    }
}
