use super::{Attribute, AttributeKind, Column, Dataset, MISSING};
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Method {
    /// Recursive class-entropy splitting with the MDL stopping rule of
    /// Fayyad and Irani.
    EntropyMdl,
    EqualFrequency(usize),
}

impl Default for Method {
    fn default() -> Self {
        Method::EntropyMdl
    }
}

#[derive(Debug, Clone, Copy, Default)]
pub struct Discretizer {
    pub method: Method,
}

/// Cut points per attribute, learned on one dataset and applicable to any
/// dataset with the same layout (train/test splits).
#[derive(Debug, Clone, PartialEq)]
pub struct DiscretizationPlan {
    /// `None` for attributes that were already categorical.
    pub cuts: Vec<Option<Vec<f64>>>,
}

impl Discretizer {
    pub fn new(method: Method) -> Self {
        Discretizer { method }
    }

    pub fn fit(&self, ds: &Dataset) -> Result<DiscretizationPlan> {
        if let Method::EqualFrequency(0) = self.method {
            return Err(Error::Config("equal-frequency discretization needs at least one bin".into()));
        }
        let class = ds.class_codes();
        let n_classes = ds.class_attribute().cardinality();
        let cuts = (0..ds.n_attributes())
            .map(|i| match ds.column(i) {
                Column::Categorical(_) => None,
                Column::Continuous(values) => {
                    let mut pairs: Vec<(f64, u32)> = values
                        .iter()
                        .zip(class)
                        .filter(|(v, _)| !v.is_nan())
                        .map(|(&v, &c)| (v, c))
                        .collect();
                    pairs.sort_by(|a, b| a.0.total_cmp(&b.0));
                    Some(match self.method {
                        Method::EntropyMdl => {
                            let mut cuts = Vec::new();
                            mdl_cuts(&pairs, n_classes, &mut cuts);
                            cuts.sort_by(f64::total_cmp);
                            cuts
                        }
                        Method::EqualFrequency(bins) => equal_frequency_cuts(&pairs, bins),
                    })
                }
            })
            .collect();
        Ok(DiscretizationPlan { cuts })
    }
}

impl DiscretizationPlan {
    /// Replaces every continuous column by interval categories.
    ///
    /// Attributes that received no cut become single-interval attributes
    /// flagged `ignored`. A `?` category is appended when the column has
    /// missing cells.
    pub fn apply(&self, ds: &Dataset) -> Result<Dataset> {
        if self.cuts.len() != ds.n_attributes() {
            return Err(Error::Schema("discretization plan does not match the dataset".into()));
        }
        if ds.is_discrete() {
            return Ok(ds.clone());
        }
        let mut schema = Vec::with_capacity(ds.n_attributes());
        let mut columns = Vec::with_capacity(ds.n_attributes());
        for (i, cuts) in self.cuts.iter().enumerate() {
            let attr = ds.attribute(i);
            match (ds.column(i), cuts) {
                (Column::Categorical(codes), _) => {
                    schema.push(attr.clone());
                    columns.push(Column::Categorical(codes.clone()));
                }
                (Column::Continuous(values), Some(cuts)) => {
                    let mut labels = interval_labels(cuts);
                    let missing_code = values.iter().any(|v| v.is_nan()).then(|| {
                        labels.push(MISSING.to_string());
                        (labels.len() - 1) as u32
                    });
                    let codes = values
                        .iter()
                        .map(|&v| match missing_code {
                            Some(m) if v.is_nan() => m,
                            _ => cuts.partition_point(|&c| c < v) as u32,
                        })
                        .collect();
                    schema.push(Attribute {
                        name: attr.name.clone(),
                        kind: AttributeKind::Categorical,
                        values: labels,
                        ignored: cuts.is_empty(),
                    });
                    columns.push(Column::Categorical(codes));
                }
                (Column::Continuous(_), None) => {
                    return Err(Error::Schema(format!("no cut points learned for `{}`", attr.name)))
                }
            }
        }
        Dataset::new(schema, ds.class_index(), columns)
    }
}

impl DiscretizationPlan {
    /// Rebuilds cut points from interval labels as produced by
    /// [`DiscretizationPlan::apply`]. `labels_for` maps an attribute name to
    /// the labels of its discretized counterpart; continuous columns without
    /// one are an error.
    pub fn from_interval_labels<'a>(ds: &Dataset, labels_for: impl Fn(&str) -> Option<&'a [String]>) -> Result<Self> {
        let mut cuts = Vec::with_capacity(ds.n_attributes());
        for attr in ds.schema() {
            if attr.kind == AttributeKind::Categorical {
                cuts.push(None);
                continue;
            }
            let parsed = labels_for(&attr.name).and_then(cuts_from_labels);
            match parsed {
                Some(c) => cuts.push(Some(c)),
                None => return Err(Error::Schema(format!("no interval labels for continuous attribute `{}`", attr.name))),
            }
        }
        Ok(DiscretizationPlan { cuts })
    }
}

/// Upper cut points encoded in interval labels, or `None` if a label is not
/// an interval. The missing-value label is skipped.
pub fn cuts_from_labels(labels: &[String]) -> Option<Vec<f64>> {
    let mut cuts = Vec::new();
    for label in labels.iter().filter(|l| l.as_str() != MISSING) {
        let inner = label.strip_prefix('(')?;
        let (_, upper) = inner.split_once(',')?;
        if upper == "+inf)" {
            continue;
        }
        cuts.push(upper.strip_suffix(']')?.parse::<f64>().ok()?);
    }
    Some(cuts)
}

/// Fits cut points on `ds` and applies them to it.
pub fn discretize(ds: &Dataset, method: Method) -> Result<Dataset> {
    Discretizer::new(method).fit(ds)?.apply(ds)
}

fn interval_labels(cuts: &[f64]) -> Vec<String> {
    if cuts.is_empty() {
        return vec!["(-inf,+inf)".to_string()];
    }
    let mut labels = Vec::with_capacity(cuts.len() + 1);
    labels.push(format!("(-inf,{}]", cuts[0]));
    for w in cuts.windows(2) {
        labels.push(format!("({},{}]", w[0], w[1]));
    }
    labels.push(format!("({},+inf)", cuts[cuts.len() - 1]));
    labels
}

fn entropy_of(counts: &[usize], total: usize) -> f64 {
    if total == 0 {
        return 0.0;
    }
    let n = total as f64;
    counts
        .iter()
        .filter(|&&c| c > 0)
        .map(|&c| {
            let p = c as f64 / n;
            -p * p.log2()
        })
        .sum()
}

fn distinct_classes(counts: &[usize]) -> usize {
    counts.iter().filter(|&&c| c > 0).count()
}

/// Recursive minimum-entropy split with the MDL acceptance test.
/// `pairs` is sorted by value.
fn mdl_cuts(pairs: &[(f64, u32)], n_classes: usize, out: &mut Vec<f64>) {
    let n = pairs.len();
    if n < 2 {
        return;
    }
    let mut total = vec![0usize; n_classes];
    for &(_, c) in pairs {
        total[c as usize] += 1;
    }
    let ent_all = entropy_of(&total, n);
    if ent_all == 0.0 {
        return;
    }

    let mut left = vec![0usize; n_classes];
    let mut best: Option<(f64, usize)> = None;
    for k in 1..n {
        left[pairs[k - 1].1 as usize] += 1;
        if pairs[k - 1].0 == pairs[k].0 {
            continue;
        }
        let right: Vec<usize> = total.iter().zip(&left).map(|(t, l)| t - l).collect();
        let e = (k as f64 * entropy_of(&left, k) + (n - k) as f64 * entropy_of(&right, n - k)) / n as f64;
        if best.map_or(true, |(b, _)| e < b) {
            best = Some((e, k));
        }
    }
    let Some((split_entropy, k)) = best else {
        return;
    };

    let mut left = vec![0usize; n_classes];
    for &(_, c) in &pairs[..k] {
        left[c as usize] += 1;
    }
    let right: Vec<usize> = total.iter().zip(&left).map(|(t, l)| t - l).collect();
    let ent_left = entropy_of(&left, k);
    let ent_right = entropy_of(&right, n - k);
    let classes = distinct_classes(&total) as f64;
    let classes_left = distinct_classes(&left) as f64;
    let classes_right = distinct_classes(&right) as f64;

    let gain = ent_all - split_entropy;
    let delta = (3f64.powf(classes) - 2.0).log2()
        - (classes * ent_all - classes_left * ent_left - classes_right * ent_right);
    let threshold = ((n as f64 - 1.0).log2() + delta) / n as f64;
    if gain <= threshold {
        return;
    }
    out.push((pairs[k - 1].0 + pairs[k].0) / 2.0);
    mdl_cuts(&pairs[..k], n_classes, out);
    mdl_cuts(&pairs[k..], n_classes, out);
}

fn equal_frequency_cuts(pairs: &[(f64, u32)], bins: usize) -> Vec<f64> {
    let n = pairs.len();
    let mut cuts: Vec<f64> = Vec::new();
    for b in 1..bins {
        let idx = b * n / bins;
        if idx == 0 || idx >= n {
            continue;
        }
        let (lo, hi) = (pairs[idx - 1].0, pairs[idx].0);
        if lo < hi {
            let cut = (lo + hi) / 2.0;
            if cuts.last().map_or(true, |&last| last < cut) {
                cuts.push(cut);
            }
        }
    }
    cuts
}
