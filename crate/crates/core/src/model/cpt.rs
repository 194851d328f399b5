use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Tables with more parent configurations than this keep only the rows
/// that differ from a shared default row.
pub const DENSE_ROW_LIMIT: usize = 4096;

/// Conditional distribution of one node given its parents.
///
/// Rows are indexed in mixed-radix parent-configuration order with the first
/// parent varying slowest; each row holds one probability per node value.
/// Every configuration has a row: large tables store the listed rows and
/// answer the rest from a default row.
#[derive(Debug, Clone, PartialEq)]
pub struct Cpt {
    pub node: usize,
    pub parents: Vec<usize>,
    pub parent_cards: Vec<usize>,
    pub card: usize,
    n_rows: usize,
    rows: Rows,
}

#[derive(Debug, Clone, PartialEq)]
enum Rows {
    Dense(Vec<f64>),
    Sparse { listed: BTreeMap<usize, Vec<f64>>, default: Vec<f64> },
}

fn row_count(node: usize, parent_cards: &[usize]) -> Result<usize> {
    parent_cards
        .iter()
        .try_fold(1usize, |acc, &k| acc.checked_mul(k))
        .ok_or_else(|| Error::Schema(format!("node {node} has too many parent configurations")))
}

impl Cpt {
    /// Dense table: `table` holds every row in configuration order.
    pub fn new(node: usize, card: usize, parents: Vec<usize>, parent_cards: Vec<usize>, table: Vec<f64>) -> Result<Self> {
        let n_rows = row_count(node, &parent_cards)?;
        if parents.len() != parent_cards.len() || card == 0 || Some(table.len()) != n_rows.checked_mul(card) {
            return Err(Error::Schema(format!("table for node {node} has the wrong shape")));
        }
        Ok(Cpt {
            node,
            parents,
            parent_cards,
            card,
            n_rows,
            rows: Rows::Dense(table),
        })
    }

    /// Table given by its listed rows plus a row for every other
    /// configuration. Stored densely when small.
    pub fn from_rows(
        node: usize,
        card: usize,
        parents: Vec<usize>,
        parent_cards: Vec<usize>,
        listed: BTreeMap<usize, Vec<f64>>,
        default: Vec<f64>,
    ) -> Result<Self> {
        let n_rows = row_count(node, &parent_cards)?;
        let bad_shape = parents.len() != parent_cards.len()
            || card == 0
            || default.len() != card
            || listed.iter().any(|(&r, row)| r >= n_rows || row.len() != card);
        if bad_shape {
            return Err(Error::Schema(format!("table for node {node} has the wrong shape")));
        }
        let rows = if n_rows <= DENSE_ROW_LIMIT {
            let mut table = Vec::with_capacity(n_rows * card);
            for r in 0..n_rows {
                table.extend_from_slice(listed.get(&r).unwrap_or(&default));
            }
            Rows::Dense(table)
        } else {
            Rows::Sparse { listed, default }
        };
        Ok(Cpt {
            node,
            parents,
            parent_cards,
            card,
            n_rows,
            rows,
        })
    }

    /// Estimates a table from `(configuration, value)` observations.
    pub fn from_counts(
        node: usize,
        card: usize,
        parents: Vec<usize>,
        parent_cards: Vec<usize>,
        observations: impl IntoIterator<Item = (usize, usize)>,
        smoothing: Smoothing,
    ) -> Result<Self> {
        let mut counts: BTreeMap<usize, Vec<f64>> = BTreeMap::new();
        for (config, value) in observations {
            counts.entry(config).or_insert_with(|| vec![0.0; card])[value] += 1.0;
        }
        for row in counts.values_mut() {
            normalize_counts(row, smoothing);
        }
        Cpt::from_rows(node, card, parents, parent_cards, counts, vec![1.0 / card as f64; card])
    }

    pub fn uniform(node: usize, card: usize, parents: Vec<usize>, parent_cards: Vec<usize>) -> Self {
        Cpt::from_rows(node, card, parents, parent_cards, BTreeMap::new(), vec![1.0 / card as f64; card])
            .expect("uniform table shape")
    }

    pub fn n_rows(&self) -> usize {
        self.n_rows
    }

    pub fn row(&self, config: usize) -> &[f64] {
        match &self.rows {
            Rows::Dense(table) => &table[config * self.card..(config + 1) * self.card],
            Rows::Sparse { listed, default } => listed.get(&config).unwrap_or(default),
        }
    }

    /// The full table in configuration order, when stored densely.
    pub fn dense_table(&self) -> Option<&[f64]> {
        match &self.rows {
            Rows::Dense(table) => Some(table),
            Rows::Sparse { .. } => None,
        }
    }

    /// Explicitly stored rows and the default row of a sparse table.
    pub fn sparse_rows(&self) -> Option<(&BTreeMap<usize, Vec<f64>>, &[f64])> {
        match &self.rows {
            Rows::Dense(_) => None,
            Rows::Sparse { listed, default } => Some((listed, default)),
        }
    }

    /// Row index of a parent configuration given as one value per parent.
    pub fn config_index(&self, parent_values: impl IntoIterator<Item = usize>) -> usize {
        parent_values
            .into_iter()
            .zip(&self.parent_cards)
            .fold(0, |acc, (v, &k)| acc * k + v)
    }

    /// Parent values of a row index; inverse of [`Cpt::config_index`].
    pub fn config_values(&self, mut config: usize) -> Vec<usize> {
        let mut values = vec![0; self.parent_cards.len()];
        for (slot, &k) in values.iter_mut().zip(&self.parent_cards).rev() {
            *slot = config % k;
            config /= k;
        }
        values
    }

    /// P(node = value | parents as found in `assignment`), where
    /// `assignment` holds one value per network node.
    pub fn prob(&self, value: usize, assignment: &[usize]) -> f64 {
        let config = self.config_index(self.parents.iter().map(|&p| assignment[p]));
        self.row(config)[value]
    }

    /// First stored row that is not a distribution within `tol`.
    pub fn check_rows(&self, tol: f64) -> std::result::Result<(), usize> {
        let bad = |row: &[f64]| {
            let sum: f64 = row.iter().sum();
            (sum - 1.0).abs() > tol || row.iter().any(|&p| p < 0.0 || p.is_nan())
        };
        match &self.rows {
            Rows::Dense(_) => match (0..self.n_rows).find(|&r| bad(self.row(r))) {
                Some(r) => Err(r),
                None => Ok(()),
            },
            Rows::Sparse { listed, default } => {
                if let Some((&r, _)) = listed.iter().find(|(_, row)| bad(row)) {
                    return Err(r);
                }
                match (bad(default), (0..self.n_rows).find(|r| !listed.contains_key(r))) {
                    (true, Some(r)) => Err(r),
                    _ => Ok(()),
                }
            }
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Smoothing {
    /// Plain relative frequencies; unseen parent configurations get the
    /// uniform distribution.
    None,
    /// Adds `alpha` to every count.
    Laplace(f64),
}

impl Default for Smoothing {
    fn default() -> Self {
        Smoothing::Laplace(1.0)
    }
}

impl fmt::Display for Smoothing {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Smoothing::None => f.write_str("none"),
            Smoothing::Laplace(a) => write!(f, "laplace:{a}"),
        }
    }
}

impl FromStr for Smoothing {
    type Err = Error;

    /// `none`, `laplace` (alpha 1) or `laplace:<alpha>`.
    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim().to_ascii_lowercase();
        match s.split_once(':') {
            None if s == "none" || s == "mle" => Ok(Smoothing::None),
            None if s == "laplace" => Ok(Smoothing::Laplace(1.0)),
            Some(("laplace", alpha)) => match alpha.parse::<f64>() {
                Ok(a) if a > 0.0 && a.is_finite() => Ok(Smoothing::Laplace(a)),
                _ => Err(Error::Config(format!("bad laplace alpha `{alpha}`"))),
            },
            _ => Err(Error::Config(format!("unknown smoothing `{s}`"))),
        }
    }
}

/// Turns a row of counts into probabilities in place.
pub(crate) fn normalize_counts(row: &mut [f64], smoothing: Smoothing) {
    let k = row.len() as f64;
    let total: f64 = row.iter().sum();
    match smoothing {
        Smoothing::None if total == 0.0 => row.iter_mut().for_each(|p| *p = 1.0 / k),
        Smoothing::None => row.iter_mut().for_each(|p| *p /= total),
        Smoothing::Laplace(alpha) => {
            let denom = total + alpha * k;
            row.iter_mut().for_each(|p| *p = (*p + alpha) / denom);
        }
    }
}
