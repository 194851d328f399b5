//! Categorical datasets: schema, columnar storage, loading, discretization
//! and seeded partitioning.

mod discretize;
mod load;
mod split;

pub use discretize::{cuts_from_labels, discretize, DiscretizationPlan, Discretizer, Method};
pub use load::{load_csv, read_csv, write_csv, ClassColumn, LoadOptions, SchemaSpec};
pub use split::{cv_folds, split_holdout, SplitSpec};

use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Label of the reserved category that stands for a missing cell.
pub const MISSING: &str = "?";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum AttributeKind {
    Categorical,
    Continuous,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Attribute {
    pub name: String,
    pub kind: AttributeKind,
    /// Category labels in first-appearance order. Empty for continuous attributes.
    pub values: Vec<String>,
    /// Set by discretization when the attribute carries no usable information.
    /// Learners skip ignored attributes.
    pub ignored: bool,
}

impl Attribute {
    pub fn categorical(name: impl Into<String>, values: Vec<String>) -> Self {
        Attribute {
            name: name.into(),
            kind: AttributeKind::Categorical,
            values,
            ignored: false,
        }
    }

    pub fn continuous(name: impl Into<String>) -> Self {
        Attribute {
            name: name.into(),
            kind: AttributeKind::Continuous,
            values: Vec::new(),
            ignored: false,
        }
    }

    pub fn cardinality(&self) -> usize {
        self.values.len()
    }

    pub fn value_index(&self, label: &str) -> Option<usize> {
        self.values.iter().position(|v| v == label)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Column {
    Categorical(Vec<u32>),
    /// Missing cells are stored as NaN.
    Continuous(Vec<f64>),
}

impl Column {
    fn len(&self) -> usize {
        match self {
            Column::Categorical(c) => c.len(),
            Column::Continuous(c) => c.len(),
        }
    }

    fn select(&self, rows: &[usize]) -> Column {
        match self {
            Column::Categorical(c) => Column::Categorical(rows.iter().map(|&r| c[r]).collect()),
            Column::Continuous(c) => Column::Continuous(rows.iter().map(|&r| c[r]).collect()),
        }
    }
}

/// Column-major table of cases. Cheap to clone: the schema is shared.
#[derive(Debug, Clone, PartialEq)]
pub struct Dataset {
    schema: Arc<[Attribute]>,
    class_index: usize,
    columns: Vec<Column>,
    n_cases: usize,
}

impl Dataset {
    pub fn new(schema: Vec<Attribute>, class_index: usize, columns: Vec<Column>) -> Result<Self> {
        if schema.len() != columns.len() {
            return Err(Error::Schema(format!(
                "{} attributes but {} columns",
                schema.len(),
                columns.len()
            )));
        }
        if class_index >= schema.len() {
            return Err(Error::Schema(format!("class index {class_index} out of range")));
        }
        let n_cases = columns.first().map_or(0, Column::len);
        for (attr, col) in schema.iter().zip(&columns) {
            if col.len() != n_cases {
                return Err(Error::Schema(format!("column `{}` has the wrong length", attr.name)));
            }
            match (attr.kind, col) {
                (AttributeKind::Categorical, Column::Categorical(codes)) => {
                    if attr.values.is_empty() && n_cases > 0 {
                        return Err(Error::Schema(format!("attribute `{}` has no values", attr.name)));
                    }
                    let mut seen = std::collections::HashSet::new();
                    if !attr.values.iter().all(|v| seen.insert(v.as_str())) {
                        return Err(Error::Schema(format!("attribute `{}` has duplicate labels", attr.name)));
                    }
                    if let Some(&bad) = codes.iter().find(|&&c| c as usize >= attr.values.len()) {
                        return Err(Error::ValueOutOfRange {
                            attribute: attr.name.clone(),
                            index: bad as usize,
                        });
                    }
                }
                (AttributeKind::Continuous, Column::Continuous(_)) => {}
                _ => {
                    return Err(Error::Schema(format!(
                        "column `{}` does not match its declared kind",
                        attr.name
                    )))
                }
            }
        }
        let class = &schema[class_index];
        if class.kind != AttributeKind::Categorical {
            return Err(Error::Schema(format!("class attribute `{}` must be categorical", class.name)));
        }
        if let Some(missing) = class.value_index(MISSING) {
            if let Column::Categorical(codes) = &columns[class_index] {
                if let Some(row) = codes.iter().position(|&c| c as usize == missing) {
                    return Err(Error::MissingClassValue { row: row + 1 });
                }
            }
        }
        Ok(Dataset {
            schema: schema.into(),
            class_index,
            columns,
            n_cases,
        })
    }

    pub fn schema(&self) -> &[Attribute] {
        &self.schema
    }

    pub fn attribute(&self, i: usize) -> &Attribute {
        &self.schema[i]
    }

    pub fn n_attributes(&self) -> usize {
        self.schema.len()
    }

    pub fn n_cases(&self) -> usize {
        self.n_cases
    }

    pub fn class_index(&self) -> usize {
        self.class_index
    }

    pub fn class_attribute(&self) -> &Attribute {
        &self.schema[self.class_index]
    }

    pub fn cardinality(&self, i: usize) -> usize {
        self.schema[i].values.len()
    }

    pub fn column(&self, i: usize) -> &Column {
        &self.columns[i]
    }

    /// Category codes of a categorical column.
    ///
    /// Panics on a continuous column; call [`Dataset::require_discrete`] first.
    pub fn codes(&self, i: usize) -> &[u32] {
        match &self.columns[i] {
            Column::Categorical(c) => c,
            Column::Continuous(_) => panic!("attribute `{}` is continuous", self.schema[i].name),
        }
    }

    pub fn class_codes(&self) -> &[u32] {
        self.codes(self.class_index)
    }

    pub fn is_discrete(&self) -> bool {
        self.schema.iter().all(|a| a.kind == AttributeKind::Categorical)
    }

    pub fn require_discrete(&self) -> Result<()> {
        match self.schema.iter().find(|a| a.kind != AttributeKind::Categorical) {
            None => Ok(()),
            Some(a) => Err(Error::Schema(format!(
                "attribute `{}` is continuous; discretize the dataset first",
                a.name
            ))),
        }
    }

    /// Checks what every learner needs: categorical columns only and a class
    /// with at least two values.
    pub fn require_learnable(&self) -> Result<()> {
        self.require_discrete()?;
        let class = self.class_attribute();
        if class.values.len() < 2 {
            return Err(Error::DegenerateClass {
                name: class.name.clone(),
                found: class.values.len(),
            });
        }
        Ok(())
    }

    /// Non-class, non-ignored attribute indices in column order.
    pub fn feature_indices(&self) -> Vec<usize> {
        (0..self.schema.len())
            .filter(|&i| i != self.class_index && !self.schema[i].ignored)
            .collect()
    }

    /// Category code of one cell.
    pub fn value(&self, row: usize, col: usize) -> u32 {
        self.codes(col)[row]
    }

    pub fn row(&self, row: usize) -> Vec<u32> {
        (0..self.schema.len()).map(|c| self.value(row, c)).collect()
    }

    /// Rows in the given order (duplicates allowed), sharing the schema.
    pub fn subset(&self, rows: &[usize]) -> Dataset {
        Dataset {
            schema: Arc::clone(&self.schema),
            class_index: self.class_index,
            columns: self.columns.iter().map(|c| c.select(rows)).collect(),
            n_cases: rows.len(),
        }
    }

    pub fn shares_schema(&self, other: &Dataset) -> bool {
        self.class_index == other.class_index
            && (Arc::ptr_eq(&self.schema, &other.schema) || self.schema == other.schema)
    }

    /// Appends the rows of `other`, merging category labels by name.
    ///
    /// Attribute names, order and kinds must agree. Labels only present in
    /// `other` are appended after this dataset's labels.
    pub fn concat(&self, other: &Dataset) -> Result<Dataset> {
        if self.schema.len() != other.schema.len() || self.class_index != other.class_index {
            return Err(Error::Schema("datasets have different attribute layouts".into()));
        }
        let mut schema = Vec::with_capacity(self.schema.len());
        let mut columns = Vec::with_capacity(self.schema.len());
        for (i, (a, b)) in self.schema.iter().zip(other.schema.iter()).enumerate() {
            if a.name != b.name || a.kind != b.kind {
                return Err(Error::Schema(format!(
                    "attribute {i}: `{}` does not match `{}`",
                    a.name, b.name
                )));
            }
            match (&self.columns[i], &other.columns[i]) {
                (Column::Categorical(x), Column::Categorical(y)) => {
                    let mut merged = a.clone();
                    let remap: Vec<u32> = b
                        .values
                        .iter()
                        .map(|label| match merged.value_index(label) {
                            Some(k) => k as u32,
                            None => {
                                merged.values.push(label.clone());
                                (merged.values.len() - 1) as u32
                            }
                        })
                        .collect();
                    merged.ignored = a.ignored && b.ignored;
                    let mut codes = x.clone();
                    codes.extend(y.iter().map(|&c| remap[c as usize]));
                    schema.push(merged);
                    columns.push(Column::Categorical(codes));
                }
                (Column::Continuous(x), Column::Continuous(y)) => {
                    let mut values = x.clone();
                    values.extend_from_slice(y);
                    schema.push(a.clone());
                    columns.push(Column::Continuous(values));
                }
                _ => unreachable!("kinds already compared"),
            }
        }
        Dataset::new(schema, self.class_index, columns)
    }

    pub fn index_of(&self, name: &str) -> Option<usize> {
        self.schema.iter().position(|a| a.name == name)
    }

    /// Builds a fully categorical dataset from code rows. Labels are the
    /// decimal renderings of the codes. Handy for synthetic data.
    pub fn from_codes(names: &[&str], cards: &[usize], class_index: usize, rows: &[Vec<u32>]) -> Result<Dataset> {
        let schema = names
            .iter()
            .zip(cards)
            .map(|(n, &k)| Attribute::categorical(*n, (0..k).map(|v| v.to_string()).collect()))
            .collect();
        let columns = (0..names.len())
            .map(|c| Column::Categorical(rows.iter().map(|r| r[c]).collect()))
            .collect();
        Dataset::new(schema, class_index, columns)
    }
}
