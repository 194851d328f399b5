//! Structure learners for the four classifier families.

mod cbl1;
mod chow_liu;

pub use cbl1::{cbl1, Cbl1Outcome, Cbl1Stats};
pub use chow_liu::{chow_liu_tree, learn_tan, learn_tan_with};

use std::collections::BTreeSet;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::data::Dataset;
use crate::error::{Error, Result};
use crate::graph::{Dag, NodeOrdering};
use crate::infotheory::{CmiSource, DirectCmi, MiThreshold};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ClassifierKind {
    NaiveBayes,
    Tan,
    Ban,
    Gbn,
}

impl ClassifierKind {
    pub const ALL: [ClassifierKind; 4] = [
        ClassifierKind::NaiveBayes,
        ClassifierKind::Tan,
        ClassifierKind::Ban,
        ClassifierKind::Gbn,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            ClassifierKind::NaiveBayes => "naive_bayes",
            ClassifierKind::Tan => "tan",
            ClassifierKind::Ban => "ban",
            ClassifierKind::Gbn => "gbn",
        }
    }

    pub fn uses_threshold(self) -> bool {
        matches!(self, ClassifierKind::Ban | ClassifierKind::Gbn)
    }
}

impl fmt::Display for ClassifierKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for ClassifierKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().replace('-', "_").as_str() {
            "naive_bayes" | "nb" | "naivebayes" => Ok(ClassifierKind::NaiveBayes),
            "tan" => Ok(ClassifierKind::Tan),
            "ban" => Ok(ClassifierKind::Ban),
            "gbn" => Ok(ClassifierKind::Gbn),
            other => Err(Error::Config(format!("unknown classifier kind `{other}`"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LearnerConfig {
    pub kind: ClassifierKind,
    /// Present exactly for the threshold-driven learners (BAN, GBN).
    pub threshold: Option<MiThreshold>,
}

impl LearnerConfig {
    pub fn new(kind: ClassifierKind, threshold: Option<MiThreshold>) -> Result<Self> {
        match (kind.uses_threshold(), threshold) {
            (true, None) => Err(Error::Config(format!("{kind} needs a threshold"))),
            (false, Some(_)) => Err(Error::Config(format!("{kind} takes no threshold"))),
            _ => Ok(LearnerConfig { kind, threshold }),
        }
    }

    /// The default threshold for BAN/GBN, none otherwise.
    pub fn with_defaults(kind: ClassifierKind) -> Self {
        LearnerConfig {
            kind,
            threshold: kind.uses_threshold().then(MiThreshold::default),
        }
    }
}

/// A learned classifier graph over dataset column ids.
#[derive(Debug, Clone, PartialEq)]
pub struct LearnedStructure {
    pub kind: ClassifierKind,
    pub class: usize,
    pub dag: Dag,
    pub retained_features: BTreeSet<usize>,
}

impl LearnedStructure {
    /// Feature-to-feature arcs, i.e. arcs not leaving the class node.
    pub fn feature_arcs(&self) -> Vec<(usize, usize)> {
        self.dag
            .arcs()
            .iter()
            .copied()
            .filter(|&(p, c)| p != self.class && c != self.class)
            .collect()
    }
}

pub fn learn(ds: &Dataset, config: &LearnerConfig) -> Result<LearnedStructure> {
    learn_with(&DirectCmi::new(ds), config)
}

/// Runs the configured learner against a (possibly shared) score source.
pub fn learn_with(source: &dyn CmiSource, config: &LearnerConfig) -> Result<LearnedStructure> {
    let threshold = || config.threshold.ok_or_else(|| Error::Config(format!("{} needs a threshold", config.kind)));
    match config.kind {
        ClassifierKind::NaiveBayes => learn_naive_bayes(source.dataset()),
        ClassifierKind::Tan => learn_tan_with(source),
        ClassifierKind::Ban => learn_ban_with(source, threshold()?),
        ClassifierKind::Gbn => learn_gbn_with(source, threshold()?),
    }
}

fn naive_bayes_dag(ordering: NodeOrdering, class: usize) -> Dag {
    let mut dag = Dag::empty(ordering);
    let features: Vec<usize> = dag.nodes().iter().copied().filter(|&n| n != class).collect();
    for f in features {
        dag.add_arc(class, f).expect("fresh naive-bayes arcs");
    }
    dag
}

/// The class is the sole parent of every feature.
pub fn learn_naive_bayes(ds: &Dataset) -> Result<LearnedStructure> {
    ds.require_learnable()?;
    let features = ds.feature_indices();
    if features.is_empty() {
        return Err(Error::Config("dataset has no usable features".into()));
    }
    let class = ds.class_index();
    Ok(LearnedStructure {
        kind: ClassifierKind::NaiveBayes,
        class,
        dag: naive_bayes_dag(NodeOrdering::for_classifier(ds), class),
        retained_features: features.into_iter().collect(),
    })
}

pub fn learn_ban(ds: &Dataset, t: MiThreshold) -> Result<LearnedStructure> {
    learn_ban_with(&DirectCmi::new(ds), t)
}

/// Three-phase CI learning over the features with every test conditioned on
/// the class, then the class added as a parent of every feature.
pub fn learn_ban_with(source: &dyn CmiSource, t: MiThreshold) -> Result<LearnedStructure> {
    let ds = source.dataset();
    ds.require_learnable()?;
    let features = ds.feature_indices();
    if features.is_empty() {
        return Err(Error::Config("dataset has no usable features".into()));
    }
    let class = ds.class_index();
    let ordering = NodeOrdering::for_classifier(ds);
    let feature_ordering = NodeOrdering::new(features.clone())?;
    let augmented = cbl1(source, &feature_ordering, t, Some(class));

    let mut dag = naive_bayes_dag(ordering, class);
    for &(p, c) in augmented.dag.arcs() {
        dag.add_arc(p, c)?;
    }
    Ok(LearnedStructure {
        kind: ClassifierKind::Ban,
        class,
        dag,
        retained_features: features.into_iter().collect(),
    })
}

pub fn learn_gbn(ds: &Dataset, t: MiThreshold) -> Result<LearnedStructure> {
    learn_gbn_with(&DirectCmi::new(ds), t)
}

/// Unrestricted three-phase CI learning with the class as an ordinary node
/// of rank 0, pruned to the class's Markov blanket.
pub fn learn_gbn_with(source: &dyn CmiSource, t: MiThreshold) -> Result<LearnedStructure> {
    let ds = source.dataset();
    ds.require_learnable()?;
    if ds.feature_indices().is_empty() {
        return Err(Error::Config("dataset has no usable features".into()));
    }
    let class = ds.class_index();
    let full = cbl1(source, &NodeOrdering::for_classifier(ds), t, None).dag;
    let blanket = full.markov_blanket(class)?;
    let mut keep = blanket.clone();
    keep.insert(class);
    Ok(LearnedStructure {
        kind: ClassifierKind::Gbn,
        class,
        dag: full.restricted(&keep),
        retained_features: blanket,
    })
}
