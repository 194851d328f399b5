use std::collections::{BTreeSet, VecDeque};

use rayon::prelude::*;

use super::{naive_bayes_dag, learn_naive_bayes, ClassifierKind, LearnedStructure};
use crate::data::Dataset;
use crate::error::{Error, Result};
use crate::graph::NodeOrdering;
use crate::infotheory::{CmiSource, DirectCmi, PairScore};

/// Maximum-weight spanning tree over `features` by descending-score edge
/// insertion, skipping edges that would close a cycle.
///
/// Evaluates `score` exactly once per unordered pair. Ties keep the pair
/// enumeration order (lower position in `features` first).
pub fn chow_liu_tree<F>(features: &[usize], score: F) -> Vec<PairScore>
where
    F: Fn(usize, usize) -> f64 + Sync,
{
    let pairs: Vec<(usize, usize)> = (0..features.len())
        .flat_map(|a| ((a + 1)..features.len()).map(move |b| (a, b)))
        .collect();
    let mut scored: Vec<(usize, usize, f64)> = pairs
        .par_iter()
        .map(|&(a, b)| (a, b, score(features[a], features[b])))
        .collect();
    scored.sort_by(|x, y| y.2.total_cmp(&x.2));

    let mut components = UnionFind::new(features.len());
    let mut tree = Vec::with_capacity(features.len().saturating_sub(1));
    for (a, b, s) in scored {
        if components.union(a, b) {
            tree.push(PairScore {
                i: features[a],
                j: features[b],
                score: s,
            });
        }
    }
    tree
}

struct UnionFind {
    parent: Vec<usize>,
}

impl UnionFind {
    fn new(n: usize) -> Self {
        UnionFind { parent: (0..n).collect() }
    }

    fn find(&mut self, mut x: usize) -> usize {
        while self.parent[x] != x {
            self.parent[x] = self.parent[self.parent[x]];
            x = self.parent[x];
        }
        x
    }

    fn union(&mut self, a: usize, b: usize) -> bool {
        let (ra, rb) = (self.find(a), self.find(b));
        if ra == rb {
            return false;
        }
        self.parent[rb] = ra;
        true
    }
}

pub fn learn_tan(ds: &Dataset) -> Result<LearnedStructure> {
    learn_tan_with(&DirectCmi::new(ds))
}

/// Chow-Liu tree over the features scored by I(x_i; x_j | class), directed
/// away from the first feature, plus the class as parent of every feature.
///
/// The returned ordering is the class followed by the breadth-first order of
/// the tree, so that every arc runs from lower to higher rank.
pub fn learn_tan_with(source: &dyn CmiSource) -> Result<LearnedStructure> {
    let ds = source.dataset();
    ds.require_learnable()?;
    let features = ds.feature_indices();
    if features.is_empty() {
        return Err(Error::Config("dataset has no usable features".into()));
    }
    if features.len() == 1 {
        let mut s = learn_naive_bayes(ds)?;
        s.kind = ClassifierKind::Tan;
        return Ok(s);
    }
    let class = ds.class_index();
    let tree = chow_liu_tree(&features, |i, j| source.cmi(i, j, &[class]));

    let mut adjacent: Vec<BTreeSet<usize>> = vec![BTreeSet::new(); ds.n_attributes()];
    for e in &tree {
        adjacent[e.i].insert(e.j);
        adjacent[e.j].insert(e.i);
    }
    let rank_in_columns = |n: usize| features.iter().position(|&f| f == n);
    let mut order = vec![class];
    let mut seen = vec![false; ds.n_attributes()];
    for &root in &features {
        if seen[root] {
            continue;
        }
        seen[root] = true;
        let mut queue = VecDeque::from([root]);
        while let Some(u) = queue.pop_front() {
            order.push(u);
            let mut next: Vec<usize> = adjacent[u].iter().copied().filter(|&v| !seen[v]).collect();
            next.sort_by_key(|&v| rank_in_columns(v));
            for v in next {
                seen[v] = true;
                queue.push_back(v);
            }
        }
    }

    let mut dag = naive_bayes_dag(NodeOrdering::new(order)?, class);
    for e in &tree {
        dag.add_arc(e.i, e.j)?;
    }
    Ok(LearnedStructure {
        kind: ClassifierKind::Tan,
        class,
        dag,
        retained_features: features.into_iter().collect(),
    })
}
