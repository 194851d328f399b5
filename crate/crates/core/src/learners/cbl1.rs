use rayon::prelude::*;

use crate::graph::{Dag, NodeOrdering};
use crate::infotheory::{CmiSource, MiThreshold};

/// Score queries issued per phase (cache hits included).
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct Cbl1Stats {
    pub draft_tests: usize,
    pub thicken_tests: usize,
    pub thin_tests: usize,
}

impl Cbl1Stats {
    pub fn total(&self) -> usize {
        self.draft_tests + self.thicken_tests + self.thin_tests
    }
}

#[derive(Debug, Clone)]
pub struct Cbl1Outcome {
    pub dag: Dag,
    /// Arcs present at the end of drafting, in insertion order.
    pub draft_arcs: Vec<(usize, usize)>,
    pub stats: Cbl1Stats,
}

/// Three-phase CI structure learning over the nodes of `ordering`.
///
/// Every dependence test conditions on `aug` as well when it is given (the
/// class node in BAN learning); `aug` must not be one of the nodes.
///
/// 1. Draft: score every pair, keep those above the threshold in descending
///    order, and add an arc whenever the endpoints are not yet connected.
///    Connected pairs are remembered.
/// 2. Thicken: for each remembered pair, add the arc if the pair stays
///    dependent given its cut set.
/// 3. Thin: one pass over the arcs in insertion order; an arc whose endpoints
///    are otherwise connected is dropped when they are independent given the
///    cut set.
pub fn cbl1(source: &dyn CmiSource, ordering: &NodeOrdering, t: MiThreshold, aug: Option<usize>) -> Cbl1Outcome {
    let nodes = ordering.order();
    debug_assert!(aug.map_or(true, |a| !ordering.contains(a)));
    let mut stats = Cbl1Stats::default();
    let eps = t.epsilon();
    let with_aug = |mut z: Vec<usize>| {
        z.extend(aug);
        z
    };
    let dependent = |i: usize, j: usize, z: Vec<usize>| source.cmi(i, j, &with_aug(z)) > eps;

    let pairs: Vec<(usize, usize)> = (0..nodes.len())
        .flat_map(|a| ((a + 1)..nodes.len()).map(move |b| (nodes[a], nodes[b])))
        .collect();
    let mut scored: Vec<(usize, usize, f64)> = pairs
        .par_iter()
        .map(|&(i, j)| (i, j, source.cmi(i, j, &with_aug(Vec::new()))))
        .collect();
    stats.draft_tests = scored.len();
    scored.retain(|&(_, _, s)| s > eps);
    scored.sort_by(|x, y| y.2.total_cmp(&x.2));

    let mut dag = Dag::empty(ordering.clone());
    let mut remembered = Vec::new();
    for &(i, j, _) in &scored {
        if dag.adjacency_path_exists(i, j) {
            remembered.push((i, j));
        } else {
            dag.add_arc(i, j).expect("draft adds each pair once");
        }
    }
    let draft_arcs = dag.arcs().to_vec();

    for (i, j) in remembered {
        let z: Vec<usize> = dag.cut_set(i, j).into_iter().collect();
        stats.thicken_tests += 1;
        if dependent(i, j, z) {
            dag.add_arc(i, j).expect("remembered pairs are not adjacent");
        }
    }

    let snapshot = dag.arcs().to_vec();
    for (p, c) in snapshot {
        let z: Vec<usize> = dag.cut_set(p, c).into_iter().collect();
        if z.is_empty() {
            // the arc is the only connection between its endpoints
            continue;
        }
        stats.thin_tests += 1;
        if !dependent(p, c, z) {
            dag.remove_arc(p, c);
        }
    }

    Cbl1Outcome { dag, draft_arcs, stats }
}
