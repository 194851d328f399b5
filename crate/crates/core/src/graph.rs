//! Directed acyclic graphs whose arcs are oriented by a fixed node ordering.

use std::collections::{BTreeSet, VecDeque};

use crate::data::Dataset;
use crate::error::{Error, Result};

/// Total order over a set of node ids. Arcs always point from the earlier
/// node to the later one.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct NodeOrdering {
    order: Vec<usize>,
    position: Vec<usize>,
}

const ABSENT: usize = usize::MAX;

impl NodeOrdering {
    pub fn new(order: Vec<usize>) -> Result<Self> {
        let size = order.iter().copied().max().map_or(0, |m| m + 1);
        let mut position = vec![ABSENT; size];
        for (rank, &node) in order.iter().enumerate() {
            if position[node] != ABSENT {
                return Err(Error::Config(format!("node {node} appears twice in the ordering")));
            }
            position[node] = rank;
        }
        Ok(NodeOrdering { order, position })
    }

    /// Class node first, then the usable features in column order.
    pub fn for_classifier(ds: &Dataset) -> Self {
        let mut order = vec![ds.class_index()];
        order.extend(ds.feature_indices());
        NodeOrdering::new(order).expect("column indices are distinct")
    }

    pub fn order(&self) -> &[usize] {
        &self.order
    }

    pub fn len(&self) -> usize {
        self.order.len()
    }

    pub fn is_empty(&self) -> bool {
        self.order.is_empty()
    }

    pub fn contains(&self, node: usize) -> bool {
        self.position.get(node).is_some_and(|&p| p != ABSENT)
    }

    pub fn rank(&self, node: usize) -> Option<usize> {
        self.position.get(node).copied().filter(|&p| p != ABSENT)
    }

    /// The ordering restricted to `keep`, preserving relative order.
    pub fn restricted(&self, keep: &BTreeSet<usize>) -> NodeOrdering {
        NodeOrdering::new(self.order.iter().copied().filter(|n| keep.contains(n)).collect())
            .expect("subsequence of a valid ordering")
    }
}

/// DAG over the nodes of a [`NodeOrdering`]. Acyclic by construction since
/// every arc runs from lower to higher rank.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Dag {
    ordering: NodeOrdering,
    parents: Vec<BTreeSet<usize>>,
    children: Vec<BTreeSet<usize>>,
    /// Arcs in insertion order.
    arcs: Vec<(usize, usize)>,
}

impl Dag {
    pub fn empty(ordering: NodeOrdering) -> Self {
        let size = ordering.position.len();
        Dag {
            ordering,
            parents: vec![BTreeSet::new(); size],
            children: vec![BTreeSet::new(); size],
            arcs: Vec::new(),
        }
    }

    pub fn ordering(&self) -> &NodeOrdering {
        &self.ordering
    }

    /// Node ids in ordering rank.
    pub fn nodes(&self) -> &[usize] {
        self.ordering.order()
    }

    pub fn contains(&self, node: usize) -> bool {
        self.ordering.contains(node)
    }

    fn check(&self, node: usize) -> Result<()> {
        if self.contains(node) {
            Ok(())
        } else {
            Err(Error::UnknownNode(node))
        }
    }

    /// Adds the arc between `a` and `b`, oriented from the lower-ranked to the
    /// higher-ranked endpoint whatever the argument order. Returns the arc as
    /// `(parent, child)`.
    pub fn add_arc(&mut self, a: usize, b: usize) -> Result<(usize, usize)> {
        self.check(a)?;
        self.check(b)?;
        if a == b {
            return Err(Error::SelfLoop(a));
        }
        let (parent, child) = if self.ordering.rank(a) < self.ordering.rank(b) {
            (a, b)
        } else {
            (b, a)
        };
        if self.children[parent].contains(&child) {
            return Err(Error::DuplicateArc(parent, child));
        }
        self.children[parent].insert(child);
        self.parents[child].insert(parent);
        self.arcs.push((parent, child));
        Ok((parent, child))
    }

    /// Removes the arc between `a` and `b` in whichever direction it exists.
    pub fn remove_arc(&mut self, a: usize, b: usize) -> bool {
        let Some(pos) = self
            .arcs
            .iter()
            .position(|&(p, c)| (p, c) == (a, b) || (p, c) == (b, a))
        else {
            return false;
        };
        let (p, c) = self.arcs.remove(pos);
        self.children[p].remove(&c);
        self.parents[c].remove(&p);
        true
    }

    pub fn has_edge(&self, a: usize, b: usize) -> bool {
        self.children.get(a).is_some_and(|s| s.contains(&b)) || self.children.get(b).is_some_and(|s| s.contains(&a))
    }

    pub fn arcs(&self) -> &[(usize, usize)] {
        &self.arcs
    }

    pub fn n_arcs(&self) -> usize {
        self.arcs.len()
    }

    pub fn parents(&self, n: usize) -> &BTreeSet<usize> {
        &self.parents[n]
    }

    pub fn children(&self, n: usize) -> &BTreeSet<usize> {
        &self.children[n]
    }

    /// Parents in ordering rank.
    pub fn parents_ranked(&self, n: usize) -> Vec<usize> {
        let mut ps: Vec<usize> = self.parents[n].iter().copied().collect();
        ps.sort_by_key(|&p| self.ordering.rank(p));
        ps
    }

    pub fn neighbors(&self, n: usize) -> impl Iterator<Item = usize> + '_ {
        self.parents[n].iter().chain(self.children[n].iter()).copied()
    }

    /// Nodes reachable from `start` in the undirected skeleton without
    /// passing through `blocked`.
    fn reachable(&self, start: usize, blocked: Option<usize>) -> Vec<bool> {
        let mut seen = vec![false; self.parents.len()];
        seen[start] = true;
        if let Some(b) = blocked {
            seen[b] = true;
        }
        let mut queue = VecDeque::from([start]);
        while let Some(u) = queue.pop_front() {
            for v in self.neighbors(u) {
                if !seen[v] {
                    seen[v] = true;
                    queue.push_back(v);
                }
            }
        }
        if let Some(b) = blocked {
            seen[b] = false;
        }
        seen
    }

    /// True iff `a` and `b` are connected in the undirected skeleton.
    pub fn adjacency_path_exists(&self, a: usize, b: usize) -> bool {
        if !self.contains(a) || !self.contains(b) || a == b {
            return false;
        }
        self.reachable(a, None)[b]
    }

    /// Parents, children and the children's other parents of `n`.
    pub fn markov_blanket(&self, n: usize) -> Result<BTreeSet<usize>> {
        self.check(n)?;
        let mut blanket: BTreeSet<usize> = self.parents[n].clone();
        for &c in &self.children[n] {
            blanket.insert(c);
            blanket.extend(self.parents[c].iter().copied());
        }
        blanket.remove(&n);
        Ok(blanket)
    }

    /// Candidate separating set for `a` and `b`, ignoring any arc between them.
    ///
    /// Takes the neighbors of `a` that lie on some skeleton path to `b`, or
    /// the matching neighbors of `b`, whichever set is smaller (ties go to
    /// `a`). Empty iff no such path exists.
    pub fn cut_set(&self, a: usize, b: usize) -> BTreeSet<usize> {
        if a == b || !self.contains(a) || !self.contains(b) {
            return BTreeSet::new();
        }
        let side = |from: usize, to: usize| -> BTreeSet<usize> {
            let reach = self.reachable(to, Some(from));
            self.neighbors(from).filter(|&u| u != to && reach[u]).collect()
        };
        let from_a = side(a, b);
        let from_b = side(b, a);
        if from_b.len() < from_a.len() {
            from_b
        } else {
            from_a
        }
    }

    /// Subgraph induced by `keep`; arcs touching other nodes are dropped.
    pub fn restricted(&self, keep: &BTreeSet<usize>) -> Dag {
        let mut out = Dag::empty(self.ordering.restricted(keep));
        for &(p, c) in &self.arcs {
            if keep.contains(&p) && keep.contains(&c) {
                out.add_arc(p, c).expect("arcs of a valid dag");
            }
        }
        out
    }

    /// Node ids in an order where every parent precedes its children.
    pub fn topological_order(&self) -> Vec<usize> {
        self.ordering.order().to_vec()
    }

    /// Debug rendering: one `parent -> child` line per arc, using `label`
    /// for node names.
    pub fn to_edge_list(&self, label: impl Fn(usize) -> String) -> String {
        let mut out = String::new();
        for &(p, c) in &self.arcs {
            out.push_str(&format!("{} -> {}\n", label(p), label(c)));
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn dag(n: usize) -> Dag {
        Dag::empty(NodeOrdering::new((0..n).collect()).unwrap())
    }

    #[test]
    fn arcs_follow_the_ordering() {
        let mut g = Dag::empty(NodeOrdering::new(vec![2, 0, 1, 3]).unwrap());
        assert_eq!(g.add_arc(3, 0).unwrap(), (0, 3));
        assert_eq!(g.add_arc(0, 2).unwrap(), (2, 0));
        assert!(matches!(g.add_arc(2, 0), Err(Error::DuplicateArc(2, 0))));
        assert!(matches!(g.add_arc(1, 1), Err(Error::SelfLoop(1))));
        assert!(matches!(g.add_arc(1, 9), Err(Error::UnknownNode(9))));
    }

    #[test]
    fn path_queries() {
        let mut g = dag(5);
        assert!(!g.adjacency_path_exists(0, 1));
        g.add_arc(0, 1).unwrap();
        g.add_arc(1, 2).unwrap();
        g.add_arc(3, 4).unwrap();
        assert!(g.adjacency_path_exists(0, 2));
        assert!(g.adjacency_path_exists(2, 0));
        assert!(!g.adjacency_path_exists(0, 4));
    }

    #[test]
    fn blanket_examples() {
        // a=0, b=1, c=2, d=3, e=4: a->c<-b, c->d, e->d; e ranks before d
        let mut g = Dag::empty(NodeOrdering::new(vec![0, 1, 4, 2, 3, 5]).unwrap());
        for (p, c) in [(0, 2), (1, 2), (2, 3), (4, 3)] {
            g.add_arc(p, c).unwrap();
        }
        assert_eq!(g.markov_blanket(2).unwrap(), BTreeSet::from([0, 1, 3, 4]));
        assert!(g.markov_blanket(5).unwrap().is_empty());
        assert!(g.markov_blanket(9).is_err());

        let mut nb = dag(4);
        for f in 1..4 {
            nb.add_arc(0, f).unwrap();
        }
        assert_eq!(nb.markov_blanket(0).unwrap(), BTreeSet::from([1, 2, 3]));
    }

    #[test]
    fn cut_set_examples() {
        let mut chain = dag(3);
        chain.add_arc(0, 1).unwrap();
        chain.add_arc(1, 2).unwrap();
        chain.add_arc(0, 2).unwrap();
        assert_eq!(chain.cut_set(0, 2), BTreeSet::from([1]));

        let mut apart = dag(4);
        apart.add_arc(0, 1).unwrap();
        apart.add_arc(2, 3).unwrap();
        assert!(apart.cut_set(0, 3).is_empty());

        // a=0, p=1, q=2, b=3
        let mut diamond = dag(4);
        for (x, y) in [(0, 1), (1, 3), (0, 2), (2, 3)] {
            diamond.add_arc(x, y).unwrap();
        }
        assert_eq!(diamond.cut_set(0, 3), BTreeSet::from([1, 2]));
    }

    #[test]
    fn cut_set_picks_the_smaller_side() {
        // a=0 has neighbors 1,2 both leading to b=4 via 3; b's only neighbor is 3
        let mut g = dag(5);
        for (x, y) in [(0, 1), (0, 2), (1, 3), (2, 3), (3, 4)] {
            g.add_arc(x, y).unwrap();
        }
        assert_eq!(g.cut_set(0, 4), BTreeSet::from([3]));
        assert_eq!(g.cut_set(4, 0), BTreeSet::from([3]));
    }

    #[test]
    fn restriction_drops_outside_arcs() {
        let mut g = dag(4);
        for (x, y) in [(0, 1), (1, 2), (2, 3)] {
            g.add_arc(x, y).unwrap();
        }
        let r = g.restricted(&BTreeSet::from([0, 1, 3]));
        assert_eq!(r.arcs(), &[(0, 1)]);
        assert!(!r.contains(2));
    }

    #[test]
    fn edge_list_rendering() {
        let mut g = dag(3);
        g.add_arc(2, 0).unwrap();
        assert_eq!(g.to_edge_list(|n| format!("x{n}")), "x0 -> x2\n");
    }
}
