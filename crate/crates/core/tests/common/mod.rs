#![allow(dead_code)]

use std::collections::BTreeMap;
use std::path::PathBuf;

use bnc::data::{read_csv, Dataset, LoadOptions};
use bnc::graph::{Dag, NodeOrdering};
use bnc::infotheory::conditional_mutual_information;
use bnc::learners::{chow_liu_tree, ClassifierKind, LearnedStructure};
use bnc::model::{BayesNet, Cpt, Variable};
use rand::seq::SliceRandom;
use rand::Rng;

pub fn data_path(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../data").join(name)
}

pub fn load(name: &str) -> Dataset {
    read_csv(data_path(name), &LoadOptions::default()).unwrap_or_else(|e| panic!("{name}: {e}"))
}

fn random_row<R: Rng>(rng: &mut R, card: usize) -> Vec<f64> {
    let w: Vec<f64> = (0..card).map(|_| rng.gen_range(0.05..1.0)).collect();
    let total: f64 = w.iter().sum();
    w.into_iter().map(|x| x / total).collect()
}

/// Random DAG over `n` nodes with cardinalities up to `max_card`, random CPTs
/// and a random class node.
pub fn random_net<R: Rng>(rng: &mut R, n: usize, max_card: usize, arc_prob: f64) -> BayesNet {
    let mut order: Vec<usize> = (0..n).collect();
    order.shuffle(rng);
    let mut dag = Dag::empty(NodeOrdering::new(order.clone()).unwrap());
    for a in 0..n {
        for b in (a + 1)..n {
            if rng.gen_bool(arc_prob) {
                dag.add_arc(order[a], order[b]).unwrap();
            }
        }
    }
    let cards: Vec<usize> = (0..n).map(|_| rng.gen_range(2..=max_card)).collect();
    let variables: Vec<Variable> = (0..n)
        .map(|v| Variable::new(format!("v{v}"), (0..cards[v]).map(|k| format!("s{k}")).collect()))
        .collect();
    let cpts: Vec<Cpt> = (0..n)
        .map(|v| {
            let parents: Vec<usize> = dag.parents(v).iter().copied().collect();
            let parent_cards: Vec<usize> = parents.iter().map(|&p| cards[p]).collect();
            let rows: usize = parent_cards.iter().product();
            let table: Vec<f64> = (0..rows).flat_map(|_| random_row(rng, cards[v])).collect();
            Cpt::new(v, cards[v], parents, parent_cards, table).unwrap()
        })
        .collect();
    let class = rng.gen_range(0..n);
    let retained_features = dag.markov_blanket(class).unwrap();
    let structure = LearnedStructure {
        kind: ClassifierKind::Gbn,
        class,
        dag,
        retained_features,
    };
    BayesNet::new("random", variables, structure, cpts).unwrap()
}

/// P(class | rest) by evaluating the full joint from raw table entries and
/// normalizing over the class values.
pub fn enumerated_posterior(net: &BayesNet, instance: &[usize]) -> Vec<f64> {
    let class = net.class();
    let k = net.variable(class).cardinality();
    let joint: Vec<f64> = (0..k)
        .map(|c| {
            let mut x = instance.to_vec();
            x[class] = c;
            (0..net.n_variables())
                .map(|v| {
                    let cpt = net.cpt(v);
                    let mut row = 0;
                    for (&p, &card) in cpt.parents.iter().zip(&cpt.parent_cards) {
                        row = row * card + x[p];
                    }
                    cpt.row(row)[x[v]]
                })
                .product()
        })
        .collect();
    let total: f64 = joint.iter().sum();
    joint.into_iter().map(|p| p / total).collect()
}

/// Every complete assignment of a network's variables.
pub fn all_assignments(cards: &[usize]) -> Vec<Vec<usize>> {
    let mut out = vec![vec![]];
    for &k in cards {
        out = out
            .into_iter()
            .flat_map(|prefix: Vec<usize>| {
                (0..k).map(move |v| {
                    let mut next = prefix.clone();
                    next.push(v);
                    next
                })
            })
            .collect();
    }
    out
}

/// Network over explicit parent lists (all binary, names `x0..`), class given.
pub fn binary_net(parents: &[Vec<usize>], tables: &[Vec<f64>], class: usize) -> BayesNet {
    let n = parents.len();
    let mut order: Vec<usize> = Vec::with_capacity(n);
    while order.len() < n {
        for v in 0..n {
            if !order.contains(&v) && parents[v].iter().all(|p| order.contains(p)) {
                order.push(v);
            }
        }
    }
    let mut dag = Dag::empty(NodeOrdering::new(order).unwrap());
    for (v, ps) in parents.iter().enumerate() {
        for &p in ps {
            dag.add_arc(p, v).unwrap();
        }
    }
    let variables: Vec<Variable> = (0..n).map(|v| Variable::new(format!("x{v}"), vec!["0".into(), "1".into()])).collect();
    let cpts: Vec<Cpt> = (0..n)
        .map(|v| Cpt::new(v, 2, parents[v].clone(), vec![2; parents[v].len()], tables[v].clone()).unwrap())
        .collect();
    let retained_features = dag.markov_blanket(class).unwrap();
    let structure = LearnedStructure {
        kind: ClassifierKind::Gbn,
        class,
        dag,
        retained_features,
    };
    BayesNet::new("fixture", variables, structure, cpts).unwrap()
}

/// Bernoulli table for a binary child: `p_one[r]` is P(child = 1 | row r).
pub fn bernoulli(p_one: &[f64]) -> Vec<f64> {
    p_one.iter().flat_map(|&p| [1.0 - p, p]).collect()
}

/// Undirected skeleton as sorted pairs.
pub fn skeleton(dag: &Dag) -> Vec<(usize, usize)> {
    let mut s: Vec<(usize, usize)> = dag.arcs().iter().map(|&(a, b)| (a.min(b), a.max(b))).collect();
    s.sort_unstable();
    s
}

pub fn count_by<K: Ord>(items: impl IntoIterator<Item = K>) -> BTreeMap<K, usize> {
    let mut m = BTreeMap::new();
    for k in items {
        *m.entry(k).or_insert(0) += 1;
    }
    m
}

/// Random categorical data; each column copies an earlier one with some
/// probability so that scores are not all near zero. The class is last.
pub fn random_dataset<R: Rng>(rng: &mut R, n_features: usize, n_cases: usize, max_card: usize) -> Dataset {
    let n = n_features + 1;
    let cards: Vec<usize> = (0..n).map(|_| rng.gen_range(2..=max_card)).collect();
    let source: Vec<Option<(usize, f64)>> = (0..n)
        .map(|v| (v > 0 && rng.gen_bool(0.6)).then(|| (rng.gen_range(0..v), rng.gen_range(0.3..0.95))))
        .collect();
    let rows: Vec<Vec<u32>> = (0..n_cases)
        .map(|_| {
            let mut row: Vec<u32> = Vec::with_capacity(n);
            for v in 0..n {
                let value = match source[v] {
                    Some((s, p)) if rng.gen_bool(p) => row[s] as usize % cards[v],
                    _ => rng.gen_range(0..cards[v]),
                };
                row.push(value as u32);
            }
            row
        })
        .collect();
    let names: Vec<String> = (0..n).map(|v| if v == n - 1 { "class".into() } else { format!("f{v}") }).collect();
    let names: Vec<&str> = names.iter().map(String::as_str).collect();
    Dataset::from_codes(&names, &cards, n - 1, &rows).unwrap()
}

/// Sorted-sum weight of the learned tree and of the best spanning tree found
/// by enumerating every edge subset of size n-1; returns their difference
/// and the learned tree's shortfall in edges.
pub fn tree_weight_gap(ds: &Dataset) -> (f64, f64) {
    let features = ds.feature_indices();
    let class = ds.class_index();
    let score = |i: usize, j: usize| conditional_mutual_information(ds, i, j, &[class]);
    let tree = chow_liu_tree(&features, score);
    let learned = canonical_sum(tree.iter().map(|e| e.score).collect());

    let m = features.len();
    let edges: Vec<(usize, usize, f64)> = (0..m)
        .flat_map(|a| ((a + 1)..m).map(move |b| (a, b)))
        .map(|(a, b)| (a, b, score(features[a], features[b])))
        .collect();
    let mut best = f64::NEG_INFINITY;
    for mask in 0u32..(1 << edges.len()) {
        if mask.count_ones() as usize != m - 1 {
            continue;
        }
        let chosen: Vec<&(usize, usize, f64)> = (0..edges.len()).filter(|e| mask >> e & 1 == 1).map(|e| &edges[e]).collect();
        let mut comp: Vec<usize> = (0..m).collect();
        let mut acyclic = true;
        for &&(a, b, _) in &chosen {
            let (ca, cb) = (comp[a], comp[b]);
            if ca == cb {
                acyclic = false;
                break;
            }
            comp.iter_mut().filter(|c| **c == cb).for_each(|c| *c = ca);
        }
        if acyclic {
            best = best.max(canonical_sum(chosen.iter().map(|e| e.2).collect()));
        }
    }
    ((learned - best).abs(), (m - 1 - tree.len()) as f64)
}

fn canonical_sum(mut w: Vec<f64>) -> f64 {
    w.sort_by(f64::total_cmp);
    w.iter().sum()
}
