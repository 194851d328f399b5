//! Parameter fitting and exact class-posterior inference.

mod cpt;

pub use cpt::{Cpt, Smoothing, DENSE_ROW_LIMIT};

use std::collections::{BTreeMap, BTreeSet, HashMap};

use rand::Rng;

use crate::data::{Attribute, Column, Dataset};
use crate::error::{Error, Result};
use crate::graph::{Dag, NodeOrdering};
use crate::learners::{ClassifierKind, LearnedStructure};

/// Smallest factor used in log-space products.
const FACTOR_FLOOR: f64 = 1e-300;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Variable {
    pub name: String,
    pub values: Vec<String>,
}

impl Variable {
    pub fn new(name: impl Into<String>, values: Vec<String>) -> Self {
        Variable {
            name: name.into(),
            values,
        }
    }

    pub fn cardinality(&self) -> usize {
        self.values.len()
    }
}

/// A fitted classifier network.
///
/// Node ids are local to the network (`0..n_variables()`), independent of the
/// dataset the network was fitted on; datasets are matched to it by
/// attribute name and value label through [`BayesNet::bind`].
#[derive(Debug, Clone, PartialEq)]
pub struct BayesNet {
    name: String,
    variables: Vec<Variable>,
    structure: LearnedStructure,
    cpts: Vec<Cpt>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Posterior {
    pub distribution: Vec<f64>,
}

impl Posterior {
    /// Index of the most probable class value; ties go to the lowest index.
    pub fn argmax(&self) -> usize {
        let mut best = 0;
        for (i, &p) in self.distribution.iter().enumerate() {
            if p > self.distribution[best] {
                best = i;
            }
        }
        best
    }
}

impl BayesNet {
    /// Assembles a network, checking that every CPT matches the structure.
    pub fn new(name: impl Into<String>, variables: Vec<Variable>, structure: LearnedStructure, cpts: Vec<Cpt>) -> Result<Self> {
        let n = variables.len();
        let bad = |msg: String| Err(Error::Schema(msg));
        if cpts.len() != n || structure.dag.nodes().len() != n || (0..n).any(|v| !structure.dag.contains(v)) {
            return bad("network nodes, variables and tables disagree".into());
        }
        if structure.class >= n {
            return bad("class node outside the network".into());
        }
        for (v, cpt) in cpts.iter().enumerate() {
            let expected: BTreeSet<usize> = structure.dag.parents(v).clone();
            let listed: BTreeSet<usize> = cpt.parents.iter().copied().collect();
            if cpt.node != v || listed != expected || listed.len() != cpt.parents.len() {
                return bad(format!("table of `{}` does not match its parents", variables[v].name));
            }
            let cards: Vec<usize> = cpt.parents.iter().map(|&p| variables[p].cardinality()).collect();
            if cpt.card != variables[v].cardinality() || cpt.parent_cards != cards {
                return bad(format!("table of `{}` has the wrong shape", variables[v].name));
            }
            if let Err(row) = cpt.check_rows(1e-6) {
                return bad(format!("row {row} of `{}` is not a distribution", variables[v].name));
            }
        }
        Ok(BayesNet {
            name: name.into(),
            variables,
            structure,
            cpts,
        })
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn with_name(mut self, name: impl Into<String>) -> Self {
        self.name = name.into();
        self
    }

    pub fn variables(&self) -> &[Variable] {
        &self.variables
    }

    pub fn variable(&self, v: usize) -> &Variable {
        &self.variables[v]
    }

    pub fn n_variables(&self) -> usize {
        self.variables.len()
    }

    pub fn index_of(&self, name: &str) -> Option<usize> {
        self.variables.iter().position(|v| v.name == name)
    }

    pub fn structure(&self) -> &LearnedStructure {
        &self.structure
    }

    pub fn kind(&self) -> ClassifierKind {
        self.structure.kind
    }

    pub fn dag(&self) -> &Dag {
        &self.structure.dag
    }

    pub fn class(&self) -> usize {
        self.structure.class
    }

    pub fn class_values(&self) -> &[String] {
        &self.variables[self.class()].values
    }

    pub fn cpts(&self) -> &[Cpt] {
        &self.cpts
    }

    pub fn cpt(&self, v: usize) -> &Cpt {
        &self.cpts[v]
    }

    fn check_instance(&self, instance: &[usize]) -> Result<()> {
        if instance.len() != self.n_variables() {
            return Err(Error::Schema(format!(
                "instance has {} values, network has {} variables",
                instance.len(),
                self.n_variables()
            )));
        }
        for (v, &x) in instance.iter().enumerate() {
            if v != self.class() && x >= self.variables[v].cardinality() {
                return Err(Error::ValueOutOfRange {
                    attribute: self.variables[v].name.clone(),
                    index: x,
                });
            }
        }
        Ok(())
    }

    /// Product of all factors at a full assignment.
    pub fn joint(&self, assignment: &[usize]) -> f64 {
        self.cpts.iter().map(|c| c.prob(assignment[c.node], assignment)).product()
    }

    /// Class posterior under complete evidence. `instance` holds one value per
    /// network variable; the class entry is ignored.
    pub fn posterior(&self, instance: &[usize]) -> Result<Posterior> {
        self.check_instance(instance)?;
        let class = self.class();
        let k = self.variables[class].cardinality();
        let mut x = instance.to_vec();
        let mut logs = Vec::with_capacity(k);
        let mut vetoed = 0;
        for c in 0..k {
            x[class] = c;
            let mut log = 0.0;
            let mut zero = false;
            for cpt in &self.cpts {
                let p = cpt.prob(x[cpt.node], &x);
                zero |= p == 0.0;
                log += p.max(FACTOR_FLOOR).ln();
            }
            vetoed += zero as usize;
            logs.push(log);
        }
        if vetoed == k {
            return Ok(Posterior {
                distribution: vec![1.0 / k as f64; k],
            });
        }
        let top = logs.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        let weights: Vec<f64> = logs.iter().map(|l| (l - top).exp()).collect();
        let total: f64 = weights.iter().sum();
        Ok(Posterior {
            distribution: weights.into_iter().map(|w| w / total).collect(),
        })
    }

    pub fn predict(&self, instance: &[usize]) -> Result<usize> {
        Ok(self.posterior(instance)?.argmax())
    }

    /// Matches dataset columns to network variables by name and labels by
    /// text. Every non-class variable must be present in `ds`.
    pub fn bind<'a>(&'a self, ds: &'a Dataset) -> Result<Binding<'a>> {
        ds.require_discrete()?;
        let mut columns = Vec::with_capacity(self.n_variables());
        for (v, var) in self.variables.iter().enumerate() {
            let Some(col) = ds.index_of(&var.name) else {
                if v == self.class() {
                    columns.push(None);
                    continue;
                }
                return Err(Error::Schema(format!("dataset has no column `{}`", var.name)));
            };
            let translate: Vec<Option<usize>> = ds
                .attribute(col)
                .values
                .iter()
                .map(|label| var.values.iter().position(|l| l == label))
                .collect();
            columns.push(Some((col, translate)));
        }
        Ok(Binding {
            net: self,
            ds,
            columns,
        })
    }

    /// Predicted class index for every case of `ds`.
    pub fn predict_dataset(&self, ds: &Dataset) -> Result<Vec<usize>> {
        let binding = self.bind(ds)?;
        (0..ds.n_cases()).map(|r| self.predict(&binding.instance(r)?)).collect()
    }

    /// Drops every node outside the class's Markov blanket. A kept node that
    /// loses parents gets its table averaged over the dropped parents, which
    /// leaves every class posterior unchanged. That averaging visits every
    /// row of the original table.
    pub fn pruned_to_blanket(&self) -> BayesNet {
        let class = self.class();
        let blanket = self.dag().markov_blanket(class).expect("class is a node");
        let mut keep = blanket.clone();
        keep.insert(class);
        let kept: Vec<usize> = (0..self.n_variables()).filter(|v| keep.contains(v)).collect();
        let local: HashMap<usize, usize> = kept.iter().enumerate().map(|(i, &v)| (v, i)).collect();

        let order: Vec<usize> = self.dag().nodes().iter().filter(|v| keep.contains(v)).map(|v| local[v]).collect();
        let mut dag = Dag::empty(NodeOrdering::new(order).expect("subset of an ordering"));
        for &(p, c) in self.dag().arcs() {
            if keep.contains(&p) && keep.contains(&c) {
                dag.add_arc(local[&p], local[&c]).expect("arcs of a valid dag");
            }
        }
        let cpts = kept
            .iter()
            .map(|&v| {
                let old = &self.cpts[v];
                let positions: Vec<usize> = (0..old.parents.len()).filter(|&i| keep.contains(&old.parents[i])).collect();
                let parents: Vec<usize> = positions.iter().map(|&i| local[&old.parents[i]]).collect();
                let parent_cards: Vec<usize> = positions.iter().map(|&i| old.parent_cards[i]).collect();
                if positions.len() == old.parents.len() {
                    let mut cpt = old.clone();
                    cpt.node = local[&v];
                    cpt.parents = parents;
                    return cpt;
                }
                // average over every configuration of the dropped parents
                let new_rows: usize = parent_cards.iter().product();
                let share = new_rows as f64 / old.n_rows() as f64;
                let mut rows: BTreeMap<usize, Vec<f64>> = BTreeMap::new();
                for r in 0..old.n_rows() {
                    let values = old.config_values(r);
                    let target = positions.iter().zip(&parent_cards).fold(0, |acc, (&i, &k)| acc * k + values[i]);
                    let acc = rows.entry(target).or_insert_with(|| vec![0.0; old.card]);
                    for (a, p) in acc.iter_mut().zip(old.row(r)) {
                        *a += p * share;
                    }
                }
                Cpt::from_rows(local[&v], old.card, parents, parent_cards, rows, vec![1.0 / old.card as f64; old.card])
                    .expect("shape of a valid table")
            })
            .collect();
        let structure = LearnedStructure {
            kind: self.kind(),
            class: local[&class],
            dag,
            retained_features: blanket.iter().map(|v| local[v]).collect(),
        };
        BayesNet {
            name: self.name.clone(),
            variables: kept.iter().map(|&v| self.variables[v].clone()).collect(),
            structure,
            cpts,
        }
    }

    /// Forward-samples `n` complete cases. Labels and names follow the
    /// network's variables; the class column keeps its position.
    pub fn sample<R: Rng + ?Sized>(&self, n: usize, rng: &mut R) -> Dataset {
        let order = self.dag().topological_order();
        let mut columns = vec![Vec::with_capacity(n); self.n_variables()];
        let mut x = vec![0usize; self.n_variables()];
        for _ in 0..n {
            for &v in &order {
                let cpt = &self.cpts[v];
                let row = cpt.row(cpt.config_index(cpt.parents.iter().map(|&p| x[p])));
                let u: f64 = rng.gen();
                let mut acc = 0.0;
                x[v] = row.len() - 1;
                for (value, p) in row.iter().enumerate() {
                    acc += p;
                    if u < acc {
                        x[v] = value;
                        break;
                    }
                }
            }
            for (col, &value) in columns.iter_mut().zip(&x) {
                col.push(value as u32);
            }
        }
        let schema = self
            .variables
            .iter()
            .map(|v| Attribute::categorical(v.name.clone(), v.values.clone()))
            .collect();
        Dataset::new(schema, self.class(), columns.into_iter().map(Column::Categorical).collect())
            .expect("sampled codes are in range")
    }
}

/// A dataset viewed through a network's variables.
pub struct Binding<'a> {
    net: &'a BayesNet,
    ds: &'a Dataset,
    columns: Vec<Option<(usize, Vec<Option<usize>>)>>,
}

impl Binding<'_> {
    /// Network-indexed instance for row `r`. The class entry is the case's
    /// class when known to the network, 0 otherwise.
    pub fn instance(&self, r: usize) -> Result<Vec<usize>> {
        let class = self.net.class();
        self.columns
            .iter()
            .enumerate()
            .map(|(v, slot)| match slot {
                None => Ok(0),
                Some((col, translate)) => {
                    let code = self.ds.value(r, *col) as usize;
                    match translate[code] {
                        Some(x) => Ok(x),
                        None if v == class => Ok(0),
                        None => Err(Error::UnknownValue {
                            attribute: self.net.variables[v].name.clone(),
                            value: self.ds.attribute(*col).values[code].clone(),
                        }),
                    }
                }
            })
            .collect()
    }

    /// Network class index of row `r`'s true label, if the network knows it.
    pub fn class_value(&self, r: usize) -> Option<usize> {
        let (col, translate) = self.columns[self.net.class()].as_ref()?;
        translate[self.ds.value(r, *col) as usize]
    }
}

/// Estimates one table per node of `s` from `ds`.
///
/// The network keeps only the nodes of `s.dag`; its local ids follow their
/// rank in the structure's ordering, so the class (rank 0) becomes node 0.
pub fn fit_cpts(s: &LearnedStructure, ds: &Dataset, smoothing: Smoothing) -> Result<BayesNet> {
    ds.require_discrete()?;
    let nodes = s.dag.nodes().to_vec();
    for &v in &nodes {
        if v >= ds.n_attributes() {
            return Err(Error::UnknownNode(v));
        }
    }
    let local: HashMap<usize, usize> = nodes.iter().enumerate().map(|(i, &v)| (v, i)).collect();
    let variables: Vec<Variable> = nodes
        .iter()
        .map(|&v| Variable::new(ds.attribute(v).name.clone(), ds.attribute(v).values.clone()))
        .collect();

    let mut dag = Dag::empty(NodeOrdering::new((0..nodes.len()).collect())?);
    for &(p, c) in s.dag.arcs() {
        dag.add_arc(local[&p], local[&c])?;
    }

    let cpts = nodes
        .iter()
        .map(|&v| {
            let parents = s.dag.parents_ranked(v);
            let parent_cards: Vec<usize> = parents.iter().map(|&p| ds.cardinality(p)).collect();
            if parent_cards.iter().try_fold(1usize, |acc, &k| acc.checked_mul(k)).is_none() {
                return Err(Error::Schema(format!("`{}` has too many parent configurations", ds.attribute(v).name)));
            }
            let own = ds.codes(v);
            let parent_codes: Vec<&[u32]> = parents.iter().map(|&p| ds.codes(p)).collect();
            let config = |r: usize| parent_codes.iter().zip(&parent_cards).fold(0, |acc, (codes, &k)| acc * k + codes[r] as usize);
            let observations = (0..ds.n_cases()).map(|r| (config(r), own[r] as usize));
            Cpt::from_counts(
                local[&v],
                ds.cardinality(v),
                parents.iter().map(|p| local[p]).collect(),
                parent_cards.clone(),
                observations,
                smoothing,
            )
        })
        .collect::<Result<Vec<_>>>()?;

    let structure = LearnedStructure {
        kind: s.kind,
        class: local[&s.class],
        dag,
        retained_features: s.retained_features.iter().filter_map(|v| local.get(v).copied()).collect(),
    };
    BayesNet::new("classifier", variables, structure, cpts)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::learners::{learn_naive_bayes, learn_tan};

    fn nb_structure(n_features: usize) -> LearnedStructure {
        let mut dag = Dag::empty(NodeOrdering::new((0..=n_features).collect()).unwrap());
        for f in 1..=n_features {
            dag.add_arc(0, f).unwrap();
        }
        LearnedStructure {
            kind: ClassifierKind::NaiveBayes,
            class: 0,
            dag,
            retained_features: (1..=n_features).collect(),
        }
    }

    fn binary(name: &str) -> Variable {
        Variable::new(name, vec!["0".into(), "1".into()])
    }

    #[test]
    fn frequencies_and_smoothing() {
        // feature value counts (3, 1) under class 0
        let rows = vec![vec![0, 0], vec![0, 0], vec![0, 0], vec![0, 1], vec![1, 0]];
        let ds = Dataset::from_codes(&["f", "c"], &[2, 2], 1, &rows).unwrap();
        let s = learn_naive_bayes(&ds).unwrap();
        let mle = fit_cpts(&s, &ds, Smoothing::None).unwrap();
        let f = mle.index_of("f").unwrap();
        assert_eq!(mle.cpt(f).row(0), &[0.75, 0.25]);
        let lap = fit_cpts(&s, &ds, Smoothing::Laplace(1.0)).unwrap();
        assert_eq!(lap.cpt(f).row(0), &[4.0 / 6.0, 2.0 / 6.0]);
    }

    #[test]
    fn unseen_configuration_is_uniform() {
        let rows = vec![vec![0, 0], vec![1, 0]];
        let ds = Dataset::from_codes(&["f", "c"], &[2, 2], 1, &rows).unwrap();
        let s = learn_naive_bayes(&ds).unwrap();
        let net = fit_cpts(&s, &ds, Smoothing::None).unwrap();
        let f = net.index_of("f").unwrap();
        assert_eq!(net.cpt(f).row(1), &[0.5, 0.5]);
        assert_eq!(net.class(), 0);
    }

    #[test]
    fn bayes_rule_example() {
        let class = Cpt::new(0, 2, vec![], vec![], vec![0.5, 0.5]).unwrap();
        let feature = Cpt::new(1, 2, vec![0], vec![2], vec![0.8, 0.2, 0.2, 0.8]).unwrap();
        let net = BayesNet::new("t", vec![binary("c"), binary("f")], nb_structure(1), vec![class, feature]).unwrap();
        let post = net.posterior(&[0, 1]).unwrap();
        assert!((post.distribution[1] - 0.8).abs() < 1e-12);
        assert_eq!(net.predict(&[0, 1]).unwrap(), 1);
        assert_eq!(net.predict(&[0, 0]).unwrap(), 0);
    }

    #[test]
    fn ties_go_to_first_class() {
        let class = Cpt::new(0, 3, vec![], vec![], vec![0.25, 0.375, 0.375]).unwrap();
        let feature = Cpt::new(1, 2, vec![0], vec![3], vec![0.5, 0.5, 0.5, 0.5, 0.5, 0.5]).unwrap();
        let net = BayesNet::new("t", vec![Variable::new("c", vec!["a".into(), "b".into(), "d".into()]), binary("f")], nb_structure(1), vec![class, feature]).unwrap();
        assert_eq!(net.predict(&[0, 0]).unwrap(), 1);
    }

    #[test]
    fn all_vetoed_gives_uniform() {
        let class = Cpt::new(0, 2, vec![], vec![], vec![0.5, 0.5]).unwrap();
        let feature = Cpt::new(1, 2, vec![0], vec![2], vec![1.0, 0.0, 1.0, 0.0]).unwrap();
        let net = BayesNet::new("t", vec![binary("c"), binary("f")], nb_structure(1), vec![class, feature]).unwrap();
        assert_eq!(net.posterior(&[0, 1]).unwrap().distribution, vec![0.5, 0.5]);
    }

    #[test]
    fn rejects_bad_instances_and_tables() {
        let class = Cpt::new(0, 2, vec![], vec![], vec![0.5, 0.5]).unwrap();
        let feature = Cpt::new(1, 2, vec![0], vec![2], vec![0.8, 0.2, 0.2, 0.8]).unwrap();
        let net = BayesNet::new("t", vec![binary("c"), binary("f")], nb_structure(1), vec![class.clone(), feature]).unwrap();
        assert!(matches!(net.posterior(&[0, 2]), Err(Error::ValueOutOfRange { .. })));
        assert!(net.posterior(&[0]).is_err());

        let skewed = Cpt::new(1, 2, vec![0], vec![2], vec![0.8, 0.3, 0.2, 0.8]).unwrap();
        assert!(BayesNet::new("t", vec![binary("c"), binary("f")], nb_structure(1), vec![class.clone(), skewed]).is_err());
        let orphan = Cpt::new(1, 2, vec![], vec![], vec![0.5, 0.5]).unwrap();
        assert!(BayesNet::new("t", vec![binary("c"), binary("f")], nb_structure(1), vec![class, orphan]).is_err());
    }

    #[test]
    fn xor_tan_classifies_all_rows() {
        let rows: Vec<Vec<u32>> = [(0, 0), (0, 1), (1, 0), (1, 1)].iter().map(|&(a, b)| vec![a, b, a ^ b]).collect();
        let ds = Dataset::from_codes(&["x1", "x2", "c"], &[2, 2, 2], 2, &rows).unwrap();
        let tan = fit_cpts(&learn_tan(&ds).unwrap(), &ds, Smoothing::None).unwrap();
        assert_eq!(tan.predict_dataset(&ds).unwrap(), vec![0, 1, 1, 0]);
        let binding = tan.bind(&ds).unwrap();
        let x = binding.instance(3).unwrap();
        assert_eq!(tan.predict(&x).unwrap(), 0);

        let nb = fit_cpts(&learn_naive_bayes(&ds).unwrap(), &ds, Smoothing::None).unwrap();
        let hits = nb.predict_dataset(&ds).unwrap().iter().zip([0, 1, 1, 0]).filter(|(p, t)| **p == *t).count();
        assert!(hits <= 2);
    }

    #[test]
    fn binding_by_label() {
        let rows = vec![vec![0, 0], vec![1, 1], vec![1, 1]];
        let train = Dataset::from_codes(&["f", "c"], &[2, 2], 1, &rows).unwrap();
        let net = fit_cpts(&learn_naive_bayes(&train).unwrap(), &train, Smoothing::default()).unwrap();
        let test = Dataset::from_codes(&["c", "f"], &[2, 3], 0, &[vec![1, 1], vec![0, 2]]).unwrap();
        let binding = net.bind(&test).unwrap();
        assert_eq!(binding.instance(0).unwrap(), vec![1, 1]);
        assert_eq!(binding.class_value(0), Some(1));
        assert!(matches!(binding.instance(1), Err(Error::UnknownValue { .. })));
    }

    #[test]
    fn pruning_keeps_posterior() {
        // c -> a, b -> a, d -> b, e isolated from c
        let vars: Vec<Variable> = ["c", "a", "b", "d", "e"].iter().map(|n| binary(n)).collect();
        let mut dag = Dag::empty(NodeOrdering::new(vec![0, 3, 2, 1, 4]).unwrap());
        dag.add_arc(0, 1).unwrap();
        dag.add_arc(2, 1).unwrap();
        dag.add_arc(3, 2).unwrap();
        dag.add_arc(3, 4).unwrap();
        let structure = LearnedStructure {
            kind: ClassifierKind::Gbn,
            class: 0,
            dag,
            retained_features: BTreeSet::from([1, 2, 3, 4]),
        };
        let cpts = vec![
            Cpt::new(0, 2, vec![], vec![], vec![0.3, 0.7]).unwrap(),
            Cpt::new(1, 2, vec![0, 2], vec![2, 2], vec![0.9, 0.1, 0.4, 0.6, 0.2, 0.8, 0.35, 0.65]).unwrap(),
            Cpt::new(2, 2, vec![3], vec![2], vec![0.6, 0.4, 0.1, 0.9]).unwrap(),
            Cpt::new(3, 2, vec![], vec![], vec![0.45, 0.55]).unwrap(),
            Cpt::new(4, 2, vec![3], vec![2], vec![0.7, 0.3, 0.2, 0.8]).unwrap(),
        ];
        let net = BayesNet::new("p", vars, structure, cpts).unwrap();
        let pruned = net.pruned_to_blanket();
        assert_eq!(pruned.n_variables(), 3);
        for bits in 0..16usize {
            let x: Vec<usize> = (0..5).map(|i| if i == 0 { 0 } else { (bits >> (i - 1)) & 1 }).collect();
            let full = net.posterior(&x).unwrap();
            let y: Vec<usize> = (0..5).filter(|&v| v == 0 || v == 1 || v == 2).map(|v| x[v]).collect();
            let small = pruned.posterior(&y).unwrap();
            for (p, q) in full.distribution.iter().zip(&small.distribution) {
                assert!((p - q).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn sampling_matches_tables() {
        use rand::SeedableRng;
        let class = Cpt::new(0, 2, vec![], vec![], vec![0.2, 0.8]).unwrap();
        let feature = Cpt::new(1, 2, vec![0], vec![2], vec![0.9, 0.1, 0.3, 0.7]).unwrap();
        let net = BayesNet::new("t", vec![binary("c"), binary("f")], nb_structure(1), vec![class, feature]).unwrap();
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(7);
        let ds = net.sample(20_000, &mut rng);
        let refit = fit_cpts(&learn_naive_bayes(&ds).unwrap(), &ds, Smoothing::None).unwrap();
        assert!((refit.cpt(0).row(0)[1] - 0.8).abs() < 0.02);
        assert!((refit.cpt(1).row(1)[1] - 0.7).abs() < 0.02);
    }
}
