//! Plug-in estimates of entropy, mutual information and conditional mutual
//! information (all in bits), and the thresholded dependence test used by
//! the structure learners.

use std::collections::HashMap;
use std::sync::atomic::{AtomicUsize, Ordering};
use std::sync::RwLock;

use serde::{Deserialize, Serialize};

use crate::data::Dataset;
use crate::error::{Error, Result};

/// Minimum (conditional) mutual information, in bits, for two nodes to be
/// considered dependent.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd, Serialize, Deserialize)]
pub struct MiThreshold(f64);

impl MiThreshold {
    pub const DEFAULT_BITS: f64 = 0.01;

    pub fn new(epsilon: f64) -> Result<Self> {
        if epsilon.is_nan() || epsilon < 0.0 {
            return Err(Error::Config(format!("threshold {epsilon} must be a nonnegative number")));
        }
        Ok(MiThreshold(epsilon))
    }

    /// A threshold no finite score exceeds.
    pub fn infinite() -> Self {
        MiThreshold(f64::INFINITY)
    }

    pub fn epsilon(self) -> f64 {
        self.0
    }
}

impl Default for MiThreshold {
    fn default() -> Self {
        MiThreshold(Self::DEFAULT_BITS)
    }
}

impl std::fmt::Display for MiThreshold {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{}", self.0)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PairScore {
    pub i: usize,
    pub j: usize,
    pub score: f64,
}

pub fn entropy(ds: &Dataset, i: usize) -> f64 {
    let n = ds.n_cases();
    if n == 0 {
        return 0.0;
    }
    let mut counts = vec![0usize; ds.cardinality(i)];
    for &v in ds.codes(i) {
        counts[v as usize] += 1;
    }
    let n = n as f64;
    counts
        .iter()
        .filter(|&&c| c > 0)
        .map(|&c| {
            let p = c as f64 / n;
            -p * p.log2()
        })
        .sum()
}

pub fn mutual_information(ds: &Dataset, i: usize, j: usize) -> f64 {
    conditional_mutual_information(ds, i, j, &[])
}

/// I(i; j | z) from empirical frequencies. Empty strata contribute nothing;
/// there is no smoothing.
pub fn conditional_mutual_information(ds: &Dataset, i: usize, j: usize, z: &[usize]) -> f64 {
    let n = ds.n_cases();
    if n == 0 {
        return 0.0;
    }
    let (stratum, n_strata) = strata(ds, z);
    let xs = ds.codes(i);
    let ys = ds.codes(j);
    let (kx, ky) = (ds.cardinality(i), ds.cardinality(j));

    let mut n_z = vec![0u32; n_strata];
    let mut n_xz = vec![0u32; n_strata * kx];
    let mut n_yz = vec![0u32; n_strata * ky];
    let mut keys: Vec<u64> = Vec::with_capacity(n);
    for r in 0..n {
        let (s, x, y) = (stratum[r] as usize, xs[r] as usize, ys[r] as usize);
        n_z[s] += 1;
        n_xz[s * kx + x] += 1;
        n_yz[s * ky + y] += 1;
        keys.push(((s * kx + x) * ky + y) as u64);
    }
    keys.sort_unstable();

    let total = n as f64;
    let mut sum = 0.0;
    let mut start = 0;
    while start < keys.len() {
        let key = keys[start];
        let mut end = start + 1;
        while end < keys.len() && keys[end] == key {
            end += 1;
        }
        let count = (end - start) as f64;
        let key = key as usize;
        let y = key % ky;
        let sx = key / ky;
        let (s, x) = (sx / kx, sx % kx);
        let ratio = count * f64::from(n_z[s]) / (f64::from(n_xz[s * kx + x]) * f64::from(n_yz[s * ky + y]));
        sum += count / total * ratio.log2();
        start = end;
    }
    sum.max(0.0)
}

/// Dense stratum id per row for the joint configuration of `z`.
fn strata(ds: &Dataset, z: &[usize]) -> (Vec<u32>, usize) {
    let n = ds.n_cases();
    let Some((&first, rest)) = z.split_first() else {
        return (vec![0; n], 1);
    };
    let mut ids: Vec<u32> = ds.codes(first).to_vec();
    let mut count = ds.cardinality(first);
    for &v in rest {
        let card = ds.cardinality(v);
        let codes = ds.codes(v);
        let span = count * card;
        if span <= 4 * n + 64 {
            let mut remap = vec![u32::MAX; span];
            let mut next = 0u32;
            for (id, &c) in ids.iter_mut().zip(codes) {
                let slot = &mut remap[*id as usize * card + c as usize];
                if *slot == u32::MAX {
                    *slot = next;
                    next += 1;
                }
                *id = *slot;
            }
            count = next as usize;
        } else {
            let mut remap: HashMap<u64, u32> = HashMap::with_capacity(n);
            for (id, &c) in ids.iter_mut().zip(codes) {
                let key = u64::from(*id) * card as u64 + u64::from(c);
                let next = remap.len() as u32;
                *id = *remap.entry(key).or_insert(next);
            }
            count = remap.len();
        }
    }
    (ids, count.max(1))
}

pub fn is_dependent(ds: &Dataset, i: usize, j: usize, z: &[usize], t: MiThreshold) -> bool {
    conditional_mutual_information(ds, i, j, z) > t.epsilon()
}

/// Source of conditional mutual information scores over one dataset.
///
/// Learners go through this trait so that a memoizing implementation can be
/// shared between runs without changing any result.
pub trait CmiSource: Sync {
    fn dataset(&self) -> &Dataset;
    fn cmi(&self, i: usize, j: usize, z: &[usize]) -> f64;
    /// Number of score computations actually performed.
    fn evaluations(&self) -> usize;
}

/// Computes every query from scratch.
pub struct DirectCmi<'a> {
    ds: &'a Dataset,
    evaluations: AtomicUsize,
}

impl<'a> DirectCmi<'a> {
    pub fn new(ds: &'a Dataset) -> Self {
        DirectCmi {
            ds,
            evaluations: AtomicUsize::new(0),
        }
    }
}

impl CmiSource for DirectCmi<'_> {
    fn dataset(&self) -> &Dataset {
        self.ds
    }

    fn cmi(&self, i: usize, j: usize, z: &[usize]) -> f64 {
        self.evaluations.fetch_add(1, Ordering::Relaxed);
        conditional_mutual_information(self.ds, i, j, z)
    }

    fn evaluations(&self) -> usize {
        self.evaluations.load(Ordering::Relaxed)
    }
}

type QueryKey = (usize, usize, Vec<usize>);

/// Memoizes scores by canonical `(min(i,j), max(i,j), sorted z)` signature.
/// Concurrent readers, one writer per insert.
pub struct CmiCache<'a> {
    ds: &'a Dataset,
    scores: RwLock<HashMap<QueryKey, f64>>,
    lookups: AtomicUsize,
}

impl<'a> CmiCache<'a> {
    pub fn new(ds: &'a Dataset) -> Self {
        CmiCache {
            ds,
            scores: RwLock::new(HashMap::new()),
            lookups: AtomicUsize::new(0),
        }
    }

    /// Total queries answered, hits included.
    pub fn lookups(&self) -> usize {
        self.lookups.load(Ordering::Relaxed)
    }

    fn key(i: usize, j: usize, z: &[usize]) -> QueryKey {
        let mut z = z.to_vec();
        z.sort_unstable();
        (i.min(j), i.max(j), z)
    }
}

impl CmiSource for CmiCache<'_> {
    fn dataset(&self) -> &Dataset {
        self.ds
    }

    fn cmi(&self, i: usize, j: usize, z: &[usize]) -> f64 {
        self.lookups.fetch_add(1, Ordering::Relaxed);
        let key = Self::key(i, j, z);
        if let Some(&v) = self.scores.read().expect("cache lock poisoned").get(&key) {
            return v;
        }
        // computed in canonical orientation so a hit and a miss agree bit for bit
        let v = conditional_mutual_information(self.ds, key.0, key.1, &key.2);
        *self
            .scores
            .write()
            .expect("cache lock poisoned")
            .entry(key)
            .or_insert(v)
    }

    fn evaluations(&self) -> usize {
        self.scores.read().expect("cache lock poisoned").len()
    }
}
