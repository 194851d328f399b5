use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use super::Dataset;
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum SplitSpec {
    Holdout { train_fraction: f64, seed: u64 },
    CrossValidation { k: usize, seed: u64 },
}

fn shuffled(n: usize, seed: u64) -> Vec<usize> {
    let mut order: Vec<usize> = (0..n).collect();
    order.shuffle(&mut ChaCha8Rng::seed_from_u64(seed));
    order
}

/// Size of the training part: the ceiling of `fraction * n`, clamped so that
/// both parts are non-empty.
pub(crate) fn holdout_train_size(n: usize, fraction: f64) -> usize {
    // the small slack keeps exact ratios like 2130/3196 from rounding up
    let size = (fraction * n as f64 - 1e-9).ceil() as usize;
    size.clamp(1, n - 1)
}

/// Seeded shuffle followed by a cut into `ceil(f * n)` training cases and the
/// remainder.
pub fn split_holdout(ds: &Dataset, train_fraction: f64, seed: u64) -> Result<(Dataset, Dataset)> {
    if !(train_fraction > 0.0 && train_fraction < 1.0) {
        return Err(Error::InvalidSplit(format!("train fraction {train_fraction} not in (0, 1)")));
    }
    let n = ds.n_cases();
    if n < 2 {
        return Err(Error::InvalidSplit(format!("need at least 2 cases, have {n}")));
    }
    let order = shuffled(n, seed);
    let cut = holdout_train_size(n, train_fraction);
    Ok((ds.subset(&order[..cut]), ds.subset(&order[cut..])))
}

/// Row indices of each test fold. Fold sizes differ by at most one; the
/// first `n mod k` folds take the extra case.
pub(crate) fn fold_indices(n: usize, k: usize, seed: u64) -> Result<Vec<Vec<usize>>> {
    if k < 2 {
        return Err(Error::InvalidSplit(format!("k = {k}; cross validation needs k >= 2")));
    }
    if k > n {
        return Err(Error::InvalidSplit(format!("k = {k} exceeds the {n} available cases")));
    }
    let order = shuffled(n, seed);
    let (base, extra) = (n / k, n % k);
    let mut folds = Vec::with_capacity(k);
    let mut start = 0;
    for f in 0..k {
        let len = base + usize::from(f < extra);
        folds.push(order[start..start + len].to_vec());
        start += len;
    }
    Ok(folds)
}

pub fn cv_folds(ds: &Dataset, k: usize, seed: u64) -> Result<Vec<(Dataset, Dataset)>> {
    let folds = fold_indices(ds.n_cases(), k, seed)?;
    Ok((0..k)
        .map(|f| {
            let train: Vec<usize> = folds
                .iter()
                .enumerate()
                .filter(|&(g, _)| g != f)
                .flat_map(|(_, rows)| rows.iter().copied())
                .collect();
            (ds.subset(&train), ds.subset(&folds[f]))
        })
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    /// Dataset whose first column records the original row number.
    fn numbered(n: usize) -> Dataset {
        let rows: Vec<Vec<u32>> = (0..n).map(|i| vec![i as u32, (i % 2) as u32]).collect();
        Dataset::from_codes(&["id", "c"], &[n.max(1), 2], 1, &rows).unwrap()
    }

    fn ids(ds: &Dataset) -> Vec<u32> {
        ds.codes(0).to_vec()
    }

    #[test]
    fn nine_cases_two_thirds() {
        let (a, b) = split_holdout(&numbered(9), 2.0 / 3.0, 1).unwrap();
        assert_eq!((a.n_cases(), b.n_cases()), (6, 3));
    }

    #[test]
    fn adult_sized_split() {
        assert_eq!(holdout_train_size(32561, 2.0 / 3.0), 21708);
        assert_eq!(32561 - holdout_train_size(32561, 2.0 / 3.0), 10853);
        assert_eq!(holdout_train_size(8124, 2.0 / 3.0), 5416);
        assert_eq!(holdout_train_size(3196, 2130.0 / 3196.0), 2130);
    }

    #[test]
    fn same_seed_same_partition() {
        let ds = numbered(50);
        let (a1, b1) = split_holdout(&ds, 0.6, 42).unwrap();
        let (a2, b2) = split_holdout(&ds, 0.6, 42).unwrap();
        assert_eq!(ids(&a1), ids(&a2));
        assert_eq!(ids(&b1), ids(&b2));
        let (a3, _) = split_holdout(&ds, 0.6, 43).unwrap();
        assert_ne!(ids(&a1), ids(&a3));
    }

    #[test]
    fn holdout_errors() {
        assert!(split_holdout(&numbered(1), 0.5, 0).is_err());
        assert!(split_holdout(&numbered(10), 1.0, 0).is_err());
        assert!(split_holdout(&numbered(10), 0.0, 0).is_err());
    }

    #[test]
    fn vote_sized_folds() {
        let folds = cv_folds(&numbered(435), 5, 7).unwrap();
        assert!(folds.iter().all(|(tr, te)| te.n_cases() == 87 && tr.n_cases() == 348));
    }

    #[test]
    fn remainder_goes_to_first_folds() {
        let folds = cv_folds(&numbered(5), 2, 0).unwrap();
        let sizes: Vec<usize> = folds.iter().map(|(_, t)| t.n_cases()).collect();
        assert_eq!(sizes, vec![3, 2]);
    }

    #[test]
    fn fold_errors() {
        assert!(cv_folds(&numbered(5), 1, 0).is_err());
        assert!(cv_folds(&numbered(5), 6, 0).is_err());
    }

    proptest! {
        #[test]
        fn splits_are_partitions(n in 2usize..120, f in 0.05f64..0.95, k in 2usize..8, seed in any::<u64>()) {
            let ds = numbered(n);
            let (a, b) = split_holdout(&ds, f, seed).unwrap();
            let mut all: Vec<u32> = ids(&a).into_iter().chain(ids(&b)).collect();
            all.sort_unstable();
            prop_assert_eq!(all, (0..n as u32).collect::<Vec<_>>());

            if k <= n {
                let folds = cv_folds(&ds, k, seed).unwrap();
                let mut tests: Vec<u32> = folds.iter().flat_map(|(_, t)| ids(t)).collect();
                tests.sort_unstable();
                prop_assert_eq!(tests, (0..n as u32).collect::<Vec<_>>());
                let sizes: Vec<usize> = folds.iter().map(|(_, t)| t.n_cases()).collect();
                prop_assert!(sizes.iter().max().unwrap() - sizes.iter().min().unwrap() <= 1);
                for (train, test) in &folds {
                    let mut both: Vec<u32> = ids(train).into_iter().chain(ids(test)).collect();
                    both.sort_unstable();
                    prop_assert_eq!(both, (0..n as u32).collect::<Vec<_>>());
                }
            }
        }
    }
}
