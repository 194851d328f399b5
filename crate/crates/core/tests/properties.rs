mod common;

use bnc::bif::{export_bif, parse_bif};
use bnc::data::cv_folds;
use bnc::graph::NodeOrdering;
use bnc::infotheory::{
    conditional_mutual_information, entropy, mutual_information, CmiCache, CmiSource, DirectCmi, MiThreshold,
};
use bnc::learners::{cbl1, learn_with, ClassifierKind, LearnerConfig};
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use common::*;

fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn information_inequalities(seed in any::<u64>(), nf in 2usize..5, n in 20usize..150) {
        let ds = random_dataset(&mut rng(seed), nf, n, 4);
        let a = ds.n_attributes();
        for i in 0..a {
            let h = entropy(&ds, i);
            prop_assert!(h >= 0.0);
            prop_assert!((mutual_information(&ds, i, i) - h).abs() < 1e-9);
            for j in 0..a {
                let mi = mutual_information(&ds, i, j);
                prop_assert!(mi >= 0.0);
                prop_assert!((mi - mutual_information(&ds, j, i)).abs() < 1e-12);
                prop_assert!(mi <= h.min(entropy(&ds, j)) + 1e-9);
                prop_assert!((conditional_mutual_information(&ds, i, j, &[]) - mi).abs() < 1e-12);
                for k in 0..a {
                    if k != i && k != j {
                        let c = conditional_mutual_information(&ds, i, j, &[k]);
                        prop_assert!(c >= 0.0);
                        prop_assert!((c - conditional_mutual_information(&ds, j, i, &[k])).abs() < 1e-12);
                    }
                }
            }
        }
    }

    #[test]
    fn cache_is_transparent(seed in any::<u64>(), nf in 2usize..6, eps in 0.001f64..0.1) {
        let ds = random_dataset(&mut rng(seed), nf, 200, 3);
        let cache = CmiCache::new(&ds);
        for kind in ClassifierKind::ALL {
            let cfg = LearnerConfig::new(kind, kind.uses_threshold().then(|| MiThreshold::new(eps).unwrap())).unwrap();
            let direct = learn_with(&DirectCmi::new(&ds), &cfg).unwrap();
            prop_assert_eq!(&learn_with(&cache, &cfg).unwrap(), &direct);
            prop_assert_eq!(&learn_with(&cache, &cfg).unwrap(), &direct);
        }
        prop_assert!(cache.evaluations() <= cache.lookups());
    }

    #[test]
    fn draft_counts_and_monotonicity(seed in any::<u64>(), nf in 2usize..7, lo in 0.001f64..0.05, gap in 0.0f64..0.1) {
        let ds = random_dataset(&mut rng(seed), nf, 150, 3);
        let ordering = NodeOrdering::for_classifier(&ds);
        let n = ordering.len();
        let source = CmiCache::new(&ds);
        let low = cbl1(&source, &ordering, MiThreshold::new(lo).unwrap(), None);
        let high = cbl1(&source, &ordering, MiThreshold::new(lo + gap).unwrap(), None);
        prop_assert_eq!(low.stats.draft_tests, n * (n - 1) / 2);
        prop_assert_eq!(high.stats.draft_tests, n * (n - 1) / 2);
        for arc in &high.draft_arcs {
            prop_assert!(low.draft_arcs.contains(arc), "{:?} drafted only at the higher threshold", arc);
        }
        for &(p, c) in low.dag.arcs() {
            prop_assert!(ordering.rank(p) < ordering.rank(c));
        }
    }

    #[test]
    fn tan_is_a_spanning_tree_under_the_class(seed in any::<u64>(), nf in 1usize..7) {
        let ds = random_dataset(&mut rng(seed), nf, 120, 3);
        let s = learn_with(&DirectCmi::new(&ds), &LearnerConfig::with_defaults(ClassifierKind::Tan)).unwrap();
        let class = ds.class_index();
        prop_assert_eq!(s.feature_arcs().len(), nf - 1);
        for f in ds.feature_indices() {
            prop_assert!(s.dag.parents(f).contains(&class));
            prop_assert!(s.dag.parents(f).len() <= 2);
        }
        prop_assert!(s.dag.parents(class).is_empty());
    }

    #[test]
    fn chow_liu_matches_brute_force(seed in any::<u64>(), nf in 2usize..6) {
        let ds = random_dataset(&mut rng(seed), nf, 80, 4);
        prop_assert_eq!(tree_weight_gap(&ds), (0.0, 0.0));
    }

    #[test]
    fn posterior_matches_enumeration(seed in any::<u64>(), n in 1usize..7) {
        let mut r = rng(seed);
        let net = random_net(&mut r, n, 3, 0.5);
        let cards: Vec<usize> = net.variables().iter().map(|v| v.cardinality()).collect();
        for x in all_assignments(&cards) {
            let post = net.posterior(&x).unwrap();
            let oracle = enumerated_posterior(&net, &x);
            prop_assert!((post.distribution.iter().sum::<f64>() - 1.0).abs() < 1e-12);
            for (a, b) in post.distribution.iter().zip(&oracle) {
                prop_assert!((a - b).abs() < 1e-9);
            }
            let top = post.distribution.iter().copied().fold(f64::MIN, f64::max);
            let predicted = net.predict(&x).unwrap();
            prop_assert_eq!(post.distribution[predicted], top);
            prop_assert!(post.distribution[..predicted].iter().all(|&p| p < top));
        }
    }

    #[test]
    fn pruning_never_moves_a_posterior(seed in any::<u64>(), n in 2usize..8) {
        let net = random_net(&mut rng(seed), n, 3, 0.4);
        let pruned = net.pruned_to_blanket();
        let names: Vec<usize> = pruned.variables().iter().map(|v| net.index_of(&v.name).unwrap()).collect();
        let cards: Vec<usize> = net.variables().iter().map(|v| v.cardinality()).collect();
        for x in all_assignments(&cards) {
            let full = net.posterior(&x).unwrap().distribution;
            let small: Vec<usize> = names.iter().map(|&v| x[v]).collect();
            let kept = pruned.posterior(&small).unwrap().distribution;
            for (a, b) in full.iter().zip(&kept) {
                prop_assert!((a - b).abs() <= 1e-12, "{} vs {}", a, b);
            }
        }
    }

    #[test]
    fn bif_round_trip(seed in any::<u64>(), n in 1usize..7) {
        let net = random_net(&mut rng(seed), n, 4, 0.5);
        let text = export_bif(&net);
        let back = parse_bif(&text).unwrap();
        prop_assert_eq!(export_bif(&back), text);
        prop_assert_eq!(back.class_values(), net.class_values());
        let cards: Vec<usize> = net.variables().iter().map(|v| v.cardinality()).collect();
        for x in all_assignments(&cards).into_iter().take(64) {
            let mapped: Vec<usize> = back.variables().iter().map(|v| x[net.index_of(&v.name).unwrap()]).collect();
            let a = back.posterior(&mapped).unwrap().distribution;
            let b = net.posterior(&x).unwrap().distribution;
            for (p, q) in a.iter().zip(&b) {
                prop_assert!((p - q).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn folds_partition_the_rows(n in 5usize..80, k in 2usize..6, seed in any::<u64>()) {
        prop_assume!(k <= n);
        let rows: Vec<Vec<u32>> = (0..n).map(|r| vec![r as u32, (r % 2) as u32]).collect();
        let ds = bnc::data::Dataset::from_codes(&["id", "c"], &[n, 2], 1, &rows).unwrap();
        let folds = cv_folds(&ds, k, seed).unwrap();
        let mut seen: Vec<u32> = folds.iter().flat_map(|(_, t)| t.codes(0).to_vec()).collect();
        seen.sort_unstable();
        prop_assert_eq!(seen, (0..n as u32).collect::<Vec<_>>());
        for (train, test) in &folds {
            prop_assert_eq!(train.n_cases() + test.n_cases(), n);
            prop_assert!(test.n_cases() >= n / k && test.n_cases() <= n / k + 1);
        }
    }
}

#[test]
fn posterior_is_invariant_to_factor_order() {
    let mut r = rng(11);
    for _ in 0..20 {
        let n = r.gen_range(2..6);
        let net = random_net(&mut r, n, 3, 0.5);
        let text = export_bif(&net);
        // reversing the probability blocks changes the order factors are multiplied in
        let (head, blocks) = text.split_once("probability").unwrap();
        let mut parts: Vec<String> = blocks.split("probability").map(|b| format!("probability{b}")).collect();
        parts.reverse();
        let shuffled = parse_bif(&format!("{head}{}", parts.concat())).unwrap();
        let cards: Vec<usize> = net.variables().iter().map(|v| v.cardinality()).collect();
        for x in all_assignments(&cards) {
            let mapped: Vec<usize> = shuffled.variables().iter().map(|v| x[net.index_of(&v.name).unwrap()]).collect();
            let a = net.posterior(&x).unwrap().distribution;
            let b = shuffled.posterior(&mapped).unwrap().distribution;
            for (p, q) in a.iter().zip(&b) {
                assert!((p - q).abs() < 1e-12);
            }
        }
    }
}
