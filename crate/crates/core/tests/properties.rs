use std::collections::{BTreeSet, VecDeque};

use browder_core::geometry::{dist_boxset_boxset, hausdorff};
use browder_core::{label_components, split, BoxSet, DyadicBox};
use proptest::prelude::*;

fn boxset(level: u32, dim: usize, raw: Vec<Vec<u32>>) -> BoxSet {
    let cells = 1u32 << level;
    let boxes =
        raw.into_iter().map(|ix| DyadicBox::new(level, ix.into_iter().take(dim).map(|j| j % cells).collect()).unwrap());
    BoxSet::from_boxes(level, dim, boxes).unwrap()
}

fn arb_set(level: u32, dim: usize, max: usize) -> impl Strategy<Value = BoxSet> {
    prop::collection::vec(prop::collection::vec(any::<u32>(), dim), 1..max).prop_map(move |raw| boxset(level, dim, raw))
}

/// Component count by breadth-first search over the touching relation.
fn bfs_components(set: &BoxSet) -> usize {
    let cells: Vec<Vec<u32>> = set.indices().map(<[u32]>::to_vec).collect();
    let mut seen = vec![false; cells.len()];
    let mut count = 0;
    for start in 0..cells.len() {
        if seen[start] {
            continue;
        }
        count += 1;
        seen[start] = true;
        let mut queue = VecDeque::from([start]);
        while let Some(i) = queue.pop_front() {
            for j in 0..cells.len() {
                if !seen[j] && cells[i].iter().zip(&cells[j]).all(|(a, b)| a.abs_diff(*b) <= 1) {
                    seen[j] = true;
                    queue.push_back(j);
                }
            }
        }
    }
    count
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(128))]

    #[test]
    fn components_match_bfs(set in arb_set(3, 2, 30)) {
        let l = label_components(&set);
        prop_assert_eq!(l.len(), bfs_components(&set));
        prop_assert_eq!(l.labels().len(), set.len());
        let total: usize = l.components().iter().map(|c| c.size).sum();
        prop_assert_eq!(total, set.len());
        for c in l.components() {
            let cols: BTreeSet<u32> = l.component_set(c.id).indices().map(|ix| ix[0]).collect();
            prop_assert_eq!(c.spanning, cols.len() == 8);
        }
    }

    #[test]
    fn hausdorff_is_a_metric_on_samples(a in arb_set(3, 2, 8), b in arb_set(3, 2, 8), c in arb_set(2, 2, 4)) {
        let ab = hausdorff(&a, &b).unwrap();
        prop_assert_eq!(ab, hausdorff(&b, &a).unwrap());
        prop_assert!(hausdorff(&a, &a).unwrap().is_zero());
        let ac = hausdorff(&a, &c).unwrap().to_f64();
        let cb = hausdorff(&c, &b).unwrap().to_f64();
        prop_assert!(ab.to_f64() <= ac + cb);
        // refinement does not move the realized union
        prop_assert!(hausdorff(&a, &a.refine_to(5).unwrap()).unwrap().is_zero());
        prop_assert!(dist_boxset_boxset(&a, &b).unwrap() <= ab);
    }

    #[test]
    fn split_partitions_non_spanning_sets(set in arb_set(4, 2, 25), cut in 1u32..16) {
        let set = set.filter(|ix| ix[0] != cut);
        prop_assume!(!set.is_empty());
        let sep = split(&set).unwrap();
        prop_assert_eq!(sep.a0().len() + sep.a1().len(), set.len());
        prop_assert!(sep.a0().union(sep.a1()).unwrap() == set);
        if let Some(g) = sep.gap() {
            prop_assert!(g.to_f64() >= 1.0 / 16.0);
        }
    }

    #[test]
    fn refinement_round_trip(set in arb_set(2, 3, 10)) {
        let fine = set.refine_to(4).unwrap();
        prop_assert_eq!(fine.len(), set.len() * 64);
        prop_assert!(set.covers(&fine));
    }
}
