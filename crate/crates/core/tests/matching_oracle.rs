//! Max-weight matching against exhaustive enumeration of edge subsets.

use proptest::prelude::*;
use twostage_core::matching::{
    max_weight_matching, max_weight_value, nu, AvailabilityVector, BipartiteGraph, GraphEdge,
};
use twostage_core::numeric::{ratio, Rational};

/// Best weight over every edge subset that is a matching.
fn brute_force(n_left: usize, n_right: usize, edges: &[(usize, usize, i64)]) -> i64 {
    let mut best = 0;
    for mask in 0u32..1 << edges.len() {
        let (mut used_l, mut used_r) = (vec![false; n_left], vec![false; n_right]);
        let mut total = 0;
        let mut ok = true;
        for (k, &(l, r, w)) in edges.iter().enumerate() {
            if mask >> k & 1 == 1 {
                if used_l[l] || used_r[r] {
                    ok = false;
                    break;
                }
                used_l[l] = true;
                used_r[r] = true;
                total += w;
            }
        }
        if ok {
            best = best.max(total);
        }
    }
    best
}

fn graph_strategy() -> impl Strategy<Value = (usize, usize, Vec<(usize, usize, i64)>)> {
    (1usize..=4, 1usize..=4).prop_flat_map(|(nl, nr)| {
        let all: Vec<(usize, usize)> = (0..nl).flat_map(|l| (0..nr).map(move |r| (l, r))).collect();
        let n = all.len();
        (
            proptest::collection::vec(any::<bool>(), n),
            proptest::collection::vec(0i64..50, n),
        )
            .prop_map(move |(keep, weights)| {
                let edges = all
                    .iter()
                    .zip(&keep)
                    .zip(&weights)
                    .filter(|((_, k), _)| **k)
                    .map(|((&(l, r), _), &w)| (l, r, w))
                    .collect();
                (nl, nr, edges)
            })
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(300))]

    #[test]
    fn hungarian_matches_enumeration((nl, nr, edges) in graph_strategy()) {
        let expected = brute_force(nl, nr, &edges);
        let exact = BipartiteGraph::new(
            nl,
            nr,
            edges.iter().map(|&(l, r, w)| GraphEdge { left: l, right: r, weight: ratio(w, 1) }).collect(),
        )
        .unwrap();
        let (m, value) = max_weight_matching(&exact);
        prop_assert_eq!(value.clone(), ratio(expected, 1));
        prop_assert!(m.is_valid_in(&exact));
        prop_assert_eq!(m.weight_in(&exact), value);

        let float = BipartiteGraph::new(
            nl,
            nr,
            edges.iter().map(|&(l, r, w)| GraphEdge { left: l, right: r, weight: w as f64 }).collect(),
        )
        .unwrap();
        prop_assert!((max_weight_value(&float) - expected as f64).abs() < 1e-9);
    }

    #[test]
    fn nu_is_monotone_in_availability((nl, nr, edges) in graph_strategy(), drop in 0usize..4) {
        let g = BipartiteGraph::new(
            nl,
            nr,
            edges.iter().map(|&(l, r, w)| GraphEdge { left: l, right: r, weight: ratio(w, 1) }).collect(),
        )
        .unwrap();
        let all = AvailabilityVector::all(nr, true);
        let mut fewer = all.clone();
        fewer.0[drop % nr] = false;
        let full: Rational = nu(&g, &all).unwrap();
        let partial: Rational = nu(&g, &fewer).unwrap();
        prop_assert!(partial <= full);
        let restricted: Vec<(usize, usize, i64)> = edges.iter().copied().filter(|&(_, r, _)| r != drop % nr).collect();
        prop_assert_eq!(partial, ratio(brute_force(nl, nr, &restricted), 1));
    }
}
