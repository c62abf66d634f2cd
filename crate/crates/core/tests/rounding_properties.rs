//! Dependent rounding invariants on arbitrary fractional matchings.

use proptest::prelude::*;
use twostage_core::matching::BipartiteGraph;
use twostage_core::rounding::dependent_round_seeded;

/// Graph plus a fractional matching: raw values scaled so every degree is at
/// most 1, with some coordinates forced to 0 or 1 where that stays feasible.
fn fractional_strategy() -> impl Strategy<Value = (BipartiteGraph<f64>, Vec<f64>)> {
    (1usize..=5, 1usize..=5).prop_flat_map(|(nl, nr)| {
        let all: Vec<(usize, usize)> = (0..nl).flat_map(|l| (0..nr).map(move |r| (l, r))).collect();
        let n = all.len();
        (
            proptest::collection::vec(any::<bool>(), n),
            proptest::collection::vec(0.0f64..1.0, n),
            proptest::collection::vec(0u8..6, n),
        )
            .prop_map(move |(keep, raw, snap)| {
                let pairs: Vec<(usize, usize)> = all.iter().zip(&keep).filter(|(_, k)| **k).map(|(p, _)| *p).collect();
                let raw: Vec<f64> = all
                    .iter()
                    .zip(&keep)
                    .zip(raw.iter().zip(&snap))
                    .filter(|((_, k), _)| **k)
                    .map(|(_, (&v, &s))| if s == 0 { 0.0 } else { v })
                    .collect();
                let (mut dl, mut dr) = (vec![0.0; nl], vec![0.0; nr]);
                for (&(l, r), v) in pairs.iter().zip(&raw) {
                    dl[l] += v;
                    dr[r] += v;
                }
                let x = pairs
                    .iter()
                    .zip(&raw)
                    .map(|(&(l, r), v)| v / dl[l].max(dr[r]).max(1.0))
                    .collect();
                (BipartiteGraph::unweighted(nl, nr, &pairs).unwrap(), x)
            })
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(300))]

    #[test]
    fn output_is_a_matching_on_the_support((g, x) in fractional_strategy(), seed in any::<u64>()) {
        let (m, transcript) = dependent_round_seeded(&g, &x, seed, true).unwrap();
        prop_assert!(m.is_valid_in(&g));
        for &(l, r) in m.edges() {
            let k = g.edge_index(l, r).unwrap();
            prop_assert!(x[k] > 0.0, "edge {k} with x = 0 was chosen");
        }
        for (k, e) in g.edges().iter().enumerate() {
            if x[k] == 1.0 {
                prop_assert!(m.contains(e.left, e.right));
            }
        }
        // Every step fixes at least one more coordinate, so the run is short.
        prop_assert!(transcript.unwrap().steps.len() <= x.len());
    }

    #[test]
    fn same_seed_same_output((g, x) in fractional_strategy(), seed in any::<u64>()) {
        let a = dependent_round_seeded(&g, &x, seed, false).unwrap().0;
        let b = dependent_round_seeded(&g, &x, seed, false).unwrap().0;
        prop_assert_eq!(a, b);
    }
}

#[test]
fn marginals_are_preserved_on_a_fixed_graph() {
    // Hexagon with unequal values; 4σ band over 40k runs.
    let g: BipartiteGraph<f64> =
        BipartiteGraph::unweighted(3, 3, &[(0, 0), (0, 1), (1, 1), (1, 2), (2, 2), (2, 0)]).unwrap();
    let x = [0.3, 0.6, 0.2, 0.7, 0.25, 0.5];
    let runs = 40_000u64;
    let mut counts = [0u64; 6];
    for seed in 0..runs {
        let (m, _) = dependent_round_seeded(&g, &x, seed, false).unwrap();
        for (k, e) in g.edges().iter().enumerate() {
            counts[k] += m.contains(e.left, e.right) as u64;
        }
    }
    for (k, &xe) in x.iter().enumerate() {
        let freq = counts[k] as f64 / runs as f64;
        assert!(
            (freq - xe).abs() <= 4.0 * (xe * (1.0 - xe) / runs as f64).sqrt(),
            "edge {k}: {freq} vs {xe}"
        );
    }
}
