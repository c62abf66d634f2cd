//! Instance files survive a write/read cycle unchanged.

use proptest::prelude::*;
use twostage_core::instance::{
    instance_from_json, instance_to_json, make_edge_gap_family, make_eight_cycle, make_random_instance,
    RandomInstanceSpec, WeightMode,
};

proptest! {
    #![proptest_config(ProptestConfig::with_cases(60))]

    #[test]
    fn random_instances_round_trip(seed in any::<u64>(), k in 0usize..3, offline in 1usize..6, online in 1usize..4, scenarios in 1usize..5) {
        let mode = [WeightMode::Unweighted, WeightMode::VertexWeighted, WeightMode::EdgeWeighted][k];
        let inst = make_random_instance(&RandomInstanceSpec::new(seed, offline, online, mode, scenarios)).unwrap();
        let text = instance_to_json(&inst).unwrap();
        prop_assert_eq!(instance_from_json(&text).unwrap(), inst);
    }
}

#[test]
fn generated_families_round_trip() {
    for inst in [make_eight_cycle(), make_edge_gap_family(2).unwrap()] {
        let text = instance_to_json(&inst).unwrap();
        assert_eq!(instance_from_json(&text).unwrap(), inst);
    }
}
