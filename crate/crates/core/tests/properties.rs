use proptest::prelude::*;

use degtree::engine::nlc::{reduce_to_nice, Pattern};
use degtree::harness::random_case;
use degtree::io::{parse_instance, write_instance};

fn pattern() -> impl Strategy<Value = Pattern> {
    (1usize..=3).prop_flat_map(|k| {
        prop::collection::vec(prop::collection::vec(0u32..=3, k), 1..=4)
            .prop_filter("at most one zero vector", |vs| vs.iter().filter(|v| v.iter().all(|&x| x == 0)).count() <= 1)
            .prop_map(move |vs| Pattern::new(k, vs))
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(256))]

    #[test]
    fn reduction_outputs_are_nice_and_conserve_demand(p in pattern()) {
        let demand: u32 = p.vectors().iter().flatten().sum();
        let (out, stats) = reduce_to_nice(&p);
        prop_assert!(!out.is_empty());
        prop_assert!(stats.stage3_rounds <= p.k());
        for q in &out {
            prop_assert!(q.is_nice());
            prop_assert!(q.len() <= p.len());
            prop_assert_eq!(q.vectors().iter().flatten().sum::<u32>(), demand);
        }
    }

    #[test]
    fn written_instances_parse_back(seed in any::<u64>()) {
        let inst = random_case(seed, 9, true).instance;
        let parsed = parse_instance(&write_instance(&inst)).unwrap();
        prop_assert!(parsed.warnings.is_empty());
        prop_assert_eq!(parsed.instance, inst);
    }
}
