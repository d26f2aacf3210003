//! Property tests for preference profiles: order structure of comparisons
//! and the inclusion chain between the preference classes.

mod common;

use hedonic::graph::enumerate_feasible_coalitions;
use hedonic::oracle::{
    random_connected_graph, random_general_profile, random_ir_profile, random_las_profile,
    random_monotone_profile, random_tree,
};
use hedonic::prefs::{is_individually_rational, is_las, is_monotone, Comparison};
use proptest::prelude::*;

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    /// compare is symmetric under flipping and transitive in `at_least`
    /// across every triple of feasible coalitions of each player.
    #[test]
    fn comparisons_form_a_total_preorder(seed in 0u64..1000, n in 2usize..=5) {
        let mut rng = common::rng(seed);
        let g = random_connected_graph(n, 0.4, &mut rng);
        let prof = random_general_profile(&g, &mut rng).unwrap();
        for i in 0..n {
            let own = enumerate_feasible_coalitions(&g, i).unwrap();
            for &s in &own {
                prop_assert_eq!(prof.compare_unchecked(i, s, s), Comparison::Indifferent);
                for &t in &own {
                    prop_assert_eq!(
                        prof.compare_unchecked(i, s, t).flip(),
                        prof.compare_unchecked(i, t, s)
                    );
                    for &u in &own {
                        let st = prof.compare_unchecked(i, s, t).at_least();
                        let tu = prof.compare_unchecked(i, t, u).at_least();
                        let su = prof.compare_unchecked(i, s, u).at_least();
                        if st && tu {
                            prop_assert!(su, "at_least is not transitive");
                        }
                    }
                }
            }
        }
    }

    /// Generated profiles land in their classes, and the classes nest:
    /// edge-supported implies monotone implies individually rational.
    #[test]
    fn preference_classes_nest(seed in 0u64..1000, n in 2usize..=7) {
        let mut rng = common::rng(seed);
        let g = random_tree(n, &mut rng);

        let las = random_las_profile(&g, 5, &mut rng);
        prop_assert!(is_las(&g, &las).unwrap());
        prop_assert!(is_monotone(&g, &las).unwrap());
        prop_assert!(is_individually_rational(&g, &las).unwrap());

        let mono = random_monotone_profile(&g, &mut rng).unwrap();
        prop_assert!(is_monotone(&g, &mono).unwrap());
        prop_assert!(is_individually_rational(&g, &mono).unwrap());

        let ir = random_ir_profile(&g, &mut rng).unwrap();
        prop_assert!(is_individually_rational(&g, &ir).unwrap());
    }
}
