//! Property tests tying the exhaustive state-graph oracle to the runtime
//! dynamics.

mod common;

use hedonic::dynamics::{apply_deviation, is_valid_deviation, run_dynamics, verify_is, Scheduler};
use hedonic::oracle::{
    build_state_graph, certify_convergence, longest_trajectory, random_connected_graph,
    random_feasible_partition, random_general_profile, Certification,
};
use proptest::prelude::*;

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    /// Every arc of the state graph is a valid deviation that replays to
    /// its endpoint, and every sink is a stable state.
    #[test]
    fn state_graph_arcs_replay(seed in 0u64..2000, n in 2usize..=6) {
        let mut rng = common::rng(seed);
        let g = random_connected_graph(n, 0.3, &mut rng);
        let prof = random_general_profile(&g, &mut rng).unwrap();
        let sg = build_state_graph(&g, &prof).unwrap();
        for s in 0..sg.n_states() {
            for (t, d) in sg.arcs_from(s) {
                prop_assert!(is_valid_deviation(&g, &prof, &sg.states()[s], d));
                let next = apply_deviation(&g, &prof, &sg.states()[s], d).unwrap();
                prop_assert_eq!(&next, &sg.states()[*t]);
            }
        }
        for s in sg.sinks() {
            prop_assert!(verify_is(&g, &prof, &sg.states()[s]));
        }
    }

    /// A certified instance converges in sampled runs; an uncertified one
    /// comes with a replayable counter-cycle.
    #[test]
    fn certification_agrees_with_sampled_runs(seed in 0u64..2000, n in 2usize..=6) {
        let mut rng = common::rng(seed);
        let g = random_connected_graph(n, 0.3, &mut rng);
        let prof = random_general_profile(&g, &mut rng).unwrap();
        let sg = build_state_graph(&g, &prof).unwrap();
        match certify_convergence(&sg) {
            Certification::Certified => {
                let (longest, witness) = longest_trajectory(&sg).unwrap();
                prop_assert_eq!(witness.len(), longest + 1);
                // witness states are chained by arcs
                for w in witness.windows(2) {
                    let s = sg.index_of(&w[0]).unwrap();
                    prop_assert!(sg.arcs_from(s).iter().any(|(t, _)| sg.states()[*t] == w[1]));
                }
                for k in 0..30 {
                    let initial = random_feasible_partition(&g, &mut rng).unwrap();
                    let run = run_dynamics(
                        &g,
                        &prof,
                        &initial,
                        &Scheduler::Random { seed: seed ^ k },
                        longest + 1,
                    )
                    .unwrap();
                    prop_assert_eq!(run.status, hedonic::dynamics::RunStatus::Converged);
                    prop_assert!(run.steps <= longest);
                }
            }
            Certification::CounterCycle(states) => {
                prop_assert!(states.len() >= 2);
                prop_assert_eq!(&states[0], states.last().unwrap());
                for w in states.windows(2) {
                    let s = sg.index_of(&w[0]).unwrap();
                    prop_assert!(
                        sg.arcs_from(s).iter().any(|(t, _)| sg.states()[*t] == w[1]),
                        "counter-cycle is not a walk in the state graph"
                    );
                }
            }
        }
    }
}
