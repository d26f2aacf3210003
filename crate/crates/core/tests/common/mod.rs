//! Helpers shared by the integration test files.
#![allow(dead_code)]

use hedonic::dynamics::{run_dynamics, LabeledRun, Partition, RunOutcome, Scheduler};
use hedonic::examples::{build_example, ExampleInstance};
use hedonic::graph::{is_connected_subset, Graph, Player, PlayerSet};
use hedonic::prefs::{Comparison, PreferenceProfile};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Builds a catalog entry and replays its script.
pub fn run_scripted(name: &str) -> (ExampleInstance, RunOutcome) {
    let ex = build_example(name).expect("catalog entry");
    let script = ex.script.clone().expect("scripted entry");
    let outcome = run_dynamics(
        &ex.graph,
        &ex.profile,
        &ex.initial,
        &Scheduler::Scripted(script),
        ex.default_max_steps(),
    )
    .expect("script replays");
    (ex, outcome)
}

/// Canonical display of every visited state, initial state first.
pub fn display_states(g: &Graph, outcome: &RunOutcome) -> Vec<String> {
    outcome.states().iter().map(|pi| pi.display(g)).collect()
}

/// At every point of a labeled run, each player has at most one built edge
/// carrying their own label.
pub fn check_one_edge_claim(g: &Graph, run: &LabeledRun) -> Result<(), String> {
    let states = run.outcome.states();
    for (k, labels) in run.label_history.iter().enumerate() {
        let pi = &states[k];
        for i in 0..g.n() {
            let block = pi.block_of(i);
            let owned = g
                .neighbors(i)
                .iter()
                .filter(|&j| block.contains(j) && labels.get(g, i, j) == Some(i))
                .count();
            if owned > 1 {
                return Err(format!(
                    "state {k}: player {i} holds {owned} built edges labeled {i}"
                ));
            }
        }
    }
    Ok(())
}

/// Utility-sign rules for every player at every step of a labeled run on a
/// tree with edge-supported values: the mover strictly gains and ends at
/// exactly the value of the edge built; a neighbor losing a built edge
/// weakly drops (strictly, if the edge carried their label); the player
/// joined weakly gains; everyone else is unaffected.
pub fn check_utility_sign_claim(g: &Graph, profile: &PreferenceProfile, run: &LabeledRun) -> Result<(), String> {
    let vals = match profile {
        PreferenceProfile::Additive(v) => v,
        PreferenceProfile::Ranked(_) => return Err("labeled runs need additive values".into()),
    };
    let states = run.outcome.states();
    for (t, step) in run.outcome.trace.iter().enumerate() {
        let before = &states[t];
        let after = &states[t + 1];
        let labels = &run.label_history[t];
        let alpha = step.player;
        let (_, beta) = run.built_edges[t];
        for i in 0..g.n() {
            let u_before = vals.utility(i, before.block_of(i));
            let u_after = vals.utility(i, after.block_of(i));
            let fail = |why: &str| {
                Err(format!(
                    "step {}: player {i} ({why}): utility {u_before} -> {u_after}",
                    t + 1
                ))
            };
            if i == alpha {
                if u_after <= u_before {
                    return fail("mover must strictly gain");
                }
                if u_after != vals.value(alpha, beta) {
                    return fail("mover utility must equal the built edge value");
                }
            } else if g.has_edge(alpha, i) && before.block_of(i).contains(alpha) {
                if labels.get(g, alpha, i) == Some(i) {
                    if u_after >= u_before {
                        return fail("losing an edge labeled with me must strictly hurt");
                    }
                } else if u_after > u_before {
                    return fail("losing a built edge cannot help");
                }
            } else if i == beta {
                if u_after < u_before {
                    return fail("being joined cannot hurt");
                }
            } else if u_after != u_before {
                return fail("bystander utility must not change");
            }
        }
    }
    Ok(())
}

/// The Nash deviation rule, written out from scratch: a strict
/// improvement for the mover into a connected target, no consent asked.
pub fn brute_nash_deviations(
    g: &Graph,
    prof: &PreferenceProfile,
    pi: &Partition,
) -> Vec<(Player, Option<PlayerSet>)> {
    let mut out = Vec::new();
    for i in 0..g.n() {
        let own = pi.block_of(i);
        if own.len() > 1
            && prof.compare_unchecked(i, PlayerSet::singleton(i), own) == Comparison::Prefer
        {
            out.push((i, None));
        }
        for &b in pi.blocks() {
            if b != own
                && is_connected_subset(g, b.with(i)).unwrap()
                && prof.compare_unchecked(i, b.with(i), own) == Comparison::Prefer
            {
                out.push((i, Some(b)));
            }
        }
    }
    out.sort();
    out
}
