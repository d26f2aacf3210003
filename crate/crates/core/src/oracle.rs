//! Exhaustive verification over the full state space.
//!
//! For small instances every feasible partition can be enumerated, so
//! questions about the dynamics stop being empirical: building the directed
//! graph of all states and all valid deviations answers whether any
//! scheduler can cycle (the state graph is acyclic or it is not), which
//! states are stable (the sinks), and how long a run can possibly take (the
//! longest path). Enumeration refuses to start when the state space exceeds
//! a cap, rather than failing slowly.
//!
//! The module also provides seeded generators for random instances: graphs
//! of each shape and preference profiles drawn from each class.

use std::collections::HashMap;

use rand::Rng;

use thiserror::Error;

use crate::dynamics::{find_is_deviations, Deviation, DynamicsError, Partition};
use crate::graph::{
    build_graph, connected_supersets, GraphError, Player, PlayerSet, DEFAULT_COALITION_CAP,
};
use crate::prefs::{PrefsError, RankedPreference, AdditiveValuation, PreferenceProfile};

/// Refuse to enumerate state spaces larger than this unless overridden.
pub const DEFAULT_STATE_CAP: usize = 200_000;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum OracleError {
    #[error("state space exceeds the cap of {cap} partitions")]
    TooManyStates { cap: usize },
    #[error("state graph has a cycle, so trajectory lengths are unbounded")]
    StateGraphHasCycle,
    #[error(transparent)]
    Graph(#[from] GraphError),
    #[error(transparent)]
    Prefs(#[from] PrefsError),
    #[error(transparent)]
    Dynamics(#[from] DynamicsError),
}

/// All feasible partitions of `g`, in canonical sorted order, refusing
/// beyond [`DEFAULT_STATE_CAP`].
pub fn enumerate_feasible_partitions(g: &crate::graph::Graph) -> Result<Vec<Partition>, OracleError> {
    enumerate_feasible_partitions_with_cap(g, DEFAULT_STATE_CAP)
}

/// All feasible partitions of `g`, in canonical sorted order. Errors out as
/// soon as more than `cap` partitions exist.
pub fn enumerate_feasible_partitions_with_cap(
    g: &crate::graph::Graph,
    cap: usize,
) -> Result<Vec<Partition>, OracleError> {
    let mut out: Vec<Vec<PlayerSet>> = Vec::new();
    let mut prefix: Vec<PlayerSet> = Vec::new();
    fill(g, g.all_players(), &mut prefix, &mut out, cap)?;
    let mut parts: Vec<Partition> = out
        .into_iter()
        .map(|blocks| Partition::from_sets(g.n(), blocks).expect("enumerated blocks partition the players"))
        .collect();
    parts.sort_unstable();
    Ok(parts)
}

/// Extends `prefix` by every feasible coalition containing the smallest
/// remaining player, recursing on what is left.
fn fill(
    g: &crate::graph::Graph,
    remaining: PlayerSet,
    prefix: &mut Vec<PlayerSet>,
    out: &mut Vec<Vec<PlayerSet>>,
    cap: usize,
) -> Result<(), OracleError> {
    let Some(lowest) = remaining.min_player() else {
        if out.len() == cap {
            return Err(OracleError::TooManyStates { cap });
        }
        out.push(prefix.clone());
        return Ok(());
    };
    let mut choices = Vec::new();
    connected_supersets(g, lowest, remaining, &mut |set| choices.push(set));
    for set in choices {
        prefix.push(set);
        fill(g, remaining.difference(set), prefix, out, cap)?;
        prefix.pop();
    }
    Ok(())
}

/// The first stable partition in canonical order, if any.
pub fn exists_is_partition(
    g: &crate::graph::Graph,
    profile: &PreferenceProfile,
) -> Result<Option<Partition>, OracleError> {
    let parts = enumerate_feasible_partitions(g)?;
    Ok(parts
        .into_iter()
        .find(|pi| find_is_deviations(g, profile, pi).is_empty()))
}

/// The full deviation graph: every feasible partition, with an arc per
/// valid deviation.
#[derive(Debug, Clone)]
pub struct StateGraph {
    states: Vec<Partition>,
    index: HashMap<Partition, usize>,
    arcs: Vec<Vec<(usize, Deviation)>>,
}

impl StateGraph {
    pub fn states(&self) -> &[Partition] {
        &self.states
    }

    pub fn n_states(&self) -> usize {
        self.states.len()
    }

    pub fn n_arcs(&self) -> usize {
        self.arcs.iter().map(Vec::len).sum()
    }

    /// Outgoing arcs of state `s` as (successor index, deviation), in the
    /// deterministic deviation order.
    pub fn arcs_from(&self, s: usize) -> &[(usize, Deviation)] {
        &self.arcs[s]
    }

    pub fn index_of(&self, pi: &Partition) -> Option<usize> {
        self.index.get(pi).copied()
    }

    /// Indices of states with no outgoing arc, i.e. the stable partitions.
    pub fn sinks(&self) -> Vec<usize> {
        (0..self.states.len())
            .filter(|&s| self.arcs[s].is_empty())
            .collect()
    }

    /// Distinct successor indices of `s`.
    fn successors(&self, s: usize) -> Vec<usize> {
        let mut v: Vec<usize> = self.arcs[s].iter().map(|&(t, _)| t).collect();
        v.sort_unstable();
        v.dedup();
        v
    }
}

/// Builds the state graph, refusing beyond [`DEFAULT_STATE_CAP`] states.
pub fn build_state_graph(
    g: &crate::graph::Graph,
    profile: &PreferenceProfile,
) -> Result<StateGraph, OracleError> {
    build_state_graph_with_cap(g, profile, DEFAULT_STATE_CAP)
}

pub fn build_state_graph_with_cap(
    g: &crate::graph::Graph,
    profile: &PreferenceProfile,
    cap: usize,
) -> Result<StateGraph, OracleError> {
    let states = enumerate_feasible_partitions_with_cap(g, cap)?;
    let index: HashMap<Partition, usize> = states
        .iter()
        .enumerate()
        .map(|(i, s)| (s.clone(), i))
        .collect();
    let mut arcs = Vec::with_capacity(states.len());
    for pi in &states {
        let mut out = Vec::new();
        for d in find_is_deviations(g, profile, pi) {
            let next = crate::dynamics::apply_deviation(g, profile, pi, &d)
                .expect("deviations from the finder are valid");
            let t = index[&next];
            out.push((t, d));
        }
        arcs.push(out);
    }
    Ok(StateGraph { states, index, arcs })
}

/// Outcome of exhaustive convergence checking.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Certification {
    /// The state graph (restricted to the requested start states and
    /// everything reachable from them) is acyclic: every scheduler
    /// terminates from every such start.
    Certified,
    /// A concrete cycle of states, first equal to last: a scheduler
    /// following it runs forever.
    CounterCycle(Vec<Partition>),
}

impl Certification {
    pub fn is_certified(&self) -> bool {
        matches!(self, Certification::Certified)
    }
}

/// Checks the whole state graph for cycles.
pub fn certify_convergence(sg: &StateGraph) -> Certification {
    certify_convergence_from(sg, |_| true)
}

/// Checks the part of the state graph reachable from states satisfying
/// `start`, returning a concrete counter-cycle if one exists there.
pub fn certify_convergence_from(
    sg: &StateGraph,
    start: impl Fn(&Partition) -> bool,
) -> Certification {
    let n = sg.n_states();
    #[derive(Clone, Copy, PartialEq)]
    enum Color {
        White,
        Gray,
        Black,
    }
    let mut color = vec![Color::White; n];
    let mut path: Vec<usize> = Vec::new();

    for root in 0..n {
        if color[root] != Color::White || !start(&sg.states[root]) {
            continue;
        }
        // iterative DFS so deep state spaces cannot overflow the stack
        let mut stack: Vec<(usize, Vec<usize>, usize)> = Vec::new();
        color[root] = Color::Gray;
        path.push(root);
        stack.push((root, sg.successors(root), 0));
        while let Some((u, succs, idx)) = stack.last_mut() {
            if *idx < succs.len() {
                let v = succs[*idx];
                *idx += 1;
                match color[v] {
                    Color::White => {
                        color[v] = Color::Gray;
                        path.push(v);
                        let sv = sg.successors(v);
                        stack.push((v, sv, 0));
                    }
                    Color::Gray => {
                        let pos = path
                            .iter()
                            .position(|&x| x == v)
                            .expect("gray states sit on the current path");
                        let mut cyc: Vec<Partition> =
                            path[pos..].iter().map(|&s| sg.states[s].clone()).collect();
                        cyc.push(sg.states[v].clone());
                        return Certification::CounterCycle(cyc);
                    }
                    Color::Black => {}
                }
            } else {
                color[*u] = Color::Black;
                path.pop();
                stack.pop();
            }
        }
    }
    Certification::Certified
}

/// Length and witness of the longest possible run, as (number of
/// deviations, the state sequence realizing it). Fails if the state graph
/// has a cycle.
pub fn longest_trajectory(sg: &StateGraph) -> Result<(usize, Vec<Partition>), OracleError> {
    let n = sg.n_states();
    let mut indegree = vec![0usize; n];
    for s in 0..n {
        for t in sg.successors(s) {
            indegree[t] += 1;
        }
    }
    let mut order: Vec<usize> = Vec::with_capacity(n);
    let mut queue: Vec<usize> = (0..n).filter(|&s| indegree[s] == 0).collect();
    while let Some(s) = queue.pop() {
        order.push(s);
        for t in sg.successors(s) {
            indegree[t] -= 1;
            if indegree[t] == 0 {
                queue.push(t);
            }
        }
    }
    if order.len() != n {
        return Err(OracleError::StateGraphHasCycle);
    }
    let mut best = vec![0usize; n];
    let mut next: Vec<Option<usize>> = vec![None; n];
    for &s in order.iter().rev() {
        for t in sg.successors(s) {
            if best[t] + 1 > best[s] {
                best[s] = best[t] + 1;
                next[s] = Some(t);
            }
        }
    }
    let start = (0..n).max_by_key(|&s| best[s]).expect("at least one state");
    let mut traj = vec![sg.states[start].clone()];
    let mut cur = start;
    while let Some(t) = next[cur] {
        traj.push(sg.states[t].clone());
        cur = t;
    }
    Ok((best[start], traj))
}

/// A uniformly random labeled tree on `n` vertices, decoded from a random
/// Pruefer sequence.
pub fn random_tree(n: usize, rng: &mut impl Rng) -> crate::graph::Graph {
    assert!(n >= 2, "trees need at least two vertices");
    if n == 2 {
        return build_graph(2, &[(0, 1)]).unwrap();
    }
    let seq: Vec<usize> = (0..n - 2).map(|_| rng.gen_range(0..n)).collect();
    let mut degree = vec![1usize; n];
    for &v in &seq {
        degree[v] += 1;
    }
    let mut edges = Vec::with_capacity(n - 1);
    for &v in &seq {
        let leaf = (0..n).find(|&u| degree[u] == 1).unwrap();
        edges.push((leaf, v));
        degree[leaf] -= 1;
        degree[v] -= 1;
    }
    let rest: Vec<usize> = (0..n).filter(|&u| degree[u] == 1).collect();
    edges.push((rest[0], rest[1]));
    build_graph(n, &edges).unwrap()
}

/// A path on `n` vertices visiting the players in random order.
pub fn random_path(n: usize, rng: &mut impl Rng) -> crate::graph::Graph {
    let mut perm: Vec<usize> = (0..n).collect();
    for i in (1..n).rev() {
        perm.swap(i, rng.gen_range(0..=i));
    }
    let edges: Vec<(usize, usize)> = perm.windows(2).map(|w| (w[0], w[1])).collect();
    build_graph(n, &edges).unwrap()
}

/// A star on `n` vertices with a random center.
pub fn random_star(n: usize, rng: &mut impl Rng) -> crate::graph::Graph {
    let center = rng.gen_range(0..n);
    let edges: Vec<(usize, usize)> = (0..n).filter(|&v| v != center).map(|v| (v, center)).collect();
    build_graph(n, &edges).unwrap()
}

/// A connected graph: a random tree plus each remaining pair independently
/// with probability `extra_edge_prob`.
pub fn random_connected_graph(
    n: usize,
    extra_edge_prob: f64,
    rng: &mut impl Rng,
) -> crate::graph::Graph {
    let tree = random_tree(n, rng);
    let mut edges: Vec<(usize, usize)> = tree.edges().to_vec();
    for u in 0..n {
        for v in u + 1..n {
            if tree.edge_index(u, v).is_none() && rng.gen_bool(extra_edge_prob) {
                edges.push((u, v));
            }
        }
    }
    build_graph(n, &edges).unwrap()
}

/// Additive values drawn uniformly from `0..=max_value` on edges and zero
/// elsewhere, which keeps the profile locally additive separable.
pub fn random_las_profile(
    g: &crate::graph::Graph,
    max_value: i64,
    rng: &mut impl Rng,
) -> PreferenceProfile {
    let n = g.n();
    let mut values = vec![vec![0i64; n]; n];
    for i in 0..n {
        for j in g.neighbors(i).iter() {
            values[i][j] = rng.gen_range(0..=max_value);
        }
    }
    PreferenceProfile::Additive(AdditiveValuation::from_ints(values).unwrap())
}

/// Feasible coalitions of `g` that contain `i`.
fn own_coalitions(g: &crate::graph::Graph, i: Player) -> Result<Vec<PlayerSet>, OracleError> {
    Ok(crate::graph::enumerate_feasible_coalitions_with_cap(
        g,
        i,
        DEFAULT_COALITION_CAP,
    )?)
}

/// A random ranked profile in which no player ever strictly prefers being
/// alone: every non-singleton coalition lands in a tier at or above the
/// singleton's.
pub fn random_ir_profile(
    g: &crate::graph::Graph,
    rng: &mut impl Rng,
) -> Result<PreferenceProfile, OracleError> {
    let mut players = Vec::with_capacity(g.n());
    for i in g.players() {
        let own = own_coalitions(g, i)?;
        let k = rng.gen_range(1..=3usize);
        let mut tiers: Vec<Vec<PlayerSet>> = vec![Vec::new(); k + 1];
        for set in own {
            if set.len() == 1 {
                tiers[k].push(set);
            } else {
                tiers[rng.gen_range(0..=k)].push(set);
            }
        }
        tiers.retain(|t| !t.is_empty());
        let default_tier = tiers
            .iter()
            .position(|t| t.contains(&PlayerSet::singleton(i)))
            .expect("singleton was listed");
        players.push(RankedPreference::new(tiers, default_tier)?);
    }
    Ok(PreferenceProfile::Ranked(players))
}

/// A random ranked profile in which growing a coalition never hurts:
/// produced by a random linear extension of the superset order, with
/// adjacent entries merged into shared tiers at random.
pub fn random_monotone_profile(
    g: &crate::graph::Graph,
    rng: &mut impl Rng,
) -> Result<PreferenceProfile, OracleError> {
    let mut players = Vec::with_capacity(g.n());
    for i in g.players() {
        let own = own_coalitions(g, i)?;
        let mut placed = vec![false; own.len()];
        let mut tiers: Vec<Vec<PlayerSet>> = Vec::new();
        for _ in 0..own.len() {
            // a coalition is ready once all its strict supersets are placed
            let ready: Vec<usize> = (0..own.len())
                .filter(|&a| !placed[a])
                .filter(|&a| {
                    (0..own.len()).all(|b| {
                        placed[b] || b == a || !own[a].is_subset_of(own[b])
                    })
                })
                .collect();
            let pick = ready[rng.gen_range(0..ready.len())];
            placed[pick] = true;
            if tiers.is_empty() || rng.gen_bool(0.5) {
                tiers.push(vec![own[pick]]);
            } else {
                tiers.last_mut().unwrap().push(own[pick]);
            }
        }
        let default_tier = tiers.len() - 1;
        players.push(RankedPreference::new(tiers, default_tier)?);
    }
    Ok(PreferenceProfile::Ranked(players))
}

/// A random ranked profile with no structure at all: uniform tiers and a
/// uniform default tier.
pub fn random_general_profile(
    g: &crate::graph::Graph,
    rng: &mut impl Rng,
) -> Result<PreferenceProfile, OracleError> {
    let mut players = Vec::with_capacity(g.n());
    for i in g.players() {
        let own = own_coalitions(g, i)?;
        let k = rng.gen_range(1..=own.len().min(4));
        let mut tiers: Vec<Vec<PlayerSet>> = vec![Vec::new(); k];
        for set in own {
            tiers[rng.gen_range(0..k)].push(set);
        }
        tiers.retain(|t| !t.is_empty());
        let default_tier = rng.gen_range(0..tiers.len());
        players.push(RankedPreference::new(tiers, default_tier)?);
    }
    Ok(PreferenceProfile::Ranked(players))
}

/// A feasible partition drawn uniformly from the full enumeration.
pub fn random_feasible_partition(
    g: &crate::graph::Graph,
    rng: &mut impl Rng,
) -> Result<Partition, OracleError> {
    let parts = enumerate_feasible_partitions(g)?;
    Ok(parts[rng.gen_range(0..parts.len())].clone())
}
