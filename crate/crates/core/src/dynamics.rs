//! Deviation dynamics over feasible partitions.
//!
//! A state is a partition of the players into feasible (connected)
//! coalitions. A deviation moves one player either into another coalition of
//! the current partition or out on their own; it is valid when the enlarged
//! coalition is feasible, the mover strictly prefers it, and every member of
//! the coalition being joined weakly accepts the newcomer. When the mover
//! leaves, their old coalition splits into its maximal connected pieces.
//!
//! A run applies deviations until none exist (converged), a previously seen
//! state recurs (cycle), or a step budget runs out (truncated). Everything
//! is deterministic given the scheduler, including the seeded random one.

use std::collections::HashMap;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::graph::{
    is_connected_subset, maximal_connected_components, star_center, Graph, Player, PlayerSet,
};
use crate::prefs::{Comparison, PreferenceProfile, PrefsError};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum DynamicsError {
    #[error("invalid partition: {0}")]
    InvalidPartition(String),
    #[error("invalid deviation by player {player}: {reason}")]
    InvalidDeviation { player: Player, reason: String },
    #[error("scripted deviation at step {step} is invalid: {reason}")]
    ScriptedDeviationInvalid { step: usize, reason: String },
    #[error("labeled runs require a tree-shaped graph")]
    NotATree,
    #[error("labeled runs require locally additive separable preferences: {0}")]
    NotLas(String),
    #[error("star deviation classification requires a star-shaped graph")]
    NotAStar,
    #[error(transparent)]
    Prefs(#[from] PrefsError),
}

/// A partition of players 0..n-1 into non-empty coalitions, kept in
/// canonical form: blocks ordered by their smallest member.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Partition {
    blocks: Vec<PlayerSet>,
    n: usize,
}

impl Partition {
    /// Builds a partition after checking the blocks are non-empty, disjoint
    /// and cover 0..n-1. Blocks are sorted into canonical order.
    pub fn from_sets(n: usize, mut blocks: Vec<PlayerSet>) -> Result<Self, DynamicsError> {
        let mut seen = PlayerSet::EMPTY;
        for b in &blocks {
            if b.is_empty() {
                return Err(DynamicsError::InvalidPartition("empty block".into()));
            }
            if !seen.is_disjoint_from(*b) {
                return Err(DynamicsError::InvalidPartition(format!(
                    "blocks overlap at {:?}",
                    seen.intersection(*b)
                )));
            }
            seen = seen.union(*b);
        }
        if seen != PlayerSet::full(n) {
            return Err(DynamicsError::InvalidPartition(format!(
                "blocks cover {:?}, expected all of 0..{}",
                seen, n
            )));
        }
        blocks.sort_unstable_by_key(|b| b.min_player());
        Ok(Partition { blocks, n })
    }

    /// Everyone alone.
    pub fn singletons(n: usize) -> Self {
        Partition {
            blocks: (0..n).map(PlayerSet::singleton).collect(),
            n,
        }
    }

    /// Everyone together.
    pub fn grand(n: usize) -> Self {
        Partition {
            blocks: vec![PlayerSet::full(n)],
            n,
        }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    /// Number of coalitions.
    pub fn len(&self) -> usize {
        self.blocks.len()
    }

    pub fn is_empty(&self) -> bool {
        self.blocks.is_empty()
    }

    pub fn blocks(&self) -> &[PlayerSet] {
        &self.blocks
    }

    /// The coalition containing `i`.
    pub fn block_of(&self, i: Player) -> PlayerSet {
        debug_assert!(i < self.n);
        *self
            .blocks
            .iter()
            .find(|b| b.contains(i))
            .expect("partition covers all players")
    }

    /// Whether some block equals `set` exactly.
    pub fn has_block(&self, set: PlayerSet) -> bool {
        self.blocks.contains(&set)
    }

    /// Whether every block is connected in `g`.
    pub fn is_feasible(&self, g: &Graph) -> bool {
        self.n == g.n()
            && self
                .blocks
                .iter()
                .all(|&b| is_connected_subset(g, b).unwrap_or(false))
    }

    /// Blocks as sorted member vectors, for serialization.
    pub fn to_vecs(&self) -> Vec<Vec<Player>> {
        self.blocks.iter().map(|b| b.to_vec()).collect()
    }

    /// Renders as `{a,b} {c}` using the graph's player names.
    pub fn display(&self, g: &Graph) -> String {
        self.blocks
            .iter()
            .map(|&b| g.set_name(b))
            .collect::<Vec<_>>()
            .join(" ")
    }
}

/// One player's move: into an existing coalition of the current partition
/// (`target = Some(block)`), or out alone (`target = None`).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Deviation {
    pub player: Player,
    pub target: Option<PlayerSet>,
}

impl Deviation {
    /// The coalition the player ends up in.
    pub fn joined(&self) -> PlayerSet {
        match self.target {
            Some(t) => t.with(self.player),
            None => PlayerSet::singleton(self.player),
        }
    }
}

/// Order deviations are enumerated in: player ascending, then target block
/// in canonical partition order, with going alone last.
impl Ord for Deviation {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        self.player
            .cmp(&other.player)
            .then_with(|| match (&self.target, &other.target) {
                (Some(a), Some(b)) => a.cmp(b),
                (Some(_), None) => std::cmp::Ordering::Less,
                (None, Some(_)) => std::cmp::Ordering::Greater,
                (None, None) => std::cmp::Ordering::Equal,
            })
    }
}

impl PartialOrd for Deviation {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}

/// All valid deviations at `pi`, in the deterministic order: players
/// ascending; per player, target blocks in canonical partition order, the
/// go-alone move last. `pi` must be feasible for `g`.
pub fn find_is_deviations(
    g: &Graph,
    profile: &PreferenceProfile,
    pi: &Partition,
) -> Vec<Deviation> {
    let mut out = Vec::new();
    for i in g.players() {
        let own = pi.block_of(i);
        for &block in pi.blocks() {
            if block == own {
                continue;
            }
            // block is connected, so adjacency of i to it makes the union
            // connected
            if g.neighbors(i).intersection(block).is_empty() {
                continue;
            }
            let joined = block.with(i);
            if profile.compare_unchecked(i, joined, own) != Comparison::Prefer {
                continue;
            }
            let accepted = block
                .iter()
                .all(|j| profile.compare_unchecked(j, joined, block).at_least());
            if accepted {
                out.push(Deviation {
                    player: i,
                    target: Some(block),
                });
            }
        }
        if own.len() > 1
            && profile.compare_unchecked(i, PlayerSet::singleton(i), own) == Comparison::Prefer
        {
            out.push(Deviation {
                player: i,
                target: None,
            });
        }
    }
    debug_assert!(out.windows(2).all(|w| w[0] < w[1]));
    out
}

/// Whether `pi` admits no deviation at all.
pub fn verify_is(g: &Graph, profile: &PreferenceProfile, pi: &Partition) -> bool {
    find_is_deviations(g, profile, pi).is_empty()
}

/// Whether every member of every block weakly prefers the block to being
/// alone.
pub fn is_ir_partition(profile: &PreferenceProfile, pi: &Partition) -> bool {
    pi.blocks().iter().all(|&b| {
        b.iter()
            .all(|i| profile.compare_unchecked(i, b, PlayerSet::singleton(i)).at_least())
    })
}

/// Structural check (no preferences): the player exists, the target is a
/// block of `pi` other than their own (or the go-alone move from a
/// non-singleton), and the enlarged coalition is connected.
fn check_deviation_shape(g: &Graph, pi: &Partition, d: &Deviation) -> Result<(), String> {
    if d.player >= g.n() {
        return Err(format!("player {} out of range", d.player));
    }
    let own = pi.block_of(d.player);
    match d.target {
        None => {
            if own.len() == 1 {
                return Err("already alone".into());
            }
        }
        Some(t) => {
            if !pi.has_block(t) {
                return Err(format!("target {:?} is not a coalition of the partition", t));
            }
            if t == own {
                return Err("target is the player's own coalition".into());
            }
            if g.neighbors(d.player).intersection(t).is_empty() {
                return Err(format!("joining {:?} would not be connected", t));
            }
        }
    }
    Ok(())
}

/// Full validity check: shape, strict improvement for the mover, weak
/// acceptance by every member of the target.
fn check_deviation(
    g: &Graph,
    profile: &PreferenceProfile,
    pi: &Partition,
    d: &Deviation,
) -> Result<(), String> {
    check_deviation_shape(g, pi, d)?;
    let own = pi.block_of(d.player);
    let joined = d.joined();
    if profile.compare_unchecked(d.player, joined, own) != Comparison::Prefer {
        return Err(format!(
            "player {} does not strictly prefer {:?} to {:?}",
            d.player, joined, own
        ));
    }
    if let Some(t) = d.target {
        for j in t.iter() {
            if !profile.compare_unchecked(j, joined, t).at_least() {
                return Err(format!("member {} rejects the newcomer", j));
            }
        }
    }
    Ok(())
}

/// Whether `d` is a valid deviation at `pi`.
pub fn is_valid_deviation(
    g: &Graph,
    profile: &PreferenceProfile,
    pi: &Partition,
    d: &Deviation,
) -> bool {
    check_deviation(g, profile, pi, d).is_ok()
}

fn apply_unchecked(g: &Graph, pi: &Partition, d: &Deviation) -> Partition {
    let own = pi.block_of(d.player);
    let mut blocks: Vec<PlayerSet> = Vec::with_capacity(pi.len() + 2);
    for &b in pi.blocks() {
        if b != own && Some(b) != d.target {
            blocks.push(b);
        }
    }
    blocks.push(d.joined());
    blocks.extend(maximal_connected_components(g, own.without(d.player)));
    blocks.sort_unstable_by_key(|b| b.min_player());
    Partition {
        blocks,
        n: pi.n(),
    }
}

/// Validates `d` against `pi` and applies it: the mover joins the target
/// (or goes alone) and what remains of their old coalition splits into
/// maximal connected pieces.
pub fn apply_deviation(
    g: &Graph,
    profile: &PreferenceProfile,
    pi: &Partition,
    d: &Deviation,
) -> Result<Partition, DynamicsError> {
    check_deviation(g, profile, pi, d).map_err(|reason| DynamicsError::InvalidDeviation {
        player: d.player,
        reason,
    })?;
    Ok(apply_unchecked(g, pi, d))
}

/// A target in a scripted schedule. `Block` must match a coalition of the
/// current partition exactly; `BlockOf` names any member of the intended
/// coalition, which is resolved when the step runs.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ScriptTarget {
    Alone,
    Block(PlayerSet),
    BlockOf(Player),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ScriptStep {
    pub player: Player,
    pub target: ScriptTarget,
}

impl ScriptStep {
    pub fn join_block_of(player: Player, member: Player) -> Self {
        ScriptStep {
            player,
            target: ScriptTarget::BlockOf(member),
        }
    }

    pub fn go_alone(player: Player) -> Self {
        ScriptStep {
            player,
            target: ScriptTarget::Alone,
        }
    }
}

/// How the next deviation is chosen at each step.
#[derive(Debug, Clone)]
pub enum Scheduler {
    /// The first deviation in the deterministic enumeration order.
    First,
    /// Uniformly random among the current deviations, from a seeded stream.
    Random { seed: u64 },
    /// The first player with any deviation moves to the target they like
    /// best; ties go to the earliest target in canonical order.
    BestResponse,
    /// Replays an explicit list of moves, failing on any invalid one. When
    /// the script ends, the run reports Converged if the state is stable
    /// and Truncated otherwise.
    Scripted(Vec<ScriptStep>),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize)]
#[serde(rename_all = "snake_case")]
pub enum RunStatus {
    Converged,
    CycleDetected,
    Truncated,
}

/// One applied deviation in a trace.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TraceStep {
    /// 1-based step number.
    pub step: usize,
    pub player: Player,
    /// The mover's coalition before the step.
    pub from: PlayerSet,
    /// The coalition joined, None for going alone.
    pub to: Option<PlayerSet>,
    /// State after the step.
    pub result: Partition,
}

/// Result of a run.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RunOutcome {
    pub status: RunStatus,
    /// Number of deviations applied.
    pub steps: usize,
    pub initial: Partition,
    /// Last state reached. For a detected cycle this is the repeated state.
    pub final_partition: Partition,
    pub trace: Vec<TraceStep>,
    /// For CycleDetected: the cycle segment of states, first equal to last.
    pub cycle: Option<Vec<Partition>>,
    /// For CycleDetected: index (in applied-step count) where the repeated
    /// state first occurred.
    pub cycle_start: Option<usize>,
    /// Deviations performed by each player.
    pub per_player_counts: Vec<usize>,
    /// `per_player_breaks[i][j]`: labeled runs only; times player i deviated
    /// while breaking the edge to j when that edge carried label j.
    pub per_player_breaks: Vec<Vec<usize>>,
}

impl RunOutcome {
    /// Length of the detected cycle in deviations.
    pub fn cycle_length(&self) -> Option<usize> {
        self.cycle.as_ref().map(|c| c.len() - 1)
    }

    /// The sequence of states visited, starting at the initial one.
    pub fn states(&self) -> Vec<Partition> {
        let mut v = Vec::with_capacity(self.trace.len() + 1);
        v.push(self.initial.clone());
        v.extend(self.trace.iter().map(|t| t.result.clone()));
        v
    }
}

/// Per-edge labels: the player whose move last built or broke the edge.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EdgeLabels {
    labels: Vec<Option<Player>>,
}

impl EdgeLabels {
    pub fn new(g: &Graph) -> Self {
        EdgeLabels {
            labels: vec![None; g.edges().len()],
        }
    }

    pub fn get(&self, g: &Graph, u: Player, v: Player) -> Option<Player> {
        g.edge_index(u, v).and_then(|e| self.labels[e])
    }

    fn set(&mut self, g: &Graph, u: Player, v: Player, label: Player) {
        let e = g.edge_index(u, v).expect("edge exists");
        self.labels[e] = Some(label);
    }

    /// (u, v, label) for every labeled edge.
    pub fn iter_labeled(&self, g: &Graph) -> Vec<(Player, Player, Player)> {
        self.labels
            .iter()
            .enumerate()
            .filter_map(|(e, l)| l.map(|p| (g.edges()[e].0, g.edges()[e].1, p)))
            .collect()
    }
}

/// A labeled run: the outcome plus the label state after every step.
#[derive(Debug, Clone)]
pub struct LabeledRun {
    pub outcome: RunOutcome,
    /// Final labels.
    pub labels: EdgeLabels,
    /// Labels after each step; index 0 is the unlabeled initial state.
    pub label_history: Vec<EdgeLabels>,
    /// The edge built by each step, as (mover, anchor member of the target).
    pub built_edges: Vec<(Player, Player)>,
}

struct Labeler {
    labels: EdgeLabels,
    history: Vec<EdgeLabels>,
    built: Vec<(Player, Player)>,
    breaks: Vec<Vec<usize>>,
}

impl Labeler {
    fn new(g: &Graph) -> Self {
        let labels = EdgeLabels::new(g);
        Labeler {
            history: vec![labels.clone()],
            labels,
            built: Vec::new(),
            breaks: vec![vec![0; g.n()]; g.n()],
        }
    }

    /// Applies the labeling rule for a move by `mover` from `own` into
    /// `target`: every edge the move breaks, and the edge it builds, gets
    /// the mover's label. Counts breaks of edges whose label equals the
    /// abandoned neighbor.
    fn record(&mut self, g: &Graph, pi: &Partition, d: &Deviation) {
        let mover = d.player;
        let own = pi.block_of(mover);
        let target = d
            .target
            .expect("go-alone moves cannot occur under locally additive separable preferences");
        let anchors = g.neighbors(mover).intersection(target);
        debug_assert_eq!(anchors.len(), 1, "trees admit exactly one anchor");
        let anchor = anchors.min_player().unwrap();
        for j in g.neighbors(mover).intersection(own).iter() {
            if self.labels.get(g, mover, j) == Some(j) {
                self.breaks[mover][j] += 1;
            }
            self.labels.set(g, mover, j, mover);
        }
        self.labels.set(g, mover, anchor, mover);
        self.built.push((mover, anchor));
        self.history.push(self.labels.clone());
    }
}

/// Runs the dynamics from `initial` under `scheduler`, stopping on
/// convergence, a repeated state, or after `max_steps` deviations.
pub fn run_dynamics(
    g: &Graph,
    profile: &PreferenceProfile,
    initial: &Partition,
    scheduler: &Scheduler,
    max_steps: usize,
) -> Result<RunOutcome, DynamicsError> {
    run_impl(g, profile, initial, scheduler, max_steps, None)
}

/// Labeled variant for trees with locally additive separable preferences.
/// Maintains edge labels step by step and counts labeled breaks.
pub fn run_tree_dynamics_labeled(
    g: &Graph,
    profile: &PreferenceProfile,
    initial: &Partition,
    scheduler: &Scheduler,
    max_steps: usize,
) -> Result<LabeledRun, DynamicsError> {
    if g.edges().len() != g.n() - 1 {
        return Err(DynamicsError::NotATree);
    }
    match crate::prefs::is_las(g, profile) {
        Ok(true) => {}
        Ok(false) => {
            return Err(DynamicsError::NotLas(
                "negative values or a positive value across a non-edge".into(),
            ))
        }
        Err(PrefsError::WrongKind) => {
            return Err(DynamicsError::NotLas("profile is ranked, not additive".into()))
        }
        Err(e) => return Err(e.into()),
    }
    let mut labeler = Labeler::new(g);
    let outcome = run_impl(g, profile, initial, scheduler, max_steps, Some(&mut labeler))?;
    Ok(LabeledRun {
        outcome,
        labels: labeler.labels,
        label_history: labeler.history,
        built_edges: labeler.built,
    })
}

fn resolve_script_step(
    pi: &Partition,
    step: &ScriptStep,
    index: usize,
) -> Result<Deviation, DynamicsError> {
    let target = match step.target {
        ScriptTarget::Alone => None,
        ScriptTarget::Block(set) => Some(set),
        ScriptTarget::BlockOf(member) => {
            if member >= pi.n() {
                return Err(DynamicsError::ScriptedDeviationInvalid {
                    step: index + 1,
                    reason: format!("target member {member} out of range"),
                });
            }
            Some(pi.block_of(member))
        }
    };
    Ok(Deviation {
        player: step.player,
        target,
    })
}

fn run_impl(
    g: &Graph,
    profile: &PreferenceProfile,
    initial: &Partition,
    scheduler: &Scheduler,
    max_steps: usize,
    mut labeler: Option<&mut Labeler>,
) -> Result<RunOutcome, DynamicsError> {
    if !initial.is_feasible(g) {
        return Err(DynamicsError::InvalidPartition(
            "initial partition has a disconnected or ill-formed coalition".into(),
        ));
    }
    let n = g.n();
    let mut rng = match scheduler {
        Scheduler::Random { seed } => Some(ChaCha8Rng::seed_from_u64(*seed)),
        _ => None,
    };
    let mut seen: HashMap<Partition, usize> = HashMap::new();
    let mut states: Vec<Partition> = vec![initial.clone()];
    seen.insert(initial.clone(), 0);

    let mut trace: Vec<TraceStep> = Vec::new();
    let mut counts = vec![0usize; n];
    let mut current = initial.clone();
    let mut script_pos = 0usize;

    let (status, cycle, cycle_start) = loop {
        let steps_done = trace.len();
        if steps_done >= max_steps {
            break (RunStatus::Truncated, None, None);
        }
        let chosen = match scheduler {
            Scheduler::Scripted(script) => {
                if script_pos >= script.len() {
                    let status = if find_is_deviations(g, profile, &current).is_empty() {
                        RunStatus::Converged
                    } else {
                        RunStatus::Truncated
                    };
                    break (status, None, None);
                }
                let d = resolve_script_step(&current, &script[script_pos], script_pos)?;
                check_deviation(g, profile, &current, &d).map_err(|reason| {
                    DynamicsError::ScriptedDeviationInvalid {
                        step: script_pos + 1,
                        reason,
                    }
                })?;
                script_pos += 1;
                d
            }
            _ => {
                let devs = find_is_deviations(g, profile, &current);
                if devs.is_empty() {
                    break (RunStatus::Converged, None, None);
                }
                match scheduler {
                    Scheduler::First => devs[0],
                    Scheduler::Random { .. } => {
                        let r = rng.as_mut().expect("rng present for Random");
                        devs[r.gen_range(0..devs.len())]
                    }
                    Scheduler::BestResponse => {
                        let mover = devs[0].player;
                        let mut best = devs[0];
                        for d in devs.iter().skip(1).take_while(|d| d.player == mover) {
                            if profile.compare_unchecked(mover, d.joined(), best.joined())
                                == Comparison::Prefer
                            {
                                best = *d;
                            }
                        }
                        best
                    }
                    Scheduler::Scripted(_) => unreachable!(),
                }
            }
        };

        if let Some(l) = labeler.as_deref_mut() {
            l.record(g, &current, &chosen);
        }
        let next = apply_unchecked(g, &current, &chosen);
        counts[chosen.player] += 1;
        trace.push(TraceStep {
            step: trace.len() + 1,
            player: chosen.player,
            from: current.block_of(chosen.player),
            to: chosen.target,
            result: next.clone(),
        });
        states.push(next.clone());

        if let Some(&first) = seen.get(&next) {
            let cycle: Vec<Partition> = states[first..].to_vec();
            break (RunStatus::CycleDetected, Some(cycle), Some(first));
        }
        seen.insert(next.clone(), states.len() - 1);
        current = next;
    };

    let final_partition = states.last().cloned().unwrap_or_else(|| initial.clone());
    Ok(RunOutcome {
        status,
        steps: trace.len(),
        initial: initial.clone(),
        final_partition,
        trace,
        cycle,
        cycle_start,
        per_player_counts: counts,
        per_player_breaks: labeler
            .map(|l| l.breaks.clone())
            .unwrap_or_else(|| vec![vec![0; n]; n]),
    })
}

/// The three moves possible on a star.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum StarDeviationKind {
    /// The center joins a leaf's singleton coalition.
    CenterToLeaf,
    /// A leaf joins the coalition containing the center.
    LeafToCentral,
    GoAlone,
}

/// Classifies a structurally valid deviation on a star-shaped graph.
pub fn classify_star_deviation(
    g: &Graph,
    pi: &Partition,
    d: &Deviation,
) -> Result<StarDeviationKind, DynamicsError> {
    let center = star_center(g).ok_or(DynamicsError::NotAStar)?;
    check_deviation_shape(g, pi, d).map_err(|reason| DynamicsError::InvalidDeviation {
        player: d.player,
        reason,
    })?;
    Ok(match d.target {
        None => StarDeviationKind::GoAlone,
        Some(t) => {
            if d.player == center {
                debug_assert_eq!(t.len(), 1, "non-central coalitions on a star are singletons");
                StarDeviationKind::CenterToLeaf
            } else {
                debug_assert!(t.contains(center));
                StarDeviationKind::LeafToCentral
            }
        }
    })
}
