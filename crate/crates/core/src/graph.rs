//! Undirected connected graphs over players 0..n-1 and the coalition
//! geometry they induce: a coalition is feasible iff it spans a connected
//! induced subgraph.
//!
//! Players are plain indices; coalitions are bitsets. Everything here is
//! deterministic: component lists come out ordered by smallest member,
//! coalition enumerations by size then lexicographic member list.

use std::cmp::Ordering;
use std::fmt;

use thiserror::Error;

/// A player is an index in 0..n.
pub type Player = usize;

/// Hard capacity of the bitset representation.
pub const MAX_PLAYERS: usize = 64;

/// Default cap on `n` for per-player coalition enumeration. Connected-set
/// enumeration is output-sensitive but the output itself is exponential in
/// dense graphs, so callers must opt in beyond this.
pub const DEFAULT_COALITION_CAP: usize = 24;

/// Errors for graph construction and set queries.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum GraphError {
    #[error("graph must have at least 2 players, got {0}")]
    TooFewPlayers(usize),
    #[error("graph has {0} players, the bitset representation supports at most {MAX_PLAYERS}")]
    TooManyPlayers(usize),
    #[error("edge ({0}, {1}) is out of range or duplicated")]
    InvalidEdge(usize, usize),
    #[error("self-loop at player {0}")]
    SelfLoop(usize),
    #[error("graph is not connected")]
    DisconnectedGraph,
    #[error("the empty set has no connectivity status")]
    EmptySet,
    #[error("player {0} is out of range (n = {1})")]
    PlayerOutOfRange(usize, usize),
    #[error("set contains players outside 0..{0}")]
    SetOutOfRange(usize),
    #[error("enumeration refused: n = {n} exceeds the cap {cap}")]
    EnumerationTooLarge { n: usize, cap: usize },
    #[error("labels: {0}")]
    BadLabels(String),
}

/// A set of players, stored as a 64-bit mask.
#[derive(Clone, Copy, PartialEq, Eq, Hash, Default)]
pub struct PlayerSet(u64);

impl PlayerSet {
    pub const EMPTY: PlayerSet = PlayerSet(0);

    pub fn singleton(i: Player) -> Self {
        debug_assert!(i < MAX_PLAYERS);
        PlayerSet(1u64 << i)
    }

    /// All players 0..n.
    pub fn full(n: usize) -> Self {
        debug_assert!(n <= MAX_PLAYERS);
        if n == MAX_PLAYERS {
            PlayerSet(u64::MAX)
        } else {
            PlayerSet((1u64 << n) - 1)
        }
    }

    pub fn from_mask(mask: u64) -> Self {
        PlayerSet(mask)
    }

    pub fn mask(self) -> u64 {
        self.0
    }

    pub fn is_empty(self) -> bool {
        self.0 == 0
    }

    pub fn len(self) -> usize {
        self.0.count_ones() as usize
    }

    pub fn contains(self, i: Player) -> bool {
        i < MAX_PLAYERS && self.0 & (1u64 << i) != 0
    }

    #[must_use]
    pub fn with(self, i: Player) -> Self {
        debug_assert!(i < MAX_PLAYERS);
        PlayerSet(self.0 | (1u64 << i))
    }

    #[must_use]
    pub fn without(self, i: Player) -> Self {
        PlayerSet(self.0 & !(1u64 << i))
    }

    pub fn insert(&mut self, i: Player) {
        *self = self.with(i);
    }

    pub fn remove(&mut self, i: Player) {
        *self = self.without(i);
    }

    /// Smallest member, if any.
    pub fn min_player(self) -> Option<Player> {
        if self.0 == 0 {
            None
        } else {
            Some(self.0.trailing_zeros() as Player)
        }
    }

    pub fn union(self, other: Self) -> Self {
        PlayerSet(self.0 | other.0)
    }

    pub fn intersection(self, other: Self) -> Self {
        PlayerSet(self.0 & other.0)
    }

    pub fn difference(self, other: Self) -> Self {
        PlayerSet(self.0 & !other.0)
    }

    pub fn is_subset_of(self, other: Self) -> bool {
        self.0 & !other.0 == 0
    }

    pub fn is_disjoint_from(self, other: Self) -> bool {
        self.0 & other.0 == 0
    }

    /// Members in ascending order.
    pub fn iter(self) -> impl Iterator<Item = Player> {
        let mut rest = self.0;
        std::iter::from_fn(move || {
            if rest == 0 {
                None
            } else {
                let i = rest.trailing_zeros() as Player;
                rest &= rest - 1;
                Some(i)
            }
        })
    }

    pub fn to_vec(self) -> Vec<Player> {
        self.iter().collect()
    }
}

impl FromIterator<Player> for PlayerSet {
    fn from_iter<T: IntoIterator<Item = Player>>(iter: T) -> Self {
        let mut s = PlayerSet::EMPTY;
        for i in iter {
            s.insert(i);
        }
        s
    }
}

/// Lexicographic order on the ascending member list, so {0,2} < {1}, and
/// {0} < {0,1}. This is NOT the numeric order of the masks.
impl Ord for PlayerSet {
    fn cmp(&self, other: &Self) -> Ordering {
        let (mut a, mut b) = (self.0, other.0);
        loop {
            match (a, b) {
                (0, 0) => return Ordering::Equal,
                (0, _) => return Ordering::Less,
                (_, 0) => return Ordering::Greater,
                _ => {
                    let (x, y) = (a.trailing_zeros(), b.trailing_zeros());
                    match x.cmp(&y) {
                        Ordering::Equal => {
                            a &= a - 1;
                            b &= b - 1;
                        }
                        ord => return ord,
                    }
                }
            }
        }
    }
}

impl PartialOrd for PlayerSet {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Debug for PlayerSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{{")?;
        for (k, i) in self.iter().enumerate() {
            if k > 0 {
                write!(f, ",")?;
            }
            write!(f, "{i}")?;
        }
        write!(f, "}}")
    }
}

/// Order used when listing feasible coalitions: smaller sets first, ties by
/// lexicographic member list.
pub fn size_lex_cmp(a: &PlayerSet, b: &PlayerSet) -> Ordering {
    a.len().cmp(&b.len()).then_with(|| a.cmp(b))
}

/// Structural class of a graph, most specific first. A 2-node graph counts
/// as a path; a 3-node path is reported as a path even though it is also a
/// star.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, serde::Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Topology {
    Path,
    Star,
    Cycle,
    Tree,
    General,
}

/// A connected simple graph on players 0..n-1.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Graph {
    n: usize,
    adj: Vec<PlayerSet>,
    edges: Vec<(Player, Player)>,
    labels: Option<Vec<String>>,
}

/// Validates and builds a graph: 2..=64 players, edges in range, no
/// self-loops or duplicates, connected as a whole.
pub fn build_graph(n: usize, edge_list: &[(usize, usize)]) -> Result<Graph, GraphError> {
    if n < 2 {
        return Err(GraphError::TooFewPlayers(n));
    }
    if n > MAX_PLAYERS {
        return Err(GraphError::TooManyPlayers(n));
    }
    let mut adj = vec![PlayerSet::EMPTY; n];
    let mut edges = Vec::with_capacity(edge_list.len());
    for &(u, v) in edge_list {
        if u == v {
            return Err(GraphError::SelfLoop(u));
        }
        if u >= n || v >= n {
            return Err(GraphError::InvalidEdge(u, v));
        }
        let (a, b) = if u < v { (u, v) } else { (v, u) };
        if adj[a].contains(b) {
            return Err(GraphError::InvalidEdge(u, v));
        }
        adj[a].insert(b);
        adj[b].insert(a);
        edges.push((a, b));
    }
    edges.sort_unstable();
    let g = Graph {
        n,
        adj,
        edges,
        labels: None,
    };
    if !connected_in(&g, PlayerSet::full(n)) {
        return Err(GraphError::DisconnectedGraph);
    }
    Ok(g)
}

impl Graph {
    pub fn n(&self) -> usize {
        self.n
    }

    pub fn players(&self) -> impl Iterator<Item = Player> {
        0..self.n
    }

    pub fn all_players(&self) -> PlayerSet {
        PlayerSet::full(self.n)
    }

    /// Neighbor set of `i`.
    pub fn neighbors(&self, i: Player) -> PlayerSet {
        self.adj[i]
    }

    pub fn degree(&self, i: Player) -> usize {
        self.adj[i].len()
    }

    /// Edges as (u, v) with u < v, sorted.
    pub fn edges(&self) -> &[(Player, Player)] {
        &self.edges
    }

    pub fn has_edge(&self, u: Player, v: Player) -> bool {
        u < self.n && self.adj[u].contains(v)
    }

    /// Index of edge (u, v) in `edges()`, if present.
    pub fn edge_index(&self, u: Player, v: Player) -> Option<usize> {
        let key = if u < v { (u, v) } else { (v, u) };
        self.edges.binary_search(&key).ok()
    }

    /// Attaches display labels; must be `n` distinct non-empty strings.
    pub fn with_labels(mut self, labels: Vec<String>) -> Result<Self, GraphError> {
        if labels.len() != self.n {
            return Err(GraphError::BadLabels(format!(
                "expected {} labels, got {}",
                self.n,
                labels.len()
            )));
        }
        for (i, l) in labels.iter().enumerate() {
            if l.is_empty() {
                return Err(GraphError::BadLabels(format!("label {i} is empty")));
            }
            if labels[..i].contains(l) {
                return Err(GraphError::BadLabels(format!("duplicate label '{l}'")));
            }
        }
        self.labels = Some(labels);
        Ok(self)
    }

    pub fn labels(&self) -> Option<&[String]> {
        self.labels.as_deref()
    }

    /// Display name of a player: its label if labels are attached, else the
    /// index in decimal.
    pub fn player_name(&self, i: Player) -> String {
        match &self.labels {
            Some(ls) => ls[i].clone(),
            None => i.to_string(),
        }
    }

    /// Player with the given label, if labels are attached.
    pub fn player_by_label(&self, label: &str) -> Option<Player> {
        self.labels
            .as_ref()
            .and_then(|ls| ls.iter().position(|l| l == label))
    }

    /// Renders a set as `{a,c,d}` using player names.
    pub fn set_name(&self, s: PlayerSet) -> String {
        let mut out = String::from("{");
        for (k, i) in s.iter().enumerate() {
            if k > 0 {
                out.push(',');
            }
            out.push_str(&self.player_name(i));
        }
        out.push('}');
        out
    }
}

/// Flood fill inside `within` starting from its smallest member; returns the
/// reached subset. `within` must be non-empty.
fn component_of_min(g: &Graph, within: PlayerSet) -> PlayerSet {
    let start = within.min_player().expect("non-empty set");
    let mut reached = PlayerSet::singleton(start);
    let mut frontier = reached;
    while !frontier.is_empty() {
        let mut next = PlayerSet::EMPTY;
        for v in frontier.iter() {
            next = next.union(g.adj[v].intersection(within).difference(reached));
        }
        reached = reached.union(next);
        frontier = next;
    }
    reached
}

fn connected_in(g: &Graph, set: PlayerSet) -> bool {
    component_of_min(g, set) == set
}

/// Whether the non-empty `set` induces a connected subgraph.
pub fn is_connected_subset(g: &Graph, set: PlayerSet) -> Result<bool, GraphError> {
    if set.is_empty() {
        return Err(GraphError::EmptySet);
    }
    if !set.is_subset_of(g.all_players()) {
        return Err(GraphError::SetOutOfRange(g.n));
    }
    Ok(connected_in(g, set))
}

/// Inclusion-maximal connected subsets of `set`, in ascending order of their
/// smallest member. The empty set yields no components.
pub fn maximal_connected_components(g: &Graph, set: PlayerSet) -> Vec<PlayerSet> {
    debug_assert!(set.is_subset_of(g.all_players()));
    let mut rest = set;
    let mut out = Vec::new();
    while !rest.is_empty() {
        let comp = component_of_min(g, rest);
        rest = rest.difference(comp);
        out.push(comp);
    }
    out
}

/// Most specific structural class. Checked in the order path, star, cycle,
/// tree, so the 3-path is a path and the 3-cycle a cycle.
pub fn classify_topology(g: &Graph) -> Topology {
    let n = g.n;
    let m = g.edges.len();
    let max_deg = (0..n).map(|i| g.degree(i)).max().unwrap_or(0);
    if m == n - 1 && max_deg <= 2 {
        return Topology::Path;
    }
    if m == n - 1 && max_deg == n - 1 {
        return Topology::Star;
    }
    if m == n && (0..n).all(|i| g.degree(i) == 2) {
        return Topology::Cycle;
    }
    if m == n - 1 {
        return Topology::Tree;
    }
    Topology::General
}

/// Center of a star-shaped graph: the vertex adjacent to all others, when
/// the graph is a tree. For n = 2 both ends qualify and player 0 is
/// returned. None when the graph is not star-shaped.
pub fn star_center(g: &Graph) -> Option<Player> {
    if g.edges.len() != g.n - 1 {
        return None;
    }
    (0..g.n).find(|&i| g.degree(i) == g.n - 1)
}

/// All feasible coalitions containing `i` (connected induced subgraphs),
/// ordered by size then lexicographic member list. Refuses graphs larger
/// than `DEFAULT_COALITION_CAP` players; use the `_with_cap` variant to
/// override.
pub fn enumerate_feasible_coalitions(g: &Graph, i: Player) -> Result<Vec<PlayerSet>, GraphError> {
    enumerate_feasible_coalitions_with_cap(g, i, DEFAULT_COALITION_CAP)
}

/// As `enumerate_feasible_coalitions` with an explicit cap on `n`.
pub fn enumerate_feasible_coalitions_with_cap(
    g: &Graph,
    i: Player,
    cap: usize,
) -> Result<Vec<PlayerSet>, GraphError> {
    if i >= g.n {
        return Err(GraphError::PlayerOutOfRange(i, g.n));
    }
    if g.n > cap {
        return Err(GraphError::EnumerationTooLarge { n: g.n, cap });
    }
    let mut out = Vec::new();
    connected_supersets(g, i, g.all_players(), &mut |s| out.push(s));
    out.sort_unstable_by(size_lex_cmp);
    Ok(out)
}

/// Enumerates every connected subset of `allowed` that contains `seed`,
/// each exactly once, calling `emit` on each. Standard grow-and-ban scheme:
/// a set is extended through its frontier in ascending order, and each
/// frontier vertex is banned for the later branches so no set is produced
/// twice.
pub(crate) fn connected_supersets(
    g: &Graph,
    seed: Player,
    allowed: PlayerSet,
    emit: &mut impl FnMut(PlayerSet),
) {
    debug_assert!(allowed.contains(seed));
    let start = PlayerSet::singleton(seed);
    let frontier = g.adj[seed].intersection(allowed);
    grow(g, allowed, start, frontier, PlayerSet::EMPTY, emit);
}

fn grow(
    g: &Graph,
    allowed: PlayerSet,
    set: PlayerSet,
    frontier: PlayerSet,
    banned: PlayerSet,
    emit: &mut impl FnMut(PlayerSet),
) {
    emit(set);
    let mut banned = banned;
    for v in frontier.iter() {
        let next_set = set.with(v);
        let grown = g.adj[v]
            .intersection(allowed)
            .difference(next_set)
            .difference(banned);
        let next_frontier = frontier.difference(banned).without(v).union(grown);
        grow(g, allowed, next_set, next_frontier, banned, emit);
        banned.insert(v);
    }
}
