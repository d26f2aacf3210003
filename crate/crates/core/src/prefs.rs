//! Player preferences over feasible coalitions.
//!
//! Two representations:
//! - [`RankedPreference`]: an ordered list of tiers (best first), each tier a
//!   set of coalitions the player is indifferent between. Coalitions not
//!   listed anywhere sit at the `default_tier` index, so sparse inputs stay
//!   sparse (the usual choice is the tier of the player's singleton).
//! - [`AdditiveValuation`]: an n x n matrix of exact rationals; the utility
//!   of a coalition is the sum of the values of its other members, and a
//!   player alone has utility 0.
//!
//! Comparisons are exact in both representations. Indifference is decidable,
//! which the deviation enumeration in `dynamics` depends on; this is why the
//! additive values are rationals and not floats.

use std::collections::HashMap;

use num_rational::Rational64;
use num_traits::Zero;
use thiserror::Error;

use crate::graph::{
    enumerate_feasible_coalitions_with_cap, is_connected_subset, Graph, GraphError, Player,
    PlayerSet, DEFAULT_COALITION_CAP,
};

/// Outcome of comparing coalition `s` against coalition `t` for a player.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Comparison {
    /// `s` is strictly better than `t`.
    Prefer,
    Indifferent,
    /// `s` is strictly worse than `t`.
    Disprefer,
}

impl Comparison {
    /// Weak preference: `s` at least as good as `t`.
    pub fn at_least(self) -> bool {
        !matches!(self, Comparison::Disprefer)
    }

    pub fn flip(self) -> Self {
        match self {
            Comparison::Prefer => Comparison::Disprefer,
            Comparison::Disprefer => Comparison::Prefer,
            Comparison::Indifferent => Comparison::Indifferent,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum PrefsError {
    #[error("player {0} is not a member of coalition {1:?}")]
    PlayerNotMember(Player, PlayerSet),
    #[error("coalition {0:?} is not feasible (not connected in the graph)")]
    InfeasibleCoalition(PlayerSet),
    #[error("operation requires additive valuations, profile is ranked")]
    WrongKind,
    #[error("profile covers {got} players, graph has {want}")]
    WrongPlayerCount { got: usize, want: usize },
    #[error("player {player}: listed coalition {set:?} is not feasible for them")]
    ListedCoalitionInfeasible { player: Player, set: PlayerSet },
    #[error("player {player}: coalition {set:?} is listed in more than one tier")]
    DuplicateListedCoalition { player: Player, set: PlayerSet },
    #[error("player {player}: default tier {tier} out of range ({count} tiers)")]
    DefaultTierOutOfRange {
        player: Player,
        tier: usize,
        count: usize,
    },
    #[error("valuation matrix must be {n}x{n}")]
    BadMatrixShape { n: usize },
    #[error("self-valuation of player {0} must be zero")]
    NonZeroSelfValue(Player),
    #[error(transparent)]
    Graph(#[from] GraphError),
}

/// One player's ranked preference: tiers best-first, plus the tier at which
/// every unlisted feasible coalition sits.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RankedPreference {
    tiers: Vec<Vec<PlayerSet>>,
    default_tier: usize,
    rank_of: HashMap<u64, usize>,
}

impl RankedPreference {
    /// Builds from explicit tiers. Tiers may be empty (useful as a default
    /// slot between listed tiers). Duplicate listings are rejected.
    pub fn new(tiers: Vec<Vec<PlayerSet>>, default_tier: usize) -> Result<Self, PrefsError> {
        let mut rank_of = HashMap::new();
        for (rank, tier) in tiers.iter().enumerate() {
            for &set in tier {
                if rank_of.insert(set.mask(), rank).is_some() {
                    return Err(PrefsError::DuplicateListedCoalition { player: 0, set });
                }
            }
        }
        if default_tier >= tiers.len() {
            return Err(PrefsError::DefaultTierOutOfRange {
                player: 0,
                tier: default_tier,
                count: tiers.len(),
            });
        }
        Ok(RankedPreference {
            tiers,
            default_tier,
            rank_of,
        })
    }

    /// Tier index of a coalition; lower is better.
    pub fn rank(&self, set: PlayerSet) -> usize {
        self.rank_of
            .get(&set.mask())
            .copied()
            .unwrap_or(self.default_tier)
    }

    pub fn tiers(&self) -> &[Vec<PlayerSet>] {
        &self.tiers
    }

    pub fn default_tier(&self) -> usize {
        self.default_tier
    }
}

/// Exact additive valuations: `values[i][j]` is what player i assigns to
/// having j in their coalition. The diagonal is zero.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AdditiveValuation {
    values: Vec<Vec<Rational64>>,
}

impl AdditiveValuation {
    pub fn new(values: Vec<Vec<Rational64>>) -> Result<Self, PrefsError> {
        let n = values.len();
        if values.iter().any(|row| row.len() != n) {
            return Err(PrefsError::BadMatrixShape { n });
        }
        for (i, row) in values.iter().enumerate() {
            if !row[i].is_zero() {
                return Err(PrefsError::NonZeroSelfValue(i));
            }
        }
        Ok(AdditiveValuation { values })
    }

    /// Convenience constructor from integer values.
    pub fn from_ints(values: Vec<Vec<i64>>) -> Result<Self, PrefsError> {
        Self::new(
            values
                .into_iter()
                .map(|row| row.into_iter().map(Rational64::from_integer).collect())
                .collect(),
        )
    }

    pub fn n_players(&self) -> usize {
        self.values.len()
    }

    pub fn value(&self, i: Player, j: Player) -> Rational64 {
        self.values[i][j]
    }

    pub fn rows(&self) -> &[Vec<Rational64>] {
        &self.values
    }

    /// Sum of i's values over the other members of `set`. A player alone has
    /// utility zero.
    pub fn utility(&self, i: Player, set: PlayerSet) -> Rational64 {
        let mut u = Rational64::zero();
        for j in set.iter() {
            if j != i {
                u += self.values[i][j];
            }
        }
        u
    }
}

/// A full preference profile, one entry per player.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum PreferenceProfile {
    Ranked(Vec<RankedPreference>),
    Additive(AdditiveValuation),
}

impl PreferenceProfile {
    pub fn n_players(&self) -> usize {
        match self {
            PreferenceProfile::Ranked(ps) => ps.len(),
            PreferenceProfile::Additive(v) => v.n_players(),
        }
    }

    pub fn is_additive(&self) -> bool {
        matches!(self, PreferenceProfile::Additive(_))
    }

    /// Checks the profile is well-formed for `g`: matching player count, and
    /// for ranked profiles every listed coalition is feasible for its player.
    pub fn validate(&self, g: &Graph) -> Result<(), PrefsError> {
        if self.n_players() != g.n() {
            return Err(PrefsError::WrongPlayerCount {
                got: self.n_players(),
                want: g.n(),
            });
        }
        if let PreferenceProfile::Ranked(ps) = self {
            for (i, p) in ps.iter().enumerate() {
                for tier in p.tiers() {
                    for &set in tier {
                        if !set.contains(i) || !is_connected_subset(g, set)? {
                            return Err(PrefsError::ListedCoalitionInfeasible { player: i, set });
                        }
                    }
                }
            }
        }
        Ok(())
    }

    /// Compares `s` against `t` for player `i`, after checking that `i`
    /// belongs to both and both are feasible.
    pub fn compare(
        &self,
        g: &Graph,
        i: Player,
        s: PlayerSet,
        t: PlayerSet,
    ) -> Result<Comparison, PrefsError> {
        if !s.contains(i) {
            return Err(PrefsError::PlayerNotMember(i, s));
        }
        if !t.contains(i) {
            return Err(PrefsError::PlayerNotMember(i, t));
        }
        if !is_connected_subset(g, s)? {
            return Err(PrefsError::InfeasibleCoalition(s));
        }
        if !is_connected_subset(g, t)? {
            return Err(PrefsError::InfeasibleCoalition(t));
        }
        Ok(self.compare_unchecked(i, s, t))
    }

    /// Comparison without membership/feasibility checks. Callers must ensure
    /// `i` is in both sets and both are feasible; the dynamics hot path does
    /// this by construction.
    pub fn compare_unchecked(&self, i: Player, s: PlayerSet, t: PlayerSet) -> Comparison {
        match self {
            PreferenceProfile::Ranked(ps) => {
                let (rs, rt) = (ps[i].rank(s), ps[i].rank(t));
                // lower tier index is better
                match rs.cmp(&rt) {
                    std::cmp::Ordering::Less => Comparison::Prefer,
                    std::cmp::Ordering::Equal => Comparison::Indifferent,
                    std::cmp::Ordering::Greater => Comparison::Disprefer,
                }
            }
            PreferenceProfile::Additive(v) => {
                let (us, ut) = (v.utility(i, s), v.utility(i, t));
                match us.cmp(&ut) {
                    std::cmp::Ordering::Greater => Comparison::Prefer,
                    std::cmp::Ordering::Equal => Comparison::Indifferent,
                    std::cmp::Ordering::Less => Comparison::Disprefer,
                }
            }
        }
    }
}

/// Whether every player weakly prefers every feasible coalition to being
/// alone. Enumerates each player's feasible coalitions; refuses graphs
/// beyond the enumeration cap instead of sampling.
pub fn is_individually_rational(g: &Graph, profile: &PreferenceProfile) -> Result<bool, PrefsError> {
    is_individually_rational_with_cap(g, profile, DEFAULT_COALITION_CAP)
}

pub fn is_individually_rational_with_cap(
    g: &Graph,
    profile: &PreferenceProfile,
    cap: usize,
) -> Result<bool, PrefsError> {
    for i in g.players() {
        let own = PlayerSet::singleton(i);
        for s in enumerate_feasible_coalitions_with_cap(g, i, cap)? {
            if !profile.compare_unchecked(i, s, own).at_least() {
                return Ok(false);
            }
        }
    }
    Ok(true)
}

/// Whether every player weakly prefers supersets: for all feasible T ⊆ S
/// containing the player, S is at least as good as T.
pub fn is_monotone(g: &Graph, profile: &PreferenceProfile) -> Result<bool, PrefsError> {
    is_monotone_with_cap(g, profile, DEFAULT_COALITION_CAP)
}

pub fn is_monotone_with_cap(
    g: &Graph,
    profile: &PreferenceProfile,
    cap: usize,
) -> Result<bool, PrefsError> {
    for i in g.players() {
        let sets = enumerate_feasible_coalitions_with_cap(g, i, cap)?;
        // sets are ordered by size, so subsets of sets[b] appear before it
        for (bi, &big) in sets.iter().enumerate() {
            for &small in &sets[..bi] {
                if small.is_subset_of(big) && !profile.compare_unchecked(i, big, small).at_least()
                {
                    return Ok(false);
                }
            }
        }
    }
    Ok(true)
}

/// Whether the profile is additive with non-negative values that are
/// positive only across edges of the graph. Errors with `WrongKind` on
/// ranked profiles.
pub fn is_las(g: &Graph, profile: &PreferenceProfile) -> Result<bool, PrefsError> {
    let v = match profile {
        PreferenceProfile::Additive(v) => v,
        PreferenceProfile::Ranked(_) => return Err(PrefsError::WrongKind),
    };
    for i in g.players() {
        for j in g.players() {
            if i == j {
                continue;
            }
            let val = v.value(i, j);
            if val < Rational64::zero() {
                return Ok(false);
            }
            if val > Rational64::zero() && !g.has_edge(i, j) {
                return Ok(false);
            }
        }
    }
    Ok(true)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::build_graph;

    fn s(xs: &[usize]) -> PlayerSet {
        xs.iter().copied().collect()
    }

    fn triangle() -> Graph {
        build_graph(3, &[(0, 1), (1, 2), (0, 2)]).unwrap()
    }

    fn triangle_vals() -> PreferenceProfile {
        // 0 values 1, 1 values 2, 2 values 0
        PreferenceProfile::Additive(
            AdditiveValuation::from_ints(vec![
                vec![0, 1, 0],
                vec![0, 0, 1],
                vec![1, 0, 0],
            ])
            .unwrap(),
        )
    }

    #[test]
    fn unlisted_coalitions_sit_at_the_default_tier() {
        // tiers: [{0,1}] > [{0}], everything else tied with the singleton
        let p = RankedPreference::new(vec![vec![s(&[0, 1])], vec![s(&[0])]], 1).unwrap();
        assert_eq!(p.rank(s(&[0, 1])), 0);
        assert_eq!(p.rank(s(&[0])), 1);
        assert_eq!(p.rank(s(&[0, 2])), 1);
        assert_eq!(p.rank(s(&[0, 1, 2])), 1);
    }

    #[test]
    fn duplicate_listing_rejected() {
        let err = RankedPreference::new(vec![vec![s(&[0, 1])], vec![s(&[0, 1])]], 0);
        assert!(matches!(
            err,
            Err(PrefsError::DuplicateListedCoalition { .. })
        ));
    }

    #[test]
    fn default_tier_must_exist() {
        assert!(matches!(
            RankedPreference::new(vec![vec![s(&[0])]], 1),
            Err(PrefsError::DefaultTierOutOfRange { .. })
        ));
    }

    #[test]
    fn compare_checks_membership_and_feasibility() {
        let g = build_graph(3, &[(0, 1), (1, 2)]).unwrap();
        let prof = triangle_vals();
        assert_eq!(
            prof.compare(&g, 0, s(&[1, 2]), s(&[0])),
            Err(PrefsError::PlayerNotMember(0, s(&[1, 2])))
        );
        // {0,2} is disconnected on the 3-path
        assert_eq!(
            prof.compare(&g, 0, s(&[0, 2]), s(&[0])),
            Err(PrefsError::InfeasibleCoalition(s(&[0, 2])))
        );
        assert_eq!(
            prof.compare(&g, 0, s(&[0, 1]), s(&[0])),
            Ok(Comparison::Prefer)
        );
    }

    #[test]
    fn additive_utility_sums_other_members() {
        let v = AdditiveValuation::new(vec![
            vec![0.into(), Rational64::new(1, 2), 2.into()],
            vec![0.into(), 0.into(), 0.into()],
            vec![0.into(), 0.into(), 0.into()],
        ])
        .unwrap();
        assert_eq!(v.utility(0, s(&[0])), Rational64::zero());
        assert_eq!(v.utility(0, s(&[0, 1])), Rational64::new(1, 2));
        assert_eq!(v.utility(0, s(&[0, 1, 2])), Rational64::new(5, 2));
    }

    #[test]
    fn self_value_must_be_zero() {
        assert!(matches!(
            AdditiveValuation::from_ints(vec![vec![1, 0], vec![0, 0]]),
            Err(PrefsError::NonZeroSelfValue(0))
        ));
    }

    #[test]
    fn validate_rejects_infeasible_listing() {
        let g = build_graph(3, &[(0, 1), (1, 2)]).unwrap();
        // {0,2} is not connected, and {1,2} does not contain player 0
        for bad in [s(&[0, 2]), s(&[1, 2])] {
            let prof = PreferenceProfile::Ranked(vec![
                RankedPreference::new(vec![vec![bad], vec![s(&[0])]], 1).unwrap(),
                RankedPreference::new(vec![vec![s(&[1])]], 0).unwrap(),
                RankedPreference::new(vec![vec![s(&[2])]], 0).unwrap(),
            ]);
            assert!(matches!(
                prof.validate(&g),
                Err(PrefsError::ListedCoalitionInfeasible { player: 0, .. })
            ));
        }
    }

    #[test]
    fn class_predicates_on_the_triangle_values() {
        let g = triangle();
        let prof = triangle_vals();
        assert_eq!(is_las(&g, &prof), Ok(true));
        assert_eq!(is_monotone(&g, &prof), Ok(true));
        assert_eq!(is_individually_rational(&g, &prof), Ok(true));
    }

    #[test]
    fn negative_value_breaks_las_and_monotonicity() {
        let g = triangle();
        let prof = PreferenceProfile::Additive(
            AdditiveValuation::from_ints(vec![
                vec![0, -1, 0],
                vec![0, 0, 0],
                vec![0, 0, 0],
            ])
            .unwrap(),
        );
        assert_eq!(is_las(&g, &prof), Ok(false));
        assert_eq!(is_monotone(&g, &prof), Ok(false));
        assert_eq!(is_individually_rational(&g, &prof), Ok(false));
    }

    #[test]
    fn positive_value_for_non_neighbor_is_not_las() {
        let g = build_graph(3, &[(0, 1), (1, 2)]).unwrap();
        let prof = PreferenceProfile::Additive(
            AdditiveValuation::from_ints(vec![
                vec![0, 0, 1],
                vec![0, 0, 0],
                vec![0, 0, 0],
            ])
            .unwrap(),
        );
        assert_eq!(is_las(&g, &prof), Ok(false));
        // still monotone: all values non-negative
        assert_eq!(is_monotone(&g, &prof), Ok(true));
    }

    #[test]
    fn las_check_rejects_ranked_profiles() {
        let g = triangle();
        let prof = PreferenceProfile::Ranked(vec![
            RankedPreference::new(vec![vec![s(&[0])]], 0).unwrap(),
            RankedPreference::new(vec![vec![s(&[1])]], 0).unwrap(),
            RankedPreference::new(vec![vec![s(&[2])]], 0).unwrap(),
        ]);
        assert_eq!(is_las(&g, &prof), Err(PrefsError::WrongKind));
    }

    #[test]
    fn ir_detects_singleton_strictly_above_some_coalition() {
        let g = triangle();
        // player 0 ranks {0,2} strictly below alone
        let prof = PreferenceProfile::Ranked(vec![
            RankedPreference::new(vec![vec![s(&[0])], vec![s(&[0, 2])]], 0).unwrap(),
            RankedPreference::new(vec![vec![s(&[1])]], 0).unwrap(),
            RankedPreference::new(vec![vec![s(&[2])]], 0).unwrap(),
        ]);
        assert_eq!(is_individually_rational(&g, &prof), Ok(false));
    }

    #[test]
    fn predicates_refuse_beyond_cap() {
        let g = triangle();
        let prof = triangle_vals();
        assert!(matches!(
            is_monotone_with_cap(&g, &prof, 2),
            Err(PrefsError::Graph(GraphError::EnumerationTooLarge { .. }))
        ));
    }
}
