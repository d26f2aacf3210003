//! Catalog of instances with known dynamics.
//!
//! Each entry bundles a graph, a preference profile, a starting partition
//! and (usually) a deviation script that drives the run to a known outcome:
//! either a cycle of moves that repeats forever, or convergence after an
//! exactly predictable number of deviations. Parameterized families are
//! addressed as `name:<param>`, e.g. `cycle_n:6` or `tree_exponential:4`.
//!
//! The module also provides [`RootedTree`] and [`tree_deviation_bound`],
//! which compute a per-player upper bound on deviation counts for labeled
//! runs on trees under additive edge valuations.

use crate::dynamics::{Partition, RunStatus, ScriptStep};
use crate::graph::{build_graph, Graph, GraphError, Player, PlayerSet};
use crate::prefs::{AdditiveValuation, PreferenceProfile, PrefsError, RankedPreference};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum ExamplesError {
    #[error("unknown example `{0}`")]
    UnknownExample(String),
    #[error("bad parameter for `{name}`: {reason}")]
    BadParameter { name: String, reason: String },
    #[error("graph is not a tree")]
    NotATree,
    #[error("player {claimed} is not on the path from {of} to the root")]
    NotAnAncestor { of: Player, claimed: Player },
    #[error(transparent)]
    Graph(#[from] GraphError),
    #[error(transparent)]
    Prefs(#[from] PrefsError),
}

/// A ready-to-run instance from the catalog.
#[derive(Debug, Clone)]
pub struct ExampleInstance {
    pub name: String,
    pub graph: Graph,
    pub profile: PreferenceProfile,
    pub initial: Partition,
    /// Deviation schedule realizing the documented outcome, if the entry
    /// ships one.
    pub script: Option<Vec<ScriptStep>>,
}

impl ExampleInstance {
    /// Step budget that comfortably covers the scripted outcome.
    pub fn default_max_steps(&self) -> usize {
        let n = self.graph.n();
        let script_len = self.script.as_ref().map_or(0, |s| s.len());
        (4 * n * n).max(script_len + 1)
    }
}

/// What a scripted run of a catalog entry is expected to report.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ExpectedRun {
    pub status: RunStatus,
    pub steps: usize,
    pub cycle_length: Option<usize>,
}

/// Catalog entries, with `<param>` placeholders for the parameterized ones.
pub fn catalog() -> Vec<&'static str> {
    vec![
        "cycle3",
        "cycle_n:<n>",
        "path_ir8",
        "path_2coalitions",
        "star_general",
        "almost_star",
        "tree_monotone",
        "tree_monotone_01",
        "star_lb:<t>",
        "path_quadratic:<n>",
        "tree_exponential:<t>",
    ]
}

fn set(members: &[Player]) -> PlayerSet {
    members.iter().copied().collect()
}

fn ranked(tiers: Vec<Vec<PlayerSet>>, default_tier: usize) -> RankedPreference {
    RankedPreference::new(tiers, default_tier).expect("catalog tiers are well formed")
}

fn partition(n: usize, blocks: &[&[Player]]) -> Partition {
    Partition::from_sets(n, blocks.iter().map(|b| set(b)).collect())
        .expect("catalog partition is well formed")
}

fn parse_param(name: &str, raw: &str, min: usize, max: usize) -> Result<usize, ExamplesError> {
    let v: usize = raw.parse().map_err(|_| ExamplesError::BadParameter {
        name: name.into(),
        reason: format!("`{raw}` is not a number"),
    })?;
    if v < min || v > max {
        return Err(ExamplesError::BadParameter {
            name: name.into(),
            reason: format!("expected {min}..={max}, got {v}"),
        });
    }
    Ok(v)
}

/// Builds a catalog instance by name, with `name:<param>` syntax for the
/// parameterized families.
pub fn build_example(name: &str) -> Result<ExampleInstance, ExamplesError> {
    let (base, param) = match name.split_once(':') {
        Some((b, p)) => (b, Some(p)),
        None => (name, None),
    };
    let missing = |family: &str| ExamplesError::BadParameter {
        name: family.into(),
        reason: format!("missing parameter, use e.g. `{family}:4`"),
    };
    match (base, param) {
        ("cycle3", None) => Ok(cycle3()),
        ("cycle_n", Some(p)) => cycle_ring(parse_param(base, p, 4, 64)?),
        ("cycle_n", None) => Err(missing(base)),
        ("path_ir8", None) => Ok(path_ir8()),
        ("path_2coalitions", None) => Ok(path_2coalitions()),
        ("star_general", None) => Ok(star_general()),
        ("almost_star", None) => Ok(almost_star()),
        ("tree_monotone", None) => Ok(tree_monotone()),
        ("tree_monotone_01", None) => Ok(tree_monotone_01()),
        ("star_lb", Some(p)) => Ok(star_lb(parse_param(base, p, 1, 31)?)),
        ("star_lb", None) => Err(missing(base)),
        ("path_quadratic", Some(p)) => Ok(path_quadratic(parse_param(base, p, 2, 64)?)),
        ("path_quadratic", None) => Err(missing(base)),
        ("tree_exponential", Some(p)) => Ok(tree_exponential(parse_param(base, p, 1, 31)?)),
        ("tree_exponential", None) => Err(missing(base)),
        _ => Err(ExamplesError::UnknownExample(name.into())),
    }
}

/// Expected scripted outcome for a catalog entry.
pub fn expected_run(name: &str) -> Result<ExpectedRun, ExamplesError> {
    let cycle = |steps: usize, len: usize| ExpectedRun {
        status: RunStatus::CycleDetected,
        steps,
        cycle_length: Some(len),
    };
    let converge = |steps: usize| ExpectedRun {
        status: RunStatus::Converged,
        steps,
        cycle_length: None,
    };
    let (base, param) = match name.split_once(':') {
        Some((b, p)) => (b, Some(p)),
        None => (name, None),
    };
    match (base, param) {
        ("cycle3", None) => Ok(cycle(3, 3)),
        ("cycle_n", Some(p)) => {
            let n = parse_param(base, p, 4, 64)?;
            // The three coalition shapes rotate around the ring; for small n
            // a rotated copy of an earlier state shows up before the full
            // 3n-step tour closes.
            Ok(match n {
                4 => cycle(4, 4),
                5 => cycle(7, 5),
                _ => cycle(3 * n, 3 * n),
            })
        }
        ("path_ir8", None) => Ok(cycle(8, 8)),
        ("path_2coalitions", None) => Ok(cycle(11, 8)),
        ("star_general", None) => Ok(cycle(6, 6)),
        ("almost_star", None) => Ok(cycle(5, 5)),
        ("tree_monotone", None) => Ok(cycle(6, 6)),
        ("tree_monotone_01", None) => Ok(cycle(12, 12)),
        ("star_lb", Some(p)) => {
            let t = parse_param(base, p, 1, 31)?;
            Ok(converge(t * (t + 1)))
        }
        ("path_quadratic", Some(p)) => {
            let n = parse_param(base, p, 2, 64)?;
            Ok(converge(n * (n - 1) / 2))
        }
        ("tree_exponential", Some(p)) => {
            let t = parse_param(base, p, 1, 31)?;
            // Every rung of the comb doubles the work of the one above it:
            // x_i moves 2^(t-i+2) - 2 times, which sums to 2^(t+2) - 2t - 4.
            Ok(converge((1usize << (t + 2)) - 2 * t - 4))
        }
        ("cycle_n" | "star_lb" | "path_quadratic" | "tree_exponential", None) => {
            Err(ExamplesError::BadParameter {
                name: base.into(),
                reason: format!("missing parameter, use e.g. `{base}:4`"),
            })
        }
        _ => Err(ExamplesError::UnknownExample(name.into())),
    }
}

/// Three players on a triangle, each valuing the next one around. The
/// scripted run chases its own tail forever; letting the lowest player move
/// first instead settles into the grand coalition.
fn cycle3() -> ExampleInstance {
    let graph = build_graph(3, &[(0, 1), (1, 2), (0, 2)])
        .unwrap()
        .with_labels(vec!["a".into(), "b".into(), "c".into()])
        .unwrap();
    let mut v = vec![vec![0i64; 3]; 3];
    v[0][1] = 1;
    v[1][2] = 1;
    v[2][0] = 1;
    let profile = PreferenceProfile::Additive(AdditiveValuation::from_ints(v).unwrap());
    let initial = partition(3, &[&[0, 2], &[1]]);
    let script = vec![
        ScriptStep::join_block_of(0, 1),
        ScriptStep::join_block_of(1, 2),
        ScriptStep::join_block_of(2, 0),
    ];
    ExampleInstance {
        name: "cycle3".into(),
        graph,
        profile,
        initial,
        script: Some(script),
    }
}

/// Ring of n players, each valuing only its clockwise neighbor. Three
/// coalitions chase each other around the ring; the script plays one full
/// tour (three moves per rotation).
fn cycle_ring(n: usize) -> Result<ExampleInstance, ExamplesError> {
    let mut edges: Vec<(usize, usize)> = (0..n - 1).map(|i| (i, i + 1)).collect();
    edges.push((0, n - 1));
    let graph = build_graph(n, &edges)?
        .with_labels((1..=n).map(|i| i.to_string()).collect())?;
    let mut v = vec![vec![0i64; n]; n];
    for i in 0..n - 1 {
        v[i][i + 1] = 1;
    }
    v[n - 1][0] = 1;
    let profile = PreferenceProfile::Additive(AdditiveValuation::from_ints(v)?);
    let big: Vec<Player> = (0..n - 2).collect();
    let initial = partition(n, &[&big, &[n - 2], &[n - 1]]);
    let mut script = Vec::with_capacity(3 * n);
    for r in 0..n {
        for k in 0..3 {
            let mover = (2 * n - 3 - r + k) % n;
            let anchor = (2 * n - 2 - r + k) % n;
            script.push(ScriptStep::join_block_of(mover, anchor));
        }
    }
    Ok(ExampleInstance {
        name: format!("cycle_n:{n}"),
        graph,
        profile,
        initial,
        script: Some(script),
    })
}

fn path_graph(n: usize, labels: Vec<String>) -> Graph {
    let edges: Vec<(usize, usize)> = (0..n - 1).map(|i| (i, i + 1)).collect();
    build_graph(n, &edges)
        .unwrap()
        .with_labels(labels)
        .unwrap()
}

fn letters(n: usize) -> Vec<String> {
    (0..n)
        .map(|i| ((b'a' + i as u8) as char).to_string())
        .collect()
}

/// Ranked tiers for the eight players of `path_ir8`, indexed a..h = 0..7.
/// Every player ranks its singleton in the default tier, so the profile is
/// individually rational but (deliberately) not monotone.
fn path_ir8_rankings() -> Vec<RankedPreference> {
    let bcde = set(&[1, 2, 3, 4]);
    let cde = set(&[2, 3, 4]);
    let defg = set(&[3, 4, 5, 6]);
    let def = set(&[3, 4, 5]);
    vec![
        // a
        ranked(vec![vec![set(&[0, 1])], vec![set(&[0])]], 1),
        // b
        ranked(
            vec![
                vec![bcde],
                vec![set(&[0, 1])],
                vec![set(&[1, 2])],
                vec![set(&[1])],
            ],
            3,
        ),
        // c
        ranked(
            vec![vec![bcde], vec![cde], vec![set(&[2, 3])], vec![set(&[2])]],
            3,
        ),
        // d
        ranked(
            vec![
                vec![bcde],
                vec![cde],
                vec![set(&[2, 3])],
                vec![defg],
                vec![def],
                vec![set(&[1, 2, 3])],
                vec![set(&[3])],
            ],
            6,
        ),
        // e
        ranked(
            vec![
                vec![defg],
                vec![def],
                vec![set(&[4, 5])],
                vec![bcde],
                vec![cde],
                vec![set(&[4, 5, 6])],
                vec![set(&[4])],
            ],
            6,
        ),
        // f
        ranked(
            vec![vec![defg], vec![def], vec![set(&[4, 5])], vec![set(&[5])]],
            3,
        ),
        // g
        ranked(
            vec![
                vec![defg],
                vec![set(&[6, 7])],
                vec![set(&[5, 6])],
                vec![set(&[6])],
            ],
            3,
        ),
        // h
        ranked(vec![vec![set(&[6, 7])], vec![set(&[7])]], 1),
    ]
}

fn path_ir8_script() -> Vec<ScriptStep> {
    vec![
        ScriptStep::join_block_of(4, 5),
        ScriptStep::join_block_of(3, 4),
        ScriptStep::join_block_of(6, 3),
        ScriptStep::join_block_of(1, 0),
        ScriptStep::join_block_of(3, 2),
        ScriptStep::join_block_of(4, 2),
        ScriptStep::join_block_of(1, 2),
        ScriptStep::join_block_of(6, 7),
    ]
}

/// Eight players on a path with individually rational ranked preferences.
/// The scripted eight deviations return to the starting partition.
fn path_ir8() -> ExampleInstance {
    let graph = path_graph(8, letters(8));
    let profile = PreferenceProfile::Ranked(path_ir8_rankings());
    let initial = partition(8, &[&[0], &[1, 2, 3, 4], &[5], &[6, 7]]);
    ExampleInstance {
        name: "path_ir8".into(),
        graph,
        profile,
        initial,
        script: Some(path_ir8_script()),
    }
}

/// Ten players on a path, starting from just two coalitions. Three scripted
/// deviations dissolve the big block into the `path_ir8` starting position
/// (plus a frozen pair at the far end), after which that eight-step cycle
/// repeats. Players a and f rank one big coalition below their singletons,
/// so the profile itself is not individually rational even though the
/// starting partition is.
fn path_2coalitions() -> ExampleInstance {
    let mut labels = letters(8);
    labels.push("alpha".into());
    labels.push("alpha'".into());
    let graph = path_graph(10, labels);
    let mut rankings = path_ir8_rankings();
    // a additionally ranks the block it starts in below its singleton
    rankings[0] = ranked(
        vec![
            vec![set(&[0, 1])],
            vec![set(&[0])],
            vec![set(&[0, 1, 2, 3, 4])],
        ],
        1,
    );
    // f likewise for the block it is left in after alpha departs
    rankings[5] = ranked(
        vec![
            vec![set(&[3, 4, 5, 6])],
            vec![set(&[3, 4, 5])],
            vec![set(&[4, 5])],
            vec![set(&[5])],
            vec![set(&[0, 1, 2, 3, 4, 5, 6, 7])],
        ],
        3,
    );
    rankings.push(ranked(vec![vec![set(&[8, 9])], vec![set(&[8])]], 1));
    rankings.push(ranked(vec![vec![set(&[9])]], 0));
    let profile = PreferenceProfile::Ranked(rankings);
    let initial = partition(10, &[&[0, 1, 2, 3, 4, 5, 6, 7, 8], &[9]]);
    let mut script = vec![
        ScriptStep::join_block_of(8, 9),
        ScriptStep::go_alone(5),
        ScriptStep::go_alone(0),
    ];
    script.extend(path_ir8_script());
    ExampleInstance {
        name: "path_2coalitions".into(),
        graph,
        profile,
        initial,
        script: Some(script),
    }
}

/// Four players on a star whose center d is completely indifferent. The
/// three leaves chase pairwise coalitions through a six-step cycle. Not
/// individually rational: each leaf ranks two coalitions below its
/// singleton.
fn star_general() -> ExampleInstance {
    let graph = build_graph(4, &[(0, 3), (1, 3), (2, 3)])
        .unwrap()
        .with_labels(letters(4))
        .unwrap();
    let grand = set(&[0, 1, 2, 3]);
    let rankings = vec![
        // a
        ranked(
            vec![
                vec![set(&[0, 1, 3])],
                vec![set(&[0])],
                vec![set(&[0, 2, 3])],
                vec![set(&[0, 3])],
                vec![grand],
            ],
            1,
        ),
        // b
        ranked(
            vec![
                vec![set(&[1, 2, 3])],
                vec![set(&[1])],
                vec![set(&[0, 1, 3])],
                vec![set(&[1, 3])],
                vec![grand],
            ],
            1,
        ),
        // c
        ranked(
            vec![
                vec![set(&[0, 2, 3])],
                vec![set(&[2])],
                vec![set(&[1, 2, 3])],
                vec![set(&[2, 3])],
                vec![grand],
            ],
            1,
        ),
        // d is indifferent between all coalitions
        ranked(vec![vec![set(&[3])]], 0),
    ];
    let profile = PreferenceProfile::Ranked(rankings);
    let initial = partition(4, &[&[0], &[1, 2, 3]]);
    let script = vec![
        ScriptStep::go_alone(2),
        ScriptStep::join_block_of(0, 1),
        ScriptStep::go_alone(1),
        ScriptStep::join_block_of(2, 0),
        ScriptStep::go_alone(0),
        ScriptStep::join_block_of(1, 2),
    ];
    ExampleInstance {
        name: "star_general".into(),
        graph,
        profile,
        initial,
        script: Some(script),
    }
}

/// Five players on a star plus one pendant edge (b has its own leaf c).
/// Individually rational ranked preferences with a five-step cycle in which
/// one departure scatters a pair into singletons.
fn almost_star() -> ExampleInstance {
    let graph = build_graph(5, &[(0, 1), (0, 3), (0, 4), (1, 2)])
        .unwrap()
        .with_labels(letters(5))
        .unwrap();
    let rankings = vec![
        // a
        ranked(
            vec![
                vec![set(&[0, 1])],
                vec![set(&[0, 4])],
                vec![set(&[0, 1, 3])],
                vec![set(&[0, 3])],
                vec![set(&[0])],
            ],
            4,
        ),
        // b
        ranked(
            vec![
                vec![set(&[0, 1, 3])],
                vec![set(&[1, 2])],
                vec![set(&[0, 1])],
                vec![set(&[1])],
            ],
            3,
        ),
        // c
        ranked(vec![vec![set(&[1, 2])], vec![set(&[2])]], 1),
        // d
        ranked(
            vec![vec![set(&[0, 1, 3])], vec![set(&[0, 3])], vec![set(&[3])]],
            2,
        ),
        // e
        ranked(vec![vec![set(&[0, 4])], vec![set(&[4])]], 1),
    ];
    let profile = PreferenceProfile::Ranked(rankings);
    let initial = partition(5, &[&[0, 1], &[2], &[3], &[4]]);
    let script = vec![
        ScriptStep::join_block_of(1, 2),
        ScriptStep::join_block_of(0, 3),
        ScriptStep::join_block_of(1, 0),
        ScriptStep::join_block_of(0, 4),
        ScriptStep::join_block_of(0, 1),
    ];
    ExampleInstance {
        name: "almost_star".into(),
        graph,
        profile,
        initial,
        script: Some(script),
    }
}

/// Spider whose hub T joins three arms a_0, a_1, a_2, each with a private
/// leaf x_i. Additive values keep every a_i torn between its own leaf and
/// the next arm over, producing a six-step cycle. Monotone but not
/// edge-supported: a_i values a_(i+1) without an edge to it.
fn tree_monotone() -> ExampleInstance {
    let graph = build_graph(7, &[(0, 3), (0, 4), (1, 3), (1, 5), (2, 3), (2, 6)])
        .unwrap()
        .with_labels(vec![
            "a0".into(),
            "a1".into(),
            "a2".into(),
            "T".into(),
            "x0".into(),
            "x1".into(),
            "x2".into(),
        ])
        .unwrap();
    let mut v = vec![vec![0i64; 7]; 7];
    v[0][4] = 1;
    v[0][1] = 2;
    v[1][5] = 1;
    v[1][2] = 2;
    v[2][6] = 1;
    v[2][0] = 2;
    let profile = PreferenceProfile::Additive(AdditiveValuation::from_ints(v).unwrap());
    let initial = partition(7, &[&[0, 4], &[1, 3], &[5], &[2, 6]]);
    let script = vec![
        ScriptStep::join_block_of(0, 3),
        ScriptStep::join_block_of(1, 5),
        ScriptStep::join_block_of(2, 3),
        ScriptStep::join_block_of(0, 4),
        ScriptStep::join_block_of(1, 3),
        ScriptStep::join_block_of(2, 6),
    ];
    ExampleInstance {
        name: "tree_monotone".into(),
        graph,
        profile,
        initial,
        script: Some(script),
    }
}

/// Deeper spider (arms a_i-b_i-x_i) with 0/1 additive values; the cycle
/// stretches to twelve deviations because each arm moves in pairs.
fn tree_monotone_01() -> ExampleInstance {
    let edges = [
        (0, 6),
        (1, 6),
        (2, 6),
        (0, 3),
        (1, 4),
        (2, 5),
        (3, 7),
        (4, 8),
        (5, 9),
    ];
    let graph = build_graph(10, &edges)
        .unwrap()
        .with_labels(vec![
            "a0".into(),
            "a1".into(),
            "a2".into(),
            "b0".into(),
            "b1".into(),
            "b2".into(),
            "T".into(),
            "x0".into(),
            "x1".into(),
            "x2".into(),
        ])
        .unwrap();
    let mut v = vec![vec![0i64; 10]; 10];
    for i in 0..3 {
        let next = (i + 1) % 3;
        for row in [i, 3 + i] {
            v[row][7 + i] = 1;
            v[row][next] = 1;
            v[row][3 + next] = 1;
        }
    }
    let profile = PreferenceProfile::Additive(AdditiveValuation::from_ints(v).unwrap());
    let initial = partition(10, &[&[0, 3, 7], &[1, 4, 6], &[8], &[2, 5, 9]]);
    let script = vec![
        ScriptStep::join_block_of(0, 6),
        ScriptStep::join_block_of(3, 6),
        ScriptStep::join_block_of(4, 8),
        ScriptStep::join_block_of(1, 8),
        ScriptStep::join_block_of(2, 6),
        ScriptStep::join_block_of(5, 6),
        ScriptStep::join_block_of(3, 7),
        ScriptStep::join_block_of(0, 7),
        ScriptStep::join_block_of(1, 6),
        ScriptStep::join_block_of(4, 6),
        ScriptStep::join_block_of(5, 9),
        ScriptStep::join_block_of(2, 9),
    ];
    ExampleInstance {
        name: "tree_monotone_01".into(),
        graph,
        profile,
        initial,
        script: Some(script),
    }
}

/// Star with center c, spokes x_1..x_t and y_1..y_t. The center works
/// through t rounds, each time luring in a better x and re-collecting every
/// y, for exactly t(t+1) deviations before settling.
fn star_lb(t: usize) -> ExampleInstance {
    let n = 2 * t + 1;
    let edges: Vec<(usize, usize)> = (1..n).map(|i| (0, i)).collect();
    let mut labels = vec!["c".to_string()];
    labels.extend((1..=t).map(|i| format!("x{i}")));
    labels.extend((1..=t).map(|i| format!("y{i}")));
    let graph = build_graph(n, &edges).unwrap().with_labels(labels).unwrap();

    // Center: {c, x_i} plus any y-subset, keyed by (i desc, |y-subset| desc);
    // everything else sits in the empty default tier, being alone is worst.
    let mut tiers: Vec<Vec<PlayerSet>> = Vec::new();
    for i in (1..=t).rev() {
        for y in (0..=t).rev() {
            let mut tier = Vec::new();
            for mask in 0u64..(1 << t) {
                if mask.count_ones() as usize == y {
                    let mut s = set(&[0, i]);
                    for k in 0..t {
                        if mask >> k & 1 == 1 {
                            s.insert(t + 1 + k);
                        }
                    }
                    tier.push(s);
                }
            }
            tiers.push(tier);
        }
    }
    let default_tier = tiers.len();
    tiers.push(Vec::new());
    tiers.push(vec![set(&[0])]);
    let mut rankings = vec![ranked(tiers, default_tier)];
    // Leaves prefer any company to being alone, indifferent otherwise.
    for l in 1..n {
        rankings.push(ranked(vec![Vec::new(), vec![set(&[l])]], 0));
    }
    let profile = PreferenceProfile::Ranked(rankings);
    let blocks: Vec<Vec<Player>> = (0..n).map(|i| vec![i]).collect();
    let initial = partition(
        n,
        &blocks.iter().map(|b| b.as_slice()).collect::<Vec<_>>(),
    );
    let mut script = Vec::with_capacity(t * (t + 1));
    for i in 1..=t {
        script.push(ScriptStep::join_block_of(0, i));
        for j in 1..=t {
            script.push(ScriptStep::join_block_of(t + j, 0));
        }
    }
    ExampleInstance {
        name: format!("star_lb:{t}"),
        graph,
        profile,
        initial,
        script: Some(script),
    }
}

/// Path where every player values its right neighbor twice as much as its
/// left one. Building the grand coalition left-to-right in shrinking passes
/// takes exactly n(n-1)/2 deviations.
fn path_quadratic(n: usize) -> ExampleInstance {
    let graph = path_graph(n, (1..=n).map(|i| i.to_string()).collect());
    let mut v = vec![vec![0i64; n]; n];
    for i in 0..n {
        if i > 0 {
            v[i][i - 1] = 1;
        }
        if i + 1 < n {
            v[i][i + 1] = 2;
        }
    }
    let profile = PreferenceProfile::Additive(AdditiveValuation::from_ints(v).unwrap());
    let initial = Partition::singletons(n);
    let mut script = Vec::with_capacity(n * (n - 1) / 2);
    for r in 1..n {
        for i in 1..=(n - r) {
            script.push(ScriptStep::join_block_of(i - 1, i));
        }
    }
    ExampleInstance {
        name: format!("path_quadratic:{n}"),
        graph,
        profile,
        initial,
        script: Some(script),
    }
}

/// Comb: spine x_1-..-x_{t+1} with a tooth y_i on each x_i. Each x_i values
/// the next spine vertex at 2 and its own tooth at 1, so every move by
/// x_{i+1} sends x_i on a two-step detour. Deviation counts double down the
/// spine: x_i moves 2^(t-i+2) - 2 times.
fn tree_exponential(t: usize) -> ExampleInstance {
    let n = 2 * t + 1;
    let mut edges = Vec::with_capacity(n - 1);
    for i in 1..=t {
        edges.push((i - 1, i));
        edges.push((i - 1, t + i));
    }
    let mut labels: Vec<String> = (1..=t + 1).map(|i| format!("x{i}")).collect();
    labels.extend((1..=t).map(|i| format!("y{i}")));
    let graph = build_graph(n, &edges).unwrap().with_labels(labels).unwrap();
    let mut v = vec![vec![0i64; n]; n];
    for i in 1..=t {
        v[i - 1][i] = 2;
        v[i - 1][t + i] = 1;
    }
    let profile = PreferenceProfile::Additive(AdditiveValuation::from_ints(v).unwrap());
    let initial = Partition::singletons(n);
    ExampleInstance {
        name: format!("tree_exponential:{t}"),
        graph,
        profile,
        initial,
        script: Some(exponential_schedule(t)),
    }
}

/// Deviation schedule realizing the doubling counts on the comb. x_i's two
/// basic moves are "join own tooth y_i, then rejoin the spine at x_{i+1}";
/// every spine move by x_{i+1} forces x_i to repeat that pair.
pub fn exponential_schedule(t: usize) -> Vec<ScriptStep> {
    fn pair(t: usize, i: usize) -> [ScriptStep; 2] {
        [
            ScriptStep::join_block_of(i - 1, t + i),
            ScriptStep::join_block_of(i - 1, i),
        ]
    }
    fn rec(t: usize, i: usize) -> Vec<ScriptStep> {
        let mut out = Vec::new();
        out.extend(pair(t, i));
        if i < t {
            for m in rec(t, i + 1) {
                let trigger = m.player == i;
                out.push(m);
                if trigger {
                    out.extend(pair(t, i));
                }
            }
        }
        out
    }
    rec(t, 1)
}

/// Tree with a distinguished root: parent pointers, child sets and depths.
#[derive(Debug, Clone)]
pub struct RootedTree {
    root: Player,
    parent: Vec<Option<Player>>,
    children: Vec<PlayerSet>,
    depth: Vec<usize>,
}

impl RootedTree {
    pub fn new(g: &Graph, root: Player) -> Result<Self, ExamplesError> {
        let n = g.n();
        if g.edges().len() != n - 1 {
            return Err(ExamplesError::NotATree);
        }
        if root >= n {
            return Err(ExamplesError::Graph(GraphError::PlayerOutOfRange(root, n)));
        }
        let mut parent = vec![None; n];
        let mut children = vec![PlayerSet::EMPTY; n];
        let mut depth = vec![0usize; n];
        let mut queue = std::collections::VecDeque::from([root]);
        let mut seen = PlayerSet::singleton(root);
        while let Some(u) = queue.pop_front() {
            for w in g.neighbors(u).iter() {
                if !seen.contains(w) {
                    seen.insert(w);
                    parent[w] = Some(u);
                    children[u].insert(w);
                    depth[w] = depth[u] + 1;
                    queue.push_back(w);
                }
            }
        }
        Ok(RootedTree {
            root,
            parent,
            children,
            depth,
        })
    }

    pub fn root(&self) -> Player {
        self.root
    }

    pub fn n(&self) -> usize {
        self.parent.len()
    }

    pub fn parent(&self, i: Player) -> Option<Player> {
        self.parent[i]
    }

    pub fn children(&self, i: Player) -> PlayerSet {
        self.children[i]
    }

    pub fn depth(&self, i: Player) -> usize {
        self.depth[i]
    }

    /// All descendants of `i`, including `i` itself.
    pub fn subtree(&self, i: Player) -> PlayerSet {
        let mut out = PlayerSet::singleton(i);
        let mut stack = vec![i];
        while let Some(u) = stack.pop() {
            for w in self.children[u].iter() {
                out.insert(w);
                stack.push(w);
            }
        }
        out
    }
}

/// Product of child counts along the path from `j` up to its ancestor `i`,
/// both endpoints included. Zero whenever `j` is a leaf.
pub fn m_coefficient(rt: &RootedTree, j: Player, i: Player) -> Result<u64, ExamplesError> {
    let mut cur = j;
    let mut prod = rt.children(cur).len() as u64;
    while cur != i {
        match rt.parent(cur) {
            Some(p) => {
                cur = p;
                prod = prod.saturating_mul(rt.children(cur).len() as u64);
            }
            None => return Err(ExamplesError::NotAnAncestor { of: j, claimed: i }),
        }
    }
    Ok(prod)
}

/// Upper bound on how often the root can deviate during a labeled run on a
/// tree with nonnegative edge-supported additive values: the sum of
/// [`m_coefficient`] over all vertices.
pub fn tree_deviation_bound(rt: &RootedTree) -> u64 {
    (0..rt.n())
        .map(|j| m_coefficient(rt, j, rt.root()).expect("root is an ancestor of every vertex"))
        .sum()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dynamics::{run_dynamics, RunStatus, Scheduler};
    use crate::prefs::{is_individually_rational, is_las, is_monotone};

    fn sample_names() -> Vec<String> {
        vec![
            "cycle3".into(),
            "cycle_n:4".into(),
            "cycle_n:5".into(),
            "cycle_n:6".into(),
            "path_ir8".into(),
            "path_2coalitions".into(),
            "star_general".into(),
            "almost_star".into(),
            "tree_monotone".into(),
            "tree_monotone_01".into(),
            "star_lb:2".into(),
            "star_lb:3".into(),
            "path_quadratic:3".into(),
            "path_quadratic:5".into(),
            "tree_exponential:1".into(),
            "tree_exponential:2".into(),
            "tree_exponential:3".into(),
        ]
    }

    #[test]
    fn every_entry_is_well_formed() {
        for name in sample_names() {
            let ex = build_example(&name).unwrap();
            ex.profile.validate(&ex.graph).unwrap();
            assert!(ex.initial.is_feasible(&ex.graph), "{name}: initial infeasible");
            assert_eq!(ex.graph.n(), ex.initial.n());
        }
    }

    #[test]
    fn scripted_runs_match_expected_outcomes() {
        for name in sample_names() {
            let ex = build_example(&name).unwrap();
            let expect = expected_run(&name).unwrap();
            let script = ex.script.clone().unwrap();
            let outcome = run_dynamics(
                &ex.graph,
                &ex.profile,
                &ex.initial,
                &Scheduler::Scripted(script),
                ex.default_max_steps(),
            )
            .unwrap();
            assert_eq!(outcome.status, expect.status, "{name}: status");
            assert_eq!(outcome.steps, expect.steps, "{name}: steps");
            assert_eq!(
                outcome.cycle_length(),
                expect.cycle_length,
                "{name}: cycle length"
            );
        }
    }

    #[test]
    fn ring_of_five_recurs_early() {
        // After seven moves the three-coalition pattern lands on a rotation
        // of the state reached after two, so the detected cycle has length 5.
        let ex = build_example("cycle_n:5").unwrap();
        let outcome = run_dynamics(
            &ex.graph,
            &ex.profile,
            &ex.initial,
            &Scheduler::Scripted(ex.script.clone().unwrap()),
            100,
        )
        .unwrap();
        assert_eq!(outcome.steps, 7);
        assert_eq!(outcome.cycle_start, Some(2));
        assert_eq!(outcome.cycle_length(), Some(5));
    }

    #[test]
    fn preference_classes_are_as_advertised() {
        let las = ["cycle3", "cycle_n:6", "path_quadratic:5", "tree_exponential:3"];
        for name in las {
            let ex = build_example(name).unwrap();
            assert!(is_las(&ex.graph, &ex.profile).unwrap(), "{name} should be edge-supported");
        }
        for name in ["tree_monotone", "tree_monotone_01"] {
            let ex = build_example(name).unwrap();
            assert!(is_monotone(&ex.graph, &ex.profile).unwrap(), "{name} should be monotone");
            assert!(!is_las(&ex.graph, &ex.profile).unwrap(), "{name} values a non-neighbor");
        }
        for name in ["path_ir8", "almost_star", "star_lb:3"] {
            let ex = build_example(name).unwrap();
            assert!(
                is_individually_rational(&ex.graph, &ex.profile).unwrap(),
                "{name} should be individually rational"
            );
        }
        let ex = build_example("path_ir8").unwrap();
        assert!(!is_monotone(&ex.graph, &ex.profile).unwrap());
        for name in ["star_general", "path_2coalitions"] {
            let ex = build_example(name).unwrap();
            assert!(
                !is_individually_rational(&ex.graph, &ex.profile).unwrap(),
                "{name} ranks some coalition below a singleton"
            );
        }
    }

    #[test]
    fn two_coalition_start_is_individually_rational_state() {
        use crate::dynamics::is_ir_partition;
        let ex = build_example("path_2coalitions").unwrap();
        assert!(is_ir_partition(&ex.profile, &ex.initial));
    }

    #[test]
    fn exponential_schedule_has_doubling_counts() {
        for t in 1..=4 {
            let ex = build_example(&format!("tree_exponential:{t}")).unwrap();
            let outcome = run_dynamics(
                &ex.graph,
                &ex.profile,
                &ex.initial,
                &Scheduler::Scripted(ex.script.clone().unwrap()),
                ex.default_max_steps(),
            )
            .unwrap();
            assert_eq!(outcome.status, RunStatus::Converged);
            for i in 1..=t {
                assert_eq!(
                    outcome.per_player_counts[i - 1],
                    (1usize << (t - i + 2)) - 2,
                    "t={t}: moves of x{i}"
                );
            }
        }
    }

    #[test]
    fn comb_bound_matches_root_deviation_count() {
        for t in 1..=6 {
            let ex = build_example(&format!("tree_exponential:{t}")).unwrap();
            let rt = RootedTree::new(&ex.graph, 0).unwrap();
            assert_eq!(tree_deviation_bound(&rt), (1u64 << (t + 1)) - 2, "t={t}");
        }
    }

    #[test]
    fn comb_coefficients_form_doubling_multiset() {
        let ex = build_example("tree_exponential:4").unwrap();
        let rt = RootedTree::new(&ex.graph, 0).unwrap();
        let mut coeffs: Vec<u64> = (0..rt.n())
            .map(|j| m_coefficient(&rt, j, 0).unwrap())
            .filter(|&c| c > 0)
            .collect();
        coeffs.sort_unstable();
        // teeth and the spine end contribute 0; interior spine vertices
        // contribute 2, 4, 8, ... with the root counted via its child pair
        assert_eq!(coeffs, vec![2, 4, 8, 16]);
    }

    #[test]
    fn path_bound_is_at_most_twice_n() {
        for n in 2..=9 {
            let ex = build_example(&format!("path_quadratic:{n}")).unwrap();
            for root in 0..n {
                let rt = RootedTree::new(&ex.graph, root).unwrap();
                assert!(tree_deviation_bound(&rt) <= 2 * n as u64, "n={n} root={root}");
            }
        }
    }

    #[test]
    fn two_player_tree_has_bound_one() {
        let g = build_graph(2, &[(0, 1)]).unwrap();
        let rt = RootedTree::new(&g, 0).unwrap();
        assert_eq!(tree_deviation_bound(&rt), 1);
        assert_eq!(m_coefficient(&rt, 0, 0).unwrap(), 1);
        assert_eq!(m_coefficient(&rt, 1, 0).unwrap(), 0);
    }

    #[test]
    fn coefficient_requires_ancestor() {
        let ex = build_example("tree_monotone").unwrap();
        let rt = RootedTree::new(&ex.graph, 3).unwrap();
        // x0 (4) is not on the rootward path of x1 (5)
        assert!(matches!(
            m_coefficient(&rt, 5, 4),
            Err(ExamplesError::NotAnAncestor { of: 5, claimed: 4 })
        ));
        assert_eq!(rt.parent(5), Some(1));
        assert_eq!(rt.depth(5), 2);
        assert_eq!(rt.subtree(1), set(&[1, 5]));
    }

    #[test]
    fn rooted_tree_rejects_non_trees() {
        let ex = build_example("cycle3").unwrap();
        assert!(matches!(
            RootedTree::new(&ex.graph, 0),
            Err(ExamplesError::NotATree)
        ));
    }

    #[test]
    fn names_are_validated() {
        assert!(matches!(
            build_example("nope"),
            Err(ExamplesError::UnknownExample(_))
        ));
        assert!(matches!(
            build_example("cycle_n"),
            Err(ExamplesError::BadParameter { .. })
        ));
        assert!(matches!(
            build_example("cycle_n:3"),
            Err(ExamplesError::BadParameter { .. })
        ));
        assert!(matches!(
            build_example("star_lb:zero"),
            Err(ExamplesError::BadParameter { .. })
        ));
        assert!(expected_run("tree_exponential:4").unwrap().steps == 52);
        assert_eq!(catalog().len(), 11);
    }
}
