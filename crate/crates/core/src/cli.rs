//! Command-line front end: load or build instances, run the deviation
//! dynamics, certify convergence by exhaustive state enumeration, replay
//! catalog entries, and compute tree deviation bounds.
//!
//! Instances are addressed either by a JSON file path or by a catalog name
//! such as `path_ir8` or `tree_exponential:4`. Summaries print as one line
//! of versioned JSON on stdout; diagnostics go to stderr.

use std::fmt::Write as _;
use std::io::Write;
use std::path::Path;
use std::str::FromStr;

use clap::{Args, Parser, Subcommand, ValueEnum};
use num_rational::Rational64;
use serde::{Deserialize, Serialize};
use serde_json::json;

use crate::dynamics::{
    is_ir_partition, run_dynamics, Partition, RunOutcome, RunStatus, Scheduler, ScriptStep,
    ScriptTarget,
};
use crate::examples::{
    build_example, expected_run, m_coefficient, tree_deviation_bound, ExampleInstance,
    ExamplesError, RootedTree,
};
use crate::graph::{build_graph, classify_topology, Graph, Player, PlayerSet};
use crate::oracle::{
    build_state_graph_with_cap, certify_convergence_from, longest_trajectory, Certification,
    OracleError, StateGraph, DEFAULT_STATE_CAP,
};
use crate::prefs::{
    is_individually_rational, is_las, is_monotone, AdditiveValuation, PreferenceProfile,
    PrefsError, RankedPreference,
};

const SCHEMA_VERSION: u32 = 1;

const EXIT_OK: i32 = 0;
const EXIT_ERROR: i32 = 1;
const EXIT_CYCLE: i32 = 2;
const EXIT_TRUNCATED: i32 = 3;
const EXIT_TOO_LARGE: i32 = 4;
const EXIT_MISMATCH: i32 = 5;
const EXIT_USAGE: i32 = 64;

#[derive(Parser)]
#[command(
    name = "hedonic",
    version,
    about = "Coalition formation dynamics on graphs"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run the deviation dynamics on an instance
    Run(RunArgs),
    /// Enumerate the full state graph and certify convergence
    Certify(CertifyArgs),
    /// Replay catalog entries and check their documented outcomes
    Reproduce(ReproduceArgs),
    /// Compute the per-root deviation bound on a tree instance
    Bound(BoundArgs),
    /// Write a catalog entry as an instance JSON file
    Export(ExportArgs),
    /// Load an instance and report its structure and preference classes
    Validate(ValidateArgs),
}

#[derive(Args)]
struct RunArgs {
    /// Instance file or catalog name
    instance: String,
    #[arg(long, value_enum, default_value_t = SchedulerKind::First)]
    scheduler: SchedulerKind,
    /// Seed for the random scheduler (required with --scheduler random)
    #[arg(long)]
    seed: Option<u64>,
    /// Step budget; defaults to max(4n^2, script length + 1)
    #[arg(long)]
    max_steps: Option<usize>,
    /// Starting partition: `singletons`, `grand`, or a JSON array of blocks
    /// like `[["a","b"],["c"]]`; defaults to the instance's own
    #[arg(long)]
    initial: Option<String>,
    /// Stream per-step records as line-delimited JSON here (`-` for stdout)
    #[arg(long)]
    trace: Option<String>,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum SchedulerKind {
    First,
    Random,
    BestResponse,
    Scripted,
}

#[derive(Args)]
struct CertifyArgs {
    /// Instance file or catalog name
    instance: String,
    /// Which starting states must converge: `all`, `ir-state`, or
    /// `max-coalitions=<k>`
    #[arg(long, default_value = "all")]
    filter: String,
    /// State-count cap (overrides the HEDONIC_MAX_ENUM environment variable)
    #[arg(long)]
    max_states: Option<usize>,
    /// Write the state graph in DOT format to this file
    #[arg(long)]
    dot: Option<String>,
}

#[derive(Args)]
struct ReproduceArgs {
    /// Catalog entry, or `all` for the full regression battery
    #[arg(default_value = "all")]
    name: String,
}

#[derive(Args)]
struct BoundArgs {
    /// Instance file or catalog name (graph must be a tree)
    instance: String,
    /// Root player as label or index, or `all` for every root
    #[arg(long, default_value = "all")]
    root: String,
}

#[derive(Args)]
struct ExportArgs {
    /// Catalog entry name
    name: String,
    /// Output path (`-` for stdout)
    #[arg(long, default_value = "-")]
    out: String,
}

#[derive(Args)]
struct ValidateArgs {
    /// Instance file or catalog name
    instance: String,
}

/// Entry point used by the binary; returns the process exit code.
pub fn main() -> i32 {
    let mut stdout = std::io::stdout();
    run_from(std::env::args_os(), &mut stdout)
}

/// Parses `args` and dispatches, writing machine output to `out`.
pub fn run_from<I, S>(args: I, out: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = S>,
    S: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
            let _ = e.print();
            return code;
        }
    };
    match cli.command {
        Command::Run(a) => cmd_run(a, out),
        Command::Certify(a) => cmd_certify(a, out),
        Command::Reproduce(a) => cmd_reproduce(a, out),
        Command::Bound(a) => cmd_bound(a, out),
        Command::Export(a) => cmd_export(a, out),
        Command::Validate(a) => cmd_validate(a, out),
    }
}

fn fail(msg: impl std::fmt::Display) -> i32 {
    eprintln!("error: {msg}");
    EXIT_ERROR
}

// ---------------------------------------------------------------------------
// Instance files

/// On-disk instance: a graph, a preference profile, and optionally a
/// starting partition and a deviation script.
#[derive(Serialize, Deserialize)]
struct InstanceFile {
    graph: GraphFile,
    preferences: PrefsFile,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    initial: Option<Vec<Vec<Member>>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    script: Option<Vec<ScriptStepFile>>,
}

#[derive(Serialize, Deserialize)]
struct GraphFile {
    n: usize,
    edges: Vec<(usize, usize)>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    labels: Option<Vec<String>>,
}

#[derive(Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
enum PrefsFile {
    Ranked { players: Vec<RankedFile> },
    Additive { values: Vec<Vec<ValueFile>> },
}

#[derive(Serialize, Deserialize)]
struct RankedFile {
    tiers: Vec<Vec<Vec<Member>>>,
    default_tier: usize,
}

/// Players in files may be written as indices or as graph labels.
#[derive(Serialize, Deserialize, Clone)]
#[serde(untagged)]
enum Member {
    Index(usize),
    Name(String),
}

/// Additive values are exact: JSON integers or `"p/q"` strings.
#[derive(Serialize, Deserialize)]
#[serde(untagged)]
enum ValueFile {
    Int(i64),
    Text(String),
}

#[derive(Serialize, Deserialize)]
struct ScriptStepFile {
    player: Member,
    target: TargetFile,
}

#[derive(Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
enum TargetFile {
    Alone,
    Block(Vec<Member>),
    BlockOf(Member),
}

struct Loaded {
    name: String,
    graph: Graph,
    profile: PreferenceProfile,
    initial: Option<Partition>,
    script: Option<Vec<ScriptStep>>,
}

impl From<ExampleInstance> for Loaded {
    fn from(ex: ExampleInstance) -> Self {
        Loaded {
            name: ex.name,
            graph: ex.graph,
            profile: ex.profile,
            initial: Some(ex.initial),
            script: ex.script,
        }
    }
}

fn resolve(g: &Graph, m: &Member) -> Result<Player, String> {
    match m {
        Member::Index(i) if *i < g.n() => Ok(*i),
        Member::Index(i) => Err(format!("player index {i} out of range (n={})", g.n())),
        Member::Name(s) => g
            .player_by_label(s)
            .ok_or_else(|| format!("unknown player label `{s}`")),
    }
}

fn resolve_set(g: &Graph, members: &[Member]) -> Result<PlayerSet, String> {
    let mut s = PlayerSet::EMPTY;
    for m in members {
        s.insert(resolve(g, m)?);
    }
    Ok(s)
}

fn parse_value(v: &ValueFile) -> Result<Rational64, String> {
    match v {
        ValueFile::Int(i) => Ok(Rational64::from_integer(*i)),
        ValueFile::Text(s) => {
            Rational64::from_str(s).map_err(|e| format!("bad rational `{s}`: {e}"))
        }
    }
}

fn instance_from_file(name: &str, file: InstanceFile) -> Result<Loaded, String> {
    let mut graph =
        build_graph(file.graph.n, &file.graph.edges).map_err(|e| format!("graph: {e}"))?;
    if let Some(labels) = file.graph.labels {
        graph = graph.with_labels(labels).map_err(|e| format!("graph: {e}"))?;
    }
    let profile = match file.preferences {
        PrefsFile::Ranked { players } => {
            let mut rankings = Vec::with_capacity(players.len());
            for (i, p) in players.iter().enumerate() {
                let mut tiers = Vec::with_capacity(p.tiers.len());
                for tier in &p.tiers {
                    let mut sets = Vec::with_capacity(tier.len());
                    for coalition in tier {
                        sets.push(
                            resolve_set(&graph, coalition)
                                .map_err(|e| format!("preferences of player {i}: {e}"))?,
                        );
                    }
                    tiers.push(sets);
                }
                rankings.push(
                    RankedPreference::new(tiers, p.default_tier)
                        .map_err(|e| format!("preferences of player {i}: {e}"))?,
                );
            }
            PreferenceProfile::Ranked(rankings)
        }
        PrefsFile::Additive { values } => {
            let mut rows = Vec::with_capacity(values.len());
            for (i, row) in values.iter().enumerate() {
                let mut out = Vec::with_capacity(row.len());
                for v in row {
                    out.push(parse_value(v).map_err(|e| format!("values of player {i}: {e}"))?);
                }
                rows.push(out);
            }
            PreferenceProfile::Additive(
                AdditiveValuation::new(rows).map_err(|e| format!("values: {e}"))?,
            )
        }
    };
    profile
        .validate(&graph)
        .map_err(|e| format!("preferences: {e}"))?;
    let initial = match file.initial {
        Some(blocks) => Some(parse_partition_blocks(&graph, &blocks)?),
        None => None,
    };
    let script = match file.script {
        Some(steps) => {
            let mut out = Vec::with_capacity(steps.len());
            for (k, step) in steps.iter().enumerate() {
                let player =
                    resolve(&graph, &step.player).map_err(|e| format!("script step {k}: {e}"))?;
                let target = match &step.target {
                    TargetFile::Alone => ScriptTarget::Alone,
                    TargetFile::Block(ms) => ScriptTarget::Block(
                        resolve_set(&graph, ms).map_err(|e| format!("script step {k}: {e}"))?,
                    ),
                    TargetFile::BlockOf(m) => ScriptTarget::BlockOf(
                        resolve(&graph, m).map_err(|e| format!("script step {k}: {e}"))?,
                    ),
                };
                out.push(ScriptStep { player, target });
            }
            Some(out)
        }
        None => None,
    };
    Ok(Loaded {
        name: name.to_string(),
        graph,
        profile,
        initial,
        script,
    })
}

fn parse_partition_blocks(g: &Graph, blocks: &[Vec<Member>]) -> Result<Partition, String> {
    let mut sets = Vec::with_capacity(blocks.len());
    for b in blocks {
        sets.push(resolve_set(g, b).map_err(|e| format!("initial partition: {e}"))?);
    }
    let pi = Partition::from_sets(g.n(), sets).map_err(|e| format!("initial partition: {e}"))?;
    if !pi.is_feasible(g) {
        return Err("initial partition: some block is not connected".into());
    }
    Ok(pi)
}

/// Loads an instance from a JSON file path or builds it from the catalog.
fn load_instance(spec: &str) -> Result<Loaded, String> {
    if Path::new(spec).exists() {
        let text = std::fs::read_to_string(spec).map_err(|e| format!("{spec}: {e}"))?;
        let file: InstanceFile =
            serde_json::from_str(&text).map_err(|e| format!("{spec}: {e}"))?;
        let name = Path::new(spec)
            .file_stem()
            .map(|s| s.to_string_lossy().into_owned())
            .unwrap_or_else(|| spec.to_string());
        return instance_from_file(&name, file);
    }
    if spec.ends_with(".json") {
        return Err(format!("file not found: {spec}"));
    }
    match build_example(spec) {
        Ok(ex) => Ok(ex.into()),
        Err(ExamplesError::UnknownExample(_)) => Err(format!(
            "`{spec}` is neither a file nor a catalog entry; catalog: {}",
            crate::examples::catalog().join(", ")
        )),
        Err(e) => Err(e.to_string()),
    }
}

fn instance_to_file(inst: &Loaded) -> InstanceFile {
    let g = &inst.graph;
    let member = |i: Player| -> Member {
        if g.labels().is_some() {
            Member::Name(g.player_name(i))
        } else {
            Member::Index(i)
        }
    };
    let set_out = |s: PlayerSet| -> Vec<Member> { s.iter().map(member).collect() };
    let preferences = match &inst.profile {
        PreferenceProfile::Ranked(rankings) => PrefsFile::Ranked {
            players: rankings
                .iter()
                .map(|r| RankedFile {
                    tiers: r
                        .tiers()
                        .iter()
                        .map(|tier| tier.iter().map(|&s| set_out(s)).collect())
                        .collect(),
                    default_tier: r.default_tier(),
                })
                .collect(),
        },
        PreferenceProfile::Additive(v) => PrefsFile::Additive {
            values: v
                .rows()
                .iter()
                .map(|row| {
                    row.iter()
                        .map(|r| {
                            if r.is_integer() {
                                ValueFile::Int(*r.numer())
                            } else {
                                ValueFile::Text(format!("{}/{}", r.numer(), r.denom()))
                            }
                        })
                        .collect()
                })
                .collect(),
        },
    };
    InstanceFile {
        graph: GraphFile {
            n: g.n(),
            edges: g.edges().to_vec(),
            labels: g.labels().map(|ls| ls.to_vec()),
        },
        preferences,
        initial: inst
            .initial
            .as_ref()
            .map(|pi| pi.blocks().iter().map(|&b| set_out(b)).collect()),
        script: inst.script.as_ref().map(|steps| {
            steps
                .iter()
                .map(|s| ScriptStepFile {
                    player: member(s.player),
                    target: match &s.target {
                        ScriptTarget::Alone => TargetFile::Alone,
                        ScriptTarget::Block(b) => TargetFile::Block(set_out(*b)),
                        ScriptTarget::BlockOf(p) => TargetFile::BlockOf(member(*p)),
                    },
                })
                .collect()
        }),
    }
}

// ---------------------------------------------------------------------------
// run

fn parse_initial(g: &Graph, text: &str) -> Result<Partition, String> {
    match text {
        "singletons" => Ok(Partition::singletons(g.n())),
        "grand" => {
            let pi = Partition::grand(g.n());
            if !pi.is_feasible(g) {
                return Err("grand coalition is not connected".into());
            }
            Ok(pi)
        }
        _ => {
            let blocks: Vec<Vec<Member>> = serde_json::from_str(text)
                .map_err(|e| format!("--initial: expected `singletons`, `grand`, or a JSON array of blocks: {e}"))?;
            parse_partition_blocks(g, &blocks)
        }
    }
}

fn partition_json(pi: &Partition) -> serde_json::Value {
    json!(pi.to_vecs())
}

fn write_trace(
    dest: &str,
    outcome: &RunOutcome,
    out: &mut dyn Write,
) -> Result<(), std::io::Error> {
    let mut file;
    let sink: &mut dyn Write = if dest == "-" {
        out
    } else {
        file = std::fs::File::create(dest)?;
        &mut file
    };
    for step in &outcome.trace {
        let record = json!({
            "step": step.step,
            "player": step.player,
            "from": step.from.to_vec(),
            "to": step.to.map(|t| t.to_vec()),
            "partition": step.result.to_vecs(),
        });
        writeln!(sink, "{record}")?;
    }
    Ok(())
}

fn cmd_run(a: RunArgs, out: &mut dyn Write) -> i32 {
    let inst = match load_instance(&a.instance) {
        Ok(i) => i,
        Err(e) => return fail(e),
    };
    let g = &inst.graph;
    let initial = match &a.initial {
        Some(text) => match parse_initial(g, text) {
            Ok(pi) => pi,
            Err(e) => return fail(e),
        },
        None => inst
            .initial
            .clone()
            .unwrap_or_else(|| Partition::singletons(g.n())),
    };
    let scheduler = match a.scheduler {
        SchedulerKind::First => Scheduler::First,
        SchedulerKind::BestResponse => Scheduler::BestResponse,
        SchedulerKind::Random => match a.seed {
            Some(seed) => Scheduler::Random { seed },
            None => {
                eprintln!("error: --scheduler random requires an explicit --seed");
                return EXIT_USAGE;
            }
        },
        SchedulerKind::Scripted => match inst.script.clone() {
            Some(s) => Scheduler::Scripted(s),
            None => return fail(format!("instance `{}` has no script", inst.name)),
        },
    };
    let script_len = match &scheduler {
        Scheduler::Scripted(s) => s.len(),
        _ => 0,
    };
    let max_steps = a
        .max_steps
        .unwrap_or_else(|| (4 * g.n() * g.n()).max(script_len + 1));
    let outcome = match run_dynamics(g, &inst.profile, &initial, &scheduler, max_steps) {
        Ok(o) => o,
        Err(e) => return fail(e),
    };
    if let Some(dest) = &a.trace {
        if let Err(e) = write_trace(dest, &outcome, out) {
            return fail(format!("writing trace: {e}"));
        }
    }
    let summary = json!({
        "schema": SCHEMA_VERSION,
        "command": "run",
        "instance": inst.name,
        "status": outcome.status,
        "steps": outcome.steps,
        "initial": partition_json(&outcome.initial),
        "final": partition_json(&outcome.final_partition),
        "final_display": outcome.final_partition.display(g),
        "cycle_start": outcome.cycle_start,
        "cycle_length": outcome.cycle_length(),
        "per_player_counts": outcome.per_player_counts,
    });
    let _ = writeln!(out, "{summary}");
    match outcome.status {
        RunStatus::Converged => EXIT_OK,
        RunStatus::CycleDetected => EXIT_CYCLE,
        RunStatus::Truncated => EXIT_TRUNCATED,
    }
}

// ---------------------------------------------------------------------------
// certify

enum StartFilter {
    All,
    IrState,
    MaxCoalitions(usize),
}

fn parse_filter(text: &str) -> Result<StartFilter, String> {
    match text {
        "all" => Ok(StartFilter::All),
        "ir-state" => Ok(StartFilter::IrState),
        _ => match text.strip_prefix("max-coalitions=") {
            Some(k) => k
                .parse()
                .map(StartFilter::MaxCoalitions)
                .map_err(|_| format!("bad filter `{text}`")),
            None => Err(format!(
                "bad filter `{text}`; expected `all`, `ir-state`, or `max-coalitions=<k>`"
            )),
        },
    }
}

fn state_cap(flag: Option<usize>) -> usize {
    flag.or_else(|| {
        std::env::var("HEDONIC_MAX_ENUM")
            .ok()
            .and_then(|v| v.parse().ok())
    })
    .unwrap_or(DEFAULT_STATE_CAP)
}

fn deviation_display(g: &Graph, player: Player, target: Option<PlayerSet>) -> String {
    match target {
        Some(t) => format!("{}->{}", g.player_name(player), g.set_name(t)),
        None => format!("{}->alone", g.player_name(player)),
    }
}

fn write_dot(path: &str, g: &Graph, sg: &StateGraph) -> Result<(), std::io::Error> {
    let sinks: std::collections::HashSet<usize> = sg.sinks().into_iter().collect();
    let mut text = String::from("digraph states {\n  node [shape=box];\n");
    for (i, pi) in sg.states().iter().enumerate() {
        let shape = if sinks.contains(&i) {
            " peripheries=2"
        } else {
            ""
        };
        let _ = writeln!(text, "  {i} [label=\"{}\"{shape}];", pi.display(g));
    }
    for (i, _) in sg.states().iter().enumerate() {
        for (j, d) in sg.arcs_from(i) {
            let _ = writeln!(
                text,
                "  {i} -> {j} [label=\"{}\"];",
                deviation_display(g, d.player, d.target)
            );
        }
    }
    text.push_str("}\n");
    std::fs::write(path, text)
}

fn cmd_certify(a: CertifyArgs, out: &mut dyn Write) -> i32 {
    let inst = match load_instance(&a.instance) {
        Ok(i) => i,
        Err(e) => return fail(e),
    };
    let filter = match parse_filter(&a.filter) {
        Ok(f) => f,
        Err(e) => {
            eprintln!("error: {e}");
            return EXIT_USAGE;
        }
    };
    let cap = state_cap(a.max_states);
    let g = &inst.graph;
    let sg = match build_state_graph_with_cap(g, &inst.profile, cap) {
        Ok(sg) => sg,
        Err(OracleError::TooManyStates { cap }) => {
            eprintln!("error: more than {cap} feasible partitions; raise HEDONIC_MAX_ENUM or --max-states");
            return EXIT_TOO_LARGE;
        }
        Err(e) => return fail(e),
    };
    let profile = &inst.profile;
    let cert = match &filter {
        StartFilter::All => certify_convergence_from(&sg, |_| true),
        StartFilter::IrState => certify_convergence_from(&sg, |pi| is_ir_partition(profile, pi)),
        StartFilter::MaxCoalitions(k) => certify_convergence_from(&sg, |pi| pi.len() <= *k),
    };
    if let Some(path) = &a.dot {
        if let Err(e) = write_dot(path, g, &sg) {
            return fail(format!("writing dot: {e}"));
        }
    }
    let longest = longest_trajectory(&sg).ok();
    let (certified, cycle) = match &cert {
        Certification::Certified => (true, None),
        Certification::CounterCycle(states) => (
            false,
            Some(
                states
                    .iter()
                    .map(|pi| pi.display(g))
                    .collect::<Vec<String>>(),
            ),
        ),
    };
    let summary = json!({
        "schema": SCHEMA_VERSION,
        "command": "certify",
        "instance": inst.name,
        "filter": a.filter,
        "states": sg.n_states(),
        "arcs": sg.n_arcs(),
        "sinks": sg.sinks().len(),
        "certified": certified,
        "cycle": cycle,
        "longest_trajectory": longest.as_ref().map(|(len, _)| len),
    });
    let _ = writeln!(out, "{summary}");
    if certified {
        EXIT_OK
    } else {
        EXIT_CYCLE
    }
}

// ---------------------------------------------------------------------------
// reproduce

/// The scripted entries replayed by `reproduce all`.
pub fn reproduce_battery() -> Vec<String> {
    let mut names = vec![
        "cycle3".to_string(),
        "path_ir8".to_string(),
        "path_2coalitions".to_string(),
        "star_general".to_string(),
        "almost_star".to_string(),
        "tree_monotone".to_string(),
        "tree_monotone_01".to_string(),
    ];
    names.extend((5..=8).map(|n| format!("cycle_n:{n}")));
    names.extend((2..=6).map(|t| format!("star_lb:{t}")));
    names.extend((3..=10).map(|n| format!("path_quadratic:{n}")));
    names.extend((1..=6).map(|t| format!("tree_exponential:{t}")));
    names
}

/// Replays one catalog entry and checks the documented outcome. Returns a
/// mismatch description on failure.
fn replay_entry(name: &str) -> Result<RunOutcome, String> {
    let ex = build_example(name).map_err(|e| e.to_string())?;
    let expect = expected_run(name).map_err(|e| e.to_string())?;
    let script = ex
        .script
        .clone()
        .ok_or_else(|| format!("{name}: no script"))?;
    let outcome = run_dynamics(
        &ex.graph,
        &ex.profile,
        &ex.initial,
        &Scheduler::Scripted(script),
        ex.default_max_steps(),
    )
    .map_err(|e| format!("{name}: {e}"))?;
    let got = (outcome.status, outcome.steps, outcome.cycle_length());
    let want = (expect.status, expect.steps, expect.cycle_length);
    if got != want {
        return Err(format!(
            "{name}: expected {:?} steps={} cycle={:?}, got {:?} steps={} cycle={:?}",
            want.0, want.1, want.2, got.0, got.1, got.2
        ));
    }
    if let Some(t) = name.strip_prefix("tree_exponential:") {
        let t: usize = t.parse().unwrap();
        let want_root = (1usize << (t + 1)) - 2;
        let got_root = outcome.per_player_counts[0];
        if got_root != want_root {
            return Err(format!(
                "{name}: expected {want_root} deviations by x1, got {got_root}"
            ));
        }
        let rt = RootedTree::new(&ex.graph, 0).expect("comb is a tree");
        let bound = tree_deviation_bound(&rt);
        if bound != want_root as u64 {
            return Err(format!(
                "{name}: root bound {bound} does not match the realized count {want_root}"
            ));
        }
    }
    Ok(outcome)
}

fn cmd_reproduce(a: ReproduceArgs, out: &mut dyn Write) -> i32 {
    let names = if a.name == "all" {
        reproduce_battery()
    } else {
        vec![a.name.clone()]
    };
    let mut mismatches = 0usize;
    for name in &names {
        match replay_entry(name) {
            Ok(outcome) => {
                let _ = writeln!(
                    out,
                    "ok {name} {} steps={} cycle={}",
                    serde_json::to_value(outcome.status)
                        .unwrap()
                        .as_str()
                        .unwrap(),
                    outcome.steps,
                    outcome
                        .cycle_length()
                        .map_or_else(|| "-".to_string(), |c| c.to_string()),
                );
            }
            Err(diff) => {
                mismatches += 1;
                let _ = writeln!(out, "MISMATCH {diff}");
            }
        }
    }
    let summary = json!({
        "schema": SCHEMA_VERSION,
        "command": "reproduce",
        "checked": names.len(),
        "mismatches": mismatches,
    });
    let _ = writeln!(out, "{summary}");
    if mismatches == 0 {
        EXIT_OK
    } else {
        EXIT_MISMATCH
    }
}

// ---------------------------------------------------------------------------
// bound

fn cmd_bound(a: BoundArgs, out: &mut dyn Write) -> i32 {
    let inst = match load_instance(&a.instance) {
        Ok(i) => i,
        Err(e) => return fail(e),
    };
    let g = &inst.graph;
    let roots: Vec<Player> = if a.root == "all" {
        (0..g.n()).collect()
    } else if let Some(p) = g.player_by_label(&a.root) {
        vec![p]
    } else if let Ok(i) = a.root.parse::<usize>() {
        if i >= g.n() {
            return fail(format!("root index {i} out of range (n={})", g.n()));
        }
        vec![i]
    } else {
        return fail(format!("unknown root `{}`", a.root));
    };
    let mut bounds = Vec::with_capacity(roots.len());
    for r in roots {
        let rt = match RootedTree::new(g, r) {
            Ok(rt) => rt,
            Err(e) => return fail(e),
        };
        bounds.push(json!({
            "root": g.player_name(r),
            "bound": tree_deviation_bound(&rt),
            "coefficients": (0..g.n())
                .map(|j| m_coefficient(&rt, j, r).expect("root reaches every vertex"))
                .collect::<Vec<u64>>(),
        }));
    }
    let max = bounds
        .iter()
        .map(|b| b["bound"].as_u64().unwrap())
        .max()
        .unwrap();
    let summary = json!({
        "schema": SCHEMA_VERSION,
        "command": "bound",
        "instance": inst.name,
        "bounds": bounds,
        "max": max,
    });
    let _ = writeln!(out, "{summary}");
    EXIT_OK
}

// ---------------------------------------------------------------------------
// export / validate

fn cmd_export(a: ExportArgs, out: &mut dyn Write) -> i32 {
    let ex = match build_example(&a.name) {
        Ok(ex) => ex,
        Err(e) => return fail(e),
    };
    let file = instance_to_file(&ex.into());
    let text = serde_json::to_string_pretty(&file).expect("instance serializes");
    if a.out == "-" {
        let _ = writeln!(out, "{text}");
    } else if let Err(e) = std::fs::write(&a.out, text + "\n") {
        return fail(format!("{}: {e}", a.out));
    }
    EXIT_OK
}

fn cmd_validate(a: ValidateArgs, out: &mut dyn Write) -> i32 {
    let inst = match load_instance(&a.instance) {
        Ok(i) => i,
        Err(e) => return fail(e),
    };
    let g = &inst.graph;
    // class predicates refuse graphs beyond the enumeration threshold; on
    // such instances the class is reported as unknown
    let class = |r: Result<bool, PrefsError>| -> serde_json::Value {
        match r {
            Ok(b) => json!(b),
            Err(_) => serde_json::Value::Null,
        }
    };
    let las = match &inst.profile {
        PreferenceProfile::Additive(_) => class(is_las(g, &inst.profile)),
        PreferenceProfile::Ranked(_) => serde_json::Value::Null,
    };
    let summary = json!({
        "schema": SCHEMA_VERSION,
        "command": "validate",
        "instance": inst.name,
        "players": g.n(),
        "edges": g.edges().len(),
        "topology": classify_topology(g),
        "kind": if inst.profile.is_additive() { "additive" } else { "ranked" },
        "classes": {
            "individually_rational": class(is_individually_rational(g, &inst.profile)),
            "monotone": class(is_monotone(g, &inst.profile)),
            "las": las,
        },
        "initial": inst.initial.as_ref().map(partition_json),
        "initial_ir": inst.initial.as_ref().map(|pi| is_ir_partition(&inst.profile, pi)),
        "script_steps": inst.script.as_ref().map(|s| s.len()),
    });
    let _ = writeln!(out, "{summary}");
    EXIT_OK
}
