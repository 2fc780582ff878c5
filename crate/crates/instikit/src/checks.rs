//! Static and dynamic consistency checks over composite systems, with
//! replayable counterexample traces.
//!
//! Dynamic checks are exhaustive within explicit bounds (pool capacity,
//! exploration budget), never sampled. Witnesses come from a breadth-first
//! exploration with a fixed successor order, so reported traces are
//! minimal-length, canonical, and byte-stable across runs.

use std::collections::{BTreeMap, BTreeSet};

use serde::Serialize;
use thiserror::Error;

use crate::concrete::{eval_guard, ConcreteEnv, ConcreteError, GuardExpr, Store};
use crate::dsl::resolve::{MsgPattern, ResolvedCheck, ResolvedSystem};
use crate::dsl::ast::Mode;
use crate::env::{EnvSentence, EnvStructure};
use crate::psm::ERROR_STATE;
use crate::sm::PoolItem;
use crate::system::{
    explore, Exploration, InstanceKind, IssueKind, Stimulus, StepKind, SysConfig,
    SysStep, SystemError, SystemModel, SystemRuntime,
};

#[derive(Debug, Error)]
pub enum CheckError {
    #[error(transparent)]
    System(#[from] SystemError),
    #[error(transparent)]
    Concrete(#[from] ConcreteError),
    #[error(transparent)]
    Env(#[from] crate::env::EnvError),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Verdict {
    Pass,
    Fail,
    /// The exploration budget ran out before a definitive answer.
    Inconclusive,
}

/// Which connector properties to evaluate.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub enum ConnectorProp {
    Error,
    Deadlock,
    Overflow,
}

impl ConnectorProp {
    pub fn all() -> BTreeSet<ConnectorProp> {
        BTreeSet::from([
            ConnectorProp::Error,
            ConnectorProp::Deadlock,
            ConnectorProp::Overflow,
        ])
    }
}

/// Bounds and switches shared by the dynamic checks.
#[derive(Clone, Debug)]
pub struct RunSettings {
    pub capacity: usize,
    pub budget: usize,
    pub connector_props: BTreeSet<ConnectorProp>,
}

impl Default for RunSettings {
    fn default() -> Self {
        RunSettings {
            capacity: 4,
            budget: 100_000,
            connector_props: ConnectorProp::all(),
        }
    }
}

/// One rendered step of a witness trace.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct TraceStep {
    pub instance: String,
    pub kind: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub consumed: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub fired_to: Option<String>,
    #[serde(skip_serializing_if = "Vec::is_empty", default)]
    pub emitted: Vec<String>,
    #[serde(skip_serializing_if = "Vec::is_empty", default)]
    pub internalized: Vec<String>,
    pub config: String,
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize)]
pub struct CheckStats {
    /// Configurations visited.
    pub explored: usize,
    /// Edges examined.
    pub edges: usize,
    pub budget: usize,
    /// Wall time; excluded from serialized reports so identical runs are
    /// byte-identical.
    #[serde(skip)]
    pub time_ms: Option<u64>,
}

/// Outcome of one check, serializable for reports.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct CheckReport {
    pub id: String,
    pub subject: String,
    pub verdict: Verdict,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub witness: Option<Vec<TraceStep>>,
    #[serde(skip_serializing_if = "Vec::is_empty", default)]
    pub notes: Vec<String>,
    pub stats: CheckStats,
}

impl CheckReport {
    fn new(id: &str, subject: &str) -> Self {
        CheckReport {
            id: id.to_string(),
            subject: subject.to_string(),
            verdict: Verdict::Pass,
            witness: None,
            notes: Vec::new(),
            stats: CheckStats::default(),
        }
    }
}

/// An internal witness: a root configuration and the steps leading to the
/// violation, replayable through the runtime semantics.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Witness {
    pub root: SysConfig,
    pub steps: Vec<SysStep>,
}

/// A check outcome paired with its replayable witness, when one exists.
#[derive(Clone, Debug)]
pub struct Outcome {
    pub report: CheckReport,
    pub witness: Option<Witness>,
}

impl Outcome {
    fn plain(report: CheckReport) -> Self {
        Outcome {
            report,
            witness: None,
        }
    }
}

/// Replays a witness through the runtime: the root must be an initial
/// configuration and every step a successor of the previous configuration.
/// Returns the final configuration.
pub fn replay(runtime: &SystemRuntime, witness: &Witness) -> Result<SysConfig, String> {
    if !runtime.initial_configs().contains(&witness.root) {
        return Err("witness root is not an initial configuration".to_string());
    }
    let mut current = witness.root.clone();
    for (i, step) in witness.steps.iter().enumerate() {
        let succs = runtime
            .successors(&current)
            .map_err(|e| format!("step {i}: {e}"))?;
        if !succs.contains(step) {
            return Err(format!("step {i} is not a successor of its configuration"));
        }
        current = step.next.clone();
    }
    Ok(current)
}

// ---- rendering ----

fn render_store(env: &ConcreteEnv, id: usize) -> String {
    let store = env.space.store_of(id);
    let parts: Vec<String> = store.iter().map(|(k, v)| format!("{k}={v}")).collect();
    format!("{{{}}}", parts.join(", "))
}

/// Compact rendering of a system configuration.
pub fn render_config(model: &SystemModel, cfg: &SysConfig) -> String {
    let mut parts = Vec::new();
    for (i, inst) in model.instances.iter().enumerate() {
        let store = inst
            .env()
            .map(|e| render_store(e, cfg.stores[i]))
            .unwrap_or_default();
        parts.push(format!(
            "{}: {} {} {}",
            inst.name, cfg.controls[i], store, cfg.pools[i]
        ));
    }
    format!("{} | delivered={}", parts.join(" | "), cfg.cursor)
}

fn render_step(model: &SystemModel, step: &SysStep) -> TraceStep {
    let (instance, kind, consumed, fired_to) = match &step.kind {
        StepKind::Deliver { instance, event } => (
            *instance,
            "deliver".to_string(),
            Some(event.clone()),
            None,
        ),
        StepKind::Fire {
            instance,
            item,
            target_control,
        } => (
            *instance,
            "fire".to_string(),
            Some(item.to_string()),
            Some(target_control.clone()),
        ),
        StepKind::Discard { instance, item } => (
            *instance,
            "discard".to_string(),
            Some(item.to_string()),
            None,
        ),
        StepKind::ProtocolError { instance, item } => (
            *instance,
            "protocol-error".to_string(),
            Some(item.to_string()),
            Some(ERROR_STATE.to_string()),
        ),
    };
    TraceStep {
        instance: model.instances[instance].name.clone(),
        kind,
        consumed,
        fired_to,
        emitted: step.external.iter().map(|(_, m)| m.clone()).collect(),
        internalized: step
            .internalized
            .iter()
            .map(|(to, e)| format!("{}<-{}", model.instances[*to].name, e))
            .collect(),
        config: render_config(model, &step.next),
    }
}

fn witness_of(
    model: &SystemModel,
    exploration: &Exploration,
    target: usize,
) -> (Vec<TraceStep>, Witness) {
    let steps = exploration.path_to(target);
    let mut root_index = target;
    while let Some((parent, _)) = exploration.parents.get(&root_index) {
        root_index = *parent;
    }
    let rendered = steps.iter().map(|s| render_step(model, s)).collect();
    (
        rendered,
        Witness {
            root: exploration.configs[root_index].clone(),
            steps,
        },
    )
}

// ---- static checks ----

fn declared_check_issues(sys: &ResolvedSystem, kinds: &[IssueKind]) -> Vec<String> {
    let mut notes = Vec::new();
    for issue in &sys.issues {
        if kinds.contains(&issue.kind) {
            notes.push(format!("{}: {}", issue.connector, issue.detail));
        }
    }
    for c in &sys.model.connectors {
        for issue in &c.issues {
            if kinds.contains(&issue.kind) {
                notes.push(format!("{}: {}", issue.connector, issue.detail));
            }
        }
    }
    notes
}

/// Static check: guards and actions only use declared vocabulary, and every
/// sent message is deliverable through a connector or leaves through a
/// declared external port (with matching arity, via the ground routing).
pub fn static_interface_check(sys: &ResolvedSystem) -> CheckReport {
    let mut report = CheckReport::new("static.interface", &sys.model.name);
    let model = &sys.model;
    for (i, inst) in model.instances.iter().enumerate() {
        let Some(env) = inst.env() else {
            continue; // typing problems belong to the instance check
        };
        if let Err(e) = env.structure.validate_over(&env.signature) {
            report
                .notes
                .push(format!("instance '{}': {e}", inst.name));
        }
        // Every message port must be wired or external.
        let ports: BTreeSet<&String> = env.message_decls.iter().map(|d| &d.port).collect();
        for port in ports {
            let external = model.externals.contains(&(i, port.clone()));
            let wired = model
                .connectors
                .iter()
                .any(|c| c.ends.iter().any(|(idx, p)| *idx == i && p == port));
            if !external && !wired {
                report.notes.push(format!(
                    "port '{}.{port}' is neither connected nor declared external",
                    inst.name
                ));
            }
        }
    }
    report
        .notes
        .extend(declared_check_issues(sys, &[IssueKind::Routing]));
    if !report.notes.is_empty() {
        report.verdict = Verdict::Fail;
    }
    report
}

/// Static check: every instance references a declared machine or protocol
/// type, and ports used by connectors and externals exist on those types.
pub fn static_instance_check(sys: &ResolvedSystem) -> CheckReport {
    let mut report = CheckReport::new("static.instance", &sys.model.name);
    for inst in &sys.model.instances {
        if inst.kind.is_none() {
            report.notes.push(format!(
                "instance '{}' references undeclared type '{}'",
                inst.name, inst.type_name
            ));
        }
    }
    report.notes.extend(declared_check_issues(
        sys,
        &[IssueKind::InstanceType, IssueKind::Port],
    ));
    if !report.notes.is_empty() {
        report.verdict = Verdict::Fail;
    }
    report
}

// ---- dynamic checks ----

fn runtime_for<'a>(
    sys: &'a ResolvedSystem,
    stimuli: &Option<Vec<Stimulus>>,
    settings: &RunSettings,
) -> Result<SystemRuntime<'a>, SystemError> {
    let mut rt = SystemRuntime::new(&sys.model, settings.capacity)?;
    if let Some(st) = stimuli {
        rt = rt.with_stimuli(st.clone());
    }
    Ok(rt)
}

fn combined_store(model: &SystemModel, cfg: &SysConfig) -> Store {
    let mut store = Store::new();
    for (i, inst) in model.instances.iter().enumerate() {
        if let Some(env) = inst.env() {
            for (name, value) in env.space.store_of(cfg.stores[i]) {
                store.insert(format!("{i}:{name}"), value);
            }
        }
    }
    store
}

fn fill_stats(report: &mut CheckReport, exploration: &Exploration, settings: &RunSettings) {
    report.stats.explored = exploration.configs.len();
    report.stats.edges = exploration.edges.len();
    report.stats.budget = settings.budget;
}

/// Dynamic check 1: does the system satisfy a state invariant at every
/// reachable configuration? Fails with the shortest witness trace.
pub fn check_invariant(
    sys: &ResolvedSystem,
    id: &str,
    label: &str,
    inv: &GuardExpr,
    stimuli: &Option<Vec<Stimulus>>,
    settings: &RunSettings,
) -> Result<Outcome, CheckError> {
    let runtime = runtime_for(sys, stimuli, settings)?;
    let exploration = explore(&runtime, settings.budget)?;
    let mut report = CheckReport::new(id, label);
    fill_stats(&mut report, &exploration, settings);
    let no_params = BTreeMap::new();
    for (index, cfg) in exploration.configs.iter().enumerate() {
        let store = combined_store(&sys.model, cfg);
        if !eval_guard(inv, &store, &no_params)? {
            let (rendered, witness) = witness_of(&sys.model, &exploration, index);
            report.verdict = Verdict::Fail;
            report
                .notes
                .push(format!("violated at {}", render_config(&sys.model, cfg)));
            report.witness = Some(rendered);
            return Ok(Outcome {
                report,
                witness: Some(witness),
            });
        }
    }
    if !exploration.complete {
        report.verdict = Verdict::Inconclusive;
        report
            .notes
            .push("exploration budget exhausted before the state space".to_string());
    }
    Ok(Outcome::plain(report))
}

fn ground_args_of(event: &str, name: &str) -> Option<Vec<i64>> {
    if event == name {
        return Some(Vec::new());
    }
    let rest = event.strip_prefix(name)?;
    let inner = rest.strip_prefix('(')?.strip_suffix(')')?;
    if inner.is_empty() {
        return Some(Vec::new());
    }
    inner
        .split(',')
        .map(|s| s.parse::<i64>().ok())
        .collect::<Option<Vec<_>>>()
}

/// Dynamic check 1b: every reachable firing that consumes the event from a
/// data state satisfying `pre` must satisfy `post` at the finishing of the
/// fired transition.
#[allow(clippy::too_many_arguments)]
pub fn check_pre_post(
    sys: &ResolvedSystem,
    id: &str,
    label: &str,
    instance: usize,
    event: &str,
    params: &[String],
    pre: &GuardExpr,
    post: &GuardExpr,
    stimuli: &Option<Vec<Stimulus>>,
    settings: &RunSettings,
) -> Result<Outcome, CheckError> {
    let runtime = runtime_for(sys, stimuli, settings)?;
    let exploration = explore(&runtime, settings.budget)?;
    let mut report = CheckReport::new(id, label);
    fill_stats(&mut report, &exploration, settings);
    for (source, step) in &exploration.edges {
        let StepKind::Fire {
            instance: actor,
            item: PoolItem::Event(e),
            ..
        } = &step.kind
        else {
            continue;
        };
        if *actor != instance {
            continue;
        }
        let Some(args) = ground_args_of(e, event) else {
            continue;
        };
        if args.len() != params.len() {
            continue;
        }
        let valuation: BTreeMap<String, i64> = params
            .iter()
            .cloned()
            .zip(args.iter().copied())
            .collect();
        let before = combined_store(&sys.model, &exploration.configs[*source]);
        if !eval_guard(pre, &before, &valuation)? {
            continue;
        }
        let after = combined_store(&sys.model, &step.next);
        if !eval_guard(post, &after, &valuation)? {
            let (mut rendered, mut witness) = witness_of(&sys.model, &exploration, *source);
            rendered.push(render_step(&sys.model, step));
            witness.steps.push(step.clone());
            report.verdict = Verdict::Fail;
            report.notes.push(format!(
                "postcondition fails after consuming {e} at {}",
                render_config(&sys.model, &step.next)
            ));
            report.witness = Some(rendered);
            return Ok(Outcome {
                report,
                witness: Some(witness),
            });
        }
    }
    if !exploration.complete {
        report.verdict = Verdict::Inconclusive;
        report
            .notes
            .push("exploration budget exhausted before the state space".to_string());
    }
    Ok(Outcome::plain(report))
}

/// Dynamic check 2: do the protocol state machines at the ends of a connector
/// fit together? Reports protocol-error reachability, deadlock (a reachable
/// configuration with a non-empty pool and no outgoing step), and pool
/// overflow beyond the capacity, each independently toggleable.
pub fn check_connector(
    sys: &ResolvedSystem,
    id: &str,
    label: &str,
    connector: usize,
    stimuli: &Option<Vec<Stimulus>>,
    settings: &RunSettings,
) -> Result<Outcome, CheckError> {
    let runtime = runtime_for(sys, stimuli, settings)?;
    let exploration = explore(&runtime, settings.budget)?;
    let mut report = CheckReport::new(id, label);
    fill_stats(&mut report, &exploration, settings);
    let model = &sys.model;
    let conn = &model.connectors[connector];
    let end_instances: Vec<usize> = conn.ends.iter().map(|(i, _)| *i).collect();
    let behavioral_only = end_instances.iter().all(|&i| {
        matches!(
            model.instances[i].kind,
            Some(InstanceKind::Behavioral(_))
        )
    });

    let mut failure: Option<(usize, String)> = None;
    let mut failed_edge: Option<(usize, SysStep, String)> = None;

    if settings.connector_props.contains(&ConnectorProp::Error) {
        let mut found = None;
        for (index, cfg) in exploration.configs.iter().enumerate() {
            let monitor_error = cfg.monitors[connector].iter().any(|s| s.is_empty());
            let instance_error = end_instances
                .iter()
                .any(|&i| cfg.controls[i] == ERROR_STATE);
            if monitor_error || instance_error {
                found = Some(index);
                break;
            }
        }
        match found {
            Some(index) => {
                report
                    .notes
                    .push("protocol error state: reachable".to_string());
                if failure.is_none() {
                    failure = Some((index, "protocol error".to_string()));
                }
            }
            None => report
                .notes
                .push("protocol error state: not reachable".to_string()),
        }
    }

    if settings.connector_props.contains(&ConnectorProp::Deadlock) {
        if behavioral_only {
            report.notes.push(
                "deadlock: impossible (behavioural machines discard unmatched events)"
                    .to_string(),
            );
        } else {
            let mut found = None;
            for (index, cfg) in exploration.configs.iter().enumerate() {
                if cfg.pools.iter().all(|p| p.is_empty()) {
                    continue;
                }
                if runtime.successors(cfg)?.is_empty() {
                    found = Some(index);
                    break;
                }
            }
            match found {
                Some(index) => {
                    report.notes.push("deadlock: reachable".to_string());
                    if failure.is_none() {
                        failure = Some((index, "deadlock".to_string()));
                    }
                }
                None => report.notes.push("deadlock: not reachable".to_string()),
            }
        }
    }

    if settings.connector_props.contains(&ConnectorProp::Overflow) {
        let mut found = None;
        for (source, step) in &exploration.edges {
            if step.overflow {
                found = Some((*source, step.clone()));
                break;
            }
        }
        match found {
            Some((source, step)) => {
                report.notes.push(format!(
                    "pool overflow: reachable at capacity {}",
                    settings.capacity
                ));
                if failure.is_none() && failed_edge.is_none() {
                    failed_edge = Some((source, step, "pool overflow".to_string()));
                }
            }
            None => report.notes.push(format!(
                "pool overflow: none at capacity {}",
                settings.capacity
            )),
        }
    }

    let mut witness = None;
    if let Some((index, what)) = failure {
        let (rendered, w) = witness_of(model, &exploration, index);
        report.verdict = Verdict::Fail;
        report.notes.push(format!(
            "{what} witnessed at {}",
            render_config(model, &exploration.configs[index])
        ));
        report.witness = Some(rendered);
        witness = Some(w);
    } else if let Some((source, step, what)) = failed_edge {
        let (mut rendered, mut w) = witness_of(model, &exploration, source);
        rendered.push(render_step(model, &step));
        w.steps.push(step);
        report.verdict = Verdict::Fail;
        report.notes.push(format!("{what} witnessed"));
        report.witness = Some(rendered);
        witness = Some(w);
    } else if !exploration.complete {
        report.verdict = Verdict::Inconclusive;
        report
            .notes
            .push("exploration budget exhausted before the state space".to_string());
    }
    Ok(Outcome { report, witness })
}

/// Dynamic check 3: is a message sequence realizable? In strict mode some
/// run's send trace must equal the sequence exactly; in loose mode the
/// sequence must embed as a subsequence of some run's sends. Runs are finite
/// prefixes of the exploration.
pub fn check_interaction(
    sys: &ResolvedSystem,
    id: &str,
    label: &str,
    mode: Mode,
    sequence: &[MsgPattern],
    stimuli: &Option<Vec<Stimulus>>,
    settings: &RunSettings,
) -> Result<Outcome, CheckError> {
    let runtime = runtime_for(sys, stimuli, settings)?;
    let mut report = CheckReport::new(id, label);
    report.stats.budget = settings.budget;

    // BFS over (configuration, matched prefix length).
    type Node = (SysConfig, usize);
    let mut queue: std::collections::VecDeque<Node> = Default::default();
    let mut seen: BTreeSet<Node> = BTreeSet::new();
    let mut parents: BTreeMap<Node, (Node, SysStep)> = BTreeMap::new();
    let mut complete = true;
    let mut success: Option<Node> = None;

    let advance = |matched: usize, step: &SysStep| -> Option<usize> {
        let mut m = matched;
        for send in &step.sends {
            if m < sequence.len() && sequence[m].matches(send.0, &send.1) {
                m += 1;
            } else if mode == Mode::Strict {
                // Strict runs must match every send, and must not send past
                // the end of the sequence.
                return None;
            }
        }
        Some(m)
    };

    for root in runtime.initial_configs() {
        let node = (root, 0usize);
        if seen.insert(node.clone()) {
            queue.push_back(node);
        }
    }
    if sequence.is_empty() {
        // The zero-step run realizes the empty sequence in both modes.
        success = queue.front().cloned();
    }
    while let Some(node) = queue.pop_front() {
        if success.is_some() {
            break;
        }
        for step in runtime.successors(&node.0)? {
            let Some(m) = advance(node.1, &step) else {
                continue;
            };
            let next = (step.next.clone(), m);
            if seen.contains(&next) {
                continue;
            }
            if seen.len() >= settings.budget {
                complete = false;
                continue;
            }
            seen.insert(next.clone());
            parents.insert(next.clone(), (node.clone(), step.clone()));
            if m == sequence.len() {
                success = Some(next.clone());
                break;
            }
            queue.push_back(next);
        }
    }
    report.stats.explored = seen.len();

    match success {
        Some(node) => {
            // The realizing run is reported as the witness trace.
            let mut steps = Vec::new();
            let mut cursor = node.clone();
            while let Some((parent, step)) = parents.get(&cursor) {
                steps.push(step.clone());
                cursor = parent.clone();
            }
            steps.reverse();
            report.verdict = Verdict::Pass;
            report
                .notes
                .push(format!("realized after {} steps", steps.len()));
            report.witness = Some(
                steps
                    .iter()
                    .map(|s| render_step(&sys.model, s))
                    .collect(),
            );
            Ok(Outcome {
                report,
                witness: Some(Witness {
                    root: cursor.0,
                    steps,
                }),
            })
        }
        None => {
            if complete {
                report.verdict = Verdict::Fail;
                report
                    .notes
                    .push("no run realizes the sequence".to_string());
            } else {
                report.verdict = Verdict::Inconclusive;
                report
                    .notes
                    .push("budget exhausted before a realizing run was found".to_string());
            }
            Ok(Outcome::plain(report))
        }
    }
}

/// Checks the sequential-composition condition between two environment
/// sentences: strict — a state satisfies both the first post-condition and
/// the second pre-condition; loose — some state satisfying the second
/// pre-condition is reachable from the first post-condition by any finite
/// action sequence.
pub fn check_hoare_pair(
    env: &EnvStructure,
    s1: &EnvSentence,
    s2: &EnvSentence,
    mode: Mode,
) -> Result<bool, CheckError> {
    let post1 = env.guard_states(&s1.post)?;
    let pre2 = env.guard_states(&s2.pre)?;
    match mode {
        Mode::Strict => Ok(post1.intersection(pre2).next().is_some()),
        Mode::Loose => {
            let mut frontier: Vec<usize> = post1.iter().copied().collect();
            let mut seen: BTreeSet<usize> = post1.clone();
            while let Some(state) = frontier.pop() {
                if pre2.contains(&state) {
                    return Ok(true);
                }
                for action in env.action_interp.keys() {
                    let (succ, _) = env.apply(action, state)?;
                    if seen.insert(*succ) {
                        frontier.push(*succ);
                    }
                }
            }
            Ok(false)
        }
    }
}

/// Dynamic check over a whole chain: every adjacent pair must satisfy
/// [`check_hoare_pair`].
pub fn check_hoare_chain(
    id: &str,
    label: &str,
    env: &ConcreteEnv,
    sentences: &[EnvSentence],
    mode: Mode,
) -> Result<Outcome, CheckError> {
    let mut report = CheckReport::new(id, label);
    report.stats.explored = env.structure.size;
    for (i, pair) in sentences.windows(2).enumerate() {
        let ok = check_hoare_pair(&env.structure, &pair[0], &pair[1], mode)?;
        if !ok {
            report.verdict = Verdict::Fail;
            report.notes.push(format!(
                "no state connects '{}' to '{}' (pair {i})",
                pair[0], pair[1]
            ));
        }
    }
    Ok(Outcome::plain(report))
}

/// Runs every static check and declared dynamic check of a resolved system,
/// in declaration order.
pub fn run_all(
    sys: &ResolvedSystem,
    settings: &RunSettings,
    filter: &[String],
) -> Result<Vec<Outcome>, CheckError> {
    let selected = |id: &str| filter.is_empty() || filter.iter().any(|f| id.starts_with(f));
    let mut outcomes = Vec::new();
    if selected("static.interface") {
        outcomes.push(Outcome::plain(static_interface_check(sys)));
    }
    if selected("static.instance") {
        outcomes.push(Outcome::plain(static_instance_check(sys)));
    }
    let statics_pass = outcomes
        .iter()
        .map(|o| o.report.verdict)
        .all(|v| v == Verdict::Pass);
    let runnable = sys.model.runnable().is_ok();
    for check in &sys.checks {
        if !selected(check.id()) {
            continue;
        }
        if !(statics_pass && runnable) && !matches!(check, ResolvedCheck::Chain { .. }) {
            let mut report = CheckReport::new(check.id(), "skipped");
            report.verdict = Verdict::Inconclusive;
            report
                .notes
                .push("system is not runnable (see static checks)".to_string());
            outcomes.push(Outcome::plain(report));
            continue;
        }
        let outcome = match check {
            ResolvedCheck::Invariant {
                id,
                label,
                expr,
                stimuli,
            } => check_invariant(sys, id, label, expr, stimuli, settings)?,
            ResolvedCheck::PrePost {
                id,
                label,
                instance,
                event,
                params,
                pre,
                post,
                stimuli,
            } => check_pre_post(
                sys, id, label, *instance, event, params, pre, post, stimuli, settings,
            )?,
            ResolvedCheck::Connector {
                id,
                label,
                connector,
                stimuli,
            } => check_connector(sys, id, label, *connector, stimuli, settings)?,
            ResolvedCheck::Interaction {
                id,
                label,
                mode,
                sequence,
                stimuli,
            } => check_interaction(sys, id, label, *mode, sequence, stimuli, settings)?,
            ResolvedCheck::Chain {
                id,
                label,
                mode,
                env,
                sentences,
            } => check_hoare_chain(id, label, env, sentences, *mode)?,
        };
        outcomes.push(outcome);
    }
    Ok(outcomes)
}

