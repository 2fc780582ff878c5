//! Composite systems and their execution.
//!
//! A resolved system holds named machine instances (behavioural or protocol),
//! connectors with an induced message-to-event routing, connector monitors,
//! and a stimulus stream. Execution interleaves: per step either one stimulus
//! is delivered (blocked while the target pool is full) or one instance
//! processes the selected item of its own pool. Messages routed by a
//! connector are internalised into the receiving instance's pool in send
//! order; the rest are emitted. Connector monitors advance on every
//! consumption of an alphabet event at either end of their connector.

use std::collections::{BTreeMap, BTreeSet, VecDeque};

use thiserror::Error;

use crate::concrete::{eval_guard, ConcreteEnv, ConcreteError, EventDecl};
use crate::env::DataId;
use crate::psm::{PsmSentence, ERROR_STATE};
use crate::sm::{Pool, PoolItem, SmSentence, SmSignature, TransitionRule};

#[derive(Debug, Error, PartialEq, Eq)]
pub enum SystemError {
    #[error(transparent)]
    Concrete(#[from] ConcreteError),
    #[error(transparent)]
    Env(#[from] crate::env::EnvError),
    #[error("system is not runnable: {0}")]
    NotRunnable(String),
}

/// A resolved behavioural machine.
#[derive(Clone, Debug)]
pub struct MachineModel {
    pub name: String,
    pub env_name: String,
    /// The machine's environment, extended with the guard and action names
    /// its transitions synthesized.
    pub env: ConcreteEnv,
    pub signature: SmSignature,
    pub sentence: SmSentence,
    pub initial_data: BTreeSet<DataId>,
    pub event_decls: Vec<EventDecl>,
}

/// A resolved protocol machine.
#[derive(Clone, Debug)]
pub struct ProtocolModel {
    pub name: String,
    pub env_name: String,
    pub env: ConcreteEnv,
    pub signature: SmSignature,
    pub sentence: PsmSentence,
    pub event_decls: Vec<EventDecl>,
}

/// What an instance executes.
#[derive(Clone, Debug)]
pub enum InstanceKind {
    Behavioral(MachineModel),
    Protocol(ProtocolModel),
}

/// One named instance of a composite system.
#[derive(Clone, Debug)]
pub struct Instance {
    pub name: String,
    pub type_name: String,
    /// Unresolved when the type is undeclared; static checks report it.
    pub kind: Option<InstanceKind>,
}

impl Instance {
    pub fn env(&self) -> Option<&ConcreteEnv> {
        match self.kind.as_ref()? {
            InstanceKind::Behavioral(m) => Some(&m.env),
            InstanceKind::Protocol(p) => Some(&p.env),
        }
    }

    pub fn signature(&self) -> Option<&SmSignature> {
        match self.kind.as_ref()? {
            InstanceKind::Behavioral(m) => Some(&m.signature),
            InstanceKind::Protocol(p) => Some(&p.signature),
        }
    }

    pub fn initial_control(&self) -> Option<&str> {
        match self.kind.as_ref()? {
            InstanceKind::Behavioral(m) => Some(&m.sentence.initial),
            InstanceKind::Protocol(p) => Some(&p.sentence.initial),
        }
    }

    pub fn initial_data(&self) -> BTreeSet<DataId> {
        match &self.kind {
            Some(InstanceKind::Behavioral(m)) => m.initial_data.clone(),
            Some(InstanceKind::Protocol(p)) => (0..p.env.structure.size).collect(),
            None => BTreeSet::new(),
        }
    }
}

/// What kind of wiring problem an issue reports: instance typing and port
/// existence belong to the static instance check, message routing to the
/// static interface check.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum IssueKind {
    InstanceType,
    Port,
    Routing,
}

/// A wiring issue found while building a system; surfaced by the static
/// checks.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct WiringIssue {
    pub kind: IssueKind,
    pub connector: String,
    pub detail: String,
}

/// A monitor attached to a connector end.
#[derive(Clone, Debug)]
pub struct Monitor {
    pub protocol: ProtocolModel,
    /// Ground events the monitor constrains.
    pub alphabet: BTreeSet<String>,
}

/// A connector between two instance ports.
#[derive(Clone, Debug)]
pub struct Connector {
    /// `(instance index, port)` for both ends.
    pub ends: [(usize, String); 2],
    /// `(sender instance, ground message) -> (receiver instance, ground event)`.
    pub routes: BTreeMap<(usize, String), (usize, String)>,
    pub monitors: Vec<Monitor>,
    pub issues: Vec<WiringIssue>,
}

impl Connector {
    pub fn label(&self, instances: &[Instance]) -> String {
        format!(
            "{}.{}--{}.{}",
            instances[self.ends[0].0].name,
            self.ends[0].1,
            instances[self.ends[1].0].name,
            self.ends[1].1
        )
    }
}

/// One stimulus: a ground event delivered from the environment to an
/// instance.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Stimulus {
    pub instance: usize,
    pub event: String,
}

/// A resolved composite system.
#[derive(Clone, Debug)]
pub struct SystemModel {
    pub name: String,
    pub instances: Vec<Instance>,
    pub connectors: Vec<Connector>,
    /// `(instance index, port)` pairs declared external.
    pub externals: BTreeSet<(usize, String)>,
    /// The system-wide stimulus stream.
    pub stimuli: Vec<Stimulus>,
}

impl SystemModel {
    pub fn instance_index(&self, name: &str) -> Option<usize> {
        self.instances.iter().position(|i| i.name == name)
    }

    /// All instances resolved and free of wiring issues.
    pub fn runnable(&self) -> Result<(), SystemError> {
        for inst in &self.instances {
            if inst.kind.is_none() {
                return Err(SystemError::NotRunnable(format!(
                    "instance '{}' has undeclared type '{}'",
                    inst.name, inst.type_name
                )));
            }
        }
        for c in &self.connectors {
            if let Some(issue) = c.issues.first() {
                return Err(SystemError::NotRunnable(issue.detail.clone()));
            }
        }
        Ok(())
    }
}

/// A configuration of the whole system. Monitor entries are the sets of
/// protocol states each connector monitor may be in; an empty set means the
/// monitor has observed a violation.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub struct SysConfig {
    pub stores: Vec<DataId>,
    pub pools: Vec<Pool>,
    pub controls: Vec<String>,
    /// How many stimuli have been delivered.
    pub cursor: usize,
    /// Per connector, per monitor: possible protocol states.
    pub monitors: Vec<Vec<BTreeSet<String>>>,
}

/// What a step did.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub enum StepKind {
    /// A stimulus was appended to the instance's pool.
    Deliver { instance: usize, event: String },
    /// The instance fired a transition consuming the selected item.
    Fire {
        instance: usize,
        item: PoolItem,
        target_control: String,
    },
    /// The selected item enabled nothing and was dropped (behavioural
    /// machines only).
    Discard { instance: usize, item: PoolItem },
    /// The selected event enabled no protocol transition; the instance
    /// entered the error state.
    ProtocolError { instance: usize, item: PoolItem },
}

/// One successor of a configuration.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub struct SysStep {
    pub kind: StepKind,
    /// Every message sent in this step, in program order, tagged with the
    /// sending instance.
    pub sends: Vec<(usize, String)>,
    /// The externally emitted subset of `sends`, in order.
    pub external: Vec<(usize, String)>,
    /// Events internalised into peer pools, in routing order.
    pub internalized: Vec<(usize, String)>,
    pub overflow: bool,
    pub next: SysConfig,
}

/// The executable view of a system.
pub struct SystemRuntime<'a> {
    pub model: &'a SystemModel,
    pub capacity: usize,
    /// Overrides the model's stimulus stream when set.
    pub stimuli: Vec<Stimulus>,
}

impl<'a> SystemRuntime<'a> {
    pub fn new(model: &'a SystemModel, capacity: usize) -> Result<Self, SystemError> {
        model.runnable()?;
        Ok(SystemRuntime {
            model,
            capacity,
            stimuli: model.stimuli.clone(),
        })
    }

    pub fn with_stimuli(mut self, stimuli: Vec<Stimulus>) -> Self {
        self.stimuli = stimuli;
        self
    }

    /// All initial configurations: empty pools, initial controls, every
    /// combination of the instances' initial data states, monitors at their
    /// initial protocol states.
    pub fn initial_configs(&self) -> Vec<SysConfig> {
        let n = self.model.instances.len();
        let monitors: Vec<Vec<BTreeSet<String>>> = self
            .model
            .connectors
            .iter()
            .map(|c| {
                c.monitors
                    .iter()
                    .map(|m| BTreeSet::from([m.protocol.sentence.initial.clone()]))
                    .collect()
            })
            .collect();
        let controls: Vec<String> = self
            .model
            .instances
            .iter()
            .map(|i| i.initial_control().expect("runnable").to_string())
            .collect();
        let mut configs = vec![SysConfig {
            stores: Vec::new(),
            pools: vec![Pool::empty(); n],
            controls,
            cursor: 0,
            monitors,
        }];
        for inst in &self.model.instances {
            let data = inst.initial_data();
            let mut next = Vec::with_capacity(configs.len() * data.len());
            for cfg in &configs {
                for &d in &data {
                    let mut c = cfg.clone();
                    c.stores.push(d);
                    next.push(c);
                }
            }
            configs = next;
        }
        configs
    }

    fn instance_env(&self, idx: usize) -> &ConcreteEnv {
        self.model.instances[idx].env().expect("runnable")
    }

    /// Routes one sent message. Returns the receiving `(instance, event)`
    /// when wired, or when the message self-accepts as an event of the
    /// sender's own signature.
    fn route(&self, sender: usize, msg: &str) -> Option<(usize, String)> {
        for c in &self.model.connectors {
            if let Some((to, event)) = c.routes.get(&(sender, msg.to_string())) {
                return Some((*to, event.clone()));
            }
        }
        let sig = self.model.instances[sender].signature().expect("runnable");
        if sig.events.contains(msg) {
            return Some((sender, msg.to_string()));
        }
        None
    }

    /// Advances every monitor watching `instance` for a consumption of
    /// `event`, given the consuming instance's data state before and after
    /// and the step's sends.
    fn advance_monitors(
        &self,
        cfg: &SysConfig,
        instance: usize,
        event: &str,
        store_before: DataId,
        store_after: DataId,
        sends: &BTreeSet<String>,
    ) -> Result<Vec<Vec<BTreeSet<String>>>, SystemError> {
        let mut monitors = cfg.monitors.clone();
        let env = self.instance_env(instance);
        let before = env.space.store_of(store_before);
        let after = env.space.store_of(store_after);
        let no_params = BTreeMap::new();
        for (ci, connector) in self.model.connectors.iter().enumerate() {
            if connector.ends[0].0 != instance && connector.ends[1].0 != instance {
                continue;
            }
            for (mi, monitor) in connector.monitors.iter().enumerate() {
                if !monitor.alphabet.contains(event) {
                    continue;
                }
                let states = &monitors[ci][mi];
                if states.is_empty() {
                    continue;
                }
                let mut next = BTreeSet::new();
                for rule in &monitor.protocol.sentence.rules {
                    if !states.contains(&rule.source) || rule.trigger != event {
                        continue;
                    }
                    // Pre/post guards are evaluated against the monitored
                    // (consuming) machine's data state.
                    let defs = &monitor.protocol.env.guard_defs;
                    let pre = defs
                        .get(&rule.pre)
                        .ok_or_else(|| ConcreteError::Unbound(rule.pre.clone()))?;
                    let post = defs
                        .get(&rule.post)
                        .ok_or_else(|| ConcreteError::Unbound(rule.post.clone()))?;
                    if !eval_guard(pre, &before, &no_params)?
                        || !eval_guard(post, &after, &no_params)?
                    {
                        continue;
                    }
                    if !rule.required.iter().all(|m| sends.contains(m)) {
                        continue;
                    }
                    next.insert(rule.target.clone());
                }
                monitors[ci][mi] = next;
            }
        }
        Ok(monitors)
    }

    fn fire_sends(
        &self,
        sender: usize,
        sends: &[String],
        pools: &mut Vec<Pool>,
        completion: Option<&str>,
    ) -> (Vec<(usize, String)>, Vec<(usize, String)>, bool) {
        let mut external = Vec::new();
        let mut internalized = Vec::new();
        let mut overflow = false;
        for msg in sends {
            match self.route(sender, msg) {
                Some((to, event)) => {
                    if pools[to].len() >= self.capacity {
                        overflow = true;
                    } else {
                        pools[to].push(PoolItem::Event(event.clone()));
                        internalized.push((to, event));
                    }
                }
                None => external.push((sender, msg.clone())),
            }
        }
        if let Some(state) = completion {
            if pools[sender].len() >= self.capacity {
                overflow = true;
            } else {
                pools[sender].push(PoolItem::Completion(state.to_string()));
            }
        }
        (external, internalized, overflow)
    }

    fn behavioral_steps(
        &self,
        cfg: &SysConfig,
        idx: usize,
        machine: &MachineModel,
        out: &mut Vec<SysStep>,
    ) -> Result<(), SystemError> {
        let Some((item, rest)) = cfg.pools[idx].select() else {
            return Ok(());
        };
        let mut fired_any = false;
        let rules: Vec<&TransitionRule> = machine.sentence.rules.iter().collect();
        for rule in rules {
            if rule.source != cfg.controls[idx] || rule.trigger != item {
                continue;
            }
            if !machine
                .env
                .structure
                .guard_states(&rule.guard)?
                .contains(&cfg.stores[idx])
            {
                continue;
            }
            fired_any = true;
            let (succ, _) = machine.env.structure.apply(&rule.action, cfg.stores[idx])?;
            let ordered = machine.env.emissions(&rule.action, cfg.stores[idx]).to_vec();
            let mut pools = cfg.pools.clone();
            pools[idx] = rest.clone();
            let (external, internalized, overflow) =
                self.fire_sends(idx, &ordered, &mut pools, Some(&rule.target));
            let mut stores = cfg.stores.clone();
            stores[idx] = *succ;
            let mut controls = cfg.controls.clone();
            controls[idx] = rule.target.clone();
            let sends: Vec<(usize, String)> =
                ordered.iter().map(|m| (idx, m.clone())).collect();
            let send_set: BTreeSet<String> = ordered.iter().cloned().collect();
            let monitors = match &item {
                PoolItem::Event(e) => self.advance_monitors(
                    cfg,
                    idx,
                    e,
                    cfg.stores[idx],
                    *succ,
                    &send_set,
                )?,
                PoolItem::Completion(_) => cfg.monitors.clone(),
            };
            out.push(SysStep {
                kind: StepKind::Fire {
                    instance: idx,
                    item: item.clone(),
                    target_control: rule.target.clone(),
                },
                sends,
                external,
                internalized,
                overflow,
                next: SysConfig {
                    stores,
                    pools,
                    controls,
                    cursor: cfg.cursor,
                    monitors,
                },
            });
        }
        if !fired_any {
            let mut pools = cfg.pools.clone();
            pools[idx] = rest;
            let monitors = match &item {
                PoolItem::Event(e) => self.advance_monitors(
                    cfg,
                    idx,
                    e,
                    cfg.stores[idx],
                    cfg.stores[idx],
                    &BTreeSet::new(),
                )?,
                PoolItem::Completion(_) => cfg.monitors.clone(),
            };
            out.push(SysStep {
                kind: StepKind::Discard {
                    instance: idx,
                    item,
                },
                sends: Vec::new(),
                external: Vec::new(),
                internalized: Vec::new(),
                overflow: false,
                next: SysConfig {
                    stores: cfg.stores.clone(),
                    pools,
                    controls: cfg.controls.clone(),
                    cursor: cfg.cursor,
                    monitors,
                },
            });
        }
        Ok(())
    }

    fn protocol_steps(
        &self,
        cfg: &SysConfig,
        idx: usize,
        protocol: &ProtocolModel,
        out: &mut Vec<SysStep>,
    ) -> Result<(), SystemError> {
        if cfg.controls[idx] == ERROR_STATE {
            return Ok(());
        }
        let Some((item, rest)) = cfg.pools[idx].select() else {
            return Ok(());
        };
        let mut fired_any = false;
        if let PoolItem::Event(event) = &item {
            for rule in &protocol.sentence.rules {
                if rule.source != cfg.controls[idx] || rule.trigger != *event {
                    continue;
                }
                if !protocol
                    .env
                    .structure
                    .guard_states(&rule.pre)?
                    .contains(&cfg.stores[idx])
                {
                    continue;
                }
                fired_any = true;
                let ordered: Vec<String> = rule.required.iter().cloned().collect();
                let send_set: BTreeSet<String> = rule.required.clone();
                for &succ in protocol.env.structure.guard_states(&rule.post)? {
                    let mut pools = cfg.pools.clone();
                    pools[idx] = rest.clone();
                    let (external, internalized, overflow) =
                        self.fire_sends(idx, &ordered, &mut pools, None);
                    let mut stores = cfg.stores.clone();
                    stores[idx] = succ;
                    let mut controls = cfg.controls.clone();
                    controls[idx] = rule.target.clone();
                    let monitors = self.advance_monitors(
                        cfg,
                        idx,
                        event,
                        cfg.stores[idx],
                        succ,
                        &send_set,
                    )?;
                    out.push(SysStep {
                        kind: StepKind::Fire {
                            instance: idx,
                            item: item.clone(),
                            target_control: rule.target.clone(),
                        },
                        sends: ordered.iter().map(|m| (idx, m.clone())).collect(),
                        external,
                        internalized,
                        overflow,
                        next: SysConfig {
                            stores,
                            pools,
                            controls,
                            cursor: cfg.cursor,
                            monitors,
                        },
                    });
                }
            }
        }
        if !fired_any {
            // Selected item enables nothing: the dedicated error state is
            // targeted (and is absorbing).
            let mut pools = cfg.pools.clone();
            pools[idx] = rest;
            let mut controls = cfg.controls.clone();
            controls[idx] = ERROR_STATE.to_string();
            let monitors = match &item {
                PoolItem::Event(e) => self.advance_monitors(
                    cfg,
                    idx,
                    e,
                    cfg.stores[idx],
                    cfg.stores[idx],
                    &BTreeSet::new(),
                )?,
                PoolItem::Completion(_) => cfg.monitors.clone(),
            };
            out.push(SysStep {
                kind: StepKind::ProtocolError {
                    instance: idx,
                    item,
                },
                sends: Vec::new(),
                external: Vec::new(),
                internalized: Vec::new(),
                overflow: false,
                next: SysConfig {
                    stores: cfg.stores.clone(),
                    pools,
                    controls,
                    cursor: cfg.cursor,
                    monitors,
                },
            });
        }
        Ok(())
    }

    /// All successors of a configuration, in a fixed canonical order:
    /// stimulus delivery first, then instance steps by index.
    pub fn successors(&self, cfg: &SysConfig) -> Result<Vec<SysStep>, SystemError> {
        let mut out = Vec::new();
        if let Some(stimulus) = self.stimuli.get(cfg.cursor) {
            if cfg.pools[stimulus.instance].len() < self.capacity {
                let mut pools = cfg.pools.clone();
                pools[stimulus.instance].push(PoolItem::Event(stimulus.event.clone()));
                out.push(SysStep {
                    kind: StepKind::Deliver {
                        instance: stimulus.instance,
                        event: stimulus.event.clone(),
                    },
                    sends: Vec::new(),
                    external: Vec::new(),
                    internalized: Vec::new(),
                    overflow: false,
                    next: SysConfig {
                        stores: cfg.stores.clone(),
                        pools,
                        controls: cfg.controls.clone(),
                        cursor: cfg.cursor + 1,
                        monitors: cfg.monitors.clone(),
                    },
                });
            }
        }
        for (idx, inst) in self.model.instances.iter().enumerate() {
            match inst.kind.as_ref().expect("runnable") {
                InstanceKind::Behavioral(m) => self.behavioral_steps(cfg, idx, m, &mut out)?,
                InstanceKind::Protocol(p) => self.protocol_steps(cfg, idx, p, &mut out)?,
            }
        }
        Ok(out)
    }
}

/// Result of a breadth-first system exploration.
pub struct Exploration {
    /// Every configuration seen, in first-visit order.
    pub configs: Vec<SysConfig>,
    /// For each config (by index): the parent config index and the step that
    /// reached it. Roots have no entry.
    pub parents: BTreeMap<usize, (usize, SysStep)>,
    /// All explored edges as (source index, step).
    pub edges: Vec<(usize, SysStep)>,
    pub complete: bool,
}

impl Exploration {
    /// The path of steps from a root to the given configuration index.
    pub fn path_to(&self, mut index: usize) -> Vec<SysStep> {
        let mut steps = VecDeque::new();
        while let Some((parent, step)) = self.parents.get(&index) {
            steps.push_front(step.clone());
            index = *parent;
        }
        steps.into_iter().collect()
    }
}

/// Breadth-first exploration from the initial configurations, visiting at
/// most `budget` configurations. Edges out of visited configurations are
/// recorded even when their targets fall outside the budget (the result is
/// then flagged incomplete).
pub fn explore(runtime: &SystemRuntime, budget: usize) -> Result<Exploration, SystemError> {
    let mut configs: Vec<SysConfig> = Vec::new();
    let mut index: BTreeMap<SysConfig, usize> = BTreeMap::new();
    let mut parents = BTreeMap::new();
    let mut edges = Vec::new();
    let mut queue: VecDeque<usize> = VecDeque::new();
    let mut complete = true;

    for root in runtime.initial_configs() {
        if index.contains_key(&root) {
            continue;
        }
        if configs.len() >= budget {
            complete = false;
            break;
        }
        let id = configs.len();
        index.insert(root.clone(), id);
        configs.push(root);
        queue.push_back(id);
    }

    while let Some(current) = queue.pop_front() {
        let steps = runtime.successors(&configs[current].clone())?;
        for step in steps {
            let target = step.next.clone();
            match index.get(&target) {
                Some(_) => {}
                None => {
                    if configs.len() >= budget {
                        complete = false;
                        continue;
                    }
                    let id = configs.len();
                    index.insert(target.clone(), id);
                    configs.push(target);
                    parents.insert(id, (current, step.clone()));
                    queue.push_back(id);
                }
            }
            edges.push((current, step));
        }
    }
    Ok(Exploration {
        configs,
        parents,
        edges,
        complete,
    })
}
