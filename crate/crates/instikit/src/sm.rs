//! The state-machine institution over a fixed environment.
//!
//! Signatures pair ground events with control states; sentences are the
//! diagrammatic transition tables (initial state plus quintuple transitions);
//! structures are configuration-level transition systems. The canonical
//! structure of a sentence realises the operational semantics: a two-lane
//! FIFO event pool with completion events strictly prioritized, firing and
//! discard clauses, self-accepted messages fed back into the pool, and the
//! entered state's completion event appended on every firing.

use std::collections::{BTreeMap, BTreeSet, VecDeque};
use std::fmt;

use thiserror::Error;

use crate::env::{DataId, EnvError, EnvStructure};

#[derive(Debug, Error, PartialEq, Eq)]
pub enum SmError {
    #[error(transparent)]
    Env(#[from] EnvError),
    #[error("'{name}' is not a {kind} of the signature")]
    UnknownName { kind: &'static str, name: String },
    #[error("morphism {kind} map misses '{name}'")]
    PartialMap { kind: &'static str, name: String },
    #[error("morphism {kind} map sends '{name}' outside the target signature")]
    BadImage { kind: &'static str, name: String },
    #[error("morphism {kind} map is not injective at '{name}'")]
    NotInjective { kind: &'static str, name: String },
    #[error("morphisms do not compose: mid signatures differ")]
    BadComposition,
    #[error("pool capacity must be at least 1")]
    ZeroCapacity,
    #[error("injected pool of {got} items exceeds capacity {capacity}")]
    InjectionOverflow { got: usize, capacity: usize },
}

/// A state machine signature: ground events and control states.
#[derive(Clone, Debug, Default, PartialEq, Eq, PartialOrd, Ord)]
pub struct SmSignature {
    pub events: BTreeSet<String>,
    pub states: BTreeSet<String>,
}

impl SmSignature {
    pub fn new<I, J>(events: I, states: J) -> Self
    where
        I: IntoIterator<Item = String>,
        J: IntoIterator<Item = String>,
    {
        SmSignature {
            events: events.into_iter().collect(),
            states: states.into_iter().collect(),
        }
    }
}

/// An item of the event pool. The tag keeps declared events and completion
/// events apart even when their raw names overlap (the paper's ATM example
/// uses state names as completion event names).
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum PoolItem {
    Completion(String),
    Event(String),
}

impl fmt::Display for PoolItem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            PoolItem::Completion(s) => write!(f, "complete({s})"),
            PoolItem::Event(e) => write!(f, "{e}"),
        }
    }
}

/// Two-lane FIFO pool; the completion lane is always drained first.
#[derive(Clone, Debug, Default, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Pool {
    completions: VecDeque<String>,
    events: VecDeque<String>,
}

impl Pool {
    pub fn empty() -> Self {
        Pool::default()
    }

    pub fn len(&self) -> usize {
        self.completions.len() + self.events.len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Selects the next item: the head of the completion lane when present,
    /// otherwise the head of the event lane.
    pub fn select(&self) -> Option<(PoolItem, Pool)> {
        let mut rest = self.clone();
        if let Some(c) = rest.completions.pop_front() {
            return Some((PoolItem::Completion(c), rest));
        }
        if let Some(e) = rest.events.pop_front() {
            return Some((PoolItem::Event(e), rest));
        }
        None
    }

    /// Appends items at the lane tails. Items past `capacity` total entries
    /// are dropped and reported through the overflow flag.
    pub fn append(&self, items: &[PoolItem], capacity: usize) -> (Pool, bool) {
        let mut next = self.clone();
        let mut overflow = false;
        for item in items {
            if next.len() >= capacity {
                overflow = true;
                break;
            }
            match item {
                PoolItem::Completion(s) => next.completions.push_back(s.clone()),
                PoolItem::Event(e) => next.events.push_back(e.clone()),
            }
        }
        (next, overflow)
    }

    /// Builds a pool holding the given items, failing if they exceed the
    /// capacity.
    pub fn load(items: &[PoolItem], capacity: usize) -> Result<Pool, SmError> {
        let (pool, overflow) = Pool::empty().append(items, capacity);
        if overflow {
            return Err(SmError::InjectionOverflow {
                got: items.len(),
                capacity,
            });
        }
        Ok(pool)
    }

    /// Items in selection-lane order: the completion lane, then the event
    /// lane.
    pub fn items(&self) -> Vec<PoolItem> {
        self.completions
            .iter()
            .map(|s| PoolItem::Completion(s.clone()))
            .chain(self.events.iter().map(|e| PoolItem::Event(e.clone())))
            .collect()
    }

    /// The sub-pool of items matching a predicate, lane order preserved.
    pub fn filter(&self, keep: impl Fn(&PoolItem) -> bool) -> Pool {
        Pool {
            completions: self
                .completions
                .iter()
                .filter(|s| keep(&PoolItem::Completion((*s).clone())))
                .cloned()
                .collect(),
            events: self
                .events
                .iter()
                .filter(|e| keep(&PoolItem::Event((*e).clone())))
                .cloned()
                .collect(),
        }
    }

    /// Removes the first occurrence of `item` from its lane.
    pub fn remove_first(&mut self, item: &PoolItem) -> bool {
        let (lane, name) = match item {
            PoolItem::Completion(s) => (&mut self.completions, s),
            PoolItem::Event(e) => (&mut self.events, e),
        };
        if let Some(pos) = lane.iter().position(|x| x == name) {
            lane.remove(pos);
            true
        } else {
            false
        }
    }

    /// Appends one item at its lane tail, without a capacity check.
    pub fn push(&mut self, item: PoolItem) {
        match item {
            PoolItem::Completion(s) => self.completions.push_back(s),
            PoolItem::Event(e) => self.events.push_back(e),
        }
    }
}

impl fmt::Display for Pool {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.items().iter().map(|i| i.to_string()).collect();
        write!(f, "[{}]", parts.join(", "))
    }
}

/// A configuration: data state, event pool, control state.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Configuration {
    pub data: DataId,
    pub pool: Pool,
    pub control: String,
}

impl fmt::Display for Configuration {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(#{}, {}, {})", self.data, self.pool, self.control)
    }
}

/// One transition of a structure, with the externally emitted message set and
/// the overflow marker raised when a pool append was clamped at capacity.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub struct SmTransition {
    pub source: Configuration,
    pub emitted: BTreeSet<String>,
    pub overflow: bool,
    pub target: Configuration,
}

/// A state machine structure: initial configurations (data-state set plus the
/// initial control state) and the transition relation. Reducts may pull the
/// initial control state back to nothing, leaving `initial` empty.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct SmStructure {
    pub initial: Option<(BTreeSet<DataId>, String)>,
    pub transitions: BTreeSet<SmTransition>,
}

/// One sentence transition: source state, trigger, guard, action, target.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub struct TransitionRule {
    pub source: String,
    pub trigger: PoolItem,
    pub guard: String,
    pub action: String,
    pub target: String,
}

/// A state machine sentence: the initial control state and the transition
/// table.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct SmSentence {
    pub initial: String,
    pub rules: BTreeSet<TransitionRule>,
}

/// A signature morphism: injective maps on events and states.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SmMorphism {
    pub source: SmSignature,
    pub target: SmSignature,
    pub event_map: BTreeMap<String, String>,
    pub state_map: BTreeMap<String, String>,
}

fn check_injective_total(
    kind: &'static str,
    dom: &BTreeSet<String>,
    cod: &BTreeSet<String>,
    map: &BTreeMap<String, String>,
) -> Result<(), SmError> {
    let mut seen = BTreeSet::new();
    for name in dom {
        match map.get(name) {
            None => {
                return Err(SmError::PartialMap {
                    kind,
                    name: name.clone(),
                })
            }
            Some(img) => {
                if !cod.contains(img) {
                    return Err(SmError::BadImage {
                        kind,
                        name: name.clone(),
                    });
                }
                if !seen.insert(img.clone()) {
                    return Err(SmError::NotInjective {
                        kind,
                        name: name.clone(),
                    });
                }
            }
        }
    }
    Ok(())
}

impl SmMorphism {
    pub fn new(
        source: SmSignature,
        target: SmSignature,
        event_map: BTreeMap<String, String>,
        state_map: BTreeMap<String, String>,
    ) -> Result<Self, SmError> {
        check_injective_total("event", &source.events, &target.events, &event_map)?;
        check_injective_total("state", &source.states, &target.states, &state_map)?;
        Ok(SmMorphism {
            source,
            target,
            event_map,
            state_map,
        })
    }

    pub fn identity(sig: &SmSignature) -> Self {
        let id = |names: &BTreeSet<String>| {
            names
                .iter()
                .map(|n| (n.clone(), n.clone()))
                .collect::<BTreeMap<_, _>>()
        };
        SmMorphism {
            source: sig.clone(),
            target: sig.clone(),
            event_map: id(&sig.events),
            state_map: id(&sig.states),
        }
    }

    /// Composes `self : S -> S'` with `then : S' -> S''`.
    pub fn compose(&self, then: &SmMorphism) -> Result<Self, SmError> {
        if self.target != then.source {
            return Err(SmError::BadComposition);
        }
        let chain = |first: &BTreeMap<String, String>, second: &BTreeMap<String, String>| {
            first
                .iter()
                .map(|(k, v)| (k.clone(), second[v].clone()))
                .collect::<BTreeMap<_, _>>()
        };
        Ok(SmMorphism {
            source: self.source.clone(),
            target: then.target.clone(),
            event_map: chain(&self.event_map, &then.event_map),
            state_map: chain(&self.state_map, &then.state_map),
        })
    }

    fn state(&self, s: &str) -> Result<&String, SmError> {
        self.state_map.get(s).ok_or_else(|| SmError::UnknownName {
            kind: "state",
            name: s.to_string(),
        })
    }

    /// Maps a pool item lane-respecting: events through the event map,
    /// completions through the state map.
    pub fn map_item(&self, item: &PoolItem) -> Result<PoolItem, SmError> {
        match item {
            PoolItem::Event(e) => self
                .event_map
                .get(e)
                .map(|e| PoolItem::Event(e.clone()))
                .ok_or_else(|| SmError::UnknownName {
                    kind: "event",
                    name: e.clone(),
                }),
            PoolItem::Completion(s) => Ok(PoolItem::Completion(self.state(s)?.clone())),
        }
    }

    fn preimage_of(map: &BTreeMap<String, String>, img: &str) -> Option<String> {
        map.iter()
            .find(|(_, v)| v.as_str() == img)
            .map(|(k, _)| k.clone())
    }

    fn preimage_pool(&self, pool: &Pool) -> Option<Pool> {
        let mut out = Pool::empty();
        for c in &pool.completions {
            out.completions
                .push_back(Self::preimage_of(&self.state_map, c)?);
        }
        for e in &pool.events {
            out.events.push_back(Self::preimage_of(&self.event_map, e)?);
        }
        Some(out)
    }

    fn preimage_config(&self, c: &Configuration) -> Option<Configuration> {
        Some(Configuration {
            data: c.data,
            pool: self.preimage_pool(&c.pool)?,
            control: Self::preimage_of(&self.state_map, &c.control)?,
        })
    }
}

/// Translates a sentence along a morphism: states through the state map,
/// triggers lane-respecting, guards and actions unchanged (the environment is
/// fixed).
pub fn translate_sentence(m: &SmMorphism, s: &SmSentence) -> Result<SmSentence, SmError> {
    let mut rules = BTreeSet::new();
    for r in &s.rules {
        rules.insert(TransitionRule {
            source: m.state(&r.source)?.clone(),
            trigger: m.map_item(&r.trigger)?,
            guard: r.guard.clone(),
            action: r.action.clone(),
            target: m.state(&r.target)?.clone(),
        });
    }
    Ok(SmSentence {
        initial: m.state(&s.initial)?.clone(),
        rules,
    })
}

/// The reduct of a structure along a morphism keeps exactly the transitions
/// whose image configurations lie in the bigger relation; since morphisms are
/// injective this is the itemwise preimage. The initial control state pulls
/// back through the state map when it lies in the image.
pub fn reduct(m: &SmMorphism, bigger: &SmStructure) -> SmStructure {
    let initial = bigger.initial.as_ref().and_then(|(data, control)| {
        SmMorphism::preimage_of(&m.state_map, control).map(|s| (data.clone(), s))
    });
    let transitions = bigger
        .transitions
        .iter()
        .filter_map(|t| {
            Some(SmTransition {
                source: m.preimage_config(&t.source)?,
                emitted: t.emitted.clone(),
                overflow: t.overflow,
                target: m.preimage_config(&t.target)?,
            })
        })
        .collect();
    SmStructure {
        initial,
        transitions,
    }
}

/// One possible outcome of processing the selected pool item.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub struct StepOutcome {
    /// The rule that fired; `None` for the discard clause.
    pub fired: Option<TransitionRule>,
    pub emitted: BTreeSet<String>,
    pub overflow: bool,
    pub target: Configuration,
}

/// The canonical transitions out of one configuration: every matching rule
/// fires (self-accepted messages and the entered state's completion event are
/// appended to the pool), and if no rule matches the selected item it is
/// discarded. An empty pool yields no outcomes.
pub fn step(
    c: &Configuration,
    s: &SmSentence,
    env: &EnvStructure,
    sig: &SmSignature,
    capacity: usize,
) -> Result<Vec<StepOutcome>, SmError> {
    let Some((item, rest)) = c.pool.select() else {
        return Ok(Vec::new());
    };
    let mut outcomes = Vec::new();
    for rule in &s.rules {
        if rule.source != c.control || rule.trigger != item {
            continue;
        }
        if !env.guard_states(&rule.guard)?.contains(&c.data) {
            continue;
        }
        let (succ, messages) = env.apply(&rule.action, c.data)?;
        let mut appended: Vec<PoolItem> = messages
            .iter()
            .filter(|m| sig.events.contains(*m))
            .map(|m| PoolItem::Event(m.clone()))
            .collect();
        appended.push(PoolItem::Completion(rule.target.clone()));
        let (pool, overflow) = rest.append(&appended, capacity);
        let emitted: BTreeSet<String> = messages
            .iter()
            .filter(|m| !sig.events.contains(*m))
            .cloned()
            .collect();
        outcomes.push(StepOutcome {
            fired: Some(rule.clone()),
            emitted,
            overflow,
            target: Configuration {
                data: *succ,
                pool,
                control: rule.target.clone(),
            },
        });
    }
    if outcomes.is_empty() {
        outcomes.push(StepOutcome {
            fired: None,
            emitted: BTreeSet::new(),
            overflow: false,
            target: Configuration {
                data: c.data,
                pool: rest,
                control: c.control.clone(),
            },
        });
    }
    outcomes.sort();
    Ok(outcomes)
}

fn lane_sequences(alphabet: &[String], max_len: usize) -> Vec<VecDeque<String>> {
    let mut out: Vec<VecDeque<String>> = vec![VecDeque::new()];
    let mut layer: Vec<VecDeque<String>> = vec![VecDeque::new()];
    for _ in 0..max_len {
        let mut next = Vec::new();
        for seq in &layer {
            for sym in alphabet {
                let mut s = seq.clone();
                s.push_back(sym.clone());
                next.push(s);
            }
        }
        out.extend(next.iter().cloned());
        layer = next;
    }
    out
}

/// Every pool with at most `capacity` items over the signature's events and
/// completion names.
pub fn enumerate_pools(sig: &SmSignature, capacity: usize) -> Vec<Pool> {
    let events: Vec<String> = sig.events.iter().cloned().collect();
    let states: Vec<String> = sig.states.iter().cloned().collect();
    let mut pools = Vec::new();
    for completions in lane_sequences(&states, capacity) {
        let room = capacity - completions.len();
        for events in lane_sequences(&events, room) {
            pools.push(Pool {
                completions: completions.clone(),
                events,
            });
        }
    }
    pools
}

/// Builds the canonical structure of a sentence: both clauses of the
/// transition relation, enumerated over every configuration with pool size up
/// to `capacity`, with the initial data-state set restricted to
/// `initial_data`.
pub fn canonical_structure_from(
    env: &EnvStructure,
    sig: &SmSignature,
    s: &SmSentence,
    capacity: usize,
    initial_data: BTreeSet<DataId>,
) -> Result<SmStructure, SmError> {
    if capacity == 0 {
        return Err(SmError::ZeroCapacity);
    }
    if !sig.states.contains(&s.initial) {
        return Err(SmError::UnknownName {
            kind: "state",
            name: s.initial.clone(),
        });
    }
    let pools = enumerate_pools(sig, capacity);
    let mut transitions = BTreeSet::new();
    for control in &sig.states {
        for data in 0..env.size {
            for pool in &pools {
                let c = Configuration {
                    data,
                    pool: pool.clone(),
                    control: control.clone(),
                };
                for o in step(&c, s, env, sig, capacity)? {
                    transitions.insert(SmTransition {
                        source: c.clone(),
                        emitted: o.emitted,
                        overflow: o.overflow,
                        target: o.target,
                    });
                }
            }
        }
    }
    Ok(SmStructure {
        initial: Some((initial_data, s.initial.clone())),
        transitions,
    })
}

/// [`canonical_structure_from`] with the full carrier as initial data states
/// (the sentence constrains only the control state).
pub fn canonical_structure(
    env: &EnvStructure,
    sig: &SmSignature,
    s: &SmSentence,
    capacity: usize,
) -> Result<SmStructure, SmError> {
    canonical_structure_from(env, sig, s, capacity, (0..env.size).collect())
}

/// Satisfaction: the initial control state matches and the transition
/// relation equals the canonical one, bounded by `capacity`.
pub fn satisfies(
    theta: &SmStructure,
    s: &SmSentence,
    env: &EnvStructure,
    sig: &SmSignature,
    capacity: usize,
) -> Result<bool, SmError> {
    match &theta.initial {
        Some((_, control)) if *control == s.initial => {}
        _ => return Ok(false),
    }
    let canonical = canonical_structure(env, sig, s, capacity)?;
    Ok(theta.transitions == canonical.transitions)
}

/// Result of a bounded reachability exploration.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ReachResult {
    pub configs: BTreeSet<Configuration>,
    /// False when the exploration budget was exhausted first.
    pub complete: bool,
}

/// Breadth-first closure under [`step`], starting from the initial control
/// state with the injected items pre-loaded into the pool, one root per
/// initial data state.
pub fn reachable(
    injected: &[PoolItem],
    s: &SmSentence,
    env: &EnvStructure,
    sig: &SmSignature,
    capacity: usize,
    max_configs: usize,
    initial_data: &BTreeSet<DataId>,
) -> Result<ReachResult, SmError> {
    let pool = Pool::load(injected, capacity)?;
    let mut queue: VecDeque<Configuration> = VecDeque::new();
    let mut seen: BTreeSet<Configuration> = BTreeSet::new();
    for &data in initial_data {
        let c = Configuration {
            data,
            pool: pool.clone(),
            control: s.initial.clone(),
        };
        if seen.len() >= max_configs {
            return Ok(ReachResult {
                configs: seen,
                complete: false,
            });
        }
        if seen.insert(c.clone()) {
            queue.push_back(c);
        }
    }
    while let Some(c) = queue.pop_front() {
        for o in step(&c, s, env, sig, capacity)? {
            if seen.contains(&o.target) {
                continue;
            }
            if seen.len() >= max_configs {
                return Ok(ReachResult {
                    configs: seen,
                    complete: false,
                });
            }
            seen.insert(o.target.clone());
            queue.push_back(o.target);
        }
    }
    Ok(ReachResult {
        configs: seen,
        complete: true,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::env::EnvSignature;

    fn set(names: &[&str]) -> BTreeSet<String> {
        names.iter().map(|s| s.to_string()).collect()
    }

    fn rule(source: &str, trigger: PoolItem, guard: &str, action: &str, target: &str) -> TransitionRule {
        TransitionRule {
            source: source.to_string(),
            trigger,
            guard: guard.to_string(),
            action: action.to_string(),
            target: target.to_string(),
        }
    }

    fn ev(e: &str) -> PoolItem {
        PoolItem::Event(e.to_string())
    }

    fn co(s: &str) -> PoolItem {
        PoolItem::Completion(s.to_string())
    }

    /// One-state-carrier environment: action `emit_go` emits message "go"
    /// (which doubles as an event name for self-acceptance tests), `noop`
    /// emits nothing, guard "true" holds everywhere, "false" nowhere.
    fn tiny_env() -> (EnvSignature, EnvStructure) {
        let sig = EnvSignature::new(
            set(&["true", "false"]),
            set(&["emit_go", "noop"]),
            set(&["go", "out"]),
        );
        let omega = EnvStructure {
            size: 1,
            guard_interp: [
                ("true".to_string(), BTreeSet::from([0])),
                ("false".to_string(), BTreeSet::new()),
            ]
            .into(),
            action_interp: [
                (
                    "emit_go".to_string(),
                    vec![(0, set(&["go", "out"]))],
                ),
                ("noop".to_string(), vec![(0, BTreeSet::new())]),
            ]
            .into(),
        };
        (sig, omega)
    }

    fn two_state_sig() -> SmSignature {
        SmSignature::new(set(&["go", "kick"]), set(&["A", "B"]))
    }

    #[test]
    fn pool_prioritizes_completions() {
        let (pool, overflow) = Pool::empty().append(&[ev("kick"), co("A"), ev("go")], 4);
        assert!(!overflow);
        let (first, rest) = pool.select().unwrap();
        assert_eq!(first, co("A"));
        let (second, rest) = rest.select().unwrap();
        assert_eq!(second, ev("kick"));
        let (third, rest) = rest.select().unwrap();
        assert_eq!(third, ev("go"));
        assert!(rest.select().is_none());
    }

    #[test]
    fn pool_overflow_clamps_and_flags() {
        let (pool, overflow) = Pool::empty().append(&[ev("a"), ev("b"), ev("c")], 2);
        assert!(overflow);
        assert_eq!(pool.len(), 2);
    }

    #[test]
    fn firing_appends_self_accepted_and_completion() {
        let (_env_sig, omega) = tiny_env();
        let sig = two_state_sig();
        let s = SmSentence {
            initial: "A".to_string(),
            rules: BTreeSet::from([rule("A", ev("kick"), "true", "emit_go", "B")]),
        };
        let c = Configuration {
            data: 0,
            pool: Pool::load(&[ev("kick")], 4).unwrap(),
            control: "A".to_string(),
        };
        let outcomes = step(&c, &s, &omega, &sig, 4).unwrap();
        assert_eq!(outcomes.len(), 1);
        let o = &outcomes[0];
        // "go" is self-accepted (event of the signature), "out" is emitted.
        assert_eq!(o.emitted, set(&["out"]));
        assert_eq!(o.target.control, "B");
        assert_eq!(o.target.pool.items(), vec![co("B"), ev("go")]);
        assert!(!o.overflow);
    }

    #[test]
    fn unmatched_item_is_discarded() {
        let (_env_sig, omega) = tiny_env();
        let sig = two_state_sig();
        let s = SmSentence {
            initial: "A".to_string(),
            rules: BTreeSet::from([rule("A", ev("kick"), "true", "emit_go", "B")]),
        };
        // "go" has no rule in control state A with a holding guard.
        let c = Configuration {
            data: 0,
            pool: Pool::load(&[ev("go")], 4).unwrap(),
            control: "A".to_string(),
        };
        let outcomes = step(&c, &s, &omega, &sig, 4).unwrap();
        assert_eq!(outcomes.len(), 1);
        assert_eq!(outcomes[0].fired, None);
        assert!(outcomes[0].emitted.is_empty());
        assert!(outcomes[0].target.pool.is_empty());
        assert_eq!(outcomes[0].target.control, "A");
    }

    #[test]
    fn guard_failure_discards() {
        let (_env_sig, omega) = tiny_env();
        let sig = two_state_sig();
        let s = SmSentence {
            initial: "A".to_string(),
            rules: BTreeSet::from([rule("A", ev("kick"), "false", "emit_go", "B")]),
        };
        let c = Configuration {
            data: 0,
            pool: Pool::load(&[ev("kick")], 4).unwrap(),
            control: "A".to_string(),
        };
        let outcomes = step(&c, &s, &omega, &sig, 4).unwrap();
        assert_eq!(outcomes[0].fired, None);
    }

    #[test]
    fn canonical_configs_with_items_always_step() {
        let (_env_sig, omega) = tiny_env();
        let sig = two_state_sig();
        let s = SmSentence {
            initial: "A".to_string(),
            rules: BTreeSet::from([
                rule("A", ev("kick"), "true", "emit_go", "B"),
                rule("B", co("B"), "true", "noop", "A"),
            ]),
        };
        let theta = canonical_structure(&omega, &sig, &s, 2).unwrap();
        // Behavioral machines never get stuck on a non-empty pool, emitted
        // sets never contain self-accepted events, and every firing appends
        // the target's completion event.
        for pool in enumerate_pools(&sig, 2) {
            if pool.is_empty() {
                continue;
            }
            for control in &sig.states {
                let c = Configuration {
                    data: 0,
                    pool: pool.clone(),
                    control: control.clone(),
                };
                let outs = step(&c, &s, &omega, &sig, 2).unwrap();
                assert!(!outs.is_empty());
            }
        }
        for t in &theta.transitions {
            assert!(t.emitted.iter().all(|m| !sig.events.contains(m)));
        }
    }

    #[test]
    fn satisfies_canonical_self_and_detects_mutations() {
        let (_env_sig, omega) = tiny_env();
        let sig = two_state_sig();
        let s = SmSentence {
            initial: "A".to_string(),
            rules: BTreeSet::from([
                rule("A", ev("kick"), "true", "emit_go", "B"),
                rule("B", ev("go"), "true", "noop", "A"),
            ]),
        };
        let theta = canonical_structure(&omega, &sig, &s, 2).unwrap();
        assert!(satisfies(&theta, &s, &omega, &sig, 2).unwrap());
        // Removing any rule flips satisfaction.
        for removed in &s.rules {
            let mut mutated = s.clone();
            mutated.rules.remove(removed);
            assert!(!satisfies(&theta, &mutated, &omega, &sig, 2).unwrap());
        }
        // A widened guard flips satisfaction too.
        let mut widened = SmSentence {
            initial: "A".to_string(),
            rules: BTreeSet::new(),
        };
        for r in &s.rules {
            let mut r = r.clone();
            if r.guard == "true" && r.trigger == ev("go") {
                r.guard = "false".to_string();
            }
            widened.rules.insert(r);
        }
        assert!(!satisfies(&theta, &widened, &omega, &sig, 2).unwrap());
        // Wrong initial control state fails without comparing relations.
        let renamed = SmSentence {
            initial: "B".to_string(),
            ..s.clone()
        };
        assert!(!satisfies(&theta, &renamed, &omega, &sig, 2).unwrap());
    }

    #[test]
    fn translation_maps_completion_triggers_through_states() {
        let sig = two_state_sig();
        let bigger = SmSignature::new(set(&["go", "kick", "extra"]), set(&["A2", "B2", "C2"]));
        let m = SmMorphism::new(
            sig,
            bigger,
            [("go", "go"), ("kick", "kick")]
                .iter()
                .map(|(a, b)| (a.to_string(), b.to_string()))
                .collect(),
            [("A", "A2"), ("B", "B2")]
                .iter()
                .map(|(a, b)| (a.to_string(), b.to_string()))
                .collect(),
        )
        .unwrap();
        let s = SmSentence {
            initial: "A".to_string(),
            rules: BTreeSet::from([rule("B", co("B"), "true", "noop", "A")]),
        };
        let t = translate_sentence(&m, &s).unwrap();
        assert_eq!(t.initial, "A2");
        let r = t.rules.iter().next().unwrap();
        assert_eq!(r.trigger, co("B2"));
        assert_eq!(r.source, "B2");
    }

    #[test]
    fn identity_translation_and_reduct() {
        let (_env_sig, omega) = tiny_env();
        let sig = two_state_sig();
        let s = SmSentence {
            initial: "A".to_string(),
            rules: BTreeSet::from([rule("A", ev("kick"), "true", "noop", "B")]),
        };
        let id = SmMorphism::identity(&sig);
        assert_eq!(translate_sentence(&id, &s).unwrap(), s);
        let theta = canonical_structure(&omega, &sig, &s, 2).unwrap();
        assert_eq!(reduct(&id, &theta), theta);
    }

    #[test]
    fn reduct_drops_configurations_outside_the_image() {
        let (_env_sig, omega) = tiny_env();
        let small = SmSignature::new(set(&["kick"]), set(&["A", "B"]));
        let big = SmSignature::new(set(&["kick", "go"]), set(&["A", "B", "C"]));
        let m = SmMorphism::new(
            small.clone(),
            big.clone(),
            [("kick".to_string(), "kick".to_string())].into(),
            [
                ("A".to_string(), "A".to_string()),
                ("B".to_string(), "B".to_string()),
            ]
            .into(),
        )
        .unwrap();
        let s_big = SmSentence {
            initial: "A".to_string(),
            rules: BTreeSet::from([
                rule("A", ev("kick"), "true", "noop", "B"),
                rule("C", ev("go"), "true", "noop", "C"),
            ]),
        };
        let theta_big = canonical_structure(&omega, &big, &s_big, 2).unwrap();
        let red = reduct(&m, &theta_big);
        assert!(red
            .transitions
            .iter()
            .all(|t| t.source.control != "C" && t.target.control != "C"));
        assert!(red.transitions.iter().all(|t| {
            t.source
                .pool
                .items()
                .iter()
                .all(|i| *i != ev("go") && *i != co("C"))
        }));
        assert_eq!(red.initial.as_ref().unwrap().1, "A");
        // An initial control state outside the image pulls back to nothing.
        let mut renamed = theta_big.clone();
        renamed.initial = Some((BTreeSet::from([0]), "C".to_string()));
        assert_eq!(reduct(&m, &renamed).initial, None);
    }

    #[test]
    fn reachable_empty_injection_is_stuck() {
        let (_env_sig, omega) = tiny_env();
        let sig = two_state_sig();
        let s = SmSentence {
            initial: "A".to_string(),
            rules: BTreeSet::from([rule("A", ev("kick"), "true", "emit_go", "B")]),
        };
        let init: BTreeSet<DataId> = BTreeSet::from([0]);
        let r = reachable(&[], &s, &omega, &sig, 4, 100, &init).unwrap();
        assert!(r.complete);
        assert_eq!(r.configs.len(), 1);
    }

    #[test]
    fn reachable_budget_flags_incomplete() {
        let (_env_sig, omega) = tiny_env();
        let sig = two_state_sig();
        let s = SmSentence {
            initial: "A".to_string(),
            rules: BTreeSet::from([rule("A", ev("kick"), "true", "emit_go", "B")]),
        };
        let init: BTreeSet<DataId> = BTreeSet::from([0]);
        let r = reachable(&[ev("kick")], &s, &omega, &sig, 4, 1, &init).unwrap();
        assert!(!r.complete);
        assert_eq!(r.configs.len(), 1);
        // Determinism: the same call yields the same set.
        let r2 = reachable(&[ev("kick")], &s, &omega, &sig, 4, 1, &init).unwrap();
        assert_eq!(r, r2);
    }

    #[test]
    fn reachable_follows_self_accepted_chain() {
        let (_env_sig, omega) = tiny_env();
        let sig = two_state_sig();
        let s = SmSentence {
            initial: "A".to_string(),
            rules: BTreeSet::from([
                rule("A", ev("kick"), "true", "emit_go", "B"),
                rule("B", ev("go"), "true", "noop", "A"),
            ]),
        };
        let init: BTreeSet<DataId> = BTreeSet::from([0]);
        let r = reachable(&[ev("kick")], &s, &omega, &sig, 4, 1000, &init).unwrap();
        assert!(r.complete);
        // kick fires into B (pool [complete(B), go]), the completion is
        // discarded, then the self-accepted go fires back to A.
        assert!(r.configs.iter().any(|c| c.control == "B"));
        assert!(r
            .configs
            .iter()
            .any(|c| c.control == "A" && c.pool.is_empty()));
    }
}
