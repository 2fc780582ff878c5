//! The protocol state-machine institution.
//!
//! Protocol machines monitor rather than mandate behaviour: transitions carry
//! a pre- and a post-guard plus the messages that must be sent while the
//! triggering event is executed, and an event that enables no transition
//! targets a reserved absorbing `Error` state instead of being discarded.
//!
//! Post-guards constrain but do not determine the data evolution: the
//! canonical monitor pairs a transition with every data state satisfying the
//! post-guard. Guards are evaluated against the monitored machine's data
//! state (a semantic variation point; the paper does not fix the alternative
//! of an abstract protocol-level state).

use std::collections::BTreeSet;

use thiserror::Error;

use crate::env::{DataId, EnvError, EnvStructure};
use crate::sm::{
    Configuration, Pool, PoolItem, SmSignature, SmStructure, SmTransition,
};

/// The reserved control state entered on a monitoring violation.
pub const ERROR_STATE: &str = "Error";

#[derive(Debug, Error, PartialEq, Eq)]
pub enum PsmError {
    #[error(transparent)]
    Env(#[from] EnvError),
    #[error("state name '{0}' collides with the reserved error state")]
    ReservedState(String),
    #[error("'{name}' is not a {kind} of the signature")]
    UnknownName { kind: &'static str, name: String },
    #[error("pool capacity must be at least 1")]
    ZeroCapacity,
}

/// One protocol transition: source, pre-guard, triggering event, post-guard,
/// required messages, target.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub struct PsmRule {
    pub source: String,
    pub pre: String,
    pub trigger: String,
    pub post: String,
    pub required: BTreeSet<String>,
    pub target: String,
}

/// A protocol sentence: initial state plus transition table. Triggers are
/// declared events only; protocol machines show no completion events.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct PsmSentence {
    pub initial: String,
    pub rules: BTreeSet<PsmRule>,
}

impl PsmSentence {
    /// The ground events the protocol constrains.
    pub fn alphabet(&self) -> BTreeSet<String> {
        self.rules.iter().map(|r| r.trigger.clone()).collect()
    }
}

/// Verdict of running a trace through the monitoring semantics.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum MonitorVerdict {
    Ok,
    ErrorAt {
        /// Index of the first violating step.
        step: usize,
        /// The offending event.
        event: String,
        /// The protocol states the monitor could have been in before the
        /// violation.
        states: BTreeSet<String>,
    },
}

/// One observed step of a monitored run.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MonitorStep {
    pub event: String,
    pub data_before: DataId,
    pub data_after: DataId,
    pub emitted: BTreeSet<String>,
}

fn event_pools(sig: &SmSignature, capacity: usize) -> Vec<Pool> {
    // Monitor pools hold declared events only: the monitor generates no
    // completion events (one would immediately hit the error clause, since
    // protocol triggers are events).
    let no_states = SmSignature {
        events: sig.events.clone(),
        states: BTreeSet::new(),
    };
    crate::sm::enumerate_pools(&no_states, capacity)
}

/// Builds the canonical monitoring structure of a protocol sentence: firing
/// requires a transition whose pre-guard holds at the source, pairs it with
/// every data state satisfying the post-guard, and emits exactly the required
/// messages; a selected event with no enabled transition targets the
/// absorbing [`ERROR_STATE`].
pub fn psm_canonical_monitor(
    env: &EnvStructure,
    sig: &SmSignature,
    p: &PsmSentence,
    capacity: usize,
) -> Result<SmStructure, PsmError> {
    if capacity == 0 {
        return Err(PsmError::ZeroCapacity);
    }
    if sig.states.contains(ERROR_STATE) {
        return Err(PsmError::ReservedState(ERROR_STATE.to_string()));
    }
    if !sig.states.contains(&p.initial) {
        return Err(PsmError::UnknownName {
            kind: "state",
            name: p.initial.clone(),
        });
    }
    let pools = event_pools(sig, capacity);
    let mut transitions = BTreeSet::new();
    for control in &sig.states {
        for data in 0..env.size {
            for pool in &pools {
                let source = Configuration {
                    data,
                    pool: pool.clone(),
                    control: control.clone(),
                };
                let Some((PoolItem::Event(event), rest)) = pool.select() else {
                    continue;
                };
                let mut enabled = false;
                for rule in &p.rules {
                    if rule.source != *control || rule.trigger != event {
                        continue;
                    }
                    if !env.guard_states(&rule.pre)?.contains(&data) {
                        continue;
                    }
                    enabled = true;
                    let appended: Vec<PoolItem> = rule
                        .required
                        .iter()
                        .filter(|m| sig.events.contains(*m))
                        .map(|m| PoolItem::Event(m.clone()))
                        .collect();
                    let emitted: BTreeSet<String> = rule
                        .required
                        .iter()
                        .filter(|m| !sig.events.contains(*m))
                        .cloned()
                        .collect();
                    let (next_pool, overflow) = rest.append(&appended, capacity);
                    for &succ in env.guard_states(&rule.post)? {
                        transitions.insert(SmTransition {
                            source: source.clone(),
                            emitted: emitted.clone(),
                            overflow,
                            target: Configuration {
                                data: succ,
                                pool: next_pool.clone(),
                                control: rule.target.clone(),
                            },
                        });
                    }
                }
                if !enabled {
                    transitions.insert(SmTransition {
                        source: source.clone(),
                        emitted: BTreeSet::new(),
                        overflow: false,
                        target: Configuration {
                            data,
                            pool: rest,
                            control: ERROR_STATE.to_string(),
                        },
                    });
                }
            }
        }
    }
    Ok(SmStructure {
        initial: Some(((0..env.size).collect(), p.initial.clone())),
        transitions,
    })
}

/// The item a canonical transition consumed: the selected item of its source
/// pool.
fn consumed(t: &SmTransition) -> Option<(PoolItem, Pool)> {
    t.source.pool.select()
}

/// The self-accepted events a canonical transition fed back into its own
/// pool (the appended suffix of the target event lane), as a name set.
fn self_accepted(t: &SmTransition, rest: &Pool) -> BTreeSet<String> {
    let before: Vec<PoolItem> = rest
        .items()
        .into_iter()
        .filter(|i| matches!(i, PoolItem::Event(_)))
        .collect();
    let after: Vec<PoolItem> = t
        .target
        .pool
        .items()
        .into_iter()
        .filter(|i| matches!(i, PoolItem::Event(_)))
        .collect();
    if after.len() >= before.len() && after[..before.len()] == before[..] {
        after[before.len()..]
            .iter()
            .map(|i| match i {
                PoolItem::Event(e) => e.clone(),
                PoolItem::Completion(_) => unreachable!(),
            })
            .collect()
    } else {
        BTreeSet::new()
    }
}

/// Whether a transition has the exact shape of the discard clause: nothing
/// changes, nothing is emitted, nothing is appended. Such a transition did
/// not execute its selected event as a trigger.
fn is_discard_shaped(t: &SmTransition, rest: &Pool) -> bool {
    t.target.control == t.source.control
        && t.target.data == t.source.data
        && t.emitted.is_empty()
        && !t.overflow
        && t.target.pool == *rest
}

/// Satisfaction of a behavioural structure against a protocol sentence: the
/// initial control states agree and every transition consuming an event is
/// matched by some protocol transition — same source state name, pre-guard at
/// the source data state, post-guard at the target data state, and the
/// required messages covered by the step's emissions plus self-accepted
/// events. Transitions consuming completion events are exempt, as are
/// discard-shaped transitions (a discarded event triggers nothing to
/// monitor).
pub fn psm_satisfies(
    theta: &SmStructure,
    p: &PsmSentence,
    env: &EnvStructure,
) -> Result<bool, PsmError> {
    match &theta.initial {
        Some((_, control)) if *control == p.initial => {}
        _ => return Ok(false),
    }
    for t in &theta.transitions {
        let Some((PoolItem::Event(event), rest)) = consumed(t) else {
            continue;
        };
        if is_discard_shaped(t, &rest) {
            continue;
        }
        let available: BTreeSet<String> = t
            .emitted
            .iter()
            .cloned()
            .chain(self_accepted(t, &rest))
            .collect();
        let mut matched = false;
        for rule in &p.rules {
            if rule.source == t.source.control
                && rule.trigger == event
                && env.guard_states(&rule.pre)?.contains(&t.source.data)
                && env.guard_states(&rule.post)?.contains(&t.target.data)
                && rule.required.is_subset(&available)
            {
                matched = true;
                break;
            }
        }
        if !matched {
            return Ok(false);
        }
    }
    Ok(true)
}

/// Runs the error-state semantics over a concrete trace, tracking the set of
/// protocol states the monitor can be in. `Ok` iff every step matches an
/// enabled transition; otherwise the first violation is reported.
pub fn monitor_trace(
    trace: &[MonitorStep],
    p: &PsmSentence,
    env: &EnvStructure,
) -> Result<MonitorVerdict, PsmError> {
    let mut states: BTreeSet<String> = BTreeSet::from([p.initial.clone()]);
    for (index, step) in trace.iter().enumerate() {
        let mut next = BTreeSet::new();
        for rule in &p.rules {
            if states.contains(&rule.source)
                && rule.trigger == step.event
                && env.guard_states(&rule.pre)?.contains(&step.data_before)
                && env.guard_states(&rule.post)?.contains(&step.data_after)
                && rule.required.is_subset(&step.emitted)
            {
                next.insert(rule.target.clone());
            }
        }
        if next.is_empty() {
            return Ok(MonitorVerdict::ErrorAt {
                step: index,
                event: step.event.clone(),
                states,
            });
        }
        states = next;
    }
    Ok(MonitorVerdict::Ok)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::env::EnvSignature;

    fn set(names: &[&str]) -> BTreeSet<String> {
        names.iter().map(|s| s.to_string()).collect()
    }

    fn prule(
        source: &str,
        pre: &str,
        trigger: &str,
        post: &str,
        required: &[&str],
        target: &str,
    ) -> PsmRule {
        PsmRule {
            source: source.to_string(),
            pre: pre.to_string(),
            trigger: trigger.to_string(),
            post: post.to_string(),
            required: set(required),
            target: target.to_string(),
        }
    }

    fn unit_env() -> (EnvSignature, EnvStructure) {
        let sig = EnvSignature::new(set(&["true"]), set(&[]), set(&["reply"]));
        let omega = EnvStructure {
            size: 1,
            guard_interp: [("true".to_string(), BTreeSet::from([0]))].into(),
            action_interp: Default::default(),
        };
        (sig, omega)
    }

    /// The conversation protocol of the running example, reduced to two
    /// events: verify opens a round, reply closes it.
    fn conversation() -> (SmSignature, PsmSentence) {
        let sig = SmSignature::new(set(&["verify", "reply"]), set(&["Idle", "Verifying"]));
        let p = PsmSentence {
            initial: "Idle".to_string(),
            rules: BTreeSet::from([
                prule("Idle", "true", "verify", "true", &[], "Verifying"),
                prule("Verifying", "true", "reply", "true", &[], "Idle"),
            ]),
        };
        (sig, p)
    }

    fn mstep(event: &str) -> MonitorStep {
        MonitorStep {
            event: event.to_string(),
            data_before: 0,
            data_after: 0,
            emitted: BTreeSet::new(),
        }
    }

    #[test]
    fn monitor_fires_and_errors() {
        let (_, omega) = unit_env();
        let (sig, p) = conversation();
        let theta = psm_canonical_monitor(&omega, &sig, &p, 2).unwrap();
        // verify selected in Idle fires to Verifying.
        assert!(theta.transitions.iter().any(|t| {
            t.source.control == "Idle"
                && t.source.pool.items() == vec![PoolItem::Event("verify".into())]
                && t.target.control == "Verifying"
        }));
        // verify selected while already in Verifying targets Error.
        assert!(theta.transitions.iter().any(|t| {
            t.source.control == "Verifying"
                && t.source.pool.items() == vec![PoolItem::Event("verify".into())]
                && t.target.control == ERROR_STATE
        }));
        // Monitoring is event-driven: no transitions out of empty pools, and
        // the error state is absorbing.
        assert!(theta
            .transitions
            .iter()
            .all(|t| !t.source.pool.is_empty() && t.source.control != ERROR_STATE));
    }

    #[test]
    fn reserved_state_collision_is_rejected() {
        let (_, omega) = unit_env();
        let sig = SmSignature::new(set(&["verify"]), set(&["Idle", ERROR_STATE]));
        let p = PsmSentence {
            initial: "Idle".to_string(),
            rules: BTreeSet::new(),
        };
        assert!(matches!(
            psm_canonical_monitor(&omega, &sig, &p, 2),
            Err(PsmError::ReservedState(_))
        ));
    }

    #[test]
    fn error_free_part_satisfies_the_protocol() {
        let (_, omega) = unit_env();
        let (sig, p) = conversation();
        let theta = psm_canonical_monitor(&omega, &sig, &p, 2).unwrap();
        let error_free = SmStructure {
            initial: theta.initial.clone(),
            transitions: theta
                .transitions
                .iter()
                .filter(|t| t.target.control != ERROR_STATE)
                .cloned()
                .collect(),
        };
        assert!(psm_satisfies(&error_free, &p, &omega).unwrap());
        assert!(!psm_satisfies(&theta, &p, &omega).unwrap());
    }

    #[test]
    fn empty_structure_satisfies_vacuously() {
        let (_, omega) = unit_env();
        let (_, p) = conversation();
        let theta = SmStructure {
            initial: Some((BTreeSet::from([0]), "Idle".to_string())),
            transitions: BTreeSet::new(),
        };
        assert!(psm_satisfies(&theta, &p, &omega).unwrap());
        let wrong_initial = SmStructure {
            initial: Some((BTreeSet::from([0]), "Verifying".to_string())),
            transitions: BTreeSet::new(),
        };
        assert!(!psm_satisfies(&wrong_initial, &p, &omega).unwrap());
    }

    #[test]
    fn required_messages_gate_satisfaction() {
        let (_, omega) = unit_env();
        let sig = SmSignature::new(set(&["verify"]), set(&["Idle", "Done"]));
        let p = PsmSentence {
            initial: "Idle".to_string(),
            rules: BTreeSet::from([prule("Idle", "true", "verify", "true", &["reply"], "Done")]),
        };
        let theta = psm_canonical_monitor(&omega, &sig, &p, 2).unwrap();
        // The monitor emits exactly the required messages, so its error-free
        // part satisfies the sentence.
        let error_free = SmStructure {
            initial: theta.initial.clone(),
            transitions: theta
                .transitions
                .iter()
                .filter(|t| t.target.control != ERROR_STATE)
                .cloned()
                .collect(),
        };
        assert!(error_free
            .transitions
            .iter()
            .all(|t| t.emitted.contains("reply")));
        assert!(psm_satisfies(&error_free, &p, &omega).unwrap());
        // Stripping the emission breaks the required-message condition.
        let stripped = SmStructure {
            initial: theta.initial.clone(),
            transitions: error_free
                .transitions
                .iter()
                .map(|t| SmTransition {
                    emitted: BTreeSet::new(),
                    ..t.clone()
                })
                .collect(),
        };
        assert!(!psm_satisfies(&stripped, &p, &omega).unwrap());
    }

    #[test]
    fn trace_monitoring() {
        let (_, omega) = unit_env();
        let (_, p) = conversation();
        assert_eq!(monitor_trace(&[], &p, &omega).unwrap(), MonitorVerdict::Ok);
        let happy = vec![mstep("verify"), mstep("reply"), mstep("verify")];
        assert_eq!(monitor_trace(&happy, &p, &omega).unwrap(), MonitorVerdict::Ok);
        let double = vec![mstep("verify"), mstep("verify")];
        assert_eq!(
            monitor_trace(&double, &p, &omega).unwrap(),
            MonitorVerdict::ErrorAt {
                step: 1,
                event: "verify".to_string(),
                states: set(&["Verifying"]),
            }
        );
    }

    #[test]
    fn monitoring_is_prefix_closed() {
        let (_, omega) = unit_env();
        let (_, p) = conversation();
        let trace = vec![mstep("verify"), mstep("reply"), mstep("verify"), mstep("reply")];
        assert_eq!(monitor_trace(&trace, &p, &omega).unwrap(), MonitorVerdict::Ok);
        for cut in 0..=trace.len() {
            assert_eq!(
                monitor_trace(&trace[..cut], &p, &omega).unwrap(),
                MonitorVerdict::Ok
            );
        }
    }

    #[test]
    fn required_messages_gate_the_trace() {
        let (_, omega) = unit_env();
        let p = PsmSentence {
            initial: "Idle".to_string(),
            rules: BTreeSet::from([prule("Idle", "true", "verify", "true", &["reply"], "Idle")]),
        };
        let mut with_reply = mstep("verify");
        with_reply.emitted = set(&["reply"]);
        assert_eq!(
            monitor_trace(&[with_reply], &p, &omega).unwrap(),
            MonitorVerdict::Ok
        );
        assert!(matches!(
            monitor_trace(&[mstep("verify")], &p, &omega).unwrap(),
            MonitorVerdict::ErrorAt { step: 0, .. }
        ));
    }
}
