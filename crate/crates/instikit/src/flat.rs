//! The flat state-machine institution and the interleaving product.
//!
//! Flat signatures bundle an environment signature with a state machine
//! signature; sentences are either dynamic-logic formulas or transition
//! tables, satisfaction is inherited, and only reducts are new: the machine
//! part reduces along the state-machine morphism and then pulls every emitted
//! message set back through the message map.
//!
//! Communicating machines from a composite structure live here too:
//! [`combine_signatures`] is the paper-faithful combination with its
//! disjointness preconditions, and [`interleave_product`] forms the product
//! of two named components where exactly one machine moves per step and
//! messages wired to the peer are internalised into its pool. Product
//! namespaces are instance-prefixed (`atm:...`), which realises the explicit
//! connector renaming; per-instance pools are represented as one merged pool
//! of prefixed items, so merging reproduces the paper's joint pool up to the
//! routing partition.

use std::collections::{BTreeMap, BTreeSet};

use thiserror::Error;

use crate::env::{self, EnvError, EnvSentence, EnvSignature, EnvStructure};
use crate::sm::{
    self, Configuration, Pool, PoolItem, SmError, SmSentence, SmSignature, SmStructure,
    SmTransition,
};

#[derive(Debug, Error, PartialEq, Eq)]
pub enum FlatError {
    #[error(transparent)]
    Env(#[from] EnvError),
    #[error(transparent)]
    Sm(#[from] SmError),
    #[error("combination clash: {kind} '{name}' is declared on both sides")]
    Clash { kind: &'static str, name: String },
    #[error("wiring routes unknown message '{0}'")]
    UnknownRouteMessage(String),
    #[error("wiring targets unknown event '{0}'")]
    UnknownRouteEvent(String),
}

/// A flat signature `<H, Sigma>`.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct FlatSignature {
    pub env: EnvSignature,
    pub sm: SmSignature,
}

/// A flat morphism: an environment morphism paired with a state-machine
/// morphism.
#[derive(Clone, Debug)]
pub struct FlatMorphism {
    pub env: env::EnvMorphism,
    pub sm: sm::SmMorphism,
}

/// A flat structure `<Omega, Theta>`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FlatStructure {
    pub env: EnvStructure,
    pub sm: SmStructure,
}

/// A flat sentence: a dynamic-logic formula over H or a transition table
/// over H and Sigma.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum FlatSentence {
    Env(EnvSentence),
    Sm(SmSentence),
}

/// Projection to the environment part (the institution morphism from the
/// richer to the poorer logic).
pub fn project_env_signature(sig: &FlatSignature) -> &EnvSignature {
    &sig.env
}

/// Projection of a flat structure to its environment part.
pub fn project_env_structure(s: &FlatStructure) -> &EnvStructure {
    &s.env
}

/// Translates a flat sentence: environment names through the environment
/// morphism, machine names through the state-machine morphism.
pub fn translate_sentence(m: &FlatMorphism, s: &FlatSentence) -> Result<FlatSentence, FlatError> {
    match s {
        FlatSentence::Env(e) => Ok(FlatSentence::Env(env::translate_sentence(&m.env, e)?)),
        FlatSentence::Sm(t) => {
            let renamed = sm::translate_sentence(&m.sm, t)?;
            let mut rules = BTreeSet::new();
            for r in renamed.rules {
                let guard = m
                    .env
                    .guard_map
                    .get(&r.guard)
                    .ok_or_else(|| EnvError::UnknownName {
                        kind: "guard",
                        name: r.guard.clone(),
                    })?
                    .clone();
                let action = m
                    .env
                    .action_map
                    .get(&r.action)
                    .ok_or_else(|| EnvError::UnknownName {
                        kind: "action",
                        name: r.action.clone(),
                    })?
                    .clone();
                rules.insert(sm::TransitionRule {
                    guard,
                    action,
                    ..r
                });
            }
            Ok(FlatSentence::Sm(SmSentence {
                initial: renamed.initial,
                rules,
            }))
        }
    }
}

/// The flat reduct `<Omega', Theta'>|(eta, sigma) = <Omega'|eta,
/// Theta'|sigma|eta>`: the machine part reduces along sigma and every emitted
/// message set pulls back to its preimage under the message map.
pub fn flat_reduct(m: &FlatMorphism, s: &FlatStructure) -> Result<FlatStructure, FlatError> {
    let env_part = env::reduct(&m.env, &s.env)?;
    let sm_part = sm::reduct(&m.sm, &s.sm);
    let transitions = sm_part
        .transitions
        .into_iter()
        .map(|t| {
            let emitted: BTreeSet<String> = m
                .env
                .source
                .messages
                .iter()
                .filter(|msg| t.emitted.contains(&m.env.message_map[*msg]))
                .cloned()
                .collect();
            SmTransition { emitted, ..t }
        })
        .collect();
    Ok(FlatStructure {
        env: env_part,
        sm: SmStructure {
            initial: sm_part.initial,
            transitions,
        },
    })
}

/// Satisfaction in the flat institution is inherited componentwise.
pub fn satisfies(
    structure: &FlatStructure,
    sig: &FlatSignature,
    s: &FlatSentence,
    capacity: usize,
) -> Result<bool, FlatError> {
    match s {
        FlatSentence::Env(e) => Ok(env::satisfies(&structure.env, e)?),
        FlatSentence::Sm(t) => Ok(sm::satisfies(
            &structure.sm,
            t,
            &structure.env,
            &sig.sm,
            capacity,
        )?),
    }
}

fn disjoint(
    kind: &'static str,
    a: &BTreeSet<String>,
    b: &BTreeSet<String>,
) -> Result<(), FlatError> {
    if let Some(name) = a.intersection(b).next() {
        return Err(FlatError::Clash {
            kind,
            name: name.clone(),
        });
    }
    Ok(())
}

/// Renders a product control state.
pub fn pair_state(left: &str, right: &str) -> String {
    format!("({left},{right})")
}

/// Combines two flat signatures: component-wise union of guards, actions and
/// messages; the union of events and states for the events; the product for
/// the states. Requires the paper's disjointness preconditions (messages may
/// be shared).
pub fn combine_signatures(a: &FlatSignature, b: &FlatSignature) -> Result<FlatSignature, FlatError> {
    disjoint("guard", &a.env.guards, &b.env.guards)?;
    disjoint("action", &a.env.actions, &b.env.actions)?;
    disjoint("event", &a.sm.events, &b.sm.events)?;
    disjoint("state", &a.sm.states, &b.sm.states)?;
    let mut events: BTreeSet<String> = a.sm.events.union(&b.sm.events).cloned().collect();
    events.extend(a.sm.states.iter().cloned());
    events.extend(b.sm.states.iter().cloned());
    let states = a
        .sm
        .states
        .iter()
        .flat_map(|s1| b.sm.states.iter().map(move |s2| pair_state(s1, s2)))
        .collect();
    Ok(FlatSignature {
        env: EnvSignature {
            guards: a.env.guards.union(&b.env.guards).cloned().collect(),
            actions: a.env.actions.union(&b.env.actions).cloned().collect(),
            messages: a.env.messages.union(&b.env.messages).cloned().collect(),
        },
        sm: SmSignature { events, states },
    })
}

/// A named machine over its own environment, ready for composition.
#[derive(Clone, Debug)]
pub struct FlatComponent {
    pub name: String,
    pub signature: FlatSignature,
    pub structure: FlatStructure,
}

/// Connector wiring for a binary product: `(sender instance, message)` is
/// internalised as `event` in the other instance's pool.
#[derive(Clone, Debug, Default)]
pub struct Wiring {
    pub routes: BTreeMap<(String, String), String>,
}

fn prefixed(instance: &str, name: &str) -> String {
    format!("{instance}:{name}")
}

fn prefix_set(instance: &str, names: &BTreeSet<String>) -> BTreeSet<String> {
    names.iter().map(|n| prefixed(instance, n)).collect()
}

fn prefix_item(instance: &str, item: &PoolItem) -> PoolItem {
    match item {
        PoolItem::Event(e) => PoolItem::Event(prefixed(instance, e)),
        PoolItem::Completion(s) => PoolItem::Completion(prefixed(instance, s)),
    }
}

fn prefix_pool(instance: &str, pool: &Pool) -> Pool {
    let mut out = Pool::empty();
    for item in pool.items() {
        out.push(prefix_item(instance, &item));
    }
    out
}

fn merge_pools(left: &Pool, right: &Pool) -> Pool {
    let mut out = left.clone();
    for item in right.items() {
        out.push(item);
    }
    out
}

/// The instance-prefixed flat signature of one component inside a product.
pub fn prefix_signature(instance: &str, sig: &FlatSignature) -> FlatSignature {
    FlatSignature {
        env: EnvSignature {
            guards: prefix_set(instance, &sig.env.guards),
            actions: prefix_set(instance, &sig.env.actions),
            messages: prefix_set(instance, &sig.env.messages),
        },
        sm: SmSignature {
            events: prefix_set(instance, &sig.sm.events),
            states: prefix_set(instance, &sig.sm.states),
        },
    }
}

fn product_env(left: &FlatComponent, right: &FlatComponent) -> EnvStructure {
    let (l, r) = (&left.structure.env, &right.structure.env);
    let pair_id = |dl: usize, dr: usize| dl * r.size + dr;
    let mut guard_interp = BTreeMap::new();
    for (g, states) in &l.guard_interp {
        let lifted: BTreeSet<usize> = states
            .iter()
            .flat_map(|&dl| (0..r.size).map(move |dr| pair_id(dl, dr)))
            .collect();
        guard_interp.insert(prefixed(&left.name, g), lifted);
    }
    for (g, states) in &r.guard_interp {
        let lifted: BTreeSet<usize> = (0..l.size)
            .flat_map(|dl| states.iter().map(move |&dr| pair_id(dl, dr)))
            .collect();
        guard_interp.insert(prefixed(&right.name, g), lifted);
    }
    let mut action_interp = BTreeMap::new();
    for (a, table) in &l.action_interp {
        let mut lifted = Vec::with_capacity(l.size * r.size);
        for dl in 0..l.size {
            for dr in 0..r.size {
                let (succ, emitted) = &table[dl];
                let emitted = emitted.iter().map(|m| prefixed(&left.name, m)).collect();
                lifted.push((pair_id(*succ, dr), emitted));
            }
        }
        action_interp.insert(prefixed(&left.name, a), lifted);
    }
    for (a, table) in &r.action_interp {
        let mut lifted = Vec::with_capacity(l.size * r.size);
        for dl in 0..l.size {
            for dr in 0..r.size {
                let (succ, emitted) = &table[dr];
                let emitted = emitted.iter().map(|m| prefixed(&right.name, m)).collect();
                lifted.push((pair_id(dl, *succ), emitted));
            }
        }
        action_interp.insert(prefixed(&right.name, a), lifted);
    }
    EnvStructure {
        size: l.size * r.size,
        guard_interp,
        action_interp,
    }
}

struct SideCtx<'a> {
    mover: &'a FlatComponent,
    peer: &'a FlatComponent,
    mover_is_left: bool,
}

/// The interleaving product of two named components: data states are pairs,
/// guards and actions act on their own component, and transitions interleave
/// — exactly one machine moves per step, pairing each of its transitions with
/// every configuration of the peer. Emitted messages routed by the wiring are
/// internalised into the peer's pool; the rest stay emitted. Overflow markers
/// propagate, and internalising appends respect the per-instance `capacity`.
pub fn interleave_product(
    left: &FlatComponent,
    right: &FlatComponent,
    wiring: &Wiring,
    capacity: usize,
) -> Result<(FlatSignature, FlatStructure), FlatError> {
    for ((sender, msg), event) in &wiring.routes {
        let (from, to) = if *sender == left.name {
            (left, right)
        } else {
            (right, left)
        };
        if !from.signature.env.messages.contains(msg) {
            return Err(FlatError::UnknownRouteMessage(msg.clone()));
        }
        if !to.signature.sm.events.contains(event) {
            return Err(FlatError::UnknownRouteEvent(event.clone()));
        }
    }

    let combined = combine_signatures(
        &prefix_signature(&left.name, &left.signature),
        &prefix_signature(&right.name, &right.signature),
    )?;

    // Configurations of the peer: everything its structure mentions, plus
    // empty-pool initial configurations.
    let peer_configs = |c: &FlatComponent| -> Vec<Configuration> {
        let mut set = BTreeSet::new();
        if let Some((data, control)) = &c.structure.sm.initial {
            for &d in data {
                set.insert(Configuration {
                    data: d,
                    pool: Pool::empty(),
                    control: control.clone(),
                });
            }
        }
        for t in &c.structure.sm.transitions {
            set.insert(t.source.clone());
            set.insert(t.target.clone());
        }
        set.into_iter().collect()
    };

    let mut transitions = BTreeSet::new();
    let sides = [
        SideCtx {
            mover: left,
            peer: right,
            mover_is_left: true,
        },
        SideCtx {
            mover: right,
            peer: left,
            mover_is_left: false,
        },
    ];
    for side in &sides {
        let peer_cs = peer_configs(side.peer);
        for t in &side.mover.structure.sm.transitions {
            for pc in &peer_cs {
                let mover_src = prefix_pool(&side.mover.name, &t.source.pool);
                let mover_tgt = prefix_pool(&side.mover.name, &t.target.pool);
                let peer_pool = prefix_pool(&side.peer.name, &pc.pool);

                // Route wired emissions into the peer pool, in sorted order.
                let mut internal: Vec<PoolItem> = Vec::new();
                let mut emitted = BTreeSet::new();
                for msg in &t.emitted {
                    match wiring.routes.get(&(side.mover.name.clone(), msg.clone())) {
                        Some(event) => internal
                            .push(PoolItem::Event(prefixed(&side.peer.name, event))),
                        None => {
                            emitted.insert(prefixed(&side.mover.name, msg));
                        }
                    }
                }
                let peer_count = peer_pool.len();
                let room = capacity.saturating_sub(peer_count);
                let overflow_route = internal.len() > room;
                let (peer_after, _) = peer_pool.append(&internal, capacity);

                let (src_l, src_r, tgt_l, tgt_r) = if side.mover_is_left {
                    (&mover_src, &peer_pool, &mover_tgt, &peer_after)
                } else {
                    (&peer_pool, &mover_src, &peer_after, &mover_tgt)
                };
                let (sd, td, pd) = (t.source.data, t.target.data, pc.data);
                let pair_id = |dl: usize, dr: usize| dl * right.structure.env.size + dr;
                let (src_data, tgt_data, src_ctrl, tgt_ctrl) = if side.mover_is_left {
                    (
                        pair_id(sd, pd),
                        pair_id(td, pd),
                        pair_state(
                            &prefixed(&left.name, &t.source.control),
                            &prefixed(&right.name, &pc.control),
                        ),
                        pair_state(
                            &prefixed(&left.name, &t.target.control),
                            &prefixed(&right.name, &pc.control),
                        ),
                    )
                } else {
                    (
                        pair_id(pd, sd),
                        pair_id(pd, td),
                        pair_state(
                            &prefixed(&left.name, &pc.control),
                            &prefixed(&right.name, &t.source.control),
                        ),
                        pair_state(
                            &prefixed(&left.name, &pc.control),
                            &prefixed(&right.name, &t.target.control),
                        ),
                    )
                };
                transitions.insert(SmTransition {
                    source: Configuration {
                        data: src_data,
                        pool: merge_pools(src_l, src_r),
                        control: src_ctrl,
                    },
                    emitted,
                    overflow: t.overflow || overflow_route,
                    target: Configuration {
                        data: tgt_data,
                        pool: merge_pools(tgt_l, tgt_r),
                        control: tgt_ctrl,
                    },
                });
            }
        }
    }

    // I_Theta1 || I_Theta2 = ((s1, s2), Omega1 x Omega2).
    let initial = match (&left.structure.sm.initial, &right.structure.sm.initial) {
        (Some((dl, sl)), Some((dr, sr))) => {
            let data = dl
                .iter()
                .flat_map(|&a| dr.iter().map(move |&b| a * right.structure.env.size + b))
                .collect();
            Some((
                data,
                pair_state(&prefixed(&left.name, sl), &prefixed(&right.name, sr)),
            ))
        }
        _ => None,
    };

    Ok((
        combined,
        FlatStructure {
            env: product_env(left, right),
            sm: SmStructure {
                initial,
                transitions,
            },
        },
    ))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::env::EnvMorphism;
    use crate::sm::{SmMorphism, TransitionRule};

    fn set(names: &[&str]) -> BTreeSet<String> {
        names.iter().map(|s| s.to_string()).collect()
    }

    fn unit_flat_sig(
        guards: &[&str],
        actions: &[&str],
        messages: &[&str],
        events: &[&str],
        states: &[&str],
    ) -> FlatSignature {
        FlatSignature {
            env: EnvSignature {
                guards: set(guards),
                actions: set(actions),
                messages: set(messages),
            },
            sm: SmSignature {
                events: set(events),
                states: set(states),
            },
        }
    }

    /// A one-data-state machine that fires `kick` from A to B, emitting "m".
    fn kicker(name: &str) -> FlatComponent {
        let signature = unit_flat_sig(&["true"], &["send_m"], &["m"], &["kick"], &["A", "B"]);
        let env = EnvStructure {
            size: 1,
            guard_interp: [("true".to_string(), BTreeSet::from([0]))].into(),
            action_interp: [("send_m".to_string(), vec![(0, set(&["m"]))])].into(),
        };
        let sentence = SmSentence {
            initial: "A".to_string(),
            rules: BTreeSet::from([TransitionRule {
                source: "A".to_string(),
                trigger: PoolItem::Event("kick".to_string()),
                guard: "true".to_string(),
                action: "send_m".to_string(),
                target: "B".to_string(),
            }]),
        };
        let sm = sm::canonical_structure(&env, &signature.sm, &sentence, 2).unwrap();
        FlatComponent {
            name: name.to_string(),
            signature,
            structure: FlatStructure { env, sm },
        }
    }

    /// A machine with one state and no transitions over an empty vocabulary.
    fn sleeper(name: &str) -> FlatComponent {
        let signature = unit_flat_sig(&[], &[], &[], &[], &["Z"]);
        let env = EnvStructure {
            size: 1,
            guard_interp: BTreeMap::new(),
            action_interp: BTreeMap::new(),
        };
        let sm = SmStructure {
            initial: Some((BTreeSet::from([0]), "Z".to_string())),
            transitions: BTreeSet::new(),
        };
        FlatComponent {
            name: name.to_string(),
            signature,
            structure: FlatStructure { env, sm },
        }
    }

    #[test]
    fn combination_takes_unions_and_state_products() {
        let a = unit_flat_sig(&["g1"], &["a1"], &["m"], &["e1"], &["Idle1"]);
        let b = unit_flat_sig(&["g2"], &["a2"], &["m"], &["e2"], &["Idle2"]);
        let c = combine_signatures(&a, &b).unwrap();
        assert!(c.env.guards.contains("g1") && c.env.guards.contains("g2"));
        assert_eq!(c.env.messages, set(&["m"]));
        assert!(c.sm.events.contains("e1") && c.sm.events.contains("Idle1"));
        assert_eq!(c.sm.states, set(&["(Idle1,Idle2)"]));
    }

    #[test]
    fn combination_with_empty_side_is_a_unit_product() {
        let a = unit_flat_sig(&["g"], &[], &[], &["e"], &["S", "T"]);
        let unit = unit_flat_sig(&[], &[], &[], &[], &["Z"]);
        let c = combine_signatures(&a, &unit).unwrap();
        assert_eq!(c.sm.states, set(&["(S,Z)", "(T,Z)"]));
    }

    #[test]
    fn combination_rejects_overlaps() {
        let a = unit_flat_sig(&[], &[], &[], &[], &["S"]);
        let b = unit_flat_sig(&[], &[], &[], &[], &["S"]);
        assert!(matches!(
            combine_signatures(&a, &b),
            Err(FlatError::Clash { kind: "state", .. })
        ));
    }

    #[test]
    fn identity_flat_reduct_is_identity() {
        let c = kicker("k");
        let m = FlatMorphism {
            env: EnvMorphism::identity(&c.signature.env),
            sm: SmMorphism::identity(&c.signature.sm),
        };
        assert_eq!(flat_reduct(&m, &c.structure).unwrap(), c.structure);
    }

    #[test]
    fn flat_reduct_pulls_messages_back() {
        // Forget "m": the source signature has no message mapping onto it.
        let c = kicker("k");
        let mut small_env = c.signature.env.clone();
        small_env.messages = BTreeSet::new();
        let env_m = EnvMorphism::new(
            small_env.clone(),
            c.signature.env.clone(),
            [("true".to_string(), "true".to_string())].into(),
            [("send_m".to_string(), "send_m".to_string())].into(),
            BTreeMap::new(),
        )
        .unwrap();
        let m = FlatMorphism {
            env: env_m,
            sm: SmMorphism::identity(&c.signature.sm),
        };
        let red = flat_reduct(&m, &c.structure).unwrap();
        assert!(red.sm.transitions.iter().all(|t| t.emitted.is_empty()));
        assert!(!c
            .structure
            .sm
            .transitions
            .iter()
            .all(|t| t.emitted.is_empty()));
        // Projection to the environment part commutes with the reduct.
        assert_eq!(
            project_env_structure(&red),
            &env::reduct(&m.env, project_env_structure(&c.structure)).unwrap()
        );
    }

    #[test]
    fn product_interleaves_one_mover_per_step() {
        let l = kicker("l");
        let r = kicker("r");
        let (sig, prod) = interleave_product(&l, &r, &Wiring::default(), 2).unwrap();
        assert!(sig.sm.states.contains("(l:A,r:A)"));
        assert!(!prod.sm.transitions.is_empty());
        for t in &prod.sm.transitions {
            // Exactly one side's control component changes or one side's pool
            // shrinks; the other is untouched.
            let (sl, sr) = split_pair(&t.source.control);
            let (tl, tr) = split_pair(&t.target.control);
            let left_moved = sl != tl;
            let right_moved = sr != tr;
            assert!(!(left_moved && right_moved));
        }
        let initial = prod.sm.initial.as_ref().unwrap();
        assert_eq!(initial.1, "(l:A,r:A)");
        assert_eq!(initial.0.len(), 1);
    }

    fn split_pair(s: &str) -> (String, String) {
        let inner = &s[1..s.len() - 1];
        let (a, b) = inner.split_once(',').unwrap();
        (a.to_string(), b.to_string())
    }

    #[test]
    fn product_internalizes_wired_messages() {
        let l = kicker("l");
        let r = kicker("r");
        let wiring = Wiring {
            routes: [(("l".to_string(), "m".to_string()), "kick".to_string())].into(),
        };
        let (_, prod) = interleave_product(&l, &r, &wiring, 2).unwrap();
        let fired: Vec<&SmTransition> = prod
            .sm
            .transitions
            .iter()
            .filter(|t| {
                let (sl, _) = split_pair(&t.source.control);
                let (tl, _) = split_pair(&t.target.control);
                sl == "l:A" && tl == "l:B"
            })
            .collect();
        assert!(!fired.is_empty());
        for t in fired {
            // The wired message is internalised, not emitted...
            assert!(!t.emitted.contains("l:m"));
            // ...and lands in the peer's pool as its event, unless the peer
            // pool was already at capacity (then the overflow marker is set).
            assert!(
                t.target
                    .pool
                    .items()
                    .contains(&PoolItem::Event("r:kick".to_string()))
                    || t.overflow
            );
        }
        assert!(prod.sm.transitions.iter().any(|t| t
            .target
            .pool
            .items()
            .contains(&PoolItem::Event("r:kick".to_string()))));
        // The unwired side still emits externally.
        assert!(prod
            .sm
            .transitions
            .iter()
            .any(|t| t.emitted.contains("r:m")));
    }

    #[test]
    fn product_with_sleeping_peer_mirrors_the_mover() {
        let l = kicker("l");
        let z = sleeper("z");
        let (_, prod) = interleave_product(&l, &z, &Wiring::default(), 2).unwrap();
        // Every product transition is a mover transition paired with Z.
        assert_eq!(
            prod.sm.transitions.len(),
            l.structure.sm.transitions.len()
        );
        for t in &prod.sm.transitions {
            let (_, zr) = split_pair(&t.source.control);
            assert_eq!(zr, "z:Z");
        }
    }

    #[test]
    fn product_is_commutative_up_to_pair_swap() {
        let l = kicker("l");
        let r = kicker("r");
        let (_, lr) = interleave_product(&l, &r, &Wiring::default(), 2).unwrap();
        let (_, rl) = interleave_product(&r, &l, &Wiring::default(), 2).unwrap();
        let swap = |t: &SmTransition| {
            let (a, b) = split_pair(&t.source.control);
            let (c, d) = split_pair(&t.target.control);
            (pair_state(&b, &a), pair_state(&d, &c), t.emitted.clone())
        };
        let lhs: BTreeSet<_> = lr.sm.transitions.iter().map(swap).collect();
        let rhs: BTreeSet<_> = rl
            .sm
            .transitions
            .iter()
            .map(|t| {
                (
                    t.source.control.clone(),
                    t.target.control.clone(),
                    t.emitted.clone(),
                )
            })
            .collect();
        assert_eq!(lhs, rhs);
    }
}
