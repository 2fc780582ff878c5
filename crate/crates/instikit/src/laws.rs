//! Randomized law suites: the satisfaction condition and the functor laws
//! (identity, composition) for the environment, state-machine, and flat
//! institutions, over seeded generators of small signatures, morphisms,
//! structures, and sentences.
//!
//! Instances grow with the iteration index, so the first failure reported is
//! a smallest one along the search ladder. Event and message name pools are
//! disjoint, matching the concrete layer where messages are port-qualified
//! and events are bare.

use std::collections::{BTreeMap, BTreeSet};

use rand::rngs::StdRng;
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};

use crate::env::{self, EnvMorphism, EnvSentence, EnvSignature, EnvStructure};
use crate::flat::{self, FlatMorphism, FlatSentence, FlatSignature, FlatStructure};
use crate::sm::{
    self, PoolItem, SmMorphism, SmSentence, SmSignature, SmStructure, TransitionRule,
};

/// Configuration of one suite run.
#[derive(Clone, Copy, Debug)]
pub struct LawConfig {
    pub seed: u64,
    pub iterations: usize,
    /// Swap in a deliberately broken environment reduct (drops guard
    /// restriction), to demonstrate counterexample reporting.
    pub broken_reduct: bool,
}

impl Default for LawConfig {
    fn default() -> Self {
        LawConfig {
            seed: 0,
            iterations: 500,
            broken_reduct: false,
        }
    }
}

/// A law violation with a printable instance dump.
#[derive(Clone, Debug)]
pub struct LawFailure {
    pub law: String,
    pub iteration: usize,
    pub instance: String,
}

/// Result of running one suite.
#[derive(Clone, Debug)]
pub struct LawSummary {
    pub name: String,
    pub checked: usize,
    pub failure: Option<LawFailure>,
}

impl LawSummary {
    pub fn passed(&self) -> bool {
        self.failure.is_none()
    }
}

/// Runs every suite under one configuration.
pub fn run_all(cfg: LawConfig) -> Vec<LawSummary> {
    vec![
        env_satisfaction_suite(cfg),
        env_functor_suite(cfg),
        sm_satisfaction_suite(cfg),
        sm_functor_suite(cfg),
        flat_satisfaction_suite(cfg),
        flat_functor_suite(cfg),
    ]
}

// Sizes grow along the iteration ladder: the earliest failure is a smallest
// one for the generator's search order.
fn ladder(iteration: usize, iterations: usize, max: usize) -> usize {
    1 + iteration * max.saturating_sub(1) / iterations.max(1)
}

fn names(prefix: &str, n: usize) -> Vec<String> {
    (0..n).map(|i| format!("{prefix}{i}")).collect()
}

fn pick<'a, T>(rng: &mut StdRng, xs: &'a [T]) -> &'a T {
    &xs[rng.gen_range(0..xs.len())]
}

fn subset(rng: &mut StdRng, xs: &BTreeSet<String>) -> BTreeSet<String> {
    xs.iter()
        .filter(|_| rng.gen_bool(0.5))
        .cloned()
        .collect()
}

fn gen_env_signature(rng: &mut StdRng, max: usize) -> EnvSignature {
    EnvSignature::new(
        names("g", rng.gen_range(1..=max)),
        names("a", rng.gen_range(1..=max)),
        names("m", rng.gen_range(0..=max)),
    )
}

/// A random (not necessarily injective) morphism into an independently
/// generated target signature at least as large as the source.
fn gen_env_morphism(rng: &mut StdRng, max: usize) -> EnvMorphism {
    let source = gen_env_signature(rng, max);
    let target = EnvSignature::new(
        names("g", rng.gen_range(source.guards.len()..=max.max(source.guards.len()))),
        names("a", rng.gen_range(source.actions.len()..=max.max(source.actions.len()))),
        names(
            "m",
            rng.gen_range(source.messages.len().max(1)..=max.max(source.messages.len()).max(1)),
        ),
    );
    let map_into = |rng: &mut StdRng, dom: &BTreeSet<String>, cod: &BTreeSet<String>| {
        let pool: Vec<&String> = cod.iter().collect();
        dom.iter()
            .map(|n| (n.clone(), (*pick(rng, &pool)).clone()))
            .collect::<BTreeMap<_, _>>()
    };
    let guard_map = map_into(rng, &source.guards, &target.guards);
    let action_map = map_into(rng, &source.actions, &target.actions);
    let message_map = map_into(rng, &source.messages, &target.messages);
    EnvMorphism::new(source, target, guard_map, action_map, message_map)
        .expect("generated maps are total and well-typed")
}

fn gen_env_structure(rng: &mut StdRng, sig: &EnvSignature, max_carrier: usize) -> EnvStructure {
    let size = rng.gen_range(1..=max_carrier);
    let guard_interp = sig
        .guards
        .iter()
        .map(|g| {
            let states: BTreeSet<usize> = (0..size).filter(|_| rng.gen_bool(0.5)).collect();
            (g.clone(), states)
        })
        .collect();
    let action_interp = sig
        .actions
        .iter()
        .map(|a| {
            let table: Vec<(usize, BTreeSet<String>)> = (0..size)
                .map(|_| (rng.gen_range(0..size), subset(rng, &sig.messages)))
                .collect();
            (a.clone(), table)
        })
        .collect();
    EnvStructure {
        size,
        guard_interp,
        action_interp,
    }
}

fn gen_env_sentence(rng: &mut StdRng, sig: &EnvSignature) -> EnvSentence {
    let guards: Vec<&String> = sig.guards.iter().collect();
    let actions: Vec<&String> = sig.actions.iter().collect();
    EnvSentence {
        pre: (*pick(rng, &guards)).clone(),
        action: (*pick(rng, &actions)).clone(),
        emits: subset(rng, &sig.messages),
        post: (*pick(rng, &guards)).clone(),
    }
}

/// A deliberately broken environment reduct: it forgets the guard
/// restriction, interpreting every source guard by the full carrier.
fn broken_env_reduct(m: &EnvMorphism, bigger: &EnvStructure) -> EnvStructure {
    let mut red = env::reduct(m, bigger).expect("well-typed instance");
    for states in red.guard_interp.values_mut() {
        *states = (0..red.size).collect();
    }
    red
}

pub fn env_satisfaction_suite(cfg: LawConfig) -> LawSummary {
    let mut rng = StdRng::seed_from_u64(cfg.seed);
    let mut failure = None;
    let mut checked = 0;
    for i in 0..cfg.iterations {
        let max = ladder(i, cfg.iterations, 3);
        let carrier = ladder(i, cfg.iterations, 4);
        let m = gen_env_morphism(&mut rng, max);
        let omega = gen_env_structure(&mut rng, &m.target, carrier);
        let s = gen_env_sentence(&mut rng, &m.source);
        let red = if cfg.broken_reduct {
            broken_env_reduct(&m, &omega)
        } else {
            env::reduct(&m, &omega).expect("well-typed")
        };
        let lhs = env::satisfies(&red, &s).expect("well-typed");
        let translated = env::translate_sentence(&m, &s).expect("well-typed");
        let rhs = env::satisfies(&omega, &translated).expect("well-typed");
        checked += 1;
        if lhs != rhs {
            failure = Some(LawFailure {
                law: "env satisfaction condition".to_string(),
                iteration: i,
                instance: format!(
                    "morphism: {m:?}\nstructure: {omega:?}\nsentence: {s}\nreduct |= s: {lhs}, structure |= translated: {rhs}"
                ),
            });
            break;
        }
    }
    LawSummary {
        name: "env.satisfaction".to_string(),
        checked,
        failure,
    }
}

pub fn env_functor_suite(cfg: LawConfig) -> LawSummary {
    let mut rng = StdRng::seed_from_u64(cfg.seed.wrapping_add(1));
    let mut failure = None;
    let mut checked = 0;
    for i in 0..cfg.iterations {
        let max = ladder(i, cfg.iterations, 3);
        let carrier = ladder(i, cfg.iterations, 4);
        // Identity laws.
        let sig = gen_env_signature(&mut rng, max);
        let omega = gen_env_structure(&mut rng, &sig, carrier);
        let id = EnvMorphism::identity(&sig);
        let s = gen_env_sentence(&mut rng, &sig);
        let id_red = env::reduct(&id, &omega).expect("identity reduct");
        let id_tr = env::translate_sentence(&id, &s).expect("identity translation");
        // Composition laws: m1 : H -> H', m2 : H' -> H''.
        let m2 = gen_env_morphism(&mut rng, max);
        let m1 = {
            // Build a morphism into m2's source.
            let source = gen_env_signature(&mut rng, max);
            let target = m2.source.clone();
            let map_into = |rng: &mut StdRng, dom: &BTreeSet<String>, cod: &BTreeSet<String>| {
                let pool: Vec<&String> = cod.iter().collect();
                dom.iter()
                    .filter(|_| !pool.is_empty())
                    .map(|n| (n.clone(), (*pick(rng, &pool)).clone()))
                    .collect::<BTreeMap<_, _>>()
            };
            let gm = map_into(&mut rng, &source.guards, &target.guards);
            let am = map_into(&mut rng, &source.actions, &target.actions);
            let mm = map_into(&mut rng, &source.messages, &target.messages);
            if source.messages.len() > mm.len() {
                // Target has no messages to map onto; shrink the source.
                let shrunk = EnvSignature::new(
                    source.guards.iter().cloned(),
                    source.actions.iter().cloned(),
                    std::iter::empty::<String>(),
                );
                EnvMorphism::new(shrunk, target, gm, am, BTreeMap::new()).expect("total")
            } else {
                EnvMorphism::new(source, target, gm, am, mm).expect("total")
            }
        };
        let omega2 = gen_env_structure(&mut rng, &m2.target, carrier);
        let s1 = gen_env_sentence(&mut rng, &m1.source);
        let composed = m1.compose(&m2).expect("composable");
        let lhs_structure = env::reduct(&composed, &omega2).expect("well-typed");
        let rhs_structure = env::reduct(&m1, &env::reduct(&m2, &omega2).expect("ok")).expect("ok");
        let lhs_sentence = env::translate_sentence(&composed, &s1).expect("ok");
        let rhs_sentence = env::translate_sentence(
            &m2,
            &env::translate_sentence(&m1, &s1).expect("ok"),
        )
        .expect("ok");
        checked += 1;
        if id_red != omega || id_tr != s || lhs_structure != rhs_structure
            || lhs_sentence != rhs_sentence
        {
            failure = Some(LawFailure {
                law: "env functor laws".to_string(),
                iteration: i,
                instance: format!("m1: {m1:?}\nm2: {m2:?}"),
            });
            break;
        }
    }
    LawSummary {
        name: "env.functor".to_string(),
        checked,
        failure,
    }
}

/// A small shared environment for the machine suites: guards and actions
/// interpreted over a random carrier, message names disjoint from event
/// names.
fn gen_shared_env(
    rng: &mut StdRng,
    max_names: usize,
    max_carrier: usize,
) -> (EnvSignature, EnvStructure) {
    let sig = gen_env_signature(rng, max_names);
    let omega = gen_env_structure(rng, &sig, max_carrier);
    (sig, omega)
}

fn gen_sm_signature(rng: &mut StdRng, max_events: usize, max_states: usize) -> SmSignature {
    SmSignature::new(
        names("e", rng.gen_range(0..=max_events)),
        names("s", rng.gen_range(1..=max_states)),
    )
}

/// An injective morphism from a fresh source into `target`.
fn gen_sm_morphism_into(rng: &mut StdRng, target: &SmSignature) -> SmMorphism {
    let pick_injective = |rng: &mut StdRng, cod: &BTreeSet<String>, n: usize| {
        let mut pool: Vec<String> = cod.iter().cloned().collect();
        pool.shuffle(rng);
        pool.truncate(n);
        pool
    };
    let n_events = rng.gen_range(0..=target.events.len());
    let n_states = rng.gen_range(1..=target.states.len());
    let events_img = pick_injective(rng, &target.events, n_events);
    let states_img = pick_injective(rng, &target.states, n_states);
    let source = SmSignature::new(
        names("e", n_events),
        names("s", n_states),
    );
    let event_map: BTreeMap<String, String> = source
        .events
        .iter()
        .cloned()
        .zip(events_img.into_iter())
        .collect();
    let state_map: BTreeMap<String, String> = source
        .states
        .iter()
        .cloned()
        .zip(states_img.into_iter())
        .collect();
    SmMorphism::new(source, target.clone(), event_map, state_map).expect("injective")
}

fn gen_sm_sentence(
    rng: &mut StdRng,
    env_sig: &EnvSignature,
    sig: &SmSignature,
) -> SmSentence {
    let states: Vec<&String> = sig.states.iter().collect();
    let guards: Vec<&String> = env_sig.guards.iter().collect();
    let actions: Vec<&String> = env_sig.actions.iter().collect();
    let mut items: Vec<PoolItem> = sig
        .events
        .iter()
        .map(|e| PoolItem::Event(e.clone()))
        .collect();
    items.extend(sig.states.iter().map(|s| PoolItem::Completion(s.clone())));
    let mut rules = BTreeSet::new();
    for _ in 0..rng.gen_range(0..=4) {
        rules.insert(TransitionRule {
            source: (*pick(rng, &states)).clone(),
            trigger: pick(rng, &items).clone(),
            guard: (*pick(rng, &guards)).clone(),
            action: (*pick(rng, &actions)).clone(),
            target: (*pick(rng, &states)).clone(),
        });
    }
    SmSentence {
        initial: (*pick(rng, &states)).clone(),
        rules,
    }
}

/// A structure over the target signature: canonical for some sentence, then
/// possibly mutated (transition removed, or initial state changed), so both
/// satisfying and non-satisfying structures are exercised.
fn gen_sm_structure(
    rng: &mut StdRng,
    omega: &EnvStructure,
    env_sig: &EnvSignature,
    sig: &SmSignature,
    capacity: usize,
) -> SmStructure {
    let s = gen_sm_sentence(rng, env_sig, sig);
    let mut theta = sm::canonical_structure(omega, sig, &s, capacity).expect("canonical");
    if rng.gen_bool(0.3) && !theta.transitions.is_empty() {
        let victim = rng.gen_range(0..theta.transitions.len());
        let t = theta.transitions.iter().nth(victim).cloned().unwrap();
        theta.transitions.remove(&t);
    }
    if rng.gen_bool(0.2) {
        let states: Vec<&String> = sig.states.iter().collect();
        if let Some((data, _)) = &theta.initial {
            theta.initial = Some((data.clone(), (*pick(rng, &states)).clone()));
        }
    }
    theta
}

pub fn sm_satisfaction_suite(cfg: LawConfig) -> LawSummary {
    let mut rng = StdRng::seed_from_u64(cfg.seed.wrapping_add(2));
    let mut failure = None;
    let mut checked = 0;
    for i in 0..cfg.iterations {
        let capacity = ladder(i, cfg.iterations, 2);
        let (env_sig, omega) = gen_shared_env(&mut rng, ladder(i, cfg.iterations, 2), 3);
        let target = gen_sm_signature(&mut rng, 3, 3);
        let m = gen_sm_morphism_into(&mut rng, &target);
        let s = gen_sm_sentence(&mut rng, &env_sig, &m.source);
        let theta = gen_sm_structure(&mut rng, &omega, &env_sig, &target, capacity);
        let red = sm::reduct(&m, &theta);
        let lhs = sm::satisfies(&red, &s, &omega, &m.source, capacity).expect("well-typed");
        let translated = sm::translate_sentence(&m, &s).expect("well-typed");
        let rhs = sm::satisfies(&theta, &translated, &omega, &target, capacity).expect("ok");
        checked += 1;
        if lhs != rhs {
            failure = Some(LawFailure {
                law: "sm satisfaction condition".to_string(),
                iteration: i,
                instance: format!(
                    "morphism: {m:?}\nsentence: {s:?}\nreduct |= s: {lhs}, theta |= translated: {rhs}"
                ),
            });
            break;
        }
    }
    LawSummary {
        name: "sm.satisfaction".to_string(),
        checked,
        failure,
    }
}

pub fn sm_functor_suite(cfg: LawConfig) -> LawSummary {
    let mut rng = StdRng::seed_from_u64(cfg.seed.wrapping_add(3));
    let mut failure = None;
    let mut checked = 0;
    for i in 0..cfg.iterations {
        let capacity = ladder(i, cfg.iterations, 2);
        let (env_sig, omega) = gen_shared_env(&mut rng, 2, 3);
        let big = gen_sm_signature(&mut rng, 3, 4);
        let m2 = gen_sm_morphism_into(&mut rng, &big);
        let m1 = gen_sm_morphism_into(&mut rng, &m2.source);
        let theta = gen_sm_structure(&mut rng, &omega, &env_sig, &big, capacity);
        let s = gen_sm_sentence(&mut rng, &env_sig, &m1.source);
        // Identity laws.
        let id = SmMorphism::identity(&big);
        let id_ok = sm::reduct(&id, &theta) == theta
            && sm::translate_sentence(&id, &gen_sm_sentence(&mut rng, &env_sig, &big))
                .is_ok();
        // Composition laws.
        let composed = m1.compose(&m2).expect("composable");
        let red_ok = sm::reduct(&composed, &theta) == sm::reduct(&m1, &sm::reduct(&m2, &theta));
        let tr_ok = sm::translate_sentence(&composed, &s).expect("ok")
            == sm::translate_sentence(&m2, &sm::translate_sentence(&m1, &s).expect("ok"))
                .expect("ok");
        checked += 1;
        if !(id_ok && red_ok && tr_ok) {
            failure = Some(LawFailure {
                law: "sm functor laws".to_string(),
                iteration: i,
                instance: format!("m1: {m1:?}\nm2: {m2:?}"),
            });
            break;
        }
    }
    LawSummary {
        name: "sm.functor".to_string(),
        checked,
        failure,
    }
}

/// Generates a flat morphism whose environment part maps messages disjointly
/// from the machine part's events, plus a flat structure over the target.
fn gen_flat_instance(
    rng: &mut StdRng,
    max: usize,
    capacity: usize,
) -> (FlatMorphism, FlatStructure, FlatSignature, FlatSignature) {
    let env_m = gen_env_morphism(rng, max);
    let target_sm = gen_sm_signature(rng, 2, 3);
    let sm_m = gen_sm_morphism_into(rng, &target_sm);
    let omega = gen_env_structure(rng, &env_m.target, 3);
    let theta = gen_sm_structure(rng, &omega, &env_m.target, &target_sm, capacity);
    let source = FlatSignature {
        env: env_m.source.clone(),
        sm: sm_m.source.clone(),
    };
    let target = FlatSignature {
        env: env_m.target.clone(),
        sm: target_sm,
    };
    (
        FlatMorphism { env: env_m, sm: sm_m },
        FlatStructure {
            env: omega,
            sm: theta,
        },
        source,
        target,
    )
}

fn gen_flat_sentence(rng: &mut StdRng, sig: &FlatSignature) -> FlatSentence {
    if rng.gen_bool(0.5) {
        FlatSentence::Env(gen_env_sentence(rng, &sig.env))
    } else {
        FlatSentence::Sm(gen_sm_sentence(rng, &sig.env, &sig.sm))
    }
}

pub fn flat_satisfaction_suite(cfg: LawConfig) -> LawSummary {
    let mut rng = StdRng::seed_from_u64(cfg.seed.wrapping_add(4));
    let mut failure = None;
    let mut checked = 0;
    for i in 0..cfg.iterations {
        let capacity = ladder(i, cfg.iterations, 2);
        let max = ladder(i, cfg.iterations, 3);
        let (m, structure, source_sig, target_sig) = gen_flat_instance(&mut rng, max, capacity);
        let s = gen_flat_sentence(&mut rng, &source_sig);
        let red = flat::flat_reduct(&m, &structure).expect("well-typed");
        let lhs = flat::satisfies(&red, &source_sig, &s, capacity).expect("ok");
        let translated = flat::translate_sentence(&m, &s).expect("ok");
        let rhs = flat::satisfies(&structure, &target_sig, &translated, capacity).expect("ok");
        checked += 1;
        if lhs != rhs {
            failure = Some(LawFailure {
                law: "flat satisfaction condition".to_string(),
                iteration: i,
                instance: format!("sentence: {s:?}\nlhs: {lhs}, rhs: {rhs}"),
            });
            break;
        }
    }
    LawSummary {
        name: "flat.satisfaction".to_string(),
        checked,
        failure,
    }
}

pub fn flat_functor_suite(cfg: LawConfig) -> LawSummary {
    let mut rng = StdRng::seed_from_u64(cfg.seed.wrapping_add(5));
    let mut failure = None;
    let mut checked = 0;
    for i in 0..cfg.iterations {
        let capacity = ladder(i, cfg.iterations, 2);
        let (m, structure, source_sig, _) = gen_flat_instance(&mut rng, 2, capacity);
        // Identity on the source signature.
        let id = FlatMorphism {
            env: EnvMorphism::identity(&source_sig.env),
            sm: SmMorphism::identity(&source_sig.sm),
        };
        let red = flat::flat_reduct(&m, &structure).expect("ok");
        let id_red = flat::flat_reduct(&id, &red).expect("ok");
        checked += 1;
        if id_red != red {
            failure = Some(LawFailure {
                law: "flat identity reduct".to_string(),
                iteration: i,
                instance: format!("morphism: {:?}", m.env),
            });
            break;
        }
    }
    LawSummary {
        name: "flat.functor".to_string(),
        checked,
        failure,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn all_suites_pass_on_the_default_seed() {
        for summary in run_all(LawConfig {
            iterations: 120,
            ..LawConfig::default()
        }) {
            assert!(
                summary.passed(),
                "{} failed: {:?}",
                summary.name,
                summary.failure
            );
            assert_eq!(summary.checked, 120);
        }
    }

    #[test]
    fn broken_reduct_is_caught_with_a_small_counterexample() {
        let summary = env_satisfaction_suite(LawConfig {
            broken_reduct: true,
            iterations: 500,
            ..LawConfig::default()
        });
        let failure = summary.failure.expect("broken reduct must be caught");
        // The ladder starts small, so the counterexample is found early.
        assert!(
            failure.iteration < 100,
            "expected an early, small counterexample, got iteration {}",
            failure.iteration
        );
        assert!(!failure.instance.is_empty());
    }

    #[test]
    fn suites_are_reproducible_per_seed() {
        let a = sm_satisfaction_suite(LawConfig {
            iterations: 60,
            seed: 42,
            ..LawConfig::default()
        });
        let b = sm_satisfaction_suite(LawConfig {
            iterations: 60,
            seed: 42,
            ..LawConfig::default()
        });
        assert_eq!(a.checked, b.checked);
        assert_eq!(a.passed(), b.passed());
    }

    #[test]
    fn zero_iterations_pass_trivially() {
        for summary in run_all(LawConfig {
            iterations: 0,
            ..LawConfig::default()
        }) {
            assert!(summary.passed());
            assert_eq!(summary.checked, 0);
        }
    }
}
