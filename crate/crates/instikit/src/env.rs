//! The environment institution.
//!
//! An environment fixes the vocabulary a state machine may use: guard names,
//! action names, and message names. Structures interpret that vocabulary over
//! a finite carrier of data states; sentences are simple dynamic-logic
//! constraints `pre -> [action] emits |> post`. Signature morphisms rename the
//! vocabulary, sentences translate along them, and structures reduce against
//! them.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use thiserror::Error;

/// Index of a data state in a structure's carrier.
pub type DataId = usize;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum EnvError {
    #[error("'{name}' is not a {kind} of the signature")]
    UnknownName { kind: &'static str, name: String },
    #[error("morphism {kind} map misses '{name}'")]
    PartialMap { kind: &'static str, name: String },
    #[error("morphism {kind} map sends '{name}' outside the target signature")]
    BadImage { kind: &'static str, name: String },
    #[error("morphisms do not compose: mid signatures differ")]
    BadComposition,
    #[error("structure does not interpret {kind} '{name}'")]
    MissingInterp { kind: &'static str, name: String },
    #[error("interpretation of '{name}' leaves the carrier (size {size})")]
    OutOfCarrier { name: String, size: usize },
}

/// An environment signature H = (guards, actions, messages).
#[derive(Clone, Debug, Default, PartialEq, Eq, PartialOrd, Ord)]
pub struct EnvSignature {
    pub guards: BTreeSet<String>,
    pub actions: BTreeSet<String>,
    pub messages: BTreeSet<String>,
}

impl EnvSignature {
    pub fn new<I, J, K>(guards: I, actions: J, messages: K) -> Self
    where
        I: IntoIterator<Item = String>,
        J: IntoIterator<Item = String>,
        K: IntoIterator<Item = String>,
    {
        EnvSignature {
            guards: guards.into_iter().collect(),
            actions: actions.into_iter().collect(),
            messages: messages.into_iter().collect(),
        }
    }

    pub fn contains_sentence(&self, s: &EnvSentence) -> bool {
        self.guards.contains(&s.pre)
            && self.guards.contains(&s.post)
            && self.actions.contains(&s.action)
            && s.emits.iter().all(|m| self.messages.contains(m))
    }
}

/// A signature morphism: three total maps between the respective name sets.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct EnvMorphism {
    pub source: EnvSignature,
    pub target: EnvSignature,
    pub guard_map: BTreeMap<String, String>,
    pub action_map: BTreeMap<String, String>,
    pub message_map: BTreeMap<String, String>,
}

fn check_total(
    kind: &'static str,
    dom: &BTreeSet<String>,
    cod: &BTreeSet<String>,
    map: &BTreeMap<String, String>,
) -> Result<(), EnvError> {
    for name in dom {
        match map.get(name) {
            None => {
                return Err(EnvError::PartialMap {
                    kind,
                    name: name.clone(),
                })
            }
            Some(img) if !cod.contains(img) => {
                return Err(EnvError::BadImage {
                    kind,
                    name: name.clone(),
                })
            }
            _ => {}
        }
    }
    Ok(())
}

impl EnvMorphism {
    pub fn new(
        source: EnvSignature,
        target: EnvSignature,
        guard_map: BTreeMap<String, String>,
        action_map: BTreeMap<String, String>,
        message_map: BTreeMap<String, String>,
    ) -> Result<Self, EnvError> {
        check_total("guard", &source.guards, &target.guards, &guard_map)?;
        check_total("action", &source.actions, &target.actions, &action_map)?;
        check_total("message", &source.messages, &target.messages, &message_map)?;
        Ok(EnvMorphism {
            source,
            target,
            guard_map,
            action_map,
            message_map,
        })
    }

    pub fn identity(sig: &EnvSignature) -> Self {
        let id = |names: &BTreeSet<String>| {
            names
                .iter()
                .map(|n| (n.clone(), n.clone()))
                .collect::<BTreeMap<_, _>>()
        };
        EnvMorphism {
            source: sig.clone(),
            target: sig.clone(),
            guard_map: id(&sig.guards),
            action_map: id(&sig.actions),
            message_map: id(&sig.messages),
        }
    }

    /// Composes `self : H -> H'` with `then : H' -> H''` into `H -> H''`.
    pub fn compose(&self, then: &EnvMorphism) -> Result<Self, EnvError> {
        if self.target != then.source {
            return Err(EnvError::BadComposition);
        }
        let chain = |first: &BTreeMap<String, String>, second: &BTreeMap<String, String>| {
            first
                .iter()
                .map(|(k, v)| (k.clone(), second[v].clone()))
                .collect::<BTreeMap<_, _>>()
        };
        Ok(EnvMorphism {
            source: self.source.clone(),
            target: then.target.clone(),
            guard_map: chain(&self.guard_map, &then.guard_map),
            action_map: chain(&self.action_map, &then.action_map),
            message_map: chain(&self.message_map, &then.message_map),
        })
    }

    fn guard(&self, g: &str) -> Result<&String, EnvError> {
        self.guard_map.get(g).ok_or_else(|| EnvError::UnknownName {
            kind: "guard",
            name: g.to_string(),
        })
    }

    fn action(&self, a: &str) -> Result<&String, EnvError> {
        self.action_map
            .get(a)
            .ok_or_else(|| EnvError::UnknownName {
                kind: "action",
                name: a.to_string(),
            })
    }
}

/// A finite environment structure: carrier of `size` data states, guard
/// interpretation as state sets, total deterministic action interpretation.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct EnvStructure {
    pub size: usize,
    pub guard_interp: BTreeMap<String, BTreeSet<DataId>>,
    /// For each action, one `(successor, emitted messages)` entry per carrier
    /// state, indexed by [`DataId`].
    pub action_interp: BTreeMap<String, Vec<(DataId, BTreeSet<String>)>>,
}

impl EnvStructure {
    pub fn guard_states(&self, g: &str) -> Result<&BTreeSet<DataId>, EnvError> {
        self.guard_interp
            .get(g)
            .ok_or_else(|| EnvError::MissingInterp {
                kind: "guard",
                name: g.to_string(),
            })
    }

    pub fn apply(&self, a: &str, state: DataId) -> Result<&(DataId, BTreeSet<String>), EnvError> {
        let table = self
            .action_interp
            .get(a)
            .ok_or_else(|| EnvError::MissingInterp {
                kind: "action",
                name: a.to_string(),
            })?;
        table.get(state).ok_or(EnvError::OutOfCarrier {
            name: a.to_string(),
            size: self.size,
        })
    }

    /// Checks the structure interprets every name of `sig` and stays inside
    /// its carrier and message set.
    pub fn validate_over(&self, sig: &EnvSignature) -> Result<(), EnvError> {
        for g in &sig.guards {
            let states = self.guard_states(g)?;
            if states.iter().any(|&s| s >= self.size) {
                return Err(EnvError::OutOfCarrier {
                    name: g.clone(),
                    size: self.size,
                });
            }
        }
        for a in &sig.actions {
            let table = self
                .action_interp
                .get(a)
                .ok_or_else(|| EnvError::MissingInterp {
                    kind: "action",
                    name: a.clone(),
                })?;
            if table.len() != self.size {
                return Err(EnvError::OutOfCarrier {
                    name: a.clone(),
                    size: self.size,
                });
            }
            for (succ, emits) in table {
                if *succ >= self.size {
                    return Err(EnvError::OutOfCarrier {
                        name: a.clone(),
                        size: self.size,
                    });
                }
                for m in emits {
                    if !sig.messages.contains(m) {
                        return Err(EnvError::UnknownName {
                            kind: "message",
                            name: m.clone(),
                        });
                    }
                }
            }
        }
        Ok(())
    }
}

/// A dynamic-logic sentence `pre -> [action] emits |> post`.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub struct EnvSentence {
    pub pre: String,
    pub action: String,
    pub emits: BTreeSet<String>,
    pub post: String,
}

impl fmt::Display for EnvSentence {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let emits: Vec<&str> = self.emits.iter().map(|s| s.as_str()).collect();
        write!(
            f,
            "{} -> [{}] {{{}}} |> {}",
            self.pre,
            self.action,
            emits.join(", "),
            self.post
        )
    }
}

/// Translates a sentence over the morphism's source into one over its target:
/// guards and the action map pointwise, the emitted set maps to its image.
pub fn translate_sentence(m: &EnvMorphism, s: &EnvSentence) -> Result<EnvSentence, EnvError> {
    let emits = s
        .emits
        .iter()
        .map(|msg| {
            m.message_map
                .get(msg)
                .cloned()
                .ok_or_else(|| EnvError::UnknownName {
                    kind: "message",
                    name: msg.clone(),
                })
        })
        .collect::<Result<BTreeSet<_>, _>>()?;
    Ok(EnvSentence {
        pre: m.guard(&s.pre)?.clone(),
        action: m.action(&s.action)?.clone(),
        emits,
        post: m.guard(&s.post)?.clone(),
    })
}

/// The reduct of a target structure along a morphism: the carrier is
/// unchanged, guards look up their image, and action emissions pull back to
/// the preimage under the message map.
pub fn reduct(m: &EnvMorphism, bigger: &EnvStructure) -> Result<EnvStructure, EnvError> {
    let mut guard_interp = BTreeMap::new();
    for g in &m.source.guards {
        let img = m.guard(g)?;
        guard_interp.insert(g.clone(), bigger.guard_states(img)?.clone());
    }
    let mut action_interp = BTreeMap::new();
    for a in &m.source.actions {
        let img = m.action(a)?;
        let table = bigger
            .action_interp
            .get(img)
            .ok_or_else(|| EnvError::MissingInterp {
                kind: "action",
                name: img.clone(),
            })?;
        let pulled: Vec<(DataId, BTreeSet<String>)> = table
            .iter()
            .map(|(succ, emitted)| {
                let preimage: BTreeSet<String> = m
                    .source
                    .messages
                    .iter()
                    .filter(|msg| emitted.contains(&m.message_map[*msg]))
                    .cloned()
                    .collect();
                (*succ, preimage)
            })
            .collect();
        action_interp.insert(a.clone(), pulled);
    }
    Ok(EnvStructure {
        size: bigger.size,
        guard_interp,
        action_interp,
    })
}

/// Satisfaction: from every state satisfying `pre`, executing the action must
/// land in `post` and emit at least the sentence's messages.
pub fn satisfies(omega: &EnvStructure, s: &EnvSentence) -> Result<bool, EnvError> {
    let pre = omega.guard_states(&s.pre)?;
    let post = omega.guard_states(&s.post)?;
    for &state in pre {
        let (succ, emitted) = omega.apply(&s.action, state)?;
        if !post.contains(succ) || !s.emits.is_subset(emitted) {
            return Ok(false);
        }
    }
    Ok(true)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sig(guards: &[&str], actions: &[&str], messages: &[&str]) -> EnvSignature {
        EnvSignature::new(
            guards.iter().map(|s| s.to_string()),
            actions.iter().map(|s| s.to_string()),
            messages.iter().map(|s| s.to_string()),
        )
    }

    fn map(pairs: &[(&str, &str)]) -> BTreeMap<String, String> {
        pairs
            .iter()
            .map(|(a, b)| (a.to_string(), b.to_string()))
            .collect()
    }

    fn sentence(pre: &str, action: &str, emits: &[&str], post: &str) -> EnvSentence {
        EnvSentence {
            pre: pre.to_string(),
            action: action.to_string(),
            emits: emits.iter().map(|s| s.to_string()).collect(),
            post: post.to_string(),
        }
    }

    /// Two-state structure over {g}, {a}, {ping, pong}: `a` flips the state
    /// and emits `pong` from state 0, nothing from state 1; `g` holds in 0.
    fn flip_structure() -> EnvStructure {
        EnvStructure {
            size: 2,
            guard_interp: [("g".to_string(), BTreeSet::from([0]))].into(),
            action_interp: [(
                "a".to_string(),
                vec![
                    (1, BTreeSet::from(["pong".to_string()])),
                    (0, BTreeSet::new()),
                ],
            )]
            .into(),
        }
    }

    #[test]
    fn identity_translation_is_identity() {
        let h = sig(&["g", "h"], &["a"], &["m"]);
        let id = EnvMorphism::identity(&h);
        let s = sentence("g", "a", &["m"], "h");
        assert_eq!(translate_sentence(&id, &s).unwrap(), s);
    }

    #[test]
    fn translation_renames_componentwise() {
        let h = sig(&["g"], &["a"], &["msg"]);
        let h2 = sig(&["g'"], &["a'"], &["msg'"]);
        let m = EnvMorphism::new(
            h,
            h2,
            map(&[("g", "g'")]),
            map(&[("a", "a'")]),
            map(&[("msg", "msg'")]),
        )
        .unwrap();
        let s = sentence("g", "a", &["msg"], "g");
        assert_eq!(
            translate_sentence(&m, &s).unwrap(),
            sentence("g'", "a'", &["msg'"], "g'")
        );
    }

    #[test]
    fn translation_takes_message_image() {
        // Collapsing m1, m2 onto n: the emitted set becomes the image {n}.
        let h = sig(&["g", "h"], &["a"], &["m1", "m2"]);
        let h2 = sig(&["g", "h"], &["a"], &["n"]);
        let m = EnvMorphism::new(
            h,
            h2,
            map(&[("g", "g"), ("h", "h")]),
            map(&[("a", "a")]),
            map(&[("m1", "n"), ("m2", "n")]),
        )
        .unwrap();
        let s = sentence("g", "a", &["m1", "m2"], "h");
        assert_eq!(
            translate_sentence(&m, &s).unwrap(),
            sentence("g", "a", &["n"], "h")
        );
    }

    #[test]
    fn translation_rejects_foreign_names() {
        let h = sig(&["g"], &["a"], &[]);
        let id = EnvMorphism::identity(&h);
        let s = sentence("nope", "a", &[], "g");
        assert!(matches!(
            translate_sentence(&id, &s),
            Err(EnvError::UnknownName { kind: "guard", .. })
        ));
    }

    #[test]
    fn identity_reduct_is_structurally_equal() {
        let h = sig(&["g"], &["a"], &["ping", "pong"]);
        let omega = EnvStructure {
            size: 2,
            guard_interp: [("g".to_string(), BTreeSet::from([0]))].into(),
            action_interp: [(
                "a".to_string(),
                vec![
                    (1, BTreeSet::from(["pong".to_string()])),
                    (0, BTreeSet::new()),
                ],
            )]
            .into(),
        };
        omega.validate_over(&h).unwrap();
        let id = EnvMorphism::identity(&h);
        assert_eq!(reduct(&id, &omega).unwrap(), omega);
    }

    #[test]
    fn reduct_pulls_emissions_back_to_preimage() {
        // Source only knows {ping}; the target action emits {pong}, whose
        // preimage under the embedding is empty.
        let small = sig(&["g"], &["a"], &["ping"]);
        let big = sig(&["g"], &["a"], &["ping", "pong"]);
        let m = EnvMorphism::new(
            small,
            big,
            map(&[("g", "g")]),
            map(&[("a", "a")]),
            map(&[("ping", "ping")]),
        )
        .unwrap();
        let red = reduct(&m, &flip_structure()).unwrap();
        assert_eq!(red.size, 2);
        assert_eq!(red.action_interp["a"][0], (1, BTreeSet::new()));
    }

    #[test]
    fn reduct_substitutes_collapsed_guards() {
        let small = sig(&["g1", "g2"], &[], &[]);
        let big = sig(&["g"], &[], &[]);
        let m = EnvMorphism::new(
            small,
            big,
            map(&[("g1", "g"), ("g2", "g")]),
            map(&[]),
            map(&[]),
        )
        .unwrap();
        let omega = EnvStructure {
            size: 3,
            guard_interp: [("g".to_string(), BTreeSet::from([0, 2]))].into(),
            action_interp: BTreeMap::new(),
        };
        let red = reduct(&m, &omega).unwrap();
        assert_eq!(red.guard_interp["g1"], red.guard_interp["g2"]);
        assert_eq!(red.guard_interp["g1"], BTreeSet::from([0, 2]));
    }

    #[test]
    fn satisfaction_quantifies_over_pre_states() {
        let omega = flip_structure();
        // From state 0 (the only g-state), a lands in state 1 emitting pong.
        let mut with_h = omega.clone();
        with_h
            .guard_interp
            .insert("h".to_string(), BTreeSet::from([1]));
        assert!(satisfies(&with_h, &sentence("g", "a", &["pong"], "h")).unwrap());
        assert!(!satisfies(&with_h, &sentence("g", "a", &["pong"], "g")).unwrap());
        // Demanding a message that is not emitted fails.
        let mut exotic = with_h.clone();
        exotic
            .guard_interp
            .insert("t".to_string(), BTreeSet::from([0, 1]));
        assert!(!satisfies(&exotic, &sentence("g", "a", &["nope"], "h")).unwrap());
    }

    #[test]
    fn empty_pre_guard_satisfies_vacuously() {
        let mut omega = flip_structure();
        omega
            .guard_interp
            .insert("never".to_string(), BTreeSet::new());
        // Quantification over the empty pre-set is vacuous even with an
        // unsatisfiable emission demand.
        assert!(satisfies(&omega, &sentence("never", "a", &["nope"], "g")).unwrap());
        // Unknown guard names are still rejected.
        assert!(satisfies(&omega, &sentence("missing", "a", &[], "g")).is_err());
    }

    #[test]
    fn morphism_rejects_partial_and_ill_typed_maps() {
        let h = sig(&["g"], &[], &[]);
        let h2 = sig(&["x"], &[], &[]);
        assert!(matches!(
            EnvMorphism::new(h.clone(), h2.clone(), map(&[]), map(&[]), map(&[])),
            Err(EnvError::PartialMap { kind: "guard", .. })
        ));
        assert!(matches!(
            EnvMorphism::new(h, h2, map(&[("g", "y")]), map(&[]), map(&[])),
            Err(EnvError::BadImage { kind: "guard", .. })
        ));
    }

    #[test]
    fn composition_chains_maps() {
        let h = sig(&["g"], &["a"], &["m"]);
        let h2 = sig(&["g2"], &["a2"], &["m2"]);
        let h3 = sig(&["g3"], &["a3"], &["m3"]);
        let m1 = EnvMorphism::new(
            h.clone(),
            h2.clone(),
            map(&[("g", "g2")]),
            map(&[("a", "a2")]),
            map(&[("m", "m2")]),
        )
        .unwrap();
        let m2 = EnvMorphism::new(
            h2,
            h3,
            map(&[("g2", "g3")]),
            map(&[("a2", "a3")]),
            map(&[("m2", "m3")]),
        )
        .unwrap();
        let c = m1.compose(&m2).unwrap();
        assert_eq!(c.guard_map["g"], "g3");
        assert_eq!(c.source, h);
        assert!(m2.compose(&m1).is_err());
    }
}
