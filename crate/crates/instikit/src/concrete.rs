//! Finite concrete environments.
//!
//! Variable declarations with integer ranges generate the carrier of data
//! states, a small expression language gives guards, an imperative
//! micro-language (assignments that clamp to the declared range, message
//! sends) gives actions, and message/event declarations expand to ground
//! families. [`build_env_structure`] evaluates all of it into an
//! [`EnvSignature`](crate::env::EnvSignature) and
//! [`EnvStructure`](crate::env::EnvStructure) pair.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use thiserror::Error;

use crate::env::{DataId, EnvSignature, EnvStructure};

#[derive(Debug, Error, PartialEq, Eq)]
pub enum ConcreteError {
    #[error("unbound identifier '{0}'")]
    Unbound(String),
    #[error("unresolved reference '{0}' (references must be inlined before evaluation)")]
    UnresolvedRef(String),
    #[error("duplicate {kind} '{name}'")]
    Duplicate { kind: &'static str, name: String },
    #[error("empty range {lower}..{upper} for '{name}'")]
    BadRange { name: String, lower: i64, upper: i64 },
    #[error("carrier has {size} states, above the cap of {cap}")]
    TooLarge { size: usize, cap: usize },
    #[error("message '{name}' sent with {got} arguments, declared with {want}")]
    Arity { name: String, want: usize, got: usize },
    #[error("message '{0}' is not declared")]
    UnknownMessage(String),
}

/// Default cap on carrier sizes for [`build_env_structure`].
pub const DEFAULT_STATE_CAP: usize = 1_000_000;

/// An integer variable with an inclusive range.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct VarDecl {
    pub name: String,
    pub lower: i64,
    pub upper: i64,
}

/// A ground message declaration: `port.name(lo..hi, ...)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MessageDecl {
    pub port: String,
    pub name: String,
    pub param_ranges: Vec<(i64, i64)>,
}

/// An event declaration: `name(lo..hi, ...)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct EventDecl {
    pub name: String,
    pub param_ranges: Vec<(i64, i64)>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub enum CmpOp {
    Eq,
    Ne,
    Lt,
    Le,
    Gt,
    Ge,
}

impl CmpOp {
    fn apply(self, l: i64, r: i64) -> bool {
        match self {
            CmpOp::Eq => l == r,
            CmpOp::Ne => l != r,
            CmpOp::Lt => l < r,
            CmpOp::Le => l <= r,
            CmpOp::Gt => l > r,
            CmpOp::Ge => l >= r,
        }
    }

    pub fn symbol(self) -> &'static str {
        match self {
            CmpOp::Eq => "==",
            CmpOp::Ne => "!=",
            CmpOp::Lt => "<",
            CmpOp::Le => "<=",
            CmpOp::Gt => ">",
            CmpOp::Ge => ">=",
        }
    }
}

/// Integer terms over variables and event parameters.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum IntExpr {
    Lit(i64),
    Ref(String),
    Neg(Box<IntExpr>),
    Add(Box<IntExpr>, Box<IntExpr>),
    Sub(Box<IntExpr>, Box<IntExpr>),
    Mul(Box<IntExpr>, Box<IntExpr>),
}

/// Boolean guard expressions. `Ref` names a declared guard and must be
/// inlined by the resolver before evaluation.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum GuardExpr {
    Lit(bool),
    Ref(String),
    Cmp(CmpOp, IntExpr, IntExpr),
    Not(Box<GuardExpr>),
    And(Box<GuardExpr>, Box<GuardExpr>),
    Or(Box<GuardExpr>, Box<GuardExpr>),
}

/// One statement of an action program.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Stmt {
    /// `var := term`, clamped to the variable's declared range.
    Assign { var: String, value: IntExpr },
    /// `port.name(term, ...)` accumulates a ground message.
    Send {
        port: String,
        name: String,
        args: Vec<IntExpr>,
    },
    /// A named action to inline; resolved away before evaluation.
    Call(String),
}

/// A sequence of statements, executed left to right.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct ActionProgram {
    pub stmts: Vec<Stmt>,
}

impl ActionProgram {
    pub fn skip() -> Self {
        ActionProgram { stmts: Vec::new() }
    }
}

// Canonical printing. Parenthesization is minimal for the precedence table
// (or < and < not; + and - < *), with right operands of binary nodes kept
// parenthesized at equal precedence so that parse(print(e)) reproduces the
// tree shape exactly.

fn int_level(e: &IntExpr) -> u8 {
    match e {
        IntExpr::Add(..) | IntExpr::Sub(..) => 1,
        IntExpr::Mul(..) => 2,
        IntExpr::Neg(..) => 3,
        IntExpr::Lit(_) | IntExpr::Ref(_) => 4,
    }
}

fn fmt_int(e: &IntExpr, f: &mut fmt::Formatter<'_>, min: u8) -> fmt::Result {
    let lvl = int_level(e);
    if lvl < min {
        write!(f, "(")?;
    }
    match e {
        IntExpr::Lit(n) => write!(f, "{n}")?,
        IntExpr::Ref(n) => write!(f, "{n}")?,
        IntExpr::Neg(x) => {
            write!(f, "-")?;
            fmt_int(x, f, 3)?;
        }
        IntExpr::Add(l, r) => {
            fmt_int(l, f, 1)?;
            write!(f, " + ")?;
            fmt_int(r, f, 2)?;
        }
        IntExpr::Sub(l, r) => {
            fmt_int(l, f, 1)?;
            write!(f, " - ")?;
            fmt_int(r, f, 2)?;
        }
        IntExpr::Mul(l, r) => {
            fmt_int(l, f, 2)?;
            write!(f, " * ")?;
            fmt_int(r, f, 3)?;
        }
    }
    if lvl < min {
        write!(f, ")")?;
    }
    Ok(())
}

impl fmt::Display for IntExpr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt_int(self, f, 0)
    }
}

fn guard_level(e: &GuardExpr) -> u8 {
    match e {
        GuardExpr::Or(..) => 1,
        GuardExpr::And(..) => 2,
        GuardExpr::Not(..) => 3,
        GuardExpr::Cmp(..) | GuardExpr::Lit(_) | GuardExpr::Ref(_) => 4,
    }
}

fn fmt_guard(e: &GuardExpr, f: &mut fmt::Formatter<'_>, min: u8) -> fmt::Result {
    let lvl = guard_level(e);
    if lvl < min {
        write!(f, "(")?;
    }
    match e {
        GuardExpr::Lit(true) => write!(f, "true")?,
        GuardExpr::Lit(false) => write!(f, "false")?,
        GuardExpr::Ref(n) => write!(f, "{n}")?,
        GuardExpr::Cmp(op, l, r) => write!(f, "{l} {} {r}", op.symbol())?,
        GuardExpr::Not(x) => {
            write!(f, "not ")?;
            fmt_guard(x, f, 3)?;
        }
        GuardExpr::And(l, r) => {
            fmt_guard(l, f, 2)?;
            write!(f, " and ")?;
            fmt_guard(r, f, 3)?;
        }
        GuardExpr::Or(l, r) => {
            fmt_guard(l, f, 1)?;
            write!(f, " or ")?;
            fmt_guard(r, f, 2)?;
        }
    }
    if lvl < min {
        write!(f, ")")?;
    }
    Ok(())
}

impl fmt::Display for GuardExpr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt_guard(self, f, 0)
    }
}

impl fmt::Display for Stmt {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Stmt::Assign { var, value } => write!(f, "{var} := {value}"),
            Stmt::Send { port, name, args } => {
                let args: Vec<String> = args.iter().map(|a| a.to_string()).collect();
                write!(f, "{port}.{name}({})", args.join(", "))
            }
            Stmt::Call(name) => write!(f, "{name}"),
        }
    }
}

impl fmt::Display for ActionProgram {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.stmts.is_empty() {
            return write!(f, "skip");
        }
        let parts: Vec<String> = self.stmts.iter().map(|s| s.to_string()).collect();
        write!(f, "{}", parts.join("; "))
    }
}

/// A data state: one value per declared variable.
pub type Store = BTreeMap<String, i64>;

/// Renders a ground message name, e.g. `bank.verify(1,2)` or
/// `user.ejectCard()`.
pub fn ground_message(port: &str, name: &str, args: &[i64]) -> String {
    let args: Vec<String> = args.iter().map(|a| a.to_string()).collect();
    format!("{port}.{name}({})", args.join(","))
}

/// Renders a ground event name, e.g. `card(1)` or `reenterPIN`.
pub fn ground_event(name: &str, args: &[i64]) -> String {
    if args.is_empty() {
        name.to_string()
    } else {
        let args: Vec<String> = args.iter().map(|a| a.to_string()).collect();
        format!("{name}({})", args.join(","))
    }
}

/// All argument tuples of a range list, in lexicographic order.
pub fn expand_ranges(ranges: &[(i64, i64)]) -> Vec<Vec<i64>> {
    let mut tuples = vec![Vec::new()];
    for &(lo, hi) in ranges {
        let mut next = Vec::new();
        for prefix in &tuples {
            for v in lo..=hi {
                let mut t = prefix.clone();
                t.push(v);
                next.push(t);
            }
        }
        tuples = next;
    }
    tuples
}

/// Cartesian expansion of an event declaration into ground event names.
pub fn ground_events(decl: &EventDecl) -> Vec<String> {
    expand_ranges(&decl.param_ranges)
        .iter()
        .map(|args| ground_event(&decl.name, args))
        .collect()
}

/// Cartesian expansion of a message declaration into ground message names.
pub fn ground_messages(decl: &MessageDecl) -> Vec<String> {
    expand_ranges(&decl.param_ranges)
        .iter()
        .map(|args| ground_message(&decl.port, &decl.name, args))
        .collect()
}

fn lookup(name: &str, store: &Store, params: &BTreeMap<String, i64>) -> Result<i64, ConcreteError> {
    params
        .get(name)
        .or_else(|| store.get(name))
        .copied()
        .ok_or_else(|| ConcreteError::Unbound(name.to_string()))
}

/// Evaluates an integer term against a store and a parameter valuation.
pub fn eval_int(
    e: &IntExpr,
    store: &Store,
    params: &BTreeMap<String, i64>,
) -> Result<i64, ConcreteError> {
    Ok(match e {
        IntExpr::Lit(n) => *n,
        IntExpr::Ref(name) => lookup(name, store, params)?,
        IntExpr::Neg(x) => eval_int(x, store, params)?.wrapping_neg(),
        IntExpr::Add(l, r) => eval_int(l, store, params)?.wrapping_add(eval_int(r, store, params)?),
        IntExpr::Sub(l, r) => eval_int(l, store, params)?.wrapping_sub(eval_int(r, store, params)?),
        IntExpr::Mul(l, r) => eval_int(l, store, params)?.wrapping_mul(eval_int(r, store, params)?),
    })
}

/// Evaluates a guard expression. Remaining named references are a resolution
/// bug and reported as errors.
pub fn eval_guard(
    g: &GuardExpr,
    store: &Store,
    params: &BTreeMap<String, i64>,
) -> Result<bool, ConcreteError> {
    Ok(match g {
        GuardExpr::Lit(b) => *b,
        GuardExpr::Ref(name) => return Err(ConcreteError::UnresolvedRef(name.clone())),
        GuardExpr::Cmp(op, l, r) => {
            op.apply(eval_int(l, store, params)?, eval_int(r, store, params)?)
        }
        GuardExpr::Not(x) => !eval_guard(x, store, params)?,
        GuardExpr::And(l, r) => eval_guard(l, store, params)? && eval_guard(r, store, params)?,
        GuardExpr::Or(l, r) => eval_guard(l, store, params)? || eval_guard(r, store, params)?,
    })
}

/// The enumerated space of stores over an ordered variable list.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct StoreSpace {
    pub vars: Vec<VarDecl>,
}

impl StoreSpace {
    pub fn new(vars: Vec<VarDecl>) -> Result<Self, ConcreteError> {
        let mut seen = BTreeSet::new();
        for v in &vars {
            if v.lower > v.upper {
                return Err(ConcreteError::BadRange {
                    name: v.name.clone(),
                    lower: v.lower,
                    upper: v.upper,
                });
            }
            if !seen.insert(v.name.clone()) {
                return Err(ConcreteError::Duplicate {
                    kind: "variable",
                    name: v.name.clone(),
                });
            }
        }
        Ok(StoreSpace { vars })
    }

    fn width(v: &VarDecl) -> usize {
        (v.upper - v.lower) as usize + 1
    }

    /// Number of stores; saturates at `usize::MAX` past overflow.
    pub fn len(&self) -> usize {
        self.vars
            .iter()
            .fold(1usize, |acc, v| acc.saturating_mul(Self::width(v)))
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    /// The store with the given carrier index (mixed radix, first variable
    /// least significant).
    pub fn store_of(&self, mut id: DataId) -> Store {
        let mut store = Store::new();
        for v in &self.vars {
            let w = Self::width(v);
            store.insert(v.name.clone(), v.lower + (id % w) as i64);
            id /= w;
        }
        store
    }

    /// The carrier index of a store; `None` if a value is missing or out of
    /// range.
    pub fn id_of(&self, store: &Store) -> Option<DataId> {
        let mut id = 0usize;
        let mut stride = 1usize;
        for v in &self.vars {
            let value = *store.get(&v.name)?;
            if value < v.lower || value > v.upper {
                return None;
            }
            id += (value - v.lower) as usize * stride;
            stride *= Self::width(v);
        }
        Some(id)
    }

    pub fn clamp(&self, var: &str, value: i64) -> Result<i64, ConcreteError> {
        let decl = self
            .vars
            .iter()
            .find(|v| v.name == var)
            .ok_or_else(|| ConcreteError::Unbound(var.to_string()))?;
        Ok(value.clamp(decl.lower, decl.upper))
    }
}

/// Executes an action program. Assignments clamp to the declared range (the
/// arithmetic overflow policy that keeps the interpretation total); sends
/// accumulate ground messages in program order, arguments evaluated at send
/// time.
pub fn exec_action(
    a: &ActionProgram,
    store: &Store,
    params: &BTreeMap<String, i64>,
    space: &StoreSpace,
) -> Result<(Store, Vec<String>), ConcreteError> {
    let mut store = store.clone();
    let mut sent = Vec::new();
    for stmt in &a.stmts {
        match stmt {
            Stmt::Assign { var, value } => {
                let v = eval_int(value, &store, params)?;
                let clamped = space.clamp(var, v)?;
                store.insert(var.clone(), clamped);
            }
            Stmt::Send { port, name, args } => {
                let args = args
                    .iter()
                    .map(|e| eval_int(e, &store, params))
                    .collect::<Result<Vec<_>, _>>()?;
                sent.push(ground_message(port, name, &args));
            }
            Stmt::Call(name) => return Err(ConcreteError::UnresolvedRef(name.clone())),
        }
    }
    Ok((store, sent))
}

/// A built environment: the institution-level signature/structure pair plus
/// the concrete definitions needed to extend it and to recover ordered
/// emissions.
#[derive(Clone, Debug)]
pub struct ConcreteEnv {
    pub space: StoreSpace,
    pub signature: EnvSignature,
    pub structure: EnvStructure,
    /// Per action, per carrier index: emissions in program order.
    pub emit_order: BTreeMap<String, Vec<Vec<String>>>,
    pub guard_defs: BTreeMap<String, GuardExpr>,
    pub action_defs: BTreeMap<String, ActionProgram>,
    pub message_decls: Vec<MessageDecl>,
}

impl ConcreteEnv {
    /// States of the carrier satisfying an ad-hoc guard expression.
    pub fn states_where(&self, g: &GuardExpr) -> Result<BTreeSet<DataId>, ConcreteError> {
        let params = BTreeMap::new();
        let mut out = BTreeSet::new();
        for id in 0..self.space.len() {
            if eval_guard(g, &self.space.store_of(id), &params)? {
                out.insert(id);
            }
        }
        Ok(out)
    }

    /// Adds a named guard if absent, interpreting it over the carrier.
    pub fn add_guard(&mut self, name: &str, expr: GuardExpr) -> Result<(), ConcreteError> {
        if self.signature.guards.contains(name) {
            return Ok(());
        }
        let states = self.states_where(&expr)?;
        self.signature.guards.insert(name.to_string());
        self.structure.guard_interp.insert(name.to_string(), states);
        self.guard_defs.insert(name.to_string(), expr);
        Ok(())
    }

    /// Adds a named action if absent, interpreting it over the carrier.
    pub fn add_action(&mut self, name: &str, prog: ActionProgram) -> Result<(), ConcreteError> {
        if self.signature.actions.contains(name) {
            return Ok(());
        }
        let params = BTreeMap::new();
        let mut table = Vec::with_capacity(self.space.len());
        let mut order = Vec::with_capacity(self.space.len());
        for id in 0..self.space.len() {
            let (next, sent) = exec_action(&prog, &self.space.store_of(id), &params, &self.space)?;
            for m in &sent {
                if !self.signature.messages.contains(m) {
                    return Err(ConcreteError::UnknownMessage(m.clone()));
                }
            }
            let next_id = self
                .space
                .id_of(&next)
                .expect("clamped store stays in range");
            table.push((next_id, sent.iter().cloned().collect::<BTreeSet<_>>()));
            order.push(sent);
        }
        self.signature.actions.insert(name.to_string());
        self.structure.action_interp.insert(name.to_string(), table);
        self.emit_order.insert(name.to_string(), order);
        self.action_defs.insert(name.to_string(), prog);
        Ok(())
    }

    /// Ordered emissions of `action` at carrier state `id`.
    pub fn emissions(&self, action: &str, id: DataId) -> &[String] {
        self.emit_order
            .get(action)
            .and_then(|per_state| per_state.get(id))
            .map(|v| v.as_slice())
            .unwrap_or(&[])
    }
}

/// Builds the signature and structure induced by concrete declarations: the
/// carrier is every total assignment respecting the ranges, the message set
/// is every ground expansion, and the interpretations come from
/// [`eval_guard`] / [`exec_action`].
pub fn build_env_structure(
    vars: Vec<VarDecl>,
    guards: Vec<(String, GuardExpr)>,
    actions: Vec<(String, ActionProgram)>,
    messages: Vec<MessageDecl>,
    cap: usize,
) -> Result<ConcreteEnv, ConcreteError> {
    let space = StoreSpace::new(vars)?;
    let size = space.len();
    if size > cap {
        return Err(ConcreteError::TooLarge { size, cap });
    }

    let mut message_set = BTreeSet::new();
    let mut seen_decl = BTreeSet::new();
    for decl in &messages {
        let key = format!("{}.{}", decl.port, decl.name);
        if !seen_decl.insert(key.clone()) {
            return Err(ConcreteError::Duplicate {
                kind: "message",
                name: key,
            });
        }
        for (lo, hi) in &decl.param_ranges {
            if lo > hi {
                return Err(ConcreteError::BadRange {
                    name: key.clone(),
                    lower: *lo,
                    upper: *hi,
                });
            }
        }
        message_set.extend(ground_messages(decl));
    }

    let mut env = ConcreteEnv {
        space,
        signature: EnvSignature {
            guards: BTreeSet::new(),
            actions: BTreeSet::new(),
            messages: message_set,
        },
        structure: EnvStructure {
            size,
            guard_interp: BTreeMap::new(),
            action_interp: BTreeMap::new(),
        },
        emit_order: BTreeMap::new(),
        guard_defs: BTreeMap::new(),
        action_defs: BTreeMap::new(),
        message_decls: messages,
    };

    for (name, expr) in guards {
        if env.signature.guards.contains(&name) {
            return Err(ConcreteError::Duplicate {
                kind: "guard",
                name,
            });
        }
        env.add_guard(&name, expr)?;
    }
    for (name, prog) in actions {
        if env.signature.actions.contains(&name) {
            return Err(ConcreteError::Duplicate {
                kind: "action",
                name,
            });
        }
        env.add_action(&name, prog)?;
    }
    Ok(env)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn store(pairs: &[(&str, i64)]) -> Store {
        pairs.iter().map(|(k, v)| (k.to_string(), *v)).collect()
    }

    fn var(name: &str, lower: i64, upper: i64) -> VarDecl {
        VarDecl {
            name: name.to_string(),
            lower,
            upper,
        }
    }

    fn r(name: &str) -> IntExpr {
        IntExpr::Ref(name.to_string())
    }

    fn lit(n: i64) -> IntExpr {
        IntExpr::Lit(n)
    }

    #[test]
    fn guard_evaluation() {
        let no_params = BTreeMap::new();
        let g = GuardExpr::Cmp(CmpOp::Lt, r("trialsNum"), lit(2));
        assert!(eval_guard(&g, &store(&[("trialsNum", 1)]), &no_params).unwrap());
        assert!(eval_guard(&GuardExpr::Lit(true), &store(&[]), &no_params).unwrap());
        let conj = GuardExpr::And(
            Box::new(GuardExpr::Cmp(CmpOp::Eq, r("trialsNum"), lit(0))),
            Box::new(GuardExpr::Cmp(CmpOp::Ne, r("pin"), lit(0))),
        );
        assert!(eval_guard(&conj, &store(&[("trialsNum", 0), ("pin", 7)]), &no_params).unwrap());
        assert!(matches!(
            eval_guard(&GuardExpr::Ref("g".into()), &store(&[]), &no_params),
            Err(ConcreteError::UnresolvedRef(_))
        ));
        assert!(matches!(
            eval_guard(&g, &store(&[]), &no_params),
            Err(ConcreteError::Unbound(_))
        ));
    }

    #[test]
    fn increment_and_clamp() {
        let space = StoreSpace::new(vec![var("trialsNum", 0, 3)]).unwrap();
        let inc = ActionProgram {
            stmts: vec![Stmt::Assign {
                var: "trialsNum".into(),
                value: IntExpr::Add(Box::new(r("trialsNum")), Box::new(lit(1))),
            }],
        };
        let no_params = BTreeMap::new();
        let (next, sent) = exec_action(&inc, &store(&[("trialsNum", 1)]), &no_params, &space).unwrap();
        assert_eq!(next, store(&[("trialsNum", 2)]));
        assert!(sent.is_empty());
        // At the upper bound, the assignment clamps and the store is unchanged.
        let (next, sent) = exec_action(&inc, &store(&[("trialsNum", 3)]), &no_params, &space).unwrap();
        assert_eq!(next, store(&[("trialsNum", 3)]));
        assert!(sent.is_empty());
    }

    #[test]
    fn send_evaluates_arguments_at_send_time() {
        let space =
            StoreSpace::new(vec![var("cardId", 0, 9), var("pin", 0, 9)]).unwrap();
        let prog = ActionProgram {
            stmts: vec![Stmt::Send {
                port: "bank".into(),
                name: "verify".into(),
                args: vec![r("cardId"), r("pin")],
            }],
        };
        let no_params = BTreeMap::new();
        let before = store(&[("cardId", 5), ("pin", 9)]);
        let (next, sent) = exec_action(&prog, &before, &no_params, &space).unwrap();
        assert_eq!(next, before);
        assert_eq!(sent, vec!["bank.verify(5,9)".to_string()]);
    }

    #[test]
    fn carrier_enumeration_and_indexing() {
        let space = StoreSpace::new(vec![
            var("trialsNum", 0, 3),
            var("cardId", 0, 3),
            var("pin", 0, 3),
        ])
        .unwrap();
        assert_eq!(space.len(), 64);
        for id in 0..space.len() {
            assert_eq!(space.id_of(&space.store_of(id)), Some(id));
        }
    }

    #[test]
    fn build_tiny_structure() {
        let env = build_env_structure(
            vec![var("b", 0, 1)],
            vec![(
                "b == 1".to_string(),
                GuardExpr::Cmp(CmpOp::Eq, r("b"), lit(1)),
            )],
            vec![],
            vec![],
            DEFAULT_STATE_CAP,
        )
        .unwrap();
        assert_eq!(env.structure.size, 2);
        assert_eq!(env.structure.guard_interp["b == 1"].len(), 1);
    }

    #[test]
    fn carrier_cap_is_enforced() {
        let err = build_env_structure(vec![var("x", 0, 99)], vec![], vec![], vec![], 10);
        assert!(matches!(err, Err(ConcreteError::TooLarge { size: 100, cap: 10 })));
    }

    #[test]
    fn ground_expansions() {
        let card = EventDecl {
            name: "card".into(),
            param_ranges: vec![(0, 3)],
        };
        assert_eq!(ground_events(&card), vec!["card(0)", "card(1)", "card(2)", "card(3)"]);
        let reenter = EventDecl {
            name: "reenterPIN".into(),
            param_ranges: vec![],
        };
        assert_eq!(ground_events(&reenter), vec!["reenterPIN"]);
        let pin = EventDecl {
            name: "PIN".into(),
            param_ranges: vec![(0, 1)],
        };
        assert_eq!(ground_events(&pin), vec!["PIN(0)", "PIN(1)"]);
        let verify = MessageDecl {
            port: "bank".into(),
            name: "verify".into(),
            param_ranges: vec![(0, 1), (0, 1)],
        };
        assert_eq!(ground_messages(&verify).len(), 4);
        let eject = MessageDecl {
            port: "user".into(),
            name: "ejectCard".into(),
            param_ranges: vec![],
        };
        assert_eq!(ground_messages(&eject), vec!["user.ejectCard()"]);
    }

    #[test]
    fn printing_is_minimal_and_structural() {
        let e = IntExpr::Mul(
            Box::new(IntExpr::Add(Box::new(r("a")), Box::new(lit(1)))),
            Box::new(r("b")),
        );
        assert_eq!(e.to_string(), "(a + 1) * b");
        let nested = IntExpr::Add(
            Box::new(r("a")),
            Box::new(IntExpr::Add(Box::new(r("b")), Box::new(r("c")))),
        );
        assert_eq!(nested.to_string(), "a + (b + c)");
        let g = GuardExpr::Not(Box::new(GuardExpr::Or(
            Box::new(GuardExpr::Lit(true)),
            Box::new(GuardExpr::Ref("go".into())),
        )));
        assert_eq!(g.to_string(), "not (true or go)");
        let prog = ActionProgram {
            stmts: vec![
                Stmt::Send {
                    port: "user".into(),
                    name: "ejectCard".into(),
                    args: vec![],
                },
                Stmt::Assign {
                    var: "trialsNum".into(),
                    value: lit(0),
                },
            ],
        };
        assert_eq!(prog.to_string(), "user.ejectCard(); trialsNum := 0");
        assert_eq!(ActionProgram::skip().to_string(), "skip");
    }
}
