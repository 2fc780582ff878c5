//! Name resolution and ground expansion.
//!
//! Turns a parsed model into typed objects of the institution modules:
//! environments are built and evaluated, parameterized events andd messages
//! expand to ground families, machine and protocol transitions expand per
//! parameter valuation with their inline guards and actions entered into the
//! environment signature under their canonical printed text, and systems are
//! wired (leniently: typing and connector problems are recorded for the
//! static checks rather than failing resolution).

use std::collections::{BTreeMap, BTreeSet};

use crate::concrete::{
    ground_event, ground_message, ActionProgram, CmpOp, ConcreteEnv, EventDecl, GuardExpr,
    IntExpr, MessageDecl, Stmt, VarDecl, DEFAULT_STATE_CAP,
};
use crate::psm::{PsmRule, PsmSentence, ERROR_STATE};
use crate::sm::{PoolItem, SmSentence, SmSignature, TransitionRule};
use crate::system::{
    Connector, Instance, InstanceKind, IssueKind, MachineModel, Monitor, ProtocolModel, Stimulus,
    SystemModel, WiringIssue,
};

use super::ast::{self, Diagnostic, Expr, ExprKind, Mode, ModelFile, RawStmt, RawStmtKind, Span};
use super::print;

/// A fully resolved model.
#[derive(Clone, Debug, Default)]
pub struct ResolvedModel {
    pub envs: BTreeMap<String, ConcreteEnv>,
    pub machines: BTreeMap<String, MachineModel>,
    pub protocols: BTreeMap<String, ProtocolModel>,
    /// Systems with their declared checks, in declaration order.
    pub systems: Vec<ResolvedSystem>,
}

#[derive(Clone, Debug)]
pub struct ResolvedSystem {
    pub model: SystemModel,
    /// Wiring problems outside any single connector (unknown instances in
    /// connects/externals).
    pub issues: Vec<WiringIssue>,
    pub checks: Vec<ResolvedCheck>,
}

/// A message pattern of an interaction check.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MsgPattern {
    pub instance: usize,
    pub port: String,
    pub name: String,
    pub args: Option<Vec<i64>>,
}

impl MsgPattern {
    /// Whether a send `(sender, ground message)` matches this pattern.
    pub fn matches(&self, sender: usize, msg: &str) -> bool {
        if sender != self.instance {
            return false;
        }
        match &self.args {
            Some(args) => msg == ground_message(&self.port, &self.name, args),
            None => msg.starts_with(&format!("{}.{}(", self.port, self.name)),
        }
    }
}

/// A declared check, resolved and ready to run.
#[derive(Clone, Debug)]
pub enum ResolvedCheck {
    Invariant {
        id: String,
        label: String,
        /// Over internal references `"{instance index}:{var}"`.
        expr: GuardExpr,
        stimuli: Option<Vec<Stimulus>>,
    },
    PrePost {
        id: String,
        label: String,
        instance: usize,
        event: String,
        params: Vec<String>,
        pre: GuardExpr,
        post: GuardExpr,
        stimuli: Option<Vec<Stimulus>>,
    },
    Connector {
        id: String,
        label: String,
        connector: usize,
        stimuli: Option<Vec<Stimulus>>,
    },
    Interaction {
        id: String,
        label: String,
        mode: Mode,
        sequence: Vec<MsgPattern>,
        stimuli: Option<Vec<Stimulus>>,
    },
    Chain {
        id: String,
        label: String,
        mode: Mode,
        env: ConcreteEnv,
        sentences: Vec<crate::env::EnvSentence>,
    },
}

impl ResolvedCheck {
    pub fn id(&self) -> &str {
        match self {
            ResolvedCheck::Invariant { id, .. }
            | ResolvedCheck::PrePost { id, .. }
            | ResolvedCheck::Connector { id, .. }
            | ResolvedCheck::Interaction { id, .. }
            | ResolvedCheck::Chain { id, .. } => id,
        }
    }
}

/// Options for [`resolve`].
#[derive(Clone, Copy, Debug)]
pub struct ResolveOptions {
    /// Cap on carrier sizes.
    pub state_cap: usize,
}

impl Default for ResolveOptions {
    fn default() -> Self {
        ResolveOptions {
            state_cap: DEFAULT_STATE_CAP,
        }
    }
}

/// Resolves a parsed model, returning the typed objects or every diagnostic.
pub fn resolve(model: &ModelFile) -> Result<ResolvedModel, Vec<Diagnostic>> {
    resolve_with(model, ResolveOptions::default())
}

pub fn resolve_with(
    model: &ModelFile,
    options: ResolveOptions,
) -> Result<ResolvedModel, Vec<Diagnostic>> {
    let mut r = Resolver {
        options,
        diags: Vec::new(),
        out: ResolvedModel::default(),
    };
    // Kind by kind, so blocks may reference blocks declared later in the
    // file.
    for item in &model.items {
        if let ast::Item::Env(b) = item {
            r.env_block(b);
        }
    }
    for item in &model.items {
        if let ast::Item::Machine(b) = item {
            r.machine_block(b);
        }
    }
    for item in &model.items {
        if let ast::Item::Protocol(b) = item {
            r.protocol_block(b);
        }
    }
    for item in &model.items {
        if let ast::Item::System(b) = item {
            r.system_block(b);
        }
    }
    if r.diags.is_empty() {
        Ok(r.out)
    } else {
        Err(r.diags)
    }
}

enum Looked {
    Int(String),
    Guard(String),
    Ambiguous(Vec<String>),
    Missing,
}

type Lookup<'a> = dyn Fn(&str) -> Looked + 'a;

struct Resolver {
    options: ResolveOptions,
    diags: Vec<Diagnostic>,
    out: ResolvedModel,
}

impl Resolver {
    fn error(&mut self, message: impl Into<String>, span: Span) {
        self.diags.push(Diagnostic::error(message, span));
    }

    // ---- expressions ----

    fn int_expr(&mut self, e: &Expr, look: &Lookup) -> Result<IntExpr, ()> {
        match &e.kind {
            ExprKind::Int(n) => Ok(IntExpr::Lit(*n)),
            ExprKind::Bool(_) => {
                self.error("expected an integer expression, found a boolean", e.span);
                Err(())
            }
            ExprKind::Ref(name) => match look(name) {
                Looked::Int(internal) => Ok(IntExpr::Ref(internal)),
                Looked::Guard(_) => {
                    self.error(
                        format!("guard '{name}' used where an integer is expected"),
                        e.span,
                    );
                    Err(())
                }
                Looked::Ambiguous(hits) => {
                    self.error(
                        format!("'{name}' is ambiguous (candidates: {})", hits.join(", ")),
                        e.span,
                    );
                    Err(())
                }
                Looked::Missing => {
                    self.error(format!("unbound name '{name}'"), e.span);
                    Err(())
                }
            },
            ExprKind::Unary(ast::UnOp::Neg, x) => {
                Ok(IntExpr::Neg(Box::new(self.int_expr(x, look)?)))
            }
            ExprKind::Unary(ast::UnOp::Not, _) => {
                self.error("'not' is not an integer operator", e.span);
                Err(())
            }
            ExprKind::Binary(op, l, r) => {
                let ctor = match op {
                    ast::BinOp::Add => IntExpr::Add,
                    ast::BinOp::Sub => IntExpr::Sub,
                    ast::BinOp::Mul => IntExpr::Mul,
                    _ => {
                        self.error("boolean operator in an integer expression", e.span);
                        return Err(());
                    }
                };
                let l = self.int_expr(l, look)?;
                let r = self.int_expr(r, look)?;
                Ok(ctor(Box::new(l), Box::new(r)))
            }
        }
    }

    fn guard_expr(&mut self, e: &Expr, look: &Lookup) -> Result<GuardExpr, ()> {
        match &e.kind {
            ExprKind::Bool(b) => Ok(GuardExpr::Lit(*b)),
            ExprKind::Int(_) => {
                self.error("expected a boolean expression, found an integer", e.span);
                Err(())
            }
            ExprKind::Ref(name) => match look(name) {
                Looked::Guard(g) => Ok(GuardExpr::Ref(g)),
                Looked::Int(_) => {
                    self.error(
                        format!("'{name}' is an integer, not a guard"),
                        e.span,
                    );
                    Err(())
                }
                Looked::Ambiguous(hits) => {
                    self.error(
                        format!("'{name}' is ambiguous (candidates: {})", hits.join(", ")),
                        e.span,
                    );
                    Err(())
                }
                Looked::Missing => {
                    self.error(format!("unbound name '{name}'"), e.span);
                    Err(())
                }
            },
            ExprKind::Unary(ast::UnOp::Not, x) => {
                Ok(GuardExpr::Not(Box::new(self.guard_expr(x, look)?)))
            }
            ExprKind::Unary(ast::UnOp::Neg, _) => {
                self.error("'-' is not a boolean operator", e.span);
                Err(())
            }
            ExprKind::Binary(op, l, r) => match op {
                ast::BinOp::And | ast::BinOp::Or => {
                    let lg = self.guard_expr(l, look)?;
                    let rg = self.guard_expr(r, look)?;
                    Ok(if *op == ast::BinOp::And {
                        GuardExpr::And(Box::new(lg), Box::new(rg))
                    } else {
                        GuardExpr::Or(Box::new(lg), Box::new(rg))
                    })
                }
                ast::BinOp::Eq
                | ast::BinOp::Ne
                | ast::BinOp::Lt
                | ast::BinOp::Le
                | ast::BinOp::Gt
                | ast::BinOp::Ge => {
                    let cmp = match op {
                        ast::BinOp::Eq => CmpOp::Eq,
                        ast::BinOp::Ne => CmpOp::Ne,
                        ast::BinOp::Lt => CmpOp::Lt,
                        ast::BinOp::Le => CmpOp::Le,
                        ast::BinOp::Gt => CmpOp::Gt,
                        _ => CmpOp::Ge,
                    };
                    let li = self.int_expr(l, look)?;
                    let ri = self.int_expr(r, look)?;
                    Ok(GuardExpr::Cmp(cmp, li, ri))
                }
                _ => {
                    self.error("integer operator in a boolean expression", e.span);
                    Err(())
                }
            },
        }
    }

    fn stmts(&mut self, body: &[RawStmt], env: &ConcreteEnv, params: &BTreeSet<String>) -> Result<ActionProgram, ()> {
        let vars: BTreeSet<String> = env.space.vars.iter().map(|v| v.name.clone()).collect();
        let look = |name: &str| -> Looked {
            if params.contains(name) || vars.contains(name) {
                Looked::Int(name.to_string())
            } else {
                Looked::Missing
            }
        };
        let mut stmts = Vec::new();
        for s in body {
            match &s.kind {
                RawStmtKind::Skip => {}
                RawStmtKind::Assign { var, value } => {
                    if !vars.contains(var) {
                        self.error(format!("assignment to undeclared variable '{var}'"), s.span);
                        return Err(());
                    }
                    let value = self.int_expr(value, &look)?;
                    stmts.push(Stmt::Assign {
                        var: var.clone(),
                        value,
                    });
                }
                RawStmtKind::Send { port, name, args } => {
                    let decl = env
                        .message_decls
                        .iter()
                        .find(|d| d.port == *port && d.name == *name);
                    let Some(decl) = decl else {
                        self.error(
                            format!("message '{port}.{name}' is not declared"),
                            s.span,
                        );
                        return Err(());
                    };
                    if decl.param_ranges.len() != args.len() {
                        self.error(
                            format!(
                                "message '{port}.{name}' takes {} arguments, {} given",
                                decl.param_ranges.len(),
                                args.len()
                            ),
                            s.span,
                        );
                        return Err(());
                    }
                    let args = args
                        .iter()
                        .map(|a| self.int_expr(a, &look))
                        .collect::<Result<Vec<_>, _>>()?;
                    stmts.push(Stmt::Send {
                        port: port.clone(),
                        name: name.clone(),
                        args,
                    });
                }
                RawStmtKind::Call(name) => {
                    if env.action_defs.contains_key(name) {
                        stmts.push(Stmt::Call(name.clone()));
                    } else {
                        self.error(format!("action '{name}' is not declared"), s.span);
                        return Err(());
                    }
                }
            }
        }
        Ok(ActionProgram { stmts })
    }

    // ---- env blocks ----

    fn env_block(&mut self, b: &ast::EnvBlock) {
        if self.out.envs.contains_key(&b.name) {
            self.error(format!("duplicate environment '{}'", b.name), b.span);
            return;
        }
        let mut vars: Vec<VarDecl> = Vec::new();
        let mut messages: Vec<MessageDecl> = Vec::new();
        for item in &b.items {
            match item {
                ast::EnvItem::Var { name, range, span } => {
                    if range.lo > range.hi {
                        self.error(
                            format!("empty range {}..{} for '{name}'", range.lo, range.hi),
                            *span,
                        );
                    }
                    if vars.iter().any(|v| v.name == *name) {
                        self.error(format!("duplicate variable '{name}'"), *span);
                    } else {
                        vars.push(VarDecl {
                            name: name.clone(),
                            lower: range.lo,
                            upper: range.hi,
                        });
                    }
                }
                ast::EnvItem::Msg {
                    port,
                    name,
                    ranges,
                    span,
                } => {
                    if messages.iter().any(|m| m.port == *port && m.name == *name) {
                        self.error(format!("duplicate message '{port}.{name}'"), *span);
                    } else {
                        for r in ranges {
                            if r.lo > r.hi {
                                self.error(
                                    format!("empty range {}..{} in '{port}.{name}'", r.lo, r.hi),
                                    r.span,
                                );
                            }
                        }
                        messages.push(MessageDecl {
                            port: port.clone(),
                            name: name.clone(),
                            param_ranges: ranges.iter().map(|r| (r.lo, r.hi)).collect(),
                        });
                    }
                }
                _ => {}
            }
        }

        // Build the carrier first; guards and actions are evaluated into it.
        let base = crate::concrete::build_env_structure(
            vars,
            vec![("true".to_string(), GuardExpr::Lit(true))],
            vec![("skip".to_string(), ActionProgram::skip())],
            messages,
            self.options.state_cap,
        );
        let mut env = match base {
            Ok(env) => env,
            Err(e) => {
                self.error(e.to_string(), b.span);
                return;
            }
        };

        let no_params = BTreeSet::new();
        for item in &b.items {
            match item {
                ast::EnvItem::Guard { name, expr, span } => {
                    let vars: BTreeSet<String> =
                        env.space.vars.iter().map(|v| v.name.clone()).collect();
                    let guard_names: BTreeSet<String> =
                        env.guard_defs.keys().cloned().collect();
                    let look = |n: &str| -> Looked {
                        if vars.contains(n) {
                            Looked::Int(n.to_string())
                        } else if guard_names.contains(n) {
                            Looked::Guard(n.to_string())
                        } else {
                            Looked::Missing
                        }
                    };
                    let Ok(typed) = self.guard_expr(expr, &look) else {
                        continue;
                    };
                    let display_name = match name {
                        Some(n) => n.clone(),
                        None => typed.to_string(),
                    };
                    if let Some(n) = name {
                        if env.signature.guards.contains(n) {
                            self.error(format!("duplicate guard '{n}'"), *span);
                            continue;
                        }
                    }
                    let inlined = inline_guard(&typed, &env.guard_defs);
                    if let Err(e) = env.add_guard(&display_name, inlined) {
                        self.error(e.to_string(), *span);
                    }
                }
                ast::EnvItem::Action { name, body, span } => {
                    let Ok(typed) = self.stmts(body, &env, &no_params) else {
                        continue;
                    };
                    let display_name = match name {
                        Some(n) => n.clone(),
                        None => typed.to_string(),
                    };
                    if let Some(n) = name {
                        if env.signature.actions.contains(n) {
                            self.error(format!("duplicate action '{n}'"), *span);
                            continue;
                        }
                    }
                    let inlined = inline_program(&typed, &env.action_defs);
                    if let Err(e) = env.add_action(&display_name, inlined) {
                        self.error(e.to_string(), *span);
                    }
                }
                _ => {}
            }
        }
        self.out.envs.insert(b.name.clone(), env);
    }

    // ---- machines ----

    fn events_and_states(
        &mut self,
        name: &str,
        span: Span,
        events: &mut Vec<EventDecl>,
        ranges: &[ast::Range],
    ) {
        if events.iter().any(|e| e.name == name) {
            self.error(format!("duplicate event '{name}'"), span);
            return;
        }
        for r in ranges {
            if r.lo > r.hi {
                self.error(format!("empty range {}..{} in '{name}'", r.lo, r.hi), r.span);
                return;
            }
        }
        events.push(EventDecl {
            name: name.to_string(),
            param_ranges: ranges.iter().map(|r| (r.lo, r.hi)).collect(),
        });
    }

    /// Resolves a transition guard against variables, trigger parameters,
    /// and named guards; returns the typed (ref-carrying) form.
    fn trans_guard(
        &mut self,
        expr: Option<&Expr>,
        env: &ConcreteEnv,
        params: &BTreeSet<String>,
    ) -> Result<GuardExpr, ()> {
        let Some(expr) = expr else {
            return Ok(GuardExpr::Lit(true));
        };
        let vars: BTreeSet<String> = env.space.vars.iter().map(|v| v.name.clone()).collect();
        let guard_names: BTreeSet<String> = env.guard_defs.keys().cloned().collect();
        let look = |n: &str| -> Looked {
            if params.contains(n) || vars.contains(n) {
                Looked::Int(n.to_string())
            } else if guard_names.contains(n) {
                Looked::Guard(n.to_string())
            } else {
                Looked::Missing
            }
        };
        self.guard_expr(expr, &look)
    }

    fn machine_block(&mut self, b: &ast::MachineBlock) {
        if self.out.machines.contains_key(&b.name) {
            self.error(format!("duplicate machine '{}'", b.name), b.span);
            return;
        }
        let Some(env) = self.out.envs.get(&b.env) else {
            self.error(format!("unknown environment '{}'", b.env), b.span);
            return;
        };
        let mut env = env.clone();

        let mut events: Vec<EventDecl> = Vec::new();
        let mut states: Vec<String> = Vec::new();
        let mut init: Option<(String, Option<Expr>, Span)> = None;
        for item in &b.items {
            match item {
                ast::MachineItem::Event { name, ranges, span } => {
                    self.events_and_states(name, *span, &mut events, ranges)
                }
                ast::MachineItem::States { names, span } => {
                    for n in names {
                        if states.contains(n) {
                            self.error(format!("duplicate state '{n}'"), *span);
                        } else {
                            states.push(n.clone());
                        }
                    }
                }
                ast::MachineItem::Init { state, when, span } => {
                    if init.is_some() {
                        self.error("more than one 'init'", *span);
                    } else {
                        init = Some((state.clone(), when.clone(), *span));
                    }
                }
                ast::MachineItem::Transition(_) => {}
            }
        }
        let Some((init_state, init_when, init_span)) = init else {
            self.error(format!("machine '{}' has no 'init'", b.name), b.span);
            return;
        };
        if !states.contains(&init_state) {
            self.error(format!("initial state '{init_state}' is not declared"), init_span);
            return;
        }

        let event_arity: BTreeMap<String, Vec<(i64, i64)>> = events
            .iter()
            .map(|e| (e.name.clone(), e.param_ranges.clone()))
            .collect();

        let mut rules: BTreeSet<TransitionRule> = BTreeSet::new();
        for item in &b.items {
            let ast::MachineItem::Transition(t) = item else {
                continue;
            };
            if !states.contains(&t.from) {
                self.error(format!("state '{}' is not declared", t.from), t.span);
                continue;
            }
            if !states.contains(&t.to) {
                self.error(format!("state '{}' is not declared", t.to), t.span);
                continue;
            }
            // Parameter valuations of the trigger.
            let (param_names, valuations, trigger_name) = match &t.trigger {
                ast::Trigger::Complete => (Vec::new(), vec![Vec::new()], None),
                ast::Trigger::Event { name, params } => {
                    let Some(ranges) = event_arity.get(name) else {
                        self.error(format!("event '{name}' is not declared"), t.span);
                        continue;
                    };
                    if ranges.len() != params.len() {
                        self.error(
                            format!(
                                "event '{name}' takes {} parameters, {} given",
                                ranges.len(),
                                params.len()
                            ),
                            t.span,
                        );
                        continue;
                    }
                    let mut seen = BTreeSet::new();
                    let mut clash = false;
                    for p in params {
                        if !seen.insert(p.clone()) {
                            self.error(format!("duplicate parameter '{p}'"), t.span);
                            clash = true;
                        }
                        if env.space.vars.iter().any(|v| v.name == *p) {
                            self.error(
                                format!("parameter '{p}' shadows a variable"),
                                t.span,
                            );
                            clash = true;
                        }
                    }
                    if clash {
                        continue;
                    }
                    (
                        params.clone(),
                        crate::concrete::expand_ranges(ranges),
                        Some(name.clone()),
                    )
                }
            };
            let param_set: BTreeSet<String> = param_names.iter().cloned().collect();
            let Ok(guard) = self.trans_guard(t.when.as_ref(), &env, &param_set) else {
                continue;
            };
            let Ok(program) = self.stmts(&t.action, &env, &param_set) else {
                continue;
            };
            for tuple in &valuations {
                let valuation: BTreeMap<String, i64> = param_names
                    .iter()
                    .cloned()
                    .zip(tuple.iter().copied())
                    .collect();
                let guard_inst = subst_guard(&guard, &valuation);
                let guard_name = guard_inst.to_string();
                let action_inst = subst_program(&program, &valuation);
                let action_name = action_inst.to_string();
                if let Err(e) = env.add_guard(&guard_name, inline_guard(&guard_inst, &env.guard_defs.clone())) {
                    self.error(e.to_string(), t.span);
                    continue;
                }
                if let Err(e) =
                    env.add_action(&action_name, inline_program(&action_inst, &env.action_defs.clone()))
                {
                    self.error(e.to_string(), t.span);
                    continue;
                }
                let trigger = match &trigger_name {
                    None => PoolItem::Completion(t.from.clone()),
                    Some(name) => PoolItem::Event(ground_event(name, tuple)),
                };
                rules.insert(TransitionRule {
                    source: t.from.clone(),
                    trigger,
                    guard: guard_name,
                    action: action_name,
                    target: t.to.clone(),
                });
            }
        }

        // Initial data states.
        let initial_data: BTreeSet<usize> = match &init_when {
            None => (0..env.space.len()).collect(),
            Some(expr) => {
                let Ok(typed) = self.trans_guard(Some(expr), &env, &BTreeSet::new()) else {
                    return;
                };
                let inlined = inline_guard(&typed, &env.guard_defs);
                match env.states_where(&inlined) {
                    Ok(set) => set,
                    Err(e) => {
                        self.error(e.to_string(), init_span);
                        return;
                    }
                }
            }
        };

        let ground_events: BTreeSet<String> = events
            .iter()
            .flat_map(|e| crate::concrete::ground_events(e))
            .collect();
        let signature = SmSignature {
            events: ground_events,
            states: states.iter().cloned().collect(),
        };
        self.out.machines.insert(
            b.name.clone(),
            MachineModel {
                name: b.name.clone(),
                env_name: b.env.clone(),
                env,
                signature,
                sentence: SmSentence {
                    initial: init_state,
                    rules,
                },
                initial_data,
                event_decls: events,
            },
        );
    }

    // ---- protocols ----

    fn protocol_block(&mut self, b: &ast::ProtocolBlock) {
        if self.out.protocols.contains_key(&b.name) {
            self.error(format!("duplicate protocol '{}'", b.name), b.span);
            return;
        }
        let Some(env) = self.out.envs.get(&b.env) else {
            self.error(format!("unknown environment '{}'", b.env), b.span);
            return;
        };
        let mut env = env.clone();

        let mut events: Vec<EventDecl> = Vec::new();
        let mut states: Vec<String> = Vec::new();
        let mut init: Option<String> = None;
        for item in &b.items {
            match item {
                ast::ProtocolItem::Event { name, ranges, span } => {
                    self.events_and_states(name, *span, &mut events, ranges)
                }
                ast::ProtocolItem::States { names, span } => {
                    for n in names {
                        if n == ERROR_STATE {
                            self.error(
                                format!("state name '{n}' is reserved for the error state"),
                                *span,
                            );
                        } else if states.contains(n) {
                            self.error(format!("duplicate state '{n}'"), *span);
                        } else {
                            states.push(n.clone());
                        }
                    }
                }
                ast::ProtocolItem::Init { state, span } => {
                    if init.is_some() {
                        self.error("more than one 'init'", *span);
                    } else {
                        init = Some(state.clone());
                    }
                }
                ast::ProtocolItem::Transition(_) => {}
            }
        }
        let Some(init_state) = init else {
            self.error(format!("protocol '{}' has no 'init'", b.name), b.span);
            return;
        };
        if !states.contains(&init_state) {
            self.error(format!("initial state '{init_state}' is not declared"), b.span);
            return;
        }

        let event_arity: BTreeMap<String, Vec<(i64, i64)>> = events
            .iter()
            .map(|e| (e.name.clone(), e.param_ranges.clone()))
            .collect();

        let mut rules: BTreeSet<PsmRule> = BTreeSet::new();
        for item in &b.items {
            let ast::ProtocolItem::Transition(t) = item else {
                continue;
            };
            if !states.contains(&t.from) || !states.contains(&t.to) {
                self.error("transition uses an undeclared state", t.span);
                continue;
            }
            let Some(ranges) = event_arity.get(&t.event) else {
                self.error(format!("event '{}' is not declared", t.event), t.span);
                continue;
            };
            if ranges.len() != t.params.len() {
                self.error(
                    format!(
                        "event '{}' takes {} parameters, {} given",
                        t.event,
                        ranges.len(),
                        t.params.len()
                    ),
                    t.span,
                );
                continue;
            }
            let param_set: BTreeSet<String> = t.params.iter().cloned().collect();
            let Ok(pre) = self.trans_guard(t.pre.as_ref(), &env, &param_set) else {
                continue;
            };
            let Ok(post) = self.trans_guard(t.post.as_ref(), &env, &param_set) else {
                continue;
            };
            // Send arguments range over parameters and constants only.
            let sends = t.sends.clone().unwrap_or_default();
            let mut send_terms: Vec<(String, String, Vec<IntExpr>)> = Vec::new();
            let mut bad = false;
            for m in &sends {
                let look = |n: &str| -> Looked {
                    if param_set.contains(n) {
                        Looked::Int(n.to_string())
                    } else {
                        Looked::Missing
                    }
                };
                let mut args = Vec::new();
                for a in &m.args {
                    match self.int_expr(a, &look) {
                        Ok(e) => args.push(e),
                        Err(()) => {
                            bad = true;
                            break;
                        }
                    }
                }
                send_terms.push((m.port.clone(), m.name.clone(), args));
            }
            if bad {
                continue;
            }
            for tuple in crate::concrete::expand_ranges(ranges) {
                let valuation: BTreeMap<String, i64> = t
                    .params
                    .iter()
                    .cloned()
                    .zip(tuple.iter().copied())
                    .collect();
                let pre_inst = subst_guard(&pre, &valuation);
                let post_inst = subst_guard(&post, &valuation);
                let pre_name = pre_inst.to_string();
                let post_name = post_inst.to_string();
                if self
                    .add_guard_or_diag(&mut env, &pre_name, &pre_inst, t.span)
                    .is_err()
                    || self
                        .add_guard_or_diag(&mut env, &post_name, &post_inst, t.span)
                        .is_err()
                {
                    continue;
                }
                let empty_store = crate::concrete::Store::new();
                let mut required = BTreeSet::new();
                let mut send_ok = true;
                for (port, name, args) in &send_terms {
                    let mut ground_args = Vec::new();
                    for a in args {
                        match crate::concrete::eval_int(a, &empty_store, &valuation) {
                            Ok(v) => ground_args.push(v),
                            Err(e) => {
                                self.error(e.to_string(), t.span);
                                send_ok = false;
                                break;
                            }
                        }
                    }
                    if !send_ok {
                        break;
                    }
                    let msg = ground_message(port, name, &ground_args);
                    if !env.signature.messages.contains(&msg) {
                        self.error(format!("message '{msg}' is not declared"), t.span);
                        send_ok = false;
                        break;
                    }
                    required.insert(msg);
                }
                if !send_ok {
                    continue;
                }
                rules.insert(PsmRule {
                    source: t.from.clone(),
                    pre: pre_name,
                    trigger: ground_event(&t.event, &tuple),
                    post: post_name,
                    required,
                    target: t.to.clone(),
                });
            }
        }

        let ground_events: BTreeSet<String> = events
            .iter()
            .flat_map(|e| crate::concrete::ground_events(e))
            .collect();
        self.out.protocols.insert(
            b.name.clone(),
            ProtocolModel {
                name: b.name.clone(),
                env_name: b.env.clone(),
                env,
                signature: SmSignature {
                    events: ground_events,
                    states: states.iter().cloned().collect(),
                },
                sentence: PsmSentence {
                    initial: init_state,
                    rules,
                },
                event_decls: events,
            },
        );
    }

    fn add_guard_or_diag(
        &mut self,
        env: &mut ConcreteEnv,
        name: &str,
        expr: &GuardExpr,
        span: Span,
    ) -> Result<(), ()> {
        let inlined = inline_guard(expr, &env.guard_defs.clone());
        match env.add_guard(name, inlined) {
            Ok(()) => Ok(()),
            Err(e) => {
                self.error(e.to_string(), span);
                Err(())
            }
        }
    }

    // ---- systems ----

    fn system_block(&mut self, b: &ast::SystemBlock) {
        if self.out.systems.iter().any(|s| s.model.name == b.name) {
            self.error(format!("duplicate system '{}'", b.name), b.span);
            return;
        }

        let mut instances: Vec<Instance> = Vec::new();
        for item in &b.items {
            let ast::SystemItem::Inst {
                name,
                machine,
                span,
            } = item
            else {
                continue;
            };
            if instances.iter().any(|i| i.name == *name) {
                self.error(format!("duplicate instance '{name}'"), *span);
                continue;
            }
            let kind = if let Some(m) = self.out.machines.get(machine) {
                Some(InstanceKind::Behavioral(m.clone()))
            } else {
                self.out
                    .protocols
                    .get(machine)
                    .map(|p| Some(InstanceKind::Protocol(p.clone())))
                    .unwrap_or(None)
            };
            instances.push(Instance {
                name: name.clone(),
                type_name: machine.clone(),
                kind,
            });
        }

        let index_of = |name: &str| instances.iter().position(|i| i.name == name);
        let mut issues: Vec<WiringIssue> = Vec::new();
        let mut connectors: Vec<Connector> = Vec::new();
        let mut externals: BTreeSet<(usize, String)> = BTreeSet::new();
        let mut stimuli: Vec<Stimulus> = Vec::new();

        for item in &b.items {
            match item {
                ast::SystemItem::Connect { a, b: bb, monitors, span } => {
                    let (Some(ia), Some(ib)) = (index_of(&a.instance), index_of(&bb.instance))
                    else {
                        issues.push(WiringIssue {
                            kind: IssueKind::InstanceType,
                            connector: format!(
                                "{}.{}--{}.{}",
                                a.instance, a.port, bb.instance, bb.port
                            ),
                            detail: "connector end names an undeclared instance".to_string(),
                        });
                        continue;
                    };
                    let mut monitor_models = Vec::new();
                    for m in monitors {
                        match self.out.protocols.get(m) {
                            Some(p) => monitor_models.push(Monitor {
                                protocol: p.clone(),
                                alphabet: p.sentence.alphabet(),
                            }),
                            None => self.error(format!("unknown protocol '{m}'"), *span),
                        }
                    }
                    connectors.push(self.build_connector(
                        &instances,
                        (ia, a.port.clone()),
                        (ib, bb.port.clone()),
                        monitor_models,
                    ));
                }
                ast::SystemItem::External(p) => match index_of(&p.instance) {
                    Some(i) => {
                        externals.insert((i, p.port.clone()));
                    }
                    None => issues.push(WiringIssue {
                        kind: IssueKind::InstanceType,
                        connector: format!("{}.{}", p.instance, p.port),
                        detail: "external port names an undeclared instance".to_string(),
                    }),
                },
                ast::SystemItem::Stimuli { items, .. } => {
                    for s in items {
                        match self.resolve_stimulus(s, &instances, &index_of) {
                            Some(st) => stimuli.push(st),
                            None => {}
                        }
                    }
                }
                _ => {}
            }
        }

        let model = SystemModel {
            name: b.name.clone(),
            instances,
            connectors,
            externals,
            stimuli,
        };

        // Checks, in declaration order.
        let mut checks = Vec::new();
        let mut counts: BTreeMap<&'static str, usize> = BTreeMap::new();
        for item in &b.items {
            let ast::SystemItem::Check(c) = item else {
                continue;
            };
            let kind = match c {
                ast::CheckItem::Invariant { .. } => "invariant",
                ast::CheckItem::PrePost { .. } => "prepost",
                ast::CheckItem::Connector { .. } => "connector",
                ast::CheckItem::Interaction { .. } => "interaction",
                ast::CheckItem::Chain { .. } => "chain",
            };
            let k = counts.entry(kind).or_insert(0);
            let id = format!("{kind}[{k}]");
            *k += 1;
            if let Some(rc) = self.resolve_check(c, &id, &model) {
                checks.push(rc);
            }
        }

        self.out.systems.push(ResolvedSystem {
            model,
            issues,
            checks,
        });
    }

    fn build_connector(
        &mut self,
        instances: &[Instance],
        a: (usize, String),
        b: (usize, String),
        monitors: Vec<Monitor>,
    ) -> Connector {
        let mut routes = BTreeMap::new();
        let mut issues = Vec::new();
        let label = format!(
            "{}.{}--{}.{}",
            instances[a.0].name, a.1, instances[b.0].name, b.1
        );
        for (from, port, to) in [(a.0, &a.1, b.0), (b.0, &b.1, a.0)] {
            let Some(env) = instances[from].env() else {
                issues.push(WiringIssue {
                    kind: IssueKind::InstanceType,
                    connector: label.clone(),
                    detail: format!(
                        "instance '{}' has undeclared type '{}'",
                        instances[from].name, instances[from].type_name
                    ),
                });
                continue;
            };
            let decls: Vec<&MessageDecl> = env
                .message_decls
                .iter()
                .filter(|d| d.port == *port)
                .collect();
            if decls.is_empty() {
                issues.push(WiringIssue {
                    kind: IssueKind::Port,
                    connector: label.clone(),
                    detail: format!(
                        "port '{}' is not declared on instance '{}'",
                        port, instances[from].name
                    ),
                });
                continue;
            }
            let Some(peer_sig) = instances[to].signature() else {
                issues.push(WiringIssue {
                    kind: IssueKind::InstanceType,
                    connector: label.clone(),
                    detail: format!(
                        "instance '{}' has undeclared type '{}'",
                        instances[to].name, instances[to].type_name
                    ),
                });
                continue;
            };
            for decl in decls {
                for args in crate::concrete::expand_ranges(&decl.param_ranges) {
                    let msg = ground_message(&decl.port, &decl.name, &args);
                    let event = ground_event(&decl.name, &args);
                    if peer_sig.events.contains(&event) {
                        routes.insert((from, msg), (to, event));
                    } else {
                        issues.push(WiringIssue {
                            kind: IssueKind::Routing,
                            connector: label.clone(),
                            detail: format!(
                                "message '{msg}' of '{}' has no matching event on '{}'",
                                instances[from].name, instances[to].name
                            ),
                        });
                    }
                }
            }
        }
        Connector {
            ends: [a, b],
            routes,
            monitors,
            issues,
        }
    }

    fn resolve_stimulus(
        &mut self,
        s: &ast::StimulusItem,
        instances: &[Instance],
        index_of: &dyn Fn(&str) -> Option<usize>,
    ) -> Option<Stimulus> {
        let Some(idx) = index_of(&s.instance) else {
            self.error(format!("unknown instance '{}'", s.instance), s.span);
            return None;
        };
        let Some(sig) = instances[idx].signature() else {
            self.error(
                format!(
                    "instance '{}' has undeclared type '{}'",
                    s.instance, instances[idx].type_name
                ),
                s.span,
            );
            return None;
        };
        let event = ground_event(&s.event, &s.args);
        if !sig.events.contains(&event) {
            self.error(
                format!(
                    "'{event}' is not an event of instance '{}'",
                    s.instance
                ),
                s.span,
            );
            return None;
        }
        Some(Stimulus {
            instance: idx,
            event,
        })
    }

    /// Lookup for system-level expressions: `inst.var` or a variable name
    /// that is unique across all instances. Resolves to the internal
    /// `"{index}:{var}"` form.
    fn system_lookup<'a>(
        model: &'a SystemModel,
        params: &'a BTreeSet<String>,
    ) -> impl Fn(&str) -> Looked + 'a {
        move |name: &str| -> Looked {
            if params.contains(name) {
                return Looked::Int(name.to_string());
            }
            if let Some((inst, var)) = name.split_once('.') {
                if let Some(idx) = model.instance_index(inst) {
                    if let Some(env) = model.instances[idx].env() {
                        if env.space.vars.iter().any(|v| v.name == var) {
                            return Looked::Int(format!("{idx}:{var}"));
                        }
                    }
                }
                return Looked::Missing;
            }
            let mut hits = Vec::new();
            for (idx, inst) in model.instances.iter().enumerate() {
                if let Some(env) = inst.env() {
                    if env.space.vars.iter().any(|v| v.name == name) {
                        hits.push((idx, inst.name.clone()));
                    }
                }
            }
            match hits.len() {
                0 => Looked::Missing,
                1 => Looked::Int(format!("{}:{name}", hits[0].0)),
                _ => Looked::Ambiguous(
                    hits.iter()
                        .map(|(_, n)| format!("{n}.{name}"))
                        .collect(),
                ),
            }
        }
    }

    fn resolve_check(
        &mut self,
        c: &ast::CheckItem,
        id: &str,
        model: &SystemModel,
    ) -> Option<ResolvedCheck> {
        let index_of = |name: &str| model.instance_index(name);
        match c {
            ast::CheckItem::Invariant { expr, stimuli, span } => {
                let no_params = BTreeSet::new();
                let look = Self::system_lookup(model, &no_params);
                let typed = self.guard_expr(expr, &look).ok()?;
                let stimuli = self.resolve_check_stimuli(stimuli, model, *span)?;
                Some(ResolvedCheck::Invariant {
                    id: id.to_string(),
                    label: print::expr_text(expr),
                    expr: typed,
                    stimuli,
                })
            }
            ast::CheckItem::PrePost {
                instance,
                event,
                params,
                pre,
                post,
                stimuli,
                span,
            } => {
                let Some(idx) = index_of(instance) else {
                    self.error(format!("unknown instance '{instance}'"), *span);
                    return None;
                };
                let arity_ok = match &model.instances[idx].kind {
                    Some(InstanceKind::Behavioral(m)) => m
                        .event_decls
                        .iter()
                        .any(|e| e.name == *event && e.param_ranges.len() == params.len()),
                    Some(InstanceKind::Protocol(p)) => p
                        .event_decls
                        .iter()
                        .any(|e| e.name == *event && e.param_ranges.len() == params.len()),
                    None => false,
                };
                if !arity_ok {
                    self.error(
                        format!(
                            "instance '{instance}' has no event '{event}' with {} parameters",
                            params.len()
                        ),
                        *span,
                    );
                    return None;
                }
                let param_set: BTreeSet<String> = params.iter().cloned().collect();
                let look = Self::system_lookup(model, &param_set);
                let pre_t = self.guard_expr(pre, &look).ok()?;
                let post_t = self.guard_expr(post, &look).ok()?;
                let stimuli = self.resolve_check_stimuli(stimuli, model, *span)?;
                Some(ResolvedCheck::PrePost {
                    id: id.to_string(),
                    label: format!(
                        "{instance}.{event} pre {} post {}",
                        print::expr_text(pre),
                        print::expr_text(post)
                    ),
                    instance: idx,
                    event: event.clone(),
                    params: params.clone(),
                    pre: pre_t,
                    post: post_t,
                    stimuli,
                })
            }
            ast::CheckItem::Connector { a, b, stimuli, span } => {
                let found = model.connectors.iter().position(|conn| {
                    let names = [
                        (
                            model.instances[conn.ends[0].0].name.clone(),
                            conn.ends[0].1.clone(),
                        ),
                        (
                            model.instances[conn.ends[1].0].name.clone(),
                            conn.ends[1].1.clone(),
                        ),
                    ];
                    let x = (a.instance.clone(), a.port.clone());
                    let y = (b.instance.clone(), b.port.clone());
                    (names[0] == x && names[1] == y) || (names[0] == y && names[1] == x)
                });
                let Some(connector) = found else {
                    self.error("check names a connector that is not declared", *span);
                    return None;
                };
                let stimuli = self.resolve_check_stimuli(stimuli, model, *span)?;
                Some(ResolvedCheck::Connector {
                    id: id.to_string(),
                    label: model.connectors[connector].label(&model.instances),
                    connector,
                    stimuli,
                })
            }
            ast::CheckItem::Interaction {
                mode,
                sequence,
                stimuli,
                span,
            } => {
                let mut resolved = Vec::new();
                for p in sequence {
                    let Some(idx) = index_of(&p.instance) else {
                        self.error(format!("unknown instance '{}'", p.instance), p.span);
                        return None;
                    };
                    let Some(env) = model.instances[idx].env() else {
                        self.error(
                            format!("instance '{}' has an undeclared type", p.instance),
                            p.span,
                        );
                        return None;
                    };
                    let decl = env
                        .message_decls
                        .iter()
                        .find(|d| d.port == p.port && d.name == p.name);
                    let Some(decl) = decl else {
                        self.error(
                            format!("message '{}.{}' is not declared", p.port, p.name),
                            p.span,
                        );
                        return None;
                    };
                    if let Some(args) = &p.args {
                        if args.len() != decl.param_ranges.len() {
                            self.error(
                                format!(
                                    "message '{}.{}' takes {} arguments, {} given",
                                    p.port,
                                    p.name,
                                    decl.param_ranges.len(),
                                    args.len()
                                ),
                                p.span,
                            );
                            return None;
                        }
                    }
                    resolved.push(MsgPattern {
                        instance: idx,
                        port: p.port.clone(),
                        name: p.name.clone(),
                        args: p.args.clone(),
                    });
                }
                let label = {
                    let parts: Vec<String> = sequence
                        .iter()
                        .map(|p| format!("{}.{}.{}", p.instance, p.port, p.name))
                        .collect();
                    format!(
                        "{} [{}]",
                        match mode {
                            Mode::Strict => "strict",
                            Mode::Loose => "loose",
                        },
                        parts.join("; ")
                    )
                };
                let stimuli = self.resolve_check_stimuli(stimuli, model, *span)?;
                Some(ResolvedCheck::Interaction {
                    id: id.to_string(),
                    label,
                    mode: *mode,
                    sequence: resolved,
                    stimuli,
                })
            }
            ast::CheckItem::Chain {
                mode,
                env,
                sentences,
                span,
            } => {
                let Some(base) = self.out.envs.get(env) else {
                    self.error(format!("unknown environment '{env}'"), *span);
                    return None;
                };
                let mut chain_env = base.clone();
                let mut resolved = Vec::new();
                let no_params = BTreeSet::new();
                for s in sentences {
                    let pre = self.trans_guard(Some(&s.pre), &chain_env, &no_params).ok()?;
                    let post = self
                        .trans_guard(Some(&s.post), &chain_env, &no_params)
                        .ok()?;
                    let program = self.stmts(&s.action, &chain_env, &no_params).ok()?;
                    let pre_name = pre.to_string();
                    let post_name = post.to_string();
                    let action_name = program.to_string();
                    self.add_guard_or_diag(&mut chain_env, &pre_name, &pre, s.span)
                        .ok()?;
                    self.add_guard_or_diag(&mut chain_env, &post_name, &post, s.span)
                        .ok()?;
                    let inlined = inline_program(&program, &chain_env.action_defs.clone());
                    if let Err(e) = chain_env.add_action(&action_name, inlined) {
                        self.error(e.to_string(), s.span);
                        return None;
                    }
                    // Emitted messages must be ground constants.
                    let empty = crate::concrete::Store::new();
                    let none = BTreeMap::new();
                    let mut emits = BTreeSet::new();
                    for m in &s.emits {
                        let look = |_: &str| Looked::Missing;
                        let mut args = Vec::new();
                        let mut ok = true;
                        for a in &m.args {
                            match self.int_expr(a, &look) {
                                Ok(e) => match crate::concrete::eval_int(&e, &empty, &none) {
                                    Ok(v) => args.push(v),
                                    Err(err) => {
                                        self.error(err.to_string(), m.span);
                                        ok = false;
                                        break;
                                    }
                                },
                                Err(()) => {
                                    ok = false;
                                    break;
                                }
                            }
                        }
                        if !ok {
                            return None;
                        }
                        let msg = ground_message(&m.port, &m.name, &args);
                        if !chain_env.signature.messages.contains(&msg) {
                            self.error(format!("message '{msg}' is not declared"), m.span);
                            return None;
                        }
                        emits.insert(msg);
                    }
                    resolved.push(crate::env::EnvSentence {
                        pre: pre_name,
                        action: action_name,
                        emits,
                        post: post_name,
                    });
                }
                if resolved.len() < 2 {
                    self.error("a chain needs at least two sentences", *span);
                    return None;
                }
                Some(ResolvedCheck::Chain {
                    id: id.to_string(),
                    label: format!("{env} chain of {}", resolved.len()),
                    mode: *mode,
                    env: chain_env,
                    sentences: resolved,
                })
            }
        }
    }

    fn resolve_check_stimuli(
        &mut self,
        stimuli: &Option<Vec<ast::StimulusItem>>,
        model: &SystemModel,
        _span: Span,
    ) -> Option<Option<Vec<Stimulus>>> {
        let Some(items) = stimuli else {
            return Some(None);
        };
        let index_of = |name: &str| model.instance_index(name);
        let mut out = Vec::new();
        for s in items {
            out.push(self.resolve_stimulus(s, &model.instances, &index_of)?);
        }
        Some(Some(out))
    }
}

// ---- substitution and inlining over typed expressions ----

fn subst_int(e: &IntExpr, params: &BTreeMap<String, i64>) -> IntExpr {
    match e {
        IntExpr::Lit(_) => e.clone(),
        IntExpr::Ref(name) => match params.get(name) {
            Some(v) => IntExpr::Lit(*v),
            None => e.clone(),
        },
        IntExpr::Neg(x) => IntExpr::Neg(Box::new(subst_int(x, params))),
        IntExpr::Add(l, r) => IntExpr::Add(
            Box::new(subst_int(l, params)),
            Box::new(subst_int(r, params)),
        ),
        IntExpr::Sub(l, r) => IntExpr::Sub(
            Box::new(subst_int(l, params)),
            Box::new(subst_int(r, params)),
        ),
        IntExpr::Mul(l, r) => IntExpr::Mul(
            Box::new(subst_int(l, params)),
            Box::new(subst_int(r, params)),
        ),
    }
}

/// Substitutes trigger parameters by their values.
pub fn subst_guard(g: &GuardExpr, params: &BTreeMap<String, i64>) -> GuardExpr {
    match g {
        GuardExpr::Lit(_) | GuardExpr::Ref(_) => g.clone(),
        GuardExpr::Cmp(op, l, r) => {
            GuardExpr::Cmp(*op, subst_int(l, params), subst_int(r, params))
        }
        GuardExpr::Not(x) => GuardExpr::Not(Box::new(subst_guard(x, params))),
        GuardExpr::And(l, r) => GuardExpr::And(
            Box::new(subst_guard(l, params)),
            Box::new(subst_guard(r, params)),
        ),
        GuardExpr::Or(l, r) => GuardExpr::Or(
            Box::new(subst_guard(l, params)),
            Box::new(subst_guard(r, params)),
        ),
    }
}

fn subst_program(p: &ActionProgram, params: &BTreeMap<String, i64>) -> ActionProgram {
    ActionProgram {
        stmts: p
            .stmts
            .iter()
            .map(|s| match s {
                Stmt::Assign { var, value } => Stmt::Assign {
                    var: var.clone(),
                    value: subst_int(value, params),
                },
                Stmt::Send { port, name, args } => Stmt::Send {
                    port: port.clone(),
                    name: name.clone(),
                    args: args.iter().map(|a| subst_int(a, params)).collect(),
                },
                Stmt::Call(name) => Stmt::Call(name.clone()),
            })
            .collect(),
    }
}

/// Replaces named-guard references by their (reference-free) definitions.
pub fn inline_guard(g: &GuardExpr, defs: &BTreeMap<String, GuardExpr>) -> GuardExpr {
    match g {
        GuardExpr::Ref(name) => defs
            .get(name)
            .cloned()
            .unwrap_or_else(|| GuardExpr::Ref(name.clone())),
        GuardExpr::Lit(_) | GuardExpr::Cmp(..) => g.clone(),
        GuardExpr::Not(x) => GuardExpr::Not(Box::new(inline_guard(x, defs))),
        GuardExpr::And(l, r) => GuardExpr::And(
            Box::new(inline_guard(l, defs)),
            Box::new(inline_guard(r, defs)),
        ),
        GuardExpr::Or(l, r) => GuardExpr::Or(
            Box::new(inline_guard(l, defs)),
            Box::new(inline_guard(r, defs)),
        ),
    }
}

/// Replaces action calls by the called program's statements.
pub fn inline_program(p: &ActionProgram, defs: &BTreeMap<String, ActionProgram>) -> ActionProgram {
    let mut stmts = Vec::new();
    for s in &p.stmts {
        match s {
            Stmt::Call(name) => match defs.get(name) {
                Some(prog) => stmts.extend(prog.stmts.iter().cloned()),
                None => stmts.push(s.clone()),
            },
            _ => stmts.push(s.clone()),
        }
    }
    ActionProgram { stmts }
}
