//! Abstract syntax of the model language.
//!
//! Expressions are untyped at this level (the resolver assigns boolean or
//! integer meaning); every node carries its source span so resolution errors
//! can point at names.

use std::fmt;

/// A source region: 1-based line and column plus a length in bytes.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, PartialOrd, Ord)]
pub struct Span {
    pub line: u32,
    pub col: u32,
    pub len: u32,
}

impl fmt::Display for Span {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}", self.line, self.col)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Severity {
    Error,
}

/// A positioned message produced by the lexer, parser, or resolver.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Diagnostic {
    pub severity: Severity,
    pub message: String,
    pub span: Span,
}

impl Diagnostic {
    pub fn error(message: impl Into<String>, span: Span) -> Self {
        Diagnostic {
            severity: Severity::Error,
            message: message.into(),
            span,
        }
    }
}

impl fmt::Display for Diagnostic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "error at {}: {}", self.span, self.message)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum UnOp {
    Neg,
    Not,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum BinOp {
    Add,
    Sub,
    Mul,
    Eq,
    Ne,
    Lt,
    Le,
    Gt,
    Ge,
    And,
    Or,
}

/// An untyped expression.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Expr {
    pub kind: ExprKind,
    pub span: Span,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum ExprKind {
    Int(i64),
    Bool(bool),
    /// A plain or instance-qualified name (`trialsNum`, `atm.trialsNum`).
    Ref(String),
    Unary(UnOp, Box<Expr>),
    Binary(BinOp, Box<Expr>, Box<Expr>),
}

/// A raw statement of an action body.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RawStmt {
    pub kind: RawStmtKind,
    pub span: Span,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum RawStmtKind {
    Assign { var: String, value: Expr },
    Send { port: String, name: String, args: Vec<Expr> },
    /// Inline a named action.
    Call(String),
    Skip,
}

/// `lo..hi`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Range {
    pub lo: i64,
    pub hi: i64,
    pub span: Span,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct EnvBlock {
    pub name: String,
    pub items: Vec<EnvItem>,
    pub span: Span,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum EnvItem {
    Var {
        name: String,
        range: Range,
        span: Span,
    },
    Msg {
        port: String,
        name: String,
        ranges: Vec<Range>,
        span: Span,
    },
    Guard {
        /// Anonymous guards take their canonical text as signature name.
        name: Option<String>,
        expr: Expr,
        span: Span,
    },
    Action {
        name: Option<String>,
        body: Vec<RawStmt>,
        span: Span,
    },
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Trigger {
    /// `complete`: the source state's completion event.
    Complete,
    Event { name: String, params: Vec<String> },
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MachineBlock {
    pub name: String,
    pub env: String,
    pub items: Vec<MachineItem>,
    pub span: Span,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum MachineItem {
    Init {
        state: String,
        when: Option<Expr>,
        span: Span,
    },
    States {
        names: Vec<String>,
        span: Span,
    },
    Event {
        name: String,
        ranges: Vec<Range>,
        span: Span,
    },
    Transition(TransitionItem),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TransitionItem {
    pub trigger: Trigger,
    pub when: Option<Expr>,
    pub from: String,
    pub to: String,
    pub action: Vec<RawStmt>,
    pub span: Span,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MsgLit {
    pub port: String,
    pub name: String,
    pub args: Vec<Expr>,
    pub span: Span,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ProtocolBlock {
    pub name: String,
    pub env: String,
    pub items: Vec<ProtocolItem>,
    pub span: Span,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum ProtocolItem {
    Init {
        state: String,
        span: Span,
    },
    States {
        names: Vec<String>,
        span: Span,
    },
    Event {
        name: String,
        ranges: Vec<Range>,
        span: Span,
    },
    Transition(ProtocolTransition),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ProtocolTransition {
    pub event: String,
    pub params: Vec<String>,
    pub from: String,
    pub to: String,
    pub pre: Option<Expr>,
    pub post: Option<Expr>,
    pub sends: Option<Vec<MsgLit>>,
    pub span: Span,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PortRef {
    pub instance: String,
    pub port: String,
    pub span: Span,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct StimulusItem {
    pub instance: String,
    pub event: String,
    pub args: Vec<i64>,
    pub span: Span,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Mode {
    Strict,
    Loose,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MsgPattern {
    pub instance: String,
    pub port: String,
    pub name: String,
    /// Exact arguments; `None` matches any arguments of that message name.
    pub args: Option<Vec<i64>>,
    pub span: Span,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct EnvSentenceItem {
    pub pre: Expr,
    pub action: Vec<RawStmt>,
    pub emits: Vec<MsgLit>,
    pub post: Expr,
    pub span: Span,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum CheckItem {
    Invariant {
        expr: Expr,
        stimuli: Option<Vec<StimulusItem>>,
        span: Span,
    },
    PrePost {
        instance: String,
        event: String,
        params: Vec<String>,
        pre: Expr,
        post: Expr,
        stimuli: Option<Vec<StimulusItem>>,
        span: Span,
    },
    Connector {
        a: PortRef,
        b: PortRef,
        stimuli: Option<Vec<StimulusItem>>,
        span: Span,
    },
    Interaction {
        mode: Mode,
        sequence: Vec<MsgPattern>,
        stimuli: Option<Vec<StimulusItem>>,
        span: Span,
    },
    Chain {
        mode: Mode,
        env: String,
        sentences: Vec<EnvSentenceItem>,
        span: Span,
    },
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum SystemItem {
    Inst {
        name: String,
        machine: String,
        span: Span,
    },
    Connect {
        a: PortRef,
        b: PortRef,
        monitors: Vec<String>,
        span: Span,
    },
    External(PortRef),
    Stimuli {
        items: Vec<StimulusItem>,
        span: Span,
    },
    Check(CheckItem),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SystemBlock {
    pub name: String,
    pub items: Vec<SystemItem>,
    pub span: Span,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Item {
    Env(EnvBlock),
    Machine(MachineBlock),
    Protocol(ProtocolBlock),
    System(SystemBlock),
}

/// A parsed model file, items in source order.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct ModelFile {
    pub items: Vec<Item>,
}

impl ModelFile {
    pub fn is_empty(&self) -> bool {
        self.items.is_empty()
    }
}

// Span erasure, for structural comparison of round-tripped models.

fn z() -> Span {
    Span::default()
}

fn strip_expr(e: &mut Expr) {
    e.span = z();
    match &mut e.kind {
        ExprKind::Unary(_, x) => strip_expr(x),
        ExprKind::Binary(_, l, r) => {
            strip_expr(l);
            strip_expr(r);
        }
        _ => {}
    }
}

fn strip_stmts(stmts: &mut [RawStmt]) {
    for s in stmts {
        s.span = z();
        match &mut s.kind {
            RawStmtKind::Assign { value, .. } => strip_expr(value),
            RawStmtKind::Send { args, .. } => args.iter_mut().for_each(strip_expr),
            _ => {}
        }
    }
}

fn strip_msglits(ms: &mut [MsgLit]) {
    for m in ms {
        m.span = z();
        m.args.iter_mut().for_each(strip_expr);
    }
}

fn strip_stimuli(st: &mut Option<Vec<StimulusItem>>) {
    if let Some(items) = st {
        for s in items {
            s.span = z();
        }
    }
}

impl ModelFile {
    /// Returns a copy with every span zeroed, so parse/print round trips can
    /// be compared structurally.
    pub fn stripped(&self) -> ModelFile {
        let mut m = self.clone();
        for item in &mut m.items {
            match item {
                Item::Env(b) => {
                    b.span = z();
                    for i in &mut b.items {
                        match i {
                            EnvItem::Var { range, span, .. } => {
                                range.span = z();
                                *span = z();
                            }
                            EnvItem::Msg { ranges, span, .. } => {
                                for r in ranges {
                                    r.span = z();
                                }
                                *span = z();
                            }
                            EnvItem::Guard { expr, span, .. } => {
                                strip_expr(expr);
                                *span = z();
                            }
                            EnvItem::Action { body, span, .. } => {
                                strip_stmts(body);
                                *span = z();
                            }
                        }
                    }
                }
                Item::Machine(b) => {
                    b.span = z();
                    for i in &mut b.items {
                        match i {
                            MachineItem::Init { when, span, .. } => {
                                if let Some(w) = when {
                                    strip_expr(w);
                                }
                                *span = z();
                            }
                            MachineItem::States { span, .. } => *span = z(),
                            MachineItem::Event { ranges, span, .. } => {
                                for r in ranges {
                                    r.span = z();
                                }
                                *span = z();
                            }
                            MachineItem::Transition(t) => {
                                t.span = z();
                                if let Some(w) = &mut t.when {
                                    strip_expr(w);
                                }
                                strip_stmts(&mut t.action);
                            }
                        }
                    }
                }
                Item::Protocol(b) => {
                    b.span = z();
                    for i in &mut b.items {
                        match i {
                            ProtocolItem::Init { span, .. } => *span = z(),
                            ProtocolItem::States { span, .. } => *span = z(),
                            ProtocolItem::Event { ranges, span, .. } => {
                                for r in ranges {
                                    r.span = z();
                                }
                                *span = z();
                            }
                            ProtocolItem::Transition(t) => {
                                t.span = z();
                                if let Some(p) = &mut t.pre {
                                    strip_expr(p);
                                }
                                if let Some(p) = &mut t.post {
                                    strip_expr(p);
                                }
                                if let Some(sends) = &mut t.sends {
                                    strip_msglits(sends);
                                }
                            }
                        }
                    }
                }
                Item::System(b) => {
                    b.span = z();
                    for i in &mut b.items {
                        match i {
                            SystemItem::Inst { span, .. } => *span = z(),
                            SystemItem::Connect { a, b, span, .. } => {
                                a.span = z();
                                b.span = z();
                                *span = z();
                            }
                            SystemItem::External(p) => p.span = z(),
                            SystemItem::Stimuli { items, span } => {
                                for s in items {
                                    s.span = z();
                                }
                                *span = z();
                            }
                            SystemItem::Check(c) => match c {
                                CheckItem::Invariant { expr, stimuli, span } => {
                                    strip_expr(expr);
                                    strip_stimuli(stimuli);
                                    *span = z();
                                }
                                CheckItem::PrePost {
                                    pre,
                                    post,
                                    stimuli,
                                    span,
                                    ..
                                } => {
                                    strip_expr(pre);
                                    strip_expr(post);
                                    strip_stimuli(stimuli);
                                    *span = z();
                                }
                                CheckItem::Connector { a, b, stimuli, span } => {
                                    a.span = z();
                                    b.span = z();
                                    strip_stimuli(stimuli);
                                    *span = z();
                                }
                                CheckItem::Interaction {
                                    sequence,
                                    stimuli,
                                    span,
                                    ..
                                } => {
                                    for p in sequence {
                                        p.span = z();
                                    }
                                    strip_stimuli(stimuli);
                                    *span = z();
                                }
                                CheckItem::Chain { sentences, span, .. } => {
                                    for s in sentences {
                                        s.span = z();
                                        strip_expr(&mut s.pre);
                                        strip_expr(&mut s.post);
                                        strip_stmts(&mut s.action);
                                        strip_msglits(&mut s.emits);
                                    }
                                    *span = z();
                                }
                            },
                        }
                    }
                }
            }
        }
        m
    }
}
