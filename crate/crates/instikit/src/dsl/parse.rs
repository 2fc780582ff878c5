//! Recursive-descent parser. Collects every diagnostic instead of bailing on
//! the first error: item-level failures synchronize at the next `;` or `}`,
//! top-level failures at the next block keyword.

use super::ast::*;
use super::lex::{lex, Kw, Tok, Token};

const MAX_EXPR_DEPTH: u32 = 200;

/// Parses a model file, returning either the full AST or every diagnostic.
pub fn parse_model(text: &str) -> Result<ModelFile, Vec<Diagnostic>> {
    let (tokens, mut diags) = lex(text);
    let mut p = Parser {
        tokens,
        pos: 0,
        diags: Vec::new(),
    };
    let model = p.model();
    diags.extend(p.diags);
    if diags.is_empty() {
        Ok(model)
    } else {
        Err(diags)
    }
}

struct Parser {
    tokens: Vec<Token>,
    pos: usize,
    diags: Vec<Diagnostic>,
}

type PResult<T> = Result<T, ()>;

impl Parser {
    fn peek(&self) -> &Tok {
        &self.tokens[self.pos].tok
    }

    fn peek2(&self) -> &Tok {
        &self.tokens[(self.pos + 1).min(self.tokens.len() - 1)].tok
    }

    fn span(&self) -> Span {
        self.tokens[self.pos].span
    }

    fn prev_span(&self) -> Span {
        self.tokens[self.pos.saturating_sub(1)].span
    }

    fn bump(&mut self) -> Tok {
        let t = self.tokens[self.pos].tok.clone();
        if self.pos + 1 < self.tokens.len() {
            self.pos += 1;
        }
        t
    }

    fn at(&self, tok: &Tok) -> bool {
        self.peek() == tok
    }

    fn at_kw(&self, kw: Kw) -> bool {
        matches!(self.peek(), Tok::Kw(k) if *k == kw)
    }

    fn eat(&mut self, tok: &Tok) -> bool {
        if self.at(tok) {
            self.bump();
            true
        } else {
            false
        }
    }

    fn eat_kw(&mut self, kw: Kw) -> bool {
        if self.at_kw(kw) {
            self.bump();
            true
        } else {
            false
        }
    }

    fn error<T>(&mut self, message: impl Into<String>) -> PResult<T> {
        let span = self.span();
        self.diags.push(Diagnostic::error(message, span));
        Err(())
    }

    fn expect(&mut self, tok: Tok, what: &str) -> PResult<()> {
        if self.eat(&tok) {
            Ok(())
        } else {
            self.error(format!("expected {what}"))
        }
    }

    fn expect_kw(&mut self, kw: Kw) -> PResult<()> {
        if self.eat_kw(kw) {
            Ok(())
        } else {
            self.error(format!("expected '{}'", kw.text()))
        }
    }

    fn ident(&mut self, what: &str) -> PResult<String> {
        match self.peek().clone() {
            Tok::Ident(name) => {
                self.bump();
                Ok(name)
            }
            _ => self.error(format!("expected {what}")),
        }
    }

    fn int(&mut self) -> PResult<i64> {
        let negative = self.eat(&Tok::Minus);
        match self.peek().clone() {
            Tok::Int(n) => {
                self.bump();
                Ok(if negative { -n } else { n })
            }
            _ => self.error("expected an integer"),
        }
    }

    /// Skips to just past the next `;` (or stops before `}` / end of input),
    /// so a bad item does not poison the rest of its block.
    fn sync_item(&mut self) {
        let mut depth = 0usize;
        loop {
            match self.peek() {
                Tok::Eof => return,
                Tok::Semi if depth == 0 => {
                    self.bump();
                    return;
                }
                Tok::RBrace if depth == 0 => return,
                Tok::LBrace | Tok::LParen | Tok::LBracket => {
                    depth += 1;
                    self.bump();
                }
                Tok::RBrace | Tok::RParen | Tok::RBracket => {
                    depth = depth.saturating_sub(1);
                    self.bump();
                }
                _ => {
                    self.bump();
                }
            }
        }
    }

    /// Skips to the next top-level block keyword.
    fn sync_block(&mut self) {
        let mut depth = 0usize;
        loop {
            match self.peek() {
                Tok::Eof => return,
                Tok::Kw(Kw::Env | Kw::Machine | Kw::Protocol | Kw::System) if depth == 0 => {
                    return
                }
                Tok::LBrace => {
                    depth += 1;
                    self.bump();
                }
                Tok::RBrace => {
                    depth = depth.saturating_sub(1);
                    self.bump();
                }
                _ => {
                    self.bump();
                }
            }
        }
    }

    fn model(&mut self) -> ModelFile {
        let mut items = Vec::new();
        loop {
            match self.peek() {
                Tok::Eof => break,
                Tok::Kw(Kw::Env) => match self.env_block() {
                    Ok(b) => items.push(Item::Env(b)),
                    Err(()) => self.sync_block(),
                },
                Tok::Kw(Kw::Machine) => match self.machine_block() {
                    Ok(b) => items.push(Item::Machine(b)),
                    Err(()) => self.sync_block(),
                },
                Tok::Kw(Kw::Protocol) => match self.protocol_block() {
                    Ok(b) => items.push(Item::Protocol(b)),
                    Err(()) => self.sync_block(),
                },
                Tok::Kw(Kw::System) => match self.system_block() {
                    Ok(b) => items.push(Item::System(b)),
                    Err(()) => self.sync_block(),
                },
                _ => {
                    let _ : PResult<()> =
                        self.error("expected 'env', 'machine', 'protocol', or 'system'");
                    self.bump();
                    self.sync_block();
                }
            }
        }
        ModelFile { items }
    }

    /// Parses `{ item* }`, recovering inside the braces; reports an unclosed
    /// block at end of input.
    fn block_items<T>(
        &mut self,
        mut item: impl FnMut(&mut Self) -> PResult<T>,
    ) -> PResult<Vec<T>> {
        self.expect(Tok::LBrace, "'{'")?;
        let mut items = Vec::new();
        loop {
            match self.peek() {
                Tok::RBrace => {
                    self.bump();
                    return Ok(items);
                }
                Tok::Eof => {
                    return self.error("unclosed block at end of input");
                }
                _ => match item(self) {
                    Ok(i) => items.push(i),
                    Err(()) => self.sync_item(),
                },
            }
        }
    }

    // ---- expressions ----

    fn expr(&mut self) -> PResult<Expr> {
        self.or_expr(0)
    }

    fn check_depth(&mut self, depth: u32) -> PResult<()> {
        if depth > MAX_EXPR_DEPTH {
            self.error("expression too deeply nested")
        } else {
            Ok(())
        }
    }

    fn or_expr(&mut self, depth: u32) -> PResult<Expr> {
        self.check_depth(depth)?;
        let mut lhs = self.and_expr(depth + 1)?;
        while self.at_kw(Kw::Or) {
            let span = self.span();
            self.bump();
            let rhs = self.and_expr(depth + 1)?;
            lhs = Expr {
                kind: ExprKind::Binary(BinOp::Or, Box::new(lhs), Box::new(rhs)),
                span,
            };
        }
        Ok(lhs)
    }

    fn and_expr(&mut self, depth: u32) -> PResult<Expr> {
        self.check_depth(depth)?;
        let mut lhs = self.not_expr(depth + 1)?;
        while self.at_kw(Kw::And) {
            let span = self.span();
            self.bump();
            let rhs = self.not_expr(depth + 1)?;
            lhs = Expr {
                kind: ExprKind::Binary(BinOp::And, Box::new(lhs), Box::new(rhs)),
                span,
            };
        }
        Ok(lhs)
    }

    fn not_expr(&mut self, depth: u32) -> PResult<Expr> {
        self.check_depth(depth)?;
        if self.at_kw(Kw::Not) {
            let span = self.span();
            self.bump();
            let inner = self.not_expr(depth + 1)?;
            return Ok(Expr {
                kind: ExprKind::Unary(UnOp::Not, Box::new(inner)),
                span,
            });
        }
        self.cmp_expr(depth + 1)
    }

    fn cmp_expr(&mut self, depth: u32) -> PResult<Expr> {
        self.check_depth(depth)?;
        let lhs = self.add_expr(depth + 1)?;
        let op = match self.peek() {
            Tok::EqEq => Some(BinOp::Eq),
            Tok::Ne => Some(BinOp::Ne),
            Tok::Le => Some(BinOp::Le),
            Tok::Ge => Some(BinOp::Ge),
            Tok::Lt => Some(BinOp::Lt),
            Tok::Gt => Some(BinOp::Gt),
            _ => None,
        };
        match op {
            None => Ok(lhs),
            Some(op) => {
                let span = self.span();
                self.bump();
                let rhs = self.add_expr(depth + 1)?;
                Ok(Expr {
                    kind: ExprKind::Binary(op, Box::new(lhs), Box::new(rhs)),
                    span,
                })
            }
        }
    }

    fn add_expr(&mut self, depth: u32) -> PResult<Expr> {
        self.check_depth(depth)?;
        let mut lhs = self.mul_expr(depth + 1)?;
        loop {
            let op = match self.peek() {
                Tok::Plus => BinOp::Add,
                Tok::Minus => BinOp::Sub,
                _ => break,
            };
            let span = self.span();
            self.bump();
            let rhs = self.mul_expr(depth + 1)?;
            lhs = Expr {
                kind: ExprKind::Binary(op, Box::new(lhs), Box::new(rhs)),
                span,
            };
        }
        Ok(lhs)
    }

    fn mul_expr(&mut self, depth: u32) -> PResult<Expr> {
        self.check_depth(depth)?;
        let mut lhs = self.neg_expr(depth + 1)?;
        while self.at(&Tok::Star) {
            let span = self.span();
            self.bump();
            let rhs = self.neg_expr(depth + 1)?;
            lhs = Expr {
                kind: ExprKind::Binary(BinOp::Mul, Box::new(lhs), Box::new(rhs)),
                span,
            };
        }
        Ok(lhs)
    }

    fn neg_expr(&mut self, depth: u32) -> PResult<Expr> {
        self.check_depth(depth)?;
        if self.at(&Tok::Minus) {
            let span = self.span();
            self.bump();
            let inner = self.neg_expr(depth + 1)?;
            return Ok(Expr {
                kind: ExprKind::Unary(UnOp::Neg, Box::new(inner)),
                span,
            });
        }
        self.primary(depth + 1)
    }

    fn primary(&mut self, depth: u32) -> PResult<Expr> {
        self.check_depth(depth)?;
        let span = self.span();
        match self.peek().clone() {
            Tok::Int(n) => {
                self.bump();
                Ok(Expr {
                    kind: ExprKind::Int(n),
                    span,
                })
            }
            Tok::Kw(Kw::True) => {
                self.bump();
                Ok(Expr {
                    kind: ExprKind::Bool(true),
                    span,
                })
            }
            Tok::Kw(Kw::False) => {
                self.bump();
                Ok(Expr {
                    kind: ExprKind::Bool(false),
                    span,
                })
            }
            Tok::Ident(name) => {
                self.bump();
                let full = if self.at(&Tok::Dot) {
                    self.bump();
                    let field = self.ident("a name after '.'")?;
                    format!("{name}.{field}")
                } else {
                    name
                };
                Ok(Expr {
                    kind: ExprKind::Ref(full),
                    span,
                })
            }
            Tok::LParen => {
                self.bump();
                let inner = self.or_expr(depth + 1)?;
                self.expect(Tok::RParen, "')'")?;
                Ok(inner)
            }
            _ => self.error("expected an expression"),
        }
    }

    // ---- statements ----

    fn stmt(&mut self) -> PResult<RawStmt> {
        let span = self.span();
        if self.eat_kw(Kw::Skip) {
            return Ok(RawStmt {
                kind: RawStmtKind::Skip,
                span,
            });
        }
        let name = self.ident("a statement")?;
        match self.peek() {
            Tok::ColonEq => {
                self.bump();
                let value = self.expr()?;
                Ok(RawStmt {
                    kind: RawStmtKind::Assign { var: name, value },
                    span,
                })
            }
            Tok::Dot => {
                self.bump();
                let msg = self.ident("a message name")?;
                self.expect(Tok::LParen, "'('")?;
                let mut args = Vec::new();
                if !self.at(&Tok::RParen) {
                    loop {
                        args.push(self.expr()?);
                        if !self.eat(&Tok::Comma) {
                            break;
                        }
                    }
                }
                self.expect(Tok::RParen, "')'")?;
                Ok(RawStmt {
                    kind: RawStmtKind::Send {
                        port: name,
                        name: msg,
                        args,
                    },
                    span,
                })
            }
            _ => Ok(RawStmt {
                kind: RawStmtKind::Call(name),
                span,
            }),
        }
    }

    /// `{ stmt; stmt; }` or a single statement.
    fn action_body(&mut self) -> PResult<Vec<RawStmt>> {
        if self.eat(&Tok::LBrace) {
            let mut stmts = Vec::new();
            while !self.at(&Tok::RBrace) {
                if self.at(&Tok::Eof) {
                    return self.error("unclosed action body at end of input");
                }
                stmts.push(self.stmt()?);
                self.expect(Tok::Semi, "';'")?;
            }
            self.bump();
            Ok(stmts)
        } else {
            Ok(vec![self.stmt()?])
        }
    }

    fn range(&mut self) -> PResult<Range> {
        let span = self.span();
        let lo = self.int()?;
        self.expect(Tok::DotDot, "'..'")?;
        let hi = self.int()?;
        Ok(Range { lo, hi, span })
    }

    fn ranges_parens(&mut self) -> PResult<Vec<Range>> {
        let mut ranges = Vec::new();
        if self.eat(&Tok::LParen) {
            if !self.at(&Tok::RParen) {
                loop {
                    ranges.push(self.range()?);
                    if !self.eat(&Tok::Comma) {
                        break;
                    }
                }
            }
            self.expect(Tok::RParen, "')'")?;
        }
        Ok(ranges)
    }

    // ---- env blocks ----

    fn env_block(&mut self) -> PResult<EnvBlock> {
        let span = self.span();
        self.expect_kw(Kw::Env)?;
        let name = self.ident("an environment name")?;
        let items = self.block_items(Self::env_item)?;
        Ok(EnvBlock { name, items, span })
    }

    fn env_item(&mut self) -> PResult<EnvItem> {
        let span = self.span();
        if self.eat_kw(Kw::Var) {
            let name = self.ident("a variable name")?;
            self.expect(Tok::Colon, "':'")?;
            let range = self.range()?;
            self.expect(Tok::Semi, "';'")?;
            return Ok(EnvItem::Var { name, range, span });
        }
        if self.eat_kw(Kw::Msg) {
            let port = self.ident("a port name")?;
            self.expect(Tok::Dot, "'.'")?;
            let name = self.ident("a message name")?;
            let ranges = self.ranges_parens()?;
            self.expect(Tok::Semi, "';'")?;
            return Ok(EnvItem::Msg {
                port,
                name,
                ranges,
                span,
            });
        }
        if self.eat_kw(Kw::Guard) {
            let name = if matches!(self.peek(), Tok::Ident(_)) && self.peek2() == &Tok::Eq {
                let n = self.ident("a guard name")?;
                self.bump(); // '='
                Some(n)
            } else {
                None
            };
            let expr = self.expr()?;
            self.expect(Tok::Semi, "';'")?;
            return Ok(EnvItem::Guard { name, expr, span });
        }
        if self.eat_kw(Kw::Action) {
            let name = if matches!(self.peek(), Tok::Ident(_)) && self.peek2() == &Tok::Eq {
                let n = self.ident("an action name")?;
                self.bump(); // '='
                Some(n)
            } else {
                None
            };
            let body = self.action_body()?;
            self.expect(Tok::Semi, "';'")?;
            return Ok(EnvItem::Action { name, body, span });
        }
        self.error("expected 'var', 'msg', 'guard', or 'action'")
    }

    // ---- machine blocks ----

    fn machine_block(&mut self) -> PResult<MachineBlock> {
        let span = self.span();
        self.expect_kw(Kw::Machine)?;
        let name = self.ident("a machine name")?;
        self.expect_kw(Kw::Over)?;
        let env = self.ident("an environment name")?;
        let items = self.block_items(Self::machine_item)?;
        Ok(MachineBlock {
            name,
            env,
            items,
            span,
        })
    }

    fn state_list(&mut self) -> PResult<Vec<String>> {
        let mut names = vec![self.ident("a state name")?];
        while self.eat(&Tok::Comma) {
            names.push(self.ident("a state name")?);
        }
        Ok(names)
    }

    fn event_params(&mut self) -> PResult<Vec<String>> {
        let mut params = Vec::new();
        if self.eat(&Tok::LParen) {
            if !self.at(&Tok::RParen) {
                loop {
                    params.push(self.ident("a parameter name")?);
                    if !self.eat(&Tok::Comma) {
                        break;
                    }
                }
            }
            self.expect(Tok::RParen, "')'")?;
        }
        Ok(params)
    }

    fn machine_item(&mut self) -> PResult<MachineItem> {
        let span = self.span();
        if self.eat_kw(Kw::Init) {
            let state = self.ident("a state name")?;
            let when = if self.eat_kw(Kw::When) {
                Some(self.expr()?)
            } else {
                None
            };
            self.expect(Tok::Semi, "';'")?;
            return Ok(MachineItem::Init { state, when, span });
        }
        if self.eat_kw(Kw::State) {
            let names = self.state_list()?;
            self.expect(Tok::Semi, "';'")?;
            return Ok(MachineItem::States { names, span });
        }
        if self.eat_kw(Kw::Event) {
            let name = self.ident("an event name")?;
            let ranges = self.ranges_parens()?;
            self.expect(Tok::Semi, "';'")?;
            return Ok(MachineItem::Event { name, ranges, span });
        }
        if self.eat_kw(Kw::On) {
            let trigger = if self.eat_kw(Kw::Complete) {
                Trigger::Complete
            } else {
                let name = self.ident("an event name or 'complete'")?;
                let params = self.event_params()?;
                Trigger::Event { name, params }
            };
            let when = if self.eat_kw(Kw::When) {
                Some(self.expr()?)
            } else {
                None
            };
            self.expect_kw(Kw::From)?;
            let from = self.ident("a state name")?;
            self.expect_kw(Kw::To)?;
            let to = self.ident("a state name")?;
            let action = if self.eat_kw(Kw::Do) {
                self.action_body()?
            } else {
                Vec::new()
            };
            self.expect(Tok::Semi, "';'")?;
            return Ok(MachineItem::Transition(TransitionItem {
                trigger,
                when,
                from,
                to,
                action,
                span,
            }));
        }
        self.error("expected 'init', 'state', 'event', or 'on'")
    }

    // ---- protocol blocks ----

    fn protocol_block(&mut self) -> PResult<ProtocolBlock> {
        let span = self.span();
        self.expect_kw(Kw::Protocol)?;
        let name = self.ident("a protocol name")?;
        self.expect_kw(Kw::Over)?;
        let env = self.ident("an environment name")?;
        let items = self.block_items(Self::protocol_item)?;
        Ok(ProtocolBlock {
            name,
            env,
            items,
            span,
        })
    }

    fn msg_lit(&mut self) -> PResult<MsgLit> {
        let span = self.span();
        let port = self.ident("a port name")?;
        self.expect(Tok::Dot, "'.'")?;
        let name = self.ident("a message name")?;
        self.expect(Tok::LParen, "'('")?;
        let mut args = Vec::new();
        if !self.at(&Tok::RParen) {
            loop {
                args.push(self.expr()?);
                if !self.eat(&Tok::Comma) {
                    break;
                }
            }
        }
        self.expect(Tok::RParen, "')'")?;
        Ok(MsgLit {
            port,
            name,
            args,
            span,
        })
    }

    fn protocol_item(&mut self) -> PResult<ProtocolItem> {
        let span = self.span();
        if self.eat_kw(Kw::Init) {
            let state = self.ident("a state name")?;
            self.expect(Tok::Semi, "';'")?;
            return Ok(ProtocolItem::Init { state, span });
        }
        if self.eat_kw(Kw::State) {
            let names = self.state_list()?;
            self.expect(Tok::Semi, "';'")?;
            return Ok(ProtocolItem::States { names, span });
        }
        if self.eat_kw(Kw::Event) {
            let name = self.ident("an event name")?;
            let ranges = self.ranges_parens()?;
            self.expect(Tok::Semi, "';'")?;
            return Ok(ProtocolItem::Event { name, ranges, span });
        }
        if self.eat_kw(Kw::On) {
            let event = self.ident("an event name")?;
            let params = self.event_params()?;
            self.expect_kw(Kw::From)?;
            let from = self.ident("a state name")?;
            self.expect_kw(Kw::To)?;
            let to = self.ident("a state name")?;
            let pre = if self.eat_kw(Kw::Pre) {
                Some(self.expr()?)
            } else {
                None
            };
            let post = if self.eat_kw(Kw::Post) {
                Some(self.expr()?)
            } else {
                None
            };
            let sends = if self.eat_kw(Kw::Sends) {
                self.expect(Tok::LBrace, "'{'")?;
                let mut msgs = Vec::new();
                if !self.at(&Tok::RBrace) {
                    loop {
                        msgs.push(self.msg_lit()?);
                        if !self.eat(&Tok::Comma) {
                            break;
                        }
                    }
                }
                self.expect(Tok::RBrace, "'}'")?;
                Some(msgs)
            } else {
                None
            };
            self.expect(Tok::Semi, "';'")?;
            return Ok(ProtocolItem::Transition(ProtocolTransition {
                event,
                params,
                from,
                to,
                pre,
                post,
                sends,
                span,
            }));
        }
        self.error("expected 'init', 'state', 'event', or 'on'")
    }

    // ---- system blocks ----

    fn system_block(&mut self) -> PResult<SystemBlock> {
        let span = self.span();
        self.expect_kw(Kw::System)?;
        let name = self.ident("a system name")?;
        let items = self.block_items(Self::system_item)?;
        Ok(SystemBlock { name, items, span })
    }

    fn port_ref(&mut self) -> PResult<PortRef> {
        let span = self.span();
        let instance = self.ident("an instance name")?;
        self.expect(Tok::Dot, "'.'")?;
        let port = self.ident("a port name")?;
        Ok(PortRef {
            instance,
            port,
            span,
        })
    }

    fn int_args(&mut self) -> PResult<Vec<i64>> {
        let mut args = Vec::new();
        if self.eat(&Tok::LParen) {
            if !self.at(&Tok::RParen) {
                loop {
                    args.push(self.int()?);
                    if !self.eat(&Tok::Comma) {
                        break;
                    }
                }
            }
            self.expect(Tok::RParen, "')'")?;
        }
        Ok(args)
    }

    fn stimulus(&mut self) -> PResult<StimulusItem> {
        let span = self.span();
        let instance = self.ident("an instance name")?;
        self.expect(Tok::Dot, "'.'")?;
        let event = self.ident("an event name")?;
        let args = self.int_args()?;
        Ok(StimulusItem {
            instance,
            event,
            args,
            span,
        })
    }

    fn stimuli_list(&mut self) -> PResult<Vec<StimulusItem>> {
        self.expect(Tok::LBracket, "'['")?;
        let mut items = Vec::new();
        if !self.at(&Tok::RBracket) {
            loop {
                items.push(self.stimulus()?);
                if !self.eat(&Tok::Semi) {
                    break;
                }
            }
        }
        self.expect(Tok::RBracket, "']'")?;
        Ok(items)
    }

    fn opt_stimuli(&mut self) -> PResult<Option<Vec<StimulusItem>>> {
        if self.eat_kw(Kw::Stimuli) {
            Ok(Some(self.stimuli_list()?))
        } else {
            Ok(None)
        }
    }

    fn msg_pattern(&mut self) -> PResult<MsgPattern> {
        let span = self.span();
        let instance = self.ident("an instance name")?;
        self.expect(Tok::Dot, "'.'")?;
        let port = self.ident("a port name")?;
        self.expect(Tok::Dot, "'.'")?;
        let name = self.ident("a message name")?;
        let args = if self.at(&Tok::LParen) {
            Some(self.int_args()?)
        } else {
            None
        };
        Ok(MsgPattern {
            instance,
            port,
            name,
            args,
            span,
        })
    }

    fn mode(&mut self) -> PResult<Mode> {
        if self.eat_kw(Kw::Strict) {
            Ok(Mode::Strict)
        } else if self.eat_kw(Kw::Loose) {
            Ok(Mode::Loose)
        } else {
            self.error("expected 'strict' or 'loose'")
        }
    }

    fn env_sentence(&mut self) -> PResult<EnvSentenceItem> {
        let span = self.span();
        let pre = self.expr()?;
        self.expect(Tok::Arrow, "'->'")?;
        self.expect(Tok::LBracket, "'['")?;
        let mut action = Vec::new();
        if !self.at(&Tok::RBracket) {
            loop {
                action.push(self.stmt()?);
                if !self.eat(&Tok::Semi) {
                    break;
                }
            }
        }
        self.expect(Tok::RBracket, "']'")?;
        let emits = if self.eat_kw(Kw::Emits) {
            self.expect(Tok::LBrace, "'{'")?;
            let mut msgs = Vec::new();
            if !self.at(&Tok::RBrace) {
                loop {
                    msgs.push(self.msg_lit()?);
                    if !self.eat(&Tok::Comma) {
                        break;
                    }
                }
            }
            self.expect(Tok::RBrace, "'}'")?;
            msgs
        } else {
            Vec::new()
        };
        self.expect(Tok::Rhd, "'|>'")?;
        let post = self.expr()?;
        Ok(EnvSentenceItem {
            pre,
            action,
            emits,
            post,
            span,
        })
    }

    fn check_item(&mut self) -> PResult<CheckItem> {
        let span = self.prev_span();
        if self.eat_kw(Kw::Invariant) {
            let expr = self.expr()?;
            let stimuli = self.opt_stimuli()?;
            self.expect(Tok::Semi, "';'")?;
            return Ok(CheckItem::Invariant { expr, stimuli, span });
        }
        if self.eat_kw(Kw::Prepost) {
            let instance = self.ident("an instance name")?;
            self.expect(Tok::Dot, "'.'")?;
            let event = self.ident("an event name")?;
            let params = self.event_params()?;
            self.expect_kw(Kw::Pre)?;
            let pre = self.expr()?;
            self.expect_kw(Kw::Post)?;
            let post = self.expr()?;
            let stimuli = self.opt_stimuli()?;
            self.expect(Tok::Semi, "';'")?;
            return Ok(CheckItem::PrePost {
                instance,
                event,
                params,
                pre,
                post,
                stimuli,
                span,
            });
        }
        if self.eat_kw(Kw::Connector) {
            let a = self.port_ref()?;
            self.expect(Tok::DashDash, "'--'")?;
            let b = self.port_ref()?;
            let stimuli = self.opt_stimuli()?;
            self.expect(Tok::Semi, "';'")?;
            return Ok(CheckItem::Connector { a, b, stimuli, span });
        }
        if self.eat_kw(Kw::Interaction) {
            let mode = self.mode()?;
            self.expect(Tok::LBracket, "'['")?;
            let mut sequence = Vec::new();
            if !self.at(&Tok::RBracket) {
                loop {
                    sequence.push(self.msg_pattern()?);
                    if !self.eat(&Tok::Semi) {
                        break;
                    }
                }
            }
            self.expect(Tok::RBracket, "']'")?;
            let stimuli = self.opt_stimuli()?;
            self.expect(Tok::Semi, "';'")?;
            return Ok(CheckItem::Interaction {
                mode,
                sequence,
                stimuli,
                span,
            });
        }
        if self.eat_kw(Kw::Chain) {
            let mode = self.mode()?;
            self.expect_kw(Kw::In)?;
            let env = self.ident("an environment name")?;
            self.expect(Tok::LBrace, "'{'")?;
            let mut sentences = Vec::new();
            while !self.at(&Tok::RBrace) {
                if self.at(&Tok::Eof) {
                    return self.error("unclosed chain at end of input");
                }
                sentences.push(self.env_sentence()?);
                self.expect(Tok::Semi, "';'")?;
            }
            self.bump();
            self.expect(Tok::Semi, "';'")?;
            return Ok(CheckItem::Chain {
                mode,
                env,
                sentences,
                span,
            });
        }
        self.error("expected 'invariant', 'prepost', 'connector', 'interaction', or 'chain'")
    }

    fn system_item(&mut self) -> PResult<SystemItem> {
        let span = self.span();
        if self.eat_kw(Kw::Inst) {
            let name = self.ident("an instance name")?;
            self.expect(Tok::Colon, "':'")?;
            let machine = self.ident("a machine or protocol name")?;
            self.expect(Tok::Semi, "';'")?;
            return Ok(SystemItem::Inst {
                name,
                machine,
                span,
            });
        }
        if self.eat_kw(Kw::Connect) {
            let a = self.port_ref()?;
            self.expect(Tok::DashDash, "'--'")?;
            let b = self.port_ref()?;
            let mut monitors = Vec::new();
            if self.eat_kw(Kw::Monitored) {
                self.expect_kw(Kw::By)?;
                loop {
                    monitors.push(self.ident("a protocol name")?);
                    if !self.eat(&Tok::Comma) {
                        break;
                    }
                }
            }
            self.expect(Tok::Semi, "';'")?;
            return Ok(SystemItem::Connect {
                a,
                b,
                monitors,
                span,
            });
        }
        if self.eat_kw(Kw::External) {
            let p = self.port_ref()?;
            self.expect(Tok::Semi, "';'")?;
            return Ok(SystemItem::External(p));
        }
        if self.eat_kw(Kw::Stimuli) {
            let items = self.stimuli_list()?;
            self.expect(Tok::Semi, "';'")?;
            return Ok(SystemItem::Stimuli { items, span });
        }
        if self.eat_kw(Kw::Check) {
            return Ok(SystemItem::Check(self.check_item()?));
        }
        self.error("expected 'inst', 'connect', 'external', 'stimuli', or 'check'")
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn empty_input_is_an_empty_model() {
        let m = parse_model("").unwrap();
        assert!(m.is_empty());
        let m = parse_model("  // just a comment\n").unwrap();
        assert!(m.is_empty());
    }

    #[test]
    fn unclosed_block_reports_end_of_input() {
        let err = parse_model("machine M over E {").unwrap_err();
        assert_eq!(err.len(), 1);
        assert!(err[0].message.contains("unclosed block"));
    }

    #[test]
    fn recovery_collects_multiple_diagnostics() {
        let err = parse_model(
            "env A { var x: ; var y: 0..1; guard ; }\nmachine M over A { init ; }",
        )
        .unwrap_err();
        assert!(err.len() >= 3);
    }

    #[test]
    fn parses_a_full_model() {
        let text = r#"
env E {
  var x: 0..3;
  msg p.ping(0..1);
  guard low = x < 2;
  guard x == 0;
  action bump = x := x + 1;
  action { p.ping(1); x := 0; };
}

machine M over E {
  init A when x == 0;
  state A, B;
  event go(0..1);
  on go(v) when low from A to B do x := v;
  on complete from B to A;
}

protocol P over E {
  init A;
  state A;
  event go(0..1);
  on go(v) from A to A pre x == 0 sends { p.ping(0) };
}

system S {
  inst m: M;
  external m.p;
  stimuli [m.go(1); m.go(0)];
  check invariant x <= 3;
  check interaction loose [m.p.ping; m.p.ping(1)];
  check chain strict in E {
    true -> [x := 0] |> x == 0;
    x == 0 -> [bump] emits { p.ping(0) } |> x == 1;
  };
}
"#;
        let m = parse_model(text).unwrap();
        assert_eq!(m.items.len(), 4);
        let Item::Machine(mb) = &m.items[1] else {
            panic!("expected machine")
        };
        assert_eq!(mb.items.len(), 5);
    }

    #[test]
    fn deep_nesting_is_rejected_not_crashed() {
        let mut text = String::from("env E { guard ");
        for _ in 0..5000 {
            text.push('(');
        }
        text.push_str("true");
        for _ in 0..5000 {
            text.push(')');
        }
        text.push_str("; }");
        let err = parse_model(&text).unwrap_err();
        assert!(err.iter().any(|d| d.message.contains("deeply nested")));
    }
}
