//! Canonical printer. `parse(print(m))` reproduces `m` structurally:
//! parenthesization is minimal for the precedence table, with right operands
//! kept parenthesized at equal precedence so tree shapes survive the round
//! trip.

use std::fmt::Write;

use super::ast::*;

fn level(e: &Expr) -> u8 {
    match &e.kind {
        ExprKind::Binary(BinOp::Or, ..) => 1,
        ExprKind::Binary(BinOp::And, ..) => 2,
        ExprKind::Unary(UnOp::Not, _) => 3,
        ExprKind::Binary(
            BinOp::Eq | BinOp::Ne | BinOp::Lt | BinOp::Le | BinOp::Gt | BinOp::Ge,
            ..,
        ) => 4,
        ExprKind::Binary(BinOp::Add | BinOp::Sub, ..) => 5,
        ExprKind::Binary(BinOp::Mul, ..) => 6,
        ExprKind::Unary(UnOp::Neg, _) => 7,
        ExprKind::Int(_) | ExprKind::Bool(_) | ExprKind::Ref(_) => 8,
    }
}

fn binop_symbol(op: BinOp) -> &'static str {
    match op {
        BinOp::Add => "+",
        BinOp::Sub => "-",
        BinOp::Mul => "*",
        BinOp::Eq => "==",
        BinOp::Ne => "!=",
        BinOp::Lt => "<",
        BinOp::Le => "<=",
        BinOp::Gt => ">",
        BinOp::Ge => ">=",
        BinOp::And => "and",
        BinOp::Or => "or",
    }
}

fn write_expr(out: &mut String, e: &Expr, min: u8) {
    let lvl = level(e);
    if lvl < min {
        out.push('(');
    }
    match &e.kind {
        ExprKind::Int(n) => {
            let _ = write!(out, "{n}");
        }
        ExprKind::Bool(true) => out.push_str("true"),
        ExprKind::Bool(false) => out.push_str("false"),
        ExprKind::Ref(name) => out.push_str(name),
        ExprKind::Unary(UnOp::Not, x) => {
            out.push_str("not ");
            write_expr(out, x, 3);
        }
        ExprKind::Unary(UnOp::Neg, x) => {
            out.push('-');
            write_expr(out, x, 8);
        }
        ExprKind::Binary(op, l, r) => {
            // Comparisons are non-associative in the grammar, so a comparison
            // operand of a comparison needs parentheses on either side.
            let left_min = match op {
                BinOp::Eq | BinOp::Ne | BinOp::Lt | BinOp::Le | BinOp::Gt | BinOp::Ge => lvl + 1,
                _ => lvl,
            };
            write_expr(out, l, left_min);
            let _ = write!(out, " {} ", binop_symbol(*op));
            write_expr(out, r, lvl + 1);
        }
    }
    if lvl < min {
        out.push(')');
    }
}

/// Canonical text of an expression.
pub fn expr_text(e: &Expr) -> String {
    let mut out = String::new();
    write_expr(&mut out, e, 0);
    out
}

fn stmt_text(s: &RawStmt) -> String {
    match &s.kind {
        RawStmtKind::Skip => "skip".to_string(),
        RawStmtKind::Call(name) => name.clone(),
        RawStmtKind::Assign { var, value } => format!("{var} := {}", expr_text(value)),
        RawStmtKind::Send { port, name, args } => {
            let args: Vec<String> = args.iter().map(expr_text).collect();
            format!("{port}.{name}({})", args.join(", "))
        }
    }
}

/// Canonical text of an action body: a single statement stays bare, anything
/// else is braced.
pub fn body_text(body: &[RawStmt]) -> String {
    match body {
        [single] => stmt_text(single),
        _ => {
            let mut out = String::from("{ ");
            for s in body {
                out.push_str(&stmt_text(s));
                out.push_str("; ");
            }
            out.push('}');
            out
        }
    }
}

fn range_text(r: &Range) -> String {
    format!("{}..{}", r.lo, r.hi)
}

fn ranges_text(ranges: &[Range]) -> String {
    let parts: Vec<String> = ranges.iter().map(range_text).collect();
    format!("({})", parts.join(", "))
}

fn msg_lit_text(m: &MsgLit) -> String {
    let args: Vec<String> = m.args.iter().map(expr_text).collect();
    format!("{}.{}({})", m.port, m.name, args.join(", "))
}

fn stimulus_text(s: &StimulusItem) -> String {
    if s.args.is_empty() {
        format!("{}.{}", s.instance, s.event)
    } else {
        let args: Vec<String> = s.args.iter().map(|a| a.to_string()).collect();
        format!("{}.{}({})", s.instance, s.event, args.join(", "))
    }
}

fn pattern_text(p: &MsgPattern) -> String {
    match &p.args {
        None => format!("{}.{}.{}", p.instance, p.port, p.name),
        Some(args) => {
            let args: Vec<String> = args.iter().map(|a| a.to_string()).collect();
            format!("{}.{}.{}({})", p.instance, p.port, p.name, args.join(", "))
        }
    }
}

fn stimuli_text(items: &[StimulusItem]) -> String {
    let parts: Vec<String> = items.iter().map(stimulus_text).collect();
    format!("[{}]", parts.join("; "))
}

fn opt_stimuli_text(st: &Option<Vec<StimulusItem>>) -> String {
    match st {
        None => String::new(),
        Some(items) => format!(" stimuli {}", stimuli_text(items)),
    }
}

fn mode_text(m: Mode) -> &'static str {
    match m {
        Mode::Strict => "strict",
        Mode::Loose => "loose",
    }
}

fn sentence_text(s: &EnvSentenceItem) -> String {
    let stmts: Vec<String> = s.action.iter().map(stmt_text).collect();
    let emits = if s.emits.is_empty() {
        String::new()
    } else {
        let parts: Vec<String> = s.emits.iter().map(msg_lit_text).collect();
        format!(" emits {{ {} }}", parts.join(", "))
    };
    format!(
        "{} -> [{}]{} |> {}",
        expr_text(&s.pre),
        stmts.join("; "),
        emits,
        expr_text(&s.post)
    )
}

fn check_text(c: &CheckItem) -> String {
    match c {
        CheckItem::Invariant { expr, stimuli, .. } => format!(
            "check invariant {}{};",
            expr_text(expr),
            opt_stimuli_text(stimuli)
        ),
        CheckItem::PrePost {
            instance,
            event,
            params,
            pre,
            post,
            stimuli,
            ..
        } => {
            let params = if params.is_empty() {
                String::new()
            } else {
                format!("({})", params.join(", "))
            };
            format!(
                "check prepost {instance}.{event}{params} pre {} post {}{};",
                expr_text(pre),
                expr_text(post),
                opt_stimuli_text(stimuli)
            )
        }
        CheckItem::Connector { a, b, stimuli, .. } => format!(
            "check connector {}.{} -- {}.{}{};",
            a.instance,
            a.port,
            b.instance,
            b.port,
            opt_stimuli_text(stimuli)
        ),
        CheckItem::Interaction {
            mode,
            sequence,
            stimuli,
            ..
        } => {
            let parts: Vec<String> = sequence.iter().map(pattern_text).collect();
            format!(
                "check interaction {} [{}]{};",
                mode_text(*mode),
                parts.join("; "),
                opt_stimuli_text(stimuli)
            )
        }
        CheckItem::Chain {
            mode,
            env,
            sentences,
            ..
        } => {
            let mut out = format!("check chain {} in {env} {{\n", mode_text(*mode));
            for s in sentences {
                let _ = writeln!(out, "    {};", sentence_text(s));
            }
            out.push_str("  };");
            out
        }
    }
}

/// Prints a model in canonical form. Printing a parsed canonical file is the
/// identity, and `parse(print(m))` equals `m` up to spans.
pub fn print_model(m: &ModelFile) -> String {
    let mut out = String::new();
    for (index, item) in m.items.iter().enumerate() {
        if index > 0 {
            out.push('\n');
        }
        match item {
            Item::Env(b) => {
                let _ = writeln!(out, "env {} {{", b.name);
                for i in &b.items {
                    let line = match i {
                        EnvItem::Var { name, range, .. } => {
                            format!("var {name}: {};", range_text(range))
                        }
                        EnvItem::Msg {
                            port, name, ranges, ..
                        } => format!("msg {port}.{name}{};", ranges_text(ranges)),
                        EnvItem::Guard { name, expr, .. } => match name {
                            Some(n) => format!("guard {n} = {};", expr_text(expr)),
                            None => format!("guard {};", expr_text(expr)),
                        },
                        EnvItem::Action { name, body, .. } => match name {
                            Some(n) => format!("action {n} = {};", body_text(body)),
                            None => format!("action {};", body_text(body)),
                        },
                    };
                    let _ = writeln!(out, "  {line}");
                }
                out.push_str("}\n");
            }
            Item::Machine(b) => {
                let _ = writeln!(out, "machine {} over {} {{", b.name, b.env);
                for i in &b.items {
                    let line = match i {
                        MachineItem::Init { state, when, .. } => match when {
                            Some(w) => format!("init {state} when {};", expr_text(w)),
                            None => format!("init {state};"),
                        },
                        MachineItem::States { names, .. } => {
                            format!("state {};", names.join(", "))
                        }
                        MachineItem::Event { name, ranges, .. } => {
                            if ranges.is_empty() {
                                format!("event {name};")
                            } else {
                                format!("event {name}{};", ranges_text(ranges))
                            }
                        }
                        MachineItem::Transition(t) => {
                            let trigger = match &t.trigger {
                                Trigger::Complete => "complete".to_string(),
                                Trigger::Event { name, params } => {
                                    if params.is_empty() {
                                        name.clone()
                                    } else {
                                        format!("{name}({})", params.join(", "))
                                    }
                                }
                            };
                            let when = match &t.when {
                                Some(w) => format!(" when {}", expr_text(w)),
                                None => String::new(),
                            };
                            let action = if t.action.is_empty() {
                                String::new()
                            } else {
                                format!(" do {}", body_text(&t.action))
                            };
                            format!(
                                "on {trigger}{when} from {} to {}{action};",
                                t.from, t.to
                            )
                        }
                    };
                    let _ = writeln!(out, "  {line}");
                }
                out.push_str("}\n");
            }
            Item::Protocol(b) => {
                let _ = writeln!(out, "protocol {} over {} {{", b.name, b.env);
                for i in &b.items {
                    let line = match i {
                        ProtocolItem::Init { state, .. } => format!("init {state};"),
                        ProtocolItem::States { names, .. } => {
                            format!("state {};", names.join(", "))
                        }
                        ProtocolItem::Event { name, ranges, .. } => {
                            if ranges.is_empty() {
                                format!("event {name};")
                            } else {
                                format!("event {name}{};", ranges_text(ranges))
                            }
                        }
                        ProtocolItem::Transition(t) => {
                            let trigger = if t.params.is_empty() {
                                t.event.clone()
                            } else {
                                format!("{}({})", t.event, t.params.join(", "))
                            };
                            let pre = match &t.pre {
                                Some(p) => format!(" pre {}", expr_text(p)),
                                None => String::new(),
                            };
                            let post = match &t.post {
                                Some(p) => format!(" post {}", expr_text(p)),
                                None => String::new(),
                            };
                            let sends = match &t.sends {
                                None => String::new(),
                                Some(msgs) if msgs.is_empty() => " sends { }".to_string(),
                                Some(msgs) => {
                                    let parts: Vec<String> =
                                        msgs.iter().map(msg_lit_text).collect();
                                    format!(" sends {{ {} }}", parts.join(", "))
                                }
                            };
                            format!(
                                "on {trigger} from {} to {}{pre}{post}{sends};",
                                t.from, t.to
                            )
                        }
                    };
                    let _ = writeln!(out, "  {line}");
                }
                out.push_str("}\n");
            }
            Item::System(b) => {
                let _ = writeln!(out, "system {} {{", b.name);
                for i in &b.items {
                    let line = match i {
                        SystemItem::Inst { name, machine, .. } => {
                            format!("inst {name}: {machine};")
                        }
                        SystemItem::Connect { a, b, monitors, .. } => {
                            let mon = if monitors.is_empty() {
                                String::new()
                            } else {
                                format!(" monitored by {}", monitors.join(", "))
                            };
                            format!(
                                "connect {}.{} -- {}.{}{mon};",
                                a.instance, a.port, b.instance, b.port
                            )
                        }
                        SystemItem::External(p) => {
                            format!("external {}.{};", p.instance, p.port)
                        }
                        SystemItem::Stimuli { items, .. } => {
                            format!("stimuli {};", stimuli_text(items))
                        }
                        SystemItem::Check(c) => check_text(c),
                    };
                    let _ = writeln!(out, "  {line}");
                }
                out.push_str("}\n");
            }
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::super::parse::parse_model;
    use super::*;

    #[test]
    fn empty_model_prints_empty_text() {
        assert_eq!(print_model(&ModelFile::default()), "");
    }

    #[test]
    fn print_parse_is_structurally_identity() {
        let text = r#"
env E {
  var x: 0..3;
  msg p.ping();
  guard low = x < 2 and not (x == 0 or x == 3);
  action { p.ping(); x := (x + 1) * 2; };
}

machine M over E {
  init A when x == 0;
  state A, B;
  event go(0..1);
  on go(v) when low from A to B do x := v;
  on complete from B to A;
}

system S {
  inst m: M;
  external m.p;
  stimuli [m.go(1)];
  check invariant x <= 3;
  check chain loose in E {
    true -> [x := 0] |> x == 0;
    x == 0 -> [skip] |> true;
  };
}
"#;
        let m = parse_model(text).unwrap();
        let printed = print_model(&m);
        let reparsed = parse_model(&printed).unwrap();
        assert_eq!(m.stripped(), reparsed.stripped());
        // Printing is a fixpoint after one pass.
        assert_eq!(printed, print_model(&reparsed));
    }

    #[test]
    fn tricky_expression_shapes_round_trip() {
        for text in [
            "env E { guard 1 + (2 + 3) == 6; }",
            "env E { guard -(-1) < - 2 * 3; }",
            "env E { guard not not true; }",
            "env E { guard (true or false) and false; }",
            "env E { guard (1 == 2) == 3; }",
        ] {
            let m = parse_model(text).unwrap();
            let printed = print_model(&m);
            let reparsed = parse_model(&printed)
                .unwrap_or_else(|e| panic!("reparse failed for {printed:?}: {e:?}"));
            assert_eq!(m.stripped(), reparsed.stripped(), "for input {text:?}");
        }
    }
}
