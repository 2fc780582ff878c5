//! Lexer for the model language. Total on arbitrary input: unknown bytes and
//! malformed literals become diagnostics, never panics.

use super::ast::{Diagnostic, Span};

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Tok {
    Ident(String),
    Kw(Kw),
    Int(i64),
    LBrace,
    RBrace,
    LParen,
    RParen,
    LBracket,
    RBracket,
    Semi,
    Comma,
    Dot,
    DotDot,
    Colon,
    ColonEq,
    EqEq,
    Ne,
    Le,
    Ge,
    Lt,
    Gt,
    Eq,
    Plus,
    Minus,
    Star,
    Arrow,
    Rhd,
    DashDash,
    Eof,
}

macro_rules! keywords {
    ($($variant:ident => $text:literal),* $(,)?) => {
        /// Reserved words; they cannot be used as identifiers.
        #[derive(Clone, Copy, Debug, PartialEq, Eq)]
        pub enum Kw {
            $($variant),*
        }

        impl Kw {
            pub fn text(self) -> &'static str {
                match self {
                    $(Kw::$variant => $text),*
                }
            }

            fn from_text(s: &str) -> Option<Kw> {
                match s {
                    $($text => Some(Kw::$variant),)*
                    _ => None,
                }
            }
        }
    };
}

keywords! {
    Env => "env",
    Var => "var",
    Msg => "msg",
    Guard => "guard",
    Action => "action",
    Skip => "skip",
    Machine => "machine",
    Over => "over",
    Init => "init",
    State => "state",
    Event => "event",
    On => "on",
    Complete => "complete",
    When => "when",
    From => "from",
    To => "to",
    Do => "do",
    Protocol => "protocol",
    Pre => "pre",
    Post => "post",
    Sends => "sends",
    System => "system",
    Inst => "inst",
    Connect => "connect",
    External => "external",
    Monitored => "monitored",
    By => "by",
    Stimuli => "stimuli",
    Check => "check",
    Invariant => "invariant",
    Prepost => "prepost",
    Connector => "connector",
    Interaction => "interaction",
    Strict => "strict",
    Loose => "loose",
    Chain => "chain",
    In => "in",
    Emits => "emits",
    And => "and",
    Or => "or",
    Not => "not",
    True => "true",
    False => "false",
}

#[derive(Clone, Debug)]
pub struct Token {
    pub tok: Tok,
    pub span: Span,
}

pub fn lex(input: &str) -> (Vec<Token>, Vec<Diagnostic>) {
    let mut tokens = Vec::new();
    let mut diags = Vec::new();
    let bytes = input.as_bytes();
    let mut i = 0usize;
    let mut line = 1u32;
    let mut col = 1u32;

    macro_rules! push {
        ($tok:expr, $len:expr) => {{
            tokens.push(Token {
                tok: $tok,
                span: Span {
                    line,
                    col,
                    len: $len,
                },
            });
            i += $len as usize;
            col += $len;
        }};
    }

    while i < bytes.len() {
        let c = bytes[i];
        match c {
            b'\n' => {
                i += 1;
                line += 1;
                col = 1;
            }
            b' ' | b'\t' | b'\r' => {
                i += 1;
                col += 1;
            }
            b'/' if bytes.get(i + 1) == Some(&b'/') => {
                while i < bytes.len() && bytes[i] != b'\n' {
                    i += 1;
                    col += 1;
                }
            }
            b'{' => push!(Tok::LBrace, 1),
            b'}' => push!(Tok::RBrace, 1),
            b'(' => push!(Tok::LParen, 1),
            b')' => push!(Tok::RParen, 1),
            b'[' => push!(Tok::LBracket, 1),
            b']' => push!(Tok::RBracket, 1),
            b';' => push!(Tok::Semi, 1),
            b',' => push!(Tok::Comma, 1),
            b'+' => push!(Tok::Plus, 1),
            b'*' => push!(Tok::Star, 1),
            b'.' if bytes.get(i + 1) == Some(&b'.') => push!(Tok::DotDot, 2),
            b'.' => push!(Tok::Dot, 1),
            b':' if bytes.get(i + 1) == Some(&b'=') => push!(Tok::ColonEq, 2),
            b':' => push!(Tok::Colon, 1),
            b'=' if bytes.get(i + 1) == Some(&b'=') => push!(Tok::EqEq, 2),
            b'=' => push!(Tok::Eq, 1),
            b'!' if bytes.get(i + 1) == Some(&b'=') => push!(Tok::Ne, 2),
            b'<' if bytes.get(i + 1) == Some(&b'=') => push!(Tok::Le, 2),
            b'<' => push!(Tok::Lt, 1),
            b'>' if bytes.get(i + 1) == Some(&b'=') => push!(Tok::Ge, 2),
            b'>' => push!(Tok::Gt, 1),
            b'-' if bytes.get(i + 1) == Some(&b'>') => push!(Tok::Arrow, 2),
            b'-' if bytes.get(i + 1) == Some(&b'-') => push!(Tok::DashDash, 2),
            b'-' => push!(Tok::Minus, 1),
            b'|' if bytes.get(i + 1) == Some(&b'>') => push!(Tok::Rhd, 2),
            b'0'..=b'9' => {
                let start = i;
                while i < bytes.len() && bytes[i].is_ascii_digit() {
                    i += 1;
                }
                let text = &input[start..i];
                let len = (i - start) as u32;
                match text.parse::<i64>() {
                    Ok(n) => tokens.push(Token {
                        tok: Tok::Int(n),
                        span: Span { line, col, len },
                    }),
                    Err(_) => diags.push(Diagnostic::error(
                        format!("integer literal '{text}' out of range"),
                        Span { line, col, len },
                    )),
                }
                col += len;
            }
            b'a'..=b'z' | b'A'..=b'Z' | b'_' => {
                let start = i;
                while i < bytes.len()
                    && (bytes[i].is_ascii_alphanumeric() || bytes[i] == b'_')
                {
                    i += 1;
                }
                let text = &input[start..i];
                let len = (i - start) as u32;
                let tok = match Kw::from_text(text) {
                    Some(kw) => Tok::Kw(kw),
                    None => Tok::Ident(text.to_string()),
                };
                tokens.push(Token {
                    tok,
                    span: Span { line, col, len },
                });
                col += len;
            }
            _ => {
                // Skip one (possibly multi-byte) character and report it.
                let ch_len = input[i..]
                    .chars()
                    .next()
                    .map(|c| c.len_utf8())
                    .unwrap_or(1);
                diags.push(Diagnostic::error(
                    format!("unexpected character '{}'", &input[i..i + ch_len]),
                    Span { line, col, len: 1 },
                ));
                i += ch_len;
                col += 1;
            }
        }
    }
    tokens.push(Token {
        tok: Tok::Eof,
        span: Span { line, col, len: 0 },
    });
    (tokens, diags)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn lexes_operators_and_words() {
        let (toks, diags) = lex("on card(c) when trialsNum < 2 from A to B do x := 1; // c\n|> ->");
        assert!(diags.is_empty());
        let kinds: Vec<&Tok> = toks.iter().map(|t| &t.tok).collect();
        assert!(matches!(kinds[0], Tok::Kw(Kw::On)));
        assert!(matches!(kinds[1], Tok::Ident(name) if name == "card"));
        assert!(kinds.contains(&&Tok::ColonEq));
        assert!(kinds.contains(&&Tok::Rhd));
        assert!(kinds.contains(&&Tok::Arrow));
        assert_eq!(kinds.last(), Some(&&Tok::Eof));
    }

    #[test]
    fn reports_bad_bytes_and_huge_literals() {
        let (_, diags) = lex("§ 99999999999999999999999999");
        assert_eq!(diags.len(), 2);
        assert!(diags[1].message.contains("out of range"));
    }

    #[test]
    fn spans_track_lines_and_columns() {
        let (toks, _) = lex("env A {\n  var x: 0..3;\n}");
        let var = toks
            .iter()
            .find(|t| matches!(&t.tok, Tok::Kw(Kw::Var)))
            .unwrap();
        assert_eq!((var.span.line, var.span.col), (2, 3));
    }
}
