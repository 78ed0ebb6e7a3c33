use super::{Diagnostic, DiagnosticCode, SourceSpan};

#[derive(Debug, Clone, PartialEq, Eq)]
pub(super) enum Tok {
    Name(String),
    Question,
    Star,
    /// `--`
    Dash,
    /// `-->`
    Arrow,
    LBrace,
    RBrace,
    LBracket,
    RBracket,
    Colon,
    Semi,
    Comma,
    Eof,
}

impl Tok {
    pub(super) fn describe(&self) -> String {
        match self {
            Tok::Name(n) => format!("`{n}`"),
            Tok::Eof => "end of input".into(),
            other => format!("`{}`", other.text()),
        }
    }

    pub(super) fn text(&self) -> &str {
        match self {
            Tok::Name(n) => n,
            Tok::Question => "?",
            Tok::Star => "*",
            Tok::Dash => "--",
            Tok::Arrow => "-->",
            Tok::LBrace => "{",
            Tok::RBrace => "}",
            Tok::LBracket => "[",
            Tok::RBracket => "]",
            Tok::Colon => ":",
            Tok::Semi => ";",
            Tok::Comma => ",",
            Tok::Eof => "",
        }
    }
}

#[derive(Debug, Clone)]
pub(super) struct Token {
    pub tok: Tok,
    pub span: SourceSpan,
}

fn is_name_char(c: char) -> bool {
    c.is_ascii_alphanumeric() || c == '_'
}

/// Splits `text` into tokens. Stops at the first unexpected character.
pub(super) fn lex(text: &str) -> Result<Vec<Token>, Diagnostic> {
    let mut out = Vec::new();
    let mut line = 1;
    let mut line_start = 0;
    let mut chars = text.char_indices().peekable();
    while let Some(&(i, c)) = chars.peek() {
        let column = text[line_start..i].chars().count() + 1;
        let span = |len: usize| SourceSpan {
            line,
            column,
            offset: i,
            len,
        };
        if c == '\n' {
            chars.next();
            line += 1;
            line_start = i + 1;
            continue;
        }
        if c.is_whitespace() {
            chars.next();
            continue;
        }
        if c == '#' {
            while chars.peek().is_some_and(|&(_, c)| c != '\n') {
                chars.next();
            }
            continue;
        }
        if is_name_char(c) {
            let end = text[i..]
                .find(|c: char| !is_name_char(c))
                .map_or(text.len(), |n| i + n);
            out.push(Token {
                tok: Tok::Name(text[i..end].to_string()),
                span: span(end - i),
            });
            while chars.peek().is_some_and(|&(j, _)| j < end) {
                chars.next();
            }
            continue;
        }
        let rest = &text[i..];
        let (tok, len) = if rest.starts_with("-->") {
            (Tok::Arrow, 3)
        } else if rest.starts_with("--") {
            (Tok::Dash, 2)
        } else {
            let t = match c {
                '?' => Tok::Question,
                '*' => Tok::Star,
                '{' => Tok::LBrace,
                '}' => Tok::RBrace,
                '[' => Tok::LBracket,
                ']' => Tok::RBracket,
                ':' => Tok::Colon,
                ';' => Tok::Semi,
                ',' => Tok::Comma,
                _ => {
                    return Err(Diagnostic::new(
                        DiagnosticCode::Syntax,
                        span(c.len_utf8()),
                        format!("unexpected character `{c}`"),
                    )
                    .with_help("names use letters, digits and `_`; edges are written `a --sym--> b;`"));
                }
            };
            (t, 1)
        };
        out.push(Token { tok, span: span(len) });
        for _ in 0..len {
            chars.next();
        }
    }
    let column = text[line_start..].chars().count() + 1;
    out.push(Token {
        tok: Tok::Eof,
        span: SourceSpan {
            line,
            column,
            offset: text.len(),
            len: 0,
        },
    });
    Ok(out)
}
