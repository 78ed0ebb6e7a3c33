//! Recursive descent with one token of lookahead.

use super::lexer::{lex, Tok, Token};
use super::{
    Decl, Diagnostic, DiagnosticCode, Document, Edge, EdgeSymbol, Ident, MethodDecl, ProblemDecl,
    SourceSpan, StateDecl,
};

/// Parses a document. On failure returns every syntax diagnostic found,
/// recovering at declaration boundaries.
pub fn parse(text: &str) -> Result<Document, Vec<Diagnostic>> {
    let tokens = lex(text).map_err(|d| vec![d])?;
    let mut p = Parser {
        tokens,
        pos: 0,
        errors: Vec::new(),
    };
    let mut doc = Document::default();
    while p.peek() != &Tok::Eof {
        match p.decl() {
            Ok(d) => doc.decls.push(d),
            Err(e) => {
                p.errors.push(e);
                p.recover();
            }
        }
    }
    if p.errors.is_empty() {
        Ok(doc)
    } else {
        Err(p.errors)
    }
}

type PResult<T> = Result<T, Diagnostic>;

struct Parser {
    tokens: Vec<Token>,
    pos: usize,
    errors: Vec<Diagnostic>,
}

impl Parser {
    fn peek(&self) -> &Tok {
        &self.tokens[self.pos].tok
    }

    fn span(&self) -> SourceSpan {
        self.tokens[self.pos].span
    }

    fn bump(&mut self) -> Token {
        let t = self.tokens[self.pos].clone();
        if t.tok != Tok::Eof {
            self.pos += 1;
        }
        t
    }

    /// Zero-length span just after the previous token.
    fn after_previous(&self) -> SourceSpan {
        match self.pos.checked_sub(1) {
            Some(i) => {
                let s = self.tokens[i].span;
                SourceSpan {
                    column: s.column + s.len,
                    offset: s.end(),
                    len: 0,
                    ..s
                }
            }
            None => self.span().start(),
        }
    }

    fn unexpected(&self, expected: &str) -> Diagnostic {
        Diagnostic::new(
            DiagnosticCode::Syntax,
            self.span(),
            format!("expected {expected}, found {}", self.peek().describe()),
        )
    }

    fn expect(&mut self, tok: Tok) -> PResult<SourceSpan> {
        if *self.peek() == tok {
            return Ok(self.bump().span);
        }
        let at = self.after_previous();
        Err(self
            .unexpected(&format!("`{}`", tok.text()))
            .with_help(format!("insert `{}`", tok.text()))
            .with_fix(at, tok.text()))
    }

    fn name(&mut self, what: &str) -> PResult<Ident> {
        match self.peek().clone() {
            Tok::Name(name) => Ok(Ident {
                name,
                span: self.bump().span,
            }),
            _ => Err(self.unexpected(what)),
        }
    }

    fn keyword(&mut self, kw: &str) -> PResult<SourceSpan> {
        match self.peek() {
            Tok::Name(n) if n == kw => Ok(self.bump().span),
            _ => Err(self.unexpected(&format!("`{kw}`"))),
        }
    }

    /// `kw ":"`
    fn field(&mut self, kw: &str) -> PResult<()> {
        self.keyword(kw)?;
        self.expect(Tok::Colon)?;
        Ok(())
    }

    /// Skips past the closing brace of the current declaration.
    fn recover(&mut self) {
        loop {
            match self.bump().tok {
                Tok::RBrace | Tok::Eof => return,
                _ => {}
            }
        }
    }

    fn decl(&mut self) -> PResult<Decl> {
        match self.peek() {
            Tok::Name(n) if n == "problem" => self.problem().map(Decl::Problem),
            Tok::Name(n) if n == "method" => self.method().map(Decl::Method),
            _ => Err(self.unexpected("`problem` or `method`")),
        }
    }

    fn problem(&mut self) -> PResult<ProblemDecl> {
        self.keyword("problem")?;
        let name = self.name("a problem name")?;
        self.expect(Tok::LBrace)?;
        self.field("alphabet")?;
        let alphabet = self.name_list("a symbol")?;
        self.expect(Tok::Semi)?;
        self.field("hypotheses")?;
        let hypotheses = self.name_list("a hypothesis")?;
        self.expect(Tok::Semi)?;
        let (states, init, edges, close) = self.body()?;
        Ok(ProblemDecl {
            name,
            alphabet,
            hypotheses,
            states,
            init,
            edges,
            close,
        })
    }

    fn method(&mut self) -> PResult<MethodDecl> {
        self.keyword("method")?;
        let name = self.name("a method name")?;
        self.expect(Tok::LBrace)?;
        self.field("problem")?;
        let problem = self.name("a problem name")?;
        self.expect(Tok::Semi)?;
        let (states, init, edges, close) = self.body()?;
        Ok(MethodDecl {
            name,
            problem,
            states,
            init,
            edges,
            close,
        })
    }

    /// `states: …; init: …; edges… }`
    fn body(&mut self) -> PResult<(Vec<StateDecl>, Ident, Vec<Edge>, SourceSpan)> {
        self.field("states")?;
        let mut states = vec![self.state()?];
        while *self.peek() == Tok::Comma {
            self.bump();
            states.push(self.state()?);
        }
        self.expect(Tok::Semi)?;
        self.field("init")?;
        let init = self.name("a state name")?;
        self.expect(Tok::Semi)?;
        let mut edges = Vec::new();
        loop {
            match self.peek() {
                Tok::RBrace => break,
                Tok::Name(_) => edges.push(self.edge()?),
                _ => return Err(self.unexpected("an edge or `}`")),
            }
        }
        let close = self.expect(Tok::RBrace)?;
        Ok((states, init, edges, close))
    }

    fn state(&mut self) -> PResult<StateDecl> {
        let name = self.name("a state name")?;
        self.expect(Tok::LBracket)?;
        let tag = if *self.peek() == Tok::Question {
            Ident {
                name: "?".into(),
                span: self.bump().span,
            }
        } else {
            self.name("a hypothesis or `?`")?
        };
        self.expect(Tok::RBracket)?;
        Ok(StateDecl { name, tag })
    }

    fn edge(&mut self) -> PResult<Edge> {
        let from = self.name("a state name")?;
        self.expect(Tok::Dash)?;
        let symbol = if *self.peek() == Tok::Star {
            EdgeSymbol::Wildcard(self.bump().span)
        } else {
            EdgeSymbol::Symbol(self.name("a symbol or `*`")?)
        };
        self.expect(Tok::Arrow)?;
        let to = self.name("a state name")?;
        let semi = self.expect(Tok::Semi)?;
        Ok(Edge {
            span: from.span.to(semi),
            from,
            symbol,
            to,
        })
    }

    fn name_list(&mut self, what: &str) -> PResult<Vec<Ident>> {
        let mut out = vec![self.name(what)?];
        while *self.peek() == Tok::Comma {
            self.bump();
            out.push(self.name(what)?);
        }
        Ok(out)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const RAVEN: &str = "problem raven {
  alphabet: black, nonblack;
  hypotheses: yes, no;
  states: q0 [yes], q1 [no];
  init: q0;
  q0 --black--> q0;  q0 --nonblack--> q1;  q1 --*--> q1;
}
method ordinary_induction {
  problem: raven;
  states: s0 [yes], s1 [no];
  init: s0;
  s0 --black--> s0;  s0 --nonblack--> s1;  s1 --*--> s1;
}
";

    #[test]
    fn parses_the_raven_document() {
        let doc = parse(RAVEN).unwrap();
        assert_eq!(doc.decls.len(), 2);
        let p = doc.problem("raven").unwrap();
        assert_eq!(p.alphabet, vec![Ident::new("black"), Ident::new("nonblack")]);
        assert_eq!(p.edges.len(), 3);
        assert_eq!(p.edges[2], Edge::new("q1", "*", "q1"));
        let e = &p.edges[1];
        assert_eq!(e.span.line, 6);
        assert_eq!(&RAVEN[e.span.offset..e.span.end()], "q0 --nonblack--> q1;");
    }

    #[test]
    fn suspension_tag() {
        let doc = parse("method m { problem: raven; states: a [?]; init: a; a --*--> a; }").unwrap();
        let Decl::Method(m) = &doc.decls[0] else { panic!() };
        assert_eq!(m.states[0].tag.name, "?");
    }

    #[test]
    fn missing_semicolon_has_insertion_fix() {
        let src = "problem p { alphabet: a; hypotheses: x, y; states: s [x]; init: s\n s --a--> s; }";
        let errs = parse(src).unwrap_err();
        assert_eq!(errs.len(), 1);
        let fix = errs[0].fix.clone().unwrap();
        assert!(parse(&fix.apply(src)).is_ok());
    }

    #[test]
    fn recovers_at_declaration_boundaries() {
        let src = "problem p { alphabet a; } method m { problem p; }";
        assert_eq!(parse(src).unwrap_err().len(), 2);
    }
}
