//! A small text language for problems and methods (`.cvl` files).
//!
//! ```text
//! problem raven {
//!   alphabet: black, nonblack;
//!   hypotheses: yes, no;
//!   states: q0 [yes], q1 [no];
//!   init: q0;
//!   q0 --black--> q0;
//!   q0 --nonblack--> q1;
//!   q1 --*--> q1;
//! }
//! ```
//!
//! [`parse`] builds a [`Document`], [`print`] renders it canonically and
//! [`elaborate`] lowers it to problems and methods, resolving method targets
//! against the document and then the built-in registry.

// diagnostics are returned by value throughout; they are not on a hot path
#![allow(clippy::result_large_err)]

mod elaborate;
mod generate;
mod lexer;
mod parser;
mod printer;

use std::fmt;

use serde::{Deserialize, Serialize};

pub use elaborate::{compile, elaborate, Elaborated};
pub use generate::random_document;
pub use parser::parse;
pub use printer::print;

/// A region of source text. Lines and columns are 1-based (columns count
/// characters), offsets are 0-based byte offsets.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct SourceSpan {
    pub line: usize,
    pub column: usize,
    pub offset: usize,
    pub len: usize,
}

impl SourceSpan {
    pub fn end(&self) -> usize {
        self.offset + self.len
    }

    /// Smallest span covering both.
    pub fn to(self, other: SourceSpan) -> SourceSpan {
        SourceSpan {
            len: other.end().max(self.end()) - self.offset,
            ..self
        }
    }

    /// Empty span at the start of `self`.
    pub fn start(self) -> SourceSpan {
        SourceSpan { len: 0, ..self }
    }
}

/// A name with its location. Equality ignores the location.
#[derive(Debug, Clone, Eq)]
pub struct Ident {
    pub name: String,
    pub span: SourceSpan,
}

impl Ident {
    pub fn new(name: impl Into<String>) -> Self {
        Self {
            name: name.into(),
            span: SourceSpan::default(),
        }
    }
}

impl PartialEq for Ident {
    fn eq(&self, other: &Self) -> bool {
        self.name == other.name
    }
}

/// `name [tag]`; the tag is a hypothesis label, or `?` in a method.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct StateDecl {
    pub name: Ident,
    pub tag: Ident,
}

impl StateDecl {
    pub fn new(name: &str, tag: &str) -> Self {
        Self {
            name: Ident::new(name),
            tag: Ident::new(tag),
        }
    }
}

#[derive(Debug, Clone, Eq)]
pub enum EdgeSymbol {
    Symbol(Ident),
    /// `*`: every symbol without an explicit edge from the same state.
    Wildcard(SourceSpan),
}

impl EdgeSymbol {
    pub fn name(&self) -> &str {
        match self {
            EdgeSymbol::Symbol(id) => &id.name,
            EdgeSymbol::Wildcard(_) => "*",
        }
    }

    pub fn span(&self) -> SourceSpan {
        match self {
            EdgeSymbol::Symbol(id) => id.span,
            EdgeSymbol::Wildcard(s) => *s,
        }
    }
}

impl PartialEq for EdgeSymbol {
    fn eq(&self, other: &Self) -> bool {
        self.name() == other.name()
    }
}

#[derive(Debug, Clone, Eq)]
pub struct Edge {
    pub from: Ident,
    pub symbol: EdgeSymbol,
    pub to: Ident,
    /// From the source state through the closing `;`.
    pub span: SourceSpan,
}

impl Edge {
    pub fn new(from: &str, symbol: &str, to: &str) -> Self {
        let symbol = if symbol == "*" {
            EdgeSymbol::Wildcard(SourceSpan::default())
        } else {
            EdgeSymbol::Symbol(Ident::new(symbol))
        };
        Self {
            from: Ident::new(from),
            symbol,
            to: Ident::new(to),
            span: SourceSpan::default(),
        }
    }

    fn key(&self) -> (&str, &str, &str) {
        (&self.from.name, self.symbol.name(), &self.to.name)
    }
}

impl PartialEq for Edge {
    fn eq(&self, other: &Self) -> bool {
        self.key() == other.key()
    }
}

/// Edge lists compare as multisets: the printer normalises order.
fn same_edges(a: &[Edge], b: &[Edge]) -> bool {
    let mut a: Vec<_> = a.iter().map(Edge::key).collect();
    let mut b: Vec<_> = b.iter().map(Edge::key).collect();
    a.sort_unstable();
    b.sort_unstable();
    a == b
}

#[derive(Debug, Clone, Eq)]
pub struct ProblemDecl {
    pub name: Ident,
    pub alphabet: Vec<Ident>,
    pub hypotheses: Vec<Ident>,
    pub states: Vec<StateDecl>,
    pub init: Ident,
    pub edges: Vec<Edge>,
    /// The closing brace.
    pub close: SourceSpan,
}

impl PartialEq for ProblemDecl {
    fn eq(&self, other: &Self) -> bool {
        self.name == other.name
            && self.alphabet == other.alphabet
            && self.hypotheses == other.hypotheses
            && self.states == other.states
            && self.init == other.init
            && same_edges(&self.edges, &other.edges)
    }
}

#[derive(Debug, Clone, Eq)]
pub struct MethodDecl {
    pub name: Ident,
    pub problem: Ident,
    pub states: Vec<StateDecl>,
    pub init: Ident,
    pub edges: Vec<Edge>,
    pub close: SourceSpan,
}

impl PartialEq for MethodDecl {
    fn eq(&self, other: &Self) -> bool {
        self.name == other.name
            && self.problem == other.problem
            && self.states == other.states
            && self.init == other.init
            && same_edges(&self.edges, &other.edges)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Decl {
    Problem(ProblemDecl),
    Method(MethodDecl),
}

impl Decl {
    pub fn name(&self) -> &Ident {
        match self {
            Decl::Problem(p) => &p.name,
            Decl::Method(m) => &m.name,
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Document {
    pub decls: Vec<Decl>,
}

impl Document {
    pub fn problems(&self) -> impl Iterator<Item = &ProblemDecl> {
        self.decls.iter().filter_map(|d| match d {
            Decl::Problem(p) => Some(p),
            Decl::Method(_) => None,
        })
    }

    pub fn methods(&self) -> impl Iterator<Item = &MethodDecl> {
        self.decls.iter().filter_map(|d| match d {
            Decl::Method(m) => Some(m),
            Decl::Problem(_) => None,
        })
    }

    pub fn problem(&self, name: &str) -> Option<&ProblemDecl> {
        self.problems().find(|p| p.name.name == name)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum DiagnosticCode {
    Syntax,
    DuplicateDeclaration,
    DuplicateName,
    UnknownSymbol,
    UnknownHypothesis,
    UnresolvedState,
    UnresolvedProblem,
    DuplicateEdge,
    MissingTransition,
    IllPosed,
}

impl DiagnosticCode {
    pub const ALL: [DiagnosticCode; 10] = [
        DiagnosticCode::Syntax,
        DiagnosticCode::DuplicateDeclaration,
        DiagnosticCode::DuplicateName,
        DiagnosticCode::UnknownSymbol,
        DiagnosticCode::UnknownHypothesis,
        DiagnosticCode::UnresolvedState,
        DiagnosticCode::UnresolvedProblem,
        DiagnosticCode::DuplicateEdge,
        DiagnosticCode::MissingTransition,
        DiagnosticCode::IllPosed,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            DiagnosticCode::Syntax => "syntax",
            DiagnosticCode::DuplicateDeclaration => "duplicate-declaration",
            DiagnosticCode::DuplicateName => "duplicate-name",
            DiagnosticCode::UnknownSymbol => "unknown-symbol",
            DiagnosticCode::UnknownHypothesis => "unknown-hypothesis",
            DiagnosticCode::UnresolvedState => "unresolved-state",
            DiagnosticCode::UnresolvedProblem => "unresolved-problem",
            DiagnosticCode::DuplicateEdge => "duplicate-edge",
            DiagnosticCode::MissingTransition => "missing-transition",
            DiagnosticCode::IllPosed => "ill-posed",
        }
    }

    /// Stable numeric code, `E01`..`E10`.
    pub fn id(self) -> String {
        let i = Self::ALL.iter().position(|&c| c == self).unwrap_or(0);
        format!("E{:02}", i + 1)
    }

    pub fn parse(s: &str) -> Option<Self> {
        Self::ALL.into_iter().find(|c| c.as_str() == s)
    }
}

impl fmt::Display for DiagnosticCode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// A text edit that resolves a diagnostic.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Fix {
    pub span: SourceSpan,
    pub replacement: String,
}

impl Fix {
    pub fn apply(&self, source: &str) -> String {
        let mut out = String::with_capacity(source.len() + self.replacement.len());
        out.push_str(&source[..self.span.offset]);
        out.push_str(&self.replacement);
        out.push_str(&source[self.span.end()..]);
        out
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Diagnostic {
    pub code: DiagnosticCode,
    pub span: SourceSpan,
    pub message: String,
    pub help: Option<String>,
    pub fix: Option<Fix>,
}

impl Diagnostic {
    pub(crate) fn new(code: DiagnosticCode, span: SourceSpan, message: impl Into<String>) -> Self {
        Self {
            code,
            span,
            message: message.into(),
            help: None,
            fix: None,
        }
    }

    pub(crate) fn with_help(mut self, help: impl Into<String>) -> Self {
        self.help = Some(help.into());
        self
    }

    pub(crate) fn with_fix(mut self, span: SourceSpan, replacement: impl Into<String>) -> Self {
        self.fix = Some(Fix {
            span,
            replacement: replacement.into(),
        });
        self
    }

    /// Renders as `path:line:column: error[E04 unknown-symbol]: message`
    /// followed by the offending source line and a caret marker.
    pub fn render(&self, source: &str, path: &str) -> String {
        let mut out = format!(
            "{path}:{}:{}: error[{} {}]: {}\n",
            self.span.line,
            self.span.column,
            self.code.id(),
            self.code,
            self.message
        );
        if let Some(line) = source.lines().nth(self.span.line.saturating_sub(1)) {
            let width = source
                .get(self.span.offset..self.span.end())
                .map_or(1, |s| s.chars().count().max(1));
            out.push_str(&format!("  | {line}\n"));
            out.push_str(&format!(
                "  | {}{}\n",
                " ".repeat(self.span.column.saturating_sub(1)),
                "^".repeat(width)
            ));
        }
        if let Some(help) = &self.help {
            out.push_str(&format!("  = help: {help}\n"));
        }
        out
    }
}

impl fmt::Display for Diagnostic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{}:{}: {}: {}",
            self.span.line, self.span.column, self.code, self.message
        )
    }
}

/// The closest candidate by edit distance, if reasonably close.
pub(crate) fn suggest<'a>(name: &str, candidates: impl IntoIterator<Item = &'a str>) -> Option<&'a str> {
    candidates
        .into_iter()
        .map(|c| (strsim::levenshtein(name, c), c))
        .filter(|&(d, c)| d <= name.len().max(c.len()) / 2 + 1)
        .min_by_key(|&(d, _)| d)
        .map(|(_, c)| c)
}
