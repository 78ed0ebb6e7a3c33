//! Lowering of documents to problems and methods.

use std::borrow::Cow;
use std::collections::{HashMap, HashSet};

use crate::methods::{InferenceMethod, MethodOutput};
use crate::problem::{
    builtin_problem, Alphabet, EmpiricalProblem, Hypothesis, HypothesisId, StateId, TruthAutomaton, Violation,
};

use super::{suggest, Decl, Diagnostic, DiagnosticCode as Code, Document, Edge, EdgeSymbol, Ident, SourceSpan, StateDecl};

const BUILTIN_PROBLEMS: [&str; 2] = ["raven", "first_observation"];

/// Problems and methods declared by a document.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Elaborated {
    pub problems: Vec<EmpiricalProblem>,
    pub methods: Vec<InferenceMethod>,
}

impl Elaborated {
    pub fn method(&self, name: &str) -> Option<&InferenceMethod> {
        self.methods.iter().find(|m| m.name == name)
    }

    /// A problem declared in the document, else a built-in one.
    pub fn problem(&self, name: &str) -> Option<Cow<'_, EmpiricalProblem>> {
        self.problems
            .iter()
            .find(|p| p.name == name)
            .map(Cow::Borrowed)
            .or_else(|| builtin_problem(name).map(Cow::Owned))
    }
}

/// Parses and elaborates in one step.
pub fn compile(text: &str) -> Result<Elaborated, Vec<Diagnostic>> {
    elaborate(&super::parse(text)?)
}

/// Resolves names, lowers wildcards and checks well-posedness. Collects
/// every diagnostic rather than stopping at the first.
pub fn elaborate(doc: &Document) -> Result<Elaborated, Vec<Diagnostic>> {
    let mut diags = Vec::new();
    let mut out = Elaborated::default();

    let mut seen: HashSet<(bool, &str)> = HashSet::new();
    for d in &doc.decls {
        let is_problem = matches!(d, Decl::Problem(_));
        let name = d.name();
        if !seen.insert((is_problem, &name.name)) {
            let kind = if is_problem { "problem" } else { "method" };
            let taken: Vec<&str> = doc.decls.iter().map(|d| d.name().name.as_str()).collect();
            diags.push(duplicate(Code::DuplicateDeclaration, name, &taken, &format!("{kind} `{}` is declared twice", name.name)));
        }
    }

    for d in &doc.decls {
        match d {
            Decl::Problem(p) => {
                let mut local = Vec::new();
                let alphabet = unique_names(&p.alphabet, "symbol", &mut local);
                let hypotheses = unique_names(&p.hypotheses, "hypothesis", &mut local);
                let tag = |s: &StateDecl| -> Result<HypothesisId, Diagnostic> {
                    match hypotheses.iter().position(|h| *h == s.tag.name) {
                        Some(i) => Ok(HypothesisId(i)),
                        None => Err(unknown_tag(s, &hypotheses, false)),
                    }
                };
                let lowered = lower(&p.states, &p.init, &p.edges, &alphabet, p.close, tag, &mut local);
                if let (true, Some((states, initial, transitions, labels))) = (local.is_empty(), lowered) {
                    let problem = EmpiricalProblem {
                        name: p.name.name.clone(),
                        alphabet: Alphabet::new_unchecked(alphabet.clone()),
                        hypotheses: hypotheses.iter().map(Hypothesis::bare).collect(),
                        truth: TruthAutomaton {
                            states,
                            initial,
                            transitions,
                            labels,
                        },
                    };
                    let violations = problem.validate();
                    if violations.is_empty() {
                        out.problems.push(problem);
                    }
                    local.extend(violations.iter().map(|v| ill_posed(v, &p.name, &p.states)));
                }
                diags.extend(local);
            }
            Decl::Method(m) => {
                let mut local = Vec::new();
                let target = match doc.problem(&m.problem.name) {
                    Some(p) => Some((
                        p.alphabet.iter().map(|s| s.name.clone()).collect::<Vec<_>>(),
                        p.hypotheses.iter().map(|s| s.name.clone()).collect::<Vec<_>>(),
                    )),
                    None => builtin_problem(&m.problem.name).map(|p| {
                        (
                            p.alphabet.names().to_vec(),
                            p.hypotheses.iter().map(|h| h.label.clone()).collect(),
                        )
                    }),
                };
                let Some((alphabet, hypotheses)) = target else {
                    let candidates: Vec<&str> = doc
                        .problems()
                        .map(|p| p.name.name.as_str())
                        .chain(BUILTIN_PROBLEMS)
                        .collect();
                    let mut d = Diagnostic::new(
                        Code::UnresolvedProblem,
                        m.problem.span,
                        format!("unresolved problem `{}`", m.problem.name),
                    );
                    if let Some(s) = suggest(&m.problem.name, candidates.iter().copied()) {
                        d = d.with_help(format!("did you mean `{s}`?")).with_fix(m.problem.span, s);
                    }
                    diags.push(d);
                    continue;
                };
                let tag = |s: &StateDecl| -> Result<MethodOutput, Diagnostic> {
                    if s.tag.name == "?" {
                        return Ok(MethodOutput::Suspend);
                    }
                    match hypotheses.iter().position(|h| *h == s.tag.name) {
                        Some(i) => Ok(MethodOutput::Hypothesis(HypothesisId(i))),
                        None => Err(unknown_tag(s, &hypotheses, true)),
                    }
                };
                let lowered = lower(&m.states, &m.init, &m.edges, &alphabet, m.close, tag, &mut local);
                if let (true, Some((states, initial, transitions, outputs))) = (local.is_empty(), lowered) {
                    let method = InferenceMethod {
                        name: m.name.name.clone(),
                        problem: m.problem.name.clone(),
                        states,
                        initial,
                        transitions,
                        outputs,
                    };
                    // the target may itself be ill posed; only check what the
                    // method controls
                    let shape = EmpiricalProblem {
                        name: m.problem.name.clone(),
                        alphabet: Alphabet::new_unchecked(alphabet.clone()),
                        hypotheses: hypotheses.iter().map(Hypothesis::bare).collect(),
                        truth: TruthAutomaton {
                            states: vec![],
                            initial: 0,
                            transitions: vec![],
                            labels: vec![],
                        },
                    };
                    let violations = method.validate(&shape);
                    if violations.is_empty() {
                        out.methods.push(method);
                    }
                    local.extend(violations.iter().map(|v| ill_posed(v, &m.name, &m.states)));
                }
                diags.extend(local);
            }
        }
    }
    if diags.is_empty() {
        Ok(out)
    } else {
        diags.sort_by_key(|d| (d.span.offset, d.code));
        Err(diags)
    }
}

type Lowered<T> = (Vec<String>, StateId, Vec<Vec<StateId>>, Vec<T>);

/// Shared lowering of `states`, `init` and edges.
fn lower<T>(
    states: &[StateDecl],
    init: &Ident,
    edges: &[Edge],
    alphabet: &[String],
    close: SourceSpan,
    tag: impl Fn(&StateDecl) -> Result<T, Diagnostic>,
    diags: &mut Vec<Diagnostic>,
) -> Option<Lowered<T>> {
    let before = diags.len();
    let state_names: Vec<&Ident> = states.iter().map(|s| &s.name).collect();
    let names = unique_names_ref(&state_names, "state", diags);
    let index: HashMap<&str, StateId> = names.iter().enumerate().rev().map(|(i, n)| (n.as_str(), i)).collect();
    let resolve = |id: &Ident, diags: &mut Vec<Diagnostic>| -> Option<StateId> {
        let found = index.get(id.name.as_str()).copied();
        if found.is_none() {
            let mut d = Diagnostic::new(Code::UnresolvedState, id.span, format!("unresolved state `{}`", id.name));
            if let Some(s) = suggest(&id.name, names.iter().map(String::as_str)) {
                d = d.with_help(format!("did you mean `{s}`?")).with_fix(id.span, s);
            } else if let Some(first) = names.first() {
                d = d.with_help(format!("declared states: {}", names.join(", "))).with_fix(id.span, first.as_str());
            }
            diags.push(d);
        }
        found
    };

    let mut tags = Vec::with_capacity(states.len());
    for s in states {
        match tag(s) {
            Ok(t) => tags.push(t),
            Err(d) => diags.push(d),
        }
    }
    let initial = resolve(init, diags);

    let k = alphabet.len();
    let mut table: Vec<Vec<Option<StateId>>> = vec![vec![None; k]; states.len()];
    let mut explicit: HashMap<(StateId, usize), &Edge> = HashMap::new();
    let mut wildcard: HashMap<StateId, &Edge> = HashMap::new();
    // states with an edge that failed to resolve; their holes are already reported
    let mut tainted = vec![false; states.len()];
    for e in edges {
        let from = resolve(&e.from, diags);
        let to = resolve(&e.to, diags);
        let symbol = match &e.symbol {
            EdgeSymbol::Symbol(id) => match alphabet.iter().position(|a| *a == id.name) {
                Some(s) => Some(Some(s)),
                None => {
                    let mut d = Diagnostic::new(Code::UnknownSymbol, id.span, format!("unknown symbol `{}`", id.name));
                    match suggest(&id.name, alphabet.iter().map(String::as_str)) {
                        Some(s) => d = d.with_help(format!("did you mean `{s}`?")).with_fix(id.span, s),
                        None => d = d.with_help(format!("the alphabet is: {}", alphabet.join(", "))),
                    }
                    diags.push(d);
                    None
                }
            },
            EdgeSymbol::Wildcard(_) => Some(None),
        };
        if let (Some(q), true) = (from, symbol.is_none() || to.is_none()) {
            tainted[q] = true;
        }
        let (Some(from), Some(symbol)) = (from, symbol) else { continue };
        let earlier = match symbol {
            Some(s) => explicit.insert((from, s), e),
            None => wildcard.insert(from, e),
        };
        if let Some(prev) = earlier {
            diags.push(
                Diagnostic::new(
                    Code::DuplicateEdge,
                    e.span,
                    format!(
                        "state `{}` already has an edge on `{}` (line {})",
                        e.from.name,
                        e.symbol.name(),
                        prev.span.line
                    ),
                )
                .with_help("remove one of the edges")
                .with_fix(e.span, ""),
            );
            continue;
        }
        if let (Some(s), Some(to)) = (symbol, to) {
            table[from][s] = Some(to);
        }
    }
    for (&from, e) in &wildcard {
        let Some(to) = index.get(e.to.name.as_str()).copied() else { continue };
        for slot in table[from].iter_mut().filter(|s| s.is_none()) {
            *slot = Some(to);
        }
    }
    for (q, row) in table.iter().enumerate() {
        let missing: Vec<&str> = (0..k).filter(|&s| row[s].is_none()).map(|s| alphabet[s].as_str()).collect();
        if missing.is_empty() || tainted[q] || names[..q].contains(&names[q]) {
            continue;
        }
        let state = &states[q].name;
        let insert: String = missing.iter().map(|s| format!("{0} --{s}--> {0}; ", state.name)).collect();
        diags.push(
            Diagnostic::new(
                Code::MissingTransition,
                state.span,
                format!("state `{}` has no transition on {}", state.name, quoted(&missing)),
            )
            .with_help("add the edges, or a `*` edge")
            .with_fix(close.start(), insert),
        );
    }

    if diags.len() > before {
        return None;
    }
    let transitions = table
        .into_iter()
        .map(|row| row.into_iter().map(|t| t.expect("checked above")).collect())
        .collect();
    Some((names, initial?, transitions, tags))
}

fn quoted(names: &[&str]) -> String {
    names.iter().map(|n| format!("`{n}`")).collect::<Vec<_>>().join(", ")
}

fn unique_names(ids: &[Ident], what: &str, diags: &mut Vec<Diagnostic>) -> Vec<String> {
    let refs: Vec<&Ident> = ids.iter().collect();
    unique_names_ref(&refs, what, diags)
}

/// Reports repeated names; returns all names in order.
fn unique_names_ref(ids: &[&Ident], what: &str, diags: &mut Vec<Diagnostic>) -> Vec<String> {
    let mut seen = HashSet::new();
    let taken: Vec<&str> = ids.iter().map(|i| i.name.as_str()).collect();
    for id in ids {
        if !seen.insert(id.name.as_str()) {
            diags.push(duplicate(Code::DuplicateName, id, &taken, &format!("{what} `{}` is declared twice", id.name)));
        }
    }
    ids.iter().map(|i| i.name.clone()).collect()
}

fn duplicate(code: Code, id: &Ident, taken: &[&str], message: &str) -> Diagnostic {
    let fresh = (2..)
        .map(|k| format!("{}_{k}", id.name))
        .find(|n| !taken.contains(&n.as_str()))
        .expect("unbounded");
    Diagnostic::new(code, id.span, message)
        .with_help(format!("rename it, e.g. `{fresh}`"))
        .with_fix(id.span, fresh)
}

fn unknown_tag(s: &StateDecl, hypotheses: &[String], suspension_ok: bool) -> Diagnostic {
    let what = if suspension_ok { "hypothesis or `?`" } else { "hypothesis" };
    let mut d = Diagnostic::new(
        Code::UnknownHypothesis,
        s.tag.span,
        format!("`{}` is not a {what} of this problem", s.tag.name),
    );
    let near = suggest(&s.tag.name, hypotheses.iter().map(String::as_str));
    if let Some(h) = near.or(hypotheses.first().map(String::as_str)) {
        let help = match near {
            Some(_) => format!("did you mean `{h}`?"),
            None => format!("hypotheses are: {}", hypotheses.join(", ")),
        };
        d = d.with_help(help).with_fix(s.tag.span, h);
    }
    d
}

fn ill_posed(v: &Violation, decl: &Ident, states: &[StateDecl]) -> Diagnostic {
    let at = |name: &str| {
        states
            .iter()
            .find(|s| s.name.name == name)
            .map_or(decl.span, |s| s.name.span)
    };
    let span = match v {
        Violation::MixedScc { states, .. } => at(&states[0]),
        Violation::UnreachableState { state } => at(state),
        _ => decl.span,
    };
    let d = Diagnostic::new(Code::IllPosed, span, format!("`{}`: {v}", decl.name));
    match v {
        Violation::MixedScc { .. } => d.with_help("states that can reach each other must carry the same label"),
        Violation::UnreachableState { .. } => d.with_help("remove the state or add an edge into it"),
        _ => d,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::methods::ordinary_induction;
    use crate::problem::raven_problem;

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
    fn raven_elaborates_to_the_builtins() {
        let e = compile(RAVEN).unwrap();
        let p = &e.problems[0];
        let b = raven_problem();
        assert_eq!(p.truth, b.truth);
        assert_eq!(p.alphabet, b.alphabet);
        assert_eq!(e.methods[0], ordinary_induction());
        assert!(p.validate().is_empty());
    }

    fn codes(src: &str) -> Vec<Code> {
        compile(src).unwrap_err().into_iter().map(|d| d.code).collect()
    }

    #[test]
    fn undeclared_target() {
        let src = RAVEN.replace("q0 --black--> q0;", "q0 --black--> qX;");
        let errs = compile(&src).unwrap_err();
        assert_eq!(errs.len(), 1);
        assert_eq!(errs[0].code, Code::UnresolvedState);
        assert!(errs[0].message.contains("unresolved state"));
        assert_eq!(&src[errs[0].span.offset..errs[0].span.end()], "qX");
    }

    #[test]
    fn explicit_edge_beside_wildcard_is_fine_but_two_wildcards_are_not() {
        let ok = RAVEN.replace("q1 --*--> q1;", "q1 --black--> q1; q1 --*--> q1;");
        assert!(compile(&ok).is_ok());
        let dup = RAVEN.replace("q1 --*--> q1;", "q1 --*--> q1; q1 --*--> q1;");
        assert_eq!(codes(&dup), vec![Code::DuplicateEdge]);
    }

    #[test]
    fn distinct_codes() {
        assert_eq!(codes(&RAVEN.replace("--nonblack--> q1", "--nonblak--> q1")), vec![Code::UnknownSymbol]);
        assert_eq!(codes(&RAVEN.replace("q1 --*--> q1;", "")), vec![Code::MissingTransition]);
        assert_eq!(
            codes(&RAVEN.replace("q0 --black--> q0;", "q0 --black--> q0; q0 --black--> q1;")),
            vec![Code::DuplicateEdge]
        );
        assert_eq!(codes(&RAVEN.replace("problem: raven", "problem: ravens")), vec![Code::UnresolvedProblem]);
        assert_eq!(codes(&RAVEN.replace("s1 [no]", "s1 [maybe]")), vec![Code::UnknownHypothesis]);
        assert_eq!(codes(&RAVEN.replace("q1 [no]", "q1 [?]")), vec![Code::UnknownHypothesis]);
        let twice = format!("{RAVEN}{}", &RAVEN[..RAVEN.find("method").unwrap()]);
        assert_eq!(codes(&twice), vec![Code::DuplicateDeclaration]);
    }

    #[test]
    fn mixed_component_is_ill_posed() {
        let src = "problem p { alphabet: a; hypotheses: x, y; states: s [x], t [y]; init: s;
            s --a--> t; t --a--> s; }";
        assert_eq!(codes(src), vec![Code::IllPosed]);
    }

    #[test]
    fn methods_may_target_builtins() {
        let e = compile("method m { problem: first_observation; states: a [?]; init: a; a --*--> a; }").unwrap();
        assert_eq!(e.problem("first_observation").unwrap().name, "first_observation");
        assert_eq!(e.method("m").unwrap().outputs, vec![MethodOutput::Suspend]);
    }
}
