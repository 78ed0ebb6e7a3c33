use std::fmt::Write;

use crate::problem::builtin_problem;

use super::{Decl, Document, Edge, EdgeSymbol, Ident, StateDecl};

/// Canonical text: declarations in order separated by a blank line, one edge
/// per line sorted by source state (declaration order) then symbol
/// (alphabet order, `*` last). Wildcards are kept as written.
pub fn print(doc: &Document) -> String {
    let mut out = String::new();
    for (i, decl) in doc.decls.iter().enumerate() {
        if i > 0 {
            out.push('\n');
        }
        match decl {
            Decl::Problem(p) => {
                let alphabet: Vec<&str> = p.alphabet.iter().map(|s| s.name.as_str()).collect();
                writeln!(out, "problem {} {{", p.name.name).unwrap();
                writeln!(out, "  alphabet: {};", join(&p.alphabet)).unwrap();
                writeln!(out, "  hypotheses: {};", join(&p.hypotheses)).unwrap();
                body(&mut out, &p.states, &p.init, &p.edges, &alphabet);
            }
            Decl::Method(m) => {
                let alphabet: Vec<String> = match doc.problem(&m.problem.name) {
                    Some(p) => p.alphabet.iter().map(|s| s.name.clone()).collect(),
                    None => builtin_problem(&m.problem.name)
                        .map(|p| p.alphabet.names().to_vec())
                        .unwrap_or_default(),
                };
                let alphabet: Vec<&str> = alphabet.iter().map(String::as_str).collect();
                writeln!(out, "method {} {{", m.name.name).unwrap();
                writeln!(out, "  problem: {};", m.problem.name).unwrap();
                body(&mut out, &m.states, &m.init, &m.edges, &alphabet);
            }
        }
    }
    out
}

fn join(ids: &[Ident]) -> String {
    ids.iter().map(|i| i.name.as_str()).collect::<Vec<_>>().join(", ")
}

fn body(out: &mut String, states: &[StateDecl], init: &Ident, edges: &[Edge], alphabet: &[&str]) {
    let states_text: Vec<String> = states
        .iter()
        .map(|s| format!("{} [{}]", s.name.name, s.tag.name))
        .collect();
    writeln!(out, "  states: {};", states_text.join(", ")).unwrap();
    writeln!(out, "  init: {};", init.name).unwrap();
    let mut sorted: Vec<&Edge> = edges.iter().collect();
    sorted.sort_by_key(|e| {
        let state = states
            .iter()
            .position(|s| s.name == e.from)
            .unwrap_or(states.len());
        let symbol = match &e.symbol {
            EdgeSymbol::Symbol(id) => alphabet
                .iter()
                .position(|a| *a == id.name)
                .unwrap_or(alphabet.len()),
            EdgeSymbol::Wildcard(_) => usize::MAX,
        };
        (state, e.from.name.clone(), symbol, e.symbol.name().to_string(), e.to.name.clone())
    });
    for e in sorted {
        writeln!(out, "  {} --{}--> {};", e.from.name, e.symbol.name(), e.to.name).unwrap();
    }
    out.push_str("}\n");
}

#[cfg(test)]
mod tests {
    use super::super::parse;
    use super::*;

    #[test]
    fn canonical_form_is_a_fixed_point() {
        let src = "problem raven { alphabet: black, nonblack; hypotheses: yes, no;
            states: q0 [yes], q1 [no]; init: q0;
            q1 --*--> q1; q0 --nonblack--> q1; q0 --black--> q0; }";
        let once = print(&parse(src).unwrap());
        assert_eq!(
            once,
            "problem raven {
  alphabet: black, nonblack;
  hypotheses: yes, no;
  states: q0 [yes], q1 [no];
  init: q0;
  q0 --black--> q0;
  q0 --nonblack--> q1;
  q1 --*--> q1;
}
"
        );
        assert_eq!(print(&parse(&once).unwrap()), once);
    }

    #[test]
    fn method_edges_follow_the_builtin_alphabet() {
        let src = "method m { problem: raven; states: a [yes], b [?]; init: a;
            a --nonblack--> b; b --*--> b; a --black--> a; }";
        let text = print(&parse(src).unwrap());
        let a_black = text.find("a --black-->").unwrap();
        let a_non = text.find("a --nonblack-->").unwrap();
        assert!(a_black < a_non);
        assert!(text.contains("b [?]"));
    }
}
