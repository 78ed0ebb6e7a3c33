use rand::seq::IndexedRandom;
use rand::Rng;

use super::{Decl, Document, Edge, Ident, MethodDecl, ProblemDecl, SourceSpan, StateDecl};

fn name<R: Rng>(rng: &mut R, prefix: &str) -> String {
    const CHARS: &[u8] = b"abcdefghijklmnopqrstuvwxyz0123456789_";
    let len = rng.random_range(0..4);
    let tail: String = (0..len).map(|_| *CHARS.choose(rng).unwrap() as char).collect();
    format!("{prefix}{tail}")
}

fn distinct<R: Rng>(rng: &mut R, prefix: &str, count: std::ops::RangeInclusive<usize>) -> Vec<String> {
    let n = rng.random_range(count);
    let mut out: Vec<String> = Vec::new();
    while out.len() < n {
        let candidate = name(rng, prefix);
        if !out.contains(&candidate) {
            out.push(candidate);
        }
    }
    out
}

fn ids(names: &[String]) -> Vec<Ident> {
    names.iter().map(Ident::new).collect()
}

/// Edges for `states` over `alphabet`: each state gets a random mix of
/// explicit edges and a `*` edge, in shuffled order.
fn edges<R: Rng>(rng: &mut R, states: &[String], alphabet: &[String]) -> Vec<Edge> {
    let mut out = Vec::new();
    for s in states {
        let explicit = rng.random_range(0..=alphabet.len());
        for a in alphabet.iter().take(explicit) {
            out.push(Edge::new(s, a, states.choose(rng).unwrap()));
        }
        if explicit < alphabet.len() || rng.random_bool(0.2) {
            out.push(Edge::new(s, "*", states.choose(rng).unwrap()));
        }
    }
    for i in (1..out.len()).rev() {
        out.swap(i, rng.random_range(0..=i));
    }
    out
}

/// A random well-formed document with up to `max_decls` declarations.
/// Methods refer to a problem declared earlier or to the raven problem.
pub fn random_document<R: Rng>(rng: &mut R, max_decls: usize) -> Document {
    let n = rng.random_range(1..=max_decls.max(1));
    let mut decls = Vec::new();
    let mut problems: Vec<(String, Vec<String>, Vec<String>)> =
        vec![("raven".into(), vec!["black".into(), "nonblack".into()], vec!["yes".into(), "no".into()])];
    let decl_names = distinct(rng, "d", n..=n);
    for dname in decl_names {
        if rng.random_bool(0.5) {
            let alphabet = distinct(rng, "a", 1..=3);
            let hypotheses = distinct(rng, "h", 2..=3);
            let states = distinct(rng, "q", 1..=4);
            let decl_states = states
                .iter()
                .map(|s| StateDecl::new(s, hypotheses.choose(rng).unwrap()))
                .collect();
            decls.push(Decl::Problem(ProblemDecl {
                name: Ident::new(&dname),
                alphabet: ids(&alphabet),
                hypotheses: ids(&hypotheses),
                init: Ident::new(states.choose(rng).unwrap()),
                edges: edges(rng, &states, &alphabet),
                states: decl_states,
                close: SourceSpan::default(),
            }));
            problems.push((dname, alphabet, hypotheses));
        } else {
            let (pname, alphabet, hypotheses) = problems.choose(rng).unwrap().clone();
            let states = distinct(rng, "m", 1..=4);
            let mut tags = hypotheses.clone();
            tags.push("?".into());
            let decl_states = states
                .iter()
                .map(|s| StateDecl::new(s, tags.choose(rng).unwrap()))
                .collect();
            decls.push(Decl::Method(MethodDecl {
                name: Ident::new(&dname),
                problem: Ident::new(&pname),
                init: Ident::new(states.choose(rng).unwrap()),
                edges: edges(rng, &states, &alphabet),
                states: decl_states,
                close: SourceSpan::default(),
            }));
        }
    }
    Document { decls }
}
