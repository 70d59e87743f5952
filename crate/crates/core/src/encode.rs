//! Monotone 1-in-3-SAT to DBC element-unification: each clause becomes
//! the gadget equation
//! `g(h(g(h(g(h(a,b),x1),b),x2),b),x3) =? g(h(a,b),c)`,
//! solvable exactly by assigning c to one clause variable and b to the
//! other two.

use crate::errors::{Result, SolverError};
use crate::term::Term;

pub type Clause = [String; 3];

/// Parses a clause file: one clause per line, three positive literals
/// separated by whitespace. Blank lines and `//` comments are skipped.
pub fn parse_clauses(text: &str) -> Result<Vec<Clause>> {
    let mut out = Vec::new();
    for (lineno, line) in text.lines().enumerate() {
        let line = line.split("//").next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let names: Vec<&str> = line.split_whitespace().collect();
        if names.len() != 3 {
            return Err(SolverError::Format(format!(
                "line {}: a clause needs exactly 3 positive literals, found {}",
                lineno + 1,
                names.len()
            )));
        }
        for n in &names {
            let ok = n.chars().next().is_some_and(|c| c.is_ascii_lowercase())
                && n.chars().all(|c| c.is_alphanumeric() || c == '_');
            if !ok {
                return Err(SolverError::Format(format!(
                    "line {}: `{n}` is not a lowercase positive literal",
                    lineno + 1
                )));
            }
        }
        out.push([names[0].into(), names[1].into(), names[2].into()]);
    }
    Ok(out)
}

fn gadget_lhs(x1: Term, x2: Term, x3: Term) -> Term {
    let hab = Term::h(Term::constant("a"), Term::constant("b"));
    let inner = Term::h(Term::g(hab, x1), Term::constant("b"));
    let mid = Term::h(Term::g(inner, x2), Term::constant("b"));
    Term::g(mid, x3)
}

pub fn gadget_rhs() -> Term {
    Term::g(
        Term::h(Term::constant("a"), Term::constant("b")),
        Term::constant("c"),
    )
}

/// One gadget equation per clause, over shared variables `x_<name>`.
pub fn clause_equations(clauses: &[Clause]) -> Vec<(Term, Term)> {
    use crate::term::{Sort, Var};
    clauses
        .iter()
        .map(|c| {
            let var = |n: &String| Term::var(Var::new(format!("x_{n}"), Sort::Element));
            (
                gadget_lhs(var(&c[0]), var(&c[1]), var(&c[2])),
                gadget_rhs(),
            )
        })
        .collect()
}

/// The problem-file text for an encoded instance.
pub fn encode_to_problem_file(clauses: &[Clause]) -> String {
    let mut out = String::from("problem dbc {\n");
    if !clauses.is_empty() {
        out.push_str("  constants a, b, c;\n");
    }
    for (l, r) in clause_equations(clauses) {
        out.push_str(&format!(
            "  {} =? {};\n",
            crate::print::term_to_string(&l),
            crate::print::term_to_string(&r)
        ));
    }
    out.push_str("}\n");
    out
}
