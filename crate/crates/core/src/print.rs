//! Deterministic rendering of terms, problems, and solver reports in
//! the concrete grammar, plus the machine-readable JSON form.

use crate::engine::FailReason;
use crate::equation::Problem;
use crate::pipeline::{Report, Unifier};
use crate::term::Term;
use serde_json::json;

/// Concrete-syntax rendering; nil-terminated cons chains print as
/// `[t1, …, tn]`.
pub fn term_to_string(t: &Term) -> String {
    fn list_items(t: &Term, items: &mut Vec<String>) -> bool {
        match t {
            Term::Nil => true,
            Term::Cons(h, r) => {
                items.push(term_to_string(h));
                list_items(r, items)
            }
            _ => false,
        }
    }
    match t {
        Term::Var(v) => v.to_string(),
        Term::Const(c) => c.clone(),
        Term::Nil => "nil".into(),
        Term::Cons(h, r) => {
            let mut items = vec![term_to_string(h)];
            if list_items(r, &mut items) {
                format!("[{}]", items.join(", "))
            } else {
                format!("cons({}, {})", term_to_string(h), term_to_string(r))
            }
        }
        Term::Bc(a, b) => format!("bc({}, {})", term_to_string(a), term_to_string(b)),
        Term::Db(a, b) => format!("db({}, {})", term_to_string(a), term_to_string(b)),
        Term::H(a, b) => format!("h({}, {})", term_to_string(a), term_to_string(b)),
        Term::G(a, b) => format!("g({}, {})", term_to_string(a), term_to_string(b)),
        Term::Enc(a) => format!("enc({})", term_to_string(a)),
        Term::Car(a) => format!("car({})", term_to_string(a)),
        Term::Cdr(a) => format!("cdr({})", term_to_string(a)),
        Term::Xor(args) => args
            .iter()
            .map(|a| match **a {
                // xor binds loosest; parenthesize nothing else
                Term::Xor(_) => unreachable!("xor is flattened"),
                _ => term_to_string(a),
            })
            .collect::<Vec<_>>()
            .join(" ^ "),
    }
}

/// Problem-file rendering; `parse_problem` accepts the output.
pub fn problem_to_string(p: &Problem) -> String {
    let mut out = format!("problem {} {{\n", p.theory);
    if !p.constants.is_empty() {
        let names: Vec<String> = p.constants.iter().cloned().collect();
        out.push_str(&format!("  constants {};\n", names.join(", ")));
    }
    for eq in &p.equations {
        out.push_str(&format!("  {eq};\n"));
    }
    out.push_str("}\n");
    out
}

pub fn unifier_to_string(index: usize, u: &Unifier) -> String {
    let mut out = format!("unifier {index}:\n");
    if u.restricted.is_empty() {
        out.push_str("  (identity)\n");
    }
    for (v, t) in &u.restricted {
        out.push_str(&format!("  {v} := {}\n", term_to_string(t)));
    }
    if !u.parameters.is_empty() {
        let ps: Vec<String> = u.parameters.iter().map(|p| p.to_string()).collect();
        out.push_str(&format!("  parameters: {}\n", ps.join(", ")));
    }
    out
}

pub fn report_to_string(report: &Report) -> String {
    let mut out = String::new();
    if report.unifiable() {
        out.push_str(&format!(
            "unifiable: {} unifier(s)\n",
            report.unifiers.len()
        ));
        for (i, u) in report.unifiers.iter().enumerate() {
            out.push_str(&unifier_to_string(i + 1, u));
        }
    } else {
        out.push_str("not unifiable\n");
        for f in &report.failures {
            out.push_str(&format!("  {f}\n"));
        }
        for f in &report.element_failures {
            out.push_str(&format!("  element equations unsolvable: {f}\n"));
        }
    }
    out
}

pub fn report_to_json(report: &Report) -> serde_json::Value {
    json!({
        "status": if report.unifiable() { "unifiable" } else { "not-unifiable" },
        "unifiers": report.unifiers.iter().map(|u| {
            json!({
                "bindings": u.restricted.iter()
                    .map(|(v, t)| (v.to_string(), serde_json::Value::String(term_to_string(t))))
                    .collect::<serde_json::Map<String, serde_json::Value>>(),
                "parameters": u.parameters.iter().map(|p| p.to_string()).collect::<Vec<_>>(),
            })
        }).collect::<Vec<_>>(),
        "failures": report.failures.iter().map(|f| f.to_string()).collect::<Vec<_>>(),
        "element_failures": report.element_failures.iter().map(|f| f.to_string()).collect::<Vec<_>>(),
        "stats": {
            "expansions": report.stats.expansions,
            "solved_forms": report.stats.solved_forms,
            "max_push": report.stats.max_push,
        },
    })
}

pub fn failure_exit_line(f: &FailReason) -> String {
    f.to_string()
}
