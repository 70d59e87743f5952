//! wasm-bindgen surface for the browser demo: normalize a term, solve
//! a problem file, and run the CBC attack demonstration.

use chainunify::pipeline::{self, SolveOptions};
use chainunify::theory::TheoryId;
use chainunify::{attack, parse, print, rewrite};
use std::collections::BTreeSet;
use wasm_bindgen::prelude::wasm_bindgen;

fn theory_of(name: &str) -> Result<TheoryId, String> {
    TheoryId::parse(name).ok_or_else(|| format!("unknown theory `{name}`"))
}

/// Normal form of a single term under the named theory.
#[wasm_bindgen]
pub fn normalize_term(term: &str, theory: &str) -> String {
    let run = || -> Result<String, String> {
        let th = theory_of(theory)?;
        let t = parse::parse_term(term.trim(), &BTreeSet::new()).map_err(|e| e.to_string())?;
        if let Some(sym) = th.signature_violation(&t) {
            return Err(format!("`{sym}` is not in the {th} signature"));
        }
        let (nf, steps) = rewrite::normalize_counted(&t, th);
        Ok(format!(
            "{}   ({steps} rewrite step{})",
            print::term_to_string(&nf),
            if steps == 1 { "" } else { "s" }
        ))
    };
    run().unwrap_or_else(|e| format!("error: {e}"))
}

/// Solves a problem file; returns the JSON report (or an error object).
#[wasm_bindgen]
pub fn unify_problem(text: &str, all: bool, max_branches: u32) -> String {
    let run = || -> Result<String, String> {
        let problem = parse::parse_problem(text).map_err(|e| e.to_string())?;
        let opts = SolveOptions {
            all,
            nil_complete: !all,
            max_branches: max_branches as usize,
        };
        let report = pipeline::solve(&problem, &opts).map_err(|e| e.to_string())?;
        Ok(serde_json::to_string_pretty(&print::report_to_json(&report)).unwrap())
    };
    run().unwrap_or_else(|e| format!("{{\"status\":\"error\",\"message\":{}}}", serde_json::to_string(&e).unwrap()))
}

/// Pretty text form of a unify run, same layout as the CLI.
#[wasm_bindgen]
pub fn unify_problem_text(text: &str, all: bool, max_branches: u32) -> String {
    let run = || -> Result<String, String> {
        let problem = parse::parse_problem(text).map_err(|e| e.to_string())?;
        let opts = SolveOptions {
            all,
            nil_complete: !all,
            max_branches: max_branches as usize,
        };
        let report = pipeline::solve(&problem, &opts).map_err(|e| e.to_string())?;
        Ok(print::report_to_string(&report))
    };
    run().unwrap_or_else(|e| format!("error: {e}"))
}

/// The scripted CBC attack narrative under bc1, bc0, or the
/// namestamp-second variant.
#[wasm_bindgen]
pub fn attack_demo(mode: &str) -> String {
    let run = || -> Result<String, String> {
        let r = match mode {
            "bc0" => attack::attack_demo(TheoryId::Bc0),
            "variant" => attack::attack_demo_namestamp_second(),
            _ => attack::attack_demo(TheoryId::Bc1),
        }
        .map_err(|e| e.to_string())?;
        Ok(r.text)
    };
    run().unwrap_or_else(|e| format!("error: {e}"))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn normalize_binding_works() {
        let s = normalize_term("db(bc([a], y), y)", "dbc");
        assert!(s.starts_with("[a]"), "{s}");
    }

    #[test]
    fn unify_binding_works() {
        let s = unify_problem_text("problem bc0 { U =? bc(V, x); V =? nil; }", true, 1000);
        assert!(s.contains("unifiable"), "{s}");
    }
}
