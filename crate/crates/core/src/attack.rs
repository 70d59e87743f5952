//! The scripted CBC attack demonstration: the intruder's unification
//! problem `bc([I, z], w) =? cons(h(I, w), [h(m, h(A, v))])` solved
//! under the xor interpretation recovers
//! `z := m ⊕ h(A,v) ⊕ h(I,w)`.

use crate::errors::Result;
use crate::pipeline::{self, SolveOptions};
use crate::print::term_to_string;
use crate::rewrite::eq_mod;
use crate::standardize::to_standard_form;
use crate::term::{Sort, Term, Var};
use crate::theory::TheoryId;

pub struct AttackReport {
    pub text: String,
    pub success: bool,
}

const CONSTANTS: [&str; 6] = ["A", "B", "I", "m", "v", "w"];

fn z_var() -> Var {
    Var::new("z", Sort::Element)
}

fn konst(n: &str) -> Term {
    Term::constant(n)
}

/// The main scenario: namestamp first, per the insecure protocol
/// variant. Theory override runs the same problem under bc0, where the
/// uninterpreted h admits no attack.
pub fn attack_demo(theory: TheoryId) -> Result<AttackReport> {
    let z = Term::var(z_var());
    let h_iw = Term::h(konst("I"), konst("w"));
    let h_av = Term::h(konst("A"), konst("v"));
    let h_m = Term::h(konst("m"), h_av.clone());
    let lhs = Term::bc(Term::list(vec![konst("I"), z.clone()]), konst("w"));
    let rhs = Term::cons(h_iw.clone(), Term::list(vec![h_m]));
    let problem = to_standard_form(
        vec![(lhs.clone(), rhs.clone())],
        theory,
        CONSTANTS.iter().map(|s| s.to_string()),
    )?;
    let report = pipeline::solve(&problem, &SolveOptions::default())?;

    let mut text = String::new();
    text.push_str("CBC attack demo: intruder I replays A's second cipher block to B\n");
    text.push_str(&format!(
        "problem ({theory}): {} =? {}\n",
        term_to_string(&lhs),
        term_to_string(&rhs)
    ));
    let expected = Term::xor(vec![konst("m"), h_av, h_iw]);
    let mut found: Option<Term> = None;
    for u in &report.unifiers {
        if let Some(t) = u.bindings.get(&z_var()) {
            if theory == TheoryId::Bc1 && eq_mod(t, &expected, TheoryId::Bc1) {
                found = Some(t.clone());
                break;
            }
            if found.is_none() {
                found = Some(t.clone());
            }
        }
    }
    let success = match (&found, theory) {
        (Some(t), TheoryId::Bc1) => eq_mod(t, &expected, TheoryId::Bc1),
        _ => false,
    };
    match &found {
        Some(t) => {
            text.push_str(&format!("recovered: z := {}\n", term_to_string(t)));
            if success {
                text.push_str(&format!(
                    "PASS: z equals m ^ h(A, v) ^ h(I, w) modulo bc1 (= {})\n",
                    term_to_string(&expected)
                ));
            } else {
                text.push_str("FAIL: recovered z does not match the known attack term\n");
            }
        }
        None => {
            if theory == TheoryId::Bc1 {
                text.push_str("FAIL: no unifier found for z\n");
            } else {
                text.push_str(
                    "no unifier: with h uninterpreted the replayed block forces a constant clash\n",
                );
            }
        }
    }
    Ok(AttackReport { text, success })
}

/// Remark-style variant: the namestamp forms the second block, so the
/// intruder's replay only relates z to the secret through m ⊕ v.
pub fn attack_demo_namestamp_second() -> Result<AttackReport> {
    // A sends bc([m, A], v) = [h(m,v), h(A, h(m,v))]; the intruder
    // replays the first block and must solve
    // bc([z, i0], w) =? cons(h(m, v), [y]) for z.
    let z = Term::var(z_var());
    let i0 = Term::constant("I");
    let y = Term::var(Var::new("y", Sort::Element));
    let lhs = Term::bc(Term::list(vec![z.clone(), i0]), konst("w"));
    let rhs = Term::cons(Term::h(konst("m"), konst("v")), Term::list(vec![y.clone()]));
    let problem = to_standard_form(
        vec![(lhs.clone(), rhs.clone())],
        TheoryId::Bc1,
        CONSTANTS.iter().map(|s| s.to_string()),
    )?;
    let report = pipeline::solve(&problem, &SolveOptions::default())?;
    let expected = Term::xor(vec![konst("m"), konst("v"), konst("w")]);
    let mut text = String::new();
    text.push_str("variant: namestamp as second block (leak-proof protocol)\n");
    text.push_str(&format!(
        "problem (bc1): {} =? {}\n",
        term_to_string(&lhs),
        term_to_string(&rhs)
    ));
    let mut success = false;
    for u in &report.unifiers {
        if let Some(t) = u.bindings.get(&z_var()) {
            if eq_mod(t, &expected, TheoryId::Bc1) {
                text.push_str(&format!("recovered: z := {}\n", term_to_string(t)));
                text.push_str(
                    "no attack: intruder obtains only m ^ v (z ^ w), not the secret m\n",
                );
                success = true;
                break;
            }
        }
    }
    if !success {
        text.push_str("unexpected: the variant equation did not solve as analyzed\n");
    }
    Ok(AttackReport { text, success })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn bc1_attack_succeeds() {
        let r = attack_demo(TheoryId::Bc1).unwrap();
        assert!(r.success, "{}", r.text);
        assert!(r.text.contains("PASS"));
    }

    #[test]
    fn bc0_attack_fails() {
        let r = attack_demo(TheoryId::Bc0).unwrap();
        assert!(!r.success);
        assert!(r.text.contains("no unifier"), "{}", r.text);
    }

    #[test]
    fn namestamp_second_leaks_only_m_xor_v() {
        let r = attack_demo_namestamp_second().unwrap();
        assert!(r.success, "{}", r.text);
        assert!(r.text.contains("no attack"));
    }
}
