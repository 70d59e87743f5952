//! Conversion of arbitrary well-typed equation pairs into standard form.
//!
//! Every non-variable proper subterm is abstracted by a fresh variable
//! with a defining equation; identical subterm occurrences share one
//! abstraction variable, so the output is linear in the input dag size.
//! The sort check is done here, up front, so the inference rules are
//! total on their shapes — the paper leaves type-inference failure
//! implicit, this module makes it explicit.

use crate::equation::{Atom, Equation, Problem};
use crate::errors::{Result, SolverError};
use crate::term::{Sort, Term, Var};
use crate::theory::TheoryId;
use std::collections::BTreeMap;

struct Ctx {
    problem: Problem,
    memo: BTreeMap<Term, Var>,
}

impl Ctx {
    fn signature_check(&self, t: &Term) -> Result<()> {
        // car/cdr never appear in unification problems; the projection
        // rules are a normalizer-only variant.
        if matches!(t, Term::Car(_) | Term::Cdr(_)) {
            return Err(SolverError::Signature {
                symbol: if matches!(t, Term::Car(_)) { "car" } else { "cdr" }.into(),
                theory: format!("{} unification", self.problem.theory),
            });
        }
        if let Some(sym) = unify_signature_violation(self.problem.theory, t) {
            return Err(SolverError::Signature {
                symbol: sym.into(),
                theory: format!("{} unification", self.problem.theory),
            });
        }
        Ok(())
    }

    /// Returns a variable equal to `t`, abstracting non-variable terms
    /// through a defining equation.
    fn abstract_term(&mut self, t: &Term) -> Result<Var> {
        if let Term::Var(v) = t {
            return Ok(v.clone());
        }
        if let Some(v) = self.memo.get(t) {
            return Ok(v.clone());
        }
        let hint = match t.sort() {
            Sort::List => "L",
            Sort::Element => "e",
        };
        let v = self.problem.supply.fresh(t.sort(), hint);
        let eq = self.define(v.clone(), t)?;
        self.problem.insert(eq);
        self.memo.insert(t.clone(), v.clone());
        Ok(v)
    }

    /// The catalog equation defining `v =? t`, abstracting t's children.
    fn define(&mut self, v: Var, t: &Term) -> Result<Equation> {
        Ok(match t {
            Term::Var(w) => {
                if v.sort == Sort::List {
                    Equation::VarVarL(v, w.clone())
                } else {
                    Equation::VarVarE(v, w.clone())
                }
            }
            Term::Nil => Equation::Nil(v),
            Term::Const(c) => Equation::ConstEq(v, c.clone()),
            Term::Cons(h, tl) => {
                let h = self.abstract_term(h)?;
                let tl = self.abstract_term(tl)?;
                Equation::Cons(v, h, tl)
            }
            Term::Bc(l, e) => {
                let l = self.abstract_term(l)?;
                let e = self.abstract_term(e)?;
                Equation::Bc(v, l, e)
            }
            Term::Db(l, e) => {
                let l = self.abstract_term(l)?;
                let e = self.abstract_term(e)?;
                Equation::Db(v, l, e)
            }
            Term::H(a, b) => {
                let a = self.abstract_term(a)?;
                let b = self.abstract_term(b)?;
                Equation::H(v, a, b)
            }
            Term::G(a, b) => {
                let a = self.abstract_term(a)?;
                let b = self.abstract_term(b)?;
                Equation::G(v, a, b)
            }
            Term::Enc(a) => {
                let a = self.abstract_term(a)?;
                Equation::Enc(v, a)
            }
            Term::Xor(args) => {
                let mut atoms = Vec::new();
                for a in args.iter() {
                    match &**a {
                        Term::Const(c) => atoms.push(Atom::Const(c.clone())),
                        other => atoms.push(Atom::Var(self.abstract_term(other)?)),
                    }
                }
                atoms.sort();
                Equation::Xor(v, atoms)
            }
            Term::Car(_) | Term::Cdr(_) => unreachable!("rejected by signature_check"),
        })
    }
}

/// Which symbols a theory admits inside a *unification* problem.
fn unify_signature_violation(th: TheoryId, t: &Term) -> Option<&'static str> {
    // dbc_plus unification is not supported; dbc_prime shares the dbc
    // equation shapes.
    let effective = match th {
        TheoryId::DbcPrime => TheoryId::Dbc,
        other => other,
    };
    effective.signature_violation(t)
}

/// Converts raw pairs into a standard-form [`Problem`]. For every θ,
/// θ unifies the output iff its restriction to the original variables
/// unifies the input.
pub fn to_standard_form(
    raw: Vec<(Term, Term)>,
    theory: TheoryId,
    constants: impl IntoIterator<Item = String>,
) -> Result<Problem> {
    if theory == TheoryId::DbcPlus {
        return Err(SolverError::Signature {
            symbol: "car/cdr projections".into(),
            theory: "unification (normalization-only variant)".into(),
        });
    }
    let mut ctx = Ctx {
        problem: Problem::empty(theory),
        memo: BTreeMap::new(),
    };
    ctx.problem.constants.extend(constants);
    for (l, r) in &raw {
        if !l.well_typed() || !r.well_typed() {
            return Err(SolverError::Sort(format!(
                "ill-typed term in equation {l:?} =? {r:?}"
            )));
        }
        if l.sort() != r.sort() {
            return Err(SolverError::sort_mismatch(
                "equation sides have different sorts",
                l.sort(),
                r.sort(),
            ));
        }
        ctx.signature_check(l)?;
        ctx.signature_check(r)?;
        ctx.problem.original_vars.extend(l.vars());
        ctx.problem.original_vars.extend(r.vars());
    }
    ctx.problem.original_equations = raw.clone();
    for (l, r) in raw {
        let eq = match (&l, &r) {
            (Term::Var(v), _) => ctx.define(v.clone(), &r)?,
            (_, Term::Var(v)) => ctx.define(v.clone(), &l)?,
            _ => {
                let v = ctx.abstract_term(&l)?;
                ctx.define(v, &r)?
            }
        };
        ctx.problem.insert(eq);
    }
    Ok(ctx.problem)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::term::FreshSupply;

    fn lv(n: &str) -> Var {
        Var::new(n, Sort::List)
    }

    fn ev(n: &str) -> Var {
        Var::new(n, Sort::Element)
    }

    #[test]
    fn already_standard_is_untouched() {
        let raw = vec![(
            Term::var(lv("U")),
            Term::bc(Term::var(lv("V")), Term::var(ev("y"))),
        )];
        let p = to_standard_form(raw, TheoryId::Bc0, []).unwrap();
        assert_eq!(p.equations.len(), 1);
        assert!(p
            .equations
            .contains(&Equation::Bc(lv("U"), lv("V"), ev("y"))));
        assert_eq!(p.supply, FreshSupply::new());
    }

    #[test]
    fn abstracts_nested_subterms() {
        // X =? bc(cons(a, nil), b) with constants a, b
        let raw = vec![(
            Term::var(lv("X")),
            Term::bc(
                Term::cons(Term::constant("a"), Term::Nil),
                Term::constant("b"),
            ),
        )];
        let p = to_standard_form(raw, TheoryId::Bc0, ["a".into(), "b".into()]).unwrap();
        // X =? bc(L, e_b), L =? cons(e_a, L2), L2 =? nil, e_a =? a, e_b =? b
        assert_eq!(p.equations.len(), 5);
        let shapes: Vec<String> = p.equations.iter().map(|e| e.to_string()).collect();
        assert!(shapes.iter().any(|s| s.ends_with("=? nil")));
        assert_eq!(
            shapes
                .iter()
                .filter(|s| s.ends_with("=? a") || s.ends_with("=? b"))
                .count(),
            2
        );
        // every equation is flat: all rhs arguments are variables
        for e in &p.equations {
            for v in e.vars() {
                assert!(v.sort == Sort::List || v.sort == Sort::Element);
            }
        }
    }

    #[test]
    fn shared_subterms_share_abstractions() {
        let hab = Term::h(Term::constant("a"), Term::constant("b"));
        let raw = vec![
            (Term::var(ev("x")), hab.clone()),
            (Term::var(ev("y")), hab),
        ];
        let p = to_standard_form(raw, TheoryId::Bc0, ["a".into(), "b".into()]).unwrap();
        // x =? h(ea, eb), y =? h(ea, eb), ea =? a, eb =? b
        assert_eq!(p.equations.len(), 4);
    }

    #[test]
    fn sort_mismatch_rejected() {
        let raw = vec![(Term::var(lv("U")), Term::constant("a"))];
        assert!(matches!(
            to_standard_form(raw, TheoryId::Bc0, []),
            Err(SolverError::Sort(_))
        ));
    }

    #[test]
    fn bc1_rejects_g_and_bc0_rejects_xor() {
        let raw = vec![(
            Term::var(ev("u")),
            Term::g(Term::var(ev("x")), Term::var(ev("y"))),
        )];
        assert!(matches!(
            to_standard_form(raw, TheoryId::Bc1, []),
            Err(SolverError::Signature { .. })
        ));
        let raw = vec![(
            Term::var(ev("u")),
            Term::xor(vec![Term::var(ev("x")), Term::var(ev("y"))]),
        )];
        assert!(matches!(
            to_standard_form(raw, TheoryId::Bc0, []),
            Err(SolverError::Signature { .. })
        ));
    }

    #[test]
    fn car_rejected_everywhere() {
        let raw = vec![(Term::var(ev("u")), Term::car(Term::var(lv("U"))))];
        assert!(matches!(
            to_standard_form(raw, TheoryId::Dbc, []),
            Err(SolverError::Signature { .. })
        ));
    }

    #[test]
    fn idempotent_on_standard_output() {
        let raw = vec![(
            Term::var(lv("X")),
            Term::bc(
                Term::cons(Term::var(ev("x")), Term::Nil),
                Term::var(ev("y")),
            ),
        )];
        let p1 = to_standard_form(raw, TheoryId::Bc0, []).unwrap();
        let again: Vec<(Term, Term)> = p1
            .equations
            .iter()
            .map(|e| e.as_term_pair())
            .collect();
        let p2 = to_standard_form(again, TheoryId::Bc0, []).unwrap();
        assert_eq!(p1.equations, p2.equations);
    }

    #[test]
    fn bc1_xor_input_flattens() {
        let raw = vec![(
            Term::var(ev("u")),
            Term::xor(vec![
                Term::var(ev("x")),
                Term::xor(vec![Term::var(ev("y")), Term::constant("a")]),
            ]),
        )];
        let p = to_standard_form(raw, TheoryId::Bc1, ["a".into()]).unwrap();
        assert_eq!(p.equations.len(), 1);
        let eq = p.equations.iter().next().unwrap();
        match eq {
            Equation::Xor(_, atoms) => assert_eq!(atoms.len(), 3),
            other => panic!("expected xor shape, got {other}"),
        }
    }
}
