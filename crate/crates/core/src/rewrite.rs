//! Normalization under the convergent rewrite systems BC, DBC, DBC′,
//! the car/cdr-enlarged variant, and BC1's xor interpretation.
//!
//! Rewriting is innermost to fixpoint; the systems are convergent, so
//! any strategy reaches the same normal form, and innermost keeps the
//! step count easy to instrument. In BC1 mode h(x,y) is expanded to
//! enc(x ⊕ y) during normalization, and xor canonicalization (flatten,
//! sort, cancel equal pairs, drop unit) is applied by construction
//! after every step, so one canonical form decides equality.

use crate::errors::{Result, SolverError};
use crate::term::Term;
use crate::theory::TheoryId;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Strategy {
    LeftmostInnermost,
    RightmostInnermost,
}

/// One root-rewrite step, if any rule matches. Children are assumed
/// to be in normal form already (innermost discipline).
fn root_step(t: &Term, th: TheoryId) -> Option<Term> {
    match t {
        Term::Bc(list, iv) => match &**list {
            Term::Nil => Some(Term::Nil),
            Term::Cons(x, y) => {
                let head = Term::h((**x).clone(), (**iv).clone());
                Some(Term::cons(
                    head.clone(),
                    Term::bc((**y).clone(), head),
                ))
            }
            _ => None,
        },
        Term::Db(list, iv) if th.has_db() => match &**list {
            // db(bc(X,y),y) -> X takes priority over the cons rule; the
            // two cannot actually overlap under innermost rewriting,
            // since an unfoldable inner bc is already gone.
            Term::Bc(x, y) if th != TheoryId::DbcPrime && **y == **iv => Some((**x).clone()),
            Term::Nil => Some(Term::Nil),
            Term::Cons(x, y) => Some(Term::cons(
                Term::g((**x).clone(), (**iv).clone()),
                Term::db((**y).clone(), (**x).clone()),
            )),
            _ => None,
        },
        Term::G(l, r) if th.has_db() => match &**l {
            Term::H(x, y) if **y == **r => Some((**x).clone()),
            _ => None,
        },
        Term::H(x, y) if th == TheoryId::Bc1 => Some(Term::enc(Term::xor(vec![
            (**x).clone(),
            (**y).clone(),
        ]))),
        Term::Car(l) if th.has_projections() => match &**l {
            Term::Cons(x, _) => Some((**x).clone()),
            _ => None,
        },
        Term::Cdr(l) if th.has_projections() => match &**l {
            Term::Cons(_, y) => Some((**y).clone()),
            _ => None,
        },
        _ => None,
    }
}

fn normalize_rec(t: &Term, th: TheoryId, strategy: Strategy, steps: &mut usize) -> Term {
    let rebuilt = match t {
        Term::Var(_) | Term::Const(_) | Term::Nil => t.clone(),
        Term::Cons(a, b) => rebuild2(t, a, b, th, strategy, steps, Term::cons),
        Term::Bc(a, b) => rebuild2(t, a, b, th, strategy, steps, Term::bc),
        Term::Db(a, b) => rebuild2(t, a, b, th, strategy, steps, Term::db),
        Term::H(a, b) => rebuild2(t, a, b, th, strategy, steps, Term::h),
        Term::G(a, b) => rebuild2(t, a, b, th, strategy, steps, Term::g),
        Term::Enc(a) => Term::enc(normalize_rec(a, th, strategy, steps)),
        Term::Car(a) => Term::car(normalize_rec(a, th, strategy, steps)),
        Term::Cdr(a) => Term::cdr(normalize_rec(a, th, strategy, steps)),
        Term::Xor(args) => {
            let normed: Vec<Term> = match strategy {
                Strategy::LeftmostInnermost => args
                    .iter()
                    .map(|a| normalize_rec(a, th, strategy, steps))
                    .collect(),
                Strategy::RightmostInnermost => {
                    let mut v: Vec<Term> = args
                        .iter()
                        .rev()
                        .map(|a| normalize_rec(a, th, strategy, steps))
                        .collect();
                    v.reverse();
                    v
                }
            };
            Term::xor(normed)
        }
    };
    match root_step(&rebuilt, th) {
        Some(next) => {
            *steps += 1;
            normalize_rec(&next, th, strategy, steps)
        }
        None => rebuilt,
    }
}

fn rebuild2(
    _t: &Term,
    a: &Term,
    b: &Term,
    th: TheoryId,
    strategy: Strategy,
    steps: &mut usize,
    ctor: fn(Term, Term) -> Term,
) -> Term {
    match strategy {
        Strategy::LeftmostInnermost => {
            let na = normalize_rec(a, th, strategy, steps);
            let nb = normalize_rec(b, th, strategy, steps);
            ctor(na, nb)
        }
        Strategy::RightmostInnermost => {
            let nb = normalize_rec(b, th, strategy, steps);
            let na = normalize_rec(a, th, strategy, steps);
            ctor(na, nb)
        }
    }
}

/// The unique normal form of `t` modulo the theory.
pub fn normalize(t: &Term, th: TheoryId) -> Term {
    normalize_counted(t, th).0
}

/// Normal form plus the number of rewrite steps taken.
pub fn normalize_counted(t: &Term, th: TheoryId) -> (Term, usize) {
    let mut steps = 0;
    let nf = normalize_rec(t, th, Strategy::LeftmostInnermost, &mut steps);
    (nf, steps)
}

pub fn normalize_with(t: &Term, th: TheoryId, strategy: Strategy) -> Term {
    let mut steps = 0;
    normalize_rec(t, th, strategy, &mut steps)
}

/// Equality modulo the theory: both sides normalize to the same term.
pub fn equal_modulo(s: &Term, t: &Term, th: TheoryId) -> Result<bool> {
    if s.sort() != t.sort() {
        return Err(SolverError::sort_mismatch(
            "equal_modulo on differently sorted terms",
            s.sort(),
            t.sort(),
        ));
    }
    Ok(normalize(s, th) == normalize(t, th))
}

/// Ground-term convenience used all over the test suites; panics on a
/// sort mismatch, which would be a test bug.
pub fn eq_mod(s: &Term, t: &Term, th: TheoryId) -> bool {
    equal_modulo(s, t, th).expect("sort mismatch")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::term::{Sort, Term, Var};

    fn ev(n: &str) -> Term {
        Term::var(Var::new(n, Sort::Element))
    }

    fn lv(n: &str) -> Term {
        Term::var(Var::new(n, Sort::List))
    }

    fn c(n: &str) -> Term {
        Term::constant(n)
    }

    #[test]
    fn bc_axioms() {
        assert_eq!(normalize(&Term::bc(Term::Nil, ev("z")), TheoryId::Bc0), Term::Nil);
        // bc([A, m], v) unfolds to [h(A,v), h(m, h(A,v))]
        let list = Term::list(vec![c("A"), c("m")]);
        let t = Term::bc(list, c("v"));
        let h1 = Term::h(c("A"), c("v"));
        let expected = Term::list(vec![h1.clone(), Term::h(c("m"), h1)]);
        assert_eq!(normalize(&t, TheoryId::Bc0), expected);
    }

    #[test]
    fn dbc_axioms() {
        let t = Term::g(Term::h(c("a"), c("b")), c("b"));
        assert_eq!(normalize(&t, TheoryId::Dbc), c("a"));
        let one = Term::list(vec![c("a")]);
        let t = Term::db(Term::bc(one.clone(), ev("y")), ev("y"));
        assert_eq!(normalize(&t, TheoryId::Dbc), one);
    }

    #[test]
    fn db_collapse_only_in_full_dbc() {
        // with a variable list the inner bc cannot unfold, so only the
        // sixth rule applies; DBC' lacks it
        let t = Term::db(Term::bc(lv("X"), ev("y")), ev("y"));
        assert_eq!(normalize(&t, TheoryId::Dbc), lv("X"));
        assert_eq!(normalize(&t, TheoryId::DbcPrime), t);
    }

    #[test]
    fn bc1_xor_interpretation() {
        // m ⊕ enc(A⊕v) ⊕ enc(A⊕v) -> m
        let e = Term::enc(Term::xor(vec![c("A"), c("v")]));
        let t = Term::xor(vec![c("m"), e.clone(), e]);
        assert_eq!(normalize(&t, TheoryId::Bc1), c("m"));
        // h(x,y) expands to enc(x ⊕ y)
        let t = Term::h(c("a"), c("b"));
        assert_eq!(
            normalize(&t, TheoryId::Bc1),
            Term::enc(Term::xor(vec![c("a"), c("b")]))
        );
    }

    #[test]
    fn projections() {
        let l = Term::list(vec![c("a"), c("b")]);
        assert_eq!(normalize(&Term::car(l.clone()), TheoryId::DbcPlus), c("a"));
        assert_eq!(
            normalize(&Term::cdr(l), TheoryId::DbcPlus),
            Term::list(vec![c("b")])
        );
    }

    #[test]
    fn remark_5_3_witness() {
        // g(h(g(t,u),u),u) =DBC g(t,u), yet h(g(t,u),u) differs from a
        // constant t
        let t = c("t");
        let u = c("u");
        let gtu = Term::g(t.clone(), u.clone());
        let lhs = Term::g(Term::h(gtu.clone(), u.clone()), u.clone());
        assert!(eq_mod(&lhs, &gtu, TheoryId::Dbc));
        assert!(!eq_mod(&Term::h(gtu, u), &t, TheoryId::Dbc));
    }

    #[test]
    fn strategies_agree_on_nested_term() {
        let t = Term::db(
            Term::bc(Term::list(vec![c("a"), c("b"), c("e")]), c("v")),
            c("v"),
        );
        let l = normalize_with(&t, TheoryId::Dbc, Strategy::LeftmostInnermost);
        let r = normalize_with(&t, TheoryId::Dbc, Strategy::RightmostInnermost);
        assert_eq!(l, r);
    }

    #[test]
    fn equal_modulo_sort_error() {
        assert!(equal_modulo(&c("a"), &Term::Nil, TheoryId::Bc0).is_err());
    }

    #[test]
    fn step_count_is_finite_and_small() {
        let t = Term::bc(
            Term::list(vec![c("a"), c("b"), c("e"), c("f")]),
            c("v"),
        );
        let (_, steps) = normalize_counted(&t, TheoryId::Bc0);
        assert!(steps > 0 && steps <= t.size() * t.size());
    }
}
