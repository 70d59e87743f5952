//! Standard-form equations and unification problems.
//!
//! Every equation has a variable on the left and a flat right-hand
//! side from the shape catalog: U =? V, U =? bc(V,y), U =? db(V,y),
//! U =? cons(v,W), U =? nil (list shapes) and u =? v, v =? h(w,x),
//! u =? g(w,y), u =? const (element shapes). In bc1 mode two extra
//! element shapes carry the interpreted shell: u =? enc(v) and
//! u =? a₁^…^aₙ over variable/constant atoms.

use crate::term::{FreshSupply, Subst, Term, Var};
use crate::theory::TheoryId;
use std::collections::BTreeSet;
use std::fmt;

/// A variable-or-constant atom in a flattened xor right-hand side.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Atom {
    Var(Var),
    Const(String),
}

impl Atom {
    pub fn to_term(&self) -> Term {
        match self {
            Atom::Var(v) => Term::var(v.clone()),
            Atom::Const(c) => Term::constant(c.clone()),
        }
    }
}

impl fmt::Display for Atom {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Atom::Var(v) => write!(f, "{v}"),
            Atom::Const(c) => write!(f, "{c}"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Equation {
    // list equations
    VarVarL(Var, Var),
    Nil(Var),
    Cons(Var, Var, Var),
    Bc(Var, Var, Var),
    Db(Var, Var, Var),
    // element equations
    VarVarE(Var, Var),
    ConstEq(Var, String),
    H(Var, Var, Var),
    G(Var, Var, Var),
    Enc(Var, Var),
    Xor(Var, Vec<Atom>),
}

impl Equation {
    pub fn lhs(&self) -> &Var {
        match self {
            Equation::VarVarL(u, _)
            | Equation::Nil(u)
            | Equation::Cons(u, _, _)
            | Equation::Bc(u, _, _)
            | Equation::Db(u, _, _)
            | Equation::VarVarE(u, _)
            | Equation::ConstEq(u, _)
            | Equation::H(u, _, _)
            | Equation::G(u, _, _)
            | Equation::Enc(u, _)
            | Equation::Xor(u, _) => u,
        }
    }

    pub fn is_list(&self) -> bool {
        matches!(
            self,
            Equation::VarVarL(..)
                | Equation::Nil(_)
                | Equation::Cons(..)
                | Equation::Bc(..)
                | Equation::Db(..)
        )
    }

    /// A chain equation links two list variables through bc or db.
    pub fn is_chain(&self) -> bool {
        matches!(self, Equation::Bc(..) | Equation::Db(..))
    }

    pub fn rhs_term(&self) -> Term {
        match self {
            Equation::VarVarL(_, v) | Equation::VarVarE(_, v) => Term::var(v.clone()),
            Equation::Nil(_) => Term::Nil,
            Equation::Cons(_, h, t) => Term::cons(Term::var(h.clone()), Term::var(t.clone())),
            Equation::Bc(_, l, e) => Term::bc(Term::var(l.clone()), Term::var(e.clone())),
            Equation::Db(_, l, e) => Term::db(Term::var(l.clone()), Term::var(e.clone())),
            Equation::ConstEq(_, c) => Term::constant(c.clone()),
            Equation::H(_, a, b) => Term::h(Term::var(a.clone()), Term::var(b.clone())),
            Equation::G(_, a, b) => Term::g(Term::var(a.clone()), Term::var(b.clone())),
            Equation::Enc(_, v) => Term::enc(Term::var(v.clone())),
            Equation::Xor(_, atoms) => Term::xor(atoms.iter().map(|a| a.to_term()).collect()),
        }
    }

    pub fn vars(&self) -> Vec<Var> {
        let mut out = vec![self.lhs().clone()];
        match self {
            Equation::VarVarL(_, v) | Equation::VarVarE(_, v) | Equation::Enc(_, v) => {
                out.push(v.clone())
            }
            Equation::Nil(_) | Equation::ConstEq(_, _) => {}
            Equation::Cons(_, a, b)
            | Equation::Bc(_, a, b)
            | Equation::Db(_, a, b)
            | Equation::H(_, a, b)
            | Equation::G(_, a, b) => {
                out.push(a.clone());
                out.push(b.clone());
            }
            Equation::Xor(_, atoms) => {
                for a in atoms {
                    if let Atom::Var(v) = a {
                        out.push(v.clone());
                    }
                }
            }
        }
        out
    }

    /// Replaces every occurrence of `from` (lhs included) by `to`.
    /// Xor atom lists re-canonicalize, cancelling newly equal pairs.
    pub fn rename(&self, from: &Var, to: &Var) -> Equation {
        let r = |v: &Var| if v == from { to.clone() } else { v.clone() };
        match self {
            Equation::VarVarL(a, b) => Equation::VarVarL(r(a), r(b)),
            Equation::Nil(a) => Equation::Nil(r(a)),
            Equation::Cons(a, b, c) => Equation::Cons(r(a), r(b), r(c)),
            Equation::Bc(a, b, c) => Equation::Bc(r(a), r(b), r(c)),
            Equation::Db(a, b, c) => Equation::Db(r(a), r(b), r(c)),
            Equation::VarVarE(a, b) => Equation::VarVarE(r(a), r(b)),
            Equation::ConstEq(a, c) => Equation::ConstEq(r(a), c.clone()),
            Equation::H(a, b, c) => Equation::H(r(a), r(b), r(c)),
            Equation::G(a, b, c) => Equation::G(r(a), r(b), r(c)),
            Equation::Enc(a, b) => Equation::Enc(r(a), r(b)),
            Equation::Xor(a, atoms) => {
                let mut xs: Vec<Atom> = atoms
                    .iter()
                    .map(|at| match at {
                        Atom::Var(v) => Atom::Var(r(v)),
                        Atom::Const(c) => Atom::Const(c.clone()),
                    })
                    .collect();
                xs.sort();
                // cancel pairs mod 2
                let mut canon = Vec::new();
                let mut i = 0;
                while i < xs.len() {
                    let mut run = 1;
                    while i + run < xs.len() && xs[i + run] == xs[i] {
                        run += 1;
                    }
                    if run % 2 == 1 {
                        canon.push(xs[i].clone());
                    }
                    i += run;
                }
                Equation::Xor(r(a), canon)
            }
        }
    }

    /// Both sides as terms, for checking against the normalizer.
    pub fn as_term_pair(&self) -> (Term, Term) {
        (Term::var(self.lhs().clone()), self.rhs_term())
    }

    /// True for x =? x and empty-xor forms that hold trivially.
    pub fn is_trivial(&self) -> bool {
        match self {
            Equation::VarVarL(a, b) | Equation::VarVarE(a, b) => a == b,
            Equation::Xor(a, atoms) => atoms.len() == 1 && atoms[0] == Atom::Var(a.clone()),
            _ => false,
        }
    }

    pub fn holds_under(&self, s: &Subst, th: TheoryId) -> bool {
        let (l, r) = self.as_term_pair();
        crate::rewrite::eq_mod(&s.apply(&l), &s.apply(&r), th)
    }
}

impl fmt::Display for Equation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Equation::VarVarL(a, b) | Equation::VarVarE(a, b) => write!(f, "{a} =? {b}"),
            Equation::Nil(a) => write!(f, "{a} =? nil"),
            Equation::Cons(a, h, t) => write!(f, "{a} =? cons({h}, {t})"),
            Equation::Bc(a, l, e) => write!(f, "{a} =? bc({l}, {e})"),
            Equation::Db(a, l, e) => write!(f, "{a} =? db({l}, {e})"),
            Equation::ConstEq(a, c) => write!(f, "{a} =? {c}"),
            Equation::H(a, x, y) => write!(f, "{a} =? h({x}, {y})"),
            Equation::G(a, x, y) => write!(f, "{a} =? g({x}, {y})"),
            Equation::Enc(a, v) => write!(f, "{a} =? enc({v})"),
            Equation::Xor(a, atoms) => {
                write!(f, "{a} =? ")?;
                if atoms.is_empty() {
                    return write!(f, "0");
                }
                for (i, at) in atoms.iter().enumerate() {
                    if i > 0 {
                        write!(f, " ^ ")?;
                    }
                    write!(f, "{at}")?;
                }
                Ok(())
            }
        }
    }
}

/// A unification problem in standard form.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Problem {
    pub theory: TheoryId,
    pub equations: BTreeSet<Equation>,
    pub supply: FreshSupply,
    pub constants: BTreeSet<String>,
    /// Variables of the raw input, for restricting reported unifiers.
    pub original_vars: BTreeSet<Var>,
    /// The raw input pairs, for soundness checks on final unifiers.
    pub original_equations: Vec<(Term, Term)>,
}

impl Problem {
    pub fn empty(theory: TheoryId) -> Problem {
        Problem {
            theory,
            equations: BTreeSet::new(),
            supply: FreshSupply::new(),
            constants: BTreeSet::new(),
            original_vars: BTreeSet::new(),
            original_equations: Vec::new(),
        }
    }

    pub fn list_equations(&self) -> impl Iterator<Item = &Equation> {
        self.equations.iter().filter(|e| e.is_list())
    }

    pub fn element_equations(&self) -> impl Iterator<Item = &Equation> {
        self.equations.iter().filter(|e| !e.is_list())
    }

    pub fn all_vars(&self) -> BTreeSet<Var> {
        let mut out = BTreeSet::new();
        for e in &self.equations {
            out.extend(e.vars());
        }
        out
    }

    pub fn insert(&mut self, eq: Equation) {
        if !eq.is_trivial() {
            self.equations.insert(eq);
        }
    }
}
