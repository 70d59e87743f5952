//! Sorted term algebra for the block-chaining signatures.
//!
//! Two disjoint sorts: `Element` and `List`. The fixed signature is
//! `bc, db : List × Element → List`, `cons : Element × List → List`,
//! `h, g : Element × Element → Element`, `nil : List`, plus the
//! xor/enc symbols used when `h` is interpreted for CBC, and the
//! `car`/`cdr` projections used by the enlarged normalizer variant.
//!
//! Terms are immutable values; equality is structural, with xor nodes
//! kept in a canonical flattened form (sorted arguments, equal pairs
//! cancelled, unit dropped) so that structural equality decides
//! equality of xor multisets.

use std::collections::BTreeMap;
use std::fmt;
use std::rc::Rc;

/// The xor unit. An element constant, meaningful in BC1 mode.
pub const XOR_UNIT: &str = "0";

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Sort {
    Element,
    List,
}

impl fmt::Display for Sort {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Sort::Element => write!(f, "element"),
            Sort::List => write!(f, "list"),
        }
    }
}

/// A variable name: a base hint plus an optional counter issued by a
/// fresh-variable supply. User-written variables carry no counter, so
/// generated names can never collide with them.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Var {
    pub base: String,
    pub index: Option<u32>,
    pub sort: Sort,
}

impl Var {
    pub fn new(base: impl Into<String>, sort: Sort) -> Var {
        Var {
            base: base.into(),
            index: None,
            sort,
        }
    }

    pub fn is_fresh(&self) -> bool {
        self.index.is_some()
    }
}

impl fmt::Display for Var {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.index {
            Some(i) => write!(f, "{}#{}", self.base, i),
            None => write!(f, "{}", self.base),
        }
    }
}

/// Issues variables whose names have never been used before in the
/// owning problem. Single-writer: one supply per problem instance.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct FreshSupply {
    counter: u32,
}

impl FreshSupply {
    pub fn new() -> FreshSupply {
        FreshSupply { counter: 0 }
    }

    pub fn fresh(&mut self, sort: Sort, hint: &str) -> Var {
        let index = self.counter;
        self.counter += 1;
        Var {
            base: hint.to_string(),
            index: Some(index),
            sort,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Term {
    Var(Var),
    /// Element-sorted constant (includes the xor unit "0").
    Const(String),
    Nil,
    Cons(Rc<Term>, Rc<Term>),
    Bc(Rc<Term>, Rc<Term>),
    Db(Rc<Term>, Rc<Term>),
    H(Rc<Term>, Rc<Term>),
    G(Rc<Term>, Rc<Term>),
    Enc(Rc<Term>),
    /// Flattened xor multiset; canonical form has sorted args, no
    /// repeated argument, no unit, and at least two arguments.
    Xor(Vec<Rc<Term>>),
    Car(Rc<Term>),
    Cdr(Rc<Term>),
}

impl Term {
    pub fn var(v: Var) -> Term {
        Term::Var(v)
    }

    pub fn cons(head: Term, tail: Term) -> Term {
        Term::Cons(Rc::new(head), Rc::new(tail))
    }

    pub fn bc(list: Term, iv: Term) -> Term {
        Term::Bc(Rc::new(list), Rc::new(iv))
    }

    pub fn db(list: Term, iv: Term) -> Term {
        Term::Db(Rc::new(list), Rc::new(iv))
    }

    pub fn h(l: Term, r: Term) -> Term {
        Term::H(Rc::new(l), Rc::new(r))
    }

    pub fn g(l: Term, r: Term) -> Term {
        Term::G(Rc::new(l), Rc::new(r))
    }

    pub fn enc(t: Term) -> Term {
        Term::Enc(Rc::new(t))
    }

    pub fn car(t: Term) -> Term {
        Term::Car(Rc::new(t))
    }

    pub fn cdr(t: Term) -> Term {
        Term::Cdr(Rc::new(t))
    }

    pub fn constant(name: impl Into<String>) -> Term {
        Term::Const(name.into())
    }

    pub fn xor_unit() -> Term {
        Term::Const(XOR_UNIT.into())
    }

    /// Builds a canonical xor term: flattens nested xors, sorts the
    /// arguments, cancels equal pairs, drops the unit. An empty result
    /// collapses to "0", a singleton to its only argument.
    pub fn xor(args: Vec<Term>) -> Term {
        let mut flat: Vec<Rc<Term>> = Vec::new();
        fn push(flat: &mut Vec<Rc<Term>>, t: Rc<Term>) {
            match &*t {
                Term::Xor(inner) => {
                    for a in inner {
                        push(flat, a.clone());
                    }
                }
                Term::Const(c) if c == XOR_UNIT => {}
                _ => flat.push(t),
            }
        }
        for a in args {
            push(&mut flat, Rc::new(a));
        }
        flat.sort();
        // multiset: arguments equal mod 2 cancel in pairs
        let mut canon: Vec<Rc<Term>> = Vec::new();
        let mut i = 0;
        while i < flat.len() {
            let mut run = 1;
            while i + run < flat.len() && flat[i + run] == flat[i] {
                run += 1;
            }
            if run % 2 == 1 {
                canon.push(flat[i].clone());
            }
            i += run;
        }
        match canon.len() {
            0 => Term::xor_unit(),
            1 => (*canon[0]).clone(),
            _ => Term::Xor(canon),
        }
    }

    /// Builds a nil-terminated list from element terms.
    pub fn list(items: Vec<Term>) -> Term {
        let mut t = Term::Nil;
        for item in items.into_iter().rev() {
            t = Term::cons(item, t);
        }
        t
    }

    /// The sort of a well-typed term. For ill-typed terms this reports
    /// the sort implied by the root symbol.
    pub fn sort(&self) -> Sort {
        match self {
            Term::Var(v) => v.sort,
            Term::Const(_) | Term::H(..) | Term::G(..) | Term::Enc(_) | Term::Xor(_)
            | Term::Car(_) => Sort::Element,
            Term::Nil | Term::Cons(..) | Term::Bc(..) | Term::Db(..) | Term::Cdr(_) => Sort::List,
        }
    }

    /// True iff every node satisfies the argument sorts of the signature.
    pub fn well_typed(&self) -> bool {
        match self {
            Term::Var(_) | Term::Const(_) | Term::Nil => true,
            Term::Cons(h, t) => {
                h.sort() == Sort::Element && t.sort() == Sort::List && h.well_typed() && t.well_typed()
            }
            Term::Bc(l, e) | Term::Db(l, e) => {
                l.sort() == Sort::List && e.sort() == Sort::Element && l.well_typed() && e.well_typed()
            }
            Term::H(a, b) | Term::G(a, b) => {
                a.sort() == Sort::Element
                    && b.sort() == Sort::Element
                    && a.well_typed()
                    && b.well_typed()
            }
            Term::Enc(a) => a.sort() == Sort::Element && a.well_typed(),
            Term::Xor(args) => {
                args.len() >= 2 && args.iter().all(|a| a.sort() == Sort::Element && a.well_typed())
            }
            Term::Car(l) | Term::Cdr(l) => l.sort() == Sort::List && l.well_typed(),
        }
    }

    pub fn is_ground(&self) -> bool {
        match self {
            Term::Var(_) => false,
            Term::Const(_) | Term::Nil => true,
            Term::Cons(a, b) | Term::Bc(a, b) | Term::Db(a, b) | Term::H(a, b) | Term::G(a, b) => {
                a.is_ground() && b.is_ground()
            }
            Term::Enc(a) | Term::Car(a) | Term::Cdr(a) => a.is_ground(),
            Term::Xor(args) => args.iter().all(|a| a.is_ground()),
        }
    }

    pub fn contains_var(&self, v: &Var) -> bool {
        match self {
            Term::Var(w) => w == v,
            Term::Const(_) | Term::Nil => false,
            Term::Cons(a, b) | Term::Bc(a, b) | Term::Db(a, b) | Term::H(a, b) | Term::G(a, b) => {
                a.contains_var(v) || b.contains_var(v)
            }
            Term::Enc(a) | Term::Car(a) | Term::Cdr(a) => a.contains_var(v),
            Term::Xor(args) => args.iter().any(|a| a.contains_var(v)),
        }
    }

    pub fn collect_vars(&self, out: &mut Vec<Var>) {
        match self {
            Term::Var(w) => {
                if !out.contains(w) {
                    out.push(w.clone());
                }
            }
            Term::Const(_) | Term::Nil => {}
            Term::Cons(a, b) | Term::Bc(a, b) | Term::Db(a, b) | Term::H(a, b) | Term::G(a, b) => {
                a.collect_vars(out);
                b.collect_vars(out);
            }
            Term::Enc(a) | Term::Car(a) | Term::Cdr(a) => a.collect_vars(out),
            Term::Xor(args) => {
                for a in args {
                    a.collect_vars(out);
                }
            }
        }
    }

    pub fn vars(&self) -> Vec<Var> {
        let mut out = Vec::new();
        self.collect_vars(&mut out);
        out
    }

    pub fn size(&self) -> usize {
        match self {
            Term::Var(_) | Term::Const(_) | Term::Nil => 1,
            Term::Cons(a, b) | Term::Bc(a, b) | Term::Db(a, b) | Term::H(a, b) | Term::G(a, b) => {
                1 + a.size() + b.size()
            }
            Term::Enc(a) | Term::Car(a) | Term::Cdr(a) => 1 + a.size(),
            Term::Xor(args) => 1 + args.iter().map(|a| a.size()).sum::<usize>(),
        }
    }

    pub fn depth(&self) -> usize {
        match self {
            Term::Var(_) | Term::Const(_) | Term::Nil => 1,
            Term::Cons(a, b) | Term::Bc(a, b) | Term::Db(a, b) | Term::H(a, b) | Term::G(a, b) => {
                1 + a.depth().max(b.depth())
            }
            Term::Enc(a) | Term::Car(a) | Term::Cdr(a) => 1 + a.depth(),
            Term::Xor(args) => 1 + args.iter().map(|a| a.depth()).max().unwrap_or(0),
        }
    }
}

/// A sort-respecting substitution in triangular (dag-solved) form:
/// ordered bindings x₁→t₁,…,xₙ→tₙ where xᵢ occurs in no tⱼ with j ≥ i.
/// `apply` performs simultaneous replacement, so an idempotent
/// substitution applied twice equals itself applied once.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Subst {
    map: BTreeMap<Var, Term>,
}

impl Subst {
    pub fn new() -> Subst {
        Subst::default()
    }

    /// Inserts a binding. Panics on a sort clash: bindings are built
    /// internally from sort-checked equations, so a mismatch is a bug.
    pub fn insert(&mut self, v: Var, t: Term) {
        assert_eq!(v.sort, t.sort(), "sort-violating binding {v} := {t:?}");
        self.map.insert(v, t);
    }

    pub fn get(&self, v: &Var) -> Option<&Term> {
        self.map.get(v)
    }

    pub fn is_empty(&self) -> bool {
        self.map.is_empty()
    }

    pub fn len(&self) -> usize {
        self.map.len()
    }

    pub fn iter(&self) -> impl Iterator<Item = (&Var, &Term)> {
        self.map.iter()
    }

    pub fn domain(&self) -> impl Iterator<Item = &Var> {
        self.map.keys()
    }

    /// Simultaneous replacement of bound variables by their images;
    /// xor nodes are re-canonicalized on the way out.
    pub fn apply(&self, t: &Term) -> Term {
        match t {
            Term::Var(v) => self.map.get(v).cloned().unwrap_or_else(|| t.clone()),
            Term::Const(_) | Term::Nil => t.clone(),
            Term::Cons(a, b) => Term::cons(self.apply(a), self.apply(b)),
            Term::Bc(a, b) => Term::bc(self.apply(a), self.apply(b)),
            Term::Db(a, b) => Term::db(self.apply(a), self.apply(b)),
            Term::H(a, b) => Term::h(self.apply(a), self.apply(b)),
            Term::G(a, b) => Term::g(self.apply(a), self.apply(b)),
            Term::Enc(a) => Term::enc(self.apply(a)),
            Term::Car(a) => Term::car(self.apply(a)),
            Term::Cdr(a) => Term::cdr(self.apply(a)),
            Term::Xor(args) => Term::xor(args.iter().map(|a| self.apply(a)).collect()),
        }
    }

    /// Composition: (self ∘ other)(t) = self(other(t)).
    pub fn compose_after(&self, other: &Subst) -> Subst {
        let mut out = Subst::new();
        for (v, t) in &other.map {
            out.insert(v.clone(), self.apply(t));
        }
        for (v, t) in &self.map {
            if !out.map.contains_key(v) {
                out.insert(v.clone(), t.clone());
            }
        }
        out
    }

    /// True when no bound variable occurs in any image.
    pub fn is_idempotent(&self) -> bool {
        self.map
            .values()
            .all(|t| self.map.keys().all(|v| !t.contains_var(v)))
    }
}

impl FromIterator<(Var, Term)> for Subst {
    fn from_iter<I: IntoIterator<Item = (Var, Term)>>(iter: I) -> Subst {
        let mut s = Subst::new();
        for (v, t) in iter {
            s.insert(v, t);
        }
        s
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn evar(n: &str) -> Var {
        Var::new(n, Sort::Element)
    }

    fn lvar(n: &str) -> Var {
        Var::new(n, Sort::List)
    }

    #[test]
    fn well_typed_signature_conformance() {
        let x = Term::var(evar("x"));
        assert!(Term::cons(x.clone(), Term::Nil).well_typed());
        // sort clash on both argument positions
        assert!(!Term::Cons(Rc::new(Term::Nil), Rc::new(x.clone())).well_typed());
        let a = Term::constant("a");
        let b = Term::constant("b");
        assert!(Term::bc(Term::list(vec![a.clone()]), b.clone()).well_typed());
        assert!(!Term::Bc(Rc::new(a.clone()), Rc::new(b)).well_typed());
    }

    #[test]
    fn substitution_basics() {
        let x = evar("x");
        let y = evar("y");
        let a = Term::constant("a");
        let s: Subst = [(x.clone(), a.clone())].into_iter().collect();
        let t = Term::h(Term::var(x), Term::var(y.clone()));
        assert_eq!(s.apply(&t), Term::h(a, Term::var(y)));
        let empty = Subst::new();
        assert_eq!(empty.apply(&t), t);
    }

    #[test]
    fn substitution_into_bc() {
        let u = lvar("U");
        let v = lvar("V");
        let x = evar("x");
        let s: Subst = [(u.clone(), Term::Nil), (v.clone(), Term::Nil)]
            .into_iter()
            .collect();
        let t = Term::bc(Term::var(v), Term::var(x.clone()));
        assert_eq!(s.apply(&t), Term::bc(Term::Nil, Term::var(x)));
    }

    #[test]
    fn fresh_supply_distinct_and_sorted() {
        let mut supply = FreshSupply::new();
        let a = supply.fresh(Sort::List, "V");
        let b = supply.fresh(Sort::List, "V");
        assert_ne!(a, b);
        assert_eq!(a.sort, Sort::List);
        let u = supply.fresh(Sort::Element, "u");
        assert_eq!(u.sort, Sort::Element);
        assert_eq!(u.to_string(), "u#2");
    }

    #[test]
    fn xor_canonicalization() {
        let a = Term::constant("a");
        let b = Term::constant("b");
        // nilpotence then unit
        assert_eq!(Term::xor(vec![a.clone(), a.clone()]), Term::xor_unit());
        assert_eq!(Term::xor(vec![a.clone(), Term::xor_unit()]), a.clone());
        // flattening and ordering
        let nested = Term::xor(vec![b.clone(), Term::xor(vec![a.clone(), b.clone()])]);
        assert_eq!(nested, a);
        let s1 = Term::xor(vec![a.clone(), b.clone()]);
        let s2 = Term::xor(vec![b, a]);
        assert_eq!(s1, s2);
    }

    #[test]
    fn triangular_substitution_idempotent() {
        // x1 := h(x2, a), x2 := b is triangular
        let x1 = evar("x1");
        let x2 = evar("x2");
        let t1 = Term::h(Term::var(x2.clone()), Term::constant("a"));
        // build in triangular order: later bindings substituted first
        let inner: Subst = [(x2.clone(), Term::constant("b"))].into_iter().collect();
        let mut s = Subst::new();
        s.insert(x1, inner.apply(&t1));
        s.insert(x2, Term::constant("b"));
        assert!(s.is_idempotent());
        let t = Term::h(Term::var(evar("x1")), Term::var(evar("x2")));
        assert_eq!(s.apply(&s.apply(&t)), s.apply(&t));
    }
}
