//! Syntactic unification for BC0 element residues: decomposition under
//! the fully cancellative h, constant clash, occur check. Unitary.

use super::ElemFail;
use crate::equation::Equation;
use crate::term::{Subst, Term, Var};
use std::collections::{BTreeMap, BTreeSet};
use std::rc::Rc;

#[derive(Debug, Clone, PartialEq, Eq)]
enum Shape {
    Const(String),
    H(Var, Var),
}

#[derive(Default)]
struct Uf {
    parent: BTreeMap<Var, Var>,
}

impl Uf {
    fn find(&mut self, v: &Var) -> Var {
        let p = self.parent.get(v).cloned().unwrap_or_else(|| v.clone());
        if &p == v {
            return p;
        }
        let root = self.find(&p);
        self.parent.insert(v.clone(), root.clone());
        root
    }

    /// Representative is the least name, for reproducible unifiers.
    fn union(&mut self, a: &Var, b: &Var) -> (Var, Var) {
        let ra = self.find(a);
        let rb = self.find(b);
        if ra == rb {
            return (ra.clone(), ra);
        }
        let (keep, lose) = if ra < rb { (ra, rb) } else { (rb, ra) };
        self.parent.insert(lose.clone(), keep.clone());
        (keep, lose)
    }
}

pub fn solve_bc0(residue: &[Equation]) -> Result<Subst, ElemFail> {
    let mut uf = Uf::default();
    let mut shape: BTreeMap<Var, Shape> = BTreeMap::new();
    let mut pending: Vec<(Var, Var)> = Vec::new(); // var-var merges
    let mut assign: Vec<(Var, Shape)> = Vec::new();

    for eq in residue {
        match eq {
            Equation::VarVarE(a, b) => pending.push((a.clone(), b.clone())),
            Equation::ConstEq(u, c) => assign.push((u.clone(), Shape::Const(c.clone()))),
            Equation::H(v, a, b) => assign.push((v.clone(), Shape::H(a.clone(), b.clone()))),
            other => unreachable!("non-BC0 element shape {other}"),
        }
    }

    // process merges and shape assignments to fixpoint
    loop {
        if let Some((a, b)) = pending.pop() {
            let (keep, lose) = uf.union(&a, &b);
            if keep == lose {
                continue;
            }
            if let Some(s) = shape.remove(&lose) {
                assign.push((keep.clone(), s));
            }
            continue;
        }
        if let Some((v, s)) = assign.pop() {
            let r = uf.find(&v);
            match shape.get(&r).cloned() {
                None => {
                    shape.insert(r, s);
                }
                Some(old) => match (old, s) {
                    (Shape::Const(c1), Shape::Const(c2)) => {
                        if c1 != c2 {
                            return Err(ElemFail::Clash {
                                detail: format!("{c1} vs {c2}"),
                            });
                        }
                    }
                    (Shape::H(a1, b1), Shape::H(a2, b2)) => {
                        pending.push((a1, a2));
                        pending.push((b1, b2));
                    }
                    (Shape::Const(c), Shape::H(..)) | (Shape::H(..), Shape::Const(c)) => {
                        return Err(ElemFail::Clash {
                            detail: format!("constant {c} vs h-term"),
                        });
                    }
                },
            }
            continue;
        }
        break;
    }

    // occur check over the h-dependency graph on representatives
    let reps: Vec<Var> = shape.keys().cloned().collect();
    let mut color: BTreeMap<Var, u8> = BTreeMap::new(); // 1 = visiting, 2 = done
    fn visit(
        v: &Var,
        uf: &mut Uf,
        shape: &BTreeMap<Var, Shape>,
        color: &mut BTreeMap<Var, u8>,
    ) -> Result<(), ElemFail> {
        let r = uf.find(v);
        match color.get(&r) {
            Some(2) => return Ok(()),
            Some(1) => {
                return Err(ElemFail::OccurCheck { var: r.to_string() });
            }
            _ => {}
        }
        color.insert(r.clone(), 1);
        if let Some(Shape::H(a, b)) = shape.get(&r).cloned() {
            visit(&a, uf, shape, color)?;
            visit(&b, uf, shape, color)?;
        }
        color.insert(r, 2);
        Ok(())
    }
    for r in &reps {
        visit(r, &mut uf, &shape, &mut color)?;
    }

    // triangular mgu, expanding with structural sharing
    let mut memo: BTreeMap<Var, Rc<Term>> = BTreeMap::new();
    fn expand(
        v: &Var,
        uf: &mut Uf,
        shape: &BTreeMap<Var, Shape>,
        memo: &mut BTreeMap<Var, Rc<Term>>,
    ) -> Rc<Term> {
        let r = uf.find(v);
        if let Some(t) = memo.get(&r) {
            return t.clone();
        }
        let t = match shape.get(&r).cloned() {
            None => Rc::new(Term::var(r.clone())),
            Some(Shape::Const(c)) => Rc::new(Term::constant(c)),
            Some(Shape::H(a, b)) => Rc::new(Term::H(
                expand(&a, uf, shape, memo),
                expand(&b, uf, shape, memo),
            )),
        };
        memo.insert(r, t.clone());
        t
    }

    let mut vars: BTreeSet<Var> = BTreeSet::new();
    for eq in residue {
        vars.extend(eq.vars());
    }
    let mut out = Subst::new();
    for v in vars {
        let t = expand(&v, &mut uf, &shape, &mut memo);
        if *t != Term::var(v.clone()) {
            out.insert(v, (*t).clone());
        }
    }
    Ok(out)
}
