//! Element solving modulo xor (ACUN) with the free unary enc symbol;
//! h(x,y) enters as enc(x ⊕ y).
//!
//! Procedure: purify every enc-rooted alien by a fresh argument
//! variable; nondeterministically choose a partition identifying alien
//! enc-terms (identified terms unify by enc-decomposition); solve the
//! resulting pure xor system by Gaussian elimination over GF(2),
//! treating non-identified aliens and constants as independent atoms;
//! reject branches whose aliens end up forced equal without being
//! identified. Finitary: at most Bell(#aliens) branches.

use super::ElemFail;
use crate::equation::{Atom, Equation};
use crate::errors::{Result, SolverError};
use crate::term::{FreshSupply, Sort, Subst, Term, Var, XOR_UNIT};
use std::collections::{BTreeMap, BTreeSet};

/// An atom of the GF(2) linear system.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
enum BAtom {
    V(Var),
    C(String),
    /// An alien enc-term, by partition-block id.
    E(usize),
}

type Row = BTreeSet<BAtom>;

fn xor_into(row: &mut Row, other: &Row) {
    for a in other {
        if !row.remove(a) {
            row.insert(a.clone());
        }
    }
}

struct System {
    rows: Vec<Row>,
    /// Alien argument variables, indexed by alien id.
    alien_args: Vec<Var>,
    vars: BTreeSet<Var>,
}

fn build_system(residue: &[Equation], supply: &mut FreshSupply) -> System {
    let mut rows: Vec<Row> = Vec::new();
    let mut alien_args: Vec<Var> = Vec::new();
    let mut vars: BTreeSet<Var> = BTreeSet::new();
    let push_const = |row: &mut Row, c: &str| {
        if c != XOR_UNIT {
            let a = BAtom::C(c.to_string());
            if !row.remove(&a) {
                row.insert(a);
            }
        }
    };
    for eq in residue {
        vars.extend(eq.vars());
        match eq {
            Equation::VarVarE(a, b) => {
                let mut row = Row::new();
                xor_into(&mut row, &[BAtom::V(a.clone())].into_iter().collect());
                xor_into(&mut row, &[BAtom::V(b.clone())].into_iter().collect());
                rows.push(row);
            }
            Equation::ConstEq(u, c) => {
                let mut row: Row = [BAtom::V(u.clone())].into_iter().collect();
                push_const(&mut row, c);
                rows.push(row);
            }
            Equation::H(v, a, b) => {
                // v = enc(p), p = a ⊕ b
                let p = supply.fresh(Sort::Element, "p");
                vars.insert(p.clone());
                let id = alien_args.len();
                alien_args.push(p.clone());
                rows.push([BAtom::V(v.clone()), BAtom::E(id)].into_iter().collect());
                let mut arg: Row = [BAtom::V(p)].into_iter().collect();
                xor_into(&mut arg, &[BAtom::V(a.clone())].into_iter().collect());
                xor_into(&mut arg, &[BAtom::V(b.clone())].into_iter().collect());
                rows.push(arg);
            }
            Equation::Enc(u, w) => {
                let id = alien_args.len();
                alien_args.push(w.clone());
                rows.push([BAtom::V(u.clone()), BAtom::E(id)].into_iter().collect());
            }
            Equation::Xor(u, atoms) => {
                let mut row: Row = [BAtom::V(u.clone())].into_iter().collect();
                for at in atoms {
                    match at {
                        Atom::Var(v) => {
                            let a = BAtom::V(v.clone());
                            if !row.remove(&a) {
                                row.insert(a);
                            }
                        }
                        Atom::Const(c) => push_const(&mut row, c),
                    }
                }
                rows.push(row);
            }
            other => unreachable!("non-BC1 element shape {other}"),
        }
    }
    System {
        rows,
        alien_args,
        vars,
    }
}

/// Set partitions of {0..n-1} as restricted growth strings, in
/// deterministic order.
fn partitions(n: usize) -> Vec<Vec<usize>> {
    if n == 0 {
        return vec![vec![]];
    }
    let mut out = Vec::new();
    let mut cur = vec![0usize; n];
    loop {
        out.push(cur.clone());
        // next restricted growth string
        let mut i = n - 1;
        loop {
            let max_prefix = cur[..i].iter().copied().max().unwrap_or(0);
            if i == 0 {
                return out;
            }
            if cur[i] <= max_prefix {
                cur[i] += 1;
                for v in cur.iter_mut().skip(i + 1) {
                    *v = 0;
                }
                break;
            }
            i -= 1;
        }
    }
}

enum BranchOutcome {
    Solved(Subst),
    Rejected,
}

fn solve_branch(sys: &System, partition: &[usize]) -> BranchOutcome {
    // block representative = least alien id in the block
    let nblocks = partition.iter().copied().max().map_or(0, |m| m + 1);
    let mut block_rep: Vec<usize> = vec![usize::MAX; nblocks];
    for (i, &b) in partition.iter().enumerate() {
        if block_rep[b] == usize::MAX {
            block_rep[b] = i;
        }
    }
    let mut rows: Vec<Row> = Vec::new();
    for r in &sys.rows {
        let mut row = Row::new();
        for a in r {
            let a = match a {
                BAtom::E(i) => BAtom::E(partition[*i]),
                other => other.clone(),
            };
            if !row.remove(&a) {
                row.insert(a);
            }
        }
        rows.push(row);
    }
    // identified aliens decompose: their argument variables coincide
    for (i, &b) in partition.iter().enumerate() {
        let rep = block_rep[b];
        if rep != i {
            let mut row = Row::new();
            xor_into(
                &mut row,
                &[BAtom::V(sys.alien_args[rep].clone())].into_iter().collect(),
            );
            xor_into(
                &mut row,
                &[BAtom::V(sys.alien_args[i].clone())].into_iter().collect(),
            );
            rows.push(row);
        }
    }
    let rep_vars: BTreeSet<Var> = block_rep
        .iter()
        .map(|&i| sys.alien_args[i].clone())
        .collect();

    // Gauss-Jordan over GF(2); pivots prefer variables that are not
    // alien-argument representatives, so aliens stay parametric where
    // possible and binding expansion stays acyclic.
    let mut solved: Vec<(Var, Row)> = Vec::new();
    let mut worklist = rows;
    while let Some(mut row) = worklist.pop() {
        for (v, r) in &solved {
            if row.contains(&BAtom::V(v.clone())) {
                row.remove(&BAtom::V(v.clone()));
                xor_into(&mut row, r);
            }
        }
        if row.is_empty() {
            continue;
        }
        let pivot = row
            .iter()
            .filter_map(|a| match a {
                BAtom::V(v) if !rep_vars.contains(v) => Some(v.clone()),
                _ => None,
            })
            .next()
            .or_else(|| {
                row.iter()
                    .filter_map(|a| match a {
                        BAtom::V(v) => Some(v.clone()),
                        _ => None,
                    })
                    .next()
            });
        let Some(pivot) = pivot else {
            // no variable left: constants and distinct alien blocks
            // cannot cancel, so the branch is contradictory (either a
            // genuine clash or an unidentified-alien equality)
            return BranchOutcome::Rejected;
        };
        row.remove(&BAtom::V(pivot.clone()));
        for (_, r) in solved.iter_mut() {
            if r.contains(&BAtom::V(pivot.clone())) {
                r.remove(&BAtom::V(pivot.clone()));
                xor_into(r, &row);
            }
        }
        solved.push((pivot, row));
    }

    // expand bindings; cycle through an alien argument means no finite
    // solution on this branch
    let solved_map: BTreeMap<Var, Row> = solved.iter().cloned().collect();
    let mut memo: BTreeMap<Var, Option<Term>> = BTreeMap::new();
    fn term_of_var(
        v: &Var,
        solved: &BTreeMap<Var, Row>,
        block_rep: &[usize],
        alien_args: &[Var],
        memo: &mut BTreeMap<Var, Option<Term>>,
    ) -> Option<Term> {
        if let Some(t) = memo.get(v) {
            return t.clone(); // None while in progress = cycle
        }
        let Some(row) = solved.get(v) else {
            return Some(Term::var(v.clone()));
        };
        memo.insert(v.clone(), None);
        let mut parts = Vec::new();
        for a in row {
            let t = match a {
                BAtom::V(w) => term_of_var(w, solved, block_rep, alien_args, memo)?,
                BAtom::C(c) => Term::constant(c.clone()),
                BAtom::E(b) => {
                    let arg = &alien_args[block_rep[*b]];
                    let at = term_of_var(arg, solved, block_rep, alien_args, memo)?;
                    Term::enc(at)
                }
            };
            parts.push(t);
        }
        let t = Term::xor(parts);
        memo.insert(v.clone(), Some(t.clone()));
        Some(t)
    }

    let mut subst = Subst::new();
    for v in &sys.vars {
        match term_of_var(v, &solved_map, &block_rep, &sys.alien_args, &mut memo) {
            None => return BranchOutcome::Rejected,
            Some(t) => {
                if t != Term::var(v.clone()) {
                    subst.insert(v.clone(), t);
                }
            }
        }
    }
    // reject if two distinct blocks were forced onto equal arguments
    for i in 0..block_rep.len() {
        for j in i + 1..block_rep.len() {
            let ti = subst.apply(&Term::var(sys.alien_args[block_rep[i]].clone()));
            let tj = subst.apply(&Term::var(sys.alien_args[block_rep[j]].clone()));
            if ti == tj {
                return BranchOutcome::Rejected;
            }
        }
    }
    BranchOutcome::Solved(subst)
}

/// A finite complete set of unifiers modulo ACUN(⊕, 0) with enc.
pub fn solve_bc1(
    residue: &[Equation],
    supply: &mut FreshSupply,
    first_only: bool,
) -> Result<std::result::Result<Vec<Subst>, ElemFail>> {
    let sys = build_system(residue, supply);
    if sys.alien_args.len() > 12 {
        return Err(SolverError::BudgetExceeded(format!(
            "{} alien subterms exceed the partition budget",
            sys.alien_args.len()
        )));
    }
    let mut out: Vec<Subst> = Vec::new();
    for p in partitions(sys.alien_args.len()) {
        match solve_branch(&sys, &p) {
            BranchOutcome::Solved(s) => {
                if !out.contains(&s) {
                    out.push(s);
                    if first_only {
                        break;
                    }
                }
            }
            BranchOutcome::Rejected => {}
        }
    }
    if out.is_empty() {
        Ok(Err(ElemFail::NoBranch))
    } else {
        Ok(Ok(out))
    }
}
