//! Element solving modulo g(h(x,y),y) = x, by narrowing on g-equations
//! plus standard decomposition below h.
//!
//! The search loops: a d-solved set is returned as a solved form; a
//! conflicted set (duplicate lhs or a dependency cycle) branches on
//! resolutions of its least conflict — narrowing one of the involved
//! g-equations (replace u =? g(x,v) by x =? h(u,v)), or, for a same-lhs
//! g/g pair, decomposing under the free g. Deterministic closure
//! (variable elimination, h-decomposition, clash checks) runs between
//! branch points, and canonically revisited states are pruned.

use super::ElemFail;
use crate::equation::Equation;
use crate::errors::{Result, SolverError};
use crate::term::{Subst, Term, Var};
use std::collections::{BTreeMap, BTreeSet, HashSet};
use std::rc::Rc;

type State = BTreeSet<Equation>;

enum Closure {
    Ok(State),
    Fail(ElemFail),
}

fn insert(state: &mut State, eq: Equation) {
    if !eq.is_trivial() {
        state.insert(eq);
    }
}

/// Deterministic don't-care closure: element variable elimination,
/// h-decomposition for duplicate lhs, constant clashes.
fn closure(mut state: State) -> Closure {
    'outer: loop {
        // variable elimination, larger name replaced by smaller
        let var_var: Vec<Equation> = state
            .iter()
            .filter(|e| matches!(e, Equation::VarVarE(a, b) if a != b))
            .cloned()
            .collect();
        for eq in var_var {
            let (a, b) = match &eq {
                Equation::VarVarE(a, b) => (a.clone(), b.clone()),
                _ => unreachable!(),
            };
            let (keep, kill) = if a < b { (a, b) } else { (b, a) };
            let elsewhere = state.iter().any(|e| *e != eq && e.vars().contains(&kill));
            if !elsewhere && *eq.lhs() == kill {
                continue;
            }
            let old: Vec<Equation> = state.iter().cloned().collect();
            state = BTreeSet::new();
            for e in old {
                if e == eq {
                    continue;
                }
                insert(&mut state, e.rename(&kill, &keep));
            }
            state.insert(Equation::VarVarE(kill, keep));
            continue 'outer;
        }
        // duplicate h-equations with the same lhs: decompose, keep one
        let hs: Vec<Equation> = state
            .iter()
            .filter(|e| matches!(e, Equation::H(..)))
            .cloned()
            .collect();
        for (i, e1) in hs.iter().enumerate() {
            let (u, a, b) = match e1 {
                Equation::H(u, a, b) => (u, a, b),
                _ => unreachable!(),
            };
            for e2 in hs.iter().skip(i + 1) {
                let (u2, c, d) = match e2 {
                    Equation::H(u, c, d) => (u, c, d),
                    _ => unreachable!(),
                };
                if u == u2 {
                    state.remove(e2);
                    insert(&mut state, Equation::VarVarE(a.clone(), c.clone()));
                    insert(&mut state, Equation::VarVarE(b.clone(), d.clone()));
                    continue 'outer;
                }
            }
        }
        // clashes on a shared lhs
        let mut consts: BTreeMap<Var, String> = BTreeMap::new();
        for e in state.iter() {
            if let Equation::ConstEq(u, c) = e {
                if let Some(prev) = consts.get(u) {
                    if prev != c {
                        return Closure::Fail(ElemFail::Clash {
                            detail: format!("{prev} vs {c}"),
                        });
                    }
                }
                consts.insert(u.clone(), c.clone());
            }
        }
        for e in state.iter() {
            if let Equation::H(u, _, _) = e {
                if let Some(c) = consts.get(u) {
                    return Closure::Fail(ElemFail::Clash {
                        detail: format!("constant {c} vs h-term on {u}"),
                    });
                }
            }
        }
        return Closure::Ok(state);
    }
}

/// Lhs variables of a pure-h dependency cycle, if one exists. Such a
/// cycle is fatal regardless of any g-equations.
fn h_cycle(state: &State) -> Option<Var> {
    let deps: BTreeMap<Var, Vec<Var>> = state
        .iter()
        .filter_map(|e| match e {
            Equation::H(u, a, b) => Some((u.clone(), vec![a.clone(), b.clone()])),
            _ => None,
        })
        .collect();
    let mut color: BTreeMap<Var, u8> = BTreeMap::new();
    fn visit(v: &Var, deps: &BTreeMap<Var, Vec<Var>>, color: &mut BTreeMap<Var, u8>) -> Option<Var> {
        match color.get(v) {
            Some(2) => return None,
            Some(1) => return Some(v.clone()),
            _ => {}
        }
        if !deps.contains_key(v) {
            return None;
        }
        color.insert(v.clone(), 1);
        for d in &deps[v] {
            if let Some(w) = visit(d, deps, color) {
                return Some(w);
            }
        }
        color.insert(v.clone(), 2);
        None
    }
    let keys: Vec<Var> = deps.keys().cloned().collect();
    for k in keys {
        if let Some(w) = visit(&k, &deps, &mut color) {
            return Some(w);
        }
    }
    None
}

/// The cycle through g/h dependencies if the state is cyclic (lhs → rhs
/// variables that are themselves solved).
fn dependency_cycle(state: &State) -> Option<Vec<Equation>> {
    let by_lhs: BTreeMap<Var, Vec<Equation>> = {
        let mut m: BTreeMap<Var, Vec<Equation>> = BTreeMap::new();
        for e in state.iter() {
            if !matches!(e, Equation::VarVarE(..)) || e.vars().len() > 1 {
                m.entry(e.lhs().clone()).or_default().push(e.clone());
            }
        }
        m
    };
    let mut color: BTreeMap<Var, u8> = BTreeMap::new();
    let mut stack: Vec<Equation> = Vec::new();
    fn visit(
        v: &Var,
        by_lhs: &BTreeMap<Var, Vec<Equation>>,
        color: &mut BTreeMap<Var, u8>,
        stack: &mut Vec<Equation>,
    ) -> Option<Var> {
        match color.get(v) {
            Some(2) => return None,
            Some(1) => return Some(v.clone()),
            _ => {}
        }
        if !by_lhs.contains_key(v) {
            return None;
        }
        color.insert(v.clone(), 1);
        for e in &by_lhs[v] {
            for d in e.vars().iter().skip(1) {
                stack.push(e.clone());
                if let Some(w) = visit(d, by_lhs, color, stack) {
                    return Some(w);
                }
                stack.pop();
            }
        }
        color.insert(v.clone(), 2);
        None
    }
    let keys: Vec<Var> = by_lhs.keys().cloned().collect();
    for k in keys {
        stack.clear();
        if let Some(start) = visit(&k, &by_lhs, &mut color, &mut stack) {
            // keep only the loop part
            let mut cycle = Vec::new();
            let mut in_loop = false;
            for e in stack.iter() {
                if e.lhs() == &start {
                    in_loop = true;
                }
                if in_loop {
                    cycle.push(e.clone());
                }
            }
            if cycle.is_empty() {
                cycle = stack.clone();
            }
            return Some(cycle);
        }
    }
    None
}

/// Is the set in d-solved form: distinct lhs variables and an acyclic
/// dependency order.
fn d_solved(state: &State) -> bool {
    let mut seen: BTreeSet<Var> = BTreeSet::new();
    for e in state.iter() {
        if !seen.insert(e.lhs().clone()) {
            return false;
        }
    }
    dependency_cycle(state).is_none()
}

/// The triangular mgu read off a d-solved set.
fn read_mgu(state: &State) -> Subst {
    let by_lhs: BTreeMap<Var, Equation> = state
        .iter()
        .map(|e| (e.lhs().clone(), e.clone()))
        .collect();
    let mut memo: BTreeMap<Var, Rc<Term>> = BTreeMap::new();
    fn expand(
        v: &Var,
        by_lhs: &BTreeMap<Var, Equation>,
        memo: &mut BTreeMap<Var, Rc<Term>>,
    ) -> Rc<Term> {
        if let Some(t) = memo.get(v) {
            return t.clone();
        }
        let t = match by_lhs.get(v) {
            None => Rc::new(Term::var(v.clone())),
            Some(e) => {
                let rhs = e.rhs_term();
                let mut sub = Subst::new();
                for w in rhs.vars() {
                    let wt = expand(&w, by_lhs, memo);
                    if *wt != Term::var(w.clone()) {
                        sub.insert(w, (*wt).clone());
                    }
                }
                Rc::new(sub.apply(&rhs))
            }
        };
        memo.insert(v.clone(), t.clone());
        t
    }
    let mut out = Subst::new();
    let vars: BTreeSet<Var> = state.iter().flat_map(|e| e.vars()).collect();
    for v in vars {
        let t = expand(&v, &by_lhs, &mut memo);
        if *t != Term::var(v.clone()) {
            out.insert(v, (*t).clone());
        }
    }
    out
}

struct Search {
    solutions: Vec<Subst>,
    seen: HashSet<String>,
    first_only: bool,
    budget: usize,
    visited: usize,
    last_failure: Option<ElemFail>,
}

fn key(state: &State) -> String {
    let mut s = String::new();
    for e in state {
        s.push_str(&e.to_string());
        s.push(';');
    }
    s
}

fn explore(state: State, search: &mut Search) -> Result<()> {
    if search.first_only && !search.solutions.is_empty() {
        return Ok(());
    }
    search.visited += 1;
    if search.visited > search.budget {
        return Err(SolverError::BudgetExceeded(format!(
            "element narrowing visited more than {} states",
            search.budget
        )));
    }
    let state = match closure(state) {
        Closure::Ok(s) => s,
        Closure::Fail(f) => {
            search.last_failure = Some(f);
            return Ok(());
        }
    };
    if !search.seen.insert(key(&state)) {
        return Ok(());
    }
    if d_solved(&state) {
        search.solutions.push(read_mgu(&state));
        return Ok(());
    }
    if let Some(v) = h_cycle(&state) {
        // fatal independently of the g-equations
        search.last_failure = Some(ElemFail::OccurCheck { var: v.to_string() });
        return Ok(());
    }
    // least conflict: a duplicated lhs, else the dependency cycle
    let mut dup: Option<Vec<Equation>> = None;
    {
        let mut by_lhs: BTreeMap<Var, Vec<Equation>> = BTreeMap::new();
        for e in state.iter() {
            by_lhs.entry(e.lhs().clone()).or_default().push(e.clone());
        }
        for (_, eqs) in by_lhs {
            if eqs.len() >= 2 {
                dup = Some(eqs);
                break;
            }
        }
    }
    let conflict: Vec<Equation> = match dup {
        Some(eqs) => eqs,
        None => dependency_cycle(&state).expect("not d-solved and acyclic"),
    };
    let gs: Vec<Equation> = conflict
        .iter()
        .filter(|e| matches!(e, Equation::G(..)))
        .cloned()
        .collect();
    if gs.is_empty() {
        return Ok(()); // closure exhausted and no narrowing can help
    }
    // narrowing branches: u =? g(x,v) becomes x =? h(u,v)
    for e in &gs {
        let (u, x, v) = match e {
            Equation::G(u, x, v) => (u.clone(), x.clone(), v.clone()),
            _ => unreachable!(),
        };
        let mut child = state.clone();
        child.remove(e);
        insert(&mut child, Equation::H(x, u, v));
        explore(child, search)?;
    }
    // free decomposition for a same-lhs g/g pair
    for (i, e1) in gs.iter().enumerate() {
        let (u1, x1, v1) = match e1 {
            Equation::G(u, x, v) => (u.clone(), x.clone(), v.clone()),
            _ => unreachable!(),
        };
        for e2 in gs.iter().skip(i + 1) {
            let (u2, x2, v2) = match e2 {
                Equation::G(u, x, v) => (u.clone(), x.clone(), v.clone()),
                _ => unreachable!(),
            };
            if u1 == u2 {
                let mut child = state.clone();
                child.remove(e2);
                insert(&mut child, Equation::VarVarE(x1.clone(), x2));
                insert(&mut child, Equation::VarVarE(v1.clone(), v2));
                explore(child, search)?;
            }
        }
    }
    Ok(())
}

/// All mgus of a DBC element residue, found by enumerating every
/// nondeterministic narrowing/decomposition choice.
pub fn solve_dbc(
    residue: &[Equation],
    first_only: bool,
    branch_cap: usize,
) -> Result<std::result::Result<Vec<Subst>, ElemFail>> {
    for eq in residue {
        debug_assert!(
            matches!(
                eq,
                Equation::VarVarE(..) | Equation::ConstEq(..) | Equation::H(..) | Equation::G(..)
            ),
            "non-DBC element shape {eq}"
        );
    }
    let state: State = residue.iter().cloned().collect();
    let mut search = Search {
        solutions: Vec::new(),
        seen: HashSet::new(),
        first_only,
        budget: branch_cap.max(64),
        visited: 0,
        last_failure: None,
    };
    explore(state, &mut search)?;
    // duplicate unifiers across branches collapse under renaming later;
    // exact duplicates are dropped here
    let mut out: Vec<Subst> = Vec::new();
    for s in search.solutions {
        if !out.contains(&s) {
            out.push(s);
        }
    }
    if out.is_empty() {
        Ok(Err(search.last_failure.unwrap_or(ElemFail::NoBranch)))
    } else {
        Ok(Ok(out))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rewrite::eq_mod;
    use crate::term::Sort;
    use crate::theory::TheoryId;

    fn ev(n: &str) -> Var {
        Var::new(n, Sort::Element)
    }

    #[test]
    fn single_g_equation_is_already_solved() {
        // u =? g(x,v) is d-solved: one mgu binding u
        let eqs = vec![Equation::G(ev("u"), ev("x"), ev("v"))];
        let sols = solve_dbc(&eqs, false, 10_000).unwrap().unwrap();
        assert_eq!(sols.len(), 1);
        assert_eq!(
            sols[0].get(&ev("u")),
            Some(&Term::g(Term::var(ev("x")), Term::var(ev("v"))))
        );
    }

    #[test]
    fn narrowing_example() {
        // u =? g(w,y), u =? a, w =? h(a', y) with a' =? a: solvable with
        // w := h(a,y), u := a
        let eqs = vec![
            Equation::G(ev("u"), ev("w"), ev("y")),
            Equation::ConstEq(ev("u"), "a".into()),
            Equation::H(ev("w"), ev("p"), ev("y")),
            Equation::ConstEq(ev("p"), "a".into()),
        ];
        let sols = solve_dbc(&eqs, false, 10_000).unwrap().unwrap();
        assert!(!sols.is_empty());
        for s in &sols {
            let w = s.get(&ev("w")).unwrap();
            let u = s.get(&ev("u")).unwrap();
            let g = Term::g(w.clone(), s.apply(&Term::var(ev("y"))));
            assert!(eq_mod(&g, u, TheoryId::Dbc));
        }
    }

    #[test]
    fn gg_pair_keeps_free_solution() {
        // u =? g(x,v), u =? g(x',v'): the free decomposition branch
        // must survive (x = x', v = v')
        let eqs = vec![
            Equation::G(ev("u"), ev("x"), ev("v")),
            Equation::G(ev("u"), ev("y"), ev("w")),
        ];
        let sols = solve_dbc(&eqs, false, 10_000).unwrap().unwrap();
        let free = sols.iter().any(|s| {
            let sx = s.apply(&Term::var(ev("x")));
            let sy = s.apply(&Term::var(ev("y")));
            let sv = s.apply(&Term::var(ev("v")));
            let sw = s.apply(&Term::var(ev("w")));
            sx == sy && sv == sw
        });
        assert!(free, "missing free-g decomposition branch in {sols:?}");
    }

    #[test]
    fn g_occur_without_escape_fails() {
        // u =? g(u, v): both the irreducible and narrowed branch die
        let eqs = vec![Equation::G(ev("u"), ev("u"), ev("v"))];
        assert!(solve_dbc(&eqs, false, 10_000).unwrap().is_err());
    }

    #[test]
    fn pure_h_cycle_fails() {
        let eqs = vec![Equation::H(ev("x"), ev("x"), ev("z"))];
        assert!(solve_dbc(&eqs, false, 10_000).unwrap().is_err());
    }
}
