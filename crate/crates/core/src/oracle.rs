//! Independent brute-force ground-truth: bounded unifier enumeration
//! modulo each theory, instance-subsumption checking, and a 1-in-3-SAT
//! brute-forcer. Not a decision procedure — a bounded test oracle.

use crate::equation::Problem;
use crate::errors::{Result, SolverError};
use crate::rewrite::eq_mod;
use crate::term::{Sort, Subst, Term, Var};
use crate::theory::TheoryId;
use std::collections::BTreeSet;

#[derive(Debug, Clone)]
pub struct SearchBudget {
    /// Element-term depth bound.
    pub max_depth: usize,
    pub constant_pool: Vec<String>,
    /// Bound on enumerated list lengths.
    pub max_list_len: usize,
    /// Deterministic truncation of the element space (shallow first).
    pub elem_cap: usize,
    /// Element pool used inside enumerated lists.
    pub list_elem_cap: usize,
    /// Cap on the total number of assignments tried.
    pub max_assignments: u64,
}

impl Default for SearchBudget {
    fn default() -> SearchBudget {
        SearchBudget {
            max_depth: 3,
            constant_pool: vec!["a".into(), "b".into()],
            max_list_len: 3,
            elem_cap: 24,
            list_elem_cap: 4,
            max_assignments: 4_000_000,
        }
    }
}

/// Ground element terms in normal form, constants before composite
/// terms, shallow before deep, truncated at `cap`.
pub fn element_space(th: TheoryId, b: &SearchBudget, cap: usize) -> Vec<Term> {
    let consts: Vec<Term> = b
        .constant_pool
        .iter()
        .map(|c| Term::constant(c.clone()))
        .collect();
    let mut space: Vec<Term> = Vec::new();
    match th {
        TheoryId::Bc0 | TheoryId::Dbc | TheoryId::DbcPrime | TheoryId::DbcPlus => {
            let mut level: Vec<Term> = consts.clone();
            space.extend(level.iter().cloned());
            for _ in 1..b.max_depth {
                if space.len() >= cap {
                    break;
                }
                let mut next = Vec::new();
                for l in &level {
                    for r in &space {
                        next.push(Term::h(l.clone(), r.clone()));
                        if th.has_db() {
                            next.push(Term::g(l.clone(), r.clone()));
                        }
                    }
                    for r in &space {
                        if !level.contains(r) {
                            next.push(Term::h(r.clone(), l.clone()));
                            if th.has_db() {
                                next.push(Term::g(r.clone(), l.clone()));
                            }
                        }
                    }
                }
                next.sort();
                next.dedup();
                // keep normal forms only (g(h(x,y),y) collapses)
                next.retain(|t| crate::rewrite::normalize(t, th) == *t);
                level = next.clone();
                space.extend(next);
            }
        }
        TheoryId::Bc1 => {
            // atoms: constants and enc-closures; terms: xor sums
            let mut atoms: Vec<Term> = consts.clone();
            let mut terms: Vec<Term> = vec![Term::xor_unit()];
            terms.extend(atoms.iter().cloned());
            for _ in 1..b.max_depth {
                if terms.len() >= cap {
                    break;
                }
                let encs: Vec<Term> = terms.iter().map(|t| Term::enc(t.clone())).collect();
                atoms.extend(encs);
                atoms.sort();
                atoms.dedup();
                let mut next: Vec<Term> = Vec::new();
                // sums of up to two atoms keep the space reviewable
                for (i, x) in atoms.iter().enumerate() {
                    next.push(x.clone());
                    for y in atoms.iter().skip(i + 1) {
                        next.push(Term::xor(vec![x.clone(), y.clone()]));
                    }
                }
                next.sort();
                next.dedup();
                terms = vec![Term::xor_unit()];
                terms.extend(next);
            }
            space = terms;
        }
    }
    space.sort_by_key(|t| (t.size(), t.clone()));
    space.truncate(cap);
    space
}

/// Ground lists (cons chains in normal form) over a truncated element
/// pool, shortest first.
pub fn list_space(th: TheoryId, b: &SearchBudget) -> Vec<Term> {
    let elems = element_space(th, b, b.list_elem_cap);
    let mut space: Vec<Term> = vec![Term::Nil];
    let mut level: Vec<Term> = vec![Term::Nil];
    for _ in 0..b.max_list_len {
        let mut next = Vec::new();
        for tail in &level {
            for e in &elems {
                next.push(Term::cons(e.clone(), tail.clone()));
            }
        }
        space.extend(next.iter().cloned());
        level = next;
    }
    space
}

/// Enumerates all ground assignments within the budget and keeps those
/// where every equation passes `equal_modulo`. Deterministic order.
pub fn brute_force_unifiers(p: &Problem, b: &SearchBudget) -> Result<Vec<Subst>> {
    let vars: Vec<Var> = p.all_vars().into_iter().collect();
    let elem_space = element_space(p.theory, b, b.elem_cap);
    let list_space = list_space(p.theory, b);
    let mut total: u64 = 1;
    for v in &vars {
        let n = match v.sort {
            Sort::Element => elem_space.len() as u64,
            Sort::List => list_space.len() as u64,
        };
        total = total.saturating_mul(n);
        if total > b.max_assignments {
            return Err(SolverError::BudgetExceeded(format!(
                "assignment space exceeds {}",
                b.max_assignments
            )));
        }
    }
    let eqs: Vec<(Term, Term)> = p.equations.iter().map(|e| e.as_term_pair()).collect();
    let mut out = Vec::new();
    let mut indices = vec![0usize; vars.len()];
    'outer: loop {
        let mut s = Subst::new();
        for (v, &i) in vars.iter().zip(indices.iter()) {
            let t = match v.sort {
                Sort::Element => elem_space[i].clone(),
                Sort::List => list_space[i].clone(),
            };
            s.insert(v.clone(), t);
        }
        if eqs
            .iter()
            .all(|(l, r)| eq_mod(&s.apply(l), &s.apply(r), p.theory))
        {
            out.push(s);
        }
        // odometer
        for k in 0..vars.len() {
            let lim = match vars[k].sort {
                Sort::Element => elem_space.len(),
                Sort::List => list_space.len(),
            };
            indices[k] += 1;
            if indices[k] < lim {
                continue 'outer;
            }
            indices[k] = 0;
        }
        break;
    }
    Ok(out)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Subsumption {
    Yes,
    No,
    /// The instantiation search ran out of budget: unknown, reported
    /// distinctly from No.
    Unknown,
}

/// Does an instantiation of `general`'s parameters (searched within
/// the budget) make general(x) equal to ground(x) modulo the theory,
/// for every problem variable x?
///
/// Backtracking over the parameters, variable by variable, so a wrong
/// head choice is pruned before the rest of the space is touched.
pub fn subsumes(
    problem_vars: &BTreeSet<Var>,
    general: &Subst,
    ground: &Subst,
    th: TheoryId,
    b: &SearchBudget,
) -> Subsumption {
    let checks: Vec<(Var, Term)> = problem_vars
        .iter()
        .map(|v| {
            let image = match general.get(v) {
                Some(t) => t.clone(),
                None => Term::var(v.clone()),
            };
            (v.clone(), image)
        })
        .collect();
    for (v, _) in &checks {
        if ground.get(v).is_none() {
            return Subsumption::No; // ground must bind every problem variable
        }
    }
    let elem_space = element_space(th, b, b.elem_cap);
    let lists = list_space(th, b);
    struct Ctx<'a> {
        checks: &'a [(Var, Term)],
        ground: &'a Subst,
        th: TheoryId,
        elem_space: &'a [Term],
        lists: &'a [Term],
        tried: u64,
        max: u64,
    }
    enum Out {
        Yes,
        No,
        Budget,
    }
    fn go(i: usize, inst: &mut Subst, cx: &mut Ctx) -> Out {
        if i == cx.checks.len() {
            return Out::Yes;
        }
        let (v, image) = &cx.checks[i];
        let unassigned: Vec<Var> = image
            .vars()
            .into_iter()
            .filter(|w| inst.get(w).is_none())
            .collect();
        let target = cx.ground.get(v).cloned().expect("checked above");
        let mut indices = vec![0usize; unassigned.len()];
        'assignments: loop {
            cx.tried += 1;
            if cx.tried > cx.max {
                return Out::Budget;
            }
            let mut trial = inst.clone();
            for (w, &k) in unassigned.iter().zip(indices.iter()) {
                let t = match w.sort {
                    Sort::Element => cx.elem_space[k].clone(),
                    Sort::List => cx.lists[k].clone(),
                };
                trial.insert(w.clone(), t);
            }
            let img = trial.apply(image);
            if img.is_ground() && eq_mod(&img, &target, cx.th) {
                match go(i + 1, &mut trial, cx) {
                    Out::Yes => return Out::Yes,
                    Out::Budget => return Out::Budget,
                    Out::No => {}
                }
            }
            // odometer over the unassigned parameters
            let mut k = 0;
            loop {
                if k == unassigned.len() {
                    break 'assignments;
                }
                let lim = match unassigned[k].sort {
                    Sort::Element => cx.elem_space.len(),
                    Sort::List => cx.lists.len(),
                };
                indices[k] += 1;
                if indices[k] < lim {
                    continue 'assignments;
                }
                indices[k] = 0;
                k += 1;
            }
        }
        Out::No
    }
    let mut cx = Ctx {
        checks: &checks,
        ground,
        th,
        elem_space: &elem_space,
        lists: &lists,
        tried: 0,
        max: b.max_assignments,
    };
    match go(0, &mut Subst::new(), &mut cx) {
        Out::Yes => Subsumption::Yes,
        Out::No => Subsumption::No,
        Out::Budget => Subsumption::Unknown,
    }
}

/// Exhaustive monotone 1-in-3-SAT check: some assignment makes exactly
/// one literal true in every clause.
pub fn sat_1in3(clauses: &[[String; 3]]) -> bool {
    let mut vars: Vec<String> = Vec::new();
    for c in clauses {
        for l in c {
            if !vars.contains(l) {
                vars.push(l.clone());
            }
        }
    }
    assert!(vars.len() <= 20, "1-in-3 brute-forcer limited to 20 variables");
    let n = vars.len();
    for mask in 0u32..(1u32 << n) {
        let val = |name: &String| {
            let i = vars.iter().position(|v| v == name).unwrap();
            mask >> i & 1 == 1
        };
        if clauses.iter().all(|c| {
            let trues = c.iter().filter(|l| val(l)).count();
            trues == 1
        }) {
            return true;
        }
    }
    clauses.is_empty()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::equation::Equation;

    fn lv(n: &str) -> Var {
        Var::new(n, Sort::List)
    }

    fn ev(n: &str) -> Var {
        Var::new(n, Sort::Element)
    }

    fn small_budget() -> SearchBudget {
        SearchBudget {
            max_depth: 2,
            elem_cap: 8,
            list_elem_cap: 2,
            max_list_len: 2,
            ..SearchBudget::default()
        }
    }

    #[test]
    fn nil_forcing_cycle() {
        // U =? bc(V,x), V =? bc(U,y): only nil assignments survive
        let mut p = Problem::empty(TheoryId::Bc0);
        p.insert(Equation::Bc(lv("U"), lv("V"), ev("x")));
        p.insert(Equation::Bc(lv("V"), lv("U"), ev("y")));
        let sols = brute_force_unifiers(&p, &small_budget()).unwrap();
        assert!(!sols.is_empty());
        for s in &sols {
            assert_eq!(s.get(&lv("U")), Some(&Term::Nil));
            assert_eq!(s.get(&lv("V")), Some(&Term::Nil));
        }
    }

    #[test]
    fn u_nil_always_solvable() {
        let mut p = Problem::empty(TheoryId::Bc0);
        p.insert(Equation::Nil(lv("U")));
        let sols = brute_force_unifiers(&p, &small_budget()).unwrap();
        assert!(!sols.is_empty());
        assert!(sols.iter().all(|s| s.get(&lv("U")) == Some(&Term::Nil)));
    }

    #[test]
    fn subsumption_examples() {
        let problem_vars: BTreeSet<Var> = [lv("U"), lv("V"), ev("y")].into_iter().collect();
        // general { U := bc(V,y) } subsumes ground { U := nil, V := nil, y := a }
        let mut general = Subst::new();
        general.insert(
            lv("U"),
            Term::bc(Term::var(lv("V")), Term::var(ev("y"))),
        );
        let mut ground = Subst::new();
        ground.insert(lv("U"), Term::Nil);
        ground.insert(lv("V"), Term::Nil);
        ground.insert(ev("y"), Term::constant("a"));
        assert_eq!(
            subsumes(&problem_vars, &general, &ground, TheoryId::Bc0, &small_budget()),
            Subsumption::Yes
        );
        // identity subsumes any ground solution
        let identity = Subst::new();
        assert_eq!(
            subsumes(&problem_vars, &identity, &ground, TheoryId::Bc0, &small_budget()),
            Subsumption::Yes
        );
        // {x := a} does not subsume {x := b}
        let pv: BTreeSet<Var> = [ev("x")].into_iter().collect();
        let mut ga = Subst::new();
        ga.insert(ev("x"), Term::constant("a"));
        let mut gb = Subst::new();
        gb.insert(ev("x"), Term::constant("b"));
        assert_eq!(
            subsumes(&pv, &ga, &gb, TheoryId::Bc0, &small_budget()),
            Subsumption::No
        );
    }

    #[test]
    fn sat_1in3_cases() {
        let c = |a: &str, b: &str, c: &str| [a.to_string(), b.to_string(), c.to_string()];
        assert!(sat_1in3(&[c("p", "q", "r")]));
        // p,p,p: one true literal is impossible (0 or 3)
        assert!(!sat_1in3(&[c("p", "p", "p")]));
        assert!(sat_1in3(&[]));
    }
}
