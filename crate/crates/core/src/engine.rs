//! The list-inference engine: don't-care rules saturated to fixpoint
//! under the priority tiers, don't-know rules explored as a
//! deterministic depth-first search, producing d-solved list parts
//! plus residual element problems.

use crate::equation::{Equation, Problem};
use crate::errors::{Result, SolverError};
use crate::graph::{self, PropagationGraph};
use crate::term::{Sort, Subst, Term, Var};
use std::collections::{BTreeMap, BTreeSet, HashSet};
use std::fmt;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum RuleId {
    L1,
    L2,
    L3a,
    L3b,
    L3c,
    L4a,
    L4b,
    L5,
    L6,
    L7,
    L8,
    L9,
    L10,
    Db1a,
    Db1b,
    Db1c,
    Db2,
    Db3a,
    Db3b,
    Db4,
    Db5,
    Db6a,
    Db6b,
    Db7a,
    Db7b,
    Db8,
}

pub const RULE_COUNT: usize = 26;

impl RuleId {
    pub fn index(self) -> usize {
        self as usize
    }

    pub fn name(self) -> &'static str {
        match self {
            RuleId::L1 => "L1",
            RuleId::L2 => "L2",
            RuleId::L3a => "L3.a",
            RuleId::L3b => "L3.b",
            RuleId::L3c => "L3.c",
            RuleId::L4a => "L4.a",
            RuleId::L4b => "L4.b",
            RuleId::L5 => "L5",
            RuleId::L6 => "L6",
            RuleId::L7 => "L7",
            RuleId::L8 => "L8",
            RuleId::L9 => "L9",
            RuleId::L10 => "L10",
            RuleId::Db1a => "DB1.a",
            RuleId::Db1b => "DB1.b",
            RuleId::Db1c => "DB1.c",
            RuleId::Db2 => "DB2",
            RuleId::Db3a => "DB3.a",
            RuleId::Db3b => "DB3.b",
            RuleId::Db4 => "DB4",
            RuleId::Db5 => "DB5",
            RuleId::Db6a => "DB6.a",
            RuleId::Db6b => "DB6.b",
            RuleId::Db7a => "DB7.a",
            RuleId::Db7b => "DB7.b",
            RuleId::Db8 => "DB8",
        }
    }

    pub fn is_dont_care(self) -> bool {
        !matches!(
            self,
            RuleId::L8
                | RuleId::L9
                | RuleId::L10
                | RuleId::Db6a
                | RuleId::Db6b
                | RuleId::Db7a
                | RuleId::Db7b
                | RuleId::Db8
        )
    }
}

impl fmt::Display for RuleId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.name())
    }
}

#[derive(Debug, Clone)]
pub struct TraceStep {
    pub depth: u32,
    pub rule: RuleId,
    pub witnesses: Vec<String>,
}

impl fmt::Display for TraceStep {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} {} on {{{}}}", self.depth, self.rule, self.witnesses.join(", "))
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum FailReason {
    OccurCheck { class: Var, cycle: String },
    SizeConflict { class: Var },
}

impl fmt::Display for FailReason {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            FailReason::OccurCheck { cycle, .. } => {
                write!(f, "Occur-Check Violation: {cycle}")
            }
            FailReason::SizeConflict { class } => {
                write!(f, "Size Conflict on {class}")
            }
        }
    }
}

#[derive(Debug, Clone)]
pub struct InferenceState {
    pub problem: Problem,
    pub counters: [u32; RULE_COUNT],
    /// Initial chain-equation count (bc + db) and variable count; the
    /// push rules together stay within m0 * n0 applications.
    pub m0: usize,
    pub n0: usize,
    pub depth: u32,
    pub lineage: Vec<TraceStep>,
}

impl InferenceState {
    pub fn new(problem: Problem) -> InferenceState {
        let m0 = problem.equations.iter().filter(|e| e.is_chain()).count();
        let n0 = problem.all_vars().len();
        InferenceState {
            problem,
            counters: [0; RULE_COUNT],
            m0,
            n0,
            depth: 0,
            lineage: Vec::new(),
        }
    }

    pub fn push_count(&self) -> u32 {
        self.counters[RuleId::L4b.index()] + self.counters[RuleId::L5.index()]
    }

    pub fn all_push_count(&self) -> u32 {
        [RuleId::L4b, RuleId::L5, RuleId::L9, RuleId::Db3a, RuleId::Db3b, RuleId::Db4]
            .iter()
            .map(|r| self.counters[r.index()])
            .sum()
    }

    fn record(&mut self, rule: RuleId, witnesses: Vec<String>) {
        self.counters[rule.index()] += 1;
        self.lineage.push(TraceStep {
            depth: self.depth,
            rule,
            witnesses,
        });
    }

    fn remove(&mut self, eq: &Equation) {
        self.problem.equations.remove(eq);
    }

    fn add(&mut self, eq: Equation) {
        self.problem.insert(eq);
    }
}

/// A d-solved list part plus the residual element problem.
#[derive(Debug, Clone)]
pub struct SolvedForm {
    pub list_part: Vec<Equation>,
    pub element_residue: Vec<Equation>,
    /// nonnil classes at emission, mapped over all members; drives
    /// nil-completion.
    pub nonnil: BTreeSet<Var>,
    pub counters: [u32; RULE_COUNT],
    pub m0: usize,
    pub n0: usize,
    pub lineage: Vec<TraceStep>,
    pub supply: crate::term::FreshSupply,
}

impl SolvedForm {
    pub fn push_count(&self) -> u32 {
        self.counters[RuleId::L4b.index()] + self.counters[RuleId::L5.index()]
    }
}

#[derive(Debug, Clone)]
pub struct SearchOutcome {
    pub solved: Vec<SolvedForm>,
    pub failures: Vec<FailReason>,
    pub expansions: usize,
}

enum Step {
    Applied,
    Failed(FailReason),
    Quiescent,
}

/// Reuses an existing cons-equation on `v` when present, otherwise
/// splits with fresh head/tail variables — the paper permits reusing
/// equations already present instead of introducing fresh ones.
fn ensure_cons(st: &mut InferenceState, v: &Var) -> (Var, Var) {
    for eq in st.problem.equations.iter() {
        if let Equation::Cons(u, h, t) = eq {
            if u == v {
                return (h.clone(), t.clone());
            }
        }
    }
    let head_hint = v.base.to_lowercase();
    let h = st.problem.supply.fresh(Sort::Element, &head_hint);
    let t = st.problem.supply.fresh(Sort::List, &v.base);
    st.add(Equation::Cons(v.clone(), h.clone(), t.clone()));
    (h, t)
}

/// As `ensure_cons`, but forces the tail to be `tail`: an existing
/// cons-equation contributes its head, and the freshly required
/// same-tail equation is merged by cancellation on cons.
fn ensure_cons_with_tail(st: &mut InferenceState, v: &Var, tail: &Var) -> Var {
    let existing = st.problem.equations.iter().find_map(|eq| match eq {
        Equation::Cons(u, h, _) if u == v => Some(h.clone()),
        _ => None,
    });
    let h = existing.unwrap_or_else(|| {
        st.problem
            .supply
            .fresh(Sort::Element, &v.base.to_lowercase())
    });
    st.add(Equation::Cons(v.clone(), h.clone(), tail.clone()));
    h
}

/// The shared body of L4.b (conditional) and L9 (don't-know): push bc
/// below cons at a bc/bc-peak. Both bc-equations are replaced by the
/// one-level-down picture with a common tail.
fn push_bc_below_cons(st: &mut InferenceState, e1: &Equation, e2: &Equation) {
    let (u, v, x) = match e1 {
        Equation::Bc(u, v, x) => (u.clone(), v.clone(), x.clone()),
        _ => unreachable!(),
    };
    let (_, w, y) = match e2 {
        Equation::Bc(u2, w, y) => (u2.clone(), w.clone(), y.clone()),
        _ => unreachable!(),
    };
    st.remove(e1);
    st.remove(e2);
    let (hv, tv) = ensure_cons(st, &v);
    let hw = if w == v {
        hv.clone()
    } else {
        ensure_cons_with_tail(st, &w, &tv)
    };
    let (hu, tu) = ensure_cons(st, &u);
    st.add(Equation::Bc(tu, tv, hu.clone()));
    st.add(Equation::H(hu.clone(), hv, x));
    st.add(Equation::H(hu, hw, y));
}

/// One saturation step: the least applicable don't-care rule instance
/// under the priority tiers (failure checks, then L1, then the
/// cancellation/nil tier, then L4.b, then the splitting tier).
fn dont_care_step(st: &mut InferenceState) -> Step {
    let g = PropagationGraph::build(&st.problem);
    let nonnil = graph::nonnil_from_graph(&g);

    // (L7) Size Conflict
    let nils: BTreeSet<&Var> = st
        .problem
        .equations
        .iter()
        .filter_map(|e| match e {
            Equation::Nil(u) => Some(u),
            _ => None,
        })
        .collect();
    for eq in st.problem.equations.iter() {
        if let Equation::Cons(u, _, _) = eq {
            if nils.contains(u) {
                let witness = eq.to_string();
                let class = u.clone();
                st.record(RuleId::L7, vec![witness, format!("{u} =? nil")]);
                return Step::Failed(FailReason::SizeConflict { class });
            }
        }
    }

    // (L6) Occur-Check Violation
    if let Some(v) = g.occur_check_violation() {
        st.record(RuleId::L6, vec![v.cycle.clone()]);
        return Step::Failed(FailReason::OccurCheck {
            class: v.class,
            cycle: v.cycle,
        });
    }

    // (L1) Variable Elimination: the larger-named variable is replaced
    // by the smaller, never both directions.
    let var_var: Vec<(Var, Var, Equation)> = st
        .problem
        .equations
        .iter()
        .filter_map(|e| match e {
            Equation::VarVarL(a, b) if a != b => Some((a.clone(), b.clone(), e.clone())),
            _ => None,
        })
        .collect();
    for (a, b, eq) in var_var {
        let (keep, kill) = if a < b { (a, b) } else { (b, a) };
        let occurs_elsewhere = st
            .problem
            .equations
            .iter()
            .any(|e| *e != eq && e.vars().contains(&kill));
        let needs_reorient = *eq.lhs() != kill;
        if !occurs_elsewhere && !needs_reorient {
            continue;
        }
        st.record(RuleId::L1, vec![eq.to_string()]);
        let old: Vec<Equation> = st.problem.equations.iter().cloned().collect();
        let mut next = BTreeSet::new();
        for e in old {
            if e == eq {
                continue;
            }
            let r = e.rename(&kill, &keep);
            if !r.is_trivial() {
                next.insert(r);
            }
        }
        next.insert(Equation::VarVarL(kill, keep));
        st.problem.equations = next;
        return Step::Applied;
    }

    // tier: cancellation and nil rules
    let eqs: Vec<Equation> = st.problem.equations.iter().cloned().collect();

    // (L2) Cancellation on cons
    for (i, e1) in eqs.iter().enumerate() {
        if let Equation::Cons(u, h1, t1) = e1 {
            for e2 in eqs.iter().skip(i + 1) {
                if let Equation::Cons(u2, h2, t2) = e2 {
                    if u == u2 {
                        st.record(RuleId::L2, vec![e1.to_string(), e2.to_string()]);
                        st.remove(e1);
                        st.add(Equation::VarVarE(h1.clone(), h2.clone()));
                        st.add(Equation::VarVarL(t1.clone(), t2.clone()));
                        return Step::Applied;
                    }
                }
            }
        }
    }

    // (L3.a/L3.b) Nil solutions for bc, (DB1.a/DB1.b) for db
    for e in &eqs {
        match e {
            Equation::Bc(u, v, _) => {
                if nils.contains(u) {
                    st.record(RuleId::L3a, vec![e.to_string(), format!("{u} =? nil")]);
                    st.remove(e);
                    st.add(Equation::Nil(v.clone()));
                    return Step::Applied;
                }
                if nils.contains(v) {
                    st.record(RuleId::L3b, vec![e.to_string(), format!("{v} =? nil")]);
                    st.remove(e);
                    st.add(Equation::Nil(u.clone()));
                    return Step::Applied;
                }
            }
            Equation::Db(u, v, _) => {
                if nils.contains(u) {
                    st.record(RuleId::Db1a, vec![e.to_string(), format!("{u} =? nil")]);
                    st.remove(e);
                    st.add(Equation::Nil(v.clone()));
                    return Step::Applied;
                }
                if nils.contains(v) {
                    st.record(RuleId::Db1b, vec![e.to_string(), format!("{v} =? nil")]);
                    st.remove(e);
                    st.add(Equation::Nil(u.clone()));
                    return Step::Applied;
                }
            }
            _ => {}
        }
    }

    // (L3.c) Nil solution-3: U =? bc(V,x) with V >bc* U
    for e in &eqs {
        if let Equation::Bc(u, v, _) = e {
            if g.back_reaches_bc(u, v) {
                st.record(RuleId::L3c, vec![e.to_string()]);
                st.remove(e);
                st.add(Equation::Nil(u.clone()));
                st.add(Equation::Nil(v.clone()));
                return Step::Applied;
            }
        }
    }

    // (DB1.c) Nil solution-3 for db: U =? db(V,x) with V >db* U
    for e in &eqs {
        if let Equation::Db(u, v, _) = e {
            if g.back_reaches_db(u, v) {
                st.record(RuleId::Db1c, vec![e.to_string()]);
                st.remove(e);
                st.add(Equation::Nil(u.clone()));
                st.add(Equation::Nil(v.clone()));
                return Step::Applied;
            }
        }
    }

    // (L4.a) Semi-cancellation on bc: same lhs, same chaining argument
    for (i, e1) in eqs.iter().enumerate() {
        if let Equation::Bc(u, v, x) = e1 {
            for e2 in eqs.iter().skip(i + 1) {
                if let Equation::Bc(u2, w, x2) = e2 {
                    if u == u2 && x == x2 {
                        st.record(RuleId::L4a, vec![e1.to_string(), e2.to_string()]);
                        st.remove(e2);
                        st.add(Equation::VarVarL(w.clone(), v.clone()));
                        return Step::Applied;
                    }
                }
            }
        }
    }

    // (DB2) Left-cancellation on db: same lhs, same list, U in nonnil
    for (i, e1) in eqs.iter().enumerate() {
        if let Equation::Db(u, v, x) = e1 {
            if !graph::in_nonnil(&nonnil, &g, u) {
                continue;
            }
            for e2 in eqs.iter().skip(i + 1) {
                if let Equation::Db(u2, v2, y) = e2 {
                    if u == u2 && v == v2 {
                        st.record(RuleId::Db2, vec![e1.to_string(), e2.to_string()]);
                        st.remove(e1);
                        st.add(Equation::VarVarE(x.clone(), y.clone()));
                        return Step::Applied;
                    }
                }
            }
        }
    }

    // (L4.b) Push bc below cons at a nonnil bc/bc-peak
    for (i, e1) in eqs.iter().enumerate() {
        if let Equation::Bc(u, _, _) = e1 {
            if !graph::in_nonnil(&nonnil, &g, u) {
                continue;
            }
            for e2 in eqs.iter().skip(i + 1) {
                if matches!(e2, Equation::Bc(u2, _, _) if u2 == u) {
                    st.record(RuleId::L4b, vec![e1.to_string(), e2.to_string()]);
                    push_bc_below_cons(st, e1, e2);
                    return Step::Applied;
                }
            }
        }
    }

    // lowest tier: splitting rules and the conditional flip
    // (L5) Splitting at a cons/bc-peak
    for e1 in &eqs {
        if let Equation::Cons(u, x, u1) = e1 {
            for e2 in &eqs {
                if let Equation::Bc(u2, v, z) = e2 {
                    if u == u2 {
                        st.record(RuleId::L5, vec![e1.to_string(), e2.to_string()]);
                        st.remove(e2);
                        let (hv, tv) = ensure_cons(st, v);
                        st.add(Equation::H(x.clone(), hv, z.clone()));
                        st.add(Equation::Bc(u1.clone(), tv, x.clone()));
                        return Step::Applied;
                    }
                }
            }
        }
    }

    // (DB3.a) Push db below cons at a nonnil db/db-peak
    for (i, e1) in eqs.iter().enumerate() {
        if let Equation::Db(u, v, x) = e1 {
            if !graph::in_nonnil(&nonnil, &g, u) {
                continue;
            }
            for e2 in eqs.iter().skip(i + 1) {
                if let Equation::Db(u2, w, y) = e2 {
                    if u == u2 {
                        st.record(RuleId::Db3a, vec![e1.to_string(), e2.to_string()]);
                        let (u_, v_, x_, w_, y_) =
                            (u.clone(), v.clone(), x.clone(), w.clone(), y.clone());
                        st.remove(e1);
                        st.remove(e2);
                        let (hv, tv) = ensure_cons(st, &v_);
                        let (hw, tw) = if w_ == v_ {
                            (hv.clone(), tv.clone())
                        } else {
                            ensure_cons(st, &w_)
                        };
                        let (hu, tu) = ensure_cons(st, &u_);
                        st.add(Equation::Db(tu.clone(), tv, hv.clone()));
                        st.add(Equation::Db(tu, tw, hw.clone()));
                        st.add(Equation::G(hu.clone(), hv, x_));
                        st.add(Equation::G(hu, hw, y_));
                        return Step::Applied;
                    }
                }
            }
        }
    }

    // (DB3.b) Push bc and db below cons at a nonnil bc/db-peak
    for e1 in &eqs {
        if let Equation::Bc(u, v, x) = e1 {
            if !graph::in_nonnil(&nonnil, &g, u) {
                continue;
            }
            for e2 in &eqs {
                if let Equation::Db(u2, w, y) = e2 {
                    if u == u2 {
                        st.record(RuleId::Db3b, vec![e1.to_string(), e2.to_string()]);
                        let (u_, v_, x_, w_, y_) =
                            (u.clone(), v.clone(), x.clone(), w.clone(), y.clone());
                        st.remove(e1);
                        st.remove(e2);
                        let (hv, tv) = ensure_cons(st, &v_);
                        let (hw, tw) = if w_ == v_ {
                            (hv.clone(), tv.clone())
                        } else {
                            ensure_cons(st, &w_)
                        };
                        let (hu, tu) = ensure_cons(st, &u_);
                        st.add(Equation::Bc(tu.clone(), tv, hu.clone()));
                        st.add(Equation::Db(tu, tw, hw.clone()));
                        st.add(Equation::H(hu.clone(), hv, x_));
                        st.add(Equation::H(hw, hu, y_));
                        return Step::Applied;
                    }
                }
            }
        }
    }

    // (DB4) Splitting for db at a cons/db-peak
    for e1 in &eqs {
        if let Equation::Cons(u, x, u1) = e1 {
            for e2 in &eqs {
                if let Equation::Db(u2, v, z) = e2 {
                    if u == u2 {
                        st.record(RuleId::Db4, vec![e1.to_string(), e2.to_string()]);
                        st.remove(e2);
                        let (hv, tv) = ensure_cons(st, v);
                        st.add(Equation::G(x.clone(), hv.clone(), z.clone()));
                        st.add(Equation::Db(u1.clone(), tv, hv));
                        return Step::Applied;
                    }
                }
            }
        }
    }

    // (DB5) Flip db to bc conditionally: V >c+ U and not V >db* U
    for e in &eqs {
        if let Equation::Db(u, v, x) = e {
            if g.back_reaches_c(u, v) && !g.back_reaches_db(u, v) {
                st.record(RuleId::Db5, vec![e.to_string()]);
                st.remove(e);
                st.add(Equation::Bc(v.clone(), u.clone(), x.clone()));
                return Step::Applied;
            }
        }
    }

    Step::Quiescent
}

#[derive(Debug)]
pub enum Saturation {
    Reduced(InferenceState),
    Failed(InferenceState, FailReason),
}

/// Runs the don't-care rules to fixpoint (L-reduction). FAIL is a
/// normal outcome carrying the triggering rule's witness.
pub fn saturate_dont_care(mut st: InferenceState) -> Saturation {
    // generous safety bound; Prop 3.2/5.4 give a polynomial step count
    let cap = 10_000 + 100 * (st.problem.equations.len() + st.n0 + 2).pow(2);
    for _ in 0..cap {
        match dont_care_step(&mut st) {
            Step::Applied => continue,
            Step::Failed(reason) => return Saturation::Failed(st, reason),
            Step::Quiescent => return Saturation::Reduced(st),
        }
    }
    unreachable!("don't-care saturation exceeded its polynomial step bound");
}

/// The don't-know alternatives at the least peak of an L-reduced
/// state. Empty iff the state has no peak (then the list part is
/// d-solved).
pub fn expand_dont_know(st: &InferenceState) -> Vec<InferenceState> {
    let g = PropagationGraph::build(&st.problem);
    // group chain equations by lhs; peak = two or more on one variable
    let mut by_lhs: BTreeMap<Var, Vec<Equation>> = BTreeMap::new();
    for e in st.problem.equations.iter() {
        if e.is_chain() {
            by_lhs.entry(e.lhs().clone()).or_default().push(e.clone());
        }
    }
    let peak = by_lhs.into_iter().find(|(_, v)| v.len() >= 2);
    let Some((_, eqs)) = peak else {
        return Vec::new();
    };
    let e1 = eqs[0].clone();
    let e2 = eqs[1].clone();
    let mut children = Vec::new();
    let child = |rule: RuleId, f: &dyn Fn(&mut InferenceState)| {
        let mut c = st.clone();
        c.depth += 1;
        c.record(rule, vec![e1.to_string(), e2.to_string()]);
        f(&mut c);
        c
    };
    match (&e1, &e2) {
        (Equation::Bc(u, v, _x), Equation::Bc(_, w, _y)) => {
            let (u, v, w) = (u.clone(), v.clone(), w.clone());
            // (L8) nil-solution branch
            children.push(child(RuleId::L8, &|c| {
                c.remove(&e1);
                c.remove(&e2);
                c.add(Equation::Nil(u.clone()));
                c.add(Equation::Nil(v.clone()));
                c.add(Equation::Nil(w.clone()));
            }));
            // (L9) guess a non-nil branch: unconditional push
            children.push(child(RuleId::L9, &|c| {
                push_bc_below_cons(c, &e1, &e2);
            }));
            // (L10) standard unification on bc
            children.push(child(RuleId::L10, &|c| {
                let (x, y) = match (&e1, &e2) {
                    (Equation::Bc(_, _, x), Equation::Bc(_, _, y)) => (x.clone(), y.clone()),
                    _ => unreachable!(),
                };
                c.remove(&e1);
                c.add(Equation::VarVarL(v.clone(), w.clone()));
                c.add(Equation::VarVarE(x, y));
            }));
        }
        (Equation::Bc(u, v, _), Equation::Db(_, w, y)) => {
            let (u, v, w, y) = (u.clone(), v.clone(), w.clone(), y.clone());
            // (DB6.b) nil-solution branch
            children.push(child(RuleId::Db6b, &|c| {
                c.remove(&e1);
                c.remove(&e2);
                c.add(Equation::Nil(u.clone()));
                c.add(Equation::Nil(v.clone()));
                c.add(Equation::Nil(w.clone()));
            }));
            // (DB7.b) guess a narrowing step for the db side
            if !g.back_reaches_db(&u, &w) {
                children.push(child(RuleId::Db7b, &|c| {
                    c.remove(&e2);
                    c.add(Equation::Bc(w.clone(), u.clone(), y.clone()));
                }));
            }
        }
        (Equation::Db(u, v, x), Equation::Db(_, w, y)) => {
            let (u, v, x, w, y) = (u.clone(), v.clone(), x.clone(), w.clone(), y.clone());
            // (DB6.a) nil-solution branch
            children.push(child(RuleId::Db6a, &|c| {
                c.remove(&e1);
                c.remove(&e2);
                c.add(Equation::Nil(u.clone()));
                c.add(Equation::Nil(v.clone()));
                c.add(Equation::Nil(w.clone()));
            }));
            // (DB7.a) narrowing, on either db-equation of the peak
            if !g.back_reaches_db(&u, &v) {
                children.push(child(RuleId::Db7a, &|c| {
                    c.remove(&e1);
                    c.add(Equation::Bc(v.clone(), u.clone(), x.clone()));
                }));
            }
            if !g.back_reaches_db(&u, &w) {
                children.push(child(RuleId::Db7a, &|c| {
                    c.remove(&e2);
                    c.add(Equation::Bc(w.clone(), u.clone(), y.clone()));
                }));
            }
            // (DB8) standard unification on db
            children.push(child(RuleId::Db8, &|c| {
                c.remove(&e1);
                c.add(Equation::VarVarL(v.clone(), w.clone()));
                c.add(Equation::VarVarE(x.clone(), y.clone()));
            }));
        }
        _ => unreachable!("chain equations only"),
    }
    children
}

/// Canonical key for duplicate-state pruning: fresh variables renamed
/// by first occurrence over the sorted equation list.
fn canonical_key(p: &Problem) -> String {
    let mut map: BTreeMap<Var, String> = BTreeMap::new();
    let mut n = 0;
    let mut out = String::new();
    for e in &p.equations {
        let rendered = e.to_string();
        // rename fresh vars in display order
        let mut result = String::new();
        for piece in split_idents(&rendered) {
            match piece {
                Piece::Ident(s) if s.contains('#') => {
                    let var = e
                        .vars()
                        .into_iter()
                        .find(|v| v.to_string() == s);
                    if let Some(v) = var {
                        let name = map.entry(v).or_insert_with(|| {
                            n += 1;
                            format!("${n}")
                        });
                        result.push_str(name);
                    } else {
                        result.push_str(s);
                    }
                }
                Piece::Ident(s) => result.push_str(s),
                Piece::Other(c) => result.push(c),
            }
        }
        out.push_str(&result);
        out.push(';');
    }
    out
}

enum Piece<'a> {
    Ident(&'a str),
    Other(char),
}

fn split_idents(s: &str) -> Vec<Piece<'_>> {
    let mut out = Vec::new();
    let mut start = None;
    for (i, c) in s.char_indices() {
        if c.is_alphanumeric() || c == '_' || c == '#' || c == '\'' {
            if start.is_none() {
                start = Some(i);
            }
        } else {
            if let Some(b) = start.take() {
                out.push(Piece::Ident(&s[b..i]));
            }
            out.push(Piece::Other(c));
        }
    }
    if let Some(b) = start {
        out.push(Piece::Ident(&s[b..]));
    }
    out
}

/// Orders a d-solved list part so that no lhs variable occurs in any
/// later equation.
fn d_solved_order(eqs: &[Equation]) -> Vec<Equation> {
    let by_lhs: BTreeMap<Var, Equation> = eqs
        .iter()
        .map(|e| (e.lhs().clone(), e.clone()))
        .collect();
    debug_assert_eq!(by_lhs.len(), eqs.len(), "duplicate lhs in solved form");
    let mut order: Vec<Equation> = Vec::new();
    let mut done: BTreeSet<Var> = BTreeSet::new();
    // repeatedly emit equations all of whose rhs-solved deps are done
    let mut remaining: Vec<Equation> = eqs.to_vec();
    while !remaining.is_empty() {
        let before = remaining.len();
        remaining.retain(|e| {
            let deps_done = e
                .vars()
                .iter()
                .skip(1)
                .filter(|v| by_lhs.contains_key(v))
                .all(|v| done.contains(v));
            if deps_done {
                done.insert(e.lhs().clone());
                order.push(e.clone());
                false
            } else {
                true
            }
        });
        assert!(
            remaining.len() < before,
            "cyclic dependency in solved form: {remaining:?}"
        );
    }
    // reverse so that each lhs occurs only in earlier equations' rhs
    order.reverse();
    order
}

/// Depth-first search alternating don't-care saturation and don't-know
/// expansion. Leaves where no rule applies are d-solved and emitted;
/// FAIL leaves are pruned; revisited canonical states are pruned.
pub fn solve_lists(problem: &Problem, branch_cap: usize) -> Result<SearchOutcome> {
    let root = InferenceState::new(problem.clone());
    let mut out = SearchOutcome {
        solved: Vec::new(),
        failures: Vec::new(),
        expansions: 0,
    };
    let mut seen: HashSet<String> = HashSet::new();
    let mut stack: Vec<InferenceState> = vec![root];
    while let Some(st) = stack.pop() {
        let st = match saturate_dont_care(st) {
            Saturation::Reduced(s) => s,
            Saturation::Failed(s, reason) => {
                let _ = s;
                out.failures.push(reason);
                continue;
            }
        };
        if !seen.insert(canonical_key(&st.problem)) {
            continue;
        }
        let children = expand_dont_know(&st);
        if children.is_empty() {
            out.solved.push(emit_solved(&st));
            continue;
        }
        out.expansions += children.len();
        if out.expansions > branch_cap {
            return Err(SolverError::BudgetExceeded(format!(
                "don't-know expansion count exceeded {branch_cap}"
            )));
        }
        // preserve deterministic DFS order: first child explored first
        for c in children.into_iter().rev() {
            stack.push(c);
        }
    }
    // deterministic emission order independent of DFS bookkeeping
    Ok(out)
}

fn emit_solved(st: &InferenceState) -> SolvedForm {
    let g = PropagationGraph::build(&st.problem);
    let nn = graph::nonnil_from_graph(&g);
    let members: BTreeSet<Var> = st
        .problem
        .all_vars()
        .into_iter()
        .filter(|v| v.sort == Sort::List && nn.contains(&g.class_of(v)))
        .collect();
    let list_part: Vec<Equation> = st.problem.list_equations().cloned().collect();
    debug_assert!(each_class_one_arc(&g), "solved form with a residual peak");
    SolvedForm {
        list_part: d_solved_order(&list_part),
        element_residue: st.problem.element_equations().cloned().collect(),
        nonnil: members,
        counters: st.counters,
        m0: st.m0,
        n0: st.n0,
        lineage: st.lineage.clone(),
        supply: st.problem.supply.clone(),
    }
}

/// Prop 3.5 shape: at emitted states every class has at most one
/// outgoing directed arc.
fn each_class_one_arc(g: &PropagationGraph) -> bool {
    let mut seen = BTreeSet::new();
    for a in &g.arcs {
        if !seen.insert(a.src.clone()) {
            return false;
        }
    }
    true
}

/// Composes the triangular list part with a solution of the element
/// residue. With `nil_complete`, unresolved list variables outside
/// nonnil are bound to nil; otherwise they stay as parameters.
pub fn extract_unifier(
    sf: &SolvedForm,
    element_solution: &Subst,
    nil_complete: bool,
    th: crate::theory::TheoryId,
) -> Result<Subst> {
    for eq in &sf.element_residue {
        let (l, r) = eq.as_term_pair();
        let l = element_solution.apply(&l);
        let r = element_solution.apply(&r);
        if l.is_ground() && r.is_ground() && !crate::rewrite::eq_mod(&l, &r, th) {
            return Err(SolverError::InconsistentInput(format!(
                "element solution does not satisfy {eq}"
            )));
        }
    }
    let mut bindings = element_solution.clone();
    // list part is d-solved: process from the end so every rhs is
    // already fully resolved when substituted
    for eq in sf.list_part.iter().rev() {
        let rhs = bindings.apply(&eq.rhs_term());
        let mut next = Subst::new();
        for (v, t) in bindings.iter() {
            next.insert(v.clone(), t.clone());
        }
        next.insert(eq.lhs().clone(), rhs);
        bindings = next;
    }
    if nil_complete {
        let mut nil_map = Subst::new();
        let mut all_vars: BTreeSet<Var> = BTreeSet::new();
        for eq in sf.list_part.iter().chain(sf.element_residue.iter()) {
            all_vars.extend(eq.vars());
        }
        for v in all_vars {
            if v.sort == Sort::List && bindings.get(&v).is_none() && !sf.nonnil.contains(&v) {
                nil_map.insert(v, Term::Nil);
            }
        }
        if !nil_map.is_empty() {
            let rebound: Vec<(Var, Term)> = bindings
                .iter()
                .map(|(v, t)| (v.clone(), nil_map.apply(t)))
                .collect();
            let mut next = Subst::new();
            for (v, t) in rebound {
                next.insert(v, t);
            }
            for (v, t) in nil_map.iter() {
                next.insert(v.clone(), t.clone());
            }
            bindings = next;
        }
    }
    // normalize images modulo the theory (bc(nil,x) -> nil and the like)
    let normal: Vec<(Var, Term)> = bindings
        .iter()
        .map(|(v, t)| (v.clone(), crate::rewrite::normalize(t, th)))
        .collect();
    let mut out = Subst::new();
    for (v, t) in normal {
        out.insert(v, t);
    }
    debug_assert!(out.is_idempotent(), "non-idempotent unifier: {out:?}");
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::theory::TheoryId;

    fn lv(n: &str) -> Var {
        Var::new(n, Sort::List)
    }

    fn ev(n: &str) -> Var {
        Var::new(n, Sort::Element)
    }

    fn problem(th: TheoryId, eqs: Vec<Equation>) -> Problem {
        let mut p = Problem::empty(th);
        for e in eqs {
            p.insert(e);
        }
        p
    }

    fn saturate(p: Problem) -> Saturation {
        saturate_dont_care(InferenceState::new(p))
    }

    #[test]
    fn size_conflict_fails() {
        let p = problem(
            TheoryId::Bc0,
            vec![
                Equation::Cons(lv("U"), ev("v"), lv("W")),
                Equation::Nil(lv("U")),
            ],
        );
        match saturate(p) {
            Saturation::Failed(_, FailReason::SizeConflict { class }) => {
                assert_eq!(class, lv("U"))
            }
            other => panic!("expected size conflict, got {other:?}"),
        }
    }

    #[test]
    fn nil_solution_2() {
        let p = problem(
            TheoryId::Bc0,
            vec![
                Equation::Bc(lv("U"), lv("V"), ev("x")),
                Equation::Nil(lv("V")),
            ],
        );
        match saturate(p) {
            Saturation::Reduced(st) => {
                assert!(st.problem.equations.contains(&Equation::Nil(lv("U"))));
                assert!(st.problem.equations.contains(&Equation::Nil(lv("V"))));
                assert_eq!(st.problem.equations.len(), 2);
            }
            other => panic!("unexpected failure: {other:?}"),
        }
    }

    #[test]
    fn db_cycle_gives_nil_via_db1c() {
        // Example 5.9(i)
        let p = problem(
            TheoryId::Dbc,
            vec![
                Equation::Db(lv("U"), lv("V"), ev("y")),
                Equation::Db(lv("V"), lv("U"), ev("z")),
            ],
        );
        match saturate(p) {
            Saturation::Reduced(st) => {
                assert!(st.problem.equations.contains(&Equation::Nil(lv("U"))));
                assert!(st.problem.equations.contains(&Equation::Nil(lv("V"))));
                assert!(st.counters[RuleId::Db1c.index()] >= 1);
            }
            other => panic!("unexpected failure: {other:?}"),
        }
    }

    #[test]
    fn db5_flip_example_5_9_ii() {
        let p = problem(
            TheoryId::Dbc,
            vec![
                Equation::Bc(lv("U"), lv("V"), ev("x")),
                Equation::Db(lv("V"), lv("U"), ev("y")),
            ],
        );
        match saturate(p) {
            Saturation::Reduced(st) => {
                let eqs: Vec<String> =
                    st.problem.equations.iter().map(|e| e.to_string()).collect();
                assert_eq!(eqs, vec!["U =? bc(V, x)", "U =? bc(V, y)"]);
                assert_eq!(st.counters[RuleId::Db5.index()], 1);
            }
            other => panic!("unexpected failure: {other:?}"),
        }
    }

    #[test]
    fn occur_check_example_5_8_i() {
        let p = problem(
            TheoryId::Dbc,
            vec![
                Equation::Db(lv("U"), lv("V"), ev("x")),
                Equation::Cons(lv("V"), ev("y"), lv("W")),
                Equation::Bc(lv("W"), lv("U"), ev("z")),
            ],
        );
        match saturate(p) {
            Saturation::Failed(_, FailReason::OccurCheck { cycle, .. }) => {
                assert_eq!(cycle, "U >db V >cons W >bc U");
            }
            other => panic!("expected occur check, got {other:?}"),
        }
    }

    #[test]
    fn expand_bc_bc_peak_has_three_children() {
        let p = problem(
            TheoryId::Bc0,
            vec![
                Equation::Bc(lv("U"), lv("V"), ev("x")),
                Equation::Bc(lv("U"), lv("V"), ev("y")),
            ],
        );
        match saturate(p) {
            Saturation::Reduced(st) => {
                let kids = expand_dont_know(&st);
                assert_eq!(kids.len(), 3);
                let rules: Vec<RuleId> =
                    kids.iter().map(|k| k.lineage.last().unwrap().rule).collect();
                assert_eq!(rules, vec![RuleId::L8, RuleId::L9, RuleId::L10]);
            }
            other => panic!("unexpected failure: {other:?}"),
        }
    }

    #[test]
    fn solve_lists_example_5_8_ii() {
        // U =? db(V,y), U =? cons(x,U1), V =? cons(y,V1)
        let p = problem(
            TheoryId::Dbc,
            vec![
                Equation::Db(lv("U"), lv("V"), ev("y")),
                Equation::Cons(lv("U"), ev("x"), lv("U1")),
                Equation::Cons(lv("V"), ev("y"), lv("V1")),
            ],
        );
        let out = solve_lists(&p, 1000).unwrap();
        assert_eq!(out.solved.len(), 1);
        let sf = &out.solved[0];
        let listed: BTreeSet<String> = sf.list_part.iter().map(|e| e.to_string()).collect();
        assert!(listed.contains("U =? cons(x, U1)"));
        assert!(listed.contains("V =? cons(y, V1)"));
        assert!(listed.contains("U1 =? db(V1, y)"));
        let elems: Vec<String> = sf.element_residue.iter().map(|e| e.to_string()).collect();
        assert_eq!(elems, vec!["x =? g(y, y)"]);
    }

    #[test]
    fn solve_lists_budget() {
        let p = problem(
            TheoryId::Bc0,
            vec![
                Equation::Bc(lv("U"), lv("V"), ev("x")),
                Equation::Bc(lv("U"), lv("W"), ev("y")),
            ],
        );
        assert!(matches!(
            solve_lists(&p, 1),
            Err(SolverError::BudgetExceeded(_))
        ));
    }
}
