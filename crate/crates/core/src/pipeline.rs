//! End-to-end solving: don't-care saturation and don't-know search on
//! the list part, element solving on each residue, and unifier
//! assembly, with deterministic output order and syntactic
//! deduplication after canonical renaming.

use crate::elem::{solve_elements, ElemFail};
use crate::engine::{self, FailReason, SolvedForm};
use crate::equation::Problem;
use crate::errors::Result;
use crate::rewrite;
use crate::term::{Sort, Subst, Term, Var};
use std::collections::{BTreeMap, BTreeSet};

#[derive(Debug, Clone)]
pub struct SolveOptions {
    /// Enumerate the full finite unifier set (--all) instead of
    /// stopping at the first solution.
    pub all: bool,
    /// Bind list parameters outside nonnil to nil (Prop 3.3 style
    /// decision mode).
    pub nil_complete: bool,
    pub max_branches: usize,
}

impl Default for SolveOptions {
    fn default() -> SolveOptions {
        SolveOptions {
            all: true,
            nil_complete: false,
            max_branches: 10_000,
        }
    }
}

#[derive(Debug, Clone)]
pub struct Unifier {
    /// Full composed bindings, internal variables included.
    pub bindings: Subst,
    /// Bindings restricted to the problem's original variables.
    pub restricted: Vec<(Var, Term)>,
    /// Free variables of the restricted bindings plus unbound original
    /// variables: instantiate them arbitrarily.
    pub parameters: BTreeSet<Var>,
}

#[derive(Debug, Clone, Default)]
pub struct SolveStats {
    pub expansions: usize,
    pub solved_forms: usize,
    pub m0: usize,
    pub n0: usize,
    /// max over emitted branches of counters[L4b] + counters[L5]
    pub max_push: u32,
    /// max over emitted branches of all push-rule applications
    pub max_all_push: u32,
}

#[derive(Debug, Clone)]
pub struct Report {
    pub unifiers: Vec<Unifier>,
    pub failures: Vec<FailReason>,
    pub element_failures: Vec<ElemFail>,
    pub stats: SolveStats,
    pub trace: Vec<String>,
}

impl Report {
    pub fn unifiable(&self) -> bool {
        !self.unifiers.is_empty()
    }
}

fn restricted_view(problem: &Problem, bindings: &Subst) -> (Vec<(Var, Term)>, BTreeSet<Var>) {
    let mut restricted = Vec::new();
    let mut parameters: BTreeSet<Var> = BTreeSet::new();
    for v in &problem.original_vars {
        match bindings.get(v) {
            Some(t) if *t != Term::var(v.clone()) => {
                parameters.extend(t.vars().into_iter().filter(|w| bindings.get(w).is_none()));
                restricted.push((v.clone(), t.clone()));
            }
            _ => {
                parameters.insert(v.clone());
            }
        }
    }
    (restricted, parameters)
}

/// Canonical rendering of a restricted unifier: generated variables
/// renumbered by first occurrence, so branch-internal naming does not
/// create spurious distinctions.
fn canonical_render(restricted: &[(Var, Term)]) -> String {
    let mut map: BTreeMap<Var, String> = BTreeMap::new();
    let mut n = 0;
    let render_term = |t: &Term, map: &mut BTreeMap<Var, String>, n: &mut usize| {
        let mut s = String::new();
        fn go(t: &Term, s: &mut String, map: &mut BTreeMap<Var, String>, n: &mut usize) {
            match t {
                Term::Var(v) if v.is_fresh() => {
                    let name = map.entry(v.clone()).or_insert_with(|| {
                        *n += 1;
                        format!("?{n}")
                    });
                    s.push_str(name);
                }
                Term::Var(v) => s.push_str(&v.to_string()),
                Term::Const(c) => s.push_str(c),
                Term::Nil => s.push_str("nil"),
                Term::Cons(a, b) => {
                    s.push_str("cons(");
                    go(a, s, map, n);
                    s.push(',');
                    go(b, s, map, n);
                    s.push(')');
                }
                Term::Bc(a, b) | Term::Db(a, b) | Term::H(a, b) | Term::G(a, b) => {
                    s.push_str(match t {
                        Term::Bc(..) => "bc(",
                        Term::Db(..) => "db(",
                        Term::H(..) => "h(",
                        _ => "g(",
                    });
                    go(a, s, map, n);
                    s.push(',');
                    go(b, s, map, n);
                    s.push(')');
                }
                Term::Enc(a) => {
                    s.push_str("enc(");
                    go(a, s, map, n);
                    s.push(')');
                }
                Term::Car(a) | Term::Cdr(a) => {
                    s.push_str(if matches!(t, Term::Car(_)) { "car(" } else { "cdr(" });
                    go(a, s, map, n);
                    s.push(')');
                }
                Term::Xor(args) => {
                    s.push_str("xor(");
                    for a in args {
                        go(a, s, map, n);
                        s.push(',');
                    }
                    s.push(')');
                }
            }
        }
        go(t, &mut s, map, n);
        s
    };
    let mut out = String::new();
    for (v, t) in restricted {
        out.push_str(&v.to_string());
        out.push('=');
        out.push_str(&render_term(t, &mut map, &mut n));
        out.push(';');
    }
    out
}

/// Runs the full pipeline on a standard-form problem.
pub fn solve(problem: &Problem, opts: &SolveOptions) -> Result<Report> {
    let search = engine::solve_lists(problem, opts.max_branches)?;
    let mut report = Report {
        unifiers: Vec::new(),
        failures: search.failures.clone(),
        element_failures: Vec::new(),
        stats: SolveStats {
            expansions: search.expansions,
            solved_forms: search.solved.len(),
            m0: search.solved.first().map(|s| s.m0).unwrap_or(0),
            n0: search.solved.first().map(|s| s.n0).unwrap_or(0),
            ..SolveStats::default()
        },
        trace: Vec::new(),
    };
    let mut seen: BTreeSet<String> = BTreeSet::new();
    for sf in &search.solved {
        report.stats.max_push = report.stats.max_push.max(sf.push_count());
        report.stats.max_all_push = report
            .stats
            .max_all_push
            .max(all_push_count(sf));
        for line in &sf.lineage {
            report.trace.push(line.to_string());
        }
        let mut supply = sf.supply.clone();
        let element = solve_elements(
            &sf.element_residue,
            problem.theory,
            &mut supply,
            !opts.all,
            opts.max_branches,
        )?;
        let mgus = match element {
            Ok(m) => m,
            Err(f) => {
                report.element_failures.push(f);
                continue;
            }
        };
        for mgu in mgus {
            let bindings =
                engine::extract_unifier(sf, &mgu, opts.nil_complete, problem.theory)?;
            let (restricted, parameters) = restricted_view(problem, &bindings);
            let key = canonical_render(&restricted);
            if seen.insert(key) {
                report.unifiers.push(Unifier {
                    bindings,
                    restricted,
                    parameters,
                });
                if !opts.all {
                    return Ok(report);
                }
            }
        }
    }
    Ok(report)
}

fn all_push_count(sf: &SolvedForm) -> u32 {
    use crate::engine::RuleId::*;
    [L4b, L5, L9, Db3a, Db3b, Db4]
        .iter()
        .map(|r| sf.counters[r.index()])
        .sum()
}

/// Instantiates a unifier's parameters with generic ground terms
/// (fresh distinct constants; fresh singleton lists for list
/// parameters) and checks every original equation modulo the theory.
pub fn verify_unifier(problem: &Problem, u: &Unifier) -> bool {
    let mut inst = Subst::new();
    let mut i = 0;
    let mut fresh_const = || {
        i += 1;
        Term::constant(format!("k{i}"))
    };
    let mut free: BTreeSet<Var> = u.parameters.clone();
    for (_, t) in u.bindings.iter() {
        free.extend(t.vars().into_iter().filter(|w| u.bindings.get(w).is_none()));
    }
    for v in free {
        let image = match v.sort {
            Sort::Element => fresh_const(),
            Sort::List => Term::cons(fresh_const(), Term::Nil),
        };
        inst.insert(v, image);
    }
    let full = inst.compose_after(&u.bindings);
    problem.original_equations.iter().all(|(l, r)| {
        let sl = inst.apply(&full.apply(l));
        let sr = inst.apply(&full.apply(r));
        rewrite::eq_mod(&sl, &sr, problem.theory)
    })
}
