//! Shared helpers for the integration suites: problem builders, seeded
//! random generators, and comparison utilities.

#![allow(dead_code)]

use chainunify::equation::{Atom, Equation, Problem};
use chainunify::oracle::{self, SearchBudget, Subsumption};
use chainunify::term::{Sort, Subst, Term, Var};
use chainunify::theory::TheoryId;
use rand::prelude::*;
use rand_chacha::ChaCha8Rng;
use std::collections::{BTreeMap, BTreeSet};

pub fn lv(n: &str) -> Var {
    Var::new(n, Sort::List)
}

pub fn ev(n: &str) -> Var {
    Var::new(n, Sort::Element)
}

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Builds a problem from standard-form equations, recording them as
/// the original equations for soundness checks and restriction.
pub fn problem_of(th: TheoryId, eqs: Vec<Equation>) -> Problem {
    let mut p = Problem::empty(th);
    for e in eqs {
        let (l, r) = e.as_term_pair();
        p.original_vars.extend(l.vars());
        p.original_vars.extend(r.vars());
        p.original_equations.push((l, r));
        p.insert(e);
    }
    p
}

/// α-equality of restricted binding lists: same bound variables in
/// order, terms equal under a consistent bijective renaming of the
/// generated (fresh) variables.
pub fn alpha_equal(a: &[(Var, Term)], b: &[(Var, Term)]) -> bool {
    if a.len() != b.len() {
        return false;
    }
    let mut fwd: BTreeMap<Var, Var> = BTreeMap::new();
    let mut bwd: BTreeMap<Var, Var> = BTreeMap::new();
    fn go(
        s: &Term,
        t: &Term,
        fwd: &mut BTreeMap<Var, Var>,
        bwd: &mut BTreeMap<Var, Var>,
    ) -> bool {
        use Term::*;
        match (s, t) {
            (Var(v), Var(w)) => {
                if v.is_fresh() != w.is_fresh() {
                    return false;
                }
                if !v.is_fresh() {
                    return v == w;
                }
                let f = fwd.entry(v.clone()).or_insert_with(|| w.clone());
                let g = bwd.entry(w.clone()).or_insert_with(|| v.clone());
                f == w && g == v
            }
            (Const(a), Const(b)) => a == b,
            (Nil, Nil) => true,
            (Cons(a, b), Cons(c, d))
            | (Bc(a, b), Bc(c, d))
            | (Db(a, b), Db(c, d))
            | (H(a, b), H(c, d))
            | (G(a, b), G(c, d)) => go(a, c, fwd, bwd) && go(b, d, fwd, bwd),
            (Enc(a), Enc(b)) | (Car(a), Car(b)) | (Cdr(a), Cdr(b)) => go(a, b, fwd, bwd),
            (Xor(xs), Xor(ys)) => {
                xs.len() == ys.len()
                    && xs
                        .iter()
                        .zip(ys.iter())
                        .all(|(x, y)| go(x, y, fwd, bwd))
            }
            _ => false,
        }
    }
    a.iter().zip(b.iter()).all(|((v, s), (w, t))| {
        v == w && go(s, t, &mut fwd, &mut bwd)
    })
}

/// Instantiates a substitution's parameters with generic distinct
/// ground data, returning the grounded substitution and the constants
/// spent.
pub fn generic_instance(
    problem_vars: &BTreeSet<Var>,
    s: &Subst,
    prefix: &str,
) -> (Subst, Vec<String>) {
    let mut params: BTreeSet<Var> = BTreeSet::new();
    for v in problem_vars {
        match s.get(v) {
            Some(t) => params.extend(t.vars().into_iter().filter(|w| s.get(w).is_none())),
            None => {
                params.insert(v.clone());
            }
        }
    }
    let mut consts = Vec::new();
    let mut inst = Subst::new();
    for (i, p) in params.into_iter().enumerate() {
        let c = format!("{prefix}{i}");
        consts.push(c.clone());
        let image = match p.sort {
            Sort::Element => Term::constant(c),
            Sort::List => Term::cons(Term::constant(c), Term::Nil),
        };
        inst.insert(p, image);
    }
    let mut grounded = Subst::new();
    for v in problem_vars {
        let img = match s.get(v) {
            Some(t) => inst.apply(t),
            None => inst.apply(&Term::var(v.clone())),
        };
        grounded.insert(v.clone(), img);
    }
    (grounded, consts)
}

/// Both substitutions subsume each other's generic ground instance:
/// "the same unifier up to renaming and equality modulo the theory".
pub fn mutually_subsuming(
    problem_vars: &BTreeSet<Var>,
    a: &Subst,
    b: &Subst,
    th: TheoryId,
) -> bool {
    let dir = |gen: &Subst, grd: &Subst, tag: &str| {
        let (ground, consts) = generic_instance(problem_vars, grd, tag);
        let budget = SearchBudget {
            max_depth: 2,
            constant_pool: consts,
            max_list_len: 1,
            elem_cap: 16,
            list_elem_cap: 16,
            max_assignments: 2_000_000,
        };
        oracle::subsumes(problem_vars, gen, &ground, th, &budget) == Subsumption::Yes
    };
    dir(a, b, "cg") && dir(b, a, "ch")
}

pub struct RandomOpts {
    pub list_vars: Vec<&'static str>,
    pub elem_vars: Vec<&'static str>,
    pub constants: Vec<&'static str>,
    pub min_eqs: usize,
    pub max_eqs: usize,
}

impl RandomOpts {
    pub fn small() -> RandomOpts {
        RandomOpts {
            list_vars: vec!["U", "V", "W"],
            elem_vars: vec!["x", "y", "z"],
            constants: vec!["a", "b"],
            min_eqs: 2,
            max_eqs: 5,
        }
    }

    pub fn tiny() -> RandomOpts {
        RandomOpts {
            list_vars: vec!["U", "V"],
            elem_vars: vec!["x", "y"],
            constants: vec!["a", "b"],
            min_eqs: 2,
            max_eqs: 3,
        }
    }
}

/// A random standard-form problem over small variable pools.
pub fn random_problem(th: TheoryId, opts: &RandomOpts, rng: &mut ChaCha8Rng) -> Problem {
    let lvar = |rng: &mut ChaCha8Rng, opts: &RandomOpts| {
        lv(opts.list_vars[rng.gen_range(0..opts.list_vars.len())])
    };
    let evar = |rng: &mut ChaCha8Rng, opts: &RandomOpts| {
        ev(opts.elem_vars[rng.gen_range(0..opts.elem_vars.len())])
    };
    let konst = |rng: &mut ChaCha8Rng, opts: &RandomOpts| {
        opts.constants[rng.gen_range(0..opts.constants.len())].to_string()
    };
    let n = rng.gen_range(opts.min_eqs..=opts.max_eqs);
    let mut eqs = Vec::new();
    for _ in 0..n {
        let mut shapes: Vec<u8> = vec![0, 1, 2, 3, 5, 6, 7];
        if th.has_db() {
            shapes.push(4); // db
            shapes.push(8); // g
        }
        if th.has_xor() {
            shapes.push(9); // xor
            shapes.push(10); // enc
        }
        let shape = shapes[rng.gen_range(0..shapes.len())];
        let eq = match shape {
            0 => Equation::VarVarL(lvar(rng, opts), lvar(rng, opts)),
            1 => Equation::Nil(lvar(rng, opts)),
            2 => Equation::Cons(lvar(rng, opts), evar(rng, opts), lvar(rng, opts)),
            3 => Equation::Bc(lvar(rng, opts), lvar(rng, opts), evar(rng, opts)),
            4 => Equation::Db(lvar(rng, opts), lvar(rng, opts), evar(rng, opts)),
            5 => Equation::VarVarE(evar(rng, opts), evar(rng, opts)),
            6 => Equation::ConstEq(evar(rng, opts), konst(rng, opts)),
            7 => Equation::H(evar(rng, opts), evar(rng, opts), evar(rng, opts)),
            8 => Equation::G(evar(rng, opts), evar(rng, opts), evar(rng, opts)),
            9 => {
                let mut atoms = Vec::new();
                for _ in 0..rng.gen_range(1..=3) {
                    if rng.gen_bool(0.5) {
                        atoms.push(Atom::Var(evar(rng, opts)));
                    } else {
                        atoms.push(Atom::Const(konst(rng, opts)));
                    }
                }
                atoms.sort();
                // cancel duplicate pairs the way the canonical form does
                let mut canon: Vec<Atom> = Vec::new();
                for a in atoms {
                    if canon.last() == Some(&a) {
                        canon.pop();
                    } else {
                        canon.push(a);
                    }
                }
                Equation::Xor(evar(rng, opts), canon)
            }
            _ => Equation::Enc(evar(rng, opts), evar(rng, opts)),
        };
        if !eq.is_trivial() {
            eqs.push(eq);
        }
    }
    problem_of(th, eqs)
}

/// Random ground element term in normal form.
pub fn random_ground_element(th: TheoryId, depth: usize, rng: &mut ChaCha8Rng) -> Term {
    let consts = ["a", "b", "c"];
    let t = if depth == 0 || rng.gen_bool(0.4) {
        Term::constant(consts[rng.gen_range(0..consts.len())])
    } else {
        match th {
            TheoryId::Bc1 => {
                if rng.gen_bool(0.5) {
                    Term::enc(random_ground_element(th, depth - 1, rng))
                } else {
                    Term::xor(vec![
                        random_ground_element(th, depth - 1, rng),
                        random_ground_element(th, depth - 1, rng),
                    ])
                }
            }
            _ => {
                let a = random_ground_element(th, depth - 1, rng);
                let b = random_ground_element(th, depth - 1, rng);
                if th.has_db() && rng.gen_bool(0.35) {
                    Term::g(a, b)
                } else {
                    Term::h(a, b)
                }
            }
        }
    };
    chainunify::rewrite::normalize(&t, th)
}

/// Random ground list (cons chain) in normal form.
pub fn random_ground_list(th: TheoryId, max_len: usize, depth: usize, rng: &mut ChaCha8Rng) -> Term {
    let len = rng.gen_range(0..=max_len);
    let items = (0..len)
        .map(|_| random_ground_element(th, depth, rng))
        .collect();
    Term::list(items)
}

/// The timing family for the growth-curve check: a cons chain with a
/// same-list bc/bc peak hanging off every second chain variable. All
/// don't-care, solvable, no don't-know branching.
pub fn caterpillar(n_eqs: usize) -> Problem {
    let k = n_eqs / 2;
    let mut eqs = Vec::new();
    for i in 0..k {
        eqs.push(Equation::Cons(
            lv(&format!("U{i}")),
            ev(&format!("x{i}")),
            lv(&format!("U{}", i + 1)),
        ));
    }
    for i in 0..(n_eqs - k) / 2 {
        let anchor = lv(&format!("U{}", i % k));
        eqs.push(Equation::Bc(lv(&format!("W{i}")), anchor.clone(), ev(&format!("z{i}"))));
        eqs.push(Equation::Bc(lv(&format!("W{i}")), anchor, ev(&format!("t{i}"))));
    }
    problem_of(TheoryId::Bc0, eqs)
}
