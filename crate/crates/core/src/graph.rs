//! The propagation graph: equivalence classes of list variables with
//! arcs labeled >cons, >bc, >db, the nonnil fixpoint, occur-check
//! detection, and the reachability relations the inference rules need.
//!
//! The graph is recomputed from the equation set after every engine
//! step; correctness over micro-performance at desk scale.

use crate::equation::{Equation, Problem};
use crate::term::{Sort, Var};
use std::collections::{BTreeMap, BTreeSet, VecDeque};
use std::fmt;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum ArcLabel {
    Cons,
    Bc,
    Db,
}

impl fmt::Display for ArcLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ArcLabel::Cons => write!(f, "cons"),
            ArcLabel::Bc => write!(f, "bc"),
            ArcLabel::Db => write!(f, "db"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
pub struct Arc {
    pub src: Var,
    pub label: ArcLabel,
    pub dst: Var,
    pub witness: Equation,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RelKind {
    BcStar,
    DbStar,
    CPlus,
    CSimStar,
}

#[derive(Debug, Clone)]
pub struct PropagationGraph {
    /// Each list variable mapped to its class representative (the
    /// lexicographically least member).
    rep: BTreeMap<Var, Var>,
    /// Arcs between representatives, one per witness equation.
    pub arcs: Vec<Arc>,
    /// Strongly connected components of the directed bc-, db-, and
    /// (bc ∪ db)-subgraphs, for the rule side conditions: given an arc
    /// U → V, "V reaches U" is exactly "same component".
    scc_bc: BTreeMap<Var, usize>,
    scc_db: BTreeMap<Var, usize>,
    scc_c: BTreeMap<Var, usize>,
}

/// An occur-check violation: a ≻l-cycle through at least one cons arc.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct OccurViolation {
    pub class: Var,
    pub cycle: String,
}

impl PropagationGraph {
    pub fn build(p: &Problem) -> PropagationGraph {
        // union-find over the list variables, merged by U =? V equations
        let mut parent: BTreeMap<Var, Var> = BTreeMap::new();
        fn find(parent: &mut BTreeMap<Var, Var>, v: &Var) -> Var {
            let p = parent.get(v).cloned().unwrap_or_else(|| v.clone());
            if &p == v {
                return p;
            }
            let root = find(parent, &p);
            parent.insert(v.clone(), root.clone());
            root
        }
        let touch = |parent: &mut BTreeMap<Var, Var>, v: &Var| {
            parent.entry(v.clone()).or_insert_with(|| v.clone());
        };
        for eq in &p.equations {
            for v in eq.vars() {
                if v.sort == Sort::List {
                    touch(&mut parent, &v);
                }
            }
        }
        for eq in &p.equations {
            if let Equation::VarVarL(a, b) = eq {
                let ra = find(&mut parent, a);
                let rb = find(&mut parent, b);
                if ra != rb {
                    // deterministic representative: least name wins
                    let (keep, lose) = if ra < rb { (ra, rb) } else { (rb, ra) };
                    parent.insert(lose, keep);
                }
            }
        }
        let vars: Vec<Var> = parent.keys().cloned().collect();
        let mut rep = BTreeMap::new();
        for v in vars {
            let r = find(&mut parent, &v);
            rep.insert(v, r);
        }
        let mut arcs = Vec::new();
        for eq in &p.equations {
            let (src, label, dst) = match eq {
                Equation::Cons(u, _, t) => (u, ArcLabel::Cons, t),
                Equation::Bc(u, l, _) => (u, ArcLabel::Bc, l),
                Equation::Db(u, l, _) => (u, ArcLabel::Db, l),
                _ => continue,
            };
            arcs.push(Arc {
                src: rep[src].clone(),
                label,
                dst: rep[dst].clone(),
                witness: eq.clone(),
            });
        }
        arcs.sort();
        let mut g = PropagationGraph {
            rep,
            arcs,
            scc_bc: BTreeMap::new(),
            scc_db: BTreeMap::new(),
            scc_c: BTreeMap::new(),
        };
        g.scc_bc = g.directed_sccs(&[ArcLabel::Bc]);
        g.scc_db = g.directed_sccs(&[ArcLabel::Db]);
        g.scc_c = g.directed_sccs(&[ArcLabel::Bc, ArcLabel::Db]);
        g
    }

    /// Given the arc U → V with label bc: V >bc* U holds iff U and V
    /// share a bc-component (the arc closes the cycle).
    pub fn back_reaches_bc(&self, u: &Var, v: &Var) -> bool {
        let (u, v) = (self.class_of(u), self.class_of(v));
        u == v || self.scc_bc.get(&u) == self.scc_bc.get(&v)
    }

    /// Given the arc U → V with label db: V >db* U iff same db-component.
    pub fn back_reaches_db(&self, u: &Var, v: &Var) -> bool {
        let (u, v) = (self.class_of(u), self.class_of(v));
        u == v || self.scc_db.get(&u) == self.scc_db.get(&v)
    }

    /// Given a chaining arc U → V: V >c+ U iff same (bc ∪ db)-component.
    pub fn back_reaches_c(&self, u: &Var, v: &Var) -> bool {
        let (u, v) = (self.class_of(u), self.class_of(v));
        u == v || self.scc_c.get(&u) == self.scc_c.get(&v)
    }

    pub fn class_of(&self, v: &Var) -> Var {
        self.rep.get(v).cloned().unwrap_or_else(|| v.clone())
    }

    pub fn classes(&self) -> BTreeSet<Var> {
        self.rep.values().cloned().collect()
    }

    /// One line per arc: `[src] -label-> [dst] via <equation>`.
    pub fn dump(&self) -> String {
        let mut out = String::new();
        for a in &self.arcs {
            out.push_str(&format!(
                "[{}] -{}-> [{}] via {}\n",
                a.src, a.label, a.dst, a.witness
            ));
        }
        out
    }

    /// Reachability over the named arc subsets: reflexive-transitive
    /// for the star relations, transitive for CPlus, undirected
    /// reflexive-transitive for CSimStar.
    pub fn query(&self, kind: RelKind, from: &Var, to: &Var) -> bool {
        let from = self.class_of(from);
        let to = self.class_of(to);
        let (labels, directed, reflexive): (&[ArcLabel], bool, bool) = match kind {
            RelKind::BcStar => (&[ArcLabel::Bc], true, true),
            RelKind::DbStar => (&[ArcLabel::Db], true, true),
            RelKind::CPlus => (&[ArcLabel::Bc, ArcLabel::Db], true, false),
            RelKind::CSimStar => (&[ArcLabel::Bc, ArcLabel::Db], false, true),
        };
        if reflexive && from == to {
            return true;
        }
        let mut seen = BTreeSet::new();
        let mut queue = VecDeque::new();
        // seed with the one-step successors so CPlus needs >= 1 step
        for a in &self.arcs {
            if !labels.contains(&a.label) {
                continue;
            }
            if a.src == from && seen.insert(a.dst.clone()) {
                queue.push_back(a.dst.clone());
            }
            if !directed && a.dst == from && seen.insert(a.src.clone()) {
                queue.push_back(a.src.clone());
            }
        }
        while let Some(v) = queue.pop_front() {
            if v == to {
                return true;
            }
            for a in &self.arcs {
                if !labels.contains(&a.label) {
                    continue;
                }
                if a.src == v && seen.insert(a.dst.clone()) {
                    queue.push_back(a.dst.clone());
                }
                if !directed && a.dst == v && seen.insert(a.src.clone()) {
                    queue.push_back(a.src.clone());
                }
            }
        }
        seen.contains(&to)
    }

    /// Occur check under ≻l = ∼c* ∘ >cons ∘ (∼c ∪ >cons)*: a cycle in
    /// the mixed graph (chaining edges undirected, cons arcs directed)
    /// containing at least one cons arc. SCC scan, then the violating
    /// cycle is reconstructed for the report.
    pub fn occur_check_violation(&self) -> Option<OccurViolation> {
        let scc = self.sccs();
        // violating cons arcs: both endpoints in the same SCC
        let mut bad: Vec<&Arc> = self
            .arcs
            .iter()
            .filter(|a| a.label == ArcLabel::Cons && scc[&a.src] == scc[&a.dst])
            .collect();
        bad.sort();
        let cons = bad.first()?;
        // directed path dst -> src inside the mixed graph
        let path = self.mixed_path(&cons.dst, &cons.src)?;
        let mut cycle: Vec<(Var, ArcLabel, bool)> = Vec::new(); // (source endpoint, label, forward?)
        cycle.push((cons.src.clone(), ArcLabel::Cons, true));
        let mut at = cons.dst.clone();
        for (lbl, fwd, next) in path {
            cycle.push((at.clone(), lbl, fwd));
            at = next;
        }
        // rotate the cycle to start at its least class
        let n = cycle.len();
        let start = (0..n)
            .min_by_key(|&i| cycle[i].0.clone())
            .unwrap_or(0);
        cycle.rotate_left(start);
        let least = cycle[0].0.clone();
        let mut text = format!("{}", cycle[0].0);
        for i in 0..n {
            let (_, lbl, fwd) = &cycle[i];
            let nxt = if i + 1 < n { cycle[i + 1].0.clone() } else { cycle[0].0.clone() };
            let sym = if *fwd { ">" } else { "~" };
            text.push_str(&format!(" {sym}{lbl} {nxt}"));
        }
        Some(OccurViolation {
            class: least,
            cycle: text,
        })
    }

    /// BFS path in the mixed graph from `from` to `to`; chaining arcs
    /// may be traversed backwards. Returns the arc steps taken.
    fn mixed_path(&self, from: &Var, to: &Var) -> Option<Vec<(ArcLabel, bool, Var)>> {
        if from == to {
            return Some(Vec::new());
        }
        let mut prev: BTreeMap<Var, (Var, ArcLabel, bool)> = BTreeMap::new();
        let mut queue = VecDeque::new();
        queue.push_back(from.clone());
        while let Some(v) = queue.pop_front() {
            for a in &self.arcs {
                let mut steps: Vec<(Var, Var, ArcLabel, bool)> = Vec::new();
                if a.src == v {
                    steps.push((v.clone(), a.dst.clone(), a.label, true));
                }
                if a.dst == v && a.label != ArcLabel::Cons {
                    steps.push((v.clone(), a.src.clone(), a.label, false));
                }
                for (_, next, lbl, fwd) in steps {
                    if next != *from && !prev.contains_key(&next) {
                        prev.insert(next.clone(), (v.clone(), lbl, fwd));
                        if next == *to {
                            // reconstruct
                            let mut rev = Vec::new();
                            let mut at = to.clone();
                            while at != *from {
                                let (p, lbl, fwd) = prev[&at].clone();
                                rev.push((lbl, fwd, at.clone()));
                                at = p;
                            }
                            rev.reverse();
                            return Some(rev);
                        }
                        queue.push_back(next);
                    }
                }
            }
        }
        None
    }

    /// Strongly connected components of the mixed graph (cons arcs
    /// directed, bc/db arcs in both directions). Iterative Tarjan.
    fn sccs(&self) -> BTreeMap<Var, usize> {
        self.sccs_with(|a, succ, s, d| {
            succ[s].insert(d);
            if a.label != ArcLabel::Cons {
                succ[d].insert(s);
            }
        })
    }

    /// Components of the directed subgraph restricted to `labels`.
    fn directed_sccs(&self, labels: &[ArcLabel]) -> BTreeMap<Var, usize> {
        self.sccs_with(|a, succ, s, d| {
            if labels.contains(&a.label) {
                succ[s].insert(d);
            }
        })
    }

    fn sccs_with(
        &self,
        add_edges: impl Fn(&Arc, &mut Vec<BTreeSet<usize>>, usize, usize),
    ) -> BTreeMap<Var, usize> {
        let nodes: Vec<Var> = self.classes().into_iter().collect();
        let index_of: BTreeMap<Var, usize> =
            nodes.iter().cloned().enumerate().map(|(i, v)| (v, i)).collect();
        let n = nodes.len();
        let mut succ: Vec<BTreeSet<usize>> = vec![BTreeSet::new(); n];
        for a in &self.arcs {
            let s = index_of[&a.src];
            let d = index_of[&a.dst];
            add_edges(a, &mut succ, s, d);
        }
        let mut index = vec![usize::MAX; n];
        let mut low = vec![0usize; n];
        let mut on_stack = vec![false; n];
        let mut stack: Vec<usize> = Vec::new();
        let mut comp = vec![usize::MAX; n];
        let mut next_index = 0;
        let mut next_comp = 0;
        for root in 0..n {
            if index[root] != usize::MAX {
                continue;
            }
            // iterative DFS with explicit frames
            let mut frames: Vec<(usize, Vec<usize>, usize)> = Vec::new();
            let succs: Vec<usize> = succ[root].iter().cloned().collect();
            index[root] = next_index;
            low[root] = next_index;
            next_index += 1;
            stack.push(root);
            on_stack[root] = true;
            frames.push((root, succs, 0));
            while let Some((v, vsucc, mut i)) = frames.pop() {
                let mut descended = false;
                while i < vsucc.len() {
                    let w = vsucc[i];
                    i += 1;
                    if index[w] == usize::MAX {
                        index[w] = next_index;
                        low[w] = next_index;
                        next_index += 1;
                        stack.push(w);
                        on_stack[w] = true;
                        frames.push((v, vsucc.clone(), i));
                        let wsucc: Vec<usize> = succ[w].iter().cloned().collect();
                        frames.push((w, wsucc, 0));
                        descended = true;
                        break;
                    } else if on_stack[w] {
                        low[v] = low[v].min(index[w]);
                    }
                }
                if descended {
                    continue;
                }
                if low[v] == index[v] {
                    loop {
                        let w = stack.pop().unwrap();
                        on_stack[w] = false;
                        comp[w] = next_comp;
                        if w == v {
                            break;
                        }
                    }
                    next_comp += 1;
                }
                if let Some((p, _, _)) = frames.last() {
                    let p = *p;
                    low[p] = low[p].min(low[v]);
                }
            }
        }
        nodes
            .into_iter()
            .enumerate()
            .map(|(i, v)| (v, comp[i]))
            .collect()
    }
}

/// The least fixpoint of list-variable classes that cannot be nil:
/// cons-sources are in; across a bc or db arc, source and target stand
/// or fall together, so membership propagates in both directions.
pub fn nonnil(p: &Problem) -> BTreeSet<Var> {
    let g = PropagationGraph::build(p);
    nonnil_from_graph(&g)
}

pub fn nonnil_from_graph(g: &PropagationGraph) -> BTreeSet<Var> {
    let mut set: BTreeSet<Var> = g
        .arcs
        .iter()
        .filter(|a| a.label == ArcLabel::Cons)
        .map(|a| a.src.clone())
        .collect();
    // undirected adjacency over the chaining arcs
    let mut adj: BTreeMap<&Var, Vec<&Var>> = BTreeMap::new();
    for a in &g.arcs {
        if a.label == ArcLabel::Cons {
            continue;
        }
        adj.entry(&a.src).or_default().push(&a.dst);
        adj.entry(&a.dst).or_default().push(&a.src);
    }
    let seeds: Vec<Var> = set.iter().cloned().collect();
    let mut queue: VecDeque<Var> = seeds.into();
    while let Some(v) = queue.pop_front() {
        if let Some(ns) = adj.get(&v) {
            for n in ns {
                if set.insert((*n).clone()) {
                    queue.push_back((*n).clone());
                }
            }
        }
    }
    set
}

/// True if the class of `v` is in nonnil.
pub fn in_nonnil(set: &BTreeSet<Var>, g: &PropagationGraph, v: &Var) -> bool {
    set.contains(&g.class_of(v))
}
