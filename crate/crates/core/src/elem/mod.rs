//! Back-end solvers for the residual element-equations of each theory:
//! syntactic unification (BC0), unification modulo xor with the free
//! enc symbol (BC1), and collapse-narrowing for g(h(x,y),y) = x (DBC).

mod bc0;
mod bc1;
mod dbc;

pub use bc0::solve_bc0;
pub use bc1::solve_bc1;
pub use dbc::solve_dbc;

use crate::equation::Equation;
use crate::errors::{Result, SolverError};
use crate::term::{FreshSupply, Subst};
use crate::theory::TheoryId;
use std::fmt;

/// Why an element problem (or one of its branches) has no solution.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ElemFail {
    OccurCheck { var: String },
    Clash { detail: String },
    NoBranch,
}

impl fmt::Display for ElemFail {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ElemFail::OccurCheck { var } => write!(f, "occur-check failure on {var}"),
            ElemFail::Clash { detail } => write!(f, "clash: {detail}"),
            ElemFail::NoBranch => write!(f, "no branch survives"),
        }
    }
}

/// Solves an element residue under the given theory. Returns the
/// finite complete set of most general unifiers (unitary for BC0), or
/// the failure cause when unsatisfiable. `first_only` stops at the
/// first unifier, for decision-mode runs.
pub fn solve_elements(
    residue: &[Equation],
    th: TheoryId,
    supply: &mut FreshSupply,
    first_only: bool,
    branch_cap: usize,
) -> Result<std::result::Result<Vec<Subst>, ElemFail>> {
    match th {
        TheoryId::Bc0 => Ok(match solve_bc0(residue) {
            Ok(s) => Ok(vec![s]),
            Err(f) => Err(f),
        }),
        TheoryId::Bc1 => solve_bc1(residue, supply, first_only),
        TheoryId::Dbc | TheoryId::DbcPrime => solve_dbc(residue, first_only, branch_cap),
        TheoryId::DbcPlus => Err(SolverError::Signature {
            symbol: "car/cdr projections".into(),
            theory: "element solving".into(),
        }),
    }
}
