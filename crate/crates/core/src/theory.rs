//! Theory identifiers and per-theory signature restrictions.

use crate::term::Term;
use std::fmt;

/// The equational theories handled by the normalizer and the solvers.
///
/// BC0 and BC1 share the two bc axioms; BC1 additionally interprets
/// h(x,y) as enc(x ⊕ y) and adds the xor axioms (AC, x⊕x = 0, x⊕0 = x).
/// Dbc is the six-equation system, DbcPrime its first five rules, and
/// DbcPlus adds the two car/cdr projection rules (normalization only).
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum TheoryId {
    Bc0,
    Bc1,
    Dbc,
    DbcPrime,
    DbcPlus,
}

impl TheoryId {
    pub fn name(&self) -> &'static str {
        match self {
            TheoryId::Bc0 => "bc0",
            TheoryId::Bc1 => "bc1",
            TheoryId::Dbc => "dbc",
            TheoryId::DbcPrime => "dbc_prime",
            TheoryId::DbcPlus => "dbc_plus",
        }
    }

    pub fn parse(name: &str) -> Option<TheoryId> {
        match name {
            "bc0" => Some(TheoryId::Bc0),
            "bc1" => Some(TheoryId::Bc1),
            "dbc" => Some(TheoryId::Dbc),
            "dbc_prime" | "dbc'" => Some(TheoryId::DbcPrime),
            "dbc_plus" | "dbc+" => Some(TheoryId::DbcPlus),
            _ => None,
        }
    }

    pub fn has_db(&self) -> bool {
        matches!(self, TheoryId::Dbc | TheoryId::DbcPrime | TheoryId::DbcPlus)
    }

    pub fn has_xor(&self) -> bool {
        matches!(self, TheoryId::Bc1)
    }

    pub fn has_projections(&self) -> bool {
        matches!(self, TheoryId::DbcPlus)
    }

    /// The first symbol of `t` (or of a subterm) that this theory's
    /// signature does not admit, if any. The paper's BC1 has no g; db/g
    /// belong to the DBC family; car/cdr only to the enlarged variant.
    pub fn signature_violation(&self, t: &Term) -> Option<&'static str> {
        let forbidden = match t {
            Term::Db(..) if !self.has_db() => Some("db"),
            Term::G(..) if !self.has_db() => Some("g"),
            Term::Xor(_) if !self.has_xor() => Some("^"),
            Term::Enc(_) if !self.has_xor() => Some("enc"),
            Term::Car(_) if !self.has_projections() => Some("car"),
            Term::Cdr(_) if !self.has_projections() => Some("cdr"),
            _ => None,
        };
        if forbidden.is_some() {
            return forbidden;
        }
        match t {
            Term::Var(_) | Term::Const(_) | Term::Nil => None,
            Term::Cons(a, b)
            | Term::Bc(a, b)
            | Term::Db(a, b)
            | Term::H(a, b)
            | Term::G(a, b) => self
                .signature_violation(a)
                .or_else(|| self.signature_violation(b)),
            Term::Enc(a) | Term::Car(a) | Term::Cdr(a) => self.signature_violation(a),
            Term::Xor(args) => args.iter().find_map(|a| self.signature_violation(a)),
        }
    }
}

impl fmt::Display for TheoryId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.name())
    }
}
