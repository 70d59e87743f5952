//! Concrete syntax: `problem <theory> { (constants …; | term =? term;)* }`
//! with `[t1, …, tn]` list sugar and infix `^` for xor. Uppercase
//! initials name list variables, lowercase initials element variables,
//! and declared names are element constants regardless of case.

use crate::equation::Problem;
use crate::errors::{Result, SolverError};
use crate::standardize::to_standard_form;
use crate::term::{Sort, Term, Var};
use crate::theory::TheoryId;
use std::collections::BTreeSet;

#[derive(Debug, Clone, PartialEq, Eq)]
enum Tok {
    Ident(String),
    LParen,
    RParen,
    LBracket,
    RBracket,
    LBrace,
    RBrace,
    Comma,
    Semi,
    Caret,
    EqQ,
    Eof,
}

#[derive(Debug, Clone)]
struct Lexed {
    tok: Tok,
    line: usize,
    col: usize,
}

fn lex(text: &str) -> Result<Vec<Lexed>> {
    let mut out = Vec::new();
    let mut line = 1;
    let mut col = 1;
    let bytes: Vec<char> = text.chars().collect();
    let mut i = 0;
    let err = |line, col, msg: String| SolverError::Syntax { line, col, msg };
    while i < bytes.len() {
        let c = bytes[i];
        let (tline, tcol) = (line, col);
        let mut push = |tok: Tok| {
            out.push(Lexed {
                tok,
                line: tline,
                col: tcol,
            })
        };
        match c {
            '\n' => {
                line += 1;
                col = 1;
                i += 1;
                continue;
            }
            ' ' | '\t' | '\r' => {}
            '/' if i + 1 < bytes.len() && bytes[i + 1] == '/' => {
                while i < bytes.len() && bytes[i] != '\n' {
                    i += 1;
                }
                continue;
            }
            '(' => push(Tok::LParen),
            ')' => push(Tok::RParen),
            '[' => push(Tok::LBracket),
            ']' => push(Tok::RBracket),
            '{' => push(Tok::LBrace),
            '}' => push(Tok::RBrace),
            ',' => push(Tok::Comma),
            ';' => push(Tok::Semi),
            '^' => push(Tok::Caret),
            '=' => {
                if i + 1 < bytes.len() && bytes[i + 1] == '?' {
                    push(Tok::EqQ);
                    i += 1;
                    col += 1;
                } else {
                    return Err(err(line, col, "expected `=?`".into()));
                }
            }
            c if c.is_alphanumeric() || c == '_' => {
                let start = i;
                while i < bytes.len()
                    && (bytes[i].is_alphanumeric()
                        || bytes[i] == '_'
                        || bytes[i] == '\''
                        || bytes[i] == '#')
                {
                    i += 1;
                    col += 1;
                }
                out.push(Lexed {
                    tok: Tok::Ident(bytes[start..i].iter().collect()),
                    line: tline,
                    col: tcol,
                });
                continue;
            }
            other => {
                return Err(err(line, col, format!("unexpected character `{other}`")));
            }
        }
        i += 1;
        col += 1;
    }
    out.push(Lexed {
        tok: Tok::Eof,
        line,
        col,
    });
    Ok(out)
}

struct Parser {
    toks: Vec<Lexed>,
    pos: usize,
    constants: BTreeSet<String>,
}

const KEYWORDS: &[&str] = &[
    "problem", "constants", "nil", "bc", "db", "cons", "h", "g", "enc", "car", "cdr",
];

impl Parser {
    fn peek(&self) -> &Lexed {
        &self.toks[self.pos]
    }

    fn next(&mut self) -> Lexed {
        let t = self.toks[self.pos].clone();
        if self.pos + 1 < self.toks.len() {
            self.pos += 1;
        }
        t
    }

    fn error(&self, msg: impl Into<String>) -> SolverError {
        let at = self.peek();
        SolverError::Syntax {
            line: at.line,
            col: at.col,
            msg: msg.into(),
        }
    }

    fn expect(&mut self, tok: Tok, what: &str) -> Result<()> {
        if self.peek().tok == tok {
            self.next();
            Ok(())
        } else {
            Err(self.error(format!("expected {what}")))
        }
    }

    fn ident(&mut self, what: &str) -> Result<String> {
        match self.peek().tok.clone() {
            Tok::Ident(s) => {
                self.next();
                Ok(s)
            }
            _ => Err(self.error(format!("expected {what}"))),
        }
    }

    fn make_var_or_const(&self, name: &str) -> Result<Term> {
        if self.constants.contains(name) || name.chars().next().is_some_and(|c| c.is_ascii_digit())
        {
            return Ok(Term::constant(name));
        }
        let first = name
            .chars()
            .next()
            .expect("lexer never yields empty idents");
        let sort = if first.is_uppercase() {
            Sort::List
        } else {
            Sort::Element
        };
        // split a generated-name suffix `#n` back into (base, index)
        let (base, index) = match name.split_once('#') {
            Some((b, n)) => {
                let idx = n.parse::<u32>().map_err(|_| {
                    self.error(format!("bad generated-variable suffix in `{name}`"))
                })?;
                (b.to_string(), Some(idx))
            }
            None => (name.to_string(), None),
        };
        Ok(Term::Var(Var {
            base,
            index,
            sort,
        }))
    }

    fn term(&mut self) -> Result<Term> {
        let first = self.primary()?;
        if self.peek().tok != Tok::Caret {
            return Ok(first);
        }
        let mut args = vec![first];
        while self.peek().tok == Tok::Caret {
            self.next();
            args.push(self.primary()?);
        }
        for a in &args {
            if a.sort() != Sort::Element {
                return Err(self.error("xor arguments must be element-sorted"));
            }
        }
        Ok(Term::xor(args))
    }

    fn primary(&mut self) -> Result<Term> {
        match self.peek().tok.clone() {
            Tok::LParen => {
                self.next();
                let t = self.term()?;
                self.expect(Tok::RParen, "`)`")?;
                Ok(t)
            }
            Tok::LBracket => {
                self.next();
                let mut items = Vec::new();
                if self.peek().tok != Tok::RBracket {
                    loop {
                        items.push(self.term()?);
                        if self.peek().tok == Tok::Comma {
                            self.next();
                        } else {
                            break;
                        }
                    }
                }
                self.expect(Tok::RBracket, "`]`")?;
                for it in &items {
                    if it.sort() != Sort::Element {
                        return Err(self.error("list elements must be element-sorted"));
                    }
                }
                Ok(Term::list(items))
            }
            Tok::Ident(name) => {
                self.next();
                match name.as_str() {
                    "nil" => Ok(Term::Nil),
                    "bc" | "db" | "cons" | "h" | "g" => {
                        self.expect(Tok::LParen, "`(`")?;
                        let a = self.term()?;
                        self.expect(Tok::Comma, "`,`")?;
                        let b = self.term()?;
                        self.expect(Tok::RParen, "`)`")?;
                        let t = match name.as_str() {
                            "bc" => Term::bc(a, b),
                            "db" => Term::db(a, b),
                            "cons" => Term::cons(a, b),
                            "h" => Term::h(a, b),
                            _ => Term::g(a, b),
                        };
                        if !t.well_typed() {
                            return Err(self.error(format!("ill-sorted arguments to `{name}`")));
                        }
                        Ok(t)
                    }
                    "enc" | "car" | "cdr" => {
                        self.expect(Tok::LParen, "`(`")?;
                        let a = self.term()?;
                        self.expect(Tok::RParen, "`)`")?;
                        let t = match name.as_str() {
                            "enc" => Term::enc(a),
                            "car" => Term::car(a),
                            _ => Term::cdr(a),
                        };
                        if !t.well_typed() {
                            return Err(self.error(format!("ill-sorted argument to `{name}`")));
                        }
                        Ok(t)
                    }
                    "problem" | "constants" => {
                        Err(self.error(format!("keyword `{name}` cannot be used as a term")))
                    }
                    _ => self.make_var_or_const(&name),
                }
            }
            _ => Err(self.error("expected a term")),
        }
    }
}

/// Parses a problem file and converts it to standard form.
pub fn parse_problem(text: &str) -> Result<Problem> {
    let toks = lex(text)?;
    let mut p = Parser {
        toks,
        pos: 0,
        constants: BTreeSet::new(),
    };
    p.expect(Tok::Ident("problem".into()), "`problem`")
        .map_err(|_| p.error("expected `problem <theory> { … }`"))?;
    let theory_name = p.ident("a theory name")?;
    let theory = TheoryId::parse(&theory_name)
        .ok_or_else(|| p.error(format!("unknown theory `{theory_name}`")))?;
    p.expect(Tok::LBrace, "`{`")?;
    let mut raw: Vec<(Term, Term)> = Vec::new();
    loop {
        match p.peek().tok.clone() {
            Tok::RBrace => {
                p.next();
                break;
            }
            Tok::Ident(s) if s == "constants" => {
                p.next();
                loop {
                    let name = p.ident("a constant name")?;
                    if KEYWORDS.contains(&name.as_str()) {
                        return Err(p.error(format!("`{name}` cannot be a constant")));
                    }
                    p.constants.insert(name);
                    if p.peek().tok == Tok::Comma {
                        p.next();
                    } else {
                        break;
                    }
                }
                p.expect(Tok::Semi, "`;`")?;
            }
            Tok::Eof => return Err(p.error("unexpected end of file, expected `}`")),
            _ => {
                let l = p.term()?;
                p.expect(Tok::EqQ, "`=?`")?;
                let r = p.term()?;
                p.expect(Tok::Semi, "`;`")?;
                if l.sort() != r.sort() {
                    return Err(SolverError::sort_mismatch(
                        "equation sides have different sorts",
                        l.sort(),
                        r.sort(),
                    ));
                }
                raw.push((l, r));
            }
        }
    }
    if p.peek().tok != Tok::Eof {
        return Err(p.error("trailing input after `}`"));
    }
    let constants = p.constants.clone();
    to_standard_form(raw, theory, constants)
}

/// Parses a single term (the `normalize` input format). Declared
/// constants may be passed in; everything else follows the case
/// convention.
pub fn parse_term(text: &str, constants: &BTreeSet<String>) -> Result<Term> {
    let toks = lex(text)?;
    let mut p = Parser {
        toks,
        pos: 0,
        constants: constants.clone(),
    };
    let t = p.term()?;
    if p.peek().tok != Tok::Eof {
        return Err(p.error("trailing input after term"));
    }
    Ok(t)
}
