//! Proof-script serialization: one s-expression tree per `.hfp` file.
//!
//! ```text
//! node := (hyp FM) | (extra) | (bool KIND FM...) | (eq KIND) | (hf 1|2)
//!       | (spec FM NAME TM) | (ind FM NAME NAME)
//!       | (mp node node) | (exists NAME node)
//!       | (ded FM node) | (subst NAME TM node)
//! FM   := (fm "formula text")      TM := (tm "term text")
//! NAME := (name xN)                KIND := Ident | DisjI1 | ... | Refl | ...
//! ```
//!
//! `ded` and `subst` are macro tags: replay expands them through the
//! deduction theorem and theorem substitution.

use super::kernel::{BoolAxiom, EqAxiom, HfAxiom, ProofTree};
use crate::syntax::{text, Formula, Name, Term};
use std::fmt;
use std::sync::Arc;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ScriptError {
    pub at: usize,
    pub message: String,
}

impl fmt::Display for ScriptError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "script error at byte {}: {}", self.at, self.message)
    }
}

impl std::error::Error for ScriptError {}

#[derive(Debug, Clone)]
enum Sexp {
    Atom(usize, String),
    Str(usize, String),
    List(usize, Vec<Sexp>),
}

impl Sexp {
    fn at(&self) -> usize {
        match self {
            Sexp::Atom(p, _) | Sexp::Str(p, _) | Sexp::List(p, _) => *p,
        }
    }
}

fn err(at: usize, message: impl Into<String>) -> ScriptError {
    ScriptError {
        at,
        message: message.into(),
    }
}

fn lex_sexp(src: &str, pos: &mut usize) -> Result<Sexp, ScriptError> {
    let b = src.as_bytes();
    let skip = |pos: &mut usize| {
        while *pos < b.len() {
            let c = b[*pos] as char;
            if c.is_whitespace() {
                *pos += 1;
            } else if c == ';' {
                while *pos < b.len() && b[*pos] != b'\n' {
                    *pos += 1;
                }
            } else {
                break;
            }
        }
    };
    skip(pos);
    let start = *pos;
    if *pos >= b.len() {
        return Err(err(start, "unexpected end of input"));
    }
    match b[*pos] as char {
        '(' => {
            *pos += 1;
            let mut items = Vec::new();
            loop {
                skip(pos);
                if *pos >= b.len() {
                    return Err(err(start, "unclosed parenthesis"));
                }
                if b[*pos] == b')' {
                    *pos += 1;
                    return Ok(Sexp::List(start, items));
                }
                items.push(lex_sexp(src, pos)?);
            }
        }
        '"' => {
            *pos += 1;
            let s = *pos;
            while *pos < b.len() && b[*pos] != b'"' {
                *pos += 1;
            }
            if *pos >= b.len() {
                return Err(err(start, "unclosed string"));
            }
            let text = src[s..*pos].to_string();
            *pos += 1;
            Ok(Sexp::Str(start, text))
        }
        ')' => Err(err(start, "unexpected `)`")),
        _ => {
            let s = *pos;
            while *pos < b.len()
                && !(b[*pos] as char).is_whitespace()
                && b[*pos] != b'('
                && b[*pos] != b')'
            {
                *pos += 1;
            }
            Ok(Sexp::Atom(start, src[s..*pos].to_string()))
        }
    }
}

fn tagged<'a>(e: &'a Sexp, tag: &str) -> Option<&'a [Sexp]> {
    if let Sexp::List(_, items) = e {
        if let Some(Sexp::Atom(_, head)) = items.first() {
            if head == tag {
                return Some(&items[1..]);
            }
        }
    }
    None
}

fn parse_fm(e: &Sexp) -> Result<Formula, ScriptError> {
    let items = tagged(e, "fm").ok_or_else(|| err(e.at(), "expected (fm \"...\")"))?;
    match items {
        [Sexp::Str(_, s)] => text::parse_formula(s).map_err(|p| err(e.at(), p.to_string())),
        _ => Err(err(e.at(), "expected one quoted formula")),
    }
}

fn parse_tm(e: &Sexp) -> Result<Term, ScriptError> {
    let items = tagged(e, "tm").ok_or_else(|| err(e.at(), "expected (tm \"...\")"))?;
    match items {
        [Sexp::Str(_, s)] => text::parse_term(s).map_err(|p| err(e.at(), p.to_string())),
        _ => Err(err(e.at(), "expected one quoted term")),
    }
}

fn parse_name(e: &Sexp) -> Result<Name, ScriptError> {
    let items = tagged(e, "name").ok_or_else(|| err(e.at(), "expected (name xN)"))?;
    match items {
        [Sexp::Atom(at, s)] => {
            let rest = s
                .strip_prefix('x')
                .ok_or_else(|| err(*at, "names look like xN"))?;
            rest.parse::<u32>()
                .map(Name)
                .map_err(|_| err(*at, "names look like xN"))
        }
        _ => Err(err(e.at(), "expected one identifier")),
    }
}

fn parse_node(e: &Sexp) -> Result<Arc<ProofTree>, ScriptError> {
    let Sexp::List(at, items) = e else {
        return Err(err(e.at(), "expected a proof node"));
    };
    let Some(Sexp::Atom(_, tag)) = items.first() else {
        return Err(err(*at, "expected a rule tag"));
    };
    let rest = &items[1..];
    let node = match tag.as_str() {
        "hyp" => match rest {
            [f] => ProofTree::Hyp(parse_fm(f)?),
            _ => return Err(err(*at, "hyp takes one formula")),
        },
        "extra" => match rest {
            [] => ProofTree::Extra,
            _ => return Err(err(*at, "extra takes no arguments")),
        },
        "bool" => {
            let Some(Sexp::Atom(kat, kind)) = rest.first() else {
                return Err(err(*at, "bool needs an axiom kind"));
            };
            let kind = match kind.as_str() {
                "Ident" => BoolAxiom::Ident,
                "DisjI1" => BoolAxiom::DisjI1,
                "DisjCont" => BoolAxiom::DisjCont,
                "DisjAssoc" => BoolAxiom::DisjAssoc,
                "DisjConj" => BoolAxiom::DisjConj,
                other => return Err(err(*kat, format!("unknown boolean axiom {other}"))),
            };
            let args = rest[1..]
                .iter()
                .map(parse_fm)
                .collect::<Result<Vec<_>, _>>()?;
            ProofTree::Bool(kind, args)
        }
        "eq" => match rest {
            [Sexp::Atom(kat, kind)] => {
                let kind = match kind.as_str() {
                    "Refl" => EqAxiom::Refl,
                    "EqSubst" => EqAxiom::EqSubst,
                    "MemSubst" => EqAxiom::MemSubst,
                    "EatsSubst" => EqAxiom::EatsSubst,
                    other => return Err(err(*kat, format!("unknown equality axiom {other}"))),
                };
                ProofTree::EqAx(kind)
            }
            _ => return Err(err(*at, "eq takes one axiom kind")),
        },
        "hf" => match rest {
            [Sexp::Atom(kat, which)] => match which.as_str() {
                "1" => ProofTree::HfAx(HfAxiom::Hf1),
                "2" => ProofTree::HfAx(HfAxiom::Hf2),
                _ => return Err(err(*kat, "hf takes 1 or 2")),
            },
            _ => return Err(err(*at, "hf takes 1 or 2")),
        },
        "spec" => match rest {
            [f, n, t] => ProofTree::Spec {
                a: parse_fm(f)?,
                i: parse_name(n)?,
                x: parse_tm(t)?,
            },
            _ => return Err(err(*at, "spec takes formula, name, term")),
        },
        "ind" => match rest {
            [f, n, m] => ProofTree::Ind {
                a: parse_fm(f)?,
                i: parse_name(n)?,
                j: parse_name(m)?,
            },
            _ => return Err(err(*at, "ind takes formula, name, name")),
        },
        "mp" => match rest {
            [l, r] => ProofTree::Mp(parse_node(l)?, parse_node(r)?),
            _ => return Err(err(*at, "mp takes two children")),
        },
        "exists" => match rest {
            [n, c] => ProofTree::Exists {
                prem: parse_node(c)?,
                i: parse_name(n)?,
            },
            _ => return Err(err(*at, "exists takes a name and a child")),
        },
        "ded" => match rest {
            [f, c] => ProofTree::Deduction {
                prem: parse_node(c)?,
                c: parse_fm(f)?,
            },
            _ => return Err(err(*at, "ded takes a formula and a child")),
        },
        "subst" => match rest {
            [n, t, c] => ProofTree::Subst {
                prem: parse_node(c)?,
                i: parse_name(n)?,
                x: parse_tm(t)?,
            },
            _ => return Err(err(*at, "subst takes name, term, child")),
        },
        other => return Err(err(*at, format!("unknown rule tag {other}"))),
    };
    Ok(Arc::new(node))
}

/// Parses one proof tree from `.hfp` text.
pub fn parse_script(src: &str) -> Result<Arc<ProofTree>, ScriptError> {
    let mut pos = 0usize;
    let sexp = lex_sexp(src, &mut pos)?;
    // allow trailing whitespace/comments
    let b = src.as_bytes();
    while pos < b.len() {
        let c = b[pos] as char;
        if c.is_whitespace() {
            pos += 1;
        } else if c == ';' {
            while pos < b.len() && b[pos] != b'\n' {
                pos += 1;
            }
        } else {
            return Err(err(pos, "trailing input after proof"));
        }
    }
    parse_node(&sexp)
}

fn fm_str(f: &Formula) -> String {
    format!("(fm \"{}\")", text::print_formula(f, false))
}

fn tm_str(t: &Term) -> String {
    format!("(tm \"{}\")", text::print_term(t))
}

fn node_into(p: &ProofTree, out: &mut String) {
    match p {
        ProofTree::Hyp(a) => {
            out.push_str("(hyp ");
            out.push_str(&fm_str(a));
            out.push(')');
        }
        ProofTree::Extra => out.push_str("(extra)"),
        ProofTree::Bool(kind, args) => {
            out.push_str("(bool ");
            out.push_str(kind.name());
            for a in args {
                out.push(' ');
                out.push_str(&fm_str(a));
            }
            out.push(')');
        }
        ProofTree::EqAx(kind) => {
            out.push_str("(eq ");
            out.push_str(kind.name());
            out.push(')');
        }
        ProofTree::HfAx(kind) => {
            out.push_str(match kind {
                HfAxiom::Hf1 => "(hf 1)",
                HfAxiom::Hf2 => "(hf 2)",
            });
        }
        ProofTree::Spec { a, i, x } => {
            out.push_str("(spec ");
            out.push_str(&fm_str(a));
            out.push_str(&format!(" (name {i}) "));
            out.push_str(&tm_str(x));
            out.push(')');
        }
        ProofTree::Ind { a, i, j } => {
            out.push_str("(ind ");
            out.push_str(&fm_str(a));
            out.push_str(&format!(" (name {i}) (name {j}))"));
        }
        ProofTree::Mp(l, r) => {
            out.push_str("(mp ");
            node_into(l, out);
            out.push(' ');
            node_into(r, out);
            out.push(')');
        }
        ProofTree::Exists { prem, i } => {
            out.push_str(&format!("(exists (name {i}) "));
            node_into(prem, out);
            out.push(')');
        }
        ProofTree::Deduction { prem, c } => {
            out.push_str("(ded ");
            out.push_str(&fm_str(c));
            out.push(' ');
            node_into(prem, out);
            out.push(')');
        }
        ProofTree::Subst { prem, i, x } => {
            out.push_str(&format!("(subst (name {i}) "));
            out.push_str(&tm_str(x));
            out.push(' ');
            node_into(prem, out);
            out.push(')');
        }
    }
}

/// Prints a proof tree in the `.hfp` format.
pub fn print_script(p: &ProofTree) -> String {
    let mut out = String::new();
    node_into(p, &mut out);
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::calculus::check_proof;
    use crate::syntax::fls;

    #[test]
    fn parse_and_check_ident_script() {
        let src = r#"(mp (bool Ident (fm "FLS")) (hyp (fm "FLS")))"#;
        let tree = parse_script(src).unwrap();
        let t = check_proof(&tree).unwrap();
        assert_eq!(*t.concl(), fls());
        assert_eq!(t.hyps().len(), 1);
    }

    #[test]
    fn script_round_trip() {
        let src = r#"(ded (fm "FLS") (mp (bool Ident (fm "FLS")) (hyp (fm "FLS"))))"#;
        let tree = parse_script(src).unwrap();
        let printed = print_script(&tree);
        let reparsed = parse_script(&printed).unwrap();
        let t1 = check_proof(&tree).unwrap();
        let t2 = check_proof(&reparsed).unwrap();
        assert_eq!(t1.concl(), t2.concl());
        assert!(t1.hyps().is_empty());
    }

    #[test]
    fn bad_scripts_report_position() {
        assert!(parse_script("(mp (bool Ident))").is_err());
        assert!(parse_script("(frob)").is_err());
        assert!(parse_script("(hyp (fm \"NOT A FORMULA\"))").is_err());
    }
}
