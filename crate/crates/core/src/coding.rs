//! Gödel coding of de Bruijn syntax into HF values and terms.
//!
//! Variables are coded by positive ordinals, the constant 0 by 0, and each
//! connective by a distinct tuple of zeros; a coded node is the pair of its
//! tag and its payload. Quotations are canonical ground terms denoting the
//! code value. Shadow predicates mirror the coded-syntax predicates as
//! executable checks on HF values: builders produce sequence witnesses in
//! postorder, and verifiers check a witness purely at the set level, without
//! reconstructing any syntax.

use crate::hf_core::{HfSet, SeqView};
#[cfg(test)]
use crate::semantics::{eval_tm, Env};
use crate::sigma::hfset_to_term;
use crate::syntax::{
    trans_fm, trans_tm, DbFormula, DbFormulaKind, DbTerm, DbTermKind, Formula, Name, Term,
};
use std::collections::HashMap;
use std::fmt;
use std::sync::OnceLock;

// ---------------------------------------------------------------------------
// Tags and value-level constructors
// ---------------------------------------------------------------------------

/// The connective tags, read off the coding table: each is a tuple of zeros.
#[derive(Copy, Clone, Debug, PartialEq, Eq)]
pub enum CodeTag {
    Mem,
    Eats,
    Eq,
    Disj,
    Neg,
    Ex,
    Ind,
}

impl CodeTag {
    pub fn index(self) -> usize {
        match self {
            CodeTag::Mem => 0,
            CodeTag::Eats => 1,
            CodeTag::Eq => 2,
            CodeTag::Disj => 3,
            CodeTag::Neg => 4,
            CodeTag::Ex => 5,
            CodeTag::Ind => 6,
        }
    }

    pub fn value(self) -> HfSet {
        static TAGS: OnceLock<[HfSet; 7]> = OnceLock::new();
        let tags = TAGS.get_or_init(|| {
            [
                HfSet::htuple(0),
                HfSet::htuple(1),
                HfSet::htuple(2),
                HfSet::htuple(3),
                HfSet::htuple(4),
                HfSet::htuple(5),
                HfSet::htuple(6),
            ]
        });
        tags[self.index()].clone()
    }

    pub fn from_value(x: &HfSet) -> Option<CodeTag> {
        use CodeTag::*;
        for tag in [Mem, Eats, Eq, Disj, Neg, Ex, Ind] {
            if tag.value() == *x {
                return Some(tag);
            }
        }
        None
    }
}

/// ⌜Var name⌝ as a value: the ordinal nat_of_name + 1.
pub fn q_var(n: Name) -> HfSet {
    HfSet::ord_of(n.nat_of_name() as usize + 1)
}

/// Inverse of [`q_var`].
pub fn var_of_code(x: &HfSet) -> Option<Name> {
    match x.as_ord() {
        Ok(n) if n >= 1 => Some(Name((n - 1) as u32)),
        _ => None,
    }
}

pub fn is_var_code(x: &HfSet) -> bool {
    var_of_code(x).is_some()
}

pub fn q_ind(k: usize) -> HfSet {
    HfSet::hpair(&CodeTag::Ind.value(), &HfSet::ord_of(k))
}

fn tagged2(tag: CodeTag, x: &HfSet, y: &HfSet) -> HfSet {
    HfSet::hpair(&tag.value(), &HfSet::hpair(x, y))
}

pub fn q_eats(x: &HfSet, y: &HfSet) -> HfSet {
    tagged2(CodeTag::Eats, x, y)
}

pub fn q_mem(x: &HfSet, y: &HfSet) -> HfSet {
    tagged2(CodeTag::Mem, x, y)
}

pub fn q_eq(x: &HfSet, y: &HfSet) -> HfSet {
    tagged2(CodeTag::Eq, x, y)
}

pub fn q_disj(x: &HfSet, y: &HfSet) -> HfSet {
    tagged2(CodeTag::Disj, x, y)
}

pub fn q_neg(x: &HfSet) -> HfSet {
    HfSet::hpair(&CodeTag::Neg.value(), x)
}

pub fn q_ex(x: &HfSet) -> HfSet {
    HfSet::hpair(&CodeTag::Ex.value(), x)
}

/// ⌜A IMP B⌝ as a value.
pub fn q_imp(x: &HfSet, y: &HfSet) -> HfSet {
    q_disj(&q_neg(x), y)
}

// ---------------------------------------------------------------------------
// Term-level code constructors, for formulas that speak about codes
// ---------------------------------------------------------------------------

/// The ground term denoting a connective tag.
pub fn tag_term(tag: CodeTag) -> Term {
    hfset_to_term(&tag.value())
}

pub fn q_eats_term(a: Term, b: Term) -> Term {
    Term::hpair(tag_term(CodeTag::Eats), Term::hpair(a, b))
}

pub fn q_mem_term(a: Term, b: Term) -> Term {
    Term::hpair(tag_term(CodeTag::Mem), Term::hpair(a, b))
}

pub fn q_eq_term(a: Term, b: Term) -> Term {
    Term::hpair(tag_term(CodeTag::Eq), Term::hpair(a, b))
}

pub fn q_disj_term(a: Term, b: Term) -> Term {
    Term::hpair(tag_term(CodeTag::Disj), Term::hpair(a, b))
}

pub fn q_neg_term(a: Term) -> Term {
    Term::hpair(tag_term(CodeTag::Neg), a)
}

pub fn q_ex_term(a: Term) -> Term {
    Term::hpair(tag_term(CodeTag::Ex), a)
}

pub fn q_imp_term(a: Term, b: Term) -> Term {
    q_disj_term(q_neg_term(a), b)
}

pub fn q_ind_term(i: Term) -> Term {
    Term::hpair(tag_term(CodeTag::Ind), i)
}

// ---------------------------------------------------------------------------
// Codes of syntax
// ---------------------------------------------------------------------------

/// Shared state for the coding functions; memoizes by node identity so the
/// big shared syntax DAGs are coded linearly. Memo entries own their keyed
/// nodes, keeping the addresses valid, and translations share one
/// [`Translator`] so repeated inputs reuse de Bruijn structure.
#[derive(Default)]
pub struct Coder {
    translator: crate::syntax::Translator,
    tm: HashMap<usize, (DbTerm, HfSet)>,
    fm: HashMap<usize, (DbFormula, HfSet)>,
    terms: HashMap<HfSet, Term>,
}

impl Coder {
    pub fn new() -> Coder {
        Coder::default()
    }

    pub fn code_of_dbtm(&mut self, t: &DbTerm) -> HfSet {
        if let Some((_, v)) = self.tm.get(&t.ptr_id()) {
            return v.clone();
        }
        let v = match t.kind() {
            DbTermKind::DbZero => HfSet::empty(),
            DbTermKind::DbVar(n) => q_var(*n),
            DbTermKind::DbInd(k) => q_ind(*k as usize),
            DbTermKind::DbEats(a, b) => {
                let ca = self.code_of_dbtm(a);
                let cb = self.code_of_dbtm(b);
                q_eats(&ca, &cb)
            }
        };
        self.tm.insert(t.ptr_id(), (t.clone(), v.clone()));
        v
    }

    pub fn code_of_dbfm(&mut self, a: &DbFormula) -> HfSet {
        if let Some((_, v)) = self.fm.get(&a.ptr_id()) {
            return v.clone();
        }
        let v = match a.kind() {
            DbFormulaKind::DbMem(t, u) => q_mem(&self.code_of_dbtm(t), &self.code_of_dbtm(u)),
            DbFormulaKind::DbEq(t, u) => q_eq(&self.code_of_dbtm(t), &self.code_of_dbtm(u)),
            DbFormulaKind::DbDisj(x, y) => q_disj(&self.code_of_dbfm(x), &self.code_of_dbfm(y)),
            DbFormulaKind::DbNeg(x) => q_neg(&self.code_of_dbfm(x)),
            DbFormulaKind::DbEx(x) => q_ex(&self.code_of_dbfm(x)),
        };
        self.fm.insert(a.ptr_id(), (a.clone(), v.clone()));
        v
    }

    pub fn code_of_tm(&mut self, t: &Term) -> HfSet {
        let db = self.translator.trans_tm(&mut Vec::new(), t);
        self.code_of_dbtm(&db)
    }

    pub fn code_of_fm(&mut self, a: &Formula) -> HfSet {
        let db = self.translator.trans_fm(&mut Vec::new(), a);
        self.code_of_dbfm(&db)
    }

    /// The canonical ground term denoting a set, with term sharing.
    pub fn term_of_value(&mut self, x: &HfSet) -> Term {
        crate::sigma::hfset_to_term_memo(x, &mut self.terms)
    }
}

/// The code of a term, as a set.
pub fn code_of_tm(t: &Term) -> HfSet {
    Coder::new().code_of_tm(t)
}

/// The code of a formula, as a set.
pub fn code_of_fm(a: &Formula) -> HfSet {
    Coder::new().code_of_fm(a)
}

pub fn code_of_dbtm(t: &DbTerm) -> HfSet {
    Coder::new().code_of_dbtm(t)
}

pub fn code_of_dbfm(a: &DbFormula) -> HfSet {
    Coder::new().code_of_dbfm(a)
}

// ---------------------------------------------------------------------------
// Quotation
// ---------------------------------------------------------------------------

/// ⌜t⌝ for a de Bruijn term: the canonical ground term denoting its code.
pub fn quote_dbtm(t: &DbTerm) -> Term {
    hfset_to_term(&code_of_dbtm(t))
}

pub fn quote_dbfm(a: &DbFormula) -> Term {
    hfset_to_term(&code_of_dbfm(a))
}

/// ⌜t⌝: translate to de Bruijn form, then quote.
pub fn quote_tm(t: &Term) -> Term {
    hfset_to_term(&code_of_tm(t))
}

/// ⌜A⌝: translate to de Bruijn form, then quote.
pub fn quote_fm(a: &Formula) -> Term {
    hfset_to_term(&code_of_fm(a))
}

// ---------------------------------------------------------------------------
// V-codes: quotation preserving chosen variables
// ---------------------------------------------------------------------------

/// The fixed pair spelling used where quoted structure must carry live
/// variables.
fn hpair_term(a: Term, b: Term) -> Term {
    Term::hpair(a, b)
}

/// The V-code of a de Bruijn term: variables in V stay live, everything else
/// is quoted. With V empty this coincides with quotation.
pub fn vquote_dbtm(v: &[Name], t: &DbTerm) -> Term {
    if t.free_vars().iter().all(|n| !v.contains(n)) {
        return quote_dbtm(t);
    }
    match t.kind() {
        DbTermKind::DbZero | DbTermKind::DbInd(_) => quote_dbtm(t),
        DbTermKind::DbVar(n) => {
            if v.contains(n) {
                Term::var(*n)
            } else {
                quote_dbtm(t)
            }
        }
        DbTermKind::DbEats(a, b) => hpair_term(
            tag_term(CodeTag::Eats),
            hpair_term(vquote_dbtm(v, a), vquote_dbtm(v, b)),
        ),
    }
}

pub fn vquote_dbfm(v: &[Name], a: &DbFormula) -> Term {
    if a.free_vars().iter().all(|n| !v.contains(n)) {
        return quote_dbfm(a);
    }
    match a.kind() {
        DbFormulaKind::DbMem(t, u) => hpair_term(
            tag_term(CodeTag::Mem),
            hpair_term(vquote_dbtm(v, t), vquote_dbtm(v, u)),
        ),
        DbFormulaKind::DbEq(t, u) => hpair_term(
            tag_term(CodeTag::Eq),
            hpair_term(vquote_dbtm(v, t), vquote_dbtm(v, u)),
        ),
        DbFormulaKind::DbDisj(x, y) => hpair_term(
            tag_term(CodeTag::Disj),
            hpair_term(vquote_dbfm(v, x), vquote_dbfm(v, y)),
        ),
        DbFormulaKind::DbNeg(x) => hpair_term(tag_term(CodeTag::Neg), vquote_dbfm(v, x)),
        DbFormulaKind::DbEx(x) => hpair_term(tag_term(CodeTag::Ex), vquote_dbfm(v, x)),
    }
}

pub fn vquote_tm(v: &[Name], t: &Term) -> Term {
    vquote_dbtm(v, &trans_tm(&[], t))
}

pub fn vquote_fm(v: &[Name], a: &Formula) -> Term {
    vquote_dbfm(v, &trans_fm(&[], a))
}

// ---------------------------------------------------------------------------
// Simultaneous substitution
// ---------------------------------------------------------------------------

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CaptureRisk {
    pub offender: Name,
}

impl fmt::Display for CaptureRisk {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "replacement for {} reintroduces substituted variables",
            self.offender
        )
    }
}

impl std::error::Error for CaptureRisk {}

/// Simultaneous substitution in a term for all variables in V. The family
/// must not map any variable back into V, which makes the fold order
/// irrelevant.
pub fn ssubst<F>(t: &Term, v: &[Name], f: F) -> Result<Term, CaptureRisk>
where
    F: Fn(Name) -> Term,
{
    let mut names: Vec<Name> = v.to_vec();
    names.sort();
    names.dedup();
    for n in &names {
        let image = f(*n);
        if image.free_vars().iter().any(|m| names.contains(m)) {
            return Err(CaptureRisk { offender: *n });
        }
    }
    let mut out = t.clone();
    for n in &names {
        out = crate::syntax::subst_tm(*n, &f(*n), &out);
    }
    Ok(out)
}

// ---------------------------------------------------------------------------
// Decoding
// ---------------------------------------------------------------------------

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct NotACode {
    /// Path of pair projections from the root to the offending subvalue.
    pub path: Vec<&'static str>,
}

impl fmt::Display for NotACode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "not a code (at {})", self.path.join("."))
    }
}

impl std::error::Error for NotACode {}

fn not_code(path: &[&'static str]) -> NotACode {
    NotACode {
        path: path.to_vec(),
    }
}

/// Inverts term coding: ordinals ≥ 1 decode to variables, ⟨ind-tag, k⟩ to an
/// index, eats-tagged pairs recurse.
pub fn decode_tm(x: &HfSet) -> Result<DbTerm, NotACode> {
    let mut memo = HashMap::new();
    let mut path = Vec::new();
    decode_tm_at(x, &mut memo, &mut path)
}

fn decode_tm_at(
    x: &HfSet,
    memo: &mut HashMap<HfSet, DbTerm>,
    path: &mut Vec<&'static str>,
) -> Result<DbTerm, NotACode> {
    if let Some(d) = memo.get(x) {
        return Ok(d.clone());
    }
    if x.is_empty() {
        return Ok(DbTerm::zero());
    }
    if let Some(n) = var_of_code(x) {
        return Ok(DbTerm::var(n));
    }
    let Ok((tag, payload)) = x.unpair() else {
        return Err(not_code(path));
    };
    let out = match CodeTag::from_value(&tag) {
        Some(CodeTag::Ind) => match payload.as_ord() {
            Ok(k) => DbTerm::ind(k as u32),
            Err(_) => return Err(not_code(path)),
        },
        Some(CodeTag::Eats) => {
            let (a, b) = payload.unpair().map_err(|_| not_code(path))?;
            path.push("left");
            let da = decode_tm_at(&a, memo, path)?;
            path.pop();
            path.push("right");
            let db = decode_tm_at(&b, memo, path)?;
            path.pop();
            DbTerm::eats(da, db)
        }
        _ => return Err(not_code(path)),
    };
    memo.insert(x.clone(), out.clone());
    Ok(out)
}

/// Inverts formula coding.
pub fn decode_fm(x: &HfSet) -> Result<DbFormula, NotACode> {
    let mut tmemo = HashMap::new();
    let mut fmemo = HashMap::new();
    let mut path = Vec::new();
    decode_fm_at(x, &mut tmemo, &mut fmemo, &mut path)
}

fn decode_fm_at(
    x: &HfSet,
    tmemo: &mut HashMap<HfSet, DbTerm>,
    fmemo: &mut HashMap<HfSet, DbFormula>,
    path: &mut Vec<&'static str>,
) -> Result<DbFormula, NotACode> {
    if let Some(d) = fmemo.get(x) {
        return Ok(d.clone());
    }
    let Ok((tag, payload)) = x.unpair() else {
        return Err(not_code(path));
    };
    let out = match CodeTag::from_value(&tag) {
        Some(CodeTag::Mem) | Some(CodeTag::Eq) => {
            let (a, b) = payload.unpair().map_err(|_| not_code(path))?;
            path.push("left");
            let da = decode_tm_at(&a, tmemo, path)?;
            path.pop();
            path.push("right");
            let db = decode_tm_at(&b, tmemo, path)?;
            path.pop();
            if CodeTag::from_value(&tag) == Some(CodeTag::Mem) {
                DbFormula::mem(da, db)
            } else {
                DbFormula::eq(da, db)
            }
        }
        Some(CodeTag::Disj) => {
            let (a, b) = payload.unpair().map_err(|_| not_code(path))?;
            path.push("left");
            let da = decode_fm_at(&a, tmemo, fmemo, path)?;
            path.pop();
            path.push("right");
            let db = decode_fm_at(&b, tmemo, fmemo, path)?;
            path.pop();
            DbFormula::disj(da, db)
        }
        Some(CodeTag::Neg) => {
            path.push("body");
            let d = decode_fm_at(&payload, tmemo, fmemo, path)?;
            path.pop();
            DbFormula::neg(d)
        }
        Some(CodeTag::Ex) => {
            path.push("body");
            let d = decode_fm_at(&payload, tmemo, fmemo, path)?;
            path.pop();
            DbFormula::ex(d)
        }
        _ => return Err(not_code(path)),
    };
    fmemo.insert(x.clone(), out.clone());
    Ok(out)
}

// ---------------------------------------------------------------------------
// Shadow syntax predicates
// ---------------------------------------------------------------------------

#[derive(Copy, Clone, Debug, PartialEq, Eq)]
pub enum SyntaxKind {
    Const,
    Term,
    Form,
}

/// A sequence establishing a shadow predicate: the relation and its final
/// index, with the target at the final position.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SeqWitness {
    pub s: HfSet,
    pub k: HfSet,
}

impl SeqWitness {
    pub fn view(&self) -> SeqView {
        SeqView::new(self.s.clone(), self.k.clone())
    }
}

fn witness_from_items(items: &[HfSet]) -> SeqWitness {
    let pairs = items
        .iter()
        .enumerate()
        .map(|(i, x)| HfSet::hpair(&HfSet::ord_of(i), x));
    SeqWitness {
        s: HfSet::from_children(pairs),
        k: HfSet::ord_of(items.len() - 1),
    }
}

/// Set-level recognizer for term codes (`allow_vars=false` recognizes
/// constants). No syntax objects are built.
fn term_code_ok(x: &HfSet, allow_vars: bool, memo: &mut HashMap<HfSet, bool>) -> bool {
    if let Some(&b) = memo.get(x) {
        return b;
    }
    let ok = if x.is_empty() {
        true
    } else if is_var_code(x) {
        allow_vars
    } else if let Ok((tag, payload)) = x.unpair() {
        tag == CodeTag::Eats.value()
            && payload
                .unpair()
                .map(|(a, b)| {
                    term_code_ok(&a, allow_vars, memo) && term_code_ok(&b, allow_vars, memo)
                })
                .unwrap_or(false)
    } else {
        false
    };
    memo.insert(x.clone(), ok);
    ok
}

pub fn is_const_code(x: &HfSet) -> bool {
    term_code_ok(x, false, &mut HashMap::new())
}

pub fn is_term_code(x: &HfSet) -> bool {
    term_code_ok(x, true, &mut HashMap::new())
}

/// Collects the subterm codes of a term code in postorder (left, right,
/// node), without duplicates.
fn term_postorder(x: &HfSet, out: &mut Vec<HfSet>, seen: &mut HashMap<HfSet, ()>) {
    if seen.contains_key(x) {
        return;
    }
    if let Ok((tag, payload)) = x.unpair() {
        if tag == CodeTag::Eats.value() {
            if let Ok((a, b)) = payload.unpair() {
                term_postorder(&a, out, seen);
                term_postorder(&b, out, seen);
            }
        }
    }
    seen.insert(x.clone(), ());
    out.push(x.clone());
}

/// Variable codes occurring in a term or formula code.
pub fn collect_var_codes(x: &HfSet, out: &mut Vec<HfSet>) {
    if is_var_code(x) {
        if !out.contains(x) {
            out.push(x.clone());
        }
        return;
    }
    if let Ok((tag, payload)) = x.unpair() {
        match CodeTag::from_value(&tag) {
            Some(CodeTag::Ind) => {}
            Some(CodeTag::Neg) | Some(CodeTag::Ex) => collect_var_codes(&payload, out),
            Some(_) => {
                if let Ok((a, b)) = payload.unpair() {
                    collect_var_codes(&a, out);
                    collect_var_codes(&b, out);
                }
            }
            None => {}
        }
    }
}

/// Attempts to build a sequence witness establishing that `x` codes syntax of
/// the given kind. The sequence lists the relevant subcodes in postorder.
pub fn shadow_syntax_check(kind: SyntaxKind, x: &HfSet) -> Option<SeqWitness> {
    match kind {
        SyntaxKind::Const => {
            if !is_const_code(x) {
                return None;
            }
            let mut items = Vec::new();
            term_postorder(x, &mut items, &mut HashMap::new());
            Some(witness_from_items(&items))
        }
        SyntaxKind::Term => {
            if !is_term_code(x) {
                return None;
            }
            let mut items = Vec::new();
            term_postorder(x, &mut items, &mut HashMap::new());
            Some(witness_from_items(&items))
        }
        SyntaxKind::Form => {
            if !is_form_code(x) {
                return None;
            }
            let mut items = Vec::new();
            form_postorder(x, &mut items, &mut HashMap::new());
            Some(witness_from_items(&items))
        }
    }
}

pub fn is_form_code(x: &HfSet) -> bool {
    fn go(x: &HfSet, tmemo: &mut HashMap<HfSet, bool>, fmemo: &mut HashMap<HfSet, bool>) -> bool {
        if let Some(&b) = fmemo.get(x) {
            return b;
        }
        let ok = if let Ok((tag, payload)) = x.unpair() {
            match CodeTag::from_value(&tag) {
                Some(CodeTag::Mem) | Some(CodeTag::Eq) => payload
                    .unpair()
                    .map(|(a, b)| term_code_ok(&a, true, tmemo) && term_code_ok(&b, true, tmemo))
                    .unwrap_or(false),
                Some(CodeTag::Disj) => payload
                    .unpair()
                    .map(|(a, b)| go(&a, tmemo, fmemo) && go(&b, tmemo, fmemo))
                    .unwrap_or(false),
                Some(CodeTag::Neg) => go(&payload, tmemo, fmemo),
                Some(CodeTag::Ex) => {
                    // the body is a formula code abstracted over some
                    // variable; any fresh variable restores one
                    match unabst_candidate(&payload) {
                        Some(restored) => go(&restored, tmemo, fmemo),
                        None => false,
                    }
                }
                _ => false,
            }
        } else {
            false
        };
        fmemo.insert(x.clone(), ok);
        ok
    }
    go(x, &mut HashMap::new(), &mut HashMap::new())
}

/// Replaces index 0 (at the right depth) by a variable not occurring in the
/// code, inverting one abstraction step; None if the body is not pair-shaped
/// where it must be.
fn unabst_candidate(body: &HfSet) -> Option<HfSet> {
    let mut vars = Vec::new();
    collect_var_codes(body, &mut vars);
    let max = vars
        .iter()
        .map(|v| v.card())
        .max()
        .unwrap_or(0);
    let fresh = HfSet::ord_of(max + 1);
    shadow_unabst_form(&fresh, 0, body)
}

fn form_postorder(x: &HfSet, out: &mut Vec<HfSet>, seen: &mut HashMap<HfSet, ()>) {
    if seen.contains_key(x) {
        return;
    }
    if let Ok((tag, payload)) = x.unpair() {
        match CodeTag::from_value(&tag) {
            Some(CodeTag::Disj) => {
                if let Ok((a, b)) = payload.unpair() {
                    form_postorder(&a, out, seen);
                    form_postorder(&b, out, seen);
                }
            }
            Some(CodeTag::Neg) => form_postorder(&payload, out, seen),
            Some(CodeTag::Ex) => {
                if let Some(restored) = unabst_candidate(&payload) {
                    form_postorder(&restored, out, seen);
                }
            }
            _ => {}
        }
    }
    seen.insert(x.clone(), ());
    out.push(x.clone());
}

/// Checks a syntax witness purely at the set level: the sequence must be a
/// list sequence ending in `x`, and every element must be a base case or
/// derive from strictly earlier elements by the kind's step relation.
pub fn verify_syntax_witness(kind: SyntaxKind, s: &HfSet, k: &HfSet, x: &HfSet) -> bool {
    if !s.is_lstseq(k, x) {
        return false;
    }
    let Ok(len) = k.as_ord() else { return false };
    let mut elems = Vec::with_capacity(len + 1);
    for l in 0..=len {
        match s.seq_app(&HfSet::ord_of(l)) {
            Ok(v) => elems.push(v),
            Err(_) => return false,
        }
    }
    for l in 0..=len {
        let el = &elems[l];
        let base = match kind {
            SyntaxKind::Const => el.is_empty(),
            SyntaxKind::Term => el.is_empty() || is_var_code(el),
            SyntaxKind::Form => atomic_form_ok(el),
        };
        if base {
            continue;
        }
        let mut stepped = false;
        'step: for m in 0..l {
            for n in 0..l {
                if step_relation(kind, el, &elems[m], &elems[n]) {
                    stepped = true;
                    break 'step;
                }
            }
        }
        if !stepped {
            return false;
        }
    }
    true
}

/// Atomic formula code: a membership or equality of two term codes.
fn atomic_form_ok(el: &HfSet) -> bool {
    if let Ok((tag, payload)) = el.unpair() {
        if matches!(
            CodeTag::from_value(&tag),
            Some(CodeTag::Mem) | Some(CodeTag::Eq)
        ) {
            if let Ok((a, b)) = payload.unpair() {
                return is_term_code(&a) && is_term_code(&b);
            }
        }
    }
    false
}

fn step_relation(kind: SyntaxKind, el: &HfSet, sm: &HfSet, sn: &HfSet) -> bool {
    match kind {
        SyntaxKind::Const | SyntaxKind::Term => *el == q_eats(sm, sn),
        SyntaxKind::Form => {
            if *el == q_disj(sm, sn) || *el == q_neg(sm) {
                return true;
            }
            // existential step: el = ⟨ex-tag, abst(v, 0, sm)⟩ for some v
            if let Ok((tag, body)) = el.unpair() {
                if CodeTag::from_value(&tag) == Some(CodeTag::Ex) {
                    let mut cands = Vec::new();
                    collect_var_codes(sm, &mut cands);
                    let max = cands.iter().map(|v| v.card()).max().unwrap_or(0);
                    cands.push(HfSet::ord_of(max + 1));
                    for v in cands {
                        if shadow_abst_form(&v, 0, sm) == Some(body.clone()) {
                            return true;
                        }
                    }
                }
            }
            false
        }
    }
}

// ---------------------------------------------------------------------------
// Shadow abstraction and substitution
// ---------------------------------------------------------------------------

/// Abstraction on a term code: occurrences of the variable code `v` become
/// the index i.
pub fn shadow_abst_term(v: &HfSet, i: usize, x: &HfSet) -> Option<HfSet> {
    if !is_var_code(v) {
        return None;
    }
    fn go(v: &HfSet, i: usize, x: &HfSet, memo: &mut HashMap<HfSet, Option<HfSet>>) -> Option<HfSet> {
        if let Some(r) = memo.get(x) {
            return r.clone();
        }
        let out = if x == v {
            Some(q_ind(i))
        } else if x.is_empty() || is_var_code(x) {
            Some(x.clone())
        } else if let Ok((tag, payload)) = x.unpair() {
            match CodeTag::from_value(&tag) {
                Some(CodeTag::Ind) => Some(x.clone()),
                Some(CodeTag::Eats) => {
                    let (a, b) = payload.unpair().ok()?;
                    Some(q_eats(&go(v, i, &a, memo)?, &go(v, i, &b, memo)?))
                }
                _ => None,
            }
        } else {
            None
        };
        memo.insert(x.clone(), out.clone());
        out
    }
    go(v, i, x, &mut HashMap::new())
}

/// Abstraction on a formula code, tracking the quantifier depth.
pub fn shadow_abst_form(v: &HfSet, i: usize, x: &HfSet) -> Option<HfSet> {
    if !is_var_code(v) {
        return None;
    }
    fn go(
        v: &HfSet,
        i: usize,
        x: &HfSet,
        memo: &mut HashMap<(HfSet, usize), Option<HfSet>>,
    ) -> Option<HfSet> {
        if let Some(r) = memo.get(&(x.clone(), i)) {
            return r.clone();
        }
        let (tag, payload) = x.unpair().ok()?;
        let out = match CodeTag::from_value(&tag) {
            Some(CodeTag::Mem) | Some(CodeTag::Eq) => {
                let (a, b) = payload.unpair().ok()?;
                let ra = shadow_abst_term(v, i, &a)?;
                let rb = shadow_abst_term(v, i, &b)?;
                Some(HfSet::hpair(&tag, &HfSet::hpair(&ra, &rb)))
            }
            Some(CodeTag::Disj) => {
                let (a, b) = payload.unpair().ok()?;
                Some(q_disj(&go(v, i, &a, memo)?, &go(v, i, &b, memo)?))
            }
            Some(CodeTag::Neg) => Some(q_neg(&go(v, i, &payload, memo)?)),
            Some(CodeTag::Ex) => Some(q_ex(&go(v, i + 1, &payload, memo)?)),
            _ => None,
        };
        memo.insert((x.clone(), i), out.clone());
        out
    }
    go(v, i, x, &mut HashMap::new())
}

/// Dispatches on the code's shape: formula tags go to the formula variant.
pub fn shadow_abst(v: &HfSet, i: usize, x: &HfSet) -> Option<HfSet> {
    if looks_like_form(x) {
        shadow_abst_form(v, i, x)
    } else {
        shadow_abst_term(v, i, x)
    }
}

fn looks_like_form(x: &HfSet) -> bool {
    if let Ok((tag, _)) = x.unpair() {
        matches!(
            CodeTag::from_value(&tag),
            Some(CodeTag::Mem)
                | Some(CodeTag::Eq)
                | Some(CodeTag::Disj)
                | Some(CodeTag::Neg)
                | Some(CodeTag::Ex)
        )
    } else {
        false
    }
}

/// Inverse of one formula abstraction: index i at the current depth becomes
/// the variable code `v`.
pub fn shadow_unabst_form(v: &HfSet, i: usize, x: &HfSet) -> Option<HfSet> {
    if !is_var_code(v) {
        return None;
    }
    fn unabst_term(v: &HfSet, i: usize, x: &HfSet) -> Option<HfSet> {
        if x.is_empty() || is_var_code(x) {
            return Some(x.clone());
        }
        let (tag, payload) = x.unpair().ok()?;
        match CodeTag::from_value(&tag) {
            Some(CodeTag::Ind) => {
                if payload == HfSet::ord_of(i) {
                    Some(v.clone())
                } else {
                    Some(x.clone())
                }
            }
            Some(CodeTag::Eats) => {
                let (a, b) = payload.unpair().ok()?;
                Some(q_eats(&unabst_term(v, i, &a)?, &unabst_term(v, i, &b)?))
            }
            _ => None,
        }
    }
    fn go(v: &HfSet, i: usize, x: &HfSet) -> Option<HfSet> {
        let (tag, payload) = x.unpair().ok()?;
        match CodeTag::from_value(&tag) {
            Some(CodeTag::Mem) | Some(CodeTag::Eq) => {
                let (a, b) = payload.unpair().ok()?;
                Some(HfSet::hpair(
                    &tag,
                    &HfSet::hpair(&unabst_term(v, i, &a)?, &unabst_term(v, i, &b)?),
                ))
            }
            Some(CodeTag::Disj) => {
                let (a, b) = payload.unpair().ok()?;
                Some(q_disj(&go(v, i, &a)?, &go(v, i, &b)?))
            }
            Some(CodeTag::Neg) => Some(q_neg(&go(v, i, &payload)?)),
            Some(CodeTag::Ex) => Some(q_ex(&go(v, i + 1, &payload)?)),
            _ => None,
        }
    }
    go(v, i, x)
}

/// Substitution on a term code: occurrences of the variable code `v` become
/// the term code `u`.
pub fn shadow_subst_term(v: &HfSet, u: &HfSet, x: &HfSet) -> Option<HfSet> {
    if !is_var_code(v) || !is_term_code(u) {
        return None;
    }
    fn go(v: &HfSet, u: &HfSet, x: &HfSet, memo: &mut HashMap<HfSet, Option<HfSet>>) -> Option<HfSet> {
        if let Some(r) = memo.get(x) {
            return r.clone();
        }
        let out = if x == v {
            Some(u.clone())
        } else if x.is_empty() || is_var_code(x) {
            Some(x.clone())
        } else if let Ok((tag, payload)) = x.unpair() {
            match CodeTag::from_value(&tag) {
                Some(CodeTag::Ind) => Some(x.clone()),
                Some(CodeTag::Eats) => {
                    let (a, b) = payload.unpair().ok()?;
                    Some(q_eats(&go(v, u, &a, memo)?, &go(v, u, &b, memo)?))
                }
                _ => None,
            }
        } else {
            None
        };
        memo.insert(x.clone(), out.clone());
        out
    }
    go(v, u, x, &mut HashMap::new())
}

/// Substitution on a formula code; the replacement is index-free, so no
/// depth adjustment is needed.
pub fn shadow_subst_form(v: &HfSet, u: &HfSet, x: &HfSet) -> Option<HfSet> {
    if !is_var_code(v) || !is_term_code(u) {
        return None;
    }
    fn go(
        v: &HfSet,
        u: &HfSet,
        x: &HfSet,
        memo: &mut HashMap<HfSet, Option<HfSet>>,
    ) -> Option<HfSet> {
        if let Some(r) = memo.get(x) {
            return r.clone();
        }
        let out = (|| {
            let (tag, payload) = x.unpair().ok()?;
            match CodeTag::from_value(&tag) {
                Some(CodeTag::Mem) | Some(CodeTag::Eq) => {
                    let (a, b) = payload.unpair().ok()?;
                    let ra = shadow_subst_term(v, u, &a)?;
                    let rb = shadow_subst_term(v, u, &b)?;
                    Some(HfSet::hpair(&tag, &HfSet::hpair(&ra, &rb)))
                }
                Some(CodeTag::Disj) => {
                    let (a, b) = payload.unpair().ok()?;
                    Some(q_disj(&go(v, u, &a, memo)?, &go(v, u, &b, memo)?))
                }
                Some(CodeTag::Neg) => Some(q_neg(&go(v, u, &payload, memo)?)),
                Some(CodeTag::Ex) => Some(q_ex(&go(v, u, &payload, memo)?)),
                _ => None,
            }
        })();
        memo.insert(x.clone(), out.clone());
        out
    }
    go(v, u, x, &mut HashMap::new())
}

/// Dispatches substitution on the code's shape.
pub fn shadow_subst(v: &HfSet, u: &HfSet, x: &HfSet) -> Option<HfSet> {
    if looks_like_form(x) {
        shadow_subst_form(v, u, x)
    } else {
        shadow_subst_term(v, u, x)
    }
}

// ---------------------------------------------------------------------------
// Witness pairs for abstraction and substitution
// ---------------------------------------------------------------------------

/// Sequence witness for term substitution/abstraction: elements are pairs
/// ⟨input fragment, output fragment⟩, listed in postorder.
pub fn build_subst_term_witness(v: &HfSet, u: &HfSet, x: &HfSet) -> Option<SeqWitness> {
    let mut items = Vec::new();
    let mut seen = HashMap::new();
    fn go(
        v: &HfSet,
        u: &HfSet,
        x: &HfSet,
        items: &mut Vec<HfSet>,
        seen: &mut HashMap<HfSet, HfSet>,
    ) -> Option<HfSet> {
        if let Some(r) = seen.get(x) {
            return Some(r.clone());
        }
        let out = if x.is_empty() || is_var_code(x) || is_ind_code(x) {
            if *x == *v {
                u.clone()
            } else {
                x.clone()
            }
        } else {
            let (tag, payload) = x.unpair().ok()?;
            if CodeTag::from_value(&tag) != Some(CodeTag::Eats) {
                return None;
            }
            let (a, b) = payload.unpair().ok()?;
            let ra = go(v, u, &a, items, seen)?;
            let rb = go(v, u, &b, items, seen)?;
            q_eats(&ra, &rb)
        };
        seen.insert(x.clone(), out.clone());
        items.push(HfSet::hpair(x, &out));
        Some(out)
    }
    go(v, u, x, &mut items, &mut seen)?;
    Some(witness_from_items(&items))
}

fn is_ind_code(x: &HfSet) -> bool {
    if let Ok((tag, payload)) = x.unpair() {
        CodeTag::from_value(&tag) == Some(CodeTag::Ind) && payload.is_ord()
    } else {
        false
    }
}

/// Verifies a term-substitution witness at the set level: every element is a
/// pair whose output rewrites the input by the base clause or combines two
/// earlier pairs under the eats tag.
pub fn verify_subst_term_witness(
    v: &HfSet,
    u: &HfSet,
    x: &HfSet,
    x_out: &HfSet,
    s: &HfSet,
    k: &HfSet,
) -> bool {
    if !is_var_code(v) {
        return false;
    }
    let target = HfSet::hpair(x, x_out);
    if !s.is_lstseq(k, &target) {
        return false;
    }
    let Ok(len) = k.as_ord() else { return false };
    let mut elems = Vec::with_capacity(len + 1);
    for l in 0..=len {
        match s.seq_app(&HfSet::ord_of(l)) {
            Ok(e) => match e.unpair() {
                Ok(p) => elems.push(p),
                Err(_) => return false,
            },
            Err(_) => return false,
        }
    }
    for l in 0..=len {
        let (inp, out) = &elems[l];
        let base_shape = inp.is_empty() || is_var_code(inp) || is_ind_code(inp);
        if base_shape {
            let expect = if inp == v { u.clone() } else { inp.clone() };
            if *out != expect {
                return false;
            }
            continue;
        }
        let mut stepped = false;
        'step: for m in 0..l {
            for n in 0..l {
                let (am, bm) = &elems[m];
                let (an, bn) = &elems[n];
                if *inp == q_eats(am, an) && *out == q_eats(bm, bn) {
                    stepped = true;
                    break 'step;
                }
            }
        }
        if !stepped {
            return false;
        }
    }
    true
}

/// Sequence witness for formula abstraction: elements are triples
/// ⟨⟨input fragment, index⟩, output fragment⟩ in postorder, where the index
/// gives the de Bruijn index in force at the fragment (the starting index
/// plus the quantifiers crossed).
pub fn build_abst_form_witness(v: &HfSet, i: usize, x: &HfSet) -> Option<SeqWitness> {
    let mut items = Vec::new();
    let mut seen: HashMap<(HfSet, usize), HfSet> = HashMap::new();
    fn go(
        v: &HfSet,
        j: usize,
        x: &HfSet,
        items: &mut Vec<HfSet>,
        seen: &mut HashMap<(HfSet, usize), HfSet>,
    ) -> Option<HfSet> {
        if let Some(r) = seen.get(&(x.clone(), j)) {
            return Some(r.clone());
        }
        let (tag, payload) = x.unpair().ok()?;
        let out = match CodeTag::from_value(&tag) {
            Some(CodeTag::Mem) | Some(CodeTag::Eq) => {
                let (a, b) = payload.unpair().ok()?;
                let ra = shadow_abst_term(v, j, &a)?;
                let rb = shadow_abst_term(v, j, &b)?;
                HfSet::hpair(&tag, &HfSet::hpair(&ra, &rb))
            }
            Some(CodeTag::Disj) => {
                let (a, b) = payload.unpair().ok()?;
                let ra = go(v, j, &a, items, seen)?;
                let rb = go(v, j, &b, items, seen)?;
                q_disj(&ra, &rb)
            }
            Some(CodeTag::Neg) => q_neg(&go(v, j, &payload, items, seen)?),
            Some(CodeTag::Ex) => q_ex(&go(v, j + 1, &payload, items, seen)?),
            _ => return None,
        };
        seen.insert((x.clone(), j), out.clone());
        items.push(HfSet::hpair(
            &HfSet::hpair(x, &HfSet::ord_of(j)),
            &out,
        ));
        Some(out)
    }
    go(v, i, x, &mut items, &mut seen)?;
    Some(witness_from_items(&items))
}

/// Verifies a formula-abstraction witness at the set level: elements are
/// ⟨⟨fragment, index⟩, output⟩ triples; atomic fragments rewrite by the term
/// clause at their index, compound fragments combine earlier triples, with
/// the existential step looking one index deeper.
pub fn verify_abst_form_witness(
    v: &HfSet,
    i: usize,
    x: &HfSet,
    x_out: &HfSet,
    s: &HfSet,
    k: &HfSet,
) -> bool {
    if !is_var_code(v) {
        return false;
    }
    let target = HfSet::hpair(&HfSet::hpair(x, &HfSet::ord_of(i)), x_out);
    if !s.is_lstseq(k, &target) {
        return false;
    }
    let Ok(len) = k.as_ord() else { return false };
    let mut elems = Vec::with_capacity(len + 1);
    for l in 0..=len {
        let Ok(e) = s.seq_app(&HfSet::ord_of(l)) else {
            return false;
        };
        let Ok((key, out)) = e.unpair() else {
            return false;
        };
        let Ok((inp, j)) = key.unpair() else {
            return false;
        };
        let Ok(j) = j.as_ord() else { return false };
        elems.push((inp, j, out));
    }
    for l in 0..=len {
        let (inp, j, out) = &elems[l];
        // atomic base: both payload components rewritten by the term clause
        let atomic = (|| {
            let (tag, payload) = inp.unpair().ok()?;
            if !matches!(
                CodeTag::from_value(&tag),
                Some(CodeTag::Mem) | Some(CodeTag::Eq)
            ) {
                return None;
            }
            let (a, b) = payload.unpair().ok()?;
            let ra = shadow_abst_term(v, *j, &a)?;
            let rb = shadow_abst_term(v, *j, &b)?;
            Some(*out == HfSet::hpair(&tag, &HfSet::hpair(&ra, &rb)))
        })()
        .unwrap_or(false);
        if atomic {
            continue;
        }
        let mut stepped = false;
        'step: for m in 0..l {
            for n in 0..l {
                let (am, jm, bm) = &elems[m];
                let (an, jn, bn) = &elems[n];
                if *jm == *j && *jn == *j && *inp == q_disj(am, an) && *out == q_disj(bm, bn) {
                    stepped = true;
                    break 'step;
                }
            }
            let (am, jm, bm) = &elems[m];
            if *jm == *j && *inp == q_neg(am) && *out == q_neg(bm) {
                stepped = true;
                break 'step;
            }
            if *jm == *j + 1 && *inp == q_ex(am) && *out == q_ex(bm) {
                stepped = true;
                break 'step;
            }
        }
        if !stepped {
            return false;
        }
    }
    true
}

/// Sequence witness for formula substitution: pairs in postorder (the
/// replacement is index-free, so no depth tracking is required).
pub fn build_subst_form_witness(v: &HfSet, u: &HfSet, x: &HfSet) -> Option<SeqWitness> {
    if !is_var_code(v) || !is_term_code(u) {
        return None;
    }
    let mut items = Vec::new();
    let mut seen: HashMap<HfSet, HfSet> = HashMap::new();
    fn go(
        v: &HfSet,
        u: &HfSet,
        x: &HfSet,
        items: &mut Vec<HfSet>,
        seen: &mut HashMap<HfSet, HfSet>,
    ) -> Option<HfSet> {
        if let Some(r) = seen.get(x) {
            return Some(r.clone());
        }
        let (tag, payload) = x.unpair().ok()?;
        let out = match CodeTag::from_value(&tag) {
            Some(CodeTag::Mem) | Some(CodeTag::Eq) => {
                let (a, b) = payload.unpair().ok()?;
                let ra = shadow_subst_term(v, u, &a)?;
                let rb = shadow_subst_term(v, u, &b)?;
                HfSet::hpair(&tag, &HfSet::hpair(&ra, &rb))
            }
            Some(CodeTag::Disj) => {
                let (a, b) = payload.unpair().ok()?;
                q_disj(
                    &go(v, u, &a, items, seen)?,
                    &go(v, u, &b, items, seen)?,
                )
            }
            Some(CodeTag::Neg) => q_neg(&go(v, u, &payload, items, seen)?),
            Some(CodeTag::Ex) => q_ex(&go(v, u, &payload, items, seen)?),
            _ => return None,
        };
        seen.insert(x.clone(), out.clone());
        items.push(HfSet::hpair(x, &out));
        Some(out)
    }
    go(v, u, x, &mut items, &mut seen)?;
    Some(witness_from_items(&items))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::syntax::{all2, fls, subst_fm};

    fn v(n: u32) -> Term {
        Term::var(Name(n))
    }

    #[test]
    fn tag_values() {
        // ⌜∈⌝ = ⟨0,0⟩, ⌜◁⌝ = ⟨0,0,0⟩, de Bruijn tag is the 8-tuple
        assert_eq!(CodeTag::Mem.value(), HfSet::htuple(0));
        assert_eq!(CodeTag::Ind.value(), HfSet::htuple(6));
        let all: Vec<HfSet> = (0..7).map(HfSet::htuple).collect();
        for (i, a) in all.iter().enumerate() {
            assert!(!a.is_ord(), "no tag is an ordinal");
            for (j, b) in all.iter().enumerate() {
                assert_eq!(i == j, a == b, "tags pairwise distinct");
            }
        }
    }

    #[test]
    fn quotation_shapes() {
        // ⌜0⌝ = 0
        assert_eq!(quote_tm(&Term::zero()), Term::zero());
        // ⌜Var x⌝ = SUCC(ORD_OF(nat_of_name x)) as a value
        let c = code_of_tm(&v(2));
        assert_eq!(c, HfSet::ord_of(3));
        // ⌜Eats x y⌝ = ⟨eats-tag, ⌜x⌝, ⌜y⌝⟩
        let e = code_of_tm(&Term::eats(v(0), Term::zero()));
        let (tag, payload) = e.unpair().unwrap();
        assert_eq!(tag, CodeTag::Eats.value());
        let (a, b) = payload.unpair().unwrap();
        assert_eq!(a, q_var(Name(0)));
        assert_eq!(b, HfSet::empty());
        // quotations are ground and evaluate to the code
        let f = Formula::ex(Name(0), Formula::mem(v(0), v(1)));
        let q = quote_fm(&f);
        assert!(q.is_ground());
        assert_eq!(eval_tm(&Env::e0(), &q), code_of_fm(&f));
        // ⌜Ex i A⌝ carries the ex tag
        let (tag, _) = code_of_fm(&f).unpair().unwrap();
        assert_eq!(tag, CodeTag::Ex.value());
    }

    #[test]
    fn code_distinguishes() {
        assert_ne!(code_of_fm(&fls()), code_of_fm(&Formula::neg(fls())));
        // α-invariance
        let a = Formula::ex(Name(0), Formula::eq(v(0), v(5)));
        let b = Formula::ex(Name(1), Formula::eq(v(1), v(5)));
        assert_eq!(code_of_fm(&a), code_of_fm(&b));
    }

    #[test]
    fn vquote_laws() {
        let a = Formula::mem(v(0), Term::eats(v(1), Term::zero()));
        assert_eq!(vquote_fm(&[], &a), quote_fm(&a));
        let vq = vquote_fm(&[Name(0)], &a);
        assert_eq!(vq.free_vars(), &[Name(0)]);
        assert_eq!(vquote_tm(&[Name(0)], &v(0)), v(0));
        // names outside the formula do not appear
        let vq2 = vquote_fm(&[Name(9)], &a);
        assert!(vq2.is_ground());
        assert_eq!(vq2, quote_fm(&a));
    }

    #[test]
    fn ssubst_laws() {
        let i = Name(0);
        let f = |_: Name| Term::zero();
        assert_eq!(ssubst(&v(0), &[i], f).unwrap(), Term::zero());
        let t = Term::eats(v(0), v(1));
        assert_eq!(ssubst(&t, &[], |n| Term::var(n)).unwrap(), t);
        // capture risk: the family maps back into V
        let bad = ssubst(&t, &[Name(0), Name(1)], |_| v(0));
        assert!(bad.is_err());
        // order independence against sequential folds
        let fam = |n: Name| {
            if n == Name(0) {
                Term::zero()
            } else {
                Term::eats(Term::zero(), Term::zero())
            }
        };
        let sim = ssubst(&t, &[Name(0), Name(1)], fam).unwrap();
        let seq1 = crate::syntax::subst_tm(
            Name(1),
            &fam(Name(1)),
            &crate::syntax::subst_tm(Name(0), &fam(Name(0)), &t),
        );
        let seq2 = crate::syntax::subst_tm(
            Name(0),
            &fam(Name(0)),
            &crate::syntax::subst_tm(Name(1), &fam(Name(1)), &t),
        );
        assert_eq!(sim, seq1);
        assert_eq!(sim, seq2);
    }

    #[test]
    fn decode_round_trip() {
        for f in [
            fls(),
            Formula::ex(Name(0), Formula::mem(v(0), v(1))),
            Formula::disj(Formula::neg(fls()), Formula::eq(v(3), Term::zero())),
        ] {
            let code = code_of_fm(&f);
            let back = decode_fm(&code).unwrap();
            assert_eq!(back, trans_fm(&[], &f));
        }
        assert_eq!(decode_tm(&HfSet::ord_of(1)).unwrap(), DbTerm::var(Name(0)));
        assert!(decode_tm(&HfSet::htuple(3)).is_err(), "bare tag");
        assert!(decode_fm(&HfSet::ord_of(2)).is_err());
    }

    #[test]
    fn shadow_syntax_builders() {
        let t = Term::eats(Term::zero(), Term::eats(v(0), Term::zero()));
        let code = code_of_tm(&t);
        let w = shadow_syntax_check(SyntaxKind::Term, &code).unwrap();
        assert!(verify_syntax_witness(SyntaxKind::Term, &w.s, &w.k, &code));
        // a variable is not a constant
        assert!(shadow_syntax_check(SyntaxKind::Const, &code_of_tm(&v(0))).is_none());
        // ground term is a constant
        let g = Term::eats(Term::zero(), Term::zero());
        let cg = code_of_tm(&g);
        let wc = shadow_syntax_check(SyntaxKind::Const, &cg).unwrap();
        assert!(verify_syntax_witness(SyntaxKind::Const, &wc.s, &wc.k, &cg));
        // formulas
        let f = Formula::ex(Name(0), Formula::mem(v(0), v(1)));
        let cf = code_of_fm(&f);
        let wf = shadow_syntax_check(SyntaxKind::Form, &cf).unwrap();
        assert!(verify_syntax_witness(SyntaxKind::Form, &wf.s, &wf.k, &cf));
        // tampering: drop an element
        let shorter = HfSet::from_children(
            wf.s.children()
                .iter()
                .filter(|p| p.hfst().map(|a| a != HfSet::ord_of(0)).unwrap_or(true))
                .cloned(),
        );
        assert!(!verify_syntax_witness(SyntaxKind::Form, &shorter, &wf.k, &cf));
    }

    #[test]
    fn shadow_subst_matches_syntax() {
        let i = Name(0);
        for (a, t) in [
            (Formula::mem(v(0), v(1)), Term::zero()),
            (
                Formula::ex(Name(1), Formula::eq(v(0), v(1))),
                Term::eats(Term::zero(), Term::zero()),
            ),
            (all2(Name(2), &v(1), Formula::mem(v(2), v(0))).unwrap(), v(1)),
        ] {
            let lhs = shadow_subst(&q_var(i), &code_of_tm(&t), &code_of_fm(&a)).unwrap();
            let rhs = code_of_fm(&subst_fm(&a, i, &t));
            assert_eq!(lhs, rhs);
        }
    }

    #[test]
    fn shadow_abst_example() {
        // abstracting y in ⟨mem, ⌜x⌝, ⌜y⌝⟩ gives ⟨mem, ⌜x⌝, ind 0⟩
        let x = Name(0);
        let y = Name(1);
        let code = q_mem(&q_var(x), &q_var(y));
        let out = shadow_abst(&q_var(y), 0, &code).unwrap();
        assert_eq!(out, q_mem(&q_var(x), &q_ind(0)));
        // depth tracking under the existential tag
        let nested = q_ex(&q_mem(&q_var(x), &q_ind(0)));
        let out2 = shadow_abst_form(&q_var(x), 0, &nested).unwrap();
        assert_eq!(out2, q_ex(&q_mem(&q_ind(1), &q_ind(0))));
    }

    #[test]
    fn non_occurrence_trick() {
        // substituting ⌜0⌝ for v fixes the code exactly when v is absent
        let a = Formula::mem(v(0), v(1));
        let code = code_of_fm(&a);
        let zero_code = HfSet::empty();
        assert_ne!(
            shadow_subst(&q_var(Name(0)), &zero_code, &code).unwrap(),
            code
        );
        assert_eq!(
            shadow_subst(&q_var(Name(7)), &zero_code, &code).unwrap(),
            code
        );
    }

    #[test]
    fn subst_witness_pair() {
        let t = Term::eats(v(0), Term::eats(v(0), Term::zero()));
        let x = code_of_tm(&t);
        let u = code_of_tm(&Term::eats(Term::zero(), Term::zero()));
        let vcode = q_var(Name(0));
        let out = shadow_subst_term(&vcode, &u, &x).unwrap();
        let w = build_subst_term_witness(&vcode, &u, &x).unwrap();
        assert!(verify_subst_term_witness(&vcode, &u, &x, &out, &w.s, &w.k));
        // wrong output rejected
        assert!(!verify_subst_term_witness(&vcode, &u, &x, &x, &w.s, &w.k));
    }

    #[test]
    fn abst_witness_pair() {
        let f = Formula::ex(
            Name(1),
            Formula::mem(v(0), Term::eats(v(1), v(0))),
        );
        let x = code_of_fm(&f);
        let vcode = q_var(Name(0));
        let out = shadow_abst_form(&vcode, 0, &x).unwrap();
        let w = build_abst_form_witness(&vcode, 0, &x).unwrap();
        assert!(verify_abst_form_witness(&vcode, 0, &x, &out, &w.s, &w.k));
        assert!(!verify_abst_form_witness(&vcode, 0, &x, &x, &w.s, &w.k));
    }
}
