//! Tarski evaluation of terms and formulas in the standard HF model.
//!
//! Unbounded existentials are only semi-decidable, so evaluation is
//! three-valued: [`TriBool::Unknown`] reports budget exhaustion. Bounded
//! quantifiers written in the definitional All2 shape are decided exactly by
//! enumerating the children of the evaluated bound. Witness search for an
//! existential proceeds in three stages: solve equality/membership guards
//! that pin the witness down to finitely many candidates, consult an optional
//! [`WitnessHints`] provider, then enumerate the HF universe in Ackermann
//! order up to the budget.

use crate::hf_core::HfSet;
use crate::syntax::{
    as_all2, Formula, FormulaKind, Name, Term, TermKind,
};
use std::collections::HashMap;
use std::fmt;

/// Finite variable assignment; unmapped names read as 0.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Env {
    map: HashMap<Name, HfSet>,
}

impl Env {
    /// The null environment, mapping every variable to 0.
    pub fn e0() -> Env {
        Env::default()
    }

    pub fn get(&self, n: Name) -> HfSet {
        self.map.get(&n).cloned().unwrap_or_else(HfSet::empty)
    }

    pub fn bind(&self, n: Name, v: HfSet) -> Env {
        let mut map = self.map.clone();
        map.insert(n, v);
        Env { map }
    }

    pub fn values(&self) -> impl Iterator<Item = &HfSet> {
        self.map.values()
    }
}

/// Three-valued verdict; `Unknown` arises only from budget exhaustion at an
/// unbounded quantifier.
#[derive(Copy, Clone, Debug, PartialEq, Eq)]
pub enum TriBool {
    True,
    False,
    Unknown,
}

impl TriBool {
    pub fn from_bool(b: bool) -> TriBool {
        if b {
            TriBool::True
        } else {
            TriBool::False
        }
    }

    pub fn negate(self) -> TriBool {
        match self {
            TriBool::True => TriBool::False,
            TriBool::False => TriBool::True,
            TriBool::Unknown => TriBool::Unknown,
        }
    }

    pub fn or(self, other: TriBool) -> TriBool {
        match (self, other) {
            (TriBool::True, _) | (_, TriBool::True) => TriBool::True,
            (TriBool::False, TriBool::False) => TriBool::False,
            _ => TriBool::Unknown,
        }
    }

    pub fn is_true(self) -> bool {
        self == TriBool::True
    }
}

impl fmt::Display for TriBool {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            TriBool::True => f.write_str("true"),
            TriBool::False => f.write_str("false"),
            TriBool::Unknown => f.write_str("unknown"),
        }
    }
}

/// Supplies witness candidates for an existential from outside knowledge,
/// e.g. the provability tower's sequence builders.
pub trait WitnessHints {
    fn candidates(&self, var: Name, body: &Formula, env: &Env) -> Vec<HfSet>;
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ShapeMismatch {
    pub expected: usize,
    pub available: usize,
}

impl fmt::Display for ShapeMismatch {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "formula has {} outer existentials but {} witnesses were supplied",
            self.available, self.expected
        )
    }
}

impl std::error::Error for ShapeMismatch {}

/// Evaluates a term; total and exact.
pub fn eval_tm(env: &Env, t: &Term) -> HfSet {
    let mut memo = HashMap::new();
    eval_tm_memo(env, t, &mut memo)
}

// the memo owns its keyed terms so addresses stay valid across calls
fn eval_tm_memo(env: &Env, t: &Term, memo: &mut HashMap<usize, (Term, HfSet)>) -> HfSet {
    // ground subterms evaluate the same in every environment
    if t.is_ground() {
        if let Some((_, v)) = memo.get(&t.ptr_id()) {
            return v.clone();
        }
    }
    let v = match t.kind() {
        TermKind::Zero => HfSet::empty(),
        TermKind::Var(n) => env.get(*n),
        TermKind::Eats(a, b) => {
            let va = eval_tm_memo(env, a, memo);
            let vb = eval_tm_memo(env, b, memo);
            va.eats(&vb)
        }
    };
    if t.is_ground() {
        memo.insert(t.ptr_id(), (t.clone(), v.clone()));
    }
    v
}

pub struct Evaluator<'a> {
    budget: u64,
    hints: Option<&'a dyn WitnessHints>,
    ground_tm: HashMap<usize, (Term, HfSet)>,
}

impl<'a> Evaluator<'a> {
    pub fn new(budget: u64) -> Evaluator<'a> {
        Evaluator {
            budget: budget.max(1),
            hints: None,
            ground_tm: HashMap::new(),
        }
    }

    pub fn with_hints(budget: u64, hints: &'a dyn WitnessHints) -> Evaluator<'a> {
        Evaluator {
            budget: budget.max(1),
            hints: Some(hints),
            ground_tm: HashMap::new(),
        }
    }

    pub fn remaining_budget(&self) -> u64 {
        self.budget
    }

    fn spend(&mut self) -> bool {
        if self.budget == 0 {
            return false;
        }
        self.budget -= 1;
        true
    }

    pub fn term(&mut self, env: &Env, t: &Term) -> HfSet {
        eval_tm_memo(env, t, &mut self.ground_tm)
    }

    pub fn eval(&mut self, env: &Env, f: &Formula) -> TriBool {
        match f.kind() {
            FormulaKind::Mem(t, u) => {
                let vt = self.term(env, t);
                let vu = self.term(env, u);
                TriBool::from_bool(vu.mem(&vt))
            }
            FormulaKind::Eq(t, u) => {
                let vt = self.term(env, t);
                let vu = self.term(env, u);
                TriBool::from_bool(vt == vu)
            }
            FormulaKind::Disj(a, b) => {
                let ra = self.eval(env, a);
                if ra == TriBool::True {
                    return TriBool::True;
                }
                ra.or(self.eval(env, b))
            }
            FormulaKind::Neg(_) => {
                // the All2 pattern is decided exactly by enumerating the bound
                if let Some((i, t, body)) = as_all2(f) {
                    let bound = self.term(env, &t);
                    let mut verdict = TriBool::True;
                    for c in bound.children() {
                        let sub = env.bind(i, c.clone());
                        match self.eval(&sub, &body) {
                            TriBool::False => return TriBool::False,
                            TriBool::Unknown => verdict = TriBool::Unknown,
                            TriBool::True => {}
                        }
                    }
                    return verdict;
                }
                if let FormulaKind::Neg(a) = f.kind() {
                    self.eval(env, a).negate()
                } else {
                    unreachable!()
                }
            }
            FormulaKind::Ex(i, body) => self.eval_ex(env, *i, body),
        }
    }

    fn eval_ex(&mut self, env: &Env, i: Name, body: &Formula) -> TriBool {
        // Stage 1: guards that determine the witness exactly.
        if let Some(cands) = guard_candidates(self, env, i, body) {
            let mut verdict = TriBool::False;
            for c in cands {
                if !self.spend() {
                    return TriBool::Unknown;
                }
                match self.eval(&env.bind(i, c), body) {
                    TriBool::True => return TriBool::True,
                    TriBool::Unknown => verdict = TriBool::Unknown,
                    TriBool::False => {}
                }
            }
            // the guard enumerated every possible witness
            return verdict;
        }
        // Stage 2: hinted candidates.
        if let Some(h) = self.hints {
            let hinted = h.candidates(i, body, env);
            for c in hinted {
                if !self.spend() {
                    return TriBool::Unknown;
                }
                if self.eval(&env.bind(i, c), body) == TriBool::True {
                    return TriBool::True;
                }
            }
        }
        // Stage 3: Ackermann-ordered enumeration.
        let mut idx: u64 = 0;
        while self.spend() {
            let c = HfSet::ack_decode_u64(idx);
            if self.eval(&env.bind(i, c), body) == TriBool::True {
                return TriBool::True;
            }
            idx += 1;
        }
        TriBool::Unknown
    }
}

/// Tries to read a complete candidate set for `i` off a guard conjunct.
/// Returns `None` when no conjunct pins the witness down; a returned set is
/// exhaustive, so an all-false outcome refutes the existential. Conjuncts
/// under nested existentials participate as long as they do not mention the
/// inner binders.
fn guard_candidates(
    ev: &mut Evaluator,
    env: &Env,
    i: Name,
    body: &Formula,
) -> Option<Vec<HfSet>> {
    let mut found: Vec<(Formula, Vec<Name>)> = Vec::new();
    collect_guards(i, body, &mut Vec::new(), &mut found);
    for (conj, inner) in found {
        // variables bound by inner existentials match anything
        if let Some(mut cands) = guard_from(ev, env, i, &conj, &inner) {
            cands.sort();
            cands.dedup();
            return Some(cands);
        }
    }
    None
}

fn collect_guards(i: Name, f: &Formula, inner: &mut Vec<Name>, out: &mut Vec<(Formula, Vec<Name>)>) {
    if let Some((a, b)) = crate::syntax::as_and(f) {
        collect_guards(i, &a, inner, out);
        collect_guards(i, &b, inner, out);
        return;
    }
    if let FormulaKind::Ex(j, b) = f.kind() {
        if *j != i {
            inner.push(*j);
            collect_guards(i, b, inner, out);
            inner.pop();
        }
        return;
    }
    out.push((f.clone(), inner.clone()));
}

/// A single guard: an equality or membership that rigidly constrains `i`, a
/// disjunction of such guards (whose candidate sets combine), or a
/// conjunction containing one. Names in `wild` are bound by existentials
/// inside the guard's scope and match any value.
fn guard_from(
    ev: &mut Evaluator,
    env: &Env,
    i: Name,
    conj: &Formula,
    wild: &[Name],
) -> Option<Vec<HfSet>> {
    let has_wild = |t: &Term| t.free_vars().iter().any(|n| wild.contains(n));
    if let Some((a, b)) = crate::syntax::as_and(conj) {
        // either conjunct alone bounds the witnesses of the conjunction
        return guard_from(ev, env, i, &a, wild).or_else(|| guard_from(ev, env, i, &b, wild));
    }
    match conj.kind() {
        FormulaKind::Eq(t, u) => {
            let (pat, other) = if t.has_free(i) && !u.has_free(i) && !has_wild(u) {
                (t, u)
            } else if u.has_free(i) && !t.has_free(i) && !has_wild(t) {
                (u, t)
            } else {
                return None;
            };
            let target = ev.term(env, other);
            let mut binding = None;
            if match_term(ev, env, i, wild, pat, &target, &mut binding) {
                binding.map(|v| vec![v])
            } else {
                // no assignment can satisfy this conjunct
                Some(vec![])
            }
        }
        FormulaKind::Mem(t, u) => {
            if !t.has_free(i) || u.has_free(i) || has_wild(u) {
                return None;
            }
            let bound = ev.term(env, u);
            let mut out = Vec::new();
            for c in bound.children() {
                let mut binding = None;
                if match_term(ev, env, i, wild, t, c, &mut binding) {
                    match binding {
                        Some(v) => out.push(v),
                        // pattern matched without constraining i
                        None => return None,
                    }
                }
            }
            Some(out)
        }
        FormulaKind::Disj(a, b) => {
            let mut ca = guard_from(ev, env, i, a, wild)?;
            let cb = guard_from(ev, env, i, b, wild)?;
            ca.extend(cb);
            Some(ca)
        }
        _ => None,
    }
}

/// Matches a term pattern containing the unknown `i` against a value.
/// Supports the rigid shapes used throughout the predicate towers: zero,
/// variables, the Kuratowski pair spelling and the successor spelling.
/// Names in `wild` match any value. Returns false only when no assignment
/// of `i` (and the wildcards) can give the pattern this value.
fn match_term(
    ev: &mut Evaluator,
    env: &Env,
    i: Name,
    wild: &[Name],
    pat: &Term,
    value: &HfSet,
    binding: &mut Option<HfSet>,
) -> bool {
    let has_wild = pat.free_vars().iter().any(|n| wild.contains(n));
    if !pat.has_free(i) && !has_wild {
        return ev.term(env, pat) == *value;
    }
    match pat.kind() {
        TermKind::Var(n) if *n == i => match binding {
            Some(prev) => *prev == *value,
            None => {
                *binding = Some(value.clone());
                true
            }
        },
        TermKind::Var(n) if wild.contains(n) => true,
        _ => {
            if let Some((a, b)) = as_hpair_term(pat) {
                return match value.unpair() {
                    Ok((va, vb)) => {
                        match_term(ev, env, i, wild, &a, &va, binding)
                            && match_term(ev, env, i, wild, &b, &vb, binding)
                    }
                    Err(_) => false,
                };
            }
            if let Some(t) = as_succ_term(pat) {
                // succ t = t ◁ t: the value must be w ∪ {w} for w its largest child
                let Some(w) = value.children().last() else {
                    return false;
                };
                let rest = HfSet::from_children(
                    value.children()[..value.card() - 1].iter().cloned(),
                );
                if rest != *w && *value != w.eats(w) {
                    return false;
                }
                return match_term(ev, env, i, wild, &t, w, binding);
            }
            // other shapes are not rigidly invertible; give up on this guard
            // by reporting an unconstrained match
            true
        }
    }
}

/// Recognizes the exact `Term::hpair` spelling.
fn as_hpair_term(t: &Term) -> Option<(Term, Term)> {
    // hpair a b = ((0 <| (0 <| a)) <| ((0 <| a) <| b))
    if let TermKind::Eats(l, r) = t.kind() {
        if let (TermKind::Eats(zl, sa1), TermKind::Eats(sa2, b)) = (l.kind(), r.kind()) {
            if let TermKind::Zero = zl.kind() {
                if sa1 == sa2 {
                    if let TermKind::Eats(z2, a) = sa1.kind() {
                        if let TermKind::Zero = z2.kind() {
                            return Some((a.clone(), b.clone()));
                        }
                    }
                }
            }
        }
    }
    None
}

fn as_succ_term(t: &Term) -> Option<Term> {
    if let TermKind::Eats(a, b) = t.kind() {
        if a == b {
            return Some(a.clone());
        }
    }
    None
}

/// Evaluates a formula with the given witness budget.
pub fn eval_fm(env: &Env, f: &Formula, budget: u64) -> TriBool {
    Evaluator::new(budget).eval(env, f)
}

/// Binds the i-th outer existential to `witnesses[i]`, then evaluates the
/// remaining body.
pub fn eval_with_witness(
    env: &Env,
    f: &Formula,
    witnesses: &[HfSet],
    budget: u64,
) -> Result<TriBool, ShapeMismatch> {
    eval_with_witness_hinted(env, f, witnesses, budget, None)
}

/// Like [`eval_with_witness`] but consults a hint provider at inner
/// existentials; used to check predicate-tower formulas whose sequence
/// witnesses are constructed rather than searched for.
pub fn eval_with_witness_hinted(
    env: &Env,
    f: &Formula,
    witnesses: &[HfSet],
    budget: u64,
    hints: Option<&dyn WitnessHints>,
) -> Result<TriBool, ShapeMismatch> {
    let mut env = env.clone();
    let mut cur = f.clone();
    for (used, w) in witnesses.iter().enumerate() {
        match cur.kind() {
            FormulaKind::Ex(i, body) => {
                env = env.bind(*i, w.clone());
                cur = body.clone();
            }
            _ => {
                return Err(ShapeMismatch {
                    expected: witnesses.len(),
                    available: used,
                })
            }
        }
    }
    let mut ev = match hints {
        Some(h) => Evaluator::with_hints(budget, h),
        None => Evaluator::new(budget),
    };
    Ok(ev.eval(&env, &cur))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::syntax::{all2, fls, subst_fm, Formula, Term};

    fn v(n: u32) -> Term {
        Term::var(Name(n))
    }

    #[test]
    fn eval_tm_examples() {
        let e0 = Env::e0();
        assert_eq!(eval_tm(&e0, &Term::zero()), HfSet::empty());
        assert_eq!(eval_tm(&e0, &v(7)), HfSet::empty(), "null env maps all to 0");
        // 0 ◁ (0 ◁ 0) = {{0}}
        let t = Term::eats(Term::zero(), Term::eats(Term::zero(), Term::zero()));
        assert_eq!(
            eval_tm(&e0, &t),
            HfSet::from_children([HfSet::ord_of(1)])
        );
    }

    #[test]
    fn eval_fm_basics() {
        let e0 = Env::e0();
        assert_eq!(eval_fm(&e0, &fls(), 4), TriBool::False);
        // EX x0 . x0 EQ (0 <| 0): solved by the equality guard
        let f = Formula::ex(
            Name(0),
            Formula::eq(v(0), Term::eats(Term::zero(), Term::zero())),
        );
        assert_eq!(eval_fm(&e0, &f, 8), TriBool::True);
        // EX x0 . x0 IN x0: no witness, no refutation
        let g = Formula::ex(Name(0), Formula::mem(v(0), v(0)));
        assert_eq!(eval_fm(&e0, &g, 64), TriBool::Unknown);
    }

    #[test]
    fn bounded_quantifier_exact() {
        let e0 = Env::e0();
        // ALL2 x0 (0 <| 0) . x0 EQ 0 — the only element of {0} is 0
        let two = Term::eats(Term::zero(), Term::zero());
        let f = all2(Name(0), &two, Formula::eq(v(0), Term::zero())).unwrap();
        assert_eq!(eval_fm(&e0, &f, 4), TriBool::True);
        // ALL2 x0 (0 <| 0) . x0 IN 0 fails at the element 0
        let g = all2(Name(0), &two, Formula::mem(v(0), Term::zero())).unwrap();
        assert_eq!(eval_fm(&e0, &g, 4), TriBool::False);
    }

    #[test]
    fn membership_guard_refutes() {
        let e0 = Env::e0();
        // EX x0 . x0 IN 0 is exactly false: the bound has no children
        let f = Formula::ex(Name(0), Formula::mem(v(0), Term::zero()));
        assert_eq!(eval_fm(&e0, &f, 4), TriBool::False);
    }

    #[test]
    fn witness_injection() {
        let e0 = Env::e0();
        let f = Formula::ex(Name(0), Formula::eq(v(0), Term::zero()));
        assert_eq!(
            eval_with_witness(&e0, &f, &[HfSet::empty()], 8).unwrap(),
            TriBool::True
        );
        assert_eq!(
            eval_with_witness(&e0, &f, &[HfSet::ord_of(1)], 8).unwrap(),
            TriBool::False
        );
        assert!(eval_with_witness(&e0, &fls(), &[HfSet::empty()], 8).is_err());
    }

    #[test]
    fn hpair_guard_solving() {
        let e0 = Env::e0();
        // s = {⟨0, {0}⟩}; EX x0 . ⟨0, x0⟩ IN s, solved through pair matching
        let s = HfSet::from_children([HfSet::hpair(&HfSet::empty(), &HfSet::ord_of(1))]);
        let sv = Name(9);
        let env = e0.bind(sv, s);
        let pat = Term::hpair(Term::zero(), v(0));
        let f = Formula::ex(Name(0), Formula::mem(pat, v(9)));
        assert_eq!(eval_fm(&env, &f, 4), TriBool::True);
        let g = Formula::ex(
            Name(0),
            Formula::mem(Term::hpair(Term::ord_of(1), v(0)), v(9)),
        );
        assert_eq!(eval_fm(&env, &g, 4), TriBool::False, "no pair keyed by 1");
    }

    #[test]
    fn substitution_lemma_spot() {
        let e0 = Env::e0();
        let t = Term::eats(Term::zero(), Term::zero());
        let a = Formula::mem(Term::zero(), v(3));
        let lhs = eval_fm(&e0, &subst_fm(&a, Name(3), &t), 16);
        let rhs = eval_fm(&e0.bind(Name(3), eval_tm(&e0, &t)), &a, 16);
        assert_eq!(lhs, rhs);
    }
}
