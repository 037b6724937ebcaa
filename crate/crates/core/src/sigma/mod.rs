//! Strict Σ recognition, Σ-equivalence certification with kernel proof
//! objects, and synthesis of proofs for true ground Σ sentences.
//!
//! The atom reductions follow the mutual size recursion on membership and
//! subset: t ∈ 0 is provably false, t ∈ u₁◁u₂ splits through HF2, 0 ⊆ u is
//! provably true, t₁◁t₂ ⊆ u splits into a subset and a membership claim, and
//! equality splits into two subsets by extensionality. Bounded universals
//! over compound terms are rebased onto a fresh variable. A guard object
//! asserts that the recursion's size measure behaves as the termination
//! argument demands.

pub mod lemmas;

use crate::calculus::{
    all2_mono_iff, all_elim, all_intro, alpha_restate, and_cong_iff, both_false_iff,
    both_true_iff, conj_intro, deduction, disj_elim, disj_intro1, disj_intro2, eq_mem_cong,
    eq_subst_fm, eq_sym, ex_mono_iff, exfalso_from, exists_rule, hyp, iff_intro, iff_mp,
    iff_mp_rev, iff_refl, iff_trans, modus_tollens, mp, or_cong_iff, refl_of, special_axiom,
    KernelError, Theorem,
};
use crate::hf_core::HfSet;
use crate::semantics::{eval_fm, eval_tm, Env, TriBool};
use crate::syntax::{
    all2, and, as_all2, as_and, fresh_name, iff, imp, subset, subst_fm, Formula, FormulaKind,
    Name, Term, TermKind,
};
use lemmas::{
    all2_term_iff, eats_subset_iff, eq_subset_split, false_strict, false_strict_refuted,
    mem_eats_iff, mem_zero_refuted, subset_zero, true_strict, true_strict_proved,
};
use std::collections::HashMap;
use std::fmt;

// ---------------------------------------------------------------------------
// Strict Σ recognition
// ---------------------------------------------------------------------------

/// Strict Σ formulas: variable-variable membership closed under OR, AND, EX
/// and All2 over a variable bound that is fresh for the binder and the body.
pub fn is_strict_sigma(f: &Formula) -> bool {
    if let Some((a, b)) = as_and(f) {
        return is_strict_sigma(&a) && is_strict_sigma(&b);
    }
    if let Some((i, bound, body)) = as_all2(f) {
        if let TermKind::Var(j) = bound.kind() {
            return *j != i && !body.has_free(*j) && is_strict_sigma(&body);
        }
        return false;
    }
    match f.kind() {
        FormulaKind::Mem(t, u) => {
            matches!(t.kind(), TermKind::Var(_)) && matches!(u.kind(), TermKind::Var(_))
        }
        FormulaKind::Disj(a, b) => is_strict_sigma(a) && is_strict_sigma(b),
        FormulaKind::Ex(_, b) => is_strict_sigma(b),
        _ => false,
    }
}

// ---------------------------------------------------------------------------
// Certification
// ---------------------------------------------------------------------------

/// A strict Σ companion for a formula, with the kernel proof of equivalence.
#[derive(Clone, Debug)]
pub struct SigmaCert {
    pub original: Formula,
    pub strict: Formula,
    pub iff_proof: Theorem,
}

impl SigmaCert {
    /// Re-checks the advertised invariants.
    pub fn validate(&self) -> bool {
        is_strict_sigma(&self.strict)
            && self
                .strict
                .free_vars()
                .iter()
                .all(|n| self.original.free_vars().contains(n))
            && self.iff_proof.hyps().is_empty()
            && crate::syntax::alpha_eq(
                self.iff_proof.concl(),
                &iff(self.original.clone(), self.strict.clone()),
            )
    }
}

#[derive(Debug, Clone)]
pub enum SigmaError {
    UnsupportedShape(Formula),
    NonGroundInput(Formula),
    Kernel(KernelError),
}

impl fmt::Display for SigmaError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SigmaError::UnsupportedShape(g) => write!(f, "unsupported shape: {g}"),
            SigmaError::NonGroundInput(g) => write!(f, "non-ground input: {g}"),
            SigmaError::Kernel(e) => write!(f, "kernel: {e}"),
        }
    }
}

impl std::error::Error for SigmaError {}

impl From<KernelError> for SigmaError {
    fn from(e: KernelError) -> Self {
        SigmaError::Kernel(e)
    }
}

fn tsz(t: &Term) -> usize {
    t.tree_size() as usize
}

/// Instruments the atom recursion's termination argument: structural steps
/// must strictly shrink the size sum, and only boundedly many conversion
/// steps (equality splitting, flattening, bound rebasing) may intervene.
#[derive(Clone, Copy, Debug)]
struct MeasureGuard {
    last: usize,
    conversions: u32,
}

impl MeasureGuard {
    fn start(measure: usize) -> MeasureGuard {
        MeasureGuard {
            last: measure,
            conversions: 0,
        }
    }

    fn structural(self, new: usize) -> MeasureGuard {
        assert!(
            new < self.last,
            "atom recursion must shrink the size sum: {} -> {new}",
            self.last
        );
        MeasureGuard {
            last: new,
            conversions: 0,
        }
    }

    fn conversion(self, new: usize) -> MeasureGuard {
        assert!(
            new <= self.last,
            "conversion step grew the measure: {} -> {new}",
            self.last
        );
        let conversions = self.conversions + 1;
        assert!(
            conversions <= 4,
            "too many conversion steps without structural progress"
        );
        MeasureGuard {
            last: new,
            conversions,
        }
    }
}

/// Σ certification with memoized subresults; certificates for shared
/// subformulas are constructed once.
pub struct Certifier {
    memo: HashMap<usize, SigmaCert>,
}

impl Default for Certifier {
    fn default() -> Self {
        Certifier::new()
    }
}

impl Certifier {
    pub fn new() -> Certifier {
        Certifier {
            memo: HashMap::new(),
        }
    }

    pub fn cert(&mut self, f: &Formula) -> Result<SigmaCert, SigmaError> {
        if let Some(c) = self.memo.get(&f.ptr_id()) {
            return Ok(c.clone());
        }
        let out = self.cert_uncached(f)?;
        debug_assert!(out.validate(), "certificate invariants for {f}");
        self.memo.insert(f.ptr_id(), out.clone());
        Ok(out)
    }

    fn cert_uncached(&mut self, f: &Formula) -> Result<SigmaCert, SigmaError> {
        if is_strict_sigma(f) {
            return Ok(SigmaCert {
                original: f.clone(),
                strict: f.clone(),
                iff_proof: iff_refl(f),
            });
        }
        if let Some((x, y)) = as_and(f) {
            let cx = self.cert(&x)?;
            let cy = self.cert(&y)?;
            let strict = and(cx.strict.clone(), cy.strict.clone());
            let pf = and_cong_iff(&cx.iff_proof, &cy.iff_proof)?;
            return Ok(SigmaCert {
                original: f.clone(),
                strict,
                iff_proof: pf,
            });
        }
        if let Some((i, bound, body)) = as_all2(f) {
            return self.cert_all2(f, i, &bound, &body);
        }
        match f.kind() {
            FormulaKind::Disj(x, y) => {
                let cx = self.cert(x)?;
                let cy = self.cert(y)?;
                let strict = Formula::disj(cx.strict.clone(), cy.strict.clone());
                let pf = or_cong_iff(&cx.iff_proof, &cy.iff_proof)?;
                Ok(SigmaCert {
                    original: f.clone(),
                    strict,
                    iff_proof: pf,
                })
            }
            FormulaKind::Ex(i, b) => {
                let cb = self.cert(b)?;
                let strict = Formula::ex(*i, cb.strict.clone());
                let pf = ex_mono_iff(&cb.iff_proof, *i)?;
                Ok(SigmaCert {
                    original: f.clone(),
                    strict,
                    iff_proof: pf,
                })
            }
            FormulaKind::Mem(t, u) => {
                let g = MeasureGuard::start(tsz(t) + tsz(u) + 1);
                self.cert_mem(t, u, g.conversion(tsz(t) + tsz(u)))
            }
            FormulaKind::Eq(t, u) => {
                let g = MeasureGuard::start(tsz(t) + tsz(u) + 1);
                self.cert_eq(t, u, g.conversion(tsz(t) + tsz(u)))
            }
            FormulaKind::Neg(_) => Err(SigmaError::UnsupportedShape(f.clone())),
        }
    }

    fn cert_all2(
        &mut self,
        f: &Formula,
        i: Name,
        bound: &Term,
        body: &Formula,
    ) -> Result<SigmaCert, SigmaError> {
        let cbody = self.cert(body)?;
        if let TermKind::Var(j) = bound.kind() {
            if *j != i && !cbody.strict.has_free(*j) && !body.has_free(*j) {
                let strict = all2(i, bound, cbody.strict.clone())
                    .expect("binder distinct from the bound");
                let pf = all2_mono_iff(&cbody.iff_proof, i, bound)?;
                return Ok(SigmaCert {
                    original: f.clone(),
                    strict,
                    iff_proof: pf,
                });
            }
        }
        // rebase the bound onto a fresh variable
        let mut avoid: Vec<Name> = vec![i];
        avoid.extend_from_slice(bound.free_vars());
        avoid.extend_from_slice(body.free_vars());
        let j = fresh_name(&avoid);
        let bridge = all2_term_iff(i, bound, body, j);
        let rebased = Formula::ex(
            j,
            and(
                Formula::eq(Term::var(j), bound.clone()),
                all2(i, &Term::var(j), body.clone()).expect("j fresh"),
            ),
        );
        let crest = self.cert(&rebased)?;
        let pf = iff_trans(&bridge, &crest.iff_proof)?;
        Ok(SigmaCert {
            original: f.clone(),
            strict: crest.strict,
            iff_proof: pf,
        })
    }

    fn cert_mem(&mut self, t: &Term, u: &Term, g: MeasureGuard) -> Result<SigmaCert, SigmaError> {
        let f = Formula::mem(t.clone(), u.clone());
        match u.kind() {
            TermKind::Zero => {
                let strict = false_strict();
                let pf = both_false_iff(&mem_zero_refuted(t), false_strict_refuted())?;
                Ok(SigmaCert {
                    original: f,
                    strict,
                    iff_proof: pf,
                })
            }
            TermKind::Eats(u1, u2) => {
                let base = mem_eats_iff(t, u1, u2);
                let c1 = self.cert_mem(t, u1, g.structural(tsz(t) + tsz(u1)))?;
                let c2 = self.cert_eq(t, u2, g.structural(tsz(t) + tsz(u2)))?;
                let strict = Formula::disj(c1.strict.clone(), c2.strict.clone());
                let or_iff = or_cong_iff(&c1.iff_proof, &c2.iff_proof)?;
                let pf = iff_trans(&base, &or_iff)?;
                Ok(SigmaCert {
                    original: f,
                    strict,
                    iff_proof: pf,
                })
            }
            TermKind::Var(_) => {
                if matches!(t.kind(), TermKind::Var(_)) {
                    return Ok(SigmaCert {
                        original: f.clone(),
                        strict: f.clone(),
                        iff_proof: iff_refl(&f),
                    });
                }
                // flatten: t ∈ y ⟷ ∃x (x = t ∧ x ∈ y)
                let mut avoid: Vec<Name> = t.free_vars().to_vec();
                avoid.extend_from_slice(u.free_vars());
                let x = fresh_name(&avoid);
                let body = and(
                    Formula::eq(Term::var(x), t.clone()),
                    Formula::mem(Term::var(x), u.clone()),
                );

                let bridge = {
                    let fwd = {
                        let h = hyp(f.clone());
                        let witness = conj_intro(&refl_of(t), &h)?;
                        let sp = special_axiom(&body, x, t);
                        let inst = mp(&sp, &witness)?;
                        deduction(&inst, &f)
                    };
                    let bwd = {
                        let hb = hyp(body.clone());
                        let b1 = crate::calculus::conj_elim1(&hb)?;
                        let b2 = crate::calculus::conj_elim2(&hb)?;
                        let m = eq_mem_cong(&b1, &refl_of(u), &b2)?;
                        let d = deduction(&m, &body);
                        exists_rule(&d, x)?
                    };
                    iff_intro(&fwd, &bwd)?
                };
                let c_eq = self.cert_eq(&Term::var(x), t, g.conversion(1 + tsz(t)))?;
                let mem_atom = Formula::mem(Term::var(x), u.clone());
                let inner_iff = and_cong_iff(&c_eq.iff_proof, &iff_refl(&mem_atom))?;
                let ex_iff = ex_mono_iff(&inner_iff, x)?;
                let strict = Formula::ex(x, and(c_eq.strict.clone(), mem_atom));
                let pf = iff_trans(&bridge, &ex_iff)?;
                Ok(SigmaCert {
                    original: f,
                    strict,
                    iff_proof: pf,
                })
            }
        }
    }

    fn cert_eq(&mut self, t: &Term, u: &Term, g: MeasureGuard) -> Result<SigmaCert, SigmaError> {
        let f = Formula::eq(t.clone(), u.clone());
        let split = eq_subset_split(t, u);
        let measure = tsz(t) + tsz(u);
        let c1 = self.cert_subset(t, u, g.conversion(measure))?;
        let c2 = self.cert_subset(u, t, g.conversion(measure))?;
        let strict = and(c1.strict.clone(), c2.strict.clone());
        let and_iff = and_cong_iff(&c1.iff_proof, &c2.iff_proof)?;
        let pf = iff_trans(&split, &and_iff)?;
        Ok(SigmaCert {
            original: f,
            strict,
            iff_proof: pf,
        })
    }

    fn cert_subset(
        &mut self,
        t: &Term,
        u: &Term,
        g: MeasureGuard,
    ) -> Result<SigmaCert, SigmaError> {
        let f = subset(t, u);
        match t.kind() {
            TermKind::Zero => {
                let strict = true_strict();
                let pf = both_true_iff(&subset_zero(u), true_strict_proved())?;
                Ok(SigmaCert {
                    original: f,
                    strict,
                    iff_proof: pf,
                })
            }
            TermKind::Eats(t1, t2) => {
                let base = eats_subset_iff(t1, t2, u);
                let c1 = self.cert_subset(t1, u, g.structural(tsz(t1) + tsz(u)))?;
                let c2 = self.cert_mem(t2, u, g.structural(tsz(t2) + tsz(u)))?;
                let strict = and(c1.strict.clone(), c2.strict.clone());
                let and_iff = and_cong_iff(&c1.iff_proof, &c2.iff_proof)?;
                let pf = iff_trans(&base, &and_iff)?;
                Ok(SigmaCert {
                    original: f,
                    strict,
                    iff_proof: pf,
                })
            }
            TermKind::Var(_) => {
                // the subset formula is itself a bounded universal; certify it
                // through the general All2 machinery
                let (i, bound, body) = as_all2(&f).expect("subset is an All2");
                self.cert_all2(&f, i, &bound, &body)
            }
        }
    }
}

/// Certifies a formula of the supported Σ grammar.
pub fn sigma_cert(f: &Formula) -> Result<SigmaCert, SigmaError> {
    Certifier::new().cert(f)
}

// ---------------------------------------------------------------------------
// Ground atom synthesis
// ---------------------------------------------------------------------------

#[derive(Copy, Clone, Debug, PartialEq, Eq)]
pub enum AtomKind {
    In,
    Eq,
    Subs,
}

/// Verdict for a ground atom: either a proof or a proof of the negation.
#[derive(Clone, Debug)]
pub enum AtomVerdict {
    Proved(Theorem),
    Refuted(Theorem),
}

impl AtomVerdict {
    pub fn theorem(&self) -> &Theorem {
        match self {
            AtomVerdict::Proved(t) | AtomVerdict::Refuted(t) => t,
        }
    }
}

/// Decides a ground atom and synthesizes the corresponding kernel proof,
/// by the mutual recursion on term sizes.
pub fn prove_ground_atom(t: &Term, u: &Term, kind: AtomKind) -> Result<AtomVerdict, SigmaError> {
    if !t.is_ground() {
        return Err(SigmaError::NonGroundInput(Formula::eq(t.clone(), t.clone())));
    }
    if !u.is_ground() {
        return Err(SigmaError::NonGroundInput(Formula::eq(u.clone(), u.clone())));
    }
    let e0 = Env::e0();
    let vt = eval_tm(&e0, t);
    let vu = eval_tm(&e0, u);
    Ok(match kind {
        AtomKind::In => {
            if vu.mem(&vt) {
                AtomVerdict::Proved(prove_in(t, &vt, u, &vu)?)
            } else {
                AtomVerdict::Refuted(refute_in(t, &vt, u, &vu)?)
            }
        }
        AtomKind::Eq => {
            if vt == vu {
                AtomVerdict::Proved(prove_eq(t, &vt, u, &vu)?)
            } else {
                AtomVerdict::Refuted(refute_eq(t, &vt, u, &vu)?)
            }
        }
        AtomKind::Subs => {
            if vt.subset(&vu) {
                AtomVerdict::Proved(prove_subs(t, &vt, u, &vu)?)
            } else {
                AtomVerdict::Refuted(refute_subs(t, &vt, u, &vu)?)
            }
        }
    })
}

fn prove_in(t: &Term, vt: &HfSet, u: &Term, vu: &HfSet) -> Result<Theorem, SigmaError> {
    debug_assert!(vu.mem(vt));
    match u.kind() {
        TermKind::Eats(u1, u2) => {
            let e0 = Env::e0();
            let vu2 = eval_tm(&e0, u2);
            let base = mem_eats_iff(t, u1, u2);
            if *vt == vu2 {
                let p = prove_eq(t, vt, u2, &vu2)?;
                let d = disj_intro2(&p, &Formula::mem(t.clone(), u1.clone()))?;
                Ok(iff_mp_rev(&base, &d)?)
            } else {
                let vu1 = eval_tm(&e0, u1);
                let p = prove_in(t, vt, u1, &vu1)?;
                let d = disj_intro1(&p, &Formula::eq(t.clone(), u2.clone()))?;
                Ok(iff_mp_rev(&base, &d)?)
            }
        }
        _ => Err(SigmaError::UnsupportedShape(Formula::mem(
            t.clone(),
            u.clone(),
        ))),
    }
}

fn refute_in(t: &Term, vt: &HfSet, u: &Term, vu: &HfSet) -> Result<Theorem, SigmaError> {
    debug_assert!(!vu.mem(vt));
    match u.kind() {
        TermKind::Zero => Ok(mem_zero_refuted(t)),
        TermKind::Eats(u1, u2) => {
            let e0 = Env::e0();
            let vu1 = eval_tm(&e0, u1);
            let vu2 = eval_tm(&e0, u2);
            let base = mem_eats_iff(t, u1, u2);
            let r1 = refute_in(t, vt, u1, &vu1)?;
            let r2 = refute_eq(t, vt, u2, &vu2)?;
            let p = Formula::mem(t.clone(), u1.clone());
            let q = Formula::eq(t.clone(), u2.clone());
            let neg_disj = mp(&mp(&crate::calculus::demorgan_fm(&p, &q), &r1)?, &r2)?;
            Ok(modus_tollens(&crate::calculus::conj_elim1(&base)?, &neg_disj)?)
        }
        TermKind::Var(_) => Err(SigmaError::NonGroundInput(Formula::mem(
            t.clone(),
            u.clone(),
        ))),
    }
}

fn prove_eq(t: &Term, vt: &HfSet, u: &Term, vu: &HfSet) -> Result<Theorem, SigmaError> {
    let s1 = prove_subs(t, vt, u, vu)?;
    let s2 = prove_subs(u, vu, t, vt)?;
    Ok(lemmas::ext_rule(&s1, &s2)?)
}

fn refute_eq(t: &Term, vt: &HfSet, u: &Term, vu: &HfSet) -> Result<Theorem, SigmaError> {
    debug_assert!(vt != vu);
    // a witness separating the two sides
    if let Some(w) = vt.children().iter().find(|c| !vu.mem(c)) {
        let wt = hfset_to_term(w);
        let pm = prove_in(&wt, w, t, vt)?;
        let rm = refute_in(&wt, w, u, vu)?;
        let eq_f = Formula::eq(t.clone(), u.clone());
        let h = hyp(eq_f.clone());
        let moved = eq_mem_cong(&refl_of(&wt), &h, &pm)?;
        let d = deduction(&moved, &eq_f);
        Ok(modus_tollens(&d, &rm)?)
    } else {
        // the separating witness lies on the other side
        let r = refute_eq(u, vu, t, vt)?;
        let eq_f = Formula::eq(t.clone(), u.clone());
        let h = hyp(eq_f.clone());
        let sym = eq_sym(&h)?;
        let d = deduction(&sym, &eq_f);
        Ok(modus_tollens(&d, &r)?)
    }
}

fn prove_subs(t: &Term, vt: &HfSet, u: &Term, vu: &HfSet) -> Result<Theorem, SigmaError> {
    match t.kind() {
        TermKind::Zero => Ok(subset_zero(u)),
        TermKind::Eats(t1, t2) => {
            let e0 = Env::e0();
            let vt1 = eval_tm(&e0, t1);
            let vt2 = eval_tm(&e0, t2);
            let base = eats_subset_iff(t1, t2, u);
            let p1 = prove_subs(t1, &vt1, u, vu)?;
            let p2 = prove_in(t2, &vt2, u, vu)?;
            Ok(iff_mp_rev(&base, &conj_intro(&p1, &p2)?)?)
        }
        TermKind::Var(_) => {
            let _ = (vt, vu);
            Err(SigmaError::NonGroundInput(subset(t, u)))
        }
    }
}

fn refute_subs(t: &Term, vt: &HfSet, u: &Term, vu: &HfSet) -> Result<Theorem, SigmaError> {
    let w = vt
        .children()
        .iter()
        .find(|c| !vu.mem(c))
        .expect("subset fails, so a witness exists");
    let wt = hfset_to_term(w);
    let pm = prove_in(&wt, w, t, vt)?;
    let rm = refute_in(&wt, w, u, vu)?;
    let sub_f = subset(t, u);
    let h = hyp(sub_f.clone());
    let inst = mp(&all_elim(&h, &wt)?, &pm)?;
    let d = deduction(&inst, &sub_f);
    Ok(modus_tollens(&d, &rm)?)
}

// ---------------------------------------------------------------------------
// Σ sentence synthesis
// ---------------------------------------------------------------------------

/// Outcome of Σ synthesis. `Refuted` reports a finite refutation found by
/// exact evaluation; `NotEstablished` means the budget ran out first.
#[derive(Clone, Debug)]
pub enum SigmaOutcome {
    Proved(Theorem),
    Refuted,
    NotEstablished,
}

impl SigmaOutcome {
    pub fn proof(&self) -> Option<&Theorem> {
        match self {
            SigmaOutcome::Proved(t) => Some(t),
            _ => None,
        }
    }
}

/// Proves a true ground Σ sentence in the kernel, searching existential
/// witnesses in Ackermann order within the budget.
pub fn prove_true_sigma(f: &Formula, budget: u64) -> Result<SigmaOutcome, SigmaError> {
    if !f.is_ground() {
        return Err(SigmaError::NonGroundInput(f.clone()));
    }
    go_sigma(f, budget)
}

fn go_sigma(f: &Formula, budget: u64) -> Result<SigmaOutcome, SigmaError> {
    if let Some((x, y)) = as_and(f) {
        return Ok(match (go_sigma(&x, budget)?, go_sigma(&y, budget)?) {
            (SigmaOutcome::Proved(a), SigmaOutcome::Proved(b)) => {
                SigmaOutcome::Proved(conj_intro(&a, &b)?)
            }
            (SigmaOutcome::Refuted, _) | (_, SigmaOutcome::Refuted) => SigmaOutcome::Refuted,
            _ => SigmaOutcome::NotEstablished,
        });
    }
    if let Some((i, bound, body)) = as_all2(f) {
        return prove_all2(f, i, &bound, &body, budget);
    }
    match f.kind() {
        FormulaKind::Mem(t, u) => atom_outcome(t, u, AtomKind::In),
        FormulaKind::Eq(t, u) => atom_outcome(t, u, AtomKind::Eq),
        FormulaKind::Disj(x, y) => {
            let rx = go_sigma(x, budget)?;
            if let SigmaOutcome::Proved(t) = rx {
                return Ok(SigmaOutcome::Proved(disj_intro1(&t, y)?));
            }
            let ry = go_sigma(y, budget)?;
            if let SigmaOutcome::Proved(t) = ry {
                return Ok(SigmaOutcome::Proved(disj_intro2(&t, x)?));
            }
            Ok(match (rx, ry) {
                (SigmaOutcome::Refuted, SigmaOutcome::Refuted) => SigmaOutcome::Refuted,
                _ => SigmaOutcome::NotEstablished,
            })
        }
        FormulaKind::Ex(i, body) => prove_ex(f, *i, body, budget),
        FormulaKind::Neg(_) => Err(SigmaError::UnsupportedShape(f.clone())),
    }
}

fn atom_outcome(t: &Term, u: &Term, kind: AtomKind) -> Result<SigmaOutcome, SigmaError> {
    Ok(match prove_ground_atom(t, u, kind)? {
        AtomVerdict::Proved(p) => SigmaOutcome::Proved(p),
        AtomVerdict::Refuted(_) => SigmaOutcome::Refuted,
    })
}

/// Bounded universal over a ground bound: effectively expanded to a
/// conjunction over the bound's eats-spine, then reassembled.
fn prove_all2(
    f: &Formula,
    i: Name,
    bound: &Term,
    body: &Formula,
    budget: u64,
) -> Result<SigmaOutcome, SigmaError> {
    // prove body(i := e) for every element term on the bound's spine
    let mut spine = Vec::new();
    collect_spine(bound, &mut spine)?;
    let mut instances: Vec<(Term, Theorem)> = Vec::new();
    for e in spine {
        let inst = subst_fm(body, i, &e);
        match go_sigma(&inst, budget)? {
            SigmaOutcome::Proved(t) => instances.push((e, t)),
            SigmaOutcome::Refuted => return Ok(SigmaOutcome::Refuted),
            SigmaOutcome::NotEstablished => return Ok(SigmaOutcome::NotEstablished),
        }
    }
    // {i ∈ bound} ⊢ body, by cases over the structure of the bound
    let derive = derive_from_membership(i, bound, body, &instances)?;
    let d = deduction(&derive, &Formula::mem(Term::var(i), bound.clone()));
    let gen = all_intro(&d, i)?;
    let restated = alpha_restate(&gen, f)?;
    Ok(SigmaOutcome::Proved(restated))
}

fn collect_spine(bound: &Term, out: &mut Vec<Term>) -> Result<(), SigmaError> {
    match bound.kind() {
        TermKind::Zero => Ok(()),
        TermKind::Eats(b1, b2) => {
            collect_spine(b1, out)?;
            out.push(b2.clone());
            Ok(())
        }
        TermKind::Var(_) => Err(SigmaError::NonGroundInput(Formula::eq(
            bound.clone(),
            bound.clone(),
        ))),
    }
}

fn derive_from_membership(
    i: Name,
    bound: &Term,
    body: &Formula,
    instances: &[(Term, Theorem)],
) -> Result<Theorem, SigmaError> {
    let vi = Term::var(i);
    let goal = body.clone();
    match bound.kind() {
        TermKind::Zero => {
            let h = hyp(Formula::mem(vi.clone(), Term::zero()));
            Ok(exfalso_from(&h, &mem_zero_refuted(&vi), &goal)?)
        }
        TermKind::Eats(b1, b2) => {
            let h = hyp(Formula::mem(vi.clone(), bound.clone()));
            let cases = iff_mp(&mem_eats_iff(&vi, b1, b2), &h)?;
            let case1 = {
                let rec = derive_from_membership(i, b1, body, instances)?;
                deduction(&rec, &Formula::mem(vi.clone(), b1.clone()))
            };
            let case2 = {
                let eq_f = Formula::eq(vi.clone(), b2.clone());
                let he = hyp(eq_f.clone());
                let proven = instances
                    .iter()
                    .find(|(e, _)| e == b2)
                    .map(|(_, t)| t.clone())
                    .expect("instance proved for every spine element");
                // body(i := b2) IMP body along b2 = i
                let r = eq_subst_fm(&eq_sym(&he)?, body, i)?;
                let r = alpha_restate(&r, &imp(proven.concl().clone(), goal.clone()))?;
                deduction(&mp(&r, &proven)?, &eq_f)
            };
            Ok(disj_elim(&cases, &case1, &case2)?)
        }
        TermKind::Var(_) => Err(SigmaError::NonGroundInput(bound.clone().into_formula())),
    }
}

fn prove_ex(f: &Formula, i: Name, body: &Formula, budget: u64) -> Result<SigmaOutcome, SigmaError> {
    let e0 = Env::e0();
    // equality and membership guards give witness candidates directly
    let mut candidates: Vec<HfSet> = Vec::new();
    collect_guard_candidates(i, body, &mut candidates);
    let mut tried = 0u64;
    let try_witness = |w: &HfSet| -> Result<Option<Theorem>, SigmaError> {
        let wt = hfset_to_term(w);
        let inst = subst_fm(body, i, &wt);
        if eval_fm(&e0, &inst, budget) != TriBool::True {
            return Ok(None);
        }
        match go_sigma(&inst, budget)? {
            SigmaOutcome::Proved(p) => {
                let sp = special_axiom(body, i, &wt);
                Ok(Some(mp(&sp, &p)?))
            }
            _ => Ok(None),
        }
    };
    for w in &candidates {
        if let Some(t) = try_witness(w)? {
            return Ok(SigmaOutcome::Proved(t));
        }
        tried += 1;
    }
    let mut idx = 0u64;
    while tried < budget {
        let w = HfSet::ack_decode_u64(idx);
        if let Some(t) = try_witness(&w)? {
            return Ok(SigmaOutcome::Proved(t));
        }
        idx += 1;
        tried += 1;
    }
    // fall back on exact evaluation for a refutation verdict
    Ok(match eval_fm(&e0, f, budget) {
        TriBool::False => SigmaOutcome::Refuted,
        _ => SigmaOutcome::NotEstablished,
    })
}

fn collect_guard_candidates(i: Name, body: &Formula, out: &mut Vec<HfSet>) {
    let e0 = Env::e0();
    let conjs = conjuncts_of(body);
    for c in conjs {
        match c.kind() {
            FormulaKind::Eq(a, b) => {
                if let TermKind::Var(v) = a.kind() {
                    if *v == i && !b.has_free(i) && b.is_ground() {
                        out.push(eval_tm(&e0, b));
                    }
                }
                if let TermKind::Var(v) = b.kind() {
                    if *v == i && !a.has_free(i) && a.is_ground() {
                        out.push(eval_tm(&e0, a));
                    }
                }
            }
            FormulaKind::Mem(a, b) => {
                if let TermKind::Var(v) = a.kind() {
                    if *v == i && !b.has_free(i) && b.is_ground() {
                        out.extend(eval_tm(&e0, b).children().iter().cloned());
                    }
                }
            }
            _ => {}
        }
    }
}

fn conjuncts_of(f: &Formula) -> Vec<Formula> {
    match as_and(f) {
        Some((a, b)) => {
            let mut v = conjuncts_of(&a);
            v.extend(conjuncts_of(&b));
            v
        }
        None => vec![f.clone()],
    }
}

// ---------------------------------------------------------------------------
// Canonical ground terms
// ---------------------------------------------------------------------------

/// The canonical ground term denoting a set: children in ascending order,
/// folded with eats. Shared subvalues yield shared subterms.
pub fn hfset_to_term(x: &HfSet) -> Term {
    let mut memo: HashMap<HfSet, Term> = HashMap::new();
    hfset_to_term_memo(x, &mut memo)
}

pub(crate) fn hfset_to_term_memo(x: &HfSet, memo: &mut HashMap<HfSet, Term>) -> Term {
    if let Some(t) = memo.get(x) {
        return t.clone();
    }
    let mut t = Term::zero();
    for c in x.children() {
        let ct = hfset_to_term_memo(c, memo);
        t = Term::eats(t, ct);
    }
    memo.insert(x.clone(), t.clone());
    t
}

// small helper so error construction above stays terse
trait IntoFormula {
    fn into_formula(self) -> Formula;
}

impl IntoFormula for Term {
    fn into_formula(self) -> Formula {
        Formula::eq(self.clone(), self)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::calculus::check_proof;
    use crate::syntax::alpha_eq;

    fn v(n: u32) -> Term {
        Term::var(Name(n))
    }

    #[test]
    fn strict_recognition() {
        let i = Name(0);
        let j = Name(1);
        assert!(is_strict_sigma(&Formula::mem(v(0), v(1))));
        assert!(!is_strict_sigma(&Formula::eq(v(0), v(1))));
        // j free in the body violates the freshness stipulation
        let bad = all2(i, &v(1), Formula::mem(v(0), v(1))).unwrap();
        assert!(!is_strict_sigma(&bad));
        let good = all2(i, &v(1), Formula::mem(v(0), v(2))).unwrap();
        assert!(is_strict_sigma(&good));
        let _ = j;
        assert!(is_strict_sigma(&true_strict()));
        assert!(is_strict_sigma(&false_strict()));
    }

    #[test]
    fn cert_examples() {
        // already strict: unchanged
        let f = Formula::mem(v(0), v(1));
        let c = sigma_cert(&f).unwrap();
        assert_eq!(c.strict, f);
        assert!(c.validate());

        // 0 ⊆ u reduces through the true base
        let g = subset(&Term::zero(), &v(3));
        let c = sigma_cert(&g).unwrap();
        assert!(c.validate());
        assert!(check_proof(c.iff_proof.tree()).is_ok());

        // unsupported shape
        assert!(matches!(
            sigma_cert(&Formula::neg(crate::syntax::fls())),
            Err(SigmaError::UnsupportedShape(_))
        ));
    }

    #[test]
    fn cert_compound_atoms() {
        // (0 <| 0) ∈ x1 flattens; x0 EQ x1 splits into subsets
        for f in [
            Formula::mem(Term::eats(Term::zero(), Term::zero()), v(1)),
            Formula::eq(v(0), v(1)),
            Formula::mem(Term::zero(), Term::eats(v(1), Term::zero())),
        ] {
            let c = sigma_cert(&f).unwrap();
            assert!(c.validate(), "invalid certificate for {f}");
        }
    }

    #[test]
    fn ground_atom_synthesis() {
        let zero = Term::zero();
        let one = Term::eats(zero.clone(), zero.clone());
        let two = Term::eats(one.clone(), one.clone());
        // 0 ∈ {0}
        match prove_ground_atom(&zero, &one, AtomKind::In).unwrap() {
            AtomVerdict::Proved(t) => {
                assert!(t.hyps().is_empty());
                assert_eq!(*t.concl(), Formula::mem(zero.clone(), one.clone()));
            }
            _ => panic!("expected a proof"),
        }
        // 0 ⊆ 0
        match prove_ground_atom(&zero, &zero, AtomKind::Subs).unwrap() {
            AtomVerdict::Proved(t) => assert!(t.hyps().is_empty()),
            _ => panic!("expected a proof"),
        }
        // {0} ∈ 0 refuted with a negation proof
        match prove_ground_atom(&one, &zero, AtomKind::In).unwrap() {
            AtomVerdict::Refuted(t) => {
                assert_eq!(
                    *t.concl(),
                    Formula::neg(Formula::mem(one.clone(), zero.clone()))
                );
            }
            _ => panic!("expected a refutation"),
        }
        // {0} = {{0}} refuted
        let nested = Term::eats(zero.clone(), one.clone());
        match prove_ground_atom(&one, &nested, AtomKind::Eq).unwrap() {
            AtomVerdict::Refuted(t) => assert!(t.hyps().is_empty()),
            _ => panic!("expected a refutation"),
        }
        let _ = two;
    }

    #[test]
    fn sigma_synthesis_examples() {
        let zero = Term::zero();
        let one = Term::eats(zero.clone(), zero.clone());
        // EX x0 . x0 EQ 0
        let f = Formula::ex(Name(0), Formula::eq(v(0), zero.clone()));
        match prove_true_sigma(&f, 64).unwrap() {
            SigmaOutcome::Proved(t) => {
                assert!(t.hyps().is_empty());
                assert!(alpha_eq(t.concl(), &f));
                assert!(check_proof(t.tree()).is_ok());
            }
            _ => panic!("expected a proof"),
        }
        // {0} ⊆ {0} ∪ {0} (i.e. {0} ⊆ ({0} ◁ 0))
        let bigger = Term::eats(one.clone(), zero.clone());
        let g = subset(&one, &bigger);
        assert!(matches!(
            prove_true_sigma(&g, 64).unwrap(),
            SigmaOutcome::Proved(_)
        ));
        // false atom
        assert!(matches!(
            prove_true_sigma(&crate::syntax::fls(), 16).unwrap(),
            SigmaOutcome::Refuted
        ));
        // bounded universal over a ground set
        let h = all2(
            Name(0),
            &Term::eats(Term::eats(zero.clone(), zero.clone()), one.clone()),
            subset(&v(0), &one),
        )
        .unwrap();
        match prove_true_sigma(&h, 64).unwrap() {
            SigmaOutcome::Proved(t) => assert!(alpha_eq(t.concl(), &h)),
            other => panic!("expected a proof, got {other:?}"),
        }
    }

    #[test]
    fn hfset_term_round_trip() {
        let e0 = Env::e0();
        assert_eq!(hfset_to_term(&HfSet::empty()), Term::zero());
        let two = HfSet::ord_of(2);
        let t = hfset_to_term(&two);
        assert_eq!(eval_tm(&e0, &t), two);
        // ord 2 = 0 ◁ 0 ◁ {0}, built in canonical ascending order
        let expected = Term::eats(
            Term::eats(Term::zero(), Term::zero()),
            Term::eats(Term::zero(), Term::zero()),
        );
        assert_eq!(t, expected);
        for n in [0u64, 3, 7, 20, 100] {
            let x = HfSet::ack_decode_u64(n);
            assert_eq!(eval_tm(&e0, &hfset_to_term(&x)), x);
        }
    }
}
