//! Derived rules, built entirely from the kernel primitives.
//!
//! The bootstrap follows the usual path for a disjunction/negation Hilbert
//! system: resolution on the leading disjunct (`disj_cut`), commutation and
//! association as rules, then the S-rule (distribution of an antecedent over
//! an implication), from which the formula-level commutation and monotonicity
//! lemmas follow. On top of that sit a small tautology engine, the deduction
//! theorem as a proof transformer, quantifier rules and equality congruence.

use super::kernel::{
    self, boolean_axiom, equality_axiom, mp, special_axiom, BoolAxiom, EqAxiom,
    KernelError, Theorem,
};
use crate::syntax::{
    as_all, as_all2, as_and, as_imp, as_iff, alpha_eq, fresh_name, imp, subst_fm,
    subst_tm, Formula, FormulaKind, Name, Term, TermKind,
};
use std::collections::HashMap;
use std::sync::Arc;

fn shape(msg: impl Into<String>) -> KernelError {
    KernelError::ShapeMismatch(msg.into())
}

fn split_disj(f: &Formula) -> Result<(Formula, Formula), KernelError> {
    match f.kind() {
        FormulaKind::Disj(a, b) => Ok((a.clone(), b.clone())),
        _ => Err(shape(format!("expected a disjunction, got {f}"))),
    }
}

fn split_imp(f: &Formula) -> Result<(Formula, Formula), KernelError> {
    as_imp(f).ok_or_else(|| shape(format!("expected an implication, got {f}")))
}

/// Resolution on the head disjunct: from C ∨ A and (NEG C) ∨ B infer A ∨ B.
pub fn disj_cut(t1: &Theorem, t2: &Theorem) -> Result<Theorem, KernelError> {
    let (c, a) = split_disj(t1.concl())?;
    let (nc, b) = split_disj(t2.concl())?;
    match nc.kind() {
        FormulaKind::Neg(c2) if alpha_eq(&c, c2) => {}
        _ => return Err(shape(format!("disj_cut: {nc} does not negate {c}"))),
    }
    let ax = boolean_axiom(BoolAxiom::DisjConj, &[c, a, b])?;
    mp(&mp(&ax, t1)?, t2)
}

/// From A ∨ B infer B ∨ A.
pub fn commute_rule(t: &Theorem) -> Result<Theorem, KernelError> {
    let (a, _) = split_disj(t.concl())?;
    let ident = boolean_axiom(BoolAxiom::Ident, &[a])?;
    disj_cut(t, &ident)
}

/// From A infer A ∨ B.
pub fn weaken_r(t: &Theorem, b: &Formula) -> Result<Theorem, KernelError> {
    let ax = boolean_axiom(BoolAxiom::DisjI1, &[t.concl().clone(), b.clone()])?;
    mp(&ax, t)
}

/// From B infer A ∨ B.
pub fn weaken_l(t: &Theorem, a: &Formula) -> Result<Theorem, KernelError> {
    commute_rule(&weaken_r(t, a)?)
}

/// From A ∨ A infer A.
pub fn contract(t: &Theorem) -> Result<Theorem, KernelError> {
    let (a, a2) = split_disj(t.concl())?;
    if !alpha_eq(&a, &a2) {
        return Err(shape("contract: disjuncts differ"));
    }
    mp(&boolean_axiom(BoolAxiom::DisjCont, &[a])?, t)
}

/// From A ∨ (B ∨ C) infer (A ∨ B) ∨ C.
pub fn assoc_r(t: &Theorem) -> Result<Theorem, KernelError> {
    let (a, bc) = split_disj(t.concl())?;
    let (b, c) = split_disj(&bc)?;
    mp(&boolean_axiom(BoolAxiom::DisjAssoc, &[a, b, c])?, t)
}

/// From (A ∨ B) ∨ C infer A ∨ (B ∨ C).
pub fn assoc_l(t: &Theorem) -> Result<Theorem, KernelError> {
    // three rotations
    let t = assoc_r(&commute_rule(t)?)?;
    let t = assoc_r(&commute_rule(&t)?)?;
    commute_rule(&t)
}

/// From A ∨ B and B IMP C infer A ∨ C.
pub fn mono_right(t1: &Theorem, t2: &Theorem) -> Result<Theorem, KernelError> {
    disj_cut(&commute_rule(t1)?, t2)
}

/// From A ∨ B and A IMP C infer C ∨ B.
pub fn mono_left(t1: &Theorem, t2: &Theorem) -> Result<Theorem, KernelError> {
    commute_rule(&mono_right(&commute_rule(t1)?, t2)?)
}

/// ⊢ A IMP NEG NEG A.
pub fn dneg_intro_fm(a: &Formula) -> Theorem {
    let ident = boolean_axiom(BoolAxiom::Ident, &[Formula::neg(a.clone())])
        .expect("arity 1");
    commute_rule(&ident).expect("ident is a disjunction")
}

/// ⊢ NEG NEG A IMP A.
pub fn dneg_elim_fm(a: &Formula) -> Theorem {
    let ident = boolean_axiom(BoolAxiom::Ident, &[a.clone()]).expect("arity 1");
    let t = commute_rule(&ident).expect("disj");
    let t = mono_right(&t, &dneg_intro_fm(&Formula::neg(a.clone()))).expect("shapes line up");
    commute_rule(&t).expect("disj")
}

/// From C IMP (A IMP B) and C IMP A infer C IMP B.
pub fn s_rule(d1: &Theorem, d2: &Theorem) -> Result<Theorem, KernelError> {
    let (c, ab) = split_imp(d1.concl())?;
    let (a, _b) = split_imp(&ab)?;
    let (c2, a2) = split_imp(d2.concl())?;
    if !alpha_eq(&c, &c2) || !alpha_eq(&a, &a2) {
        return Err(shape("s_rule: premises do not align"));
    }
    let e = assoc_r(d1)?; // (¬C ∨ ¬A) ∨ B
    let e = commute_rule(&e)?; // B ∨ (¬C ∨ ¬A)
    let e = assoc_r(&e)?; // (B ∨ ¬C) ∨ ¬A
    let e = commute_rule(&e)?; // ¬A ∨ (B ∨ ¬C)
    let f = commute_rule(d2)?; // A ∨ ¬C
    let g = disj_cut(&f, &e)?; // ¬C ∨ (B ∨ ¬C)
    let g = assoc_r(&g)?; // (¬C ∨ B) ∨ ¬C
    let g = commute_rule(&g)?; // ¬C ∨ (¬C ∨ B)
    let g = assoc_r(&g)?; // (¬C ∨ ¬C) ∨ B
    let nc = Formula::neg(c);
    let cont = boolean_axiom(BoolAxiom::DisjCont, &[nc])?;
    mono_left(&g, &cont)
}

/// ⊢ (X ∨ Y) IMP (Y ∨ X).
pub fn commute_fm(x: &Formula, y: &Formula) -> Theorem {
    let a5 = boolean_axiom(
        BoolAxiom::DisjConj,
        &[x.clone(), y.clone(), x.clone()],
    )
    .expect("arity 3");
    let ident = boolean_axiom(BoolAxiom::Ident, &[x.clone()]).expect("arity 1");
    let xy = Formula::disj(x.clone(), y.clone());
    let prem2 = commute_rule(&weaken_r(&ident, &Formula::neg(xy)).expect("disj"))
        .expect("disj");
    s_rule(&a5, &prem2).expect("bootstrap shapes")
}

/// From A IMP B and B IMP C infer A IMP C.
pub fn imp_trans(t1: &Theorem, t2: &Theorem) -> Result<Theorem, KernelError> {
    mono_right(t1, t2)
}

/// From ⊢ A IMP B build ⊢ (A ∨ C) IMP (B ∨ C).
pub fn mono_left_fm(t: &Theorem, c: &Formula) -> Result<Theorem, KernelError> {
    let (a, b) = split_imp(t.concl())?;
    let a5 = boolean_axiom(BoolAxiom::DisjConj, &[a.clone(), c.clone(), b.clone()])?;
    let ac = Formula::disj(a, c.clone());
    let prem2 = commute_rule(&weaken_r(t, &Formula::neg(ac))?)?;
    let s = s_rule(&a5, &prem2)?;
    imp_trans(&s, &commute_fm(c, &b))
}

/// From ⊢ A IMP B build ⊢ (C ∨ A) IMP (C ∨ B).
pub fn mono_right_fm(t: &Theorem, c: &Formula) -> Result<Theorem, KernelError> {
    let (a, b) = split_imp(t.concl())?;
    let first = commute_fm(c, &a);
    let mid = mono_left_fm(t, c)?;
    imp_trans(&imp_trans(&first, &mid)?, &commute_fm(&b, c))
}

/// From A IMP B infer (NEG B) IMP (NEG A).
pub fn contrapose(t: &Theorem) -> Result<Theorem, KernelError> {
    let (_, b) = split_imp(t.concl())?;
    commute_rule(&mono_right(t, &dneg_intro_fm(&b))?)
}

/// From P IMP Q and (NEG P) IMP Q infer Q.
pub fn case_split(t1: &Theorem, t2: &Theorem) -> Result<Theorem, KernelError> {
    contract(&disj_cut(t1, t2)?)
}

/// From A IMP B and A IMP (NEG B) infer NEG A.
pub fn neg_intro(t1: &Theorem, t2: &Theorem) -> Result<Theorem, KernelError> {
    contract(&disj_cut(&commute_rule(t1)?, &commute_rule(t2)?)?)
}

/// ⊢ (NEG X) IMP ((NEG Y) IMP (NEG (X ∨ Y))).
pub fn demorgan_fm(x: &Formula, y: &Formula) -> Theorem {
    let xy = Formula::disj(x.clone(), y.clone());
    let i = boolean_axiom(BoolAxiom::Ident, &[xy.clone()]).expect("arity 1");
    let e = assoc_r(&i).expect("disj");
    let e = commute_rule(&e).expect("disj");
    let e = assoc_r(&e).expect("disj");
    let e = commute_rule(&e).expect("disj"); // x ∨ (y ∨ ¬(x∨y))
    let e = mono_left(&e, &dneg_intro_fm(x)).expect("shapes");
    let inner = mono_left_fm(&dneg_intro_fm(y), &Formula::neg(xy)).expect("shapes");
    mono_right(&e, &inner).expect("shapes")
}

// ---------------------------------------------------------------------------
// Tautology engine
// ---------------------------------------------------------------------------
//
// A one-sided sequent prover over clause lists. A clause [d1, .., dn] stands
// for the right-nested disjunction d1 ∨ (d2 ∨ (... ∨ dn)). Rules: flatten a
// disjunct, strip a double negation, split a negated disjunction into two
// premise clauses, close on a complementary literal pair. Every step is a
// constant number of kernel inferences lifted to the right position, so proof
// size stays proportional to the tautology's truth-table work.

/// Restates a theorem at a structurally different but α-equivalent formula.
pub fn alpha_restate(t: &Theorem, target: &Formula) -> Result<Theorem, KernelError> {
    if t.concl() == target {
        return Ok(t.clone());
    }
    mp(&boolean_axiom(BoolAxiom::Ident, &[target.clone()])?, t)
}

fn fold_disj(items: &[Formula]) -> Formula {
    let mut it = items.iter().rev();
    let mut acc = it.next().expect("clause is nonempty").clone();
    for f in it {
        acc = Formula::disj(f.clone(), acc);
    }
    acc
}

fn is_literal(f: &Formula) -> bool {
    match f.kind() {
        FormulaKind::Disj(_, _) => false,
        FormulaKind::Neg(inner) => {
            !matches!(inner.kind(), FormulaKind::Disj(_, _) | FormulaKind::Neg(_))
        }
        _ => true,
    }
}

/// ⊢ ((x ∨ y) ∨ z) IMP (x ∨ (y ∨ z)).
fn assoc_l_fm(x: &Formula, y: &Formula, z: &Formula) -> Result<Theorem, KernelError> {
    let xy = Formula::disj(x.clone(), y.clone());
    let mut t = commute_fm(&xy, z); // → z∨(x∨y)
    t = imp_trans(
        &t,
        &boolean_axiom(BoolAxiom::DisjAssoc, &[z.clone(), x.clone(), y.clone()])?,
    )?; // → (z∨x)∨y
    t = imp_trans(&t, &commute_fm(&Formula::disj(z.clone(), x.clone()), y))?; // → y∨(z∨x)
    t = imp_trans(
        &t,
        &boolean_axiom(BoolAxiom::DisjAssoc, &[y.clone(), z.clone(), x.clone()])?,
    )?; // → (y∨z)∨x
    imp_trans(&t, &commute_fm(&Formula::disj(y.clone(), z.clone()), x))
}

/// ⊢ (a ∨ (b ∨ R)) IMP (b ∨ (a ∨ R)), or the plain commutation when there is
/// no rest.
fn swap01_fm(a: &Formula, b: &Formula, rest: Option<&Formula>) -> Result<Theorem, KernelError> {
    match rest {
        None => Ok(commute_fm(a, b)),
        Some(r) => {
            let t = boolean_axiom(BoolAxiom::DisjAssoc, &[a.clone(), b.clone(), r.clone()])?;
            let t = imp_trans(&t, &mono_left_fm(&commute_fm(a, b), r)?)?;
            imp_trans(&t, &assoc_l_fm(b, a, r)?)
        }
    }
}

/// Lifts an implication under a disjunction prefix: from ⊢ X IMP Y build
/// ⊢ (p1 ∨ (... ∨ X)) IMP (p1 ∨ (... ∨ Y)).
fn lift_under(prefix: &[Formula], imp_thm: Theorem) -> Result<Theorem, KernelError> {
    let mut t = imp_thm;
    for c in prefix.iter().rev() {
        t = mono_right_fm(&t, c)?;
    }
    Ok(t)
}

/// Swaps positions k and k+1 of the clause, updating `items`.
fn adjacent_swap(
    t: Theorem,
    items: &mut [Formula],
    k: usize,
) -> Result<Theorem, KernelError> {
    let a = items[k].clone();
    let b = items[k + 1].clone();
    let rest = if k + 2 < items.len() {
        Some(fold_disj(&items[k + 2..]))
    } else {
        None
    };
    let imp_thm = swap01_fm(&a, &b, rest.as_ref())?;
    let lifted = lift_under(&items[..k], imp_thm)?;
    items.swap(k, k + 1);
    mp(&lifted, &t)
}

/// Reorders the proved clause `cur` into the order of `target` by adjacent
/// transpositions.
fn permute_clause(
    mut t: Theorem,
    cur: &mut Vec<Formula>,
    target: &[Formula],
) -> Result<Theorem, KernelError> {
    for k in 0..target.len() {
        if cur[k] == target[k] {
            continue;
        }
        let j = (k + 1..cur.len())
            .find(|&j| cur[j] == target[k])
            .or_else(|| (k + 1..cur.len()).find(|&j| alpha_eq(&cur[j], &target[k])))
            .ok_or_else(|| shape("clause permutation lost an element"))?;
        for m in (k..j).rev() {
            t = adjacent_swap(t, cur, m)?;
        }
    }
    Ok(t)
}

/// From ⊢ (NEG x) ∨ R and ⊢ (NEG y) ∨ R conclude ⊢ (NEG (x ∨ y)) ∨ R.
fn combine_neg_disj(
    x: &Formula,
    y: &Formula,
    r: &Formula,
    t1: &Theorem,
    t2: &Theorem,
) -> Result<Theorem, KernelError> {
    let d = demorgan_fm(x, y);
    let s1 = mono_left(t1, &d)?; // (¬¬y ∨ ¬(x∨y)) ∨ R
    let s2 = assoc_l(&s1)?; // ¬¬y ∨ (¬(x∨y) ∨ R)
    let g = disj_cut(t2, &s2)?; // R ∨ (¬(x∨y) ∨ R)
    let g = rotate_swap(&g)?; // ¬(x∨y) ∨ (R ∨ R)
    let cont = boolean_axiom(BoolAxiom::DisjCont, &[r.clone()])?;
    mono_right(&g, &cont)
}

fn prove_clause(items: &[Formula]) -> Result<Theorem, KernelError> {
    if let Some(p) = items.iter().position(|f| !is_literal(f)) {
        let f = items[p].clone();
        let mut rest: Vec<Formula> = items.to_vec();
        rest.remove(p);
        let rebuilt = match f.kind() {
            FormulaKind::Disj(x, y) => {
                let mut sub = vec![x.clone(), y.clone()];
                sub.extend(rest.iter().cloned());
                let t = prove_clause(&sub)?;
                if rest.is_empty() {
                    t
                } else {
                    // x ∨ (y ∨ R) → (x ∨ y) ∨ R
                    assoc_r(&t)?
                }
            }
            FormulaKind::Neg(inner) => match inner.kind() {
                FormulaKind::Neg(x) => {
                    let mut sub = vec![x.clone()];
                    sub.extend(rest.iter().cloned());
                    let t = prove_clause(&sub)?;
                    if rest.is_empty() {
                        mp(&dneg_intro_fm(x), &t)?
                    } else {
                        mono_left(&t, &dneg_intro_fm(x))?
                    }
                }
                FormulaKind::Disj(x, y) => {
                    let mut sub1 = vec![Formula::neg(x.clone())];
                    sub1.extend(rest.iter().cloned());
                    let mut sub2 = vec![Formula::neg(y.clone())];
                    sub2.extend(rest.iter().cloned());
                    let t1 = prove_clause(&sub1)?;
                    let t2 = prove_clause(&sub2)?;
                    if rest.is_empty() {
                        mp(&mp(&demorgan_fm(x, y), &t1)?, &t2)?
                    } else {
                        combine_neg_disj(x, y, &fold_disj(&rest), &t1, &t2)?
                    }
                }
                _ => unreachable!("negated atom is a literal"),
            },
            _ => unreachable!("non-literal is a disjunction or negation"),
        };
        let mut cur = vec![f];
        cur.extend(rest);
        return permute_clause(rebuilt, &mut cur, items);
    }

    // all literals: close on a complementary pair
    let mut pivot: Option<(usize, usize)> = None;
    'outer: for (i, li) in items.iter().enumerate() {
        if let FormulaKind::Neg(a) = li.kind() {
            for (j, lj) in items.iter().enumerate() {
                if i != j && alpha_eq(lj, a) {
                    pivot = Some((i, j));
                    break 'outer;
                }
            }
        }
    }
    let Some((ni, pj)) = pivot else {
        let lits: Vec<String> = items.iter().map(|f| f.to_string()).collect();
        return Err(KernelError::NotATautology(format!(
            "open clause: {}",
            lits.join(" | ")
        )));
    };
    let pos = items[pj].clone();
    let ident = boolean_axiom(BoolAxiom::Ident, &[pos.clone()])?;
    let head = alpha_restate(&ident, &Formula::disj(items[ni].clone(), pos.clone()))?;
    let others: Vec<Formula> = items
        .iter()
        .enumerate()
        .filter(|(k, _)| *k != ni && *k != pj)
        .map(|(_, f)| f.clone())
        .collect();
    let grown = if others.is_empty() {
        head
    } else {
        let tail = fold_disj(&others);
        let widen = boolean_axiom(BoolAxiom::DisjI1, &[pos.clone(), tail])?;
        mono_right(&head, &widen)?
    };
    let mut cur = vec![items[ni].clone(), pos];
    cur.extend(others);
    permute_clause(grown, &mut cur, items)
}

/// Proves any propositional tautology over the disjunction/negation skeleton
/// of the goal, treating other formulas as opaque atoms.
pub fn taut(goal: &Formula) -> Result<Theorem, KernelError> {
    let t = prove_clause(std::slice::from_ref(goal))?;
    alpha_restate(&t, goal)
}

/// Proves premise₁ IMP (… IMP goal) as a tautology, then discharges every
/// premise by modus ponens.
pub fn taut_mp(premises: &[&Theorem], goal: &Formula) -> Result<Theorem, KernelError> {
    let mut chain = goal.clone();
    for p in premises.iter().rev() {
        chain = imp(p.concl().clone(), chain);
    }
    let mut t = taut(&chain)?;
    for p in premises {
        t = mp(&t, p)?;
    }
    Ok(t)
}

// ---------------------------------------------------------------------------
// Deduction theorem
// ---------------------------------------------------------------------------

/// Swaps the first two disjuncts of a right-nested three-way disjunction:
/// X ∨ (Y ∨ Z) becomes Y ∨ (X ∨ Z).
fn rotate_swap(t: &Theorem) -> Result<Theorem, KernelError> {
    let (x, yz) = split_disj(t.concl())?;
    let (y, _) = split_disj(&yz)?;
    let t = assoc_r(t)?;
    let t = mono_left(&t, &commute_fm(&x, &y))?;
    assoc_l(&t)
}

/// The deduction theorem as a total proof transformer: from H ⊢ B produce
/// H − {C} ⊢ C IMP B by recursion over the derivation record.
pub fn deduction(t: &Theorem, c: &Formula) -> Theorem {
    let mut replay: HashMap<usize, Theorem> = HashMap::new();
    let mut memo: HashMap<usize, Theorem> = HashMap::new();
    ded(t.tree(), c, &mut memo, &mut replay)
}

fn replay_node(node: &Arc<kernel::ProofTree>, replay: &mut HashMap<usize, Theorem>) -> Theorem {
    if let Some(t) = replay.get(&(Arc::as_ptr(node) as usize)) {
        return t.clone();
    }
    kernel::check_proof_with(node, replay).expect("subtree of a valid theorem replays")
}

fn ded(
    node: &Arc<kernel::ProofTree>,
    c: &Formula,
    memo: &mut HashMap<usize, Theorem>,
    replay: &mut HashMap<usize, Theorem>,
) -> Theorem {
    let key = Arc::as_ptr(node) as usize;
    if let Some(t) = memo.get(&key) {
        return t.clone();
    }
    let th = replay_node(node, replay);
    let out = if !th.has_hyp(c) {
        // C is absent: weaken the untouched theorem to C IMP B
        let w = weaken_r(&th, &Formula::neg(c.clone())).expect("disj");
        commute_rule(&w).expect("disj")
    } else {
        match node.as_ref() {
            kernel::ProofTree::Hyp(_) => {
                // the hypothesis is C itself (up to α)
                boolean_axiom(BoolAxiom::Ident, &[c.clone()]).expect("arity 1")
            }
            kernel::ProofTree::Mp(l, r) => {
                let dl = ded(l, c, memo, replay);
                let dr = ded(r, c, memo, replay);
                s_rule(&dl, &dr).expect("deduction MP case")
            }
            kernel::ProofTree::Exists { prem, i } => {
                // C is among the premise hypotheses, so i is fresh for C
                let d = ded(prem, c, memo, replay);
                let d = rotate_swap(&d).expect("three-clause shuffle");
                let ex = kernel::exists_rule(&d, *i).expect("eigenvariable conditions carry over");
                rotate_swap(&ex).expect("three-clause shuffle")
            }
            kernel::ProofTree::Deduction { .. } | kernel::ProofTree::Subst { .. } => {
                // macro nodes replay to primitive derivations; transform those
                let expanded = th.tree().clone();
                if Arc::ptr_eq(&expanded, node) {
                    unreachable!("macro node replays to a macro-free tree");
                }
                ded(&expanded, c, memo, replay)
            }
            // axioms have no hypotheses, so has_hyp(c) cannot hold
            _ => unreachable!("axiom node with hypotheses"),
        }
    };
    memo.insert(key, out.clone());
    out
}

/// From H₁ ⊢ A and H₂ ⊢ B conclude H₁ ∪ (H₂ − {A}) ⊢ B.
pub fn cut(t1: &Theorem, t2: &Theorem) -> Result<Theorem, KernelError> {
    mp(&deduction(t2, t1.concl()), t1)
}

// ---------------------------------------------------------------------------
// Connective rules
// ---------------------------------------------------------------------------

/// From B infer A IMP B.
pub fn imp_triv(t: &Theorem, a: &Formula) -> Result<Theorem, KernelError> {
    commute_rule(&weaken_r(t, &Formula::neg(a.clone()))?)
}

pub fn conj_intro(t1: &Theorem, t2: &Theorem) -> Result<Theorem, KernelError> {
    let a = t1.concl().clone();
    let b = t2.concl().clone();
    let d1 = mp(&dneg_intro_fm(&a), t1)?;
    let d2 = mp(&dneg_intro_fm(&b), t2)?;
    mp(
        &mp(&demorgan_fm(&Formula::neg(a), &Formula::neg(b)), &d1)?,
        &d2,
    )
}

/// ⊢ (A AND B) IMP A.
fn conj_elim1_fm(a: &Formula, b: &Formula) -> Result<Theorem, KernelError> {
    let na = Formula::neg(a.clone());
    let nb = Formula::neg(b.clone());
    let d = boolean_axiom(BoolAxiom::DisjI1, &[na.clone(), nb])?;
    imp_trans(&contrapose(&d)?, &dneg_elim_fm(a))
}

/// ⊢ (A AND B) IMP B.
fn conj_elim2_fm(a: &Formula, b: &Formula) -> Result<Theorem, KernelError> {
    let na = Formula::neg(a.clone());
    let nb = Formula::neg(b.clone());
    // ¬B → (¬A ∨ ¬B)
    let w = imp_trans(
        &boolean_axiom(BoolAxiom::DisjI1, &[nb.clone(), na.clone()])?,
        &commute_fm(&nb, &na),
    )?;
    imp_trans(&contrapose(&w)?, &dneg_elim_fm(b))
}

pub fn conj_elim1(t: &Theorem) -> Result<Theorem, KernelError> {
    let (a, b) = as_and(t.concl()).ok_or_else(|| shape("expected a conjunction"))?;
    mp(&conj_elim1_fm(&a, &b)?, t)
}

pub fn conj_elim2(t: &Theorem) -> Result<Theorem, KernelError> {
    let (a, b) = as_and(t.concl()).ok_or_else(|| shape("expected a conjunction"))?;
    mp(&conj_elim2_fm(&a, &b)?, t)
}

pub fn disj_intro1(t: &Theorem, b: &Formula) -> Result<Theorem, KernelError> {
    weaken_r(t, b)
}

pub fn disj_intro2(t: &Theorem, a: &Formula) -> Result<Theorem, KernelError> {
    weaken_l(t, a)
}

/// From P ∨ Q, P IMP R and Q IMP R conclude R.
pub fn disj_elim(cases: &Theorem, d1: &Theorem, d2: &Theorem) -> Result<Theorem, KernelError> {
    contract(&mono_right(&mono_left(cases, d1)?, d2)?)
}

/// From A IMP B and NEG B conclude NEG A.
pub fn modus_tollens(t: &Theorem, nb: &Theorem) -> Result<Theorem, KernelError> {
    mp(&contrapose(t)?, nb)
}

pub fn iff_intro(t1: &Theorem, t2: &Theorem) -> Result<Theorem, KernelError> {
    let (a, b) = split_imp(t1.concl())?;
    let (b2, a2) = split_imp(t2.concl())?;
    if !alpha_eq(&a, &a2) || !alpha_eq(&b, &b2) {
        return Err(shape("iff_intro: implications do not align"));
    }
    conj_intro(t1, t2)
}

pub fn iff_refl(a: &Formula) -> Theorem {
    let ident = boolean_axiom(BoolAxiom::Ident, &[a.clone()]).expect("arity 1");
    conj_intro(&ident, &ident).expect("conjunction")
}

pub fn iff_sym(t: &Theorem) -> Result<Theorem, KernelError> {
    if as_iff(t.concl()).is_none() {
        return Err(shape("expected an iff"));
    }
    conj_intro(&conj_elim2(t)?, &conj_elim1(t)?)
}

pub fn iff_trans(t1: &Theorem, t2: &Theorem) -> Result<Theorem, KernelError> {
    let (_, b) = as_iff(t1.concl()).ok_or_else(|| shape("expected an iff"))?;
    let (b2, _) = as_iff(t2.concl()).ok_or_else(|| shape("expected an iff"))?;
    if !alpha_eq(&b, &b2) {
        return Err(shape("iff_trans: middle formulas differ"));
    }
    let fwd = imp_trans(&conj_elim1(t1)?, &conj_elim1(t2)?)?;
    let bwd = imp_trans(&conj_elim2(t2)?, &conj_elim2(t1)?)?;
    conj_intro(&fwd, &bwd)
}

/// From A IFF B and A infer B.
pub fn iff_mp(t_iff: &Theorem, t: &Theorem) -> Result<Theorem, KernelError> {
    mp(&conj_elim1(t_iff)?, t)
}

/// From A IFF B and B infer A.
pub fn iff_mp_rev(t_iff: &Theorem, t: &Theorem) -> Result<Theorem, KernelError> {
    mp(&conj_elim2(t_iff)?, t)
}

/// From A and NEG A conclude any goal.
pub fn exfalso_from(t1: &Theorem, t2: &Theorem, goal: &Formula) -> Result<Theorem, KernelError> {
    // ¬A ∨ goal is A IMP goal
    mp(&weaken_r(t2, goal)?, t1)
}

/// ⊢ (NEG P) IMP (P IMP Q), applied: from NEG P infer P IMP Q.
pub fn exfalso_imp(np: &Theorem, q: &Formula) -> Result<Theorem, KernelError> {
    weaken_r(np, q)
}

// ---------------------------------------------------------------------------
// Congruence under the connectives
// ---------------------------------------------------------------------------

/// From X IFF X' and Y IFF Y' conclude (X ∨ Y) IFF (X' ∨ Y').
pub fn or_cong_iff(t1: &Theorem, t2: &Theorem) -> Result<Theorem, KernelError> {
    let (x, x2) = as_iff(t1.concl()).ok_or_else(|| shape("expected an iff"))?;
    let (y, y2) = as_iff(t2.concl()).ok_or_else(|| shape("expected an iff"))?;
    let fwd = imp_trans(
        &mono_left_fm(&conj_elim1(t1)?, &y)?,
        &mono_right_fm(&conj_elim1(t2)?, &x2)?,
    )?;
    let bwd = imp_trans(
        &mono_left_fm(&conj_elim2(t1)?, &y2)?,
        &mono_right_fm(&conj_elim2(t2)?, &x)?,
    )?;
    conj_intro(&fwd, &bwd)
}

/// From X IFF X' conclude (NEG X) IFF (NEG X').
pub fn neg_cong_iff(t: &Theorem) -> Result<Theorem, KernelError> {
    if as_iff(t.concl()).is_none() {
        return Err(shape("expected an iff"));
    }
    let fwd = contrapose(&conj_elim2(t)?)?;
    let bwd = contrapose(&conj_elim1(t)?)?;
    conj_intro(&fwd, &bwd)
}

/// From X IFF X' and Y IFF Y' conclude (X AND Y) IFF (X' AND Y').
pub fn and_cong_iff(t1: &Theorem, t2: &Theorem) -> Result<Theorem, KernelError> {
    neg_cong_iff(&or_cong_iff(&neg_cong_iff(t1)?, &neg_cong_iff(t2)?)?)
}

/// From ⊢ P and ⊢ Q conclude P IFF Q.
pub fn both_true_iff(t1: &Theorem, t2: &Theorem) -> Result<Theorem, KernelError> {
    conj_intro(
        &imp_triv(t2, t1.concl())?,
        &imp_triv(t1, t2.concl())?,
    )
}

/// From ⊢ NEG P and ⊢ NEG Q conclude P IFF Q.
pub fn both_false_iff(n1: &Theorem, n2: &Theorem) -> Result<Theorem, KernelError> {
    let p = match n1.concl().kind() {
        FormulaKind::Neg(p) => p.clone(),
        _ => return Err(shape("expected a negation")),
    };
    let q = match n2.concl().kind() {
        FormulaKind::Neg(q) => q.clone(),
        _ => return Err(shape("expected a negation")),
    };
    conj_intro(&exfalso_imp(n1, &q)?, &exfalso_imp(n2, &p)?)
}

// ---------------------------------------------------------------------------
// Quantifier rules
// ---------------------------------------------------------------------------

/// From H ⊢ A with i not free in H conclude H ⊢ All i A.
pub fn all_intro(t: &Theorem, i: Name) -> Result<Theorem, KernelError> {
    for h in t.hyps() {
        if h.has_free(i) {
            return Err(KernelError::EigenvariableViolation(i));
        }
    }
    let a = t.concl().clone();
    let dn = mp(&dneg_intro_fm(&a), t)?;
    let exneg = Formula::ex(i, Formula::neg(a));
    let w = weaken_r(&dn, &Formula::neg(exneg))?;
    let ex = kernel::exists_rule(&w, i)?;
    // (EX i ¬A) IMP ¬(EX i ¬A) is ¬P ∨ ¬P
    contract(&ex)
}

/// From H ⊢ All i A conclude H ⊢ A(i::=u).
pub fn all_elim(t: &Theorem, u: &Term) -> Result<Theorem, KernelError> {
    let (i, a) = as_all(t.concl()).ok_or_else(|| shape("expected a universal"))?;
    let sp = special_axiom(&Formula::neg(a.clone()), i, u);
    let cp = contrapose(&sp)?;
    let m = mp(&cp, t)?;
    mp(&dneg_elim_fm(&subst_fm(&a, i, u)), &m)
}

/// From H ∪ {Var i IN t} ⊢ A with i fresh for H and t, conclude
/// H ⊢ All2 i t A.
pub fn all2_intro(t: &Theorem, i: Name, bound: &Term) -> Result<Theorem, KernelError> {
    if bound.has_free(i) {
        return Err(KernelError::FreshnessViolation(i));
    }
    let guard = Formula::mem(Term::var(i), bound.clone());
    let d = deduction(t, &guard);
    all_intro(&d, i)
}

/// From H ⊢ All2 i t A and H' ⊢ u IN t conclude H ∪ H' ⊢ A(i::=u).
pub fn all2_elim(t: &Theorem, u: &Term, mem_thm: &Theorem) -> Result<Theorem, KernelError> {
    if as_all2(t.concl()).is_none() {
        return Err(shape("expected a bounded universal"));
    }
    let inst = all_elim(t, u)?;
    mp(&inst, mem_thm)
}

/// From H ⊢ A IMP B with i fresh for H conclude H ⊢ (EX i A) IMP (EX i B).
pub fn ex_mono(t: &Theorem, i: Name) -> Result<Theorem, KernelError> {
    let (_, b) = split_imp(t.concl())?;
    let sp = special_axiom(&b, i, &Term::var(i));
    let tr = imp_trans(t, &sp)?;
    kernel::exists_rule(&tr, i)
}

/// From H ⊢ A IFF B with i fresh for H conclude H ⊢ (EX i A) IFF (EX i B).
pub fn ex_mono_iff(t: &Theorem, i: Name) -> Result<Theorem, KernelError> {
    if as_iff(t.concl()).is_none() {
        return Err(shape("expected an iff"));
    }
    let fwd = conj_elim1(t)?;
    let bwd = conj_elim2(t)?;
    iff_intro(&ex_mono(&fwd, i)?, &ex_mono(&bwd, i)?)
}

/// From H ⊢ A IFF B with i fresh for H and the bound, conclude
/// H ⊢ (All2 i t A) IFF (All2 i t B).
pub fn all2_mono_iff(t: &Theorem, i: Name, bound: &Term) -> Result<Theorem, KernelError> {
    if bound.has_free(i) {
        return Err(KernelError::FreshnessViolation(i));
    }
    if as_iff(t.concl()).is_none() {
        return Err(shape("expected an iff"));
    }
    let guard = Formula::mem(Term::var(i), bound.clone());
    // (g → A) IFF (g → B), then push through ¬∃¬
    let guarded = or_cong_iff(&iff_refl(&Formula::neg(guard)), t)?;
    let niff = neg_cong_iff(&guarded)?;
    let exiff = ex_mono_iff(&niff, i)?;
    neg_cong_iff(&exiff)
}

/// Substitution into a theorem: from H ⊢ A with i not free in H conclude
/// H ⊢ A(i::=u). Derived as generalization followed by specialization.
pub fn thm_subst(t: &Theorem, i: Name, u: &Term) -> Result<Theorem, KernelError> {
    for h in t.hyps() {
        if h.has_free(i) {
            return Err(KernelError::HypothesisCapture(i));
        }
    }
    if !t.concl().has_free(i) {
        return Ok(t.clone());
    }
    all_elim(&all_intro(t, i)?, u)
}

/// The HF induction rule: from H₁ ⊢ A(i::=0) and
/// H₂ ⊢ All i All j (A IMP (A(i::=j) IMP A(i::=i◁j))) conclude
/// H₁ ∪ H₂ ⊢ All i A.
pub fn induction_rule(
    base: &Theorem,
    step: &Theorem,
    a: &Formula,
    i: Name,
    j: Name,
) -> Result<Theorem, KernelError> {
    let ax = kernel::induction_axiom(a, i, j)?;
    mp(&mp(&ax, base)?, step)
}

// ---------------------------------------------------------------------------
// Equality rules
// ---------------------------------------------------------------------------

/// The universal closure of an equality axiom over its fixed variables,
/// derived once and cached: instantiation is then four specializations.
fn generalized_eq_axiom(kind: EqAxiom) -> &'static Theorem {
    use std::sync::OnceLock;
    static CACHE: OnceLock<[Theorem; 4]> = OnceLock::new();
    let all = CACHE.get_or_init(|| {
        let close = |kind: EqAxiom| {
            let mut th = equality_axiom(kind);
            for v in kernel::eq_axiom_vars().iter().rev() {
                th = all_intro(&th, *v).expect("axioms have no hypotheses");
            }
            th
        };
        [
            close(EqAxiom::Refl),
            close(EqAxiom::EqSubst),
            close(EqAxiom::MemSubst),
            close(EqAxiom::EatsSubst),
        ]
    });
    match kind {
        EqAxiom::Refl => &all[0],
        EqAxiom::EqSubst => &all[1],
        EqAxiom::MemSubst => &all[2],
        EqAxiom::EatsSubst => &all[3],
    }
}

/// Instantiates one of the equality axioms at arbitrary terms. Specializing
/// the cached closure one variable at a time is sound for overlapping
/// arguments because substitution renames the remaining binders clear of the
/// incoming term.
fn instantiate_eq_axiom(kind: EqAxiom, args: [&Term; 4]) -> Result<Theorem, KernelError> {
    let mut th = generalized_eq_axiom(kind).clone();
    for t in args {
        th = all_elim(&th, t)?;
    }
    Ok(th)
}

/// ⊢ t EQ t.
pub fn refl_of(t: &Term) -> Theorem {
    instantiate_eq_axiom(EqAxiom::Refl, [t, t, t, t]).expect("refl instantiates")
}

/// From H ⊢ a EQ b conclude H ⊢ b EQ a.
pub fn eq_sym(t: &Theorem) -> Result<Theorem, KernelError> {
    let (a, b) = match t.concl().kind() {
        FormulaKind::Eq(a, b) => (a.clone(), b.clone()),
        _ => return Err(shape("expected an equation")),
    };
    let inst = instantiate_eq_axiom(EqAxiom::EqSubst, [&a, &b, &a, &a])?;
    let ra = refl_of(&a);
    let prem = conj_intro(t, &ra)?;
    mp(&mp(&inst, &prem)?, &ra)
}

/// From H ⊢ a EQ b and H' ⊢ b EQ c conclude a EQ c.
pub fn eq_trans(t1: &Theorem, t2: &Theorem) -> Result<Theorem, KernelError> {
    let (a, _b) = match t1.concl().kind() {
        FormulaKind::Eq(a, b) => (a.clone(), b.clone()),
        _ => return Err(shape("expected an equation")),
    };
    let (b, c) = match t2.concl().kind() {
        FormulaKind::Eq(b, c) => (b.clone(), c.clone()),
        _ => return Err(shape("expected an equation")),
    };
    // (b=c ∧ a=a) → ((b=a) → (c=a))
    let inst = instantiate_eq_axiom(EqAxiom::EqSubst, [&b, &c, &a, &a])?;
    let prem = conj_intro(t2, &refl_of(&a))?;
    let ba = eq_sym(t1)?;
    let ca = mp(&mp(&inst, &prem)?, &ba)?;
    eq_sym(&ca)
}

/// From a EQ b, c EQ d and a IN c conclude b IN d.
pub fn eq_mem_cong(
    t_ab: &Theorem,
    t_cd: &Theorem,
    t_mem: &Theorem,
) -> Result<Theorem, KernelError> {
    let (a, b) = match t_ab.concl().kind() {
        FormulaKind::Eq(a, b) => (a.clone(), b.clone()),
        _ => return Err(shape("expected an equation")),
    };
    let (c, d) = match t_cd.concl().kind() {
        FormulaKind::Eq(c, d) => (c.clone(), d.clone()),
        _ => return Err(shape("expected an equation")),
    };
    let inst = instantiate_eq_axiom(EqAxiom::MemSubst, [&a, &b, &c, &d])?;
    mp(&mp(&inst, &conj_intro(t_ab, t_cd)?)?, t_mem)
}

/// From c EQ d and x IN c conclude x IN d.
pub fn eq_mem_cong2(t_cd: &Theorem, t_mem: &Theorem) -> Result<Theorem, KernelError> {
    let x = match t_mem.concl().kind() {
        FormulaKind::Mem(x, _) => x.clone(),
        _ => return Err(shape("expected a membership")),
    };
    eq_mem_cong(&refl_of(&x), t_cd, t_mem)
}

/// From a EQ b and c EQ d conclude a◁c EQ b◁d.
pub fn eats_cong(t_ab: &Theorem, t_cd: &Theorem) -> Result<Theorem, KernelError> {
    let (a, b) = match t_ab.concl().kind() {
        FormulaKind::Eq(a, b) => (a.clone(), b.clone()),
        _ => return Err(shape("expected an equation")),
    };
    let (c, d) = match t_cd.concl().kind() {
        FormulaKind::Eq(c, d) => (c.clone(), d.clone()),
        _ => return Err(shape("expected an equation")),
    };
    let inst = instantiate_eq_axiom(EqAxiom::EatsSubst, [&a, &b, &c, &d])?;
    mp(&inst, &conj_intro(t_ab, t_cd)?)
}

/// Substitutivity of equality in an arbitrary formula: from H ⊢ t EQ u
/// conclude H ⊢ A(i::=t) IMP A(i::=u), by recursion over A.
pub fn eq_subst_fm(eq_thm: &Theorem, a: &Formula, i: Name) -> Result<Theorem, KernelError> {
    if !matches!(eq_thm.concl().kind(), FormulaKind::Eq(_, _)) {
        return Err(shape("expected an equation"));
    }
    let sym = eq_sym(eq_thm)?;
    eq_subst_fm_dir(eq_thm, &sym, a, i)
}

/// Both orientations of the equation are threaded through the recursion so
/// negative positions do not re-derive symmetry.
fn eq_subst_fm_dir(
    fwd: &Theorem,
    bwd: &Theorem,
    a: &Formula,
    i: Name,
) -> Result<Theorem, KernelError> {
    let (t, u) = match fwd.concl().kind() {
        FormulaKind::Eq(t, u) => (t.clone(), u.clone()),
        _ => return Err(shape("expected an equation")),
    };
    if !a.has_free(i) {
        return boolean_axiom(BoolAxiom::Ident, &[a.clone()]);
    }
    match a.kind() {
        FormulaKind::Mem(p, q) => {
            let pt = subst_tm(i, &t, p);
            let pu = subst_tm(i, &u, p);
            let qt = subst_tm(i, &t, q);
            let qu = subst_tm(i, &u, q);
            let ep = eq_subst_tm(fwd, p, i)?;
            let eq_ = eq_subst_tm(fwd, q, i)?;
            let inst = instantiate_eq_axiom(EqAxiom::MemSubst, [&pt, &pu, &qt, &qu])?;
            mp(&inst, &conj_intro(&ep, &eq_)?)
        }
        FormulaKind::Eq(p, q) => {
            let pt = subst_tm(i, &t, p);
            let pu = subst_tm(i, &u, p);
            let qt = subst_tm(i, &t, q);
            let qu = subst_tm(i, &u, q);
            let ep = eq_subst_tm(fwd, p, i)?;
            let eq_ = eq_subst_tm(fwd, q, i)?;
            let inst = instantiate_eq_axiom(EqAxiom::EqSubst, [&pt, &pu, &qt, &qu])?;
            mp(&inst, &conj_intro(&ep, &eq_)?)
        }
        FormulaKind::Disj(x, y) => {
            let rx = eq_subst_fm_dir(fwd, bwd, x, i)?;
            let ry = eq_subst_fm_dir(fwd, bwd, y, i)?;
            // (Xt → Xu) and (Yt → Yu) give (Xt ∨ Yt) → (Xu ∨ Yu)
            let (_, xu) = split_imp(rx.concl())?;
            let (yt, _) = split_imp(ry.concl())?;
            imp_trans(&mono_left_fm(&rx, &yt)?, &mono_right_fm(&ry, &xu)?)
        }
        FormulaKind::Neg(x) => {
            let rev = eq_subst_fm_dir(bwd, fwd, x, i)?;
            contrapose(&rev)
        }
        FormulaKind::Ex(j, b) => {
            // rename the binder clear of i, t, u and the equality hypotheses
            let mut avoid: Vec<Name> = vec![i, *j];
            avoid.extend_from_slice(b.free_vars());
            avoid.extend_from_slice(t.free_vars());
            avoid.extend_from_slice(u.free_vars());
            for h in fwd.hyps() {
                avoid.extend_from_slice(h.free_vars());
            }
            for h in bwd.hyps() {
                avoid.extend_from_slice(h.free_vars());
            }
            let j2 = fresh_name(&avoid);
            let b2 = subst_fm(b, *j, &Term::var(j2));
            let rec = eq_subst_fm_dir(fwd, bwd, &b2, i)?;
            let (_, bu) = split_imp(rec.concl())?;
            let sp = special_axiom(&bu, j2, &Term::var(j2));
            let to_ex = imp_trans(&rec, &sp)?;
            kernel::exists_rule(&to_ex, j2)
        }
    }
}

/// From H ⊢ t EQ u conclude H ⊢ s(i::=t) EQ s(i::=u).
pub fn eq_subst_tm(eq_thm: &Theorem, s: &Term, i: Name) -> Result<Theorem, KernelError> {
    if !s.has_free(i) {
        return Ok(refl_of(s));
    }
    match s.kind() {
        TermKind::Var(v) if *v == i => Ok(eq_thm.clone()),
        TermKind::Eats(p, q) => {
            let ep = eq_subst_tm(eq_thm, p, i)?;
            let eq_ = eq_subst_tm(eq_thm, q, i)?;
            eats_cong(&ep, &eq_)
        }
        _ => Ok(refl_of(s)),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use super::kernel::hyp;
    use crate::semantics::{eval_fm, Env, TriBool};
    use crate::syntax::{all, and, fls, iff, text::parse_formula};

    #[test]
    fn bootstrap_rules() {
        let a = fls();
        let b = Formula::eq(Term::zero(), Term::zero());
        let id_a = boolean_axiom(BoolAxiom::Ident, &[a.clone()]).unwrap();
        // commute: from ¬A ∨ A to A ∨ ¬A
        let c = commute_rule(&id_a).unwrap();
        assert_eq!(*c.concl(), Formula::disj(a.clone(), Formula::neg(a.clone())));
        // weaken and contract
        let w = weaken_r(&id_a, &b).unwrap();
        assert!(matches!(w.concl().kind(), FormulaKind::Disj(_, _)));
        // double negation
        assert_eq!(
            *dneg_intro_fm(&a).concl(),
            imp(a.clone(), Formula::neg(Formula::neg(a.clone())))
        );
        assert_eq!(
            *dneg_elim_fm(&a).concl(),
            imp(Formula::neg(Formula::neg(a.clone())), a.clone())
        );
        // formula commutation
        assert_eq!(
            *commute_fm(&a, &b).concl(),
            imp(
                Formula::disj(a.clone(), b.clone()),
                Formula::disj(b.clone(), a.clone())
            )
        );
    }

    #[test]
    fn taut_engine() {
        let a = fls();
        let b = Formula::eq(Term::zero(), Term::zero());
        for goal in [
            imp(a.clone(), a.clone()),
            imp(a.clone(), imp(b.clone(), and(a.clone(), b.clone()))),
            iff(and(a.clone(), b.clone()), and(b.clone(), a.clone())),
            imp(and(a.clone(), b.clone()), a.clone()),
            imp(a.clone(), Formula::disj(b.clone(), a.clone())),
        ] {
            let t = taut(&goal).unwrap();
            assert!(t.hyps().is_empty(), "tautology must close all literals");
            assert_eq!(*t.concl(), goal);
        }
        assert!(taut(&a).is_err());
        assert!(taut(&imp(a.clone(), b.clone())).is_err());
    }

    #[test]
    fn deduction_round_trip() {
        let a = parse_formula("x0 IN x1").unwrap();
        let b = parse_formula("x2 EQ 0").unwrap();
        // {A, A IMP B} ⊢ B by mp
        let t = mp(&hyp(imp(a.clone(), b.clone())), &hyp(a.clone())).unwrap();
        assert_eq!(t.hyps().len(), 2);
        let d = deduction(&t, &a);
        assert_eq!(d.hyps().len(), 1);
        assert_eq!(*d.concl(), imp(a.clone(), b.clone()));
        // reintroduce
        let back = mp(&d, &hyp(a.clone())).unwrap();
        assert_eq!(*back.concl(), b);
        assert_eq!(back.hyps().len(), 2);
        // deduction with C absent weakens
        let d2 = deduction(&hyp(b.clone()), &a);
        assert_eq!(*d2.concl(), imp(a, b));
        assert_eq!(d2.hyps().len(), 1);
    }

    #[test]
    fn deduction_exists_case() {
        // {C} ⊢ (x0 EQ 0) IMP C with C not mentioning x0, then Exists
        let c = parse_formula("x1 IN x2").unwrap();
        let prem = parse_formula("x0 EQ 0").unwrap();
        let t = weaken_l(&hyp(c.clone()), &Formula::neg(prem.clone())).unwrap();
        // t: {C} ⊢ ¬(x0 EQ 0) ∨ C  =  (x0 EQ 0) IMP C
        let ex = kernel::exists_rule(&t, Name(0)).unwrap();
        let d = deduction(&ex, &c);
        assert!(d.hyps().is_empty());
        let (lhs, _) = as_imp(d.concl()).unwrap();
        assert_eq!(lhs, c);
        // replay the transformed tree
        let re = kernel::check_proof(d.tree()).unwrap();
        assert!(alpha_eq(re.concl(), d.concl()));
    }

    #[test]
    fn quantifier_rules() {
        let i = Name(0);
        let a = Formula::eq(Term::var(i), Term::var(i));
        // ⊢ x0 EQ x0 via refl instantiation, then All-intro and All-elim
        let refl = refl_of(&Term::var(i));
        let gen = all_intro(&refl, i).unwrap();
        assert_eq!(*gen.concl(), all(i, a.clone()));
        let inst = all_elim(&gen, &Term::zero()).unwrap();
        assert_eq!(*inst.concl(), Formula::eq(Term::zero(), Term::zero()));
        // eigenvariable violation
        assert!(all_intro(&hyp(a.clone()), i).is_err());
    }

    #[test]
    fn thm_subst_examples() {
        let refl = equality_axiom(EqAxiom::Refl);
        let t = thm_subst(&refl, Name(1), &Term::zero()).unwrap();
        assert_eq!(*t.concl(), Formula::eq(Term::zero(), Term::zero()));
        // no free occurrence: unchanged
        let i = Name(0);
        let exi = hyp(Formula::ex(i, Formula::eq(Term::var(i), Term::var(i))));
        let same = thm_subst(&exi, i, &Term::zero()).unwrap();
        assert_eq!(same.concl(), exi.concl());
        // hypothesis capture
        let h = hyp(Formula::mem(Term::var(i), Term::zero()));
        assert_eq!(
            thm_subst(&h, i, &Term::zero()).unwrap_err(),
            KernelError::HypothesisCapture(i)
        );
    }

    #[test]
    fn equality_rules() {
        let zero = Term::zero();
        let one = Term::eats(zero.clone(), zero.clone());
        let r = refl_of(&one);
        assert_eq!(*r.concl(), Formula::eq(one.clone(), one.clone()));
        let s = eq_sym(&hyp(Formula::eq(zero.clone(), one.clone()))).unwrap();
        assert_eq!(*s.concl(), Formula::eq(one.clone(), zero.clone()));
        let tr = eq_trans(
            &hyp(Formula::eq(zero.clone(), one.clone())),
            &hyp(Formula::eq(one.clone(), zero.clone())),
        )
        .unwrap();
        assert_eq!(*tr.concl(), Formula::eq(zero.clone(), zero.clone()));
    }

    #[test]
    fn eq_subst_into_formulas() {
        let i = Name(0);
        let t = Term::zero();
        let u = Term::eats(Term::zero(), Term::zero());
        let eq_thm = hyp(Formula::eq(t.clone(), u.clone()));
        // positive, negative and quantified positions
        for a in [
            Formula::mem(Term::var(i), Term::var(Name(5))),
            Formula::neg(Formula::mem(Term::var(i), Term::var(Name(5)))),
            Formula::ex(Name(5), Formula::eq(Term::var(i), Term::var(Name(5)))),
        ] {
            let r = eq_subst_fm(&eq_thm, &a, i).unwrap();
            let (lhs, rhs) = as_imp(r.concl()).unwrap();
            assert!(alpha_eq(&lhs, &subst_fm(&a, i, &t)));
            assert!(alpha_eq(&rhs, &subst_fm(&a, i, &u)));
        }
    }

    #[test]
    fn soundness_spot_checks() {
        // every closed theorem built here evaluates true (or unknown)
        let e0 = Env::e0();
        let a = fls();
        let candidates = vec![
            taut(&imp(a.clone(), a.clone())).unwrap(),
            dneg_intro_fm(&a),
            commute_fm(&a, &Formula::eq(Term::zero(), Term::zero())),
            refl_of(&Term::zero()),
        ];
        for t in candidates {
            assert!(t.hyps().is_empty());
            assert_ne!(eval_fm(&e0, t.concl(), 200), TriBool::False, "{}", t.concl());
        }
    }
}
