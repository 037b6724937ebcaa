//! Executable provability predicates over coded proofs.
//!
//! A coded proof is a sequence whose elements are axiom codes or follow from
//! strictly earlier elements by modus ponens, the existential rule, or
//! substitution. [`encode_proof`] linearizes a kernel derivation into such a
//! sequence, [`verify_prf`] checks one purely at the set level, and
//! [`decode_prf`] reconstructs a kernel theorem from a verified sequence.
//! [`FormulaTower`] supplies the corresponding formulas of the embedded
//! language, up to the provability formula built by [`build_pfp`].

mod tower;

pub use tower::{build_hrp_witness, hrp_code_of, solve_subst_u, FormulaTower, SeqSpec, Solver, TowerOracle};

use crate::calculus::{
    self, boolean_axiom, equality_axiom, exists_rule, extra_axiom, hf_axiom, induction_axiom,
    mp, replay_map, special_axiom, thm_subst, BoolAxiom, EqAxiom, HfAxiom, KernelError,
    ProofTree, Theorem,
};
use crate::coding::{
    code_of_fm, collect_var_codes, decode_fm, decode_tm, is_form_code, is_term_code, q_disj,
    q_eats, q_ex, q_imp, q_neg, shadow_abst_form, shadow_subst_form, shadow_unabst_form,
    var_of_code, CodeTag,
};
use crate::hf_core::HfSet;
use crate::syntax::{untrans, DbTerm, DbTermKind, Formula, Name, Term};
use std::collections::HashMap;
use std::fmt;
use std::sync::Arc;

/// A coded derivation: the sequence relation, its final index, and the coded
/// conclusion.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PrfWitness {
    pub s: HfSet,
    pub k: HfSet,
    pub y: HfSet,
}

#[derive(Debug, Clone)]
pub enum ProvabilityError {
    OpenHypotheses,
    NotAProof(String),
    Kernel(KernelError),
}

impl fmt::Display for ProvabilityError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ProvabilityError::OpenHypotheses => {
                f.write_str("derivation has undischarged hypotheses")
            }
            ProvabilityError::NotAProof(m) => write!(f, "not a proof: {m}"),
            ProvabilityError::Kernel(e) => write!(f, "kernel: {e}"),
        }
    }
}

impl std::error::Error for ProvabilityError {}

impl From<KernelError> for ProvabilityError {
    fn from(e: KernelError) -> Self {
        ProvabilityError::Kernel(e)
    }
}

// ---------------------------------------------------------------------------
// Axiom recognition on codes
// ---------------------------------------------------------------------------

/// A recognized axiom instance, with enough data to rebuild the kernel
/// theorem.
#[derive(Clone, Debug)]
pub enum AxSpec {
    Bool(BoolAxiom, Vec<Formula>),
    EqAx(EqAxiom),
    HfAx(HfAxiom),
    Extra,
    Special { a: Formula, i: Name, x: Term },
    Induction { a: Formula, i: Name, j: Name },
}

/// Decomposes ⌜A IMP B⌝ at the value level.
pub fn as_q_imp(x: &HfSet) -> Option<(HfSet, HfSet)> {
    let (tag, payload) = x.unpair().ok()?;
    if tag != CodeTag::Disj.value() {
        return None;
    }
    let (na, b) = payload.unpair().ok()?;
    let (ntag, a) = na.unpair().ok()?;
    if ntag != CodeTag::Neg.value() {
        return None;
    }
    Some((a, b))
}

fn as_q_disj(x: &HfSet) -> Option<(HfSet, HfSet)> {
    let (tag, payload) = x.unpair().ok()?;
    if tag != CodeTag::Disj.value() {
        return None;
    }
    payload.unpair().ok()
}

fn as_q_ex(x: &HfSet) -> Option<HfSet> {
    let (tag, payload) = x.unpair().ok()?;
    if tag != CodeTag::Ex.value() {
        return None;
    }
    Some(payload)
}

fn as_q_neg(x: &HfSet) -> Option<HfSet> {
    let (tag, payload) = x.unpair().ok()?;
    if tag != CodeTag::Neg.value() {
        return None;
    }
    Some(payload)
}

fn fixed_axiom_codes() -> &'static [(HfSet, AxSpec)] {
    use std::sync::OnceLock;
    static CODES: OnceLock<Vec<(HfSet, AxSpec)>> = OnceLock::new();
    CODES.get_or_init(|| {
        let mut v = Vec::new();
        for kind in [
            EqAxiom::Refl,
            EqAxiom::EqSubst,
            EqAxiom::MemSubst,
            EqAxiom::EatsSubst,
        ] {
            v.push((code_of_fm(&kind.formula()), AxSpec::EqAx(kind)));
        }
        v.push((
            code_of_fm(&calculus::hf1_formula()),
            AxSpec::HfAx(HfAxiom::Hf1),
        ));
        v.push((
            code_of_fm(&calculus::hf2_formula()),
            AxSpec::HfAx(HfAxiom::Hf2),
        ));
        v.push((
            code_of_fm(&calculus::extra_axiom_formula()),
            AxSpec::Extra,
        ));
        v
    })
}

fn decode_named_fm(x: &HfSet) -> Option<Formula> {
    untrans(&decode_fm(x).ok()?).ok()
}

fn db_to_term(d: &DbTerm) -> Option<Term> {
    match d.kind() {
        DbTermKind::DbZero => Some(Term::zero()),
        DbTermKind::DbVar(n) => Some(Term::var(*n)),
        DbTermKind::DbInd(_) => None,
        DbTermKind::DbEats(a, b) => Some(Term::eats(db_to_term(a)?, db_to_term(b)?)),
    }
}

fn decode_named_tm(x: &HfSet) -> Option<Term> {
    db_to_term(&decode_tm(x).ok()?)
}

/// Candidate variable codes for an existential over a variable: those
/// occurring in the given values plus one fresh.
fn var_code_candidates(sources: &[&HfSet]) -> Vec<HfSet> {
    let mut out = Vec::new();
    for s in sources {
        collect_var_codes(s, &mut out);
    }
    let max = out.iter().map(|v| v.card()).max().unwrap_or(0);
    out.push(HfSet::ord_of(max + 1));
    out
}

/// Recognizes the code of an axiom instance, returning the reconstruction
/// data. Scheme matching decodes to syntax; the abstraction and substitution
/// relationships of the special and induction schemes are confirmed through
/// the shadow operations.
pub fn axiom_code_details(x: &HfSet) -> Option<AxSpec> {
    for (code, spec) in fixed_axiom_codes() {
        if code == x {
            return Some(spec.clone());
        }
    }
    // sentential schemes
    if let Some((l, r)) = as_q_imp(x) {
        // A IMP A
        if l == r && is_form_code(&l) {
            return Some(AxSpec::Bool(BoolAxiom::Ident, vec![decode_named_fm(&l)?]));
        }
        // A IMP (A OR B)
        if let Some((a2, b)) = as_q_disj(&r) {
            if a2 == l && is_form_code(&l) && is_form_code(&b) {
                return Some(AxSpec::Bool(
                    BoolAxiom::DisjI1,
                    vec![decode_named_fm(&l)?, decode_named_fm(&b)?],
                ));
            }
        }
        // (A OR A) IMP A
        if let Some((a1, a2)) = as_q_disj(&l) {
            if a1 == a2 && a1 == r && is_form_code(&r) {
                return Some(AxSpec::Bool(BoolAxiom::DisjCont, vec![decode_named_fm(&r)?]));
            }
        }
        // (A OR (B OR C)) IMP ((A OR B) OR C)
        if let (Some((a, bc)), Some((ab, c2))) = (as_q_disj(&l), as_q_disj(&r)) {
            if let (Some((b, c)), Some((a2, b2))) = (as_q_disj(&bc), as_q_disj(&ab)) {
                if a == a2
                    && b == b2
                    && c == c2
                    && is_form_code(&a)
                    && is_form_code(&b)
                    && is_form_code(&c)
                {
                    return Some(AxSpec::Bool(
                        BoolAxiom::DisjAssoc,
                        vec![
                            decode_named_fm(&a)?,
                            decode_named_fm(&b)?,
                            decode_named_fm(&c)?,
                        ],
                    ));
                }
            }
        }
        // (C OR A) IMP (((NEG C) OR B) IMP (A OR B))
        if let (Some((c, a)), Some((l2, r2))) = (as_q_disj(&l), as_q_imp(&r)) {
            if let (Some((nc, b)), Some((a2, b2))) = (as_q_disj(&l2), as_q_disj(&r2)) {
                if let Some(c2) = as_q_neg(&nc) {
                    if c == c2
                        && a == a2
                        && b == b2
                        && is_form_code(&c)
                        && is_form_code(&a)
                        && is_form_code(&b)
                    {
                        return Some(AxSpec::Bool(
                            BoolAxiom::DisjConj,
                            vec![
                                decode_named_fm(&c)?,
                                decode_named_fm(&a)?,
                                decode_named_fm(&b)?,
                            ],
                        ));
                    }
                }
            }
        }
        // specialisation: A(i::=x) IMP (EX i A)
        if let Some(ax) = as_q_ex(&r) {
            let sx = l.clone();
            for vc in var_code_candidates(&[&ax, &sx]) {
                let Some(a_code) = shadow_unabst_form(&vc, 0, &ax) else {
                    continue;
                };
                if !is_form_code(&a_code) {
                    continue;
                }
                if shadow_abst_form(&vc, 0, &a_code) != Some(ax.clone()) {
                    continue;
                }
                let Some(u) = solve_subst_u(&vc, &a_code, &sx) else {
                    continue;
                };
                if !is_term_code(&u) || shadow_subst_form(&vc, &u, &a_code) != Some(sx.clone()) {
                    continue;
                }
                let a = decode_named_fm(&a_code)?;
                let i = var_of_code(&vc)?;
                let xt = decode_named_tm(&u)?;
                return Some(AxSpec::Special { a, i, x: xt });
            }
        }
        // induction: A(0) IMP (step IMP All i A)
        if let Some((stepc, allc)) = as_q_imp(&r) {
            let a0 = l;
            if let Some(spec) = match_induction(&a0, &stepc, &allc) {
                return Some(spec);
            }
        }
    }
    None
}

/// ⌜All v x⌝ at the value level.
fn q_all(vc: &HfSet, x: &HfSet) -> Option<HfSet> {
    Some(q_neg(&q_ex(&shadow_abst_form(vc, 0, &q_neg(x))?)))
}

fn un_q_all(vc: &HfSet, y: &HfSet) -> Option<HfSet> {
    let anx = as_q_ex(&as_q_neg(y)?)?;
    let nx = shadow_unabst_form(vc, 0, &anx)?;
    as_q_neg(&nx)
}

fn match_induction(a0: &HfSet, stepc: &HfSet, allc: &HfSet) -> Option<AxSpec> {
    for vc in var_code_candidates(&[allc, a0]) {
        let Some(a_code) = un_q_all(&vc, allc) else {
            continue;
        };
        if !is_form_code(&a_code) || q_all(&vc, &a_code)? != *allc {
            continue;
        }
        if shadow_subst_form(&vc, &HfSet::empty(), &a_code) != Some(a0.clone()) {
            continue;
        }
        // the step: All v All w (A IMP (A(w) IMP A(v ◁ w)))
        let Some(inner1) = un_q_all(&vc, stepc) else {
            continue;
        };
        for wc in var_code_candidates(&[&inner1, &a_code]) {
            if wc == vc {
                continue;
            }
            // w fresh for A
            if shadow_subst_form(&wc, &HfSet::empty(), &a_code) != Some(a_code.clone()) {
                continue;
            }
            let Some(body) = un_q_all(&wc, &inner1) else {
                continue;
            };
            let Some(aj) = shadow_subst_form(&vc, &wc, &a_code) else {
                continue;
            };
            let Some(aij) = shadow_subst_form(&vc, &q_eats(&vc, &wc), &a_code) else {
                continue;
            };
            let expect = q_imp(&a_code, &q_imp(&aj, &aij));
            if body != expect {
                continue;
            }
            if q_all(&wc, &body).and_then(|x| q_all(&vc, &x)) != Some(stepc.clone()) {
                continue;
            }
            let a = decode_named_fm(&a_code)?;
            let i = var_of_code(&vc)?;
            let j = var_of_code(&wc)?;
            return Some(AxSpec::Induction { a, i, j });
        }
    }
    None
}

/// True iff x codes an axiom instance of the calculus.
pub fn axiom_code_check(x: &HfSet) -> bool {
    axiom_code_details(x).is_some()
}

// ---------------------------------------------------------------------------
// Encoding kernel derivations
// ---------------------------------------------------------------------------

/// Linearizes a hypothesis-free derivation into a coded proof sequence.
/// Repeated conclusions are shared; every element is an axiom code or
/// follows from strictly earlier elements.
pub fn encode_proof(t: &Theorem) -> Result<PrfWitness, ProvabilityError> {
    if !t.hyps().is_empty() {
        return Err(ProvabilityError::OpenHypotheses);
    }
    let map = replay_map(t.tree()).map_err(|e| ProvabilityError::NotAProof(e.to_string()))?;
    let mut coder = crate::coding::Coder::new();
    let mut elements: Vec<HfSet> = Vec::new();
    let mut index: HashMap<HfSet, usize> = HashMap::new();

    // postorder over the primitive tree
    enum Task {
        Visit(Arc<ProofTree>),
        Emit(Arc<ProofTree>),
    }
    let mut seen: HashMap<usize, ()> = HashMap::new();
    let mut stack = vec![Task::Visit(t.tree().clone())];
    while let Some(task) = stack.pop() {
        match task {
            Task::Visit(node) => {
                if seen.contains_key(&(Arc::as_ptr(&node) as usize)) {
                    continue;
                }
                let children: Vec<Arc<ProofTree>> = match node.as_ref() {
                    ProofTree::Mp(l, r) => vec![l.clone(), r.clone()],
                    ProofTree::Exists { prem, .. } => vec![prem.clone()],
                    ProofTree::Hyp(_) => {
                        return Err(ProvabilityError::OpenHypotheses);
                    }
                    ProofTree::Deduction { .. } | ProofTree::Subst { .. } => {
                        return Err(ProvabilityError::NotAProof(
                            "unexpanded macro node in a theorem tree".into(),
                        ));
                    }
                    _ => Vec::new(),
                };
                stack.push(Task::Emit(node));
                for c in children {
                    stack.push(Task::Visit(c));
                }
            }
            Task::Emit(node) => {
                let key = Arc::as_ptr(&node) as usize;
                if seen.contains_key(&key) {
                    continue;
                }
                seen.insert(key, ());
                let thm = &map[&key];
                let code = coder.code_of_fm(thm.concl());
                if !index.contains_key(&code) {
                    index.insert(code.clone(), elements.len());
                    elements.push(code);
                }
            }
        }
    }
    let y = elements
        .last()
        .cloned()
        .ok_or_else(|| ProvabilityError::NotAProof("empty derivation".into()))?;
    let pairs = elements
        .iter()
        .enumerate()
        .map(|(i, e)| HfSet::hpair(&HfSet::ord_of(i), e));
    Ok(PrfWitness {
        s: HfSet::from_children(pairs),
        k: HfSet::ord_of(elements.len() - 1),
        y,
    })
}

// ---------------------------------------------------------------------------
// Verifying coded proofs
// ---------------------------------------------------------------------------

/// The existential step at the value level: u = ⌜(EX i A) IMP B⌝ follows from
/// v = ⌜A IMP B⌝, with the eigenvariable not occurring in B.
fn exists_step_details(v: &HfSet, u: &HfSet) -> Option<HfSet> {
    let (a, b) = as_q_imp(v)?;
    let (lhs, b2) = as_q_imp(u)?;
    if b2 != b {
        return None;
    }
    let aa = as_q_ex(&lhs)?;
    for vc in var_code_candidates(&[&a, &b]) {
        if shadow_abst_form(&vc, 0, &a) == Some(aa.clone())
            && shadow_subst_form(&vc, &HfSet::empty(), &b) == Some(b.clone())
        {
            return Some(vc);
        }
    }
    None
}

/// The substitution step at the value level: u codes v with some term
/// substituted for some variable.
fn subst_step_details(v: &HfSet, u: &HfSet) -> Option<(HfSet, HfSet)> {
    for vc in var_code_candidates(&[v]) {
        let Some(tc) = solve_subst_u(&vc, v, u) else {
            continue;
        };
        if is_term_code(&tc) && shadow_subst_form(&vc, &tc, v) == Some(u.clone()) {
            return Some((vc, tc));
        }
    }
    None
}

fn witness_elements(w: &PrfWitness) -> Option<Vec<HfSet>> {
    if !w.s.is_lstseq(&w.k, &w.y) {
        return None;
    }
    let len = w.k.as_ord().ok()?;
    let mut elems = Vec::with_capacity(len + 1);
    for l in 0..=len {
        elems.push(w.s.seq_app(&HfSet::ord_of(l)).ok()?);
    }
    Some(elems)
}

/// Pure set-level check of a coded proof; reports the first failing index.
pub fn diagnose_prf(w: &PrfWitness) -> Result<(), Option<usize>> {
    let Some(elems) = witness_elements(w) else {
        return Err(None);
    };
    for l in 0..elems.len() {
        let el = &elems[l];
        if axiom_code_check(el) {
            continue;
        }
        let mut ok = false;
        'outer: for m in 0..l {
            for n in 0..l {
                // elems[n] codes elems[m] IMP el
                if elems[n] == q_imp(&elems[m], el) {
                    ok = true;
                    break 'outer;
                }
            }
            if exists_step_details(&elems[m], el).is_some()
                || subst_step_details(&elems[m], el).is_some()
            {
                ok = true;
                break 'outer;
            }
        }
        if !ok {
            return Err(Some(l));
        }
    }
    Ok(())
}

/// Boolean verdict of [`diagnose_prf`].
pub fn verify_prf(w: &PrfWitness) -> bool {
    diagnose_prf(w).is_ok()
}

// ---------------------------------------------------------------------------
// Decoding to kernel theorems
// ---------------------------------------------------------------------------

/// Reconstructs a kernel theorem from a verified witness: axiom codes map to
/// axiom constructors, coded inferences to the corresponding rules.
pub fn decode_prf(w: &PrfWitness) -> Result<Theorem, ProvabilityError> {
    let elems = witness_elements(w)
        .ok_or_else(|| ProvabilityError::NotAProof("not a list sequence".into()))?;
    let mut thms: Vec<Theorem> = Vec::with_capacity(elems.len());
    for l in 0..elems.len() {
        let el = &elems[l];
        let thm = if let Some(spec) = axiom_code_details(el) {
            match spec {
                AxSpec::Bool(kind, args) => boolean_axiom(kind, &args)?,
                AxSpec::EqAx(kind) => equality_axiom(kind),
                AxSpec::HfAx(kind) => hf_axiom(kind),
                AxSpec::Extra => extra_axiom(),
                AxSpec::Special { a, i, x } => special_axiom(&a, i, &x),
                AxSpec::Induction { a, i, j } => induction_axiom(&a, i, j)?,
            }
        } else {
            let mut found = None;
            'outer: for m in 0..l {
                for n in 0..l {
                    if elems[n] == q_imp(&elems[m], el) {
                        found = Some(mp(&thms[n], &thms[m])?);
                        break 'outer;
                    }
                }
                if let Some(vc) = exists_step_details(&elems[m], el) {
                    let i = var_of_code(&vc).expect("variable code");
                    found = Some(exists_rule(&thms[m], i)?);
                    break 'outer;
                }
                if let Some((vc, tc)) = subst_step_details(&elems[m], el) {
                    let i = var_of_code(&vc).expect("variable code");
                    let t = decode_named_tm(&tc).ok_or_else(|| {
                        ProvabilityError::NotAProof("substituted code is not a term".into())
                    })?;
                    found = Some(thm_subst(&thms[m], i, &t)?);
                    break 'outer;
                }
            }
            found.ok_or_else(|| {
                ProvabilityError::NotAProof(format!("element {l} is not an axiom or inference"))
            })?
        };
        // every reconstructed step must re-code to its element
        if code_of_fm(thm.concl()) != *el {
            return Err(ProvabilityError::NotAProof(format!(
                "element {l} does not match its reconstruction"
            )));
        }
        thms.push(thm);
    }
    let last = thms
        .pop()
        .ok_or_else(|| ProvabilityError::NotAProof("empty sequence".into()))?;
    if code_of_fm(last.concl()) != w.y {
        return Err(ProvabilityError::NotAProof(
            "final element does not code the target".into(),
        ));
    }
    Ok(last)
}

// ---------------------------------------------------------------------------
// Bounded proof search
// ---------------------------------------------------------------------------

/// Bounded backward search for a coded proof of the target. Semi-decision:
/// a `None` means the budget was exhausted, not that no proof exists.
pub fn pf_search(y: &HfSet, budget: u64) -> Option<PrfWitness> {
    let mut fuel = budget;
    let chain = search(y, 4, &mut fuel)?;
    let mut elements: Vec<HfSet> = Vec::new();
    for e in chain {
        if !elements.contains(&e) {
            elements.push(e);
        }
    }
    let pairs = elements
        .iter()
        .enumerate()
        .map(|(i, e)| HfSet::hpair(&HfSet::ord_of(i), e));
    let w = PrfWitness {
        s: HfSet::from_children(pairs),
        k: HfSet::ord_of(elements.len() - 1),
        y: y.clone(),
    };
    verify_prf(&w).then_some(w)
}

fn search(target: &HfSet, depth: u32, fuel: &mut u64) -> Option<Vec<HfSet>> {
    if *fuel == 0 {
        return None;
    }
    *fuel -= 1;
    if axiom_code_check(target) {
        return Some(vec![target.clone()]);
    }
    if depth == 0 {
        return None;
    }
    // substitution instance of a fixed axiom
    for (g, _) in fixed_axiom_codes() {
        let mut vars = Vec::new();
        collect_var_codes(g, &mut vars);
        for vc in vars {
            if let Some(tc) = solve_subst_u(&vc, g, target) {
                if is_term_code(&tc) && shadow_subst_form(&vc, &tc, g) == Some(target.clone()) {
                    return Some(vec![g.clone(), target.clone()]);
                }
            }
        }
    }
    // backward modus ponens through sentential axioms
    // target from (target∨target) IMP target
    if is_form_code(target) {
        let doubled = q_disj(target, target);
        if let Some(mut chain) = search(&doubled, depth - 1, fuel) {
            chain.push(q_imp(&doubled, target));
            chain.push(target.clone());
            return Some(chain);
        }
    }
    // target = a OR b from a, via a IMP (a OR b)
    if let Some((a, b)) = as_q_disj(target) {
        if is_form_code(&a) && is_form_code(&b) {
            if let Some(mut chain) = search(&a, depth - 1, fuel) {
                chain.push(q_imp(&a, target));
                chain.push(target.clone());
                return Some(chain);
            }
        }
    }
    None
}

// ---------------------------------------------------------------------------
// The provability formula
// ---------------------------------------------------------------------------

/// PfP(t): the provability formula instantiated at the coded target, with
/// deterministically chosen bound names.
pub fn build_pfp(t: &Term) -> Formula {
    FormulaTower::new().pfp(t)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::calculus::{deduction, hyp, taut};
    use crate::coding::code_of_tm;
    use crate::syntax::{alpha_eq, fls, imp, subst_fm};

    fn fls_imp_fls() -> Theorem {
        taut(&imp(fls(), fls())).unwrap()
    }

    #[test]
    fn axiom_codes_recognized() {
        let a = fls();
        let ident = boolean_axiom(BoolAxiom::Ident, &[a.clone()]).unwrap();
        assert!(axiom_code_check(&code_of_fm(ident.concl())));
        assert!(axiom_code_check(&code_of_fm(&EqAxiom::Refl.formula())));
        assert!(!axiom_code_check(&code_of_fm(&a)));
        // special axiom instances
        let i = Name(0);
        let body = Formula::mem(Term::var(i), Term::var(Name(1)));
        let sp = special_axiom(&body, i, &Term::eats(Term::zero(), Term::zero()));
        let spec = axiom_code_details(&code_of_fm(sp.concl()));
        assert!(matches!(spec, Some(AxSpec::Special { .. })));
        // induction axiom instances
        let ind = induction_axiom(&Formula::eq(Term::var(i), Term::var(i)), i, Name(1)).unwrap();
        let spec = axiom_code_details(&code_of_fm(ind.concl()));
        assert!(matches!(spec, Some(AxSpec::Induction { .. })));
    }

    #[test]
    fn encode_verify_decode_round_trip() {
        let t = fls_imp_fls();
        let w = encode_proof(&t).unwrap();
        assert!(verify_prf(&w));
        let back = decode_prf(&w).unwrap();
        assert!(alpha_eq(back.concl(), t.concl()));
        assert!(back.hyps().is_empty());
    }

    #[test]
    fn encode_rejects_hypotheses() {
        let t = hyp(fls());
        assert!(matches!(
            encode_proof(&t),
            Err(ProvabilityError::OpenHypotheses)
        ));
    }

    #[test]
    fn tampering_detected() {
        // a multi-step proof: Refl then its instance by substitution
        let refl_code = code_of_fm(&EqAxiom::Refl.formula());
        let inst_code = code_of_fm(&Formula::eq(Term::zero(), Term::zero()));
        let elements = [refl_code, inst_code.clone()];
        let pairs = elements
            .iter()
            .enumerate()
            .map(|(i, e)| HfSet::hpair(&HfSet::ord_of(i), e));
        let w = PrfWitness {
            s: HfSet::from_children(pairs),
            k: HfSet::ord_of(1),
            y: inst_code,
        };
        assert!(verify_prf(&w));
        // replace the first element with junk
        let junk = HfSet::htuple(3);
        let tampered_s = HfSet::from_children(
            w.s.children()
                .iter()
                .map(|p| {
                    let (idx, el) = p.unpair().unwrap();
                    if idx == HfSet::ord_of(0) {
                        HfSet::hpair(&idx, &junk)
                    } else {
                        HfSet::hpair(&idx, &el)
                    }
                })
                .collect::<Vec<_>>(),
        );
        let tampered = PrfWitness {
            s: tampered_s,
            k: w.k.clone(),
            y: w.y.clone(),
        };
        assert!(!verify_prf(&tampered));
        assert!(matches!(diagnose_prf(&tampered), Err(Some(_))));
        assert!(decode_prf(&tampered).is_err());
        // padding beyond k with junk pairs is allowed
        let padded_s = w.s.eats(&HfSet::hpair(&HfSet::ord_of(40), &junk));
        let padded = PrfWitness {
            s: padded_s,
            k: w.k.clone(),
            y: w.y.clone(),
        };
        assert!(verify_prf(&padded));
    }

    #[test]
    fn deduction_and_exists_encode() {
        // a theorem whose derivation includes an Exists step:
        // ⊢ (EX x0 (x0 EQ x0)) IMP (0 EQ 0)
        let i = Name(0);
        let a = Formula::eq(Term::var(i), Term::var(i));
        let zz = crate::calculus::refl_of(&Term::zero());
        let prem = crate::calculus::imp_triv(&zz, &a).unwrap();
        let ex = exists_rule(&prem, i).unwrap();
        let w = encode_proof(&ex).unwrap();
        assert!(verify_prf(&w));
        let back = decode_prf(&w).unwrap();
        assert!(alpha_eq(back.concl(), ex.concl()));
        // deduction-produced derivations also encode
        let d = deduction(&crate::calculus::hyp(fls()), &fls());
        let w2 = encode_proof(&d).unwrap();
        assert!(verify_prf(&w2));
    }

    #[test]
    fn subst_step_verifies() {
        // hand-build a two-element witness: Refl, then its instance at 0
        let refl_code = code_of_fm(&EqAxiom::Refl.formula());
        let inst = Formula::eq(Term::zero(), Term::zero());
        let inst_code = code_of_fm(&inst);
        let elements = [refl_code, inst_code.clone()];
        let pairs = elements
            .iter()
            .enumerate()
            .map(|(i, e)| HfSet::hpair(&HfSet::ord_of(i), e));
        let w = PrfWitness {
            s: HfSet::from_children(pairs),
            k: HfSet::ord_of(1),
            y: inst_code,
        };
        assert!(verify_prf(&w));
        let t = decode_prf(&w).unwrap();
        assert_eq!(*t.concl(), inst);
    }

    #[test]
    fn pf_search_examples() {
        // depth-1 axiom
        let target = code_of_fm(&imp(fls(), fls()));
        let w = pf_search(&target, 1000).expect("axiom found");
        assert!(verify_prf(&w));
        // Refl instance via substitution
        let eq00 = code_of_fm(&Formula::eq(Term::zero(), Term::zero()));
        let w = pf_search(&eq00, 5000).expect("substitution instance found");
        assert!(verify_prf(&w));
        assert_eq!(w.y, eq00);
        // no proof of the false sentence
        assert!(pf_search(&code_of_fm(&fls()), 10_000).is_none());
    }

    #[test]
    fn build_pfp_is_ground_and_stable() {
        let q = crate::coding::quote_fm(&fls());
        let f1 = build_pfp(&q);
        let f2 = build_pfp(&q);
        assert!(f1.is_ground());
        assert_eq!(f1, f2);
        assert_eq!(code_of_fm(&f1), code_of_fm(&f2));
    }

    #[test]
    fn pfp_semantic_witness() {
        // ⊢ FLS IMP FLS, encoded, then checked against PfP semantically
        let t = fls_imp_fls();
        let w = encode_proof(&t).unwrap();
        let mut tower = FormulaTower::new();
        let pfp = tower.pfp(&crate::coding::quote_fm(t.concl()));
        let oracle = tower.oracle();
        let verdict = crate::semantics::eval_with_witness_hinted(
            &crate::semantics::Env::e0(),
            &pfp,
            &[w.s.clone(), w.k.clone()],
            200_000,
            Some(&oracle),
        )
        .unwrap();
        assert_eq!(verdict, crate::semantics::TriBool::True);
    }

    #[test]
    fn shadow_subst_unique_matches_subst_fm() {
        let i = Name(0);
        let a = Formula::ex(
            Name(1),
            Formula::mem(Term::var(i), Term::eats(Term::var(Name(1)), Term::var(i))),
        );
        let t = Term::eats(Term::zero(), Term::zero());
        let lhs = shadow_subst_form(
            &crate::coding::q_var(i),
            &code_of_tm(&t),
            &code_of_fm(&a),
        )
        .unwrap();
        assert_eq!(lhs, code_of_fm(&subst_fm(&a, i, &t)));
    }
}
