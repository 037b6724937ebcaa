//! HF facts derived inside the calculus: membership laws from HF1/HF2,
//! foundation and extensionality by the induction scheme, and the subset
//! lemmas the Σ reductions rest on. These are kernel derivations, not
//! meta-level shortcuts; the expensive closed theorems are computed once and
//! cached.

use crate::calculus::{
    all2_elim, all2_intro, all_elim, all_intro, alpha_restate, commute_rule, conj_elim1,
    conj_elim2, conj_intro, contract, deduction, disj_elim, disj_intro1, disj_intro2,
    eq_subst_fm, eq_sym, exfalso_imp, exists_rule, hf_axiom, hyp, iff_intro, iff_mp,
    iff_mp_rev, induction_rule, modus_tollens, mp, refl_of, special_axiom, weaken_r,
    HfAxiom, KernelError, Theorem,
};
use crate::syntax::{
    all, all2, and, as_all, as_imp, fresh_name, imp, subset, subst_fm, Formula, Name,
    Term,
};
use std::sync::OnceLock;

fn names_of(parts: &[&[Name]]) -> Vec<Name> {
    let mut v: Vec<Name> = parts.iter().flat_map(|p| p.iter().copied()).collect();
    v.sort();
    v.dedup();
    v
}

/// ⊢ NEG (t IN 0).
pub fn mem_zero_refuted(t: &Term) -> Theorem {
    let hf1 = hf_axiom(HfAxiom::Hf1);
    let inst = all_elim(&hf1, &Term::zero()).expect("HF1 is universal");
    let allx = iff_mp(&inst, &refl_of(&Term::zero())).expect("0 = 0");
    all_elim(&allx, t).expect("inner universal")
}

/// ⊢ (t EQ 0) IFF (All x. NEG (x IN t)).
pub fn eq_zero_iff(t: &Term) -> Theorem {
    let hf1 = hf_axiom(HfAxiom::Hf1);
    all_elim(&hf1, t).expect("HF1 is universal")
}

/// ⊢ (s IN u1 ◁ u2) IFF ((s IN u1) OR (s EQ u2)).
pub fn mem_eats_iff(s: &Term, u1: &Term, u2: &Term) -> Theorem {
    let hf2 = hf_axiom(HfAxiom::Hf2);
    let eats = Term::eats(u1.clone(), u2.clone());
    let e = all_elim(&hf2, &eats).expect("HF2 universal");
    let e = all_elim(&e, u1).expect("HF2 universal");
    let e = all_elim(&e, u2).expect("HF2 universal");
    let allu = iff_mp(&e, &refl_of(&eats)).expect("u1◁u2 = u1◁u2");
    all_elim(&allu, s).expect("inner universal")
}

fn foundation_phi() -> (Formula, Name, Name, Name) {
    let i = Name(0);
    let z = Name(1);
    let j = Name(2);
    let not_self = |t: Term| Formula::neg(Formula::mem(t.clone(), t));
    let phi = and(
        not_self(Term::var(i)),
        all2(z, &Term::var(i), not_self(Term::var(z))).expect("z fresh for i"),
    );
    (phi, i, z, j)
}

/// ⊢ All i (NEG (i IN i) AND All2 z i (NEG (z IN z))): foundation by the
/// induction scheme.
pub fn foundation_thm() -> &'static Theorem {
    static THM: OnceLock<Theorem> = OnceLock::new();
    THM.get_or_init(|| {
        let (phi, i, z, j) = foundation_phi();
        let not_self = |t: &Term| Formula::neg(Formula::mem(t.clone(), t.clone()));

        // base: φ(0)
        let base = {
            let p1 = mem_zero_refuted(&Term::zero());
            let body = exfalso_imp(&mem_zero_refuted(&Term::var(z)), &not_self(&Term::var(z)))
                .expect("vacuous guard");
            let p2 = all_intro(&body, z).expect("closed");
            let got = conj_intro(&p1, &p2).expect("conjunction");
            alpha_restate(&got, &subst_fm(&phi, i, &Term::zero())).expect("α-aligned")
        };

        // step: φ(i) → φ(j) → φ(i◁j), generalized
        let step = {
            let vi = Term::var(i);
            let vj = Term::var(j);
            let eats = Term::eats(vi.clone(), vj.clone());
            let phi_j = subst_fm(&phi, i, &vj);
            let h_i = hyp(phi.clone());
            let h_j = hyp(phi_j.clone());
            let _ = conj_elim1(&h_i).expect("conj");
            let phi_i_2 = conj_elim2(&h_i).expect("conj");
            let phi_j_1 = conj_elim1(&h_j).expect("conj");

            // part 2: every member of i◁j is non-self-membered
            let part2 = {
                let h_mem = hyp(Formula::mem(Term::var(z), eats.clone()));
                let cases = iff_mp(&mem_eats_iff(&Term::var(z), &vi, &vj), &h_mem).expect("HF2");
                let case1 = {
                    let hm = hyp(Formula::mem(Term::var(z), vi.clone()));
                    let t = all2_elim(&phi_i_2, &Term::var(z), &hm).expect("bounded elim");
                    deduction(&t, hm.concl())
                };
                let case2 = {
                    let he = hyp(Formula::eq(Term::var(z), vj.clone()));
                    let w = Name(5);
                    let tpl = not_self(&Term::var(w));
                    let r = eq_subst_fm(&eq_sym(&he).expect("eq"), &tpl, w).expect("subst");
                    let t = mp(&r, &phi_j_1).expect("¬(j∈j)");
                    deduction(&t, he.concl())
                };
                let body = disj_elim(&cases, &case1, &case2).expect("case analysis");
                all2_intro(&body, z, &eats).expect("z fresh")
            };

            // part 1: i◁j is not self-membered
            let part1 = {
                let a = Formula::mem(eats.clone(), eats.clone());
                let ha = hyp(a.clone());
                let cases = iff_mp(&mem_eats_iff(&eats, &vi, &vj), &ha).expect("HF2");
                let case1 = {
                    let hm = hyp(Formula::mem(eats.clone(), vi.clone()));
                    let t = all2_elim(&phi_i_2, &eats, &hm).expect("bounded elim");
                    deduction(&t, hm.concl())
                };
                let case2 = {
                    let he = hyp(Formula::eq(eats.clone(), vj.clone()));
                    let w = Name(5);
                    let tpl = not_self(&Term::var(w));
                    let r = eq_subst_fm(&eq_sym(&he).expect("eq"), &tpl, w).expect("subst");
                    let t = mp(&r, &phi_j_1).expect("¬(j∈j)");
                    deduction(&t, he.concl())
                };
                let not_a = disj_elim(&cases, &case1, &case2).expect("case analysis");
                let d = deduction(&not_a, &a);
                // A IMP ¬A is ¬A ∨ ¬A
                contract(&d).expect("closes")
            };

            let phi_eats = conj_intro(&part1, &part2).expect("conjunction");
            let phi_eats = alpha_restate(&phi_eats, &subst_fm(&phi, i, &eats)).expect("restate");
            let d = deduction(&deduction(&phi_eats, &phi_j), &phi);
            all_intro(&all_intro(&d, j).expect("fresh"), i).expect("fresh")
        };

        induction_rule(&base, &step, &phi, i, j).expect("induction applies")
    })
}

/// ⊢ NEG (t IN t).
pub fn mem_irrefl(t: &Term) -> Theorem {
    let inst = all_elim(foundation_thm(), t).expect("universal");
    conj_elim1(&inst).expect("conjunction")
}

/// ⊢ All i All w ((i SUBS w AND w SUBS i) IMP i EQ w): extensionality, proved
/// by the induction scheme with HF1/HF2 characterizing equality to 0 and to
/// an eats.
pub fn extensionality_thm() -> &'static Theorem {
    static THM: OnceLock<Theorem> = OnceLock::new();
    THM.get_or_init(|| {
        let i = Name(0);
        let w = Name(1);
        let j = Name(2);
        let u = Name(3);
        let vi = Term::var(i);
        let vw = Term::var(w);
        let vj = Term::var(j);
        let vu = Term::var(u);
        let a = all(
            w,
            imp(
                and(subset(&vi, &vw), subset(&vw, &vi)),
                Formula::eq(vi.clone(), vw.clone()),
            ),
        );

        // base: A(0)
        let base = {
            let a0 = subst_fm(&a, i, &Term::zero());
            let (w0, body) = as_all(&a0).expect("universal");
            let (prem, _) = as_imp(&body).expect("implication");
            let h = hyp(prem.clone());
            let h2 = conj_elim2(&h).expect("w ⊆ 0");
            // ∀u. ¬(u ∈ w)
            let imp_w0 = all_elim(&h2, &vu).expect("All2 elim");
            let no_mem = modus_tollens(&imp_w0, &mem_zero_refuted(&vu)).expect("refuted");
            let all_no = all_intro(&no_mem, u).expect("u fresh");
            let weq0 = iff_mp_rev(&eq_zero_iff(&Term::var(w0)), &all_no).expect("HF1");
            let zeqw = eq_sym(&weq0).expect("eq");
            let d = deduction(&zeqw, &prem);
            let d = alpha_restate(&d, &body).expect("restate");
            all_intro(&d, w0).expect("fresh")
        };

        // step: A(i◁j) outright (the induction hypotheses are not needed)
        let step = {
            let eats = Term::eats(vi.clone(), vj.clone());
            let a_eats = subst_fm(&a, i, &eats);
            let (wq, body) = as_all(&a_eats).expect("universal");
            let (prem, _) = as_imp(&body).expect("implication");
            let vwq = Term::var(wq);
            let h = hyp(prem.clone());
            let h1 = conj_elim1(&h).expect("i◁j ⊆ w");
            let h2 = conj_elim2(&h).expect("w ⊆ i◁j");
            // HF2 instance: (w = i◁j) IFF ∀u (u∈w ⟷ (u∈i ∨ u=j))
            let hf2 = hf_axiom(HfAxiom::Hf2);
            let e = all_elim(&hf2, &vwq).expect("closure");
            let e = all_elim(&e, &vi).expect("closure");
            let e = all_elim(&e, &vj).expect("closure");
            // forward half of the inner iff
            let fwd = {
                let hm = hyp(Formula::mem(vu.clone(), vwq.clone()));
                let m = mp(&all_elim(&h2, &vu).expect("All2"), &hm).expect("mem");
                let m = iff_mp(&mem_eats_iff(&vu, &vi, &vj), &m).expect("HF2");
                deduction(&m, hm.concl())
            };
            let bwd = {
                let disj = Formula::disj(
                    Formula::mem(vu.clone(), vi.clone()),
                    Formula::eq(vu.clone(), vj.clone()),
                );
                let hd = hyp(disj.clone());
                let m = iff_mp_rev(&mem_eats_iff(&vu, &vi, &vj), &hd).expect("HF2");
                let m = mp(&all_elim(&h1, &vu).expect("All2"), &m).expect("mem");
                deduction(&m, &disj)
            };
            let inner = iff_intro(&fwd, &bwd).expect("iff");
            let all_inner = all_intro(&inner, u).expect("u fresh");
            let weq = iff_mp_rev(&e, &all_inner).expect("HF2 characterization");
            let goal = eq_sym(&weq).expect("eq");
            let d = deduction(&goal, &prem);
            let d = alpha_restate(&d, &body).expect("restate");
            let a_eats_proved = all_intro(&d, wq).expect("fresh");
            // weaken in the unused induction premises and close
            let k1 = commute_rule(
                &weaken_r(&a_eats_proved, &Formula::neg(subst_fm(&a, i, &vj))).expect("disj"),
            )
            .expect("disj");
            let k2 = commute_rule(&weaken_r(&k1, &Formula::neg(a.clone())).expect("disj"))
                .expect("disj");
            all_intro(&all_intro(&k2, j).expect("fresh"), i).expect("fresh")
        };

        induction_rule(&base, &step, &a, i, j).expect("induction applies")
    })
}

/// From H ⊢ t SUBS u and H' ⊢ u SUBS t conclude t EQ u.
pub fn ext_rule(t1: &Theorem, t2: &Theorem) -> Result<Theorem, KernelError> {
    let (t, u) = crate::syntax::as_subset(t1.concl())
        .ok_or_else(|| KernelError::ShapeMismatch("expected a subset formula".into()))?;
    let inst = all_elim(&all_elim(extensionality_thm(), &t)?, &u)?;
    mp(&inst, &conj_intro(t1, t2)?)
}

/// ⊢ t SUBS t.
pub fn subset_refl(t: &Term) -> Theorem {
    let z = fresh_name(t.free_vars());
    let guard = Formula::mem(Term::var(z), t.clone());
    let d = deduction(&hyp(guard.clone()), &guard);
    all_intro(&d, z).expect("z fresh")
}

/// ⊢ 0 SUBS u.
pub fn subset_zero(u: &Term) -> Theorem {
    let z = fresh_name(u.free_vars());
    let body = exfalso_imp(
        &mem_zero_refuted(&Term::var(z)),
        &Formula::mem(Term::var(z), u.clone()),
    )
    .expect("vacuous guard");
    all_intro(&body, z).expect("z fresh")
}

/// ⊢ (t1◁t2 SUBS u) IFF ((t1 SUBS u) AND (t2 IN u)).
pub fn eats_subset_iff(t1: &Term, t2: &Term, u: &Term) -> Theorem {
    let eats = Term::eats(t1.clone(), t2.clone());
    let lhs = subset(&eats, u);
    let z = fresh_name(&names_of(&[
        t1.free_vars(),
        t2.free_vars(),
        u.free_vars(),
    ]));
    let vz = Term::var(z);

    let fwd = {
        let h = hyp(lhs.clone());
        let part1 = {
            let hz = hyp(Formula::mem(vz.clone(), t1.clone()));
            let d = disj_intro1(&hz, &Formula::eq(vz.clone(), t2.clone())).expect("disj");
            let m = iff_mp_rev(&mem_eats_iff(&vz, t1, t2), &d).expect("HF2");
            let m = mp(&all_elim(&h, &vz).expect("All2"), &m).expect("mem");
            let d = deduction(&m, hz.concl());
            all_intro(&d, z).expect("fresh")
        };
        let part2 = {
            let d = disj_intro2(&refl_of(t2), &Formula::mem(t2.clone(), t1.clone())).expect("disj");
            let m = iff_mp_rev(&mem_eats_iff(t2, t1, t2), &d).expect("HF2");
            mp(&all_elim(&h, t2).expect("All2"), &m).expect("mem")
        };
        let cj = conj_intro(&part1, &part2).expect("conj");
        deduction(&cj, &lhs)
    };

    let rhs = and(subset(t1, u), Formula::mem(t2.clone(), u.clone()));
    let bwd = {
        let h = hyp(rhs.clone());
        let h1 = conj_elim1(&h).expect("conj");
        let h2 = conj_elim2(&h).expect("conj");
        let hz = hyp(Formula::mem(vz.clone(), eats.clone()));
        let cases = iff_mp(&mem_eats_iff(&vz, t1, t2), &hz).expect("HF2");
        let case1 = {
            let hm = hyp(Formula::mem(vz.clone(), t1.clone()));
            let m = mp(&all_elim(&h1, &vz).expect("All2"), &hm).expect("mem");
            deduction(&m, hm.concl())
        };
        let case2 = {
            let he = hyp(Formula::eq(vz.clone(), t2.clone()));
            let w = fresh_name(&names_of(&[u.free_vars(), &[z]]));
            let tpl = Formula::mem(Term::var(w), u.clone());
            let r = eq_subst_fm(&eq_sym(&he).expect("eq"), &tpl, w).expect("subst");
            let m = mp(&r, &h2).expect("t2 ∈ u");
            deduction(&m, he.concl())
        };
        let body = disj_elim(&cases, &case1, &case2).expect("case analysis");
        let d = deduction(&body, hz.concl());
        let gen = all_intro(&d, z).expect("fresh");
        let gen = alpha_restate(&gen, &lhs).expect("restate as the subset formula");
        deduction(&gen, &rhs)
    };

    iff_intro(&fwd, &bwd).expect("iff")
}

/// ⊢ (t EQ u) IFF ((t SUBS u) AND (u SUBS t)).
pub fn eq_subset_split(t: &Term, u: &Term) -> Theorem {
    let lhs = Formula::eq(t.clone(), u.clone());
    let fwd = {
        let h = hyp(lhs.clone());
        let w = fresh_name(&names_of(&[t.free_vars(), u.free_vars()]));
        // t ⊆ w rewritten along t = u
        let tpl1 = subset(t, &Term::var(w));
        let r1 = eq_subst_fm(&h, &tpl1, w).expect("subst");
        // tpl1(w:=t) is t ⊆ t
        let r1 = alpha_restate(&r1, &imp(subset(t, t), subset(t, u))).expect("α restate");
        let s1 = mp(&r1, &subset_refl(t)).expect("t ⊆ t");
        let tpl2 = subset(u, &Term::var(w));
        let r2 = eq_subst_fm(&eq_sym(&h).expect("eq"), &tpl2, w).expect("subst");
        let r2 = alpha_restate(&r2, &imp(subset(u, u), subset(u, t))).expect("α restate");
        let s2 = mp(&r2, &subset_refl(u)).expect("u ⊆ u");
        let cj = conj_intro(&s1, &s2).expect("conj");
        deduction(&cj, &lhs)
    };
    let rhs = and(subset(t, u), subset(u, t));
    let bwd = {
        let h = hyp(rhs.clone());
        let e = ext_rule(
            &conj_elim1(&h).expect("conj"),
            &conj_elim2(&h).expect("conj"),
        )
        .expect("extensionality");
        deduction(&e, &rhs)
    };
    iff_intro(&fwd, &bwd).expect("iff")
}

/// ⊢ (All2 i t A) IFF (EX j (Var j EQ t AND All2 i (Var j) A)) for j fresh.
pub fn all2_term_iff(i: Name, t: &Term, a: &Formula, j: Name) -> Theorem {
    let lhs = all2(i, t, a.clone()).expect("i fresh for the bound");
    let body = and(
        Formula::eq(Term::var(j), t.clone()),
        all2(i, &Term::var(j), a.clone()).expect("j is a variable"),
    );
    let rhs = Formula::ex(j, body.clone());

    let fwd = {
        let h = hyp(lhs.clone());
        let witness = conj_intro(&refl_of(t), &h).expect("conj");
        let sp = alpha_restate(
            &special_axiom(&body, j, t),
            &imp(witness.concl().clone(), rhs.clone()),
        )
        .expect("α restate of the substituted body");
        let inst = mp(&sp, &witness).expect("witness");
        deduction(&inst, &lhs)
    };

    let bwd = {
        let hb = hyp(body.clone());
        let b1 = conj_elim1(&hb).expect("conj");
        let b2 = conj_elim2(&hb).expect("conj");
        let w = fresh_name(&names_of(&[
            a.free_vars(),
            t.free_vars(),
            &[i, j],
        ]));
        let tpl = all2(i, &Term::var(w), a.clone()).expect("w fresh");
        let r = eq_subst_fm(&b1, &tpl, w).expect("subst");
        let r = alpha_restate(&r, &imp(b2.concl().clone(), lhs.clone())).expect("α restate");
        let out = mp(&r, &b2).expect("rewrite the bound");
        let d = deduction(&out, &body);
        exists_rule(&d, j).expect("j fresh for the target")
    };

    iff_intro(&fwd, &bwd).expect("iff")
}

/// A closed strict Σ sentence that is provably false: EX v (v IN v).
pub fn false_strict() -> Formula {
    let v = Name(0);
    Formula::ex(v, Formula::mem(Term::var(v), Term::var(v)))
}

/// ⊢ NEG (EX v (v IN v)), from foundation.
pub fn false_strict_refuted() -> &'static Theorem {
    static THM: OnceLock<Theorem> = OnceLock::new();
    THM.get_or_init(|| {
        let v = Name(0);
        let f = false_strict();
        let nf = Formula::neg(f);
        let step = exfalso_imp(&mem_irrefl(&Term::var(v)), &nf).expect("vacuous");
        let ex = exists_rule(&step, v).expect("v not free in the goal");
        // (EX v (v∈v)) IMP ¬(EX v (v∈v)) is ¬P ∨ ¬P
        contract(&ex).expect("closes")
    })
}

/// A closed strict Σ sentence that is provably true:
/// EX v (All2 z v (z IN z)), witnessed by 0.
pub fn true_strict() -> Formula {
    let v = Name(0);
    let z = Name(1);
    Formula::ex(
        v,
        all2(z, &Term::var(v), Formula::mem(Term::var(z), Term::var(z)))
            .expect("z fresh for v"),
    )
}

/// ⊢ EX v (All2 z v (z IN z)).
pub fn true_strict_proved() -> &'static Theorem {
    static THM: OnceLock<Theorem> = OnceLock::new();
    THM.get_or_init(|| {
        let v = Name(0);
        let z = Name(1);
        let body = all2(z, &Term::var(v), Formula::mem(Term::var(z), Term::var(z)))
            .expect("z fresh");
        let at_zero = {
            let vac = exfalso_imp(
                &mem_zero_refuted(&Term::var(z)),
                &Formula::mem(Term::var(z), Term::var(z)),
            )
            .expect("vacuous guard");
            all_intro(&vac, z).expect("closed")
        };
        let sp = alpha_restate(
            &special_axiom(&body, v, &Term::zero()),
            &imp(at_zero.concl().clone(), true_strict()),
        )
        .expect("α restate");
        mp(&sp, &at_zero).expect("witness 0")
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::calculus::check_proof;
    use crate::semantics::{eval_fm, Env, TriBool};

    #[test]
    fn membership_laws() {
        let zero = Term::zero();
        let one = Term::eats(zero.clone(), zero.clone());
        let t = mem_zero_refuted(&one);
        assert!(t.hyps().is_empty());
        assert_eq!(*t.concl(), Formula::neg(Formula::mem(one.clone(), zero.clone())));
        let m = mem_eats_iff(&zero, &zero, &zero);
        assert!(m.hyps().is_empty());
        assert_eq!(eval_fm(&Env::e0(), m.concl(), 64), TriBool::True);
    }

    #[test]
    fn foundation_and_extensionality() {
        let f = foundation_thm();
        assert!(f.hyps().is_empty());
        let ir = mem_irrefl(&Term::zero());
        assert_eq!(
            *ir.concl(),
            Formula::neg(Formula::mem(Term::zero(), Term::zero()))
        );
        let e = extensionality_thm();
        assert!(e.hyps().is_empty());
        // replay both through the kernel
        assert!(check_proof(f.tree()).is_ok());
        assert!(check_proof(e.tree()).is_ok());
    }

    #[test]
    fn ext_rule_on_grounds() {
        let zero = Term::zero();
        let t = ext_rule(&subset_zero(&zero), &subset_zero(&zero)).unwrap();
        assert_eq!(*t.concl(), Formula::eq(zero.clone(), zero));
        assert!(t.hyps().is_empty());
    }

    #[test]
    fn subset_lemmas_sound() {
        let e0 = Env::e0();
        let zero = Term::zero();
        let one = Term::eats(zero.clone(), zero.clone());
        for t in [
            subset_refl(&one),
            subset_zero(&one),
            eats_subset_iff(&zero, &zero, &one),
            eq_subset_split(&zero, &one),
        ] {
            assert!(t.hyps().is_empty());
            assert_ne!(eval_fm(&e0, t.concl(), 500), TriBool::False, "{}", t.concl());
        }
    }

    #[test]
    fn strict_constants() {
        let e0 = Env::e0();
        assert!(true_strict_proved().hyps().is_empty());
        assert_eq!(eval_fm(&e0, &true_strict(), 16), TriBool::True);
        assert!(false_strict_refuted().hyps().is_empty());
        // the refuted sentence itself cannot be decided by search, only its
        // negation is proved
        assert_eq!(
            *false_strict_refuted().concl(),
            Formula::neg(false_strict())
        );
    }

    #[test]
    fn all2_term_iff_shape() {
        let i = Name(0);
        let j = Name(3);
        let t = Term::eats(Term::zero(), Term::zero());
        let a = Formula::mem(Term::var(i), Term::zero());
        let th = all2_term_iff(i, &t, &a, j);
        assert!(th.hyps().is_empty());
        assert_ne!(eval_fm(&Env::e0(), th.concl(), 200), TriBool::False);
    }
}
