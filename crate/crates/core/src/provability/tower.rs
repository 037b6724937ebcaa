//! The formula tower: coded-syntax predicates written as formulas of the
//! embedded language, mirroring the shadow predicates.
//!
//! Every template is a Σ formula by construction: atoms combined with OR,
//! AND, EX and variable-bounded ALL2, inequalities expressed by ordinal
//! trichotomy, and each recursion expressed as the existence of a sequence
//! whose elements satisfy a base-or-step condition.
//!
//! Instantiations are memoized, so repeated subformulas share nodes. While a
//! template is built, the existentials whose witnesses cannot be found by
//! guard solving (sequence witnesses, abstraction preimages, substituted
//! terms) are registered with a solver; [`TowerOracle`] serves those to the
//! evaluator, which is how tower formulas become checkable against concrete
//! witnesses.

use crate::coding::{
    build_abst_form_witness, build_subst_form_witness, build_subst_term_witness,
    collect_var_codes, q_eats_term, q_disj_term, q_eq_term, q_ex_term, q_imp_term, q_ind_term,
    q_mem_term, q_neg_term, quote_fm, shadow_subst_form, shadow_unabst_form, SeqWitness,
    SyntaxKind,
};
use crate::hf_core::HfSet;
use crate::semantics::{eval_tm, Env, WitnessHints};
use crate::syntax::{
    all2, and, fresh_names, subset, Formula, Name, Term,
};
use std::collections::HashMap;

fn fm_and(parts: Vec<Formula>) -> Formula {
    let mut it = parts.into_iter().rev();
    let mut acc = it.next().expect("nonempty conjunction");
    for f in it {
        acc = and(f, acc);
    }
    acc
}

fn fm_or(parts: Vec<Formula>) -> Formula {
    let mut it = parts.into_iter().rev();
    let mut acc = it.next().expect("nonempty disjunction");
    for f in it {
        acc = Formula::disj(f, acc);
    }
    acc
}

fn mem(a: Term, b: Term) -> Formula {
    Formula::mem(a, b)
}

fn eq(a: Term, b: Term) -> Formula {
    Formula::eq(a, b)
}

fn pair_in(a: Term, b: Term, s: Term) -> Formula {
    mem(Term::hpair(a, b), s)
}

/// Witness solvers attached to existentials whose bodies the guard analysis
/// cannot crack.
#[derive(Clone, Debug)]
pub enum Solver {
    /// Sequence relation of a witness builder.
    SeqWitnessS(SeqSpec),
    /// Final index of a witness builder.
    SeqWitnessK(SeqSpec),
    /// Variable codes occurring in the given values, plus a fresh one.
    VarCands(Vec<Term>),
    /// x with abst(v, 0, x) equal to the abstracted code.
    Unabst { v: Term, abstracted: Term },
    /// x with ⌜All v x⌝ equal to the given code.
    UnQAll { v: Term, from: Term },
    /// subst(v, u, x).
    SubstImage { v: Term, u: Term, x: Term },
    /// u with subst(v, u, x) = xp.
    SubstSolveU { v: Term, x: Term, xp: Term },
    /// The code of the canonical term denoting x.
    HrpImage { x: Term },
}

#[derive(Clone, Debug)]
pub enum SeqSpec {
    Syntax { kind: SyntaxKind, target: Term },
    StTerm { v: Term, u: Term, x: Term },
    SubstForm { v: Term, u: Term, x: Term },
    AbstForm { v: Term, i: Term, x: Term },
    Hrp { x: Term },
}

#[derive(Copy, Clone, PartialEq, Eq, Hash, Debug)]
enum TemplateId {
    OrdP,
    HDomainIncl,
    HFunSigma,
    LstSeqP,
    VarP,
    IndP,
    SeqCTermP(bool),
    CTermP(bool),
    SeqStTermP,
    SubstTermP,
    AbstTermP,
    SeqSubstFormP,
    SubstFormP,
    SeqAbstFormP,
    AbstFormP,
    AtomicP,
    MakeFormP,
    SeqFormP,
    FormP,
    QAllP,
    BooleanAxP,
    EqualityAxP,
    HfAxP,
    ExtraAxP,
    SpecialAxP,
    InductionAxP,
    AxiomP,
    ExistsStepP,
    SubstStepP,
    PrfP,
    PfP,
    SeqHrpP,
    HrpP,
    KrpP,
}

/// Builder and registry for the tower formulas.
#[derive(Default)]
pub struct FormulaTower {
    cache: HashMap<(TemplateId, Vec<Term>), Formula>,
    registry: HashMap<usize, Solver>,
}

impl FormulaTower {
    pub fn new() -> FormulaTower {
        FormulaTower::default()
    }

    /// Read-only view of the solver registry for the evaluator oracle.
    pub fn oracle(&self) -> TowerOracle<'_> {
        TowerOracle { tower: self }
    }

    fn cached(
        &mut self,
        id: TemplateId,
        args: &[Term],
        build: impl FnOnce(&mut Self, &[Name]) -> Formula,
    ) -> Formula {
        let key = (id, args.to_vec());
        if let Some(f) = self.cache.get(&key) {
            return f.clone();
        }
        let mut avoid: Vec<Name> = Vec::new();
        for a in args {
            avoid.extend_from_slice(a.free_vars());
        }
        let fresh = fresh_names(&avoid, 24);
        let f = build(self, &fresh);
        self.cache.insert(key, f.clone());
        f
    }

    /// Wraps a body in an existential, attaching a witness solver.
    fn ex_solved(&mut self, n: Name, body: Formula, solver: Solver) -> Formula {
        self.registry.insert(body.ptr_id(), solver);
        Formula::ex(n, body)
    }

    // -- basic set predicates ----------------------------------------------

    /// x is an ordinal: every member is a transitive subset.
    pub fn ordp(&mut self, x: &Term) -> Formula {
        self.cached(TemplateId::OrdP, &[x.clone()], |_, names| {
            let [y, z, ..] = names else { unreachable!() };
            let vy = Term::var(*y);
            let vz = Term::var(*z);
            all2(
                *y,
                x,
                and(
                    subset(&vy, x),
                    all2(*z, &vy, subset(&vz, &vy)).expect("fresh"),
                ),
            )
            .expect("fresh")
        })
    }

    /// Every index up to the bound appears in the domain of s.
    pub fn hdomain_incl(&mut self, s: &Term, bound: &Term) -> Formula {
        self.cached(
            TemplateId::HDomainIncl,
            &[s.clone(), bound.clone()],
            |_, names| {
                let [l, v, ..] = names else { unreachable!() };
                all2(
                    *l,
                    bound,
                    Formula::ex(*v, pair_in(Term::var(*l), Term::var(*v), s.clone())),
                )
                .expect("fresh")
            },
        )
    }

    /// s is a set of pairs with ordinal keys, single-valued; key inequality
    /// is expressed by ordinal trichotomy.
    pub fn hfun_sigma(&mut self, s: &Term) -> Formula {
        self.cached(TemplateId::HFunSigma, &[s.clone()], |tower, names| {
            let [z, x, y, z2, x2, y2, ..] = names else {
                unreachable!()
            };
            let (vz, vx, vy) = (Term::var(*z), Term::var(*x), Term::var(*y));
            let (vz2, vx2, vy2) = (Term::var(*z2), Term::var(*x2), Term::var(*y2));
            let inner = fm_and(vec![
                eq(vz2.clone(), Term::hpair(vx2.clone(), vy2.clone())),
                fm_or(vec![
                    mem(vx.clone(), vx2.clone()),
                    mem(vx2.clone(), vx.clone()),
                    eq(vy.clone(), vy2.clone()),
                ]),
            ]);
            let inner_all = all2(
                *z2,
                s,
                Formula::ex(*x2, Formula::ex(*y2, inner)),
            )
            .expect("fresh");
            let body = fm_and(vec![
                eq(vz.clone(), Term::hpair(vx.clone(), vy.clone())),
                tower.ordp(&vx),
                inner_all,
            ]);
            all2(*z, s, Formula::ex(*x, Formula::ex(*y, body))).expect("fresh")
        })
    }

    /// s is a sequence whose domain includes 0..k, with s(k) = y.
    pub fn lstseqp(&mut self, s: &Term, k: &Term, y: &Term) -> Formula {
        self.cached(
            TemplateId::LstSeqP,
            &[s.clone(), k.clone(), y.clone()],
            |tower, _| {
                fm_and(vec![
                    tower.ordp(k),
                    tower.hdomain_incl(s, &Term::succ(k.clone())),
                    tower.hfun_sigma(s),
                    pair_in(k.clone(), y.clone(), s.clone()),
                ])
            },
        )
    }

    /// x codes a variable: a nonzero ordinal.
    pub fn varp(&mut self, x: &Term) -> Formula {
        self.cached(TemplateId::VarP, &[x.clone()], |tower, _| {
            and(tower.ordp(x), mem(Term::zero(), x.clone()))
        })
    }

    /// x codes a de Bruijn index.
    pub fn indp(&mut self, x: &Term) -> Formula {
        self.cached(TemplateId::IndP, &[x.clone()], |tower, names| {
            let [w, ..] = names else { unreachable!() };
            let vw = Term::var(*w);
            let body = and(
                tower.ordp(&vw),
                eq(x.clone(), q_ind_term(vw.clone())),
            );
            Formula::ex(*w, body)
        })
    }

    // -- coded terms ---------------------------------------------------------

    /// Sequence buildup of a term code (constants when vars are disallowed).
    pub fn seq_ctermp(&mut self, allow_vars: bool, s: &Term, k: &Term, t: &Term) -> Formula {
        self.cached(
            TemplateId::SeqCTermP(allow_vars),
            &[s.clone(), k.clone(), t.clone()],
            |tower, names| {
                let [l, sl, m, n, sm, sn, ..] = names else {
                    unreachable!()
                };
                let (vl, vsl) = (Term::var(*l), Term::var(*sl));
                let (vm, vn, vsm, vsn) =
                    (Term::var(*m), Term::var(*n), Term::var(*sm), Term::var(*sn));
                let base = if allow_vars {
                    Formula::disj(eq(vsl.clone(), Term::zero()), tower.varp(&vsl))
                } else {
                    eq(vsl.clone(), Term::zero())
                };
                let step = Formula::ex(
                    *m,
                    Formula::ex(
                        *n,
                        fm_and(vec![
                            mem(vm.clone(), vl.clone()),
                            mem(vn.clone(), vl.clone()),
                            Formula::ex(
                                *sm,
                                Formula::ex(
                                    *sn,
                                    fm_and(vec![
                                        pair_in(vm.clone(), vsm.clone(), s.clone()),
                                        pair_in(vn.clone(), vsn.clone(), s.clone()),
                                        eq(vsl.clone(), q_eats_term(vsm.clone(), vsn.clone())),
                                    ]),
                                ),
                            ),
                        ]),
                    ),
                );
                let per_index = Formula::ex(
                    *sl,
                    and(
                        pair_in(vl.clone(), vsl.clone(), s.clone()),
                        Formula::disj(base, step),
                    ),
                );
                and(
                    tower.lstseqp(s, k, t),
                    all2(*l, &Term::succ(k.clone()), per_index).expect("fresh"),
                )
            },
        )
    }

    fn ctermp(&mut self, allow_vars: bool, t: &Term) -> Formula {
        self.cached(
            TemplateId::CTermP(allow_vars),
            &[t.clone()],
            |tower, names| {
                let [s, k, ..] = names else { unreachable!() };
                let kind = if allow_vars {
                    SyntaxKind::Term
                } else {
                    SyntaxKind::Const
                };
                let spec = SeqSpec::Syntax {
                    kind,
                    target: t.clone(),
                };
                let seq = tower.seq_ctermp(allow_vars, &Term::var(*s), &Term::var(*k), t);
                let inner = tower.ex_solved(*k, seq, Solver::SeqWitnessK(spec.clone()));
                tower.ex_solved(*s, inner, Solver::SeqWitnessS(spec))
            },
        )
    }

    /// t codes a term.
    pub fn termp(&mut self, t: &Term) -> Formula {
        self.ctermp(true, t)
    }

    /// t codes a constant (variable-free) term.
    pub fn constp(&mut self, t: &Term) -> Formula {
        self.ctermp(false, t)
    }

    // -- substitution and abstraction on coded terms -------------------------

    /// Sequence buildup replacing the variable code v by u in a term code:
    /// elements are ⟨input, output⟩ pairs.
    pub fn seq_st_termp(
        &mut self,
        v: &Term,
        u: &Term,
        s: &Term,
        k: &Term,
        x: &Term,
        xp: &Term,
    ) -> Formula {
        self.cached(
            TemplateId::SeqStTermP,
            &[v.clone(), u.clone(), s.clone(), k.clone(), x.clone(), xp.clone()],
            |tower, names| {
                let [l, e, y, yp, m, n, em, en, ym, ymp, yn, ynp, ..] = names else {
                    unreachable!()
                };
                let (vl, ve, vy, vyp) =
                    (Term::var(*l), Term::var(*e), Term::var(*y), Term::var(*yp));
                let base = fm_or(vec![
                    and(eq(vy.clone(), v.clone()), eq(vyp.clone(), u.clone())),
                    and(eq(vy.clone(), Term::zero()), eq(vyp.clone(), Term::zero())),
                    fm_and(vec![
                        tower.varp(&vy),
                        Formula::disj(mem(vy.clone(), v.clone()), mem(v.clone(), vy.clone())),
                        eq(vyp.clone(), vy.clone()),
                    ]),
                    and(tower.indp(&vy), eq(vyp.clone(), vy.clone())),
                ]);
                let step = {
                    let (vm, vn) = (Term::var(*m), Term::var(*n));
                    let (vem, ven) = (Term::var(*em), Term::var(*en));
                    let (vym, vymp, vyn, vynp) = (
                        Term::var(*ym),
                        Term::var(*ymp),
                        Term::var(*yn),
                        Term::var(*ynp),
                    );
                    let decomposed = fm_and(vec![
                        eq(vem.clone(), Term::hpair(vym.clone(), vymp.clone())),
                        eq(ven.clone(), Term::hpair(vyn.clone(), vynp.clone())),
                        eq(vy.clone(), q_eats_term(vym.clone(), vyn.clone())),
                        eq(vyp.clone(), q_eats_term(vymp.clone(), vynp.clone())),
                    ]);
                    let inner = Formula::ex(
                        *ym,
                        Formula::ex(*ymp, Formula::ex(*yn, Formula::ex(*ynp, decomposed))),
                    );
                    Formula::ex(
                        *m,
                        Formula::ex(
                            *n,
                            fm_and(vec![
                                mem(vm.clone(), vl.clone()),
                                mem(vn.clone(), vl.clone()),
                                Formula::ex(
                                    *em,
                                    Formula::ex(
                                        *en,
                                        fm_and(vec![
                                            pair_in(vm.clone(), vem.clone(), s.clone()),
                                            pair_in(vn.clone(), ven.clone(), s.clone()),
                                            inner,
                                        ]),
                                    ),
                                ),
                            ]),
                        ),
                    )
                };
                let per_index = Formula::ex(
                    *e,
                    and(
                        pair_in(vl.clone(), ve.clone(), s.clone()),
                        Formula::ex(
                            *y,
                            Formula::ex(
                                *yp,
                                and(
                                    eq(ve.clone(), Term::hpair(vy.clone(), vyp.clone())),
                                    Formula::disj(base, step),
                                ),
                            ),
                        ),
                    ),
                );
                and(
                    tower.lstseqp(s, k, &Term::hpair(x.clone(), xp.clone())),
                    all2(*l, &Term::succ(k.clone()), per_index).expect("fresh"),
                )
            },
        )
    }

    /// Substitution of the term code u for the variable code v in a coded
    /// term.
    pub fn subst_termp(&mut self, v: &Term, u: &Term, x: &Term, xp: &Term) -> Formula {
        self.cached(
            TemplateId::SubstTermP,
            &[v.clone(), u.clone(), x.clone(), xp.clone()],
            |tower, names| {
                let [s, k, ..] = names else { unreachable!() };
                let spec = SeqSpec::StTerm {
                    v: v.clone(),
                    u: u.clone(),
                    x: x.clone(),
                };
                let seq = tower.seq_st_termp(v, u, &Term::var(*s), &Term::var(*k), x, xp);
                let inner = tower.ex_solved(*k, seq, Solver::SeqWitnessK(spec.clone()));
                let both = tower.ex_solved(*s, inner, Solver::SeqWitnessS(spec));
                fm_and(vec![tower.varp(v), tower.termp(u), both])
            },
        )
    }

    /// Abstraction of the variable code v to the index i in a coded term.
    pub fn abst_termp(&mut self, v: &Term, i: &Term, x: &Term, xp: &Term) -> Formula {
        self.cached(
            TemplateId::AbstTermP,
            &[v.clone(), i.clone(), x.clone(), xp.clone()],
            |tower, names| {
                let [s, k, ..] = names else { unreachable!() };
                let u = q_ind_term(i.clone());
                let spec = SeqSpec::StTerm {
                    v: v.clone(),
                    u: u.clone(),
                    x: x.clone(),
                };
                let seq = tower.seq_st_termp(v, &u, &Term::var(*s), &Term::var(*k), x, xp);
                let inner = tower.ex_solved(*k, seq, Solver::SeqWitnessK(spec.clone()));
                let both = tower.ex_solved(*s, inner, Solver::SeqWitnessS(spec));
                fm_and(vec![tower.varp(v), tower.ordp(i), both])
            },
        )
    }

    // -- substitution and abstraction on coded formulas ----------------------

    /// Sequence buildup substituting in a formula code: pairs, no depth.
    pub fn seq_subst_formp(
        &mut self,
        v: &Term,
        u: &Term,
        s: &Term,
        k: &Term,
        x: &Term,
        xp: &Term,
    ) -> Formula {
        self.cached(
            TemplateId::SeqSubstFormP,
            &[v.clone(), u.clone(), s.clone(), k.clone(), x.clone(), xp.clone()],
            |tower, names| {
                let [l, e, y, yp, t1, t2, t1p, t2p, m, n, em, en, ym, ymp, yn, ynp, ..] = names
                else {
                    unreachable!()
                };
                let (vl, ve, vy, vyp) =
                    (Term::var(*l), Term::var(*e), Term::var(*y), Term::var(*yp));
                let base = {
                    let (vt1, vt2, vt1p, vt2p) = (
                        Term::var(*t1),
                        Term::var(*t2),
                        Term::var(*t1p),
                        Term::var(*t2p),
                    );
                    let shapes = fm_or(vec![
                        and(
                            eq(vy.clone(), q_mem_term(vt1.clone(), vt2.clone())),
                            eq(vyp.clone(), q_mem_term(vt1p.clone(), vt2p.clone())),
                        ),
                        and(
                            eq(vy.clone(), q_eq_term(vt1.clone(), vt2.clone())),
                            eq(vyp.clone(), q_eq_term(vt1p.clone(), vt2p.clone())),
                        ),
                    ]);
                    let body = fm_and(vec![
                        shapes,
                        tower.subst_termp(v, u, &vt1, &vt1p),
                        tower.subst_termp(v, u, &vt2, &vt2p),
                    ]);
                    Formula::ex(
                        *t1,
                        Formula::ex(*t2, Formula::ex(*t1p, Formula::ex(*t2p, body))),
                    )
                };
                let step = {
                    let (vm, vn) = (Term::var(*m), Term::var(*n));
                    let (vem, ven) = (Term::var(*em), Term::var(*en));
                    let (vym, vymp, vyn, vynp) = (
                        Term::var(*ym),
                        Term::var(*ymp),
                        Term::var(*yn),
                        Term::var(*ynp),
                    );
                    let combine = fm_or(vec![
                        fm_and(vec![
                            eq(ven.clone(), Term::hpair(vyn.clone(), vynp.clone())),
                            eq(vy.clone(), q_disj_term(vym.clone(), vyn.clone())),
                            eq(vyp.clone(), q_disj_term(vymp.clone(), vynp.clone())),
                        ]),
                        and(
                            eq(vy.clone(), q_neg_term(vym.clone())),
                            eq(vyp.clone(), q_neg_term(vymp.clone())),
                        ),
                        and(
                            eq(vy.clone(), q_ex_term(vym.clone())),
                            eq(vyp.clone(), q_ex_term(vymp.clone())),
                        ),
                    ]);
                    let inner = Formula::ex(
                        *ym,
                        Formula::ex(
                            *ymp,
                            and(
                                eq(vem.clone(), Term::hpair(vym.clone(), vymp.clone())),
                                Formula::ex(*yn, Formula::ex(*ynp, combine)),
                            ),
                        ),
                    );
                    Formula::ex(
                        *m,
                        Formula::ex(
                            *n,
                            fm_and(vec![
                                mem(vm.clone(), vl.clone()),
                                mem(vn.clone(), vl.clone()),
                                Formula::ex(
                                    *em,
                                    Formula::ex(
                                        *en,
                                        fm_and(vec![
                                            pair_in(vm.clone(), vem.clone(), s.clone()),
                                            pair_in(vn.clone(), ven.clone(), s.clone()),
                                            inner,
                                        ]),
                                    ),
                                ),
                            ]),
                        ),
                    )
                };
                let per_index = Formula::ex(
                    *e,
                    and(
                        pair_in(vl.clone(), ve.clone(), s.clone()),
                        Formula::ex(
                            *y,
                            Formula::ex(
                                *yp,
                                and(
                                    eq(ve.clone(), Term::hpair(vy.clone(), vyp.clone())),
                                    Formula::disj(base, step),
                                ),
                            ),
                        ),
                    ),
                );
                and(
                    tower.lstseqp(s, k, &Term::hpair(x.clone(), xp.clone())),
                    all2(*l, &Term::succ(k.clone()), per_index).expect("fresh"),
                )
            },
        )
    }

    /// Substitution in a formula code.
    pub fn subst_formp(&mut self, v: &Term, u: &Term, x: &Term, xp: &Term) -> Formula {
        self.cached(
            TemplateId::SubstFormP,
            &[v.clone(), u.clone(), x.clone(), xp.clone()],
            |tower, names| {
                let [s, k, ..] = names else { unreachable!() };
                let spec = SeqSpec::SubstForm {
                    v: v.clone(),
                    u: u.clone(),
                    x: x.clone(),
                };
                let seq = tower.seq_subst_formp(v, u, &Term::var(*s), &Term::var(*k), x, xp);
                let inner = tower.ex_solved(*k, seq, Solver::SeqWitnessK(spec.clone()));
                let both = tower.ex_solved(*s, inner, Solver::SeqWitnessS(spec));
                fm_and(vec![tower.varp(v), tower.termp(u), both])
            },
        )
    }

    /// Sequence buildup abstracting in a formula code: elements are
    /// ⟨⟨fragment, index⟩, output⟩ triples, the existential step looking one
    /// index deeper.
    pub fn seq_abst_formp(
        &mut self,
        v: &Term,
        s: &Term,
        k: &Term,
        x: &Term,
        i: &Term,
        xp: &Term,
    ) -> Formula {
        self.cached(
            TemplateId::SeqAbstFormP,
            &[v.clone(), s.clone(), k.clone(), x.clone(), i.clone(), xp.clone()],
            |tower, names| {
                let [l, e, y, j, yp, t1, t2, t1p, t2p, m, em, ym, jm, ymp, n, en, yn, jn, ynp, ..] =
                    names
                else {
                    unreachable!()
                };
                let (vl, ve) = (Term::var(*l), Term::var(*e));
                let (vy, vj, vyp) = (Term::var(*y), Term::var(*j), Term::var(*yp));
                let base = {
                    let (vt1, vt2, vt1p, vt2p) = (
                        Term::var(*t1),
                        Term::var(*t2),
                        Term::var(*t1p),
                        Term::var(*t2p),
                    );
                    let shapes = fm_or(vec![
                        and(
                            eq(vy.clone(), q_mem_term(vt1.clone(), vt2.clone())),
                            eq(vyp.clone(), q_mem_term(vt1p.clone(), vt2p.clone())),
                        ),
                        and(
                            eq(vy.clone(), q_eq_term(vt1.clone(), vt2.clone())),
                            eq(vyp.clone(), q_eq_term(vt1p.clone(), vt2p.clone())),
                        ),
                    ]);
                    let body = fm_and(vec![
                        shapes,
                        tower.abst_termp(v, &vj, &vt1, &vt1p),
                        tower.abst_termp(v, &vj, &vt2, &vt2p),
                    ]);
                    Formula::ex(
                        *t1,
                        Formula::ex(*t2, Formula::ex(*t1p, Formula::ex(*t2p, body))),
                    )
                };
                let step = {
                    let (vm, vem) = (Term::var(*m), Term::var(*em));
                    let (vym, vjm, vymp) = (Term::var(*ym), Term::var(*jm), Term::var(*ymp));
                    let (vn, ven) = (Term::var(*n), Term::var(*en));
                    let (vyn, vjn, vynp) = (Term::var(*yn), Term::var(*jn), Term::var(*ynp));
                    let disj_case = Formula::ex(
                        *n,
                        and(
                            mem(vn.clone(), vl.clone()),
                            Formula::ex(
                                *en,
                                and(
                                    pair_in(vn.clone(), ven.clone(), s.clone()),
                                    Formula::ex(
                                        *yn,
                                        Formula::ex(
                                            *jn,
                                            Formula::ex(
                                                *ynp,
                                                fm_and(vec![
                                                    eq(
                                                        ven.clone(),
                                                        Term::hpair(
                                                            Term::hpair(vyn.clone(), vjn.clone()),
                                                            vynp.clone(),
                                                        ),
                                                    ),
                                                    eq(vjm.clone(), vj.clone()),
                                                    eq(vjn.clone(), vj.clone()),
                                                    eq(
                                                        vy.clone(),
                                                        q_disj_term(vym.clone(), vyn.clone()),
                                                    ),
                                                    eq(
                                                        vyp.clone(),
                                                        q_disj_term(vymp.clone(), vynp.clone()),
                                                    ),
                                                ]),
                                            ),
                                        ),
                                    ),
                                ),
                            ),
                        ),
                    );
                    let neg_case = fm_and(vec![
                        eq(vjm.clone(), vj.clone()),
                        eq(vy.clone(), q_neg_term(vym.clone())),
                        eq(vyp.clone(), q_neg_term(vymp.clone())),
                    ]);
                    let ex_case = fm_and(vec![
                        eq(vjm.clone(), Term::succ(vj.clone())),
                        eq(vy.clone(), q_ex_term(vym.clone())),
                        eq(vyp.clone(), q_ex_term(vymp.clone())),
                    ]);
                    Formula::ex(
                        *m,
                        and(
                            mem(vm.clone(), vl.clone()),
                            Formula::ex(
                                *em,
                                and(
                                    pair_in(vm.clone(), vem.clone(), s.clone()),
                                    Formula::ex(
                                        *ym,
                                        Formula::ex(
                                            *jm,
                                            Formula::ex(
                                                *ymp,
                                                and(
                                                    eq(
                                                        vem.clone(),
                                                        Term::hpair(
                                                            Term::hpair(vym.clone(), vjm.clone()),
                                                            vymp.clone(),
                                                        ),
                                                    ),
                                                    fm_or(vec![disj_case, neg_case, ex_case]),
                                                ),
                                            ),
                                        ),
                                    ),
                                ),
                            ),
                        ),
                    )
                };
                let per_index = Formula::ex(
                    *e,
                    and(
                        pair_in(vl.clone(), ve.clone(), s.clone()),
                        Formula::ex(
                            *y,
                            Formula::ex(
                                *j,
                                Formula::ex(
                                    *yp,
                                    fm_and(vec![
                                        eq(
                                            ve.clone(),
                                            Term::hpair(
                                                Term::hpair(vy.clone(), vj.clone()),
                                                vyp.clone(),
                                            ),
                                        ),
                                        tower.ordp(&vj),
                                        Formula::disj(base, step),
                                    ]),
                                ),
                            ),
                        ),
                    ),
                );
                let target = Term::hpair(Term::hpair(x.clone(), i.clone()), xp.clone());
                and(
                    tower.lstseqp(s, k, &target),
                    all2(*l, &Term::succ(k.clone()), per_index).expect("fresh"),
                )
            },
        )
    }

    /// Abstraction in a formula code.
    pub fn abst_formp(&mut self, v: &Term, i: &Term, x: &Term, xp: &Term) -> Formula {
        self.cached(
            TemplateId::AbstFormP,
            &[v.clone(), i.clone(), x.clone(), xp.clone()],
            |tower, names| {
                let [s, k, ..] = names else { unreachable!() };
                let spec = SeqSpec::AbstForm {
                    v: v.clone(),
                    i: i.clone(),
                    x: x.clone(),
                };
                let seq = tower.seq_abst_formp(v, &Term::var(*s), &Term::var(*k), x, i, xp);
                let inner = tower.ex_solved(*k, seq, Solver::SeqWitnessK(spec.clone()));
                let both = tower.ex_solved(*s, inner, Solver::SeqWitnessS(spec));
                fm_and(vec![tower.varp(v), tower.ordp(i), both])
            },
        )
    }

    // -- coded formulas -------------------------------------------------------

    /// y codes an atomic formula.
    pub fn atomicp(&mut self, y: &Term) -> Formula {
        self.cached(TemplateId::AtomicP, &[y.clone()], |tower, names| {
            let [t1, t2, ..] = names else { unreachable!() };
            let (vt1, vt2) = (Term::var(*t1), Term::var(*t2));
            let shapes = Formula::disj(
                eq(y.clone(), q_mem_term(vt1.clone(), vt2.clone())),
                eq(y.clone(), q_eq_term(vt1.clone(), vt2.clone())),
            );
            let body = fm_and(vec![shapes, tower.termp(&vt1), tower.termp(&vt2)]);
            Formula::ex(*t1, Formula::ex(*t2, body))
        })
    }

    /// y codes a formula built from u (and possibly w) in one step.
    pub fn make_formp(&mut self, y: &Term, u: &Term, w: &Term) -> Formula {
        self.cached(
            TemplateId::MakeFormP,
            &[y.clone(), u.clone(), w.clone()],
            |tower, names| {
                let [v2, au, ..] = names else { unreachable!() };
                let (vv2, vau) = (Term::var(*v2), Term::var(*au));
                let abst = tower.abst_formp(&vv2, &Term::zero(), u, &vau);
                let ex_case_body = and(abst, eq(y.clone(), q_ex_term(vau.clone())));
                let ex_case_inner = Formula::ex(*au, ex_case_body);
                let ex_case = tower.ex_solved(
                    *v2,
                    ex_case_inner,
                    Solver::VarCands(vec![u.clone()]),
                );
                fm_or(vec![
                    eq(y.clone(), q_disj_term(u.clone(), w.clone())),
                    eq(y.clone(), q_neg_term(u.clone())),
                    ex_case,
                ])
            },
        )
    }

    /// Sequence buildup of a formula code.
    pub fn seq_formp(&mut self, s: &Term, k: &Term, y: &Term) -> Formula {
        self.cached(
            TemplateId::SeqFormP,
            &[s.clone(), k.clone(), y.clone()],
            |tower, names| {
                let [l, sl, m, n, sm, sn, ..] = names else {
                    unreachable!()
                };
                let (vl, vsl) = (Term::var(*l), Term::var(*sl));
                let (vm, vn, vsm, vsn) =
                    (Term::var(*m), Term::var(*n), Term::var(*sm), Term::var(*sn));
                let make = tower.make_formp(&vsl, &vsm, &vsn);
                let step = Formula::ex(
                    *m,
                    Formula::ex(
                        *n,
                        fm_and(vec![
                            mem(vm.clone(), vl.clone()),
                            mem(vn.clone(), vl.clone()),
                            Formula::ex(
                                *sm,
                                Formula::ex(
                                    *sn,
                                    fm_and(vec![
                                        pair_in(vm.clone(), vsm.clone(), s.clone()),
                                        pair_in(vn.clone(), vsn.clone(), s.clone()),
                                        make,
                                    ]),
                                ),
                            ),
                        ]),
                    ),
                );
                let atomic = tower.atomicp(&vsl);
                let per_index = Formula::ex(
                    *sl,
                    and(
                        pair_in(vl.clone(), vsl.clone(), s.clone()),
                        Formula::disj(atomic, step),
                    ),
                );
                and(
                    tower.lstseqp(s, k, y),
                    all2(*l, &Term::succ(k.clone()), per_index).expect("fresh"),
                )
            },
        )
    }

    /// y codes a formula.
    pub fn formp(&mut self, y: &Term) -> Formula {
        self.cached(TemplateId::FormP, &[y.clone()], |tower, names| {
            let [s, k, ..] = names else { unreachable!() };
            let spec = SeqSpec::Syntax {
                kind: SyntaxKind::Form,
                target: y.clone(),
            };
            let seq = tower.seq_formp(&Term::var(*s), &Term::var(*k), y);
            let inner = tower.ex_solved(*k, seq, Solver::SeqWitnessK(spec.clone()));
            tower.ex_solved(*s, inner, Solver::SeqWitnessS(spec))
        })
    }

    /// y = ⌜All v x⌝: the coded universal quantifier.
    pub fn qallp(&mut self, v: &Term, x: &Term, y: &Term) -> Formula {
        self.cached(
            TemplateId::QAllP,
            &[v.clone(), x.clone(), y.clone()],
            |tower, names| {
                let [nx, anx, ..] = names else { unreachable!() };
                let (vnx, vanx) = (Term::var(*nx), Term::var(*anx));
                let abst = tower.abst_formp(v, &Term::zero(), &vnx, &vanx);
                let body = fm_and(vec![
                    eq(vnx.clone(), q_neg_term(x.clone())),
                    abst,
                    eq(y.clone(), q_neg_term(q_ex_term(vanx.clone()))),
                ]);
                Formula::ex(*nx, Formula::ex(*anx, body))
            },
        )
    }

    // -- axiom recognizers ----------------------------------------------------

    pub fn boolean_axp(&mut self, p: &Term) -> Formula {
        self.cached(TemplateId::BooleanAxP, &[p.clone()], |tower, names| {
            let [a, b, c, ..] = names else { unreachable!() };
            let (va, vb, vc) = (Term::var(*a), Term::var(*b), Term::var(*c));
            let ident = Formula::ex(
                *a,
                and(
                    tower.formp(&va),
                    eq(p.clone(), q_imp_term(va.clone(), va.clone())),
                ),
            );
            let disj_i1 = Formula::ex(
                *a,
                Formula::ex(
                    *b,
                    fm_and(vec![
                        tower.formp(&va),
                        tower.formp(&vb),
                        eq(
                            p.clone(),
                            q_imp_term(va.clone(), q_disj_term(va.clone(), vb.clone())),
                        ),
                    ]),
                ),
            );
            let disj_cont = Formula::ex(
                *a,
                and(
                    tower.formp(&va),
                    eq(
                        p.clone(),
                        q_imp_term(q_disj_term(va.clone(), va.clone()), va.clone()),
                    ),
                ),
            );
            let disj_assoc = Formula::ex(
                *a,
                Formula::ex(
                    *b,
                    Formula::ex(
                        *c,
                        fm_and(vec![
                            tower.formp(&va),
                            tower.formp(&vb),
                            tower.formp(&vc),
                            eq(
                                p.clone(),
                                q_imp_term(
                                    q_disj_term(va.clone(), q_disj_term(vb.clone(), vc.clone())),
                                    q_disj_term(q_disj_term(va.clone(), vb.clone()), vc.clone()),
                                ),
                            ),
                        ]),
                    ),
                ),
            );
            let disj_conj = Formula::ex(
                *c,
                Formula::ex(
                    *a,
                    Formula::ex(
                        *b,
                        fm_and(vec![
                            tower.formp(&vc),
                            tower.formp(&va),
                            tower.formp(&vb),
                            eq(
                                p.clone(),
                                q_imp_term(
                                    q_disj_term(vc.clone(), va.clone()),
                                    q_imp_term(
                                        q_disj_term(q_neg_term(vc.clone()), vb.clone()),
                                        q_disj_term(va.clone(), vb.clone()),
                                    ),
                                ),
                            ),
                        ]),
                    ),
                ),
            );
            fm_or(vec![ident, disj_i1, disj_cont, disj_assoc, disj_conj])
        })
    }

    pub fn equality_axp(&mut self, p: &Term) -> Formula {
        self.cached(TemplateId::EqualityAxP, &[p.clone()], |_, _| {
            use crate::calculus::EqAxiom;
            let codes = [
                EqAxiom::Refl,
                EqAxiom::EqSubst,
                EqAxiom::MemSubst,
                EqAxiom::EatsSubst,
            ]
            .map(|k| quote_fm(&k.formula()));
            fm_or(codes.iter().map(|c| eq(p.clone(), c.clone())).collect())
        })
    }

    pub fn hf_axp(&mut self, p: &Term) -> Formula {
        self.cached(TemplateId::HfAxP, &[p.clone()], |_, _| {
            let h1 = quote_fm(&crate::calculus::hf1_formula());
            let h2 = quote_fm(&crate::calculus::hf2_formula());
            Formula::disj(eq(p.clone(), h1), eq(p.clone(), h2))
        })
    }

    pub fn extra_axp(&mut self, p: &Term) -> Formula {
        self.cached(TemplateId::ExtraAxP, &[p.clone()], |_, _| {
            eq(p.clone(), quote_fm(&crate::calculus::extra_axiom_formula()))
        })
    }

    pub fn special_axp(&mut self, p: &Term) -> Formula {
        self.cached(TemplateId::SpecialAxP, &[p.clone()], |tower, names| {
            let [sx, ax, v, x, y, ..] = names else { unreachable!() };
            let (vsx, vax, vv, vx, vy) = (
                Term::var(*sx),
                Term::var(*ax),
                Term::var(*v),
                Term::var(*x),
                Term::var(*y),
            );
            let body = fm_and(vec![
                eq(
                    p.clone(),
                    q_imp_term(vsx.clone(), q_ex_term(vax.clone())),
                ),
                tower.varp(&vv),
                tower.formp(&vx),
                tower.termp(&vy),
                tower.abst_formp(&vv, &Term::zero(), &vx, &vax),
                tower.subst_formp(&vv, &vy, &vx, &vsx),
            ]);
            let ex_y = tower.ex_solved(
                *y,
                body,
                Solver::SubstSolveU {
                    v: vv.clone(),
                    x: vx.clone(),
                    xp: vsx.clone(),
                },
            );
            let ex_x = tower.ex_solved(
                *x,
                ex_y,
                Solver::Unabst {
                    v: vv.clone(),
                    abstracted: vax.clone(),
                },
            );
            let ex_v = tower.ex_solved(*v, ex_x, Solver::VarCands(vec![p.clone()]));
            Formula::ex(*sx, Formula::ex(*ax, ex_v))
        })
    }

    pub fn induction_axp(&mut self, p: &Term) -> Formula {
        self.cached(TemplateId::InductionAxP, &[p.clone()], |tower, names| {
            let [a0, q2, q3, v, w, a, q1, aj, aij, ..] = names else {
                unreachable!()
            };
            let (va0, vq2, vq3) = (Term::var(*a0), Term::var(*q2), Term::var(*q3));
            let (vv, vw, va) = (Term::var(*v), Term::var(*w), Term::var(*a));
            let (vq1, vaj, vaij) = (Term::var(*q1), Term::var(*aj), Term::var(*aij));
            let body = fm_and(vec![
                eq(
                    p.clone(),
                    q_imp_term(va0.clone(), q_imp_term(vq2.clone(), vq3.clone())),
                ),
                tower.varp(&vv),
                tower.varp(&vw),
                Formula::disj(mem(vv.clone(), vw.clone()), mem(vw.clone(), vv.clone())),
                tower.formp(&va),
                // the step variable does not occur in the template
                tower.subst_formp(&vw, &Term::zero(), &va, &va),
                tower.subst_formp(&vv, &Term::zero(), &va, &va0),
                tower.subst_formp(&vv, &vw, &va, &vaj),
                tower.subst_formp(&vv, &q_eats_term(vv.clone(), vw.clone()), &va, &vaij),
                tower.qallp(&vw, &q_imp_term(va.clone(), q_imp_term(vaj.clone(), vaij.clone())), &vq1),
                tower.qallp(&vv, &vq1, &vq2),
                tower.qallp(&vv, &va, &vq3),
            ]);
            let ex_aij = tower.ex_solved(
                *aij,
                body,
                Solver::SubstImage {
                    v: vv.clone(),
                    u: q_eats_term(vv.clone(), vw.clone()),
                    x: va.clone(),
                },
            );
            let ex_aj = tower.ex_solved(
                *aj,
                ex_aij,
                Solver::SubstImage {
                    v: vv.clone(),
                    u: vw.clone(),
                    x: va.clone(),
                },
            );
            let ex_q1 = tower.ex_solved(
                *q1,
                ex_aj,
                Solver::UnQAll {
                    v: vv.clone(),
                    from: vq2.clone(),
                },
            );
            let ex_a = tower.ex_solved(
                *a,
                ex_q1,
                Solver::UnQAll {
                    v: vv.clone(),
                    from: vq3.clone(),
                },
            );
            let ex_w = tower.ex_solved(*w, ex_a, Solver::VarCands(vec![p.clone()]));
            let ex_v = tower.ex_solved(*v, ex_w, Solver::VarCands(vec![p.clone()]));
            Formula::ex(
                *a0,
                Formula::ex(*q2, Formula::ex(*q3, ex_v)),
            )
        })
    }

    pub fn axiomp(&mut self, p: &Term) -> Formula {
        self.cached(TemplateId::AxiomP, &[p.clone()], |tower, _| {
            fm_or(vec![
                tower.boolean_axp(p),
                tower.equality_axp(p),
                tower.hf_axp(p),
                tower.special_axp(p),
                tower.induction_axp(p),
                tower.extra_axp(p),
            ])
        })
    }

    // -- inference steps -------------------------------------------------------

    /// u follows from v and w by modus ponens: w = ⌜v IMP u⌝.
    pub fn mod_ponp(&mut self, v: &Term, w: &Term, u: &Term) -> Formula {
        eq(w.clone(), q_imp_term(v.clone(), u.clone()))
    }

    /// u follows from v by the existential rule.
    pub fn exists_stepp(&mut self, v: &Term, u: &Term) -> Formula {
        self.cached(
            TemplateId::ExistsStepP,
            &[v.clone(), u.clone()],
            |tower, names| {
                let [a, b, aa, iv, ..] = names else { unreachable!() };
                let (va, vb, vaa, viv) =
                    (Term::var(*a), Term::var(*b), Term::var(*aa), Term::var(*iv));
                let body = fm_and(vec![
                    eq(v.clone(), q_imp_term(va.clone(), vb.clone())),
                    eq(
                        u.clone(),
                        q_imp_term(q_ex_term(vaa.clone()), vb.clone()),
                    ),
                    tower.varp(&viv),
                    tower.abst_formp(&viv, &Term::zero(), &va, &vaa),
                    // eigenvariable: iv does not occur in b
                    tower.subst_formp(&viv, &Term::zero(), &vb, &vb),
                ]);
                let ex_iv = tower.ex_solved(*iv, body, Solver::VarCands(vec![v.clone()]));
                Formula::ex(*a, Formula::ex(*b, Formula::ex(*aa, ex_iv)))
            },
        )
    }

    /// u follows from v by substitution of a term for a variable.
    pub fn subst_stepp(&mut self, v: &Term, u: &Term) -> Formula {
        self.cached(
            TemplateId::SubstStepP,
            &[v.clone(), u.clone()],
            |tower, names| {
                let [iv, t, ..] = names else { unreachable!() };
                let (viv, vt) = (Term::var(*iv), Term::var(*t));
                let body = fm_and(vec![
                    tower.varp(&viv),
                    tower.termp(&vt),
                    tower.subst_formp(&viv, &vt, v, u),
                ]);
                let ex_t = tower.ex_solved(
                    *t,
                    body,
                    Solver::SubstSolveU {
                        v: viv.clone(),
                        x: v.clone(),
                        xp: u.clone(),
                    },
                );
                tower.ex_solved(*iv, ex_t, Solver::VarCands(vec![v.clone()]))
            },
        )
    }

    /// s is a coded proof of length k ending in y.
    pub fn prfp(&mut self, s: &Term, k: &Term, y: &Term) -> Formula {
        self.cached(
            TemplateId::PrfP,
            &[s.clone(), k.clone(), y.clone()],
            |tower, names| {
                let [l, sl, m, n, sm, sn, ..] = names else {
                    unreachable!()
                };
                let (vl, vsl) = (Term::var(*l), Term::var(*sl));
                let (vm, vn, vsm, vsn) =
                    (Term::var(*m), Term::var(*n), Term::var(*sm), Term::var(*sn));
                let ax = tower.axiomp(&vsl);
                let mp_step = tower.mod_ponp(&vsm, &vsn, &vsl);
                let ex_step = tower.exists_stepp(&vsm, &vsl);
                let sub_step = tower.subst_stepp(&vsm, &vsl);
                let inference = Formula::ex(
                    *m,
                    Formula::ex(
                        *n,
                        fm_and(vec![
                            mem(vm.clone(), vl.clone()),
                            mem(vn.clone(), vl.clone()),
                            Formula::ex(
                                *sm,
                                Formula::ex(
                                    *sn,
                                    fm_and(vec![
                                        pair_in(vm.clone(), vsm.clone(), s.clone()),
                                        pair_in(vn.clone(), vsn.clone(), s.clone()),
                                        fm_or(vec![mp_step, ex_step, sub_step]),
                                    ]),
                                ),
                            ),
                        ]),
                    ),
                );
                let per_index = Formula::ex(
                    *sl,
                    and(
                        pair_in(vl.clone(), vsl.clone(), s.clone()),
                        Formula::disj(ax, inference),
                    ),
                );
                and(
                    tower.lstseqp(s, k, y),
                    all2(*l, &Term::succ(k.clone()), per_index).expect("fresh"),
                )
            },
        )
    }

    /// y codes a provable formula: some coded proof ends in it.
    pub fn pfp(&mut self, y: &Term) -> Formula {
        self.cached(TemplateId::PfP, &[y.clone()], |tower, names| {
            let [s, k, ..] = names else { unreachable!() };
            let body = tower.prfp(&Term::var(*s), &Term::var(*k), y);
            Formula::ex(*s, Formula::ex(*k, body))
        })
    }

    // -- quotation relation ----------------------------------------------------

    /// Sequence buildup relating a set to the code of a term denoting it.
    pub fn seq_hrpp(&mut self, s: &Term, k: &Term, x: &Term, y: &Term) -> Formula {
        self.cached(
            TemplateId::SeqHrpP,
            &[s.clone(), k.clone(), x.clone(), y.clone()],
            |tower, names| {
                let [l, e, pv, qv, m, n, em, en, pm, qm, pn, qn, ..] = names else {
                    unreachable!()
                };
                let (vl, ve, vp, vq) =
                    (Term::var(*l), Term::var(*e), Term::var(*pv), Term::var(*qv));
                let base = and(eq(vp.clone(), Term::zero()), eq(vq.clone(), Term::zero()));
                let step = {
                    let (vm, vn) = (Term::var(*m), Term::var(*n));
                    let (vem, ven) = (Term::var(*em), Term::var(*en));
                    let (vpm, vqm, vpn, vqn) =
                        (Term::var(*pm), Term::var(*qm), Term::var(*pn), Term::var(*qn));
                    let decomposed = fm_and(vec![
                        eq(vem.clone(), Term::hpair(vpm.clone(), vqm.clone())),
                        eq(ven.clone(), Term::hpair(vpn.clone(), vqn.clone())),
                        eq(vp.clone(), Term::eats(vpm.clone(), vpn.clone())),
                        eq(vq.clone(), q_eats_term(vqm.clone(), vqn.clone())),
                    ]);
                    Formula::ex(
                        *m,
                        Formula::ex(
                            *n,
                            fm_and(vec![
                                mem(vm.clone(), vl.clone()),
                                mem(vn.clone(), vl.clone()),
                                Formula::ex(
                                    *em,
                                    Formula::ex(
                                        *en,
                                        fm_and(vec![
                                            pair_in(vm.clone(), vem.clone(), s.clone()),
                                            pair_in(vn.clone(), ven.clone(), s.clone()),
                                            Formula::ex(
                                                *pm,
                                                Formula::ex(
                                                    *qm,
                                                    Formula::ex(
                                                        *pn,
                                                        Formula::ex(*qn, decomposed),
                                                    ),
                                                ),
                                            ),
                                        ]),
                                    ),
                                ),
                            ]),
                        ),
                    )
                };
                let per_index = Formula::ex(
                    *e,
                    and(
                        pair_in(vl.clone(), ve.clone(), s.clone()),
                        Formula::ex(
                            *pv,
                            Formula::ex(
                                *qv,
                                and(
                                    eq(ve.clone(), Term::hpair(vp.clone(), vq.clone())),
                                    Formula::disj(base, step),
                                ),
                            ),
                        ),
                    ),
                );
                and(
                    tower.lstseqp(s, k, &Term::hpair(x.clone(), y.clone())),
                    all2(*l, &Term::succ(k.clone()), per_index).expect("fresh"),
                )
            },
        )
    }

    /// y codes a term denoting the set x.
    pub fn hrpp(&mut self, x: &Term, y: &Term) -> Formula {
        self.cached(TemplateId::HrpP, &[x.clone(), y.clone()], |tower, names| {
            let [s, k, ..] = names else { unreachable!() };
            let spec = SeqSpec::Hrp { x: x.clone() };
            let seq = tower.seq_hrpp(&Term::var(*s), &Term::var(*k), x, y);
            let inner = tower.ex_solved(*k, seq, Solver::SeqWitnessK(spec.clone()));
            tower.ex_solved(*s, inner, Solver::SeqWitnessS(spec))
        })
    }

    /// The diagonal substitution relation: x' codes x with the variable v
    /// replaced by a quotation of x.
    pub fn krpp(&mut self, v: &Term, x: &Term, xp: &Term) -> Formula {
        self.cached(
            TemplateId::KrpP,
            &[v.clone(), x.clone(), xp.clone()],
            |tower, names| {
                let [y, ..] = names else { unreachable!() };
                let vy = Term::var(*y);
                let body = and(
                    tower.hrpp(x, &vy),
                    tower.subst_formp(v, &vy, x, xp),
                );
                tower.ex_solved(*y, body, Solver::HrpImage { x: x.clone() })
            },
        )
    }
}

// ---------------------------------------------------------------------------
// Witness builders at the value level
// ---------------------------------------------------------------------------

/// Canonical quotation sequence for a set: pairs ⟨fragment, term code⟩ built
/// along the canonical eats spine, ending with ⟨x, ⌜x⌝-code⟩.
pub fn build_hrp_witness(x: &HfSet) -> SeqWitness {
    let mut items = Vec::new();
    let mut seen: HashMap<HfSet, HfSet> = HashMap::new();
    hrp_go(x, &mut items, &mut seen);
    let pairs = items
        .iter()
        .enumerate()
        .map(|(i, e)| HfSet::hpair(&HfSet::ord_of(i), e));
    SeqWitness {
        s: HfSet::from_children(pairs),
        k: HfSet::ord_of(items.len() - 1),
    }
}

fn hrp_go(x: &HfSet, items: &mut Vec<HfSet>, seen: &mut HashMap<HfSet, HfSet>) -> HfSet {
    if let Some(c) = seen.get(x) {
        return c.clone();
    }
    let code = if x.is_empty() {
        HfSet::empty()
    } else {
        let children = x.children();
        let prefix = HfSet::from_children(children[..children.len() - 1].iter().cloned());
        let last = &children[children.len() - 1];
        let ca = hrp_go(&prefix, items, seen);
        let cb = hrp_go(last, items, seen);
        crate::coding::q_eats(&ca, &cb)
    };
    seen.insert(x.clone(), code.clone());
    items.push(HfSet::hpair(x, &code));
    code
}

/// The code of the canonical term denoting x (the quotation function at the
/// value level).
pub fn hrp_code_of(x: &HfSet) -> HfSet {
    let mut items = Vec::new();
    let mut seen = HashMap::new();
    hrp_go(x, &mut items, &mut seen)
}

// ---------------------------------------------------------------------------
// The evaluator oracle
// ---------------------------------------------------------------------------

/// Serves witness candidates for tower existentials out of the value-level
/// builders.
pub struct TowerOracle<'a> {
    tower: &'a FormulaTower,
}

impl TowerOracle<'_> {
    fn seq_witness(&self, spec: &SeqSpec, env: &Env) -> Option<SeqWitness> {
        match spec {
            SeqSpec::Syntax { kind, target } => {
                let t = eval_tm(env, target);
                crate::coding::shadow_syntax_check(*kind, &t)
            }
            SeqSpec::StTerm { v, u, x } => {
                let (v, u, x) = (eval_tm(env, v), eval_tm(env, u), eval_tm(env, x));
                build_subst_term_witness(&v, &u, &x)
            }
            SeqSpec::SubstForm { v, u, x } => {
                let (v, u, x) = (eval_tm(env, v), eval_tm(env, u), eval_tm(env, x));
                build_subst_form_witness(&v, &u, &x)
            }
            SeqSpec::AbstForm { v, i, x } => {
                let (v, i, x) = (eval_tm(env, v), eval_tm(env, i), eval_tm(env, x));
                let i = i.as_ord().ok()?;
                build_abst_form_witness(&v, i, &x)
            }
            SeqSpec::Hrp { x } => {
                let x = eval_tm(env, x);
                Some(build_hrp_witness(&x))
            }
        }
    }
}

impl WitnessHints for TowerOracle<'_> {
    fn candidates(&self, _var: Name, body: &Formula, env: &Env) -> Vec<HfSet> {
        let Some(solver) = self.tower.registry.get(&body.ptr_id()) else {
            return Vec::new();
        };
        match solver {
            Solver::SeqWitnessS(spec) => self
                .seq_witness(spec, env)
                .map(|w| vec![w.s])
                .unwrap_or_default(),
            Solver::SeqWitnessK(spec) => self
                .seq_witness(spec, env)
                .map(|w| vec![w.k])
                .unwrap_or_default(),
            Solver::VarCands(sources) => {
                let mut out = Vec::new();
                for src in sources {
                    collect_var_codes(&eval_tm(env, src), &mut out);
                }
                let max = out.iter().map(|v| v.card()).max().unwrap_or(0);
                out.push(HfSet::ord_of(max + 1));
                out
            }
            Solver::Unabst { v, abstracted } => {
                let v = eval_tm(env, v);
                let a = eval_tm(env, abstracted);
                shadow_unabst_form(&v, 0, &a).map(|x| vec![x]).unwrap_or_default()
            }
            Solver::UnQAll { v, from } => {
                let v = eval_tm(env, v);
                let y = eval_tm(env, from);
                // y = ⟨neg, ⟨ex, anx⟩⟩; x = un-neg(unabst(v, 0, anx))
                (|| {
                    let (t1, inner) = y.unpair().ok()?;
                    if t1 != crate::coding::CodeTag::Neg.value() {
                        return None;
                    }
                    let (t2, anx) = inner.unpair().ok()?;
                    if t2 != crate::coding::CodeTag::Ex.value() {
                        return None;
                    }
                    let nx = shadow_unabst_form(&v, 0, &anx)?;
                    let (t3, x) = nx.unpair().ok()?;
                    if t3 != crate::coding::CodeTag::Neg.value() {
                        return None;
                    }
                    Some(vec![x])
                })()
                .unwrap_or_default()
            }
            Solver::SubstImage { v, u, x } => {
                let (v, u, x) = (eval_tm(env, v), eval_tm(env, u), eval_tm(env, x));
                shadow_subst_form(&v, &u, &x)
                    .map(|r| vec![r])
                    .unwrap_or_default()
            }
            Solver::SubstSolveU { v, x, xp } => {
                let (v, x, xp) = (eval_tm(env, v), eval_tm(env, x), eval_tm(env, xp));
                solve_subst_u(&v, &x, &xp).map(|u| vec![u]).unwrap_or_default()
            }
            Solver::HrpImage { x } => {
                let x = eval_tm(env, x);
                vec![hrp_code_of(&x)]
            }
        }
    }
}

/// Solves for the substituted term: the unique u with subst(v, u, x) = xp,
/// by a parallel walk; 0 when v does not occur in x.
pub fn solve_subst_u(v: &HfSet, x: &HfSet, xp: &HfSet) -> Option<HfSet> {
    let mut found: Option<HfSet> = None;
    fn walk(v: &HfSet, x: &HfSet, xp: &HfSet, found: &mut Option<HfSet>) -> bool {
        if x == v {
            match found {
                Some(prev) => return prev == xp,
                None => {
                    *found = Some(xp.clone());
                    return true;
                }
            }
        }
        if x == xp {
            // identical subtrees need no inspection unless v occurs inside;
            // walking on keeps the occurrence check exact
        }
        match (x.unpair(), xp.unpair()) {
            (Ok((t1, p1)), Ok((t2, p2))) => {
                if t1 != t2 {
                    return false;
                }
                match crate::coding::CodeTag::from_value(&t1) {
                    Some(crate::coding::CodeTag::Ind) => x == xp,
                    Some(crate::coding::CodeTag::Neg) | Some(crate::coding::CodeTag::Ex) => {
                        walk(v, &p1, &p2, found)
                    }
                    Some(_) => match (p1.unpair(), p2.unpair()) {
                        (Ok((a1, b1)), Ok((a2, b2))) => {
                            walk(v, &a1, &a2, found) && walk(v, &b1, &b2, found)
                        }
                        _ => p1 == p2,
                    },
                    None => x == xp,
                }
            }
            _ => x == xp,
        }
    }
    if walk(v, x, xp, &mut found) {
        Some(found.unwrap_or_else(HfSet::empty))
    } else {
        None
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::coding::{code_of_fm, code_of_tm, q_var};
    use crate::semantics::{eval_with_witness_hinted, TriBool};
    use crate::sigma::is_strict_sigma;
    use crate::syntax::fls;

    #[test]
    fn templates_are_ground_at_ground_args() {
        let mut tower = FormulaTower::new();
        let t = quote_fm(&fls());
        for f in [
            tower.ordp(&Term::zero()),
            tower.varp(&Term::zero()),
            tower.termp(&t),
            tower.formp(&t),
            tower.pfp(&t),
        ] {
            assert!(f.is_ground(), "template leaked a free variable: {}", f.free_vars().len());
        }
    }

    #[test]
    fn templates_are_strict_sigma_ready() {
        // the smaller templates are strict outright
        let mut tower = FormulaTower::new();
        let z = Term::zero();
        for f in [
            tower.varp(&z),
            tower.ordp(&z),
            tower.hfun_sigma(&z),
            tower.indp(&z),
        ] {
            let c = crate::sigma::sigma_cert(&f).expect("certifiable");
            assert!(is_strict_sigma(&c.strict));
        }
    }

    #[test]
    fn termp_eval_with_builder() {
        let mut tower = FormulaTower::new();
        let t = Term::eats(Term::zero(), Term::var(Name(0)));
        let code = code_of_tm(&t);
        let f = tower.termp(&hfset_to_term_pub(&code));
        let oracle = tower.oracle();
        let v = eval_with_witness_hinted(&Env::e0(), &f, &[], 50_000, Some(&oracle)).unwrap();
        assert_eq!(v, TriBool::True);
        // a non-code evaluates false or unknown, never true
        let junk = tower.termp(&hfset_to_term_pub(&HfSet::htuple(3)));
        let oracle = tower.oracle();
        let v = eval_with_witness_hinted(&Env::e0(), &junk, &[], 2_000, Some(&oracle)).unwrap();
        assert_ne!(v, TriBool::True);
    }

    fn hfset_to_term_pub(x: &HfSet) -> Term {
        crate::sigma::hfset_to_term(x)
    }

    #[test]
    fn formp_eval_with_builder() {
        let mut tower = FormulaTower::new();
        let f = Formula::ex(Name(0), Formula::mem(Term::var(Name(0)), Term::var(Name(1))));
        let code = code_of_fm(&f);
        let fp = tower.formp(&hfset_to_term_pub(&code));
        let oracle = tower.oracle();
        let v = eval_with_witness_hinted(&Env::e0(), &fp, &[], 100_000, Some(&oracle)).unwrap();
        assert_eq!(v, TriBool::True);
    }

    #[test]
    fn subst_formp_eval() {
        let mut tower = FormulaTower::new();
        let i = Name(0);
        let a = Formula::mem(Term::var(i), Term::var(Name(1)));
        let t = Term::eats(Term::zero(), Term::zero());
        let x = code_of_fm(&a);
        let xp = crate::coding::shadow_subst_form(&q_var(i), &code_of_tm(&t), &x).unwrap();
        let fp = tower.subst_formp(
            &hfset_to_term_pub(&q_var(i)),
            &hfset_to_term_pub(&code_of_tm(&t)),
            &hfset_to_term_pub(&x),
            &hfset_to_term_pub(&xp),
        );
        let oracle = tower.oracle();
        let v = eval_with_witness_hinted(&Env::e0(), &fp, &[], 100_000, Some(&oracle)).unwrap();
        assert_eq!(v, TriBool::True);
    }

    #[test]
    fn solve_subst_u_works() {
        let i = Name(0);
        let a = Formula::mem(Term::var(i), Term::eats(Term::var(i), Term::zero()));
        let t = Term::eats(Term::zero(), Term::zero());
        let x = code_of_fm(&a);
        let u = code_of_tm(&t);
        let xp = crate::coding::shadow_subst_form(&q_var(i), &u, &x).unwrap();
        assert_eq!(solve_subst_u(&q_var(i), &x, &xp), Some(u));
        // no occurrence: defaults to 0
        let b = code_of_fm(&fls());
        assert_eq!(
            solve_subst_u(&q_var(i), &b, &b),
            Some(HfSet::empty())
        );
    }

    #[test]
    fn hrp_witness_shape() {
        let x = HfSet::ord_of(2);
        let w = build_hrp_witness(&x);
        let code = hrp_code_of(&x);
        // the final element pairs the set with its quotation code
        assert!(w.s.is_lstseq(&w.k, &HfSet::hpair(&x, &code)));
        // the code denotes the canonical term of x
        let t = crate::sigma::hfset_to_term(&x);
        assert_eq!(code, code_of_tm(&t));
    }
}
