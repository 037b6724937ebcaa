//! Sealed LCF-style proof kernel for the HF sequent calculus.
//!
//! [`Theorem`] values can only be produced by the primitive constructors in
//! [`kernel`]; everything else in this module (derived rules, the deduction
//! theorem, the tautology engine, substitution into theorems) is a macro that
//! expands to primitive inferences, so a recorded [`ProofTree`] always replays
//! through the kernel alone.

mod kernel;
mod rules;
pub mod script;

pub use kernel::{
    inference_count,
    configure_extra_axiom, extra_axiom_formula, hyp, mp, exists_rule, boolean_axiom,
    equality_axiom, hf_axiom, special_axiom, induction_axiom, extra_axiom,
    validate_extra_axiom, BoolAxiom, EqAxiom, HfAxiom, KernelError, ProofTree, Theorem,
    check_proof, replay_map, CheckError, eq_axiom_vars, hf1_formula, hf2_formula,
};

pub use rules::{
    all2_elim, all2_intro, all2_mono_iff, all_elim, all_intro, alpha_restate, and_cong_iff,
    assoc_l, assoc_r, both_false_iff, both_true_iff, case_split, commute_fm, commute_rule,
    conj_elim1, conj_elim2, conj_intro, contract, contrapose, cut, deduction, demorgan_fm,
    disj_cut, disj_elim, disj_intro1, disj_intro2, dneg_elim_fm, dneg_intro_fm, eats_cong,
    eq_mem_cong, eq_mem_cong2, eq_subst_fm, eq_sym, eq_trans, ex_mono, ex_mono_iff,
    exfalso_from, exfalso_imp, iff_intro, iff_mp, iff_mp_rev, iff_refl, iff_sym, iff_trans,
    imp_trans, imp_triv, induction_rule, modus_tollens, mono_left, mono_left_fm, mono_right,
    mono_right_fm, neg_cong_iff, neg_intro, or_cong_iff, refl_of, s_rule, taut, taut_mp,
    thm_subst, weaken_l, weaken_r,
};
