use hfgoedel::coding::*;
use hfgoedel::hf_core::HfSet;
use hfgoedel::provability::{diagnose_prf, encode_proof, FormulaTower};
use hfgoedel::semantics::{eval_with_witness_hinted, Env, TriBool};
use hfgoedel::sigma::hfset_to_term;
use hfgoedel::syntax::{as_all2, as_and, Formula, Name, Term};

fn conjs(f: &Formula) -> Vec<Formula> {
    match as_and(f) {
        Some((a, b)) => { let mut v = conjs(&a); v.extend(conjs(&b)); v }
        None => vec![f.clone()],
    }
}

#[test]
fn debug_exists_encode() {
    let i = Name(0);
    let a = Formula::eq(Term::var(i), Term::var(i));
    let zz = hfgoedel::calculus::refl_of(&Term::zero());
    let prem = hfgoedel::calculus::imp_triv(&zz, &a).unwrap();
    let ex = hfgoedel::calculus::exists_rule(&prem, i).unwrap();
    let w = encode_proof(&ex).unwrap();
    match diagnose_prf(&w) {
        Ok(()) => println!("verify ok"),
        Err(Some(l)) => {
            println!("fails at index {l} of {}", w.k.as_ord().unwrap());
            let el = w.s.seq_app(&HfSet::ord_of(l)).unwrap();
            match decode_fm(&el) {
                Ok(d) => println!("element decodes to: {:?}", hfgoedel::syntax::untrans(&d).map(|f| f.to_string())),
                Err(e) => println!("element not a code: {e}"),
            }
        }
        Err(None) => println!("not even a sequence"),
    }
}

#[test]
fn debug_subst_formp() {
    let mut tower = FormulaTower::new();
    let i = Name(0);
    let a = Formula::mem(Term::var(i), Term::var(Name(1)));
    let t = Term::eats(Term::zero(), Term::zero());
    let x = code_of_fm(&a);
    let u = code_of_tm(&t);
    let xp = shadow_subst_form(&q_var(i), &u, &x).unwrap();
    let wit = build_subst_form_witness(&q_var(i), &u, &x).unwrap();
    println!("subst witness k = {}", wit.k);
    let (sv, kv) = (Term::var(Name(40)), Term::var(Name(41)));
    let seq = tower.seq_subst_formp(
        &hfset_to_term(&q_var(i)), &hfset_to_term(&u),
        &sv, &kv, &hfset_to_term(&x), &hfset_to_term(&xp));
    let env = Env::e0().bind(Name(40), wit.s.clone()).bind(Name(41), wit.k.clone());
    let oracle = tower.oracle();
    for (n, c) in conjs(&seq).iter().enumerate() {
        let v = eval_with_witness_hinted(&env, c, &[], 200_000, Some(&oracle)).unwrap();
        println!("seq_subst_formp conjunct {n}: {v}");
        if v != TriBool::True {
            if let Some((iv, bound, body)) = as_all2(c) {
                let b = hfgoedel::semantics::eval_tm(&env, &bound);
                for ch in b.children() {
                    let env2 = env.bind(iv, ch.clone());
                    let vv = eval_with_witness_hinted(&env2, &body, &[], 200_000, Some(&oracle)).unwrap();
                    println!("  element {}: {vv}", ch.as_ord().map(|o| o.to_string()).unwrap_or_else(|_| "?".into()));
                }
            }
        }
    }
}

#[test]
fn debug_formp() {
    let mut tower = FormulaTower::new();
    let f = Formula::ex(Name(0), Formula::mem(Term::var(Name(0)), Term::var(Name(1))));
    let code = code_of_fm(&f);
    let wit = shadow_syntax_check(SyntaxKind::Form, &code).unwrap();
    println!("form witness k = {}", wit.k);
    let (sv, kv) = (Term::var(Name(40)), Term::var(Name(41)));
    let seq = tower.seq_formp(&sv, &kv, &hfset_to_term(&code));
    let env = Env::e0().bind(Name(40), wit.s.clone()).bind(Name(41), wit.k.clone());
    let oracle = tower.oracle();
    for (n, c) in conjs(&seq).iter().enumerate() {
        let v = eval_with_witness_hinted(&env, c, &[], 200_000, Some(&oracle)).unwrap();
        println!("seq_formp conjunct {n}: {v}");
        if v != TriBool::True {
            if let Some((iv, bound, body)) = as_all2(c) {
                let b = hfgoedel::semantics::eval_tm(&env, &bound);
                for ch in b.children() {
                    let env2 = env.bind(iv, ch.clone());
                    let vv = eval_with_witness_hinted(&env2, &body, &[], 200_000, Some(&oracle)).unwrap();
                    println!("  element {}: {vv}", ch.as_ord().map(|o| o.to_string()).unwrap_or_else(|_| "?".into()));
                }
            }
        }
    }
}

#[test]
fn debug_sigma_templates() {
    let mut tower = FormulaTower::new();
    let z = Term::zero();
    for (name, f) in [
        ("varp", tower.varp(&z)),
        ("ordp", tower.ordp(&z)),
        ("hfun_sigma", tower.hfun_sigma(&z)),
        ("indp", tower.indp(&z)),
    ] {
        match hfgoedel::sigma::sigma_cert(&f) {
            Ok(c) => println!("{name}: ok strict-size {}", c.strict.tree_size()),
            Err(e) => println!("{name}: ERR {e}"),
        }
    }
}
