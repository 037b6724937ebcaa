use hfgoedel::calculus::and_cong_iff;
use hfgoedel::syntax::as_iff as as_iff_parts;
use hfgoedel::provability::FormulaTower;
use hfgoedel::sigma::sigma_cert;
use hfgoedel::syntax::{as_and, Formula, FormulaKind, Term};

fn smallest_failing(f: &Formula, best: &mut Option<Formula>) {
    let fails = matches!(sigma_cert(f), Err(hfgoedel::sigma::SigmaError::Kernel(_)));
    if fails {
        let better = match best {
            Some(b) => f.tree_size() < b.tree_size(),
            None => true,
        };
        if better {
            *best = Some(f.clone());
        }
        match f.kind() {
            FormulaKind::Disj(a, b) => {
                smallest_failing(a, best);
                smallest_failing(b, best);
            }
            FormulaKind::Neg(a) | FormulaKind::Ex(_, a) => smallest_failing(a, best),
            _ => {}
        }
    }
}

#[test]
fn bisect_cert_failure() {
    let mut tower = FormulaTower::new();
    let f = tower.indp(&Term::zero());
    let mut best = None;
    smallest_failing(&f, &mut best);
    let b = best.unwrap();
    let (x, y) = as_and(&b).unwrap();
    let cx = sigma_cert(&x).unwrap();
    let cy = sigma_cert(&y).unwrap();
    println!("cx iff as_iff: {:?}", as_iff_parts(cx.iff_proof.concl()).is_some());
    println!("cy iff as_iff: {:?}", as_iff_parts(cy.iff_proof.concl()).is_some());
    println!("cx concl: {}", cx.iff_proof.concl().tree_size());
    match and_cong_iff(&cx.iff_proof, &cy.iff_proof) {
        Ok(_) => println!("and_cong ok"),
        Err(e) => println!("and_cong err: {e}"),
    }
}
