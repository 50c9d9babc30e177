use autalg::algebra::AutCheck;
use autalg::autgroup::{automorphism_group, AutGroupError, EnumerationOptions};
use autalg::constructions::{algebra_e, certified_lambda, invariant_f, split_etale};
use autalg::field::FiniteField;
use autalg::perm::{line_normalizer, symmetric_group, PermGroup};

fn fp(p: u64) -> FiniteField {
    FiniteField::prime(p).unwrap()
}

#[test]
fn split_etale_falls_back_to_brute_force() {
    // no unit line: the sweep does not apply, brute force still gives S_3
    let a = split_etale(3, &fp(3)).unwrap();
    let auts = automorphism_group(&a, &EnumerationOptions::default()).unwrap();
    assert_eq!(auts.order(), 6);
    assert!(auts.complete);
    assert!(auts.is_group(a.field()));
}

#[test]
fn automorphisms_of_e_form_a_group() {
    let f = fp(11);
    let g = PermGroup::parse("n=2; gens=(1 2)").unwrap();
    let e = algebra_e(&g, &[1, 3], &[5, 6, 7], &f).unwrap();
    let auts = automorphism_group(&e, &EnumerationOptions::default()).unwrap();
    assert_eq!(auts.order(), 2);
    assert!(auts.is_group(&f));
    for m in &auts.elements {
        assert_eq!(e.is_automorphism(m), AutCheck::Holds);
        assert!(e.tensor_stabilizes(m));
    }
}

#[test]
fn budget_is_reported_not_exceeded() {
    let e = algebra_e(&PermGroup::parse("n=2; gens=(1 2)").unwrap(), &[1, 2], &[2, 3, 4], &fp(7)).unwrap();
    let opts = EnumerationOptions { budget: 3, ..Default::default() };
    assert!(matches!(automorphism_group(&e, &opts), Err(AutGroupError::BudgetExceeded { budget: 3, .. })));
}

#[test]
fn klein_four_is_cut_out_by_a_line() {
    // Aut(E) would need a GL(4, q) sweep; the normalizer certificate is what carries the proof
    let f = fp(11);
    let g = PermGroup::parse("n=4; gens=(1 2)(3 4),(1 3)(2 4)").unwrap();
    let lambda = certified_lambda(&g, &f).unwrap();
    let fv = invariant_f(&g, &lambda, &f).unwrap();
    assert_eq!(line_normalizer(&f, 4, &fv, &symmetric_group(4)).unwrap().elements(), g.elements());
}
