use super::*;
use crate::algebra::{AlgebraBuilder, Block, Meta};
use crate::constructions::{
    algebra_c, algebra_d, algebra_e, monomial_line, rigid_algebra, unitized_etale, wrap_simple, zero_algebra, DParams,
    WrapVariant,
};
use crate::field::FiniteField;
use crate::graded::{build_a, Flavor};
use crate::linalg::Subspace;
use crate::perm::PermGroup;

fn fp(p: u64) -> FiniteField {
    FiniteField::prime(p).unwrap()
}

fn enumerate<F: Field>(a: &Algebra<F>) -> AutomorphismSet<F::Elem> {
    let plan = generation_plan(a).unwrap();
    enumerate_automorphisms(a, &plan, &EnumerationOptions::default()).unwrap()
}

#[test]
fn rigid_algebra_has_only_the_identity() {
    let f = fp(5);
    let a = rigid_algebra(2, &f).unwrap();
    let level = verify_block_hypotheses(&a).unwrap();
    assert_eq!(level.blocks.len(), 2);
    let auts = enumerate(&a);
    assert_eq!(auts.order(), 1);
    assert!(auts.elements[0].is_identity(&f));
    assert_eq!(brute_force_automorphisms(&a, 1).unwrap(), auts.elements);
}

#[test]
fn zero_algebra_has_no_left_identity() {
    let f = fp(5);
    let z = zero_algebra(3, &f).unwrap();
    assert!(matches!(verify_block_hypotheses(&z), Err(AutGroupError::NoUniqueLeftIdentity { .. })));
}

#[test]
fn shared_eigenvalue_fails_decomposition() {
    let f = fp(7);
    let mut b = AlgebraBuilder::new(f.clone(), vec!["e".into(), "e1".into(), "e2".into()]);
    for x in 0..3 {
        b.add(0, x, x, 1);
    }
    b.add(1, 0, 1, 2).add(2, 0, 2, 2).add(1, 1, 1, 1).add(2, 2, 2, 1);
    b.block(Block::new("e", 0..1, Role::UnitLine).with_eigenvalue(1));
    b.block(Block::new("e1", 1..2, Role::Generator).with_eigenvalue(2));
    b.block(Block::new("e2", 2..3, Role::Generator).with_eigenvalue(2));
    let a = b.build().unwrap();
    assert!(matches!(verify_block_hypotheses(&a), Err(AutGroupError::DecompositionFails { .. })));
}

#[test]
fn misdeclared_block_is_reported() {
    let f = fp(7);
    let a = rigid_algebra(3, &f).unwrap();
    let mut blocks = a.blocks().to_vec();
    blocks[1].eigenvalue = Some(6);
    let a = a.with_blocks(blocks).unwrap();
    assert!(matches!(verify_block_hypotheses(&a), Err(AutGroupError::BlockMetadataMismatch { .. })));
}

#[test]
fn plan_reaches_every_monomial_of_a() {
    let f = fp(5);
    let s = Subspace::zero(8);
    let a = build_a(&f, 2, &s, 3, Flavor::Tensor, &["x".into(), "y".into()]).unwrap();
    let plan = generation_plan(&a.algebra).unwrap();
    assert_eq!(plan.seeds(), &[0, 1]);
    assert_eq!(plan.targets().count(), 4 + 8);
    let lines = plan.describe(&a.algebra);
    assert!(lines.iter().any(|l| l.starts_with("x⊗y = (x·y)")), "{lines:?}");
    // the plan evaluated on the identity reproduces the identity
    let mut images: Vec<Vec<u32>> = (0..a.algebra.dim()).map(|i| crate::linalg::unit_vector(&f, a.algebra.dim(), i)).collect();
    let expected = images.clone();
    for t in plan.targets() {
        images[t] = vec![0; a.algebra.dim()];
    }
    plan.apply(&a.algebra, &mut images);
    assert_eq!(images, expected);
}

#[test]
fn zero_products_are_not_generated() {
    let f = fp(7);
    let mut b = AlgebraBuilder::new(f.clone(), vec!["e".into(), "x".into(), "y".into()]);
    for x in 0..3 {
        b.add(0, x, x, 1);
    }
    b.add(1, 0, 1, 2).add(2, 0, 2, 3);
    b.block(Block::new("e", 0..1, Role::UnitLine).with_eigenvalue(1));
    b.block(Block::new("x", 1..2, Role::Generator).with_eigenvalue(2));
    b.block(Block::new("y", 2..3, Role::Generated).with_eigenvalue(3));
    b.meta(Meta::new("toy"));
    let a = b.build().unwrap();
    match generation_plan(&a) {
        Err(AutGroupError::NotGenerated { missing, unreached, .. }) => {
            assert_eq!(missing, 1);
            assert_eq!(unreached, "y");
        }
        other => panic!("{other:?}"),
    }
}

#[test]
fn e_plan_leaves_the_etale_block_to_the_pairing() {
    let f = fp(7);
    let g = PermGroup::parse("n=2; gens=(1 2)").unwrap();
    let e = algebra_e(&g, &[1, 2], &[2, 3, 4], &f).unwrap();
    let plan = generation_plan(&e).unwrap();
    let a2 = e.block("A2").unwrap().range.clone();
    assert!(plan.targets().all(|t| a2.contains(&t)));
    assert_eq!(plan.targets().count(), a2.len());
}

#[test]
fn c_automorphisms_are_sl2_extensions() {
    let f = fp(5);
    let l = rigid_algebra(2, &f).unwrap();
    let c = algebra_c(&l, 2, &[2, 3, 4]).unwrap();
    let auts = enumerate(&c);
    assert_eq!(auts.order(), 120);
    assert!(auts.is_group(&f));
    let m = match_expected(&f, &auts, &expect_c_action(&f, 2, 2)).unwrap();
    assert_eq!(m.bijection.len(), 120);
}

#[test]
fn d_automorphisms_stabilize_s() {
    let f = fp(7);
    let l = rigid_algebra(2, &f).unwrap();
    let s = monomial_line(&f, Flavor::Tensor, 4, 2, &[2, 2]).unwrap();
    let p = DParams::canonical(&f, 2, 2, 2, s).unwrap();
    let d = algebra_d(&l, &p).unwrap();
    let auts = enumerate(&d);
    let exp = expect_d_action(&f, 2, &p);
    assert_eq!(exp.group.len(), 42);
    assert_eq!(auts.order(), 42);
    match_expected(&f, &auts, &exp).unwrap();
}

#[test]
fn unitized_etale_agrees_with_brute_force() {
    for p in [3, 5] {
        let f = fp(p);
        let a = unitized_etale(2, &2, &f).unwrap();
        let auts = enumerate(&a);
        assert_eq!(auts.order(), 2);
        assert_eq!(brute_force_automorphisms(&a, 1).unwrap(), auts.elements);
    }
}

#[test]
fn wrapped_rigid_is_rigid() {
    let f = fp(5);
    let l = rigid_algebra(2, &f).unwrap();
    let delta = Matrix::identity(&f, 2);
    let w = wrap_simple(&l, &2, &3, &delta, WrapVariant::Standard).unwrap();
    let auts = enumerate(&w);
    assert_eq!(auts.order(), 1);
    let exp = expect_wrapped(&f, &Expectation::itself("identity", vec![Matrix::identity(&f, 2)]), &delta);
    match_expected(&f, &auts, &exp).unwrap();
}

#[test]
fn extra_matrix_is_a_mismatch() {
    let f = fp(5);
    let l = rigid_algebra(2, &f).unwrap();
    let c = algebra_c(&l, 2, &[2, 3, 4]).unwrap();
    let mut auts = enumerate(&c);
    let mut bogus = Matrix::identity(&f, c.dim());
    bogus.set(0, 0, 2);
    auts.elements.push(bogus);
    auts.elements.sort_by(|x, y| x.data().cmp(y.data()));
    match match_expected(&f, &auts, &expect_c_action(&f, 2, 2)) {
        Err(AutGroupError::Mismatch { matrix: Some(_), .. }) => {}
        other => panic!("{other:?}"),
    }
}

#[test]
fn budget_is_enforced() {
    let f = fp(5);
    let l = rigid_algebra(2, &f).unwrap();
    let c = algebra_c(&l, 2, &[2, 3, 4]).unwrap();
    let plan = generation_plan(&c).unwrap();
    let opts = EnumerationOptions { budget: 100, ..Default::default() };
    match enumerate_automorphisms(&c, &plan, &opts) {
        Err(AutGroupError::BudgetExceeded { candidates, .. }) => assert_eq!(candidates, 480),
        other => panic!("{other:?}"),
    }
}

#[test]
fn worker_count_does_not_change_the_result() {
    let f = fp(5);
    let l = rigid_algebra(2, &f).unwrap();
    let c = algebra_c(&l, 2, &[2, 3, 4]).unwrap();
    let plan = generation_plan(&c).unwrap();
    let one = enumerate_automorphisms(&c, &plan, &EnumerationOptions::default()).unwrap();
    let three = enumerate_automorphisms(&c, &plan, &EnumerationOptions { workers: 3, ..Default::default() }).unwrap();
    assert_eq!(one, three);
    let unfiltered = enumerate_automorphisms(&c, &plan, &EnumerationOptions { prefilter: false, ..Default::default() }).unwrap();
    assert_eq!(one.elements, unfiltered.elements);
}

#[test]
fn hypotheses_failure_falls_back_to_brute_force() {
    let f = fp(3);
    let z = zero_algebra(2, &f).unwrap();
    let auts = automorphism_group(&z, &EnumerationOptions::default()).unwrap();
    assert_eq!(auts.method, "brute force");
    assert_eq!(auts.order(), 48);
}

#[test]
fn gl_orders() {
    assert_eq!(gl_order(2, 5), 480);
    assert_eq!(gl_order(2, 7), 2016);
    assert_eq!(gl_order(3, 7), 33_784_128);
}
