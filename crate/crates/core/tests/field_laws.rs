use autalg::field::{first_irreducible_modulus, Field, FiniteField, Rationals};
use proptest::prelude::*;

fn f49() -> FiniteField {
    FiniteField::new(7, 2, Some(&first_irreducible_modulus(7, 2).unwrap())).unwrap()
}

fn laws<F: Field>(f: &F, a: &F::Elem, b: &F::Elem, c: &F::Elem) {
    assert_eq!(f.add(a, b), f.add(b, a));
    assert_eq!(f.mul(a, b), f.mul(b, a));
    assert_eq!(f.mul(a, &f.add(b, c)), f.add(&f.mul(a, b), &f.mul(a, c)));
    assert_eq!(f.mul(&f.mul(a, b), c), f.mul(a, &f.mul(b, c)));
    assert!(f.is_zero(&f.add(a, &f.neg(a))));
    if !f.is_zero(a) {
        assert!(f.is_one(&f.mul(a, &f.inv(a).unwrap())));
    }
    assert_eq!(f.parse_elem(&f.format_elem(a)).unwrap(), *a);
}

proptest! {
    #[test]
    fn f49_is_a_field(a in 0u64..49, b in 0u64..49, c in 0u64..49) {
        let f = f49();
        laws(&f, &f.nth_element(a), &f.nth_element(b), &f.nth_element(c));
        prop_assert_eq!(f.element_index(&f.nth_element(a)), Some(a));
    }

    #[test]
    fn rationals_are_a_field(a in -50i64..50, b in -50i64..50, c in 1i64..50) {
        let q = Rationals;
        let x = q.div(&q.from_i64(a), &q.from_i64(c)).unwrap();
        laws(&q, &x, &q.from_i64(b), &q.from_i64(c));
    }
}

#[test]
fn frobenius_is_an_automorphism_of_f49() {
    let f = f49();
    let frob = |x: &u32| f.pow(x, 7);
    for x in f.elements() {
        for y in f.elements() {
            assert_eq!(frob(&f.mul(&x, &y)), f.mul(&frob(&x), &frob(&y)));
            assert_eq!(frob(&f.add(&x, &y)), f.add(&frob(&x), &frob(&y)));
        }
    }
    let fixed = f.elements().filter(|x| frob(x) == *x).count();
    assert_eq!(fixed, 7);
}

#[test]
fn unit_group_is_cyclic() {
    let f = f49();
    let has_generator = f.elements().filter(|x| !f.is_zero(x)).any(|g| (1..48).all(|k| !f.is_one(&f.pow(&g, k))));
    assert!(has_generator);
}
