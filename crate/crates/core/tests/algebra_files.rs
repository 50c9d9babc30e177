use autalg::algebra::{parse_any, Algebra, AlgebraError, AnyAlgebra};
use autalg::constructions::{algebra_c, rigid_algebra, units, wrap_with_params, ConstructionParams};
use autalg::field::FiniteField;

fn c_over_f5() -> Algebra<FiniteField> {
    let f = FiniteField::prime(5).unwrap();
    let l = rigid_algebra(2, &f).unwrap();
    algebra_c(&l, 2, &units(&f, 3, "γ").unwrap()).unwrap()
}

#[test]
fn nested_blocks_survive_a_round_trip() {
    let (w, _) = wrap_with_params(&c_over_f5(), &ConstructionParams::default()).unwrap();
    let text = w.to_json();
    let AnyAlgebra::Finite(back) = parse_any(&text).unwrap() else { panic!("finite field expected") };
    assert_eq!(back, w);
    assert_eq!(back.to_json(), text);
    assert_eq!(back.nested("R").unwrap().nested("L").unwrap().entries(), rigid_algebra(2, back.field()).unwrap().entries());
}

#[test]
fn schema_violations_name_the_location() {
    let text = c_over_f5().to_json();
    let mut v: serde_json::Value = serde_json::from_str(&text).unwrap();
    v["structure"][0][3] = serde_json::json!("0");
    match parse_any(&v.to_string()) {
        Err(AlgebraError::Schema(s)) => assert_eq!(s.location, "structure[0][3]"),
        other => panic!("{other:?}"),
    }

    let mut v: serde_json::Value = serde_json::from_str(&text).unwrap();
    v["blocks"][0]["colour"] = serde_json::json!("red");
    match parse_any(&v.to_string()) {
        Err(AlgebraError::Schema(s)) => assert!(s.location.starts_with("blocks[0]"), "{}", s.location),
        other => panic!("{other:?}"),
    }
}

#[test]
fn reading_over_the_wrong_field_is_refused() {
    let text = c_over_f5().to_json();
    let f7 = FiniteField::prime(7).unwrap();
    assert!(matches!(Algebra::from_json(&f7, &text), Err(AlgebraError::Schema(_))));
}
