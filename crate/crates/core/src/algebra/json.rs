//! JSON interchange format for algebras.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use super::{Algebra, AlgebraError, Block, Meta, Role};
use crate::field::{AnyField, Field, FieldSpec, FiniteField, Rationals};
use crate::linalg::Matrix;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("schema violation at {location}: {message}")]
pub struct SchemaViolation {
    pub location: String,
    pub message: String,
}

impl SchemaViolation {
    fn new(location: impl Into<String>, message: impl Into<String>) -> Self {
        SchemaViolation { location: location.into(), message: message.into() }
    }
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawAlgebra {
    field: FieldSpec,
    dim: usize,
    basis: Vec<String>,
    structure: Vec<(usize, usize, usize, String)>,
    #[serde(default)]
    blocks: Vec<RawBlock>,
    #[serde(default)]
    meta: Meta,
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(untagged)]
enum Links {
    One(String),
    Many(Vec<String>),
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawBlock {
    name: String,
    range: [usize; 2],
    role: Role,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    eigenvalue: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    linked_to: Option<Links>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pairing: Option<Vec<Vec<String>>>,
}

/// An algebra over a field chosen by the input file.
#[derive(Debug, Clone, PartialEq)]
pub enum AnyAlgebra {
    Finite(Algebra<FiniteField>),
    Rational(Algebra<Rationals>),
}

impl AnyAlgebra {
    pub fn to_json(&self) -> String {
        match self {
            AnyAlgebra::Finite(a) => a.to_json(),
            AnyAlgebra::Rational(a) => a.to_json(),
        }
    }
}

fn parse_raw(text: &str) -> Result<RawAlgebra, SchemaViolation> {
    let de = &mut serde_json::Deserializer::from_str(text);
    serde_path_to_error::deserialize(de).map_err(|e| {
        let path = e.path().to_string();
        SchemaViolation::new(if path.is_empty() { "$".to_string() } else { path }, e.inner().to_string())
    })
}

/// Reads an algebra, building its field from the embedded field description.
pub fn parse_any(text: &str) -> Result<AnyAlgebra, AlgebraError> {
    let raw = parse_raw(text)?;
    let field = raw.field.build().map_err(|e| SchemaViolation::new("field", e.to_string()))?;
    Ok(match field {
        AnyField::Finite(f) => AnyAlgebra::Finite(from_raw(f, raw)?),
        AnyField::Rational(f) => AnyAlgebra::Rational(from_raw(f, raw)?),
    })
}

fn from_raw<F: Field>(f: F, raw: RawAlgebra) -> Result<Algebra<F>, AlgebraError> {
    if raw.basis.len() != raw.dim {
        return Err(SchemaViolation::new("dim", format!("dim is {} but basis has {} names", raw.dim, raw.basis.len())).into());
    }
    let dim = raw.dim;
    let mut entries = Vec::with_capacity(raw.structure.len());
    let mut prev: Option<(usize, usize, usize)> = None;
    for (n, (i, j, k, c)) in raw.structure.into_iter().enumerate() {
        for (pos, idx) in [i, j, k].into_iter().enumerate() {
            if idx >= dim {
                return Err(SchemaViolation::new(format!("structure[{n}][{pos}]"), format!("index {idx} out of range for dim {dim}")).into());
            }
        }
        let coeff = f.parse_elem(&c).map_err(|e| SchemaViolation::new(format!("structure[{n}][3]"), e.to_string()))?;
        if f.is_zero(&coeff) {
            return Err(SchemaViolation::new(format!("structure[{n}][3]"), "zero coefficients are not allowed").into());
        }
        if let Some(p) = prev {
            if p >= (i, j, k) {
                return Err(SchemaViolation::new(format!("structure[{n}]"), "entries must be strictly sorted by (i,j,k)").into());
            }
        }
        prev = Some((i, j, k));
        entries.push((i, j, k, coeff));
    }
    let mut blocks = Vec::with_capacity(raw.blocks.len());
    for (n, rb) in raw.blocks.into_iter().enumerate() {
        let eigenvalue = rb
            .eigenvalue
            .map(|s| f.parse_elem(&s))
            .transpose()
            .map_err(|e| SchemaViolation::new(format!("blocks[{n}].eigenvalue"), e.to_string()))?;
        let linked_to = match rb.linked_to {
            None => Vec::new(),
            Some(Links::One(s)) => vec![s],
            Some(Links::Many(v)) => v,
        };
        let pairing = match rb.pairing {
            None => None,
            Some(rows) => {
                let width = rows.first().map_or(0, |r| r.len());
                let mut parsed = Vec::with_capacity(rows.len());
                for (r, row) in rows.iter().enumerate() {
                    if row.len() != width {
                        return Err(SchemaViolation::new(format!("blocks[{n}].pairing[{r}]"), "ragged pairing matrix").into());
                    }
                    let vals = row
                        .iter()
                        .enumerate()
                        .map(|(c, s)| f.parse_elem(s).map_err(|e| SchemaViolation::new(format!("blocks[{n}].pairing[{r}][{c}]"), e.to_string())))
                        .collect::<Result<Vec<_>, _>>()?;
                    parsed.push(vals);
                }
                Some(Matrix::from_rows(parsed))
            }
        };
        if rb.range[0] > rb.range[1] {
            return Err(SchemaViolation::new(format!("blocks[{n}].range"), "range start exceeds end").into());
        }
        blocks.push(Block { name: rb.name, range: rb.range[0]..rb.range[1], role: rb.role, eigenvalue, linked_to, pairing });
    }
    Algebra::from_parts(f, raw.basis, entries, blocks, raw.meta).map_err(|e| match e {
        AlgebraError::InvalidBlocks(m) => SchemaViolation::new("blocks", m).into(),
        other => other,
    })
}

impl<F: Field> Algebra<F> {
    /// Canonical JSON text; equal algebras serialize to identical bytes.
    pub fn to_json(&self) -> String {
        let f = self.field();
        let raw = RawAlgebra {
            field: f.spec(),
            dim: self.dim(),
            basis: self.basis_names().to_vec(),
            structure: self.entries().iter().map(|(i, j, k, c)| (*i, *j, *k, f.format_elem(c))).collect(),
            blocks: self
                .blocks()
                .iter()
                .map(|b| RawBlock {
                    name: b.name.clone(),
                    range: [b.range.start, b.range.end],
                    role: b.role,
                    eigenvalue: b.eigenvalue.as_ref().map(|e| f.format_elem(e)),
                    linked_to: match b.linked_to.len() {
                        0 => None,
                        1 => Some(Links::One(b.linked_to[0].clone())),
                        _ => Some(Links::Many(b.linked_to.clone())),
                    },
                    pairing: b.pairing.as_ref().map(|p| {
                        (0..p.rows()).map(|i| p.row(i).iter().map(|x| f.format_elem(x)).collect()).collect()
                    }),
                })
                .collect(),
            meta: self.meta().clone(),
        };
        let mut s = serde_json::to_string_pretty(&raw).expect("algebra serializes");
        s.push('\n');
        s
    }

    /// Reads an algebra that must live over `field`.
    pub fn from_json(field: &F, text: &str) -> Result<Self, AlgebraError> {
        let raw = parse_raw(text)?;
        if raw.field != field.spec() {
            return Err(SchemaViolation::new("field", format!("expected {}, found {}", field.spec(), raw.field)).into());
        }
        from_raw(field.clone(), raw)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::AlgebraBuilder;

    fn sample() -> Algebra<FiniteField> {
        let f = FiniteField::prime(5).unwrap();
        let mut b = AlgebraBuilder::new(f, vec!["e".into(), "e1".into()]);
        b.add(0, 0, 0, 1).add(0, 1, 1, 1).add(1, 0, 1, 2).add(1, 1, 1, 1);
        b.block(Block::new("e", 0..1, Role::UnitLine).with_eigenvalue(1));
        b.block(Block::new("e1", 1..2, Role::Generator).with_eigenvalue(2));
        b.meta(Meta::new("rigid").param("s", 2));
        b.build().unwrap()
    }

    #[test]
    fn round_trip_is_byte_identical() {
        let a = sample();
        let text = a.to_json();
        let AnyAlgebra::Finite(back) = parse_any(&text).unwrap() else { panic!() };
        assert_eq!(back, a);
        assert_eq!(back.to_json(), text);
    }

    #[test]
    fn out_of_range_index_is_located() {
        let text = sample().to_json().replace("[\n      1,\n      1,\n      1,", "[\n      1,\n      1,\n      7,");
        match parse_any(&text) {
            Err(AlgebraError::Schema(v)) => assert_eq!(v.location, "structure[3][2]"),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn zero_coefficients_are_rejected() {
        let text = sample().to_json().replacen("\"2\"", "\"0\"", 1);
        match parse_any(&text) {
            Err(AlgebraError::Schema(v)) => assert_eq!(v.location, "structure[2][3]"),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn type_errors_carry_a_path() {
        let text = sample().to_json().replace("\"dim\": 2", "\"dim\": \"two\"");
        match parse_any(&text) {
            Err(AlgebraError::Schema(v)) => assert_eq!(v.location, "dim"),
            other => panic!("{other:?}"),
        }
    }
}
