use serde::{Deserialize, Serialize};

use super::{ConstructionError, Result, WrapVariant};
use crate::algebra::SchemaViolation;
use crate::field::Field;
use crate::linalg::Matrix;

/// Optional overrides for the scalar and pairing choices of the constructions.
/// Anything left out gets the canonical choice.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ConstructionParams {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub lambda: Option<Vec<String>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub mu: Option<Vec<String>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub gamma: Option<Vec<String>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub delta: Option<Vec<String>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub alpha: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub zeta: Option<String>,
    /// Pairing of `D`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub phi: Option<Vec<Vec<String>>>,
    /// Pairing `Δ` of the simple wrapper.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub wrap_pairing: Option<Vec<Vec<String>>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub variant: Option<WrapVariant>,
}

impl ConstructionParams {
    pub fn from_json(text: &str) -> std::result::Result<Self, SchemaViolation> {
        let de = &mut serde_json::Deserializer::from_str(text);
        serde_path_to_error::deserialize(de).map_err(|e| {
            let path = e.path().to_string();
            SchemaViolation { location: if path.is_empty() { "$".into() } else { path }, message: e.inner().to_string() }
        })
    }
}

impl ConstructionParams {
    /// A scalar sequence override: `lambda`, `mu`, `gamma` or `delta`.
    pub fn sequence<F: Field>(&self, f: &F, key: &str) -> Result<Option<Vec<F::Elem>>> {
        let v = match key {
            "lambda" => &self.lambda,
            "mu" => &self.mu,
            "gamma" => &self.gamma,
            "delta" => &self.delta,
            _ => return Err(ConstructionError::InvalidParameter(format!("unknown sequence `{key}`"))),
        };
        seq(f, key, v)
    }

    /// A matrix override: `phi` or `wrap_pairing`.
    pub fn matrix<F: Field>(&self, f: &F, key: &str) -> Result<Option<Matrix<F::Elem>>> {
        let v = match key {
            "phi" => &self.phi,
            "wrap_pairing" => &self.wrap_pairing,
            _ => return Err(ConstructionError::InvalidParameter(format!("unknown matrix `{key}`"))),
        };
        matrix(f, key, v)
    }
}

fn parse_one<F: Field>(f: &F, key: &str, s: &str) -> Result<F::Elem> {
    f.parse_elem(s).map_err(|e| ConstructionError::InvalidParameter(format!("{key}: {e}")))
}

pub(crate) fn elem<F: Field>(f: &F, key: &str, v: &Option<String>) -> Result<Option<F::Elem>> {
    v.as_deref().map(|s| parse_one(f, key, s)).transpose()
}

pub(crate) fn seq<F: Field>(f: &F, key: &str, v: &Option<Vec<String>>) -> Result<Option<Vec<F::Elem>>> {
    v.as_ref().map(|xs| xs.iter().map(|s| parse_one(f, key, s)).collect()).transpose()
}

pub(crate) fn matrix<F: Field>(f: &F, key: &str, v: &Option<Vec<Vec<String>>>) -> Result<Option<Matrix<F::Elem>>> {
    let Some(rows) = v else { return Ok(None) };
    let width = rows.first().map_or(0, Vec::len);
    if rows.iter().any(|r| r.len() != width) {
        return Err(ConstructionError::InvalidParameter(format!("{key}: ragged matrix")));
    }
    let parsed = rows
        .iter()
        .map(|r| r.iter().map(|s| parse_one(f, key, s)).collect::<Result<Vec<_>>>())
        .collect::<Result<Vec<_>>>()?;
    Ok(Some(Matrix::from_rows(parsed)))
}
