use serde::Serialize;
use serde_json::{json, Value};

use super::params::{elem, matrix, seq};
use super::{
    algebra_e, certified_lambda, choose_lambda, format_seq, rigid_algebra, units, wrap_simple, ConstructionError,
    ConstructionParams, Result, WrapVariant,
};
use crate::algebra::{projective_point_count, Algebra, NotSimpleWitness, SimplicityMode, SimplicityVerdict};
use crate::autgroup::{
    automorphism_group, expect_permutation_action, expect_wrapped, match_expected, verify_block_hypotheses, AutGroupError,
    AutomorphismSet, EnumerationOptions, Expectation,
};
use crate::field::Field;
use crate::linalg::Matrix;
use crate::perm::PermGroup;

/// Projective points up to which simplicity is decided by exhaustive spinning.
const EXHAUSTIVE_POINTS: u64 = 200_000;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RealizeOptions {
    /// Run the automorphism enumeration (the expensive step).
    pub enumerate: bool,
    pub enumeration: EnumerationOptions,
    /// `None` picks exhaustive, then Norton, then sampling.
    pub simplicity: Option<SimplicityMode>,
}

impl Default for RealizeOptions {
    fn default() -> Self {
        RealizeOptions { enumerate: true, enumeration: EnumerationOptions::default(), simplicity: None }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum CheckStatus {
    Pass,
    Fail,
    Inconclusive,
    Skipped,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Check {
    pub claim: String,
    pub status: CheckStatus,
    pub detail: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub witness: Option<Value>,
}

impl Check {
    pub fn new(claim: &str, status: CheckStatus, detail: impl Into<String>) -> Self {
        Check { claim: claim.into(), status, detail: detail.into(), witness: None }
    }
}

#[derive(Debug, Clone)]
pub struct ConstructionReport<F: Field> {
    pub algebra: Algebra<F>,
    pub checks: Vec<Check>,
    pub automorphisms: Option<AutomorphismSet<F::Elem>>,
    pub parameters: Value,
}

impl<F: Field> ConstructionReport<F> {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.status == CheckStatus::Pass || c.status == CheckStatus::Skipped)
    }

    pub fn failed(&self) -> bool {
        self.checks.iter().any(|c| c.status == CheckStatus::Fail)
    }

    pub fn to_json(&self) -> Value {
        let a = &self.algebra;
        let mut v = json!({
            "construction": a.meta().construction,
            "field": a.field().spec().to_string(),
            "dim": a.dim(),
            "parameters": self.parameters,
            "checks": self.checks,
        });
        if let Some(auts) = &self.automorphisms {
            v["aut_order"] = json!(auts.order());
            v["aut_complete"] = json!(auts.complete);
            v["aut_method"] = json!(auts.method);
            v["matched_form"] = json!(auts.matched_form);
        }
        if let Some(s) = a.meta().claims.simple {
            v["simple"] = json!(s && self.check_passed("simple"));
        }
        v
    }

    fn check_passed(&self, claim: &str) -> bool {
        self.checks.iter().any(|c| c.claim == claim && c.status == CheckStatus::Pass)
    }
}

/// Simplicity with the automatic escalation: exhaustive when small, else
/// Norton, else sampling (which can only be inconclusive).
pub fn simplicity_check<F: Field>(a: &Algebra<F>, mode: Option<SimplicityMode>, workers: usize) -> Check {
    let modes = match mode {
        Some(m) => vec![m],
        None => {
            let small = a.field().order().and_then(|q| projective_point_count(q, a.dim())).is_some_and(|p| p <= EXHAUSTIVE_POINTS);
            if small {
                vec![SimplicityMode::Exhaustive]
            } else {
                vec![SimplicityMode::Norton { seed: 1, rounds: 20 }, SimplicityMode::Sampled { seed: 1, rounds: 1000 }]
            }
        }
    };
    let mut reasons = Vec::new();
    for m in modes {
        match a.is_simple_with(m, workers) {
            Ok(SimplicityVerdict::Simple { certificate }) => return Check::new("simple", CheckStatus::Pass, certificate),
            Ok(SimplicityVerdict::NotSimple(w)) => {
                let mut c = Check::new("simple", CheckStatus::Fail, "");
                match w {
                    NotSimpleWitness::ZeroMultiplication => c.detail = "multiplication is zero".into(),
                    NotSimpleWitness::ProperIdeal(s) => {
                        c.detail = format!("proper nonzero ideal of dimension {}", s.dim());
                        c.witness = Some(json!(s.basis().iter().map(|v| a.format_vec(v)).collect::<Vec<_>>()));
                    }
                }
                return c;
            }
            Ok(SimplicityVerdict::Inconclusive { reason }) => reasons.push(reason),
            Err(e) => reasons.push(e.to_string()),
        }
    }
    Check::new("simple", CheckStatus::Inconclusive, reasons.join("; "))
}

/// Automorphism count against `expected_order`, then the shape against `expectation`.
pub fn automorphism_checks<F: Field>(
    a: &Algebra<F>,
    expected_order: Option<u64>,
    expectation: Option<&Expectation<F::Elem>>,
    opts: &EnumerationOptions,
) -> (Vec<Check>, Option<AutomorphismSet<F::Elem>>) {
    let mut checks = Vec::new();
    let mut auts = match automorphism_group(a, opts) {
        Ok(s) => s,
        Err(e @ AutGroupError::BudgetExceeded { .. }) => {
            checks.push(Check::new("aut_order", CheckStatus::Skipped, e.to_string()));
            return (checks, None);
        }
        Err(e) => {
            checks.push(Check::new("aut_order", CheckStatus::Inconclusive, e.to_string()));
            return (checks, None);
        }
    };
    let f = a.field();
    if let Some(order) = expected_order {
        let found = auts.order() as u64;
        let status = if found == order {
            if auts.complete {
                CheckStatus::Pass
            } else {
                CheckStatus::Inconclusive
            }
        } else if auts.complete || found > order {
            CheckStatus::Fail
        } else {
            CheckStatus::Inconclusive
        };
        let mut c = Check::new("aut_order", status, format!("{found} automorphisms by {}, expected {order}", auts.method));
        if status == CheckStatus::Fail {
            c.witness = auts.elements.iter().find(|m| !m.is_identity(f)).map(|m| matrix_value(f, m));
        }
        checks.push(c);
    }
    if let Some(exp) = expectation {
        match match_expected(f, &auts, exp) {
            Ok(m) => {
                auts.matched_form = Some(m.form.clone());
                checks.push(Check::new("aut_shape", CheckStatus::Pass, format!("matches {}", m.form)));
            }
            Err(AutGroupError::Mismatch { form, reason, matrix }) => {
                let mut c = Check::new("aut_shape", CheckStatus::Fail, format!("{form}: {reason}"));
                c.witness = matrix.map(Value::String);
                checks.push(c);
            }
            Err(e) => checks.push(Check::new("aut_shape", CheckStatus::Fail, e.to_string())),
        }
    }
    (checks, Some(auts))
}

fn matrix_value<F: Field>(f: &F, m: &Matrix<F::Elem>) -> Value {
    Value::Array((0..m.rows()).map(|i| format_seq(f, m.row(i))).collect())
}

/// `λ` from the parameters, else the canonical choice with distinct ratios,
/// else (field too small for that) the first `λ` certified by its line normalizer.
pub fn lambda_for<F: Field>(g: &PermGroup, f: &F, params: &ConstructionParams) -> Result<Vec<F::Elem>> {
    if let Some(l) = seq(f, "lambda", &params.lambda)? {
        return Ok(l);
    }
    match choose_lambda(g.degree(), f) {
        Ok(l) => Ok(l),
        Err(ConstructionError::FieldTooSmall { .. }) => certified_lambda(g, f),
        Err(e) => Err(e),
    }
}

/// `wrap_simple` with `α, ζ, Δ` and the variant taken from the parameters
/// or defaulted: canonical units and the identity pairing. Returns `Δ` too.
pub fn wrap_with_params<F: Field>(inner: &Algebra<F>, params: &ConstructionParams) -> Result<(Algebra<F>, Matrix<F::Elem>)> {
    let f = inner.field();
    let variant = params.variant.unwrap_or(WrapVariant::Standard);
    let defaults = match variant {
        WrapVariant::Standard => units(f, 2, "α, ζ (|F| ≥ 4)")?,
        WrapVariant::ZetaZero => vec![units(f, 1, "α (|F| ≥ 3)")?.remove(0), f.zero()],
    };
    let alpha = elem(f, "alpha", &params.alpha)?.unwrap_or_else(|| defaults[0].clone());
    let zeta = elem(f, "zeta", &params.zeta)?.unwrap_or_else(|| defaults[1].clone());
    let delta = matrix(f, "wrap_pairing", &params.wrap_pairing)?.unwrap_or_else(|| Matrix::identity(f, inner.dim()));
    let w = wrap_simple(inner, &alpha, &zeta, &delta, variant)?;
    Ok((w, delta))
}

/// Builds the simple algebra whose automorphism group is `G` and checks
/// every claim made about it.
pub fn realize_finite_group<F: Field>(
    g: &PermGroup,
    f: &F,
    params: &ConstructionParams,
    opts: &RealizeOptions,
) -> Result<ConstructionReport<F>> {
    let mut parameters = serde_json::Map::new();
    parameters.insert("group".into(), json!(g.describe()));
    let (inner, inner_exp) = if g.is_trivial() {
        let rigid = rigid_algebra(2, f)?;
        let id = Matrix::identity(f, rigid.dim());
        (rigid, Expectation::itself("identity", vec![id]))
    } else {
        let lambda = lambda_for(g, f, params)?;
        let mu = match seq(f, "mu", &params.mu)? {
            Some(m) => m,
            None => units(f, g.order() + 1, "μ (|F| ≥ |G|+3)")?,
        };
        parameters.insert("lambda".into(), format_seq(f, &lambda));
        parameters.insert("mu".into(), format_seq(f, &mu));
        let e = algebra_e(g, &lambda, &mu, f)?;
        let exp = expect_permutation_action(f, g, &lambda);
        (e, exp)
    };
    let (mut algebra, delta) = wrap_with_params(&inner, params)?;
    for key in ["alpha", "zeta", "variant"] {
        parameters.insert(key.into(), algebra.meta().params[key].clone());
    }
    algebra.meta_mut().claims.simple = Some(true);
    algebra.meta_mut().claims.aut_order = Some(g.order() as u64);

    let mut checks = Vec::new();
    checks.push(match verify_block_hypotheses(&algebra) {
        Ok(v) => Check::new("block_hypotheses", CheckStatus::Pass, v.describe().join(" | ")),
        Err(e) => Check::new("block_hypotheses", CheckStatus::Fail, e.to_string()),
    });
    checks.push(simplicity_check(&algebra, opts.simplicity, opts.enumeration.workers));
    let automorphisms = if opts.enumerate {
        let exp = expect_wrapped(f, &inner_exp, &delta);
        let (c, auts) = automorphism_checks(&algebra, Some(g.order() as u64), Some(&exp), &opts.enumeration);
        checks.extend(c);
        auts
    } else {
        checks.push(Check::new("aut_order", CheckStatus::Skipped, "enumeration not requested"));
        None
    };
    Ok(ConstructionReport { algebra, checks, automorphisms, parameters: Value::Object(parameters) })
}
