//! Automorphism groups of block-structured algebras.
//!
//! Once the left identity is unique and the declared blocks are exactly the
//! eigenspaces of right multiplication by it, every automorphism fixes the
//! identity and preserves each block. An automorphism is then determined by
//! its restriction to the generator blocks and to nested sub-algebras; blocks
//! tied to others by a pairing are forced to the adjoint-inverse. The
//! enumeration sweeps only those free choices and re-checks every result.

mod brute;
mod enumerate;
mod expect;

pub use brute::{brute_force_automorphisms, sample_automorphisms, BRUTE_FORCE_LIMIT};
pub use enumerate::{
    automorphism_group, enumerate_automorphisms, enumerate_automorphisms_observed, gl_order, AutomorphismSet,
    EnumerationOptions, EnumerationStats, Observer, DEFAULT_BUDGET,
};
pub use expect::{
    expect_c_action, expect_d_action, expectation_from_meta, expect_permutation_action, expect_wrapped, match_expected, special_linear, Expectation,
    Matching,
};

use std::ops::Range;

use thiserror::Error;

use crate::algebra::{Algebra, AlgebraError, Role};
use crate::field::Field;
use crate::linalg::{self, solve_affine, AffineSolution, Echelon, Matrix};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum AutGroupError {
    #[error("{level}: no unique left identity ({found})")]
    NoUniqueLeftIdentity { level: String, found: String },
    #[error("{level}: eigenblock decomposition fails: {reason}")]
    DecompositionFails { level: String, reason: String },
    #[error("{level}: block `{block}` does not match the algebra: {reason}")]
    BlockMetadataMismatch { level: String, block: String, reason: String },
    #[error("{level}: generator blocks do not generate; {missing} target dimensions unreached ({unreached})")]
    NotGenerated { level: String, missing: usize, unreached: String },
    #[error("{candidates} candidates exceed the budget of {budget}")]
    BudgetExceeded { candidates: u128, budget: u64 },
    #[error("block hypotheses not verified: {0}")]
    HypothesesNotVerified(String),
    #[error("automorphism set does not match {form}: {reason}")]
    Mismatch { form: String, reason: String, matrix: Option<String> },
    #[error("unsupported: {0}")]
    Unsupported(String),
    #[error(transparent)]
    Algebra(#[from] AlgebraError),
}

pub type Result<T> = std::result::Result<T, AutGroupError>;

fn level_name(path: &str) -> String {
    if path.is_empty() {
        "top level".into()
    } else {
        format!("block {path}")
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct VerifiedBlock {
    pub name: String,
    pub range: Range<usize>,
    pub role: Role,
    pub eigenvalue: String,
}

/// The checked block structure of one level, with nested sub-algebras.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct VerifiedLevel {
    pub path: String,
    pub unit: usize,
    pub blocks: Vec<VerifiedBlock>,
    pub nested: Vec<VerifiedLevel>,
}

impl VerifiedLevel {
    pub fn describe(&self) -> Vec<String> {
        let mut out = Vec::new();
        self.describe_into(&mut out);
        out
    }

    fn describe_into(&self, out: &mut Vec<String>) {
        let parts: Vec<String> = self
            .blocks
            .iter()
            .map(|b| format!("{} [{}..{}) {} λ={}", b.name, b.range.start, b.range.end, b.role, b.eigenvalue))
            .collect();
        out.push(format!("{}: unit b{}; {}", level_name(&self.path), self.unit, parts.join("; ")));
        for n in &self.nested {
            n.describe_into(out);
        }
    }
}

/// Indices covered by a list of block names, in order.
pub(crate) fn linked_indices<F: Field>(a: &Algebra<F>, names: &[String]) -> Option<Vec<usize>> {
    let mut out = Vec::new();
    for n in names {
        out.extend(a.block(n)?.range.clone());
    }
    Some(out)
}

/// Unique left identity, eigenblocks of `R_e` equal to the declared top-level
/// blocks, pairing relations present in the structure constants, recursively.
pub fn verify_block_hypotheses<F: Field>(a: &Algebra<F>) -> Result<VerifiedLevel> {
    verify_level(a, "")
}

fn verify_level<F: Field>(a: &Algebra<F>, path: &str) -> Result<VerifiedLevel> {
    let f = a.field();
    let level = level_name(path);
    let e = match a.left_identities() {
        AffineSolution::Unique(e) => e,
        AffineSolution::Empty => return Err(AutGroupError::NoUniqueLeftIdentity { level, found: "none".into() }),
        AffineSolution::Family { homogeneous, .. } => {
            return Err(AutGroupError::NoUniqueLeftIdentity {
                level,
                found: format!("an affine family of dimension {}", homogeneous.dim()),
            })
        }
    };
    let mismatch = |block: &str, reason: String| AutGroupError::BlockMetadataMismatch {
        level: level.clone(),
        block: block.to_string(),
        reason,
    };
    let unit = a.unit_block().ok_or_else(|| mismatch("-", "no unit-line block".into()))?;
    if unit.len() != 1 || e != linalg::unit_vector(f, a.dim(), unit.range.start) {
        return Err(mismatch(&unit.name, format!("the left identity is {}", a.format_vec(&e))));
    }
    let decomposition = a
        .eigenblock_decomposition(&e, true)
        .map_err(|d| AutGroupError::DecompositionFails { level: level.clone(), reason: d.to_string() })?;

    let top: Vec<_> = a.top_blocks().collect();
    for (i, b) in top.iter().enumerate() {
        let Some(lam) = &b.eigenvalue else {
            return Err(mismatch(&b.name, "no declared eigenvalue".into()));
        };
        if let Some(other) = top[..i].iter().find(|o| o.eigenvalue.as_ref() == Some(lam)) {
            return Err(AutGroupError::DecompositionFails {
                level,
                reason: format!("blocks `{}` and `{}` share eigenvalue {}", other.name, b.name, f.format_elem(lam)),
            });
        }
    }
    for eb in &decomposition {
        let Some(b) = top.iter().find(|b| b.eigenvalue.as_ref() == Some(&eb.eigenvalue)) else {
            return Err(mismatch("-", format!("eigenvalue {} of R_e has no declared block", f.format_elem(&eb.eigenvalue))));
        };
        let coordinate = b.range.clone().all(|i| eb.space.contains(f, &linalg::unit_vector(f, a.dim(), i)));
        if eb.space.dim() != b.len() || !coordinate {
            return Err(mismatch(
                &b.name,
                format!("eigenspace for {} has dimension {}, block has {}", f.format_elem(&eb.eigenvalue), eb.space.dim(), b.len()),
            ));
        }
    }

    let has_generator = top.iter().any(|b| b.role == Role::Generator);
    for b in &top {
        if b.role == Role::Generated && !has_generator {
            return Err(mismatch(&b.name, "generated block without a generator block".into()));
        }
        if b.role == Role::PairingLinked && b.pairing.is_none() {
            return Err(mismatch(&b.name, "pairing-linked block without a pairing".into()));
        }
        if b.role == Role::UnitLine && b.name != unit.name {
            return Err(mismatch(&b.name, "second unit-line block".into()));
        }
        if let Some(p) = &b.pairing {
            let ys = linked_indices(a, &b.linked_to).ok_or_else(|| mismatch(&b.name, "unknown linked block".into()))?;
            check_pairing(a, b.range.clone(), &ys, p, unit.range.start).map_err(|r| mismatch(&b.name, r))?;
        }
    }

    let mut nested = Vec::new();
    for b in &top {
        if b.role == Role::Plain && !a.children(&b.name).is_empty() {
            let sub = a.nested(&b.name)?;
            let sub_path = if path.is_empty() { b.name.clone() } else { format!("{path}/{}", b.name) };
            nested.push(verify_level(&sub, &sub_path)?);
        }
    }
    Ok(VerifiedLevel {
        path: path.to_string(),
        unit: unit.range.start,
        blocks: top
            .iter()
            .map(|b| VerifiedBlock {
                name: b.name.clone(),
                range: b.range.clone(),
                role: b.role,
                eigenvalue: f.format_elem(b.eigenvalue.as_ref().expect("checked above")),
            })
            .collect(),
        nested,
    })
}

/// `x_i·y_j = P_ij·u` for all `i, j`, or `y_j·x_i = P_ij·u` for all `i, j`.
fn check_pairing<F: Field>(a: &Algebra<F>, xs: Range<usize>, ys: &[usize], p: &Matrix<F::Elem>, u: usize) -> std::result::Result<(), String> {
    let f = a.field();
    let matches = |left: bool| {
        xs.clone().enumerate().all(|(i, x)| {
            ys.iter().enumerate().all(|(j, &y)| {
                let prod = if left { a.basis_product(x, y) } else { a.basis_product(y, x) };
                let c = p.get(i, j);
                if f.is_zero(c) {
                    prod.is_empty()
                } else {
                    prod.len() == 1 && prod[0].0 == u && prod[0].1 == *c
                }
            })
        })
    };
    if matches(true) || matches(false) {
        Ok(())
    } else {
        Err("products with the linked blocks are not the pairing times the unit".into())
    }
}

/// How each generated basis vector arises from generator-block basis vectors.
///
/// Working vectors are numbered: first the seeds (generator basis vectors),
/// then one per step, each the product of two earlier working vectors. Every
/// target basis vector is a linear combination of working vectors.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GenerationPlan<E> {
    pub generator_blocks: Vec<String>,
    seeds: Vec<usize>,
    steps: Vec<(usize, usize)>,
    targets: Vec<(usize, Vec<(usize, E)>)>,
}

impl<E: Clone> GenerationPlan<E> {
    pub fn seeds(&self) -> &[usize] {
        &self.seeds
    }

    pub fn targets(&self) -> impl Iterator<Item = usize> + '_ {
        self.targets.iter().map(|(t, _)| *t)
    }

    pub fn steps(&self) -> &[(usize, usize)] {
        &self.steps
    }

    /// Fills `images[t]` for every target from the images of the seeds.
    pub fn apply<F: Field<Elem = E>>(&self, a: &Algebra<F>, images: &mut [Vec<E>]) {
        if self.targets.is_empty() {
            return;
        }
        let f = a.field();
        let mut work: Vec<Vec<E>> = self.seeds.iter().map(|&s| images[s].clone()).collect();
        for &(x, y) in &self.steps {
            let p = a.mul_unchecked(&work[x], &work[y]);
            work.push(p);
        }
        for (t, combo) in &self.targets {
            let mut v = vec![f.zero(); a.dim()];
            for (w, c) in combo {
                linalg::axpy(f, &mut v, c, &work[*w]);
            }
            images[*t] = v;
        }
    }

    /// One line per target: its expression as a combination of product trees.
    pub fn describe<F: Field<Elem = E>>(&self, a: &Algebra<F>) -> Vec<String> {
        let f = a.field();
        let names = a.basis_names();
        let mut exprs: Vec<String> = self.seeds.iter().map(|&s| names[s].clone()).collect();
        for &(x, y) in &self.steps {
            let e = format!("({}·{})", exprs[x], exprs[y]);
            exprs.push(e);
        }
        self.targets
            .iter()
            .map(|(t, combo)| {
                let terms: Vec<String> = combo
                    .iter()
                    .map(|(w, c)| if f.is_one(c) { exprs[*w].clone() } else { format!("{}·{}", f.format_elem(c), exprs[*w]) })
                    .collect();
                format!("{} = {}", names[*t], terms.join(" + "))
            })
            .collect()
    }
}

/// Breadth-first products of generator-block basis vectors until every
/// basis vector of a generated block is reached.
pub fn generation_plan<F: Field>(a: &Algebra<F>) -> Result<GenerationPlan<F::Elem>> {
    let f = a.field();
    let n = a.dim();
    let top: Vec<_> = a.top_blocks().collect();
    let generator_blocks: Vec<String> = top.iter().filter(|b| b.role == Role::Generator).map(|b| b.name.clone()).collect();
    let seeds: Vec<usize> = top.iter().filter(|b| b.role == Role::Generator).flat_map(|b| b.range.clone()).collect();
    let goal: Vec<usize> = top.iter().filter(|b| b.role == Role::Generated).flat_map(|b| b.range.clone()).collect();
    if goal.is_empty() {
        return Ok(GenerationPlan { generator_blocks, seeds, steps: Vec::new(), targets: Vec::new() });
    }
    let mut work: Vec<Vec<F::Elem>> = seeds.iter().map(|&s| linalg::unit_vector(f, n, s)).collect();
    let mut steps = Vec::new();
    let mut ech = Echelon::new(n);
    for w in &work {
        ech.insert(f, w.clone());
    }
    let reached = |ech: &Echelon<F::Elem>| goal.iter().all(|&t| linalg::is_zero_vec(f, &ech.reduce(f, &linalg::unit_vector(f, n, t))));
    let mut frontier: Vec<usize> = (0..work.len()).collect();
    let mut exhaustive_done = false;
    while !reached(&ech) {
        let mut fresh = Vec::new();
        let mut try_pair = |x: usize, y: usize, work: &mut Vec<Vec<F::Elem>>, ech: &mut Echelon<F::Elem>| {
            let p = a.mul_unchecked(&work[x], &work[y]);
            if ech.insert(f, p.clone()).is_some() {
                work.push(p);
                steps.push((x, y));
                fresh.push(work.len() - 1);
            }
        };
        if !frontier.is_empty() {
            for &x in &frontier {
                for s in 0..seeds.len() {
                    try_pair(x, s, &mut work, &mut ech);
                    try_pair(s, x, &mut work, &mut ech);
                }
            }
        } else if !exhaustive_done {
            exhaustive_done = true;
            let len = work.len();
            for x in 0..len {
                for y in 0..len {
                    try_pair(x, y, &mut work, &mut ech);
                }
            }
        } else {
            let missing: Vec<&str> = goal
                .iter()
                .filter(|&&t| !linalg::is_zero_vec(f, &ech.reduce(f, &linalg::unit_vector(f, n, t))))
                .map(|&t| a.basis_names()[t].as_str())
                .collect();
            return Err(AutGroupError::NotGenerated {
                level: level_name(""),
                missing: missing.len(),
                unreached: missing.join(", "),
            });
        }
        if !fresh.is_empty() {
            exhaustive_done = false;
        }
        frontier = fresh;
    }
    let w = Matrix::from_cols(work);
    let mut targets = Vec::with_capacity(goal.len());
    for &t in &goal {
        let coeffs = match solve_affine(f, &w, &linalg::unit_vector(f, n, t)) {
            AffineSolution::Unique(c) => c,
            AffineSolution::Family { particular, .. } => particular,
            AffineSolution::Empty => unreachable!("target lies in the reached span"),
        };
        let combo = coeffs.into_iter().enumerate().filter(|(_, c)| !f.is_zero(c)).collect();
        targets.push((t, combo));
    }
    Ok(GenerationPlan { generator_blocks, seeds, steps, targets })
}

#[cfg(test)]
mod tests;
