use serde_json::Value;

use crate::algebra::Meta;
use crate::constructions::{c_action, invariant_f, DParams};
use crate::field::Field;
use crate::graded::{build_a, normalizes_subspace, Flavor, GradedBasis};
use crate::linalg::{Matrix, Subspace};
use crate::perm::PermGroup;

use super::enumerate::AutomorphismSet;
use super::{AutGroupError, Result};

/// A reference group together with the automorphism each element should induce.
///
/// `predicted[i]` is the image of `group[i]`; a match also requires the map
/// to respect products.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Expectation<E> {
    pub form: String,
    pub group: Vec<Matrix<E>>,
    pub predicted: Vec<Matrix<E>>,
}

/// Where each predicted matrix sits in the automorphism set.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Matching {
    pub form: String,
    pub bijection: Vec<usize>,
}

/// All `n×n` matrices of determinant 1, lexicographic.
pub fn special_linear<F: Field>(f: &F, n: usize) -> Vec<Matrix<F::Elem>> {
    let q = f.order().expect("finite field");
    let elems: Vec<F::Elem> = f.elements().collect();
    let total = q.pow((n * n) as u32);
    (0..total)
        .filter_map(|idx| {
            let mut data = vec![f.zero(); n * n];
            let mut rest = idx;
            for slot in (0..n * n).rev() {
                data[slot] = elems[(rest % q) as usize].clone();
                rest /= q;
            }
            let m = Matrix::from_vec(n, n, data);
            f.is_one(&m.det(f)).then_some(m)
        })
        .collect()
}

impl<E: Clone> Expectation<E> {
    /// The group acting on itself: predictions equal the group elements.
    pub fn itself(form: &str, group: Vec<Matrix<E>>) -> Self {
        Expectation { form: form.into(), predicted: group.clone(), group }
    }
}

/// `SL(U)` acting on `C(L, U, γ)` as the identity on `⟨c⟩ ⊕ L` and `⊕ ∧^k g` on `B(U)`.
pub fn expect_c_action<F: Field>(f: &F, s: usize, n: usize) -> Expectation<F::Elem> {
    let group = special_linear(f, n);
    let predicted = group.iter().map(|g| c_action(f, s, g)).collect();
    Expectation { form: "c_action".into(), group, predicted }
}

/// The stabilizer of `S` in `SL(U)` acting on `D`: `g` extended to `A(V, S)` by
/// `id_L ⊕ g`, and on `C` through the adjoint-inverse under `Φ`.
pub fn expect_d_action<F: Field>(f: &F, s: usize, p: &DParams<F::Elem>) -> Expectation<F::Elem> {
    let vdim = s + p.n;
    let vars: Vec<String> = (1..=vdim).map(|i| format!("x{i}")).collect();
    let a = build_a(f, vdim, &p.s, p.r, Flavor::Tensor, &vars).expect("parameters already validated by the construction");
    let top = GradedBasis::new(Flavor::Tensor, vdim, p.r);
    let phi_inv = p.phi.inverse(f).expect("Φ is nondegenerate");
    let mut group = Vec::new();
    let mut predicted = Vec::new();
    for g in special_linear(f, p.n) {
        let gv = Matrix::block_diag(f, &[Matrix::identity(f, s), g.clone()]);
        if !normalizes_subspace(f, &gv, &p.s, &top) {
            continue;
        }
        let gv_inv_t = gv.inverse(f).expect("invertible").transpose();
        let hv = phi_inv.mul(f, &gv_inv_t).mul(f, &p.phi);
        let hu = hv.submatrix(s..vdim, s..vdim);
        predicted.push(Matrix::block_diag(f, &[Matrix::identity(f, 1), a.extend(&gv), c_action(f, s, &hu)]));
        group.push(g);
    }
    Expectation { form: "d_action".into(), group, predicted }
}

/// Automorphisms `g` of the inner algebra acting on the wrapper as
/// `id ⊕ (Δ g⁻¹ Δ⁻¹)ᵀ ⊕ g`.
pub fn expect_wrapped<F: Field>(f: &F, inner: &Expectation<F::Elem>, delta: &Matrix<F::Elem>) -> Expectation<F::Elem> {
    let delta_inv = delta.inverse(f).expect("Δ is nondegenerate");
    let predicted = inner
        .predicted
        .iter()
        .map(|g| {
            let h = delta.mul(f, &g.inverse(f).expect("automorphisms are invertible")).mul(f, &delta_inv).transpose();
            Matrix::block_diag(f, &[Matrix::identity(f, 1), h, g.clone()])
        })
        .collect();
    Expectation { form: format!("wrap({})", inner.form), group: inner.group.clone(), predicted }
}

/// `σ ∈ G` acting on `E(G, λ, μ)` as `id ⊕ (σ extended to A(V, ⟨f⟩)) ⊕ σ`.
pub fn expect_permutation_action<F: Field>(f: &F, g: &PermGroup, lambda: &[F::Elem]) -> Expectation<F::Elem> {
    let n = g.degree();
    let r = g.order();
    let fv = invariant_f(g, lambda, f).expect("λ already validated by the construction");
    let top = GradedBasis::new(Flavor::Symmetric, n, r).len();
    let s = Subspace::span(f, top, [fv]);
    let vars: Vec<String> = (1..=n).map(|i| format!("x{i}")).collect();
    let a = build_a(f, n, &s, r, Flavor::Symmetric, &vars).expect("degree at least 2");
    let group: Vec<Matrix<F::Elem>> = g.elements().iter().map(|p| p.matrix(f)).collect();
    let predicted = group
        .iter()
        .map(|m| Matrix::block_diag(f, &[Matrix::identity(f, 1), a.extend(m), m.clone()]))
        .collect();
    Expectation { form: "permutation".into(), group, predicted }
}

fn meta_usize(meta: &Meta, key: &str) -> Option<usize> {
    meta.params.get(key)?.as_u64().map(|x| x as usize)
}

fn meta_elems<F: Field>(f: &F, v: &Value) -> Option<Vec<F::Elem>> {
    v.as_array()?.iter().map(|x| f.parse_elem(x.as_str()?).ok()).collect()
}

fn meta_matrix<F: Field>(f: &F, v: &Value) -> Option<Matrix<F::Elem>> {
    let rows: Vec<Vec<F::Elem>> = v.as_array()?.iter().map(|r| meta_elems(f, r)).collect::<Option<_>>()?;
    Some(Matrix::from_rows(rows))
}

/// The predicted automorphism group recorded by a construction's metadata,
/// for the constructions whose group is known in closed form.
pub fn expectation_from_meta<F: Field>(f: &F, meta: &Meta) -> Option<Expectation<F::Elem>> {
    if !f.is_finite() {
        return None;
    }
    match meta.construction.as_str() {
        "rigid" => {
            let s = meta_usize(meta, "s")?;
            Some(Expectation::itself("identity", vec![Matrix::identity(f, s)]))
        }
        "C" => {
            if meta.params.get("L")?.as_str()? != "rigid" {
                return None;
            }
            Some(expect_c_action(f, meta_usize(meta, "s")?, meta_usize(meta, "n")?))
        }
        "D" => {
            let (s, n, r) = (meta_usize(meta, "s")?, meta_usize(meta, "n")?, meta_usize(meta, "r")?);
            let rows: Vec<Vec<F::Elem>> =
                meta.params.get("S")?.as_array()?.iter().map(|r| meta_elems(f, r)).collect::<Option<_>>()?;
            let p = DParams {
                n,
                r,
                s: Subspace::span(f, (s + n).pow(r as u32), rows),
                gamma: meta_elems(f, meta.params.get("gamma")?)?,
                delta: meta_elems(f, meta.params.get("delta")?)?,
                phi: meta_matrix(f, meta.params.get("phi")?)?,
            };
            Some(expect_d_action(f, s, &p))
        }
        "E" => {
            let g = PermGroup::parse(meta.params.get("group")?.as_str()?).ok()?;
            let lambda = meta_elems(f, meta.params.get("lambda")?)?;
            Some(expect_permutation_action(f, &g, &lambda))
        }
        "wrap" => {
            let inner: Meta = serde_json::from_value(meta.params.get("inner")?.clone()).ok()?;
            let inner_exp = expectation_from_meta(f, &inner)?;
            let delta = meta_matrix(f, meta.params.get("Delta")?)?;
            Some(expect_wrapped(f, &inner_exp, &delta))
        }
        _ => None,
    }
}

/// Set equality between the automorphisms and the predictions, then the
/// homomorphism property on every pair of group elements.
pub fn match_expected<F: Field>(f: &F, auts: &AutomorphismSet<F::Elem>, exp: &Expectation<F::Elem>) -> Result<Matching> {
    let fail = |reason: String, m: Option<&Matrix<F::Elem>>| AutGroupError::Mismatch {
        form: exp.form.clone(),
        reason,
        matrix: m.map(|m| format_matrix(f, m)),
    };
    if exp.group.len() != exp.predicted.len() {
        return Err(fail("expectation has unequal group and prediction lists".into(), None));
    }
    let mut bijection = Vec::with_capacity(exp.predicted.len());
    for p in &exp.predicted {
        match auts.elements.binary_search_by(|m| m.data().cmp(p.data())) {
            Ok(i) => bijection.push(i),
            Err(_) => return Err(fail("predicted matrix is not among the automorphisms".into(), Some(p))),
        }
    }
    let mut seen = bijection.clone();
    seen.sort_unstable();
    seen.dedup();
    if seen.len() != bijection.len() {
        return Err(fail("two group elements predict the same automorphism".into(), None));
    }
    if let Some(extra) = auts.elements.iter().enumerate().find(|(i, _)| seen.binary_search(i).is_err()) {
        return Err(fail("automorphism not predicted by the group".into(), Some(extra.1)));
    }
    let position = |m: &Matrix<F::Elem>| exp.group.iter().position(|g| g == m);
    for (i, gi) in exp.group.iter().enumerate() {
        for (j, gj) in exp.group.iter().enumerate() {
            let Some(k) = position(&gi.mul(f, gj)) else {
                return Err(fail("reference group is not closed under products".into(), Some(gi)));
            };
            if exp.predicted[i].mul(f, &exp.predicted[j]) != exp.predicted[k] {
                return Err(fail(format!("products of elements {i} and {j} are not preserved"), Some(&exp.predicted[i])));
            }
        }
    }
    Ok(Matching { form: exp.form.clone(), bijection })
}

fn format_matrix<F: Field>(f: &F, m: &Matrix<F::Elem>) -> String {
    let rows: Vec<String> = (0..m.rows())
        .map(|i| m.row(i).iter().map(|x| f.format_elem(x)).collect::<Vec<_>>().join(" "))
        .collect();
    format!("[{}]", rows.join("; "))
}
