//! Builders for the block-structured algebras: the rigid algebra, `B(U)`,
//! `C`, `D`, the simple wrapper `R(α, ζ, Δ)` and the permutation-group
//! algebra `E`, together with the parameter choices they need.

mod params;
mod realize;

pub use params::ConstructionParams;
pub use realize::{
    automorphism_checks, lambda_for, realize_finite_group, simplicity_check, wrap_with_params, Check, CheckStatus, ConstructionReport, RealizeOptions,
};

use std::ops::Range;

use thiserror::Error;

use crate::algebra::{Algebra, AlgebraBuilder, AlgebraError, Block, Meta, Role};
use crate::field::{distinct_units, Field, FieldError};
use crate::graded::{build_a, Flavor, GradedBasis, GradedError};
use crate::linalg::{Matrix, Subspace};
use crate::perm::{line_normalizer, symmetric_group, PermError, PermGroup};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ConstructionError {
    #[error("field too small for {constraint}: needs {requested} distinct elements outside {{0,1}}, only {available} available")]
    FieldTooSmall { constraint: String, requested: usize, available: u64 },
    #[error("bad eigenvalues {which}: {reason}")]
    BadEigenvalues { which: String, reason: String },
    #[error("bad scalars: {0}")]
    BadScalars(String),
    #[error("bad λ: {0}")]
    BadLambda(String),
    #[error("λ has a zero entry")]
    ZeroLambda,
    #[error("pairing is degenerate")]
    DegeneratePairing,
    #[error("pairing is nonzero at ({row},{col}), pairing L with U")]
    PairingViolatesOrthogonality { row: usize, col: usize },
    #[error("the trivial group is realized by the rigid algebra, not by E")]
    TrivialGroup,
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error(transparent)]
    Algebra(#[from] AlgebraError),
    #[error(transparent)]
    Graded(#[from] GradedError),
    #[error(transparent)]
    Perm(#[from] PermError),
    #[error(transparent)]
    Field(#[from] FieldError),
}

type Result<T> = std::result::Result<T, ConstructionError>;

/// `count` canonical units outside `{0, 1}`, naming the constraint on failure.
pub fn units<F: Field>(f: &F, count: usize, constraint: &str) -> Result<Vec<F::Elem>> {
    distinct_units(f, count, &[]).map_err(|e| match e {
        FieldError::FieldTooSmall { requested, available } => {
            ConstructionError::FieldTooSmall { constraint: constraint.to_string(), requested, available }
        }
        other => other.into(),
    })
}

fn require_units<F: Field>(f: &F, count: usize, constraint: &str) -> Result<()> {
    if let Some(q) = f.order() {
        let available = q.saturating_sub(2);
        if (count as u64) > available {
            return Err(ConstructionError::FieldTooSmall { constraint: constraint.to_string(), requested: count, available });
        }
    }
    Ok(())
}

/// Length, `∉ {0,1}` and pairwise distinctness.
fn check_eigenvalues<F: Field>(f: &F, which: &str, vals: &[F::Elem], len: usize) -> Result<()> {
    let bad = |reason: String| Err(ConstructionError::BadEigenvalues { which: which.to_string(), reason });
    if vals.len() != len {
        return bad(format!("expected {len} values, got {}", vals.len()));
    }
    for (i, v) in vals.iter().enumerate() {
        if f.is_zero(v) || f.is_one(v) {
            return bad(format!("entry {} is {}", i + 1, f.format_elem(v)));
        }
        if let Some(j) = vals[..i].iter().position(|w| w == v) {
            return bad(format!("entries {} and {} coincide", j + 1, i + 1));
        }
    }
    Ok(())
}

fn format_seq<F: Field>(f: &F, v: &[F::Elem]) -> serde_json::Value {
    serde_json::Value::Array(v.iter().map(|x| serde_json::Value::String(f.format_elem(x))).collect())
}

fn format_matrix<F: Field>(f: &F, m: &Matrix<F::Elem>) -> serde_json::Value {
    serde_json::Value::Array((0..m.rows()).map(|i| format_seq(f, m.row(i))).collect())
}

/// Accumulates basis names, structure constants and blocks while embedding sub-algebras.
struct Layout<F: Field> {
    f: F,
    names: Vec<String>,
    entries: Vec<(usize, usize, usize, F::Elem)>,
    blocks: Vec<Block<F::Elem>>,
}

impl<F: Field> Layout<F> {
    fn new(f: &F) -> Self {
        Layout { f: f.clone(), names: Vec::new(), entries: Vec::new(), blocks: Vec::new() }
    }

    fn push(&mut self, name: impl Into<String>) -> usize {
        self.names.push(name.into());
        self.names.len() - 1
    }

    fn embed(&mut self, a: &Algebra<F>, prefix: &str) -> Range<usize> {
        let shift = self.names.len();
        self.names.extend(a.basis_names().iter().map(|n| format!("{prefix}{n}")));
        self.entries.extend(a.entries().iter().map(|(i, j, k, c)| (i + shift, j + shift, k + shift, c.clone())));
        shift..shift + a.dim()
    }

    /// Re-declares `a`'s blocks as children of `parent`.
    fn nest_blocks(&mut self, a: &Algebra<F>, parent: &str, shift: usize) {
        for b in a.blocks() {
            let mut nb = b.renamed(format!("{parent}/{}", b.name), shift);
            nb.linked_to = b.linked_to.iter().map(|n| format!("{parent}/{n}")).collect();
            self.blocks.push(nb);
        }
    }

    fn set(&mut self, i: usize, j: usize, k: usize, c: F::Elem) {
        if !self.f.is_zero(&c) {
            self.entries.push((i, j, k, c));
        }
    }

    /// `u` is a left identity; every other basis vector `x` in `range` has `x·u = λx`.
    fn unit_action(&mut self, u: usize, range: Range<usize>, lambda: &F::Elem) {
        for x in range {
            self.set(x, u, x, lambda.clone());
        }
    }

    fn build(self, meta: Meta) -> Result<Algebra<F>> {
        let mut b = AlgebraBuilder::new(self.f, self.names);
        for (i, j, k, c) in self.entries {
            b.add(i, j, k, c);
        }
        for blk in self.blocks {
            b.block(blk);
        }
        b.meta(meta);
        Ok(b.build()?)
    }
}

/// The rigid algebra on `e, e1, …, e_{s-1}`: `e` is a left identity,
/// `e_i·e = β_i e_i` with distinct `β_i ∉ {0,1}`, `e_i² = e_i`, other products zero.
pub fn rigid_algebra<F: Field>(s: usize, f: &F) -> Result<Algebra<F>> {
    if s == 0 {
        return Err(ConstructionError::InvalidParameter("the rigid algebra needs s ≥ 1".into()));
    }
    let betas = units(f, s - 1, "the rigid algebra (s-1 eigenvalues)")?;
    let mut l = Layout::new(f);
    let e = l.push("e");
    l.set(e, e, e, f.one());
    l.blocks.push(Block::new("e", 0..1, Role::UnitLine).with_eigenvalue(f.one()));
    for (i, beta) in betas.iter().enumerate() {
        let x = l.push(format!("e{}", i + 1));
        l.set(e, x, x, f.one());
        l.set(x, e, x, beta.clone());
        l.set(x, x, x, f.one());
        l.blocks.push(Block::new(format!("e{}", i + 1), x..x + 1, Role::Generator).with_eigenvalue(beta.clone()));
    }
    l.build(Meta::new("rigid").param("s", s).param("beta", format_seq(f, &betas)))
}

/// `k`-subsets of `0..n` in lexicographic order.
fn subsets(n: usize, k: usize) -> Vec<Vec<usize>> {
    fn go(start: usize, n: usize, k: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == k {
            out.push(cur.clone());
            return;
        }
        for i in start..n {
            cur.push(i);
            go(i + 1, n, k, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    go(0, n, k, &mut Vec::new(), &mut out);
    out
}

/// Wedge monomials of degrees `1..=n`, degree by degree, lexicographic within a degree.
pub fn wedge_monomials(n: usize) -> Vec<Vec<usize>> {
    (1..=n).flat_map(|k| subsets(n, k)).collect()
}

/// Sign of the shuffle sorting `a ++ b`, or `None` when they share an index.
fn shuffle_sign(a: &[usize], b: &[usize]) -> Option<bool> {
    let mut inversions = 0;
    for x in a {
        for y in b {
            if x == y {
                return None;
            }
            if x > y {
                inversions += 1;
            }
        }
    }
    Some(inversions % 2 == 1)
}

pub const WEDGE_SIGN_CONVENTION: &str =
    "u_I·u_J = (-1)^{#{(i,j) in I×J : i > j}} u_{I∪J} for disjoint I, J; b0·b0 = b0 for the top monomial b0";

/// `B(U)` with `dim U = n`: wedge products, except that the top monomial squares to itself.
pub fn exterior_b<F: Field>(n: usize, f: &F) -> Result<Algebra<F>> {
    if n == 0 {
        return Err(ConstructionError::InvalidParameter("B(U) needs n ≥ 1".into()));
    }
    let monos = wedge_monomials(n);
    let index = |m: &[usize]| monos.iter().position(|x| x == m).expect("monomial");
    let mut l = Layout::new(f);
    for m in &monos {
        let name = m.iter().map(|i| format!("u{}", i + 1)).collect::<Vec<_>>().join("∧");
        l.push(name);
    }
    let top = monos.len() - 1;
    for (i, a) in monos.iter().enumerate() {
        for (j, b) in monos.iter().enumerate() {
            if i == top && j == top {
                l.set(i, j, top, f.one());
                continue;
            }
            if a.len() + b.len() > n {
                continue;
            }
            let Some(neg) = shuffle_sign(a, b) else { continue };
            let mut m: Vec<usize> = a.iter().chain(b).copied().collect();
            m.sort_unstable();
            l.set(i, j, index(&m), if neg { f.neg(&f.one()) } else { f.one() });
        }
    }
    let mut at = 0;
    for k in 1..=n {
        let len = subsets(n, k).len();
        let role = if k == 1 { Role::Generator } else { Role::Generated };
        l.blocks.push(Block::new(format!("U{k}"), at..at + len, role));
        at += len;
    }
    l.build(Meta::new("B").param("n", n).param("sign_convention", WEDGE_SIGN_CONVENTION))
}

/// `∧^k g` on the lexicographic basis of `k`-subsets: entry `(J, I)` is the minor `det g[J, I]`.
pub fn wedge_power<F: Field>(f: &F, g: &Matrix<F::Elem>, k: usize) -> Matrix<F::Elem> {
    let sets = subsets(g.rows(), k);
    let mut out = Matrix::zeros(f, sets.len(), sets.len());
    for (c, cols) in sets.iter().enumerate() {
        for (r, rows) in sets.iter().enumerate() {
            let minor = Matrix::from_rows(rows.iter().map(|&i| cols.iter().map(|&j| g.get(i, j).clone()).collect()).collect());
            out.set(r, c, minor.det(f));
        }
    }
    out
}

/// The extension of `g ∈ GL(U)` to `vect B(U)`: `⊕_k ∧^k g`.
pub fn extend_b<F: Field>(f: &F, g: &Matrix<F::Elem>) -> Matrix<F::Elem> {
    let blocks: Vec<_> = (1..=g.rows()).map(|k| wedge_power(f, g, k)).collect();
    Matrix::block_diag(f, &blocks)
}

/// `C(L, U, γ) = ⟨c⟩ ⊕ L ⊕ B(U)`: `c` a left identity, `R_c` acting by `γ_1` on `L`
/// and by `γ_{k+1}` on `∧^k U`.
pub fn algebra_c<F: Field>(l_alg: &Algebra<F>, n: usize, gamma: &[F::Elem]) -> Result<Algebra<F>> {
    let f = l_alg.field();
    let s = l_alg.dim();
    if n == 0 || s == 0 {
        return Err(ConstructionError::InvalidParameter("C needs nonzero L and U".into()));
    }
    require_units(f, n + 1, "γ (|F| ≥ n+3)")?;
    require_units(f, s.saturating_sub(1), "the rigid algebra L (|F| ≥ s+1)")?;
    check_eigenvalues(f, "γ", gamma, n + 1)?;
    let b = exterior_b(n, f)?;
    let mut l = Layout::new(f);
    let c = l.push("c");
    let lr = l.embed(l_alg, "");
    let br = l.embed(&b, "");
    for x in 0..l.names.len() {
        l.set(c, x, x, f.one());
    }
    l.unit_action(c, lr.clone(), &gamma[0]);
    l.blocks.push(Block::new("c", 0..1, Role::UnitLine).with_eigenvalue(f.one()));
    l.blocks.push(Block::new("L", lr.clone(), Role::Plain).with_eigenvalue(gamma[0].clone()));
    l.nest_blocks(l_alg, "L", lr.start);
    let mut at = br.start;
    for k in 1..=n {
        let len = subsets(n, k).len();
        l.unit_action(c, at..at + len, &gamma[k]);
        let role = if k == 1 { Role::Generator } else { Role::Generated };
        l.blocks.push(Block::new(format!("U{k}"), at..at + len, role).with_eigenvalue(gamma[k].clone()));
        at += len;
    }
    let meta = Meta::new("C")
        .param("s", s)
        .param("n", n)
        .param("gamma", format_seq(f, gamma))
        .param("L", l_alg.meta().construction.clone())
        .param("sign_convention", WEDGE_SIGN_CONVENTION);
    l.build(meta)
}

/// The action of `g ∈ GL(U)` on `vect C(L, U, γ)`: trivial on `⟨c⟩ ⊕ L`, `∧^k g` on `∧^k U`.
pub fn c_action<F: Field>(f: &F, s: usize, g: &Matrix<F::Elem>) -> Matrix<F::Elem> {
    Matrix::block_diag(f, &[Matrix::identity(f, 1 + s), extend_b(f, g)])
}

/// The line spanned by one monomial of the degree-`r` piece.
pub fn monomial_line<F: Field>(f: &F, flavor: Flavor, n: usize, r: usize, monomial: &[usize]) -> Result<Subspace<F::Elem>> {
    let basis = GradedBasis::new(flavor, n, r);
    let idx = basis
        .index_of(monomial)
        .ok_or_else(|| ConstructionError::InvalidParameter(format!("{monomial:?} is not a degree-{r} monomial")))?;
    let mut v = vec![f.zero(); basis.len()];
    v[idx] = f.one();
    Ok(Subspace::span(f, basis.len(), [v]))
}

/// Number of graded pieces of `A(V, S)` that survive: `r`, or `r-1` when `S` is the whole top piece.
fn a_piece_count(top_dim: usize, s: &Subspace<impl Clone + PartialEq>, r: usize) -> usize {
    if s.dim() == top_dim {
        r - 1
    } else {
        r
    }
}

fn v_names(n: usize) -> Vec<String> {
    (1..=n).map(|i| format!("x{i}")).collect()
}

/// The data of `D(L, U, S, γ, δ, Φ)` beyond `L`.
#[derive(Debug, Clone)]
pub struct DParams<E> {
    pub n: usize,
    pub r: usize,
    /// Subspace of the degree-`r` tensor piece of `V = L ⊕ U`.
    pub s: Subspace<E>,
    pub gamma: Vec<E>,
    pub delta: Vec<E>,
    /// Rows index `V_A = L_A ⊕ U_A`, columns `V_C = L_C ⊕ U_C`.
    pub phi: Matrix<E>,
}

impl<E: Clone + PartialEq> DParams<E> {
    /// Canonical γ, δ and the identity pairing.
    pub fn canonical<F: Field<Elem = E>>(f: &F, l_dim: usize, n: usize, r: usize, s: Subspace<E>) -> Result<Self> {
        let top = (l_dim + n).pow(r as u32);
        let m = a_piece_count(top, &s, r) + 1;
        Ok(DParams {
            n,
            r,
            gamma: units(f, n + 1, "γ (|F| ≥ n+3)")?,
            delta: units(f, m, "δ (|F| ≥ r+3)")?,
            phi: Matrix::identity(f, l_dim + n),
            s,
        })
    }
}

/// `D = ⟨d⟩ ⊕ A(V, S) ⊕ C(L, U, γ)` with `V_A × V_C → Φ(x, y)·d` in both orders.
pub fn algebra_d<F: Field>(l_alg: &Algebra<F>, p: &DParams<F::Elem>) -> Result<Algebra<F>> {
    let f = l_alg.field();
    let s = l_alg.dim();
    let (n, r) = (p.n, p.r);
    if r < 2 {
        return Err(ConstructionError::InvalidParameter("D needs r > 1".into()));
    }
    require_units(f, r + 1, "δ (|F| ≥ r+3)")?;
    let vdim = s + n;
    if p.phi.rows() != vdim || p.phi.cols() != vdim {
        return Err(ConstructionError::InvalidParameter(format!("Φ must be {vdim}×{vdim}")));
    }
    for i in 0..vdim {
        for j in 0..vdim {
            if (i < s) != (j < s) && !f.is_zero(p.phi.get(i, j)) {
                return Err(ConstructionError::PairingViolatesOrthogonality { row: i, col: j });
            }
        }
    }
    if f.is_zero(&p.phi.det(f)) {
        return Err(ConstructionError::DegeneratePairing);
    }
    let a = build_a(f, vdim, &p.s, r, Flavor::Tensor, &v_names(vdim))?;
    let pieces = a.algebra.blocks().len();
    check_eigenvalues(f, "δ", &p.delta, pieces + 1)?;
    let c = algebra_c(l_alg, n, &p.gamma)?;

    let mut l = Layout::new(f);
    let d = l.push("d");
    let ar = l.embed(&a.algebra, "");
    let cr = l.embed(&c, "");
    for x in 0..l.names.len() {
        l.set(d, x, x, f.one());
    }
    l.unit_action(d, cr.clone(), &p.delta[0]);
    l.blocks.push(Block::new("d", 0..1, Role::UnitLine).with_eigenvalue(f.one()));
    let vc: Vec<usize> = (cr.start + 1..cr.start + 1 + vdim).collect();
    for (k, blk) in a.algebra.blocks().iter().enumerate() {
        let range = blk.range.start + ar.start..blk.range.end + ar.start;
        l.unit_action(d, range.clone(), &p.delta[k + 1]);
        let mut nb = Block::new(blk.name.clone(), range, blk.role).with_eigenvalue(p.delta[k + 1].clone());
        if k == 0 {
            nb = nb.linked(vec!["C/L".into(), "C/U1".into()], p.phi.clone());
        }
        l.blocks.push(nb);
    }
    for i in 0..vdim {
        for (j, &y) in vc.iter().enumerate() {
            let x = ar.start + i;
            let c = p.phi.get(i, j).clone();
            l.set(x, y, d, c.clone());
            l.set(y, x, d, c);
        }
    }
    l.blocks.push(Block::new("C", cr.clone(), Role::Plain).with_eigenvalue(p.delta[0].clone()));
    l.nest_blocks(&c, "C", cr.start);
    let s_rows: Vec<serde_json::Value> = p.s.basis().iter().map(|v| format_seq(f, v)).collect();
    let meta = Meta::new("D")
        .param("s", s)
        .param("n", n)
        .param("r", r)
        .param("flavor", "tensor")
        .param("S", s_rows)
        .param("gamma", format_seq(f, &p.gamma))
        .param("delta", format_seq(f, &p.delta))
        .param("phi", format_matrix(f, &p.phi));
    l.build(meta)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum WrapVariant {
    Standard,
    ZetaZero,
}

/// `R(α, ζ, Δ) = ⟨e⟩ ⊕ Z ⊕ R`: `e` a left identity, `R_e` acting by `ζ` on the
/// zero algebra `Z` and by `α` on `R`, `z·a = Δ(z, a)e`, `a·z = 0`.
pub fn wrap_simple<F: Field>(
    inner: &Algebra<F>,
    alpha: &F::Elem,
    zeta: &F::Elem,
    delta: &Matrix<F::Elem>,
    variant: WrapVariant,
) -> Result<Algebra<F>> {
    let f = inner.field();
    let bad = |m: &str| Err(ConstructionError::BadScalars(m.to_string()));
    match variant {
        WrapVariant::Standard => {
            require_units(f, 2, "α, ζ (|F| ≥ 4)")?;
            if f.is_zero(alpha) || f.is_one(alpha) || f.is_zero(zeta) || f.is_one(zeta) {
                return bad("α and ζ must lie outside {0, 1}");
            }
            if alpha == zeta {
                return bad("α and ζ must differ");
            }
        }
        WrapVariant::ZetaZero => {
            require_units(f, 1, "α (|F| ≥ 3)")?;
            if !f.is_zero(zeta) {
                return bad("the ζ = 0 variant needs ζ = 0");
            }
            if f.is_zero(alpha) || f.is_one(alpha) {
                return bad("α must lie outside {0, 1}");
            }
        }
    }
    let n = inner.dim();
    if delta.rows() != n || delta.cols() != n {
        return Err(ConstructionError::InvalidParameter(format!("Δ must be {n}×{n}")));
    }
    if f.is_zero(&delta.det(f)) {
        return Err(ConstructionError::DegeneratePairing);
    }
    let mut l = Layout::new(f);
    let e = l.push("e");
    let zr = {
        let start = l.names.len();
        for i in 1..=n {
            l.push(format!("z{i}"));
        }
        start..start + n
    };
    let rr = l.embed(inner, "R.");
    for x in 0..l.names.len() {
        l.set(e, x, x, f.one());
    }
    l.unit_action(e, zr.clone(), zeta);
    l.unit_action(e, rr.clone(), alpha);
    for (i, z) in zr.clone().enumerate() {
        for (j, a) in rr.clone().enumerate() {
            l.set(z, a, e, delta.get(i, j).clone());
        }
    }
    l.blocks.push(Block::new("e", 0..1, Role::UnitLine).with_eigenvalue(f.one()));
    l.blocks.push(Block::new("Z", zr, Role::PairingLinked).with_eigenvalue(zeta.clone()).linked(vec!["R".into()], delta.clone()));
    l.blocks.push(Block::new("R", rr.clone(), Role::Plain).with_eigenvalue(alpha.clone()));
    l.nest_blocks(inner, "R", rr.start);
    let inner_meta = serde_json::to_value(inner.meta()).expect("meta serializes");
    let meta = Meta::new("wrap")
        .param("alpha", f.format_elem(alpha))
        .param("zeta", f.format_elem(zeta))
        .param("variant", serde_json::to_value(variant).expect("variant serializes"))
        .param("Delta", format_matrix(f, delta))
        .param("inner", inner_meta);
    l.build(meta)
}

/// Whether all `n(n-1)` ordered ratios `λ_i/λ_j` are pairwise distinct.
pub fn ratios_distinct<F: Field>(f: &F, lambda: &[F::Elem]) -> bool {
    let mut seen = Vec::new();
    for (i, a) in lambda.iter().enumerate() {
        for (j, b) in lambda.iter().enumerate() {
            if i == j {
                continue;
            }
            let Ok(r) = f.div(a, b) else { return false };
            if seen.contains(&r) {
                return false;
            }
            seen.push(r);
        }
    }
    true
}

/// Backtracking search, in canonical order, for nonzero `λ` with pairwise distinct ratios.
pub fn choose_lambda<F: Field>(n: usize, f: &F) -> Result<Vec<F::Elem>> {
    // over Q the greedy choice never dead-ends, so a finite window suffices
    let window = f.order().unwrap_or((4 * n.pow(4) + 8) as u64);
    let cands: Vec<F::Elem> = f.elements().take(window as usize).filter(|x| !f.is_zero(x)).collect();
    fn go<F: Field>(f: &F, n: usize, cands: &[F::Elem], cur: &mut Vec<F::Elem>) -> bool {
        if cur.len() == n {
            return true;
        }
        for c in cands {
            cur.push(c.clone());
            if ratios_distinct(f, cur) && go(f, n, cands, cur) {
                return true;
            }
            cur.pop();
        }
        false
    }
    let mut cur = Vec::new();
    if go(f, n, &cands, &mut cur) {
        Ok(cur)
    } else {
        Err(ConstructionError::FieldTooSmall {
            constraint: format!("λ (distinct ratios for n = {n})"),
            requested: n * (n - 1),
            available: f.order().map_or(0, |q| q.saturating_sub(2)),
        })
    }
}

/// A `λ` for `G` when the ratio condition cannot be met: the first pairwise
/// distinct nonzero sequence whose line normalizer in `S_n` is exactly `G`.
pub fn certified_lambda<F: Field>(g: &PermGroup, f: &F) -> Result<Vec<F::Elem>> {
    let n = g.degree();
    let nonzero: Vec<F::Elem> = f.elements().take(f.order().unwrap_or(64) as usize).filter(|x| !f.is_zero(x)).collect();
    let sn = symmetric_group(n);
    let mut idx = vec![0usize; n];
    loop {
        let lam: Vec<F::Elem> = idx.iter().map(|&i| nonzero[i].clone()).collect();
        let distinct = (0..n).all(|i| (0..i).all(|j| lam[i] != lam[j]));
        if distinct {
            let fv = invariant_f(g, &lam, f)?;
            let norm = line_normalizer(f, g.order(), &fv, &sn)?;
            if norm.elements() == g.elements() {
                return Ok(lam);
            }
        }
        // odometer, last position fastest
        let mut pos = n;
        loop {
            if pos == 0 {
                return Err(ConstructionError::BadLambda(format!("no λ over {} isolates the group", f.spec())));
            }
            pos -= 1;
            idx[pos] += 1;
            if idx[pos] < nonzero.len() {
                break;
            }
            idx[pos] = 0;
        }
    }
}

/// `f = Π_{σ∈G} σ·(λ_1 e_1 + ⋯ + λ_n e_n)` in the monomial basis of `Sym^{|G|}`.
pub fn invariant_f<F: Field>(g: &PermGroup, lambda: &[F::Elem], f: &F) -> Result<Vec<F::Elem>> {
    let n = g.degree();
    if lambda.len() != n {
        return Err(ConstructionError::InvalidParameter(format!("λ has {} entries, the group acts on {n} points", lambda.len())));
    }
    if lambda.iter().any(|x| f.is_zero(x)) {
        return Err(ConstructionError::ZeroLambda);
    }
    // multiply out as a map from sorted monomials to coefficients
    let mut poly: std::collections::BTreeMap<Vec<usize>, F::Elem> = [(Vec::new(), f.one())].into_iter().collect();
    for sigma in g.elements() {
        let mut next = std::collections::BTreeMap::new();
        for (m, c) in &poly {
            for (i, l) in lambda.iter().enumerate() {
                let mut m2 = m.clone();
                m2.push(sigma.apply(i));
                m2.sort_unstable();
                let slot = next.entry(m2).or_insert_with(|| f.zero());
                *slot = f.mul_add(slot, c, l);
            }
        }
        poly = next;
    }
    let basis = GradedBasis::new(Flavor::Symmetric, n, g.order());
    let mut v = vec![f.zero(); basis.len()];
    for (m, c) in poly {
        v[basis.index_of(&m).expect("monomial")] = c;
    }
    Ok(v)
}

/// How a `λ` for `E` was justified.
fn lambda_certificate<F: Field>(g: &PermGroup, lambda: &[F::Elem], f: &F) -> Result<&'static str> {
    if lambda.iter().any(|x| f.is_zero(x)) {
        return Err(ConstructionError::ZeroLambda);
    }
    if ratios_distinct(f, lambda) {
        return Ok("distinct ratios");
    }
    let fv = invariant_f(g, lambda, f)?;
    let norm = line_normalizer(f, g.order(), &fv, &symmetric_group(g.degree()))?;
    if norm.elements() == g.elements() {
        Ok("line normalizer in S_n equals G")
    } else {
        Err(ConstructionError::BadLambda(format!(
            "ratios collide and the line normalizer has order {} instead of {}",
            norm.order(),
            g.order()
        )))
    }
}

/// `E(G, λ, μ) = ⟨e⟩ ⊕ A(V, ⟨f⟩) ⊕ E_n`, symmetric flavor, `r = |G|`:
/// `x·y = y·x = (x, y)e` for `x ∈ V_A`, `y ∈ E_n`, with `(e_i, e_j) = δ_ij`.
pub fn algebra_e<F: Field>(g: &PermGroup, lambda: &[F::Elem], mu: &[F::Elem], f: &F) -> Result<Algebra<F>> {
    if g.is_trivial() {
        return Err(ConstructionError::TrivialGroup);
    }
    let n = g.degree();
    let r = g.order();
    require_units(f, r + 1, "μ (|F| ≥ |G|+3)")?;
    check_eigenvalues(f, "μ", mu, r + 1)?;
    let certificate = lambda_certificate(g, lambda, f)?;
    let fv = invariant_f(g, lambda, f)?;
    let top = GradedBasis::new(Flavor::Symmetric, n, r).len();
    let s = Subspace::span(f, top, [fv.clone()]);
    let a = build_a(f, n, &s, r, Flavor::Symmetric, &v_names(n))?;

    let mut l = Layout::new(f);
    let e = l.push("e");
    let ar = l.embed(&a.algebra, "");
    let en = {
        let start = l.names.len();
        for i in 1..=n {
            let x = l.push(format!("e{i}"));
            l.set(x, x, x, f.one());
        }
        start..start + n
    };
    for x in 0..l.names.len() {
        l.set(e, x, x, f.one());
    }
    l.unit_action(e, en.clone(), &mu[0]);
    l.blocks.push(Block::new("e", 0..1, Role::UnitLine).with_eigenvalue(f.one()));
    for (k, blk) in a.algebra.blocks().iter().enumerate() {
        let range = blk.range.start + ar.start..blk.range.end + ar.start;
        l.unit_action(e, range.clone(), &mu[k + 1]);
        l.blocks.push(Block::new(blk.name.clone(), range, blk.role).with_eigenvalue(mu[k + 1].clone()));
    }
    for i in 0..n {
        let (x, y) = (ar.start + i, en.start + i);
        l.set(x, y, e, f.one());
        l.set(y, x, e, f.one());
    }
    l.blocks.push(
        Block::new("En", en, Role::PairingLinked)
            .with_eigenvalue(mu[0].clone())
            .linked(vec!["A1".into()], Matrix::identity(f, n)),
    );
    let meta = Meta::new("E")
        .param("group", g.describe())
        .param("group_order", r)
        .param("n", n)
        .param("lambda", format_seq(f, lambda))
        .param("lambda_certificate", certificate)
        .param("mu", format_seq(f, mu))
        .param("f", format_seq(f, &fv));
    l.build(meta)
}

/// The split étale algebra `E_n`: `n` orthogonal idempotents.
pub fn split_etale<F: Field>(n: usize, f: &F) -> Result<Algebra<F>> {
    let mut l = Layout::new(f);
    for i in 1..=n {
        let x = l.push(format!("e{i}"));
        l.set(x, x, x, f.one());
    }
    l.build(Meta::new("split_etale").param("n", n))
}

/// `⟨e⟩ ⊕ E_n` with `e` a left identity and `R_e = μ` on `E_n`.
pub fn unitized_etale<F: Field>(n: usize, mu: &F::Elem, f: &F) -> Result<Algebra<F>> {
    check_eigenvalues(f, "μ", std::slice::from_ref(mu), 1)?;
    let etale = split_etale(n, f)?;
    let mut l = Layout::new(f);
    let e = l.push("e");
    let r = l.embed(&etale, "");
    for x in 0..l.names.len() {
        l.set(e, x, x, f.one());
    }
    l.unit_action(e, r.clone(), mu);
    l.blocks.push(Block::new("e", 0..1, Role::UnitLine).with_eigenvalue(f.one()));
    l.blocks.push(Block::new("En", r, Role::Generator).with_eigenvalue(mu.clone()));
    l.build(Meta::new("unitized_etale").param("n", n).param("mu", f.format_elem(mu)))
}

/// The `n`-dimensional algebra with zero multiplication.
pub fn zero_algebra<F: Field>(n: usize, f: &F) -> Result<Algebra<F>> {
    let mut l = Layout::new(f);
    for i in 1..=n {
        l.push(format!("z{i}"));
    }
    l.build(Meta::new("zero").param("n", n))
}
