//! Finite-dimensional algebras given by structure constants
//! `b_i · b_j = Σ_k c[i,j,k] b_k`, with no associativity assumed.

mod json;
mod simple;

pub use json::{parse_any, AnyAlgebra, SchemaViolation};
pub use simple::{projective_point, projective_point_count, NotSimpleWitness, SimplicityMode, SimplicityVerdict, EXHAUSTIVE_LIMIT};

use std::collections::BTreeMap;
use std::fmt;
use std::ops::Range;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::field::{Field, FieldError, FiniteField};
use crate::linalg::{self, solve_affine, AffineSolution, Echelon, Matrix, Subspace};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum AlgebraError {
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("zero vector where a nonzero one is required")]
    ZeroVector,
    #[error("operands belong to different fields")]
    FieldMismatch,
    #[error("exhaustive search needs {points} projective points (limit {limit})")]
    TooLargeForExhaustive { points: String, limit: u64 },
    #[error("unsupported: {0}")]
    Unsupported(String),
    #[error("invalid block metadata: {0}")]
    InvalidBlocks(String),
    #[error("block `{block}` is not closed under multiplication: b{i}·b{j} leaves it")]
    NotClosed { block: String, i: usize, j: usize },
    #[error("structure index out of range: ({i},{j},{k}) with dim {dim}")]
    IndexOutOfRange { i: usize, j: usize, k: usize, dim: usize },
    #[error(transparent)]
    Schema(#[from] SchemaViolation),
    #[error(transparent)]
    Field(#[from] FieldError),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Role {
    UnitLine,
    Generator,
    Generated,
    PairingLinked,
    Plain,
}

impl fmt::Display for Role {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            Role::UnitLine => "unit-line",
            Role::Generator => "generator",
            Role::Generated => "generated",
            Role::PairingLinked => "pairing-linked",
            Role::Plain => "plain",
        };
        f.write_str(s)
    }
}

/// A named range of basis vectors.
///
/// Names containing `/` denote nested blocks: `C/L` is a block of the
/// subalgebra `C`, and its eigenvalue refers to `C`'s own left identity.
/// A pairing is stored on the block it determines: rows index this block,
/// columns index the concatenation of the `linked_to` blocks.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Block<E> {
    pub name: String,
    pub range: Range<usize>,
    pub role: Role,
    pub eigenvalue: Option<E>,
    pub linked_to: Vec<String>,
    pub pairing: Option<Matrix<E>>,
}

impl<E> Block<E> {
    pub fn new(name: impl Into<String>, range: Range<usize>, role: Role) -> Self {
        Block { name: name.into(), range, role, eigenvalue: None, linked_to: Vec::new(), pairing: None }
    }

    pub fn with_eigenvalue(mut self, e: E) -> Self {
        self.eigenvalue = Some(e);
        self
    }

    pub fn linked(mut self, to: Vec<String>, pairing: Matrix<E>) -> Self {
        self.linked_to = to;
        self.pairing = Some(pairing);
        self
    }

    pub fn len(&self) -> usize {
        self.range.len()
    }

    pub fn is_empty(&self) -> bool {
        self.range.is_empty()
    }

    pub fn parent(&self) -> Option<&str> {
        self.name.rsplit_once('/').map(|(p, _)| p)
    }

    pub fn is_top_level(&self) -> bool {
        !self.name.contains('/')
    }

    pub fn renamed(&self, name: String, shift: usize) -> Self
    where
        E: Clone,
    {
        Block {
            name,
            range: self.range.start + shift..self.range.end + shift,
            role: self.role,
            eigenvalue: self.eigenvalue.clone(),
            linked_to: self.linked_to.clone(),
            pairing: self.pairing.clone(),
        }
    }
}

/// Claims recorded alongside an algebra and re-checked by verification.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Claims {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub simple: Option<bool>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub aut_order: Option<u64>,
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Meta {
    pub construction: String,
    #[serde(default)]
    pub params: serde_json::Map<String, serde_json::Value>,
    #[serde(default, skip_serializing_if = "is_default_claims")]
    pub claims: Claims,
}

fn is_default_claims(c: &Claims) -> bool {
    *c == Claims::default()
}

impl Meta {
    pub fn new(construction: impl Into<String>) -> Self {
        Meta { construction: construction.into(), ..Default::default() }
    }

    pub fn param(mut self, key: &str, value: impl Into<serde_json::Value>) -> Self {
        self.params.insert(key.to_string(), value.into());
        self
    }
}

#[derive(Clone)]
pub struct Algebra<F: Field> {
    field: F,
    names: Vec<String>,
    entries: Vec<(usize, usize, usize, F::Elem)>,
    /// Sparse product of basis vectors, indexed by `i * dim + j`.
    table: Vec<Vec<(usize, F::Elem)>>,
    blocks: Vec<Block<F::Elem>>,
    meta: Meta,
}

impl<F: Field> fmt::Debug for Algebra<F> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Algebra")
            .field("field", &self.field)
            .field("dim", &self.dim())
            .field("construction", &self.meta.construction)
            .field("entries", &self.entries.len())
            .finish()
    }
}

impl<F: Field> PartialEq for Algebra<F> {
    fn eq(&self, other: &Self) -> bool {
        self.field == other.field
            && self.names == other.names
            && self.entries == other.entries
            && self.blocks == other.blocks
            && self.meta == other.meta
    }
}

pub struct AlgebraBuilder<F: Field> {
    field: F,
    names: Vec<String>,
    entries: BTreeMap<(usize, usize, usize), F::Elem>,
    blocks: Vec<Block<F::Elem>>,
    meta: Meta,
}

impl<F: Field> AlgebraBuilder<F> {
    pub fn new(field: F, names: Vec<String>) -> Self {
        AlgebraBuilder { field, names, entries: BTreeMap::new(), blocks: Vec::new(), meta: Meta::default() }
    }

    pub fn dim(&self) -> usize {
        self.names.len()
    }

    pub fn field(&self) -> &F {
        &self.field
    }

    /// Adds `c·b_k` to the product `b_i · b_j`.
    pub fn add(&mut self, i: usize, j: usize, k: usize, c: F::Elem) -> &mut Self {
        let f = &self.field;
        let slot = self.entries.entry((i, j, k)).or_insert_with(|| f.zero());
        *slot = f.add(slot, &c);
        self
    }

    /// Adds `v` (a full coordinate vector) to `b_i · b_j`.
    pub fn add_vec(&mut self, i: usize, j: usize, v: &[F::Elem]) -> &mut Self {
        for (k, c) in v.iter().enumerate() {
            if !self.field.is_zero(c) {
                self.add(i, j, k, c.clone());
            }
        }
        self
    }

    pub fn block(&mut self, b: Block<F::Elem>) -> &mut Self {
        self.blocks.push(b);
        self
    }

    pub fn meta(&mut self, m: Meta) -> &mut Self {
        self.meta = m;
        self
    }

    pub fn build(self) -> Result<Algebra<F>, AlgebraError> {
        let f = self.field;
        let entries = self.entries.into_iter().filter(|(_, c)| !f.is_zero(c)).map(|((i, j, k), c)| (i, j, k, c)).collect();
        Algebra::from_parts(f, self.names, entries, self.blocks, self.meta)
    }
}

/// Verdict of an automorphism check.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum AutCheck {
    Holds,
    Singular,
    /// First basis pair `(i, j)` in lexicographic order with `g(b_i b_j) ≠ g(b_i) g(b_j)`.
    Violation { i: usize, j: usize },
}

impl AutCheck {
    pub fn holds(&self) -> bool {
        matches!(self, AutCheck::Holds)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum EigenDefect {
    /// Eigenspaces of `R_e` with eigenvalues in the field do not fill the space.
    MissingDimension { covered: usize, dim: usize },
    ZeroEigenvalue { dim: usize },
    /// The eigenvalue-1 eigenspace is larger than the unit line.
    UnitEigenspaceTooLarge { dim: usize },
    /// Two declared blocks carry the same eigenvalue.
    Collision { eigenvalue: String, blocks: (String, String) },
}

impl fmt::Display for EigenDefect {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            EigenDefect::MissingDimension { covered, dim } => {
                write!(f, "eigenspaces of R_e cover only {covered} of {dim} dimensions")
            }
            EigenDefect::ZeroEigenvalue { dim } => write!(f, "eigenvalue 0 occurs with multiplicity {dim}"),
            EigenDefect::UnitEigenspaceTooLarge { dim } => {
                write!(f, "eigenvalue 1 has a {dim}-dimensional eigenspace")
            }
            EigenDefect::Collision { eigenvalue, blocks } => {
                write!(f, "blocks `{}` and `{}` share eigenvalue {eigenvalue}", blocks.0, blocks.1)
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EigenBlock<E> {
    pub eigenvalue: E,
    pub space: Subspace<E>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Side {
    Left,
    Right,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum TraceKind {
    LL,
    RR,
    LR,
    RL,
}

impl TraceKind {
    pub const ALL: [TraceKind; 4] = [TraceKind::LL, TraceKind::RR, TraceKind::LR, TraceKind::RL];
}

impl fmt::Display for TraceKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Debug::fmt(self, f)
    }
}

impl<F: Field> Algebra<F> {
    pub fn from_parts(
        field: F,
        names: Vec<String>,
        mut entries: Vec<(usize, usize, usize, F::Elem)>,
        blocks: Vec<Block<F::Elem>>,
        meta: Meta,
    ) -> Result<Self, AlgebraError> {
        let dim = names.len();
        entries.sort_by(|a, b| (a.0, a.1, a.2).cmp(&(b.0, b.1, b.2)));
        for w in entries.windows(2) {
            if (w[0].0, w[0].1, w[0].2) == (w[1].0, w[1].1, w[1].2) {
                return Err(AlgebraError::InvalidBlocks(format!("duplicate structure key ({},{},{})", w[0].0, w[0].1, w[0].2)));
            }
        }
        let mut table = vec![Vec::new(); dim * dim];
        for (i, j, k, c) in &entries {
            if *i >= dim || *j >= dim || *k >= dim {
                return Err(AlgebraError::IndexOutOfRange { i: *i, j: *j, k: *k, dim });
            }
            if field.is_zero(c) {
                return Err(AlgebraError::InvalidBlocks(format!("zero coefficient at ({i},{j},{k})")));
            }
            table[i * dim + j].push((*k, c.clone()));
        }
        let a = Algebra { field, names, entries, table, blocks, meta };
        a.check_blocks()?;
        Ok(a)
    }

    fn check_blocks(&self) -> Result<(), AlgebraError> {
        let dim = self.dim();
        let err = |m: String| Err(AlgebraError::InvalidBlocks(m));
        if self.blocks.is_empty() {
            return Ok(());
        }
        let mut names = std::collections::HashSet::new();
        for b in &self.blocks {
            if !names.insert(b.name.as_str()) {
                return err(format!("duplicate block name `{}`", b.name));
            }
            if b.range.start > b.range.end || b.range.end > dim {
                return err(format!("block `{}` range {:?} outside [0,{dim})", b.name, b.range));
            }
            if let Some(p) = &b.pairing {
                let cols: usize = b
                    .linked_to
                    .iter()
                    .map(|n| self.block(n).map(|x| x.len()))
                    .sum::<Option<usize>>()
                    .ok_or_else(|| AlgebraError::InvalidBlocks(format!("block `{}` links to an unknown block", b.name)))?;
                if p.rows() != b.len() || p.cols() != cols {
                    return err(format!("pairing of `{}` has shape {}x{}, expected {}x{cols}", b.name, p.rows(), p.cols(), b.len()));
                }
                if p.rows() != p.cols() || p.inverse(&self.field).is_err() {
                    return err(format!("pairing of `{}` is degenerate", b.name));
                }
            } else if !b.linked_to.is_empty() {
                return err(format!("block `{}` has links but no pairing", b.name));
            }
        }
        // top-level blocks partition the space; children partition their parent
        let check_partition = |parts: Vec<&Block<F::Elem>>, whole: Range<usize>, what: &str| {
            let mut parts = parts;
            parts.sort_by_key(|b| b.range.start);
            let mut at = whole.start;
            for b in parts {
                if b.range.start != at {
                    return Err(AlgebraError::InvalidBlocks(format!("{what}: gap or overlap at index {at} (block `{}`)", b.name)));
                }
                at = b.range.end;
            }
            if at != whole.end {
                return Err(AlgebraError::InvalidBlocks(format!("{what}: blocks end at {at}, expected {}", whole.end)));
            }
            Ok(())
        };
        check_partition(self.top_blocks().collect(), 0..dim, "top-level blocks")?;
        for b in &self.blocks {
            let kids = self.children(&b.name);
            if kids.is_empty() {
                continue;
            }
            if b.role != Role::Plain {
                return err(format!("block `{}` has children but role {}", b.name, b.role));
            }
            check_partition(kids, b.range.clone(), &format!("children of `{}`", b.name))?;
        }
        for b in &self.blocks {
            if let Some(p) = b.parent() {
                if self.block(p).is_none() {
                    return err(format!("block `{}` has no parent block `{p}`", b.name));
                }
            }
        }
        Ok(())
    }

    pub fn field(&self) -> &F {
        &self.field
    }

    pub fn dim(&self) -> usize {
        self.names.len()
    }

    pub fn basis_names(&self) -> &[String] {
        &self.names
    }

    pub fn entries(&self) -> &[(usize, usize, usize, F::Elem)] {
        &self.entries
    }

    pub fn blocks(&self) -> &[Block<F::Elem>] {
        &self.blocks
    }

    pub fn meta(&self) -> &Meta {
        &self.meta
    }

    pub fn meta_mut(&mut self) -> &mut Meta {
        &mut self.meta
    }

    pub fn block(&self, name: &str) -> Option<&Block<F::Elem>> {
        self.blocks.iter().find(|b| b.name == name)
    }

    pub fn top_blocks(&self) -> impl Iterator<Item = &Block<F::Elem>> {
        self.blocks.iter().filter(|b| b.is_top_level())
    }

    pub fn children(&self, name: &str) -> Vec<&Block<F::Elem>> {
        self.blocks.iter().filter(|b| b.parent() == Some(name)).collect()
    }

    pub fn unit_block(&self) -> Option<&Block<F::Elem>> {
        self.top_blocks().find(|b| b.role == Role::UnitLine)
    }

    pub fn has_zero_multiplication(&self) -> bool {
        self.entries.is_empty()
    }

    /// Sparse product `b_i · b_j`.
    #[inline]
    pub fn basis_product(&self, i: usize, j: usize) -> &[(usize, F::Elem)] {
        &self.table[i * self.dim() + j]
    }

    pub fn basis_product_vec(&self, i: usize, j: usize) -> Vec<F::Elem> {
        let mut out = vec![self.field.zero(); self.dim()];
        for (k, c) in self.basis_product(i, j) {
            out[*k] = c.clone();
        }
        out
    }

    fn check_len(&self, v: &[F::Elem]) -> Result<(), AlgebraError> {
        if v.len() != self.dim() {
            return Err(AlgebraError::DimensionMismatch { expected: self.dim(), got: v.len() });
        }
        Ok(())
    }

    pub fn multiply(&self, x: &[F::Elem], y: &[F::Elem]) -> Result<Vec<F::Elem>, AlgebraError> {
        self.check_len(x)?;
        self.check_len(y)?;
        Ok(self.mul_unchecked(x, y))
    }

    pub(crate) fn mul_unchecked(&self, x: &[F::Elem], y: &[F::Elem]) -> Vec<F::Elem> {
        let f = &self.field;
        let mut out = vec![f.zero(); self.dim()];
        self.mul_into(x, y, &mut out);
        out
    }

    /// `out += x · y`
    pub fn mul_into(&self, x: &[F::Elem], y: &[F::Elem], out: &mut [F::Elem]) {
        let f = &self.field;
        let ys: Vec<(usize, &F::Elem)> = y.iter().enumerate().filter(|(_, c)| !f.is_zero(c)).collect();
        for (i, xi) in x.iter().enumerate() {
            if f.is_zero(xi) {
                continue;
            }
            for &(j, yj) in &ys {
                let t = self.basis_product(i, j);
                if t.is_empty() {
                    continue;
                }
                let c = f.mul(xi, yj);
                for (k, ck) in t {
                    out[*k] = f.mul_add(&out[*k], &c, ck);
                }
            }
        }
    }

    /// Matrix of `x ↦ v·x` (left) or `x ↦ x·v` (right).
    pub fn mult_operator(&self, v: &[F::Elem], side: Side) -> Result<Matrix<F::Elem>, AlgebraError> {
        self.check_len(v)?;
        let n = self.dim();
        let cols = (0..n)
            .map(|j| {
                let bj = linalg::unit_vector(&self.field, n, j);
                match side {
                    Side::Left => self.mul_unchecked(v, &bj),
                    Side::Right => self.mul_unchecked(&bj, v),
                }
            })
            .collect();
        Ok(Matrix::from_cols(cols))
    }

    /// `L_{b_i}` for every basis vector, then `R_{b_i}`.
    pub fn basis_operators(&self) -> Vec<Matrix<F::Elem>> {
        let n = self.dim();
        let f = &self.field;
        let mut ops = Vec::with_capacity(2 * n);
        for side in [Side::Left, Side::Right] {
            for i in 0..n {
                let mut m = Matrix::zeros(f, n, n);
                for j in 0..n {
                    let (a, b) = if side == Side::Left { (i, j) } else { (j, i) };
                    for (k, c) in self.basis_product(a, b) {
                        m.set(*k, j, c.clone());
                    }
                }
                ops.push(m);
            }
        }
        ops
    }

    /// The affine space of left identities: solutions of `e·b_j = b_j` for all `j`.
    pub fn left_identities(&self) -> AffineSolution<F::Elem> {
        let n = self.dim();
        let f = &self.field;
        let mut m = Matrix::zeros(f, n * n, n);
        let mut rhs = vec![f.zero(); n * n];
        for j in 0..n {
            rhs[j * n + j] = f.one();
            for i in 0..n {
                for (k, c) in self.basis_product(i, j) {
                    m.set(j * n + k, i, c.clone());
                }
            }
        }
        solve_affine(f, &m, &rhs)
    }

    /// Eigenspace decomposition of `R_e` for a left identity `e`.
    ///
    /// Returns the unit line first, then the remaining eigenspaces in
    /// canonical eigenvalue order.
    pub fn eigenblock_decomposition(&self, e: &[F::Elem], allow_zero: bool) -> Result<Vec<EigenBlock<F::Elem>>, EigenDefect> {
        let f = &self.field;
        let re = self.mult_operator(e, Side::Right).expect("length checked by caller");
        let n = self.dim();
        let mut blocks = Vec::new();
        let mut covered = 0;
        let mut unit = None;
        for lam in re.eigenvalues(f) {
            let space = re.eigenspace(f, &lam);
            covered += space.dim();
            if f.is_one(&lam) {
                if space.dim() > 1 {
                    return Err(EigenDefect::UnitEigenspaceTooLarge { dim: space.dim() });
                }
                unit = Some(EigenBlock { eigenvalue: lam, space });
            } else if f.is_zero(&lam) && !allow_zero {
                return Err(EigenDefect::ZeroEigenvalue { dim: space.dim() });
            } else {
                blocks.push(EigenBlock { eigenvalue: lam, space });
            }
        }
        if covered != n {
            return Err(EigenDefect::MissingDimension { covered, dim: n });
        }
        let mut out: Vec<_> = unit.into_iter().collect();
        out.extend(blocks);
        Ok(out)
    }

    /// Whether `g` is an invertible algebra endomorphism.
    pub fn is_automorphism(&self, g: &Matrix<F::Elem>) -> AutCheck {
        let n = self.dim();
        assert!(g.rows() == n && g.cols() == n, "automorphism candidate shape");
        let f = &self.field;
        if f.is_zero(&g.det(f)) {
            return AutCheck::Singular;
        }
        let cols: Vec<Vec<F::Elem>> = (0..n).map(|j| g.col(j)).collect();
        match self.first_violation(&cols) {
            None => AutCheck::Holds,
            Some((i, j)) => AutCheck::Violation { i, j },
        }
    }

    /// First pair with `g(b_i b_j) ≠ g(b_i)·g(b_j)`, where `images[i] = g(b_i)`.
    pub fn first_violation(&self, images: &[Vec<F::Elem>]) -> Option<(usize, usize)> {
        let n = self.dim();
        let f = &self.field;
        let mut lhs = vec![f.zero(); n];
        let mut rhs = vec![f.zero(); n];
        for i in 0..n {
            for j in 0..n {
                for x in lhs.iter_mut() {
                    *x = f.zero();
                }
                for x in rhs.iter_mut() {
                    *x = f.zero();
                }
                for (k, c) in self.basis_product(i, j) {
                    linalg::axpy(f, &mut lhs, c, &images[*k]);
                }
                self.mul_into(&images[i], &images[j], &mut rhs);
                if lhs != rhs {
                    return Some((i, j));
                }
            }
        }
        None
    }

    /// Multiplication tensor in `V*⊗V*⊗V`, as sorted `(i, j, k, c)` entries.
    pub fn export_tensor(&self) -> Vec<(usize, usize, usize, F::Elem)> {
        self.entries.clone()
    }

    /// Whether `g` fixes the multiplication tensor under the natural action
    /// `(g·T)(x, y) = g T(g⁻¹x, g⁻¹y)`.
    pub fn tensor_stabilizes(&self, g: &Matrix<F::Elem>) -> bool {
        let f = &self.field;
        let Ok(h) = g.inverse(f) else { return false };
        let n = self.dim();
        let hcols: Vec<Vec<F::Elem>> = (0..n).map(|j| h.col(j)).collect();
        for i in 0..n {
            for j in 0..n {
                let t = self.mul_unchecked(&hcols[i], &hcols[j]);
                if g.mul_vec(f, &t) != self.basis_product_vec(i, j) {
                    return false;
                }
            }
        }
        true
    }

    /// The two-sided ideal generated by `v`.
    pub fn ideal_generated_by(&self, v: &[F::Elem]) -> Result<Subspace<F::Elem>, AlgebraError> {
        self.check_len(v)?;
        if linalg::is_zero_vec(&self.field, v) {
            return Err(AlgebraError::ZeroVector);
        }
        Ok(self.spin_ideal(&[v.to_vec()]))
    }

    /// Closure of `seeds` under all `L_{b_i}` and `R_{b_i}`, applied sparsely.
    pub(crate) fn spin_ideal(&self, seeds: &[Vec<F::Elem>]) -> Subspace<F::Elem> {
        let f = &self.field;
        let n = self.dim();
        let mut ech = Echelon::new(n);
        let mut queue = Vec::new();
        for s in seeds {
            if let Some(r) = ech.insert(f, s.clone()) {
                queue.push(r);
            }
        }
        'outer: while let Some(v) = queue.pop() {
            for i in 0..n {
                let bi = linalg::unit_vector(f, n, i);
                for w in [self.mul_unchecked(&bi, &v), self.mul_unchecked(&v, &bi)] {
                    if let Some(r) = ech.insert(f, w) {
                        queue.push(r);
                        if ech.is_full() {
                            break 'outer;
                        }
                    }
                }
            }
        }
        ech.into_subspace()
    }

    /// Gram matrix of a trace form and whether it is nondegenerate.
    pub fn trace_form(&self, kind: TraceKind) -> (Matrix<F::Elem>, bool) {
        let f = &self.field;
        let n = self.dim();
        let ops = self.basis_operators();
        let (xs, ys) = match kind {
            TraceKind::LL => (&ops[..n], &ops[..n]),
            TraceKind::RR => (&ops[n..], &ops[n..]),
            TraceKind::LR => (&ops[..n], &ops[n..]),
            TraceKind::RL => (&ops[n..], &ops[..n]),
        };
        let mut gram = Matrix::zeros(f, n, n);
        for i in 0..n {
            for j in 0..n {
                // tr(XY) = Σ_{k,l} X[k][l] Y[l][k]
                let mut acc = f.zero();
                for k in 0..n {
                    for l in 0..n {
                        let x = xs[i].get(k, l);
                        if !f.is_zero(x) {
                            acc = f.mul_add(&acc, x, ys[j].get(l, k));
                        }
                    }
                }
                gram.set(i, j, acc);
            }
        }
        let nondegenerate = !f.is_zero(&gram.det(f));
        (gram, nondegenerate)
    }

    /// Direct sum with zero cross products; blocks are prefixed `left.` / `right.`.
    pub fn direct_sum(&self, other: &Self) -> Result<Self, AlgebraError> {
        if self.field != other.field {
            return Err(AlgebraError::FieldMismatch);
        }
        let shift = self.dim();
        let mut names: Vec<String> = self.names.iter().map(|s| format!("left.{s}")).collect();
        names.extend(other.names.iter().map(|s| format!("right.{s}")));
        let mut entries = self.entries.clone();
        entries.extend(other.entries.iter().map(|(i, j, k, c)| (i + shift, j + shift, k + shift, c.clone())));
        let mut blocks = Vec::new();
        if !self.blocks.is_empty() && !other.blocks.is_empty() {
            let prefix = |b: &Block<F::Elem>, side: &str, s: usize| {
                let mut nb = b.renamed(format!("{side}.{}", b.name), s);
                nb.linked_to = b.linked_to.iter().map(|n| format!("{side}.{n}")).collect();
                nb
            };
            blocks.extend(self.blocks.iter().map(|b| prefix(b, "left", 0)));
            blocks.extend(other.blocks.iter().map(|b| prefix(b, "right", shift)));
        }
        let meta = Meta::new("direct_sum");
        Algebra::from_parts(self.field.clone(), names, entries, blocks, meta)
    }

    /// The subalgebra spanned by a range of basis vectors, if closed.
    pub fn restrict(&self, range: Range<usize>) -> Result<Self, AlgebraError> {
        let mut entries = Vec::new();
        for (i, j, k, c) in &self.entries {
            if range.contains(i) && range.contains(j) {
                if !range.contains(k) {
                    return Err(AlgebraError::NotClosed { block: format!("{range:?}"), i: *i, j: *j });
                }
                entries.push((i - range.start, j - range.start, k - range.start, c.clone()));
            }
        }
        let names = self.names[range.clone()].to_vec();
        Algebra::from_parts(self.field.clone(), names, entries, Vec::new(), Meta::new("restriction"))
    }

    /// The subalgebra on a plain block with children, carrying the children as its blocks.
    pub fn nested(&self, name: &str) -> Result<Self, AlgebraError> {
        let b = self.block(name).ok_or_else(|| AlgebraError::InvalidBlocks(format!("no block `{name}`")))?;
        let mut sub = self.restrict(b.range.clone()).map_err(|e| match e {
            AlgebraError::NotClosed { i, j, .. } => AlgebraError::NotClosed { block: name.to_string(), i, j },
            other => other,
        })?;
        let prefix = format!("{name}/");
        let start = b.range.start;
        sub.blocks = self
            .blocks
            .iter()
            .filter_map(|c| {
                let rest = c.name.strip_prefix(&prefix)?;
                let mut nb = Block {
                    name: rest.to_string(),
                    range: c.range.start - start..c.range.end - start,
                    ..c.clone()
                };
                nb.linked_to = c.linked_to.iter().map(|n| n.strip_prefix(&prefix).unwrap_or(n).to_string()).collect();
                Some(nb)
            })
            .collect();
        sub.meta = Meta::new(format!("block {name}"));
        sub.check_blocks()?;
        Ok(sub)
    }

    /// Re-reads this algebra with a different metadata record.
    pub fn with_meta(mut self, meta: Meta) -> Self {
        self.meta = meta;
        self
    }

    pub fn with_blocks(self, blocks: Vec<Block<F::Elem>>) -> Result<Self, AlgebraError> {
        Algebra::from_parts(self.field, self.names, self.entries, blocks, self.meta)
    }

    pub fn format_vec(&self, v: &[F::Elem]) -> String {
        let f = &self.field;
        let terms: Vec<String> = v
            .iter()
            .enumerate()
            .filter(|(_, c)| !f.is_zero(c))
            .map(|(i, c)| if f.is_one(c) { self.names[i].clone() } else { format!("{}·{}", f.format_elem(c), self.names[i]) })
            .collect();
        if terms.is_empty() {
            "0".into()
        } else {
            terms.join(" + ")
        }
    }
}

impl Algebra<FiniteField> {
    /// Reinterprets structure constants over an extension of the prime field.
    pub fn extend_scalars(&self, ext: &FiniteField) -> Result<Self, AlgebraError> {
        let base = &self.field;
        if base.degree() != 1 || base.p() != ext.p() {
            return Err(AlgebraError::FieldMismatch);
        }
        // prime-field residues keep their index in every extension
        let entries = self.entries.clone();
        let mut meta = self.meta.clone();
        meta.params.insert("base_change_from".into(), serde_json::Value::String(base.spec().to_string()));
        Algebra::from_parts(ext.clone(), self.names.clone(), entries, self.blocks.clone(), meta)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::FiniteField;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn f5() -> FiniteField {
        FiniteField::prime(5).unwrap()
    }

    /// The split étale algebra on `n` idempotents.
    fn etale(f: &FiniteField, n: usize) -> Algebra<FiniteField> {
        let mut b = AlgebraBuilder::new(f.clone(), (1..=n).map(|i| format!("e{i}")).collect());
        for i in 0..n {
            b.add(i, i, i, 1);
        }
        b.build().unwrap()
    }

    fn rigid2(f: &FiniteField) -> Algebra<FiniteField> {
        let mut b = AlgebraBuilder::new(f.clone(), vec!["e".into(), "e1".into()]);
        b.add(0, 0, 0, 1).add(0, 1, 1, 1).add(1, 0, 1, 2).add(1, 1, 1, 1);
        b.build().unwrap()
    }

    #[test]
    fn etale_products_and_identity() {
        let f = f5();
        let e2 = etale(&f, 2);
        assert_eq!(e2.multiply(&[1, 0], &[0, 1]).unwrap(), vec![0, 0]);
        assert_eq!(e2.multiply(&[1, 0], &[1, 0]).unwrap(), vec![1, 0]);
        assert_eq!(e2.multiply(&[0, 0], &[3, 4]).unwrap(), vec![0, 0]);
        assert_eq!(e2.left_identities(), AffineSolution::Unique(vec![1, 1]));
        assert!(e2.multiply(&[1], &[1, 0]).is_err());
    }

    #[test]
    fn rigid_operators_and_blocks() {
        let f = f5();
        let a = rigid2(&f);
        let re = a.mult_operator(&[1, 0], Side::Right).unwrap();
        assert_eq!(re, Matrix::diag(&f, &[1, 2]));
        assert!(a.mult_operator(&[1, 0], Side::Left).unwrap().is_identity(&f));
        let blocks = a.eigenblock_decomposition(&[1, 0], false).unwrap();
        assert_eq!(blocks.len(), 2);
        assert_eq!((blocks[0].eigenvalue, blocks[1].eigenvalue), (1, 2));
        assert_eq!(blocks[1].space.basis(), &[vec![0, 1]]);
        assert_eq!(
            a.export_tensor(),
            vec![(0, 0, 0, 1), (0, 1, 1, 1), (1, 0, 1, 2), (1, 1, 1, 1)]
        );
    }

    #[test]
    fn two_sided_identity_fails_decomposition() {
        let f = f5();
        let mut b = AlgebraBuilder::new(f.clone(), vec!["e".into(), "x".into()]);
        b.add(0, 0, 0, 1).add(0, 1, 1, 1).add(1, 0, 1, 1);
        let a = b.build().unwrap();
        assert_eq!(a.eigenblock_decomposition(&[1, 0], false), Err(EigenDefect::UnitEigenspaceTooLarge { dim: 2 }));
    }

    #[test]
    fn zero_algebra_facts() {
        let f = f5();
        let z = AlgebraBuilder::new(f.clone(), vec!["z1".into(), "z2".into()]).build().unwrap();
        assert_eq!(z.left_identities(), AffineSolution::Empty);
        assert!(z.mult_operator(&[1, 3], Side::Right).unwrap().is_zero(&f));
        for k in TraceKind::ALL {
            let (g, nd) = z.trace_form(k);
            assert!(g.is_zero(&f));
            assert!(!nd);
        }
        assert!(z.export_tensor().is_empty());
        let zz = z.direct_sum(&z).unwrap();
        assert_eq!(zz.dim(), 4);
        assert!(zz.has_zero_multiplication());
    }

    #[test]
    fn etale_ll_form_is_identity() {
        let f = FiniteField::prime(7).unwrap();
        let e3 = etale(&f, 3);
        let (g, nd) = e3.trace_form(TraceKind::LL);
        assert!(g.is_identity(&f));
        assert!(nd);
        let (lr, _) = e3.trace_form(TraceKind::LR);
        let (rl, _) = e3.trace_form(TraceKind::RL);
        assert_eq!(lr, rl.transpose());
    }

    #[test]
    fn ideals_of_small_algebras() {
        let f = f5();
        let e2 = etale(&f, 2);
        assert_eq!(e2.ideal_generated_by(&[1, 0]).unwrap().basis(), &[vec![1, 0]]);
        assert_eq!(e2.ideal_generated_by(&[0, 0]), Err(AlgebraError::ZeroVector));
        let a = rigid2(&f);
        assert!(a.ideal_generated_by(&[1, 0]).unwrap().is_full());
    }

    #[test]
    fn automorphism_check_and_tensor_agree() {
        let f = f5();
        let a = rigid2(&f);
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        for _ in 0..200 {
            let g = Matrix::from_vec(2, 2, (0..4).map(|_| f.random_elem(&mut rng)).collect());
            let check = a.is_automorphism(&g);
            assert_eq!(check.holds(), a.tensor_stabilizes(&g));
        }
        assert!(a.is_automorphism(&Matrix::identity(&f, 2)).holds());
        assert_eq!(a.is_automorphism(&Matrix::zeros(&f, 2, 2)), AutCheck::Singular);
    }

    #[test]
    fn direct_sum_has_no_left_identity_when_summand_lacks_one() {
        let f = f5();
        let a = rigid2(&f);
        let z = AlgebraBuilder::new(f.clone(), vec!["z".into()]).build().unwrap();
        let s = a.direct_sum(&z).unwrap();
        assert_eq!(s.left_identities(), AffineSolution::Empty);
        assert_eq!(s.multiply(&[0, 1, 0], &[0, 0, 1]).unwrap(), vec![0, 0, 0]);
    }

    #[test]
    fn block_partition_is_validated() {
        let f = f5();
        let mut b = AlgebraBuilder::new(f.clone(), vec!["e".into(), "e1".into()]);
        b.add(0, 0, 0, 1);
        b.block(Block::new("e", 0..1, Role::UnitLine));
        assert!(matches!(b.build(), Err(AlgebraError::InvalidBlocks(_))));
    }
}
