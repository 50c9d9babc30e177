//! Truncated tensor and symmetric algebras: monomial bases, induced actions
//! of `GL(V)`, and the quotient algebra `A(V, S)`.

use std::collections::HashMap;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::algebra::{Algebra, AlgebraBuilder, AlgebraError, Block, Meta, Role};
use crate::field::Field;
use crate::linalg::{Matrix, Subspace};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum GradedError {
    #[error("truncation degree must exceed 1, got {0}")]
    DegreeOutOfRange(usize),
    #[error("subspace lives in dimension {got}, but the degree-{degree} piece has dimension {expected}")]
    SubspaceWrongDegree { degree: usize, expected: usize, got: usize },
    #[error(transparent)]
    Algebra(#[from] AlgebraError),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Flavor {
    Tensor,
    Symmetric,
}

/// Monomial basis of `V^{⊗i}` (words, lexicographic) or `Sym^i V`
/// (non-decreasing index sequences, lexicographic).
#[derive(Debug, Clone)]
pub struct GradedBasis {
    flavor: Flavor,
    n: usize,
    degree: usize,
    monomials: Vec<Vec<usize>>,
    index: HashMap<Vec<usize>, usize>,
    /// For every word of length `degree` (base-`n` order), the monomial it maps to.
    word_target: Vec<usize>,
}

fn all_words(n: usize, degree: usize) -> Vec<Vec<usize>> {
    let mut out = vec![Vec::new()];
    for _ in 0..degree {
        out = out
            .into_iter()
            .flat_map(|w| {
                (0..n).map(move |j| {
                    let mut w = w.clone();
                    w.push(j);
                    w
                })
            })
            .collect();
    }
    out
}

impl GradedBasis {
    pub fn new(flavor: Flavor, n: usize, degree: usize) -> Self {
        let words = all_words(n, degree);
        let monomials: Vec<Vec<usize>> = match flavor {
            Flavor::Tensor => words.clone(),
            Flavor::Symmetric => words.iter().filter(|w| w.windows(2).all(|p| p[0] <= p[1])).cloned().collect(),
        };
        let index: HashMap<Vec<usize>, usize> = monomials.iter().enumerate().map(|(i, m)| (m.clone(), i)).collect();
        let word_target = words
            .iter()
            .map(|w| {
                let mut key = w.clone();
                if flavor == Flavor::Symmetric {
                    key.sort_unstable();
                }
                index[&key]
            })
            .collect();
        GradedBasis { flavor, n, degree, monomials, index, word_target }
    }

    pub fn flavor(&self) -> Flavor {
        self.flavor
    }

    pub fn base_dim(&self) -> usize {
        self.n
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn len(&self) -> usize {
        self.monomials.len()
    }

    pub fn is_empty(&self) -> bool {
        self.monomials.is_empty()
    }

    pub fn monomials(&self) -> &[Vec<usize>] {
        &self.monomials
    }

    /// Monomial reached by the `w`-th word of length `degree` (base-`n` digits, first letter most significant).
    pub fn word_target(&self, w: usize) -> usize {
        self.word_target[w]
    }

    pub fn index_of(&self, monomial: &[usize]) -> Option<usize> {
        self.index.get(monomial).copied()
    }

    /// Index of the monomial obtained by multiplying two monomials.
    pub fn product_index(&self, a: &[usize], b: &[usize]) -> Option<usize> {
        let mut m: Vec<usize> = a.iter().chain(b).copied().collect();
        if self.flavor == Flavor::Symmetric {
            m.sort_unstable();
        }
        self.index_of(&m)
    }

    pub fn monomial_name(&self, m: &[usize], vars: &[String]) -> String {
        match self.flavor {
            Flavor::Tensor => m.iter().map(|&i| vars[i].as_str()).collect::<Vec<_>>().join("⊗"),
            Flavor::Symmetric => {
                let mut parts = Vec::new();
                let mut i = 0;
                while i < m.len() {
                    let mut j = i;
                    while j < m.len() && m[j] == m[i] {
                        j += 1;
                    }
                    let e = j - i;
                    parts.push(if e == 1 { vars[m[i]].clone() } else { format!("{}^{e}", vars[m[i]]) });
                    i = j;
                }
                parts.join("*")
            }
        }
    }

    /// Matrix of `g^{⊗i}` or `Sym^i(g)` on this basis.
    pub fn induced_action<F: Field>(&self, f: &F, g: &Matrix<F::Elem>) -> Matrix<F::Elem> {
        assert!(g.rows() == self.n && g.cols() == self.n, "induced action needs an n×n matrix");
        if self.degree == 1 {
            return g.clone();
        }
        let dim = self.len();
        let mut out = Matrix::zeros(f, dim, dim);
        // weight of word w is Π_t g[w_t][m_t], built digit by digit
        for (col, m) in self.monomials.iter().enumerate() {
            let mut partial = vec![f.one()];
            for &mt in m {
                let mut next = Vec::with_capacity(partial.len() * self.n);
                for p in &partial {
                    for j in 0..self.n {
                        next.push(if f.is_zero(p) { f.zero() } else { f.mul(p, g.get(j, mt)) });
                    }
                }
                partial = next;
            }
            for (w, c) in partial.iter().enumerate() {
                if f.is_zero(c) {
                    continue;
                }
                let row = self.word_target[w];
                let v = f.add(out.get(row, col), c);
                out.set(row, col, v);
            }
        }
        out
    }
}

/// Whether `g` maps `S` onto itself in the induced action on the degree piece.
pub fn normalizes_subspace<F: Field>(f: &F, g: &Matrix<F::Elem>, s: &Subspace<F::Elem>, basis: &GradedBasis) -> bool {
    let h = basis.induced_action(f, g);
    s.image(f, &h) == *s
}

/// Coset representatives for a degree piece modulo `S`: the monomials whose
/// columns are not pivots of `S`'s reduced echelon basis.
#[derive(Debug, Clone)]
pub struct QuotientPlan<E> {
    degree: usize,
    subspace: Subspace<E>,
    reps: Vec<usize>,
    rep_pos: Vec<Option<usize>>,
}

impl<E: Clone + PartialEq> QuotientPlan<E> {
    pub fn new(degree: usize, piece_dim: usize, subspace: Subspace<E>) -> Self {
        let reps: Vec<usize> = (0..piece_dim).filter(|c| !subspace.pivots().contains(c)).collect();
        let mut rep_pos = vec![None; piece_dim];
        for (i, &r) in reps.iter().enumerate() {
            rep_pos[r] = Some(i);
        }
        QuotientPlan { degree, subspace, reps, rep_pos }
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn subspace(&self) -> &Subspace<E> {
        &self.subspace
    }

    pub fn coset_reps(&self) -> &[usize] {
        &self.reps
    }

    /// Coordinates on the coset representatives of the class of `v`.
    pub fn reduce<F: Field<Elem = E>>(&self, f: &F, v: &[E]) -> Vec<E> {
        let r = self.subspace.reduce(f, v);
        self.reps.iter().map(|&c| r[c].clone()).collect()
    }

    /// Class of a single monomial, as sparse `(rep position, coefficient)` pairs.
    pub fn reduce_monomial<F: Field<Elem = E>>(&self, f: &F, m: usize) -> Vec<(usize, E)> {
        if let Some(p) = self.rep_pos[m] {
            return vec![(p, f.one())];
        }
        let mut v = vec![f.zero(); self.rep_pos.len()];
        v[m] = f.one();
        self.reduce(f, &v).into_iter().enumerate().filter(|(_, c)| !f.is_zero(c)).collect()
    }
}

/// `A(V, S)`: the truncated graded algebra on `V = F^n` modulo the ideal
/// generated by `S` in degree `r` and everything of degree above `r`.
#[derive(Debug, Clone)]
pub struct AlgebraA<F: Field> {
    pub algebra: Algebra<F>,
    pub pieces: Vec<GradedBasis>,
    pub quotient: QuotientPlan<F::Elem>,
    pub flavor: Flavor,
    pub n: usize,
    pub r: usize,
    /// Start index of each degree piece inside the algebra basis.
    pub offsets: Vec<usize>,
}

/// Builds `A(V, S)` with blocks `A1` (generator) through `Ar` (generated).
pub fn build_a<F: Field>(
    f: &F,
    n: usize,
    s: &Subspace<F::Elem>,
    r: usize,
    flavor: Flavor,
    vars: &[String],
) -> Result<AlgebraA<F>, GradedError> {
    if r < 2 {
        return Err(GradedError::DegreeOutOfRange(r));
    }
    let pieces: Vec<GradedBasis> = (1..=r).map(|i| GradedBasis::new(flavor, n, i)).collect();
    let top = &pieces[r - 1];
    if s.ambient_dim() != top.len() {
        return Err(GradedError::SubspaceWrongDegree { degree: r, expected: top.len(), got: s.ambient_dim() });
    }
    let quotient = QuotientPlan::new(r, top.len(), s.clone());
    let mut names = Vec::new();
    let mut offsets = Vec::new();
    for (d, piece) in pieces.iter().enumerate() {
        offsets.push(names.len());
        if d + 1 < r {
            names.extend(piece.monomials().iter().map(|m| piece.monomial_name(m, vars)));
        } else {
            names.extend(quotient.coset_reps().iter().map(|&c| piece.monomial_name(&piece.monomials()[c], vars)));
        }
    }
    let dim = names.len();
    let mut b = AlgebraBuilder::new(f.clone(), names);
    for i in 1..r {
        for j in 1..=(r - i) {
            let (pi, pj) = (&pieces[i - 1], &pieces[j - 1]);
            let target = &pieces[i + j - 1];
            for (ai, ma) in pi.monomials().iter().enumerate() {
                for (bi, mb) in pj.monomials().iter().enumerate() {
                    let (x, y) = (offsets[i - 1] + ai, offsets[j - 1] + bi);
                    let t = target.product_index(ma, mb).expect("product monomial exists");
                    if i + j < r {
                        b.add(x, y, offsets[i + j - 1] + t, f.one());
                    } else {
                        for (p, c) in quotient.reduce_monomial(f, t) {
                            b.add(x, y, offsets[r - 1] + p, c);
                        }
                    }
                }
            }
        }
    }
    for d in 1..=r {
        let lo = offsets[d - 1];
        let hi = if d < r { offsets[d] } else { dim };
        if lo == hi {
            continue;
        }
        let role = if d == 1 { Role::Generator } else { Role::Generated };
        b.block(Block::new(format!("A{d}"), lo..hi, role));
    }
    let flavor_name = match flavor {
        Flavor::Tensor => "tensor",
        Flavor::Symmetric => "symmetric",
    };
    let s_rows: Vec<Vec<String>> = s.basis().iter().map(|v| v.iter().map(|x| f.format_elem(x)).collect()).collect();
    b.meta(
        Meta::new("A")
            .param("n", n)
            .param("r", r)
            .param("flavor", flavor_name)
            .param("S", serde_json::to_value(s_rows).expect("strings serialize")),
    );
    let algebra = b.build()?;
    Ok(AlgebraA { algebra, pieces, quotient, flavor, n, r, offsets })
}

impl<F: Field> AlgebraA<F> {
    /// The graded extension of `g ∈ GL(V)`: induced actions on each piece,
    /// the top piece acting on coset representatives.
    pub fn extend(&self, g: &Matrix<F::Elem>) -> Matrix<F::Elem> {
        let f = self.algebra.field();
        let mut blocks = Vec::new();
        for (d, piece) in self.pieces.iter().enumerate() {
            let h = piece.induced_action(f, g);
            if d + 1 < self.r {
                blocks.push(h);
            } else if !self.quotient.coset_reps().is_empty() {
                let cols: Vec<Vec<F::Elem>> =
                    self.quotient.coset_reps().iter().map(|&c| self.quotient.reduce(f, &h.col(c))).collect();
                blocks.push(Matrix::from_cols(cols));
            }
        }
        Matrix::block_diag(f, &blocks)
    }

    pub fn check_prop1(&self, g: &Matrix<F::Elem>) -> bool {
        self.algebra.is_automorphism(&self.extend(g)).holds()
    }

    pub fn top_basis(&self) -> &GradedBasis {
        &self.pieces[self.r - 1]
    }
}
