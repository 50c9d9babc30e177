use super::{axpy, is_zero_vec, Matrix};
use crate::field::Field;

/// A subspace of `F^n`, stored by its reduced row echelon basis.
///
/// Equal subspaces have identical bases, so `==` is subspace equality.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Subspace<E> {
    ambient: usize,
    basis: Vec<Vec<E>>,
    pivots: Vec<usize>,
}

impl<E: Clone + PartialEq> Subspace<E> {
    pub fn zero(ambient: usize) -> Self {
        Subspace { ambient, basis: Vec::new(), pivots: Vec::new() }
    }

    pub fn full<F: Field<Elem = E>>(f: &F, ambient: usize) -> Self {
        Self::from_echelon(Echelon::full(f, ambient))
    }

    pub fn span<F: Field<Elem = E>>(f: &F, ambient: usize, vectors: impl IntoIterator<Item = Vec<E>>) -> Self {
        let mut ech = Echelon::new(ambient);
        for v in vectors {
            ech.insert(f, v);
        }
        Self::from_echelon(ech)
    }

    fn from_echelon(ech: Echelon<E>) -> Self {
        let mut rows: Vec<(usize, Vec<E>)> = ech.pivots.into_iter().zip(ech.rows).collect();
        rows.sort_by_key(|(p, _)| *p);
        let (pivots, basis) = rows.into_iter().unzip();
        Subspace { ambient: ech.ambient, basis, pivots }
    }

    pub fn ambient_dim(&self) -> usize {
        self.ambient
    }

    pub fn dim(&self) -> usize {
        self.basis.len()
    }

    pub fn basis(&self) -> &[Vec<E>] {
        &self.basis
    }

    pub fn pivots(&self) -> &[usize] {
        &self.pivots
    }

    pub fn is_zero(&self) -> bool {
        self.basis.is_empty()
    }

    pub fn is_full(&self) -> bool {
        self.basis.len() == self.ambient
    }

    /// Reduces `v` against the basis; the result is zero iff `v` is in the span.
    pub fn reduce<F: Field<Elem = E>>(&self, f: &F, v: &[E]) -> Vec<E> {
        let mut v = v.to_vec();
        for (row, &p) in self.basis.iter().zip(&self.pivots) {
            if !f.is_zero(&v[p]) {
                let c = f.neg(&v[p]);
                axpy(f, &mut v, &c, row);
            }
        }
        v
    }

    pub fn contains<F: Field<Elem = E>>(&self, f: &F, v: &[E]) -> bool {
        is_zero_vec(f, &self.reduce(f, v))
    }

    pub fn contains_subspace<F: Field<Elem = E>>(&self, f: &F, other: &Self) -> bool {
        other.basis.iter().all(|v| self.contains(f, v))
    }

    /// Coordinates of `v` in the echelon basis, or `None` if `v` lies outside.
    pub fn coordinates<F: Field<Elem = E>>(&self, f: &F, v: &[E]) -> Option<Vec<E>> {
        if !self.contains(f, v) {
            return None;
        }
        Some(self.pivots.iter().map(|&p| v[p].clone()).collect())
    }

    pub fn sum<F: Field<Elem = E>>(&self, f: &F, other: &Self) -> Self {
        Self::span(f, self.ambient, self.basis.iter().chain(&other.basis).cloned())
    }

    /// Image under a square matrix.
    pub fn image<F: Field<Elem = E>>(&self, f: &F, g: &Matrix<E>) -> Self {
        Self::span(f, self.ambient, self.basis.iter().map(|v| g.mul_vec(f, v)))
    }

    pub fn is_stable_under<F: Field<Elem = E>>(&self, f: &F, g: &Matrix<E>) -> bool {
        self.basis.iter().all(|v| self.contains(f, &g.mul_vec(f, v)))
    }

    pub fn basis_matrix<F: Field<Elem = E>>(&self, f: &F) -> Matrix<E> {
        if self.basis.is_empty() {
            return Matrix::zeros(f, 0, self.ambient);
        }
        Matrix::from_rows(self.basis.clone())
    }

    /// Annihilator `{w : ⟨v, w⟩ = 0 for all v}` under the standard dot product.
    pub fn annihilator<F: Field<Elem = E>>(&self, f: &F) -> Self {
        if self.basis.is_empty() {
            return Self::full(f, self.ambient);
        }
        Self::span(f, self.ambient, self.basis_matrix(f).kernel(f))
    }
}

/// Incrementally maintained reduced echelon basis.
#[derive(Debug, Clone)]
pub struct Echelon<E> {
    ambient: usize,
    rows: Vec<Vec<E>>,
    pivots: Vec<usize>,
}

impl<E: Clone + PartialEq> Echelon<E> {
    pub fn new(ambient: usize) -> Self {
        Echelon { ambient, rows: Vec::new(), pivots: Vec::new() }
    }

    fn full<F: Field<Elem = E>>(f: &F, ambient: usize) -> Self {
        let rows = (0..ambient).map(|i| super::unit_vector(f, ambient, i)).collect();
        Echelon { ambient, rows, pivots: (0..ambient).collect() }
    }

    pub fn dim(&self) -> usize {
        self.rows.len()
    }

    pub fn is_full(&self) -> bool {
        self.rows.len() == self.ambient
    }

    pub fn reduce<F: Field<Elem = E>>(&self, f: &F, v: &[E]) -> Vec<E> {
        let mut v = v.to_vec();
        for (row, &p) in self.rows.iter().zip(&self.pivots) {
            if !f.is_zero(&v[p]) {
                let c = f.neg(&v[p]);
                axpy(f, &mut v, &c, row);
            }
        }
        v
    }

    /// Adds `v` to the span; returns the new normalized row when `v` was independent.
    pub fn insert<F: Field<Elem = E>>(&mut self, f: &F, v: Vec<E>) -> Option<Vec<E>> {
        assert_eq!(v.len(), self.ambient, "vector length");
        let mut r = self.reduce(f, &v);
        let p = r.iter().position(|x| !f.is_zero(x))?;
        let inv = f.inv(&r[p]).expect("nonzero");
        for x in r.iter_mut() {
            *x = f.mul(x, &inv);
        }
        for row in self.rows.iter_mut() {
            if !f.is_zero(&row[p]) {
                let c = f.neg(&row[p]);
                axpy(f, row, &c, &r);
            }
        }
        self.rows.push(r.clone());
        self.pivots.push(p);
        Some(r)
    }

    pub fn into_subspace(self) -> Subspace<E> {
        Subspace::from_echelon(self)
    }
}

/// Smallest subspace containing `seeds` and stable under every operator.
pub fn spin<F: Field>(f: &F, ambient: usize, seeds: &[Vec<F::Elem>], operators: &[Matrix<F::Elem>]) -> Subspace<F::Elem> {
    let mut ech = Echelon::new(ambient);
    let mut queue = Vec::new();
    for s in seeds {
        if let Some(r) = ech.insert(f, s.clone()) {
            queue.push(r);
        }
    }
    while let Some(v) = queue.pop() {
        if ech.is_full() {
            break;
        }
        for op in operators {
            if let Some(r) = ech.insert(f, op.mul_vec(f, &v)) {
                queue.push(r);
                if ech.is_full() {
                    break;
                }
            }
        }
    }
    ech.into_subspace()
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum AffineSolution<E> {
    Unique(Vec<E>),
    Family { particular: Vec<E>, homogeneous: Subspace<E> },
    Empty,
}

/// All solutions of `a·x = b`.
pub fn solve_affine<F: Field>(f: &F, a: &Matrix<F::Elem>, b: &[F::Elem]) -> AffineSolution<F::Elem> {
    assert_eq!(a.rows(), b.len(), "right-hand side length");
    let n = a.cols();
    let mut aug = Matrix::zeros(f, a.rows(), n + 1);
    aug.set_block(0, 0, a);
    for (i, x) in b.iter().enumerate() {
        aug.set(i, n, x.clone());
    }
    let (r, pivots) = aug.rref(f);
    if pivots.last() == Some(&n) {
        return AffineSolution::Empty;
    }
    let mut particular = vec![f.zero(); n];
    for (row, &p) in pivots.iter().enumerate() {
        particular[p] = r.get(row, n).clone();
    }
    let kernel = a.kernel(f);
    if kernel.is_empty() {
        AffineSolution::Unique(particular)
    } else {
        AffineSolution::Family { particular, homogeneous: Subspace::span(f, n, kernel) }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::FiniteField;
    use proptest::prelude::*;

    fn f5() -> FiniteField {
        FiniteField::prime(5).unwrap()
    }

    #[test]
    fn solve_examples() {
        let f = f5();
        let id = Matrix::identity(&f, 2);
        assert_eq!(solve_affine(&f, &id, &[3, 4]), AffineSolution::Unique(vec![3, 4]));
        let z = Matrix::zeros(&f, 2, 2);
        match solve_affine(&f, &z, &[0, 0]) {
            AffineSolution::Family { homogeneous, .. } => assert_eq!(homogeneous.dim(), 2),
            other => panic!("{other:?}"),
        }
        assert_eq!(solve_affine(&f, &z, &[1, 0]), AffineSolution::Empty);
    }

    #[test]
    fn spin_without_operators_is_span() {
        let f = f5();
        let s = spin(&f, 3, &[vec![2, 0, 1]], &[]);
        assert_eq!(s.basis(), &[vec![1, 0, 3]]);
    }

    #[test]
    fn spin_result_is_stable() {
        let f = f5();
        let shift = Matrix::from_rows(vec![vec![0, 0, 0], vec![1, 0, 0], vec![0, 1, 0]]);
        let s = spin(&f, 3, &[vec![0, 1, 0]], &[shift.clone()]);
        assert_eq!(s.dim(), 2);
        assert!(s.is_stable_under(&f, &shift));
    }

    proptest! {
        #[test]
        fn span_is_canonical(rows in proptest::collection::vec(proptest::collection::vec(0u32..5, 4), 0..5), c in 1u32..5) {
            let f = f5();
            let a = Subspace::span(&f, 4, rows.clone());
            // scaling and reordering the spanning set leaves the basis unchanged
            let mut scaled: Vec<Vec<u32>> = rows.iter().map(|r| r.iter().map(|x| f.mul(x, &c)).collect()).collect();
            scaled.reverse();
            let b = Subspace::span(&f, 4, scaled);
            prop_assert_eq!(&a, &b);
            // RREF of the basis is the basis itself
            let again = Subspace::span(&f, 4, a.basis().to_vec());
            prop_assert_eq!(&a, &again);
            for r in &rows {
                prop_assert!(a.contains(&f, r));
            }
        }

        #[test]
        fn eigenvectors_are_eigenvectors(entries in proptest::collection::vec(0u32..5, 9), lam in 0u32..5) {
            let f = f5();
            let m = Matrix::from_vec(3, 3, entries);
            let e = m.eigenspace(&f, &lam);
            for v in e.basis() {
                let mv = m.mul_vec(&f, v);
                let lv: Vec<u32> = v.iter().map(|x| f.mul(x, &lam)).collect();
                prop_assert_eq!(mv, lv);
            }
        }
    }
}
