//! Dense exact linear algebra.
//!
//! Matrices act on column vectors: column `j` of `g` is the image of the
//! basis vector `e_j`.

mod subspace;

pub use subspace::{solve_affine, spin, AffineSolution, Echelon, Subspace};

use thiserror::Error;

use crate::field::Field;
use crate::poly::{self, Poly};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum LinalgError {
    #[error("shape mismatch: {0}")]
    Shape(String),
    #[error("matrix is singular")]
    Singular,
    #[error("pairing is degenerate")]
    DegeneratePairing,
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Matrix<E> {
    rows: usize,
    cols: usize,
    data: Vec<E>,
}

impl<E: Clone> Matrix<E> {
    pub fn from_vec(rows: usize, cols: usize, data: Vec<E>) -> Self {
        assert_eq!(data.len(), rows * cols, "matrix data length");
        Matrix { rows, cols, data }
    }

    pub fn from_rows(rows: Vec<Vec<E>>) -> Self {
        let r = rows.len();
        let c = rows.first().map_or(0, |x| x.len());
        assert!(rows.iter().all(|x| x.len() == c), "ragged rows");
        Matrix { rows: r, cols: c, data: rows.into_iter().flatten().collect() }
    }

    pub fn filled(rows: usize, cols: usize, v: E) -> Self {
        Matrix { rows, cols, data: vec![v; rows * cols] }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn data(&self) -> &[E] {
        &self.data
    }

    pub fn into_data(self) -> Vec<E> {
        self.data
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> &E {
        &self.data[i * self.cols + j]
    }

    #[inline]
    pub fn set(&mut self, i: usize, j: usize, v: E) {
        self.data[i * self.cols + j] = v;
    }

    pub fn row(&self, i: usize) -> &[E] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn col(&self, j: usize) -> Vec<E> {
        (0..self.rows).map(|i| self.get(i, j).clone()).collect()
    }

    pub fn row_vecs(&self) -> Vec<Vec<E>> {
        (0..self.rows).map(|i| self.row(i).to_vec()).collect()
    }

    pub fn transpose(&self) -> Self {
        let mut data = Vec::with_capacity(self.data.len());
        for j in 0..self.cols {
            for i in 0..self.rows {
                data.push(self.get(i, j).clone());
            }
        }
        Matrix { rows: self.cols, cols: self.rows, data }
    }

    pub fn submatrix(&self, rows: std::ops::Range<usize>, cols: std::ops::Range<usize>) -> Self {
        let mut data = Vec::with_capacity(rows.len() * cols.len());
        for i in rows.clone() {
            for j in cols.clone() {
                data.push(self.get(i, j).clone());
            }
        }
        Matrix { rows: rows.len(), cols: cols.len(), data }
    }

    pub fn from_cols(cols: Vec<Vec<E>>) -> Self {
        Self::from_rows(cols).transpose()
    }
}

impl<E: Clone + PartialEq> Matrix<E> {
    pub fn zeros<F: Field<Elem = E>>(f: &F, rows: usize, cols: usize) -> Self {
        Self::filled(rows, cols, f.zero())
    }

    pub fn identity<F: Field<Elem = E>>(f: &F, n: usize) -> Self {
        let mut m = Self::zeros(f, n, n);
        for i in 0..n {
            m.set(i, i, f.one());
        }
        m
    }

    pub fn diag<F: Field<Elem = E>>(f: &F, d: &[E]) -> Self {
        let mut m = Self::zeros(f, d.len(), d.len());
        for (i, x) in d.iter().enumerate() {
            m.set(i, i, x.clone());
        }
        m
    }

    pub fn scalar<F: Field<Elem = E>>(f: &F, n: usize, c: &E) -> Self {
        Self::diag(f, &vec![c.clone(); n])
    }

    pub fn is_zero<F: Field<Elem = E>>(&self, f: &F) -> bool {
        self.data.iter().all(|x| f.is_zero(x))
    }

    pub fn is_identity<F: Field<Elem = E>>(&self, f: &F) -> bool {
        self.is_square() && *self == Self::identity(f, self.rows)
    }

    pub fn mul<F: Field<Elem = E>>(&self, f: &F, other: &Self) -> Self {
        assert_eq!(self.cols, other.rows, "matrix product shape");
        let mut out = Self::zeros(f, self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self.get(i, k);
                if f.is_zero(a) {
                    continue;
                }
                for j in 0..other.cols {
                    let idx = i * other.cols + j;
                    out.data[idx] = f.mul_add(&out.data[idx], a, other.get(k, j));
                }
            }
        }
        out
    }

    /// `self · v` for a column vector `v`.
    pub fn mul_vec<F: Field<Elem = E>>(&self, f: &F, v: &[E]) -> Vec<E> {
        assert_eq!(self.cols, v.len(), "matrix-vector shape");
        (0..self.rows)
            .map(|i| {
                let mut acc = f.zero();
                for (a, x) in self.row(i).iter().zip(v) {
                    if !f.is_zero(x) {
                        acc = f.mul_add(&acc, a, x);
                    }
                }
                acc
            })
            .collect()
    }

    /// `v · self` for a row vector `v`.
    pub fn vec_mul<F: Field<Elem = E>>(&self, f: &F, v: &[E]) -> Vec<E> {
        assert_eq!(self.rows, v.len(), "vector-matrix shape");
        let mut out = vec![f.zero(); self.cols];
        for (i, x) in v.iter().enumerate() {
            if f.is_zero(x) {
                continue;
            }
            for (j, o) in out.iter_mut().enumerate() {
                *o = f.mul_add(o, x, self.get(i, j));
            }
        }
        out
    }

    pub fn add<F: Field<Elem = E>>(&self, f: &F, other: &Self) -> Self {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols), "matrix sum shape");
        let data = self.data.iter().zip(&other.data).map(|(a, b)| f.add(a, b)).collect();
        Matrix { rows: self.rows, cols: self.cols, data }
    }

    pub fn sub<F: Field<Elem = E>>(&self, f: &F, other: &Self) -> Self {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols), "matrix difference shape");
        let data = self.data.iter().zip(&other.data).map(|(a, b)| f.sub(a, b)).collect();
        Matrix { rows: self.rows, cols: self.cols, data }
    }

    pub fn scale<F: Field<Elem = E>>(&self, f: &F, c: &E) -> Self {
        let data = self.data.iter().map(|a| f.mul(a, c)).collect();
        Matrix { rows: self.rows, cols: self.cols, data }
    }

    pub fn kron<F: Field<Elem = E>>(&self, f: &F, other: &Self) -> Self {
        let (r, c) = (self.rows * other.rows, self.cols * other.cols);
        let mut out = Self::zeros(f, r, c);
        for i in 0..self.rows {
            for j in 0..self.cols {
                let a = self.get(i, j);
                if f.is_zero(a) {
                    continue;
                }
                for k in 0..other.rows {
                    for l in 0..other.cols {
                        out.set(i * other.rows + k, j * other.cols + l, f.mul(a, other.get(k, l)));
                    }
                }
            }
        }
        out
    }

    pub fn block_diag<F: Field<Elem = E>>(f: &F, blocks: &[Self]) -> Self {
        let r: usize = blocks.iter().map(|b| b.rows).sum();
        let c: usize = blocks.iter().map(|b| b.cols).sum();
        let mut out = Self::zeros(f, r, c);
        let (mut r0, mut c0) = (0, 0);
        for b in blocks {
            for i in 0..b.rows {
                for j in 0..b.cols {
                    out.set(r0 + i, c0 + j, b.get(i, j).clone());
                }
            }
            r0 += b.rows;
            c0 += b.cols;
        }
        out
    }

    /// Writes `block` with its top-left corner at `(r0, c0)`.
    pub fn set_block(&mut self, r0: usize, c0: usize, block: &Self) {
        for i in 0..block.rows {
            for j in 0..block.cols {
                self.set(r0 + i, c0 + j, block.get(i, j).clone());
            }
        }
    }

    /// Reduced row echelon form and pivot columns.
    pub fn rref<F: Field<Elem = E>>(&self, f: &F) -> (Self, Vec<usize>) {
        let mut m = self.clone();
        let mut pivots = Vec::new();
        let mut r = 0;
        for c in 0..m.cols {
            if r == m.rows {
                break;
            }
            let Some(p) = (r..m.rows).find(|&i| !f.is_zero(m.get(i, c))) else { continue };
            m.swap_rows(p, r);
            let inv = f.inv(m.get(r, c)).expect("pivot nonzero");
            for j in c..m.cols {
                let v = f.mul(m.get(r, j), &inv);
                m.set(r, j, v);
            }
            for i in 0..m.rows {
                if i == r || f.is_zero(m.get(i, c)) {
                    continue;
                }
                let factor = m.get(i, c).clone();
                for j in c..m.cols {
                    let v = f.sub(m.get(i, j), &f.mul(&factor, m.get(r, j)));
                    m.set(i, j, v);
                }
            }
            pivots.push(c);
            r += 1;
        }
        (m, pivots)
    }

    fn swap_rows(&mut self, a: usize, b: usize) {
        if a == b {
            return;
        }
        for j in 0..self.cols {
            self.data.swap(a * self.cols + j, b * self.cols + j);
        }
    }

    fn swap_cols(&mut self, a: usize, b: usize) {
        if a == b {
            return;
        }
        for i in 0..self.rows {
            self.data.swap(i * self.cols + a, i * self.cols + b);
        }
    }

    pub fn rank<F: Field<Elem = E>>(&self, f: &F) -> usize {
        self.rref(f).1.len()
    }

    pub fn det<F: Field<Elem = E>>(&self, f: &F) -> E {
        assert!(self.is_square(), "determinant of non-square matrix");
        let mut m = self.clone();
        let n = m.rows;
        let mut det = f.one();
        for c in 0..n {
            let Some(p) = (c..n).find(|&i| !f.is_zero(m.get(i, c))) else { return f.zero() };
            if p != c {
                m.swap_rows(p, c);
                det = f.neg(&det);
            }
            let pivot = m.get(c, c).clone();
            det = f.mul(&det, &pivot);
            let inv = f.inv(&pivot).expect("pivot nonzero");
            for i in c + 1..n {
                if f.is_zero(m.get(i, c)) {
                    continue;
                }
                let factor = f.mul(m.get(i, c), &inv);
                for j in c..n {
                    let v = f.sub(m.get(i, j), &f.mul(&factor, m.get(c, j)));
                    m.set(i, j, v);
                }
            }
        }
        det
    }

    pub fn inverse<F: Field<Elem = E>>(&self, f: &F) -> Result<Self, LinalgError> {
        if !self.is_square() {
            return Err(LinalgError::Shape("inverse of non-square matrix".into()));
        }
        let n = self.rows;
        let mut aug = Self::zeros(f, n, 2 * n);
        aug.set_block(0, 0, self);
        aug.set_block(0, n, &Self::identity(f, n));
        let (r, pivots) = aug.rref(f);
        if pivots.len() < n || pivots[n - 1] != n - 1 {
            return Err(LinalgError::Singular);
        }
        Ok(r.submatrix(0..n, n..2 * n))
    }

    /// Basis of the right kernel `{x : self·x = 0}`, one vector per free column.
    pub fn kernel<F: Field<Elem = E>>(&self, f: &F) -> Vec<Vec<E>> {
        let (r, pivots) = self.rref(f);
        let free: Vec<usize> = (0..self.cols).filter(|c| !pivots.contains(c)).collect();
        free.iter()
            .map(|&fc| {
                let mut v = vec![f.zero(); self.cols];
                v[fc] = f.one();
                for (row, &pc) in pivots.iter().enumerate() {
                    v[pc] = f.neg(r.get(row, fc));
                }
                v
            })
            .collect()
    }

    pub fn pow<F: Field<Elem = E>>(&self, f: &F, mut e: u64) -> Self {
        let mut base = self.clone();
        let mut acc = Self::identity(f, self.rows);
        while e > 0 {
            if e & 1 == 1 {
                acc = acc.mul(f, &base);
            }
            base = base.mul(f, &base);
            e >>= 1;
        }
        acc
    }

    pub fn trace<F: Field<Elem = E>>(&self, f: &F) -> E {
        (0..self.rows.min(self.cols)).fold(f.zero(), |acc, i| f.add(&acc, self.get(i, i)))
    }

    /// Characteristic polynomial `det(x·I − self)`, low to high, via Hessenberg reduction.
    pub fn charpoly<F: Field<Elem = E>>(&self, f: &F) -> Poly<E> {
        assert!(self.is_square(), "characteristic polynomial of non-square matrix");
        let n = self.rows;
        let mut h = self.clone();
        for m in 1..n.saturating_sub(1) {
            let Some(i) = (m..n).find(|&i| !f.is_zero(h.get(i, m - 1))) else { continue };
            h.swap_rows(i, m);
            h.swap_cols(i, m);
            let t_inv = f.inv(h.get(m, m - 1)).expect("nonzero");
            for i in m + 1..n {
                let u = f.mul(h.get(i, m - 1), &t_inv);
                if f.is_zero(&u) {
                    continue;
                }
                for j in 0..n {
                    let v = f.sub(h.get(i, j), &f.mul(&u, h.get(m, j)));
                    h.set(i, j, v);
                }
                for j in 0..n {
                    let v = f.add(h.get(j, m), &f.mul(&u, h.get(j, i)));
                    h.set(j, m, v);
                }
            }
        }
        // p_k(x) for the leading k×k block
        let mut ps: Vec<Poly<E>> = vec![vec![f.one()]];
        for k in 1..=n {
            let lin = vec![f.neg(h.get(k - 1, k - 1)), f.one()];
            let mut pk = poly::mul(f, &lin, &ps[k - 1]);
            let mut prod = f.one();
            for i in (1..k).rev() {
                prod = f.mul(&prod, h.get(i, i - 1));
                let c = f.mul(h.get(i - 1, k - 1), &prod);
                pk = poly::sub(f, &pk, &poly::scale(f, &ps[i - 1], &c));
            }
            ps.push(pk);
        }
        ps.pop().expect("nonempty")
    }

    /// `p(self)` by Horner's rule.
    pub fn eval_poly<F: Field<Elem = E>>(&self, f: &F, p: &[E]) -> Self {
        let n = self.rows;
        let mut acc = Self::zeros(f, n, n);
        for c in p.iter().rev() {
            acc = acc.mul(f, self).add(f, &Self::scalar(f, n, c));
        }
        acc
    }

    /// Eigenspace `ker(self − λ·I)`.
    pub fn eigenspace<F: Field<Elem = E>>(&self, f: &F, lam: &E) -> Subspace<E> {
        let n = self.rows;
        let shifted = self.sub(f, &Self::scalar(f, n, lam));
        Subspace::span(f, n, shifted.kernel(f))
    }

    /// Eigenvalues lying in the field, in canonical order.
    pub fn eigenvalues<F: Field<Elem = E>>(&self, f: &F) -> Vec<E> {
        match f.order() {
            Some(q) if q <= 121 => {
                f.elements().filter(|lam| self.sub(f, &Self::scalar(f, self.rows, lam)).rank(f) < self.rows).collect()
            }
            _ => f.poly_roots(&self.charpoly(f)),
        }
    }
}

/// The adjoint of `g` with respect to the bilinear form with Gram matrix `pairing`:
/// the unique `g*` with `Δ(g v, w) = Δ(v, g* w)`, i.e. `P⁻¹ gᵀ P`.
pub fn adjoint<F: Field>(f: &F, g: &Matrix<F::Elem>, pairing: &Matrix<F::Elem>) -> Result<Matrix<F::Elem>, LinalgError> {
    if !g.is_square() || !pairing.is_square() || g.rows() != pairing.rows() {
        return Err(LinalgError::Shape("adjoint needs square matrices of equal size".into()));
    }
    let p_inv = pairing.inverse(f).map_err(|_| LinalgError::DegeneratePairing)?;
    Ok(p_inv.mul(f, &g.transpose()).mul(f, pairing))
}

/// Value of the bilinear form `vᵀ P w`.
pub fn bilinear<F: Field>(f: &F, pairing: &Matrix<F::Elem>, v: &[F::Elem], w: &[F::Elem]) -> F::Elem {
    let pw = pairing.mul_vec(f, w);
    v.iter().zip(&pw).fold(f.zero(), |acc, (a, b)| f.mul_add(&acc, a, b))
}

pub fn unit_vector<F: Field>(f: &F, n: usize, i: usize) -> Vec<F::Elem> {
    let mut v = vec![f.zero(); n];
    v[i] = f.one();
    v
}

pub fn is_zero_vec<F: Field>(f: &F, v: &[F::Elem]) -> bool {
    v.iter().all(|x| f.is_zero(x))
}

pub fn vec_add<F: Field>(f: &F, a: &[F::Elem], b: &[F::Elem]) -> Vec<F::Elem> {
    a.iter().zip(b).map(|(x, y)| f.add(x, y)).collect()
}

pub fn vec_scale<F: Field>(f: &F, a: &[F::Elem], c: &F::Elem) -> Vec<F::Elem> {
    a.iter().map(|x| f.mul(x, c)).collect()
}

/// `acc += c·v`
pub fn axpy<F: Field>(f: &F, acc: &mut [F::Elem], c: &F::Elem, v: &[F::Elem]) {
    if f.is_zero(c) {
        return;
    }
    for (a, x) in acc.iter_mut().zip(v) {
        if !f.is_zero(x) {
            *a = f.mul_add(a, c, x);
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::{FiniteField, Rationals};
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn f(p: u64) -> FiniteField {
        FiniteField::prime(p).unwrap()
    }

    fn random_matrix(f: &FiniteField, n: usize, rng: &mut ChaCha8Rng) -> Matrix<u32> {
        Matrix::from_vec(n, n, (0..n * n).map(|_| f.random_elem(rng)).collect())
    }

    #[test]
    fn inverse_and_det() {
        let f7 = f(7);
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for _ in 0..50 {
            let n = rng.gen_range(1..6);
            let m = random_matrix(&f7, n, &mut rng);
            match m.inverse(&f7) {
                Ok(inv) => {
                    assert!(m.mul(&f7, &inv).is_identity(&f7));
                    assert_ne!(m.det(&f7), 0);
                }
                Err(LinalgError::Singular) => assert_eq!(m.det(&f7), 0),
                Err(e) => panic!("{e}"),
            }
        }
    }

    #[test]
    fn charpoly_vanishes_on_matrix() {
        let f5 = f(5);
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        for n in 1..7 {
            let m = random_matrix(&f5, n, &mut rng);
            let cp = m.charpoly(&f5);
            assert_eq!(cp.len(), n + 1);
            assert!(m.eval_poly(&f5, &cp).is_zero(&f5));
            // constant term is (-1)^n det
            let det = m.det(&f5);
            let expect = if n % 2 == 0 { det } else { f5.neg(&det) };
            assert_eq!(cp[0], expect);
        }
    }

    #[test]
    fn eigen_examples() {
        let f5 = f(5);
        let d = Matrix::diag(&f5, &[1, 2]);
        assert_eq!(d.eigenspace(&f5, &2).basis(), &[vec![0, 1]]);
        assert_eq!(d.eigenspace(&f5, &3).dim(), 0);
        let f7 = f(7);
        // companion matrix of x^2 + 1
        let c = Matrix::from_rows(vec![vec![0, 6], vec![1, 0]]);
        assert!(c.eigenvalues(&f7).is_empty());
        assert_eq!(c.charpoly(&f7), vec![1, 0, 1]);
    }

    #[test]
    fn adjoint_examples() {
        let f7 = f(7);
        let id = Matrix::identity(&f7, 3);
        let sigma = Matrix::from_cols(vec![vec![0, 1, 0], vec![0, 0, 1], vec![1, 0, 0]]);
        let star = adjoint(&f7, &sigma, &id).unwrap();
        assert_eq!(star.inverse(&f7).unwrap(), sigma);
        let g = Matrix::diag(&f7, &[2, 3]);
        assert_eq!(adjoint(&f7, &g, &Matrix::identity(&f7, 2)).unwrap(), g);
        let degenerate = Matrix::zeros(&f7, 2, 2);
        assert_eq!(adjoint(&f7, &g, &degenerate), Err(LinalgError::DegeneratePairing));
    }

    #[test]
    fn adjoint_defining_identity() {
        let f5 = f(5);
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        for _ in 0..20 {
            let g = random_matrix(&f5, 3, &mut rng);
            let p = random_matrix(&f5, 3, &mut rng);
            let Ok(star) = adjoint(&f5, &g, &p) else { continue };
            for i in 0..3 {
                for j in 0..3 {
                    let (v, w) = (unit_vector(&f5, 3, i), unit_vector(&f5, 3, j));
                    assert_eq!(bilinear(&f5, &p, &g.mul_vec(&f5, &v), &w), bilinear(&f5, &p, &v, &star.mul_vec(&f5, &w)));
                }
            }
            // applying the adjoint for the transposed form undoes the first
            let back = adjoint(&f5, &star, &p.transpose()).unwrap();
            assert_eq!(back, g);
        }
    }

    #[test]
    fn rational_kernel() {
        let q = Rationals;
        let one = q.one();
        let two = q.from_i64(2);
        let m = Matrix::from_rows(vec![vec![one.clone(), two.clone()], vec![two.clone(), q.from_i64(4)]]);
        let k = m.kernel(&q);
        assert_eq!(k.len(), 1);
        assert!(is_zero_vec(&q, &m.mul_vec(&q, &k[0])));
    }
}
