//! Small permutation groups: parsing, enumeration, permutation matrices and
//! line normalizers inside `S_n`.

use std::collections::{BTreeSet, VecDeque};
use std::fmt;

use thiserror::Error;

use crate::field::Field;
use crate::graded::{Flavor, GradedBasis};
use crate::linalg::Matrix;

pub const DEFAULT_GROUP_CAP: usize = 20_000;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum PermError {
    #[error("invalid permutation: {0}")]
    InvalidPermutation(String),
    #[error("group exceeds {cap} elements")]
    GroupTooLarge { cap: usize },
    #[error("cannot parse group `{text}`: {reason}")]
    Parse { text: String, reason: String },
    #[error("zero vector")]
    ZeroVector,
}

/// A bijection of `{0, …, n−1}`, displayed 1-based.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Permutation {
    images: Vec<usize>,
}

impl Permutation {
    pub fn identity(n: usize) -> Self {
        Permutation { images: (0..n).collect() }
    }

    /// From 0-based images.
    pub fn from_images(images: Vec<usize>) -> Result<Self, PermError> {
        let n = images.len();
        let mut seen = vec![false; n];
        for &i in &images {
            if i >= n || seen[i] {
                return Err(PermError::InvalidPermutation(format!("{images:?} is not a bijection")));
            }
            seen[i] = true;
        }
        Ok(Permutation { images })
    }

    /// Parses `(1 2)(2 3)` (cycles applied left to right), `()`, or one-line `[2,3,1]`.
    pub fn parse(n: usize, text: &str) -> Result<Self, PermError> {
        let t = text.trim();
        let bad = |reason: &str| PermError::Parse { text: t.to_string(), reason: reason.to_string() };
        if let Some(body) = t.strip_prefix('[').and_then(|s| s.strip_suffix(']')) {
            let imgs: Vec<usize> = body
                .split(|c: char| c == ',' || c.is_whitespace())
                .filter(|s| !s.is_empty())
                .map(|s| s.parse::<usize>().map_err(|_| bad("bad one-line entry")))
                .collect::<Result<_, _>>()?;
            if imgs.len() != n || imgs.iter().any(|&i| i == 0) {
                return Err(bad("one-line notation must list n images in 1..n"));
            }
            return Self::from_images(imgs.into_iter().map(|i| i - 1).collect());
        }
        let mut result = Self::identity(n);
        let mut rest = t;
        while !rest.is_empty() {
            let open = rest.strip_prefix('(').ok_or_else(|| bad("expected `(`"))?;
            let close = open.find(')').ok_or_else(|| bad("unclosed cycle"))?;
            let points: Vec<usize> = open[..close]
                .split(|c: char| c == ',' || c.is_whitespace())
                .filter(|s| !s.is_empty())
                .map(|s| s.parse::<usize>().map_err(|_| bad("bad cycle entry")))
                .collect::<Result<_, _>>()?;
            if points.iter().any(|&p| p == 0 || p > n) {
                return Err(PermError::InvalidPermutation(format!("cycle point outside 1..{n} in `{t}`")));
            }
            let distinct: BTreeSet<_> = points.iter().collect();
            if distinct.len() != points.len() {
                return Err(PermError::InvalidPermutation(format!("repeated point in cycle of `{t}`")));
            }
            let mut cycle = Self::identity(n);
            for (k, &p) in points.iter().enumerate() {
                cycle.images[p - 1] = points[(k + 1) % points.len()] - 1;
            }
            // apply earlier cycles first
            result = cycle.compose(&result);
            rest = open[close + 1..].trim_start();
        }
        Ok(result)
    }

    pub fn degree(&self) -> usize {
        self.images.len()
    }

    pub fn images(&self) -> &[usize] {
        &self.images
    }

    pub fn apply(&self, i: usize) -> usize {
        self.images[i]
    }

    /// `self ∘ other`: first `other`, then `self`.
    pub fn compose(&self, other: &Self) -> Self {
        Permutation { images: other.images.iter().map(|&i| self.images[i]).collect() }
    }

    pub fn inverse(&self) -> Self {
        let mut inv = vec![0; self.images.len()];
        for (i, &j) in self.images.iter().enumerate() {
            inv[j] = i;
        }
        Permutation { images: inv }
    }

    pub fn is_identity(&self) -> bool {
        self.images.iter().enumerate().all(|(i, &j)| i == j)
    }

    /// The permutation matrix sending `e_i` to `e_{σ(i)}`.
    pub fn matrix<F: Field>(&self, f: &F) -> Matrix<F::Elem> {
        let n = self.degree();
        let mut m = Matrix::zeros(f, n, n);
        for (i, &j) in self.images.iter().enumerate() {
            m.set(j, i, f.one());
        }
        m
    }
}

impl fmt::Display for Permutation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let n = self.degree();
        let mut seen = vec![false; n];
        let mut wrote = false;
        for start in 0..n {
            if seen[start] || self.images[start] == start {
                continue;
            }
            let mut cyc = Vec::new();
            let mut i = start;
            while !seen[i] {
                seen[i] = true;
                cyc.push((i + 1).to_string());
                i = self.images[i];
            }
            write!(f, "({})", cyc.join(" "))?;
            wrote = true;
        }
        if !wrote {
            write!(f, "()")?;
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PermGroup {
    n: usize,
    generators: Vec<Permutation>,
    /// Sorted; the identity comes first.
    elements: Vec<Permutation>,
}

impl PermGroup {
    pub fn degree(&self) -> usize {
        self.n
    }

    pub fn order(&self) -> usize {
        self.elements.len()
    }

    pub fn generators(&self) -> &[Permutation] {
        &self.generators
    }

    pub fn elements(&self) -> &[Permutation] {
        &self.elements
    }

    pub fn contains(&self, p: &Permutation) -> bool {
        self.elements.binary_search(p).is_ok()
    }

    pub fn is_trivial(&self) -> bool {
        self.elements.len() == 1
    }

    /// `n=3; gens=(1 2),(1 2 3)`
    pub fn parse(text: &str) -> Result<Self, PermError> {
        let bad = |reason: &str| PermError::Parse { text: text.to_string(), reason: reason.to_string() };
        let mut n = None;
        let mut gens_text = None;
        for part in text.split(';') {
            let part = part.trim();
            if part.is_empty() {
                continue;
            }
            let (k, v) = part.split_once('=').ok_or_else(|| bad("expected key=value"))?;
            match k.trim() {
                "n" => n = Some(v.trim().parse::<usize>().map_err(|_| bad("n must be a positive integer"))?),
                "gens" => gens_text = Some(v.trim().to_string()),
                other => return Err(bad(&format!("unknown key `{other}`"))),
            }
        }
        let n = n.filter(|&n| n > 0).ok_or_else(|| bad("missing n"))?;
        let gens_text = gens_text.unwrap_or_default();
        let mut gens = Vec::new();
        for token in split_top_level(&gens_text) {
            gens.push(Permutation::parse(n, &token)?);
        }
        group_from_generators(n, &gens, DEFAULT_GROUP_CAP)
    }

    pub fn describe(&self) -> String {
        let gens: Vec<String> = self.generators.iter().map(|g| g.to_string()).collect();
        format!("n={}; gens={}", self.n, gens.join(","))
    }
}

/// Splits on commas outside parentheses and brackets.
fn split_top_level(s: &str) -> Vec<String> {
    let mut out = Vec::new();
    let mut depth = 0i32;
    let mut cur = String::new();
    for c in s.chars() {
        match c {
            '(' | '[' => depth += 1,
            ')' | ']' => depth -= 1,
            _ => {}
        }
        if c == ',' && depth == 0 {
            out.push(std::mem::take(&mut cur));
        } else {
            cur.push(c);
        }
    }
    out.push(cur);
    out.into_iter().map(|t| t.trim().to_string()).filter(|t| !t.is_empty()).collect()
}

/// Breadth-first closure of the generators.
pub fn group_from_generators(n: usize, gens: &[Permutation], cap: usize) -> Result<PermGroup, PermError> {
    if let Some(g) = gens.iter().find(|g| g.degree() != n) {
        return Err(PermError::InvalidPermutation(format!("generator {g} has degree {}, expected {n}", g.degree())));
    }
    let id = Permutation::identity(n);
    let mut seen: BTreeSet<Permutation> = BTreeSet::from([id.clone()]);
    let mut queue = VecDeque::from([id]);
    while let Some(x) = queue.pop_front() {
        for g in gens {
            let y = g.compose(&x);
            if seen.insert(y.clone()) {
                if seen.len() > cap {
                    return Err(PermError::GroupTooLarge { cap });
                }
                queue.push_back(y);
            }
        }
    }
    Ok(PermGroup { n, generators: gens.to_vec(), elements: seen.into_iter().collect() })
}

pub fn symmetric_group(n: usize) -> PermGroup {
    let mut gens = Vec::new();
    if n >= 2 {
        let mut swap = Permutation::identity(n);
        swap.images.swap(0, 1);
        gens.push(swap);
    }
    if n >= 3 {
        gens.push(Permutation { images: (0..n).map(|i| (i + 1) % n).collect() });
    }
    group_from_generators(n, &gens, usize::MAX).expect("symmetric group")
}

/// Action of a permutation on a vector in the monomial basis of `Sym^m`.
pub fn permute_symmetric<F: Field>(basis: &GradedBasis, sigma: &Permutation, v: &[F::Elem], f: &F) -> Vec<F::Elem> {
    let mut out = vec![f.zero(); v.len()];
    for (idx, c) in v.iter().enumerate() {
        if f.is_zero(c) {
            continue;
        }
        let mut m: Vec<usize> = basis.monomials()[idx].iter().map(|&i| sigma.apply(i)).collect();
        m.sort_unstable();
        let t = basis.index_of(&m).expect("monomial exists");
        out[t] = c.clone();
    }
    out
}

fn proportional<F: Field>(f: &F, a: &[F::Elem], b: &[F::Elem]) -> bool {
    let Some(p) = b.iter().position(|x| !f.is_zero(x)) else { return false };
    if f.is_zero(&a[p]) {
        return false;
    }
    let c = f.div(&a[p], &b[p]).expect("nonzero");
    a.iter().zip(b).all(|(x, y)| *x == f.mul(&c, y))
}

/// Elements of `within` whose permutation action on `Sym^degree` fixes the line `⟨v⟩`.
pub fn line_normalizer<F: Field>(f: &F, degree: usize, v: &[F::Elem], within: &PermGroup) -> Result<PermGroup, PermError> {
    if v.iter().all(|x| f.is_zero(x)) {
        return Err(PermError::ZeroVector);
    }
    let basis = GradedBasis::new(Flavor::Symmetric, within.degree(), degree);
    if basis.len() != v.len() {
        return Err(PermError::InvalidPermutation(format!(
            "vector has {} coordinates, Sym^{degree} of {} variables has {}",
            v.len(),
            within.degree(),
            basis.len()
        )));
    }
    let elements: Vec<Permutation> =
        within.elements().iter().filter(|s| proportional(f, &permute_symmetric(&basis, s, v, f), v)).cloned().collect();
    let generators = elements.iter().filter(|s| !s.is_identity()).cloned().collect();
    Ok(PermGroup { n: within.degree(), generators, elements })
}

/// Regular permutation representation of a group given by its Cayley table
/// (`table[a][b]` is the index of `a·b`).
pub fn regular_representation(table: &[Vec<usize>]) -> Result<PermGroup, PermError> {
    let n = table.len();
    let mut gens = Vec::new();
    for row in table {
        if row.len() != n {
            return Err(PermError::InvalidPermutation("Cayley table must be square".into()));
        }
        gens.push(Permutation::from_images(row.clone())?);
    }
    let g = group_from_generators(n, &gens, DEFAULT_GROUP_CAP)?;
    if g.order() != n {
        return Err(PermError::InvalidPermutation("Cayley table is not a group table".into()));
    }
    Ok(g)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::FiniteField;

    #[test]
    fn parse_and_compose() {
        let a = Permutation::parse(3, "(1 2)(2 3)").unwrap();
        // 1 → 2 → 3, 2 → 1, 3 → 2
        assert_eq!(a.images(), &[2, 0, 1]);
        assert_eq!(Permutation::parse(3, "[2,3,1]").unwrap().images(), &[1, 2, 0]);
        assert!(Permutation::parse(3, "()").unwrap().is_identity());
        assert!(Permutation::parse(2, "(1 3)").is_err());
        assert_eq!(a.to_string(), "(1 3 2)");
    }

    #[test]
    fn group_orders() {
        assert_eq!(PermGroup::parse("n=3; gens=(1 2 3)").unwrap().order(), 3);
        assert_eq!(PermGroup::parse("n=2; gens=(1 2)").unwrap().order(), 2);
        assert_eq!(PermGroup::parse("n=3; gens=(1 2),(1 2 3)").unwrap().order(), 6);
        assert_eq!(PermGroup::parse("n=2; gens=").unwrap().order(), 1);
        assert_eq!(symmetric_group(4).order(), 24);
        let s6 = symmetric_group(6);
        assert!(matches!(group_from_generators(6, s6.generators(), 100), Err(PermError::GroupTooLarge { cap: 100 })));
    }

    #[test]
    fn closure_and_matrix_homomorphism() {
        let f = FiniteField::prime(7).unwrap();
        let s4 = symmetric_group(4);
        for a in s4.elements() {
            for b in s4.elements() {
                let ab = a.compose(b);
                assert!(s4.contains(&ab));
                assert_eq!(ab.matrix(&f), a.matrix(&f).mul(&f, &b.matrix(&f)));
            }
        }
    }

    #[test]
    fn regular_representation_of_c3() {
        let table = vec![vec![0, 1, 2], vec![1, 2, 0], vec![2, 0, 1]];
        let g = regular_representation(&table).unwrap();
        assert_eq!(g.order(), 3);
        assert!(regular_representation(&[vec![0, 1], vec![0, 1]]).is_err());
    }

    #[test]
    fn fully_symmetric_monomial_is_fixed_by_everything() {
        let f = FiniteField::prime(5).unwrap();
        let basis = GradedBasis::new(Flavor::Symmetric, 3, 3);
        let mut v = vec![0u32; basis.len()];
        v[basis.index_of(&[0, 1, 2]).unwrap()] = 1;
        let s3 = symmetric_group(3);
        assert_eq!(line_normalizer(&f, 3, &v, &s3).unwrap().order(), 6);
        assert_eq!(line_normalizer(&f, 3, &vec![0; basis.len()], &s3), Err(PermError::ZeroVector));
    }
}
